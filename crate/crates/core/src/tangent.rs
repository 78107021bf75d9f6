//! The four-term sequence
//! `0 → End_A(M)_0 → End_R(V ⊗ R)_0 → T_M Rep → Ext¹_A(M, M)_0 → 0`
//! at a point of the representation scheme.
//!
//! The middle map is the infinitesimal `G_V`-action `φ ↦ (φ·act_i - act_i·φ)_i`.

use serde::Serialize;

use crate::algdata::FramedModule;
use crate::error::{Error, Result};
use crate::exactla::{Matrix, Subspace};
use crate::gradedcore::PolyMatrix;
use crate::homresolve::{ext1_window_with, hom_zero_coords, TruncatedResolution};
use crate::homspace::HomSpace;
use crate::repscheme::{group_info, EquationSystem};

#[derive(Clone, Debug, Serialize)]
pub struct TangentReport {
    pub framing: Vec<i64>,
    pub dim_end_a_0: usize,
    pub dim_end_r_0: usize,
    pub dim_tangent: usize,
    pub dim_ext1_0_via_sequence: usize,
    pub dim_ext1_0_via_resolution: Option<usize>,
    pub orbit_dim: usize,
    /// `dim T - dim Ext¹_0 = dim End_R,0 - dim End_A,0`.
    pub euler_identity: bool,
    /// Every infinitesimal action vector lies in the Jacobian kernel.
    pub image_in_kernel: bool,
    /// Kernel of the action map equals `Hom_A(M, M)_0` computed from a
    /// resolution (both inclusions).
    pub kernel_equals_end_a: bool,
    pub exactness_verified: bool,
    pub rigid_degree_zero: bool,
    pub field: u64,
    pub truncation: i64,
}

/// Jacobian of the system at `M`; fails if `M` is not on the variety.
pub fn jacobian_at(e: &EquationSystem, m: &FramedModule) -> Result<Matrix> {
    let x = e.coords.point_of(m)?;
    let nonzero = e.evaluate_at(&x).iter().filter(|&&r| r != 0).count();
    if nonzero > 0 {
        return Err(Error::OffVariety { nonzero });
    }
    Ok(e.jacobian(&x))
}

/// Basis of `End_A(M)_0`.
pub fn end_a_zero(m: &FramedModule) -> Vec<PolyMatrix> {
    crate::homresolve::hom_zero(m, m)
}

/// Tangent vector `(φ·act_i - act_i·φ)_i` in the system's coordinates.
pub fn infinitesimal_action(
    e: &EquationSystem,
    m: &FramedModule,
    phi: &PolyMatrix,
) -> Result<Vec<u64>> {
    let f = m.field();
    let cs = &e.coords;
    let mut v = Vec::with_capacity(cs.total_dim());
    for i in 1..m.algebra().num_generators() {
        let c = phi.mul(m.action(i), f).sub(&m.action(i).mul(phi, f), f);
        let coords = cs.block(i).coords_of(&c).ok_or_else(|| {
            Error::Input("φ is not a degree-0 endomorphism of the framing".into())
        })?;
        v.extend(coords);
    }
    Ok(v)
}

/// Matrix of the infinitesimal action on the coordinate basis of `End_R(V ⊗ R)_0`.
pub fn action_matrix(e: &EquationSystem, m: &FramedModule, lie: &HomSpace) -> Result<Matrix> {
    let f = m.field();
    let mut cols = Vec::with_capacity(lie.dim());
    for k in 0..lie.dim() {
        cols.push(infinitesimal_action(e, m, &lie.unit_matrix(k))?);
    }
    Ok(Matrix::from_columns(f, e.coords.total_dim(), &cols))
}

pub fn four_term_report(
    e: &EquationSystem,
    m: &FramedModule,
    with_resolution_crosscheck: bool,
) -> Result<TangentReport> {
    let alg = m.algebra();
    let f = alg.field();
    let jac = jacobian_at(e, m)?;
    let ncoords = e.coords.total_dim();
    let dim_tangent = ncoords - jac.rank();
    let lie = group_info(&m.framing(), alg.ring()).lie_algebra;
    let act = action_matrix(e, m, &lie)?;
    let orbit_dim = act.rank();
    let dim_end_r_0 = lie.dim();
    let kernel = act.kernel_basis();
    let dim_end_a_0 = kernel.len();
    let image_in_kernel = jac.mul(&act).is_zero();
    let ext_seq = dim_tangent.checked_sub(orbit_dim).ok_or_else(|| {
        Error::Computation(
            "orbit dimension exceeds tangent dimension: action leaves the Jacobian kernel".into(),
        )
    })?;

    // Independent description of End_A(M)_0: maps F_0 → M killing the image
    // of F_1, compared with {φ∘ε : φ ∈ ker(action)}.
    let length = if with_resolution_crosscheck { 2 } else { 1 };
    let res = TruncatedResolution::compute(m, length, (0, 0))?;
    let kernel_equals_end_a = {
        let d0 = res.hom_differential(0, m, 0);
        let hom_via_res = Subspace::spanned_by(f, d0.cols(), &d0.kernel_basis());
        let eps = &res.steps[0];
        let mut composed = Subspace::new(f, d0.cols());
        let mut ok = true;
        for v in &kernel {
            let phi = lie.matrix_of(v, f);
            // φ∘ε on each generator e_j: φ applied to its image in M.
            let mut coords = Vec::with_capacity(d0.cols());
            for (j, img) in eps.images.iter().enumerate() {
                let out = crate::algdata::mat_vec(&phi, img, f);
                coords.extend(m.degree_basis(eps.shifts[j]).vector_of(&out, f));
            }
            ok &= hom_via_res.contains(&coords);
            composed.insert(&coords);
        }
        ok && composed.dim() == hom_via_res.dim() && composed.dim() == dim_end_a_0
    };
    let dim_ext1_0_via_resolution = if with_resolution_crosscheck {
        Some(ext1_window_with(&res, m, (0, 0))?.dim_at(0))
    } else {
        None
    };
    let euler_identity =
        dim_tangent as i64 - ext_seq as i64 == dim_end_r_0 as i64 - dim_end_a_0 as i64;
    let crosscheck_ok = dim_ext1_0_via_resolution.is_none_or(|x| x == ext_seq);
    Ok(TangentReport {
        framing: m.degrees().to_vec(),
        dim_end_a_0,
        dim_end_r_0,
        dim_tangent,
        dim_ext1_0_via_sequence: ext_seq,
        dim_ext1_0_via_resolution,
        orbit_dim,
        euler_identity,
        image_in_kernel,
        kernel_equals_end_a,
        exactness_verified: euler_identity
            && image_in_kernel
            && kernel_equals_end_a
            && crosscheck_ok,
        rigid_degree_zero: ext_seq == 0,
        field: f.p(),
        truncation: alg.truncation(),
    })
}

pub fn is_rigid_degree_zero(m: &FramedModule) -> Result<bool> {
    let e = EquationSystem::generate(m.algebra(), &m.framing());
    Ok(four_term_report(&e, m, false)?.rigid_degree_zero)
}

/// `dim End_A(M)_0` through the commutant system only.
pub fn end_a_zero_dim(m: &FramedModule) -> usize {
    hom_zero_coords(m, m).1.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algdata::{Algebra, AlgebraInput};
    use crate::exactla::PrimeField;
    use crate::gradedcore::{GradedDims, Monomial, Poly, WeightedPolyRing};
    use std::sync::Arc;

    fn nodal() -> Arc<Algebra> {
        Arc::new(Algebra::build(AlgebraInput::nodal(PrimeField::new(32003).unwrap()), 12).unwrap())
    }

    fn t() -> Poly {
        Poly::term(1, Monomial(vec![1]))
    }

    fn diag_point(a: &Arc<Algebra>, c: [u64; 2]) -> FramedModule {
        let f = a.field();
        let m = PolyMatrix::from_entries(
            2,
            2,
            vec![
                t().scale(c[0], f),
                Poly::zero(),
                Poly::zero(),
                t().scale(c[1], f),
            ],
        );
        FramedModule::new(a.clone(), vec![0, 0], vec![m]).unwrap()
    }

    #[test]
    fn mx_plus_my_report() {
        let a = nodal();
        let m = diag_point(&a, [1, 0]);
        let e = EquationSystem::generate(&a, &m.framing());
        let r = four_term_report(&e, &m, true).unwrap();
        assert_eq!(
            (
                r.dim_end_a_0,
                r.dim_end_r_0,
                r.dim_tangent,
                r.dim_ext1_0_via_sequence
            ),
            (2, 4, 2, 0)
        );
        assert_eq!(r.dim_ext1_0_via_resolution, Some(0));
        assert!(r.exactness_verified && r.rigid_degree_zero);
    }

    #[test]
    fn jacobian_at_idempotents() {
        let a = nodal();
        let e = EquationSystem::generate(&a, &GradedDims::from_degrees(&[0, 0]));
        let j = jacobian_at(&e, &diag_point(&a, [1, 0])).unwrap();
        assert_eq!(4 - j.rank(), 2);
        let j0 = jacobian_at(&e, &diag_point(&a, [0, 0])).unwrap();
        assert_eq!(j0.rank(), 4);
    }

    #[test]
    fn off_variety_is_rejected() {
        let a = nodal();
        let e = EquationSystem::generate(&a, &GradedDims::from_degrees(&[0, 0]));
        let f = a.field();
        let bad = PolyMatrix::from_entries(
            2,
            2,
            vec![t().scale(2, f), Poly::zero(), Poly::zero(), Poly::zero()],
        );
        let m = FramedModule::new_unchecked(a.clone(), vec![0, 0], vec![bad]).unwrap();
        assert!(matches!(
            jacobian_at(&e, &m),
            Err(Error::OffVariety { nonzero: 1 })
        ));
    }

    #[test]
    fn infinitesimal_action_examples() {
        let a = nodal();
        let m = diag_point(&a, [1, 0]);
        let e = EquationSystem::generate(&a, &m.framing());
        let one = Poly::constant(1, 1);
        let e12 = PolyMatrix::from_entries(
            2,
            2,
            vec![Poly::zero(), one.clone(), Poly::zero(), Poly::zero()],
        );
        assert!(infinitesimal_action(&e, &m, &e12)
            .unwrap()
            .iter()
            .any(|&c| c != 0));
        let id = PolyMatrix::identity(2, 1);
        assert!(infinitesimal_action(&e, &m, &id)
            .unwrap()
            .iter()
            .all(|&c| c == 0));
        for phi in end_a_zero(&m) {
            assert!(infinitesimal_action(&e, &m, &phi)
                .unwrap()
                .iter()
                .all(|&c| c == 0));
        }
    }

    #[test]
    fn rank_one_points() {
        let a = nodal();
        let mx = FramedModule::new(
            a.clone(),
            vec![0],
            vec![PolyMatrix::from_entries(1, 1, vec![t()])],
        )
        .unwrap();
        let e = EquationSystem::generate(&a, &mx.framing());
        let r = four_term_report(&e, &mx, true).unwrap();
        assert_eq!(
            (
                r.dim_end_a_0,
                r.dim_end_r_0,
                r.dim_tangent,
                r.dim_ext1_0_via_sequence
            ),
            (1, 1, 0, 0)
        );
        assert!(is_rigid_degree_zero(&mx).unwrap());
    }

    #[test]
    fn regular_ring_free_module() {
        let f = PrimeField::new(32003).unwrap();
        let ring = WeightedPolyRing::new(vec![1]).unwrap();
        let a = Arc::new(
            Algebra::build(AlgebraInput::polynomial_ring(f, ring, vec!["t".into()]), 8).unwrap(),
        );
        let m = FramedModule::new(a.clone(), vec![0], vec![]).unwrap();
        let e = EquationSystem::generate(&a, &m.framing());
        assert!(e.is_empty());
        let r = four_term_report(&e, &m, true).unwrap();
        assert_eq!(
            (
                r.dim_end_a_0,
                r.dim_end_r_0,
                r.dim_tangent,
                r.dim_ext1_0_via_sequence
            ),
            (1, 1, 0, 0)
        );
    }
}
