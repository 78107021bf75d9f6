//! Minimal graded free resolutions over `A`, graded `Hom` and `Ext¹`
//! windows, and the `R`-dual `M^∨ = Hom_R(M, R)`.
//!
//! A free module `⊕_j A(-b_j)` is itself a framed module on the basis
//! `α_i e_j`, so an `A`-linear map out of it is an `R`-linear polynomial
//! matrix determined by the images of the `e_j`. Kernels are computed degree
//! by degree with exact linear algebra.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algdata::{degree_matrix, free_basis, mat_vec, DegreeBasis, FramedModule};
use crate::error::{Error, Result};
use crate::exactla::{Matrix, PrimeField, Subspace};
use crate::gradedcore::{Poly, PolyMatrix};
use crate::homspace::HomSpace;

/// One free module of a resolution and the map into the previous term.
#[derive(Clone, Debug)]
pub struct FreeStep {
    /// Generator degrees `b_j`, ascending.
    pub shifts: Vec<i64>,
    pub module: FramedModule,
    /// Image of each generator `e_j` in the previous module's `R`-basis.
    pub images: Vec<Vec<Poly>>,
    /// The differential as an `R`-linear polynomial matrix.
    pub differential: PolyMatrix,
}

#[derive(Clone, Debug)]
pub struct TruncatedResolution {
    pub module: FramedModule,
    pub steps: Vec<FreeStep>,
    pub window: (i64, i64),
    pub truncation: i64,
    pub dd_zero: bool,
    pub minimal: bool,
    pub exact_in_window: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Periodicity {
    /// The module is free; nothing past step 0.
    Free,
    /// `F_{k+2} = F_k(-degree)` for every computed `k ≥ 1`.
    Periodic {
        degree: i64,
    },
    NotPeriodic,
    TooShort,
}

fn g_range(degrees: &[i64]) -> (i64, i64) {
    (
        *degrees.first().unwrap_or(&0),
        *degrees.last().unwrap_or(&-1),
    )
}

fn check_bound(needed: i64, bound: i64) -> Result<()> {
    if needed > bound {
        Err(Error::WindowExhausted { needed, bound })
    } else {
        Ok(())
    }
}

/// Minimal homogeneous generators of a graded submodule `K ⊂ F` given by
/// its components `K_d` for `d ∈ [lo, hi]` (zero below `lo`). `A_+K_d` is
/// spanned by `t_v K_{d - w_v}` and `α_i K_{d - deg α_i}`.
fn minimal_generators(
    f_mod: &FramedModule,
    bases: &BTreeMap<i64, DegreeBasis>,
    kernels: &BTreeMap<i64, Vec<Vec<u64>>>,
) -> Vec<(i64, Vec<u64>)> {
    let alg = f_mod.algebra();
    let f = alg.field();
    let ring = alg.ring();
    let mut gens = Vec::new();
    for (&d, kd) in kernels {
        if kd.is_empty() {
            continue;
        }
        let tgt = &bases[&d];
        let mut span = Subspace::new(f, tgt.len());
        for v in 0..ring.num_vars() {
            let e = d - ring.weights[v];
            if let (Some(src), Some(ke)) = (bases.get(&e), kernels.get(&e)) {
                let m = crate::gradedcore::Monomial::var(ring.num_vars(), v, 1);
                for x in ke {
                    span.insert(&f_mod.mul_monomial(&m, src, tgt, x));
                }
            }
        }
        for i in 1..alg.num_generators() {
            let e = d - alg.generator_degree(i);
            if e == d {
                continue;
            }
            if let (Some(src), Some(ke)) = (bases.get(&e), kernels.get(&e)) {
                for x in ke {
                    span.insert(&f_mod.act_with(i, src, tgt, x));
                }
            }
        }
        for x in kd {
            if span.insert(x) {
                gens.push((d, x.clone()));
            }
        }
    }
    gens
}

/// Builds the free module on generators of the given degrees and the
/// `R`-linear matrix of the `A`-linear map sending `e_j` to `images[j]`.
fn free_step(target: &FramedModule, shifts: Vec<i64>, images: Vec<Vec<Poly>>) -> FreeStep {
    let alg = target.algebra();
    let f = alg.field();
    let module = FramedModule::free(alg, &shifts);
    let (basis, _) = free_basis(alg, &shifts);
    let mut differential = PolyMatrix::zeros(target.rank(), basis.len());
    for (col, &(j, i)) in basis.iter().enumerate() {
        let img = mat_vec(target.action(i), &images[j], f);
        for (row, p) in img.into_iter().enumerate() {
            differential.set(row, col, p);
        }
    }
    FreeStep {
        shifts,
        module,
        images,
        differential,
    }
}

impl TruncatedResolution {
    /// Computes `F_0, …, F_length` (fewer if the module turns out free).
    pub fn compute(
        m: &FramedModule,
        length: usize,
        window: (i64, i64),
    ) -> Result<TruncatedResolution> {
        let alg = m.algebra().clone();
        let f = alg.field();
        let bound = alg.truncation();
        if !alg.check_connected_finite().connected {
            return Err(Error::Unsupported(
                "minimal resolutions need a connected algebra (dim A_0 = 1)".into(),
            ));
        }
        if m.rank() == 0 {
            return Err(Error::Input("the zero module has no generators".into()));
        }
        let mut steps: Vec<FreeStep> = Vec::new();
        // Step 0: generators of M itself.
        {
            let (lo, hi) = g_range(m.degrees());
            check_bound(hi, bound)?;
            let mut bases = BTreeMap::new();
            let mut kernels = BTreeMap::new();
            for d in lo..=hi {
                let b = m.degree_basis(d);
                let n = b.len();
                kernels.insert(d, (0..n).map(|k| unit(n, k)).collect());
                bases.insert(d, b);
            }
            let gens = minimal_generators(m, &bases, &kernels);
            let shifts = gens.iter().map(|g| g.0).collect();
            let images = gens
                .iter()
                .map(|(d, v)| bases[d].poly_vector(v, m.rank(), f))
                .collect();
            steps.push(free_step(m, shifts, images));
        }
        while steps.len() <= length {
            let prev = steps.last().expect("step 0 exists");
            if prev.shifts.is_empty() {
                break;
            }
            let fm = &prev.module;
            let target = if steps.len() == 1 {
                m
            } else {
                &steps[steps.len() - 2].module
            };
            let (lo, hi) = g_range(fm.degrees());
            check_bound(hi, bound)?;
            let mut bases = BTreeMap::new();
            let mut kernels = BTreeMap::new();
            for d in lo..=hi {
                let src = fm.degree_basis(d);
                let tgt = target.degree_basis(d);
                let mat = degree_matrix(&prev.differential, &src, &tgt, f);
                kernels.insert(d, mat.kernel_basis());
                bases.insert(d, src);
            }
            let gens = minimal_generators(fm, &bases, &kernels);
            if gens.is_empty() {
                break;
            }
            let shifts = gens.iter().map(|g| g.0).collect();
            let images = gens
                .iter()
                .map(|(d, v)| bases[d].poly_vector(v, fm.rank(), f))
                .collect();
            let step = free_step(fm, shifts, images);
            steps.push(step);
        }
        let mut res = TruncatedResolution {
            module: m.clone(),
            steps,
            window,
            truncation: bound,
            dd_zero: false,
            minimal: false,
            exact_in_window: false,
        };
        res.dd_zero = res.check_dd_zero();
        res.minimal = res.check_minimal();
        res.exact_in_window = res.check_exact(window)?;
        Ok(res)
    }

    pub fn length(&self) -> usize {
        self.steps.len()
    }

    pub fn shifts(&self, k: usize) -> &[i64] {
        self.steps
            .get(k)
            .map(|s| s.shifts.as_slice())
            .unwrap_or(&[])
    }

    fn field(&self) -> PrimeField {
        self.module.field()
    }

    /// `d_{k-1} ∘ d_k = 0` as polynomial matrices, hence in every degree.
    pub fn check_dd_zero(&self) -> bool {
        let f = self.field();
        self.steps
            .windows(2)
            .all(|w| w[0].differential.mul(&w[1].differential, f).is_zero())
    }

    /// No generator image has a nonzero constant coefficient on a unit basis
    /// vector `1·e_m` of the previous free module.
    pub fn check_minimal(&self) -> bool {
        let alg = self.module.algebra();
        self.steps.windows(2).all(|w| {
            let (basis, _) = free_basis(alg, &w[0].shifts);
            w[1].images.iter().all(|img| {
                basis
                    .iter()
                    .zip(img)
                    .all(|(&(_, i), p)| i != 0 || p.terms().all(|(m, c)| c == 0 || !m.is_one()))
            })
        })
    }

    /// Degree-wise exactness: `F_0 → M` onto, and `im d_k = ker d_{k-1}` for
    /// each computed step, in every degree of the window.
    pub fn check_exact(&self, window: (i64, i64)) -> Result<bool> {
        let f = self.field();
        let (lo, hi) = window;
        for d in lo..=hi {
            let mut targets: Vec<&FramedModule> = vec![&self.module];
            targets.extend(self.steps.iter().map(|s| &s.module));
            for (k, step) in self.steps.iter().enumerate() {
                let src = step.module.degree_basis(d);
                let tgt = targets[k].degree_basis(d);
                let rank_in = degree_matrix(&step.differential, &src, &tgt, f).rank();
                let expected = if k == 0 {
                    tgt.len()
                } else {
                    let below = targets[k - 1].degree_basis(d);
                    tgt.len()
                        - degree_matrix(&self.steps[k - 1].differential, &tgt, &below, f).rank()
                };
                if rank_in != expected {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Shift pattern from homological step 1 on.
    pub fn periodicity(&self) -> Periodicity {
        if self.steps.len() <= 1 {
            return Periodicity::Free;
        }
        if self.steps.len() < 5 {
            return Periodicity::TooShort;
        }
        let diff = |a: &[i64], b: &[i64]| -> Option<i64> {
            if a.len() != b.len() || a.is_empty() {
                return None;
            }
            let c = b[0] - a[0];
            a.iter().zip(b).all(|(x, y)| y - x == c).then_some(c)
        };
        let mut period = None;
        for k in 1..self.steps.len() - 2 {
            match diff(self.shifts(k), self.shifts(k + 2)) {
                Some(c) if c > 0 && period.is_none_or(|p| p == c) => period = Some(c),
                _ => return Periodicity::NotPeriodic,
            }
        }
        match period {
            Some(degree) => Periodicity::Periodic { degree },
            None => Periodicity::TooShort,
        }
    }

    /// Matrix of `Hom_A(F_k, N)_d → Hom_A(F_{k+1}, N)_d`, `ψ ↦ ψ ∘ d_{k+1}`,
    /// with `Hom_A(F_k, N)_d = ⊕_j N_{b_j + d}`.
    pub fn hom_differential(&self, k: usize, n: &FramedModule, d: i64) -> Matrix {
        let f = self.field();
        let alg = self.module.algebra();
        let src_bases: Vec<DegreeBasis> = self
            .shifts(k)
            .iter()
            .map(|b| n.degree_basis(b + d))
            .collect();
        let tgt_bases: Vec<DegreeBasis> = self
            .shifts(k + 1)
            .iter()
            .map(|b| n.degree_basis(b + d))
            .collect();
        let rows: usize = tgt_bases.iter().map(DegreeBasis::len).sum();
        let cols: usize = src_bases.iter().map(DegreeBasis::len).sum();
        let mut out = Matrix::zeros(f, rows, cols);
        let Some(next) = self.steps.get(k + 1) else {
            return out;
        };
        let (basis, _) = free_basis(alg, self.shifts(k));
        let mut col = 0;
        for (j, sb) in src_bases.iter().enumerate() {
            for e in 0..sb.len() {
                let mut u = vec![0; sb.len()];
                u[e] = 1;
                let psi_ej = sb.poly_vector(&u, n.rank(), f);
                // ψ(α_i e_j) for every generator i
                let acted: Vec<Vec<Poly>> = (0..alg.num_generators())
                    .map(|i| mat_vec(n.action(i), &psi_ej, f))
                    .collect();
                let mut row = 0;
                for (m, tb) in tgt_bases.iter().enumerate() {
                    let mut img = vec![Poly::zero(); n.rank()];
                    for (pos, &(jj, i)) in basis.iter().enumerate() {
                        if jj != j {
                            continue;
                        }
                        let c = &next.images[m][pos];
                        if c.is_zero() {
                            continue;
                        }
                        for (o, a) in img.iter_mut().zip(&acted[i]) {
                            if !a.is_zero() {
                                o.add_assign(&a.mul(c, f), f);
                            }
                        }
                    }
                    for (r, v) in tb.vector_of(&img, f).into_iter().enumerate() {
                        if v != 0 {
                            out.set(row + r, col, v);
                        }
                    }
                    row += tb.len();
                }
                col += 1;
            }
        }
        out
    }

    /// Largest internal degree touched by `Hom(F_k, N)_d`, `k ≤ 2`, `d ≤ hi`.
    fn needed_degree(&self, hi: i64) -> i64 {
        let top_shift = (0..3)
            .flat_map(|k| self.shifts(k).iter().copied())
            .max()
            .unwrap_or(0);
        let (_, gmax_f) = self
            .steps
            .last()
            .map(|s| g_range(s.module.degrees()))
            .unwrap_or((0, 0));
        (top_shift + hi).max(gmax_f)
    }

    /// `dim Ext¹_A(M, N)_d`.
    pub fn ext1_dim(&self, n: &FramedModule, d: i64) -> usize {
        let d0 = self.hom_differential(0, n, d);
        let d1 = self.hom_differential(1, n, d);
        let ker1 = d1.cols() - d1.rank();
        ker1 - d0.rank()
    }

    /// `dim Hom_A(M, N)_d` as the kernel of the first Hom differential.
    pub fn hom_dim(&self, n: &FramedModule, d: i64) -> usize {
        let d0 = self.hom_differential(0, n, d);
        d0.cols() - d0.rank()
    }
}

fn unit(n: usize, k: usize) -> Vec<u64> {
    let mut v = vec![0; n];
    v[k] = 1;
    v
}

/// `w(M)` from the framing; zero for the zero module.
fn width(m: &FramedModule) -> i64 {
    let (lo, hi) = g_range(m.degrees());
    (hi - lo).max(0)
}

/// Default symmetric window `[-L, L]`, `L = α + w(M) + w(N) + 2`.
pub fn default_window(m: &FramedModule, n: &FramedModule) -> (i64, i64) {
    let l = m.algebra().alpha() + width(m) + width(n) + 2;
    (-l, l)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtWindow {
    pub window: (i64, i64),
    /// `(d, dim Ext¹(M, N)_d)` for every `d` in the window.
    pub dims: Vec<(i64, usize)>,
    pub truncation: i64,
    pub field: u64,
    pub resolution_shifts: Vec<Vec<i64>>,
    pub vanishes_at_edges: bool,
}

impl ExtWindow {
    pub fn dim_at(&self, d: i64) -> usize {
        self.dims
            .iter()
            .find(|(e, _)| *e == d)
            .map(|x| x.1)
            .unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.dims.iter().map(|x| x.1).sum()
    }

    pub fn support(&self) -> Vec<i64> {
        self.dims.iter().filter(|x| x.1 > 0).map(|x| x.0).collect()
    }
}

pub fn minimal_resolution(
    m: &FramedModule,
    length: usize,
    window: (i64, i64),
) -> Result<TruncatedResolution> {
    TruncatedResolution::compute(m, length, window)
}

/// `Ext¹` over a window using a resolution of `M` of length 2.
pub fn ext1_window(m: &FramedModule, n: &FramedModule, window: (i64, i64)) -> Result<ExtWindow> {
    let res = TruncatedResolution::compute(m, 2, window)?;
    ext1_window_with(&res, n, window)
}

pub fn ext1_window_with(
    res: &TruncatedResolution,
    n: &FramedModule,
    window: (i64, i64),
) -> Result<ExtWindow> {
    if !std::sync::Arc::ptr_eq(res.module.algebra(), n.algebra())
        && res.module.algebra().input() != n.algebra().input()
    {
        return Err(Error::Input("modules over different algebras".into()));
    }
    let (lo, hi) = window;
    if lo > hi {
        return Err(Error::Input(format!("empty window {lo}:{hi}")));
    }
    check_bound(res.needed_degree(hi), res.truncation)?;
    let dims: Vec<(i64, usize)> = (lo..=hi).map(|d| (d, res.ext1_dim(n, d))).collect();
    let vanishes_at_edges =
        dims.first().is_some_and(|x| x.1 == 0) && dims.last().is_some_and(|x| x.1 == 0);
    Ok(ExtWindow {
        window,
        dims,
        truncation: res.truncation,
        field: res.field().p(),
        resolution_shifts: res.steps.iter().map(|s| s.shifts.clone()).collect(),
        vanishes_at_edges,
    })
}

/// `dim Ext¹_A(M, N)_0`.
pub fn ext1_zero(m: &FramedModule, n: &FramedModule) -> Result<usize> {
    Ok(ext1_window(m, n, (0, 0))?.dim_at(0))
}

/// Basis of `Hom_A(M, N)_0` as degree-0 polynomial matrices commuting with
/// every generator action.
pub fn hom_zero(m: &FramedModule, n: &FramedModule) -> Vec<PolyMatrix> {
    let (space, basis) = hom_zero_coords(m, n);
    let f = m.field();
    basis.iter().map(|v| space.matrix_of(v, f)).collect()
}

pub fn hom_zero_coords(m: &FramedModule, n: &FramedModule) -> (HomSpace, Vec<Vec<u64>>) {
    let alg = m.algebra();
    let f = alg.field();
    let ring = alg.ring();
    let space = HomSpace::new(ring, m.degrees(), n.degrees(), 0);
    let targets: Vec<HomSpace> = (1..alg.num_generators())
        .map(|i| HomSpace::new(ring, m.degrees(), n.degrees(), alg.generator_degree(i)))
        .collect();
    let sys = space.linear_map(&targets, f, |phi| {
        (1..alg.num_generators())
            .map(|i| phi.mul(m.action(i), f).sub(&n.action(i).mul(phi, f), f))
            .collect()
    });
    let basis = sys.kernel_basis();
    (space, basis)
}

/// `M^∨ = Hom_R(M, R)`: framing degrees negated, actions transposed, basis
/// order reversed to keep degrees ascending.
pub fn dualize(m: &FramedModule) -> Result<FramedModule> {
    let alg = m.algebra();
    if !alg.is_commutative() {
        return Err(Error::Unsupported(
            "duality is commutative-only: for noncommutative A, Hom_R(M, R) is a right module"
                .into(),
        ));
    }
    let n = m.rank();
    let rev: Vec<usize> = (0..n).rev().collect();
    let degrees = rev.iter().map(|&k| -m.degrees()[k]).collect();
    let actions = m
        .non_unit_actions()
        .iter()
        .map(|a| a.transpose().select(&rev, &rev))
        .collect();
    FramedModule::new(alg.clone(), degrees, actions)
}

#[derive(Clone, Debug, Serialize)]
pub struct SwapCheck {
    pub window: (i64, i64),
    pub forward: Vec<(i64, usize)>,
    pub swapped: Vec<(i64, usize)>,
    pub equal: bool,
}

/// Compares `dim Ext¹(M, N)_d` with `dim Ext¹(N^∨, M^∨)_d` across a window.
pub fn ext1_swap_check(
    m: &FramedModule,
    n: &FramedModule,
    window: (i64, i64),
) -> Result<SwapCheck> {
    let fwd = ext1_window(m, n, window)?;
    let bwd = ext1_window(&dualize(n)?, &dualize(m)?, window)?;
    Ok(SwapCheck {
        window,
        equal: fwd.dims == bwd.dims,
        forward: fwd.dims,
        swapped: bwd.dims,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algdata::{Algebra, AlgebraInput};
    use crate::gradedcore::Monomial;
    use std::sync::Arc;

    fn nodal() -> Arc<Algebra> {
        Arc::new(Algebra::build(AlgebraInput::nodal(PrimeField::new(32003).unwrap()), 16).unwrap())
    }

    fn rank_one(a: &Arc<Algebra>, x: Poly) -> FramedModule {
        FramedModule::new(
            a.clone(),
            vec![0],
            vec![PolyMatrix::from_entries(1, 1, vec![x])],
        )
        .unwrap()
    }

    fn mx(a: &Arc<Algebra>) -> FramedModule {
        rank_one(a, Poly::term(1, Monomial(vec![1])))
    }

    fn my(a: &Arc<Algebra>) -> FramedModule {
        rank_one(a, Poly::zero())
    }

    #[test]
    fn mx_resolution_is_periodic() {
        let a = nodal();
        let res = minimal_resolution(&mx(&a), 4, (-2, 6)).unwrap();
        assert_eq!(res.length(), 5);
        for k in 0..5 {
            assert_eq!(res.shifts(k), &[k as i64]);
        }
        assert!(res.dd_zero && res.minimal && res.exact_in_window);
        assert_eq!(res.periodicity(), Periodicity::Periodic { degree: 2 });
    }

    #[test]
    fn free_module_resolution_stops() {
        let a = nodal();
        let res = minimal_resolution(&FramedModule::regular(&a), 4, (-2, 4)).unwrap();
        assert_eq!(res.length(), 1);
        assert_eq!(res.periodicity(), Periodicity::Free);
    }

    #[test]
    fn nodal_ext_windows() {
        let a = nodal();
        let w = ext1_window(&mx(&a), &my(&a), (-5, 5)).unwrap();
        assert_eq!(w.support(), vec![-1]);
        assert_eq!(w.dim_at(-1), 1);
        assert_eq!(ext1_window(&mx(&a), &mx(&a), (-5, 5)).unwrap().total(), 0);
        assert_eq!(
            ext1_window(&FramedModule::regular(&a), &mx(&a), (-5, 5))
                .unwrap()
                .total(),
            0
        );
    }

    #[test]
    fn shifted_ext_matches_degree_shift() {
        let a = nodal();
        let lhs = ext1_window(&my(&a).shift(-3), &mx(&a), (-6, 6)).unwrap();
        let rhs = ext1_window(&my(&a), &mx(&a), (-6, 6)).unwrap();
        for d in -3..=3 {
            assert_eq!(lhs.dim_at(d), rhs.dim_at(d + 3));
        }
    }

    #[test]
    fn hom_examples() {
        let a = nodal();
        assert!(hom_zero(&mx(&a), &my(&a)).is_empty());
        assert_eq!(hom_zero(&mx(&a), &mx(&a)).len(), 1);
        assert_eq!(hom_zero(&FramedModule::regular(&a), &mx(&a)).len(), 1);
        let res = minimal_resolution(&mx(&a), 2, (0, 0)).unwrap();
        assert_eq!(res.hom_dim(&my(&a), 0), 0);
        assert_eq!(res.hom_dim(&mx(&a), 0), 1);
    }

    #[test]
    fn duals() {
        let a = nodal();
        let d = dualize(&mx(&a)).unwrap();
        assert_eq!(d.degrees(), &[0]);
        let reg = FramedModule::regular(&a);
        let rd = dualize(&reg).unwrap();
        assert_eq!(rd.degrees(), &[-1, 0]);
        let s = ext1_swap_check(&mx(&a), &my(&a), (-4, 4)).unwrap();
        assert!(s.equal);
    }

    #[test]
    fn window_exhaustion_is_reported() {
        let a = Arc::new(a_small());
        let m = rank_one(&a, Poly::term(1, Monomial(vec![1]))).shift(-5);
        let err = minimal_resolution(&m, 2, (0, 0)).unwrap_err();
        assert!(matches!(err, Error::WindowExhausted { .. }));
    }

    fn a_small() -> Algebra {
        Algebra::build(AlgebraInput::nodal(PrimeField::new(32003).unwrap()), 2).unwrap()
    }
}
