//! Statistics of framed modules and the finiteness toolbox: degree-gap
//! splitting, simplicity and indecomposability tests, isomorphism, width
//! bounds, empirical Ext-degree constants and rigid classification.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algdata::{degree_matrix, Algebra, DegreeBasis, FramedModule};
use crate::error::{Error, Result};
use crate::exactla::upoly::{coprime_split, UPoly};
use crate::exactla::{Matrix, PrimeField, Subspace};
use crate::gradedcore::{GradedDims, HilbertSeries, Monomial, Poly, PolyMatrix};
use crate::homresolve::{default_window, ext1_window, ext1_zero, hom_zero, hom_zero_coords};
use crate::homspace::{degree_zero_inverse, is_degree_zero_invertible, HomSpace};
use crate::repscheme::EquationSystem;
use crate::tangent::four_term_report;

#[derive(Clone, Debug, Serialize)]
pub struct ModuleStats {
    pub g_min: i64,
    pub g_max: i64,
    pub w: i64,
    pub rank: usize,
    pub type_v: GradedDims,
    pub hilbert: String,
}

pub fn module_stats(m: &FramedModule) -> Result<ModuleStats> {
    let d = m.degrees();
    let (Some(&g_min), Some(&g_max)) = (d.first(), d.last()) else {
        return Err(Error::Input(
            "statistics are undefined on the zero module".into(),
        ));
    };
    let type_v = m.framing();
    let hilbert = HilbertSeries::of(&type_v, m.algebra().ring()).to_string();
    Ok(ModuleStats {
        g_min,
        g_max,
        w: g_max - g_min,
        rank: m.rank(),
        type_v,
        hilbert,
    })
}

#[derive(Clone, Debug)]
pub struct SplitResult {
    pub gap_position: i64,
    pub sub: FramedModule,
    pub quotient: FramedModule,
    pub a_stable: bool,
    pub ext_obstruction_dim: usize,
    /// `X` with `act_i = [[L_i, C_i], [0, H_i]]` and `L_i X - X H_i = -C_i`.
    pub splitting_map: Option<PolyMatrix>,
    /// `g = [[I, X], [0, I]]` conjugates every action to block diagonal form.
    pub intertwiner_verified: bool,
}

/// Looks for `i_0` with framing degrees on both sides and none in
/// `(i_0, i_0 + α]`; splits off `M' = Σ_{i ≤ i_0} R·M_i`.
pub fn find_gap_and_split(m: &FramedModule) -> Result<Option<SplitResult>> {
    let alg = m.algebra();
    let f = alg.field();
    let alpha = alg.alpha();
    let d = m.degrees();
    let Some(cut) = (1..d.len()).find(|&k| d[k] - d[k - 1] > alpha) else {
        return Ok(None);
    };
    let low: Vec<usize> = (0..cut).collect();
    let high: Vec<usize> = (cut..d.len()).collect();
    let a_stable = (1..alg.num_generators()).all(|i| m.action(i).select(&high, &low).is_zero());
    if !a_stable {
        return Err(Error::Computation(format!(
            "gap at {} but the low block is not A-stable",
            d[cut - 1]
        )));
    }
    let sub = m.restrict(&low)?;
    let quotient = m.restrict(&high)?;
    let ext_obstruction_dim = ext1_zero(&quotient, &sub)?;

    let ring = alg.ring();
    let space = HomSpace::new(ring, quotient.degrees(), sub.degrees(), 0);
    let gens: Vec<usize> = (1..alg.num_generators()).collect();
    let targets: Vec<HomSpace> = gens
        .iter()
        .map(|&i| {
            HomSpace::new(
                ring,
                quotient.degrees(),
                sub.degrees(),
                alg.generator_degree(i),
            )
        })
        .collect();
    let sys = space.linear_map(&targets, f, |x| {
        gens.iter()
            .map(|&i| {
                sub.action(i)
                    .mul(x, f)
                    .sub(&x.mul(quotient.action(i), f), f)
            })
            .collect()
    });
    let mut rhs = Vec::with_capacity(sys.rows());
    for (k, &i) in gens.iter().enumerate() {
        let c = m
            .action(i)
            .select(&low, &high)
            .scale_poly(&Poly::constant(f.neg(1), ring.num_vars()), f);
        rhs.extend(
            targets[k]
                .coords_of(&c)
                .expect("corner block is homogeneous"),
        );
    }
    let splitting_map = sys.solve(&rhs).map(|v| space.matrix_of(&v, f));
    let intertwiner_verified = match &splitting_map {
        Some(x) => {
            let n = m.rank();
            let nv = ring.num_vars();
            let mut g = PolyMatrix::identity(n, nv);
            let mut g_inv = PolyMatrix::identity(n, nv);
            for (a, &s) in low.iter().enumerate() {
                for (b, &r) in high.iter().enumerate() {
                    g.set(s, r, x.get(a, b).clone());
                    g_inv.set(s, r, x.get(a, b).neg(f));
                }
            }
            let block = sub.direct_sum(&quotient);
            g.mul(&g_inv, f) == PolyMatrix::identity(n, nv)
                && (1..alg.num_generators())
                    .all(|i| g_inv.mul(&m.action(i).mul(&g, f), f) == *block.action(i))
        }
        None => false,
    };
    Ok(Some(SplitResult {
        gap_position: d[cut - 1],
        sub,
        quotient,
        a_stable,
        ext_obstruction_dim,
        splitting_map,
        intertwiner_verified,
    }))
}

/// Flattened `r × r` matrices.
fn flat(m: &Matrix) -> Vec<u64> {
    m.data().to_vec()
}

fn unflat(f: PrimeField, r: usize, v: &[u64]) -> Matrix {
    Matrix::from_rows(f, r, r, v.to_vec())
}

/// Basis of the unital algebra generated by square matrices.
fn generated_algebra(f: PrimeField, r: usize, gens: &[Matrix]) -> (Subspace, Vec<Matrix>) {
    let mut span = Subspace::new(f, r * r);
    let id = Matrix::identity(f, r);
    span.insert(&flat(&id));
    let mut basis = vec![id];
    let mut k = 0;
    while k < basis.len() {
        for g in gens {
            let p = g.mul(&basis[k]);
            if span.insert(&flat(&p)) {
                basis.push(p);
            }
        }
        k += 1;
    }
    (span, basis)
}

fn trace(m: &Matrix) -> u64 {
    let f = m.field();
    (0..m.rows()).fold(0, |acc, i| f.add(acc, m.get(i, i)))
}

fn combo(f: PrimeField, basis: &[Matrix], c: &[u64]) -> Matrix {
    let r = basis[0].rows();
    let mut acc = vec![0; r * r];
    for (b, &ci) in basis.iter().zip(c) {
        crate::exactla::axpy(f, &mut acc, ci, b.data());
    }
    unflat(f, r, &acc)
}

/// Minimal polynomial of `x` by detecting the first dependency among powers.
fn min_poly_of<T, M, V>(one: T, x: &T, mul: M, vecf: V, f: PrimeField) -> UPoly
where
    M: Fn(&T, &T) -> T,
    V: Fn(&T) -> Vec<u64>,
{
    let mut powers: Vec<Vec<u64>> = Vec::new();
    let mut cur = one;
    loop {
        let v = vecf(&cur);
        if !powers.is_empty() {
            let a = Matrix::from_columns(f, v.len(), &powers);
            if let Some(c) = a.solve(&v) {
                // x^k = Σ c_i x^i
                let mut coeffs: Vec<u64> = c.iter().map(|&ci| f.neg(ci)).collect();
                coeffs.push(1);
                return UPoly::new(coeffs);
            }
        }
        powers.push(v);
        cur = mul(&cur, x);
    }
}

fn poly_at_matrix(p: &UPoly, x: &Matrix) -> Matrix {
    let f = x.field();
    let r = x.rows();
    let mut acc = Matrix::zeros(f, r, r);
    for &c in p.0.iter().rev() {
        acc = acc.mul(x);
        for i in 0..r {
            acc.set(i, i, f.add(acc.get(i, i), c));
        }
    }
    acc
}

#[derive(Clone, Debug)]
pub enum Simplicity {
    /// No proper nonzero MCM quotient. `absolutely` means the fibre stays
    /// simple over every extension of `F_p`.
    Simple {
        absolutely: bool,
    },
    NotSimple {
        quotient: FramedModule,
    },
    Inconclusive {
        reason: String,
    },
}

impl Simplicity {
    pub fn is_simple(&self) -> bool {
        matches!(self, Simplicity::Simple { .. })
    }

    pub fn label(&self) -> String {
        match self {
            Simplicity::Simple { absolutely: true } => "simple".into(),
            Simplicity::Simple { absolutely: false } => "simple over F_p (field caveat)".into(),
            Simplicity::NotSimple { .. } => "not simple".into(),
            Simplicity::Inconclusive { reason } => {
                format!("no quotient found (bounded search): {reason}")
            }
        }
    }
}

fn eval_actions(m: &FramedModule, point: &[u64]) -> Vec<Matrix> {
    let f = m.field();
    let r = m.rank();
    (1..m.algebra().num_generators())
        .map(|i| {
            let a = m.action(i);
            let mut out = Matrix::zeros(f, r, r);
            for s in 0..r {
                for c in 0..r {
                    out.set(s, c, a.get(s, c).eval(point, f));
                }
            }
            out
        })
        .collect()
}

/// Proper MCM quotients correspond to saturated graded submodules. Over
/// `R = k[t]` these are read off the fibre at `t = 1` together with the
/// `Z/w`-grading, so the test is complete; with more variables a random
/// fibre only certifies simplicity.
pub fn is_simple_search<G: Rng>(m: &FramedModule, rng: &mut G) -> Result<Simplicity> {
    let alg = m.algebra();
    let f = alg.field();
    let r = m.rank();
    if r == 0 {
        return Err(Error::Input("the zero module is not simple".into()));
    }
    if r == 1 {
        return Ok(Simplicity::Simple { absolutely: true });
    }
    let ring = alg.ring();
    if ring.num_vars() != 1 {
        let point: Vec<u64> = (0..ring.num_vars())
            .map(|_| rng.random_range(1..f.p()))
            .collect();
        let (_, basis) = generated_algebra(f, r, &eval_actions(m, &point));
        return Ok(if basis.len() == r * r {
            Simplicity::Simple { absolutely: true }
        } else {
            Simplicity::Inconclusive {
                reason: "random fibre is not absolutely simple".into(),
            }
        });
    }
    let w = ring.weights[0];
    let mut ops = eval_actions(m, &[1]);
    if w > 1 {
        for c in 0..w {
            let mut p = Matrix::zeros(f, r, r);
            for (k, &d) in m.degrees().iter().enumerate() {
                if d.rem_euclid(w) == c {
                    p.set(k, k, 1);
                }
            }
            ops.push(p);
        }
    }
    let (_, basis) = generated_algebra(f, r, &ops);
    if basis.len() == r * r {
        return Ok(Simplicity::Simple { absolutely: true });
    }
    if f.p() as usize <= r {
        return Err(Error::CharacteristicTooSmall { p: f.p(), dim: r });
    }
    let invariant = match find_invariant_subspace(f, r, &basis, rng)? {
        Found::Subspace(u) => u,
        Found::SimpleOverField { degree } => {
            return Ok(Simplicity::Simple {
                absolutely: degree == 1,
            })
        }
        Found::Nothing => {
            return Ok(Simplicity::Inconclusive {
                reason: "random search exhausted".into(),
            });
        }
    };
    Ok(Simplicity::NotSimple {
        quotient: quotient_by_fibre_subspace(m, &invariant)?,
    })
}

enum Found {
    Subspace(Subspace),
    SimpleOverField { degree: usize },
    Nothing,
}

fn spin(f: PrimeField, r: usize, basis: &[Matrix], v: &[u64]) -> Subspace {
    let mut s = Subspace::new(f, r);
    for b in basis {
        s.insert(&b.mul_vec(v));
    }
    s
}

fn find_invariant_subspace<G: Rng>(
    f: PrimeField,
    r: usize,
    basis: &[Matrix],
    rng: &mut G,
) -> Result<Found> {
    let n = basis.len();
    // Radical: {x ∈ B : tr(x y) = 0 for all y ∈ B}, nilpotent since p > r.
    let mut gram = Matrix::zeros(f, n, n);
    for a in 0..n {
        for b in 0..n {
            gram.set(a, b, trace(&basis[a].mul(&basis[b])));
        }
    }
    let rad = gram.kernel_basis();
    if !rad.is_empty() {
        let mut u = Subspace::new(f, r);
        for c in &rad {
            let j = combo(f, basis, c);
            for k in 0..r {
                u.insert(&j.column(k));
            }
        }
        return Ok(Found::Subspace(u));
    }
    // Semisimple: central idempotents split the fibre.
    let gens_for_center: Vec<Matrix> = basis.to_vec();
    let mut center_sys = Matrix::zeros(f, n * r * r, n);
    for (col, b) in basis.iter().enumerate() {
        for (k, g) in gens_for_center.iter().enumerate() {
            let c = b.mul(g);
            let d = g.mul(b);
            for (idx, (x, y)) in c.data().iter().zip(d.data()).enumerate() {
                center_sys.set(k * r * r + idx, col, f.sub(*x, *y));
            }
        }
    }
    let center = center_sys.kernel_basis();
    let zdim = center.len();
    let id = Matrix::identity(f, r);
    let mut field_degree = None;
    for _ in 0..32 {
        let c: Vec<u64> = center.iter().fold(vec![0; n], |mut acc, z| {
            crate::exactla::axpy(f, &mut acc, rng.random_range(0..f.p()), z);
            acc
        });
        let z = combo(f, basis, &c);
        let mp = min_poly_of(id.clone(), &z, |a, b| a.mul(b), flat, f);
        if let Some((g, h)) = coprime_split(&mp, f, rng) {
            let (_, u, _) = g.ext_gcd(&h, f);
            let e = poly_at_matrix(&u.mul(&g, f), &z);
            let mut s = Subspace::new(f, r);
            for k in 0..r {
                s.insert(&e.column(k));
            }
            return Ok(Found::Subspace(s));
        }
        if mp.degree() == Some(zdim) {
            field_degree = Some(zdim);
            break;
        }
    }
    let Some(e) = field_degree else {
        return Ok(Found::Nothing);
    };
    if e * n == r * r {
        return Ok(Found::SimpleOverField { degree: e });
    }
    // Isotypic fibre S^m with m > 1: spin vectors from kernels of zero divisors.
    for _ in 0..64 {
        let c: Vec<u64> = (0..n).map(|_| rng.random_range(0..f.p())).collect();
        let b = combo(f, basis, &c);
        let mp = min_poly_of(id.clone(), &b, |a, x| a.mul(x), flat, f);
        let v = match coprime_split(&mp, f, rng) {
            Some((g, _)) => match poly_at_matrix(&g, &b).kernel_basis().into_iter().next() {
                Some(v) => v,
                None => continue,
            },
            None => (0..r).map(|_| rng.random_range(0..f.p())).collect(),
        };
        let s = spin(f, r, basis, &v);
        if s.dim() > 0 && s.dim() < r {
            return Ok(Found::Subspace(s));
        }
    }
    Ok(Found::Nothing)
}

/// Builds `M/K` for the saturated submodule `K` whose fibre at `t = 1` is
/// `u`, as a validated framed module (one-variable `R` only).
fn quotient_by_fibre_subspace(m: &FramedModule, u: &Subspace) -> Result<FramedModule> {
    let alg = m.algebra();
    let f = alg.field();
    let ring = alg.ring();
    let w = ring.weights[0];
    let r = m.rank();
    let degs = m.degrees().to_vec();
    let (lo, hi) = (degs[0], degs[r - 1]);
    // K_d = preimage of u under evaluation at t = 1.
    let mut kernels: BTreeMap<i64, (DegreeBasis, Vec<Vec<u64>>)> = BTreeMap::new();
    let mut k_gens: Vec<(i64, Vec<Poly>)> = Vec::new();
    let mut q_idx: Vec<usize> = Vec::new();
    for d in lo..=hi {
        let b = m.degree_basis(d);
        let mut eval = Matrix::zeros(f, r, b.len());
        for (k, (j, _)) in b.entries.iter().enumerate() {
            let mut e = vec![0; r];
            e[*j] = 1;
            for (row, x) in u.reduce(&e).into_iter().enumerate() {
                eval.set(row, k, x);
            }
        }
        let kd = eval.kernel_basis();
        let mut span = Subspace::new(f, b.len());
        if let Some((pb, pk)) = kernels.get(&(d - w)) {
            let tm = Monomial::var(1, 0, 1);
            for x in pk {
                span.insert(&m.mul_monomial(&tm, pb, &b, x));
            }
        }
        // Leading parts in (M/tM)_d decide the complementary framing vectors.
        let top: Vec<usize> = (0..r).filter(|&j| degs[j] == d).collect();
        let mut lead = Subspace::new(f, top.len());
        for x in &kd {
            if span.insert(x) {
                k_gens.push((d, b.poly_vector(x, r, f)));
                let lv: Vec<u64> = top
                    .iter()
                    .map(|&j| b.position(j, &Monomial::one(1)).map_or(0, |p| x[p]))
                    .collect();
                lead.insert(&lv);
            }
        }
        for (k, &j) in top.iter().enumerate() {
            let mut e = vec![0; top.len()];
            e[k] = 1;
            if lead.insert(&e) {
                q_idx.push(j);
            }
        }
        kernels.insert(d, (b, kd));
    }
    if k_gens.len() + q_idx.len() != r || q_idx.is_empty() || k_gens.is_empty() {
        return Err(Error::Computation(
            "saturated submodule does not split the framing".into(),
        ));
    }
    let nk = k_gens.len();
    let mut g = PolyMatrix::zeros(r, r);
    let mut new_degs = Vec::with_capacity(r);
    for (c, (d, v)) in k_gens.iter().enumerate() {
        for (row, p) in v.iter().enumerate() {
            g.set(row, c, p.clone());
        }
        new_degs.push(*d);
    }
    for (c, &j) in q_idx.iter().enumerate() {
        g.set(j, nk + c, Poly::constant(1, 1));
        new_degs.push(degs[j]);
    }
    let g_inv = degree_zero_inverse(ring, &g, &new_degs, &degs, f)
        .ok_or_else(|| Error::Computation("adapted basis is not invertible".into()))?;
    let kset: Vec<usize> = (0..nk).collect();
    let qset: Vec<usize> = (nk..r).collect();
    let mut q_actions = Vec::new();
    for i in 1..alg.num_generators() {
        let a = g_inv.mul(&m.action(i).mul(&g, f), f);
        if !a.select(&qset, &kset).is_zero() {
            return Err(Error::Computation(
                "submodule from the fibre is not A-stable".into(),
            ));
        }
        q_actions.push(a.select(&qset, &qset));
    }
    FramedModule::new(alg.clone(), new_degs[nk..].to_vec(), q_actions)
}

#[derive(Clone, Debug)]
pub enum Indecomposability {
    Indecomposable {
        end_dim: usize,
        radical_dim: usize,
        /// `E/rad E` is a field of this degree over `F_p`; above 1 the module
        /// may decompose over an extension.
        residue_degree: usize,
    },
    Decomposable {
        idempotent: PolyMatrix,
    },
}

impl Indecomposability {
    pub fn is_indecomposable(&self) -> bool {
        matches!(self, Indecomposability::Indecomposable { .. })
    }

    pub fn label(&self) -> String {
        match self {
            Indecomposability::Indecomposable {
                residue_degree: 1, ..
            } => "indecomposable".into(),
            Indecomposability::Indecomposable { .. } => {
                "indecomposable over F_p (possibly decomposable over extension)".into()
            }
            Indecomposability::Decomposable { .. } => "decomposable".into(),
        }
    }
}

/// The algebra `E = End_A(M)_0` in a basis, with left-multiplication matrices.
struct EndAlgebra {
    space: HomSpace,
    basis: Vec<PolyMatrix>,
    coords: Matrix,
    nvars: usize,
}

impl EndAlgebra {
    fn new(m: &FramedModule) -> Self {
        let f = m.field();
        let (space, vecs) = hom_zero_coords(m, m);
        let basis = vecs.iter().map(|v| space.matrix_of(v, f)).collect();
        let coords = Matrix::from_columns(f, space.dim(), &vecs);
        EndAlgebra {
            space,
            basis,
            coords,
            nvars: m.algebra().nvars(),
        }
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn coords_of(&self, x: &PolyMatrix) -> Vec<u64> {
        let v = self.space.coords_of(x).expect("degree-0 endomorphism");
        self.coords.solve(&v).expect("product stays in End_A")
    }

    fn element(&self, c: &[u64], f: PrimeField) -> PolyMatrix {
        let n = self.basis[0].rows();
        let mut acc = PolyMatrix::zeros(n, n);
        for (b, &ci) in self.basis.iter().zip(c) {
            if ci != 0 {
                acc = acc.add(&b.scale_poly(&Poly::constant(ci, self.nvars), f), f);
            }
        }
        acc
    }
}

fn poly_at(p: &UPoly, x: &PolyMatrix, nvars: usize, f: PrimeField) -> PolyMatrix {
    let n = x.rows();
    let mut acc = PolyMatrix::zeros(n, n);
    for &c in p.0.iter().rev() {
        acc = acc.mul(x, f).add(
            &PolyMatrix::identity(n, nvars).scale_poly(&Poly::constant(c, nvars), f),
            f,
        );
    }
    acc
}

pub fn is_indecomposable<G: Rng>(m: &FramedModule, rng: &mut G) -> Result<Indecomposability> {
    let f = m.field();
    let nv = m.algebra().nvars();
    if m.rank() == 0 {
        return Err(Error::Input(
            "the zero module has no indecomposability verdict".into(),
        ));
    }
    let e = EndAlgebra::new(m);
    let n = e.dim();
    if f.p() as usize <= n {
        return Err(Error::CharacteristicTooSmall { p: f.p(), dim: n });
    }
    // Left regular representation.
    let lmat: Vec<Matrix> = e
        .basis
        .iter()
        .map(|x| {
            let cols: Vec<Vec<u64>> = e.basis.iter().map(|y| e.coords_of(&x.mul(y, f))).collect();
            Matrix::from_columns(f, n, &cols)
        })
        .collect();
    let mut gram = Matrix::zeros(f, n, n);
    for a in 0..n {
        for b in 0..n {
            gram.set(a, b, trace(&lmat[a].mul(&lmat[b])));
        }
    }
    let radical_dim = gram.kernel_basis().len();
    let s = n - radical_dim;
    if s == 1 {
        return Ok(Indecomposability::Indecomposable {
            end_dim: n,
            radical_dim,
            residue_degree: 1,
        });
    }
    let rad = Subspace::spanned_by(f, n, &gram.kernel_basis());
    let commutative_mod_rad = (0..n).all(|a| {
        (0..n).all(|b| {
            let ab = lmat[a].mul_vec(&unit_vec(n, b));
            let ba = lmat[b].mul_vec(&unit_vec(n, a));
            let diff: Vec<u64> = ab.iter().zip(&ba).map(|(x, y)| f.sub(*x, *y)).collect();
            rad.contains(&diff)
        })
    });
    let id_coords = e.coords_of(&PolyMatrix::identity(m.rank(), nv));
    for _ in 0..64 {
        let c: Vec<u64> = (0..n).map(|_| rng.random_range(0..f.p())).collect();
        let x = e.element(&c, f);
        let mp = min_poly_of(
            id_coords.clone(),
            &c,
            |a, b| {
                let xa = e.element(a, f);
                let xb = e.element(b, f);
                e.coords_of(&xa.mul(&xb, f))
            },
            |v| v.clone(),
            f,
        );
        if let Some((g, h)) = coprime_split(&mp, f, rng) {
            let (_, u, _) = g.ext_gcd(&h, f);
            let idem = poly_at(&u.mul(&g, f), &x, nv, f);
            return Ok(Indecomposability::Decomposable { idempotent: idem });
        }
        if commutative_mod_rad {
            // Squarefree part of the minimal polynomial is irreducible; if its
            // degree is dim E/rad the residue algebra is a field.
            let sq = mp.divrem(&mp.gcd(&mp.derivative(f), f), f).0;
            if sq.degree() == Some(s) {
                return Ok(Indecomposability::Indecomposable {
                    end_dim: n,
                    radical_dim,
                    residue_degree: s,
                });
            }
        }
    }
    Err(Error::Computation(
        "no idempotent found in End_A(M)_0 after 64 random elements".into(),
    ))
}

fn unit_vec(n: usize, k: usize) -> Vec<u64> {
    let mut v = vec![0; n];
    v[k] = 1;
    v
}

/// `M = eM ⊕ (1-e)M` for an idempotent `e ∈ End_A(M)_0`.
pub fn split_by_idempotent(
    m: &FramedModule,
    e: &PolyMatrix,
) -> Result<(FramedModule, FramedModule)> {
    let alg = m.algebra();
    let f = alg.field();
    let ring = alg.ring();
    let nv = ring.num_vars();
    let r = m.rank();
    let id = PolyMatrix::identity(r, nv);
    let comp = id.sub(e, f);
    let degs = m.degrees();
    let (lo, hi) = (degs[0], degs[r - 1]);
    let gens_of = |p: &PolyMatrix| -> Vec<(i64, Vec<Poly>)> {
        let mut images: BTreeMap<i64, (DegreeBasis, Vec<Vec<u64>>)> = BTreeMap::new();
        let mut out = Vec::new();
        for d in lo..=hi {
            let b = m.degree_basis(d);
            let img = degree_matrix(p, &b, &b, f).image_basis();
            let mut span = Subspace::new(f, b.len());
            for v in 0..nv {
                if let Some((pb, pi)) = images.get(&(d - ring.weights[v])) {
                    let mono = Monomial::var(nv, v, 1);
                    for x in pi {
                        span.insert(&m.mul_monomial(&mono, pb, &b, x));
                    }
                }
            }
            for x in &img {
                if span.insert(x) {
                    out.push((d, b.poly_vector(x, r, f)));
                }
            }
            images.insert(d, (b, img));
        }
        out
    };
    let g1 = gens_of(e);
    let g2 = gens_of(&comp);
    if g1.len() + g2.len() != r || g1.is_empty() || g2.is_empty() {
        return Err(Error::Computation(
            "idempotent does not split the framing".into(),
        ));
    }
    let mut g = PolyMatrix::zeros(r, r);
    let mut new_degs = Vec::with_capacity(r);
    for (c, (d, v)) in g1.iter().chain(&g2).enumerate() {
        for (row, p) in v.iter().enumerate() {
            g.set(row, c, p.clone());
        }
        new_degs.push(*d);
    }
    let g_inv = degree_zero_inverse(ring, &g, &new_degs, degs, f)
        .ok_or_else(|| Error::Computation("summand bases are not complementary".into()))?;
    let a: Vec<usize> = (0..g1.len()).collect();
    let b: Vec<usize> = (g1.len()..r).collect();
    let mut act_a = Vec::new();
    let mut act_b = Vec::new();
    for i in 1..alg.num_generators() {
        let c = g_inv.mul(&m.action(i).mul(&g, f), f);
        if !c.select(&a, &b).is_zero() || !c.select(&b, &a).is_zero() {
            return Err(Error::Computation(
                "idempotent image is not a summand".into(),
            ));
        }
        act_a.push(c.select(&a, &a));
        act_b.push(c.select(&b, &b));
    }
    Ok((
        FramedModule::new(alg.clone(), new_degs[..g1.len()].to_vec(), act_a)?,
        FramedModule::new(alg.clone(), new_degs[g1.len()..].to_vec(), act_b)?,
    ))
}

/// Indecomposable summands, by repeated idempotent splitting.
pub fn indecomposable_summands<G: Rng>(m: &FramedModule, rng: &mut G) -> Result<Vec<FramedModule>> {
    let mut out = Vec::new();
    let mut todo = vec![m.clone()];
    while let Some(x) = todo.pop() {
        match is_indecomposable(&x, rng)? {
            Indecomposability::Indecomposable { .. } => out.push(x),
            Indecomposability::Decomposable { idempotent } => {
                let (a, b) = split_by_idempotent(&x, &idempotent)?;
                todo.push(b);
                todo.push(a);
            }
        }
    }
    Ok(out)
}

/// An invertible degree-0 `A`-linear map `M → N`, if one exists. A random
/// combination of a `Hom_A(M, N)_0` basis is invertible with probability at
/// least `1 - r/p` when any is; eight draws are made.
pub fn find_isomorphism<G: Rng>(
    m: &FramedModule,
    n: &FramedModule,
    rng: &mut G,
) -> Option<PolyMatrix> {
    if m.degrees() != n.degrees() {
        return None;
    }
    let f = m.field();
    let basis = hom_zero(m, n);
    if basis.is_empty() {
        return None;
    }
    let nv = m.algebra().nvars();
    for _ in 0..8 {
        let mut h = PolyMatrix::zeros(n.rank(), m.rank());
        for b in &basis {
            h = h.add(
                &b.scale_poly(&Poly::constant(rng.random_range(0..f.p()), nv), f),
                f,
            );
        }
        if is_degree_zero_invertible(&h, m.degrees(), n.degrees(), f) {
            return Some(h);
        }
    }
    None
}

pub fn delta(r: usize, alpha: i64) -> i64 {
    r as i64 * alpha + 1
}

#[derive(Clone, Debug, Serialize)]
pub struct KarroumEntry {
    pub name: String,
    pub rank: usize,
    pub width: i64,
    pub delta: i64,
    pub verdict: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KarroumReport {
    pub alpha: i64,
    pub entries: Vec<KarroumEntry>,
    pub simple_count: usize,
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

/// Checks `w(M) < r(M)·α + 1` on every module certified simple.
pub fn verify_karroum<G: Rng>(
    modules: &[(String, FramedModule)],
    rng: &mut G,
) -> Result<KarroumReport> {
    let mut entries = Vec::new();
    let mut violations = Vec::new();
    let mut warnings = Vec::new();
    let mut alpha = 0;
    for (name, m) in modules {
        let alg = m.algebra();
        alpha = alg.alpha();
        if !alg.is_commutative() && warnings.is_empty() {
            warnings.push("commutative-only theorem applied to a noncommutative algebra (tested, not assumed)".into());
        }
        let st = module_stats(m)?;
        let verdict = is_simple_search(m, rng)?;
        let dl = delta(st.rank, alg.alpha());
        let ok = !verdict.is_simple() || st.w < dl;
        if !ok {
            violations.push(format!("{name}: w = {} ≥ δ_{} = {dl}", st.w, st.rank));
        }
        entries.push(KarroumEntry {
            name: name.clone(),
            rank: st.rank,
            width: st.w,
            delta: dl,
            verdict: verdict.label(),
            ok,
        });
    }
    let simple_count = entries
        .iter()
        .filter(|e| e.verdict.starts_with("simple"))
        .count();
    Ok(KarroumReport {
        alpha,
        entries,
        simple_count,
        violations,
        warnings,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BetaEntry {
    pub r: usize,
    pub s: usize,
    pub value: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsLedger {
    pub label: &'static str,
    pub alpha: i64,
    pub delta: BTreeMap<usize, i64>,
    pub beta_hat: Vec<BetaEntry>,
    pub alpha_r_hat: BTreeMap<usize, i64>,
    pub pairs_examined: usize,
    pub warnings: Vec<String>,
}

/// Observed offsets `g_min(M) + d - g_max(N)` over nonzero `Ext¹(M, N)_d`,
/// tagged with `(r(M), r(N))`.
fn ext_offsets(modules: &[FramedModule]) -> Result<Vec<(usize, usize, Option<i64>)>> {
    let mut out = Vec::new();
    for m in modules {
        for n in modules {
            let w = ext1_window(m, n, default_window(m, n))?;
            let (gm, gn) = (m.degrees()[0], *n.degrees().last().expect("nonzero"));
            let best = w.support().into_iter().map(|d| gm + d - gn).max();
            out.push((m.rank(), n.rank(), best));
        }
    }
    Ok(out)
}

/// Empirical lower bound for the constant `β_{r,s}`: running maximum over
/// all pairs of ranks at most `(r, s)`, floored at 0.
pub fn estimate_beta(modules: &[FramedModule], r: usize, s: usize) -> Result<i64> {
    let offs = ext_offsets(modules)?;
    Ok(beta_from(&offs, r, s))
}

fn beta_from(offs: &[(usize, usize, Option<i64>)], r: usize, s: usize) -> i64 {
    offs.iter()
        .filter(|(a, b, _)| *a <= r && *b <= s)
        .filter_map(|x| x.2)
        .fold(0, i64::max)
}

pub fn bounds_ledger(
    algebra: &Algebra,
    modules: &[FramedModule],
    max_rank: usize,
) -> Result<BoundsLedger> {
    let alpha = algebra.alpha();
    let mut warnings = Vec::new();
    if !algebra.input().isolated_singularity {
        warnings.push("isolated-singularity flag not set: Ext supports may be unbounded".into());
    }
    let offs = ext_offsets(modules)?;
    let mut beta_hat = Vec::new();
    let mut delta_t = BTreeMap::new();
    let mut alpha_r = BTreeMap::new();
    for r in 1..=max_rank {
        for s in 1..=max_rank {
            beta_hat.push(BetaEntry {
                r,
                s,
                value: beta_from(&offs, r, s),
            });
        }
        delta_t.insert(r, delta(r, alpha));
        let m = (1..=r)
            .map(|k| beta_from(&offs, k, k))
            .fold(alpha, i64::max);
        alpha_r.insert(r, r as i64 * m + 1);
    }
    Ok(BoundsLedger {
        label: "ESTIMATE",
        alpha,
        delta: delta_t,
        beta_hat,
        alpha_r_hat: alpha_r,
        pairs_examined: offs.len(),
        warnings,
    })
}

#[derive(Clone, Debug)]
pub struct ClassRepresentative {
    pub module: FramedModule,
    pub stats: ModuleStats,
    pub dims: (usize, usize, usize, usize),
    pub rigid_degree_zero: bool,
    pub rigid_full_window: bool,
    pub summands: Vec<FramedModule>,
    pub indecomposable: bool,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub framing: GradedDims,
    pub points_examined: usize,
    pub rigid_points: usize,
    pub classes: Vec<ClassRepresentative>,
    pub seed: u64,
}

/// Keeps the degree-0 rigid points, merges isomorphic ones and reports each
/// class with its indecomposable summands. Representatives are the first
/// point of each class in input order.
pub fn classify_rigid(
    algebra: &Arc<Algebra>,
    framing: &GradedDims,
    points: impl IntoIterator<Item = FramedModule>,
    seed: u64,
) -> Result<Classification> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let system = EquationSystem::generate(algebra, framing);
    let degrees = framing.degrees();
    let mut classes: Vec<ClassRepresentative> = Vec::new();
    let mut examined = 0;
    let mut rigid = 0;
    for p in points {
        examined += 1;
        if p.degrees() != degrees.as_slice() {
            return Err(Error::FramingMismatch(format!(
                "point framing {:?} is not {:?}",
                p.degrees(),
                degrees
            )));
        }
        if !system.evaluate_point(&p)?.on_variety {
            continue;
        }
        let rep = four_term_report(&system, &p, false)?;
        if !rep.rigid_degree_zero {
            continue;
        }
        rigid += 1;
        if classes
            .iter()
            .any(|c| find_isomorphism(&c.module, &p, &mut rng).is_some())
        {
            continue;
        }
        let full = ext1_window(&p, &p, default_window(&p, &p))?.total() == 0;
        let summands = indecomposable_summands(&p, &mut rng)?;
        classes.push(ClassRepresentative {
            stats: module_stats(&p)?,
            dims: (
                rep.dim_end_a_0,
                rep.dim_end_r_0,
                rep.dim_tangent,
                rep.dim_ext1_0_via_sequence,
            ),
            rigid_degree_zero: true,
            rigid_full_window: full,
            indecomposable: summands.len() == 1,
            summands,
            module: p,
        });
    }
    Ok(Classification {
        framing: framing.clone(),
        points_examined: examined,
        rigid_points: rigid,
        classes,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algdata::AlgebraInput;

    fn nodal() -> Arc<Algebra> {
        Arc::new(Algebra::build(AlgebraInput::nodal(PrimeField::new(32003).unwrap()), 16).unwrap())
    }

    fn t() -> Poly {
        Poly::term(1, Monomial(vec![1]))
    }

    fn rank_one(a: &Arc<Algebra>, x: Poly) -> FramedModule {
        FramedModule::new(
            a.clone(),
            vec![0],
            vec![PolyMatrix::from_entries(1, 1, vec![x])],
        )
        .unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(5)
    }

    #[test]
    fn stats_examples() {
        let a = nodal();
        let s = module_stats(&FramedModule::regular(&a)).unwrap();
        assert_eq!((s.g_min, s.g_max, s.w, s.rank), (0, 1, 1, 2));
        let mx = rank_one(&a, t());
        let s = module_stats(&mx.shift(-3)).unwrap();
        assert_eq!((s.g_min, s.g_max, s.w), (3, 3, 0));
    }

    #[test]
    fn gap_split_example() {
        let a = nodal();
        let m = rank_one(&a, t()).direct_sum(&rank_one(&a, Poly::zero()).shift(-3));
        let s = find_gap_and_split(&m).unwrap().unwrap();
        assert_eq!(s.gap_position, 0);
        assert_eq!(s.ext_obstruction_dim, 0);
        assert!(s.a_stable && s.intertwiner_verified);
        let mxy = rank_one(&a, t()).direct_sum(&rank_one(&a, Poly::zero()));
        assert!(find_gap_and_split(&mxy).unwrap().is_none());
        assert!(find_gap_and_split(&FramedModule::regular(&a))
            .unwrap()
            .is_none());
    }

    #[test]
    fn simplicity_examples() {
        let a = nodal();
        let mut g = rng();
        let mx = rank_one(&a, t());
        assert!(is_simple_search(&mx, &mut g).unwrap().is_simple());
        match is_simple_search(&FramedModule::regular(&a), &mut g).unwrap() {
            Simplicity::NotSimple { quotient } => assert_eq!(quotient.rank(), 1),
            v => panic!("A is not simple, got {}", v.label()),
        }
        assert!(!is_simple_search(&mx.direct_sum(&mx), &mut g)
            .unwrap()
            .is_simple());
    }

    #[test]
    fn indecomposability_examples() {
        let a = nodal();
        let mut g = rng();
        let mx = rank_one(&a, t());
        let my = rank_one(&a, Poly::zero());
        assert!(is_indecomposable(&mx, &mut g).unwrap().is_indecomposable());
        assert!(!is_indecomposable(&mx.direct_sum(&my), &mut g)
            .unwrap()
            .is_indecomposable());
        assert!(!is_indecomposable(&mx.direct_sum(&mx), &mut g)
            .unwrap()
            .is_indecomposable());
        assert!(is_indecomposable(&FramedModule::regular(&a), &mut g)
            .unwrap()
            .is_indecomposable());
        let parts = indecomposable_summands(&mx.direct_sum(&my.shift(-2)), &mut g).unwrap();
        assert_eq!(parts.len(), 2);
    }

    #[test]
    fn nodal_beta_and_simple_widths() {
        let a = nodal();
        let mx = rank_one(&a, t());
        let my = rank_one(&a, Poly::zero());
        let mods = vec![mx.clone(), my.clone(), mx.shift(-2), my.shift(1)];
        assert_eq!(estimate_beta(&mods, 1, 1).unwrap(), 0);
        let rep = verify_karroum(&[("MX".into(), mx), ("MY".into(), my)], &mut rng()).unwrap();
        assert!(rep.violations.is_empty());
        assert_eq!(rep.simple_count, 2);
    }
}
