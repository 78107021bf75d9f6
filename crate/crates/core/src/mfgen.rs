//! Points of the representation scheme for curve hypersurfaces
//! `A = k[x,y]/(f)` from graded matrix factorizations, and small ADE catalogs.
//!
//! The hypersurface is rewritten in coordinates `(t, w)` with `t, w` linear
//! in `x, y` and `f` monic in `w` of degree `e`; then `R = k[t]` and `A` is
//! free over `R` on `1, w, …, w^{e-1}`.

use std::sync::Arc;

use rand::Rng;

use crate::algdata::{Algebra, AlgebraInput, DegreeBasis, FramedModule};
use crate::error::{Error, Result};
use crate::exactla::{Matrix, PrimeField, Subspace};
use crate::gradedcore::{GradedDims, Monomial, Poly, PolyMatrix, WeightedPolyRing};
use crate::homspace::{degree_zero_inverse, is_degree_zero_invertible, HomSpace};
use crate::mcmtools::{find_isomorphism, is_indecomposable};

fn xy(c: u64, i: u32, j: u32) -> Poly {
    Poly::term(c, Monomial(vec![i, j]))
}

/// `k[x,y]/(f)` with a choice of Noether normalization.
#[derive(Clone, Debug)]
pub struct Hypersurface {
    pub name: String,
    pub field: PrimeField,
    /// Weights of `x, y`.
    pub weights: [i64; 2],
    pub f: Poly,
    pub t: Poly,
    pub w: Poly,
    /// Ambient ring in `(x, y)`.
    ambient: WeightedPolyRing,
    /// The same ring in the coordinates `(t, w)`.
    tw_ring: WeightedPolyRing,
    /// `x, y` written in `(t, w)`.
    to_tw: [Poly; 2],
    /// `f` in `(t, w)`, made monic in `w`.
    g: Poly,
    e: usize,
}

impl Hypersurface {
    pub fn new(
        name: &str,
        field: PrimeField,
        weights: [i64; 2],
        f: Poly,
        t: Poly,
        w: Poly,
    ) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::MatrixFactorization(
                "degenerate potential f = 0".into(),
            ));
        }
        let ambient = WeightedPolyRing::new(weights.to_vec())?;
        let deg_f = f
            .homogeneous_degree(&ambient)
            .ok_or_else(|| Error::Input(format!("{name}: potential is not homogeneous")))?;
        let lin = |p: &Poly| -> Result<(i64, [u64; 2])> {
            let d = p
                .homogeneous_degree(&ambient)
                .ok_or_else(|| Error::Input("t, w must be homogeneous".into()))?;
            let mut c = [0; 2];
            for (m, v) in p.terms() {
                match m.0.as_slice() {
                    [1, 0] => c[0] = v,
                    [0, 1] => c[1] = v,
                    _ => return Err(Error::Input("t, w must be linear in x, y".into())),
                }
            }
            Ok((d, c))
        };
        let (dt, ct) = lin(&t)?;
        let (dw, cw) = lin(&w)?;
        let m = Matrix::from_rows(field, 2, 2, vec![ct[0], ct[1], cw[0], cw[1]]);
        let inv = m
            .inverse()
            .ok_or_else(|| Error::Input(format!("{name}: t, w are not coordinates")))?;
        let tw_ring = WeightedPolyRing::new(vec![dt, dw])?;
        let tv = Poly::term(1, Monomial(vec![1, 0]));
        let wv = Poly::term(1, Monomial(vec![0, 1]));
        let to_tw = [0, 1].map(|r| {
            tv.scale(inv.get(r, 0), field)
                .add(&wv.scale(inv.get(r, 1), field), field)
        });
        for (r, p) in to_tw.iter().enumerate() {
            if p.homogeneous_degree(&tw_ring) != Some(weights[r]) {
                return Err(Error::Input(format!(
                    "{name}: change of coordinates mixes weights"
                )));
            }
        }
        let mut hs = Hypersurface {
            name: name.into(),
            field,
            weights,
            f,
            t,
            w,
            ambient,
            tw_ring,
            to_tw,
            g: Poly::zero(),
            e: 0,
        };
        let g = hs.substitute(&hs.f);
        let e = g.terms().map(|(m, _)| m.0[1]).max().unwrap_or(0) as usize;
        let lead = g.coeff(&Monomial(vec![0, e as u32]));
        if e == 0 || lead == 0 {
            return Err(Error::Input(format!("{name}: potential is not monic in w")));
        }
        hs.g = g.scale(field.inv(lead), field);
        hs.e = e;
        debug_assert_eq!(hs.g.homogeneous_degree(&hs.tw_ring), Some(deg_f));
        Ok(hs)
    }

    /// `xy` with `t = x + y`, `w = x`.
    pub fn nodal(field: PrimeField) -> Result<Self> {
        Self::new(
            "NODAL",
            field,
            [1, 1],
            xy(1, 1, 1),
            xy(1, 1, 0).add(&xy(1, 0, 1), field),
            xy(1, 1, 0),
        )
    }

    /// `y² + x^{n+1}`, `t = x`, `w = y`.
    pub fn a_n(field: PrimeField, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("A_n needs n ≥ 1".into()));
        }
        check_char(field, 3)?;
        let weights = if n % 2 == 1 {
            [1, (n as i64 + 1) / 2]
        } else {
            [2, n as i64 + 1]
        };
        let f = xy(1, 0, 2).add(&xy(1, n + 1, 0), field);
        Self::new(
            &format!("A_{n}"),
            field,
            weights,
            f,
            xy(1, 1, 0),
            xy(1, 0, 1),
        )
    }

    /// `x²y + y^{n-1}`, `t = x`, `w = y`.
    pub fn d_n(field: PrimeField, n: u32) -> Result<Self> {
        if n < 4 {
            return Err(Error::Input("D_n needs n ≥ 4".into()));
        }
        check_char(field, 3)?;
        let (wx, wy) = (n as i64 - 2, 2);
        let g = gcd(wx, wy);
        let f = xy(1, 2, 1).add(&xy(1, 0, n - 1), field);
        Self::new(
            &format!("D_{n}"),
            field,
            [wx / g, wy / g],
            f,
            xy(1, 1, 0),
            xy(1, 0, 1),
        )
    }

    /// `E6: x³ + y⁴`, `E7: x³ + xy³`, `E8: x³ + y⁵`; `t = y`, `w = x`.
    pub fn e_n(field: PrimeField, n: u32) -> Result<Self> {
        check_char(field, 7)?;
        let (weights, f) = match n {
            6 => ([4, 3], xy(1, 3, 0).add(&xy(1, 0, 4), field)),
            7 => ([3, 2], xy(1, 3, 0).add(&xy(1, 1, 3), field)),
            8 => ([5, 3], xy(1, 3, 0).add(&xy(1, 0, 5), field)),
            _ => return Err(Error::Unsupported(format!("E_{n} is not an ADE curve"))),
        };
        Self::new(
            &format!("E{n}"),
            field,
            weights,
            f,
            xy(1, 0, 1),
            xy(1, 1, 0),
        )
    }

    pub fn ade(name: &str, n: u32, field: PrimeField) -> Result<Self> {
        match name.to_ascii_uppercase().trim_end_matches('_') {
            "NODAL" => Self::nodal(field),
            "A" => Self::a_n(field, n),
            "D" => Self::d_n(field, n),
            "E" => Self::e_n(field, n),
            "E6" => Self::e_n(field, 6),
            "E7" => Self::e_n(field, 7),
            "E8" => Self::e_n(field, 8),
            other => Err(Error::Unsupported(format!("unknown ADE family {other}"))),
        }
    }

    pub fn ambient(&self) -> &WeightedPolyRing {
        &self.ambient
    }

    pub fn degree_f(&self) -> i64 {
        self.f
            .homogeneous_degree(&self.ambient)
            .expect("checked homogeneous")
    }

    /// Rank of `A` over `R`.
    pub fn rank(&self) -> usize {
        self.e
    }

    /// Rewrites a polynomial in `x, y` in the coordinates `t, w`.
    pub fn substitute(&self, p: &Poly) -> Poly {
        let f = self.field;
        let mut out = Poly::zero();
        for (m, c) in p.terms() {
            let term = self.to_tw[0]
                .pow(m.0[0], 2, f)
                .mul(&self.to_tw[1].pow(m.0[1], 2, f), f)
                .scale(c, f);
            out.add_assign(&term, f);
        }
        out
    }

    /// `w^k` reduced to coordinates over `1, w, …, w^{e-1}`, entries in `k[t]`.
    fn w_powers(&self, up_to: usize) -> Vec<Vec<Poly>> {
        let f = self.field;
        let e = self.e;
        // w^e = -Σ_{k<e} g_k(t) w^k
        let mut tail = vec![Poly::zero(); e];
        for (m, c) in self.g.terms() {
            let k = m.0[1] as usize;
            if k < e {
                tail[k].add_term(Monomial(vec![m.0[0]]), f.neg(c), f);
            }
        }
        let mut cur = vec![Poly::zero(); e];
        cur[0] = Poly::constant(1, 1);
        let mut out = vec![cur.clone()];
        for _ in 0..up_to {
            let top = cur[e - 1].clone();
            let mut next = vec![Poly::zero(); e];
            for k in 1..e {
                next[k] = cur[k - 1].clone();
            }
            for k in 0..e {
                next[k].add_assign(&tail[k].mul(&top, f), f);
            }
            out.push(next.clone());
            cur = next;
        }
        out
    }

    pub fn algebra_input(&self) -> AlgebraInput {
        let e = self.e;
        let dw = self.tw_ring.weights[1];
        let powers = self.w_powers(2 * e);
        let wname = self.w_name();
        let names = (0..e)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => wname.clone(),
                _ => format!("{wname}{i}"),
            })
            .collect();
        let sc = (0..e)
            .map(|i| (0..e).map(|j| powers[i + j].clone()).collect())
            .collect();
        AlgebraInput {
            field: self.field,
            ring: WeightedPolyRing::new(vec![self.tw_ring.weights[0]]).expect("positive weight"),
            ring_names: vec!["t".into()],
            generator_names: names,
            generator_shifts: (0..e as i64).map(|i| -i * dw).collect(),
            structure_constants: sc,
            commutative: true,
            isolated_singularity: true,
            relations: None,
        }
    }

    /// Name of the generator `w`: the ambient variable when `w` is one.
    fn w_name(&self) -> String {
        let t: Vec<_> = self.w.terms().collect();
        match t.as_slice() {
            [(m, 1)] if m.0 == [1, 0] => "x".into(),
            [(m, 1)] if m.0 == [0, 1] => "y".into(),
            _ => "w".into(),
        }
    }

    pub fn algebra(&self, truncation: Option<i64>) -> Result<Arc<Algebra>> {
        let input = self.algebra_input();
        Ok(Arc::new(match truncation {
            Some(d) => Algebra::build(input, d)?,
            None => Algebra::build_default(input)?,
        }))
    }
}

fn check_char(field: PrimeField, min: u64) -> Result<()> {
    if field.p() < min {
        return Err(Error::Input(format!(
            "characteristic {} too small for this catalog (need p ≥ {min})",
            field.p()
        )));
    }
    Ok(())
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// `φ: ⊕ S(-b_k) → ⊕ S(-a_j)` and `ψ` with `φψ = ψφ = f·I`, entries in `x, y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFactorization {
    pub phi: PolyMatrix,
    pub psi: PolyMatrix,
    /// Generator degrees of the target of `φ`.
    pub a: Vec<i64>,
    /// Generator degrees of the source of `φ`.
    pub b: Vec<i64>,
}

impl MatrixFactorization {
    /// Builds `(φ, ψ)` from `φ` alone: shifts are propagated along nonzero
    /// entries from `a_0 = 0`, and `ψ` is solved from `ψφ = f·I`.
    pub fn from_phi(hs: &Hypersurface, phi: PolyMatrix) -> Result<Self> {
        let (a, b) = infer_shifts(&hs.ambient, &phi)?;
        let psi = solve_psi(hs, &phi, &a, &b)
            .ok_or_else(|| Error::MatrixFactorization("φ does not divide f·I".into()))?;
        let mf = MatrixFactorization { phi, psi, a, b };
        mf.validate(hs)?;
        Ok(mf)
    }

    /// The trivial factorization `(f)·(1)`, whose cokernel is `A`.
    pub fn trivial(hs: &Hypersurface) -> Self {
        MatrixFactorization {
            phi: PolyMatrix::from_entries(1, 1, vec![hs.f.clone()]),
            psi: PolyMatrix::identity(1, 2),
            a: vec![0],
            b: vec![hs.degree_f()],
        }
    }

    pub fn size(&self) -> usize {
        self.phi.rows()
    }

    pub fn validate(&self, hs: &Hypersurface) -> Result<()> {
        let f = hs.field;
        let n = self.phi.rows();
        if self.phi.cols() != n
            || self.psi.rows() != n
            || self.psi.cols() != n
            || self.a.len() != n
            || self.b.len() != n
        {
            return Err(Error::MatrixFactorization(
                "φ, ψ must be square of equal size".into(),
            ));
        }
        let fi = PolyMatrix::identity(n, 2).scale_poly(&hs.f, f);
        if self.phi.mul(&self.psi, f) != fi || self.psi.mul(&self.phi, f) != fi {
            return Err(Error::MatrixFactorization("φψ = ψφ = f·I fails".into()));
        }
        let df = hs.degree_f();
        for j in 0..n {
            for k in 0..n {
                if !self
                    .phi
                    .get(j, k)
                    .is_homogeneous_of(&hs.ambient, self.b[k] - self.a[j])
                {
                    return Err(Error::MatrixFactorization(format!(
                        "φ entry ({j},{k}) has the wrong degree"
                    )));
                }
                if !self
                    .psi
                    .get(k, j)
                    .is_homogeneous_of(&hs.ambient, self.a[j] + df - self.b[k])
                {
                    return Err(Error::MatrixFactorization(format!(
                        "ψ entry ({k},{j}) has the wrong degree"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn direct_sum(&self, o: &MatrixFactorization) -> MatrixFactorization {
        MatrixFactorization {
            phi: self.phi.direct_sum(&o.phi),
            psi: self.psi.direct_sum(&o.psi),
            a: self.a.iter().chain(&o.a).copied().collect(),
            b: self.b.iter().chain(&o.b).copied().collect(),
        }
    }

    /// `(ψ, φ)` with matching shifts.
    pub fn swapped(&self, hs: &Hypersurface) -> MatrixFactorization {
        let df = hs.degree_f();
        MatrixFactorization {
            phi: self.psi.clone(),
            psi: self.phi.clone(),
            a: self.b.clone(),
            b: self.a.iter().map(|x| x + df).collect(),
        }
    }
}

fn infer_shifts(ring: &WeightedPolyRing, phi: &PolyMatrix) -> Result<(Vec<i64>, Vec<i64>)> {
    let n = phi.rows();
    let mut a: Vec<Option<i64>> = vec![None; n];
    let mut b: Vec<Option<i64>> = vec![None; phi.cols()];
    let bad = || Error::MatrixFactorization("entries of φ admit no consistent shifts".into());
    let mut deg = vec![vec![None; phi.cols()]; n];
    for (j, row) in deg.iter_mut().enumerate() {
        for (k, d) in row.iter_mut().enumerate() {
            let p = phi.get(j, k);
            if !p.is_zero() {
                *d = Some(p.homogeneous_degree(ring).ok_or_else(bad)?);
            }
        }
    }
    for start in 0..n {
        if a[start].is_some() {
            continue;
        }
        a[start] = Some(0);
        let mut changed = true;
        while changed {
            changed = false;
            for j in 0..n {
                for k in 0..phi.cols() {
                    let Some(d) = deg[j][k] else { continue };
                    match (a[j], b[k]) {
                        (Some(x), None) => {
                            b[k] = Some(x + d);
                            changed = true;
                        }
                        (None, Some(y)) => {
                            a[j] = Some(y - d);
                            changed = true;
                        }
                        (Some(x), Some(y)) if y - x != d => return Err(bad()),
                        _ => {}
                    }
                }
            }
        }
    }
    let b: Option<Vec<i64>> = b.into_iter().collect();
    Ok((
        a.into_iter().map(|x| x.expect("seeded")).collect(),
        b.ok_or_else(bad)?,
    ))
}

/// Solves `ψφ = f·I` linearly; `None` if unsolvable or `φψ ≠ f·I`.
fn solve_psi(hs: &Hypersurface, phi: &PolyMatrix, a: &[i64], b: &[i64]) -> Option<PolyMatrix> {
    let f = hs.field;
    let df = hs.degree_f();
    let n = phi.rows();
    let space = HomSpace::new(&hs.ambient, a, b, df);
    let target = HomSpace::new(&hs.ambient, b, b, df);
    let sys = space.linear_map(
        std::slice::from_ref(&target),
        f,
        |psi| vec![psi.mul(phi, f)],
    );
    let fi = PolyMatrix::identity(n, 2).scale_poly(&hs.f, f);
    let sol = sys.solve(&target.coords_of(&fi)?)?;
    let psi = space.matrix_of(&sol, f);
    (phi.mul(&psi, f) == fi).then_some(psi)
}

/// `coker φ` as a framed module over `A`.
pub fn mf_to_framed_module(
    mf: &MatrixFactorization,
    hs: &Hypersurface,
    alg: &Arc<Algebra>,
) -> Result<FramedModule> {
    mf.validate(hs)?;
    let f = hs.field;
    let ring = &hs.tw_ring;
    let (dt, dw) = (ring.weights[0], ring.weights[1]);
    let n = mf.size();
    let phi: Vec<Vec<Poly>> = (0..n)
        .map(|k| (0..n).map(|j| hs.substitute(mf.phi.get(j, k))).collect())
        .collect();
    let image = |d: i64, basis: &DegreeBasis| -> Subspace {
        let mut s = Subspace::new(f, basis.len());
        for (k, col) in phi.iter().enumerate() {
            for m in ring.monomial_basis(d - mf.b[k]) {
                let v: Vec<Poly> = col.iter().map(|p| p.mul_monomial(&m)).collect();
                s.insert(&basis.vector_of(&v, f));
            }
        }
        s
    };
    let lo = *mf.a.iter().min().expect("nonempty");
    let hi = *mf.a.iter().max().expect("nonempty") + (hs.e as i64 - 1) * dw;
    // R-basis: per degree, a complement of image + t·(lower generators).
    let mut gens: Vec<(i64, Vec<Poly>)> = Vec::new();
    let t_mult = |g: &[Poly], k: u32| -> Vec<Poly> {
        let m = Monomial(vec![k, 0]);
        g.iter().map(|p| p.mul_monomial(&m)).collect()
    };
    // Columns spanning M_d: t^k·g_r for generators of matching degree.
    let span_at =
        |d: i64, gens: &[(i64, Vec<Poly>)], basis: &DegreeBasis| -> Vec<(usize, u32, Vec<u64>)> {
            gens.iter()
                .enumerate()
                .filter(|(_, (gd, _))| d >= *gd && (d - gd) % dt == 0)
                .map(|(r, (gd, g))| {
                    let k = ((d - gd) / dt) as u32;
                    (r, k, basis.vector_of(&t_mult(g, k), f))
                })
                .collect()
        };
    for d in lo..=hi {
        let basis = DegreeBasis::new(ring, &mf.a, d);
        let mut known = image(d, &basis);
        for (_, _, v) in span_at(d, &gens, &basis) {
            known.insert(&v);
        }
        for k in 0..basis.len() {
            let mut e = vec![0; basis.len()];
            e[k] = 1;
            if known.insert(&e) {
                gens.push((d, basis.poly_vector(&e, n, f)));
            }
        }
    }
    let r = gens.len();
    // Freeness check: the t^k g_r stay independent modulo the image.
    let not_free =
        || Error::MatrixFactorization("cokernel is not R-free in the checked window".into());
    for d in hi..=hi + dt + dw {
        let basis = DegreeBasis::new(ring, &mf.a, d);
        let im = image(d, &basis);
        let cols = span_at(d, &gens, &basis);
        let mut s = im.clone();
        for (_, _, v) in &cols {
            if !s.insert(v) {
                return Err(not_free());
            }
        }
        if s.dim() != basis.len() {
            return Err(not_free());
        }
    }
    // Matrix of w on the R-basis.
    let wm = Monomial(vec![0, 1]);
    let mut w_mat = PolyMatrix::zeros(r, r);
    for (s, (gd, g)) in gens.iter().enumerate() {
        let d = gd + dw;
        let basis = DegreeBasis::new(ring, &mf.a, d);
        let target: Vec<Poly> = g.iter().map(|p| p.mul_monomial(&wm)).collect();
        let im = image(d, &basis);
        let cols = span_at(d, &gens, &basis);
        let mut all: Vec<Vec<u64>> = cols.iter().map(|c| c.2.clone()).collect();
        all.extend(im.basis().iter().cloned());
        let sol = Matrix::from_columns(f, basis.len(), &all)
            .solve(&basis.vector_of(&target, f))
            .ok_or_else(not_free)?;
        for (c, (row, k, _)) in cols.iter().enumerate() {
            if sol[c] != 0 {
                w_mat
                    .get_mut(*row, s)
                    .add_term(Monomial(vec![*k]), sol[c], f);
            }
        }
    }
    let mut actions = Vec::with_capacity(hs.e - 1);
    let mut p = PolyMatrix::identity(r, 1);
    for _ in 1..hs.e {
        p = p.mul(&w_mat, f);
        actions.push(p.clone());
    }
    FramedModule::new(alg.clone(), gens.iter().map(|g| g.0).collect(), actions)
}

/// Rejection sampling of a factorization with the given shifts. Each monomial
/// of `φ` is present with probability 1/2 with a random nonzero coefficient.
pub fn random_mf<G: Rng>(
    hs: &Hypersurface,
    a: &[i64],
    b: &[i64],
    budget: usize,
    rng: &mut G,
) -> Result<Option<MatrixFactorization>> {
    let f = hs.field;
    let n = a.len();
    if b.len() != n || n == 0 {
        return Err(Error::Input(
            "shift pattern must be square and nonempty".into(),
        ));
    }
    for _ in 0..budget {
        let mut phi = PolyMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                for m in hs.ambient.monomial_basis(b[k] - a[j]) {
                    if rng.random_bool(0.5) {
                        phi.get_mut(j, k).add_term(m, rng.random_range(1..f.p()), f);
                    }
                }
            }
        }
        if let Some(psi) = solve_psi(hs, &phi, a, b) {
            let mf = MatrixFactorization {
                phi,
                psi,
                a: a.to_vec(),
                b: b.to_vec(),
            };
            mf.validate(hs)?;
            return Ok(Some(mf));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub mf: MatrixFactorization,
    /// Indecomposable over `F_p` but possibly not over its closure.
    pub field_caveat: bool,
}

/// Candidate factorizations before deduplication.
fn candidates(hs: &Hypersurface) -> Result<Vec<(String, PolyMatrix)>> {
    let f = hs.field;
    let mono = |c: i64, i: u32, j: u32| xy(f.from_i64(c), i, j);
    let m2 = |e: [Poly; 4]| PolyMatrix::from_entries(2, 2, e.to_vec());
    let mut out: Vec<(String, PolyMatrix)> = Vec::new();
    let name = hs.name.as_str();
    let one = |p: Poly| PolyMatrix::from_entries(1, 1, vec![p]);
    if name == "NODAL" {
        out.push(("coker_x".into(), one(mono(1, 1, 0))));
        out.push(("coker_y".into(), one(mono(1, 0, 1))));
    } else if let Some(n) = name.strip_prefix("A_") {
        let n: u32 = n.parse().expect("own name");
        let half = n.div_ceil(2);
        for j in 1..=half {
            if 2 * j == n + 1 {
                if let Some(i) = f.sqrt(f.neg(1)) {
                    // y² + x^{2j} = (y - i x^j)(y + i x^j)
                    out.push((
                        format!("y-ix{j}"),
                        one(mono(1, 0, 1).add(&xy(f.neg(i), j, 0), f)),
                    ));
                    out.push((format!("y+ix{j}"), one(mono(1, 0, 1).add(&xy(i, j, 0), f))));
                    continue;
                }
            }
            out.push((
                format!("phi{j}"),
                m2([
                    mono(1, 0, 1),
                    mono(-1, j, 0),
                    mono(1, n + 1 - j, 0),
                    mono(1, 0, 1),
                ]),
            ));
        }
    } else if let Some(n) = name.strip_prefix("D_") {
        let n: u32 = n.parse().expect("own name");
        out.push(("y".into(), one(mono(1, 0, 1))));
        out.push(("x2+y".into(), one(mono(1, 2, 0).add(&mono(1, 0, n - 2), f))));
        if n % 2 == 0 {
            if let Some(i) = f.sqrt(f.neg(1)) {
                let h = (n - 2) / 2;
                out.push((
                    "x-iy".into(),
                    one(mono(1, 1, 0).add(&xy(f.neg(i), 0, h), f)),
                ));
                out.push(("x+iy".into(), one(mono(1, 1, 0).add(&xy(i, 0, h), f))));
            }
        }
        for j in 0..=n - 2 {
            out.push((
                format!("alpha{j}"),
                m2([
                    mono(1, 1, 0),
                    mono(1, 0, j),
                    mono(1, 0, n - 2 - j),
                    mono(-1, 1, 0),
                ]),
            ));
            out.push((
                format!("beta{j}"),
                m2([
                    mono(1, 1, 1),
                    mono(1, 0, j + 1),
                    mono(1, 0, n - 1 - j),
                    mono(-1, 1, 1),
                ]),
            ));
        }
        for j in 0..=n - 1 {
            out.push((
                format!("xi{j}"),
                m2([
                    mono(1, 1, 0),
                    mono(1, 0, j),
                    mono(1, 0, n - 1 - j),
                    mono(-1, 1, 1),
                ]),
            ));
            out.push((
                format!("eta{j}"),
                m2([
                    mono(1, 1, 1),
                    mono(1, 0, j),
                    mono(1, 0, n - 1 - j),
                    mono(-1, 1, 0),
                ]),
            ));
        }
    } else {
        let m3 = |e: [Poly; 9]| PolyMatrix::from_entries(3, 3, e.to_vec());
        let z = Poly::zero;
        let (x, x2) = (mono(1, 1, 0), mono(-1, 2, 0));
        match name {
            "E6" => {
                out.push((
                    "phi1".into(),
                    m2([x.clone(), mono(1, 0, 1), mono(1, 0, 3), x2.clone()]),
                ));
                out.push((
                    "phi2".into(),
                    m2([x.clone(), mono(1, 0, 2), mono(1, 0, 2), x2]),
                ));
                out.push((
                    "chi".into(),
                    m3([
                        x.clone(),
                        mono(1, 0, 1),
                        z(),
                        z(),
                        x.clone(),
                        mono(1, 0, 1),
                        mono(1, 0, 2),
                        z(),
                        x,
                    ]),
                ));
            }
            "E7" => {
                out.push(("x".into(), one(x.clone())));
                out.push(("x2+y3".into(), one(mono(1, 2, 0).add(&mono(1, 0, 3), f))));
                out.push((
                    "phi1".into(),
                    m2([x.clone(), mono(1, 0, 1), mono(-1, 1, 2), mono(1, 2, 0)]),
                ));
                out.push((
                    "phi2".into(),
                    m2([x.clone(), mono(1, 0, 2), mono(-1, 1, 1), mono(1, 2, 0)]),
                ));
                out.push((
                    "phi3".into(),
                    m2([mono(1, 2, 0), mono(1, 0, 1), mono(-1, 1, 2), x.clone()]),
                ));
                out.push((
                    "chi".into(),
                    m3([
                        x.clone(),
                        mono(1, 0, 1),
                        z(),
                        z(),
                        x.clone(),
                        mono(1, 0, 1),
                        mono(1, 1, 1),
                        z(),
                        x,
                    ]),
                ));
            }
            "E8" => {
                out.push((
                    "phi1".into(),
                    m2([x.clone(), mono(1, 0, 1), mono(1, 0, 4), x2.clone()]),
                ));
                out.push((
                    "phi2".into(),
                    m2([x.clone(), mono(1, 0, 2), mono(1, 0, 3), x2]),
                ));
                out.push((
                    "chi1".into(),
                    m3([
                        x.clone(),
                        mono(1, 0, 1),
                        z(),
                        z(),
                        x.clone(),
                        mono(1, 0, 1),
                        mono(1, 0, 3),
                        z(),
                        x.clone(),
                    ]),
                ));
                out.push((
                    "chi2".into(),
                    m3([
                        x.clone(),
                        mono(1, 0, 2),
                        z(),
                        z(),
                        x.clone(),
                        mono(1, 0, 1),
                        mono(1, 0, 2),
                        z(),
                        x,
                    ]),
                ));
            }
            _ => return Err(Error::Unsupported(format!("no catalog for {name}"))),
        }
    }
    Ok(out)
}

/// Indecomposable graded factorizations, the trivial one first. Candidates
/// and their swaps are kept when the cokernel is indecomposable and not
/// isomorphic to a shift of an earlier entry.
pub fn ade_catalog<G: Rng>(
    hs: &Hypersurface,
    alg: &Arc<Algebra>,
    rng: &mut G,
) -> Result<Vec<CatalogEntry>> {
    let mut entries = vec![CatalogEntry {
        name: "free".into(),
        mf: MatrixFactorization::trivial(hs),
        field_caveat: false,
    }];
    let mut modules = vec![mf_to_framed_module(&entries[0].mf, hs, alg)?];
    for (name, phi) in candidates(hs)? {
        let mf = MatrixFactorization::from_phi(hs, phi)?;
        for (nm, cand) in [
            (name.clone(), mf.clone()),
            (format!("{name}'"), mf.swapped(hs)),
        ] {
            let m = normalized(&mf_to_framed_module(&cand, hs, alg)?);
            let verdict = is_indecomposable(&m, rng)?;
            if !verdict.is_indecomposable() {
                continue;
            }
            if modules
                .iter()
                .any(|o| find_isomorphism(o, &m, rng).is_some())
            {
                continue;
            }
            let field_caveat = !matches!(
                verdict,
                crate::mcmtools::Indecomposability::Indecomposable {
                    residue_degree: 1,
                    ..
                }
            );
            modules.push(m);
            entries.push(CatalogEntry {
                name: nm,
                mf: cand,
                field_caveat,
            });
        }
    }
    Ok(entries)
}

/// Shifts so that `g_min = 0`.
pub fn normalized(m: &FramedModule) -> FramedModule {
    m.shift(m.degrees()[0])
}

/// Catalog modules with `g_min = 0`, in catalog order.
pub fn catalog_modules(
    hs: &Hypersurface,
    alg: &Arc<Algebra>,
    entries: &[CatalogEntry],
) -> Result<Vec<FramedModule>> {
    entries
        .iter()
        .map(|e| Ok(normalized(&mf_to_framed_module(&e.mf, hs, alg)?)))
        .collect()
}

/// A random `G_V` conjugate of `m`.
pub fn random_conjugate<G: Rng>(m: &FramedModule, rng: &mut G) -> Result<FramedModule> {
    let alg = m.algebra();
    let f = alg.field();
    let degs = m.degrees().to_vec();
    let space = HomSpace::new(alg.ring(), &degs, &degs, 0);
    for _ in 0..32 {
        let v: Vec<u64> = (0..space.dim())
            .map(|_| rng.random_range(0..f.p()))
            .collect();
        let g = space.matrix_of(&v, f);
        if !is_degree_zero_invertible(&g, &degs, &degs, f) {
            continue;
        }
        let g_inv = degree_zero_inverse(alg.ring(), &g, &degs, &degs, f)
            .ok_or_else(|| Error::Computation("invertible map without inverse".into()))?;
        return m.conjugate(degs, &g, &g_inv);
    }
    Err(Error::Computation(
        "no invertible element of G_V drawn".into(),
    ))
}

/// All direct sums of shifted catalog modules with exactly the given
/// framing, in a deterministic order.
pub fn framing_points(catalog: &[FramedModule], framing: &GradedDims) -> Vec<FramedModule> {
    fn rec(
        catalog: &[FramedModule],
        start: usize,
        prev_low: Option<i64>,
        remaining: &[i64],
        acc: Option<FramedModule>,
        out: &mut Vec<FramedModule>,
    ) {
        if remaining.is_empty() {
            out.extend(acc);
            return;
        }
        // The lowest remaining degree must be covered by the next summand.
        let low = remaining[0];
        // Summands starting in the same degree are taken in catalog order.
        let from = if prev_low == Some(low) { start } else { 0 };
        for (c, m) in catalog.iter().enumerate().skip(from) {
            let sm = m.shift(m.degrees()[0] - low);
            let mut rest = remaining.to_vec();
            let fits = sm
                .degrees()
                .iter()
                .all(|d| match rest.iter().position(|x| x == d) {
                    Some(p) => {
                        rest.remove(p);
                        true
                    }
                    None => false,
                });
            if fits {
                let next = match &acc {
                    Some(a) => a.direct_sum(&sm),
                    None => sm,
                };
                rec(catalog, c, Some(low), &rest, Some(next), out);
            }
        }
    }
    let mut out = Vec::new();
    rec(catalog, 0, None, &framing.degrees(), None, &mut out);
    out
}

/// Sampled points: direct sums of one to three shifted catalog or freshly
/// drawn factorization cokernels, then a random `G_V` conjugation.
pub fn sample_points<G: Rng>(
    hs: &Hypersurface,
    alg: &Arc<Algebra>,
    entries: &[CatalogEntry],
    count: usize,
    max_rank: usize,
    rng: &mut G,
) -> Result<Vec<FramedModule>> {
    let base = catalog_modules(hs, alg, entries)?;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let parts = rng.random_range(1..=3);
        let mut acc: Option<FramedModule> = None;
        for _ in 0..parts {
            let k = rng.random_range(0..entries.len());
            let m = if rng.random_bool(0.3) {
                let e = &entries[k].mf;
                match random_mf(hs, &e.a, &e.b, 16, rng)? {
                    Some(mf) => mf_to_framed_module(&mf, hs, alg)?,
                    None => base[k].clone(),
                }
            } else {
                base[k].clone()
            };
            let m = m.shift(rng.random_range(-2..=2));
            acc = Some(match acc {
                Some(a) => a.direct_sum(&m),
                None => m,
            });
        }
        let m = acc.expect("at least one part");
        if m.rank() > max_rank {
            continue;
        }
        out.push(random_conjugate(&m, rng)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homresolve::{minimal_resolution, Periodicity};
    use crate::repscheme::EquationSystem;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn field() -> PrimeField {
        PrimeField::new(32003).unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn nodal_matches_builtin() {
        let hs = Hypersurface::nodal(field()).unwrap();
        assert_eq!(hs.algebra_input(), AlgebraInput::nodal(field()));
    }

    #[test]
    fn nodal_rank_one_cokernels() {
        let hs = Hypersurface::nodal(field()).unwrap();
        let alg = hs.algebra(Some(12)).unwrap();
        let coker_x =
            MatrixFactorization::from_phi(&hs, PolyMatrix::from_entries(1, 1, vec![xy(1, 1, 0)]))
                .unwrap();
        let my = mf_to_framed_module(&coker_x, &hs, &alg).unwrap();
        assert_eq!(my.degrees(), &[0]);
        assert!(my.action(1).is_zero());
        let mx = mf_to_framed_module(&coker_x.swapped(&hs), &hs, &alg).unwrap();
        assert_eq!(mx.action(1).get(0, 0), &Poly::term(1, Monomial(vec![1])));
        let free = mf_to_framed_module(&MatrixFactorization::trivial(&hs), &hs, &alg).unwrap();
        assert_eq!(free.degrees(), &[0, 1]);
        assert!(find_isomorphism(&free, &FramedModule::regular(&alg), &mut rng()).is_some());
    }

    #[test]
    fn random_mf_nodal_rank_one() {
        let hs = Hypersurface::nodal(field()).unwrap();
        let mut g = rng();
        for _ in 0..10 {
            let mf = random_mf(&hs, &[0], &[1], 64, &mut g).unwrap().unwrap();
            let p = mf.phi.get(0, 0);
            assert_eq!(p.num_terms(), 1);
        }
        let zero = Hypersurface::new(
            "zero",
            field(),
            [1, 1],
            Poly::zero(),
            xy(1, 1, 0),
            xy(1, 0, 1),
        );
        assert!(zero.is_err());
    }

    #[test]
    fn catalogs_are_points_and_periodic() {
        let mut g = rng();
        for hs in [
            Hypersurface::nodal(field()).unwrap(),
            Hypersurface::a_n(field(), 2).unwrap(),
            Hypersurface::a_n(field(), 3).unwrap(),
            Hypersurface::d_n(field(), 4).unwrap(),
            Hypersurface::e_n(field(), 6).unwrap(),
        ] {
            let alg = hs.algebra(None).unwrap();
            let cat = ade_catalog(&hs, &alg, &mut g).unwrap();
            assert!(cat.len() >= 2, "{}", hs.name);
            for m in catalog_modules(&hs, &alg, &cat).unwrap() {
                let sys = EquationSystem::generate(&alg, &m.framing());
                assert!(sys.evaluate_point(&m).unwrap().on_variety);
                let res = minimal_resolution(&m, 5, (-2, 2)).unwrap();
                assert!(res.dd_zero);
                if m.rank() != hs.rank() || !matches!(res.periodicity(), Periodicity::Free) {
                    assert!(matches!(
                        res.periodicity(),
                        Periodicity::Periodic { .. } | Periodicity::Free
                    ));
                }
            }
        }
    }

    #[test]
    fn a2_catalog_size() {
        let hs = Hypersurface::a_n(field(), 2).unwrap();
        let alg = hs.algebra(None).unwrap();
        let cat = ade_catalog(&hs, &alg, &mut rng()).unwrap();
        assert_eq!(cat.len(), 2);
    }

    #[test]
    fn a1_splits_only_with_sqrt_minus_one() {
        let f13 = PrimeField::new(13).unwrap();
        let hs = Hypersurface::a_n(f13, 1).unwrap();
        let alg = hs.algebra(None).unwrap();
        assert_eq!(ade_catalog(&hs, &alg, &mut rng()).unwrap().len(), 3);
        let hs = Hypersurface::a_n(field(), 1).unwrap();
        let alg = hs.algebra(None).unwrap();
        let cat = ade_catalog(&hs, &alg, &mut rng()).unwrap();
        assert_eq!(cat.len(), 2);
        assert!(cat[1].field_caveat);
    }

    #[test]
    fn nodal_framing_points() {
        let hs = Hypersurface::nodal(field()).unwrap();
        let alg = hs.algebra(Some(12)).unwrap();
        let cat = catalog_modules(&hs, &alg, &ade_catalog(&hs, &alg, &mut rng()).unwrap()).unwrap();
        assert_eq!(
            framing_points(&cat, &GradedDims::from_degrees(&[0])).len(),
            2
        );
        assert_eq!(
            framing_points(&cat, &GradedDims::from_degrees(&[0, 0])).len(),
            3
        );
        assert_eq!(
            framing_points(&cat, &GradedDims::from_degrees(&[0, 1])).len(),
            5
        );
    }
}
