//! The algebra `A`, given as a free `R`-module `⊕ R(a_i)` with structure
//! constants, and framed modules: `A`-module structures on `V ⊗ R`.
//!
//! Generator `α_i` sits in degree `-a_i ≥ 0`; generator 0 is the unit.
//! All relation checks are exact identities of polynomial matrices, so they
//! hold in every degree, not only below the truncation bound.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::{Matrix, PrimeField};
use crate::gradedcore::{
    GradedDims, GradedFreeModule, Monomial, Poly, PolyMatrix, WeightedPolyRing,
};

/// Optional explicit presentation `⊕ R(b_k) --τ--> ⊕ R(a_i)`; column `k`
/// lists the coefficients of `τ(β_k)` on the generators `α_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationPresentation {
    pub shifts: Vec<i64>,
    pub columns: Vec<Vec<Poly>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraInput {
    pub field: PrimeField,
    pub ring: WeightedPolyRing,
    pub ring_names: Vec<String>,
    pub generator_names: Vec<String>,
    pub generator_shifts: Vec<i64>,
    /// `structure_constants[i][j][l]` is `c^l_{ij}` in `α_i α_j = Σ_l c^l_{ij} α_l`.
    pub structure_constants: Vec<Vec<Vec<Poly>>>,
    pub commutative: bool,
    pub isolated_singularity: bool,
    pub relations: Option<RelationPresentation>,
}

impl AlgebraInput {
    /// `A = R` itself: a single unit generator.
    pub fn polynomial_ring(
        field: PrimeField,
        ring: WeightedPolyRing,
        ring_names: Vec<String>,
    ) -> Self {
        let n = ring.num_vars();
        AlgebraInput {
            field,
            ring,
            ring_names,
            generator_names: vec!["1".into()],
            generator_shifts: vec![0],
            structure_constants: vec![vec![vec![Poly::constant(1, n)]]],
            commutative: true,
            isolated_singularity: true,
            relations: None,
        }
    }

    /// `k[x,y]/(xy)` over `R = k[t]`, `t = x + y`: basis `1, x` with `x·x = t·x`.
    pub fn nodal(field: PrimeField) -> Self {
        let ring = WeightedPolyRing::new(vec![1]).expect("weight 1");
        let one = Poly::constant(1, 1);
        let t = Poly::term(1, Monomial(vec![1]));
        let z = Poly::zero();
        AlgebraInput {
            field,
            ring,
            ring_names: vec!["t".into()],
            generator_names: vec!["1".into(), "x".into()],
            generator_shifts: vec![0, -1],
            structure_constants: vec![
                vec![vec![one.clone(), z.clone()], vec![z.clone(), one.clone()]],
                vec![vec![z.clone(), one], vec![z, t]],
            ],
            commutative: true,
            isolated_singularity: true,
            relations: None,
        }
    }

    pub fn num_generators(&self) -> usize {
        self.generator_shifts.len()
    }

    /// Reorders the non-unit generators by `(degree, name)`.
    pub fn canonicalize(&self) -> AlgebraInput {
        let g = self.num_generators();
        let mut order: Vec<usize> = (1..g).collect();
        order.sort_by(|&a, &b| {
            (-self.generator_shifts[a], &self.generator_names[a])
                .cmp(&(-self.generator_shifts[b], &self.generator_names[b]))
        });
        order.insert(0, 0);
        self.permuted(&order)
    }

    /// New generator `k` is old generator `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> AlgebraInput {
        let sc = order
            .iter()
            .map(|&i| {
                order
                    .iter()
                    .map(|&j| {
                        order
                            .iter()
                            .map(|&l| self.structure_constants[i][j][l].clone())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let relations = self.relations.as_ref().map(|r| RelationPresentation {
            shifts: r.shifts.clone(),
            columns: r
                .columns
                .iter()
                .map(|c| order.iter().map(|&l| c[l].clone()).collect())
                .collect(),
        });
        AlgebraInput {
            generator_names: order
                .iter()
                .map(|&i| self.generator_names[i].clone())
                .collect(),
            generator_shifts: order.iter().map(|&i| self.generator_shifts[i]).collect(),
            structure_constants: sc,
            relations,
            ..self.clone()
        }
    }
}

/// Elements of `A` as coordinate vectors over the generators, entries in `R`.
pub type AlgElem = Vec<Poly>;

/// Report of the connectedness / freeness check.
#[derive(Clone, Debug, Serialize)]
pub struct ConnectednessReport {
    pub dim_a0: usize,
    pub connected: bool,
    pub free_over_r: bool,
    pub note: String,
}

/// The algebra with its truncation bound. Immutable after construction.
#[derive(Clone, Debug)]
pub struct Algebra {
    input: AlgebraInput,
    truncation: i64,
    gen_degrees: Vec<i64>,
}

/// Default truncation bound for computations involving the given spread of
/// framing degrees.
pub fn default_truncation(alpha: i64, spread: i64) -> i64 {
    4 * (alpha + spread) + 8
}

impl Algebra {
    /// Validates the structure constants (homogeneity, unit, associativity,
    /// commutativity when flagged) and fixes the truncation bound.
    pub fn build(input: AlgebraInput, truncation: i64) -> Result<Algebra> {
        let g = input.num_generators();
        let f = input.field;
        let ring = &input.ring;
        let nv = ring.num_vars();
        if g == 0 || input.generator_shifts[0] != 0 {
            return Err(Error::InvalidAlgebra(
                "first generator must be the unit with shift 0".into(),
            ));
        }
        if input.generator_names.len() != g {
            return Err(Error::InvalidAlgebra(
                "generator names and shifts differ in length".into(),
            ));
        }
        if let Some(i) = input.generator_shifts.iter().position(|&a| a > 0) {
            return Err(Error::InvalidAlgebra(format!(
                "generator {} has positive shift {}: A must be non-negatively graded",
                input.generator_names[i], input.generator_shifts[i]
            )));
        }
        let sc = &input.structure_constants;
        if sc.len() != g
            || sc
                .iter()
                .any(|r| r.len() != g || r.iter().any(|c| c.len() != g))
        {
            return Err(Error::InvalidAlgebra(
                "structure constant table has the wrong shape".into(),
            ));
        }
        let deg: Vec<i64> = input.generator_shifts.iter().map(|a| -a).collect();
        let name = |i: usize| input.generator_names[i].as_str();
        for i in 0..g {
            for j in 0..g {
                for l in 0..g {
                    let c = &sc[i][j][l];
                    let want = deg[i] + deg[j] - deg[l];
                    if !c.is_homogeneous_of(ring, want) || (want < 0 && !c.is_zero()) {
                        return Err(Error::InvalidAlgebra(format!(
                            "inhomogeneous structure constant c^{}_{{{},{}}}: expected degree {want}",
                            name(l),
                            name(i),
                            name(j)
                        )));
                    }
                }
            }
        }
        let one = Poly::constant(1, nv);
        for j in 0..g {
            for l in 0..g {
                let expect = if l == j { one.clone() } else { Poly::zero() };
                if sc[0][j][l] != expect || sc[j][0][l] != expect {
                    return Err(Error::InvalidAlgebra(format!(
                        "generator {} is not a two-sided unit (fails against {})",
                        name(0),
                        name(j)
                    )));
                }
            }
        }
        if input.commutative {
            for i in 0..g {
                for j in 0..g {
                    if sc[i][j] != sc[j][i] {
                        return Err(Error::InvalidAlgebra(format!(
                            "flagged commutative but {}·{} != {}·{}",
                            name(i),
                            name(j),
                            name(j),
                            name(i)
                        )));
                    }
                }
            }
        }
        for i in 0..g {
            for j in 0..g {
                for k in 0..g {
                    // (α_i α_j) α_k and α_i (α_j α_k)
                    let mut left = vec![Poly::zero(); g];
                    let mut right = vec![Poly::zero(); g];
                    for l in 0..g {
                        for m in 0..g {
                            left[m].add_assign(&sc[i][j][l].mul(&sc[l][k][m], f), f);
                            right[m].add_assign(&sc[j][k][l].mul(&sc[i][l][m], f), f);
                        }
                    }
                    if left != right {
                        return Err(Error::InvalidAlgebra(format!(
                            "not associative on the triple ({}, {}, {})",
                            name(i),
                            name(j),
                            name(k)
                        )));
                    }
                }
            }
        }
        if let Some(rel) = &input.relations {
            if rel.columns.len() != rel.shifts.len() || rel.columns.iter().any(|c| c.len() != g) {
                return Err(Error::InvalidAlgebra(
                    "relation presentation has the wrong shape".into(),
                ));
            }
            for (k, col) in rel.columns.iter().enumerate() {
                for (l, c) in col.iter().enumerate() {
                    if !c.is_homogeneous_of(ring, -rel.shifts[k] - deg[l]) {
                        return Err(Error::InvalidAlgebra(format!(
                            "inhomogeneous relation coefficient in relation {k} on {}",
                            name(l)
                        )));
                    }
                }
            }
        }
        let alpha = deg.iter().copied().max().unwrap_or(0);
        if truncation < alpha {
            return Err(Error::Input(format!(
                "truncation bound {truncation} is below α = {alpha}"
            )));
        }
        Ok(Algebra {
            input,
            truncation,
            gen_degrees: deg,
        })
    }

    pub fn build_default(input: AlgebraInput) -> Result<Algebra> {
        let alpha = input.generator_shifts.iter().map(|a| -a).max().unwrap_or(0);
        Algebra::build(input, default_truncation(alpha, 0))
    }

    pub fn input(&self) -> &AlgebraInput {
        &self.input
    }
    pub fn field(&self) -> PrimeField {
        self.input.field
    }
    pub fn ring(&self) -> &WeightedPolyRing {
        &self.input.ring
    }
    pub fn nvars(&self) -> usize {
        self.input.ring.num_vars()
    }
    pub fn truncation(&self) -> i64 {
        self.truncation
    }
    pub fn num_generators(&self) -> usize {
        self.gen_degrees.len()
    }
    pub fn generator_degree(&self, i: usize) -> i64 {
        self.gen_degrees[i]
    }
    pub fn generator_degrees(&self) -> &[i64] {
        &self.gen_degrees
    }
    pub fn generator_name(&self, i: usize) -> &str {
        &self.input.generator_names[i]
    }
    pub fn is_commutative(&self) -> bool {
        self.input.commutative
    }

    /// Same algebra with another truncation bound.
    pub fn with_truncation(&self, truncation: i64) -> Algebra {
        Algebra {
            truncation: truncation.max(self.alpha()),
            ..self.clone()
        }
    }

    pub fn structure_constant(&self, i: usize, j: usize, l: usize) -> &Poly {
        &self.input.structure_constants[i][j][l]
    }

    /// `g_max(A)`: the top degree of `A/R_+A`, i.e. the largest generator degree.
    pub fn alpha(&self) -> i64 {
        self.gen_degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn check_connected_finite(&self) -> ConnectednessReport {
        let dim_a0 = self.gen_degrees.iter().filter(|&&d| d == 0).count();
        ConnectednessReport {
            dim_a0,
            connected: dim_a0 == 1,
            free_over_r: true,
            note: "A is given as a free R-module on its generators, hence free over R".into(),
        }
    }

    pub fn as_free_module(&self) -> GradedFreeModule {
        GradedFreeModule {
            ring: self.input.ring.clone(),
            shifts: self.input.generator_shifts.clone(),
        }
    }

    pub fn degree_basis(&self, d: i64) -> Vec<(usize, Monomial)> {
        self.as_free_module().degree_basis(d)
    }

    pub fn degree_dim(&self, d: i64) -> usize {
        self.as_free_module().degree_dim(d)
    }

    pub fn unit(&self) -> AlgElem {
        let mut e = vec![Poly::zero(); self.num_generators()];
        e[0] = Poly::constant(1, self.nvars());
        e
    }

    pub fn generator(&self, i: usize) -> AlgElem {
        let mut e = vec![Poly::zero(); self.num_generators()];
        e[i] = Poly::constant(1, self.nvars());
        e
    }

    pub fn multiply(&self, a: &AlgElem, b: &AlgElem) -> AlgElem {
        let f = self.field();
        let g = self.num_generators();
        let mut out = vec![Poly::zero(); g];
        for i in 0..g {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..g {
                if b[j].is_zero() {
                    continue;
                }
                let ab = a[i].mul(&b[j], f);
                for (l, o) in out.iter_mut().enumerate() {
                    let c = self.structure_constant(i, j, l);
                    if !c.is_zero() {
                        o.add_assign(&ab.mul(c, f), f);
                    }
                }
            }
        }
        out
    }

    /// The multiplication `A_{d1} × A_{d2} → A_{d1+d2}` as a matrix whose
    /// column `u * dim A_{d2} + v` is the product of basis elements `u`, `v`.
    pub fn mult_table(&self, d1: i64, d2: i64) -> Result<Matrix> {
        if d1 + d2 > self.truncation {
            return Err(Error::WindowExhausted {
                needed: d1 + d2,
                bound: self.truncation,
            });
        }
        let f = self.field();
        let b1 = self.degree_basis(d1);
        let b2 = self.degree_basis(d2);
        let target = DegreeBasis::new(self.ring(), self.generator_degrees(), d1 + d2);
        let mut cols = Vec::with_capacity(b1.len() * b2.len());
        for (i, m) in &b1 {
            for (j, n) in &b2 {
                let mut a = vec![Poly::zero(); self.num_generators()];
                a[*i] = Poly::term(1, m.clone());
                let mut b = vec![Poly::zero(); self.num_generators()];
                b[*j] = Poly::term(1, n.clone());
                cols.push(target.vector_of(&self.multiply(&a, &b), f));
            }
        }
        Ok(Matrix::from_columns(f, target.len(), &cols))
    }
}

/// Basis of the degree-`d` part of a graded free `R`-module whose basis
/// vectors sit in the given degrees: pairs `(basis index, monomial)`.
#[derive(Clone, Debug)]
pub struct DegreeBasis {
    pub degree: i64,
    pub entries: Vec<(usize, Monomial)>,
    index: HashMap<(usize, Monomial), usize>,
}

impl DegreeBasis {
    pub fn new(ring: &WeightedPolyRing, basis_degrees: &[i64], d: i64) -> Self {
        let entries: Vec<(usize, Monomial)> = basis_degrees
            .iter()
            .enumerate()
            .flat_map(|(b, &bd)| ring.monomial_basis(d - bd).into_iter().map(move |m| (b, m)))
            .collect();
        let index = entries
            .iter()
            .cloned()
            .enumerate()
            .map(|(k, e)| (e, k))
            .collect();
        DegreeBasis {
            degree: d,
            entries,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, b: usize, m: &Monomial) -> Option<usize> {
        self.index.get(&(b, m.clone())).copied()
    }

    /// Coordinates of a homogeneous polynomial vector of this degree.
    /// Terms of other degrees are a logic error.
    pub fn vector_of(&self, pv: &[Poly], f: PrimeField) -> Vec<u64> {
        let mut v = vec![0; self.len()];
        for (b, p) in pv.iter().enumerate() {
            for (m, c) in p.terms() {
                let k = self
                    .position(b, m)
                    .unwrap_or_else(|| panic!("term outside degree {} basis", self.degree));
                v[k] = f.add(v[k], c);
            }
        }
        v
    }

    pub fn poly_vector(&self, v: &[u64], rank: usize, f: PrimeField) -> Vec<Poly> {
        let mut pv = vec![Poly::zero(); rank];
        for (k, &c) in v.iter().enumerate() {
            if c != 0 {
                let (b, m) = &self.entries[k];
                pv[*b].add_term(m.clone(), c, f);
            }
        }
        pv
    }
}

/// A point of `Rep_R(A, V)`: an `A`-module structure on `V ⊗ R`.
///
/// Basis vectors are ordered by ascending degree. `actions[i]` is the matrix
/// of `α_i`; entry `(s, r)` is homogeneous of degree `deg r + deg α_i - deg s`.
#[derive(Clone, Debug)]
pub struct FramedModule {
    algebra: Arc<Algebra>,
    degrees: Vec<i64>,
    actions: Vec<PolyMatrix>,
}

/// Validates and builds a framed module. `actions` lists the matrices of the
/// non-unit generators in generator order.
pub fn make_framed_module(
    algebra: &Arc<Algebra>,
    framing: &GradedDims,
    actions: Vec<PolyMatrix>,
) -> Result<FramedModule> {
    let degrees = framing.degrees();
    FramedModule::new(algebra.clone(), degrees, actions)
}

impl FramedModule {
    pub fn new(algebra: Arc<Algebra>, degrees: Vec<i64>, actions: Vec<PolyMatrix>) -> Result<Self> {
        let m = FramedModule::new_unchecked(algebra, degrees, actions)?;
        m.validate()?;
        Ok(m)
    }

    /// Builds without checking the relations (shape and degree sortedness are
    /// still enforced). Callers must validate before treating it as a module.
    pub fn new_unchecked(
        algebra: Arc<Algebra>,
        degrees: Vec<i64>,
        actions: Vec<PolyMatrix>,
    ) -> Result<Self> {
        let g = algebra.num_generators();
        if actions.len() + 1 != g {
            return Err(Error::Input(format!(
                "expected {} action matrices, got {}",
                g - 1,
                actions.len()
            )));
        }
        if degrees.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Input(
                "framing basis must be sorted by degree".into(),
            ));
        }
        let n = degrees.len();
        for (k, a) in actions.iter().enumerate() {
            if a.rows() != n || a.cols() != n {
                return Err(Error::Input(format!(
                    "action of {} must be {n}x{n}",
                    algebra.generator_name(k + 1)
                )));
            }
        }
        let mut all = Vec::with_capacity(g);
        all.push(PolyMatrix::identity(n, algebra.nvars()));
        all.extend(actions);
        Ok(FramedModule {
            algebra,
            degrees,
            actions: all,
        })
    }

    /// Checks homogeneity and every defining relation of `A` exactly.
    pub fn validate(&self) -> Result<()> {
        let alg = &self.algebra;
        let f = alg.field();
        let ring = alg.ring();
        let g = alg.num_generators();
        for i in 1..g {
            if let Err((s, r)) = self.actions[i].check_degrees(
                ring,
                &self.degrees,
                &self.degrees,
                alg.generator_degree(i),
            ) {
                return Err(Error::Input(format!(
                    "action of {} has an inhomogeneous entry at ({s}, {r}); expected degree {}",
                    alg.generator_name(i),
                    self.degrees[r] + alg.generator_degree(i) - self.degrees[s]
                )));
            }
        }
        for i in 1..g {
            for j in 1..g {
                let mut res = self.actions[i].mul(&self.actions[j], f);
                for l in 0..g {
                    let c = alg.structure_constant(i, j, l);
                    if !c.is_zero() {
                        res = res.sub(&self.actions[l].scale_poly(c, f), f);
                    }
                }
                if !res.is_zero() {
                    return Err(Error::NotAModule {
                        relation: format!("{}·{}", alg.generator_name(i), alg.generator_name(j)),
                        degree: alg.generator_degree(i) + alg.generator_degree(j),
                    });
                }
            }
        }
        if let Some(rel) = &alg.input().relations {
            for (k, col) in rel.columns.iter().enumerate() {
                let mut res = PolyMatrix::zeros(self.rank(), self.rank());
                for (l, c) in col.iter().enumerate() {
                    if !c.is_zero() {
                        res = res.add(&self.actions[l].scale_poly(c, f), f);
                    }
                }
                if !res.is_zero() {
                    return Err(Error::NotAModule {
                        relation: format!("W{k}"),
                        degree: -rel.shifts[k],
                    });
                }
            }
        }
        Ok(())
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    pub fn framing(&self) -> GradedDims {
        GradedDims::from_degrees(&self.degrees)
    }

    /// Matrix of generator `i` (0 is the identity).
    pub fn action(&self, i: usize) -> &PolyMatrix {
        &self.actions[i]
    }

    pub fn non_unit_actions(&self) -> &[PolyMatrix] {
        &self.actions[1..]
    }

    pub fn field(&self) -> PrimeField {
        self.algebra.field()
    }

    /// The regular module `A` framed by its generators.
    pub fn regular(algebra: &Arc<Algebra>) -> FramedModule {
        FramedModule::free(algebra, &[0])
    }

    /// `⊕_j A e_j` with `e_j` in degree `gen_degrees[j]`; basis `α_i e_j`
    /// sorted by degree (ties by `j`, then `i`).
    pub fn free(algebra: &Arc<Algebra>, gen_degrees: &[i64]) -> FramedModule {
        let (basis, degrees) = free_basis(algebra, gen_degrees);
        let pos: HashMap<(usize, usize), usize> =
            basis.iter().enumerate().map(|(k, &ji)| (ji, k)).collect();
        let g = algebra.num_generators();
        let n = basis.len();
        let mut actions = Vec::with_capacity(g - 1);
        for l in 1..g {
            let mut m = PolyMatrix::zeros(n, n);
            for (col, &(j, i)) in basis.iter().enumerate() {
                for k in 0..g {
                    let c = algebra.structure_constant(l, i, k);
                    if !c.is_zero() {
                        m.set(pos[&(j, k)], col, c.clone());
                    }
                }
            }
            actions.push(m);
        }
        FramedModule::new_unchecked(algebra.clone(), degrees, actions).expect("free module shapes")
    }

    /// `M(a)`, with `M(a)_d = M_{a+d}`: every framing degree moves by `-a`.
    pub fn shift(&self, a: i64) -> FramedModule {
        FramedModule {
            algebra: self.algebra.clone(),
            degrees: self.degrees.iter().map(|d| d - a).collect(),
            actions: self.actions.clone(),
        }
    }

    pub fn direct_sum(&self, o: &FramedModule) -> FramedModule {
        let mut tagged: Vec<(i64, usize, usize)> = self
            .degrees
            .iter()
            .enumerate()
            .map(|(k, &d)| (d, 0, k))
            .chain(o.degrees.iter().enumerate().map(|(k, &d)| (d, 1, k)))
            .collect();
        tagged.sort();
        let n1 = self.rank();
        let perm: Vec<usize> = tagged
            .iter()
            .map(|&(_, s, k)| if s == 0 { k } else { n1 + k })
            .collect();
        let actions = self
            .actions
            .iter()
            .zip(&o.actions)
            .map(|(a, b)| a.direct_sum(b).select(&perm, &perm))
            .collect();
        FramedModule {
            algebra: self.algebra.clone(),
            degrees: tagged.iter().map(|t| t.0).collect(),
            actions,
        }
    }

    /// Base change: `g` has the new basis as columns (in old coordinates),
    /// `g_inv` its inverse; new actions are `g_inv · act · g`.
    pub fn conjugate(
        &self,
        new_degrees: Vec<i64>,
        g: &PolyMatrix,
        g_inv: &PolyMatrix,
    ) -> Result<FramedModule> {
        let f = self.field();
        let actions = self.actions[1..]
            .iter()
            .map(|a| g_inv.mul(&a.mul(g, f), f))
            .collect();
        FramedModule::new(self.algebra.clone(), new_degrees, actions)
    }

    /// Restriction to a set of basis indices (not necessarily a submodule).
    pub fn restrict(&self, idx: &[usize]) -> Result<FramedModule> {
        let degrees = idx.iter().map(|&k| self.degrees[k]).collect();
        let actions = self.actions[1..]
            .iter()
            .map(|a| a.select(idx, idx))
            .collect();
        FramedModule::new(self.algebra.clone(), degrees, actions)
    }

    pub fn degree_basis(&self, d: i64) -> DegreeBasis {
        DegreeBasis::new(self.algebra.ring(), &self.degrees, d)
    }

    pub fn degree_dim(&self, d: i64) -> usize {
        self.degrees
            .iter()
            .map(|&b| self.algebra.ring().degree_dim(d - b))
            .sum()
    }

    /// Applies generator `i` to a vector of degree `d`.
    pub fn act(&self, i: usize, d: i64, v: &[u64]) -> Vec<u64> {
        let src = self.degree_basis(d);
        let tgt = self.degree_basis(d + self.algebra.generator_degree(i));
        self.act_with(i, &src, &tgt, v)
    }

    pub fn act_with(&self, i: usize, src: &DegreeBasis, tgt: &DegreeBasis, v: &[u64]) -> Vec<u64> {
        apply_poly_matrix(&self.actions[i], src, tgt, v, self.field())
    }

    /// Applies an element of `A` (homogeneous of degree `e`) to a vector of degree `d`.
    pub fn act_element(
        &self,
        a: &AlgElem,
        src: &DegreeBasis,
        tgt: &DegreeBasis,
        v: &[u64],
    ) -> Vec<u64> {
        let f = self.field();
        let n = self.rank();
        let pv = src.poly_vector(v, n, f);
        let mut out = vec![Poly::zero(); n];
        for (i, coeff) in a.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let img = mat_vec(&self.actions[i], &pv, f);
            for (o, p) in out.iter_mut().zip(img) {
                o.add_assign(&p.mul(coeff, f), f);
            }
        }
        tgt.vector_of(&out, f)
    }

    /// Multiplies a degree-`d` vector by a monomial of `R`.
    pub fn mul_monomial(
        &self,
        m: &Monomial,
        src: &DegreeBasis,
        tgt: &DegreeBasis,
        v: &[u64],
    ) -> Vec<u64> {
        let mut out = vec![0; tgt.len()];
        for (k, &c) in v.iter().enumerate() {
            if c != 0 {
                let (b, mm) = &src.entries[k];
                let pos = tgt
                    .position(*b, &mm.mul(m))
                    .expect("monomial shift stays in basis");
                out[pos] = c;
            }
        }
        out
    }
}

/// Basis `(j, i)` of `⊕_j A e_j` sorted by degree, and the degrees.
pub fn free_basis(algebra: &Algebra, gen_degrees: &[i64]) -> (Vec<(usize, usize)>, Vec<i64>) {
    let mut tagged: Vec<(i64, usize, usize)> = gen_degrees
        .iter()
        .enumerate()
        .flat_map(|(j, &b)| {
            (0..algebra.num_generators()).map(move |i| (b + algebra.generator_degree(i), j, i))
        })
        .collect();
    tagged.sort();
    (
        tagged.iter().map(|&(_, j, i)| (j, i)).collect(),
        tagged.iter().map(|t| t.0).collect(),
    )
}

pub fn mat_vec(m: &PolyMatrix, v: &[Poly], f: PrimeField) -> Vec<Poly> {
    (0..m.rows())
        .map(|i| {
            let mut acc = Poly::zero();
            for (j, x) in v.iter().enumerate() {
                let e = m.get(i, j);
                if !e.is_zero() && !x.is_zero() {
                    acc.add_assign(&e.mul(x, f), f);
                }
            }
            acc
        })
        .collect()
}

/// Applies a polynomial matrix to a vector given in degree-basis coordinates.
pub fn apply_poly_matrix(
    m: &PolyMatrix,
    src: &DegreeBasis,
    tgt: &DegreeBasis,
    v: &[u64],
    f: PrimeField,
) -> Vec<u64> {
    let pv = src.poly_vector(v, m.cols(), f);
    tgt.vector_of(&mat_vec(m, &pv, f), f)
}

/// The matrix of a polynomial matrix map between degree components.
pub fn degree_matrix(
    m: &PolyMatrix,
    src: &DegreeBasis,
    tgt: &DegreeBasis,
    f: PrimeField,
) -> Matrix {
    let mut out = Matrix::zeros(f, tgt.len(), src.len());
    for (k, (b, mono)) in src.entries.iter().enumerate() {
        for s in 0..m.rows() {
            for (mm, c) in m.get(s, *b).terms() {
                let pos = tgt
                    .position(s, &mm.mul(mono))
                    .expect("image term in target basis");
                out.set(pos, k, f.add(out.get(pos, k), c));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp() -> PrimeField {
        PrimeField::new(32003).unwrap()
    }

    fn nodal() -> Arc<Algebra> {
        Arc::new(Algebra::build(AlgebraInput::nodal(fp()), 8).unwrap())
    }

    fn t(e: u32) -> Poly {
        Poly::term(1, Monomial(vec![e]))
    }

    #[test]
    fn nodal_degree_dims() {
        let a = nodal();
        assert_eq!(a.degree_dim(0), 1);
        for d in 1..=8 {
            assert_eq!(a.degree_dim(d), 2);
        }
        assert_eq!(a.alpha(), 1);
        assert!(a.check_connected_finite().connected);
    }

    #[test]
    fn polynomial_ring_is_r() {
        let ring = WeightedPolyRing::new(vec![1, 2]).unwrap();
        let input = AlgebraInput::polynomial_ring(fp(), ring.clone(), vec!["s".into(), "u".into()]);
        let a = Algebra::build(input, 10).unwrap();
        for d in 0..10 {
            assert_eq!(a.degree_dim(d), ring.degree_dim(d));
        }
        assert_eq!(a.alpha(), 0);
    }

    #[test]
    fn rejects_inhomogeneous_constant() {
        let mut input = AlgebraInput::nodal(fp());
        input.structure_constants[1][1] = vec![Poly::constant(1, 1), Poly::zero()];
        let err = Algebra::build(input, 8).unwrap_err();
        assert!(err.to_string().contains("inhomogeneous structure constant"));
    }

    #[test]
    fn rejects_nonassociative() {
        let f = fp();
        let ring = WeightedPolyRing::new(vec![1]).unwrap();
        let one = Poly::constant(1, 1);
        let z = Poly::zero();
        let input = AlgebraInput {
            field: f,
            ring,
            ring_names: vec!["t".into()],
            generator_names: vec!["1".into(), "x".into(), "y".into()],
            generator_shifts: vec![0, -1, -1],
            structure_constants: vec![
                vec![
                    vec![one.clone(), z.clone(), z.clone()],
                    vec![z.clone(), one.clone(), z.clone()],
                    vec![z.clone(), z.clone(), one.clone()],
                ],
                vec![
                    vec![z.clone(), one.clone(), z.clone()],
                    vec![z.clone(), t(1), z.clone()],
                    vec![z.clone(), z.clone(), t(1)],
                ],
                vec![
                    vec![z.clone(), z.clone(), one.clone()],
                    vec![z.clone(), z.clone(), t(1)],
                    vec![z.clone(), z.clone(), z.clone()],
                ],
            ],
            commutative: false,
            isolated_singularity: false,
            relations: None,
        };
        // x·x = t·y, x·y = t·x, y·x = y·y = 0: (x·x)·x = 0 but x·(x·x) = t²x.
        let mut bad = input.clone();
        bad.structure_constants[1][1] = vec![z.clone(), z.clone(), t(1)];
        bad.structure_constants[1][2] = vec![z.clone(), t(1), z.clone()];
        bad.structure_constants[2][1] = vec![z.clone(), z.clone(), z.clone()];
        bad.structure_constants[2][2] = vec![z.clone(), z.clone(), z.clone()];
        assert!(Algebra::build(input, 6).is_ok());
        let err = Algebra::build(bad, 6).unwrap_err();
        assert!(err.to_string().contains("not associative"), "{err}");
    }

    #[test]
    fn nodal_rank_one_modules() {
        let a = nodal();
        let v = GradedDims::from_degrees(&[0]);
        let zero = PolyMatrix::from_entries(1, 1, vec![Poly::zero()]);
        let my = make_framed_module(&a, &v, vec![zero]).unwrap();
        assert_eq!(my.rank(), 1);
        let mx =
            make_framed_module(&a, &v, vec![PolyMatrix::from_entries(1, 1, vec![t(1)])]).unwrap();
        assert_eq!(mx.degrees(), &[0]);
        let two_t = t(1).scale(2, fp());
        let err = make_framed_module(&a, &v, vec![PolyMatrix::from_entries(1, 1, vec![two_t])])
            .unwrap_err();
        assert!(matches!(err, Error::NotAModule { .. }));
    }

    #[test]
    fn regular_module_is_valid_and_mult_table_matches() {
        let a = nodal();
        let reg = FramedModule::regular(&a);
        reg.validate().unwrap();
        assert_eq!(reg.degrees(), &[0, 1]);
        let tab = a.mult_table(1, 1).unwrap();
        assert_eq!((tab.rows(), tab.cols()), (2, 4));
        // x * x = t x: basis of A_1 is (1·t, x·1); x is column index 1 in A_1.
        let col = tab.column(3);
        let target = DegreeBasis::new(a.ring(), a.generator_degrees(), 2);
        let x_pos = target.position(1, &Monomial(vec![1])).unwrap();
        assert_eq!(col[x_pos], 1);
    }

    #[test]
    fn direct_sum_sorts_degrees() {
        let a = nodal();
        let reg = FramedModule::regular(&a);
        let s = reg.shift(-2).direct_sum(&reg);
        assert_eq!(s.degrees(), &[0, 1, 2, 3]);
        s.validate().unwrap();
    }

    #[test]
    fn canonical_order_is_permutation_invariant() {
        let f = fp();
        let ring = WeightedPolyRing::new(vec![1]).unwrap();
        let one = Poly::constant(1, 1);
        let z = Poly::zero();
        // k[t][u, v]/(u, v)^2 with u, v in degrees 1 and 2.
        let mut sc = vec![vec![vec![z.clone(); 3]; 3]; 3];
        for j in 0..3 {
            sc[0][j][j] = one.clone();
            sc[j][0][j] = one.clone();
        }
        let input = AlgebraInput {
            field: f,
            ring,
            ring_names: vec!["t".into()],
            generator_names: vec!["1".into(), "v".into(), "u".into()],
            generator_shifts: vec![0, -2, -1],
            structure_constants: sc,
            commutative: true,
            isolated_singularity: false,
            relations: None,
        };
        let c1 = input.canonicalize();
        let c2 = input.permuted(&[0, 2, 1]).canonicalize();
        assert_eq!(c1, c2);
        assert_eq!(c1.generator_names, vec!["1", "u", "v"]);
    }
}
