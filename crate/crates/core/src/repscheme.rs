//! The affine coordinate space of candidate actions on `V ⊗ R` and the
//! quadratic system cutting out `Rep_R(A, V)`.
//!
//! The unit generator is fixed to the identity and carries no coordinates,
//! so there are no unit equations; `U_{ij}` equations come from
//! multiplicativity and `W_k` from an explicit relation presentation.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::algdata::{Algebra, FramedModule};
use crate::error::{Error, Result};
use crate::exactla::{Matrix, PrimeField};
use crate::gradedcore::{GradedDims, Monomial, PolyMatrix, WeightedPolyRing};
use crate::homspace::HomSpace;

/// One coordinate: the coefficient of `monomial` in slot `(row, col)` of the
/// action matrix of generator `generator`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoordDescriptor {
    pub generator: usize,
    pub row: usize,
    pub col: usize,
    pub source_degree: i64,
    pub target_degree: i64,
    pub monomial: Monomial,
}

#[derive(Clone, Debug)]
pub struct CoordinateSpace {
    degrees: Vec<i64>,
    blocks: Vec<HomSpace>,
    offsets: Vec<usize>,
    descriptors: Vec<CoordDescriptor>,
}

impl CoordinateSpace {
    pub fn new(algebra: &Algebra, framing: &GradedDims) -> Self {
        let degrees = framing.degrees();
        let mut blocks = Vec::new();
        let mut offsets = Vec::new();
        let mut descriptors = Vec::new();
        let mut off = 0;
        for i in 1..algebra.num_generators() {
            let h = HomSpace::new(
                algebra.ring(),
                &degrees,
                &degrees,
                algebra.generator_degree(i),
            );
            for (s, r, m) in h.coords() {
                descriptors.push(CoordDescriptor {
                    generator: i,
                    row: *s,
                    col: *r,
                    source_degree: degrees[*r],
                    target_degree: degrees[*s],
                    monomial: m.clone(),
                });
            }
            offsets.push(off);
            off += h.dim();
            blocks.push(h);
        }
        CoordinateSpace {
            degrees,
            blocks,
            offsets,
            descriptors,
        }
    }

    pub fn total_dim(&self) -> usize {
        self.descriptors.len()
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn descriptors(&self) -> &[CoordDescriptor] {
        &self.descriptors
    }

    /// Hom space of the action of generator `i ≥ 1`.
    pub fn block(&self, i: usize) -> &HomSpace {
        &self.blocks[i - 1]
    }

    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i - 1]
    }

    /// Coordinates of a module's actions.
    pub fn point_of(&self, m: &FramedModule) -> Result<Vec<u64>> {
        if m.degrees() != self.degrees.as_slice() {
            return Err(Error::FramingMismatch(format!(
                "module framing {:?} differs from system framing {:?}",
                m.degrees(),
                self.degrees
            )));
        }
        let mut v = Vec::with_capacity(self.total_dim());
        for (k, h) in self.blocks.iter().enumerate() {
            let c = h
                .coords_of(m.action(k + 1))
                .ok_or_else(|| Error::Input("action entry outside its homogeneous slot".into()))?;
            v.extend(c);
        }
        Ok(v)
    }

    /// Action matrices encoded by a coordinate vector.
    pub fn actions_of(&self, v: &[u64], f: PrimeField) -> Vec<PolyMatrix> {
        self.blocks
            .iter()
            .zip(&self.offsets)
            .map(|(h, &o)| h.matrix_of(&v[o..o + h.dim()], f))
            .collect()
    }
}

/// Sorted coordinate indices; length 0, 1 or 2.
pub type CoordMonomial = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(into = "String")]
pub enum EquationLabel {
    W(usize),
    U(usize, usize),
}

impl fmt::Display for EquationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquationLabel::W(k) => write!(f, "W_{}", k + 1),
            EquationLabel::U(i, j) => write!(f, "U_{{{i},{j}}}"),
        }
    }
}

impl From<EquationLabel> for String {
    fn from(l: EquationLabel) -> String {
        l.to_string()
    }
}

/// The coefficient of `monomial` in slot `(row, col)` of a relation, as a
/// polynomial of degree ≤ 2 in the coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct Equation {
    pub label: EquationLabel,
    pub row: usize,
    pub col: usize,
    pub monomial: Monomial,
    pub terms: Vec<(CoordMonomial, u64)>,
}

impl Equation {
    pub fn evaluate(&self, x: &[u64], f: PrimeField) -> u64 {
        self.terms.iter().fold(0, |acc, (m, c)| {
            let v = m.iter().fold(*c, |p, &i| f.mul(p, x[i]));
            f.add(acc, v)
        })
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(m, _)| m.len()).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct EquationSystem {
    pub coords: CoordinateSpace,
    pub equations: Vec<Equation>,
    field: PrimeField,
}

/// Symbolic entry of an action matrix: R-monomial → linear form in coordinates.
type SymEntry = BTreeMap<Monomial, BTreeMap<CoordMonomial, u64>>;

fn add_sym(acc: &mut SymEntry, m: Monomial, var: CoordMonomial, c: u64, f: PrimeField) {
    let slot = acc.entry(m).or_default();
    let e = slot.entry(var).or_insert(0);
    *e = f.add(*e, c);
}

/// Entries of each action as linear forms (`generator 0` is the constant identity).
fn symbolic_actions(algebra: &Algebra, cs: &CoordinateSpace) -> Vec<Vec<Vec<SymEntry>>> {
    let n = cs.degrees().len();
    let f = algebra.field();
    let mut out = Vec::with_capacity(algebra.num_generators());
    let mut id = vec![vec![SymEntry::new(); n]; n];
    for (s, row) in id.iter_mut().enumerate() {
        add_sym(&mut row[s], Monomial::one(algebra.nvars()), vec![], 1, f);
    }
    out.push(id);
    for i in 1..algebra.num_generators() {
        let mut a = vec![vec![SymEntry::new(); n]; n];
        let off = cs.offset(i);
        for (k, (s, r, m)) in cs.block(i).coords().iter().enumerate() {
            add_sym(&mut a[*s][*r], m.clone(), vec![off + k], 1, f);
        }
        out.push(a);
    }
    out
}

fn sym_mul(a: &SymEntry, b: &SymEntry, acc: &mut SymEntry, f: PrimeField) {
    for (ma, la) in a {
        for (mb, lb) in b {
            let m = ma.mul(mb);
            for (va, ca) in la {
                for (vb, cb) in lb {
                    let mut v: CoordMonomial = va.iter().chain(vb).copied().collect();
                    v.sort_unstable();
                    add_sym(acc, m.clone(), v, f.mul(*ca, *cb), f);
                }
            }
        }
    }
}

fn sym_scale_poly(
    a: &SymEntry,
    p: &crate::gradedcore::Poly,
    c: u64,
    acc: &mut SymEntry,
    f: PrimeField,
) {
    for (mp, cp) in p.terms() {
        for (ma, la) in a {
            let m = ma.mul(mp);
            for (v, ca) in la {
                add_sym(acc, m.clone(), v.clone(), f.mul(c, f.mul(cp, *ca)), f);
            }
        }
    }
}

fn push_equations(
    out: &mut Vec<Equation>,
    label: EquationLabel,
    entries: Vec<Vec<SymEntry>>,
    ring: &WeightedPolyRing,
    slot_degree: impl Fn(usize, usize) -> i64,
) {
    for (s, row) in entries.into_iter().enumerate() {
        for (r, entry) in row.into_iter().enumerate() {
            for m in ring.monomial_basis(slot_degree(s, r)) {
                let Some(lin) = entry.get(&m) else { continue };
                let terms: Vec<(CoordMonomial, u64)> = lin
                    .iter()
                    .filter(|(_, &c)| c != 0)
                    .map(|(v, &c)| (v.clone(), c))
                    .collect();
                if !terms.is_empty() {
                    out.push(Equation {
                        label: label.clone(),
                        row: s,
                        col: r,
                        monomial: m,
                        terms,
                    });
                }
            }
        }
    }
}

impl EquationSystem {
    pub fn generate(algebra: &Algebra, framing: &GradedDims) -> Self {
        let f = algebra.field();
        let cs = CoordinateSpace::new(algebra, framing);
        let g = algebra.num_generators();
        let n = cs.degrees().len();
        let degs = cs.degrees().to_vec();
        let sym = symbolic_actions(algebra, &cs);
        let mut equations = Vec::new();
        for i in 1..g {
            for j in 1..g {
                let mut rel = vec![vec![SymEntry::new(); n]; n];
                for s in 0..n {
                    for r in 0..n {
                        for k in 0..n {
                            sym_mul(&sym[i][s][k], &sym[j][k][r], &mut rel[s][r], f);
                        }
                        for (l, act) in sym.iter().enumerate() {
                            let c = algebra.structure_constant(i, j, l);
                            if !c.is_zero() {
                                sym_scale_poly(&act[s][r], c, f.neg(1), &mut rel[s][r], f);
                            }
                        }
                    }
                }
                let e = algebra.generator_degree(i) + algebra.generator_degree(j);
                push_equations(
                    &mut equations,
                    EquationLabel::U(i, j),
                    rel,
                    algebra.ring(),
                    |s, r| degs[r] + e - degs[s],
                );
            }
        }
        if let Some(relp) = &algebra.input().relations {
            for (k, col) in relp.columns.iter().enumerate() {
                let mut rel = vec![vec![SymEntry::new(); n]; n];
                for s in 0..n {
                    for r in 0..n {
                        for (l, c) in col.iter().enumerate() {
                            if !c.is_zero() {
                                sym_scale_poly(&sym[l][s][r], c, 1, &mut rel[s][r], f);
                            }
                        }
                    }
                }
                let e = -relp.shifts[k];
                push_equations(
                    &mut equations,
                    EquationLabel::W(k),
                    rel,
                    algebra.ring(),
                    |s, r| degs[r] + e - degs[s],
                );
            }
        }
        EquationSystem {
            coords: cs,
            equations,
            field: f,
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn num_equations(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn evaluate_at(&self, x: &[u64]) -> Vec<u64> {
        self.equations
            .iter()
            .map(|e| e.evaluate(x, self.field))
            .collect()
    }

    pub fn evaluate_point(&self, m: &FramedModule) -> Result<ResidualReport> {
        let x = self.coords.point_of(m)?;
        let residuals = self.evaluate_at(&x);
        let nonzero = residuals.iter().filter(|&&r| r != 0).count();
        let first_failure = residuals
            .iter()
            .position(|&r| r != 0)
            .map(|k| self.equations[k].label.to_string());
        Ok(ResidualReport {
            residuals,
            nonzero,
            on_variety: nonzero == 0,
            first_failure,
        })
    }

    /// Partial derivatives of every equation at `x`.
    pub fn jacobian(&self, x: &[u64]) -> Matrix {
        let f = self.field;
        let mut j = Matrix::zeros(f, self.equations.len(), self.coords.total_dim());
        for (row, e) in self.equations.iter().enumerate() {
            for (m, c) in &e.terms {
                match m.as_slice() {
                    [] => {}
                    [a] => j.set(row, *a, f.add(j.get(row, *a), *c)),
                    [a, b] => {
                        j.set(row, *a, f.add(j.get(row, *a), f.mul(*c, x[*b])));
                        j.set(row, *b, f.add(j.get(row, *b), f.mul(*c, x[*a])));
                    }
                    _ => unreachable!("equations have degree at most 2"),
                }
            }
        }
        j
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub residuals: Vec<u64>,
    pub nonzero: usize,
    pub on_variety: bool,
    pub first_failure: Option<String>,
}

/// Dimension data of `G_V`, the degree-0 automorphisms of `V ⊗ R`.
#[derive(Clone, Debug, Serialize)]
pub struct GroupInfo {
    pub framing: GradedDims,
    pub lie_algebra_dim: usize,
    pub reductive_part_dims: Vec<usize>,
    pub unipotent_dim: usize,
    #[serde(skip)]
    pub lie_algebra: HomSpace,
}

pub fn group_info(framing: &GradedDims, ring: &WeightedPolyRing) -> GroupInfo {
    let degs: Vec<i64> = framing.dims.keys().copied().collect();
    let reductive: Vec<usize> = degs.iter().map(|&d| framing.dim(d).pow(2)).collect();
    let mut unipotent = 0;
    for &i in &degs {
        for &j in &degs {
            if i > j {
                unipotent += framing.dim(i) * framing.dim(j) * ring.degree_dim(i - j);
            }
        }
    }
    let all = framing.degrees();
    let lie = HomSpace::new(ring, &all, &all, 0);
    GroupInfo {
        framing: framing.clone(),
        lie_algebra_dim: reductive.iter().sum::<usize>() + unipotent,
        reductive_part_dims: reductive,
        unipotent_dim: unipotent,
        lie_algebra: lie,
    }
}
