//! Graded bookkeeping: the weighted polynomial ring `R`, its homogeneous
//! polynomials, matrices over `R`, graded vector spaces, graded free
//! `R`-modules and Hilbert series.
//!
//! Degrees are signed throughout; shifted modules live in negative degrees.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::PrimeField;

/// Exponent vector of a monomial in `R`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize, e: u32) -> Self {
        let mut m = vec![0; nvars];
        m[i] = e;
        Monomial(m)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    /// `self / o` when `o` divides `self`.
    pub fn div(&self, o: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

/// Polynomial ring `k[t_1..t_n]` with positive integer weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedPolyRing {
    pub weights: Vec<i64>,
}

impl WeightedPolyRing {
    pub fn new(weights: Vec<i64>) -> Result<Self> {
        if weights.iter().any(|&w| w < 1) {
            return Err(Error::Input(format!(
                "ring weights must be positive, got {weights:?}"
            )));
        }
        Ok(WeightedPolyRing { weights })
    }

    pub fn num_vars(&self) -> usize {
        self.weights.len()
    }

    pub fn degree_of(&self, m: &Monomial) -> i64 {
        m.0.iter()
            .zip(&self.weights)
            .map(|(&e, &w)| e as i64 * w)
            .sum()
    }

    /// Number of monomials of weighted degree exactly `d`.
    pub fn degree_dim(&self, d: i64) -> usize {
        if d < 0 {
            return 0;
        }
        // dp over variables: ways[k] = number of monomials of degree k
        let d = d as usize;
        let mut ways = vec![0usize; d + 1];
        ways[0] = 1;
        for &w in &self.weights {
            let w = w as usize;
            for k in w..=d {
                ways[k] += ways[k - w];
            }
        }
        ways[d]
    }

    /// Monomials of degree `d`, lexicographically descending on exponents.
    pub fn monomial_basis(&self, d: i64) -> Vec<Monomial> {
        let mut out = Vec::new();
        if d < 0 {
            return out;
        }
        let mut cur = vec![0u32; self.num_vars()];
        self.enumerate(0, d, &mut cur, &mut out);
        out
    }

    fn enumerate(&self, var: usize, rem: i64, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        let n = self.num_vars();
        if var == n {
            if rem == 0 {
                out.push(Monomial(cur.clone()));
            }
            return;
        }
        let w = self.weights[var];
        if var == n - 1 {
            if rem % w == 0 {
                cur[var] = (rem / w) as u32;
                out.push(Monomial(cur.clone()));
                cur[var] = 0;
            }
            return;
        }
        for e in (0..=rem / w).rev() {
            cur[var] = e as u32;
            self.enumerate(var + 1, rem - e * w, cur, out);
        }
        cur[var] = 0;
    }
}

/// Sparse polynomial in `R` with coefficients in `F_p`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, u64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: u64, nvars: usize) -> Self {
        Poly::term(c, Monomial::one(nvars))
    }

    pub fn term(c: u64, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> u64 {
        *self.terms.get(m).unwrap_or(&0)
    }

    pub fn add_term(&mut self, m: Monomial, c: u64, f: PrimeField) {
        if c == 0 {
            return;
        }
        let e = self.terms.entry(m).or_insert(0);
        *e = f.add(*e, c);
        if *e == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn add(&self, o: &Poly, f: PrimeField) -> Poly {
        let mut r = self.clone();
        r.add_assign(o, f);
        r
    }

    pub fn add_assign(&mut self, o: &Poly, f: PrimeField) {
        for (m, c) in o.terms() {
            self.add_term(m.clone(), c, f);
        }
    }

    /// `self += c * m * o`
    pub fn add_scaled(&mut self, o: &Poly, c: u64, m: &Monomial, f: PrimeField) {
        if c == 0 {
            return;
        }
        for (om, oc) in o.terms() {
            self.add_term(om.mul(m), f.mul(c, oc), f);
        }
    }

    pub fn sub(&self, o: &Poly, f: PrimeField) -> Poly {
        let mut r = self.clone();
        for (m, c) in o.terms() {
            r.add_term(m.clone(), f.neg(c), f);
        }
        r
    }

    pub fn neg(&self, f: PrimeField) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| (m.clone(), f.neg(c)))
                .collect(),
        }
    }

    pub fn scale(&self, s: u64, f: PrimeField) -> Poly {
        if s == 0 {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| (m.clone(), f.mul(c, s)))
                .collect(),
        }
    }

    pub fn mul(&self, o: &Poly, f: PrimeField) -> Poly {
        let mut r = Poly::zero();
        for (m, c) in self.terms() {
            r.add_scaled(o, c, m, f);
        }
        r
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(k, &c)| (k.mul(m), c)).collect(),
        }
    }

    pub fn pow(&self, e: u32, nvars: usize, f: PrimeField) -> Poly {
        let mut r = Poly::constant(1, nvars);
        for _ in 0..e {
            r = r.mul(self, f);
        }
        r
    }

    /// The common degree of all terms, `None` for zero or inhomogeneous input.
    pub fn homogeneous_degree(&self, ring: &WeightedPolyRing) -> Option<i64> {
        let mut it = self.terms.keys().map(|m| ring.degree_of(m));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous_of(&self, ring: &WeightedPolyRing, d: i64) -> bool {
        self.terms.keys().all(|m| ring.degree_of(m) == d)
    }

    /// Evaluates every variable at the given point.
    pub fn eval(&self, point: &[u64], f: PrimeField) -> u64 {
        self.terms().fold(0, |acc, (m, c)| {
            let v =
                m.0.iter()
                    .zip(point)
                    .fold(c, |a, (&e, &x)| f.mul(a, f.pow(x, e as u64)));
            f.add(acc, v)
        })
    }

    /// Human-readable form using the given variable names, e.g. `3*t^2 - t*s`.
    pub fn display(&self, names: &[String], f: PrimeField, ring: &WeightedPolyRing) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by(|a, b| {
            ring.degree_of(b.0)
                .cmp(&ring.degree_of(a.0))
                .then(b.0.cmp(a.0))
        });
        let mut out = String::new();
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let c = f.to_signed(c);
            let mon: Vec<String> =
                m.0.iter()
                    .zip(names)
                    .filter(|(e, _)| **e > 0)
                    .map(|(&e, n)| {
                        if e == 1 {
                            n.clone()
                        } else {
                            format!("{n}^{e}")
                        }
                    })
                    .collect();
            let (sign, mag) = if c < 0 { ("-", -c) } else { ("+", c) };
            if i == 0 {
                if sign == "-" {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            match (mag, mon.is_empty()) {
                (_, true) => out.push_str(&mag.to_string()),
                (1, false) => out.push_str(&mon.join("*")),
                (_, false) => out.push_str(&format!("{mag}*{}", mon.join("*"))),
            }
        }
        out
    }
}

/// Matrix with entries in `R`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            entries: vec![Poly::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        let mut m = PolyMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Poly::constant(1, nvars));
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Poly>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        PolyMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Poly {
        &mut self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn mul(&self, o: &PolyMatrix, f: PrimeField) -> PolyMatrix {
        assert_eq!(self.cols, o.rows, "polynomial matrix shapes do not compose");
        let mut out = PolyMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let prod = a.mul(b, f);
                        out.get_mut(i, j).add_assign(&prod, f);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, o: &PolyMatrix, f: PrimeField) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let entries = self
            .entries
            .iter()
            .zip(&o.entries)
            .map(|(a, b)| a.add(b, f))
            .collect();
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn sub(&self, o: &PolyMatrix, f: PrimeField) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let entries = self
            .entries
            .iter()
            .zip(&o.entries)
            .map(|(a, b)| a.sub(b, f))
            .collect();
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn scale_poly(&self, p: &Poly, f: PrimeField) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a.mul(p, f)).collect(),
        }
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut t = PolyMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, o: &PolyMatrix) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(self.rows + o.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..o.rows {
            for j in 0..o.cols {
                out.set(self.rows + i, self.cols + j, o.get(i, j).clone());
            }
        }
        out
    }

    /// Checks that entry `(i, j)` is homogeneous of degree
    /// `col_deg[j] + shift - row_deg[i]` (zero entries always pass).
    /// Returns the first offending position.
    pub fn check_degrees(
        &self,
        ring: &WeightedPolyRing,
        row_deg: &[i64],
        col_deg: &[i64],
        shift: i64,
    ) -> std::result::Result<(), (usize, usize)> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j);
                if !e.is_homogeneous_of(ring, col_deg[j] + shift - row_deg[i]) {
                    return Err((i, j));
                }
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }
}

/// Finitely supported graded dimension vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradedDims {
    pub dims: BTreeMap<i64, usize>,
}

impl GradedDims {
    pub fn from_degrees(degrees: &[i64]) -> Self {
        let mut dims = BTreeMap::new();
        for &d in degrees {
            *dims.entry(d).or_insert(0) += 1;
        }
        GradedDims { dims }
    }

    /// Sorted list of basis degrees, one entry per basis vector.
    pub fn degrees(&self) -> Vec<i64> {
        self.dims
            .iter()
            .flat_map(|(&d, &n)| std::iter::repeat_n(d, n))
            .collect()
    }

    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn dim(&self, d: i64) -> usize {
        *self.dims.get(&d).unwrap_or(&0)
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.dims.iter().find(|(_, &n)| n > 0).map(|(&d, _)| d)
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.dims
            .iter()
            .rev()
            .find(|(_, &n)| n > 0)
            .map(|(&d, _)| d)
    }

    pub fn shifted(&self, by: i64) -> GradedDims {
        GradedDims {
            dims: self.dims.iter().map(|(&d, &n)| (d + by, n)).collect(),
        }
    }
}

/// `⊕_i R(a_i)`; the summand `R(a)` has its generator in degree `-a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedFreeModule {
    pub ring: WeightedPolyRing,
    pub shifts: Vec<i64>,
}

impl GradedFreeModule {
    pub fn degree_dim(&self, d: i64) -> usize {
        self.shifts
            .iter()
            .map(|&a| self.ring.degree_dim(d + a))
            .sum()
    }

    /// Basis of the degree-`d` component as `(summand, monomial)` pairs.
    pub fn degree_basis(&self, d: i64) -> Vec<(usize, Monomial)> {
        self.shifts
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| {
                self.ring
                    .monomial_basis(d + a)
                    .into_iter()
                    .map(move |m| (i, m))
            })
            .collect()
    }
}

/// `Σ_d numerator[d] t^d / Π_j (1 - t^{w_j})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertSeries {
    pub numerator: BTreeMap<i64, i64>,
    pub denominator_weights: Vec<i64>,
}

impl HilbertSeries {
    pub fn of(v: &GradedDims, ring: &WeightedPolyRing) -> Self {
        let numerator = v
            .dims
            .iter()
            .filter(|(_, &n)| n > 0)
            .map(|(&d, &n)| (d, n as i64))
            .collect();
        HilbertSeries {
            numerator,
            denominator_weights: ring.weights.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.values().all(|&c| c == 0)
    }

    /// Coefficient of `t^d` in the expansion.
    pub fn coefficient(&self, d: i64) -> i64 {
        let ring = WeightedPolyRing {
            weights: self.denominator_weights.clone(),
        };
        self.numerator
            .iter()
            .map(|(&e, &c)| c * ring.degree_dim(d - e) as i64)
            .sum()
    }

    pub fn numerator_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .numerator
            .iter()
            .filter(|(_, &c)| c != 0)
            .map(|(&d, &c)| match d {
                0 => format!("{c}"),
                1 => format!("{c}*t"),
                _ => format!("{c}*t^{d}"),
            })
            .collect();
        parts.join(" + ")
    }
}

impl std::fmt::Display for HilbertSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let den: Vec<String> = self
            .denominator_weights
            .iter()
            .map(|&w| {
                if w == 1 {
                    "(1-t)".to_string()
                } else {
                    format!("(1-t^{w})")
                }
            })
            .collect();
        write!(f, "({})/{}", self.numerator_string(), den.join(""))
    }
}
