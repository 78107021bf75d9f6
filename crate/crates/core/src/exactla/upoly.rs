//! Dense univariate polynomials over `F_p`, just enough to split minimal
//! polynomials into coprime factors (squarefree part, distinct-degree and
//! equal-degree factorization).

use rand::Rng;

use super::PrimeField;

/// Coefficients from the constant term upward; never has trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly(pub Vec<u64>);

impl UPoly {
    pub fn new(mut c: Vec<u64>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn one() -> Self {
        UPoly(vec![1])
    }

    /// The polynomial `z`.
    pub fn var() -> Self {
        UPoly(vec![0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> u64 {
        *self.0.last().unwrap_or(&0)
    }

    pub fn add(&self, o: &UPoly, f: PrimeField) -> UPoly {
        let n = self.0.len().max(o.0.len());
        let c = (0..n)
            .map(|i| f.add(*self.0.get(i).unwrap_or(&0), *o.0.get(i).unwrap_or(&0)))
            .collect();
        UPoly::new(c)
    }

    pub fn sub(&self, o: &UPoly, f: PrimeField) -> UPoly {
        let n = self.0.len().max(o.0.len());
        let c = (0..n)
            .map(|i| f.sub(*self.0.get(i).unwrap_or(&0), *o.0.get(i).unwrap_or(&0)))
            .collect();
        UPoly::new(c)
    }

    pub fn mul(&self, o: &UPoly, f: PrimeField) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![0; self.0.len() + o.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.0.iter().enumerate() {
                c[i + j] = f.add(c[i + j], f.mul(a, b));
            }
        }
        UPoly::new(c)
    }

    pub fn scale(&self, s: u64, f: PrimeField) -> UPoly {
        UPoly::new(self.0.iter().map(|&a| f.mul(a, s)).collect())
    }

    pub fn monic(&self, f: PrimeField) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        self.scale(f.inv(self.lead()), f)
    }

    pub fn divrem(&self, d: &UPoly, f: PrimeField) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.0.len() - 1;
        let inv = f.inv(d.lead());
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut q = vec![0; r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = f.mul(r[k + dd], inv);
            q[k] = c;
            if c != 0 {
                for (j, &b) in d.0.iter().enumerate() {
                    r[k + j] = f.sub(r[k + j], f.mul(c, b));
                }
            }
        }
        r.truncate(dd);
        (UPoly::new(q), UPoly::new(r))
    }

    pub fn rem(&self, d: &UPoly, f: PrimeField) -> UPoly {
        self.divrem(d, f).1
    }

    pub fn gcd(&self, o: &UPoly, f: PrimeField) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// Returns `(g, u, v)` with `u*self + v*o = g`, `g` monic.
    pub fn ext_gcd(&self, o: &UPoly, f: PrimeField) -> (UPoly, UPoly, UPoly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (UPoly::one(), UPoly::zero());
        let (mut t0, mut t1) = (UPoly::zero(), UPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1, f);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1, f), f);
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1, f), f);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = f.inv(r0.lead());
        (r0.scale(inv, f), s0.scale(inv, f), t0.scale(inv, f))
    }

    pub fn derivative(&self, f: PrimeField) -> UPoly {
        UPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| f.mul(a, i as u64 % f.p()))
                .collect(),
        )
    }

    /// `self^e mod m`.
    pub fn powmod(&self, mut e: u64, m: &UPoly, f: PrimeField) -> UPoly {
        let mut base = self.rem(m, f);
        let mut acc = UPoly::one().rem(m, f);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, f).rem(m, f);
            }
            base = base.mul(&base, f).rem(m, f);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, x: u64, f: PrimeField) -> u64 {
        self.0
            .iter()
            .rev()
            .fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }
}

/// Finds a nontrivial factorization `poly = g * h` with `gcd(g, h) = 1`,
/// or `None` when `poly` is a power of a single irreducible.
///
/// Requires `deg poly < p` so that the squarefree part is computed
/// correctly from the derivative.
pub fn coprime_split<R: Rng>(poly: &UPoly, f: PrimeField, rng: &mut R) -> Option<(UPoly, UPoly)> {
    let poly = poly.monic(f);
    let n = poly.degree()?;
    if n < 2 {
        return None;
    }
    let g = poly.gcd(&poly.derivative(f), f);
    let sqfree = poly.divrem(&g, f).0.monic(f);
    let factor = split_squarefree(&sqfree, f, rng)?;
    // Collect every power of the factor's primes out of `poly`.
    let mut rest = poly.clone();
    loop {
        let c = rest.gcd(&factor, f);
        if c.degree() == Some(0) {
            break;
        }
        rest = rest.divrem(&c, f).0;
    }
    let part = poly.divrem(&rest, f).0;
    if part.degree() == Some(0) || rest.degree() == Some(0) {
        return None;
    }
    Some((part.monic(f), rest.monic(f)))
}

/// A proper nontrivial factor of a squarefree monic polynomial.
fn split_squarefree<R: Rng>(s: &UPoly, f: PrimeField, rng: &mut R) -> Option<UPoly> {
    let n = s.degree()?;
    if n < 2 {
        return None;
    }
    let x = UPoly::var();
    let mut frob = x.clone();
    for d in 1..=n {
        frob = frob.powmod(f.p(), s, f);
        let g = s.gcd(&frob.sub(&x, f), f);
        let gd = g.degree().unwrap_or(0);
        if gd == 0 {
            continue;
        }
        if gd < n {
            return Some(g);
        }
        // All irreducible factors have degree d; `s` is irreducible iff d == n.
        if d == n {
            return None;
        }
        return equal_degree_split(s, d, f, rng);
    }
    None
}

/// Cantor-Zassenhaus splitting of a product of distinct irreducibles of degree `d`.
fn equal_degree_split<R: Rng>(s: &UPoly, d: usize, f: PrimeField, rng: &mut R) -> Option<UPoly> {
    let n = s.degree()?;
    for _ in 0..64 {
        let r = UPoly::new((0..n).map(|_| rng.random_range(0..f.p())).collect());
        if r.degree().unwrap_or(0) == 0 {
            continue;
        }
        let g = s.gcd(&r, f);
        if g.degree().is_some_and(|k| k > 0 && k < n) {
            return Some(g);
        }
        // r^((p^d - 1)/2) = (r^(1 + p + ... + p^(d-1)))^((p-1)/2)
        let mut norm = r.rem(s, f);
        let mut conj = norm.clone();
        for _ in 1..d {
            conj = conj.powmod(f.p(), s, f);
            norm = norm.mul(&conj, f).rem(s, f);
        }
        let h = norm.powmod((f.p() - 1) / 2, s, f).sub(&UPoly::one(), f);
        let g = s.gcd(&h, f);
        if g.degree().is_some_and(|k| k > 0 && k < n) {
            return Some(g);
        }
    }
    None
}
