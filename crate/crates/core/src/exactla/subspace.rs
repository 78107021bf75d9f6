use super::{axpy, PrimeField};

/// A subspace of `F_p^n` kept as fully reduced echelon rows.
///
/// `reduce` returns the canonical representative of a vector modulo the
/// subspace: the representative has zeros in every pivot column.
#[derive(Clone, Debug)]
pub struct Subspace {
    field: PrimeField,
    ambient: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(field: PrimeField, ambient: usize) -> Self {
        Subspace {
            field,
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn spanned_by<'a>(
        field: PrimeField,
        ambient: usize,
        vectors: impl IntoIterator<Item = &'a Vec<u64>>,
    ) -> Self {
        let mut s = Subspace::new(field, ambient);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Echelon basis (rows are reduced against each other).
    pub fn basis(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let f = self.field;
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = w[p];
            if c != 0 {
                axpy(f, &mut w, f.neg(c), row);
            }
        }
        w
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let f = self.field;
        let mut w = self.reduce(v);
        let Some(p) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(w[p]);
        for x in w.iter_mut() {
            *x = f.mul(*x, inv);
        }
        for row in self.rows.iter_mut() {
            let c = row[p];
            if c != 0 {
                axpy(f, row, f.neg(c), &w);
            }
        }
        let pos = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(pos, p);
        self.rows.insert(pos, w);
        true
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    pub fn equals(&self, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.is_subspace_of(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_and_reduce() {
        let f = PrimeField::new(7).unwrap();
        let mut s = Subspace::new(f, 3);
        assert!(s.insert(&[1, 2, 0]));
        assert!(!s.insert(&[2, 4, 0]));
        assert!(s.insert(&[0, 1, 1]));
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&[1, 3, 1]));
        assert!(!s.contains(&[0, 0, 1]));
        let r = s.reduce(&[0, 0, 1]);
        for &p in s.pivots() {
            assert_eq!(r[p], 0);
        }
    }
}
