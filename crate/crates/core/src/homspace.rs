//! Coordinates on `Hom_R(V ⊗ R, W ⊗ R)_d`: one coordinate per matrix slot
//! and monomial of the slot degree. Linear conditions on such maps are
//! assembled by pushing unit vectors through a closure.

use std::collections::HashMap;

use crate::exactla::{Matrix, PrimeField};
use crate::gradedcore::{Monomial, Poly, PolyMatrix, WeightedPolyRing};

#[derive(Clone, Debug)]
pub struct HomSpace {
    src: Vec<i64>,
    tgt: Vec<i64>,
    degree: i64,
    nvars: usize,
    coords: Vec<(usize, usize, Monomial)>,
    index: HashMap<(usize, usize, Monomial), usize>,
}

impl HomSpace {
    /// Slot `(s, r)` carries polynomials of degree `src[r] + degree - tgt[s]`.
    /// Coordinates run over rows, then columns, then the monomial basis.
    pub fn new(ring: &WeightedPolyRing, src: &[i64], tgt: &[i64], degree: i64) -> Self {
        let mut coords = Vec::new();
        for (s, &ts) in tgt.iter().enumerate() {
            for (r, &sr) in src.iter().enumerate() {
                for m in ring.monomial_basis(sr + degree - ts) {
                    coords.push((s, r, m));
                }
            }
        }
        let index = coords
            .iter()
            .cloned()
            .enumerate()
            .map(|(k, c)| (c, k))
            .collect();
        HomSpace {
            src: src.to_vec(),
            tgt: tgt.to_vec(),
            degree,
            nvars: ring.num_vars(),
            coords,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn source(&self) -> &[i64] {
        &self.src
    }

    pub fn target(&self) -> &[i64] {
        &self.tgt
    }

    pub fn coords(&self) -> &[(usize, usize, Monomial)] {
        &self.coords
    }

    pub fn position(&self, s: usize, r: usize, m: &Monomial) -> Option<usize> {
        self.index.get(&(s, r, m.clone())).copied()
    }

    pub fn matrix_of(&self, v: &[u64], f: PrimeField) -> PolyMatrix {
        let mut m = PolyMatrix::zeros(self.tgt.len(), self.src.len());
        for (k, &c) in v.iter().enumerate() {
            if c != 0 {
                let (s, r, mono) = &self.coords[k];
                m.get_mut(*s, *r).add_term(mono.clone(), c, f);
            }
        }
        m
    }

    pub fn unit_matrix(&self, k: usize) -> PolyMatrix {
        let mut m = PolyMatrix::zeros(self.tgt.len(), self.src.len());
        let (s, r, mono) = &self.coords[k];
        m.set(*s, *r, Poly::term(1, mono.clone()));
        m
    }

    /// Coordinates of a matrix, or `None` if it has a term outside the space.
    pub fn coords_of(&self, m: &PolyMatrix) -> Option<Vec<u64>> {
        if m.rows() != self.tgt.len() || m.cols() != self.src.len() {
            return None;
        }
        let mut v = vec![0; self.dim()];
        for s in 0..m.rows() {
            for r in 0..m.cols() {
                for (mono, c) in m.get(s, r).terms() {
                    v[self.position(s, r, mono)?] = c;
                }
            }
        }
        Some(v)
    }

    /// The identity map, when source and target framings agree and `degree = 0`.
    pub fn identity_coords(&self) -> Option<Vec<u64>> {
        if self.src != self.tgt || self.degree != 0 {
            return None;
        }
        self.coords_of(&PolyMatrix::identity(self.src.len(), self.nvars))
    }

    /// Matrix of the linear map `φ ↦ (g_1(φ), …, g_k(φ))` whose images lie in
    /// the given target spaces; columns are images of coordinate unit vectors.
    pub fn linear_map<F>(&self, targets: &[HomSpace], f: PrimeField, map: F) -> Matrix
    where
        F: Fn(&PolyMatrix) -> Vec<PolyMatrix>,
    {
        let rows: usize = targets.iter().map(HomSpace::dim).sum();
        let mut out = Matrix::zeros(f, rows, self.dim());
        for k in 0..self.dim() {
            let imgs = map(&self.unit_matrix(k));
            let mut off = 0;
            for (img, t) in imgs.iter().zip(targets) {
                let v = t.coords_of(img).expect("image lands in target hom space");
                for (i, c) in v.into_iter().enumerate() {
                    if c != 0 {
                        out.set(off + i, k, c);
                    }
                }
                off += t.dim();
            }
        }
        out
    }
}

/// Degree-0 inverse of an invertible degree-0 map between framings, found by
/// solving `h·g = id` linearly.
pub fn degree_zero_inverse(
    ring: &WeightedPolyRing,
    g: &PolyMatrix,
    src: &[i64],
    tgt: &[i64],
    f: PrimeField,
) -> Option<PolyMatrix> {
    if src.len() != tgt.len() {
        return None;
    }
    let inv_space = HomSpace::new(ring, tgt, src, 0);
    let id_space = HomSpace::new(ring, src, src, 0);
    let sys = inv_space.linear_map(std::slice::from_ref(&id_space), f, |h| vec![h.mul(g, f)]);
    let rhs = id_space.identity_coords()?;
    let sol = sys.solve(&rhs)?;
    let h = inv_space.matrix_of(&sol, f);
    let check = g.mul(&h, f);
    (check == PolyMatrix::identity(tgt.len(), ring.num_vars())).then_some(h)
}

/// Whether a degree-0 map between framings with equal degree multisets is
/// invertible: its same-degree constant blocks must all be invertible.
pub fn is_degree_zero_invertible(g: &PolyMatrix, src: &[i64], tgt: &[i64], f: PrimeField) -> bool {
    if src.len() != tgt.len() {
        return false;
    }
    let mut degs: Vec<i64> = src.to_vec();
    degs.dedup();
    for d in degs {
        let cols: Vec<usize> = (0..src.len()).filter(|&r| src[r] == d).collect();
        let rows: Vec<usize> = (0..tgt.len()).filter(|&s| tgt[s] == d).collect();
        if rows.len() != cols.len() {
            return false;
        }
        let n = rows.len();
        let mut m = Matrix::zeros(f, n, n);
        for (i, &s) in rows.iter().enumerate() {
            for (j, &r) in cols.iter().enumerate() {
                let p = g.get(s, r);
                let c = p
                    .terms()
                    .find(|(mono, _)| mono.is_one())
                    .map(|(_, c)| c)
                    .unwrap_or(0);
                m.set(i, j, c);
            }
        }
        if m.rank() < n {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_degrees() {
        let ring = WeightedPolyRing::new(vec![1]).unwrap();
        // V = k_0 ⊕ k_1, maps of degree 1: slots t, t, t², 1.
        let h = HomSpace::new(&ring, &[0, 1], &[0, 1], 1);
        assert_eq!(h.dim(), 4);
        let g = HomSpace::new(&ring, &[0, 1], &[0, 1], 0);
        assert_eq!(g.dim(), 3);
        assert!(g.identity_coords().is_some());
    }

    #[test]
    fn unipotent_inverse() {
        let f = PrimeField::new(101).unwrap();
        let ring = WeightedPolyRing::new(vec![1]).unwrap();
        let t = Poly::term(3, Monomial(vec![1]));
        let one = Poly::constant(1, 1);
        let g = PolyMatrix::from_entries(2, 2, vec![one.clone(), t, Poly::zero(), one]);
        assert!(is_degree_zero_invertible(&g, &[0, 1], &[0, 1], f));
        let h = degree_zero_inverse(&ring, &g, &[0, 1], &[0, 1], f).unwrap();
        assert_eq!(h.mul(&g, f), PolyMatrix::identity(2, 1));
    }
}
