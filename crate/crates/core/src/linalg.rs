//! Exact subspaces of `kⁿ` kept in reduced row echelon form.
//!
//! Reduced echelon form is unique, so two `Subspace`s are equal exactly when
//! they span the same space.

use serde::Serialize;

use crate::coeffs::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Subspace {
    ambient: usize,
    /// Rows sorted by pivot column; each pivot entry is 1 and its column is
    /// zero in every other row.
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
    #[serde(skip)]
    field: Field,
}

impl Subspace {
    pub fn zero(field: Field, ambient: usize) -> Self {
        Subspace { ambient, rows: Vec::new(), pivots: Vec::new(), field }
    }

    pub fn full(field: Field, ambient: usize) -> Self {
        let rows = (0..ambient)
            .map(|i| (0..ambient).map(|j| if i == j { field.one() } else { field.zero() }).collect())
            .collect();
        Subspace { ambient, rows, pivots: (0..ambient).collect(), field }
    }

    pub fn span<I>(field: Field, ambient: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = Vec<Scalar>>,
    {
        let mut s = Self::zero(field, ambient);
        for v in vectors {
            s.insert(v);
            if s.rank() == ambient {
                break;
            }
        }
        s
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Remainder of `v` after elimination against the pivot rows. Zero iff
    /// `v` lies in the subspace; otherwise a canonical coset representative
    /// supported on non-pivot columns.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.ambient, "ambient dimension mismatch");
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let c = w[p].clone();
            for (wj, rj) in w.iter_mut().zip(row).skip(p) {
                if !rj.is_zero() {
                    *wj = &*wj - &(&c * rj);
                }
            }
        }
        w
    }

    pub fn contains_vector(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(Scalar::is_zero)
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|r| self.contains_vector(r))
    }

    /// Adds `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: Vec<Scalar>) -> bool {
        let mut w = self.reduce(&v);
        let Some(p) = w.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let inv = w[p].inv().expect("nonzero pivot");
        for c in w.iter_mut().skip(p) {
            if !c.is_zero() {
                *c = &*c * &inv;
            }
        }
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let c = row[p].clone();
            for (rj, wj) in row.iter_mut().zip(&w).skip(p) {
                if !wj.is_zero() {
                    *rj = &*rj - &(&c * wj);
                }
            }
        }
        let pos = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(pos, p);
        self.rows.insert(pos, w);
        true
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for r in &other.rows {
            s.insert(r.clone());
        }
        s
    }

    /// Columns that are not pivots: a basis of the quotient by coordinate vectors.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.codim());
        let mut k = 0;
        for j in 0..self.ambient {
            if k < self.pivots.len() && self.pivots[k] == j {
                k += 1;
            } else {
                out.push(j);
            }
        }
        out
    }

    /// Coordinates of `v` modulo the subspace, in the basis of free columns.
    pub fn quotient_coords(&self, v: &[Scalar]) -> Vec<Scalar> {
        let r = self.reduce(v);
        self.free_columns().into_iter().map(|j| r[j].clone()).collect()
    }
}

/// Basis of `{v : M v = 0}` for an `m × n` matrix given as rows.
pub fn nullspace(field: Field, ncols: usize, matrix: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let rref = Subspace::span(field, ncols, matrix.iter().cloned());
    let free = rref.free_columns();
    free.iter()
        .map(|&fcol| {
            let mut v = vec![field.zero(); ncols];
            v[fcol] = field.one();
            for (row, &p) in rref.rows().iter().zip(rref.pivots()) {
                v[p] = -&row[fcol];
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Scalar::q(n, 1)
    }

    #[test]
    fn rref_is_canonical() {
        let f = Field::Rational;
        let a = Subspace::span(f, 3, vec![vec![q(1), q(2), q(3)], vec![q(0), q(1), q(1)]]);
        let b = Subspace::span(f, 3, vec![vec![q(1), q(3), q(4)], vec![q(2), q(5), q(7)]]);
        assert_eq!(a, b);
        assert_eq!(a.rank(), 2);
    }

    #[test]
    fn membership_and_containment() {
        let f = Field::Prime(3);
        let e = |v: [i64; 3]| v.iter().map(|&x| Scalar::fp(3, x)).collect::<Vec<_>>();
        let s = Subspace::span(f, 3, vec![e([1, 1, 0])]);
        assert!(s.contains_vector(&e([2, 2, 0])));
        assert!(!s.contains_vector(&e([1, 0, 0])));
        let t = s.sum(&Subspace::span(f, 3, vec![e([0, 0, 1])]));
        assert!(t.contains(&s));
        assert!(!s.contains(&t));
    }

    #[test]
    fn nullspace_dimension() {
        let f = Field::Rational;
        let m = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]];
        let ns = nullspace(f, 3, &m);
        assert_eq!(ns.len(), 2);
        for v in ns {
            for row in &m {
                let dot = row.iter().zip(&v).fold(q(0), |acc, (a, b)| &acc + &(a * b));
                assert!(dot.is_zero());
            }
        }
    }
}
