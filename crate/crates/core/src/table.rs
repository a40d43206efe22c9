//! Symmetric exact-rational distance tables.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// A symmetric table of exact rationals over `n` sites, stored as the
/// lower triangle (diagonal included) in row-major order. Symmetry is
/// structural: `get(i, j)` and `get(j, i)` read the same entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    num_sites: usize,
    entries: Vec<BigRational>,
}

impl DistanceTable {
    /// Table with every entry zero.
    pub fn zeros(num_sites: usize) -> DistanceTable {
        let len = num_sites * (num_sites + 1) / 2;
        DistanceTable {
            num_sites,
            entries: vec![BigRational::zero(); len],
        }
    }

    /// Builds a table by evaluating `f(i, j)` for every pair with `j <= i`.
    pub fn from_fn<F: FnMut(usize, usize) -> BigRational>(
        num_sites: usize,
        mut f: F,
    ) -> DistanceTable {
        let mut entries = Vec::with_capacity(num_sites * (num_sites + 1) / 2);
        for i in 0..num_sites {
            for j in 0..=i {
                entries.push(f(i, j));
            }
        }
        DistanceTable { num_sites, entries }
    }

    /// Reconstructs a table from its serialized lower triangle.
    /// Returns `None` if the entry count is not triangular for `num_sites`.
    pub fn from_lower_triangle(
        num_sites: usize,
        entries: Vec<BigRational>,
    ) -> Option<DistanceTable> {
        if entries.len() != num_sites * (num_sites + 1) / 2 {
            return None;
        }
        Some(DistanceTable { num_sites, entries })
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        hi * (hi + 1) / 2 + lo
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[self.slot(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigRational) {
        let slot = self.slot(i, j);
        self.entries[slot] = value;
    }

    /// The serialized lower triangle, row-major, diagonal included.
    pub fn lower_triangle(&self) -> &[BigRational] {
        &self.entries
    }

    /// Converts to a dense float matrix for the numerical embedding routines.
    pub fn to_f64_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.num_sites, self.num_sites, |i, j| {
            self.get(i, j).to_f64().expect("rational out of f64 range")
        })
    }

    /// The lower triangle converted to floats, in storage order.
    pub fn lower_triangle_f64(&self) -> Vec<f64> {
        self.entries
            .iter()
            .map(|v| v.to_f64().expect("rational out of f64 range"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn symmetric_indexing() {
        let mut t = DistanceTable::zeros(3);
        t.set(2, 0, rat(5, 2));
        assert_eq!(t.get(0, 2), &rat(5, 2));
        assert_eq!(t.get(2, 0), &rat(5, 2));
        assert_eq!(t.get(1, 1), &rat(0, 1));
        assert_eq!(t.num_sites(), 3);
        assert_eq!(t.lower_triangle().len(), 6);
    }

    #[test]
    fn from_fn_visits_lower_triangle() {
        let t = DistanceTable::from_fn(3, |i, j| rat((10 * i + j) as i64, 1));
        assert_eq!(t.get(2, 1), &rat(21, 1));
        assert_eq!(t.get(1, 2), &rat(21, 1));
    }

    #[test]
    fn lower_triangle_round_trip() {
        let t = DistanceTable::from_fn(4, |i, j| rat(i as i64 - j as i64, 3));
        let back = DistanceTable::from_lower_triangle(4, t.lower_triangle().to_vec()).unwrap();
        assert_eq!(back, t);
        assert!(DistanceTable::from_lower_triangle(4, vec![rat(1, 1)]).is_none());
    }

    #[test]
    fn f64_conversion() {
        let t = DistanceTable::from_fn(2, |i, j| rat((i + j) as i64, 2));
        let m = t.to_f64_matrix();
        assert_eq!(m[(1, 0)], 0.5);
        assert_eq!(m[(0, 1)], 0.5);
        assert_eq!(m[(0, 0)], 0.0);
    }
}
