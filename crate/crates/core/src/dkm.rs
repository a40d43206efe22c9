//! Discrete k-means over an abstract table of squared distances.
//!
//! The table is the source of truth for costs; coordinates, when present,
//! are a numerical witness produced by the embedding routines and are never
//! consulted by the exact cost function.

use num_rational::BigRational;
use thiserror::Error;

use crate::search::MoveDesc;
use crate::solution::SolutionSet;
use crate::table::DistanceTable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DkmError {
    #[error("K must satisfy 1 <= K <= {num_points}, got {k}")]
    InvalidK { k: usize, num_points: usize },
    #[error("solution has {got} points, instance requires exactly K = {expected}")]
    WrongCardinality { got: usize, expected: usize },
    #[error("point index {0} out of range (instance has {1} points)")]
    PointOutOfRange(usize, usize),
    #[error("distance table covers {got} sites, instance has {expected}")]
    TableSize { got: usize, expected: usize },
    #[error("coordinates given for {got} points, instance has {expected}")]
    CoordCount { got: usize, expected: usize },
    #[error("duplicate point label `{0}`")]
    DuplicateLabel(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DkmInstance {
    labels: Vec<String>,
    k: usize,
    distances: DistanceTable,
    coords: Option<Vec<Vec<f64>>>,
}

impl DkmInstance {
    pub fn new(
        labels: Vec<String>,
        k: usize,
        distances: DistanceTable,
    ) -> Result<DkmInstance, DkmError> {
        let num_points = labels.len();
        let mut seen = std::collections::HashSet::new();
        for label in &labels {
            if !seen.insert(label) {
                return Err(DkmError::DuplicateLabel(label.clone()));
            }
        }
        if k < 1 || k > num_points {
            return Err(DkmError::InvalidK { k, num_points });
        }
        if distances.num_sites() != num_points {
            return Err(DkmError::TableSize {
                got: distances.num_sites(),
                expected: num_points,
            });
        }
        Ok(DkmInstance {
            labels,
            k,
            distances,
            coords: None,
        })
    }

    /// Attaches embedded coordinates (one vector per point).
    pub fn with_coords(mut self, coords: Vec<Vec<f64>>) -> Result<DkmInstance, DkmError> {
        if coords.len() != self.labels.len() {
            return Err(DkmError::CoordCount {
                got: coords.len(),
                expected: self.labels.len(),
            });
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn num_points(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn distances(&self) -> &DistanceTable {
        &self.distances
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    /// Largest deviation between the table and the squared distances of the
    /// attached coordinates; `None` when no coordinates are present.
    pub fn max_coord_residual(&self) -> Option<f64> {
        use num_traits::ToPrimitive;
        let coords = self.coords.as_ref()?;
        let mut worst = 0.0f64;
        for i in 0..coords.len() {
            for j in 0..i {
                let have = crate::embed::squared_distance(&coords[i], &coords[j]);
                let want = self
                    .distances
                    .get(i, j)
                    .to_f64()
                    .expect("distance out of f64 range");
                worst = worst.max((have - want).abs());
            }
        }
        Some(worst)
    }

    fn check_solution(&self, open: &SolutionSet) -> Result<(), DkmError> {
        if open.len() != self.k {
            return Err(DkmError::WrongCardinality {
                got: open.len(),
                expected: self.k,
            });
        }
        match open.max_member() {
            Some(max) if max >= self.num_points() => {
                Err(DkmError::PointOutOfRange(max, self.num_points()))
            }
            _ => Ok(()),
        }
    }

    /// Sum over all points of the squared distance to the nearest open point,
    /// evaluated exactly from the table.
    pub fn phi(&self, open: &SolutionSet) -> Result<BigRational, DkmError> {
        self.check_solution(open)?;
        let mut total = BigRational::default();
        for point in 0..self.num_points() {
            let nearest = open
                .iter()
                .map(|o| self.distances.get(point, o))
                .min()
                .expect("K >= 1 so the open set is nonempty");
            total += nearest;
        }
        Ok(total)
    }

    /// Swap-only moves `(out, inn)` in index order; opens and closes would
    /// leave the feasible set and are not generated.
    pub fn swap_moves(&self, open: &SolutionSet) -> Vec<(MoveDesc, SolutionSet)> {
        let closed: Vec<usize> = (0..self.num_points())
            .filter(|p| !open.contains(*p))
            .collect();
        let mut moves = Vec::with_capacity(open.len() * closed.len());
        for out in open.iter() {
            for &inn in &closed {
                moves.push((MoveDesc::Swap { out, inn }, open.swapped(out, inn)));
            }
        }
        moves
    }

    pub fn swap_neighbors(&self, open: &SolutionSet) -> Vec<SolutionSet> {
        self.swap_moves(open)
            .into_iter()
            .map(|(_, set)| set)
            .collect()
    }
}

/// k-means cost recomputed from coordinates instead of the table; a float
/// cross-check of the exact path, available only when coordinates exist.
pub fn phi_from_coords(inst: &DkmInstance, open: &SolutionSet) -> Option<f64> {
    let coords = inst.coords()?;
    let mut total = 0.0;
    for point in coords {
        let nearest = open
            .iter()
            .map(|o| crate::embed::squared_distance(point, &coords[o]))
            .fold(f64::INFINITY, f64::min);
        total += nearest;
    }
    Some(total)
}

/// Whether some swap strictly lowers the cost, using cached nearest and
/// second-nearest open points so each neighbor costs one pass over the points.
pub fn has_improving_swap(inst: &DkmInstance, open: &SolutionSet) -> bool {
    let current = inst.phi(open).expect("solution validated by caller");
    let open_list: Vec<usize> = open.iter().collect();
    let closed: Vec<usize> = (0..inst.num_points())
        .filter(|p| !open.contains(*p))
        .collect();

    let mut nearest: Vec<(usize, BigRational)> = Vec::with_capacity(inst.num_points());
    let mut second: Vec<Option<BigRational>> = Vec::with_capacity(inst.num_points());
    for p in 0..inst.num_points() {
        let mut best: Option<(usize, &BigRational)> = None;
        let mut runner_up: Option<&BigRational> = None;
        for &o in &open_list {
            let d = inst.distances().get(p, o);
            match best {
                Some((_, bd)) if d >= bd => {
                    if runner_up.is_none_or(|r| d < r) {
                        runner_up = Some(d);
                    }
                }
                _ => {
                    runner_up = best.map(|(_, bd)| bd);
                    best = Some((o, d));
                }
            }
        }
        let (bo, bd) = best.expect("K >= 1");
        nearest.push((bo, bd.clone()));
        second.push(runner_up.cloned());
    }

    for &out in &open_list {
        for &inn in &closed {
            let mut candidate = BigRational::default();
            for p in 0..inst.num_points() {
                let d_in = inst.distances().get(p, inn);
                let fallback = if nearest[p].0 == out {
                    match &second[p] {
                        Some(d) => d,
                        None => d_in, // K = 1: the swapped-in point is all there is
                    }
                } else {
                    &nearest[p].1
                };
                candidate += d_in.min(fallback);
            }
            if candidate < current {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    /// Six points, squared distance |i - j| (a valid squared-Euclidean line? no,
    /// just an arbitrary symmetric table; costs only read the table).
    fn toy(n: usize, k: usize) -> DkmInstance {
        let table = DistanceTable::from_fn(n, |i, j| rat((i - j) as i64, 1));
        DkmInstance::new(labels(n), k, table).unwrap()
    }

    #[test]
    fn rejects_bad_k() {
        let table = DistanceTable::zeros(3);
        assert_eq!(
            DkmInstance::new(labels(3), 0, table.clone()).unwrap_err(),
            DkmError::InvalidK {
                k: 0,
                num_points: 3
            }
        );
        assert_eq!(
            DkmInstance::new(labels(3), 4, table).unwrap_err(),
            DkmError::InvalidK {
                k: 4,
                num_points: 3
            }
        );
    }

    #[test]
    fn phi_requires_exactly_k_points() {
        let inst = toy(4, 2);
        let err = inst.phi(&SolutionSet::from_members([0])).unwrap_err();
        assert_eq!(
            err,
            DkmError::WrongCardinality {
                got: 1,
                expected: 2
            }
        );
    }

    #[test]
    fn phi_is_zero_when_every_point_is_open() {
        let inst = toy(3, 3);
        let all = SolutionSet::from_members([0, 1, 2]);
        assert_eq!(inst.phi(&all).unwrap(), rat(0, 1));
        assert!(inst.swap_neighbors(&all).is_empty());
    }

    #[test]
    fn phi_sums_nearest_distances() {
        let inst = toy(4, 2);
        let open = SolutionSet::from_members([0, 3]);
        // point 1: min(1, 2) = 1; point 2: min(2, 1) = 1
        assert_eq!(inst.phi(&open).unwrap(), rat(2, 1));
    }

    #[test]
    fn neighborhood_is_regular_of_degree_k_times_rest() {
        let inst = toy(6, 2);
        let open = SolutionSet::from_members([0, 1]);
        let neighbors = inst.swap_neighbors(&open);
        assert_eq!(neighbors.len(), 8);
        for n in &neighbors {
            assert_eq!(n.len(), 2);
        }
    }

    #[test]
    fn improving_swap_detection_matches_full_scan() {
        let inst = toy(5, 2);
        for a in 0..5 {
            for b in (a + 1)..5 {
                let open = SolutionSet::from_members([a, b]);
                let current = inst.phi(&open).unwrap();
                let brute = inst
                    .swap_neighbors(&open)
                    .iter()
                    .any(|n| inst.phi(n).unwrap() < current);
                assert_eq!(has_improving_swap(&inst, &open), brute, "open = {open}");
            }
        }
    }

    #[test]
    fn table_cost_matches_coordinate_cost_within_embedding_tolerance() {
        use num_traits::ToPrimitive;
        let sat = crate::sat::parse_wcnf("p wcnf 2 2\n1 1 2 0\n1 -1 2 0\n").unwrap();
        let inst =
            crate::reduce::dkm::build(&sat, &crate::reduce::ReductionParams::default()).unwrap();
        let tol = 1e-9;
        let embedded =
            crate::embed::embed_squared_euclidean(&inst.distances().to_f64_matrix(), tol).unwrap();
        let inst = inst.with_coords(embedded.coords).unwrap();
        for a in 0..inst.num_points() {
            for b in (a + 1)..inst.num_points() {
                let open = SolutionSet::from_members([a, b]);
                let exact = inst.phi(&open).unwrap().to_f64().unwrap();
                let from_coords = phi_from_coords(&inst, &open).unwrap();
                assert!(
                    (exact - from_coords).abs() <= 10.0 * tol,
                    "open = {open}: {exact} vs {from_coords}"
                );
            }
        }
    }

    #[test]
    fn coords_residual_detects_mismatch() {
        let table = DistanceTable::from_fn(2, |i, j| rat(if i == j { 0 } else { 4 }, 1));
        let inst = DkmInstance::new(labels(2), 1, table).unwrap();
        let good = inst
            .clone()
            .with_coords(vec![vec![0.0], vec![2.0]])
            .unwrap();
        assert!(good.max_coord_residual().unwrap() < 1e-12);
        let bad = inst.with_coords(vec![vec![0.0], vec![1.0]]).unwrap();
        assert!(bad.max_coord_residual().unwrap() > 2.9);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn swap_neighborhood_symmetric_and_regular(
                n in 3usize..=7,
                k in 1usize..=3,
                seed in 0u64..256,
            ) {
                prop_assume!(k <= n);
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let inst = toy(n, k);
                let open = SolutionSet::random_k_subset(n, k, &mut rng);
                let neighbors = inst.swap_neighbors(&open);
                prop_assert_eq!(neighbors.len(), k * (n - k));
                for neighbor in &neighbors {
                    prop_assert_eq!(neighbor.len(), k);
                    prop_assert!(inst.swap_neighbors(neighbor).contains(&open));
                }
            }
        }
    }
}
