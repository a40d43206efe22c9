//! Metric uncapacitated facility location: instances, the service-plus-opening
//! cost, and the single-swap neighborhood (open one, close one, or exchange).

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::search::MoveDesc;
use crate::solution::SolutionSet;
use crate::table::DistanceTable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MuflError {
    #[error("facility index {0} out of range (instance has {1} facilities)")]
    FacilityOutOfRange(usize, usize),
    #[error("site index {0} out of range (instance has {1} sites)")]
    SiteOutOfRange(usize, usize),
    #[error("instance must have at least one facility")]
    NoFacilities,
    #[error("expected {expected} opening costs, got {got}")]
    OpeningCostCount { got: usize, expected: usize },
    #[error("distance table covers {got} sites, instance has {expected}")]
    TableSize { got: usize, expected: usize },
    #[error("duplicate site label `{0}`")]
    DuplicateLabel(String),
}

/// A facility-location instance over a shared site set.
///
/// `clients` and `facilities` index into the site list; the distance table
/// spans all sites. Opening costs are stored per facility even though the
/// instances produced by the reduction use a single constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuflInstance {
    site_labels: Vec<String>,
    clients: Vec<usize>,
    facilities: Vec<usize>,
    opening_costs: Vec<BigRational>,
    distances: DistanceTable,
}

/// The facility-location objective: finite for nonempty solutions, and a
/// `+infinity` sentinel for the empty set (no facility to serve any client).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlValue {
    Finite(BigRational),
    Infinite,
}

impl FlValue {
    pub fn finite(self) -> Option<BigRational> {
        match self {
            FlValue::Finite(v) => Some(v),
            FlValue::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, FlValue::Infinite)
    }
}

impl PartialOrd for FlValue {
    fn partial_cmp(&self, other: &FlValue) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FlValue {
    fn cmp(&self, other: &FlValue) -> Ordering {
        match (self, other) {
            (FlValue::Finite(a), FlValue::Finite(b)) => a.cmp(b),
            (FlValue::Finite(_), FlValue::Infinite) => Ordering::Less,
            (FlValue::Infinite, FlValue::Finite(_)) => Ordering::Greater,
            (FlValue::Infinite, FlValue::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for FlValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlValue::Finite(v) => write!(f, "{v}"),
            FlValue::Infinite => write!(f, "inf"),
        }
    }
}

/// Everything `validate_metric` found wrong with a distance table.
///
/// Symmetry violations cannot arise from [`DistanceTable`] (storage is
/// triangular), so that list is empty for tables built through this crate;
/// the field exists so reports from other sources stay complete.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MetricReport {
    pub nonzero_diagonal: Vec<usize>,
    pub negative_entries: Vec<(usize, usize)>,
    pub symmetry_violations: Vec<(usize, usize)>,
    /// Triples `(p, q, r)` with `d(p,r) > d(p,q) + d(q,r)`, listed with `p < r`.
    pub triangle_violations: Vec<(usize, usize, usize)>,
}

impl MetricReport {
    pub fn is_metric(&self) -> bool {
        self.nonzero_diagonal.is_empty()
            && self.negative_entries.is_empty()
            && self.symmetry_violations.is_empty()
            && self.triangle_violations.is_empty()
    }
}

impl MuflInstance {
    pub fn new(
        site_labels: Vec<String>,
        clients: Vec<usize>,
        facilities: Vec<usize>,
        opening_costs: Vec<BigRational>,
        distances: DistanceTable,
    ) -> Result<MuflInstance, MuflError> {
        let num_sites = site_labels.len();
        let mut seen = std::collections::HashSet::new();
        for label in &site_labels {
            if !seen.insert(label) {
                return Err(MuflError::DuplicateLabel(label.clone()));
            }
        }
        if facilities.is_empty() {
            return Err(MuflError::NoFacilities);
        }
        if opening_costs.len() != facilities.len() {
            return Err(MuflError::OpeningCostCount {
                got: opening_costs.len(),
                expected: facilities.len(),
            });
        }
        if distances.num_sites() != num_sites {
            return Err(MuflError::TableSize {
                got: distances.num_sites(),
                expected: num_sites,
            });
        }
        for &site in clients.iter().chain(&facilities) {
            if site >= num_sites {
                return Err(MuflError::SiteOutOfRange(site, num_sites));
            }
        }
        Ok(MuflInstance {
            site_labels,
            clients,
            facilities,
            opening_costs,
            distances,
        })
    }

    /// Instance with a single opening cost shared by every facility.
    pub fn with_constant_opening_cost(
        site_labels: Vec<String>,
        clients: Vec<usize>,
        facilities: Vec<usize>,
        opening_cost: BigRational,
        distances: DistanceTable,
    ) -> Result<MuflInstance, MuflError> {
        let costs = vec![opening_cost; facilities.len()];
        MuflInstance::new(site_labels, clients, facilities, costs, distances)
    }

    pub fn num_sites(&self) -> usize {
        self.site_labels.len()
    }

    pub fn site_labels(&self) -> &[String] {
        &self.site_labels
    }

    pub fn num_clients(&self) -> usize {
        self.clients.len()
    }

    pub fn num_facilities(&self) -> usize {
        self.facilities.len()
    }

    pub fn clients(&self) -> &[usize] {
        &self.clients
    }

    pub fn facilities(&self) -> &[usize] {
        &self.facilities
    }

    /// Opening cost of the facility at position `facility` in the facility list.
    pub fn opening_cost(&self, facility: usize) -> &BigRational {
        &self.opening_costs[facility]
    }

    /// True if all facilities share one opening cost (the serialized form).
    pub fn constant_opening_cost(&self) -> Option<&BigRational> {
        let first = self.opening_costs.first()?;
        self.opening_costs
            .iter()
            .all(|c| c == first)
            .then_some(first)
    }

    pub fn distances(&self) -> &DistanceTable {
        &self.distances
    }

    /// Distance between a client (by position) and a facility (by position).
    pub fn client_facility_distance(&self, client: usize, facility: usize) -> &BigRational {
        self.distances
            .get(self.clients[client], self.facilities[facility])
    }

    fn check_solution(&self, open: &SolutionSet) -> Result<(), MuflError> {
        match open.max_member() {
            Some(max) if max >= self.facilities.len() => {
                Err(MuflError::FacilityOutOfRange(max, self.facilities.len()))
            }
            _ => Ok(()),
        }
    }

    /// Service cost plus opening cost; `Infinite` iff `open` is empty.
    pub fn phi(&self, open: &SolutionSet) -> Result<FlValue, MuflError> {
        self.check_solution(open)?;
        if open.is_empty() {
            return Ok(FlValue::Infinite);
        }
        let mut total: BigRational = open.iter().map(|o| self.opening_costs[o].clone()).sum();
        for client in 0..self.clients.len() {
            let nearest = open
                .iter()
                .map(|o| self.client_facility_distance(client, o))
                .min()
                .expect("open set is nonempty");
            total += nearest;
        }
        Ok(FlValue::Finite(total))
    }

    /// Single-swap moves in deterministic order: closes, then opens, then
    /// exchanges, each in facility-index order. Close moves that would empty
    /// the solution are skipped.
    pub fn swap_moves(&self, open: &SolutionSet) -> Vec<(MoveDesc, SolutionSet)> {
        let mut moves = Vec::new();
        if open.len() > 1 {
            for out in open.iter() {
                moves.push((MoveDesc::Close { facility: out }, open.without(out)));
            }
        }
        let closed: Vec<usize> = (0..self.facilities.len())
            .filter(|f| !open.contains(*f))
            .collect();
        for &inn in &closed {
            moves.push((MoveDesc::Open { facility: inn }, open.with(inn)));
        }
        for out in open.iter() {
            for &inn in &closed {
                moves.push((MoveDesc::Swap { out, inn }, open.swapped(out, inn)));
            }
        }
        moves
    }

    /// All single-swap neighbors of `open` (never the empty set).
    pub fn swap_neighbors(&self, open: &SolutionSet) -> Vec<SolutionSet> {
        self.swap_moves(open)
            .into_iter()
            .map(|(_, set)| set)
            .collect()
    }

    /// Checks the metric axioms over all sites and reports every violation.
    pub fn validate_metric(&self) -> MetricReport {
        validate_metric_table(&self.distances)
    }
}

/// Exhaustive metric check: nonzero diagonals, negative entries, and all
/// triangle-inequality violations `d(p,r) > d(p,q) + d(q,r)`.
pub fn validate_metric_table(table: &DistanceTable) -> MetricReport {
    let n = table.num_sites();
    let mut report = MetricReport::default();
    for p in 0..n {
        if !table.get(p, p).is_zero() {
            report.nonzero_diagonal.push(p);
        }
        for q in 0..p {
            if table.get(p, q) < &BigRational::zero() {
                report.negative_entries.push((q, p));
            }
        }
    }
    for p in 0..n {
        for r in (p + 1)..n {
            for q in 0..n {
                if q == p || q == r {
                    continue;
                }
                if table.get(p, r) > &(table.get(p, q) + table.get(q, r)) {
                    report.triangle_violations.push((p, q, r));
                }
            }
        }
    }
    report
}

/// Whether some single-swap neighbor strictly improves on `open`.
///
/// Uses cached nearest/second-nearest open facilities per client, so each
/// neighbor is evaluated in one pass over the clients; exact throughout.
pub fn has_improving_swap(inst: &MuflInstance, open: &SolutionSet) -> bool {
    debug_assert!(!open.is_empty());
    let current = match inst.phi(open).expect("solution validated by caller") {
        FlValue::Finite(v) => v,
        FlValue::Infinite => return false,
    };
    let open_list: Vec<usize> = open.iter().collect();
    let closed: Vec<usize> = (0..inst.num_facilities())
        .filter(|f| !open.contains(*f))
        .collect();

    // nearest[c] = (facility, distance); second[c] = distance to the best
    // alternative among the remaining open facilities (None if |open| = 1).
    let mut nearest: Vec<(usize, BigRational)> = Vec::with_capacity(inst.num_clients());
    let mut second: Vec<Option<BigRational>> = Vec::with_capacity(inst.num_clients());
    for c in 0..inst.num_clients() {
        let mut best: Option<(usize, &BigRational)> = None;
        let mut runner_up: Option<&BigRational> = None;
        for &o in &open_list {
            let d = inst.client_facility_distance(c, o);
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
        let (bo, bd) = best.expect("open set is nonempty");
        nearest.push((bo, bd.clone()));
        second.push(runner_up.cloned());
    }

    let service_close = |out: usize| -> BigRational {
        (0..inst.num_clients())
            .map(|c| {
                if nearest[c].0 == out {
                    second[c].clone().expect("close requires |open| > 1")
                } else {
                    nearest[c].1.clone()
                }
            })
            .sum()
    };

    // closes
    if open.len() > 1 {
        for &out in &open_list {
            let mut candidate = service_close(out);
            for &o in &open_list {
                if o != out {
                    candidate += inst.opening_cost(o);
                }
            }
            if candidate < current {
                return true;
            }
        }
    }
    // opens
    let opening_total: BigRational = open_list.iter().map(|&o| inst.opening_cost(o)).sum();
    for &inn in &closed {
        let mut candidate = opening_total.clone() + inst.opening_cost(inn);
        for (c, (_, near)) in nearest.iter().enumerate() {
            let d_in = inst.client_facility_distance(c, inn);
            candidate += d_in.min(near);
        }
        if candidate < current {
            return true;
        }
    }
    // swaps
    for &out in &open_list {
        for &inn in &closed {
            let mut candidate =
                opening_total.clone() - inst.opening_cost(out) + inst.opening_cost(inn);
            for c in 0..inst.num_clients() {
                let d_in = inst.client_facility_distance(c, inn);
                let fallback = if nearest[c].0 == out {
                    match &second[c] {
                        Some(d) => d,
                        None => d_in, // out was the only open facility
                    }
                } else {
                    &nearest[c].1
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
