//! Reductions from weighted Max 2-SAT to facility location and to discrete
//! k-means, together with the pieces they share: the site layout, the
//! solution mapping back to truth assignments, and reasonableness.
//!
//! Both reductions lay out one site per literal and one per clause, in the
//! fixed order `x_1, ~x_1, ..., x_N, ~x_N, b_1, ..., b_M`, and normalize
//! clause weights by `W = M * w_max`.

pub mod dkm;
pub mod mufl;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::rational::rat;
use crate::sat::{Assignment, SatInstance};
use crate::solution::SolutionSet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReduceError {
    #[error("reduction requires at least 2 clauses, instance has {0}")]
    TooFewClauses(usize),
    #[error("parameter c must satisfy 1 < c < 2, got {0}")]
    InvalidC(BigRational),
    #[error("solution {0} is not reasonable for {1} variables")]
    NotReasonable(SolutionSet, u32),
    #[error("solution has {got} points, the reduced instance requires K = {expected}")]
    WrongCardinality { got: usize, expected: usize },
}

/// The separation parameter `c`, any rational strictly between 1 and 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionParams {
    c: BigRational,
}

impl ReductionParams {
    pub fn new(c: BigRational) -> Result<ReductionParams, ReduceError> {
        if c <= BigRational::one() || c >= rat(2, 1) {
            return Err(ReduceError::InvalidC(c));
        }
        Ok(ReductionParams { c })
    }

    pub fn c(&self) -> &BigRational {
        &self.c
    }
}

impl Default for ReductionParams {
    /// The midpoint `c = 3/2`, maximizing slack on both sides.
    fn default() -> ReductionParams {
        ReductionParams { c: rat(3, 2) }
    }
}

/// What a site in a reduced instance stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteRole {
    /// The literal `x_n` (1-based).
    PositiveLiteral(u32),
    /// The literal `~x_n` (1-based).
    NegativeLiteral(u32),
    /// The clause `b_m` (1-based).
    Clause(u32),
}

impl SiteRole {
    /// Position of this site in the fixed layout.
    pub fn index(self, num_vars: u32) -> usize {
        match self {
            SiteRole::PositiveLiteral(n) => 2 * (n as usize - 1),
            SiteRole::NegativeLiteral(n) => 2 * (n as usize - 1) + 1,
            SiteRole::Clause(m) => 2 * num_vars as usize + (m as usize - 1),
        }
    }

    /// Inverse of [`SiteRole::index`] for a layout with `num_vars` variables.
    pub fn from_index(index: usize, num_vars: u32) -> SiteRole {
        let literal_sites = 2 * num_vars as usize;
        if index < literal_sites {
            let n = (index / 2 + 1) as u32;
            if index.is_multiple_of(2) {
                SiteRole::PositiveLiteral(n)
            } else {
                SiteRole::NegativeLiteral(n)
            }
        } else {
            SiteRole::Clause((index - literal_sites + 1) as u32)
        }
    }
}

impl fmt::Display for SiteRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiteRole::PositiveLiteral(n) => write!(f, "x{n}"),
            SiteRole::NegativeLiteral(n) => write!(f, "~x{n}"),
            SiteRole::Clause(m) => write!(f, "b{m}"),
        }
    }
}

/// Labels for all sites of a reduced instance, in layout order.
pub fn site_labels(instance: &SatInstance) -> Vec<String> {
    let mut labels = Vec::with_capacity(2 * instance.num_vars() as usize + instance.num_clauses());
    for n in 1..=instance.num_vars() {
        labels.push(SiteRole::PositiveLiteral(n).to_string());
        labels.push(SiteRole::NegativeLiteral(n).to_string());
    }
    for m in 1..=instance.num_clauses() as u32 {
        labels.push(SiteRole::Clause(m).to_string());
    }
    labels
}

/// The solution mapping shared by both reductions: variable `x_n` is true
/// iff the site of its positive literal is selected. Total on any set;
/// clause sites and out-of-range members contribute nothing.
pub fn assignment_from_sites(open: &SolutionSet, num_vars: u32) -> Assignment {
    Assignment::new(
        (1..=num_vars)
            .map(|n| open.contains(SiteRole::PositiveLiteral(n).index(num_vars)))
            .collect(),
    )
}

/// A solution is reasonable when it has exactly one site per variable and
/// every variable is represented. Reasonable solutions are in bijection
/// with truth assignments.
pub fn is_reasonable(open: &SolutionSet, num_vars: u32) -> bool {
    open.len() == num_vars as usize
        && (1..=num_vars).all(|n| {
            open.contains(SiteRole::PositiveLiteral(n).index(num_vars))
                || open.contains(SiteRole::NegativeLiteral(n).index(num_vars))
        })
}

/// The reasonable solution representing `assignment` (the inverse of
/// [`assignment_from_sites`] on reasonable sets).
pub fn reasonable_from_assignment(assignment: &Assignment) -> SolutionSet {
    let num_vars = assignment.len() as u32;
    SolutionSet::from_members((1..=num_vars).map(|n| {
        if assignment.value(n) {
            SiteRole::PositiveLiteral(n).index(num_vars)
        } else {
            SiteRole::NegativeLiteral(n).index(num_vars)
        }
    }))
}

/// Iterates every reasonable solution for `num_vars` variables (2^N sets).
pub fn reasonable_solutions(num_vars: u32) -> impl Iterator<Item = SolutionSet> {
    assert!(
        num_vars <= 60,
        "too many variables to enumerate reasonable solutions"
    );
    (0..1u64 << num_vars).map(move |bits| {
        SolutionSet::from_members((0..num_vars).map(|v| {
            let n = v + 1;
            if bits >> v & 1 == 1 {
                SiteRole::PositiveLiteral(n).index(num_vars)
            } else {
                SiteRole::NegativeLiteral(n).index(num_vars)
            }
        }))
    })
}

pub(crate) fn check_preconditions(
    instance: &SatInstance,
    _params: &ReductionParams,
) -> Result<(), ReduceError> {
    if instance.num_clauses() < 2 {
        return Err(ReduceError::TooFewClauses(instance.num_clauses()));
    }
    Ok(())
}

/// `W = M * w_max` as an exact rational.
pub(crate) fn weight_bound(instance: &SatInstance) -> BigRational {
    BigRational::from_integer(BigInt::from(instance.weight_bound()))
}

/// Total falsified weight of `assignment`, as a rational.
pub(crate) fn falsified_weight(instance: &SatInstance, assignment: &Assignment) -> BigRational {
    let total: u128 = instance
        .clauses()
        .iter()
        .filter(|c| !c.satisfied_by(assignment))
        .map(|c| u128::from(c.weight()))
        .sum();
    BigRational::from_integer(BigInt::from(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::parse_wcnf;

    #[test]
    fn params_reject_boundary_values() {
        assert!(ReductionParams::new(rat(3, 2)).is_ok());
        assert!(ReductionParams::new(rat(101, 100)).is_ok());
        assert_eq!(
            ReductionParams::new(rat(1, 1)).unwrap_err(),
            ReduceError::InvalidC(rat(1, 1))
        );
        assert_eq!(
            ReductionParams::new(rat(2, 1)).unwrap_err(),
            ReduceError::InvalidC(rat(2, 1))
        );
        assert!(ReductionParams::new(rat(5, 2)).is_err());
    }

    #[test]
    fn site_layout_round_trips() {
        let num_vars = 3;
        for index in 0..10 {
            let role = SiteRole::from_index(index, num_vars);
            assert_eq!(role.index(num_vars), index);
        }
        assert_eq!(SiteRole::PositiveLiteral(2).index(num_vars), 2);
        assert_eq!(SiteRole::NegativeLiteral(2).index(num_vars), 3);
        assert_eq!(SiteRole::Clause(1).index(num_vars), 6);
        assert_eq!(SiteRole::Clause(1).to_string(), "b1");
        assert_eq!(SiteRole::NegativeLiteral(3).to_string(), "~x3");
    }

    #[test]
    fn labels_follow_layout() {
        let inst = parse_wcnf("p wcnf 2 2\n1 1 2 0\n1 -1 2 0\n").unwrap();
        assert_eq!(site_labels(&inst), ["x1", "~x1", "x2", "~x2", "b1", "b2"]);
    }

    #[test]
    fn solution_mapping_examples() {
        // O = {x1, x2} -> (true, true)
        let o = SolutionSet::from_members([0, 2]);
        assert_eq!(assignment_from_sites(&o, 2).to_string(), "11");
        // O = {~x1, ~x2} -> (false, false)
        let o = SolutionSet::from_members([1, 3]);
        assert_eq!(assignment_from_sites(&o, 2).to_string(), "00");
        // empty set -> all false
        assert_eq!(
            assignment_from_sites(&SolutionSet::new(), 2).to_string(),
            "00"
        );
    }

    #[test]
    fn reasonableness_examples() {
        // {x1, ~x2}
        assert!(is_reasonable(&SolutionSet::from_members([0, 3]), 2));
        // {x1, ~x1}: variable 2 unrepresented
        assert!(!is_reasonable(&SolutionSet::from_members([0, 1]), 2));
        // {x1, ~x1, x2}: wrong cardinality
        assert!(!is_reasonable(&SolutionSet::from_members([0, 1, 2]), 2));
        // clause site in a set of the right size
        assert!(!is_reasonable(&SolutionSet::from_members([0, 4]), 2));
    }

    #[test]
    fn reasonable_solutions_biject_with_assignments() {
        let num_vars = 3;
        let all: Vec<SolutionSet> = reasonable_solutions(num_vars).collect();
        assert_eq!(all.len(), 8);
        let mut images = std::collections::BTreeSet::new();
        for o in &all {
            assert!(is_reasonable(o, num_vars));
            let t = assignment_from_sites(o, num_vars);
            assert_eq!(&reasonable_from_assignment(&t), o);
            images.insert(t);
        }
        assert_eq!(images.len(), 8, "mapping is injective on reasonable sets");
    }
}
