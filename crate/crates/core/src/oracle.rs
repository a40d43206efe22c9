//! Brute-force ground truth on small instances.
//!
//! The oracle walks entire solution spaces in exact arithmetic, identifies
//! every local optimum, and checks the structural claims the reductions rest
//! on: local optima are reasonable, their images are flip-local optima, the
//! closed-form cost formulas agree with direct evaluation, and SAT order is
//! reversed exactly. Any violation is reported with a witness.

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::dkm::DkmInstance;
use crate::mufl::MuflInstance;
use crate::rational::format_rational;
use crate::reduce::{self, ReduceError, ReductionParams};
use crate::sat::{Assignment, Clause, Literal, SatInstance};
use crate::search::{DkmSwap, EnumerableProblem, MuflSwap};
use crate::solution::SolutionSet;

/// Number of solutions an exhaustive scan may visit unless told otherwise.
pub const DEFAULT_SIZE_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("solution space has {count} solutions, exceeding the cap {cap}")]
    CapExceeded { count: u128, cap: u128 },
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error("instance does not match the reduction of the given formula: {0}")]
    InstanceMismatch(String),
}

/// Which reduction a verification run targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionTarget {
    Mufl,
    Dkm,
}

impl ReductionTarget {
    pub fn name(self) -> &'static str {
        match self {
            ReductionTarget::Mufl => "mufl",
            ReductionTarget::Dkm => "dkm",
        }
    }
}

/// A claim that failed, with the solution(s) that break it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub claim: String,
    pub witness: String,
}

/// Everything one exhaustive verification run found.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub target: String,
    pub num_vars: u32,
    pub num_clauses: usize,
    pub c: String,
    pub solutions_scanned: u128,
    pub local_optima: usize,
    pub reasonable_local_optima: usize,
    pub violations: Vec<Violation>,
}

impl OracleReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// All local optima of an enumerable problem, by exhaustive neighbor checks.
/// Refuses to scan spaces larger than `size_cap`.
pub fn enumerate_local_optima<P: EnumerableProblem>(
    problem: &P,
    size_cap: u128,
) -> Result<Vec<P::Solution>, OracleError> {
    let count = problem.solution_count();
    if count > size_cap {
        return Err(OracleError::CapExceeded {
            count,
            cap: size_cap,
        });
    }
    Ok(problem
        .solutions()
        .filter(|s| !problem.has_improving_neighbor(s))
        .collect())
}

/// Flip-local optimality checked directly against clause weights, independent
/// of the search engine.
pub fn sat_is_local_optimum(instance: &SatInstance, assignment: &Assignment) -> bool {
    let current = instance
        .cost(assignment)
        .expect("assignment length matches instance");
    assignment
        .flip_neighbors()
        .iter()
        .all(|neighbor| instance.cost(neighbor).expect("same length") <= current)
}

/// Builds the reduction for `instance` and verifies every claim on it.
pub fn verify_reduction(
    instance: &SatInstance,
    params: &ReductionParams,
    target: ReductionTarget,
    size_cap: u128,
) -> Result<OracleReport, OracleError> {
    match target {
        ReductionTarget::Mufl => {
            let reduced = reduce::mufl::build(instance, params)?;
            verify_mufl_claims(instance, params, &reduced, size_cap)
        }
        ReductionTarget::Dkm => {
            let reduced = reduce::dkm::build(instance, params)?;
            verify_dkm_claims(instance, params, &reduced, size_cap)
        }
    }
}

/// Verifies the facility-location claims against a given instance, which may
/// differ from the honest reduction (that is the point: corrupted instances
/// must produce violations).
pub fn verify_mufl_claims(
    instance: &SatInstance,
    params: &ReductionParams,
    reduced: &MuflInstance,
    size_cap: u128,
) -> Result<OracleReport, OracleError> {
    let expected_sites = 2 * instance.num_vars() as usize + instance.num_clauses();
    if reduced.num_sites() != expected_sites
        || reduced.num_facilities() != 2 * instance.num_vars() as usize
    {
        return Err(OracleError::InstanceMismatch(format!(
            "expected {expected_sites} sites and {} facilities",
            2 * instance.num_vars()
        )));
    }
    let problem = MuflSwap { instance: reduced };
    let optima = enumerate_local_optima(&problem, size_cap)?;
    let mut report = report_skeleton(instance, params, ReductionTarget::Mufl);
    report.solutions_scanned = problem.solution_count();
    report.local_optima = optima.len();

    check_local_optima(instance, &optima, &mut report);
    check_reasonable_costs(
        instance,
        &mut report,
        |o| reduce::mufl::predicted_cost_reasonable(instance, params, o),
        |o| {
            reduced
                .phi(o)
                .expect("reasonable sets are valid")
                .finite()
                .expect("nonempty")
        },
    );
    Ok(report)
}

/// Verifies the k-means claims against a given (possibly corrupted) instance.
pub fn verify_dkm_claims(
    instance: &SatInstance,
    params: &ReductionParams,
    reduced: &DkmInstance,
    size_cap: u128,
) -> Result<OracleReport, OracleError> {
    let expected_sites = 2 * instance.num_vars() as usize + instance.num_clauses();
    if reduced.num_points() != expected_sites || reduced.k() != instance.num_vars() as usize {
        return Err(OracleError::InstanceMismatch(format!(
            "expected {expected_sites} points with K = {}",
            instance.num_vars()
        )));
    }
    let problem = DkmSwap { instance: reduced };
    let optima = enumerate_local_optima(&problem, size_cap)?;
    let mut report = report_skeleton(instance, params, ReductionTarget::Dkm);
    report.solutions_scanned = problem.solution_count();
    report.local_optima = optima.len();

    check_local_optima(instance, &optima, &mut report);
    check_reasonable_costs(
        instance,
        &mut report,
        |o| reduce::dkm::predicted_cost_reasonable(instance, params, o),
        |o| {
            reduced
                .phi(o)
                .expect("reasonable sets are feasible since K = N")
        },
    );
    Ok(report)
}

fn report_skeleton(
    instance: &SatInstance,
    params: &ReductionParams,
    target: ReductionTarget,
) -> OracleReport {
    OracleReport {
        target: target.name().to_string(),
        num_vars: instance.num_vars(),
        num_clauses: instance.num_clauses(),
        c: format_rational(params.c()),
        solutions_scanned: 0,
        local_optima: 0,
        reasonable_local_optima: 0,
        violations: Vec::new(),
    }
}

/// Claims (a) and (b): every local optimum is reasonable and maps to a
/// flip-local optimum.
fn check_local_optima(instance: &SatInstance, optima: &[SolutionSet], report: &mut OracleReport) {
    for optimum in optima {
        if reduce::is_reasonable(optimum, instance.num_vars()) {
            report.reasonable_local_optima += 1;
        } else {
            report.violations.push(Violation {
                claim: "local-optimum-reasonable".to_string(),
                witness: format!("O={optimum}"),
            });
        }
        let image = reduce::assignment_from_sites(optimum, instance.num_vars());
        if !sat_is_local_optimum(instance, &image) {
            report.violations.push(Violation {
                claim: "psi-maps-to-sat-local-optimum".to_string(),
                witness: format!("O={optimum} T={image}"),
            });
        }
    }
}

/// Claims (c) and (d): closed-form costs agree with direct evaluation on all
/// reasonable solutions, and SAT order is reversed exactly across all pairs.
fn check_reasonable_costs(
    instance: &SatInstance,
    report: &mut OracleReport,
    predicted: impl Fn(&SolutionSet) -> Result<BigRational, ReduceError>,
    direct: impl Fn(&SolutionSet) -> BigRational,
) {
    let mut evaluated: Vec<(SolutionSet, u128, BigRational)> = Vec::new();
    for o in reduce::reasonable_solutions(instance.num_vars()) {
        let direct_cost = direct(&o);
        let predicted_cost = predicted(&o).expect("enumerated sets are reasonable");
        if direct_cost != predicted_cost {
            report.violations.push(Violation {
                claim: "closed-form-cost".to_string(),
                witness: format!(
                    "O={o} direct={} predicted={}",
                    format_rational(&direct_cost),
                    format_rational(&predicted_cost)
                ),
            });
        }
        let image = reduce::assignment_from_sites(&o, instance.num_vars());
        let weight = instance.cost(&image).expect("image has matching length");
        evaluated.push((o, weight, direct_cost));
    }
    for (oa, wa, pa) in &evaluated {
        for (ob, wb, pb) in &evaluated {
            if (wa < wb) != (pa > pb) {
                report.violations.push(Violation {
                    claim: "order-reversal".to_string(),
                    witness: format!("O={oa} O'={ob} w={wa} w'={wb}"),
                });
            }
        }
    }
}

/// Parameters for the seeded random-instance generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceParams {
    pub num_vars: u32,
    pub num_clauses: usize,
    pub max_weight: u64,
}

/// Uniform random instance: clause variable pairs drawn over distinct
/// variables, polarities fair coins, weights uniform in `1..=max_weight`.
/// The same seed always yields the same instance.
pub fn random_instance(params: &InstanceParams, seed: u64) -> SatInstance {
    use rand::{Rng, SeedableRng};
    assert!(params.num_vars >= 2, "clauses need two distinct variables");
    assert!(params.max_weight >= 1);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let clauses = (0..params.num_clauses)
        .map(|_| {
            let a = rng.gen_range(1..=params.num_vars);
            let b = loop {
                let candidate = rng.gen_range(1..=params.num_vars);
                if candidate != a {
                    break candidate;
                }
            };
            let lit = |var: u32, negated: bool| {
                if negated {
                    Literal::neg(var)
                } else {
                    Literal::pos(var)
                }
            };
            Clause::new(
                lit(a, rng.gen()),
                lit(b, rng.gen()),
                rng.gen_range(1..=params.max_weight),
            )
            .expect("generator draws distinct variables and positive weights")
        })
        .collect();
    SatInstance::new(params.num_vars, clauses).expect("generator respects variable range")
}
