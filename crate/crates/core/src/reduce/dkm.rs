//! Max 2-SAT to discrete k-means.
//!
//! Same site layout as the facility-location reduction, but all distances are
//! squeezed into the band [1, 1+2e] with e = 1/(4N+2M): a literal and its
//! negation sit at squared distance 1, a clause sits at `1 + e*(3/2 + w/2W)`
//! from the literals it contains and at `1 + e*(3/2 + c*w/2W)` from their
//! negations, and every other pair is at `1 + 2e`. The cardinality bound is
//! K = N, so reasonable solutions are exactly the feasible literal-only sets.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dkm::DkmInstance;
use crate::rational::{rat, rat_u128};
use crate::sat::{Assignment, Literal, SatInstance};
use crate::solution::SolutionSet;
use crate::table::DistanceTable;

use super::{
    assignment_from_sites, check_preconditions, falsified_weight, is_reasonable, site_labels,
    weight_bound, ReduceError, ReductionParams, SiteRole,
};

/// The perturbation scale `e = 1/(4N + 2M)`, always derived from the
/// instance, never chosen by the caller.
pub fn epsilon(instance: &SatInstance) -> BigRational {
    rat(
        1,
        4 * i64::from(instance.num_vars()) + 2 * instance.num_clauses() as i64,
    )
}

fn distance(
    instance: &SatInstance,
    params: &ReductionParams,
    w_bound: &BigRational,
    eps: &BigRational,
    i: usize,
    j: usize,
) -> BigRational {
    if i == j {
        return BigRational::zero();
    }
    let num_vars = instance.num_vars();
    let (a, b) = (
        SiteRole::from_index(i, num_vars),
        SiteRole::from_index(j, num_vars),
    );
    let literal_of = |role: SiteRole| match role {
        SiteRole::PositiveLiteral(n) => Some(Literal::pos(n)),
        SiteRole::NegativeLiteral(n) => Some(Literal::neg(n)),
        SiteRole::Clause(_) => None,
    };
    let far = BigRational::one() + rat(2, 1) * eps;
    match (literal_of(a), literal_of(b)) {
        (Some(p), Some(q)) => {
            if p == q.negation() {
                BigRational::one()
            } else {
                far
            }
        }
        (Some(p), None) | (None, Some(p)) => {
            let m = match if literal_of(a).is_none() { a } else { b } {
                SiteRole::Clause(m) => m,
                _ => unreachable!("one side is a clause site"),
            };
            let clause = instance.clause(m as usize - 1);
            let weight = rat_u128(u128::from(clause.weight()));
            let half_normalized = weight / (rat(2, 1) * w_bound);
            if clause.contains(p) {
                BigRational::one() + eps * (rat(3, 2) + half_normalized)
            } else if clause.contains(p.negation()) {
                BigRational::one() + eps * (rat(3, 2) + params.c() * half_normalized)
            } else {
                far
            }
        }
        (None, None) => far,
    }
}

/// Builds the k-means instance for `instance` with K = N. Requires M >= 2.
pub fn build(instance: &SatInstance, params: &ReductionParams) -> Result<DkmInstance, ReduceError> {
    check_preconditions(instance, params)?;
    let num_vars = instance.num_vars() as usize;
    let num_sites = 2 * num_vars + instance.num_clauses();
    let w_bound = weight_bound(instance);
    let eps = epsilon(instance);
    let table = DistanceTable::from_fn(num_sites, |i, j| {
        distance(instance, params, &w_bound, &eps, i, j)
    });
    let dkm = DkmInstance::new(site_labels(instance), num_vars, table)
        .expect("reduction layout is structurally valid");
    Ok(dkm)
}

/// The truth assignment represented by a feasible solution (|O| = K);
/// clause points in the solution contribute nothing.
pub fn map_solution(open: &SolutionSet, instance: &SatInstance) -> Result<Assignment, ReduceError> {
    let k = instance.num_vars() as usize;
    if open.len() != k {
        return Err(ReduceError::WrongCardinality {
            got: open.len(),
            expected: k,
        });
    }
    Ok(assignment_from_sites(open, instance.num_vars()))
}

/// Closed-form cost of a reasonable solution:
/// `N + M*(1 + 3e/2) + (e/2W) * sum(w) + (e/2W)*(c-1) * sum of falsified weights`.
pub fn predicted_cost_reasonable(
    instance: &SatInstance,
    params: &ReductionParams,
    open: &SolutionSet,
) -> Result<BigRational, ReduceError> {
    if !is_reasonable(open, instance.num_vars()) {
        return Err(ReduceError::NotReasonable(
            open.clone(),
            instance.num_vars(),
        ));
    }
    let assignment = assignment_from_sites(open, instance.num_vars());
    let eps = epsilon(instance);
    let scale = &eps / (rat(2, 1) * weight_bound(instance));
    let literal_part = rat(i64::from(instance.num_vars()), 1);
    let clause_part =
        rat(instance.num_clauses() as i64, 1) * (BigRational::one() + rat(3, 2) * &eps);
    let all_weights = &scale * rat_u128(instance.total_weight());
    let falsified =
        scale * (params.c() - BigRational::one()) * falsified_weight(instance, &assignment);
    Ok(literal_part + clause_part + all_weights + falsified)
}
