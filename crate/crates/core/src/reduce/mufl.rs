//! Max 2-SAT to metric facility location.
//!
//! Facilities are the 2N literal sites; clients sit on every facility and on
//! one extra site per clause. Distances take five values: 0 on the diagonal,
//! 1 between a literal and its negation, `1 + w/W` between a clause and a
//! literal it contains, `1 + c*w/W` between a clause and the negation of a
//! literal it contains, and 2 everywhere else. Opening costs are constant 2.
//!
//! Every nonzero distance lies in [1, 2], so the table is trivially a metric,
//! and the cost of a reasonable solution has the closed form checked by
//! [`predicted_cost_reasonable`].

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::mufl::MuflInstance;
use crate::rational::{rat, rat_u128};
use crate::sat::{Assignment, Literal, SatInstance};
use crate::solution::SolutionSet;
use crate::table::DistanceTable;

use super::{
    assignment_from_sites, check_preconditions, falsified_weight, is_reasonable, site_labels,
    weight_bound, ReduceError, ReductionParams, SiteRole,
};

/// Distance between the sites at `i` and `j` in the layout for `instance`.
fn distance(
    instance: &SatInstance,
    params: &ReductionParams,
    w_bound: &BigRational,
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
    match (literal_of(a), literal_of(b)) {
        (Some(p), Some(q)) => {
            if p == q.negation() {
                BigRational::one()
            } else {
                rat(2, 1)
            }
        }
        (Some(p), None) | (None, Some(p)) => {
            let m = match if literal_of(a).is_none() { a } else { b } {
                SiteRole::Clause(m) => m,
                _ => unreachable!("one side is a clause site"),
            };
            let clause = instance.clause(m as usize - 1);
            let weight = rat_u128(u128::from(clause.weight()));
            if clause.contains(p) {
                BigRational::one() + weight / w_bound
            } else if clause.contains(p.negation()) {
                BigRational::one() + params.c() * weight / w_bound
            } else {
                rat(2, 1)
            }
        }
        (None, None) => rat(2, 1),
    }
}

/// Builds the facility-location instance for `instance`. Requires M >= 2.
pub fn build(
    instance: &SatInstance,
    params: &ReductionParams,
) -> Result<MuflInstance, ReduceError> {
    check_preconditions(instance, params)?;
    let num_vars = instance.num_vars() as usize;
    let num_sites = 2 * num_vars + instance.num_clauses();
    let w_bound = weight_bound(instance);
    let table =
        DistanceTable::from_fn(num_sites, |i, j| distance(instance, params, &w_bound, i, j));
    let mufl = MuflInstance::with_constant_opening_cost(
        site_labels(instance),
        (0..num_sites).collect(),
        (0..2 * num_vars).collect(),
        rat(2, 1),
        table,
    )
    .expect("reduction layout is structurally valid");
    Ok(mufl)
}

/// The truth assignment represented by a set of open facilities.
pub fn map_solution(open: &SolutionSet, num_vars: u32) -> Assignment {
    assignment_from_sites(open, num_vars)
}

/// Closed-form cost of a reasonable solution:
/// `3N + M + (1/W) * sum(w) + ((c-1)/W) * sum of falsified weights`.
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
    let assignment = map_solution(open, instance.num_vars());
    let w_bound = weight_bound(instance);
    let base = rat(3 * i64::from(instance.num_vars()), 1) + rat(instance.num_clauses() as i64, 1);
    let all_weights = rat_u128(instance.total_weight()) / &w_bound;
    let falsified =
        (params.c() - BigRational::one()) / &w_bound * falsified_weight(instance, &assignment);
    Ok(base + all_weights + falsified)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mufl::FlValue;
    use crate::sat::parse_wcnf;

    const TINY1: &str = "p wcnf 2 2\n1 1 2 0\n1 -1 2 0\n";

    fn tiny1() -> SatInstance {
        parse_wcnf(TINY1).unwrap()
    }

    fn tiny1_mufl() -> MuflInstance {
        build(&tiny1(), &ReductionParams::default()).unwrap()
    }

    #[test]
    fn tiny1_distances_match_case_analysis() {
        let inst = tiny1_mufl();
        let d = inst.distances();
        // sites: x1=0, ~x1=1, x2=2, ~x2=3, b1=4, b2=5
        assert_eq!(d.get(0, 1), &rat(1, 1), "literal vs negation");
        assert_eq!(d.get(0, 4), &rat(3, 2), "x1 in b1");
        assert_eq!(d.get(1, 4), &rat(7, 4), "~x1 vs b1 (contains x1)");
        assert_eq!(d.get(0, 2), &rat(2, 1), "unrelated literals");
        assert_eq!(d.get(4, 5), &rat(2, 1), "clause vs clause");
        assert_eq!(d.get(3, 4), &rat(7, 4), "~x2 vs b1 (contains x2)");
        for i in 0..6 {
            assert!(d.get(i, i).is_zero());
        }
        assert_eq!(inst.opening_cost(0), &rat(2, 1));
        assert_eq!(inst.num_facilities(), 4);
        assert_eq!(inst.num_clients(), 6);
    }

    #[test]
    fn tiny1_phi_ground_values() {
        let inst = tiny1_mufl();
        let o = SolutionSet::from_members([0, 2]); // {x1, x2}
        assert_eq!(inst.phi(&o).unwrap(), FlValue::Finite(rat(9, 1)));
        let o = SolutionSet::from_members([1, 3]); // {~x1, ~x2}
        assert_eq!(inst.phi(&o).unwrap(), FlValue::Finite(rat(37, 4)));
    }

    #[test]
    fn weighted_instance_hand_values() {
        // b1 = (x1 v ~x2, w=2), b2 = (~x1 v x2, w=3); W = 6
        let sat = parse_wcnf("p wcnf 2 2\n2 1 -2 0\n3 -1 2 0\n").unwrap();
        let params = ReductionParams::default();
        let inst = build(&sat, &params).unwrap();
        let d = inst.distances();
        assert_eq!(d.get(0, 4), &rat(4, 3), "x1 in b1: 1 + 2/6");
        assert_eq!(d.get(1, 4), &rat(3, 2), "~x1 vs b1: 1 + (3/2)(2/6)");
        assert_eq!(d.get(0, 5), &rat(7, 4), "x1 vs b2: 1 + (3/2)(3/6)");
        assert_eq!(d.get(2, 5), &rat(3, 2), "x2 in b2: 1 + 3/6");
        // O = {x1, x2} satisfies both clauses: 4 + 2 + 4/3 + 3/2
        let o = SolutionSet::from_members([0, 2]);
        assert_eq!(inst.phi(&o).unwrap(), FlValue::Finite(rat(53, 6)));
        assert_eq!(predicted_cost_reasonable(&sat, &params, &o).unwrap(), rat(53, 6));
        // O = {x1, ~x2} falsifies b2: 4 + 2 + 4/3 + 7/4
        let o = SolutionSet::from_members([0, 3]);
        assert_eq!(inst.phi(&o).unwrap(), FlValue::Finite(rat(109, 12)));
        assert_eq!(predicted_cost_reasonable(&sat, &params, &o).unwrap(), rat(109, 12));
    }

    #[test]
    fn exactly_n_unit_distances() {
        let inst = tiny1_mufl();
        let d = inst.distances();
        let n = inst.num_sites();
        let mut ones = 0;
        for i in 0..n {
            for j in 0..i {
                if d.get(i, j) == &rat(1, 1) {
                    ones += 1;
                }
            }
        }
        assert_eq!(ones, 2, "one unit pair per variable");
    }

    #[test]
    fn literal_unrelated_to_a_clause_sits_at_distance_two() {
        let sat = parse_wcnf("p wcnf 3 2\n1 1 2 0\n1 -1 3 0\n").unwrap();
        let inst = build(&sat, &ReductionParams::default()).unwrap();
        // x3 = site 4 does not occur in b1 = site 6 in either polarity
        assert_eq!(inst.distances().get(4, 6), &rat(2, 1));
        assert_eq!(inst.distances().get(5, 6), &rat(2, 1));
    }

    #[test]
    fn duplicate_clauses_get_their_own_sites() {
        // two copies of the same clause: one client site each, W counts both
        let sat = parse_wcnf("p wcnf 2 2\n3 1 2 0\n3 1 2 0\n").unwrap();
        let inst = build(&sat, &ReductionParams::default()).unwrap();
        assert_eq!(inst.num_sites(), 6);
        assert_eq!(sat.weight_bound(), 6);
        assert_eq!(
            inst.distances().get(4, 5),
            &rat(2, 1),
            "twin clause sites sit apart"
        );
        assert_eq!(inst.distances().get(0, 4), inst.distances().get(0, 5));
    }

    #[test]
    fn rejects_single_clause_instances() {
        let inst = parse_wcnf("p wcnf 2 1\n1 1 2 0\n").unwrap();
        assert_eq!(
            build(&inst, &ReductionParams::default()).unwrap_err(),
            ReduceError::TooFewClauses(1)
        );
    }

    #[test]
    fn predicted_cost_examples() {
        let inst = tiny1();
        let params = ReductionParams::default();
        let o = SolutionSet::from_members([0, 2]);
        assert_eq!(
            predicted_cost_reasonable(&inst, &params, &o).unwrap(),
            rat(9, 1)
        );
        let o = SolutionSet::from_members([1, 3]);
        assert_eq!(
            predicted_cost_reasonable(&inst, &params, &o).unwrap(),
            rat(37, 4)
        );
    }

    #[test]
    fn predicted_cost_with_everything_falsified() {
        // single-variable-pair clauses: x1 v x2 twice, weight 3 and 1
        let inst = parse_wcnf("p wcnf 2 2\n3 1 2 0\n1 1 2 0\n").unwrap();
        let params = ReductionParams::default();
        let o = SolutionSet::from_members([1, 3]); // {~x1, ~x2} falsifies both
                                                   // 3N + M + sum(w)/W + (c-1)/W * sum(w), with W = 6
        let expected = rat(6, 1) + rat(2, 1) + rat(4, 6) + rat(1, 2) * rat(4, 6);
        assert_eq!(
            predicted_cost_reasonable(&inst, &params, &o).unwrap(),
            expected
        );
    }

    #[test]
    fn predicted_cost_rejects_unreasonable_solutions() {
        let inst = tiny1();
        let params = ReductionParams::default();
        let err = predicted_cost_reasonable(&inst, &params, &SolutionSet::from_members([0, 1]))
            .unwrap_err();
        assert!(matches!(err, ReduceError::NotReasonable(_, 2)));
    }

    #[test]
    fn reduced_instance_is_metric() {
        assert!(tiny1_mufl().validate_metric().is_metric());
    }

    mod properties {
        use super::*;
        use crate::oracle::{random_instance, InstanceParams};
        use crate::reduce::{reasonable_from_assignment, reasonable_solutions};
        use proptest::prelude::*;

        fn instance_for(seed: u64) -> SatInstance {
            random_instance(
                &InstanceParams {
                    num_vars: 2 + (seed % 4) as u32,
                    num_clauses: 2 + (seed % 7) as usize,
                    max_weight: 9,
                },
                seed,
            )
        }

        proptest! {
            #[test]
            fn nonzero_distances_lie_in_unit_band(seed in 0u64..64) {
                let sat = instance_for(seed);
                let inst = build(&sat, &ReductionParams::default()).unwrap();
                let d = inst.distances();
                for i in 0..inst.num_sites() {
                    for j in 0..i {
                        let v = d.get(i, j);
                        prop_assert!(v >= &rat(1, 1) && v <= &rat(2, 1));
                    }
                }
                prop_assert!(inst.validate_metric().is_metric());
            }

            #[test]
            fn closed_form_matches_direct_cost(seed in 0u64..64) {
                let sat = instance_for(seed);
                let params = ReductionParams::default();
                let inst = build(&sat, &params).unwrap();
                for o in reasonable_solutions(sat.num_vars()) {
                    let direct = inst.phi(&o).unwrap().finite().unwrap();
                    let predicted = predicted_cost_reasonable(&sat, &params, &o).unwrap();
                    prop_assert_eq!(direct, predicted);
                }
            }

            #[test]
            fn cost_order_reverses_sat_order(seed in 0u64..32) {
                let sat = instance_for(seed);
                let params = ReductionParams::default();
                let inst = build(&sat, &params).unwrap();
                let evaluated: Vec<(u128, BigRational)> = reasonable_solutions(sat.num_vars())
                    .map(|o| {
                        let t = map_solution(&o, sat.num_vars());
                        (sat.cost(&t).unwrap(), inst.phi(&o).unwrap().finite().unwrap())
                    })
                    .collect();
                for (wa, pa) in &evaluated {
                    for (wb, pb) in &evaluated {
                        prop_assert_eq!(wa < wb, pa > pb);
                    }
                }
            }

            #[test]
            fn every_assignment_has_a_reasonable_preimage(bits in 0u64..32, n in 2u32..=5) {
                let values: Vec<bool> = (0..n).map(|v| bits >> v & 1 == 1).collect();
                let t = Assignment::new(values);
                let o = reasonable_from_assignment(&t);
                prop_assert!(is_reasonable(&o, n));
                prop_assert_eq!(map_solution(&o, n), t);
            }
        }
    }
}
