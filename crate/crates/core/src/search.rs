//! Generic strict-improvement local search over (solution, neighborhood, cost).
//!
//! The engine is deliberately simple: enumerate the neighbor moves of the
//! current solution in the problem's documented order, pick one that strictly
//! improves the objective under the configured pivot rule, repeat. Equal-cost
//! neighbors are never accepted, so every trajectory is strictly monotone and
//! terminates on finite solution spaces.

use std::fmt;
use std::io::{self, Write};

use num_rational::BigRational;
use thiserror::Error;

use crate::dkm::DkmInstance;
use crate::mufl::MuflInstance;
use crate::sat::{Assignment, SatInstance};
use crate::solution::SolutionSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("start solution is infeasible: {0}")]
    InfeasibleStart(String),
    #[error("solution is infeasible: {0}")]
    InfeasibleSolution(String),
}

/// Whether lower or higher cost wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Scan every neighbor, move to the best strict improvement; ties break
    /// toward the earliest move in enumeration order.
    #[default]
    BestImprovement,
    /// Move to the first strict improvement in enumeration order.
    FirstImprovement,
}

impl fmt::Display for PivotRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PivotRule::BestImprovement => write!(f, "best_improvement"),
            PivotRule::FirstImprovement => write!(f, "first_improvement"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub pivot_rule: PivotRule,
    pub max_steps: Option<u64>,
    /// Seed recorded for reproducibility; the engine itself is deterministic,
    /// randomness only enters through caller-provided start solutions.
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            pivot_rule: PivotRule::BestImprovement,
            max_steps: None,
            seed: 0,
        }
    }
}

/// One elementary move, named by what it does to the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveDesc {
    Flip { var: u32 },
    Open { facility: usize },
    Close { facility: usize },
    Swap { out: usize, inn: usize },
}

impl fmt::Display for MoveDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveDesc::Flip { var } => write!(f, "flip {var}"),
            MoveDesc::Open { facility } => write!(f, "open {facility}"),
            MoveDesc::Close { facility } => write!(f, "close {facility}"),
            MoveDesc::Swap { out, inn } => write!(f, "swap {out}->{inn}"),
        }
    }
}

/// A local-search problem: feasibility, exact cost, and the neighbor moves
/// of a solution in a fixed deterministic order.
pub trait SearchProblem {
    type Solution: Clone + Eq + Ord + fmt::Debug + fmt::Display;
    type Cost: Clone + Eq + Ord + fmt::Debug + fmt::Display;

    fn objective(&self) -> Objective;
    fn is_feasible(&self, solution: &Self::Solution) -> bool;
    fn cost(&self, solution: &Self::Solution) -> Self::Cost;
    fn neighbor_moves(&self, solution: &Self::Solution) -> Vec<(MoveDesc, Self::Solution)>;

    fn improves(&self, candidate: &Self::Cost, incumbent: &Self::Cost) -> bool {
        match self.objective() {
            Objective::Minimize => candidate < incumbent,
            Objective::Maximize => candidate > incumbent,
        }
    }
}

/// Problems whose full solution space can be walked, for brute-force oracles.
pub trait EnumerableProblem: SearchProblem {
    /// Number of feasible solutions; saturates at `u128::MAX` on overflow.
    fn solution_count(&self) -> u128;
    /// All feasible solutions in a fixed deterministic order.
    fn solutions(&self) -> Box<dyn Iterator<Item = Self::Solution> + '_>;
    /// Whether any neighbor strictly improves; problems override this with
    /// incremental evaluations, the default recomputes every neighbor.
    fn has_improving_neighbor(&self, solution: &Self::Solution) -> bool {
        let current = self.cost(solution);
        self.neighbor_moves(solution)
            .iter()
            .any(|(_, neighbor)| self.improves(&self.cost(neighbor), &current))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    LocalOptimum,
    StepBudget,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Termination::LocalOptimum => write!(f, "local_optimum"),
            Termination::StepBudget => write!(f, "step_budget"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step<S, C> {
    pub mv: MoveDesc,
    pub solution: S,
    pub cost: C,
}

/// The full record of one local-search run: the start, every improving step
/// in order, and why the run stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory<S, C> {
    pub start: S,
    pub start_cost: C,
    pub steps: Vec<Step<S, C>>,
    pub terminated: Termination,
}

impl<S, C> Trajectory<S, C> {
    pub fn final_solution(&self) -> &S {
        self.steps.last().map_or(&self.start, |s| &s.solution)
    }

    pub fn final_cost(&self) -> &C {
        self.steps.last().map_or(&self.start_cost, |s| &s.cost)
    }

    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn reached_local_optimum(&self) -> bool {
        self.terminated == Termination::LocalOptimum
    }
}

impl<S, C: fmt::Display> Trajectory<S, C> {
    /// One line per improving step: `step<TAB>cost<TAB>move`.
    pub fn write_log<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (index, step) in self.steps.iter().enumerate() {
            writeln!(out, "{}\t{}\t{}", index + 1, step.cost, step.mv)?;
        }
        Ok(())
    }
}

/// Runs strict-improvement local search from `start` until a local optimum
/// or the step budget is reached.
pub fn local_search<P: SearchProblem>(
    problem: &P,
    start: P::Solution,
    config: &SearchConfig,
) -> Result<Trajectory<P::Solution, P::Cost>, SearchError> {
    if !problem.is_feasible(&start) {
        return Err(SearchError::InfeasibleStart(start.to_string()));
    }
    let start_cost = problem.cost(&start);
    let mut current = start.clone();
    let mut current_cost = start_cost.clone();
    let mut steps = Vec::new();
    let terminated = loop {
        let chosen = select_move(problem, &current, &current_cost, config.pivot_rule);
        let Some((mv, solution, cost)) = chosen else {
            break Termination::LocalOptimum;
        };
        if config
            .max_steps
            .is_some_and(|budget| steps.len() as u64 >= budget)
        {
            break Termination::StepBudget;
        }
        current = solution.clone();
        current_cost = cost.clone();
        steps.push(Step { mv, solution, cost });
    };
    Ok(Trajectory {
        start,
        start_cost,
        steps,
        terminated,
    })
}

fn select_move<P: SearchProblem>(
    problem: &P,
    current: &P::Solution,
    current_cost: &P::Cost,
    pivot: PivotRule,
) -> Option<(MoveDesc, P::Solution, P::Cost)> {
    let mut best: Option<(MoveDesc, P::Solution, P::Cost)> = None;
    for (mv, neighbor) in problem.neighbor_moves(current) {
        let cost = problem.cost(&neighbor);
        if !problem.improves(&cost, current_cost) {
            continue;
        }
        match pivot {
            PivotRule::FirstImprovement => return Some((mv, neighbor, cost)),
            PivotRule::BestImprovement => {
                // strict comparison keeps the earliest move among ties
                if best
                    .as_ref()
                    .is_none_or(|(_, _, bc)| problem.improves(&cost, bc))
                {
                    best = Some((mv, neighbor, cost));
                }
            }
        }
    }
    best
}

/// True iff no neighbor strictly improves the objective. Independent of any
/// pivot rule by construction.
pub fn is_local_optimum<P: SearchProblem>(
    problem: &P,
    solution: &P::Solution,
) -> Result<bool, SearchError> {
    if !problem.is_feasible(solution) {
        return Err(SearchError::InfeasibleSolution(solution.to_string()));
    }
    let current = problem.cost(solution);
    Ok(!problem
        .neighbor_moves(solution)
        .iter()
        .any(|(_, neighbor)| problem.improves(&problem.cost(neighbor), &current)))
}

/// Max 2-SAT under the flip neighborhood (maximize satisfied weight).
pub struct SatFlip<'a> {
    pub instance: &'a SatInstance,
}

impl SearchProblem for SatFlip<'_> {
    type Solution = Assignment;
    type Cost = u128;

    fn objective(&self) -> Objective {
        Objective::Maximize
    }

    fn is_feasible(&self, solution: &Assignment) -> bool {
        solution.len() == self.instance.num_vars() as usize
    }

    fn cost(&self, solution: &Assignment) -> u128 {
        self.instance
            .cost(solution)
            .expect("feasibility checked by engine")
    }

    fn neighbor_moves(&self, solution: &Assignment) -> Vec<(MoveDesc, Assignment)> {
        (1..=self.instance.num_vars())
            .map(|var| (MoveDesc::Flip { var }, solution.flipped(var)))
            .collect()
    }
}

impl EnumerableProblem for SatFlip<'_> {
    fn solution_count(&self) -> u128 {
        1u128
            .checked_shl(self.instance.num_vars())
            .unwrap_or(u128::MAX)
    }

    fn solutions(&self) -> Box<dyn Iterator<Item = Assignment> + '_> {
        let n = self.instance.num_vars();
        assert!(
            n <= 60,
            "exhaustive enumeration over {n} variables is not supported"
        );
        Box::new(
            (0..1u64 << n)
                .map(move |bits| Assignment::new((0..n).map(|v| bits >> v & 1 == 1).collect())),
        )
    }
}

/// Facility location under open/close/swap (minimize service plus opening).
pub struct MuflSwap<'a> {
    pub instance: &'a MuflInstance,
}

impl SearchProblem for MuflSwap<'_> {
    type Solution = SolutionSet;
    type Cost = BigRational;

    fn objective(&self) -> Objective {
        Objective::Minimize
    }

    fn is_feasible(&self, solution: &SolutionSet) -> bool {
        !solution.is_empty()
            && solution
                .max_member()
                .is_none_or(|m| m < self.instance.num_facilities())
    }

    fn cost(&self, solution: &SolutionSet) -> BigRational {
        self.instance
            .phi(solution)
            .expect("feasibility checked by engine")
            .finite()
            .expect("nonempty solutions have finite cost")
    }

    fn neighbor_moves(&self, solution: &SolutionSet) -> Vec<(MoveDesc, SolutionSet)> {
        self.instance.swap_moves(solution)
    }
}

impl EnumerableProblem for MuflSwap<'_> {
    fn solution_count(&self) -> u128 {
        u32::try_from(self.instance.num_facilities())
            .ok()
            .and_then(|f| 1u128.checked_shl(f))
            .map(|c| c - 1)
            .unwrap_or(u128::MAX)
    }

    fn solutions(&self) -> Box<dyn Iterator<Item = SolutionSet> + '_> {
        let f = self.instance.num_facilities();
        assert!(
            f <= 60,
            "exhaustive enumeration over {f} facilities is not supported"
        );
        Box::new((1..1u64 << f).map(SolutionSet::from_bits))
    }

    fn has_improving_neighbor(&self, solution: &SolutionSet) -> bool {
        crate::mufl::has_improving_swap(self.instance, solution)
    }
}

/// Discrete k-means under swap-only moves (minimize squared service cost).
pub struct DkmSwap<'a> {
    pub instance: &'a DkmInstance,
}

impl SearchProblem for DkmSwap<'_> {
    type Solution = SolutionSet;
    type Cost = BigRational;

    fn objective(&self) -> Objective {
        Objective::Minimize
    }

    fn is_feasible(&self, solution: &SolutionSet) -> bool {
        solution.len() == self.instance.k()
            && solution
                .max_member()
                .is_none_or(|m| m < self.instance.num_points())
    }

    fn cost(&self, solution: &SolutionSet) -> BigRational {
        self.instance
            .phi(solution)
            .expect("feasibility checked by engine")
    }

    fn neighbor_moves(&self, solution: &SolutionSet) -> Vec<(MoveDesc, SolutionSet)> {
        self.instance.swap_moves(solution)
    }
}

impl EnumerableProblem for DkmSwap<'_> {
    fn solution_count(&self) -> u128 {
        binomial_u128(self.instance.num_points(), self.instance.k())
    }

    fn solutions(&self) -> Box<dyn Iterator<Item = SolutionSet> + '_> {
        Box::new(Combinations::new(
            self.instance.num_points(),
            self.instance.k(),
        ))
    }

    fn has_improving_neighbor(&self, solution: &SolutionSet) -> bool {
        crate::dkm::has_improving_swap(self.instance, solution)
    }
}

fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 0..k {
        let Some(next) = result.checked_mul((n - i) as u128) else {
            return u128::MAX;
        };
        result = next / (i as u128 + 1);
    }
    result
}

/// Lexicographic k-subsets of `0..n`.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Combinations {
        let current = (k <= n).then(|| (0..k).collect());
        Combinations { n, current }
    }
}

impl Iterator for Combinations {
    type Item = SolutionSet;

    fn next(&mut self) -> Option<SolutionSet> {
        let indices = self.current.as_mut()?;
        let result = SolutionSet::from_members(indices.iter().copied());
        let k = indices.len();
        // advance to the next combination
        let mut pos = k;
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            if indices[pos] < self.n - (k - pos) {
                indices[pos] += 1;
                for later in (pos + 1)..k {
                    indices[later] = indices[later - 1] + 1;
                }
                break;
            }
        }
        Some(result)
    }
}
