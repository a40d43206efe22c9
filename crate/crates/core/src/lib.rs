//! An exact laboratory for strict-improvement local search on three problems
//! that reduce into one another: weighted Max 2-SAT under variable flips,
//! metric uncapacitated facility location under single swaps, and discrete
//! k-means under swaps.
//!
//! The crate builds facility-location and k-means instances from Max 2-SAT
//! formulas, runs local search on all three problems with rational
//! arithmetic, brute-force-verifies the structural claims the constructions
//! rely on, and realizes k-means tables as actual point sets in squared
//! Euclidean space.
//!
//! All cost accounting is exact (`num_rational::BigRational`); floating
//! point appears only in the [`embed`] module, whose job is inherently
//! numerical.

pub mod dkm;
pub mod doc;
pub mod embed;
pub mod mufl;
pub mod oracle;
pub mod rational;
pub mod reduce;
pub mod sat;
pub mod search;
pub mod solution;
pub mod table;

pub use dkm::DkmInstance;
pub use mufl::{FlValue, MuflInstance};
pub use sat::{Assignment, Clause, Literal, SatInstance};
pub use search::{
    is_local_optimum, local_search, PivotRule, SearchConfig, Termination, Trajectory,
};
pub use solution::SolutionSet;
pub use table::DistanceTable;
