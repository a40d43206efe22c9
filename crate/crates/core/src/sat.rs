//! Weighted Max 2-SAT instances and the flip neighborhood.
//!
//! A [`SatInstance`] is an ordered list of two-literal clauses with positive
//! integer weights. The objective value of an [`Assignment`] is the total
//! weight of the clauses it satisfies; the flip neighborhood of an assignment
//! consists of the assignments differing in exactly one variable.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Errors from constructing or evaluating SAT data programmatically.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("clause weight must be >= 1")]
    NonPositiveWeight,
    #[error("clause weight {0} exceeds the supported bound {max}", max = u64::MAX)]
    WeightTooLarge(u128),
    #[error("clause literals must be over two distinct variables (got x{0} twice)")]
    DuplicateVariable(u32),
    #[error("variable index {var} out of range 1..={max}")]
    VariableOutOfRange { var: u32, max: u32 },
    #[error("variable index must be >= 1")]
    ZeroVariable,
    #[error("assignment has {got} values, instance has {expected} variables")]
    AssignmentLength { got: usize, expected: usize },
    #[error("assignment strings use only `0` and `1`, found `{0}`")]
    BadAssignmentChar(char),
}

/// Errors from parsing the WCNF text format, tagged with the offending line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct WcnfParseError {
    pub line: usize,
    pub kind: WcnfErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WcnfErrorKind {
    #[error("missing `p wcnf <vars> <clauses>` header")]
    MissingHeader,
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("clause line must read `<weight> <lit> <lit> 0`, got {found} literals")]
    WrongLiteralCount { found: usize },
    #[error("clause line must end with the terminator 0")]
    MissingTerminator,
    #[error("malformed token `{0}`")]
    BadToken(String),
    #[error("header promised {expected} clauses, file has {found}")]
    ClauseCount { expected: usize, found: usize },
    #[error(transparent)]
    Invalid(#[from] SatError),
}

/// A literal: a 1-based variable index with an optional negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: u32,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: u32) -> Literal {
        assert!(var >= 1, "variable index must be >= 1");
        Literal {
            var,
            negated: false,
        }
    }

    pub fn neg(var: u32) -> Literal {
        assert!(var >= 1, "variable index must be >= 1");
        Literal { var, negated: true }
    }

    /// Parses DIMACS-style encoding: positive integer for `x_n`, negative for its negation.
    pub fn from_dimacs(code: i64) -> Result<Literal, SatError> {
        if code == 0 {
            return Err(SatError::ZeroVariable);
        }
        let var = u32::try_from(code.unsigned_abs()).map_err(|_| SatError::VariableOutOfRange {
            var: u32::MAX,
            max: u32::MAX,
        })?;
        Ok(Literal {
            var,
            negated: code < 0,
        })
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var);
        if self.negated {
            -v
        } else {
            v
        }
    }

    /// The literal over the same variable with the opposite polarity.
    pub fn negation(self) -> Literal {
        Literal {
            var: self.var,
            negated: !self.negated,
        }
    }

    /// True iff the assignment makes this literal true.
    pub fn satisfied_by(self, assignment: &Assignment) -> bool {
        assignment.value(self.var) != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "~x{}", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

/// A two-literal clause with a positive integer weight.
///
/// The two literals are always over distinct variables; clauses of the form
/// `x v x` or `x v ~x` are rejected because the reductions built on top of
/// this type have no well-defined distance for them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Clause {
    literals: [Literal; 2],
    weight: u64,
}

impl Clause {
    pub fn new(first: Literal, second: Literal, weight: u64) -> Result<Clause, SatError> {
        if weight == 0 {
            return Err(SatError::NonPositiveWeight);
        }
        if first.var == second.var {
            return Err(SatError::DuplicateVariable(first.var));
        }
        Ok(Clause {
            literals: [first, second],
            weight,
        })
    }

    pub fn literals(&self) -> [Literal; 2] {
        self.literals
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }

    pub fn contains(&self, literal: Literal) -> bool {
        self.literals[0] == literal || self.literals[1] == literal
    }

    pub fn satisfied_by(&self, assignment: &Assignment) -> bool {
        self.literals[0].satisfied_by(assignment) || self.literals[1].satisfied_by(assignment)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} v {}, w={})",
            self.literals[0], self.literals[1], self.weight
        )
    }
}

/// A weighted Max 2-SAT instance: `num_vars` variables and an ordered clause list.
///
/// Clause weights are bounded by `u64`; weight sums are computed in `u128`,
/// which cannot overflow for any instance that fits in memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatInstance {
    num_vars: u32,
    clauses: Vec<Clause>,
}

impl SatInstance {
    pub fn new(num_vars: u32, clauses: Vec<Clause>) -> Result<SatInstance, SatError> {
        for clause in &clauses {
            for lit in clause.literals() {
                if lit.var == 0 {
                    return Err(SatError::ZeroVariable);
                }
                if lit.var > num_vars {
                    return Err(SatError::VariableOutOfRange {
                        var: lit.var,
                        max: num_vars,
                    });
                }
            }
        }
        Ok(SatInstance { num_vars, clauses })
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause(&self, index: usize) -> &Clause {
        &self.clauses[index]
    }

    /// Largest clause weight. Panics on an instance with no clauses.
    pub fn max_weight(&self) -> u64 {
        self.clauses
            .iter()
            .map(Clause::weight)
            .max()
            .expect("instance has no clauses")
    }

    /// Smallest clause weight. Panics on an instance with no clauses.
    pub fn min_weight(&self) -> u64 {
        self.clauses
            .iter()
            .map(Clause::weight)
            .min()
            .expect("instance has no clauses")
    }

    /// The normalization constant `W = M * w_max`.
    pub fn weight_bound(&self) -> u128 {
        self.clauses.len() as u128 * u128::from(self.max_weight())
    }

    /// Sum of all clause weights.
    pub fn total_weight(&self) -> u128 {
        self.clauses.iter().map(|c| u128::from(c.weight())).sum()
    }

    /// Total weight of the clauses satisfied by `assignment`.
    pub fn cost(&self, assignment: &Assignment) -> Result<u128, SatError> {
        self.check_assignment(assignment)?;
        Ok(self
            .clauses
            .iter()
            .filter(|c| c.satisfied_by(assignment))
            .map(|c| u128::from(c.weight()))
            .sum())
    }

    /// Splits clause indices into (satisfied, falsified), preserving instance order.
    pub fn partition_clauses(
        &self,
        assignment: &Assignment,
    ) -> Result<(Vec<usize>, Vec<usize>), SatError> {
        self.check_assignment(assignment)?;
        let mut satisfied = Vec::new();
        let mut falsified = Vec::new();
        for (index, clause) in self.clauses.iter().enumerate() {
            if clause.satisfied_by(assignment) {
                satisfied.push(index);
            } else {
                falsified.push(index);
            }
        }
        Ok((satisfied, falsified))
    }

    /// Indices of the clauses that contain `literal` with matching polarity.
    pub fn clauses_with_literal(&self, literal: Literal) -> Vec<usize> {
        self.clauses
            .iter()
            .enumerate()
            .filter(|(_, c)| c.contains(literal))
            .map(|(i, _)| i)
            .collect()
    }

    fn check_assignment(&self, assignment: &Assignment) -> Result<(), SatError> {
        if assignment.len() != self.num_vars as usize {
            return Err(SatError::AssignmentLength {
                got: assignment.len(),
                expected: self.num_vars as usize,
            });
        }
        Ok(())
    }

    /// Emits the WCNF dialect accepted by [`parse_wcnf`].
    pub fn to_wcnf(&self) -> String {
        let mut out = format!("p wcnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            let [a, b] = clause.literals();
            out.push_str(&format!(
                "{} {} {} 0\n",
                clause.weight(),
                a.to_dimacs(),
                b.to_dimacs()
            ));
        }
        out
    }
}

/// A truth value per variable, indexed 1..=N.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Assignment {
        Assignment { values }
    }

    pub fn all_false(num_vars: u32) -> Assignment {
        Assignment {
            values: vec![false; num_vars as usize],
        }
    }

    pub fn all_true(num_vars: u32) -> Assignment {
        Assignment {
            values: vec![true; num_vars as usize],
        }
    }

    /// Uniformly random assignment, e.g. for randomized search starts.
    pub fn random<R: rand::Rng>(num_vars: u32, rng: &mut R) -> Assignment {
        Assignment {
            values: (0..num_vars).map(|_| rng.gen()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Truth value of variable `var` (1-based).
    pub fn value(&self, var: u32) -> bool {
        self.values[(var - 1) as usize]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// A copy with variable `var` flipped.
    pub fn flipped(&self, var: u32) -> Assignment {
        let mut values = self.values.clone();
        values[(var - 1) as usize] = !values[(var - 1) as usize];
        Assignment { values }
    }

    /// All assignments at Hamming distance one, in variable order.
    pub fn flip_neighbors(&self) -> Vec<Assignment> {
        (1..=self.values.len() as u32)
            .map(|var| self.flipped(var))
            .collect()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &v in &self.values {
            write!(f, "{}", if v { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl FromStr for Assignment {
    type Err = SatError;

    fn from_str(s: &str) -> Result<Assignment, SatError> {
        let mut values = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => values.push(false),
                '1' => values.push(true),
                other => return Err(SatError::BadAssignmentChar(other)),
            }
        }
        Ok(Assignment { values })
    }
}

/// Parses the WCNF dialect: `c` comment lines, a `p wcnf <vars> <clauses>`
/// header, then exactly `<clauses>` lines of the form `<w> <l1> <l2> 0`.
pub fn parse_wcnf(text: &str) -> Result<SatInstance, WcnfParseError> {
    let err = |line: usize, kind: WcnfErrorKind| WcnfParseError { line, kind };

    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('c'));

    let (header_line, header) = lines.next().ok_or(err(0, WcnfErrorKind::MissingHeader))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 4 || tokens[0] != "p" || tokens[1] != "wcnf" {
        return Err(err(
            header_line,
            WcnfErrorKind::MalformedHeader(header.to_string()),
        ));
    }
    let num_vars: u32 = tokens[2]
        .parse()
        .map_err(|_| err(header_line, WcnfErrorKind::BadToken(tokens[2].to_string())))?;
    let num_clauses: usize = tokens[3]
        .parse()
        .map_err(|_| err(header_line, WcnfErrorKind::BadToken(tokens[3].to_string())))?;

    let mut clauses = Vec::with_capacity(num_clauses);
    for (line_no, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.last() != Some(&"0") {
            return Err(err(line_no, WcnfErrorKind::MissingTerminator));
        }
        if tokens.len() != 4 {
            return Err(err(
                line_no,
                WcnfErrorKind::WrongLiteralCount {
                    found: tokens.len() - 2,
                },
            ));
        }
        let weight: i128 = tokens[0]
            .parse()
            .map_err(|_| err(line_no, WcnfErrorKind::BadToken(tokens[0].to_string())))?;
        if weight <= 0 {
            return Err(err(line_no, SatError::NonPositiveWeight.into()));
        }
        let weight = u64::try_from(weight)
            .map_err(|_| err(line_no, SatError::WeightTooLarge(weight as u128).into()))?;
        let mut lits = [Literal::pos(1); 2];
        for (slot, token) in lits.iter_mut().zip(&tokens[1..3]) {
            let code: i64 = token
                .parse()
                .map_err(|_| err(line_no, WcnfErrorKind::BadToken(token.to_string())))?;
            let lit = Literal::from_dimacs(code).map_err(|e| err(line_no, e.into()))?;
            if lit.var > num_vars {
                return Err(err(
                    line_no,
                    SatError::VariableOutOfRange {
                        var: lit.var,
                        max: num_vars,
                    }
                    .into(),
                ));
            }
            *slot = lit;
        }
        let clause = Clause::new(lits[0], lits[1], weight).map_err(|e| err(line_no, e.into()))?;
        clauses.push(clause);
        if clauses.len() > num_clauses {
            break;
        }
    }

    if clauses.len() != num_clauses {
        return Err(err(
            0,
            WcnfErrorKind::ClauseCount {
                expected: num_clauses,
                found: clauses.len(),
            },
        ));
    }
    SatInstance::new(num_vars, clauses).map_err(|e| err(0, e.into()))
}
