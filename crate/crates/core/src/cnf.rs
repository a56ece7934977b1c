//! CNF formulas, truth assignments and the clause-counting fitness.
//!
//! Variables are 1-indexed in literals and DIMACS text; bit `i` of an
//! [`Assignment`] holds the value of variable `i + 1`.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A variable or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    variable: u32,
    negated: bool,
}

impl Literal {
    /// `variable` is 1-based and must be nonzero.
    pub fn new(variable: u32, negated: bool) -> Result<Self> {
        if variable == 0 {
            return Err(invalid("literal variable index must be >= 1"));
        }
        Ok(Self { variable, negated })
    }

    pub fn positive(variable: u32) -> Result<Self> {
        Self::new(variable, false)
    }

    pub fn negative(variable: u32) -> Result<Self> {
        Self::new(variable, true)
    }

    /// Builds a literal from its signed DIMACS integer.
    pub fn from_dimacs(value: i64) -> Result<Self> {
        let variable = u32::try_from(value.unsigned_abs())
            .map_err(|_| invalid(format!("literal {value} out of range")))?;
        Self::new(variable, value < 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.variable);
        if self.negated {
            -v
        } else {
            v
        }
    }

    pub fn variable(self) -> u32 {
        self.variable
    }

    pub fn is_negated(self) -> bool {
        self.negated
    }

    #[inline]
    pub fn is_true_under(self, bits: &[bool]) -> bool {
        bits[self.variable as usize - 1] != self.negated
    }
}

/// A non-empty disjunction of literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Result<Self> {
        if literals.is_empty() {
            return Err(invalid("clause must contain at least one literal"));
        }
        Ok(Self { literals })
    }

    /// Convenience constructor from signed DIMACS integers.
    pub fn from_dimacs(values: &[i64]) -> Result<Self> {
        values
            .iter()
            .map(|&v| Literal::from_dimacs(v))
            .collect::<Result<Vec<_>>>()
            .and_then(Self::new)
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    #[inline]
    pub fn is_satisfied_by(&self, bits: &[bool]) -> bool {
        self.literals.iter().any(|l| l.is_true_under(bits))
    }
}

/// A conjunction of clauses over `num_vars` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FormulaRepr")]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Clause>,
    /// For each 0-based variable, the indices of the clauses mentioning it.
    #[serde(skip)]
    occurrences: Vec<Vec<u32>>,
}

#[derive(Deserialize)]
struct FormulaRepr {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl TryFrom<FormulaRepr> for CnfFormula {
    type Error = Error;

    fn try_from(repr: FormulaRepr) -> Result<Self> {
        Self::new(repr.num_vars, repr.clauses)
    }
}

impl CnfFormula {
    /// Validates that every literal refers to a variable in `1..=num_vars`.
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self> {
        if num_vars == 0 {
            return Err(invalid("formula must have at least one variable"));
        }
        for (i, clause) in clauses.iter().enumerate() {
            if let Some(lit) = clause
                .literals
                .iter()
                .find(|l| l.variable as usize > num_vars)
            {
                return Err(invalid(format!(
                    "clause {i}: variable {} exceeds num_vars {num_vars}",
                    lit.variable
                )));
            }
        }
        Ok(Self::indexed(num_vars, clauses))
    }

    fn indexed(num_vars: usize, clauses: Vec<Clause>) -> Self {
        let mut occurrences = vec![Vec::new(); num_vars];
        for (i, clause) in clauses.iter().enumerate() {
            for lit in &clause.literals {
                let list: &mut Vec<u32> = &mut occurrences[lit.variable as usize - 1];
                if list.last() != Some(&(i as u32)) {
                    list.push(i as u32);
                }
            }
        }
        Self {
            num_vars,
            clauses,
            occurrences,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Number of clauses with at least one true literal under `assignment`.
    pub fn count_satisfied(&self, assignment: &Assignment) -> Result<usize> {
        self.check_len(assignment)?;
        Ok(self.count_satisfied_bits(&assignment.bits))
    }

    /// `true` iff every clause is satisfied.
    pub fn is_satisfying(&self, assignment: &Assignment) -> Result<bool> {
        Ok(self.count_satisfied(assignment)? == self.clauses.len())
    }

    pub(crate) fn count_satisfied_bits(&self, bits: &[bool]) -> usize {
        debug_assert_eq!(bits.len(), self.num_vars);
        self.clauses
            .iter()
            .filter(|c| c.is_satisfied_by(bits))
            .count()
    }

    /// Fitness of `after`, which differs from `before` exactly at the
    /// distinct 0-based positions in `flipped`, given that `before` satisfies
    /// `fitness_before` clauses. Only clauses touching a flipped variable are
    /// re-evaluated.
    pub(crate) fn count_satisfied_after_flips(
        &self,
        before: &[bool],
        fitness_before: usize,
        after: &[bool],
        flipped: &[usize],
    ) -> usize {
        let touched: usize = flipped.iter().map(|&v| self.occurrences[v].len()).sum();
        if touched >= self.clauses.len() {
            return self.count_satisfied_bits(after);
        }
        let mut affected: Vec<u32> = Vec::with_capacity(touched);
        for &v in flipped {
            affected.extend_from_slice(&self.occurrences[v]);
        }
        affected.sort_unstable();
        affected.dedup();
        let (mut lost, mut gained) = (0usize, 0usize);
        for &i in &affected {
            let clause = &self.clauses[i as usize];
            match (
                clause.is_satisfied_by(before),
                clause.is_satisfied_by(after),
            ) {
                (true, false) => lost += 1,
                (false, true) => gained += 1,
                _ => {}
            }
        }
        fitness_before + gained - lost
    }

    fn check_len(&self, assignment: &Assignment) -> Result<()> {
        if assignment.len() != self.num_vars {
            return Err(invalid(format!(
                "assignment has {} bits, formula has {} variables",
                assignment.len(),
                self.num_vars
            )));
        }
        Ok(())
    }

    /// Parses DIMACS CNF text.
    ///
    /// Lines starting with `c` are comments. A line starting with `%` ends
    /// the clause section, as in the SATLIB uniform random files. Clauses
    /// may span lines and are terminated by `0`.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current: Vec<Literal> = Vec::new();
        let mut last_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line.starts_with('%') {
                break;
            }
            if line.starts_with('p') {
                if header.is_some() {
                    return Err(parse_err(line_no, "duplicate problem header"));
                }
                header = Some(parse_header(line, line_no)?);
                continue;
            }
            let Some((num_vars, _)) = header else {
                return Err(parse_err(line_no, "clause data before 'p cnf' header"));
            };
            for token in line.split_whitespace() {
                let value: i64 = token
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("invalid integer '{token}'")))?;
                if value == 0 {
                    if current.is_empty() {
                        return Err(parse_err(line_no, "empty clause"));
                    }
                    clauses.push(Clause {
                        literals: std::mem::take(&mut current),
                    });
                    continue;
                }
                if value.unsigned_abs() > num_vars as u64 {
                    return Err(parse_err(
                        line_no,
                        format!("literal {value} exceeds variable count {num_vars}"),
                    ));
                }
                current.push(Literal {
                    variable: value.unsigned_abs() as u32,
                    negated: value < 0,
                });
            }
        }

        let Some((num_vars, num_clauses)) = header else {
            return Err(parse_err(last_line.max(1), "missing 'p cnf' header"));
        };
        if !current.is_empty() {
            return Err(parse_err(last_line, "last clause is not terminated by 0"));
        }
        if clauses.len() != num_clauses {
            return Err(parse_err(
                last_line,
                format!(
                    "header declares {num_clauses} clauses but {} were found",
                    clauses.len()
                ),
            ));
        }
        Ok(Self::indexed(num_vars, clauses))
    }

    /// DIMACS text: a header line, then one clause per line ending in `0`.
    pub fn to_dimacs(&self) -> String {
        self.to_string()
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line: &str, line_no: usize) -> Result<(usize, usize)> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != 4 || tokens[0] != "p" || tokens[1] != "cnf" {
        return Err(parse_err(line_no, "expected 'p cnf <vars> <clauses>'"));
    }
    let num = |t: &str| {
        t.parse::<usize>()
            .map_err(|_| parse_err(line_no, format!("invalid count '{t}' in header")))
    };
    let num_vars = num(tokens[2])?;
    if num_vars == 0 || num_vars > u32::MAX as usize {
        return Err(parse_err(line_no, "variable count must be in 1..=u32::MAX"));
    }
    Ok((num_vars, num(tokens[3])?))
}

impl FromStr for CnfFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_dimacs(s)
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        for clause in &self.clauses {
            for lit in &clause.literals {
                write!(f, "{} ", lit.to_dimacs())?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

/// Uniform random 3-SAT with `round(ratio * num_vars)` clauses.
pub fn generate_random_3sat(num_vars: usize, ratio: f64, seed: u64) -> Result<CnfFormula> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(invalid(format!(
            "clause ratio must be positive, got {ratio}"
        )));
    }
    let num_clauses = (ratio * num_vars as f64).round() as usize;
    generate_random_3sat_sized(num_vars, num_clauses, seed)
}

/// Uniform random 3-SAT with an explicit clause count.
///
/// Each clause draws three distinct variables without replacement and
/// negates each one independently with probability 1/2.
pub fn generate_random_3sat_sized(
    num_vars: usize,
    num_clauses: usize,
    seed: u64,
) -> Result<CnfFormula> {
    if num_vars < 3 {
        return Err(invalid(format!(
            "random 3-SAT needs at least 3 variables, got {num_vars}"
        )));
    }
    if num_vars > u32::MAX as usize {
        return Err(invalid("too many variables"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses = (0..num_clauses)
        .map(|_| {
            let literals = index::sample(&mut rng, num_vars, 3)
                .into_iter()
                .map(|v| Literal {
                    variable: v as u32 + 1,
                    negated: rng.gen_bool(0.5),
                })
                .collect();
            Clause { literals }
        })
        .collect();
    Ok(CnfFormula::indexed(num_vars, clauses))
}

/// A truth assignment; `bits[i]` is the value of variable `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self {
            bits: (0..len).map(|_| rng.gen_bool(0.5)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub(crate) fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.bits
    }

    /// Value of the 1-based `variable`.
    pub fn value(&self, variable: u32) -> bool {
        self.bits[variable as usize - 1]
    }

    /// Signed literals in DIMACS order, as printed on a `v` line.
    pub fn to_literals(&self) -> Vec<i64> {
        self.bits
            .iter()
            .enumerate()
            .map(|(i, &b)| if b { i as i64 + 1 } else { -(i as i64 + 1) })
            .collect()
    }
}

/// Bit string such as `"0110"`; the first character is variable 1.
impl FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(invalid(format!("invalid bit '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}
