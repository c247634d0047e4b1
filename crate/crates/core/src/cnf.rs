//! CNF formulas, truth assignments and DIMACS input/output.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest variable count accepted by [`brute_force_sat`].
pub const BRUTE_FORCE_MAX_VARS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("line {line}: malformed header {text:?}")]
    BadHeader { line: usize, text: String },
    #[error("missing 'p cnf' header")]
    MissingHeader,
    #[error("line {line}: malformed literal {text:?}")]
    BadLiteral { line: usize, text: String },
    #[error("variable {var} out of range 1..={n}")]
    VariableOutOfRange { var: u64, n: usize },
    #[error("clause {clause} is empty")]
    EmptyClause { clause: usize },
    #[error("clause {clause} contains variable {var} in both polarities")]
    Contradictory { clause: usize, var: usize },
    #[error("instance has no clauses")]
    NoClauses,
    #[error("instance has no variables")]
    NoVariables,
    #[error("header announces {expected} clauses, found {found}")]
    ClauseCountMismatch { expected: usize, found: usize },
    #[error("last clause is not terminated by 0")]
    Unterminated,
    #[error("{n} variables exceed the enumeration limit of {limit}")]
    TooManyVariables { n: usize, limit: usize },
    #[error("assignment covers {got} variables, instance has {expected}")]
    AssignmentSize { got: usize, expected: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Self { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Self {
            var,
            positive: false,
        }
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }

    pub fn is_satisfied_by(self, value: bool) -> bool {
        value == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// How a variable occurs in one clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Occurrence {
    Positive,
    Negative,
    Absent,
}

/// A clause: a nonempty set of literals without complementary pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clause {
    literals: BTreeSet<Literal>,
}

impl Clause {
    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.literals.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn occurrence(&self, var: usize) -> Occurrence {
        if self.literals.contains(&Literal::pos(var)) {
            Occurrence::Positive
        } else if self.literals.contains(&Literal::neg(var)) {
            Occurrence::Negative
        } else {
            Occurrence::Absent
        }
    }

    pub fn is_satisfied_by(&self, a: &Assignment) -> bool {
        self.literals
            .iter()
            .any(|l| l.is_satisfied_by(a.value(l.var)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CnfInstance {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl CnfInstance {
    /// Builds an instance from DIMACS-style signed integers per clause.
    pub fn new(num_vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self, CnfError> {
        if num_vars == 0 {
            return Err(CnfError::NoVariables);
        }
        if clauses.is_empty() {
            return Err(CnfError::NoClauses);
        }
        let mut out = Vec::with_capacity(clauses.len());
        for (idx, raw) in clauses.into_iter().enumerate() {
            let clause_no = idx + 1;
            if raw.is_empty() {
                return Err(CnfError::EmptyClause { clause: clause_no });
            }
            let mut lits = BTreeSet::new();
            for x in raw {
                let var = x.unsigned_abs();
                if x == 0 || var as usize > num_vars {
                    return Err(CnfError::VariableOutOfRange { var, n: num_vars });
                }
                let var = var as usize;
                let lit = Literal {
                    var,
                    positive: x > 0,
                };
                if lits.contains(&Literal {
                    var,
                    positive: !lit.positive,
                }) {
                    return Err(CnfError::Contradictory {
                        clause: clause_no,
                        var,
                    });
                }
                lits.insert(lit);
            }
            out.push(Clause { literals: lits });
        }
        Ok(Self {
            num_vars,
            clauses: out,
        })
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

    /// Clause `j`, 1-based.
    pub fn clause(&self, j: usize) -> &Clause {
        &self.clauses[j - 1]
    }

    /// Gadget height used by the reduction: `4l + n - 2`.
    pub fn height(&self) -> usize {
        4 * self.clauses.len() + self.num_vars - 2
    }

    pub fn is_satisfied_by(&self, a: &Assignment) -> bool {
        self.clauses.iter().all(|c| c.is_satisfied_by(a))
    }

    /// 1-based indices of clauses not satisfied by `a`.
    pub fn unsatisfied_clauses(&self, a: &Assignment) -> Vec<usize> {
        self.clauses
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_satisfied_by(a))
            .map(|(i, _)| i + 1)
            .collect()
    }
}

/// Total truth assignment on variables `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Self { values }
    }

    pub fn all(n: usize, value: bool) -> Self {
        Self {
            values: vec![value; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    /// Value of variable `var`, 1-based.
    pub fn value(&self, var: usize) -> bool {
        self.values[var - 1]
    }

    pub fn set(&mut self, var: usize, value: bool) {
        self.values[var - 1] = value;
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// Parses a string of `1`/`0` or `T`/`F` characters, variable 1 first.
    pub fn parse_bits(text: &str) -> Option<Self> {
        let mut values = Vec::new();
        for ch in text.trim().chars() {
            match ch {
                '1' | 'T' | 't' => values.push(true),
                '0' | 'F' | 'f' => values.push(false),
                _ => return None,
            }
        }
        if values.is_empty() {
            None
        } else {
            Some(Self { values })
        }
    }

    pub fn to_bits(&self) -> String {
        self.values
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    pub fn check_size(&self, inst: &CnfInstance) -> Result<(), CnfError> {
        if self.values.len() != inst.num_vars() {
            return Err(CnfError::AssignmentSize {
                got: self.values.len(),
                expected: inst.num_vars(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bits())
    }
}

pub fn parse_dimacs(text: &str) -> Result<CnfInstance, CnfError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(CnfError::BadHeader {
                    line: line_no,
                    text: line.to_string(),
                });
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parsed = match parts.as_slice() {
                ["p", "cnf", n, m] => n.parse::<usize>().ok().zip(m.parse::<usize>().ok()),
                _ => None,
            };
            header = Some(parsed.ok_or_else(|| CnfError::BadHeader {
                line: line_no,
                text: line.to_string(),
            })?);
            continue;
        }
        let Some((n, _)) = header else {
            return Err(CnfError::MissingHeader);
        };
        // DIMACS allows a trailing '%' terminator in some benchmark sets.
        if line.starts_with('%') {
            break;
        }
        for tok in line.split_whitespace() {
            let x: i64 = tok.parse().map_err(|_| CnfError::BadLiteral {
                line: line_no,
                text: tok.to_string(),
            })?;
            if x == 0 {
                if current.is_empty() {
                    return Err(CnfError::EmptyClause {
                        clause: clauses.len() + 1,
                    });
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                if x.unsigned_abs() as usize > n {
                    return Err(CnfError::VariableOutOfRange {
                        var: x.unsigned_abs(),
                        n,
                    });
                }
                current.push(x);
            }
        }
    }
    let (n, m) = header.ok_or(CnfError::MissingHeader)?;
    if !current.is_empty() {
        return Err(CnfError::Unterminated);
    }
    if clauses.len() != m {
        return Err(CnfError::ClauseCountMismatch {
            expected: m,
            found: clauses.len(),
        });
    }
    CnfInstance::new(n, clauses)
}

/// Canonical DIMACS text: literals within a clause ordered by variable.
pub fn serialize_dimacs(inst: &CnfInstance) -> String {
    let mut out = format!("p cnf {} {}\n", inst.num_vars, inst.clauses.len());
    for c in &inst.clauses {
        for l in c.literals() {
            out.push_str(&l.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

/// Lexicographically first satisfying assignment, variable 1 most
/// significant and `false` before `true`.
pub fn brute_force_sat(inst: &CnfInstance) -> Result<Option<Assignment>, CnfError> {
    let n = inst.num_vars();
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(CnfError::TooManyVariables {
            n,
            limit: BRUTE_FORCE_MAX_VARS,
        });
    }
    // Clause masks over bit (n - var), so counting up enumerates in order.
    let masks: Vec<(u32, u32)> = inst
        .clauses
        .iter()
        .map(|c| {
            let mut pos = 0u32;
            let mut neg = 0u32;
            for l in c.literals() {
                let bit = 1u32 << (n - l.var);
                if l.positive {
                    pos |= bit;
                } else {
                    neg |= bit;
                }
            }
            (pos, neg)
        })
        .collect();
    for x in 0u32..(1u32 << n) {
        if masks.iter().all(|&(p, q)| (x & p) != 0 || (!x & q) != 0) {
            let values = (1..=n).map(|v| x & (1 << (n - v)) != 0).collect();
            return Ok(Some(Assignment::new(values)));
        }
    }
    Ok(None)
}
