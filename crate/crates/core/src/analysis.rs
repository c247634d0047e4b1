//! The staircase cost algebra: `A(h)`, the induction identities behind its
//! lower bound, and an exhaustive search over stair placements.
//!
//! A placement fixes, for one neighbouring R/B path pair of height `h`, the
//! bottom-to-top order in which its `h` B' stairs and `h + 1` R' stairs meet
//! the pair. A B' stair crosses the R edge just above the R' stairs below
//! it, and an R' stair crosses the B edge just above the B' stairs below it.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::weights::{g_weight, s_weight, WeightPoly};

/// Largest height accepted by [`brute_force_min_placement`].
pub const BRUTE_FORCE_MAX_H: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("height must be at least 1, got {0}")]
    BadHeight(usize),
    #[error("height {h} exceeds the search limit {limit}")]
    TooLarge { h: usize, limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Stair {
    /// Stair between neighbouring R paths, crossing a B edge.
    RPrime,
    /// Stair inside a gadget, crossing an R edge.
    BPrime,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StairPlacement {
    pub h: usize,
    /// Stairs in bottom-to-top order.
    pub order: Vec<Stair>,
}

impl StairPlacement {
    /// The pattern R', B', R', ..., B', R'.
    pub fn alternating(h: usize) -> Self {
        let mut order = vec![Stair::RPrime];
        for _ in 0..h {
            order.push(Stair::BPrime);
            order.push(Stair::RPrime);
        }
        Self { h, order }
    }

    pub fn is_alternating(&self) -> bool {
        *self == Self::alternating(self.h)
    }

    /// Index of the R edge crossed by each B' stair, bottom row first.
    pub fn b_prime_crossings(&self) -> Vec<usize> {
        let mut below = 0;
        let mut out = Vec::new();
        for s in &self.order {
            match s {
                Stair::RPrime => below += 1,
                Stair::BPrime => out.push(below + 1),
            }
        }
        out
    }

    /// Index of the B edge crossed by each R' stair, bottom row first.
    pub fn r_prime_crossings(&self) -> Vec<usize> {
        let mut below = 0;
        let mut out = Vec::new();
        for s in &self.order {
            match s {
                Stair::BPrime => below += 1,
                Stair::RPrime => out.push(below + 1),
            }
        }
        out
    }

    /// Sum over stairs of `w^3` times the weight of the crossed edge.
    pub fn cost(&self) -> WeightPoly {
        let mut total = WeightPoly::zero();
        for j in self.b_prime_crossings() {
            total += &g_weight(j as i64).expect("index >= 1");
        }
        for j in self.r_prime_crossings() {
            total += &s_weight(j as i64).expect("index >= 1");
        }
        &total * &WeightPoly::omega_pow(3)
    }
}

impl fmt::Display for StairPlacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self
            .order
            .iter()
            .map(|s| match s {
                Stair::RPrime => "R'",
                Stair::BPrime => "B'",
            })
            .collect();
        write!(f, "[{}]", parts.join(","))
    }
}

fn sum_range(lo: u64, hi: u64, f: impl Fn(u64) -> u64) -> u64 {
    (lo..=hi).map(f).sum()
}

/// Minimum staircase cost of one R/B pair of height `h`.
pub fn a_of_h(h: usize) -> Result<WeightPoly, AnalysisError> {
    if h < 1 {
        return Err(AnalysisError::BadHeight(h));
    }
    let h = h as u64;
    let c4 = sum_range(2, h + 1, |j| j * (j + 1)) + sum_range(1, h + 1, |j| j * (j + 2));
    Ok(WeightPoly::monomial(7, 2 * h + 1) + WeightPoly::monomial(4, c4))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IdentityCase {
    /// The new B' stair crosses R edge `j`.
    NewBPrime,
    /// The new R' stair crosses B edge `j`.
    NewRPrime,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub case: IdentityCase,
    pub h: usize,
    pub j: usize,
    pub lhs: WeightPoly,
    pub rhs: WeightPoly,
    pub ordering: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub max_h: usize,
    pub checks: usize,
    pub failures: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn w3(p: &WeightPoly) -> WeightPoly {
    p * &WeightPoly::omega_pow(3)
}

fn g(j: usize) -> WeightPoly {
    g_weight(j as i64).expect("index >= 1")
}

fn s(j: usize) -> WeightPoly {
    s_weight(j as i64).expect("index >= 1")
}

/// Left side of the identity when the new B' stair crosses R edge `j`.
pub fn case_new_b_prime_lhs(h: usize, j: usize) -> WeightPoly {
    let diff = s(h + 2).checked_sub(&s(h + 1)).expect("s is increasing");
    w3(&s(h + 2)) + w3(&g(j)) + w3(&diff.scale((h + 2 - j) as u64))
}

/// Left side of the identity when the new R' stair crosses B edge `j`.
pub fn case_new_r_prime_lhs(h: usize, j: usize) -> WeightPoly {
    let diff = g(h + 3).checked_sub(&g(h + 2)).expect("g is increasing");
    w3(&g(h + 3)) + w3(&s(j)) + w3(&diff.scale((h + 1 - j) as u64))
}

/// `A(h+1) - A(h)`.
pub fn a_increment(h: usize) -> Result<WeightPoly, AnalysisError> {
    let hi = a_of_h(h + 1)?;
    let lo = a_of_h(h)?;
    Ok(hi.checked_sub(&lo).expect("A is increasing"))
}

/// Closed form of the `w^4` coefficient of the first case's left side.
pub fn case_new_b_prime_margin_form(h: usize, j: usize) -> i64 {
    let (h, j) = (h as i64, j as i64);
    2 * h * h + 11 * h + 18 + (h + 4 - j) * (h - j)
}

/// Checks both induction cases for every `h` in `1..=max_h` and every
/// admissible `j`. Comparisons are coefficient-wise, so they hold for every
/// sufficiently large `w`.
pub fn check_induction_identities(max_h: usize) -> Result<IdentityReport, AnalysisError> {
    if max_h < 1 {
        return Err(AnalysisError::BadHeight(max_h));
    }
    let mut checks = 0;
    let mut failures = Vec::new();
    for h in 1..=max_h {
        let inc = a_increment(h)?;
        for j in 1..=h + 2 {
            let lhs = case_new_b_prime_lhs(h, j);
            let ord = lhs.cmp_lex(&inc);
            let margin_ok = lhs.coeff(4) == num_bigint::BigUint::from(case_new_b_prime_margin_form(h, j) as u64)
                && lhs.coeff(7) == inc.coeff(7);
            let passed = margin_ok
                && if j == h + 2 {
                    ord == Ordering::Equal
                } else {
                    ord == Ordering::Greater
                };
            checks += 1;
            if !passed {
                failures.push(IdentityCheck {
                    case: IdentityCase::NewBPrime,
                    h,
                    j,
                    lhs,
                    rhs: inc.clone(),
                    ordering: format!("{ord:?}"),
                    passed,
                });
            }
        }
        let rhs = &inc + &WeightPoly::omega_pow(4);
        for j in 1..=h + 1 {
            let lhs = case_new_r_prime_lhs(h, j);
            let ord = lhs.cmp_lex(&rhs);
            let passed = ord != Ordering::Less;
            checks += 1;
            if !passed {
                failures.push(IdentityCheck {
                    case: IdentityCase::NewRPrime,
                    h,
                    j,
                    lhs,
                    rhs: rhs.clone(),
                    ordering: format!("{ord:?}"),
                    passed,
                });
            }
        }
    }
    Ok(IdentityReport {
        max_h,
        checks,
        failures,
    })
}

/// Every placement for height `h`, in lexicographic order of stair sequences.
pub fn all_placements(h: usize) -> Vec<StairPlacement> {
    fn rec(rp: usize, bp: usize, cur: &mut Vec<Stair>, h: usize, out: &mut Vec<StairPlacement>) {
        if rp == 0 && bp == 0 {
            out.push(StairPlacement {
                h,
                order: cur.clone(),
            });
            return;
        }
        if rp > 0 {
            cur.push(Stair::RPrime);
            rec(rp - 1, bp, cur, h, out);
            cur.pop();
        }
        if bp > 0 {
            cur.push(Stair::BPrime);
            rec(rp, bp - 1, cur, h, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(h + 1, h, &mut Vec::new(), h, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinPlacement {
    pub h: usize,
    pub placements: usize,
    pub min_cost: WeightPoly,
    pub minimizers: Vec<StairPlacement>,
}

/// Exhaustive minimum over all placements for height `h`, with every
/// minimizer in canonical order.
pub fn brute_force_min_placement(h: usize) -> Result<MinPlacement, AnalysisError> {
    if h > BRUTE_FORCE_MAX_H {
        return Err(AnalysisError::TooLarge {
            h,
            limit: BRUTE_FORCE_MAX_H,
        });
    }
    let all = all_placements(h);
    let mut best: Option<WeightPoly> = None;
    let mut minimizers = Vec::new();
    for p in &all {
        let c = p.cost();
        match best.as_ref().map(|b| c.cmp_lex(b)) {
            None | Some(Ordering::Less) => {
                best = Some(c);
                minimizers = vec![p.clone()];
            }
            Some(Ordering::Equal) => minimizers.push(p.clone()),
            Some(Ordering::Greater) => {}
        }
    }
    Ok(MinPlacement {
        h,
        placements: all.len(),
        min_cost: best.expect("at least one placement"),
        minimizers,
    })
}
