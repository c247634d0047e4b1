//! Edge weights and crossing totals as polynomials in the base weight `w`.
//!
//! Every weight used by the construction is a polynomial in `w` with
//! nonnegative integer coefficients. Totals stay symbolic until the single
//! place where they are compared against the budget, which is done by exact
//! big-integer evaluation.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    #[error("coefficient {coefficient} of degree {degree} is not below w = {omega}")]
    CoefficientTooLarge {
        degree: u32,
        coefficient: BigUint,
        omega: u64,
    },
    #[error("adjustment index must be at least 1, got {0}")]
    BadIndex(i64),
    #[error("malformed coefficient array: {0}")]
    Malformed(String),
}

/// Polynomial in `w` with nonnegative arbitrary-precision coefficients.
///
/// Zero coefficients are never stored, so structural equality is polynomial
/// equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct WeightPoly {
    coeffs: BTreeMap<u32, BigUint>,
}

impl WeightPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1u32)
    }

    pub fn constant(c: impl Into<BigUint>) -> Self {
        Self::monomial(0, c)
    }

    /// `c * w^degree`.
    pub fn monomial(degree: u32, c: impl Into<BigUint>) -> Self {
        let c = c.into();
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(degree, c);
        }
        Self { coeffs }
    }

    /// `w^degree`.
    pub fn omega_pow(degree: u32) -> Self {
        Self::monomial(degree, 1u32)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coeff(&self, degree: u32) -> BigUint {
        self.coeffs.get(&degree).cloned().unwrap_or_default()
    }

    /// Nonzero terms, lowest degree first.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &BigUint)> {
        self.coeffs.iter().map(|(d, c)| (*d, c))
    }

    /// Dense form `[c0, c1, ..., c_max]`; the zero polynomial is `[]`.
    pub fn to_coeff_vec(&self) -> Vec<BigUint> {
        match self.degree() {
            None => Vec::new(),
            Some(d) => (0..=d).map(|i| self.coeff(i)).collect(),
        }
    }

    pub fn from_coeff_vec(coeffs: impl IntoIterator<Item = BigUint>) -> Self {
        let mut out = BTreeMap::new();
        for (d, c) in coeffs.into_iter().enumerate() {
            if !c.is_zero() {
                out.insert(d as u32, c);
            }
        }
        Self { coeffs: out }
    }

    /// Renders the dense coefficient array as `[c0,c1,...]`.
    pub fn coeff_array_string(&self) -> String {
        let parts: Vec<String> = self.to_coeff_vec().iter().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(","))
    }

    pub fn parse_coeff_array(text: &str) -> Result<Self, WeightError> {
        let t = text.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| WeightError::Malformed(t.to_string()))?;
        if inner.trim().is_empty() {
            return Ok(Self::zero());
        }
        let mut coeffs = Vec::new();
        for part in inner.split(',') {
            let c: BigUint = part
                .trim()
                .parse()
                .map_err(|_| WeightError::Malformed(t.to_string()))?;
            coeffs.push(c);
        }
        Ok(Self::from_coeff_vec(coeffs))
    }

    /// Exact value at `w = omega`, by Horner's rule.
    pub fn eval(&self, omega: u64) -> BigUint {
        let Some(top) = self.degree() else {
            return BigUint::zero();
        };
        let w = BigUint::from(omega);
        let mut acc = BigUint::zero();
        for d in (0..=top).rev() {
            acc *= &w;
            if let Some(c) = self.coeffs.get(&d) {
                acc += c;
            }
        }
        acc
    }

    /// Largest coefficient, zero for the zero polynomial.
    pub fn max_coeff(&self) -> BigUint {
        self.coeffs.values().max().cloned().unwrap_or_default()
    }

    /// Fails if some coefficient is not strictly below `omega`.
    pub fn check_coefficients_below(&self, omega: u64) -> Result<(), WeightError> {
        let bound = BigUint::from(omega);
        for (d, c) in &self.coeffs {
            if *c >= bound {
                return Err(WeightError::CoefficientTooLarge {
                    degree: *d,
                    coefficient: c.clone(),
                    omega,
                });
            }
        }
        Ok(())
    }

    /// Lexicographic comparison from the highest degree down.
    ///
    /// When every coefficient of both operands is below `omega` the result
    /// agrees with comparing the evaluations at `omega`; otherwise the call
    /// fails instead of guessing.
    pub fn compare_symbolic(&self, other: &Self, omega: u64) -> Result<Ordering, WeightError> {
        self.check_coefficients_below(omega)?;
        other.check_coefficients_below(omega)?;
        let top = self.degree().max(other.degree());
        let Some(top) = top else {
            return Ok(Ordering::Equal);
        };
        for d in (0..=top).rev() {
            match self.coeff(d).cmp(&other.coeff(d)) {
                Ordering::Equal => continue,
                ord => return Ok(ord),
            }
        }
        Ok(Ordering::Equal)
    }

    /// Coefficient-wise comparison without an `w` bound, for identities that
    /// hold for every sufficiently large `w`.
    pub fn cmp_lex(&self, other: &Self) -> Ordering {
        let top = self.degree().max(other.degree());
        let Some(top) = top else {
            return Ordering::Equal;
        };
        for d in (0..=top).rev() {
            match self.coeff(d).cmp(&other.coeff(d)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    /// `self - other` when every coefficient stays nonnegative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let mut out = self.coeffs.clone();
        for (d, c) in &other.coeffs {
            let mine = out.get(d)?;
            if mine < c {
                return None;
            }
            let diff = mine - c;
            if diff.is_zero() {
                out.remove(d);
            } else {
                out.insert(*d, diff);
            }
        }
        Some(Self { coeffs: out })
    }

    pub fn scale(&self, factor: impl Into<BigUint>) -> Self {
        let f = factor.into();
        if f.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(d, c)| (*d, c * &f)).collect(),
        }
    }
}

impl fmt::Display for WeightPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*w")?,
                _ => write!(f, "{c}*w^{d}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for WeightPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightPoly({self})")
    }
}

impl Serialize for WeightPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.to_coeff_vec().iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        let mut coeffs = Vec::with_capacity(v.len());
        for s in v {
            coeffs.push(s.parse::<BigUint>().map_err(serde::de::Error::custom)?);
        }
        Ok(Self::from_coeff_vec(coeffs))
    }
}

impl AddAssign<&WeightPoly> for WeightPoly {
    fn add_assign(&mut self, rhs: &WeightPoly) {
        for (d, c) in &rhs.coeffs {
            *self.coeffs.entry(*d).or_default() += c;
        }
    }
}

impl Add<&WeightPoly> for &WeightPoly {
    type Output = WeightPoly;
    fn add(self, rhs: &WeightPoly) -> WeightPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for WeightPoly {
    type Output = WeightPoly;
    fn add(mut self, rhs: WeightPoly) -> WeightPoly {
        self += &rhs;
        self
    }
}

impl Mul<&WeightPoly> for &WeightPoly {
    type Output = WeightPoly;
    fn mul(self, rhs: &WeightPoly) -> WeightPoly {
        let mut coeffs: BTreeMap<u32, BigUint> = BTreeMap::new();
        for (da, ca) in &self.coeffs {
            for (db, cb) in &rhs.coeffs {
                *coeffs.entry(da + db).or_default() += ca * cb;
            }
        }
        WeightPoly { coeffs }
    }
}

impl Mul for WeightPoly {
    type Output = WeightPoly;
    fn mul(self, rhs: WeightPoly) -> WeightPoly {
        &self * &rhs
    }
}

impl std::iter::Sum for WeightPoly {
    fn sum<I: Iterator<Item = WeightPoly>>(iter: I) -> Self {
        let mut acc = WeightPoly::zero();
        for p in iter {
            acc += &p;
        }
        acc
    }
}

/// Weight classes of the construction, ordered from heaviest to lightest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ColorClass {
    /// Heavy frame and gadget attachment edges.
    HB,
    /// Gadget interior skeleton.
    LB,
    /// Vertical paths between gadgets.
    R,
    /// Stairs between neighbouring gadgets.
    RPrime,
    /// Vertical paths inside gadgets.
    B,
    /// Stairs inside gadgets.
    BPrime,
    /// Clause-cell edges.
    C,
    /// Global clause edges.
    G,
}

impl ColorClass {
    pub const ALL: [ColorClass; 8] = [
        ColorClass::HB,
        ColorClass::LB,
        ColorClass::R,
        ColorClass::RPrime,
        ColorClass::B,
        ColorClass::BPrime,
        ColorClass::C,
        ColorClass::G,
    ];

    /// Power of `w` carried by edges of this class. R and B edges also carry
    /// an adjustment term on top of `w^4`.
    pub fn base_degree(self) -> u32 {
        match self {
            ColorClass::HB => 8,
            ColorClass::LB => 6,
            ColorClass::R | ColorClass::B => 4,
            ColorClass::RPrime | ColorClass::BPrime => 3,
            ColorClass::C => 2,
            ColorClass::G => 0,
        }
    }

    /// Weight of an edge of this class without adjustment.
    pub fn base_weight(self) -> WeightPoly {
        WeightPoly::omega_pow(self.base_degree())
    }

    pub fn name(self) -> &'static str {
        match self {
            ColorClass::HB => "HB",
            ColorClass::LB => "LB",
            ColorClass::R => "R",
            ColorClass::RPrime => "R'",
            ColorClass::B => "B",
            ColorClass::BPrime => "B'",
            ColorClass::C => "C",
            ColorClass::G => "G",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }

    pub fn is_stair(self) -> bool {
        matches!(self, ColorClass::RPrime | ColorClass::BPrime)
    }

    pub fn is_vertical(self) -> bool {
        matches!(self, ColorClass::R | ColorClass::B)
    }
}

impl fmt::Display for ColorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Weight of the `j`-th edge of an R path: `w^4 + j(j+1) w`.
pub fn g_weight(j: i64) -> Result<WeightPoly, WeightError> {
    if j < 1 {
        return Err(WeightError::BadIndex(j));
    }
    let j = j as u64;
    Ok(WeightPoly::omega_pow(4) + WeightPoly::monomial(1, j * (j + 1)))
}

/// Weight of the `j`-th edge of a B path: `w^4 + j(j+2) w`.
pub fn s_weight(j: i64) -> Result<WeightPoly, WeightError> {
    if j < 1 {
        return Err(WeightError::BadIndex(j));
    }
    let j = j as u64;
    Ok(WeightPoly::omega_pow(4) + WeightPoly::monomial(1, j * (j + 2)))
}

/// A crossing budget: a nonnegative polynomial plus an integer offset.
///
/// The budget of the reduction ends in `... + w^2 - 1`, which is not
/// representable as a nonnegative polynomial, so the `-1` lives here.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub symbolic: WeightPoly,
    pub offset: i64,
}

impl Budget {
    pub fn value(&self, omega: u64) -> BigInt {
        BigInt::from(self.symbolic.eval(omega)) + BigInt::from(self.offset)
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.offset.cmp(&0) {
            Ordering::Equal => write!(f, "{}", self.symbolic),
            Ordering::Less => write!(f, "{} - {}", self.symbolic, -self.offset),
            Ordering::Greater => write!(f, "{} + {}", self.symbolic, self.offset),
        }
    }
}

/// True when `x` evaluates to at most `budget` at `omega`.
pub fn within_budget(x: &WeightPoly, budget: &Budget, omega: u64) -> bool {
    BigInt::from(x.eval(omega)) <= budget.value(omega)
}

impl One for WeightPoly {
    fn one() -> Self {
        WeightPoly::constant(1u32)
    }
}

impl Zero for WeightPoly {
    fn zero() -> Self {
        WeightPoly::default()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(d: u32) -> WeightPoly {
        WeightPoly::omega_pow(d)
    }

    fn m(d: u32, c: u64) -> WeightPoly {
        WeightPoly::monomial(d, c)
    }

    #[test]
    fn products_and_sums() {
        assert_eq!(&w(4) * &w(3), w(7));
        let sum = (w(4) + m(1, 3)) + (w(4) + m(1, 6)) + (w(4) + m(1, 8));
        assert_eq!(sum, m(4, 3) + m(1, 17));
        let p = m(3, 2) + m(0, 5);
        assert_eq!(WeightPoly::zero() + p.clone(), p);
    }

    #[test]
    fn adjustment_weights() {
        assert_eq!(g_weight(2).unwrap(), w(4) + m(1, 6));
        assert_eq!(g_weight(1).unwrap(), w(4) + m(1, 2));
        assert_eq!(s_weight(1).unwrap(), w(4) + m(1, 3));
        assert!(g_weight(0).is_err());
        assert!(s_weight(-3).is_err());
    }

    #[test]
    fn symbolic_comparison() {
        // numeric oracle: 6400^7 vs 1000 * 6400^6
        let a = w(7);
        let b = m(6, 1000);
        assert!(a.eval(6400) > b.eval(6400));
        assert_eq!(a.compare_symbolic(&b, 6400).unwrap(), Ordering::Greater);
        assert_eq!(a.compare_symbolic(&a, 6400).unwrap(), Ordering::Equal);
        let c = w(4) + m(1, 17);
        let d = w(4) + m(1, 18);
        assert_eq!(c.compare_symbolic(&d, 100).unwrap(), Ordering::Less);
        // 1000 is not below w = 500
        assert!(matches!(
            a.compare_symbolic(&b, 500),
            Err(WeightError::CoefficientTooLarge { degree: 6, .. })
        ));
    }

    #[test]
    fn evaluation() {
        assert_eq!(w(2).eval(10), BigUint::from(100u32));
        assert_eq!(WeightPoly::zero().eval(12345), BigUint::zero());
        let p = m(7, 14) + m(6, 2) + m(4, 180) + m(2, 2);
        // independent evaluation by powers
        let omega = BigUint::from(6724u32);
        let expect = BigUint::from(14u32) * omega.pow(7)
            + BigUint::from(2u32) * omega.pow(6)
            + BigUint::from(180u32) * omega.pow(4)
            + BigUint::from(2u32) * omega.pow(2);
        assert_eq!(p.eval(6724), expect);
    }

    #[test]
    fn rendering_and_arrays() {
        let p = m(8, 3) + m(1, 1) + m(0, 9);
        assert_eq!(p.to_string(), "3*w^8 + 1*w + 9");
        assert_eq!(WeightPoly::zero().to_string(), "0");
        let arr = p.coeff_array_string();
        assert_eq!(arr, "[9,1,0,0,0,0,0,0,3]");
        assert_eq!(WeightPoly::parse_coeff_array(&arr).unwrap(), p);
        assert_eq!(WeightPoly::parse_coeff_array("[]").unwrap(), WeightPoly::zero());
        assert!(WeightPoly::parse_coeff_array("[1,x]").is_err());
    }

    #[test]
    fn checked_difference() {
        let a = m(4, 3) + m(1, 17);
        let b = w(4) + m(1, 3);
        assert_eq!(a.checked_sub(&b), Some(m(4, 2) + m(1, 14)));
        assert_eq!(b.checked_sub(&a), None);
        assert_eq!(a.checked_sub(&a), Some(WeightPoly::zero()));
    }

    #[test]
    fn color_weights() {
        assert_eq!(ColorClass::HB.base_weight(), w(8));
        assert_eq!(ColorClass::LB.base_weight(), w(6));
        assert_eq!(ColorClass::RPrime.base_weight(), w(3));
        assert_eq!(ColorClass::BPrime.base_weight(), w(3));
        assert_eq!(ColorClass::C.base_weight(), w(2));
        assert_eq!(ColorClass::G.base_weight(), WeightPoly::one());
        for c in ColorClass::ALL {
            assert_eq!(ColorClass::from_name(c.name()), Some(c));
        }
    }

    #[test]
    fn budget_value_includes_offset() {
        let k = Budget {
            symbolic: m(2, 2),
            offset: -1,
        };
        assert_eq!(k.value(10), BigInt::from(199));
        assert!(within_budget(&m(2, 1), &k, 10));
        assert!(!within_budget(&m(2, 2), &k, 10));
    }

    fn small_poly() -> impl Strategy<Value = WeightPoly> {
        prop::collection::vec(0u64..50, 0..6)
            .prop_map(|v| WeightPoly::from_coeff_vec(v.into_iter().map(BigUint::from)))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn eval_is_a_ring_homomorphism(a in small_poly(), b in small_poly(), omega in 1u64..1000) {
            prop_assert_eq!((&a + &b).eval(omega), a.eval(omega) + b.eval(omega));
            prop_assert_eq!((&a * &b).eval(omega), a.eval(omega) * b.eval(omega));
        }

        #[test]
        fn symbolic_agrees_with_numeric(a in small_poly(), b in small_poly(), omega in 50u64..5000) {
            let sym = a.compare_symbolic(&b, omega).unwrap();
            prop_assert_eq!(sym, a.eval(omega).cmp(&b.eval(omega)));
        }
    }
}
