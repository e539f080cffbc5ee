//! Exact counts and log-space reals.
//!
//! Closed-form counts here are products and quotients of factorials and
//! powers. [`FactorialExpr`] holds such a product symbolically so it can be
//! evaluated either exactly (big integers) or through `ln Gamma`, and the two
//! routes checked against each other.

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact nonnegative count.
pub type BigCount = BigUint;

/// Natural log of a nonnegative quantity. Zero is stored as `-inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    ln: f64,
}

impl LogValue {
    pub fn zero() -> Self {
        Self {
            ln: f64::NEG_INFINITY,
        }
    }

    pub fn one() -> Self {
        Self { ln: 0.0 }
    }

    pub fn from_ln(ln: f64) -> Self {
        Self { ln }
    }

    pub fn from_value(x: f64) -> Self {
        if x <= 0.0 {
            Self::zero()
        } else {
            Self { ln: x.ln() }
        }
    }

    pub fn from_count(x: &BigUint) -> Self {
        Self { ln: ln_big(x) }
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    pub fn value(self) -> f64 {
        self.ln.exp()
    }

    pub fn is_zero(self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    /// Multiplies by `exp(x)`.
    pub fn scale_exp(self, x: f64) -> LogValue {
        if self.is_zero() {
            return self;
        }
        LogValue::from_ln(self.ln + x)
    }

    /// `|self / other - 1|`, computed without leaving log space.
    pub fn relative_error(self, other: LogValue) -> f64 {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => 0.0,
            (false, false) => (self.ln - other.ln).exp_m1().abs(),
            _ => f64::INFINITY,
        }
    }
}

impl std::ops::Mul for LogValue {
    type Output = LogValue;

    fn mul(self, other: LogValue) -> LogValue {
        if self.is_zero() || other.is_zero() {
            return LogValue::zero();
        }
        LogValue::from_ln(self.ln + other.ln)
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            f.write_str("0")
        } else {
            write!(f, "exp({})", self.ln)
        }
    }
}

/// Natural log of a big integer; `-inf` for zero.
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln(num / den)`, accurate to a few ulps even when both are huge.
pub fn ln_ratio(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return f64::NEG_INFINITY;
    }
    // Scale so the integer quotient carries 64+ significant bits.
    let shift = 64 + den.bits() as i64 - num.bits() as i64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    ln_big(&q) - shift as f64 * std::f64::consts::LN_2
}

/// `ln r` for a nonnegative rational.
pub fn ln_rational(r: &BigRational) -> f64 {
    ln_ratio(r.numer().magnitude(), r.denom().magnitude())
}

/// `ln(n!)` through `ln Gamma(n + 1)`.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    libm::lgamma(n as f64 + 1.0)
}

pub fn factorial(n: u64) -> BigUint {
    product_range(1, n)
}

/// Product `lo * (lo+1) * ... * hi`, `1` when empty. Split recursively so the
/// multiplications stay balanced.
fn product_range(lo: u64, hi: u64) -> BigUint {
    if lo > hi {
        return BigUint::one();
    }
    if hi - lo < 16 {
        let mut acc = BigUint::one();
        for k in lo..=hi {
            acc *= k;
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    product_range(lo, mid) * product_range(mid + 1, hi)
}

/// `[x]_k = x (x-1) ... (x-k+1)`; `1` when `k = 0`, `0` when `k > x`.
pub fn falling_factorial(x: u64, k: u64) -> BigUint {
    if k > x {
        return BigUint::zero();
    }
    product_range(x - k + 1, x)
}

/// `U(m) = m! / (2^{m/2} (m/2)!)`, the number of perfect matchings of `m` points.
pub fn u_pairings(m: u64) -> Result<BigUint> {
    if m % 2 == 1 {
        return Err(Error::OddPointCount(m));
    }
    // (m-1)!! computed directly.
    let mut acc = BigUint::one();
    let mut k = 1;
    while k < m {
        acc *= k;
        k += 2;
    }
    Ok(acc)
}

/// Which arithmetic evaluates a [`FactorialExpr`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NumericPath {
    Exact,
    LogGamma,
}

/// A symbolic product `prod n_i!^{e_i} * prod b_j^{f_j}` with integer exponents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactorialExpr {
    factorials: Vec<(u64, i32)>,
    powers: Vec<(u64, i64)>,
    zero: bool,
}

impl FactorialExpr {
    pub fn new() -> Self {
        Self::default()
    }

    /// Multiply by `n!^e`.
    pub fn factorial(mut self, n: u64, e: i32) -> Self {
        if e != 0 {
            self.factorials.push((n, e));
        }
        self
    }

    /// Multiply by `[x]_k^e`; a zero falling factorial zeroes the expression
    /// (only allowed with a positive exponent).
    pub fn falling(mut self, x: u64, k: u64, e: i32) -> Self {
        if k > x {
            assert!(e > 0, "division by a zero falling factorial");
            self.zero = true;
            return self;
        }
        self.factorial(x, e).factorial(x - k, -e)
    }

    /// Multiply by `base^e`.
    pub fn power(mut self, base: u64, e: i64) -> Self {
        if base == 0 && e > 0 {
            self.zero = true;
        }
        if e != 0 && base != 1 {
            self.powers.push((base, e));
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// Largest factorial argument or power base; used to choose a path.
    pub fn scale(&self) -> u64 {
        self.factorials
            .iter()
            .map(|&(n, _)| n)
            .chain(
                self.powers
                    .iter()
                    .map(|&(b, e)| b.saturating_mul(e.unsigned_abs())),
            )
            .max()
            .unwrap_or(0)
    }

    /// Exact value as a reduced rational.
    pub fn exact(&self) -> BigRational {
        let (num, den) = self.exact_parts();
        BigRational::new(num.into(), den.into())
    }

    /// Unreduced numerator and denominator.
    pub fn exact_parts(&self) -> (BigUint, BigUint) {
        if self.zero {
            return (BigUint::zero(), BigUint::one());
        }
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for &(n, e) in &self.factorials {
            let f = num_traits::pow(factorial(n), e.unsigned_abs() as usize);
            if e > 0 {
                num *= f;
            } else {
                den *= f;
            }
        }
        for &(b, e) in &self.powers {
            let p = num_traits::pow(BigUint::from(b), e.unsigned_abs() as usize);
            if e > 0 {
                num *= p;
            } else {
                den *= p;
            }
        }
        (num, den)
    }

    pub fn ln_exact(&self) -> f64 {
        let (num, den) = self.exact_parts();
        ln_ratio(&num, &den)
    }

    pub fn ln_gamma(&self) -> f64 {
        if self.zero {
            return f64::NEG_INFINITY;
        }
        let f: f64 = self
            .factorials
            .iter()
            .map(|&(n, e)| f64::from(e) * ln_factorial(n))
            .sum();
        let p: f64 = self
            .powers
            .iter()
            .map(|&(b, e)| e as f64 * (b as f64).ln())
            .sum();
        f + p
    }

    pub fn ln_with(&self, path: NumericPath) -> f64 {
        match path {
            NumericPath::Exact => self.ln_exact(),
            NumericPath::LogGamma => self.ln_gamma(),
        }
    }

    /// Exact arithmetic when every factorial argument is at most `exact_limit`,
    /// log-gamma otherwise.
    pub fn ln_auto(&self, exact_limit: u64) -> (f64, NumericPath) {
        let path = if self.scale() <= exact_limit {
            NumericPath::Exact
        } else {
            NumericPath::LogGamma
        };
        (self.ln_with(path), path)
    }
}
