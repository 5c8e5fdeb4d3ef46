//! Costs in `[0, ∞]`: exact nonnegative rationals extended with infinity.
//!
//! `0` is the strongest (most true) value and `inf` the weakest. Addition,
//! truncated subtraction (`ominus`), binary `join`/`meet`, and the empty
//! join/meet conventions (`inf_of([]) = inf`, `sup_of([]) = 0`) are the only
//! arithmetic the rest of the crate uses.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An exact cost: a nonnegative 64-bit rational, or infinity.
///
/// All arithmetic is exact. Overflow of the underlying 64-bit rational
/// representation panics instead of rounding; every value this crate
/// produces at its intended scales stays far below that limit.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cost {
    Finite(Ratio<i64>),
    Infinity,
}

pub use Cost::Infinity;

impl Cost {
    pub const ZERO: Cost = Cost::Finite(Ratio::new_raw(0, 1));
    pub const INFINITY: Cost = Cost::Infinity;

    /// Exact rational `numer / denom`. Panics when `denom` is zero or the
    /// value is negative; use `FromStr` for fallible construction.
    pub fn rational(numer: i64, denom: i64) -> Cost {
        assert!(denom != 0, "cost denominator must be nonzero");
        let r = Ratio::new(numer, denom);
        assert!(r >= Ratio::zero(), "costs are nonnegative");
        Cost::Finite(r)
    }

    pub fn int(n: u32) -> Cost {
        Cost::Finite(Ratio::from_integer(i64::from(n)))
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Cost::Infinity)
    }

    pub fn is_zero(self) -> bool {
        self == Cost::ZERO
    }

    /// Truncated subtraction: the least `w` with `other + w >= self`.
    ///
    /// `inf ominus u = inf` for finite `u`, and `v ominus inf = 0` for every
    /// `v` (including `inf ominus inf = 0`).
    pub fn ominus(self, other: Cost) -> Cost {
        match (self, other) {
            (_, Cost::Infinity) => Cost::ZERO,
            (Cost::Infinity, Cost::Finite(_)) => Cost::Infinity,
            (Cost::Finite(v), Cost::Finite(u)) => {
                if v <= u {
                    Cost::ZERO
                } else {
                    Cost::Finite(checked(v.checked_sub(&u)))
                }
            }
        }
    }

    /// Numeric maximum; the meet in the truth order.
    pub fn join(self, other: Cost) -> Cost {
        self.max(other)
    }

    /// Numeric minimum; the join in the truth order.
    pub fn meet(self, other: Cost) -> Cost {
        self.min(other)
    }

    /// Numeric infimum; `inf` for an empty iterator.
    pub fn inf_of(items: impl IntoIterator<Item = Cost>) -> Cost {
        items.into_iter().fold(Cost::Infinity, Cost::meet)
    }

    /// Numeric supremum; `0` for an empty iterator.
    pub fn sup_of(items: impl IntoIterator<Item = Cost>) -> Cost {
        items.into_iter().fold(Cost::ZERO, Cost::join)
    }

    /// Exact halving; `inf` stays `inf`.
    pub fn half(self) -> Cost {
        match self {
            Cost::Infinity => Cost::Infinity,
            Cost::Finite(r) => Cost::Finite(checked(r.checked_mul(&Ratio::new_raw(1, 2)))),
        }
    }

    /// Exact midpoint of two finite costs; `inf` if either side is `inf`.
    pub fn midpoint(self, other: Cost) -> Cost {
        (self + other).half()
    }
}

fn checked(r: Option<Ratio<i64>>) -> Ratio<i64> {
    r.expect("cost arithmetic overflowed 64-bit exact rationals")
}

impl Add for Cost {
    type Output = Cost;

    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Infinity, _) | (_, Cost::Infinity) => Cost::Infinity,
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(checked(a.checked_add(&b))),
        }
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Cost) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Cost) -> Ordering {
        match (self, other) {
            (Cost::Infinity, Cost::Infinity) => Ordering::Equal,
            (Cost::Infinity, Cost::Finite(_)) => Ordering::Greater,
            (Cost::Finite(_), Cost::Infinity) => Ordering::Less,
            (Cost::Finite(a), Cost::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Infinity => write!(f, "inf"),
            Cost::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Cost::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseCostError {
    #[error("empty cost string")]
    Empty,
    #[error("invalid cost `{0}`: expected `p/q`, a decimal, or `inf`")]
    Invalid(String),
    #[error("invalid cost `{0}`: zero denominator")]
    ZeroDenominator(String),
    #[error("invalid cost `{0}`: costs are nonnegative")]
    Negative(String),
    #[error("cost `{0}` does not fit exact 64-bit rationals")]
    OutOfRange(String),
}

impl FromStr for Cost {
    type Err = ParseCostError;

    /// Parses `p/q` rationals, decimals such as `1.25`, plain integers, and
    /// the string `inf`. Parsing is exact: decimals become rationals with a
    /// power-of-ten denominator, never floats.
    fn from_str(s: &str) -> Result<Cost, ParseCostError> {
        let t = s.trim();
        if t.is_empty() {
            return Err(ParseCostError::Empty);
        }
        if t.eq_ignore_ascii_case("inf") || t == "∞" {
            return Ok(Cost::Infinity);
        }
        if t.starts_with('-') {
            return Err(ParseCostError::Negative(s.to_string()));
        }
        if let Some((num, den)) = t.split_once('/') {
            let n: i64 = parse_digits(num, s)?;
            let d: i64 = parse_digits(den, s)?;
            if d == 0 {
                return Err(ParseCostError::ZeroDenominator(s.to_string()));
            }
            return Ok(Cost::Finite(Ratio::new(n, d)));
        }
        if let Some((whole, frac)) = t.split_once('.') {
            let whole: i64 = if whole.is_empty() { 0 } else { parse_digits(whole, s)? };
            if frac.is_empty() || frac.len() > 12 {
                return Err(ParseCostError::Invalid(s.to_string()));
            }
            let num: i64 = parse_digits(frac, s)?;
            let den = 10i64.pow(frac.len() as u32);
            let r = Ratio::from_integer(whole)
                .checked_add(&Ratio::new(num, den))
                .ok_or_else(|| ParseCostError::OutOfRange(s.to_string()))?;
            return Ok(Cost::Finite(r));
        }
        Ok(Cost::Finite(Ratio::from_integer(parse_digits(t, s)?)))
    }
}

fn parse_digits(part: &str, whole: &str) -> Result<i64, ParseCostError> {
    if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseCostError::Invalid(whole.to_string()));
    }
    part.parse::<i64>()
        .map_err(|_| ParseCostError::OutOfRange(whole.to_string()))
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Cost, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}
