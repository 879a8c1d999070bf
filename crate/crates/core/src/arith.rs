//! Exact integer and rational helpers shared by every invariant computation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn uint(v: u64) -> Int {
    BigInt::from(v)
}

pub fn rat(num: impl Into<Int>, den: impl Into<Int>) -> Rat {
    BigRational::new(num.into(), den.into())
}

pub fn to_rat(v: &Int) -> Rat {
    BigRational::from_integer(v.clone())
}

/// The integer value of `r`, if it has one.
pub fn as_int(r: &Rat) -> Option<Int> {
    if r.is_integer() {
        Some(r.to_integer())
    } else {
        None
    }
}

/// Floor of `a / b` (toward negative infinity).
pub fn floor_div(a: &Int, b: &Int) -> Int {
    a.div_floor(b)
}

/// Least nonnegative residue of `a` modulo `m`.
pub fn residue(a: &Int, m: u64) -> u64 {
    a.mod_floor(&uint(m)).to_u64().expect("residue fits in u64")
}

pub fn divides(d: u64, a: &Int) -> bool {
    d != 0 && (a % uint(d)).is_zero()
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Parses `"3"`, `"-3/4"` or `"0.75"` into an exact rational.
pub fn parse_rat(text: &str) -> Option<Rat> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: Int = n.trim().parse().ok()?;
        let d: Int = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(rat(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = whole.trim_start().starts_with('-');
        let whole: Int = if whole.is_empty() || whole == "-" || whole == "+" {
            Int::zero()
        } else {
            whole.parse().ok()?
        };
        let scale = num_traits::pow(int(10), frac.len());
        let frac: Int = frac.parse().ok()?;
        let magnitude = whole.abs() * &scale + frac;
        let num = if negative { -magnitude } else { magnitude };
        return Some(rat(num, scale));
    }
    s.parse::<Int>().ok().map(|v| to_rat(&v))
}

/// Renders a rational as `n` or `n/d`.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parenthesizes negative integers so they can be spliced into arithmetic text.
pub fn paren(v: &Int) -> String {
    if v.is_negative() {
        format!("({v})")
    } else {
        v.to_string()
    }
}

pub fn paren_rat(r: &Rat) -> String {
    if r.is_negative() {
        format!("({})", fmt_rat(r))
    } else {
        fmt_rat(r)
    }
}

/// JSON number when the value fits in `i64`, string otherwise.
pub fn int_json(v: &Int) -> serde_json::Value {
    match v.to_i64() {
        Some(x) => serde_json::Value::from(x),
        None => serde_json::Value::String(v.to_string()),
    }
}

pub fn rat_json(r: &Rat) -> serde_json::Value {
    if r.is_integer() {
        int_json(&r.to_integer())
    } else {
        serde_json::Value::String(fmt_rat(r))
    }
}
