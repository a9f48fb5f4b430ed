//! Exact rational parameters (α, φ, weights).

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

pub fn ratio(p: i64, q: i64) -> Rational {
    Ratio::new(p, q)
}

/// Parses `p/q` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parameter(format!("not a rational: {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (
            p.trim().parse::<i64>().map_err(|_| bad())?,
            q.trim().parse::<i64>().map_err(|_| bad())?,
        ),
        None => (s.parse::<i64>().map_err(|_| bad())?, 1),
    };
    if q == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(p, q))
}

pub fn ceil_u64(r: Rational) -> u64 {
    if r <= Rational::zero() {
        0
    } else {
        r.ceil().to_integer() as u64
    }
}

pub fn to_f64(r: Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn fmt_rational(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(*r))
}

/// `num / den >= r` without division, for non-negative integers.
pub fn ratio_at_least(num: u64, den: u64, r: Rational) -> bool {
    (num as i128) * (*r.denom() as i128) >= (*r.numer() as i128) * (den as i128)
}

/// `num / den <= r`.
pub fn ratio_at_most(num: u64, den: u64, r: Rational) -> bool {
    (num as i128) * (*r.denom() as i128) <= (*r.numer() as i128) * (den as i128)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("1/64").unwrap(), ratio(1, 64));
        assert_eq!(parse_rational(" 3 ").unwrap(), ratio(3, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn ceiling() {
        assert_eq!(ceil_u64(ratio(4, 1)), 4);
        assert_eq!(ceil_u64(ratio(1, 3)), 1);
        assert_eq!(ceil_u64(ratio(0, 1)), 0);
        assert_eq!(ceil_u64(ratio(7, 2)), 4);
    }

    #[test]
    fn exact_comparisons() {
        assert!(ratio_at_least(1, 8, ratio(1, 8)));
        assert!(!ratio_at_least(1, 9, ratio(1, 8)));
        assert!(ratio_at_most(1, 9, ratio(1, 8)));
    }
}
