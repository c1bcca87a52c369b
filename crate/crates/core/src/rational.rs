//! Exact rational helpers.

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive};

/// Character values and coset sums. Every value met here is an integer or a
/// small fraction, so 64-bit numerators are plenty.
pub type Q = Ratio<i64>;

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// `"7"` for integers, `"25/64"` otherwise.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn fmt_big(x: &num_rational::BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

pub fn q_abs(x: &Q) -> Q {
    x.abs()
}

pub fn big_to_f64(x: &num_rational::BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(fmt_q(&q(-75)), "-75");
        assert_eq!(fmt_q(&frac(50, 128)), "25/64");
        assert_eq!(q_to_f64(&frac(3, 8)), 0.375);
    }
}
