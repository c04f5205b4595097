//! Small helpers around [`BigRational`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Decimal rendering, rounded half away from zero to at most `places`
/// fractional digits, trailing zeros trimmed.
pub fn to_decimal(r: &BigRational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = r.abs() * BigRational::from_integer(scale.clone());
    let rounded = (scaled + BigRational::new(1.into(), 2.into())).floor().to_integer();
    let (whole, frac) = rounded.div_rem(&scale);
    let sign = if r.is_negative() && !(whole.is_zero() && frac.is_zero()) {
        "-"
    } else {
        ""
    };
    if frac.is_zero() {
        return format!("{sign}{whole}");
    }
    let digits = format!("{:0>width$}", frac.to_string(), width = places as usize);
    format!("{sign}{whole}.{}", digits.trim_end_matches('0'))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals() {
        assert_eq!(to_decimal(&ratio(5, 2), 6), "2.5");
        assert_eq!(to_decimal(&ratio(25, 3), 6), "8.333333");
        assert_eq!(to_decimal(&ratio(2, 3), 2), "0.67");
        assert_eq!(to_decimal(&int(11), 6), "11");
        assert_eq!(to_decimal(&ratio(-3, 2), 6), "-1.5");
        assert_eq!(to_decimal(&int(0), 6), "0");
    }
}
