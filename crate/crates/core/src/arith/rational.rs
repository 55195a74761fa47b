use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational from a decimal literal such as `"7.51e358"`, `"0.0571"` or `"-3"`.
pub fn decimal(s: &str) -> BigRational {
    try_decimal(s).unwrap_or_else(|| panic!("malformed decimal literal {s:?}"))
}

pub fn try_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    Some(if neg { -value } else { value })
}

/// `m · 10^e` exactly.
pub fn sci(m: &str, e: i64) -> BigRational {
    decimal(m) * pow10(e)
}

fn pow10(e: i64) -> BigRational {
    let ten = BigInt::from(10);
    if e >= 0 {
        BigRational::from_integer(num_traits::pow(ten, e as usize))
    } else {
        BigRational::new(BigInt::one(), num_traits::pow(ten, (-e) as usize))
    }
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_biguint(v: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(v.clone()))
}

/// Nearest `f64`, tolerating magnitudes far outside the `f64` range by saturating.
pub fn to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let Some(v) = r.to_f64() {
        if v.is_finite() && v != 0.0 {
            return v;
        }
    }
    let n = r.numer().abs();
    let d = r.denom().clone();
    let shift = n.bits() as i64 - d.bits() as i64 - 60;
    let scaled = if shift >= 0 {
        BigRational::new(n, d << shift as usize)
    } else {
        BigRational::new(n << (-shift) as usize, d)
    };
    let mant = scaled.to_integer().to_f64().unwrap_or(0.0);
    let v = mant * 2f64.powi(shift.clamp(-2000, 2000) as i32);
    if r.is_negative() {
        -v
    } else {
        v
    }
}

/// `log10` of a positive rational as an `f64`, valid at any magnitude.
pub fn log10_approx(r: &BigRational) -> f64 {
    assert!(r.is_positive());
    let n = r.numer();
    let d = r.denom();
    let shift = n.bits() as i64 - d.bits() as i64;
    let scaled = if shift >= 0 {
        BigRational::new(n.clone(), d << shift as usize)
    } else {
        BigRational::new(n << (-shift) as usize, d.clone())
    };
    scaled.to_f64().unwrap().log10() + shift as f64 * std::f64::consts::LOG10_2
}

/// Scientific rendering with `digits` significant digits, rounded toward zero,
/// e.g. `1.367e45`.
pub fn format_sci(r: &BigRational, digits: usize) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let a = r.abs();
    let mut e = log10_approx(&a).floor() as i64;
    // Correct the estimate so that 10^e <= a < 10^(e+1).
    while a < pow10(e) {
        e -= 1;
    }
    while a >= pow10(e + 1) {
        e += 1;
    }
    let scaled = (&a / pow10(e - digits as i64 + 1)).to_integer();
    let s = scaled.to_string();
    let (head, tail) = s.split_at(1);
    let tail = tail.trim_end_matches('0');
    if tail.is_empty() {
        format!("{sign}{head}e{e}")
    } else {
        format!("{sign}{head}.{tail}e{e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_literals() {
        assert_eq!(decimal("7.51e358"), ratio(751, 1) * pow10(356));
        assert_eq!(decimal("0.0571"), ratio(571, 10000));
        assert_eq!(decimal("-3"), ratio(-3, 1));
        assert_eq!(decimal("1.368E45"), sci("1.368", 45));
        assert_eq!(decimal(".5"), ratio(1, 2));
        assert!(try_decimal("1.2.3").is_none());
        assert!(try_decimal("e5").is_none());
    }

    #[test]
    fn conversions_at_extreme_scale() {
        let huge = decimal("1.39e1424");
        assert!((log10_approx(&huge) - (1424.0 + 1.39f64.log10())).abs() < 1e-9);
        assert!(to_f64(&huge).is_infinite());
        assert!((to_f64(&decimal("2.5e-3")) - 0.0025).abs() < 1e-18);
    }

    #[test]
    fn formats_truncated() {
        assert_eq!(format_sci(&decimal("1367560000000000000000000000000000000000000000"), 4), "1.367e45");
        assert_eq!(format_sci(&decimal("7.39056e38"), 4), "7.39e38");
        assert_eq!(format_sci(&ratio(1, 8), 3), "1.25e-1");
    }
}
