use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::rational::{format_sci, to_f64};

pub const DEFAULT_PRECISION_BITS: u32 = 128;
pub const MAX_PRECISION_BITS: u32 = 4096;
const GUARD_BITS: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("comparison undecided at {0} bits of precision")]
    Undecided(u32),
    #[error("logarithm of a non-positive interval")]
    NonPositiveLog,
    #[error("division by an interval containing zero")]
    DivisionByZero,
}

/// Closed interval `[lo, hi]` with dyadic rational endpoints that is
/// guaranteed to contain the real value it stands for.
#[derive(Clone, PartialEq, Eq)]
pub struct BoundValue {
    lo: BigRational,
    hi: BigRational,
    prec: u32,
}

impl fmt::Debug for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_sci(&self.lo, 8), format_sci(&self.hi, 8))
    }
}

/// Precision from `FFAP_PRECISION_BITS`, falling back to the default.
pub fn configured_precision() -> u32 {
    std::env::var("FFAP_PRECISION_BITS")
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .filter(|&b| b >= 16)
        .map(|b| b.min(MAX_PRECISION_BITS))
        .unwrap_or(DEFAULT_PRECISION_BITS)
}

/// Evaluates `test` at increasing precision until it commits to an answer.
///
/// `test` returns `None` while the intervals it compares still overlap.
pub fn decide<F>(mut test: F) -> Result<bool, BoundError>
where
    F: FnMut(u32) -> Option<bool>,
{
    let mut prec = configured_precision();
    loop {
        if let Some(answer) = test(prec) {
            return Ok(answer);
        }
        if prec >= MAX_PRECISION_BITS {
            return Err(BoundError::Undecided(prec));
        }
        prec = (prec * 2).min(MAX_PRECISION_BITS);
    }
}

fn pow2(k: i64) -> BigRational {
    if k >= 0 {
        BigRational::from_integer(BigInt::one() << k as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-k) as usize)
    }
}

/// `floor(log2 |r|)` for nonzero `r`.
fn ilog2(r: &BigRational) -> i64 {
    let n = r.numer().abs();
    let d = r.denom();
    let mut k = n.bits() as i64 - d.bits() as i64;
    // Now 2^(k-1) < |r| < 2^(k+1).
    if r.abs() < pow2(k) {
        k -= 1;
    }
    k
}

fn fix_floor(r: &BigRational, w: u32) -> BigInt {
    (r * pow2(w as i64)).floor().to_integer()
}

fn fix_ceil(r: &BigRational, w: u32) -> BigInt {
    (r * pow2(w as i64)).ceil().to_integer()
}

fn from_fix(v: BigInt, w: u32) -> BigRational {
    BigRational::new(v, BigInt::one() << w as usize)
}

fn mul_shift(a: &BigInt, b: &BigInt, w: u32, up: bool) -> BigInt {
    let prod = a * b;
    if up {
        -((-prod) >> w as usize)
    } else {
        prod >> w as usize
    }
}

fn div_round(a: &BigInt, d: u64, up: bool) -> BigInt {
    let d = BigInt::from(d);
    if up {
        a.div_ceil(&d)
    } else {
        a.div_floor(&d)
    }
}

/// Rounds `r` outward to a dyadic with about `prec` significant bits.
fn round_dyadic(r: &BigRational, prec: u32, up: bool) -> BigRational {
    if r.is_zero() || (r.denom().is_one() && r.numer().bits() <= prec as u64) {
        return r.clone();
    }
    let shift = prec as i64 - ilog2(r);
    let scaled = r * pow2(shift);
    let int = if up { scaled.ceil() } else { scaled.floor() };
    int * pow2(-shift)
}

/// Sum of `z^(2j+1)/(2j+1)` in fixed point, `z = zf / 2^w ≤ 1/3`, rounded down
/// or up. The upper variant includes a bound on the neglected tail.
fn atanh_fix(zf: &BigInt, w: u32, up: bool) -> BigInt {
    let z2 = mul_shift(zf, zf, w, up);
    let mut p = zf.clone();
    let mut sum = BigInt::zero();
    let mut j: u64 = 0;
    loop {
        if up && p <= BigInt::one() {
            return sum + 2 * p + 1;
        }
        if p.is_zero() {
            return sum;
        }
        sum += div_round(&p, 2 * j + 1, up);
        p = mul_shift(&p, &z2, w, up);
        j += 1;
    }
}

/// Bounds on `ln 2` in fixed point at scale `w`.
fn ln2_fix(w: u32) -> (BigInt, BigInt) {
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let lo = atanh_fix(&fix_floor(&third, w), w, false) * 2;
    let hi = atanh_fix(&fix_ceil(&third, w), w, true) * 2;
    (lo, hi)
}

/// Rational lower or upper bound on `ln x`, `x > 0`.
fn ln_rational(x: &BigRational, prec: u32, up: bool) -> BigRational {
    assert!(x.is_positive());
    if x.is_one() {
        return BigRational::zero();
    }
    let k = ilog2(x);
    let w = prec + GUARD_BITS + 64 - (k.unsigned_abs().max(1)).leading_zeros();
    let m = x * pow2(-k);
    let one = BigRational::one();
    let z = (&m - &one) / (&m + &one);
    let zf = if up { fix_ceil(&z, w) } else { fix_floor(&z, w) };
    let s = atanh_fix(&zf, w, up) * 2;
    let (l2lo, l2hi) = ln2_fix(w);
    let l2 = if (k >= 0) == up { l2hi } else { l2lo };
    from_fix(s + l2 * BigInt::from(k), w)
}

/// Taylor sum of `exp(s)` for `0 ≤ s ≤ 1/2` in fixed point.
fn exp_small_fix(sf: &BigInt, w: u32, up: bool) -> BigInt {
    let mut term = BigInt::one() << w as usize;
    let mut sum = BigInt::zero();
    let mut i: u64 = 0;
    loop {
        if up && i > 0 && term <= BigInt::one() {
            return sum + 2 * term + 1;
        }
        if term.is_zero() {
            return sum;
        }
        sum += &term;
        i += 1;
        term = div_round(&mul_shift(&term, sf, w, up), i, up);
    }
}

/// Rational lower or upper bound on `exp y`.
fn exp_rational(y: &BigRational, prec: u32, up: bool) -> BigRational {
    if y.is_zero() {
        return BigRational::one();
    }
    let approx = to_f64(y);
    assert!(approx.abs() < 1e15, "exponent out of range");
    let k = (approx / std::f64::consts::LN_2).round() as i64;
    let w = prec + GUARD_BITS + 64 - k.unsigned_abs().max(1).leading_zeros();
    let (l2lo, l2hi) = ln2_fix(w);
    let kb = BigInt::from(k);
    // r = y - k ln 2, bounded on the side that makes exp(r) an outward bound.
    let l2 = if (k >= 0) == up { l2lo } else { l2hi };
    let r = y - from_fix(l2 * kb, w);
    let er = if r.is_negative() {
        let s = -r;
        let sf = if up { fix_floor(&s, w) } else { fix_ceil(&s, w) };
        let denom = exp_small_fix(&sf, w, !up);
        let one_sq = BigInt::one() << (2 * w) as usize;
        let v = if up { one_sq.div_ceil(&denom) } else { one_sq.div_floor(&denom) };
        from_fix(v, w)
    } else {
        let sf = if up { fix_ceil(&r, w) } else { fix_floor(&r, w) };
        from_fix(exp_small_fix(&sf, w, up), w)
    };
    er * pow2(k)
}

impl BoundValue {
    pub fn exact(r: BigRational) -> Self {
        BoundValue { lo: r.clone(), hi: r, prec: DEFAULT_PRECISION_BITS }
    }

    pub fn from_int(v: i64) -> Self {
        Self::exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_big(v: &num_bigint::BigUint) -> Self {
        Self::exact(BigRational::from_integer(BigInt::from_biguint(Sign::Plus, v.clone())))
    }

    pub fn with_precision(mut self, prec: u32) -> Self {
        self.prec = prec;
        self
    }

    pub fn interval(lo: BigRational, hi: BigRational, prec: u32) -> Self {
        assert!(lo <= hi, "inverted interval");
        BoundValue { lo, hi, prec }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, r: &BigRational) -> bool {
        &self.lo <= r && r <= &self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        to_f64(&((&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))))
    }

    fn rounded(lo: BigRational, hi: BigRational, prec: u32) -> Self {
        BoundValue {
            lo: round_dyadic(&lo, prec + GUARD_BITS, false),
            hi: round_dyadic(&hi, prec + GUARD_BITS, true),
            prec,
        }
    }

    fn joint_prec(&self, other: &Self) -> u32 {
        self.prec.max(other.prec)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::rounded(&self.lo + &other.lo, &self.hi + &other.hi, self.joint_prec(other))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::rounded(&self.lo - &other.hi, &self.hi - &other.lo, self.joint_prec(other))
    }

    pub fn neg(&self) -> Self {
        BoundValue { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Self::rounded(lo, hi, self.joint_prec(other))
    }

    pub fn recip(&self) -> Result<Self, BoundError> {
        if !self.lo.is_positive() && !self.hi.is_negative() {
            return Err(BoundError::DivisionByZero);
        }
        Ok(Self::rounded(self.hi.recip(), self.lo.recip(), self.prec))
    }

    pub fn div(&self, other: &Self) -> Result<Self, BoundError> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        self.mul(&Self::exact(r.clone()))
    }

    pub fn ln(&self) -> Result<Self, BoundError> {
        if !self.lo.is_positive() {
            return Err(BoundError::NonPositiveLog);
        }
        Ok(BoundValue {
            lo: round_dyadic(&ln_rational(&self.lo, self.prec, false), self.prec + GUARD_BITS, false),
            hi: round_dyadic(&ln_rational(&self.hi, self.prec, true), self.prec + GUARD_BITS, true),
            prec: self.prec,
        })
    }

    pub fn exp(&self) -> Self {
        BoundValue {
            lo: round_dyadic(&exp_rational(&self.lo, self.prec, false), self.prec + GUARD_BITS, false),
            hi: round_dyadic(&exp_rational(&self.hi, self.prec, true), self.prec + GUARD_BITS, true),
            prec: self.prec,
        }
    }

    /// `self^y = exp(y ln self)` for a positive base.
    pub fn pow(&self, y: &Self) -> Result<Self, BoundError> {
        Ok(self.ln()?.mul(y).exp())
    }

    /// Integer power by repeated squaring; sign-safe through interval products.
    pub fn powi(&self, e: u32) -> Self {
        let mut acc = Self::from_int(1).with_precision(self.prec);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        if !self.lo.is_negative() && acc.lo.is_negative() {
            acc.lo = BigRational::zero();
        }
        acc
    }

    /// `self^(1/k)` for a positive base.
    pub fn root(&self, k: u32) -> Result<Self, BoundError> {
        let inv = Self::exact(BigRational::new(BigInt::one(), BigInt::from(k))).with_precision(self.prec);
        self.pow(&inv)
    }

    /// Log to base `b`.
    pub fn log(&self, b: &Self) -> Result<Self, BoundError> {
        self.ln()?.div(&b.ln()?)
    }

    /// Certain ordering against another interval, or `None` on overlap.
    pub fn try_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && other.lo == other.hi && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn try_cmp_rational(&self, r: &BigRational) -> Option<Ordering> {
        self.try_cmp(&Self::exact(r.clone()))
    }

    /// `Some(true)` when certainly `self ≥ other`, `Some(false)` when certainly below.
    pub fn try_ge(&self, other: &Self) -> Option<bool> {
        if self.lo >= other.hi {
            Some(true)
        } else if self.hi < other.lo {
            Some(false)
        } else {
            None
        }
    }

    /// `Some(true)` when certainly `self > other`, `Some(false)` when certainly not.
    pub fn try_gt(&self, other: &Self) -> Option<bool> {
        if self.lo > other.hi {
            Some(true)
        } else if self.hi <= other.lo {
            Some(false)
        } else {
            None
        }
    }

    pub fn floor_f64_digits(&self, digits: usize) -> String {
        format_sci(&self.lo, digits)
    }

    pub fn to_u64_floor(&self) -> Option<u64> {
        self.lo.floor().to_integer().to_u64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{decimal, ratio};

    fn b(r: BigRational) -> BoundValue {
        BoundValue::exact(r)
    }

    // Reference constants are truncated at 38 decimals.
    fn near(v: &BoundValue, reference: &str) -> bool {
        let r = decimal(reference);
        let tol = decimal("1e-37");
        v.lo() - &tol <= r && r <= v.hi() + &tol
    }

    #[test]
    fn ln_and_exp_contain_reference_values() {
        let ln2 = b(ratio(2, 1)).ln().unwrap();
        assert!(near(&ln2, "0.69314718055994530941723212145817656807"));
        assert!(to_f64(&ln2.width()) < 1e-38);
        let e = b(ratio(1, 1)).exp();
        assert!(near(&e, "2.71828182845904523536028747135266249775"));
        let small = b(ratio(-7, 3)).exp();
        assert!((small.midpoint_f64() - (-7f64 / 3.0).exp()).abs() < 1e-16);
        let ln_third = b(ratio(1, 3)).ln().unwrap();
        assert!((ln_third.midpoint_f64() + 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn large_magnitudes() {
        let x = b(decimal("1.39e1424"));
        let l = x.ln().unwrap();
        let expect = 1424.0 * 10f64.ln() + 1.39f64.ln();
        assert!((l.midpoint_f64() - expect).abs() < 1e-9);
        let back = l.exp();
        assert!(back.lo() <= x.lo() && x.hi() <= back.hi());
        let rel = to_f64(&(back.width() / x.lo()));
        assert!(rel < 1e-30);
    }

    #[test]
    fn powers_and_roots() {
        let r = b(ratio(2, 1)).root(2).unwrap();
        assert!(near(&r, "1.41421356237309504880168872420969807856"));
        let sq = r.powi(2);
        assert!(sq.contains(&ratio(2, 1)));
        let p = b(ratio(10, 1)).pow(&b(ratio(3, 2))).unwrap();
        assert!((p.midpoint_f64() - 10f64.powf(1.5)).abs() < 1e-10);
        assert_eq!(b(ratio(-3, 1)).powi(3), b(ratio(-27, 1)));
    }

    #[test]
    fn comparisons_decide_when_separated() {
        let a = b(ratio(2, 1)).ln().unwrap();
        let c = b(ratio(7, 10));
        assert_eq!(a.try_cmp(&c), Some(Ordering::Less));
        assert_eq!(a.try_ge(&c), Some(false));
        assert_eq!(c.try_gt(&a), Some(true));
        assert_eq!(b(ratio(1, 2)).try_cmp_rational(&ratio(1, 2)), Some(Ordering::Equal));
        assert_eq!(b(ratio(1, 2)).try_ge(&b(ratio(1, 2))), Some(true));
        assert_eq!(b(ratio(1, 2)).try_gt(&b(ratio(1, 2))), Some(false));
        let ans = decide(|prec| {
            let l = BoundValue::from_int(3).with_precision(prec).ln().ok()?;
            l.try_gt(&b(decimal("1.0986122886681")))
        });
        assert_eq!(ans, Ok(true));
    }

    #[test]
    fn undecidable_equalities_report() {
        let ans = decide(|prec| {
            let x = BoundValue::from_int(5).with_precision(prec).ln().ok()?.exp();
            x.try_gt(&b(ratio(5, 1)))
        });
        assert_eq!(ans, Err(BoundError::Undecided(MAX_PRECISION_BITS)));
    }

    #[test]
    fn division_guards_zero() {
        let z = BoundValue::interval(ratio(-1, 1), ratio(1, 1), 64);
        assert_eq!(b(ratio(1, 1)).div(&z).unwrap_err(), BoundError::DivisionByZero);
        assert_eq!(b(ratio(0, 1)).ln().unwrap_err(), BoundError::NonPositiveLog);
    }
}
