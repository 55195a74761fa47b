//! The two bounds applied to `q = 2^k`, `m = 2`, below the asymptotic threshold.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::SieveError;
use crate::arith::{
    a_t_constant, decide, decimal, divisors, factorize, from_biguint, is_prime_u64, multiplicative_order_mod,
    pow_mod, primes_in_class, ratio,
    BoundValue, PrimeFilter, PrimeForm,
};

/// How `T` is read off `q^n − 1` and `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TReading {
    /// `T = (q^n − 1)/L`.
    Quotient,
    /// `T = (q^n − 1)/lcm(q^n − 1, L)`, which is always 1.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenBoundT {
    /// Product of the primes `≤ p_0` dividing `q^n − 1`.
    pub l: BigUint,
    pub t: BigUint,
    /// Number of consecutive primes after `p_0` whose product stays `≤ T`.
    pub s: usize,
    pub delta_t: BigRational,
    pub big_delta_t: BigRational,
    /// `ω(L)`.
    pub small_primes: usize,
}

pub fn even_q_bound_t(q: u64, n: u32, p0: u64, reading: TReading) -> Result<EvenBoundT, SieveError> {
    if !q.is_power_of_two() || q == 1 {
        return Err(SieveError::Invalid(format!("{q} is not a power of two")));
    }
    even_q_bound_t_pow2(q.trailing_zeros(), n, p0, reading)
}

/// [`even_q_bound_t`] for `q = 2^k`, any `k`.
pub fn even_q_bound_t_pow2(k: u32, n: u32, p0: u64, reading: TReading) -> Result<EvenBoundT, SieveError> {
    if k == 0 || !is_prime_u64(p0) {
        return Err(SieveError::Invalid(format!("need k ≥ 1 and prime p0, got k={k}, p0={p0}")));
    }
    let value = (BigUint::one() << (k as usize * n as usize)) - 1u32;
    let mut l = BigUint::one();
    let mut small_primes = 0;
    for p in primes_in_class(2, PrimeForm::ANY).take_while(|&p| p <= p0) {
        if (&value % p).is_zero() {
            l *= p;
            small_primes += 1;
        }
    }
    let t = match reading {
        TReading::Quotient => &value / &l,
        TReading::Literal => BigUint::one(),
    };
    let mut prod = BigUint::one();
    let mut s = 0;
    let mut delta_t = BigRational::one();
    for p in primes_in_class(p0 + 1, PrimeForm::ANY) {
        if &prod * p > t {
            break;
        }
        prod *= p;
        s += 1;
        delta_t -= ratio(2, p as i64);
    }
    if !delta_t.is_positive() {
        return Err(SieveError::DeltaUndefined);
    }
    let big_delta_t = ratio(2, 1) + ratio(2 * s as i64 - 1, 1) / &delta_t;
    Ok(EvenBoundT { l, t, s, delta_t, big_delta_t, small_primes })
}

/// `log₂` of the bound on `W(xⁿ − 1)` used by the first method.
pub fn w_bound_log2(q: u64, n: u32) -> BigRational {
    let n = ratio(n as i64, 1);
    match q {
        2 => (n + ratio(14, 1)) / ratio(5, 1),
        4 => (n + ratio(41, 1)) / ratio(4, 1),
        8 => n / ratio(3, 1) + ratio(14, 1),
        16 => (n + ratio(15, 1)) / ratio(2, 1),
        _ => n,
    }
}

/// `q^{n/2} ≥ 2·W·A_t²·q^{2n/t}` with `A_t` over odd primes.
pub fn method_one(q: u64, n: u32, t: &BigRational) -> Result<bool, SieveError> {
    if !q.is_power_of_two() {
        return Err(SieveError::Invalid(format!("{q} is not a power of two")));
    }
    method_one_pow2(q.trailing_zeros(), n, t)
}

/// [`method_one`] for `q = 2^k`, any `k`.
pub fn method_one_pow2(k: u32, n: u32, t: &BigRational) -> Result<bool, SieveError> {
    let w = if k < 64 { w_bound_log2(1 << k, n) } else { ratio(n as i64, 1) };
    let nn = ratio(n as i64, 1);
    let q_exp = (&nn / ratio(2, 1) - ratio(2, 1) * &nn / t) * ratio(k as i64, 1);
    Ok(decide(|prec| {
        let ln_a_t = ln_odd_a_t(t, prec)?;
        let ln2 = BoundValue::from_int(2).with_precision(prec).ln().ok()?;
        let lhs = ln2.scale(&q_exp);
        let rhs = ln2.scale(&(ratio(1, 1) + &w)).add(&ln_a_t.scale(&ratio(2, 1)));
        lhs.try_ge(&rhs)
    })?)
}

fn ln_odd_a_t(t: &BigRational, prec: u32) -> Option<BoundValue> {
    thread_local! {
        static CACHE: RefCell<HashMap<(BigRational, u32), BoundValue>> = RefCell::new(HashMap::new());
    }
    if let Some(v) = CACHE.with(|c| c.borrow().get(&(t.clone(), prec)).cloned()) {
        return Some(v);
    }
    let v = a_t_constant(t, PrimeFilter::All, true, false, prec).ok()?.ln().ok()?;
    CACHE.with(|c| c.borrow_mut().insert((t.clone(), prec), v.clone()));
    Some(v)
}

/// `q^n ≥ (2·Δ_T·W(xⁿ − 1)·W(L)²)²`.
pub fn method_two(q: u64, n: u32, p0: u64, reading: TReading) -> Result<bool, SieveError> {
    if !q.is_power_of_two() || q == 1 {
        return Err(SieveError::Invalid(format!("{q} is not a power of two")));
    }
    method_two_pow2(q.trailing_zeros(), n, p0, reading)
}

/// [`method_two`] for `q = 2^k`, any `k`.
pub fn method_two_pow2(k: u32, n: u32, p0: u64, reading: TReading) -> Result<bool, SieveError> {
    let b = match even_q_bound_t_pow2(k, n, p0, reading) {
        Ok(b) => b,
        Err(SieveError::DeltaUndefined) => return Ok(false),
        Err(e) => return Err(e),
    };
    let distinct = distinct_factors_pow2(k, n as u64) as usize;
    let w = BigUint::one() << (distinct + 2 * b.small_primes);
    let rhs = ratio(2, 1) * &b.big_delta_t * from_biguint(&w);
    let qn = BigUint::one() << (k as usize * n as usize);
    Ok(from_biguint(&qn) >= &rhs * &rhs)
}

/// Number of distinct irreducible factors of `xⁿ − 1` over `F_{2^k}`.
pub fn distinct_factors_pow2(k: u32, n: u64) -> u64 {
    let mut n_odd = n;
    while n_odd % 2 == 0 {
        n_odd /= 2;
    }
    divisors(n_odd)
        .into_iter()
        .map(|d| {
            let r = pow_mod(&2u64, &(k as u64), &d);
            factorize(d).euler_phi() / multiplicative_order_mod(r, d)
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenGridLimits {
    pub max_k: u32,
    pub bound: BigRational,
    pub t: BigRational,
    pub p0: u64,
}

impl Default for EvenGridLimits {
    fn default() -> Self {
        EvenGridLimits { max_k: 596, bound: decimal("7.51e358"), t: ratio(10, 1), p0: 61 }
    }
}

/// Pairs `(2^k, n)` with `n ≥ 2`, `q^n` below the bound, on which neither
/// method succeeds.
pub fn even_q_grid(limits: &EvenGridLimits, reading: TReading) -> Result<Vec<(u64, u32)>, SieveError> {
    let mut out = Vec::new();
    for k in 1..=limits.max_k {
        let log2_bound = crate::arith::log10_approx(&limits.bound) / std::f64::consts::LOG10_2;
        if (2 * k) as f64 > log2_bound + 1.0 {
            break;
        }
        for n in 2u32.. {
            let bits = k as u64 * n as u64;
            if bits as f64 > log2_bound + 1.0 {
                break;
            }
            let qn = BigRational::from_integer(BigInt::from(BigUint::one() << bits as usize));
            if qn >= limits.bound {
                break;
            }
            if method_one_pow2(k, n, &limits.t)? {
                continue;
            }
            if method_two_pow2(k, n, limits.p0, reading)? {
                continue;
            }
            if k >= 64 {
                return Err(SieveError::Invalid(format!("2^{k} does not fit the field-size type")));
            }
            out.push((1u64 << k, n));
        }
    }
    Ok(out)
}
