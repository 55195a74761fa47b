//! Exact integer and rational arithmetic: the natural-number abstraction,
//! factorization, multiplicative functions, prime classes and outward-rounded
//! interval bounds.

mod bound;
mod classes;
mod factor;
mod primes;
mod rational;

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{FromPrimitive, ToPrimitive};

pub use bound::{
    configured_precision, decide, BoundError, BoundValue, DEFAULT_PRECISION_BITS,
    MAX_PRECISION_BITS,
};
pub use classes::{
    a_t_constant, max_class_count, nth_prime_list, prime_class, primes_below, primes_in_class,
    primorial, PrimeFilter, PrimeForm,
};
pub use factor::{
    cyclotomic_value, factorize, factorize_qn_minus_1, try_factorize, try_factorize_qn_minus_1,
    Certainty, FactorError,
    FactoredNat,
};
pub use primes::{is_prime, is_prime_u64, next_prime, small_primes, strong_probable_prime};
pub use rational::{
    decimal, format_sci, from_biguint, log10_approx, ratio, sci, to_f64, try_decimal,
};

/// Unsigned integer types the number-theoretic routines run over.
///
/// `mul_mod` is the one operation that cannot be written generically without
/// overflow, so each width supplies its own.
pub trait Natural:
    Clone + Ord + Integer + FromPrimitive + ToPrimitive + Display + Debug + Hash + Send + Sync
{
    fn mul_mod(&self, other: &Self, modulus: &Self) -> Self;
    fn bit_len(&self) -> u64;
    fn to_biguint(&self) -> BigUint;
    fn from_biguint(value: &BigUint) -> Option<Self>;

    fn small(v: u64) -> Self {
        Self::from_u64(v).expect("small constant fits every natural type")
    }
}

impl Natural for u64 {
    fn mul_mod(&self, other: &Self, modulus: &Self) -> Self {
        ((*self as u128 * *other as u128) % *modulus as u128) as u64
    }
    fn bit_len(&self) -> u64 {
        (64 - self.leading_zeros()) as u64
    }
    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }
    fn from_biguint(value: &BigUint) -> Option<Self> {
        value.to_u64()
    }
}

impl Natural for u128 {
    fn mul_mod(&self, other: &Self, modulus: &Self) -> Self {
        if *self <= u64::MAX as u128 && *other <= u64::MAX as u128 {
            if let Some(prod) = self.checked_mul(*other) {
                return prod % *modulus;
            }
        }
        let prod = BigUint::from(*self) * BigUint::from(*other) % BigUint::from(*modulus);
        prod.to_u128().expect("reduced below a u128 modulus")
    }
    fn bit_len(&self) -> u64 {
        (128 - self.leading_zeros()) as u64
    }
    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }
    fn from_biguint(value: &BigUint) -> Option<Self> {
        value.to_u128()
    }
}

impl Natural for BigUint {
    fn mul_mod(&self, other: &Self, modulus: &Self) -> Self {
        (self * other) % modulus
    }
    fn bit_len(&self) -> u64 {
        self.bits()
    }
    fn to_biguint(&self) -> BigUint {
        self.clone()
    }
    fn from_biguint(value: &BigUint) -> Option<Self> {
        Some(value.clone())
    }
}

/// `base^exp mod modulus` by left-to-right square and multiply.
pub fn pow_mod<T: Natural>(base: &T, exp: &T, modulus: &T) -> T {
    if modulus.is_one() {
        return T::zero();
    }
    let bits = exp.bit_len();
    let exp_big = exp.to_biguint();
    let base = base.mod_floor(modulus);
    let mut acc = T::one();
    for i in (0..bits).rev() {
        acc = acc.mul_mod(&acc, modulus);
        if exp_big.bit(i) {
            acc = acc.mul_mod(&base, modulus);
        }
    }
    acc
}

/// Multiplicative order of `a` modulo `m` (requires gcd(a, m) = 1, m ≥ 1).
pub fn multiplicative_order_mod(a: u64, m: u64) -> u64 {
    assert!(m >= 1);
    if m == 1 {
        return 1;
    }
    debug_assert_eq!(a.gcd(&m), 1);
    let phi = factorize(m).euler_phi();
    let mut order = phi;
    for (p, _) in factorize(phi).factors() {
        while order % p == 0 && pow_mod(&a, &(order / p), &m) == 1 {
            order /= p;
        }
    }
    order
}

/// Möbius function on small arguments.
pub fn mobius(n: u64) -> i32 {
    let f = factorize(n);
    if f.factors().iter().any(|&(_, k)| k > 1) {
        0
    } else if f.omega() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, k) in factorize(n).factors() {
        let current = out.clone();
        let mut pk = 1u64;
        for _ in 0..*k {
            pk *= p;
            out.extend(current.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

/// Exact `base^exp` as a big natural.
pub fn big_pow(base: u64, exp: u32) -> BigUint {
    num_traits::pow(BigUint::from(base), exp as usize)
}

/// Returns `Some((p, k))` when `q = p^k` with `p` prime.
pub fn prime_power_decompose(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let f = factorize(q);
    match f.factors() {
        [(p, k)] => Some((*p, *k)),
        _ => None,
    }
}

pub fn is_prime_power(q: u64) -> bool {
    prime_power_decompose(q).is_some()
}
