use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{pow_mod, Natural};

const SIEVE_LIMIT: usize = 1_000_000;

/// Witness set that makes the strong test deterministic below
/// 3 317 044 064 679 887 385 961 981.
const DETERMINISTIC_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn deterministic_limit() -> &'static BigUint {
    static LIMIT: OnceLock<BigUint> = OnceLock::new();
    LIMIT.get_or_init(|| "3317044064679887385961981".parse().unwrap())
}

/// Primes below one million, computed once.
pub fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve(SIEVE_LIMIT))
}

fn sieve(limit: usize) -> Vec<u64> {
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn strong_test<T: Natural>(n: &T, d: &T, s: u32, base: &T) -> bool {
    let n_minus_1 = n.clone() - T::one();
    let mut x = pow_mod(base, d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = x.mul_mod(&x, n);
        if x == n_minus_1 {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

/// Strong probable-prime test to the given bases.
pub fn strong_probable_prime<T: Natural>(n: &T, bases: &[u64]) -> bool {
    let two = T::small(2);
    if *n < two {
        return false;
    }
    let mut d = n.clone() - T::one();
    let mut s = 0u32;
    while d.is_even() {
        d = d / two.clone();
        s += 1;
    }
    for &b in bases {
        let base = T::small(b).mod_floor(n);
        if base.is_zero() {
            continue;
        }
        if !strong_test(n, &d, s, &base) {
            return false;
        }
    }
    true
}

/// Primality check returning `(is_prime, proved)`.
///
/// Below 3.3·10²⁴ the fixed witness set is a proof; above it the answer is a
/// Baillie–PSW probable prime and `proved` is false.
pub fn is_prime<T: Natural>(n: &T) -> (bool, bool) {
    if *n < T::small(2) {
        return (false, true);
    }
    for &p in &small_primes()[..DETERMINISTIC_BASES.len()] {
        let pt = T::small(p);
        if *n == pt {
            return (true, true);
        }
        if n.is_multiple_of(&pt) {
            return (false, true);
        }
    }
    let big = n.to_biguint();
    if big < *deterministic_limit() {
        return (strong_probable_prime(n, &DETERMINISTIC_BASES), true);
    }
    if !strong_probable_prime(n, &[2]) {
        return (false, true);
    }
    (strong_lucas_probable_prime(&big), false)
}

pub fn is_prime_u64(n: u64) -> bool {
    if (n as usize) < SIEVE_LIMIT {
        return small_primes().binary_search(&n).is_ok();
    }
    is_prime(&n).0
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime_u64(c) {
        c += 1;
    }
    c
}

fn jacobi(a: &BigInt, n: &BigUint) -> i32 {
    let n_int = BigInt::from_biguint(Sign::Plus, n.clone());
    let mut a = a.mod_floor(&n_int).to_biguint().unwrap();
    let mut n = n.clone();
    let mut result = 1;
    let three = BigUint::from(3u32);
    let four = BigUint::from(4u32);
    let five = BigUint::from(5u32);
    let eight = BigUint::from(8u32);
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = &n % &eight;
            if r == three || r == five {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if &a % &four == three && &n % &four == three {
            result = -result;
        }
        a %= &n;
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// Strong Lucas test with Selfridge parameters (method A).
fn strong_lucas_probable_prime(n: &BigUint) -> bool {
    if n.is_even() {
        return *n == BigUint::from(2u32);
    }
    let root = n.sqrt();
    if &root * &root == *n {
        return false;
    }
    let mut d_param = BigInt::from(5);
    loop {
        let j = jacobi(&d_param, n);
        if j == -1 {
            break;
        }
        if j == 0 && d_param.abs().to_biguint().unwrap() != *n {
            return false;
        }
        let two = BigInt::from(2);
        d_param = if d_param.is_positive() { -(d_param + two) } else { two - d_param };
    }
    let n_int = BigInt::from_biguint(Sign::Plus, n.clone());
    let p = BigInt::one();
    let q = (BigInt::one() - &d_param) / 4;
    let md = |x: BigInt| x.mod_floor(&n_int);

    let mut d = n + 1u32;
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    let inv2 = md((&n_int + 1) / 2);
    // Binary ladder for U_d, V_d, Q^d.
    let mut u = BigInt::zero();
    let mut v = BigInt::from(2);
    let mut qk = BigInt::one();
    let bits = d.bits();
    let d_mod = md(d_param.clone());
    for i in (0..bits).rev() {
        u = md(&u * &v);
        v = md(&v * &v - 2 * &qk);
        qk = md(&qk * &qk);
        if d.bit(i) {
            let nu = md((&p * &u + &v) * &inv2);
            let nv = md((&d_mod * &u + &p * &v) * &inv2);
            u = nu;
            v = nv;
            qk = md(&qk * &q);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = md(&v * &v - 2 * &qk);
        qk = md(&qk * &qk);
        if v.is_zero() {
            return true;
        }
    }
    false
}
