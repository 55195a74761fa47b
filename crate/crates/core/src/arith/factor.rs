use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::primes::{is_prime, small_primes};
use super::{divisors, mobius, Natural};

const RHO_ATTEMPTS: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Certainty {
    Proved,
    Probable,
}

impl Certainty {
    fn and(self, other: Certainty) -> Certainty {
        if self == Certainty::Proved && other == Certainty::Proved {
            Certainty::Proved
        } else {
            Certainty::Probable
        }
    }
}

/// A natural number together with its prime factorization, primes ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredNat<T> {
    value: T,
    factors: Vec<(T, u32)>,
    certainty: Certainty,
}

impl<T: Natural> FactoredNat<T> {
    /// Builds from prime-multiplicity pairs; merges repeats and sorts.
    pub fn from_factors(factors: impl IntoIterator<Item = (T, u32)>, certainty: Certainty) -> Self {
        let mut map: BTreeMap<T, u32> = BTreeMap::new();
        for (p, k) in factors {
            if k > 0 {
                *map.entry(p).or_insert(0) += k;
            }
        }
        let mut value = T::one();
        for (p, k) in &map {
            for _ in 0..*k {
                value = value * p.clone();
            }
        }
        FactoredNat { value, factors: map.into_iter().collect(), certainty }
    }

    pub fn value(&self) -> &T {
        &self.value
    }

    pub fn factors(&self) -> &[(T, u32)] {
        &self.factors
    }

    pub fn certainty(&self) -> Certainty {
        self.certainty
    }

    pub fn primes(&self) -> Vec<T> {
        self.factors.iter().map(|(p, _)| p.clone()).collect()
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn euler_phi(&self) -> T {
        let mut acc = T::one();
        for (p, k) in &self.factors {
            acc = acc * (p.clone() - T::one());
            for _ in 1..*k {
                acc = acc * p.clone();
            }
        }
        acc
    }

    /// `W(n) = 2^ω(n)`; never exceeds the value itself.
    pub fn num_squarefree_divisors(&self) -> T {
        let mut acc = T::one();
        let two = T::small(2);
        for _ in 0..self.factors.len() {
            acc = acc * two.clone();
        }
        acc
    }

    pub fn radical(&self) -> FactoredNat<T> {
        FactoredNat::from_factors(
            self.factors.iter().map(|(p, _)| (p.clone(), 1)),
            self.certainty,
        )
    }

    pub fn to_big(&self) -> FactoredNat<BigUint> {
        FactoredNat {
            value: self.value.to_biguint(),
            factors: self.factors.iter().map(|(p, k)| (p.to_biguint(), *k)).collect(),
            certainty: self.certainty,
        }
    }
}

impl FactoredNat<BigUint> {
    /// Narrows to `u64` when the value fits.
    pub fn to_u64(&self) -> Option<FactoredNat<u64>> {
        Some(FactoredNat {
            value: self.value.to_u64()?,
            factors: self
                .factors
                .iter()
                .map(|(p, k)| p.to_u64().map(|p| (p, *k)))
                .collect::<Option<Vec<_>>>()?,
            certainty: self.certainty,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FactorError {
    #[error("factorize requires n >= 1")]
    Zero,
    #[error("rho found no factor of {0} within the attempt budget")]
    RhoExhausted(String),
}

/// Factorization by trial division below 10⁶ followed by Brent's rho on the
/// cofactor. Panics where [`try_factorize`] would return an error.
pub fn factorize<T: Natural>(n: T) -> FactoredNat<T> {
    try_factorize(n).unwrap_or_else(|e| panic!("{e}"))
}

pub fn try_factorize<T: Natural>(n: T) -> Result<FactoredNat<T>, FactorError> {
    if n.is_zero() {
        return Err(FactorError::Zero);
    }
    let mut rest = n;
    let mut out: Vec<(T, u32)> = Vec::new();
    let mut certainty = Certainty::Proved;
    for &p in small_primes() {
        let pt = T::small(p);
        if pt.clone() * pt.clone() > rest {
            break;
        }
        let mut k = 0;
        while rest.is_multiple_of(&pt) {
            rest = rest / pt.clone();
            k += 1;
        }
        if k > 0 {
            out.push((pt, k));
        }
    }
    if !rest.is_one() {
        let mut stack = vec![rest];
        while let Some(m) = stack.pop() {
            let (prime, proved) = is_prime(&m);
            if prime {
                if !proved {
                    certainty = certainty.and(Certainty::Probable);
                }
                out.push((m, 1));
                continue;
            }
            let d = match m.to_u128().filter(|&v| v < MONT_LIMIT) {
                Some(v) => rho_u128(v).and_then(T::from_u128),
                None => brent_rho(&m),
            };
            let d = d.ok_or_else(|| FactorError::RhoExhausted(m.to_string()))?;
            let other = m.clone() / d.clone();
            stack.push(d);
            stack.push(other);
        }
    }
    Ok(FactoredNat::from_factors(out, certainty))
}

fn brent_rho<T: Natural>(n: &T) -> Option<T> {
    if n.is_even() {
        return Some(T::small(2));
    }
    for c in 1..=RHO_ATTEMPTS {
        let c = T::small(c);
        let f = |x: &T| (x.mul_mod(x, n) + c.clone()) % n.clone();
        let mut y = T::small(2);
        let mut r: u64 = 1;
        let mut q = T::one();
        let batch: u64 = 128;
        let mut g = T::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..batch.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { x.clone() - y.clone() } else { y.clone() - x.clone() };
                    q = q.mul_mod(&diff, n);
                }
                g = q.gcd(n);
                k += batch;
            }
            r *= 2;
            if r > (1u64 << 40) {
                break;
            }
        }
        if g == *n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { x.clone() - ys.clone() } else { ys.clone() - x.clone() };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() && g != *n {
            return Some(g);
        }
    }
    None
}

/// Odd moduli below this use Montgomery arithmetic in `u128`.
const MONT_LIMIT: u128 = 1 << 127;

/// Montgomery form modulo an odd `n < 2^127`, with `R = 2^128`.
struct Mont {
    n: u128,
    /// `−n⁻¹ mod R`.
    n_neg_inv: u128,
}

fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    let (a1, a0) = (a >> 64, a & u64::MAX as u128);
    let (b1, b0) = (b >> 64, b & u64::MAX as u128);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & u64::MAX as u128) + (p10 & u64::MAX as u128);
    let lo = (p00 & u64::MAX as u128) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

impl Mont {
    fn new(n: u128) -> Self {
        debug_assert!(n % 2 == 1 && n < MONT_LIMIT);
        let mut inv = n;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(n.wrapping_mul(inv)));
        }
        Mont { n, n_neg_inv: inv.wrapping_neg() }
    }

    fn mul(&self, a: u128, b: u128) -> u128 {
        let (hi, lo) = mul_wide(a, b);
        let m = lo.wrapping_mul(self.n_neg_inv);
        let (mh, _) = mul_wide(m, self.n);
        let r = hi + mh + (lo != 0) as u128;
        if r >= self.n {
            r - self.n
        } else {
            r
        }
    }

    fn add(&self, a: u128, b: u128) -> u128 {
        let r = a + b;
        if r >= self.n {
            r - self.n
        } else {
            r
        }
    }
}

/// [`brent_rho`] in Montgomery form.
fn rho_u128(n: u128) -> Option<u128> {
    if n % 2 == 0 {
        return Some(2);
    }
    let mt = Mont::new(n);
    let diff = |a: u128, b: u128| if a > b { a - b } else { b - a };
    for c in 1..=RHO_ATTEMPTS as u128 {
        let f = |x: u128| mt.add(mt.mul(x, x), c);
        let (mut x, mut y, mut ys) = (2u128, 2u128, 2u128);
        let mut q = 1u128;
        let mut g = 1u128;
        let mut r: u64 = 1;
        let batch: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..batch.min(r - k) {
                    y = f(y);
                    q = mt.mul(q, diff(x, y));
                }
                g = q.gcd(&n);
                k += batch;
            }
            r *= 2;
            if r > (1u64 << 40) {
                break;
            }
        }
        if g == n {
            loop {
                ys = f(ys);
                g = diff(x, ys).gcd(&n);
                if g != 1 {
                    break;
                }
            }
        }
        if g != 1 && g != n {
            return Some(g);
        }
    }
    None
}

/// Factors `q^n − 1` through its cyclotomic pieces `Φ_d(q)`, `d | n`, which
/// keeps every rho input far smaller than the full value.
pub fn factorize_qn_minus_1(q: u64, n: u32) -> FactoredNat<BigUint> {
    try_factorize_qn_minus_1(q, n).unwrap_or_else(|e| panic!("{e}"))
}

pub fn try_factorize_qn_minus_1(q: u64, n: u32) -> Result<FactoredNat<BigUint>, FactorError> {
    assert!(q >= 2 && n >= 1);
    let mut all: Vec<(BigUint, u32)> = Vec::new();
    let mut certainty = Certainty::Proved;
    for d in divisors(n as u64) {
        let value = cyclotomic_value(q, d as u32);
        let f = match value.to_u64() {
            Some(v) => try_factorize(v)?.to_big(),
            None => match value.to_u128() {
                Some(v) => try_factorize(v)?.to_big(),
                None => try_factorize(value)?,
            },
        };
        certainty = certainty.and(f.certainty());
        all.extend(f.factors().iter().cloned());
    }
    Ok(FactoredNat::from_factors(all, certainty))
}

/// `Φ_d(q) = ∏_{e | d} (q^e − 1)^{μ(d/e)}`.
pub fn cyclotomic_value(q: u64, d: u32) -> BigUint {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for e in divisors(d as u64) {
        let term = super::big_pow(q, e as u32) - 1u32;
        match mobius(d as u64 / e) {
            1 => num *= term,
            -1 => den *= term,
            _ => {}
        }
    }
    debug_assert!((&num % &den).is_zero());
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            if k > 0 {
                out.push((p, k));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn small_examples() {
        assert_eq!(factorize(48u64).factors(), &[(2, 4), (3, 1)]);
        assert!(factorize(1u64).factors().is_empty());
        let f = factorize(43046720u64);
        assert_eq!(f.factors(), trial_division(43046720).as_slice());
        assert_eq!(f.factors(), &[(2, 6), (5, 1), (17, 1), (41, 1), (193, 1)]);
        assert_eq!(f.euler_phi(), 15728640);
        assert_eq!(factorize(48u64).euler_phi(), 16);
        assert_eq!(factorize(1u64).euler_phi(), 1);
    }

    #[test]
    fn squarefree_divisor_counts() {
        assert_eq!(factorize(1u64).num_squarefree_divisors(), 1);
        assert_eq!(factorize(48u64).num_squarefree_divisors(), 4);
        // 3191^2 - 1 = 3190 * 3192 = 2^4 * 3 * 5 * 7 * 11 * 19 * 29.
        let f = factorize(3191u64 * 3191 - 1);
        assert_eq!(f.factors(), trial_division(3191 * 3191 - 1).as_slice());
        assert_eq!(f.num_squarefree_divisors(), 128);
    }

    #[test]
    fn radical_drops_exponents() {
        assert_eq!(*factorize(48u64).radical().value(), 6);
        assert_eq!(*factorize(1u64).radical().value(), 1);
        assert_eq!(*factorize(43046720u64).radical().value(), 2 * 5 * 17 * 41 * 193);
    }

    #[test]
    fn montgomery_matches_plain() {
        for n in [3u128, 1_000_003, (1u128 << 100) + 277, MONT_LIMIT - 1] {
            let mt = Mont::new(n);
            let r = (BigUint::one() << 128u32) % BigUint::from(n);
            let to = |a: u128| (BigUint::from(a) * &r % BigUint::from(n)).to_u128().unwrap();
            for (a, b) in [(1u128, 1u128), (n - 1, n - 1), (n / 3, n / 7 + 5)] {
                let want = (BigUint::from(a) * BigUint::from(b) % BigUint::from(n)).to_u128().unwrap();
                assert_eq!(mt.mul(to(a), to(b)), to(want));
            }
        }
    }

    #[test]
    fn montgomery_rho_splits() {
        let p = 1_000_000_000_039u128;
        let q = 1_000_000_000_000_000_003u128;
        let d = rho_u128(p * q).unwrap();
        assert!(d == p || d == q);
    }

    #[test]
    fn rho_splits_large_semiprimes() {
        let p = 1_000_000_007u64;
        let q = 998_244_353u64;
        let f = factorize(p * q);
        assert_eq!(f.factors(), &[(q, 1), (p, 1)]);
        let big = BigUint::from(p) * BigUint::from(q) * BigUint::from(1_000_000_009u64);
        let f = factorize(big);
        assert_eq!(f.omega(), 3);
        assert_eq!(f.certainty(), Certainty::Proved);
    }

    #[test]
    fn cyclotomic_route_matches_direct() {
        for (q, n) in [(3u64, 16u32), (97, 8), (2, 36), (13, 12), (4096, 3)] {
            let alg = factorize_qn_minus_1(q, n);
            let direct = factorize(super::super::big_pow(q, n) - 1u32);
            assert_eq!(alg, direct, "q={q} n={n}");
        }
        assert_eq!(cyclotomic_value(3, 4), BigUint::from(10u32));
    }
}
