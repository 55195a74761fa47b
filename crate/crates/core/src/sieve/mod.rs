//! Sufficient conditions for `(q, n) ∈ N_m`: the basic character-sum bound,
//! its sieved refinement, the `n = 2` variant, and the threshold and cascade
//! arithmetic built on top of them.

mod asymptotic;
mod cascade;
mod even;
mod lemmas;

pub use asymptotic::{asymptotic_threshold, AsymptoticCheck, AsymptoticReport};
pub use cascade::{
    cascade_step_at,
    cascade_step, schedule, schedule_names, CascadeConfig, CascadeResult, CascadeRow, Shape,
    Triple, UBound,
};
pub use even::{
    distinct_factors_pow2, even_q_bound_t, even_q_bound_t_pow2, even_q_grid, method_one, method_one_pow2, method_two,
    method_two_pow2, w_bound_log2, EvenBoundT, EvenGridLimits, TReading,
};
pub use lemmas::{cascade_thresholds, lemma_constants, lemma_thresholds, ConstantCheck, ThresholdCheck};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{
    big_pow, from_biguint, primorial, try_factorize_qn_minus_1,
    BoundError, FactorError,
};
use crate::polyfact::degree_profile;

/// Upper limit on `ω(q^n − 1)` for the exhaustive subset search.
pub const MAX_EXHAUSTIVE_OMEGA: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SieveError {
    #[error("sieving slack δ is not positive")]
    DeltaUndefined,
    #[error("ω = {0} exceeds the exhaustive search cap of {MAX_EXHAUSTIVE_OMEGA}")]
    TooManyPrimes(usize),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error("invalid parameters: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Basic,
    Sieve,
    N2Special,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Basic => "basic",
            Method::Sieve => "sieve",
            Method::N2Special => "n2_special",
        }
    }
}

/// Split of the prime factors of `q^n − 1` and of the irreducible factors of
/// `xⁿ − 1` into a retained and an excluded part, with the resulting slack.
///
/// Polynomial factors are recorded by degree: the conditions only see `q^{deg}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveParams {
    pub m: u32,
    pub retained_primes: Vec<BigUint>,
    pub excluded_primes: Vec<BigUint>,
    pub retained_factors: Vec<u64>,
    pub excluded_factors: Vec<u64>,
    pub delta: BigRational,
    pub big_delta: BigRational,
}

impl SieveParams {
    pub fn r(&self) -> usize {
        self.excluded_primes.len()
    }

    pub fn s(&self) -> usize {
        self.excluded_factors.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub q: u64,
    pub n: u32,
    pub m: u32,
    pub method: Method,
    pub params: Option<SieveParams>,
    pub lhs_sq: BigUint,
    pub rhs_sq: BigRational,
    pub passed: bool,
}

fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

fn pow2(k: usize) -> BigUint {
    BigUint::one() << k
}

/// `q^n ≥ (m·W_g·W_e^m)²`.
pub fn basic_condition(q: u64, n: u32, m: u32, w_g: &BigUint, w_e: &BigUint) -> Certificate {
    let lhs = big_pow(q, n);
    let rhs = BigUint::from(m) * w_g * w_e.pow(m);
    let rhs_sq = &rhs * &rhs;
    Certificate {
        q,
        n,
        m,
        method: Method::Basic,
        params: None,
        passed: lhs >= rhs_sq,
        lhs_sq: lhs,
        rhs_sq: from_biguint(&rhs_sq),
    }
}

/// `δ = 1 − m Σ 1/p_i − Σ 1/q^{deg h_i}` and `Δ = 2 + (mr + s − 1)/δ`.
pub fn sieve_params(
    q: u64,
    m: u32,
    retained_primes: Vec<BigUint>,
    excluded_primes: Vec<BigUint>,
    retained_factors: Vec<u64>,
    excluded_factors: Vec<u64>,
) -> Result<SieveParams, SieveError> {
    let delta = slack(q, m, &excluded_primes, &excluded_factors);
    if !delta.is_positive() {
        return Err(SieveError::DeltaUndefined);
    }
    let r = excluded_primes.len() as i64;
    let s = excluded_factors.len() as i64;
    let big_delta = int(2) + int(m as i64 * r + s - 1) / &delta;
    Ok(SieveParams {
        m,
        retained_primes,
        excluded_primes,
        retained_factors,
        excluded_factors,
        delta,
        big_delta,
    })
}

fn slack(q: u64, m: u32, primes: &[BigUint], degrees: &[u64]) -> BigRational {
    let mut delta = BigRational::one();
    for p in primes {
        delta -= BigRational::new(BigInt::from(m), BigInt::from(p.clone()));
    }
    for &d in degrees {
        delta -= BigRational::new(BigInt::one(), BigInt::from(big_pow(q, d as u32)));
    }
    delta
}

/// `q^n ≥ (m·Δ·W(g)·W(e)^m)²` with `g`, `e` the retained parts.
pub fn sieve_condition(q: u64, n: u32, m: u32, params: &SieveParams) -> Certificate {
    let w = pow2(params.retained_factors.len() + m as usize * params.retained_primes.len());
    let rhs = int(m) * &params.big_delta * from_biguint(&w);
    let rhs_sq = &rhs * &rhs;
    let lhs = big_pow(q, n);
    let method = if params.r() == 0 && params.s() == 0 { Method::Basic } else { Method::Sieve };
    Certificate {
        q,
        n,
        m,
        method,
        params: Some(params.clone()),
        passed: from_biguint(&lhs) >= rhs_sq,
        lhs_sq: lhs,
        rhs_sq,
    }
}

/// `n = 2` conditions with no polynomial part.
///
/// Without `params`: `q ≥ (m−1)·W_e^m`. With `params`:
/// `q > (m−1)·((mr−1)/δ + 2)·W_e^m`, where `W_e` counts the retained primes.
pub fn n2_special_condition(
    q: u64,
    m: u32,
    w_e: &BigUint,
    params: Option<&SieveParams>,
) -> Result<Certificate, SieveError> {
    let qr = int(q);
    let (rhs, passed) = match params {
        None => {
            let rhs = int(m as i64 - 1) * from_biguint(&w_e.pow(m));
            let passed = qr >= rhs;
            (rhs, passed)
        }
        Some(p) => {
            if !p.delta.is_positive() {
                return Err(SieveError::DeltaUndefined);
            }
            let core = int(m as i64 * p.r() as i64 - 1) / &p.delta + int(2);
            let rhs = int(m as i64 - 1) * core * from_biguint(&w_e.pow(m));
            let passed = qr > rhs;
            (rhs, passed)
        }
    };
    Ok(Certificate {
        q,
        n: 2,
        m,
        method: Method::N2Special,
        params: params.cloned(),
        lhs_sq: BigUint::from(q) * q,
        rhs_sq: &rhs * &rhs,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertifyOptions {
    /// Also try the `n = 2` conditions when `n = 2`.
    pub n2_special: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { n2_special: true }
    }
}

/// Searches for a passing certificate for `(q, n) ∈ N_m`.
///
/// Candidates drop the `r` largest primes of `q^n − 1` and the `s`
/// largest-degree factors of `xⁿ − 1`, `r` outer and `s` inner, both
/// ascending. For a fixed `(r, s)` this choice maximises `δ` while `W`
/// depends only on the counts, so no other subset can pass when these fail.
pub fn certify(q: u64, n: u32, m: u32) -> Result<Option<Certificate>, SieveError> {
    certify_with(q, n, m, CertifyOptions::default())
}

pub fn certify_with(
    q: u64,
    n: u32,
    m: u32,
    opts: CertifyOptions,
) -> Result<Option<Certificate>, SieveError> {
    check_args(q, n, m)?;
    let primes = try_factorize_qn_minus_1(q, n)?.primes();
    let degrees = degree_profile(q, n as u64).degrees();
    let (w, big_s) = (primes.len(), degrees.len());
    for r in 0..=w {
        for s in 0..=big_s {
            let params = match sieve_params(
                q,
                m,
                primes[..w - r].to_vec(),
                primes[w - r..].to_vec(),
                degrees[..big_s - s].to_vec(),
                degrees[big_s - s..].to_vec(),
            ) {
                Ok(p) => p,
                Err(SieveError::DeltaUndefined) => continue,
                Err(e) => return Err(e),
            };
            let cert = sieve_condition(q, n, m, &params);
            if cert.passed {
                return Ok(Some(cert));
            }
        }
    }
    if n == 2 && opts.n2_special {
        return certify_n2_special(q, m);
    }
    Ok(None)
}

/// Every subset of the primes of `q^n − 1` (largest dropped first) against
/// every count of dropped factors per degree. Exponential; an oracle for
/// the pruned search.
pub fn certify_exhaustive(q: u64, n: u32, m: u32) -> Result<Option<Certificate>, SieveError> {
    check_args(q, n, m)?;
    let primes = try_factorize_qn_minus_1(q, n)?.primes();
    let w = primes.len();
    if w > MAX_EXHAUSTIVE_OMEGA {
        return Err(SieveError::TooManyPrimes(w));
    }
    let profile = degree_profile(q, n as u64);
    let mut masks: Vec<u32> = (0..1u32 << w).collect();
    // Bit i set means prime i (ascending) is excluded; larger primes first.
    masks.sort_by_key(|&mask| (mask.count_ones(), (0..w).rev().map(|i| mask >> i & 1 == 0).collect::<Vec<_>>()));
    let mut drops = vec![vec![]];
    for &(d, c) in &profile.counts {
        drops = drops
            .into_iter()
            .flat_map(|prefix: Vec<(u64, u64)>| {
                (0..=c).map(move |k| {
                    let mut v = prefix.clone();
                    v.push((d, k));
                    v
                })
            })
            .collect();
    }
    for &mask in &masks {
        let (mut kept, mut dropped) = (vec![], vec![]);
        for (i, p) in primes.iter().enumerate() {
            if mask >> i & 1 == 1 { dropped.push(p.clone()) } else { kept.push(p.clone()) }
        }
        for choice in &drops {
            let (mut keep_f, mut drop_f) = (vec![], vec![]);
            for (&(d, c), &(_, k)) in profile.counts.iter().zip(choice) {
                keep_f.extend(std::iter::repeat_n(d, (c - k) as usize));
                drop_f.extend(std::iter::repeat_n(d, k as usize));
            }
            let params = match sieve_params(q, m, kept.clone(), dropped.clone(), keep_f, drop_f) {
                Ok(p) => p,
                Err(SieveError::DeltaUndefined) => continue,
                Err(e) => return Err(e),
            };
            let cert = sieve_condition(q, n, m, &params);
            if cert.passed {
                return Ok(Some(cert));
            }
        }
    }
    Ok(None)
}

/// The `n = 2` search: the basic form with every prime retained, then the
/// sieved form dropping the `r` largest primes for `r = 0, 1, …` while `δ > 0`.
pub fn certify_n2_special(q: u64, m: u32) -> Result<Option<Certificate>, SieveError> {
    check_args(q, 2, m)?;
    let primes = try_factorize_qn_minus_1(q, 2)?.primes();
    let w = primes.len();
    let basic = n2_special_condition(q, m, &pow2(w), None)?;
    if basic.passed {
        return Ok(Some(basic));
    }
    for r in 0..=w {
        let params = match sieve_params(q, m, primes[..w - r].to_vec(), primes[w - r..].to_vec(), vec![], vec![]) {
            Ok(p) => p,
            Err(SieveError::DeltaUndefined) => break,
            Err(e) => return Err(e),
        };
        let cert = n2_special_condition(q, m, &pow2(w - r), Some(&params))?;
        if cert.passed {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

fn check_args(q: u64, n: u32, m: u32) -> Result<(), SieveError> {
    if m < 2 || n < 2 {
        return Err(SieveError::Invalid(format!("need m ≥ 2 and n ≥ 2, got m={m}, n={n}")));
    }
    if !crate::arith::is_prime_power(q) {
        return Err(SieveError::Invalid(format!("{q} is not a prime power")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WBoundReport {
    pub r: usize,
    pub threshold: String,
    pub t: String,
    pub primorial_digits: usize,
    pub below_threshold: bool,
    pub exponent_ok: bool,
    pub passed: bool,
}

/// `P_r < threshold` and `r log 2 / log P_r < t`, the latter as
/// `2^{r·den} < P_r^{num}` for `t = num/den`.
pub fn w_bound_check(r: usize, threshold: &BigRational, t: &BigRational) -> WBoundReport {
    assert!(r >= 1 && t.is_positive());
    let p = primorial(r);
    let below_threshold = from_biguint(&p) < *threshold;
    let num = t.numer().to_biguint().expect("positive");
    let den = t.denom().to_biguint().expect("positive");
    let lhs = BigUint::one() << (r * usize::try_from(&den).expect("small denominator"));
    let exponent_ok = lhs < p.pow(u32::try_from(&num).expect("small numerator"));
    WBoundReport {
        r,
        threshold: crate::arith::format_sci(threshold, 6),
        t: t.to_string(),
        primorial_digits: p.to_string().len(),
        below_threshold,
        exponent_ok,
        passed: below_threshold && exponent_ok,
    }
}
