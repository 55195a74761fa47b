//! The inequality chains behind the asymptotic thresholds for `m = 2, 3, 4`
//! and the constants `c(m)`, `q_0(m)` for `m ≥ 5`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use super::SieveError;
use crate::arith::{decide, decimal, primes_in_class, ratio, BoundError, BoundValue, PrimeForm};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AsymptoticCheck {
    pub label: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AsymptoticReport {
    pub m: u32,
    pub threshold: Option<String>,
    pub checks: Vec<AsymptoticCheck>,
    /// `c(m) = 2^{4(m+1)}` for `m ≥ 5`.
    pub c_m: Option<String>,
    /// Least `r` with `2^{2r(m+1)} ≤ P_r`, so `q_0(m) = P_r`.
    pub r: Option<usize>,
    pub passed: bool,
}

fn bv(r: BigRational, prec: u32) -> BoundValue {
    BoundValue::exact(r).with_precision(prec)
}

/// `X^{1 − k·log_c 2 / a} ≥ 2^{e2}·3^{e3}`, with the exponent checked positive.
fn chain(x: &BigRational, k: &BigRational, a: &BigRational, c: u64, e2: &BigRational, e3: u32) -> Result<bool, BoundError> {
    decide(|prec| {
        let ln2 = bv(ratio(2, 1), prec).ln().ok()?;
        let lnc = bv(ratio(c as i64, 1), prec).ln().ok()?;
        let expo = bv(ratio(1, 1), prec).sub(&ln2.scale(&(k / a)).div(&lnc).ok()?);
        if !expo.lo().is_positive() {
            return if expo.hi().is_positive() { None } else { Some(false) };
        }
        let lhs = expo.mul(&bv(x.clone(), prec).ln().ok()?);
        let ln3 = bv(ratio(3, 1), prec).ln().ok()?;
        let rhs = ln2.scale(e2).add(&ln3.scale(&ratio(e3 as i64, 1)));
        lhs.try_ge(&rhs)
    })
}

/// `ln X / ln c > bound`.
fn log_quotient_exceeds(x: &BigRational, c: u64, bound: i64) -> Result<bool, BoundError> {
    decide(|prec| {
        let v = bv(x.clone(), prec).ln().ok()?.div(&bv(ratio(c as i64, 1), prec).ln().ok()?).ok()?;
        v.try_gt(&BoundValue::from_int(bound))
    })
}

struct Inst {
    c: u64,
    a: BigRational,
    b: BigRational,
}

fn inst(c: u64, a: BigRational, b: BigRational) -> Inst {
    Inst { c, a, b }
}

pub fn asymptotic_threshold(m: u32) -> Result<AsymptoticReport, SieveError> {
    if m < 2 {
        return Err(SieveError::Invalid("m must be at least 2".into()));
    }
    if m >= 5 {
        return Ok(large_m(m));
    }
    let (x_lit, k, insts, e2_of, e3): (&str, BigRational, Vec<Inst>, Box<dyn Fn(&BigRational) -> BigRational>, u32) =
        match m {
            2 => {
                let mut v = vec![inst(17, ratio(1, 1), ratio(0, 1))];
                v.extend([5, 7, 8, 9, 11, 13, 16].map(|q| inst(q, ratio(2, 1), ratio(q as i64 - 1, 2))));
                v.push(inst(2, ratio(5, 1), ratio(14, 5)));
                v.push(inst(3, ratio(3, 1), ratio(14, 6)));
                v.push(inst(4, ratio(3, 1), ratio(4, 1)));
                ("7.51e358", ratio(4, 1), v, Box::new(|b| b * ratio(4, 1) + ratio(4, 1)), 0)
            }
            3 => {
                let v = vec![
                    inst(37, ratio(1, 1), ratio(0, 1)),
                    inst(7, ratio(60, 31), ratio(0, 1)),
                    inst(5, ratio(3, 1), ratio(6, 1)),
                    inst(3, ratio(4, 1), ratio(5, 1)),
                ];
                ("1.39e1424", ratio(5, 1), v, Box::new(|b| b * ratio(5, 1)), 5)
            }
            _ => {
                let mut v = vec![
                    inst(163, ratio(1, 1), ratio(0, 1)),
                    inst(19, ratio(16, 9), ratio(0, 1)),
                    inst(17, ratio(2, 1), ratio(8, 1)),
                ];
                v.extend([7, 9, 11, 13].map(|q: i64| inst(q as u64, ratio(3, 1), ratio(q * q + 3 * q - 4, 6))));
                v.push(inst(5, ratio(4, 1), ratio(18, 1)));
                v.push(inst(3, ratio(5, 1), ratio(51, 5)));
                ("3.31e2821", ratio(22, 3), v, Box::new(|b| (b + ratio(2, 1)) * ratio(22, 3)), 0)
            }
        };
    let x = decimal(x_lit);
    let mut checks = Vec::new();
    for i in &insts {
        let passed = chain(&x, &k, &i.a, i.c, &e2_of(&i.b), e3)?;
        checks.push(AsymptoticCheck { label: format!("c={} a={} b={}", i.c, i.a, i.b), passed });
    }
    let side = |label: String, passed: bool| AsymptoticCheck { label, passed };
    match m {
        3 => {
            checks.push(side("ln X / ln 31 > 954".into(), log_quotient_exceeds(&x, 31, 954)?));
            checks.push(side("30/954 < 1/30".into(), ratio(30, 954) < ratio(1, 30)));
        }
        4 => {
            checks.push(side("ln X / ln 157 > 1284".into(), log_quotient_exceeds(&x, 157, 1284)?));
            checks.push(side("156/1285 < 1/8".into(), ratio(156, 1285) < ratio(1, 8)));
        }
        _ => {}
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(AsymptoticReport { m, threshold: Some(x_lit.into()), checks, c_m: None, r: None, passed })
}

fn large_m(m: u32) -> AsymptoticReport {
    let c_m = BigUint::one() << (4 * (m as usize + 1));
    let per = 2 * (m as usize + 1);
    let r = least_r(per);
    AsymptoticReport {
        m,
        threshold: None,
        checks: vec![],
        c_m: Some(c_m.to_string()),
        r,
        passed: r.is_some(),
    }
}

const MAX_R: usize = 1 << 22;

/// Least `r` with `P_r ≥ 2^{per·r}`: located with floating logs, then
/// settled exactly.
fn least_r(per: usize) -> Option<usize> {
    let mut primes = Vec::new();
    let mut log_sum = 0f64;
    for p in primes_in_class(2, PrimeForm::ANY) {
        primes.push(p);
        log_sum += (p as f64).log2();
        if log_sum > (per * primes.len()) as f64 - 64.0 {
            break;
        }
        if primes.len() >= MAX_R {
            return None;
        }
    }
    let holds = |prod: &BigUint, r: usize| prod.bits() as usize > per * r;
    let mut r = primes.len();
    let mut prod = product(&primes[..r]);
    let mut more = primes_in_class(primes[r - 1] + 1, PrimeForm::ANY);
    while !holds(&prod, r) {
        let p = more.next().expect("infinitely many primes");
        primes.push(p);
        prod *= p;
        r += 1;
    }
    while r > 1 {
        let prev = &prod / primes[r - 1];
        if !holds(&prev, r - 1) {
            break;
        }
        prod = prev;
        r -= 1;
    }
    Some(r)
}

fn product(ps: &[u64]) -> BigUint {
    match ps.len() {
        0 => BigUint::one(),
        1 => BigUint::from(ps[0]),
        n => product(&ps[..n / 2]) * product(&ps[n / 2..]),
    }
}
