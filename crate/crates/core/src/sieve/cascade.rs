//! Iterated sieving bounds: each step bounds `q^n` (or `q`) from a previous
//! bound `M` by maximising the sieve condition over the number `u` of small
//! primes kept in `e`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::SieveError;
use crate::arith::{
    configured_precision, decimal, format_sci, max_class_count, prime_class, prime_power_decompose,
    primes_below, primorial, ratio, BoundValue, PrimeForm,
};

/// `(a, b, c)` with `#factors(xⁿ − 1) ≤ n/a + b` for all `q ≥ c` in the
/// family the triple stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub a: BigRational,
    pub b: BigRational,
    pub c: u64,
    /// Covers every `q ≥ c` rather than the single field size `c`.
    pub generic: bool,
}

impl Triple {
    pub fn generic(c: u64) -> Self {
        Triple { a: ratio(1, 1), b: ratio(0, 1), c, generic: true }
    }

    pub fn specific(a: BigRational, b: BigRational, c: u64) -> Self {
        Triple { a, b, c, generic: false }
    }

    /// `(2, (q−1)/2, q)`.
    pub fn quadratic(q: u64) -> Self {
        Triple::specific(ratio(2, 1), ratio(q as i64 - 1, 2), q)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UBound {
    /// The same range for every triple.
    Fixed(u32),
    /// `π(p̃ − 1)`, less one for a specific `q` whose characteristic is
    /// below `p̃` and so never divides `q^n − 1`.
    PrimesBelow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    /// `(coef·Δ·2^{mu+b})^{2a/(a − log_c 4)}`.
    FactorCount,
    /// `(coef·Δ·2^{mu})^{e}`.
    Power(BigRational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeConfig {
    pub m: u32,
    pub tilde_p: u64,
    /// `M` in `r(u) = max{r | multiplier·P_u·P(p̃, r) ≤ M}`.
    pub bound: BigRational,
    pub multiplier: u64,
    pub form: PrimeForm,
    /// Subtracted from `δ(p̃, r)`.
    pub delta_offset: BigRational,
    /// Added to `mr − 1` in the numerator of `Δ`.
    pub extra_s: i64,
    pub coef: BigRational,
    pub triples: Vec<Triple>,
    pub u_min: u32,
    pub u_max: UBound,
    pub shape: Shape,
}

impl CascadeConfig {
    /// The standard `m = 3` step with coefficient 3 and no adjustments.
    pub fn standard(tilde_p: u64, bound: BigRational, triples: Vec<Triple>) -> Self {
        CascadeConfig {
            m: 3,
            tilde_p,
            bound,
            multiplier: 1,
            form: PrimeForm::ANY,
            delta_offset: BigRational::zero(),
            extra_s: 0,
            coef: ratio(3, 1),
            triples,
            u_min: 0,
            u_max: UBound::PrimesBelow,
            shape: Shape::FactorCount,
        }
    }

    fn u_range(&self, t: &Triple) -> (u32, u32) {
        let hi = match self.u_max {
            UBound::Fixed(u) => u,
            UBound::PrimesBelow => {
                let pi = primes_below(self.tilde_p).len() as u32;
                let p = prime_power_decompose(t.c).map(|(p, _)| p).unwrap_or(t.c);
                if !t.generic && p < self.tilde_p { pi - 1 } else { pi }
            }
        };
        (self.u_min, hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeResult {
    pub value: BoundValue,
    /// Index into the triples, `u`, and `r(u)` of the largest term.
    pub argmax: (usize, u32, usize),
}

/// Maximum of the step expression over the triples and `u`, as an interval
/// enclosing the true maximum.
pub fn cascade_step(cfg: &CascadeConfig) -> Result<CascadeResult, SieveError> {
    cascade_step_at(cfg, configured_precision())
}

pub fn cascade_step_at(cfg: &CascadeConfig, prec: u32) -> Result<CascadeResult, SieveError> {
    let m = cfg.m as i64;
    let mut deltas: BTreeMap<u32, (usize, BigRational)> = BTreeMap::new();
    let mut best: Option<(BoundValue, (usize, u32, usize))> = None;
    let mut lo_max: Option<BigRational> = None;
    let two = BoundValue::from_int(2).with_precision(prec);
    let four = BoundValue::from_int(4).with_precision(prec);
    for (ti, t) in cfg.triples.iter().enumerate() {
        let exponent = match &cfg.shape {
            Shape::FactorCount => {
                let a = BoundValue::exact(t.a.clone()).with_precision(prec);
                let c = BoundValue::from_int(t.c as i64).with_precision(prec);
                let denom = a.sub(&four.log(&c)?);
                if !denom.lo().is_positive() {
                    return Err(SieveError::Invalid(format!("a ≤ log_c 4 for c = {}", t.c)));
                }
                a.scale(&ratio(2, 1)).div(&denom)?
            }
            Shape::Power(e) => BoundValue::exact(e.clone()).with_precision(prec),
        };
        let two_b = match &cfg.shape {
            Shape::FactorCount => two.pow(&BoundValue::exact(t.b.clone()).with_precision(prec))?,
            Shape::Power(_) => BoundValue::from_int(1).with_precision(prec),
        };
        let (u0, u1) = cfg.u_range(t);
        for u in u0..=u1 {
            let (r, big_delta) = match deltas.get(&u) {
                Some(v) => v.clone(),
                None => {
                    let v = step_delta(cfg, u, m)?;
                    deltas.insert(u, v.clone());
                    v
                }
            };
            let base = &cfg.coef * big_delta * BigRational::from_integer(BigInt::from(BigUint::one() << (cfg.m * u) as usize));
            let base = BoundValue::exact(base).with_precision(prec).mul(&two_b);
            let value = match &cfg.shape {
                Shape::Power(e) if e.is_one() => base,
                _ => base.pow(&exponent)?,
            };
            lo_max = Some(match lo_max {
                Some(l) if &l >= value.lo() => l,
                _ => value.lo().clone(),
            });
            let replace = match &best {
                None => true,
                Some((b, _)) => value.hi() > b.hi(),
            };
            if replace {
                best = Some((value, (ti, u, r)));
            }
        }
    }
    let (value, argmax) = best.ok_or_else(|| SieveError::Invalid("empty cascade step".into()))?;
    let lo = lo_max.expect("non-empty");
    let value = BoundValue::interval(lo, value.hi().clone(), prec);
    Ok(CascadeResult { value, argmax })
}

/// `r(u)` and `Δ(p̃, r(u))`.
fn step_delta(cfg: &CascadeConfig, u: u32, m: i64) -> Result<(usize, BigRational), SieveError> {
    let base = primorial(u as usize) * cfg.multiplier;
    let r = max_class_count(cfg.tilde_p, cfg.form, &base, &cfg.bound);
    let (_, sum) = prime_class(cfg.tilde_p, cfg.form, r);
    let delta = BigRational::one() - BigRational::from_integer(BigInt::from(m)) * sum - &cfg.delta_offset;
    if !delta.is_positive() {
        return Err(SieveError::DeltaUndefined);
    }
    let num = BigRational::from_integer(BigInt::from(m * r as i64 + cfg.extra_s - 1));
    Ok((r, BigRational::from_integer(BigInt::from(2)) + num / delta))
}

/// A step together with the value printed for it.
#[derive(Debug, Clone)]
pub struct CascadeRow {
    pub label: &'static str,
    pub config: CascadeConfig,
    /// `p̃` as printed, which can differ from the one that reproduces the value.
    pub printed_tilde_p: u64,
    pub printed: &'static str,
}

impl CascadeRow {
    pub fn printed_value(&self) -> BigRational {
        decimal(self.printed)
    }

    /// The printed value minus one unit in its last printed digit.
    pub fn printed_floor(&self) -> BigRational {
        let v = self.printed_value();
        v - unit_in_last_place(self.printed)
    }

    /// `printed − ulp ≤ lo` and `hi < printed`.
    pub fn matches(&self, value: &BoundValue) -> bool {
        value.hi() < &self.printed_value() && value.lo() >= &self.printed_floor()
    }

    pub fn bound_display(&self) -> String {
        format_sci(&self.config.bound, 6)
    }
}

fn unit_in_last_place(lit: &str) -> BigRational {
    let (mant, exp) = match lit.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().expect("exponent")),
        None => (lit, 0),
    };
    let frac_digits = mant.split_once('.').map(|(_, f)| f.len() as i64).unwrap_or(0);
    let e = exp - frac_digits;
    let ten = BigInt::from(10);
    if e >= 0 {
        BigRational::from_integer(num_traits::pow(ten, e as usize))
    } else {
        BigRational::new(BigInt::one(), num_traits::pow(ten, (-e) as usize))
    }
}

fn set_a() -> Vec<Triple> {
    let mut v = vec![
        Triple::generic(37),
        Triple::specific(ratio(3, 1), ratio(6, 1), 5),
        Triple::specific(ratio(4, 1), ratio(5, 1), 3),
    ];
    v.extend([7, 9, 11, 13, 17, 19, 23, 25, 27, 29, 31].into_iter().map(Triple::quadratic));
    v
}

fn set_a_tilde() -> Vec<Triple> {
    let mut v = vec![
        Triple::generic(37),
        Triple::specific(ratio(1, 1), ratio(0, 1), 31),
        Triple::specific(ratio(3, 1), ratio(6, 1), 5),
        Triple::specific(ratio(4, 1), ratio(5, 1), 3),
    ];
    v.extend([7, 9, 11, 13, 17, 19, 23, 25, 27, 29].into_iter().map(Triple::quadratic));
    v
}

fn row(label: &'static str, config: CascadeConfig, printed_tilde_p: u64, printed: &'static str) -> CascadeRow {
    CascadeRow { label, config, printed_tilde_p, printed }
}

fn lemma_step(
    tilde_p: u64,
    bound: &str,
    multiplier: u64,
    offset: BigRational,
    extra_s: i64,
    coef: i64,
    u: (u32, u32),
    exponent: BigRational,
) -> CascadeConfig {
    CascadeConfig {
        m: 3,
        tilde_p,
        bound: decimal(bound),
        multiplier,
        form: PrimeForm::ANY,
        delta_offset: offset,
        extra_s,
        coef: ratio(coef, 1),
        triples: vec![Triple::generic(tilde_p)],
        u_min: u.0,
        u_max: UBound::Fixed(u.1),
        shape: Shape::Power(exponent),
    }
}

pub fn schedule_names() -> &'static [&'static str] {
    &["default", "table1", "table2", "bound", "lemmas", "all"]
}

/// Named lists of cascade rows. `default` is the two printed tables for
/// `m = 3`; `bound` the three steps from the asymptotic bound down to
/// the first table row; `lemmas` the per-`n` cascades.
pub fn schedule(name: &str) -> Option<Vec<CascadeRow>> {
    let std = |p: u64, m: &str, set: Vec<Triple>| CascadeConfig::standard(p, decimal(m), set);
    let table1 = || {
        vec![
            row("table1", std(41, "7.871e54", set_a_tilde()), 41, "1.368e45"),
            row("table1", std(37, "1.368e45", set_a_tilde()), 37, "7.379e41"),
            row("table1", std(31, "7.379e41", set_a_tilde()), 31, "3.422e40"),
        ]
    };
    let table2 = || {
        vec![
            row("table2", std(31, "3.422e40", vec![Triple::generic(37)]), 37, "1.71e39"),
            row("table2", std(31, "1.71e39", vec![Triple::generic(37)]), 31, "7.391e38"),
        ]
    };
    let bound = || {
        vec![
            row("bound", std(353, "1.39e1424", set_a()), 353, "2.129e221"),
            row("bound", std(101, "2.129e221", set_a()), 101, "7.525e85"),
            row("bound", std(53, "7.525e85", set_a()), 53, "7.871e54"),
        ]
    };
    let lemmas = || {
        let e5 = |k: i64| BigRational::new(BigInt::from(k), BigInt::from(100_000));
        vec![
            row("n4", lemma_step(29, "5.729e31", 8, e5(4), 4, 3, (0, 9), ratio(1, 2)), 29, "300350"),
            row("n3", lemma_step(23, "1.219e22", 1, e5(3), 3, 3, (0, 8), ratio(2, 3)), 23, "3.0884e6"),
            row("n3", lemma_step(19, "2.946e19", 1, e5(3), 3, 3, (0, 7), ratio(2, 3)), 19, "821257"),
            row("n2", lemma_step(29, "2.53825e33", 4, ratio(0, 1), 0, 2, (1, 9), ratio(1, 1)), 29, "7.245e10"),
            row("n2", lemma_step(19, "6.5613e20", 4, ratio(0, 1), 0, 2, (1, 7), ratio(1, 1)), 19, "6.615e8"),
            row("n2", lemma_step(19, N2_THIRD_BOUND, 4, ratio(0, 1), 0, 2, (1, 7), ratio(1, 1)), 19, "3.0024e8"),
        ]
    };
    Some(match name {
        "default" => [table1(), table2()].concat(),
        "table1" => table1(),
        "table2" => table2(),
        "bound" => bound(),
        "lemmas" => lemmas(),
        "all" => [bound(), table1(), table2(), lemmas()].concat(),
        _ => return None,
    })
}

/// `(6.615·10⁸)² / 8`, the bound on `(q² − 1)/8` for the last `n = 2` step.
const N2_THIRD_BOUND: &str = "5.46984e16";

#[cfg(test)]
mod tests {
    use super::*;

    fn check(rows: Vec<CascadeRow>) {
        for row in rows {
            let res = cascade_step(&row.config).unwrap();
            assert!(
                row.matches(&res.value),
                "{} p̃={} M={}: got {:?}, printed {}",
                row.label,
                row.config.tilde_p,
                row.bound_display(),
                res.value,
                row.printed
            );
        }
    }

    #[test]
    fn printed_tables() {
        check(schedule("default").unwrap());
    }

    #[test]
    fn descent_from_asymptotic_bound() {
        check(schedule("bound").unwrap());
    }

    #[test]
    fn lemma_cascades() {
        check(schedule("lemmas").unwrap());
    }

    #[test]
    fn single_term() {
        let mut cfg = CascadeConfig::standard(41, decimal("7.871e54"), vec![Triple::generic(37)]);
        cfg.u_max = UBound::Fixed(0);
        let res = cascade_step(&cfg).unwrap();
        assert_eq!(res.argmax.1, 0);
        assert!(res.value.width() < res.value.lo() / BigRational::from_integer(BigInt::from(1000)));
    }

    #[test]
    fn ulp_of_literals() {
        assert_eq!(unit_in_last_place("1.368e45"), decimal("1e42"));
        assert_eq!(unit_in_last_place("300350"), ratio(1, 1));
        assert_eq!(unit_in_last_place("1.71e39"), decimal("1e37"));
    }
}
