//! Constants behind the per-`n` bounds for `m = 3`: the thresholds derived
//! from the cascade, the `A_t` thresholds, and the `(r, S_r, δ, Δ)` values.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::SieveError;
use crate::arith::{
    a_t_constant, decide, decimal, format_sci, max_class_count, prime_class, ratio, BoundValue,
    PrimeFilter, PrimeForm,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThresholdCheck {
    pub label: String,
    /// Lower end of the computed interval, truncated.
    pub computed: String,
    pub printed: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstantCheck {
    pub label: String,
    pub r: usize,
    pub printed_r: usize,
    pub sum: String,
    pub delta: String,
    pub big_delta: String,
    pub passed: bool,
}

/// `⌈(7.391·10³⁸)^{1/n}⌉` against the printed per-`n` starting points.
pub fn cascade_thresholds() -> Result<Vec<ThresholdCheck>, SieveError> {
    let m = decimal("7.391e38");
    let rows = [(6u32, "3006888"), (5, "59393736"), (4, "5214057313"), (3, "9.042e12"), (2, "2.7187e19")];
    let mut out = Vec::new();
    for (n, printed) in rows {
        let p = decimal(printed);
        // The printed value must be an upper bound for the root.
        let passed = decide(|prec| {
            BoundValue::exact(m.clone()).with_precision(prec).root(n).ok()?.try_ge(&BoundValue::exact(p.clone())).map(|ge| !ge)
        })?;
        let v = BoundValue::exact(m.clone()).root(n)?;
        out.push(ThresholdCheck {
            label: format!("n={n}: (7.391e38)^(1/{n})"),
            computed: format_sci(v.lo(), 8),
            printed: printed.into(),
            passed,
        });
    }
    Ok(out)
}

struct AtRow {
    label: &'static str,
    constant: &'static str,
    /// Multiplier in front of `Δ`: `3·2³`, `3`, or `2⁴`.
    factor: i64,
    eight_adjust: bool,
    t: BigRational,
    exponent: fn(&BigRational) -> BigRational,
    printed: &'static str,
}

/// `(factor·Δ·A_t³)^{exponent(t)}` compared with the printed threshold.
pub fn lemma_thresholds() -> Result<Vec<ThresholdCheck>, SieveError> {
    let rows = [
        AtRow { label: "n=6", constant: "825.118", factor: 24, eight_adjust: false, t: decimal("4.53"), exponent: |t| t / (ratio(3, 1) * t - ratio(6, 1)), printed: "13051" },
        AtRow { label: "n=5", constant: "171.433", factor: 3, eight_adjust: false, t: decimal("3.4"), exponent: |t| ratio(2, 1) * t / (ratio(5, 1) * t - ratio(6, 1)), printed: "439" },
        AtRow { label: "n=4", constant: "385.796", factor: 24, eight_adjust: true, t: decimal("5.5"), exponent: |t| t / (ratio(2, 1) * t - ratio(6, 1)), printed: "1.74e8" },
        AtRow { label: "n=3", constant: "761.931", factor: 24, eight_adjust: false, t: decimal("4.6"), exponent: |t| ratio(2, 1) * t / (ratio(3, 1) * t - ratio(6, 1)), printed: "1.5555e8" },
        AtRow { label: "n=3 (q ≥ 10⁶)", constant: "154.0873", factor: 24, eight_adjust: false, t: decimal("4.5"), exponent: |t| ratio(2, 1) * t / (ratio(3, 1) * t - ratio(6, 1)), printed: "2.301e7" },
        AtRow { label: "n=2", constant: "343.1514", factor: 16, eight_adjust: false, t: decimal("5.5"), exponent: |t| t / (t - ratio(3, 1)), printed: "5.0381e16" },
    ];
    let mut out = Vec::new();
    for row in rows {
        let base = ratio(row.factor, 1) * decimal(row.constant);
        let expo = (row.exponent)(&row.t);
        let printed = decimal(row.printed);
        let eval = |prec: u32| -> Option<BoundValue> {
            let a = a_t_constant(&row.t, PrimeFilter::All, false, row.eight_adjust, prec).ok()?;
            let inner = BoundValue::exact(base.clone()).with_precision(prec).mul(&a.powi(3));
            inner.pow(&BoundValue::exact(expo.clone()).with_precision(prec)).ok()
        };
        let passed = decide(|prec| eval(prec)?.try_ge(&BoundValue::exact(printed.clone())).map(|ge| !ge))?;
        let v = eval(crate::arith::configured_precision()).ok_or(SieveError::Invalid("A_t evaluation failed".into()))?;
        out.push(ThresholdCheck {
            label: format!("{} t={}", row.label, row.t),
            computed: format_sci(v.lo(), 8),
            printed: row.printed.into(),
            passed,
        });
    }
    Ok(out)
}

struct ConstRow {
    label: &'static str,
    form: PrimeForm,
    start: u64,
    bound: BigRational,
    printed_r: usize,
    sum_below: &'static str,
    /// `Σ 1/q^{deg h}` allowance subtracted from `δ`.
    offset: BigRational,
    s: i64,
    delta_above: &'static str,
    big_delta_below: &'static str,
}

/// Recomputes `r`, `S_r`, `δ` and `Δ` for each per-`n` lemma.
pub fn lemma_constants() -> Vec<ConstantCheck> {
    let q3 = decimal("1.5555e8");
    let n3_small_bound = &q3 * &q3 + &q3 + BigRational::one();
    let rows = [
        ConstRow { label: "n=6", form: PrimeForm::new(6, 1), start: 13, bound: decimal("8.175e25"), printed_r: 14, sum_below: "0.3141", offset: ratio(6, 10_000), s: 6, delta_above: "0.0571", big_delta_below: "825.118" },
        ConstRow { label: "n=5", form: PrimeForm::new(10, 1), start: 11, bound: decimal("1.2445e31"), printed_r: 15, sum_below: "0.2331", offset: ratio(5, 435), s: 5, delta_above: "0.2892", big_delta_below: "171.433" },
        ConstRow { label: "n=4", form: PrimeForm::new(4, 1), start: 13, bound: decimal("1.36e19"), printed_r: 11, sum_below: "1", offset: ratio(4, 100_000_000), s: 4, delta_above: "0.0938", big_delta_below: "385.796" },
        ConstRow { label: "n=3", form: PrimeForm::new(6, 1), start: 13, bound: decimal("8.1758e25"), printed_r: 14, sum_below: "1", offset: ratio(3, 1_000_000), s: 3, delta_above: "0.0579", big_delta_below: "761.931" },
        ConstRow { label: "n=3 (q ≥ 10⁶)", form: PrimeForm::new(6, 1), start: 13, bound: n3_small_bound, printed_r: 9, sum_below: "1", offset: ratio(3, 1_000_000), s: 3, delta_above: "0.19068", big_delta_below: "154.0873" },
        ConstRow { label: "n=2", form: PrimeForm::new(4, 1), start: 13, bound: decimal("2.7187e19"), printed_r: 11, sum_below: "1", offset: ratio(0, 1), s: 0, delta_above: "0.0938", big_delta_below: "343.1514" },
    ];
    rows.into_iter()
        .map(|row| {
            let r = max_class_count(row.start, row.form, &BigUint::one(), &row.bound);
            let (_, sum) = prime_class(row.start, row.form, r);
            let delta = ratio(1, 1) - ratio(3, 1) * &sum - &row.offset;
            let big_delta =
                ratio(2, 1) + BigRational::from_integer(BigInt::from(3 * r as i64 + row.s - 1)) / &delta;
            let passed = r == row.printed_r
                && sum < decimal(row.sum_below)
                && delta > decimal(row.delta_above)
                && big_delta < decimal(row.big_delta_below);
            ConstantCheck {
                label: row.label.into(),
                r,
                printed_r: row.printed_r,
                sum: format_sci(&sum, 8),
                delta: format_sci(&delta, 8),
                big_delta: format_sci(&big_delta, 10),
                passed,
            }
        })
        .collect()
}
