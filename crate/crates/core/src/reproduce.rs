//! Regenerates the published tables and diffs them against the fixtures.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{big_pow, decimal, format_sci, is_prime_power, log10_approx, prime_power_decompose};
use crate::ffield::{build_ctx, FieldCtx};
use crate::fixtures::{self, BetaRow};
use crate::search::{self, SearchError, SearchSpec};
use crate::sieve::{self, certify, certify_with, CertifyOptions, EvenGridLimits, SieveError, TReading};

pub const TABLE_IDS: &[&str] =
    &["t1-cascade", "t2-cascade", "t2", "t3", "t4", "t5", "t6", "t7", "t8", "m2-search", "appendixA-slice"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Desk,
    Full,
}

impl Scale {
    pub fn as_str(self) -> &'static str {
        match self {
            Scale::Desk => "desk",
            Scale::Full => "full",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReproduceOptions {
    pub scale: Scale,
    /// Directory for resumable sweep state; only used at full scale.
    pub checkpoint_dir: Option<PathBuf>,
    pub progress: bool,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        ReproduceOptions { scale: Scale::Desk, checkpoint_dir: None, progress: false }
    }
}

#[derive(Debug, Error)]
pub enum ReproduceError {
    #[error("unknown table id {0:?}")]
    UnknownTable(String),
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("checkpoint {path}: {msg}")]
    Checkpoint { path: String, msg: String },
}

/// Structured difference between a regenerated table and its fixture.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DiffReport {
    pub table: String,
    pub scale: String,
    /// Items regenerated and compared.
    pub checked: u64,
    /// In the fixture, not regenerated.
    pub missing: Vec<String>,
    /// Regenerated, not in the fixture.
    pub unexpected: Vec<String>,
    /// Present on both sides with differing content.
    pub mismatched: Vec<String>,
}

impl DiffReport {
    fn new(table: &str, scale: Scale) -> Self {
        DiffReport { table: table.into(), scale: scale.as_str().into(), ..Default::default() }
    }

    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.unexpected.is_empty() && self.mismatched.is_empty()
    }

    fn compare<T: Ord + Clone + std::fmt::Display>(&mut self, expected: &BTreeSet<T>, got: &BTreeSet<T>) {
        self.missing.extend(expected.difference(got).map(|x| x.to_string()));
        self.unexpected.extend(got.difference(expected).map(|x| x.to_string()));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Pair(u64, u64);

impl std::fmt::Display for Pair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

pub fn reproduce(table_id: &str, opts: &ReproduceOptions) -> Result<DiffReport, ReproduceError> {
    match table_id {
        "t1-cascade" => cascade_table(table_id, "table1", opts),
        "t2-cascade" => cascade_table(table_id, "table2", opts),
        "t2" => t2(opts),
        "t3" => t3(opts),
        "t4" => t4(opts),
        "t5" => beta_table(table_id, &fixtures::tables().t5, true, opts),
        "t6" => beta_table(table_id, &fixtures::tables().t6, false, opts),
        "t7" => t7(opts),
        "t8" => t8(opts),
        "m2-search" => m2_search(opts),
        "appendixA-slice" => n2_list(opts),
        other => Err(ReproduceError::UnknownTable(other.into())),
    }
}

fn cascade_table(id: &str, schedule: &str, opts: &ReproduceOptions) -> Result<DiffReport, ReproduceError> {
    let mut d = DiffReport::new(id, opts.scale);
    for row in sieve::schedule(schedule).expect("known schedule") {
        let res = sieve::cascade_step(&row.config)?;
        d.checked += 1;
        if !row.matches(&res.value) {
            d.mismatched.push(format!(
                "{} p~={}: computed [{}, {}], printed {}",
                row.label,
                row.printed_tilde_p,
                format_sci(res.value.lo(), 6),
                format_sci(res.value.hi(), 6),
                row.printed
            ));
        }
    }
    Ok(d)
}

/// `⌈V^{1/n}⌉`.
fn ceil_root(v: &BigRational, n: u32) -> u64 {
    let mut x = 10f64.powf(log10_approx(v) / n as f64).floor().max(1.0) as u64;
    let pow = |x: u64| BigRational::from_integer(BigInt::from(big_pow(x, n)));
    while &pow(x) < v {
        x += 1;
    }
    while x > 1 && &pow(x - 1) >= v {
        x -= 1;
    }
    x
}

/// Upper end of the odd-`q` sweep for `n ≥ 7`.
pub fn t2_q_limit(n: u32) -> u64 {
    let wide = decimal("3.422e40");
    let narrow = decimal("7.391e38");
    let edge = BigRational::from_integer(BigInt::from(big_pow(31, n)));
    if wide < edge {
        ceil_root(&wide, n)
    } else if narrow > edge {
        ceil_root(&narrow, n)
    } else {
        31
    }
}

/// Odd prime powers in `[lo, hi]` on which `fails` holds, in chunks, with
/// optional resumable state.
fn sweep<F>(label: &str, lo: u64, hi: u64, opts: &ReproduceOptions, fails: F) -> Result<Vec<u64>, ReproduceError>
where
    F: Fn(u64) -> Result<bool, SieveError> + Sync,
{
    const CHUNK: u64 = 20_000;
    let path = opts.checkpoint_dir.as_ref().map(|d| d.join(format!("{label}.json")));
    let mut state = match &path {
        Some(p) if p.exists() => load_checkpoint(p)?,
        _ => SweepState { label: label.into(), lo, hi, next: lo, failures: vec![] },
    };
    if state.lo != lo || state.hi != hi {
        state = SweepState { label: label.into(), lo, hi, next: lo, failures: vec![] };
    }
    while state.next <= hi {
        let end = (state.next + CHUNK - 1).min(hi);
        let qs: Vec<u64> = (state.next..=end).filter(|&q| q % 2 == 1 && is_prime_power(q)).collect();
        let flags = qs.par_iter().map(|&q| fails(q)).collect::<Result<Vec<bool>, SieveError>>()?;
        state.failures.extend(qs.iter().zip(flags).filter(|(_, f)| *f).map(|(q, _)| *q));
        state.next = end + 1;
        if let Some(p) = &path {
            save_checkpoint(p, &state)?;
        }
        if opts.progress {
            eprintln!("{label}: q ≤ {end} of {hi}, {} open", state.failures.len());
        }
    }
    Ok(state.failures)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SweepState {
    label: String,
    lo: u64,
    hi: u64,
    next: u64,
    failures: Vec<u64>,
}

fn load_checkpoint(p: &Path) -> Result<SweepState, ReproduceError> {
    let err = |msg: String| ReproduceError::Checkpoint { path: p.display().to_string(), msg };
    let text = fs::read_to_string(p).map_err(|e| err(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| err(e.to_string()))
}

fn save_checkpoint(p: &Path, s: &SweepState) -> Result<(), ReproduceError> {
    let err = |msg: String| ReproduceError::Checkpoint { path: p.display().to_string(), msg };
    if let Some(dir) = p.parent() {
        fs::create_dir_all(dir).map_err(|e| err(e.to_string()))?;
    }
    let tmp = p.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_string(s).expect("serializable")).map_err(|e| err(e.to_string()))?;
    fs::rename(&tmp, p).map_err(|e| err(e.to_string()))
}

fn t2(opts: &ReproduceOptions) -> Result<DiffReport, ReproduceError> {
    let caps = &fixtures::desk().t2;
    let table = &fixtures::tables().t2;
    let mut d = DiffReport::new("t2", opts.scale);
    let mut got = BTreeSet::new();
    let mut expected = BTreeSet::new();
    for n in caps.n_min..=caps.n_max {
        let limit = match opts.scale {
            Scale::Desk => {
                let qn_max = num_bigint::BigUint::from(10u32).pow(caps.qn_max_log10);
                let by_size = (3..=caps.q_max).take_while(|&q| big_pow(q, n) <= qn_max).last().unwrap_or(0);
                t2_q_limit(n).min(caps.q_max).min(by_size)
            }
            Scale::Full => t2_q_limit(n),
        };
        if limit < 3 {
            continue;
        }
        let fails = sweep(&format!("t2-n{n}"), 3, limit, opts, |q| Ok(certify(q, n, table.m)?.is_none()))?;
        d.checked += (3..=limit).filter(|&q| q % 2 == 1 && is_prime_power(q)).count() as u64;
        got.extend(fails.into_iter().map(|q| Pair(q, n as u64)));
        expected.extend(table.pairs.iter().filter(|&&(q, pn)| pn == n && q <= limit).map(|&(q, n)| Pair(q, n as u64)));
    }
    d.compare(&expected, &got);
    Ok(d)
}

fn t3(opts: &ReproduceOptions) -> Result<DiffReport, ReproduceError> {
    let t = fixtures::tables();
    let mut d = DiffReport::new("t3", opts.scale);
    let grid = fixtures::m3_candidates();
    let sieve_only = CertifyOptions { n2_special: false };
    let flags = grid
        .par_iter()
        .map(|&(q, n)| Ok(certify_with(q, n, t.t3_m(), sieve_only)?.is_none()))
        .collect::<Result<Vec<bool>, SieveError>>()?;
    d.checked = grid.len() as u64;
    let got = grid.iter().zip(flags).filter(|(_, f)| *f).map(|(&(q, n), _)| Pair(q, n as u64)).collect();
    let expected = t.t3().into_iter().flat_map(|(n, qs)| qs.into_iter().map(move |q| Pair(q, n))).collect();
    d.compare(&expected, &got);
    Ok(d)
}

fn t4(opts: &ReproduceOptions) -> Result<DiffReport, ReproduceError> {
    let caps = &fixtures::desk().t4;
    let mut d = DiffReport::new("t4", opts.scale);
    let limits = match opts.scale {
        Scale::Desk => [(6, caps.n6), (5, caps.n5), (4, caps.n4), (3, caps.n3)],
        Scale::Full => [(6, 13_051), (5, 439), (4, 174_000_000), (3, 23_010_000)],
    };
    for (n, limit) in limits {
        let fails = sweep(&format!("t4-n{n}"), 3, limit, opts, |q| Ok(certify(q, n, 3)?.is_none()))?;
        d.checked += fails.len() as u64;
        let got = fails.into_iter().map(|q| Pair(q, n as u64)).collect();
        let expected = fixtures::lemma_list(n).unwrap().into_iter().filter(|&q| q <= limit).map(|q| Pair(q, n as u64)).collect();
        d.compare(&expected, &got);
    }
    Ok(d)
}

fn field_for(q: u64, n: u32) -> Result<FieldCtx, ReproduceError> {
    let (p, k) = prime_power_decompose(q).ok_or_else(|| SearchError::Invalid(format!("{q} is not a prime power")))?;
    Ok(build_ctx(p as u32, k, n, 0).map_err(SearchError::from)?)
}

/// Serialized `β` expected by a fixture row.
fn expected_betas(ctx: &FieldCtx, row: &BetaRow) -> BTreeSet<String> {
    let f = ctx.fq();
    let q = ctx.q();
    if row.all {
        return (1..q).map(|c| ctx.format_fq(c)).collect();
    }
    let mut out: BTreeSet<String> = row.values.iter().map(|&v| ctx.format_fq(f.from_int(v as i64))).collect();
    for poly in &row.roots {
        for c in 1..q {
            let mut acc = 0;
            for &coef in poly.iter().rev() {
                acc = f.add(f.mul(acc, c), f.from_int(coef as i64));
            }
            if acc == 0 {
                out.insert(ctx.format_fq(c));
            }
        }
    }
    out
}

fn beta_table(id: &str, rows: &[BetaRow], normal: bool, opts: &ReproduceOptions) -> Result<DiffReport, ReproduceError> {
    let cap = match opts.scale {
        Scale::Desk => fixtures::desk().search.exceptions_qn_max,
        Scale::Full => search::configured_enum_cap(),
    };
    let mut d = DiffReport::new(id, opts.scale);
    let listed: BTreeMap<Pair, &BetaRow> = rows.iter().map(|r| (Pair(r.q, r.n as u64), r)).collect();
    let mut grid: BTreeSet<Pair> = fixtures::m3_candidates().into_iter().map(|(q, n)| Pair(q, n as u64)).collect();
    grid.extend(fixtures::tables().t5.iter().map(|r| Pair(r.q, r.n as u64)));
    let grid: Vec<Pair> = grid.into_iter().filter(|p| (p.0 as f64).powi(p.1 as i32) <= cap as f64).collect();
    let results = grid
        .par_iter()
        .map(|&pair| {
            let ctx = field_for(pair.0, pair.1 as u32)?;
            let mut spec = SearchSpec::new(ctx.p(), ctx.k(), pair.1 as u32, 3);
            spec.require_normal = normal;
            let rep = search::exceptions_in(&ctx, &spec, false)?;
            let got: BTreeSet<String> = rep.exceptions.into_iter().collect();
            let expected = listed.get(&pair).map(|r| expected_betas(&ctx, r)).unwrap_or_default();
            Ok((pair, expected, got))
        })
        .collect::<Result<Vec<_>, ReproduceError>>()?;
    for (pair, expected, got) in results {
        d.checked += 1;
        if expected != got {
            let show = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(" ");
            d.mismatched.push(format!("{pair}: expected {{{}}}, got {{{}}}", show(&expected), show(&got)));
        }
    }
    for pair in listed.keys() {
        if !grid.contains(pair) {
            d.missing.push(format!("{pair}: outside the searched grid"));
        }
    }
    Ok(d)
}

fn t7_grid() -> Result<Vec<(u64, u32)>, ReproduceError> {
    Ok(sieve::even_q_grid(&EvenGridLimits::default(), TReading::Quotient)?)
}

fn t7(opts: &ReproduceOptions) -> Result<DiffReport, ReproduceError> {
    let mut d = DiffReport::new("t7", opts.scale);
    let got: BTreeSet<Pair> = t7_grid()?.into_iter().map(|(q, n)| Pair(q, n as u64)).collect();
    let expected = fixtures::tables().t7().into_iter().flat_map(|(q, ns)| ns.into_iter().map(move |n| Pair(q, n))).collect();
    d.checked = got.len() as u64;
    d.compare(&expected, &got);
    Ok(d)
}

fn t8(opts: &ReproduceOptions) -> Result<DiffReport, ReproduceError> {
    let mut d = DiffReport::new("t8", opts.scale);
    let grid = t7_grid()?;
    let sieve_only = CertifyOptions { n2_special: false };
    let flags = grid
        .par_iter()
        .map(|&(q, n)| Ok(certify_with(q, n, 2, sieve_only)?.is_none()))
        .collect::<Result<Vec<bool>, SieveError>>()?;
    d.checked = grid.len() as u64;
    let got = grid.iter().zip(flags).filter(|(_, f)| *f).map(|(&(q, n), _)| Pair(q, n as u64)).collect();
    let expected = fixtures::tables().t8().into_iter().flat_map(|(q, ns)| ns.into_iter().map(move |n| Pair(q, n))).collect();
    d.compare(&expected, &got);
    Ok(d)
}

/// `m = 2` with `β ∈ F_q^*` and a normal term, over the pairs left open for
/// even and odd `q`.
fn m2_search(opts: &ReproduceOptions) -> Result<DiffReport, ReproduceError> {
    let cap = match opts.scale {
        Scale::Desk => fixtures::desk().search.m2_qn_max,
        Scale::Full => search::configured_enum_cap(),
    };
    let t = fixtures::tables();
    let mut d = DiffReport::new("m2-search", opts.scale);
    let mut grid: BTreeSet<Pair> = t.t8().into_iter().flat_map(|(q, ns)| ns.into_iter().map(move |n| Pair(q, n))).collect();
    grid.extend(t.t3().into_iter().flat_map(|(n, qs)| qs.into_iter().map(move |q| Pair(q, n))));
    let grid: Vec<Pair> = grid.into_iter().filter(|p| (p.0 as f64).powi(p.1 as i32) <= cap as f64).collect();
    let found = grid
        .par_iter()
        .map(|&pair| {
            let ctx = field_for(pair.0, pair.1 as u32)?;
            let spec = SearchSpec::new(ctx.p(), ctx.k(), pair.1 as u32, 2);
            let rep = search::exceptions_in(&ctx, &spec, false)?;
            Ok(rep.exceptions.into_iter().map(|b| format!("({},{},{})", pair.0, pair.1, b)).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, ReproduceError>>()?;
    d.checked = grid.len() as u64;
    let got: BTreeSet<String> = found.into_iter().flatten().collect();
    let expected: BTreeSet<String> =
        t.m2_exceptions.exceptions.iter().map(|(q, n, b)| format!("({q},{n},{b})")).collect();
    d.compare(&expected, &got);
    Ok(d)
}

fn n2_list(opts: &ReproduceOptions) -> Result<DiffReport, ReproduceError> {
    let limit = match opts.scale {
        Scale::Desk => fixtures::desk().n2_list.q_max,
        Scale::Full => 300_240_000,
    };
    let mut d = DiffReport::new("appendixA-slice", opts.scale);
    let fails = sweep("n2-list", 3, limit, opts, |q| Ok(certify(q, 2, 3)?.is_none()))?;
    d.checked = (3..=limit).filter(|&q| q % 2 == 1 && is_prime_power(q)).count() as u64;
    let got = fails.into_iter().collect();
    let expected = fixtures::n2_list().into_iter().filter(|&q| q <= limit).collect();
    d.compare(&expected, &got);
    Ok(d)
}
