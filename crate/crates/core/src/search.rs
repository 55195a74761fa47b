//! Exhaustive search for `α, α+β, …, α+(m−1)β` all primitive with one term
//! normal, and the exception lists built from it.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU8, Ordering};

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ffield::{build_ctx, FieldCtx, FieldElem, FieldError};

/// Default cap on `q^n` for enumeration.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 32;
/// Largest `q^n` for which discrete-log tables are built.
pub const TABLE_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("q^n = {size} exceeds the enumeration cap {cap}")]
    CapExceeded { size: u128, cap: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("invalid search: {0}")]
    Invalid(String),
}

/// Cap from `FFAP_ENUM_CAP`, falling back to [`DEFAULT_ENUM_CAP`].
pub fn configured_enum_cap() -> u64 {
    std::env::var("FFAP_ENUM_CAP")
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .unwrap_or(DEFAULT_ENUM_CAP)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum BetaDomain {
    /// `F_q^*` inside `F_{q^n}`.
    BaseFieldStar,
    FullFieldStar,
    Single(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchSpec {
    pub p: u32,
    pub k: u32,
    pub n: u32,
    pub m: u32,
    pub beta_domain: BetaDomain,
    pub require_normal: bool,
    /// Search one of each `±β` and mirror the witness to the other.
    pub half_by_sign: bool,
}

impl SearchSpec {
    pub fn new(p: u32, k: u32, n: u32, m: u32) -> Self {
        SearchSpec { p, k, n, m, beta_domain: BetaDomain::BaseFieldStar, require_normal: true, half_by_sign: true }
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExceptionReport {
    pub spec: SearchSpec,
    /// Exceptional `β`, serialized, in element-index order.
    pub exceptions: Vec<String>,
    pub witnesses: Option<BTreeMap<String, String>>,
    /// Number of `β` in the domain.
    pub scanned: u64,
    /// Characteristic below `m`: every `β` is reported without searching.
    pub degenerate: bool,
}

/// Precomputed view of a context for fast progression scans.
pub struct Searcher<'a> {
    ctx: &'a FieldCtx,
    tables: Option<Tables>,
    normal: Vec<AtomicU8>,
}

struct Tables {
    /// `exp[i]` is the index of `a^i`.
    exp: Vec<u32>,
    prim: Vec<bool>,
}

impl<'a> Searcher<'a> {
    pub fn new(ctx: &'a FieldCtx) -> Self {
        let size = ctx.size() as u64;
        let tables = (size <= TABLE_LIMIT).then(|| {
            let order = ctx.order();
            let mut exp = Vec::with_capacity(order as usize);
            let mut prim = vec![false; size as usize];
            let g = ctx.generator();
            let mut x = ctx.one();
            for i in 0..order {
                let idx = ctx.index(&x) as u32;
                exp.push(idx);
                prim[idx as usize] = i.gcd(&order) == 1;
                x = ctx.mul(&x, g);
            }
            Tables { exp, prim }
        });
        let normal = if tables.is_some() { (0..size).map(|_| AtomicU8::new(0)).collect() } else { vec![] };
        Searcher { ctx, tables, normal }
    }

    pub fn ctx(&self) -> &FieldCtx {
        self.ctx
    }

    fn is_normal_idx(&self, idx: u64) -> bool {
        let slot = &self.normal[idx as usize];
        match slot.load(Ordering::Relaxed) {
            1 => true,
            2 => false,
            _ => {
                let v = self.ctx.is_normal(&self.ctx.from_index(idx));
                slot.store(if v { 1 } else { 2 }, Ordering::Relaxed);
                v
            }
        }
    }

    fn add_idx(&self, a: u64, b: u64) -> u64 {
        let q = self.ctx.q() as u64;
        let f = self.ctx.fq();
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.ctx.n() {
            let d = f.add((a % q) as u32, (b % q) as u32) as u64;
            out += d * place;
            a /= q;
            b /= q;
            place *= q;
        }
        out
    }

    /// First `α = a^u`, `u` ascending and coprime to `q^n − 1`, whose
    /// progression with difference `β` is all primitive, with one normal
    /// term when `require_normal`.
    pub fn find_ap(&self, beta: &FieldElem, m: u32, require_normal: bool) -> Option<FieldElem> {
        assert!(!beta.is_zero(), "β must be non-zero");
        match &self.tables {
            Some(t) => self.find_ap_tables(t, beta, m, require_normal),
            None => self.find_ap_direct(beta, m, require_normal),
        }
    }

    fn find_ap_tables(&self, t: &Tables, beta: &FieldElem, m: u32, require_normal: bool) -> Option<FieldElem> {
        let order = self.ctx.order();
        let b = self.ctx.index(beta);
        let mut terms = Vec::with_capacity(m as usize);
        'u: for u in 1..order {
            if u.gcd(&order) != 1 {
                continue;
            }
            let alpha = t.exp[u as usize] as u64;
            terms.clear();
            terms.push(alpha);
            let mut cur = alpha;
            for _ in 1..m {
                cur = self.add_idx(cur, b);
                if !t.prim[cur as usize] {
                    continue 'u;
                }
                terms.push(cur);
            }
            if !require_normal || terms.iter().any(|&x| self.is_normal_idx(x)) {
                return Some(self.ctx.from_index(alpha));
            }
        }
        None
    }

    fn find_ap_direct(&self, beta: &FieldElem, m: u32, require_normal: bool) -> Option<FieldElem> {
        let ctx = self.ctx;
        let order = ctx.order();
        let g = ctx.generator();
        let mut alpha = ctx.one();
        'u: for u in 1..order {
            alpha = ctx.mul(&alpha, g);
            if u.gcd(&order) != 1 {
                continue;
            }
            let mut terms = vec![alpha.clone()];
            let mut cur = alpha.clone();
            for _ in 1..m {
                cur = ctx.add(&cur, beta);
                if !ctx.is_primitive(&cur) {
                    continue 'u;
                }
                terms.push(cur.clone());
            }
            if !require_normal || terms.iter().any(|x| ctx.is_normal(x)) {
                return Some(alpha);
            }
        }
        None
    }

    /// The reversed progression: `α + (m−1)β` works for `−β`.
    fn mirror(&self, alpha: &FieldElem, beta: &FieldElem, m: u32) -> FieldElem {
        let step = self.ctx.scale(beta, self.ctx.fq().from_int(m as i64 - 1));
        self.ctx.add(alpha, &step)
    }
}

/// One-shot [`Searcher::find_ap`].
pub fn find_ap(ctx: &FieldCtx, beta: &FieldElem, m: u32, require_normal: bool) -> Option<FieldElem> {
    Searcher::new(ctx).find_ap(beta, m, require_normal)
}

fn check_cap(spec: &SearchSpec, cap: u64) -> Result<(), SearchError> {
    let size = (spec.q() as u128).checked_pow(spec.n).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(SearchError::CapExceeded { size, cap });
    }
    Ok(())
}

pub fn build_for(spec: &SearchSpec, cap: u64) -> Result<FieldCtx, SearchError> {
    if spec.m < 2 {
        return Err(SearchError::Invalid("m must be at least 2".into()));
    }
    check_cap(spec, cap)?;
    Ok(build_ctx(spec.p, spec.k, spec.n, 0)?)
}

/// `β` values of the domain, one of each `±` pair when folding applies.
fn domain(ctx: &FieldCtx, spec: &SearchSpec) -> Result<(Vec<FieldElem>, bool), SearchError> {
    let fold = spec.half_by_sign && ctx.p() != 2;
    Ok(match &spec.beta_domain {
        BetaDomain::Single(s) => {
            let b = if s.contains(';') { ctx.parse_elem(s)? } else { ctx.from_fq(ctx.parse_fq(s)?) };
            if b.is_zero() {
                return Err(SearchError::Invalid("β must be non-zero".into()));
            }
            (vec![b], false)
        }
        BetaDomain::BaseFieldStar => {
            let q = ctx.q() as u64;
            let t = ctx.order() / (q - 1);
            let h = ctx.pow(ctx.generator(), t);
            let count = if fold { (q - 1) / 2 } else { q - 1 };
            let mut out = Vec::with_capacity(count as usize);
            let mut x = ctx.one();
            for _ in 0..count {
                out.push(x.clone());
                x = ctx.mul(&x, &h);
            }
            (out, fold)
        }
        BetaDomain::FullFieldStar => {
            let mut out = Vec::new();
            for i in 1..ctx.size() as u64 {
                let b = ctx.from_index(i);
                if fold && ctx.index(&ctx.neg(&b)) < i {
                    continue;
                }
                out.push(b);
            }
            (out, fold)
        }
    })
}

fn beta_label(ctx: &FieldCtx, spec: &SearchSpec, b: &FieldElem) -> String {
    let in_base = b.codes()[1..].iter().all(|&c| c == 0);
    match &spec.beta_domain {
        BetaDomain::BaseFieldStar => ctx.format_fq(b.codes()[0]),
        BetaDomain::Single(s) if !s.contains(';') && in_base => ctx.format_fq(b.codes()[0]),
        _ => ctx.format_elem(b),
    }
}

pub fn exceptions(spec: &SearchSpec, with_witnesses: bool) -> Result<ExceptionReport, SearchError> {
    let ctx = build_for(spec, configured_enum_cap())?;
    exceptions_in(&ctx, spec, with_witnesses)
}

/// [`exceptions`] over an existing context.
pub fn exceptions_in(ctx: &FieldCtx, spec: &SearchSpec, with_witnesses: bool) -> Result<ExceptionReport, SearchError> {
    let (betas, folded) = domain(ctx, spec)?;
    let mut all: Vec<FieldElem> = Vec::new();
    for b in &betas {
        all.push(b.clone());
        if folded {
            all.push(ctx.neg(b));
        }
    }
    let scanned = all.len() as u64;
    if ctx.p() < spec.m {
        all.sort_by_key(|b| ctx.index(b));
        return Ok(ExceptionReport {
            spec: spec.clone(),
            exceptions: all.iter().map(|b| beta_label(ctx, spec, b)).collect(),
            witnesses: with_witnesses.then(BTreeMap::new),
            scanned,
            degenerate: true,
        });
    }
    let searcher = Searcher::new(ctx);
    let found: Vec<(FieldElem, Option<FieldElem>)> = betas
        .par_iter()
        .map(|b| (b.clone(), searcher.find_ap(b, spec.m, spec.require_normal)))
        .collect();
    let mut outcomes: Vec<(FieldElem, Option<FieldElem>)> = Vec::with_capacity(all.len());
    for (b, w) in found {
        if folded {
            let mirrored = w.as_ref().map(|a| searcher.mirror(a, &b, spec.m));
            outcomes.push((ctx.neg(&b), mirrored));
        }
        outcomes.push((b, w));
    }
    outcomes.sort_by_key(|(b, _)| ctx.index(b));
    let exceptions = outcomes.iter().filter(|(_, w)| w.is_none()).map(|(b, _)| beta_label(ctx, spec, b)).collect();
    let witnesses = with_witnesses.then(|| {
        outcomes
            .iter()
            .filter_map(|(b, w)| w.as_ref().map(|a| (beta_label(ctx, spec, b), ctx.format_elem(a))))
            .collect()
    });
    Ok(ExceptionReport { spec: spec.clone(), exceptions, witnesses, scanned, degenerate: false })
}

/// `(q, n) ∈ N_m`: no exception over all of `F_{q^n}^*` with a normal term.
pub fn verify_in_nm(p: u32, k: u32, n: u32, m: u32) -> Result<(bool, ExceptionReport), SearchError> {
    let mut spec = SearchSpec::new(p, k, n, m);
    spec.beta_domain = BetaDomain::FullFieldStar;
    let rep = exceptions(&spec, false)?;
    Ok((rep.exceptions.is_empty(), rep))
}

/// A progression of length `m` restricts to one of length `m − 1`.
pub fn nesting_check(searcher: &Searcher, beta: &FieldElem, m: u32) -> bool {
    assert!(m >= 3);
    searcher.find_ap(beta, m, true).is_none() || searcher.find_ap(beta, m - 1, true).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(p: u32, k: u32, n: u32, m: u32, normal: bool) -> Vec<String> {
        let mut s = SearchSpec::new(p, k, n, m);
        s.require_normal = normal;
        exceptions(&s, false).unwrap().exceptions
    }

    #[test]
    fn small_examples() {
        let ctx = build_ctx(2, 1, 4, 0).unwrap();
        assert!(find_ap(&ctx, &ctx.one(), 2, true).is_none());
        let ctx = build_ctx(7, 1, 2, 0).unwrap();
        assert!(find_ap(&ctx, &ctx.one(), 3, true).is_some());
        assert_eq!(base(3, 1, 2, 3, true), vec!["1", "2"]);
        assert_eq!(base(13, 1, 2, 3, true), vec!["1", "4", "5", "6", "7", "8", "9", "12"]);
        assert_eq!(base(5, 1, 4, 3, true).len(), 4);
        assert!(base(5, 1, 4, 3, false).is_empty());
    }

    #[test]
    fn tables_and_direct_agree() {
        for (p, k, n) in [(3, 1, 3), (2, 2, 3), (5, 1, 2), (3, 2, 2)] {
            let ctx = build_ctx(p, k, n, 0).unwrap();
            let fast = Searcher::new(&ctx);
            let slow = Searcher { ctx: &ctx, tables: None, normal: vec![] };
            for i in 1..ctx.size() as u64 {
                let b = ctx.from_index(i);
                for m in 2..=3 {
                    assert_eq!(fast.find_ap(&b, m, true), slow.find_ap(&b, m, true));
                }
            }
        }
    }

    #[test]
    fn degenerate_characteristic() {
        let mut s = SearchSpec::new(2, 2, 2, 3);
        s.require_normal = false;
        let rep = exceptions(&s, false).unwrap();
        assert!(rep.degenerate);
        assert_eq!(rep.exceptions.len(), 3);
    }

    #[test]
    fn full_domain_membership() {
        assert!(verify_in_nm(2, 2, 2, 2).unwrap().0);
        let (ok, rep) = verify_in_nm(3, 2, 3, 3).unwrap();
        assert!(!ok);
        assert_eq!(rep.exceptions.len(), 4);
    }

    #[test]
    fn cap_is_enforced() {
        let s = SearchSpec::new(2, 1, 40, 2);
        assert!(matches!(build_for(&s, 1 << 32), Err(SearchError::CapExceeded { .. })));
    }
}
