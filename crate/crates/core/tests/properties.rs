mod common;

use std::sync::OnceLock;

use proptest::prelude::*;

use common::{check_witness, ctx, grid, Oracle};
use ffap::ffield::{FieldCtx, FieldElem};
use ffap::search::{exceptions_in, nesting_check, BetaDomain, SearchSpec, Searcher};
use ffap::sieve::{certify_exhaustive, certify_with, CertifyOptions};

fn small_fields() -> &'static [(u32, u32, u32)] {
    static G: OnceLock<Vec<(u32, u32, u32)>> = OnceLock::new();
    G.get_or_init(|| grid(2_000))
}

fn label_elem(ctx: &FieldCtx, spec: &SearchSpec, s: &str) -> FieldElem {
    match spec.beta_domain {
        BetaDomain::BaseFieldStar => ctx.from_fq(ctx.parse_fq(s).unwrap()),
        _ => ctx.parse_elem(s).unwrap(),
    }
}

fn terms(ctx: &FieldCtx, alpha: &FieldElem, beta: &FieldElem, m: u32) -> Vec<FieldElem> {
    let mut out = vec![alpha.clone()];
    for i in 1..m as usize {
        out.push(ctx.add(&out[i - 1], beta));
    }
    out
}

/// Some `α` over the whole field, primitive or not, gives a valid progression.
fn any_progression(ctx: &FieldCtx, beta: &FieldElem, m: u32, normal: bool) -> bool {
    ctx.elements().any(|a| {
        let t = terms(ctx, &a, beta, m);
        t.iter().all(|x| ctx.is_primitive(x)) && (!normal || t.iter().any(|x| ctx.is_normal(x)))
    })
}

#[test]
fn witnesses_pass_brute_force_checks() {
    for &(p, k, n) in small_fields() {
        let ctx = ctx(p, k, n);
        let o = Oracle::new(&ctx);
        for m in 2..=3 {
            for normal in [true, false] {
                let mut spec = SearchSpec::new(p, k, n, m);
                spec.require_normal = normal;
                let rep = exceptions_in(&ctx, &spec, true).unwrap();
                if rep.degenerate {
                    continue;
                }
                for (b, w) in rep.witnesses.unwrap() {
                    let beta = label_elem(&ctx, &spec, &b);
                    let alpha = ctx.parse_elem(&w).unwrap();
                    assert!(
                        check_witness(&o, &terms(&ctx, &alpha, &beta, m), normal),
                        "({p},{k},{n}) m={m} β={b} α={w}"
                    );
                }
            }
        }
    }
}

#[test]
fn declared_exceptions_survive_a_full_scan() {
    for &(p, k, n) in grid(10_000).iter() {
        let ctx = ctx(p, k, n);
        for m in 2..=3 {
            let spec = SearchSpec::new(p, k, n, m);
            let rep = exceptions_in(&ctx, &spec, false).unwrap();
            if rep.degenerate {
                continue;
            }
            for b in &rep.exceptions {
                let beta = label_elem(&ctx, &spec, b);
                assert!(!any_progression(&ctx, &beta, m, true), "({p},{k},{n}) m={m} β={b}");
            }
        }
    }
}

#[test]
fn exceptions_are_closed_under_negation() {
    for &(p, k, n) in grid(10_000).iter().filter(|f| f.0 != 2) {
        let ctx = ctx(p, k, n);
        let m = 3.min(p);
        let mut spec = SearchSpec::new(p, k, n, m);
        spec.beta_domain = BetaDomain::FullFieldStar;
        spec.half_by_sign = false;
        let rep = exceptions_in(&ctx, &spec, false).unwrap();
        for b in &rep.exceptions {
            let neg = ctx.format_elem(&ctx.neg(&label_elem(&ctx, &spec, b)));
            assert!(rep.exceptions.contains(&neg), "({p},{k},{n}) β={b}");
        }
    }
}

#[test]
fn folding_matches_the_unfolded_scan() {
    for &(p, k, n) in grid(2_000).iter().filter(|f| f.0 != 2) {
        let ctx = ctx(p, k, n);
        for m in 2..=3 {
            let mut spec = SearchSpec::new(p, k, n, m);
            let folded = exceptions_in(&ctx, &spec, false).unwrap();
            spec.half_by_sign = false;
            let plain = exceptions_in(&ctx, &spec, false).unwrap();
            assert_eq!(folded.exceptions, plain.exceptions, "({p},{k},{n}) m={m}");
        }
    }
}

#[test]
fn nesting_over_f25() {
    let ctx = ctx(5, 1, 2);
    let s = Searcher::new(&ctx);
    for beta in ctx.elements().skip(1) {
        assert!(nesting_check(&s, &beta, 3), "β={beta:?}");
    }
}

#[test]
fn reports_are_deterministic() {
    for (p, k, n, m) in [(7, 1, 2, 3), (3, 2, 2, 3), (2, 2, 3, 2), (5, 1, 4, 3)] {
        let mut spec = SearchSpec::new(p, k, n, m);
        spec.beta_domain = BetaDomain::FullFieldStar;
        let ctx = ctx(p, k, n);
        let a = exceptions_in(&ctx, &spec, true).unwrap();
        let b = exceptions_in(&ctx, &spec, true).unwrap();
        assert_eq!((a.exceptions, a.witnesses), (b.exceptions, b.witnesses));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(f in 0..small_fields().len(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (p, k, n) = small_fields()[f];
        let ctx = ctx(p, k, n);
        let size = ctx.size() as u64;
        let (a, b, c) = (ctx.from_index(a % size), ctx.from_index(b % size), ctx.from_index(c % size));
        prop_assert_eq!(ctx.mul(&ctx.mul(&a, &b), &c), ctx.mul(&a, &ctx.mul(&b, &c)));
        prop_assert_eq!(ctx.mul(&a, &ctx.add(&b, &c)), ctx.add(&ctx.mul(&a, &b), &ctx.mul(&a, &c)));
        prop_assert_eq!(ctx.sub(&ctx.add(&a, &b), &b), a.clone());
        prop_assert_eq!(ctx.frobenius(&ctx.mul(&a, &b)), ctx.mul(&ctx.frobenius(&a), &ctx.frobenius(&b)));
        prop_assert_eq!(ctx.frobenius(&ctx.add(&a, &b)), ctx.add(&ctx.frobenius(&a), &ctx.frobenius(&b)));
        prop_assert_eq!(ctx.pow(&a, size), a.clone());
        if !a.is_zero() {
            prop_assert_eq!(ctx.mul(&a, &ctx.inv(&a)), ctx.one());
        }
    }

    #[test]
    fn search_witnesses_are_valid(f in 0..small_fields().len(), b in any::<u64>(), m in 2u32..=4) {
        let (p, k, n) = small_fields()[f];
        prop_assume!(m <= p);
        let ctx = ctx(p, k, n);
        let beta = ctx.from_index(1 + b % (ctx.size() as u64 - 1));
        let o = Oracle::new(&ctx);
        let s = Searcher::new(&ctx);
        if let Some(alpha) = s.find_ap(&beta, m, true) {
            prop_assert!(check_witness(&o, &terms(&ctx, &alpha, &beta, m), true));
            prop_assert!(s.find_ap(&beta, m - 1, true).is_some());
        } else {
            prop_assert!(!any_progression(&ctx, &beta, m, true));
        }
    }

    #[test]
    fn pruned_and_exhaustive_certify_agree(q_idx in 0usize..40, n in 2u32..=12, m in 2u32..=4) {
        let qs: Vec<u64> = (2..200u64).filter(|&q| ffap::arith::is_prime_power(q)).collect();
        let q = qs[q_idx % qs.len()];
        let pruned = certify_with(q, n, m, CertifyOptions { n2_special: false }).unwrap();
        let full = certify_exhaustive(q, n, m).unwrap();
        prop_assert_eq!(pruned.is_some(), full.is_some());
        prop_assert!(pruned.is_none_or(|c| c.passed));
    }
}
