//! Definitional brute-force oracles over small fields.

#![allow(dead_code)]

use std::collections::HashMap;

use ffap::arith::{divisors, is_prime_u64};
use ffap::ffield::{build_ctx, FieldCtx, FieldElem, PolyFq};

/// `(p, k, n)` with `n ≥ 2` and `p^{kn} ≤ max`.
pub fn grid(max: u64) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for p in 2..=max {
        if !is_prime_u64(p) || p * p > max {
            continue;
        }
        for k in 1.. {
            if p.pow(2 * k) > max {
                break;
            }
            for n in 2.. {
                if p.checked_pow(k * n).map_or(true, |v| v > max) {
                    break;
                }
                out.push((p as u32, k, n));
            }
        }
    }
    out
}

pub fn ctx(p: u32, k: u32, n: u32) -> FieldCtx {
    build_ctx(p, k, n, 0).expect("small field")
}

/// Multiplicative order by repeated multiplication.
pub fn order_brute(ctx: &FieldCtx, a: &FieldElem) -> u64 {
    assert!(!a.is_zero());
    let one = ctx.one();
    let mut x = a.clone();
    let mut k = 1;
    while x != one {
        x = ctx.mul(&x, a);
        k += 1;
    }
    k
}

pub struct Oracle<'a> {
    pub ctx: &'a FieldCtx,
    /// `d ↦` indicator of the `d`-th powers, zero included.
    powers: HashMap<u64, Vec<bool>>,
}

impl<'a> Oracle<'a> {
    pub fn new(ctx: &'a FieldCtx) -> Self {
        let size = ctx.size() as usize;
        let mut powers = HashMap::new();
        for d in divisors(ctx.order()) {
            let mut set = vec![false; size];
            for x in ctx.elements() {
                set[ctx.index(&ctx.pow(&x, d)) as usize] = true;
            }
            set[0] = true;
            powers.insert(d, set);
        }
        Oracle { ctx, powers }
    }

    /// No `d | e`, `d > 1`, with `a` a `d`-th power.
    pub fn e_free(&self, a: &FieldElem, e: u64) -> bool {
        let i = self.ctx.index(a) as usize;
        divisors(e).into_iter().filter(|&d| d > 1).all(|d| !self.powers[&d][i])
    }

    /// Monic divisors of `∏ factors`, the trivial one included.
    pub fn poly_divisors(&self, factors: &[PolyFq]) -> Vec<PolyFq> {
        let f = self.ctx.fq();
        let mut out = vec![PolyFq::one()];
        for h in factors {
            let more: Vec<PolyFq> = out.iter().map(|d| d.mul(h, f).monic(f)).collect();
            out.extend(more);
        }
        out
    }

    pub fn image(&self, h: &PolyFq) -> Vec<bool> {
        let mut set = vec![false; self.ctx.size() as usize];
        for x in self.ctx.elements() {
            set[self.ctx.index(&self.ctx.linearized_apply(h, &x)) as usize] = true;
        }
        set
    }

    /// No monic `h | g`, `h ≠ 1`, with `a` in the image of `L_h`.
    pub fn g_free(&self, a: &FieldElem, g_factors: &[PolyFq]) -> bool {
        let i = self.ctx.index(a) as usize;
        self.poly_divisors(g_factors).iter().filter(|h| !h.is_one()).all(|h| !self.image(h)[i])
    }

    /// No non-trivial `F_q`-combination of the conjugates of `a` vanishes.
    pub fn normal(&self, a: &FieldElem) -> bool {
        let ctx = self.ctx;
        let n = ctx.n();
        let q = ctx.q() as u64;
        let mut conj = vec![a.clone()];
        for i in 1..n {
            conj.push(ctx.frobenius(&conj[i - 1]));
        }
        for code in 1..q.pow(n as u32) {
            let mut acc = ctx.zero();
            let mut c = code;
            for x in &conj {
                acc = ctx.add(&acc, &ctx.scale(x, (c % q) as u32));
                c /= q;
            }
            if acc.is_zero() {
                return false;
            }
        }
        true
    }

    /// Least-degree monic `h` with `L_h(a) = 0`, by enumeration.
    pub fn fq_order(&self, a: &FieldElem) -> PolyFq {
        let ctx = self.ctx;
        let q = ctx.q() as u64;
        for deg in 0..=ctx.n() {
            for low in 0..q.pow(deg as u32) {
                let mut coeffs = Vec::with_capacity(deg + 1);
                let mut c = low;
                for _ in 0..deg {
                    coeffs.push((c % q) as u32);
                    c /= q;
                }
                coeffs.push(1);
                let h = PolyFq::new(coeffs);
                if ctx.linearized_apply(&h, a).is_zero() {
                    return h;
                }
            }
        }
        unreachable!("x^n - 1 annihilates every element")
    }

    /// Indicator of the `e`-free elements.
    pub fn e_free_set(&self, e: u64) -> Vec<bool> {
        self.ctx.elements().map(|a| self.e_free(&a, e)).collect()
    }

    /// Indicator of the `g`-free elements, `g = ∏ g_factors`.
    pub fn g_free_set(&self, g_factors: &[PolyFq]) -> Vec<bool> {
        let images: Vec<Vec<bool>> =
            self.poly_divisors(g_factors).iter().filter(|h| !h.is_one()).map(|h| self.image(h)).collect();
        (0..self.ctx.size() as usize).map(|i| images.iter().all(|img| !img[i])).collect()
    }

    /// `N(ē, g)` and `N_j(ē, g)` for the progression with difference `beta`:
    /// `α` with every `α + iβ` `e_i`-free, counted once if some term is
    /// `g`-free and once per `j` with the `j`-th term `g`-free.
    pub fn counts(&self, e_sets: &[&[bool]], g_set: &[bool], beta: &FieldElem) -> (u64, Vec<u64>) {
        let ctx = self.ctx;
        let m = e_sets.len();
        let mut total = 0;
        let mut per_j = vec![0; m];
        for a in ctx.elements() {
            let mut idx = Vec::with_capacity(m);
            let mut cur = a;
            for _ in 0..m {
                idx.push(ctx.index(&cur) as usize);
                cur = ctx.add(&cur, beta);
            }
            if !idx.iter().zip(e_sets).all(|(&i, set)| set[i]) {
                continue;
            }
            let free: Vec<bool> = idx.iter().map(|&i| g_set[i]).collect();
            if free.iter().any(|&f| f) {
                total += 1;
            }
            for (j, &f) in free.iter().enumerate() {
                per_j[j] += f as u64;
            }
        }
        (total, per_j)
    }
}

/// Distinct irreducible factors of `xⁿ − 1` in the context's order.
pub fn xn_irreducibles(ctx: &FieldCtx) -> Vec<PolyFq> {
    ctx.xn_factors().factors.iter().map(|(h, _)| h.clone()).collect()
}

/// Primitive, and normal when asked, by the oracles above.
pub fn check_witness(o: &Oracle, terms: &[FieldElem], need_normal: bool) -> bool {
    let order = o.ctx.order();
    terms.iter().all(|t| !t.is_zero() && order_brute(o.ctx, t) == order)
        && (!need_normal || terms.iter().any(|t| o.normal(t)))
}
