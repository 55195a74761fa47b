use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::Serialize;

use super::fq::{first_irreducible, Code, Fq};
use super::poly::PolyFq;
use super::FieldError;
use crate::arith::{factorize, FactoredNat};
use crate::polyfact::{factor_xn_minus_1, XnFactorization};

/// Default cap on `q^n` for building a context, as a power of two.
pub const DEFAULT_FIELD_CAP_BITS: u32 = 64;

/// Element of `F_{q^n}`: `n` coordinates over `F_q` in the polynomial basis
/// of the extension modulus, constant term first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem {
    c: Vec<Code>,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.c)
    }
}

impl FieldElem {
    pub fn codes(&self) -> &[Code] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }
}

/// The tower `F_p ⊂ F_q ⊂ F_{q^n}` with cached factorizations.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    fq: Fq,
    n: usize,
    ext_modulus: PolyFq,
    size: u128,
    order: u64,
    qn_minus_1: FactoredNat<u64>,
    xn: XnFactorization,
    xn_poly: PolyFq,
    frob: Vec<Vec<Code>>,
    primitive_cofactors: Vec<u64>,
    normal_cofactors: Vec<PolyFq>,
    generator: FieldElem,
}

/// Builds `F_{(p^k)^n}`; `seed` picks the moduli (0 is the lexicographically first).
pub fn build_ctx(p: u32, k: u32, n: u32, seed: u64) -> Result<FieldCtx, FieldError> {
    build_ctx_capped(p, k, n, seed, DEFAULT_FIELD_CAP_BITS)
}

impl FieldCtx {
    pub fn fq(&self) -> &Fq {
        &self.fq
    }

    pub fn p(&self) -> u32 {
        self.fq.p()
    }

    pub fn k(&self) -> u32 {
        self.fq.k()
    }

    pub fn q(&self) -> u32 {
        self.fq.q()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `q^n`.
    pub fn size(&self) -> u128 {
        self.size
    }

    /// `q^n − 1`.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn ext_modulus(&self) -> &PolyFq {
        &self.ext_modulus
    }

    pub fn qn_minus_1(&self) -> &FactoredNat<u64> {
        &self.qn_minus_1
    }

    pub fn xn_factors(&self) -> &XnFactorization {
        &self.xn
    }

    pub fn generator(&self) -> &FieldElem {
        &self.generator
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { c: vec![0; self.n] }
    }

    pub fn one(&self) -> FieldElem {
        self.from_fq(1)
    }

    /// Embeds an element of `F_q`.
    pub fn from_fq(&self, a: Code) -> FieldElem {
        let mut c = vec![0; self.n];
        c[0] = a;
        FieldElem { c }
    }

    /// The class of `x`.
    pub fn x(&self) -> FieldElem {
        let mut c = vec![0; self.n];
        c[1] = 1;
        FieldElem { c }
    }

    pub fn from_codes(&self, codes: &[Code]) -> FieldElem {
        assert!(codes.len() <= self.n);
        let mut c = vec![0; self.n];
        c[..codes.len()].copy_from_slice(codes);
        FieldElem { c }
    }

    /// Element with lexicographic index `i`: base-`q` digits, constant term least significant.
    pub fn from_index(&self, i: u64) -> FieldElem {
        let q = self.q() as u64;
        let mut i = i;
        let c = (0..self.n)
            .map(|_| {
                let d = (i % q) as Code;
                i /= q;
                d
            })
            .collect();
        FieldElem { c }
    }

    pub fn index(&self, a: &FieldElem) -> u64 {
        a.c.iter().rev().fold(0u64, |acc, &d| acc * self.q() as u64 + d as u64)
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.size as u64).map(move |i| self.from_index(i))
    }

    /// `F_p`-coordinates of every `F_q`-coordinate.
    pub fn coeffs(&self, a: &FieldElem) -> Vec<Vec<u32>> {
        a.c.iter().map(|&x| self.fq.digits(x)).collect()
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem { c: a.c.iter().zip(&b.c).map(|(&x, &y)| self.fq.add(x, y)).collect() }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem { c: a.c.iter().zip(&b.c).map(|(&x, &y)| self.fq.sub(x, y)).collect() }
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        FieldElem { c: a.c.iter().map(|&x| self.fq.neg(x)).collect() }
    }

    /// Multiplies by a scalar from `F_q`.
    pub fn scale(&self, a: &FieldElem, s: Code) -> FieldElem {
        FieldElem { c: a.c.iter().map(|&x| self.fq.mul(x, s)).collect() }
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let n = self.n;
        let m = self.ext_modulus.coeffs();
        if self.fq.k() == 1 {
            let p = self.p() as u64;
            let mut prod = vec![0u64; 2 * n - 1];
            for (i, &x) in a.c.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in b.c.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x as u64 * y as u64 % p) % p;
                }
            }
            for i in (n..2 * n - 1).rev() {
                let c = prod[i];
                if c == 0 {
                    continue;
                }
                let neg = p - c;
                for j in 0..n {
                    prod[i - n + j] = (prod[i - n + j] + neg * m[j] as u64 % p) % p;
                }
            }
            return FieldElem { c: prod[..n].iter().map(|&v| v as Code).collect() };
        }
        let f = &self.fq;
        let mut prod = vec![0 as Code; 2 * n - 1];
        for (i, &x) in a.c.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.c.iter().enumerate() {
                prod[i + j] = f.add(prod[i + j], f.mul(x, y));
            }
        }
        for i in (n..2 * n - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            let neg = f.neg(c);
            for j in 0..n {
                prod[i - n + j] = f.add(prod[i - n + j], f.mul(neg, m[j]));
            }
        }
        prod.truncate(n);
        FieldElem { c: prod }
    }

    pub fn pow(&self, a: &FieldElem, e: u64) -> FieldElem {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn inv(&self, a: &FieldElem) -> FieldElem {
        assert!(!a.is_zero(), "inverse of zero");
        self.pow(a, self.order - 1)
    }

    /// `a^q`, applied as a precomputed `F_q`-linear map.
    pub fn frobenius(&self, a: &FieldElem) -> FieldElem {
        let f = &self.fq;
        let mut out = vec![0 as Code; self.n];
        for (j, &x) in a.c.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (o, &r) in out.iter_mut().zip(&self.frob[j]) {
                *o = f.add(*o, f.mul(x, r));
            }
        }
        FieldElem { c: out }
    }

    /// Least `d` with `a^d = 1`.
    pub fn mult_order(&self, a: &FieldElem) -> Result<u64, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroElement);
        }
        let one = self.one();
        let mut order = self.order;
        for &(l, _) in self.qn_minus_1.factors() {
            while order % l == 0 && self.pow(a, order / l) == one {
                order /= l;
            }
        }
        Ok(order)
    }

    /// `a^{(q^n−1)/ℓ} ≠ 1` for every listed prime `ℓ`.
    pub fn is_e_free(&self, a: &FieldElem, e_primes: &[u64]) -> Result<bool, FieldError> {
        for &l in e_primes {
            if l < 2 || self.order % l != 0 {
                return Err(FieldError::NotADivisor(l));
            }
        }
        if e_primes.is_empty() {
            return Ok(true);
        }
        if a.is_zero() {
            return Ok(false);
        }
        let one = self.one();
        Ok(e_primes.iter().all(|&l| self.pow(a, self.order / l) != one))
    }

    pub fn is_primitive(&self, a: &FieldElem) -> bool {
        if a.is_zero() {
            return false;
        }
        let one = self.one();
        self.primitive_cofactors.iter().all(|&c| self.pow(a, c) != one)
    }

    /// `f ∘ a = Σ f_i a^{q^i}`.
    pub fn linearized_apply(&self, f: &PolyFq, a: &FieldElem) -> FieldElem {
        let mut acc = self.zero();
        let mut conj = a.clone();
        for (i, &c) in f.coeffs().iter().enumerate() {
            if i > 0 {
                conj = self.frobenius(&conj);
            }
            if c != 0 {
                acc = self.add(&acc, &self.scale(&conj, c));
            }
        }
        acc
    }

    /// The `F_q`-order: least-degree monic `h` with `h ∘ a = 0`.
    pub fn fq_order(&self, a: &FieldElem) -> PolyFq {
        let f = &self.fq;
        let mut current = self.xn_poly.clone();
        for (h, mult) in &self.xn.factors {
            for _ in 0..*mult {
                let cand = current.div_exact(h, f).expect("factor of the current order");
                if self.linearized_apply(&cand, a).is_zero() {
                    current = cand;
                } else {
                    break;
                }
            }
        }
        current
    }

    /// `((xⁿ−1)/h) ∘ a ≠ 0` for every listed irreducible `h | xⁿ − 1`.
    pub fn is_g_free(&self, a: &FieldElem, g_factors: &[PolyFq]) -> Result<bool, FieldError> {
        let f = &self.fq;
        let mut cofactors = Vec::with_capacity(g_factors.len());
        for h in g_factors {
            let h = h.monic(f);
            if h.degree().is_none_or(|d| d == 0) {
                return Err(FieldError::NotAFactor);
            }
            cofactors.push(self.xn_poly.div_exact(&h, f).ok_or(FieldError::NotAFactor)?);
        }
        if g_factors.is_empty() {
            return Ok(true);
        }
        if a.is_zero() {
            return Ok(false);
        }
        Ok(cofactors.iter().all(|c| !self.linearized_apply(c, a).is_zero()))
    }

    /// Normality through the cyclic-module criterion over all irreducible factors.
    pub fn is_normal(&self, a: &FieldElem) -> bool {
        if a.is_zero() {
            return false;
        }
        self.normal_cofactors.iter().all(|c| !self.linearized_apply(c, a).is_zero())
    }

    /// Normality as full `F_q`-rank of the conjugates `a, a^q, …, a^{q^{n−1}}`.
    pub fn is_normal_by_rank(&self, a: &FieldElem) -> bool {
        let mut rows = Vec::with_capacity(self.n);
        let mut conj = a.clone();
        for i in 0..self.n {
            if i > 0 {
                conj = self.frobenius(&conj);
            }
            rows.push(conj.c.clone());
        }
        rank(&self.fq, rows) == self.n
    }

    /// Serializes an `F_q` element as comma-separated `F_p` digits, low-to-high.
    pub fn format_fq(&self, a: Code) -> String {
        self.fq.digits(a).iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn parse_fq(&self, s: &str) -> Result<Code, FieldError> {
        let digits: Vec<u32> = s
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| FieldError::Parse(s.to_string())))
            .collect::<Result<_, _>>()?;
        if digits.is_empty() || digits.len() > self.k() as usize || digits.iter().any(|&d| d >= self.p()) {
            return Err(FieldError::Parse(s.to_string()));
        }
        Ok(self.fq.from_digits(&digits))
    }

    /// Serializes an element as `n` groups of `F_p` digits separated by `;`.
    pub fn format_elem(&self, a: &FieldElem) -> String {
        a.c.iter().map(|&x| self.format_fq(x)).collect::<Vec<_>>().join(";")
    }

    /// Parses either a bare `F_q` element (`"1,2"`) or a full element (`"1,2;0,1"`).
    pub fn parse_elem(&self, s: &str) -> Result<FieldElem, FieldError> {
        let groups: Vec<&str> = s.split(';').collect();
        if groups.len() > self.n {
            return Err(FieldError::Parse(s.to_string()));
        }
        let codes = groups.iter().map(|g| self.parse_fq(g)).collect::<Result<Vec<_>, _>>()?;
        Ok(self.from_codes(&codes))
    }
}

/// Row rank over `F_q` by Gaussian elimination.
pub(crate) fn rank(f: &Fq, mut rows: Vec<Vec<Code>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pivot);
        let inv = f.inv(rows[r][c]);
        let pivot_row: Vec<Code> = rows[r].iter().map(|&x| f.mul(x, inv)).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let factor = row[c];
                for (x, &pv) in row.iter_mut().zip(&pivot_row) {
                    *x = f.sub(*x, f.mul(factor, pv));
                }
            }
        }
        rows[r] = pivot_row;
        r += 1;
    }
    r
}

pub(crate) fn build_ctx_capped(p: u32, k: u32, n: u32, seed: u64, cap_bits: u32) -> Result<FieldCtx, FieldError> {
    if n < 2 {
        return Err(FieldError::DegreeTooSmall);
    }
    let fq = Fq::new(p, k, seed)?;
    let q = fq.q() as u128;
    let size = q.checked_pow(n).ok_or(FieldError::TooLarge)?;
    if cap_bits < 128 && size > (1u128 << cap_bits) || size - 1 > u64::MAX as u128 {
        return Err(FieldError::TooLarge);
    }
    let order = (size - 1) as u64;
    let ext_modulus = PolyFq::new(first_irreducible(&fq, n as usize, seed));
    let x = PolyFq::x();
    let mut frob = Vec::with_capacity(n as usize);
    let xq = x.pow_mod(&BigUint::from(fq.q()), &ext_modulus, &fq);
    let mut row = PolyFq::one();
    for _ in 0..n {
        let mut coeffs = row.coeffs().to_vec();
        coeffs.resize(n as usize, 0);
        frob.push(coeffs);
        row = row.mul_mod(&xq, &ext_modulus, &fq);
    }
    let qn_minus_1 = factorize(order);
    let primitive_cofactors = qn_minus_1.factors().iter().map(|&(l, _)| order / l).collect();
    let xn = factor_xn_minus_1(&fq, n as u64, seed);
    let xn_poly = PolyFq::xn_minus_1(&fq, n as usize);
    let normal_cofactors = xn
        .factors
        .iter()
        .map(|(h, _)| xn_poly.div_exact(h, &fq).expect("factor divides"))
        .collect();
    let mut ctx = FieldCtx {
        fq,
        n: n as usize,
        ext_modulus,
        size,
        order,
        qn_minus_1,
        xn,
        xn_poly,
        frob,
        primitive_cofactors,
        normal_cofactors,
        generator: FieldElem { c: vec![] },
    };
    let generator = (1..order)
        .map(|i| ctx.from_index(i))
        .find(|a| ctx.is_primitive(a))
        .ok_or(FieldError::Internal("no primitive element found"))?;
    ctx.generator = generator;
    Ok(ctx)
}

/// JSON-facing description of a context.
#[derive(Debug, Clone, Serialize)]
pub struct FieldInfo {
    pub p: u32,
    pub k: u32,
    pub n: usize,
    pub q: u32,
    pub base_modulus: Vec<u32>,
    pub ext_modulus: Vec<Vec<u32>>,
    pub qn_minus_1: Vec<(String, u32)>,
    pub xn_factors: Vec<(Vec<Vec<u32>>, u64)>,
    pub generator: String,
}

impl FieldCtx {
    pub fn info(&self) -> FieldInfo {
        let fq_coeffs = |p: &PolyFq| p.coeffs().iter().map(|&c| self.fq.digits(c)).collect::<Vec<_>>();
        FieldInfo {
            p: self.p(),
            k: self.k(),
            n: self.n,
            q: self.q(),
            base_modulus: self.fq.modulus().to_vec(),
            ext_modulus: fq_coeffs(&self.ext_modulus),
            qn_minus_1: self.qn_minus_1.factors().iter().map(|(p, k)| (p.to_string(), *k)).collect(),
            xn_factors: self.xn.factors.iter().map(|(h, m)| (fq_coeffs(h), *m)).collect(),
            generator: self.format_elem(&self.generator),
        }
    }

    /// `gcd(u, q^n − 1) = 1`.
    pub fn coprime_to_order(&self, u: u64) -> bool {
        u.gcd(&self.order) == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_contexts() {
        let f16 = build_ctx(2, 1, 4, 0).unwrap();
        assert_eq!(f16.ext_modulus().coeffs(), &[1, 1, 0, 0, 1]);
        assert_eq!(f16.qn_minus_1().factors(), &[(3, 1), (5, 1)]);
        let f81 = build_ctx(3, 2, 2, 0).unwrap();
        assert_eq!(f81.q(), 9);
        assert_eq!(f81.qn_minus_1().factors(), &[(2, 4), (5, 1)]);
        let f49 = build_ctx(7, 1, 2, 0).unwrap();
        assert_eq!(f49.qn_minus_1().factors(), &[(2, 4), (3, 1)]);
        assert!(matches!(build_ctx(4, 1, 2, 0), Err(FieldError::NotPrime(4))));
        assert!(matches!(build_ctx(2, 1, 65, 0), Err(FieldError::TooLarge)));
    }

    #[test]
    fn orders_in_f16() {
        let f = build_ctx(2, 1, 4, 0).unwrap();
        assert_eq!(f.mult_order(&f.one()).unwrap(), 1);
        assert_eq!(f.mult_order(&f.x()).unwrap(), 15);
        assert!(f.is_primitive(f.generator()));
        assert!(!f.is_primitive(&f.one()));
        assert_eq!(f.mult_order(&f.zero()), Err(FieldError::ZeroElement));
        let f49 = build_ctx(7, 1, 2, 0).unwrap();
        assert_eq!(f49.mult_order(&f49.from_fq(6)).unwrap(), 2);
    }

    #[test]
    fn linearized_examples() {
        let f = build_ctx(3, 1, 4, 0).unwrap();
        let a = f.from_index(47);
        assert_eq!(f.linearized_apply(&PolyFq::x(), &a), f.pow(&a, 3));
        let xn = PolyFq::xn_minus_1(f.fq(), 4);
        assert!(f.linearized_apply(&xn, &a).is_zero());
        let x_minus_1 = PolyFq::new(vec![2, 1]);
        assert!(f.linearized_apply(&x_minus_1, &f.from_fq(2)).is_zero());
        assert_eq!(f.fq_order(&f.from_fq(2)), x_minus_1);
        assert!(f.fq_order(&f.zero()).is_one());
    }

    #[test]
    fn normality_routes_agree_on_f16() {
        let f = build_ctx(2, 1, 4, 0).unwrap();
        for a in f.elements() {
            assert_eq!(f.is_normal(&a), f.is_normal_by_rank(&a), "{a:?}");
        }
        // x is not normal over F_2 for x^4 + x + 1: x + x^2 + x^4 + x^8 = 0.
        assert!(!f.is_normal(&f.x()));
        assert_eq!(f.fq_order(&f.x()).coeffs(), &[1, 1, 1, 1]);
    }

    #[test]
    fn serialization_round_trip() {
        let f = build_ctx(3, 2, 2, 0).unwrap();
        let a = f.from_codes(&[7, 2]);
        let s = f.format_elem(&a);
        assert_eq!(s, "1,2;2,0");
        assert_eq!(f.parse_elem(&s).unwrap(), a);
        assert_eq!(f.parse_elem("1,2").unwrap(), f.from_fq(7));
        assert!(f.parse_elem("3").is_err());
        assert!(f.parse_elem("1;1;1").is_err());
    }
}
