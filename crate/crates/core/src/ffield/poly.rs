use std::fmt;

use num_bigint::BigUint;
use serde::Serialize;

use super::fq::{Code, Fq};
use crate::arith::factorize;

/// Polynomial over `F_q`, coefficients low-to-high with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PolyFq {
    coeffs: Vec<Code>,
}

impl fmt::Debug for PolyFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

impl PolyFq {
    pub fn new(mut coeffs: Vec<Code>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PolyFq { coeffs }
    }

    pub fn zero() -> Self {
        PolyFq { coeffs: vec![] }
    }

    pub fn one() -> Self {
        PolyFq { coeffs: vec![1] }
    }

    pub fn x() -> Self {
        PolyFq { coeffs: vec![0, 1] }
    }

    pub fn monomial(c: Code, d: usize) -> Self {
        let mut v = vec![0; d + 1];
        v[d] = c;
        PolyFq::new(v)
    }

    pub fn xn_minus_1(f: &Fq, n: usize) -> Self {
        let mut v = vec![0; n + 1];
        v[0] = f.neg(1);
        v[n] = 1;
        PolyFq::new(v)
    }

    pub fn coeffs(&self) -> &[Code] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Code {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().expect("degree of the zero polynomial")
    }

    pub fn lead(&self) -> Code {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == 1
    }

    pub fn add(&self, other: &Self, f: &Fq) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        PolyFq::new((0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Self, f: &Fq) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        PolyFq::new((0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn scale(&self, c: Code, f: &Fq) -> Self {
        PolyFq::new(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Self, f: &Fq) -> Self {
        if self.is_zero() || other.is_zero() {
            return PolyFq::zero();
        }
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        PolyFq::new(out)
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn divrem(&self, d: &Self, f: &Fq) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.deg();
        if self.coeffs.len() <= dd {
            return (PolyFq::zero(), self.clone());
        }
        let inv_lead = f.inv(d.lead());
        let mut r = self.coeffs.clone();
        let mut quot = vec![0; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = f.mul(r[i], inv_lead);
            if c == 0 {
                continue;
            }
            quot[i - dd] = c;
            for (j, &dj) in d.coeffs.iter().enumerate() {
                r[i - dd + j] = f.sub(r[i - dd + j], f.mul(c, dj));
            }
        }
        r.truncate(dd);
        (PolyFq::new(quot), PolyFq::new(r))
    }

    pub fn rem(&self, d: &Self, f: &Fq) -> Self {
        self.divrem(d, f).1
    }

    /// Exact quotient; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self, f: &Fq) -> Option<Self> {
        let (q, r) = self.divrem(d, f);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self, f: &Fq) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(f.inv(self.lead()), f)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self, f: &Fq) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn mul_mod(&self, other: &Self, m: &Self, f: &Fq) -> Self {
        self.mul(other, f).rem(m, f)
    }

    pub fn pow_mod(&self, e: &BigUint, m: &Self, f: &Fq) -> Self {
        let mut acc = PolyFq::one().rem(m, f);
        let base = self.rem(m, f);
        for i in (0..e.bits()).rev() {
            acc = acc.mul_mod(&acc, m, f);
            if e.bit(i) {
                acc = acc.mul_mod(&base, m, f);
            }
        }
        acc
    }

    pub fn pow_mod_u64(&self, e: u64, m: &Self, f: &Fq) -> Self {
        self.pow_mod(&BigUint::from(e), m, f)
    }

    /// Evaluates at a point of `F_q` by Horner's rule.
    pub fn eval(&self, x: Code, f: &Fq) -> Code {
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Rabin's test: `x^{q^d} ≡ x` and `gcd(x^{q^{d/ℓ}} − x, self) = 1` for primes `ℓ | d`.
    pub fn is_irreducible(&self, f: &Fq) -> bool {
        let d = match self.degree() {
            None | Some(0) => return false,
            Some(1) => return true,
            Some(d) => d,
        };
        let m = self.monic(f);
        let q = BigUint::from(f.q());
        let x = PolyFq::x();
        let mut powers = Vec::with_capacity(d + 1);
        powers.push(x.clone());
        for i in 1..=d {
            let next = powers[i - 1].pow_mod(&q, &m, f);
            powers.push(next);
        }
        if powers[d] != x.rem(&m, f) {
            return false;
        }
        for &(l, _) in factorize(d as u64).factors() {
            let h = powers[d / l as usize].sub(&x, f);
            if !h.gcd(&m, f).is_one() {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_round_trip() {
        let f = Fq::prime(5).unwrap();
        let a = PolyFq::new(vec![1, 2, 3, 4, 1]);
        let b = PolyFq::new(vec![2, 0, 3]);
        let (q, r) = a.divrem(&b, &f);
        assert_eq!(q.mul(&b, &f).add(&r, &f), a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn gcd_of_shared_factor() {
        let f = Fq::prime(3).unwrap();
        let common = PolyFq::new(vec![1, 0, 1]);
        let a = common.mul(&PolyFq::new(vec![1, 1]), &f);
        let b = common.mul(&PolyFq::new(vec![2, 1]), &f);
        assert_eq!(a.gcd(&b, &f), common);
    }

    #[test]
    fn irreducibility_counts_match_necklace_formula() {
        // Number of monic irreducibles of degree d over F_q: (1/d) Σ μ(d/e) q^e.
        for (q, d, expect) in [(2u32, 4usize, 3usize), (3, 2, 3), (2, 6, 9), (5, 3, 40)] {
            let f = Fq::prime(q).unwrap();
            let total = (q as usize).pow(d as u32);
            let mut count = 0;
            for code in 0..total {
                let mut c = code;
                let mut coeffs = Vec::new();
                for _ in 0..d {
                    coeffs.push((c % q as usize) as u32);
                    c /= q as usize;
                }
                coeffs.push(1);
                if PolyFq::new(coeffs).is_irreducible(&f) {
                    count += 1;
                }
            }
            assert_eq!(count, expect, "q={q} d={d}");
        }
    }

    #[test]
    fn irreducible_over_extension() {
        let f4 = Fq::new(2, 2, 0).unwrap();
        // x^2 + x + 1 splits over F_4; x^2 + x + w does not.
        assert!(!PolyFq::new(vec![1, 1, 1]).is_irreducible(&f4));
        assert!(PolyFq::new(vec![2, 1, 1]).is_irreducible(&f4));
        assert_eq!(PolyFq::xn_minus_1(&f4, 3).eval(2, &f4), 0);
    }
}
