use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::PolyFq;
use super::FieldError;
use crate::arith::{factorize, is_prime_u64};

/// Largest `q` for which a log/antilog table is built when `k > 1`.
const LOG_TABLE_LIMIT: u32 = 1 << 20;
/// Largest `q` for which a full addition table is built when `k > 1`.
const ADD_TABLE_LIMIT: u32 = 1 << 10;

/// Element of `F_q`: base-`p` digits of its coordinates over `F_p`,
/// least significant digit is the constant term.
pub type Code = u32;

/// The base field `F_q = F_p[y]/(g)`.
#[derive(Debug, Clone)]
pub struct Fq {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    add: Vec<u32>,
}

impl Fq {
    pub fn prime(p: u32) -> Result<Fq, FieldError> {
        if !is_prime_u64(p as u64) {
            return Err(FieldError::NotPrime(p as u64));
        }
        Ok(Fq { p, k: 1, q: p, modulus: vec![0, 1], exp: vec![], log: vec![], add: vec![] })
    }

    /// `F_{p^k}` over the first irreducible degree-`k` modulus in the order
    /// selected by `seed` (seed 0 is lexicographic).
    pub fn new(p: u32, k: u32, seed: u64) -> Result<Fq, FieldError> {
        let prime = Fq::prime(p)?;
        if k == 1 {
            return Ok(prime);
        }
        let q = (p as u64)
            .checked_pow(k)
            .filter(|&q| q <= u32::MAX as u64)
            .ok_or(FieldError::TooLarge)? as u32;
        let modulus = first_irreducible(&prime, k as usize, seed);
        Fq::with_modulus(p, k, q, modulus)
    }

    fn with_modulus(p: u32, k: u32, q: u32, modulus: Vec<u32>) -> Result<Fq, FieldError> {
        let mut f = Fq { p, k, q, modulus, exp: vec![], log: vec![], add: vec![] };
        if q <= ADD_TABLE_LIMIT {
            let mut add = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    add[(a * q + b) as usize] = f.add_digits(a, b);
                }
            }
            f.add = add;
        }
        if q <= LOG_TABLE_LIMIT {
            let g = (2..q)
                .find(|&c| f.order_slow(c) == (q - 1) as u64)
                .ok_or(FieldError::Internal("no generator of F_q*"))?;
            let mut exp = vec![0u32; (q - 1) as usize];
            let mut log = vec![0u32; q as usize];
            let mut x = 1u32;
            for (i, slot) in exp.iter_mut().enumerate() {
                *slot = x;
                log[x as usize] = i as u32;
                x = f.mul_slow(x, g);
            }
            f.exp = exp;
            f.log = log;
        }
        Ok(f)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Defining polynomial over `F_p`, low-to-high, monic of degree `k`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn digits(&self, a: Code) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.k as usize);
        let mut a = a;
        for _ in 0..self.k {
            out.push(a % self.p);
            a /= self.p;
        }
        out
    }

    pub fn from_digits(&self, d: &[u32]) -> Code {
        d.iter().rev().fold(0u64, |acc, &x| acc * self.p as u64 + (x % self.p) as u64) as Code
    }

    /// Image of an integer under `Z → F_p ⊂ F_q`.
    pub fn from_int(&self, v: i64) -> Code {
        v.rem_euclid(self.p as i64) as Code
    }

    fn add_digits(&self, a: Code, b: Code) -> Code {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.k {
            let d = (a % self.p + b % self.p) % self.p;
            out += d * place;
            a /= self.p;
            b /= self.p;
            place = place.wrapping_mul(self.p);
        }
        out
    }

    #[inline]
    pub fn add(&self, a: Code, b: Code) -> Code {
        if self.k == 1 {
            let s = a as u64 + b as u64;
            return if s >= self.p as u64 { (s - self.p as u64) as Code } else { s as Code };
        }
        if !self.add.is_empty() {
            return self.add[(a * self.q + b) as usize];
        }
        self.add_digits(a, b)
    }

    #[inline]
    pub fn neg(&self, a: Code) -> Code {
        if self.k == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        if self.p == 2 {
            return a;
        }
        let d: Vec<u32> = self.digits(a).into_iter().map(|x| (self.p - x) % self.p).collect();
        self.from_digits(&d)
    }

    #[inline]
    pub fn sub(&self, a: Code, b: Code) -> Code {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Code, b: Code) -> Code {
        if self.k == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as Code;
        }
        if a == 0 || b == 0 {
            return 0;
        }
        if !self.log.is_empty() {
            let s = self.log[a as usize] as u64 + self.log[b as usize] as u64;
            return self.exp[(s % (self.q as u64 - 1)) as usize];
        }
        self.mul_slow(a, b)
    }

    fn mul_slow(&self, a: Code, b: Code) -> Code {
        let p = self.p as u64;
        let k = self.k as usize;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for i in (k..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..k {
                let m = self.modulus[j] as u64;
                prod[i - k + j] = (prod[i - k + j] + (p - c) * m) % p;
            }
            prod[i] = 0;
        }
        let d: Vec<u32> = prod[..k].iter().map(|&x| x as u32).collect();
        self.from_digits(&d)
    }

    pub fn pow(&self, a: Code, e: u64) -> Code {
        let mut acc = 1;
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Code) -> Code {
        assert!(a != 0, "inverse of zero");
        if !self.log.is_empty() {
            let l = self.log[a as usize];
            return self.exp[((self.q - 1 - l) % (self.q - 1)) as usize];
        }
        self.pow(a, self.q as u64 - 2)
    }

    pub fn div(&self, a: Code, b: Code) -> Code {
        self.mul(a, self.inv(b))
    }

    fn order_slow(&self, a: Code) -> u64 {
        let n = (self.q - 1) as u64;
        let mut order = n;
        for &(l, _) in factorize(n).factors() {
            while order % l == 0 && self.pow_slow(a, order / l) == 1 {
                order /= l;
            }
        }
        order
    }

    fn pow_slow(&self, a: Code, e: u64) -> Code {
        let mut acc = 1;
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }
}

/// First monic irreducible polynomial of degree `deg` over `f`, scanning
/// lower coefficients as a base-`q` counter from a seed-dependent offset.
pub fn first_irreducible(f: &Fq, deg: usize, seed: u64) -> Vec<u32> {
    let q = f.q() as u128;
    let total = q.pow(deg as u32);
    let start = if seed == 0 {
        0
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.gen_range(0..total)
    };
    for i in 0..total {
        let mut code = (start + i) % total;
        let mut coeffs = Vec::with_capacity(deg + 1);
        for _ in 0..deg {
            coeffs.push((code % q) as u32);
            code /= q;
        }
        coeffs.push(1);
        if coeffs[0] == 0 && deg > 1 {
            continue;
        }
        if PolyFq::new(coeffs.clone()).is_irreducible(f) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_field_axioms(f: &Fq) {
        let q = f.q();
        for a in 0..q {
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a)), 1);
            }
            for b in 0..q {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul_slow(a, b));
                assert_eq!(f.add(a, b), f.add_digits(a, b));
            }
        }
    }

    #[test]
    fn prime_fields() {
        let f = Fq::prime(7).unwrap();
        assert_eq!(f.mul(3, 5), 1);
        assert_eq!(f.inv(3), 5);
        assert_eq!(f.neg(2), 5);
        assert_eq!(f.from_int(-1), 6);
        assert!(matches!(Fq::prime(9), Err(FieldError::NotPrime(9))));
    }

    #[test]
    fn extension_fields_are_fields() {
        for (p, k) in [(2, 2), (2, 4), (3, 2), (5, 2), (2, 6), (3, 3)] {
            let f = Fq::new(p, k, 0).unwrap();
            assert_eq!(f.q(), p.pow(k));
            check_field_axioms(&f);
        }
    }

    #[test]
    fn lexicographic_moduli() {
        assert_eq!(Fq::new(3, 2, 0).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(Fq::new(2, 2, 0).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(Fq::new(2, 4, 0).unwrap().modulus(), &[1, 1, 0, 0, 1]);
        let seeded = Fq::new(2, 4, 7).unwrap();
        assert!(PolyFq::new(seeded.modulus().to_vec()).is_irreducible(&Fq::prime(2).unwrap()));
    }

    #[test]
    fn fallback_without_tables() {
        let f = Fq::new(2, 21, 0).unwrap();
        assert!(f.log.is_empty());
        let a = 0x12345;
        assert_eq!(f.mul(a, f.inv(a)), 1);
        assert_eq!(f.pow(a, (1 << 21) - 1), 1);
    }
}
