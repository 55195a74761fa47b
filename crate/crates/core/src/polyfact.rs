//! Structure of `xⁿ − 1` over `F_q`: degree profile, explicit factorization,
//! polynomial totient and square-free divisor counts.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{big_pow, divisors, factorize, multiplicative_order_mod, prime_power_decompose};
use crate::ffield::{Fq, PolyFq};

/// Degrees of the irreducible factors of `xⁿ − 1` over `F_q`, without
/// factoring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeProfile {
    pub q: u64,
    pub n: u64,
    pub n_prime: u64,
    pub p_power: u64,
    /// `(degree, number of distinct factors of that degree)`, ascending.
    pub counts: Vec<(u64, u64)>,
}

impl DegreeProfile {
    pub fn distinct(&self) -> u64 {
        self.counts.iter().map(|&(_, c)| c).sum()
    }

    /// Degrees of the distinct factors, each repeated by its count, ascending.
    pub fn degrees(&self) -> Vec<u64> {
        self.counts.iter().flat_map(|&(d, c)| std::iter::repeat_n(d, c as usize)).collect()
    }

    /// `W(xⁿ − 1)`.
    pub fn w(&self) -> BigUint {
        BigUint::one() << self.distinct() as usize
    }

    /// `Φ(xⁿ − 1)`, the number of normal elements of `F_{q^n}` over `F_q`.
    pub fn phi(&self) -> BigUint {
        let pairs: Vec<(u64, u64)> = self.degrees().into_iter().map(|d| (d, self.p_power)).collect();
        poly_phi(self.q, &pairs)
    }
}

pub fn degree_profile(q: u64, n: u64) -> DegreeProfile {
    let (p, _) = prime_power_decompose(q).expect("q must be a prime power");
    assert!(n >= 1);
    let mut n_prime = n;
    let mut p_power = 1;
    while n_prime % p == 0 {
        n_prime /= p;
        p_power *= p;
    }
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for d in divisors(n_prime) {
        let o = multiplicative_order_mod(q % d, d);
        let phi = factorize(d).euler_phi();
        *counts.entry(o).or_insert(0) += phi / o;
    }
    DegreeProfile { q, n, n_prime, p_power, counts: counts.into_iter().collect() }
}

/// Explicit factorization of `xⁿ − 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XnFactorization {
    pub q: u64,
    pub n: u64,
    pub n_prime: u64,
    pub p_power: u64,
    /// Distinct monic irreducible factors with multiplicity, by degree then coefficients.
    pub factors: Vec<(PolyFq, u64)>,
}

impl XnFactorization {
    pub fn distinct(&self) -> usize {
        self.factors.len()
    }

    pub fn degree_counts(&self) -> Vec<(u64, u64)> {
        let mut m: BTreeMap<u64, u64> = BTreeMap::new();
        for (h, _) in &self.factors {
            *m.entry(h.deg() as u64).or_insert(0) += 1;
        }
        m.into_iter().collect()
    }

    pub fn w(&self) -> BigUint {
        BigUint::one() << self.factors.len()
    }

    pub fn phi(&self) -> BigUint {
        let pairs: Vec<(u64, u64)> = self.factors.iter().map(|(h, k)| (h.deg() as u64, *k)).collect();
        poly_phi(self.q, &pairs)
    }

    pub fn product(&self, f: &Fq) -> PolyFq {
        let mut acc = PolyFq::one();
        for (h, k) in &self.factors {
            for _ in 0..*k {
                acc = acc.mul(h, f);
            }
        }
        acc
    }
}

/// Factors `xⁿ − 1` over `f` by splitting each cyclotomic piece `Φ_d`, `d | n'`,
/// into its `φ(d)/ord_d(q)` equal-degree factors.
pub fn factor_xn_minus_1(f: &Fq, n: u64, seed: u64) -> XnFactorization {
    let q = f.q() as u64;
    let profile = degree_profile(q, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cyclo: BTreeMap<u64, PolyFq> = BTreeMap::new();
    let mut factors = Vec::new();
    for d in divisors(profile.n_prime) {
        let mut phi_d = PolyFq::xn_minus_1(f, d as usize);
        for (&e, pe) in &cyclo {
            if d % e == 0 {
                phi_d = phi_d.div_exact(pe, f).expect("cyclotomic division is exact");
            }
        }
        cyclo.insert(d, phi_d.clone());
        let o = multiplicative_order_mod(q % d, d) as usize;
        for h in equal_degree_split(&phi_d, o, f, &mut rng) {
            factors.push((h, profile.p_power));
        }
    }
    factors.sort_by(|a, b| (a.0.deg(), &a.0).cmp(&(b.0.deg(), &b.0)));
    let out = XnFactorization { q, n, n_prime: profile.n_prime, p_power: profile.p_power, factors };
    assert_eq!(out.degree_counts(), profile.counts, "factorization disagrees with the degree profile");
    assert_eq!(out.product(f), PolyFq::xn_minus_1(f, n as usize), "factor product is not xⁿ − 1");
    out
}

fn random_poly(deg_below: usize, f: &Fq, rng: &mut ChaCha8Rng) -> PolyFq {
    PolyFq::new((0..deg_below).map(|_| rng.gen_range(0..f.q())).collect())
}

/// Cantor–Zassenhaus splitting of a squarefree product of degree-`o` irreducibles.
fn equal_degree_split(g: &PolyFq, o: usize, f: &Fq, rng: &mut ChaCha8Rng) -> Vec<PolyFq> {
    let d = g.deg();
    if d == o {
        return vec![g.monic(f)];
    }
    let q = f.q() as u64;
    let half_exp = (big_pow(q, o as u32) - 1u32) >> 1usize;
    let two = BigUint::from(2u32);
    loop {
        let a = random_poly(d, f, rng);
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let b = if q % 2 == 1 {
            a.pow_mod(&half_exp, g, f).sub(&PolyFq::one(), f)
        } else {
            // Absolute trace to F_2 of a in F_q[x]/(g).
            let bits = (f.k() as usize) * o;
            let mut t = a.rem(g, f);
            let mut acc = t.clone();
            for _ in 1..bits {
                t = t.pow_mod(&two, g, f);
                acc = acc.add(&t, f);
            }
            acc
        };
        let h = b.gcd(g, f);
        if let Some(hd) = h.degree() {
            if hd > 0 && hd < d {
                let other = g.div_exact(&h, f).expect("gcd divides");
                let mut out = equal_degree_split(&h, o, f, rng);
                out.extend(equal_degree_split(&other, o, f, rng));
                return out;
            }
        }
    }
}

/// `Φ(f) = ∏ (q^{d·k} − q^{d·(k−1)})` over factors of degree `d` and multiplicity `k`.
pub fn poly_phi(q: u64, factors: &[(u64, u64)]) -> BigUint {
    factors.iter().fold(BigUint::one(), |acc, &(d, k)| {
        acc * (big_pow(q, (d * k) as u32) - big_pow(q, (d * (k - 1)) as u32))
    })
}

/// `2^{distinct}` for a factored polynomial.
pub fn w_poly(distinct: usize) -> BigUint {
    BigUint::one() << distinct
}

/// The five `(a, b)` with `#{irreducible factors of xⁿ − 1} ≤ n/a + b`.
pub fn factor_count_pairs(q: u64) -> [(BigRational, BigRational); 5] {
    let q = BigInt::from(q);
    let r = |num: BigInt, den: i64| BigRational::new(num, BigInt::from(den));
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    let q2 = &q * &q;
    let q3 = &q2 * &q;
    let q4 = &q3 * &q;
    [
        (int(1), int(0)),
        (int(2), r(&q - 1, 2)),
        (int(3), r(&q2 + 3 * &q - 4, 6)),
        (int(4), r(&q3 + 3 * &q2 + 5 * &q - 9, 12)),
        (int(5), r(3 * &q4 + 8 * &q3 + 15 * &q2 + 22 * &q - 48, 60)),
    ]
}
