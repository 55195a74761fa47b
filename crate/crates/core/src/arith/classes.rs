use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::bound::{BoundError, BoundValue};
use super::primes::{is_prime_u64, small_primes};

/// Residue restriction on a prime sequence; `modulus = 1` admits every prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeForm {
    pub modulus: u64,
    pub residue: u64,
}

impl PrimeForm {
    pub const ANY: PrimeForm = PrimeForm { modulus: 1, residue: 0 };

    pub fn new(modulus: u64, residue: u64) -> Self {
        assert!(modulus >= 1);
        PrimeForm { modulus, residue: residue % modulus }
    }

    pub fn admits(&self, p: u64) -> bool {
        p % self.modulus == self.residue
    }
}

/// Which primes contribute to `A_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeFilter {
    All,
    Form(PrimeForm),
}

impl PrimeFilter {
    fn admits(&self, p: u64) -> bool {
        match self {
            PrimeFilter::All => true,
            PrimeFilter::Form(f) => f.admits(p),
        }
    }
}

/// Primes `≥ start` in the given class, ascending.
pub fn primes_in_class(start: u64, form: PrimeForm) -> impl Iterator<Item = u64> {
    let from_table = small_primes().iter().copied().filter(move |&p| p >= start);
    let last = *small_primes().last().unwrap();
    let beyond = (last.max(start) + 1..).filter(|&n| is_prime_u64(n));
    from_table.chain(beyond).filter(move |&p| form.admits(p))
}

/// Product and exact inverse sum of the first `r` primes `≥ start` in `form`.
pub fn prime_class(start: u64, form: PrimeForm, r: usize) -> (BigUint, BigRational) {
    let mut prod = BigUint::one();
    let mut sum = BigRational::zero();
    for p in primes_in_class(start, form).take(r) {
        prod *= p;
        sum += BigRational::new(BigInt::one(), BigInt::from(p));
    }
    (prod, sum)
}

/// Largest `r` with `base · P(start, r) ≤ bound`, where `P` is the class product.
pub fn max_class_count(start: u64, form: PrimeForm, base: &BigUint, bound: &BigRational) -> usize {
    let mut prod = BigRational::from_integer(BigInt::from(base.clone()));
    if &prod > bound {
        return 0;
    }
    let mut r = 0;
    for p in primes_in_class(start, form) {
        prod *= BigRational::from_integer(BigInt::from(p));
        if &prod > bound {
            return r;
        }
        r += 1;
    }
    unreachable!()
}

/// First `r` primes.
pub fn nth_prime_list(r: usize) -> Vec<u64> {
    primes_in_class(2, PrimeForm::ANY).take(r).collect()
}

/// `P_r`, the product of the first `r` primes.
pub fn primorial(r: usize) -> BigUint {
    nth_prime_list(r).into_iter().fold(BigUint::one(), |acc, p| acc * p)
}

pub fn primes_below(x: u64) -> Vec<u64> {
    primes_in_class(2, PrimeForm::ANY).take_while(|&p| p < x).collect()
}

/// `A_t = ∏_{℘ < 2^t} 2 / ℘^{1/t}` as an outward-rounded interval.
///
/// `eight_adjust` replaces the factor for `℘ = 2` by `2 / 8^{1/t}`;
/// `exclude_two` drops it.
pub fn a_t_constant(
    t: &BigRational,
    filter: PrimeFilter,
    exclude_two: bool,
    eight_adjust: bool,
    prec: u32,
) -> Result<BoundValue, BoundError> {
    assert!(*t > BigRational::one(), "A_t requires t > 1");
    let tb = BoundValue::exact(t.clone()).with_precision(prec);
    let inv_t = BoundValue::from_int(1).with_precision(prec).div(&tb)?;
    let two = BoundValue::from_int(2).with_precision(prec);
    let limit = two.pow(&tb)?;
    let mut acc = BoundValue::from_int(1).with_precision(prec);
    for p in primes_in_class(2, PrimeForm::ANY) {
        let pb = BoundValue::from_int(p as i64).with_precision(prec);
        match pb.try_ge(&limit) {
            Some(true) => break,
            Some(false) => {}
            None => return Err(BoundError::Undecided(prec)),
        }
        if !filter.admits(p) {
            continue;
        }
        if p == 2 {
            if exclude_two {
                continue;
            }
            let base = if eight_adjust { BoundValue::from_int(8).with_precision(prec) } else { pb };
            acc = acc.mul(&two.div(&base.pow(&inv_t)?)?);
        } else {
            acc = acc.mul(&two.div(&pb.pow(&inv_t)?)?);
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{decimal, ratio, to_f64};

    #[test]
    fn class_products() {
        let (p, s) = prime_class(13, PrimeForm::new(6, 1), 2);
        assert_eq!(p, BigUint::from(247u32));
        assert_eq!(s, ratio(32, 247));
        let (p, s) = prime_class(353, PrimeForm::ANY, 0);
        assert!(p.is_one() && s.is_zero());
        let (p, s) = prime_class(11, PrimeForm::new(10, 1), 3);
        assert_eq!(p, BigUint::from(11u32 * 31 * 41));
        assert_eq!(s, ratio(1, 11) + ratio(1, 31) + ratio(1, 41));
    }

    #[test]
    fn primorials() {
        assert_eq!(primorial(3), BigUint::from(30u32));
        assert_eq!(primorial(5), BigUint::from(2310u32));
        let p149 = BigRational::from_integer(primorial(149).into());
        assert!(p149 < decimal("7.51e358"));
        assert!(BigRational::from_integer(primorial(150).into()) > decimal("7.51e358"));
        assert_eq!(primes_below(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn class_counts() {
        assert_eq!(max_class_count(2, PrimeForm::ANY, &BigUint::one(), &ratio(30, 1)), 3);
        assert_eq!(max_class_count(2, PrimeForm::ANY, &BigUint::one(), &ratio(29, 1)), 2);
        assert_eq!(max_class_count(2, PrimeForm::ANY, &BigUint::from(31u32), &ratio(30, 1)), 0);
    }

    #[test]
    fn a_t_single_factor() {
        let a = a_t_constant(&ratio(101, 100), PrimeFilter::All, false, false, 128).unwrap();
        let expect = 2.0 / 2f64.powf(1.0 / 1.01);
        assert!((a.midpoint_f64() - expect).abs() < 1e-15);
        assert!(a.lo() <= a.hi());
    }

    #[test]
    fn a_t_matches_direct_product() {
        let t = decimal("4.53");
        let a = a_t_constant(&t, PrimeFilter::All, false, false, 200).unwrap();
        let direct: f64 = [2.0f64, 3., 5., 7., 11., 13., 17., 19., 23.]
            .iter()
            .map(|p| 2.0 / p.powf(1.0 / 4.53))
            .product();
        assert!((a.midpoint_f64() / direct - 1.0).abs() < 1e-12);
        let e = a_t_constant(&decimal("5.5"), PrimeFilter::All, false, true, 200).unwrap();
        let plain = a_t_constant(&decimal("5.5"), PrimeFilter::All, false, false, 200).unwrap();
        let ratio_f = to_f64(e.lo()) / to_f64(plain.lo());
        assert!((ratio_f - 0.25f64.powf(1.0 / 5.5)).abs() < 1e-12);
    }
}
