//! Exact field scalars: residues modulo a prime, or arbitrary-precision rationals.
//!
//! Every geometric computation in this crate runs over one of these two
//! fields. Residues are kept canonical in `[0, p)`; rationals are kept in
//! lowest terms with positive denominator (enforced by `BigRational`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use super::AlgebraError;

/// Which field the computation runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FieldDesc {
    Prime { p: u64 },
    Rational,
}

impl FieldDesc {
    /// Parses `p:<prime>` or `Q`/`q` as used by the CLI.
    pub fn parse(s: &str) -> Result<FieldDesc, AlgebraError> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(FieldDesc::Rational);
        }
        if let Some(rest) = s.strip_prefix("p:") {
            let p: u64 = rest
                .parse()
                .map_err(|_| AlgebraError::BadScalar(s.to_string()))?;
            if !is_prime(p) {
                return Err(AlgebraError::NotPrime(p));
            }
            return Ok(FieldDesc::Prime { p });
        }
        Err(AlgebraError::BadScalar(s.to_string()))
    }

    pub fn zero(&self) -> Scalar {
        match *self {
            FieldDesc::Prime { p } => Scalar::Fp { p, val: 0 },
            FieldDesc::Rational => Scalar::Q(BigRational::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match *self {
            FieldDesc::Prime { p } => {
                let val = n.rem_euclid(p as i64) as u64;
                Scalar::Fp { p, val }
            }
            FieldDesc::Rational => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match *self {
            FieldDesc::Prime { p } => {
                let m = n % BigInt::from(p);
                let m = if m.is_negative() { m + BigInt::from(p) } else { m };
                let val: u64 = m.try_into().expect("reduced residue fits u64");
                Scalar::Fp { p, val }
            }
            FieldDesc::Rational => Scalar::Q(BigRational::from_integer(n.clone())),
        }
    }

    /// Maps an exact rational into the field. Over a prime field the
    /// denominator must be invertible mod p.
    pub fn from_ratio(&self, r: &BigRational) -> Result<Scalar, AlgebraError> {
        match *self {
            FieldDesc::Rational => Ok(Scalar::Q(r.clone())),
            FieldDesc::Prime { .. } => {
                let num = self.from_bigint(r.numer());
                let den = self.from_bigint(r.denom());
                if den.is_zero() {
                    return Err(AlgebraError::NonInvertibleDenominator(r.denom().to_string()));
                }
                Ok(num.mul(&den.inv().expect("nonzero denominator")))
            }
        }
    }

    /// Parses the canonical string forms: decimal residues for prime fields,
    /// `a` or `a/b` for rationals.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar, AlgebraError> {
        let s = s.trim();
        match *self {
            FieldDesc::Prime { .. } => {
                let n: i64 = s
                    .parse()
                    .map_err(|_| AlgebraError::BadScalar(s.to_string()))?;
                Ok(self.from_i64(n))
            }
            FieldDesc::Rational => {
                let (num, den) = match s.split_once('/') {
                    Some((a, b)) => (a, b),
                    None => (s, "1"),
                };
                let num: BigInt = num
                    .parse()
                    .map_err(|_| AlgebraError::BadScalar(s.to_string()))?;
                let den: BigInt = den
                    .parse()
                    .map_err(|_| AlgebraError::BadScalar(s.to_string()))?;
                if den.is_zero() {
                    return Err(AlgebraError::BadScalar(s.to_string()));
                }
                Ok(Scalar::Q(BigRational::new(num, den)))
            }
        }
    }
}

/// An exact element of the configured field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Fp { p: u64, val: u64 },
    Q(BigRational),
}

impl Scalar {
    pub fn field(&self) -> FieldDesc {
        match self {
            Scalar::Fp { p, .. } => FieldDesc::Prime { p: *p },
            Scalar::Q(_) => FieldDesc::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Fp { val, .. } => *val == 0,
            Scalar::Q(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Fp { val, .. } => *val == 1,
            Scalar::Q(r) => r.is_one(),
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Fp { p, val: a }, Scalar::Fp { p: q, val: b }) => {
                assert_eq!(p, q, "mixed moduli");
                Scalar::Fp { p: *p, val: addmod(*a, *b, *p) }
            }
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            _ => panic!("mixed fields"),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Fp { p, val: a }, Scalar::Fp { p: q, val: b }) => {
                assert_eq!(p, q, "mixed moduli");
                Scalar::Fp { p: *p, val: mulmod(*a, *b, *p) }
            }
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            _ => panic!("mixed fields"),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Fp { p, val } => Scalar::Fp {
                p: *p,
                val: if *val == 0 { 0 } else { p - val },
            },
            Scalar::Q(r) => Scalar::Q(-r),
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Fp { p, val } => Scalar::Fp { p: *p, val: invmod(*val, *p) },
            Scalar::Q(r) => Scalar::Q(r.recip()),
        })
    }

    pub fn div(&self, other: &Scalar) -> Option<Scalar> {
        other.inv().map(|i| self.mul(&i))
    }

    /// The exact rational value; only meaningful over Q.
    pub fn as_ratio(&self) -> Option<&BigRational> {
        match self {
            Scalar::Q(r) => Some(r),
            Scalar::Fp { .. } => None,
        }
    }

    /// Canonical string form used in every JSON interface.
    pub fn canonical_string(&self) -> String {
        match self {
            Scalar::Fp { val, .. } => val.to_string(),
            Scalar::Q(r) => {
                if r.denom().is_one() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_string())
    }
}

fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = (a as u128 + b as u128) % p as u128;
    s as u64
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn invmod(a: u64, p: u64) -> u64 {
    // extended Euclid on signed 128-bit; p is prime and a != 0 mod p
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "not invertible: gcd({a}, {p}) != 1");
    t.rem_euclid(p as i128) as u64
}

/// Deterministic Miller–Rabin, valid for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_residues() {
        let f = FieldDesc::Prime { p: 7 };
        assert_eq!(f.from_i64(-1).canonical_string(), "6");
        assert_eq!(f.from_i64(14).canonical_string(), "0");
        let x = f.from_i64(3);
        assert_eq!(x.inv().unwrap().mul(&x), f.one());
    }

    #[test]
    fn rational_lowest_terms() {
        let f = FieldDesc::Rational;
        let x = f.parse_scalar("4/6").unwrap();
        assert_eq!(x.canonical_string(), "2/3");
        let y = f.parse_scalar("-3/-6").unwrap();
        assert_eq!(y.canonical_string(), "1/2");
        assert_eq!(f.parse_scalar("5").unwrap().canonical_string(), "5");
    }

    #[test]
    fn field_axioms_spot_checks() {
        for f in [FieldDesc::Prime { p: 1009 }, FieldDesc::Rational] {
            let a = f.from_i64(17);
            let b = f.from_i64(-5);
            let c = f.from_i64(8);
            assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
            assert_eq!(a.sub(&a), f.zero());
            assert_eq!(a.div(&a).unwrap(), f.one());
            assert!(f.zero().inv().is_none());
        }
    }

    #[test]
    fn ratio_reduction_mod_p() {
        let f = FieldDesc::Prime { p: 1009 };
        let r = BigRational::new(BigInt::from(1), BigInt::from(2));
        let half = f.from_ratio(&r).unwrap();
        assert_eq!(half.add(&half), f.one());
    }

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(is_prime(1009));
        assert!(!is_prime(1));
        assert!(!is_prime(1000003 * 3));
        assert!(is_prime(1_000_003));
    }
}
