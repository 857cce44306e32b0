//! Software binary floating point with a configurable mantissa width.
//!
//! Iterative solvers target irrational fixed points, so exact rationals blow
//! up; hardware doubles cap the achievable residual. This type keeps a
//! `BigInt` mantissa rounded to `prec` bits (round-to-nearest, ties away from
//! zero) and is deterministic across platforms. Default width is 128 bits.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

pub const DEFAULT_PREC: u32 = 128;

/// `mant * 2^exp`, with `|mant| < 2^prec` after normalization.
#[derive(Clone, Debug)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

impl BigFloat {
    pub fn zero(prec: u32) -> Self {
        BigFloat { mant: BigInt::zero(), exp: 0, prec }
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        BigFloat { mant: BigInt::from(n), exp: 0, prec }.normalized()
    }

    pub fn from_bigint(n: &BigInt, prec: u32) -> Self {
        BigFloat { mant: n.clone(), exp: 0, prec }.normalized()
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        assert!(x.is_finite());
        if x == 0.0 {
            return BigFloat::zero(prec);
        }
        let (mant, e) = frexp(x);
        // mant * 2^53 is an integer for finite doubles
        let m = (mant * (1u64 << 53) as f64) as i64;
        BigFloat { mant: BigInt::from(m), exp: e as i64 - 53, prec }.normalized()
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        if r.is_zero() {
            return BigFloat::zero(prec);
        }
        let num = r.numer();
        let den = r.denom();
        let shift = (prec as i64 + 2 + den.bits() as i64 - num.bits() as i64).max(0) as u64;
        let q = div_rounded(&(num << shift), den);
        BigFloat { mant: q, exp: -(shift as i64), prec }.normalized()
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    fn normalized(mut self) -> Self {
        if self.mant.is_zero() {
            self.exp = 0;
            return self;
        }
        let bits = self.mant.bits();
        if bits > self.prec as u64 {
            let shift = bits - self.prec as u64;
            self.mant = shift_rounded(&self.mant, shift);
            self.exp += shift as i64;
            // rounding can carry into one extra bit
            if self.mant.bits() > self.prec as u64 {
                self.mant = shift_rounded(&self.mant, 1);
                self.exp += 1;
            }
        }
        self
    }

    pub fn neg(&self) -> Self {
        BigFloat { mant: -&self.mant, exp: self.exp, prec: self.prec }
    }

    pub fn abs(&self) -> Self {
        BigFloat { mant: self.mant.abs(), exp: self.exp, prec: self.prec }
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        if self.is_zero() {
            let mut r = other.clone();
            r.prec = prec;
            return r.normalized();
        }
        if other.is_zero() {
            let mut r = self.clone();
            r.prec = prec;
            return r.normalized();
        }
        let (hi, lo) = if self.exp >= other.exp { (self, other) } else { (other, self) };
        let gap = hi.exp - lo.exp;
        // lo is negligible only when its top bit falls below the ulp of the
        // rounded result: exp_lo + bits(lo) < exp_hi + bits(hi) - prec, with
        // a safety margin
        if gap + hi.mant.bits() as i64 - lo.mant.bits() as i64 > prec as i64 + 4 {
            let mut r = hi.clone();
            r.prec = prec;
            return r.normalized();
        }
        let mant = (&hi.mant << gap as u64) + &lo.mant;
        BigFloat { mant, exp: lo.exp, prec }.normalized()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        BigFloat { mant: &self.mant * &other.mant, exp: self.exp + other.exp, prec }.normalized()
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "division by zero");
        let prec = self.prec.max(other.prec);
        if self.is_zero() {
            return BigFloat::zero(prec);
        }
        let shift =
            (prec as i64 + 2 + other.mant.bits() as i64 - self.mant.bits() as i64).max(0) as u64;
        let q = div_rounded(&(&self.mant << shift), &other.mant);
        BigFloat { mant: q, exp: self.exp - other.exp - shift as i64, prec }.normalized()
    }

    pub fn mul_i64(&self, n: i64) -> Self {
        BigFloat { mant: &self.mant * n, exp: self.exp, prec: self.prec }.normalized()
    }

    pub fn div_u64(&self, n: u64) -> Self {
        self.div(&BigFloat::from_i64(n as i64, self.prec))
    }

    pub fn powi(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = BigFloat::from_i64(1, self.prec);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Positive n-th root by Newton iteration at slightly raised precision.
    pub fn nth_root(&self, n: u32) -> Self {
        assert!(n >= 1);
        assert!(!self.is_negative(), "root of a negative value");
        if self.is_zero() || n == 1 {
            return self.clone();
        }
        let work = self.prec + 32;
        let a = BigFloat { mant: self.mant.clone(), exp: self.exp, prec: work };
        let mut x = BigFloat::from_f64(self.to_f64().powf(1.0 / n as f64), work);
        if x.is_zero() {
            x = BigFloat::from_i64(1, work);
        }
        let nf = BigFloat::from_i64(n as i64, work);
        let nm1 = BigFloat::from_i64(n as i64 - 1, work);
        for _ in 0..64 {
            let x_next = nm1.mul(&x).add(&a.div(&x.powi(n - 1))).div(&nf);
            let done = x_next.sub(&x).abs().cmp(&x.abs().scale_exp(-(self.prec as i64 + 4)))
                == Ordering::Less;
            x = x_next;
            if done {
                break;
            }
        }
        let mut out = x.normalized();
        out.prec = self.prec;
        out.normalized()
    }

    pub fn sqrt(&self) -> Self {
        self.nth_root(2)
    }

    /// Multiplies by `2^k` exactly.
    pub fn scale_exp(&self, k: i64) -> Self {
        BigFloat { mant: self.mant.clone(), exp: self.exp + k, prec: self.prec }
    }

    // representations are not unique (trailing mantissa zeros), so Ord/Eq
    // derives would lie; this inherent cmp is the comparison entry point
    #[allow(clippy::should_implement_trait)]
    pub fn cmp(&self, other: &Self) -> Ordering {
        let sign = |f: &BigFloat| f.mant.sign();
        match (sign(self), sign(other)) {
            (Sign::Minus, Sign::NoSign | Sign::Plus) => return Ordering::Less,
            (Sign::NoSign, Sign::Plus) => return Ordering::Less,
            (Sign::Plus, Sign::NoSign | Sign::Minus) => return Ordering::Greater,
            (Sign::NoSign, Sign::Minus) => return Ordering::Greater,
            (Sign::NoSign, Sign::NoSign) => return Ordering::Equal,
            _ => {}
        }
        // same nonzero sign: compare magnitudes via (bitlen + exp) windows
        let mag_hi = |f: &BigFloat| f.mant.bits() as i64 + f.exp;
        let (a, b) = (mag_hi(self), mag_hi(other));
        let positive = self.mant.is_positive();
        if a != b {
            let mag_cmp = a.cmp(&b);
            return if positive { mag_cmp } else { mag_cmp.reverse() };
        }
        match self.sub(other).mant.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    pub fn max(&self, other: &Self) -> Self {
        if self.cmp(other) == Ordering::Less { other.clone() } else { self.clone() }
    }

    pub fn min(&self, other: &Self) -> Self {
        if self.cmp(other) == Ordering::Greater { other.clone() } else { self.clone() }
    }

    /// Exact rational value of this float.
    pub fn to_rational(&self) -> BigRational {
        let two = BigInt::from(2);
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant * two.pow(self.exp as u32))
        } else {
            BigRational::new(self.mant.clone(), two.pow((-self.exp) as u32))
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let drop = (bits - 63).max(0);
        let head = (&self.mant >> drop as u64).to_i64().expect("63-bit head fits i64");
        head as f64 * 2f64.powi((self.exp + drop) as i32)
    }
}

fn frexp(x: f64) -> (f64, i32) {
    let mut e = 0i32;
    let mut m = x;
    while m.abs() >= 1.0 {
        m /= 2.0;
        e += 1;
    }
    while m.abs() < 0.5 {
        m *= 2.0;
        e -= 1;
    }
    (m, e)
}

/// `n / 2^shift` with round-to-nearest, ties away from zero.
fn shift_rounded(n: &BigInt, shift: u64) -> BigInt {
    if shift == 0 {
        return n.clone();
    }
    let half = BigInt::from(1) << (shift - 1);
    if n.is_negative() {
        -((&-n + half) >> shift)
    } else {
        (n + half) >> shift
    }
}

/// `a / b` with round-to-nearest, ties away from zero.
fn div_rounded(a: &BigInt, b: &BigInt) -> BigInt {
    let sign = if (a.is_negative()) ^ (b.is_negative()) { -1 } else { 1 };
    let (aa, bb) = (a.abs(), b.abs());
    let q = (&aa * 2u32 + &bb) / (&bb * 2u32);
    q * sign
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn bf(x: f64) -> BigFloat {
        BigFloat::from_f64(x, DEFAULT_PREC)
    }

    #[test]
    fn round_trips() {
        for x in [0.0, 1.0, -2.5, 1e-9, 12345.678] {
            assert_eq!(bf(x).to_f64(), x);
        }
        let r = BigRational::new(BigInt::from(1), BigInt::from(3));
        let f = BigFloat::from_rational(&r, 128);
        let back = f.to_rational();
        let err = (&back - &r).abs();
        assert!(err < BigRational::new(BigInt::from(1), BigInt::from(2).pow(120)));
    }

    #[test]
    fn arithmetic() {
        let a = bf(1.5);
        let b = bf(2.25);
        assert_eq!(a.add(&b).to_f64(), 3.75);
        assert_eq!(a.mul(&b).to_f64(), 3.375);
        assert_eq!(b.div(&a).to_f64(), 1.5);
        assert_eq!(a.sub(&b).to_f64(), -0.75);
        assert_eq!(a.cmp(&b), Ordering::Less);
        assert_eq!(bf(-1.0).cmp(&bf(1.0)), Ordering::Less);
        assert_eq!(bf(0.25).cmp(&bf(0.25)), Ordering::Equal);
    }

    #[test]
    fn small_mantissa_minus_wide_mantissa() {
        // 1 - 1/4000 must not collapse to 1: the 1-bit mantissa of the unit
        // must not hide the wide mantissa of the quotient
        let one = BigFloat::from_i64(1, 128);
        let q = one.div(&BigFloat::from_i64(4000, 128));
        let decay = one.sub(&q);
        assert!(decay.cmp(&one) == Ordering::Less);
        let expect = 1.0 - 1.0 / 4000.0;
        assert!((decay.to_f64() - expect).abs() < 1e-15);
    }

    #[test]
    fn precision_beyond_f64() {
        // (1 + 2^-100)^2 differs from 1 by ~2^-99, invisible to f64
        let one = BigFloat::from_i64(1, 192);
        let eps = one.scale_exp(-100);
        let x = one.add(&eps);
        let diff = x.mul(&x).sub(&one);
        assert!(diff.is_positive());
        let expected = eps.mul_i64(2);
        let rel = diff.sub(&expected).abs().div(&expected);
        assert!(rel.to_f64() < 1e-20);
    }

    #[test]
    fn roots() {
        let ten_thirds = BigFloat::from_rational(
            &BigRational::new(BigInt::from(10), BigInt::from(3)),
            128,
        );
        let r = ten_thirds.sqrt();
        let err = r.mul(&r).sub(&ten_thirds).abs();
        assert!(err.cmp(&BigFloat::from_i64(1, 128).scale_exp(-100)) == Ordering::Less);
        assert!((r.to_f64() - (10.0f64 / 3.0).sqrt()).abs() < 1e-15);

        let x = bf(125.0).nth_root(3);
        assert!((x.to_f64() - 5.0).abs() < 1e-13);
    }
}
