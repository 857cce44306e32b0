//! Real-binomial solvers and the multiplicity constants that feed every
//! bound comparison.
//!
//! `C(x, d)` extends the binomial coefficient to real `x` via the falling
//! factorial `x(x-1)...(x-d+1)/d!`, which is strictly increasing on
//! `[d, infinity)`, so `C(x, d) = J` has a unique solution `x >= d` for any
//! `J >= 1`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::combin::binomial;
use crate::real::{BigFloat, DEFAULT_PREC};

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("J must be at least 1")]
    EmptyCount,
    #[error("the two closed forms for L_min disagree: {0} vs {1}")]
    FormulaDisagreement(f64, f64),
    #[error("variant {0} needs exactly one (k, m) class")]
    SingleClassOnly(&'static str),
}

/// Falling-factorial binomial `x(x-1)...(x-d+1)/d!` at a real point.
pub fn binom_real(x: &BigFloat, d: u32) -> BigFloat {
    let prec = x.prec();
    let mut acc = BigFloat::from_i64(1, prec);
    for i in 0..d {
        acc = acc.mul(&x.sub(&BigFloat::from_i64(i as i64, prec)));
    }
    let mut dfact = BigInt::one();
    for i in 2..=d as i64 {
        dfact *= i;
    }
    acc.div(&BigFloat::from_bigint(&dfact, prec))
}

/// Solves `C(x, d) = J` for real `x >= d` by bisection on `[d, d + J]`.
/// Integer solutions are detected exactly and returned without rounding.
pub fn solve_binom_real(j: u64, d: u32, tol: f64, prec: u32) -> Result<BigFloat, BoundsError> {
    if j == 0 {
        return Err(BoundsError::EmptyCount);
    }
    let target = BigInt::from(j);
    // exact integer hit: C(x0, d) = J for integer x0
    let mut x0 = d as u64;
    loop {
        let b = binomial(x0, d as u64);
        if b == target {
            return Ok(BigFloat::from_i64(x0 as i64, prec));
        }
        if b > target {
            break;
        }
        x0 += 1;
    }

    let jf = BigFloat::from_i64(j as i64, prec);
    let tolf = BigFloat::from_f64(tol, prec).mul(&jf);
    let mut lo = BigFloat::from_i64(d as i64, prec);
    let mut hi = BigFloat::from_i64(d as i64 + j as i64, prec);
    for _ in 0..(prec as usize + 64) {
        let mid = lo.add(&hi).div_u64(2);
        let val = binom_real(&mid, d);
        let err = val.sub(&jf);
        if err.abs().cmp(&tolf) == std::cmp::Ordering::Less {
            return Ok(mid);
        }
        if err.is_positive() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo.add(&hi).div_u64(2))
}

#[derive(Clone, Debug)]
pub struct SharpBound {
    pub x: BigFloat,
    /// `C(x, d-1)`, the minimum line count (total curve degree in curve mode).
    pub l_min: BigFloat,
    /// The same quantity through `d*J/(x-d+1)`; must agree with `l_min`.
    pub l_min_alt: BigFloat,
}

/// The minimum number of lines that can form `J` joints: solves
/// `C(x, d) = J` and evaluates `C(x, d-1)` along with the equivalent form
/// `d*J/(x-d+1)`. The two must agree to within `tol` relative error.
pub fn sharp_bound(j: u64, d: u32, tol: f64, prec: u32) -> Result<SharpBound, BoundsError> {
    assert!(d >= 1);
    let x = solve_binom_real(j, d, tol * 1e-3, prec)?;
    let l_min = binom_real(&x, d - 1);
    let denom = x.sub(&BigFloat::from_i64(d as i64 - 1, prec));
    let l_min_alt = BigFloat::from_i64((d as u64 * j) as i64, prec).div(&denom);
    let rel = l_min.sub(&l_min_alt).abs().div(&l_min.abs().max(&BigFloat::from_i64(1, prec)));
    if rel.to_f64() > tol {
        return Err(BoundsError::FormulaDisagreement(l_min.to_f64(), l_min_alt.to_f64()));
    }
    Ok(SharpBound { x, l_min, l_min_alt })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstantVariant {
    /// `(d! / prod k_i!^{m_i} m_i^{m_i})^{1/(s-1)}`, the optimal constant for
    /// both multiplicity notions.
    NuStar,
    /// Same value; kept as a separate name for reporting.
    Nu,
    /// Single-class bound `((k m)! / (k^m m^m))^{1/(m-1)}`.
    UpperKM,
}

/// Evaluates the multiplicity constants as high-precision reals.
pub fn constant_c(
    k: &[u32],
    m: &[u32],
    variant: ConstantVariant,
    prec: u32,
) -> Result<BigFloat, BoundsError> {
    assert_eq!(k.len(), m.len());
    assert!(!k.is_empty());
    let s: u32 = m.iter().sum();
    let base: BigRational = match variant {
        ConstantVariant::NuStar | ConstantVariant::Nu => {
            let d: u64 = k.iter().zip(m).map(|(&ki, &mi)| ki as u64 * mi as u64).sum();
            let mut denom = BigInt::one();
            for (&ki, &mi) in k.iter().zip(m) {
                denom *= factorial(ki as u64).pow(mi);
                denom *= BigInt::from(mi as u64).pow(mi);
            }
            BigRational::new(factorial(d), denom)
        }
        ConstantVariant::UpperKM => {
            if k.len() != 1 {
                return Err(BoundsError::SingleClassOnly("upper-km"));
            }
            let (kk, mm) = (k[0] as u64, m[0] as u64);
            let denom = BigInt::from(kk).pow(mm as u32) * BigInt::from(mm).pow(mm as u32);
            BigRational::new(factorial(kk * mm), denom)
        }
    };
    Ok(BigFloat::from_rational(&base, prec).nth_root(s - 1))
}

pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

pub fn default_prec() -> u32 {
    DEFAULT_PREC
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_solutions_are_exact() {
        // C(5, 3) = 10
        let x = solve_binom_real(10, 3, 1e-12, 128).unwrap();
        assert_eq!(x.to_f64(), 5.0);
        assert!(x.sub(&BigFloat::from_i64(5, 128)).is_zero());
        // J = 1 gives x = d
        let x = solve_binom_real(1, 4, 1e-12, 128).unwrap();
        assert_eq!(x.to_f64(), 4.0);
    }

    #[test]
    fn be_numbers() {
        // C(x, 4) = 6 has x ~ 5.1458, and the line bound is ~ 11.1848
        let x = solve_binom_real(6, 4, 1e-15, 128).unwrap();
        assert!((x.to_f64() - 5.1458).abs() < 1e-3);
        let b = sharp_bound(6, 4, 1e-9, 128).unwrap();
        assert!((b.l_min.to_f64() - 11.1848).abs() < 1e-3);
        assert!(12.0 > b.l_min.to_f64());
    }

    #[test]
    fn tight_round_trip_exact() {
        for d in 2..=4u32 {
            for m in d as u64..=40 {
                let j = crate::combin::binomial_u64(m, d as u64);
                let b = sharp_bound(j, d, 1e-9, 128).unwrap();
                assert_eq!(b.x.to_f64(), m as f64);
                let expect = crate::combin::binomial_u64(m, d as u64 - 1) as f64;
                assert!((b.l_min.to_f64() - expect).abs() < 1e-9 * expect.max(1.0));
            }
        }
    }

    #[test]
    fn single_joint_bound_is_d() {
        let b = sharp_bound(1, 5, 1e-9, 128).unwrap();
        assert_eq!(b.x.to_f64(), 5.0);
        assert_eq!(b.l_min.to_f64(), 5.0);
    }

    #[test]
    fn two_flats_constant() {
        // (6!/(2!^3 * 3^3))^(1/2) = sqrt(10/3)
        let c = constant_c(&[2], &[3], ConstantVariant::NuStar, 128).unwrap();
        let expect = (10.0f64 / 3.0).sqrt();
        assert!((c.to_f64() - expect).abs() < 1e-12);
        // the single-class bound coincides at k = 2 because 2! = 2
        let u = constant_c(&[2], &[3], ConstantVariant::UpperKM, 128).unwrap();
        assert!((u.to_f64() - expect).abs() < 1e-12);
    }

    #[test]
    fn lines_constant_matches_classical_form() {
        // k = 1, m = d: (d!/d^d)^(1/(d-1)) = (d-1)!^(1/(d-1)) / d
        for d in 2..=6u32 {
            let c = constant_c(&[1], &[d], ConstantVariant::NuStar, 128).unwrap();
            let classical =
                ((1..d as u64).product::<u64>() as f64).powf(1.0 / (d as f64 - 1.0)) / d as f64;
            assert!((c.to_f64() - classical).abs() < 1e-12);
        }
    }

    #[test]
    fn naive_two_flats_ratio_gap() {
        // sqrt(10/3) / sqrt(2/75) = 5^(3/2)
        let upper = (10.0f64 / 3.0).sqrt();
        let naive = (2.0f64 / 75.0).sqrt();
        assert!((upper / naive - 5.0f64.powf(1.5)).abs() < 1e-9);
    }

    #[test]
    fn monotone_in_j() {
        let mut prev = 0.0;
        for j in [1u64, 2, 5, 10, 50, 100] {
            let x = solve_binom_real(j, 3, 1e-12, 128).unwrap().to_f64();
            assert!(x > prev);
            prev = x;
        }
    }
}
