//! Incidence weight bookkeeping, the iterative sigma-equalizing weight
//! solver, and shaved-polytope volume evaluation.
//!
//! For a positive weight z on the joints, each incidence (p, i) gets
//! `b_{p,i} = z_p / sum_{p' in l} z_{p'}` and
//! `beta_{p,i} = 1 - (#{p' in l} - deg l) b_{p,i}`; the per-joint load is
//! `sigma_p = sum_i (#{p' in l_{p,i}} - deg l_{p,i}) b_{p,i}`. Equalizing the
//! sigma values is what makes every joint contribute the same shaved-polytope
//! volume, and the solver below does that by repeatedly splitting the largest
//! gap and rebalancing with a bisection.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Ordering;
use thiserror::Error;

use crate::config::JointsConfiguration;
use crate::real::{BigFloat, DEFAULT_PREC};

#[derive(Debug, Error)]
pub enum OptError {
    #[error("weights must be positive and one per joint")]
    BadWeights,
    #[error("line {0} has no joints labeling it")]
    EmptyLine(usize),
    #[error("internal identity failed: {0}")]
    Inconsistent(&'static str),
    #[error("volume enumeration budget exceeded")]
    Budget,
}

/// Exact per-incidence weights derived from z, with the three defining
/// identities verified before return.
#[derive(Clone, Debug)]
pub struct WeightState {
    pub b: Vec<Vec<BigRational>>,
    pub beta: Vec<Vec<BigRational>>,
    pub sigma: Vec<BigRational>,
}

impl WeightState {
    /// Mean of the beta values at one joint.
    pub fn beta_bar(&self, p: usize) -> BigRational {
        let d = self.beta[p].len();
        let sum: BigRational = self.beta[p].iter().sum();
        sum / BigRational::from_integer(BigInt::from(d as u64))
    }
}

pub fn weight_state(
    cfg: &JointsConfiguration,
    z: &[BigRational],
) -> Result<WeightState, OptError> {
    if z.len() != cfg.joints.len() || z.iter().any(|w| !w.is_positive()) {
        return Err(OptError::BadWeights);
    }
    let per_line = cfg.joints_per_line();
    let mut line_total = Vec::with_capacity(cfg.lines.len());
    for (li, joints) in per_line.iter().enumerate() {
        if joints.is_empty() {
            return Err(OptError::EmptyLine(li));
        }
        line_total.push(joints.iter().map(|&p| z[p].clone()).sum::<BigRational>());
    }
    let surplus = |li: usize| -> i64 {
        per_line[li].len() as i64 - cfg.lines[li].deg as i64
    };
    let mut b = Vec::with_capacity(cfg.joints.len());
    let mut beta = Vec::with_capacity(cfg.joints.len());
    let mut sigma = Vec::with_capacity(cfg.joints.len());
    for (p, joint) in cfg.joints.iter().enumerate() {
        let mut bp = Vec::with_capacity(cfg.dim);
        let mut betap = Vec::with_capacity(cfg.dim);
        let mut sig = BigRational::zero();
        for &li in &joint.lines {
            let bpi = &z[p] / &line_total[li];
            let factor = BigRational::from_integer(BigInt::from(surplus(li)));
            betap.push(BigRational::one() - &factor * &bpi);
            sig += &factor * &bpi;
            bp.push(bpi);
        }
        b.push(bp);
        beta.push(betap);
        sigma.push(sig);
    }

    // per line: sum of b over its incidences is 1, sum of beta is deg
    for (li, joints) in per_line.iter().enumerate() {
        let mut b_sum = BigRational::zero();
        let mut beta_sum = BigRational::zero();
        for &p in joints {
            for (slot, &label) in cfg.joints[p].lines.iter().enumerate() {
                if label == li {
                    b_sum += &b[p][slot];
                    beta_sum += &beta[p][slot];
                }
            }
        }
        if b_sum != BigRational::one() {
            return Err(OptError::Inconsistent("per-line b sum is not 1"));
        }
        if beta_sum != BigRational::from_integer(BigInt::from(cfg.lines[li].deg)) {
            return Err(OptError::Inconsistent("per-line beta sum is not deg"));
        }
    }
    let total: BigRational = beta.iter().flatten().sum();
    if total != BigRational::from_integer(BigInt::from(cfg.total_degree())) {
        return Err(OptError::Inconsistent("total beta sum is not the total degree"));
    }
    Ok(WeightState { b, beta, sigma })
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    /// Final weights, normalized to max 1, as canonical rational strings.
    pub z: Vec<String>,
    pub z_f64: Vec<f64>,
    pub converged: bool,
    pub iterations: u64,
    /// Exact residual max sigma - min sigma at the final iterate.
    pub residual: String,
    pub residual_f64: f64,
    pub sigma_target: Vec<String>,
    pub energy_trace: Vec<f64>,
    /// Every accepted step satisfied the geometric decay bound
    /// `E' <= (1 - 1/(4 J^3)) E` within its component.
    pub energy_decay_ok: bool,
    pub components: usize,
}

/// Equalizes sigma by the largest-gap splitting scheme: scale the weights of
/// all joints above the largest gap by a common factor r found by bisection,
/// repeat until the spread is at most `tol`. Disconnected configurations are
/// solved per component. Arithmetic runs at `prec` bits; the final residual
/// is re-evaluated in exact rationals.
pub fn solve_z(
    cfg: &JointsConfiguration,
    tol: f64,
    max_iter: u64,
    prec: u32,
) -> Result<SolveReport, OptError> {
    let stats = crate::config::verify_configuration(cfg)
        .map_err(|_| OptError::Inconsistent("configuration does not verify"))?;
    let per_line = cfg.joints_per_line();

    let mut z_final = vec![BigRational::one(); cfg.joints.len()];
    let mut trace = Vec::new();
    let mut iterations = 0u64;
    let mut converged = true;
    let mut decay_ok = true;
    let mut targets = Vec::new();

    for component in &stats.components {
        let joints = component.clone();
        let local_index: std::collections::BTreeMap<usize, usize> =
            joints.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let jc = joints.len();
        // lines touching this component, with joint lists in local indices
        let mut lines: Vec<(i64, Vec<usize>)> = Vec::new();
        for (li, lj) in per_line.iter().enumerate() {
            if lj.iter().any(|p| local_index.contains_key(p)) {
                let local: Vec<usize> = lj.iter().map(|p| local_index[p]).collect();
                lines.push((lj.len() as i64 - cfg.lines[li].deg as i64, local));
            }
        }
        let total_deg: i64 = lines.iter().map(|(s, lj)| lj.len() as i64 - s).sum();
        let gamma_exact = BigRational::new(
            BigInt::from(cfg.dim as i64 * jc as i64 - total_deg),
            BigInt::from(jc as i64),
        );
        targets.push(format!("{gamma_exact}"));
        let gamma = BigFloat::from_rational(&gamma_exact, prec);

        let sigma_of = |z: &[BigFloat]| -> Vec<BigFloat> {
            let mut sigma = vec![BigFloat::zero(prec); jc];
            for (surplus, lj) in &lines {
                if *surplus == 0 {
                    continue;
                }
                let mut total = BigFloat::zero(prec);
                for &p in lj {
                    total = total.add(&z[p]);
                }
                for &p in lj {
                    sigma[p] = sigma[p].add(&z[p].mul_i64(*surplus).div(&total));
                }
            }
            sigma
        };
        let energy = |sigma: &[BigFloat]| -> BigFloat {
            let mut e = BigFloat::zero(prec);
            for s in sigma {
                let d = s.sub(&gamma);
                e = e.add(&d.mul(&d));
            }
            e
        };

        // deterministic non-uniform start so the iteration is exercised
        let mut z: Vec<BigFloat> = (0..jc)
            .map(|i| {
                BigFloat::from_i64(1, prec)
                    .add(&BigFloat::from_i64(i as i64 + 1, prec).div_u64(2 * jc as u64 + 2))
            })
            .collect();
        let tolf = BigFloat::from_f64(tol, prec);
        let decay = BigFloat::from_i64(1, prec)
            .sub(&BigFloat::from_i64(1, prec).div_u64(4 * (jc as u64).pow(3)));
        let mut prev_energy: Option<BigFloat> = None;

        loop {
            let sigma = sigma_of(&z);
            let mut order: Vec<usize> = (0..jc).collect();
            order.sort_by(|&a, &b| sigma[a].cmp(&sigma[b]));
            let gap = sigma[order[jc - 1]].sub(&sigma[order[0]]);
            let e = energy(&sigma);
            if let Some(prev) = &prev_energy {
                if e.cmp(&prev.mul(&decay)) == Ordering::Greater {
                    decay_ok = false;
                }
            }
            prev_energy = Some(e.clone());
            trace.push(e.to_f64());
            if gap.cmp(&tolf) != Ordering::Greater {
                break;
            }
            if iterations >= max_iter {
                converged = false;
                break;
            }
            iterations += 1;

            // largest adjacent gap in the sorted sigma values
            let mut split = 0usize;
            let mut widest = BigFloat::zero(prec);
            for w in 1..jc {
                let diff = sigma[order[w]].sub(&sigma[order[w - 1]]);
                if diff.cmp(&widest) == Ordering::Greater {
                    widest = diff;
                    split = w;
                }
            }
            let above: Vec<bool> = {
                let mut v = vec![false; jc];
                for &p in &order[split..] {
                    v[p] = true;
                }
                v
            };
            let scaled = |r: &BigFloat| -> Vec<BigFloat> {
                z.iter()
                    .enumerate()
                    .map(|(p, w)| if above[p] { w.mul(r) } else { w.clone() })
                    .collect()
            };
            // h(r) = min over scaled group - max over the rest; h(1) > 0
            let h = |r: &BigFloat| -> BigFloat {
                let sig = sigma_of(&scaled(r));
                let mut lo: Option<BigFloat> = None;
                let mut hi: Option<BigFloat> = None;
                for (p, s) in sig.iter().enumerate() {
                    if above[p] {
                        lo = Some(match lo {
                            None => s.clone(),
                            Some(cur) => cur.min(s),
                        });
                    } else {
                        hi = Some(match hi {
                            None => s.clone(),
                            Some(cur) => cur.max(s),
                        });
                    }
                }
                lo.unwrap().sub(&hi.unwrap())
            };
            let mut lo_r = BigFloat::from_i64(1, prec).div_u64(2);
            let mut found = false;
            for _ in 0..4 * prec {
                if !h(&lo_r).is_positive() {
                    found = true;
                    break;
                }
                lo_r = lo_r.div_u64(2);
            }
            if !found {
                converged = false;
                break;
            }
            let mut hi_r = lo_r.mul_i64(2).min(&BigFloat::from_i64(1, prec));
            let inner_tol = {
                let a = tolf.div_u64(8 * jc as u64);
                let b = widest.scale_exp(-24);
                a.min(&b)
            };
            for _ in 0..(prec as usize + 64) {
                let mid = lo_r.add(&hi_r).div_u64(2);
                let val = h(&mid);
                if val.abs().cmp(&inner_tol) != Ordering::Greater {
                    lo_r = mid;
                    break;
                }
                if val.is_positive() {
                    hi_r = mid;
                } else {
                    lo_r = mid;
                }
            }
            z = scaled(&lo_r);
            // renormalize to max 1
            let mut zmax = z[0].clone();
            for w in &z[1..] {
                zmax = zmax.max(w);
            }
            z = z.iter().map(|w| w.div(&zmax)).collect();
        }

        for (i, &p) in joints.iter().enumerate() {
            z_final[p] = z[i].to_rational();
        }
    }

    // exact residual at the final iterate
    let state = weight_state(cfg, &z_final)?;
    let residual = {
        let mut lo = state.sigma[0].clone();
        let mut hi = state.sigma[0].clone();
        for s in &state.sigma[1..] {
            if s < &lo {
                lo = s.clone();
            }
            if s > &hi {
                hi = s.clone();
            }
        }
        &hi - &lo
    };
    // for disconnected inputs the per-component residual is what converged;
    // report the global spread anyway
    Ok(SolveReport {
        z: z_final.iter().map(|w| format!("{w}")).collect(),
        z_f64: z_final.iter().map(|w| w.to_f64().unwrap_or(f64::NAN)).collect(),
        converged,
        iterations,
        residual: format!("{residual}"),
        residual_f64: residual.to_f64().unwrap_or(f64::NAN),
        sigma_target: targets,
        energy_trace: trace,
        energy_decay_ok: decay_ok,
        components: stats.components.len(),
    })
}

// --- shaved polytope volumes ----------------------------------------------

/// `S(beta_1..beta_d, r) = {a >= 0 : |a| <= r, a_i + beta_i(|a|-a_i) <= beta_i}`.
#[derive(Clone, Debug)]
pub struct ShavedPolytope {
    pub beta: Vec<BigRational>,
    pub r: BigRational,
}

impl ShavedPolytope {
    pub fn with_unit_cap(beta: Vec<BigRational>) -> Self {
        ShavedPolytope { beta, r: BigRational::one() }
    }
}

/// Closed-form volume when all beta are equal:
/// `prod_{i=1}^{d} beta / (1 + (i-1) beta)` for positive beta, zero otherwise.
/// This equals `1 / (d! C(1/beta + d - 1, d))`.
pub fn polytope_volume_equal(beta: &BigRational, d: u32) -> BigRational {
    if !beta.is_positive() {
        return BigRational::zero();
    }
    let mut acc = BigRational::one();
    for i in 0..d as i64 {
        let denom = BigRational::one() + BigRational::from_integer(BigInt::from(i)) * beta;
        acc *= beta / denom;
    }
    acc
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeVolume {
    pub count: u64,
    /// `count / n^d` as a canonical rational string.
    pub normalized: String,
    pub normalized_f64: f64,
    pub n: u32,
}

/// `|nS cap Z_{>=0}^d| / n^d` by exact enumeration. Membership tests are
/// integer comparisons; the outer coordinate fans out in parallel slabs with
/// a deterministic sum. Narrow beta fractions take an i128 fast path,
/// anything wider falls back to big-integer arithmetic.
pub fn polytope_volume_lattice(poly: &ShavedPolytope, n: u32) -> LatticeVolume {
    let d = poly.beta.len();
    assert!(d >= 1 && n >= 1);
    // |a| <= floor(n * r)
    let cap = {
        let nr = poly.r.clone() * BigRational::from_integer(BigInt::from(n));
        let f = nr.floor().to_integer();
        if f.is_negative() {
            return LatticeVolume { count: 0, normalized: "0".into(), normalized_f64: 0.0, n };
        }
        f.to_i128().expect("cap fits i128").min(n as i128 * 4) as u32
    };
    // a_i + beta_i (|a| - a_i) <= beta_i * n with beta_i = num/den (den > 0)
    // <=> (den - num) a_i + num |a| <= num * n
    let narrow = poly.beta.iter().all(|b| {
        b.numer().to_i128().is_some_and(|v| v.abs() < 1 << 62)
            && b.denom().to_i128().is_some_and(|v| v < 1 << 62)
    });
    let count: u64 = if narrow && cap < 1 << 20 {
        let coeffs: Vec<(i128, i128)> = poly
            .beta
            .iter()
            .map(|b| (b.numer().to_i128().unwrap(), b.denom().to_i128().unwrap()))
            .collect();
        fn count_rec(
            coeffs: &[(i128, i128)],
            cap: u32,
            n: u32,
            depth: usize,
            partial: &mut Vec<u32>,
            used: u32,
        ) -> u64 {
            if depth == coeffs.len() {
                let total = used as i128;
                for (i, &(num, den)) in coeffs.iter().enumerate() {
                    let ai = partial[i] as i128;
                    if (den - num) * ai + num * total > num * n as i128 {
                        return 0;
                    }
                }
                return 1;
            }
            let mut acc = 0u64;
            for v in 0..=(cap - used) {
                partial.push(v);
                acc += count_rec(coeffs, cap, n, depth + 1, partial, used + v);
                partial.pop();
            }
            acc
        }
        (0..=cap)
            .into_par_iter()
            .map(|a0| count_rec(&coeffs, cap, n, 1, &mut vec![a0], a0))
            .sum()
    } else {
        let rows: Vec<(BigInt, BigInt, BigInt)> = poly
            .beta
            .iter()
            .map(|b| {
                let num = b.numer().clone();
                let den = b.denom().clone();
                (den - &num, num.clone(), num * BigInt::from(n))
            })
            .collect();
        fn count_rec_big(
            rows: &[(BigInt, BigInt, BigInt)],
            cap: u32,
            depth: usize,
            partial: &mut Vec<u32>,
            used: u32,
        ) -> u64 {
            if depth == rows.len() {
                let total = BigInt::from(used);
                for (i, (c1, c2, rhs)) in rows.iter().enumerate() {
                    if c1 * BigInt::from(partial[i]) + c2 * &total > *rhs {
                        return 0;
                    }
                }
                return 1;
            }
            let mut acc = 0u64;
            for v in 0..=(cap - used) {
                partial.push(v);
                acc += count_rec_big(rows, cap, depth + 1, partial, used + v);
                partial.pop();
            }
            acc
        }
        (0..=cap)
            .into_par_iter()
            .map(|a0| count_rec_big(&rows, cap, 1, &mut vec![a0], a0))
            .sum()
    };
    let normalized = BigRational::new(BigInt::from(count), BigInt::from(n as u64).pow(d as u32));
    LatticeVolume {
        count,
        normalized: format!("{normalized}"),
        normalized_f64: normalized.to_f64().unwrap_or(f64::NAN),
        n,
    }
}

/// Exact area of the 2-dimensional slice of `S(beta_1, ..., beta_d)` at
/// `a_3 = gamma_3, ..., a_d = gamma_d`:
/// `r^2/2 - (r - beta_1(1-gamma))+^2 / (2(1-beta_1)) - (same for beta_2)`
/// with `r = min(r*, r_3, ..., r_d)`.
pub fn slice_area(
    beta1: &BigRational,
    beta2: &BigRational,
    gammas: &[BigRational],
    betas_rest: &[BigRational],
) -> BigRational {
    assert_eq!(gammas.len(), betas_rest.len());
    let one = BigRational::one();
    assert!(
        beta1 <= &one && beta2 <= &one && betas_rest.iter().all(|b| b <= &one),
        "slice area is defined for beta <= 1"
    );
    let zero = BigRational::zero();
    if beta1 < &zero || beta2 < &zero {
        return zero;
    }
    let gamma: BigRational = gammas.iter().sum();
    if gamma >= one {
        return zero;
    }
    // r*: the corner of the two active constraints
    let r_star = {
        let prod = beta1 * beta2;
        if prod == one {
            &one - &gamma
        } else {
            (&one - &gamma) * (beta1 + beta2 - BigRational::from_integer(BigInt::from(2)) * &prod)
                / (&one - &prod)
        }
    };
    let mut r = r_star;
    for (gi, bi) in gammas.iter().zip(betas_rest) {
        if bi.is_positive() {
            // gamma_i + beta_i (a1 + a2 + gamma - gamma_i) <= beta_i
            let ri = &one - &gamma + gi - gi / bi;
            if ri < r {
                r = ri;
            }
        } else if gi.is_positive() {
            return zero; // constraint gamma_i <= beta_i * (..) unsatisfiable
        } else if bi.is_negative() {
            return zero; // slice degenerates to a boundary segment
        }
    }
    if !r.is_positive() {
        return zero;
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let cut = |beta: &BigRational| -> BigRational {
        let excess = &r - beta * (&one - &gamma);
        if !excess.is_positive() {
            return BigRational::zero();
        }
        // beta = 1 forces excess <= 0, so the division is safe here
        &excess * &excess / (&two * (&one - beta))
    };
    &r * &r / &two - cut(beta1) - cut(beta2)
}

#[derive(Clone, Debug, Serialize)]
pub struct CountingReport {
    /// Lattice estimate of `sum_p vol S(beta_{p,1..d})`.
    pub sum_lattice_f64: f64,
    /// Exact upper bound `sum_p vol S(beta_bar_p, ..., beta_bar_p)`.
    pub sum_upper: String,
    pub sum_upper_f64: f64,
    /// `1/d!`, the lower bound the sum must reach.
    pub target: String,
    /// Exact comparison `sum_upper >= 1/d!` (holds for every positive z).
    pub exact_ok: bool,
    pub bound_x: f64,
    pub bound_l: f64,
    /// `L >= C(x, d-1)` within tolerance.
    pub chain_ok: bool,
    pub pass: bool,
}

/// Per-joint shaved-polytope volumes under the weight state of z: lattice
/// estimates of the true volumes, the exact equal-beta upper bound, the
/// `1/d!` comparison, and the real-binomial chain from J to the line bound.
pub fn counting_report(
    cfg: &JointsConfiguration,
    z: &[BigRational],
    n: u32,
) -> Result<CountingReport, OptError> {
    let state = weight_state(cfg, z)?;
    let d = cfg.dim as u32;
    let mut sum_lattice = 0.0f64;
    let mut sum_upper = BigRational::zero();
    for p in 0..cfg.joints.len() {
        let poly = ShavedPolytope::with_unit_cap(state.beta[p].clone());
        sum_lattice += polytope_volume_lattice(&poly, n).normalized_f64;
        sum_upper += polytope_volume_equal(&state.beta_bar(p), d);
    }
    let target = BigRational::new(BigInt::one(), crate::bounds::factorial(d as u64));
    let exact_ok = sum_upper >= target;
    let bound = crate::bounds::sharp_bound(cfg.joints.len() as u64, d, 1e-9, DEFAULT_PREC)
        .map_err(|_| OptError::Inconsistent("real binomial solve failed"))?;
    let bound_x = bound.x.to_f64();
    let bound_l = bound.l_min.to_f64();
    let chain_ok = cfg.total_degree() as f64 >= bound_l - 1e-6;
    Ok(CountingReport {
        sum_lattice_f64: sum_lattice,
        sum_upper: format!("{sum_upper}"),
        sum_upper_f64: sum_upper.to_f64().unwrap_or(f64::NAN),
        target: format!("{target}"),
        exact_ok,
        bound_x,
        bound_l,
        chain_ok,
        pass: exact_ok && chain_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::test_fixtures::{star, triangle};
    use crate::generators::tight_configuration;
    use crate::FieldDesc;

    fn ones(j: usize) -> Vec<BigRational> {
        vec![BigRational::one(); j]
    }

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn tight_uniform_weight_state() {
        // every beta is 1/(M-d+1) on a tight configuration with uniform z
        for (m, d) in [(3usize, 2usize), (4, 3), (5, 3)] {
            let tight = tight_configuration(m, d, FieldDesc::Rational, 0).unwrap();
            let state = weight_state(&tight.cfg, &ones(tight.cfg.joints.len())).unwrap();
            let expect = ratio(1, (m - d + 1) as i64);
            assert!(state.beta.iter().flatten().all(|b| *b == expect));
        }
    }

    #[test]
    fn single_joint_sigma_is_zero() {
        let cfg = star(3);
        let state = weight_state(&cfg, &ones(1)).unwrap();
        assert!(state.sigma[0].is_zero());
    }

    #[test]
    fn weight_state_scaling_invariance() {
        let cfg = triangle();
        let z: Vec<BigRational> = vec![ratio(1, 1), ratio(2, 1), ratio(5, 2)];
        let scaled: Vec<BigRational> = z.iter().map(|w| w * ratio(7, 3)).collect();
        let a = weight_state(&cfg, &z).unwrap();
        let b = weight_state(&cfg, &scaled).unwrap();
        assert_eq!(a.b, b.b);
        assert_eq!(a.beta, b.beta);
        assert_eq!(a.sigma, b.sigma);
    }

    #[test]
    fn solve_z_on_star_needs_no_iterations() {
        let cfg = star(3);
        let report = solve_z(&cfg, 1e-9, 100, DEFAULT_PREC).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, 0);
        assert_eq!(report.residual, "0");
    }

    #[test]
    fn solve_z_triangle_converges_to_uniform() {
        let cfg = triangle();
        let report = solve_z(&cfg, 1e-9, 10_000, DEFAULT_PREC).unwrap();
        assert!(report.converged);
        assert!(report.residual_f64 < 1e-9);
        assert!(report.energy_decay_ok);
        for w in &report.z_f64 {
            assert!((w - 1.0).abs() < 1e-6, "weights {:?}", report.z_f64);
        }
        assert_eq!(report.sigma_target, vec!["1".to_string()]);
    }

    #[test]
    fn solve_z_handles_components_independently() {
        // two disjoint triangles
        let a = triangle();
        let mut cfg = a.clone();
        let f = FieldDesc::Rational;
        let off = f.from_i64(10);
        for p in &a.points {
            cfg.points.push(vec![p[0].add(&off), p[1].add(&off)]);
        }
        for l in &a.lines {
            cfg.lines.push(crate::config::Line { base: l.base + 3, dir: l.dir.clone(), deg: 1 });
        }
        for j in &a.joints {
            cfg.joints.push(crate::config::Joint {
                point: j.point + 3,
                lines: j.lines.iter().map(|&li| li + 3).collect(),
            });
        }
        let report = solve_z(&cfg, 1e-9, 10_000, DEFAULT_PREC).unwrap();
        assert_eq!(report.components, 2);
        assert!(report.converged);
        assert!(report.residual_f64 < 1e-9);
    }

    #[test]
    fn volume_closed_forms() {
        // beta = 1: the full simplex
        assert_eq!(polytope_volume_equal(&ratio(1, 1), 3), ratio(1, 6));
        // d = 3, beta = 1/3: 1/60
        assert_eq!(polytope_volume_equal(&ratio(1, 3), 3), ratio(1, 60));
        // beta = 1/(M-d+1) gives 1/(d! C(M,d))
        assert_eq!(polytope_volume_equal(&ratio(1, 3), 2), ratio(1, 12)); // M=4,d=2
        assert_eq!(polytope_volume_equal(&ratio(-1, 2), 4), ratio(0, 1));
    }

    #[test]
    fn lattice_simplex_count() {
        // beta = 1, r = 1, d = 2, n = 10: C(12,2) = 66 points
        let poly = ShavedPolytope::with_unit_cap(vec![ratio(1, 1), ratio(1, 1)]);
        let v = polytope_volume_lattice(&poly, 10);
        assert_eq!(v.count, 66);
        assert_eq!(v.normalized, "33/50");
    }

    #[test]
    fn lattice_approaches_closed_form() {
        let poly = ShavedPolytope::with_unit_cap(vec![ratio(1, 3); 3]);
        let exact = 1.0 / 60.0;
        let v = polytope_volume_lattice(&poly, 300);
        assert!((v.normalized_f64 - exact).abs() / exact < 0.05);
        // refinement brackets the limit
        let v2 = polytope_volume_lattice(&poly, 600);
        assert!((v2.normalized_f64 - exact).abs() <= (v.normalized_f64 - exact).abs());
    }

    #[test]
    fn slice_area_matches_closed_form_in_dim_two() {
        let area = slice_area(&ratio(1, 2), &ratio(1, 2), &[], &[]);
        assert_eq!(area, ratio(1, 6));
        assert_eq!(area, polytope_volume_equal(&ratio(1, 2), 2));
    }

    #[test]
    fn slice_area_degenerate_cases() {
        assert_eq!(slice_area(&ratio(0, 1), &ratio(1, 2), &[], &[]), ratio(0, 1));
        // gamma >= 1 kills the slice
        assert_eq!(
            slice_area(&ratio(1, 2), &ratio(1, 2), &[ratio(1, 1)], &[ratio(1, 2)]),
            ratio(0, 1)
        );
        assert_eq!(slice_area(&ratio(-1, 2), &ratio(1, 2), &[], &[]), ratio(0, 1));
    }

    #[test]
    fn slice_area_is_maximized_at_equal_betas() {
        // fixed beta1 + beta2 = 1, gamma = 0: strict maximum at 1/2, 1/2
        let balanced = slice_area(&ratio(1, 2), &ratio(1, 2), &[], &[]);
        for (a, b) in [(1, 3), (1, 4), (2, 5)] {
            let b1 = ratio(a, b);
            let b2 = ratio(1, 1) - &b1;
            let off = slice_area(&b1, &b2, &[], &[]);
            assert!(off < balanced, "beta1 = {a}/{b}");
        }
    }

    #[test]
    fn counting_report_tight_equality() {
        let tight = tight_configuration(3, 2, FieldDesc::Rational, 0).unwrap();
        let report = counting_report(&tight.cfg, &ones(3), 40).unwrap();
        assert_eq!(report.sum_upper, "1/2"); // J/(d! C(M,d)) = 3/6 = 1/d!
        assert!(report.exact_ok);
        assert!(report.chain_ok);
        assert!(report.pass);
    }

    #[test]
    fn counting_report_single_joint() {
        let cfg = star(3);
        let report = counting_report(&cfg, &ones(1), 30).unwrap();
        assert_eq!(report.sum_upper, "1/6");
        assert!(report.pass);
    }
}
