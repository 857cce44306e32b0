//! Priority timestamps, the per-joint derivative-order sets S_p, and machine
//! certification of vanishing statements by exact rank computation.
//!
//! A timestamp schedules multiplicity increments: it visits each joint once
//! per level 0..=n, and the order of visits decides which derivative
//! conditions must be imposed directly versus which are already implied by
//! whole-line vanishing. The certificate assembles the implied linear system
//! on the coefficients of degree-<=n polynomials and checks its nullspace.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::Signed;
use serde_json::json;
use thiserror::Error;

use crate::algebra::{CoordinateFrame, Matrix, MultiPoly, Scalar};
use crate::combin::{compositions_bounded, monomials_up_to};
use crate::config::JointsConfiguration;
use crate::generators::TightConfiguration;

#[derive(Debug, Error)]
pub enum VanishError {
    #[error("weights must be positive ({0} joints, got weight vector of wrong shape or sign)")]
    BadWeights(usize),
    #[error("terminating time {0} out of range 0..={1}")]
    BadTerminatingTime(u64, u64),
    #[error("line {line} carries fewer joints than its degree")]
    CurveDeficient { line: usize },
    #[error("n = {n} must be a multiple of M = {m}")]
    NotMultiple { n: u32, m: u32 },
    #[error("relaxed system has no nonzero solution: n below the viability threshold")]
    EmptyNullspace,
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
}

/// A priority timestamp: a bijection from (joint, level) pairs onto
/// `1..=(n+1)*J`, increasing in the level for each fixed joint.
#[derive(Clone, Debug)]
pub struct VanishingSchedule {
    pub n: u32,
    /// `times[p][r]` is the stage at which joint p reaches level r.
    pub times: Vec<Vec<u64>>,
    /// Inverse map: `events[t-1] = (joint, level)`.
    pub events: Vec<(usize, u32)>,
}

impl VanishingSchedule {
    pub fn joint_count(&self) -> usize {
        self.times.len()
    }

    pub fn horizon(&self) -> u64 {
        (self.n as u64 + 1) * self.times.len() as u64
    }

    /// The vanishing order of joint p right after stage t: the smallest level
    /// whose stage is still in the future.
    pub fn order_at(&self, p: usize, t: u64) -> u32 {
        self.times[p].partition_point(|&stage| stage <= t) as u32
    }
}

/// Ranks (joint, level) pairs by `(level - n) / z_p` with ties broken by
/// joint index (levels never tie within one joint). The ranking is invariant
/// under scaling all weights.
pub fn associated_timestamp(
    z: &[BigRational],
    n: u32,
) -> Result<VanishingSchedule, VanishError> {
    if z.is_empty() || z.iter().any(|w| !w.is_positive()) {
        return Err(VanishError::BadWeights(z.len()));
    }
    let j = z.len();
    let mut pairs: Vec<(usize, u32)> =
        (0..j).flat_map(|p| (0..=n).map(move |r| (p, r))).collect();
    pairs.sort_by(|&(p1, r1), &(p2, r2)| {
        // (r1-n)/z1 vs (r2-n)/z2, cross-multiplied (weights are positive)
        let a = BigRational::from_integer(BigInt::from(r1 as i64 - n as i64)) * &z[p2];
        let b = BigRational::from_integer(BigInt::from(r2 as i64 - n as i64)) * &z[p1];
        a.cmp(&b).then(p1.cmp(&p2)).then(r1.cmp(&r2))
    });
    let mut times = vec![vec![0u64; n as usize + 1]; j];
    for (stage0, &(p, r)) in pairs.iter().enumerate() {
        times[p][r as usize] = stage0 as u64 + 1;
    }
    debug_assert!(times.iter().all(|row| row.windows(2).all(|w| w[0] < w[1])));
    Ok(VanishingSchedule { n, times, events: pairs })
}

/// The guaranteed whole-line vanishing order at a stage; lines whose joint
/// count equals their degree divide by zero and take a signed-infinite
/// convention from the sign of the numerator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineOrder {
    NegInfinite,
    Finite(Rational64),
    Infinite,
}

/// `v_l(t) = (sum_{p in l} v_p(t) - n deg l) / (#{p in l} - deg l)`.
pub fn line_orders(
    cfg: &JointsConfiguration,
    schedule: &VanishingSchedule,
    t: u64,
) -> Result<Vec<LineOrder>, VanishError> {
    let per_line = cfg.joints_per_line();
    let n = schedule.n as i64;
    let mut out = Vec::with_capacity(cfg.lines.len());
    for (li, joints) in per_line.iter().enumerate() {
        let deg = cfg.lines[li].deg as i64;
        let cnt = joints.len() as i64;
        let num: i64 =
            joints.iter().map(|&p| schedule.order_at(p, t) as i64).sum::<i64>() - n * deg;
        out.push(if cnt - deg > 0 {
            LineOrder::Finite(Rational64::new(num, cnt - deg))
        } else if cnt - deg == 0 {
            if num <= 0 {
                LineOrder::NegInfinite
            } else {
                LineOrder::Infinite
            }
        } else {
            return Err(VanishError::CurveDeficient { line: li });
        });
    }
    Ok(out)
}

/// The derivative orders that must be imposed directly at each joint, up to
/// the terminating stage.
#[derive(Clone, Debug)]
pub struct SpSet {
    pub n: u32,
    pub t_f: u64,
    pub per_joint: Vec<Vec<Vec<u32>>>,
}

impl SpSet {
    pub fn sizes(&self) -> Vec<usize> {
        self.per_joint.iter().map(|v| v.len()).collect()
    }

    pub fn total(&self) -> usize {
        self.per_joint.iter().map(|v| v.len()).sum()
    }
}

/// Enumerates `S_p(n, T, t_f)`: the orders alpha with `T(p, |alpha|) <= t_f`
/// such that right before that stage no labeled line of p already guarantees
/// `|alpha| - alpha_i >= v_l`.
pub fn enumerate_sp(
    cfg: &JointsConfiguration,
    schedule: &VanishingSchedule,
    t_f: u64,
) -> Result<SpSet, VanishError> {
    if t_f > schedule.horizon() {
        return Err(VanishError::BadTerminatingTime(t_f, schedule.horizon()));
    }
    let d = cfg.dim;
    let mut per_joint = vec![Vec::new(); cfg.joints.len()];
    for (p, joint) in cfg.joints.iter().enumerate() {
        for r in 0..=schedule.n {
            let t = schedule.times[p][r as usize];
            if t > t_f {
                break; // times increase in r
            }
            let orders = line_orders(cfg, schedule, t - 1)?;
            // alpha_i <= r - v_l  <=>  |alpha| - alpha_i >= v_l at |alpha| = r
            let mut bounds: Vec<Option<u32>> = Vec::with_capacity(d);
            let mut empty = false;
            for &li in &joint.lines {
                match orders[li] {
                    LineOrder::NegInfinite => bounds.push(None),
                    LineOrder::Infinite => {
                        empty = true;
                        break;
                    }
                    LineOrder::Finite(v) => {
                        let cap = Rational64::from_integer(r as i64) - v;
                        if cap.is_negative() {
                            empty = true;
                            break;
                        }
                        bounds.push(Some(cap.floor().to_integer() as u32));
                    }
                }
            }
            if empty {
                continue;
            }
            per_joint[p].extend(compositions_bounded(d, r, &bounds));
        }
    }
    Ok(SpSet { n: schedule.n, t_f, per_joint })
}

/// Expansions of every monomial of degree <= n in the frame's coordinates,
/// indexed like `monomials_up_to(d, n)`. Built incrementally: each monomial
/// is a previously expanded one times a linear factor.
fn frame_monomial_expansions(frame: &CoordinateFrame, n: u32) -> Vec<MultiPoly> {
    let d = frame.dim();
    let field = frame.origin[0].field();
    let basis = monomials_up_to(d, n);
    let index: std::collections::BTreeMap<Vec<u32>, usize> =
        basis.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
    // x_j in frame coordinates: origin_j + sum_i basis[i][j] y_i
    let linear: Vec<MultiPoly> = (0..d)
        .map(|xj| {
            let mut lin = MultiPoly::constant(d, frame.origin[xj].clone());
            for i in 0..d {
                let c = frame.basis[i][xj].clone();
                if !c.is_zero() {
                    let mut exps = vec![0u32; d];
                    exps[i] = 1;
                    lin.add_term(exps, c);
                }
            }
            lin
        })
        .collect();
    let mut expansions: Vec<MultiPoly> = Vec::with_capacity(basis.len());
    for exps in &basis {
        if exps.iter().all(|&e| e == 0) {
            expansions.push(MultiPoly::one(d, field));
            continue;
        }
        let j = exps.iter().rposition(|&e| e > 0).unwrap();
        let mut prev = exps.clone();
        prev[j] -= 1;
        let expansion = expansions[index[&prev]].mul(&linear[j]);
        expansions.push(expansion);
    }
    expansions
}

#[derive(Clone, Debug)]
pub struct VanishingCertificate {
    pub n: u32,
    /// Dimension C(n+d, d) of the space of degree-<=n polynomials.
    pub ambient: usize,
    pub rank: usize,
    pub nullspace_dim: usize,
    pub sum_sp: usize,
    pub per_joint_sp: Vec<usize>,
    /// Parameter counting: `sum_sp >= ambient` must hold on valid inputs.
    pub counting_ok: bool,
    pub pass: bool,
    /// Tie-break convention recorded for reproducibility.
    pub tie_break: &'static str,
    /// A nonzero polynomial in the nullspace when certification fails.
    pub witness: Option<MultiPoly>,
}

impl VanishingCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "n": self.n,
            "ambient": self.ambient,
            "rank": self.rank,
            "nullspace": self.nullspace_dim,
            "sum_Sp": self.sum_sp,
            "per_joint_Sp": self.per_joint_sp,
            "counting_ok": self.counting_ok,
            "pass": self.pass,
            "tie_break": self.tie_break,
            "witness": self.witness.as_ref().map(|w| w.to_json()),
        })
    }
}

/// Builds the constraint rows `D_p^alpha f(p) = 0` for all alpha in the given
/// S_p sets, over the monomial basis of degree <= n.
fn constraint_rows(
    cfg: &JointsConfiguration,
    sp: &SpSet,
    n: u32,
) -> (usize, Vec<Vec<Scalar>>) {
    let d = cfg.dim;
    let basis = monomials_up_to(d, n);
    let mut rows = Vec::new();
    for (p, alphas) in sp.per_joint.iter().enumerate() {
        if alphas.is_empty() {
            continue;
        }
        let frame = cfg.frame_at(p);
        let expansions = frame_monomial_expansions(&frame, n);
        for alpha in alphas {
            let row: Vec<Scalar> =
                expansions.iter().map(|q| q.coefficient(alpha)).collect();
            rows.push(row);
        }
    }
    (basis.len(), rows)
}

/// Certifies that the S_p-vanishing conditions force every degree-<=n
/// polynomial to zero: assembles the linear system and demands a trivial
/// nullspace. Also reports the parameter-counting comparison
/// `sum_p |S_p| >= C(n+d, d)`.
pub fn certify_vanishing(
    cfg: &JointsConfiguration,
    z: &[BigRational],
    n: u32,
) -> Result<VanishingCertificate, VanishError> {
    if z.len() != cfg.joints.len() {
        return Err(VanishError::BadWeights(cfg.joints.len()));
    }
    let schedule = associated_timestamp(z, n)?;
    let sp = enumerate_sp(cfg, &schedule, schedule.horizon())?;
    certify_with_sets(cfg, &sp, n)
}

/// Rank certification for an explicitly supplied family of condition sets.
/// `certify_vanishing` feeds it the real S_p sets; tests feed it mutated
/// ones to exercise the witness path.
pub fn certify_with_sets(
    cfg: &JointsConfiguration,
    sp: &SpSet,
    n: u32,
) -> Result<VanishingCertificate, VanishError> {
    let (ambient, rows) = constraint_rows(cfg, sp, n);
    let matrix = Matrix::from_rows(&rows, ambient, cfg.field);
    let rank = matrix.rank();
    let nullspace_dim = ambient - rank;
    let witness = (nullspace_dim > 0).then(|| {
        let basis = monomials_up_to(cfg.dim, n);
        let kernel = matrix.nullspace().into_iter().next().expect("nonzero nullspace");
        let mut poly = MultiPoly::zero(cfg.dim, cfg.field);
        for (exps, coef) in basis.into_iter().zip(kernel) {
            poly.add_term(exps, coef);
        }
        poly
    });
    let counting_ok = sp.total() >= ambient;
    Ok(VanishingCertificate {
        n,
        ambient,
        rank,
        nullspace_dim,
        sum_sp: sp.total(),
        per_joint_sp: sp.sizes(),
        counting_ok,
        pass: nullspace_dim == 0 && counting_ok,
        tie_break: "joint index then level",
        witness,
    })
}

#[derive(Clone, Debug)]
pub struct ShavedBoxReport {
    pub n: u32,
    pub box_size: usize,
    /// (joint, alpha) pairs where the derivative failed to vanish.
    pub failures: Vec<(usize, Vec<u32>)>,
    pub apex: Vec<u32>,
    pub apex_nonzero: Vec<bool>,
    pub f_nonzero: bool,
    pub pass: bool,
}

impl ShavedBoxReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "n": self.n,
            "box_size": self.box_size,
            "failures": self.failures,
            "apex": self.apex,
            "apex_nonzero": self.apex_nonzero,
            "f_nonzero": self.f_nonzero,
            "pass": self.pass,
        })
    }
}

/// Builds `f = (s_1 ... s_M)^{n/M}` from the arrangement of a tight
/// configuration and checks that every derivative order in the shaved box
/// `{alpha : (M-d) alpha_i + |alpha| < n for all i}` vanishes at every joint,
/// while the box apex `(n/M, ..., n/M)` does not.
pub fn shaved_box_check(tight: &TightConfiguration, n: u32) -> Result<ShavedBoxReport, VanishError> {
    let m = tight.arrangement.count() as u32;
    let d = tight.cfg.dim;
    if n % m != 0 {
        return Err(VanishError::NotMultiple { n, m });
    }
    let field = tight.cfg.field;
    let mut f = MultiPoly::one(d, field);
    for i in 0..tight.arrangement.count() {
        f = f.mul(&tight.arrangement.functional(i));
    }
    f = f.pow(n / m);
    let f_nonzero = !f.is_zero();

    // shaved box: alpha_i + (|alpha| - alpha_i)/(M-d+1) < n/(M-d+1)
    let box_points: Vec<Vec<u32>> = {
        let mut pts = Vec::new();
        for r in 0..n {
            for alpha in compositions_bounded(d, r, &vec![None; d]) {
                let shave = (m - d as u32) as u64;
                let ok = alpha.iter().all(|&ai| shave * ai as u64 + (r as u64) < n as u64);
                if ok {
                    pts.push(alpha);
                }
            }
        }
        pts
    };

    let apex = vec![n / m; d];
    let mut failures = Vec::new();
    let mut apex_nonzero = Vec::with_capacity(tight.cfg.joints.len());
    for p in 0..tight.cfg.joints.len() {
        let frame = tight.cfg.frame_at(p);
        let expanded = frame.expand(&f)?;
        for alpha in &box_points {
            if !expanded.coefficient(alpha).is_zero() {
                failures.push((p, alpha.clone()));
            }
        }
        apex_nonzero.push(!expanded.coefficient(&apex).is_zero());
    }
    let pass = f_nonzero && failures.is_empty() && apex_nonzero.iter().any(|&b| b);
    Ok(ShavedBoxReport {
        n,
        box_size: box_points.len(),
        failures,
        apex,
        apex_nonzero,
        f_nonzero,
        pass,
    })
}

#[derive(Clone, Debug)]
pub struct RelaxedPolynomialReport {
    pub n: u32,
    pub v_target: u32,
    pub t_f: u64,
    pub nullspace_dim: usize,
    pub f: MultiPoly,
    /// Multiplicity of f at every joint; all must reach `v_target`.
    pub multiplicities: Vec<u32>,
    pub multiplicities_ok: bool,
    /// An order in `S_p(n,T) \ S_p(n,T,t_f)` where the derivative survives.
    pub nonvanishing_alpha: Option<Vec<u32>>,
    pub pass: bool,
}

/// Solves for a nonzero polynomial under the relaxed system: the
/// distinguished joint's conditions are truncated at the stage where every
/// joint reaches `v_target = ceil((1-eps) d n / M)`, all other joints keep
/// their full conditions. Verifies the resulting multiplicities and exhibits
/// a surviving derivative order in the truncated band. `eps <= 0` removes
/// the relaxation entirely, which must leave an empty nullspace.
pub fn relaxed_nonzero_polynomial(
    tight: &TightConfiguration,
    p: usize,
    eps: Rational64,
    n: u32,
) -> Result<RelaxedPolynomialReport, VanishError> {
    let cfg = &tight.cfg;
    let d = cfg.dim as i64;
    let m = tight.arrangement.count() as i64;
    let j = cfg.joints.len() as u64;
    let z = vec![BigRational::from_integer(BigInt::from(1)); cfg.joints.len()];
    let schedule = associated_timestamp(&z, n)?;

    let v_target = if eps.is_positive() {
        let bound = (Rational64::new(1, 1) - eps) * Rational64::new(d * n as i64, m);
        bound.ceil().to_integer().max(0) as u32
    } else {
        n + 1
    };
    if v_target as u64 > n as u64 + 1 {
        return Err(VanishError::BadTerminatingTime(v_target as u64, n as u64 + 1));
    }
    // uniform weights visit joints round-robin, so every joint reaches level
    // v_target exactly at stage v_target * J
    let t_f = v_target as u64 * j;
    debug_assert!((0..cfg.joints.len()).all(|q| schedule.order_at(q, t_f) == v_target));

    let full = enumerate_sp(cfg, &schedule, schedule.horizon())?;
    let truncated = enumerate_sp(cfg, &schedule, t_f)?;
    let mut mixed = full.clone();
    mixed.per_joint[p] = truncated.per_joint[p].clone();

    let (ambient, rows) = constraint_rows(cfg, &mixed, n);
    let matrix = Matrix::from_rows(&rows, ambient, cfg.field);
    let kernel = matrix.nullspace();
    if kernel.is_empty() {
        return Err(VanishError::EmptyNullspace);
    }
    let basis = monomials_up_to(cfg.dim, n);
    let mut f = MultiPoly::zero(cfg.dim, cfg.field);
    for (exps, coef) in basis.into_iter().zip(kernel[0].clone()) {
        f.add_term(exps, coef);
    }
    assert!(!f.is_zero());

    let multiplicities: Vec<u32> = (0..cfg.joints.len())
        .map(|q| match f.multiplicity_at_point(cfg.joint_point(q)) {
            crate::algebra::Mult::Finite(v) => v,
            crate::algebra::Mult::Infinite => u32::MAX,
        })
        .collect();
    let multiplicities_ok = multiplicities.iter().all(|&v| v >= v_target);

    // the surviving order lives in the truncated band at the distinguished joint
    let frame = cfg.frame_at(p);
    let expanded = frame.expand(&f)?;
    let truncated_set: std::collections::BTreeSet<Vec<u32>> =
        truncated.per_joint[p].iter().cloned().collect();
    let nonvanishing_alpha = full.per_joint[p]
        .iter()
        .find(|alpha| {
            !truncated_set.contains(*alpha) && !expanded.coefficient(alpha).is_zero()
        })
        .cloned();

    let pass = multiplicities_ok && nonvanishing_alpha.is_some();
    Ok(RelaxedPolynomialReport {
        n,
        v_target,
        t_f,
        nullspace_dim: kernel.len(),
        f,
        multiplicities,
        multiplicities_ok,
        nonvanishing_alpha,
        pass,
    })
}

/// Uniform weight vector, the default for certification.
pub fn uniform_weights(j: usize) -> Vec<BigRational> {
    vec![BigRational::from_integer(BigInt::from(1)); j]
}
