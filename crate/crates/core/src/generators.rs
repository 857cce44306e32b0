//! Deterministic, seeded constructors for the named configurations:
//! hyperplane arrangements in general position, the tight configurations
//! they induce, projected set systems, and the reguli family.
//!
//! Genericity is never assumed from randomness: every generator certifies
//! its output by exact checks and retries with fresh randomness (budgeted)
//! when a degeneracy is hit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{FieldDesc, Matrix, MultiPoly, Scalar};
use crate::combin::{binomial, k_subsets};
use crate::config::{ConfigError, Joint, JointsConfiguration, Line};
use crate::setsys::JointSetSystem;

const RETRY_BUDGET: usize = 64;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("prime field F_{p} is too small: need p > {bound}")]
    FieldTooSmall { p: u64, bound: u64 },
    #[error("retry budget exhausted while enforcing: {0}")]
    RetryBudget(String),
    #[error("joint set {0} has no certificate with members inside it")]
    NotCertifiable(usize),
    #[error("projection is only defined for line classes (all k_i = 1)")]
    LinesOnly,
    #[error("bad parameters: {0}")]
    Parameters(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// `M` affine functionals `s_i(x) = <coeffs_i, x> + const_i` on F^d whose
/// d-wise intersections are all distinct points.
#[derive(Clone, Debug)]
pub struct HyperplaneArrangement {
    pub field: FieldDesc,
    pub dim: usize,
    pub coeffs: Vec<Vec<Scalar>>,
    pub consts: Vec<Scalar>,
}

impl HyperplaneArrangement {
    pub fn count(&self) -> usize {
        self.coeffs.len()
    }

    /// The functional `s_i` as a degree-1 polynomial.
    pub fn functional(&self, i: usize) -> MultiPoly {
        let mut poly = MultiPoly::constant(self.dim, self.consts[i].clone());
        for (j, c) in self.coeffs[i].iter().enumerate() {
            if !c.is_zero() {
                let mut exps = vec![0u32; self.dim];
                exps[j] = 1;
                poly.add_term(exps, c.clone());
            }
        }
        poly
    }

    /// Solves `s_i(x) = 0` for `i` in the subset; `None` when the linear part
    /// is singular. The subset must have exactly `dim` members.
    pub fn intersection_point(&self, subset: &[usize]) -> Option<Vec<Scalar>> {
        assert_eq!(subset.len(), self.dim);
        let rows: Vec<Vec<Scalar>> =
            subset.iter().map(|&i| self.coeffs[i].clone()).collect();
        let rhs: Vec<Scalar> = subset.iter().map(|&i| self.consts[i].neg()).collect();
        Matrix::from_rows(&rows, self.dim, self.field).solve(&rhs)
    }

    /// The direction of the line `{s_i = 0 : i in subset}` for a subset of
    /// size `dim - 1`; `None` if the rank is deficient.
    pub fn line_direction(&self, subset: &[usize]) -> Option<Vec<Scalar>> {
        assert_eq!(subset.len(), self.dim - 1);
        let rows: Vec<Vec<Scalar>> =
            subset.iter().map(|&i| self.coeffs[i].clone()).collect();
        let ns = Matrix::from_rows(&rows, self.dim, self.field).nullspace();
        (ns.len() == 1).then(|| ns.into_iter().next().unwrap())
    }

    /// Exact generality certificate: every d-subset of functionals has an
    /// invertible linear part and the intersection points are pairwise
    /// distinct. Returns the failed predicate on refusal.
    pub fn certify_general_position(&self) -> Result<Vec<Vec<Scalar>>, String> {
        let subsets = k_subsets(self.count(), self.dim);
        let mut points = Vec::with_capacity(subsets.len());
        for s in &subsets {
            match self.intersection_point(s) {
                Some(p) => points.push(p),
                None => return Err(format!("singular linear part for subset {s:?}")),
            }
        }
        for a in 0..points.len() {
            for b in a + 1..points.len() {
                if points[a] == points[b] {
                    return Err(format!(
                        "subsets {:?} and {:?} intersect at the same point",
                        subsets[a], subsets[b]
                    ));
                }
            }
        }
        Ok(points)
    }
}

fn sample_scalar(field: FieldDesc, rng: &mut ChaCha8Rng, spread: i64) -> Scalar {
    match field {
        FieldDesc::Prime { p } => {
            let v = rng.random_range(0..p);
            Scalar::Fp { p, val: v }
        }
        FieldDesc::Rational => field.from_i64(rng.random_range(-spread..=spread)),
    }
}

/// Seeded rejection sampling of `m` hyperplanes in general position in F^d.
pub fn general_position_hyperplanes(
    m: usize,
    d: usize,
    field: FieldDesc,
    seed: u64,
) -> Result<HyperplaneArrangement, GenError> {
    if m < d || d < 1 {
        return Err(GenError::Parameters(format!("need M >= d >= 1, got M={m}, d={d}")));
    }
    if let FieldDesc::Prime { p } = field {
        // small fields cannot host this many distinct intersection points
        let bound = u64::try_from(binomial(m as u64, d as u64)).unwrap_or(u64::MAX);
        if p <= bound {
            return Err(GenError::FieldTooSmall { p, bound });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_err = String::new();
    for attempt in 0..RETRY_BUDGET {
        let spread = 8 * (m as i64 + d as i64) * (attempt as i64 + 1);
        let arrangement = HyperplaneArrangement {
            field,
            dim: d,
            coeffs: (0..m)
                .map(|_| (0..d).map(|_| sample_scalar(field, &mut rng, spread)).collect())
                .collect(),
            consts: (0..m).map(|_| sample_scalar(field, &mut rng, spread)).collect(),
        };
        match arrangement.certify_general_position() {
            Ok(_) => return Ok(arrangement),
            Err(e) => last_err = e,
        }
    }
    Err(GenError::RetryBudget(last_err))
}

/// A tight configuration plus the arrangement it came from and the subset
/// labelling of its joints and lines.
#[derive(Clone, Debug)]
pub struct TightConfiguration {
    pub cfg: JointsConfiguration,
    pub arrangement: HyperplaneArrangement,
    /// d-subset of hyperplanes for each joint.
    pub joint_subsets: Vec<Vec<usize>>,
    /// (d-1)-subset of hyperplanes for each line.
    pub line_subsets: Vec<Vec<usize>>,
}

/// Joints are the d-wise intersections of M general-position hyperplanes,
/// lines the (d-1)-wise intersections: J = C(M,d), L = C(M,d-1), and every
/// line carries exactly M-d+1 joints.
pub fn tight_configuration(
    m: usize,
    d: usize,
    field: FieldDesc,
    seed: u64,
) -> Result<TightConfiguration, GenError> {
    if d < 2 {
        return Err(GenError::Parameters("need d >= 2 for a joints configuration".into()));
    }
    let arrangement = general_position_hyperplanes(m, d, field, seed)?;
    let joint_subsets = k_subsets(m, d);
    let line_subsets = k_subsets(m, d - 1);
    let line_index: std::collections::BTreeMap<Vec<usize>, usize> =
        line_subsets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();

    let mut points = Vec::with_capacity(joint_subsets.len());
    for s in &joint_subsets {
        let p = arrangement
            .intersection_point(s)
            .expect("certified arrangement has invertible d-subsets");
        points.push(p);
    }
    let mut joints = Vec::with_capacity(joint_subsets.len());
    for (ji, s) in joint_subsets.iter().enumerate() {
        // label order: drop the j-th smallest hyperplane of the joint
        let labels: Vec<usize> = (0..d)
            .map(|j| {
                let mut t = s.clone();
                t.remove(j);
                line_index[&t]
            })
            .collect();
        joints.push(Joint { point: ji, lines: labels });
    }
    let mut lines = Vec::with_capacity(line_subsets.len());
    for t in &line_subsets {
        let dir = arrangement
            .line_direction(t)
            .expect("certified arrangement has full-rank (d-1)-subsets");
        // base point: the joint extending this subset by its smallest absent index
        let extend = (0..m).find(|i| !t.contains(i)).expect("M > d - 1");
        let mut s = t.clone();
        s.push(extend);
        s.sort_unstable();
        let base = joint_subsets.iter().position(|js| *js == s).expect("joint exists");
        lines.push(Line { base, dir, deg: 1 });
    }
    let cfg = JointsConfiguration {
        field,
        dim: d,
        points,
        lines,
        joints,
        curve_mode: false,
        notes: Some(format!("tight configuration of {m} hyperplanes in dimension {d}")),
    };
    cfg.validate_shape()?;
    let stats = crate::config::verify_configuration(&cfg)
        .map_err(|v| GenError::RetryBudget(format!("{} violations in tight build", v.len())))?;
    debug_assert!(stats.per_line_joints.iter().all(|&c| c == m - d + 1));
    Ok(TightConfiguration { cfg, arrangement, joint_subsets, line_subsets })
}

/// Realizes a joint set system with line classes (all k_i = 1) as a
/// projected generically induced configuration: hyperplanes in F^(d+delta),
/// joint sets as points, certificate members as lines, then a seeded generic
/// linear projection down to F^d, re-verified exactly.
pub fn project_generic(
    sys: &JointSetSystem,
    field: FieldDesc,
    seed: u64,
) -> Result<JointsConfiguration, GenError> {
    sys.validate().map_err(|e| GenError::Parameters(e.to_string()))?;
    if !sys.k.iter().all(|&k| k == 1) {
        return Err(GenError::LinesOnly);
    }
    let d = sys.d() as usize;
    let big_d = d + sys.delta as usize;
    let g = sys.ground as usize;
    if g < big_d {
        return Err(GenError::Parameters(format!("ground {g} smaller than dimension {big_d}")));
    }

    // geometric certificates: members must sit inside their joint set
    let mut certs = Vec::with_capacity(sys.joints.len());
    for (pi, p) in sys.joints.iter().enumerate() {
        certs.push(sys.certify(p, true).ok_or(GenError::NotCertifiable(pi))?);
    }
    let mut used_members: Vec<(usize, usize)> = certs.iter().flatten().copied().collect();
    used_members.sort_unstable();
    used_members.dedup();
    let member_slot: std::collections::BTreeMap<(usize, usize), usize> =
        used_members.iter().enumerate().map(|(i, &m)| (m, i)).collect();

    let elems = |set: &[u32]| -> Vec<usize> { set.iter().map(|&e| e as usize - 1).collect() };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_err = String::new();
    for attempt in 0..RETRY_BUDGET {
        let spread = 8 * (g as i64 + big_d as i64) * (attempt as i64 + 1);
        let arrangement = HyperplaneArrangement {
            field,
            dim: big_d,
            coeffs: (0..g)
                .map(|_| (0..big_d).map(|_| sample_scalar(field, &mut rng, spread)).collect())
                .collect(),
            consts: (0..g).map(|_| sample_scalar(field, &mut rng, spread)).collect(),
        };
        let proj: Vec<Vec<Scalar>> = (0..d)
            .map(|_| (0..big_d).map(|_| sample_scalar(field, &mut rng, spread)).collect())
            .collect();
        match try_projection(sys, &arrangement, &proj, &certs, &used_members, &member_slot, elems)
        {
            Ok(cfg) => return Ok(cfg),
            Err(e) => last_err = e,
        }
    }
    Err(GenError::RetryBudget(last_err))
}

#[allow(clippy::too_many_arguments)]
fn try_projection(
    sys: &JointSetSystem,
    arrangement: &HyperplaneArrangement,
    proj: &[Vec<Scalar>],
    certs: &[Vec<(usize, usize)>],
    used_members: &[(usize, usize)],
    member_slot: &std::collections::BTreeMap<(usize, usize), usize>,
    elems: impl Fn(&[u32]) -> Vec<usize>,
) -> Result<JointsConfiguration, String> {
    let field = arrangement.field;
    let d = proj.len();
    let apply = |x: &[Scalar]| -> Vec<Scalar> {
        proj.iter()
            .map(|row| {
                let mut acc = field.zero();
                for (a, b) in row.iter().zip(x) {
                    acc = acc.add(&a.mul(b));
                }
                acc
            })
            .collect()
    };

    // points upstairs and their images
    let mut images = Vec::with_capacity(sys.joints.len());
    for p in &sys.joints {
        let point = arrangement
            .intersection_point(&elems(p))
            .ok_or_else(|| format!("singular point system for joint set {p:?}"))?;
        images.push(apply(&point));
    }
    for a in 0..images.len() {
        for b in a + 1..images.len() {
            if images[a] == images[b] {
                return Err("projected joints collide".into());
            }
        }
    }

    // each used member is a line upstairs through every joint that cites it
    let mut first_joint = vec![usize::MAX; used_members.len()];
    for (pi, cert) in certs.iter().enumerate() {
        for key in cert {
            let slot = member_slot[key];
            if first_joint[slot] == usize::MAX {
                first_joint[slot] = pi;
            }
        }
    }
    let mut lines = Vec::with_capacity(used_members.len());
    for (slot, &(f, mi)) in used_members.iter().enumerate() {
        let member = &sys.families[f][mi];
        let rows: Vec<Vec<Scalar>> =
            elems(member).iter().map(|&i| arrangement.coeffs[i].clone()).collect();
        let ns = Matrix::from_rows(&rows, arrangement.dim, field).nullspace();
        if ns.len() != 1 {
            return Err(format!("member {member:?} does not define a line upstairs"));
        }
        let dir = apply(&ns[0]);
        if dir.iter().all(|c| c.is_zero()) {
            return Err("projection kills a line direction".into());
        }
        lines.push(Line { base: first_joint[slot], dir, deg: 1 });
    }

    let joints: Vec<Joint> = certs
        .iter()
        .enumerate()
        .map(|(pi, cert)| Joint {
            point: pi,
            lines: cert.iter().map(|key| member_slot[key]).collect(),
        })
        .collect();

    let cfg = JointsConfiguration {
        field,
        dim: d,
        points: images,
        lines,
        joints,
        curve_mode: false,
        notes: Some(format!(
            "projected generically induced configuration: ground {}, delta {}",
            sys.ground, sys.delta
        )),
    };
    cfg.validate_shape().map_err(|e| e.to_string())?;
    crate::config::verify_configuration(&cfg)
        .map_err(|v| format!("projection degenerate: {}", v[0]))?;
    Ok(cfg)
}

/// The 6-joint, 12-line optimal configuration in F^4, realized by projecting
/// its set system from F^5.
pub fn bollobas_eccles_configuration(
    field: FieldDesc,
    seed: u64,
) -> Result<JointsConfiguration, GenError> {
    project_generic(&crate::setsys::bollobas_eccles_system(), field, seed)
}

#[derive(Clone, Copy, Debug)]
pub enum ReguliPolicy {
    /// `c_i` = i-th prime above n, `d_i = c_i^2`, verified exactly; falls
    /// back to seeded rationals if a distinctness condition collides.
    Deterministic,
    Seeded(u64),
}

/// The reguli family over Q in F^3: lines `l_ij` (regulus-pair intersections)
/// and `l'_ik` (regulus-plane intersections) with joints `p_ijk`, giving
/// L = C(n,2) + n^2 and J = C(n,2) * n. The common line {(0,t,0)} shared by
/// all reguli is intentionally omitted; see the configuration notes.
pub fn reguli_configuration(n: usize, policy: ReguliPolicy) -> Result<JointsConfiguration, GenError> {
    if n < 2 {
        return Err(GenError::Parameters("need n >= 2 for reguli".into()));
    }
    let field = FieldDesc::Rational;
    let check = |c: &[Scalar], dvals: &[Scalar]| -> bool {
        // y_ij distinct across pairs, k*c_i distinct across (i, k)
        let mut ys = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let denom = c[i].sub(&c[j]);
                if denom.is_zero() {
                    return false;
                }
                ys.push(dvals[j].sub(&dvals[i]).div(&denom).unwrap());
            }
        }
        let mut kcs = Vec::new();
        for ci in c {
            for k in 1..=n as i64 {
                kcs.push(ci.mul(&field.from_i64(k)));
            }
        }
        pairwise_distinct(&ys) && pairwise_distinct(&kcs)
    };

    let (c, dvals) = match policy {
        ReguliPolicy::Deterministic => {
            let mut c = Vec::with_capacity(n);
            let mut prime = n as u64;
            for _ in 0..n {
                prime = next_prime(prime);
                c.push(field.from_i64(prime as i64));
            }
            let dvals: Vec<Scalar> = c.iter().map(|ci| ci.mul(ci)).collect();
            if check(&c, &dvals) {
                (c, dvals)
            } else {
                return reguli_configuration(n, ReguliPolicy::Seeded(0));
            }
        }
        ReguliPolicy::Seeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut found = None;
            for attempt in 0..RETRY_BUDGET {
                let spread = 16 * n as i64 * (attempt as i64 + 1);
                let c: Vec<Scalar> =
                    (0..n).map(|_| field.from_i64(rng.random_range(1..=spread))).collect();
                let dvals: Vec<Scalar> =
                    (0..n).map(|_| field.from_i64(rng.random_range(1..=spread))).collect();
                if check(&c, &dvals) {
                    found = Some((c, dvals));
                    break;
                }
            }
            found.ok_or(GenError::RetryBudget("reguli distinctness conditions".into()))?
        }
    };

    // pair index map for i < j
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let pair_index = |i: usize, j: usize| -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        pairs.iter().position(|&p| p == (a, b)).unwrap()
    };

    let y = |i: usize, j: usize| -> Scalar {
        dvals[j].sub(&dvals[i]).div(&c[i].sub(&c[j])).unwrap()
    };
    // slope of l_ij in the z coordinate: w_ij = c_i y_ij + d_i
    let w = |i: usize, j: usize| -> Scalar { c[i].mul(&y(i, j)).add(&dvals[i]) };

    let mut points = Vec::new();
    let mut joints = Vec::new();
    // joint p_ijk sits at (k, y_ij, k w_ij); lines are labeled (l_ij, l'_ik, l'_jk)
    let line_ij_base = pairs.len(); // l_ij line index = pair_index, l'_ik index offset
    let lprime_index = |i: usize, k: usize| -> usize { line_ij_base + i * n + (k - 1) };
    let mut joint_of = vec![vec![usize::MAX; n + 1]; pairs.len()];
    for (pi, &(i, j)) in pairs.iter().enumerate() {
        for k in 1..=n {
            let kf = field.from_i64(k as i64);
            let point = vec![kf.clone(), y(i, j), kf.mul(&w(i, j))];
            joint_of[pi][k] = points.len();
            points.push(point);
            joints.push(Joint {
                point: points.len() - 1,
                lines: vec![pi, lprime_index(i, k), lprime_index(j, k)],
            });
        }
    }
    let mut lines = Vec::new();
    for (pi, &(i, j)) in pairs.iter().enumerate() {
        lines.push(Line {
            base: joint_of[pi][1],
            dir: vec![field.one(), field.zero(), w(i, j)],
            deg: 1,
        });
    }
    for i in 0..n {
        for k in 1..=n {
            // some joint p_{i j k} with j != i
            let j = if i == 0 { 1 } else { 0 };
            let base = joint_of[pair_index(i, j)][k];
            let kf = field.from_i64(k as i64);
            lines.push(Line {
                base,
                dir: vec![field.zero(), field.one(), kf.mul(&c[i])],
                deg: 1,
            });
        }
    }
    let cfg = JointsConfiguration {
        field,
        dim: 3,
        points,
        lines,
        joints,
        curve_mode: false,
        notes: Some(
            "reguli configuration; the line {(0,t,0)} common to all reguli is omitted"
                .to_string(),
        ),
    };
    cfg.validate_shape()?;
    crate::config::verify_configuration(&cfg)
        .map_err(|v| GenError::RetryBudget(format!("reguli build: {}", v[0])))?;
    Ok(cfg)
}

fn pairwise_distinct(values: &[Scalar]) -> bool {
    for a in 0..values.len() {
        for b in a + 1..values.len() {
            if values[a] == values[b] {
                return false;
            }
        }
    }
    true
}

fn next_prime(mut n: u64) -> u64 {
    loop {
        n += 1;
        if crate::algebra::is_prime(n) {
            return n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::verify_configuration;

    #[test]
    fn three_general_lines_in_the_plane() {
        let arr = general_position_hyperplanes(3, 2, FieldDesc::Rational, 1).unwrap();
        let points = arr.certify_general_position().unwrap();
        assert_eq!(points.len(), 3);
    }

    #[test]
    fn six_hyperplanes_in_f1009_dim5() {
        let arr =
            general_position_hyperplanes(6, 5, FieldDesc::Prime { p: 1009 }, 0).unwrap();
        assert_eq!(arr.certify_general_position().unwrap().len(), 6);
    }

    #[test]
    fn m_equals_d_single_point() {
        let arr = general_position_hyperplanes(3, 3, FieldDesc::Rational, 2).unwrap();
        assert_eq!(arr.certify_general_position().unwrap().len(), 1);
    }

    #[test]
    fn small_prime_field_refused() {
        let err = general_position_hyperplanes(6, 3, FieldDesc::Prime { p: 13 }, 0);
        assert!(matches!(err, Err(GenError::FieldTooSmall { p: 13, bound: 20 })));
    }

    #[test]
    fn tight_d3_m4() {
        let t = tight_configuration(4, 3, FieldDesc::Rational, 0).unwrap();
        let stats = verify_configuration(&t.cfg).unwrap();
        assert_eq!(stats.j_count, 4);
        assert_eq!(stats.l_count, 6);
        assert!(stats.per_line_joints.iter().all(|&c| c == 2));
        assert!(stats.is_connected());
        // every collinear pair of joints shares all d-1 hyperplanes
        for a in 0..4 {
            for b in a + 1..4 {
                if t.cfg.joints[a].lines.iter().any(|l| t.cfg.joints[b].lines.contains(l)) {
                    assert_eq!(crate::config::shared_hyperplanes(&t.cfg, a, b).unwrap(), 2);
                }
            }
        }
    }

    #[test]
    fn tight_d3_m5_over_prime_field() {
        let t = tight_configuration(5, 3, FieldDesc::Prime { p: 1009 }, 7).unwrap();
        let stats = verify_configuration(&t.cfg).unwrap();
        assert_eq!(stats.j_count, 10);
        assert_eq!(stats.l_count, 10);
        assert!(stats.per_line_joints.iter().all(|&c| c == 3));
    }

    #[test]
    fn tight_triangle() {
        let t = tight_configuration(3, 2, FieldDesc::Rational, 5).unwrap();
        let stats = verify_configuration(&t.cfg).unwrap();
        assert_eq!((stats.j_count, stats.l_count), (3, 3));
    }

    #[test]
    fn generators_are_deterministic() {
        let a = tight_configuration(4, 3, FieldDesc::Rational, 11).unwrap();
        let b = tight_configuration(4, 3, FieldDesc::Rational, 11).unwrap();
        assert_eq!(a.cfg.to_json(), b.cfg.to_json());
        let c = tight_configuration(4, 3, FieldDesc::Rational, 12).unwrap();
        assert_ne!(a.cfg.to_json(), c.cfg.to_json());
    }

    #[test]
    fn projecting_the_tight_system_reduces_to_it() {
        // delta = 0: the projection is a generic linear change of coordinates
        let sys = crate::setsys::tight_system(4, 3);
        let cfg = project_generic(&sys, FieldDesc::Rational, 3).unwrap();
        let stats = verify_configuration(&cfg).unwrap();
        assert_eq!(stats.j_count, 4);
        assert_eq!(stats.l_count, 6);
    }

    #[test]
    fn bollobas_eccles_projection() {
        let cfg = bollobas_eccles_configuration(FieldDesc::Rational, 0).unwrap();
        let stats = verify_configuration(&cfg).unwrap();
        assert_eq!(cfg.dim, 4);
        assert_eq!(stats.j_count, 6);
        assert_eq!(stats.l_count, 12);
        assert!(stats.is_connected());
    }

    #[test]
    fn reguli_counts() {
        let cfg = reguli_configuration(2, ReguliPolicy::Deterministic).unwrap();
        let stats = verify_configuration(&cfg).unwrap();
        assert_eq!((stats.j_count, stats.l_count), (2, 5));

        let cfg = reguli_configuration(3, ReguliPolicy::Deterministic).unwrap();
        let stats = verify_configuration(&cfg).unwrap();
        assert_eq!((stats.j_count, stats.l_count), (9, 12));
    }

    #[test]
    fn reguli_deterministic_policy_falls_back_cleanly() {
        // n = 4 collides (5+13 = 7+11) and must fall back to seeded rationals
        let cfg = reguli_configuration(4, ReguliPolicy::Deterministic).unwrap();
        let stats = verify_configuration(&cfg).unwrap();
        assert_eq!((stats.j_count, stats.l_count), (24, 22));
    }
}
