//! Per-joint certificate hypergraphs and their multiplicities: the edge
//! count M(p), the packing number nu(p), and the entropy multiplicity
//! nu*(p) = max_mu prod_V mu(V)^(-mu(V)/s) over edge distributions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::JointSetSystem;
use crate::bounds::factorial;
use crate::real::BigFloat;

/// The s-uniform hypergraph of certifying selections at one joint set.
/// Vertices are the participating family members; edges are certificates.
#[derive(Clone, Debug)]
pub struct JointHypergraph {
    pub s: usize,
    pub m: Vec<u32>,
    /// Family index of each vertex.
    pub vertex_class: Vec<usize>,
    /// Original (family, member) identity of each vertex.
    pub vertex_member: Vec<(usize, usize)>,
    /// Sorted vertex lists, one per certificate.
    pub edges: Vec<Vec<usize>>,
}

impl JointHypergraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_class.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// A hypergraph with the given disjoint edges, for direct construction in
    /// tests and reports.
    pub fn disjoint_edges(count: usize, s: usize) -> JointHypergraph {
        let edges: Vec<Vec<usize>> =
            (0..count).map(|e| (e * s..(e + 1) * s).collect()).collect();
        JointHypergraph {
            s,
            m: vec![s as u32],
            vertex_class: vec![0; count * s],
            vertex_member: (0..count * s).map(|v| (0, v)).collect(),
            edges,
        }
    }
}

/// Builds G_p for one member `p` of the joint family: vertices are the
/// members participating in at least one certificate, edges the certificates.
pub fn joint_hypergraph(sys: &JointSetSystem, p: &[u32]) -> JointHypergraph {
    let certs = sys.all_certificates(p, false);
    let mut vertex_ids: std::collections::BTreeMap<(usize, usize), usize> = Default::default();
    let mut vertex_class = Vec::new();
    let mut vertex_member = Vec::new();
    let mut edges = Vec::with_capacity(certs.len());
    for cert in &certs {
        let mut edge = Vec::with_capacity(cert.len());
        for &(f, mi) in cert {
            let next = vertex_ids.len();
            let id = *vertex_ids.entry((f, mi)).or_insert(next);
            if id == vertex_class.len() {
                vertex_class.push(f);
                vertex_member.push((f, mi));
            }
            edge.push(id);
        }
        edge.sort_unstable();
        edges.push(edge);
    }
    JointHypergraph {
        s: sys.s() as usize,
        m: sys.m.clone(),
        vertex_class,
        vertex_member,
        edges,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PackingResult {
    pub lower: u32,
    pub upper: u32,
    pub exact: bool,
    pub nodes: u64,
}

impl PackingResult {
    pub fn value(&self) -> u32 {
        assert!(self.exact, "packing number only bounded: [{}, {}]", self.lower, self.upper);
        self.lower
    }
}

/// Exact maximum number of pairwise disjoint edges, by branch and bound with
/// a greedy lower bound and a vertex-count upper bound. If the node budget
/// runs out the result carries certified bounds instead.
pub fn packing_number(g: &JointHypergraph, node_budget: u64) -> PackingResult {
    assert!(g.vertex_count() <= 128, "packing search expects at most 128 vertices");
    let masks: Vec<u128> = g
        .edges
        .iter()
        .map(|e| e.iter().fold(0u128, |m, &v| m | (1u128 << v)))
        .collect();

    // greedy seed
    let mut greedy = 0u32;
    let mut used = 0u128;
    for m in &masks {
        if used & m == 0 {
            used |= m;
            greedy += 1;
        }
    }

    struct Search<'a> {
        masks: &'a [u128],
        s: u32,
        best: u32,
        nodes: u64,
        budget: u64,
        exceeded: bool,
    }
    impl Search<'_> {
        fn rec(&mut self, start: usize, used: u128, count: u32) {
            self.nodes += 1;
            if self.nodes > self.budget {
                self.exceeded = true;
                return;
            }
            if count > self.best {
                self.best = count;
            }
            let mut free_union = 0u128;
            let mut avail = 0u32;
            for m in &self.masks[start..] {
                if used & m == 0 {
                    avail += 1;
                    free_union |= m;
                }
            }
            let ub = count + avail.min(free_union.count_ones() / self.s);
            if ub <= self.best {
                return;
            }
            for i in start..self.masks.len() {
                if self.exceeded {
                    return;
                }
                let m = self.masks[i];
                if used & m == 0 {
                    self.rec(i + 1, used | m, count + 1);
                }
            }
        }
    }
    let mut search = Search {
        masks: &masks,
        s: g.s as u32,
        best: greedy,
        nodes: 0,
        budget: node_budget,
        exceeded: false,
    };
    search.rec(0, 0, 0);
    let upper = if search.exceeded {
        (g.vertex_count() as u32) / g.s as u32
    } else {
        search.best
    };
    PackingResult {
        lower: search.best,
        upper: upper.max(search.best),
        exact: !search.exceeded,
        nodes: search.nodes,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NuStarResult {
    /// `exp` of the best entropy objective found: a certified lower bound.
    pub value: f64,
    /// Residual duality gap in log-value; the true optimum lies within
    /// `[value, value * exp(log_gap)]`.
    pub log_gap: f64,
    pub iterations: u64,
    /// Mirror ascent never accepted an objective decrease.
    pub ascent_monotone: bool,
    pub mu: Vec<f64>,
}

/// Maximizes `sum_V -(mu(V)/s) ln mu(V)` over probability distributions on
/// the edges by entropic mirror ascent with multistart; returns `exp` of the
/// optimum. The objective is concave (marginals are linear in mu), so the
/// gradient gap certifies near-optimality.
pub fn nu_star(g: &JointHypergraph, tol_log: f64, seed: u64) -> NuStarResult {
    assert!(g.edge_count() >= 1);
    let n_edges = g.edge_count();
    let s = g.s as f64;
    let objective = |marg: &[f64]| -> f64 {
        marg.iter().map(|&m| if m > 0.0 { -(m / s) * m.ln() } else { 0.0 }).sum()
    };
    let marginals = |mu: &[f64]| -> Vec<f64> {
        let mut marg = vec![0.0; g.vertex_count()];
        for (e, &w) in g.edges.iter().zip(mu) {
            for &v in e {
                marg[v] += w;
            }
        }
        marg
    };
    let gradient = |marg: &[f64]| -> Vec<f64> {
        g.edges
            .iter()
            .map(|e| {
                let mut acc = 0.0;
                for &v in e {
                    acc += 1.0 + marg[v].max(1e-300).ln();
                }
                -acc / s
            })
            .collect()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<NuStarResult> = None;
    let starts = 8;
    for start in 0..starts {
        let mut mu: Vec<f64> = if start == 0 {
            vec![1.0 / n_edges as f64; n_edges]
        } else {
            let raw: Vec<f64> = (0..n_edges).map(|_| rng.random_range(0.05..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / sum).collect()
        };
        let mut obj = objective(&marginals(&mu));
        let mut eta = 1.0f64;
        let mut monotone = true;
        let mut iterations = 0u64;
        let mut gap = f64::INFINITY;
        for _ in 0..200_000u64 {
            iterations += 1;
            let marg = marginals(&mu);
            let grad = gradient(&marg);
            let gmax = grad.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let gavg: f64 = grad.iter().zip(&mu).map(|(g, m)| g * m).sum();
            gap = gmax - gavg;
            if gap <= tol_log {
                break;
            }
            // multiplicative update with backtracking to keep ascent monotone
            let mut accepted = false;
            for _ in 0..60 {
                let mut cand: Vec<f64> = mu
                    .iter()
                    .zip(&grad)
                    .map(|(m, g)| m * (eta * (g - gmax)).exp())
                    .collect();
                let z: f64 = cand.iter().sum();
                for c in cand.iter_mut() {
                    *c /= z;
                }
                let cand_obj = objective(&marginals(&cand));
                if cand_obj >= obj - 1e-14 {
                    mu = cand;
                    obj = cand_obj.max(obj);
                    accepted = true;
                    break;
                }
                eta *= 0.5;
            }
            if !accepted {
                monotone = false;
                break;
            }
            eta = (eta * 1.25).min(4.0);
        }
        let candidate = NuStarResult {
            value: obj.exp(),
            log_gap: gap.max(0.0),
            iterations,
            ascent_monotone: monotone,
            mu,
        };
        let better = match &best {
            None => true,
            Some(b) => candidate.value > b.value,
        };
        if better {
            best = Some(candidate);
        }
    }
    best.expect("at least one start")
}

#[derive(Clone, Debug, Serialize)]
pub struct JointMult {
    pub joint: usize,
    pub edge_count: u64,
    pub nu: u32,
    pub nu_exact: bool,
    pub nu_star: f64,
    pub nu_star_gap: f64,
    /// nu* >= nu within tolerance.
    pub packing_bound_ok: bool,
    /// nu* >= (prod m_i!/m_i^{m_i} * M(p))^{1/s} within tolerance.
    pub entropy_bound_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MultReport {
    pub per_joint: Vec<JointMult>,
    /// `sum_p nu*(p)^{s/(s-1)}` evaluated with each joint's upper estimate.
    pub sum_power: f64,
    /// `C * (prod deg V_i^{m_i})^{1/(s-1)}`.
    pub rhs_bound: f64,
    pub aggregate_ok: bool,
    pub ok: bool,
}

/// Per-joint multiplicities with the two lower-bound inequalities checked,
/// plus the aggregate power-sum bound. Any violation beyond `tol` trips the
/// corresponding flag and the overall `ok`.
pub fn multiplicity_report(sys: &JointSetSystem, tol: f64, seed: u64) -> MultReport {
    let s = sys.s() as f64;
    let mut per_joint = Vec::new();
    let mut sum_power = 0.0f64;
    for (pi, p) in sys.joints.iter().enumerate() {
        let g = joint_hypergraph(sys, p);
        let m_count = g.edge_count() as u64;
        let packing = packing_number(&g, 10_000_000);
        let ns = nu_star(&g, 1e-6_f64.min(tol), seed.wrapping_add(pi as u64));
        let upper_estimate = ns.value * ns.log_gap.exp();
        sum_power += upper_estimate.powf(s / (s - 1.0));
        let entropy_floor = {
            let mut prod = 1.0f64;
            for &mi in &sys.m {
                prod *= factorial(mi as u64).to_f64().unwrap()
                    / (mi as f64).powi(mi as i32);
            }
            (prod * m_count as f64).powf(1.0 / s)
        };
        per_joint.push(JointMult {
            joint: pi,
            edge_count: m_count,
            nu: packing.lower,
            nu_exact: packing.exact,
            nu_star: ns.value,
            nu_star_gap: ns.log_gap,
            packing_bound_ok: upper_estimate >= packing.lower as f64 - tol,
            entropy_bound_ok: upper_estimate >= entropy_floor - tol,
        });
    }
    let constant = crate::bounds::constant_c(
        &sys.k,
        &sys.m,
        crate::bounds::ConstantVariant::NuStar,
        crate::real::DEFAULT_PREC,
    )
    .expect("nu-star constant");
    let mut deg_prod = 1.0f64;
    for (fam, &mi) in sys.families.iter().zip(&sys.m) {
        deg_prod *= (fam.len() as f64).powi(mi as i32);
    }
    let rhs_bound = constant.to_f64() * deg_prod.powf(1.0 / (s - 1.0));
    let aggregate_ok = sum_power <= rhs_bound + tol;
    let ok = aggregate_ok
        && per_joint.iter().all(|j| j.packing_bound_ok && j.entropy_bound_ok && j.nu_exact);
    MultReport { per_joint, sum_power, rhs_bound, aggregate_ok, ok }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightedReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub ok: bool,
}

/// The weighted joints inequality for a chosen certificate per joint:
/// `sum_p prod_{V in cert(p)} w(V)^{1/(s-1)} <= C * prod_i w(V_i)^{m_i/(s-1)}`
/// where `w(V_i) = sum_{V in F_i} w(V)`. Weights are exact rationals; the
/// fractional powers are evaluated in high-precision floats.
pub fn weighted_corollary_check(
    sys: &JointSetSystem,
    weights: &[Vec<BigRational>],
    tol: f64,
) -> WeightedReport {
    let s = sys.s();
    let prec = crate::real::DEFAULT_PREC;
    let report = sys.verify();
    assert!(report.ok, "weighted check needs a fully certified system");
    assert!(weights
        .iter()
        .zip(&sys.families)
        .all(|(w, f)| w.len() == f.len() && w.iter().all(|x| !x.is_negative())));

    let mut lhs = BigFloat::zero(prec);
    for cert in report.certificates.iter().flatten() {
        let mut prod = BigRational::one();
        for &(f, mi) in cert {
            prod *= &weights[f][mi];
        }
        lhs = lhs.add(&BigFloat::from_rational(&prod, prec).nth_root(s - 1));
    }
    let constant =
        crate::bounds::constant_c(&sys.k, &sys.m, crate::bounds::ConstantVariant::NuStar, prec)
            .expect("nu-star constant");
    let mut class_prod = BigRational::one();
    for (w, &mi) in weights.iter().zip(&sys.m) {
        let total: BigRational = w.iter().sum();
        class_prod *= pow_rational(&total, mi);
    }
    let rhs = constant.mul(&BigFloat::from_rational(&class_prod, prec).nth_root(s - 1));
    let lhs_f = lhs.to_f64();
    let rhs_f = rhs.to_f64();
    WeightedReport { lhs: lhs_f, rhs: rhs_f, slack: rhs_f - lhs_f, ok: lhs_f <= rhs_f + tol }
}

fn pow_rational(r: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= r;
    }
    acc
}

#[derive(Clone, Debug, Serialize)]
pub struct PointCountReport {
    /// `w(V_i) = m_i * J` held exactly for every class.
    pub class_weight_identity: bool,
    /// Power-mean inequality `(1/J) sum_p w(p)^{1/(s-1)} <= (d! J / prod k_i!^{m_i})^{1/(s-1)}`.
    pub power_mean_lhs: f64,
    pub power_mean_rhs: f64,
    pub weighted: WeightedReport,
    pub ok: bool,
}

/// Weighted corollary specialized to incidence-count weights
/// `w(V) = #{p : V in cert(p)}`.
pub fn point_count_weight_check(sys: &JointSetSystem, tol: f64) -> PointCountReport {
    let report = sys.verify();
    assert!(report.ok, "point-count check needs a fully certified system");
    let mut counts: Vec<Vec<u64>> = sys.families.iter().map(|f| vec![0u64; f.len()]).collect();
    for cert in report.certificates.iter().flatten() {
        for &(f, mi) in cert {
            counts[f][mi] += 1;
        }
    }
    let j = sys.joints.len() as u64;
    let class_weight_identity = counts
        .iter()
        .zip(&sys.m)
        .all(|(c, &mi)| c.iter().sum::<u64>() == mi as u64 * j);

    let weights: Vec<Vec<BigRational>> = counts
        .iter()
        .map(|c| c.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect();
    let weighted = weighted_corollary_check(sys, &weights, tol);

    let s = sys.s();
    let prec = crate::real::DEFAULT_PREC;
    let mut lhs = BigFloat::zero(prec);
    for cert in report.certificates.iter().flatten() {
        let mut omega = BigInt::one();
        for &(f, mi) in cert {
            omega *= BigInt::from(counts[f][mi]);
        }
        lhs = lhs.add(&BigFloat::from_bigint(&omega, prec).nth_root(s - 1));
    }
    let power_mean_lhs = lhs.div_u64(j).to_f64();
    let mut denom = BigInt::one();
    for (&ki, &mi) in sys.k.iter().zip(&sys.m) {
        denom *= factorial(ki as u64).pow(mi);
    }
    let rhs_base = BigRational::new(factorial(sys.d() as u64) * BigInt::from(j), denom);
    let power_mean_rhs = BigFloat::from_rational(&rhs_base, prec).nth_root(s - 1).to_f64();
    let ok = class_weight_identity && weighted.ok && power_mean_lhs <= power_mean_rhs + tol;
    PointCountReport { class_weight_identity, power_mean_lhs, power_mean_rhs, weighted, ok }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setsys::{construction_2_3, multiset_tight_system, tight_system};

    /// All 4-subsets of [6] as one class with m = 3: the certificates at the
    /// full 6-set are the perfect matchings of K6 seen through complements.
    fn pair_partition_15() -> (JointSetSystem, JointHypergraph) {
        let sys = crate::setsys::pair_partition_system();
        let g = joint_hypergraph(&sys, &[1, 2, 3, 4, 5, 6]);
        (sys, g)
    }

    #[test]
    fn pair_partition_graph_shape() {
        let (_, g) = pair_partition_15();
        assert_eq!(g.vertex_count(), 15);
        assert_eq!(g.edge_count(), 15);
        // every vertex lies in exactly 3 edges
        let mut deg = [0u32; 15];
        for e in &g.edges {
            for &v in e {
                deg[v] += 1;
            }
        }
        assert!(deg.iter().all(|&d| d == 3));
    }

    #[test]
    fn packing_numbers() {
        let (_, g) = pair_partition_15();
        let p = packing_number(&g, 1_000_000);
        assert!(p.exact);
        assert_eq!(p.value(), 5);

        let disjoint = JointHypergraph::disjoint_edges(4, 3);
        assert_eq!(packing_number(&disjoint, 1000).value(), 4);

        let single = JointHypergraph::disjoint_edges(1, 3);
        assert_eq!(packing_number(&single, 1000).value(), 1);
    }

    #[test]
    fn nu_star_single_edge_is_one() {
        let g = JointHypergraph::disjoint_edges(1, 4);
        let r = nu_star(&g, 1e-8, 7);
        assert!((r.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn nu_star_perfect_matching_is_count() {
        let g = JointHypergraph::disjoint_edges(5, 3);
        let r = nu_star(&g, 1e-8, 7);
        assert!((r.value - 5.0).abs() < 1e-4);
        assert!(r.ascent_monotone);
    }

    #[test]
    fn nu_star_pair_partition_is_five() {
        let (_, g) = pair_partition_15();
        let r = nu_star(&g, 1e-8, 7);
        assert!((r.value - 5.0).abs() < 1e-4, "got {}", r.value);
    }

    #[test]
    fn multiset_tight_packing_reaches_d_factorial() {
        let sys = multiset_tight_system(3, &[1], &[3]);
        let g = joint_hypergraph(&sys, &[1, 2, 3]);
        assert_eq!(g.edge_count(), 216);
        let p = packing_number(&g, 10_000_000);
        assert!(p.exact);
        assert_eq!(p.value(), 6); // d! = 3!
    }

    #[test]
    fn single_certificate_report_is_tight() {
        // one joint, one certificate: M = 1, nu = nu* = 1
        let sys = tight_system(2, 2);
        let g = joint_hypergraph(&sys, &[1, 2]);
        assert_eq!(g.edge_count(), 1);
        let rep = multiplicity_report(&sys, 1e-6, 3);
        assert!(rep.ok);
        assert_eq!(rep.per_joint[0].nu, 1);
        assert!((rep.per_joint[0].nu_star - 1.0).abs() < 1e-6);
    }

    #[test]
    fn multiplicity_report_on_2_3() {
        let rep = multiplicity_report(&construction_2_3(), 1e-4, 3);
        assert!(rep.ok, "aggregate {} vs {}", rep.sum_power, rep.rhs_bound);
    }

    #[test]
    fn point_count_weights_on_tight_system() {
        let sys = tight_system(5, 3);
        let rep = point_count_weight_check(&sys, 1e-9);
        assert!(rep.class_weight_identity);
        assert!(rep.ok);
    }

    #[test]
    fn uniform_weights_reduce_to_unweighted_bound() {
        let sys = tight_system(4, 2);
        let weights: Vec<Vec<BigRational>> =
            sys.families.iter().map(|f| vec![BigRational::one(); f.len()]).collect();
        let rep = weighted_corollary_check(&sys, &weights, 1e-9);
        // lhs = J, rhs = C * |F|^{m/(s-1)}
        assert!((rep.lhs - sys.joints.len() as f64).abs() < 1e-9);
        assert!(rep.ok);
    }

    #[test]
    fn star_configuration_power_mean() {
        // central joint {1,2} plus 5 extra joints on each of its two members
        let n = 5u32;
        let mut joints = vec![vec![1u32, 2]];
        let mut family = vec![vec![1u32], vec![2]];
        let mut next = 3u32;
        for &center in &[1u32, 2] {
            for _ in 0..n {
                joints.push(vec![center, next]);
                family.push(vec![next]);
                next += 1;
            }
        }
        let sys = JointSetSystem {
            k: vec![1],
            m: vec![2],
            delta: 0,
            ground: next - 1,
            joints,
            families: vec![family],
            multiset: false,
        };
        sys.validate().unwrap();
        let rep = point_count_weight_check(&sys, 1e-9);
        assert!(rep.class_weight_identity);
        assert!(rep.ok);
        // direct evaluation: sum of omega(p) = (n+1)^2 + 2n(n+1), J = 2n+1
        let expect = ((n + 1) * (n + 1) + 2 * n * (n + 1)) as f64 / (2 * n + 1) as f64;
        assert!((rep.power_mean_lhs - expect).abs() < 1e-9);
    }
}
