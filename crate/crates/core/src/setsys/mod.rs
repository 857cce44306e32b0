//! Set-theoretic joint set systems: the combinatorial abstraction of
//! generically induced configurations.
//!
//! A system carries families `F_1, ..., F_r` of `(d+delta-k_i)`-subsets of a
//! ground set together with a family `J` of `(d+delta)-subsets`, where
//! `d = sum k_i m_i`. A member `P` of `J` is certified by `s = sum m_i`
//! family members (m_i from family i) whose residuals `P \ F_j` are pairwise
//! disjoint (and partition `P` when `delta = 0`).

pub mod hypergraph;
pub mod shadow;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

pub use hypergraph::{
    joint_hypergraph, multiplicity_report, nu_star, packing_number, point_count_weight_check,
    weighted_corollary_check, JointHypergraph, MultReport, NuStarResult, PackingResult,
};
pub use shadow::{
    be_partial_shadow_certificate, partial_shadow, shadow_and_lovasz, PartialShadowMode,
    PartialShadowResult, ShadowError, ShadowResult,
};

#[derive(Debug, Error)]
pub enum SetSysError {
    #[error("system shape error: {0}")]
    Shape(String),
    #[error("family {family} member {member} has size {got}, expected {expected}")]
    MemberSize { family: usize, member: usize, got: usize, expected: usize },
    #[error("duplicate member {member} in family {family} (enable multiset mode)")]
    DuplicateMember { family: usize, member: usize },
    #[error("malformed set-system JSON: {0}")]
    BadJson(String),
}

/// `(J; F_1, ..., F_r)` with parameters `(k_i; m_i; delta)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JointSetSystem {
    pub k: Vec<u32>,
    pub m: Vec<u32>,
    #[serde(default)]
    pub delta: u32,
    pub ground: u32,
    #[serde(rename = "J")]
    pub joints: Vec<Vec<u32>>,
    #[serde(rename = "F")]
    pub families: Vec<Vec<Vec<u32>>>,
    #[serde(default)]
    pub multiset: bool,
}

/// One certifying selection: `(family, member index)` pairs, `m_i` per family.
pub type Certificate = Vec<(usize, usize)>;

#[derive(Clone, Debug, Serialize)]
pub struct SystemReport {
    pub ok: bool,
    /// Index-aligned with `J`: a replayable witness for each certified set.
    pub certificates: Vec<Option<Certificate>>,
    pub failures: Vec<usize>,
}

impl JointSetSystem {
    /// `d = sum k_i m_i`.
    pub fn d(&self) -> u32 {
        self.k.iter().zip(&self.m).map(|(&k, &m)| k * m).sum()
    }

    /// `s = sum m_i`, the number of members in a certificate.
    pub fn s(&self) -> u32 {
        self.m.iter().sum()
    }

    pub fn joint_size(&self) -> usize {
        (self.d() + self.delta) as usize
    }

    pub fn member_size(&self, family: usize) -> usize {
        (self.d() + self.delta - self.k[family]) as usize
    }

    pub fn validate(&self) -> Result<(), SetSysError> {
        if self.k.len() != self.m.len() || self.k.is_empty() {
            return Err(SetSysError::Shape("k and m must be nonempty and equal length".into()));
        }
        if self.families.len() != self.k.len() {
            return Err(SetSysError::Shape(format!(
                "{} families for {} classes",
                self.families.len(),
                self.k.len()
            )));
        }
        if self.k.iter().any(|&k| k == 0) || self.m.iter().any(|&m| m == 0) {
            return Err(SetSysError::Shape("k_i and m_i must be positive".into()));
        }
        let check_set = |set: &[u32], size: usize, family: usize, member: usize| {
            let distinct: BTreeSet<u32> = set.iter().copied().collect();
            if distinct.len() != set.len() || set.len() != size {
                return Err(SetSysError::MemberSize { family, member, got: set.len(), expected: size });
            }
            if set.iter().any(|&e| e == 0 || e > self.ground) {
                return Err(SetSysError::Shape(format!(
                    "element out of ground range in family {family} member {member}"
                )));
            }
            Ok(())
        };
        for (pi, p) in self.joints.iter().enumerate() {
            check_set(p, self.joint_size(), usize::MAX, pi)?;
        }
        for (fi, fam) in self.families.iter().enumerate() {
            let size = self.member_size(fi);
            let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
            for (mi, member) in fam.iter().enumerate() {
                check_set(member, size, fi, mi)?;
                let mut sorted = member.clone();
                sorted.sort_unstable();
                if !seen.insert(sorted) && !self.multiset {
                    return Err(SetSysError::DuplicateMember { family: fi, member: mi });
                }
            }
        }
        Ok(())
    }

    /// Finds one certificate for `P`, or `None`. With `geometric` set, each
    /// residual must have size exactly `k_i` (equivalently `F` is a subset of
    /// `P`), which is what a projected geometric realization needs.
    pub fn certify(&self, p: &[u32], geometric: bool) -> Option<Certificate> {
        self.search_certificates(p, geometric, Some(1)).into_iter().next()
    }

    /// Every certificate for `P`, in deterministic order.
    pub fn all_certificates(&self, p: &[u32], geometric: bool) -> Vec<Certificate> {
        self.search_certificates(p, geometric, None)
    }

    fn search_certificates(
        &self,
        p: &[u32],
        geometric: bool,
        limit: Option<usize>,
    ) -> Vec<Certificate> {
        let pset: BTreeSet<u32> = p.iter().copied().collect();
        let pos_of: std::collections::BTreeMap<u32, u32> =
            pset.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
        // candidate (member index, residual bitmask) pairs per family
        let mut candidates: Vec<Vec<(usize, u64)>> = Vec::new();
        for (fi, fam) in self.families.iter().enumerate() {
            let mut list = Vec::new();
            for (mi, member) in fam.iter().enumerate() {
                let mut mask = 0u64;
                for e in &pset {
                    if !member.contains(e) {
                        mask |= 1 << pos_of[e];
                    }
                }
                if geometric && mask.count_ones() != self.k[fi] {
                    continue;
                }
                list.push((mi, mask));
            }
            candidates.push(list);
        }
        let mut found = Vec::new();
        let mut chosen: Certificate = Vec::new();
        self.search_rec(0, 0, 0u64, &candidates, &mut chosen, &mut found, limit);
        found
    }

    #[allow(clippy::too_many_arguments)]
    fn search_rec(
        &self,
        family: usize,
        start: usize,
        used: u64,
        candidates: &[Vec<(usize, u64)>],
        chosen: &mut Certificate,
        found: &mut Vec<Certificate>,
        limit: Option<usize>,
    ) {
        if limit.is_some_and(|l| found.len() >= l) {
            return;
        }
        if family == self.families.len() {
            // delta = 0 requires the residuals to partition P
            if self.delta == 0 {
                let all: u64 = if self.joint_size() >= 64 {
                    u64::MAX
                } else {
                    (1u64 << self.joint_size()) - 1
                };
                if used != all {
                    return;
                }
            }
            found.push(chosen.clone());
            return;
        }
        let need = self.m[family] as usize;
        let have = chosen.iter().filter(|(f, _)| *f == family).count();
        if have == need {
            self.search_rec(family + 1, 0, used, candidates, chosen, found, limit);
            return;
        }
        let list = &candidates[family];
        for idx in start..list.len() {
            if list.len() - idx < need - have {
                break;
            }
            let (mi, mask) = list[idx];
            if used & mask != 0 {
                continue;
            }
            chosen.push((family, mi));
            self.search_rec(family, idx + 1, used | mask, candidates, chosen, found, limit);
            chosen.pop();
            if limit.is_some_and(|l| found.len() >= l) {
                return;
            }
        }
    }

    /// Certifies every member of `J`, returning replayable witnesses.
    pub fn verify(&self) -> SystemReport {
        let mut certificates = Vec::with_capacity(self.joints.len());
        let mut failures = Vec::new();
        for (pi, p) in self.joints.iter().enumerate() {
            let cert = self.certify(p, false);
            if cert.is_none() {
                failures.push(pi);
            }
            certificates.push(cert);
        }
        SystemReport { ok: failures.is_empty(), certificates, failures }
    }

    /// `|J|^(s-1) * prod |F_i|^(m_i)`, the integer form of the joints-to-lines
    /// ratio (monotone transform of `|J| / prod |F_i|^{m_i/(s-1)}`).
    pub fn ratio_numerator(&self) -> (BigInt, BigInt) {
        let s = self.s();
        let j = BigInt::from(self.joints.len() as u64).pow(s - 1);
        let mut f = BigInt::from(1u32);
        for (fam, &mi) in self.families.iter().zip(&self.m) {
            f *= BigInt::from(fam.len() as u64).pow(mi);
        }
        (j, f)
    }

    /// The real-valued ratio `|J| / prod |F_i|^{m_i/(s-1)}`.
    pub fn ratio(&self) -> f64 {
        let s = self.s() as f64;
        let mut denom = 1.0f64;
        for (fam, &mi) in self.families.iter().zip(&self.m) {
            denom *= (fam.len() as f64).powf(mi as f64 / (s - 1.0));
        }
        self.joints.len() as f64 / denom
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("system serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, SetSysError> {
        let sys: JointSetSystem = serde_json::from_value(value.clone())
            .map_err(|e| SetSysError::BadJson(e.to_string()))?;
        sys.validate()?;
        Ok(sys)
    }
}

/// Replaces every ground element by `n` copies. A member of size t becomes
/// the n^t sets choosing one copy per element, so `|J|` scales by
/// `n^(d+delta)` and `|F_i|` by `n^(d+delta-k_i)`. For `delta = 0` the
/// joints-to-lines ratio is preserved exactly (checked in integer
/// arithmetic); for `delta > 0` the two exponents genuinely differ.
pub fn blow_up(sys: &JointSetSystem, n: u32) -> JointSetSystem {
    assert!(n >= 1);
    let copies = |e: u32| -> Vec<u32> { ((e - 1) * n + 1..=e * n).collect() };
    let expand = |sets: &[Vec<u32>]| -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        for set in sets {
            let mut partial: Vec<Vec<u32>> = vec![Vec::new()];
            for &e in set {
                let mut next = Vec::with_capacity(partial.len() * n as usize);
                for stem in &partial {
                    for c in copies(e) {
                        let mut s = stem.clone();
                        s.push(c);
                        next.push(s);
                    }
                }
                partial = next;
            }
            out.extend(partial);
        }
        out
    };
    let blown = JointSetSystem {
        k: sys.k.clone(),
        m: sys.m.clone(),
        delta: sys.delta,
        ground: sys.ground * n,
        joints: expand(&sys.joints),
        families: sys.families.iter().map(|f| expand(f)).collect(),
        multiset: sys.multiset,
    };
    if sys.delta == 0 {
        let (j0, f0) = sys.ratio_numerator();
        let (j1, f1) = blown.ratio_numerator();
        assert_eq!(j1 * f0, j0 * f1, "blow-up must preserve the ratio identity");
    }
    blown
}

// --- named constructions --------------------------------------------------

/// The (2; 3) system on 8 elements: all 6-subsets as joints, and the 14-member
/// family built from two 4-cliques with a 3-edge-coloring. |J| = 28, |F| = 14,
/// and 7 |J|^2 = 2 |F|^3 exactly.
pub fn construction_2_3() -> JointSetSystem {
    let reds = [[1u32, 2], [3, 4]];
    let greens = [[1u32, 3], [2, 4]];
    let blues = [[1u32, 4], [2, 3]];
    let shift = |e: &[u32; 2]| -> [u32; 2] { [e[0] + 4, e[1] + 4] };
    let mut family: Vec<Vec<u32>> = vec![vec![1, 2, 3, 4], vec![5, 6, 7, 8]];
    for class in [reds, greens, blues] {
        for e1 in class {
            for e2 in class {
                let e2 = shift(&e2);
                family.push(vec![e1[0], e1[1], e2[0], e2[1]]);
            }
        }
    }
    let joints: Vec<Vec<u32>> = crate::combin::k_subsets(8, 6)
        .into_iter()
        .map(|s| s.into_iter().map(|e| e as u32 + 1).collect())
        .collect();
    JointSetSystem {
        k: vec![2],
        m: vec![3],
        delta: 0,
        ground: 8,
        joints,
        families: vec![family],
        multiset: false,
    }
}

/// The three-color block construction on `4k` elements: `|J| = 4^k` and each
/// color family has `2^k` members, giving `|J|^2 = 2^k |F_R| |F_G| |F_B|`.
pub fn construction_kkk(k: u32) -> JointSetSystem {
    assert!(k >= 1);
    let block = |i: u32| -> u32 { 4 * (i - 1) }; // block i occupies base+1..base+4
    let color_family = |pairs: [[u32; 2]; 2]| -> Vec<Vec<u32>> {
        // one edge per block, all 2^k combinations
        let mut members: Vec<Vec<u32>> = vec![Vec::new()];
        for i in 1..=k {
            let base = block(i);
            let mut next = Vec::with_capacity(members.len() * 2);
            for stem in &members {
                for e in pairs {
                    let mut s = stem.clone();
                    s.push(base + e[0]);
                    s.push(base + e[1]);
                    next.push(s);
                }
            }
            members = next;
        }
        members
    };
    let f_r = color_family([[1, 2], [3, 4]]);
    let f_g = color_family([[1, 3], [2, 4]]);
    let f_b = color_family([[1, 4], [2, 3]]);
    // joints: one 3-subset of each block
    let mut joints: Vec<Vec<u32>> = vec![Vec::new()];
    for i in 1..=k {
        let base = block(i);
        let mut next = Vec::with_capacity(joints.len() * 4);
        for stem in &joints {
            for drop in 1..=4 {
                let mut s = stem.clone();
                for e in 1..=4 {
                    if e != drop {
                        s.push(base + e);
                    }
                }
                next.push(s);
            }
        }
        joints = next;
    }
    JointSetSystem {
        k: vec![k, k, k],
        m: vec![1, 1, 1],
        delta: 0,
        ground: 4 * k,
        joints,
        families: vec![f_r, f_g, f_b],
        multiset: false,
    }
}

/// The 6-joint, 12-line system on 6 elements with delta = 1: all 5-subsets as
/// joints, all 4-subsets except three pairwise-disjoint-complement ones.
pub fn bollobas_eccles_system() -> JointSetSystem {
    let excluded: [Vec<u32>; 3] = [vec![1, 2, 3, 4], vec![1, 2, 5, 6], vec![3, 4, 5, 6]];
    let family: Vec<Vec<u32>> = crate::combin::k_subsets(6, 4)
        .into_iter()
        .map(|s| s.into_iter().map(|e| e as u32 + 1).collect::<Vec<u32>>())
        .filter(|s| !excluded.contains(s))
        .collect();
    let joints: Vec<Vec<u32>> = crate::combin::k_subsets(6, 5)
        .into_iter()
        .map(|s| s.into_iter().map(|e| e as u32 + 1).collect())
        .collect();
    JointSetSystem {
        k: vec![1],
        m: vec![4],
        delta: 1,
        ground: 6,
        joints,
        families: vec![family],
        multiset: false,
    }
}

/// The single 6-element joint set over all 4-subsets of `[6]` with (k; m) =
/// (2; 3): its certificate hypergraph has 15 vertices (the members, i.e.
/// complements of the pairs of a 6-point set) and 15 edges (the pair
/// partitions), with packing number 5.
pub fn pair_partition_system() -> JointSetSystem {
    JointSetSystem {
        k: vec![2],
        m: vec![3],
        delta: 0,
        ground: 6,
        joints: vec![vec![1, 2, 3, 4, 5, 6]],
        families: vec![crate::combin::k_subsets(6, 4)
            .into_iter()
            .map(|s| s.into_iter().map(|e| e as u32 + 1).collect())
            .collect()],
        multiset: false,
    }
}

/// The generically induced system of M hyperplanes for lines: joints are the
/// d-subsets of `[M]`, the single family holds the (d-1)-subsets.
pub fn tight_system(m: u32, d: u32) -> JointSetSystem {
    assert!(m >= d && d >= 1);
    let to_sets = |k: usize| -> Vec<Vec<u32>> {
        crate::combin::k_subsets(m as usize, k)
            .into_iter()
            .map(|s| s.into_iter().map(|e| e as u32 + 1).collect())
            .collect()
    };
    JointSetSystem {
        k: vec![1],
        m: vec![d],
        delta: 0,
        ground: m,
        joints: to_sets(d as usize),
        families: vec![to_sets(d as usize - 1)],
        multiset: false,
    }
}

/// The multiset construction showing the packing multiplicity reaches d!:
/// family i holds `m_i * k_i! * (d-k_i)!` copies of each `(d-k_i)`-subset of
/// `[M]`, joints are the d-subsets.
pub fn multiset_tight_system(m: u32, k: &[u32], mult: &[u32]) -> JointSetSystem {
    let d: u32 = k.iter().zip(mult).map(|(&ki, &mi)| ki * mi).sum();
    assert!(m >= d);
    let mut families = Vec::new();
    for (&ki, &mi) in k.iter().zip(mult) {
        let copies = mi as u64
            * u64::try_from(crate::bounds::factorial(ki as u64)).unwrap()
            * u64::try_from(crate::bounds::factorial((d - ki) as u64)).unwrap();
        let mut fam = Vec::new();
        for s in crate::combin::k_subsets(m as usize, (d - ki) as usize) {
            let set: Vec<u32> = s.into_iter().map(|e| e as u32 + 1).collect();
            for _ in 0..copies {
                fam.push(set.clone());
            }
        }
        families.push(fam);
    }
    let joints: Vec<Vec<u32>> = crate::combin::k_subsets(m as usize, d as usize)
        .into_iter()
        .map(|s| s.into_iter().map(|e| e as u32 + 1).collect())
        .collect();
    JointSetSystem {
        k: k.to_vec(),
        m: mult.to_vec(),
        delta: 0,
        ground: m,
        joints,
        families,
        multiset: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_2_3_counts_and_identity() {
        let sys = construction_2_3();
        sys.validate().unwrap();
        assert_eq!(sys.joints.len(), 28);
        assert_eq!(sys.families[0].len(), 14);
        // 7 * 28^2 = 2 * 14^3 = 5488
        assert_eq!(7 * 28u64 * 28, 2 * 14u64 * 14 * 14);
        let report = sys.verify();
        assert!(report.ok);
    }

    #[test]
    fn one_d_zero_system_certifies_iff_full_shadow_present() {
        // (1; d; 0): P certifiable iff all d of its (d-1)-subsets are members
        let mut sys = tight_system(4, 3);
        assert!(sys.verify().ok);
        // drop one 2-subset of {1,2,3}: that joint must now fail
        let victim = vec![1u32, 2];
        sys.families[0].retain(|s| *s != victim);
        let report = sys.verify();
        assert!(!report.ok);
        // exactly the joints containing both 1 and 2 lose their certificate
        assert_eq!(report.failures, vec![0, 1]); // {1,2,3} and {1,2,4}
        assert!(report.certificates[2].is_some()); // {1,3,4}
        assert!(report.certificates[3].is_some()); // {2,3,4}
    }

    #[test]
    fn kkk_small_cases() {
        let sys = construction_kkk(1);
        sys.validate().unwrap();
        assert_eq!(sys.joints.len(), 4);
        assert_eq!(sys.families.iter().map(|f| f.len()).collect::<Vec<_>>(), vec![2, 2, 2]);
        assert!(sys.verify().ok);
        // k = 1 instance: {1,2,3} certified by residuals {3},{2},{1}
        let cert = sys.certify(&[1, 2, 3], false).unwrap();
        assert_eq!(cert.len(), 3);

        for k in 2..=4u32 {
            let sys = construction_kkk(k);
            sys.validate().unwrap();
            assert_eq!(sys.joints.len(), 4usize.pow(k));
            assert!(sys.families.iter().all(|f| f.len() == 2usize.pow(k)));
            assert!(sys.verify().ok, "kkk({k}) verifies");
        }
    }

    #[test]
    fn be_system_verifies_with_delta_one() {
        let sys = bollobas_eccles_system();
        sys.validate().unwrap();
        assert_eq!(sys.joints.len(), 6);
        assert_eq!(sys.families[0].len(), 12);
        let report = sys.verify();
        assert!(report.ok);
        // geometric certificates (members inside P) also exist for every P
        for p in &sys.joints {
            let cert = sys.certify(p, true).unwrap();
            assert_eq!(cert.len(), 4);
            for &(f, mi) in &cert {
                let member = &sys.families[f][mi];
                assert!(member.iter().all(|e| p.contains(e)));
            }
        }
    }

    #[test]
    fn blow_up_identity_and_counts() {
        let sys = construction_2_3();
        assert_eq!(blow_up(&sys, 1).joints.len(), 28);
        let b2 = blow_up(&sys, 2);
        b2.validate().unwrap();
        assert_eq!(b2.families[0].len(), 224); // 14 * 2^4
        assert_eq!(b2.joints.len(), 1792); // 28 * 2^6
        assert!((b2.ratio() - sys.ratio()).abs() < 1e-12);
        assert!(b2.verify().ok);
    }

    #[test]
    fn multiset_tight_edge_count() {
        // d = 3, k = 1, m = 3 with M = 3: one joint, 6 copies of each of the
        // three 2-subsets, certificates pick one copy of each: 6^3 = 216.
        let sys = multiset_tight_system(3, &[1], &[3]);
        sys.validate().unwrap();
        assert_eq!(sys.joints.len(), 1);
        assert_eq!(sys.families[0].len(), 18);
        let all = sys.all_certificates(&[1, 2, 3], false);
        assert_eq!(all.len(), 216);
    }

    #[test]
    fn json_round_trip() {
        let sys = construction_2_3();
        let v = sys.to_json();
        let back = JointSetSystem::from_json(&v).unwrap();
        assert_eq!(back.joints.len(), 28);
        assert_eq!(back.families[0].len(), 14);
    }
}
