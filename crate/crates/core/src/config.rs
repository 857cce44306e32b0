//! The geometric data model: points, lines, and joints with fixed per-joint
//! line labels, plus the structural predicates on them.
//!
//! A joint is a point lying on `d` labeled lines whose directions are
//! linearly independent. All checks here are exact rank computations over
//! the configured field; there is no floating-point geometry.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

use crate::algebra::{FieldDesc, Matrix, Scalar};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("index {index} out of range for {what}")]
    BadIndex { what: &'static str, index: usize },
    #[error("line {0} and line {1} are the same line")]
    DuplicateLine(usize, usize),
    #[error("line {0} has a zero direction vector")]
    ZeroDirection(usize),
    #[error("vector of length {got}, expected dimension {expected}")]
    WrongDimension { expected: usize, got: usize },
    #[error("joints {0} and {1} do not lie on a common labeled line")]
    NotCollinear(usize, usize),
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
    #[error("malformed configuration JSON: {0}")]
    BadJson(String),
}

#[derive(Clone, Debug)]
pub struct Line {
    /// Index into the configuration's point list.
    pub base: usize,
    pub dir: Vec<Scalar>,
    /// Degree-weighted bookkeeping; 1 for honest lines.
    pub deg: u32,
}

#[derive(Clone, Debug)]
pub struct Joint {
    pub point: usize,
    /// The d labeled lines through this joint, in a fixed order.
    pub lines: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct JointsConfiguration {
    pub field: FieldDesc,
    pub dim: usize,
    pub points: Vec<Vec<Scalar>>,
    pub lines: Vec<Line>,
    pub joints: Vec<Joint>,
    /// Allows degree > 1 bookkeeping on lines.
    pub curve_mode: bool,
    /// Free-form provenance notes carried through serialization.
    pub notes: Option<String>,
}

/// A single failed predicate from `verify_configuration`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    PointNotOnLine { joint: usize, line: usize },
    DependentDirections { joint: usize },
    DuplicateLabel { joint: usize, line: usize },
    BadDegree { line: usize, deg: u32 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::PointNotOnLine { joint, line } => {
                write!(f, "joint {joint}: its point does not lie on labeled line {line}")
            }
            Violation::DependentDirections { joint } => {
                write!(f, "joint {joint}: labeled directions are linearly dependent")
            }
            Violation::DuplicateLabel { joint, line } => {
                write!(f, "joint {joint}: line {line} appears twice among its labels")
            }
            Violation::BadDegree { line, deg } => {
                write!(f, "line {line}: degree {deg} requires curve mode")
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IncidenceStats {
    pub j_count: usize,
    pub l_count: usize,
    /// Joints on each line, counted through the joint labels.
    pub per_line_joints: Vec<usize>,
    /// Connected components of the joint set (joined by shared lines).
    pub components: Vec<Vec<usize>>,
}

impl IncidenceStats {
    pub fn is_connected(&self) -> bool {
        self.components.len() <= 1
    }
}

impl JointsConfiguration {
    pub fn d(&self) -> usize {
        self.dim
    }

    pub fn j_count(&self) -> usize {
        self.joints.len()
    }

    pub fn l_count(&self) -> usize {
        self.lines.len()
    }

    /// Total degree of the line set (equals `l_count` when all degrees are 1).
    pub fn total_degree(&self) -> u64 {
        self.lines.iter().map(|l| l.deg as u64).sum()
    }

    pub fn joint_point(&self, joint: usize) -> &[Scalar] {
        &self.points[self.joints[joint].point]
    }

    pub fn line_base(&self, line: usize) -> &[Scalar] {
        &self.points[self.lines[line].base]
    }

    /// Joints labeling each line. `p in l` always means "l is one of p's
    /// labeled lines", matching the fixed-label convention.
    pub fn joints_per_line(&self) -> Vec<Vec<usize>> {
        let mut per_line = vec![Vec::new(); self.lines.len()];
        for (ji, joint) in self.joints.iter().enumerate() {
            for &li in &joint.lines {
                per_line[li].push(ji);
            }
        }
        per_line
    }

    /// The frame at a joint: origin at its point, basis the labeled line
    /// directions in label order.
    pub fn frame_at(&self, joint: usize) -> crate::algebra::CoordinateFrame {
        let j = &self.joints[joint];
        crate::algebra::CoordinateFrame {
            origin: self.points[j.point].clone(),
            basis: j.lines.iter().map(|&li| self.lines[li].dir.clone()).collect(),
        }
    }

    /// Structural validation of indices, dimensions, and line distinctness.
    /// Geometric invariants live in `verify_configuration`.
    pub fn validate_shape(&self) -> Result<(), ConfigError> {
        for p in &self.points {
            if p.len() != self.dim {
                return Err(ConfigError::WrongDimension { expected: self.dim, got: p.len() });
            }
        }
        for (li, line) in self.lines.iter().enumerate() {
            if line.base >= self.points.len() {
                return Err(ConfigError::BadIndex { what: "line base point", index: line.base });
            }
            if line.dir.len() != self.dim {
                return Err(ConfigError::WrongDimension {
                    expected: self.dim,
                    got: line.dir.len(),
                });
            }
            if line.dir.iter().all(|c| c.is_zero()) {
                return Err(ConfigError::ZeroDirection(li));
            }
        }
        for joint in &self.joints {
            if joint.point >= self.points.len() {
                return Err(ConfigError::BadIndex { what: "joint point", index: joint.point });
            }
            if joint.lines.len() != self.dim {
                return Err(ConfigError::WrongDimension {
                    expected: self.dim,
                    got: joint.lines.len(),
                });
            }
            for &li in &joint.lines {
                if li >= self.lines.len() {
                    return Err(ConfigError::BadIndex { what: "joint line label", index: li });
                }
            }
        }
        for a in 0..self.lines.len() {
            for b in a + 1..self.lines.len() {
                if self.same_line(a, b) {
                    return Err(ConfigError::DuplicateLine(a, b));
                }
            }
        }
        Ok(())
    }

    fn same_line(&self, a: usize, b: usize) -> bool {
        let la = &self.lines[a];
        let lb = &self.lines[b];
        if !parallel(&la.dir, &lb.dir) {
            return false;
        }
        let diff = vec_sub(self.line_base(b), self.line_base(a));
        diff.iter().all(|c| c.is_zero()) || parallel(&la.dir, &diff)
    }

    pub fn point_on_line(&self, point: &[Scalar], line: usize) -> bool {
        let diff = vec_sub(point, self.line_base(line));
        diff.iter().all(|c| c.is_zero()) || parallel(&self.lines[line].dir, &diff)
    }
}

fn vec_sub(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

/// Exact test that `v` is a scalar multiple of the nonzero vector `u`.
fn parallel(u: &[Scalar], v: &[Scalar]) -> bool {
    let i = match u.iter().position(|c| !c.is_zero()) {
        Some(i) => i,
        None => return false,
    };
    let t = v[i].div(&u[i]).expect("u[i] is nonzero");
    u.iter().zip(v).all(|(ui, vi)| vi.sub(&ui.mul(&t)).is_zero())
}

/// Checks every invariant of the configuration by exact rank computation and
/// returns incidence statistics, or the full list of violations.
pub fn verify_configuration(
    cfg: &JointsConfiguration,
) -> Result<IncidenceStats, Vec<Violation>> {
    let mut violations = Vec::new();
    for (li, line) in cfg.lines.iter().enumerate() {
        if line.deg == 0 || (line.deg > 1 && !cfg.curve_mode) {
            violations.push(Violation::BadDegree { line: li, deg: line.deg });
        }
    }
    for (ji, joint) in cfg.joints.iter().enumerate() {
        let mut seen = BTreeSet::new();
        for &li in &joint.lines {
            if !seen.insert(li) {
                violations.push(Violation::DuplicateLabel { joint: ji, line: li });
            }
            if !cfg.point_on_line(&cfg.points[joint.point], li) {
                violations.push(Violation::PointNotOnLine { joint: ji, line: li });
            }
        }
        let dirs: Vec<Vec<Scalar>> =
            joint.lines.iter().map(|&li| cfg.lines[li].dir.clone()).collect();
        if Matrix::from_columns(&dirs).rank() != cfg.dim {
            violations.push(Violation::DependentDirections { joint: ji });
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }

    let per_line = cfg.joints_per_line();
    let per_line_joints: Vec<usize> = per_line.iter().map(|v| v.len()).collect();
    debug_assert_eq!(
        per_line_joints.iter().sum::<usize>(),
        cfg.dim * cfg.joints.len(),
        "double count of incidences"
    );

    // connected components over joints, two joints joined by a shared line
    let mut parent: Vec<usize> = (0..cfg.joints.len()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for joints in &per_line {
        for w in joints.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent[a] = b;
            }
        }
    }
    let mut comp_map: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for j in 0..cfg.joints.len() {
        let r = find(&mut parent, j);
        comp_map.entry(r).or_default().push(j);
    }

    Ok(IncidenceStats {
        j_count: cfg.joints.len(),
        l_count: cfg.lines.len(),
        per_line_joints,
        components: comp_map.into_values().collect(),
    })
}

/// A hyperplane through a joint, stored as a base point plus d-1 spanning
/// directions. Equality is exact span comparison; nothing is normalized.
struct Hyperplane {
    base: Vec<Scalar>,
    span: Vec<Vec<Scalar>>,
}

impl Hyperplane {
    fn dim(&self) -> usize {
        self.base.len()
    }

    fn contains_line(&self, base: &[Scalar], dir: &[Scalar]) -> bool {
        let d = self.dim();
        let mut cols = self.span.clone();
        cols.push(dir.to_vec());
        if Matrix::from_columns(&cols).rank() != d - 1 {
            return false;
        }
        let diff = vec_sub(base, &self.base);
        if diff.iter().all(|c| c.is_zero()) {
            return true;
        }
        *cols.last_mut().unwrap() = diff;
        Matrix::from_columns(&cols).rank() == d - 1
    }

    fn same_as(&self, other: &Hyperplane) -> bool {
        let d = self.dim();
        let mut cols = self.span.clone();
        cols.extend(other.span.iter().cloned());
        if Matrix::from_columns(&cols).rank() != d - 1 {
            return false;
        }
        let diff = vec_sub(&other.base, &self.base);
        if diff.iter().all(|c| c.is_zero()) {
            return true;
        }
        let mut cols = self.span.clone();
        cols.push(diff);
        Matrix::from_columns(&cols).rank() == d - 1
    }
}

/// Counts the distinct hyperplanes containing the common line of two collinear
/// joints, d-2 other labeled lines of the first, and d-2 other labeled lines
/// of the second. "Share all the hyperplanes" means the count is d-1.
pub fn shared_hyperplanes(
    cfg: &JointsConfiguration,
    a: usize,
    b: usize,
) -> Result<usize, ConfigError> {
    let d = cfg.dim;
    let ja = &cfg.joints[a];
    let jb = &cfg.joints[b];
    let common = ja
        .lines
        .iter()
        .find(|li| jb.lines.contains(li))
        .copied()
        .ok_or(ConfigError::NotCollinear(a, b))?;

    let pa = cfg.joint_point(a).to_vec();
    let others_a: Vec<usize> = ja.lines.iter().copied().filter(|&l| l != common).collect();
    let others_b: Vec<usize> = jb.lines.iter().copied().filter(|&l| l != common).collect();

    // candidate hyperplanes: span of the common line plus d-2 of a's other lines
    let mut shared: Vec<Hyperplane> = Vec::new();
    for skip in 0..others_a.len() {
        let mut span = vec![cfg.lines[common].dir.clone()];
        for (k, &li) in others_a.iter().enumerate() {
            if k != skip {
                span.push(cfg.lines[li].dir.clone());
            }
        }
        let h = Hyperplane { base: pa.clone(), span };
        if Matrix::from_columns(&h.span).rank() != d - 1 {
            continue; // degenerate candidate, not a hyperplane
        }
        let contained_b = others_b
            .iter()
            .filter(|&&li| h.contains_line(cfg.line_base(li), &cfg.lines[li].dir))
            .count();
        if contained_b >= d - 2 && !shared.iter().any(|g| g.same_as(&h)) {
            shared.push(h);
        }
    }
    Ok(shared.len())
}

/// One offending subset from `subset_ratio_scan`.
#[derive(Clone, Debug, Serialize)]
pub struct SubsetViolation {
    pub joints: Vec<usize>,
    pub inner_lines: usize,
    pub dummy_lines: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubsetScanReport {
    pub subsets_checked: u64,
    pub truncated: bool,
    pub violations: Vec<SubsetViolation>,
}

/// Scans proper nonempty joint subsets J' (up to `size_cap` joints) and
/// reports each one whose ratio J'/(L' + dummy) reaches J/L, where L' counts
/// lines entirely inside the subset and every outward incidence is replaced
/// by a dummy line. A violation is a necessary-condition failure for
/// criticality; an empty report does not certify criticality.
pub fn subset_ratio_scan(cfg: &JointsConfiguration, size_cap: usize) -> SubsetScanReport {
    let j = cfg.joints.len();
    let l = cfg.lines.len() as u64;
    let per_line = cfg.joints_per_line();
    let cap = size_cap.min(j.saturating_sub(1));
    let mut report = SubsetScanReport {
        subsets_checked: 0,
        truncated: cap < j.saturating_sub(1),
        violations: Vec::new(),
    };
    for size in 1..=cap {
        for subset in crate::combin::k_subsets(j, size) {
            report.subsets_checked += 1;
            let inside: Vec<bool> = {
                let mut v = vec![false; j];
                for &ji in &subset {
                    v[ji] = true;
                }
                v
            };
            let mut inner_lines = 0usize;
            let mut line_inner = vec![false; cfg.lines.len()];
            for (li, joints) in per_line.iter().enumerate() {
                if !joints.is_empty() && joints.iter().all(|&ji| inside[ji]) {
                    inner_lines += 1;
                    line_inner[li] = true;
                }
            }
            let mut dummy_lines = 0usize;
            for &ji in &subset {
                for &li in &cfg.joints[ji].lines {
                    if !line_inner[li] {
                        dummy_lines += 1;
                    }
                }
            }
            // J'/(L'+dummy) >= J/L, compared exactly in integers
            let lhs = subset.len() as u64 * l;
            let rhs = j as u64 * (inner_lines + dummy_lines) as u64;
            if lhs >= rhs {
                report.violations.push(SubsetViolation {
                    joints: subset.clone(),
                    inner_lines,
                    dummy_lines,
                });
            }
        }
    }
    report
}

// --- JSON interface ------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct LineJson {
    base: usize,
    dir: Vec<String>,
    #[serde(default = "one_u32")]
    deg: u32,
}

fn one_u32() -> u32 {
    1
}

#[derive(Serialize, Deserialize)]
struct JointJson {
    point: usize,
    lines: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ConfigJson {
    field: FieldDesc,
    dim: usize,
    points: Vec<Vec<String>>,
    lines: Vec<LineJson>,
    joints: Vec<JointJson>,
    #[serde(default)]
    curve_mode: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    notes: Option<String>,
}

impl JointsConfiguration {
    pub fn to_json(&self) -> serde_json::Value {
        let cs = |v: &[Scalar]| -> Vec<String> { v.iter().map(|s| s.canonical_string()).collect() };
        let raw = ConfigJson {
            field: self.field,
            dim: self.dim,
            points: self.points.iter().map(|p| cs(p)).collect(),
            lines: self
                .lines
                .iter()
                .map(|l| LineJson { base: l.base, dir: cs(&l.dir), deg: l.deg })
                .collect(),
            joints: self
                .joints
                .iter()
                .map(|j| JointJson { point: j.point, lines: j.lines.clone() })
                .collect(),
            curve_mode: self.curve_mode,
            notes: self.notes.clone(),
        };
        serde_json::to_value(raw).expect("config serializes")
    }

    /// Reinterprets a rational configuration over a prime field by reducing
    /// every coordinate mod p. The result is re-validated; reduction can
    /// degenerate a configuration that was fine over Q.
    pub fn to_field(&self, target: FieldDesc) -> Result<Self, ConfigError> {
        if self.field == target {
            return Ok(self.clone());
        }
        let (FieldDesc::Rational, FieldDesc::Prime { .. }) = (self.field, target) else {
            return Err(ConfigError::BadJson(
                "only rational configurations can be reduced to a prime field".into(),
            ));
        };
        let conv = |v: &[Scalar]| -> Result<Vec<Scalar>, ConfigError> {
            v.iter()
                .map(|s| {
                    target
                        .from_ratio(s.as_ratio().expect("rational source"))
                        .map_err(ConfigError::from)
                })
                .collect()
        };
        let cfg = JointsConfiguration {
            field: target,
            dim: self.dim,
            points: self.points.iter().map(|p| conv(p)).collect::<Result<_, _>>()?,
            lines: self
                .lines
                .iter()
                .map(|l| Ok(Line { base: l.base, dir: conv(&l.dir)?, deg: l.deg }))
                .collect::<Result<Vec<_>, ConfigError>>()?,
            joints: self.joints.clone(),
            curve_mode: self.curve_mode,
            notes: self.notes.clone(),
        };
        cfg.validate_shape()?;
        Ok(cfg)
    }

    /// Parses and shape-validates a configuration. Duplicate lines and
    /// malformed indices are rejected here.
    pub fn from_json(value: &serde_json::Value) -> Result<Self, ConfigError> {
        let raw: ConfigJson = serde_json::from_value(value.clone())
            .map_err(|e| ConfigError::BadJson(e.to_string()))?;
        let field = raw.field;
        if let FieldDesc::Prime { p } = field {
            if !crate::algebra::is_prime(p) {
                return Err(ConfigError::Algebra(crate::algebra::AlgebraError::NotPrime(p)));
            }
        }
        let parse_vec = |v: &[String]| -> Result<Vec<Scalar>, ConfigError> {
            v.iter().map(|s| field.parse_scalar(s).map_err(ConfigError::from)).collect()
        };
        let cfg = JointsConfiguration {
            field,
            dim: raw.dim,
            points: raw.points.iter().map(|p| parse_vec(p)).collect::<Result<_, _>>()?,
            lines: raw
                .lines
                .iter()
                .map(|l| Ok(Line { base: l.base, dir: parse_vec(&l.dir)?, deg: l.deg }))
                .collect::<Result<Vec<_>, ConfigError>>()?,
            joints: raw
                .joints
                .into_iter()
                .map(|j| Joint { point: j.point, lines: j.lines })
                .collect(),
            curve_mode: raw.curve_mode,
            notes: raw.notes,
        };
        cfg.validate_shape()?;
        Ok(cfg)
    }
}
