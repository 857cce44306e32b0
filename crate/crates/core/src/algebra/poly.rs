//! Sparse multivariate polynomials with Hasse derivatives and exact
//! multiplicity computations.
//!
//! The Hasse derivative `H^a f` is defined by the expansion
//! `f(x + y) = sum_a H^a f(x) * y^a`; it behaves well in positive
//! characteristic where the formal derivative degenerates.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::One;
use serde_json::json;
use std::collections::BTreeMap;

use super::scalar::{FieldDesc, Scalar};
use super::AlgebraError;

/// Multiplicity of a polynomial at a point or along a line. The zero
/// polynomial has infinite multiplicity everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mult {
    Finite(u32),
    Infinite,
}

impl Mult {
    pub fn at_least(&self, v: u32) -> bool {
        match self {
            Mult::Finite(m) => *m >= v,
            Mult::Infinite => true,
        }
    }
}

/// A sparse multivariate polynomial. Terms map exponent vectors to nonzero
/// coefficients; the zero polynomial has an empty term map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    dim: usize,
    field: FieldDesc,
    terms: BTreeMap<Vec<u32>, Scalar>,
}

impl MultiPoly {
    pub fn zero(dim: usize, field: FieldDesc) -> Self {
        MultiPoly { dim, field, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Scalar) -> Self {
        let field = c.field();
        let mut poly = MultiPoly::zero(dim, field);
        poly.add_term(vec![0; dim], c);
        poly
    }

    pub fn one(dim: usize, field: FieldDesc) -> Self {
        MultiPoly::constant(dim, field.one())
    }

    pub fn monomial(dim: usize, exps: Vec<u32>, c: Scalar) -> Self {
        assert_eq!(exps.len(), dim);
        let field = c.field();
        let mut poly = MultiPoly::zero(dim, field);
        poly.add_term(exps, c);
        poly
    }

    /// The variable `x_i`.
    pub fn var(dim: usize, i: usize, field: FieldDesc) -> Self {
        let mut exps = vec![0; dim];
        exps[i] = 1;
        MultiPoly::monomial(dim, exps, field.one())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> FieldDesc {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Scalar {
        self.terms.get(exps).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Adds `c * x^exps`, dropping the term if the sum cancels.
    pub fn add_term(&mut self, exps: Vec<u32>, c: Scalar) {
        assert_eq!(exps.len(), self.dim);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.scale(&self.field.from_i64(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> MultiPoly {
        let mut out = MultiPoly::zero(self.dim, self.field);
        if c.is_zero() {
            return out;
        }
        for (e, a) in &self.terms {
            out.terms.insert(e.clone(), a.mul(c));
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, other.dim);
        let mut out = MultiPoly::zero(self.dim, self.field);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exps, ca.mul(cb));
            }
        }
        out
    }

    pub fn pow(&self, mut n: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = MultiPoly::one(self.dim, self.field);
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

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.dim);
        let mut acc = self.field.zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &ei) in e.iter().enumerate() {
                for _ in 0..ei {
                    term = term.mul(&point[i]);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Hasse derivative `H^alpha f = sum_{b >= alpha} C(b, alpha) c_b x^{b-alpha}`,
    /// with the componentwise binomial computed over the integers and then
    /// reduced into the field.
    pub fn hasse_derivative(&self, alpha: &[u32]) -> Result<MultiPoly, AlgebraError> {
        if alpha.len() != self.dim {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.dim,
                got: alpha.len(),
            });
        }
        let mut out = MultiPoly::zero(self.dim, self.field);
        for (e, c) in &self.terms {
            if e.iter().zip(alpha).any(|(b, a)| b < a) {
                continue;
            }
            let mut binom = BigInt::one();
            for (b, a) in e.iter().zip(alpha) {
                binom *= binomial(BigInt::from(*b), BigInt::from(*a));
            }
            let coef = c.mul(&self.field.from_bigint(&binom));
            let exps: Vec<u32> = e.iter().zip(alpha).map(|(b, a)| b - a).collect();
            out.add_term(exps, coef);
        }
        Ok(out)
    }

    /// Substitutes `x_j := consts[j] + sum_i linmap[j][i] * u_i`, returning a
    /// polynomial in the `k` new variables. This one routine drives frame
    /// expansion, point shifts, and line restriction.
    pub fn substitute_affine(&self, consts: &[Scalar], linmap: &[Vec<Scalar>]) -> MultiPoly {
        assert_eq!(consts.len(), self.dim);
        assert_eq!(linmap.len(), self.dim);
        let k = if self.dim == 0 { 0 } else { linmap[0].len() };
        let mut out = MultiPoly::zero(k, self.field);
        // per-variable power cache: pows[j][e] = (consts[j] + lin_j(u))^e
        let mut pows: Vec<Vec<MultiPoly>> = Vec::with_capacity(self.dim);
        for j in 0..self.dim {
            let mut lin = MultiPoly::constant(k, consts[j].clone());
            for (i, c) in linmap[j].iter().enumerate() {
                if !c.is_zero() {
                    let mut exps = vec![0; k];
                    exps[i] = 1;
                    lin.add_term(exps, c.clone());
                }
            }
            pows.push(vec![MultiPoly::one(k, self.field), lin]);
        }
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(k, c.clone());
            for (j, &ej) in e.iter().enumerate() {
                while pows[j].len() <= ej as usize {
                    let base = pows[j][1].clone();
                    let last = pows[j].last().unwrap().clone();
                    pows[j].push(last.mul(&base));
                }
                if ej > 0 {
                    term = term.mul(&pows[j][ej as usize]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Expansion of `f` around `p`: the coefficients of the result are all
    /// Hasse derivatives `H^alpha f(p)` at once.
    pub fn shift(&self, p: &[Scalar]) -> MultiPoly {
        let mut linmap = vec![vec![self.field.zero(); self.dim]; self.dim];
        for (j, row) in linmap.iter_mut().enumerate() {
            row[j] = self.field.one();
        }
        self.substitute_affine(p, &linmap)
    }

    /// Restriction to the parametric line `x = base + t * dir`, as a
    /// univariate polynomial in `t`.
    pub fn restrict_line(&self, base: &[Scalar], dir: &[Scalar]) -> MultiPoly {
        let linmap: Vec<Vec<Scalar>> = dir.iter().map(|d| vec![d.clone()]).collect();
        self.substitute_affine(base, &linmap)
    }

    /// Multiplicity at a point: the largest `v` such that `H^a f(p) = 0` for
    /// all `|a| < v`.
    pub fn multiplicity_at_point(&self, p: &[Scalar]) -> Mult {
        if self.is_zero() {
            return Mult::Infinite;
        }
        let shifted = self.shift(p);
        let m = shifted
            .terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .min()
            .expect("nonzero polynomial has nonzero expansion");
        debug_assert!(m <= self.degree().unwrap());
        Mult::Finite(m)
    }

    /// Multiplicity along a line: the largest `v` such that `H^a f` restricted
    /// to the line is identically zero (as a polynomial, coefficient-wise) for
    /// all `|a| < v`.
    pub fn multiplicity_on_line(&self, base: &[Scalar], dir: &[Scalar]) -> Mult {
        if self.is_zero() {
            return Mult::Infinite;
        }
        // Substitute x = base + t*dir + y; the y^a coefficient (a univariate
        // polynomial in t) is exactly H^a f restricted to the line.
        let k = self.dim + 1;
        let mut linmap = vec![vec![self.field.zero(); k]; self.dim];
        for (j, row) in linmap.iter_mut().enumerate() {
            row[0] = dir[j].clone();
            row[j + 1] = self.field.one();
        }
        let expanded = self.substitute_affine(base, &linmap);
        let m = expanded
            .terms
            .keys()
            .map(|e| e[1..].iter().sum::<u32>())
            .min()
            .expect("nonzero polynomial has nonzero expansion");
        debug_assert!(m <= self.degree().unwrap());
        Mult::Finite(m)
    }

    /// JSON form: an array of `{"exp": [...], "coef": "<canonical string>"}`
    /// in graded order.
    pub fn to_json(&self) -> serde_json::Value {
        let mut entries: Vec<(&Vec<u32>, &Scalar)> = self.terms.iter().collect();
        entries.sort_by_key(|(e, _)| (e.iter().sum::<u32>(), (*e).clone()));
        json!(entries
            .into_iter()
            .map(|(e, c)| json!({"exp": e, "coef": c.canonical_string()}))
            .collect::<Vec<_>>())
    }

    pub fn from_json(
        dim: usize,
        field: FieldDesc,
        value: &serde_json::Value,
    ) -> Result<MultiPoly, AlgebraError> {
        let arr = value
            .as_array()
            .ok_or_else(|| AlgebraError::BadScalar(value.to_string()))?;
        let mut poly = MultiPoly::zero(dim, field);
        for entry in arr {
            let exps: Vec<u32> = entry["exp"]
                .as_array()
                .ok_or_else(|| AlgebraError::BadScalar(entry.to_string()))?
                .iter()
                .map(|v| v.as_u64().unwrap_or(0) as u32)
                .collect();
            if exps.len() != dim {
                return Err(AlgebraError::DimensionMismatch { expected: dim, got: exps.len() });
            }
            let coef = field.parse_scalar(entry["coef"].as_str().unwrap_or(""))?;
            poly.add_term(exps, coef);
        }
        Ok(poly)
    }
}

/// An affine coordinate frame: an origin plus `d` independent basis
/// directions (stored as columns).
#[derive(Clone, Debug)]
pub struct CoordinateFrame {
    pub origin: Vec<Scalar>,
    /// `basis[i]` is the i-th basis direction (a column vector).
    pub basis: Vec<Vec<Scalar>>,
}

impl CoordinateFrame {
    pub fn standard(dim: usize, origin: Vec<Scalar>, field: FieldDesc) -> Self {
        let mut basis = vec![vec![field.zero(); dim]; dim];
        for (i, col) in basis.iter_mut().enumerate() {
            col[i] = field.one();
        }
        CoordinateFrame { origin, basis }
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    /// Rewrites `f` in frame coordinates: the result's `y^alpha` coefficient
    /// is the alpha-th derivative of `f` at the origin along the frame.
    pub fn expand(&self, f: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        let d = self.dim();
        if f.dim() != d {
            return Err(AlgebraError::DimensionMismatch { expected: d, got: f.dim() });
        }
        let det = crate::algebra::matrix::Matrix::from_columns(&self.basis).det();
        if det.is_zero() {
            return Err(AlgebraError::SingularFrame);
        }
        // x_j = origin_j + sum_i basis[i][j] * y_i
        let field = f.field();
        let mut linmap = vec![vec![field.zero(); d]; d];
        for (i, col) in self.basis.iter().enumerate() {
            for (j, v) in col.iter().enumerate() {
                linmap[j][i] = v.clone();
            }
        }
        Ok(f.substitute_affine(&self.origin, &linmap))
    }
}

/// The alpha-coefficient of the expansion of `f` at the frame origin in frame
/// coordinates.
pub fn frame_derivative(
    f: &MultiPoly,
    frame: &CoordinateFrame,
    alpha: &[u32],
) -> Result<Scalar, AlgebraError> {
    if alpha.len() != f.dim() {
        return Err(AlgebraError::DimensionMismatch { expected: f.dim(), got: alpha.len() });
    }
    Ok(frame.expand(f)?.coefficient(alpha))
}
