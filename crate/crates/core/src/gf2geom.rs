//! Linear and projective geometry over F2.
//!
//! Vectors are packed into a `u64`, coordinate `x_{i+1}` living in bit `i`.
//! Over F2 the only unit is 1, so a projective point is simply a nonzero
//! vector and equality is coordinate equality.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported ambient projective dimension (vectors fit in a `u64`).
pub const MAX_DIM: usize = 62;

/// A vector over F2 of fixed length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GF2Vector {
    len: usize,
    bits: u64,
}

impl GF2Vector {
    pub fn new(len: usize, bits: u64) -> Result<Self> {
        if len == 0 || len > MAX_DIM + 1 {
            return Err(Error::InvalidArgument(format!(
                "vector length {len} out of range"
            )));
        }
        if len < 64 && bits >> len != 0 {
            return Err(Error::InvalidArgument(format!(
                "bits {bits:#b} do not fit in length {len}"
            )));
        }
        Ok(GF2Vector { len, bits })
    }

    pub fn from_coords(coords: &[u8]) -> Result<Self> {
        let mut bits = 0u64;
        for (i, &c) in coords.iter().enumerate() {
            match c {
                0 => {}
                1 => bits |= 1 << i,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "coordinate {other} is not in F2"
                    )))
                }
            }
        }
        GF2Vector::new(coords.len(), bits)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// Coordinate `i` (0-based).
    pub fn coord(&self, i: usize) -> u8 {
        ((self.bits >> i) & 1) as u8
    }

    pub fn coords(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.coord(i)).collect()
    }
}

impl std::ops::Add for GF2Vector {
    type Output = GF2Vector;

    fn add(self, rhs: GF2Vector) -> GF2Vector {
        debug_assert_eq!(self.len, rhs.len);
        GF2Vector {
            len: self.len,
            bits: self.bits ^ rhs.bits,
        }
    }
}

/// A point of P^n(F2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint(GF2Vector);

impl ProjectivePoint {
    pub fn new(rep: GF2Vector) -> Result<Self> {
        if rep.is_zero() {
            return Err(Error::InvalidArgument(
                "the zero vector is not a projective point".into(),
            ));
        }
        Ok(ProjectivePoint(rep))
    }

    pub fn from_coords(coords: &[u8]) -> Result<Self> {
        ProjectivePoint::new(GF2Vector::from_coords(coords)?)
    }

    /// Ambient projective dimension.
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn rep(&self) -> GF2Vector {
        self.0
    }

    pub fn bits(&self) -> u64 {
        self.0.bits()
    }

    pub fn coords(&self) -> Vec<u8> {
        self.0.coords()
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords().iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(":"))
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n > MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "dimension {n} exceeds {MAX_DIM}"
        )));
    }
    Ok(())
}

/// All points of P^n(F2), ordered by the integer value of their
/// little-endian coordinate vector (1, 2, ..., 2^{n+1} - 1).
pub fn enumerate_projective_points(n: usize) -> Result<Vec<ProjectivePoint>> {
    check_dim(n)?;
    let len = n + 1;
    let top: u64 = if len == 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    };
    Ok((1..=top)
        .map(|bits| ProjectivePoint(GF2Vector { len, bits }))
        .collect())
}

/// A quadratic form `sum c_ij x_i x_j` (i <= j) stored by its upper-triangular
/// support. Indices are 0-based internally.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticForm {
    dim: usize,
    terms: BTreeSet<(usize, usize)>,
}

impl QuadraticForm {
    /// Builds a form on P^dim from monomials given with 1-based indices, as
    /// they are usually written (`x_1 x_2` is `(1, 2)`, `x_1^2` is `(1, 1)`).
    /// A monomial listed twice cancels.
    pub fn new(dim: usize, monomials: &[(usize, usize)]) -> Result<Self> {
        check_dim(dim)?;
        let mut terms = BTreeSet::new();
        for &(a, b) in monomials {
            let (i, j) = if a <= b { (a, b) } else { (b, a) };
            if i == 0 || j > dim + 1 {
                return Err(Error::InvalidArgument(format!(
                    "monomial x_{a} x_{b} out of range for P^{dim}"
                )));
            }
            let key = (i - 1, j - 1);
            if !terms.remove(&key) {
                terms.insert(key);
            }
        }
        Ok(QuadraticForm { dim, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vars(&self) -> usize {
        self.dim + 1
    }

    /// Monomials with 1-based indices.
    pub fn monomials(&self) -> Vec<(usize, usize)> {
        self.terms.iter().map(|&(i, j)| (i + 1, j + 1)).collect()
    }

    fn eval_bits(&self, x: u64) -> u8 {
        let mut acc = 0u8;
        for &(i, j) in &self.terms {
            acc ^= (((x >> i) & (x >> j)) & 1) as u8;
        }
        acc
    }

    pub fn evaluate(&self, p: &ProjectivePoint) -> Result<u8> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.dim(),
            });
        }
        Ok(self.eval_bits(p.bits()))
    }

    /// The polar form b(x, y) = q(x + y) + q(x) + q(y).
    pub fn polar(&self, x: u64, y: u64) -> u8 {
        self.eval_bits(x ^ y) ^ self.eval_bits(x) ^ self.eval_bits(y)
    }

    /// Dimension of the radical of the polar form.
    pub fn radical_dim(&self) -> usize {
        let m = self.num_vars();
        let rows: Vec<u64> = (0..m)
            .map(|i| {
                (0..m).fold(0u64, |row, j| {
                    row | (u64::from(self.polar(1 << i, 1 << j)) << j)
                })
            })
            .collect();
        m - gf2_rank(rows)
    }
}

/// Rank over F2 of a list of packed row vectors.
pub fn gf2_rank(mut rows: Vec<u64>) -> usize {
    let mut rank = 0;
    for bit in 0..64 {
        let mask = 1u64 << bit;
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] & mask != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pr = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row & mask != 0 {
                *row ^= pr;
            }
        }
        rank += 1;
    }
    rank
}

/// The elliptic quadric `x1^2 + x2^2 + x1 x2 + x3 x4 + ... + x_{2n-1} x_{2n}`
/// on P^{2n-1}.
pub fn minus_quadric(n: usize) -> Result<QuadraticForm> {
    if n < 1 {
        return Err(Error::InvalidArgument(
            "the elliptic quadric needs n >= 1".into(),
        ));
    }
    let mut monomials = vec![(1, 1), (2, 2), (1, 2)];
    for k in 2..=n {
        monomials.push((2 * k - 1, 2 * k));
    }
    QuadraticForm::new(2 * n - 1, &monomials)
}

/// A finite set of points of P^n(F2), kept in enumeration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    points: Vec<ProjectivePoint>,
    index: HashMap<u64, usize>,
}

impl PointSet {
    pub fn new(dim: usize, mut points: Vec<ProjectivePoint>) -> Result<Self> {
        check_dim(dim)?;
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        points.sort_by_key(|p| p.bits());
        let before = points.len();
        points.dedup();
        if points.len() != before {
            return Err(Error::InvalidArgument(
                "point set contains repeated points".into(),
            ));
        }
        let index = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.bits(), i))
            .collect();
        Ok(PointSet { dim, points, index })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[ProjectivePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, p: &ProjectivePoint) -> Option<usize> {
        if p.dim() != self.dim {
            return None;
        }
        self.index.get(&p.bits()).copied()
    }
}

/// Every point of P^n where the form vanishes.
pub fn variety_points(form: &QuadraticForm) -> Result<PointSet> {
    let pts = enumerate_projective_points(form.dim())?
        .into_iter()
        .filter(|p| form.eval_bits(p.bits()) == 0)
        .collect();
    PointSet::new(form.dim(), pts)
}

/// F2-lines `{p, q, p + q}` fully contained in `set`, as sorted index
/// triples into `set.points()`, sorted lexicographically.
pub fn lines_in_point_set(set: &PointSet) -> Vec<[usize; 3]> {
    let pts = set.points();
    let mut lines = Vec::new();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let sum = pts[i].bits() ^ pts[j].bits();
            if let Some(&k) = set.index.get(&sum) {
                // points are sorted by bits, so k > j reports each line once
                if k > j {
                    lines.push([i, j, k]);
                }
            }
        }
    }
    lines.sort_unstable();
    lines
}

/// |Q_{2n}^-| = 2^{n-1}(2^n - 1) - 1.
pub fn point_count_formula(n: usize) -> Result<u64> {
    if !(1..=31).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "half-rank {n} out of range 1..=31"
        )));
    }
    Ok((1u64 << (n - 1)) * ((1u64 << n) - 1) - 1)
}

/// Point count of the hyperbolic quadric of half-rank n: 2^{n-1}(2^n + 1) - 1.
pub fn hyperbolic_point_count(n: usize) -> Result<u64> {
    if !(1..=31).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "half-rank {n} out of range 1..=31"
        )));
    }
    Ok((1u64 << (n - 1)) * ((1u64 << n) + 1) - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum QuadricType {
    Elliptic,
    Hyperbolic,
    Degenerate { radical_dim: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadricClass {
    pub kind: QuadricType,
    pub points: usize,
}

/// Elliptic / hyperbolic / degenerate, decided by the radical of the polar
/// form and then by comparing point counts.
pub fn classify_quadric(form: &QuadraticForm) -> Result<QuadricClass> {
    if form.dim().is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "classification needs odd ambient dimension, got P^{}",
            form.dim()
        )));
    }
    let points = variety_points(form)?.len();
    let radical_dim = form.radical_dim();
    if radical_dim > 0 {
        return Ok(QuadricClass {
            kind: QuadricType::Degenerate { radical_dim },
            points,
        });
    }
    let half = form.num_vars() / 2;
    let kind = if points as u64 == point_count_formula(half)? {
        QuadricType::Elliptic
    } else if points as u64 == hyperbolic_point_count(half)? {
        QuadricType::Hyperbolic
    } else {
        return Err(Error::Inconsistent(format!(
            "nondegenerate form on P^{} has {points} points, matching neither type",
            form.dim()
        )));
    };
    Ok(QuadricClass { kind, points })
}
