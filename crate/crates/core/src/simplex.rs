//! Points of the simplex, Dirichlet parameter vectors and faces.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Coordinate sums must equal one within this tolerance.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Faces are encoded as bitmasks, so at most 64 coordinates.
pub const MAX_COORDS: usize = 64;

/// A probability vector `(x_0, ..., x_d)`: nonnegative, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    coords: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_COORDS {
            return Err(Error::InvalidParams(format!(
                "a simplex point needs between 1 and {MAX_COORDS} coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidParams(
                "simplex coordinates must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidParams(format!(
                "simplex coordinates sum to {sum}, not 1"
            )));
        }
        Ok(Self { coords })
    }

    /// Scales nonnegative weights onto the simplex. Zero weights stay exactly
    /// zero, and a single positive weight becomes exactly one.
    pub fn normalize(mut weights: Vec<f64>) -> Self {
        let sum: f64 = weights.iter().sum();
        debug_assert!(sum > 0.0 && sum.is_finite(), "cannot normalize {weights:?}");
        for w in weights.iter_mut() {
            *w /= sum;
        }
        debug_assert!((weights.iter().sum::<f64>() - 1.0).abs() <= SUM_TOLERANCE);
        Self { coords: weights }
    }

    /// The vertex `e_i` of the simplex with `dim` coordinates.
    pub fn vertex(dim: usize, i: usize) -> Self {
        assert!(i < dim, "vertex index {i} out of range for dimension {dim}");
        let mut coords = vec![0.0; dim];
        coords[i] = 1.0;
        Self { coords }
    }

    /// The barycenter `(1/(d+1), ..., 1/(d+1))`.
    pub fn barycenter(dim: usize) -> Self {
        Self::normalize(vec![1.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Number of coordinates, `d + 1`.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `<f, x>`.
    pub fn dot(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.coords.len());
        self.coords.iter().zip(f).map(|(x, g)| x * g).sum()
    }

    /// The face whose relative interior contains this point: the set of
    /// coordinates that are not exactly zero.
    pub fn support(&self) -> FaceSubset {
        let mask = self
            .coords
            .iter()
            .enumerate()
            .filter(|(_, x)| **x != 0.0)
            .fold(0u64, |m, (i, _)| m | (1 << i));
        FaceSubset { mask }
    }

    pub fn is_vertex(&self) -> bool {
        self.support().len() == 1
    }
}

/// Dirichlet parameters `(a_0, ..., a_d)` with cached total `a`.
///
/// Zero entries are legal (the extended Dirichlet law, concentrated on the
/// face of positive entries); the total must be positive.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams {
    a: Vec<f64>,
    total: f64,
}

impl DirichletParams {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.len() > MAX_COORDS {
            return Err(Error::InvalidParams(format!(
                "need between 1 and {MAX_COORDS} Dirichlet parameters, got {}",
                a.len()
            )));
        }
        if a.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidParams(
                "Dirichlet parameters must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = a.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidParams(
                "Dirichlet parameters must not all be zero".into(),
            ));
        }
        Ok(Self { a, total })
    }

    /// Like [`DirichletParams::new`] but every entry must be positive.
    pub fn strict(a: Vec<f64>) -> Result<Self> {
        let params = Self::new(a)?;
        if !params.is_strict() {
            return Err(Error::InvalidParams(
                "Dirichlet parameters must be strictly positive".into(),
            ));
        }
        Ok(params)
    }

    /// `D(1, ..., 1)`, the uniform law on the simplex.
    pub fn uniform(dim: usize) -> Self {
        Self::new(vec![1.0; dim]).expect("dim must be in 1..=64")
    }

    pub fn is_strict(&self) -> bool {
        self.a.iter().all(|x| *x > 0.0)
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Number of coordinates, `d + 1`.
    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// `a_T`, the sum of the entries indexed by `face`.
    pub fn mass(&self, face: FaceSubset) -> f64 {
        face.iter().map(|i| self.a[i]).sum()
    }

    /// The parameters `(a_i)_{i in T}`, in increasing index order.
    pub fn restrict(&self, face: FaceSubset) -> Result<Self> {
        Self::new(face.iter().map(|i| self.a[i]).collect())
    }

    pub fn full_face(&self) -> FaceSubset {
        FaceSubset::full(self.dim())
    }
}

/// A nonempty subset `T` of `{0, ..., d}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FaceSubset {
    mask: u64,
}

impl FaceSubset {
    pub fn new(indices: &[usize], dim: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidParams("a face needs at least one index".into()));
        }
        let mut mask = 0u64;
        for &i in indices {
            if i >= dim || i >= MAX_COORDS {
                return Err(Error::InvalidParams(format!(
                    "face index {i} out of range for {dim} coordinates"
                )));
            }
            if mask & (1 << i) != 0 {
                return Err(Error::InvalidParams(format!("duplicate face index {i}")));
            }
            mask |= 1 << i;
        }
        Ok(Self { mask })
    }

    pub fn from_mask(mask: u64) -> Result<Self> {
        if mask == 0 {
            return Err(Error::InvalidParams("a face needs at least one index".into()));
        }
        Ok(Self { mask })
    }

    /// `{0, ..., dim - 1}`.
    pub fn full(dim: usize) -> Self {
        assert!((1..=MAX_COORDS).contains(&dim));
        let mask = if dim == 64 { u64::MAX } else { (1u64 << dim) - 1 };
        Self { mask }
    }

    pub fn singleton(i: usize) -> Self {
        assert!(i < MAX_COORDS);
        Self { mask: 1 << i }
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize) -> bool {
        i < MAX_COORDS && self.mask & (1 << i) != 0
    }

    pub fn is_subset_of(&self, other: &FaceSubset) -> bool {
        self.mask & !other.mask == 0
    }

    /// Indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let mask = self.mask;
        (0..MAX_COORDS).filter(move |i| mask & (1 << i) != 0)
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All nonempty faces of the simplex with `dim` coordinates, ordered by
    /// size and then lexicographically.
    pub fn all(dim: usize) -> Vec<FaceSubset> {
        assert!(dim < MAX_COORDS);
        let mut faces: Vec<_> = (1..(1u64 << dim)).map(|mask| Self { mask }).collect();
        faces.sort();
        faces
    }
}

impl Ord for FaceSubset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for FaceSubset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FaceSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}
