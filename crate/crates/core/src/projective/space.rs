use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::tolerances::{CANON_THRESHOLD, UNIT_TOL};

fn canonical(mut v: DVector<f64>) -> Result<DVector<f64>> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(
            "projective vector must be finite".into(),
        ));
    }
    let n = v.norm();
    if n == 0.0 {
        return Err(Error::InvalidInput(
            "projective vector must be nonzero".into(),
        ));
    }
    v /= n;
    if let Some(first) = v.iter().find(|x| x.abs() > CANON_THRESHOLD) {
        if *first < 0.0 {
            v.neg_mut();
        }
    }
    Ok(v)
}

/// Point of projective space, stored as a canonical unit representative.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjPoint {
    vector: DVector<f64>,
}

impl ProjPoint {
    /// Normalizes and canonicalizes any nonzero vector.
    pub fn new(v: DVector<f64>) -> Result<Self> {
        Ok(Self {
            vector: canonical(v)?,
        })
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(v))
    }

    /// Basis vector `e_i` (zero-based).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[i] = 1.0;
        Self { vector: v }
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.vector
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn is_unit(&self) -> bool {
        (self.vector.norm() - 1.0).abs() <= UNIT_TOL
    }
}

/// Projective hyperplane, stored through its canonical unit normal.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjHyperplane {
    normal: DVector<f64>,
}

impl ProjHyperplane {
    pub fn from_normal(n: DVector<f64>) -> Result<Self> {
        Ok(Self {
            normal: canonical(n)?,
        })
    }

    pub fn from_slice(n: &[f64]) -> Result<Self> {
        Self::from_normal(DVector::from_column_slice(n))
    }

    pub fn normal(&self) -> &DVector<f64> {
        &self.normal
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// The normal viewed as a projective point (duality).
    pub fn normal_point(&self) -> ProjPoint {
        ProjPoint {
            vector: self.normal.clone(),
        }
    }
}

/// Attracting point, repelling hyperplane and their distance.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjFlag {
    pub attractor: ProjPoint,
    pub repellor: ProjHyperplane,
    pub gap: f64,
}

impl ProjFlag {
    pub fn new(attractor: ProjPoint, repellor: ProjHyperplane) -> Self {
        let gap = point_hyperplane_distance(&attractor, &repellor);
        Self {
            attractor,
            repellor,
            gap,
        }
    }
}

/// Norm of `v ∧ w` for unit vectors: the sine of the angle between them.
pub(crate) fn wedge_norm(v: &[f64], w: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let t = v[i] * w[j] - v[j] * w[i];
            s += t * t;
        }
    }
    s.sqrt()
}

/// `sin` of the angle between two lines, in `[0, 1]`.
///
/// Computed from the wedge product, which keeps full relative accuracy for
/// nearby points (the textbook `sqrt(1 - <v,w>^2)` does not).
pub fn proj_distance(x: &ProjPoint, y: &ProjPoint) -> f64 {
    wedge_norm(x.vector.as_slice(), y.vector.as_slice()).min(1.0)
}

/// Distance from a point to a hyperplane: `|<x, n>|`.
pub fn point_hyperplane_distance(x: &ProjPoint, h: &ProjHyperplane) -> f64 {
    x.vector.dot(&h.normal).abs().min(1.0)
}

/// Distance between two hyperplanes (that of their normals).
pub fn hyperplane_distance(h: &ProjHyperplane, k: &ProjHyperplane) -> f64 {
    wedge_norm(h.normal.as_slice(), k.normal.as_slice()).min(1.0)
}
