//! Upper half-plane model of the hyperbolic plane.
//!
//! Boundary points are handled internally in homogeneous coordinates
//! `[p : q]` (unit vectors, `∞ = [1 : 0]`), on which `SL(2, R)` acts
//! linearly; the visual metric at `i` is then the sine of the angle between
//! representatives. The public API exposes `ℝ ∪ {∞}` with explicit branches.

use std::fmt;

use crate::error::{Error, Result};
use crate::projective::SquareMatrix;
use crate::tolerances::PLANE_DET_TOL;

/// Point `x + i y` of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0 && y.is_finite() && x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "plane point needs finite x and y > 0, got ({x}, {y})"
            )));
        }
        Ok(Self { x, y })
    }

    /// The basepoint `i`.
    pub fn i() -> Self {
        Self { x: 0.0, y: 1.0 }
    }
}

/// Point of `∂H² = ℝ ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PlaneBoundary {
    Finite(f64),
    Infinity,
}

impl fmt::Display for PlaneBoundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaneBoundary::Finite(t) => write!(f, "{}", crate::numfmt::real(*t)),
            PlaneBoundary::Infinity => f.write_str("inf"),
        }
    }
}

/// Unit homogeneous coordinates, sign-normalized.
pub(crate) type Hom = [f64; 2];

pub(crate) fn normalize_hom(v: [f64; 2]) -> Hom {
    let n = v[0].hypot(v[1]);
    let (mut p, mut q) = (v[0] / n, v[1] / n);
    if q < 0.0 || (q == 0.0 && p < 0.0) {
        p = -p;
        q = -q;
    }
    [p, q]
}

impl PlaneBoundary {
    pub fn finite(t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::InvalidInput(
                "finite boundary point expected; use Infinity".into(),
            ));
        }
        Ok(PlaneBoundary::Finite(t))
    }

    pub(crate) fn hom(&self) -> Hom {
        match *self {
            PlaneBoundary::Finite(t) => normalize_hom([t, 1.0]),
            PlaneBoundary::Infinity => [1.0, 0.0],
        }
    }

    pub(crate) fn from_hom(v: Hom) -> Self {
        if v[1] == 0.0 {
            PlaneBoundary::Infinity
        } else {
            PlaneBoundary::Finite(v[0] / v[1])
        }
    }
}

/// Orientation-preserving isometry `z -> (az + b)/(cz + d)` with
/// `ad - bc = 1`, stored with power-of-two scaling so that long products
/// stay representable.
#[derive(Clone, Debug)]
pub struct Mobius {
    m: SquareMatrix,
}

impl Mobius {
    /// Accepts `[[a, b], [c, d]]` with determinant `1` within `1e-10`; the
    /// entries are rescaled to determinant exactly `1` up to rounding.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !((det - 1.0).abs() <= PLANE_DET_TOL) {
            return Err(Error::InvalidInput(format!(
                "plane isometry needs determinant 1 (got {det})"
            )));
        }
        let s = 1.0 / det.sqrt();
        let m = SquareMatrix::from_rows(&[vec![a * s, b * s], vec![c * s, d * s]])?;
        Ok(Self { m })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
            return Err(Error::InvalidInput(
                "plane isometry must be a 2x2 matrix".into(),
            ));
        }
        Self::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    }

    pub fn identity() -> Self {
        Self {
            m: SquareMatrix::identity(2),
        }
    }

    /// `diag(e^{t/2}, e^{-t/2})`, translation length `t` along the imaginary axis.
    pub fn translation(t: f64) -> Self {
        Self::new((t / 2.0).exp(), 0.0, 0.0, (-t / 2.0).exp()).expect("determinant one")
    }

    /// Rotation by angle `2 theta` around `i`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, -s, s, c).expect("determinant one")
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.m
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            m: self.m.mul(&rhs.m),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            m: self.m.inverse(),
        }
    }

    pub fn pow(&self, n: u64) -> Self {
        Self { m: self.m.pow(n) }
    }

    fn n(&self) -> (f64, f64, f64, f64) {
        let e = self.m.scaled_entries();
        (e[(0, 0)], e[(0, 1)], e[(1, 0)], e[(1, 1)])
    }

    /// True entries (may overflow for very long products).
    pub fn entries(&self) -> [f64; 4] {
        let r = self.m.to_rows();
        [r[0][0], r[0][1], r[1][0], r[1][1]]
    }

    /// Action on the half-plane.
    pub fn apply_point(&self, z: &PlanePoint) -> PlanePoint {
        let (a, b, c, d) = self.n();
        let (nr, ni) = (a * z.x + b, a * z.y);
        let (dr, di) = (c * z.x + d, c * z.y);
        let den = dr * dr + di * di;
        let x = (nr * dr + ni * di) / den;
        let log_det_n = self.m.log_abs_det() - 2.0 * self.m.log_scale();
        let y = (log_det_n + z.y.ln() - den.ln()).exp();
        PlanePoint { x, y }
    }

    pub(crate) fn apply_hom(&self, v: Hom) -> Hom {
        let (a, b, c, d) = self.n();
        normalize_hom([a * v[0] + b * v[1], c * v[0] + d * v[1]])
    }

    /// Action on the boundary.
    pub fn apply_boundary(&self, xi: &PlaneBoundary) -> PlaneBoundary {
        PlaneBoundary::from_hom(self.apply_hom(xi.hom()))
    }

    /// `log |tr g|` (`-inf` for trace zero).
    pub fn log_abs_trace(&self) -> f64 {
        let (a, _, _, d) = self.n();
        (a + d).abs().ln() + self.m.log_scale()
    }

    pub fn trace(&self) -> f64 {
        self.log_abs_trace().exp() * {
            let (a, _, _, d) = self.n();
            (a + d).signum()
        }
    }

    /// `d(i, g i)` from `cosh d = (a² + b² + c² + d²) / 2`.
    pub fn displacement(&self) -> f64 {
        let (a, b, c, d) = self.n();
        let log_s = (a * a + b * b + c * c + d * d).ln() + 2.0 * self.m.log_scale();
        let log_x = log_s - std::f64::consts::LN_2;
        if log_x > 20.0 {
            log_s
        } else {
            log_x.exp().max(1.0).acosh()
        }
    }

    /// `2 arcosh(|tr| / 2)` for hyperbolic elements, `0` otherwise.
    pub fn translation_length(&self) -> f64 {
        let lt = self.log_abs_trace();
        let half = lt - std::f64::consts::LN_2;
        if half <= 0.0 {
            0.0
        } else if half > 20.0 {
            2.0 * lt
        } else {
            2.0 * half.exp().acosh()
        }
    }

    /// Attracting and repelling fixed points for `|tr| > 2`, in
    /// homogeneous coordinates.
    pub(crate) fn fixed_points_hom(&self) -> Option<(Hom, Hom)> {
        let (a, b, c, d) = self.n();
        let det_n = (self.m.log_abs_det() - 2.0 * self.m.log_scale()).exp();
        let tr = a + d;
        let disc = tr * tr - 4.0 * det_n;
        if !(disc > 0.0) {
            return None;
        }
        let root = disc.sqrt();
        let big = 0.5 * (tr + tr.signum() * root);
        let small = det_n / big;
        let eigvec = |t: f64| -> Hom {
            let v1 = [b, t - a];
            let v2 = [t - d, c];
            let n1 = v1[0].hypot(v1[1]);
            let n2 = v2[0].hypot(v2[1]);
            if n1 >= n2 {
                normalize_hom(v1)
            } else {
                normalize_hom(v2)
            }
        };
        Some((eigvec(big), eigvec(small)))
    }
}

/// `d(z, w) = 2 asinh(|z - w| / (2 sqrt(y_z y_w)))`.
pub fn plane_distance(z: &PlanePoint, w: &PlanePoint) -> f64 {
    let e = (z.x - w.x).hypot(z.y - w.y);
    2.0 * (e / (2.0 * (z.y * w.y).sqrt())).asinh()
}

/// Visual distance at `i` between boundary points in homogeneous form.
pub(crate) fn visual_hom(v: Hom, w: Hom) -> f64 {
    (v[0] * w[1] - v[1] * w[0]).abs()
}

/// `exp(-(ξ|η)_q)`: the visual distance seen from `q`.
pub(crate) fn visual_from(q: &PlanePoint, v: Hom, w: Hom) -> f64 {
    // Conjugate by h(z) = (z - x) / y, which sends q to i.
    let hv = [v[0] - q.x * v[1], q.y * v[1]];
    let hw = [w[0] - q.x * w[1], q.y * w[1]];
    q.y * visual_hom(v, w) / (hv[0].hypot(hv[1]) * hw[0].hypot(hw[1]))
}

/// Busemann function of the boundary point `v`, normalized by
/// `b(z) = log(|p - q z|² / y)` for `v = [p : q]`.
pub(crate) fn busemann_potential(v: Hom, z: &PlanePoint) -> f64 {
    let re = v[0] - v[1] * z.x;
    let im = v[1] * z.y;
    (re * re + im * im).ln() - z.y.ln()
}

/// `(m|ξ)_q = ½ (d(q, m) + b(q) - b(m))`.
pub(crate) fn mixed_product(m: &PlanePoint, v: Hom, q: &PlanePoint) -> f64 {
    0.5 * (plane_distance(q, m) + busemann_potential(v, q) - busemann_potential(v, m))
}

/// Hyperbolic distance from `q` to the geodesic joining two boundary
/// points, by elementary geometry of semicircles and vertical lines.
pub fn distance_to_geodesic(q: &PlanePoint, xi: &PlaneBoundary, eta: &PlaneBoundary) -> f64 {
    match (xi, eta) {
        (PlaneBoundary::Infinity, PlaneBoundary::Finite(t))
        | (PlaneBoundary::Finite(t), PlaneBoundary::Infinity) => ((q.x - t).abs() / q.y).asinh(),
        (PlaneBoundary::Finite(s), PlaneBoundary::Finite(t)) => {
            let c = 0.5 * (s + t);
            let rho = 0.5 * (s - t).abs();
            let e2 = (q.x - c).powi(2) + q.y * q.y;
            ((e2 - rho * rho).abs() / (2.0 * rho * q.y)).asinh()
        }
        _ => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        let i = PlanePoint::i();
        let p = PlanePoint::new(0.0, std::f64::consts::E).unwrap();
        assert!((plane_distance(&i, &p) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn displacement_and_length_of_translation() {
        let g = Mobius::translation(1.0);
        assert!((g.displacement() - 1.0).abs() < 1e-14);
        assert!((g.translation_length() - 1.0).abs() < 1e-14);
        let h = g.pow(400);
        assert!((h.displacement() - 400.0).abs() < 1e-9);
    }

    #[test]
    fn fixed_points_of_diagonal() {
        let g = Mobius::new(2.0, 0.0, 0.0, 0.5).unwrap();
        let (p, m) = g.fixed_points_hom().unwrap();
        assert_eq!(PlaneBoundary::from_hom(p), PlaneBoundary::Infinity);
        assert_eq!(PlaneBoundary::from_hom(m), PlaneBoundary::Finite(0.0));
    }

    #[test]
    fn visual_formula() {
        let v = PlaneBoundary::Finite(1.0).hom();
        let w = PlaneBoundary::Finite(-1.0).hom();
        assert!((visual_hom(v, w) - 1.0).abs() < 1e-15);
    }
}
