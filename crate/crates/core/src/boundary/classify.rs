use crate::error::{Error, Result};
use crate::gromov::{
    gromov_product_boundary, BoundaryPoint, Mobius, PlaneBoundary, SpaceIsometry, SpaceModel,
    TreeRay,
};
use crate::gromov::{normalize_hom, visual_hom};
use crate::tolerances::{PLANE_POINT_TOL, TAU_TRACE};

/// Elliptic, parabolic or hyperbolic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsometryKind {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl std::fmt::Display for IsometryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            IsometryKind::Elliptic => "elliptic",
            IsometryKind::Parabolic => "parabolic",
            IsometryKind::Hyperbolic => "hyperbolic",
        })
    }
}

/// Type of an isometry with its boundary fixed points; for hyperbolic
/// isometries the attracting point comes first.
#[derive(Clone, Debug, PartialEq)]
pub struct IsometryClass {
    pub kind: IsometryKind,
    pub fixed_points: Vec<BoundaryPoint>,
}

impl IsometryClass {
    /// `(x^+, x^-)` for hyperbolic isometries.
    pub fn axis(&self) -> Option<(&BoundaryPoint, &BoundaryPoint)> {
        match (self.kind, self.fixed_points.as_slice()) {
            (IsometryKind::Hyperbolic, [p, m]) => Some((p, m)),
            _ => None,
        }
    }
}

/// `|g|_M = d(o, g o)`.
pub fn displacement(model: &SpaceModel, g: &SpaceIsometry) -> Result<f64> {
    model.check_isometry(g)?;
    Ok(match g {
        SpaceIsometry::Tree(w) => w.len() as f64,
        SpaceIsometry::Plane(m) => m.displacement(),
    })
}

/// Exact translation length: cyclically reduced length on the tree,
/// `2 arcosh(|tr| / 2)` on the plane.
pub fn translation_length(model: &SpaceModel, g: &SpaceIsometry) -> Result<f64> {
    model.check_isometry(g)?;
    Ok(match g {
        SpaceIsometry::Tree(w) => w.cyclic_reduction().1.len() as f64,
        SpaceIsometry::Plane(m) => m.translation_length(),
    })
}

/// Whether two boundary points coincide (exactly on the tree, up to
/// visual distance `1e-9` on the plane).
pub fn same_boundary_point(x: &BoundaryPoint, y: &BoundaryPoint) -> bool {
    match (x, y) {
        (BoundaryPoint::Tree(a), BoundaryPoint::Tree(b)) => a == b,
        (BoundaryPoint::Plane(a), BoundaryPoint::Plane(b)) => {
            visual_hom(a.hom(), b.hom()) <= PLANE_POINT_TOL
        }
        _ => false,
    }
}

fn plane_class(m: &Mobius) -> IsometryClass {
    let lt = m.log_abs_trace();
    let excess = lt.exp() - 2.0;
    let near_identity = m
        .matrix()
        .relative_distance(&crate::projective::SquareMatrix::identity(2))
        <= TAU_TRACE
        || m.matrix()
            .relative_distance(&crate::projective::SquareMatrix::diagonal(&[-1.0, -1.0]).unwrap())
            <= TAU_TRACE;
    if near_identity || excess < -TAU_TRACE {
        return IsometryClass {
            kind: IsometryKind::Elliptic,
            fixed_points: vec![],
        };
    }
    if excess <= TAU_TRACE {
        let e = m.matrix().scaled_entries();
        let (a, b, c, d) = (e[(0, 0)], e[(0, 1)], e[(1, 0)], e[(1, 1)]);
        let t = 0.5 * (a + d);
        let v1 = [b, t - a];
        let v2 = [t - d, c];
        let v = if v1[0].hypot(v1[1]) >= v2[0].hypot(v2[1]) {
            v1
        } else {
            v2
        };
        let fixed = PlaneBoundary::from_hom(normalize_hom(v));
        return IsometryClass {
            kind: IsometryKind::Parabolic,
            fixed_points: vec![BoundaryPoint::Plane(fixed)],
        };
    }
    match m.fixed_points_hom() {
        Some((p, q)) => IsometryClass {
            kind: IsometryKind::Hyperbolic,
            fixed_points: vec![
                BoundaryPoint::Plane(PlaneBoundary::from_hom(p)),
                BoundaryPoint::Plane(PlaneBoundary::from_hom(q)),
            ],
        },
        None => IsometryClass {
            kind: IsometryKind::Elliptic,
            fixed_points: vec![],
        },
    }
}

/// Classification with fixed points.
///
/// The tree model has no parabolics: left multiplication by a nontrivial
/// word is hyperbolic with axis ends `u c^∞` and `u c^{-∞}` where
/// `g = u c u^{-1}`. On the plane the trace decides, with a guard band
/// of width `1e-9` around `|tr| = 2`.
pub fn classify_isometry(
    model: &SpaceModel,
    g: &SpaceIsometry,
    n_probe: usize,
) -> Result<IsometryClass> {
    if n_probe < 8 {
        return Err(Error::InvalidInput(format!(
            "n_probe must be at least 8, got {n_probe}"
        )));
    }
    model.check_isometry(g)?;
    Ok(match g {
        SpaceIsometry::Tree(w) => {
            if w.is_empty() {
                IsometryClass {
                    kind: IsometryKind::Elliptic,
                    fixed_points: vec![],
                }
            } else {
                let (u, c) = w.cyclic_reduction();
                let plus = TreeRay::new(u.clone(), c.clone())?;
                let minus = TreeRay::new(u, c.inverse())?;
                IsometryClass {
                    kind: IsometryKind::Hyperbolic,
                    fixed_points: vec![BoundaryPoint::Tree(plus), BoundaryPoint::Tree(minus)],
                }
            }
        }
        SpaceIsometry::Plane(m) => plane_class(m),
    })
}

/// Fixed points `(x^+, x^-)` or `NotHyperbolic`.
pub fn hyperbolic_axis(
    model: &SpaceModel,
    g: &SpaceIsometry,
) -> Result<(BoundaryPoint, BoundaryPoint)> {
    let class = classify_isometry(model, g, 8)?;
    match class.axis() {
        Some((p, m)) => Ok((p.clone(), m.clone())),
        None => Err(Error::NotHyperbolic(format!(
            "isometry {g} is {}",
            class.kind
        ))),
    }
}

/// Stable length: exact value and the liminf surrogate
/// `min_{n_max/2 <= n <= n_max} |g^n| / n`.
#[derive(Clone, Debug, PartialEq)]
pub struct StableLength {
    pub exact: f64,
    pub surrogate: f64,
    pub n_max: usize,
    /// Guaranteed bound on `surrogate - exact`: `(2 (x^-|x^+)_o + C') / n_max`
    /// for hyperbolic isometries.
    pub tolerance: f64,
}

impl StableLength {
    pub fn agrees(&self) -> bool {
        let diff = self.surrogate - self.exact;
        diff >= -1e-9 * self.exact.max(1.0) && diff <= self.tolerance + 1e-6
    }
}

/// Exact stable length checked against the power surrogate.
pub fn stable_length(model: &SpaceModel, g: &SpaceIsometry, n_max: usize) -> Result<StableLength> {
    if n_max < 8 {
        return Err(Error::InvalidInput(format!(
            "n_max must be at least 8, got {n_max}"
        )));
    }
    let exact = translation_length(model, g)?;
    let lo = n_max / 2;
    let mut power = g.pow(lo as u64);
    let mut surrogate = f64::INFINITY;
    for n in lo..=n_max {
        surrogate = surrogate.min(displacement(model, &power)? / n as f64);
        power = power.mul(g)?;
    }
    let class = classify_isometry(model, g, 8)?;
    let tolerance = match class.axis() {
        Some((p, m)) => {
            let prod = gromov_product_boundary(model, m, p, &model.basepoint())?;
            (2.0 * prod + model.length_gap_c) / n_max as f64
        }
        None => {
            // Bounded or parabolic orbits: |g^n| / n -> 0 at rate |g^n| / n.
            surrogate
        }
    };
    let out = StableLength {
        exact,
        surrogate,
        n_max,
        tolerance,
    };
    if !out.agrees() {
        return Err(Error::NumericalFailure(format!(
            "stable length {} disagrees with surrogate {} beyond {}",
            exact, surrogate, tolerance
        )));
    }
    Ok(out)
}

/// Quantities of the length-gap inequality
/// `|g| - 2 (x^-|x^+)_o - C' <= |g|_∞ <= |g|`.
#[derive(Clone, Debug, PartialEq)]
pub struct LengthGap {
    pub lhs: f64,
    pub stable: f64,
    pub displacement: f64,
    pub product: f64,
    pub length_gap_c: f64,
}

impl LengthGap {
    /// `min(stable - lhs, displacement - stable)`.
    pub fn slack(&self) -> f64 {
        (self.stable - self.lhs).min(self.displacement - self.stable)
    }

    /// Exact on the tree; relative `1e-9` on the plane.
    pub fn holds(&self, model: &SpaceModel) -> bool {
        let tol = if model.is_tree() {
            0.0
        } else {
            1e-9 * self.displacement.max(1.0)
        };
        self.slack() >= -tol
    }
}

pub fn length_gap_check(model: &SpaceModel, g: &SpaceIsometry) -> Result<LengthGap> {
    let (plus, minus) = hyperbolic_axis(model, g)?;
    let product = gromov_product_boundary(model, &minus, &plus, &model.basepoint())?;
    let disp = displacement(model, g)?;
    let stable = translation_length(model, g)?;
    Ok(LengthGap {
        lhs: disp - 2.0 * product - model.length_gap_c,
        stable,
        displacement: disp,
        product,
        length_gap_c: model.length_gap_c,
    })
}

/// `|g_1| + |g_2| - | |g_1 g g_2| - |g| |`.
pub fn length_subadditivity_check(
    model: &SpaceModel,
    g1: &SpaceIsometry,
    g: &SpaceIsometry,
    g2: &SpaceIsometry,
) -> Result<f64> {
    let prod = g1.mul(g)?.mul(g2)?;
    let lhs = (displacement(model, &prod)? - displacement(model, g)?).abs();
    Ok(displacement(model, g1)? + displacement(model, g2)? - lhs)
}
