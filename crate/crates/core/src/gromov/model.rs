use std::f64::consts::{E, LN_2};
use std::fmt;

use rand::Rng;

use super::plane::{
    busemann_potential, mixed_product, plane_distance, visual_from, visual_hom, Mobius,
    PlaneBoundary, PlanePoint,
};
use super::tree::{tree_distance, tree_product, tree_product_boundary, tree_product_mixed};
use super::word::{FreeWord, TreeRay};
use crate::error::{Error, Result};
use crate::sampling::{purpose, stream_rng};

/// Which model space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    /// Cayley tree of the free group of the given rank (`>= 2`).
    Tree { rank: usize },
    /// Upper half-plane, curvature `-1`.
    Plane,
}

/// A model hyperbolic space with its basepoint, Bourdon base and the
/// constants used by the boundary lemmas.
///
/// - `delta`: four-point constant of the Gromov inequality.
/// - `identity_c`: bound on `|(o|x)_m + (m|x)_o - d(o, m)|`.
/// - `length_gap_c`: `C'` in `|g| - 2(x^-|x^+)_o - C' <= stable length`.
/// - `shadow_d`: `D'` of the shadow Lipschitz estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceModel {
    pub kind: ModelKind,
    pub a: f64,
    pub delta: f64,
    pub identity_c: f64,
    pub length_gap_c: f64,
    pub shadow_d: f64,
    pub admissibility: String,
}

impl SpaceModel {
    /// Tree of the free group of rank `rank`; any `a > 1` is admissible.
    pub fn tree(rank: usize, a: f64) -> Result<Self> {
        if !(2..=26).contains(&rank) {
            return Err(Error::InvalidInput(format!(
                "tree rank must be in 2..=26, got {rank}"
            )));
        }
        if !(a > 1.0 && a.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "Bourdon base must exceed 1, got {a}"
            )));
        }
        Ok(Self {
            kind: ModelKind::Tree { rank },
            a,
            delta: 0.0,
            identity_c: 0.0,
            length_gap_c: 0.0,
            shadow_d: 1.0,
            admissibility: "tree is 0-hyperbolic: every a > 1 gives a visual metric".into(),
        })
    }

    /// The hyperbolic plane with `a = e`.
    pub fn plane() -> Self {
        Self {
            kind: ModelKind::Plane,
            a: E,
            delta: LN_2,
            identity_c: 0.0,
            length_gap_c: 0.0,
            shadow_d: 2.0,
            admissibility: "CAT(-1): a = e gives the exact visual metric".into(),
        }
    }

    /// The plane with an explicit base, which must equal `e`.
    pub fn plane_with_base(a: f64) -> Result<Self> {
        if (a - E).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "the plane model uses a = e, got {a}"
            )));
        }
        Ok(Self::plane())
    }

    pub fn is_tree(&self) -> bool {
        matches!(self.kind, ModelKind::Tree { .. })
    }

    pub fn basepoint(&self) -> SpacePoint {
        match self.kind {
            ModelKind::Tree { .. } => SpacePoint::Tree(FreeWord::identity()),
            ModelKind::Plane => SpacePoint::Plane(PlanePoint::i()),
        }
    }

    /// `log_a(x)`.
    pub fn log_a(&self, x: f64) -> f64 {
        x.ln() / self.a.ln()
    }

    fn rank_check(&self, w: &FreeWord, what: &str) -> Result<()> {
        if let ModelKind::Tree { rank } = self.kind {
            if w.rank_used() > rank {
                return Err(Error::ModelMismatch(format!(
                    "{what} {w} uses generators beyond rank {rank}"
                )));
            }
        }
        Ok(())
    }

    pub fn check_point(&self, p: &SpacePoint) -> Result<()> {
        match (self.kind, p) {
            (ModelKind::Tree { .. }, SpacePoint::Tree(w)) => self.rank_check(w, "vertex"),
            (ModelKind::Plane, SpacePoint::Plane(_)) => Ok(()),
            _ => Err(mismatch("point")),
        }
    }

    pub fn check_boundary(&self, x: &BoundaryPoint) -> Result<()> {
        match (self.kind, x) {
            (ModelKind::Tree { .. }, BoundaryPoint::Tree(r)) => {
                self.rank_check(r.prefix(), "ray")?;
                self.rank_check(r.period(), "ray")
            }
            (ModelKind::Plane, BoundaryPoint::Plane(_)) => Ok(()),
            _ => Err(mismatch("boundary point")),
        }
    }

    pub fn check_isometry(&self, g: &SpaceIsometry) -> Result<()> {
        match (self.kind, g) {
            (ModelKind::Tree { .. }, SpaceIsometry::Tree(w)) => self.rank_check(w, "isometry"),
            (ModelKind::Plane, SpaceIsometry::Plane(_)) => Ok(()),
            _ => Err(mismatch("isometry")),
        }
    }

    pub fn identity(&self) -> SpaceIsometry {
        match self.kind {
            ModelKind::Tree { .. } => SpaceIsometry::Tree(FreeWord::identity()),
            ModelKind::Plane => SpaceIsometry::Plane(Mobius::identity()),
        }
    }
}

fn mismatch(what: &str) -> Error {
    Error::ModelMismatch(format!("{what} does not belong to this model"))
}

/// Point of a model space.
#[derive(Clone, Debug, PartialEq)]
pub enum SpacePoint {
    Tree(FreeWord),
    Plane(PlanePoint),
}

/// Point of the boundary of a model space.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryPoint {
    Tree(TreeRay),
    Plane(PlaneBoundary),
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Tree(r) => write!(f, "{r}"),
            BoundaryPoint::Plane(p) => write!(f, "{p}"),
        }
    }
}

impl fmt::Display for SpacePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpacePoint::Tree(w) => write!(f, "{w}"),
            SpacePoint::Plane(p) => write!(
                f,
                "({}, {})",
                crate::numfmt::real(p.x),
                crate::numfmt::real(p.y)
            ),
        }
    }
}

/// Isometry of a model space: left multiplication by a word on the tree,
/// a Möbius map on the plane.
#[derive(Clone, Debug)]
pub enum SpaceIsometry {
    Tree(FreeWord),
    Plane(Mobius),
}

impl fmt::Display for SpaceIsometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceIsometry::Tree(w) => write!(f, "{w}"),
            SpaceIsometry::Plane(m) => {
                let e = m.entries();
                let r = crate::numfmt::real;
                write!(
                    f,
                    "[[{}, {}], [{}, {}]]",
                    r(e[0]),
                    r(e[1]),
                    r(e[2]),
                    r(e[3])
                )
            }
        }
    }
}

impl SpaceIsometry {
    pub fn mul(&self, rhs: &SpaceIsometry) -> Result<SpaceIsometry> {
        match (self, rhs) {
            (SpaceIsometry::Tree(a), SpaceIsometry::Tree(b)) => Ok(SpaceIsometry::Tree(a.mul(b))),
            (SpaceIsometry::Plane(a), SpaceIsometry::Plane(b)) => {
                Ok(SpaceIsometry::Plane(a.mul(b)))
            }
            _ => Err(mismatch("isometry")),
        }
    }

    pub fn inverse(&self) -> SpaceIsometry {
        match self {
            SpaceIsometry::Tree(a) => SpaceIsometry::Tree(a.inverse()),
            SpaceIsometry::Plane(a) => SpaceIsometry::Plane(a.inverse()),
        }
    }

    pub fn pow(&self, n: u64) -> SpaceIsometry {
        match self {
            SpaceIsometry::Tree(a) => SpaceIsometry::Tree(a.pow(n as usize)),
            SpaceIsometry::Plane(a) => SpaceIsometry::Plane(a.pow(n)),
        }
    }

    pub fn act_point(&self, p: &SpacePoint) -> Result<SpacePoint> {
        match (self, p) {
            (SpaceIsometry::Tree(g), SpacePoint::Tree(w)) => Ok(SpacePoint::Tree(g.mul(w))),
            (SpaceIsometry::Plane(g), SpacePoint::Plane(z)) => {
                Ok(SpacePoint::Plane(g.apply_point(z)))
            }
            _ => Err(mismatch("point")),
        }
    }

    pub fn act_boundary(&self, x: &BoundaryPoint) -> Result<BoundaryPoint> {
        match (self, x) {
            (SpaceIsometry::Tree(g), BoundaryPoint::Tree(r)) => Ok(BoundaryPoint::Tree(r.act(g))),
            (SpaceIsometry::Plane(g), BoundaryPoint::Plane(b)) => {
                Ok(BoundaryPoint::Plane(g.apply_boundary(b)))
            }
            _ => Err(mismatch("boundary point")),
        }
    }
}

/// `d_M(m, p)`.
pub fn distance(model: &SpaceModel, m: &SpacePoint, p: &SpacePoint) -> Result<f64> {
    model.check_point(m)?;
    model.check_point(p)?;
    Ok(match (m, p) {
        (SpacePoint::Tree(u), SpacePoint::Tree(v)) => tree_distance(u, v) as f64,
        (SpacePoint::Plane(z), SpacePoint::Plane(w)) => plane_distance(z, w),
        _ => unreachable!("checked above"),
    })
}

/// `(m|p)_q = ½ (d(m, q) + d(p, q) - d(m, p))`.
pub fn gromov_product(
    model: &SpaceModel,
    m: &SpacePoint,
    p: &SpacePoint,
    q: &SpacePoint,
) -> Result<f64> {
    for x in [m, p, q] {
        model.check_point(x)?;
    }
    Ok(match (m, p, q) {
        (SpacePoint::Tree(m), SpacePoint::Tree(p), SpacePoint::Tree(q)) => {
            tree_product(m, p, q) as f64
        }
        (SpacePoint::Plane(m), SpacePoint::Plane(p), SpacePoint::Plane(q)) => {
            0.5 * (plane_distance(m, q) + plane_distance(p, q) - plane_distance(m, p))
        }
        _ => unreachable!("checked above"),
    })
}

/// `(m|ξ)_q` with one interior and one boundary argument.
pub fn gromov_product_mixed(
    model: &SpaceModel,
    m: &SpacePoint,
    xi: &BoundaryPoint,
    q: &SpacePoint,
) -> Result<f64> {
    model.check_point(m)?;
    model.check_point(q)?;
    model.check_boundary(xi)?;
    Ok(match (m, xi, q) {
        (SpacePoint::Tree(m), BoundaryPoint::Tree(x), SpacePoint::Tree(q)) => {
            tree_product_mixed(m, x, q) as f64
        }
        (SpacePoint::Plane(m), BoundaryPoint::Plane(x), SpacePoint::Plane(q)) => {
            mixed_product(m, x.hom(), q)
        }
        _ => unreachable!("checked above"),
    })
}

/// `(ξ|η)_q`; `+inf` when the points coincide.
pub fn gromov_product_boundary(
    model: &SpaceModel,
    xi: &BoundaryPoint,
    eta: &BoundaryPoint,
    q: &SpacePoint,
) -> Result<f64> {
    model.check_point(q)?;
    model.check_boundary(xi)?;
    model.check_boundary(eta)?;
    Ok(match (xi, eta, q) {
        (BoundaryPoint::Tree(x), BoundaryPoint::Tree(y), SpacePoint::Tree(q)) => {
            tree_product_boundary(x, y, q).map_or(f64::INFINITY, |k| k as f64)
        }
        (BoundaryPoint::Plane(x), BoundaryPoint::Plane(y), SpacePoint::Plane(q)) => {
            -visual_from(q, x.hom(), y.hom()).ln()
        }
        _ => unreachable!("checked above"),
    })
}

/// `(m|p)_o - min((m|q)_o, (p|q)_o) + delta`, nonnegative in a
/// `delta`-hyperbolic space.
pub fn gromov_inequality_check(
    model: &SpaceModel,
    m: &SpacePoint,
    p: &SpacePoint,
    q: &SpacePoint,
    base: &SpacePoint,
) -> Result<f64> {
    let mp = gromov_product(model, m, p, base)?;
    let mq = gromov_product(model, m, q, base)?;
    let pq = gromov_product(model, p, q, base)?;
    Ok(mp - mq.min(pq) + model.delta)
}

fn four_point_defect(d: &[Vec<f64>], m: usize, p: usize, q: usize, o: usize) -> f64 {
    let prod = |x: usize, y: usize| 0.5 * (d[x][o] + d[y][o] - d[x][y]);
    prod(m, q).min(prod(p, q)) - prod(m, p)
}

/// Exhaustive below this many points, sampled quadruples above.
const DELTA_EXHAUSTIVE: usize = 24;
const DELTA_QUADRUPLES: usize = 200_000;

/// Largest four-point defect over quadruples of `samples`, floored at 0.
pub fn estimate_delta(model: &SpaceModel, samples: &[SpacePoint]) -> Result<f64> {
    if samples.len() < 4 {
        return Err(Error::TooFewPoints {
            needed: 4,
            got: samples.len(),
        });
    }
    let n = samples.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = distance(model, &samples[i], &samples[j])?;
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    let mut best = 0.0f64;
    if n <= DELTA_EXHAUSTIVE {
        for m in 0..n {
            for p in 0..n {
                for q in 0..n {
                    for o in 0..n {
                        best = best.max(four_point_defect(&d, m, p, q, o));
                    }
                }
            }
        }
    } else {
        let mut rng = stream_rng(n as u64, purpose::CALIBRATION, 0);
        for _ in 0..DELTA_QUADRUPLES {
            let idx: [usize; 4] = std::array::from_fn(|_| rng.random_range(0..n));
            best = best.max(four_point_defect(&d, idx[0], idx[1], idx[2], idx[3]));
        }
    }
    Ok(best)
}

/// Bourdon distance `a^{-(ξ|η)_o}` at the model basepoint.
pub fn bourdon_distance(
    model: &SpaceModel,
    xi: &BoundaryPoint,
    eta: &BoundaryPoint,
) -> Result<f64> {
    model.check_boundary(xi)?;
    model.check_boundary(eta)?;
    Ok(match (xi, eta) {
        (BoundaryPoint::Tree(x), BoundaryPoint::Tree(y)) => match x.common_prefix_len(y) {
            Some(k) => model.a.powi(-(k as i32)),
            None => 0.0,
        },
        (BoundaryPoint::Plane(x), BoundaryPoint::Plane(y)) => visual_hom(x.hom(), y.hom()),
        _ => unreachable!("checked above"),
    })
}

/// `B_ξ(y, z) = (z|ξ)_y - (y|ξ)_z`.
pub fn busemann(
    model: &SpaceModel,
    xi: &BoundaryPoint,
    y: &SpacePoint,
    z: &SpacePoint,
) -> Result<f64> {
    model.check_boundary(xi)?;
    model.check_point(y)?;
    model.check_point(z)?;
    Ok(match (xi, y, z) {
        (BoundaryPoint::Tree(x), SpacePoint::Tree(y), SpacePoint::Tree(z)) => {
            super::tree::tree_busemann(x, y, z) as f64
        }
        (BoundaryPoint::Plane(x), SpacePoint::Plane(y), SpacePoint::Plane(z)) => {
            let v = x.hom();
            busemann_potential(v, y) - busemann_potential(v, z)
        }
        _ => unreachable!("checked above"),
    })
}

/// `max |(o|x)_m + (m|x)_o - d(o, m)|` over `(m, x)` samples, `o` the
/// basepoint.
pub fn dist_gromov_identity_constant(
    model: &SpaceModel,
    samples: &[(SpacePoint, BoundaryPoint)],
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let o = model.basepoint();
    let mut worst = 0.0f64;
    for (m, x) in samples {
        let v = gromov_product_mixed(model, &o, x, m)? + gromov_product_mixed(model, m, x, &o)?
            - distance(model, &o, m)?;
        worst = worst.max(v.abs());
    }
    Ok(worst)
}
