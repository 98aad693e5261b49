use nalgebra::DVector;
use rand::Rng;

use super::classify::{displacement, hyperbolic_axis, same_boundary_point};
use crate::certificate::{BoundaryCertificate, ProximalityCertificate, Verdict};
use crate::error::{Error, Result};
use crate::gromov::{
    bourdon_distance, sample, BoundaryPoint, FreeWord, Letter, ModelKind, PlaneBoundary,
    SpaceIsometry, SpaceModel, TreeRay,
};
use crate::gromov::{normalize_hom, Hom};
use crate::projective::{measure, svd_frame, CriterionReport, Measurement};
use crate::sampling::{purpose, stream_rng, CERTIFY_SEED};

/// Candidate attracting point and repelling point of an isometry, picked in
/// the shadows `Shad_o(g o, sigma)` and `Shad_o(g^{-1} o, sigma)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AttractorPair {
    pub y_plus: BoundaryPoint,
    pub y_minus: BoundaryPoint,
    pub sigma: f64,
}

const SIGMA_FLOOR: f64 = 1e-12;

/// Smallest `sigma` with `D' a^{-sigma} <= eps`.
pub fn shadow_sigma(model: &SpaceModel, eps: f64) -> f64 {
    model.log_a(model.shadow_d / eps).max(SIGMA_FLOOR)
}

fn hom_of(x: &BoundaryPoint) -> Hom {
    match x {
        BoundaryPoint::Plane(p) => p.hom(),
        BoundaryPoint::Tree(_) => unreachable!("plane point expected"),
    }
}

/// Canonical shadow points: on the tree the rays through `g o` and
/// `g^{-1} o` continued by their last letter; on the plane the endpoints
/// of the geodesic rays from `i` through `g i` and `g^{-1} i`.
pub fn choose_attractor_pair(
    model: &SpaceModel,
    g: &SpaceIsometry,
    eps: f64,
) -> Result<AttractorPair> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let sigma = shadow_sigma(model, eps);
    let d = displacement(model, g)?;
    let required = 2.0 * sigma + model.identity_c;
    if !(d > required) {
        return Err(Error::LowDisplacement {
            displacement: d,
            required,
        });
    }
    let (y_plus, y_minus) = canonical_pair(g)?;
    Ok(AttractorPair {
        y_plus,
        y_minus,
        sigma,
    })
}

/// Endpoints of the rays from the basepoint through `g o` and `g^{-1} o`
/// (continued by the last letter on the tree). Fails on the trivial tree
/// isometry.
pub(crate) fn canonical_pair(g: &SpaceIsometry) -> Result<(BoundaryPoint, BoundaryPoint)> {
    Ok(match g {
        SpaceIsometry::Tree(w) => (
            BoundaryPoint::Tree(TreeRay::extend_by_last(w)?),
            BoundaryPoint::Tree(TreeRay::extend_by_last(&w.inverse())?),
        ),
        SpaceIsometry::Plane(m) => {
            // g = k_1 diag(e^{d/2}, e^{-d/2}) k_2 sends i to k_1(e^d i), on the
            // ray from i to k_1 ∞.
            let f = svd_frame(m.matrix())?;
            let plus = normalize_hom([f.u[(0, 0)], f.u[(1, 0)]]);
            let minus = normalize_hom([f.v[(0, 1)], f.v[(1, 1)]]);
            (
                BoundaryPoint::Plane(PlaneBoundary::from_hom(plus)),
                BoundaryPoint::Plane(PlaneBoundary::from_hom(minus)),
            )
        }
    })
}

fn tree_rank(model: &SpaceModel) -> usize {
    match model.kind {
        ModelKind::Tree { rank } => rank,
        ModelKind::Plane => unreachable!("tree model expected"),
    }
}

fn all_letters(rank: usize) -> Vec<Letter> {
    (0..rank)
        .flat_map(|i| [Letter::new(i, false), Letter::new(i, true)])
        .collect()
}

fn push_letter(w: &FreeWord, l: Letter) -> FreeWord {
    w.mul(&FreeWord::letter(l))
}

/// Rays leaving the vertex `v` through each admissible letter, continued
/// straight and with one turn.
fn branches(rank: usize, v: &FreeWord, out: &mut Vec<TreeRay>) {
    let back = v.last().map(|l| l.inverse());
    for &l in &all_letters(rank) {
        if Some(l) == back {
            continue;
        }
        let w = push_letter(v, l);
        out.push(TreeRay::extend_by_last(&w).expect("nonempty"));
        for &l2 in &all_letters(rank) {
            if l2 != l && l2 != l.inverse() {
                out.push(TreeRay::extend_by_last(&push_letter(&w, l2)).expect("nonempty"));
            }
        }
    }
}

const ALL_PAIRS_LIMIT: usize = 400;

/// Samples `B^eps_center` on the boundary of the tree and measures `g`
/// there. Structured samples branch off `center` at every depth allowed by
/// `eps` and off every vertex of the geodesic `[o, g^{-1} o]`, which is
/// where the pairwise ratio `a^{(ξ|η)_o - (ξ|η)_{g^{-1} o}}` peaks.
fn tree_measure(
    model: &SpaceModel,
    g: &FreeWord,
    center: &TreeRay,
    target: &TreeRay,
    eps: f64,
    resolution: usize,
) -> Measurement {
    let rank = tree_rank(model);
    let a = model.a;
    let k_max = if eps > 1.0 {
        None
    } else {
        Some((model.log_a(1.0 / eps) + 1e-9).floor() as usize)
    };
    let Some(k_max) = k_max else {
        return Measurement::default();
    };
    let in_region = |x: &TreeRay| match x.common_prefix_len(center) {
        Some(k) => a.powi(-(k as i32)) >= eps,
        None => false,
    };
    let mut structured = Vec::new();
    for k in 0..=k_max {
        branches(rank, &center.truncate(k), &mut structured);
    }
    let gi = g.inverse();
    for j in 0..=gi.len() {
        branches(
            rank,
            &FreeWord::from_letters(gi.letters()[..j].iter().copied()),
            &mut structured,
        );
    }
    structured.retain(|x| in_region(x));
    structured.sort_by_cached_key(|x| x.to_string());
    structured.dedup();

    let mut rng = stream_rng(CERTIFY_SEED, purpose::CERTIFY_PAIRS, rank as u64);
    let mut random = Vec::new();
    let mut attempts = 0;
    while random.len() < resolution && attempts < 20 * resolution.max(1) {
        attempts += 1;
        let x = sample::random_ray(&mut rng, rank, k_max + g.len() + 2, 3);
        if in_region(&x) {
            random.push(x);
        }
    }

    let points: Vec<TreeRay> = structured.iter().chain(&random).cloned().collect();
    let images: Vec<TreeRay> = points.iter().map(|x| x.act(g)).collect();
    let mut m = Measurement {
        samples: points.len(),
        ..Measurement::default()
    };
    for y in &images {
        let r = match y.common_prefix_len(target) {
            Some(k) => a.powi(-(k as i32)),
            None => 0.0,
        };
        m.radius = m.radius.max(r);
    }
    let mut note = |i: usize, j: usize| {
        if let (Some(k), Some(kk)) = (
            points[i].common_prefix_len(&points[j]),
            images[i].common_prefix_len(&images[j]),
        ) {
            m.lipschitz = m.lipschitz.max(a.powi(k as i32 - kk as i32));
            m.pairs += 1;
        }
    };
    let s = structured.len();
    if s <= ALL_PAIRS_LIMIT {
        for i in 0..s {
            for j in i + 1..s {
                note(i, j);
            }
        }
    } else {
        for i in 1..s {
            note(i - 1, i);
        }
    }
    let n = points.len();
    if n >= 2 {
        for _ in 0..resolution {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            if i != j {
                note(i, j);
            }
        }
    }
    m
}

fn rot90(v: Hom) -> DVector<f64> {
    DVector::from_vec(vec![-v[1], v[0]])
}

/// Image radius around `target` and Lipschitz constant of `g` on the
/// sampled complement `B^eps_center` of the `eps`-ball around `center`.
///
/// On the plane the visual metric at `i` is the sine distance of `P^1`, so
/// the projective sampler applies verbatim with the hyperplane `[center]`.
pub fn measure_boundary(
    model: &SpaceModel,
    g: &SpaceIsometry,
    center: &BoundaryPoint,
    target: &BoundaryPoint,
    eps: f64,
    resolution: usize,
) -> Result<Measurement> {
    model.check_isometry(g)?;
    model.check_boundary(center)?;
    model.check_boundary(target)?;
    Ok(match (g, center, target) {
        (SpaceIsometry::Tree(w), BoundaryPoint::Tree(c), BoundaryPoint::Tree(t)) => {
            tree_measure(model, w, c, t, eps, resolution)
        }
        (SpaceIsometry::Plane(m), _, _) => {
            let f = svd_frame(m.matrix())?;
            let t = hom_of(target);
            measure(
                &f,
                &rot90(hom_of(center)),
                &DVector::from_vec(vec![t[0], t[1]]),
                eps,
                resolution,
            )
        }
        _ => unreachable!("checked above"),
    })
}

fn check_r_eps(r: f64, eps: f64) -> Result<()> {
    if !(eps > 0.0 && r >= eps && r.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "need r >= eps > 0, got r = {r}, eps = {eps}"
        )));
    }
    Ok(())
}

/// Certificate against the true fixed points of a hyperbolic isometry.
pub fn certify_r_eps_proximal_boundary(
    model: &SpaceModel,
    g: &SpaceIsometry,
    r: f64,
    eps: f64,
    resolution: usize,
) -> Result<BoundaryCertificate> {
    check_r_eps(r, eps)?;
    let (plus, minus) = hyperbolic_axis(model, g)?;
    let gap = bourdon_distance(model, &plus, &minus)?;
    let m = measure_boundary(model, g, &minus, &plus, eps, resolution)?;
    Ok(ProximalityCertificate::from_measurements(
        r,
        eps,
        gap,
        m.radius,
        m.lipschitz,
        resolution,
        m.samples,
        m.pairs,
    ))
}

/// Measured contraction on `B^eps_{Y^-}` against `D' a^{2 sigma - |g|}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShadowContraction {
    pub lipschitz: f64,
    pub radius: f64,
    pub bound: f64,
    pub sigma: f64,
    pub pairs: usize,
}

impl ShadowContraction {
    pub fn within_bound(&self) -> bool {
        let slack = self.bound * (1.0 + 1e-9);
        self.lipschitz <= slack && self.radius <= slack
    }
}

pub fn shadow_contraction_check(
    model: &SpaceModel,
    g: &SpaceIsometry,
    eps: f64,
    resolution: usize,
) -> Result<ShadowContraction> {
    let pair = choose_attractor_pair(model, g, eps)?;
    let m = measure_boundary(model, g, &pair.y_minus, &pair.y_plus, eps, resolution)?;
    let d = displacement(model, g)?;
    let bound = model.shadow_d * model.a.powf(2.0 * pair.sigma - d);
    Ok(ShadowContraction {
        lipschitz: m.lipschitz,
        radius: m.radius,
        bound,
        sigma: pair.sigma,
        pairs: m.pairs,
    })
}

/// Sufficient criterion on the boundary: if `d(y^+, Y^-) >= 6r` and `g`
/// maps `B^eps_{Y^-}` into `b^eps_{y^+}` `eps`-Lipschitzly (on samples),
/// then `g` is `(2r, 2eps)`-proximal with `x^+` within `eps` of `y^+`.
pub fn criterion_implies_proximal_boundary(
    model: &SpaceModel,
    g: &SpaceIsometry,
    y_plus: &BoundaryPoint,
    y_minus: &BoundaryPoint,
    r: f64,
    eps: f64,
    resolution: usize,
) -> Result<CriterionReport> {
    check_r_eps(r, eps)?;
    let gap = bourdon_distance(model, y_plus, y_minus)?;
    if gap < 6.0 * r {
        return Err(Error::HypothesisFailed(format!(
            "gap: d(y+, Y-) = {gap} is below 6r = {}",
            6.0 * r
        )));
    }
    let m = measure_boundary(model, g, y_minus, y_plus, eps, resolution)?;
    if m.radius > eps {
        return Err(Error::HypothesisFailed(format!(
            "containment: sampled image radius {} exceeds eps = {eps}",
            m.radius
        )));
    }
    if m.lipschitz > eps {
        return Err(Error::HypothesisFailed(format!(
            "lipschitz: sampled Lipschitz constant {} exceeds eps = {eps}",
            m.lipschitz
        )));
    }
    let (plus, minus) = hyperbolic_axis(model, g)?;
    let certificate = certify_r_eps_proximal_boundary(model, g, 2.0 * r, 2.0 * eps, resolution)?;
    Ok(CriterionReport {
        certificate,
        attractor_distance: bourdon_distance(model, &plus, y_plus)?,
        repellor_distance: bourdon_distance(model, &minus, y_minus)?,
        eps,
    })
}

/// Result of the lineal threshold search.
#[derive(Clone, Debug, PartialEq)]
pub struct LinealThreshold {
    /// Largest sampled displacement of a product that is not certified
    /// (0 when all are).
    pub threshold: f64,
    pub samples: usize,
    pub certified_above: usize,
    pub max_displacement: f64,
}

/// Samples products of generators sharing an axis `{x_0, x_1}` and returns
/// the displacement beyond which every sampled product is
/// `(r, eps)`-certified.
pub fn lineal_threshold_check(
    model: &SpaceModel,
    gens: &[SpaceIsometry],
    r: f64,
    eps: f64,
    resolution: usize,
    budget: usize,
) -> Result<LinealThreshold> {
    check_r_eps(r, eps)?;
    if gens.is_empty() {
        return Err(Error::InvalidInput(
            "lineal threshold needs generators".into(),
        ));
    }
    let (x0, x1) = hyperbolic_axis(model, &gens[0])?;
    for g in &gens[1..] {
        let (p, m) = hyperbolic_axis(model, g).map_err(|e| Error::NotLineal(e.to_string()))?;
        let same = (same_boundary_point(&p, &x0) && same_boundary_point(&m, &x1))
            || (same_boundary_point(&p, &x1) && same_boundary_point(&m, &x0));
        if !same {
            return Err(Error::NotLineal(format!(
                "generator {g} has fixed points {p}, {m}, not {x0}, {x1}"
            )));
        }
    }
    let width = bourdon_distance(model, &x0, &x1)?;
    if 4.0 * r > width {
        return Err(Error::HypothesisFailed(format!(
            "gap: 4r = {} exceeds d(x0, x1) = {width}",
            4.0 * r
        )));
    }
    let mut rng = stream_rng(budget as u64, purpose::LINEAL, gens.len() as u64);
    let mut rows: Vec<(f64, bool)> = Vec::with_capacity(budget);
    for k in 0..budget {
        let len = 1 + k % 16;
        let mut h = gens[rng.random_range(0..gens.len())].clone();
        for _ in 1..len {
            h = h.mul(&gens[rng.random_range(0..gens.len())])?;
        }
        let d = displacement(model, &h)?;
        let ok = match certify_r_eps_proximal_boundary(model, &h, r, eps, resolution) {
            Ok(c) => c.verdict == Verdict::Certified,
            Err(Error::NotHyperbolic(_)) => false,
            Err(e) => return Err(e),
        };
        rows.push((d, ok));
    }
    let threshold = rows
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(d, _)| *d)
        .fold(0.0, f64::max);
    let certified_above = rows.iter().filter(|(d, ok)| *ok && *d > threshold).count();
    let max_displacement = rows.iter().map(|(d, _)| *d).fold(0.0, f64::max);
    if certified_above == 0 {
        return Err(Error::BudgetExhausted {
            best_margin: max_displacement - threshold,
            detail: format!(
                "no certified product above displacement {threshold} in {budget} samples"
            ),
        });
    }
    Ok(LinealThreshold {
        threshold,
        samples: rows.len(),
        certified_above,
        max_displacement,
    })
}
