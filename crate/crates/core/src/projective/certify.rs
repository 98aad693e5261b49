use std::collections::HashMap;
use std::sync::Mutex;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::matrix::SquareMatrix;
use super::space::{hyperplane_distance, proj_distance, wedge_norm, ProjFlag, ProjPoint};
use super::spectral::{flag_from_frame, proximal_data, svd_frame, SvdFrame};
use crate::certificate::ProximalityCertificate;
use crate::error::{Error, Result};
use crate::sampling::{halton, purpose, stream_rng, CERTIFY_SEED};
use crate::tolerances::{MIN_CONTRACTION_PAIRS, SPECTRAL_TOL};

/// Orthonormal basis of `n^⊥` (columns), `n` unit.
fn complement_basis(n: &DVector<f64>) -> Vec<DVector<f64>> {
    let d = n.len();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(d - 1);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| n[i].abs().total_cmp(&n[j].abs()));
    for &k in &order {
        if basis.len() == d - 1 {
            break;
        }
        let mut e = DVector::zeros(d);
        e[k] = 1.0;
        for _ in 0..2 {
            let c = e.dot(n);
            e -= n * c;
            for b in &basis {
                let c = e.dot(b);
                e -= b * c;
            }
        }
        let norm = e.norm();
        if norm > 1e-6 {
            basis.push(e / norm);
        }
    }
    basis
}

/// Unit directions on the sphere of dimension `k - 1`, antipodes included.
fn full_sphere(count: usize, k: usize) -> Vec<Vec<f64>> {
    match k {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|i| {
                let t = std::f64::consts::TAU * (i as f64 + 0.5) / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            let mut out = Vec::with_capacity(count);
            let mut index = 0u64;
            while out.len() < count {
                let v: Vec<f64> = halton(index, k).iter().map(|x| 2.0 * x - 1.0).collect();
                index += 1;
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-3 && norm <= 1.0 {
                    out.push(v.into_iter().map(|x| x / norm).collect());
                }
            }
            out
        }
    }
}

/// Heights `|<x, n>|` used for samples: a geometric ladder starting at
/// `eps` (where the map is least contracting) and a uniform grid.
fn heights(eps: f64, uniform: usize) -> Vec<f64> {
    let mut c = Vec::new();
    let mut j = 0;
    loop {
        let t = eps * (j as f64 / 4.0).exp2();
        if t >= 1.0 {
            break;
        }
        c.push(t);
        j += 1;
    }
    for k in 0..uniform {
        c.push(eps + (1.0 - eps) * k as f64 / (uniform.max(2) - 1) as f64);
    }
    c.push(1.0);
    c
}

/// Sampled image radius and Lipschitz constant of a map on a region.
#[derive(Clone, Debug, Default)]
pub struct Measurement {
    pub radius: f64,
    pub lipschitz: f64,
    pub samples: usize,
    pub pairs: usize,
}

struct Image {
    y: DVector<f64>,
    z: DVector<f64>,
    znorm: f64,
}

fn image(f: &SvdFrame, ratios: &[f64], x: &DVector<f64>) -> Image {
    let y = f.v.transpose() * x;
    let z = DVector::from_iterator(y.len(), y.iter().zip(ratios).map(|(a, k)| a * k));
    let znorm = z.norm();
    Image { y, z, znorm }
}

fn local_lipschitz(ratios: &[f64], im: &Image) -> f64 {
    let d = ratios.len();
    if d == 2 {
        return ratios[1] / (im.znorm * im.znorm);
    }
    let basis = complement_basis(&(&im.y / im.y.norm()));
    let zhat = &im.z / im.znorm;
    let cols: Vec<DVector<f64>> = basis
        .iter()
        .map(|b| {
            let kb = DVector::from_iterator(d, b.iter().zip(ratios).map(|(a, k)| a * k));
            let proj = &kb - &zhat * zhat.dot(&kb);
            proj / im.znorm
        })
        .collect();
    let m = DMatrix::from_columns(&cols);
    super::jacobi::singular_values(&m)
        .map(|s| s[0])
        .unwrap_or(f64::INFINITY)
}

fn pair_ratio(ratios: &[f64], a: &Image, b: &Image) -> Option<f64> {
    if ratios.len() == 2 {
        let den = wedge_norm(a.y.as_slice(), b.y.as_slice());
        if den < 1e-14 {
            return None;
        }
        return Some(ratios[1] / (a.znorm * b.znorm));
    }
    let den = wedge_norm(a.y.as_slice(), b.y.as_slice());
    if den < 1e-9 {
        return None;
    }
    Some(wedge_norm(a.z.as_slice(), b.z.as_slice()) / (a.znorm * b.znorm) / den)
}

/// Samples `B^eps_H` (`H` given by its unit normal) and measures the image
/// radius around `target` and the Lipschitz constant of `g` there.
pub(crate) fn measure(
    f: &SvdFrame,
    normal: &DVector<f64>,
    target: &DVector<f64>,
    eps: f64,
    resolution: usize,
) -> Measurement {
    let d = normal.len();
    let ratios = f.ratios();
    let w = f.u.transpose() * target;
    let wn = w.norm();
    let basis = complement_basis(normal);
    let side = if d == 2 {
        resolution.max(8)
    } else {
        ((resolution as f64).sqrt().ceil() as usize).max(8)
    };
    let dirs = full_sphere(side, d - 1);
    let mut points: Vec<DVector<f64>> = Vec::new();
    for c in heights(eps, side) {
        let s = (1.0 - c * c).max(0.0).sqrt();
        for dir in &dirs {
            let mut x = normal * c;
            for (b, t) in basis.iter().zip(dir) {
                x += b * (s * t);
            }
            points.push(x);
        }
    }
    // Critical points of the local Lipschitz function.
    for i in 1..d {
        let v = f.v.column(i).into_owned();
        if v.dot(normal).abs() >= eps {
            points.push(v);
        }
    }

    let mut m = Measurement::default();
    let images: Vec<Image> = points.iter().map(|x| image(f, &ratios, x)).collect();
    for im in &images {
        let r = wedge_norm(im.z.as_slice(), w.as_slice()) / (im.znorm * wn);
        m.radius = m.radius.max(r);
        m.lipschitz = m.lipschitz.max(local_lipschitz(&ratios, im));
    }
    m.samples = images.len();

    let note_pair = |m: &mut Measurement, a: &Image, b: &Image| {
        if let Some(q) = pair_ratio(&ratios, a, b) {
            m.lipschitz = m.lipschitz.max(q);
            m.pairs += 1;
        }
    };
    for k in 1..images.len() {
        note_pair(&mut m, &images[k - 1], &images[k]);
    }
    let mut rng = stream_rng(CERTIFY_SEED, purpose::CERTIFY_PAIRS, d as u64);
    let random_point = |rng: &mut rand_chacha::ChaCha8Rng| {
        let c = rng.random_range(eps..=1.0);
        let s = (1.0 - c * c).max(0.0).sqrt();
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let dir = crate::sampling::random_unit(rng, d - 1);
        let mut x = normal * (c * sign);
        for (b, t) in basis.iter().zip(&dir) {
            x += b * (s * t);
        }
        x
    };
    for _ in 0..resolution {
        let a = image(f, &ratios, &random_point(&mut rng));
        let b = image(f, &ratios, &random_point(&mut rng));
        note_pair(&mut m, &a, &b);
    }
    m
}

/// Samples `B^eps_{X^-}` for the proximal flag of `g` and decides whether
/// `g` is `(r, eps)`-proximal at the given resolution.
pub fn certify_r_eps_proximal(
    g: &SquareMatrix,
    r: f64,
    eps: f64,
    resolution: usize,
) -> Result<ProximalityCertificate> {
    check_r_eps(r, eps)?;
    let flag = proximal_data(g, SPECTRAL_TOL)?;
    certify_with_flag(g, &flag, r, eps, resolution)
}

/// Certification against an already computed proximal flag.
pub fn certify_with_flag(
    g: &SquareMatrix,
    flag: &ProjFlag,
    r: f64,
    eps: f64,
    resolution: usize,
) -> Result<ProximalityCertificate> {
    let frame = svd_frame(g)?;
    let m = measure(
        &frame,
        flag.repellor.normal(),
        flag.attractor.vector(),
        eps,
        resolution,
    );
    Ok(ProximalityCertificate::from_measurements(
        r,
        eps,
        flag.gap,
        m.radius,
        m.lipschitz,
        resolution,
        m.samples,
        m.pairs,
    ))
}

fn check_r_eps(r: f64, eps: f64) -> Result<()> {
    if !(eps > 0.0 && r >= eps && r.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "need r >= eps > 0, got r = {r}, eps = {eps}"
        )));
    }
    Ok(())
}

static CHART_CACHE: Mutex<Option<HashMap<(usize, u64), f64>>> = Mutex::new(None);

/// Product of the Lipschitz constants of the affine chart
/// `v -> [e_1 + v]` and its inverse on `B^eps` of the standard hyperplane.
///
/// Evaluated by grid maximization in a plane through `e_1` (pairwise
/// ratios and local derivatives, the extreme pair `v = -w` at the chart
/// boundary included) and cached. The value does not depend on `dim`.
pub fn chart_constant(dim: usize, eps: f64) -> f64 {
    let key = (dim, eps.to_bits());
    if let Some(v) = CHART_CACHE
        .lock()
        .unwrap()
        .as_ref()
        .and_then(|m| m.get(&key).copied())
    {
        return v;
    }
    let big_r = ((1.0 - eps * eps).max(0.0)).sqrt() / eps;
    let n = 401;
    let grid: Vec<f64> = (0..n)
        .map(|k| -big_r + 2.0 * big_r * k as f64 / (n - 1) as f64)
        .collect();
    let chart_dist = |v: f64, w: f64| (v - w).abs() / ((1.0 + v * v).sqrt() * (1.0 + w * w).sqrt());
    let mut lip_inv = 0.0f64;
    let mut lip_phi = 0.0f64;
    for (i, &v) in grid.iter().enumerate() {
        lip_inv = lip_inv.max(1.0 + v * v);
        lip_phi = lip_phi.max(1.0 / (1.0 + v * v));
        for &w in &grid[i + 1..] {
            let dd = chart_dist(v, w);
            if dd > 0.0 {
                lip_inv = lip_inv.max((v - w).abs() / dd);
                lip_phi = lip_phi.max(dd / (v - w).abs());
            }
        }
    }
    let value = (lip_inv * lip_phi).max(1.0);
    CHART_CACHE
        .lock()
        .unwrap()
        .get_or_insert_with(HashMap::new)
        .insert(key, value);
    value
}

/// Measured contraction of `g` on `B^eps_{Y_g^-}` against the bound
/// `D exp(-(mu_1 - mu_2))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractionReport {
    pub lipschitz: f64,
    pub radius: f64,
    pub bound: f64,
    pub chart_constant: f64,
    pub pairs: usize,
}

impl ContractionReport {
    pub fn within_bound(&self) -> bool {
        let slack = self.bound * (1.0 + 1e-9);
        self.lipschitz <= slack && self.radius <= slack
    }
}

pub fn contraction_check(
    g: &SquareMatrix,
    eps: f64,
    resolution: usize,
) -> Result<ContractionReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidInput(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let frame = svd_frame(g)?;
    let flag = flag_from_frame(&frame)?;
    let m = measure(
        &frame,
        flag.repellor.normal(),
        flag.attractor.vector(),
        eps,
        resolution,
    );
    if m.pairs < MIN_CONTRACTION_PAIRS {
        return Err(Error::ResolutionTooLow { pairs: m.pairs });
    }
    let d = chart_constant(g.dim(), eps);
    let bound = d * (-(frame.mu[0] - frame.mu[1])).exp();
    Ok(ContractionReport {
        lipschitz: m.lipschitz,
        radius: m.radius,
        bound,
        chart_constant: d,
        pairs: m.pairs,
    })
}

/// Outcome of the sufficient criterion for proximality.
#[derive(Clone, Debug)]
pub struct CriterionReport {
    /// Certificate of `g` at `(2r, 2eps)`.
    pub certificate: ProximalityCertificate,
    /// Distance from the true attracting point to the candidate one.
    pub attractor_distance: f64,
    /// Distance from the true repelling hyperplane to the candidate one.
    pub repellor_distance: f64,
    pub eps: f64,
}

impl CriterionReport {
    /// The criterion's conclusion holds on the samples.
    pub fn holds(&self) -> bool {
        self.certificate.is_certified() && self.attractor_distance <= self.eps
    }
}

/// Checks the hypotheses of the sufficient criterion for `(y^+, Y^-) =
/// flag` on samples and, when they hold, verifies the conclusion: `g` is
/// `(2r, 2eps)`-proximal with attracting point within `eps` of `y^+`.
pub fn criterion_implies_proximal(
    g: &SquareMatrix,
    flag: &ProjFlag,
    r: f64,
    eps: f64,
    resolution: usize,
) -> Result<CriterionReport> {
    check_r_eps(r, eps)?;
    if flag.gap < 6.0 * r {
        return Err(Error::HypothesisFailed(format!(
            "gap: d(y+, Y-) = {} is below 6r = {}",
            flag.gap,
            6.0 * r
        )));
    }
    let frame = svd_frame(g)?;
    let m = measure(
        &frame,
        flag.repellor.normal(),
        flag.attractor.vector(),
        eps,
        resolution,
    );
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
    let x = proximal_data(g, SPECTRAL_TOL)?;
    let certificate = certify_with_flag(g, &x, 2.0 * r, 2.0 * eps, resolution)?;
    Ok(CriterionReport {
        certificate,
        attractor_distance: proj_distance(&x.attractor, &flag.attractor),
        repellor_distance: hyperplane_distance(&x.repellor, &flag.repellor),
        eps,
    })
}

/// Flag with a prescribed attractor and repellor normal.
pub fn flag_from_vectors(attractor: &[f64], normal: &[f64]) -> Result<ProjFlag> {
    Ok(ProjFlag::new(
        ProjPoint::from_slice(attractor)?,
        super::space::ProjHyperplane::from_slice(normal)?,
    ))
}
