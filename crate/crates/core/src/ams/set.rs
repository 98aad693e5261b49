use rayon::prelude::*;

use super::classify::{
    partition, reduction_from_map, sample_words, ParityMap, ParityRep, Partition,
};
use super::spec::{RepElement, RepPoint, Representation, SemigroupSpec, Word};
use crate::boundary::{
    canonical_pair, displacement, hyperbolic_axis, lineal_threshold_check, measure_boundary,
};
use crate::certificate::ProximalityCertificate;
use crate::error::{Error, Result};
use crate::gromov::{bourdon_distance, SpaceIsometry, SpaceModel};
use crate::projective::{
    cartan_projection, certify_with_flag, measure, proximal_data, svd_flag_lenient, svd_frame,
    ProjFlag,
};
use crate::sampling::purpose;
use crate::tolerances::{N_SCAN_MAX, SPECTRAL_TOL};

/// Knobs of the construction.
#[derive(Clone, Debug, PartialEq)]
pub struct AmsConfig {
    /// Sampling resolution of every certification.
    pub resolution: usize,
    /// Upper end of the scan for `n_0` and the lineal exponents (doubled
    /// once for the exponents before giving up).
    pub n_scan_max: usize,
    /// Words sampled to calibrate the Lipschitz constant `D`.
    pub calibration_words: usize,
    /// Products sampled by the lineal threshold search.
    pub lineal_budget: usize,
    /// Words sampled by the semigroup classifier.
    pub classify_budget: usize,
}

impl Default for AmsConfig {
    fn default() -> Self {
        Self {
            resolution: 64,
            n_scan_max: N_SCAN_MAX,
            calibration_words: 48,
            lineal_budget: 96,
            classify_budget: 96,
        }
    }
}

/// Calibrated constants of one linear or general-type representation.
#[derive(Clone, Debug, PartialEq)]
pub struct RepSchedule {
    pub rep: usize,
    /// Bound on the Lipschitz constants of `rho(beta)^{±1}` (`beta` in the
    /// family) and of `rho(gamma)` on `B^{eps/2}_{Y^-}` (sampled `gamma`).
    pub d: f64,
    /// `eps / (2 D^3)`.
    pub eps_prime: f64,
    /// Smallest `n` with `gamma_0^n` certified `(r, eps')`-proximal here.
    pub n0: usize,
}

/// Displacement intervals of one lineal representation, one per exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct LinealSchedule {
    pub rep: usize,
    /// Displacement beyond which sampled elements are `(r, eps)`-proximal.
    pub threshold: f64,
    pub intervals: Vec<(f64, f64)>,
}

/// Provenance of one element `s_0 beta gamma_0^n beta'`.
#[derive(Clone, Debug, PartialEq)]
pub struct AmsElement {
    /// Index into [`AmsSet::prefixes`] when a parity prefix is used.
    pub prefix: Option<usize>,
    pub beta: usize,
    pub n: usize,
    pub beta_prime: usize,
    pub word: Word,
}

/// The finite set `S`, its parameters and the data `proximalize` needs.
#[derive(Clone, Debug)]
pub struct AmsSet {
    pub gamma0: Word,
    pub family: Vec<Word>,
    pub r: f64,
    pub eps: f64,
    /// `min_i d(x_i^+, X_i^-)` for `gamma_0`.
    pub r1: f64,
    pub schedules: Vec<RepSchedule>,
    pub exponents: Vec<usize>,
    pub prefixes: Vec<ParityRep>,
    pub lineal: Vec<LinealSchedule>,
    pub elements: Vec<AmsElement>,
    pub partition: Partition,
    /// `(x^+, X^-)` of `gamma_0` per representation.
    pub fixed: Vec<(RepPoint, RepPoint)>,
    pub(crate) plus_translates: Vec<Vec<RepPoint>>,
    pub(crate) minus_translates: Vec<Vec<RepPoint>>,
    pub(crate) images: Vec<Vec<RepElement>>,
    pub(crate) parity: Option<ParityMap>,
}

impl AmsSet {
    pub fn n0(&self) -> usize {
        self.schedules.iter().map(|s| s.n0).max().unwrap_or(1)
    }

    /// Images of element `k` in every representation.
    pub fn element_images(&self, k: usize) -> &[RepElement] {
        &self.images[k]
    }

    /// Re-derives the word of element `k` from its provenance.
    pub fn reconstruct(&self, k: usize) -> Word {
        let e = &self.elements[k];
        let core = self.family[e.beta]
            .concat(&self.gamma0.pow(e.n))
            .concat(&self.family[e.beta_prime]);
        match e.prefix {
            Some(p) => self.prefixes[p].word.concat(&core),
            None => core,
        }
    }
}

/// Attracting point and repelling hyperplane (or boundary point) of a
/// proximal or hyperbolic element.
pub(crate) fn fixed_data(rep: &Representation, g: &RepElement) -> Result<(RepPoint, RepPoint)> {
    match (rep, g) {
        (_, RepElement::Linear(m)) => {
            let f = proximal_data(m, SPECTRAL_TOL)?;
            Ok((
                RepPoint::Point(f.attractor),
                RepPoint::Hyperplane(f.repellor),
            ))
        }
        (Representation::Boundary { model, .. }, RepElement::Boundary(h)) => {
            let (p, m) = hyperbolic_axis(model, h)?;
            Ok((RepPoint::Boundary(p), RepPoint::Boundary(m)))
        }
        _ => unreachable!("element matches its representation"),
    }
}

/// `(y^+, Y^-)` from the Cartan decomposition: the SVD flag for matrices,
/// the canonical shadow pair on a boundary (arbitrary for the identity).
pub(crate) fn cartan_pair(rep: &Representation, g: &RepElement) -> Result<(RepPoint, RepPoint)> {
    match (rep, g) {
        (_, RepElement::Linear(m)) => {
            let f = svd_flag_lenient(m)?;
            Ok((
                RepPoint::Point(f.attractor),
                RepPoint::Hyperplane(f.repellor),
            ))
        }
        (Representation::Boundary { model, .. }, RepElement::Boundary(h)) => {
            match canonical_pair(h) {
                Ok((p, m)) => Ok((RepPoint::Boundary(p), RepPoint::Boundary(m))),
                Err(_) => {
                    let probe = match h {
                        SpaceIsometry::Tree(_) => SpaceIsometry::Tree("a".parse().expect("word")),
                        SpaceIsometry::Plane(_) => model.identity(),
                    };
                    let (p, m) = canonical_pair(&probe)?;
                    Ok((RepPoint::Boundary(p), RepPoint::Boundary(m)))
                }
            }
        }
        _ => unreachable!("element matches its representation"),
    }
}

fn global_lipschitz(model: Option<&SpaceModel>, g: &RepElement) -> Result<f64> {
    Ok(match g {
        RepElement::Linear(m) => {
            let mu = cartan_projection(m)?.values;
            (mu[0] - mu[mu.len() - 1]).exp()
        }
        RepElement::Boundary(h) => {
            let model = model.expect("boundary representation");
            model.a.powf(displacement(model, h)?)
        }
    })
}

fn local_lipschitz(
    rep: &Representation,
    g: &RepElement,
    eps: f64,
    resolution: usize,
) -> Result<f64> {
    let (yp, ym) = cartan_pair(rep, g)?;
    Ok(match (rep, g, &yp, &ym) {
        (_, RepElement::Linear(m), RepPoint::Point(p), RepPoint::Hyperplane(h)) => {
            measure(&svd_frame(m)?, h.normal(), p.vector(), eps, resolution).lipschitz
        }
        (
            Representation::Boundary { model, .. },
            RepElement::Boundary(h),
            RepPoint::Boundary(p),
            RepPoint::Boundary(q),
        ) => measure_boundary(model, h, q, p, eps, resolution)?.lipschitz,
        _ => unreachable!("pair matches its representation"),
    })
}

/// Certificate of `g` against known fixed data `(x^+, X^-)`.
pub(crate) fn certify_against(
    rep: &Representation,
    g: &RepElement,
    fixed: &(RepPoint, RepPoint),
    r: f64,
    eps: f64,
    resolution: usize,
) -> Result<ProximalityCertificate> {
    match (rep, g, fixed) {
        (_, RepElement::Linear(m), (RepPoint::Point(p), RepPoint::Hyperplane(h))) => {
            certify_with_flag(m, &ProjFlag::new(p.clone(), h.clone()), r, eps, resolution)
        }
        (
            Representation::Boundary { model, .. },
            RepElement::Boundary(h),
            (RepPoint::Boundary(p), RepPoint::Boundary(q)),
        ) => {
            let gap = bourdon_distance(model, p, q)?;
            let m = measure_boundary(model, h, q, p, eps, resolution)?;
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
        _ => unreachable!("fixed data matches its representation"),
    }
}

/// Certificate of `g` against its own fixed data; `NotProximal` and
/// `NotHyperbolic` are passed through.
pub(crate) fn certify_element(
    rep: &Representation,
    g: &RepElement,
    r: f64,
    eps: f64,
    resolution: usize,
) -> Result<ProximalityCertificate> {
    let fixed = fixed_data(rep, g)?;
    certify_against(rep, g, &fixed, r, eps, resolution)
}

fn calibrate(
    spec: &SemigroupSpec,
    rep: usize,
    family_images: &[RepElement],
    samples: &[Word],
    eps: f64,
    resolution: usize,
) -> Result<f64> {
    let r = spec.representation(rep)?;
    let mut d = 1.0f64;
    for g in family_images {
        d = d.max(global_lipschitz(r.model(), g)?);
    }
    let local: Vec<f64> = samples
        .par_iter()
        .map(|w| local_lipschitz(r, &spec.evaluate(w, rep)?, eps / 2.0, resolution))
        .collect::<Result<_>>()?;
    Ok(local.into_iter().fold(d, f64::max))
}

fn power_scan(
    rep: &Representation,
    g: &RepElement,
    fixed: &(RepPoint, RepPoint),
    r: f64,
    eps: f64,
    n_max: usize,
    resolution: usize,
) -> Result<Option<usize>> {
    let mut power = g.clone();
    for n in 1..=n_max {
        if n > 1 {
            power = power.mul(g)?;
        }
        if certify_against(rep, &power, fixed, r, eps, resolution)?.is_certified() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

fn core_image(
    fam: &[RepElement],
    g0: &RepElement,
    beta: usize,
    n: usize,
    beta_prime: usize,
) -> Result<RepElement> {
    fam[beta].mul(&g0.pow(n as u64))?.mul(&fam[beta_prime])
}

fn lineal_interval(
    model: &SpaceModel,
    fam: &[RepElement],
    g0: &RepElement,
    n: usize,
    threshold: f64,
) -> Result<(f64, f64)> {
    let p = g0.pow(n as u64);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for b in fam {
        let left = b.mul(&p)?;
        for b2 in fam {
            let h = left.mul(b2)?;
            let d = displacement(model, h.as_isometry().expect("boundary element"))?;
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    Ok((lo - threshold, hi + threshold))
}

fn overlaps(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

/// Builds `S = S_{n_1} ∪ ... ∪ S_{n_{N+1}}` with
/// `S_n = { beta gamma_0^n beta' }`, prefixed by parity representatives
/// when some lineal representation has end-swapping elements.
///
/// `n_0` is the smallest power certified `(r, eps')`-proximal in every
/// linear and general-type representation, with `eps' = eps / (2 D^3)`
/// and `D` calibrated per representation. Further exponents are the
/// smallest ones whose lineal displacement intervals are disjoint from all
/// earlier ones.
pub fn build_ams_set(
    spec: &SemigroupSpec,
    gamma0: &Word,
    family: &[Word],
    r: f64,
    eps: f64,
    cfg: &AmsConfig,
) -> Result<AmsSet> {
    let part = partition(spec, cfg.classify_budget)?;
    build_with_partition(spec, &part, gamma0, family, r, eps, cfg)
}

pub(crate) fn build_with_partition(
    spec: &SemigroupSpec,
    part: &Partition,
    gamma0: &Word,
    family: &[Word],
    r: f64,
    eps: f64,
    cfg: &AmsConfig,
) -> Result<AmsSet> {
    if !(eps > 0.0 && r >= eps && r < 1.0) {
        return Err(Error::InvalidInput(format!(
            "need 1 > r >= eps > 0, got r = {r}, eps = {eps}"
        )));
    }
    if family.is_empty() {
        return Err(Error::InvalidInput("the family F is empty".into()));
    }
    let reps = spec.representations();
    let g0: Vec<RepElement> = spec.evaluate_all(gamma0)?;
    let fixed: Vec<(RepPoint, RepPoint)> = reps
        .iter()
        .zip(&g0)
        .map(|(rep, g)| fixed_data(rep, g))
        .collect::<Result<_>>()
        .map_err(|e| {
            Error::HypothesisFailed(format!(
                "gamma_0 = {gamma0} is not simultaneously proximal: {e}"
            ))
        })?;
    let mut r1 = f64::INFINITY;
    for (rep, f) in reps.iter().zip(&fixed) {
        r1 = r1.min(super::spec::separation(rep, &f.0, &f.1)?);
    }
    if 4.0 * r > r1 * (1.0 + 1e-12) {
        return Err(Error::HypothesisFailed(format!(
            "r = {r} exceeds r_1 / 4 = {}",
            r1 / 4.0
        )));
    }
    let fam_images: Vec<Vec<RepElement>> = family
        .iter()
        .map(|w| spec.evaluate_all(w))
        .collect::<Result<_>>()?;
    let per_rep_family = |i: usize| fam_images.iter().map(|v| v[i].clone()).collect::<Vec<_>>();

    let samples = sample_words(
        spec,
        cfg.calibration_words.max(spec.rank()),
        purpose::CALIBRATION,
        0,
    );
    let mut schedules = Vec::new();
    for i in part.transverse() {
        let fam = per_rep_family(i);
        let d = calibrate(spec, i, &fam, &samples, eps, cfg.resolution)?;
        let eps_prime = eps / (2.0 * d.powi(3));
        let n0 = power_scan(&reps[i], &g0[i], &fixed[i], r, eps_prime, cfg.n_scan_max, cfg.resolution)?.ok_or_else(
            || {
                Error::ScheduleFailure(format!(
                    "gamma_0^n is not certified ({r}, {eps_prime:e})-proximal in representation {i} for n <= {}",
                    cfg.n_scan_max
                ))
            },
        )?;
        schedules.push(RepSchedule {
            rep: i,
            d,
            eps_prime,
            n0,
        });
    }
    let n0 = schedules.iter().map(|s| s.n0).max().unwrap_or(1);

    let parity = if part.lineal.is_empty() {
        None
    } else {
        Some(ParityMap::new(spec, &part.lineal)?)
    };
    let prefixes = match &parity {
        Some(p) if !p.is_trivial() => reduction_from_map(spec, p, cfg.classify_budget.max(64))?,
        _ => Vec::new(),
    };
    if let Some(p) = &parity {
        let bad = family
            .iter()
            .chain(std::iter::once(gamma0))
            .find(|w| p.of(w).iter().any(|&b| b));
        if let Some(w) = bad {
            return Err(Error::HypothesisFailed(format!(
                "{w} swaps the ends of a lineal axis"
            )));
        }
    }

    let mut lineal: Vec<LinealSchedule> = Vec::new();
    for (i, _) in &part.lineal {
        let (model, images) = match &reps[*i] {
            Representation::Boundary { model, images, .. } => (model, images),
            Representation::Linear { .. } => {
                unreachable!("lineal representations are boundary actions")
            }
        };
        let t = lineal_threshold_check(model, images, r, eps, cfg.resolution, cfg.lineal_budget)?;
        let iv = lineal_interval(model, &per_rep_family(*i), &g0[*i], n0, t.threshold)?;
        lineal.push(LinealSchedule {
            rep: *i,
            threshold: t.threshold,
            intervals: vec![iv],
        });
    }
    let mut exponents = vec![n0];
    let mut limit = cfg.n_scan_max.max(n0);
    let mut doubled = false;
    let mut n = n0;
    while exponents.len() < part.lineal.len() + 1 {
        n += 1;
        if n > limit {
            if doubled {
                let last: Vec<String> = lineal
                    .iter()
                    .map(|l| format!("{:?}", l.intervals))
                    .collect();
                return Err(Error::ScheduleFailure(format!(
                    "only {} of {} disjoint exponents up to n = {limit}; intervals {}",
                    exponents.len(),
                    part.lineal.len() + 1,
                    last.join("; ")
                )));
            }
            limit *= 2;
            doubled = true;
        }
        let cand: Vec<(f64, f64)> = lineal
            .iter()
            .map(|l| {
                let model = reps[l.rep].model().expect("boundary");
                lineal_interval(model, &per_rep_family(l.rep), &g0[l.rep], n, l.threshold)
            })
            .collect::<Result<_>>()?;
        if lineal
            .iter()
            .zip(&cand)
            .all(|(l, c)| l.intervals.iter().all(|iv| !overlaps(*iv, *c)))
        {
            exponents.push(n);
            for (l, c) in lineal.iter_mut().zip(cand) {
                l.intervals.push(c);
            }
        }
    }

    let prefix_choices: Vec<Option<usize>> = if prefixes.is_empty() {
        vec![None]
    } else {
        (0..prefixes.len()).map(Some).collect()
    };
    let prefix_images: Vec<Vec<RepElement>> = prefixes
        .iter()
        .map(|p| spec.evaluate_all(&p.word))
        .collect::<Result<_>>()?;
    let mut elements = Vec::new();
    let mut images = Vec::new();
    for &pre in &prefix_choices {
        for &n in &exponents {
            for beta in 0..family.len() {
                for beta_prime in 0..family.len() {
                    let core = family[beta]
                        .concat(&gamma0.pow(n))
                        .concat(&family[beta_prime]);
                    let word = match pre {
                        Some(p) => prefixes[p].word.concat(&core),
                        None => core,
                    };
                    let mut im = Vec::with_capacity(reps.len());
                    for i in 0..reps.len() {
                        let c = core_image(&per_rep_family(i), &g0[i], beta, n, beta_prime)?;
                        im.push(match pre {
                            Some(p) => prefix_images[p][i].mul(&c)?,
                            None => c,
                        });
                    }
                    elements.push(AmsElement {
                        prefix: pre,
                        beta,
                        n,
                        beta_prime,
                        word,
                    });
                    images.push(im);
                }
            }
        }
    }

    let mut plus_translates = vec![Vec::new(); reps.len()];
    let mut minus_translates = vec![Vec::new(); reps.len()];
    for i in part.transverse() {
        for im in &fam_images {
            plus_translates[i].push(im[i].act(&fixed[i].0)?);
            minus_translates[i].push(im[i].inverse().act(&fixed[i].1)?);
        }
    }

    Ok(AmsSet {
        gamma0: gamma0.clone(),
        family: family.to_vec(),
        r,
        eps,
        r1,
        schedules,
        exponents,
        prefixes,
        lineal,
        elements,
        partition: part.clone(),
        fixed,
        plus_translates,
        minus_translates,
        images,
        parity,
    })
}
