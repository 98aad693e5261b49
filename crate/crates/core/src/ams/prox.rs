use rayon::prelude::*;

use super::set::{cartan_pair, certify_element, AmsSet};
use super::spec::{separation, RepElement, Representation, SemigroupSpec, Word};
use crate::boundary::{displacement, stable_length};
use crate::certificate::ProximalityCertificate;
use crate::error::{Error, Result};
use crate::projective::{cartan_projection, jordan_projection};

/// How the element `s` was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Selection {
    /// The choice prescribed by the pigeonhole argument certified.
    Proof,
    /// The prescribed choice did not certify; a scan of `S` did.
    Scan,
}

impl std::fmt::Display for Selection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Selection::Proof => "proof",
            Selection::Scan => "scan",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ProximalizeSuccess {
    pub selection: Selection,
    /// Index into [`AmsSet::elements`].
    pub element: usize,
    pub s: Word,
    /// One certificate of `gamma s` per representation.
    pub certificates: Vec<ProximalityCertificate>,
}

/// Scorecard when no element of `S` certifies.
#[derive(Clone, Debug)]
pub struct ProximalizeFailure {
    /// Element with the largest worst-case margin; `None` for an empty set.
    pub best_element: Option<usize>,
    pub best_margin: f64,
    /// Per representation, the failed conditions of the best element.
    pub failed: Vec<(usize, Vec<&'static str>)>,
}

#[derive(Clone, Debug)]
pub enum ProximalizeOutcome {
    Success(ProximalizeSuccess),
    Failure(ProximalizeFailure),
}

impl ProximalizeOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, ProximalizeOutcome::Success(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            ProximalizeOutcome::Success(s) if s.selection == Selection::Proof => "proof",
            ProximalizeOutcome::Success(_) => "scan",
            ProximalizeOutcome::Failure(_) => "failure",
        }
    }
}

/// Largest violation among the three conditions, negated: positive means
/// all hold with room to spare.
fn margin(c: &ProximalityCertificate) -> f64 {
    -[
        2.0 * c.r - c.gap,
        c.image_radius - c.eps,
        c.lipschitz_estimate - c.eps,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max)
}

fn certify_all(
    spec: &SemigroupSpec,
    g: &[RepElement],
    r: f64,
    eps: f64,
    resolution: usize,
) -> Result<Vec<Option<ProximalityCertificate>>> {
    spec.representations()
        .iter()
        .zip(g)
        .map(
            |(rep, h)| match certify_element(rep, h, r, eps, resolution) {
                Ok(c) => Ok(Some(c)),
                Err(Error::NotProximal { .. }) | Err(Error::NotHyperbolic(_)) => Ok(None),
                Err(e) => Err(e),
            },
        )
        .collect()
}

fn score(certs: &[Option<ProximalityCertificate>]) -> f64 {
    certs
        .iter()
        .map(|c| c.as_ref().map_or(f64::NEG_INFINITY, margin))
        .fold(f64::INFINITY, f64::min)
}

fn all_certified(certs: &[Option<ProximalityCertificate>]) -> bool {
    certs
        .iter()
        .all(|c| c.as_ref().is_some_and(|c| c.is_certified()))
}

fn product(gamma: &[RepElement], s: &[RepElement]) -> Result<Vec<RepElement>> {
    gamma.iter().zip(s).map(|(a, b)| a.mul(b)).collect()
}

impl AmsSet {
    fn element_index(
        &self,
        prefix: Option<usize>,
        j: usize,
        beta: usize,
        beta_prime: usize,
    ) -> usize {
        let f = self.family.len();
        let block = self.exponents.len() * f * f;
        prefix.unwrap_or(0) * block + j * f * f + beta * f + beta_prime
    }

    /// Parity prefix matching `gamma`, if the parity map is nontrivial.
    fn prefix_for(&self, gamma: &Word) -> Result<Option<usize>> {
        if self.prefixes.is_empty() {
            return Ok(None);
        }
        let p = self
            .parity
            .as_ref()
            .expect("prefixes come from a parity map")
            .of(gamma);
        self.prefixes
            .iter()
            .position(|q| q.parity == p)
            .map(Some)
            .ok_or_else(|| Error::NotLineal(format!("no parity representative for {gamma}")))
    }

    /// Exponent slot whose lineal intervals all miss `|gamma'|`; at most one
    /// slot per lineal representation is excluded, and there is one slot
    /// more than lineal representations.
    fn choose_exponent(&self, spec: &SemigroupSpec, gp: &[RepElement]) -> Result<usize> {
        let mut hits = vec![0usize; self.exponents.len()];
        for l in &self.lineal {
            let model = spec.representation(l.rep)?.model().expect("boundary");
            let d = displacement(model, gp[l.rep].as_isometry().expect("boundary element"))?;
            for (j, iv) in l.intervals.iter().enumerate() {
                if iv.0 <= d && d <= iv.1 {
                    hits[j] += 1;
                }
            }
        }
        Ok((0..hits.len())
            .min_by_key(|&j| (hits[j], j))
            .expect("at least one exponent"))
    }

    fn choose_beta(&self, spec: &SemigroupSpec, gp: &[RepElement]) -> Result<usize> {
        let reps = spec.representations();
        let transverse = self.partition.transverse();
        let ym: Vec<_> = transverse
            .iter()
            .map(|&i| cartan_pair(&reps[i], &gp[i]).map(|p| p.1))
            .collect::<Result<_>>()?;
        let mut best = (f64::NEG_INFINITY, 0);
        for b in 0..self.family.len() {
            let mut m = f64::INFINITY;
            for (k, &i) in transverse.iter().enumerate() {
                m = m.min(separation(&reps[i], &self.plus_translates[i][b], &ym[k])?);
            }
            if m > best.0 {
                best = (m, b);
            }
        }
        Ok(best.1)
    }

    fn choose_beta_prime(
        &self,
        spec: &SemigroupSpec,
        gp: &[RepElement],
        beta: usize,
    ) -> Result<usize> {
        let reps = spec.representations();
        let transverse = self.partition.transverse();
        let fam_b: Vec<RepElement> = transverse
            .iter()
            .map(|&i| spec.evaluate(&self.family[beta], i))
            .collect::<Result<_>>()?;
        let mut pts = Vec::new();
        for (k, &i) in transverse.iter().enumerate() {
            pts.push(gp[i].mul(&fam_b[k])?.act(&self.fixed[i].0)?);
        }
        let mut best = (f64::NEG_INFINITY, 0);
        for b in 0..self.family.len() {
            let mut m = f64::INFINITY;
            for (k, &i) in transverse.iter().enumerate() {
                m = m.min(separation(&reps[i], &pts[k], &self.minus_translates[i][b])?);
            }
            if m > best.0 {
                best = (m, b);
            }
        }
        Ok(best.1)
    }
}

/// Finds `s` in `S` with `gamma s` certified `(r, eps)`-proximal in every
/// representation.
///
/// The prescribed choice (parity prefix, exponent by pigeonhole, then the
/// best separated `beta` and `beta'`) is tried first; if it does not
/// certify, every element with the same prefix is scanned in
/// `(n, beta, beta')` order.
pub fn proximalize(
    spec: &SemigroupSpec,
    gamma: &Word,
    set: &AmsSet,
    resolution: usize,
) -> Result<ProximalizeOutcome> {
    let g = spec.evaluate_all(gamma)?;
    if set.elements.is_empty() {
        return Ok(ProximalizeOutcome::Failure(ProximalizeFailure {
            best_element: None,
            best_margin: f64::NEG_INFINITY,
            failed: Vec::new(),
        }));
    }
    let prefix = set.prefix_for(gamma)?;
    let gp = match prefix {
        Some(p) => product(&g, &spec.evaluate_all(&set.prefixes[p].word)?)?,
        None => g.clone(),
    };
    let j = set.choose_exponent(spec, &gp)?;
    let beta = set.choose_beta(spec, &gp)?;
    let beta_prime = set.choose_beta_prime(spec, &gp, beta)?;
    let k = set.element_index(prefix, j, beta, beta_prime);
    let certs = certify_all(
        spec,
        &product(&g, set.element_images(k))?,
        set.r,
        set.eps,
        resolution,
    )?;
    if all_certified(&certs) {
        return Ok(ProximalizeOutcome::Success(success(
            set,
            Selection::Proof,
            k,
            certs,
        )));
    }
    let mut best = (score(&certs), k, certs);
    let f = set.family.len();
    for j in 0..set.exponents.len() {
        for b in 0..f {
            for b2 in 0..f {
                let idx = set.element_index(prefix, j, b, b2);
                if idx == k {
                    continue;
                }
                let c = certify_all(
                    spec,
                    &product(&g, set.element_images(idx))?,
                    set.r,
                    set.eps,
                    resolution,
                )?;
                if all_certified(&c) {
                    return Ok(ProximalizeOutcome::Success(success(
                        set,
                        Selection::Scan,
                        idx,
                        c,
                    )));
                }
                let s = score(&c);
                if s > best.0 {
                    best = (s, idx, c);
                }
            }
        }
    }
    let failed = best
        .2
        .iter()
        .enumerate()
        .map(|(i, c)| {
            (
                i,
                c.as_ref()
                    .map_or(vec!["proximal"], |c| c.failed_conditions()),
            )
        })
        .filter(|(_, f)| !f.is_empty())
        .collect();
    Ok(ProximalizeOutcome::Failure(ProximalizeFailure {
        best_element: Some(best.1),
        best_margin: best.0,
        failed,
    }))
}

fn success(
    set: &AmsSet,
    selection: Selection,
    k: usize,
    certs: Vec<Option<ProximalityCertificate>>,
) -> ProximalizeSuccess {
    ProximalizeSuccess {
        selection,
        element: k,
        s: set.elements[k].word.clone(),
        certificates: certs.into_iter().map(|c| c.expect("certified")).collect(),
    }
}

/// Which bound a [`RepDelta`] measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaKind {
    /// `||lambda(gamma s) - mu(gamma)||_∞` in a linear representation.
    Spectral,
    /// `| |gamma s|_∞ - |gamma| |` in a boundary representation.
    Length,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepDelta {
    pub rep: usize,
    pub kind: DeltaKind,
    pub delta: f64,
    pub budget: f64,
}

impl RepDelta {
    pub fn within_budget(&self) -> bool {
        self.delta <= self.budget + 1e-6
    }
}

#[derive(Clone, Debug)]
pub struct CorollaryRow {
    pub gamma: Word,
    pub outcome: ProximalizeOutcome,
    pub deltas: Vec<RepDelta>,
    /// Whether `gamma s` is still certified at twice the resolution.
    pub recheck: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorollarySummary {
    pub samples: usize,
    pub successes: usize,
    pub by_proof: usize,
    pub success_rate: f64,
    pub max_spectral: f64,
    pub mean_spectral: f64,
    pub max_length: f64,
    pub mean_length: f64,
    pub budget_violations: usize,
    pub recheck_failures: usize,
}

#[derive(Clone, Debug)]
pub struct CorollaryReport {
    pub rows: Vec<CorollaryRow>,
    pub summary: CorollarySummary,
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, b| a.max(b.abs()))
}

fn deltas(
    spec: &SemigroupSpec,
    set: &AmsSet,
    gamma: &Word,
    s: &Word,
    n_max: usize,
) -> Result<Vec<RepDelta>> {
    let gs = gamma.concat(s);
    let mut out = Vec::new();
    for (i, rep) in spec.representations().iter().enumerate() {
        match rep {
            Representation::Linear { .. } => {
                let g = spec.evaluate(gamma, i)?;
                let h = spec.evaluate(&gs, i)?;
                let sm = spec.evaluate(s, i)?;
                let lambda = jordan_projection(h.as_matrix().expect("linear"))?.values;
                let mu = cartan_projection(g.as_matrix().expect("linear"))?.values;
                let diff: Vec<f64> = lambda.iter().zip(&mu).map(|(a, b)| a - b).collect();
                let budget = sup(&cartan_projection(sm.as_matrix().expect("linear"))?.values)
                    + (2.0 * set.r * set.r).ln().abs();
                out.push(RepDelta {
                    rep: i,
                    kind: DeltaKind::Spectral,
                    delta: sup(&diff),
                    budget,
                });
            }
            Representation::Boundary { model, .. } => {
                let g = spec.evaluate(gamma, i)?;
                let h = spec.evaluate(&gs, i)?;
                let sm = spec.evaluate(s, i)?;
                let len = displacement(model, g.as_isometry().expect("boundary"))?;
                let stable = stable_length(model, h.as_isometry().expect("boundary"), n_max)?.exact;
                let budget = displacement(model, sm.as_isometry().expect("boundary"))?
                    + 2.0 * model.log_a(1.0 / (2.0 * set.r))
                    + model.length_gap_c;
                out.push(RepDelta {
                    rep: i,
                    kind: DeltaKind::Length,
                    delta: (stable - len).abs(),
                    budget,
                });
            }
        }
    }
    Ok(out)
}

/// Runs [`proximalize`] on every sample and compares the spectra and
/// stable lengths of `gamma s` with the Cartan projections and
/// displacements of `gamma`. Successes are re-certified at twice the
/// resolution. Rows come back in sample order.
pub fn verify_main_corollary(
    spec: &SemigroupSpec,
    set: &AmsSet,
    samples: &[Word],
    n_max: usize,
    resolution: usize,
) -> Result<CorollaryReport> {
    let rows: Vec<CorollaryRow> = samples
        .par_iter()
        .map(|gamma| {
            let outcome = proximalize(spec, gamma, set, resolution)?;
            let (deltas, recheck) = match &outcome {
                ProximalizeOutcome::Success(s) => {
                    let d = deltas(spec, set, gamma, &s.s, n_max)?;
                    let g = product(&spec.evaluate_all(gamma)?, set.element_images(s.element))?;
                    let again = certify_all(spec, &g, set.r, set.eps, 2 * resolution)?;
                    (d, Some(all_certified(&again)))
                }
                ProximalizeOutcome::Failure(_) => (Vec::new(), None),
            };
            Ok(CorollaryRow {
                gamma: gamma.clone(),
                outcome,
                deltas,
                recheck,
            })
        })
        .collect::<Result<_>>()?;
    let summary = summarize(&rows);
    Ok(CorollaryReport { rows, summary })
}

fn summarize(rows: &[CorollaryRow]) -> CorollarySummary {
    let successes = rows.iter().filter(|r| r.outcome.is_success()).count();
    let by_proof = rows.iter().filter(|r| r.outcome.label() == "proof").count();
    let stat = |kind: DeltaKind| {
        let v: Vec<f64> = rows
            .iter()
            .flat_map(|r| &r.deltas)
            .filter(|d| d.kind == kind)
            .map(|d| d.delta)
            .collect();
        let max = v.iter().copied().fold(0.0, f64::max);
        let mean = if v.is_empty() {
            0.0
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        };
        (max, mean)
    };
    let (max_spectral, mean_spectral) = stat(DeltaKind::Spectral);
    let (max_length, mean_length) = stat(DeltaKind::Length);
    CorollarySummary {
        samples: rows.len(),
        successes,
        by_proof,
        success_rate: if rows.is_empty() {
            0.0
        } else {
            successes as f64 / rows.len() as f64
        },
        max_spectral,
        mean_spectral,
        max_length,
        mean_length,
        budget_violations: rows
            .iter()
            .flat_map(|r| &r.deltas)
            .filter(|d| !d.within_budget())
            .count(),
        recheck_failures: rows.iter().filter(|r| r.recheck == Some(false)).count(),
    }
}
