use super::classify::{partition, ParityMap};
use super::search::{build_general_position_family, find_simultaneous_proximal_filtered};
use super::separation::{pigeonhole_bound, separation_radius, SeparationRadius};
use super::set::{build_with_partition, fixed_data, AmsConfig, AmsSet};
use super::spec::{separation, RepPoint, SemigroupSpec};
use crate::error::{Error, Result};

/// Everything `construct_ams_set` chose on the way.
#[derive(Clone, Debug)]
pub struct Construction {
    pub set: AmsSet,
    pub radius: SeparationRadius,
}

/// Classification, `gamma_0`, the general-position family, `r_0`, and the
/// set itself, with `r = min(target, r_0 / 3, r_1 / 4)` and `eps = r` unless
/// given.
pub fn construct_ams_set(
    spec: &SemigroupSpec,
    cfg: &AmsConfig,
    budget: usize,
    r_target: Option<f64>,
    eps: Option<f64>,
) -> Result<Construction> {
    let part = partition(spec, cfg.classify_budget)?;
    let parity = if part.lineal.is_empty() {
        None
    } else {
        Some(ParityMap::new(spec, &part.lineal)?)
    };
    let accept = |w: &super::spec::Word| parity.as_ref().is_none_or(|p| p.of(w).iter().all(|b| !b));
    let gamma0 = find_simultaneous_proximal_filtered(spec, budget, &accept)?;

    let reps = spec.representations();
    let n = reps.len();
    let mut xp: Vec<Vec<RepPoint>> = vec![Vec::new(); n];
    let mut xm: Vec<Vec<RepPoint>> = vec![Vec::new(); n];
    let mut r1 = f64::INFINITY;
    for i in 0..n {
        let (p, m) = fixed_data(&reps[i], &spec.evaluate(&gamma0, i)?)?;
        r1 = r1.min(separation(&reps[i], &p, &m)?);
        if part.transverse().contains(&i) {
            xp[i].push(p);
            xm[i].push(m);
        }
    }
    let size = pigeonhole_bound(spec, &xp, &xm, 1) + 1;
    let family = build_general_position_family(spec, &xp, &xm, size, budget.max(size))?;
    let radius = separation_radius(spec, &family, &xp, &xm, 1)?;
    let mut r = (radius.r0 / 3.0).min(r1 / 4.0);
    if let Some(t) = r_target {
        r = r.min(t);
    }
    let eps = eps.unwrap_or(r);
    if !(r > 0.0) {
        return Err(Error::HypothesisFailed(format!(
            "separation radius r_0 = {} is degenerate",
            radius.r0
        )));
    }
    let set = build_with_partition(spec, &part, &gamma0, &family, r, eps.min(r), cfg)?;
    Ok(Construction { set, radius })
}
