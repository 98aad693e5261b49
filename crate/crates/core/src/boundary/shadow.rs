use crate::error::{Error, Result};
use crate::gromov::{
    bourdon_distance, distance, gromov_product_mixed, BoundaryPoint, SpaceModel, SpacePoint,
};

/// `Shad_light(occluder, sigma)`: boundary points `x` with
/// `(light|x)_occluder <= sigma`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShadowSpec {
    pub light: SpacePoint,
    pub occluder: SpacePoint,
    pub sigma: f64,
}

impl ShadowSpec {
    pub fn new(light: SpacePoint, occluder: SpacePoint, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "shadow parameter must be positive, got {sigma}"
            )));
        }
        Ok(Self {
            light,
            occluder,
            sigma,
        })
    }
}

pub fn shadow_contains(model: &SpaceModel, spec: &ShadowSpec, xi: &BoundaryPoint) -> Result<bool> {
    Ok(gromov_product_mixed(model, &spec.light, xi, &spec.occluder)? <= spec.sigma)
}

/// Measured value against its bound for one item of the shadow lemma.
#[derive(Clone, Debug, PartialEq)]
pub struct ShadowItem {
    pub applicable: bool,
    pub measured: f64,
    pub bound: f64,
}

impl ShadowItem {
    pub fn slack(&self) -> f64 {
        self.bound - self.measured
    }
}

/// Items (i)–(iv) of the shadow lemma, with `m` the light, `p` the
/// occluder and `o` the basepoint.
///
/// - (i): diameter of the complement of `Shad_m(o, sigma)` against `a^{delta - sigma}`;
/// - (ii): when `sigma >= d(m, p) + C`, the fraction of samples outside
///   `Shad_m(p, sigma)` (bound 0);
/// - (iii): diameter of `Shad_o(p, sigma)` against `a^{C + delta + sigma - d(o, p)}`;
/// - (iv): when `d(o, p) > 2 sigma + C`, the number of samples in
///   `Shad_o(p, sigma) ∩ Shad_p(o, sigma)` (bound 0).
#[derive(Clone, Debug, PartialEq)]
pub struct ShadowReport {
    pub sigma: f64,
    pub distance: f64,
    pub items: [ShadowItem; 4],
    pub samples: usize,
}

impl ShadowReport {
    /// Exact on the tree; relative `1e-9` on the plane.
    pub fn holds(&self, model: &SpaceModel) -> bool {
        let tol = if model.is_tree() { 0.0 } else { 1e-9 };
        self.items
            .iter()
            .all(|it| !it.applicable || it.slack() >= -tol * it.bound.abs().max(1.0))
    }
}

fn diameter(model: &SpaceModel, pts: &[&BoundaryPoint]) -> Result<f64> {
    let mut d = 0.0f64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d = d.max(bourdon_distance(model, pts[i], pts[j])?);
        }
    }
    Ok(d)
}

pub fn shadow_lemma_check(
    model: &SpaceModel,
    spec: &ShadowSpec,
    samples: &[BoundaryPoint],
) -> Result<ShadowReport> {
    if samples.len() < 100 {
        return Err(Error::TooFewPoints {
            needed: 100,
            got: samples.len(),
        });
    }
    let o = model.basepoint();
    let (m, p, sigma) = (&spec.light, &spec.occluder, spec.sigma);
    let (a, delta, c) = (model.a, model.delta, model.identity_c);

    let mut outside_m_o = Vec::new();
    let mut in_o_p = Vec::new();
    let mut outside_m_p = 0usize;
    let mut both = 0usize;
    for x in samples {
        if gromov_product_mixed(model, m, x, &o)? > sigma {
            outside_m_o.push(x);
        }
        if gromov_product_mixed(model, m, x, p)? > sigma {
            outside_m_p += 1;
        }
        let op = gromov_product_mixed(model, &o, x, p)? <= sigma;
        if op {
            in_o_p.push(x);
            if gromov_product_mixed(model, p, x, &o)? <= sigma {
                both += 1;
            }
        }
    }
    let d_mp = distance(model, m, p)?;
    let d_op = distance(model, &o, p)?;
    let items = [
        ShadowItem {
            applicable: true,
            measured: diameter(model, &outside_m_o)?,
            bound: a.powf(delta - sigma),
        },
        ShadowItem {
            applicable: sigma >= d_mp + c,
            measured: outside_m_p as f64,
            bound: 0.0,
        },
        ShadowItem {
            applicable: true,
            measured: diameter(model, &in_o_p)?,
            bound: a.powf(c + delta + sigma - d_op),
        },
        ShadowItem {
            applicable: d_op > 2.0 * sigma + c,
            measured: both as f64,
            bound: 0.0,
        },
    ];
    Ok(ShadowReport {
        sigma,
        distance: d_op,
        items,
        samples: samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_shadow_examples() {
        let model = SpaceModel::tree(2, 2.0).unwrap();
        let e = SpacePoint::Tree("1".parse().unwrap());
        for n in 2..6 {
            let p = SpacePoint::Tree("a".parse::<crate::gromov::FreeWord>().unwrap().pow(n));
            let behind = BoundaryPoint::Tree(
                crate::gromov::TreeRay::new(
                    "a".parse::<crate::gromov::FreeWord>().unwrap().pow(n),
                    "b".parse().unwrap(),
                )
                .unwrap(),
            );
            let back = BoundaryPoint::Tree("(b)".parse().unwrap());
            let tiny = ShadowSpec::new(e.clone(), p.clone(), 1e-9).unwrap();
            assert!(shadow_contains(&model, &tiny, &behind).unwrap());
            let one = ShadowSpec::new(e.clone(), p.clone(), 1.0).unwrap();
            assert!(!shadow_contains(&model, &one, &back).unwrap());
        }
    }
}
