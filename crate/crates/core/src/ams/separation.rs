use nalgebra::{DMatrix, DVector};

use super::search::transports;
use super::spec::{separation, RepPoint, Representation, SemigroupSpec, Word};
use crate::error::{Error, Result};

/// Per-representation radii: `r` for the translates `rho(beta) x^+` against
/// hyperplanes, `r_dual` for `rho(beta)^{-1} X^-` against points.
#[derive(Clone, Debug, PartialEq)]
pub struct RepRadius {
    pub rep: usize,
    pub r: f64,
    pub r_dual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationRadius {
    pub r0: f64,
    pub per_rep: Vec<RepRadius>,
    /// Cardinality bound the family had to exceed.
    pub required: usize,
}

fn involved(x_plus: &[Vec<RepPoint>], x_minus: &[Vec<RepPoint>], i: usize) -> (usize, usize) {
    (
        x_plus.get(i).map_or(0, |v| v.len()),
        x_minus.get(i).map_or(0, |v| v.len()),
    )
}

/// `2 N' sum_{linear} (dim - 1)(#X^+ + #X^-) + 2 N' sum_{boundary} (#X^+ + #X^-)`
/// over representations with nonempty sets.
pub fn pigeonhole_bound(
    spec: &SemigroupSpec,
    x_plus: &[Vec<RepPoint>],
    x_minus: &[Vec<RepPoint>],
    n_prime: usize,
) -> usize {
    spec.representations()
        .iter()
        .enumerate()
        .map(|(i, rep)| {
            let (p, m) = involved(x_plus, x_minus, i);
            let w = match rep {
                Representation::Linear { images, .. } => images[0].dim() - 1,
                Representation::Boundary { .. } => 1,
            };
            2 * n_prime * w * (p + m)
        })
        .sum()
}

/// `min` over unit `y` of `max_k |<p_k, y>|` for `d` unit vectors in
/// dimension `d`: the largest radius at which some hyperplane is within
/// that distance of all of them. Equals `1 / max_s |P^{-T} s|` over sign
/// vectors `s`, the maximum of a convex function over the cube.
pub fn linear_width(vectors: &[&DVector<f64>]) -> f64 {
    let d = vectors.len();
    let p = DMatrix::from_columns(&vectors.iter().map(|v| v.normalize()).collect::<Vec<_>>());
    let lu = p.transpose().lu();
    let mut best = 0.0f64;
    for mask in 0..(1u32 << (d - 1)) {
        let s = DVector::from_fn(d, |k, _| {
            if k > 0 && mask & (1 << (k - 1)) != 0 {
                -1.0
            } else {
                1.0
            }
        });
        match lu.solve(&s) {
            Some(x) if x.iter().all(|t| t.is_finite()) => best = best.max(x.norm()),
            _ => return 0.0,
        }
    }
    if best == 0.0 {
        0.0
    } else {
        (1.0 / best).min(1.0)
    }
}

fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k > n || k == 0 {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Radius of one family of translates of a single point: the exact width
/// over `dim`-subsets (linear) or half the smallest pairwise distance
/// (boundary). `1` when the family is too small to constrain anything.
fn family_radius(rep: &Representation, pts: &[RepPoint]) -> Result<f64> {
    match rep {
        Representation::Linear { images, .. } => {
            let d = images[0].dim();
            let vecs: Vec<&DVector<f64>> = pts
                .iter()
                .map(|p| match p {
                    RepPoint::Point(x) => x.vector(),
                    RepPoint::Hyperplane(h) => h.normal(),
                    RepPoint::Boundary(_) => unreachable!("linear objects"),
                })
                .collect();
            let mut r = 1.0f64;
            for_each_subset(vecs.len(), d, &mut |idx| {
                let sub: Vec<&DVector<f64>> = idx.iter().map(|&k| vecs[k]).collect();
                r = r.min(linear_width(&sub));
            });
            Ok(r)
        }
        Representation::Boundary { .. } => {
            let mut r = 1.0f64;
            for a in 0..pts.len() {
                for b in a + 1..pts.len() {
                    r = r.min(separation(rep, &pts[a], &pts[b])? / 2.0);
                }
            }
            Ok(r)
        }
    }
}

/// The radius `r_0` of the pigeonhole argument: for any `N'` adversary
/// hyperplanes (or boundary points) per representation, some `beta` in the
/// family has `d(rho(beta) x^+, y) >= r_0` and `d(y', rho(beta)^{-1} X^-) >= r_0`
/// for all of them simultaneously.
///
/// Fails with `FamilyTooSmall` unless `#F` exceeds [`pigeonhole_bound`].
pub fn separation_radius(
    spec: &SemigroupSpec,
    family: &[Word],
    x_plus: &[Vec<RepPoint>],
    x_minus: &[Vec<RepPoint>],
    n_prime: usize,
) -> Result<SeparationRadius> {
    let required = pigeonhole_bound(spec, x_plus, x_minus, n_prime);
    if family.len() <= required {
        return Err(Error::FamilyTooSmall {
            size: family.len(),
            required,
        });
    }
    let moved = family
        .iter()
        .map(|w| transports(spec, w, x_plus, x_minus))
        .collect::<Result<Vec<_>>>()?;
    let mut per_rep = Vec::new();
    let mut r0 = 1.0f64;
    for (i, rep) in spec.representations().iter().enumerate() {
        let (p, m) = involved(x_plus, x_minus, i);
        if p + m == 0 {
            continue;
        }
        let mut r = 1.0f64;
        for k in 0..p {
            let pts: Vec<RepPoint> = moved.iter().map(|t| t.families[i][0][k].clone()).collect();
            r = r.min(family_radius(rep, &pts)?);
        }
        let mut r_dual = 1.0f64;
        for k in 0..m {
            let pts: Vec<RepPoint> = moved.iter().map(|t| t.families[i][1][k].clone()).collect();
            r_dual = r_dual.min(family_radius(rep, &pts)?);
        }
        r0 = r0.min(r).min(r_dual);
        per_rep.push(RepRadius { rep: i, r, r_dual });
    }
    Ok(SeparationRadius {
        r0,
        per_rep,
        required,
    })
}
