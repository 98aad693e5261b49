use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::gromov::{bourdon_distance, BoundaryPoint, SpaceIsometry, SpaceModel};
use crate::projective::{
    hyperplane_distance, point_hyperplane_distance, proj_distance, ProjHyperplane, ProjPoint,
    SquareMatrix,
};

/// Semigroup element as a nonempty sequence of generator indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidInput("words must be nonempty".into()));
        }
        Ok(Self(indices))
    }

    pub fn generator(i: usize) -> Self {
        Self(vec![i])
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, rhs: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&rhs.0);
        Word(v)
    }

    /// `self^n` for `n >= 1`.
    pub fn pow(&self, n: usize) -> Word {
        assert!(n >= 1, "semigroup words have no zeroth power");
        Word(self.0.repeat(n))
    }

    /// Length first, then lexicographic.
    pub fn shortlex_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Dot-separated generator indices, e.g. `0.1.1`.
    fn from_str(s: &str) -> Result<Self> {
        let v = s
            .split('.')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("bad word index {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Word::new(v)
    }
}

/// Images of the generators in one representation.
#[derive(Clone, Debug)]
pub enum Representation {
    Linear {
        name: String,
        images: Vec<SquareMatrix>,
    },
    Boundary {
        name: String,
        model: SpaceModel,
        images: Vec<SpaceIsometry>,
    },
}

impl Representation {
    pub fn name(&self) -> &str {
        match self {
            Representation::Linear { name, .. } | Representation::Boundary { name, .. } => name,
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, Representation::Linear { .. })
    }

    pub fn model(&self) -> Option<&SpaceModel> {
        match self {
            Representation::Boundary { model, .. } => Some(model),
            Representation::Linear { .. } => None,
        }
    }

    fn image_count(&self) -> usize {
        match self {
            Representation::Linear { images, .. } => images.len(),
            Representation::Boundary { images, .. } => images.len(),
        }
    }

    fn image(&self, i: usize) -> RepElement {
        match self {
            Representation::Linear { images, .. } => RepElement::Linear(images[i].clone()),
            Representation::Boundary { images, .. } => RepElement::Boundary(images[i].clone()),
        }
    }
}

/// Image of a word in one representation.
#[derive(Clone, Debug)]
pub enum RepElement {
    Linear(SquareMatrix),
    Boundary(SpaceIsometry),
}

impl RepElement {
    pub fn mul(&self, rhs: &RepElement) -> Result<RepElement> {
        match (self, rhs) {
            (RepElement::Linear(a), RepElement::Linear(b)) => Ok(RepElement::Linear(a.mul(b))),
            (RepElement::Boundary(a), RepElement::Boundary(b)) => {
                Ok(RepElement::Boundary(a.mul(b)?))
            }
            _ => Err(Error::ModelMismatch(
                "elements of different representations".into(),
            )),
        }
    }

    pub fn inverse(&self) -> RepElement {
        match self {
            RepElement::Linear(a) => RepElement::Linear(a.inverse()),
            RepElement::Boundary(a) => RepElement::Boundary(a.inverse()),
        }
    }

    pub fn pow(&self, n: u64) -> RepElement {
        match self {
            RepElement::Linear(a) => RepElement::Linear(a.pow(n)),
            RepElement::Boundary(a) => RepElement::Boundary(a.pow(n)),
        }
    }

    pub fn as_matrix(&self) -> Option<&SquareMatrix> {
        match self {
            RepElement::Linear(a) => Some(a),
            RepElement::Boundary(_) => None,
        }
    }

    pub fn as_isometry(&self) -> Option<&SpaceIsometry> {
        match self {
            RepElement::Boundary(a) => Some(a),
            RepElement::Linear(_) => None,
        }
    }

    /// Action on a point, hyperplane or boundary point.
    pub fn act(&self, p: &RepPoint) -> Result<RepPoint> {
        match (self, p) {
            (RepElement::Linear(g), RepPoint::Point(x)) => Ok(RepPoint::Point(ProjPoint::new(
                g.apply_direction(x.vector()),
            )?)),
            (RepElement::Linear(g), RepPoint::Hyperplane(h)) => Ok(RepPoint::Hyperplane(
                ProjHyperplane::from_normal(g.dual_direction(h.normal()))?,
            )),
            (RepElement::Boundary(g), RepPoint::Boundary(x)) => {
                Ok(RepPoint::Boundary(g.act_boundary(x)?))
            }
            _ => Err(Error::ModelMismatch(
                "point and element of different representations".into(),
            )),
        }
    }
}

/// Point, hyperplane or boundary point of one representation.
#[derive(Clone, Debug, PartialEq)]
pub enum RepPoint {
    Point(ProjPoint),
    Hyperplane(ProjHyperplane),
    Boundary(BoundaryPoint),
}

impl fmt::Display for RepPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vec = |v: &DVector<f64>| {
            v.iter()
                .map(|x| crate::numfmt::real(*x))
                .collect::<Vec<_>>()
                .join(" ")
        };
        match self {
            RepPoint::Point(p) => write!(f, "[{}]", vec(p.vector())),
            RepPoint::Hyperplane(h) => write!(f, "<{}>", vec(h.normal())),
            RepPoint::Boundary(b) => write!(f, "{b}"),
        }
    }
}

/// Distance between two objects of one representation: projective or
/// point-hyperplane distance, or the Bourdon distance on a boundary.
pub fn separation(rep: &Representation, a: &RepPoint, b: &RepPoint) -> Result<f64> {
    Ok(match (a, b) {
        (RepPoint::Point(x), RepPoint::Point(y)) => proj_distance(x, y),
        (RepPoint::Point(x), RepPoint::Hyperplane(h))
        | (RepPoint::Hyperplane(h), RepPoint::Point(x)) => point_hyperplane_distance(x, h),
        (RepPoint::Hyperplane(h), RepPoint::Hyperplane(k)) => hyperplane_distance(h, k),
        (RepPoint::Boundary(x), RepPoint::Boundary(y)) => match rep.model() {
            Some(m) => bourdon_distance(m, x, y)?,
            None => {
                return Err(Error::ModelMismatch(
                    "boundary points in a linear representation".into(),
                ))
            }
        },
        _ => return Err(Error::ModelMismatch("incomparable points".into())),
    })
}

type Cache = HashMap<(Vec<usize>, usize), RepElement>;

/// Generators, their images in every representation, and the seed every
/// search derives its randomness from.
///
/// Word evaluations are cached behind a lock; concurrent readers never
/// block each other.
#[derive(Debug)]
pub struct SemigroupSpec {
    generators: Vec<String>,
    reps: Vec<Representation>,
    pub seed: u64,
    cache: RwLock<Cache>,
}

impl Clone for SemigroupSpec {
    fn clone(&self) -> Self {
        Self {
            generators: self.generators.clone(),
            reps: self.reps.clone(),
            seed: self.seed,
            cache: RwLock::new(HashMap::new()),
        }
    }
}

const CACHE_LIMIT: usize = 200_000;

impl SemigroupSpec {
    pub fn new(generators: Vec<String>, reps: Vec<Representation>, seed: u64) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidInput(
                "at least one generator is required".into(),
            ));
        }
        for (k, g) in generators.iter().enumerate() {
            if g.is_empty() || generators[..k].contains(g) {
                return Err(Error::InvalidInput(format!(
                    "generator name {g:?} is empty or repeated"
                )));
            }
        }
        if reps.is_empty() {
            return Err(Error::InvalidInput(
                "at least one representation is required".into(),
            ));
        }
        for (i, rep) in reps.iter().enumerate() {
            if rep.image_count() != generators.len() {
                return Err(Error::InvalidInput(format!(
                    "representation {i} ({}) has {} images for {} generators",
                    rep.name(),
                    rep.image_count(),
                    generators.len()
                )));
            }
            match rep {
                Representation::Linear { images, .. } => {
                    let d = images[0].dim();
                    if let Some(k) = images.iter().position(|g| g.dim() != d) {
                        return Err(Error::InvalidInput(format!(
                            "representation {i}: image {k} has dimension {} (expected {d})",
                            images[k].dim()
                        )));
                    }
                }
                Representation::Boundary { model, images, .. } => {
                    for (k, g) in images.iter().enumerate() {
                        model.check_isometry(g).map_err(|e| {
                            Error::InvalidInput(format!("representation {i}, image {k}: {e}"))
                        })?;
                    }
                }
            }
        }
        Ok(Self {
            generators,
            reps,
            seed,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn representations(&self) -> &[Representation] {
        &self.reps
    }

    pub fn representation(&self, i: usize) -> Result<&Representation> {
        self.reps.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.reps.len(),
        })
    }

    /// Word spelled with generator names, separated by dots unless every
    /// name is a single character.
    pub fn spell(&self, w: &Word) -> String {
        let short = self.generators.iter().all(|g| g.chars().count() == 1);
        let parts: Vec<&str> = w
            .indices()
            .iter()
            .map(|&i| self.generators[i].as_str())
            .collect();
        if short {
            parts.concat()
        } else {
            parts.join(".")
        }
    }

    /// Reads a word spelled with generator names (see [`SemigroupSpec::spell`]).
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let short = self.generators.iter().all(|g| g.chars().count() == 1);
        let lookup = |t: &str| {
            self.generators.iter().position(|g| g == t).ok_or_else(|| {
                Error::InvalidInput(format!("unknown generator {t:?} in word {s:?}"))
            })
        };
        let v = if short {
            s.chars()
                .map(|c| lookup(&c.to_string()))
                .collect::<Result<Vec<_>>>()?
        } else {
            s.split('.').map(lookup).collect::<Result<Vec<_>>>()?
        };
        Word::new(v)
    }

    /// Left-to-right product of generator images.
    pub fn evaluate(&self, w: &Word, rep: usize) -> Result<RepElement> {
        let r = self.representation(rep)?;
        if let Some(&bad) = w.indices().iter().find(|&&i| i >= self.rank()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: self.rank(),
            });
        }
        let key = (w.indices().to_vec(), rep);
        if let Some(e) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(e.clone());
        }
        let mut acc = r.image(w.indices()[0]);
        for &i in &w.indices()[1..] {
            acc = acc.mul(&r.image(i))?;
        }
        let mut cache = self.cache.write().expect("cache lock");
        if cache.len() < CACHE_LIMIT {
            cache.insert(key, acc.clone());
        }
        Ok(acc)
    }

    /// Images of `w` in every representation.
    pub fn evaluate_all(&self, w: &Word) -> Result<Vec<RepElement>> {
        (0..self.reps.len()).map(|i| self.evaluate(w, i)).collect()
    }
}
