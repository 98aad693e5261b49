//! Random points, boundary points and isometries of the model spaces.

use rand::Rng;

use super::model::{BoundaryPoint, ModelKind, SpaceIsometry, SpaceModel, SpacePoint};
use super::plane::{Mobius, PlaneBoundary, PlanePoint};
use super::word::{FreeWord, Letter, TreeRay};

fn random_letter<R: Rng>(rng: &mut R, rank: usize, avoid: Option<Letter>) -> Letter {
    loop {
        let l = Letter::new(rng.random_range(0..rank), rng.random_bool(0.5));
        if Some(l) != avoid {
            return l;
        }
    }
}

/// Uniform reduced word of exactly `len` letters.
pub fn random_word_of_len<R: Rng>(rng: &mut R, rank: usize, len: usize) -> FreeWord {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    for _ in 0..len {
        let avoid = letters.last().map(|l| l.inverse());
        letters.push(random_letter(rng, rank, avoid));
    }
    FreeWord::from_letters(letters)
}

/// Reduced word of uniformly random length in `0..=max_len`.
pub fn random_word<R: Rng>(rng: &mut R, rank: usize, max_len: usize) -> FreeWord {
    let len = rng.random_range(0..=max_len);
    random_word_of_len(rng, rank, len)
}

/// Eventually periodic ray with prefix length `<= max_prefix` and period
/// length in `1..=max_period`.
pub fn random_ray<R: Rng>(
    rng: &mut R,
    rank: usize,
    max_prefix: usize,
    max_period: usize,
) -> TreeRay {
    let prefix = random_word(rng, rank, max_prefix);
    let len = rng.random_range(1..=max_period);
    let period = random_word_of_len(rng, rank, len);
    TreeRay::new(prefix, period).expect("nonempty period")
}

/// Point in the box `|x| <= 10`, `y` log-uniform in `[0.1, 10]`.
pub fn random_plane_point<R: Rng>(rng: &mut R) -> PlanePoint {
    let x = rng.random_range(-10.0..=10.0);
    let y = 10f64.powf(rng.random_range(-1.0..=1.0));
    PlanePoint { x, y }
}

/// Boundary point uniform for the visual measure at `i`.
pub fn random_plane_boundary<R: Rng>(rng: &mut R) -> PlaneBoundary {
    let t: f64 = rng.random_range(0.0..1.0);
    if t == 0.0 {
        return PlaneBoundary::Infinity;
    }
    PlaneBoundary::Finite((std::f64::consts::PI * (t - 0.5)).tan())
}

/// `k_1 diag(e^{t/2}, e^{-t/2}) k_2` with random rotations and `t` uniform
/// in `[0, max_t]`.
pub fn random_mobius<R: Rng>(rng: &mut R, max_t: f64) -> Mobius {
    let t = rng.random_range(0.0..=max_t);
    let k1 = Mobius::rotation(rng.random_range(0.0..std::f64::consts::PI));
    let k2 = Mobius::rotation(rng.random_range(0.0..std::f64::consts::PI));
    k1.mul(&Mobius::translation(t)).mul(&k2)
}

pub fn random_point<R: Rng>(model: &SpaceModel, rng: &mut R) -> SpacePoint {
    match model.kind {
        ModelKind::Tree { rank } => SpacePoint::Tree(random_word(rng, rank, 8)),
        ModelKind::Plane => SpacePoint::Plane(random_plane_point(rng)),
    }
}

pub fn random_boundary<R: Rng>(model: &SpaceModel, rng: &mut R) -> BoundaryPoint {
    match model.kind {
        ModelKind::Tree { rank } => BoundaryPoint::Tree(random_ray(rng, rank, 6, 4)),
        ModelKind::Plane => BoundaryPoint::Plane(random_plane_boundary(rng)),
    }
}

pub fn random_isometry<R: Rng>(model: &SpaceModel, rng: &mut R) -> SpaceIsometry {
    match model.kind {
        ModelKind::Tree { rank } => SpaceIsometry::Tree(random_word(rng, rank, 8)),
        ModelKind::Plane => SpaceIsometry::Plane(random_mobius(rng, 4.0)),
    }
}
