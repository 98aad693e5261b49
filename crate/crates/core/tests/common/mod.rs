#![allow(dead_code)]

use proxlab_core::ams::{Representation, SemigroupSpec};
use proxlab_core::gromov::{Mobius, SpaceIsometry, SpaceModel};
use proxlab_core::projective::SquareMatrix;

pub fn mat(rows: &[&[f64]]) -> SquareMatrix {
    SquareMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

pub fn linear(name: &str, images: Vec<SquareMatrix>) -> Representation {
    Representation::Linear {
        name: name.into(),
        images,
    }
}

pub fn tree_rep(name: &str, rank: usize, words: &[&str]) -> Representation {
    Representation::Boundary {
        name: name.into(),
        model: SpaceModel::tree(rank, 2.0).unwrap(),
        images: words
            .iter()
            .map(|w| SpaceIsometry::Tree(w.parse().unwrap()))
            .collect(),
    }
}

pub fn plane_rep(name: &str, images: Vec<Mobius>) -> Representation {
    Representation::Boundary {
        name: name.into(),
        model: SpaceModel::plane(),
        images: images.into_iter().map(SpaceIsometry::Plane).collect(),
    }
}

fn names(k: usize) -> Vec<String> {
    ["a", "b", "c", "d"][..k]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

pub fn spec(reps: Vec<Representation>, seed: u64) -> SemigroupSpec {
    let k = match &reps[0] {
        Representation::Linear { images, .. } => images.len(),
        Representation::Boundary { images, .. } => images.len(),
    };
    SemigroupSpec::new(names(k), reps, seed).unwrap()
}

/// The two unipotent ping-pong generators acting linearly, on the plane
/// and on the tree of `F_2`.
pub fn ping_pong() -> SemigroupSpec {
    spec(
        vec![
            linear(
                "linear",
                vec![
                    mat(&[&[1.0, 2.0], &[0.0, 1.0]]),
                    mat(&[&[1.0, 0.0], &[2.0, 1.0]]),
                ],
            ),
            plane_rep(
                "plane",
                vec![
                    Mobius::new(1.0, 2.0, 0.0, 1.0).unwrap(),
                    Mobius::new(1.0, 0.0, 2.0, 1.0).unwrap(),
                ],
            ),
            tree_rep("tree", 2, &["a", "b"]),
        ],
        7,
    )
}

/// As `ping_pong`, with a tree on which the semigroup is lineal.
pub fn ping_pong_lineal() -> SemigroupSpec {
    spec(
        vec![
            linear(
                "linear",
                vec![
                    mat(&[&[1.0, 2.0], &[0.0, 1.0]]),
                    mat(&[&[1.0, 0.0], &[2.0, 1.0]]),
                ],
            ),
            plane_rep(
                "plane",
                vec![
                    Mobius::new(1.0, 2.0, 0.0, 1.0).unwrap(),
                    Mobius::new(1.0, 0.0, 2.0, 1.0).unwrap(),
                ],
            ),
            tree_rep("tree", 2, &["aa", "aaa"]),
        ],
        7,
    )
}
