mod common;

use std::sync::OnceLock;

use common::*;
use nalgebra::{DMatrix, DVector};
use proxlab_core::ams::*;
use proxlab_core::boundary::{
    certify_r_eps_proximal_boundary, classify_isometry, displacement, IsometryKind,
};
use proxlab_core::gromov::{BoundaryPoint, Mobius, PlaneBoundary, SpaceIsometry, TreeRay};
use proxlab_core::projective::{
    certify_r_eps_proximal, proj_distance, proximal_data, ProjHyperplane, ProjPoint, SquareMatrix,
};
use proxlab_core::sampling::stream_rng;
use proxlab_core::{Error, Verdict};
use rand::Rng;

fn built(lineal: bool) -> &'static (SemigroupSpec, Construction) {
    static GENERAL: OnceLock<(SemigroupSpec, Construction)> = OnceLock::new();
    static LINEAL: OnceLock<(SemigroupSpec, Construction)> = OnceLock::new();
    let cell = if lineal { &LINEAL } else { &GENERAL };
    cell.get_or_init(|| {
        let spec = if lineal {
            ping_pong_lineal()
        } else {
            ping_pong()
        };
        let c = construct_ams_set(&spec, &AmsConfig::default(), 400, None, None).unwrap();
        (spec, c)
    })
}

fn w(v: &[usize]) -> Word {
    Word::new(v.to_vec()).unwrap()
}

fn matrix(e: &RepElement) -> &SquareMatrix {
    e.as_matrix().unwrap()
}

fn tree_only() -> SemigroupSpec {
    spec(vec![tree_rep("tree", 2, &["a", "b"])], 3)
}

fn tb(s: &str) -> RepPoint {
    RepPoint::Boundary(BoundaryPoint::Tree(s.parse().unwrap()))
}

#[test]
fn evaluation_matches_dense_products() {
    let s = ping_pong();
    let a = s.evaluate(&w(&[0]), 0).unwrap();
    assert_eq!(matrix(&a).to_rows(), vec![vec![1.0, 2.0], vec![0.0, 1.0]]);
    let ab = matrix(&s.evaluate(&w(&[0, 1]), 0).unwrap()).to_dmatrix();
    assert_eq!(ab, DMatrix::from_row_slice(2, 2, &[5.0, 2.0, 2.0, 1.0]));
    let tree = s.evaluate(&w(&[0, 1, 1, 0]), 2).unwrap();
    assert_eq!(tree.as_isometry().unwrap().to_string(), "abba");

    let mut rng = stream_rng(51, 8, 0);
    let gens = [
        DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]),
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 2.0, 1.0]),
    ];
    for _ in 0..100 {
        let len = rng.random_range(2..14);
        let word: Vec<usize> = (0..len).map(|_| rng.random_range(0..2)).collect();
        let cut = rng.random_range(1..len);
        let (u, v) = (w(&word[..cut]), w(&word[cut..]));
        let whole = s.evaluate(&w(&word), 0).unwrap();
        let split = s
            .evaluate(&u, 0)
            .unwrap()
            .mul(&s.evaluate(&v, 0).unwrap())
            .unwrap();
        assert!(matrix(&whole).relative_distance(matrix(&split)) < 1e-14);
        let dense = word
            .iter()
            .fold(DMatrix::identity(2, 2), |acc, &g| acc * &gens[g]);
        assert_eq!(matrix(&whole).to_dmatrix(), dense);
        let t = s.evaluate(&w(&word), 2).unwrap();
        let ts = s
            .evaluate(&u, 2)
            .unwrap()
            .mul(&s.evaluate(&v, 2).unwrap())
            .unwrap();
        assert_eq!(
            t.as_isometry().unwrap().to_string(),
            ts.as_isometry().unwrap().to_string()
        );
    }
    assert!(matches!(
        s.evaluate(&w(&[0, 5]), 0),
        Err(Error::IndexOutOfRange { .. })
    ));
    assert!(matches!(
        s.evaluate(&w(&[0]), 9),
        Err(Error::IndexOutOfRange { .. })
    ));
    assert_eq!(s.parse_word("abba").unwrap(), w(&[0, 1, 1, 0]));
    assert_eq!(s.spell(&w(&[1, 0])), "ba");
}

#[test]
fn semigroup_classes() {
    let s = spec(vec![tree_rep("t", 2, &["a", "b"])], 1);
    assert_eq!(
        classify_semigroup(&s, 0, 64).unwrap(),
        SemigroupClass::GeneralType
    );
    let s = spec(vec![tree_rep("t", 2, &["aa", "aaa"])], 1);
    match classify_semigroup(&s, 0, 64).unwrap() {
        SemigroupClass::Lineal { fix } => {
            let ends = [fix.0.to_string(), fix.1.to_string()];
            assert!(ends.contains(&"(a)".to_string()) && ends.contains(&"(A)".to_string()));
        }
        other => panic!("expected lineal, got {other}"),
    }
    let s = spec(vec![plane_rep("p", vec![Mobius::rotation(0.3)])], 1);
    assert_eq!(
        classify_semigroup(&s, 0, 64).unwrap(),
        SemigroupClass::Elliptic { heuristic: true }
    );
    let s = spec(vec![linear("l", vec![mat(&[&[2.0, 0.0], &[0.0, 1.0]])])], 1);
    assert!(classify_semigroup(&s, 0, 64).is_err());
}

fn swap_spec() -> SemigroupSpec {
    let e = 1f64.exp();
    let c = Mobius::new(0.0, -1.0, 1.0, 0.0).unwrap();
    spec(
        vec![plane_rep(
            "p",
            vec![Mobius::new(e, 0.0, 0.0, 1.0 / e).unwrap(), c],
        )],
        5,
    )
}

#[test]
fn lineal_reduction_and_parity() {
    let s = spec(vec![tree_rep("t", 2, &["aa", "aaa"])], 1);
    let s0 = lineal_fix_reduction(&s, 64).unwrap();
    assert_eq!(s0.len(), 1);
    assert_eq!(s0[0].word.len(), 1);
    assert_eq!(s0[0].parity, vec![false]);

    // The rotation by a quarter turn swaps 0 and ∞, the ends of diag(e, 1/e).
    let s = swap_spec();
    let s0 = lineal_fix_reduction(&s, 64).unwrap();
    assert_eq!(s0.len(), 2);
    let c = s0.iter().find(|r| r.parity == vec![true]).unwrap();
    let part = partition(&s, 64).unwrap();
    let map = ParityMap::new(&s, &part.lineal).unwrap();
    assert_eq!(map.generators, vec![vec![false], vec![true]]);
    let mut rng = stream_rng(52, 8, 0);
    for _ in 0..50 {
        let len = rng.random_range(1..10);
        let g = w(&(0..len).map(|_| rng.random_range(0..2)).collect::<Vec<_>>());
        // Parity over Z/2 counts the swapping letters.
        let odd = g.indices().iter().filter(|&&i| i == 1).count() % 2 == 1;
        assert_eq!(map.of(&g), vec![odd]);
        let fix = s0.iter().find(|r| r.parity == map.of(&g)).unwrap();
        assert_eq!(map.of(&g.concat(&fix.word)), vec![false]);
        if odd {
            assert_eq!(map.of(&g.concat(&c.word)), vec![false]);
        }
    }

    // Two lineal representations: at most four parity classes.
    let e = 1f64.exp();
    let d = Mobius::new(e, 0.0, 0.0, 1.0 / e).unwrap();
    let c = Mobius::new(0.0, -1.0, 1.0, 0.0).unwrap();
    let s = spec(
        vec![
            plane_rep("p", vec![d.clone(), c.clone(), d.clone()]),
            plane_rep("q", vec![d.clone(), d, c]),
        ],
        5,
    );
    let s0 = lineal_fix_reduction(&s, 64).unwrap();
    assert_eq!(s0.len(), 4);

    assert!(matches!(
        lineal_fix_reduction(&tree_only(), 64),
        Err(Error::NotLineal(_))
    ));
}

#[test]
fn transversal_examples() {
    let s = tree_only();
    let empty = TransversalityTask::new(vec![], vec![], 50);
    let t = find_transversal(&s, &empty).unwrap();
    assert_eq!(t.word.len(), 1);
    assert_eq!(t.margin, f64::INFINITY);

    let task = TransversalityTask::new(vec![vec![tb("(a)")]], vec![vec![tb("(a)")]], 200);
    let t = find_transversal(&s, &task).unwrap();
    assert_eq!(t.margin, 1.0);
    // b a^∞ and a^∞ share no prefix: Bourdon distance 2^0.
    let img = s.evaluate(&t.word, 0).unwrap();
    let moved = img
        .as_isometry()
        .unwrap()
        .act_boundary(&BoundaryPoint::Tree("(a)".parse().unwrap()))
        .unwrap();
    let BoundaryPoint::Tree(ray) = moved else {
        unreachable!()
    };
    assert_eq!(
        ray.common_prefix_len(&"(a)".parse::<TreeRay>().unwrap()),
        Some(0)
    );
    let b = task.margin(&s, &w(&[1])).unwrap();
    assert_eq!(b, 1.0);

    let s = spec(
        vec![linear(
            "l",
            vec![
                mat(&[&[1.0, 2.0], &[0.0, 1.0]]),
                mat(&[&[1.0, 0.0], &[2.0, 1.0]]),
            ],
        )],
        3,
    );
    let plus = RepPoint::Point(ProjPoint::from_slice(&[1.0, 0.0]).unwrap());
    let minus = RepPoint::Hyperplane(ProjHyperplane::from_slice(&[0.0, 1.0]).unwrap());
    let task = TransversalityTask::new(vec![vec![plus]], vec![vec![minus]], 200);
    let t = find_transversal(&s, &task).unwrap();
    assert!(t.margin > 0.1);
    // Recompute both transversality distances by hand.
    let g = matrix(&s.evaluate(&t.word, 0).unwrap()).to_dmatrix();
    let ge1 = g.column(0).normalize();
    let d1 = ge1[1].abs();
    let n = g.try_inverse().unwrap().transpose() * DVector::from_vec(vec![0.0, 1.0]);
    let d2 = (n[0] / n.norm()).abs();
    assert!((t.margin - d1.min(d2)).abs() < 1e-12);

    let rot = spec(vec![linear("r", vec![SquareMatrix::identity(2)])], 3);
    let p = RepPoint::Point(ProjPoint::from_slice(&[0.0, 1.0]).unwrap());
    let h = RepPoint::Hyperplane(ProjHyperplane::from_slice(&[1.0, 0.0]).unwrap());
    assert!(matches!(
        find_transversal(
            &rot,
            &TransversalityTask::new(vec![vec![p]], vec![vec![h]], 20)
        ),
        Err(Error::BudgetExhausted { .. })
    ));
}

#[test]
fn general_position_families() {
    let s = tree_only();
    let f = build_general_position_family(&s, &[vec![tb("(a)")]], &[vec![]], 1, 50).unwrap();
    assert_eq!(f.len(), 1);
    let f = build_general_position_family(&s, &[vec![tb("(a)")]], &[vec![]], 3, 200).unwrap();
    assert_eq!(f.len(), 3);
    let rays: Vec<String> = f
        .iter()
        .map(|b| {
            let g = s.evaluate(b, 0).unwrap();
            g.as_isometry()
                .unwrap()
                .act_boundary(&BoundaryPoint::Tree("(a)".parse().unwrap()))
                .unwrap()
                .to_string()
        })
        .collect();
    for i in 0..3 {
        for j in i + 1..3 {
            assert_ne!(rays[i], rays[j]);
        }
    }

    let s = spec(
        vec![linear(
            "l",
            vec![
                mat(&[&[1.0, 2.0], &[0.0, 1.0]]),
                mat(&[&[1.0, 0.0], &[2.0, 1.0]]),
            ],
        )],
        3,
    );
    let e1 = RepPoint::Point(ProjPoint::from_slice(&[1.0, 0.0]).unwrap());
    let f = build_general_position_family(&s, &[vec![e1]], &[vec![]], 4, 200).unwrap();
    assert_eq!(f.len(), 4);
    let cols: Vec<DVector<f64>> = f
        .iter()
        .map(|b| {
            matrix(&s.evaluate(b, 0).unwrap())
                .to_dmatrix()
                .column(0)
                .into_owned()
        })
        .collect();
    for i in 0..4 {
        for j in i + 1..4 {
            let det = cols[i][0] * cols[j][1] - cols[i][1] * cols[j][0];
            assert!(det.abs() > 1e-9 * cols[i].norm() * cols[j].norm());
        }
    }
}

#[test]
fn separation_radius_boundary_oracle() {
    let s = tree_only();
    let xp = vec![vec![tb("(a)")]];
    let xm = vec![vec![tb("(A)")]];
    let bound = pigeonhole_bound(&s, &xp, &xm, 1);
    assert_eq!(bound, 4);
    let f = build_general_position_family(&s, &xp, &xm, bound + 1, 400).unwrap();
    let r = separation_radius(&s, &f, &xp, &xm, 1).unwrap();
    let model = s.representations()[0].model().unwrap().clone();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for b in &f {
        let g = s.evaluate(b, 0).unwrap();
        let g = g.as_isometry().unwrap();
        plus.push(
            g.act_boundary(&BoundaryPoint::Tree("(a)".parse().unwrap()))
                .unwrap(),
        );
        minus.push(
            g.inverse()
                .act_boundary(&BoundaryPoint::Tree("(A)".parse().unwrap()))
                .unwrap(),
        );
    }
    let half_min = |pts: &[BoundaryPoint]| {
        let mut m = 1.0f64;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                m = m.min(
                    proxlab_core::gromov::bourdon_distance(&model, &pts[i], &pts[j]).unwrap() / 2.0,
                );
            }
        }
        m
    };
    let oracle = half_min(&plus).min(half_min(&minus));
    assert_eq!(r.r0, oracle);
    if oracle >= 0.25 {
        assert!(r.r0 >= 0.25);
    }
    assert!(matches!(
        separation_radius(&s, &f[..bound], &xp, &xm, 1),
        Err(Error::FamilyTooSmall { .. })
    ));
    assert!(matches!(
        separation_radius(&s, &f, &xp, &xm, 2),
        Err(Error::FamilyTooSmall { .. })
    ));
}

/// Unit vector of a projective point.
fn unit(v: &DVector<f64>) -> DVector<f64> {
    v / v.norm()
}

#[test]
fn separation_radius_survives_grid_adversaries_in_p1() {
    let s = spec(
        vec![linear(
            "l",
            vec![
                mat(&[&[1.0, 2.0], &[0.0, 1.0]]),
                mat(&[&[1.0, 0.0], &[2.0, 1.0]]),
            ],
        )],
        3,
    );
    let e1 = RepPoint::Point(ProjPoint::from_slice(&[1.0, 0.0]).unwrap());
    let xp = vec![vec![e1]];
    let f = build_general_position_family(&s, &xp, &[vec![]], 4, 200).unwrap();
    let r = separation_radius(&s, &f, &xp, &[vec![]], 1).unwrap();
    let pts: Vec<DVector<f64>> = f
        .iter()
        .map(|b| {
            unit(
                &matrix(&s.evaluate(b, 0).unwrap())
                    .to_dmatrix()
                    .column(0)
                    .into_owned(),
            )
        })
        .collect();
    // In P^1 a hyperplane is a point; no point is within r of two translates
    // when r = min sin(theta / 2) over pairs.
    let mut oracle = 1.0f64;
    for i in 0..4 {
        for j in i + 1..4 {
            let c = pts[i].dot(&pts[j]).abs().min(1.0);
            oracle = oracle.min((c.acos() / 2.0).sin());
        }
    }
    assert!((r.r0 - oracle).abs() < 1e-12, "{} vs {oracle}", r.r0);
    for k in 0..20_000 {
        let t = std::f64::consts::PI * k as f64 / 20_000.0;
        let normal = DVector::from_vec(vec![t.cos(), t.sin()]);
        let best = pts.iter().map(|p| p.dot(&normal).abs()).fold(0.0, f64::max);
        assert!(best >= r.r0 - 1e-12, "adversary at angle {t}");
    }
}

#[test]
fn separation_radius_survives_grid_adversaries_in_p2() {
    let s = spec(
        vec![linear(
            "l",
            vec![
                mat(&[&[2.0, 1.0, 0.0], &[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0]]),
                mat(&[&[1.0, 0.0, 1.0], &[1.0, 3.0, 0.0], &[0.0, 1.0, 1.0]]),
            ],
        )],
        9,
    );
    let e1 = RepPoint::Point(ProjPoint::from_slice(&[1.0, 0.0, 0.0]).unwrap());
    let xp = vec![vec![e1]];
    let size = pigeonhole_bound(&s, &xp, &[vec![]], 1) + 1;
    assert_eq!(size, 5);
    let f = build_general_position_family(&s, &xp, &[vec![]], size, 400).unwrap();
    let r = separation_radius(&s, &f, &xp, &[vec![]], 1).unwrap();
    assert!(r.r0 > 0.0);
    let pts: Vec<DVector<f64>> = f
        .iter()
        .map(|b| {
            unit(
                &matrix(&s.evaluate(b, 0).unwrap())
                    .to_dmatrix()
                    .column(0)
                    .into_owned(),
            )
        })
        .collect();
    // Fibonacci grid of hyperplane normals on the sphere.
    let n = 40_000;
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    for k in 0..n {
        let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
        let rho = (1.0 - z * z).sqrt();
        let normal = DVector::from_vec(vec![
            rho * (golden * k as f64).cos(),
            rho * (golden * k as f64).sin(),
            z,
        ]);
        let best = pts.iter().map(|p| p.dot(&normal).abs()).fold(0.0, f64::max);
        assert!(best >= r.r0 - 1e-12);
    }
}

#[test]
fn simultaneous_proximal_search() {
    let s = ping_pong();
    let g = find_simultaneous_proximal(&s, 200).unwrap();
    assert_eq!(g, w(&[0, 1]));
    // [[5,2],[2,1]] has eigenvalues 3 ± 2 sqrt 2 of distinct moduli.
    let m = matrix(&s.evaluate(&g, 0).unwrap()).clone();
    let f = proximal_data(&m, 1e-6).unwrap();
    let top = DVector::from_vec(vec![1.0, 2f64.sqrt() - 1.0]);
    assert!(proj_distance(&f.attractor, &ProjPoint::new(top).unwrap()) < 1e-12);
    for i in 1..3 {
        let rep = &s.representations()[i];
        let img = s.evaluate(&g, i).unwrap();
        assert_eq!(
            classify_isometry(rep.model().unwrap(), img.as_isometry().unwrap(), 8)
                .unwrap()
                .kind,
            IsometryKind::Hyperbolic
        );
    }

    let s = spec(vec![linear("d", vec![mat(&[&[2.0, 0.0], &[0.0, 1.0]])])], 1);
    assert_eq!(find_simultaneous_proximal(&s, 50).unwrap(), w(&[0]));
    let s = spec(vec![linear("r", vec![SquareMatrix::rotation(0.3)])], 1);
    match find_simultaneous_proximal(&s, 50) {
        Err(Error::BudgetExhausted { detail, .. }) => {
            assert!(detail.contains("no proximal element"))
        }
        other => panic!("expected exhaustion, got {other:?}"),
    }
}

#[test]
fn large_displacement_search() {
    let s = spec(
        vec![
            tree_rep("t2", 2, &["a", "b"]),
            tree_rep("t3", 3, &["ab", "c"]),
        ],
        4,
    );
    assert_eq!(find_large_displacement(&s, 0.0, 10).unwrap().len(), 1);
    let g = find_large_displacement(&s, 10.0, 2000).unwrap();
    assert!(g.len() >= 5);
    for i in 0..2 {
        let img = s.evaluate(&g, i).unwrap();
        let word = img.as_isometry().unwrap().to_string();
        // Images of positive words never cancel: the length is the sum.
        let expected: usize = g
            .indices()
            .iter()
            .map(|&k| {
                if i == 0 {
                    1
                } else if k == 0 {
                    2
                } else {
                    1
                }
            })
            .sum();
        assert_eq!(word.len(), expected);
        assert!(
            displacement(
                s.representations()[i].model().unwrap(),
                img.as_isometry().unwrap()
            )
            .unwrap()
                >= 10.0
        );
    }
    assert!(matches!(
        find_large_displacement(&s, 1e6, 10),
        Err(Error::BudgetExhausted { .. })
    ));
}

#[test]
fn ams_set_shapes() {
    let (_, c) = built(false);
    let f = c.set.family.len();
    assert!(c.set.lineal.is_empty());
    assert_eq!(c.set.exponents.len(), 1);
    assert_eq!(c.set.elements.len(), f * f);
    assert!(c.set.r <= c.radius.r0 / 3.0 && c.set.r <= c.set.r1 / 4.0);

    let (_, c) = built(true);
    let f = c.set.family.len();
    assert_eq!(c.set.lineal.len(), 1);
    let e = &c.set.exponents;
    assert_eq!(e.len(), 2);
    assert!(e[0] < e[1]);
    assert_eq!(c.set.elements.len(), 2 * f * f);
    let iv = &c.set.lineal[0].intervals;
    assert!(iv[0].1 < iv[1].0 || iv[1].1 < iv[0].0);
}

#[test]
fn ams_set_provenance() {
    for lineal in [false, true] {
        let (spec, c) = built(lineal);
        let set = &c.set;
        for (k, e) in set.elements.iter().enumerate() {
            assert_eq!(set.reconstruct(k), e.word);
            assert!(set.exponents.contains(&e.n));
            if k % 7 != 0 {
                continue;
            }
            let fresh = SemigroupSpec::clone(spec);
            for (i, img) in set.element_images(k).iter().enumerate() {
                let direct = fresh.evaluate(&e.word, i).unwrap();
                match (img, &direct) {
                    (RepElement::Linear(a), RepElement::Linear(b)) => assert!(
                        a.relative_distance(b) < 1e-9,
                        "lin {} {} {}",
                        a.relative_distance(b),
                        e.word.len(),
                        e.n
                    ),
                    (
                        RepElement::Boundary(SpaceIsometry::Tree(a)),
                        RepElement::Boundary(SpaceIsometry::Tree(b)),
                    ) => {
                        assert_eq!(a, b)
                    }
                    (
                        RepElement::Boundary(SpaceIsometry::Plane(a)),
                        RepElement::Boundary(SpaceIsometry::Plane(b)),
                    ) => {
                        assert!(
                            a.matrix().relative_distance(b.matrix()) < 1e-9,
                            "pl {} {}",
                            a.matrix().relative_distance(b.matrix()),
                            e.n
                        )
                    }
                    _ => panic!("mismatched images"),
                }
            }
        }
    }
}

#[test]
fn ams_set_preconditions() {
    let (spec, c) = built(false);
    let cfg = AmsConfig::default();
    let set = &c.set;
    assert!(matches!(
        build_ams_set(spec, &set.gamma0, &[], set.r, set.eps, &cfg),
        Err(Error::InvalidInput(_))
    ));
    assert!(build_ams_set(spec, &set.gamma0, &set.family, set.eps / 2.0, set.eps, &cfg).is_err());
    assert!(build_ams_set(spec, &set.gamma0, &set.family, 0.9, 0.1, &cfg).is_err());
}

fn recheck(spec: &SemigroupSpec, set: &AmsSet, product: &Word, res: usize) {
    for (i, rep) in spec.representations().iter().enumerate() {
        if set.partition.lineal_indices().contains(&i) {
            continue;
        }
        let img = spec.evaluate(product, i).unwrap();
        let cert = match (rep, &img) {
            (Representation::Linear { .. }, RepElement::Linear(g)) => {
                certify_r_eps_proximal(g, set.r, set.eps, res)
            }
            (Representation::Boundary { model, .. }, RepElement::Boundary(g)) => {
                certify_r_eps_proximal_boundary(model, g, set.r, set.eps, res)
            }
            _ => unreachable!(),
        }
        .unwrap();
        assert_eq!(cert.verdict, Verdict::Certified, "rep {i}: {cert:?}");
    }
}

#[test]
fn proximalize_powers_and_short_words() {
    let (spec, c) = built(false);
    let set = &c.set;
    let mut words = vec![
        set.gamma0.pow(3),
        set.gamma0.pow(20),
        w(&[0]),
        w(&[1]),
        w(&[1, 1, 0]),
    ];
    words.push(w(&[0, 0, 0, 1]));
    for g in &words {
        match proximalize(spec, g, set, 64).unwrap() {
            ProximalizeOutcome::Success(s) => {
                assert_eq!(s.s, set.elements[s.element].word);
                assert!(s
                    .certificates
                    .iter()
                    .all(|c| c.verdict == Verdict::Certified));
                recheck(spec, set, &g.concat(&s.s), 128);
            }
            ProximalizeOutcome::Failure(f) => panic!("{g:?}: {f:?}"),
        }
    }
}

#[test]
fn proximalize_adversarial_words() {
    // With c = b^{-1} the semigroup contains the identity (bc) and a
    // parabolic element (ac, trace -2), neither of which is proximal.
    let spec = spec(
        vec![linear(
            "l",
            vec![
                mat(&[&[1.0, 2.0], &[0.0, 1.0]]),
                mat(&[&[1.0, 0.0], &[2.0, 1.0]]),
                mat(&[&[1.0, 0.0], &[-2.0, 1.0]]),
            ],
        )],
        11,
    );
    let set = construct_ams_set(&spec, &AmsConfig::default(), 400, None, None)
        .unwrap()
        .set;
    let identity = w(&[1, 2]);
    assert_eq!(
        matrix(&spec.evaluate(&identity, 0).unwrap()).to_rows(),
        vec![vec![1.0, 0.0], vec![0.0, 1.0]]
    );
    let parabolic = w(&[0, 2]);
    assert_eq!(
        matrix(&spec.evaluate(&parabolic, 0).unwrap()).to_rows(),
        vec![vec![-3.0, 2.0], vec![-2.0, 1.0]]
    );
    for g in [identity, parabolic, w(&[0, 2]).pow(5)] {
        match certify_r_eps_proximal(matrix(&spec.evaluate(&g, 0).unwrap()), set.r, set.eps, 64) {
            Ok(c) => assert_ne!(c.verdict, Verdict::Certified),
            Err(e) => assert!(matches!(e, Error::NotProximal { .. }), "{e:?}"),
        }
        match proximalize(&spec, &g, &set, 64).unwrap() {
            ProximalizeOutcome::Success(s) => recheck(&spec, &set, &g.concat(&s.s), 128),
            ProximalizeOutcome::Failure(f) => panic!("{g:?}: {f:?}"),
        }
    }
}

#[test]
fn proximalize_lineal_words() {
    let (spec, c) = built(true);
    let set = &c.set;
    let mut rng = stream_rng(54, 8, 0);
    for _ in 0..10 {
        let len = rng.random_range(1..=12);
        let g = w(&(0..len).map(|_| rng.random_range(0..2)).collect::<Vec<_>>());
        let out = proximalize(spec, &g, set, 64).unwrap();
        let ProximalizeOutcome::Success(s) = out else {
            panic!("{g:?}")
        };
        let prod = g.concat(&s.s);
        recheck(spec, set, &prod, 128);
        let tree = spec.representations()[2].model().unwrap();
        let img = spec.evaluate(&prod, 2).unwrap();
        let cert =
            certify_r_eps_proximal_boundary(tree, img.as_isometry().unwrap(), set.r, set.eps, 128)
                .unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
    }
}

#[test]
fn empty_set_gives_no_success() {
    let (spec, c) = built(false);
    let mut empty = c.set.clone();
    empty.elements.clear();
    let out = proximalize(spec, &w(&[0, 1]), &empty, 64).unwrap();
    assert!(!out.is_success());
    assert_eq!(out.label(), "failure");
    let rep = verify_main_corollary(spec, &empty, &[w(&[0]), w(&[1, 0])], 64, 64).unwrap();
    assert_eq!(rep.summary.samples, 2);
    assert_eq!(rep.summary.successes, 0);
    assert_eq!(rep.summary.success_rate, 0.0);
    assert!(rep.summary.max_spectral.is_finite() && rep.summary.mean_spectral.is_finite());
}

#[test]
fn members_of_s_meet_their_budgets() {
    let (spec, c) = built(false);
    let set = &c.set;
    let samples: Vec<Word> = set
        .elements
        .iter()
        .step_by(17)
        .map(|e| e.word.clone())
        .collect();
    let rep = verify_main_corollary(spec, set, &samples, 64, 64).unwrap();
    assert_eq!(rep.summary.successes, samples.len());
    assert_eq!(rep.summary.budget_violations, 0);
    for row in &rep.rows {
        assert!(row.deltas.iter().all(|d| d.within_budget()), "{row:?}");
        assert_eq!(row.recheck, Some(true));
    }
}

#[test]
fn corollary_budgets_recomputed() {
    let (spec, c) = built(false);
    let set = &c.set;
    let mut rng = stream_rng(55, 8, 0);
    let samples: Vec<Word> = (0..12)
        .map(|_| {
            let len = rng.random_range(1..=12);
            w(&(0..len).map(|_| rng.random_range(0..2)).collect::<Vec<_>>())
        })
        .collect();
    let rep = verify_main_corollary(spec, set, &samples, 64, 64).unwrap();
    for row in &rep.rows {
        let ProximalizeOutcome::Success(s) = &row.outcome else {
            continue;
        };
        for d in &row.deltas {
            match d.kind {
                DeltaKind::Spectral => {
                    let gs =
                        matrix(&spec.evaluate(&row.gamma.concat(&s.s), d.rep).unwrap()).clone();
                    let g = matrix(&spec.evaluate(&row.gamma, d.rep).unwrap()).clone();
                    let sm = matrix(&spec.evaluate(&s.s, d.rep).unwrap()).clone();
                    let lam = proxlab_core::projective::jordan_projection(&gs)
                        .unwrap()
                        .values;
                    let mu = proxlab_core::projective::cartan_projection(&g)
                        .unwrap()
                        .values;
                    let mus = proxlab_core::projective::cartan_projection(&sm)
                        .unwrap()
                        .values;
                    let delta = lam
                        .iter()
                        .zip(&mu)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    let budget = mus.iter().map(|x| x.abs()).fold(0.0, f64::max)
                        + (2.0 * set.r * set.r).ln().abs();
                    assert!((delta - d.delta).abs() < 1e-9 * delta.max(1.0));
                    assert!((budget - d.budget).abs() < 1e-9 * budget);
                    assert!(delta <= budget + 1e-6);
                }
                DeltaKind::Length => {
                    let model = spec.representations()[d.rep].model().unwrap();
                    let gs = spec.evaluate(&row.gamma.concat(&s.s), d.rep).unwrap();
                    let g = spec.evaluate(&row.gamma, d.rep).unwrap();
                    let stable = proxlab_core::boundary::translation_length(
                        model,
                        gs.as_isometry().unwrap(),
                    )
                    .unwrap();
                    let disp = displacement(model, g.as_isometry().unwrap()).unwrap();
                    assert!(((stable - disp).abs() - d.delta).abs() < 1e-9 * d.delta.max(1.0));
                    assert!(d.within_budget());
                }
            }
        }
    }
    assert_eq!(rep.summary.budget_violations, 0);
}

#[test]
fn plane_boundary_points_in_sets() {
    let (_, c) = built(false);
    for (p, m) in &c.set.fixed {
        if let (
            RepPoint::Boundary(BoundaryPoint::Plane(a)),
            RepPoint::Boundary(BoundaryPoint::Plane(b)),
        ) = (p, m)
        {
            assert_ne!(a, b);
            assert!(!matches!(
                (a, b),
                (PlaneBoundary::Infinity, PlaneBoundary::Infinity)
            ));
        }
    }
}
