use std::f64::consts::E;

use proxlab_core::gromov::sample::{random_boundary, random_point, random_word};
use proxlab_core::gromov::*;
use proxlab_core::sampling::stream_rng;
use proxlab_core::Error;

fn tree() -> SpaceModel {
    SpaceModel::tree(2, 2.0).unwrap()
}

fn tp(s: &str) -> SpacePoint {
    SpacePoint::Tree(s.parse().unwrap())
}

fn tb(s: &str) -> BoundaryPoint {
    BoundaryPoint::Tree(s.parse().unwrap())
}

fn pp(x: f64, y: f64) -> SpacePoint {
    SpacePoint::Plane(PlanePoint::new(x, y).unwrap())
}

fn pb(t: f64) -> BoundaryPoint {
    BoundaryPoint::Plane(PlaneBoundary::finite(t).unwrap())
}

/// Free reduction on strings, inverse letters in upper case.
fn reduce(s: &str) -> String {
    let mut out: Vec<char> = Vec::new();
    for c in s.chars() {
        let inv = if c.is_ascii_lowercase() {
            c.to_ascii_uppercase()
        } else {
            c.to_ascii_lowercase()
        };
        if out.last() == Some(&inv) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    out.into_iter().collect()
}

fn inverse(s: &str) -> String {
    s.chars()
        .rev()
        .map(|c| {
            if c.is_ascii_lowercase() {
                c.to_ascii_uppercase()
            } else {
                c.to_ascii_lowercase()
            }
        })
        .collect()
}

fn word_distance(u: &str, v: &str) -> usize {
    reduce(&(inverse(u) + v)).len()
}

fn hyperbolic(x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
    (1.0 + ((x1 - x2).powi(2) + (y1 - y2).powi(2)) / (2.0 * y1 * y2)).acosh()
}

#[test]
fn distance_examples() {
    let t = tree();
    assert_eq!(distance(&t, &tp("1"), &tp("ab")).unwrap(), 2.0);
    assert_eq!(
        distance(&SpaceModel::tree(3, 2.0).unwrap(), &tp("ab"), &tp("ac")).unwrap(),
        2.0
    );
    let p = SpaceModel::plane();
    let d = distance(&p, &pp(0.0, 1.0), &pp(0.0, E)).unwrap();
    assert!((d - 1.0).abs() < 1e-15);
    assert!(((1.0 + (E - 1.0).powi(2) / (2.0 * E)).acosh() - 1.0).abs() < 1e-15);
    assert!(matches!(
        distance(&t, &tp("a"), &pp(0.0, 1.0)),
        Err(Error::ModelMismatch(_))
    ));
}

#[test]
fn distance_matches_string_oracle() {
    let t = tree();
    let mut rng = stream_rng(21, 8, 0);
    for _ in 0..2000 {
        let u = random_word(&mut rng, 2, 10).to_string();
        let v = random_word(&mut rng, 2, 10).to_string();
        let u = if u == "1" { String::new() } else { u };
        let v = if v == "1" { String::new() } else { v };
        let d = distance(&t, &tp(&u), &tp(&v)).unwrap();
        assert_eq!(d, word_distance(&u, &v) as f64, "{u} {v}");
    }
    let p = SpaceModel::plane();
    for _ in 0..2000 {
        let (a, b) = (random_point(&p, &mut rng), random_point(&p, &mut rng));
        let (SpacePoint::Plane(z), SpacePoint::Plane(w)) = (&a, &b) else {
            unreachable!()
        };
        let oracle = hyperbolic(z.x, z.y, w.x, w.y);
        assert!((distance(&p, &a, &b).unwrap() - oracle).abs() <= 1e-9 * oracle.max(1.0));
    }
}

#[test]
fn gromov_product_examples() {
    let t = tree();
    let (m, q) = (tp("ab"), tp("Ba"));
    assert_eq!(
        gromov_product(&t, &m, &m, &q).unwrap(),
        distance(&t, &m, &q).unwrap()
    );
    assert_eq!(gromov_product(&t, &m, &q, &m).unwrap(), 0.0);
    let t3 = SpaceModel::tree(3, 2.0).unwrap();
    assert_eq!(
        gromov_product(&t3, &tp("ab"), &tp("ac"), &tp("1")).unwrap(),
        1.0
    );
    let p = SpaceModel::plane();
    let (x, y) = (pp(1.0, 2.0), pp(-3.0, 0.5));
    assert!(
        (gromov_product(&p, &x, &x, &y).unwrap() - distance(&p, &x, &y).unwrap()).abs() < 1e-12
    );
    assert!(gromov_product(&p, &x, &y, &x).unwrap().abs() < 1e-12);
}

#[test]
fn boundary_product_examples() {
    let t = tree();
    assert_eq!(
        gromov_product_boundary(&t, &tb("(a)"), &tb("a(b)"), &tp("1")).unwrap(),
        1.0
    );
    assert_eq!(
        gromov_product_boundary(&t, &tb("(a)"), &tb("(a)"), &tp("1")).unwrap(),
        f64::INFINITY
    );
    let p = SpaceModel::plane();
    let v = gromov_product_boundary(&p, &pb(1.0), &pb(-1.0), &pp(0.0, 1.0)).unwrap();
    assert!(v.abs() < 1e-15);
    assert!(
        distance_to_geodesic(
            &PlanePoint::i(),
            &PlaneBoundary::Finite(1.0),
            &PlaneBoundary::Finite(-1.0)
        )
        .abs()
            < 1e-12
    );

    // Closed form at i for finite points.
    let closed =
        |x: f64, y: f64| -((x - y).abs() / ((1.0 + x * x).sqrt() * (1.0 + y * y).sqrt())).ln();
    let mut rng = stream_rng(22, 8, 0);
    for _ in 0..500 {
        let (a, b) = (random_boundary(&p, &mut rng), random_boundary(&p, &mut rng));
        let (
            BoundaryPoint::Plane(PlaneBoundary::Finite(x)),
            BoundaryPoint::Plane(PlaneBoundary::Finite(y)),
        ) = (&a, &b)
        else {
            continue;
        };
        let v = gromov_product_boundary(&p, &a, &b, &pp(0.0, 1.0)).unwrap();
        assert!((v - closed(*x, *y)).abs() < 1e-9 * closed(*x, *y).abs().max(1.0));
    }
}

#[test]
fn boundary_product_is_limit_of_interior_products() {
    let t = tree();
    let mut rng = stream_rng(23, 8, 0);
    for _ in 0..500 {
        let (BoundaryPoint::Tree(x), BoundaryPoint::Tree(y)) =
            (random_boundary(&t, &mut rng), random_boundary(&t, &mut rng))
        else {
            unreachable!()
        };
        let SpacePoint::Tree(q) = random_point(&t, &mut rng) else {
            unreachable!()
        };
        let exact = tree_product_boundary(&x, &y, &q);
        let n = 60;
        let inner = tree_product(&x.truncate(n), &y.truncate(n), &q);
        match exact {
            Some(k) => assert_eq!(k, inner),
            None => assert!(inner >= n - q.len()),
        }
    }
}

#[test]
fn gromov_inequality_holds() {
    let t = tree();
    let mut rng = stream_rng(24, 8, 0);
    for _ in 0..10_000 {
        let pts: Vec<SpacePoint> = (0..4).map(|_| random_point(&t, &mut rng)).collect();
        assert!(gromov_inequality_check(&t, &pts[0], &pts[1], &pts[2], &pts[3]).unwrap() >= 0.0);
    }
    let p = SpaceModel::plane();
    for _ in 0..10_000 {
        let pts: Vec<SpacePoint> = (0..4).map(|_| random_point(&p, &mut rng)).collect();
        assert!(gromov_inequality_check(&p, &pts[0], &pts[1], &pts[2], &pts[3]).unwrap() >= -1e-9);
    }
    let x = pp(0.3, 0.7);
    assert_eq!(
        gromov_inequality_check(&p, &x, &x, &x, &pp(1.0, 1.0)).unwrap(),
        p.delta
    );
}

#[test]
fn delta_estimates() {
    let t = tree();
    let mut rng = stream_rng(25, 8, 0);
    let pts: Vec<SpacePoint> = (0..60).map(|_| random_point(&t, &mut rng)).collect();
    assert_eq!(estimate_delta(&t, &pts).unwrap(), 0.0);

    let p = SpaceModel::plane();
    let a: Vec<SpacePoint> = (0..80).map(|_| random_point(&p, &mut rng)).collect();
    let b: Vec<SpacePoint> = (0..80).map(|_| random_point(&p, &mut rng)).collect();
    let (da, db) = (
        estimate_delta(&p, &a).unwrap(),
        estimate_delta(&p, &b).unwrap(),
    );
    assert!(da > 0.0 && da < 0.7 && db > 0.0 && db < 0.7);
    assert!(da <= p.delta && db <= p.delta);

    let line: Vec<SpacePoint> = (0..10).map(|k| pp(0.0, 2f64.powi(k - 5))).collect();
    assert!(estimate_delta(&p, &line).unwrap() < 1e-9);
    assert!(matches!(
        estimate_delta(&p, &line[..3]),
        Err(Error::TooFewPoints { .. })
    ));
}

#[test]
fn bourdon_examples() {
    let t = tree();
    assert_eq!(bourdon_distance(&t, &tb("(a)"), &tb("(a)")).unwrap(), 0.0);
    assert_eq!(bourdon_distance(&t, &tb("(a)"), &tb("(b)")).unwrap(), 1.0);
    let t3 = SpaceModel::tree(3, 2.0).unwrap();
    assert_eq!(
        bourdon_distance(&t3, &tb("a(b)"), &tb("a(c)")).unwrap(),
        0.5
    );
}

#[test]
fn bourdon_sandwich_and_ultrametric() {
    let mut rng = stream_rng(26, 8, 0);
    for model in [tree(), SpaceModel::plane()] {
        let o = model.basepoint();
        let pts: Vec<BoundaryPoint> = (0..60).map(|_| random_boundary(&model, &mut rng)).collect();
        for x in &pts {
            for y in &pts {
                let d = bourdon_distance(&model, x, y).unwrap();
                let prod = gromov_product_boundary(&model, x, y, &o).unwrap();
                let upper = model.a.powf(-prod);
                assert!(0.25 * upper <= d + 1e-12 && d <= upper * (1.0 + 1e-9) + 1e-15);
                if model.is_tree() {
                    for z in pts.iter().take(20) {
                        let dz = bourdon_distance(&model, x, z).unwrap();
                        let dyz = bourdon_distance(&model, y, z).unwrap();
                        assert!(dz <= d.max(dyz));
                    }
                }
            }
        }
    }
}

#[test]
fn busemann_examples() {
    let t = tree();
    assert_eq!(busemann(&t, &tb("(a)"), &tp("ab"), &tp("ab")).unwrap(), 0.0);
    for n in 1..8 {
        let z = SpacePoint::Tree("a".parse::<FreeWord>().unwrap().pow(n));
        assert_eq!(busemann(&t, &tb("(a)"), &tp("1"), &z).unwrap(), n as f64);
    }
    let p = SpaceModel::plane();
    let inf = BoundaryPoint::Plane(PlaneBoundary::Infinity);
    for t in [-2.0, 0.5, 3.0] {
        let v = busemann(&p, &inf, &pp(0.0, 1.0), &pp(0.0, f64::exp(t))).unwrap();
        assert!((v - t).abs() < 1e-12);
    }
}

#[test]
fn busemann_cocycle_and_antisymmetry() {
    let mut rng = stream_rng(27, 8, 0);
    for model in [tree(), SpaceModel::plane()] {
        let tol = if model.is_tree() { 0.0 } else { 2e-9 };
        for _ in 0..2000 {
            let x = random_boundary(&model, &mut rng);
            let (y, z, w) = (
                random_point(&model, &mut rng),
                random_point(&model, &mut rng),
                random_point(&model, &mut rng),
            );
            let yz = busemann(&model, &x, &y, &z).unwrap();
            let zy = busemann(&model, &x, &z, &y).unwrap();
            let zw = busemann(&model, &x, &z, &w).unwrap();
            let yw = busemann(&model, &x, &y, &w).unwrap();
            assert!((yz + zy).abs() <= tol * yz.abs().max(1.0));
            assert!((yz + zw - yw).abs() <= tol * yw.abs().max(1.0) + tol);
        }
    }
}

#[test]
fn identity_constant() {
    let mut rng = stream_rng(28, 8, 0);
    let t = tree();
    let samples: Vec<(SpacePoint, BoundaryPoint)> = (0..1000)
        .map(|_| (random_point(&t, &mut rng), random_boundary(&t, &mut rng)))
        .collect();
    assert_eq!(dist_gromov_identity_constant(&t, &samples).unwrap(), 0.0);

    let p = SpaceModel::plane();
    let a: Vec<(SpacePoint, BoundaryPoint)> = (0..1000)
        .map(|_| (random_point(&p, &mut rng), random_boundary(&p, &mut rng)))
        .collect();
    let b: Vec<(SpacePoint, BoundaryPoint)> = (0..1000)
        .map(|_| (random_point(&p, &mut rng), random_boundary(&p, &mut rng)))
        .collect();
    let (ca, cb) = (
        dist_gromov_identity_constant(&p, &a).unwrap(),
        dist_gromov_identity_constant(&p, &b).unwrap(),
    );
    assert!(ca.is_finite() && cb.is_finite());
    assert!(ca <= p.identity_c + 1e-9 && cb <= p.identity_c + 1e-9);

    let at_o = vec![(p.basepoint(), pb(0.7))];
    assert!(dist_gromov_identity_constant(&p, &at_o).unwrap().abs() < 1e-12);
    assert!(matches!(
        dist_gromov_identity_constant(&p, &[]),
        Err(Error::TooFewPoints { .. })
    ));
}

#[test]
fn isometry_invariance() {
    let mut rng = stream_rng(29, 8, 0);
    for model in [tree(), SpaceModel::plane()] {
        for _ in 0..1000 {
            let g = sample::random_isometry(&model, &mut rng);
            let pts: Vec<SpacePoint> = (0..3).map(|_| random_point(&model, &mut rng)).collect();
            let moved: Vec<SpacePoint> = pts.iter().map(|p| g.act_point(p).unwrap()).collect();
            let before = gromov_product(&model, &pts[0], &pts[1], &pts[2]).unwrap();
            let after = gromov_product(&model, &moved[0], &moved[1], &moved[2]).unwrap();
            if model.is_tree() {
                assert_eq!(before, after);
            } else {
                assert!((before - after).abs() <= 1e-9 * before.abs().max(1.0) * 10.0);
            }
        }
    }
}
