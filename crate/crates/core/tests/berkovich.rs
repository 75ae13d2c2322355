use std::collections::BTreeSet;

use rand::Rng;
use skeletron::berkovich::{build_skeleton_tree, join, path_distance, P1Point, SkeletonTree, Type2Point};
use skeletron::generate::{self, rng_from_seed};
use skeletron::oracle::recentered_eval;
use skeletron::rational::{int, rat};
use skeletron::slope::random_skeleton_point;
use skeletron::valued_field::ValQ;

fn random_type2<R: Rng>(rng: &mut R) -> Type2Point {
    Type2Point::new(generate::random_element(rng), generate::rational(rng, -3, 5, 4))
}

fn random_tree<R: Rng>(rng: &mut R) -> SkeletonTree {
    let k = rng.random_range(2..=5);
    let mut set = BTreeSet::new();
    while set.len() < k {
        set.insert(P1Point::Finite(generate::root(rng)));
    }
    if rng.random_bool(0.5) {
        set.insert(P1Point::Infinity);
    }
    build_skeleton_tree(&set.into_iter().collect::<Vec<_>>(), &[]).unwrap()
}

#[test]
fn path_distance_is_a_metric_on_type2_points() {
    let mut rng = rng_from_seed(17);
    for _ in 0..2000 {
        let x = P1Point::Type2(random_type2(&mut rng));
        let y = P1Point::Type2(random_type2(&mut rng));
        let z = P1Point::Type2(random_type2(&mut rng));
        let dxy = path_distance(&x, &y);
        assert_eq!(dxy, path_distance(&y, &x));
        assert_eq!(dxy == ValQ::Finite(int(0)), x == y);
        assert!(path_distance(&x, &z) <= dxy.clone() + path_distance(&y, &z));
        // the join lies on the geodesic
        let j = join(&x, &y).unwrap();
        assert_eq!(path_distance(&x, &j) + path_distance(&j, &y), dxy);
    }
}

#[test]
fn distances_to_type1_points_are_infinite() {
    let x = P1Point::gauss();
    let a = P1Point::Finite("t".parse().unwrap());
    assert_eq!(path_distance(&x, &a), ValQ::Infinity);
    assert_eq!(path_distance(&a, &a), ValQ::Finite(int(0)));
}

#[test]
fn retraction_is_idempotent_and_lands_on_the_tree() {
    let mut rng = rng_from_seed(23);
    for _ in 0..100 {
        let tree = random_tree(&mut rng);
        for _ in 0..20 {
            let x = P1Point::Type2(random_type2(&mut rng));
            let r = tree.retract(&x);
            assert_eq!(tree.retract(&r), r);
            assert!(tree.contains(r.as_type2().unwrap()));
        }
    }
}

#[test]
fn retraction_is_the_closest_skeleton_point() {
    let mut rng = rng_from_seed(29);
    for _ in 0..60 {
        let tree = random_tree(&mut rng);
        let mut grid = Vec::new();
        for (i, e) in tree.graph().edges().iter().enumerate() {
            for k in 0..=12 {
                grid.push(tree.point_on_edge(i, &(&e.length * rat(k, 12))).unwrap());
            }
        }
        for r in tree.graph().rays() {
            for k in 0..=40 {
                grid.push(tree.point_on_ray(&r.mark, &rat(k, 4)).unwrap());
            }
        }
        for _ in 0..10 {
            let x = P1Point::Type2(random_type2(&mut rng));
            let r = tree.retract(&x);
            let best = path_distance(&x, &r);
            for g in &grid {
                let d = path_distance(&x, &P1Point::Type2(g.clone()));
                assert!(best <= d, "{x}: retraction {r} at {best}, grid point {g} at {d}");
            }
        }
    }
}

#[test]
fn skeleton_points_retract_to_themselves() {
    let mut rng = rng_from_seed(31);
    for _ in 0..100 {
        let tree = random_tree(&mut rng);
        for _ in 0..10 {
            let p = P1Point::Type2(random_skeleton_point(&mut rng, &tree));
            assert_eq!(tree.retract(&p), p);
        }
    }
}

#[test]
fn tree_edge_lengths_match_path_distance() {
    let mut rng = rng_from_seed(37);
    for _ in 0..100 {
        let tree = random_tree(&mut rng);
        for e in tree.graph().edges() {
            let u = P1Point::Type2(tree.placement()[&e.u].clone());
            let v = P1Point::Type2(tree.placement()[&e.v].clone());
            assert_eq!(path_distance(&u, &v), ValQ::Finite(e.length.clone()));
        }
        assert_eq!(tree.graph().betti1(), 0);
    }
}

#[test]
fn oracle_agrees_on_a_thousand_pairs() {
    let mut rng = rng_from_seed(41);
    for _ in 0..1000 {
        let f = generate::rational_function(&mut rng, 6);
        let x = generate::type2_near(&mut rng, &f);
        assert_eq!(f.eval_val_at(&x), recentered_eval(&f, &x), "{f} at {x}");
    }
}

#[test]
fn tree_json_round_trip() {
    let mut rng = rng_from_seed(43);
    for _ in 0..50 {
        let tree = random_tree(&mut rng);
        let js = serde_json::to_string(&tree).unwrap();
        let back: SkeletonTree = serde_json::from_str(&js).unwrap();
        assert_eq!(back, tree);
    }
}
