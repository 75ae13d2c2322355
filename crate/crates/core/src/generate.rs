//! Seeded random fixtures: field elements, rational functions, points and
//! graphs. Everything is driven by a caller-supplied RNG so runs are
//! reproducible from a single seed.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::berkovich::{P1Point, RationalFunction, Type2Point};
use crate::metric_graph::{Edge, MetricGraph, Ray, Vertex};
use crate::rational::{int, rat, Rat};
use crate::valued_field::PuiseuxElement;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rational with denominator in `1..=max_den` and value in roughly
/// `[lo, hi]`.
pub fn rational<R: Rng>(rng: &mut R, lo: i64, hi: i64, max_den: i64) -> Rat {
    let den = rng.random_range(1..=max_den);
    let num = rng.random_range(lo * den..=hi * den);
    rat(num, den)
}

fn nonzero_coeff<R: Rng>(rng: &mut R) -> Rat {
    let c = rng.random_range(1..=3);
    int(if rng.random_bool(0.5) { c } else { -c })
}

/// `c * t^e` with `e` of denominator at most 4.
pub fn monomial<R: Rng>(rng: &mut R) -> PuiseuxElement {
    PuiseuxElement::monomial(nonzero_coeff(rng), rational(rng, -2, 4, 4))
}

/// A root for a random rational function: usually a Puiseux monomial,
/// sometimes `0`.
pub fn root<R: Rng>(rng: &mut R) -> PuiseuxElement {
    if rng.random_bool(0.1) {
        PuiseuxElement::zero()
    } else {
        monomial(rng)
    }
}

/// A factored rational function with between 1 and `max_roots` distinct
/// finite roots and nonzero multiplicities in `[-3, 3]`.
pub fn rational_function<R: Rng>(rng: &mut R, max_roots: usize) -> RationalFunction {
    let k = rng.random_range(1..=max_roots);
    let mut roots = BTreeSet::new();
    while roots.len() < k {
        roots.insert(root(rng));
    }
    let factors = roots
        .into_iter()
        .map(|a| {
            let m = rng.random_range(1..=3);
            (P1Point::Finite(a), if rng.random_bool(0.5) { m } else { -m })
        })
        .collect();
    RationalFunction::new(rational(rng, -3, 3, 4), factors).expect("distinct roots, nonzero orders")
}

/// A type-2 point near the roots of `f`: its center is a root perturbed by
/// a random monomial, or a fresh random element.
pub fn type2_near<R: Rng>(rng: &mut R, f: &RationalFunction) -> Type2Point {
    let roots: Vec<&PuiseuxElement> = f.finite_factors().map(|(a, _)| a).collect();
    let center = match roots.choose(rng) {
        Some(a) if rng.random_bool(0.7) => {
            if rng.random_bool(0.5) {
                (*a).clone()
            } else {
                *a + &monomial(rng)
            }
        }
        _ => random_element(rng),
    };
    Type2Point::new(center, rational(rng, -3, 5, 4))
}

/// Zero to two random monomials.
pub fn random_element<R: Rng>(rng: &mut R) -> PuiseuxElement {
    let mut x = PuiseuxElement::zero();
    for _ in 0..rng.random_range(0..=2) {
        x = &x + &monomial(rng);
    }
    x
}

/// A connected graph with `1..=max_vertices` vertices: a random spanning
/// tree plus up to `max_extra_edges` further edges (loops and parallel edges
/// allowed), random weights and up to three rays.
pub fn metric_graph<R: Rng>(rng: &mut R, max_vertices: usize, max_extra_edges: usize) -> MetricGraph {
    let n = rng.random_range(1..=max_vertices);
    let ids: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
    let vertices = ids
        .iter()
        .map(|id| Vertex {
            id: id.clone(),
            weight: if rng.random_bool(0.2) { rng.random_range(1..=2) } else { 0 },
        })
        .collect();
    let mut edges = Vec::new();
    for i in 1..n {
        let parent = rng.random_range(0..i);
        edges.push(Edge::new(ids[parent].clone(), ids[i].clone(), positive_length(rng)));
    }
    for _ in 0..rng.random_range(0..=max_extra_edges) {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        edges.push(Edge::new(ids[a].clone(), ids[b].clone(), positive_length(rng)));
    }
    let rays = (0..rng.random_range(0..=3))
        .map(|k| Ray::new(ids[rng.random_range(0..n)].clone(), format!("m{k}")))
        .collect();
    MetricGraph::new(vertices, edges, rays).expect("spanning tree keeps it connected")
}

pub fn positive_length<R: Rng>(rng: &mut R) -> Rat {
    let den = rng.random_range(1..=3);
    rat(rng.random_range(1..=4 * den), den)
}
