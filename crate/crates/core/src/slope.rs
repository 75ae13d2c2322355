//! The function `F = val(f)` on a skeleton of `P^1` minus punctures, and a
//! certificate for its slope properties.
//!
//! For a unit `f` on `P^1 \ D` the checks are:
//!
//! * `F` is affine with integer slope on every edge and every ray;
//! * outgoing slopes sum to zero at every vertex (harmonicity);
//! * the slope along the ray toward a puncture `x` is `ord_x(f)`;
//! * `F(x) = F(retract(x))` off the skeleton.
//!
//! Slopes are measured outgoing: along an edge away from the vertex, along a
//! ray from its base toward the puncture.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::berkovich::{BerkovichError, P1Point, RationalFunction, SkeletonTree, Type2Point};
use crate::generate;
use crate::metric_graph::PLFunction;
use crate::rational::{int, serde_rat, to_i64, Compact, Rat};
use crate::valued_field::{PuiseuxElement, ValQ};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SlopeError {
    #[error("`{0}` is a zero or pole of f but not a puncture of the skeleton")]
    DivisorOffPunctures(String),
    #[error("slope {slope} on edge {edge} is not an integer")]
    NonIntegerSlope { edge: usize, slope: Rat },
    #[error("slope {slope} on the ray to `{mark}` is not an integer")]
    NonIntegerRaySlope { mark: String, slope: Rat },
    #[error("F is not affine on the ray to `{mark}` beyond its last breakpoint")]
    ProbeUnstable { mark: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("no order given for the ray `{0}`")]
    MissingOrder(String),
    #[error("F is only determined by its ray data on a tree")]
    NotATree,
    #[error(transparent)]
    Berkovich(#[from] BerkovichError),
}

/// Number of tangent directions at `vertex` that lie in the skeleton.
///
/// Directions off the skeleton carry slope 0 and are not counted.
pub fn direction_count(tree: &SkeletonTree, vertex: &str) -> Result<usize, SlopeError> {
    if !tree.graph().has_vertex(vertex) {
        return Err(SlopeError::UnknownVertex(vertex.to_string()));
    }
    Ok(tree.graph().valence(vertex))
}

/// Valuations along the ray `mark`, as distances from its base, at which
/// `F` may bend.
fn ray_breakpoint_distances(f: &RationalFunction, tree: &SkeletonTree, mark: &str) -> Vec<Rat> {
    let base = &tree.placement()[&tree.graph().ray(mark).expect("ray").base];
    match &tree.ray_targets()[mark] {
        P1Point::Finite(a) => f
            .finite_factors()
            .filter_map(|(r, _)| match (a - r).valuation() {
                ValQ::Finite(v) => Some(v - base.radius()),
                ValQ::Infinity => None,
            })
            .collect(),
        _ => f
            .finite_factors()
            .filter_map(|(r, _)| match (base.center() - r).valuation() {
                ValQ::Finite(v) => Some(base.radius() - v),
                ValQ::Infinity => None,
            })
            .collect(),
    }
}

/// `F` on the vertices, edges and rays of `tree`.
///
/// Every zero and pole of `f` must be a puncture. Ray slopes are read at a
/// probe one unit past the last breakpoint along the ray, and the ray is
/// checked to be affine from its base to beyond the probe.
pub fn compute_f(f: &RationalFunction, tree: &SkeletonTree) -> Result<PLFunction, SlopeError> {
    let punctures: Vec<&P1Point> = tree.punctures().collect();
    for p in f.divisor_support() {
        if !punctures.contains(&&p) {
            return Err(SlopeError::DivisorOffPunctures(p.to_string()));
        }
    }
    let graph = tree.graph();
    let vertex_values: BTreeMap<String, Rat> = tree
        .placement()
        .iter()
        .map(|(id, b)| (id.clone(), f.eval_val_at(b)))
        .collect();

    let mut edge_slopes = Vec::with_capacity(graph.edges().len());
    for (i, e) in graph.edges().iter().enumerate() {
        let slope = (&vertex_values[&e.v] - &vertex_values[&e.u]) / &e.length;
        let n = to_i64(&slope).ok_or(SlopeError::NonIntegerSlope { edge: i, slope })?;
        edge_slopes.push(n);
    }

    let mut ray_slopes = BTreeMap::new();
    for r in graph.rays() {
        let base_value = &vertex_values[&r.base];
        let last = ray_breakpoint_distances(f, tree, &r.mark)
            .into_iter()
            .fold(Rat::zero(), |acc, d| if d > acc { d } else { acc });
        let probe = last + Rat::one();
        let at = |d: &Rat| f.eval_val_at(&tree.point_on_ray(&r.mark, d).expect("nonnegative distance"));
        let near = (at(&probe) - base_value) / &probe;
        let far = at(&(&probe + Rat::one())) - at(&probe);
        if near != far {
            return Err(SlopeError::ProbeUnstable { mark: r.mark.clone() });
        }
        let n = to_i64(&near).ok_or_else(|| SlopeError::NonIntegerRaySlope {
            mark: r.mark.clone(),
            slope: near.clone(),
        })?;
        ray_slopes.insert(r.mark.clone(), n);
    }

    Ok(PLFunction {
        vertex_values,
        edge_slopes,
        ray_slopes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayCheck {
    pub mark: String,
    pub slope: i64,
    pub expected_order: i64,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetractionSample {
    pub point: P1Point,
    #[serde(with = "serde_rat")]
    pub value: Rat,
    pub retraction: P1Point,
    #[serde(with = "serde_rat")]
    pub retraction_value: Rat,
    pub matches: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeReport {
    #[serde(rename = "F")]
    pub function: PLFunction,
    /// Outgoing slope sum at each vertex.
    pub harmonicity: BTreeMap<String, i64>,
    pub rays: Vec<RayCheck>,
    /// Sum of all ray slopes; zero because `div(f)` has degree zero.
    pub degree_sum: i64,
    pub retraction_samples: Vec<RetractionSample>,
    pub verdict: Verdict,
}

impl SlopeReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Human-readable reasons for a failing verdict.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (v, s) in &self.harmonicity {
            if *s != 0 {
                out.push(format!("outgoing slopes at {v} sum to {s}"));
            }
        }
        for r in self.rays.iter().filter(|r| !r.matches) {
            out.push(format!("ray to {} has slope {} but order {}", r.mark, r.slope, r.expected_order));
        }
        if self.degree_sum != 0 {
            out.push(format!("ray slopes sum to {}", self.degree_sum));
        }
        for s in self.retraction_samples.iter().filter(|s| !s.matches) {
            out.push(format!(
                "F({}) = {} but F({}) = {}",
                s.point,
                Compact(&s.value),
                s.retraction,
                Compact(&s.retraction_value)
            ));
        }
        out
    }
}

/// A random type-2 point that the skeleton does not contain.
///
/// Most samples branch off a random skeleton point `zeta(b, r)` in a
/// residue direction `b + u t^r`; the rest are unrelated random balls.
pub fn sample_off_skeleton<R: Rng>(rng: &mut R, tree: &SkeletonTree) -> Type2Point {
    loop {
        let candidate = if rng.random_bool(0.8) {
            let anchor = random_skeleton_point(rng, tree);
            let u = int(rng.random_range(-4..=4));
            let center = anchor.center() + &PuiseuxElement::monomial(u, anchor.radius().clone());
            let depth = generate::rational(rng, 0, 3, 4) + Rat::new(1.into(), 4.into());
            Type2Point::new(center, anchor.radius() + depth)
        } else {
            let center = generate::random_element(rng);
            Type2Point::new(center, generate::rational(rng, -3, 5, 4))
        };
        if !tree.contains(&candidate) {
            return candidate;
        }
    }
}

/// A random point of the skeleton: a vertex, an interior point of an edge or
/// a point on a ray.
pub fn random_skeleton_point<R: Rng>(rng: &mut R, tree: &SkeletonTree) -> Type2Point {
    let graph = tree.graph();
    let choice = rng.random_range(0..3);
    if choice == 1 && !graph.edges().is_empty() {
        let i = rng.random_range(0..graph.edges().len());
        let len = &graph.edges()[i].length;
        let frac = Rat::new(rng.random_range(0..=12).into(), 12.into());
        return tree.point_on_edge(i, &(len * frac)).expect("offset within edge");
    }
    if choice == 2 {
        let r = &graph.rays()[rng.random_range(0..graph.rays().len())];
        let d = generate::rational(rng, 0, 4, 4);
        return tree.point_on_ray(&r.mark, &d).expect("nonnegative distance");
    }
    let ids: Vec<&String> = tree.placement().keys().collect();
    tree.placement()[ids[rng.random_range(0..ids.len())]].clone()
}

/// Certifies the slope properties of `F = val f` on `tree`, comparing ray
/// slopes with the orders of `f` at the punctures.
pub fn verify_slope_formula<R: Rng>(
    f: &RationalFunction,
    tree: &SkeletonTree,
    samples: usize,
    rng: &mut R,
) -> Result<SlopeReport, SlopeError> {
    let orders = tree
        .ray_targets()
        .iter()
        .map(|(mark, p)| (mark.clone(), f.order_at(p)))
        .collect();
    verify_with_orders(f, tree, &orders, samples, rng)
}

/// Like [`verify_slope_formula`] with the expected puncture orders supplied
/// by the caller, keyed by ray marking.
pub fn verify_with_orders<R: Rng>(
    f: &RationalFunction,
    tree: &SkeletonTree,
    orders: &BTreeMap<String, i64>,
    samples: usize,
    rng: &mut R,
) -> Result<SlopeReport, SlopeError> {
    let function = compute_f(f, tree)?;
    let graph = tree.graph();
    let harmonicity = function.outgoing_sums(graph);

    let mut rays = Vec::new();
    for r in graph.rays() {
        let slope = function.ray_slopes[&r.mark];
        let expected_order = *orders.get(&r.mark).ok_or_else(|| SlopeError::MissingOrder(r.mark.clone()))?;
        rays.push(RayCheck {
            mark: r.mark.clone(),
            slope,
            expected_order,
            matches: slope == expected_order,
        });
    }
    let degree_sum = function.ray_slopes.values().sum();

    let mut retraction_samples = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = P1Point::Type2(sample_off_skeleton(rng, tree));
        let retraction = tree.retract(&x);
        let value = f.eval_val(&x)?;
        let retraction_value = f.eval_val(&retraction)?;
        retraction_samples.push(RetractionSample {
            matches: value == retraction_value,
            point: x,
            value,
            retraction,
            retraction_value,
        });
    }

    let pass = harmonicity.values().all(|&s| s == 0)
        && rays.iter().all(|r| r.matches)
        && degree_sum == 0
        && retraction_samples.iter().all(|s| s.matches);
    Ok(SlopeReport {
        function,
        harmonicity,
        rays,
        degree_sum,
        retraction_samples,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
    })
}

/// Rebuilds `F` on a tree-shaped skeleton from nothing but the puncture
/// orders and `F(root)`, using harmonicity: the slope from a vertex into a
/// child subtree is the total order of the punctures hanging below it.
pub fn reconstruct_from_orders(
    tree: &SkeletonTree,
    orders: &BTreeMap<String, i64>,
    root_value: Rat,
) -> Result<PLFunction, SlopeError> {
    let graph = tree.graph();
    if graph.betti1() != 0 {
        return Err(SlopeError::NotATree);
    }
    let mut ray_slopes = BTreeMap::new();
    for r in graph.rays() {
        let m = *orders.get(&r.mark).ok_or_else(|| SlopeError::MissingOrder(r.mark.clone()))?;
        ray_slopes.insert(r.mark.clone(), m);
    }
    let mut below: BTreeMap<&str, i64> = graph.vertices().iter().map(|v| (v.id.as_str(), 0)).collect();
    for r in graph.rays() {
        *below.get_mut(r.base.as_str()).expect("vertex") += ray_slopes[&r.mark];
    }
    // Root-first order: parents have smaller radius than children.
    let mut order: Vec<(&String, &Type2Point)> = tree.placement().iter().collect();
    order.sort_by(|a, b| a.1.cmp(b.1));
    let parent_of: BTreeMap<&str, (usize, &str)> = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let (pu, pv) = (&tree.placement()[&e.u], &tree.placement()[&e.v]);
            if pu.radius() < pv.radius() {
                (e.v.as_str(), (i, e.u.as_str()))
            } else {
                (e.u.as_str(), (i, e.v.as_str()))
            }
        })
        .collect();
    for (id, _) in order.iter().rev() {
        if let Some(&(_, parent)) = parent_of.get(id.as_str()) {
            let sub = below[id.as_str()];
            *below.get_mut(parent).expect("vertex") += sub;
        }
    }
    let mut edge_slopes = vec![0; graph.edges().len()];
    let mut vertex_values = BTreeMap::new();
    for (id, _) in &order {
        let value = match parent_of.get(id.as_str()) {
            None => root_value.clone(),
            Some(&(i, parent)) => {
                let e = &graph.edges()[i];
                let down = below[id.as_str()];
                edge_slopes[i] = if e.u == parent { down } else { -down };
                &vertex_values[parent] + int(down) * &e.length
            }
        };
        vertex_values.insert((*id).clone(), value);
    }
    Ok(PLFunction {
        vertex_values,
        edge_slopes,
        ray_slopes,
    })
}

/// Tab-separated `(edge, from, to, slope, length, delta_F)` rows, rays last
/// with infinite length.
pub fn plot_table(tree: &SkeletonTree, function: &PLFunction) -> String {
    let mut out = String::from("edge\tfrom\tto\tslope\tlength\tdelta_F\n");
    for (i, e) in tree.graph().edges().iter().enumerate() {
        let delta = &function.vertex_values[&e.v] - &function.vertex_values[&e.u];
        let _ = writeln!(
            out,
            "e{i}\t{}\t{}\t{}\t{}\t{}",
            e.u,
            e.v,
            function.edge_slopes[i],
            Compact(&e.length),
            Compact(&delta)
        );
    }
    for r in tree.graph().rays() {
        let slope = function.ray_slopes[&r.mark];
        let delta = match slope {
            0 => "0",
            s if s > 0 => "+inf",
            _ => "-inf",
        };
        let _ = writeln!(out, "ray\t{}\t{}\t{slope}\tinf\t{delta}", r.base, r.mark);
    }
    out
}
