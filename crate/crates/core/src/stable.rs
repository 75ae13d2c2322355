//! Stable reduction of marked weighted metric graphs.
//!
//! A genus-0 vertex of valence one is contracted away together with its edge
//! unless the edge is a ray; a genus-0 vertex of valence two is erased by
//! merging its two segments, unless both of them are rays. Repeating this
//! until neither rule applies yields the stable (minimal) skeleton when the
//! Euler characteristic is negative.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric_graph::{Edge, MetricGraph, Ray, Vertex};
use crate::rational::Rat;

/// Diagnostic attached to every `chi >= 0` rejection.
pub const EULER_ZERO_EXPLANATION: &str = "stable vertex sets need chi < 0; with chi = 0 either g = 0 and #D = 2 \
(the skeleton of G_m is the line from 0 to inf and any type-2 point on it is a minimal vertex set) \
or g = 1 and #D = 0 (an elliptic curve: a single genus-1 point for good reduction, a circle for a Tate curve), \
and minimal vertex sets are not unique";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StableError {
    #[error("euler characteristic {chi} is not negative: {explanation}")]
    NonNegativeEuler { chi: i64, explanation: &'static str },
    #[error("2 - 2g - n = {0} is positive; no tropicalization exists")]
    PositiveEuler(i64),
    #[error("graph does not match (g, n): {0}")]
    Mismatch(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PruneRule {
    #[serde(rename = "valence1")]
    Valence1,
    #[serde(rename = "valence2")]
    Valence2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneStep {
    pub rule: PruneRule,
    pub vertex: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationReport {
    pub input: MetricGraph,
    pub output: MetricGraph,
    pub steps: Vec<PruneStep>,
    pub chi: i64,
}

/// Which rule, if any, removes vertex `x`.
fn applicable_rule(g: &MetricGraph, x: &Vertex) -> Option<PruneRule> {
    if x.weight != 0 {
        return None;
    }
    let edges = g.incident_edges(&x.id);
    if edges.iter().any(|&i| g.edges()[i].is_loop()) {
        return None;
    }
    let rays = g.incident_rays(&x.id).len();
    match (edges.len(), rays) {
        (1, 0) => Some(PruneRule::Valence1),
        (2, 0) | (1, 1) => Some(PruneRule::Valence2),
        _ => None,
    }
}

/// Every `(rule, vertex)` removal available in `g`.
pub fn prune_moves(g: &MetricGraph) -> Vec<(PruneRule, String)> {
    let mut moves: Vec<(PruneRule, String)> = g
        .vertices()
        .iter()
        .filter_map(|v| applicable_rule(g, v).map(|r| (r, v.id.clone())))
        .collect();
    moves.sort();
    moves
}

/// Removes `vertex` by `rule`; `None` if the rule does not apply there.
pub fn apply_prune(g: &MetricGraph, rule: PruneRule, vertex: &str) -> Option<MetricGraph> {
    let x = g.vertex(vertex)?;
    if applicable_rule(g, x)? != rule {
        return None;
    }
    let incident = g.incident_edges(vertex);
    let vertices: Vec<Vertex> = g.vertices().iter().filter(|v| v.id != vertex).cloned().collect();
    let mut edges: Vec<Edge> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(i, _)| !incident.contains(i))
        .map(|(_, e)| e.clone())
        .collect();
    let mut rays: Vec<Ray> = g.rays().to_vec();
    match (rule, incident.as_slice()) {
        (PruneRule::Valence1, [_]) => {}
        (PruneRule::Valence2, [a, b]) => {
            let (ea, eb) = (&g.edges()[*a], &g.edges()[*b]);
            let far_a = ea.other(vertex).expect("incident").to_string();
            let far_b = eb.other(vertex).expect("incident").to_string();
            edges.push(Edge::new(far_a, far_b, &ea.length + &eb.length));
        }
        (PruneRule::Valence2, [a]) => {
            // a segment and a ray: the ray absorbs the segment
            let far = g.edges()[*a].other(vertex).expect("incident").to_string();
            for r in rays.iter_mut().filter(|r| r.base == vertex) {
                r.base = far.clone();
            }
        }
        _ => unreachable!("rule/incidence mismatch"),
    }
    rays.retain(|r| r.base != vertex);
    Some(MetricGraph::new(vertices, edges, rays).expect("pruning keeps the graph connected"))
}

/// One deterministic removal: the valence-1 rule before the valence-2 rule,
/// lowest vertex id first within a rule.
pub fn prune_step(g: &MetricGraph) -> Option<(MetricGraph, PruneRule, String)> {
    let (rule, vertex) = prune_moves(g).into_iter().next()?;
    let next = apply_prune(g, rule, &vertex).expect("listed move applies");
    Some((next, rule, vertex))
}

/// Prunes to a fixed point. Requires a negative Euler characteristic.
pub fn stabilize(g: &MetricGraph) -> Result<StabilizationReport, StableError> {
    let chi = g.euler_char();
    if chi >= 0 {
        return Err(StableError::NonNegativeEuler {
            chi,
            explanation: EULER_ZERO_EXPLANATION,
        });
    }
    let mut current = g.clone();
    let mut steps = Vec::new();
    while let Some((next, rule, vertex)) = prune_step(&current) {
        steps.push(PruneStep { rule, vertex });
        current = next;
    }
    Ok(StabilizationReport {
        input: g.clone(),
        output: current,
        steps,
        chi,
    })
}

/// Vertices that must belong to any vertex set of the same skeleton: those
/// of valence at least three or positive weight.
pub fn minimal_vertex_characterization(g: &MetricGraph) -> BTreeSet<String> {
    g.vertices()
        .iter()
        .filter(|v| v.weight > 0 || g.valence(&v.id) >= 3)
        .map(|v| v.id.clone())
        .collect()
}

/// No genus-0 vertex of valence less than three.
pub fn is_stable(g: &MetricGraph) -> bool {
    minimal_vertex_characterization(g).len() == g.vertices().len()
}

type StateKey = (Vec<Vertex>, Vec<(String, String, Rat)>, Vec<Ray>);

/// Order-independent key for a graph whose vertex ids are fixed.
fn state_key(g: &MetricGraph) -> StateKey {
    let mut vs = g.vertices().to_vec();
    vs.sort_by(|a, b| a.id.cmp(&b.id));
    let mut es: Vec<(String, String, Rat)> = g
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = if e.u <= e.v { (&e.u, &e.v) } else { (&e.v, &e.u) };
            (a.clone(), b.clone(), e.length.clone())
        })
        .collect();
    es.sort();
    let mut rs = g.rays().to_vec();
    rs.sort_by(|a, b| a.mark.cmp(&b.mark));
    (vs, es, rs)
}

/// All graphs reachable by some maximal sequence of prune moves, over every
/// possible removal order.
pub fn terminal_forms(g: &MetricGraph) -> Vec<MetricGraph> {
    let mut visited: BTreeSet<StateKey> = BTreeSet::new();
    let mut terminals: BTreeMap<StateKey, MetricGraph> = BTreeMap::new();
    let mut stack = vec![g.clone()];
    while let Some(h) = stack.pop() {
        if !visited.insert(state_key(&h)) {
            continue;
        }
        let moves = prune_moves(&h);
        if moves.is_empty() {
            terminals.insert(state_key(&h), h);
            continue;
        }
        for (rule, v) in moves {
            stack.push(apply_prune(&h, rule, &v).expect("listed move applies"));
        }
    }
    terminals.into_values().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    Multiplicative,
    Good,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TateSkeleton {
    pub reduction: Reduction,
    pub graph: MetricGraph,
}

/// Minimal skeleton of an elliptic curve with `val(j) = val_j`: a circle of
/// circumference `-val_j` for multiplicative reduction, otherwise the single
/// genus-1 point.
pub fn tate_skeleton(val_j: &Rat) -> TateSkeleton {
    if val_j.is_negative() {
        let graph = MetricGraph::new(
            vec![Vertex { id: "o".into(), weight: 0 }],
            vec![Edge::new("o", "o", -val_j.clone())],
            vec![],
        )
        .expect("a loop is connected");
        TateSkeleton {
            reduction: Reduction::Multiplicative,
            graph,
        }
    } else {
        TateSkeleton {
            reduction: Reduction::Good,
            graph: MetricGraph::point("o", 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TropicalizationStatus {
    /// `2 - 2g - n < 0`; the graph was stabilized.
    Stable,
    /// `2 - 2g - n = 0`; returned unmodified since the minimal skeleton is not
    /// unique.
    Boundary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tropicalization {
    pub graph: MetricGraph,
    pub status: TropicalizationStatus,
}

/// Packages `(Gamma, w)` for an `n`-marked genus-`genus` curve whose skeleton
/// is `graph`.
pub fn abstract_tropicalization(genus: u64, n: usize, graph: &MetricGraph) -> Result<Tropicalization, StableError> {
    let chi = 2 - 2 * genus as i64 - n as i64;
    if chi > 0 {
        return Err(StableError::PositiveEuler(chi));
    }
    if graph.rays().len() != n {
        return Err(StableError::Mismatch(format!("{} rays for n = {n}", graph.rays().len())));
    }
    if graph.total_genus() != genus {
        return Err(StableError::Mismatch(format!(
            "total genus {} for g = {genus}",
            graph.total_genus()
        )));
    }
    if chi == 0 {
        return Ok(Tropicalization {
            graph: graph.clone(),
            status: TropicalizationStatus::Boundary,
        });
    }
    Ok(Tropicalization {
        graph: stabilize(graph)?.output,
        status: TropicalizationStatus::Stable,
    })
}
