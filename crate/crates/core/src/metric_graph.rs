//! Vertex-weighted metric graphs with rays: dimension-one abstract polyhedral
//! complexes with rational edge lengths.
//!
//! Loops and parallel edges are allowed. Rays are edges of infinite length
//! that end at a marked point; they carry a label instead of a length.
//! Valence counts each ray once and each loop twice, matching the number of
//! tangent directions at a vertex.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::rational::{int, serde_rat, Rat};

/// Largest vertex count accepted by the brute-force isomorphism test.
pub const ISOMORPHISM_VERTEX_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a metric graph needs at least one vertex")]
    Empty,
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("edge {index} has non-positive length {length}")]
    NonPositiveLength { index: usize, length: Rat },
    #[error("marking `{0}` is used by more than one ray")]
    DuplicateMark(String),
    #[error("graph is disconnected: `{0}` cannot be reached")]
    Disconnected(String),
    #[error("no edge with index {0}")]
    NoSuchEdge(usize),
    #[error("refinement position {position} is not strictly inside an edge of length {length}")]
    RefinePosition { position: Box<Rat>, length: Box<Rat> },
    #[error("isomorphism test limited to {limit} vertices, got {got}")]
    TooLarge { limit: usize, got: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    #[serde(rename = "w")]
    pub weight: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub u: String,
    pub v: String,
    #[serde(rename = "len", with = "serde_rat")]
    pub length: Rat,
}

impl Edge {
    pub fn new(u: impl Into<String>, v: impl Into<String>, length: Rat) -> Self {
        Self {
            u: u.into(),
            v: v.into(),
            length,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    /// The endpoint opposite `x`, if `x` is an endpoint.
    pub fn other(&self, x: &str) -> Option<&str> {
        if self.u == x {
            Some(&self.v)
        } else if self.v == x {
            Some(&self.u)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ray {
    pub base: String,
    pub mark: String,
}

impl Ray {
    pub fn new(base: impl Into<String>, mark: impl Into<String>) -> Self {
        Self {
            base: base.into(),
            mark: mark.into(),
        }
    }
}

/// A connected vertex-weighted metric graph with rays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MetricGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    rays: Vec<Ray>,
}

#[derive(Deserialize)]
struct GraphJson {
    vertices: Vec<Vertex>,
    #[serde(default)]
    edges: Vec<Edge>,
    #[serde(default)]
    rays: Vec<Ray>,
}

impl<'de> Deserialize<'de> for MetricGraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        MetricGraph::new(raw.vertices, raw.edges, raw.rays).map_err(serde::de::Error::custom)
    }
}

impl MetricGraph {
    /// Validates and builds a graph. Rejects duplicate ids, dangling
    /// endpoints, non-positive lengths, repeated markings and disconnected
    /// input.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>, rays: Vec<Ray>) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut ids = BTreeSet::new();
        for v in &vertices {
            if !ids.insert(v.id.as_str()) {
                return Err(GraphError::DuplicateVertex(v.id.clone()));
            }
        }
        for (index, e) in edges.iter().enumerate() {
            for end in [&e.u, &e.v] {
                if !ids.contains(end.as_str()) {
                    return Err(GraphError::UnknownVertex(end.clone()));
                }
            }
            if !e.length.is_positive() {
                return Err(GraphError::NonPositiveLength {
                    index,
                    length: e.length.clone(),
                });
            }
        }
        let mut marks = BTreeSet::new();
        for r in &rays {
            if !ids.contains(r.base.as_str()) {
                return Err(GraphError::UnknownVertex(r.base.clone()));
            }
            if !marks.insert(r.mark.as_str()) {
                return Err(GraphError::DuplicateMark(r.mark.clone()));
            }
        }
        let g = Self {
            vertices,
            edges,
            rays,
        };
        g.check_connected()?;
        Ok(g)
    }

    /// A single vertex of the given weight with no edges or rays.
    pub fn point(id: impl Into<String>, weight: u32) -> Self {
        Self {
            vertices: vec![Vertex {
                id: id.into(),
                weight,
            }],
            edges: Vec::new(),
            rays: Vec::new(),
        }
    }

    fn check_connected(&self) -> Result<(), GraphError> {
        let adj = self.adjacency();
        let start = self.vertices[0].id.as_str();
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for (y, _) in &adj[x] {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        match self.vertices.iter().find(|v| !seen.contains(v.id.as_str())) {
            Some(v) => Err(GraphError::Disconnected(v.id.clone())),
            None => Ok(()),
        }
    }

    /// Neighbor lists `(other endpoint, edge index)`; loops appear twice.
    fn adjacency(&self) -> BTreeMap<&str, Vec<(&str, usize)>> {
        let mut adj: BTreeMap<&str, Vec<(&str, usize)>> =
            self.vertices.iter().map(|v| (v.id.as_str(), Vec::new())).collect();
        for (i, e) in self.edges.iter().enumerate() {
            adj.get_mut(e.u.as_str()).expect("validated").push((e.v.as_str(), i));
            adj.get_mut(e.v.as_str()).expect("validated").push((e.u.as_str(), i));
        }
        adj
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn vertex(&self, id: &str) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    pub fn has_vertex(&self, id: &str) -> bool {
        self.vertex(id).is_some()
    }

    pub fn marks(&self) -> BTreeSet<&str> {
        self.rays.iter().map(|r| r.mark.as_str()).collect()
    }

    pub fn ray(&self, mark: &str) -> Option<&Ray> {
        self.rays.iter().find(|r| r.mark == mark)
    }

    /// Edge indices incident to `id`; a loop is listed twice.
    pub fn incident_edges(&self, id: &str) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.u == id {
                out.push(i);
            }
            if e.v == id {
                out.push(i);
            }
        }
        out
    }

    pub fn incident_rays(&self, id: &str) -> Vec<&Ray> {
        self.rays.iter().filter(|r| r.base == id).collect()
    }

    /// Number of tangent directions at `id` inside the graph: edge ends
    /// (loops twice) plus rays.
    pub fn valence(&self, id: &str) -> usize {
        self.incident_edges(id).len() + self.incident_rays(id).len()
    }

    /// First Betti number `#E - #V + 1`; rays do not contribute.
    pub fn betti1(&self) -> usize {
        // connected, so #E >= #V - 1
        self.edges.len() + 1 - self.vertices.len()
    }

    /// Sum of vertex weights plus the first Betti number.
    pub fn total_genus(&self) -> u64 {
        self.vertices.iter().map(|v| u64::from(v.weight)).sum::<u64>() + self.betti1() as u64
    }

    /// `2 - 2g - n` where `n` is the number of rays.
    pub fn euler_char(&self) -> i64 {
        2 - 2 * self.total_genus() as i64 - self.rays.len() as i64
    }

    /// An id of the form `{prefix}{k}` not already in use.
    pub fn fresh_id(&self, prefix: &str) -> String {
        (0..)
            .map(|k| format!("{prefix}{k}"))
            .find(|c| !self.has_vertex(c))
            .expect("unbounded search")
    }

    /// Splits edge `edge` at distance `position` from its `u` end by a new
    /// weight-0 vertex. The edge keeps its index as the `u` half; the `v`
    /// half is appended.
    pub fn refine(&self, edge: usize, position: &Rat) -> Result<MetricGraph, GraphError> {
        let mid = self.fresh_id("r");
        self.refine_with_id(edge, position, mid)
    }

    pub fn refine_with_id(&self, edge: usize, position: &Rat, mid: String) -> Result<MetricGraph, GraphError> {
        let e = self.edges.get(edge).ok_or(GraphError::NoSuchEdge(edge))?;
        if !position.is_positive() || position >= &e.length {
            return Err(GraphError::RefinePosition {
                position: Box::new(position.clone()),
                length: Box::new(e.length.clone()),
            });
        }
        if self.has_vertex(&mid) {
            return Err(GraphError::DuplicateVertex(mid));
        }
        let mut g = self.clone();
        let rest = &e.length - position;
        let far = e.v.clone();
        g.edges[edge] = Edge::new(e.u.clone(), mid.clone(), position.clone());
        g.edges.push(Edge::new(mid.clone(), far, rest));
        g.vertices.push(Vertex { id: mid, weight: 0 });
        Ok(g)
    }

    /// No loop edges.
    pub fn is_strongly_semistable(&self) -> bool {
        self.edges.iter().all(|e| !e.is_loop())
    }

    /// Subdivides every loop at its midpoint.
    pub fn make_loopless(&self) -> MetricGraph {
        let mut g = self.clone();
        while let Some(i) = g.edges.iter().position(Edge::is_loop) {
            let half = &g.edges[i].length / int(2);
            g = g.refine(i, &half).expect("midpoint is interior");
        }
        g
    }

    /// Exact shortest-path distances from `source` to every vertex.
    pub fn distances_from(&self, source: &str) -> Result<BTreeMap<String, Rat>, GraphError> {
        if !self.has_vertex(source) {
            return Err(GraphError::UnknownVertex(source.to_string()));
        }
        let adj = self.adjacency();
        let mut dist: BTreeMap<&str, Rat> = BTreeMap::new();
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((Rat::zero(), source)));
        while let Some(Reverse((d, x))) = heap.pop() {
            if dist.contains_key(x) {
                continue;
            }
            for &(y, i) in &adj[x] {
                if !dist.contains_key(y) {
                    heap.push(Reverse((&d + &self.edges[i].length, y)));
                }
            }
            dist.insert(x, d);
        }
        Ok(dist.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn shortest_path(&self, u: &str, v: &str) -> Result<Rat, GraphError> {
        if !self.has_vertex(v) {
            return Err(GraphError::UnknownVertex(v.to_string()));
        }
        Ok(self.distances_from(u)?.remove(v).expect("connected"))
    }

    /// Lengths of the edges joining each unordered vertex pair, sorted.
    fn pair_lengths(&self, index: &BTreeMap<&str, usize>) -> BTreeMap<(usize, usize), Vec<Rat>> {
        let mut out: BTreeMap<(usize, usize), Vec<Rat>> = BTreeMap::new();
        for e in &self.edges {
            let (a, b) = (index[e.u.as_str()], index[e.v.as_str()]);
            out.entry((a.min(b), a.max(b))).or_default().push(e.length.clone());
        }
        for v in out.values_mut() {
            v.sort();
        }
        out
    }

    /// `(weight, marks, incident lengths)` for each vertex, used to prune
    /// the isomorphism search.
    fn signatures(&self) -> Vec<(u32, Vec<&str>, Vec<Rat>)> {
        self.vertices
            .iter()
            .map(|v| {
                let mut marks: Vec<&str> = self.incident_rays(&v.id).iter().map(|r| r.mark.as_str()).collect();
                marks.sort();
                let mut lens: Vec<Rat> = self
                    .incident_edges(&v.id)
                    .into_iter()
                    .map(|i| self.edges[i].length.clone())
                    .collect();
                lens.sort();
                (v.weight, marks, lens)
            })
            .collect()
    }

    /// Combinatorial isomorphism: a vertex bijection preserving weights, ray
    /// markings and the multiset of edge lengths between every pair of
    /// vertices (loops included). Brute force with pruning.
    pub fn is_isomorphic(&self, other: &MetricGraph) -> Result<bool, GraphError> {
        for g in [self, other] {
            if g.vertices.len() > ISOMORPHISM_VERTEX_LIMIT {
                return Err(GraphError::TooLarge {
                    limit: ISOMORPHISM_VERTEX_LIMIT,
                    got: g.vertices.len(),
                });
            }
        }
        if self.vertices.len() != other.vertices.len()
            || self.edges.len() != other.edges.len()
            || self.marks() != other.marks()
        {
            return Ok(false);
        }
        let sig_a = self.signatures();
        let sig_b = other.signatures();
        let mut sorted_a = sig_a.clone();
        let mut sorted_b = sig_b.clone();
        sorted_a.sort();
        sorted_b.sort();
        if sorted_a != sorted_b {
            return Ok(false);
        }
        let index_a: BTreeMap<&str, usize> =
            self.vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
        let index_b: BTreeMap<&str, usize> =
            other.vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
        let search = IsoSearch {
            sig_a: &sig_a,
            sig_b: &sig_b,
            pairs_a: self.pair_lengths(&index_a),
            pairs_b: other.pair_lengths(&index_b),
        };
        let mut image = Vec::with_capacity(sig_a.len());
        let mut used = vec![false; sig_b.len()];
        Ok(search.extend(&mut image, &mut used))
    }
}

struct IsoSearch<'a> {
    sig_a: &'a [(u32, Vec<&'a str>, Vec<Rat>)],
    sig_b: &'a [(u32, Vec<&'a str>, Vec<Rat>)],
    pairs_a: BTreeMap<(usize, usize), Vec<Rat>>,
    pairs_b: BTreeMap<(usize, usize), Vec<Rat>>,
}

impl IsoSearch<'_> {
    fn lengths(pairs: &BTreeMap<(usize, usize), Vec<Rat>>, a: usize, b: usize) -> &[Rat] {
        pairs.get(&(a.min(b), a.max(b))).map_or(&[], Vec::as_slice)
    }

    fn extend(&self, image: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let k = image.len();
        if k == self.sig_a.len() {
            return true;
        }
        for cand in 0..self.sig_b.len() {
            if used[cand] || self.sig_a[k] != self.sig_b[cand] {
                continue;
            }
            let consistent = (0..k)
                .map(|j| (j, image[j]))
                .chain(std::iter::once((k, cand)))
                .all(|(j, pj)| Self::lengths(&self.pairs_a, k, j) == Self::lengths(&self.pairs_b, cand, pj));
            if !consistent {
                continue;
            }
            image.push(cand);
            used[cand] = true;
            if self.extend(image, used) {
                return true;
            }
            image.pop();
            used[cand] = false;
        }
        false
    }
}

/// A function on a metric graph that is affine with integer slope on each
/// edge and on each ray.
///
/// Edge slopes are stored along the stored orientation `u -> v` of the edge
/// with the same index; the slope in the reverse direction is the negative.
/// Ray slopes are measured outgoing from the base vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PLFunction {
    #[serde(with = "rat_map")]
    pub vertex_values: BTreeMap<String, Rat>,
    pub edge_slopes: Vec<i64>,
    pub ray_slopes: BTreeMap<String, i64>,
}

impl PLFunction {
    /// Slope of edge `edge` leaving vertex `from`. For a loop this is the
    /// slope along the stored orientation.
    pub fn outgoing_slope(&self, graph: &MetricGraph, edge: usize, from: &str) -> i64 {
        let e = &graph.edges()[edge];
        if e.u == from {
            self.edge_slopes[edge]
        } else {
            -self.edge_slopes[edge]
        }
    }

    /// Sum of outgoing slopes over every tangent direction at each vertex;
    /// a loop contributes both of its directions.
    pub fn outgoing_sums(&self, graph: &MetricGraph) -> BTreeMap<String, i64> {
        let mut sums: BTreeMap<String, i64> = graph.vertices().iter().map(|v| (v.id.clone(), 0)).collect();
        for (i, e) in graph.edges().iter().enumerate() {
            *sums.get_mut(&e.u).expect("vertex") += self.edge_slopes[i];
            *sums.get_mut(&e.v).expect("vertex") -= self.edge_slopes[i];
        }
        for r in graph.rays() {
            *sums.get_mut(&r.base).expect("vertex") += self.ray_slopes.get(&r.mark).copied().unwrap_or(0);
        }
        sums
    }

    /// Checks `value(v) - value(u) = slope * length` on every edge and that
    /// every vertex and ray is covered.
    pub fn check_consistency(&self, graph: &MetricGraph) -> Result<(), String> {
        if self.edge_slopes.len() != graph.edges().len() {
            return Err(format!(
                "{} edge slopes for {} edges",
                self.edge_slopes.len(),
                graph.edges().len()
            ));
        }
        for v in graph.vertices() {
            if !self.vertex_values.contains_key(&v.id) {
                return Err(format!("no value at vertex `{}`", v.id));
            }
        }
        for r in graph.rays() {
            if !self.ray_slopes.contains_key(&r.mark) {
                return Err(format!("no slope on ray `{}`", r.mark));
            }
        }
        for (i, e) in graph.edges().iter().enumerate() {
            let rise = &self.vertex_values[&e.v] - &self.vertex_values[&e.u];
            if rise != int(self.edge_slopes[i]) * &e.length {
                return Err(format!("edge {i} ({} -> {}) is not affine with slope {}", e.u, e.v, self.edge_slopes[i]));
            }
        }
        Ok(())
    }
}

mod rat_map {
    use std::collections::BTreeMap;

    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    use crate::rational::{format_rational, parse_rational, Rat};

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, Rat>, s: S) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|(k, v)| (k.clone(), format_rational(v)))
            .collect::<BTreeMap<_, _>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, Rat>, D::Error> {
        BTreeMap::<String, String>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| parse_rational(&v).map(|q| (k, q)).map_err(D::Error::custom))
            .collect()
    }
}
