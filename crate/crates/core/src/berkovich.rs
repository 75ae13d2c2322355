//! Points of the Berkovich projective line at desk scale.
//!
//! Type-1 points are field elements or `inf`. A type-2 point is the Gauss
//! point of a closed ball, stored as `(center, s)` where `s` is the valuative
//! radius (the ball is `{x : val(x - center) >= s}`, of diameter `exp(-s)`).
//! Larger `s` means a smaller ball; a type-1 point behaves like `s = +inf`.
//!
//! Type-2 points are kept in canonical form: every monomial of the center
//! with exponent `>= s` is dropped, so two representations of the same ball
//! compare equal structurally.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::metric_graph::{Edge, MetricGraph, Ray, Vertex};
use crate::rational::{format_rational, int, parse_rational, Compact, Rat};
use crate::valued_field::{PuiseuxElement, ValQ};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BerkovichError {
    #[error("join is only defined in the affine chart; got `inf`")]
    JoinWithInfinity,
    #[error("expected a type-2 point, got `{0}`")]
    NotType2(String),
    #[error("expected a type-1 point, got `{0}`")]
    NotType1(String),
    #[error("a skeleton needs at least two punctures, got {0}")]
    TooFewPunctures(usize),
    #[error("puncture `{0}` listed twice")]
    DuplicatePuncture(String),
    #[error("invalid rational function: {0}")]
    InvalidFunction(String),
}

/// The Gauss point of the closed ball `{x : val(x - center) >= radius}`.
///
/// Field order puts the radius first so that sorting lists larger balls
/// first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Type2Point {
    radius: Rat,
    center: PuiseuxElement,
}

impl Type2Point {
    pub fn new(center: PuiseuxElement, radius: Rat) -> Self {
        let center = center.truncate(&radius);
        Self { radius, center }
    }

    /// `zeta(0, 0)`, the Gauss point of the unit ball.
    pub fn gauss() -> Self {
        Self::new(PuiseuxElement::zero(), Rat::zero())
    }

    pub fn center(&self) -> &PuiseuxElement {
        &self.center
    }

    /// Valuative radius `s`; the diameter is `exp(-s)`.
    pub fn radius(&self) -> &Rat {
        &self.radius
    }

    /// Whether `x` lies in the closed ball, i.e. `x <= self` in the tree
    /// order rooted at `inf`.
    pub fn contains(&self, x: &P1Point) -> bool {
        match x {
            P1Point::Infinity => false,
            P1Point::Finite(a) => (a - &self.center).valuation() >= ValQ::Finite(self.radius.clone()),
            P1Point::Type2(b) => {
                b.radius >= self.radius
                    && (&b.center - &self.center).valuation() >= ValQ::Finite(self.radius.clone())
            }
        }
    }
}

impl fmt::Display for Type2Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "zeta({}, {})", self.center, Compact(&self.radius))
    }
}

/// A type-1 or type-2 point of the Berkovich projective line.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum P1Point {
    Finite(PuiseuxElement),
    Infinity,
    Type2(Type2Point),
}

impl P1Point {
    pub fn type2(center: PuiseuxElement, radius: Rat) -> Self {
        P1Point::Type2(Type2Point::new(center, radius))
    }

    pub fn gauss() -> Self {
        P1Point::Type2(Type2Point::gauss())
    }

    pub fn is_type1(&self) -> bool {
        !matches!(self, P1Point::Type2(_))
    }

    pub fn as_type2(&self) -> Result<&Type2Point, BerkovichError> {
        match self {
            P1Point::Type2(b) => Ok(b),
            other => Err(BerkovichError::NotType2(other.to_string())),
        }
    }

    /// Center and valuative radius in the affine chart; type-1 points have
    /// radius `+inf`.
    fn affine(&self) -> Result<(&PuiseuxElement, ValQ), BerkovichError> {
        match self {
            P1Point::Finite(a) => Ok((a, ValQ::Infinity)),
            P1Point::Type2(b) => Ok((&b.center, ValQ::Finite(b.radius.clone()))),
            P1Point::Infinity => Err(BerkovichError::JoinWithInfinity),
        }
    }

    /// Label used for the ray ending at this puncture.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl From<PuiseuxElement> for P1Point {
    fn from(a: PuiseuxElement) -> Self {
        P1Point::Finite(a)
    }
}

impl From<Type2Point> for P1Point {
    fn from(b: Type2Point) -> Self {
        P1Point::Type2(b)
    }
}

impl fmt::Display for P1Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            P1Point::Finite(a) => write!(f, "{a}"),
            P1Point::Infinity => f.write_str("inf"),
            P1Point::Type2(b) => write!(f, "{b}"),
        }
    }
}

/// `x v y`: the Gauss point of the smallest closed ball containing both.
///
/// The join of a type-1 point with itself is that point.
pub fn join(x: &P1Point, y: &P1Point) -> Result<P1Point, BerkovichError> {
    let (cx, sx) = x.affine()?;
    let (cy, sy) = y.affine()?;
    let s = sx.min_with(&sy).min_with(&(cx - cy).valuation());
    Ok(match s {
        ValQ::Infinity => x.clone(),
        ValQ::Finite(s) => P1Point::type2(cx.clone(), s),
    })
}

/// Path distance `s_x + s_y - 2 s_{x v y}` in valuative coordinates.
///
/// Type-1 points sit at infinite distance from everything but themselves.
pub fn path_distance(x: &P1Point, y: &P1Point) -> ValQ {
    match (x, y) {
        (P1Point::Type2(a), P1Point::Type2(b)) => {
            let j = join(x, y).expect("type-2 points are affine");
            let sj = j.as_type2().expect("join of type-2 points").radius();
            ValQ::Finite(&a.radius + &b.radius - int(2) * sj)
        }
        _ if x == y => ValQ::Finite(Rat::zero()),
        _ => ValQ::Infinity,
    }
}

/// A nonzero rational function in factored form
/// `c * prod (T - a_i)^{m_i}` with `val c = lead_val`.
///
/// The order at `inf` is `-sum m_i` over the finite roots; an explicit `inf`
/// factor must agree with it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    lead_val: Rat,
    factors: Vec<(P1Point, i64)>,
}

/// `t^(lead) (T - a)^m ...`, finite factors only.
impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t^({})", Compact(&self.lead_val))?;
        for (a, m) in self.finite_factors() {
            write!(f, " (T - ({a}))^{m}")?;
        }
        Ok(())
    }
}

impl RationalFunction {
    pub fn new(lead_val: Rat, factors: Vec<(P1Point, i64)>) -> Result<Self, BerkovichError> {
        let invalid = |msg: String| Err(BerkovichError::InvalidFunction(msg));
        let mut seen = BTreeSet::new();
        let mut finite_sum = 0i64;
        let mut explicit_inf = None;
        for (root, mult) in &factors {
            if *mult == 0 {
                return invalid(format!("root `{root}` has multiplicity 0"));
            }
            if !seen.insert(root.clone()) {
                return invalid(format!("root `{root}` listed twice"));
            }
            match root {
                P1Point::Finite(_) => finite_sum += mult,
                P1Point::Infinity => explicit_inf = Some(*mult),
                P1Point::Type2(_) => return invalid(format!("root `{root}` is not a type-1 point")),
            }
        }
        if let Some(m) = explicit_inf {
            if m != -finite_sum {
                return invalid(format!(
                    "order {m} at inf contradicts degree zero (finite orders sum to {finite_sum})"
                ));
            }
        }
        Ok(Self { lead_val, factors })
    }

    /// A constant of valuation `lead_val`.
    pub fn constant(lead_val: Rat) -> Self {
        Self {
            lead_val,
            factors: Vec::new(),
        }
    }

    pub fn lead_val(&self) -> &Rat {
        &self.lead_val
    }

    /// Finite roots with their multiplicities (negative for poles).
    pub fn finite_factors(&self) -> impl Iterator<Item = (&PuiseuxElement, i64)> {
        self.factors.iter().filter_map(|(p, m)| match p {
            P1Point::Finite(a) => Some((a, *m)),
            _ => None,
        })
    }

    pub fn factors(&self) -> &[(P1Point, i64)] {
        &self.factors
    }

    pub fn order_at_infinity(&self) -> i64 {
        -self.finite_factors().map(|(_, m)| m).sum::<i64>()
    }

    /// Order of vanishing at a type-1 point; 0 for type-2 input.
    pub fn order_at(&self, x: &P1Point) -> i64 {
        match x {
            P1Point::Infinity => self.order_at_infinity(),
            P1Point::Finite(a) => self.finite_factors().find(|(r, _)| *r == a).map_or(0, |(_, m)| m),
            P1Point::Type2(_) => 0,
        }
    }

    /// Support of the divisor: every type-1 point with nonzero order.
    pub fn divisor_support(&self) -> Vec<P1Point> {
        let mut out: Vec<P1Point> = self.finite_factors().map(|(a, _)| P1Point::Finite(a.clone())).collect();
        if self.order_at_infinity() != 0 {
            out.push(P1Point::Infinity);
        }
        out
    }

    /// `val f` at a type-2 point:
    /// `lead_val + sum m_i * min(val(center - a_i), s)`.
    pub fn eval_val(&self, x: &P1Point) -> Result<Rat, BerkovichError> {
        let b = x.as_type2()?;
        Ok(self.eval_val_at(b))
    }

    pub fn eval_val_at(&self, b: &Type2Point) -> Rat {
        let mut acc = self.lead_val.clone();
        for (a, m) in self.finite_factors() {
            let d = match (&b.center - a).valuation() {
                ValQ::Finite(v) if v < b.radius => v,
                _ => b.radius.clone(),
            };
            acc += int(m) * d;
        }
        acc
    }
}

/// The tree in `P^1` spanned by a set of punctures, with one ray per puncture.
///
/// Vertex ids are `v0, v1, ...` in increasing order of placement (larger balls
/// first), so construction is deterministic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonTree {
    graph: MetricGraph,
    placement: BTreeMap<String, Type2Point>,
    ray_target: BTreeMap<String, P1Point>,
    root: String,
}

impl SkeletonTree {
    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn placement(&self) -> &BTreeMap<String, Type2Point> {
        &self.placement
    }

    /// Ray marking to the puncture it ends at.
    pub fn ray_targets(&self) -> &BTreeMap<String, P1Point> {
        &self.ray_target
    }

    pub fn punctures(&self) -> impl Iterator<Item = &P1Point> {
        self.ray_target.values()
    }

    /// The vertex whose ball contains all the others.
    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn has_infinity(&self) -> bool {
        self.ray_target.values().any(|p| *p == P1Point::Infinity)
    }

    pub fn vertex_point(&self, id: &str) -> Option<&Type2Point> {
        self.placement.get(id)
    }

    /// Base vertex of the ray ending at `puncture`.
    pub fn ray_base(&self, puncture: &P1Point) -> Option<&str> {
        let mark = self.ray_target.iter().find(|(_, p)| *p == puncture)?.0;
        self.graph.ray(mark).map(|r| r.base.as_str())
    }

    /// Point at distance `offset` from the `u` end of edge `edge`.
    pub fn point_on_edge(&self, edge: usize, offset: &Rat) -> Option<Type2Point> {
        let e = self.graph.edges().get(edge)?;
        if offset < &Rat::zero() || offset > &e.length {
            return None;
        }
        let pu = &self.placement[&e.u];
        let pv = &self.placement[&e.v];
        // edges always join a ball to its parent, so one placement is the
        // child and the path between them keeps the child's center
        let (child, toward_parent) = if pu.radius > pv.radius { (pu, offset.clone()) } else { (pv, &e.length - offset) };
        Some(Type2Point::new(child.center.clone(), &child.radius - toward_parent))
    }

    /// Point at distance `distance >= 0` along the ray marked `mark`.
    pub fn point_on_ray(&self, mark: &str, distance: &Rat) -> Option<Type2Point> {
        if distance < &Rat::zero() {
            return None;
        }
        let base = &self.placement[&self.graph.ray(mark)?.base];
        match &self.ray_target[mark] {
            P1Point::Infinity => Some(Type2Point::new(base.center.clone(), &base.radius - distance)),
            P1Point::Finite(a) => Some(Type2Point::new(a.clone(), &base.radius + distance)),
            P1Point::Type2(_) => None,
        }
    }

    /// The point of the skeleton (rays included) closest to `x`.
    ///
    /// A puncture retracts to the base of its ray. Otherwise the entry point
    /// is the deepest join of `x` with a finite puncture or vertex, clamped to
    /// the root when `inf` is not a puncture.
    pub fn retract(&self, x: &P1Point) -> P1Point {
        if let Some(base) = self.ray_base(x) {
            return P1Point::Type2(self.placement[base].clone());
        }
        let root = &self.placement[&self.root];
        if *x == P1Point::Infinity {
            return P1Point::Type2(root.clone());
        }
        let anchors = self
            .ray_target
            .values()
            .filter(|p| **p != P1Point::Infinity)
            .cloned()
            .chain(self.placement.values().cloned().map(P1Point::Type2));
        let deepest = anchors
            .map(|a| {
                let j = join(x, &a).expect("affine points");
                match j {
                    P1Point::Type2(b) => b,
                    other => unreachable!("join with a non-puncture anchor is type-2, got {other}"),
                }
            })
            .max_by(|a, b| a.radius.cmp(&b.radius))
            .expect("at least one vertex");
        if deepest.radius < root.radius && !self.has_infinity() {
            P1Point::Type2(root.clone())
        } else {
            P1Point::Type2(deepest)
        }
    }

    /// Whether a type-2 point lies on the skeleton.
    pub fn contains(&self, x: &Type2Point) -> bool {
        let p = P1Point::Type2(x.clone());
        self.retract(&p) == p
    }
}

/// Builds the skeleton of `P^1` minus `punctures`, optionally refined by
/// extra type-2 vertices.
///
/// Vertices are all pairwise joins of the finite punctures and the extra
/// vertices; if only one finite puncture `a` is given (so `inf` is the
/// other), the line from `a` to `inf` gets the vertex `zeta(a, 0)`. Each
/// vertex is joined to the smallest vertex strictly containing it, and each
/// puncture gets a ray from the smallest vertex containing it (`inf` from the
/// root). No chart change is needed when `inf` is not a puncture: the finite
/// punctures span a finite tree in the affine chart.
pub fn build_skeleton_tree(punctures: &[P1Point], extra_vertices: &[P1Point]) -> Result<SkeletonTree, BerkovichError> {
    if punctures.len() < 2 {
        return Err(BerkovichError::TooFewPunctures(punctures.len()));
    }
    let mut seen = BTreeSet::new();
    for p in punctures {
        if !p.is_type1() {
            return Err(BerkovichError::NotType1(p.to_string()));
        }
        if !seen.insert(p) {
            return Err(BerkovichError::DuplicatePuncture(p.to_string()));
        }
    }
    let finite: Vec<&P1Point> = punctures.iter().filter(|p| **p != P1Point::Infinity).collect();
    let mut spanning: Vec<P1Point> = finite.iter().map(|p| (*p).clone()).collect();
    for x in extra_vertices {
        x.as_type2()?;
        spanning.push(x.clone());
    }
    if let [P1Point::Finite(a)] = finite.as_slice() {
        spanning.push(P1Point::type2(a.clone(), Rat::zero()));
    }

    let mut balls: BTreeSet<Type2Point> = BTreeSet::new();
    for (i, x) in spanning.iter().enumerate() {
        if let P1Point::Type2(b) = x {
            balls.insert(b.clone());
        }
        for y in &spanning[i + 1..] {
            if let P1Point::Type2(b) = join(x, y)? {
                balls.insert(b);
            }
        }
    }
    let balls: Vec<Type2Point> = balls.into_iter().collect();
    let ids: Vec<String> = (0..balls.len()).map(|i| format!("v{i}")).collect();

    // Balls are sorted by radius, so the last container found is the smallest.
    let smallest_container = |x: &P1Point| -> Option<usize> {
        balls
            .iter()
            .enumerate()
            .rev()
            .find(|(_, b)| P1Point::Type2((*b).clone()) != *x && b.contains(x))
            .map(|(i, _)| i)
    };

    let mut edges = Vec::new();
    let mut root = None;
    for (i, b) in balls.iter().enumerate() {
        match smallest_container(&P1Point::Type2(b.clone())) {
            Some(parent) => edges.push(Edge::new(
                ids[parent].clone(),
                ids[i].clone(),
                &b.radius - &balls[parent].radius,
            )),
            None => root = Some(i),
        }
    }
    let root = root.expect("the join of everything is a vertex");

    let mut rays = Vec::new();
    let mut ray_target = BTreeMap::new();
    for p in punctures {
        let base = match p {
            P1Point::Infinity => root,
            _ => smallest_container(p).expect("every finite puncture lies below the root"),
        };
        let mark = p.label();
        rays.push(Ray::new(ids[base].clone(), mark.clone()));
        ray_target.insert(mark, p.clone());
    }

    let vertices = ids.iter().map(|id| Vertex { id: id.clone(), weight: 0 }).collect();
    let graph = MetricGraph::new(vertices, edges, rays).expect("a rooted tree is connected");
    Ok(SkeletonTree {
        graph,
        placement: ids.iter().cloned().zip(balls).collect(),
        ray_target,
        root: ids[root].clone(),
    })
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AffineOrInf {
    Inf(InfTag),
    Element(PuiseuxElement),
}

#[derive(Serialize, Deserialize)]
enum InfTag {
    #[serde(rename = "inf")]
    Inf,
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    #[serde(rename = "type")]
    kind: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<AffineOrInf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    center: Option<PuiseuxElement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s: Option<String>,
}

/// `{"type":1,"value":<elem>|"inf"}` or `{"type":2,"center":<elem>,"s":"p/q"}`.
impl Serialize for P1Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let js = match self {
            P1Point::Finite(a) => PointJson {
                kind: 1,
                value: Some(AffineOrInf::Element(a.clone())),
                center: None,
                s: None,
            },
            P1Point::Infinity => PointJson {
                kind: 1,
                value: Some(AffineOrInf::Inf(InfTag::Inf)),
                center: None,
                s: None,
            },
            P1Point::Type2(b) => PointJson {
                kind: 2,
                value: None,
                center: Some(b.center.clone()),
                s: Some(format_rational(&b.radius)),
            },
        };
        js.serialize(s)
    }
}

impl<'de> Deserialize<'de> for P1Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let js = PointJson::deserialize(d)?;
        match js.kind {
            1 => match js.value {
                Some(AffineOrInf::Inf(_)) => Ok(P1Point::Infinity),
                Some(AffineOrInf::Element(a)) => Ok(P1Point::Finite(a)),
                None => Err(D::Error::custom("type-1 point needs a `value`")),
            },
            2 => {
                let center = js.center.ok_or_else(|| D::Error::custom("type-2 point needs a `center`"))?;
                let s = js.s.ok_or_else(|| D::Error::custom("type-2 point needs `s`"))?;
                let s = parse_rational(&s).map_err(D::Error::custom)?;
                Ok(P1Point::type2(center, s))
            }
            k => Err(D::Error::custom(format!("unknown point type {k}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FactorJson {
    root: AffineOrInf,
    mult: i64,
}

#[derive(Serialize, Deserialize)]
struct FunctionJson {
    lead_val: String,
    #[serde(default)]
    factors: Vec<FactorJson>,
}

/// `{"lead_val":"p/q","factors":[{"root":<elem>|"inf","mult":int}]}`.
impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FunctionJson {
            lead_val: format_rational(&self.lead_val),
            factors: self
                .factors
                .iter()
                .map(|(p, m)| FactorJson {
                    root: match p {
                        P1Point::Finite(a) => AffineOrInf::Element(a.clone()),
                        _ => AffineOrInf::Inf(InfTag::Inf),
                    },
                    mult: *m,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let js = FunctionJson::deserialize(d)?;
        let lead_val = parse_rational(&js.lead_val).map_err(D::Error::custom)?;
        let factors = js
            .factors
            .into_iter()
            .map(|f| {
                let root = match f.root {
                    AffineOrInf::Inf(_) => P1Point::Infinity,
                    AffineOrInf::Element(a) => P1Point::Finite(a),
                };
                (root, f.mult)
            })
            .collect();
        RationalFunction::new(lead_val, factors).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    graph: MetricGraph,
    placement: BTreeMap<String, P1Point>,
    rays: BTreeMap<String, P1Point>,
    root: String,
}

impl Serialize for SkeletonTree {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TreeJson {
            graph: self.graph.clone(),
            placement: self
                .placement
                .iter()
                .map(|(k, v)| (k.clone(), P1Point::Type2(v.clone())))
                .collect(),
            rays: self.ray_target.clone(),
            root: self.root.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SkeletonTree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let js = TreeJson::deserialize(d)?;
        let mut placement = BTreeMap::new();
        for (k, v) in js.placement {
            let b = v.as_type2().map_err(D::Error::custom)?.clone();
            placement.insert(k, b);
        }
        if !placement.contains_key(&js.root) {
            return Err(D::Error::custom(format!("root `{}` has no placement", js.root)));
        }
        Ok(SkeletonTree {
            graph: js.graph,
            placement,
            ray_target: js.rays,
            root: js.root,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn el(s: &str) -> PuiseuxElement {
        s.parse().unwrap()
    }

    fn z(c: &str, s: i64) -> P1Point {
        P1Point::type2(el(c), int(s))
    }

    fn pt(c: &str) -> P1Point {
        P1Point::Finite(el(c))
    }

    #[test]
    fn canonical_type2_equality() {
        assert_eq!(z("t^2", 2), z("0", 2));
        assert_eq!(z("1 + t + t^3", 2), z("1 + t", 2));
        assert_ne!(z("t", 2), z("0", 2));
        assert_eq!(P1Point::gauss(), z("t", 0));
    }

    #[test]
    fn join_examples() {
        assert_eq!(join(&z("0", 2), &z("0", 5)).unwrap(), z("0", 2));
        assert_eq!(join(&z("0", 3), &z("t", 5)).unwrap(), z("0", 1));
        let x = z("1 + t", 3);
        assert_eq!(join(&x, &x).unwrap(), x);
        assert_eq!(join(&pt("t"), &pt("t")).unwrap(), pt("t"));
        assert_eq!(join(&pt("0"), &pt("t")).unwrap(), z("0", 1));
        assert_eq!(join(&pt("1"), &P1Point::Infinity), Err(BerkovichError::JoinWithInfinity));
    }

    #[test]
    fn path_distance_examples() {
        assert_eq!(path_distance(&z("0", 2), &z("0", 5)), ValQ::Finite(int(3)));
        assert_eq!(path_distance(&z("0", 3), &z("t", 5)), ValQ::Finite(int(6)));
        assert_eq!(path_distance(&pt("1"), &z("0", 0)), ValQ::Infinity);
        assert_eq!(path_distance(&pt("1"), &pt("1")), ValQ::Finite(int(0)));
    }

    #[test]
    fn eval_val_examples() {
        let f = RationalFunction::new(int(0), vec![(pt("0"), 1)]).unwrap();
        assert_eq!(f.eval_val(&P1Point::gauss()).unwrap(), int(0));
        let g = RationalFunction::new(int(0), vec![(pt("1"), 1), (pt("t"), 1), (pt("0"), -1)]).unwrap();
        assert_eq!(g.eval_val(&P1Point::type2(el("0"), rat(1, 2))).unwrap(), int(0));
        let c = RationalFunction::constant(int(7));
        assert_eq!(c.eval_val(&z("1 + t", 4)).unwrap(), int(7));
        assert!(matches!(f.eval_val(&pt("1")), Err(BerkovichError::NotType2(_))));
    }

    #[test]
    fn rational_function_validation() {
        assert!(RationalFunction::new(int(0), vec![(pt("0"), 0)]).is_err());
        assert!(RationalFunction::new(int(0), vec![(pt("0"), 1), (pt("0"), 2)]).is_err());
        assert!(RationalFunction::new(int(0), vec![(pt("0"), 1), (P1Point::Infinity, 1)]).is_err());
        let f = RationalFunction::new(int(0), vec![(pt("0"), 2), (P1Point::Infinity, -2)]).unwrap();
        assert_eq!(f.order_at_infinity(), -2);
        assert!(RationalFunction::new(int(0), vec![(z("0", 1), 1)]).is_err());
    }

    #[test]
    fn skeleton_of_gm() {
        let t = build_skeleton_tree(&[pt("0"), P1Point::Infinity], &[]).unwrap();
        assert_eq!(t.graph().vertices().len(), 1);
        assert!(t.graph().edges().is_empty());
        assert_eq!(t.graph().rays().len(), 2);
        assert_eq!(t.placement()["v0"], Type2Point::gauss());
    }

    #[test]
    fn skeleton_of_four_punctures() {
        let t = build_skeleton_tree(&[pt("0"), pt("1"), pt("t"), P1Point::Infinity], &[]).unwrap();
        let g = t.graph();
        assert_eq!(g.vertices().len(), 2);
        assert_eq!(t.placement()["v0"], Type2Point::gauss());
        assert_eq!(P1Point::Type2(t.placement()["v1"].clone()), z("0", 1));
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.edges()[0].length, int(1));
        assert_eq!(t.ray_base(&pt("1")), Some("v0"));
        assert_eq!(t.ray_base(&P1Point::Infinity), Some("v0"));
        assert_eq!(t.ray_base(&pt("0")), Some("v1"));
        assert_eq!(t.ray_base(&pt("t")), Some("v1"));
        assert_eq!(g.betti1(), 0);
    }

    #[test]
    fn extra_vertex_splits_the_line() {
        let t = build_skeleton_tree(&[pt("0"), P1Point::Infinity], &[z("0", 4)]).unwrap();
        let g = t.graph();
        assert_eq!(g.vertices().len(), 2);
        assert_eq!(g.edges()[0].length, int(4));
        assert_eq!(t.ray_base(&P1Point::Infinity), Some("v0"));
        assert_eq!(t.ray_base(&pt("0")), Some("v1"));
    }

    #[test]
    fn skeleton_without_infinity() {
        let t = build_skeleton_tree(&[pt("0"), pt("t^2"), pt("1")], &[]).unwrap();
        assert_eq!(t.root(), "v0");
        assert_eq!(t.graph().rays().len(), 3);
        assert!(!t.has_infinity());
        assert_eq!(t.retract(&P1Point::Infinity), P1Point::gauss());
        assert_eq!(t.retract(&pt("t^(-1)")), P1Point::gauss());
    }

    #[test]
    fn skeleton_errors() {
        assert_eq!(build_skeleton_tree(&[pt("0")], &[]), Err(BerkovichError::TooFewPunctures(1)));
        assert!(matches!(
            build_skeleton_tree(&[pt("0"), pt("0")], &[]),
            Err(BerkovichError::DuplicatePuncture(_))
        ));
        assert!(matches!(
            build_skeleton_tree(&[pt("0"), z("0", 1)], &[]),
            Err(BerkovichError::NotType1(_))
        ));
    }

    #[test]
    fn edge_lengths_are_path_distances() {
        let t = build_skeleton_tree(&[pt("0"), pt("1"), pt("t"), pt("t + t^(5/2)"), P1Point::Infinity], &[]).unwrap();
        for e in t.graph().edges() {
            let a = P1Point::Type2(t.placement()[&e.u].clone());
            let b = P1Point::Type2(t.placement()[&e.v].clone());
            assert_eq!(path_distance(&a, &b), ValQ::Finite(e.length.clone()));
        }
    }

    #[test]
    fn retraction_examples() {
        let t = build_skeleton_tree(&[pt("0"), pt("1"), pt("t"), P1Point::Infinity], &[]).unwrap();
        let on_tree = z("0", 1);
        assert_eq!(t.retract(&on_tree), on_tree);
        // zeta(t^2, 3) branches off the ray toward 0 at zeta(0, 2)
        assert_eq!(t.retract(&z("t^2", 3)), z("0", 2));
        assert_eq!(t.retract(&pt("1")), P1Point::gauss());
        assert_eq!(t.retract(&z("2", 5)), P1Point::gauss());
        assert_eq!(t.retract(&z("t^(-1)", 7)), z("0", -1));
    }

    #[test]
    fn points_on_edges_and_rays() {
        let t = build_skeleton_tree(&[pt("0"), pt("1"), pt("t"), P1Point::Infinity], &[]).unwrap();
        let mid = t.point_on_edge(0, &rat(1, 2)).unwrap();
        assert_eq!(mid, Type2Point::new(el("0"), rat(1, 2)));
        assert!(t.contains(&mid));
        let down = t.point_on_ray("t", &int(3)).unwrap();
        assert_eq!(down, Type2Point::new(el("t"), int(4)));
        let up = t.point_on_ray("inf", &int(3)).unwrap();
        assert_eq!(up, Type2Point::new(el("0"), int(-3)));
        assert!(t.contains(&up));
        assert!(!t.contains(&Type2Point::new(el("2"), int(1))));
    }

    #[test]
    fn json_round_trips() {
        let p: P1Point = serde_json::from_str(r#"{"type":2,"center":"t + t^3","s":"2"}"#).unwrap();
        assert_eq!(p, z("t", 2));
        let q: P1Point = serde_json::from_str(r#"{"type":1,"value":"inf"}"#).unwrap();
        assert_eq!(q, P1Point::Infinity);
        for x in [p, q, pt("1/2*t^(1/3)")] {
            let back: P1Point = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
            assert_eq!(back, x);
        }
        let f: RationalFunction = serde_json::from_str(
            r#"{"lead_val":"0","factors":[{"root":"0","mult":1},{"root":[{"exp":"1","coeff":"1"}],"mult":1},{"root":"1","mult":-2}]}"#,
        )
        .unwrap();
        assert_eq!(f.order_at(&pt("t")), 1);
        let back: RationalFunction = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
        let t = build_skeleton_tree(&[pt("0"), pt("1"), pt("t"), P1Point::Infinity], &[]).unwrap();
        let back: SkeletonTree = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
