//! Newton-polygon calculus on annuli.
//!
//! A Laurent series `sum a_n T^n` on an annulus is seen through its
//! tropicalization: the finite set of pairs `(n, val a_n)`. At valuative
//! radius `s = val(T)` the supremum norm has valuation
//! `min_n (val a_n + n*s)`, a concave piecewise-affine function of `s` whose
//! pieces have integer slope `n`.
//!
//! Orientation: the coordinate `s` increases toward the center of the
//! annulus, and slopes are always reported in the direction of increasing
//! `s`. With `|x| = exp(-val x)` the function `s -> val f` is `-log|f|`, so
//! slope changes count poles minus zeros with no sign flip.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::{int, parse_rational, serde_rat, Compact, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TropicalError {
    #[error("a tropical Laurent polynomial needs at least one term")]
    Empty,
    #[error("invalid interval: {0}")]
    Interval(String),
    #[error("degree 0 does not induce a finite map of skeleta")]
    ZeroDegree,
}

/// One end of an interval on the extended real line.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    NegInf,
    Finite(Rat),
    PosInf,
}

impl Bound {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Bound::Finite(q) => Some(q),
            _ => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => f.write_str("-inf"),
            Bound::Finite(q) => write!(f, "{}", Compact(q)),
            Bound::PosInf => f.write_str("+inf"),
        }
    }
}

impl FromStr for Bound {
    type Err = TropicalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "-inf" => Ok(Bound::NegInf),
            "+inf" | "inf" => Ok(Bound::PosInf),
            other => parse_rational(other)
                .map(Bound::Finite)
                .map_err(|e| TropicalError::Interval(e.to_string())),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Bound::NegInf => s.serialize_str("-inf"),
            Bound::PosInf => s.serialize_str("+inf"),
            Bound::Finite(q) => s.serialize_str(&crate::rational::format_rational(q)),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// An interval of valuative radii, i.e. the tropicalization of a generalized
/// annulus. The degenerate interval `[c, c]` is a modulus-zero annulus.
///
/// Infinite ends are always open.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    lo: Bound,
    hi: Bound,
    lo_closed: bool,
    hi_closed: bool,
}

#[derive(Deserialize)]
struct IntervalJson {
    lo: Bound,
    hi: Bound,
    #[serde(default)]
    lo_closed: Option<bool>,
    #[serde(default)]
    hi_closed: Option<bool>,
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = IntervalJson::deserialize(d)?;
        let lo_closed = raw.lo_closed.unwrap_or(matches!(raw.lo, Bound::Finite(_)));
        let hi_closed = raw.hi_closed.unwrap_or(matches!(raw.hi, Bound::Finite(_)));
        Interval::new(raw.lo, raw.hi, lo_closed, hi_closed).map_err(serde::de::Error::custom)
    }
}

impl Interval {
    pub fn new(lo: Bound, hi: Bound, lo_closed: bool, hi_closed: bool) -> Result<Self, TropicalError> {
        if lo == Bound::PosInf || hi == Bound::NegInf {
            return Err(TropicalError::Interval(format!("bounds {lo}, {hi} are out of order")));
        }
        if lo > hi {
            return Err(TropicalError::Interval(format!("lower bound {lo} exceeds upper bound {hi}")));
        }
        let lo_closed = lo_closed && lo.finite().is_some();
        let hi_closed = hi_closed && hi.finite().is_some();
        if lo == hi && !(lo_closed && hi_closed) {
            return Err(TropicalError::Interval(format!("({lo}, {hi}) is empty")));
        }
        Ok(Self {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    /// The closed interval `[lo, hi]`.
    pub fn closed(lo: Rat, hi: Rat) -> Result<Self, TropicalError> {
        Self::new(Bound::Finite(lo), Bound::Finite(hi), true, true)
    }

    /// The whole line; the skeleton of `G_m`.
    pub fn whole_line() -> Self {
        Self {
            lo: Bound::NegInf,
            hi: Bound::PosInf,
            lo_closed: false,
            hi_closed: false,
        }
    }

    /// Parses `lo,hi` where each end is a rational or `-inf` / `+inf`;
    /// finite ends are closed.
    pub fn parse_pair(s: &str) -> Result<Self, TropicalError> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| TropicalError::Interval(format!("expected `lo,hi`, got `{s}`")))?;
        let lo: Bound = a.parse()?;
        let hi: Bound = b.parse()?;
        let lc = lo.finite().is_some();
        let hc = hi.finite().is_some();
        Self::new(lo, hi, lc, hc)
    }

    pub fn lo(&self) -> &Bound {
        &self.lo
    }

    pub fn hi(&self) -> &Bound {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    /// The logarithmic modulus `hi - lo`, or `None` for an unbounded interval.
    pub fn length(&self) -> Option<Rat> {
        Some(self.hi.finite()? - self.lo.finite()?)
    }

    pub fn contains_interior(&self, s: &Rat) -> bool {
        let above_lo = match &self.lo {
            Bound::Finite(a) => s > a,
            _ => true,
        };
        let below_hi = match &self.hi {
            Bound::Finite(b) => s < b,
            _ => true,
        };
        above_lo && below_hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_closed { '[' } else { '(' };
        let close = if self.hi_closed { ']' } else { ')' };
        write!(f, "{open}{}, {}{close}", self.lo, self.hi)
    }
}

/// A point where the minimizing term changes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Breakpoint {
    #[serde(with = "serde_rat")]
    pub s: Rat,
    pub slope_left: i64,
    pub slope_right: i64,
}

impl Breakpoint {
    /// `slope_right - slope_left`.
    pub fn slope_change(&self) -> i64 {
        self.slope_right - self.slope_left
    }
}

/// The Newton-polygon shadow of a Laurent series: exponent `n` mapped to the
/// (finite) valuation of its coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalLaurent {
    terms: BTreeMap<i64, Rat>,
}

impl TropicalLaurent {
    pub fn new(terms: BTreeMap<i64, Rat>) -> Result<Self, TropicalError> {
        if terms.is_empty() {
            return Err(TropicalError::Empty);
        }
        Ok(Self { terms })
    }

    pub fn from_pairs<I: IntoIterator<Item = (i64, Rat)>>(pairs: I) -> Result<Self, TropicalError> {
        Self::new(pairs.into_iter().collect())
    }

    pub fn terms(&self) -> &BTreeMap<i64, Rat> {
        &self.terms
    }

    fn max_exponent(&self) -> i64 {
        *self.terms.keys().next_back().expect("nonempty")
    }

    fn min_exponent(&self) -> i64 {
        *self.terms.keys().next().expect("nonempty")
    }

    /// `min_n (v_n + n*s)`.
    pub fn eval(&self, s: &Rat) -> Rat {
        self.terms
            .iter()
            .map(|(&n, v)| v + int(n) * s)
            .min()
            .expect("nonempty")
    }

    /// Exponents attaining the minimum at `s`, ascending.
    pub fn minimizers(&self, s: &Rat) -> Vec<i64> {
        let best = self.eval(s);
        self.terms
            .iter()
            .filter(|(&n, v)| *v + int(n) * s == best)
            .map(|(&n, _)| n)
            .collect()
    }

    /// Slope just left of `s`: the largest tied exponent.
    pub fn slope_left_at(&self, s: &Rat) -> i64 {
        *self.minimizers(s).last().expect("nonempty")
    }

    /// Slope just right of `s`: the smallest tied exponent.
    pub fn slope_right_at(&self, s: &Rat) -> i64 {
        self.minimizers(s)[0]
    }

    /// Breakpoints strictly inside `interval`, ascending.
    pub fn breakpoints(&self, interval: &Interval) -> Vec<Breakpoint> {
        let mut current = match interval.lo() {
            Bound::Finite(a) => self.slope_right_at(a),
            _ => self.max_exponent(),
        };
        let mut out = Vec::new();
        loop {
            let v_cur = &self.terms[&current];
            // Every line of smaller slope meets the current piece strictly to
            // the right of the current position; the nearest one takes over.
            let mut next: Option<(Rat, i64)> = None;
            for (&m, v_m) in self.terms.range(..current) {
                let s = (v_m - v_cur) / int(current - m);
                let better = match &next {
                    None => true,
                    Some((bs, bm)) => s < *bs || (s == *bs && m < *bm),
                };
                if better {
                    next = Some((s, m));
                }
            }
            let Some((s, m)) = next else { break };
            if let Bound::Finite(hi) = interval.hi() {
                if s >= *hi {
                    break;
                }
            }
            out.push(Breakpoint {
                s,
                slope_left: current,
                slope_right: m,
            });
            current = m;
        }
        out
    }

    /// The unique minimizer on the `lo` side of `interval`, if any.
    fn lower_end_minimizer(&self, interval: &Interval) -> Option<i64> {
        match interval.lo() {
            Bound::NegInf => Some(self.max_exponent()),
            Bound::Finite(a) if interval.lo_closed() => strict_single(self.minimizers(a)),
            Bound::Finite(a) => Some(self.slope_right_at(a)),
            Bound::PosInf => None,
        }
    }

    fn upper_end_minimizer(&self, interval: &Interval) -> Option<i64> {
        match interval.hi() {
            Bound::PosInf => Some(self.min_exponent()),
            Bound::Finite(b) if interval.hi_closed() => strict_single(self.minimizers(b)),
            Bound::Finite(b) => Some(self.slope_left_at(b)),
            Bound::NegInf => None,
        }
    }

    /// `(d, val alpha)` when a single term `alpha * T^d` strictly dominates on
    /// all of `interval`, i.e. the function is a unit `alpha T^d (1 + g)` with
    /// `|g| < 1` there. Returns `None` when some point of the interval (closed
    /// ends included) has a tie, which means a zero on that circle.
    pub fn unit_decomposition(&self, interval: &Interval) -> Option<(i64, Rat)> {
        // The set where one line is the strict minimum is convex, so both
        // ends agreeing on the same strict minimizer covers the interior.
        let lo = self.lower_end_minimizer(interval)?;
        let hi = self.upper_end_minimizer(interval)?;
        (lo == hi).then(|| (lo, self.terms[&lo].clone()))
    }
}

fn strict_single(minimizers: Vec<i64>) -> Option<i64> {
    match minimizers.as_slice() {
        [n] => Some(*n),
        _ => None,
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    n: i64,
    #[serde(with = "serde_rat")]
    v: Rat,
}

#[derive(Serialize, Deserialize)]
struct LaurentJson {
    terms: Vec<TermJson>,
}

impl Serialize for TropicalLaurent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LaurentJson {
            terms: self
                .terms
                .iter()
                .map(|(&n, v)| TermJson { n, v: v.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TropicalLaurent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = LaurentJson::deserialize(d)?;
        let mut terms = BTreeMap::new();
        for t in raw.terms {
            if terms.insert(t.n, t.v).is_some() {
                return Err(serde::de::Error::custom(format!("exponent {} listed twice", t.n)));
            }
        }
        TropicalLaurent::new(terms).map_err(serde::de::Error::custom)
    }
}

/// `F = T_num - T_den`: the valuation of a quotient of two Laurent series.
///
/// Its slope may go up (poles) as well as down (zeros).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalQuotient {
    pub num: TropicalLaurent,
    pub den: TropicalLaurent,
}

impl TropicalQuotient {
    pub fn eval(&self, s: &Rat) -> Rat {
        self.num.eval(s) - self.den.eval(s)
    }

    pub fn slope_left_at(&self, s: &Rat) -> i64 {
        self.num.slope_left_at(s) - self.den.slope_left_at(s)
    }

    pub fn slope_right_at(&self, s: &Rat) -> i64 {
        self.num.slope_right_at(s) - self.den.slope_right_at(s)
    }

    /// Points inside `interval` where the slope actually changes.
    pub fn breakpoints(&self, interval: &Interval) -> Vec<Breakpoint> {
        let candidates: BTreeSet<Rat> = self
            .num
            .breakpoints(interval)
            .into_iter()
            .chain(self.den.breakpoints(interval))
            .map(|b| b.s)
            .collect();
        candidates
            .into_iter()
            .filter_map(|s| {
                let slope_left = self.slope_left_at(&s);
                let slope_right = self.slope_right_at(&s);
                (slope_left != slope_right).then_some(Breakpoint {
                    s,
                    slope_left,
                    slope_right,
                })
            })
            .collect()
    }
}

/// Slope change `F'(s+) - F'(s-)` predicted from zero/pole data: the number
/// of poles minus the number of zeros whose valuation is exactly `s`.
///
/// Each entry is `(valuation, multiplicity)`; positive multiplicities are
/// zeros and negative ones poles.
pub fn slope_change_count(zeros_poles: &[(Rat, i64)], s: &Rat) -> i64 {
    -zeros_poles
        .iter()
        .filter(|(v, _)| v == s)
        .map(|(_, m)| m)
        .sum::<i64>()
}

/// Image of a skeleton interval under a unit `alpha T^d (1 + g)`:
/// `s -> d*s + val alpha`, reversed when `d < 0`.
pub fn map_skeleton(d: i64, val_alpha: &Rat, interval: &Interval) -> Result<Interval, TropicalError> {
    if d == 0 {
        return Err(TropicalError::ZeroDegree);
    }
    let image = |b: &Bound| match b {
        Bound::Finite(q) => Bound::Finite(int(d) * q + val_alpha),
        Bound::NegInf if d > 0 => Bound::NegInf,
        Bound::NegInf => Bound::PosInf,
        Bound::PosInf if d > 0 => Bound::PosInf,
        Bound::PosInf => Bound::NegInf,
    };
    let lo = image(interval.lo());
    let hi = image(interval.hi());
    if d.is_positive() {
        Interval::new(lo, hi, interval.lo_closed(), interval.hi_closed())
    } else {
        Interval::new(hi, lo, interval.hi_closed(), interval.lo_closed())
    }
}

impl TropicalLaurent {
    /// Adds `by` to every coefficient valuation (multiplication by a
    /// constant of valuation `by`).
    pub fn shifted(&self, by: &Rat) -> Self {
        Self {
            terms: self.terms.iter().map(|(&n, v)| (n, v + by)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn laurent(pairs: &[(i64, Rat)]) -> TropicalLaurent {
        TropicalLaurent::from_pairs(pairs.iter().cloned()).unwrap()
    }

    fn closed(a: i64, b: i64) -> Interval {
        Interval::closed(int(a), int(b)).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(laurent(&[(1, int(0))]).eval(&int(5)), int(5));
        assert_eq!(laurent(&[(0, int(1)), (1, int(0))]).eval(&int(3)), int(1));
        // 2 - 1/2, 0 + 0, 1 + 1 -> 0
        let f = laurent(&[(-1, int(2)), (0, int(0)), (2, int(1))]);
        assert_eq!(f.eval(&rat(1, 2)), int(0));
    }

    #[test]
    fn breakpoint_examples() {
        let f = laurent(&[(0, int(1)), (1, int(0))]);
        assert_eq!(
            f.breakpoints(&closed(0, 3)),
            vec![Breakpoint { s: int(1), slope_left: 1, slope_right: 0 }]
        );
        assert!(laurent(&[(1, int(0))]).breakpoints(&closed(-7, 7)).is_empty());
        assert!(laurent(&[(1, int(0))]).breakpoints(&Interval::whole_line()).is_empty());
        let g = laurent(&[(0, int(3)), (1, int(1)), (2, int(0))]);
        assert_eq!(
            g.breakpoints(&closed(0, 5)),
            vec![
                Breakpoint { s: int(1), slope_left: 2, slope_right: 1 },
                Breakpoint { s: int(2), slope_left: 1, slope_right: 0 },
            ]
        );
    }

    #[test]
    fn breakpoints_exclude_interval_ends() {
        let f = laurent(&[(0, int(1)), (1, int(0))]);
        assert!(f.breakpoints(&closed(1, 3)).is_empty());
        assert!(f.breakpoints(&closed(0, 1)).is_empty());
        assert!(f.breakpoints(&closed(1, 1)).is_empty());
    }

    #[test]
    fn breakpoints_skip_dominated_terms() {
        // the middle term never reaches the envelope
        let f = laurent(&[(0, int(0)), (1, int(5)), (2, int(0))]);
        assert_eq!(
            f.breakpoints(&Interval::whole_line()),
            vec![Breakpoint { s: int(0), slope_left: 2, slope_right: 0 }]
        );
    }

    #[test]
    fn slope_change_examples() {
        assert_eq!(slope_change_count(&[(int(1), 1)], &int(1)), -1);
        assert_eq!(slope_change_count(&[(int(1), -1)], &int(1)), 1);
        assert_eq!(slope_change_count(&[(int(2), 1), (int(2), -1)], &int(2)), 0);
        assert_eq!(slope_change_count(&[(int(2), 1)], &int(3)), 0);
    }

    #[test]
    fn unit_decomposition_examples() {
        assert_eq!(laurent(&[(2, int(1))]).unit_decomposition(&closed(0, 2)), Some((2, int(1))));
        assert_eq!(laurent(&[(0, int(1)), (1, int(0))]).unit_decomposition(&closed(0, 2)), None);
        assert_eq!(laurent(&[(0, int(0)), (1, int(0))]).unit_decomposition(&closed(0, 2)), None);
    }

    #[test]
    fn unit_decomposition_respects_open_ends() {
        // 1 + T ties only at s = 0
        let f = laurent(&[(0, int(0)), (1, int(0))]);
        let half_open = Interval::new(Bound::Finite(int(0)), Bound::Finite(int(2)), false, true).unwrap();
        assert_eq!(f.unit_decomposition(&half_open), Some((0, int(0))));
        let ray = Interval::new(Bound::Finite(int(1)), Bound::PosInf, true, false).unwrap();
        assert_eq!(f.unit_decomposition(&ray), Some((0, int(0))));
        assert_eq!(f.unit_decomposition(&Interval::whole_line()), None);
        assert_eq!(laurent(&[(3, int(2))]).unit_decomposition(&Interval::whole_line()), Some((3, int(2))));
    }

    #[test]
    fn degenerate_interval() {
        let f = laurent(&[(0, int(1)), (1, int(0))]);
        assert_eq!(f.unit_decomposition(&closed(0, 0)), Some((1, int(0))));
        assert_eq!(f.unit_decomposition(&closed(1, 1)), None);
        assert!(Interval::new(Bound::Finite(int(1)), Bound::Finite(int(1)), false, true).is_err());
    }

    #[test]
    fn map_skeleton_examples() {
        assert_eq!(map_skeleton(2, &int(1), &closed(0, 2)).unwrap(), closed(1, 5));
        assert_eq!(map_skeleton(-1, &int(0), &closed(0, 3)).unwrap(), closed(-3, 0));
        let i = Interval::closed(rat(1, 3), rat(7, 2)).unwrap();
        assert_eq!(map_skeleton(1, &int(0), &i).unwrap(), i);
        assert_eq!(map_skeleton(0, &int(0), &i), Err(TropicalError::ZeroDegree));
        let ray = Interval::new(Bound::Finite(int(0)), Bound::PosInf, true, false).unwrap();
        let img = map_skeleton(-2, &int(1), &ray).unwrap();
        assert_eq!(img.lo(), &Bound::NegInf);
        assert_eq!(img.hi(), &Bound::Finite(int(1)));
        assert!(img.hi_closed());
    }

    #[test]
    fn interval_parsing_and_json() {
        assert_eq!(Interval::parse_pair("0,3").unwrap(), closed(0, 3));
        let i = Interval::parse_pair("-inf, +inf").unwrap();
        assert_eq!(i, Interval::whole_line());
        assert!(Interval::parse_pair("3,0").is_err());
        assert!(Interval::parse_pair("3").is_err());
        let js: Interval = serde_json::from_str(r#"{"lo":"1/2","hi":"+inf"}"#).unwrap();
        assert_eq!(js.lo(), &Bound::Finite(rat(1, 2)));
        assert!(js.lo_closed() && !js.hi_closed());
    }

    #[test]
    fn laurent_json() {
        let f: TropicalLaurent =
            serde_json::from_str(r#"{"terms":[{"n":0,"v":"1"},{"n":1,"v":"0/1"}]}"#).unwrap();
        assert_eq!(f, laurent(&[(0, int(1)), (1, int(0))]));
        let back: TropicalLaurent = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<TropicalLaurent>(r#"{"terms":[]}"#).is_err());
        assert!(serde_json::from_str::<TropicalLaurent>(
            r#"{"terms":[{"n":0,"v":"1"},{"n":0,"v":"2"}]}"#
        )
        .is_err());
    }

    #[test]
    fn quotient_slopes() {
        // F = min(s, 1) - min(s, 2): zero at valuation 1, pole at valuation 2
        let q = TropicalQuotient {
            num: laurent(&[(0, int(1)), (1, int(0))]),
            den: laurent(&[(0, int(2)), (1, int(0))]),
        };
        let bps = q.breakpoints(&Interval::whole_line());
        assert_eq!(bps.len(), 2);
        assert_eq!(bps[0].slope_change(), -1);
        assert_eq!(bps[1].slope_change(), 1);
        assert_eq!(q.eval(&int(5)), int(-1));
    }
}
