//! Berkovich skeleta of punctured curves, computed exactly.
//!
//! The base field is finite Puiseux sums over `Q` with the `t`-adic
//! valuation. On top of it sit tropical Laurent polynomials, type-1 and
//! type-2 points of the Berkovich line, skeleton trees of `P^1` minus a finite
//! set, metric graphs with vertex weights and markings, stable reduction of
//! such graphs, and a certificate for the slope properties of `val f` on a
//! skeleton.

pub mod berkovich;
pub mod generate;
pub mod metric_graph;
pub mod oracle;
pub mod rational;
pub mod slope;
pub mod stable;
pub mod tropical;
pub mod valued_field;
pub mod selftest;
