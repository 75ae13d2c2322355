//! Recentering Newton-polygon oracle.
//!
//! Evaluates `val f` at a type-2 point without the factored min-formula:
//! numerator and denominator are expanded as honest polynomials in
//! `u = T - center` with Puiseux coefficients, each is tropicalized, and the
//! Gauss norm of the ball is read off the resulting Newton data. It shares
//! no code path with [`RationalFunction::eval_val`] beyond field arithmetic.

use crate::berkovich::{RationalFunction, Type2Point};
use crate::rational::Rat;
use crate::tropical::{TropicalLaurent, TropicalQuotient};
use crate::valued_field::{PuiseuxElement, ValQ};

/// A polynomial in one variable with Puiseux coefficients, lowest degree
/// first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<PuiseuxElement>,
}

impl Polynomial {
    pub fn one() -> Self {
        Self {
            coeffs: vec![PuiseuxElement::one()],
        }
    }

    /// `u + shift`.
    pub fn linear(shift: PuiseuxElement) -> Self {
        Self {
            coeffs: vec![shift, PuiseuxElement::one()],
        }
    }

    pub fn coeffs(&self) -> &[PuiseuxElement] {
        &self.coeffs
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![PuiseuxElement::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Polynomial { coeffs: out }
    }

    /// `(n, val c_n)` for every nonzero coefficient.
    pub fn tropicalize(&self) -> TropicalLaurent {
        TropicalLaurent::from_pairs(self.coeffs.iter().enumerate().filter_map(|(n, c)| match c.valuation() {
            ValQ::Finite(v) => Some((n as i64, v)),
            ValQ::Infinity => None,
        }))
        .expect("a product of monic factors is nonzero")
    }
}

/// Numerator and denominator of `f / c` expanded in `u = T - center`.
pub fn expand_about(f: &RationalFunction, center: &PuiseuxElement) -> (Polynomial, Polynomial) {
    let mut num = Polynomial::one();
    let mut den = Polynomial::one();
    for (root, mult) in f.finite_factors() {
        let factor = Polynomial::linear(center - root);
        let target = if mult > 0 { &mut num } else { &mut den };
        for _ in 0..mult.unsigned_abs() {
            *target = target.mul(&factor);
        }
    }
    (num, den)
}

/// Newton data of `f` around `center`, leading constant included.
pub fn newton_quotient(f: &RationalFunction, center: &PuiseuxElement) -> TropicalQuotient {
    let (num, den) = expand_about(f, center);
    TropicalQuotient {
        num: num.tropicalize().shifted(f.lead_val()),
        den: den.tropicalize(),
    }
}

/// `val f` at the Gauss point of a ball, through the recentered expansion.
pub fn recentered_eval(f: &RationalFunction, x: &Type2Point) -> Rat {
    newton_quotient(f, x.center()).eval(x.radius())
}
