//! Exact Grassmann-graded differential-polynomial algebra.
//!
//! Polynomials are built from jet variables `d_t^j d_x^k f` of named fields.
//! Odd fields anticommute and square to zero; zeroth-order even generators
//! may carry rational (or parameter-affine) exponents, which is what the
//! `T^beta` and `u^(1 - alpha)` families need. All arithmetic is exact.

mod coeff;
mod derivation;
mod parse;
mod poly;

pub use coeff::{q, qf, Coeff, Exponent, ParamMonomial, Q};
pub use derivation::{
    apply_derivation, euler_operator, is_total_derivative, on_shell_dt, reduce_with, total_x_derivative,
    variational_derivative, DerivationRuleSet,
};
pub use parse::{parse, parse_params, parse_rational, parse_with, Declarations};
pub use poly::{Generator, GradedPoly, Monomial};

pub(crate) use coeff::{fmt_q, q_to_f64};

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use proptest::prelude::*;

    /// Random polynomials over a small pool: even `u, v` and odd `c, d`,
    /// up to third derivatives, small integer coefficients.
    pub fn arb_poly(max_terms: usize) -> impl Strategy<Value = GradedPoly> {
        let gen = (0usize..4, 0u32..4).prop_map(|(f, k)| match f {
            0 => Generator::even("u", k),
            1 => Generator::even("v", k),
            2 => Generator::odd("c", k),
            _ => Generator::odd("d", k),
        });
        let mono = (-4i64..=4, prop::collection::vec((gen, 1i64..3), 0..4)).prop_map(|(c, factors)| {
            factors
                .into_iter()
                .fold(GradedPoly::int(c), |acc, (g, e)| acc.mul(&GradedPoly::power_of(g, Exponent::int(e)).unwrap()))
        });
        prop::collection::vec(mono, 0..max_terms).prop_map(|ms| ms.iter().fold(GradedPoly::zero(), |a, m| a.add(m)))
    }

    /// Parity-homogeneous part of a random polynomial.
    pub fn homogeneous(p: &GradedPoly, odd: bool) -> GradedPoly {
        let mut out = GradedPoly::zero();
        for (m, c) in p.terms() {
            if m.is_odd() == odd {
                out = out.add(&GradedPoly::monomial(m.clone(), c.clone()));
            }
        }
        out
    }
}
