//! Pointwise evaluation of differential polynomials on grid data.

use std::collections::BTreeMap;

use crate::diffpoly::{q_to_f64, GradedPoly};
use crate::error::{Error, Result};

/// Jet arrays per field, `jets[field][k]` is the k-th x-derivative.
pub(crate) type JetTable = BTreeMap<String, Vec<Vec<f64>>>;

#[derive(Clone, Debug)]
enum Power {
    Int(i32),
    Real(f64),
}

#[derive(Clone, Debug)]
struct Term {
    coef: f64,
    factors: Vec<(String, u32, Power)>,
}

/// A polynomial with numeric coefficients, at most linear in odd generators.
#[derive(Clone, Debug, Default)]
pub(crate) struct Compiled {
    terms: Vec<Term>,
}

impl Compiled {
    pub fn new(p: &GradedPoly) -> Result<Self> {
        let mut terms = Vec::new();
        for (m, c) in p.terms() {
            let coef = c
                .as_constant()
                .ok_or_else(|| Error::NotNumeric(format!("coefficient `{c}` still depends on parameters")))?;
            if m.odd_part().len() > 1 {
                return Err(Error::NotNumeric(format!(
                    "term of `{p}` is quadratic in odd generators; a single ghost coefficient cannot represent it"
                )));
            }
            let mut factors = Vec::new();
            for (g, e) in m.even_part() {
                if g.t_order > 0 {
                    return Err(Error::NotNumeric(format!("time derivative `{g}` left in expression")));
                }
                let pw = match (e.as_integer(), e.as_constant()) {
                    (Some(i), _) => Power::Int(i as i32),
                    (None, Some(r)) => Power::Real(q_to_f64(r)),
                    _ => return Err(Error::NotNumeric(format!("exponent `{e}` of `{g}` depends on parameters"))),
                };
                factors.push((g.field.to_string(), g.x_order, pw));
            }
            for g in m.odd_part() {
                if g.t_order > 0 {
                    return Err(Error::NotNumeric(format!("time derivative `{g}` left in expression")));
                }
                factors.push((g.field.to_string(), g.x_order, Power::Int(1)));
            }
            terms.push(Term { coef: q_to_f64(&coef), factors });
        }
        Ok(Compiled { terms })
    }

    /// Highest derivative order needed per field.
    pub fn orders(&self) -> BTreeMap<String, u32> {
        let mut out: BTreeMap<String, u32> = BTreeMap::new();
        for t in &self.terms {
            for (f, k, _) in &t.factors {
                let e = out.entry(f.clone()).or_insert(0);
                *e = (*e).max(*k);
            }
        }
        out
    }

    pub fn eval(&self, jets: &JetTable, n: usize) -> Result<Vec<f64>> {
        let mut out = vec![0.0; n];
        for t in &self.terms {
            let mut acc = vec![t.coef; n];
            for (f, k, pw) in &t.factors {
                let arr = jets
                    .get(f)
                    .and_then(|j| j.get(*k as usize))
                    .ok_or_else(|| Error::arg(format!("field `{f}` (derivative {k}) is not available")))?;
                match pw {
                    Power::Int(1) => acc.iter_mut().zip(arr).for_each(|(a, v)| *a *= v),
                    Power::Int(i) => acc.iter_mut().zip(arr).for_each(|(a, v)| *a *= v.powi(*i)),
                    Power::Real(r) => acc.iter_mut().zip(arr).for_each(|(a, v)| *a *= v.powf(*r)),
                }
            }
            out.iter_mut().zip(&acc).for_each(|(o, a)| *o += a);
        }
        Ok(out)
    }
}
