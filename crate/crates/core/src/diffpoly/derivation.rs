use std::collections::BTreeMap;

use super::poly::{Generator, GradedPoly};
use crate::error::{Error, Result};

/// A graded derivation given by its action on zeroth-order generators.
///
/// The derivation commutes with `d_x` and with the formal `d_t`, so
/// `D(d_t^j d_x^k f) = d_t^j d_x^k D(f)`. Fields listed in `x_rules` are
/// constrained: their x-derivative is not a new jet variable but the given
/// polynomial (for instance `cm_x = 2*R*cm`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationRuleSet {
    pub name: String,
    pub odd: bool,
    pub base: BTreeMap<String, GradedPoly>,
    pub x_rules: BTreeMap<String, GradedPoly>,
}

impl DerivationRuleSet {
    pub fn new(name: impl Into<String>, odd: bool) -> Self {
        DerivationRuleSet { name: name.into(), odd, base: BTreeMap::new(), x_rules: BTreeMap::new() }
    }

    pub fn with_rule(mut self, field: &str, image: GradedPoly) -> Self {
        self.base.insert(field.to_string(), image);
        self
    }

    pub fn with_x_rule(mut self, field: &str, image: GradedPoly) -> Self {
        self.x_rules.insert(field.to_string(), image);
        self
    }

    pub fn rule(&self, field: &str) -> Option<&GradedPoly> {
        self.base.get(field)
    }

    /// Image of a single generator.
    pub fn image_of(&self, g: &Generator) -> Result<GradedPoly> {
        let base = self.base.get(&*g.field).ok_or_else(|| Error::MissingRule(g.base().to_string()))?;
        let mut p = base.clone();
        for _ in 0..g.x_order {
            p = p.dx_with(&self.x_rules);
        }
        for _ in 0..g.t_order {
            p = p.dt_formal();
        }
        Ok(p)
    }

    pub fn apply(&self, p: &GradedPoly) -> Result<GradedPoly> {
        p.derive(self.odd, |g| self.image_of(g))
    }
}

/// Total x-derivative, honouring the constrained generators of `rules`.
pub fn total_x_derivative(p: &GradedPoly, rules: Option<&DerivationRuleSet>) -> GradedPoly {
    match rules {
        Some(r) => p.dx_with(&r.x_rules),
        None => p.dx(),
    }
}

pub fn apply_derivation(p: &GradedPoly, d: &DerivationRuleSet) -> Result<GradedPoly> {
    d.apply(p)
}

/// Replaces every t-derivative marker by the corresponding x-prolongation of
/// the evolution right-hand side. Markers of order `j > 1` use the on-shell
/// time derivative repeatedly.
pub fn reduce_with(
    p: &GradedPoly,
    rhs: &BTreeMap<String, GradedPoly>,
    x_rules: &BTreeMap<String, GradedPoly>,
) -> Result<GradedPoly> {
    let mut cache: BTreeMap<(String, u32), GradedPoly> = BTreeMap::new();
    p.substitute(|g| {
        if g.t_order == 0 {
            return Ok(None);
        }
        let field = g.field.to_string();
        let mut dt = match cache.get(&(field.clone(), g.t_order)) {
            Some(d) => d.clone(),
            None => {
                let mut d = rhs.get(&field).cloned().ok_or_else(|| Error::UnknownTimeDerivative(g.to_string()))?;
                for _ in 1..g.t_order {
                    d = on_shell_dt(&d, rhs, x_rules)?;
                }
                cache.insert((field, g.t_order), d.clone());
                d
            }
        };
        for _ in 0..g.x_order {
            dt = dt.dx_with(x_rules);
        }
        Ok(Some(dt))
    })
}

/// Time derivative of a marker-free polynomial along the flow `rhs`.
pub fn on_shell_dt(
    p: &GradedPoly,
    rhs: &BTreeMap<String, GradedPoly>,
    x_rules: &BTreeMap<String, GradedPoly>,
) -> Result<GradedPoly> {
    let d = DerivationRuleSet { name: "dt".into(), odd: false, base: rhs.clone(), x_rules: x_rules.clone() };
    let raw = d.apply(p)?;
    if raw.has_time_markers() {
        reduce_with(&raw, rhs, x_rules)
    } else {
        Ok(raw)
    }
}

/// Variational derivative `sum_i (-1)^i d_x^i (dH/d f_i)` with respect to a
/// field of either parity (left derivative for odd fields).
pub fn variational_derivative(density: &GradedPoly, field: &str, odd: bool) -> GradedPoly {
    let Some(m) = density.max_x_order(field) else {
        return GradedPoly::zero();
    };
    let mut out = GradedPoly::zero();
    for i in 0..=m {
        let g = Generator { field: field.into(), t_order: 0, x_order: i, odd };
        let term = density.partial(&g).dx_n(i);
        out = if i % 2 == 0 { out.add(&term) } else { out.sub(&term) };
    }
    out
}

/// Euler operator (variational gradient) with respect to an even field.
pub fn euler_operator(density: &GradedPoly, field: &str) -> Result<GradedPoly> {
    let odd_same = density.generators().iter().any(|g| &*g.field == field && g.odd);
    if odd_same {
        return Err(Error::arg(format!("gradient is defined for even fields only; `{field}` is odd in this density")));
    }
    Ok(variational_derivative(density, field, false))
}

/// True if the density is a total x-derivative (up to constants), tested by
/// the vanishing of every variational derivative.
pub fn is_total_derivative(density: &GradedPoly) -> bool {
    let fields: BTreeMap<String, bool> =
        density.generators().into_iter().map(|g| (g.field.to_string(), g.odd)).collect();
    fields.iter().all(|(f, odd)| variational_derivative(density, f, *odd).is_zero())
}
