use std::collections::BTreeMap;

use super::CheckReport;
use crate::diffpoly::{euler_operator, parse_params, variational_derivative, DerivationRuleSet, Generator, GradedPoly};
use crate::error::{Error, Result};
use crate::reductions::{build_system, miura_u_of_r, upsilon, v_of_w, ConservedDensity, EvolutionSystem};
use crate::sl2::{CanonicalFieldSet, Sl2Algebra};

const NILPOTENCY_REF: &str = "nilpotency of the BRST derivation on the canonical fields and on the gauge-fixed ghost";
const UPSILON_REF: &str = "covariance of the residual Upsilon under the reduced BRST rules";
pub(super) const INVARIANCE_REF: &str = "exact BRST symmetry of the coupled field and ghost equations";
const GRADIENT_REF: &str = "the variational gradient of a conserved density solves the ghost equation";
const EQUIVALENCE_REF: &str = "mKdV and CKdV ghost equations coincide with the KdV ghost equation under Miura maps";

fn terms(p: &GradedPoly) -> f64 {
    p.len() as f64
}

fn sys(name: &str, params: &str) -> Result<EvolutionSystem> {
    build_system(name, &parse_params(params)?)
}

/// Nilpotency with the standard algebra.
pub fn check_nilpotency() -> Result<CheckReport> {
    check_nilpotency_with(&Sl2Algebra::standard())
}

/// Applies the derivation twice to all twelve canonical generators built
/// from `algebra`, to the reduced ghost, and to `u` in the `(alpha, s)`
/// family at `(1, 2)` and `(-2, 1)`.
pub fn check_nilpotency_with(algebra: &Sl2Algebra) -> Result<CheckReport> {
    let rules = algebra.canonical_brst_rules();
    let mut nonzero = 0usize;
    let mut canonical_terms = 0usize;
    let fields = CanonicalFieldSet::new().all();
    for g in &fields {
        let once = rules.image_of(g)?;
        let twice = rules.apply(&once)?;
        if !twice.is_zero() {
            nonzero += 1;
            canonical_terms += twice.len();
        }
    }
    let mut metrics = BTreeMap::new();
    metrics.insert("canonical_nonzero_generators".to_string(), nonzero as f64);
    metrics.insert("canonical_terms".to_string(), canonical_terms as f64);

    let kdv = sys("alpha-form", "alpha=1,s=2")?;
    let c = GradedPoly::generator(Generator::odd("c", 0));
    metrics.insert("ghost_terms".to_string(), terms(&kdv.brst.apply(&kdv.brst.apply(&c)?)?));

    for (label, params) in [("u_terms_alpha_1_s_2", "alpha=1,s=2"), ("u_terms_alpha_-2_s_1", "alpha=-2,s=1")] {
        let s = sys("alpha-form", params)?;
        let u = GradedPoly::generator(Generator::even("u", 0));
        let twice = s.brst.apply(&s.brst.apply(&u)?)?;
        metrics.insert(label.to_string(), terms(&s.reduce_on_shell(&twice)?));
    }
    let zeroed = fields.len() - nonzero;
    Ok(CheckReport::from_metrics("check_nilpotency", metrics, 0.0, NILPOTENCY_REF)
        .with_note(format!("{zeroed}/{} canonical generators annihilated", fields.len())))
}

/// Covariance of `Upsilon` under the rules of the `upsilon` system.
pub fn check_upsilon_covariance() -> Result<CheckReport> {
    check_upsilon_covariance_with(&sys("upsilon", "")?.brst)
}

/// `d(Upsilon) - 2 Upsilon c_x - Upsilon_x c` with time markers kept, plus
/// the commutation of the derivation with `d_x` on `Upsilon`.
pub fn check_upsilon_covariance_with(rules: &DerivationRuleSet) -> Result<CheckReport> {
    let ups = upsilon();
    let c = |k| GradedPoly::generator(Generator::odd("c", k));
    let image = rules.apply(&ups)?;
    let expected = ups.mul(&c(1)).scale_q(&crate::diffpoly::q(2)).add(&ups.dx().mul(&c(0)));
    let commutator = rules.apply(&ups.dx())?.sub(&image.dx_with(&rules.x_rules));
    let mut metrics = BTreeMap::new();
    metrics.insert("difference_terms".to_string(), terms(&image.sub(&expected)));
    metrics.insert("dx_commutation_terms".to_string(), terms(&commutator));
    Ok(CheckReport::from_metrics("check_upsilon_covariance", metrics, 0.0, UPSILON_REF))
}

/// The systems named by the invariance statement.
pub fn invariance_systems() -> Result<Vec<(String, EvolutionSystem)>> {
    Ok(vec![
        ("alpha-form(alpha=1,s=2)".to_string(), sys("alpha-form", "alpha=1,s=2")?),
        ("alpha-form(alpha=-2,s=1)".to_string(), sys("alpha-form", "alpha=-2,s=1")?),
        ("t-form(beta=1,s=2)".to_string(), sys("t-form", "beta=1,s=2")?),
        ("t-form(beta=1/2,s=1)".to_string(), sys("harry-dym", "")?),
    ])
}

/// The derivation applied to every equation residual, reduced on-shell.
pub fn check_system_invariance(system: &EvolutionSystem) -> Result<CheckReport> {
    let mut metrics = BTreeMap::new();
    for eq in &system.equations {
        let r = system.residual(&eq.field)?;
        let image = system.brst.apply(&r)?;
        metrics.insert(format!("{}_terms", eq.field), terms(&system.reduce_on_shell(&image)?));
    }
    Ok(CheckReport::from_metrics("check_system_invariance", metrics, 0.0, INVARIANCE_REF))
}

/// Substitutes the variational gradient of `density` for the ghost in the
/// ghost residual. Conservation of the density is checked first; when it
/// fails the report is marked `PremiseFailed`.
pub fn check_gradient_ghost(density: &ConservedDensity, system: &EvolutionSystem) -> Result<CheckReport> {
    if density.density.generators().iter().any(|g| g.odd) {
        return Err(Error::arg(format!("density `{}` contains a ghost", density.name)));
    }
    let (&[field], &[ghost]) = (system.even_fields().as_slice(), system.ghost_fields().as_slice()) else {
        return Err(Error::arg(format!("system `{}` needs exactly one field and one ghost", system.name)));
    };

    let dt = system.reduce_on_shell(&density.density.dt_formal())?;
    let premise = variational_derivative(&dt, field, false);
    let mut metrics = BTreeMap::new();
    metrics.insert("premise_terms".to_string(), terms(&premise));
    if !premise.is_zero() {
        let mut r = CheckReport::from_metrics("check_gradient_ghost", metrics, 0.0, GRADIENT_REF);
        r.status = super::CheckStatus::PremiseFailed;
        return Ok(r.with_note(format!("density `{}` is not conserved", density.name)));
    }

    let gradient = euler_operator(&density.density, field)?;
    let residual = system.residual(ghost)?.substitute(|g| {
        if &*g.field != ghost {
            return Ok(None);
        }
        let mut p = gradient.dx_n(g.x_order);
        for _ in 0..g.t_order {
            p = p.dt_formal();
        }
        Ok(Some(p))
    })?;
    metrics.insert("ghost_residual_terms".to_string(), terms(&system.reduce_on_shell(&residual)?));
    Ok(CheckReport::from_metrics("check_gradient_ghost", metrics, 0.0, GRADIENT_REF))
}

pub(super) fn gradient_ghost_default() -> Result<CheckReport> {
    let mut parts = Vec::new();
    for (label, name, params) in [
        ("t-form(symbolic)", "t-form", ""),
        ("t-form(beta=1,s=2)", "t-form", "beta=1,s=2"),
        ("t-form(beta=1/2,s=1)", "harry-dym", ""),
        ("kdv", "kdv", ""),
    ] {
        let s = sys(name, params)?;
        for d in ["H0", "H1"] {
            parts.push((format!("{label}/{d}"), check_gradient_ghost(s.density(d)?, &s)?));
        }
    }
    Ok(CheckReport::merge("check_gradient_ghost", GRADIENT_REF, parts))
}

/// KdV ghost right-hand side with `u` replaced by `u_of`.
fn kdv_ghost_under(u_of: &GradedPoly) -> Result<GradedPoly> {
    let kdv = sys("kdv", "")?;
    let rhs = &kdv.equation("c").expect("kdv has a ghost equation").rhs;
    rhs.substitute(|g| Ok((&*g.field == "u").then(|| u_of.dx_n(g.x_order))))
}

/// Differences between the mKdV / CKdV ghost equations and the KdV ghost
/// equation pulled back through the Miura maps.
pub fn check_ghost_equivalence() -> Result<CheckReport> {
    let mkdv = sys("mkdv", "")?;
    let ckdv = sys("ckdv", "")?;
    let u_of_w = miura_u_of_r("v").substitute(|g| Ok((&*g.field == "v").then(|| v_of_w().dx_n(g.x_order))))?;
    let mut metrics = BTreeMap::new();
    let m = kdv_ghost_under(&miura_u_of_r("R"))?.sub(&mkdv.equation("c").expect("mkdv ghost").rhs);
    let c = kdv_ghost_under(&u_of_w)?.sub(&ckdv.equation("c").expect("ckdv ghost").rhs);
    metrics.insert("mkdv_difference_terms".to_string(), terms(&m));
    metrics.insert("ckdv_difference_terms".to_string(), terms(&c));
    Ok(CheckReport::from_metrics("check_ghost_equivalence", metrics, 0.0, EQUIVALENCE_REF))
}
