//! Gauge-fixed evolution systems, their BRST rules and conserved densities,
//! plus the numeric maps between reductions (Miura, CKdV to mKdV, connection
//! and ghost reconstruction).

mod catalog;
mod manifest;
mod maps;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::diffpoly::{reduce_with, Declarations, DerivationRuleSet, Generator, GradedPoly, Q};
use crate::error::{Error, Result};

pub use catalog::{build_system, catalog, miura_u_of_r, upsilon, v_of_w, SystemInfo};
pub use manifest::{DensityEntry, EquationEntry, RuleEntry, SystemManifest};
pub use maps::{
    ckdv_to_mkdv, ghost_multiplet, miura_map, reconstruct_connection, zero_curvature_components, CurvatureInputs,
    SINGULARITY_THRESHOLD,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityKind {
    Classical,
    BrstInvariant,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConservedDensity {
    pub name: String,
    pub density: GradedPoly,
    pub kind: DensityKind,
}

impl ConservedDensity {
    pub fn new(name: &str, density: GradedPoly, kind: DensityKind) -> Self {
        ConservedDensity { name: name.to_string(), density, kind }
    }
}

/// Which partial gauge fixing a connection is reconstructed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaugeSlice {
    /// `R = 0, S = 1`: fields `u` and `T`.
    #[serde(rename = "slice-a")]
    A,
    /// `A_1^+ = sqrt 2, A_1^- = 0`: field `R`.
    #[serde(rename = "slice-b")]
    B,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldEquation {
    pub field: String,
    pub odd: bool,
    pub rhs: GradedPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvolutionSystem {
    pub name: String,
    /// Parameter values fixed for this instance.
    pub params: BTreeMap<String, Q>,
    pub decls: Declarations,
    pub equations: Vec<FieldEquation>,
    pub brst: DerivationRuleSet,
    pub densities: Vec<ConservedDensity>,
    /// Fields defined in terms of the evolved ones, e.g. `T = u/2` for KdV.
    pub derived: BTreeMap<String, GradedPoly>,
    pub slice: Option<GaugeSlice>,
}

impl EvolutionSystem {
    pub fn equation(&self, field: &str) -> Option<&FieldEquation> {
        self.equations.iter().find(|e| e.field == field)
    }

    pub fn rhs_map(&self) -> BTreeMap<String, GradedPoly> {
        self.equations.iter().map(|e| (e.field.clone(), e.rhs.clone())).collect()
    }

    pub fn even_fields(&self) -> Vec<&str> {
        self.equations.iter().filter(|e| !e.odd).map(|e| e.field.as_str()).collect()
    }

    pub fn ghost_fields(&self) -> Vec<&str> {
        self.equations.iter().filter(|e| e.odd).map(|e| e.field.as_str()).collect()
    }

    /// `f_t - rhs` with `f_t` as a time-derivative marker.
    pub fn residual(&self, field: &str) -> Result<GradedPoly> {
        let eq = self
            .equation(field)
            .ok_or_else(|| Error::arg(format!("system `{}` has no equation for `{field}`", self.name)))?;
        let g = Generator { field: field.into(), t_order: 1, x_order: 0, odd: eq.odd };
        Ok(GradedPoly::generator(g).sub(&eq.rhs))
    }

    /// Eliminates every time-derivative marker using this system's equations.
    pub fn reduce_on_shell(&self, p: &GradedPoly) -> Result<GradedPoly> {
        reduce_with(p, &self.rhs_map(), &self.brst.x_rules)
    }

    pub fn density(&self, name: &str) -> Result<&ConservedDensity> {
        let target = match name {
            "H3" if self.name == "kdv" => "Hb3",
            "H5" if self.name == "kdv" => "Hb5",
            other => other,
        };
        self.densities
            .iter()
            .find(|d| d.name == target)
            .ok_or_else(|| Error::UnknownDensity(format!("{name} (system {})", self.name)))
    }

    /// Fixes the remaining symbolic parameters.
    pub fn specialize(&self, values: &BTreeMap<String, Q>) -> Result<EvolutionSystem> {
        let mut out = self.clone();
        for eq in &mut out.equations {
            eq.rhs = eq.rhs.specialize(values)?;
        }
        for img in out.brst.base.values_mut().chain(out.brst.x_rules.values_mut()) {
            *img = img.specialize(values)?;
        }
        for d in &mut out.densities {
            d.density = d.density.specialize(values)?;
        }
        for p in out.derived.values_mut() {
            *p = p.specialize(values)?;
        }
        for (k, v) in values {
            if self.decls.params.contains(k) {
                out.params.insert(k.clone(), v.clone());
                out.decls.params.remove(k);
            }
        }
        Ok(out)
    }

    /// Parameters still symbolic.
    pub fn free_params(&self) -> Vec<String> {
        self.decls.params.iter().cloned().collect()
    }

    /// Adds the fields listed in `derived` to a numeric state.
    pub fn with_derived_fields(&self, state: &crate::solver::FieldState) -> Result<crate::solver::FieldState> {
        let mut out = state.clone();
        for (name, expr) in &self.derived {
            let values = crate::solver::evaluate_pointwise(expr, state)?;
            out.fields.insert(name.clone(), values);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests;
