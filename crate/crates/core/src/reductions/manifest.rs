use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ConservedDensity, DensityKind, EvolutionSystem, FieldEquation, GaugeSlice};
use crate::diffpoly::{fmt_q, parse_rational, parse_with, Declarations, DerivationRuleSet, GradedPoly};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationEntry {
    pub field: String,
    #[serde(default)]
    pub odd: bool,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleEntry {
    pub field: String,
    pub image: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityEntry {
    pub name: String,
    pub kind: DensityKind,
    pub density: String,
}

/// Human-editable description of a system; expressions use the
/// differential-polynomial grammar.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemManifest {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    #[serde(default)]
    pub symbolic_params: Vec<String>,
    #[serde(default)]
    pub odd: Vec<String>,
    pub equations: Vec<EquationEntry>,
    #[serde(default)]
    pub brst: Vec<RuleEntry>,
    #[serde(default)]
    pub x_rules: Vec<RuleEntry>,
    #[serde(default)]
    pub densities: Vec<DensityEntry>,
    #[serde(default)]
    pub derived: Vec<RuleEntry>,
    #[serde(default)]
    pub slice: Option<GaugeSlice>,
}

fn rules(map: &BTreeMap<String, GradedPoly>) -> Vec<RuleEntry> {
    map.iter().map(|(f, p)| RuleEntry { field: f.clone(), image: p.to_string() }).collect()
}

impl EvolutionSystem {
    pub fn to_manifest(&self) -> SystemManifest {
        SystemManifest {
            name: self.name.clone(),
            params: self.params.iter().map(|(k, v)| (k.clone(), fmt_q(v))).collect(),
            symbolic_params: self.decls.params.iter().cloned().collect(),
            odd: self.decls.odd.iter().cloned().collect(),
            equations: self
                .equations
                .iter()
                .map(|e| EquationEntry { field: e.field.clone(), odd: e.odd, rhs: e.rhs.to_string() })
                .collect(),
            brst: rules(&self.brst.base),
            x_rules: rules(&self.brst.x_rules),
            densities: self
                .densities
                .iter()
                .map(|d| DensityEntry { name: d.name.clone(), kind: d.kind, density: d.density.to_string() })
                .collect(),
            derived: rules(&self.derived),
            slice: self.slice,
        }
    }

    pub fn from_manifest(m: &SystemManifest) -> Result<EvolutionSystem> {
        let decls =
            Declarations { odd: m.odd.iter().cloned().collect(), params: m.symbolic_params.iter().cloned().collect() };
        let parse = |s: &str| parse_with(s, &decls);
        let mut equations = Vec::new();
        for e in &m.equations {
            let rhs = parse(&e.rhs)?;
            if decls.odd.contains(&e.field) != e.odd {
                return Err(Error::arg(format!("field `{}` parity disagrees with the odd list", e.field)));
            }
            if rhs.parity().is_some_and(|odd| odd != e.odd) {
                return Err(Error::arg(format!("right-hand side of `{}` has the wrong parity", e.field)));
            }
            equations.push(FieldEquation { field: e.field.clone(), odd: e.odd, rhs });
        }
        let mut brst = DerivationRuleSet::new("brst", true);
        for r in &m.brst {
            brst.base.insert(r.field.clone(), parse(&r.image)?);
        }
        for r in &m.x_rules {
            brst.x_rules.insert(r.field.clone(), parse(&r.image)?);
        }
        let densities = m
            .densities
            .iter()
            .map(|d| Ok(ConservedDensity::new(&d.name, parse(&d.density)?, d.kind)))
            .collect::<Result<Vec<_>>>()?;
        let derived = m.derived.iter().map(|r| Ok((r.field.clone(), parse(&r.image)?))).collect::<Result<_>>()?;
        let params = m.params.iter().map(|(k, v)| Ok((k.clone(), parse_rational(v)?))).collect::<Result<_>>()?;
        Ok(EvolutionSystem { name: m.name.clone(), params, decls, equations, brst, densities, derived, slice: m.slice })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_manifest())?)
    }

    pub fn from_json(text: &str) -> Result<EvolutionSystem> {
        Self::from_manifest(&serde_json::from_str(text)?)
    }
}
