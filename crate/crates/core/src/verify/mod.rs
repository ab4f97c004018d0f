//! Named, runnable checks with pass/fail reports.
//!
//! Symbolic checks count the monomials left in a polynomial that should
//! vanish, so their tolerance is exactly zero. Numeric checks declare their
//! tolerance in the report.

mod numeric;
mod symbolic;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use numeric::{
    check_conservation, check_miura_chain, check_zero_curvature, check_zero_curvature_with, ckdv_residual_run,
    kdv_coupled_run, ConservationRun, BRST_DRIFT_TOLERANCE, CLASSICAL_DRIFT_TOLERANCE, MIURA_TOLERANCE,
    ZERO_CURVATURE_TOLERANCE,
};
pub use symbolic::{
    check_ghost_equivalence, check_gradient_ghost, check_nilpotency, check_nilpotency_with, check_system_invariance,
    check_upsilon_covariance, check_upsilon_covariance_with, invariance_systems,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// A precondition of the statement under test did not hold.
    PremiseFailed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub status: CheckStatus,
    pub metrics: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub paper_ref: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    /// Pass iff every metric is finite and at most `tolerance`.
    pub fn from_metrics(check: &str, metrics: BTreeMap<String, f64>, tolerance: f64, paper_ref: &str) -> Self {
        let ok = metrics.values().all(|v| v.is_finite() && *v <= tolerance);
        CheckReport {
            check: check.to_string(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            metrics,
            tolerance,
            paper_ref: paper_ref.to_string(),
            note: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Combines reports of the same check, prefixing metrics with `label/`.
    /// Any premise failure wins over a failure, which wins over a pass.
    pub fn merge(check: &str, paper_ref: &str, parts: Vec<(String, CheckReport)>) -> Self {
        let mut metrics = BTreeMap::new();
        let mut status = CheckStatus::Pass;
        let mut tolerance: f64 = 0.0;
        let mut notes = Vec::new();
        for (label, r) in parts {
            for (k, v) in r.metrics {
                metrics.insert(format!("{label}/{k}"), v);
            }
            tolerance = tolerance.max(r.tolerance);
            status = match (status, r.status) {
                (CheckStatus::PremiseFailed, _) | (_, CheckStatus::PremiseFailed) => CheckStatus::PremiseFailed,
                (CheckStatus::Fail, _) | (_, CheckStatus::Fail) => CheckStatus::Fail,
                _ => CheckStatus::Pass,
            };
            if let Some(n) = r.note {
                notes.push(format!("{label}: {n}"));
            }
        }
        CheckReport {
            check: check.to_string(),
            status,
            metrics,
            tolerance,
            paper_ref: paper_ref.to_string(),
            note: (!notes.is_empty()).then(|| notes.join("; ")),
        }
    }
}

/// Names accepted by [`run_check`].
pub const CHECK_NAMES: [&str; 8] = [
    "check_nilpotency",
    "check_upsilon_covariance",
    "check_system_invariance",
    "check_gradient_ghost",
    "check_ghost_equivalence",
    "check_conservation",
    "check_miura_chain",
    "check_zero_curvature",
];

/// Runs one named check in its default configuration.
pub fn run_check(name: &str) -> Result<Vec<CheckReport>> {
    match name {
        "check_nilpotency" => Ok(vec![check_nilpotency()?]),
        "check_upsilon_covariance" => Ok(vec![check_upsilon_covariance()?]),
        "check_system_invariance" => {
            let parts = invariance_systems()?
                .into_iter()
                .map(|(label, sys)| Ok((label, check_system_invariance(&sys)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(vec![CheckReport::merge(name, symbolic::INVARIANCE_REF, parts)])
        }
        "check_gradient_ghost" => Ok(vec![symbolic::gradient_ghost_default()?]),
        "check_ghost_equivalence" => Ok(vec![check_ghost_equivalence()?]),
        "check_conservation" => {
            let run = kdv_coupled_run(100)?;
            Ok(vec![run.classical_report()?, run.brst_report()?])
        }
        "check_miura_chain" => Ok(vec![check_miura_chain()?]),
        "check_zero_curvature" => {
            let run = kdv_coupled_run(5)?;
            Ok(vec![check_zero_curvature(&run.trajectory, &run.system)?])
        }
        other => Err(Error::UnknownCheck(other.to_string())),
    }
}

/// Runs every check concurrently, returning reports in [`CHECK_NAMES`] order.
pub fn run_all() -> Result<Vec<CheckReport>> {
    let results: Vec<Result<Vec<CheckReport>>> = std::thread::scope(|s| {
        let handles: Vec<_> = CHECK_NAMES.iter().map(|n| s.spawn(move || run_check(n))).collect();
        handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
    });
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
