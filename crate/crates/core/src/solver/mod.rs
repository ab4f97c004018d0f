//! Periodic pseudospectral integration of the (field, ghost) systems.
//!
//! The ghost is carried as the real coefficient of a single odd generator.
//! That is exact here because every ghost equation in the catalog is linear
//! in the ghost, and so are all BRST densities that get evaluated.

mod elliptic;
mod eval;
mod initial;
pub mod spectral;
mod stepper;

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::diffpoly::GradedPoly;
use crate::error::{Error, Result};
use crate::reductions::{ConservedDensity, EvolutionSystem};
use eval::{Compiled, JetTable};
use spectral::Spectral;

pub use initial::{kdv_soliton_profile, mkdv_cnoidal_profile, soliton_initial, GhostProfile};
pub use stepper::{SolverOptions, Stepper};

/// Sampled fields on a uniform periodic grid at one instant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub t: f64,
    pub l: f64,
    pub n: usize,
    pub fields: BTreeMap<String, Vec<f64>>,
}

impl FieldState {
    pub fn new(l: f64, n: usize) -> Result<Self> {
        Spectral::new(n, l)?;
        Ok(FieldState { t: 0.0, l, n, fields: BTreeMap::new() })
    }

    pub fn with_field(mut self, name: &str, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.n {
            return Err(Error::arg(format!("field `{name}` has {} points, grid has {}", values.len(), self.n)));
        }
        self.fields.insert(name.to_string(), values);
        Ok(self)
    }

    pub fn with_fn(self, name: &str, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = self.grid().into_iter().map(f).collect();
        self.with_field(name, values)
    }

    pub fn field(&self, name: &str) -> Result<&[f64]> {
        self.fields.get(name).map(Vec::as_slice).ok_or_else(|| Error::arg(format!("state has no field `{name}`")))
    }

    pub fn grid(&self) -> Vec<f64> {
        let dx = self.l / self.n as f64;
        (0..self.n).map(|j| j as f64 * dx).collect()
    }

    /// Circular shift of every field by `k` grid points.
    pub fn shifted(&self, k: usize) -> FieldState {
        let mut out = self.clone();
        for v in out.fields.values_mut() {
            v.rotate_right(k % self.n);
        }
        out
    }

    pub(crate) fn spectral(&self) -> Result<Spectral> {
        Spectral::new(self.n, self.l)
    }
}

/// Time-ordered snapshots with per-snapshot diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub system: String,
    pub dt: f64,
    pub snapshots: Vec<FieldState>,
    pub diagnostic_names: Vec<String>,
    pub diagnostics: Vec<BTreeMap<String, f64>>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &FieldState {
        self.snapshots.last().expect("trajectory has at least one snapshot")
    }

    /// Values of one diagnostic over time.
    pub fn series(&self, name: &str) -> Option<Vec<f64>> {
        self.diagnostics.iter().map(|d| d.get(name).copied()).collect()
    }

    /// Long-format CSV: one row per snapshot and grid point.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let Some(first) = self.snapshots.first() else { return Ok(()) };
        let names: Vec<&String> = first.fields.keys().collect();
        write!(w, "t,x")?;
        for n in &names {
            write!(w, ",{n}")?;
        }
        writeln!(w)?;
        for s in &self.snapshots {
            for (j, x) in s.grid().iter().enumerate() {
                write!(w, "{},{}", s.t, x)?;
                for n in &names {
                    write!(w, ",{:e}", s.fields[*n][j])?;
                }
                writeln!(w)?;
            }
        }
        Ok(())
    }
}

fn jets_for(state: &FieldState, orders: &BTreeMap<String, u32>, sp: &Spectral) -> Result<JetTable> {
    let mut jets = JetTable::new();
    for (f, &k) in orders {
        jets.insert(f.clone(), sp.jets(state.field(f)?, k));
    }
    Ok(jets)
}

/// Evaluates a differential polynomial on the grid, with spectral jets.
pub fn evaluate_pointwise(expr: &GradedPoly, state: &FieldState) -> Result<Vec<f64>> {
    let c = Compiled::new(expr)?;
    let sp = state.spectral()?;
    let jets = jets_for(state, &c.orders(), &sp)?;
    c.eval(&jets, state.n)
}

/// Periodic trapezoid integral of a density.
pub fn evaluate_functional(density: &ConservedDensity, state: &FieldState) -> Result<f64> {
    let values = evaluate_pointwise(&density.density, state)?;
    Ok(state.spectral()?.integrate(&values))
}

/// One step of size `dt`.
pub fn step(state: &FieldState, system: &EvolutionSystem, dt: f64) -> Result<FieldState> {
    Stepper::new(system, state.n, state.l, dt, SolverOptions::default())?.step(state)
}

/// Integrates to `t_end`, recording every `record_every` steps and at the end.
pub fn evolve(
    state: &FieldState,
    system: &EvolutionSystem,
    t_end: f64,
    dt: f64,
    record_every: usize,
    diagnostics: &[ConservedDensity],
) -> Result<Trajectory> {
    evolve_with(state, system, t_end, dt, record_every, diagnostics, &SolverOptions::default())
}

pub fn evolve_with(
    state: &FieldState,
    system: &EvolutionSystem,
    t_end: f64,
    dt: f64,
    record_every: usize,
    diagnostics: &[ConservedDensity],
    options: &SolverOptions,
) -> Result<Trajectory> {
    if t_end.is_nan() || t_end <= state.t {
        return Err(Error::arg(format!("t_end = {t_end} must exceed the initial time {}", state.t)));
    }
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::arg(format!("dt must be positive, got {dt}")));
    }
    if record_every == 0 {
        return Err(Error::arg("record_every must be at least 1"));
    }
    let span = t_end - state.t;
    let steps = ((span / dt) - 1e-9).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let stepper = Stepper::new(system, state.n, state.l, h, options.clone())?;
    stepper.check_stability(state)?;
    stepper.check_floor(state)?;

    let diag = |s: &FieldState| -> Result<BTreeMap<String, f64>> {
        diagnostics.iter().map(|d| Ok((d.name.clone(), evaluate_functional(d, s)?))).collect()
    };
    let mut traj = Trajectory {
        system: system.name.clone(),
        dt: h,
        snapshots: vec![state.clone()],
        diagnostic_names: diagnostics.iter().map(|d| d.name.clone()).collect(),
        diagnostics: vec![diag(state)?],
    };
    let mut cur = state.clone();
    let t0 = state.t;
    for i in 1..=steps {
        cur = stepper.step(&cur)?;
        cur.t = t0 + i as f64 * h;
        if i % record_every == 0 || i == steps {
            traj.diagnostics.push(diag(&cur)?);
            traj.snapshots.push(cur.clone());
        }
    }
    Ok(traj)
}
