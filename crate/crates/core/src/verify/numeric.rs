use std::collections::BTreeMap;

use super::CheckReport;
use crate::diffpoly::parse_params;
use crate::error::{Error, Result};
use crate::reductions::{
    build_system, ckdv_to_mkdv, miura_map, reconstruct_connection, v_of_w, ConservedDensity, DensityKind,
    EvolutionSystem, GaugeSlice, SINGULARITY_THRESHOLD,
};
use crate::sl2::{ConnectionGrid, Sl2Algebra};
use crate::solver::spectral::Spectral;
use crate::solver::{evaluate_pointwise, evolve, soliton_initial, FieldState, GhostProfile, Trajectory};

pub const CLASSICAL_DRIFT_TOLERANCE: f64 = 1e-8;
pub const BRST_DRIFT_TOLERANCE: f64 = 1e-6;
pub const MIURA_TOLERANCE: f64 = 1e-5;
pub const ZERO_CURVATURE_TOLERANCE: f64 = 1e-5;

/// Below this size an initial functional value is compared absolutely.
const ABSOLUTE_BELOW: f64 = 1e-8;

const CONSERVATION_REF: &str = "conservation of the classical and BRST-invariant functionals along the coupled flow";
const MIURA_REF: &str = "Miura maps carry mKdV solutions to KdV and CKdV solutions to mKdV";
const CURVATURE_REF: &str = "zero-curvature components of the connection rebuilt from a gauge-fixed solution";

fn sys(name: &str) -> Result<EvolutionSystem> {
    build_system(name, &parse_params("")?)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Maximum drift of each density's diagnostic series. Relative to the
/// initial value unless that is below `1e-8` in magnitude.
pub fn check_conservation(
    trajectory: &Trajectory,
    densities: &[ConservedDensity],
    tolerance: f64,
) -> Result<CheckReport> {
    if trajectory.snapshots.len() < 2 {
        return Err(Error::arg("conservation needs at least two snapshots"));
    }
    let mut metrics = BTreeMap::new();
    for d in densities {
        let series = trajectory
            .series(&d.name)
            .ok_or_else(|| Error::arg(format!("trajectory has no diagnostic `{}`", d.name)))?;
        let h0 = series[0];
        let scale = if h0.abs() < ABSOLUTE_BELOW { 1.0 } else { h0.abs() };
        let drift = series.iter().map(|h| (h - h0).abs() / scale).fold(0.0, f64::max);
        metrics.insert(format!("{}_drift", d.name), drift);
    }
    Ok(CheckReport::from_metrics("check_conservation", metrics, tolerance, CONSERVATION_REF))
}

/// A recorded coupled KdV + ghost run with every catalog density as a
/// diagnostic.
#[derive(Clone, Debug)]
pub struct ConservationRun {
    pub system: EvolutionSystem,
    pub trajectory: Trajectory,
}

impl ConservationRun {
    fn densities(&self, kind: DensityKind) -> Vec<ConservedDensity> {
        self.system.densities.iter().filter(|d| d.kind == kind).cloned().collect()
    }

    pub fn classical_report(&self) -> Result<CheckReport> {
        check_conservation(&self.trajectory, &self.densities(DensityKind::Classical), CLASSICAL_DRIFT_TOLERANCE)
    }

    pub fn brst_report(&self) -> Result<CheckReport> {
        check_conservation(&self.trajectory, &self.densities(DensityKind::BrstInvariant), BRST_DRIFT_TOLERANCE)
    }
}

/// Soliton `k = 0.7` on `L = 40`, `N = 512`, `dt = 1e-3` up to `t = 1`, with
/// a ghost that is a localized bump plus a Fourier mode.
pub fn kdv_coupled_run(record_every: usize) -> Result<ConservationRun> {
    let system = sys("kdv")?;
    let (l, n) = (40.0, 512);
    let ghost: Vec<f64> = FieldState::new(l, n)?
        .grid()
        .iter()
        .map(|&x| {
            let d = (x - 10.0 + 0.5 * l).rem_euclid(l) - 0.5 * l;
            1.0 / (0.8 * d).cosh().powi(2) + 0.3 * (4.0 * std::f64::consts::PI * x / l).sin()
        })
        .collect();
    let init = soliton_initial(&system, 0.7, 20.0, l, n, &GhostProfile::Values(ghost))?;
    let trajectory = evolve(&init, &system, 1.0, 1e-3, record_every, &system.densities)?;
    Ok(ConservationRun { system, trajectory })
}

/// Runs CKdV from `init` (which must carry `w`; a missing ghost is set to
/// zero) and returns the max-norm mKdV residual of `v = (w_x - w^2)/(2w)` at
/// `t_end`, with `v_t` from the chain rule along the CKdV flow.
pub fn ckdv_residual_run(init: &FieldState, t_end: f64, dt: f64) -> Result<f64> {
    let ckdv = sys("ckdv")?;
    let mut init = init.clone();
    let n = init.n;
    init.fields.entry("c".into()).or_insert_with(|| vec![0.0; n]);
    let end = evolve(&init, &ckdv, t_end, dt, usize::MAX, &[])?.last().clone();
    let w = end.field("w")?;
    let v = ckdv_to_mkdv(w, end.l, SINGULARITY_THRESHOLD)?;
    let v_t = evaluate_pointwise(&ckdv.reduce_on_shell(&v_of_w().dt_formal())?, &end)?;
    let jets = Spectral::new(end.n, end.l)?.jets(&v, 3);
    Ok((0..end.n).map(|j| (v_t[j] - jets[3][j] + 6.0 * v[j] * v[j] * jets[1][j]).abs()).fold(0.0, f64::max))
}

/// mKdV to KdV on a cnoidal wave, a constant-state chain, and the CKdV to
/// mKdV residual on positive data.
pub fn check_miura_chain() -> Result<CheckReport> {
    let mkdv = sys("mkdv")?;
    let kdv = sys("kdv")?;
    let mut metrics = BTreeMap::new();

    let (l, n, dt) = (40.0, 512, 1e-3);
    let r0 = soliton_initial(&mkdv, 0.7, 3.0, l, n, &GhostProfile::Zero)?;
    let r1 = evolve(&r0, &mkdv, 1.0, dt, usize::MAX, &[])?.last().clone();
    let u0 = FieldState::new(l, n)?.with_field("u", miura_map(r0.field("R")?, l)?)?.with_field("c", vec![0.0; n])?;
    let u1 = evolve(&u0, &kdv, 1.0, dt, usize::MAX, &[])?.last().clone();
    metrics.insert("mkdv_to_kdv_linf".to_string(), max_abs_diff(&miura_map(r1.field("R")?, l)?, u1.field("u")?));

    let r = 0.3;
    let c0 = FieldState::new(l, 32)?.with_field("R", vec![r; 32])?.with_field("c", vec![0.0; 32])?;
    let c1 = evolve(&c0, &mkdv, 0.5, dt, usize::MAX, &[])?.last().clone();
    let k0 = c0.clone().with_field("u", vec![-2.0 * r * r; 32])?;
    let k1 = evolve(&k0, &kdv, 0.5, dt, usize::MAX, &[])?.last().clone();
    let mapped = miura_map(c1.field("R")?, l)?;
    let constant_err = max_abs_diff(&mapped, k1.field("u")?).max(max_abs_diff(&mapped, &vec![-2.0 * r * r; 32]));
    metrics.insert("constant_chain_linf".to_string(), constant_err);

    let lw = 10.0;
    let w0 = FieldState::new(lw, 128)?.with_fn("w", |x| 1.5 + 0.4 * (2.0 * std::f64::consts::PI * x / lw).cos())?;
    metrics.insert("ckdv_to_mkdv_residual".to_string(), ckdv_residual_run(&w0, 1.0, dt)?);

    Ok(CheckReport::from_metrics("check_miura_chain", metrics, MIURA_TOLERANCE, MIURA_REF))
}

/// Zero-curvature residuals along a slice-A trajectory.
pub fn check_zero_curvature(trajectory: &Trajectory, system: &EvolutionSystem) -> Result<CheckReport> {
    check_zero_curvature_with(trajectory, system, &|_| {})
}

/// As [`check_zero_curvature`], applying `corrupt` to each reconstructed
/// connection first.
///
/// `d_t A_1` uses the five-point central difference over snapshot times,
/// so the snapshots must be equally spaced and the first and last two are
/// only used as stencil points.
pub fn check_zero_curvature_with(
    trajectory: &Trajectory,
    system: &EvolutionSystem,
    corrupt: &dyn Fn(&mut ConnectionGrid),
) -> Result<CheckReport> {
    if system.slice != Some(GaugeSlice::A) {
        return Err(Error::arg(format!("system `{}` is not in slice A", system.name)));
    }
    let snaps = &trajectory.snapshots;
    if snaps.len() < 5 {
        return Err(Error::arg(format!("the time stencil needs at least 5 snapshots, got {}", snaps.len())));
    }
    let h = snaps[1].t - snaps[0].t;
    if snaps.windows(2).any(|w| ((w[1].t - w[0].t) - h).abs() > 1e-9 * h.abs().max(1.0)) {
        return Err(Error::arg("snapshots are not equally spaced in time"));
    }
    let conns = snaps
        .iter()
        .map(|s| {
            let mut c = reconstruct_connection(&system.with_derived_fields(s)?, GaugeSlice::A)?;
            corrupt(&mut c);
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;

    let algebra = Sl2Algebra::standard();
    let mut worst = [0.0f64; 3];
    for i in 2..conns.len() - 2 {
        let dt_a1: [Vec<f64>; 3] = std::array::from_fn(|a| {
            (0..conns[i].n())
                .map(|j| {
                    let f = |k: usize| conns[k].a1[a][j];
                    (-f(i + 2) + 8.0 * f(i + 1) - 8.0 * f(i - 1) + f(i - 2)) / (12.0 * h)
                })
                .collect()
        });
        for (a, res) in algebra.curvature_residual(&conns[i], &dt_a1)?.iter().enumerate() {
            if let Some(r) = res {
                worst[a] = worst[a].max(r.iter().fold(0.0, |m, v| m.max(v.abs())));
            }
        }
    }
    let mut metrics = BTreeMap::new();
    for (name, v) in ["F0_max", "Fplus_max", "Fminus_max"].iter().zip(worst) {
        metrics.insert(name.to_string(), v);
    }
    Ok(CheckReport::from_metrics("check_zero_curvature", metrics, ZERO_CURVATURE_TOLERANCE, CURVATURE_REF))
}
