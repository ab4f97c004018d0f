use super::elliptic::{modulus_for_period, sn};
use super::FieldState;
use crate::error::{Error, Result};
use crate::reductions::EvolutionSystem;

/// Initial ghost data.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum GhostProfile {
    /// `d_x` of the even field.
    #[default]
    Derivative,
    /// A copy of the even field.
    Field,
    Zero,
    Values(Vec<f64>),
}

fn wrap(xi: f64, l: f64) -> f64 {
    (xi + 0.5 * l).rem_euclid(l) - 0.5 * l
}

/// `4 k^2 sech^2(k (x + 4 k^2 t - x0))`, centred on the nearest periodic image.
pub fn kdv_soliton_profile(x: &[f64], t: f64, k: f64, x0: f64, l: f64) -> Vec<f64> {
    let a = 4.0 * k * k;
    x.iter()
        .map(|&x| {
            let z = k * wrap(x + a * t - x0, l);
            a / z.cosh().powi(2)
        })
        .collect()
}

/// Periodic travelling wave `m k sn(k (x - x0 - (1 + m^2) k^2 t) | m)` of
/// `R_t = R_xxx - 6 R^2 R_x`, with the modulus fixed by `4 K(m) = k L`.
///
/// This equation has no decaying sech-type solution, so the cnoidal wave
/// stands in for the soliton. It needs `k > 2 pi / L`.
pub fn mkdv_cnoidal_profile(x: &[f64], t: f64, k: f64, x0: f64, l: f64) -> Result<Vec<f64>> {
    if k == 0.0 {
        return Ok(vec![0.0; x.len()]);
    }
    let (m, mc) = modulus_for_period(k.abs() * l).ok_or_else(|| {
        Error::arg(format!("mkdv wave number must exceed 2 pi / L = {:.4}, got {k}", 2.0 * std::f64::consts::PI / l))
    })?;
    let c = (1.0 + m * m) * k * k;
    Ok(x.iter().map(|&x| m * k * sn(k * (x - x0 - c * t), m, mc)).collect())
}

/// Soliton-type initial state for `kdv` or `mkdv`.
pub fn soliton_initial(
    system: &EvolutionSystem,
    k: f64,
    x0: f64,
    l: f64,
    n: usize,
    ghost: &GhostProfile,
) -> Result<FieldState> {
    let state = FieldState::new(l, n)?;
    let x = state.grid();
    let (field, values) = match system.name.as_str() {
        "kdv" => ("u", kdv_soliton_profile(&x, 0.0, k, x0, l)),
        "mkdv" => ("R", mkdv_cnoidal_profile(&x, 0.0, k, x0, l)?),
        other => return Err(Error::arg(format!("no soliton initial data for system `{other}`"))),
    };
    let ghost_values = match ghost {
        GhostProfile::Derivative => state.spectral()?.derivative_any(&values, 1),
        GhostProfile::Field => values.clone(),
        GhostProfile::Zero => vec![0.0; n],
        GhostProfile::Values(v) => v.clone(),
    };
    let mut state = state.with_field(field, values)?;
    for g in system.ghost_fields() {
        state = state.with_field(g, ghost_values.clone())?;
    }
    Ok(state)
}
