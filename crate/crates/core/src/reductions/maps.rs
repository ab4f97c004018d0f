use std::f64::consts::SQRT_2;

use super::GaugeSlice;
use crate::error::{Error, Result};
use crate::sl2::ConnectionGrid;
use crate::solver::spectral::Spectral;
use crate::solver::FieldState;

/// Default `|w|` threshold below which [`ckdv_to_mkdv`] reports a singularity.
pub const SINGULARITY_THRESHOLD: f64 = 1e-8;

fn same_len(arrays: &[&[f64]]) -> Result<usize> {
    let n = arrays[0].len();
    if arrays.iter().any(|a| a.len() != n) {
        return Err(Error::arg("grids differ in size"));
    }
    Ok(n)
}

/// `u = 2 (R_x - R^2)`.
pub fn miura_map(r: &[f64], l: f64) -> Result<Vec<f64>> {
    let sp = Spectral::new(r.len(), l)?;
    let rx = sp.derivative_any(r, 1);
    Ok(r.iter().zip(&rx).map(|(r, rx)| 2.0 * (rx - r * r)).collect())
}

/// `v = (w_x - w^2) / (2 w)`.
pub fn ckdv_to_mkdv(w: &[f64], l: f64, threshold: f64) -> Result<Vec<f64>> {
    if let Some((j, v)) = w.iter().enumerate().find(|(_, v)| v.abs() < threshold) {
        return Err(Error::Singularity(format!("|w| = {:.3e} below {threshold:e} at grid point {j}", v.abs())));
    }
    let sp = Spectral::new(w.len(), l)?;
    let wx = sp.derivative_any(w, 1);
    Ok(w.iter().zip(&wx).map(|(w, wx)| (wx - w * w) / (2.0 * w)).collect())
}

/// Grid data for the three component equations of the zero-curvature
/// condition in the `P, Q, R, S, T, u` parametrization.
#[derive(Clone, Debug, Default)]
pub struct CurvatureInputs {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    pub r_t: Vec<f64>,
    pub s_t: Vec<f64>,
    pub t_t: Vec<f64>,
}

/// `(R_t - P_x - uT - QS, S_t - u_x + 2PS - 2uR, T_t + Q_x - 2PT - 2QR)`.
pub fn zero_curvature_components(c: &CurvatureInputs, l: f64) -> Result<[Vec<f64>; 3]> {
    let n = same_len(&[&c.p, &c.q, &c.r, &c.s, &c.t, &c.u, &c.r_t, &c.s_t, &c.t_t])?;
    let sp = Spectral::new(n, l)?;
    let px = sp.derivative_any(&c.p, 1);
    let qx = sp.derivative_any(&c.q, 1);
    let ux = sp.derivative_any(&c.u, 1);
    let e1 = (0..n).map(|j| c.r_t[j] - px[j] - c.u[j] * c.t[j] - c.q[j] * c.s[j]).collect();
    let e2 = (0..n).map(|j| c.s_t[j] - ux[j] + 2.0 * c.p[j] * c.s[j] - 2.0 * c.u[j] * c.r[j]).collect();
    let e3 = (0..n).map(|j| c.t_t[j] + qx[j] - 2.0 * c.p[j] * c.t[j] - 2.0 * c.q[j] * c.r[j]).collect();
    Ok([e1, e2, e3])
}

/// Full connection from reduced data. Slice A reads `u` and `T`; slice B
/// reads `R` and leaves `A_0^-` undetermined.
pub fn reconstruct_connection(state: &FieldState, slice: GaugeSlice) -> Result<ConnectionGrid> {
    let n = state.n;
    let sp = Spectral::new(n, state.l)?;
    match slice {
        GaugeSlice::A => {
            let u = state.field("u")?;
            let t = state.field("T")?;
            let j = sp.jets(u, 2);
            let a0m = (0..n).map(|i| SQRT_2 * (-0.5 * j[2][i] - u[i] * t[i])).collect();
            Ok(ConnectionGrid {
                l: state.l,
                a0: [Some(j[1].clone()), Some(u.iter().map(|v| SQRT_2 * v).collect()), Some(a0m)],
                a1: [vec![0.0; n], vec![SQRT_2; n], t.iter().map(|v| -SQRT_2 * v).collect()],
            })
        }
        GaugeSlice::B => {
            let r = state.field("R")?;
            let u = miura_map(r, state.l)?;
            let ux = sp.derivative_any(&u, 1);
            let p: Vec<f64> = (0..n).map(|i| 0.5 * ux[i] + u[i] * r[i]).collect();
            Ok(ConnectionGrid {
                l: state.l,
                a0: [Some(p.iter().map(|v| 2.0 * v).collect()), Some(u.iter().map(|v| SQRT_2 * v).collect()), None],
                a1: [r.iter().map(|v| 2.0 * v).collect(), vec![SQRT_2; n], vec![0.0; n]],
            })
        }
    }
}

/// `(C^0, C^-)` from the reduced ghost `c` (with `C^+ = sqrt 2 c`) and `T`.
pub fn ghost_multiplet(c: &[f64], t: &[f64], l: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = same_len(&[c, t])?;
    let sp = Spectral::new(n, l)?;
    let j = sp.jets(c, 2);
    let c0 = j[1].clone();
    let cm = (0..n).map(|i| -SQRT_2 * (t[i] * c[i] + 0.5 * j[2][i])).collect();
    Ok((c0, cm))
}
