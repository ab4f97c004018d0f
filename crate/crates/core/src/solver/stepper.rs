//! Fourth-order Runge-Kutta in integrating-factor (Lawson) form.
//!
//! Constant-coefficient linear terms `a_k d_x^k f` of each equation are
//! integrated exactly in Fourier space; everything else is advanced by RK4
//! and dealiased with the two-thirds rule. Without linear terms the scheme is
//! classical RK4.

use std::collections::BTreeMap;

use rustfft::num_complex::Complex64;

use super::eval::Compiled;
use super::spectral::Spectral;
use super::{jets_for, FieldState};
use crate::diffpoly::{q_to_f64, GradedPoly, Monomial};
use crate::error::{Error, Result};
use crate::reductions::EvolutionSystem;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Lower bound for fields raised to fractional powers, and for `|f|` of
    /// fields raised to negative powers.
    pub floor: f64,
    /// Bound on `dt * sum |a| k^order` over the explicitly treated terms.
    pub stability_limit: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { floor: 1e-6, stability_limit: 2.8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Guard {
    Positive,
    NonZero,
}

#[derive(Debug)]
struct Equation {
    field: String,
    /// `exp(L h/2)` and `exp(L h)` per Fourier bin, when there is a linear part.
    half: Option<Vec<Complex64>>,
    full: Option<Vec<Complex64>>,
    nonlinear: Compiled,
    nonlinear_poly: GradedPoly,
}

#[derive(Debug)]
pub struct Stepper {
    sp: Spectral,
    dt: f64,
    eqs: Vec<Equation>,
    orders: BTreeMap<String, u32>,
    guards: Vec<(String, Guard)>,
    options: SolverOptions,
}

type Fields = BTreeMap<String, Vec<f64>>;

/// `Some(order)` when the monomial is exactly `d_x^order field`.
fn linear_order(m: &Monomial, field: &str) -> Option<u32> {
    let mut gens = m.generators();
    let g = gens.next()?;
    if gens.next().is_some() || &*g.field != field || g.t_order > 0 {
        return None;
    }
    if let Some(e) = m.even_part().get(g) {
        if !e.is_one() {
            return None;
        }
    }
    Some(g.x_order)
}

impl Stepper {
    pub fn new(system: &EvolutionSystem, n: usize, l: f64, dt: f64, options: SolverOptions) -> Result<Self> {
        if !system.free_params().is_empty() {
            return Err(Error::NotNumeric(format!(
                "system `{}` still has symbolic parameters: {}",
                system.name,
                system.free_params().join(", ")
            )));
        }
        if system.equations.is_empty() {
            return Err(Error::arg(format!("system `{}` has no evolution equations", system.name)));
        }
        let sp = Spectral::new(n, l)?;
        let mut eqs = Vec::new();
        let mut orders: BTreeMap<String, u32> = BTreeMap::new();
        let mut guards: BTreeMap<String, Guard> = BTreeMap::new();
        for eq in &system.equations {
            let mut symbol = vec![Complex64::new(0.0, 0.0); n];
            let mut has_linear = false;
            let mut rest = GradedPoly::zero();
            for (m, c) in eq.rhs.terms() {
                match (linear_order(m, &eq.field), c.as_constant()) {
                    (Some(k), Some(a)) if k > 0 => {
                        has_linear = true;
                        let a = q_to_f64(&a);
                        for (j, s) in symbol.iter_mut().enumerate() {
                            *s += sp.symbol(j, k) * a;
                        }
                    }
                    _ => rest = rest.add(&GradedPoly::monomial(m.clone(), c.clone())),
                }
                for (g, e) in m.even_part() {
                    let frac = e.as_integer().is_none();
                    let neg = e.as_integer().is_some_and(|i| i < 0);
                    if frac {
                        guards.insert(g.field.to_string(), Guard::Positive);
                    } else if neg {
                        guards.entry(g.field.to_string()).or_insert(Guard::NonZero);
                    }
                }
            }
            let nonlinear = Compiled::new(&rest)?;
            for (f, k) in nonlinear.orders() {
                if system.equation(&f).is_none() {
                    return Err(Error::arg(format!(
                        "field `{f}` enters the equation for `{}` but has no evolution equation",
                        eq.field
                    )));
                }
                let e = orders.entry(f).or_insert(0);
                *e = (*e).max(k);
            }
            let (half, full) = if has_linear {
                let exp = |h: f64| symbol.iter().map(|s| (s * h).exp()).collect::<Vec<_>>();
                (Some(exp(0.5 * dt)), Some(exp(dt)))
            } else {
                (None, None)
            };
            eqs.push(Equation { field: eq.field.clone(), half, full, nonlinear, nonlinear_poly: rest });
        }
        Ok(Stepper { sp, dt, eqs, orders, guards: guards.into_iter().collect(), options })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn nonlinear(&self, fields: &Fields, t: f64) -> Result<Fields> {
        let state = FieldState { t, l: self.sp.l(), n: self.sp.n(), fields: fields.clone() };
        let jets = jets_for(&state, &self.orders, &self.sp)?;
        let mut out = Fields::new();
        for eq in &self.eqs {
            let raw = eq.nonlinear.eval(&jets, self.sp.n())?;
            out.insert(eq.field.clone(), self.sp.dealias(&raw));
        }
        Ok(out)
    }

    fn apply(&self, factor: &Option<Vec<Complex64>>, f: &[f64]) -> Vec<f64> {
        match factor {
            None => f.to_vec(),
            Some(e) => {
                let spec = self.sp.forward(f);
                self.sp.inverse(spec.iter().zip(e).map(|(a, b)| a * b).collect())
            }
        }
    }

    /// Applies `E^power` (power 1 = half step, 2 = full step) field by field.
    fn propagate(&self, fields: &Fields, power: u8) -> Fields {
        self.eqs
            .iter()
            .map(|eq| {
                let factor = if power == 1 { &eq.half } else { &eq.full };
                (eq.field.clone(), self.apply(factor, &fields[&eq.field]))
            })
            .collect()
    }

    fn axpy(a: &Fields, s: f64, b: &Fields) -> Fields {
        a.iter().map(|(k, v)| (k.clone(), v.iter().zip(&b[k]).map(|(x, y)| x + s * y).collect())).collect()
    }

    pub fn step(&self, state: &FieldState) -> Result<FieldState> {
        let h = self.dt;
        let u: Fields = self
            .eqs
            .iter()
            .map(|eq| Ok((eq.field.clone(), state.field(&eq.field)?.to_vec())))
            .collect::<Result<_>>()?;
        let t = state.t;

        let k1 = self.nonlinear(&u, t)?;
        let a = self.propagate(&Self::axpy(&u, 0.5 * h, &k1), 1);
        let k2 = self.nonlinear(&a, t + 0.5 * h)?;
        let eu = self.propagate(&u, 1);
        let b = Self::axpy(&eu, 0.5 * h, &k2);
        let k3 = self.nonlinear(&b, t + 0.5 * h)?;
        let e2u = self.propagate(&u, 2);
        let c = Self::axpy(&e2u, h, &self.propagate(&k3, 1));
        let k4 = self.nonlinear(&c, t + h)?;

        let e2k1 = self.propagate(&k1, 2);
        let k23: Fields =
            k2.iter().map(|(f, v)| (f.clone(), v.iter().zip(&k3[f]).map(|(x, y)| x + y).collect())).collect();
        let ek23 = self.propagate(&k23, 1);
        let mut next = state.clone();
        next.t = t + h;
        for eq in &self.eqs {
            let f = &eq.field;
            let v: Vec<f64> =
                (0..self.sp.n()).map(|j| e2u[f][j] + h / 6.0 * (e2k1[f][j] + 2.0 * ek23[f][j] + k4[f][j])).collect();
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::BlowUp { t: next.t });
            }
            next.fields.insert(f.clone(), v);
        }
        self.check_floor(&next)?;
        Ok(next)
    }

    /// Positivity / nonvanishing preconditions of fields under fractional or
    /// negative powers.
    pub fn check_floor(&self, state: &FieldState) -> Result<()> {
        for (f, guard) in &self.guards {
            let Ok(values) = state.field(f) else { continue };
            let floor = self.options.floor;
            let bad = match guard {
                Guard::Positive => values.iter().position(|v| *v < floor),
                Guard::NonZero => values.iter().position(|v| v.abs() < floor),
            };
            if let Some(j) = bad {
                return Err(Error::Singularity(format!(
                    "field `{f}` = {:.3e} at x = {:.4} violates the floor {floor:e} at t = {}",
                    values[j],
                    j as f64 * self.sp.dx(),
                    state.t
                )));
            }
        }
        Ok(())
    }

    /// Stability estimate for the explicitly treated terms on this state.
    pub fn stability_estimate(&self, state: &FieldState) -> Result<f64> {
        let k_eff = (self.sp.n() / 3) as f64 * 2.0 * std::f64::consts::PI / self.sp.l();
        let mut worst: f64 = 0.0;
        for eq in &self.eqs {
            let mut total = 0.0;
            for (m, c) in eq.nonlinear_poly.terms() {
                let Some(top) = m.generators().filter(|g| g.x_order > 0).max_by_key(|g| g.x_order) else {
                    continue;
                };
                let term = GradedPoly::monomial(m.clone(), c.clone());
                let coef = super::evaluate_pointwise(&term.partial(top), state)?;
                let amax = coef.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                total += amax * k_eff.powi(top.x_order as i32);
            }
            worst = worst.max(total * self.dt);
        }
        Ok(worst)
    }

    pub fn check_stability(&self, state: &FieldState) -> Result<()> {
        let estimate = self.stability_estimate(state)?;
        if estimate > self.options.stability_limit {
            return Err(Error::Cfl { dt: self.dt, estimate, limit: self.options.stability_limit });
        }
        Ok(())
    }
}
