//! Fourier differentiation and dealiasing on a uniform periodic grid.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Clone)]
pub struct Spectral {
    n: usize,
    l: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Angular wavenumber of each FFT bin; the Nyquist bin carries `-pi N / L`.
    k: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("n", &self.n).field("l", &self.l).finish()
    }
}

impl Spectral {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::arg(format!("grid size must be a power of two >= 4, got {n}")));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::arg(format!("domain length must be positive, got {l}")));
        }
        let mut planner = FftPlanner::new();
        let two_pi_over_l = 2.0 * std::f64::consts::PI / l;
        let k = (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as i64 } else { j as i64 - n as i64 };
                m as f64 * two_pi_over_l
            })
            .collect();
        Ok(Spectral { n, l, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n), k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn dx(&self) -> f64 {
        self.l / self.n as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.n).map(|j| j as f64 * self.dx()).collect()
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    /// Largest resolved angular wavenumber, `pi N / L`.
    pub fn k_max(&self) -> f64 {
        std::f64::consts::PI * self.n as f64 / self.l
    }

    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    pub fn inverse(&self, mut spec: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut spec);
        let s = 1.0 / self.n as f64;
        spec.into_iter().map(|c| c.re * s).collect()
    }

    /// Multiplier `(i k)^order` for bin `j`; odd orders drop the Nyquist bin.
    pub fn symbol(&self, j: usize, order: u32) -> Complex64 {
        if order % 2 == 1 && j == self.n / 2 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(0.0, self.k[j]).powu(order)
    }

    /// Derivative of order 1 to 4.
    pub fn derivative(&self, f: &[f64], order: u32) -> Result<Vec<f64>> {
        if !(1..=4).contains(&order) {
            return Err(Error::arg(format!("derivative order must be in 1..=4, got {order}")));
        }
        self.check_len(f)?;
        Ok(self.derivative_any(f, order))
    }

    /// Derivative of any order, no argument checks beyond length.
    pub(crate) fn derivative_any(&self, f: &[f64], order: u32) -> Vec<f64> {
        if order == 0 {
            return f.to_vec();
        }
        let spec = self.forward(f);
        self.inverse(spec.iter().enumerate().map(|(j, c)| c * self.symbol(j, order)).collect())
    }

    /// All derivatives `f, f_x, ..., d^max f` from one forward transform.
    pub fn jets(&self, f: &[f64], max_order: u32) -> Vec<Vec<f64>> {
        let spec = self.forward(f);
        let mut out = vec![f.to_vec()];
        for order in 1..=max_order {
            out.push(self.inverse(spec.iter().enumerate().map(|(j, c)| c * self.symbol(j, order)).collect()));
        }
        out
    }

    /// Two-thirds rule: zero every mode with `|m| > N/3`.
    pub fn dealias(&self, f: &[f64]) -> Vec<f64> {
        let mut spec = self.forward(f);
        self.truncate(&mut spec);
        self.inverse(spec)
    }

    pub(crate) fn truncate(&self, spec: &mut [Complex64]) {
        let cut = self.n / 3;
        for (j, c) in spec.iter_mut().enumerate() {
            let m = if j <= self.n / 2 { j } else { self.n - j };
            if m > cut {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Trapezoid rule on the periodic grid.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() * self.dx()
    }

    pub(crate) fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.n {
            return Err(Error::arg(format!("array has {} points, grid has {}", f.len(), self.n)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn max_err(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn sine_first_derivative() {
        let l = 40.0;
        let sp = Spectral::new(512, l).unwrap();
        let w = 2.0 * PI / l;
        let f: Vec<f64> = sp.grid().iter().map(|x| (w * x).sin()).collect();
        let exact: Vec<f64> = sp.grid().iter().map(|x| w * (w * x).cos()).collect();
        assert!(max_err(&sp.derivative(&f, 1).unwrap(), &exact) < 1e-12);
    }

    #[test]
    fn constant_has_zero_derivatives() {
        let sp = Spectral::new(64, 3.0).unwrap();
        let f = vec![2.5; 64];
        for order in 1..=4 {
            assert!(sp.derivative(&f, order).unwrap().iter().all(|v| v.abs() < 1e-13));
        }
        assert!(sp.derivative(&f, 0).is_err());
        assert!(sp.derivative(&f, 5).is_err());
        assert!(sp.derivative(&f[..10], 1).is_err());
    }

    #[test]
    fn sech_squared_third_derivative() {
        let (l, n, k) = (40.0, 512, 0.7);
        let sp = Spectral::new(n, l).unwrap();
        let centered = |x: f64| x - l / 2.0;
        let f: Vec<f64> = sp.grid().iter().map(|&x| 1.0 / (k * centered(x)).cosh().powi(2)).collect();
        let exact: Vec<f64> = sp
            .grid()
            .iter()
            .map(|&x| {
                let z = k * centered(x);
                let s = 1.0 / z.cosh().powi(2);
                let t = z.tanh();
                k.powi(3) * (-8.0 * s * t.powi(3) + 16.0 * s * s * t)
            })
            .collect();
        assert!(max_err(&sp.derivative(&f, 3).unwrap(), &exact) < 1e-8);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Spectral::new(100, 1.0).is_err());
        assert!(Spectral::new(64, 0.0).is_err());
    }

    #[test]
    fn dealias_keeps_low_modes() {
        let sp = Spectral::new(32, 2.0 * PI).unwrap();
        let low: Vec<f64> = sp.grid().iter().map(|x| (3.0 * x).cos()).collect();
        assert!(max_err(&sp.dealias(&low), &low) < 1e-14);
        let high: Vec<f64> = sp.grid().iter().map(|x| (12.0 * x).sin()).collect();
        assert!(sp.dealias(&high).iter().all(|v| v.abs() < 1e-14));
    }
}
