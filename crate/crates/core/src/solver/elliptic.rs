//! Complete elliptic integral and Jacobi `sn` via the arithmetic-geometric mean.
//!
//! The modulus is passed together with its complement `m' = sqrt(1 - m^2)`
//! so that moduli extremely close to one keep full precision.

use std::f64::consts::PI;

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let (na, nb) = (0.5 * (a + b), (a * b).sqrt());
        a = na;
        b = nb;
    }
    a
}

/// `K` as a function of the complementary modulus.
pub(crate) fn complete_k(m_comp: f64) -> f64 {
    PI / (2.0 * agm(1.0, m_comp))
}

/// Jacobi `sn(u | m)` by the descending AGM scheme.
pub(crate) fn sn(u: f64, m: f64, m_comp: f64) -> f64 {
    if m == 0.0 {
        return u.sin();
    }
    let mut a = vec![1.0];
    let mut c = vec![m];
    let mut b = m_comp;
    while c.len() < 64 {
        let (an, bn) = (*a.last().unwrap(), b);
        let cn = 0.5 * (an - bn);
        a.push(0.5 * (an + bn));
        b = (an * bn).sqrt();
        c.push(cn);
        if cn.abs() < 1e-17 {
            break;
        }
    }
    let steps = a.len() - 1;
    let mut phi = 2f64.powi(steps as i32) * a[steps] * u;
    for j in (1..=steps).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    phi.sin()
}

/// Modulus `(m, m')` with `4 K(m) = period`, or `None` when `period <= 2 pi`.
pub(crate) fn modulus_for_period(period: f64) -> Option<(f64, f64)> {
    let target = period / 4.0;
    if target <= PI / 2.0 {
        return None;
    }
    // K decreases as ln m' increases; bisect on ln m'.
    let (mut lo, mut hi) = (-700.0f64, 0.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if complete_k(mid.exp()) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mc = (0.5 * (lo + hi)).exp();
    Some(((1.0 - mc * mc).sqrt(), mc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits() {
        assert!((complete_k(1.0) - PI / 2.0).abs() < 1e-15);
        // K(1/sqrt 2) = Gamma(1/4)^2 / (4 sqrt(pi))
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((complete_k(r) - 1.854_074_677_301_372).abs() < 1e-13);
        assert!((sn(0.3, 0.0, 1.0) - 0.3f64.sin()).abs() < 1e-15);
        let m = 1.0 - 1e-20f64;
        assert!((sn(0.8, m, 1e-10) - 0.8f64.tanh()).abs() < 1e-9);
    }

    #[test]
    fn sn_quarter_period_and_identity() {
        for &m in &[0.3, 0.9, 0.999] {
            let mc = (1.0f64 - m * m).sqrt();
            let k = complete_k(mc);
            assert!((sn(k, m, mc) - 1.0).abs() < 1e-12, "m = {m}");
            assert!(sn(2.0 * k, m, mc).abs() < 1e-11);
        }
    }

    #[test]
    fn period_inversion() {
        let (m, mc) = modulus_for_period(0.7 * 40.0).unwrap();
        assert!((4.0 * complete_k(mc) - 28.0).abs() < 1e-10);
        assert!(m < 1.0 && m > 0.99);
        assert!(modulus_for_period(6.0).is_none());
    }
}
