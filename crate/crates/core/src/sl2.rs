//! sl(2,R) data: structure constants, Killing-type metric, curvature, and the
//! BRST derivation on the canonical field set.
//!
//! Basis order is `(0, +, -)` with `[T_0, T_+] = T_+`, `[T_0, T_-] = -T_-`,
//! `[T_+, T_-] = T_0`, and `eta_00 = eta_{+-} = eta_{-+} = 1`.

use num_traits::{One, Zero};

use crate::diffpoly::{q, q_to_f64, qf, Declarations, DerivationRuleSet, Generator, GradedPoly, Q};
use crate::error::{Error, Result};
use crate::solver::spectral::Spectral;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Index {
    Zero,
    Plus,
    Minus,
}

impl Index {
    pub const ALL: [Index; 3] = [Index::Zero, Index::Plus, Index::Minus];

    pub fn slot(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Index::Zero => "0",
            Index::Plus => "+",
            Index::Minus => "-",
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Index::Zero => "z",
            Index::Plus => "p",
            Index::Minus => "m",
        }
    }

    pub fn parse(s: &str) -> Result<Index> {
        match s.trim() {
            "0" => Ok(Index::Zero),
            "+" | "p" => Ok(Index::Plus),
            "-" | "m" => Ok(Index::Minus),
            other => Err(Error::arg(format!("sl(2) index must be one of 0, +, -; got `{other}`"))),
        }
    }
}

/// Components indexed by `(0, +, -)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieVector<T> {
    pub components: [T; 3],
}

impl<T> LieVector<T> {
    pub fn new(components: [T; 3]) -> Self {
        LieVector { components }
    }

    pub fn get(&self, a: Index) -> &T {
        &self.components[a.slot()]
    }
}

impl LieVector<Q> {
    pub fn zero() -> Self {
        LieVector::new([Q::zero(), Q::zero(), Q::zero()])
    }

    pub fn basis(a: Index) -> Self {
        let mut v = Self::zero();
        v.components[a.slot()] = Q::one();
        v
    }

    pub fn neg(&self) -> Self {
        LieVector::new(self.components.clone().map(|c| -c))
    }
}

/// Totally antisymmetric symbol with `eps_{0+-} = 1`.
pub fn levi_civita(a: Index, b: Index, c: Index) -> i64 {
    let (a, b, c) = (a.slot() as i64, b.slot() as i64, c.slot() as i64);
    if a == b || b == c || a == c {
        return 0;
    }
    // sign of the permutation (a, b, c) of (0, 1, 2)
    (b - a) * (c - a) * (c - b) / 2
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sl2Algebra {
    /// `f[a][b][c] = f_ab^c`
    f: [[[Q; 3]; 3]; 3],
    eta: [[Q; 3]; 3],
    /// Explicit `f_abc` table; `None` means derive it from `f` and `eta`.
    lowered_table: Option<[[[Q; 3]; 3]; 3]>,
}

impl Default for Sl2Algebra {
    fn default() -> Self {
        Self::standard()
    }
}

impl Sl2Algebra {
    pub fn standard() -> Self {
        let mut alg = Sl2Algebra {
            f: std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| Q::zero()))),
            eta: std::array::from_fn(|_| std::array::from_fn(|_| Q::zero())),
            lowered_table: None,
        };
        alg = alg
            .with_structure_constant(Index::Zero, Index::Plus, Index::Plus, q(1))
            .with_structure_constant(Index::Zero, Index::Minus, Index::Minus, q(-1))
            .with_structure_constant(Index::Plus, Index::Minus, Index::Zero, q(1));
        alg.eta[0][0] = q(1);
        alg.eta[1][2] = q(1);
        alg.eta[2][1] = q(1);
        alg
    }

    /// Sets `f_ab^c = value` and `f_ba^c = -value`.
    pub fn with_structure_constant(mut self, a: Index, b: Index, c: Index, value: Q) -> Self {
        self.f[b.slot()][a.slot()][c.slot()] = -value.clone();
        self.f[a.slot()][b.slot()][c.slot()] = value;
        self
    }

    pub fn structure_constant(&self, a: Index, b: Index, c: Index) -> &Q {
        &self.f[a.slot()][b.slot()][c.slot()]
    }

    pub fn metric(&self, a: Index, b: Index) -> &Q {
        &self.eta[a.slot()][b.slot()]
    }

    pub fn inverse_metric(&self, a: Index, b: Index) -> Q {
        let m = &self.eta;
        let cof = |i: usize, j: usize| {
            let r: Vec<usize> = (0..3).filter(|&k| k != i).collect();
            let c: Vec<usize> = (0..3).filter(|&k| k != j).collect();
            let minor = &m[r[0]][c[0]] * &m[r[1]][c[1]] - &m[r[0]][c[1]] * &m[r[1]][c[0]];
            if (i + j).is_multiple_of(2) {
                minor
            } else {
                -minor
            }
        };
        let det: Q = (0..3).map(|j| &m[0][j] * cof(0, j)).sum();
        cof(b.slot(), a.slot()) / det
    }

    /// `[T_a, T_b]` as the vector `f_ab^c`.
    pub fn commutator(&self, a: Index, b: Index) -> LieVector<Q> {
        LieVector::new(std::array::from_fn(|c| self.f[a.slot()][b.slot()][c].clone()))
    }

    /// Replaces the lowered constants used inside `phi_a` by `table(a, b, c)`.
    pub fn with_lowered_constants(mut self, table: impl Fn(Index, Index, Index) -> Q) -> Self {
        self.lowered_table = Some(std::array::from_fn(|a| {
            std::array::from_fn(|b| std::array::from_fn(|c| table(Index::ALL[a], Index::ALL[b], Index::ALL[c])))
        }));
        self
    }

    /// `f_abc`, by default `f_ab^d eta_dc`.
    pub fn lowered(&self, a: Index, b: Index, c: Index) -> Q {
        match &self.lowered_table {
            Some(t) => t[a.slot()][b.slot()][c.slot()].clone(),
            None => self.lowered_from_metric(a, b, c),
        }
    }

    pub fn lowered_from_metric(&self, a: Index, b: Index, c: Index) -> Q {
        Index::ALL.iter().map(|&d| self.structure_constant(a, b, d) * self.metric(d, c)).sum()
    }

    /// True when the stored `f_abc` agree with `f_ab^d eta_dc`.
    pub fn lowered_consistent(&self) -> bool {
        Index::ALL.iter().all(|&a| {
            Index::ALL
                .iter()
                .all(|&b| Index::ALL.iter().all(|&c| self.lowered(a, b, c) == self.lowered_from_metric(a, b, c)))
        })
    }

    /// Sum over `e` of the largest cyclic Jacobi defect
    /// `f_ab^d f_dc^e + f_bc^d f_da^e + f_ca^d f_db^e`.
    pub fn jacobi_defect(&self) -> Q {
        let mut worst = Q::zero();
        for &a in &Index::ALL {
            for &b in &Index::ALL {
                for &c in &Index::ALL {
                    for &e in &Index::ALL {
                        let mut s = Q::zero();
                        for &d in &Index::ALL {
                            s += self.structure_constant(a, b, d) * self.structure_constant(d, c, e);
                            s += self.structure_constant(b, c, d) * self.structure_constant(d, a, e);
                            s += self.structure_constant(c, a, d) * self.structure_constant(d, b, e);
                        }
                        let s = if s < Q::zero() { -s } else { s };
                        if s > worst {
                            worst = s;
                        }
                    }
                }
            }
        }
        worst
    }

    /// `x_a eta^{ab} y_b`.
    pub fn pairing(&self, x: &LieVector<Q>, y: &LieVector<Q>) -> Q {
        let mut s = Q::zero();
        for &a in &Index::ALL {
            for &b in &Index::ALL {
                s += x.get(a) * self.inverse_metric(a, b) * y.get(b);
            }
        }
        s
    }

    /// The BRST derivation on `A_1^a, Pi_a, C^a, mu_a`.
    pub fn canonical_brst_rules(&self) -> DerivationRuleSet {
        let fs = CanonicalFieldSet::new();
        let a1 = |i: Index| GradedPoly::generator(fs.a1[i.slot()].clone());
        let pi = |i: Index| GradedPoly::generator(fs.pi[i.slot()].clone());
        let gh = |i: Index| GradedPoly::generator(fs.c[i.slot()].clone());
        let mu = |i: Index| GradedPoly::generator(fs.mu[i.slot()].clone());
        let pi_up = |c: Index| {
            Index::ALL.iter().fold(GradedPoly::zero(), |acc, &d| acc.add(&pi(d).scale_q(&self.inverse_metric(c, d))))
        };

        let mut rules = DerivationRuleSet::new("canonical-brst", true);
        for &a in &Index::ALL {
            // dC^a = -1/2 f_bc^a C^b C^c
            let mut dc = GradedPoly::zero();
            // dA^a = d_x C^a + f_bc^a A^b C^c
            let mut da = gh(a).dx();
            // dPi_a = -f_ab^c Pi_c C^b
            let mut dpi = GradedPoly::zero();
            // phi_a = d_x Pi_a + f_abc A^b Pi^c
            let mut phi = pi(a).dx();
            // dmu_a = phi_a - f_ab^d C^b mu_d
            let mut dmu_tail = GradedPoly::zero();
            for &b in &Index::ALL {
                for &c in &Index::ALL {
                    let f_bca = self.structure_constant(b, c, a);
                    if !f_bca.is_zero() {
                        dc = dc.add(&gh(b).mul(&gh(c)).scale_q(&(f_bca * qf(-1, 2))));
                        da = da.add(&a1(b).mul(&gh(c)).scale_q(f_bca));
                    }
                    let f_abc_up = self.structure_constant(a, b, c);
                    if !f_abc_up.is_zero() {
                        dpi = dpi.sub(&pi(c).mul(&gh(b)).scale_q(f_abc_up));
                        dmu_tail = dmu_tail.add(&gh(b).mul(&mu(c)).scale_q(f_abc_up));
                    }
                    let low = self.lowered(a, b, c);
                    if !low.is_zero() {
                        phi = phi.add(&a1(b).mul(&pi_up(c)).scale_q(&low));
                    }
                }
            }
            rules.base.insert(fs.c[a.slot()].field.to_string(), dc);
            rules.base.insert(fs.a1[a.slot()].field.to_string(), da);
            rules.base.insert(fs.pi[a.slot()].field.to_string(), dpi);
            rules.base.insert(fs.mu[a.slot()].field.to_string(), phi.sub(&dmu_tail));
        }
        rules
    }

    /// Explicit 2x2 generators.
    pub fn matrices() -> [[[f64; 2]; 2]; 3] {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        [[[0.5, 0.0], [0.0, -0.5]], [[0.0, r], [0.0, 0.0]], [[0.0, 0.0], [r, 0.0]]]
    }

    /// `F_01^a = d_t A_1^a - d_x A_0^a + f_bc^a A_0^b A_1^c` on the grid.
    ///
    /// A component is `None` when it depends on an undetermined `A_0` entry.
    pub fn curvature_residual(&self, conn: &ConnectionGrid, dt_a1: &[Vec<f64>; 3]) -> Result<[Option<Vec<f64>>; 3]> {
        let n = conn.n();
        if dt_a1.iter().any(|v| v.len() != n) || conn.a0.iter().flatten().any(|v| v.len() != n) {
            return Err(Error::arg("connection and time-derivative grids differ in size"));
        }
        let sp = Spectral::new(n, conn.l)?;
        let mut out: [Option<Vec<f64>>; 3] = [None, None, None];
        for &a in &Index::ALL {
            let Some(a0a) = &conn.a0[a.slot()] else { continue };
            let mut res: Vec<f64> = dt_a1[a.slot()].iter().zip(sp.derivative_any(a0a, 1)).map(|(t, x)| t - x).collect();
            let mut determined = true;
            for &b in &Index::ALL {
                for &c in &Index::ALL {
                    let f = self.structure_constant(b, c, a);
                    if f.is_zero() {
                        continue;
                    }
                    let Some(a0b) = &conn.a0[b.slot()] else {
                        determined = false;
                        continue;
                    };
                    let f = q_to_f64(f);
                    for (r, (x, y)) in res.iter_mut().zip(a0b.iter().zip(&conn.a1[c.slot()])) {
                        *r += f * x * y;
                    }
                }
            }
            if determined {
                out[a.slot()] = Some(res);
            }
        }
        Ok(out)
    }
}

/// Generator names of the canonical sector.
#[derive(Clone, Debug)]
pub struct CanonicalFieldSet {
    pub a1: [Generator; 3],
    pub pi: [Generator; 3],
    pub c: [Generator; 3],
    pub mu: [Generator; 3],
}

impl CanonicalFieldSet {
    pub fn new() -> Self {
        let mk = |stem: &str, odd: bool| {
            Index::ALL.map(|i| {
                let name = format!("{stem}{}", i.tag());
                if odd {
                    Generator::odd(&name, 0)
                } else {
                    Generator::even(&name, 0)
                }
            })
        };
        CanonicalFieldSet { a1: mk("A1", false), pi: mk("Pi", false), c: mk("C", true), mu: mk("mu", true) }
    }

    pub fn all(&self) -> Vec<Generator> {
        self.a1.iter().chain(&self.pi).chain(&self.c).chain(&self.mu).cloned().collect()
    }

    pub fn declarations(&self) -> Declarations {
        Declarations {
            odd: self.c.iter().chain(&self.mu).map(|g| g.field.to_string()).collect(),
            params: Default::default(),
        }
    }
}

impl Default for CanonicalFieldSet {
    fn default() -> Self {
        Self::new()
    }
}

/// Connection components `A_0^a`, `A_1^a` on a periodic grid of length `l`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionGrid {
    pub l: f64,
    pub a0: [Option<Vec<f64>>; 3],
    pub a1: [Vec<f64>; 3],
}

impl ConnectionGrid {
    pub fn n(&self) -> usize {
        self.a1[0].len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffpoly::parse_with;
    use proptest::prelude::*;

    fn alg() -> Sl2Algebra {
        Sl2Algebra::standard()
    }

    fn matmul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
        std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
    }

    #[test]
    fn commutator_examples() {
        assert_eq!(alg().commutator(Index::Zero, Index::Plus), LieVector::basis(Index::Plus));
        for a in Index::ALL {
            assert_eq!(alg().commutator(a, a), LieVector::zero());
        }
        assert_eq!(alg().commutator(Index::Minus, Index::Plus), LieVector::basis(Index::Zero).neg());
        assert!(Index::parse("q").is_err());
    }

    #[test]
    fn structure_constants_match_matrix_commutators() {
        let t = Sl2Algebra::matrices();
        for a in Index::ALL {
            for b in Index::ALL {
                let ab = matmul(&t[a.slot()], &t[b.slot()]);
                let ba = matmul(&t[b.slot()], &t[a.slot()]);
                let comm: [[f64; 2]; 2] = std::array::from_fn(|i| std::array::from_fn(|j| ab[i][j] - ba[i][j]));
                let f = alg().commutator(a, b);
                let mut rebuilt = [[0.0; 2]; 2];
                for c in Index::ALL {
                    let fc = q_to_f64(f.get(c));
                    for i in 0..2 {
                        for j in 0..2 {
                            rebuilt[i][j] += fc * t[c.slot()][i][j];
                        }
                    }
                }
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((rebuilt[i][j] - comm[i][j]).abs() < 1e-15, "[{a:?},{b:?}]");
                    }
                }
            }
        }
    }

    #[test]
    fn antisymmetry_and_jacobi() {
        for a in Index::ALL {
            for b in Index::ALL {
                assert_eq!(alg().commutator(a, b), alg().commutator(b, a).neg());
            }
        }
        assert!(alg().jacobi_defect().is_zero());
    }

    #[test]
    fn trace_normalization() {
        let t = Sl2Algebra::matrices();
        for a in Index::ALL {
            for b in Index::ALL {
                let m = matmul(&t[a.slot()], &t[b.slot()]);
                let tr = m[0][0] + m[1][1];
                assert!((tr - 0.5 * q_to_f64(alg().metric(a, b))).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn lowered_constants_are_levi_civita() {
        // With the explicit generators, f_ab^d eta_dc equals eps_abc itself.
        for a in Index::ALL {
            for b in Index::ALL {
                for c in Index::ALL {
                    assert_eq!(alg().lowered(a, b, c), q(levi_civita(a, b, c)), "{a:?}{b:?}{c:?}");
                }
            }
        }
        assert_eq!(levi_civita(Index::Zero, Index::Plus, Index::Minus), 1);
        assert_eq!(levi_civita(Index::Plus, Index::Zero, Index::Minus), -1);
        assert_eq!(levi_civita(Index::Minus, Index::Zero, Index::Plus), 1);
    }

    #[test]
    fn inverse_metric_inverts() {
        for a in Index::ALL {
            for c in Index::ALL {
                let s: Q = Index::ALL.iter().map(|&b| alg().metric(a, b) * alg().inverse_metric(b, c)).sum();
                assert_eq!(s, if a == c { q(1) } else { q(0) });
            }
        }
    }

    #[test]
    fn brst_on_ghosts_and_momenta() {
        let rules = alg().canonical_brst_rules();
        let d = CanonicalFieldSet::new().declarations();
        let p = |s: &str| parse_with(s, &d).unwrap();
        assert_eq!(rules.rule("Cz").unwrap(), &p("-Cp*Cm"));
        assert_eq!(rules.rule("Piz").unwrap(), &p("-Pip*Cp + Pim*Cm"));
        assert_eq!(rules.rule("A1p").unwrap(), &p("Cp_x + A1z*Cp - A1p*Cz"));
    }

    #[test]
    fn canonical_nilpotency() {
        let rules = alg().canonical_brst_rules();
        for g in CanonicalFieldSet::new().all() {
            let once = rules.apply(&GradedPoly::generator(g.clone())).unwrap();
            let twice = rules.apply(&once).unwrap();
            assert!(twice.is_zero(), "d^2 {g} = {twice}");
        }
    }

    #[test]
    fn half_levi_civita_breaks_nilpotency() {
        let weak = alg().with_lowered_constants(|a, b, c| qf(levi_civita(a, b, c), 2));
        assert!(!weak.lowered_consistent());
        assert!(alg().lowered_consistent());
        let rules = weak.canonical_brst_rules();
        let fs = CanonicalFieldSet::new();
        let bad = fs.mu.iter().any(|g| {
            let once = rules.apply(&GradedPoly::generator(g.clone())).unwrap();
            !rules.apply(&once).unwrap().is_zero()
        });
        assert!(bad);
    }

    #[test]
    fn curvature_trivial_configurations() {
        let n = 16;
        let z = vec![0.0; n];
        let conn = ConnectionGrid {
            l: 1.0,
            a0: [Some(z.clone()), Some(z.clone()), Some(z.clone())],
            a1: [z.clone(), z.clone(), z.clone()],
        };
        let res = alg().curvature_residual(&conn, &[z.clone(), z.clone(), z.clone()]).unwrap();
        assert!(res.iter().all(|r| r.as_ref().unwrap().iter().all(|v| *v == 0.0)));

        let conn = ConnectionGrid {
            l: 1.0,
            a0: [Some(vec![1.3; n]), Some(z.clone()), Some(z.clone())],
            a1: [vec![-0.7; n], z.clone(), z.clone()],
        };
        let res = alg().curvature_residual(&conn, &[z.clone(), z.clone(), z.clone()]).unwrap();
        assert!(res.iter().all(|r| r.as_ref().unwrap().iter().all(|v| v.abs() < 1e-14)));

        let bad =
            ConnectionGrid { l: 1.0, a0: [Some(vec![0.0; 8]), None, None], a1: [z.clone(), z.clone(), z.clone()] };
        assert!(alg().curvature_residual(&bad, &[z.clone(), z.clone(), z]).is_err());
    }

    proptest! {
        #[test]
        fn pairing_is_symmetric(x in prop::array::uniform3(-20i64..20), y in prop::array::uniform3(-20i64..20)) {
            let x = LieVector::new(x.map(q));
            let y = LieVector::new(y.map(q));
            prop_assert_eq!(alg().pairing(&x, &y), alg().pairing(&y, &x));
        }
    }
}
