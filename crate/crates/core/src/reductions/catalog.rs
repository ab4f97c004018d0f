use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{ConservedDensity, DensityKind, EvolutionSystem, FieldEquation, GaugeSlice};
use crate::diffpoly::{parse_with, q, qf, Coeff, Declarations, DerivationRuleSet, Exponent, Generator, GradedPoly, Q};
use crate::error::{Error, Result};

/// One line of the catalog listing.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SystemInfo {
    pub name: &'static str,
    pub params: &'static str,
    pub summary: &'static str,
}

pub fn catalog() -> Vec<SystemInfo> {
    vec![
        SystemInfo { name: "kdv", params: "", summary: "u_t = 3 u u_x + u_xxx with ghost c_t = c_xxx + 3 u c_x" },
        SystemInfo { name: "harry-dym", params: "", summary: "t-form at beta = 1/2, s = 1" },
        SystemInfo {
            name: "t-form",
            params: "beta, s (symbolic when omitted)",
            summary: "T_t = (s/2)(T^beta)_xxx + (2 beta + 1) s T^beta T_x with its ghost equation",
        },
        SystemInfo {
            name: "alpha-form",
            params: "alpha (required, nonzero), s",
            summary: "u_t = ((alpha + 2)/alpha) u u_x + (s/(2 alpha)) u^(1 - alpha) u_xxx with its ghost equation",
        },
        SystemInfo {
            name: "mkdv",
            params: "",
            summary: "R_t = R_xxx - 6 R^2 R_x with ghost c_t = c_xxx + 6 (R_x - R^2) c_x",
        },
        SystemInfo {
            name: "ckdv",
            params: "",
            summary: "w_t = w_xxx - (1/2)(w^3 + 3 w_x^2 / w)_x with the shared ghost equation",
        },
        SystemInfo { name: "upsilon", params: "", summary: "slice-A curvature residual in u, T with the free field u" },
    ]
}

fn p(text: &str, d: &Declarations) -> GradedPoly {
    parse_with(text, d).unwrap_or_else(|e| panic!("catalog expression `{text}`: {e}"))
}

fn ghost_rule(d: &Declarations) -> GradedPoly {
    p("c*c_x", d)
}

fn take_params(name: &str, params: &BTreeMap<String, Q>, allowed: &[&str]) -> Result<()> {
    for k in params.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::arg(format!("system `{name}` has no parameter `{k}`")));
        }
    }
    Ok(())
}

/// Builds a catalog system. Missing `t-form` parameters stay symbolic.
pub fn build_system(name: &str, params: &BTreeMap<String, Q>) -> Result<EvolutionSystem> {
    match name {
        "t-form" => {
            take_params(name, params, &["beta", "s"])?;
            t_form().specialize(params)
        }
        "harry-dym" => {
            take_params(name, params, &[])?;
            let mut vals = BTreeMap::new();
            vals.insert("beta".to_string(), qf(1, 2));
            vals.insert("s".to_string(), q(1));
            let mut sys = t_form().specialize(&vals)?;
            sys.name = "harry-dym".into();
            Ok(sys)
        }
        "alpha-form" => {
            take_params(name, params, &["alpha", "s"])?;
            let alpha = params.get("alpha").ok_or_else(|| Error::arg("alpha-form needs a value for `alpha`"))?;
            let sys = alpha_form(alpha)?;
            match params.get("s") {
                Some(s) => alpha_form_with_s(sys, s),
                None => Ok(sys),
            }
        }
        "kdv" => {
            take_params(name, params, &[])?;
            kdv()
        }
        "mkdv" => {
            take_params(name, params, &[])?;
            Ok(mkdv())
        }
        "ckdv" => {
            take_params(name, params, &[])?;
            Ok(ckdv())
        }
        "upsilon" => {
            take_params(name, params, &[])?;
            Ok(upsilon_system())
        }
        other => Err(Error::UnknownSystem(other.to_string())),
    }
}

fn t_form() -> EvolutionSystem {
    let d = Declarations::new(["c"], ["beta", "s"]);
    let tb = p("T^beta", &d);
    let rhs_t = p("1/2*s", &d).mul(&tb.dx_n(3)).add(&p("(2*beta + 1)*s*T^beta*T_x", &d));
    let rhs_c = p("1/2*s*beta*T^(beta - 1)*c_xxx + s*(2*beta + 1)*T^beta*c_x", &d);
    let dt = p("1/2*c_xxx + T_x*c + 2*T*c_x", &d);
    let brst = DerivationRuleSet::new("brst", true).with_rule("T", dt.clone()).with_rule("c", ghost_rule(&d));
    let densities = vec![
        ConservedDensity::new("H0", p("T", &d), DensityKind::Classical),
        ConservedDensity::new("H1", p("T^(beta + 1)", &d), DensityKind::Classical),
        ConservedDensity::new("Ht0", p("T*c_x", &d), DensityKind::BrstInvariant),
        ConservedDensity::new("Ht1", p("(beta + 1)*T^beta", &d).mul(&dt), DensityKind::BrstInvariant),
    ];
    EvolutionSystem {
        name: "t-form".into(),
        params: BTreeMap::new(),
        decls: d,
        equations: vec![
            FieldEquation { field: "T".into(), odd: false, rhs: rhs_t },
            FieldEquation { field: "c".into(), odd: true, rhs: rhs_c },
        ],
        brst,
        densities,
        derived: BTreeMap::new(),
        slice: Some(GaugeSlice::A),
    }
}

fn alpha_form(alpha: &Q) -> Result<EvolutionSystem> {
    if alpha.is_zero() {
        return Err(Error::arg("alpha-form needs alpha != 0"));
    }
    let d = Declarations::new(["c"], ["s"]);
    let u = |k: u32| GradedPoly::generator(Generator::even("u", k));
    let c = |k: u32| GradedPoly::generator(Generator::odd("c", k));
    let u_pow = |e: Q| GradedPoly::power_of(Generator::even("u", 0), Exponent::rational(e));
    let disp = u_pow(Q::one() - alpha)?.scale(&Coeff::param("s").scale(&(Q::one() / (q(2) * alpha))));
    let two_over = q(2) / alpha;

    let rhs_u = u(0).mul(&u(1)).scale_q(&((alpha + q(2)) / alpha)).add(&disp.mul(&u(3)));
    let rhs_c = disp.mul(&c(3)).add(&u(0).mul(&c(1)).scale_q(&(&two_over + q(1))));
    let du = disp.mul(&c(3)).add(&c(0).mul(&u(1))).add(&u(0).mul(&c(1)).scale_q(&two_over));
    let brst = DerivationRuleSet::new("brst", true).with_rule("u", du).with_rule("c", ghost_rule(&d));

    let h0 = u_pow(alpha.clone())?;
    let h1 = u_pow(alpha + q(1))?;
    let densities = vec![
        ConservedDensity::new("H0", h0.clone(), DensityKind::Classical),
        ConservedDensity::new("H1", h1.clone(), DensityKind::Classical),
        ConservedDensity::new("Ht0", brst.apply(&h0)?, DensityKind::BrstInvariant),
        ConservedDensity::new("Ht1", brst.apply(&h1)?, DensityKind::BrstInvariant),
    ];
    let mut params = BTreeMap::new();
    params.insert("alpha".to_string(), alpha.clone());
    Ok(EvolutionSystem {
        name: "alpha-form".into(),
        params,
        decls: d,
        equations: vec![
            FieldEquation { field: "u".into(), odd: false, rhs: rhs_u },
            FieldEquation { field: "c".into(), odd: true, rhs: rhs_c },
        ],
        brst,
        densities,
        derived: BTreeMap::new(),
        slice: Some(GaugeSlice::A),
    })
}

/// Fixes `s` and records the gauge relation `T = u^alpha / s`.
fn alpha_form_with_s(sys: EvolutionSystem, s: &Q) -> Result<EvolutionSystem> {
    if s.is_zero() {
        return Err(Error::arg("alpha-form needs s != 0"));
    }
    let alpha = sys.params["alpha"].clone();
    let mut vals = BTreeMap::new();
    vals.insert("s".to_string(), s.clone());
    let mut sys = sys.specialize(&vals)?;
    let t = GradedPoly::power_of(Generator::even("u", 0), Exponent::rational(alpha))?.scale_q(&(Q::one() / s));
    sys.derived.insert("T".into(), t.clone());
    // H0 is the integral of T itself.
    sys.densities[0].density = t.clone();
    sys.densities[2].density = sys.brst.apply(&t)?;
    Ok(sys)
}

fn kdv() -> Result<EvolutionSystem> {
    let mut sys = alpha_form_with_s(alpha_form(&q(1))?, &q(2))?;
    sys.name = "kdv".into();
    let d = sys.decls.clone();
    sys.densities.extend([
        ConservedDensity::new("Hb1", p("u*c_x", &d), DensityKind::BrstInvariant),
        ConservedDensity::new("Hb3", p("u*c_xxx + 3/2*u^2*c_x", &d), DensityKind::BrstInvariant),
        ConservedDensity::new(
            "Hb5",
            p("2/3*u_xx*c_xxx + 5/3*u^3*c_x + u^2*c_xxx + 1/3*u_x^2*c_x - 4/3*u*u_xxx*c", &d),
            DensityKind::BrstInvariant,
        ),
    ]);
    Ok(sys)
}

/// `2 (f_x - f^2)` in the named field.
pub fn miura_u_of_r(field: &str) -> GradedPoly {
    let f = |k| GradedPoly::generator(Generator::even(field, k));
    f(1).sub(&f(0).pow(2)).scale_q(&q(2))
}

/// `v = (w_x - w^2) / (2 w)`.
pub fn v_of_w() -> GradedPoly {
    p("1/2*w_x*w^-1 - 1/2*w", &Declarations::default())
}

fn mkdv() -> EvolutionSystem {
    let d = Declarations::new(["c", "cm"], []);
    let brst = DerivationRuleSet::new("brst", true)
        .with_rule("R", p("1/2*c_xx + R_x*c + R*c_x + cm", &d))
        .with_rule("c", ghost_rule(&d))
        .with_x_rule("cm", p("2*R*cm", &d));
    let mut derived = BTreeMap::new();
    derived.insert("u".to_string(), miura_u_of_r("R"));
    EvolutionSystem {
        name: "mkdv".into(),
        params: BTreeMap::new(),
        decls: d.clone(),
        equations: vec![
            FieldEquation { field: "R".into(), odd: false, rhs: p("R_xxx - 6*R^2*R_x", &d) },
            FieldEquation { field: "c".into(), odd: true, rhs: p("c_xxx + 6*R_x*c_x - 6*R^2*c_x", &d) },
        ],
        brst,
        densities: vec![
            ConservedDensity::new("H0", p("R", &d), DensityKind::Classical),
            ConservedDensity::new("H1", p("R^2", &d), DensityKind::Classical),
        ],
        derived,
        slice: Some(GaugeSlice::B),
    }
}

fn ckdv() -> EvolutionSystem {
    let d = Declarations::new(["c", "cm", "cmv"], []);
    let flux = p("w^3 + 3*w_x^2*w^-1", &d);
    let rhs_w = p("w_xxx", &d).sub(&flux.dx().scale_q(&qf(1, 2)));
    let rhs_c = p("c_xxx + 3*w_xx*w^-1*c_x - 9/2*w_x^2*w^-2*c_x - 3/2*w^2*c_x", &d);
    let brst = DerivationRuleSet::new("brst", true)
        .with_rule("w", p("w_x*c + w*c_x + cm - cmv", &d))
        .with_rule("c", ghost_rule(&d))
        .with_x_rule("cm", p("w_x*w^-1*cm + w*cm", &d))
        .with_x_rule("cmv", p("w_x*w^-1*cmv - w*cmv", &d));
    let mut derived = BTreeMap::new();
    derived.insert("v".to_string(), v_of_w());
    EvolutionSystem {
        name: "ckdv".into(),
        params: BTreeMap::new(),
        decls: d.clone(),
        equations: vec![
            FieldEquation { field: "w".into(), odd: false, rhs: rhs_w },
            FieldEquation { field: "c".into(), odd: true, rhs: rhs_c },
        ],
        brst,
        densities: vec![ConservedDensity::new("H0", p("w", &d), DensityKind::Classical)],
        derived,
        slice: None,
    }
}

fn upsilon_system() -> EvolutionSystem {
    let d = Declarations::new(["c"], []);
    let brst = DerivationRuleSet::new("brst", true)
        .with_rule("u", p("c_t - u*c_x + u_x*c", &d))
        .with_rule("T", p("1/2*c_xxx + T_x*c + 2*T*c_x", &d))
        .with_rule("c", ghost_rule(&d));
    EvolutionSystem {
        name: "upsilon".into(),
        params: BTreeMap::new(),
        decls: d.clone(),
        equations: vec![FieldEquation {
            field: "T".into(),
            odd: false,
            rhs: p("1/2*u_xxx + u_x*T + u*T_x + u_x*T", &d),
        }],
        brst,
        densities: Vec::new(),
        derived: BTreeMap::new(),
        slice: Some(GaugeSlice::A),
    }
}

/// `T_t - u_xxx/2 - (u T)_x - u_x T`, with `T_t` kept as a marker.
pub fn upsilon() -> GradedPoly {
    upsilon_system().residual("T").expect("upsilon system has a T equation")
}
