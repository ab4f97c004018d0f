use super::*;
use crate::diffpoly::{euler_operator, parse, parse_params, parse_with, q, variational_derivative};
use crate::solver::FieldState;
use std::f64::consts::{PI, SQRT_2};

fn sys(name: &str, params: &str) -> EvolutionSystem {
    build_system(name, &parse_params(params).unwrap()).unwrap()
}

fn pd(s: &str, sys: &EvolutionSystem) -> GradedPoly {
    parse_with(s, &sys.decls).unwrap()
}

/// Difference of two densities modulo total x-derivatives, per field.
fn same_modulo_total_derivatives(a: &GradedPoly, b: &GradedPoly, fields: &[(&str, bool)]) -> bool {
    let d = a.sub(b);
    fields.iter().all(|(f, odd)| variational_derivative(&d, f, *odd).is_zero())
}

#[test]
fn t_form_at_kdv_values() {
    let s = sys("t-form", "beta=1,s=2");
    assert_eq!(s.equation("T").unwrap().rhs, parse("T_xxx + 6*T*T_x").unwrap());
    assert_eq!(s.equation("c").unwrap().rhs, parse("odd: c; c_xxx + 6*T*c_x").unwrap());
    assert!(s.free_params().is_empty());
}

#[test]
fn harry_dym_equations() {
    let s = sys("harry-dym", "");
    assert_eq!(
        s.equation("T").unwrap().rhs,
        pd("1/2", &s).mul(&pd("T^(1/2)", &s).dx_n(3)).add(&pd("2*T^(1/2)*T_x", &s))
    );
    assert_eq!(s.equation("c").unwrap().rhs, pd("1/4*T^(-1/2)*c_xxx + 2*T^(1/2)*c_x", &s));
}

#[test]
fn kdv_equations_and_reduction() {
    let s = sys("kdv", "");
    assert_eq!(s.reduce_on_shell(&parse("u_t").unwrap()).unwrap(), parse("3*u*u_x + u_xxx").unwrap());
    assert_eq!(s.reduce_on_shell(&parse("u_tx").unwrap()).unwrap(), parse("3*u*u_x + u_xxx").unwrap().dx());
    assert_eq!(s.reduce_on_shell(&pd("c_t", &s)).unwrap(), pd("c_xxx + 3*u*c_x", &s));
    assert_eq!(s.derived["T"], parse("1/2*u").unwrap());
    assert_eq!(s.density("H3").unwrap().name, "Hb3");
    assert!(s.density("nope").is_err());
}

#[test]
fn alpha_form_harry_dym_rules() {
    let s = sys("alpha-form", "alpha=-2,s=1");
    assert_eq!(s.brst.rule("u").unwrap(), &pd("-1/4*u^3*c_xxx + c*u_x - u*c_x", &s));
    assert_eq!(s.equation("u").unwrap().rhs, pd("-1/4*u^3*u_xxx", &s));
}

#[test]
fn catalog_errors() {
    assert!(matches!(build_system("sine-gordon", &Default::default()), Err(Error::UnknownSystem(_))));
    assert!(build_system("alpha-form", &parse_params("alpha=0,s=1").unwrap()).is_err());
    assert!(build_system("alpha-form", &parse_params("s=1").unwrap()).is_err());
    assert!(build_system("kdv", &parse_params("beta=1").unwrap()).is_err());
    assert_eq!(sys("t-form", "beta=1/2").free_params(), vec!["s".to_string()]);
    assert_eq!(catalog().len(), 7);
}

fn kdv_ghost_under(u: &GradedPoly, d: &Declarations) -> GradedPoly {
    parse_with("c_xxx + 3*u*c_x", d).unwrap().substitute(|g| Ok((&*g.field == "u").then(|| u.dx_n(g.x_order)))).unwrap()
}

#[test]
fn mkdv_ghost_is_kdv_ghost_under_miura() {
    let m = sys("mkdv", "");
    let pulled = kdv_ghost_under(&miura_u_of_r("R"), &m.decls);
    assert_eq!(pulled, m.equation("c").unwrap().rhs);
}

#[test]
fn ckdv_ghost_is_kdv_ghost_under_miura() {
    let c = sys("ckdv", "");
    let u = miura_u_of_r("v").substitute(|g| Ok((&*g.field == "v").then(|| v_of_w().dx_n(g.x_order)))).unwrap();
    assert_eq!(kdv_ghost_under(&u, &c.decls), c.equation("c").unwrap().rhs);
}

#[test]
fn miura_maps_mkdv_onto_kdv() {
    let m = sys("mkdv", "");
    let u = miura_u_of_r("R");
    let kdv_residual = |u: &GradedPoly| u.dt_formal().sub(&u.mul(&u.dx()).scale_q(&q(3))).sub(&u.dx_n(3));
    assert!(m.reduce_on_shell(&kdv_residual(&u)).unwrap().is_zero());
}

#[test]
fn ckdv_maps_onto_mkdv() {
    let c = sys("ckdv", "");
    let v = v_of_w();
    let mkdv_residual = |v: &GradedPoly| v.dt_formal().sub(&v.dx_n(3)).add(&v.pow(2).mul(&v.dx()).scale_q(&q(6)));
    assert!(c.reduce_on_shell(&mkdv_residual(&v)).unwrap().is_zero());

    // The undifferentiated flux does not map onto mKdV.
    let mut printed = c.clone();
    printed.equations[0].rhs = parse("w_xxx - 1/2*w^3 - 3/2*w_x^2*w^-1").unwrap();
    assert!(!printed.reduce_on_shell(&mkdv_residual(&v)).unwrap().is_zero());
}

#[test]
fn seed_density_reproduces_explicit_h5() {
    let s = sys("kdv", "");
    let seed = parse("1/3*u^3 - 1/3*u_x^2").unwrap();
    let delta = s.brst.apply(&seed).unwrap();
    let h5 = &s.density("Hb5").unwrap().density;
    assert!(same_modulo_total_derivatives(&delta, h5, &[("u", false), ("c", true)]), "{delta}");
    // The seed with u^2 in place of u^3 gives something else.
    let printed = s.brst.apply(&parse("1/3*u^2 - 1/3*u_x^2").unwrap()).unwrap();
    assert!(!same_modulo_total_derivatives(&printed, h5, &[("u", false), ("c", true)]));
}

#[test]
fn explicit_kdv_densities_are_brst_images() {
    let s = sys("kdv", "");
    let fields = [("u", false), ("c", true)];
    let hb1 = &s.density("Hb1").unwrap().density;
    let hb3 = &s.density("Hb3").unwrap().density;
    assert!(same_modulo_total_derivatives(&s.brst.apply(&parse("u").unwrap()).unwrap(), hb1, &fields));
    assert!(same_modulo_total_derivatives(&s.brst.apply(&parse("1/2*u^2").unwrap()).unwrap(), hb3, &fields));
}

#[test]
fn t_form_brst_densities_match_delta_images() {
    let s = sys("t-form", "");
    let fields = [("T", false), ("c", true)];
    for (classical, brst) in [("H0", "Ht0"), ("H1", "Ht1")] {
        let img = s.brst.apply(&s.density(classical).unwrap().density).unwrap();
        assert!(same_modulo_total_derivatives(&img, &s.density(brst).unwrap().density, &fields), "{brst}");
    }
}

#[test]
fn catalog_densities_are_conserved() {
    for (name, params) in [
        ("kdv", ""),
        ("harry-dym", ""),
        ("t-form", ""),
        ("t-form", "beta=1,s=2"),
        ("alpha-form", "alpha=-2,s=1"),
        ("mkdv", ""),
        ("ckdv", ""),
    ] {
        let s = sys(name, params);
        for d in &s.densities {
            let dt = s.reduce_on_shell(&d.density.dt_formal()).unwrap();
            for eq in &s.equations {
                assert!(
                    variational_derivative(&dt, &eq.field, eq.odd).is_zero(),
                    "{name}({params}) {} in {}",
                    d.name,
                    eq.field
                );
            }
            match d.kind {
                DensityKind::Classical => assert_eq!(d.density.parity(), Some(false)),
                DensityKind::BrstInvariant => assert_eq!(d.density.parity(), Some(true)),
            }
        }
    }
}

#[test]
fn ghost_rhs_is_linear_in_ghost() {
    for name in ["kdv", "harry-dym", "mkdv", "ckdv", "t-form"] {
        let s = sys(name, "");
        for eq in s.equations.iter().filter(|e| e.odd) {
            assert!(eq.rhs.terms().all(|(m, _)| m.odd_part().len() == 1), "{name}");
        }
    }
}

#[test]
fn manifest_round_trip() {
    for info in catalog() {
        let s = sys(info.name, if info.name == "alpha-form" { "alpha=-2,s=1" } else { "" });
        let json = s.to_json().unwrap();
        let back = EvolutionSystem::from_json(&json).unwrap();
        assert_eq!(back, s, "{}", info.name);
    }
}

#[test]
fn manifest_rejects_wrong_parity() {
    let mut m = sys("kdv", "").to_manifest();
    m.equations[0].rhs = "c_x".into();
    assert!(EvolutionSystem::from_manifest(&m).is_err());
}

#[test]
fn euler_of_t_form_density() {
    let s = sys("t-form", "beta=1/2");
    assert_eq!(euler_operator(&s.density("H1").unwrap().density, "T").unwrap(), parse("3/2*T^(1/2)").unwrap());
}

// numeric maps

fn grid(n: usize, l: f64) -> Vec<f64> {
    (0..n).map(|j| j as f64 * l / n as f64).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

#[test]
fn miura_map_examples() {
    assert!(max_abs(&miura_map(&[0.0; 16], 1.0).unwrap()) == 0.0);
    let u = miura_map(&[0.3; 16], 1.0).unwrap();
    assert!(u.iter().all(|v| (v + 0.18).abs() < 1e-14));
}

#[test]
fn ckdv_to_mkdv_examples() {
    let v = ckdv_to_mkdv(&[1.5; 32], 2.0, SINGULARITY_THRESHOLD).unwrap();
    assert!(v.iter().all(|x| (x + 0.75).abs() < 1e-14));
    let mut w = vec![1.0; 32];
    w[7] = 0.0;
    assert!(matches!(ckdv_to_mkdv(&w, 2.0, SINGULARITY_THRESHOLD), Err(Error::Singularity(_))));
}

#[test]
fn ghost_multiplet_examples() {
    let (n, l) = (64, 5.0);
    let (c0, cm) = ghost_multiplet(&[0.4; 64], &[2.0; 64], l).unwrap();
    assert!(max_abs(&c0) < 1e-14);
    assert!(cm.iter().all(|v| (v + 2.0 * SQRT_2 * 0.4).abs() < 1e-13));

    let w = 2.0 * PI / l;
    let c: Vec<f64> = grid(n, l).iter().map(|x| (w * x).sin()).collect();
    let (c0, cm) = ghost_multiplet(&c, &[0.0; 64], l).unwrap();
    for (j, x) in grid(n, l).iter().enumerate() {
        assert!((c0[j] - w * (w * x).cos()).abs() < 1e-12);
        assert!((cm[j] - SQRT_2 / 2.0 * w * w * (w * x).sin()).abs() < 1e-12);
    }
    let (c0, cm) = ghost_multiplet(&[0.0; 64], &[1.0; 64], l).unwrap();
    assert!(max_abs(&c0) == 0.0 && max_abs(&cm) == 0.0);
    assert!(ghost_multiplet(&[0.0; 64], &[1.0; 32], l).is_err());
}

#[test]
fn reconstruct_slice_a_examples() {
    let st = FieldState::new(10.0, 32)
        .unwrap()
        .with_field("u", vec![0.0; 32])
        .unwrap()
        .with_field("T", vec![0.0; 32])
        .unwrap();
    let conn = reconstruct_connection(&st, GaugeSlice::A).unwrap();
    assert!(conn.a1[1].iter().all(|v| *v == SQRT_2));
    assert!(max_abs(&conn.a1[0]) == 0.0 && max_abs(&conn.a1[2]) == 0.0);
    assert!(conn.a0.iter().all(|a| max_abs(a.as_ref().unwrap()) == 0.0));

    let st = st.with_field("u", vec![0.7; 32]).unwrap();
    let conn = reconstruct_connection(&st, GaugeSlice::A).unwrap();
    assert!(conn.a0[1].as_ref().unwrap().iter().all(|v| (v - SQRT_2 * 0.7).abs() < 1e-15));
    assert!(max_abs(conn.a0[0].as_ref().unwrap()) < 1e-14);
    assert!(max_abs(conn.a0[2].as_ref().unwrap()) < 1e-14);
    assert!(reconstruct_connection(&st, GaugeSlice::B).is_err());
}

#[test]
fn zero_curvature_components_measure_upsilon() {
    let (n, l) = (128, 2.0 * PI);
    let x = grid(n, l);
    let u: Vec<f64> = x.iter().map(|x| 0.3 * x.sin() + 0.1 * (2.0 * x).cos()).collect();
    let t: Vec<f64> = x.iter().map(|x| 1.0 + 0.2 * (3.0 * x).sin()).collect();
    let t_t: Vec<f64> = x.iter().map(|x| 0.5 * x.cos()).collect();
    let sp = crate::solver::spectral::Spectral::new(n, l).unwrap();
    let ux = sp.derivative(&u, 1).unwrap();
    let uxx = sp.derivative(&u, 2).unwrap();
    let p: Vec<f64> = ux.iter().map(|v| 0.5 * v).collect();
    let qq: Vec<f64> = (0..n).map(|j| -0.5 * uxx[j] - u[j] * t[j]).collect();
    let inputs = CurvatureInputs {
        p,
        q: qq,
        r: vec![0.0; n],
        s: vec![1.0; n],
        t: t.clone(),
        u: u.clone(),
        r_t: vec![0.0; n],
        s_t: vec![0.0; n],
        t_t: t_t.clone(),
    };
    let [e1, e2, e3] = zero_curvature_components(&inputs, l).unwrap();
    assert!(max_abs(&e1) < 1e-13 && max_abs(&e2) < 1e-13);

    let state = FieldState::new(l, n).unwrap().with_field("u", u).unwrap().with_field("T", t).unwrap();
    let ups = crate::solver::evaluate_pointwise(&upsilon_system_rhs(), &state).unwrap();
    for j in 0..n {
        assert!((e3[j] - (t_t[j] - ups[j])).abs() < 1e-12);
    }

    let zero = CurvatureInputs {
        p: vec![0.0; 8],
        q: vec![0.0; 8],
        r: vec![0.0; 8],
        s: vec![0.0; 8],
        t: vec![0.0; 8],
        u: vec![0.0; 8],
        r_t: vec![0.0; 8],
        s_t: vec![0.0; 8],
        t_t: vec![0.0; 8],
    };
    assert!(zero_curvature_components(&zero, 1.0).unwrap().iter().all(|e| max_abs(e) == 0.0));
    let bad = CurvatureInputs { p: vec![0.0; 4], ..zero };
    assert!(zero_curvature_components(&bad, 1.0).is_err());
}

fn upsilon_system_rhs() -> GradedPoly {
    sys("upsilon", "").equation("T").unwrap().rhs.clone()
}

#[test]
fn upsilon_polynomial() {
    assert_eq!(upsilon(), parse("T_t - 1/2*u_xxx - 2*u_x*T - u*T_x").unwrap());
}
