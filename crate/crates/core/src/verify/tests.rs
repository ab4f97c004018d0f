use super::*;
use crate::diffpoly::{parse, parse_params, parse_with, q};
use crate::reductions::{build_system, ConservedDensity, DensityKind};
use crate::sl2::{Index, Sl2Algebra};
use crate::solver::{evolve, FieldState};
use num_traits::Zero;

fn sys(name: &str, params: &str) -> crate::EvolutionSystem {
    build_system(name, &parse_params(params).unwrap()).unwrap()
}

#[test]
fn nilpotency_passes() {
    let r = check_nilpotency().unwrap();
    assert!(r.passed(), "{r:?}");
    assert_eq!(r.metrics["canonical_nonzero_generators"], 0.0);
    assert_eq!(r.note.as_deref(), Some("12/12 canonical generators annihilated"));
}

#[test]
fn nilpotency_mutations_fail() {
    let jacobi = Sl2Algebra::standard().with_structure_constant(Index::Zero, Index::Plus, Index::Plus, q(2));
    assert!(!jacobi.jacobi_defect().is_zero());
    let r = check_nilpotency_with(&jacobi).unwrap();
    assert!(!r.passed(), "{r:?}");

    // A lowered table that disagrees with the metric also breaks it.
    let half = Sl2Algebra::standard()
        .with_lowered_constants(|a, b, c| crate::diffpoly::qf(crate::sl2::levi_civita(a, b, c), 2));
    assert!(!check_nilpotency_with(&half).unwrap().passed());
}

#[test]
fn rescaled_bracket_is_still_nilpotent() {
    // f_{+-}^0 = 2 is a rescaling of the basis, Jacobi still holds and the
    // metric drops out of f_abc Pi^c, so this is not a mutation.
    let rescaled = Sl2Algebra::standard().with_structure_constant(Index::Plus, Index::Minus, Index::Zero, q(2));
    assert!(rescaled.jacobi_defect().is_zero());
    assert!(check_nilpotency_with(&rescaled).unwrap().passed());
}

#[test]
fn upsilon_covariance() {
    let r = check_upsilon_covariance().unwrap();
    assert!(r.passed(), "{r:?}");

    let s = sys("upsilon", "");
    let mutated = s.brst.clone().with_rule("T", parse_with("1/2*c_xxx + T_x*c + T*c_x", &s.decls).unwrap());
    let r = check_upsilon_covariance_with(&mutated).unwrap();
    assert!(!r.passed());
    assert!(r.metrics["difference_terms"] > 0.0);
    // The derivation still commutes with d_x.
    assert_eq!(r.metrics["dx_commutation_terms"], 0.0);
}

#[test]
fn invariance_of_named_systems() {
    for (label, s) in invariance_systems().unwrap() {
        let r = check_system_invariance(&s).unwrap();
        assert!(r.passed(), "{label}: {r:?}");
    }
    let r = run_check("check_system_invariance").unwrap();
    assert_eq!(r.len(), 1);
    assert!(r[0].passed());
    assert_eq!(r[0].metrics.len(), 8);
}

#[test]
fn invariance_mutation_fails() {
    let mut s = sys("kdv", "");
    s.equations[1].rhs = parse_with("c_xxx + 2*u*c_x", &s.decls).unwrap();
    assert!(!check_system_invariance(&s).unwrap().passed());
}

#[test]
fn gradient_ghost_default_cases() {
    let r = run_check("check_gradient_ghost").unwrap();
    assert!(r[0].passed(), "{:?}", r[0]);
}

#[test]
fn gradient_ghost_premise() {
    let s = sys("kdv", "");
    let not_conserved = ConservedDensity::new("cube", parse("u^4").unwrap(), DensityKind::Classical);
    let r = check_gradient_ghost(&not_conserved, &s).unwrap();
    assert_eq!(r.status, CheckStatus::PremiseFailed);
    let ghosty = ConservedDensity::new("g", parse("odd: c; u*c").unwrap(), DensityKind::Classical);
    assert!(check_gradient_ghost(&ghosty, &s).is_err());
}

#[test]
fn ghost_equivalence() {
    assert!(check_ghost_equivalence().unwrap().passed());
}

#[test]
fn report_json_round_trip() {
    let r = check_nilpotency().unwrap();
    let json = serde_json::to_string(&r).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in ["check", "status", "metrics", "tolerance", "paper_ref"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["status"], "pass");
    assert_eq!(serde_json::from_str::<CheckReport>(&json).unwrap(), r);
}

#[test]
fn from_metrics_rule() {
    let mut m = std::collections::BTreeMap::new();
    m.insert("a".to_string(), 1e-7);
    assert!(CheckReport::from_metrics("x", m.clone(), 1e-6, "").passed());
    m.insert("b".to_string(), f64::NAN);
    assert!(!CheckReport::from_metrics("x", m, 1e-6, "").passed());
}

#[test]
fn unknown_check() {
    assert!(matches!(run_check("nope"), Err(crate::Error::UnknownCheck(_))));
}

#[test]
fn conservation_and_its_mutation() {
    let s = sys("kdv", "");
    let l = 2.0 * std::f64::consts::PI;
    let st = FieldState::new(l, 64)
        .unwrap()
        .with_fn("u", |x| 1.0 + 0.3 * x.cos())
        .unwrap()
        .with_fn("c", |x| (2.0 * x).sin())
        .unwrap();
    let cube = ConservedDensity::new("T3", parse("1/8*u^3").unwrap(), DensityKind::Classical);
    let mut diags = s.densities.clone();
    diags.push(cube.clone());
    let tr = evolve(&st, &s, 0.5, 1e-3, 50, &diags).unwrap();
    let classical: Vec<_> = s.densities.iter().filter(|d| d.kind == DensityKind::Classical).cloned().collect();
    assert!(check_conservation(&tr, &classical, CLASSICAL_DRIFT_TOLERANCE).unwrap().passed());
    let r = check_conservation(&tr, &[cube], CLASSICAL_DRIFT_TOLERANCE).unwrap();
    assert!(!r.passed(), "{r:?}");
    assert!(check_conservation(&tr, &[ConservedDensity::new("zz", parse("u").unwrap(), DensityKind::Classical)], 1.0)
        .is_err());
}

#[test]
fn zero_curvature_on_constant_state() {
    let s = sys("kdv", "");
    let st = FieldState::new(10.0, 32)
        .unwrap()
        .with_field("u", vec![0.7; 32])
        .unwrap()
        .with_field("c", vec![0.0; 32])
        .unwrap();
    let tr = evolve(&st, &s, 0.05, 1e-3, 10, &[]).unwrap();
    let r = check_zero_curvature(&tr, &s).unwrap();
    assert!(r.metrics.values().all(|v| *v < 1e-12), "{r:?}");

    let short = evolve(&st, &s, 0.02, 1e-3, 10, &[]).unwrap();
    assert!(check_zero_curvature(&short, &s).is_err());
    assert!(check_zero_curvature(&tr, &sys("mkdv", "")).is_err());
}

#[test]
fn zero_curvature_on_moving_state_and_mutation() {
    let s = sys("kdv", "");
    let l = 2.0 * std::f64::consts::PI;
    let st = FieldState::new(l, 64).unwrap().with_fn("u", |x| 0.5 * x.cos()).unwrap().with_fn("c", |_| 0.0).unwrap();
    let tr = evolve(&st, &s, 0.2, 1e-3, 5, &[]).unwrap();
    let r = check_zero_curvature(&tr, &s).unwrap();
    assert!(r.passed(), "{r:?}");
    let flipped = check_zero_curvature_with(&tr, &s, &|c| {
        if let Some(v) = c.a0[Index::Minus.slot()].as_mut() {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    })
    .unwrap();
    assert!(!flipped.passed(), "{flipped:?}");
}

#[test]
fn ckdv_residual_small_on_positive_data() {
    let l = 10.0;
    let w0 = FieldState::new(l, 64)
        .unwrap()
        .with_fn("w", |x| 1.5 + 0.4 * (2.0 * std::f64::consts::PI * x / l).cos())
        .unwrap();
    let res = ckdv_residual_run(&w0, 0.1, 1e-3).unwrap();
    assert!(res < 1e-8, "{res:e}");
}

#[test]
fn merge_prefixes_and_ranks_status() {
    let mut m = std::collections::BTreeMap::new();
    m.insert("t".to_string(), 0.0);
    let pass = CheckReport::from_metrics("c", m.clone(), 0.0, "");
    let mut bad = pass.clone();
    bad.status = CheckStatus::Fail;
    let merged = CheckReport::merge("c", "", vec![("a".into(), pass), ("b".into(), bad)]);
    assert_eq!(merged.status, CheckStatus::Fail);
    assert!(merged.metrics.contains_key("a/t") && merged.metrics.contains_key("b/t"));
}
