//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! of them fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use brst_core::diffpoly::{parse_params, parse_with, q, qf};
use brst_core::reductions::build_system;
use brst_core::sl2::{levi_civita, Index, Sl2Algebra};
use brst_core::solver::{evolve, kdv_soliton_profile, soliton_initial, GhostProfile};
use brst_core::verify::{self, CheckReport};
use brst_core::{EvolutionSystem, Result};

struct Outcome {
    passed: bool,
    detail: String,
}

fn summarize(reports: &[CheckReport]) -> Outcome {
    let passed = reports.iter().all(CheckReport::passed);
    let detail = reports
        .iter()
        .map(|r| {
            let worst = r.metrics.values().cloned().fold(0.0, f64::max);
            format!(
                "{}: {:?}, worst {:.2e} (tol {:.0e}, {} metrics)",
                r.check,
                r.status,
                worst,
                r.tolerance,
                r.metrics.len()
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { passed, detail }
}

fn sys(name: &str) -> Result<EvolutionSystem> {
    build_system(name, &parse_params("")?)
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn c1() -> Result<Outcome> {
    let r = verify::check_nilpotency()?;
    let mut o = summarize(std::slice::from_ref(&r));
    if let Some(n) = r.note {
        o.detail = format!("{}, {n}", o.detail);
    }
    Ok(o)
}

fn c2() -> Result<Outcome> {
    Ok(summarize(&[verify::check_upsilon_covariance()?]))
}

fn c3() -> Result<Outcome> {
    Ok(summarize(&verify::run_check("check_system_invariance")?))
}

fn c4() -> Result<Outcome> {
    Ok(summarize(&verify::run_check("check_gradient_ghost")?))
}

fn c5() -> Result<Outcome> {
    Ok(summarize(&[verify::check_ghost_equivalence()?]))
}

/// Soliton error against the exact profile, and the self-convergence ratio
/// of successive dt halvings.
fn c6() -> Result<Outcome> {
    let (k, x0, l, n) = (0.7, 20.0, 40.0, 512);
    let s = sys("kdv")?;
    let init = soliton_initial(&s, k, x0, l, n, &GhostProfile::Zero)?;
    let run = |dt: f64| -> Result<Vec<f64>> {
        let tr = evolve(&init, &s, 1.0, dt, usize::MAX, &[])?;
        Ok(tr.last().field("u")?.to_vec())
    };
    let u = run(1e-3)?;
    let exact = kdv_soliton_profile(&init.grid(), 1.0, k, x0, l);
    let err = linf(&u, &exact);

    let dts = [CONVERGENCE_DT, CONVERGENCE_DT / 2.0, CONVERGENCE_DT / 4.0];
    let sols = dts.iter().map(|&dt| run(dt)).collect::<Result<Vec<_>>>()?;
    let (e1, e2) = (linf(&sols[0], &sols[1]), linf(&sols[1], &sols[2]));
    let ratio = e1 / e2;
    Ok(Outcome {
        passed: err < 1e-6 && (13.0..=19.0).contains(&ratio),
        detail: format!(
            "L_inf error {err:.2e} (tol 1e-6); dt {:.0e}/{:.1e}/{:.2e}: differences {e1:.2e}, {e2:.2e}, ratio {ratio:.2} (want 13..19)",
            dts[0], dts[1], dts[2]
        ),
    })
}

const CONVERGENCE_DT: f64 = 1e-3;

fn c7() -> Result<Outcome> {
    Ok(summarize(&verify::run_check("check_conservation")?))
}

fn c8() -> Result<Outcome> {
    Ok(summarize(&[verify::check_miura_chain()?]))
}

fn c9() -> Result<Outcome> {
    Ok(summarize(&verify::run_check("check_zero_curvature")?))
}

/// Each symbolic check must reject a single perturbed constant or coefficient.
fn c10() -> Result<Outcome> {
    let mut caught = BTreeMap::new();

    let jacobi = Sl2Algebra::standard().with_structure_constant(Index::Zero, Index::Plus, Index::Plus, q(2));
    caught.insert("nilpotency/f_0+^+=2", !verify::check_nilpotency_with(&jacobi)?.passed());
    let half = Sl2Algebra::standard().with_lowered_constants(|a, b, c| qf(levi_civita(a, b, c), 2));
    caught.insert("nilpotency/f_abc=eps/2", !verify::check_nilpotency_with(&half)?.passed());

    let up = sys("upsilon")?;
    let rules = up.brst.clone().with_rule("T", parse_with("1/2*c_xxx + T_x*c + T*c_x", &up.decls)?);
    caught.insert("upsilon/dT coefficient 2->1", !verify::check_upsilon_covariance_with(&rules)?.passed());

    let mut kdv = sys("kdv")?;
    kdv.equations[1].rhs = parse_with("c_xxx + 2*u*c_x", &kdv.decls)?;
    caught.insert("invariance/kdv ghost 3->2", !verify::check_system_invariance(&kdv)?.passed());
    let mut alpha = build_system("alpha-form", &parse_params("alpha=1,s=2")?)?;
    let bump = parse_with("u*c_x", &alpha.decls)?;
    alpha.equations[1].rhs = alpha.equations[1].rhs.add(&bump);
    caught.insert("invariance/alpha-form u*c_x +1", !verify::check_system_invariance(&alpha)?.passed());

    let missed: Vec<_> = caught.iter().filter(|(_, c)| !**c).map(|(k, _)| *k).collect();
    Ok(Outcome {
        passed: missed.is_empty(),
        detail: if missed.is_empty() {
            format!(
                "{}/{} mutations rejected ({})",
                caught.len(),
                caught.len(),
                caught.keys().cloned().collect::<Vec<_>>().join(", ")
            )
        } else {
            format!("mutations not rejected: {}", missed.join(", "))
        },
    })
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("nilpotency on canonical generators", c1),
        ("upsilon covariance", c2),
        ("on-shell invariance of coupled systems", c3),
        ("gradient ghost", c4),
        ("ghost equations under Miura maps", c5),
        ("KdV soliton accuracy and convergence", c6),
        ("conservation drifts", c7),
        ("Miura chain", c8),
        ("zero curvature along KdV trajectory", c9),
        ("mutation guards", c10),
    ];
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, f)| {
                s.spawn(move || {
                    let start = Instant::now();
                    (f(), start.elapsed())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    let mut failures = 0;
    for (i, ((name, _), (res, took))) in criteria.iter().zip(results).enumerate() {
        let o = res.unwrap_or_else(|e| Outcome { passed: false, detail: format!("error: {e}") });
        if !o.passed {
            failures += 1;
        }
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2}. {name} ({:.1}s): {}", i + 1, took.as_secs_f64(), o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
