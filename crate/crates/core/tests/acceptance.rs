//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Takes a few minutes (the cavity tables dominate).

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use cavity_fem::assembly::{assemble_stabilization, assemble_viscous, trilinear_form};
use cavity_fem::boundary::{boundary_l2_error, compatibility_integral, interpolate_boundary_data};
use cavity_fem::elements::{build_dofmap, quadrature_rule, Family, ReferenceBasis};
use cavity_fem::postprocess::{compute_eoc, discrete_infsup, field_norm, NormKind};
use cavity_fem::study::{run_cavity_study, run_mms_study};
use cavity_fem::{
    build_uniform_square_mesh, newton_solve, CornerConvention, ElementPair, FeFunction, LidBoundaryData, Mesh, MixedSpace,
    NewtonConfig, StudyConfig, StudyKind,
};

const LEVELS: [usize; 4] = [16, 32, 64, 128];

type Outcome = Result<String, String>;

fn mesh(n: usize) -> Arc<Mesh> {
    Arc::new(build_uniform_square_mesh(n).expect("mesh"))
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cavity_eoc() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for pair in ElementPair::ALL {
        for corner in CornerConvention::ALL {
            let config = StudyConfig {
                pair,
                corner,
                ..Default::default()
            };
            let r = run_cavity_study(&config).map_err(|e| format!("{pair}/{corner}: {e}"))?;
            let eoc = r.eoc();
            ok &= eoc.len() == 3 && eoc.iter().all(|e| (0.48..=0.52).contains(e));
            let errs: Vec<String> = r.rows.iter().map(|row| format!("{:.6}", row.e_l4)).collect();
            let eocs: Vec<String> = eoc.iter().map(|e| format!("{e:.5}")).collect();
            lines.push(format!("{pair}/{corner}: e=[{}] eoc=[{}]", errs.join(", "), eocs.join(", ")));
        }
    }
    check(ok, lines.join("; "))
}

fn boundary_error() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_eoc: f64 = 0.0;
    for pair in [ElementPair::Mini, ElementPair::P1P1Stab] {
        for corner in CornerConvention::ALL {
            let data = LidBoundaryData::new(corner);
            let mut errors = Vec::new();
            let mut hs = Vec::new();
            for n in LEVELS {
                let m = mesh(n);
                let (vmap, _) = build_dofmap(&m, pair);
                let e = boundary_l2_error(&data, &interpolate_boundary_data(&data, &vmap));
                worst = worst.max((e - (2.0 * m.h() / 3.0).sqrt()).abs());
                errors.push(e);
                hs.push(m.h());
            }
            let eoc = compute_eoc(&errors, &hs).map_err(|e| e.to_string())?;
            worst_eoc = eoc.iter().fold(worst_eoc, |w, e| w.max((e - 0.5).abs()));
        }
    }
    check(
        worst <= 1e-12 && worst_eoc <= 1e-10,
        format!("max |e - sqrt(2h/3)| = {worst:.2e}, max |eoc - 0.5| = {worst_eoc:.2e}"),
    )
}

fn compatibility() -> Outcome {
    let mut worst: f64 = 0.0;
    for pair in ElementPair::ALL {
        for corner in CornerConvention::ALL {
            let data = LidBoundaryData::new(corner);
            for n in LEVELS {
                let (vmap, _) = build_dofmap(&mesh(n), pair);
                worst = worst.max(compatibility_integral(&interpolate_boundary_data(&data, &vmap)).abs());
            }
        }
    }
    check(worst <= 1e-13, format!("max |flux of g_h| = {worst:.2e}"))
}

fn mms_rates() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for pair in ElementPair::ALL {
        let config = StudyConfig {
            kind: StudyKind::Mms,
            pair,
            ..Default::default()
        };
        let r = run_mms_study(&config).map_err(|e| format!("{pair}: {e}"))?;
        let last = r.mms_rows.last().ok_or("no rows")?;
        let (h1, l2, p) = (
            last.eoc_h1_u.unwrap_or(f64::NAN),
            last.eoc_l2_u.unwrap_or(f64::NAN),
            last.eoc_l2_p.unwrap_or(f64::NAN),
        );
        ok &= match pair {
            ElementPair::TaylorHood => h1 >= 1.9 && l2 >= 2.7,
            ElementPair::Mini => h1 >= 0.9,
            ElementPair::P1P1Stab => h1 >= 0.9 && p >= 0.9,
        };
        lines.push(format!("{pair}: eoc H1(u) {h1:.3}, L2(u) {l2:.3}, L2(p) {p:.3}"));
    }
    check(ok, lines.join("; "))
}

fn newton_behavior() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    let m = mesh(32);
    for pair in ElementPair::ALL {
        let config = NewtonConfig {
            pair,
            ..Default::default()
        };
        let r = newton_solve(&config, &m).map_err(|e| format!("{pair}: {e}"))?;
        let order = r.convergence_order().unwrap_or(f64::NAN);
        ok &= r.converged && r.iterations <= 20 && order >= 1.7;
        lines.push(format!("{pair}: {} iterations, order {order:.2}", r.iterations));
    }
    check(ok, lines.join("; "))
}

fn form_properties() -> Outcome {
    let mut failures = Vec::new();
    let mut note = |ok: bool, what: String| {
        if !ok {
            failures.push(what);
        }
    };
    // skew symmetry of c for pointwise divergence-free u, v and w zero on the boundary
    for pair in ElementPair::ALL {
        for n in [4, 8, 16] {
            let s = MixedSpace::new(mesh(n), pair);
            let vm = s.velocity.clone();
            let bump = |p: [f64; 2]| (1.0 - p[0] * p[0]) * (1.0 - p[1] * p[1]);
            let v = FeFunction::interpolate(vm.clone(), |p| [bump(p) * (p[0] + 0.3), bump(p) * p[1] * p[1]]);
            let w = FeFunction::interpolate(vm.clone(), |p| [bump(p) * p[0] * p[1], -bump(p) * (1.0 + p[0])]);
            for u in [
                FeFunction::interpolate(vm.clone(), |p| [p[1], -p[0]]),
                FeFunction::interpolate(vm.clone(), |_| [0.6, -1.1]),
            ] {
                let (nu, nv, nw) = (field_norm(&u, NormKind::H1), field_norm(&v, NormKind::H1), field_norm(&w, NormKind::H1));
                let cvv = trilinear_form(&u, &v, &v).unwrap();
                let skew = trilinear_form(&u, &v, &w).unwrap() + trilinear_form(&u, &w, &v).unwrap();
                note(cvv.abs() <= 1e-9 * nu * nv * nv, format!("c(u,v,v) = {cvv:e} ({pair}, n={n})"));
                note(skew.abs() <= 1e-9 * nu * nv * nw, format!("c(u,v,w)+c(u,w,v) = {skew:e} ({pair}, n={n})"));
            }
            let a = assemble_viscous(&vm, 1.0).unwrap();
            note(a.max_asymmetry() <= 1e-14, format!("viscous asymmetry {:e} ({pair})", a.max_asymmetry()));
        }
    }
    // stabilization: PSD on random vectors, zero on constants
    let s = MixedSpace::new(mesh(8), ElementPair::P1P1Stab);
    let g = assemble_stabilization(&s.pressure).unwrap();
    let c = vec![-2.5; s.n_pressure()];
    note(g.bilinear(&c, &c).abs() <= 1e-14, "G(1,1) nonzero".into());
    let mut seed = 3u64;
    for _ in 0..20 {
        let p: Vec<f64> = (0..s.n_pressure())
            .map(|_| {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        note(g.bilinear(&p, &p) >= -1e-14, "G(p,p) negative".into());
    }
    // quadrature monomials
    for d in 0..=12 {
        let rule = quadrature_rule(d).unwrap();
        for a in 0..=rule.exact_degree {
            for b in 0..=rule.exact_degree - a {
                let q = rule.integrate(|x, y| x.powi(a as i32) * y.powi(b as i32));
                // int x^a y^b over the reference triangle = a! b! / (a + b + 2)!
                let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
                let exact = fact(a) * fact(b) / fact(a + b + 2);
                note((q - exact).abs() <= 1e-13 * exact, format!("rule {d} on x^{a} y^{b}"));
            }
        }
    }
    // partition of unity of the nodal parts
    for family in [Family::P1, Family::P2, Family::P1Bubble] {
        let basis = ReferenceBasis::new(family);
        for i in 0..=10 {
            for j in 0..=10 - i {
                let (x, y) = (i as f64 / 10.0, j as f64 / 10.0);
                let v = basis.eval([1.0 - x - y, x, y]).unwrap();
                let nodal = if family == Family::P1Bubble { 3 } else { v.values.len() };
                let sum: f64 = v.values[..nodal].iter().sum();
                note((sum - 1.0).abs() <= 1e-14, format!("{family:?} sum {sum} at ({x}, {y})"));
            }
        }
    }
    if failures.is_empty() {
        Ok("trilinear skew symmetry, viscous symmetry, stabilization kernel, quadrature, partition of unity".into())
    } else {
        Err(failures.join("; "))
    }
}

fn infsup() -> Outcome {
    let beta = |pair, n| discrete_infsup(&mesh(n), pair).map_err(|e| e.to_string());
    let th: Vec<f64> = [4, 8, 16].iter().map(|&n| beta(ElementPair::TaylorHood, n)).collect::<Result<_, _>>()?;
    let p1: Vec<f64> = [4, 8, 16].iter().map(|&n| beta(ElementPair::P1P1Stab, n)).collect::<Result<_, _>>()?;
    let (lo, hi) = th.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &b| (l.min(b), h.max(b)));
    let variation = (hi - lo) / hi;
    let smaller = p1[2] * 10.0 <= th[2];
    let decreasing = p1.windows(2).all(|w| w[1] < w[0]);
    check(
        variation < 0.1 && (smaller || decreasing),
        format!("taylor-hood beta {th:.4?} (variation {:.2}%), P1/P1 beta {p1:.4?}", 100.0 * variation),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 cavity eoc in [0.48, 0.52], all pairs and corners", cavity_eoc),
        ("2 boundary data error equals sqrt(2h/3), eoc 1/2", boundary_error),
        ("3 discrete boundary data carries zero flux", compatibility),
        ("4 manufactured solution rates", mms_rates),
        ("5 Newton converges quadratically at n_div = 32", newton_behavior),
        ("6 form properties", form_properties),
        ("7 inf-sup diagnostic", infsup),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({secs:.1} s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.1} s): {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
