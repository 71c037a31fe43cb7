use std::sync::Arc;

use cavity_fem::boundary::{interpolate_boundary_data, BoundaryTrace};
use cavity_fem::postprocess::{discrete_infsup, field_norm, integrate_scalar, mms_errors, NormKind};
use cavity_fem::solver::{newton_iterate, stokes_solve, FlowProblem, InitialGuess};
use cavity_fem::assembly::no_forcing;
use cavity_fem::{
    build_uniform_square_mesh, newton_solve, CornerConvention, ElementPair, LidBoundaryData, Mesh, MixedSpace, NewtonConfig,
};

fn mesh(n: usize) -> Arc<Mesh> {
    Arc::new(build_uniform_square_mesh(n).unwrap())
}

#[test]
fn cavity_newton_converges_for_every_pair_and_corner() {
    for pair in ElementPair::ALL {
        for corner in CornerConvention::ALL {
            let r = newton_solve(
                &NewtonConfig {
                    pair,
                    corner,
                    ..Default::default()
                },
                &mesh(8),
            )
            .unwrap();
            assert!(r.converged && !r.diverged, "{pair} {corner}");
            assert!(*r.relative_increments.last().unwrap() < 1e-9);
            assert!(r.iterations <= 20);
            // zero-mean pressure
            assert!(integrate_scalar(&r.pressure).abs() < 1e-10);
        }
    }
}

#[test]
fn boundary_lift_start_also_converges() {
    let base = NewtonConfig {
        pair: ElementPair::TaylorHood,
        ..Default::default()
    };
    let stokes = newton_solve(&base, &mesh(8)).unwrap();
    let lift = newton_solve(
        &NewtonConfig {
            initial_guess: InitialGuess::BoundaryLift,
            ..base
        },
        &mesh(8),
    )
    .unwrap();
    assert!(lift.converged);
    let diff = stokes.velocity.difference(&lift.velocity).unwrap();
    assert!(field_norm(&diff, NormKind::H1) < 1e-8 * field_norm(&stokes.velocity, NormKind::H1));
}

#[test]
fn higher_viscosity_is_closer_to_stokes() {
    let m = mesh(8);
    let space = MixedSpace::new(m.clone(), ElementPair::Mini);
    let data = LidBoundaryData::default();
    let trace = interpolate_boundary_data(&data, &space.velocity);
    let gap = |nu: f64| {
        let (stokes, _) = stokes_solve(&space, nu, &no_forcing, &trace).unwrap();
        let r = newton_solve(
            &NewtonConfig {
                nu,
                pair: ElementPair::Mini,
                ..Default::default()
            },
            &m,
        )
        .unwrap();
        field_norm(&stokes.difference(&r.velocity).unwrap(), NormKind::H1)
    };
    assert!(gap(10.0) < gap(1.0));
}

#[test]
fn stokes_reproduces_quadratic_flow_with_taylor_hood() {
    // u = (y^2, x^2), p = 2x + 2y solves Stokes with nu = 1, f = (0, 0) + grad p - lap u = 0
    let space = MixedSpace::new(mesh(4), ElementPair::TaylorHood);
    let exact = |p: [f64; 2]| [p[1] * p[1], p[0] * p[0]];
    let trace = BoundaryTrace::from_fn(space.velocity.clone(), exact);
    let (u, p) = stokes_solve(&space, 1.0, &no_forcing, &trace).unwrap();
    let e = cavity_fem::postprocess::error_norm(
        &u,
        |x| cavity_fem::field::PointValue {
            value: exact(x),
            grad: [[0.0, 2.0 * x[1]], [2.0 * x[0], 0.0]],
        },
        NormKind::H1,
    );
    assert!(e < 1e-10, "{e}");
    let pe = cavity_fem::postprocess::error_norm(
        &p,
        |x| cavity_fem::field::PointValue {
            value: [2.0 * x[0] + 2.0 * x[1], 0.0],
            grad: [[2.0, 2.0], [0.0; 2]],
        },
        NormKind::L2,
    );
    assert!(pe < 1e-9, "{pe}");
}

#[test]
fn manufactured_errors_decrease() {
    for pair in ElementPair::ALL {
        let e = mms_errors(pair, 1.0, &[4, 8]).unwrap();
        assert!(e[1].h1_semi_velocity < e[0].h1_semi_velocity);
        assert!(e[1].l2_velocity < e[0].l2_velocity);
    }
}

#[test]
fn newton_with_manufactured_forcing() {
    let config = NewtonConfig::default();
    let space = MixedSpace::new(mesh(4), config.pair);
    let zero = BoundaryTrace::zero(space.velocity.clone());
    let f = |p: [f64; 2]| [10.0 * p[1], -5.0 * p[0] * p[0]];
    let r = newton_iterate(
        &FlowProblem {
            space: &space,
            forcing: &f,
            trace: &zero,
        },
        &config,
    )
    .unwrap();
    assert!(r.converged);
    assert!(field_norm(&r.velocity, NormKind::L2) > 0.0);
}

#[test]
fn infsup_separates_stable_and_unstable_pairs() {
    let m = mesh(8);
    let th = discrete_infsup(&m, ElementPair::TaylorHood).unwrap();
    let mini = discrete_infsup(&m, ElementPair::Mini).unwrap();
    let p1 = discrete_infsup(&m, ElementPair::P1P1Stab).unwrap();
    assert!(th > 0.2 && mini > 0.2);
    assert!(p1 < 0.1 * th);
}
