use masspcg::grid::{dot, GridVector};
use masspcg::krylov::{cg_solve_observed, pcg_solve_with};
use masspcg::operators::{laplacian_into, mass_into};
use masspcg::{
    apply_laplacian, cg_solve, predicted_vs_observed, GridSpec, Preconditioner, RightHandSide, SolveConfig,
    StoppingRule,
};

fn grid(dim: usize, n: usize) -> GridSpec {
    GridSpec::new(dim, n).unwrap()
}

fn cfg(pre: Preconditioner) -> SolveConfig {
    SolveConfig::default().with_preconditioner(pre)
}

#[test]
fn energy_functional_decreases_every_step() {
    for (spec, rhs) in [
        (grid(2, 24), RightHandSide::Ones),
        (grid(3, 10), RightHandSide::Random { seed: 9 }),
        (grid(1, 50), RightHandSide::Random { seed: 3 }),
    ] {
        let b = rhs.build(spec);
        for pre in [Preconditioner::None, Preconditioner::Mass] {
            let mut prev: Option<Vec<f64>> = None;
            let mut ax = vec![0.0; spec.len()];
            let mut ad = vec![0.0; spec.len()];
            let mut steps = 0;
            cg_solve_observed(spec, &b, &GridVector::zeros(spec), &cfg(pre), |view| {
                if let Some(x_old) = prev.as_ref() {
                    // φ(x_new) - φ(x_old) = ½<A d, d> - <b - A x_old, d>, d = x_new - x_old
                    let d: Vec<f64> = view.x.iter().zip(x_old).map(|(a, b)| a - b).collect();
                    laplacian_into(spec, x_old, &mut ax);
                    laplacian_into(spec, &d, &mut ad);
                    let residual: Vec<f64> = b.values().iter().zip(&ax).map(|(b, a)| b - a).collect();
                    let delta = 0.5 * dot(&ad, &d) - dot(&residual, &d);
                    assert!(delta < 0.0, "{spec} {pre:?} step {}: Δφ = {delta:e}", view.iteration);
                    steps += 1;
                }
                prev = Some(view.x.to_vec());
            })
            .unwrap();
            assert!(steps > 5);
        }
    }
}

#[test]
fn identity_preconditioner_reproduces_plain_cg() {
    let spec = grid(2, 20);
    let b = RightHandSide::Random { seed: 11 }.build(spec);
    let x0 = GridVector::zeros(spec);

    let mut plain = Vec::new();
    let plain_rep = cg_solve_observed(spec, &b, &x0, &cfg(Preconditioner::None), |v| plain.push(v.x.to_vec())).unwrap();
    let mut ident = Vec::new();
    let ident_rep = pcg_solve_with(
        spec,
        &b,
        &x0,
        &cfg(Preconditioner::None),
        |r, z| z.copy_from_slice(r),
        |v| ident.push(v.x.to_vec()),
    )
    .unwrap();

    assert_eq!(plain_rep.iterations, ident_rep.iterations);
    assert_eq!(plain.len(), ident.len());
    for (k, (a, b)) in plain.iter().zip(&ident).enumerate() {
        let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        assert!(diff <= 1e-12 * scale, "iterate {k}");
    }
    for (a, b) in plain_rep.residual_history.iter().zip(&ident_rep.residual_history) {
        assert!((a - b).abs() <= 1e-12 * a);
    }
}

#[test]
fn terminates_within_system_size() {
    for dim in 1..=2 {
        for n in 1..=4 {
            let spec = grid(dim, n);
            let b = RightHandSide::Random { seed: n as u64 }.build(spec);
            for pre in [Preconditioner::None, Preconditioner::Mass] {
                for stopping in [StoppingRule::Absolute, StoppingRule::Relative] {
                    let c = SolveConfig { tol: 1e-10, stopping, ..cfg(pre) };
                    let rep = cg_solve(spec, &b, &GridVector::zeros(spec), &c).unwrap();
                    assert!(rep.converged, "{spec} {pre:?}");
                    assert!(rep.iterations <= spec.len() + 2, "{spec} {pre:?}: {}", rep.iterations);
                }
            }
        }
    }
}

#[test]
fn mass_step_is_stateless() {
    let spec = grid(3, 9);
    let r = RightHandSide::Random { seed: 5 }.build(spec);
    let mut scratch = Vec::new();
    let mut z1 = vec![0.0; spec.len()];
    let mut z2 = vec![1.0; spec.len()];
    mass_into(spec, r.values(), &mut z1, &mut scratch);
    mass_into(spec, r.values(), &mut z2, &mut scratch);
    assert_eq!(z1, z2);
}

#[test]
fn converged_solution_verified_from_scratch() {
    for (spec, pre) in [
        (grid(2, 31), Preconditioner::None),
        (grid(2, 31), Preconditioner::Mass),
        (grid(3, 12), Preconditioner::Mass),
    ] {
        let b = RightHandSide::Ones.build(spec);
        let rep = cg_solve(spec, &b, &GridVector::zeros(spec), &cfg(pre)).unwrap();
        assert!(rep.converged);
        let ax = apply_laplacian(spec, &rep.solution).unwrap();
        let res = ax.axpy(-1.0, &b).unwrap().norm2();
        assert!(res < rep.threshold, "{spec}: {res:e} ≥ {:e}", rep.threshold);
        // History invariants.
        assert_eq!(rep.iterations + 1, rep.residual_history.len());
        assert_eq!(rep.residual_history[0], b.norm2());
        assert!(*rep.residual_history.last().unwrap() < rep.threshold);
    }
}

#[test]
fn nonzero_initial_guess() {
    let spec = grid(2, 10);
    let b = RightHandSide::Ones.build(spec);
    let x0 = RightHandSide::Random { seed: 1 }.build(spec);
    let rep = cg_solve(spec, &b, &x0, &cfg(Preconditioner::Mass)).unwrap();
    let r0 = apply_laplacian(spec, &x0).unwrap().axpy(-1.0, &b).unwrap().norm2();
    assert!((rep.residual_history[0] - r0).abs() <= 1e-12 * r0);
    assert!(rep.converged);
}

#[test]
fn table_two_smallest_case() {
    let spec = grid(2, 32);
    let cmp = predicted_vs_observed(spec, &RightHandSide::Ones.build(spec), &SolveConfig::default()).unwrap();
    assert!(cmp.both_converged());
    let within = |got: usize, want: f64| (got as f64 - want).abs() <= 0.1 * want;
    assert!(within(cmp.itn_unprec, 62.0), "{}", cmp.itn_unprec);
    assert!(within(cmp.itn_prec, 30.0), "{}", cmp.itn_prec);
    assert_eq!(format!("{:.2}", cmp.theoretical_ratio), "2.12");
}

#[test]
fn random_rhs_1d_ratio_envelope() {
    let spec = grid(1, 8);
    let b = RightHandSide::Random { seed: 42 }.build(spec);
    let cmp = predicted_vs_observed(spec, &b, &SolveConfig::default()).unwrap();
    assert!(cmp.both_converged());
    let upper = 2.0 * (8.0f64 / 3.0).sqrt();
    assert!((1.0..=upper).contains(&cmp.observed_ratio), "{}", cmp.observed_ratio);
}

#[test]
fn absolute_rule_needs_more_iterations_for_large_rhs() {
    // ‖b‖ = 32 for 2D n=32, so the absolute 1e-8 test is stricter than the relative one.
    let spec = grid(2, 32);
    let b = RightHandSide::Ones.build(spec);
    let rel = cg_solve(spec, &b, &GridVector::zeros(spec), &cfg(Preconditioner::None)).unwrap();
    let abs = cg_solve(
        spec,
        &b,
        &GridVector::zeros(spec),
        &SolveConfig { stopping: StoppingRule::Absolute, ..cfg(Preconditioner::None) },
    )
    .unwrap();
    assert!(abs.iterations > rel.iterations);
    assert!(abs.final_residual < 1e-8);
}
