use masspcg::oracle::rayleigh_eigenvalues;
use masspcg::spectrum::{
    asymptotic_ratio, exhaustive_extremes, find_extremes, for_each_tuple, full_spectrum,
};
use masspcg::{eigenvalue, ratio_report, spectrum_report, GridSpec, OperatorKind};

fn grid(dim: usize, n: usize) -> GridSpec {
    GridSpec::new(dim, n).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Condition numbers published for n = 8, 16, 32: κ(A) and κ(T_d) per dimension.
const KAPPA: [f64; 3] = [32.1634, 116.4612, 440.6886];
const KAPPA_P: [[f64; 3]; 3] = [
    [12.6914, 44.2414, 165.8836],
    [7.6173, 26.3451, 98.3943],
    [5.5393, 18.8900, 70.1771],
];

#[test]
fn published_condition_numbers() {
    for (j, n) in [8, 16, 32].into_iter().enumerate() {
        for dim in 1..=3 {
            let spec = grid(dim, n);
            let a = spectrum_report(OperatorKind::Laplacian, spec);
            let t = spectrum_report(OperatorKind::Preconditioned, spec);
            assert!((a.kappa - KAPPA[j]).abs() < 5e-5, "{spec}: κ = {}", a.kappa);
            assert!((t.kappa - KAPPA_P[dim - 1][j]).abs() < 5e-5, "{spec}: κ_p = {}", t.kappa);
        }
    }
}

#[test]
fn laplacian_condition_matches_lemma_form() {
    for dim in 1..=3 {
        for n in [1, 2, 7, 40] {
            let spec = grid(dim, n);
            let h = spec.h();
            let pi = std::f64::consts::PI;
            let closed = (1.0 - (pi * h * n as f64).cos()) / (1.0 - (pi * h).cos());
            assert!(rel(spectrum_report(OperatorKind::Laplacian, spec).kappa, closed) < 1e-10);
        }
    }
}

#[test]
fn ratio_examples() {
    let r1 = ratio_report(grid(1, 32));
    assert!((r1.r - 440.6886 / 165.8836).abs() < 1e-4);
    assert_eq!(format!("{:.1}", r1.r), "2.7");
    let r3 = ratio_report(grid(3, 8));
    assert_eq!(format!("{:.1}", r3.r), "5.8");
    assert_eq!(r3.asymptotic_limit, 512.0 / 81.0);
    let r2 = ratio_report(grid(2, 1023));
    assert!(rel(r2.r, 4.5) < 0.01, "r_2(1023) = {}", r2.r);
    assert_eq!(r2.predicted_iter_ratio, r2.r.sqrt());
}

#[test]
fn ratio_exceeds_one_from_n_2() {
    for dim in 1..=3 {
        for n in 2..=40 {
            let r = ratio_report(grid(dim, n));
            assert!(r.r > 1.0, "{}: r = {}", r.spec, r.r);
        }
    }
}

#[test]
fn ratio_increases_towards_limit() {
    for dim in 1..=3 {
        let rs: Vec<f64> = [8, 16, 32, 64, 128].iter().map(|&n| ratio_report(grid(dim, n)).r).collect();
        assert!(rs.windows(2).all(|w| w[0] < w[1]), "{dim}D: {rs:?}");
        assert!(rs.iter().all(|&r| r < asymptotic_ratio(dim)));
    }
}

#[test]
fn product_structure() {
    for dim in 1..=3 {
        for n in [1, 3, 8, 17, 32] {
            if dim == 3 && n > 17 {
                continue;
            }
            let spec = grid(dim, n);
            for_each_tuple(n, dim, |k| {
                let t = eigenvalue(OperatorKind::Preconditioned, spec, k).unwrap();
                let m = eigenvalue(OperatorKind::Mass, spec, k).unwrap();
                let a = eigenvalue(OperatorKind::Laplacian, spec, k).unwrap();
                assert!(rel(t, m * a) <= 1e-14, "{spec} {k:?}");
            });
        }
    }
}

#[test]
fn fast_extremes_match_full_enumeration() {
    for dim in 1..=3 {
        for n in 1..=16 {
            let spec = grid(dim, n);
            for kind in OperatorKind::ALL {
                let fast = find_extremes(kind, spec);
                let full = exhaustive_extremes(kind, spec).unwrap();
                assert_eq!(fast.lambda_max, full.lambda_max, "{kind} {spec}");
                assert_eq!(fast.lambda_min, full.lambda_min, "{kind} {spec}");
            }
        }
    }
}

#[test]
fn closed_form_bracket_agrees_with_scan() {
    for dim in 1..=3 {
        for n in 8..=64 {
            let rep = spectrum_report(OperatorKind::Preconditioned, grid(dim, n));
            let cf = rep.closed_form.expect("preconditioned report carries closed form");
            assert!(cf.bracket_discrepancy <= 1e-12, "{dim}D n={n}: {:e}", cf.bracket_discrepancy);
        }
    }
}

#[test]
fn literal_integer_part_discrepancy_is_reported() {
    // 1D: [2/(3h)] lands on the maximiser unless n ≡ 0 (mod 3).
    let cf = spectrum_report(OperatorKind::Preconditioned, grid(1, 8)).closed_form.unwrap();
    assert_eq!(cf.index, 6);
    assert!(cf.literal_discrepancy <= 1e-12);
    let cf = spectrum_report(OperatorKind::Preconditioned, grid(1, 9)).closed_form.unwrap();
    assert!(cf.literal_discrepancy > 1e-3);

    // 2D n=8: the maximum is at (4, 5), which a single repeated index cannot reach.
    let rep = spectrum_report(OperatorKind::Preconditioned, grid(2, 8));
    let cf = rep.closed_form.unwrap();
    assert_eq!(rep.argmax, vec![4, 5]);
    assert!((cf.literal_kappa - 7.4915).abs() < 5e-5);
    assert!((rep.kappa - 7.6173).abs() < 5e-5);
}

#[test]
fn three_d_maximiser_index() {
    // β = [arccos(1/4)/(πh)] at n = 64 is 27; the scan lands on permutations of (27, 27, 28).
    let rep = spectrum_report(OperatorKind::Preconditioned, grid(3, 64));
    assert_eq!(rep.closed_form.unwrap().integer_part, 27);
    let mut k = rep.argmax.clone();
    k.sort_unstable();
    assert_eq!(k, vec![27, 27, 28]);
}

#[test]
fn full_spectrum_matches_rayleigh_quotients() {
    for dim in 1..=3 {
        for n in 1..=8 {
            let spec = grid(dim, n);
            for kind in OperatorKind::ALL {
                let closed = full_spectrum(kind, spec).unwrap();
                let oracle = rayleigh_eigenvalues(kind, spec).unwrap();
                let mut quotients: Vec<f64> = oracle.iter().map(|e| e.lambda).collect();
                quotients.sort_by(f64::total_cmp);
                for (c, q) in closed.iter().zip(&quotients) {
                    assert!(rel(*c, *q) <= 1e-10, "{kind} {spec}: {c} vs {q}");
                }
                assert!(oracle.iter().all(|e| e.residual <= 1e-10 * e.lambda.max(1.0)));
            }
        }
    }
}

#[test]
fn eigenvalues_match_dense_product_2d() {
    let spec = grid(2, 4);
    let oracle = rayleigh_eigenvalues(OperatorKind::Preconditioned, spec).unwrap();
    for e in &oracle {
        let closed = eigenvalue(OperatorKind::Preconditioned, spec, &e.k).unwrap();
        assert!(rel(closed, e.lambda) <= 1e-10);
    }
}

#[test]
fn mass_rayleigh_2d() {
    let spec = grid(2, 2);
    for e in rayleigh_eigenvalues(OperatorKind::Mass, spec).unwrap() {
        let closed = eigenvalue(OperatorKind::Mass, spec, &e.k).unwrap();
        assert!(rel(closed, e.lambda) <= 1e-12);
    }
}

#[test]
fn preconditioned_rayleigh_1d_is_product() {
    let spec = grid(1, 4);
    let a = rayleigh_eigenvalues(OperatorKind::Laplacian, spec).unwrap();
    let m = rayleigh_eigenvalues(OperatorKind::Mass, spec).unwrap();
    let t = rayleigh_eigenvalues(OperatorKind::Preconditioned, spec).unwrap();
    for ((a, m), t) in a.iter().zip(&m).zip(&t) {
        assert!(rel(t.lambda, a.lambda * m.lambda) <= 1e-12);
        let closed = eigenvalue(OperatorKind::Preconditioned, spec, &t.k).unwrap();
        assert!(rel(t.lambda, closed) <= 1e-12);
    }
}

#[test]
fn figure_one_data() {
    let spec = grid(2, 32);
    let values = full_spectrum(OperatorKind::Preconditioned, spec).unwrap();
    assert_eq!(values.len(), 1024);
    let rep = spectrum_report(OperatorKind::Preconditioned, spec);
    assert_eq!(values[0], rep.lambda_min);
    assert_eq!(*values.last().unwrap(), rep.lambda_max);
    assert!(values.windows(2).all(|w| w[0] <= w[1]));

    // Clustering near 1: 618 of 1024 eigenvalues lie in [0.5, 1.5]
    // (count taken from an independent NumPy enumeration).
    let clustered = values.iter().filter(|&&v| (0.5..=1.5).contains(&v)).count();
    assert_eq!(clustered, 618);
    assert!(clustered * 2 >= values.len());
}
