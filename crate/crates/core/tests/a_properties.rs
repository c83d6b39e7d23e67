use std::sync::Arc;

use proptest::prelude::*;

use migfem::boundary::{detect_crossing, green_vector};
use migfem::cli::{parse_config, RunConfig};
use migfem::fem::{reference_basis, residual_norm, solve_banded, BandedMatrix};
use migfem::model::{effective_volatility, smoothed_heaviside};
use migfem::stepper::{run_solver, BoundaryCondition, TimeGrid};
use migfem::verify::{error_norms, error_rule, Analytic};
use migfem::{Mesh, ModelParams, SolutionField};

fn banded_system() -> impl Strategy<Value = (BandedMatrix, Vec<f64>)> {
    (3usize..40, 0usize..4, 0usize..4).prop_flat_map(|(n, kl, ku)| {
        let entries = prop::collection::vec(-1.0..1.0f64, n * (kl + ku + 1));
        let rhs = prop::collection::vec(-5.0..5.0f64, n);
        (entries, rhs).prop_map(move |(e, rhs)| {
            let mut m = BandedMatrix::zeros(n, kl, ku);
            for i in 0..n {
                for (k, j) in m.row_columns(i).enumerate() {
                    m.set(i, j, e[i * (kl + ku + 1) + k]);
                }
                // diagonal dominance keeps the system well conditioned
                m.add(i, i, (kl + ku + 1) as f64 + 0.5);
            }
            (m, rhs)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn banded_solve_has_small_residual((m, rhs) in banded_system()) {
        let x = solve_banded(&m, &rhs).unwrap();
        prop_assert!(residual_norm(&m, &x, &rhs) <= 1e-12);
    }

    #[test]
    fn heaviside_is_a_monotone_ramp(a in -0.5..0.5f64, b in -0.5..0.5f64, eps in 1e-4..0.3f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let hl = smoothed_heaviside(lo, eps).unwrap();
        let hh = smoothed_heaviside(hi, eps).unwrap();
        prop_assert!((0.0..=1.0).contains(&hl) && (0.0..=1.0).contains(&hh));
        prop_assert!(hl <= hh);
    }

    #[test]
    fn volatility_stays_between_the_grades(u in -2.0..3.0f64, t in 0.0..1.0f64) {
        let p = ModelParams::default();
        let s = effective_volatility(u, t, &p).unwrap();
        prop_assert!(s >= p.sigma_high_grade && s <= p.sigma_low_grade);
    }

    #[test]
    fn shape_functions_partition_unity(order in 1usize..=4, xi in -1.0..=1.0f64) {
        let (v, d) = reference_basis(order, xi).unwrap();
        prop_assert!((v.iter().sum::<f64>() - 1.0).abs() <= 1e-13);
        prop_assert!(d.iter().sum::<f64>().abs() <= 1e-12);
    }

    #[test]
    fn interpolation_reproduces_degree_r_polynomials(
        order in 1usize..=4,
        coeffs in prop::collection::vec(-2.0..2.0f64, 5),
        n in 1usize..12,
        x in -1.0..=1.0f64,
    ) {
        let p = |x: f64| (0..=order).map(|k| coeffs[k] * x.powi(k as i32)).sum::<f64>();
        let mesh = Arc::new(Mesh::uniform(-1.0, 1.0, n, order).unwrap());
        let f = SolutionField::interpolate(mesh, p, 0.0).unwrap();
        prop_assert!((f.value(x).unwrap() - p(x)).abs() <= 1e-11);
    }

    #[test]
    fn h1_norm_dominates_l2(a in -1.0..1.0f64, b in -1.0..1.0f64, k in 0.5..4.0f64) {
        let mesh = Arc::new(Mesh::uniform(0.0, 2.0, 9, 2).unwrap());
        let f = SolutionField::interpolate(mesh.clone(), |x| a * x + b, 0.0).unwrap();
        let reference = Analytic { f: |x: f64| (k * x).sin(), df: |x: f64| k * (k * x).cos(), domain: (0.0, 2.0) };
        let r = error_norms(&f, &reference, &error_rule(&mesh)).unwrap();
        prop_assert!(r.h1 >= r.l2 && r.l2 >= 0.0 && r.linf >= 0.0);
    }

    #[test]
    fn config_round_trip(
        rate in 0.0..1.0f64,
        low in 0.2..0.5f64,
        ratio in 0.1..1.0f64,
        gamma in 0.05..0.95f64,
        n in 1usize..2000,
        order in 1usize..=4,
    ) {
        let mut c = RunConfig::default();
        c.model.rate = rate;
        c.model.sigma_low_grade = low;
        c.model.sigma_high_grade = low * ratio;
        c.model.gamma = gamma;
        c.mesh.n_elements = n;
        c.mesh.order = order;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, c.to_json().unwrap()).unwrap();
        prop_assert_eq!(parse_config(Some(&path), &[]).unwrap(), c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn green_vectors_reproduce_point_values(step in 1usize..=16, s in -4.0..=4.0f64, order in 1usize..=3) {
        let params = ModelParams::default();
        let mesh = Arc::new(Mesh::uniform(-4.0, 4.0, 40, order).unwrap());
        let history = run_solver(&params, mesh, TimeGrid::new(1.0, 16).unwrap(),
            &BoundaryCondition::frozen_payoff(&params)).unwrap();
        let system = history.step_system(step).unwrap();
        let field = &history.fields()[step];
        let g = green_vector(&system.matrix, field, s).unwrap();
        prop_assert!((g.apply(&system.rhs) - field.value(s).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn crossing_is_a_root_of_the_interpolant(shift in -0.5..0.5f64, n in 8usize..200) {
        let params = ModelParams { delta: 0.0, ..ModelParams::default() };
        let mesh = Arc::new(Mesh::uniform(-4.0, 4.0, n, 1).unwrap());
        let f = SolutionField::interpolate(mesh, |x| (x - shift).exp().min(1.0), 0.0).unwrap();
        let c = detect_crossing(&f, 0.0, &params).unwrap();
        prop_assert!((f.value(c.s_f).unwrap() - 0.8).abs() <= 1e-12);
        prop_assert!(!c.multiple);
    }
}
