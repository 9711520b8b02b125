//! Property tests over randomly drawn model parameters.

use proptest::prelude::*;

use qfim_lab::correlations;
use qfim_lab::estimation::{self, Param};
use qfim_lab::linalg::{self, CMat};
use qfim_lab::models::{
    self, BosonicEnvParams, EnvParams, InitialStateParams, ModelConfig, SpinEnvParams,
};

fn any_cfg() -> impl Strategy<Value = ModelConfig> {
    let initial = (0.0f64..=1.0, 0.01f64..=1.0)
        .prop_map(|(p, r)| InitialStateParams::new(p, r).expect("in range"));
    let bosonic = (0.0f64..0.2, 0.5f64..2.0)
        .prop_map(|(g0, cutoff)| EnvParams::Bosonic(BosonicEnvParams::equal_coupling(g0, cutoff)));
    let spin = (1usize..12, 0.0f64..0.4, 0.01f64..0.4)
        .prop_map(|(n, lambda, h)| EnvParams::Spin(SpinEnvParams::uniform(n, lambda, h).unwrap()));
    let env = prop_oneof![bosonic, spin];
    (initial, env, 0.0f64..4.0)
        .prop_map(|(initial, env, omega)| ModelConfig::new(initial, env, omega / 2.0, omega / 2.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn evolved_state_is_a_state(cfg in any_cfg(), t in 0.0f64..30.0) {
        let rho = models::evolved_state(t, &cfg).unwrap();
        let m = rho.matrix();
        prop_assert!(m.hermiticity_defect() <= 1e-12);
        prop_assert!((m.trace().re - 1.0).abs() <= 1e-12);
        let eig = linalg::eig_hermitian(m).unwrap();
        prop_assert!(*eig.values.last().unwrap() >= -1e-12);

        // Corner modulus composes exactly from the decoherence factor.
        let g = models::decoherence(t, &cfg).value;
        let expect = cfg.initial.r * (cfg.initial.p * (1.0 - cfg.initial.p)).sqrt() * g.abs();
        prop_assert!((m[(0, 3)].norm() - expect).abs() <= 1e-13);
    }

    #[test]
    fn decoherence_factor_stays_physical(cfg in any_cfg(), t in 0.0f64..50.0) {
        let g = models::decoherence(t, &cfg).value;
        match &cfg.env {
            EnvParams::Bosonic(_) => prop_assert!(g > 0.0 && g <= 1.0),
            EnvParams::Spin(_) => prop_assert!((-1.0..=1.0).contains(&g), "Q = {g}"),
        }
    }

    #[test]
    fn derivatives_match_finite_differences(cfg in any_cfg(), t in 0.0f64..10.0) {
        // Keep clear of the p boundary where the derivative is singular.
        prop_assume!(cfg.initial.p > 0.02 && cfg.initial.p < 0.98);
        prop_assume!(cfg.initial.r < 0.99);
        let (dp, dr) = models::state_param_derivatives(t, &cfg).unwrap();
        let step = 1e-6;
        for (param, analytic) in [(Param::P, dp), (Param::R, dr)] {
            let mut up = cfg.clone();
            let mut down = cfg.clone();
            match param {
                Param::P => {
                    up.initial.p += step;
                    down.initial.p -= step;
                }
                Param::R => {
                    up.initial.r += step;
                    down.initial.r -= step;
                }
            }
            let fd = models::evolved_state(t, &up)
                .unwrap()
                .into_matrix()
                .sub(models::evolved_state(t, &down).unwrap().matrix())
                .scale_re(1.0 / (2.0 * step));
            prop_assert!(fd.sub(&analytic).max_abs() <= 1e-7);
        }
    }

    #[test]
    fn qfi_closed_equals_numeric_oracle(cfg in any_cfg(), t in 0.0f64..20.0) {
        prop_assume!(cfg.initial.p > 0.02 && cfg.initial.p < 0.98);
        prop_assume!(cfg.initial.r < 0.995);
        let rho = models::evolved_state(t, &cfg).unwrap();
        for param in [Param::P, Param::R] {
            let drho = models::state_derivative(param, t, &cfg).unwrap();
            let numeric = estimation::qfi_numeric(&rho, &drho).unwrap();
            let closed = estimation::qfi_closed(param, t, &cfg).unwrap();
            prop_assert!(
                (closed - numeric).abs() / numeric.max(1.0) <= 1e-8,
                "{}: closed {closed} vs numeric {numeric}",
                param.label()
            );
        }
    }

    #[test]
    fn qfim_is_psd_and_bounds_are_ordered(cfg in any_cfg(), t in 0.0f64..20.0) {
        prop_assume!(cfg.initial.p > 0.02 && cfg.initial.p < 0.98);
        prop_assume!(cfg.initial.r < 0.995);
        let f = estimation::qfim(t, &cfg).unwrap();
        prop_assert!(f.min_eigenvalue() >= -1e-10);
        if let Ok(rep) = estimation::crb_report(t, &cfg) {
            prop_assert!(rep.delta_p_indep <= rep.delta_p_simul + 1e-12);
            prop_assert!(rep.delta_r_indep <= rep.delta_r_simul + 1e-12);
        }
    }

    #[test]
    fn correlations_stay_in_range(cfg in any_cfg(), t in 0.0f64..20.0) {
        let rho = models::evolved_state(t, &cfg).unwrap();
        let ip = correlations::ip_eigen(&rho).unwrap();
        prop_assert!(ip >= -1e-12);
        let lqu = correlations::lqu_numeric(&rho).unwrap();
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&lqu), "LQU = {lqu}");
        let purity = correlations::purity_state(&rho);
        prop_assert!((0.25 - 1e-12..=1.0 + 1e-12).contains(&purity));
        let rho0 = models::initial_state(&cfg.initial).unwrap();
        let d = correlations::trace_distance(&rho0, &rho);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&d));
        let f = correlations::fidelity_uhlmann(&rho0, &rho).unwrap();
        prop_assert!((-1e-10..=1.0 + 1e-9).contains(&f), "fidelity = {f}");
    }

    #[test]
    fn sqrt_reconstructs_psd_matrices(diag in proptest::collection::vec(0.0f64..2.0, 4)) {
        // Random PSD matrix via a random diagonal conjugated by the
        // eigenvectors of a random Hermitian matrix is overkill at this
        // size; a tridiagonal-ish Hermitian built from the diagonal works.
        let mut m = CMat::from_diag(&diag);
        m[(0, 1)] = num_complex::Complex64::new(0.1 * diag[0], 0.05 * diag[1]);
        m[(1, 0)] = m[(0, 1)].conj();
        let m = m.matmul(&m.adjoint()); // guarantees PSD
        let s = linalg::matrix_sqrt_psd(&m.hermitize()).unwrap();
        prop_assert!(s.matmul(&s).sub(&m).max_abs() <= 1e-9);
    }
}
