//! Shared fixtures for unit tests.

use crate::models::{BosonicEnvParams, EnvParams, InitialStateParams, ModelConfig, SpinEnvParams};

/// Bosonic config with equal couplings `gamma0`, cutoff 1 and Ω = 1.
pub fn bosonic_cfg(p: f64, r: f64, gamma0: f64) -> ModelConfig {
    ModelConfig::new(
        InitialStateParams::new(p, r).unwrap(),
        EnvParams::Bosonic(BosonicEnvParams::equal_coupling(gamma0, 1.0)),
        0.5,
        0.5,
    )
}

/// Uniform spin config with Ω = 1.
pub fn spin_cfg(p: f64, r: f64, n: usize, lambda: f64, h: f64) -> ModelConfig {
    ModelConfig::new(
        InitialStateParams::new(p, r).unwrap(),
        EnvParams::Spin(SpinEnvParams::uniform(n, lambda, h).unwrap()),
        0.5,
        0.5,
    )
}
