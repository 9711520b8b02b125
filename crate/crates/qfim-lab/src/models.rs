//! Initial state, decoherence factors and evolved density matrices for the
//! two dephasing models (bosonic Ohmic bath, spin bath), plus the analytic
//! parameter derivatives of the evolved state.
//!
//! The initial two-qubit state is `(1-r)/4 · I + r |v><v|` with
//! `|v> = sqrt(1-p)|00> + sqrt(p)|11>`. Both environments leave the state
//! X-shaped for all times: constant diagonal
//! `((1-r)/4 + r(1-p), (1-r)/4, (1-r)/4, (1-r)/4 + rp)` and corners
//! `r sqrt(p(1-p)) e^{∓iΩt} g(t)`, where `g(t)` is the scalar decoherence
//! factor of the chosen environment and `Ω = Ω₁ + Ω₂`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::CMat;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("parameter {name} = {value} out of range: {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("spin environment lists must all have length N = {n}, got {got}")]
    SpinListLength { n: usize, got: usize },
    #[error("spin {index} has h^2 + (epsilon+lambda)^2 = 0 (undefined precession)")]
    DegenerateSpin { index: usize },
    #[error("d(rho)/dp is singular at p = {p} (corner derivative diverges)")]
    DerivativeSingularAtBoundary { p: f64 },
    #[error("config error: {0}")]
    Config(String),
}

/// Which of the two encoded parameters an SLD, QFI or derivative refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    /// Entanglement degree of the initial state.
    P,
    /// Mixedness parameter of the initial state.
    R,
}

impl Param {
    pub fn label(&self) -> &'static str {
        match self {
            Param::P => "p",
            Param::R => "r",
        }
    }
}

/// Entanglement degree `p` in `[0,1]` and mixedness `r` in `(0,1]` of the
/// initial state. `e = (1-r)/4` is always recomputed, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialStateParams {
    pub p: f64,
    pub r: f64,
}

impl InitialStateParams {
    pub fn new(p: f64, r: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(ModelError::OutOfRange {
                name: "p",
                value: p,
                expected: "0 <= p <= 1",
            });
        }
        if !(r > 0.0 && r <= 1.0) {
            return Err(ModelError::OutOfRange {
                name: "r",
                value: r,
                expected: "0 < r <= 1",
            });
        }
        Ok(Self { p, r })
    }

    /// Uniform-mixture weight `(1-r)/4` of each computational basis state.
    pub fn e(&self) -> f64 {
        (1.0 - self.r) / 4.0
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        Self::new(self.p, self.r).map(|_| ())
    }
}

/// Dimensionless dissipative constants and frequency cutoff of the Ohmic
/// bosonic bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BosonicEnvParams {
    pub gamma01: f64,
    pub gamma02: f64,
    pub gamma012: f64,
    /// Environmental frequency cutoff (1/time).
    pub cutoff: f64,
}

impl BosonicEnvParams {
    /// Equal couplings `gamma01 = gamma02 = gamma012 = gamma0`.
    pub fn equal_coupling(gamma0: f64, cutoff: f64) -> Self {
        Self {
            gamma01: gamma0,
            gamma02: gamma0,
            gamma012: gamma0,
            cutoff,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, v) in [
            ("gamma01", self.gamma01),
            ("gamma02", self.gamma02),
            ("gamma012", self.gamma012),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(ModelError::OutOfRange {
                    name,
                    value: v,
                    expected: ">= 0",
                });
            }
        }
        if self.cutoff.is_nan() || self.cutoff <= 0.0 {
            return Err(ModelError::OutOfRange {
                name: "cutoff",
                value: self.cutoff,
                expected: "> 0",
            });
        }
        Ok(())
    }
}

/// Per-spin couplings of the spin bath: `epsilon` to qubit 1, `lambda` to
/// qubit 2, tunneling `h` in the bath's own Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinCoupling {
    pub epsilon: f64,
    pub lambda: f64,
    pub h: f64,
}

/// Spin environment of N bath spins.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinEnvParams {
    spins: Vec<SpinCoupling>,
}

impl SpinEnvParams {
    /// All N spins share `epsilon = lambda` and the same tunneling `h`.
    pub fn uniform(n: usize, lambda: f64, h: f64) -> Result<Self, ModelError> {
        if n < 1 {
            return Err(ModelError::OutOfRange {
                name: "N",
                value: n as f64,
                expected: ">= 1",
            });
        }
        let env = Self {
            spins: vec![
                SpinCoupling {
                    epsilon: lambda,
                    lambda,
                    h
                };
                n
            ],
        };
        env.validate()?;
        Ok(env)
    }

    pub fn heterogeneous(spins: Vec<SpinCoupling>) -> Result<Self, ModelError> {
        let env = Self { spins };
        env.validate()?;
        Ok(env)
    }

    pub fn n(&self) -> usize {
        self.spins.len()
    }

    pub fn spins(&self) -> &[SpinCoupling] {
        &self.spins
    }

    /// `Some((lambda, h))` when every spin has `epsilon = lambda` and the
    /// same `(lambda, h)` pair, the regime with a well-defined oscillation
    /// period.
    pub fn uniform_couplings(&self) -> Option<(f64, f64)> {
        let first = self.spins.first()?;
        if first.epsilon != first.lambda {
            return None;
        }
        let (lambda, h) = (first.lambda, first.h);
        self.spins
            .iter()
            .all(|s| s.epsilon == lambda && s.lambda == lambda && s.h == h)
            .then_some((lambda, h))
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.spins.is_empty() {
            return Err(ModelError::OutOfRange {
                name: "N",
                value: 0.0,
                expected: ">= 1",
            });
        }
        for (i, s) in self.spins.iter().enumerate() {
            let coupling = s.epsilon + s.lambda;
            if s.h * s.h + coupling * coupling <= 0.0 {
                return Err(ModelError::DegenerateSpin { index: i });
            }
        }
        Ok(())
    }
}

/// Environment selector: exactly one of the two baths.
#[derive(Debug, Clone, PartialEq)]
pub enum EnvParams {
    Bosonic(BosonicEnvParams),
    Spin(SpinEnvParams),
}

/// Full model configuration: initial state, one environment and the qubit
/// frequencies entering the corner phase through `Ω = omega1 + omega2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub initial: InitialStateParams,
    pub env: EnvParams,
    pub omega1: f64,
    pub omega2: f64,
    /// Qubit-qubit coupling strength. Carried through configs for
    /// completeness; it never enters the reduced X-state dynamics, so no
    /// computation reads it.
    pub qubit_coupling: Option<f64>,
}

impl ModelConfig {
    pub fn new(initial: InitialStateParams, env: EnvParams, omega1: f64, omega2: f64) -> Self {
        Self {
            initial,
            env,
            omega1,
            omega2,
            qubit_coupling: None,
        }
    }

    /// Total phase frequency of the coherences.
    pub fn omega(&self) -> f64 {
        self.omega1 + self.omega2
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.initial.validate()?;
        match &self.env {
            EnvParams::Bosonic(b) => b.validate(),
            EnvParams::Spin(s) => s.validate(),
        }
    }

    pub fn from_json(json: &str) -> Result<Self, ModelError> {
        let raw: ConfigJson =
            serde_json::from_str(json).map_err(|e| ModelError::Config(e.to_string()))?;
        raw.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ConfigJson::from(self)).expect("config serializes")
    }
}

impl Serialize for ModelConfig {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ConfigJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ModelConfig {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = ConfigJson::deserialize(deserializer)?;
        raw.try_into().map_err(serde::de::Error::custom)
    }
}

/// Scalar decoherence factor at one instant. Bosonic baths keep `0 < g <= 1`
/// and expose the three per-channel components; the spin bath oscillates in
/// `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceFactor {
    pub value: f64,
    pub bosonic_components: Option<(f64, f64, f64)>,
}

/// A validated two-qubit state: 4x4 Hermitian, PSD, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMat);

impl DensityMatrix {
    /// Wrap a raw matrix, checking hermiticity, trace and positivity.
    pub fn new(m: CMat) -> Result<Self, ModelError> {
        let defect = m.hermiticity_defect();
        if defect > 1e-10 {
            return Err(ModelError::Config(format!(
                "density matrix not Hermitian (defect {defect:.3e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(ModelError::Config(format!(
                "density matrix trace {tr} != 1"
            )));
        }
        let eig =
            crate::linalg::eig_hermitian(&m).map_err(|e| ModelError::Config(e.to_string()))?;
        if let Some(&min) = eig.values.last() {
            if min < -1e-10 {
                return Err(ModelError::Config(format!(
                    "density matrix has negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }
}

/// `rho(0) = (1-r)/4 I + r |v><v|`, an X-shaped mixture of the identity and
/// the partially entangled pure state `|v>`.
pub fn initial_state(params: &InitialStateParams) -> Result<DensityMatrix, ModelError> {
    params.validate()?;
    let (p, r) = (params.p, params.r);
    let e = params.e();
    let corner = r * (p * (1.0 - p)).sqrt();
    let mut m = CMat::zeros(4);
    m[(0, 0)] = Complex64::new(e + r * (1.0 - p), 0.0);
    m[(1, 1)] = Complex64::new(e, 0.0);
    m[(2, 2)] = Complex64::new(e, 0.0);
    m[(3, 3)] = Complex64::new(e + r * p, 0.0);
    m[(0, 3)] = Complex64::new(corner, 0.0);
    m[(3, 0)] = Complex64::new(corner, 0.0);
    DensityMatrix::new(m)
}

/// Bosonic decoherence: each channel decays as `(1 + Λ²t²)^(-2γ)` and the
/// aggregate is `Γ₁ Γ₂ Γ₁₂²`.
pub fn bosonic_decoherence(t: f64, env: &BosonicEnvParams) -> DecoherenceFactor {
    let log_term = (1.0 + env.cutoff * env.cutoff * t * t).ln();
    let gamma1 = (-2.0 * env.gamma01 * log_term).exp();
    let gamma2 = (-2.0 * env.gamma02 * log_term).exp();
    let gamma12 = (-2.0 * env.gamma012 * log_term).exp();
    DecoherenceFactor {
        value: gamma1 * gamma2 * gamma12 * gamma12,
        bosonic_components: Some((gamma1, gamma2, gamma12)),
    }
}

/// Spin-bath decoherence: product over bath spins of
/// `1 - [2(ε+λ)²/(h²+(ε+λ)²)] sin²(t √(h²+(ε+λ)²))`.
pub fn spin_decoherence(t: f64, env: &SpinEnvParams) -> DecoherenceFactor {
    let mut q = 1.0;
    for s in env.spins() {
        let coupling = s.epsilon + s.lambda;
        let c2 = coupling * coupling;
        let freq2 = s.h * s.h + c2;
        let sin = (t * freq2.sqrt()).sin();
        q *= 1.0 - (2.0 * c2 / freq2) * sin * sin;
    }
    DecoherenceFactor {
        value: q,
        bosonic_components: None,
    }
}

/// Decoherence factor `g(t)` of whichever environment the config selects.
pub fn decoherence(t: f64, cfg: &ModelConfig) -> DecoherenceFactor {
    match &cfg.env {
        EnvParams::Bosonic(b) => bosonic_decoherence(t, b),
        EnvParams::Spin(s) => spin_decoherence(t, s),
    }
}

/// Evolved X-state at time `t`: the diagonal never moves, the corners pick
/// up the phase `e^{∓iΩt}` and shrink by `g(t)`.
pub fn evolved_state(t: f64, cfg: &ModelConfig) -> Result<DensityMatrix, ModelError> {
    cfg.validate()?;
    let (p, r) = (cfg.initial.p, cfg.initial.r);
    let e = cfg.initial.e();
    let g = decoherence(t, cfg).value;
    let corner = Complex64::from_polar(r * (p * (1.0 - p)).sqrt() * g, -cfg.omega() * t);
    let mut m = CMat::zeros(4);
    m[(0, 0)] = Complex64::new(e + r * (1.0 - p), 0.0);
    m[(1, 1)] = Complex64::new(e, 0.0);
    m[(2, 2)] = Complex64::new(e, 0.0);
    m[(3, 3)] = Complex64::new(e + r * p, 0.0);
    m[(0, 3)] = corner;
    m[(3, 0)] = corner.conj();
    DensityMatrix::new(m)
}

/// Exact entrywise partial of the evolved state with respect to one
/// parameter.
///
/// The p-derivative of the corner carries `(1-2p)/(2 sqrt(p(1-p)))` and is
/// refused at `p in {0, 1}`; closed-form QFI expressions cover those
/// boundaries instead. The r-derivative exists everywhere.
pub fn state_derivative(param: Param, t: f64, cfg: &ModelConfig) -> Result<CMat, ModelError> {
    cfg.validate()?;
    let (p, r) = (cfg.initial.p, cfg.initial.r);
    let g = decoherence(t, cfg).value;
    let phase = Complex64::from_polar(1.0, -cfg.omega() * t);
    match param {
        Param::P => {
            if p == 0.0 || p == 1.0 {
                return Err(ModelError::DerivativeSingularAtBoundary { p });
            }
            let root = (p * (1.0 - p)).sqrt();
            let mut dp = CMat::zeros(4);
            dp[(0, 0)] = Complex64::new(-r, 0.0);
            dp[(3, 3)] = Complex64::new(r, 0.0);
            let corner = phase * Complex64::new(r * g * (1.0 - 2.0 * p) / (2.0 * root), 0.0);
            dp[(0, 3)] = corner;
            dp[(3, 0)] = corner.conj();
            Ok(dp)
        }
        Param::R => {
            let root = (p * (1.0 - p)).sqrt();
            let mut dr = CMat::zeros(4);
            dr[(0, 0)] = Complex64::new(0.75 - p, 0.0);
            dr[(1, 1)] = Complex64::new(-0.25, 0.0);
            dr[(2, 2)] = Complex64::new(-0.25, 0.0);
            dr[(3, 3)] = Complex64::new(p - 0.25, 0.0);
            let corner = phase * Complex64::new(root * g, 0.0);
            dr[(0, 3)] = corner;
            dr[(3, 0)] = corner.conj();
            Ok(dr)
        }
    }
}

/// Both partials `(d rho/d p, d rho/d r)` at once.
pub fn state_param_derivatives(t: f64, cfg: &ModelConfig) -> Result<(CMat, CMat), ModelError> {
    Ok((
        state_derivative(Param::P, t, cfg)?,
        state_derivative(Param::R, t, cfg)?,
    ))
}

// --- JSON wire format -------------------------------------------------------
//
// {"initial":{"p":..,"r":..},
//  "env":{"type":"bosonic","gamma01":..,"gamma02":..,"gamma012":..,"cutoff":..}
//      | {"type":"spin","N":..,"lambda":..,"h":..}
//      | {"type":"spin","epsilons":[..],"lambdas":[..],"tunnelings":[..]},
//  "omega1":.., "omega2":..}

#[derive(Serialize, Deserialize)]
struct ConfigJson {
    initial: InitialStateParams,
    env: EnvJson,
    omega1: f64,
    omega2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    qubit_coupling: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum EnvJson {
    Bosonic {
        gamma01: f64,
        gamma02: f64,
        gamma012: f64,
        cutoff: f64,
    },
    Spin {
        #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        h: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        epsilons: Option<Vec<f64>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        lambdas: Option<Vec<f64>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        tunnelings: Option<Vec<f64>>,
    },
}

impl TryFrom<ConfigJson> for ModelConfig {
    type Error = ModelError;

    fn try_from(raw: ConfigJson) -> Result<Self, ModelError> {
        let env = match raw.env {
            EnvJson::Bosonic {
                gamma01,
                gamma02,
                gamma012,
                cutoff,
            } => {
                let b = BosonicEnvParams {
                    gamma01,
                    gamma02,
                    gamma012,
                    cutoff,
                };
                b.validate()?;
                EnvParams::Bosonic(b)
            }
            EnvJson::Spin {
                n,
                lambda,
                h,
                epsilons,
                lambdas,
                tunnelings,
            } => {
                let env = match (n, lambda, h, epsilons, lambdas, tunnelings) {
                    (Some(n), Some(lambda), Some(h), None, None, None) => {
                        SpinEnvParams::uniform(n, lambda, h)?
                    }
                    (None, None, None, Some(eps), Some(lams), Some(hs)) => {
                        if eps.len() != lams.len() || eps.len() != hs.len() {
                            return Err(ModelError::SpinListLength {
                                n: eps.len(),
                                got: lams.len().max(hs.len()),
                            });
                        }
                        let spins = eps
                            .into_iter()
                            .zip(lams)
                            .zip(hs)
                            .map(|((epsilon, lambda), h)| SpinCoupling { epsilon, lambda, h })
                            .collect();
                        SpinEnvParams::heterogeneous(spins)?
                    }
                    _ => {
                        return Err(ModelError::Config(
                            "spin env needs either {N, lambda, h} or \
                             {epsilons, lambdas, tunnelings}"
                                .into(),
                        ))
                    }
                };
                EnvParams::Spin(env)
            }
        };
        let cfg = ModelConfig {
            initial: raw.initial,
            env,
            omega1: raw.omega1,
            omega2: raw.omega2,
            qubit_coupling: raw.qubit_coupling,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<&ModelConfig> for ConfigJson {
    fn from(cfg: &ModelConfig) -> Self {
        let env = match &cfg.env {
            EnvParams::Bosonic(b) => EnvJson::Bosonic {
                gamma01: b.gamma01,
                gamma02: b.gamma02,
                gamma012: b.gamma012,
                cutoff: b.cutoff,
            },
            EnvParams::Spin(s) => match s.uniform_couplings() {
                Some((lambda, h)) => EnvJson::Spin {
                    n: Some(s.n()),
                    lambda: Some(lambda),
                    h: Some(h),
                    epsilons: None,
                    lambdas: None,
                    tunnelings: None,
                },
                None => EnvJson::Spin {
                    n: None,
                    lambda: None,
                    h: None,
                    epsilons: Some(s.spins().iter().map(|c| c.epsilon).collect()),
                    lambdas: Some(s.spins().iter().map(|c| c.lambda).collect()),
                    tunnelings: Some(s.spins().iter().map(|c| c.h).collect()),
                },
            },
        };
        ConfigJson {
            initial: cfg.initial,
            env,
            omega1: cfg.omega1,
            omega2: cfg.omega2,
            qubit_coupling: cfg.qubit_coupling,
        }
    }
}
