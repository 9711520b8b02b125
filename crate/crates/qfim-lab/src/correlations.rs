//! Quantum-correlation and state-quality functionals of the evolved state:
//! interferometric power, local quantum uncertainty, l1 coherence, purity,
//! fidelity (closed form and Uhlmann) and trace distance.
//!
//! Each closed form specific to the X-state family is paired with a generic
//! numeric route (eigenbasis sums, matrix square roots) that works for any
//! state and serves as its oracle.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, CMat, LinalgError};
use crate::models::{self, decoherence, DensityMatrix, ModelConfig, ModelError};

#[derive(Debug, Error)]
pub enum CorrelationError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("radicand {value:.3e} below the numerical-domain tolerance")]
    NegativeRadicand { value: f64 },
}

/// Pauli matrix on qubit A tensored with identity on B, 4x4.
pub fn pauli_a(k: usize) -> CMat {
    let mut m = CMat::zeros(4);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match k {
        0 => {
            // sigma_x ⊗ I
            m[(0, 2)] = one;
            m[(1, 3)] = one;
            m[(2, 0)] = one;
            m[(3, 1)] = one;
        }
        1 => {
            // sigma_y ⊗ I
            m[(0, 2)] = -i;
            m[(1, 3)] = -i;
            m[(2, 0)] = i;
            m[(3, 1)] = i;
        }
        2 => {
            // sigma_z ⊗ I
            m[(0, 0)] = one;
            m[(1, 1)] = one;
            m[(2, 2)] = -one;
            m[(3, 3)] = -one;
        }
        _ => panic!("pauli index must be 0..3"),
    }
    m
}

/// Interferometric power from the eigenbasis construction: build the 3x3
/// matrix `M_mn = 1/2 Σ (p_i-p_j)²/(p_i+p_j) <i|σ_m⊗I|j><j|σ_n⊗I|i>` over
/// eigenpairs with `p_i + p_j` above the support floor, and return its
/// minimal eigenvalue. Works for any two-qubit state.
pub fn ip_eigen(rho: &DensityMatrix) -> Result<f64, CorrelationError> {
    let eig = linalg::eig_hermitian(rho.matrix())?;
    let paulis: Vec<CMat> = (0..3).map(pauli_a).collect();
    // <i| σ_m ⊗ I |j> for each Pauli.
    let mut overlap = vec![CMat::zeros(4); 3];
    for (m, pauli) in paulis.iter().enumerate() {
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..4 {
                    for b in 0..4 {
                        acc += eig.vectors[(a, i)].conj() * pauli[(a, b)] * eig.vectors[(b, j)];
                    }
                }
                overlap[m][(i, j)] = acc;
            }
        }
    }
    let mut w = CMat::zeros(3);
    for m in 0..3 {
        for n in 0..3 {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..4 {
                for j in 0..4 {
                    let denom = eig.values[i] + eig.values[j];
                    if denom > 1e-12 {
                        let diff = eig.values[i] - eig.values[j];
                        let weight = diff * diff / denom;
                        acc += Complex64::new(0.5 * weight, 0.0)
                            * overlap[m][(i, j)]
                            * overlap[n][(j, i)];
                    }
                }
            }
            w[(m, n)] = acc;
        }
    }
    let eig3 = linalg::eig_hermitian(&w.hermitize())?;
    Ok(*eig3.values.last().expect("3x3 spectrum"))
}

/// Closed-form interferometric power with its fallback bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpValue {
    pub value: f64,
    /// True when the closed form was singular and [`ip_eigen`] supplied the
    /// value instead.
    pub fell_back_to_eigen: bool,
}

/// Closed-form interferometric power of the evolved state: the minimum of
/// two rational branches in `(p, r, g)`. Near the singular set of the first
/// branch (pure state with |g| = 1) the eigenbasis construction takes over.
pub fn ip_closed(t: f64, cfg: &ModelConfig) -> Result<IpValue, CorrelationError> {
    cfg.validate()?;
    let p = cfg.initial.p;
    let r = cfg.initial.r;
    let e = cfg.initial.e();
    let g = decoherence(t, cfg).value;
    let x = (g * g - 1.0) * (p - 1.0) * p;

    let den1 = 4.0 * e * e + 2.0 * e * r + x * r * r;
    if den1 < 1e-14 {
        let rho = models::evolved_state(t, cfg)?;
        return Ok(IpValue {
            value: ip_eigen(&rho)?,
            fell_back_to_eigen: true,
        });
    }
    let b1 = r * r * (e * (2.0 - 4.0 * x) + x * r) / den1;
    let b2 = -4.0 * g * g * (p - 1.0) * p * r * r / (2.0 * e + r);
    Ok(IpValue {
        value: b1.min(b2),
        fell_back_to_eigen: false,
    })
}

/// Local quantum uncertainty from its closed form, with the two competing
/// branch values `w1`, `w2` reported alongside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LquValue {
    pub lqu: f64,
    pub w1: f64,
    pub w2: f64,
    /// True when the shared denominator of `w2` hit its removable
    /// singularity (g = 0 with p = 1/2) and the exact limit 1 was used.
    pub w2_at_limit: bool,
}

/// Closed-form LQU of the evolved state: `1 - max(W1, W2)`.
pub fn lqu_closed(t: f64, cfg: &ModelConfig) -> Result<LquValue, CorrelationError> {
    cfg.validate()?;
    let p = cfg.initial.p;
    let r = cfg.initial.r;
    let e = cfg.initial.e();
    let g = decoherence(t, cfg).value;
    let x = (g * g - 1.0) * (p - 1.0) * p;

    let rad = 1.0 - 4.0 * x;
    if rad < -1e-12 {
        return Err(CorrelationError::NegativeRadicand { value: rad });
    }
    let s = rad.max(0.0).sqrt();
    let w1 = (2.0 * e).sqrt()
        * ((2.0 * e + r * s + r).max(0.0).sqrt() + (2.0 * e - r * s + r).max(0.0).sqrt());

    let den = 4.0 * x - 1.0;
    let (w2, w2_at_limit) = if den.abs() <= 1e-12 {
        // Removable: along g = 0 the expression collapses to 4e + r = 1.
        (1.0, true)
    } else {
        let inner = (e * e + e * r + x * r * r).max(0.0).sqrt();
        let num = 4.0 * (p - 1.0) * p * (r - 2.0 * g * g * inner)
            - 8.0 * (g * g - 2.0) * e * (p - 1.0) * p
            + 4.0 * e
            + r;
        (-num / den, false)
    };
    Ok(LquValue {
        lqu: 1.0 - w1.max(w2),
        w1,
        w2,
        w2_at_limit,
    })
}

/// LQU for an arbitrary two-qubit state: `1 - λ_max(W)` with
/// `W_ij = Tr[√rho (σ_i⊗I) √rho (σ_j⊗I)]`. Oracle for [`lqu_closed`].
pub fn lqu_numeric(rho: &DensityMatrix) -> Result<f64, CorrelationError> {
    let sqrt = linalg::matrix_sqrt_psd(rho.matrix())?;
    let mut w = CMat::zeros(3);
    for m in 0..3 {
        for n in m..3 {
            let tr = sqrt
                .matmul(&pauli_a(m))
                .matmul(&sqrt)
                .matmul(&pauli_a(n))
                .trace();
            w[(m, n)] = Complex64::new(tr.re, 0.0);
            w[(n, m)] = Complex64::new(tr.re, 0.0);
        }
    }
    let eig = linalg::eig_hermitian(&w)?;
    Ok(1.0 - eig.values[0])
}

/// Sum of off-diagonal entry moduli of any state.
pub fn coherence_l1_state(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let mut sum = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                sum += m[(i, j)].norm();
            }
        }
    }
    sum
}

/// Closed-form l1 coherence of the evolved state: `2 r sqrt(p(1-p)) |g|`.
pub fn coherence_l1_closed(t: f64, cfg: &ModelConfig) -> f64 {
    let p = cfg.initial.p;
    let r = cfg.initial.r;
    let g = decoherence(t, cfg).value;
    2.0 * r * (p * (1.0 - p)).sqrt() * g.abs()
}

/// Purity `Tr(rho²)` of any state.
pub fn purity_state(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    m.matmul(m).trace().re
}

/// Closed-form purity of the evolved state.
pub fn purity_closed(t: f64, cfg: &ModelConfig) -> f64 {
    let p = cfg.initial.p;
    let r = cfg.initial.r;
    let g = decoherence(t, cfg).value;
    -2.0 * g * g * r * r * p * (p - 1.0) + (8.0 * p * p - 8.0 * p + 3.0) * r * r / 4.0 + 0.25
}

/// Uhlmann fidelity `Tr sqrt(sqrt(rho2) rho1 sqrt(rho2))`.
pub fn fidelity_uhlmann(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
) -> Result<f64, CorrelationError> {
    let s2 = linalg::matrix_sqrt_psd(rho2.matrix())?;
    let m = s2.matmul(rho1.matrix()).matmul(&s2).hermitize();
    let eig = linalg::eig_hermitian(&m)?;
    // The square root amplifies round-off near zero (eps -> sqrt(eps)), so
    // drop eigenvalues at rounding scale relative to the largest.
    let floor = eig.values.first().copied().unwrap_or(0.0).max(0.0) * 1e-14;
    Ok(eig
        .values
        .iter()
        .filter(|&&l| l > floor)
        .map(|&l| l.sqrt())
        .sum())
}

/// Which phase argument the closed-form fidelity uses. The corner of the
/// evolved state rotates as `e^{iΩt}`, so `OmegaT` is the physical reading;
/// `OmegaOnly` evaluates the constant-phase variant for audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FidelityPhase {
    #[default]
    OmegaT,
    OmegaOnly,
}

/// Closed-form overlap of the evolved state with the initial one:
/// `g(t) r sqrt(p(1-p)) cos(Ωt) + r/4 + 1/4`.
///
/// This is a witness signal, not a fidelity oracle: for mixed initial
/// states (r < 1) it does not reduce to the Uhlmann fidelity — already at
/// t = 0 it gives `r sqrt(p(1-p)) + (r+1)/4` rather than 1. Both values are
/// computed side by side in [`correlation_report`]; the discrepancy is
/// surfaced, never patched.
pub fn fidelity_paper(t: f64, cfg: &ModelConfig, phase: FidelityPhase) -> f64 {
    let p = cfg.initial.p;
    let r = cfg.initial.r;
    let g = decoherence(t, cfg).value;
    let arg = match phase {
        FidelityPhase::OmegaT => cfg.omega() * t,
        FidelityPhase::OmegaOnly => cfg.omega(),
    };
    g * r * (p * (1.0 - p)).sqrt() * arg.cos() + r / 4.0 + 0.25
}

/// Trace distance `||rho1 - rho2||_1 / 2`.
pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> f64 {
    0.5 * linalg::trace_norm(&rho1.matrix().sub(rho2.matrix()))
}

/// Every correlation/quality functional of the evolved state at one
/// instant, fidelity and trace distance taken against the initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationReport {
    pub ip: f64,
    pub lqu: f64,
    pub w1: f64,
    pub w2: f64,
    pub coherence_l1: f64,
    pub purity: f64,
    pub fidelity_paper: f64,
    pub fidelity_uhlmann: f64,
    pub trace_distance: f64,
}

pub fn correlation_report(
    t: f64,
    cfg: &ModelConfig,
) -> Result<CorrelationReport, CorrelationError> {
    let rho0 = models::initial_state(&cfg.initial)?;
    let rho_t = models::evolved_state(t, cfg)?;
    let ip = ip_closed(t, cfg)?;
    let lqu = lqu_closed(t, cfg)?;
    Ok(CorrelationReport {
        ip: ip.value,
        lqu: lqu.lqu,
        w1: lqu.w1,
        w2: lqu.w2,
        coherence_l1: coherence_l1_closed(t, cfg),
        purity: purity_closed(t, cfg),
        fidelity_paper: fidelity_paper(t, cfg, FidelityPhase::OmegaT),
        fidelity_uhlmann: fidelity_uhlmann(&rho_t, &rho0)?,
        trace_distance: trace_distance(&rho0, &rho_t),
    })
}
