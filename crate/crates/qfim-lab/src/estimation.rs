//! Symmetric logarithmic derivatives, quantum Fisher information (closed
//! form and numeric oracle), the 2x2 QFI matrix over `(p, r)` and the
//! Cramér–Rao bound reports.
//!
//! The X-state is block diagonal (one 2x2 block on indices {0,3}, two
//! singleton blocks on {1} and {2}), so the SLD of each parameter splits
//! into a direct sum and every quantity here has a closed form. The numeric
//! routes — block-formula SLDs and the eigenbasis QFI expansion — stay
//! independent of the closed forms so either side can check the other.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, CMat, LinalgError};
use crate::models::{self, decoherence, DensityMatrix, ModelConfig, ModelError};

pub use crate::models::Param;

/// Eigenvalue-pair floor in the numeric QFI expansion: pairs with
/// `λ_i + λ_j` at or below this are treated as outside the support.
pub const PAIR_FLOOR: f64 = 1e-12;

/// Determinant floor under which a 2x2 block (or the QFIM) counts as
/// singular.
pub const DET_FLOOR: f64 = 1e-14;

/// Max allowed residual of the SLD defining equation
/// `d rho = (L rho + rho L)/2`.
pub const SLD_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum EstimationError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("state is not X-shaped: off-pattern entry of modulus {max_leak:.3e}")]
    NotXShaped { max_leak: f64 },
    #[error("derivative matrix is not Hermitian (defect {defect:.3e})")]
    DerivativeNotHermitian { defect: f64 },
    #[error("SLD for {param} does not exist here: {detail}")]
    SldUndefined { param: &'static str, detail: String },
    #[error("SLD residual {residual:.3e} exceeds tolerance")]
    SldResidual { residual: f64 },
    #[error("QFI for p is undefined at the boundary p = {p}")]
    PBoundary { p: f64 },
    #[error("QFI for r diverges at r = 1 (support loses rank, the bound is unbounded from above)")]
    RPure,
    #[error("QFIM is singular (det = {det:.3e}); Cramér–Rao bounds diverge")]
    SingularQfim { det: f64 },
}

/// Per-block diagnostics of a block-diagonal SLD: half-trace `mu`,
/// second moment `Tr rho_i^2` and the inverse-term weight `xi`.
#[derive(Debug, Clone, Copy)]
pub struct SldBlockDiag {
    /// Which indices of the 4x4 matrix the block covers.
    pub indices: (usize, usize),
    pub mu: f64,
    pub second_moment: f64,
    pub xi: f64,
}

/// Hermitian SLD operator for one parameter, with block diagnostics and the
/// residual of the defining equation it was checked against.
#[derive(Debug, Clone)]
pub struct SldOperator {
    pub param: Param,
    pub matrix: CMat,
    pub blocks: Vec<SldBlockDiag>,
    pub residual: f64,
}

/// X-state seen as its diagonal blocks: the outer 2x2 on indices {0,3} and
/// the two middle singletons.
struct XBlocks {
    outer: [[Complex64; 2]; 2],
    mid: [f64; 2],
}

const X_LEAK_TOL: f64 = 1e-12;

fn split_x(m: &CMat) -> Result<XBlocks, EstimationError> {
    assert_eq!(m.dim(), 4);
    let mut leak = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let on_pattern = i == j || (i == 0 && j == 3) || (i == 3 && j == 0);
            if !on_pattern {
                leak = leak.max(m[(i, j)].norm());
            }
        }
    }
    if leak > X_LEAK_TOL {
        return Err(EstimationError::NotXShaped { max_leak: leak });
    }
    Ok(XBlocks {
        outer: [[m[(0, 0)], m[(0, 3)]], [m[(3, 0)], m[(3, 3)]]],
        mid: [m[(1, 1)].re, m[(2, 2)].re],
    })
}

fn assemble_x(outer: [[Complex64; 2]; 2], mid: [f64; 2]) -> CMat {
    let mut m = CMat::zeros(4);
    m[(0, 0)] = outer[0][0];
    m[(0, 3)] = outer[0][1];
    m[(3, 0)] = outer[1][0];
    m[(3, 3)] = outer[1][1];
    m[(1, 1)] = Complex64::new(mid[0], 0.0);
    m[(2, 2)] = Complex64::new(mid[1], 0.0);
    m
}

fn sld_residual(rho: &CMat, drho: &CMat, l: &CMat) -> f64 {
    let sym = l.matmul(rho).add(&rho.matmul(l)).scale_re(0.5);
    drho.sub(&sym).max_abs()
}

/// SLD from the block formula `L_i = (d rho_i + xi rho_i^{-1} - d mu_i)/mu_i`
/// with `xi_i = 2 mu_i d mu_i - d(Tr rho_i^2)/4`, zeroed on singular blocks.
///
/// This route only sees the state and its derivative, never the model
/// parameters, so it is the structural oracle for the closed-form SLDs.
pub fn sld_block(
    param: Param,
    rho: &DensityMatrix,
    drho: &CMat,
) -> Result<SldOperator, EstimationError> {
    let defect = drho.hermiticity_defect();
    if defect > 1e-10 {
        return Err(EstimationError::DerivativeNotHermitian { defect });
    }
    let rb = split_x(rho.matrix())?;
    let db = split_x(drho)?;

    // Outer 2x2 block.
    let b = rb.outer;
    let dbm = db.outer;
    let mu = (b[0][0].re + b[1][1].re) / 2.0;
    let dmu = (dbm[0][0].re + dbm[1][1].re) / 2.0;
    let second_moment =
        b[0][0].re * b[0][0].re + b[1][1].re * b[1][1].re + 2.0 * b[0][1].norm_sqr();
    let d_second = 2.0
        * (b[0][0].re * dbm[0][0].re
            + b[1][1].re * dbm[1][1].re
            + 2.0 * (b[0][1] * dbm[0][1].conj()).re);
    let det = b[0][0].re * b[1][1].re - b[0][1].norm_sqr();
    let mut xi = 2.0 * mu * dmu - d_second / 4.0;
    if det.abs() <= DET_FLOOR {
        // xi equals half the determinant's parameter derivative, so a block
        // pinned at det = 0 must have xi = 0 for an SLD to exist at all.
        if xi.abs() > 1e-10 {
            return Err(EstimationError::SldUndefined {
                param: param.label(),
                detail: format!(
                    "outer block is singular (det = {det:.3e}) with xi = {xi:.3e} != 0"
                ),
            });
        }
        xi = 0.0;
    }
    if mu <= DET_FLOOR {
        return Err(EstimationError::SldUndefined {
            param: param.label(),
            detail: format!("outer block has vanishing trace (mu = {mu:.3e})"),
        });
    }
    let mut outer = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut v = dbm[i][j];
            if xi != 0.0 {
                // 2x2 inverse via the adjugate.
                let inv = match (i, j) {
                    (0, 0) => b[1][1] / det,
                    (1, 1) => b[0][0] / det,
                    (0, 1) => -b[0][1] / det,
                    _ => -b[1][0] / det,
                };
                v += Complex64::new(xi, 0.0) * inv;
            }
            if i == j {
                v -= Complex64::new(dmu, 0.0);
            }
            outer[i][j] = v / mu;
        }
    }
    let outer_diag = SldBlockDiag {
        indices: (0, 3),
        mu,
        second_moment,
        xi,
    };

    // Middle singleton blocks: L = d rho_i / rho_i.
    let mut mid = [0.0f64; 2];
    let mut diags = vec![outer_diag];
    for (k, slot) in mid.iter_mut().enumerate() {
        let a = rb.mid[k];
        let da = db.mid[k];
        if a.abs() <= DET_FLOOR {
            if da.abs() > 1e-12 {
                return Err(EstimationError::SldUndefined {
                    param: param.label(),
                    detail: format!(
                        "middle block {k} has zero population but nonzero derivative {da:.3e}"
                    ),
                });
            }
            *slot = 0.0;
        } else {
            *slot = da / a;
        }
        diags.push(SldBlockDiag {
            indices: (k + 1, k + 1),
            mu: a / 2.0,
            second_moment: a * a,
            xi: 0.0,
        });
    }

    let matrix = assemble_x(outer, mid);
    let residual = sld_residual(rho.matrix(), drho, &matrix);
    if residual > SLD_RESIDUAL_TOL {
        return Err(EstimationError::SldResidual { residual });
    }
    Ok(SldOperator {
        param,
        matrix,
        blocks: diags,
        residual,
    })
}

/// Closed-form SLD for the evolved X-state family.
///
/// The corner and outer-diagonal entries are rational in `(p, r, g)` with
/// the phase `e^{∓iΩt}`; for the mixedness parameter the middle populations
/// `(1-r)/4` also move, contributing `-1/(1-r)` on the middle diagonal.
pub fn sld_closed_form(
    param: Param,
    t: f64,
    cfg: &ModelConfig,
) -> Result<SldOperator, EstimationError> {
    cfg.validate()?;
    let p = cfg.initial.p;
    let r = cfg.initial.r;
    let e = cfg.initial.e();
    if p == 0.0 || p == 1.0 {
        return Err(EstimationError::SldUndefined {
            param: param.label(),
            detail: format!("corner term has a 1/sqrt(p(1-p)) factor, singular at p = {p}"),
        });
    }
    let g = decoherence(t, cfg).value;
    let x = (g * g - 1.0) * (p - 1.0) * p;
    let root = (p * (1.0 - p)).sqrt();
    let phase = Complex64::from_polar(1.0, -cfg.omega() * t);

    let (outer, mid) = match param {
        Param::P => {
            let core = e * e + e * r + x * r * r;
            if core.abs() <= 1e-15 {
                return Err(EstimationError::SldUndefined {
                    param: "p",
                    detail: "closed form degenerates at r = 1 with |g| = 1".into(),
                });
            }
            let gg1 = g * g - 1.0;
            let l00 = (r / (2.0 * e + r)) * (gg1 * (2.0 * p - 1.0) * r * (p * r + e) / core - 2.0);
            let l33 = (2.0 / (2.0 * e + r))
                * (gg1 * (2.0 * p - 1.0) * r * r * (-p * r + e + r) / (2.0 * core) + r);
            let corner_mag =
                -(g * e * (2.0 * p - 1.0) * r * (e + r)) / (root * (2.0 * e + r) * core);
            let corner = phase * Complex64::new(corner_mag, 0.0);
            (
                [
                    [Complex64::new(l00, 0.0), corner],
                    [corner.conj(), Complex64::new(l33, 0.0)],
                ],
                [0.0, 0.0],
            )
        }
        Param::R => {
            if r >= 1.0 {
                return Err(EstimationError::SldUndefined {
                    param: "r",
                    detail: "middle populations vanish at r = 1 while still varying with r".into(),
                });
            }
            let s = 16.0 * x - 3.0;
            let d = 1.0 + s * r * r + 2.0 * r;
            if d.abs() <= 1e-15 {
                return Err(EstimationError::SldUndefined {
                    param: "r",
                    detail: format!("shared denominator vanishes (d = {d:.3e})"),
                });
            }
            let l00 = (s * r - 4.0 * p + 3.0) / d;
            let l33 = (s * r + 4.0 * p - 1.0) / d;
            let corner = phase * Complex64::new(4.0 * g * root / d, 0.0);
            let lmid = -1.0 / (1.0 - r);
            (
                [
                    [Complex64::new(l00, 0.0), corner],
                    [corner.conj(), Complex64::new(l33, 0.0)],
                ],
                [lmid, lmid],
            )
        }
    };

    let matrix = assemble_x(outer, mid);
    let rho = models::evolved_state(t, cfg)?;
    let drho = models::state_derivative(param, t, cfg)?;
    let residual = sld_residual(rho.matrix(), &drho, &matrix);
    if residual > SLD_RESIDUAL_TOL {
        return Err(EstimationError::SldResidual { residual });
    }

    // Diagnostics from the state itself, same bookkeeping as the block route.
    let rb = split_x(rho.matrix())?;
    let db = split_x(&drho)?;
    let mu = (rb.outer[0][0].re + rb.outer[1][1].re) / 2.0;
    let dmu = (db.outer[0][0].re + db.outer[1][1].re) / 2.0;
    let second_moment = rb.outer[0][0].re * rb.outer[0][0].re
        + rb.outer[1][1].re * rb.outer[1][1].re
        + 2.0 * rb.outer[0][1].norm_sqr();
    let d_second = 2.0
        * (rb.outer[0][0].re * db.outer[0][0].re
            + rb.outer[1][1].re * db.outer[1][1].re
            + 2.0 * (rb.outer[0][1] * db.outer[0][1].conj()).re);
    let blocks = vec![
        SldBlockDiag {
            indices: (0, 3),
            mu,
            second_moment,
            xi: 2.0 * mu * dmu - d_second / 4.0,
        },
        SldBlockDiag {
            indices: (1, 1),
            mu: rb.mid[0] / 2.0,
            second_moment: rb.mid[0] * rb.mid[0],
            xi: 0.0,
        },
        SldBlockDiag {
            indices: (2, 2),
            mu: rb.mid[1] / 2.0,
            second_moment: rb.mid[1] * rb.mid[1],
            xi: 0.0,
        },
    ];
    Ok(SldOperator {
        param,
        matrix,
        blocks,
        residual,
    })
}

/// Brute-force QFI from the eigenbasis expansion
/// `F = Σ 2 |<v_i| d rho |v_j>|² / (λ_i + λ_j)` over pairs above
/// [`PAIR_FLOOR`]. Independent of every closed form in this module.
pub fn qfi_numeric(rho: &DensityMatrix, drho: &CMat) -> Result<f64, EstimationError> {
    let defect = drho.hermiticity_defect();
    if defect > 1e-10 {
        return Err(EstimationError::DerivativeNotHermitian { defect });
    }
    let eig = linalg::eig_hermitian(rho.matrix())?;
    let n = rho.matrix().dim();
    // Transform drho into the eigenbasis: D = V† drho V.
    let mut d = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..n {
                for b in 0..n {
                    acc += eig.vectors[(a, i)].conj() * drho[(a, b)] * eig.vectors[(b, j)];
                }
            }
            d[(i, j)] = acc;
        }
    }
    let mut f = 0.0;
    for i in 0..n {
        for j in 0..n {
            let denom = eig.values[i] + eig.values[j];
            if denom > PAIR_FLOOR {
                f += 2.0 * d[(i, j)].norm_sqr() / denom;
            }
        }
    }
    Ok(f)
}

/// Closed-form QFI for one parameter of the evolved state.
///
/// Three regimes are exactly decoherence-free and dispatch to their own
/// expressions so they stay bit-for-bit time independent: `p in {0,1}` for
/// the mixedness QFI, and `r = 1` or `p = 1/2` for the entanglement QFI.
pub fn qfi_closed(param: Param, t: f64, cfg: &ModelConfig) -> Result<f64, EstimationError> {
    cfg.validate()?;
    let p = cfg.initial.p;
    let r = cfg.initial.r;
    let e = cfg.initial.e();
    match param {
        Param::R => {
            if r >= 1.0 {
                return Err(EstimationError::RPure);
            }
            if p == 0.0 || p == 1.0 {
                return Ok(3.0 / ((1.0 - r) * (3.0 * r + 1.0)));
            }
            let g = decoherence(t, cfg).value;
            let x = (g * g - 1.0) * (p - 1.0) * p;
            let num = 3.0 * r - 3.0 - 8.0 * x * (2.0 * r - 1.0);
            let den = (r - 1.0) * (r * (r * (16.0 * x - 3.0) + 2.0) + 1.0);
            Ok(num / den)
        }
        Param::P => {
            if p == 0.0 || p == 1.0 {
                return Err(EstimationError::PBoundary { p });
            }
            if r == 1.0 {
                return Ok(1.0 / (p * (1.0 - p)));
            }
            if p == 0.5 {
                return Ok(8.0 * r * r / (1.0 + r));
            }
            let g = decoherence(t, cfg).value;
            let x = (g * g - 1.0) * (p - 1.0) * p;
            let two_e_r = 2.0 * e + r;
            let num = r
                * r
                * ((p - 1.0) * p * two_e_r * two_e_r
                    - g * g
                        * (e * (2.0 * p - 1.0) + (p - 1.0) * r)
                        * (e * (2.0 * p - 1.0) + p * r));
            let den = (p - 1.0) * p * two_e_r * (e * e + e * r + x * r * r);
            Ok(num / den)
        }
    }
}

/// Symmetric 2x2 QFI matrix over `(p, r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiMatrix {
    pub f_pp: f64,
    pub f_rr: f64,
    pub f_pr: f64,
}

impl QfiMatrix {
    pub fn det(&self) -> f64 {
        self.f_pp * self.f_rr - self.f_pr * self.f_pr
    }

    /// Entries of the inverse matrix, `None` when singular.
    pub fn inverse(&self) -> Option<[[f64; 2]; 2]> {
        let det = self.det();
        if det.abs() <= DET_FLOOR {
            return None;
        }
        Some([
            [self.f_rr / det, -self.f_pr / det],
            [-self.f_pr / det, self.f_pp / det],
        ])
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let tr = self.f_pp + self.f_rr;
        let gap = ((self.f_pp - self.f_rr).powi(2) + 4.0 * self.f_pr * self.f_pr).sqrt();
        (tr - gap) / 2.0
    }
}

/// QFI matrix from the closed forms: diagonal via [`qfi_closed`], the
/// off-diagonal element rational in `(p, r, g)` and vanishing whenever
/// `g² = 1` or `p = 1/2`.
pub fn qfim(t: f64, cfg: &ModelConfig) -> Result<QfiMatrix, EstimationError> {
    let p = cfg.initial.p;
    let r = cfg.initial.r;
    let f_pp = qfi_closed(Param::P, t, cfg)?;
    let f_rr = qfi_closed(Param::R, t, cfg)?;
    let g = decoherence(t, cfg).value;
    let x = (g * g - 1.0) * (p - 1.0) * p;
    let f_pr =
        -4.0 * (g * g - 1.0) * (2.0 * p - 1.0) * r / (r * (r * (16.0 * x - 3.0) + 2.0) + 1.0);
    Ok(QfiMatrix { f_pp, f_rr, f_pr })
}

/// QFI matrix through the SLD trace formula
/// `F_ij = Tr[rho (L_i L_j + L_j L_i)] / 2` with block-constructed SLDs.
/// Second, independent route used to audit [`qfim`].
pub fn qfim_sld_trace(t: f64, cfg: &ModelConfig) -> Result<QfiMatrix, EstimationError> {
    let rho = models::evolved_state(t, cfg)?;
    let dp = models::state_derivative(Param::P, t, cfg)?;
    let dr = models::state_derivative(Param::R, t, cfg)?;
    let lp = sld_block(Param::P, &rho, &dp)?.matrix;
    let lr = sld_block(Param::R, &rho, &dr)?.matrix;
    let sym_trace = |a: &CMat, b: &CMat| -> f64 {
        let m = a.matmul(b).add(&b.matmul(a)).scale_re(0.5);
        rho.matrix().matmul(&m).trace().re
    };
    Ok(QfiMatrix {
        f_pp: sym_trace(&lp, &lp),
        f_rr: sym_trace(&lr, &lr),
        f_pr: sym_trace(&lp, &lr),
    })
}

/// Modulus of the state-weighted SLD commutator `Tr(rho [L_p, L_r])`.
///
/// This is the compatibility condition for saturating the joint bound with
/// one measurement, and it vanishes identically here: both SLD corners carry
/// the same phase, so a single rotating frame makes everything real
/// symmetric. Note the bare operator commutator `[L_p, L_r]` does NOT
/// vanish for this family; only this weighted trace does.
pub fn weak_commutation(t: f64, cfg: &ModelConfig) -> Result<f64, EstimationError> {
    let rho = models::evolved_state(t, cfg)?;
    let dp = models::state_derivative(Param::P, t, cfg)?;
    let dr = models::state_derivative(Param::R, t, cfg)?;
    let lp = sld_block(Param::P, &rho, &dp)?.matrix;
    let lr = sld_block(Param::R, &rho, &dr)?.matrix;
    let comm = lp.matmul(&lr).sub(&lr.matmul(&lp));
    Ok(rho.matrix().matmul(&comm).trace().norm())
}

/// Single- and multi-parameter Cramér–Rao bounds at one instant.
///
/// `delta_*_indep` are the single-parameter bounds `1/F_ii`;
/// `delta_*_simul` the joint bounds `(F^{-1})_ii`; `delta_min` the total
/// variance bound `Tr F^{-1}`. Independent never exceeds simultaneous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrbReport {
    pub delta_p_indep: f64,
    pub delta_r_indep: f64,
    pub delta_p_simul: f64,
    pub delta_r_simul: f64,
    pub delta_min: f64,
}

/// Bound report from the QFI matrix. Errors when the matrix determinant is
/// at the singular floor (an unidentifiable parameter makes every joint
/// bound diverge).
pub fn crb_report(t: f64, cfg: &ModelConfig) -> Result<CrbReport, EstimationError> {
    let f = qfim(t, cfg)?;
    let det = f.det();
    if det <= DET_FLOOR {
        return Err(EstimationError::SingularQfim { det });
    }
    let delta_p_indep = 1.0 / f.f_pp;
    let delta_r_indep = 1.0 / f.f_rr;
    // With a diagonal QFIM the joint bounds coincide with the independent
    // ones exactly, so reuse the same computation path.
    let (delta_p_simul, delta_r_simul) = if f.f_pr == 0.0 {
        (delta_p_indep, delta_r_indep)
    } else {
        (f.f_rr / det, f.f_pp / det)
    };
    Ok(CrbReport {
        delta_p_indep,
        delta_r_indep,
        delta_p_simul,
        delta_r_simul,
        delta_min: delta_p_simul + delta_r_simul,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{bosonic_cfg, spin_cfg};

    fn sld_pair(t: f64, cfg: &ModelConfig) -> (SldOperator, SldOperator) {
        let rho = models::evolved_state(t, cfg).unwrap();
        let dp = models::state_derivative(Param::P, t, cfg).unwrap();
        let dr = models::state_derivative(Param::R, t, cfg).unwrap();
        (
            sld_block(Param::P, &rho, &dp).unwrap(),
            sld_block(Param::R, &rho, &dr).unwrap(),
        )
    }

    #[test]
    fn block_sld_satisfies_defining_equation() {
        for cfg in [bosonic_cfg(0.3, 0.4, 0.01), spin_cfg(0.1, 0.9, 5, 0.2, 0.1)] {
            for &t in &[0.0, 1.0, 4.7] {
                let (lp, lr) = sld_pair(t, &cfg);
                assert!(lp.residual <= 1e-10, "L_p residual {}", lp.residual);
                assert!(lr.residual <= 1e-10, "L_r residual {}", lr.residual);
                assert!(lp.matrix.hermiticity_defect() < 1e-12);
                assert!(lr.matrix.hermiticity_defect() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_matches_block_construction() {
        // Bosonic point for L_p, spin point for L_r, both checked entrywise.
        let cfg_b = bosonic_cfg(0.3, 0.4, 0.01);
        let (lp_block, lr_block) = sld_pair(1.0, &cfg_b);
        let lp_closed = sld_closed_form(Param::P, 1.0, &cfg_b).unwrap();
        let lr_closed = sld_closed_form(Param::R, 1.0, &cfg_b).unwrap();
        assert!(lp_closed.matrix.sub(&lp_block.matrix).max_abs() < 1e-9);
        assert!(lr_closed.matrix.sub(&lr_block.matrix).max_abs() < 1e-9);

        let cfg_s = spin_cfg(0.1, 0.9, 5, 0.2, 0.1);
        let (lp_block, lr_block) = sld_pair(1.0, &cfg_s);
        let lp_closed = sld_closed_form(Param::P, 1.0, &cfg_s).unwrap();
        let lr_closed = sld_closed_form(Param::R, 1.0, &cfg_s).unwrap();
        assert!(lp_closed.matrix.sub(&lp_block.matrix).max_abs() < 1e-9);
        assert!(lr_closed.matrix.sub(&lr_block.matrix).max_abs() < 1e-9);
    }

    #[test]
    fn sld_middle_entries() {
        // d rho/dp leaves the middle populations alone, so L_p has zero
        // middle entries; the middle populations (1-r)/4 do move with r,
        // forcing -1/(1-r) onto the middle diagonal of L_r.
        let cfg = bosonic_cfg(0.3, 0.4, 0.01);
        let (lp, lr) = sld_pair(0.7, &cfg);
        assert!(lp.matrix[(1, 1)].norm() < 1e-14);
        assert!(lp.matrix[(2, 2)].norm() < 1e-14);
        let expect = -1.0 / (1.0 - 0.4);
        assert!((lr.matrix[(1, 1)].re - expect).abs() < 1e-12);
        assert!((lr.matrix[(2, 2)].re - expect).abs() < 1e-12);
    }

    #[test]
    fn sld_corner_value_at_g_one() {
        // At t = 0 (g = 1) the L_r corner is 4 sqrt(p(1-p)) / (1 - 3r² + 2r).
        let cfg = bosonic_cfg(0.5, 0.5, 0.01);
        let lr = sld_closed_form(Param::R, 0.0, &cfg).unwrap();
        let expect = 4.0 * 0.5 / (1.0 - 3.0 * 0.25 + 1.0);
        assert!((lr.matrix[(0, 3)].re - expect).abs() < 1e-12);
        assert!(lr.matrix[(0, 3)].im.abs() < 1e-15);
    }

    #[test]
    fn slds_commute_weakly() {
        // The bare commutator [L_p, L_r] is O(1) for this family; what does
        // vanish (and what makes one joint measurement optimal) is the
        // state-weighted trace, exact to machine precision.
        for cfg_base in [bosonic_cfg(0.5, 0.5, 0.01), spin_cfg(0.5, 0.5, 5, 0.2, 0.1)] {
            for pi in 1..10 {
                for ri in 1..10 {
                    let mut cfg = cfg_base.clone();
                    cfg.initial.p = pi as f64 * 0.1;
                    cfg.initial.r = ri as f64 * 0.1;
                    let w = weak_commutation(1.3, &cfg).unwrap();
                    assert!(w <= 1e-12, "p={pi} r={ri}: Tr(rho[L_p,L_r]) = {w:.2e}");
                }
            }
        }
        let (lp, lr) = sld_pair(1.3, &bosonic_cfg(0.3, 0.4, 0.01));
        let strong = linalg::commutator_max_abs(&lp.matrix, &lr.matrix).unwrap();
        assert!(
            strong > 1e-2,
            "operator commutator unexpectedly small: {strong:.2e}"
        );
    }

    #[test]
    fn sld_block_rejects_junk() {
        let cfg = bosonic_cfg(0.3, 0.4, 0.01);
        let rho = models::evolved_state(1.0, &cfg).unwrap();
        let mut bad = models::state_derivative(Param::P, 1.0, &cfg).unwrap();
        bad[(0, 1)] = Complex64::new(0.3, 0.0);
        assert!(matches!(
            sld_block(Param::P, &rho, &bad),
            Err(EstimationError::DerivativeNotHermitian { .. })
                | Err(EstimationError::NotXShaped { .. })
        ));
    }

    #[test]
    fn sld_undefined_for_r_at_pure_state() {
        let cfg = bosonic_cfg(0.3, 1.0, 0.01);
        let rho = models::evolved_state(0.5, &cfg).unwrap();
        let dr = models::state_derivative(Param::R, 0.5, &cfg).unwrap();
        assert!(sld_block(Param::R, &rho, &dr).is_err());
        assert!(sld_closed_form(Param::R, 0.5, &cfg).is_err());
    }

    #[test]
    fn qfi_numeric_zero_derivative() {
        let cfg = bosonic_cfg(0.3, 0.4, 0.01);
        let rho = models::evolved_state(1.0, &cfg).unwrap();
        assert_eq!(qfi_numeric(&rho, &CMat::zeros(4)).unwrap(), 0.0);
    }

    #[test]
    fn qfi_trapping_values() {
        // p = 0: F(r) = 3/((1-r)(3r+1)); at r = 0.5 this is 2.4, and the
        // numeric oracle on the diagonal state agrees.
        let cfg = bosonic_cfg(0.0, 0.5, 0.01);
        for &t in &[0.0, 1.0, 9.0] {
            let f = qfi_closed(Param::R, t, &cfg).unwrap();
            assert!((f - 2.4).abs() < 1e-14);
            let rho = models::evolved_state(t, &cfg).unwrap();
            let dr = models::state_derivative(Param::R, t, &cfg).unwrap();
            let fn_ = qfi_numeric(&rho, &dr).unwrap();
            assert!((fn_ - 2.4).abs() < 1e-10);
        }

        // r = 1: F(p) = 1/(p(1-p)); at p = 0.1 that is 11.111...
        let cfg = bosonic_cfg(0.1, 1.0, 0.01);
        for &t in &[0.0, 0.7, 2.0] {
            let f = qfi_closed(Param::P, t, &cfg).unwrap();
            assert!((f - 1.0 / 0.09).abs() < 1e-12);
            let rho = models::evolved_state(t, &cfg).unwrap();
            let dp = models::state_derivative(Param::P, t, &cfg).unwrap();
            let fn_ = qfi_numeric(&rho, &dp).unwrap();
            assert!((fn_ - 1.0 / 0.09).abs() < 1e-8);
        }

        // p = 1/2: F(p) = 8r²/(1+r), 4/3 at r = 0.5, for both environments.
        for cfg in [bosonic_cfg(0.5, 0.5, 0.01), spin_cfg(0.5, 0.5, 5, 0.2, 0.1)] {
            for &t in &[0.0, 1.0, 5.0] {
                let f = qfi_closed(Param::P, t, &cfg).unwrap();
                assert!((f - 4.0 / 3.0).abs() < 1e-14);
            }
        }

        // Cross-consistency of the two pure trapping formulas: both give 4.
        let at_half = bosonic_cfg(0.5, 1.0, 0.01);
        assert_eq!(qfi_closed(Param::P, 3.0, &at_half).unwrap(), 4.0);
    }

    #[test]
    fn qfi_closed_matches_numeric_oracle() {
        for cfg_base in [bosonic_cfg(0.5, 0.5, 0.01), spin_cfg(0.5, 0.5, 5, 0.2, 0.1)] {
            for &p in &[0.1, 0.37, 0.5, 0.82] {
                for &r in &[0.2, 0.55, 0.9] {
                    for &t in &[0.0, 0.9, 3.7, 11.0] {
                        let mut cfg = cfg_base.clone();
                        cfg.initial.p = p;
                        cfg.initial.r = r;
                        let rho = models::evolved_state(t, &cfg).unwrap();
                        for param in [Param::P, Param::R] {
                            let d = models::state_derivative(param, t, &cfg).unwrap();
                            let num = qfi_numeric(&rho, &d).unwrap();
                            let closed = qfi_closed(param, t, &cfg).unwrap();
                            let rel = (closed - num).abs() / num.max(1.0);
                            assert!(
                                rel <= 1e-8,
                                "{} p={p} r={r} t={t}: closed {closed} vs numeric {num}",
                                param.label()
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn closed_forms_hold_for_heterogeneous_spin_bath() {
        // The decoherence factor is the only thing the bath composition
        // changes; closed forms must track the numeric oracle through it.
        let env = crate::models::SpinEnvParams::heterogeneous(vec![
            crate::models::SpinCoupling {
                epsilon: 0.1,
                lambda: 0.25,
                h: 0.08,
            },
            crate::models::SpinCoupling {
                epsilon: 0.3,
                lambda: 0.05,
                h: 0.12,
            },
            crate::models::SpinCoupling {
                epsilon: 0.2,
                lambda: 0.2,
                h: 0.3,
            },
        ])
        .unwrap();
        let cfg = ModelConfig::new(
            crate::models::InitialStateParams::new(0.27, 0.81).unwrap(),
            crate::models::EnvParams::Spin(env),
            0.4,
            0.6,
        );
        for &t in &[0.0, 0.9, 3.3, 7.1, 14.0] {
            let rho = models::evolved_state(t, &cfg).unwrap();
            for param in [Param::P, Param::R] {
                let d = models::state_derivative(param, t, &cfg).unwrap();
                let num = qfi_numeric(&rho, &d).unwrap();
                let closed = qfi_closed(param, t, &cfg).unwrap();
                assert!((closed - num).abs() / num.max(1.0) <= 1e-8, "t={t}");
                let block = sld_block(param, &rho, &d).unwrap();
                let form = sld_closed_form(param, t, &cfg).unwrap();
                assert!(form.matrix.sub(&block.matrix).max_abs() <= 1e-9, "t={t}");
            }
        }
    }

    #[test]
    fn qfi_boundary_errors() {
        let cfg = bosonic_cfg(0.0, 0.5, 0.01);
        assert!(matches!(
            qfi_closed(Param::P, 1.0, &cfg),
            Err(EstimationError::PBoundary { .. })
        ));
        let cfg = bosonic_cfg(0.3, 1.0, 0.01);
        assert!(matches!(
            qfi_closed(Param::R, 1.0, &cfg),
            Err(EstimationError::RPure)
        ));
    }

    #[test]
    fn qfim_off_diagonal_vanishes_without_decoherence_or_at_half() {
        let cfg = spin_cfg(0.2, 0.7, 5, 0.2, 0.1);
        let f = qfim(0.0, &cfg).unwrap();
        assert_eq!(f.f_pr, 0.0);

        let cfg = spin_cfg(0.5, 0.7, 5, 0.2, 0.1);
        for &t in &[0.4, 2.0, 6.0] {
            let f = qfim(t, &cfg).unwrap();
            assert_eq!(f.f_pr, 0.0);
        }
    }

    #[test]
    fn qfim_matches_sld_trace_oracle() {
        for cfg in [bosonic_cfg(0.3, 0.4, 0.01), spin_cfg(0.1, 0.9, 5, 0.2, 0.1)] {
            for &t in &[0.0, 1.0, 3.3, 8.0] {
                let a = qfim(t, &cfg).unwrap();
                let b = qfim_sld_trace(t, &cfg).unwrap();
                assert!(
                    (a.f_pp - b.f_pp).abs() / b.f_pp.max(1.0) < 1e-8,
                    "f_pp t={t}"
                );
                assert!(
                    (a.f_rr - b.f_rr).abs() / b.f_rr.max(1.0) < 1e-8,
                    "f_rr t={t}"
                );
                assert!(
                    (a.f_pr - b.f_pr).abs() / b.f_pr.abs().max(1.0) < 1e-8,
                    "f_pr t={t}"
                );
            }
        }
    }

    #[test]
    fn qfim_positive_semidefinite() {
        for cfg in [bosonic_cfg(0.3, 0.4, 0.01), spin_cfg(0.1, 0.9, 5, 0.2, 0.1)] {
            for &t in &[0.0, 0.9, 2.2, 7.7] {
                let f = qfim(t, &cfg).unwrap();
                assert!(f.min_eigenvalue() >= -1e-10);
                assert!(f.det() >= -1e-12);
            }
        }
    }

    #[test]
    fn crb_ordering_and_t0_equality() {
        let cfg = spin_cfg(0.1, 0.9, 5, 0.2, 0.1);
        let at0 = crb_report(0.0, &cfg).unwrap();
        assert_eq!(at0.delta_p_indep, at0.delta_p_simul);
        assert_eq!(at0.delta_r_indep, at0.delta_r_simul);

        for &t in &[0.5, 1.0, 3.0, 6.0] {
            let rep = crb_report(t, &cfg).unwrap();
            assert!(rep.delta_p_indep <= rep.delta_p_simul + 1e-12);
            assert!(rep.delta_r_indep <= rep.delta_r_simul + 1e-12);
            let f = qfim(t, &cfg).unwrap();
            assert!((rep.delta_min - (f.f_pp + f.f_rr) / f.det()).abs() < 1e-12);
        }
    }
}
