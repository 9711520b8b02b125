//! C ABI for the qfim-lab library.
//!
//! Configurations are opaque handles created from the same JSON documents
//! the CLI consumes; every computation returns a status code and writes
//! results through caller-provided buffers. The generated header lives in
//! `include/qfim_lab.h`.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qfim_lab::correlations::{self, CorrelationError};
use qfim_lab::estimation::{self, EstimationError};
use qfim_lab::models::{self, ModelConfig, ModelError, Param};
use qfim_lab::witnesses;

/// Number of doubles written by `qfim_lab_evolved_state`
/// (4x4 complex, row-major, interleaved re/im).
pub const QFIM_LAB_STATE_LEN: usize = 32;

/// Number of doubles written by `qfim_lab_correlations`.
pub const QFIM_LAB_CORRELATIONS_LEN: usize = 9;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfimLabStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// The configuration JSON failed to parse or validate.
    InvalidConfig = 2,
    /// The quantity is undefined at the requested parameter point
    /// (boundary p, pure state for the mixedness QFI, singular QFIM, ...).
    Undefined = 3,
    /// A numerical routine failed.
    Numerical = 4,
}

/// Which encoded parameter a QFI refers to.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfimLabParam {
    P = 0,
    R = 1,
}

impl From<QfimLabParam> for Param {
    fn from(p: QfimLabParam) -> Param {
        match p {
            QfimLabParam::P => Param::P,
            QfimLabParam::R => Param::R,
        }
    }
}

/// Opaque model configuration handle.
pub struct QfimLabConfig {
    inner: ModelConfig,
}

fn model_status(e: &ModelError) -> QfimLabStatus {
    match e {
        ModelError::DerivativeSingularAtBoundary { .. } => QfimLabStatus::Undefined,
        _ => QfimLabStatus::InvalidConfig,
    }
}

fn estimation_status(e: &EstimationError) -> QfimLabStatus {
    match e {
        EstimationError::Model(m) => model_status(m),
        EstimationError::PBoundary { .. }
        | EstimationError::RPure
        | EstimationError::SldUndefined { .. }
        | EstimationError::SingularQfim { .. } => QfimLabStatus::Undefined,
        _ => QfimLabStatus::Numerical,
    }
}

fn correlation_status(e: &CorrelationError) -> QfimLabStatus {
    match e {
        CorrelationError::Model(m) => model_status(m),
        _ => QfimLabStatus::Numerical,
    }
}

fn guarded(body: impl FnOnce() -> QfimLabStatus) -> QfimLabStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(QfimLabStatus::Numerical)
}

/// Parse a configuration from JSON (same schema as the CLI) into an opaque
/// handle. On success writes the handle to `out`; free it with
/// `qfim_lab_config_free`.
///
/// # Safety
/// `json` must point to a NUL-terminated string and `out` to a writable
/// pointer slot.
#[no_mangle]
pub unsafe extern "C" fn qfim_lab_config_parse(
    json: *const c_char,
    out: *mut *mut QfimLabConfig,
) -> QfimLabStatus {
    if json.is_null() || out.is_null() {
        return QfimLabStatus::NullPointer;
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(t) => t,
        Err(_) => return QfimLabStatus::InvalidConfig,
    };
    guarded(|| match ModelConfig::from_json(text) {
        Ok(cfg) => {
            *out = Box::into_raw(Box::new(QfimLabConfig { inner: cfg }));
            QfimLabStatus::Ok
        }
        Err(e) => model_status(&e),
    })
}

/// Release a configuration handle. Null is a no-op.
///
/// # Safety
/// `cfg` must be a pointer previously returned by `qfim_lab_config_parse`
/// and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qfim_lab_config_free(cfg: *mut QfimLabConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

unsafe fn config_ref<'a>(cfg: *const QfimLabConfig) -> Option<&'a ModelConfig> {
    cfg.as_ref().map(|c| &c.inner)
}

/// Evolved 4x4 density matrix at time `t`, written row-major as
/// interleaved re/im pairs (`QFIM_LAB_STATE_LEN` doubles).
///
/// # Safety
/// `out` must point to at least `QFIM_LAB_STATE_LEN` doubles.
#[no_mangle]
pub unsafe extern "C" fn qfim_lab_evolved_state(
    cfg: *const QfimLabConfig,
    t: f64,
    out: *mut f64,
) -> QfimLabStatus {
    let (Some(cfg), false) = (config_ref(cfg), out.is_null()) else {
        return QfimLabStatus::NullPointer;
    };
    guarded(|| match models::evolved_state(t, cfg) {
        Ok(rho) => {
            let m = rho.matrix();
            let out = std::slice::from_raw_parts_mut(out, QFIM_LAB_STATE_LEN);
            for i in 0..4 {
                for j in 0..4 {
                    let z = m[(i, j)];
                    out[2 * (4 * i + j)] = z.re;
                    out[2 * (4 * i + j) + 1] = z.im;
                }
            }
            QfimLabStatus::Ok
        }
        Err(e) => model_status(&e),
    })
}

/// Closed-form quantum Fisher information for one parameter.
///
/// # Safety
/// `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn qfim_lab_qfi(
    cfg: *const QfimLabConfig,
    param: QfimLabParam,
    t: f64,
    out: *mut f64,
) -> QfimLabStatus {
    let (Some(cfg), false) = (config_ref(cfg), out.is_null()) else {
        return QfimLabStatus::NullPointer;
    };
    guarded(|| match estimation::qfi_closed(param.into(), t, cfg) {
        Ok(f) => {
            *out = f;
            QfimLabStatus::Ok
        }
        Err(e) => estimation_status(&e),
    })
}

/// QFI matrix entries `[F_pp, F_rr, F_pr]`.
///
/// # Safety
/// `out` must point to at least 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn qfim_lab_qfim(
    cfg: *const QfimLabConfig,
    t: f64,
    out: *mut f64,
) -> QfimLabStatus {
    let (Some(cfg), false) = (config_ref(cfg), out.is_null()) else {
        return QfimLabStatus::NullPointer;
    };
    guarded(|| match estimation::qfim(t, cfg) {
        Ok(f) => {
            let out = std::slice::from_raw_parts_mut(out, 3);
            out[0] = f.f_pp;
            out[1] = f.f_rr;
            out[2] = f.f_pr;
            QfimLabStatus::Ok
        }
        Err(e) => estimation_status(&e),
    })
}

/// Cramér–Rao bounds `[delta_p_indep, delta_r_indep, delta_p_simul,
/// delta_r_simul, delta_min]`.
///
/// # Safety
/// `out` must point to at least 5 doubles.
#[no_mangle]
pub unsafe extern "C" fn qfim_lab_crb(
    cfg: *const QfimLabConfig,
    t: f64,
    out: *mut f64,
) -> QfimLabStatus {
    let (Some(cfg), false) = (config_ref(cfg), out.is_null()) else {
        return QfimLabStatus::NullPointer;
    };
    guarded(|| match estimation::crb_report(t, cfg) {
        Ok(rep) => {
            let out = std::slice::from_raw_parts_mut(out, 5);
            out[0] = rep.delta_p_indep;
            out[1] = rep.delta_r_indep;
            out[2] = rep.delta_p_simul;
            out[3] = rep.delta_r_simul;
            out[4] = rep.delta_min;
            QfimLabStatus::Ok
        }
        Err(e) => estimation_status(&e),
    })
}

/// Correlation report `[ip, lqu, w1, w2, coherence_l1, purity,
/// fidelity_closed, fidelity_uhlmann, trace_distance]`
/// (`QFIM_LAB_CORRELATIONS_LEN` doubles); fidelities and trace distance
/// are taken against the initial state.
///
/// # Safety
/// `out` must point to at least `QFIM_LAB_CORRELATIONS_LEN` doubles.
#[no_mangle]
pub unsafe extern "C" fn qfim_lab_correlations(
    cfg: *const QfimLabConfig,
    t: f64,
    out: *mut f64,
) -> QfimLabStatus {
    let (Some(cfg), false) = (config_ref(cfg), out.is_null()) else {
        return QfimLabStatus::NullPointer;
    };
    guarded(|| match correlations::correlation_report(t, cfg) {
        Ok(rep) => {
            let out = std::slice::from_raw_parts_mut(out, QFIM_LAB_CORRELATIONS_LEN);
            out[0] = rep.ip;
            out[1] = rep.lqu;
            out[2] = rep.w1;
            out[3] = rep.w2;
            out[4] = rep.coherence_l1;
            out[5] = rep.purity;
            out[6] = rep.fidelity_paper;
            out[7] = rep.fidelity_uhlmann;
            out[8] = rep.trace_distance;
            QfimLabStatus::Ok
        }
        Err(e) => correlation_status(&e),
    })
}

/// Revival period of a uniform spin environment; `Undefined` for bosonic
/// or heterogeneous-spin configurations.
///
/// # Safety
/// `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn qfim_lab_predicted_period(
    cfg: *const QfimLabConfig,
    out: *mut f64,
) -> QfimLabStatus {
    let (Some(cfg), false) = (config_ref(cfg), out.is_null()) else {
        return QfimLabStatus::NullPointer;
    };
    guarded(|| match &cfg.env {
        qfim_lab::models::EnvParams::Spin(env) => match witnesses::predicted_period(env) {
            Ok(period) => {
                *out = period;
                QfimLabStatus::Ok
            }
            Err(_) => QfimLabStatus::Undefined,
        },
        _ => QfimLabStatus::Undefined,
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn qfim_lab_status_message(status: QfimLabStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        QfimLabStatus::Ok => b"ok\0",
        QfimLabStatus::NullPointer => b"null pointer argument\0",
        QfimLabStatus::InvalidConfig => b"invalid configuration\0",
        QfimLabStatus::Undefined => b"quantity undefined at this parameter point\0",
        QfimLabStatus::Numerical => b"numerical failure\0",
    };
    msg.as_ptr() as *const c_char
}
