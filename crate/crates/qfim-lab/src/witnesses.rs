//! Witness machinery: evaluate any scalar functional on a time grid,
//! estimate derivatives, detect the intervals where a witness grows
//! (information backflow), locate extrema, predict the recoherence period
//! of the uniform spin bath and audit the discord lower bound on the QFIs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::correlations::{self, FidelityPhase};
use crate::estimation::{self};
use crate::models::{self, EnvParams, ModelConfig, Param, SpinEnvParams};
use crate::parallel;

/// Default derivative threshold separating real growth from float noise on
/// flat plateaus.
pub const DERIVATIVE_THRESHOLD: f64 = 1e-9;

type PointError = Box<dyn std::error::Error + Send + Sync>;

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("grid must have at least 3 strictly increasing points")]
    BadGrid,
    #[error("evaluating {quantity} at t = {t}: {source}")]
    PointEvaluation {
        quantity: &'static str,
        t: f64,
        #[source]
        source: PointError,
    },
    #[error("oscillation period is only defined for a uniform spin environment")]
    PeriodUndefined,
}

/// Scalar functionals that can be scanned over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    QfiP,
    QfiR,
    Ip,
    Lqu,
    Fidelity,
    Coherence,
    Purity,
    DeltaMin,
    TraceDistance,
    DeltaPIndep,
    DeltaPSimul,
    DeltaRIndep,
    DeltaRSimul,
}

impl Quantity {
    pub fn label(&self) -> &'static str {
        match self {
            Quantity::QfiP => "qfi_p",
            Quantity::QfiR => "qfi_r",
            Quantity::Ip => "ip",
            Quantity::Lqu => "lqu",
            Quantity::Fidelity => "fidelity",
            Quantity::Coherence => "coherence",
            Quantity::Purity => "purity",
            Quantity::DeltaMin => "delta_min",
            Quantity::TraceDistance => "trace_distance",
            Quantity::DeltaPIndep => "delta_p_indep",
            Quantity::DeltaPSimul => "delta_p_simul",
            Quantity::DeltaRIndep => "delta_r_indep",
            Quantity::DeltaRSimul => "delta_r_simul",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Quantity::all().iter().copied().find(|q| q.label() == s)
    }

    pub fn all() -> &'static [Quantity] {
        &[
            Quantity::QfiP,
            Quantity::QfiR,
            Quantity::Ip,
            Quantity::Lqu,
            Quantity::Fidelity,
            Quantity::Coherence,
            Quantity::Purity,
            Quantity::DeltaMin,
            Quantity::TraceDistance,
            Quantity::DeltaPIndep,
            Quantity::DeltaPSimul,
            Quantity::DeltaRIndep,
            Quantity::DeltaRSimul,
        ]
    }
}

/// Evaluate one quantity at one instant.
pub fn evaluate(quantity: Quantity, t: f64, cfg: &ModelConfig) -> Result<f64, PointError> {
    let val = match quantity {
        Quantity::QfiP => estimation::qfi_closed(Param::P, t, cfg)?,
        Quantity::QfiR => estimation::qfi_closed(Param::R, t, cfg)?,
        Quantity::Ip => correlations::ip_closed(t, cfg)?.value,
        Quantity::Lqu => correlations::lqu_closed(t, cfg)?.lqu,
        Quantity::Fidelity => correlations::fidelity_paper(t, cfg, FidelityPhase::OmegaT),
        Quantity::Coherence => correlations::coherence_l1_closed(t, cfg),
        Quantity::Purity => correlations::purity_closed(t, cfg),
        Quantity::DeltaMin => estimation::crb_report(t, cfg)?.delta_min,
        Quantity::TraceDistance => {
            let rho0 = models::initial_state(&cfg.initial)?;
            let rho_t = models::evolved_state(t, cfg)?;
            correlations::trace_distance(&rho0, &rho_t)
        }
        Quantity::DeltaPIndep => estimation::crb_report(t, cfg)?.delta_p_indep,
        Quantity::DeltaPSimul => estimation::crb_report(t, cfg)?.delta_p_simul,
        Quantity::DeltaRIndep => estimation::crb_report(t, cfg)?.delta_r_indep,
        Quantity::DeltaRSimul => estimation::crb_report(t, cfg)?.delta_r_simul,
    };
    Ok(val)
}

/// One scanned witness: values over a strictly increasing grid plus central
/// finite-difference derivative estimates (one-sided at the ends).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessSeries {
    pub quantity: Quantity,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
}

impl WitnessSeries {
    /// Build from precomputed values, filling in derivative estimates.
    pub fn from_values(
        quantity: Quantity,
        grid: Vec<f64>,
        values: Vec<f64>,
    ) -> Result<Self, WitnessError> {
        if grid.len() < 3 || grid.len() != values.len() {
            return Err(WitnessError::BadGrid);
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(WitnessError::BadGrid);
        }
        let n = grid.len();
        let mut derivatives = vec![0.0; n];
        derivatives[0] = (values[1] - values[0]) / (grid[1] - grid[0]);
        derivatives[n - 1] = (values[n - 1] - values[n - 2]) / (grid[n - 1] - grid[n - 2]);
        for i in 1..n - 1 {
            derivatives[i] = (values[i + 1] - values[i - 1]) / (grid[i + 1] - grid[i - 1]);
        }
        Ok(Self {
            quantity,
            grid,
            values,
            derivatives,
        })
    }

    /// Mean grid spacing, the resolution every interval/extremum claim is
    /// made at.
    pub fn step(&self) -> f64 {
        (self.grid[self.grid.len() - 1] - self.grid[0]) / (self.grid.len() - 1) as f64
    }

    /// Indices of interior local maxima: strict rise-then-fall sign
    /// changes, with plateau runs reporting their midpoint.
    pub fn local_maxima(&self) -> Vec<usize> {
        extrema_indices(&self.values, true)
    }

    pub fn local_minima(&self) -> Vec<usize> {
        extrema_indices(&self.values, false)
    }
}

fn extrema_indices(values: &[f64], maxima: bool) -> Vec<usize> {
    let n = values.len();
    if n < 3 {
        return Vec::new();
    }
    let plateau_tol = 1e-12;
    let sign = |d: f64| {
        if d > plateau_tol {
            1i8
        } else if d < -plateau_tol {
            -1i8
        } else {
            0i8
        }
    };
    let diffs: Vec<i8> = values.windows(2).map(|w| sign(w[1] - w[0])).collect();
    let (before, after) = if maxima { (1i8, -1i8) } else { (-1i8, 1i8) };
    let mut out = Vec::new();
    let mut i = 0;
    while i < diffs.len() {
        if diffs[i] == before {
            let mut j = i + 1;
            while j < diffs.len() && diffs[j] == 0 {
                j += 1;
            }
            if j < diffs.len() && diffs[j] == after {
                // Peak spans samples i+1 ..= j; report the midpoint.
                out.push((i + 1 + j) / 2);
            }
            i = j.max(i + 1);
        } else {
            i += 1;
        }
    }
    out
}

/// Scan one quantity over a grid. Point-level failures abort the scan and
/// carry the offending time.
pub fn scan(
    quantity: Quantity,
    grid: &[f64],
    cfg: &ModelConfig,
) -> Result<WitnessSeries, WitnessError> {
    if grid.len() < 3 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(WitnessError::BadGrid);
    }
    let results = parallel::parallel_map(grid, |&t| evaluate(quantity, t, cfg).map_err(|e| (t, e)));
    let mut values = Vec::with_capacity(grid.len());
    for res in results {
        match res {
            Ok(v) => values.push(v),
            Err((t, e)) => {
                return Err(WitnessError::PointEvaluation {
                    quantity: quantity.label(),
                    t,
                    source: e,
                })
            }
        }
    }
    WitnessSeries::from_values(quantity, grid.to_vec(), values)
}

/// Closed interval of grid times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

/// Non-Markovianity report for one witness series: maximal intervals with
/// derivative above threshold, extrema instants, and (when the config has a
/// uniform spin bath) the predicted revival period.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NonMarkovReport {
    pub quantity: Quantity,
    pub intervals: Vec<Interval>,
    pub maxima_times: Vec<f64>,
    pub minima_times: Vec<f64>,
    pub predicted_period: Option<f64>,
}

impl NonMarkovReport {
    pub fn is_markovian(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn with_period(mut self, period: f64) -> Self {
        self.predicted_period = Some(period);
        self
    }
}

/// Find the maximal grid intervals on which the series derivative exceeds
/// `threshold` (growth = backflow). Endpoints are reported at grid points;
/// no sub-grid interpolation is attempted.
pub fn detect_nonmarkov(series: &WitnessSeries, threshold: f64) -> NonMarkovReport {
    let mut intervals = Vec::new();
    let mut run_start: Option<usize> = None;
    for (i, &d) in series.derivatives.iter().enumerate() {
        if d > threshold {
            run_start.get_or_insert(i);
        } else if let Some(s) = run_start.take() {
            intervals.push(Interval {
                start: series.grid[s],
                end: series.grid[i - 1],
            });
        }
    }
    if let Some(s) = run_start {
        intervals.push(Interval {
            start: series.grid[s],
            end: series.grid[series.grid.len() - 1],
        });
    }
    NonMarkovReport {
        quantity: series.quantity,
        intervals,
        maxima_times: series
            .local_maxima()
            .iter()
            .map(|&i| series.grid[i])
            .collect(),
        minima_times: series
            .local_minima()
            .iter()
            .map(|&i| series.grid[i])
            .collect(),
        predicted_period: None,
    }
}

/// Revival period `T = 2π/sqrt(h² + 4λ²)` of the uniform spin bath.
pub fn predicted_period(env: &SpinEnvParams) -> Result<f64, WitnessError> {
    let (lambda, h) = env
        .uniform_couplings()
        .ok_or(WitnessError::PeriodUndefined)?;
    Ok(2.0 * std::f64::consts::PI / (h * h + 4.0 * lambda * lambda).sqrt())
}

/// Worst offset from any instant in `from` to its nearest neighbour in
/// `to`; `None` when either list is empty. The coincidence diagnostic for
/// comparing extrema epochs across witnesses.
pub fn coincidence_offset(from: &[f64], to: &[f64]) -> Option<f64> {
    if from.is_empty() || to.is_empty() {
        return None;
    }
    Some(
        from.iter()
            .map(|&a| {
                to.iter()
                    .map(|&b| (a - b).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max),
    )
}

/// Full non-Markovianity analysis of one quantity, attaching the predicted
/// period when the environment supports one.
pub fn analyze(
    quantity: Quantity,
    grid: &[f64],
    cfg: &ModelConfig,
    threshold: f64,
) -> Result<NonMarkovReport, WitnessError> {
    let series = scan(quantity, grid, cfg)?;
    let mut report = detect_nonmarkov(&series, threshold);
    if let EnvParams::Spin(env) = &cfg.env {
        if let Ok(t) = predicted_period(env) {
            report = report.with_period(t);
        }
    }
    Ok(report)
}

/// Margins of the discord lower bound on the QFIs at one grid point:
/// `qfi_r - ip` and `qfi_p - ip`, interferometric power from the eigenbasis
/// oracle.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundMargin {
    pub t: f64,
    pub margin_r: f64,
    pub margin_p: f64,
}

/// Audit of the bound `IP <= min(F(p), F(r))` over a grid: all margins,
/// their minima, and any points below the violation tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundAudit {
    pub margins: Vec<BoundMargin>,
    pub min_margin_r: f64,
    pub min_margin_p: f64,
    pub violations: Vec<BoundMargin>,
}

pub const BOUND_VIOLATION_TOL: f64 = -1e-10;

/// Check the interferometric-power lower bound on both QFIs at every grid
/// point. Violations are data, not errors.
pub fn bound_audit(grid: &[f64], cfg: &ModelConfig) -> Result<BoundAudit, WitnessError> {
    let results = parallel::parallel_map(grid, |&t| -> Result<BoundMargin, (f64, PointError)> {
        let rho = models::evolved_state(t, cfg).map_err(|e| (t, Box::new(e) as PointError))?;
        let ip = correlations::ip_eigen(&rho).map_err(|e| (t, Box::new(e) as PointError))?;
        let f_p =
            estimation::qfi_closed(Param::P, t, cfg).map_err(|e| (t, Box::new(e) as PointError))?;
        // At the pure boundary r = 1 the mixedness QFI diverges; the bound
        // holds with infinite margin there.
        let f_r = match estimation::qfi_closed(Param::R, t, cfg) {
            Ok(v) => v,
            Err(estimation::EstimationError::RPure) => f64::INFINITY,
            Err(e) => return Err((t, Box::new(e) as PointError)),
        };
        Ok(BoundMargin {
            t,
            margin_r: f_r - ip,
            margin_p: f_p - ip,
        })
    });
    let mut margins = Vec::with_capacity(grid.len());
    for res in results {
        match res {
            Ok(m) => margins.push(m),
            Err((t, e)) => {
                return Err(WitnessError::PointEvaluation {
                    quantity: "bound_audit",
                    t,
                    source: e,
                })
            }
        }
    }
    let min_margin_r = margins
        .iter()
        .map(|m| m.margin_r)
        .fold(f64::INFINITY, f64::min);
    let min_margin_p = margins
        .iter()
        .map(|m| m.margin_p)
        .fold(f64::INFINITY, f64::min);
    let violations = margins
        .iter()
        .copied()
        .filter(|m| m.margin_r < BOUND_VIOLATION_TOL || m.margin_p < BOUND_VIOLATION_TOL)
        .collect();
    Ok(BoundAudit {
        margins,
        min_margin_r,
        min_margin_p,
        violations,
    })
}

/// Uniform grid of `steps` points over `[start, stop]`.
pub fn linspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    assert!(steps >= 2, "need at least two grid points");
    let dh = (stop - start) / (steps - 1) as f64;
    (0..steps).map(|i| start + dh * i as f64).collect()
}
