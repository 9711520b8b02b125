//! Parameter sweeps and the figure-dataset presets.
//!
//! A [`SweepSpec`] names one axis (time, an initial-state parameter or an
//! environment parameter), a range, a base configuration and the output
//! quantities; [`run_sweep`] evaluates the quantities at every grid point
//! and the result serializes as CSV. Per-point domain errors become `nan`
//! cells plus a note, keeping rows aligned for plotting.
//!
//! The preset table reproduces the parameter sets of the reference figure
//! datasets; see [`presets`].
//!
//! ```
//! let preset = qfim_lab::sweep::preset("fig4")?;
//! let result = qfim_lab::sweep::run_sweep(&preset.spec)?;
//! assert!(result.to_csv_string().starts_with("t,qfi_p,qfi_r\n"));
//! # Ok::<(), qfim_lab::sweep::SweepError>(())
//! ```

use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

use crate::models::{BosonicEnvParams, EnvParams, InitialStateParams, ModelConfig, SpinEnvParams};
use crate::parallel;
use crate::witnesses::{self, Quantity};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("steps must be >= 2, got {0}")]
    TooFewSteps(usize),
    #[error("range must satisfy start < stop, got [{start}, {stop}]")]
    BadRange { start: f64, stop: f64 },
    #[error("axis {axis} out of bounds: {detail}")]
    AxisBounds { axis: &'static str, detail: String },
    #[error("axis {axis} requires {requirement}")]
    AxisEnvMismatch {
        axis: &'static str,
        requirement: &'static str,
    },
    #[error("no outputs requested")]
    NoOutputs,
    #[error("unknown quantity tag {0:?}")]
    UnknownQuantity(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("config error: {0}")]
    Config(#[from] crate::models::ModelError),
}

/// Sweepable axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    T,
    P,
    R,
    Lambda,
    H,
    Gamma0,
    N,
}

impl Axis {
    pub fn label(&self) -> &'static str {
        match self {
            Axis::T => "t",
            Axis::P => "p",
            Axis::R => "r",
            Axis::Lambda => "lambda",
            Axis::H => "h",
            Axis::Gamma0 => "gamma0",
            Axis::N => "N",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "t" => Axis::T,
            "p" => Axis::P,
            "r" => Axis::R,
            "lambda" => Axis::Lambda,
            "h" => Axis::H,
            "gamma0" => Axis::Gamma0,
            "N" | "n" => Axis::N,
            _ => return None,
        })
    }
}

/// One sweep: axis + range + fixed configuration + output quantities.
/// `eval_time` is the instant every quantity is evaluated at when the axis
/// is not time itself.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    #[serde(default)]
    pub eval_time: f64,
    pub config: ModelConfig,
    pub outputs: Vec<Quantity>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.steps < 2 {
            return Err(SweepError::TooFewSteps(self.steps));
        }
        if self.start.is_nan() || self.stop.is_nan() || self.start >= self.stop {
            return Err(SweepError::BadRange {
                start: self.start,
                stop: self.stop,
            });
        }
        if self.outputs.is_empty() {
            return Err(SweepError::NoOutputs);
        }
        self.config.validate()?;
        let bounds_err = |detail: String| SweepError::AxisBounds {
            axis: self.axis.label(),
            detail,
        };
        match self.axis {
            Axis::T => {
                if self.start < 0.0 {
                    return Err(bounds_err("time starts below 0".into()));
                }
            }
            Axis::P => {
                if self.start < 0.0 || self.stop > 1.0 {
                    return Err(bounds_err("p must stay in [0, 1]".into()));
                }
            }
            Axis::R => {
                if self.start <= 0.0 || self.stop > 1.0 {
                    return Err(bounds_err("r must stay in (0, 1]".into()));
                }
            }
            Axis::Lambda | Axis::H => {
                if self.start < 0.0 {
                    return Err(bounds_err("coupling must be >= 0".into()));
                }
                if !matches!(&self.config.env, EnvParams::Spin(s) if s.uniform_couplings().is_some())
                {
                    return Err(SweepError::AxisEnvMismatch {
                        axis: self.axis.label(),
                        requirement: "a uniform spin environment",
                    });
                }
            }
            Axis::Gamma0 => {
                if self.start < 0.0 {
                    return Err(bounds_err("coupling must be >= 0".into()));
                }
                if !matches!(&self.config.env, EnvParams::Bosonic(_)) {
                    return Err(SweepError::AxisEnvMismatch {
                        axis: "gamma0",
                        requirement: "a bosonic environment",
                    });
                }
            }
            Axis::N => {
                if self.start < 1.0 {
                    return Err(bounds_err("N must be >= 1".into()));
                }
                if !matches!(&self.config.env, EnvParams::Spin(s) if s.uniform_couplings().is_some())
                {
                    return Err(SweepError::AxisEnvMismatch {
                        axis: "N",
                        requirement: "a uniform spin environment",
                    });
                }
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let raw = witnesses::linspace(self.start, self.stop, self.steps);
        if self.axis == Axis::N {
            raw.into_iter().map(|v| v.round()).collect()
        } else {
            raw
        }
    }

    /// The (time, config) pair one axis value denotes.
    fn point(&self, value: f64) -> Result<(f64, ModelConfig), SweepError> {
        let mut cfg = self.config.clone();
        let mut t = self.eval_time;
        match self.axis {
            Axis::T => t = value,
            Axis::P => cfg.initial = InitialStateParams::new(value, cfg.initial.r)?,
            Axis::R => cfg.initial = InitialStateParams::new(cfg.initial.p, value)?,
            Axis::Lambda => {
                let (n, h) = match &cfg.env {
                    EnvParams::Spin(s) => (s.n(), s.uniform_couplings().expect("validated").1),
                    _ => unreachable!("validated"),
                };
                cfg.env = EnvParams::Spin(SpinEnvParams::uniform(n, value, h)?);
            }
            Axis::H => {
                let (n, lambda) = match &cfg.env {
                    EnvParams::Spin(s) => (s.n(), s.uniform_couplings().expect("validated").0),
                    _ => unreachable!("validated"),
                };
                cfg.env = EnvParams::Spin(SpinEnvParams::uniform(n, lambda, value)?);
            }
            Axis::Gamma0 => {
                let cutoff = match &cfg.env {
                    EnvParams::Bosonic(b) => b.cutoff,
                    _ => unreachable!("validated"),
                };
                cfg.env = EnvParams::Bosonic(BosonicEnvParams::equal_coupling(value, cutoff));
            }
            Axis::N => {
                let (lambda, h) = match &cfg.env {
                    EnvParams::Spin(s) => s.uniform_couplings().expect("validated"),
                    _ => unreachable!("validated"),
                };
                cfg.env = EnvParams::Spin(SpinEnvParams::uniform(value as usize, lambda, h)?);
            }
        }
        Ok((t, cfg))
    }
}

/// Evaluated sweep: one row per grid point, one column per quantity.
/// Failed cells hold `None` (rendered `nan`) and leave a note.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axis_label: &'static str,
    pub quantity_labels: Vec<&'static str>,
    pub axis_values: Vec<f64>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub notes: Vec<String>,
}

impl SweepResult {
    /// Column by quantity label; `None` cells are NaN.
    pub fn column(&self, label: &str) -> Option<Vec<f64>> {
        let idx = self.quantity_labels.iter().position(|&l| l == label)?;
        Some(
            self.rows
                .iter()
                .map(|r| r[idx].unwrap_or(f64::NAN))
                .collect(),
        )
    }

    /// CSV with header `<axis>,<q1>,<q2>,...`; floats print in shortest
    /// round-trip form, errors as `nan`. Byte-deterministic for a fixed
    /// spec and build.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "{}", self.axis_label)?;
        for label in &self.quantity_labels {
            write!(w, ",{label}")?;
        }
        writeln!(w)?;
        for (value, row) in self.axis_values.iter().zip(&self.rows) {
            write!(w, "{value}")?;
            for cell in row {
                match cell {
                    Some(v) => write!(w, ",{v}")?,
                    None => write!(w, ",nan")?,
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf8")
    }
}

/// Run a sweep. Rows are computed (possibly in parallel) and emitted in
/// axis order; per-point evaluation errors become `nan` cells plus a note.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    spec.validate()?;
    let grid = spec.grid();
    let evaluated = parallel::parallel_map(&grid, |&value| {
        let mut cells = Vec::with_capacity(spec.outputs.len());
        let mut notes = Vec::new();
        match spec.point(value) {
            Ok((t, cfg)) => {
                for &q in &spec.outputs {
                    match witnesses::evaluate(q, t, &cfg) {
                        Ok(v) => cells.push(Some(v)),
                        Err(e) => {
                            cells.push(None);
                            notes.push(format!(
                                "{} at {} = {value}: {e}",
                                q.label(),
                                spec.axis.label()
                            ));
                        }
                    }
                }
            }
            Err(e) => {
                cells = vec![None; spec.outputs.len()];
                notes.push(format!("{} = {value}: {e}", spec.axis.label()));
            }
        }
        (cells, notes)
    });
    let mut rows = Vec::with_capacity(grid.len());
    let mut notes = Vec::new();
    for (cells, mut point_notes) in evaluated {
        rows.push(cells);
        notes.append(&mut point_notes);
    }
    Ok(SweepResult {
        axis_label: spec.axis.label(),
        quantity_labels: spec.outputs.iter().map(|q| q.label()).collect(),
        axis_values: grid,
        rows,
        notes,
    })
}

/// A named figure preset: the sweep spec reproducing one reference dataset.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    /// Where the parameters come from, including any value the caption
    /// leaves implicit.
    pub comment: &'static str,
    pub spec: SweepSpec,
}

fn bosonic(p: f64, r: f64, gamma0: f64, omega: f64) -> ModelConfig {
    ModelConfig::new(
        InitialStateParams::new(p, r).expect("preset params valid"),
        EnvParams::Bosonic(BosonicEnvParams::equal_coupling(gamma0, 1.0)),
        omega / 2.0,
        omega / 2.0,
    )
}

fn spin(p: f64, r: f64, n: usize, lambda: f64, h: f64, omega: f64) -> ModelConfig {
    ModelConfig::new(
        InitialStateParams::new(p, r).expect("preset params valid"),
        EnvParams::Spin(SpinEnvParams::uniform(n, lambda, h).expect("preset env valid")),
        omega / 2.0,
        omega / 2.0,
    )
}

fn spec(
    axis: Axis,
    (start, stop, steps): (f64, f64, usize),
    eval_time: f64,
    config: ModelConfig,
    outputs: &[Quantity],
) -> SweepSpec {
    SweepSpec {
        axis,
        start,
        stop,
        steps,
        eval_time,
        config,
        outputs: outputs.to_vec(),
    }
}

/// The full preset table. Each entry's comment records which caption the
/// parameters come from and what had to be filled in.
pub fn presets() -> Vec<Preset> {
    use Quantity::*;
    let qfis: &[Quantity] = &[QfiP, QfiR];
    let crbs: &[Quantity] = &[DeltaPIndep, DeltaPSimul, DeltaRIndep, DeltaRSimul];
    let cpd: &[Quantity] = &[Coherence, Purity, DeltaMin];
    vec![
        Preset {
            name: "fig1a",
            comment: "mixedness QFI vs p; caption omits t and gamma0, borrowed gamma0=0.01, \
                      Lambda*t=1.2 from the dynamics panels; r=0.9",
            spec: spec(
                Axis::P,
                (0.0, 1.0, 201),
                1.2,
                bosonic(0.1, 0.9, 0.01, 1.0),
                &[QfiR],
            ),
        },
        Preset {
            name: "fig1b",
            comment: "mixedness QFI vs r at p=0 (minimum sits at r=1/3); same borrowed \
                      gamma0=0.01, Lambda*t=1.2",
            spec: spec(
                Axis::R,
                (0.005, 0.995, 199),
                1.2,
                bosonic(0.0, 0.9, 0.01, 1.0),
                &[QfiR],
            ),
        },
        Preset {
            name: "fig2a",
            comment: "mixedness QFI vs t, bosonic gamma0=0.01, r=0.9; caption omits p, using 0.1",
            spec: spec(
                Axis::T,
                (0.0, 20.0, 401),
                0.0,
                bosonic(0.1, 0.9, 0.01, 1.0),
                &[QfiR],
            ),
        },
        Preset {
            name: "fig2b",
            comment: "mixedness QFI vs gamma0 at Lambda*t=1.2, r=0.2; caption omits p, using 0.1",
            spec: spec(
                Axis::Gamma0,
                (0.0, 0.5, 201),
                1.2,
                bosonic(0.1, 0.2, 0.01, 1.0),
                &[QfiR],
            ),
        },
        Preset {
            name: "fig3a",
            comment: "entanglement QFI vs r at Lambda*t=0.6, gamma0=0.01; caption omits p, \
                      using 0.1",
            spec: spec(
                Axis::R,
                (0.005, 0.995, 199),
                0.6,
                bosonic(0.1, 0.9, 0.01, 1.0),
                &[QfiP],
            ),
        },
        Preset {
            name: "fig3b",
            comment: "entanglement QFI vs p at Lambda*t=0.3, gamma0=0.01 (minimum sits at \
                      p=1/2); caption omits r, using 0.9; p grid stays interior since the QFI \
                      is undefined at p=0,1",
            spec: spec(
                Axis::P,
                (0.005, 0.995, 199),
                0.3,
                bosonic(0.1, 0.9, 0.01, 1.0),
                &[QfiP],
            ),
        },
        Preset {
            name: "fig4",
            comment: "both QFIs vs t, spin N=5, p=0.1, r=0.9, h=0.1, lambda=0.2",
            spec: spec(
                Axis::T,
                (0.0, 35.0, 701),
                0.0,
                spin(0.1, 0.9, 5, 0.2, 0.1, 1.0),
                qfis,
            ),
        },
        Preset {
            name: "fig5a",
            comment: "both QFIs vs lambda, spin N=20, p=0.1, r=0.9, h=0.1, t=10 (subordinate \
                      maxima grow between principal maxima)",
            spec: spec(
                Axis::Lambda,
                (0.0, 0.5, 501),
                10.0,
                spin(0.1, 0.9, 20, 0.1, 0.1, 1.0),
                qfis,
            ),
        },
        Preset {
            name: "fig5b",
            comment: "both QFIs vs h, spin N=20, p=0.1, r=0.9, lambda=0.1, t=10",
            spec: spec(
                Axis::H,
                (0.0, 0.5, 501),
                10.0,
                spin(0.1, 0.9, 20, 0.1, 0.1, 1.0),
                qfis,
            ),
        },
        Preset {
            name: "fig6a",
            comment: "alias of fig5a (the lambda sweep is referred to under both figure \
                      numbers); identical dataset",
            spec: spec(
                Axis::Lambda,
                (0.0, 0.5, 501),
                10.0,
                spin(0.1, 0.9, 20, 0.1, 0.1, 1.0),
                qfis,
            ),
        },
        Preset {
            name: "fig6b",
            comment: "both QFIs vs N at t=10, spin p=0.1, r=0.9, h=0.1, lambda=0.2 (peak \
                      structure narrows as the bath grows)",
            spec: spec(
                Axis::N,
                (1.0, 50.0, 50),
                10.0,
                spin(0.1, 0.9, 5, 0.2, 0.1, 1.0),
                qfis,
            ),
        },
        Preset {
            name: "fig7a",
            comment: "evolved-overlap witness and both QFIs vs t, spin N=10, p=0.1, r=0.7, \
                      h=0.1, lambda=0.26, Omega=75",
            spec: spec(
                Axis::T,
                (0.0, 32.0, 3201),
                0.0,
                spin(0.1, 0.7, 10, 0.26, 0.1, 75.0),
                &[Fidelity, QfiP, QfiR],
            ),
        },
        Preset {
            name: "fig7b",
            comment: "IP, LQU and both QFIs vs t, spin N=10, p=0.1, r=0.7, h=0.1, lambda=0.26",
            spec: spec(
                Axis::T,
                (0.0, 32.0, 641),
                0.0,
                spin(0.1, 0.7, 10, 0.26, 0.1, 1.0),
                &[Ip, Lqu, QfiP, QfiR],
            ),
        },
        Preset {
            name: "fig8a",
            comment: "QCRBs vs t, bosonic p=0.3, gamma0=0.01, r=0.4",
            spec: spec(
                Axis::T,
                (0.0, 20.0, 401),
                0.0,
                bosonic(0.3, 0.4, 0.01, 1.0),
                crbs,
            ),
        },
        Preset {
            name: "fig8b",
            comment: "QCRBs vs t, spin N=5, p=0.1, r=0.9, h=0.1, lambda=0.2",
            spec: spec(
                Axis::T,
                (0.0, 32.0, 641),
                0.0,
                spin(0.1, 0.9, 5, 0.2, 0.1, 1.0),
                crbs,
            ),
        },
        Preset {
            name: "fig9a",
            comment: "coherence, purity and total-variance bound vs t, spin N=50, p=0.1, \
                      r=0.9, h=0.1, lambda=0.2",
            spec: spec(
                Axis::T,
                (0.0, 32.0, 641),
                0.0,
                spin(0.1, 0.9, 50, 0.2, 0.1, 1.0),
                cpd,
            ),
        },
        Preset {
            name: "fig9b",
            comment: "coherence, purity and total-variance bound vs lambda, spin N=20, p=0.1, \
                      r=0.9, h=0.1, t=10",
            spec: spec(
                Axis::Lambda,
                (0.0, 0.5, 501),
                10.0,
                spin(0.1, 0.9, 20, 0.1, 0.1, 1.0),
                cpd,
            ),
        },
    ]
}

/// Look up one preset by name.
pub fn preset(name: &str) -> Result<Preset, SweepError> {
    presets()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| SweepError::UnknownPreset(name.to_string()))
}
