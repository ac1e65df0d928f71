//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment. Missing keys take the
//! reference defaults; unknown or repeated keys are rejected. Command-line
//! flags are applied afterwards through [`ConfigBuilder::set`], so they
//! override file values and go through the same validation.

use std::collections::BTreeMap;
use std::path::PathBuf;

use eit2des_core::{Axis, Level, SignalKind, SpectralGrid, SystemParams};

use crate::error::CliError;
use crate::format::fmt_sig;

const DEFAULT_HALF_WIDTH: f64 = 150.0;
const DEFAULT_STEP: f64 = 0.5;

/// Every recognised key, in the order the run summary echoes them.
pub const KEYS: [&str; 20] = [
    "omega_ab",
    "Gamma1",
    "Gamma2",
    "gamma0_a",
    "gamma0_b",
    "gamma0_c",
    "Omega",
    "omega1_min",
    "omega1_max",
    "omega1_step",
    "omega3_min",
    "omega3_max",
    "omega3_step",
    "t2",
    "control",
    "kind",
    "output",
    "dt",
    "population_t_max",
    "population_step",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    /// ω axes; the grid's own t2 is replaced per output file.
    pub grid: SpectralGrid,
    pub t2_list: Vec<f64>,
    pub output_path: PathBuf,
    pub control_on: bool,
    pub signal_kind: SignalKind,
    /// Integration step of the propagation oracle, ps.
    pub dt: f64,
    pub population_t_max: f64,
    pub population_step: f64,
}

impl RunConfig {
    /// Parameters with the control field applied or removed per `control_on`.
    pub fn effective_params(&self) -> SystemParams {
        if self.control_on {
            self.params
        } else {
            self.params.without_control()
        }
    }

    /// `key = value` lines for every setting, in [`KEYS`] order.
    pub fn summary_lines(&self) -> Vec<String> {
        let p = &self.params;
        let g = &self.grid;
        let t2: Vec<String> = self.t2_list.iter().map(|&t| fmt_sig(t)).collect();
        let values: [String; 20] = [
            fmt_sig(p.omega_ab()),
            fmt_sig(p.relax_down()),
            fmt_sig(p.relax_up()),
            fmt_sig(p.dephasing(Level::A)),
            fmt_sig(p.dephasing(Level::B)),
            fmt_sig(p.dephasing(Level::C)),
            fmt_sig(p.rabi()),
            fmt_sig(g.omega1.min),
            fmt_sig(g.omega1.max),
            fmt_sig(g.omega1.step),
            fmt_sig(g.omega3.min),
            fmt_sig(g.omega3.max),
            fmt_sig(g.omega3.step),
            t2.join(","),
            if self.control_on { "on" } else { "off" }.to_string(),
            self.signal_kind.tag().to_string(),
            self.output_path.display().to_string(),
            fmt_sig(self.dt),
            fmt_sig(self.population_t_max),
            fmt_sig(self.population_step),
        ];
        KEYS.iter()
            .zip(values)
            .map(|(k, v)| format!("{k} = {v}"))
            .collect()
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        ConfigBuilder::default()
            .build()
            .expect("reference defaults are valid")
    }
}

/// Raw assignments collected from a file and from flags.
#[derive(Debug, Clone, Default)]
pub struct ConfigBuilder {
    values: BTreeMap<&'static str, (String, Option<usize>)>,
}

fn known_key(key: &str) -> Option<&'static str> {
    KEYS.iter().copied().find(|k| *k == key)
}

impl ConfigBuilder {
    /// Parses a whole document. Repeated keys are an error.
    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut builder = ConfigBuilder::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Parse {
                    line: line_no,
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(key) = known_key(key) else {
                return Err(CliError::Parse {
                    line: line_no,
                    message: format!("unknown key `{key}`"),
                });
            };
            if value.is_empty() {
                return Err(CliError::Parse {
                    line: line_no,
                    message: format!("missing value for `{key}`"),
                });
            }
            if builder.values.contains_key(key) {
                return Err(CliError::Parse {
                    line: line_no,
                    message: format!("`{key}` assigned twice"),
                });
            }
            builder
                .values
                .insert(key, (value.to_string(), Some(line_no)));
        }
        Ok(builder)
    }

    /// Sets or replaces `key`, as a command-line flag does.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<&mut Self, CliError> {
        let key = known_key(key).ok_or_else(|| CliError::Validation {
            key: key.to_string(),
            message: "unknown key".into(),
        })?;
        self.values.insert(key, (value.into(), None));
        Ok(self)
    }

    fn number(&self, key: &'static str) -> Result<Option<f64>, CliError> {
        let Some((raw, line)) = self.values.get(key) else {
            return Ok(None);
        };
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            _ => Err(match line {
                Some(line) => CliError::Parse {
                    line: *line,
                    message: format!("`{key}`: `{raw}` is not a finite number"),
                },
                None => CliError::Validation {
                    key: key.into(),
                    message: format!("`{raw}` is not a finite number"),
                },
            }),
        }
    }

    fn text(&self, key: &'static str) -> Option<&str> {
        self.values.get(key).map(|(v, _)| v.as_str())
    }

    fn invalid(key: &str, message: impl Into<String>) -> CliError {
        CliError::Validation {
            key: key.to_string(),
            message: message.into(),
        }
    }

    pub fn build(&self) -> Result<RunConfig, CliError> {
        let reference = SystemParams::reference();
        let num = |key: &'static str, default: f64| -> Result<f64, CliError> {
            Ok(self.number(key)?.unwrap_or(default))
        };

        let params_fields: [(&'static str, f64); 7] = [
            ("omega_ab", num("omega_ab", reference.omega_ab())?),
            ("Gamma1", num("Gamma1", reference.relax_down())?),
            ("Gamma2", num("Gamma2", reference.relax_up())?),
            ("gamma0_a", num("gamma0_a", reference.dephasing(Level::A))?),
            ("gamma0_b", num("gamma0_b", reference.dephasing(Level::B))?),
            ("gamma0_c", num("gamma0_c", reference.dephasing(Level::C))?),
            ("Omega", num("Omega", reference.rabi())?),
        ];
        for (key, v) in params_fields {
            if v < 0.0 {
                return Err(Self::invalid(key, format!("must be non-negative, got {v}")));
            }
        }
        let [omega_ab, g1, g2, ga, gb, gc, rabi] = params_fields.map(|(_, v)| v);
        let params = SystemParams::builder()
            .omega_ab(omega_ab)
            .relax_down(g1)
            .relax_up(g2)
            .dephasing(Level::A, ga)
            .dephasing(Level::B, gb)
            .dephasing(Level::C, gc)
            .rabi(rabi)
            .build()
            .map_err(|e| match e {
                eit2des_core::Error::InvalidParameter { name, reason } => {
                    Self::invalid(name, reason)
                }
                other => CliError::Core(other),
            })?;

        let axis = |prefix: &'static str| -> Result<Axis, CliError> {
            let key_min = if prefix == "omega1" {
                "omega1_min"
            } else {
                "omega3_min"
            };
            let key_max = if prefix == "omega1" {
                "omega1_max"
            } else {
                "omega3_max"
            };
            let key_step = if prefix == "omega1" {
                "omega1_step"
            } else {
                "omega3_step"
            };
            let min = num(key_min, omega_ab - DEFAULT_HALF_WIDTH)?;
            let max = num(key_max, omega_ab + DEFAULT_HALF_WIDTH)?;
            let step = num(key_step, DEFAULT_STEP)?;
            Axis::new(min, max, step).map_err(|e| Self::invalid(key_step, e.to_string()))
        };
        let grid =
            SpectralGrid::new(axis("omega1")?, axis("omega3")?, 0.0).map_err(CliError::Core)?;

        let t2_list = match self.text("t2") {
            None => vec![0.0, 2.0, 4.0, 300.0],
            Some(raw) => parse_t2_list(raw)?,
        };

        let control_on = match self.text("control") {
            None | Some("on") => true,
            Some("off") => false,
            Some(other) => {
                return Err(Self::invalid(
                    "control",
                    format!("expected on|off, got `{other}`"),
                ))
            }
        };
        let signal_kind = match self.text("kind") {
            None => SignalKind::Rephasing,
            Some(tag) => SignalKind::from_tag(tag)
                .ok_or_else(|| Self::invalid("kind", format!("expected rp|nr|abs, got `{tag}`")))?,
        };
        let output_path = PathBuf::from(self.text("output").unwrap_or("eit2des-out"));

        let dt = num("dt", eit2des_core::lindblad::DEFAULT_DT_PS)?;
        if dt <= 0.0 {
            return Err(Self::invalid("dt", "must be positive"));
        }
        let population_t_max = num("population_t_max", 10.0)?;
        if population_t_max <= 0.0 {
            return Err(Self::invalid("population_t_max", "must be positive"));
        }
        let population_step = num("population_step", 0.01)?;
        if population_step <= 0.0 || population_step > population_t_max {
            return Err(Self::invalid(
                "population_step",
                "must be positive and at most population_t_max",
            ));
        }

        Ok(RunConfig {
            params,
            grid,
            t2_list,
            output_path,
            control_on,
            signal_kind,
            dt,
            population_t_max,
            population_step,
        })
    }
}

/// Comma- or whitespace-separated, non-negative, strictly increasing list.
pub fn parse_t2_list(raw: &str) -> Result<Vec<f64>, CliError> {
    let invalid = |m: String| CliError::Validation {
        key: "t2".into(),
        message: m,
    };
    let values = raw
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| invalid(format!("`{s}` is not a finite number")))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    if values.is_empty() {
        return Err(invalid("list is empty".into()));
    }
    if let Some(v) = values.iter().find(|v| **v < 0.0) {
        return Err(invalid(format!("{v} is negative")));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("values must be strictly increasing".into()));
    }
    Ok(values)
}

/// Parses a complete document into a validated configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    ConfigBuilder::from_text(text)?.build()
}
