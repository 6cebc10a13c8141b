//! Experiment configuration: a strict JSON document, with command-line
//! flags layered on top of it.

use serde::{Deserialize, Serialize};

use synmom::codes::{self, Code};
use synmom::gf2::BitVec;
use synmom::noise::{make_weight_t_supports, ChannelConfig, SupportMetric, SupportModel};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, untagged)]
pub enum CodeConfig {
    Catalog {
        catalog: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        param: Option<usize>,
    },
    File {
        file: String,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, untagged)]
pub enum NoiseConfig {
    /// Explicit channel list (supports carry distributions).
    Channels { channels: Vec<ChannelConfig> },
    /// One Pauli channel per qubit with shared rates, plus an optional
    /// shared flip rate on every measurement bit.
    Uniform {
        uniform_qubit_rates: [f64; 4],
        #[serde(skip_serializing_if = "Option::is_none")]
        meas_flip: Option<f64>,
    },
    /// Support family only (enough for identifiability checks).
    WeightT { t: usize, metric: SupportMetric },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sample,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
}

/// The full experiment description. Unknown fields are rejected.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub code: CodeConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "is_default_output")]
    pub outputs: OutputConfig,
}

fn is_default_output(o: &OutputConfig) -> bool {
    o.report.is_none() && o.csv.is_none()
}

impl ExperimentConfig {
    pub fn from_file(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config `{path}`: {e}")))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("invalid config `{path}`: {e}")))
    }

    pub fn build_code(&self) -> Result<Code, CliError> {
        match &self.code {
            CodeConfig::Catalog { catalog, param } => {
                codes::catalog(catalog, *param).map_err(|e| CliError::input(e.to_string()))
            }
            CodeConfig::File { file } => {
                let text = std::fs::read_to_string(file)
                    .map_err(|e| CliError::input(format!("cannot read code `{file}`: {e}")))?;
                Code::from_text(&text).map_err(|e| CliError::input(e.to_string()))
            }
        }
    }

    /// The support family of the configured noise, enough for
    /// identifiability checks.
    pub fn build_supports(&self, code: &Code) -> Result<Vec<BitVec>, CliError> {
        let shape = code.shape();
        match self
            .noise
            .as_ref()
            .ok_or_else(|| CliError::input("config has no noise section"))?
        {
            NoiseConfig::WeightT { t, metric } => Ok(make_weight_t_supports(shape, *t, *metric)),
            other => Ok(self.build_model_from(other, code)?.supports()),
        }
    }

    /// The full support model (channel distributions included).
    pub fn build_model(&self, code: &Code) -> Result<SupportModel, CliError> {
        let noise = self
            .noise
            .as_ref()
            .ok_or_else(|| CliError::input("config has no noise section"))?;
        self.build_model_from(noise, code)
    }

    fn build_model_from(&self, noise: &NoiseConfig, code: &Code) -> Result<SupportModel, CliError> {
        let shape = code.shape();
        match noise {
            NoiseConfig::Channels { channels } => synmom::noise::ModelConfig {
                channels: channels.clone(),
            }
            .build(shape)
            .map_err(|e| CliError::input(e.to_string())),
            NoiseConfig::Uniform {
                uniform_qubit_rates,
                meas_flip,
            } => {
                let mut model = SupportModel::new(shape);
                for q in 0..shape.qubits {
                    model
                        .add_pauli_channel(q, *uniform_qubit_rates)
                        .map_err(|e| CliError::input(e.to_string()))?;
                }
                if let Some(flip) = meas_flip {
                    for j in 0..shape.meas {
                        model
                            .add_flip_channel(j, *flip)
                            .map_err(|e| CliError::input(e.to_string()))?;
                    }
                }
                if model.channels().is_empty() {
                    return Err(CliError::input("uniform noise produced no channels"));
                }
                Ok(model)
            }
            NoiseConfig::WeightT { .. } => Err(CliError::input(
                "weight_t noise gives supports only; simulation and estimation need channel \
                 distributions",
            )),
        }
    }

    /// Canonical serialization used for the provenance hash.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// Flag-level overrides applied on top of a config file (or forming a
/// config on their own).
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub code: Option<String>,
    pub code_file: Option<String>,
    pub param: Option<usize>,
    pub t: Option<usize>,
    pub metric: Option<SupportMetric>,
    pub rates: Option<[f64; 4]>,
    pub meas_flip: Option<f64>,
    pub mode: Option<Mode>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub report: Option<String>,
    pub csv: Option<String>,
}

impl Overrides {
    pub fn apply(self, base: Option<ExperimentConfig>) -> Result<ExperimentConfig, CliError> {
        let mut config = match base {
            Some(c) => c,
            None => {
                let code = match (&self.code, &self.code_file) {
                    (Some(name), None) => CodeConfig::Catalog {
                        catalog: name.clone(),
                        param: self.param,
                    },
                    (None, Some(path)) => CodeConfig::File { file: path.clone() },
                    (Some(_), Some(_)) => {
                        return Err(CliError::input(
                            "give either --code or --code-file, not both",
                        ))
                    }
                    (None, None) => {
                        return Err(CliError::input(
                            "no code given: use --config, --code, or --code-file",
                        ))
                    }
                };
                ExperimentConfig {
                    code,
                    noise: None,
                    mode: None,
                    shots: None,
                    seed: None,
                    outputs: OutputConfig::default(),
                }
            }
        };
        if let Some(name) = self.code {
            config.code = CodeConfig::Catalog {
                catalog: name,
                param: self.param,
            };
        } else if let Some(path) = self.code_file {
            config.code = CodeConfig::File { file: path };
        } else if let (Some(p), CodeConfig::Catalog { param, .. }) = (self.param, &mut config.code)
        {
            *param = Some(p);
        }
        if let Some(rates) = self.rates {
            config.noise = Some(NoiseConfig::Uniform {
                uniform_qubit_rates: rates,
                meas_flip: self.meas_flip,
            });
        } else if let Some(t) = self.t {
            config.noise = Some(NoiseConfig::WeightT {
                t,
                metric: self.metric.unwrap_or(SupportMetric::Pauli),
            });
        }
        if let Some(mode) = self.mode {
            config.mode = Some(mode);
        }
        if let Some(shots) = self.shots {
            config.shots = Some(shots);
        }
        if let Some(seed) = self.seed {
            config.seed = Some(seed);
        }
        if self.report.is_some() {
            config.outputs.report = self.report;
        }
        if self.csv.is_some() {
            config.outputs.csv = self.csv;
        }
        Ok(config)
    }
}
