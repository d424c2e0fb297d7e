//! TOML experiment configuration.

use serde::{Deserialize, Serialize};

use crate::dynamics::{ControlWaveform, JumpOperators, SamplingPlan};
use crate::error::{Error, Result};
use crate::linalg::serde_cmatrix;
use crate::spin::{DensityMatrix, SpinSystem, TestState};

pub const CONFIG_VERSION: u32 = 1;

/// One experiment: spin, control, sampling, noise and the prepared state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    #[serde(rename = "F")]
    pub spin: f64,
    pub waveform: WaveformBlock,
    #[serde(default)]
    pub sampling: SamplingBlock,
    pub noise: NoiseBlock,
    /// True initial state, used to simulate and to score estimates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    /// States cycled through by a sweep; defaults to `state`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub states: Vec<StateSpec>,
    /// Calibration error of the simulated apparatus relative to the model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<DriftBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveformBlock {
    pub n_steps: usize,
    pub dt: f64,
    pub phi: PhiSpec,
    pub omega_larmor: f64,
    pub chi: f64,
    #[serde(default)]
    pub gamma_dec: f64,
    #[serde(default = "default_jumps")]
    pub jumps: JumpPreset,
}

fn default_jumps() -> JumpPreset {
    JumpPreset::Isotropic
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpPreset {
    None,
    Isotropic,
    Dephasing,
}

impl From<JumpPreset> for JumpOperators {
    fn from(p: JumpPreset) -> Self {
        match p {
            JumpPreset::None => JumpOperators::None,
            JumpPreset::Isotropic => JumpOperators::Isotropic,
            JumpPreset::Dephasing => JumpOperators::Dephasing,
        }
    }
}

/// Field angles: an explicit list or `"random:<seed>"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPhi", into = "RawPhi")]
pub enum PhiSpec {
    Random(u64),
    List(Vec<f64>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawPhi {
    Text(String),
    List(Vec<f64>),
}

impl TryFrom<RawPhi> for PhiSpec {
    type Error = String;

    fn try_from(raw: RawPhi) -> std::result::Result<Self, String> {
        match raw {
            RawPhi::List(v) => Ok(PhiSpec::List(v)),
            RawPhi::Text(s) => s
                .strip_prefix("random:")
                .and_then(|seed| seed.trim().parse().ok())
                .map(PhiSpec::Random)
                .ok_or_else(|| format!("phi must be a list of angles or \"random:<seed>\", got {s:?}")),
        }
    }
}

impl From<PhiSpec> for RawPhi {
    fn from(p: PhiSpec) -> Self {
        match p {
            PhiSpec::Random(seed) => RawPhi::Text(format!("random:{seed}")),
            PhiSpec::List(v) => RawPhi::List(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingBlock {
    pub n_samples: usize,
    pub substeps: usize,
}

impl Default for SamplingBlock {
    fn default() -> Self {
        let p = SamplingPlan::default();
        Self {
            n_samples: p.n_samples,
            substeps: p.substeps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseBlock {
    pub sigma: f64,
    pub seed: u64,
    #[serde(default = "one")]
    pub n_averaged: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftBlock {
    #[serde(default = "unit")]
    pub omega_scale: f64,
    #[serde(default = "unit")]
    pub chi_scale: f64,
}

fn unit() -> f64 {
    1.0
}

/// A named test state or an explicit density matrix given as `[re, im]` rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    BasisState { m: f64 },
    SpinCoherent { theta: f64, phi: f64 },
    Cat,
    Mixed,
    Twisted { mu: f64 },
    Matrix { rows: Vec<Vec<[f64; 2]>> },
}

impl StateSpec {
    fn named(&self) -> Option<TestState> {
        Some(match *self {
            StateSpec::BasisState { m } => TestState::BasisState { m },
            StateSpec::SpinCoherent { theta, phi } => TestState::SpinCoherent { theta, phi },
            StateSpec::Cat => TestState::Cat,
            StateSpec::Mixed => TestState::Mixed,
            StateSpec::Twisted { mu } => TestState::Twisted { mu },
            StateSpec::Matrix { .. } => return None,
        })
    }

    pub fn label(&self) -> String {
        self.named().map_or_else(|| "matrix".into(), |s| s.label())
    }

    pub fn prepare(&self, sys: &SpinSystem) -> Result<DensityMatrix> {
        match (self, self.named()) {
            (_, Some(s)) => s.prepare(sys),
            (StateSpec::Matrix { rows }, None) => {
                let m = serde_cmatrix::from_rows(rows).map_err(Error::Validation)?;
                crate::linalg::ensure_dim(&m, sys.dim())?;
                DensityMatrix::new(m)
            }
            _ => unreachable!(),
        }
    }
}

/// A validated configuration with every derived object built.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub sys: SpinSystem,
    pub waveform: ControlWaveform,
    pub plan: SamplingPlan,
    pub state: Option<(String, DensityMatrix)>,
    /// Sweep states: `states` if given, otherwise `state`.
    pub states: Vec<(String, DensityMatrix)>,
}

impl ExperimentConfig {
    /// Parses TOML, rejecting unknown keys and unsupported versions.
    pub fn parse(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string().trim_end().to_string()))?;
        if config.version != CONFIG_VERSION {
            return Err(Error::UnsupportedVersion {
                expected: CONFIG_VERSION,
                found: config.version,
            });
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn control_waveform(&self) -> Result<ControlWaveform> {
        let w = &self.waveform;
        let phi = match &w.phi {
            PhiSpec::Random(seed) => ControlWaveform::random_phases(w.n_steps, *seed),
            PhiSpec::List(v) if v.len() == w.n_steps => v.clone(),
            PhiSpec::List(v) => {
                return Err(Error::Validation(format!(
                    "waveform.phi has {} angles but waveform.n_steps is {}",
                    v.len(),
                    w.n_steps
                )))
            }
        };
        let wf = ControlWaveform {
            phi,
            dt: w.dt,
            omega_larmor: w.omega_larmor,
            chi: w.chi,
            gamma_dec: w.gamma_dec,
            jumps: w.jumps.into(),
        };
        wf.validate()?;
        Ok(wf)
    }

    /// Checks every invariant and builds the model objects.
    pub fn build(self) -> Result<Experiment> {
        let sys = SpinSystem::new(self.spin)?;
        let waveform = self.control_waveform()?;
        let plan = SamplingPlan {
            n_samples: self.sampling.n_samples,
            substeps: self.sampling.substeps,
        };
        plan.validate()?;
        let n = &self.noise;
        if !(n.sigma >= 0.0 && n.sigma.is_finite()) {
            return Err(Error::Validation(format!("noise.sigma must be finite and nonnegative, got {}", n.sigma)));
        }
        if n.n_averaged == 0 {
            return Err(Error::Validation("noise.n_averaged must be at least 1".into()));
        }
        if let Some(d) = &self.drift {
            for (name, v) in [("omega_scale", d.omega_scale), ("chi_scale", d.chi_scale)] {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::Validation(format!("drift.{name} must be finite and nonnegative, got {v}")));
                }
            }
        }
        let prepare = |s: &StateSpec| -> Result<(String, DensityMatrix)> { Ok((s.label(), s.prepare(&sys)?)) };
        let state = self.state.as_ref().map(prepare).transpose()?;
        let states = if self.states.is_empty() {
            state.iter().cloned().collect()
        } else {
            self.states.iter().map(prepare).collect::<Result<_>>()?
        };
        Ok(Experiment {
            config: self,
            sys,
            waveform,
            plan,
            state,
            states,
        })
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Experiment> {
        Self::parse(&std::fs::read_to_string(path)?)?.build()
    }
}

impl Experiment {
    /// The waveform actually played, including any configured drift.
    pub fn true_waveform(&self) -> ControlWaveform {
        match &self.config.drift {
            Some(d) => self.waveform.scaled(d.omega_scale, d.chi_scale),
            None => self.waveform.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
version = 1
F = 3

[waveform]
n_steps = 30
dt = 5e-5
phi = "random:7"
omega_larmor = 1e5
chi = 3e4
gamma_dec = 10.0
jumps = "isotropic"

[noise]
sigma = 0.5
seed = 1

[state]
kind = "basis_state"
m = -3
"#;

    #[test]
    fn parses_and_builds() {
        let e = ExperimentConfig::parse(BASIC).unwrap().build().unwrap();
        assert_eq!(e.waveform, ControlWaveform::standard(7));
        assert_eq!(e.plan, SamplingPlan::default());
        assert_eq!(e.config.noise.n_averaged, 1);
        assert_eq!(e.states.len(), 1);
        assert_eq!(e.true_waveform(), e.waveform);
    }

    #[test]
    fn round_trips_through_toml() {
        let mut c = ExperimentConfig::parse(BASIC).unwrap();
        c.waveform.phi = PhiSpec::List(vec![0.25, -1.5, 3.0]);
        c.waveform.n_steps = 3;
        c.states = vec![StateSpec::Cat, StateSpec::Matrix {
            rows: vec![vec![[0.5, 0.0], [0.0, 0.1]], vec![[0.0, -0.1], [0.5, 0.0]]],
        }];
        c.drift = Some(DriftBlock {
            omega_scale: 1.01,
            chi_scale: 1.0,
        });
        assert_eq!(ExperimentConfig::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_are_named() {
        let text = BASIC.replace("chi = 3e4", "chi = 3e4\nchii = 1");
        let msg = ExperimentConfig::parse(&text).unwrap_err().to_string();
        assert!(msg.contains("chii"), "{msg}");
        let text = BASIC.replace("m = -3", "m = -3\ntheta = 1");
        assert!(ExperimentConfig::parse(&text).unwrap_err().to_string().contains("theta"));
    }

    #[test]
    fn version_is_mandatory() {
        let text = BASIC.replace("version = 1", "");
        assert!(ExperimentConfig::parse(&text).unwrap_err().to_string().contains("version"));
        let text = BASIC.replace("version = 1", "version = 2");
        assert!(matches!(ExperimentConfig::parse(&text), Err(Error::UnsupportedVersion { .. })));
    }

    #[test]
    fn invariants_are_enforced() {
        for (from, to) in [
            ("dt = 5e-5", "dt = -5e-5"),
            ("F = 3", "F = 3.2"),
            ("sigma = 0.5", "sigma = -1"),
            ("m = -3", "m = -4"),
            ("n_steps = 30", "n_steps = 0"),
        ] {
            let c = ExperimentConfig::parse(&BASIC.replace(from, to)).unwrap();
            assert!(c.build().is_err(), "{to}");
        }
        let bad = BASIC.replace("\"random:7\"", "\"rand:7\"");
        assert!(ExperimentConfig::parse(&bad).unwrap_err().to_string().contains("random:<seed>"));
        let short = BASIC.replace("\"random:7\"", "[0.0, 1.0]");
        assert!(ExperimentConfig::parse(&short).unwrap().build().is_err());
    }
}
