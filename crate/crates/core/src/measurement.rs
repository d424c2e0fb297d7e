//! Noisy measurement records and their file format.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::dynamics::ObservableHistory;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::{CounterRng, STREAM_NOISE};
use crate::spin::{DensityMatrix, SpinSystem};

pub const RECORD_VERSION: u32 = 1;

const FIELDS: [&str; 8] = [
    "version",
    "F",
    "times",
    "values",
    "sigma",
    "seed",
    "n_averaged",
    "waveform_fingerprint",
];

/// Sampled signal `M_i = Tr[O_i ρ0] + ΔM_i` with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub spin: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Single-shot noise standard deviation, in units of `Tr[Oρ]`.
    pub sigma: f64,
    pub seed: u64,
    pub n_averaged: u32,
    pub waveform_fingerprint: String,
}

impl MeasurementRecord {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Standard deviation of each averaged sample, `σ/√n`.
    pub fn effective_sigma(&self) -> f64 {
        self.sigma / (self.n_averaged as f64).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        SpinSystem::new(self.spin)?;
        if self.times.len() != self.values.len() {
            return Err(Error::Validation(format!(
                "times has {} entries but values has {}",
                self.times.len(),
                self.values.len()
            )));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::Validation(format!("sigma must be finite and nonnegative, got {}", self.sigma)));
        }
        if self.n_averaged < 1 {
            return Err(Error::Validation("n_averaged must be at least 1".into()));
        }
        if self.waveform_fingerprint.is_empty() {
            return Err(Error::Validation("waveform_fingerprint must not be empty".into()));
        }
        if let Some(i) = self.times.iter().chain(&self.values).position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("non-finite number at position {i}")));
        }
        Ok(())
    }

    /// Fails unless the record was generated from `history`'s model.
    pub fn check_matches(&self, history: &ObservableHistory) -> Result<()> {
        if self.waveform_fingerprint != history.fingerprint() {
            return Err(Error::FingerprintMismatch {
                record: self.waveform_fingerprint.clone(),
                model: history.fingerprint().to_string(),
            });
        }
        if self.len() != history.len() {
            return Err(Error::DimensionMismatch {
                expected: history.len(),
                found: self.len(),
            });
        }
        Ok(())
    }

    /// Sub-record made of the given sample indices, in the given order.
    pub fn select(&self, rows: &[usize]) -> Result<Self> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.len()) {
            return Err(Error::InvalidArgument(format!("sample {bad} out of range")));
        }
        Ok(Self {
            times: rows.iter().map(|&r| self.times[r]).collect(),
            values: rows.iter().map(|&r| self.values[r]).collect(),
            waveform_fingerprint: self.waveform_fingerprint.clone(),
            ..*self
        })
    }

    /// Serializes with every double printed to 17 significant digits.
    pub fn to_json(&self) -> Result<String> {
        self.validate()?;
        let mut s = String::new();
        s.push_str("{\n");
        let _ = writeln!(s, "  \"version\": {RECORD_VERSION},");
        let _ = writeln!(s, "  \"F\": {},", num(self.spin));
        write_array(&mut s, "times", &self.times);
        write_array(&mut s, "values", &self.values);
        let _ = writeln!(s, "  \"sigma\": {},", num(self.sigma));
        let _ = writeln!(s, "  \"seed\": {},", self.seed);
        let _ = writeln!(s, "  \"n_averaged\": {},", self.n_averaged);
        let _ = writeln!(
            s,
            "  \"waveform_fingerprint\": {}",
            serde_json::to_string(&self.waveform_fingerprint).expect("string serializes")
        );
        s.push_str("}\n");
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: RecordDocument = serde_json::from_str(text).map_err(|e| describe_parse_error(text, e))?;
        if doc.version != RECORD_VERSION {
            return Err(Error::UnsupportedVersion {
                expected: RECORD_VERSION,
                found: doc.version,
            });
        }
        let record = Self {
            spin: doc.spin,
            times: doc.times,
            values: doc.values,
            sigma: doc.sigma,
            seed: doc.seed,
            n_averaged: doc.n_averaged,
            waveform_fingerprint: doc.waveform_fingerprint,
        };
        record.validate()?;
        Ok(record)
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_array(s: &mut String, name: &str, xs: &[f64]) {
    let _ = write!(s, "  \"{name}\": [");
    for (i, x) in xs.iter().enumerate() {
        s.push_str(if i == 0 { "\n    " } else { ",\n    " });
        s.push_str(&num(*x));
    }
    s.push_str(if xs.is_empty() { "],\n" } else { "\n  ],\n" });
}

/// A truncated document is a syntax error to the JSON parser; reporting the
/// first field that never appeared is more useful.
fn describe_parse_error(text: &str, e: serde_json::Error) -> Error {
    if e.is_eof() {
        if let Some(missing) = FIELDS.iter().find(|f| !text.contains(&format!("\"{f}\""))) {
            return Error::Parse(format!("truncated document: missing field `{missing}` ({e})"));
        }
        let last = FIELDS
            .iter()
            .max_by_key(|f| text.rfind(&format!("\"{f}\"")))
            .expect("field list is nonempty");
        return Error::Parse(format!("truncated document: field `{last}` is incomplete ({e})"));
    }
    Error::Parse(e.to_string())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordDocument {
    version: u32,
    #[serde(rename = "F")]
    spin: f64,
    times: Vec<f64>,
    values: Vec<f64>,
    sigma: f64,
    seed: u64,
    n_averaged: u32,
    waveform_fingerprint: String,
}

pub fn write_record(record: &MeasurementRecord, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, record.to_json()?)?;
    Ok(())
}

pub fn read_record(path: impl AsRef<Path>) -> Result<MeasurementRecord> {
    MeasurementRecord::from_json(&std::fs::read_to_string(path)?)
}

/// Draws `values[i] = Tr[O_i ρ0] + ε_i` with `ε_i ~ N(0, σ²/n_averaged)`.
///
/// Sample `i` uses counter `i` of the noise stream keyed by `seed`, so a
/// record is reproducible bit for bit and independent of evaluation order.
pub fn synthesize_record(
    rho0: &DensityMatrix,
    history: &ObservableHistory,
    sigma: f64,
    seed: u64,
    n_averaged: u32,
) -> Result<MeasurementRecord> {
    linalg::ensure_dim(rho0.matrix(), history.dim())?;
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Validation(format!("sigma must be finite and nonnegative, got {sigma}")));
    }
    if n_averaged < 1 {
        return Err(Error::Validation("n_averaged must be at least 1".into()));
    }
    let rng = CounterRng::new(seed, STREAM_NOISE);
    let scale = sigma / (n_averaged as f64).sqrt();
    let values = history
        .expectations(rho0.matrix())?
        .into_iter()
        .enumerate()
        .map(|(i, m)| if scale > 0.0 { m + scale * rng.normal(i as u64) } else { m })
        .collect();
    Ok(MeasurementRecord {
        spin: history.spin(),
        times: history.times().to_vec(),
        values,
        sigma,
        seed,
        n_averaged,
        waveform_fingerprint: history.fingerprint().to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{heisenberg_history, propagate_state, ControlWaveform, JumpOperators, SamplingPlan};
    use crate::random::random_mixed_state;
    use crate::spin::TestState;

    fn model(gamma: f64) -> (SpinSystem, ControlWaveform, SamplingPlan) {
        let sys = SpinSystem::new(3.0).unwrap();
        let wf = ControlWaveform {
            phi: ControlWaveform::random_phases(30, 4),
            dt: 50e-6,
            omega_larmor: 2e4,
            chi: 4e3,
            gamma_dec: gamma,
            jumps: JumpOperators::Isotropic,
        };
        (sys, wf, SamplingPlan::default())
    }

    fn history(gamma: f64) -> ObservableHistory {
        let (sys, wf, plan) = model(gamma);
        heisenberg_history(&sys, &wf, &plan, &sys.measured_observable()).unwrap()
    }

    #[test]
    fn noiseless_record_is_the_expectation_sequence() {
        let (sys, wf, plan) = model(50.0);
        let h = history(50.0);
        let rho = random_mixed_state(7, 3, 8);
        let rec = synthesize_record(&rho, &h, 0.0, 1, 1).unwrap();
        assert_eq!(rec.values, h.expectations(rho.matrix()).unwrap());
        let o = sys.measured_observable();
        let states = propagate_state(&rho, &sys, &wf, &plan).unwrap();
        for (v, s) in rec.values.iter().zip(&states) {
            assert!((v - s.expectation(&o)).abs() < 1e-8);
        }
    }

    #[test]
    fn maximally_mixed_state_gives_zero_signal() {
        let h = history(100.0);
        for o in h.observables() {
            assert!(linalg::trace(o).norm() < 1e-12);
        }
        let rec = synthesize_record(&DensityMatrix::maximally_mixed(7), &h, 0.0, 1, 1).unwrap();
        assert!(rec.values.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn averaged_noise_variance() {
        let h = history(0.0);
        let rho = TestState::Cat.prepare(&SpinSystem::new(3.0).unwrap()).unwrap();
        let clean = h.expectations(rho.matrix()).unwrap();
        let sigma = 0.8;
        let mut residuals = Vec::new();
        for seed in 0..67 {
            let rec = synthesize_record(&rho, &h, sigma, seed, 128).unwrap();
            residuals.extend(rec.values.iter().zip(&clean).map(|(v, c)| v - c));
        }
        assert!(residuals.len() >= 10_000);
        let n = residuals.len() as f64;
        let mean = residuals.iter().sum::<f64>() / n;
        let var = residuals.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let expected = sigma * sigma / 128.0;
        assert!((var / expected - 1.0).abs() < 0.2, "{var} vs {expected}");
    }

    #[test]
    fn synthesis_is_deterministic_and_seed_dependent() {
        let h = history(0.0);
        let rho = DensityMatrix::maximally_mixed(7);
        let a = synthesize_record(&rho, &h, 0.1, 42, 1).unwrap();
        let b = synthesize_record(&rho, &h, 0.1, 42, 1).unwrap();
        let c = synthesize_record(&rho, &h, 0.1, 43, 1).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let h = history(0.0);
        let rho = DensityMatrix::maximally_mixed(5);
        assert!(matches!(
            synthesize_record(&rho, &h, 0.0, 0, 1),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let h = history(0.0);
        let rho = random_mixed_state(7, 2, 3);
        let rec = synthesize_record(&rho, &h, 0.37, u64::MAX - 5, 3).unwrap();
        let text = rec.to_json().unwrap();
        let back = MeasurementRecord::from_json(&text).unwrap();
        assert_eq!(back, rec);
        for (a, b) in back.values.iter().zip(&rec.values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn file_round_trip() {
        let h = history(0.0);
        let rec = synthesize_record(&DensityMatrix::maximally_mixed(7), &h, 0.2, 9, 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("record.json");
        write_record(&rec, &path).unwrap();
        assert_eq!(read_record(&path).unwrap(), rec);
    }

    #[test]
    fn truncated_document_names_missing_field() {
        let h = history(0.0);
        let rec = synthesize_record(&DensityMatrix::maximally_mixed(7), &h, 0.2, 9, 1).unwrap();
        let text = rec.to_json().unwrap();
        let cut = &text[..text.find("\"sigma\"").unwrap()];
        let err = MeasurementRecord::from_json(cut).unwrap_err().to_string();
        assert!(err.contains("`sigma`"), "{err}");

        let without_seed = text.replace("  \"seed\": 9,\n", "");
        let err = MeasurementRecord::from_json(&without_seed).unwrap_err().to_string();
        assert!(err.contains("seed"), "{err}");
    }

    #[test]
    fn invalid_documents_are_rejected() {
        let h = history(0.0);
        let rec = synthesize_record(&DensityMatrix::maximally_mixed(7), &h, 0.2, 9, 1).unwrap();
        let text = rec.to_json().unwrap();

        let negative = text.replace("\"sigma\": 2.", "\"sigma\": -2.");
        assert!(matches!(MeasurementRecord::from_json(&negative), Err(Error::Validation(_))));

        let future = text.replace("\"version\": 1", "\"version\": 2");
        assert!(matches!(
            MeasurementRecord::from_json(&future),
            Err(Error::UnsupportedVersion { found: 2, .. })
        ));

        let no_fp = text.replace(&format!("\"{}\"", rec.waveform_fingerprint), "\"\"");
        assert!(matches!(MeasurementRecord::from_json(&no_fp), Err(Error::Validation(_))));

        let extra = text.replacen('{', "{\n  \"comment\": 1,", 1);
        assert!(matches!(MeasurementRecord::from_json(&extra), Err(Error::Parse(_))));
    }

    #[test]
    fn fingerprint_check() {
        let h = history(0.0);
        let mut rec = synthesize_record(&DensityMatrix::maximally_mixed(7), &h, 0.0, 0, 1).unwrap();
        rec.check_matches(&h).unwrap();
        rec.waveform_fingerprint = "00".into();
        assert!(matches!(rec.check_matches(&h), Err(Error::FingerprintMismatch { .. })));
    }
}
