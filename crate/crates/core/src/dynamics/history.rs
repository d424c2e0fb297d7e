use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::timeline::{SuperopCache, Timeline, UnitaryCache};
use super::{ControlWaveform, SamplingPlan};
use crate::error::{Error, Result};
use crate::linalg::{self, serde_cmatrix, CMatrix, RMatrix};
use crate::spin::{HermitianBasis, SpinSystem};

const HISTORY_VERSION: u32 = 1;

/// Coarse-grained Heisenberg-picture observables `{O_i}` and their design matrix.
#[derive(Debug, Clone)]
pub struct ObservableHistory {
    two_f: u32,
    observables: Vec<CMatrix>,
    times: Vec<f64>,
    design: RMatrix,
    fingerprint: String,
}

impl ObservableHistory {
    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.two_f as usize + 1
    }

    pub fn spin(&self) -> f64 {
        self.two_f as f64 / 2.0
    }

    pub fn observables(&self) -> &[CMatrix] {
        &self.observables
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `N × d²` matrix whose row `i` holds the coordinates of `O_i`.
    pub fn design_matrix(&self) -> &RMatrix {
        &self.design
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// Noiseless signal `Tr[O_i ρ]` for every sample.
    pub fn expectations(&self, rho: &CMatrix) -> Result<Vec<f64>> {
        linalg::ensure_dim(rho, self.dim())?;
        Ok(self
            .observables
            .iter()
            .map(|o| linalg::trace_product(o, rho).re)
            .collect())
    }

    /// Sub-history made of the given sample indices, in the given order.
    ///
    /// The fingerprint is kept so records selected the same way still match.
    pub fn select(&self, rows: &[usize]) -> Result<Self> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.len()) {
            return Err(Error::InvalidArgument(format!("sample {bad} out of range")));
        }
        let d2 = self.design.ncols();
        Ok(Self {
            two_f: self.two_f,
            observables: rows.iter().map(|&r| self.observables[r].clone()).collect(),
            times: rows.iter().map(|&r| self.times[r]).collect(),
            design: RMatrix::from_fn(rows.len(), d2, |i, j| self.design[(rows[i], j)]),
            fingerprint: self.fingerprint.clone(),
        })
    }

    fn from_parts(
        two_f: u32,
        observables: Vec<CMatrix>,
        times: Vec<f64>,
        fingerprint: String,
    ) -> Self {
        let d = two_f as usize + 1;
        let basis = HermitianBasis::new(d);
        let mut design = RMatrix::zeros(observables.len(), d * d);
        for (i, o) in observables.iter().enumerate() {
            design.set_row(i, &basis.coords_unchecked(o).transpose());
        }
        Self {
            two_f,
            observables,
            times,
            design,
            fingerprint,
        }
    }

    pub fn to_json(&self) -> String {
        let doc = HistoryDocument {
            version: HISTORY_VERSION,
            spin: self.spin(),
            times: self.times.clone(),
            observables: self.observables.iter().map(serde_cmatrix::to_rows).collect(),
            fingerprint: self.fingerprint.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("history serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: HistoryDocument =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.version != HISTORY_VERSION {
            return Err(Error::UnsupportedVersion {
                expected: HISTORY_VERSION,
                found: doc.version,
            });
        }
        let sys = SpinSystem::new(doc.spin)?;
        if doc.times.len() != doc.observables.len() {
            return Err(Error::Validation("times and observables differ in length".into()));
        }
        if doc.fingerprint.is_empty() {
            return Err(Error::Validation("fingerprint must not be empty".into()));
        }
        let observables = doc
            .observables
            .iter()
            .map(|rows| {
                let m = serde_cmatrix::from_rows(rows).map_err(Error::Parse)?;
                linalg::ensure_dim(&m, sys.dim())?;
                linalg::ensure_hermitian(&m, 1e-10)?;
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_parts(sys.two_f(), observables, doc.times, doc.fingerprint))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HistoryDocument {
    version: u32,
    #[serde(rename = "F")]
    spin: f64,
    times: Vec<f64>,
    observables: Vec<Vec<Vec<[f64; 2]>>>,
    fingerprint: String,
}

/// Content hash of everything that determines a history.
pub fn fingerprint(sys: &SpinSystem, wf: &ControlWaveform, plan: &SamplingPlan, o: &CMatrix) -> String {
    let mut h = Sha256::new();
    h.update(b"spin-tomography/history/v1");
    h.update(sys.two_f().to_le_bytes());
    h.update((wf.phi.len() as u64).to_le_bytes());
    for p in &wf.phi {
        h.update(p.to_bits().to_le_bytes());
    }
    for v in [wf.dt, wf.omega_larmor, wf.chi, wf.gamma_dec] {
        h.update(v.to_bits().to_le_bytes());
    }
    h.update(wf.jumps.tag().as_bytes());
    if let super::JumpOperators::Explicit(ops) = &wf.jumps {
        for op in ops {
            hash_matrix(&mut h, op);
        }
    }
    h.update((plan.n_samples as u64).to_le_bytes());
    h.update((plan.substeps as u64).to_le_bytes());
    hash_matrix(&mut h, o);
    let digest = h.finalize();
    digest.iter().take(16).map(|b| format!("{b:02x}")).collect()
}

fn hash_matrix(h: &mut Sha256, m: &CMatrix) {
    h.update((m.nrows() as u64).to_le_bytes());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            h.update(m[(i, j)].re.to_bits().to_le_bytes());
            h.update(m[(i, j)].im.to_bits().to_le_bytes());
        }
    }
}

/// Heisenberg-evolved observables `O_i` with `Tr[O_i ρ0] = Tr[O ρ(t_i)]`.
///
/// Dissipation-free waveforms conjugate `O` by the accumulated unitary;
/// otherwise the transposed accumulated coordinate-space propagator is used.
pub fn heisenberg_history(
    sys: &SpinSystem,
    wf: &ControlWaveform,
    plan: &SamplingPlan,
    o: &CMatrix,
) -> Result<ObservableHistory> {
    wf.validate()?;
    plan.validate()?;
    linalg::ensure_dim(o, sys.dim())?;
    linalg::ensure_hermitian(o, 1e-10)?;

    let timeline = Timeline::new(wf, plan);
    let times = plan.sample_times(wf.duration());
    let n = plan.n_samples;
    let mut observables = Vec::with_capacity(n);

    if wf.is_dissipative() {
        let basis = HermitianBasis::new(sys.dim());
        let mut cache = SuperopCache::new(sys, wf, &basis)?;
        let x0 = basis.coords_unchecked(o);
        let mut cumulative = RMatrix::identity(basis.len(), basis.len());
        observables.push(o.clone());
        for interval in timeline.intervals().iter().take(n - 1) {
            for piece in interval {
                cumulative = cache.exp(piece.segment, piece.duration) * cumulative;
            }
            let xi = cumulative.tr_mul(&x0);
            observables.push(basis.matrix_unchecked(xi.as_slice()));
        }
    } else {
        let mut cache = UnitaryCache::new(sys, wf);
        let mut u = linalg::identity(sys.dim());
        observables.push(o.clone());
        for interval in timeline.intervals().iter().take(n - 1) {
            for piece in interval {
                u = cache.exp(piece.segment, piece.duration) * u;
            }
            observables.push(linalg::hermitian_part(&(u.adjoint() * o * &u)));
        }
    }

    Ok(ObservableHistory::from_parts(
        sys.two_f(),
        observables,
        times,
        fingerprint(sys, wf, plan, o),
    ))
}
