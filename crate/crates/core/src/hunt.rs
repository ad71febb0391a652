//! Seeded search for PPT states inside the bound-entanglement rank window.
//!
//! Each trial draws a random symmetric state of the target rank, pushes it
//! onto the PPT set by alternating projections, and, if the result is PPT
//! with a rank inside the window, runs detectors that go beyond PPT. A
//! flagged record is a candidate only: a realignment value above one is a
//! genuine entanglement certificate, while a failed extraction is a hint.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bosonic::SymmetricIsometry;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::format::{to_json, StateFile};
use crate::linalg::{
    hermitian_eigensystem, hermitian_eigenvalues, partial_transpose, rank_of_spectrum,
    ComplexMatrix, RANK_TOL,
};
use crate::rng::Seed;
use crate::separability::{
    bound_window, ccnr_value, extract_certificate, pt_spectrum, pt_spectrum_passes,
    single_party_cuts, CutResult, ExtractionConfig, RankWindow, SearchConfig, CCNR_TOL,
};
use crate::shape::SystemShape;
use crate::states::{random_rank_r_symmetric, Basis, StateRecord};

pub const HUNT_SCHEMA: &str = "hunt-v1";
/// Both projection residuals must fall below this.
pub const PROJECTION_TOL: f64 = 1e-9;
/// Recomputed record fields must match within this.
pub const VERIFY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Detector {
    Ccnr,
    ExtractionFailure,
    Both,
}

impl Detector {
    fn uses_ccnr(self) -> bool {
        matches!(self, Detector::Ccnr | Detector::Both)
    }

    fn uses_extraction(self) -> bool {
        matches!(self, Detector::ExtractionFailure | Detector::Both)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct HuntConfig {
    pub shape: SystemShape,
    pub target_rank: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub projection_iters: usize,
    pub detector: Detector,
    /// Budget for the extraction detector.
    pub search: SearchConfig,
    pub exec: Execution,
}

impl HuntConfig {
    /// Defaults: 500 projection iterations, CCNR detector.
    pub fn new(
        shape: SystemShape,
        target_rank: usize,
        trials: usize,
        master_seed: u64,
    ) -> Result<Self> {
        let config = HuntConfig {
            shape,
            target_rank,
            trials,
            master_seed,
            projection_iters: 500,
            detector: Detector::Ccnr,
            search: SearchConfig::default(),
            exec: Execution::default(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn window(&self) -> Result<RankWindow> {
        bound_window(&self.shape)
    }

    pub fn validate(&self) -> Result<()> {
        let window = self.window()?;
        if !window.contains(self.target_rank) {
            return Err(Error::Precondition(format!(
                "target rank {} is outside the window {window} for n={}, k={}",
                self.target_rank,
                self.shape.n(),
                self.shape.k()
            )));
        }
        Ok(())
    }
}

/// Output of [`alternating_projection`].
#[derive(Clone, Debug)]
pub struct Projected {
    /// Symmetric basis.
    pub state: StateRecord,
    pub iterations: usize,
}

/// Keep the `r` largest eigenvalues, drop negative ones, renormalize.
fn rank_step(x: &ComplexMatrix, r: usize) -> Result<ComplexMatrix> {
    let eig = hermitian_eigensystem(x)?;
    let dim = x.rows();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for j in dim.saturating_sub(r)..dim {
        let l = eig.eigenvalues[j];
        if l > 0.0 {
            out.add_projector(l, &eig.eigenvector(j));
        }
    }
    renormalized(out)
}

fn renormalized(x: ComplexMatrix) -> Result<ComplexMatrix> {
    let tr = x.trace().re;
    if tr.is_nan() || tr <= 0.0 {
        return Err(Error::NumericalFailure(
            "projection collapsed to zero".into(),
        ));
    }
    Ok(x.hermitian_part().scaled(1.0 / tr))
}

/// Alternate between the nearest rank-`≤ r` state in symmetric
/// coordinates and the nearest state whose partial transpose on party 0 is
/// PSD, until both constraints hold to [`PROJECTION_TOL`].
pub fn alternating_projection(
    rho0: &StateRecord,
    target_rank: usize,
    iters: usize,
) -> Result<Projected> {
    let shape = rho0.shape;
    if target_rank == 0 || target_rank > shape.sym_dim() {
        return Err(Error::RankTooLarge {
            rank: target_rank,
            max: shape.sym_dim(),
        });
    }
    let iso = SymmetricIsometry::new(shape)?;
    let mut x = rho0.symmetric_matrix()?;
    let mut residual = f64::INFINITY;
    for iteration in 1..=iters {
        x = rank_step(&x, target_rank)?;
        let pt = partial_transpose(&iso.expand(&x), &shape, &[0])?;
        let eig = hermitian_eigensystem(&pt)?;
        residual = (-eig.min_eigenvalue()).max(0.0);
        if residual < PROJECTION_TOL {
            let provenance = format!(
                "alternating_projection(rank<={target_rank}, iterations={iteration}) of {}",
                rho0.provenance
            );
            let state = StateRecord::new(shape, Basis::Symmetric, x, provenance)?;
            return Ok(Projected {
                state,
                iterations: iteration,
            });
        }
        let mut clipped = ComplexMatrix::zeros(pt.rows(), pt.cols());
        for (j, &l) in eig.eigenvalues.iter().enumerate() {
            if l > 0.0 {
                clipped.add_projector(l, &eig.eigenvector(j));
            }
        }
        let back = partial_transpose(&clipped, &shape, &[0])?;
        x = renormalized(iso.project(&back))?;
    }
    Err(Error::NoConvergence {
        iterations: iters,
        ppt_residual: residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutValue {
    pub cut: Vec<usize>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ExtractionOutcome {
    NotRun,
    Succeeded {
        terms: usize,
        trace_distance: f64,
    },
    /// No product vector found at `step` with the full search budget.
    Failed {
        step: usize,
        best_overlap: f64,
    },
    Error {
        message: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub schema: String,
    pub trial_index: usize,
    pub seed: Seed,
    pub projection_iterations: usize,
    pub state: StateFile,
    pub rank: usize,
    pub in_window: bool,
    pub min_pt_eigenvalues: Vec<CutResult>,
    pub ccnr: Vec<CutValue>,
    pub support_residual: f64,
    pub extraction: ExtractionOutcome,
    pub flagged: bool,
    pub flag_reasons: Vec<String>,
    /// `"candidate"` when flagged. Never a claim of bound entanglement.
    pub label: String,
}

impl CandidateRecord {
    pub fn to_json_line(&self) -> Result<String> {
        to_json(self)
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        crate::format::from_json(line)
    }
}

/// Quantities a record stores and [`verify_candidate`] recomputes.
struct Measurements {
    rank: usize,
    pt: Vec<CutResult>,
    ccnr: Vec<CutValue>,
    support_residual: f64,
}

fn measure(state: &StateRecord) -> Result<Measurements> {
    let shape = state.shape;
    let rank = rank_of_spectrum(
        &hermitian_eigenvalues(&state.symmetric_matrix()?)?,
        RANK_TOL,
    );
    let full = state.full_matrix()?;
    let cuts = single_party_cuts(&shape);
    let mut pt = Vec::with_capacity(cuts.len());
    let mut ccnr = Vec::with_capacity(cuts.len());
    for cut in cuts {
        let spectrum = pt_spectrum(&full, &shape, &cut)?;
        pt.push(CutResult {
            cut: cut.clone(),
            min_eigenvalue: spectrum[0],
            passed: pt_spectrum_passes(&spectrum),
        });
        let value = ccnr_value(state, &cut)?;
        ccnr.push(CutValue { cut, value });
    }
    let support_residual = state.isometry()?.support_residual(&full);
    Ok(Measurements {
        rank,
        pt,
        ccnr,
        support_residual,
    })
}

fn ccnr_violations(ccnr: &[CutValue]) -> Vec<&CutValue> {
    ccnr.iter().filter(|c| c.value > 1.0 + CCNR_TOL).collect()
}

fn run_trial(
    config: &HuntConfig,
    window: &RankWindow,
    trial_index: usize,
) -> Result<Option<CandidateRecord>> {
    let seed = Seed::new(config.master_seed, trial_index as u64);
    let rho0 = random_rank_r_symmetric(config.shape, config.target_rank, seed)?;
    let projected = match alternating_projection(&rho0, config.target_rank, config.projection_iters)
    {
        Ok(p) => p,
        Err(Error::NoConvergence { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    // measure exactly what the record will carry
    let file = StateFile::from_record(&projected.state);
    let state = file.to_record()?;
    let m = measure(&state)?;
    let in_window = window.contains(m.rank);
    let ppt = m.pt.iter().all(|c| c.passed);

    let mut flag_reasons = Vec::new();
    let mut extraction = ExtractionOutcome::NotRun;
    if ppt && in_window {
        if config.detector.uses_ccnr() {
            for c in ccnr_violations(&m.ccnr) {
                flag_reasons.push(format!(
                    "ccnr {:.12} > 1 on cut {:?}: entangled",
                    c.value, c.cut
                ));
            }
        }
        if config.detector.uses_extraction() {
            let extraction_config = ExtractionConfig {
                search: config.search,
                seed: seed.child(1),
                force: true,
                ..ExtractionConfig::default()
            };
            extraction = match extract_certificate(&state, &extraction_config) {
                Ok(cert) => ExtractionOutcome::Succeeded {
                    terms: cert.terms.len(),
                    trace_distance: cert.trace_distance,
                },
                Err(Error::ExtractionFailed { step, best_overlap }) => {
                    flag_reasons.push(format!(
                        "no product vector found at extraction step {step} (best overlap {best_overlap:.12}): heuristic hint only"
                    ));
                    ExtractionOutcome::Failed { step, best_overlap }
                }
                Err(e) => ExtractionOutcome::Error {
                    message: e.to_string(),
                },
            };
        }
    }
    let flagged = !flag_reasons.is_empty();
    Ok(Some(CandidateRecord {
        schema: HUNT_SCHEMA.into(),
        trial_index,
        seed,
        projection_iterations: projected.iterations,
        state: file,
        rank: m.rank,
        in_window,
        min_pt_eigenvalues: m.pt,
        ccnr: m.ccnr,
        support_residual: m.support_residual,
        extraction,
        flagged,
        flag_reasons,
        label: if flagged { "candidate" } else { "unflagged" }.into(),
    }))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HuntSummary {
    pub trials: usize,
    pub converged: usize,
    pub ppt_in_window: usize,
    pub flagged: usize,
}

impl fmt::Display for HuntSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trials={} converged={} ppt_in_window={} flagged={}",
            self.trials, self.converged, self.ppt_in_window, self.flagged
        )
    }
}

/// Runs every trial and writes one JSONL record per converged trial, in
/// trial order. Trials that do not converge only show up in the summary.
pub fn run_hunt(config: &HuntConfig, sink: &mut dyn Write) -> Result<HuntSummary> {
    config.validate()?;
    let window = config.window()?;
    let results = config
        .exec
        .map_indexed(config.trials, |i| run_trial(config, &window, i));
    let mut summary = HuntSummary {
        trials: config.trials,
        ..HuntSummary::default()
    };
    for result in results {
        let Some(record) = result? else {
            continue;
        };
        summary.converged += 1;
        if record.in_window && record.min_pt_eigenvalues.iter().all(|c| c.passed) {
            summary.ppt_in_window += 1;
        }
        if record.flagged {
            summary.flagged += 1;
        }
        writeln!(sink, "{}", record.to_json_line()?)?;
    }
    sink.flush()?;
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub passed: bool,
    pub mismatches: Vec<String>,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= VERIFY_TOL
}

/// Recompute rank, partial-transpose minima, realignment values and the
/// support residual from the embedded state and compare with the record.
pub fn verify_candidate(record: &CandidateRecord) -> Result<Verification> {
    let mut mismatches = Vec::new();
    if record.schema != HUNT_SCHEMA {
        mismatches.push(format!(
            "schema {:?}, expected {HUNT_SCHEMA:?}",
            record.schema
        ));
    }
    let state = record.state.to_record()?;
    let measured = state.validate().and_then(|_| measure(&state));
    let m = match measured {
        Ok(m) => m,
        Err(e) => {
            mismatches.push(format!("embedded state is not a valid state: {e}"));
            return Ok(Verification {
                passed: false,
                mismatches,
            });
        }
    };
    if m.rank != record.rank {
        mismatches.push(format!("rank {} recomputes to {}", record.rank, m.rank));
    }
    let window = bound_window(&state.shape)?;
    if window.contains(m.rank) != record.in_window {
        mismatches.push(format!(
            "in_window {} recomputes to {}",
            record.in_window,
            window.contains(m.rank)
        ));
    }
    if record.min_pt_eigenvalues.len() != m.pt.len() {
        mismatches.push(format!(
            "{} partial-transpose cuts, expected {}",
            record.min_pt_eigenvalues.len(),
            m.pt.len()
        ));
    }
    for (got, want) in record.min_pt_eigenvalues.iter().zip(&m.pt) {
        if got.cut != want.cut
            || got.passed != want.passed
            || !close(got.min_eigenvalue, want.min_eigenvalue)
        {
            mismatches.push(format!(
                "partial transpose on {:?}: recorded {} ({}), recomputed {} ({})",
                got.cut, got.min_eigenvalue, got.passed, want.min_eigenvalue, want.passed
            ));
        }
    }
    if record.ccnr.len() != m.ccnr.len() {
        mismatches.push(format!(
            "{} realignment cuts, expected {}",
            record.ccnr.len(),
            m.ccnr.len()
        ));
    }
    for (got, want) in record.ccnr.iter().zip(&m.ccnr) {
        if got.cut != want.cut || !close(got.value, want.value) {
            mismatches.push(format!(
                "ccnr on {:?}: recorded {}, recomputed {}",
                got.cut, got.value, want.value
            ));
        }
    }
    if !close(record.support_residual, m.support_residual) {
        mismatches.push(format!(
            "support residual {} recomputes to {}",
            record.support_residual, m.support_residual
        ));
    }
    if record.flagged {
        let ppt = m.pt.iter().all(|c| c.passed);
        let failed = matches!(record.extraction, ExtractionOutcome::Failed { .. });
        if !ppt {
            mismatches.push("flagged record is not PPT on every cut".into());
        }
        if ccnr_violations(&m.ccnr).is_empty() && !failed {
            mismatches.push(
                "flagged record has neither a realignment violation nor a failed extraction".into(),
            );
        }
        if record.label != "candidate" {
            mismatches.push(format!("flagged record labeled {:?}", record.label));
        }
    }
    Ok(Verification {
        passed: mismatches.is_empty(),
        mismatches,
    })
}
