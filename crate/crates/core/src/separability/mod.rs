//! PPT testing, rank-threshold classification, separable-decomposition
//! certificates, and the realignment detector.

mod ccnr;
mod certificate;
mod ppt;
mod search;
mod simultaneous;
mod threshold;

use serde::{Deserialize, Serialize};

pub use ccnr::{ccnr_value, realign, CCNR_TOL};
pub use certificate::{extract_certificate, Certificate, CertificateTerm, ExtractionConfig};
pub use ppt::{passes as pt_spectrum_passes, ppt_check, pt_spectrum, single_party_cuts, CutResult};
pub use search::{find_symmetric_product_in_range, ProductHit, SearchConfig};
pub use simultaneous::spectral_candidates;
pub use threshold::{bound_window, rank_threshold, RankWindow};

use crate::linalg::{hermitian_eigenvalues, rank_of_spectrum, RANK_TOL};
use crate::states::StateRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Separable,
    #[serde(rename = "EntangledNPT")]
    EntangledNpt,
    Undetermined,
    InvalidInput,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// Three parties, rank at most `n²`.
    #[serde(rename = "R-T1")]
    T1,
    /// `k ≥ 4` parties, rank at most `I^{k−1}_n`.
    #[serde(rename = "R-T2")]
    T2,
    #[serde(rename = "R-2B")]
    TwoBoson,
    #[serde(rename = "R-3Q")]
    ThreeQubit,
    #[serde(rename = "R-KQ")]
    ManyQubit,
    #[serde(rename = "R-NPT")]
    Npt,
    #[serde(rename = "R-NONE")]
    None,
}

impl Rule {
    pub fn id(&self) -> &'static str {
        match self {
            Rule::T1 => "R-T1",
            Rule::T2 => "R-T2",
            Rule::TwoBoson => "R-2B",
            Rule::ThreeQubit => "R-3Q",
            Rule::ManyQubit => "R-KQ",
            Rule::Npt => "R-NPT",
            Rule::None => "R-NONE",
        }
    }

    fn is_cited(&self) -> bool {
        matches!(self, Rule::TwoBoson | Rule::ThreeQubit | Rule::ManyQubit)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityReport {
    pub verdict: Verdict,
    pub rule_fired: Rule,
    pub rank: usize,
    pub min_pt_eigenvalue_per_cut: Vec<f64>,
    pub threshold_used: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub window: Option<RankWindow>,
    pub notes: Vec<String>,
}

impl SeparabilityReport {
    fn invalid(note: String) -> Self {
        SeparabilityReport {
            verdict: Verdict::InvalidInput,
            rule_fired: Rule::None,
            rank: 0,
            min_pt_eigenvalue_per_cut: Vec::new(),
            threshold_used: 0,
            window: None,
            notes: vec![note],
        }
    }

    /// One-line human summary, e.g. `Separable (R-T1)`.
    pub fn summary(&self) -> String {
        match self.verdict {
            Verdict::Separable => format!("Separable ({})", self.rule_fired.id()),
            Verdict::EntangledNpt => "EntangledNPT".to_string(),
            Verdict::Undetermined => match &self.window {
                Some(w) => format!("Undetermined, window {w}"),
                None => "Undetermined".to_string(),
            },
            Verdict::InvalidInput => format!("InvalidInput: {}", self.notes.join("; ")),
        }
    }
}

/// Classify a bosonic state.
///
/// Checks the state invariants and symmetric support, then the partial
/// transpose on every single-party cut (any failure is entanglement), then
/// compares the rank with the shape's separability threshold. A PPT state
/// above the threshold is `Undetermined`, with its rank window attached.
pub fn classify(state: &StateRecord) -> SeparabilityReport {
    if let Err(e) = state.validate() {
        return SeparabilityReport::invalid(e.to_string());
    }
    match classify_valid(state) {
        Ok(report) => report,
        Err(e) => SeparabilityReport::invalid(e.to_string()),
    }
}

fn classify_valid(state: &StateRecord) -> crate::Result<SeparabilityReport> {
    let shape = state.shape;
    let rank = rank_of_spectrum(
        &hermitian_eigenvalues(&state.symmetric_matrix()?)?,
        RANK_TOL,
    );
    let cuts = ppt_check(state, None)?;
    let mins: Vec<f64> = cuts.iter().map(|c| c.min_eigenvalue).collect();
    let mut notes = Vec::new();

    if cuts.iter().any(|c| !c.passed) {
        let failed: Vec<String> = cuts
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{:?}", c.cut))
            .collect();
        notes.push(format!(
            "negative partial transpose on cut(s) {}",
            failed.join(", ")
        ));
        let threshold_used = rank_threshold(&shape)
            .map(|t| t.0)
            .unwrap_or(shape.sym_dim());
        return Ok(SeparabilityReport {
            verdict: Verdict::EntangledNpt,
            rule_fired: Rule::Npt,
            rank,
            min_pt_eigenvalue_per_cut: mins,
            threshold_used,
            window: None,
            notes,
        });
    }

    if shape.k() == 1 {
        notes.push("single party: every state is separable".into());
        return Ok(SeparabilityReport {
            verdict: Verdict::Separable,
            rule_fired: Rule::None,
            rank,
            min_pt_eigenvalue_per_cut: mins,
            threshold_used: shape.sym_dim(),
            window: None,
            notes,
        });
    }

    let (threshold, rule) = rank_threshold(&shape)?;
    if rule.is_cited() {
        notes.push(format!(
            "rule {} is a cited background result, not one of the rank-threshold rules",
            rule.id()
        ));
    }
    if rank <= threshold {
        return Ok(SeparabilityReport {
            verdict: Verdict::Separable,
            rule_fired: rule,
            rank,
            min_pt_eigenvalue_per_cut: mins,
            threshold_used: threshold,
            window: None,
            notes,
        });
    }
    let window = bound_window(&shape)?;
    notes.push(format!("PPT with rank {rank} > {threshold}: a bound entangled state is possible only in the rank window {window}"));
    if shape.n() == 3 && shape.k() == 4 {
        notes.push("this window is sometimes quoted as [10,15]; rank 10 is already covered by the threshold rule".into());
    }
    Ok(SeparabilityReport {
        verdict: Verdict::Undetermined,
        rule_fired: Rule::None,
        rank,
        min_pt_eigenvalue_per_cut: mins,
        threshold_used: threshold,
        window: Some(window),
        notes,
    })
}
