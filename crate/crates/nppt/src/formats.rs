//! JSON and CSV layouts for everything the command line reads or writes.

use nppt_core::distill::{Certificate, Claim, ClaimKind, ClaimSource, ClaimVerdict, Rank2Vector, RestartOutcome, Verdict, WitnessResult};
use nppt_core::twirl::{MixingProtocol, ProtocolPhase};
use nppt_core::{ComplexMatrix, Region, StandardState, C64};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const TOOL_VERSION: &str = concat!("nppt ", env!("CARGO_PKG_VERSION"));

pub type Complex = [f64; 2];

fn complex(z: C64) -> Complex {
    [z.re, z.im]
}

fn complex_vec(v: &[C64]) -> Vec<Complex> {
    v.iter().map(|&z| complex(z)).collect()
}

fn from_complex_vec(v: &[Complex]) -> Vec<C64> {
    v.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

/// Dense matrix, row-major `[re, im]` entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Complex>,
}

impl From<&ComplexMatrix> for OperatorJson {
    fn from(m: &ComplexMatrix) -> Self {
        Self { rows: m.rows(), cols: m.cols(), entries: complex_vec(m.as_slice()) }
    }
}

impl OperatorJson {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        Ok(ComplexMatrix::from_row_major(self.rows, self.cols, from_complex_vec(&self.entries))?)
    }
}

/// `alpha` is `null` for the antisymmetric limit `β = d - 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub d: usize,
    pub alpha: Option<f64>,
    pub beta: f64,
    pub lambda: f64,
}

impl From<&StandardState> for StateJson {
    fn from(s: &StandardState) -> Self {
        Self { d: s.d(), alpha: (!s.is_limit()).then(|| s.alpha()), beta: s.beta(), lambda: s.lambda() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Operators {
    pub density_matrix: OperatorJson,
    pub partial_transpose: OperatorJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateArtifact {
    #[serde(flatten)]
    pub state: StateJson,
    pub region: String,
    pub region_copies: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub operators: Option<Operators>,
    pub config: RunConfig,
    pub tool_version: String,
}

pub fn region_label(region: Region) -> (&'static str, Option<usize>) {
    match region {
        Region::Separable => ("separable", None),
        Region::OneDistillable => ("one_distillable", Some(1)),
        Region::CertifiedUndistillable { copies } => ("certified_undistillable", Some(copies)),
        Region::UndecidedBand => ("undecided_band", None),
    }
}

pub fn verdict_label(verdict: Verdict) -> (&'static str, Option<usize>) {
    match verdict {
        Verdict::Separable => ("separable", None),
        Verdict::OneDistillable => ("one_distillable", Some(1)),
        Verdict::CertifiedUndistillable { copies } => ("certified_undistillable", Some(copies)),
        Verdict::Distillable { copies } => ("distillable", Some(copies)),
        Verdict::UndecidedBand => ("undecided_band", None),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rank2Json {
    pub a: Complex,
    pub b: Complex,
    pub e1: Vec<Complex>,
    pub e2: Vec<Complex>,
    pub f1: Vec<Complex>,
    pub f2: Vec<Complex>,
}

impl From<&Rank2Vector> for Rank2Json {
    fn from(v: &Rank2Vector) -> Self {
        Self {
            a: complex(v.a),
            b: complex(v.b),
            e1: complex_vec(&v.e1),
            e2: complex_vec(&v.e2),
            f1: complex_vec(&v.f1),
            f2: complex_vec(&v.f2),
        }
    }
}

impl Rank2Json {
    pub fn to_vector(&self) -> Result<Rank2Vector> {
        let c = |[re, im]: Complex| C64::new(re, im);
        Ok(Rank2Vector::new(
            c(self.a),
            c(self.b),
            from_complex_vec(&self.e1),
            from_complex_vec(&self.e2),
            from_complex_vec(&self.f1),
            from_complex_vec(&self.f2),
        )?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimJson {
    /// `null` when the claim covers every number of copies.
    #[serde(rename = "N")]
    pub copies: Option<usize>,
    pub kind: String,
    pub verdict: String,
    pub bound_or_lambda: f64,
    pub source: String,
}

impl From<&Claim> for ClaimJson {
    fn from(c: &Claim) -> Self {
        let kind = match c.kind {
            ClaimKind::Certified => "certified",
            ClaimKind::Evidence => "evidence",
        };
        let verdict = match c.verdict {
            ClaimVerdict::Separable => "separable",
            ClaimVerdict::Distillable => "distillable",
            ClaimVerdict::Undistillable => "undistillable",
            ClaimVerdict::NoWitnessFound => "no_witness_found",
        };
        let source = match c.source {
            ClaimSource::SeparabilityCriterion => "ppt_separability",
            ClaimSource::OneCopyThreshold => "one_copy_threshold",
            ClaimSource::TwoCopyQuarter => "two_copy_bound",
            ClaimSource::GeneralTilde => "tilde_beta_bound",
            ClaimSource::WitnessSearch => "witness_search",
        };
        Self { copies: c.copies, kind: kind.into(), verdict: verdict.into(), bound_or_lambda: c.value, source: source.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchJson {
    #[serde(rename = "N")]
    pub copies: usize,
    pub lambda_min: f64,
    pub frame_objective: f64,
    pub normalized_lambda: f64,
    pub lambda0: Option<f64>,
    pub stationarity_residual: Option<f64>,
    pub restarts_used: usize,
    pub best_restart: usize,
    pub converged: bool,
    pub degenerate: bool,
    pub best_vector: Option<Rank2Json>,
}

impl SearchJson {
    pub fn new(copies: usize, r: &WitnessResult) -> Self {
        Self {
            copies,
            lambda_min: r.lambda_min,
            frame_objective: r.frame_objective,
            normalized_lambda: r.normalized_lambda,
            lambda0: r.lambda0,
            stationarity_residual: r.stationarity_residual,
            restarts_used: r.restarts_used,
            best_restart: r.best_restart,
            converged: r.converged,
            degenerate: r.degenerate,
            best_vector: r.best_vector.as_ref().map(Rank2Json::from),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub d: usize,
    pub beta: f64,
    pub region: String,
    pub region_copies: Option<usize>,
    pub claims: Vec<ClaimJson>,
    pub witness: Option<Rank2Json>,
    pub searches: Vec<SearchJson>,
    pub config: RunConfig,
    pub tool_version: String,
}

impl CertificateJson {
    pub fn new(cert: &Certificate, config: RunConfig) -> Self {
        let (region, region_copies) = verdict_label(cert.verdict);
        Self {
            d: cert.d,
            beta: cert.beta,
            region: region.into(),
            region_copies,
            claims: cert.claims.iter().map(ClaimJson::from).collect(),
            witness: cert.witness.as_ref().map(Rank2Json::from),
            searches: cert.searches.iter().map(|(n, r)| SearchJson::new(*n, r)).collect(),
            config,
            tool_version: TOOL_VERSION.into(),
        }
    }
}

/// One line of a search checkpoint file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartJson {
    pub index: usize,
    pub frame_objective: f64,
    pub lambda_min: f64,
    pub e1: Vec<Complex>,
    pub e2: Vec<Complex>,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
}

impl From<&RestartOutcome> for RestartJson {
    fn from(o: &RestartOutcome) -> Self {
        Self {
            index: o.index,
            frame_objective: o.frame_objective,
            lambda_min: o.lambda_min,
            e1: complex_vec(&o.e1),
            e2: complex_vec(&o.e2),
            iterations: o.iterations,
            gradient_norm: o.gradient_norm,
            converged: o.converged,
        }
    }
}

impl From<&RestartJson> for RestartOutcome {
    fn from(o: &RestartJson) -> Self {
        Self {
            index: o.index,
            frame_objective: o.frame_objective,
            lambda_min: o.lambda_min,
            e1: from_complex_vec(&o.e1),
            e2: from_complex_vec(&o.e2),
            iterations: o.iterations,
            gradient_norm: o.gradient_norm,
            converged: o.converged,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlternativeJson {
    pub u_label: String,
    pub params: Vec<usize>,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventJson {
    pub phase: String,
    pub alternatives: Vec<AlternativeJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolJson {
    pub d: usize,
    pub events: Vec<EventJson>,
}

impl From<&MixingProtocol> for ProtocolJson {
    fn from(p: &MixingProtocol) -> Self {
        let events = p
            .events
            .iter()
            .map(|(phase, event)| EventJson {
                phase: phase_label(*phase).into(),
                alternatives: event
                    .alternatives
                    .iter()
                    .map(|s| AlternativeJson {
                        u_label: s.generator.label().into(),
                        params: s.generator.params(),
                        probability: s.probability,
                    })
                    .collect(),
            })
            .collect();
        Self { d: p.d, events }
    }
}

pub fn phase_label(phase: ProtocolPhase) -> &'static str {
    match phase {
        ProtocolPhase::Diagonalize => "diagonalize",
        ProtocolPhase::MixAntisymmetric => "mix_antisymmetric",
        ProtocolPhase::MixSymmetric => "mix_symmetric",
        ProtocolPhase::Cleanup => "cleanup",
    }
}

/// `{:.16e}` (17 significant digits); missing and non-finite values are blank.
pub fn csv_number(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.16e}"),
        _ => String::new(),
    }
}

pub fn write_csv(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| CliError::invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nppt_core::SeededRng;

    #[test]
    fn operator_json_roundtrip() {
        let m = SeededRng::new(1, 0).ginibre(3, 2);
        let json = serde_json::to_string(&OperatorJson::from(&m)).unwrap();
        let back: OperatorJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
    }

    #[test]
    fn limit_state_has_null_alpha() {
        let s = StandardState::antisymmetric_limit(3).unwrap();
        let json = serde_json::to_value(StateJson::from(&s)).unwrap();
        assert!(json["alpha"].is_null());
        assert_eq!(json["beta"], 2.0);
        assert_eq!(json["lambda"], 1.0);
    }

    #[test]
    fn csv_numbers() {
        assert_eq!(csv_number(Some(0.5)), "5.0000000000000000e-1");
        assert_eq!(csv_number(None), "");
        assert_eq!(csv_number(Some(f64::INFINITY)), "");
        let text = write_csv(&["a".into(), "b".into()], &[vec!["1".into(), "".into()]]).unwrap();
        assert_eq!(text, "a,b\n1,\n");
    }
}
