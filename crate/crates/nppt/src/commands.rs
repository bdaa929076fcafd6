//! The subcommands as library functions. Each takes a fully resolved
//! [`RunConfig`] and returns the artifact it describes.

use std::collections::BTreeSet;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use nppt_core::distill::{
    asymptotic_bound, asymptotic_inequality_check, certified_undistillable_bound, certify_with, lambda_threshold,
    one_distillable_threshold, structural_relations_check, witness_search, BoundSource, BoundTable, Certificate,
    RestartOutcome, SearchConfig, SymmetryMode, WitnessSearch,
};
use nppt_core::twirl::{antisymmetric_weight, apply_protocol_traced, build_protocol, depolarize, haar_twirl_mc};
use nppt_core::werner::{beta_range, classify_region, ProjectorSet};
use nppt_core::{SeededRng, StandardState};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::formats::{
    csv_number, region_label, write_csv, CertificateJson, Operators, OperatorJson, ProtocolJson, RestartJson,
    StateArtifact, StateJson, TOOL_VERSION,
};

fn required<T: Copy>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| CliError::invalid(format!("missing required parameter --{}", name.replace('_', "-"))))
}

fn region_table(d: usize, max_copies: usize) -> Result<BoundTable> {
    Ok(BoundTable::standard(d, max_copies)?)
}

pub fn state(cfg: &RunConfig, with_operators: bool) -> Result<StateArtifact> {
    let d = required(cfg.d, "d")?;
    let given = [cfg.alpha.is_some(), cfg.beta.is_some(), cfg.lambda.is_some()].iter().filter(|&&b| b).count();
    if given != 1 {
        return Err(CliError::invalid("give exactly one of --alpha, --beta, --lambda"));
    }
    let state = if let Some(alpha) = cfg.alpha {
        StandardState::from_alpha(d, alpha)?
    } else if let Some(beta) = cfg.beta {
        StandardState::from_beta(d, beta)?
    } else {
        StandardState::from_lambda(d, required(cfg.lambda, "lambda")?)?
    };
    let region = classify_region(d, state.beta(), &region_table(d, 3)?);
    let (label, copies) = region_label(region);
    let operators = with_operators.then(|| Operators {
        density_matrix: OperatorJson::from(&state.density_matrix()),
        partial_transpose: OperatorJson::from(&state.partial_transpose()),
    });
    Ok(StateArtifact {
        state: StateJson::from(&state),
        region: label.into(),
        region_copies: copies,
        operators,
        config: cfg.clone(),
        tool_version: TOOL_VERSION.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    #[serde(rename = "N")]
    pub copies: usize,
    pub certified_bound: f64,
    pub source: String,
    pub tilde_beta: f64,
    /// `4^{-N}`, `d = 3` only.
    pub simplified_bound: Option<f64>,
    /// Large-`N` estimate for `d = 3`; not a certificate.
    pub asymptotic_estimate: Option<f64>,
    pub asymptotic_certified: bool,
    pub one_distill_threshold: f64,
    pub lambda_threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTable {
    pub d: usize,
    pub rows: Vec<ThresholdRow>,
    pub config: RunConfig,
    pub tool_version: String,
}

pub fn thresholds(cfg: &RunConfig) -> Result<ThresholdTable> {
    let d = required(cfg.d, "d")?;
    let n_max = cfg.copies.unwrap_or(3);
    if d < 3 {
        return Err(CliError::invalid("thresholds need d >= 3; for d = 2 every NPPT member is distillable"));
    }
    if n_max == 0 {
        return Err(CliError::invalid("--copies must be positive"));
    }
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let entry = certified_undistillable_bound(d, n)?;
        let source = match entry.source {
            BoundSource::OneCopyThreshold => "one_copy_threshold",
            BoundSource::TwoCopyQuarter => "two_copy_bound",
            BoundSource::GeneralTilde | BoundSource::Asymptotic => "tilde_beta_bound",
        };
        rows.push(ThresholdRow {
            copies: n,
            certified_bound: entry.certified_beta_bound,
            source: source.into(),
            tilde_beta: entry.tilde_beta,
            simplified_bound: entry.simplified_bound,
            asymptotic_estimate: (d == 3).then(|| asymptotic_bound(n).map(|b| b.beta_asymptotic)).transpose()?,
            asymptotic_certified: false,
            one_distill_threshold: one_distillable_threshold(d),
            lambda_threshold: lambda_threshold(d),
        });
    }
    Ok(ThresholdTable { d, rows, config: cfg.clone(), tool_version: TOOL_VERSION.into() })
}

impl ThresholdTable {
    pub fn to_csv(&self) -> Result<String> {
        let header = [
            "N",
            "certified_bound",
            "source",
            "tilde_beta",
            "simplified_bound",
            "asymptotic_estimate",
            "asymptotic_certified",
            "one_distill_threshold",
            "lambda_threshold",
        ]
        .map(String::from);
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.copies.to_string(),
                    csv_number(Some(r.certified_bound)),
                    r.source.clone(),
                    csv_number(Some(r.tilde_beta)),
                    csv_number(r.simplified_bound),
                    csv_number(r.asymptotic_estimate),
                    r.asymptotic_certified.to_string(),
                    csv_number(Some(r.one_distill_threshold)),
                    csv_number(Some(r.lambda_threshold)),
                ]
            })
            .collect();
        write_csv(&header, &rows)
    }
}

/// Settings that determine the outcome of every restart; checkpoint lines
/// are reused only when these match exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct CheckpointKey {
    d: usize,
    beta: f64,
    copies: usize,
    seed: u64,
    max_iters: usize,
    tol: f64,
    diagonal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct CheckpointLine {
    key: CheckpointKey,
    restart: RestartJson,
}

/// Runs `search` restart by restart, appending each finished restart to
/// `path` and skipping restarts already recorded there.
pub fn checkpointed_search(search: &WitnessSearch, path: &Path) -> Result<nppt_core::distill::WitnessResult> {
    let key = CheckpointKey {
        d: search.d,
        beta: search.beta,
        copies: search.copies,
        seed: search.config.seed,
        max_iters: search.config.max_iters,
        tol: search.config.tol,
        diagonal: search.config.symmetry == SymmetryMode::DiagonalFirstVector,
    };
    let mut done: Vec<RestartOutcome> = Vec::new();
    if path.exists() {
        let reader = BufReader::new(std::fs::File::open(path)?);
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: CheckpointLine = serde_json::from_str(&line)?;
            if entry.key == key && entry.restart.index < search.config.restarts {
                done.push(RestartOutcome::from(&entry.restart));
            }
        }
    }
    let seen: BTreeSet<usize> = done.iter().map(|o| o.index).collect();
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    for index in (0..search.config.restarts).filter(|i| !seen.contains(i)) {
        let outcome = search.run_restart(index)?;
        let line = CheckpointLine { key: key.clone(), restart: RestartJson::from(&outcome) };
        writeln!(file, "{}", serde_json::to_string(&line)?)?;
        file.flush()?;
        done.push(outcome);
    }
    done.sort_by_key(|o| o.index);
    done.dedup_by_key(|o| o.index);
    Ok(search.finish(&done)?)
}

fn run_search(d: usize, beta: f64, copies: usize, config: &SearchConfig, checkpoint: Option<&Path>) -> Result<nppt_core::distill::WitnessResult> {
    match checkpoint {
        Some(path) => {
            let file_name = format!("{}.N{copies}", path.display());
            checkpointed_search(&WitnessSearch::new(d, beta, copies, config.clone())?, Path::new(&file_name))
        }
        None => Ok(witness_search(d, beta, copies, config)?),
    }
}

/// Certificate up to `max_copies` copies; with `search` set, every copy
/// count not covered by a certified bound is searched.
fn certificate(cfg: &RunConfig, max_copies: usize, search: bool, checkpoint: Option<&Path>) -> Result<Certificate> {
    let d = required(cfg.d, "d")?;
    let beta = required(cfg.beta, "beta")?;
    let mut failure: Option<CliError> = None;
    let cert = certify_with(d, beta, max_copies, |copies| {
        if !search {
            return Ok(None);
        }
        let outcome = cfg.search_config(copies).and_then(|c| run_search(d, beta, copies, &c, checkpoint));
        match outcome {
            Ok(r) => Ok(Some(r)),
            Err(CliError::Core(e)) => Err(e),
            Err(other) => {
                failure = Some(other);
                Err(nppt_core::Error::InvalidArgument("search aborted"))
            }
        }
    });
    match (cert, failure) {
        (_, Some(e)) => Err(e),
        (cert, None) => Ok(cert?),
    }
}

pub fn search(cfg: &RunConfig, checkpoint: Option<&Path>) -> Result<CertificateJson> {
    let copies = required(cfg.copies, "copies")?;
    if !(1..=3).contains(&copies) {
        return Err(CliError::invalid("--copies must be 1, 2 or 3"));
    }
    if copies == 3 && cfg.long_run != Some(true) {
        return Err(CliError::invalid("three-copy searches take hours; pass --long-run to run one"));
    }
    let cert = certificate(cfg, copies, true, checkpoint)?;
    Ok(CertificateJson::new(&cert, cfg.clone()))
}

pub fn certify(cfg: &RunConfig) -> Result<CertificateJson> {
    let n_max = cfg.copies.unwrap_or(3);
    let search = cfg.search.unwrap_or(false);
    if search && n_max >= 3 && cfg.long_run != Some(true) {
        return Err(CliError::invalid("searching three copies takes hours; pass --long-run or lower --copies"));
    }
    let cert = certificate(cfg, n_max, search, None)?;
    Ok(CertificateJson::new(&cert, cfg.clone()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    /// `None` at the antisymmetric limit.
    pub alpha: Option<f64>,
    pub lambda: f64,
    pub region: String,
    pub region_copies: Option<usize>,
    /// Certified bound for `N = 1..=copies` (empty for `d = 2`).
    pub certified_bounds: Vec<Option<f64>>,
    /// Searched minimum for `N = 1..=copies`; `None` where no search ran.
    pub lambda_min_search: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub d: usize,
    pub copies: usize,
    pub rows: Vec<SweepRow>,
    pub config: RunConfig,
    pub tool_version: String,
}

/// `β_i = β_min + (β_max - β_min) i / (steps - 1)`; the point `β = d - 1`
/// is the antisymmetric limit and is never searched.
pub fn sweep(cfg: &RunConfig) -> Result<SweepTable> {
    let d = required(cfg.d, "d")?;
    let beta_min = required(cfg.beta_min, "beta_min")?;
    let beta_max = required(cfg.beta_max, "beta_max")?;
    let steps = required(cfg.steps, "steps")?;
    let copies = cfg.copies.unwrap_or(1);
    let search = cfg.search.unwrap_or(true);
    if steps < 2 {
        return Err(CliError::invalid("--steps must be at least 2"));
    }
    if !(beta_min < beta_max) {
        return Err(CliError::invalid("empty range: need beta-min < beta-max"));
    }
    let (lo, hi) = beta_range(d);
    if beta_min < lo || beta_max > hi {
        return Err(CliError::invalid(format!("beta range must lie within [{lo}, {hi}] for d = {d}")));
    }
    if !(1..=3).contains(&copies) {
        return Err(CliError::invalid("--copies must be 1, 2 or 3"));
    }
    if search && copies == 3 && cfg.long_run != Some(true) {
        return Err(CliError::invalid("three-copy searches take hours; pass --long-run or --no-search"));
    }
    let table = region_table(d, copies)?;
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let beta = if i == steps - 1 { beta_max } else { beta_min + (beta_max - beta_min) * i as f64 / (steps - 1) as f64 };
        let state = if beta >= hi { StandardState::antisymmetric_limit(d)? } else { StandardState::from_beta(d, beta)? };
        let (region, region_copies) = region_label(classify_region(d, beta, &table));
        let certified_bounds = (1..=copies).map(|n| table.entry(n).map(|e| e.certified_beta_bound)).collect();
        let mut lambda_min_search = Vec::with_capacity(copies);
        for n in 1..=copies {
            let value = if search && !state.is_limit() {
                Some(witness_search(d, beta, n, &cfg.search_config(n)?)?.lambda_min)
            } else {
                None
            };
            lambda_min_search.push(value);
        }
        rows.push(SweepRow {
            beta,
            alpha: (!state.is_limit()).then(|| state.alpha()),
            lambda: state.lambda(),
            region: region.into(),
            region_copies,
            certified_bounds,
            lambda_min_search,
        });
    }
    Ok(SweepTable { d, copies, rows, config: cfg.clone(), tool_version: TOOL_VERSION.into() })
}

impl SweepTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut header: Vec<String> = ["beta", "alpha", "lambda", "region", "region_copies"].map(String::from).to_vec();
        header.extend((1..=self.copies).map(|n| format!("certified_bound_N{n}")));
        header.extend((1..=self.copies).map(|n| format!("lambda_min_search_N{n}")));
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mut row = vec![
                    csv_number(Some(r.beta)),
                    csv_number(r.alpha),
                    csv_number(Some(r.lambda)),
                    r.region.clone(),
                    r.region_copies.map(|c| c.to_string()).unwrap_or_default(),
                ];
                row.extend(r.certified_bounds.iter().map(|&b| csv_number(b)));
                row.extend(r.lambda_min_search.iter().map(|&v| csv_number(v)));
                row
            })
            .collect();
        write_csv(&header, &rows)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwirlReport {
    pub d: usize,
    pub trials: usize,
    pub protocol_events: usize,
    /// Largest Frobenius distance between the protocol output and `𝒟(ρ)`.
    pub max_protocol_gap: f64,
    /// Largest change of `tr(A ρ)` after any single event.
    pub max_weight_drift: f64,
    /// Haar samples per state for the Monte-Carlo comparison (0: skipped).
    pub mc_samples: usize,
    pub max_mc_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub protocol: Option<ProtocolJson>,
    pub config: RunConfig,
    pub tool_version: String,
}

pub fn twirl_check(cfg: &RunConfig, dump_protocol: bool) -> Result<TwirlReport> {
    let d = required(cfg.d, "d")?;
    if !(2..=5).contains(&d) {
        return Err(CliError::invalid("twirl-check supports 2 <= d <= 5"));
    }
    let trials = cfg.trials.unwrap_or(20);
    let samples = cfg.samples.unwrap_or(2000);
    let seed = cfg.seed.unwrap_or(0);
    let protocol = build_protocol(d)?;
    let antisym = ProjectorSet::new(d)?.antisym;
    let mut max_protocol_gap: f64 = 0.0;
    let mut max_weight_drift: f64 = 0.0;
    let mut max_mc_gap: Option<f64> = None;
    for t in 0..trials {
        let mut rng = SeededRng::new(seed, t as u64);
        let rho = rng.random_state(d * d);
        let weight = rho.trace_product(&antisym)?.re;
        let out = apply_protocol_traced(&protocol, &rho, |_, _, step| {
            let drift = (antisymmetric_weight(step, d).map(|w| w.re).unwrap_or(f64::NAN) - weight).abs();
            max_weight_drift = max_weight_drift.max(drift);
        })?;
        let target = depolarize(&rho, d)?;
        max_protocol_gap = max_protocol_gap.max(out.distance(&target));
        if samples > 0 {
            let mc = haar_twirl_mc(&rho, d, samples, &mut rng, false)?;
            max_mc_gap = Some(max_mc_gap.unwrap_or(0.0).max(mc.distance(&target)));
        }
    }
    Ok(TwirlReport {
        d,
        trials,
        protocol_events: protocol.len(),
        max_protocol_gap,
        max_weight_drift,
        mc_samples: samples,
        max_mc_gap,
        protocol: dump_protocol.then(|| ProtocolJson::from(&protocol)),
        config: cfg.clone(),
        tool_version: TOOL_VERSION.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationsRow {
    #[serde(rename = "N")]
    pub copies: usize,
    pub k: usize,
    pub samples: usize,
    pub max_projector: f64,
    pub max_mixed: f64,
    pub upper_bound: f64,
    pub min_complement: f64,
    pub lower_bound: f64,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityRow {
    #[serde(rename = "N")]
    pub copies: usize,
    pub beta: f64,
    pub beta_n: f64,
    pub certified: bool,
    pub worst_margin: f64,
    pub worst_value: f64,
    pub evaluated: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationsSummary {
    pub relations: Vec<RelationsRow>,
    pub inequality: Option<InequalityRow>,
    pub total_violations: usize,
    pub config: RunConfig,
    pub tool_version: String,
}

/// Relations (i)-(iii) for `d = 3` at every `k ≤ N` (or the given `k`),
/// plus the large-`N` inequality when `beta` is set.
pub fn relations_check(cfg: &RunConfig) -> Result<RelationsSummary> {
    let copies = cfg.copies.unwrap_or(2);
    let samples = cfg.samples.unwrap_or(1000);
    let seed = cfg.seed.unwrap_or(0);
    if !(1..=3).contains(&copies) {
        return Err(CliError::invalid("--copies must be 1, 2 or 3"));
    }
    let ks: Vec<usize> = match cfg.k {
        Some(k) if k > copies => return Err(CliError::invalid("--k must not exceed --copies")),
        Some(k) => vec![k],
        None => (0..=copies).collect(),
    };
    let mut relations = Vec::with_capacity(ks.len());
    for k in ks {
        let mut rng = SeededRng::new(seed, k as u64);
        let r = structural_relations_check(copies, k, samples, &mut rng)?;
        relations.push(RelationsRow {
            copies: r.copies,
            k: r.k,
            samples: r.samples,
            max_projector: r.max_projector,
            max_mixed: r.max_mixed,
            upper_bound: r.upper_bound,
            min_complement: r.min_complement,
            lower_bound: r.lower_bound,
            violations: r.violations,
        });
    }
    let inequality = match cfg.beta {
        None => None,
        Some(beta) => {
            let mut rng = SeededRng::new(seed, copies as u64 + 1);
            let r = asymptotic_inequality_check(copies, beta, samples, &mut rng, &[])?;
            Some(InequalityRow {
                copies: r.copies,
                beta: r.beta,
                beta_n: r.beta_n,
                certified: r.certified,
                worst_margin: r.worst_margin,
                worst_value: r.worst_value,
                evaluated: r.evaluated,
            })
        }
    };
    let total_violations = relations.iter().map(|r| r.violations).sum();
    Ok(RelationsSummary { relations, inequality, total_violations, config: cfg.clone(), tool_version: TOOL_VERSION.into() })
}

impl RelationsSummary {
    pub fn to_csv(&self) -> Result<String> {
        let header = ["N", "k", "samples", "max_projector", "max_mixed", "upper_bound", "min_complement", "lower_bound", "violations"]
            .map(String::from);
        let rows: Vec<Vec<String>> = self
            .relations
            .iter()
            .map(|r| {
                vec![
                    r.copies.to_string(),
                    r.k.to_string(),
                    r.samples.to_string(),
                    csv_number(Some(r.max_projector)),
                    csv_number(Some(r.max_mixed)),
                    csv_number(Some(r.upper_bound)),
                    csv_number(Some(r.min_complement)),
                    csv_number(Some(r.lower_bound)),
                    r.violations.to_string(),
                ]
            })
            .collect();
        write_csv(&header, &rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(command: &str) -> RunConfig {
        RunConfig::new(command)
    }

    #[test]
    fn state_examples() {
        let s = state(&RunConfig { d: Some(3), alpha: Some(3.0), ..cfg("state") }, false).unwrap();
        assert!((s.state.beta - 0.5).abs() < 1e-15);
        let s = state(&RunConfig { d: Some(3), beta: Some(0.0), ..cfg("state") }, true).unwrap();
        assert!((s.state.alpha.unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(s.operators.unwrap().density_matrix.rows, 9);
        assert!(state(&RunConfig { d: Some(3), beta: Some(5.0), ..cfg("state") }, false).is_err());
        assert!(state(&RunConfig { d: Some(3), beta: Some(0.0), alpha: Some(2.0), ..cfg("state") }, false).is_err());
    }

    #[test]
    fn threshold_examples() {
        let t = thresholds(&RunConfig { d: Some(3), copies: Some(3), ..cfg("thresholds") }).unwrap();
        assert_eq!(t.rows[0].certified_bound, 0.5);
        assert_eq!(t.rows[0].one_distill_threshold, 0.5);
        assert!((t.rows[0].lambda_threshold - 0.6).abs() < 1e-15);
        assert_eq!(t.rows[1].certified_bound, 0.25);
        assert!((t.rows[2].certified_bound - 1.0 / 56.0).abs() < 1e-15);
        let t = thresholds(&RunConfig { d: Some(5), copies: Some(1), ..cfg("thresholds") }).unwrap();
        assert_eq!(t.rows[0].one_distill_threshold, 1.5);
        assert!(thresholds(&RunConfig { d: Some(2), ..cfg("thresholds") }).is_err());
    }

    #[test]
    fn sweep_rejects_empty_range() {
        let c = RunConfig { d: Some(3), beta_min: Some(0.2), beta_max: Some(0.2), steps: Some(2), ..cfg("sweep") };
        assert!(sweep(&c).is_err());
        let c = RunConfig { d: Some(3), beta_min: Some(0.0), beta_max: Some(2.5), steps: Some(2), ..cfg("sweep") };
        assert!(sweep(&c).is_err());
    }

    #[test]
    fn checkpoint_resume_matches_fresh_run() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ckpt.jsonl");
        let config = SearchConfig { restarts: 4, max_iters: 60, ..SearchConfig::default() };
        let search = WitnessSearch::new(3, 0.4, 2, config.clone()).unwrap();
        let fresh = search.run().unwrap();
        let partial = WitnessSearch::new(3, 0.4, 2, SearchConfig { restarts: 2, ..config }).unwrap();
        checkpointed_search(&partial, &path).unwrap();
        let resumed = checkpointed_search(&search, &path).unwrap();
        assert_eq!(resumed, fresh);
        let lines = std::fs::read_to_string(&path).unwrap().lines().count();
        assert_eq!(lines, 4);
    }
}
