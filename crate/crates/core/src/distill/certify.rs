//! Synthesis of thresholds, certified bounds and search outcomes into one
//! verdict with per-claim provenance.
//!
//! Analytic statements are labelled [`ClaimKind::Certified`]. A search that
//! finds no negative vector only yields [`ClaimKind::Evidence`]; a search
//! that does find one produces an explicit witness whose value is
//! re-evaluated before it is reported as certified.

use alloc::vec::Vec;

use crate::distill::bounds::{one_distillable_threshold, BoundSource, BoundTable};
use crate::distill::search::{witness_search, SearchConfig, WitnessResult};
use crate::distill::witness::{two_level_witness, witness_operator, witness_value, Rank2Vector};
use crate::error::{Error, Result};
use crate::werner::{beta_range, classify_region, Region};

/// A found witness counts only if its recomputed value is below this.
pub const WITNESS_MARGIN: f64 = -1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClaimKind {
    Certified,
    Evidence,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClaimSource {
    /// PPT iff `β ≤ 0`; PPT states in the family are separable.
    SeparabilityCriterion,
    OneCopyThreshold,
    TwoCopyQuarter,
    GeneralTilde,
    WitnessSearch,
}

impl From<BoundSource> for ClaimSource {
    fn from(s: BoundSource) -> Self {
        match s {
            BoundSource::OneCopyThreshold => ClaimSource::OneCopyThreshold,
            BoundSource::TwoCopyQuarter => ClaimSource::TwoCopyQuarter,
            // the asymptotic estimate never enters a table of certified bounds
            BoundSource::GeneralTilde | BoundSource::Asymptotic => ClaimSource::GeneralTilde,
        }
    }
}

/// What a claim asserts about `copies` copies (`None`: every number of copies).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClaimVerdict {
    Separable,
    Distillable,
    Undistillable,
    /// The search found no negative Schmidt-rank-2 vector.
    NoWitnessFound,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Claim {
    pub copies: Option<usize>,
    pub kind: ClaimKind,
    pub verdict: ClaimVerdict,
    /// The bound compared against for certified undistillability, the witness
    /// value for distillability, or the searched minimum for evidence.
    pub value: f64,
    pub source: ClaimSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Separable,
    OneDistillable,
    /// Certified undistillable up to `copies` copies.
    CertifiedUndistillable { copies: usize },
    /// A verified witness shows `copies` copies are distillable.
    Distillable { copies: usize },
    UndecidedBand,
}

impl From<Region> for Verdict {
    fn from(r: Region) -> Self {
        match r {
            Region::Separable => Verdict::Separable,
            Region::OneDistillable => Verdict::OneDistillable,
            Region::CertifiedUndistillable { copies } => Verdict::CertifiedUndistillable { copies },
            Region::UndecidedBand => Verdict::UndecidedBand,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub d: usize,
    pub beta: f64,
    pub verdict: Verdict,
    pub claims: Vec<Claim>,
    pub witness: Option<Rank2Vector>,
    /// `(copies, result)` for every search that was run.
    pub searches: Vec<(usize, WitnessResult)>,
}

/// Certificate for `copies ≤ max_copies`, running [`witness_search`] with
/// `config` for every copy count not covered by a certified bound.
pub fn certify(d: usize, beta: f64, max_copies: usize, config: Option<&SearchConfig>) -> Result<Certificate> {
    certify_with(d, beta, max_copies, |copies| match config {
        Some(c) => witness_search(d, beta, copies, c).map(Some),
        None => Ok(None),
    })
}

/// Like [`certify`] with a caller-supplied search; `search(N)` may return
/// `None` to skip `N` copies.
pub fn certify_with(
    d: usize,
    beta: f64,
    max_copies: usize,
    mut search: impl FnMut(usize) -> Result<Option<WitnessResult>>,
) -> Result<Certificate> {
    if max_copies == 0 {
        return Err(Error::InvalidArgument("copy count must be positive"));
    }
    let (min, max) = beta_range(d);
    if !(beta >= min && beta <= max) {
        return Err(Error::BetaOutOfRange { beta, min, max });
    }
    let table = BoundTable::standard(d, max_copies)?;
    let region = classify_region(d, beta, &table);
    let mut cert = Certificate { d, beta, verdict: region.into(), claims: Vec::new(), witness: None, searches: Vec::new() };

    match region {
        Region::Separable => cert.claims.push(Claim {
            copies: None,
            kind: ClaimKind::Certified,
            verdict: ClaimVerdict::Separable,
            value: 0.0,
            source: ClaimSource::SeparabilityCriterion,
        }),
        Region::OneDistillable => {
            let w = two_level_witness(d);
            let value = witness_value(&witness_operator(d, beta, 1)?, &w)?;
            cert.claims.push(Claim {
                copies: Some(1),
                kind: ClaimKind::Certified,
                verdict: ClaimVerdict::Distillable,
                value,
                source: ClaimSource::OneCopyThreshold,
            });
            cert.witness = Some(w);
        }
        Region::CertifiedUndistillable { .. } | Region::UndecidedBand => {
            for copies in 1..=max_copies {
                let entry = table.entry(copies);
                if let Some(e) = entry.filter(|e| beta <= e.certified_beta_bound) {
                    cert.claims.push(Claim {
                        copies: Some(copies),
                        kind: ClaimKind::Certified,
                        verdict: ClaimVerdict::Undistillable,
                        value: e.certified_beta_bound,
                        source: e.source.into(),
                    });
                    continue;
                }
                if copies == 1 && entry.is_none() {
                    // d = 2 never reaches this branch: NPPT there is one-distillable
                    cert.claims.push(Claim {
                        copies: Some(1),
                        kind: ClaimKind::Certified,
                        verdict: ClaimVerdict::Undistillable,
                        value: one_distillable_threshold(d),
                        source: ClaimSource::OneCopyThreshold,
                    });
                    continue;
                }
                let Some(result) = search(copies)? else { continue };
                let verified = match &result.best_vector {
                    Some(v) if result.lambda_min < 0.0 => {
                        let value = witness_value(&witness_operator(d, beta, copies)?, v)?;
                        (value < WITNESS_MARGIN).then(|| (v.clone(), value))
                    }
                    _ => None,
                };
                match verified {
                    Some((v, value)) => {
                        cert.claims.push(Claim {
                            copies: Some(copies),
                            kind: ClaimKind::Certified,
                            verdict: ClaimVerdict::Distillable,
                            value,
                            source: ClaimSource::WitnessSearch,
                        });
                        cert.witness = Some(v);
                        cert.verdict = Verdict::Distillable { copies };
                        cert.searches.push((copies, result));
                        break;
                    }
                    None => {
                        cert.claims.push(Claim {
                            copies: Some(copies),
                            kind: ClaimKind::Evidence,
                            verdict: ClaimVerdict::NoWitnessFound,
                            value: result.lambda_min,
                            source: ClaimSource::WitnessSearch,
                        });
                        cert.searches.push((copies, result));
                    }
                }
            }
        }
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_member() {
        let c = certify(3, -0.1, 2, None).unwrap();
        assert_eq!(c.verdict, Verdict::Separable);
        assert_eq!(c.claims[0].kind, ClaimKind::Certified);
    }

    #[test]
    fn one_distillable_member_carries_witness() {
        let c = certify(3, 0.6, 2, None).unwrap();
        assert_eq!(c.verdict, Verdict::OneDistillable);
        let w = c.witness.unwrap();
        let v = witness_value(&witness_operator(3, 0.6, 1).unwrap(), &w).unwrap();
        assert!(v < 0.0);
        let limit = certify(3, 2.0, 1, None).unwrap();
        assert_eq!(limit.verdict, Verdict::OneDistillable);
    }

    #[test]
    fn undecided_band_with_search_evidence() {
        let cfg = SearchConfig { restarts: 3, max_iters: 100, ..SearchConfig::default() };
        let c = certify(3, 0.3, 2, Some(&cfg)).unwrap();
        assert_eq!(c.verdict, Verdict::UndecidedBand);
        assert_eq!(c.claims.len(), 2);
        assert_eq!((c.claims[0].kind, c.claims[0].verdict), (ClaimKind::Certified, ClaimVerdict::Undistillable));
        assert_eq!(c.claims[0].value, 0.5);
        assert_eq!(c.claims[1].kind, ClaimKind::Evidence);
        assert_eq!(c.searches.len(), 1);
    }

    #[test]
    fn certified_two_copy_member() {
        let c = certify(3, 0.2, 2, None).unwrap();
        assert_eq!(c.verdict, Verdict::CertifiedUndistillable { copies: 2 });
        assert!(c.claims.iter().all(|cl| cl.kind == ClaimKind::Certified));
        assert!(certify(3, 2.5, 1, None).is_err());
    }
}
