//! Sampled checks of the operator inequalities behind the `d = 3` bounds.

use alloc::vec::Vec;

use crate::bipartite::BipartiteDims;
use crate::distill::bounds::asymptotic_bound;
use crate::distill::witness::{witness_operator, witness_value, Rank2Vector};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, C64, ZERO};
use crate::math;
use crate::random::SeededRng;
use crate::werner::ProjectorSet;

const D: usize = 3;
const VIOLATION_TOL: f64 = 1e-12;

/// Extremes of three relations over sampled Schmidt-rank-2 vectors on `N`
/// copies of `3 ⊗ 3`, maximized or minimized over every placement of the
/// `k` copies:
/// (i) `⟨Ψ|P^{⊗k} ⊗ 1|Ψ⟩ ≤ 2/3^k`,
/// (ii) `⟨Ψ|Q^{⊗N-k} ⊗ P^{⊗k}|Ψ⟩ ≤ 2/3^k`,
/// (iii) `⟨Ψ|Q^{⊗N}|Ψ⟩ ≥ 1/3^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationsReport {
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

/// Applies `op` (acting on one `d ⊗ d` pair) to copy `copy` of an interleaved vector.
fn apply_on_copy(v: &[C64], op: &ComplexMatrix, copy: usize, copies: usize) -> Vec<C64> {
    let p = op.rows();
    let right = p.pow((copies - copy - 1) as u32);
    let left = v.len() / (p * right);
    let mut out = alloc::vec![ZERO; v.len()];
    for l in 0..left {
        for r in 0..right {
            for i in 0..p {
                let mut acc = ZERO;
                for (j, &x) in op.row(i).iter().enumerate() {
                    if x != ZERO {
                        acc += x * v[(l * p + j) * right + r];
                    }
                }
                out[(l * p + i) * right + r] = acc;
            }
        }
    }
    out
}

/// `⟨v| ⊗_j ops[j] |v⟩` on an interleaved vector.
fn product_expectation(v: &[C64], ops: &[&ComplexMatrix]) -> f64 {
    let mut w = v.to_vec();
    for (copy, op) in ops.iter().enumerate() {
        w = apply_on_copy(&w, op, copy, ops.len());
    }
    linalg::dot(v, &w).re
}

pub fn structural_relations_check(copies: usize, k: usize, samples: usize, rng: &mut SeededRng) -> Result<RelationsReport> {
    if copies == 0 || k > copies {
        return Err(Error::InvalidArgument("relations need N >= 1 and 0 <= k <= N"));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample"));
    }
    let p = ProjectorSet::new(D)?;
    let id = ComplexMatrix::identity(D * D);
    let dims = BipartiteDims::new(D, D, copies)?;
    let placements: Vec<u32> = (0u32..1 << copies).filter(|m| m.count_ones() as usize == k).collect();
    let upper_bound = 2.0 / math::powi(3.0, k as i32);
    let lower_bound = 1.0 / math::powi(3.0, copies as i32);

    let mut report = RelationsReport {
        copies,
        k,
        samples,
        max_projector: f64::NEG_INFINITY,
        max_mixed: f64::NEG_INFINITY,
        upper_bound,
        min_complement: f64::INFINITY,
        lower_bound,
        violations: 0,
    };
    for _ in 0..samples {
        let psi = Rank2Vector::random(dims.alice_total(), dims.bob_total(), rng);
        let v = dims.interleave_vector(&psi.to_vector())?;
        for &mask in &placements {
            let chosen = |j: usize| mask & (1 << j) != 0;
            let ops: Vec<&ComplexMatrix> = (0..copies).map(|j| if chosen(j) { &p.max_ent } else { &id }).collect();
            let vi = product_expectation(&v, &ops);
            let ops: Vec<&ComplexMatrix> = (0..copies).map(|j| if chosen(j) { &p.max_ent } else { &p.complement }).collect();
            let vii = product_expectation(&v, &ops);
            report.max_projector = report.max_projector.max(vi);
            report.max_mixed = report.max_mixed.max(vii);
            report.violations += usize::from(vi > upper_bound + VIOLATION_TOL) + usize::from(vii > upper_bound + VIOLATION_TOL);
        }
        let ops: Vec<&ComplexMatrix> = (0..copies).map(|_| &p.complement).collect();
        let viii = product_expectation(&v, &ops);
        report.min_complement = report.min_complement.min(viii);
        report.violations += usize::from(viii < lower_bound - VIOLATION_TOL);
    }
    Ok(report)
}

/// Worst margin of `⟨Ψ|(Q - βP)^{⊗N}|Ψ⟩ ≥ 3^{-N} (1 - β/β_N)` for `d = 3`.
#[derive(Clone, Debug, PartialEq)]
pub struct InequalityReport {
    pub copies: usize,
    pub beta: f64,
    /// `β_N` used on the right-hand side: `1/2` for one copy, otherwise the
    /// large-`N` estimate.
    pub beta_n: f64,
    /// Whether `beta_n` is a proven value (one copy only).
    pub certified: bool,
    pub worst_margin: f64,
    pub worst_value: f64,
    pub evaluated: usize,
}

/// Evaluates the inequality on `samples` random Schmidt-rank-2 vectors and
/// on every vector in `extra` (for instance search minimizers).
pub fn asymptotic_inequality_check(
    copies: usize,
    beta: f64,
    samples: usize,
    rng: &mut SeededRng,
    extra: &[Rank2Vector],
) -> Result<InequalityReport> {
    if !(beta >= 0.0) {
        return Err(Error::InvalidArgument("the inequality is stated for beta >= 0"));
    }
    let (beta_n, certified) = if copies == 1 { (0.5, true) } else { (asymptotic_bound(copies)?.beta_asymptotic, false) };
    let r = witness_operator(D, beta, copies)?;
    let rhs = (1.0 - beta / beta_n) / math::powi(3.0, copies as i32);
    let mut worst_margin = f64::INFINITY;
    let mut worst_value = f64::INFINITY;
    let mut evaluated = 0;
    let mut consider = |value: f64| {
        worst_margin = worst_margin.min(value - rhs);
        worst_value = worst_value.min(value);
        evaluated += 1;
    };
    for _ in 0..samples {
        let psi = Rank2Vector::random(r.alice_dim, r.bob_dim, rng);
        consider(witness_value(&r, &psi)?);
    }
    for psi in extra {
        consider(witness_value(&r, psi)?);
    }
    Ok(InequalityReport { copies, beta, beta_n, certified, worst_margin, worst_value, evaluated })
}
