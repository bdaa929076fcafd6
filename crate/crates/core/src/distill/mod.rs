//! Distillability of many copies of a family member.
//!
//! `N` copies of `ρ` are distillable iff some Schmidt-rank-2 vector `Ψ` over
//! the `N` copies has `⟨Ψ|(ρ^{⊗N})^{T_A}|Ψ⟩ < 0`. For the family this reduces
//! to the sign of `⟨Ψ|R|Ψ⟩` with `R = (Q_d - β P_d)^{⊗N}`. The submodules
//! hold the analytic thresholds and bounds ([`bounds`]), evaluation of the
//! witness functional ([`witness`]), the numerical minimization over
//! Schmidt-rank-2 vectors ([`search`]), sampled checks of the inequalities
//! behind the bounds ([`checks`]), and their synthesis into a verdict
//! ([`certify`]).

pub mod bounds;
pub mod certify;
pub mod checks;
pub mod search;
pub mod witness;

pub use bounds::{
    asymptotic_bound, certified_undistillable_bound, lambda_many_copies, lambda_threshold, one_distillable,
    one_distillable_threshold, reduce_dimension_beta, AsymptoticBound, BoundEntry, BoundSource, BoundTable,
};
pub use certify::{certify, certify_with, Certificate, Claim, ClaimKind, ClaimSource, ClaimVerdict, Verdict};
pub use checks::{asymptotic_inequality_check, structural_relations_check, InequalityReport, RelationsReport};
pub use search::{witness_search, RestartOutcome, SearchConfig, SymmetryMode, WitnessResult, WitnessSearch};
pub use witness::{
    brute_force_witness, f_operator, frame_objective, stationarity_residual, witness_operator, witness_value,
    Rank2Vector,
};
