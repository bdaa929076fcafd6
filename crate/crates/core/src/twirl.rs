//! Depolarization onto the `U ⊗ U`-invariant family.
//!
//! Three realizations of the same superoperator `𝒟` live here: the closed
//! projector formula, a finite protocol of bi-local unitary mixings, and a
//! Monte-Carlo average over Haar-random `U ⊗ U`. The conjugate twirl `ℰ`
//! (over `U* ⊗ U`) is available through its closed formula and through the
//! identity `ℰ(X) = [𝒟(X^{T_A})]^{T_A}`. Local filtering of an NPPT state
//! with a known negative witness into the family is also provided.

use alloc::vec::Vec;

use crate::bipartite::{coefficient_matrix, partial_transpose, BipartiteDims};
use crate::eigen::hermitian_spectrum;
use crate::error::{Error, Result};
use crate::linalg::{self, kron, ComplexMatrix, C64, ONE, ZERO};
use crate::math;
use crate::random::{haar_unitary, SeededRng};
use crate::werner::{max_entangled, trace_antisym, trace_sym, ProjectorSet, StandardState};

fn check_pair(x: &ComplexMatrix, d: usize) -> Result<()> {
    let n = x.require_square()?;
    if n != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, found: n });
    }
    Ok(())
}

/// `tr(A_d X)` computed entrywise: `(tr X - tr(Π X)) / 2`.
pub fn antisymmetric_weight(x: &ComplexMatrix, d: usize) -> Result<C64> {
    check_pair(x, d)?;
    let mut swap_trace = ZERO;
    for i in 0..d {
        for j in 0..d {
            // ⟨i,j|Π X|i,j⟩ = ⟨j,i|X|i,j⟩
            swap_trace += x[(j * d + i, i * d + j)];
        }
    }
    Ok((x.trace() - swap_trace) * 0.5)
}

/// `𝒟(X) = A tr(A X)/tr(A) + S tr(S X)/tr(S)`.
pub fn depolarize(x: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    let wa = antisymmetric_weight(x, d)?;
    let ws = x.trace() - wa;
    let p = ProjectorSet::new(d)?;
    let mut out = p.antisym.scale_complex(wa / trace_antisym(d));
    out.add_scaled(&p.sym, ws / trace_sym(d));
    Ok(out)
}

/// `ℰ(X) = P tr(P X) + Q tr(Q X)/tr(Q)`.
pub fn conjugate_depolarize(x: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    check_pair(x, d)?;
    let phi = max_entangled(d);
    let wp = x.quadratic_form(&phi)?;
    let wq = x.trace() - wp;
    let p = ProjectorSet::new(d)?;
    let mut out = p.max_ent.scale_complex(wp);
    out.add_scaled(&p.complement, wq / ((d * d - 1) as f64));
    Ok(out)
}

/// `ℰ` evaluated as `[𝒟(X^{T_A})]^{T_A}`.
pub fn conjugate_depolarize_via_transpose(x: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    let dims = BipartiteDims::square(d);
    partial_transpose(&depolarize(&partial_transpose(x, dims)?, d)?, dims)
}

/// Empirical mean of `(U⊗U) X (U⊗U)†` over `samples` Haar draws, or of
/// `(U*⊗U) X (U*⊗U)†` when `conjugate` is set.
pub fn haar_twirl_mc(
    x: &ComplexMatrix,
    d: usize,
    samples: usize,
    rng: &mut SeededRng,
    conjugate: bool,
) -> Result<ComplexMatrix> {
    check_pair(x, d)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample"));
    }
    let mut acc = ComplexMatrix::zeros(d * d, d * d);
    for _ in 0..samples {
        let u = haar_unitary(d, rng);
        let left = if conjugate { u.conj() } else { u.clone() };
        let w = kron(&left, &u);
        acc.add_scaled(&x.conjugate_by(&w)?, ONE);
    }
    Ok(acc.scale(1.0 / samples as f64))
}

/// Local unitaries from which the finite protocol is assembled. Indices are
/// zero-based basis labels of `C^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Identity,
    /// `|target⟩ ↦ -|target⟩`.
    PhaseFlip { target: usize },
    /// `|target⟩ ↦ i|target⟩`.
    PhaseI { target: usize },
    /// Exchanges `|first⟩` and `|second⟩`.
    Swap { first: usize, second: usize },
    /// Cyclic shift of `|start⟩ … |d-1⟩` by `shift`, fixing lower labels.
    CyclicShift { start: usize, shift: usize },
    /// `|k⟩ ↦ |k + amount mod d⟩`.
    Shift { amount: usize },
    /// `|j⟩ ↦ d^{-1/2} Σ_k e^{2πi jk/d} |k⟩`.
    Fourier,
}

impl Generator {
    pub fn label(&self) -> &'static str {
        match self {
            Generator::Identity => "identity",
            Generator::PhaseFlip { .. } => "phase_flip",
            Generator::PhaseI { .. } => "phase_i",
            Generator::Swap { .. } => "swap",
            Generator::CyclicShift { .. } => "cyclic_shift",
            Generator::Shift { .. } => "shift",
            Generator::Fourier => "fourier",
        }
    }

    pub fn params(&self) -> Vec<usize> {
        match *self {
            Generator::Identity | Generator::Fourier => Vec::new(),
            Generator::PhaseFlip { target } | Generator::PhaseI { target } => alloc::vec![target],
            Generator::Swap { first, second } => alloc::vec![first, second],
            Generator::CyclicShift { start, shift } => alloc::vec![start, shift],
            Generator::Shift { amount } => alloc::vec![amount],
        }
    }

    /// The unitary on `C^d`.
    pub fn unitary(&self, d: usize) -> ComplexMatrix {
        match *self {
            Generator::Identity => ComplexMatrix::identity(d),
            Generator::PhaseFlip { target } => {
                let mut u = ComplexMatrix::identity(d);
                u[(target, target)] = -ONE;
                u
            }
            Generator::PhaseI { target } => {
                let mut u = ComplexMatrix::identity(d);
                u[(target, target)] = C64::new(0.0, 1.0);
                u
            }
            Generator::Swap { first, second } => permutation(d, |k| {
                if k == first {
                    second
                } else if k == second {
                    first
                } else {
                    k
                }
            }),
            Generator::CyclicShift { start, shift } => permutation(d, |k| {
                if k < start {
                    k
                } else {
                    start + (k - start + shift) % (d - start)
                }
            }),
            Generator::Shift { amount } => permutation(d, |k| (k + amount) % d),
            Generator::Fourier => {
                let amp = 1.0 / math::sqrt(d as f64);
                ComplexMatrix::from_fn(d, d, |k, j| {
                    let theta = 2.0 * core::f64::consts::PI * ((j * k) % d) as f64 / d as f64;
                    math::cis(theta) * amp
                })
            }
        }
    }
}

/// `|k⟩ ↦ |image(k)⟩`.
fn permutation(d: usize, image: impl Fn(usize) -> usize) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        u[(image(k), k)] = ONE;
    }
    u
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixingStep {
    pub generator: Generator,
    pub probability: f64,
}

/// One mixing event: `ρ ↦ Σ_k p_k (U_k⊗U_k) ρ (U_k⊗U_k)†`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixingEvent {
    pub alternatives: Vec<MixingStep>,
}

impl MixingEvent {
    /// Applies `generator` with probability `p`, otherwise does nothing.
    pub fn binary(generator: Generator, p: f64) -> Self {
        Self {
            alternatives: alloc::vec![
                MixingStep { generator, probability: p },
                MixingStep { generator: Generator::Identity, probability: 1.0 - p },
            ],
        }
    }

    /// Uniform choice among `generators`.
    pub fn uniform(generators: impl IntoIterator<Item = Generator>) -> Self {
        let generators: Vec<Generator> = generators.into_iter().collect();
        let p = 1.0 / generators.len() as f64;
        Self { alternatives: generators.into_iter().map(|generator| MixingStep { generator, probability: p }).collect() }
    }

    pub fn total_probability(&self) -> f64 {
        self.alternatives.iter().map(|s| s.probability).sum()
    }

    pub fn apply(&self, x: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
        check_pair(x, d)?;
        let mut out = ComplexMatrix::zeros(d * d, d * d);
        for step in &self.alternatives {
            if step.generator == Generator::Identity {
                out.add_scaled(x, C64::new(step.probability, 0.0));
                continue;
            }
            let u = step.generator.unitary(d);
            let w = kron(&u, &u);
            out.add_scaled(&x.conjugate_by(&w)?, C64::new(step.probability, 0.0));
        }
        Ok(out)
    }
}

/// Phase of the finite protocol an event belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProtocolPhase {
    Diagonalize,
    MixAntisymmetric,
    MixSymmetric,
    Cleanup,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixingProtocol {
    pub d: usize,
    pub events: Vec<(ProtocolPhase, MixingEvent)>,
}

impl MixingProtocol {
    pub fn empty(d: usize) -> Self {
        Self { d, events: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// Finite protocol realizing `𝒟` for `d ⊗ d`.
///
/// 1. Diagonalize in the pair basis: `d` phase-flip events and `d` phase-`i`
///    events at probability 1/2, then an exact average over all relabellings
///    of the basis, built as a Fisher-Yates sequence of swap events.
/// 2. Mix the antisymmetric subspaces `H_i = span{φ^-_{ij}: j > i}`: each is
///    depolarized by the cyclic shifts of the labels above `i`, and they are
///    merged pairwise from the top with swap probability `(d-k)/(d-k+1)`.
/// 3. Mix the symmetric subspace: uniform label shifts, the Fourier unitary
///    at probability `d/(d+1)`, then a repeat of step 1 to remove the
///    coherences it introduces.
pub fn build_protocol(d: usize) -> Result<MixingProtocol> {
    if d < 2 {
        return Err(Error::InvalidArgument("local dimension must be at least 2"));
    }
    let mut events = Vec::new();
    diagonalize_events(d, ProtocolPhase::Diagonalize, &mut events);

    // zero-based start label s depolarizes H_s (one-based H_{s}) via cycles of s..d-1
    for start in 1..d.saturating_sub(1) {
        events.push((ProtocolPhase::MixAntisymmetric, cyclic_event(d, start)));
    }
    // one-based k runs from d-2 down to 1
    for k in (1..d.saturating_sub(1)).rev() {
        merge_events(d, k, &mut events);
    }

    events.push((
        ProtocolPhase::MixSymmetric,
        MixingEvent::uniform((1..=d).map(|l| {
            if l == d {
                Generator::Identity
            } else {
                Generator::Shift { amount: l }
            }
        })),
    ));
    events.push((ProtocolPhase::MixSymmetric, MixingEvent::binary(Generator::Fourier, d as f64 / (d as f64 + 1.0))));
    diagonalize_events(d, ProtocolPhase::Cleanup, &mut events);
    Ok(MixingProtocol { d, events })
}

fn diagonalize_events(d: usize, phase: ProtocolPhase, events: &mut Vec<(ProtocolPhase, MixingEvent)>) {
    for target in 0..d {
        events.push((phase, MixingEvent::binary(Generator::PhaseFlip { target }, 0.5)));
    }
    for target in 0..d {
        events.push((phase, MixingEvent::binary(Generator::PhaseI { target }, 0.5)));
    }
    // uniform average over the symmetric group: position k is filled by one of
    // the labels 0..=k chosen uniformly
    for k in (1..d).rev() {
        let mut gens = alloc::vec![Generator::Identity];
        gens.extend((0..k).map(|j| Generator::Swap { first: j, second: k }));
        events.push((phase, MixingEvent::uniform(gens)));
    }
}

/// Uniform cyclic shifts of the zero-based labels `start..d`.
fn cyclic_event(d: usize, start: usize) -> MixingEvent {
    MixingEvent::uniform((0..d - start).map(|shift| {
        if shift == 0 {
            Generator::Identity
        } else {
            Generator::CyclicShift { start, shift }
        }
    }))
}

/// Mixes one-based `H_k` into `H_{k+1} … H_{d-1}`.
fn merge_events(d: usize, k: usize, events: &mut Vec<(ProtocolPhase, MixingEvent)>) {
    let p_s = (d - k) as f64 / (d - k + 1) as f64;
    events.push((ProtocolPhase::MixAntisymmetric, MixingEvent::binary(Generator::Swap { first: k - 1, second: k }, p_s)));
    for j in k..d - 1 {
        // one-based H_j corresponds to zero-based start label j
        events.push((ProtocolPhase::MixAntisymmetric, cyclic_event(d, j)));
    }
    for m in (k + 1..d - 1).rev() {
        merge_events(d, m, events);
    }
}

pub fn apply_protocol(protocol: &MixingProtocol, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    apply_protocol_traced(protocol, x, |_, _, _| {})
}

/// Like [`apply_protocol`], calling `observe(index, phase, state)` after every event.
pub fn apply_protocol_traced(
    protocol: &MixingProtocol,
    x: &ComplexMatrix,
    mut observe: impl FnMut(usize, ProtocolPhase, &ComplexMatrix),
) -> Result<ComplexMatrix> {
    check_pair(x, protocol.d)?;
    let mut state = x.clone();
    for (index, (phase, event)) in protocol.events.iter().enumerate() {
        state = event.apply(&state, protocol.d)?;
        observe(index, *phase, &state);
    }
    Ok(state)
}

/// Local filter `(A, B)` built from the Schmidt data of a witness vector.
#[derive(Clone, Debug)]
pub struct FilterPair {
    pub a_op: ComplexMatrix,
    pub b_op: ComplexMatrix,
    pub schmidt_rank: usize,
    pub coefficients: Vec<f64>,
}

/// Schmidt data `ψ = Σ_i c_i |u_i⟩|v_i⟩` with `c_1 ≥ c_2 ≥ …`, coefficients
/// below `1e-12` dropped.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub alice: Vec<Vec<C64>>,
    pub bob: Vec<Vec<C64>>,
}

pub const SCHMIDT_CUTOFF: f64 = 1e-12;

pub fn schmidt_decompose(psi: &[C64], alice_dim: usize, bob_dim: usize) -> Result<SchmidtDecomposition> {
    let c = coefficient_matrix(psi, alice_dim, bob_dim)?;
    let cc = c.matmul(&c.adjoint())?.hermitian_part();
    let spec = hermitian_spectrum(&cc)?;
    let ct = c.transpose();
    let mut coefficients = Vec::new();
    let mut alice = Vec::new();
    let mut bob = Vec::new();
    for k in (0..alice_dim).rev() {
        let u = spec.vector(k);
        let ubar: Vec<C64> = u.iter().map(|z| z.conj()).collect();
        // ‖C^T ū‖ is accurate to machine precision even where the
        // eigenvalue c² of C C† is not
        let mut v = ct.mul_vec(&ubar)?;
        let ck = linalg::normalize(&mut v);
        if ck <= SCHMIDT_CUTOFF {
            break;
        }
        coefficients.push(ck);
        alice.push(u);
        bob.push(v);
    }
    Ok(SchmidtDecomposition { coefficients, alice, bob })
}

/// `A = Σ_{i≤n} c_i |u_i*⟩⟨i|`, `B = Σ_{i≤n} |v_i⟩⟨i|`, so that
/// `(A* ⊗ B) Σ_{i≤n} |i,i⟩ = |ψ⟩` and the filtered state lives on the first
/// `n` labels of each side.
pub fn local_filter(psi: &[C64], d: usize) -> Result<FilterPair> {
    let s = schmidt_decompose(psi, d, d)?;
    let n = s.coefficients.len();
    if n < 2 {
        return Err(Error::ProductVector);
    }
    let mut a_op = ComplexMatrix::zeros(d, d);
    let mut b_op = ComplexMatrix::zeros(d, d);
    for i in 0..n {
        for r in 0..d {
            a_op[(r, i)] = s.alice[i][r].conj() * s.coefficients[i];
            b_op[(r, i)] = s.bob[i][r];
        }
    }
    Ok(FilterPair { a_op, b_op, schmidt_rank: n, coefficients: s.coefficients })
}

/// Result of filtering an NPPT state into the family.
#[derive(Clone, Debug)]
pub struct FilterOutcome {
    pub state: StandardState,
    pub filter: FilterPair,
    /// `ρ_s ∝ (A†⊗B†) ρ (A⊗B)`, unit trace.
    pub filtered: ComplexMatrix,
    /// `⟨Φ_n|ρ_s^{T_A}|Φ_n⟩`, negative on success.
    pub filtered_witness_value: f64,
}

/// Filters `rho` with the local operators derived from `psi`, then
/// depolarizes. `psi` must satisfy `⟨ψ|ρ^{T_A}|ψ⟩ < 0`.
pub fn filter_to_standard(rho: &ComplexMatrix, psi: &[C64], d: usize) -> Result<FilterOutcome> {
    check_pair(rho, d)?;
    if psi.len() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, found: psi.len() });
    }
    let mut psi = psi.to_vec();
    if linalg::normalize(&mut psi) == 0.0 {
        return Err(Error::InvalidArgument("witness vector is zero"));
    }
    let dims = BipartiteDims::square(d);
    let value = partial_transpose(rho, dims)?.quadratic_form(&psi)?.re;
    if !(value < -1e-12 * rho.max_abs().max(1.0)) {
        return Err(Error::WitnessNotNegative { value });
    }
    let filter = local_filter(&psi, d)?;
    let local = kron(&filter.a_op, &filter.b_op);
    let raw = local.adjoint_mul(&rho.matmul(&local)?)?.hermitian_part();
    let tr = raw.trace().re;
    if !(tr > 0.0) {
        return Err(Error::FilterFailed { value: tr });
    }
    let filtered = raw.scale(1.0 / tr);

    let n = filter.schmidt_rank;
    let mut phi_n = alloc::vec![ZERO; d * d];
    for i in 0..n {
        phi_n[i * d + i] = C64::new(1.0 / math::sqrt(n as f64), 0.0);
    }
    let filtered_witness_value = partial_transpose(&filtered, dims)?.quadratic_form(&phi_n)?.re;
    if !(filtered_witness_value < 0.0) {
        return Err(Error::FilterFailed { value: filtered_witness_value });
    }
    let lambda = antisymmetric_weight(&filtered, d)?.re;
    // rounding can push the weight marginally outside [0, 1]
    let state = StandardState::from_lambda(d, lambda.clamp(0.0, 1.0))?;
    Ok(FilterOutcome { state, filter, filtered, filtered_witness_value })
}
