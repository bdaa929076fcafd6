//! Schmidt-rank-2 vectors and the functionals evaluated on them.
//!
//! All operators here are in the grouped layout: Alice's `N` factors form
//! one space of dimension `d^N`, Bob's another (see [`SplitOperator`]).

use alloc::vec::Vec;

use crate::bipartite::{contract_alice, contract_bob, BipartiteDims, SplitOperator};
use crate::eigen::hermitian_spectrum;
use crate::error::{Error, Result};
use crate::linalg::{self, tensor_power, Cholesky, ComplexMatrix, C64, ZERO};
use crate::math;
use crate::random::SeededRng;
use crate::werner::ProjectorSet;

/// `R = (Q_d - β P_d)^{⊗N}`, unnormalized, in the grouped layout.
pub fn witness_operator(d: usize, beta: f64, copies: usize) -> Result<SplitOperator> {
    if copies == 0 {
        return Err(Error::InvalidArgument("copy count must be positive"));
    }
    let p = ProjectorSet::new(d)?;
    let mut one = p.complement.clone();
    one.add_scaled(&p.max_ent, C64::new(-beta, 0.0));
    let dims = BipartiteDims::new(d, d, copies)?;
    let grouped = dims.regroup(&tensor_power(&one, copies)?)?;
    SplitOperator::new(grouped, dims.alice_total(), dims.bob_total())
}

/// `a |e1⟩|f1⟩ + b |e2⟩|f2⟩` with orthonormal pairs and `|a|² + |b|² = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rank2Vector {
    pub a: C64,
    pub b: C64,
    pub e1: Vec<C64>,
    pub e2: Vec<C64>,
    pub f1: Vec<C64>,
    pub f2: Vec<C64>,
}

impl Rank2Vector {
    pub const TOL: f64 = 1e-10;

    pub fn new(a: C64, b: C64, e1: Vec<C64>, e2: Vec<C64>, f1: Vec<C64>, f2: Vec<C64>) -> Result<Self> {
        let v = Self { a, b, e1, e2, f1, f2 };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        if self.e1.len() != self.e2.len() {
            return Err(Error::DimensionMismatch { expected: self.e1.len(), found: self.e2.len() });
        }
        if self.f1.len() != self.f2.len() {
            return Err(Error::DimensionMismatch { expected: self.f1.len(), found: self.f2.len() });
        }
        let defect = self.defect();
        if defect > Self::TOL {
            return Err(Error::NotOrthonormal { deviation: defect });
        }
        Ok(())
    }

    /// Largest violation of the normalization and orthonormality constraints.
    pub fn defect(&self) -> f64 {
        let coef = math::abs(self.a.norm_sqr() + self.b.norm_sqr() - 1.0);
        let alice = crate::bipartite::orthonormality_defect(&[&self.e1, &self.e2]);
        let bob = crate::bipartite::orthonormality_defect(&[&self.f1, &self.f2]);
        coef.max(alice).max(bob)
    }

    pub fn alice_dim(&self) -> usize {
        self.e1.len()
    }

    pub fn bob_dim(&self) -> usize {
        self.f1.len()
    }

    /// Dense grouped vector `Ψ`.
    pub fn to_vector(&self) -> Vec<C64> {
        let mut v = linalg::kron_vec(&self.e1, &self.f1);
        for z in v.iter_mut() {
            *z *= self.a;
        }
        linalg::axpy(&mut v, self.b, &linalg::kron_vec(&self.e2, &self.f2));
        v
    }

    /// Random draw: Haar-random orthonormal pairs on each side and a uniformly
    /// random unit coefficient pair `(a, b)`.
    pub fn random(alice_dim: usize, bob_dim: usize, rng: &mut SeededRng) -> Self {
        let coef = rng.unit_vector(2);
        let mut e = rng.orthonormal_vectors(alice_dim, 2);
        let mut f = rng.orthonormal_vectors(bob_dim, 2);
        let (e2, e1) = (e.pop().unwrap(), e.pop().unwrap());
        let (f2, f1) = (f.pop().unwrap(), f.pop().unwrap());
        Self { a: coef[0], b: coef[1], e1, e2, f1, f2 }
    }

    /// Schmidt form of a grouped vector of Schmidt rank exactly 2 (after
    /// normalization). Coefficients are real, `a ≥ b > 0`.
    pub fn from_vector(psi: &[C64], alice_dim: usize, bob_dim: usize) -> Result<Self> {
        let mut psi = psi.to_vec();
        if linalg::normalize(&mut psi) == 0.0 {
            return Err(Error::InvalidArgument("zero vector"));
        }
        let s = crate::twirl::schmidt_decompose(&psi, alice_dim, bob_dim)?;
        match s.coefficients.len() {
            0 | 1 => Err(Error::ProductVector),
            2 => {
                let mut alice = s.alice.into_iter();
                let mut bob = s.bob.into_iter();
                Ok(Self {
                    a: C64::new(s.coefficients[0], 0.0),
                    b: C64::new(s.coefficients[1], 0.0),
                    e1: alice.next().unwrap(),
                    e2: alice.next().unwrap(),
                    f1: bob.next().unwrap(),
                    f2: bob.next().unwrap(),
                })
            }
            _ => Err(Error::InvalidArgument("vector has Schmidt rank above 2")),
        }
    }
}

/// `⟨Ψ|R|Ψ⟩` for a grouped operator.
pub fn witness_value(r: &SplitOperator, psi: &Rank2Vector) -> Result<f64> {
    if psi.alice_dim() != r.alice_dim {
        return Err(Error::DimensionMismatch { expected: r.alice_dim, found: psi.alice_dim() });
    }
    if psi.bob_dim() != r.bob_dim {
        return Err(Error::DimensionMismatch { expected: r.bob_dim, found: psi.bob_dim() });
    }
    Ok(r.matrix.quadratic_form(&psi.to_vector())?.re)
}

/// Blocks of `(E ⊗ 1)† R (E ⊗ 1)` for the frame `(e1, e2)`.
pub(crate) struct FrameBlocks {
    pub r11: ComplexMatrix,
    pub r12: ComplexMatrix,
    pub r21: ComplexMatrix,
    pub r22: ComplexMatrix,
}

impl FrameBlocks {
    pub fn split(m: &ComplexMatrix, bob_dim: usize) -> Self {
        let (a, b) = (0..bob_dim, bob_dim..2 * bob_dim);
        Self {
            r11: m.block(a.clone(), a.clone()),
            r12: m.block(a.clone(), b.clone()),
            r21: m.block(b.clone(), a),
            r22: m.block(b.clone(), b),
        }
    }

    /// `⟨e2|F(λ0)|e2⟩ = R22 - R21 (R11 - λ0)^{-1} R12` and the solve `(R11 - λ0)^{-1} R12`.
    pub fn schur(&self, lambda0: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let chol = resolvent(&self.r11, lambda0)?;
        let y = chol.solve(&self.r12)?;
        let s = (&self.r22 - &self.r21.matmul(&y)?).hermitian_part();
        Ok((s, y))
    }
}

/// Cholesky factor of `R11 - λ0`, which must be positive definite.
pub(crate) fn resolvent(r11: &ComplexMatrix, lambda0: f64) -> Result<Cholesky> {
    let mut shifted = r11.clone();
    for i in 0..shifted.rows() {
        shifted[(i, i)] -= C64::new(lambda0, 0.0);
    }
    Cholesky::new(&shifted).map_err(|_| Error::SingularResolvent)
}

/// `F(λ0) = R - R|e1⟩ (⟨e1|R|e1⟩ - λ0)^{-1} ⟨e1|R` on the full grouped space.
///
/// `⟨e1|R|e1⟩` is an operator on Bob's space; for `λ0 ≤ 0` it is positive
/// definite whenever the state has full rank.
pub fn f_operator(r: &SplitOperator, e1: &[C64], lambda0: f64) -> Result<ComplexMatrix> {
    if e1.len() != r.alice_dim {
        return Err(Error::DimensionMismatch { expected: r.alice_dim, found: e1.len() });
    }
    let w = r.apply_alice_frame(&[e1]);
    let r11 = r.frame_adjoint_mul(&[e1], &w).hermitian_part();
    let chol = resolvent(&r11, lambda0)?;
    // R|e1⟩ (R11 - λ0)^{-1} ⟨e1|R = W K^{-1} W†
    let kinv_wt = chol.solve(&w.adjoint())?;
    let correction = w.matmul(&kinv_wt)?;
    Ok((&r.matrix - &correction).hermitian_part())
}

fn frame_blocks(r: &SplitOperator, e1: &[C64], e2: &[C64]) -> Result<(FrameBlocks, ComplexMatrix)> {
    if e1.len() != r.alice_dim || e2.len() != r.alice_dim {
        return Err(Error::DimensionMismatch { expected: r.alice_dim, found: e1.len().min(e2.len()) });
    }
    let (m, w) = r.compress_alice_frame(&[e1, e2]);
    Ok((FrameBlocks::split(&m, r.bob_dim), w))
}

/// Smallest eigenvalue of `⟨e2|F(0)|e2⟩`. A negative value exhibits a
/// Schmidt-rank-2 vector in `span{e1, e2} ⊗ C^{d_B}` with negative
/// expectation; non-negativity for every frame rules one out.
pub fn frame_objective(r: &SplitOperator, e1: &[C64], e2: &[C64]) -> Result<f64> {
    let defect = crate::bipartite::orthonormality_defect(&[e1, e2]);
    if defect > Rank2Vector::TOL {
        return Err(Error::NotOrthonormal { deviation: defect });
    }
    let (blocks, _) = frame_blocks(r, e1, e2)?;
    let (s, _) = blocks.schur(0.0)?;
    Ok(hermitian_spectrum(&s)?.min_value())
}

/// Largest norm residual of the four stationarity conditions
/// `⟨e_i|R|Ψ⟩ = λ0 c_i |f_i⟩` and `⟨f_i|R|Ψ⟩ = λ0 c_i |e_i⟩` (partial
/// contractions), with `c_1 = a`, `c_2 = b`.
pub fn stationarity_residual(r: &SplitOperator, psi: &Rank2Vector, lambda0: f64) -> Result<f64> {
    if psi.alice_dim() != r.alice_dim || psi.bob_dim() != r.bob_dim {
        return Err(Error::DimensionMismatch { expected: r.alice_dim * r.bob_dim, found: psi.alice_dim() * psi.bob_dim() });
    }
    let rpsi = r.matrix.mul_vec(&psi.to_vector())?;
    let mut worst: f64 = 0.0;
    for (c, e, f) in [(psi.a, &psi.e1, &psi.f1), (psi.b, &psi.e2, &psi.f2)] {
        let mut lhs = contract_alice(&rpsi, e, r.bob_dim);
        linalg::axpy(&mut lhs, -(c * lambda0), f);
        worst = worst.max(linalg::norm(&lhs));
        let mut lhs = contract_bob(&rpsi, f, r.alice_dim);
        linalg::axpy(&mut lhs, -(c * lambda0), e);
        worst = worst.max(linalg::norm(&lhs));
    }
    Ok(worst)
}

/// Sampled upper bound on the minimum of `⟨Ψ|R|Ψ⟩` over Schmidt-rank-2 vectors.
///
/// Each sample draws a Haar-random Alice 2-frame and minimizes exactly over
/// the remaining freedom, which is the smallest eigenvalue of the compressed
/// operator `(E⊗1)† R (E⊗1)`. Uniform draws of all six components would
/// need far more samples to get near the minimum.
pub fn brute_force_witness(r: &SplitOperator, samples: usize, rng: &mut SeededRng) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample"));
    }
    let mut best = f64::INFINITY;
    for _ in 0..samples {
        let frame = rng.orthonormal_vectors(r.alice_dim, 2);
        let (m, _) = r.compress_alice_frame(&[&frame[0], &frame[1]]);
        best = best.min(hermitian_spectrum(&m)?.min_value());
    }
    Ok(best)
}

/// Analytic one-copy witness `(|0,0⟩ + |1,1⟩)/√2`, negative exactly when
/// `β > d/2 - 1`.
pub fn two_level_witness(d: usize) -> Rank2Vector {
    let unit = |k: usize| {
        let mut v = alloc::vec![ZERO; d];
        v[k] = C64::new(1.0, 0.0);
        v
    };
    let s = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    Rank2Vector { a: s, b: s, e1: unit(0), e2: unit(1), f1: unit(0), f2: unit(1) }
}
