//! The `U ⊗ U`-invariant family `ρ_α = (S_d + α A_d) / N(α)` on `C^d ⊗ C^d`,
//! the projectors it is built from, and the α/β/λ parameter algebra.
//!
//! Internally a member of the family is identified by `β`, the coordinate in
//! which the partial transpose reads `ρ^{T_A} = (Q_d - β P_d) / M(β)` and in
//! which every distillability threshold is stated. α and λ are derived views.

use alloc::vec::Vec;

use crate::bipartite::{partial_transpose, BipartiteDims};
use crate::distill::bounds::BoundTable;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ONE, ZERO};
use crate::math;

/// Swap `Π`, antisymmetric `A = (1-Π)/2`, symmetric `S = 1-A`, maximally
/// entangled `P = |Φ_d⟩⟨Φ_d|` and its complement `Q = 1-P`.
#[derive(Clone, Debug)]
pub struct ProjectorSet {
    pub d: usize,
    pub swap: ComplexMatrix,
    pub antisym: ComplexMatrix,
    pub sym: ComplexMatrix,
    pub max_ent: ComplexMatrix,
    pub complement: ComplexMatrix,
}

impl ProjectorSet {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument("local dimension must be at least 2"));
        }
        let swap = swap_operator(d);
        let id = ComplexMatrix::identity(d * d);
        let antisym = (&id - &swap).scale(0.5);
        let sym = &id - &antisym;
        let max_ent = ComplexMatrix::projector(&max_entangled(d));
        let complement = &id - &max_ent;
        Ok(Self { d, swap, antisym, sym, max_ent, complement })
    }

    pub fn trace_antisym(&self) -> f64 {
        trace_antisym(self.d)
    }

    pub fn trace_sym(&self) -> f64 {
        trace_sym(self.d)
    }
}

/// `tr(A_d) = d(d-1)/2`.
pub fn trace_antisym(d: usize) -> f64 {
    (d * (d - 1)) as f64 / 2.0
}

/// `tr(S_d) = d(d+1)/2`.
pub fn trace_sym(d: usize) -> f64 {
    (d * (d + 1)) as f64 / 2.0
}

/// `Π |i,j⟩ = |j,i⟩`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(j * d + i, i * d + j)] = ONE;
        }
    }
    m
}

/// `|Φ_d⟩ = d^{-1/2} Σ_i |i,i⟩`.
pub fn max_entangled(d: usize) -> Vec<C64> {
    assert!(d >= 1, "dimension must be positive");
    let mut v = alloc::vec![ZERO; d * d];
    let amp = C64::new(1.0 / math::sqrt(d as f64), 0.0);
    for i in 0..d {
        v[i * d + i] = amp;
    }
    v
}

/// Basis of `C^d ⊗ C^d` adapted to the swap: `φ^±_{ij} = (|i,j⟩ ± |j,i⟩)/√2`
/// for `i < j` and `χ_k = |k,k⟩`.
#[derive(Clone, Debug)]
pub struct PairBasis {
    pub d: usize,
    /// `(i, j, φ^-_{ij})` for `i < j`.
    pub phi_minus: Vec<(usize, usize, Vec<C64>)>,
    /// `(i, j, φ^+_{ij})` for `i < j`.
    pub phi_plus: Vec<(usize, usize, Vec<C64>)>,
    pub chi: Vec<Vec<C64>>,
}

impl PairBasis {
    pub fn new(d: usize) -> Self {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let mut phi_minus = Vec::new();
        let mut phi_plus = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                let mut plus = alloc::vec![ZERO; d * d];
                let mut minus = alloc::vec![ZERO; d * d];
                plus[i * d + j] = C64::new(s, 0.0);
                plus[j * d + i] = C64::new(s, 0.0);
                minus[i * d + j] = C64::new(s, 0.0);
                minus[j * d + i] = C64::new(-s, 0.0);
                phi_plus.push((i, j, plus));
                phi_minus.push((i, j, minus));
            }
        }
        let chi = (0..d)
            .map(|k| {
                let mut v = alloc::vec![ZERO; d * d];
                v[k * d + k] = ONE;
                v
            })
            .collect();
        Self { d, phi_minus, phi_plus, chi }
    }

    /// All `d²` basis vectors: antisymmetric ones first, then `φ^+`, then `χ`.
    pub fn vectors(&self) -> Vec<&[C64]> {
        self.phi_minus
            .iter()
            .map(|(_, _, v)| v.as_slice())
            .chain(self.phi_plus.iter().map(|(_, _, v)| v.as_slice()))
            .chain(self.chi.iter().map(Vec::as_slice))
            .collect()
    }

    /// Unitary whose columns are [`Self::vectors`].
    pub fn unitary(&self) -> ComplexMatrix {
        let cols: Vec<Vec<C64>> = self.vectors().into_iter().map(<[C64]>::to_vec).collect();
        ComplexMatrix::from_columns(&cols).expect("basis vectors share a length")
    }

    /// `X` expressed in this basis.
    pub fn represent(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.unitary().adjoint_mul(&x.matmul(&self.unitary())?)
    }

    /// Frobenius norm of the off-diagonal part of `X` in this basis.
    pub fn off_diagonal_mass(&self, x: &ComplexMatrix) -> Result<f64> {
        let m = self.represent(x)?;
        let n = m.rows();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += m[(i, j)].norm_sqr();
                }
            }
        }
        Ok(math::sqrt(acc))
    }

    /// Diagonal entries `⟨φ^-_{ij}|X|φ^-_{ij}⟩` in basis order.
    pub fn antisymmetric_weights(&self, x: &ComplexMatrix) -> Result<Vec<f64>> {
        self.phi_minus.iter().map(|(_, _, v)| Ok(x.quadratic_form(v)?.re)).collect()
    }
}

/// `β = [(α-1)(d-1) - 2] / (α+1)`; the `α → ∞` limit gives `d - 1`.
pub fn alpha_to_beta(d: usize, alpha: f64) -> f64 {
    let d = d as f64;
    if alpha == f64::INFINITY {
        return d - 1.0;
    }
    ((alpha - 1.0) * (d - 1.0) - 2.0) / (alpha + 1.0)
}

/// Inverse of [`alpha_to_beta`]: `α = (d+1+β)/(d-1-β)`.
pub fn beta_to_alpha(d: usize, beta: f64) -> Result<f64> {
    let (min, max) = beta_range(d);
    if !(beta >= min && beta < max) {
        return Err(Error::BetaOutOfRange { beta, min, max });
    }
    let d = d as f64;
    Ok((d + 1.0 + beta) / (d - 1.0 - beta))
}

/// `λ = tr(A_d ρ_α) = (d-1)α / ((d+1) + (d-1)α)`.
pub fn lambda_of_alpha(d: usize, alpha: f64) -> f64 {
    if alpha == f64::INFINITY {
        return 1.0;
    }
    let d = d as f64;
    (d - 1.0) * alpha / ((d + 1.0) + (d - 1.0) * alpha)
}

/// Attainable β for `α ∈ [0, ∞)`: `[-(d+1), d-1)`.
pub fn beta_range(d: usize) -> (f64, f64) {
    (-(d as f64 + 1.0), d as f64 - 1.0)
}

/// Member of the family, stored by `β`.
///
/// `β = d - 1` is admitted only as the `α → ∞` limit `A_d / tr(A_d)` (the
/// normalised antisymmetric projector), which local filtering can produce;
/// [`StandardState::from_beta`] keeps the half-open range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StandardState {
    d: usize,
    beta: f64,
}

impl StandardState {
    pub fn from_beta(d: usize, beta: f64) -> Result<Self> {
        check_dim(d)?;
        beta_to_alpha(d, beta)?;
        Ok(Self { d, beta })
    }

    /// `alpha` may be `f64::INFINITY` for the antisymmetric limit.
    pub fn from_alpha(d: usize, alpha: f64) -> Result<Self> {
        check_dim(d)?;
        if !(alpha >= 0.0) {
            return Err(Error::AlphaOutOfRange { alpha });
        }
        Ok(Self { d, beta: alpha_to_beta(d, alpha) })
    }

    /// From the antisymmetric weight `λ ∈ [0, 1]`.
    pub fn from_lambda(d: usize, lambda: f64) -> Result<Self> {
        check_dim(d)?;
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument("antisymmetric weight must lie in [0, 1]"));
        }
        if lambda == 1.0 {
            return Self::antisymmetric_limit(d);
        }
        let df = d as f64;
        let alpha = lambda * (df + 1.0) / ((df - 1.0) * (1.0 - lambda));
        Self::from_alpha(d, alpha)
    }

    /// `A_d / tr(A_d)`, i.e. `β = d - 1`.
    pub fn antisymmetric_limit(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Self { d, beta: d as f64 - 1.0 })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_limit(&self) -> bool {
        self.beta >= self.d as f64 - 1.0
    }

    pub fn alpha(&self) -> f64 {
        if self.is_limit() {
            f64::INFINITY
        } else {
            beta_to_alpha(self.d, self.beta).expect("beta validated on construction")
        }
    }

    pub fn lambda(&self) -> f64 {
        lambda_of_alpha(self.d, self.alpha())
    }

    /// `N(α) = tr(S_d) + α tr(A_d)`.
    pub fn n_alpha(&self) -> f64 {
        trace_sym(self.d) + self.alpha() * trace_antisym(self.d)
    }

    /// `M(β) = tr(Q_d) - β = d² - 1 - β`.
    pub fn m_beta(&self) -> f64 {
        m_beta(self.d, self.beta)
    }

    pub fn density_matrix(&self) -> ComplexMatrix {
        let p = ProjectorSet::new(self.d).expect("dimension validated");
        if self.is_limit() {
            return p.antisym.scale(1.0 / trace_antisym(self.d));
        }
        let alpha = self.alpha();
        let mut rho = p.sym.clone();
        rho.add_scaled(&p.antisym, C64::new(alpha, 0.0));
        rho.scale(1.0 / self.n_alpha())
    }

    /// `(Q_d - β P_d) / M(β)`, valid on the closed range.
    pub fn partial_transpose(&self) -> ComplexMatrix {
        let p = ProjectorSet::new(self.d).expect("dimension validated");
        let mut out = p.complement.clone();
        out.add_scaled(&p.max_ent, C64::new(-self.beta, 0.0));
        out.scale(1.0 / self.m_beta())
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidArgument("local dimension must be at least 2"))
    } else {
        Ok(())
    }
}

/// `M(β) = d² - 1 - β`.
pub fn m_beta(d: usize, beta: f64) -> f64 {
    (d * d) as f64 - 1.0 - beta
}

/// `ρ_α = (S_d + α A_d) / N(α)`.
pub fn rho_alpha(d: usize, alpha: f64) -> Result<ComplexMatrix> {
    if alpha == f64::INFINITY {
        return Err(Error::AlphaOutOfRange { alpha });
    }
    Ok(StandardState::from_alpha(d, alpha)?.density_matrix())
}

/// `ρ^{T_A} = (Q_d - β P_d) / M(β)` for `β < d - 1`.
pub fn rho_pt(d: usize, beta: f64) -> Result<ComplexMatrix> {
    Ok(StandardState::from_beta(d, beta)?.partial_transpose())
}

/// Partial transpose of `ρ_α` computed by index shuffling, for cross-checks.
pub fn rho_alpha_pt_direct(d: usize, alpha: f64) -> Result<ComplexMatrix> {
    partial_transpose(&rho_alpha(d, alpha)?, BipartiteDims::square(d))
}

/// Position of a family member in the separability/distillability diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// `β ≤ 0`: positive partial transpose, separable.
    Separable,
    /// `β > d/2 - 1`: a single copy already has a Schmidt-rank-2 witness.
    OneDistillable,
    /// NPPT but certified undistillable for `copies ≥ 2` (and hence fewer).
    CertifiedUndistillable { copies: usize },
    /// NPPT, 1-undistillable, and no multi-copy certificate applies.
    UndecidedBand,
}

/// Classifies `β` analytically, consulting `table` for multi-copy certificates.
pub fn classify_region(d: usize, beta: f64, table: &BoundTable) -> Region {
    if beta <= 0.0 {
        Region::Separable
    } else if beta > d as f64 / 2.0 - 1.0 {
        Region::OneDistillable
    } else {
        match table.certified_copies(beta) {
            Some(copies) => Region::CertifiedUndistillable { copies },
            None => Region::UndecidedBand,
        }
    }
}
