//! Multi-restart search for a Schmidt-rank-2 vector with `⟨Ψ|R|Ψ⟩ < 0`.
//!
//! Every Schmidt-rank-2 vector lies in `span{e1, e2} ⊗ C^{d_B}` for some
//! orthonormal Alice frame `(e1, e2)`, so the search runs over frames only.
//! Each restart first minimizes the frame objective
//! `μ(E) = min eig ⟨e2|F(0)|e2⟩` (a Schur complement of the compressed
//! operator `M(E) = (E⊗1)† R (E⊗1)`, with the same sign as `min eig M(E)`),
//! then refines the frame by minimizing `min eig M(E)` itself, which is the
//! minimum of `⟨Ψ|R|Ψ⟩` over unit vectors of that frame.
//!
//! Both objectives are smallest eigenvalues of Hermitian matrices depending
//! smoothly on the frame; their gradients follow from the eigenvector at the
//! minimum. Steps are Armijo-backtracked gradient steps followed by
//! Gram-Schmidt re-orthonormalization.

use alloc::vec::Vec;

use crate::bipartite::{contract_bob, SplitOperator};
use crate::distill::witness::{resolvent, stationarity_residual, witness_operator, witness_value, FrameBlocks, Rank2Vector};
use crate::eigen::hermitian_spectrum;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, C64, ZERO};
use crate::math;
use crate::random::SeededRng;
use crate::werner::{beta_range, m_beta};

/// Restriction of the first frame vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryMode {
    Off,
    /// Two copies only: `e1 = Σ_i c_i |i,i⟩` with real `c_i ≥ 0`.
    DiagonalFirstVector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub restarts: usize,
    /// Iteration cap for each of the two stages of a restart.
    pub max_iters: usize,
    /// A restart has converged once the Riemannian gradient norm is below this.
    pub tol: f64,
    pub seed: u64,
    pub symmetry: SymmetryMode,
    /// Required for three copies.
    pub allow_long_run: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { restarts: 20, max_iters: 400, tol: 1e-8, seed: 0, symmetry: SymmetryMode::Off, allow_long_run: false }
    }
}

/// Result of one restart; everything needed to reproduce the reduction.
#[derive(Clone, Debug, PartialEq)]
pub struct RestartOutcome {
    pub index: usize,
    /// `μ` at the end of the first stage.
    pub frame_objective: f64,
    /// `min eig M(E)` at the end of the refinement.
    pub lambda_min: f64,
    pub e1: Vec<C64>,
    pub e2: Vec<C64>,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessResult {
    /// Smallest `⟨Ψ|R|Ψ⟩` found over unit Schmidt-rank-2 vectors.
    pub lambda_min: f64,
    /// Smallest frame objective `μ` found.
    pub frame_objective: f64,
    /// `lambda_min / M(β)^N`, the value for the normalized state.
    pub normalized_lambda: f64,
    /// Root of `min eig ⟨e2|F(λ0)|e2⟩ = λ0`, solved when `lambda_min < 0`.
    pub lambda0: Option<f64>,
    /// Minimizer in Schmidt form; absent if it has Schmidt rank 1.
    pub best_vector: Option<Rank2Vector>,
    pub stationarity_residual: Option<f64>,
    pub restarts_used: usize,
    pub best_restart: usize,
    pub converged: bool,
    /// The two smallest eigenvalues of `M(E)` at the minimizer are closer than `1e-9`.
    pub degenerate: bool,
}

pub const DEGENERACY_GAP: f64 = 1e-9;
const TIE_TOL: f64 = 1e-12;
const ARMIJO: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Objective {
    Schur,
    Compressed,
}

struct Evaluation {
    value: f64,
    /// Euclidean gradients with respect to `e1` and `e2`.
    grad: [Vec<C64>; 2],
}

/// A configured search over one `(d, β, N)`.
#[derive(Clone, Debug)]
pub struct WitnessSearch {
    pub d: usize,
    pub beta: f64,
    pub copies: usize,
    pub config: SearchConfig,
    r: SplitOperator,
}

impl WitnessSearch {
    pub fn new(d: usize, beta: f64, copies: usize, config: SearchConfig) -> Result<Self> {
        if !(1..=3).contains(&copies) {
            return Err(Error::InvalidArgument("witness search supports 1 to 3 copies"));
        }
        if copies == 3 && !config.allow_long_run {
            return Err(Error::LongRunRequired { copies });
        }
        if config.symmetry == SymmetryMode::DiagonalFirstVector && copies != 2 {
            return Err(Error::InvalidArgument("the diagonal restriction applies to two copies only"));
        }
        if config.restarts == 0 || config.max_iters == 0 {
            return Err(Error::InvalidArgument("restarts and max_iters must be positive"));
        }
        if !(config.tol > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive"));
        }
        let (min, max) = beta_range(d);
        if !(beta >= min && beta < max) {
            return Err(Error::BetaOutOfRange { beta, min, max });
        }
        let r = witness_operator(d, beta, copies)?;
        Ok(Self { d, beta, copies, config, r })
    }

    pub fn operator(&self) -> &SplitOperator {
        &self.r
    }

    pub fn run(&self) -> Result<WitnessResult> {
        let outcomes = (0..self.config.restarts).map(|i| self.run_restart(i)).collect::<Result<Vec<_>>>()?;
        self.finish(&outcomes)
    }

    /// Runs restart `index` from its own random stream `(seed, index)`.
    pub fn run_restart(&self, index: usize) -> Result<RestartOutcome> {
        let mut rng = SeededRng::new(self.config.seed, index as u64);
        let (mut e1, mut e2) = self.initial_frame(&mut rng);
        let stage1 = self.descend(&mut e1, &mut e2, Objective::Schur)?;
        let stage2 = self.descend(&mut e1, &mut e2, Objective::Compressed)?;
        Ok(RestartOutcome {
            index,
            frame_objective: stage1.value,
            lambda_min: stage2.value,
            e1,
            e2,
            iterations: stage1.iterations + stage2.iterations,
            gradient_norm: stage2.gradient_norm,
            converged: stage1.converged && stage2.converged,
        })
    }

    /// Reduces restart outcomes (in any order) to the final result: the
    /// smallest `lambda_min` wins, ties within `1e-12` go to the lowest index.
    pub fn finish(&self, outcomes: &[RestartOutcome]) -> Result<WitnessResult> {
        let mut sorted: Vec<&RestartOutcome> = outcomes.iter().collect();
        sorted.sort_by_key(|o| o.index);
        let mut best: Option<&RestartOutcome> = None;
        for o in &sorted {
            match best {
                Some(b) if o.lambda_min >= b.lambda_min - TIE_TOL => {}
                _ => best = Some(o),
            }
        }
        let best = best.ok_or(Error::InvalidArgument("no restart outcomes to reduce"))?;
        let frame_objective = sorted.iter().map(|o| o.frame_objective).fold(f64::INFINITY, f64::min);

        let (m, _) = self.r.compress_alice_frame(&[&best.e1, &best.e2]);
        let spec = hermitian_spectrum(&m)?;
        let lambda_min = spec.min_value();
        let db = self.r.bob_dim;

        let (h, lambda0) = if lambda_min < 0.0 {
            let blocks = FrameBlocks::split(&m, db);
            let lambda0 = self.solve_lambda0(&blocks, &m)?;
            let (s, y) = blocks.schur(lambda0)?;
            let g = hermitian_spectrum(&s)?.vector(0);
            let x1 = y.mul_vec(&g)?;
            let mut h: Vec<C64> = x1.into_iter().map(|z| -z).collect();
            h.extend_from_slice(&g);
            (h, Some(lambda0))
        } else {
            (spec.vector(0), None)
        };
        let mut psi = linalg::kron_vec(&best.e1, &h[..db]);
        linalg::axpy(&mut psi, C64::new(1.0, 0.0), &linalg::kron_vec(&best.e2, &h[db..]));
        let best_vector = match Rank2Vector::from_vector(&psi, self.r.alice_dim, db) {
            Ok(v) => Some(v),
            Err(Error::ProductVector) => None,
            Err(e) => return Err(e),
        };
        let stationarity = match &best_vector {
            Some(v) => Some(stationarity_residual(&self.r, v, witness_value(&self.r, v)?)?),
            None => None,
        };
        Ok(WitnessResult {
            lambda_min,
            frame_objective,
            normalized_lambda: lambda_min / math::powi(m_beta(self.d, self.beta), self.copies as i32),
            lambda0,
            best_vector,
            stationarity_residual: stationarity,
            restarts_used: outcomes.len(),
            best_restart: best.index,
            converged: best.converged,
            degenerate: spec.lowest_gap() < DEGENERACY_GAP,
        })
    }

    /// Bisection for the root of `min eig S(λ0) - λ0` on `[lower, 0]`, where
    /// `lower` is a Gershgorin lower bound for the spectrum of `M`. The
    /// function is strictly decreasing, non-negative at `lower` and equal to
    /// `μ < 0` at zero.
    fn solve_lambda0(&self, blocks: &FrameBlocks, m: &ComplexMatrix) -> Result<f64> {
        let n = m.rows();
        let mut lower: f64 = 0.0;
        for i in 0..n {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| math::cnorm(m[(i, j)])).sum();
            lower = lower.min(m[(i, i)].re - off);
        }
        let f = |l: f64| -> Result<f64> { Ok(hermitian_spectrum(&blocks.schur(l)?.0)?.min_value() - l) };
        let (mut lo, mut hi) = (lower, 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid)? >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    fn initial_frame(&self, rng: &mut SeededRng) -> (Vec<C64>, Vec<C64>) {
        let da = self.r.alice_dim;
        match self.config.symmetry {
            SymmetryMode::Off => {
                let mut f = rng.orthonormal_vectors(da, 2);
                let e2 = f.pop().unwrap();
                (f.pop().unwrap(), e2)
            }
            SymmetryMode::DiagonalFirstVector => {
                let c: Vec<f64> = (0..self.d).map(|_| math::abs(rng.normal())).collect();
                let e1 = self.diagonal_vector(&c);
                let mut e2 = rng.gaussian_vector(da);
                linalg::orthonormalize_against(&mut e2, &[&e1]);
                (e1, e2)
            }
        }
    }

    /// `Σ_i c_i |i,i⟩ / |c|` on Alice's two-copy space.
    fn diagonal_vector(&self, c: &[f64]) -> Vec<C64> {
        let d = self.d;
        let mut e = alloc::vec![ZERO; d * d];
        for (i, &ci) in c.iter().enumerate() {
            e[i * d + i] = C64::new(ci, 0.0);
        }
        linalg::normalize(&mut e);
        e
    }

    fn evaluate(&self, e1: &[C64], e2: &[C64], objective: Objective) -> Result<Evaluation> {
        let db = self.r.bob_dim;
        let (m, w) = self.r.compress_alice_frame(&[e1, e2]);
        let (value, h) = match objective {
            Objective::Compressed => {
                let spec = hermitian_spectrum(&m)?;
                (spec.min_value(), spec.vector(0))
            }
            Objective::Schur => {
                let blocks = FrameBlocks::split(&m, db);
                let chol = resolvent(&blocks.r11, 0.0)?;
                let y = chol.solve(&blocks.r12)?;
                let s = (&blocks.r22 - &blocks.r21.matmul(&y)?).hermitian_part();
                let spec = hermitian_spectrum(&s)?;
                let g = spec.vector(0);
                let x1 = y.mul_vec(&g)?;
                let mut h: Vec<C64> = x1.into_iter().map(|z| -z).collect();
                h.extend_from_slice(&g);
                (spec.min_value(), h)
            }
        };
        // value = ⟨Ψ|R|Ψ⟩ with Ψ = e1⊗h1 + e2⊗h2 stationary in (h1, h2), so
        // d value = 2 Re Σ_i ⟨(1⊗h_i†) R Ψ | δe_i⟩
        let rpsi = w.mul_vec(&h)?;
        let da = self.r.alice_dim;
        let g1: Vec<C64> = contract_bob(&rpsi, &h[..db], da).into_iter().map(|z| z * 2.0).collect();
        let g2: Vec<C64> = contract_bob(&rpsi, &h[db..], da).into_iter().map(|z| z * 2.0).collect();
        Ok(Evaluation { value, grad: [g1, g2] })
    }

    /// Tangent direction for the current parameterization.
    ///
    /// The frame is parameterized by a unit `e1` (in the diagonal mode by its
    /// coefficient vector `c`) and an ambient `z` with
    /// `e2 = normalize(z - e1⟨e1|z⟩)`, evaluated at `z = e2`. Returns the
    /// descent directions for `e1` (or `c`) and `z` and the squared norm.
    fn direction(&self, e1: &[C64], e2: &[C64], grad: &[Vec<C64>; 2]) -> (Vec<C64>, Vec<C64>, f64) {
        let (g1, g2) = (&grad[0], &grad[1]);
        // chain rule through the normalization of e2 and its orthogonalization against e1
        let mut q = g2.clone();
        linalg::axpy(&mut q, -C64::new(linalg::dot(e2, g2).re, 0.0), e2);
        let mut gz = q.clone();
        linalg::axpy(&mut gz, -linalg::dot(e1, &q), e1);
        let mut ge1 = g1.clone();
        linalg::axpy(&mut ge1, -linalg::dot(g2, e1), e2);

        let xi1 = match self.config.symmetry {
            SymmetryMode::Off => {
                let mut xi = ge1;
                let radial = linalg::dot(e1, &xi).re;
                linalg::axpy(&mut xi, C64::new(-radial, 0.0), e1);
                xi
            }
            SymmetryMode::DiagonalFirstVector => {
                let d = self.d;
                let c: Vec<f64> = (0..d).map(|i| e1[i * d + i].re).collect();
                let gc: Vec<f64> = (0..d).map(|i| ge1[i * d + i].re).collect();
                let proj: f64 = c.iter().zip(&gc).map(|(a, b)| a * b).sum();
                (0..d)
                    .map(|i| {
                        let xi = gc[i] - c[i] * proj;
                        // stay on the face c_i = 0 rather than leave the feasible set
                        if c[i] <= 0.0 && xi > 0.0 {
                            ZERO
                        } else {
                            C64::new(xi, 0.0)
                        }
                    })
                    .collect()
            }
        };
        let norm2 = xi1.iter().chain(&gz).map(|z| z.norm_sqr()).sum();
        (xi1, gz, norm2)
    }

    fn retract(&self, e1: &[C64], e2: &[C64], xi1: &[C64], gz: &[C64], t: f64) -> (Vec<C64>, Vec<C64>) {
        let step = C64::new(-t, 0.0);
        let new_e1 = match self.config.symmetry {
            SymmetryMode::Off => {
                let mut v = e1.to_vec();
                linalg::axpy(&mut v, step, xi1);
                linalg::normalize(&mut v);
                v
            }
            SymmetryMode::DiagonalFirstVector => {
                let d = self.d;
                let mut c: Vec<f64> = (0..d).map(|i| (e1[i * d + i].re - t * xi1[i].re).max(0.0)).collect();
                if c.iter().all(|&x| x == 0.0) {
                    c = (0..d).map(|i| e1[i * d + i].re).collect();
                }
                self.diagonal_vector(&c)
            }
        };
        let mut z = e2.to_vec();
        linalg::axpy(&mut z, step, gz);
        if linalg::orthonormalize_against(&mut z, &[&new_e1]) < 1e-300 {
            z = e2.to_vec();
            linalg::orthonormalize_against(&mut z, &[&new_e1]);
        }
        (new_e1, z)
    }

    fn descend(&self, e1: &mut Vec<C64>, e2: &mut Vec<C64>, objective: Objective) -> Result<Descent> {
        let mut eval = self.evaluate(e1, e2, objective)?;
        let mut t_prev: Option<f64> = None;
        let mut stall = 0;
        for iter in 0..self.config.max_iters {
            let (xi1, gz, norm2) = self.direction(e1, e2, &eval.grad);
            let gnorm = math::sqrt(norm2);
            if gnorm <= self.config.tol {
                return Ok(Descent { value: eval.value, iterations: iter, gradient_norm: gnorm, converged: true });
            }
            // cap the first trial step at a displacement of 1/2 in each frame vector
            let cap = 0.5 / gnorm;
            let mut t = t_prev.map_or(cap, |tp| (2.0 * tp).min(cap));
            let mut accepted = None;
            for _ in 0..60 {
                let (n1, n2) = self.retract(e1, e2, &xi1, &gz, t);
                let trial = self.evaluate(&n1, &n2, objective)?;
                if trial.value <= eval.value - ARMIJO * t * norm2 {
                    accepted = Some((n1, n2, trial));
                    break;
                }
                t *= 0.5;
            }
            let Some((n1, n2, trial)) = accepted else {
                return Ok(Descent { value: eval.value, iterations: iter, gradient_norm: gnorm, converged: false });
            };
            let gain = eval.value - trial.value;
            *e1 = n1;
            *e2 = n2;
            eval = trial;
            t_prev = Some(t);
            if gain <= 1e-15 * eval.value.abs().max(1.0) {
                stall += 1;
                if stall >= 25 {
                    let (_, _, norm2) = self.direction(e1, e2, &eval.grad);
                    let gnorm = math::sqrt(norm2);
                    return Ok(Descent { value: eval.value, iterations: iter + 1, gradient_norm: gnorm, converged: gnorm <= self.config.tol });
                }
            } else {
                stall = 0;
            }
        }
        let (_, _, norm2) = self.direction(e1, e2, &eval.grad);
        let gnorm = math::sqrt(norm2);
        Ok(Descent {
            value: eval.value,
            iterations: self.config.max_iters,
            gradient_norm: gnorm,
            converged: gnorm <= self.config.tol,
        })
    }
}

struct Descent {
    value: f64,
    iterations: usize,
    gradient_norm: f64,
    converged: bool,
}

/// Convenience wrapper: configure, run all restarts, reduce.
pub fn witness_search(d: usize, beta: f64, copies: usize, config: &SearchConfig) -> Result<WitnessResult> {
    WitnessSearch::new(d, beta, copies, config.clone())?.run()
}
