//! Cyclic Jacobi eigensolver for dense complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `X[p][q]` with a
//! diagonal unitary and then applies the usual real symmetric Jacobi rotation.
//! Matrices in this crate stay below ~1000 rows, so O(n³) per sweep is fine.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};
use crate::math;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenConfig {
    /// Accepted `max |X_ij - conj(X_ji)|`, relative to `max(1, max |X_ij|)`.
    pub hermitian_tol: f64,
    /// Stop once the off-diagonal Frobenius mass is below `convergence * ‖X‖_F`.
    pub convergence: f64,
    pub max_sweeps: usize,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self { hermitian_tol: 1e-10, convergence: 1e-12, max_sweeps: 100 }
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianSpectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    /// Gap between the two smallest eigenvalues (infinite for 1×1).
    pub fn lowest_gap(&self) -> f64 {
        if self.values.len() < 2 {
            f64::INFINITY
        } else {
            self.values[1] - self.values[0]
        }
    }

    /// `Σ λ_k |v_k⟩⟨v_k|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let v = self.vector(k);
            out.add_scaled(&ComplexMatrix::projector(&v), C64::new(self.values[k], 0.0));
        }
        out
    }
}

pub fn hermitian_spectrum(x: &ComplexMatrix) -> Result<HermitianSpectrum> {
    hermitian_spectrum_with(x, &EigenConfig::default())
}

pub fn hermitian_spectrum_with(x: &ComplexMatrix, config: &EigenConfig) -> Result<HermitianSpectrum> {
    let n = x.require_square()?;
    let deviation = x.hermitian_deviation();
    if deviation > config.hermitian_tol * x.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let mut a = x.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let target = config.convergence * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..config.max_sweeps {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(Error::NonConvergence { sweeps: config.max_sweeps });
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps the solver's index order for ties
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        fix_phase(&mut col);
        for (i, z) in col.into_iter().enumerate() {
            vectors[(i, k)] = z;
        }
    }
    Ok(HermitianSpectrum { values, vectors })
}

/// Smallest eigenvalue and its eigenvector.
pub fn min_eigenpair(x: &ComplexMatrix) -> Result<(f64, Vec<C64>)> {
    let s = hermitian_spectrum(x)?;
    Ok((s.values[0], s.vector(0)))
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    math::sqrt(acc)
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = math::cnorm(apq);
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // skip pivots that are negligible next to both diagonal entries
    if mag < 1e-300 || (math::abs(app) + mag == math::abs(app) && math::abs(aqq) + mag == math::abs(aqq)) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + math::sqrt(1.0 + tau * tau))
    } else {
        -1.0 / (-tau + math::sqrt(1.0 + tau * tau))
    };
    let c = 1.0 / math::sqrt(1.0 + t * t);
    let s = t * c;
    // W = diag(1, conj(phase)) · [[c, s], [-s, c]] acting on columns p, q
    let wpp = C64::new(c, 0.0);
    let wpq = C64::new(s, 0.0);
    let wqp = -phase.conj() * s;
    let wqq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * wpp + akq * wqp;
        a[(k, q)] = akp * wpq + akq * wqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = wpp.conj() * apk + wqp.conj() * aqk;
        a[(q, k)] = wpq.conj() * apk + wqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * wpp + vkq * wqp;
        v[(k, q)] = vkp * wpq + vkq * wqq;
    }
}

/// Rotates the global phase so the first non-negligible entry is real positive.
fn fix_phase(v: &mut [C64]) {
    let max = v.iter().map(|&z| math::cnorm(z)).fold(0.0, f64::max);
    if let Some(&pivot) = v.iter().find(|&&z| math::cnorm(z) > 1e-8 * max) {
        let ph = math::phase(pivot).conj();
        for z in v.iter_mut() {
            *z *= ph;
        }
    }
}
