//! Bipartite structure on top of [`ComplexMatrix`]: dimensions and copy count,
//! partial transposition, regrouping of many copies into one Alice/Bob split,
//! and compression onto local subspaces.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, kron, ComplexMatrix, C64};
use crate::math;

/// Local dimensions and number of copies.
///
/// For one copy the basis vector `|i⟩_A|j⟩_B` has index `i * bob + j`. For
/// `copies = N` the index is the mixed-radix number
/// `(a_1, b_1, a_2, b_2, …, a_N, b_N)` with copy 1 slowest. Operators in this
/// layout are called *interleaved*; [`BipartiteDims::regroup`] converts them
/// to the *grouped* layout `(a_1 … a_N, b_1 … b_N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BipartiteDims {
    pub alice: usize,
    pub bob: usize,
    pub copies: usize,
}

impl BipartiteDims {
    pub fn new(alice: usize, bob: usize, copies: usize) -> Result<Self> {
        if alice == 0 || bob == 0 || copies == 0 {
            return Err(Error::InvalidArgument("dimensions and copy count must be positive"));
        }
        Ok(Self { alice, bob, copies })
    }

    /// `d ⊗ d`, one copy.
    pub fn square(d: usize) -> Self {
        Self { alice: d, bob: d, copies: 1 }
    }

    pub fn pair_dim(&self) -> usize {
        self.alice * self.bob
    }

    /// `(d_A d_B)^N`.
    pub fn total(&self) -> usize {
        self.pair_dim().pow(self.copies as u32)
    }

    /// `d_A^N`.
    pub fn alice_total(&self) -> usize {
        self.alice.pow(self.copies as u32)
    }

    /// `d_B^N`.
    pub fn bob_total(&self) -> usize {
        self.bob.pow(self.copies as u32)
    }

    /// Single-copy view of the grouped layout.
    pub fn grouped(&self) -> Self {
        Self { alice: self.alice_total(), bob: self.bob_total(), copies: 1 }
    }

    fn check(&self, x: &ComplexMatrix) -> Result<()> {
        let n = x.require_square()?;
        if n != self.total() {
            return Err(Error::DimensionMismatch { expected: self.total(), found: n });
        }
        Ok(())
    }

    /// Contribution of the Alice digits to an interleaved index; the Bob
    /// contribution is `index - alice_code(index)`.
    fn alice_code(&self, mut index: usize) -> usize {
        let mut code = 0;
        let mut place = 1;
        for _ in 0..self.copies {
            index /= self.bob;
            code += (index % self.alice) * self.bob * place;
            index /= self.alice;
            place *= self.pair_dim();
        }
        code
    }

    /// `grouped_to_interleaved[g]` is the interleaved index of grouped index `g`.
    pub fn grouped_to_interleaved(&self) -> Vec<usize> {
        let (alice_total, bob_total) = (self.alice_total(), self.bob_total());
        let mut out = Vec::with_capacity(self.total());
        for a in 0..alice_total {
            let a_digits = digits(a, self.alice, self.copies);
            for b in 0..bob_total {
                let b_digits = digits(b, self.bob, self.copies);
                let mut idx = 0;
                for k in 0..self.copies {
                    idx = idx * self.pair_dim() + a_digits[k] * self.bob + b_digits[k];
                }
                out.push(idx);
            }
        }
        out
    }

    /// Interleaved operator → grouped operator on `C^{d_A^N} ⊗ C^{d_B^N}`.
    pub fn regroup(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check(x)?;
        if self.copies == 1 {
            return Ok(x.clone());
        }
        let perm = self.grouped_to_interleaved();
        Ok(ComplexMatrix::from_fn(x.rows(), x.cols(), |i, j| x[(perm[i], perm[j])]))
    }

    /// Grouped vector → interleaved vector.
    pub fn interleave_vector(&self, grouped: &[C64]) -> Result<Vec<C64>> {
        if grouped.len() != self.total() {
            return Err(Error::DimensionMismatch { expected: self.total(), found: grouped.len() });
        }
        let perm = self.grouped_to_interleaved();
        let mut out = alloc::vec![C64::new(0.0, 0.0); grouped.len()];
        for (g, &v) in grouped.iter().enumerate() {
            out[perm[g]] = v;
        }
        Ok(out)
    }
}

/// Base-`radix` digits of `value`, most significant first.
fn digits(mut value: usize, radix: usize, len: usize) -> Vec<usize> {
    let mut out = alloc::vec![0; len];
    for k in (0..len).rev() {
        out[k] = value % radix;
        value /= radix;
    }
    out
}

/// Partial transpose on every Alice factor (all copies jointly):
/// `⟨i,k|X|j,l⟩ |i,k⟩⟨j,l|  ↦  ⟨i,k|X|j,l⟩ |j,k⟩⟨i,l|`.
pub fn partial_transpose(x: &ComplexMatrix, dims: BipartiteDims) -> Result<ComplexMatrix> {
    dims.check(x)?;
    let n = x.rows();
    let alice_code: Vec<usize> = (0..n).map(|i| dims.alice_code(i)).collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let (ar, br) = (alice_code[r], r - alice_code[r]);
        for c in 0..n {
            let (ac, bc) = (alice_code[c], c - alice_code[c]);
            out[(ac + br, ar + bc)] = x[(r, c)];
        }
    }
    Ok(out)
}

/// Which local factor a compression acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Alice,
    Bob,
    Both,
}

/// Matrix with orthonormal columns mapping `C^k` into `C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    columns: ComplexMatrix,
}

impl Isometry {
    pub const DEFAULT_TOL: f64 = 1e-10;

    pub fn new(columns: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(columns, Self::DEFAULT_TOL)
    }

    pub fn with_tolerance(columns: ComplexMatrix, tol: f64) -> Result<Self> {
        if columns.cols() > columns.rows() || columns.cols() == 0 {
            return Err(Error::InvalidArgument("isometry needs 1 <= target_dim <= source_dim"));
        }
        let gram = columns.adjoint_mul(&columns)?;
        let deviation = gram.distance(&ComplexMatrix::identity(columns.cols()));
        if deviation > tol {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Self { columns })
    }

    pub fn from_vectors(vectors: &[Vec<C64>]) -> Result<Self> {
        Self::new(ComplexMatrix::from_columns(vectors)?)
    }

    /// Embedding of `span{|1⟩, …, |k⟩}` into `C^n`.
    pub fn canonical(source_dim: usize, k: usize) -> Result<Self> {
        let m = ComplexMatrix::from_fn(source_dim, k, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Self::new(m)
    }

    pub fn identity(n: usize) -> Self {
        Self { columns: ComplexMatrix::identity(n) }
    }

    pub fn source_dim(&self) -> usize {
        self.columns.rows()
    }

    pub fn target_dim(&self) -> usize {
        self.columns.cols()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.columns
    }
}

/// `V† X V` with `V` acting on the chosen side(s) of a single-copy split.
/// Multi-copy operators must be regrouped first.
pub fn compress(x: &ComplexMatrix, v: &Isometry, side: Side, dims: BipartiteDims) -> Result<ComplexMatrix> {
    if dims.copies != 1 {
        return Err(Error::InvalidArgument("compress expects a single-copy (grouped) layout"));
    }
    dims.check(x)?;
    let need = |d: usize| {
        if v.source_dim() == d {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: d, found: v.source_dim() })
        }
    };
    let w = match side {
        Side::Alice => {
            need(dims.alice)?;
            kron(v.matrix(), &ComplexMatrix::identity(dims.bob))
        }
        Side::Bob => {
            need(dims.bob)?;
            kron(&ComplexMatrix::identity(dims.alice), v.matrix())
        }
        Side::Both => {
            need(dims.alice)?;
            need(dims.bob)?;
            kron(v.matrix(), v.matrix())
        }
    };
    w.adjoint_mul(&x.matmul(&w)?)
}

/// Dense square operator tagged with its bipartite layout (interleaved).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
    dims: BipartiteDims,
}

impl HermitianOperator {
    pub const HERMITIAN_TOL: f64 = 1e-12;

    pub fn new(matrix: ComplexMatrix, dims: BipartiteDims) -> Result<Self> {
        dims.check(&matrix)?;
        let deviation = matrix.hermitian_deviation();
        if deviation > Self::HERMITIAN_TOL * matrix.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { matrix, dims })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn partial_transpose(&self) -> Self {
        let m = partial_transpose(&self.matrix, self.dims).expect("dims checked on construction");
        Self { matrix: m, dims: self.dims }
    }

    /// Grouped view: one Alice factor of dimension `d_A^N`, one Bob factor of `d_B^N`.
    pub fn split(&self) -> SplitOperator {
        SplitOperator {
            matrix: self.dims.regroup(&self.matrix).expect("dims checked on construction"),
            alice_dim: self.dims.alice_total(),
            bob_dim: self.dims.bob_total(),
        }
    }
}

/// Operator on `C^{alice_dim} ⊗ C^{bob_dim}` in grouped, Alice-major layout.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitOperator {
    pub matrix: ComplexMatrix,
    pub alice_dim: usize,
    pub bob_dim: usize,
}

impl SplitOperator {
    pub fn new(matrix: ComplexMatrix, alice_dim: usize, bob_dim: usize) -> Result<Self> {
        let n = matrix.require_square()?;
        if n != alice_dim * bob_dim {
            return Err(Error::DimensionMismatch { expected: alice_dim * bob_dim, found: n });
        }
        Ok(Self { matrix, alice_dim, bob_dim })
    }

    /// `X (E ⊗ 1_B)` for Alice vectors `e_1 … e_k`; column `i * bob + b`.
    pub fn apply_alice_frame(&self, frame: &[&[C64]]) -> ComplexMatrix {
        let (da, db) = (self.alice_dim, self.bob_dim);
        let n = da * db;
        let mut w = ComplexMatrix::zeros(n, frame.len() * db);
        for r in 0..n {
            let row = self.matrix.row(r);
            for (i, e) in frame.iter().enumerate() {
                for b in 0..db {
                    let mut acc = C64::new(0.0, 0.0);
                    for (alpha, &coef) in e.iter().enumerate() {
                        acc += row[alpha * db + b] * coef;
                    }
                    w[(r, i * db + b)] = acc;
                }
            }
        }
        w
    }

    /// `(E ⊗ 1)† W`, completing the compression started by [`Self::apply_alice_frame`].
    pub fn frame_adjoint_mul(&self, frame: &[&[C64]], w: &ComplexMatrix) -> ComplexMatrix {
        let db = self.bob_dim;
        let k = frame.len();
        let mut m = ComplexMatrix::zeros(k * db, w.cols());
        for (i, e) in frame.iter().enumerate() {
            for (alpha, &coef) in e.iter().enumerate() {
                let c = coef.conj();
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                for b in 0..db {
                    let src = w.row(alpha * db + b);
                    let dst = i * db + b;
                    for (col, &val) in src.iter().enumerate() {
                        m[(dst, col)] += c * val;
                    }
                }
            }
        }
        m
    }

    /// Compression `(E ⊗ 1)† X (E ⊗ 1)` onto an Alice frame, with the
    /// intermediate `X (E ⊗ 1)` returned for gradient evaluations.
    pub fn compress_alice_frame(&self, frame: &[&[C64]]) -> (ComplexMatrix, ComplexMatrix) {
        let w = self.apply_alice_frame(frame);
        let m = self.frame_adjoint_mul(frame, &w).hermitian_part();
        (m, w)
    }
}

/// `Σ_b conj(h_b) v_{α b}`: contracts Bob's index of a grouped vector.
pub fn contract_bob(v: &[C64], h: &[C64], alice_dim: usize) -> Vec<C64> {
    let db = h.len();
    (0..alice_dim).map(|a| linalg::dot(h, &v[a * db..(a + 1) * db])).collect()
}

/// `Σ_α conj(e_α) v_{α b}`: contracts Alice's index of a grouped vector.
pub fn contract_alice(v: &[C64], e: &[C64], bob_dim: usize) -> Vec<C64> {
    let mut out = alloc::vec![C64::new(0.0, 0.0); bob_dim];
    for (alpha, &c) in e.iter().enumerate() {
        linalg::axpy(&mut out, c.conj(), &v[alpha * bob_dim..(alpha + 1) * bob_dim]);
    }
    out
}

/// Coefficient-matrix view of a grouped vector: `C[α][b] = v_{α b}`.
pub fn coefficient_matrix(v: &[C64], alice_dim: usize, bob_dim: usize) -> Result<ComplexMatrix> {
    ComplexMatrix::from_row_major(alice_dim, bob_dim, v.to_vec())
}

/// Maximum `|⟨x_i|x_j⟩ - δ_ij|` over a list of vectors.
pub fn orthonormality_defect(vectors: &[&[C64]]) -> f64 {
    let mut dev: f64 = 0.0;
    for (i, u) in vectors.iter().enumerate() {
        for (j, v) in vectors.iter().enumerate() {
            let want = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            dev = dev.max(math::cnorm(linalg::dot(u, v) - want));
        }
    }
    dev
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::SeededRng;

    fn max_ent_projector(d: usize) -> ComplexMatrix {
        let mut v = alloc::vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            v[i * d + i] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        }
        ComplexMatrix::projector(&v)
    }

    #[test]
    fn pt_of_product_with_real_symmetric_factor_is_unchanged() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| C64::new(1.0 + (i + j) as f64, 0.0));
        let mut rng = SeededRng::new(3, 0);
        let b = rng.random_hermitian(3);
        let x = kron(&a, &b);
        let pt = partial_transpose(&x, BipartiteDims::new(2, 3, 1).unwrap()).unwrap();
        assert!(pt.distance(&x) < 1e-15);
    }

    #[test]
    fn pt_of_two_qubit_max_entangled_has_one_negative_eigenvalue() {
        // direct 4x4 index shuffle oracle
        let p = max_ent_projector(2);
        let mut oracle = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for k in 0..2 {
                for j in 0..2 {
                    for l in 0..2 {
                        oracle[(j * 2 + k, i * 2 + l)] = p[(i * 2 + k, j * 2 + l)];
                    }
                }
            }
        }
        let pt = partial_transpose(&p, BipartiteDims::square(2)).unwrap();
        assert!(pt.distance(&oracle) < 1e-15);
        let s = crate::eigen::hermitian_spectrum(&pt).unwrap();
        let want = [-0.5, 0.5, 0.5, 0.5];
        for (v, w) in s.values.iter().zip(want) {
            assert!((v - w).abs() < 1e-12);
        }
    }

    #[test]
    fn pt_on_many_copies_factorises() {
        let mut rng = SeededRng::new(4, 0);
        let x = rng.random_hermitian(4);
        let y = rng.random_hermitian(4);
        let one = BipartiteDims::square(2);
        let two = BipartiteDims::new(2, 2, 2).unwrap();
        let lhs = partial_transpose(&kron(&x, &y), two).unwrap();
        let rhs = kron(&partial_transpose(&x, one).unwrap(), &partial_transpose(&y, one).unwrap());
        assert!(lhs.distance(&rhs) < 1e-14);
    }

    #[test]
    fn regroup_matches_kron_of_local_operators() {
        // (A1⊗B1)⊗(A2⊗B2) interleaved == (A1⊗A2)⊗(B1⊗B2) grouped
        let mut rng = SeededRng::new(5, 0);
        let (a1, b1, a2, b2) =
            (rng.random_hermitian(2), rng.random_hermitian(3), rng.random_hermitian(2), rng.random_hermitian(3));
        let dims = BipartiteDims::new(2, 3, 2).unwrap();
        let inter = kron(&kron(&a1, &b1), &kron(&a2, &b2));
        let grouped = kron(&kron(&a1, &a2), &kron(&b1, &b2));
        assert!(dims.regroup(&inter).unwrap().distance(&grouped) < 1e-14);
    }

    #[test]
    fn compress_with_identity_is_noop() {
        let mut rng = SeededRng::new(6, 0);
        let x = rng.random_hermitian(6);
        let dims = BipartiteDims::new(2, 3, 1).unwrap();
        for side in [Side::Alice, Side::Bob] {
            let n = if side == Side::Alice { 2 } else { 3 };
            let c = compress(&x, &Isometry::identity(n), side, dims).unwrap();
            assert!(c.distance(&x) < 1e-14);
        }
    }

    #[test]
    fn isometry_rejects_non_orthonormal() {
        let m = ComplexMatrix::from_fn(3, 2, |_, _| C64::new(1.0, 0.0));
        assert!(matches!(Isometry::new(m), Err(Error::NotOrthonormal { .. })));
    }

    #[test]
    fn frame_compression_matches_generic_compress() {
        let mut rng = SeededRng::new(8, 0);
        let x = rng.random_hermitian(12);
        let split = SplitOperator::new(x.clone(), 4, 3).unwrap();
        let frame = rng.orthonormal_vectors(4, 2);
        let refs: Vec<&[C64]> = frame.iter().map(Vec::as_slice).collect();
        let (m, _) = split.compress_alice_frame(&refs);
        let iso = Isometry::from_vectors(&frame).unwrap();
        let direct = compress(&x, &iso, Side::Alice, BipartiteDims::new(4, 3, 1).unwrap()).unwrap();
        assert!(m.distance(&direct) < 1e-13);
    }
}
