//! Closed-form thresholds and certified undistillability bounds in `β`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// `d/2 - 1`: one copy is distillable iff `β` exceeds it.
pub fn one_distillable_threshold(d: usize) -> f64 {
    d as f64 / 2.0 - 1.0
}

pub fn one_distillable(d: usize, beta: f64) -> bool {
    beta > one_distillable_threshold(d)
}

/// One-copy threshold in terms of the antisymmetric weight: `3(d-1) / (2(2d-1))`.
pub fn lambda_threshold(d: usize) -> f64 {
    let d = d as f64;
    3.0 * (d - 1.0) / (2.0 * (2.0 * d - 1.0))
}

/// Which argument a certified bound comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundSource {
    /// `β ≤ d/2 - 1`, exact for one copy.
    OneCopyThreshold,
    /// `β ≤ (d-2)/4` for two copies.
    TwoCopyQuarter,
    /// `β ≤ min(β̃_N, β̃_N^{1/N})` for `N ≥ 3`.
    GeneralTilde,
    /// Large-`N` estimate for `d = 3`; never used as a certificate.
    Asymptotic,
}

/// Certified bound for one `(d, N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundEntry {
    pub d: usize,
    pub copies: usize,
    /// `N` copies are undistillable for every `0 < β ≤ certified_beta_bound`.
    pub certified_beta_bound: f64,
    pub source: BoundSource,
    /// `β̃_N = (d-2)^N / ((d+1)^N - (d-1)^N)`.
    pub tilde_beta: f64,
    /// `a_k = 2 C(N,k) d^{N-k} / (d-2)^N` for `k = 0..=N`; the odd-`k` terms
    /// sum to `1/β̃_N`.
    pub a_k: Vec<f64>,
    /// The looser `4^{-N}` statement available for `d = 3`.
    pub simplified_bound: Option<f64>,
}

/// `β̃_N = (d-2)^N / ((d+1)^N - (d-1)^N)`.
pub fn tilde_beta(d: usize, copies: usize) -> f64 {
    let (d, n) = (d as f64, copies as i32);
    math::powi(d - 2.0, n) / (math::powi(d + 1.0, n) - math::powi(d - 1.0, n))
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Best certified undistillability bound for `copies` copies in dimension `d ≥ 3`.
pub fn certified_undistillable_bound(d: usize, copies: usize) -> Result<BoundEntry> {
    if d < 3 {
        return Err(Error::InvalidArgument("undistillability bounds need d >= 3; for d = 2 every NPPT state is distillable"));
    }
    if copies == 0 {
        return Err(Error::InvalidArgument("copy count must be positive"));
    }
    let df = d as f64;
    let tilde = tilde_beta(d, copies);
    let (bound, source) = match copies {
        1 => (one_distillable_threshold(d), BoundSource::OneCopyThreshold),
        2 => ((df - 2.0) / 4.0, BoundSource::TwoCopyQuarter),
        n => (tilde.min(math::powf(tilde, 1.0 / n as f64)), BoundSource::GeneralTilde),
    };
    let scale = math::powi(df - 2.0, copies as i32);
    let a_k = (0..=copies)
        .map(|k| 2.0 * binomial(copies, k) * math::powi(df, (copies - k) as i32) / scale)
        .collect();
    let simplified_bound = (d == 3).then(|| math::powi(4.0, -(copies as i32)));
    Ok(BoundEntry { d, copies, certified_beta_bound: bound, source, tilde_beta: tilde, a_k, simplified_bound })
}

/// Certified bounds for `N = 1..=max_copies` in a fixed dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundTable {
    pub d: usize,
    pub entries: Vec<BoundEntry>,
}

impl BoundTable {
    /// Bounds for `N = 1..=max_copies`; empty for `d = 2`, where no NPPT
    /// member is undistillable.
    pub fn standard(d: usize, max_copies: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument("local dimension must be at least 2"));
        }
        if d == 2 {
            return Ok(Self::empty(d));
        }
        let entries = (1..=max_copies).map(|n| certified_undistillable_bound(d, n)).collect::<Result<_>>()?;
        Ok(Self { d, entries })
    }

    pub fn empty(d: usize) -> Self {
        Self { d, entries: Vec::new() }
    }

    pub fn entry(&self, copies: usize) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.copies == copies)
    }

    /// Largest `N ≥ 2` in the table whose certified bound covers `beta`.
    pub fn certified_copies(&self, beta: f64) -> Option<usize> {
        self.entries
            .iter()
            .filter(|e| e.copies >= 2 && beta <= e.certified_beta_bound)
            .map(|e| e.copies)
            .max()
    }
}

/// Large-`N` estimate `β_N ≈ x*/(3^{N/3} N^{1/3})` for `d = 3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticBound {
    pub copies: usize,
    /// `x* = 3 (1 - 3^{-1/3})^{1/3}`.
    pub x_star: f64,
    pub beta_asymptotic: f64,
    /// Always false: the finite-`N` constant is only known up to `1 - O(1/N)`.
    pub certified: bool,
}

pub fn asymptotic_bound(copies: usize) -> Result<AsymptoticBound> {
    if copies == 0 {
        return Err(Error::InvalidArgument("copy count must be positive"));
    }
    let x_star = 3.0 * math::cbrt(1.0 - 1.0 / math::cbrt(3.0));
    let n = copies as f64;
    let beta_asymptotic = x_star / (math::powf(3.0, n / 3.0) * math::cbrt(n));
    Ok(AsymptoticBound { copies, x_star, beta_asymptotic, certified: false })
}

/// `β_k = (k/d)(β_d + 1) - 1`: the parameter after compressing both sides
/// onto a `k`-dimensional subspace, `2 ≤ k < d`.
pub fn reduce_dimension_beta(d: usize, k: usize, beta: f64) -> Result<f64> {
    if k < 2 || k >= d {
        return Err(Error::InvalidArgument("subspace dimension must satisfy 2 <= k < d"));
    }
    Ok(k as f64 / d as f64 * (beta + 1.0) - 1.0)
}

/// Antisymmetric weight of `𝒟(ρ^{⊗N})` on `d^N ⊗ d^N` given the one-copy
/// weight: `(1 - (1 - 2λ)^N) / 2`.
pub fn lambda_many_copies(lambda: f64, copies: usize) -> f64 {
    (1.0 - math::powi(1.0 - 2.0 * lambda, copies as i32)) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certified_bound_examples() {
        let b = certified_undistillable_bound(3, 2).unwrap();
        assert_eq!(b.certified_beta_bound, 0.25);
        assert_eq!(b.source, BoundSource::TwoCopyQuarter);
        let b = certified_undistillable_bound(3, 3).unwrap();
        assert!((b.certified_beta_bound - 1.0 / 56.0).abs() < 1e-15);
        assert!((b.tilde_beta - 1.0 / 56.0).abs() < 1e-15);
        assert_eq!(b.simplified_bound, Some(1.0 / 64.0));
        assert_eq!(certified_undistillable_bound(4, 2).unwrap().certified_beta_bound, 0.5);
        assert_eq!(certified_undistillable_bound(3, 1).unwrap().certified_beta_bound, 0.5);
        assert!(certified_undistillable_bound(2, 2).is_err());
    }

    #[test]
    fn a_k_odd_sum_inverts_tilde() {
        for d in 3..=6 {
            for n in 1..=6 {
                let b = certified_undistillable_bound(d, n).unwrap();
                let odd: f64 = b.a_k.iter().skip(1).step_by(2).sum();
                assert!((odd * b.tilde_beta - 1.0).abs() < 1e-12, "d={d} n={n}");
            }
        }
        let b = certified_undistillable_bound(3, 3).unwrap();
        assert_eq!(b.a_k, alloc::vec![54.0, 54.0, 18.0, 2.0]);
    }

    #[test]
    fn d3_tilde_closed_form() {
        for n in 1..=8 {
            let want = 1.0 / (4f64.powi(n as i32) - 2f64.powi(n as i32));
            assert!((tilde_beta(3, n) - want).abs() < 1e-15);
            // the simplified statement is weaker than the tilde bound
            assert!(4f64.powi(-(n as i32)) <= tilde_beta(3, n));
        }
    }

    #[test]
    fn asymptotic_bound_examples() {
        let b1 = asymptotic_bound(1).unwrap();
        assert!((b1.x_star - 2.0231).abs() < 1e-4);
        assert!((b1.beta_asymptotic - b1.x_star / 3f64.cbrt()).abs() < 1e-15);
        let b3 = asymptotic_bound(3).unwrap();
        assert!((b3.beta_asymptotic - 0.4676).abs() < 1e-4);
        for n in 1..10 {
            assert!(asymptotic_bound(n + 1).unwrap().beta_asymptotic < asymptotic_bound(n).unwrap().beta_asymptotic);
        }
        assert!(!b3.certified);
    }

    #[test]
    fn reduce_dimension_examples() {
        assert!(reduce_dimension_beta(3, 2, 0.5).unwrap().abs() < 1e-15);
        let eps = 1e-3;
        let b = reduce_dimension_beta(3, 2, 2.0 - eps).unwrap();
        assert!((b - (1.0 - eps * 2.0 / 3.0)).abs() < 1e-14);
        assert!(reduce_dimension_beta(4, 4, 0.1).is_err());
        assert!(reduce_dimension_beta(4, 1, 0.1).is_err());
    }

    #[test]
    fn many_copy_weight() {
        for n in 1..6 {
            assert!((lambda_many_copies(0.5, n) - 0.5).abs() < 1e-15);
        }
        assert!((lambda_many_copies(0.6, 2) - 0.48).abs() < 1e-15);
        assert!((lambda_threshold(3) - 0.6).abs() < 1e-15);
        assert!(one_distillable(3, 0.51));
        assert!(!one_distillable(3, 0.5));
        assert!(!one_distillable(4, 0.9));
    }

    #[test]
    fn table_lookup() {
        let t = BoundTable::standard(3, 4).unwrap();
        assert_eq!(t.certified_copies(0.25), Some(2));
        assert_eq!(t.certified_copies(0.26), None);
        assert_eq!(t.certified_copies(1.0 / 56.0), Some(3));
        assert!(BoundTable::standard(2, 3).unwrap().entries.is_empty());
    }
}
