//! Scalar math routed through `libm` so the crate builds without `std`.

use crate::linalg::C64;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn cbrt(x: f64) -> f64 {
    libm::cbrt(x)
}

#[inline]
pub(crate) fn cnorm(z: C64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// `exp(i theta)`.
#[inline]
pub(crate) fn cis(theta: f64) -> C64 {
    C64::new(libm::cos(theta), libm::sin(theta))
}

/// Unit-modulus phase of `z`, or 1 when `z` vanishes.
#[inline]
pub(crate) fn phase(z: C64) -> C64 {
    let r = cnorm(z);
    if r == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        z / r
    }
}
