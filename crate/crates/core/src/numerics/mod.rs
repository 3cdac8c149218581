//! Shared numerical kernels.

mod bessel;
mod fit;
mod qmc;
mod quadrature;
mod richardson;
mod stencil;

pub use bessel::bessel_i0_scaled;
pub use fit::{powerbasis_fit, PowerFit, MAX_CONDITION};
pub use qmc::ShiftedHalton;
pub use quadrature::{
    adaptive_1d, adaptive_piecewise, gauss_legendre, gauss_legendre_interval, periodic_trapezoid,
    periodic_trapezoid_samples, Integral, QuadratureConfig,
};
pub use richardson::richardson;
pub use stencil::{central_stencil, fornberg_weights};

/// Fixed-order pairwise summation.
///
/// The association order depends only on the slice length, so results are
/// bitwise reproducible regardless of how the inputs were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if xs.len() <= BLOCK {
        let mut s = 0.0;
        for x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `n` geometrically spaced points from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let ratio = (hi / lo).ln() / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo * (ratio * i as f64).exp() })
                .collect()
        }
    }
}
