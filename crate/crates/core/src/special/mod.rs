//! Bessel functions, the A_n/B_n cutoff splitting and iterated Fresnel integrals.

pub mod bessel;
pub mod fresnel;
pub mod splitting;

pub use bessel::{bessel_j, BesselOrder};
pub use fresnel::{fresnel_xi, recorded_constants};
pub use splitting::{
    alpha_coeffs, cutoff_chi, k_max, splitting_a, splitting_b, splitting_residual, SplittingCoeffs,
};

use crate::error::Result;

/// One row of the `special dump` table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DumpRow {
    pub z: f64,
    pub a: f64,
    pub b_re: f64,
    pub b_im: f64,
    /// NaN where the residual is undefined (z < 2 or K above K_max(z)).
    pub residual: f64,
}

pub fn dump(n: usize, k: usize, zs: &[f64]) -> Result<Vec<DumpRow>> {
    let coeffs = alpha_coeffs(n, k)?;
    zs.iter()
        .map(|&z| {
            let b = splitting::splitting_b_with(&coeffs, z);
            Ok(DumpRow {
                z,
                a: splitting_a(n, z)?,
                b_re: b.re,
                b_im: b.im,
                residual: splitting_residual(n, k, z).unwrap_or(f64::NAN),
            })
        })
        .collect()
}
