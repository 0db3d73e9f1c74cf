//! Crank–Nicolson time stepping of i ψ_t + ψ_rr + (n-1)/r ψ_r = 0.
//!
//! Cell-centred finite volumes on r_j = (j + 1/2) h with exact shell volumes,
//! so the discrete flow is unitary in Σ V_j |ψ_j|² away from the sponge layer.

use super::profile::{RadialProfile, Support};
use super::{ComplexAmplitude, EvalPoint};
use crate::error::{Error, Result};
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleGrid {
    pub r_domain: f64,
    pub cells: usize,
    /// Time step as a multiple of h.
    pub dt_over_h: f64,
    /// Combine runs at h and h/2 to cancel the O(h²) error.
    pub richardson: bool,
    /// Largest radial frequency that must not reach the sponge before time t.
    pub max_frequency: f64,
}

impl Default for OracleGrid {
    fn default() -> Self {
        OracleGrid {
            r_domain: 0.0,
            cells: 1 << 13,
            dt_over_h: 0.25,
            richardson: true,
            max_frequency: 24.0,
        }
    }
}

impl OracleGrid {
    /// Domain sized so that frequencies up to `max_frequency` stay clear of the sponge.
    pub fn for_profile(profile: &RadialProfile, t: f64) -> Result<Self> {
        let hi = match profile.support() {
            Support::Compact { hi, .. } => hi,
            Support::Tail { .. } => {
                return Err(Error::OutOfRange(
                    "the oracle needs compactly supported data".into(),
                ));
            }
        };
        let g = OracleGrid::default();
        let reach = hi + 2.0 * t * (g.max_frequency + profile.omega().abs());
        Ok(OracleGrid {
            r_domain: (4.0 * hi).max(reach * 8.0 / 7.0),
            ..g
        })
    }
}

/// Discrete field at time t.
#[derive(Debug, Clone)]
pub struct OracleField {
    pub h: f64,
    pub psi: Vec<Complex64>,
    pub volumes: Vec<f64>,
    pub initial_mass: f64,
    pub final_mass: f64,
}

impl OracleField {
    pub fn r(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.h
    }

    pub fn mass_drift(&self) -> f64 {
        (self.final_mass - self.initial_mass).abs() / self.initial_mass
    }

    /// Four-point Lagrange interpolation at radius x.
    pub fn interpolate(&self, x: f64) -> Complex64 {
        let s = x / self.h - 0.5;
        let j0 = (s.floor() as isize - 1).clamp(0, self.psi.len() as isize - 4) as usize;
        let mut acc = ZERO;
        for i in 0..4 {
            let mut w = 1.0;
            for m in 0..4 {
                if m != i {
                    w *= (s - (j0 + m) as f64) / (i as f64 - m as f64);
                }
            }
            acc += self.psi[j0 + i] * w;
        }
        acc
    }
}

fn mass(psi: &[Complex64], vol: &[f64]) -> f64 {
    psi.iter().zip(vol).map(|(p, v)| p.norm_sqr() * v).sum()
}

/// Runs the stepper with `cells` cells up to time t.
pub fn oracle_field(
    profile: &RadialProfile,
    n: usize,
    t: f64,
    r_domain: f64,
    cells: usize,
    dt_over_h: f64,
) -> Result<OracleField> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if !(t > 0.0 && r_domain > 0.0 && cells >= 16) {
        return Err(Error::OutOfRange(format!(
            "bad oracle setup t={t} R={r_domain} cells={cells}"
        )));
    }
    let nf = n as f64;
    let h = r_domain / cells as f64;
    let steps = (t / (dt_over_h * h)).ceil() as usize;
    let dt = t / steps as f64;
    let face = |j: usize| -> f64 { (j as f64 * h).powf(nf - 1.0) / h };
    let volumes: Vec<f64> = (0..cells)
        .map(|j| (((j + 1) as f64 * h).powf(nf) - (j as f64 * h).powf(nf)) / nf)
        .collect();
    let sponge_start = r_domain * 7.0 / 8.0;
    let width = r_domain - sponge_start;
    let gamma: Vec<f64> = (0..cells)
        .map(|j| {
            let r = (j as f64 + 0.5) * h;
            if r > sponge_start {
                20.0 * ((r - sponge_start) / width).powi(2)
            } else {
                0.0
            }
        })
        .collect();
    // S symmetric: S_jj = -(f_{j+1} + f_j), S_{j,j+1} = f_{j+1}, with f_0 = 0 and ψ_N = 0.
    let off: Vec<f64> = (0..cells).map(|j| face(j + 1)).collect();
    let diag_s: Vec<f64> = (0..cells).map(|j| -(face(j + 1) + face(j))).collect();
    let i = Complex64::new(0.0, 1.0);
    let half = 0.5 * dt;
    // LHS = V(1 + half γ) - i half S ; RHS = V(1 - half γ) + i half S
    let lhs_diag: Vec<Complex64> = (0..cells)
        .map(|j| Complex64::new(volumes[j] * (1.0 + half * gamma[j]), 0.0) - i * (half * diag_s[j]))
        .collect();
    let lhs_off: Vec<Complex64> = off.iter().map(|&o| -i * (half * o)).collect();
    // Thomas factorisation
    let mut cprime = vec![ZERO; cells];
    let mut denom = vec![ZERO; cells];
    denom[0] = lhs_diag[0];
    cprime[0] = lhs_off[0] / denom[0];
    for j in 1..cells {
        denom[j] = lhs_diag[j] - lhs_off[j - 1] * cprime[j - 1];
        cprime[j] = lhs_off[j] / denom[j];
    }
    let mut psi: Vec<Complex64> = (0..cells)
        .map(|j| profile.datum((j as f64 + 0.5) * h))
        .collect();
    let initial_mass = mass(&psi, &volumes);
    let mut rhs = vec![ZERO; cells];
    for _ in 0..steps {
        for j in 0..cells {
            let mut s = psi[j] * diag_s[j];
            if j > 0 {
                s += psi[j - 1] * off[j - 1];
            }
            if j + 1 < cells {
                s += psi[j + 1] * off[j];
            }
            rhs[j] = psi[j] * (volumes[j] * (1.0 - half * gamma[j])) + i * s * half;
        }
        // forward sweep then back substitution
        psi[0] = rhs[0] / denom[0];
        for j in 1..cells {
            psi[j] = (rhs[j] - lhs_off[j - 1] * psi[j - 1]) / denom[j];
        }
        for j in (0..cells - 1).rev() {
            psi[j] = psi[j] - cprime[j] * psi[j + 1];
        }
    }
    let final_mass = mass(&psi, &volumes);
    Ok(OracleField {
        h,
        psi,
        volumes,
        initial_mass,
        final_mass,
    })
}

/// Mass lost to the sponge above which the domain is reported as too small.
pub const MAX_ABSORBED: f64 = 1e-2;

/// Result of an oracle evaluation together with its conservation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub amplitude: ComplexAmplitude,
    pub mass_drift: f64,
}

pub fn evolve_oracle_report(
    profile: &RadialProfile,
    pt: EvalPoint,
    grid: OracleGrid,
) -> Result<OracleReport> {
    let run = |cells: usize| -> Result<(Complex64, f64)> {
        let f = oracle_field(profile, pt.n, pt.t, grid.r_domain, cells, grid.dt_over_h)?;
        if f.mass_drift() > MAX_ABSORBED {
            return Err(Error::DomainTooSmall(format!(
                "relative mass loss {:.3e} at t={} with R={}",
                f.mass_drift(),
                pt.t,
                grid.r_domain
            )));
        }
        if pt.x_abs > grid.r_domain * 7.0 / 8.0 {
            return Err(Error::DomainTooSmall(format!(
                "x={} lies in the sponge layer",
                pt.x_abs
            )));
        }
        Ok((f.interpolate(pt.x_abs), f.mass_drift()))
    };
    let (coarse, drift) = run(grid.cells)?;
    if !grid.richardson {
        return Ok(OracleReport {
            amplitude: ComplexAmplitude {
                value: coarse,
                err_est: f64::NAN,
            },
            mass_drift: drift,
        });
    }
    let (fine, drift_fine) = run(2 * grid.cells)?;
    let value = (fine * 4.0 - coarse) / 3.0;
    let err_est = (fine - coarse).norm() / 3.0;
    Ok(OracleReport {
        amplitude: ComplexAmplitude { value, err_est },
        mass_drift: drift.max(drift_fine),
    })
}

pub fn evolve_oracle(
    profile: &RadialProfile,
    pt: EvalPoint,
    grid: OracleGrid,
) -> Result<ComplexAmplitude> {
    evolve_oracle_report(profile, pt, grid).map(|r| r.amplitude)
}
