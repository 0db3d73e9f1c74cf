//! Radial initial data φ(x) = φ_ω(|x|) e^{iω|x|}.
//!
//! A profile is a built-in envelope family, a linear carrier frequency ω, a
//! complex amplitude and a dilation. Unbounded families describe their tail as
//! a finite sum of analytic amplitudes times e^{i(c r + d r²)}, which is what
//! the contour-rotated quadrature consumes.

use crate::error::{Error, Result};
use crate::jet::{factorial, Jet, JET_LEN};
use crate::special::bessel::{bessel_j_unchecked, reduced_bessel_jet};
use crate::special::splitting::{
    alpha_coeffs, splitting_a_reduced, splitting_a_reduced_jet, splitting_b_jet, splitting_b_with,
    SplittingCoeffs,
};
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

pub type AmpFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;
pub type CustomFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Truncation used for the Bessel tail of the Herglotz datum in even dimensions.
pub const HERGLOTZ_TAIL_K: usize = 30;
/// Argument beyond which the even-dimensional Bessel expansion is used.
pub const ASYMPTOTIC_Z: f64 = 25.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One analytic tail piece `amplitude(r) e^{i(carrier r + chirp r²)}`, valid on
/// r ≥ the profile's tail start. `power` is the growth exponent of |amplitude|.
#[derive(Clone)]
pub struct TailTerm {
    pub amplitude: AmpFn,
    pub carrier: f64,
    pub chirp: f64,
    pub power: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    /// Envelope vanishes outside [lo, hi].
    Compact { lo: f64, hi: f64 },
    /// Envelope vanishes below `lo`; the tail terms represent it on [start, ∞).
    Tail { lo: f64, start: f64 },
}

impl Support {
    pub fn lo(&self) -> f64 {
        match *self {
            Support::Compact { lo, .. } | Support::Tail { lo, .. } => lo,
        }
    }
}

#[derive(Clone)]
pub enum Family {
    /// exp(-1/((r-a)(b-r)) + 4/(b-a)²) on (a, b), peak value 1.
    Bump {
        a: f64,
        b: f64,
    },
    Gaussian {
        width: f64,
    },
    /// (1+r)^{-α}
    Power {
        alpha: f64,
    },
    /// e^{ir}(1+r)^{-α}
    OscPower {
        alpha: f64,
    },
    /// r^{(2-n)/2} J_{(n-2)/2}(ωr)
    Herglotz {
        n: usize,
        omega: f64,
    },
    /// η_ω (or its conjugate) from the Herglotz decomposition.
    HerglotzEnvelope {
        n: usize,
        omega: f64,
        coeffs: SplittingCoeffs,
        conjugate: bool,
    },
    /// e^{-ir²/4} 1_{r≥1} r^{-σ}
    Chirp {
        sigma: f64,
    },
    /// r^{-σ} on (0, ∞)
    PurePower {
        sigma: f64,
    },
    /// User envelope supported in [0, hi]; derivatives by central differences.
    Custom {
        f: CustomFn,
        hi: f64,
    },
    /// Σ of full data φ_i(r) = φ_{ω_i}(r) e^{iω_i r}, as an envelope with carrier 0.
    Sum(Vec<RadialProfile>),
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Bump { a, b } => write!(f, "bump(a={a}, b={b})"),
            Family::Gaussian { width } => write!(f, "gaussian(w={width})"),
            Family::Power { alpha } => write!(f, "power(alpha={alpha})"),
            Family::OscPower { alpha } => write!(f, "osc_power(alpha={alpha})"),
            Family::Herglotz { n, omega } => write!(f, "herglotz(n={n}, omega={omega})"),
            Family::HerglotzEnvelope {
                n,
                omega,
                coeffs,
                conjugate,
            } => write!(
                f,
                "herglotz_envelope(n={n}, omega={omega}, K={}, conj={conjugate})",
                coeffs.k
            ),
            Family::Chirp { sigma } => write!(f, "chirp(sigma={sigma})"),
            Family::PurePower { sigma } => write!(f, "pure_power(sigma={sigma})"),
            Family::Custom { hi, .. } => write!(f, "custom(hi={hi})"),
            Family::Sum(parts) => {
                let labels: Vec<String> = parts.iter().map(|p| p.label()).collect();
                write!(f, "sum[{}]", labels.join(" + "))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct RadialProfile {
    family: Family,
    omega: f64,
    amplitude: Complex64,
    dilation: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl RadialProfile {
    fn new(family: Family) -> Self {
        RadialProfile {
            family,
            omega: 0.0,
            amplitude: Complex64::new(1.0, 0.0),
            dilation: 1.0,
        }
    }

    pub fn bump(a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0 && b > a) {
            return Err(Error::OutOfRange(format!(
                "bump needs 0 <= a < b, got [{a}, {b}]"
            )));
        }
        Ok(Self::new(Family::Bump { a, b }))
    }

    pub fn gaussian(width: f64) -> Result<Self> {
        positive("gaussian width", width)?;
        Ok(Self::new(Family::Gaussian { width }))
    }

    pub fn power(alpha: f64) -> Result<Self> {
        positive("power exponent", alpha)?;
        Ok(Self::new(Family::Power { alpha }))
    }

    pub fn osc_power(alpha: f64) -> Result<Self> {
        positive("power exponent", alpha)?;
        Ok(Self::new(Family::OscPower { alpha }))
    }

    pub fn herglotz(n: usize, omega: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        positive("Herglotz frequency", omega)?;
        Ok(Self::new(Family::Herglotz { n, omega }))
    }

    /// η_ω (carrier +ω) or its conjugate (carrier -ω) for |ω| > 0.
    pub fn herglotz_envelope(n: usize, omega: f64, k: usize, conjugate: bool) -> Result<Self> {
        if omega == 0.0 || !omega.is_finite() {
            return Err(Error::OutOfRange(format!(
                "Herglotz decomposition needs omega != 0, got {omega}"
            )));
        }
        let w = omega.abs();
        let coeffs = alpha_coeffs(n, k)?;
        let carrier = if conjugate { -w } else { w };
        Ok(Self::new(Family::HerglotzEnvelope {
            n,
            omega: w,
            coeffs,
            conjugate,
        })
        .with_carrier(carrier))
    }

    pub fn chirp(sigma: f64) -> Result<Self> {
        if !sigma.is_finite() {
            return Err(Error::OutOfRange(format!("invalid exponent {sigma}")));
        }
        Ok(Self::new(Family::Chirp { sigma }))
    }

    pub fn pure_power(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite()) {
            return Err(Error::OutOfRange(format!("invalid exponent {sigma}")));
        }
        Ok(Self::new(Family::PurePower { sigma }))
    }

    pub fn custom(f: CustomFn, hi: f64) -> Result<Self> {
        positive("custom support radius", hi)?;
        Ok(Self::new(Family::Custom { f, hi }))
    }

    /// Σ of the full data of `parts`. The result has carrier 0.
    pub fn sum(parts: Vec<RadialProfile>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::OutOfRange("empty profile sum".into()));
        }
        Ok(Self::new(Family::Sum(parts)))
    }

    pub fn with_carrier(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_amplitude(mut self, amplitude: Complex64) -> Self {
        self.amplitude = amplitude;
        self
    }

    /// The profile of r ↦ φ(λ r).
    pub fn dilate(mut self, lambda: f64) -> Self {
        self.dilation *= lambda;
        self.omega *= lambda;
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude
    }

    pub fn dilation(&self) -> f64 {
        self.dilation
    }

    pub fn label(&self) -> String {
        format!("{:?}", self.family)
    }

    /// φ_ω(r)
    pub fn envelope(&self, r: f64) -> Complex64 {
        self.amplitude * base_value(&self.family, self.dilation * r)
    }

    /// φ_rad(r) = φ_ω(r) e^{iωr}
    pub fn datum(&self, r: f64) -> Complex64 {
        self.envelope(r) * Complex64::from_polar(1.0, self.omega * r)
    }

    /// Rate c of a quadratic phase e^{icr²} shared by the whole datum.
    pub fn chirp_rate(&self) -> f64 {
        match self.family {
            Family::Chirp { .. } => -0.25 * self.dilation * self.dilation,
            _ => 0.0,
        }
    }

    /// φ_rad(r) e^{-icr²} with c = [`Self::chirp_rate`], formed without the chirp.
    pub fn dechirped(&self, r: f64) -> Complex64 {
        match self.family {
            Family::Chirp { sigma } => {
                let s = self.dilation * r;
                if s >= 1.0 {
                    self.amplitude * Complex64::from_polar(s.powf(-sigma), self.omega * r)
                } else {
                    ZERO
                }
            }
            _ => self.datum(r),
        }
    }

    /// Jet of φ_ω at the expansion point of `r`.
    pub fn envelope_jet(&self, r: Jet) -> Jet {
        base_jet(&self.family, r * self.dilation).scale(self.amplitude)
    }

    /// k-th derivative of φ_ω at r.
    pub fn envelope_derivative(&self, r: f64, k: usize) -> Complex64 {
        self.envelope_jet(Jet::variable(r, 1.0)).derivative(k)
    }

    pub fn support(&self) -> Support {
        let l = self.dilation;
        match base_support(&self.family) {
            Support::Compact { lo, hi } => Support::Compact {
                lo: lo / l,
                hi: hi / l,
            },
            Support::Tail { lo, start } => Support::Tail {
                lo: lo / l,
                start: start / l,
            },
        }
    }

    pub fn is_compact(&self) -> bool {
        matches!(self.support(), Support::Compact { .. })
    }

    /// Exponent p with |φ_ω(r)| ~ r^p as r → 0 when the envelope is singular there.
    pub fn origin_power(&self) -> Option<f64> {
        match self.family {
            Family::PurePower { sigma } if sigma > 0.0 => Some(-sigma),
            _ => None,
        }
    }

    /// Tail representation of φ_ω (carrier ω not included).
    pub fn tail_terms(&self) -> Vec<TailTerm> {
        let l = self.dilation;
        let amp = self.amplitude;
        base_tail(&self.family)
            .into_iter()
            .map(|t| {
                let inner = t.amplitude.clone();
                TailTerm {
                    amplitude: Arc::new(move |r: Complex64| amp * inner(r * l)),
                    carrier: t.carrier * l,
                    chirp: t.chirp * l * l,
                    power: t.power,
                }
            })
            .collect()
    }
}

fn base_support(family: &Family) -> Support {
    match family {
        Family::Bump { a, b } => Support::Compact { lo: *a, hi: *b },
        Family::Gaussian { width } => Support::Compact {
            lo: 0.0,
            hi: width * 45f64.sqrt(),
        },
        Family::Power { .. } | Family::OscPower { .. } => Support::Tail {
            lo: 0.0,
            start: 0.0,
        },
        Family::Herglotz { n, omega } => {
            let z = if n % 2 == 1 { 1.0 } else { ASYMPTOTIC_Z };
            Support::Tail {
                lo: 0.0,
                start: z / omega,
            }
        }
        Family::HerglotzEnvelope { omega, .. } => Support::Tail {
            lo: 0.0,
            start: 1.0 / omega,
        },
        Family::Chirp { .. } => Support::Tail {
            lo: 1.0,
            start: 1.0,
        },
        Family::PurePower { .. } => Support::Tail {
            lo: 0.0,
            start: 1.0,
        },
        Family::Custom { hi, .. } => Support::Compact { lo: 0.0, hi: *hi },
        Family::Sum(parts) => {
            let supports: Vec<Support> = parts.iter().map(|p| p.support()).collect();
            let lo = supports
                .iter()
                .map(|s| s.lo())
                .fold(f64::INFINITY, f64::min);
            let mut hi = 0.0f64;
            let mut start: Option<f64> = None;
            for s in &supports {
                match *s {
                    Support::Compact { hi: h, .. } => hi = hi.max(h),
                    Support::Tail { start: st, .. } => {
                        start = Some(start.map_or(st, |v: f64| v.max(st)))
                    }
                }
            }
            match start {
                None => Support::Compact { lo, hi },
                Some(st) => Support::Tail {
                    lo,
                    start: st.max(hi),
                },
            }
        }
    }
}

fn bump_exponent(a: f64, b: f64, r: f64) -> f64 {
    -1.0 / ((r - a) * (b - r)) + 4.0 / ((b - a) * (b - a))
}

fn herglotz_envelope_value(
    n: usize,
    omega: f64,
    coeffs: &SplittingCoeffs,
    conjugate: bool,
    r: f64,
) -> Complex64 {
    let z = omega * r;
    let nf = n as f64;
    let a_part = Complex64::from_polar(0.5 * omega.powf(nf - 1.0) * splitting_a_reduced(n, z), -z);
    let b = splitting_b_with(coeffs, z);
    let b_part = if b == ZERO {
        ZERO
    } else {
        b * r.powf(1.0 - nf)
    };
    let v = (a_part + b_part) * omega.powf(-nf / 2.0);
    if conjugate {
        v.conj()
    } else {
        v
    }
}

fn base_value(family: &Family, r: f64) -> Complex64 {
    let re = |v: f64| Complex64::new(v, 0.0);
    match family {
        Family::Bump { a, b } => {
            if r > *a && r < *b {
                re(bump_exponent(*a, *b, r).exp())
            } else {
                ZERO
            }
        }
        Family::Gaussian { width } => re((-(r / width).powi(2)).exp()),
        Family::Power { alpha } => re((1.0 + r).powf(-alpha)),
        Family::OscPower { alpha } => Complex64::from_polar((1.0 + r).powf(-alpha), r),
        Family::Herglotz { n, omega } => {
            let nu = (*n as f64 - 2.0) / 2.0;
            if r == 0.0 {
                re((0.5 * omega).powf(nu) / libm::tgamma(nu + 1.0))
            } else {
                re(r.powf(-nu) * bessel_j_unchecked(nu, omega * r))
            }
        }
        Family::HerglotzEnvelope {
            n,
            omega,
            coeffs,
            conjugate,
        } => herglotz_envelope_value(*n, *omega, coeffs, *conjugate, r),
        Family::Chirp { sigma } => {
            if r >= 1.0 {
                Complex64::from_polar(r.powf(-sigma), -0.25 * r * r)
            } else {
                ZERO
            }
        }
        Family::PurePower { sigma } => {
            if r > 0.0 {
                re(r.powf(-sigma))
            } else {
                ZERO
            }
        }
        Family::Custom { f, hi } => {
            if r >= 0.0 && r <= *hi {
                f(r)
            } else {
                ZERO
            }
        }
        Family::Sum(parts) => parts.iter().map(|p| p.datum(r)).sum(),
    }
}

fn custom_jet(f: &CustomFn, r: Jet) -> Jet {
    let r0 = r.value().re;
    let mut taylor = [ZERO; JET_LEN];
    taylor[0] = f(r0);
    for (k, slot) in taylor.iter_mut().enumerate().skip(1) {
        let h = (1.0 + r0.abs()) * 1e-5f64.max(f64::EPSILON.powf(1.0 / (k as f64 + 2.0)));
        let mut acc = ZERO;
        let mut binom = 1.0;
        for j in 0..=k {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += f(r0 + (k as f64 / 2.0 - j as f64) * h) * (sign * binom);
            binom *= (k - j) as f64 / (j + 1) as f64;
        }
        *slot = acc / (h.powi(k as i32) * factorial(k));
    }
    r.compose(&taylor)
}

fn base_jet(family: &Family, r: Jet) -> Jet {
    let r0 = r.value().re;
    match family {
        Family::Bump { a, b } => {
            if r0 > *a && r0 < *b {
                let u = (r + (-a)) * ((r * -1.0) + *b);
                (u.recip() * -1.0 + 4.0 / ((b - a) * (b - a))).exp()
            } else {
                Jet::zero()
            }
        }
        Family::Gaussian { width } => (r * r * (-1.0 / (width * width))).exp(),
        Family::Power { alpha } => (r + 1.0).powf(-alpha),
        Family::OscPower { alpha } => r.cis(1.0) * (r + 1.0).powf(-alpha),
        Family::Herglotz { n, omega } => reduced_bessel_jet((*n as f64 - 2.0) / 2.0, *omega, r),
        Family::HerglotzEnvelope {
            n,
            omega,
            coeffs,
            conjugate,
        } => {
            let nf = *n as f64;
            let z = r * *omega;
            let a_part =
                splitting_a_reduced_jet(*n, z) * r.cis(-omega) * (0.5 * omega.powf(nf - 1.0));
            let b = splitting_b_jet(coeffs, z);
            let b_part = if b.is_zero() {
                Jet::zero()
            } else {
                b * r.powf(1.0 - nf)
            };
            let v = (a_part + b_part) * omega.powf(-nf / 2.0);
            if *conjugate {
                v.conj()
            } else {
                v
            }
        }
        Family::Chirp { sigma } => {
            if r0 >= 1.0 {
                (r * r).cis(-0.25) * r.powf(-sigma)
            } else {
                Jet::zero()
            }
        }
        Family::PurePower { sigma } => {
            if r0 > 0.0 {
                r.powf(-sigma)
            } else {
                Jet::zero()
            }
        }
        Family::Custom { f, hi } => {
            if r0 >= 0.0 && r0 <= *hi {
                custom_jet(f, r)
            } else {
                Jet::zero()
            }
        }
        Family::Sum(parts) => parts.iter().fold(Jet::zero(), |acc, p| {
            acc + p.envelope_jet(r) * r.cis(p.omega())
        }),
    }
}

fn herglotz_tail(n: usize, omega: f64, coeffs: SplittingCoeffs, which: &[bool]) -> Vec<TailTerm> {
    let nf = n as f64;
    let pref = omega.powf(-nf / 2.0);
    let coeffs = Arc::new(coeffs);
    which
        .iter()
        .map(|&conj| {
            let c = coeffs.clone();
            let amplitude: AmpFn = Arc::new(move |r: Complex64| {
                let w = r * omega;
                let s = if conj { c.series_conj(w) } else { c.series(w) };
                s * r.powf(1.0 - nf) * pref
            });
            TailTerm {
                amplitude,
                carrier: 0.0,
                chirp: 0.0,
                power: (1.0 - nf) / 2.0,
            }
        })
        .collect()
}

fn base_tail(family: &Family) -> Vec<TailTerm> {
    match family {
        Family::Bump { .. } | Family::Gaussian { .. } | Family::Custom { .. } => Vec::new(),
        Family::Power { alpha } | Family::OscPower { alpha } => {
            let a = *alpha;
            let carrier = if matches!(family, Family::OscPower { .. }) {
                1.0
            } else {
                0.0
            };
            vec![TailTerm {
                amplitude: Arc::new(move |r: Complex64| (r + 1.0).powf(-a)),
                carrier,
                chirp: 0.0,
                power: -a,
            }]
        }
        Family::Herglotz { n, omega } => {
            let k = if n % 2 == 1 { 0 } else { HERGLOTZ_TAIL_K };
            let coeffs = alpha_coeffs(*n, k).expect("dimension validated at construction");
            let mut terms = herglotz_tail(*n, *omega, coeffs, &[false, true]);
            terms[0].carrier = *omega;
            terms[1].carrier = -*omega;
            terms
        }
        Family::HerglotzEnvelope {
            n,
            omega,
            coeffs,
            conjugate,
        } => herglotz_tail(*n, *omega, coeffs.clone(), &[*conjugate]),
        Family::Chirp { sigma } | Family::PurePower { sigma } => {
            let s = *sigma;
            let chirp = if matches!(family, Family::Chirp { .. }) {
                -0.25
            } else {
                0.0
            };
            vec![TailTerm {
                amplitude: Arc::new(move |r: Complex64| r.powf(-s)),
                carrier: 0.0,
                chirp,
                power: -s,
            }]
        }
        Family::Sum(parts) => parts
            .iter()
            .flat_map(|p| {
                let w = p.omega();
                p.tail_terms().into_iter().map(move |mut t| {
                    t.carrier += w;
                    t
                })
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(p: &RadialProfile, r: f64) {
        let h = 1e-4 * (1.0 + r);
        let jet = p.envelope_jet(Jet::variable(r, 1.0));
        assert!(
            (jet.value() - p.envelope(r)).norm() <= 1e-13 * (1.0 + p.envelope(r).norm()),
            "{p:?} r={r}"
        );
        let d1 = (p.envelope(r + h) - p.envelope(r - h)) / (2.0 * h);
        let scale = 1.0 + d1.norm();
        assert!(
            (jet.derivative(1) - d1).norm() <= 1e-4 * scale,
            "{p:?} r={r}: {} vs {d1}",
            jet.derivative(1)
        );
        let d2 = (p.envelope(r + h) - p.envelope(r) * 2.0 + p.envelope(r - h)) / (h * h);
        assert!(
            (jet.derivative(2) - d2).norm() <= 1e-3 * (1.0 + d2.norm()),
            "{p:?} r={r}"
        );
    }

    #[test]
    fn bump_peak_and_support() {
        let p = RadialProfile::bump(1.0, 2.0).unwrap();
        assert!((p.envelope(1.5).re - 1.0).abs() < 1e-15);
        assert_eq!(p.envelope(0.5), ZERO);
        assert_eq!(p.support(), Support::Compact { lo: 1.0, hi: 2.0 });
    }

    #[test]
    fn jets_agree_with_finite_differences() {
        let profiles = vec![
            RadialProfile::bump(1.0, 2.0).unwrap(),
            RadialProfile::gaussian(1.3).unwrap(),
            RadialProfile::power(1.5).unwrap(),
            RadialProfile::osc_power(2.0).unwrap(),
            RadialProfile::herglotz(2, 1.0).unwrap(),
            RadialProfile::herglotz(3, 2.0).unwrap(),
            RadialProfile::herglotz_envelope(3, 1.0, 2, false).unwrap(),
            RadialProfile::herglotz_envelope(2, 1.5, 4, true).unwrap(),
            RadialProfile::chirp(1.5).unwrap(),
            RadialProfile::gaussian(1.0)
                .unwrap()
                .dilate(2.0)
                .with_amplitude(Complex64::new(0.0, 2.0)),
        ];
        for p in &profiles {
            for &r in &[1.2, 1.7, 3.3, 7.9] {
                fd_check(p, r);
            }
        }
    }

    #[test]
    fn custom_profile_uses_differences() {
        let p = RadialProfile::custom(Arc::new(|r: f64| Complex64::new((-r * r).exp(), 0.0)), 7.0)
            .unwrap();
        let g = RadialProfile::gaussian(1.0).unwrap();
        for k in 0..=3 {
            let a = p.envelope_derivative(0.8, k);
            let b = g.envelope_derivative(0.8, k);
            assert!((a - b).norm() < 1e-4 * (1.0 + b.norm()), "k={k} {a} {b}");
        }
    }

    #[test]
    fn tail_terms_reproduce_envelope() {
        let cases = vec![
            RadialProfile::power(1.2).unwrap(),
            RadialProfile::osc_power(0.7).unwrap().dilate(1.5),
            RadialProfile::herglotz(3, 1.0).unwrap(),
            RadialProfile::herglotz(2, 2.0).unwrap(),
            RadialProfile::herglotz(4, 1.0).unwrap(),
            RadialProfile::herglotz_envelope(2, 1.0, 5, false).unwrap(),
            RadialProfile::herglotz_envelope(3, 2.0, 1, true).unwrap(),
            RadialProfile::chirp(2.0).unwrap().dilate(0.5),
        ];
        for p in &cases {
            let start = match p.support() {
                Support::Tail { start, .. } => start,
                _ => unreachable!(),
            };
            for &r in &[start + 0.3, start + 5.0, 4.0 * start + 40.0] {
                let sum: Complex64 = p
                    .tail_terms()
                    .iter()
                    .map(|t| {
                        (t.amplitude)(Complex64::new(r, 0.0))
                            * Complex64::from_polar(1.0, t.carrier * r + t.chirp * r * r)
                    })
                    .sum();
                let direct = p.envelope(r);
                assert!(
                    (sum - direct).norm() < 1e-12 * (1.0 + direct.norm()),
                    "{p:?} r={r}: {sum} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn sums_add_data_and_jets() {
        let a = RadialProfile::bump(1.0, 2.0).unwrap().with_carrier(2.0);
        let b = RadialProfile::power(2.0)
            .unwrap()
            .with_amplitude(Complex64::new(0.0, 1.0));
        let s = RadialProfile::sum(vec![a.clone(), b.clone()]).unwrap();
        assert!(matches!(s.support(), Support::Tail { lo, start } if lo == 0.0 && start == 2.0));
        let r = 1.4;
        assert!((s.datum(r) - a.datum(r) - b.datum(r)).norm() < 1e-15);
        fd_check(&s, r);
        let tail: Complex64 = s
            .tail_terms()
            .iter()
            .map(|t| {
                (t.amplitude)(Complex64::new(3.0, 0.0))
                    * Complex64::from_polar(1.0, 3.0 * t.carrier)
            })
            .sum();
        assert!((tail - s.datum(3.0)).norm() < 1e-15);
    }

    #[test]
    fn herglotz_pair_reconstructs_wave_in_odd_dimension() {
        let eta = RadialProfile::herglotz_envelope(3, 1.0, 0, false).unwrap();
        let eta_bar = RadialProfile::herglotz_envelope(3, 1.0, 0, true).unwrap();
        let wave = RadialProfile::herglotz(3, 1.0).unwrap();
        for &r in &[0.1, 0.6, 0.9, 2.0, 13.0] {
            let sum = eta.datum(r) + eta_bar.datum(r);
            assert!((sum - wave.datum(r)).norm() < 1e-14, "r={r}");
        }
    }
}
