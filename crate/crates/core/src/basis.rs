//! Hermite-Gaussian basis functions and Gauss–Hermite quadrature.
//!
//! The basis ket `|n, X, P, ℓ⟩` in the coordinate representation is
//!
//! ```text
//! φ_n(x) = iⁿ h_n(u) e^{iP(x − sX)/ħ} / sqrt(a·√2),   u = (x − X)/(a·√2)
//! ```
//!
//! where `h_n` is the normalized Hermite function and `s ∈ {0, 1}` selects
//! the phase origin. The ground state has coordinate variance `a²`, so
//! `Σ_x` has eigenvalues `(2n + 1)a²`, and `ℓ = ħ/(2a)` is the momentum
//! width. The `iⁿ` factor makes the ladder operators act with real
//! coefficients `√n`, `√(n+1)` on the kets.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `π^{-1/4}`, the value of `h_0(0)`.
pub const PI_POW_NEG_QUARTER: f64 = 0.751_125_544_464_942_5;

/// Where the plane-wave factor of the basis kets is anchored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseOrigin {
    /// `e^{iPx/ħ}`.
    #[default]
    #[serde(rename = "x")]
    Absolute,
    /// `e^{iP(x − X)/ħ}`.
    #[serde(rename = "x-X")]
    Centered,
}

impl PhaseOrigin {
    fn shift(self) -> f64 {
        match self {
            PhaseOrigin::Absolute => 0.0,
            PhaseOrigin::Centered => 1.0,
        }
    }
}

impl std::str::FromStr for PhaseOrigin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(PhaseOrigin::Absolute),
            "x-X" => Ok(PhaseOrigin::Centered),
            other => Err(Error::InvalidParameter(format!("phase origin must be `x` or `x-X`, got `{other}`"))),
        }
    }
}

/// Width parameters shared by a whole family of basis kets: everything
/// except the phase-space point `(X, P)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisFamily {
    pub a: f64,
    pub hbar: f64,
    #[serde(default)]
    pub phase_origin: PhaseOrigin,
}

impl BasisFamily {
    pub fn new(a: f64, hbar: f64) -> Result<Self> {
        let family = BasisFamily {
            a,
            hbar,
            phase_origin: PhaseOrigin::Absolute,
        };
        family.validate()?;
        Ok(family)
    }

    pub fn with_phase_origin(mut self, origin: PhaseOrigin) -> Self {
        self.phase_origin = origin;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::InvalidParameter(format!("a must be positive and finite, got {}", self.a)));
        }
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "hbar must be positive and finite, got {}",
                self.hbar
            )));
        }
        Ok(())
    }

    /// Momentum width `ℓ = ħ/(2a)`.
    pub fn ell(&self) -> f64 {
        self.hbar / (2.0 * self.a)
    }

    pub fn at(&self, x_mean: f64, p_mean: f64) -> BasisParams {
        BasisParams {
            x_mean,
            p_mean,
            family: *self,
        }
    }
}

/// One basis family member set `|·, X, P, ℓ⟩`: the point `(X, P)` plus
/// the widths.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisParams {
    /// Coordinate mean `X`.
    pub x_mean: f64,
    /// Momentum mean `P`.
    pub p_mean: f64,
    #[serde(flatten)]
    pub family: BasisFamily,
}

impl BasisParams {
    pub fn new(x_mean: f64, p_mean: f64, a: f64, hbar: f64) -> Result<Self> {
        if !(x_mean.is_finite() && p_mean.is_finite()) {
            return Err(Error::InvalidParameter("X and P must be finite".to_string()));
        }
        Ok(BasisFamily::new(a, hbar)?.at(x_mean, p_mean))
    }

    pub fn with_phase_origin(mut self, origin: PhaseOrigin) -> Self {
        self.family.phase_origin = origin;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_mean.is_finite() && self.p_mean.is_finite()) {
            return Err(Error::InvalidParameter("X and P must be finite".to_string()));
        }
        self.family.validate()
    }

    pub fn a(&self) -> f64 {
        self.family.a
    }

    pub fn hbar(&self) -> f64 {
        self.family.hbar
    }

    pub fn ell(&self) -> f64 {
        self.family.ell()
    }

    pub fn phase_origin(&self) -> PhaseOrigin {
        self.family.phase_origin
    }

    /// Dimensionless coordinate `u = (x − X)/(a√2)`.
    pub fn reduced(&self, x: f64) -> f64 {
        (x - self.x_mean) / (self.family.a * SQRT_2)
    }

    /// The plane-wave factor `e^{iP(x − sX)/ħ}` carried by every ket.
    pub fn plane_wave(&self, x: f64) -> Complex64 {
        let anchor = x - self.family.phase_origin.shift() * self.x_mean;
        Complex64::from_polar(1.0, self.p_mean * anchor / self.family.hbar)
    }
}

/// Physicists' Hermite polynomial `H_n(u)` by the three-term recurrence.
pub fn hermite(n: usize, u: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * u;
    for k in 1..n {
        let next = 2.0 * u * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Normalized Hermite function `h_n(u) = H_n(u) e^{−u²/2} / sqrt(2ⁿ n! √π)`.
pub fn hermite_function(n: usize, u: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI_POW_NEG_QUARTER * (-0.5 * u * u).exp();
    for k in 0..n {
        let next = (2.0 / (k + 1) as f64).sqrt() * u * cur - (k as f64 / (k + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `h_0(u), …, h_{n_max}(u)` in one pass of the normalized recurrence.
pub fn hermite_functions(n_max: usize, u: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(PI_POW_NEG_QUARTER * (-0.5 * u * u).exp());
    let mut prev = 0.0;
    for k in 0..n_max {
        let cur = out[k];
        let next = (2.0 / (k + 1) as f64).sqrt() * u * cur - (k as f64 / (k + 1) as f64).sqrt() * prev;
        prev = cur;
        out.push(next);
    }
    out
}

/// `iⁿ`.
pub fn i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Basis wave function `φ_n(x; X, P, a)`.
pub fn basis_wavefunction(n: usize, x: f64, params: &BasisParams) -> Complex64 {
    let scale = (params.a() * SQRT_2).sqrt();
    i_pow(n) * params.plane_wave(x) * (hermite_function(n, params.reduced(x)) / scale)
}

/// `φ_0(x), …, φ_{n_max}(x)` at one coordinate.
pub fn basis_wavefunctions(n_max: usize, x: f64, params: &BasisParams) -> Vec<Complex64> {
    let scale = (params.a() * SQRT_2).sqrt();
    let wave = params.plane_wave(x);
    hermite_functions(n_max, params.reduced(x))
        .into_iter()
        .enumerate()
        .map(|(n, h)| i_pow(n) * wave * (h / scale))
        .collect()
}

/// Gauss–Hermite rule for the weight `e^{−u²}`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `w_k e^{u_k²}`, finite even where `w_k` underflows.
    pub scaled_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_k f(u_k)`, approximating `∫ f(u) e^{−u²} du`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&u, &w)| w * f(u)).sum()
    }
}

/// Number of quadrature nodes used for overlaps up to index `n_max`.
///
/// `2·n_max + 8` covers the polynomial degree of the integrand when `ψ` lies
/// in the basis span; the floor of 64 keeps packets displaced by several
/// widths (or boosted by several `ℓ`) at round-off accuracy.
pub fn quadrature_size(n_max: usize) -> usize {
    (2 * n_max + 8).max(64)
}

// Normalized Hermite polynomial pair (p_m(z), p_m'(z)) without the Gaussian
// factor, rescaled on the fly. Returns (p, dp, ln_scale) with the true values
// equal to p·e^{ln_scale} and dp·e^{ln_scale}.
fn normalized_pair(m: usize, z: f64) -> (f64, f64, f64) {
    let mut p1 = PI_POW_NEG_QUARTER;
    let mut p2 = 0.0;
    let mut ln_scale = 0.0;
    for j in 0..m {
        let p3 = p2;
        p2 = p1;
        p1 = z * (2.0 / (j + 1) as f64).sqrt() * p2 - (j as f64 / (j + 1) as f64).sqrt() * p3;
        if p1.abs() > 1e150 {
            p1 *= 1e-150;
            p2 *= 1e-150;
            ln_scale += 150.0 * std::f64::consts::LN_10;
        }
    }
    (p1, (2.0 * m as f64).sqrt() * p2, ln_scale)
}

/// `m`-point Gauss–Hermite rule, exact for polynomials of degree `≤ 2m − 1`.
///
/// Positive roots are bracketed by sign changes on a mesh finer than the
/// smallest root spacing `π/√(2m+1)`, then polished by Newton iteration
/// kept inside each bracket. All values come from the normalized Hermite
/// recurrence, so no factorials or powers of two are ever formed.
pub fn gauss_hermite(m: usize) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::InvalidParameter("quadrature needs at least one node".to_string()));
    }
    const MAX_ITER: usize = 200;

    let edge = (2.0 * m as f64 + 1.0).sqrt();
    let mesh = std::f64::consts::PI / (4.0 * edge);
    let mut roots = Vec::with_capacity(m / 2 + 1);
    if m % 2 == 1 {
        roots.push(0.0);
    }
    let mut lo = 0.5 * mesh;
    let mut p_lo = normalized_pair(m, lo).0;
    while lo < edge + 1.0 && roots.len() < m.div_ceil(2) {
        let hi = lo + mesh;
        let p_hi = normalized_pair(m, hi).0;
        if p_lo == 0.0 || p_lo.signum() != p_hi.signum() {
            roots.push(polish_root(m, lo, hi, p_lo, MAX_ITER));
        }
        lo = hi;
        p_lo = p_hi;
    }
    if roots.len() != m.div_ceil(2) {
        return Err(Error::Unsupported(format!(
            "Gauss–Hermite root search found {} of {} non-negative nodes for m = {m}",
            roots.len(),
            m.div_ceil(2)
        )));
    }

    let ln_weight = |z: f64| {
        let (_, dp, ln_scale) = normalized_pair(m, z);
        std::f64::consts::LN_2 - 2.0 * (dp.abs().ln() + ln_scale)
    };
    let mut order: Vec<(f64, f64)> = roots
        .iter()
        .flat_map(|&z| {
            let lw = ln_weight(z);
            if z == 0.0 {
                vec![(z, lw)]
            } else {
                vec![(-z, lw), (z, lw)]
            }
        })
        .collect();
    order.sort_by(|l, r| l.0.total_cmp(&r.0));
    Ok(QuadratureRule {
        nodes: order.iter().map(|&(u, _)| u).collect(),
        weights: order.iter().map(|&(_, lw)| lw.exp()).collect(),
        scaled_weights: order.iter().map(|&(u, lw)| (lw + u * u).exp()).collect(),
    })
}

// Safeguarded Newton on a sign-change bracket [lo, hi].
fn polish_root(m: usize, mut lo: f64, mut hi: f64, p_lo: f64, max_iter: usize) -> f64 {
    if p_lo == 0.0 {
        return lo;
    }
    let lo_sign = p_lo.signum();
    let mut z = 0.5 * (lo + hi);
    for _ in 0..max_iter {
        let (p, dp, _) = normalized_pair(m, z);
        if p == 0.0 {
            return z;
        }
        if p.signum() == lo_sign {
            lo = z;
        } else {
            hi = z;
        }
        let newton = z - p / dp;
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let moved = (next - z).abs();
        z = next;
        if moved <= 1e-15 * z.abs().max(1.0) {
            break;
        }
    }
    z
}

/// `⟨φ_m | φ_n⟩` by quadrature in the reduced coordinate.
pub fn overlap(m: usize, n: usize, params: &BasisParams, rule: &QuadratureRule) -> Complex64 {
    let dx = params.a() * SQRT_2;
    rule.nodes
        .iter()
        .zip(&rule.scaled_weights)
        .map(|(&u, &w)| {
            let x = params.x_mean + dx * u;
            let f = basis_wavefunction(m, x, params).conj() * basis_wavefunction(n, x, params);
            f * (w * dx)
        })
        .sum()
}
