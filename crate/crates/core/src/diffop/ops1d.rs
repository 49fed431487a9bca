//! One-dimensional momentum and coordinate operators acting on `Ψⁿ(X, P)`.
//!
//! Two families live here. The `(α, β)` family
//!
//! ```text
//! 𝔭̂ = (ℓ/ħ)(iħ∂_P − X) + β∂_X        𝔵̂ = (a/ħ)(−iħ∂_X − P) + α∂_P
//! p̂ = √2ℓ𝔭̂ + P                      x̂ = √2a𝔵̂ + X
//! ```
//!
//! satisfies `[𝔵̂, 𝔭̂] = i` for every `(α, β)` and `[x̂, p̂] = iħ` when
//! `β = (a/ℓ)α`. The `induced_*` builders instead give the operators that
//! reproduce the ladder recurrences on the transform of a state, for the
//! chosen phase origin; those are what the grid cross-checks use.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::DiffOpExpr;
use crate::basis::{BasisParams, PhaseOrigin};
use crate::error::Result;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Coefficients of the extra `∂_P` (in `𝔵̂`) and `∂_X` (in `𝔭̂`) terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaBeta {
    /// `β = (a/ℓ)α`.
    Linked(f64),
    /// Independent `α` and `β`.
    Pair { alpha: f64, beta: f64 },
}

impl Default for AlphaBeta {
    fn default() -> Self {
        AlphaBeta::Linked(0.0)
    }
}

impl AlphaBeta {
    pub fn alpha(&self) -> f64 {
        match *self {
            AlphaBeta::Linked(a) => a,
            AlphaBeta::Pair { alpha, .. } => alpha,
        }
    }

    pub fn beta(&self, params: &BasisParams) -> f64 {
        match *self {
            AlphaBeta::Linked(a) => params.a() / params.ell() * a,
            AlphaBeta::Pair { beta, .. } => beta,
        }
    }
}

/// Sign of the `iħ` derivative terms.
///
/// `OneDim` gives `𝔭̂ ∝ (iħ∂_P − X)` with `[𝔵̂, 𝔭̂] = i`; `Covariant` gives
/// `𝔭̂ ∝ (−iħ∂_P − X)` with `[𝔭̂, 𝔵̂] = i`, the form used with a metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConvention {
    OneDim,
    Covariant,
}

impl SignConvention {
    /// Sign in front of `iħ∂_P` in `𝔭̂` (and minus the one of `iħ∂_X` in `𝔵̂`).
    pub fn sign(self) -> f64 {
        match self {
            SignConvention::OneDim => 1.0,
            SignConvention::Covariant => -1.0,
        }
    }
}

impl std::str::FromStr for SignConvention {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-dim" => Ok(SignConvention::OneDim),
            "covariant" => Ok(SignConvention::Covariant),
            other => Err(crate::error::Error::InvalidParameter(format!(
                "sign convention must be `one-dim` or `covariant`, got `{other}`"
            ))),
        }
    }
}

fn p_frak_signed(params: &BasisParams, ab: AlphaBeta, sign: f64) -> Result<DiffOpExpr> {
    let (ell, hbar) = (params.ell(), params.hbar());
    DiffOpExpr::dp(1, 0)?
        .scale(c(0.0, sign * ell))
        .add(&DiffOpExpr::x(1, 0)?.scale_re(-ell / hbar))?
        .add(&DiffOpExpr::dx(1, 0)?.scale_re(ab.beta(params)))
}

fn x_frak_signed(params: &BasisParams, ab: AlphaBeta, sign: f64) -> Result<DiffOpExpr> {
    let (a, hbar) = (params.a(), params.hbar());
    DiffOpExpr::dx(1, 0)?
        .scale(c(0.0, -sign * a))
        .add(&DiffOpExpr::p(1, 0)?.scale_re(-a / hbar))?
        .add(&DiffOpExpr::dp(1, 0)?.scale_re(ab.alpha()))
}

/// `𝔭̂ = (ℓ/ħ)(iħ∂_P − X) + β∂_X`.
pub fn build_p_frak(params: &BasisParams, ab: AlphaBeta) -> Result<DiffOpExpr> {
    p_frak_signed(params, ab, 1.0)
}

/// `𝔵̂ = (a/ħ)(−iħ∂_X − P) + α∂_P`.
pub fn build_x_frak(params: &BasisParams, ab: AlphaBeta) -> Result<DiffOpExpr> {
    x_frak_signed(params, ab, 1.0)
}

/// `p̂ = √2ℓ𝔭̂ + P`.
pub fn build_p_hat(params: &BasisParams, ab: AlphaBeta) -> Result<DiffOpExpr> {
    build_p_frak(params, ab)?.scale_re(SQRT_2 * params.ell()).add(&DiffOpExpr::p(1, 0)?)
}

/// `x̂ = √2a𝔵̂ + X`.
pub fn build_x_hat(params: &BasisParams, ab: AlphaBeta) -> Result<DiffOpExpr> {
    build_x_frak(params, ab)?.scale_re(SQRT_2 * params.a()).add(&DiffOpExpr::x(1, 0)?)
}

/// The three one-dimensional dispersion generators.
#[derive(Clone, Debug, PartialEq)]
pub struct ZHat {
    /// `¼(𝔭̂𝔭̂ + 𝔵̂𝔵̂)`.
    pub plus: DiffOpExpr,
    /// `¼(𝔭̂𝔭̂ − 𝔵̂𝔵̂)`.
    pub minus: DiffOpExpr,
    /// `¼(𝔭̂𝔵̂ + 𝔵̂𝔭̂)`.
    pub cross: DiffOpExpr,
}

/// Dispersion generators composed from `𝔭̂`, `𝔵̂` at `α = β = 0`.
pub fn build_z_hat_1d(params: &BasisParams, convention: SignConvention) -> Result<ZHat> {
    let s = convention.sign();
    let p = p_frak_signed(params, AlphaBeta::default(), s)?;
    let x = x_frak_signed(params, AlphaBeta::default(), s)?;
    let pp = p.compose(&p)?;
    let xx = x.compose(&x)?;
    Ok(ZHat {
        plus: pp.add(&xx)?.scale_re(0.25),
        minus: pp.sub(&xx)?.scale_re(0.25),
        cross: p.compose(&x)?.add(&x.compose(&p)?)?.scale_re(0.25),
    })
}

/// Operator on `Ψⁿ(X, P)` equivalent to the momentum ladder recurrence
/// `(1/√2)[√n Ψ^{n−1} + √(n+1) Ψ^{n+1}]`.
///
/// Follows from differentiating the basis kets in `X`:
/// `−i√2a ∂_X`, plus `−(√2a/ħ)P` when the phase is anchored at `x − X`.
pub fn induced_p_frak(params: &BasisParams) -> Result<DiffOpExpr> {
    let a = params.a();
    let d = DiffOpExpr::dx(1, 0)?.scale(c(0.0, -SQRT_2 * a));
    match params.phase_origin() {
        PhaseOrigin::Absolute => Ok(d),
        PhaseOrigin::Centered => d.add(&DiffOpExpr::p(1, 0)?.scale_re(-SQRT_2 * a / params.hbar())),
    }
}

/// Operator on `Ψⁿ(X, P)` equivalent to the coordinate ladder recurrence
/// `(−i/√2)[√n Ψ^{n−1} − √(n+1) Ψ^{n+1}]`.
///
/// `(√2ℓ/ħ)(iħ∂_P − X)` with the phase anchored at `x`; the `−X` term
/// drops out when it is anchored at `x − X`.
pub fn induced_x_frak(params: &BasisParams) -> Result<DiffOpExpr> {
    let (ell, hbar) = (params.ell(), params.hbar());
    let d = DiffOpExpr::dp(1, 0)?.scale(c(0.0, SQRT_2 * ell));
    match params.phase_origin() {
        PhaseOrigin::Absolute => d.add(&DiffOpExpr::x(1, 0)?.scale_re(-SQRT_2 * ell / hbar)),
        PhaseOrigin::Centered => Ok(d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::Monomial;

    fn params() -> BasisParams {
        BasisParams::new(0.2, 0.9, 0.8, 1.7).unwrap()
    }

    fn mono(x: u16, p: u16, dx: u16, dp: u16) -> Monomial {
        Monomial {
            xpow: [x, 0, 0, 0],
            ppow: [p, 0, 0, 0],
            dxpow: [dx, 0, 0, 0],
            dppow: [dp, 0, 0, 0],
        }
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-13
    }

    #[test]
    fn plain_forms_read_off() {
        let pr = params();
        let p = build_p_frak(&pr, AlphaBeta::default()).unwrap();
        assert_eq!(p.len(), 2);
        assert!(close(p.coeff(&mono(0, 0, 0, 1)), c(0.0, pr.ell())));
        assert!(close(p.coeff(&mono(1, 0, 0, 0)), c(-pr.ell() / pr.hbar(), 0.0)));

        let ph = build_p_hat(&pr, AlphaBeta::default()).unwrap();
        let l2 = pr.ell() * pr.ell();
        assert!(close(ph.coeff(&mono(0, 0, 0, 1)), c(0.0, SQRT_2 * l2)));
        assert!(close(ph.coeff(&mono(1, 0, 0, 0)), c(-SQRT_2 * l2 / pr.hbar(), 0.0)));
        assert!(close(ph.coeff(&mono(0, 1, 0, 0)), c(1.0, 0.0)));

        let xh = build_x_hat(&pr, AlphaBeta::Linked(0.0)).unwrap();
        assert!(close(xh.coeff(&mono(1, 0, 0, 0)), c(1.0, 0.0)));

        let with_beta = build_p_frak(&pr, AlphaBeta::Pair { alpha: 0.1, beta: -0.7 }).unwrap();
        assert!(close(with_beta.coeff(&mono(0, 0, 1, 0)), c(-0.7, 0.0)));
    }

    #[test]
    fn commutators_over_alpha_family() {
        let pr = params();
        let i = DiffOpExpr::constant(1, c(0.0, 1.0)).unwrap();
        let ih = DiffOpExpr::constant(1, c(0.0, pr.hbar())).unwrap();
        for alpha in [-1.0, -0.3, 0.0, 0.5, 2.0] {
            for ab in [AlphaBeta::Linked(alpha), AlphaBeta::Pair { alpha, beta: 0.37 - alpha }] {
                let cm = build_x_frak(&pr, ab).unwrap().commutator(&build_p_frak(&pr, ab).unwrap()).unwrap();
                assert!(cm.max_deviation(&i).unwrap() < 1e-13, "{ab:?}: {cm}");
            }
            let ab = AlphaBeta::Linked(alpha);
            let cm = build_x_hat(&pr, ab).unwrap().commutator(&build_p_hat(&pr, ab).unwrap()).unwrap();
            assert!(cm.max_deviation(&ih).unwrap() < 1e-13, "{cm}");
        }
    }

    #[test]
    fn unlinked_full_commutator_residual() {
        let pr = params();
        let (alpha, beta) = (0.5, -0.25);
        let ab = AlphaBeta::Pair { alpha, beta };
        let cm = build_x_hat(&pr, ab).unwrap().commutator(&build_p_hat(&pr, ab).unwrap()).unwrap();
        let want = c(SQRT_2 * (pr.a() * alpha - pr.ell() * beta), pr.hbar());
        assert_eq!(cm.len(), 1);
        assert!(close(cm.coeff(&Monomial::ONE), want));
    }

    #[test]
    fn z_hat_structure() {
        let pr = params();
        let z = build_z_hat_1d(&pr, SignConvention::OneDim).unwrap();
        assert_eq!(z.plus.coeff(&mono(0, 0, 1, 1)), c(0.0, 0.0));
        // cross term: (i/2)(aℓ/ħ)(P∂_P − X∂_X) in the one-dim sign
        let k = 0.5 * pr.a() * pr.ell() / pr.hbar();
        assert!(close(z.cross.coeff(&mono(0, 1, 0, 1)), c(0.0, -k)));
        assert!(close(z.cross.coeff(&mono(1, 0, 1, 0)), c(0.0, k)));
        let zc = build_z_hat_1d(&pr, SignConvention::Covariant).unwrap();
        assert!(close(zc.cross.coeff(&mono(0, 1, 0, 1)), c(0.0, k)));

        let p = build_p_frak(&pr, AlphaBeta::default()).unwrap();
        let half_pp = p.compose(&p).unwrap().scale_re(0.5);
        assert!(z.plus.add(&z.minus).unwrap().approx_eq(&half_pp, 1e-12));
    }

    #[test]
    fn induced_pair_commutes_to_minus_i() {
        // The ladder matrices depend on (X, P) through the basis, so composing
        // their differential forms reverses the order: [𝔵, 𝔭] = −i here while
        // the matrices give +i.
        for origin in [PhaseOrigin::Absolute, PhaseOrigin::Centered] {
            let pr = params().with_phase_origin(origin);
            let cm = induced_x_frak(&pr).unwrap().commutator(&induced_p_frak(&pr).unwrap()).unwrap();
            let i = DiffOpExpr::constant(1, c(0.0, -1.0)).unwrap();
            assert!(cm.max_deviation(&i).unwrap() < 1e-13, "{origin:?}: {cm}");
        }
    }
}
