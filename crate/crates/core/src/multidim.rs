//! Multidimensional operators with parameter tensors `a_μ^ν`, `b_μ^ν` and a
//! diagonal metric `η`.
//!
//! Phase-space variables are stored with upper indices (`X^ρ`, `P^ρ`) and
//! enter the operators lowered, `X_ρ = η_ρρ X^ρ`. In the covariant sign
//!
//! ```text
//! 𝔭̂_μ = (b_μ^ρ/ħ)(−iħ∂/∂P^ρ − X_ρ) + β_μ^ρ ∂/∂X^ρ
//! 𝔵̂_ν = (a_ν^λ/ħ)( iħ∂/∂X^λ − P_λ) + α_ν^λ ∂/∂P^λ
//! ```
//!
//! and `[𝔭̂_μ, 𝔵̂_ν] = (2i/ħ)(b η aᵀ)_μν`, which is `iη_μν` whenever the
//! duality `b·a = (ħ/2)I` holds and `a η` is symmetric. Tensors are plain
//! matrices with the lower index as the row.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diffop::{DiffOpExpr, SignConvention, MAX_DIM};
use crate::error::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Tolerance on the duality constraint, relative to `max(ħ/2, 1)`.
pub const DUALITY_TOLERANCE: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Parameter tensors of one multidimensional basis family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensorFile", into = "TensorFile")]
pub struct ParamTensors {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    /// Diagonal of the metric, each `±1`.
    pub eta: Vec<f64>,
    pub hbar: f64,
    pub x_bar: Vec<f64>,
    pub p_bar: Vec<f64>,
}

// On-disk layout: {D, a, b, eta, hbar, Xbar, Pbar}.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct TensorFile {
    #[serde(rename = "D")]
    d: usize,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
    eta: Vec<f64>,
    #[serde(default = "default_hbar")]
    hbar: f64,
    #[serde(rename = "Xbar", default)]
    x_bar: Vec<f64>,
    #[serde(rename = "Pbar", default)]
    p_bar: Vec<f64>,
}

fn default_hbar() -> f64 {
    1.0
}

fn rows_to_matrix(name: &str, d: usize, rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidParameter(format!("`{name}` must be a {d}×{d} matrix")));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

impl TryFrom<TensorFile> for ParamTensors {
    type Error = Error;

    fn try_from(f: TensorFile) -> Result<Self> {
        let d = f.d;
        let zeros_if_empty = |v: Vec<f64>| if v.is_empty() { vec![0.0; d] } else { v };
        ParamTensors::new(rows_to_matrix("a", d, &f.a)?, rows_to_matrix("b", d, &f.b)?, f.eta, f.hbar)?
            .with_means(zeros_if_empty(f.x_bar), zeros_if_empty(f.p_bar))
    }
}

impl From<ParamTensors> for TensorFile {
    fn from(t: ParamTensors) -> Self {
        let rows = |m: &DMatrix<f64>| (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
        TensorFile {
            d: t.dim(),
            a: rows(&t.a),
            b: rows(&t.b),
            eta: t.eta.clone(),
            hbar: t.hbar,
            x_bar: t.x_bar.clone(),
            p_bar: t.p_bar.clone(),
        }
    }
}

impl ParamTensors {
    /// Checks shapes and finiteness; the duality constraint is reported by
    /// [`validate_tensors`] rather than enforced here.
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, eta: Vec<f64>, hbar: f64) -> Result<Self> {
        let d = eta.len();
        if d == 0 || d > MAX_DIM {
            return Err(Error::InvalidParameter(format!("D must be in 1..={MAX_DIM}, got {d}")));
        }
        for (name, m) in [("a", &a), ("b", &b)] {
            if m.shape() != (d, d) {
                return Err(Error::InvalidParameter(format!("`{name}` must be {d}×{d} to match eta")));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!("`{name}` must be finite")));
            }
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        Ok(ParamTensors {
            a,
            b,
            eta,
            hbar,
            x_bar: vec![0.0; d],
            p_bar: vec![0.0; d],
        })
    }

    pub fn with_means(mut self, x_bar: Vec<f64>, p_bar: Vec<f64>) -> Result<Self> {
        let d = self.dim();
        if x_bar.len() != d || p_bar.len() != d {
            return Err(Error::SizeMismatch {
                left: d,
                right: x_bar.len().max(p_bar.len()),
            });
        }
        self.x_bar = x_bar;
        self.p_bar = p_bar;
        Ok(self)
    }

    /// `a = b = √(ħ/2) I`.
    pub fn isotropic(eta: Vec<f64>, hbar: f64) -> Result<Self> {
        let d = eta.len();
        let s = (hbar / 2.0).sqrt();
        Self::new(DMatrix::identity(d, d) * s, DMatrix::identity(d, d) * s, eta, hbar)
    }

    /// `a = diag(s)`, `b = (ħ/2) diag(1/s)`.
    pub fn diagonal(scales: &[f64], eta: Vec<f64>, hbar: f64) -> Result<Self> {
        if scales.len() != eta.len() {
            return Err(Error::SizeMismatch {
                left: eta.len(),
                right: scales.len(),
            });
        }
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(scales));
        let b = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            scales.len(),
            scales.iter().map(|s| hbar / (2.0 * s)),
        ));
        Self::new(a, b, eta, hbar)
    }

    /// `a = S·η`, `b = (ħ/2) a⁻¹` for a symmetric invertible `S`: the
    /// general family meeting both the duality and the metric target.
    pub fn from_symmetric(s: &DMatrix<f64>, eta: Vec<f64>, hbar: f64) -> Result<Self> {
        let d = eta.len();
        if s.shape() != (d, d) {
            return Err(Error::InvalidParameter(format!("S must be {d}×{d}")));
        }
        let a = s * DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&eta));
        let inv = a
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidParameter("S must be invertible".to_string()))?;
        Self::new(a, inv * (hbar / 2.0), eta, hbar)
    }

    pub fn dim(&self) -> usize {
        self.eta.len()
    }

    /// `A_μ^λ = a_μ^ρ a_ρ^λ`.
    pub fn big_a(&self) -> DMatrix<f64> {
        &self.a * &self.a
    }

    /// `B_μ^σ = b_μ^ρ b_ρ^σ`.
    pub fn big_b(&self) -> DMatrix<f64> {
        &self.b * &self.b
    }

    fn check_index(&self, mu: usize) -> Result<()> {
        if mu >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: mu,
                valid: format!("0..{}", self.dim()),
            });
        }
        Ok(())
    }
}

/// Outcome of [`validate_tensors`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TensorValidation {
    /// `max |(b·a)_μν − (ħ/2)δ_μν|`.
    pub duality_deviation: f64,
    /// `max_μ min(|η_μ − 1|, |η_μ + 1|)`.
    pub eta_deviation: f64,
    pub valid: bool,
}

/// Reports how far `t` is from the duality constraint and from a `±1`
/// signature.
pub fn validate_tensors(t: &ParamTensors) -> TensorValidation {
    let d = t.dim();
    let prod = &t.b * &t.a;
    let half = t.hbar / 2.0;
    let duality_deviation = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| (prod[(i, j)] - if i == j { half } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    let eta_deviation = t.eta.iter().map(|e| (e - 1.0).abs().min((e + 1.0).abs())).fold(0.0, f64::max);
    TensorValidation {
        duality_deviation,
        eta_deviation,
        valid: duality_deviation <= DUALITY_TOLERANCE * half.max(1.0) && eta_deviation == 0.0,
    }
}

/// Dimensionless (`𝔭̂`, `𝔵̂`) or full (`p̂ = √2 b 𝔭̂ + P`, `x̂ = √2 a 𝔵̂ + X`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Frak,
    Full,
}

/// Optional `α_ν^λ`, `β_μ^ρ` tensors.
#[derive(Clone, Debug, PartialEq)]
pub struct Couplings {
    pub alpha: DMatrix<f64>,
    pub beta: DMatrix<f64>,
}

impl Couplings {
    pub fn zero(d: usize) -> Self {
        Couplings {
            alpha: DMatrix::zeros(d, d),
            beta: DMatrix::zeros(d, d),
        }
    }
}

fn check_couplings(t: &ParamTensors, ab: Option<&Couplings>) -> Result<()> {
    if let Some(ab) = ab {
        let d = t.dim();
        if ab.alpha.shape() != (d, d) || ab.beta.shape() != (d, d) {
            return Err(Error::InvalidParameter(format!("α and β must be {d}×{d}")));
        }
    }
    Ok(())
}

fn p_frak(t: &ParamTensors, mu: usize, sign: f64, ab: Option<&Couplings>) -> Result<DiffOpExpr> {
    let d = t.dim();
    let mut e = DiffOpExpr::zero(d)?;
    for rho in 0..d {
        let b = t.b[(mu, rho)];
        e = e
            .add(&DiffOpExpr::dp(d, rho)?.scale(c(0.0, sign * b)))?
            .add(&DiffOpExpr::x(d, rho)?.scale_re(-b * t.eta[rho] / t.hbar))?;
        if let Some(ab) = ab {
            e = e.add(&DiffOpExpr::dx(d, rho)?.scale_re(ab.beta[(mu, rho)]))?;
        }
    }
    Ok(e)
}

fn x_frak(t: &ParamTensors, nu: usize, sign: f64, ab: Option<&Couplings>) -> Result<DiffOpExpr> {
    let d = t.dim();
    let mut e = DiffOpExpr::zero(d)?;
    for lam in 0..d {
        let a = t.a[(nu, lam)];
        e = e
            .add(&DiffOpExpr::dx(d, lam)?.scale(c(0.0, -sign * a)))?
            .add(&DiffOpExpr::p(d, lam)?.scale_re(-a * t.eta[lam] / t.hbar))?;
        if let Some(ab) = ab {
            e = e.add(&DiffOpExpr::dp(d, lam)?.scale_re(ab.alpha[(nu, lam)]))?;
        }
    }
    Ok(e)
}

/// Momentum operator `𝔭̂_μ` (`Frak`) or `p̂_μ` (`Full`).
pub fn build_p_hat_mu(
    t: &ParamTensors,
    mu: usize,
    variant: Variant,
    convention: SignConvention,
    ab: Option<&Couplings>,
) -> Result<DiffOpExpr> {
    t.check_index(mu)?;
    check_couplings(t, ab)?;
    let s = convention.sign();
    match variant {
        Variant::Frak => p_frak(t, mu, s, ab),
        Variant::Full => {
            let d = t.dim();
            let mut e = DiffOpExpr::p(d, mu)?.scale_re(t.eta[mu]);
            for rho in 0..d {
                e = e.add(&p_frak(t, rho, s, ab)?.scale_re(SQRT_2 * t.b[(mu, rho)]))?;
            }
            Ok(e)
        }
    }
}

/// Coordinate operator `𝔵̂_ν` (`Frak`) or `x̂_ν` (`Full`).
pub fn build_x_hat_nu(
    t: &ParamTensors,
    nu: usize,
    variant: Variant,
    convention: SignConvention,
    ab: Option<&Couplings>,
) -> Result<DiffOpExpr> {
    t.check_index(nu)?;
    check_couplings(t, ab)?;
    let s = convention.sign();
    match variant {
        Variant::Frak => x_frak(t, nu, s, ab),
        Variant::Full => {
            let d = t.dim();
            let mut e = DiffOpExpr::x(d, nu)?.scale_re(t.eta[nu]);
            for lam in 0..d {
                e = e.add(&x_frak(t, lam, s, ab)?.scale_re(SQRT_2 * t.a[(nu, lam)]))?;
            }
            Ok(e)
        }
    }
}

/// Commutator target `[𝔭̂_μ, 𝔵̂_ν]` for the given variant and sign:
/// `±iη_μν`, times `ħ` for the full operators.
pub fn commutator_target(t: &ParamTensors, mu: usize, nu: usize, variant: Variant, convention: SignConvention) -> Complex64 {
    let eta = if mu == nu { t.eta[mu] } else { 0.0 };
    let scale = match variant {
        Variant::Frak => 1.0,
        Variant::Full => t.hbar,
    };
    c(0.0, -convention.sign() * eta * scale)
}

/// Max coefficient deviation of every `[𝔭̂_μ, 𝔵̂_ν]` from its target.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorDeviations {
    pub frak: DMatrix<f64>,
    pub full: DMatrix<f64>,
}

impl CommutatorDeviations {
    pub fn max(&self) -> f64 {
        self.frak.iter().chain(self.full.iter()).copied().fold(0.0, f64::max)
    }
}

/// Computes all `D²` commutators for both variants.
pub fn check_multidim_commutators(t: &ParamTensors, convention: SignConvention, ab: Option<&Couplings>) -> Result<CommutatorDeviations> {
    let d = t.dim();
    let mut out = CommutatorDeviations {
        frak: DMatrix::zeros(d, d),
        full: DMatrix::zeros(d, d),
    };
    for variant in [Variant::Frak, Variant::Full] {
        let ps: Vec<_> = (0..d)
            .map(|mu| build_p_hat_mu(t, mu, variant, convention, ab))
            .collect::<Result<_>>()?;
        let xs: Vec<_> = (0..d)
            .map(|nu| build_x_hat_nu(t, nu, variant, convention, ab))
            .collect::<Result<_>>()?;
        for mu in 0..d {
            for nu in 0..d {
                let cm = ps[mu].commutator(&xs[nu])?;
                let target = DiffOpExpr::constant(d, commutator_target(t, mu, nu, variant, convention))?;
                let dev = cm.max_deviation(&target)?;
                match variant {
                    Variant::Frak => out.frak[(mu, nu)] = dev,
                    Variant::Full => out.full[(mu, nu)] = dev,
                }
            }
        }
    }
    Ok(out)
}

/// Lower-case generators for one index pair and their bold combinations
/// `4 b_μ^ε b_ν^θ 𝔷̂_εθ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DispersionGenerators {
    pub z_plus: DiffOpExpr,
    pub z_minus: DiffOpExpr,
    pub z_cross: DiffOpExpr,
    pub bold_plus: DiffOpExpr,
    pub bold_minus: DiffOpExpr,
    pub bold_cross: DiffOpExpr,
}

struct Lowercase {
    plus: Vec<Vec<DiffOpExpr>>,
    minus: Vec<Vec<DiffOpExpr>>,
    cross: Vec<Vec<DiffOpExpr>>,
}

fn lowercase_generators(t: &ParamTensors, convention: SignConvention) -> Result<Lowercase> {
    let d = t.dim();
    let s = convention.sign();
    let ps: Vec<_> = (0..d).map(|mu| p_frak(t, mu, s, None)).collect::<Result<_>>()?;
    let xs: Vec<_> = (0..d).map(|nu| x_frak(t, nu, s, None)).collect::<Result<_>>()?;
    let mut out = Lowercase {
        plus: Vec::with_capacity(d),
        minus: Vec::with_capacity(d),
        cross: Vec::with_capacity(d),
    };
    for mu in 0..d {
        let (mut plus, mut minus, mut cross) = (Vec::new(), Vec::new(), Vec::new());
        for nu in 0..d {
            let pp = ps[mu].compose(&ps[nu])?;
            let xx = xs[mu].compose(&xs[nu])?;
            plus.push(pp.add(&xx)?.scale_re(0.25));
            minus.push(pp.sub(&xx)?.scale_re(0.25));
            cross.push(ps[mu].compose(&xs[nu])?.add(&xs[nu].compose(&ps[mu])?)?.scale_re(0.25));
        }
        out.plus.push(plus);
        out.minus.push(minus);
        out.cross.push(cross);
    }
    Ok(out)
}

/// `𝔷̂±_μν`, `𝔷̂×_μν` composed from `𝔭̂`, `𝔵̂` at `α = β = 0`, and their bold
/// counterparts.
pub fn build_dispersion_generators(t: &ParamTensors, mu: usize, nu: usize, convention: SignConvention) -> Result<DispersionGenerators> {
    t.check_index(mu)?;
    t.check_index(nu)?;
    let d = t.dim();
    let low = lowercase_generators(t, convention)?;
    let bold = |z: &Vec<Vec<DiffOpExpr>>| -> Result<DiffOpExpr> {
        let mut acc = DiffOpExpr::zero(d)?;
        for eps in 0..d {
            for theta in 0..d {
                let w = 4.0 * t.b[(mu, eps)] * t.b[(nu, theta)];
                if w != 0.0 {
                    acc = acc.add(&z[eps][theta].scale_re(w))?;
                }
            }
        }
        Ok(acc)
    };
    Ok(DispersionGenerators {
        bold_plus: bold(&low.plus)?,
        bold_minus: bold(&low.minus)?,
        bold_cross: bold(&low.cross)?,
        z_plus: low.plus[mu][nu].clone(),
        z_minus: low.minus[mu][nu].clone(),
        z_cross: low.cross[mu][nu].clone(),
    })
}
