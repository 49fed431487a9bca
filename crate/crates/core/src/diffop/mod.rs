//! Normal-ordered differential operators with polynomial coefficients.
//!
//! An expression is a finite sum of terms `c · X^α P^β ∂_X^γ ∂_P^δ` with
//! multi-indices over up to [`MAX_DIM`] dimensions. Variables always stand
//! to the left of derivatives; [`DiffOpExpr::compose`] restores that order
//! with the Leibniz rule, so products and commutators are exact up to the
//! floating-point arithmetic on the coefficients.

mod ops1d;
mod poly;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use ops1d::{
    build_p_frak, build_p_hat, build_x_frak, build_x_hat, build_z_hat_1d, induced_p_frak, induced_x_frak, AlphaBeta, SignConvention, ZHat,
};
pub use poly::{apply_to_polynomial, Polynomial};

/// Largest supported number of dimensions.
pub const MAX_DIM: usize = 4;

/// Terms with `|c|` at or below this are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Default relative tolerance for [`DiffOpExpr::approx_eq`].
pub const EQ_TOLERANCE: f64 = 1e-12;

/// Powers per dimension.
pub type Powers = [u16; MAX_DIM];

/// Exponent signature of one normal-ordered term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub xpow: Powers,
    pub ppow: Powers,
    pub dxpow: Powers,
    pub dppow: Powers,
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        xpow: [0; MAX_DIM],
        ppow: [0; MAX_DIM],
        dxpow: [0; MAX_DIM],
        dppow: [0; MAX_DIM],
    };

    pub fn derivative_order(&self) -> u32 {
        self.dxpow.iter().chain(&self.dppow).map(|&v| v as u32).sum()
    }

    pub fn degree(&self) -> u32 {
        self.xpow.iter().chain(&self.ppow).map(|&v| v as u32).sum()
    }

    fn with(mut self, slot: Slot, mu: usize, power: u16) -> Self {
        match slot {
            Slot::X => self.xpow[mu] = power,
            Slot::P => self.ppow[mu] = power,
            Slot::DX => self.dxpow[mu] = power,
            Slot::DP => self.dppow[mu] = power,
        }
        self
    }

    // Ordering used for rendering: derivative order, then degree, then powers.
    fn render_key(&self) -> (u32, u32, Monomial) {
        (self.derivative_order(), self.degree(), *self)
    }
}

#[derive(Clone, Copy)]
enum Slot {
    X,
    P,
    DX,
    DP,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::InvalidParameter(format!("dimension must be in 1..={MAX_DIM}, got {dim}")));
    }
    Ok(())
}

fn check_index(mu: usize, dim: usize) -> Result<()> {
    if mu >= dim {
        return Err(Error::IndexOutOfRange {
            index: mu,
            valid: format!("0..{dim}"),
        });
    }
    Ok(())
}

/// A canonical sum of normal-ordered terms.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffOpExpr {
    dim: usize,
    terms: BTreeMap<Monomial, Complex64>,
}

impl DiffOpExpr {
    pub fn zero(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(DiffOpExpr {
            dim,
            terms: BTreeMap::new(),
        })
    }

    pub fn constant(dim: usize, c: Complex64) -> Result<Self> {
        Self::term(dim, c, Monomial::ONE)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::constant(dim, Complex64::new(1.0, 0.0))
    }

    /// `c · m`, checked against `dim`.
    pub fn term(dim: usize, c: Complex64, m: Monomial) -> Result<Self> {
        check_dim(dim)?;
        let used = (0..MAX_DIM).filter(|&k| m.xpow[k] + m.ppow[k] + m.dxpow[k] + m.dppow[k] > 0);
        if let Some(k) = used.max() {
            check_index(k, dim)?;
        }
        let mut e = DiffOpExpr {
            dim,
            terms: BTreeMap::new(),
        };
        e.accumulate(m, c);
        Ok(e.pruned())
    }

    fn single(dim: usize, slot: Slot, mu: usize) -> Result<Self> {
        check_dim(dim)?;
        check_index(mu, dim)?;
        Self::term(dim, Complex64::new(1.0, 0.0), Monomial::ONE.with(slot, mu, 1))
    }

    /// Multiplication by `X^μ`.
    pub fn x(dim: usize, mu: usize) -> Result<Self> {
        Self::single(dim, Slot::X, mu)
    }

    /// Multiplication by `P^μ`.
    pub fn p(dim: usize, mu: usize) -> Result<Self> {
        Self::single(dim, Slot::P, mu)
    }

    /// `∂/∂X^μ`.
    pub fn dx(dim: usize, mu: usize) -> Result<Self> {
        Self::single(dim, Slot::DX, mu)
    }

    /// `∂/∂P^μ`.
    pub fn dp(dim: usize, mu: usize) -> Result<Self> {
        Self::single(dim, Slot::DP, mu)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `m` (zero if absent).
    pub fn coeff(&self, m: &Monomial) -> Complex64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    pub fn max_derivative_order(&self) -> u32 {
        self.terms.keys().map(Monomial::derivative_order).max().unwrap_or(0)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    fn accumulate(&mut self, m: Monomial, c: Complex64) {
        *self.terms.entry(m).or_default() += c;
    }

    fn pruned(mut self) -> Self {
        self.terms.retain(|_, c| c.norm() > PRUNE_THRESHOLD);
        self
    }

    fn same_dim(&self, other: &DiffOpExpr) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &DiffOpExpr) -> Result<Self> {
        self.same_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(*m, *c);
        }
        Ok(out.pruned())
    }

    pub fn sub(&self, other: &DiffOpExpr) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = DiffOpExpr {
            dim: self.dim,
            terms: BTreeMap::new(),
        };
        for (m, c) in &self.terms {
            out.accumulate(*m, c * s);
        }
        out.pruned()
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Normal-ordered product `self ∘ other`.
    pub fn compose(&self, other: &DiffOpExpr) -> Result<Self> {
        self.same_dim(other)?;
        let mut out = DiffOpExpr {
            dim: self.dim,
            terms: BTreeMap::new(),
        };
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                for (m, c) in reorder(ma, mb, self.dim) {
                    out.accumulate(m, ca * cb * c);
                }
            }
        }
        Ok(out.pruned())
    }

    /// `self ∘ other − other ∘ self`.
    pub fn commutator(&self, other: &DiffOpExpr) -> Result<Self> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// Largest absolute coefficient difference.
    pub fn max_deviation(&self, other: &DiffOpExpr) -> Result<f64> {
        Ok(self.sub_raw(other)?.values().map(|c| c.norm()).fold(0.0, f64::max))
    }

    // Difference without pruning, so tiny residuals stay visible.
    fn sub_raw(&self, other: &DiffOpExpr) -> Result<BTreeMap<Monomial, Complex64>> {
        self.same_dim(other)?;
        let mut out = self.terms.clone();
        for (m, c) in &other.terms {
            *out.entry(*m).or_default() -= c;
        }
        Ok(out)
    }

    /// Largest `|c₁ − c₂| / max(|c₁|, |c₂|, 1)` over all signatures; the
    /// quantity [`approx_eq`](Self::approx_eq) compares against `tol`.
    pub fn relative_deviation(&self, other: &DiffOpExpr) -> Result<f64> {
        self.same_dim(other)?;
        Ok(self
            .terms
            .keys()
            .chain(other.terms.keys())
            .map(|m| {
                let (a, b) = (self.coeff(m), other.coeff(m));
                (a - b).norm() / a.norm().max(b.norm()).max(1.0)
            })
            .fold(0.0, f64::max))
    }

    /// Coefficient-wise equality: `|c₁ − c₂| ≤ tol · max(|c₁|, |c₂|, 1)` for
    /// every signature present in either expression.
    pub fn approx_eq(&self, other: &DiffOpExpr, tol: f64) -> bool {
        if self.dim != other.dim {
            return false;
        }
        self.terms.keys().chain(other.terms.keys()).all(|m| {
            let (a, b) = (self.coeff(m), other.coeff(m));
            (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
        })
    }

    /// Deterministic text form, e.g. `-0.5*X + 0.5i*dP` or `X0*dP1`.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut keys: Vec<_> = self.terms.keys().collect();
        keys.sort_by_key(|m| m.render_key());
        let mut out = String::new();
        for (k, m) in keys.into_iter().enumerate() {
            let t = render_term(self.terms[m], m, self.dim);
            match (k, t.strip_prefix('-')) {
                (0, _) => out.push_str(&t),
                (_, Some(rest)) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                (_, None) => {
                    out.push_str(" + ");
                    out.push_str(&t);
                }
            }
        }
        out
    }
}

impl fmt::Display for DiffOpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Free-function form of [`DiffOpExpr::compose`].
pub fn compose(a: &DiffOpExpr, b: &DiffOpExpr) -> Result<DiffOpExpr> {
    a.compose(b)
}

/// Free-function form of [`DiffOpExpr::commutator`].
pub fn commutator(a: &DiffOpExpr, b: &DiffOpExpr) -> Result<DiffOpExpr> {
    a.commutator(b)
}

fn binomial(n: u16, k: u16) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

fn falling(n: u16, k: u16) -> f64 {
    (0..k).map(|j| (n - j) as f64).product()
}

// Moves the derivatives of `a` past the variables of `b`:
// ∂^γ V^α = Σ_k C(γ,k) α!/(α−k)! V^{α−k} ∂^{γ−k}, independently per
// dimension and per variable kind.
fn reorder(a: &Monomial, b: &Monomial, dim: usize) -> Vec<(Monomial, f64)> {
    let mut partial = vec![(
        Monomial {
            xpow: a.xpow,
            ppow: a.ppow,
            dxpow: b.dxpow,
            dppow: b.dppow,
        },
        1.0,
    )];
    for mu in 0..dim {
        for (gamma, alpha, is_x) in [(a.dxpow[mu], b.xpow[mu], true), (a.dppow[mu], b.ppow[mu], false)] {
            let mut next = Vec::with_capacity(partial.len() * (gamma.min(alpha) as usize + 1));
            for (m, c) in &partial {
                for k in 0..=gamma.min(alpha) {
                    let mut t = *m;
                    let w = binomial(gamma, k) * falling(alpha, k);
                    if is_x {
                        t.xpow[mu] += alpha - k;
                        t.dxpow[mu] += gamma - k;
                    } else {
                        t.ppow[mu] += alpha - k;
                        t.dppow[mu] += gamma - k;
                    }
                    next.push((t, c * w));
                }
            }
            partial = next;
        }
    }
    partial
}

fn format_real(v: f64) -> String {
    // `0.0` and `-0.0` both print as "0"
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

fn format_coeff(c: Complex64) -> String {
    match (c.re == 0.0, c.im == 0.0) {
        (_, true) => format_real(c.re),
        (true, false) => match c.im {
            1.0 => "i".to_string(),
            -1.0 => "-i".to_string(),
            v => format!("{}i", format_real(v)),
        },
        (false, false) => {
            let sign = if c.im < 0.0 { '-' } else { '+' };
            format!("({}{}{}i)", format_real(c.re), sign, format_real(c.im.abs()))
        }
    }
}

fn render_term(c: Complex64, m: &Monomial, dim: usize) -> String {
    let mut factors = Vec::new();
    let name = |base: &str, mu: usize| {
        if dim == 1 {
            base.to_string()
        } else {
            format!("{base}{mu}")
        }
    };
    for (base, powers) in [("X", &m.xpow), ("P", &m.ppow), ("dX", &m.dxpow), ("dP", &m.dppow)] {
        for (mu, &p) in powers.iter().enumerate().take(dim) {
            match p {
                0 => {}
                1 => factors.push(name(base, mu)),
                _ => factors.push(format!("{}^{p}", name(base, mu))),
            }
        }
    }
    let coeff = format_coeff(c);
    if factors.is_empty() {
        return coeff;
    }
    let body = factors.join("*");
    match coeff.as_str() {
        "1" => body,
        "-1" => format!("-{body}"),
        _ => format!("{coeff}*{body}"),
    }
}
