//! Polynomials in `X^μ, P^μ` and the direct action of an operator on them.
//!
//! The action is computed term by term by differentiating monomials, with no
//! use of [`DiffOpExpr::compose`], so it serves as an independent check of
//! the Leibniz reordering.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{check_dim, check_index, DiffOpExpr, Powers, MAX_DIM, PRUNE_THRESHOLD};
use crate::error::{Error, Result};

/// `Σ c · X^α P^β`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<(Powers, Powers), Complex64>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Polynomial {
            dim,
            terms: BTreeMap::new(),
        })
    }

    pub fn monomial(dim: usize, c: Complex64, xpow: Powers, ppow: Powers) -> Result<Self> {
        let mut p = Self::zero(dim)?;
        if let Some(k) = (0..MAX_DIM).filter(|&k| xpow[k] + ppow[k] > 0).max() {
            check_index(k, dim)?;
        }
        p.accumulate((xpow, ppow), c);
        Ok(p.pruned())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Powers, Powers), &Complex64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, xpow: Powers, ppow: Powers) -> Complex64 {
        self.terms.get(&(xpow, ppow)).copied().unwrap_or_default()
    }

    fn accumulate(&mut self, key: (Powers, Powers), c: Complex64) {
        *self.terms.entry(key).or_default() += c;
    }

    fn pruned(mut self) -> Self {
        self.terms.retain(|_, c| c.norm() > PRUNE_THRESHOLD);
        self
    }

    pub fn add(&self, other: &Polynomial) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.accumulate(*k, *c);
        }
        Ok(out.pruned())
    }

    /// Value at a point.
    pub fn eval(&self, x: &[f64], p: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|((xa, pb), c)| {
                let mut v = *c;
                for mu in 0..self.dim {
                    v *= x[mu].powi(xa[mu] as i32) * p[mu].powi(pb[mu] as i32);
                }
                v
            })
            .sum()
    }

    /// Largest `|c₁ − c₂| / max(|c₁|, |c₂|, 1)`.
    pub fn relative_deviation(&self, other: &Polynomial) -> f64 {
        self.terms
            .keys()
            .chain(other.terms.keys())
            .map(|&(xa, pb)| {
                let (a, b) = (self.coeff(xa, pb), other.coeff(xa, pb));
                (a - b).norm() / a.norm().max(b.norm()).max(1.0)
            })
            .fold(0.0, f64::max)
    }

    /// Coefficient-wise comparison with tolerance `tol · max(|c₁|, |c₂|, 1)`.
    pub fn approx_eq(&self, other: &Polynomial, tol: f64) -> bool {
        self.dim == other.dim
            && self.terms.keys().chain(other.terms.keys()).all(|&(xa, pb)| {
                let (a, b) = (self.coeff(xa, pb), other.coeff(xa, pb));
                (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
            })
    }
}

// d^k/dv^k v^n = n!/(n−k)! v^{n−k}, or zero when k > n.
fn differentiate(power: u16, order: u16) -> Option<(u16, f64)> {
    (order <= power).then(|| (power - order, (0..order).map(|j| (power - j) as f64).product()))
}

/// Exact action of `expr` on `poly`.
pub fn apply_to_polynomial(expr: &DiffOpExpr, poly: &Polynomial) -> Result<Polynomial> {
    if expr.dim() != poly.dim {
        return Err(Error::DimensionMismatch {
            left: expr.dim(),
            right: poly.dim,
        });
    }
    let mut out = Polynomial::zero(poly.dim)?;
    for (m, c) in expr.terms() {
        'mono: for ((xa, pb), q) in &poly.terms {
            let mut xa = *xa;
            let mut pb = *pb;
            let mut coef = c * q;
            for mu in 0..poly.dim {
                let Some((nx, fx)) = differentiate(xa[mu], m.dxpow[mu]) else {
                    continue 'mono;
                };
                let Some((np, fp)) = differentiate(pb[mu], m.dppow[mu]) else {
                    continue 'mono;
                };
                xa[mu] = nx + m.xpow[mu];
                pb[mu] = np + m.ppow[mu];
                coef *= fx * fp;
            }
            out.accumulate((xa, pb), coef);
        }
    }
    Ok(out.pruned())
}
