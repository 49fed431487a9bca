//! Forward phase-space transform `Ψⁿ(X, P) = ⟨n, X, P, ℓ|ψ⟩` and the two
//! reconstruction routes: the sum over `n` at one phase-space point, and the
//! integral over the `(X, P)` plane at one fixed `n`.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{
    basis_wavefunction, gauss_hermite, hermite_function, hermite_functions, i_pow, quadrature_size, BasisFamily, BasisParams, PhaseOrigin,
    QuadratureRule,
};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Half-width, in units of `a`, that sampled input must cover around `X`.
pub const SUPPORT_HALF_WIDTH: f64 = 8.0;

/// Tolerance on `|‖ψ‖² − 1|` before results are flagged as unnormalized.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// A closed-form packet: the `n0`-th basis function centered at `(x0, p0)`
/// with width `a0`, phase anchored at `x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Packet {
    #[serde(default)]
    pub n0: usize,
    pub x0: f64,
    pub p0: f64,
    pub a0: f64,
}

impl Packet {
    pub fn gaussian(x0: f64, p0: f64, a0: f64) -> Self {
        Packet { n0: 0, x0, p0, a0 }
    }

    pub fn hermite(n0: usize, x0: f64, p0: f64, a0: f64) -> Self {
        Packet { n0, x0, p0, a0 }
    }

    fn eval(&self, x: f64, hbar: f64) -> Complex64 {
        let params = BasisFamily {
            a: self.a0,
            hbar,
            phase_origin: PhaseOrigin::Absolute,
        }
        .at(self.x0, self.p0);
        basis_wavefunction(self.n0, x, &params)
    }
}

/// Complex samples on a strictly increasing grid, interpolated by a natural
/// cubic spline and taken as zero outside the sampled interval.
#[derive(Clone, Debug, PartialEq)]
pub struct Samples {
    xs: Vec<f64>,
    values: Vec<Complex64>,
    second: Vec<Complex64>,
}

impl Samples {
    pub const MIN_POINTS: usize = 8;

    pub fn new(xs: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::SizeMismatch {
                left: xs.len(),
                right: values.len(),
            });
        }
        if xs.len() < Self::MIN_POINTS {
            return Err(Error::SizeTooSmall {
                min: Self::MIN_POINTS,
                got: xs.len(),
            });
        }
        if xs.iter().chain(values.iter().flat_map(|v| [&v.re, &v.im])).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("samples must be finite".to_string()));
        }
        if let Some(k) = xs.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(format!(
                "sample abscissae must be strictly increasing (row {})",
                k + 2
            )));
        }
        let second = natural_spline_second_derivatives(&xs, &values);
        Ok(Samples { xs, values, second })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn span(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let (lo, hi) = self.span();
        if !(lo..=hi).contains(&x) {
            return ZERO;
        }
        let k = match self.xs.partition_point(|&v| v <= x) {
            0 => 0,
            j if j >= self.xs.len() => self.xs.len() - 2,
            j => j - 1,
        };
        let h = self.xs[k + 1] - self.xs[k];
        let t = (self.xs[k + 1] - x) / h;
        let s = 1.0 - t;
        self.values[k] * t
            + self.values[k + 1] * s
            + (self.second[k] * (t * t * t - t) + self.second[k + 1] * (s * s * s - s)) * (h * h / 6.0)
    }

    /// `∫|ψ|² dx` by the trapezoid rule on the samples.
    pub fn norm_sqr(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0].norm_sqr() + v[1].norm_sqr()))
            .sum()
    }
}

fn natural_spline_second_derivatives(xs: &[f64], ys: &[Complex64]) -> Vec<Complex64> {
    let n = xs.len();
    let mut second = vec![ZERO; n];
    // Thomas sweep over the interior unknowns.
    let mut diag = vec![0.0; n];
    let mut rhs = vec![ZERO; n];
    for i in 1..n - 1 {
        let h0 = xs[i] - xs[i - 1];
        let h1 = xs[i + 1] - xs[i];
        diag[i] = 2.0 * (h0 + h1);
        rhs[i] = ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0) * 6.0;
        if i > 1 {
            let m = h0 / diag[i - 1];
            diag[i] -= m * h0;
            rhs[i] = rhs[i] - rhs[i - 1] * m;
        }
    }
    for i in (1..n - 1).rev() {
        let h1 = xs[i + 1] - xs[i];
        second[i] = (rhs[i] - second[i + 1] * h1) / diag[i];
    }
    second
}

/// The state being transformed.
#[derive(Clone, Debug, PartialEq)]
pub enum WaveFunction {
    Sampled(Samples),
    Analytic(Packet),
    /// `Σ c_j ψ_j`.
    Combination(Vec<(Complex64, WaveFunction)>),
}

impl WaveFunction {
    pub fn gaussian(x0: f64, p0: f64, a0: f64) -> Self {
        WaveFunction::Analytic(Packet::gaussian(x0, p0, a0))
    }

    pub fn hermite(n0: usize, x0: f64, p0: f64, a0: f64) -> Self {
        WaveFunction::Analytic(Packet::hermite(n0, x0, p0, a0))
    }

    pub fn sampled(xs: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        Samples::new(xs, values).map(WaveFunction::Sampled)
    }

    /// Samples `self` on `xs` (useful for feeding analytic states through the
    /// sampled path).
    pub fn sample(&self, xs: &[f64], hbar: f64) -> Result<Self> {
        let values = xs.iter().map(|&x| self.eval(x, hbar)).collect();
        WaveFunction::sampled(xs.to_vec(), values)
    }

    pub fn eval(&self, x: f64, hbar: f64) -> Complex64 {
        match self {
            WaveFunction::Sampled(s) => s.eval(x),
            WaveFunction::Analytic(p) => p.eval(x, hbar),
            WaveFunction::Combination(terms) => terms.iter().map(|(c, w)| c * w.eval(x, hbar)).sum(),
        }
    }

    /// `‖ψ‖²` when it is known without quadrature (analytic packets are
    /// normalized by construction).
    fn known_norm_sqr(&self) -> Option<f64> {
        match self {
            WaveFunction::Sampled(s) => Some(s.norm_sqr()),
            WaveFunction::Analytic(_) => Some(1.0),
            WaveFunction::Combination(_) => None,
        }
    }

    fn sample_spans(&self, out: &mut Vec<(f64, f64)>) {
        match self {
            WaveFunction::Sampled(s) => out.push(s.span()),
            WaveFunction::Analytic(_) => {}
            WaveFunction::Combination(terms) => terms.iter().for_each(|(_, w)| w.sample_spans(out)),
        }
    }

    /// Whether any sampled component fails to cover `[X − 8a, X + 8a]`.
    pub fn truncated_at(&self, x_mean: f64, a: f64) -> bool {
        let mut spans = Vec::new();
        self.sample_spans(&mut spans);
        let (lo, hi) = (x_mean - SUPPORT_HALF_WIDTH * a, x_mean + SUPPORT_HALF_WIDTH * a);
        spans.iter().any(|&(s0, s1)| s0 > lo || s1 < hi)
    }
}

/// `Ψⁿ` for `n = 0..=n_max` at one phase-space point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    pub params: BasisParams,
    pub n_max: usize,
    pub coeffs: Vec<Complex64>,
    /// Sampled input did not cover `[X − 8a, X + 8a]`.
    pub truncated_support: bool,
    /// `|‖ψ‖² − 1| ≥ 1e−6`.
    pub not_normalized: bool,
}

impl CoefficientVector {
    /// Bessel sum `Σ_n |Ψⁿ|²`.
    pub fn weight(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Quadrature nodes and `h_n(u_k)` table shared by every transform of one
/// basis family up to `n_max`.
#[derive(Clone, Debug)]
pub struct ForwardPlan {
    family: BasisFamily,
    n_max: usize,
    rule: QuadratureRule,
    // table[k * (n_max + 1) + n] = h_n(u_k)
    table: Vec<f64>,
}

impl ForwardPlan {
    pub fn new(family: BasisFamily, n_max: usize) -> Result<Self> {
        Self::with_nodes(family, n_max, quadrature_size(n_max))
    }

    pub fn with_nodes(family: BasisFamily, n_max: usize, m: usize) -> Result<Self> {
        family.validate()?;
        let rule = gauss_hermite(m)?;
        let table = rule.nodes.iter().flat_map(|&u| hermite_functions(n_max, u)).collect();
        Ok(ForwardPlan {
            family,
            n_max,
            rule,
            table,
        })
    }

    pub fn family(&self) -> &BasisFamily {
        &self.family
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn nodes(&self) -> usize {
        self.rule.len()
    }

    // ψ(x_k) e^{−iP(x_k − sX)/ħ} w_k e^{u_k²} at each node.
    fn weighted_samples(&self, psi: &WaveFunction, x_mean: f64, p_mean: f64) -> Vec<Complex64> {
        let params = self.family.at(x_mean, p_mean);
        let dx = self.family.a * SQRT_2;
        self.rule
            .nodes
            .iter()
            .zip(&self.rule.scaled_weights)
            .map(|(&u, &w)| {
                let x = x_mean + dx * u;
                psi.eval(x, self.family.hbar) * params.plane_wave(x).conj() * w
            })
            .collect()
    }

    fn prefactor(&self, n: usize) -> Complex64 {
        i_pow(n).conj() * (self.family.a * SQRT_2).sqrt()
    }

    /// All `Ψⁿ(X, P)` for `n ≤ n_max`.
    pub fn coeffs_at(&self, psi: &WaveFunction, x_mean: f64, p_mean: f64) -> Vec<Complex64> {
        let f = self.weighted_samples(psi, x_mean, p_mean);
        let stride = self.n_max + 1;
        let mut acc = vec![ZERO; stride];
        for (k, fk) in f.iter().enumerate() {
            let row = &self.table[k * stride..(k + 1) * stride];
            for (c, h) in acc.iter_mut().zip(row) {
                *c += fk * h;
            }
        }
        acc.iter().enumerate().map(|(n, c)| self.prefactor(n) * c).collect()
    }

    /// A single `Ψⁿ(X, P)`.
    pub fn coeff_at(&self, psi: &WaveFunction, n: usize, x_mean: f64, p_mean: f64) -> Result<Complex64> {
        if n > self.n_max {
            return Err(Error::IndexOutOfRange {
                index: n,
                valid: format!("0..={}", self.n_max),
            });
        }
        let f = self.weighted_samples(psi, x_mean, p_mean);
        let stride = self.n_max + 1;
        let sum: Complex64 = f.iter().enumerate().map(|(k, fk)| fk * self.table[k * stride + n]).sum();
        Ok(self.prefactor(n) * sum)
    }

    pub fn forward(&self, psi: &WaveFunction, x_mean: f64, p_mean: f64) -> CoefficientVector {
        let params = self.family.at(x_mean, p_mean);
        let coeffs = self.coeffs_at(psi, x_mean, p_mean);
        let norm = psi.known_norm_sqr().unwrap_or_else(|| self.norm_sqr(psi, x_mean));
        CoefficientVector {
            params,
            n_max: self.n_max,
            coeffs,
            truncated_support: psi.truncated_at(x_mean, self.family.a),
            not_normalized: (norm - 1.0).abs() >= NORM_TOLERANCE,
        }
    }

    fn norm_sqr(&self, psi: &WaveFunction, x_mean: f64) -> f64 {
        let dx = self.family.a * SQRT_2;
        self.rule
            .nodes
            .iter()
            .zip(&self.rule.scaled_weights)
            .map(|(&u, &w)| w * dx * psi.eval(x_mean + dx * u, self.family.hbar).norm_sqr())
            .sum()
    }
}

/// `Ψⁿ = ∫ φ_n^*(x) ψ(x) dx` for `n = 0..=n_max` at `params`.
pub fn forward_coeffs(psi: &WaveFunction, params: &BasisParams, n_max: usize) -> Result<CoefficientVector> {
    params.validate()?;
    let plan = ForwardPlan::new(params.family, n_max)?;
    Ok(plan.forward(psi, params.x_mean, params.p_mean))
}

/// `1 − Σ_{n ≤ n_max} |Ψⁿ|²`.
pub fn bessel_residual(psi: &WaveFunction, params: &BasisParams, n_max: usize) -> Result<f64> {
    Ok(1.0 - forward_coeffs(psi, params, n_max)?.weight())
}

/// `ψ_rec(x) = Σ_n Ψⁿ φ_n(x)`.
pub fn reconstruct_sum(coeffs: &CoefficientVector, xs: &[f64]) -> Vec<Complex64> {
    xs.iter()
        .map(|&x| {
            crate::basis::basis_wavefunctions(coeffs.n_max, x, &coeffs.params)
                .iter()
                .zip(&coeffs.coeffs)
                .map(|(phi, c)| phi * c)
                .sum()
        })
        .collect()
}

/// Uniform rectilinear grid over the `(X, P)` plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    #[serde(rename = "X_min")]
    pub x_min: f64,
    #[serde(rename = "X_max")]
    pub x_max: f64,
    #[serde(rename = "nX")]
    pub nx: usize,
    #[serde(rename = "P_min")]
    pub p_min: f64,
    #[serde(rename = "P_max")]
    pub p_max: f64,
    #[serde(rename = "nP")]
    pub np: usize,
}

impl PhaseSpaceGrid {
    pub fn new(x_range: (f64, f64), nx: usize, p_range: (f64, f64), np: usize) -> Result<Self> {
        let grid = PhaseSpaceGrid {
            x_min: x_range.0,
            x_max: x_range.1,
            nx,
            p_min: p_range.0,
            p_max: p_range.1,
            np,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// `[x0 − half_x, x0 + half_x] × [p0 − half_p, p0 + half_p]`.
    pub fn centered(x0: f64, p0: f64, half_x: f64, half_p: f64, nx: usize, np: usize) -> Result<Self> {
        Self::new((x0 - half_x, x0 + half_x), nx, (p0 - half_p, p0 + half_p), np)
    }

    pub fn validate(&self) -> Result<()> {
        for (n, lo, hi, axis) in [(self.nx, self.x_min, self.x_max, "X"), (self.np, self.p_min, self.p_max, "P")] {
            if n < 3 {
                return Err(Error::SizeTooSmall { min: 3, got: n });
            }
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(Error::InvalidParameter(format!(
                    "{axis} range must be finite and increasing, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    pub fn hx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn hp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.nx {
            self.x_max
        } else {
            self.x_min + i as f64 * self.hx()
        }
    }

    pub fn p(&self, j: usize) -> f64 {
        if j + 1 == self.np {
            self.p_max
        } else {
            self.p_min + j as f64 * self.hp()
        }
    }

    /// Same extent with both spacings halved (`n → 2n − 1`), so every old
    /// node is also a node of the refined grid.
    pub fn refined(&self) -> Self {
        PhaseSpaceGrid {
            nx: 2 * self.nx - 1,
            np: 2 * self.np - 1,
            ..*self
        }
    }
}

/// `Ψⁿ` for one `n`, sampled over a phase-space grid. Rows are `X`, columns `P`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceField {
    pub grid: PhaseSpaceGrid,
    pub n: usize,
    pub family: BasisFamily,
    pub values: DMatrix<Complex64>,
    pub truncated_support: bool,
}

impl PhaseSpaceField {
    pub fn zeros(grid: PhaseSpaceGrid, n: usize, family: BasisFamily) -> Self {
        PhaseSpaceField {
            grid,
            n,
            family,
            values: DMatrix::from_element(grid.nx, grid.np, ZERO),
            truncated_support: false,
        }
    }

    pub fn from_fn<F: Fn(f64, f64) -> Complex64>(grid: PhaseSpaceGrid, n: usize, family: BasisFamily, f: F) -> Self {
        PhaseSpaceField {
            grid,
            n,
            family,
            values: DMatrix::from_fn(grid.nx, grid.np, |i, j| f(grid.x(i), grid.p(j))),
            truncated_support: false,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest `|Ψ|` over the outermost rows and columns.
    pub fn boundary_max_abs(&self) -> f64 {
        let (nx, np) = self.values.shape();
        let mut m: f64 = 0.0;
        for i in 0..nx {
            m = m.max(self.values[(i, 0)].norm()).max(self.values[(i, np - 1)].norm());
        }
        for j in 0..np {
            m = m.max(self.values[(0, j)].norm()).max(self.values[(nx - 1, j)].norm());
        }
        m
    }
}

/// `Ψⁿ` at every node of `grid`. Nodes are evaluated in parallel.
pub fn forward_field(psi: &WaveFunction, n: usize, grid: &PhaseSpaceGrid, family: &BasisFamily) -> Result<PhaseSpaceField> {
    grid.validate()?;
    let plan = ForwardPlan::new(*family, n)?;
    let rows: Vec<Vec<Complex64>> = (0..grid.nx)
        .into_par_iter()
        .map(|i| {
            (0..grid.np)
                .map(|j| plan.coeff_at(psi, n, grid.x(i), grid.p(j)))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let truncated_support = (0..grid.nx).any(|i| psi.truncated_at(grid.x(i), family.a));
    Ok(PhaseSpaceField {
        grid: *grid,
        n,
        family: *family,
        values: DMatrix::from_fn(grid.nx, grid.np, |i, j| rows[i][j]),
        truncated_support,
    })
}

/// Fields `Ψ⁰ … Ψ^{n_max}` over one grid, all from the same quadrature pass.
pub fn forward_fields(psi: &WaveFunction, n_max: usize, grid: &PhaseSpaceGrid, family: &BasisFamily) -> Result<Vec<PhaseSpaceField>> {
    grid.validate()?;
    let plan = ForwardPlan::new(*family, n_max)?;
    let nodes: Vec<Vec<Vec<Complex64>>> = (0..grid.nx)
        .into_par_iter()
        .map(|i| (0..grid.np).map(|j| plan.coeffs_at(psi, grid.x(i), grid.p(j))).collect())
        .collect();
    let truncated_support = (0..grid.nx).any(|i| psi.truncated_at(grid.x(i), family.a));
    Ok((0..=n_max)
        .map(|n| PhaseSpaceField {
            grid: *grid,
            n,
            family: *family,
            values: DMatrix::from_fn(grid.nx, grid.np, |i, j| nodes[i][j][n]),
            truncated_support,
        })
        .collect())
}

/// Result of the phase-space integral reconstruction.
#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    pub values: Vec<Complex64>,
    /// `|Ψ|` on the grid boundary exceeds `1e−3·max|Ψ|`: the grid does not
    /// cover the support of `Ψⁿ`.
    pub domain_truncated: bool,
}

/// Boundary-to-peak ratio above which the grid counts as too small.
pub const DOMAIN_TRUNCATION_RATIO: f64 = 1e-3;

/// `ψ_rec(x) = (1/2πħ) ∬ Ψⁿ(X, P) φ_n(x; X, P) dX dP` by the 2D trapezoid rule.
pub fn reconstruct_integral(field: &PhaseSpaceField, xs: &[f64]) -> Reconstruction {
    let grid = &field.grid;
    let fam = &field.family;
    let trap = |k: usize, n: usize| if k == 0 || k + 1 == n { 0.5 } else { 1.0 };
    let scale = grid.hx() * grid.hp() / (2.0 * PI * fam.hbar) / (fam.a * SQRT_2).sqrt();
    let shift = match fam.phase_origin {
        PhaseOrigin::Absolute => 0.0,
        PhaseOrigin::Centered => 1.0,
    };
    let values = xs
        .par_iter()
        .map(|&x| {
            let mut total = ZERO;
            for i in 0..grid.nx {
                let xm = grid.x(i);
                let h = hermite_function(field.n, (x - xm) / (fam.a * SQRT_2));
                if h == 0.0 {
                    continue;
                }
                let row: Complex64 = (0..grid.np)
                    .map(|j| {
                        let p = grid.p(j);
                        field.values[(i, j)] * Complex64::from_polar(trap(j, grid.np), p * (x - shift * xm) / fam.hbar)
                    })
                    .sum();
                total += row * (h * trap(i, grid.nx));
            }
            total * i_pow(field.n) * scale
        })
        .collect();
    let peak = field.max_abs();
    Reconstruction {
        values,
        domain_truncated: peak > 0.0 && field.boundary_max_abs() > DOMAIN_TRUNCATION_RATIO * peak,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::basis_wavefunction;

    fn params() -> BasisParams {
        BasisParams::new(0.4, -0.7, 0.9, 1.0).unwrap()
    }

    fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn matched_packets_select_one_index() {
        let p = params();
        let c = forward_coeffs(&WaveFunction::gaussian(p.x_mean, p.p_mean, p.a()), &p, 6).unwrap();
        assert!((c.coeffs[0].norm() - 1.0).abs() < 1e-10);
        assert!(c.coeffs[1..].iter().all(|v| v.norm() < 1e-10));
        assert!(!c.truncated_support && !c.not_normalized);

        let c = forward_coeffs(&WaveFunction::hermite(3, p.x_mean, p.p_mean, p.a()), &p, 6).unwrap();
        for (n, v) in c.coeffs.iter().enumerate() {
            let want = if n == 3 { 1.0 } else { 0.0 };
            assert!((v.norm() - want).abs() < 1e-10, "n={n}: {v}");
        }
    }

    #[test]
    fn displaced_gaussian_overlap() {
        let p = params();
        for d in [0.3, 1.0, 2.5] {
            let psi = WaveFunction::gaussian(p.x_mean + d, p.p_mean, p.a());
            let c = forward_coeffs(&psi, &p, 0).unwrap();
            // brute-force trapezoid of φ_0^* ψ on a wide fine grid
            let xs = linspace(-20.0, 20.0, 8001);
            let h = xs[1] - xs[0];
            let brute: Complex64 = xs.iter().map(|&x| basis_wavefunction(0, x, &p).conj() * psi.eval(x, 1.0) * h).sum();
            let want = (-d * d / (4.0 * p.a() * p.a())).exp();
            assert!((c.coeffs[0].norm_sqr() - want).abs() < 1e-8);
            assert!((brute.norm_sqr() - want).abs() < 1e-8);
        }
    }

    #[test]
    fn sampled_path_matches_analytic() {
        let p = params();
        let psi = WaveFunction::hermite(2, 0.1, 0.3, 1.1);
        let xs = linspace(-12.0, 12.0, 2001);
        let sampled = psi.sample(&xs, 1.0).unwrap();
        let a = forward_coeffs(&psi, &p, 8).unwrap();
        let b = forward_coeffs(&sampled, &p, 8).unwrap();
        for (u, v) in a.coeffs.iter().zip(&b.coeffs) {
            assert!((u - v).norm() < 1e-6, "{u} vs {v}");
        }
        assert!(!b.truncated_support);
        assert!(!b.not_normalized);

        let short = psi.sample(&linspace(-2.0, 2.0, 50), 1.0).unwrap();
        let c = forward_coeffs(&short, &p, 2).unwrap();
        assert!(c.truncated_support);
        assert!(c.not_normalized);
    }

    #[test]
    fn spline_reproduces_cubics() {
        let xs = linspace(-1.0, 2.0, 9);
        // natural end conditions only reproduce polynomials with zero end curvature, so use a line
        let vals = xs.iter().map(|&x| Complex64::new(2.0 * x - 1.0, -x)).collect();
        let s = Samples::new(xs, vals).unwrap();
        for x in [-0.93, 0.0, 0.41, 1.999] {
            assert!((s.eval(x) - Complex64::new(2.0 * x - 1.0, -x)).norm() < 1e-14);
        }
        assert_eq!(s.eval(2.5), ZERO);
        assert!(Samples::new(vec![0.0; 3], vec![ZERO; 3]).is_err());
        assert!(Samples::new(linspace(0.0, 1.0, 9).into_iter().rev().collect(), vec![ZERO; 9]).is_err());
    }

    #[test]
    fn sum_route_single_term_and_round_trip() {
        let p = params();
        let mut c = forward_coeffs(&WaveFunction::gaussian(p.x_mean, p.p_mean, p.a()), &p, 3).unwrap();
        c.coeffs = vec![Complex64::new(1.0, 0.0), ZERO, ZERO, ZERO];
        let xs = linspace(-3.0, 3.0, 13);
        for (x, v) in xs.iter().zip(reconstruct_sum(&c, &xs)) {
            assert_eq!(v, basis_wavefunction(0, *x, &p));
        }

        let psi = WaveFunction::hermite(2, p.x_mean, p.p_mean, p.a());
        let c = forward_coeffs(&psi, &p, 2).unwrap();
        let xs = linspace(p.x_mean - 6.0 * p.a(), p.x_mean + 6.0 * p.a(), 121);
        let err = reconstruct_sum(&c, &xs)
            .iter()
            .zip(&xs)
            .map(|(v, &x)| (v - psi.eval(x, 1.0)).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn sum_route_residual_decreases() {
        let p = params();
        let psi = WaveFunction::gaussian(p.x_mean + p.a(), p.p_mean, p.a());
        let mut last = f64::INFINITY;
        for n_max in 0..12 {
            let r = bessel_residual(&psi, &p, n_max).unwrap();
            assert!(r < last);
            assert!(r >= -1e-8);
            last = r;
        }
    }

    #[test]
    fn bessel_residual_examples() {
        let p = params();
        let r = bessel_residual(&WaveFunction::gaussian(p.x_mean, p.p_mean, p.a()), &p, 5).unwrap();
        assert!(r.abs() < 1e-10);
        let r = bessel_residual(&WaveFunction::hermite(5, p.x_mean, p.p_mean, p.a()), &p, 4).unwrap();
        assert!((r - 1.0).abs() < 1e-8);

        let d = 2.0 * p.a();
        let lambda = d * d / (4.0 * p.a() * p.a());
        let mut term = (-lambda).exp();
        let mut poisson = 0.0;
        for n in 0..=40 {
            poisson += term;
            term *= lambda / (n + 1) as f64;
        }
        let r = bessel_residual(&WaveFunction::gaussian(p.x_mean + d, p.p_mean, p.a()), &p, 40).unwrap();
        assert!(r < 1e-6);
        assert!((r - (1.0 - poisson)).abs() < 1e-10);
    }

    #[test]
    fn field_examples() {
        let fam = BasisFamily::new(0.8, 1.0).unwrap();
        let psi = WaveFunction::gaussian(0.5, -0.25, 0.8);
        let grid = PhaseSpaceGrid::centered(0.5, -0.25, 4.0, 2.5, 9, 11).unwrap();
        let f1 = forward_field(&psi, 1, &grid, &fam).unwrap();
        assert!(f1.values[(4, 5)].norm() < 1e-6);

        let f0 = forward_field(&psi, 0, &grid, &fam).unwrap();
        for i in 0..grid.nx {
            for j in 0..grid.np {
                let (dx, dp) = (grid.x(i) - 0.5, grid.p(j) + 0.25);
                let want = (-dx * dx / (8.0 * 0.64) - dp * dp / (8.0 * fam.ell().powi(2))).exp();
                assert!((f0.values[(i, j)].norm() - want).abs() < 1e-10);
            }
        }

        let zero = WaveFunction::sampled(linspace(-10.0, 10.0, 30), vec![ZERO; 30]).unwrap();
        let fz = forward_field(&zero, 2, &grid, &fam).unwrap();
        assert!(fz.values.iter().all(|v| *v == ZERO));

        let all = forward_fields(&psi, 3, &grid, &fam).unwrap();
        for (a, b) in all[1].values.iter().zip(f1.values.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn integral_route_zero_and_gaussian() {
        let fam = BasisFamily::new(1.0, 1.0).unwrap();
        let grid = PhaseSpaceGrid::centered(0.0, 0.0, 6.0, 6.0 * fam.ell(), 32, 32).unwrap();
        let zero = PhaseSpaceField::zeros(grid, 0, fam);
        let rec = reconstruct_integral(&zero, &[0.0, 1.0]);
        assert!(rec.values.iter().all(|v| *v == ZERO));

        let psi = WaveFunction::gaussian(0.3, 0.2, 1.0);
        let small = PhaseSpaceGrid::centered(0.3, 0.2, 1.0, 0.5, 16, 16).unwrap();
        let f = forward_field(&psi, 0, &small, &fam).unwrap();
        assert!(reconstruct_integral(&f, &[0.0]).domain_truncated);
    }

    #[test]
    fn grid_refinement_keeps_nodes() {
        let g = PhaseSpaceGrid::new((-1.0, 3.0), 5, (0.0, 1.0), 3).unwrap();
        let r = g.refined();
        assert_eq!((r.nx, r.np), (9, 5));
        for i in 0..g.nx {
            assert!((r.x(2 * i) - g.x(i)).abs() < 1e-15);
        }
        assert!(PhaseSpaceGrid::new((0.0, 1.0), 2, (0.0, 1.0), 3).is_err());
        assert!(PhaseSpaceGrid::new((1.0, 1.0), 4, (0.0, 1.0), 3).is_err());
    }
}
