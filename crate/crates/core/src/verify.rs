//! Cross-module check suite: every check measures one deviation and compares
//! it against a fixed allowance. `phasekit verify` prints the resulting
//! [`Scorecard`] and exits 0 only when all checks pass.

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{basis_wavefunction, gauss_hermite, overlap, quadrature_size, BasisFamily, BasisParams};
use crate::diffop::{
    apply_to_polynomial, build_p_frak, build_p_hat, build_x_frak, build_x_hat, AlphaBeta, DiffOpExpr, Monomial, Polynomial, SignConvention,
};
use crate::error::Result;
use crate::grid::{apply_fd, convergence_order, interior_max_diff, route_consistency_report};
use crate::matrix::{commutator, dispersion_matrices, p_matrix, x_matrix_oriented, Orientation};
use crate::multidim::{build_dispersion_generators, build_p_hat_mu, build_x_hat_nu, check_multidim_commutators, ParamTensors, Variant};
use crate::transform::{
    forward_coeffs, forward_field, reconstruct_integral, reconstruct_sum, PhaseSpaceField, PhaseSpaceGrid, WaveFunction,
};

/// A deliberate fault, used to show that the suite can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Injection {
    /// Build the coordinate matrix with its off-diagonals swapped.
    FlipXOrientation,
    /// Scale every `b` tensor by 1.05 so the duality constraint breaks.
    UnlinkDuality,
}

impl std::str::FromStr for Injection {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flip-x-orientation" => Ok(Injection::FlipXOrientation),
            "unlink-duality" => Ok(Injection::UnlinkDuality),
            other => Err(crate::Error::InvalidParameter(format!(
                "unknown injection `{other}` (expected flip-x-orientation or unlink-duality)"
            ))),
        }
    }
}

/// Parameters of a verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(rename = "X")]
    pub x_mean: f64,
    #[serde(rename = "P")]
    pub p_mean: f64,
    pub a: f64,
    pub hbar: f64,
    /// Seed of the randomized algebra and tensor checks.
    pub seed: u64,
    /// Cases per randomized algebra property.
    pub cases: usize,
    pub injection: Option<Injection>,
    /// Replacement allowances keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            x_mean: 0.0,
            p_mean: 0.0,
            a: 1.0,
            hbar: 1.0,
            seed: 20_240_601,
            cases: 200,
            injection: None,
            tolerances: BTreeMap::new(),
        }
    }
}

/// Allowed range of a measured value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Max(f64),
    Min(f64),
}

impl Bound {
    fn with_value(self, v: f64) -> Self {
        match self {
            Bound::Max(_) => Bound::Max(v),
            Bound::Min(_) => Bound::Min(v),
        }
    }

    fn admits(self, v: f64) -> bool {
        match self {
            Bound::Max(m) => v < m,
            Bound::Min(m) => v >= m,
        }
    }
}

/// One measured deviation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub measured: f64,
    pub allowed: Bound,
    pub passed: bool,
}

impl Check {
    fn new(criterion: u8, name: &str, measured: f64, allowed: Bound) -> Self {
        Check {
            criterion,
            name: name.to_string(),
            measured,
            allowed,
            // NaN fails every bound
            passed: allowed.admits(measured),
        }
    }
}

/// Outcome of [`run_verify`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scorecard {
    pub config: VerifyConfig,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
}

impl Scorecard {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn criterion_passed(&self, criterion: u8) -> bool {
        self.checks.iter().filter(|c| c.criterion == criterion).all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Runs every check.
pub fn run_verify(config: &VerifyConfig) -> Result<Scorecard> {
    let params = BasisParams::new(config.x_mean, config.p_mean, config.a, config.hbar)?;
    let mut checks = Vec::new();
    checks.extend(orthonormality(&params)?);
    checks.extend(dispersion(&params)?);
    checks.extend(matrix_commutator(&params, config.injection)?);
    checks.extend(symbolic_commutators(&params)?);
    checks.extend(route_equivalence(&params)?);
    checks.extend(reconstruction(&params)?);
    checks.extend(multidim_commutators(config)?);
    checks.extend(dispersion_expansions(config)?);
    checks.extend(algebra_soundness(config.seed, config.cases)?);
    for (name, value) in &config.tolerances {
        let check = checks
            .iter_mut()
            .find(|c| &c.name == name)
            .ok_or_else(|| crate::Error::InvalidParameter(format!("no check named `{name}` to override")))?;
        *check = Check::new(check.criterion, name, check.measured, check.allowed.with_value(*value));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    Ok(Scorecard {
        config: config.clone(),
        passed: checks.len() - failed,
        failed,
        checks,
    })
}

fn im(v: f64) -> Complex64 {
    Complex64::new(0.0, v)
}

fn orthonormality(params: &BasisParams) -> Result<Vec<Check>> {
    const N: usize = 20;
    let start = Instant::now();
    let rule = gauss_hermite(quadrature_size(N))?;
    let mut dev: f64 = 0.0;
    for m in 0..=N {
        for n in 0..=N {
            let want = if m == n { 1.0 } else { 0.0 };
            dev = dev.max((overlap(m, n, params, &rule) - want).norm());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(vec![
        Check::new(1, "orthonormality", dev, Bound::Max(1e-10)),
        Check::new(1, "orthonormality_runtime_s", secs, Bound::Max(1.0)),
    ])
}

fn dispersion(params: &BasisParams) -> Result<Vec<Check>> {
    const N: usize = 32;
    let (sx, sp) = dispersion_matrices(params, N)?;
    let (a2, l2) = (params.a().powi(2), params.ell().powi(2));
    let (mut diag, mut off): (f64, f64) = (0.0, 0.0);
    for l in 0..=N - 3 {
        let k = (2 * l + 1) as f64;
        diag = diag
            .max((sx.get(l, l) - k * a2).norm() / (k * a2))
            .max((sp.get(l, l) - k * l2).norm() / (k * l2));
        for m in (0..=N - 3).filter(|&m| m != l) {
            off = off.max(sx.get(l, m).norm()).max(sp.get(l, m).norm());
        }
    }
    let rule = gauss_hermite(quadrature_size(10))?;
    let dx = params.a() * std::f64::consts::SQRT_2;
    let mut var: f64 = 0.0;
    for n in 0..=10 {
        let v: f64 = rule
            .nodes
            .iter()
            .zip(&rule.scaled_weights)
            .map(|(&u, &w)| {
                let x = params.x_mean + dx * u;
                w * dx * basis_wavefunction(n, x, params).norm_sqr() * (x - params.x_mean).powi(2)
            })
            .sum();
        let want = (2 * n + 1) as f64 * a2;
        var = var.max((v - want).abs() / want);
    }
    Ok(vec![
        Check::new(2, "dispersion_diagonal_relative", diag, Bound::Max(1e-10)),
        Check::new(2, "dispersion_off_diagonal", off, Bound::Max(1e-12)),
        Check::new(2, "quadrature_variance_relative", var, Bound::Max(1e-8)),
    ])
}

fn matrix_commutator(params: &BasisParams, injection: Option<Injection>) -> Result<Vec<Check>> {
    let orientation = match injection {
        Some(Injection::FlipXOrientation) => Orientation::Flipped,
        _ => Orientation::Standard,
    };
    let hbar = params.hbar();
    let (mut block, mut defect): (f64, f64) = (0.0, 0.0);
    for n in [4usize, 8, 16, 32] {
        let x = x_matrix_oriented(params, n, orientation)?.to_dense();
        let p = p_matrix(params, n)?.to_dense();
        let c = commutator(&x, &p)?;
        for l in 0..n {
            for m in 0..n {
                let v = c.get(l, m);
                if l + 1 == n && m + 1 == n {
                    defect = defect.max((v - im(-hbar * (n - 1) as f64)).norm());
                } else if l + 1 == n || m + 1 == n {
                    defect = defect.max(v.norm());
                } else {
                    block = block.max((v - if l == m { im(hbar) } else { Complex64::default() }).norm());
                }
            }
        }
    }
    Ok(vec![
        Check::new(3, "matrix_commutator_block", block, Bound::Max(1e-12)),
        Check::new(3, "matrix_commutator_defect", defect, Bound::Max(1e-12)),
    ])
}

fn symbolic_commutators(params: &BasisParams) -> Result<Vec<Check>> {
    let (mut frak, mut full): (f64, f64) = (0.0, 0.0);
    let one = DiffOpExpr::constant(1, im(1.0))?;
    let ihbar = DiffOpExpr::constant(1, im(params.hbar()))?;
    for alpha in [-1.0, -0.3, 0.0, 0.5, 2.0] {
        for ab in [
            AlphaBeta::Linked(alpha),
            AlphaBeta::Pair {
                alpha,
                beta: 0.4 - 0.7 * alpha,
            },
        ] {
            let c = build_x_frak(params, ab)?.commutator(&build_p_frak(params, ab)?)?;
            frak = frak.max(c.max_deviation(&one)?);
        }
        let ab = AlphaBeta::Linked(alpha);
        let c = build_x_hat(params, ab)?.commutator(&build_p_hat(params, ab)?)?;
        full = full.max(c.max_deviation(&ihbar)?);
    }
    Ok(vec![
        Check::new(4, "symbolic_commutator_frak", frak, Bound::Max(1e-13)),
        Check::new(4, "symbolic_commutator_full", full, Bound::Max(1e-13)),
    ])
}

fn route_equivalence(params: &BasisParams) -> Result<Vec<Check>> {
    let family = BasisFamily::new(params.a(), params.hbar())?.with_phase_origin(params.phase_origin());
    let psi = WaveFunction::gaussian(params.x_mean, params.p_mean, params.a());
    let grid = PhaseSpaceGrid::centered(params.x_mean, params.p_mean, 5.0 * params.a(), 5.0 * params.ell(), 64, 64)?;
    let report = route_consistency_report(&psi, &family, &grid, 6)?;
    Ok(vec![
        Check::new(5, "route_relative_error", report.max_relative_error, Bound::Max(1e-3)),
        Check::new(5, "route_order_min", report.min_order, Bound::Min(1.7)),
        Check::new(5, "route_order_max", report.max_order, Bound::Max(2.3)),
    ])
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn max_error(got: &[Complex64], xs: &[f64], psi: &WaveFunction, hbar: f64) -> f64 {
    got.iter().zip(xs).map(|(v, &x)| (v - psi.eval(x, hbar)).norm()).fold(0.0, f64::max)
}

fn reconstruction(params: &BasisParams) -> Result<Vec<Check>> {
    let (x0, p0, a, hbar, ell) = (params.x_mean, params.p_mean, params.a(), params.hbar(), params.ell());

    // band-limited: a combination of the first few basis states
    let band = WaveFunction::Combination(vec![
        (Complex64::new(0.6, 0.0), WaveFunction::hermite(0, x0, p0, a)),
        (Complex64::new(0.0, 0.5), WaveFunction::hermite(2, x0, p0, a)),
        (Complex64::new(-0.3, 0.4), WaveFunction::hermite(5, x0, p0, a)),
    ]);
    let coeffs = forward_coeffs(&band, params, 8)?;
    let xs = linspace(x0 - 6.0 * a, x0 + 6.0 * a, 121);
    let sum_err = max_error(&reconstruct_sum(&coeffs, &xs), &xs, &band, hbar);

    let family = BasisFamily::new(a, hbar)?.with_phase_origin(params.phase_origin());
    let psi = WaveFunction::gaussian(x0, p0, a);
    let peak = (a * std::f64::consts::SQRT_2).sqrt().recip() * crate::basis::PI_POW_NEG_QUARTER;
    let xs = linspace(x0 - 3.0 * a, x0 + 3.0 * a, 25);
    let integral_err = |grid: PhaseSpaceGrid| -> Result<f64> {
        let field = forward_field(&psi, 0, &grid, &family)?;
        Ok(max_error(&reconstruct_integral(&field, &xs).values, &xs, &psi, hbar) / peak)
    };
    let reference = integral_err(PhaseSpaceGrid::centered(x0, p0, 6.0 * a, 6.0 * ell, 64, 64)?)?;
    let coarse = PhaseSpaceGrid::centered(x0, p0, 10.0 * a, 10.0 * ell, 11, 11)?;
    let ratio = integral_err(coarse)? / integral_err(coarse.refined())?;

    let shifted = WaveFunction::gaussian(x0 + 2.0 * a, p0, a);
    let bessel = crate::transform::bessel_residual(&shifted, params, 40)?;
    Ok(vec![
        Check::new(6, "sum_route_round_trip", sum_err, Bound::Max(1e-8)),
        Check::new(6, "integral_route_relative_error", reference, Bound::Max(1e-3)),
        Check::new(6, "integral_route_refinement_ratio", ratio, Bound::Min(2.0)),
        Check::new(6, "bessel_residual", bessel.abs(), Bound::Max(1e-6)),
    ])
}

fn minkowski(d: usize) -> Vec<f64> {
    (0..d).map(|k| if k == 0 { 1.0 } else { -1.0 }).collect()
}

/// A random tensor pair meeting both the duality constraint and the metric
/// target: `a = S·η` with `S` symmetric positive definite, `b = (ħ/2)a⁻¹`.
pub fn random_dual_pair<R: Rng>(rng: &mut R, eta: Vec<f64>, hbar: f64) -> Result<ParamTensors> {
    let d = eta.len();
    let m = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-0.5..0.5));
    let s = &m * m.transpose() + DMatrix::identity(d, d) * rng.gen_range(0.5..1.5);
    ParamTensors::from_symmetric(&s, eta, hbar)
}

fn tensor_families(config: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<Vec<ParamTensors>> {
    let mut out = Vec::new();
    for d in [1usize, 2, 4] {
        let scales: Vec<f64> = (0..d).map(|k| 0.6 + 0.35 * k as f64).collect();
        out.push(ParamTensors::isotropic(minkowski(d), config.hbar)?);
        out.push(ParamTensors::diagonal(&scales, minkowski(d), config.hbar)?);
        for _ in 0..3 {
            out.push(random_dual_pair(rng, minkowski(d), config.hbar)?);
        }
    }
    if config.injection == Some(Injection::UnlinkDuality) {
        for t in &mut out {
            t.b *= 1.05;
        }
    }
    Ok(out)
}

fn multidim_commutators(config: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut dev: f64 = 0.0;
    for t in tensor_families(config, &mut rng)? {
        for conv in [SignConvention::Covariant, SignConvention::OneDim] {
            dev = dev.max(check_multidim_commutators(&t, conv, None)?.max());
        }
    }
    Ok(vec![Check::new(7, "multidim_commutators", dev, Bound::Max(1e-12))])
}

/// Closed-form expansions of the dispersion generators in the covariant
/// sign, written out term by term.
pub mod expansions {
    use super::*;

    struct Vars<'a> {
        t: &'a ParamTensors,
        d: usize,
    }

    impl Vars<'_> {
        fn x(&self, k: usize) -> DiffOpExpr {
            DiffOpExpr::x(self.d, k).unwrap().scale_re(self.t.eta[k])
        }
        fn p(&self, k: usize) -> DiffOpExpr {
            DiffOpExpr::p(self.d, k).unwrap().scale_re(self.t.eta[k])
        }
        fn dx(&self, k: usize) -> DiffOpExpr {
            DiffOpExpr::dx(self.d, k).unwrap()
        }
        fn dp(&self, k: usize) -> DiffOpExpr {
            DiffOpExpr::dp(self.d, k).unwrap()
        }
    }

    // products of commuting factors only, so composition is plain multiplication
    fn mul(a: &DiffOpExpr, b: &DiffOpExpr) -> DiffOpExpr {
        a.compose(b).unwrap()
    }

    fn sum(terms: impl IntoIterator<Item = DiffOpExpr>, d: usize) -> DiffOpExpr {
        terms.into_iter().fold(DiffOpExpr::zero(d).unwrap(), |acc, e| acc.add(&e).unwrap())
    }

    // −ħ²∂P^ρ∂P^σ + iħ(X_σ∂P^ρ + X_ρ∂P^σ) + X_ρX_σ
    fn pp_bracket(v: &Vars, rho: usize, sigma: usize) -> DiffOpExpr {
        let h = v.t.hbar;
        sum(
            [
                mul(&v.dp(rho), &v.dp(sigma)).scale_re(-h * h),
                mul(&v.x(sigma), &v.dp(rho))
                    .add(&mul(&v.x(rho), &v.dp(sigma)))
                    .unwrap()
                    .scale(im(h)),
                mul(&v.x(rho), &v.x(sigma)),
            ],
            v.d,
        )
    }

    // −ħ²∂X^λ∂X^ρ − iħ(P_ρ∂X^λ + P_λ∂X^ρ) + P_λP_ρ
    fn xx_bracket(v: &Vars, lam: usize, rho: usize) -> DiffOpExpr {
        let h = v.t.hbar;
        sum(
            [
                mul(&v.dx(lam), &v.dx(rho)).scale_re(-h * h),
                mul(&v.p(rho), &v.dx(lam)).add(&mul(&v.p(lam), &v.dx(rho))).unwrap().scale(im(-h)),
                mul(&v.p(lam), &v.p(rho)),
            ],
            v.d,
        )
    }

    // ħ²∂P^ρ∂X^λ + iħ(P_λ∂P^ρ − X_ρ∂X^λ) + P_λX_ρ
    fn px_bracket(v: &Vars, rho: usize, lam: usize) -> DiffOpExpr {
        let h = v.t.hbar;
        sum(
            [
                mul(&v.dp(rho), &v.dx(lam)).scale_re(h * h),
                mul(&v.p(lam), &v.dp(rho)).sub(&mul(&v.x(rho), &v.dx(lam))).unwrap().scale(im(h)),
                mul(&v.p(lam), &v.x(rho)),
            ],
            v.d,
        )
    }

    fn pp(v: &Vars, mu: usize, nu: usize) -> DiffOpExpr {
        let (b, h2) = (&v.t.b, v.t.hbar * v.t.hbar);
        sum(
            (0..v.d)
                .flat_map(|r| (0..v.d).map(move |s| (r, s)))
                .map(|(r, s)| pp_bracket(v, r, s).scale_re(b[(mu, r)] * b[(nu, s)] / h2)),
            v.d,
        )
    }

    fn xx(v: &Vars, mu: usize, nu: usize) -> DiffOpExpr {
        let (a, h2) = (&v.t.a, v.t.hbar * v.t.hbar);
        sum(
            (0..v.d)
                .flat_map(|l| (0..v.d).map(move |r| (l, r)))
                .map(|(l, r)| xx_bracket(v, l, r).scale_re(a[(mu, l)] * a[(nu, r)] / h2)),
            v.d,
        )
    }

    /// `(𝔷̂⁺, 𝔷̂⁻, 𝔷̂×)` for the index pair `(μ, ν)`.
    pub fn lowercase(t: &ParamTensors, mu: usize, nu: usize) -> [DiffOpExpr; 3] {
        let v = Vars { t, d: t.dim() };
        let (pp, xx) = (pp(&v, mu, nu), xx(&v, mu, nu));
        let h2 = t.hbar * t.hbar;
        let cross = sum(
            (0..v.d)
                .flat_map(|r| (0..v.d).map(move |l| (r, l)))
                .map(|(r, l)| px_bracket(&v, r, l).scale_re(0.5 * t.b[(mu, r)] * t.a[(nu, l)] / h2)),
            v.d,
        );
        [pp.add(&xx).unwrap().scale_re(0.25), pp.sub(&xx).unwrap().scale_re(0.25), cross]
    }

    /// Bold `(𝔷⁺, 𝔷⁻, 𝔷×)`. The `P ∂X` terms of `𝔷±` carry `−iħ`.
    pub fn bold(t: &ParamTensors, mu: usize, nu: usize) -> [DiffOpExpr; 3] {
        let v = Vars { t, d: t.dim() };
        let big_b = t.big_b();
        let h = t.hbar;
        let bb = sum(
            (0..v.d)
                .flat_map(|r| (0..v.d).map(move |l| (r, l)))
                .map(|(r, l)| pp_bracket(&v, r, l).scale_re(big_b[(mu, r)] * big_b[(nu, l)] / (h * h))),
            v.d,
        );
        let quarter = xx_bracket(&v, mu, nu).scale_re(0.25);
        let cross = sum((0..v.d).map(|r| px_bracket(&v, r, nu).scale_re(big_b[(mu, r)] / h)), v.d);
        [bb.add(&quarter).unwrap(), bb.sub(&quarter).unwrap(), cross]
    }
}

fn dispersion_expansions(config: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
    let mut tensors = vec![ParamTensors::diagonal(&[0.7, 1.3], minkowski(2), config.hbar)?];
    tensors.push(random_dual_pair(&mut rng, minkowski(2), config.hbar)?);
    if config.injection == Some(Injection::UnlinkDuality) {
        for t in &mut tensors {
            t.b *= 1.05;
        }
    }
    let mut dev: f64 = 0.0;
    for t in &tensors {
        for mu in 0..2 {
            for nu in 0..2 {
                let g = build_dispersion_generators(t, mu, nu, SignConvention::Covariant)?;
                let low = expansions::lowercase(t, mu, nu);
                let bold = expansions::bold(t, mu, nu);
                for (got, want) in [&g.z_plus, &g.z_minus, &g.z_cross, &g.bold_plus, &g.bold_minus, &g.bold_cross]
                    .into_iter()
                    .zip(low.iter().chain(bold.iter()))
                {
                    dev = dev.max(got.relative_deviation(want)?);
                }
            }
        }
    }
    let (fd_err, order) = dispersion_grid_oracle(config.hbar)?;
    Ok(vec![
        Check::new(8, "dispersion_expansions", dev, Bound::Max(1e-12)),
        Check::new(8, "dispersion_grid_relative_error", fd_err, Bound::Max(1e-2)),
        Check::new(8, "dispersion_grid_order", order, Bound::Min(1.7)),
    ])
}

/// Applies the composed one-dimensional generators to a smooth test field
/// in one finite-difference pass and as nested first-order passes; the two
/// agree up to the stencil error. Returns the fine-grid relative
/// difference and the worst convergence order.
fn dispersion_grid_oracle(hbar: f64) -> Result<(f64, f64)> {
    let t = ParamTensors::diagonal(&[0.9], vec![1.0], hbar)?;
    let family = BasisFamily::new(0.9, hbar)?;
    let conv = SignConvention::Covariant;
    let p = build_p_hat_mu(&t, 0, Variant::Frak, conv, None)?;
    let x = build_x_hat_nu(&t, 0, Variant::Frak, conv, None)?;
    let g = build_dispersion_generators(&t, 0, 0, conv)?;
    let field = |n: usize| {
        let grid = PhaseSpaceGrid::centered(0.1, -0.2, 4.0, 4.0, n, n).unwrap();
        PhaseSpaceField::from_fn(grid, 0, family, |xm, pm| {
            let (u, v) = (xm - 0.3, pm + 0.1);
            Complex64::from_polar((-u * u / 2.0 - v * v / 1.5).exp(), 0.7 * xm - 0.4 * pm)
        })
    };
    let diff = |n: usize, op: usize| -> Result<f64> {
        let f = field(n);
        let fd = |e: &DiffOpExpr, f: &PhaseSpaceField| apply_fd(e, f);
        let (single, nested) = match op {
            0 => (fd(&g.z_plus, &f)?, {
                let pp = fd(&p, &fd(&p, &f)?)?;
                let xx = fd(&x, &fd(&x, &f)?)?;
                (pp.values + xx.values) * Complex64::new(0.25, 0.0)
            }),
            1 => (fd(&g.z_minus, &f)?, {
                let pp = fd(&p, &fd(&p, &f)?)?;
                let xx = fd(&x, &fd(&x, &f)?)?;
                (pp.values - xx.values) * Complex64::new(0.25, 0.0)
            }),
            _ => (fd(&g.z_cross, &f)?, {
                let px = fd(&p, &fd(&x, &f)?)?;
                let xp = fd(&x, &fd(&p, &f)?)?;
                (px.values + xp.values) * Complex64::new(0.25, 0.0)
            }),
        };
        let nested = PhaseSpaceField {
            values: nested,
            ..single.clone()
        };
        Ok(interior_max_diff(&single, &nested) / single.max_abs().max(f.max_abs()))
    };
    let (mut worst_err, mut worst_order): (f64, f64) = (0.0, f64::INFINITY);
    for op in 0..3 {
        let (coarse, fine) = (diff(65, op)?, diff(129, op)?);
        worst_err = worst_err.max(fine);
        worst_order = worst_order.min(convergence_order(coarse, fine));
    }
    Ok((worst_err, worst_order))
}

fn random_expr(rng: &mut ChaCha8Rng, dim: usize) -> DiffOpExpr {
    let mut e = DiffOpExpr::zero(dim).unwrap();
    for _ in 0..rng.gen_range(1..=3) {
        let mut m = Monomial::ONE;
        for _ in 0..rng.gen_range(0..=3) {
            let k = rng.gen_range(0..dim);
            match rng.gen_range(0..4) {
                0 => m.xpow[k] += 1,
                1 => m.ppow[k] += 1,
                2 => m.dxpow[k] += 1,
                _ => m.dppow[k] += 1,
            }
        }
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        e = e.add(&DiffOpExpr::term(dim, c, m).unwrap()).unwrap();
    }
    e
}

fn random_poly(rng: &mut ChaCha8Rng, dim: usize) -> Polynomial {
    let mut q = Polynomial::zero(dim).unwrap();
    for _ in 0..rng.gen_range(1..=4) {
        let (mut xa, mut pb) = ([0u16; 4], [0u16; 4]);
        for _ in 0..rng.gen_range(0..=3) {
            let k = rng.gen_range(0..dim);
            if rng.gen_bool(0.5) {
                xa[k] += 1;
            } else {
                pb[k] += 1;
            }
        }
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        q = q.add(&Polynomial::monomial(dim, c, xa, pb).unwrap()).unwrap();
    }
    q
}

fn algebra_soundness(seed: u64, cases: usize) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(9));
    let (mut assoc, mut hom, mut jacobi): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for case in 0..cases {
        let dim = 1 + case % 2;
        let (a, b, c) = (random_expr(&mut rng, dim), random_expr(&mut rng, dim), random_expr(&mut rng, dim));
        assoc = assoc.max(a.compose(&b)?.compose(&c)?.relative_deviation(&a.compose(&b.compose(&c)?)?)?);

        let q = random_poly(&mut rng, dim);
        let lhs = apply_to_polynomial(&a.compose(&b)?, &q)?;
        let rhs = apply_to_polynomial(&a, &apply_to_polynomial(&b, &q)?)?;
        hom = hom.max(lhs.relative_deviation(&rhs));

        let j = a
            .commutator(&b.commutator(&c)?)?
            .add(&b.commutator(&c.commutator(&a)?)?)?
            .add(&c.commutator(&a.commutator(&b)?)?)?;
        jacobi = jacobi.max(j.relative_deviation(&DiffOpExpr::zero(dim)?)?);
    }
    Ok(vec![
        Check::new(9, "algebra_associativity", assoc, Bound::Max(1e-10)),
        Check::new(9, "algebra_action_homomorphism", hom, Bound::Max(1e-10)),
        Check::new(9, "algebra_jacobi", jacobi, Bound::Max(1e-10)),
        Check::new(9, "algebra_cases", cases as f64, Bound::Min(200.0)),
    ])
}
