//! `phasekit` command-line front end.
//!
//! Every subcommand reads an optional JSON config (`--config`) and lets
//! flags override it. ħ falls back to `PHASEKIT_HBAR`, then to 1.
//!
//! Exit codes: 0 success, 1 failed verification, 2 invalid input.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;

use crate::basis::{BasisParams, PhaseOrigin};
use crate::diffop::{
    build_p_frak, build_p_hat, build_x_frak, build_x_hat, build_z_hat_1d, induced_p_frak, induced_x_frak, AlphaBeta, DiffOpExpr,
    SignConvention,
};
use crate::error::{Error, Result};
use crate::io;
use crate::matrix::NamedOperator;
use crate::multidim::{build_dispersion_generators, build_p_hat_mu, build_x_hat_nu, validate_tensors, Couplings, ParamTensors, Variant};
use crate::transform::{
    forward_coeffs, forward_field, reconstruct_integral, reconstruct_sum, CoefficientVector, PhaseSpaceGrid, WaveFunction,
};
use crate::verify::{run_verify, Bound, Injection, VerifyConfig};

/// Environment variable holding the default ħ.
pub const HBAR_ENV: &str = "PHASEKIT_HBAR";

#[derive(Debug, Parser)]
#[command(
    name = "phasekit",
    version,
    about = "Hermite-Gaussian phase-space transforms, matrices and operator algebra"
)]
pub struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficients Ψⁿ(X, P) of a wave function, and optionally one Ψⁿ field.
    Transform(TransformArgs),
    /// Rebuild ψ(x) from a coefficient file or from a field file.
    Reconstruct(ReconstructArgs),
    /// Dump the nonzero entries of a truncated operator matrix.
    Matrices(MatricesArgs),
    /// Render operator expressions and commutators.
    Algebra(AlgebraArgs),
    /// Run the check suite and write a scorecard.
    Verify(VerifyArgs),
}

#[derive(Debug, Default, Args)]
pub struct BasisArgs {
    /// Coordinate mean X.
    #[arg(long = "X", allow_hyphen_values = true)]
    pub x_mean: Option<f64>,
    /// Momentum mean P.
    #[arg(long = "P", allow_hyphen_values = true)]
    pub p_mean: Option<f64>,
    /// Coordinate width a.
    #[arg(long)]
    pub a: Option<f64>,
    /// ħ; falls back to the config, then PHASEKIT_HBAR, then 1.
    #[arg(long)]
    pub hbar: Option<f64>,
    /// `x` or `x-X`.
    #[arg(long)]
    pub phase_origin: Option<PhaseOrigin>,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Highest basis index kept (default 8).
    #[arg(long)]
    pub n_max: Option<usize>,
    /// `gaussian` or `hermite`.
    #[arg(long)]
    pub preset: Option<Preset>,
    /// Index of the `hermite` preset.
    #[arg(long)]
    pub n0: Option<usize>,
    /// Preset centre in x.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    /// Preset momentum.
    #[arg(long, allow_hyphen_values = true)]
    pub p0: Option<f64>,
    /// Preset width.
    #[arg(long)]
    pub a0: Option<f64>,
    /// Sampled ψ as an `x,re,im` CSV; replaces the preset.
    #[arg(long, value_name = "FILE")]
    pub psi: Option<PathBuf>,
    /// Coefficient JSON output (stdout when absent).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Also sample Ψⁿ for this n over the grid.
    #[arg(long)]
    pub field_n: Option<usize>,
    /// Field CSV output; the JSON sidecar goes next to it.
    #[arg(long, value_name = "FILE")]
    pub field_out: Option<PathBuf>,
    /// Points per axis of the default grid.
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// Half-width of the default grid in units of a and ℓ.
    #[arg(long)]
    pub grid_extent: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Coefficient JSON from `transform` (sum over n).
    #[arg(long, value_name = "FILE", conflicts_with = "field")]
    pub coeffs: Option<PathBuf>,
    /// Field CSV from `transform` (integral over phase space).
    #[arg(long, value_name = "FILE")]
    pub field: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    #[arg(long, default_value_t = 161)]
    pub points: usize,
    /// `x,re,im` CSV of the original ψ; the max residual goes to stderr.
    #[arg(long, value_name = "FILE")]
    pub reference: Option<PathBuf>,
    /// `x,re,im` output (stdout when absent).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MatricesArgs {
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Operator name, e.g. `x`, `p`, `sigma_x`, `z_plus`.
    #[arg(long)]
    pub op: NamedOperator,
    /// Truncation size.
    #[arg(long = "N")]
    pub size: Option<usize>,
    /// `n,m,re,im` output (stdout when absent).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AlgebraArgs {
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Render one operator: x, p, x_frak, p_frak, z_plus, z_minus, z_cross,
    /// and in one dimension also induced_x, induced_p; with tensors also
    /// bold_z_plus, bold_z_minus, bold_z_cross.
    #[arg(long, value_name = "OP")]
    pub show: Vec<String>,
    /// Render `[A, B]`.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pub commutator: Option<Vec<String>>,
    /// Gauge coefficient α (default 0).
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Independent β; when absent β is linked to α.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// `one-dim` or `covariant`.
    #[arg(long)]
    pub convention: Option<SignConvention>,
    /// Tensor JSON switching to the multidimensional operators.
    #[arg(long, value_name = "FILE")]
    pub tensors: Option<PathBuf>,
    /// Index of the first operator.
    #[arg(long, default_value_t = 0)]
    pub mu: usize,
    /// Index of the second operator.
    #[arg(long, default_value_t = 0)]
    pub nu: usize,
    /// Text output (stdout when absent).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub basis: BasisArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Cases per randomized algebra property.
    #[arg(long)]
    pub cases: Option<usize>,
    /// `flip-x-orientation` or `unlink-duality`.
    #[arg(long)]
    pub inject: Option<Injection>,
    /// Scorecard JSON output (stdout when absent).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Gaussian,
    Hermite,
}

/// Contents of `--config`. Every section is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub basis: BasisSection,
    pub n_max: Option<usize>,
    #[serde(default)]
    pub psi: PsiSection,
    pub grid: Option<PhaseSpaceGrid>,
    pub field_n: Option<usize>,
    #[serde(default)]
    pub output: OutputSection,
    pub tensors: Option<ParamTensors>,
    pub verify: Option<VerifyConfig>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSection {
    #[serde(rename = "X")]
    pub x_mean: Option<f64>,
    #[serde(rename = "P")]
    pub p_mean: Option<f64>,
    pub a: Option<f64>,
    pub hbar: Option<f64>,
    pub phase_origin: Option<PhaseOrigin>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiSection {
    pub preset: Option<Preset>,
    pub csv: Option<PathBuf>,
    pub n0: Option<usize>,
    pub x0: Option<f64>,
    pub p0: Option<f64>,
    pub a0: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub coeffs: Option<PathBuf>,
    pub field: Option<PathBuf>,
}

impl RunConfig {
    /// Reads a config; relative paths inside it resolve against its folder.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: RunConfig = io::read_json(path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(q) = p.as_mut() {
                if q.is_relative() {
                    *q = base.join(&*q);
                }
            }
        };
        fix(&mut cfg.psi.csv);
        fix(&mut cfg.output.coeffs);
        fix(&mut cfg.output.field);
        Ok(cfg)
    }
}

fn env_hbar() -> Result<Option<f64>> {
    match std::env::var(HBAR_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidParameter(format!("{HBAR_ENV} must be a number, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn resolve_basis(flags: &BasisArgs, cfg: &BasisSection) -> Result<BasisParams> {
    let hbar = match flags.hbar.or(cfg.hbar) {
        Some(h) => h,
        None => env_hbar()?.unwrap_or(1.0),
    };
    let params = BasisParams::new(
        flags.x_mean.or(cfg.x_mean).unwrap_or(0.0),
        flags.p_mean.or(cfg.p_mean).unwrap_or(0.0),
        flags.a.or(cfg.a).unwrap_or(1.0),
        hbar,
    )?;
    Ok(params.with_phase_origin(flags.phase_origin.or(cfg.phase_origin).unwrap_or_default()))
}

/// Writes to `path`, or to stdout when there is none.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => io::write_text(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| Error::Write {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn emit_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    match path {
        Some(p) => io::write_json(p, value),
        None => {
            let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            text.push('\n');
            emit(None, &text)
        }
    }
}

fn cmd_transform(args: &TransformArgs, cfg: &RunConfig) -> Result<()> {
    let params = resolve_basis(&args.basis, &cfg.basis)?;
    let n_max = args.n_max.or(cfg.n_max).unwrap_or(8);
    let psi_csv = args.psi.clone().or_else(|| cfg.psi.csv.clone());
    let psi = match psi_csv {
        Some(path) => {
            let (xs, values) = io::read_wave_csv(&path)?;
            WaveFunction::sampled(xs, values).map_err(|e| Error::Format {
                path: path.clone(),
                message: e.to_string(),
            })?
        }
        None => {
            let n0 = args.n0.or(cfg.psi.n0).unwrap_or(0);
            let preset = args
                .preset
                .or(cfg.psi.preset)
                .unwrap_or(if n0 > 0 { Preset::Hermite } else { Preset::Gaussian });
            let x0 = args.x0.or(cfg.psi.x0).unwrap_or(params.x_mean);
            let p0 = args.p0.or(cfg.psi.p0).unwrap_or(params.p_mean);
            let a0 = args.a0.or(cfg.psi.a0).unwrap_or(params.a());
            match preset {
                Preset::Gaussian => WaveFunction::gaussian(x0, p0, a0),
                Preset::Hermite => WaveFunction::hermite(n0, x0, p0, a0),
            }
        }
    };

    let coeffs = forward_coeffs(&psi, &params, n_max)?;
    if coeffs.truncated_support {
        eprintln!("warning: sampled ψ does not cover [X − 8a, X + 8a]; coefficients may be inaccurate");
    }
    if coeffs.not_normalized {
        eprintln!("warning: ψ is not normalized");
    }
    emit_json(args.out.as_deref().or(cfg.output.coeffs.as_deref()), &coeffs)?;

    if let Some(n) = args.field_n.or(cfg.field_n) {
        let out = args
            .field_out
            .clone()
            .or_else(|| cfg.output.field.clone())
            .ok_or_else(|| Error::InvalidParameter("--field-n needs --field-out".to_string()))?;
        let grid = match (args.grid_size, args.grid_extent, cfg.grid) {
            (None, None, Some(g)) => g,
            (size, extent, _) => {
                let (k, m) = (extent.unwrap_or(6.0), size.unwrap_or(64));
                PhaseSpaceGrid::centered(params.x_mean, params.p_mean, k * params.a(), k * params.ell(), m, m)?
            }
        };
        let field = forward_field(&psi, n, &grid, &params.family)?;
        if field.truncated_support {
            eprintln!("warning: sampled ψ does not cover the support needed at every grid point");
        }
        io::write_field(&out, &field)?;
    }
    Ok(())
}

fn cmd_reconstruct(args: &ReconstructArgs) -> Result<()> {
    let linspace = |lo: f64, hi: f64| -> Result<Vec<f64>> {
        if args.points < 2 || !(hi > lo) {
            return Err(Error::InvalidParameter("need --points ≥ 2 and x_max > x_min".to_string()));
        }
        Ok((0..args.points)
            .map(|k| lo + (hi - lo) * k as f64 / (args.points - 1) as f64)
            .collect())
    };
    let (xs, values, hbar) = match (&args.coeffs, &args.field) {
        (Some(path), None) => {
            let c: CoefficientVector = io::read_json(path)?;
            c.params.validate().map_err(|e| Error::Format {
                path: path.clone(),
                message: e.to_string(),
            })?;
            if c.coeffs.len() != c.n_max + 1 {
                return Err(Error::Format {
                    path: path.clone(),
                    message: format!("{} coefficients for n_max = {}", c.coeffs.len(), c.n_max),
                });
            }
            let (x0, a) = (c.params.x_mean, c.params.a());
            let xs = linspace(args.x_min.unwrap_or(x0 - 8.0 * a), args.x_max.unwrap_or(x0 + 8.0 * a))?;
            let values = reconstruct_sum(&c, &xs);
            (xs, values, c.params.hbar())
        }
        (None, Some(path)) => {
            let field = io::read_field(path)?;
            let g = field.grid;
            let xs = linspace(args.x_min.unwrap_or(g.x_min), args.x_max.unwrap_or(g.x_max))?;
            let rec = reconstruct_integral(&field, &xs);
            if rec.domain_truncated {
                eprintln!("warning: the field grid does not cover the support of Ψⁿ");
            }
            (xs, rec.values, field.family.hbar)
        }
        _ => return Err(Error::InvalidParameter("give exactly one of --coeffs or --field".to_string())),
    };
    if let Some(path) = &args.reference {
        let (rx, rv) = io::read_wave_csv(path)?;
        let reference = WaveFunction::sampled(rx, rv).map_err(|e| Error::Format {
            path: path.clone(),
            message: e.to_string(),
        })?;
        let residual = xs
            .iter()
            .zip(&values)
            .map(|(&x, v)| (v - reference.eval(x, hbar)).norm())
            .fold(0.0, f64::max);
        eprintln!("residual: {residual}");
    }
    emit(args.out.as_deref(), &io::wave_csv(&xs, &values)?)
}

fn cmd_matrices(args: &MatricesArgs, cfg: &RunConfig) -> Result<()> {
    let params = resolve_basis(&args.basis, &cfg.basis)?;
    let n = args.size.or(cfg.n_max.map(|k| k + 1)).unwrap_or(8);
    let m = args.op.build(&params, n)?;
    emit(args.out.as_deref(), &io::matrix_csv(&m.nonzeros()))
}

/// `c` as a real multiple of `i·scale`, written with `symbol`.
fn as_i_multiple(c: Complex64, (scale, symbol): (f64, &str)) -> Option<String> {
    if c.re.abs() > 1e-12 * c.norm().max(1.0) {
        return None;
    }
    let k = c.im / scale;
    let rounded = k.round();
    let k = if (k - rounded).abs() < 1e-12 { rounded } else { k };
    Some(match k {
        1.0 => symbol.to_string(),
        -1.0 => format!("-{symbol}"),
        k => format!("{k}{symbol}"),
    })
}

struct AlgebraContext {
    dim: usize,
    hbar: f64,
    build: Box<dyn Fn(&str, usize) -> Result<DiffOpExpr>>,
}

fn one_dim_context(params: BasisParams, ab: AlphaBeta, conv: SignConvention) -> Result<AlgebraContext> {
    let hbar = params.hbar();
    if conv == SignConvention::Covariant {
        let t = ParamTensors::diagonal(&[params.a()], vec![1.0], hbar)?;
        let couplings = Couplings {
            alpha: nalgebra::DMatrix::from_element(1, 1, ab.alpha()),
            beta: nalgebra::DMatrix::from_element(1, 1, ab.beta(&params)),
        };
        return tensor_context(t, Some(couplings), conv);
    }
    let build = move |name: &str, _: usize| -> Result<DiffOpExpr> {
        let z = || build_z_hat_1d(&params, conv);
        match name {
            "x" => build_x_hat(&params, ab),
            "p" => build_p_hat(&params, ab),
            "x_frak" => build_x_frak(&params, ab),
            "p_frak" => build_p_frak(&params, ab),
            "z_plus" => Ok(z()?.plus),
            "z_minus" => Ok(z()?.minus),
            "z_cross" => Ok(z()?.cross),
            "induced_x" => induced_x_frak(&params),
            "induced_p" => induced_p_frak(&params),
            other => Err(Error::Unsupported(format!("`{other}` in one dimension"))),
        }
    };
    Ok(AlgebraContext {
        dim: 1,
        hbar,
        build: Box::new(build),
    })
}

fn tensor_context(t: ParamTensors, couplings: Option<Couplings>, conv: SignConvention) -> Result<AlgebraContext> {
    let (dim, hbar) = (t.dim(), t.hbar);
    let build = move |name: &str, idx: usize| -> Result<DiffOpExpr> {
        let ab = couplings.as_ref();
        let z = |k: usize| -> Result<DiffOpExpr> {
            let g = build_dispersion_generators(&t, idx / dim, idx % dim, conv)?;
            Ok([g.z_plus, g.z_minus, g.z_cross, g.bold_plus, g.bold_minus, g.bold_cross][k].clone())
        };
        match name {
            "x" => build_x_hat_nu(&t, idx, Variant::Full, conv, ab),
            "p" => build_p_hat_mu(&t, idx, Variant::Full, conv, ab),
            "x_frak" => build_x_hat_nu(&t, idx, Variant::Frak, conv, ab),
            "p_frak" => build_p_hat_mu(&t, idx, Variant::Frak, conv, ab),
            "z_plus" => z(0),
            "z_minus" => z(1),
            "z_cross" => z(2),
            "bold_z_plus" => z(3),
            "bold_z_minus" => z(4),
            "bold_z_cross" => z(5),
            other => Err(Error::Unsupported(format!("`{other}` with tensors"))),
        }
    };
    Ok(AlgebraContext {
        dim,
        hbar,
        build: Box::new(build),
    })
}

fn is_pair_generator(name: &str) -> bool {
    name.contains("z_")
}

fn cmd_algebra(args: &AlgebraArgs, cfg: &RunConfig) -> Result<()> {
    let tensors = match &args.tensors {
        Some(path) => Some(io::read_json::<ParamTensors>(path)?),
        None => cfg.tensors.clone(),
    };
    let ctx = match tensors {
        Some(t) => {
            let v = validate_tensors(&t);
            if !v.valid {
                eprintln!(
                    "warning: tensors miss b·a = (ħ/2)I by {:.1e} or aη symmetry by {:.1e}; commutators will be off target",
                    v.duality_deviation, v.eta_deviation
                );
            }
            let conv = args.convention.unwrap_or(SignConvention::Covariant);
            let d = t.dim();
            let couplings = match (args.alpha, args.beta) {
                (None, None) => None,
                (alpha, beta) => Some(Couplings {
                    alpha: nalgebra::DMatrix::identity(d, d) * alpha.unwrap_or(0.0),
                    beta: nalgebra::DMatrix::identity(d, d) * beta.unwrap_or(0.0),
                }),
            };
            tensor_context(t, couplings, conv)?
        }
        None => {
            let params = resolve_basis(&args.basis, &cfg.basis)?;
            let alpha = args.alpha.unwrap_or(0.0);
            let ab = match args.beta {
                Some(beta) => AlphaBeta::Pair { alpha, beta },
                None => AlphaBeta::Linked(alpha),
            };
            one_dim_context(params, ab, args.convention.unwrap_or(SignConvention::OneDim))?
        }
    };
    let index = |name: &str, first: bool| {
        let k = if first { args.mu } else { args.nu };
        if is_pair_generator(name) {
            args.mu * ctx.dim + args.nu
        } else {
            k
        }
    };
    let label = |name: &str, first: bool| {
        if ctx.dim == 1 {
            name.to_string()
        } else if is_pair_generator(name) {
            format!("{name}[{},{}]", args.mu, args.nu)
        } else {
            format!("{name}[{}]", if first { args.mu } else { args.nu })
        }
    };

    let mut text = String::new();
    for name in &args.show {
        let e = (ctx.build)(name, index(name, true))?;
        text.push_str(&format!("{} = {}\n", label(name, true), e.render()));
    }
    if let Some(pair) = &args.commutator {
        let (a, b) = (&pair[0], &pair[1]);
        let ea = (ctx.build)(a, index(a, true))?;
        let eb = (ctx.build)(b, index(b, false))?;
        let c = ea.commutator(&eb)?;
        // a pure multiple of iħ is shown symbolically
        let constant = c
            .terms()
            .next()
            .filter(|(m, _)| c.len() == 1 && m.degree() == 0 && m.derivative_order() == 0);
        let full = |n: &str| n == "x" || n == "p";
        let unit = if full(a) && full(b) { (ctx.hbar, "iħ") } else { (1.0, "i") };
        let rendered = constant.and_then(|(_, v)| as_i_multiple(*v, unit)).unwrap_or_else(|| c.render());
        text.push_str(&format!("[{}, {}] = {rendered}\n", label(a, true), label(b, false)));
    }
    if text.is_empty() {
        return Err(Error::InvalidParameter(
            "nothing to render: pass --show or --commutator".to_string(),
        ));
    }
    emit(args.out.as_deref(), &text)
}

fn describe(bound: Bound) -> String {
    match bound {
        Bound::Max(v) => format!("< {v:e}"),
        Bound::Min(v) => format!(">= {v}"),
    }
}

fn cmd_verify(args: &VerifyArgs, cfg: &RunConfig) -> Result<bool> {
    let mut config = cfg.verify.clone().unwrap_or_default();
    let b = &args.basis;
    let merged = BasisSection {
        x_mean: b.x_mean.or(cfg.basis.x_mean).or(cfg.verify.as_ref().map(|v| v.x_mean)),
        p_mean: b.p_mean.or(cfg.basis.p_mean).or(cfg.verify.as_ref().map(|v| v.p_mean)),
        a: b.a.or(cfg.basis.a).or(cfg.verify.as_ref().map(|v| v.a)),
        hbar: b.hbar.or(cfg.basis.hbar).or(cfg.verify.as_ref().map(|v| v.hbar)),
        phase_origin: None,
    };
    let defaults = VerifyConfig::default();
    config.x_mean = merged.x_mean.unwrap_or(defaults.x_mean);
    config.p_mean = merged.p_mean.unwrap_or(defaults.p_mean);
    config.a = merged.a.unwrap_or(defaults.a);
    config.hbar = match merged.hbar {
        Some(h) => h,
        None => env_hbar()?.unwrap_or(defaults.hbar),
    };
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(c) = args.cases {
        config.cases = c;
    }
    if args.inject.is_some() {
        config.injection = args.inject;
    }
    let card = run_verify(&config)?;
    emit_json(args.out.as_deref(), &card)?;
    for c in card.failures() {
        eprintln!(
            "FAIL criterion {} {}: measured {:e}, allowed {}",
            c.criterion,
            c.name,
            c.measured,
            describe(c.allowed)
        );
    }
    eprintln!("{} passed, {} failed", card.passed, card.failed);
    Ok(card.all_passed())
}

/// Runs one parsed invocation; `Ok(false)` means a failed verification.
pub fn run(cli: &Cli) -> Result<bool> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    match &cli.command {
        Command::Transform(a) => cmd_transform(a, &cfg).map(|_| true),
        Command::Reconstruct(a) => cmd_reconstruct(a).map(|_| true),
        Command::Matrices(a) => cmd_matrices(a, &cfg).map(|_| true),
        Command::Algebra(a) => cmd_algebra(a, &cfg).map(|_| true),
        Command::Verify(a) => cmd_verify(a, &cfg),
    }
}

/// Entry point of the `phasekit` binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn i_hbar_rendering() {
        assert_eq!(as_i_multiple(Complex64::new(0.0, 1.3), (1.3, "iħ")).unwrap(), "iħ");
        assert_eq!(as_i_multiple(Complex64::new(0.0, -2.6), (1.3, "iħ")).unwrap(), "-2iħ");
        assert_eq!(as_i_multiple(Complex64::new(0.0, 1.0 + 1e-15), (1.0, "i")).unwrap(), "i");
        assert!(as_i_multiple(Complex64::new(1.0, 1.0), (1.0, "i")).is_none());
    }

    #[test]
    fn config_sections() {
        let json = r#"{"basis": {"X": 0.5, "a": 0.8, "phase_origin": "x-X"}, "n_max": 4, "psi": {"csv": "psi.csv"}}"#;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, json).unwrap();
        let cfg = RunConfig::load(&path).unwrap();
        assert_eq!(cfg.psi.csv.unwrap(), dir.path().join("psi.csv"));
        let flags = BasisArgs {
            a: Some(0.6),
            hbar: Some(2.0),
            ..Default::default()
        };
        let p = resolve_basis(&flags, &cfg.basis).unwrap();
        assert_eq!((p.x_mean, p.a(), p.hbar()), (0.5, 0.6, 2.0));
        assert_eq!(p.phase_origin(), PhaseOrigin::Centered);
        std::fs::write(&path, r#"{"bogus": 1}"#).unwrap();
        assert!(RunConfig::load(&path).is_err());
    }
}
