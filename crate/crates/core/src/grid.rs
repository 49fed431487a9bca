//! Operators applied to phase-space fields, two ways: finite differences
//! of a [`DiffOpExpr`], and the exact ladder recurrences that couple
//! neighbouring `Ψⁿ`. Agreement of the two is the consistency check at the
//! heart of the representation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::basis::{BasisFamily, PhaseOrigin};
use crate::diffop::{build_p_frak, build_x_frak, induced_p_frak, induced_x_frak, AlphaBeta, DiffOpExpr};
use crate::error::{Error, Result};
use crate::transform::{forward_fields, PhaseSpaceField, PhaseSpaceGrid, WaveFunction};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Smallest grid side for the boundary stencils.
pub const MIN_STENCIL_POINTS: usize = 5;

/// Accepted band for the observed convergence order.
pub const ORDER_BAND: (f64, f64) = (1.7, 2.3);

/// `Ψ⁰ … Ψ^{n_max}` of one state on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldStack {
    pub grid: PhaseSpaceGrid,
    pub family: BasisFamily,
    pub fields: Vec<PhaseSpaceField>,
}

impl FieldStack {
    pub fn new(fields: Vec<PhaseSpaceField>) -> Result<Self> {
        let first = fields
            .first()
            .ok_or_else(|| Error::InvalidParameter("a field stack needs at least one field".to_string()))?;
        let (grid, family) = (first.grid, first.family);
        for (n, f) in fields.iter().enumerate() {
            if f.grid != grid || f.family != family || f.n != n {
                return Err(Error::InvalidParameter(format!(
                    "field {n} does not match the stack (grid, basis family and index must line up)"
                )));
            }
        }
        Ok(FieldStack { grid, family, fields })
    }

    /// Transforms `psi` onto `grid` for every `n ≤ n_max`.
    pub fn compute(psi: &WaveFunction, family: &BasisFamily, grid: &PhaseSpaceGrid, n_max: usize) -> Result<Self> {
        Self::new(forward_fields(psi, n_max, grid, family)?)
    }

    pub fn n_max(&self) -> usize {
        self.fields.len() - 1
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for f in &mut out.fields {
            f.values *= s;
        }
        out
    }

    pub fn add(&self, other: &FieldStack) -> Result<Self> {
        if self.grid != other.grid || self.fields.len() != other.fields.len() {
            return Err(Error::SizeMismatch {
                left: self.fields.len(),
                right: other.fields.len(),
            });
        }
        let mut out = self.clone();
        for (f, g) in out.fields.iter_mut().zip(&other.fields) {
            f.values += &g.values;
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Axis {
    X,
    P,
}

// d/dX (rows) or d/dP (columns): central inside, one-sided second order at
// the two ends.
fn first_derivative(v: &DMatrix<Complex64>, axis: Axis, h: f64) -> DMatrix<Complex64> {
    let (nr, nc) = v.shape();
    let len = if axis == Axis::X { nr } else { nc };
    let at = |k: usize, other: usize| if axis == Axis::X { v[(k, other)] } else { v[(other, k)] };
    DMatrix::from_fn(nr, nc, |i, j| {
        let (k, other) = if axis == Axis::X { (i, j) } else { (j, i) };
        if k == 0 {
            (at(0, other) * -3.0 + at(1, other) * 4.0 - at(2, other)) / (2.0 * h)
        } else if k + 1 == len {
            (at(len - 1, other) * 3.0 - at(len - 2, other) * 4.0 + at(len - 3, other)) / (2.0 * h)
        } else {
            (at(k + 1, other) - at(k - 1, other)) / (2.0 * h)
        }
    })
}

fn second_derivative(v: &DMatrix<Complex64>, axis: Axis, h: f64) -> DMatrix<Complex64> {
    let (nr, nc) = v.shape();
    let len = if axis == Axis::X { nr } else { nc };
    let at = |k: usize, other: usize| if axis == Axis::X { v[(k, other)] } else { v[(other, k)] };
    DMatrix::from_fn(nr, nc, |i, j| {
        let (k, other) = if axis == Axis::X { (i, j) } else { (j, i) };
        let h2 = h * h;
        if k == 0 {
            (at(0, other) * 2.0 - at(1, other) * 5.0 + at(2, other) * 4.0 - at(3, other)) / h2
        } else if k + 1 == len {
            let e = len - 1;
            (at(e, other) * 2.0 - at(e - 1, other) * 5.0 + at(e - 2, other) * 4.0 - at(e - 3, other)) / h2
        } else {
            (at(k + 1, other) - at(k, other) * 2.0 + at(k - 1, other)) / h2
        }
    })
}

fn derivative(v: &DMatrix<Complex64>, order_x: u16, order_p: u16, grid: &PhaseSpaceGrid) -> DMatrix<Complex64> {
    let along = |m: DMatrix<Complex64>, axis: Axis, order: u16, h: f64| match order {
        0 => m,
        1 => first_derivative(&m, axis, h),
        _ => second_derivative(&m, axis, h),
    };
    let dp = along(v.clone(), Axis::P, order_p, grid.hp());
    along(dp, Axis::X, order_x, grid.hx())
}

/// Applies a one-dimensional operator of order `≤ 2` to a field by finite
/// differences. Variable factors multiply pointwise.
pub fn apply_fd(expr: &DiffOpExpr, field: &PhaseSpaceField) -> Result<PhaseSpaceField> {
    if expr.dim() != 1 {
        return Err(Error::DimensionMismatch {
            left: 1,
            right: expr.dim(),
        });
    }
    let grid = &field.grid;
    for n in [grid.nx, grid.np] {
        if n < MIN_STENCIL_POINTS {
            return Err(Error::SizeTooSmall {
                min: MIN_STENCIL_POINTS,
                got: n,
            });
        }
    }
    if let Some((m, _)) = expr.terms().find(|(m, _)| m.derivative_order() > 2) {
        return Err(Error::Unsupported(format!(
            "finite differences support derivative order ≤ 2, got {}",
            m.derivative_order()
        )));
    }
    let mut out = DMatrix::from_element(grid.nx, grid.np, ZERO);
    for (m, c) in expr.terms() {
        let d = derivative(&field.values, m.dxpow[0], m.dppow[0], grid);
        let (ax, bp) = (m.xpow[0] as i32, m.ppow[0] as i32);
        for i in 0..grid.nx {
            let xf = grid.x(i).powi(ax);
            for j in 0..grid.np {
                out[(i, j)] += d[(i, j)] * (c * (xf * grid.p(j).powi(bp)));
            }
        }
    }
    Ok(PhaseSpaceField {
        values: out,
        ..field.clone()
    })
}

fn neighbours(stack: &FieldStack, n: usize) -> Result<(&PhaseSpaceField, Option<&PhaseSpaceField>, &PhaseSpaceField)> {
    if n + 1 > stack.n_max() {
        return Err(Error::IndexOutOfRange {
            index: n,
            valid: format!("0..={} (needs Ψ^(n+1))", stack.n_max().saturating_sub(1)),
        });
    }
    let below = n.checked_sub(1).map(|k| &stack.fields[k]);
    Ok((&stack.fields[n], below, &stack.fields[n + 1]))
}

fn combine(
    base: &PhaseSpaceField,
    below: Option<&PhaseSpaceField>,
    above: &PhaseSpaceField,
    cb: Complex64,
    ca: Complex64,
) -> PhaseSpaceField {
    let mut values = &above.values * ca;
    if let Some(b) = below {
        values += &b.values * cb;
    }
    PhaseSpaceField { values, ..base.clone() }
}

/// `(1/√2)[√n Ψ^{n−1} + √(n+1) Ψ^{n+1}]`. Needs `n + 1 ≤ n_max`.
pub fn apply_recurrence_p(stack: &FieldStack, n: usize) -> Result<PhaseSpaceField> {
    let (base, below, above) = neighbours(stack, n)?;
    let (sn, sn1) = ((n as f64).sqrt() * SQRT_HALF, ((n + 1) as f64).sqrt() * SQRT_HALF);
    Ok(combine(base, below, above, Complex64::new(sn, 0.0), Complex64::new(sn1, 0.0)))
}

/// `(−i/√2)[√n Ψ^{n−1} − √(n+1) Ψ^{n+1}]`. Needs `n + 1 ≤ n_max`.
pub fn apply_recurrence_x(stack: &FieldStack, n: usize) -> Result<PhaseSpaceField> {
    let (base, below, above) = neighbours(stack, n)?;
    let (sn, sn1) = ((n as f64).sqrt() * SQRT_HALF, ((n + 1) as f64).sqrt() * SQRT_HALF);
    Ok(combine(base, below, above, Complex64::new(0.0, -sn), Complex64::new(0.0, sn1)))
}

/// Largest `|a − b|` over nodes not on the grid boundary.
pub fn interior_max_diff(a: &PhaseSpaceField, b: &PhaseSpaceField) -> f64 {
    let (nr, nc) = a.values.shape();
    let mut m: f64 = 0.0;
    for i in 1..nr - 1 {
        for j in 1..nc - 1 {
            m = m.max((a.values[(i, j)] - b.values[(i, j)]).norm());
        }
    }
    m
}

/// `log₂(e_h / e_{h/2})`.
pub fn convergence_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Which ladder operator a report row concerns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LadderOp {
    P,
    X,
}

/// One `(n, operator)` row of a route comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RouteEntry {
    pub n: usize,
    pub operator: LadderOp,
    /// Interior max `|recurrence − finite difference|` on the base grid.
    pub error: f64,
    /// `error / max|Ψⁿ|`.
    pub relative_error: f64,
    /// Same on the grid with both spacings halved.
    pub refined_error: f64,
    pub refined_relative_error: f64,
    /// `log₂(error / refined_error)`.
    pub order: f64,
    /// Error of the plain `(iħ∂ − ·)` forms at `α = β = 0` against the
    /// recurrence; it does not shrink under refinement.
    pub plain_form_error: f64,
    pub plain_form_refined_error: f64,
}

/// Route comparison over `n = 1..n_max−1` for both ladder operators.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RouteReport {
    pub grid: PhaseSpaceGrid,
    pub refined_grid: PhaseSpaceGrid,
    pub n_max: usize,
    pub a: f64,
    pub hbar: f64,
    pub phase_origin: PhaseOrigin,
    pub entries: Vec<RouteEntry>,
    pub max_relative_error: f64,
    pub min_order: f64,
    pub max_order: f64,
}

impl RouteReport {
    pub fn orders_in_band(&self) -> bool {
        self.entries.iter().all(|e| (ORDER_BAND.0..=ORDER_BAND.1).contains(&e.order))
    }
}

/// Compares the recurrence route with finite differences of the induced
/// operators on `grid` and on its halved-spacing refinement.
pub fn route_consistency_report(psi: &WaveFunction, family: &BasisFamily, grid: &PhaseSpaceGrid, n_max: usize) -> Result<RouteReport> {
    if n_max < 3 {
        return Err(Error::SizeTooSmall { min: 3, got: n_max });
    }
    let refined_grid = grid.refined();
    let coarse = FieldStack::compute(psi, family, grid, n_max)?;
    let fine = FieldStack::compute(psi, family, &refined_grid, n_max)?;
    // the ops only read a, ħ and the phase origin
    let params = family.at(0.0, 0.0);
    let ops = [
        (LadderOp::P, induced_p_frak(&params)?, build_p_frak(&params, AlphaBeta::default())?),
        (LadderOp::X, induced_x_frak(&params)?, build_x_frak(&params, AlphaBeta::default())?),
    ];

    let measure = |stack: &FieldStack, n: usize, op: LadderOp, expr: &DiffOpExpr| -> Result<f64> {
        let rec = match op {
            LadderOp::P => apply_recurrence_p(stack, n)?,
            LadderOp::X => apply_recurrence_x(stack, n)?,
        };
        Ok(interior_max_diff(&rec, &apply_fd(expr, &stack.fields[n])?))
    };

    let mut entries = Vec::new();
    for n in 1..n_max {
        let peak = coarse.fields[n].max_abs();
        let peak_fine = fine.fields[n].max_abs();
        for (op, induced, plain) in &ops {
            let error = measure(&coarse, n, *op, induced)?;
            let refined_error = measure(&fine, n, *op, induced)?;
            entries.push(RouteEntry {
                n,
                operator: *op,
                error,
                relative_error: error / peak,
                refined_error,
                refined_relative_error: refined_error / peak_fine,
                order: convergence_order(error, refined_error),
                plain_form_error: measure(&coarse, n, *op, plain)? / peak,
                plain_form_refined_error: measure(&fine, n, *op, plain)? / peak_fine,
            });
        }
    }
    let fold = |f: fn(f64, f64) -> f64, init: f64, get: fn(&RouteEntry) -> f64| entries.iter().map(get).fold(init, f);
    Ok(RouteReport {
        grid: *grid,
        refined_grid,
        n_max,
        a: family.a,
        hbar: family.hbar,
        phase_origin: family.phase_origin,
        max_relative_error: fold(f64::max, 0.0, |e| e.relative_error),
        min_order: fold(f64::min, f64::INFINITY, |e| e.order),
        max_order: fold(f64::max, f64::NEG_INFINITY, |e| e.order),
        entries,
    })
}
