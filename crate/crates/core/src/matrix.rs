//! Truncated matrix representations in the basis `{|n, X, P, ℓ⟩}`.
//!
//! Row index is the bra, column index the ket: entry `(n, m)` is
//! `⟨n|A|m⟩`. With the `iⁿ` ket phase the ladder, coordinate and momentum
//! matrices are
//!
//! ```text
//! 𝔷⁻:  (m−1, m) = √m
//! x:   (m−1, m) = +ia√m,  (m+1, m) = −ia√(m+1),  diag X
//! p:   (m∓1, m) = ℓ√·,                           diag P
//! ```
//!
//! Truncating to `N×N` leaves every commutator exact except for the last
//! diagonal entry, where `[𝔷⁻, 𝔷⁺]` reads `−(N−1)` instead of `1`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::BasisParams;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn check_size(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::SizeTooSmall { min, got: n });
    }
    Ok(())
}

/// An `N×N` tridiagonal matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalOperator {
    pub diag: Vec<Complex64>,
    /// Entries `(k, k+1)`.
    pub upper: Vec<Complex64>,
    /// Entries `(k+1, k)`.
    pub lower: Vec<Complex64>,
}

impl TridiagonalOperator {
    pub fn new(diag: Vec<Complex64>, upper: Vec<Complex64>, lower: Vec<Complex64>) -> Result<Self> {
        let n = diag.len();
        check_size(n, 1)?;
        for band in [&upper, &lower] {
            if band.len() + 1 != n {
                return Err(Error::SizeMismatch {
                    left: n - 1,
                    right: band.len(),
                });
            }
        }
        Ok(TridiagonalOperator { diag, upper, lower })
    }

    fn from_fns(n: usize, d: impl Fn(usize) -> Complex64, up: impl Fn(usize) -> Complex64, lo: impl Fn(usize) -> Complex64) -> Self {
        TridiagonalOperator {
            diag: (0..n).map(d).collect(),
            upper: (0..n - 1).map(up).collect(),
            lower: (0..n - 1).map(lo).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        match col as isize - row as isize {
            0 => self.diag[row],
            1 => self.upper[row],
            -1 => self.lower[col],
            _ => ZERO,
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.diag.iter().all(|d| d.im == 0.0) && self.upper.iter().zip(&self.lower).all(|(u, l)| *l == u.conj())
    }

    pub fn adjoint(&self) -> Self {
        TridiagonalOperator {
            diag: self.diag.iter().map(|v| v.conj()).collect(),
            upper: self.lower.iter().map(|v| v.conj()).collect(),
            lower: self.upper.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.size();
        if v.len() != n {
            return Err(Error::SizeMismatch { left: n, right: v.len() });
        }
        Ok((0..n)
            .map(|r| {
                let mut acc = self.diag[r] * v[r];
                if r + 1 < n {
                    acc += self.upper[r] * v[r + 1];
                }
                if r > 0 {
                    acc += self.lower[r - 1] * v[r - 1];
                }
                acc
            })
            .collect())
    }

    pub fn to_dense(&self) -> DenseOperator {
        DenseOperator::from_fn(self.size(), |r, c| self.get(r, c))
    }

    /// Nonzero entries as `(row, col, value)`, row-major.
    pub fn nonzeros(&self) -> Vec<(usize, usize, Complex64)> {
        self.to_dense().nonzeros()
    }
}

/// A dense `N×N` complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    pub entries: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::SizeMismatch {
                left: entries.nrows(),
                right: entries.ncols(),
            });
        }
        if entries.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidParameter("matrix entries must be finite".to_string()));
        }
        Ok(DenseOperator { entries })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        DenseOperator {
            entries: DMatrix::from_fn(n, n, f),
        }
    }

    pub fn identity(n: usize) -> Self {
        DenseOperator {
            entries: DMatrix::identity(n, n),
        }
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        DenseOperator {
            entries: self.entries.adjoint(),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.entries == self.entries.adjoint()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        DenseOperator {
            entries: &self.entries * s,
        }
    }

    pub fn mul(&self, other: &DenseOperator) -> Result<Self> {
        self.same_size(other)?;
        Ok(DenseOperator {
            entries: &self.entries * &other.entries,
        })
    }

    pub fn add(&self, other: &DenseOperator) -> Result<Self> {
        self.same_size(other)?;
        Ok(DenseOperator {
            entries: &self.entries + &other.entries,
        })
    }

    pub fn sub(&self, other: &DenseOperator) -> Result<Self> {
        self.same_size(other)?;
        Ok(DenseOperator {
            entries: &self.entries - &other.entries,
        })
    }

    fn same_size(&self, other: &DenseOperator) -> Result<()> {
        if self.size() != other.size() {
            return Err(Error::SizeMismatch {
                left: self.size(),
                right: other.size(),
            });
        }
        Ok(())
    }

    /// Leading `k×k` block.
    pub fn leading_block(&self, k: usize) -> DenseOperator {
        let k = k.min(self.size());
        DenseOperator {
            entries: self.entries.view((0, 0), (k, k)).into_owned(),
        }
    }

    /// Nonzero entries as `(row, col, value)`, row-major.
    pub fn nonzeros(&self) -> Vec<(usize, usize, Complex64)> {
        let n = self.size();
        (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .map(|(r, c)| (r, c, self.entries[(r, c)]))
            .filter(|(_, _, v)| *v != ZERO)
            .collect()
    }

    /// Largest `|A_{lm} − B_{lm}|` over `l, m < k`.
    pub fn block_deviation(&self, other: &DenseOperator, k: usize) -> f64 {
        let k = k.min(self.size()).min(other.size());
        (0..k)
            .flat_map(|r| (0..k).map(move |c| (r, c)))
            .map(|(r, c)| (self.entries[(r, c)] - other.entries[(r, c)]).norm())
            .fold(0.0, f64::max)
    }
}

impl From<&TridiagonalOperator> for DenseOperator {
    fn from(t: &TridiagonalOperator) -> Self {
        t.to_dense()
    }
}

/// `𝔷⁻`: `(n−1, n) = √n`.
pub fn ladder_minus(n: usize) -> Result<TridiagonalOperator> {
    check_size(n, 2)?;
    Ok(TridiagonalOperator::from_fns(
        n,
        |_| ZERO,
        |k| real(((k + 1) as f64).sqrt()),
        |_| ZERO,
    ))
}

/// `𝔷⁺`: `(n+1, n) = √(n+1)`.
pub fn ladder_plus(n: usize) -> Result<TridiagonalOperator> {
    check_size(n, 2)?;
    Ok(TridiagonalOperator::from_fns(
        n,
        |_| ZERO,
        |_| ZERO,
        |k| real(((k + 1) as f64).sqrt()),
    ))
}

/// Which off-diagonal of the coordinate matrix carries `+i`. `Standard` is
/// the one consistent with the basis; `Flipped` exists to show that the
/// commutator checks detect the wrong choice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    #[default]
    Standard,
    Flipped,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Standard => 1.0,
            Orientation::Flipped => -1.0,
        }
    }
}

/// Dimensionless momentum `𝔭`: `(m∓1, m) = √·/√2`.
pub fn p_frak_matrix(n: usize) -> Result<TridiagonalOperator> {
    check_size(n, 2)?;
    let s = |k: usize| real(((k + 1) as f64 / 2.0).sqrt());
    Ok(TridiagonalOperator::from_fns(n, |_| ZERO, s, s))
}

/// Dimensionless coordinate `𝔵`: `(m−1, m) = i√m/√2`, `(m+1, m) = −i√(m+1)/√2`.
pub fn x_frak_matrix(n: usize) -> Result<TridiagonalOperator> {
    x_frak_matrix_oriented(n, Orientation::Standard)
}

pub fn x_frak_matrix_oriented(n: usize, orientation: Orientation) -> Result<TridiagonalOperator> {
    check_size(n, 2)?;
    let s = orientation.sign();
    let v = |k: usize| ((k + 1) as f64 / 2.0).sqrt();
    Ok(TridiagonalOperator::from_fns(n, |_| ZERO, |k| I * (s * v(k)), |k| -I * (s * v(k))))
}

/// `x = √2 a 𝔵 + X`.
pub fn x_matrix(params: &BasisParams, n: usize) -> Result<TridiagonalOperator> {
    x_matrix_oriented(params, n, Orientation::Standard)
}

pub fn x_matrix_oriented(params: &BasisParams, n: usize, orientation: Orientation) -> Result<TridiagonalOperator> {
    let frak = x_frak_matrix_oriented(n, orientation)?;
    let s = std::f64::consts::SQRT_2 * params.a();
    Ok(TridiagonalOperator {
        diag: vec![real(params.x_mean); n],
        upper: frak.upper.iter().map(|v| v * s).collect(),
        lower: frak.lower.iter().map(|v| v * s).collect(),
    })
}

/// `p = √2 ℓ 𝔭 + P`.
pub fn p_matrix(params: &BasisParams, n: usize) -> Result<TridiagonalOperator> {
    check_size(n, 2)?;
    let ell = params.ell();
    let s = |k: usize| real(ell * ((k + 1) as f64).sqrt());
    Ok(TridiagonalOperator::from_fns(n, |_| real(params.p_mean), s, s))
}

/// `AB − BA`.
pub fn commutator(a: &DenseOperator, b: &DenseOperator) -> Result<DenseOperator> {
    a.mul(b)?.sub(&b.mul(a)?)
}

/// `Σ_x = (a²/2)[(x−X)²/a² + (p−P)²/ℓ²]` and `Σ_p = (ℓ²/a²) Σ_x`.
///
/// Both are diagonal with entries `(2n+1)a²`, `(2n+1)ℓ²` except for the
/// last row and column, which feel the truncation.
pub fn dispersion_matrices(params: &BasisParams, n: usize) -> Result<(DenseOperator, DenseOperator)> {
    check_size(n, 3)?;
    let (a, ell) = (params.a(), params.ell());
    let dx = x_matrix(params, n)?
        .to_dense()
        .sub(&DenseOperator::identity(n).scale(real(params.x_mean)))?;
    let dp = p_matrix(params, n)?
        .to_dense()
        .sub(&DenseOperator::identity(n).scale(real(params.p_mean)))?;
    let shape = dx
        .mul(&dx)?
        .scale(real(1.0 / (a * a)))
        .add(&dp.mul(&dp)?.scale(real(1.0 / (ell * ell))))?
        .scale(real(0.5));
    Ok((shape.scale(real(a * a)), shape.scale(real(ell * ell))))
}

/// One-dimensional dispersion generators from the dimensionless pair:
/// `¼(𝔭𝔭 + 𝔵𝔵)`, `¼(𝔭𝔭 − 𝔵𝔵)`, `¼(𝔭𝔵 + 𝔵𝔭)`.
pub fn z_generators_1d(n: usize) -> Result<(DenseOperator, DenseOperator, DenseOperator)> {
    check_size(n, 3)?;
    let p = p_frak_matrix(n)?.to_dense();
    let x = x_frak_matrix(n)?.to_dense();
    let pp = p.mul(&p)?;
    let xx = x.mul(&x)?;
    let quarter = real(0.25);
    Ok((
        pp.add(&xx)?.scale(quarter),
        pp.sub(&xx)?.scale(quarter),
        p.mul(&x)?.add(&x.mul(&p)?)?.scale(quarter),
    ))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DenseOperator) -> Vec<f64> {
    let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(m.entries.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Operators that can be materialized by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedOperator {
    X,
    P,
    XFrak,
    PFrak,
    LadderMinus,
    LadderPlus,
    SigmaX,
    SigmaP,
    ZPlus,
    ZMinus,
    ZCross,
    /// `[x, p]`.
    CommutatorXp,
}

impl NamedOperator {
    pub const ALL: [NamedOperator; 12] = [
        NamedOperator::X,
        NamedOperator::P,
        NamedOperator::XFrak,
        NamedOperator::PFrak,
        NamedOperator::LadderMinus,
        NamedOperator::LadderPlus,
        NamedOperator::SigmaX,
        NamedOperator::SigmaP,
        NamedOperator::ZPlus,
        NamedOperator::ZMinus,
        NamedOperator::ZCross,
        NamedOperator::CommutatorXp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedOperator::X => "x",
            NamedOperator::P => "p",
            NamedOperator::XFrak => "x_frak",
            NamedOperator::PFrak => "p_frak",
            NamedOperator::LadderMinus => "ladder_minus",
            NamedOperator::LadderPlus => "ladder_plus",
            NamedOperator::SigmaX => "sigma_x",
            NamedOperator::SigmaP => "sigma_p",
            NamedOperator::ZPlus => "z_plus",
            NamedOperator::ZMinus => "z_minus",
            NamedOperator::ZCross => "z_cross",
            NamedOperator::CommutatorXp => "commutator_xp",
        }
    }

    pub fn build(self, params: &BasisParams, n: usize) -> Result<DenseOperator> {
        Ok(match self {
            NamedOperator::X => x_matrix(params, n)?.to_dense(),
            NamedOperator::P => p_matrix(params, n)?.to_dense(),
            NamedOperator::XFrak => x_frak_matrix(n)?.to_dense(),
            NamedOperator::PFrak => p_frak_matrix(n)?.to_dense(),
            NamedOperator::LadderMinus => ladder_minus(n)?.to_dense(),
            NamedOperator::LadderPlus => ladder_plus(n)?.to_dense(),
            NamedOperator::SigmaX => dispersion_matrices(params, n)?.0,
            NamedOperator::SigmaP => dispersion_matrices(params, n)?.1,
            NamedOperator::ZPlus => z_generators_1d(n)?.0,
            NamedOperator::ZMinus => z_generators_1d(n)?.1,
            NamedOperator::ZCross => z_generators_1d(n)?.2,
            NamedOperator::CommutatorXp => commutator(&x_matrix(params, n)?.to_dense(), &p_matrix(params, n)?.to_dense())?,
        })
    }
}

impl fmt::Display for NamedOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NamedOperator::ALL.into_iter().find(|op| op.name() == s).ok_or_else(|| {
            let names: Vec<_> = NamedOperator::ALL.iter().map(|o| o.name()).collect();
            Error::InvalidParameter(format!("unknown operator `{s}` (expected one of {})", names.join(", ")))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{forward_coeffs, WaveFunction};

    fn params() -> BasisParams {
        BasisParams::new(0.3, -1.2, 0.7, 1.3).unwrap()
    }

    fn dense_ladder_commutator_oracle(n: usize) -> DMatrix<Complex64> {
        // explicit loops, independent of the tridiagonal code
        let mut lm = DMatrix::from_element(n, n, ZERO);
        for k in 1..n {
            lm[(k - 1, k)] = real((k as f64).sqrt());
        }
        let lp = lm.adjoint();
        &lm * &lp - &lp * &lm
    }

    #[test]
    fn ladder_examples() {
        let lm = ladder_minus(3).unwrap();
        let nz = lm.nonzeros();
        assert_eq!(nz.len(), 2);
        assert_eq!((nz[0].0, nz[0].1, nz[0].2), (0, 1, real(1.0)));
        assert_eq!((nz[1].0, nz[1].1, nz[1].2), (1, 2, real(2f64.sqrt())));
        let lp = ladder_plus(5).unwrap();
        assert_eq!(lp, ladder_minus(5).unwrap().adjoint());

        let mut e0 = vec![ZERO; 5];
        e0[0] = real(1.0);
        assert!(ladder_minus(5).unwrap().apply(&e0).unwrap().iter().all(|v| *v == ZERO));

        let c = commutator(&ladder_minus(6).unwrap().to_dense(), &lp_dense(6)).unwrap();
        let oracle = dense_ladder_commutator_oracle(6);
        for r in 0..6 {
            for col in 0..6 {
                assert!((c.get(r, col) - oracle[(r, col)]).norm() < 1e-14);
                let want = if r == col && r < 5 {
                    1.0
                } else if r == col {
                    -5.0
                } else {
                    0.0
                };
                assert!((c.get(r, col) - want).norm() < 1e-14);
            }
        }
        assert!(ladder_minus(1).is_err());
    }

    fn lp_dense(n: usize) -> DenseOperator {
        ladder_plus(n).unwrap().to_dense()
    }

    #[test]
    fn x_and_p_layout() {
        let p1 = BasisParams::new(0.0, 0.0, 1.0, 1.0).unwrap();
        let x = x_matrix(&p1, 2).unwrap();
        assert!((x.get(0, 1) - I).norm() < 1e-15);
        assert!((x.get(1, 0) + I).norm() < 1e-15);
        let p = p_matrix(&params(), 6).unwrap();
        assert!(p.diag.iter().all(|d| *d == real(-1.2)));
        assert!(x.is_hermitian() && p.is_hermitian());
        assert!(x_matrix(&params(), 9).unwrap().is_hermitian());

        let xd = x_matrix(&params(), 8).unwrap().to_dense();
        let x2 = xd.mul(&xd).unwrap();
        assert!((xd.get(0, 0) - real(0.3)).norm() < 1e-15);
        assert!((x2.get(0, 0).re - 0.09 - 0.49).abs() < 1e-12);
    }

    #[test]
    fn truncation_law_for_xp() {
        let pr = params();
        for n in [4, 8, 16, 32] {
            let x = x_matrix(&pr, n).unwrap().to_dense();
            let p = p_matrix(&pr, n).unwrap().to_dense();
            let c = commutator(&x, &p).unwrap();
            let target = DenseOperator::identity(n).scale(I * pr.hbar());
            assert!(c.block_deviation(&target, n - 1) < 1e-12);
            for k in 0..n - 1 {
                assert!(c.get(k, n - 1).norm() < 1e-12 && c.get(n - 1, k).norm() < 1e-12);
            }
            let defect = c.get(n - 1, n - 1);
            assert!((defect - I * (-pr.hbar() * (n - 1) as f64)).norm() < 1e-11, "{defect}");

            let flipped = x_matrix_oriented(&pr, n, Orientation::Flipped).unwrap().to_dense();
            let cf = commutator(&flipped, &p).unwrap();
            assert!(cf.block_deviation(&target, n - 1) > 1.0);
        }
        let a = x_matrix(&pr, 5).unwrap().to_dense();
        assert!(commutator(&a, &a).unwrap().entries.iter().all(|v| *v == ZERO));
        let xf = x_frak_matrix(6).unwrap().to_dense();
        let pf = p_frak_matrix(6).unwrap().to_dense();
        let c = commutator(&xf, &pf).unwrap();
        assert!(c.block_deviation(&DenseOperator::identity(6).scale(I), 5) < 1e-14);
        assert!(commutator(&xf, &DenseOperator::identity(4)).is_err());
    }

    #[test]
    fn dispersion_diagonal() {
        let pr = params();
        let (sx, sp) = dispersion_matrices(&pr, 32).unwrap();
        assert!((sx.get(0, 0).re - pr.a().powi(2)).abs() < 1e-12);
        assert!((sp.get(1, 1).re - 3.0 * pr.ell().powi(2)).abs() < 1e-12);
        for n in 0..=29 {
            let wx = (2 * n + 1) as f64 * pr.a().powi(2);
            let wp = (2 * n + 1) as f64 * pr.ell().powi(2);
            assert!((sx.get(n, n).re - wx).abs() <= 1e-10 * wx);
            assert!((sp.get(n, n).re - wp).abs() <= 1e-10 * wp);
            assert!(sx.get(n, n + 2).norm() < 1e-12 && sp.get(n + 2, n).norm() < 1e-12);
        }
        assert!(sx.is_hermitian() && sp.is_hermitian());
        let ev = hermitian_eigenvalues(&sx.leading_block(31));
        for (n, v) in ev.iter().enumerate() {
            let want = (2 * n + 1) as f64 * pr.a().powi(2);
            assert!((v - want).abs() < 1e-10 * want.max(1.0));
        }
        assert!(dispersion_matrices(&pr, 2).is_err());
    }

    #[test]
    fn z_generators_pattern() {
        let (zp, zm, zx) = z_generators_1d(6).unwrap();
        assert!((zp.get(0, 0).re - 0.25).abs() < 1e-15);
        for n in 0..4 {
            assert!((zp.get(n, n).re - (2 * n + 1) as f64 / 4.0).abs() < 1e-14);
            assert!(zm.get(n, n).norm() < 1e-15);
            let want = (((n + 1) * (n + 2)) as f64).sqrt() / 4.0;
            assert!((zm.get(n, n + 2) - real(want)).norm() < 1e-14);
            assert!((zm.get(n + 2, n) - real(want)).norm() < 1e-14);
            assert!((zx.get(n, n + 2) - I * want).norm() < 1e-14);
        }
        for z in [&zp, &zm, &zx] {
            let b = z.leading_block(5);
            assert!(b.block_deviation(&b.adjoint(), 5) < 1e-15);
        }
    }

    #[test]
    fn transform_consistency() {
        // ψ with coefficients on n ≤ N−2 at the basis point
        let pr = params();
        let n = 10;
        let psi = WaveFunction::Combination(vec![
            (real(0.6), WaveFunction::hermite(0, pr.x_mean, pr.p_mean, pr.a())),
            (Complex64::new(0.0, 0.5), WaveFunction::hermite(3, pr.x_mean, pr.p_mean, pr.a())),
            (Complex64::new(0.3, -0.2), WaveFunction::hermite(7, pr.x_mean, pr.p_mean, pr.a())),
        ]);
        let xs: Vec<f64> = (0..4001).map(|k| -25.0 + 0.0125 * k as f64).collect();
        let x_psi = WaveFunction::sampled(xs.clone(), xs.iter().map(|&x| psi.eval(x, pr.hbar()) * x).collect()).unwrap();
        let p_psi = WaveFunction::sampled(
            xs.clone(),
            xs.iter()
                .map(|&x| {
                    let h = 1e-5;
                    (psi.eval(x + h, pr.hbar()) - psi.eval(x - h, pr.hbar())) / (2.0 * h) * (-I * pr.hbar())
                })
                .collect(),
        )
        .unwrap();
        let c = forward_coeffs(&psi, &pr, n - 1).unwrap().coeffs;
        let cx = forward_coeffs(&x_psi, &pr, n - 1).unwrap().coeffs;
        let cp = forward_coeffs(&p_psi, &pr, n - 1).unwrap().coeffs;
        let via_x = x_matrix(&pr, n).unwrap().apply(&c).unwrap();
        let via_p = p_matrix(&pr, n).unwrap().apply(&c).unwrap();
        for k in 0..n {
            assert!((cx[k] - via_x[k]).norm() < 1e-8, "x row {k}: {} vs {}", cx[k], via_x[k]);
            assert!((cp[k] - via_p[k]).norm() < 1e-8, "p row {k}: {} vs {}", cp[k], via_p[k]);
        }
    }

    #[test]
    fn named_operators_round_trip() {
        for op in NamedOperator::ALL {
            assert_eq!(op.name().parse::<NamedOperator>().unwrap(), op);
            assert_eq!(op.build(&params(), 5).unwrap().size(), 5);
        }
        assert!("nope".parse::<NamedOperator>().is_err());
    }
}
