//! Small dense complex linear algebra for game states.
//!
//! Everything here works on `n x n` matrices with `n` in the single digits,
//! so the types wrap a dynamically sized `nalgebra` matrix. Validity checks
//! all use the absolute max-norm tolerance [`TOL`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;

use crate::error::{invalid, Result};

pub type ComplexScalar = Complex64;

/// Absolute tolerance for every validity check.
pub const TOL: f64 = 1e-9;

/// Off-diagonal magnitudes at or below this have no meaningful phase.
pub const PHASE_FLOOR: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix(DMatrix<Complex64>);

impl SquareMatrix {
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return invalid("matrix dimension must be at least 1");
        }
        if rows.iter().any(|r| r.len() != dim) {
            return invalid(format!("matrix rows must all have length {dim}"));
        }
        if rows.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("matrix entries must be finite");
        }
        Ok(Self(DMatrix::from_fn(dim, dim, |i, j| rows[i][j])))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::from_element(dim, dim, ZERO))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                ZERO
            }
        }))
    }

    pub(crate) fn from_inner(m: DMatrix<Complex64>) -> Self {
        debug_assert!(m.is_square());
        Self(m)
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn mul(&self, other: &SquareMatrix) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn add(&self, other: &SquareMatrix) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }

    /// Max-norm distance `max |a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &SquareMatrix) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
///
/// Column `k` of the returned matrix is the eigenvector for eigenvalue `k`.
pub fn hermitian_eig(m: &SquareMatrix) -> Result<(Vec<f64>, SquareMatrix)> {
    let err = m.hermiticity_error();
    if err > TOL {
        return invalid(format!("matrix is not Hermitian (error {err:.3e})"));
    }
    // Symmetrize so the solver only ever sees an exactly Hermitian input.
    let sym = (&m.0 + m.0.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..m.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.dim(), m.dim(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, SquareMatrix(vectors)))
}

/// `‖U†U − I‖_max`.
pub fn unitarity_error(m: &SquareMatrix) -> f64 {
    m.adjoint().mul(m).max_abs_diff(&SquareMatrix::identity(m.dim()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unitary(SquareMatrix);

impl Unitary {
    pub fn new(mat: SquareMatrix) -> Result<Self> {
        let err = unitarity_error(&mat);
        if err > TOL {
            return invalid(format!("matrix is not unitary (error {err:.3e})"));
        }
        Ok(Self(mat))
    }

    pub(crate) fn new_unchecked(mat: SquareMatrix) -> Self {
        debug_assert!(unitarity_error(&mat) < 1e-6);
        Self(mat)
    }

    pub fn identity(dim: usize) -> Self {
        Self(SquareMatrix::identity(dim))
    }

    /// The 2x2 swap `[[0,1],[1,0]]`.
    pub fn flip() -> Self {
        Self(SquareMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap())
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(SquareMatrix::from_real_rows(rows)?)
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn compose(&self, other: &Unitary) -> Self {
        Self(self.0.mul(&other.0))
    }

    pub fn with_phase(&self, phi: f64) -> Self {
        Self(self.0.scale(Complex64::from_polar(1.0, phi)))
    }

    pub fn determinant(&self) -> Complex64 {
        self.0 .0.determinant()
    }

    /// Exactly a 0/1 permutation matrix.
    pub fn is_permutation(&self) -> bool {
        let n = self.dim();
        let entries_ok = self.0 .0.iter().all(|z| z.im == 0.0 && (z.re == 0.0 || z.re == 1.0));
        entries_ok
            && (0..n).all(|i| (0..n).filter(|&j| self.0 .0[(i, j)].re == 1.0).count() == 1)
            && (0..n).all(|j| (0..n).filter(|&i| self.0 .0[(i, j)].re == 1.0).count() == 1)
    }

    /// Equal as conjugation actions: `U = e^{iφ} V` for some phase.
    pub fn same_action(&self, other: &Unitary, tol: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        // Tr(V†U) = n e^{iφ} exactly when U = e^{iφ} V.
        let overlap = other.0.adjoint().mul(&self.0).trace();
        (overlap.norm() - self.dim() as f64).abs() <= tol
    }

    /// Recovers `(a, b)` with `U = e^{iφ} U(a, b)` for a 2x2 unitary.
    pub fn to_params(&self) -> Result<UnitParams> {
        if self.dim() != 2 {
            return invalid("U(a,b) parameters exist only for 2x2 unitaries");
        }
        // det U(a,b) = -1, so e^{2iφ} = -det U.
        let phi = (-self.determinant()).arg() / 2.0;
        let strip = Complex64::from_polar(1.0, -phi);
        UnitParams::new(self.0.get(0, 0) * strip, self.0.get(0, 1) * strip)
    }
}

/// Parameters of the two-state family `U(a,b) = [[a, b], [b̄, −ā]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitParams {
    a: Complex64,
    b: Complex64,
}

impl UnitParams {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > TOL {
            return invalid(format!("|a|^2 + |b|^2 must equal 1, got {norm}"));
        }
        Ok(Self { a, b })
    }

    /// `a = e^{iα} cos θ`, `b = e^{iβ} sin θ`.
    pub fn from_angles(theta: f64, alpha: f64, beta: f64) -> Self {
        Self {
            a: Complex64::from_polar(theta.cos(), alpha),
            b: Complex64::from_polar(theta.sin(), beta),
        }
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        // Uniform on the 3-sphere: cos²θ uniform on [0, 1].
        let theta = rng.gen::<f64>().sqrt().acos();
        Self::from_angles(theta, rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI))
    }
}

pub fn make_u(params: UnitParams) -> Unitary {
    let UnitParams { a, b } = params;
    let m = SquareMatrix(DMatrix::from_row_slice(2, 2, &[a, b, b.conj(), -a.conj()]));
    Unitary::new_unchecked(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(SquareMatrix);

impl DensityMatrix {
    pub fn new(mat: SquareMatrix) -> Result<Self> {
        let herm = mat.hermiticity_error();
        if herm > TOL {
            return invalid(format!("density matrix is not Hermitian (error {herm:.3e})"));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return invalid(format!("density matrix trace must be 1, got {tr}"));
        }
        let (values, _) = hermitian_eig(&mat)?;
        let min = values.last().copied().unwrap_or(0.0);
        if min < -TOL {
            return invalid(format!("density matrix is not positive semidefinite (min eigenvalue {min:.3e})"));
        }
        Ok(Self(mat))
    }

    /// For states produced by unitary channels from a valid state.
    pub(crate) fn new_unchecked(mat: SquareMatrix) -> Self {
        Self(mat)
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut diag = vec![0.0; dim];
        diag[index] = 1.0;
        Self(SquareMatrix::from_diagonal(&diag))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(SquareMatrix::from_diagonal(&vec![1.0 / dim as f64; dim]))
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0.get(i, j)
    }

    /// Outcome probabilities in the game basis.
    pub fn diagonal(&self) -> Vec<f64> {
        self.0.diagonal()
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Self {
        // G G† / Tr(G G†) for a complex Gaussian-ish G is full rank almost surely.
        let g = DMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let p = &g * g.adjoint();
        let tr = p.trace();
        Self(SquareMatrix(p / tr))
    }
}

pub fn pure_density(state: &[Complex64]) -> Result<DensityMatrix> {
    if state.is_empty() {
        return invalid("state vector must be non-empty");
    }
    let norm: f64 = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > TOL {
        return invalid(format!("state vector must have unit norm, got {norm}"));
    }
    let v = DVector::from_column_slice(state);
    Ok(DensityMatrix(SquareMatrix(&v * v.adjoint())))
}

/// `U ρ U†`.
pub fn conjugate(u: &Unitary, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if u.dim() != rho.dim() {
        return invalid(format!("dimension mismatch: unitary {} vs state {}", u.dim(), rho.dim()));
    }
    Ok(DensityMatrix(conjugate_raw(u.matrix(), rho.matrix())))
}

pub(crate) fn conjugate_raw(u: &SquareMatrix, m: &SquareMatrix) -> SquareMatrix {
    SquareMatrix(&u.0 * &m.0 * u.0.adjoint())
}

/// `Σ p_k U_k ρ U_k†`.
pub fn mix_channels(terms: &[(f64, Unitary)], rho: &DensityMatrix) -> Result<DensityMatrix> {
    if terms.is_empty() {
        return invalid("channel must have at least one term");
    }
    check_distribution(terms.iter().map(|(p, _)| *p))?;
    if let Some((_, u)) = terms.iter().find(|(_, u)| u.dim() != rho.dim()) {
        return invalid(format!("dimension mismatch: unitary {} vs state {}", u.dim(), rho.dim()));
    }
    Ok(DensityMatrix(mix_raw(terms, rho.matrix())))
}

pub(crate) fn mix_raw(terms: &[(f64, Unitary)], m: &SquareMatrix) -> SquareMatrix {
    let mut acc: Option<DMatrix<Complex64>> = None;
    for (p, u) in terms {
        let term = conjugate_raw(u.matrix(), m).0 * Complex64::new(*p, 0.0);
        acc = Some(match acc {
            None => term,
            Some(a) => a + term,
        });
    }
    SquareMatrix(acc.expect("non-empty channel"))
}

pub(crate) fn check_distribution(probs: impl Iterator<Item = f64>) -> Result<()> {
    let mut total = 0.0;
    for p in probs {
        if !p.is_finite() || p < 0.0 {
            return invalid(format!("probabilities must be finite and non-negative, got {p}"));
        }
        total += p;
    }
    if (total - 1.0).abs() > TOL {
        return invalid(format!("probabilities must sum to 1, got {total}"));
    }
    Ok(())
}

/// `arg(ρ_ij)`, or 0 when the entry is (numerically) zero.
pub fn off_diagonal_phase(rho: &DensityMatrix, i: usize, j: usize) -> Result<f64> {
    let n = rho.dim();
    if i >= n || j >= n {
        return invalid(format!("index ({i}, {j}) out of range for dimension {n}"));
    }
    if i == j {
        return invalid("off-diagonal phase needs i != j");
    }
    let z = rho.get(i, j);
    Ok(if z.norm() <= PHASE_FLOOR { 0.0 } else { z.arg() })
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Unitary {
    let g = DMatrix::from_fn(dim, dim, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Unitary::new_unchecked(SquareMatrix(q))
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller; the second variate is discarded.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}
