//! Positive-definite quadratic Hamiltonians `H(x) = x . A x` on `R^(2n)` and
//! their linear flows.

pub mod flow;
pub mod theorems;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::bodies::ConvexHamiltonian;
use crate::error::{Error, Result};
use crate::special::ball_volume_2n;

pub use flow::{integrate_hamiltonian, linear_flow};
pub use theorems::{
    verify_theorem_even_2hom, verify_theorem_sandwich, EvenTheoremReport, SandwichTheoremReport,
    TheoremOptions,
};

/// `H(x) = x . A x` with `A` symmetric positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    matrix: DMatrix<f64>,
}

impl QuadraticForm {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidInput("quadratic form matrix must be square".into()));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("quadratic form has non-finite entries".into()));
        }
        if matrix != matrix.transpose() {
            return Err(Error::InvalidInput("quadratic form matrix is not symmetric".into()));
        }
        if matrix.clone().cholesky().is_none() {
            return Err(Error::InvalidInput("quadratic form is not positive definite".into()));
        }
        Ok(Self { matrix })
    }

    pub fn from_row_major(dim: usize, values: &[f64]) -> Result<Self> {
        if values.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "expected {} matrix entries, got {}",
                dim * dim,
                values.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, values))
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// `s |x|^2` on `R^dim`.
    pub fn scaled_identity(dim: usize, s: f64) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim) * s)
    }

    /// `(A + A^T) / 2`, then the usual checks.
    pub fn symmetrized(matrix: DMatrix<f64>) -> Result<Self> {
        let sym = (&matrix + matrix.transpose()) * 0.5;
        Self::new(sym)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let x = DVector::from_column_slice(x);
        x.dot(&(&self.matrix * &x))
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        self.matrix
            .clone()
            .cholesky()
            .expect("checked positive definite")
            .inverse()
    }

    /// Symmetric square root `A^(1/2)`.
    pub fn sqrt(&self) -> DMatrix<f64> {
        let eig = self.matrix.clone().symmetric_eigen();
        let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.max(0.0).sqrt()));
        &eig.eigenvectors * d * eig.eigenvectors.transpose()
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }
}

impl ConvexHamiltonian for QuadraticForm {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        QuadraticForm::evaluate(self, x)
    }

    fn analytic_gradient(&self, x: &[f64]) -> Option<Result<Vec<f64>>> {
        let g = 2.0 * (&self.matrix * DVector::from_column_slice(x));
        Some(Ok(g.iter().copied().collect()))
    }

    fn homogeneity_degree(&self) -> Option<f64> {
        Some(2.0)
    }

    fn is_even(&self) -> bool {
        true
    }

    fn bounding_box(&self, level: f64) -> Result<Vec<f64>> {
        // sup { x_i : x.Ax <= level } = sqrt(level (A^-1)_ii)
        let inv = self.inverse();
        Ok((0..self.dim()).map(|i| (level * inv[(i, i)]).sqrt()).collect())
    }
}

/// The standard symplectic structure `omega = sum dp_i ^ dq_i` on `R^(2n)`
/// with coordinates ordered `(p, q)`: Hamiltonian velocity is `J grad H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticStructure {
    pub n: usize,
}

impl SymplecticStructure {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    /// `J = [[0, -I], [I, 0]]`, so that `p' = -dH/dq` and `q' = dH/dp`.
    pub fn j(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(i, n + i)] = -1.0;
            j[(n + i, i)] = 1.0;
        }
        j
    }

    pub fn velocity(&self, grad: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut v = vec![0.0; 2 * n];
        for i in 0..n {
            v[i] = -grad[n + i];
            v[n + i] = grad[i];
        }
        v
    }

    /// `omega(x, y) = sum x_p,i y_q,i - x_q,i y_p,i`.
    pub fn omega(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.n;
        (0..n).map(|i| x[i] * y[n + i] - x[n + i] * y[i]).sum()
    }
}

fn phase_n(a: &QuadraticForm) -> Result<usize> {
    if !a.dim().is_multiple_of(2) {
        return Err(Error::InvalidInput("phase-space form needs even dimension".into()));
    }
    Ok(a.dim() / 2)
}

/// The flow matrix `2 J A` of `x' = J grad(x . A x)`.
pub fn flow_matrix(a: &QuadraticForm) -> Result<DMatrix<f64>> {
    let n = phase_n(a)?;
    Ok(SymplecticStructure::new(n).j() * a.matrix() * 2.0)
}

/// Largest `|Re lambda| / |2JA|_F` over the spectrum of the flow matrix.
pub fn spectrum_real_part_ratio(a: &QuadraticForm) -> Result<f64> {
    let f = flow_matrix(a)?;
    let scale = f.norm();
    let eig = f.complex_eigenvalues();
    Ok(eig.iter().map(|z| z.re.abs()).fold(0.0, f64::max) / scale)
}

/// Eigen-decomposition of `-M^2` with `M = 2 S J S`, `S = A^(1/2)`. `M` is
/// antisymmetric and similar to `2JA`, so `-M^2` is symmetric with eigenvalues
/// `omega_j^2`, each twice.
fn antisymmetric_spectrum(a: &QuadraticForm) -> Result<(Vec<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let n = phase_n(a)?;
    let s = a.sqrt();
    let m = &s * SymplecticStructure::new(n).j() * &s * 2.0;
    let sym = m.transpose() * &m;
    let sym = (&sym + sym.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors, s))
}

/// The `n` symplectic frequencies of `A` (with multiplicity), ascending: the
/// positive imaginary parts of the spectrum of `2JA`.
pub fn symplectic_frequencies(a: &QuadraticForm) -> Result<Vec<f64>> {
    let ratio = spectrum_real_part_ratio(a)?;
    if ratio > 1e-8 {
        return Err(Error::InvalidInput(format!(
            "flow spectrum is not purely imaginary (relative real part {ratio:e})"
        )));
    }
    let (mut values, _, _) = antisymmetric_spectrum(a)?;
    values.sort_by(f64::total_cmp);
    Ok(values
        .chunks(2)
        .map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
        .collect())
}

/// Largest symplectic frequency and a unit vector in its invariant plane of
/// the linear flow.
pub fn fastest_plane(a: &QuadraticForm) -> Result<(f64, Vec<f64>)> {
    let (values, vectors, s) = antisymmetric_spectrum(a)?;
    let (imax, &vmax) = values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("nonempty spectrum");
    let v = vectors.column(imax).into_owned();
    let x = s.clone().lu().solve(&v).ok_or_else(|| Error::numeric("singular square root"))?;
    let x = &x / x.norm();
    Ok((vmax.sqrt(), x.iter().copied().collect()))
}

/// Smallest action of a closed characteristic on `{x . A x = level}`:
/// `level * 2 pi / max omega_j` (action equals level times period for
/// 2-homogeneous Hamiltonians).
pub fn ellipsoid_capacity(a: &QuadraticForm, level: f64) -> Result<f64> {
    if !(level > 0.0) {
        return Err(Error::invalid("level must be positive"));
    }
    let freqs = symplectic_frequencies(a)?;
    let wmax = *freqs.last().expect("at least one frequency");
    Ok(level * std::f64::consts::TAU / wmax)
}

/// `vol {x . A x <= level} = pi^n level^n / (n! sqrt(det A))`.
pub fn ellipsoid_volume(a: &QuadraticForm, level: f64) -> Result<f64> {
    let n = phase_n(a)?;
    Ok(ball_volume_2n(n) * level.powi(n as i32) / a.determinant().sqrt())
}

/// Capacity, volume and Viterbo ratio of `{x . A x <= level}`.
#[derive(Debug, Clone, Serialize)]
pub struct EllipsoidSummary {
    pub n: usize,
    pub frequencies: Vec<f64>,
    pub capacity: f64,
    pub volume: f64,
    pub ratio: f64,
}

pub fn ellipsoid_summary(a: &QuadraticForm, level: f64) -> Result<EllipsoidSummary> {
    let n = phase_n(a)?;
    let frequencies = symplectic_frequencies(a)?;
    let capacity = ellipsoid_capacity(a, level)?;
    let volume = ellipsoid_volume(a, level)?;
    let ratio = crate::verify::viterbo_ratio(volume, capacity, n);
    Ok(EllipsoidSummary { n, frequencies, capacity, volume, ratio })
}
