//! Density matrices, partial traces and distances.

use alloc::format;

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{max_abs, CMatrix, HilbertSpace, ZERO};

pub const TRACE_TOLERANCE: f64 = 1e-9;
pub const HERMITICITY_TOLERANCE: f64 = 1e-9;
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;

/// A validated density matrix: unit trace, Hermitian and positive
/// semidefinite to within the module tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidDensityMatrix(format!(
                "{}×{} is not square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
        }
        let rho = Self { matrix };
        let drift = (rho.trace() - 1.0).abs();
        if drift > TRACE_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("trace deviates from 1 by {drift:e}")));
        }
        let herm = rho.hermiticity_error();
        if herm > HERMITICITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("hermiticity error {herm:e}")));
        }
        let min = rho.min_eigenvalue();
        if min < -POSITIVITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    /// |ψ⟩⟨ψ| for a normalized copy of `psi`.
    pub fn from_pure(psi: &DVector<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidDensityMatrix("state vector has zero norm".into()));
        }
        let psi = psi / Complex64::new(norm, 0.0);
        Self::from_matrix(&psi * psi.adjoint())
    }

    /// Rebuilds ρ from its column-stacked vectorization.
    pub fn from_vectorized(v: &[Complex64]) -> Result<Self> {
        let d = (v.len() as f64).sqrt().round() as usize;
        if d * d != v.len() {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: v.len(),
            });
        }
        Self::from_matrix(CMatrix::from_column_slice(d, d, v))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Column-stacked entries.
    pub fn vectorized(&self) -> &[Complex64] {
        self.matrix.as_slice()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    fn eigenvalues(&self) -> DVector<f64> {
        let h = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(h).eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().iter().fold(f64::INFINITY, |a, &x| a.min(x))
    }

    /// tr(ρ O).
    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        assert_eq!(op.nrows(), self.dim());
        let mut acc = ZERO;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += self.matrix[(i, j)] * op[(j, i)];
            }
        }
        acc
    }

    /// ½ Σ |λ(ρ − σ)|.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "trace distance needs equal dimensions");
        let diff = &self.matrix - &other.matrix;
        let h = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
        0.5 * SymmetricEigen::new(h).eigenvalues.iter().map(|x| x.abs()).sum::<f64>()
    }

    fn check_space(&self, space: &HilbertSpace) -> Result<()> {
        if self.dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: self.dim(),
            });
        }
        Ok(())
    }

    /// ρ_a = tr_f ρ.
    pub fn atomic_rdm(&self, space: &HilbertSpace) -> Result<Self> {
        self.check_space(space)?;
        let (da, df) = (space.atom_dim(), space.field_dim());
        let out = CMatrix::from_fn(da, da, |m, n| {
            (0..df).map(|k| self.matrix[(m * df + k, n * df + k)]).sum()
        });
        Self::from_matrix(out)
    }

    /// ρ_f = tr_a ρ.
    pub fn field_rdm(&self, space: &HilbertSpace) -> Result<Self> {
        self.check_space(space)?;
        let (da, df) = (space.atom_dim(), space.field_dim());
        let out = CMatrix::from_fn(df, df, |p, q| {
            (0..da).map(|m| self.matrix[(m * df + p, m * df + q)]).sum()
        });
        Self::from_matrix(out)
    }

    /// Total population of the highest retained Fock level.
    pub fn top_fock_population(&self, space: &HilbertSpace) -> f64 {
        let nc = space.fock_cutoff();
        (0..space.atom_dim())
            .map(|m| {
                let k = space.index(m, nc);
                self.matrix[(k, k)].re
            })
            .sum()
    }

    pub fn check_truncation(&self, space: &HilbertSpace) -> Result<f64> {
        let tail = self.top_fock_population(space);
        if tail > space.tail_tolerance() {
            return Err(Error::TruncationBreach {
                population: tail,
                tolerance: space.tail_tolerance(),
                cutoff: space.fock_cutoff(),
            });
        }
        Ok(tail)
    }

    /// ρ ⊗ σ in the atom-major layout (`self` atomic).
    pub fn tensor(&self, field: &Self) -> Result<Self> {
        Self::from_matrix(self.matrix.kronecker(&field.matrix))
    }
}
