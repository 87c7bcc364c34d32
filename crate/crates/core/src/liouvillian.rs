//! The master-equation generator
//!
//! ```text
//! dρ/dτ = −i[H, ρ] + κ(2aρa† − a†aρ − ρa†a)
//! ```
//!
//! as a dense superoperator on column-stacked density matrices, together with
//! its stationary state and spectrum.
//!
//! Column stacking puts ρ_ij at `i + j·D`, so `vec(AXB) = (Bᵀ ⊗ A) vec(X)`:
//!
//! ```text
//! L = −i(I ⊗ H − Hᵀ ⊗ I) + κ(2 ā ⊗ a − I ⊗ a†a − (a†a)ᵀ ⊗ I)
//! ```
//!
//! This matches nalgebra's column-major storage, so `vec(ρ)` is just the
//! matrix's backing slice.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::model::{build_field_ops, build_hamiltonian, CMatrix, HilbertSpace, ModelParams, Operator, I, ONE, ZERO};
use crate::state::DensityMatrix;

/// Largest superoperator side (D²) handled with dense factorizations.
pub const MAX_DENSE_SIDE: usize = 4096;

/// Bordered-system condition estimates above this mark a degenerate null space.
const DEGENERACY_CONDITION: f64 = 1e13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vectorization {
    ColumnStacking,
}

/// Row-compressed copy of the generator for repeated application.
#[derive(Debug, Clone, PartialEq)]
struct SparseRows {
    row_start: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseRows {
    fn from_dense(m: &CMatrix) -> Self {
        let mut row_start = Vec::with_capacity(m.nrows() + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_start.push(0);
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let z = m[(r, c)];
                if z != ZERO {
                    cols.push(c);
                    values.push(z);
                }
            }
            row_start.push(cols.len());
        }
        Self {
            row_start,
            cols,
            values,
        }
    }

    fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (r, y) in out.iter_mut().enumerate() {
            let (lo, hi) = (self.row_start[r], self.row_start[r + 1]);
            let mut acc = ZERO;
            for k in lo..hi {
                acc += self.values[k] * x[self.cols[k]];
            }
            *y = acc;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    matrix: CMatrix,
    sparse: SparseRows,
    space: HilbertSpace,
    kappa: f64,
    source_params: Option<ModelParams>,
    vectorization: Vectorization,
}

pub fn build_liouvillian(h: &Operator, kappa: f64, space: &HilbertSpace) -> Result<Liouvillian> {
    h.check_dim(space)?;
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(invalid("kappa", "must be positive and finite"));
    }
    let scale = h.matrix.iter().fold(1.0f64, |a, z| a.max(z.norm()));
    if h.hermiticity_error() > 1e-12 * scale {
        return Err(invalid("H", "Hamiltonian is not Hermitian"));
    }
    let d = space.dim();
    let side = d * d;
    if side > MAX_DENSE_SIDE {
        return Err(Error::ProblemTooLarge {
            side,
            limit: MAX_DENSE_SIDE,
        });
    }

    let (a, adag) = build_field_ops(space);
    let photons = &adag.matrix * &a.matrix;
    let id = CMatrix::identity(d, d);
    let k = Complex64::new(kappa, 0.0);

    let coherent = (id.kronecker(&h.matrix) - h.matrix.transpose().kronecker(&id)) * (-I);
    let dissipator = (a.matrix.conjugate().kronecker(&a.matrix) * Complex64::new(2.0, 0.0)
        - id.kronecker(&photons)
        - photons.transpose().kronecker(&id))
        * k;
    let matrix = coherent + dissipator;
    let sparse = SparseRows::from_dense(&matrix);
    Ok(Liouvillian {
        matrix,
        sparse,
        space: *space,
        kappa,
        source_params: None,
        vectorization: Vectorization::ColumnStacking,
    })
}

impl Liouvillian {
    /// Generator of the full model for `params`.
    pub fn from_params(params: &ModelParams, space: &HilbertSpace) -> Result<Self> {
        let h = build_hamiltonian(params, space)?;
        let mut l = build_liouvillian(&h.total, params.kappa(), space)?;
        l.source_params = Some(*params);
        Ok(l)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Side length D² of the superoperator.
    pub fn side(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn source_params(&self) -> Option<&ModelParams> {
        self.source_params.as_ref()
    }

    pub fn vectorization(&self) -> Vectorization {
        self.vectorization
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.matrix.iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    /// out = L·x on column-stacked vectors.
    pub fn apply_vectorized(&self, x: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(x.len(), self.side());
        assert_eq!(out.len(), self.side());
        self.sparse.apply(x, out);
    }

    /// L(ρ) for an arbitrary (not necessarily physical) matrix.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let d = self.space.dim();
        assert_eq!(rho.shape(), (d, d));
        let mut out = vec![ZERO; d * d];
        self.sparse.apply(rho.as_slice(), &mut out);
        CMatrix::from_vec(d, d, out)
    }

    /// Default threshold separating stationary from slow eigenvalues:
    /// 1e-10 · max|L_ij| · D.
    pub fn default_zero_tolerance(&self) -> f64 {
        1e-10 * self.max_abs_entry() * self.space.dim() as f64
    }
}

fn trace_positions(d: usize) -> impl Iterator<Item = usize> {
    (0..d).map(move |i| i + i * d)
}

/// Unique stationary state, from the bordered system
/// `[L  c; tr  0]·[vec ρ; μ] = [0; 1]`.
///
/// `c` is the transpose of the trace row; since every column of `L` is
/// traceless `c` lies outside its range and the system is regular exactly
/// when the null space is one-dimensional.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let d = l.space.dim();
    let n = l.side();
    let mut b = CMatrix::zeros(n + 1, n + 1);
    b.view_mut((0, 0), (n, n)).copy_from(&l.matrix);
    for k in trace_positions(d) {
        b[(n, k)] = ONE;
        b[(k, n)] = ONE;
    }
    let b_norm = b.norm();
    let lu = b.lu();

    let degenerate = |condition: f64| Error::DegenerateSteadyState {
        nullity: spectrum(l, None).ok().map(|s| s.nullity),
        condition,
    };

    let mut rhs = DVector::zeros(n + 1);
    rhs[n] = ONE;
    let Some(x) = lu.solve(&rhs) else {
        return Err(degenerate(f64::INFINITY));
    };

    // Two steps of inverse iteration bound ‖B⁻¹‖ from below.
    let mut probe = DVector::from_fn(n + 1, |k, _| {
        let s = (k as f64 * 0.7071).sin();
        Complex64::new(1.0 + s, (k as f64 * 1.3).cos())
    });
    let mut growth: f64 = 0.0;
    for _ in 0..2 {
        let norm = probe.norm();
        probe /= Complex64::new(norm, 0.0);
        match lu.solve(&probe) {
            Some(next) => {
                growth = growth.max(next.norm());
                probe = next;
            }
            None => return Err(degenerate(f64::INFINITY)),
        }
    }
    let condition = growth * b_norm;
    if !condition.is_finite() || condition > DEGENERACY_CONDITION {
        return Err(degenerate(condition));
    }

    let rho = CMatrix::from_column_slice(d, d, &x.as_slice()[..n]);
    let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let residual = l.apply(&rho).norm();
    if residual > 1e-10 * l.matrix.norm() * rho.norm() {
        return Err(Error::SingularSystem(format!(
            "steady-state residual {residual:e} is too large"
        )));
    }
    let rho = DensityMatrix::from_matrix(rho)?;
    rho.check_truncation(&l.space)?;
    Ok(rho)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// All D² eigenvalues s_j = −R_j + iI_j, ordered by decreasing real part.
    pub eigenvalues: Vec<Complex64>,
    pub zero_tolerance: f64,
    /// Eigenvalues with |Re s| below the tolerance.
    pub zero_count: usize,
    /// Eigenvalues with |s| below the tolerance.
    pub nullity: usize,
    /// Smallest decay rate above the tolerance.
    pub slowest_rate: f64,
    /// 1 / `slowest_rate`, in units of 1/κ; infinite when no mode decays.
    pub tau_max: f64,
    /// The slowest rate sits within a decade of the tolerance.
    pub divergent: bool,
    /// Largest Re s over all eigenvalues; positive values flag growing modes.
    pub max_real_part: f64,
}

/// Orthonormal Hermitian basis of D×D matrices, as sparse column-stacked
/// vectors. Element 0 is I/√D; the rest are traceless.
fn hermitian_basis(d: usize) -> Vec<Vec<(usize, Complex64)>> {
    let mut basis = Vec::with_capacity(d * d);
    let inv = 1.0 / (d as f64).sqrt();
    basis.push(trace_positions(d).map(|p| (p, Complex64::new(inv, 0.0))).collect());
    for k in 1..d {
        let norm = 1.0 / ((k * (k + 1)) as f64).sqrt();
        let mut v: Vec<(usize, Complex64)> = (0..k)
            .map(|j| (j + j * d, Complex64::new(norm, 0.0)))
            .collect();
        v.push((k + k * d, Complex64::new(-(k as f64) * norm, 0.0)));
        basis.push(v);
    }
    let r = core::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            // E_jk sits at j + k·d
            basis.push(vec![(j + k * d, Complex64::new(r, 0.0)), (k + j * d, Complex64::new(r, 0.0))]);
            basis.push(vec![(j + k * d, Complex64::new(0.0, r)), (k + j * d, Complex64::new(0.0, -r))]);
        }
    }
    basis
}

/// The generator restricted to traceless Hermitian matrices, as a real matrix.
///
/// Trace preservation makes the I/√D row of the full real representation
/// vanish, so the full spectrum is this block's spectrum plus one exact zero.
fn traceless_real_generator(l: &Liouvillian) -> DMatrix<f64> {
    let d = l.space.dim();
    let basis = hermitian_basis(d);
    let n = basis.len();
    let mut out = DMatrix::zeros(n - 1, n - 1);
    let mut column = vec![ZERO; n];
    for b in 1..n {
        column.iter_mut().for_each(|z| *z = ZERO);
        for &(p, c) in &basis[b] {
            for (r, z) in column.iter_mut().enumerate() {
                *z += l.matrix[(r, p)] * c;
            }
        }
        for a in 1..n {
            let v: Complex64 = basis[a].iter().map(|&(p, c)| c.conj() * column[p]).sum();
            out[(a - 1, b - 1)] = v.re;
        }
    }
    out
}

/// Full eigenvalue set and the relaxation time τ_max = 1/min{R_j > tol}.
///
/// `zero_tol` defaults to [`Liouvillian::default_zero_tolerance`].
pub fn spectrum(l: &Liouvillian, zero_tol: Option<f64>) -> Result<SpectrumResult> {
    let zero_tolerance = zero_tol.unwrap_or_else(|| l.default_zero_tolerance());
    if !(zero_tolerance.is_finite() && zero_tolerance > 0.0) {
        return Err(invalid("zero_tol", "must be positive"));
    }
    let side = l.side();
    if side > MAX_DENSE_SIDE {
        return Err(Error::ProblemTooLarge {
            side,
            limit: MAX_DENSE_SIDE,
        });
    }

    let mut eigenvalues = vec![ZERO];
    if side > 1 {
        let m = traceless_real_generator(l);
        let m = faer::Mat::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
        let values = m
            .eigenvalues()
            .map_err(|e| Error::EigensolverFailure(format!("{e:?} (side {side})")))?;
        eigenvalues.extend(values.iter().map(|z| Complex64::new(z.re, z.im)));
    }
    if eigenvalues.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::EigensolverFailure("non-finite eigenvalue".into()));
    }
    eigenvalues.sort_by(|x, y| y.re.total_cmp(&x.re).then(x.im.total_cmp(&y.im)));

    let zero_count = eigenvalues.iter().filter(|z| z.re.abs() < zero_tolerance).count();
    let nullity = eigenvalues.iter().filter(|z| z.norm() < zero_tolerance).count();
    let max_real_part = eigenvalues.iter().fold(f64::NEG_INFINITY, |a, z| a.max(z.re));
    let slowest_rate = eigenvalues
        .iter()
        .map(|z| -z.re)
        .filter(|&r| r > zero_tolerance)
        .fold(f64::INFINITY, f64::min);
    let tau_max = 1.0 / slowest_rate;
    Ok(SpectrumResult {
        eigenvalues,
        zero_tolerance,
        zero_count,
        nullity,
        slowest_rate,
        tau_max,
        divergent: slowest_rate < 10.0 * zero_tolerance,
        max_real_part,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_field_ops, TruncationConfig};
    use approx::assert_abs_diff_eq;

    fn space(n: usize, nc: usize) -> HilbertSpace {
        HilbertSpace::new(n, TruncationConfig::new(nc, 1e-8).unwrap()).unwrap()
    }

    /// Deterministic pseudo-random Hermitian matrix (not normalized).
    pub(crate) fn test_matrix(d: usize, seed: f64) -> CMatrix {
        let m = CMatrix::from_fn(d, d, |i, j| {
            let x = (seed + 1.7 * i as f64 + 0.31 * (j * j) as f64).sin();
            let y = (seed * 0.5 + 0.9 * j as f64 - 0.23 * (i * j) as f64).cos();
            Complex64::new(x, y)
        });
        &m + m.adjoint()
    }

    fn direct_rhs(h: &CMatrix, a: &CMatrix, kappa: f64, rho: &CMatrix) -> CMatrix {
        let adag = a.adjoint();
        let n = &adag * a;
        let comm = h * rho - rho * h;
        comm * (-I) + (a * rho * &adag * Complex64::new(2.0, 0.0) - &n * rho - rho * &n) * Complex64::new(kappa, 0.0)
    }

    #[test]
    fn agrees_with_direct_evaluation() {
        let p = ModelParams::default().with_delta(0.7).with_eta(0.4);
        let s = space(2, 3);
        let h = build_hamiltonian(&p, &s).unwrap();
        let l = build_liouvillian(&h.total, 1.3, &s).unwrap();
        let (a, _) = build_field_ops(&s);
        for seed in [0.1, 2.0, 5.5] {
            let rho = test_matrix(s.dim(), seed);
            // also a non-Hermitian input
            let x = &rho * Complex64::new(0.3, 0.8);
            for m in [&rho, &x] {
                let direct = direct_rhs(&h.total.matrix, &a.matrix, 1.3, m);
                let dense = CMatrix::from_vec(
                    s.dim(),
                    s.dim(),
                    (l.matrix() * DVector::from_column_slice(m.as_slice())).as_slice().to_vec(),
                );
                let scale = 1.0 + direct.norm();
                assert!((&direct - l.apply(m)).norm() < 1e-12 * scale);
                assert!((&direct - dense).norm() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn trace_preserving() {
        let p = ModelParams::default().with_delta(-1.1).with_eta(0.5);
        let s = space(2, 4);
        let l = Liouvillian::from_params(&p, &s).unwrap();
        for seed in [0.4, 3.3] {
            let rho = test_matrix(s.dim(), seed);
            assert!(l.apply(&rho).trace().norm() < 1e-10);
        }
    }

    #[test]
    fn vacuum_is_stationary_without_hamiltonian() {
        let s = space(2, 3);
        let zero = Operator::new("0", CMatrix::zeros(s.dim(), s.dim()));
        let l = build_liouvillian(&zero, 1.0, &s).unwrap();
        let mut atoms = test_matrix(3, 1.0);
        atoms /= atoms.trace();
        let mut vac = CMatrix::zeros(4, 4);
        vac[(0, 0)] = ONE;
        let rho = atoms.kronecker(&vac);
        assert!(l.apply(&rho).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = space(1, 2);
        let h = Operator::new("bad", test_matrix(s.dim(), 0.5) * I);
        assert!(build_liouvillian(&h, 1.0, &s).is_err());
        let h = Operator::new("ok", test_matrix(s.dim(), 0.5));
        assert!(build_liouvillian(&h, 0.0, &s).is_err());
        let other = Operator::new("small", test_matrix(3, 0.5));
        assert!(matches!(build_liouvillian(&other, 1.0, &s), Err(Error::DimensionMismatch { .. })));
        let big = space(2, 21);
        assert!(matches!(
            Liouvillian::from_params(&ModelParams::default(), &big),
            Err(Error::ProblemTooLarge { .. })
        ));
    }

    #[test]
    fn hermitian_basis_is_orthonormal() {
        let d = 4;
        let b = hermitian_basis(d);
        assert_eq!(b.len(), d * d);
        let dense: Vec<DVector<Complex64>> = b
            .iter()
            .map(|v| {
                let mut x = DVector::zeros(d * d);
                for &(p, c) in v {
                    x[p] += c;
                }
                x
            })
            .collect();
        for (i, x) in dense.iter().enumerate() {
            let m = CMatrix::from_column_slice(d, d, x.as_slice());
            assert!((&m - m.adjoint()).norm() < 1e-15);
            if i > 0 {
                assert!(m.trace().norm() < 1e-14);
            }
            for (j, y) in dense.iter().enumerate() {
                let ip = x.dotc(y);
                assert_abs_diff_eq!(ip.re, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-14);
            }
        }
    }

    /// Empty atomic sector, no pump: −κ(p+q) + iΔ(p−q).
    #[test]
    fn damped_mode_spectrum() {
        let nc = 4;
        let delta = 0.8;
        let p = ModelParams {
            n_atoms: 0,
            eta: 0.0,
            u0: 0.0,
            ..ModelParams::default()
        }
        .with_delta(delta);
        let s = space(0, nc);
        let l = Liouvillian::from_params(&p, &s).unwrap();
        let spec = spectrum(&l, None).unwrap();
        let mut expected: Vec<Complex64> = Vec::new();
        for a in 0..=nc {
            for b in 0..=nc {
                expected.push(Complex64::new(-((a + b) as f64), delta * (a as f64 - b as f64)));
            }
        }
        let mut remaining = expected.clone();
        for z in &spec.eigenvalues {
            let (k, dist) = remaining
                .iter()
                .enumerate()
                .map(|(k, e)| (k, (e - z).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            assert!(dist < 1e-8, "eigenvalue {z} unmatched");
            remaining.swap_remove(k);
        }
        assert!(remaining.is_empty());
        assert_eq!(spec.zero_count, 1);
        assert_abs_diff_eq!(spec.tau_max, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn spectrum_is_stable_and_conjugate_closed() {
        let p = ModelParams::default().with_delta(2.0).with_eta(0.3);
        let s = space(2, 3);
        let l = Liouvillian::from_params(&p, &s).unwrap();
        let spec = spectrum(&l, None).unwrap();
        assert_eq!(spec.eigenvalues.len(), s.dim() * s.dim());
        assert!(spec.max_real_part < spec.zero_tolerance);
        for z in &spec.eigenvalues {
            let partner = spec
                .eigenvalues
                .iter()
                .map(|w| (w - z.conj()).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(partner < 1e-8);
        }
        assert_eq!(spec.zero_count, 1);
    }

    #[test]
    fn frozen_tunneling_has_one_stationary_state_per_configuration() {
        let p = ModelParams::default().frozen();
        let s = space(2, 3);
        let l = Liouvillian::from_params(&p, &s).unwrap();
        let spec = spectrum(&l, Some(1e-9)).unwrap();
        assert_eq!(spec.nullity, 3);
        assert!(matches!(steady_state(&l), Err(Error::DegenerateSteadyState { nullity: Some(3), .. })));
    }

    #[test]
    fn fully_decoupled_point_is_degenerate() {
        let p = ModelParams {
            eta: 0.0,
            u0: 0.0,
            t: 0.0,
            ..ModelParams::default()
        };
        let s = space(2, 2);
        let l = Liouvillian::from_params(&p, &s).unwrap();
        match steady_state(&l) {
            Err(Error::DegenerateSteadyState { nullity, .. }) => assert!(nullity.unwrap() > 1),
            other => panic!("expected degeneracy, got {other:?}"),
        }
    }

    #[test]
    fn generic_steady_state() {
        let p = ModelParams::default();
        let s = space(2, 4);
        let l = Liouvillian::from_params(&p, &s).unwrap();
        let rho = steady_state(&l).unwrap();
        let residual = l.apply(rho.matrix()).norm();
        assert!(residual < 1e-10 * l.matrix().norm());
        assert!(rho.hermiticity_error() < 1e-10);
        assert!(rho.min_eigenvalue() > -1e-8);
        let atoms = rho.atomic_rdm(&s).unwrap();
        for m in 0..3 {
            assert_abs_diff_eq!(atoms.matrix()[(m, m)].re, 1.0 / 3.0, epsilon = 0.03);
        }
    }
}
