//! Model parameters, the composite atom ⊗ field Hilbert space and the
//! operators acting on it.
//!
//! Basis layout is atom-major: the product state |m⟩ ⊗ |n⟩, with `m` atoms in
//! the coupled well and `n` photons, sits at index `m * field_dim + n`.
//! Every module relies on this layout.

use alloc::format;
use alloc::string::String;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{invalid, Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Physical couplings in units of the cavity loss rate κ (κ ≡ 1).
///
/// The two-well overlap coefficients are assumed already folded in via
/// [`reduce_couplings`], so only the first well couples to the field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub n_atoms: usize,
    /// Interwell tunneling rate.
    pub t: f64,
    /// On-site interaction.
    pub u: f64,
    /// Dispersive shift per photon per atom in the coupled well.
    pub u0: f64,
    /// Pump-cavity detuning.
    pub delta: f64,
    /// Pump amplitude.
    pub eta: f64,
    /// κ in rad/s, for converting dimensionless times to seconds.
    pub kappa_ref: f64,
}

/// Frequencies as entered by a user: each rate is 2π × the value in Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequenciesHz {
    pub n_atoms: usize,
    pub t: f64,
    pub u: f64,
    pub u0: f64,
    pub delta: f64,
    pub eta: f64,
    pub kappa: f64,
}

impl FrequenciesHz {
    /// (t, u) = 2π × (400, 200) Hz, (κ, U0, η) = 2π × (1.5, 6.0, 0.1) MHz, N = 2,
    /// pump on the m = 1 resonance.
    pub fn reference() -> Self {
        Self {
            n_atoms: 2,
            t: 400.0,
            u: 200.0,
            u0: 6.0e6,
            delta: 6.0e6,
            eta: 0.1e6,
            kappa: 1.5e6,
        }
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::from_hz(&FrequenciesHz::reference()).expect("reference parameters are valid")
    }
}

impl ModelParams {
    pub fn from_hz(f: &FrequenciesHz) -> Result<Self> {
        if !(f.kappa.is_finite() && f.kappa > 0.0) {
            return Err(invalid("kappa", "must be positive and finite"));
        }
        let p = Self {
            n_atoms: f.n_atoms,
            t: f.t / f.kappa,
            u: f.u / f.kappa,
            u0: f.u0 / f.kappa,
            delta: f.delta / f.kappa,
            eta: f.eta / f.kappa,
            kappa_ref: 2.0 * PI * f.kappa,
        };
        p.validate()?;
        Ok(p)
    }

    /// The loss rate in internal units.
    pub const fn kappa(&self) -> f64 {
        1.0
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("t", self.t),
            ("u", self.u),
            ("u0", self.u0),
            ("delta", self.delta),
            ("eta", self.eta),
            ("kappa_ref", self.kappa_ref),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        if self.eta < 0.0 {
            return Err(invalid("eta", "must be non-negative"));
        }
        if self.kappa_ref <= 0.0 {
            return Err(invalid("kappa_ref", "must be positive"));
        }
        Ok(())
    }

    pub fn with_delta(self, delta: f64) -> Self {
        Self { delta, ..self }
    }

    pub fn with_eta(self, eta: f64) -> Self {
        Self { eta, ..self }
    }

    /// Same parameters with tunneling switched off.
    pub fn frozen(self) -> Self {
        Self { t: 0.0, ..self }
    }

    /// Converts a dimensionless time κτ to seconds.
    pub fn seconds(&self, kappa_tau: f64) -> f64 {
        kappa_tau / self.kappa_ref
    }
}

/// Rewrites general overlap coefficients (J1, J2) into the equivalent
/// (J1, J2) = (1, 0) couplings: returns (Δ − U0·J2·N, U0·(J1 − J2)).
pub fn reduce_couplings(delta: f64, u0: f64, j1: f64, j2: f64, n_atoms: usize) -> Result<(f64, f64)> {
    for (name, v) in [("J1", j1), ("J2", j2)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::CouplingOutOfRange { name, value: v });
        }
    }
    Ok((delta - u0 * j2 * n_atoms as f64, u0 * (j1 - j2)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationConfig {
    /// Highest retained photon number n_c.
    pub fock_cutoff: usize,
    /// Largest population tolerated in the top Fock level.
    pub tail_tolerance: f64,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self {
            fock_cutoff: 8,
            tail_tolerance: 1e-8,
        }
    }
}

impl TruncationConfig {
    pub fn new(fock_cutoff: usize, tail_tolerance: f64) -> Result<Self> {
        if fock_cutoff < 1 {
            return Err(invalid("fock_cutoff", "must be at least 1"));
        }
        if !(tail_tolerance > 0.0 && tail_tolerance < 1.0) {
            return Err(invalid("tail_tolerance", "must lie in (0, 1)"));
        }
        Ok(Self {
            fock_cutoff,
            tail_tolerance,
        })
    }

    /// Smallest cutoff for which a coherent state of mean photon number
    /// `mean_photons` leaves less than 1% of the tolerance in its top level.
    ///
    /// Any state built from coherent components with |α|² ≤ `mean_photons`
    /// (every steady state, given the η²/κ² bound) is then safely embedded.
    pub fn for_photon_bound(mean_photons: f64, tail_tolerance: f64) -> Result<Self> {
        if !(mean_photons.is_finite() && mean_photons >= 0.0) {
            return Err(invalid("mean_photons", "must be finite and non-negative"));
        }
        let target = 0.01 * tail_tolerance;
        // Poisson pmf, tracked in log space.
        let mut n = 2usize;
        loop {
            let log_p = if mean_photons == 0.0 {
                f64::NEG_INFINITY
            } else {
                -mean_photons + n as f64 * mean_photons.ln() - ln_factorial(n)
            };
            if log_p < target.ln() && n as f64 > mean_photons {
                return Self::new(n, tail_tolerance);
            }
            n += 1;
        }
    }
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Fixed-N atomic sector ⊗ truncated Fock space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HilbertSpace {
    n_atoms: usize,
    truncation: TruncationConfig,
}

impl HilbertSpace {
    pub fn new(n_atoms: usize, truncation: TruncationConfig) -> Result<Self> {
        let truncation = TruncationConfig::new(truncation.fock_cutoff, truncation.tail_tolerance)?;
        Ok(Self {
            n_atoms,
            truncation,
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn fock_cutoff(&self) -> usize {
        self.truncation.fock_cutoff
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.truncation.tail_tolerance
    }

    pub fn truncation(&self) -> TruncationConfig {
        self.truncation
    }

    pub fn atom_dim(&self) -> usize {
        self.n_atoms + 1
    }

    pub fn field_dim(&self) -> usize {
        self.truncation.fock_cutoff + 1
    }

    pub fn dim(&self) -> usize {
        self.atom_dim() * self.field_dim()
    }

    /// Index of |m⟩ ⊗ |n⟩.
    pub fn index(&self, m: usize, n: usize) -> usize {
        debug_assert!(m < self.atom_dim() && n < self.field_dim());
        m * self.field_dim() + n
    }

    /// Inverse of [`HilbertSpace::index`].
    pub fn split(&self, k: usize) -> (usize, usize) {
        (k / self.field_dim(), k % self.field_dim())
    }

    /// Lifts an atomic operator to the composite space.
    pub fn lift_atomic(&self, op: &CMatrix) -> CMatrix {
        op.kronecker(&CMatrix::identity(self.field_dim(), self.field_dim()))
    }

    /// Lifts a field operator to the composite space.
    pub fn lift_field(&self, op: &CMatrix) -> CMatrix {
        CMatrix::identity(self.atom_dim(), self.atom_dim()).kronecker(op)
    }
}

/// A labeled dense operator on a [`HilbertSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    pub label: String,
    pub matrix: CMatrix,
}

impl Operator {
    pub fn new(label: impl Into<String>, matrix: CMatrix) -> Self {
        assert!(matrix.is_square(), "operators are square");
        Self {
            label: label.into(),
            matrix,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn check_dim(&self, space: &HilbertSpace) -> Result<()> {
        if self.dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: self.dim(),
            });
        }
        Ok(())
    }

    /// Largest entry of |M − M†|.
    pub fn hermiticity_error(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn adjoint(&self) -> Self {
        Self::new(format!("({})†", self.label), self.matrix.adjoint())
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self::new(
            format!("[{}, {}]", self.label, other.label),
            &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        )
    }
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Truncated annihilation and creation operators, identity on the atoms.
pub fn build_field_ops(space: &HilbertSpace) -> (Operator, Operator) {
    let d = space.field_dim();
    let mut a = CMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let a = space.lift_field(&a);
    let adag = a.adjoint();
    (Operator::new("a", a), Operator::new("a†", adag))
}

/// f(m) = √((m+1)(N−m)), the amplitude of |m⟩ → |m+1⟩ under b1†b2.
pub fn hop_amplitude(m: usize, n_atoms: usize) -> f64 {
    if m >= n_atoms {
        return 0.0;
    }
    (((m + 1) * (n_atoms - m)) as f64).sqrt()
}

fn atomic_raising(n_atoms: usize) -> CMatrix {
    let d = n_atoms + 1;
    let mut s = CMatrix::zeros(d, d);
    for m in 0..n_atoms {
        s[(m + 1, m)] = Complex64::new(hop_amplitude(m, n_atoms), 0.0);
    }
    s
}

fn check_atoms(space: &HilbertSpace, n_atoms: usize) -> Result<()> {
    if space.n_atoms() != n_atoms {
        return Err(Error::DimensionMismatch {
            expected: space.atom_dim(),
            found: n_atoms + 1,
        });
    }
    Ok(())
}

/// Well occupations n1, n2 and the hopping term b1†b2 + b2†b1, lifted to the
/// composite space.
pub fn build_atom_ops(space: &HilbertSpace, n_atoms: usize) -> Result<(Operator, Operator, Operator)> {
    check_atoms(space, n_atoms)?;
    let d = n_atoms + 1;
    let n1 = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |m, _| Complex64::new(m as f64, 0.0)));
    let n2 = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |m, _| {
        Complex64::new((n_atoms - m) as f64, 0.0)
    }));
    let raise = atomic_raising(n_atoms);
    let hop = &raise + raise.adjoint();
    Ok((
        Operator::new("n1", space.lift_atomic(&n1)),
        Operator::new("n2", space.lift_atomic(&n2)),
        Operator::new("b1†b2 + b2†b1", space.lift_atomic(&hop)),
    ))
}

/// Angular-momentum operators of the two-mode (Schwinger) representation.
pub fn build_schwinger(space: &HilbertSpace, n_atoms: usize) -> Result<(Operator, Operator, Operator)> {
    check_atoms(space, n_atoms)?;
    let d = n_atoms + 1;
    let raise = atomic_raising(n_atoms);
    let lower = raise.adjoint();
    let sx = (&raise + &lower) * Complex64::new(0.5, 0.0);
    // S_y = (i/2)(b2†b1 − b1†b2)
    let sy = (&lower - &raise) * Complex64::new(0.0, 0.5);
    let half_n = n_atoms as f64 / 2.0;
    let sz = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |m, _| {
        Complex64::new(m as f64 - half_n, 0.0)
    }));
    Ok((
        Operator::new("Sx", space.lift_atomic(&sx)),
        Operator::new("Sy", space.lift_atomic(&sy)),
        Operator::new("Sz", space.lift_atomic(&sz)),
    ))
}

/// The Hamiltonian split into its tunneling and non-tunneling parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    pub tunneling: Operator,
    pub non_tunneling: Operator,
    pub total: Operator,
}

pub fn build_hamiltonian(params: &ModelParams, space: &HilbertSpace) -> Result<Hamiltonian> {
    params.validate()?;
    let n = params.n_atoms;
    let (a, adag) = build_field_ops(space);
    let (n1, n2, hop) = build_atom_ops(space, n)?;
    let photons = &adag.matrix * &a.matrix;
    let id = CMatrix::identity(space.dim(), space.dim());
    let re = |x: f64| Complex64::new(x, 0.0);

    let tunneling = &hop.matrix * re(-params.t);
    let onsite = (&n1.matrix * (&n1.matrix - &id) + &n2.matrix * (&n2.matrix - &id)) * re(params.u / 2.0);
    let non_tunneling = &photons * re(-params.delta)
        + (&a.matrix + &adag.matrix) * re(params.eta)
        + &photons * &n1.matrix * re(params.u0)
        + onsite;
    let total = &tunneling + &non_tunneling;
    Ok(Hamiltonian {
        tunneling: Operator::new("H_t", tunneling),
        non_tunneling: Operator::new("H_non", non_tunneling),
        total: Operator::new("H", total),
    })
}

/// The non-tunneling Hamiltonian written through S_z as a dispersive Dicke
/// model: (U0 N/2 − Δ) a†a + (U0/2)(2a†a + 1) S_z + η(a + a†)
/// + u(S_z² + N²/4 − N/2) − (U0/2) S_z.
pub fn dicke_form_non_tunneling(params: &ModelParams, space: &HilbertSpace) -> Result<Operator> {
    let n = params.n_atoms as f64;
    let (a, adag) = build_field_ops(space);
    let (_, _, sz) = build_schwinger(space, params.n_atoms)?;
    let photons = &adag.matrix * &a.matrix;
    let id = CMatrix::identity(space.dim(), space.dim());
    let re = |x: f64| Complex64::new(x, 0.0);
    let sz = &sz.matrix;

    let m = &photons * re(params.u0 * n / 2.0 - params.delta)
        + (&photons * re(2.0) + &id) * sz * re(params.u0 / 2.0)
        + (&a.matrix + &adag.matrix) * re(params.eta)
        + (sz * sz + &id * re(n * n / 4.0 - n / 2.0)) * re(params.u)
        - sz * re(params.u0 / 2.0);
    Ok(Operator::new("H_non (Dicke form)", m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn space(n: usize, nc: usize) -> HilbertSpace {
        HilbertSpace::new(n, TruncationConfig::new(nc, 1e-8).unwrap()).unwrap()
    }

    #[test]
    fn reduce_couplings_examples() {
        assert_eq!(reduce_couplings(2.0, 4.0, 1.0, 0.0, 2).unwrap(), (2.0, 4.0));
        assert_eq!(reduce_couplings(2.0, 4.0, 0.5, 0.5, 2).unwrap(), (-2.0, 0.0));
        let (d, u) = reduce_couplings(0.5, 1.0, 0.8, 0.3, 2).unwrap();
        assert_abs_diff_eq!(d, -0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(u, 0.5, epsilon = 1e-15);
        assert!(matches!(
            reduce_couplings(0.0, 1.0, 1.2, 0.0, 2),
            Err(Error::CouplingOutOfRange { name: "J1", .. })
        ));
        assert!(reduce_couplings(0.0, 1.0, 0.5, -0.1, 2).is_err());
    }

    #[test]
    fn hz_conversion() {
        let p = ModelParams::default();
        assert_abs_diff_eq!(p.u0, 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.eta, 1.0 / 15.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.t, 400.0 / 1.5e6, epsilon = 1e-18);
        assert_abs_diff_eq!(p.kappa_ref, 2.0 * PI * 1.5e6, epsilon = 1e-6);
    }

    #[test]
    fn rejects_bad_params() {
        let p = ModelParams::default();
        assert!(p.with_eta(-1.0).validate().is_err());
        assert!(p.with_delta(f64::NAN).validate().is_err());
        assert!(ModelParams { kappa_ref: 0.0, ..p }.validate().is_err());
        assert!(TruncationConfig::new(0, 1e-8).is_err());
        assert!(TruncationConfig::new(4, 1.0).is_err());
    }

    #[test]
    fn index_is_bijective() {
        let s = space(3, 5);
        let mut seen = alloc::vec![false; s.dim()];
        for m in 0..s.atom_dim() {
            for n in 0..s.field_dim() {
                let k = s.index(m, n);
                assert!(!seen[k]);
                seen[k] = true;
                assert_eq!(s.split(k), (m, n));
            }
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn single_photon_cutoff_annihilator() {
        let s = space(0, 1);
        let (a, _) = build_field_ops(&s);
        assert_eq!(a.matrix[(0, 1)], ONE);
        assert_eq!(a.matrix.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn truncated_commutator() {
        let s = space(2, 6);
        let (a, adag) = build_field_ops(&s);
        let c = a.commutator(&adag).matrix;
        for k in 0..s.dim() {
            let (_, n) = s.split(k);
            for l in 0..s.dim() {
                let expected = if k != l {
                    0.0
                } else if n == s.fock_cutoff() {
                    1.0 - (s.fock_cutoff() + 1) as f64
                } else {
                    1.0
                };
                assert_abs_diff_eq!(c[(k, l)].re, expected, epsilon = 1e-12);
                assert_abs_diff_eq!(c[(k, l)].im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn atom_operators() {
        let s = space(1, 1);
        let (_, _, hop) = build_atom_ops(&s, 1).unwrap();
        // |0⟩ ↔ |1⟩ exchange, same photon number
        assert_eq!(hop.matrix[(s.index(0, 0), s.index(1, 0))], ONE);
        assert_eq!(hop.matrix[(s.index(1, 1), s.index(0, 1))], ONE);

        let s = space(2, 2);
        let (n1, n2, hop) = build_atom_ops(&s, 2).unwrap();
        // ⟨2,0| hop |1,1⟩ in occupation notation is m = 2 ← m = 1
        assert_abs_diff_eq!(hop.matrix[(s.index(2, 0), s.index(1, 0))].re, 2f64.sqrt(), epsilon = 1e-15);
        let total = &n1.matrix + &n2.matrix;
        assert_eq!(total, CMatrix::identity(s.dim(), s.dim()) * Complex64::new(2.0, 0.0));
        assert!(build_atom_ops(&s, 3).is_err());
    }

    #[test]
    fn schwinger_algebra() {
        for n in [1usize, 2, 3, 5] {
            let s = space(n, 2);
            let (sx, sy, sz) = build_schwinger(&s, n).unwrap();
            let comm = sx.commutator(&sy).matrix;
            assert!(max_abs(&(comm - &sz.matrix * I)) < 1e-12);
            let casimir = &sx.matrix * &sx.matrix + &sy.matrix * &sy.matrix + &sz.matrix * &sz.matrix;
            let j = n as f64 / 2.0;
            let expected = CMatrix::identity(s.dim(), s.dim()) * Complex64::new(j * (j + 1.0), 0.0);
            assert!(max_abs(&(casimir - expected)) < 1e-12);
            for op in [&sx, &sy, &sz] {
                assert!(op.hermiticity_error() < 1e-12);
            }
            let (_, _, hop) = build_atom_ops(&s, n).unwrap();
            assert!(max_abs(&(&hop.matrix * Complex64::new(0.5, 0.0) - &sx.matrix)) < 1e-15);
        }
        let s = space(2, 1);
        let (_, _, sz) = build_schwinger(&s, 2).unwrap();
        let eig: alloc::vec::Vec<f64> = (0..3).map(|m| sz.matrix[(s.index(m, 0), s.index(m, 0))].re).collect();
        assert_eq!(eig, alloc::vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn hamiltonian_hermitian_and_conserves_atoms() {
        let p = ModelParams::default().with_delta(1.3);
        let s = space(2, 5);
        let h = build_hamiltonian(&p, &s).unwrap();
        for op in [&h.tunneling, &h.non_tunneling, &h.total] {
            assert!(op.hermiticity_error() < 1e-12);
        }
        let (n1, n2, _) = build_atom_ops(&s, 2).unwrap();
        let ntot = Operator::new("N", &n1.matrix + &n2.matrix);
        assert_eq!(max_abs(&h.total.commutator(&ntot).matrix), 0.0);
    }

    #[test]
    fn no_pump_no_shift_is_photon_block_diagonal() {
        let p = ModelParams {
            eta: 0.0,
            u0: 0.0,
            ..ModelParams::default()
        };
        let s = space(2, 4);
        let h = build_hamiltonian(&p, &s).unwrap();
        for k in 0..s.dim() {
            for l in 0..s.dim() {
                if s.split(k).1 != s.split(l).1 {
                    assert_eq!(h.total.matrix[(k, l)], ZERO);
                }
            }
        }
    }

    #[test]
    fn dicke_form_matches() {
        for (n, delta) in [(2usize, 4.0), (3, -1.7), (1, 0.3)] {
            let p = ModelParams {
                n_atoms: n,
                u: 0.37,
                ..ModelParams::default()
            }
            .with_delta(delta);
            let s = space(n, 6);
            let h = build_hamiltonian(&p, &s).unwrap();
            let d = dicke_form_non_tunneling(&p, &s).unwrap();
            assert!(max_abs(&(&h.non_tunneling.matrix - &d.matrix)) < 1e-12);
        }
    }

    #[test]
    fn hand_assembled_single_atom() {
        // N = 1, n_c = 1, t = 1, u = 0, U0 = 4, Δ = 2, η = 0.5
        // basis order |m=0,n=0⟩, |0,1⟩, |1,0⟩, |1,1⟩
        let p = ModelParams {
            n_atoms: 1,
            t: 1.0,
            u: 0.0,
            u0: 4.0,
            delta: 2.0,
            eta: 0.5,
            kappa_ref: 1.0,
        };
        let s = space(1, 1);
        let h = build_hamiltonian(&p, &s).unwrap().total.matrix;
        #[rustfmt::skip]
        let expected = [
            [0.0,  0.5, -1.0, 0.0],
            [0.5, -2.0,  0.0, -1.0],
            [-1.0, 0.0,  0.0, 0.5],
            [0.0, -1.0,  0.5, 2.0],
        ];
        for r in 0..4 {
            for c in 0..4 {
                assert_abs_diff_eq!(h[(r, c)].re, expected[r][c], epsilon = 1e-15);
                assert_eq!(h[(r, c)].im, 0.0);
            }
        }
    }

    #[test]
    fn auto_cutoff_grows_with_bound() {
        let weak = TruncationConfig::for_photon_bound(1.0 / 225.0, 1e-8).unwrap();
        let strong = TruncationConfig::for_photon_bound(1.0, 1e-8).unwrap();
        assert!(weak.fock_cutoff <= 5);
        assert!(strong.fock_cutoff > weak.fock_cutoff);
        // e^{-1}/n! < 1e-10
        assert!(-1.0 - ln_factorial(strong.fock_cutoff) < (1e-10f64).ln());
    }
}
