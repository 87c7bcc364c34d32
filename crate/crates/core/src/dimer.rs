//! Ground state of the bare two-well atomic Hamiltonian and the initial
//! atom ⊗ vacuum product state built from it.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::model::{hop_amplitude, HilbertSpace};
use crate::state::DensityMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct DimerGroundState {
    pub n_atoms: usize,
    /// g_m = ⟨m|G⟩, real, with g_0 ≥ 0.
    pub amplitudes: Vec<f64>,
    pub energy: f64,
}

impl DimerGroundState {
    /// |⟨m|G⟩|².
    pub fn weights(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|g| g * g).collect()
    }
}

/// On-site energy of |m⟩: (u/2)(m(m−1) + (N−m)(N−m−1)).
pub fn onsite_energy(m: usize, n_atoms: usize, u: f64) -> f64 {
    let m = m as f64;
    let r = n_atoms as f64 - m;
    0.5 * u * (m * (m - 1.0) + r * (r - 1.0))
}

/// The (N+1)×(N+1) atomic Hamiltonian in the |m⟩ basis.
pub fn atomic_hamiltonian(n_atoms: usize, t: f64, u: f64) -> DMatrix<f64> {
    let d = n_atoms + 1;
    let mut h = DMatrix::zeros(d, d);
    for m in 0..d {
        h[(m, m)] = onsite_energy(m, n_atoms, u);
        if m + 1 < d {
            let off = -t * hop_amplitude(m, n_atoms);
            h[(m, m + 1)] = off;
            h[(m + 1, m)] = off;
        }
    }
    h
}

pub fn ground_state(n_atoms: usize, t: f64, u: f64) -> Result<DimerGroundState> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", "tunneling must be positive for a unique ground state"));
    }
    if !u.is_finite() {
        return Err(invalid("u", "must be finite"));
    }
    if u < 0.0 {
        log::warn!("attractive on-site interaction u = {u}; results are outside the repulsive regime");
    }

    let h = atomic_hamiltonian(n_atoms, t, u);
    let scale = h.iter().fold(1e-300f64, |a, x| a.max(x.abs()));
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..=n_atoms).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let lowest = order[0];
    let energy = eig.eigenvalues[lowest];
    if let Some(&next) = order.get(1) {
        let gap = eig.eigenvalues[next] - energy;
        if gap <= 64.0 * f64::EPSILON * scale {
            return Err(Error::DegenerateGroundState { gap });
        }
    }

    let v = eig.eigenvectors.column(lowest);
    let sign = if v[0] < 0.0 { -1.0 } else { 1.0 };
    let norm = v.norm();
    let amplitudes = v.iter().map(|x| sign * x / norm).collect();
    Ok(DimerGroundState {
        n_atoms,
        amplitudes,
        energy,
    })
}

/// ρ(0) = |G⟩⟨G| ⊗ |0⟩⟨0|.
pub fn initial_state(gs: &DimerGroundState, space: &HilbertSpace) -> Result<DensityMatrix> {
    if gs.amplitudes.len() != space.atom_dim() {
        return Err(Error::DimensionMismatch {
            expected: space.atom_dim(),
            found: gs.amplitudes.len(),
        });
    }
    let mut psi = DVector::zeros(space.dim());
    for (m, g) in gs.amplitudes.iter().enumerate() {
        psi[space.index(m, 0)] = Complex64::new(*g, 0.0);
    }
    DensityMatrix::from_pure(&psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TruncationConfig;
    use approx::assert_abs_diff_eq;

    fn binomial(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn noninteracting_is_binomial() {
        for n in [1usize, 2, 3, 6] {
            let gs = ground_state(n, 0.7, 0.0).unwrap();
            for (m, w) in gs.weights().iter().enumerate() {
                assert_abs_diff_eq!(*w, binomial(n, m) / 2f64.powi(n as i32), epsilon = 1e-12);
            }
            assert_abs_diff_eq!(gs.energy, -0.7 * n as f64, epsilon = 1e-10);
        }
    }

    /// Independent route: the symmetric 2×2 block [[u, −2t], [−2t, 0]] in the
    /// basis ((|0⟩+|2⟩)/√2, |1⟩).
    #[test]
    fn two_atoms_closed_form() {
        let (t, u) = (1.0f64, 0.5f64);
        let e = (u - (u * u + 16.0 * t * t).sqrt()) / 2.0;
        let ratio = (u - e) / (2.0 * t); // y / x
        let x2 = 1.0 / (1.0 + ratio * ratio);
        let expected = [x2 / 2.0, 1.0 - x2, x2 / 2.0];

        let gs = ground_state(2, t, u).unwrap();
        assert_abs_diff_eq!(gs.energy, e, epsilon = 1e-12);
        for (w, x) in gs.weights().iter().zip(expected) {
            assert_abs_diff_eq!(*w, x, epsilon = 1e-12);
        }
        let w = gs.weights();
        assert_abs_diff_eq!(w[0], 0.2190, epsilon = 1e-3);
        assert_abs_diff_eq!(w[1], 0.5620, epsilon = 1e-3);
    }

    #[test]
    fn interaction_dominated_limit() {
        let gs = ground_state(2, 1e-6, 1.0).unwrap();
        let w = gs.weights();
        assert!(w[0] < 1e-10 && w[2] < 1e-10);
        assert_abs_diff_eq!(w[1], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn convention_and_symmetry() {
        for n in 1..7 {
            let gs = ground_state(n, 0.3, 0.9).unwrap();
            let s: f64 = gs.amplitudes.iter().map(|g| g * g).sum();
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
            assert!(gs.amplitudes.iter().all(|&g| g > 0.0));
            for m in 0..=n {
                assert_abs_diff_eq!(gs.amplitudes[m], gs.amplitudes[n - m], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn energy_decreases_with_tunneling() {
        let mut last = f64::INFINITY;
        for k in 1..40 {
            let e = ground_state(4, 0.05 * k as f64, 0.5).unwrap().energy;
            assert!(e < last);
            last = e;
        }
    }

    #[test]
    fn rejects_zero_tunneling() {
        assert!(ground_state(2, 0.0, 1.0).is_err());
        assert!(ground_state(2, -1.0, 1.0).is_err());
    }

    #[test]
    fn initial_state_is_pure_product() {
        let space = HilbertSpace::new(2, TruncationConfig::new(4, 1e-8).unwrap()).unwrap();
        let gs = ground_state(2, 1.0, 0.5).unwrap();
        let rho = initial_state(&gs, &space).unwrap();
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-14);
        let atoms = rho.atomic_rdm(&space).unwrap();
        for m in 0..3 {
            for n in 0..3 {
                let z = atoms.matrix()[(m, n)];
                assert_abs_diff_eq!(z.re, gs.amplitudes[m] * gs.amplitudes[n], epsilon = 1e-15);
            }
        }
        let field = rho.field_rdm(&space).unwrap();
        assert_abs_diff_eq!(field.matrix()[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(field.purity(), 1.0, epsilon = 1e-14);

        let small = HilbertSpace::new(3, TruncationConfig::default()).unwrap();
        assert!(initial_state(&gs, &small).is_err());
    }
}
