//! Time evolution of the density matrix and the observables recorded along a
//! trajectory.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::liouvillian::Liouvillian;
use crate::model::{build_field_ops, HilbertSpace, Operator, ZERO};
use crate::state::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Latest sample time accepted by the step-by-step integrator (units of 1/κ).
    pub max_time: f64,
    pub max_steps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            max_time: 1e4,
            max_steps: 50_000_000,
        }
    }
}

/// Dormand–Prince 5(4) tableau.
mod tableau {
    pub const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    /// Fifth-order minus embedded fourth-order weights.
    pub const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
}

/// (ρ + ρ†)/2 in place on a column-stacked D×D matrix.
fn hermitize(v: &mut [Complex64], d: usize) {
    for j in 0..d {
        v[j + j * d].im = 0.0;
        for i in (j + 1)..d {
            let avg = (v[i + j * d] + v[j + i * d].conj()) * 0.5;
            v[i + j * d] = avg;
            v[j + i * d] = avg.conj();
        }
    }
}

struct DormandPrince<'a> {
    l: &'a Liouvillian,
    opts: EvolveOptions,
    d: usize,
    y: Vec<Complex64>,
    k: [Vec<Complex64>; 7],
    stage: Vec<Complex64>,
    trial: Vec<Complex64>,
    time: f64,
    step: f64,
    steps: usize,
}

impl<'a> DormandPrince<'a> {
    fn new(l: &'a Liouvillian, y0: &[Complex64], opts: EvolveOptions) -> Self {
        let n = y0.len();
        let d = l.space().dim();
        let mut k: [Vec<Complex64>; 7] = core::array::from_fn(|_| vec![ZERO; n]);
        let mut y = y0.to_vec();
        hermitize(&mut y, d);
        l.apply_vectorized(&y, &mut k[0]);
        let scale = l.max_abs_entry().max(1e-300);
        Self {
            l,
            opts,
            d,
            y,
            k,
            stage: vec![ZERO; n],
            trial: vec![ZERO; n],
            time: 0.0,
            step: 0.01 / scale,
            steps: 0,
        }
    }

    /// Advances exactly to `target`.
    fn advance_to(&mut self, target: f64) -> Result<()> {
        use tableau::{A, E};
        while self.time < target {
            if self.steps >= self.opts.max_steps {
                return Err(Error::StepSizeUnderflow {
                    time: self.time,
                    step: self.step,
                });
            }
            let remaining = target - self.time;
            let last = self.step >= remaining;
            let h = if last { remaining } else { self.step };
            if h < 1e-13 * self.time.abs().max(1.0) && !last {
                return Err(Error::StepSizeUnderflow {
                    time: self.time,
                    step: h,
                });
            }

            for s in 1..7 {
                for (i, z) in self.stage.iter_mut().enumerate() {
                    let mut acc = self.y[i];
                    for (j, a) in A[s][..s].iter().enumerate() {
                        if *a != 0.0 {
                            acc += self.k[j][i] * (h * a);
                        }
                    }
                    *z = acc;
                }
                let (done, rest) = self.k.split_at_mut(s);
                let _ = done;
                self.l.apply_vectorized(&self.stage, &mut rest[0]);
            }
            // Stage 7 evaluated the fifth-order solution (FSAL).
            self.trial.copy_from_slice(&self.stage);

            let mut err_sq = 0.0;
            for i in 0..self.y.len() {
                let mut e = ZERO;
                for (j, w) in E.iter().enumerate() {
                    if *w != 0.0 {
                        e += self.k[j][i] * (h * w);
                    }
                }
                let sc = self.opts.atol + self.opts.rtol * self.y[i].norm().max(self.trial[i].norm());
                err_sq += (e.norm() / sc).powi(2);
            }
            let err = (err_sq / self.y.len() as f64).sqrt();
            self.steps += 1;

            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                self.time = if last { target } else { self.time + h };
                core::mem::swap(&mut self.y, &mut self.trial);
                hermitize(&mut self.y, self.d);
                let (first, rest) = self.k.split_at_mut(6);
                core::mem::swap(&mut first[0], &mut rest[0]);
                hermitize(&mut self.k[0], self.d);
                if !last {
                    self.step = h * factor;
                }
            } else {
                self.step = h * factor.min(1.0);
            }
        }
        Ok(())
    }
}

fn check_times(times: &[f64], max_time: f64) -> Result<()> {
    let mut prev = 0.0;
    for &t in times {
        if !t.is_finite() || t < prev {
            return Err(Error::InvalidTimes(format!(
                "sample times must be finite, non-negative and ascending (got {t} after {prev})"
            )));
        }
        prev = t;
    }
    if prev > max_time {
        return Err(Error::InvalidTimes(format!(
            "last sample {prev} exceeds the integration cap {max_time}; use the spectral route for long times"
        )));
    }
    Ok(())
}

fn sample(v: &[Complex64], space: &HilbertSpace) -> Result<DensityMatrix> {
    let rho = DensityMatrix::from_vectorized(v)?;
    rho.check_truncation(space)?;
    Ok(rho)
}

/// Integrates dρ/dτ = L ρ from τ = 0 and returns ρ at each sample time.
///
/// Adaptive Dormand–Prince 5(4); ρ is re-Hermitized after every accepted step
/// while the trace is left untouched, so trace drift remains observable.
pub fn evolve(
    rho0: &DensityMatrix,
    l: &Liouvillian,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<Vec<(f64, DensityMatrix)>> {
    let space = l.space();
    if rho0.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: rho0.dim(),
        });
    }
    check_times(times, opts.max_time)?;
    let mut rk = DormandPrince::new(l, rho0.vectorized(), *opts);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        rk.advance_to(t)?;
        out.push((t, sample(&rk.y, space)?));
    }
    Ok(out)
}

/// Largest trace drift `propagate_exact` repairs before reporting failure.
#[cfg(feature = "std")]
const EXACT_TRACE_REPAIR_LIMIT: f64 = 1e-6;

/// Exact propagation ρ(τ) = exp(Lτ) ρ(0) by dense matrix exponentials, for
/// horizons far beyond the integrator cap.
#[cfg(feature = "std")]
pub fn propagate_exact(rho0: &DensityMatrix, l: &Liouvillian, times: &[f64]) -> Result<Vec<(f64, DensityMatrix)>> {
    use nalgebra::DVector;

    let space = l.space();
    if rho0.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: rho0.dim(),
        });
    }
    check_times(times, f64::INFINITY)?;
    let mut y = DVector::from_column_slice(rho0.vectorized());
    let mut now = 0.0;
    let mut cached: Option<(f64, crate::model::CMatrix)> = None;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let dt = t - now;
        if dt > 0.0 {
            let reuse = matches!(&cached, Some((c, _)) if (*c - dt).abs() <= 1e-12 * dt);
            if !reuse {
                let p = (l.matrix() * Complex64::new(dt, 0.0)).exp();
                cached = Some((dt, p));
            }
            let p = &cached.as_ref().expect("propagator cached").1;
            y = p * y;
            hermitize(y.as_mut_slice(), space.dim());
            // scaling and squaring loses ~eps·‖L dt‖ of trace over long steps
            let d = space.dim();
            let tr: Complex64 = (0..d).map(|i| y[i + i * d]).sum();
            if (tr.re - 1.0).abs() > EXACT_TRACE_REPAIR_LIMIT {
                return Err(Error::SingularSystem(format!(
                    "matrix exponential lost trace: {:e} after κτ = {t}",
                    tr.re - 1.0
                )));
            }
            y.unscale_mut(tr.re);
            now = t;
        }
        out.push((t, sample(y.as_slice(), space)?));
    }
    Ok(out)
}

/// The photon-number operator a†a on `space`.
pub fn photon_operator(space: &HilbertSpace) -> Operator {
    let (a, adag) = build_field_ops(space);
    Operator::new("a†a", &adag.matrix * &a.matrix)
}

/// tr(ρ a†a).
pub fn photon_number(rho: &DensityMatrix, adag_a: &Operator) -> f64 {
    rho.expectation(&adag_a.matrix).re
}

/// ρ_a = tr_f ρ.
pub fn atomic_rdm(rho: &DensityMatrix, space: &HilbertSpace) -> Result<DensityMatrix> {
    rho.atomic_rdm(space)
}

/// ρ_f = tr_a ρ.
pub fn field_rdm(rho: &DensityMatrix, space: &HilbertSpace) -> Result<DensityMatrix> {
    rho.field_rdm(space)
}

/// Observables at one sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub tau: f64,
    pub photon_number: f64,
    /// ⟨|m⟩⟨m|⟩ for m = 0..=N.
    pub atom_populations: Vec<f64>,
    /// ρ_a^{mn} for m < n, in row-major pair order (0,1), (0,2), …, (N−1,N).
    pub coherences: Vec<Complex64>,
    pub purity_atomic: f64,
    pub top_fock_population: f64,
}

impl TraceRecord {
    pub fn from_state(tau: f64, rho: &DensityMatrix, space: &HilbertSpace) -> Result<Self> {
        let atoms = rho.atomic_rdm(space)?;
        let da = space.atom_dim();
        let photon_number = (0..space.dim())
            .map(|k| space.split(k).1 as f64 * rho.matrix()[(k, k)].re)
            .sum();
        let atom_populations = (0..da).map(|m| atoms.matrix()[(m, m)].re).collect();
        let coherences = coherence_pairs(space.n_atoms())
            .map(|(m, n)| atoms.matrix()[(m, n)])
            .collect();
        Ok(Self {
            tau,
            photon_number,
            atom_populations,
            coherences,
            purity_atomic: atoms.purity(),
            top_fock_population: rho.top_fock_population(space),
        })
    }

    pub fn coherence(&self, m: usize, n: usize) -> Option<Complex64> {
        let (lo, hi, conj) = if m < n { (m, n, false) } else { (n, m, true) };
        let n_atoms = self.atom_populations.len().checked_sub(1)?;
        let idx = coherence_pairs(n_atoms).position(|p| p == (lo, hi))?;
        let z = self.coherences[idx];
        Some(if conj { z.conj() } else { z })
    }
}

/// Pairs (m, n) with m < n ≤ N, in the order used for coherence columns.
pub fn coherence_pairs(n_atoms: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=n_atoms).flat_map(move |m| ((m + 1)..=n_atoms).map(move |n| (m, n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimer::{ground_state, initial_state};
    use crate::liouvillian::build_liouvillian;
    use crate::model::{CMatrix, ModelParams, TruncationConfig, ONE};
    use approx::assert_abs_diff_eq;

    fn space(n: usize, nc: usize) -> HilbertSpace {
        HilbertSpace::new(n, TruncationConfig::new(nc, 1e-8).unwrap()).unwrap()
    }

    #[test]
    fn vacuum_fixed_point() {
        let s = space(1, 3);
        let zero = Operator::new("0", CMatrix::zeros(s.dim(), s.dim()));
        let l = build_liouvillian(&zero, 1.0, &s).unwrap();
        let gs = ground_state(1, 1.0, 0.0).unwrap();
        let rho0 = initial_state(&gs, &s).unwrap();
        let out = evolve(&rho0, &l, &[0.0, 1.0, 7.5], &EvolveOptions::default()).unwrap();
        for (_, rho) in out {
            assert!(rho.trace_distance(&rho0) < 1e-14);
        }
    }

    /// A single damped, undriven mode: ⟨n⟩(τ) = ⟨n⟩(0) e^{−2κτ}.
    #[test]
    fn photon_decay_rate() {
        // |3⟩ decays as ⟨n⟩ = 3e^{−2κτ}; the loose tail tolerance admits the initial Fock state
        let s = HilbertSpace::new(0, TruncationConfig::new(6, 0.5).unwrap()).unwrap();
        let mut m = CMatrix::zeros(7, 7);
        m[(3, 3)] = ONE;
        let rho0 = DensityMatrix::from_matrix(m).unwrap();
        let l = build_liouvillian(&Operator::new("0", CMatrix::zeros(7, 7)), 1.0, &s).unwrap();
        let n = photon_operator(&s);
        let out = evolve(&rho0, &l, &[0.5, 1.0, 2.0], &EvolveOptions::default()).unwrap();
        for (t, rho) in out {
            let expected = 3.0 * (-2.0 * t).exp();
            assert!((photon_number(&rho, &n) - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_times() {
        let s = space(1, 2);
        let l = Liouvillian::from_params(
            &ModelParams {
                n_atoms: 1,
                ..ModelParams::default()
            },
            &s,
        )
        .unwrap();
        let rho0 = initial_state(&ground_state(1, 1.0, 0.0).unwrap(), &s).unwrap();
        let opts = EvolveOptions::default();
        assert!(evolve(&rho0, &l, &[2.0, 1.0], &opts).is_err());
        assert!(evolve(&rho0, &l, &[-1.0], &opts).is_err());
        assert!(evolve(&rho0, &l, &[2e4], &opts).is_err());
    }

    #[test]
    fn truncation_breach_is_reported() {
        // strong pump, cutoff 1
        let p = ModelParams::default().with_eta(2.0);
        let s = space(2, 1);
        let l = Liouvillian::from_params(&p, &s).unwrap();
        let rho0 = initial_state(&ground_state(2, p.t, p.u).unwrap(), &s).unwrap();
        let err = evolve(&rho0, &l, &[5.0], &EvolveOptions::default()).unwrap_err();
        assert!(matches!(err, Error::TruncationBreach { cutoff: 1, .. }));
    }

    #[test]
    fn invariants_along_trajectory() {
        let p = ModelParams::default().with_delta(0.0).with_eta(0.5);
        let s = space(2, 9);
        let l = Liouvillian::from_params(&p, &s).unwrap();
        let rho0 = initial_state(&ground_state(2, p.t, p.u).unwrap(), &s).unwrap();
        let times = [0.0, 0.5, 1.0, 3.0, 10.0];
        for (_, rho) in evolve(&rho0, &l, &times, &EvolveOptions::default()).unwrap() {
            assert!((rho.trace() - 1.0).abs() < 1e-9);
            assert!(rho.hermiticity_error() < 1e-9);
            assert!(rho.min_eigenvalue() > -1e-8);
        }
    }

    #[cfg(feature = "std")]
    #[test]
    fn exact_and_integrated_agree() {
        let p = ModelParams::default().with_delta(1.0).with_eta(0.4);
        let s = space(2, 5);
        let l = Liouvillian::from_params(&p, &s).unwrap();
        let rho0 = initial_state(&ground_state(2, p.t, p.u).unwrap(), &s).unwrap();
        let times = [0.0, 1.0, 2.0, 3.0, 8.0];
        let a = evolve(&rho0, &l, &times, &EvolveOptions::default()).unwrap();
        let b = propagate_exact(&rho0, &l, &times).unwrap();
        for ((_, x), (_, y)) in a.iter().zip(&b) {
            assert!(x.trace_distance(y) < 1e-8);
        }
    }

    #[test]
    fn trace_record_fields() {
        let s = space(2, 3);
        let gs = ground_state(2, 1.0, 0.5).unwrap();
        let rho = initial_state(&gs, &s).unwrap();
        let rec = TraceRecord::from_state(0.0, &rho, &s).unwrap();
        assert_eq!(rec.photon_number, 0.0);
        assert_eq!(rec.coherences.len(), 3);
        let pops: f64 = rec.atom_populations.iter().sum();
        assert_abs_diff_eq!(pops, 1.0, epsilon = 1e-12);
        let c01 = rec.coherence(0, 1).unwrap();
        assert_abs_diff_eq!(c01.re, gs.amplitudes[0] * gs.amplitudes[1], epsilon = 1e-15);
        assert_eq!(rec.coherence(1, 0).unwrap(), c01.conj());
        assert_abs_diff_eq!(rec.purity_atomic, 1.0, epsilon = 1e-14);
    }
}
