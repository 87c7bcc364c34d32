//! Closed-form results for the frozen-tunneling dynamics and the weak-pump
//! steady state. These are reference values for cross-checking the numerical
//! engine and share no code path with it beyond the basis layout.

use alloc::vec::Vec;

use nalgebra::DVector;
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::model::{ln_factorial, CMatrix, HilbertSpace, ModelParams, ZERO};
use crate::state::DensityMatrix;

const WEIGHT_TOLERANCE: f64 = 1e-9;

/// Coherent amplitude α_m(τ) of the field conditioned on |m⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentAmplitude {
    pub m: usize,
    pub value: Complex64,
    pub asymptote: Complex64,
}

fn detuning(m: usize, p: &ModelParams) -> f64 {
    p.delta - p.u0 * m as f64
}

/// α_m(∞) = −iη / (κ − i(Δ − U0 m)).
pub fn alpha_asymptote(m: usize, p: &ModelParams) -> Complex64 {
    Complex64::new(0.0, -p.eta) / Complex64::new(p.kappa(), -detuning(m, p))
}

/// α_m(τ) = α_m(∞)(1 − e^{−(κ − i(Δ − U0 m))τ}).
pub fn alpha_m(tau: f64, m: usize, p: &ModelParams) -> Result<CoherentAmplitude> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(invalid("tau", "must be finite and non-negative"));
    }
    let asymptote = alpha_asymptote(m, p);
    let rate = Complex64::new(p.kappa(), -detuning(m, p));
    let value = asymptote * (Complex64::new(1.0, 0.0) - (-rate * tau).exp());
    Ok(CoherentAmplitude { m, value, asymptote })
}

/// Right side of dα_m/dτ = −(κ − i(Δ − U0 m))α_m − iη.
pub fn alpha_rate(alpha: Complex64, m: usize, p: &ModelParams) -> Complex64 {
    -Complex64::new(p.kappa(), -detuning(m, p)) * alpha - Complex64::new(0.0, p.eta)
}

/// η² / (κ² + (Δ − U0 m)²) = |α_m(∞)|².
pub fn lorentzian(m: usize, p: &ModelParams) -> f64 {
    let dm = detuning(m, p);
    p.eta * p.eta / (p.kappa() * p.kappa() + dm * dm)
}

fn check_weights(w: &[f64], n_atoms: usize) -> Result<()> {
    if w.len() != n_atoms + 1 {
        return Err(Error::DimensionMismatch {
            expected: n_atoms + 1,
            found: w.len(),
        });
    }
    let sum: f64 = w.iter().sum();
    if w.iter().any(|&x| !(x >= -WEIGHT_TOLERANCE)) || (sum - 1.0).abs() > WEIGHT_TOLERANCE {
        return Err(Error::UnnormalizedWeights { sum });
    }
    Ok(())
}

/// Σ_m w_m η² / (κ² + (Δ − U0 m)²).
fn weighted_lorentzians(w: &[f64], p: &ModelParams) -> f64 {
    w.iter().enumerate().map(|(m, x)| x * lorentzian(m, p)).sum()
}

/// Photon number of the quasi-steady field reached while tunneling is frozen.
pub fn quasi_steady_photon(weights: &[f64], p: &ModelParams) -> Result<f64> {
    check_weights(weights, p.n_atoms)?;
    Ok(weighted_lorentzians(weights, p))
}

/// Steady photon number predicted from the steady atomic populations. Holds
/// at any pump strength up to corrections of relative order t/κ.
pub fn steady_photon_from_populations(populations: &[f64], p: &ModelParams) -> Result<f64> {
    check_weights(populations, p.n_atoms)?;
    Ok(weighted_lorentzians(populations, p))
}

/// Upper bound η²/κ² on any steady-state photon number.
pub fn photon_bound(p: &ModelParams) -> f64 {
    p.eta * p.eta / (p.kappa() * p.kappa())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceTime {
    pub m: usize,
    pub n: usize,
    /// Units of 1/κ.
    pub tau: f64,
}

/// τ_mn = [κ² + (Δ−U0 m)²][κ² + (Δ−U0 n)²] / (κ U0² η² (m−n)²), the decay
/// time of |ρ_a^{mn}| while tunneling is frozen.
pub fn decoherence_time(m: usize, n: usize, p: &ModelParams) -> Result<DecoherenceTime> {
    if m == n {
        return Err(invalid("n", "decoherence time needs m != n"));
    }
    if p.eta == 0.0 || p.u0 == 0.0 {
        return Err(Error::InfiniteCoherenceTime);
    }
    let k2 = p.kappa() * p.kappa();
    let (dm, dn) = (detuning(m, p), detuning(n, p));
    let diff = m as f64 - n as f64;
    let tau = (k2 + dm * dm) * (k2 + dn * dn) / (p.kappa() * p.u0 * p.u0 * p.eta * p.eta * diff * diff);
    Ok(DecoherenceTime { m, n, tau })
}

/// Coherent state |α⟩ on Fock levels 0..=n_c, renormalized after truncation.
///
/// Fails when the renormalized population of the top level exceeds
/// `tail_tolerance`.
pub fn coherent_state(alpha: Complex64, fock_cutoff: usize, tail_tolerance: f64) -> Result<DVector<Complex64>> {
    let norm_sq = alpha.norm_sqr();
    let mut v = DVector::from_fn(fock_cutoff + 1, |n, _| {
        // e^{−|α|²/2} αⁿ / √n!
        let mag = if n == 0 {
            1.0
        } else if norm_sq == 0.0 {
            0.0
        } else {
            (0.5 * n as f64 * norm_sq.ln() - 0.5 * ln_factorial(n)).exp()
        };
        let phase = if n == 0 { 0.0 } else { n as f64 * alpha.arg() };
        Complex64::from_polar(mag * (-0.5 * norm_sq).exp(), phase)
    });
    let total = v.norm();
    v /= Complex64::new(total, 0.0);
    let top = v[fock_cutoff].norm_sqr();
    if top > tail_tolerance {
        return Err(Error::TruncationBreach {
            population: top,
            tolerance: tail_tolerance,
            cutoff: fock_cutoff,
        });
    }
    Ok(v)
}

fn projector(v: &DVector<Complex64>) -> CMatrix {
    v * v.adjoint()
}

/// Σ_m w_m |m⟩⟨m| ⊗ |β_m⟩⟨β_m|.
fn conditional_coherent_mixture(weights: &[f64], betas: &[Complex64], space: &HilbertSpace) -> Result<DensityMatrix> {
    let df = space.field_dim();
    let mut rho = CMatrix::zeros(space.dim(), space.dim());
    for (m, (&w, &beta)) in weights.iter().zip(betas).enumerate() {
        let proj = projector(&coherent_state(beta, space.fock_cutoff(), space.tail_tolerance())?);
        let mut block = rho.view_mut((m * df, m * df), (df, df));
        block += proj * Complex64::new(w, 0.0);
    }
    DensityMatrix::from_matrix(rho)
}

/// Atom-field state reached once every atomic coherence has decayed while
/// tunneling is frozen: Σ_m w_m |m⟩⟨m| ⊗ |α_m(∞)⟩⟨α_m(∞)|.
pub fn classical_steady(weights: &[f64], p: &ModelParams, space: &HilbertSpace) -> Result<DensityMatrix> {
    check_weights(weights, p.n_atoms)?;
    if space.n_atoms() != p.n_atoms {
        return Err(Error::DimensionMismatch {
            expected: space.atom_dim(),
            found: p.n_atoms + 1,
        });
    }
    let betas: Vec<Complex64> = (0..=p.n_atoms).map(|m| alpha_asymptote(m, p)).collect();
    conditional_coherent_mixture(weights, &betas, space)
}

/// Field state Σ_m w_m |α_m(τ)⟩⟨α_m(τ)| while tunneling is frozen.
pub fn coherent_mixture_field(weights: &[f64], p: &ModelParams, tau: f64, space: &HilbertSpace) -> Result<DensityMatrix> {
    check_weights(weights, p.n_atoms)?;
    let df = space.field_dim();
    let mut rho = CMatrix::zeros(df, df);
    for (m, &w) in weights.iter().enumerate() {
        let alpha = alpha_m(tau, m, p)?.value;
        rho += projector(&coherent_state(alpha, space.fock_cutoff(), space.tail_tolerance())?) * Complex64::new(w, 0.0);
    }
    DensityMatrix::from_matrix(rho)
}

/// Weak-pump steady state: uniform populations 1/(N+1), each atomic
/// configuration dressing its own coherent field. Returns the state and its
/// photon number.
pub fn weak_pump_steady(p: &ModelParams, space: &HilbertSpace) -> Result<(DensityMatrix, f64)> {
    if p.eta > 0.2 * p.kappa() {
        log::warn!("weak-pump approximation used at eta/kappa = {}", p.eta / p.kappa());
    }
    if p.t.abs() > 0.1 * p.kappa() || p.u.abs() > 0.1 * p.kappa() {
        log::warn!("weak-pump approximation assumes t, u << kappa");
    }
    let w = alloc::vec![1.0 / (p.n_atoms + 1) as f64; p.n_atoms + 1];
    let rho = classical_steady(&w, p, space)?;
    Ok((rho, weighted_lorentzians(&w, p)))
}

/// iη(⟨a⟩ − ⟨a†⟩) − 2κ⟨a†a⟩, which vanishes for every exact steady state.
pub fn photon_balance_residual(rho: &DensityMatrix, p: &ModelParams, space: &HilbertSpace) -> f64 {
    let a = field_amplitude(rho, space);
    let n: f64 = (0..space.dim())
        .map(|k| space.split(k).1 as f64 * rho.matrix()[(k, k)].re)
        .sum();
    let r = Complex64::new(0.0, p.eta) * (a - a.conj()) - 2.0 * p.kappa() * n;
    r.norm()
}

/// ⟨a⟩.
pub fn field_amplitude(rho: &DensityMatrix, space: &HilbertSpace) -> Complex64 {
    // tr(ρ a) = Σ ρ_{(m,n),(m,n+1)} √(n+1)
    let mut acc = ZERO;
    for m in 0..space.atom_dim() {
        for n in 0..space.fock_cutoff() {
            let z = rho.matrix()[(space.index(m, n + 1), space.index(m, n))];
            acc += z * ((n + 1) as f64).sqrt();
        }
    }
    acc
}

/// Least-squares slope of ln(values) against times.
pub fn fit_log_slope(times: &[f64], values: &[f64]) -> Result<f64> {
    if times.len() != values.len() || times.len() < 2 {
        return Err(invalid("values", "need at least two paired samples"));
    }
    if values.iter().any(|&v| !(v > 0.0)) {
        return Err(invalid("values", "log fit needs positive values"));
    }
    let n = times.len() as f64;
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mx = times.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = times.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = times.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(invalid("times", "need distinct sample times"));
    }
    Ok(sxy / sxx)
}

/// Local maxima of the normalized quasi-steady photon curve, one per
/// resonance Δ = U0 m, found by golden-section search over
/// [U0(m − ½), U0(m + ½)]. Returns (Δ, height) pairs.
pub fn quasi_steady_peaks(weights: &[f64], p: &ModelParams) -> Result<Vec<(f64, f64)>> {
    check_weights(weights, p.n_atoms)?;
    if p.eta == 0.0 || p.u0 == 0.0 {
        return Err(invalid("u0", "peaks need a pump and a non-zero dispersive shift"));
    }
    let bound = photon_bound(p);
    let curve = |delta: f64| weighted_lorentzians(weights, &p.with_delta(delta)) / bound;
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let half = 0.5 * p.u0.abs();
    let mut out = Vec::with_capacity(p.n_atoms + 1);
    for m in 0..=p.n_atoms {
        let centre = p.u0 * m as f64;
        let (mut lo, mut hi) = (centre - half, centre + half);
        while hi - lo > 1e-12 * (1.0 + centre.abs()) {
            let x1 = hi - ratio * (hi - lo);
            let x2 = lo + ratio * (hi - lo);
            if curve(x1) < curve(x2) {
                lo = x1;
            } else {
                hi = x2;
            }
        }
        let x = 0.5 * (lo + hi);
        out.push((x, curve(x)));
    }
    Ok(out)
}
