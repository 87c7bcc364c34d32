//! Grid sweeps. Each grid point is independent; rows come back in grid order
//! (pump strength outer, detuning inner) whatever the thread count.

use cavity_dimer::oracle::{
    alpha_asymptote, alpha_m, decoherence_time, photon_balance_residual, photon_bound, quasi_steady_photon,
    steady_photon_from_populations, weak_pump_steady,
};
use cavity_dimer::propagator::coherence_pairs;
use cavity_dimer::{
    evolve, ground_state, initial_state, spectrum, steady_state, DimerGroundState, Error, EvolveOptions,
    Liouvillian, ModelParams, SpectrumResult, TraceRecord,
};
use rayon::prelude::*;

use crate::config::{Mode, SweepConfig};
use crate::error::CliError;
use crate::table::{indexed, num, opt, paired, Table};

/// Short tag recorded in the `status` column for a failed grid point.
pub fn status_of(e: &Error) -> &'static str {
    match e {
        Error::TruncationBreach { .. } => "truncation_breach",
        Error::DegenerateSteadyState { .. } => "degenerate",
        Error::EigensolverFailure(_) => "eigensolver_failure",
        Error::ProblemTooLarge { .. } => "too_large",
        Error::StepSizeUnderflow { .. } => "step_underflow",
        _ => "numerical_error",
    }
}

/// Runs `f` on a pool with `jobs` threads, or on the global pool.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    delta: f64,
    eta: f64,
}

impl Point {
    fn params(&self, base: &ModelParams) -> ModelParams {
        base.with_delta(self.delta).with_eta(self.eta)
    }
}

fn grid(config: &SweepConfig, mode: Mode, base: &ModelParams) -> Vec<Point> {
    let deltas = config.deltas_kappa(base);
    config
        .etas_kappa(mode)
        .into_iter()
        .flat_map(|eta| deltas.iter().map(move |&delta| Point { delta, eta }))
        .collect()
}

fn coordinate_header() -> Vec<String> {
    ["delta_over_u0", "delta_over_kappa", "eta_over_kappa", "kappa_ref"]
        .map(String::from)
        .to_vec()
}

fn coordinates(p: &ModelParams) -> Vec<String> {
    let over_u0 = if p.u0 != 0.0 { p.delta / p.u0 } else { f64::NAN };
    vec![num(over_u0), num(p.delta), num(p.eta), num(p.kappa_ref)]
}

/// ⟨a†a⟩ / (η²/κ²); undefined without a pump.
fn normalized(photons: f64, p: &ModelParams) -> f64 {
    let bound = photon_bound(p);
    if bound > 0.0 {
        photons / bound
    } else {
        f64::NAN
    }
}

fn dimer_ground_state(base: &ModelParams) -> Result<DimerGroundState, CliError> {
    ground_state(base.n_atoms, base.t, base.u)
        .map_err(|e| CliError::Config(format!("initial ground state: {e}")))
}

fn blanks(n: usize) -> impl Iterator<Item = String> {
    std::iter::repeat_n(String::new(), n)
}

/// One trajectory's samples, or the reason it stopped.
fn trajectory(
    config: &SweepConfig,
    p: &ModelParams,
    gs: &DimerGroundState,
) -> Result<(usize, Result<Vec<TraceRecord>, Error>), CliError> {
    // transient coherent amplitudes reach at most 2|α(∞)|
    let space = config.space(4.0 * photon_bound(p))?;
    let run = || -> Result<Vec<TraceRecord>, Error> {
        let l = Liouvillian::from_params(p, &space)?;
        let rho0 = initial_state(gs, &space)?;
        evolve(&rho0, &l, &config.cut_times, &EvolveOptions::default())?
            .iter()
            .map(|(tau, rho)| TraceRecord::from_state(*tau, rho, &space))
            .collect()
    };
    Ok((space.fock_cutoff(), run()))
}

/// Time traces at `cut_times` for every grid point, with tunneling on and
/// frozen, next to the closed-form frozen-tunneling values.
///
/// Columns: coordinates, `kappa_tau`, `time_s`, `fock_cutoff`, `status`,
/// `status_frozen`, `photon_number`, `photon_norm`, `photon_norm_frozen`,
/// `photon_norm_coherent` (closed form at τ), `photon_norm_quasi` (τ → ∞),
/// `pop_m`, `pop_frozen_m`, `coh_re_m_n`, `coh_im_m_n`, `coh_abs_m_n`,
/// `coh_abs_frozen_m_n`, `coh_envelope_m_n`, `truncation_tail`.
pub fn run_trace(config: &SweepConfig) -> Result<Table, CliError> {
    let base = config.model()?;
    let gs = dimer_ground_state(&base)?;
    let weights = gs.weights();
    let n = base.n_atoms;
    let pairs: Vec<(usize, usize)> = coherence_pairs(n).collect();

    let mut header = coordinate_header();
    header.extend(
        [
            "kappa_tau",
            "time_s",
            "fock_cutoff",
            "status",
            "status_frozen",
            "photon_number",
            "photon_norm",
            "photon_norm_frozen",
            "photon_norm_coherent",
            "photon_norm_quasi",
        ]
        .map(String::from),
    );
    header.extend(indexed("pop", n));
    header.extend(indexed("pop_frozen", n));
    header.extend(paired("coh_re", n));
    header.extend(paired("coh_im", n));
    header.extend(paired("coh_abs", n));
    header.extend(paired("coh_abs_frozen", n));
    header.extend(paired("coh_envelope", n));
    header.push("truncation_tail".into());

    let points = grid(config, Mode::Trace, &base);
    let results = with_jobs(config.jobs, || {
        points
            .par_iter()
            .map(|pt| -> Result<_, CliError> {
                let p = pt.params(&base);
                let full = trajectory(config, &p, &gs)?;
                let frozen = trajectory(config, &p.frozen(), &gs)?;
                Ok((p, full, frozen))
            })
            .collect::<Result<Vec<_>, _>>()
    })??;

    let mut table = Table::new(header);
    for (p, (cutoff, full), (_, frozen)) in results {
        let quasi = quasi_steady_photon(&weights, &p)?;
        for (k, &tau) in config.cut_times.iter().enumerate() {
            let mut row = coordinates(&p);
            let coherent: f64 = weights
                .iter()
                .enumerate()
                .map(|(m, w)| alpha_m(tau, m, &p).map(|a| w * a.value.norm_sqr()))
                .sum::<Result<f64, Error>>()?;
            let rec = full.as_ref().ok().map(|r| &r[k]);
            let rec_frozen = frozen.as_ref().ok().map(|r| &r[k]);
            row.extend([
                num(tau),
                num(p.seconds(tau)),
                cutoff.to_string(),
                full.as_ref().err().map_or("ok", status_of).into(),
                frozen.as_ref().err().map_or("ok", status_of).into(),
                opt(rec.map(|r| r.photon_number)),
                opt(rec.map(|r| normalized(r.photon_number, &p))),
                opt(rec_frozen.map(|r| normalized(r.photon_number, &p))),
                num(normalized(coherent, &p)),
                num(normalized(quasi, &p)),
            ]);
            match rec {
                Some(r) => row.extend(r.atom_populations.iter().map(|&x| num(x))),
                None => row.extend(blanks(n + 1)),
            }
            match rec_frozen {
                Some(r) => row.extend(r.atom_populations.iter().map(|&x| num(x))),
                None => row.extend(blanks(n + 1)),
            }
            match rec {
                Some(r) => {
                    row.extend(r.coherences.iter().map(|z| num(z.re)));
                    row.extend(r.coherences.iter().map(|z| num(z.im)));
                    row.extend(r.coherences.iter().map(|z| num(z.norm())));
                }
                None => row.extend(blanks(3 * pairs.len())),
            }
            match rec_frozen {
                Some(r) => row.extend(r.coherences.iter().map(|z| num(z.norm()))),
                None => row.extend(blanks(pairs.len())),
            }
            for &(m, nn) in &pairs {
                let start = gs.amplitudes[m] * gs.amplitudes[nn];
                let envelope = match decoherence_time(m, nn, &p) {
                    Ok(d) => start * (-tau / d.tau).exp(),
                    Err(Error::InfiniteCoherenceTime) => start,
                    Err(e) => return Err(e.into()),
                };
                row.push(num(envelope));
            }
            row.push(opt(rec.map(|r| r.top_fock_population)));
            table.push(row);
        }
    }
    Ok(table)
}

/// Closed-form frozen-tunneling results over the grid.
///
/// Columns: coordinates, `photon_quasi`, `photon_norm_quasi`, `weight_m`,
/// `alpha_inf_re_m`, `alpha_inf_im_m`, `tau_m_n` (empty when infinite).
pub fn run_quasi(config: &SweepConfig) -> Result<Table, CliError> {
    let base = config.model()?;
    let weights = dimer_ground_state(&base)?.weights();
    let n = base.n_atoms;
    let mut header = coordinate_header();
    header.extend(["photon_quasi", "photon_norm_quasi"].map(String::from));
    header.extend(indexed("weight", n));
    header.extend(indexed("alpha_inf_re", n));
    header.extend(indexed("alpha_inf_im", n));
    header.extend(paired("tau", n));

    let mut table = Table::new(header);
    for pt in grid(config, Mode::Quasi, &base) {
        let p = pt.params(&base);
        let photons = quasi_steady_photon(&weights, &p)?;
        let mut row = coordinates(&p);
        row.extend([num(photons), num(normalized(photons, &p))]);
        row.extend(weights.iter().map(|&w| num(w)));
        let alphas: Vec<_> = (0..=n).map(|m| alpha_asymptote(m, &p)).collect();
        row.extend(alphas.iter().map(|a| num(a.re)));
        row.extend(alphas.iter().map(|a| num(a.im)));
        for (m, k) in coherence_pairs(n) {
            row.push(decoherence_time(m, k, &p).ok().map(|d| num(d.tau)).unwrap_or_default());
        }
        table.push(row);
    }
    Ok(table)
}

/// Steady states over the (η, Δ) grid.
///
/// Columns: coordinates, `fock_cutoff`, `status`, `photon_number`,
/// `photon_norm`, `photon_norm_weak_pump`, `photon_norm_populations`,
/// `pop_m`, `coh_re_m_n`, `coh_im_m_n`, `coh_abs_m_n`, `purity_atomic`,
/// `balance_residual`, `truncation_tail`.
pub fn run_steady(config: &SweepConfig) -> Result<Table, CliError> {
    let base = config.model()?;
    let n = base.n_atoms;
    let n_pairs = coherence_pairs(n).count();
    let mut header = coordinate_header();
    header.extend(
        [
            "fock_cutoff",
            "status",
            "photon_number",
            "photon_norm",
            "photon_norm_weak_pump",
            "photon_norm_populations",
        ]
        .map(String::from),
    );
    header.extend(indexed("pop", n));
    header.extend(paired("coh_re", n));
    header.extend(paired("coh_im", n));
    header.extend(paired("coh_abs", n));
    header.extend(["purity_atomic", "balance_residual", "truncation_tail"].map(String::from));

    let points = grid(config, Mode::Steady, &base);
    let rows = with_jobs(config.jobs, || {
        points
            .par_iter()
            .map(|pt| -> Result<Vec<String>, CliError> {
                let p = pt.params(&base);
                let space = config.space(photon_bound(&p))?;
                let mut row = coordinates(&p);
                row.push(space.fock_cutoff().to_string());
                let solved = Liouvillian::from_params(&p, &space).and_then(|l| steady_state(&l)).and_then(|rho| {
                    let rec = TraceRecord::from_state(f64::INFINITY, &rho, &space)?;
                    let weak = weak_pump_steady(&p, &space).map(|w| w.1).unwrap_or(f64::NAN);
                    let from_pops = steady_photon_from_populations(&rec.atom_populations, &p).unwrap_or(f64::NAN);
                    Ok((rec, weak, from_pops, photon_balance_residual(&rho, &p, &space)))
                });
                match solved {
                    Ok((rec, weak, from_pops, residual)) => {
                        row.extend([
                            "ok".to_string(),
                            num(rec.photon_number),
                            num(normalized(rec.photon_number, &p)),
                            num(normalized(weak, &p)),
                            num(normalized(from_pops, &p)),
                        ]);
                        row.extend(rec.atom_populations.iter().map(|&x| num(x)));
                        row.extend(rec.coherences.iter().map(|z| num(z.re)));
                        row.extend(rec.coherences.iter().map(|z| num(z.im)));
                        row.extend(rec.coherences.iter().map(|z| num(z.norm())));
                        row.extend([num(rec.purity_atomic), num(residual), num(rec.top_fock_population)]);
                    }
                    Err(e) => {
                        log::warn!("steady state at Δ = {}, η = {}: {e}", p.delta, p.eta);
                        row.push(status_of(&e).into());
                        row.extend(blanks(4 + (n + 1) + 3 * n_pairs + 3));
                    }
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>, _>>()
    })??;
    let mut table = Table::new(header);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// Relaxation time τ_max over the grid, plus an optional eigenvalue dump.
///
/// Columns: coordinates, `fock_cutoff`, `status`, `zero_count`, `nullity`,
/// `zero_tolerance`, `slowest_rate`, `kappa_tau_max`, `tau_max_s`,
/// `divergent`, `max_real_part`. The dump has coordinates, `index`, `re`, `im`.
pub fn run_spectrum(config: &SweepConfig) -> Result<(Table, Option<Table>), CliError> {
    let base = config.model()?;
    let mut header = coordinate_header();
    header.extend(
        [
            "fock_cutoff",
            "status",
            "zero_count",
            "nullity",
            "zero_tolerance",
            "slowest_rate",
            "kappa_tau_max",
            "tau_max_s",
            "divergent",
            "max_real_part",
        ]
        .map(String::from),
    );
    let points = grid(config, Mode::Spectrum, &base);
    let results = with_jobs(config.jobs, || {
        points
            .par_iter()
            .map(|pt| -> Result<(ModelParams, usize, Result<SpectrumResult, Error>), CliError> {
                let p = pt.params(&base);
                let space = config.space(photon_bound(&p))?;
                let sp = Liouvillian::from_params(&p, &space).and_then(|l| spectrum(&l, None));
                Ok((p, space.fock_cutoff(), sp))
            })
            .collect::<Result<Vec<_>, _>>()
    })??;

    let mut table = Table::new(header);
    let mut dump_header = coordinate_header();
    dump_header.extend(["index", "re", "im"].map(String::from));
    let mut dump = config.spectrum_dump.as_ref().map(|_| Table::new(dump_header));
    for (p, cutoff, sp) in results {
        let mut row = coordinates(&p);
        row.push(cutoff.to_string());
        match &sp {
            Ok(s) => {
                row.extend([
                    "ok".to_string(),
                    s.zero_count.to_string(),
                    s.nullity.to_string(),
                    num(s.zero_tolerance),
                    num(s.slowest_rate),
                    num(s.tau_max),
                    num(p.seconds(s.tau_max)),
                    s.divergent.to_string(),
                    num(s.max_real_part),
                ]);
                if let Some(d) = dump.as_mut() {
                    for (k, z) in s.eigenvalues.iter().enumerate() {
                        let mut r = coordinates(&p);
                        r.extend([k.to_string(), num(z.re), num(z.im)]);
                        d.push(r);
                    }
                }
            }
            Err(e) => {
                log::warn!("spectrum at Δ = {}, η = {}: {e}", p.delta, p.eta);
                row.push(status_of(e).into());
                row.extend(blanks(8));
            }
        }
        table.push(row);
    }
    Ok((table, dump))
}
