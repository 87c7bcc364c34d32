//! Invariant checks at the configured baseline parameters, one block per
//! pump strength.

use cavity_dimer::model::{build_atom_ops, dicke_form_non_tunneling};
use cavity_dimer::oracle::{photon_balance_residual, photon_bound};
use cavity_dimer::{
    build_hamiltonian, evolve, ground_state, initial_state, spectrum, steady_state, CMatrix, Error, EvolveOptions,
    HilbertSpace, Liouvillian, ModelParams, Operator, TraceRecord,
};
use serde::Serialize;

use crate::config::{Mode, SweepConfig};
use crate::error::CliError;
use crate::sweep::status_of;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub eta_over_kappa: f64,
    pub outcome: Outcome,
    pub value: Option<f64>,
    pub threshold: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub delta_over_kappa: f64,
    pub fock_cutoffs: Vec<usize>,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

struct Block {
    eta: f64,
    checks: Vec<Check>,
}

impl Block {
    fn below(&mut self, name: &str, value: f64, threshold: f64) {
        let outcome = if value <= threshold { Outcome::Pass } else { Outcome::Fail };
        self.checks.push(Check {
            name: name.into(),
            eta_over_kappa: self.eta,
            outcome,
            value: Some(value),
            threshold: Some(threshold),
            detail: String::new(),
        });
    }

    fn other(&mut self, name: &str, outcome: Outcome, detail: String) {
        self.checks.push(Check {
            name: name.into(),
            eta_over_kappa: self.eta,
            outcome,
            value: None,
            threshold: None,
            detail,
        });
    }

    fn failed(&mut self, name: &str, e: &Error) {
        self.other(name, Outcome::Fail, format!("{}: {e}", status_of(e)));
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

fn operator_checks(b: &mut Block, p: &ModelParams, space: &HilbertSpace) -> Result<(), Error> {
    let h = build_hamiltonian(p, space)?;
    b.below("hamiltonian_hermitian", h.total.hermiticity_error(), 1e-12);
    let (n1, n2, _) = build_atom_ops(space, p.n_atoms)?;
    let total = Operator::new("N", n1.matrix + n2.matrix);
    b.below("atom_number_conserved", max_abs(&h.total.commutator(&total).matrix), 1e-10);
    let dicke = dicke_form_non_tunneling(p, space)?;
    b.below("schwinger_form_identity", max_abs(&(&dicke.matrix - &h.non_tunneling.matrix)), 1e-12);
    Ok(())
}

fn trace_preservation(l: &Liouvillian) -> f64 {
    let d = l.space().dim();
    let m = l.matrix();
    (0..l.side())
        .map(|c| (0..d).map(|i| m[(i + i * d, c)]).sum::<num_complex::Complex64>().norm())
        .fold(0.0, f64::max)
}

fn trajectory_checks(b: &mut Block, p: &ModelParams, l: &Liouvillian) {
    if p.t <= 0.0 {
        b.other("trajectory_invariants", Outcome::Skipped, "initial ground state needs t > 0".into());
        return;
    }
    let space = l.space();
    let run = ground_state(p.n_atoms, p.t, p.u)
        .and_then(|gs| initial_state(&gs, space))
        .and_then(|rho0| evolve(&rho0, l, &[0.5, 2.0, 20.0, 200.0], &EvolveOptions::default()));
    match run {
        Ok(states) => {
            let (mut drift, mut herm, mut min_eig) = (0.0f64, 0.0f64, f64::INFINITY);
            for (_, rho) in &states {
                drift = drift.max((rho.trace() - 1.0).abs());
                herm = herm.max(rho.hermiticity_error());
                min_eig = min_eig.min(rho.min_eigenvalue());
            }
            b.below("trajectory_trace_drift", drift, 1e-9);
            b.below("trajectory_hermiticity", herm, 1e-9);
            b.below("trajectory_negativity", -min_eig, 1e-8);
        }
        Err(e) => b.failed("trajectory_invariants", &e),
    }
}

fn steady_checks(b: &mut Block, p: &ModelParams, l: &Liouvillian) {
    let space = l.space();
    match steady_state(l).and_then(|rho| Ok((TraceRecord::from_state(f64::INFINITY, &rho, space)?, rho))) {
        Ok((rec, rho)) => {
            b.other("steady_state_unique", Outcome::Pass, String::new());
            b.below("steady_photon_bound_excess", rec.photon_number - photon_bound(p), 1e-10);
            b.below("steady_balance_residual", photon_balance_residual(&rho, p, space), 1e-8);
            b.below("steady_truncation_tail", rec.top_fock_population, space.tail_tolerance());
        }
        Err(e) => b.failed("steady_state_unique", &e),
    }
}

fn spectrum_checks(b: &mut Block, l: &Liouvillian) {
    match spectrum(l, None) {
        Ok(s) => {
            let outcome = if s.zero_count == 1 { Outcome::Pass } else { Outcome::Fail };
            b.other(
                "spectrum_single_zero",
                outcome,
                format!("{} eigenvalues within {:e} of the imaginary axis", s.zero_count, s.zero_tolerance),
            );
            b.below("spectrum_max_real_part", s.max_real_part, s.zero_tolerance);
        }
        Err(e) => b.failed("spectrum_single_zero", &e),
    }
}

pub fn run_validate(config: &SweepConfig) -> Result<Report, CliError> {
    let base = config.model()?;
    let mut checks = Vec::new();
    let mut cutoffs = Vec::new();
    for eta in config.etas_kappa(Mode::Validate) {
        let p = base.with_eta(eta);
        let space = config.space(photon_bound(&p))?;
        cutoffs.push(space.fock_cutoff());
        let mut b = Block { eta, checks: Vec::new() };
        if let Err(e) = operator_checks(&mut b, &p, &space) {
            b.failed("operators", &e);
        }
        match Liouvillian::from_params(&p, &space) {
            Ok(l) => {
                b.below(
                    "liouvillian_trace_preservation",
                    trace_preservation(&l),
                    1e-12 * (1.0 + l.max_abs_entry()),
                );
                trajectory_checks(&mut b, &p, &l);
                steady_checks(&mut b, &p, &l);
                spectrum_checks(&mut b, &l);
            }
            Err(e) => b.failed("liouvillian", &e),
        }
        checks.extend(b.checks);
    }
    let count = |o: Outcome| checks.iter().filter(|c| c.outcome == o).count();
    Ok(Report {
        delta_over_kappa: base.delta,
        fock_cutoffs: cutoffs,
        passed: count(Outcome::Pass),
        failed: count(Outcome::Fail),
        skipped: count(Outcome::Skipped),
        checks,
    })
}
