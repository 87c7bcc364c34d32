//! JSON sweep configuration. Every field is optional; omitted fields take the
//! reference values (N = 2, (t, u) = (400, 200) Hz, (κ, U0, η) = (1.5, 6.0,
//! 0.1) MHz, all as 2π × Hz).

use std::fs;
use std::path::{Path, PathBuf};

use cavity_dimer::{FrequenciesHz, HilbertSpace, ModelParams, TruncationConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Trace,
    Quasi,
    Steady,
    Spectrum,
    Validate,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Trace => "trace",
            Mode::Quasi => "quasi",
            Mode::Steady => "steady",
            Mode::Spectrum => "spectrum",
            Mode::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsHz {
    pub n_atoms: usize,
    pub t_hz: f64,
    pub u_hz: f64,
    pub u0_hz: f64,
    /// Baseline detuning; only used where no grid applies (validate).
    pub delta_hz: f64,
    pub eta_hz: f64,
    pub kappa_hz: f64,
}

impl Default for ParamsHz {
    fn default() -> Self {
        let f = FrequenciesHz::reference();
        Self {
            n_atoms: f.n_atoms,
            t_hz: f.t,
            u_hz: f.u,
            u0_hz: f.u0,
            delta_hz: f.delta,
            eta_hz: f.eta,
            kappa_hz: f.kappa,
        }
    }
}

impl ParamsHz {
    pub fn to_model(&self) -> Result<ModelParams, CliError> {
        let f = FrequenciesHz {
            n_atoms: self.n_atoms,
            t: self.t_hz,
            u: self.u_hz,
            u0: self.u0_hz,
            delta: self.delta_hz,
            eta: self.eta_hz,
            kappa: self.kappa_hz,
        };
        ModelParams::from_hz(&f).map_err(|e| CliError::Config(format!("params: {e}")))
    }
}

/// Either a fixed cutoff or `"auto"`, which sizes n_c per pump strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cutoff {
    Fixed(usize),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Truncation {
    pub fock_cutoff: Cutoff,
    pub tail_tolerance: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            fock_cutoff: Cutoff::Auto(AutoTag::Auto),
            tail_tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaUnits {
    U0,
    Kappa,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeltaGrid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub units: DeltaUnits,
}

impl Default for DeltaGrid {
    fn default() -> Self {
        Self {
            min: -1.0,
            max: 3.0,
            steps: 81,
            units: DeltaUnits::U0,
        }
    }
}

impl DeltaGrid {
    /// Grid values in the configured units, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let h = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps).map(|k| self.min + h * k as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub params: ParamsHz,
    pub truncation: Truncation,
    pub delta_grid: DeltaGrid,
    /// Pump amplitudes in Hz. When absent, `steady` uses η/κ ∈ {1/15, 1/3, 1}
    /// and every other mode uses `params.eta_hz`.
    pub eta_list_hz: Option<Vec<f64>>,
    /// Sample times κτ for `trace`.
    pub cut_times: Vec<f64>,
    /// When set, `spectrum` also writes every eigenvalue to this CSV.
    pub spectrum_dump: Option<PathBuf>,
    /// Worker threads; absent means one per core.
    pub jobs: Option<usize>,
    pub mode: Option<Mode>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            params: ParamsHz::default(),
            truncation: Truncation::default(),
            delta_grid: DeltaGrid::default(),
            eta_list_hz: None,
            cut_times: vec![2.0, 5.0, 20.0, 200.0],
            spectrum_dump: None,
            jobs: None,
            mode: None,
        }
    }
}

/// Pump strengths η/κ used by `steady` when the config gives none.
pub const DEFAULT_STEADY_ETAS: [f64; 3] = [1.0 / 15.0, 1.0 / 3.0, 1.0];

impl SweepConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        self.params.to_model()?;
        let g = &self.delta_grid;
        if g.steps == 0 {
            return bad("delta_grid.steps must be at least 1".into());
        }
        if !(g.min.is_finite() && g.max.is_finite()) || g.max < g.min {
            return bad(format!("delta_grid range [{}, {}] is not a finite ascending interval", g.min, g.max));
        }
        if let Some(list) = &self.eta_list_hz {
            if list.is_empty() {
                return bad("eta_list_hz must not be empty".into());
            }
            if let Some(x) = list.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
                return bad(format!("eta_list_hz entry {x} must be finite and non-negative"));
            }
        }
        if self.cut_times.is_empty() {
            return bad("cut_times must not be empty".into());
        }
        if self.cut_times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return bad("cut_times must be finite and non-negative".into());
        }
        if self.cut_times.windows(2).any(|w| w[1] < w[0]) {
            return bad("cut_times must be ascending".into());
        }
        if self.jobs == Some(0) {
            return bad("jobs must be at least 1".into());
        }
        let t = &self.truncation;
        if !(t.tail_tolerance > 0.0 && t.tail_tolerance < 1.0) {
            return bad(format!("tail_tolerance {} must lie in (0, 1)", t.tail_tolerance));
        }
        if t.fock_cutoff == Cutoff::Fixed(0) {
            return bad("fock_cutoff must be at least 1".into());
        }
        Ok(())
    }

    pub fn model(&self) -> Result<ModelParams, CliError> {
        self.params.to_model()
    }

    /// Δ/κ for every grid point.
    pub fn deltas_kappa(&self, p: &ModelParams) -> Vec<f64> {
        let scale = match self.delta_grid.units {
            DeltaUnits::U0 => p.u0,
            DeltaUnits::Kappa => p.kappa(),
        };
        self.delta_grid.values().into_iter().map(|x| x * scale).collect()
    }

    /// Pump strengths η/κ for a mode.
    pub fn etas_kappa(&self, mode: Mode) -> Vec<f64> {
        let kappa_hz = self.params.kappa_hz;
        match &self.eta_list_hz {
            Some(list) => list.iter().map(|x| x / kappa_hz).collect(),
            None if mode == Mode::Steady => DEFAULT_STEADY_ETAS.to_vec(),
            None => vec![self.params.eta_hz / kappa_hz],
        }
    }

    /// Hilbert space for pump strength η/κ. `mean_photons` is the largest
    /// photon number the run can reach.
    pub fn space(&self, mean_photons: f64) -> Result<HilbertSpace, CliError> {
        let t = &self.truncation;
        let trunc = match t.fock_cutoff {
            Cutoff::Fixed(n) => TruncationConfig::new(n, t.tail_tolerance),
            Cutoff::Auto(_) => TruncationConfig::for_photon_bound(mean_photons, t.tail_tolerance),
        }
        .map_err(|e| CliError::Config(format!("truncation: {e}")))?;
        HilbertSpace::new(self.params.n_atoms, trunc).map_err(|e| CliError::Config(format!("truncation: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_reference() {
        let c: SweepConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, SweepConfig::default());
        let p = c.model().unwrap();
        assert_eq!(p, ModelParams::default());
        assert_eq!(c.delta_grid.values().len(), 81);
        assert!((c.delta_grid.values()[20]).abs() < 1e-15);
    }

    #[test]
    fn cutoff_forms() {
        let c: SweepConfig = serde_json::from_str(r#"{"truncation": {"fock_cutoff": 6}}"#).unwrap();
        assert_eq!(c.truncation.fock_cutoff, Cutoff::Fixed(6));
        assert_eq!(c.space(0.0).unwrap().fock_cutoff(), 6);
        let c: SweepConfig = serde_json::from_str(r#"{"truncation": {"fock_cutoff": "auto"}}"#).unwrap();
        assert_eq!(c.space(1.0 / 225.0).unwrap().fock_cutoff(), 4);
        assert!(serde_json::from_str::<SweepConfig>(r#"{"truncation": {"fock_cutoff": "big"}}"#).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(serde_json::from_str::<SweepConfig>(r#"{"unknown": 1}"#).is_err());
        let mut c = SweepConfig::default();
        c.delta_grid.steps = 0;
        assert!(c.validate().is_err());
        let mut c = SweepConfig::default();
        c.eta_list_hz = Some(vec![]);
        assert!(c.validate().is_err());
        let mut c = SweepConfig::default();
        c.cut_times = vec![5.0, 2.0];
        assert!(c.validate().is_err());
        let mut c = SweepConfig::default();
        c.params.kappa_hz = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn eta_defaults_per_mode() {
        let c = SweepConfig::default();
        assert_eq!(c.etas_kappa(Mode::Steady), DEFAULT_STEADY_ETAS.to_vec());
        assert_eq!(c.etas_kappa(Mode::Trace), vec![0.1 / 1.5]);
    }

    #[test]
    fn kappa_units_grid() {
        let mut c = SweepConfig::default();
        c.delta_grid = DeltaGrid {
            min: -2.0,
            max: 2.0,
            steps: 5,
            units: DeltaUnits::Kappa,
        };
        let p = c.model().unwrap();
        assert_eq!(c.deltas_kappa(&p), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
    }
}
