//! Scenario execution, the closed-loop pipeline wiring, nuisance metrics,
//! Monte Carlo campaigns, and supporting file formats.
//!
//! Per-step pipeline order is fixed: pilot script → terrain scan → gain
//! lookup → ground-collision filter on q → angle-of-attack filter on the
//! result → bank filter on p (active only while the collision filter is
//! modifying q) → r passthrough → NDI → allocation → actuators → plant.

mod config;
mod csvlog;
mod mc;
mod metrics;
mod run;
mod scenario;
mod trim;

pub use config::SimConfig;
pub use csvlog::{write_csv, CSV_COLUMNS};
pub use mc::{monte_carlo, Histogram, McConfig, McRanges, McReport};
pub use metrics::{
    dtw_distance, minmax_normalize, nuisance_check, reference_command, run_metrics, NuisanceCheck,
    RunMetrics,
};
pub use run::{run_scenario, GainSource};
pub use scenario::{InitialState, PilotScript, Scenario, ScriptPoint, TerrainRef};
pub use trim::level_trim;

use crate::airframe::{AeroQuantities, RigidBodyState, SurfaceSet};

/// One logged simulation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub t: f64,
    pub state: RigidBodyState,
    pub aero: AeroQuantities,
    /// Pilot script commands (rad/s).
    pub p_pilot: f64,
    pub q_pilot: f64,
    pub r_pilot: f64,
    /// Collision-filter output.
    pub q_gcas: f64,
    /// Post-envelope-protection pitch command sent to the CAS.
    pub q_cmd: f64,
    /// Post-bank-filter roll command sent to the CAS.
    pub p_cmd: f64,
    /// Scheduled gains used this step.
    pub k1: f64,
    pub k2: f64,
    pub gcas_active: bool,
    pub gcas_feasible: bool,
    pub gcas_margin: f64,
    pub aoa_active: bool,
    pub aoa_feasible: bool,
    pub bank_active: bool,
    pub bank_feasible: bool,
    /// Maximum scanned terrain height (m).
    pub h_dted: f64,
    /// Allocation residual ‖ΦΔδ - Δτ‖∞.
    pub alloc_residual: f64,
    /// Whether any surface hit its position limit in allocation.
    pub alloc_clamped: bool,
    /// Commanded surface deflections.
    pub commanded: SurfaceSet,
    /// Actual actuator positions at the start of the step.
    pub actual: SurfaceSet,
}

/// Completed (possibly truncated) run log: one record per integration
/// step at a uniform time step.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimLog {
    pub dt: f64,
    pub h_buff: f64,
    pub records: Vec<Record>,
    /// True when the run ended on ground contact.
    pub impacted: bool,
}

impl SimLog {
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Minimum clearance above the scanned terrain, `min(h - h_DTED)`.
    pub fn min_clearance(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.aero.h - r.h_dted)
            .fold(f64::INFINITY, f64::min)
    }

    /// Index of the closest point of approach (argmin of `h - h_DTED`).
    pub fn cpa_index(&self) -> Option<usize> {
        let mut best = None;
        let mut best_v = f64::INFINITY;
        for (i, r) in self.records.iter().enumerate() {
            let v = r.aero.h - r.h_dted;
            if v < best_v {
                best_v = v;
                best = Some(i);
            }
        }
        best
    }

    /// Index of the first record where the collision filter modified the
    /// pilot command.
    pub fn activation_index(&self) -> Option<usize> {
        self.records.iter().position(|r| r.gcas_active)
    }

    /// Index one past the last record where the collision filter was
    /// active.
    pub fn deactivation_index(&self) -> Option<usize> {
        self.records
            .iter()
            .rposition(|r| r.gcas_active)
            .map(|i| i + 1)
    }
}
