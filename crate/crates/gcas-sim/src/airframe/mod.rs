//! 6-DoF rigid-body flight dynamics: state types, polynomial aerodynamics,
//! first-order actuators, and a fixed-step RK4 integrator.
//!
//! Axes: body-fixed FRD (x forward, y right, z down) with flat-Earth
//! navigation axes NED. `z_e` is positive down, so altitude `h = -z_e`.

mod aero;
mod config;
mod dynamics;

pub use aero::{aero_model, AeroModelOutput};
pub use config::{isa_density, ActuatorParams, AeroTables, AircraftConfig};
pub use dynamics::{actuator_step, integrate_step, state_derivative, StateDerivative};

use crate::error::{Error, Result};

/// Number of independent control surfaces.
pub const NUM_SURFACES: usize = 5;

/// The twelve rigid-body states.
///
/// Velocities are body-axis (m/s), angular rates body-axis (rad/s),
/// position is NED (m), attitude is 3-2-1 Euler angles (rad).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RigidBodyState {
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub x_e: f64,
    pub y_e: f64,
    pub z_e: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

impl RigidBodyState {
    /// True airspeed, `sqrt(u² + v² + w²)`.
    pub fn vt(&self) -> f64 {
        (self.u * self.u + self.v * self.v + self.w * self.w).sqrt()
    }

    /// Altitude above the reference plane (`-z_e`).
    pub fn altitude(&self) -> f64 {
        -self.z_e
    }

    /// Altitude rate `ḣ = -ż_e`, from the translational kinematics.
    pub fn altitude_rate(&self) -> f64 {
        let (sphi, cphi) = self.phi.sin_cos();
        let (sth, cth) = self.theta.sin_cos();
        self.u * sth - self.v * sphi * cth - self.w * cphi * cth
    }

    /// Body angular rate vector (p, q, r).
    pub fn omega(&self) -> nalgebra::Vector3<f64> {
        nalgebra::Vector3::new(self.p, self.q, self.r)
    }

    /// All twelve states finite.
    pub fn is_finite(&self) -> bool {
        [
            self.u, self.v, self.w, self.p, self.q, self.r, self.x_e, self.y_e, self.z_e,
            self.phi, self.theta, self.psi,
        ]
        .iter()
        .all(|x| x.is_finite())
    }

    /// `state + scale * derivative`, the RK4 stage update.
    pub(crate) fn add_scaled(&self, d: &StateDerivative, scale: f64) -> Self {
        Self {
            u: self.u + scale * d.u_dot,
            v: self.v + scale * d.v_dot,
            w: self.w + scale * d.w_dot,
            p: self.p + scale * d.p_dot,
            q: self.q + scale * d.q_dot,
            r: self.r + scale * d.r_dot,
            x_e: self.x_e + scale * d.x_e_dot,
            y_e: self.y_e + scale * d.y_e_dot,
            z_e: self.z_e + scale * d.z_e_dot,
            phi: self.phi + scale * d.phi_dot,
            theta: self.theta + scale * d.theta_dot,
            psi: self.psi + scale * d.psi_dot,
        }
    }
}

/// Derived aerodynamic quantities for one state.
///
/// `nz` is filled from the force evaluation (it needs the aero model), the
/// rest are purely kinematic:
/// `alpha = atan2(w, u)`, `beta = asin(v / vt)`, `qbar = ½ ρ(h) vt²`,
/// `h = -z_e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeroQuantities {
    /// Angle of attack (rad).
    pub alpha: f64,
    /// Sideslip angle (rad).
    pub beta: f64,
    /// True airspeed (m/s).
    pub vt: f64,
    /// Dynamic pressure (Pa).
    pub qbar: f64,
    /// Altitude (m).
    pub h: f64,
    /// Load factor (g units), `-F_z_aero / (m g)`.
    pub nz: f64,
}

impl AeroQuantities {
    pub fn of(state: &RigidBodyState, cfg: &AircraftConfig) -> Self {
        let vt = state.vt();
        let alpha = state.w.atan2(state.u);
        let beta = if vt > 0.0 {
            (state.v / vt).clamp(-1.0, 1.0).asin()
        } else {
            0.0
        };
        let h = state.altitude();
        let qbar = 0.5 * isa_density(h) * vt * vt;
        let _ = cfg;
        Self {
            alpha,
            beta,
            vt,
            qbar,
            h,
            nz: 0.0,
        }
    }

    /// Flight-path angle `γ = θ - α` (wings-level symmetric convention).
    pub fn gamma(&self, state: &RigidBodyState) -> f64 {
        state.theta - self.alpha
    }
}

/// Deflections of the five surfaces (rad): right/left horizontal tails,
/// right/left ailerons, rudder.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SurfaceSet {
    pub right_tail: f64,
    pub left_tail: f64,
    pub right_aileron: f64,
    pub left_aileron: f64,
    pub rudder: f64,
}

impl SurfaceSet {
    pub fn as_array(&self) -> [f64; NUM_SURFACES] {
        [
            self.right_tail,
            self.left_tail,
            self.right_aileron,
            self.left_aileron,
            self.rudder,
        ]
    }

    pub fn from_array(a: [f64; NUM_SURFACES]) -> Self {
        Self {
            right_tail: a[0],
            left_tail: a[1],
            right_aileron: a[2],
            left_aileron: a[3],
            rudder: a[4],
        }
    }

    /// Symmetric tail deflection, the pitch effector.
    pub fn tail_sym(&self) -> f64 {
        0.5 * (self.right_tail + self.left_tail)
    }

    /// Differential tail deflection (right minus left, halved).
    pub fn tail_diff(&self) -> f64 {
        0.5 * (self.right_tail - self.left_tail)
    }

    /// Symmetric aileron deflection.
    pub fn aileron_sym(&self) -> f64 {
        0.5 * (self.right_aileron + self.left_aileron)
    }

    /// Differential aileron deflection, the roll effector.
    pub fn aileron_diff(&self) -> f64 {
        0.5 * (self.right_aileron - self.left_aileron)
    }
}

/// One first-order servo channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Actuator {
    /// Current deflection (rad).
    pub position: f64,
    /// First-order time constant (s), > 0.
    pub time_constant: f64,
    /// Rate limit (rad/s), > 0.
    pub rate_limit: f64,
    /// Position limits (rad), min < max.
    pub min: f64,
    pub max: f64,
}

/// The five surface servos, in [`SurfaceSet`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorBank {
    pub channels: [Actuator; NUM_SURFACES],
}

impl ActuatorBank {
    /// Bank at zero deflection with per-class parameters from the config.
    pub fn new(cfg: &AircraftConfig) -> Self {
        let ch = |p: &ActuatorParams| Actuator {
            position: 0.0,
            time_constant: p.time_constant,
            rate_limit: p.rate_limit,
            min: p.min,
            max: p.max,
        };
        Self {
            channels: [
                ch(&cfg.tail_actuator),
                ch(&cfg.tail_actuator),
                ch(&cfg.aileron_actuator),
                ch(&cfg.aileron_actuator),
                ch(&cfg.rudder_actuator),
            ],
        }
    }

    /// Current deflections.
    pub fn deflections(&self) -> SurfaceSet {
        SurfaceSet::from_array([
            self.channels[0].position,
            self.channels[1].position,
            self.channels[2].position,
            self.channels[3].position,
            self.channels[4].position,
        ])
    }

    /// Position limits per channel as (min, max) pairs.
    pub fn position_limits(&self) -> [(f64, f64); NUM_SURFACES] {
        let mut out = [(0.0, 0.0); NUM_SURFACES];
        for (o, c) in out.iter_mut().zip(self.channels.iter()) {
            *o = (c.min, c.max);
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.channels.iter().enumerate() {
            if !(c.time_constant > 0.0 && c.rate_limit > 0.0 && c.min < c.max) {
                return Err(Error::Setup(format!(
                    "actuator channel {i}: need time_constant > 0, rate_limit > 0, min < max"
                )));
            }
        }
        Ok(())
    }
}
