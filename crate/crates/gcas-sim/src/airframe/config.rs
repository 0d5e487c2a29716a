//! Aircraft configuration: mass properties, polynomial aerodynamic tables,
//! actuator parameters, and the ISA atmosphere.
//!
//! The file format is TOML with angles in degrees; everything is converted
//! to SI + radians on load. Polynomial term ordering is documented on each
//! table field and mirrored in the shipped `data/aircraft.toml`.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sea-level ISA density (kg/m³).
const RHO_0: f64 = 1.225;
/// Sea-level ISA temperature (K).
const T_0: f64 = 288.15;
/// Tropospheric lapse rate (K/m).
const LAPSE: f64 = 0.0065;
/// Tropopause altitude (m).
const H_TROPO: f64 = 11_000.0;
/// g / (R_air · L) - 1 for the density exponent.
const DENSITY_EXP: f64 = 4.255_88;

/// ISA air density (kg/m³). Altitudes below zero clamp to sea level.
pub fn isa_density(h: f64) -> f64 {
    let h = h.max(0.0);
    if h <= H_TROPO {
        let t = T_0 - LAPSE * h;
        RHO_0 * (t / T_0).powf(DENSITY_EXP)
    } else {
        let t11 = T_0 - LAPSE * H_TROPO;
        let rho11 = RHO_0 * (t11 / T_0).powf(DENSITY_EXP);
        // Isothermal layer above the tropopause.
        let g_over_rt = 9.806_65 / (287.053 * t11);
        rho11 * (-(h - H_TROPO) * g_over_rt).exp()
    }
}

/// Polynomial aerodynamic coefficient tables.
///
/// Forces are modeled in stability axes (drag `D`, cross force `C`, lift
/// `L`), moments in body axes. Rate terms use the usual non-dimensional
/// rates `p̂ = p·b/2V_T`, `q̂ = q·c̄/2V_T`, `r̂ = r·b/2V_T`. Surface inputs
/// are the symmetric tail `δe_s`, differential tail `δe_d`, differential
/// aileron `δa_d`, and rudder `δr`.
///
/// Term ordering (all angles rad, coefficients per rad where dimensional):
///
/// ```text
/// C_L  = lift[0] + lift[1]·α + lift[2]·α² + lift[3]·α³ + lift[4]·δe_s  (+ lift_q·q̂)
/// C_D  = drag[0] + drag[1]·α + drag[2]·α² + drag[3]·δe_s²              (+ drag_q·q̂)
/// C_C  = side[0]·β + side[1]·p̂ + side[2]·r̂ + side[3]·δr
/// C_l  = roll[0]·β + roll[1]·p̂ + roll[2]·r̂ + roll[3]·δa_d + roll[4]·δe_d + roll[5]·δr
/// C_m  = pitch[0] + pitch[1]·α + pitch[2]·α² + pitch[3]·α³ + pitch[4]·δe_s + pitch[5]·q̂
/// C_n  = yaw[0]·β + yaw[1]·p̂ + yaw[2]·r̂ + yaw[3]·δa_d + yaw[4]·δe_d + yaw[5]·δr
/// ```
///
/// The lift and drag polynomials without their q̂ terms are the `C_L_aux`
/// and `C_D_aux` pieces used by the barrier decompositions; `lift_q` and
/// `drag_q` are `C_Lq` and `C_Dq`. `z_alpha` is the z-force derivative
/// magnitude `|C_zα|` used by the load-factor limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AeroTables {
    pub lift: [f64; 5],
    pub lift_q: f64,
    pub drag: [f64; 4],
    pub drag_q: f64,
    pub z_alpha: f64,
    pub side: [f64; 4],
    pub roll: [f64; 6],
    pub pitch: [f64; 6],
    pub yaw: [f64; 6],
}

impl AeroTables {
    /// Lift coefficient excluding the pitch-rate term (`C_L_aux`).
    pub fn c_lift_aux(&self, alpha: f64, tail_sym: f64) -> f64 {
        let a = alpha;
        self.lift[0]
            + self.lift[1] * a
            + self.lift[2] * a * a
            + self.lift[3] * a * a * a
            + self.lift[4] * tail_sym
    }

    /// Drag coefficient excluding the pitch-rate term (`C_D_aux`).
    pub fn c_drag_aux(&self, alpha: f64, tail_sym: f64) -> f64 {
        let a = alpha;
        self.drag[0] + self.drag[1] * a + self.drag[2] * a * a + self.drag[3] * tail_sym * tail_sym
    }

    /// Stability-axis cross-force coefficient.
    pub fn c_side(&self, beta: f64, p_hat: f64, r_hat: f64, rudder: f64) -> f64 {
        self.side[0] * beta + self.side[1] * p_hat + self.side[2] * r_hat + self.side[3] * rudder
    }

    /// Body-axis rolling moment coefficient.
    pub fn c_roll(
        &self,
        beta: f64,
        p_hat: f64,
        r_hat: f64,
        aileron_diff: f64,
        tail_diff: f64,
        rudder: f64,
    ) -> f64 {
        self.roll[0] * beta
            + self.roll[1] * p_hat
            + self.roll[2] * r_hat
            + self.roll[3] * aileron_diff
            + self.roll[4] * tail_diff
            + self.roll[5] * rudder
    }

    /// Body-axis pitching moment coefficient (before the cg shift term).
    pub fn c_pitch(&self, alpha: f64, tail_sym: f64, q_hat: f64) -> f64 {
        let a = alpha;
        self.pitch[0]
            + self.pitch[1] * a
            + self.pitch[2] * a * a
            + self.pitch[3] * a * a * a
            + self.pitch[4] * tail_sym
            + self.pitch[5] * q_hat
    }

    /// Body-axis yawing moment coefficient (before the cg shift term).
    pub fn c_yaw(
        &self,
        beta: f64,
        p_hat: f64,
        r_hat: f64,
        aileron_diff: f64,
        tail_diff: f64,
        rudder: f64,
    ) -> f64 {
        self.yaw[0] * beta
            + self.yaw[1] * p_hat
            + self.yaw[2] * r_hat
            + self.yaw[3] * aileron_diff
            + self.yaw[4] * tail_diff
            + self.yaw[5] * rudder
    }
}

impl Default for AeroTables {
    /// Nominal F-16-class values. Laterally symmetric: the longitudinal
    /// tables carry no lateral states and the lateral tables are odd in
    /// (β, p̂, r̂, δa_d, δe_d, δr).
    fn default() -> Self {
        Self {
            lift: [0.0, 4.2, -0.3, -1.8, 0.52],
            lift_q: 28.0,
            drag: [0.022, 0.02, 2.1, 0.38],
            drag_q: 0.15,
            z_alpha: 4.6,
            side: [-0.81, 0.0, 0.6, 0.17],
            roll: [-0.10, -0.35, 0.05, -0.14, -0.064, 0.015],
            pitch: [0.0, 0.15, 0.0, -3.0, -0.90, -7.0],
            yaw: [0.25, 0.022, -0.45, 0.011, 0.021, -0.10],
        }
    }
}

/// Per-class actuator parameters. Internal units: s, rad/s, rad.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorParams {
    pub time_constant: f64,
    pub rate_limit: f64,
    pub min: f64,
    pub max: f64,
}

/// Airframe mass, geometry, inertia, thrust, and aero tables.
#[derive(Debug, Clone, PartialEq)]
pub struct AircraftConfig {
    /// Mass (kg).
    pub mass: f64,
    /// Gravitational acceleration (m/s²).
    pub gravity: f64,
    /// Wing reference area S (m²).
    pub wing_area: f64,
    /// Wing span b (m).
    pub span: f64,
    /// Mean aerodynamic chord c̄ (m).
    pub chord: f64,
    /// Inertia components (kg·m²); products other than Ixz are zero.
    pub ixx: f64,
    pub iyy: f64,
    pub izz: f64,
    pub ixz: f64,
    /// Center-of-gravity location (fraction of c̄).
    pub cg: f64,
    /// cg location the moment tables are referenced to (fraction of c̄).
    pub cg_ref: f64,
    /// Constant thrust along body x (N); held fixed per scenario.
    pub thrust: f64,
    pub aero: AeroTables,
    pub tail_actuator: ActuatorParams,
    pub aileron_actuator: ActuatorParams,
    pub rudder_actuator: ActuatorParams,
}

impl AircraftConfig {
    /// Inertia tensor with the x-z product term.
    pub fn inertia(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.ixx, 0.0, -self.ixz, //
            0.0, self.iyy, 0.0, //
            -self.ixz, 0.0, self.izz,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let pos = self.mass > 0.0
            && self.wing_area > 0.0
            && self.span > 0.0
            && self.chord > 0.0
            && self.ixx > 0.0
            && self.iyy > 0.0
            && self.izz > 0.0;
        if !pos {
            return Err(Error::ConfigParse(
                "mass, wing_area, span, chord, and diagonal inertias must be positive".into(),
            ));
        }
        if self.ixx * self.izz - self.ixz * self.ixz <= 0.0 {
            return Err(Error::ConfigParse(
                "inertia tensor is singular: need Ixx·Izz - Ixz² > 0".into(),
            ));
        }
        Ok(())
    }
}

impl Default for AircraftConfig {
    /// F-16-class nominal values; cg at 35% c̄ (statically unstable in
    /// pitch), thrust idle. Actuators: τ = 0.0495 s, rate limits 60/80/120
    /// °/s and positions ±25/±21.5/±30° for tails/ailerons/rudder.
    fn default() -> Self {
        let d = std::f64::consts::PI / 180.0;
        Self {
            mass: 9295.44,
            gravity: 9.806_65,
            wing_area: 27.87,
            span: 9.144,
            chord: 3.45,
            ixx: 12_874.8,
            iyy: 75_673.6,
            izz: 85_552.1,
            ixz: 1_331.4,
            cg: 0.35,
            cg_ref: 0.35,
            thrust: 0.0,
            aero: AeroTables::default(),
            tail_actuator: ActuatorParams {
                time_constant: 0.0495,
                rate_limit: 60.0 * d,
                min: -25.0 * d,
                max: 25.0 * d,
            },
            aileron_actuator: ActuatorParams {
                time_constant: 0.0495,
                rate_limit: 80.0 * d,
                min: -21.5 * d,
                max: 21.5 * d,
            },
            rudder_actuator: ActuatorParams {
                time_constant: 0.0495,
                rate_limit: 120.0 * d,
                min: -30.0 * d,
                max: 30.0 * d,
            },
        }
    }
}

// ---------------------------------------------------------------------------
// File representation (degrees at the boundary)
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct ActuatorParamsFile {
    pub tau: f64,
    pub rate_dps: f64,
    pub min_deg: f64,
    pub max_deg: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct AircraftFile {
    pub mass: f64,
    pub gravity: f64,
    pub wing_area: f64,
    pub span: f64,
    pub chord: f64,
    pub ixx: f64,
    pub iyy: f64,
    pub izz: f64,
    pub ixz: f64,
    pub cg: f64,
    pub cg_ref: f64,
    pub thrust: f64,
    pub aero: AeroTables,
    pub tail_actuator: ActuatorParamsFile,
    pub aileron_actuator: ActuatorParamsFile,
    pub rudder_actuator: ActuatorParamsFile,
}

impl ActuatorParamsFile {
    fn to_params(&self) -> ActuatorParams {
        let d = std::f64::consts::PI / 180.0;
        ActuatorParams {
            time_constant: self.tau,
            rate_limit: self.rate_dps * d,
            min: self.min_deg * d,
            max: self.max_deg * d,
        }
    }

    fn from_params(p: &ActuatorParams) -> Self {
        let d = 180.0 / std::f64::consts::PI;
        Self {
            tau: p.time_constant,
            rate_dps: p.rate_limit * d,
            min_deg: p.min * d,
            max_deg: p.max * d,
        }
    }
}

impl AircraftFile {
    pub(crate) fn to_config(&self) -> Result<AircraftConfig> {
        let cfg = AircraftConfig {
            mass: self.mass,
            gravity: self.gravity,
            wing_area: self.wing_area,
            span: self.span,
            chord: self.chord,
            ixx: self.ixx,
            iyy: self.iyy,
            izz: self.izz,
            ixz: self.ixz,
            cg: self.cg,
            cg_ref: self.cg_ref,
            thrust: self.thrust,
            aero: self.aero.clone(),
            tail_actuator: self.tail_actuator.to_params(),
            aileron_actuator: self.aileron_actuator.to_params(),
            rudder_actuator: self.rudder_actuator.to_params(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub(crate) fn from_config(cfg: &AircraftConfig) -> Self {
        Self {
            mass: cfg.mass,
            gravity: cfg.gravity,
            wing_area: cfg.wing_area,
            span: cfg.span,
            chord: cfg.chord,
            ixx: cfg.ixx,
            iyy: cfg.iyy,
            izz: cfg.izz,
            ixz: cfg.ixz,
            cg: cfg.cg,
            cg_ref: cfg.cg_ref,
            thrust: cfg.thrust,
            aero: cfg.aero.clone(),
            tail_actuator: ActuatorParamsFile::from_params(&cfg.tail_actuator),
            aileron_actuator: ActuatorParamsFile::from_params(&cfg.aileron_actuator),
            rudder_actuator: ActuatorParamsFile::from_params(&cfg.rudder_actuator),
        }
    }
}
