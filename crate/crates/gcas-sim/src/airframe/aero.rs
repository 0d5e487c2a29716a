//! Polynomial aerodynamic force and moment model.

use nalgebra::Vector3;

use super::{AeroQuantities, AircraftConfig, RigidBodyState, SurfaceSet};
use crate::error::{Error, Result};
use crate::flight_control::MomentCoeffs;

/// Everything the rest of the stack needs from one aero evaluation: total
/// body forces (aero + thrust, gravity excluded), body moment coefficients,
/// and the decomposed pieces the barrier derivations use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeroModelOutput {
    /// Body-axis force (N): stability-axis (D, C, L) rotated by α, plus
    /// thrust along body x.
    pub force: Vector3<f64>,
    /// Body-axis moment coefficients at the configured cg.
    pub moments: MomentCoeffs,
    /// Drag coefficient excluding the q̂ term.
    pub c_d_aux: f64,
    /// Lift coefficient excluding the q̂ term.
    pub c_l_aux: f64,
    /// `C_Dq` from the tables.
    pub c_d_q: f64,
    /// `C_Lq` from the tables.
    pub c_l_q: f64,
    /// `|C_zα|` from the tables.
    pub c_z_alpha: f64,
    /// Load factor `-F_z_aero/(m g)` (g units).
    pub nz: f64,
}

/// Evaluate the polynomial model at one state.
///
/// At zero dynamic pressure (guarded `vt → 0`) all aerodynamic forces and
/// moment coefficients vanish; only thrust remains in `force`.
pub fn aero_model(
    state: &RigidBodyState,
    aero: &AeroQuantities,
    surfaces: &SurfaceSet,
    cfg: &AircraftConfig,
) -> Result<AeroModelOutput> {
    let t = &cfg.aero;
    let (alpha, beta, vt, qbar) = (aero.alpha, aero.beta, aero.vt, aero.qbar);

    // Non-dimensional rates; zero when the airspeed guard trips.
    let (p_hat, q_hat, r_hat) = if vt > 1e-6 {
        let half_b = 0.5 * cfg.span / vt;
        let half_c = 0.5 * cfg.chord / vt;
        (state.p * half_b, state.q * half_c, state.r * half_b)
    } else {
        (0.0, 0.0, 0.0)
    };

    let de_s = surfaces.tail_sym();
    let de_d = surfaces.tail_diff();
    let da_d = surfaces.aileron_diff();
    let dr = surfaces.rudder;

    let c_l_aux = t.c_lift_aux(alpha, de_s);
    let c_d_aux = t.c_drag_aux(alpha, de_s);
    let c_lift = c_l_aux + t.lift_q * q_hat;
    let c_drag = c_d_aux + t.drag_q * q_hat;
    let c_cross = t.c_side(beta, p_hat, r_hat, dr);

    let mut cl = t.c_roll(beta, p_hat, r_hat, da_d, de_d, dr);
    let mut cm = t.c_pitch(alpha, de_s, q_hat);
    let mut cn = t.c_yaw(beta, p_hat, r_hat, da_d, de_d, dr);

    let (sa, ca) = alpha.sin_cos();

    // Moment reference shift from the table cg to the configured cg.
    let cg_shift = cfg.cg_ref - cfg.cg;
    if cg_shift != 0.0 {
        let c_z = -(c_drag * sa + c_lift * ca);
        cm += c_z * cg_shift;
        cn -= c_cross * cg_shift * cfg.chord / cfg.span;
    }

    let drag = qbar * cfg.wing_area * c_drag;
    let cross = qbar * cfg.wing_area * c_cross;
    let lift = qbar * cfg.wing_area * c_lift;

    // Stability axes -> body axes (rotation by α about y).
    let fx_aero = -drag * ca + lift * sa;
    let fy_aero = cross;
    let fz_aero = -drag * sa - lift * ca;
    let nz = -fz_aero / (cfg.mass * cfg.gravity);

    let out = AeroModelOutput {
        force: Vector3::new(fx_aero + cfg.thrust, fy_aero, fz_aero),
        moments: MomentCoeffs {
            cl,
            cm,
            cn,
        },
        c_d_aux,
        c_l_aux,
        c_d_q: t.drag_q,
        c_l_q: t.lift_q,
        c_z_alpha: t.z_alpha,
        nz,
    };

    for (value, table) in [
        (c_lift, "lift"),
        (c_drag, "drag"),
        (c_cross, "side"),
        (cl, "roll"),
        (cm, "pitch"),
        (cn, "yaw"),
    ] {
        if !value.is_finite() {
            return Err(Error::NonFiniteCoefficient { table });
        }
    }
    if !out.force.iter().all(|f| f.is_finite()) {
        return Err(Error::NonFiniteCoefficient { table: "forces" });
    }
    Ok(out)
}
