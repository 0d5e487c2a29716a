//! Equations of motion and fixed-step integration.

use nalgebra::Vector3;

use super::{aero_model, ActuatorBank, AeroQuantities, AircraftConfig, RigidBodyState, SurfaceSet};
use crate::error::{Error, Result};

/// Margin kept from the `θ = ±π/2` kinematic singularity (rad).
const THETA_SINGULARITY_MARGIN: f64 = 1e-9;

/// Time derivative of [`RigidBodyState`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateDerivative {
    pub u_dot: f64,
    pub v_dot: f64,
    pub w_dot: f64,
    pub p_dot: f64,
    pub q_dot: f64,
    pub r_dot: f64,
    pub x_e_dot: f64,
    pub y_e_dot: f64,
    pub z_e_dot: f64,
    pub phi_dot: f64,
    pub theta_dot: f64,
    pub psi_dot: f64,
}

/// Full rigid-body derivative: translational and rotational dynamics plus
/// translational and rotational kinematics.
///
/// Forces come from [`aero_model`] (aero + thrust) with gravity resolved
/// into body axes; ṗ and ṙ are solved simultaneously through the inertia
/// tensor so the Ixz coupling is exact.
pub fn state_derivative(
    state: &RigidBodyState,
    surfaces: &SurfaceSet,
    cfg: &AircraftConfig,
) -> Result<StateDerivative> {
    if (std::f64::consts::FRAC_PI_2 - state.theta.abs()) <= THETA_SINGULARITY_MARGIN {
        return Err(Error::KinematicSingularity {
            theta_rad: state.theta,
        });
    }

    let aero = AeroQuantities::of(state, cfg);
    let out = aero_model(state, &aero, surfaces, cfg)?;

    let (sphi, cphi) = state.phi.sin_cos();
    let (sth, cth) = state.theta.sin_cos();
    let (spsi, cpsi) = state.psi.sin_cos();

    let m = cfg.mass;
    let g = cfg.gravity;
    let fx = out.force.x - m * g * sth;
    let fy = out.force.y + m * g * sphi * cth;
    let fz = out.force.z + m * g * cphi * cth;

    let (u, v, w) = (state.u, state.v, state.w);
    let (p, q, r) = (state.p, state.q, state.r);

    // Translational dynamics.
    let u_dot = fx / m + r * v - q * w;
    let v_dot = fy / m + p * w - r * u;
    let w_dot = fz / m + q * u - p * v;

    // Rotational dynamics: J ω̇ = M - ω × (J ω).
    let qs = aero.qbar * cfg.wing_area;
    let moments = Vector3::new(
        qs * cfg.span * out.moments.cl,
        qs * cfg.chord * out.moments.cm,
        qs * cfg.span * out.moments.cn,
    );
    let j = cfg.inertia();
    let omega = state.omega();
    let omega_dot = j
        .try_inverse()
        .expect("inertia validated invertible")
        * (moments - omega.cross(&(j * omega)));

    // Translational kinematics (body -> NED).
    let x_e_dot = u * cth * cpsi + v * (sphi * sth * cpsi - cphi * spsi)
        + w * (cphi * sth * cpsi + sphi * spsi);
    let y_e_dot = u * cth * spsi + v * (sphi * sth * spsi + cphi * cpsi)
        + w * (cphi * sth * spsi - sphi * cpsi);
    let z_e_dot = -u * sth + v * sphi * cth + w * cphi * cth;

    // Rotational kinematics.
    let t_th = sth / cth;
    let phi_dot = p + t_th * (q * sphi + r * cphi);
    let theta_dot = q * cphi - r * sphi;
    let psi_dot = (q * sphi + r * cphi) / cth;

    Ok(StateDerivative {
        u_dot,
        v_dot,
        w_dot,
        p_dot: omega_dot.x,
        q_dot: omega_dot.y,
        r_dot: omega_dot.z,
        x_e_dot,
        y_e_dot,
        z_e_dot,
        phi_dot,
        theta_dot,
        psi_dot,
    })
}

/// Advance the actuator bank one step toward the commanded deflections.
///
/// Each surface follows the exact discrete first-order lag
/// `Δδ = (δ_cmd - δ)(1 - e^(-dt/τ))`, rate-limited to ±rate·dt, then
/// position-clamped. Clamping is the contract; this never fails.
pub fn actuator_step(bank: &ActuatorBank, commanded: &SurfaceSet, dt: f64) -> ActuatorBank {
    let cmd = commanded.as_array();
    let mut next = *bank;
    for (ch, &target) in next.channels.iter_mut().zip(cmd.iter()) {
        let lag = 1.0 - (-dt / ch.time_constant).exp();
        let mut delta = (target - ch.position) * lag;
        let max_delta = ch.rate_limit * dt;
        delta = delta.clamp(-max_delta, max_delta);
        ch.position = (ch.position + delta).clamp(ch.min, ch.max);
    }
    next
}

/// One RK4 step of the rigid body with surfaces frozen at their
/// start-of-step actuator positions, then one actuator update.
///
/// Deterministic: identical inputs produce bit-identical outputs.
pub fn integrate_step(
    state: &RigidBodyState,
    bank: &ActuatorBank,
    commanded: &SurfaceSet,
    cfg: &AircraftConfig,
    dt: f64,
    step: usize,
) -> Result<(RigidBodyState, ActuatorBank)> {
    let surfaces = bank.deflections();
    let k1 = state_derivative(state, &surfaces, cfg)?;
    let k2 = state_derivative(&state.add_scaled(&k1, 0.5 * dt), &surfaces, cfg)?;
    let k3 = state_derivative(&state.add_scaled(&k2, 0.5 * dt), &surfaces, cfg)?;
    let k4 = state_derivative(&state.add_scaled(&k3, dt), &surfaces, cfg)?;

    let sixth = dt / 6.0;
    let next = RigidBodyState {
        u: state.u + sixth * (k1.u_dot + 2.0 * k2.u_dot + 2.0 * k3.u_dot + k4.u_dot),
        v: state.v + sixth * (k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot),
        w: state.w + sixth * (k1.w_dot + 2.0 * k2.w_dot + 2.0 * k3.w_dot + k4.w_dot),
        p: state.p + sixth * (k1.p_dot + 2.0 * k2.p_dot + 2.0 * k3.p_dot + k4.p_dot),
        q: state.q + sixth * (k1.q_dot + 2.0 * k2.q_dot + 2.0 * k3.q_dot + k4.q_dot),
        r: state.r + sixth * (k1.r_dot + 2.0 * k2.r_dot + 2.0 * k3.r_dot + k4.r_dot),
        x_e: state.x_e + sixth * (k1.x_e_dot + 2.0 * k2.x_e_dot + 2.0 * k3.x_e_dot + k4.x_e_dot),
        y_e: state.y_e + sixth * (k1.y_e_dot + 2.0 * k2.y_e_dot + 2.0 * k3.y_e_dot + k4.y_e_dot),
        z_e: state.z_e + sixth * (k1.z_e_dot + 2.0 * k2.z_e_dot + 2.0 * k3.z_e_dot + k4.z_e_dot),
        phi: state.phi + sixth * (k1.phi_dot + 2.0 * k2.phi_dot + 2.0 * k3.phi_dot + k4.phi_dot),
        theta: state.theta
            + sixth * (k1.theta_dot + 2.0 * k2.theta_dot + 2.0 * k3.theta_dot + k4.theta_dot),
        psi: state.psi + sixth * (k1.psi_dot + 2.0 * k2.psi_dot + 2.0 * k3.psi_dot + k4.psi_dot),
    };

    if !next.is_finite() {
        return Err(Error::Diverged { step });
    }

    Ok((next, actuator_step(bank, commanded, dt)))
}
