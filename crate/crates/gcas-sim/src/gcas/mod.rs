//! Ground-collision safety filter.
//!
//! The altitude channel has relative degree two: pitch rate enters through
//! the second derivative `ḧ = f(h) + g(h)·q`. The decomposition isolates
//! the pitch-rate contribution channel by channel (true airspeed, pitch
//! angle, angle of attack) and chains them through
//! `ḣ = V_T sin(θ - α)`. The resulting exponential-CBF constraint
//! `f(h) + g(h)·q + k₁·b + k₂·ḃ ≥ 0` filters the pilot pitch-rate command
//! through a closed-form 1-D QP.

pub mod qp;
mod schedule;

pub use qp::{solve_scalar_qp, ACTIVATION_THRESHOLD, INPUT_GAIN_EPS};
pub use schedule::{lookup_gains, GainSchedule, ScheduleMetadata};

use crate::airframe::{AeroModelOutput, AeroQuantities, AircraftConfig, RigidBodyState};
use crate::error::{Error, Result};

/// Affine-in-input decomposition of one scalar channel: `ẋ = f + g·q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierDecomp {
    /// Drift term (channel units per second).
    pub f: f64,
    /// Input gain (channel units per rad/s of pitch rate).
    pub g: f64,
}

/// The ECBF gain pair κ = (k₁, k₂) with the critical-damping structure
/// `k₁ = k₂²/4` and `k₁ ≥ 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcbfGains {
    /// Position gain (1/s²).
    pub k1: f64,
    /// Rate gain (1/s).
    pub k2: f64,
}

impl EcbfGains {
    /// Build the critically damped pair from the rate gain alone.
    pub fn critically_damped(k2: f64) -> Self {
        Self {
            k1: k2 * k2 / 4.0,
            k2,
        }
    }

    /// Sliding-manifold slope μ = k₁/k₂ (1/s).
    pub fn mu(&self) -> f64 {
        self.k1 / self.k2
    }

    /// Check positivity, the critical-damping equality, and the k₁ ≥ 4
    /// floor.
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: &str| {
            Err(Error::GainVerification {
                k1: self.k1,
                k2: self.k2,
                reason: reason.to_string(),
            })
        };
        if !(self.k1 > 0.0 && self.k2 > 0.0) {
            return fail("gains must be positive");
        }
        if (self.k1 - self.k2 * self.k2 / 4.0).abs() > 1e-9 * self.k1 {
            return fail("critical damping requires k1 = k2²/4");
        }
        if self.k1 < 4.0 {
            return fail("k1 must be at least 4");
        }
        Ok(())
    }
}

/// Barrier value and rate for the altitude channel: `η_b = (b, ḃ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierState {
    /// `b = h - (h_buff + h_DTED)` (m).
    pub b: f64,
    /// `ḃ = ḣ` (m/s).
    pub bdot: f64,
}

/// Output of a 1-D safety filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafetyFilterResult {
    /// Filtered command, always within the command box (rad/s).
    pub command: f64,
    /// Whether the command differs from the clamped request.
    pub active: bool,
    /// False when no command in the box satisfies the constraint.
    pub feasible: bool,
    /// Constraint slack at the returned command.
    pub margin: f64,
}

/// True-airspeed channel: `V̇_T = f(V_T) + g(V_T)·q`.
///
/// The drag force is split so the pitch-rate contribution hidden in `C_Dq`
/// appears in the input gain; the cross-force term is dropped (negligible
/// at small sideslip).
pub fn vt_decomp(
    state: &RigidBodyState,
    aero: &AeroQuantities,
    coeffs: &AeroModelOutput,
    cfg: &AircraftConfig,
) -> BarrierDecomp {
    let (sa, ca) = aero.alpha.sin_cos();
    let (sb, cb) = aero.beta.sin_cos();
    let (sth, cth) = state.theta.sin_cos();
    let (sphi, cphi) = state.phi.sin_cos();
    let m = cfg.mass;
    let g = cfg.gravity;
    let qs = aero.qbar * cfg.wing_area;

    let f = (cfg.thrust * ca * cb
        - m * g * (sth * ca * cb - cth * sphi * sb - cth * cphi * sa * cb))
        / m
        - qs * coeffs.c_d_aux * cb / m;
    let gq = -qs * coeffs.c_d_q * (cfg.chord / (2.0 * aero.vt)) * cb / m;
    BarrierDecomp { f, g: gq }
}

/// Pitch-angle channel: `θ̇ = -r·sinφ + cosφ·q`.
pub fn theta_decomp(state: &RigidBodyState) -> BarrierDecomp {
    let (sphi, cphi) = state.phi.sin_cos();
    BarrierDecomp {
        f: -state.r * sphi,
        g: cphi,
    }
}

/// Angle-of-attack channel: `α̇ = f(α) + g(α)·q`.
///
/// The lift force is split so the `C_Lq` contribution lands in the input
/// gain; the rest rides in the drift together with gravity, thrust, and
/// the roll/yaw coupling at nonzero sideslip.
pub fn alpha_decomp(
    state: &RigidBodyState,
    aero: &AeroQuantities,
    coeffs: &AeroModelOutput,
    cfg: &AircraftConfig,
) -> Result<BarrierDecomp> {
    let cb = aero.beta.cos();
    if cb.abs() < 1e-9 {
        return Err(Error::DegenerateSideslip {
            beta_rad: aero.beta,
        });
    }
    let (sa, ca) = aero.alpha.sin_cos();
    let (sth, cth) = state.theta.sin_cos();
    let cphi = state.phi.cos();
    let tb = aero.beta.tan();
    let m = cfg.mass;
    let g = cfg.gravity;
    let qs = aero.qbar * cfg.wing_area;
    let mvcb = m * aero.vt * cb;

    let f = (m * g * (cth * cphi * ca + sth * sa) - cfg.thrust) / mvcb
        - tb * (state.p * ca + state.r * sa)
        - qs * coeffs.c_l_aux / mvcb;
    let gq = 1.0 - qs * coeffs.c_l_q * (cfg.chord / (2.0 * aero.vt)) / mvcb;
    Ok(BarrierDecomp { f, g: gq })
}

/// Altitude channel: `ḧ = f(h) + g(h)·q`, the chain rule applied to
/// `ḣ = V_T sin(θ - α)`:
///
/// ```text
/// f(h) = f(V_T)·sin(θ-α) + V_T·cos(θ-α)·[f(θ) - f(α)]
/// g(h) = g(V_T)·sin(θ-α) + V_T·cos(θ-α)·[g(θ) - g(α)]
/// ```
pub fn altitude_decomp(
    state: &RigidBodyState,
    aero: &AeroQuantities,
    coeffs: &AeroModelOutput,
    cfg: &AircraftConfig,
) -> Result<BarrierDecomp> {
    let dv = vt_decomp(state, aero, coeffs, cfg);
    let dth = theta_decomp(state);
    let da = alpha_decomp(state, aero, coeffs, cfg)?;
    let (sg, cg) = (state.theta - aero.alpha).sin_cos();
    Ok(BarrierDecomp {
        f: dv.f * sg + aero.vt * cg * (dth.f - da.f),
        g: dv.g * sg + aero.vt * cg * (dth.g - da.g),
    })
}

/// Barrier state from altitude, altitude rate, buffer, and terrain height.
pub fn eta_b(h: f64, hdot: f64, h_buff: f64, h_dted: f64) -> BarrierState {
    BarrierState {
        b: h - (h_buff + h_dted),
        bdot: hdot,
    }
}

/// The ground-collision QP: minimize `½(q - q_pilot)²` subject to
/// `f(h) + g(h)·q + k₁·b + k₂·ḃ ≥ 0` and the pitch-rate box.
pub fn gcas_qp(
    q_pilot: f64,
    d: &BarrierDecomp,
    eta: &BarrierState,
    kappa: &EcbfGains,
    bounds: (f64, f64),
) -> SafetyFilterResult {
    let c = d.f + kappa.k1 * eta.b + kappa.k2 * eta.bdot;
    solve_scalar_qp(q_pilot, d.g, c, bounds.0, bounds.1)
}
