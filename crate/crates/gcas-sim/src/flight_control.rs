//! Angular-rate control augmentation via nonlinear dynamic inversion and
//! incremental control allocation onto the five surfaces.
//!
//! The CAS inverts the control-affine rotational dynamics
//! `ω̇ = -J⁻¹(ω × Jω) + J⁻¹ q̄ S diag(b, c̄, b) τ` so a diagonal gain on the
//! rate error imposes first-order error dynamics per channel. The required
//! moment-coefficient increment is then mapped to surface deflections
//! through the Moore-Penrose pseudo-inverse of the control effectivity
//! matrix.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};
use serde::Deserialize;

use crate::airframe::{AircraftConfig, AeroQuantities, RigidBodyState, SurfaceSet, NUM_SURFACES};
use crate::airframe::{aero_model, ActuatorBank};
use crate::error::{Error, Result};

/// Singular values below `PINV_CUTOFF · σ_max` are treated as zero.
const PINV_CUTOFF: f64 = 1e-8;

/// Commanded body angular rates (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateCommand {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

/// Body-axis moment coefficients (Cl, Cm, Cn).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MomentCoeffs {
    pub cl: f64,
    pub cm: f64,
    pub cn: f64,
}

impl MomentCoeffs {
    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.cl, self.cm, self.cn)
    }

    pub fn from_vector(v: Vector3<f64>) -> Self {
        Self {
            cl: v.x,
            cm: v.y,
            cn: v.z,
        }
    }
}

impl std::ops::Sub for MomentCoeffs {
    type Output = MomentCoeffs;
    fn sub(self, rhs: Self) -> Self {
        Self {
            cl: self.cl - rhs.cl,
            cm: self.cm - rhs.cm,
            cn: self.cn - rhs.cn,
        }
    }
}

/// Per-channel CAS gains (1/s), all positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasGains {
    pub kp: f64,
    pub kq: f64,
    pub kr: f64,
}

impl Default for CasGains {
    fn default() -> Self {
        Self {
            kp: 4.0,
            kq: 4.0,
            kr: 4.0,
        }
    }
}

/// Admissible angular-rate command bounds (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBounds {
    pub p_min: f64,
    pub p_max: f64,
    pub q_min: f64,
    pub q_max: f64,
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for RateBounds {
    /// Pitch box sized so the command bound, not the load-factor limit,
    /// binds during a maximum-effort pull across the airspeed envelope.
    fn default() -> Self {
        let d = std::f64::consts::PI / 180.0;
        Self {
            p_min: -120.0 * d,
            p_max: 120.0 * d,
            q_min: -13.0 * d,
            q_max: 13.0 * d,
            r_min: -30.0 * d,
            r_max: 30.0 * d,
        }
    }
}

/// 3×5 matrix of moment-coefficient partials w.r.t. surface deflections
/// (1/rad), plus the rank diagnosis from the allocation pseudo-inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct Effectivity {
    pub matrix: SMatrix<f64, 3, NUM_SURFACES>,
    pub rank: usize,
}

impl Effectivity {
    pub fn rank_deficient(&self) -> bool {
        self.rank < 3
    }
}

/// Virtual input: the commanded angular acceleration `ω̇_c = K (ω_cmd - ω)`.
pub fn ndi_virtual_input(
    cmd: &RateCommand,
    rates: Vector3<f64>,
    gains: &CasGains,
) -> Vector3<f64> {
    Vector3::new(
        gains.kp * (cmd.p - rates.x),
        gains.kq * (cmd.q - rates.y),
        gains.kr * (cmd.r - rates.z),
    )
}

/// Total moment coefficients required to realize `ω̇_c`:
/// `τ_c = [J⁻¹ q̄ S diag(b, c̄, b)]⁻¹ · (ω̇_c + J⁻¹ (ω × J ω))`.
pub fn ndi_required_moments(
    omega_dot_c: Vector3<f64>,
    rates: Vector3<f64>,
    qbar: f64,
    cfg: &AircraftConfig,
) -> Result<MomentCoeffs> {
    if qbar <= 0.0 {
        return Err(Error::DegenerateDynamicPressure { qbar });
    }
    let j = cfg.inertia();
    let gyro = j
        .try_inverse()
        .expect("inertia validated invertible")
        * rates.cross(&(j * rates));
    let demand = j * (omega_dot_c + gyro);
    let qs = qbar * cfg.wing_area;
    Ok(MomentCoeffs {
        cl: demand.x / (qs * cfg.span),
        cm: demand.y / (qs * cfg.chord),
        cn: demand.z / (qs * cfg.span),
    })
}

/// Analytic control effectivity: partials of (Cl, Cm, Cn) w.r.t. the five
/// surface deflections at the current state, including the cg-shift
/// contribution to the Cm and Cn rows.
pub fn control_effectivity(
    state: &RigidBodyState,
    surfaces: &SurfaceSet,
    cfg: &AircraftConfig,
) -> Effectivity {
    let t = &cfg.aero;
    let aero = AeroQuantities::of(state, cfg);
    let alpha = aero.alpha;
    let de_s = surfaces.tail_sym();
    let (sa, ca) = alpha.sin_cos();
    let cg_shift = cfg.cg_ref - cfg.cg;

    // dCz/dδe_s through the lift and drag tables (stability -> body z).
    let dcz_des = -(2.0 * t.drag[3] * de_s * sa + t.lift[4] * ca);
    let dcm_des = t.pitch[4] + cg_shift * dcz_des;
    // dCn/dδr through the cross-force table.
    let dcn_dr = t.yaw[5] - cg_shift * t.side[3] * cfg.chord / cfg.span;

    // Columns: right tail, left tail, right aileron, left aileron, rudder.
    // Symmetric/differential combinations each contribute a half per side.
    let m = SMatrix::<f64, 3, NUM_SURFACES>::from_row_slice(&[
        0.5 * t.roll[4],
        -0.5 * t.roll[4],
        0.5 * t.roll[3],
        -0.5 * t.roll[3],
        t.roll[5],
        //
        0.5 * dcm_des,
        0.5 * dcm_des,
        0.0,
        0.0,
        0.0,
        //
        0.5 * t.yaw[4],
        -0.5 * t.yaw[4],
        0.5 * t.yaw[3],
        -0.5 * t.yaw[3],
        dcn_dr,
    ]);

    Effectivity {
        rank: matrix_rank(&m),
        matrix: m,
    }
}

/// Central-difference fallback for the effectivity (step 1e-4 rad), used
/// as an independent check on the analytic partials.
pub fn control_effectivity_fd(
    state: &RigidBodyState,
    surfaces: &SurfaceSet,
    cfg: &AircraftConfig,
) -> Result<Effectivity> {
    const STEP: f64 = 1e-4;
    let aero = AeroQuantities::of(state, cfg);
    let mut m = SMatrix::<f64, 3, NUM_SURFACES>::zeros();
    let base = surfaces.as_array();
    for col in 0..NUM_SURFACES {
        let mut plus = base;
        let mut minus = base;
        plus[col] += STEP;
        minus[col] -= STEP;
        let out_p = aero_model(state, &aero, &SurfaceSet::from_array(plus), cfg)?;
        let out_m = aero_model(state, &aero, &SurfaceSet::from_array(minus), cfg)?;
        let d = (out_p.moments.as_vector() - out_m.moments.as_vector()) / (2.0 * STEP);
        m.set_column(col, &d);
    }
    Ok(Effectivity {
        rank: matrix_rank(&m),
        matrix: m,
    })
}

fn matrix_rank(m: &SMatrix<f64, 3, NUM_SURFACES>) -> usize {
    let svd = m.svd(false, false);
    let smax = svd.singular_values.max();
    if smax <= 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|&&s| s > PINV_CUTOFF * smax)
        .count()
}

/// Outcome of one allocation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationResult {
    /// Commanded deflections after position clamping.
    pub commanded: SurfaceSet,
    /// `‖Φ Δδ - Δτ_c‖_∞` for the clamped increment.
    pub residual_inf: f64,
    /// Whether the effectivity was rank-deficient (allocation proceeded).
    pub rank_deficient: bool,
    /// Whether any surface hit a position limit.
    pub clamped: bool,
}

/// Incremental allocation: `δ_c = Φ‡ Δτ_c + δ₀`, minimum-norm in the
/// increment, then position-clamped per surface. Rank deficiency is
/// flagged, never fatal.
pub fn inca_allocate(
    delta_tau: &MomentCoeffs,
    effectivity: &Effectivity,
    current: &SurfaceSet,
    bank: &ActuatorBank,
) -> AllocationResult {
    let svd = effectivity.matrix.svd(true, true);
    let smax = svd.singular_values.max();
    let pinv = svd
        .pseudo_inverse(PINV_CUTOFF * smax.max(f64::MIN_POSITIVE))
        .expect("svd computed with u and v_t");
    let delta: SVector<f64, NUM_SURFACES> = pinv * delta_tau.as_vector();

    let base = current.as_array();
    let limits = bank.position_limits();
    let mut commanded = [0.0; NUM_SURFACES];
    let mut clamped = false;
    for i in 0..NUM_SURFACES {
        let raw = base[i] + delta[i];
        let clipped = raw.clamp(limits[i].0, limits[i].1);
        if clipped != raw {
            clamped = true;
        }
        commanded[i] = clipped;
    }

    let applied = SVector::<f64, NUM_SURFACES>::from_iterator(
        commanded.iter().zip(base.iter()).map(|(c, b)| c - b),
    );
    let residual = effectivity.matrix * applied - delta_tau.as_vector();

    AllocationResult {
        commanded: SurfaceSet::from_array(commanded),
        residual_inf: residual.amax(),
        rank_deficient: effectivity.rank_deficient(),
        clamped,
    }
}

// ---------------------------------------------------------------------------
// File representation
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize, serde::Serialize)]
pub(crate) struct CasFile {
    pub kp: f64,
    pub kq: f64,
    pub kr: f64,
}

#[derive(Debug, Deserialize, serde::Serialize)]
pub(crate) struct RateBoundsFile {
    pub p_dps: [f64; 2],
    pub q_dps: [f64; 2],
    pub r_dps: [f64; 2],
}

impl CasFile {
    pub(crate) fn to_gains(&self) -> Result<CasGains> {
        if self.kp <= 0.0 || self.kq <= 0.0 || self.kr <= 0.0 {
            return Err(Error::ConfigParse("CAS gains must be positive".into()));
        }
        Ok(CasGains {
            kp: self.kp,
            kq: self.kq,
            kr: self.kr,
        })
    }
}

impl RateBoundsFile {
    pub(crate) fn to_bounds(&self) -> Result<RateBounds> {
        let d = std::f64::consts::PI / 180.0;
        let b = RateBounds {
            p_min: self.p_dps[0] * d,
            p_max: self.p_dps[1] * d,
            q_min: self.q_dps[0] * d,
            q_max: self.q_dps[1] * d,
            r_min: self.r_dps[0] * d,
            r_max: self.r_dps[1] * d,
        };
        if b.p_min >= b.p_max || b.q_min >= b.q_max || b.r_min >= b.r_max {
            return Err(Error::ConfigParse("rate bounds need min < max".into()));
        }
        Ok(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn virtual_input_zero_error() {
        let gains = CasGains::default();
        let rates = Vector3::new(0.1, -0.2, 0.05);
        let cmd = RateCommand {
            p: 0.1,
            q: -0.2,
            r: 0.05,
        };
        assert_eq!(ndi_virtual_input(&cmd, rates, &gains), Vector3::zeros());
    }

    #[test]
    fn virtual_input_linear_scaling() {
        let gains = CasGains {
            kp: 2.0,
            kq: 2.0,
            kr: 2.0,
        };
        let cmd = RateCommand {
            p: 0.1,
            q: 0.0,
            r: 0.0,
        };
        let out = ndi_virtual_input(&cmd, Vector3::zeros(), &gains);
        assert_relative_eq!(out.x, 0.2);
        assert_eq!(out.y, 0.0);
        assert_eq!(out.z, 0.0);
    }

    #[test]
    fn virtual_input_elementwise() {
        let gains = CasGains {
            kp: 3.0,
            kq: 1.5,
            kr: 7.0,
        };
        let cmd = RateCommand {
            p: 0.4,
            q: -0.3,
            r: 0.2,
        };
        let rates = Vector3::new(0.1, 0.1, -0.1);
        let out = ndi_virtual_input(&cmd, rates, &gains);
        assert_relative_eq!(out.x, 3.0 * 0.3);
        assert_relative_eq!(out.y, 1.5 * -0.4);
        assert_relative_eq!(out.z, 7.0 * 0.3);
    }

    #[test]
    fn required_moments_zero_at_equilibrium() {
        let cfg = AircraftConfig::default();
        let tau = ndi_required_moments(Vector3::zeros(), Vector3::zeros(), 2.0e4, &cfg).unwrap();
        assert_eq!(tau, MomentCoeffs::default());
    }

    #[test]
    fn required_moments_matrix_algebra() {
        // ω = 0: τ_c = [q̄ S diag(b,c̄,b)]⁻¹ J ω̇_c.
        let cfg = AircraftConfig::default();
        let qbar = 3.0e4;
        let omega_dot = Vector3::new(0.5, -0.8, 0.2);
        let tau = ndi_required_moments(omega_dot, Vector3::zeros(), qbar, &cfg).unwrap();
        let demand = cfg.inertia() * omega_dot;
        let qs = qbar * cfg.wing_area;
        assert_relative_eq!(tau.cl, demand.x / (qs * cfg.span), max_relative = 1e-12);
        assert_relative_eq!(tau.cm, demand.y / (qs * cfg.chord), max_relative = 1e-12);
        assert_relative_eq!(tau.cn, demand.z / (qs * cfg.span), max_relative = 1e-12);
    }

    #[test]
    fn required_moments_close_the_loop() {
        // Pushing τ_c back through g(x) = J⁻¹ q̄ S diag(b,c̄,b) recovers
        // ω̇_c + J⁻¹(ω × Jω) to 1e-9.
        let cfg = AircraftConfig::default();
        let qbar = 4.2e4;
        let rates = Vector3::new(0.3, -0.1, 0.15);
        let omega_dot_c = Vector3::new(-0.4, 0.9, 0.1);
        let tau = ndi_required_moments(omega_dot_c, rates, qbar, &cfg).unwrap();
        let j = cfg.inertia();
        let jinv = j.try_inverse().unwrap();
        let qs = qbar * cfg.wing_area;
        let g = jinv * Matrix3::from_diagonal(&Vector3::new(qs * cfg.span, qs * cfg.chord, qs * cfg.span));
        let achieved = g * tau.as_vector() - jinv * rates.cross(&(j * rates));
        assert!((achieved - omega_dot_c).norm() < 1e-9);
    }

    #[test]
    fn degenerate_dynamic_pressure_rejected() {
        let cfg = AircraftConfig::default();
        assert!(matches!(
            ndi_required_moments(Vector3::zeros(), Vector3::zeros(), 0.0, &cfg),
            Err(Error::DegenerateDynamicPressure { .. })
        ));
    }

    #[test]
    fn effectivity_cm_row_has_zero_aileron_columns() {
        let cfg = AircraftConfig::default();
        let state = RigidBodyState {
            u: 200.0,
            w: 10.0,
            z_e: -1000.0,
            ..Default::default()
        };
        let phi = control_effectivity(&state, &SurfaceSet::default(), &cfg);
        assert_eq!(phi.matrix[(1, 2)], 0.0);
        assert_eq!(phi.matrix[(1, 3)], 0.0);
    }

    #[test]
    fn effectivity_matches_finite_difference() {
        let mut cfg = AircraftConfig::default();
        cfg.cg = 0.32; // exercise the cg-shift terms
        let state = RigidBodyState {
            u: 230.0,
            v: 5.0,
            w: 20.0,
            p: 0.1,
            q: 0.05,
            r: -0.02,
            z_e: -1500.0,
            ..Default::default()
        };
        let surfaces = SurfaceSet {
            right_tail: 0.03,
            left_tail: 0.02,
            right_aileron: 0.01,
            left_aileron: -0.015,
            rudder: 0.02,
        };
        let analytic = control_effectivity(&state, &surfaces, &cfg);
        let fd = control_effectivity_fd(&state, &surfaces, &cfg).unwrap();
        for i in 0..3 {
            for j in 0..NUM_SURFACES {
                let a = analytic.matrix[(i, j)];
                let f = fd.matrix[(i, j)];
                if a.abs() > 1e-12 {
                    assert_relative_eq!(a, f, max_relative = 1e-5);
                } else {
                    assert!(f.abs() < 1e-8, "({i},{j}): analytic 0 vs fd {f}");
                }
            }
        }
    }

    #[test]
    fn effectivity_full_rank_at_trim() {
        let cfg = AircraftConfig::default();
        let state = RigidBodyState {
            u: 220.0,
            w: 8.0,
            z_e: -1000.0,
            ..Default::default()
        };
        let phi = control_effectivity(&state, &SurfaceSet::default(), &cfg);
        assert_eq!(phi.rank, 3);
    }

    #[test]
    fn allocation_identity_at_zero_demand() {
        let cfg = AircraftConfig::default();
        let bank = ActuatorBank::new(&cfg);
        let state = RigidBodyState {
            u: 200.0,
            z_e: -1000.0,
            ..Default::default()
        };
        let current = SurfaceSet {
            right_tail: 0.05,
            left_tail: 0.04,
            right_aileron: -0.01,
            left_aileron: 0.02,
            rudder: 0.01,
        };
        let phi = control_effectivity(&state, &current, &cfg);
        let out = inca_allocate(&MomentCoeffs::default(), &phi, &current, &bank);
        assert_eq!(out.commanded, current);
        assert!(out.residual_inf < 1e-15);
    }

    #[test]
    fn allocation_orthonormal_rows() {
        let cfg = AircraftConfig::default();
        let bank = ActuatorBank::new(&cfg);
        let mut m = SMatrix::<f64, 3, NUM_SURFACES>::zeros();
        m[(0, 0)] = 1.0;
        m[(1, 1)] = 1.0;
        m[(2, 2)] = 1.0;
        let phi = Effectivity { matrix: m, rank: 3 };
        let dtau = MomentCoeffs {
            cl: 0.1,
            cm: 0.0,
            cn: 0.0,
        };
        let out = inca_allocate(&dtau, &phi, &SurfaceSet::default(), &bank);
        let got = out.commanded.as_array();
        assert_relative_eq!(got[0], 0.1, max_relative = 1e-12);
        for &x in &got[1..] {
            assert!(x.abs() < 1e-14);
        }
    }

    #[test]
    fn allocation_exact_and_minimum_norm_on_random_full_rank() {
        use rand::{Rng, SeedableRng};
        let cfg = AircraftConfig::default();
        let bank = ActuatorBank::new(&cfg);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let m = SMatrix::<f64, 3, NUM_SURFACES>::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let rank = matrix_rank(&m);
            if rank < 3 {
                continue;
            }
            let phi = Effectivity { matrix: m, rank };
            let dtau = MomentCoeffs {
                cl: rng.gen_range(-0.01..0.01),
                cm: rng.gen_range(-0.01..0.01),
                cn: rng.gen_range(-0.01..0.01),
            };
            let out = inca_allocate(&dtau, &phi, &SurfaceSet::default(), &bank);
            assert!(out.residual_inf < 1e-10, "residual {}", out.residual_inf);

            // Minimum norm among sampled feasible increments: perturb the
            // solution within the null space and check the norm never drops.
            let delta = SVector::<f64, NUM_SURFACES>::from_column_slice(
                &out.commanded.as_array(),
            );
            let norm = delta.norm();
            for _ in 0..20 {
                let probe = SVector::<f64, NUM_SURFACES>::from_fn(|_, _| rng.gen_range(-1.0..1.0));
                // Project the probe into the null space of m.
                let svd = m.svd(true, true);
                let pinv = svd.pseudo_inverse(1e-12).unwrap();
                let null_component = probe - pinv * (m * probe);
                if null_component.norm() < 1e-9 {
                    continue;
                }
                let alt = delta + null_component * 0.01;
                assert!(alt.norm() + 1e-12 >= norm);
            }
        }
    }

    #[test]
    fn allocation_incrementality_round_trip() {
        let cfg = AircraftConfig::default();
        let bank = ActuatorBank::new(&cfg);
        let state = RigidBodyState {
            u: 240.0,
            w: 12.0,
            z_e: -2000.0,
            ..Default::default()
        };
        let start = SurfaceSet {
            right_tail: 0.02,
            left_tail: 0.02,
            right_aileron: 0.0,
            left_aileron: 0.0,
            rudder: 0.0,
        };
        let phi = control_effectivity(&state, &start, &cfg);
        let dtau = MomentCoeffs {
            cl: 0.004,
            cm: -0.006,
            cn: 0.002,
        };
        let fwd = inca_allocate(&dtau, &phi, &start, &bank);
        let back = inca_allocate(
            &(MomentCoeffs::default() - dtau),
            &phi,
            &fwd.commanded,
            &bank,
        );
        let end = back.commanded.as_array();
        let orig = start.as_array();
        for i in 0..NUM_SURFACES {
            assert_relative_eq!(end[i], orig[i], epsilon = 1e-12);
        }
    }
}
