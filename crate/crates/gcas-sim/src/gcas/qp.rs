//! Closed-form solver for the 1-D safety-filter QP shared by the
//! ground-collision and envelope-protection filters:
//!
//! ```text
//! minimize   ½ (u - u_des)²
//! subject to a·u + c ≥ 0,   lo ≤ u ≤ hi
//! ```
//!
//! The linear constraint defines a half-line `u ≥ -c/a` (a > 0) or
//! `u ≤ -c/a` (a < 0); the minimizer is `u_des` projected onto the
//! intersection of the half-line with the box. An empty intersection
//! returns the box endpoint minimizing the constraint violation with
//! `feasible = false`. When `|a|` is negligible the constraint is
//! input-independent: it either holds for every `u` in the box or for
//! none, and the desired command is clamped either way.

use super::SafetyFilterResult;

/// Commands closer than this to the clamped request count as passthrough
/// (the exact-inequality trigger is numerically fragile).
pub const ACTIVATION_THRESHOLD: f64 = 1e-6;

/// Input gains smaller than this are treated as zero.
pub const INPUT_GAIN_EPS: f64 = 1e-6;

pub fn solve_scalar_qp(u_des: f64, a: f64, c: f64, lo: f64, hi: f64) -> SafetyFilterResult {
    debug_assert!(lo < hi);
    let clamped_des = u_des.clamp(lo, hi);

    let (command, feasible) = if a.abs() < INPUT_GAIN_EPS {
        (clamped_des, c >= 0.0)
    } else {
        let u_star = -c / a;
        if a > 0.0 {
            if u_star > hi {
                (hi, false)
            } else {
                (clamped_des.max(u_star.max(lo)), true)
            }
        } else if u_star < lo {
            (lo, false)
        } else {
            (clamped_des.min(u_star.min(hi)), true)
        }
    };

    SafetyFilterResult {
        command,
        active: (command - clamped_des).abs() > ACTIVATION_THRESHOLD,
        feasible,
        margin: a * command + c,
    }
}
