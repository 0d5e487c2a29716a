//! The (φ, θ, V_T)-gridded ECBF gain table and its trilinear lookup.
//!
//! File format (plain text, `#` comments allowed):
//!
//! ```text
//! phi_deg: -150 -100 -50 0 50 100 150
//! theta_deg: -60 -50 -40 -30 -20 -10
//! vt: 200 230 260 290 320 350
//! weights: 0.2 0.3 0.5
//! seed: 42
//! built: <free-form provenance string>
//! fail: <i_phi> <i_theta> <i_vt> <reason...>        (zero or more)
//! k2:
//! <n_phi · n_theta rows of n_vt values each>
//! ```
//!
//! Only k2 is stored; k1 = k2²/4 is implied by the critical-damping
//! structure. The table is row-major over (φ, θ, V_T) with V_T fastest.
//! Axes are strictly increasing; angles are degrees in the file and
//! radians in memory.

use std::fmt::Write as _;

use super::EcbfGains;
use crate::error::{Error, Result};

const DEG: f64 = std::f64::consts::PI / 180.0;

/// Provenance carried with a schedule.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScheduleMetadata {
    pub weights: [f64; 3],
    pub seed: u64,
    pub built: String,
    /// Design points where every candidate collided: (i_phi, i_theta,
    /// i_vt, reason).
    pub failures: Vec<(usize, usize, usize, String)>,
}

/// Gain table over bank angle (rad), pitch angle (rad), true airspeed
/// (m/s).
#[derive(Debug, Clone, PartialEq)]
pub struct GainSchedule {
    pub phi_axis: Vec<f64>,
    pub theta_axis: Vec<f64>,
    pub vt_axis: Vec<f64>,
    /// Row-major k2 over (φ, θ, V_T), V_T fastest.
    pub k2: Vec<f64>,
    pub metadata: ScheduleMetadata,
}

impl GainSchedule {
    /// Single-node schedule that returns the same gains everywhere.
    pub fn constant(gains: EcbfGains) -> Self {
        Self {
            phi_axis: vec![0.0],
            theta_axis: vec![-0.5],
            vt_axis: vec![250.0],
            k2: vec![gains.k2],
            metadata: ScheduleMetadata::default(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.phi_axis.len() * self.theta_axis.len() * self.vt_axis.len()
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.theta_axis.len() + j) * self.vt_axis.len() + k
    }

    /// Gains stored at one grid node.
    pub fn node(&self, i: usize, j: usize, k: usize) -> EcbfGains {
        EcbfGains::critically_damped(self.k2[self.index(i, j, k)])
    }

    /// Iterate all stored gain pairs.
    pub fn entries(&self) -> impl Iterator<Item = EcbfGains> + '_ {
        self.k2.iter().map(|&k2| EcbfGains::critically_damped(k2))
    }

    /// Axes strictly increasing, table complete, every entry a valid pair.
    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Error::Setup(msg);
        for (name, axis) in [
            ("phi", &self.phi_axis),
            ("theta", &self.theta_axis),
            ("vt", &self.vt_axis),
        ] {
            if axis.is_empty() {
                return Err(err(format!("schedule {name} axis is empty")));
            }
            if axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(err(format!("schedule {name} axis must be strictly increasing")));
            }
        }
        if self.k2.len() != self.node_count() {
            return Err(err(format!(
                "schedule table has {} entries, expected {}",
                self.k2.len(),
                self.node_count()
            )));
        }
        for gains in self.entries() {
            gains.validate()?;
        }
        Ok(())
    }

    /// Parse the plain-text schedule format.
    pub fn parse(text: &str) -> Result<Self> {
        let fmt = |line: usize, msg: String| Error::FileFormat {
            kind: "gain schedule",
            line,
            msg,
        };
        let mut phi = Vec::new();
        let mut theta = Vec::new();
        let mut vt = Vec::new();
        let mut k2 = Vec::new();
        let mut meta = ScheduleMetadata::default();
        let mut in_table = false;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let n = lineno + 1;
            if in_table {
                for tok in line.split_whitespace() {
                    let v: f64 = tok
                        .parse()
                        .map_err(|_| fmt(n, format!("bad k2 value `{tok}`")))?;
                    k2.push(v);
                }
                continue;
            }
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| fmt(n, "expected `key: values`".into()))?;
            let parse_floats = |s: &str| -> Result<Vec<f64>> {
                s.split_whitespace()
                    .map(|tok| {
                        tok.parse::<f64>()
                            .map_err(|_| fmt(n, format!("bad number `{tok}`")))
                    })
                    .collect()
            };
            match key.trim() {
                "phi_deg" => phi = parse_floats(rest)?.iter().map(|v| v * DEG).collect(),
                "theta_deg" => theta = parse_floats(rest)?.iter().map(|v| v * DEG).collect(),
                "vt" => vt = parse_floats(rest)?,
                "weights" => {
                    let w = parse_floats(rest)?;
                    if w.len() != 3 {
                        return Err(fmt(n, "weights needs exactly three values".into()));
                    }
                    meta.weights = [w[0], w[1], w[2]];
                }
                "seed" => {
                    meta.seed = rest
                        .trim()
                        .parse()
                        .map_err(|_| fmt(n, "bad seed".into()))?;
                }
                "built" => meta.built = rest.trim().to_string(),
                "fail" => {
                    let mut parts = rest.split_whitespace();
                    let mut idx = || -> Result<usize> {
                        parts
                            .next()
                            .ok_or_else(|| fmt(n, "fail needs three indices".into()))?
                            .parse()
                            .map_err(|_| fmt(n, "bad fail index".into()))
                    };
                    let (i, j, k) = (idx()?, idx()?, idx()?);
                    let reason = parts.collect::<Vec<_>>().join(" ");
                    meta.failures.push((i, j, k, reason));
                }
                "k2" => in_table = true,
                other => return Err(fmt(n, format!("unknown key `{other}`"))),
            }
        }

        let schedule = Self {
            phi_axis: phi,
            theta_axis: theta,
            vt_axis: vt,
            k2,
            metadata: meta,
        };
        schedule.validate().map_err(|e| Error::FileFormat {
            kind: "gain schedule",
            line: 0,
            msg: e.to_string(),
        })?;
        Ok(schedule)
    }

    /// Serialize to the plain-text schedule format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let axis = |vals: &[f64], scale: f64| {
            vals.iter()
                .map(|v| format!("{}", v * scale))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(out, "# adaptive ECBF gain schedule (k1 = k2^2/4 implied)");
        let _ = writeln!(out, "phi_deg: {}", axis(&self.phi_axis, 1.0 / DEG));
        let _ = writeln!(out, "theta_deg: {}", axis(&self.theta_axis, 1.0 / DEG));
        let _ = writeln!(out, "vt: {}", axis(&self.vt_axis, 1.0));
        let m = &self.metadata;
        let _ = writeln!(out, "weights: {} {} {}", m.weights[0], m.weights[1], m.weights[2]);
        let _ = writeln!(out, "seed: {}", m.seed);
        if !m.built.is_empty() {
            let _ = writeln!(out, "built: {}", m.built);
        }
        for (i, j, k, reason) in &m.failures {
            let _ = writeln!(out, "fail: {i} {j} {k} {reason}");
        }
        let _ = writeln!(out, "k2:");
        for i in 0..self.phi_axis.len() {
            for j in 0..self.theta_axis.len() {
                let row: Vec<String> = (0..self.vt_axis.len())
                    .map(|k| format!("{:.17e}", self.k2[self.index(i, j, k)]))
                    .collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
        out
    }
}

/// Cell index and interpolation weight for one axis, clamped to the grid.
fn axis_weight(axis: &[f64], x: f64) -> (usize, usize, f64) {
    if axis.len() == 1 {
        return (0, 0, 0.0);
    }
    let x = x.clamp(axis[0], axis[axis.len() - 1]);
    let hi = axis.partition_point(|&v| v < x).min(axis.len() - 1).max(1);
    let lo = hi - 1;
    let span = axis[hi] - axis[lo];
    let t = if span > 0.0 { (x - axis[lo]) / span } else { 0.0 };
    (lo, hi, t.clamp(0.0, 1.0))
}

/// Trilinear interpolation of k2 over (φ, θ, V_T) with out-of-grid queries
/// clamped to the boundary, then re-projection onto the critical-damping
/// manifold (interpolate k2, recompute k1 = k2²/4).
pub fn lookup_gains(schedule: &GainSchedule, phi: f64, theta: f64, vt: f64) -> EcbfGains {
    let (i0, i1, ti) = axis_weight(&schedule.phi_axis, phi);
    let (j0, j1, tj) = axis_weight(&schedule.theta_axis, theta);
    let (k0, k1, tk) = axis_weight(&schedule.vt_axis, vt);

    let at = |i: usize, j: usize, k: usize| schedule.k2[schedule.index(i, j, k)];
    let lerp = |a: f64, b: f64, t: f64| a + (b - a) * t;

    let c00 = lerp(at(i0, j0, k0), at(i1, j0, k0), ti);
    let c10 = lerp(at(i0, j1, k0), at(i1, j1, k0), ti);
    let c01 = lerp(at(i0, j0, k1), at(i1, j0, k1), ti);
    let c11 = lerp(at(i0, j1, k1), at(i1, j1, k1), ti);
    let c0 = lerp(c00, c10, tj);
    let c1 = lerp(c01, c11, tj);
    let k2 = lerp(c0, c1, tk);

    EcbfGains::critically_damped(k2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid_2x2x2() -> GainSchedule {
        GainSchedule {
            phi_axis: vec![-1.0, 1.0],
            theta_axis: vec![-1.0, -0.2],
            vt_axis: vec![200.0, 300.0],
            // V_T fastest: (φ0θ0: 4,8), (φ0θ1: 6,10), (φ1θ0: 5,9), (φ1θ1: 7,11)
            k2: vec![4.0, 8.0, 6.0, 10.0, 5.0, 9.0, 7.0, 11.0],
            metadata: ScheduleMetadata::default(),
        }
    }

    #[test]
    fn node_identity() {
        let s = grid_2x2x2();
        let g = lookup_gains(&s, -1.0, -1.0, 300.0);
        assert_eq!(g.k2, 8.0);
        assert_eq!(g.k1, 16.0);
        let g = lookup_gains(&s, 1.0, -0.2, 200.0);
        assert_eq!(g.k2, 7.0);
    }

    #[test]
    fn midpoint_along_vt_is_arithmetic_mean() {
        let s = grid_2x2x2();
        let g = lookup_gains(&s, -1.0, -1.0, 250.0);
        assert_relative_eq!(g.k2, 6.0);
        assert_relative_eq!(g.k1, 9.0); // (6)²/4, not the mean of k1 values
    }

    #[test]
    fn out_of_grid_clamps_to_boundary() {
        let s = grid_2x2x2();
        let inside = lookup_gains(&s, -1.0, -1.0, 200.0);
        let outside = lookup_gains(&s, -5.0, -3.0, 50.0);
        assert_eq!(inside.k2, outside.k2);
    }

    #[test]
    fn interpolation_stays_within_surrounding_envelope() {
        use rand::{Rng, SeedableRng};
        let s = grid_2x2x2();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let phi = rng.gen_range(-1.0..1.0);
            let theta = rng.gen_range(-1.0..-0.2);
            let vt = rng.gen_range(200.0..300.0);
            let g = lookup_gains(&s, phi, theta, vt);
            let lo = s.k2.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = s.k2.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(g.k2 >= lo - 1e-12 && g.k2 <= hi + 1e-12);
            g.validate().unwrap();
        }
    }

    #[test]
    fn single_node_schedule_is_constant() {
        let s = GainSchedule::constant(EcbfGains::critically_damped(6.0));
        for (phi, theta, vt) in [(0.0, -0.3, 220.0), (2.0, -1.0, 500.0), (-2.0, -0.1, 10.0)] {
            assert_eq!(lookup_gains(&s, phi, theta, vt).k2, 6.0);
        }
    }

    #[test]
    fn round_trip_through_text() {
        let mut s = grid_2x2x2();
        s.metadata.weights = [0.2, 0.3, 0.5];
        s.metadata.seed = 99;
        s.metadata.built = "test".into();
        s.metadata.failures.push((0, 1, 0, "all candidates collided".into()));
        let text = s.to_text();
        let parsed = GainSchedule::parse(&text).unwrap();
        assert_eq!(parsed, s);
    }

    #[test]
    fn malformed_schedule_is_rejected() {
        for bad in [
            "phi_deg: 0\ntheta_deg: -30\nvt: 200\nk2:\n", // missing table
            "phi_deg: 0 0\ntheta_deg: -30\nvt: 200\nk2:\n4 4", // non-increasing axis
            "nonsense line without a colon",
            "phi_deg: 0\ntheta_deg: -30\nvt: 200\nk2:\nnot_a_number",
            "phi_deg: 0\ntheta_deg: -30\nvt: 200\nk2:\n1.0", // k1 floor violated
        ] {
            assert!(GainSchedule::parse(bad).is_err(), "accepted: {bad}");
        }
    }
}
