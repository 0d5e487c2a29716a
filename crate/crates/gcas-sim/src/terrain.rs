//! Terrain elevation: a synthetic smooth surface generator, a gridded
//! sampler with bilinear interpolation, and the rectangular forward scan
//! that produces the terrain-height input for the collision filter.
//!
//! Grid file format (plain text, `#` comments allowed):
//!
//! ```text
//! x: <strictly increasing sample coordinates, m>
//! y: <strictly increasing sample coordinates, m>
//! oob: <constant height returned outside the grid, m>
//! h:
//! <one row of len(y) heights per x sample>
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Gridded terrain heights with a constant out-of-bounds policy.
#[derive(Debug, Clone, PartialEq)]
pub struct TerrainGrid {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Row-major heights, x-major: `heights[i * y.len() + j]`.
    pub heights: Vec<f64>,
    /// Height reported outside the grid.
    pub out_of_bounds: f64,
}

/// Rectangular scan footprint, oriented along the heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPattern {
    /// Distance scanned ahead of the aircraft (m).
    pub ahead: f64,
    /// Lateral half-width to each side (m).
    pub half_width: f64,
    /// Sampling resolution (m).
    pub resolution: f64,
}

impl Default for ScanPattern {
    fn default() -> Self {
        Self {
            ahead: 750.0,
            half_width: 150.0,
            resolution: 25.0,
        }
    }
}

impl ScanPattern {
    pub fn validate(&self) -> Result<()> {
        if self.ahead > 0.0 && self.half_width > 0.0 && self.resolution > 0.0 {
            Ok(())
        } else {
            Err(Error::Setup(
                "scan pattern needs positive ahead, half_width, resolution".into(),
            ))
        }
    }
}

/// The smooth two-dimensional test surface:
///
/// ```text
/// p(x̂,ŷ) = 3(1-x̂)²·e^(-x̂²-(ŷ+1)²)
///          - 10(x̂/5 - x̂³ - ŷ⁵)·e^(-x̂²-ŷ²)
///          - ⅓·e^(-(x̂+1)²-ŷ²)
/// ```
pub fn peaks_function(xh: f64, yh: f64) -> f64 {
    3.0 * (1.0 - xh).powi(2) * (-xh * xh - (yh + 1.0).powi(2)).exp()
        - 10.0 * (xh / 5.0 - xh.powi(3) - yh.powi(5)) * (-xh * xh - yh * yh).exp()
        - (1.0 / 3.0) * (-(xh + 1.0).powi(2) - yh * yh).exp()
}

/// Synthesize a terrain grid from the peaks surface. Coordinates are
/// mapped to the surface's natural domain by the horizontal scale
/// (`x̂ = x / horizontal_scale`), heights scaled by `vertical_scale` and
/// floored at zero (terrain cannot sit below the ground plane).
pub fn peaks_terrain(
    x_range: (f64, f64),
    y_range: (f64, f64),
    resolution: f64,
    horizontal_scale: f64,
    vertical_scale: f64,
) -> TerrainGrid {
    let axis = |range: (f64, f64)| -> Vec<f64> {
        let span = range.1 - range.0;
        let n = ((span / resolution).ceil() as usize).max(1) + 1;
        (0..n)
            .map(|i| range.0 + span * i as f64 / (n - 1) as f64)
            .collect()
    };
    let x = axis(x_range);
    let y = axis(y_range);
    let mut heights = Vec::with_capacity(x.len() * y.len());
    for &xi in &x {
        for &yj in &y {
            let h = vertical_scale * peaks_function(xi / horizontal_scale, yj / horizontal_scale);
            heights.push(h.max(0.0));
        }
    }
    TerrainGrid {
        x,
        y,
        heights,
        out_of_bounds: 0.0,
    }
}

impl TerrainGrid {
    /// Flat terrain at a constant height.
    pub fn flat(height: f64) -> Self {
        Self {
            x: vec![-1.0, 1.0],
            y: vec![-1.0, 1.0],
            heights: vec![height; 4],
            out_of_bounds: height,
        }
    }

    pub fn node(&self, i: usize, j: usize) -> f64 {
        self.heights[i * self.y.len() + j]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, axis) in [("x", &self.x), ("y", &self.y)] {
            if axis.len() < 2 {
                return Err(Error::Setup(format!("terrain {name} axis needs ≥ 2 samples")));
            }
            if axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Setup(format!(
                    "terrain {name} axis must be strictly increasing"
                )));
            }
        }
        if self.heights.len() != self.x.len() * self.y.len() {
            return Err(Error::Setup(format!(
                "terrain has {} heights, expected {}",
                self.heights.len(),
                self.x.len() * self.y.len()
            )));
        }
        if !self.heights.iter().all(|h| h.is_finite()) || !self.out_of_bounds.is_finite() {
            return Err(Error::Setup("terrain heights must be finite".into()));
        }
        Ok(())
    }

    /// Bilinear interpolation inside the grid; the configured constant
    /// outside.
    pub fn sample_height(&self, x: f64, y: f64) -> f64 {
        if x < self.x[0] || x > self.x[self.x.len() - 1] || y < self.y[0]
            || y > self.y[self.y.len() - 1]
        {
            return self.out_of_bounds;
        }
        let cell = |axis: &[f64], v: f64| -> (usize, f64) {
            let hi = axis.partition_point(|&a| a < v).min(axis.len() - 1).max(1);
            let lo = hi - 1;
            let t = (v - axis[lo]) / (axis[hi] - axis[lo]);
            (lo, t.clamp(0.0, 1.0))
        };
        let (i, tx) = cell(&self.x, x);
        let (j, ty) = cell(&self.y, y);
        let h00 = self.node(i, j);
        let h01 = self.node(i, j + 1);
        let h10 = self.node(i + 1, j);
        let h11 = self.node(i + 1, j + 1);
        h00 * (1.0 - tx) * (1.0 - ty) + h10 * tx * (1.0 - ty) + h01 * (1.0 - tx) * ty
            + h11 * tx * ty
    }

    /// Parse the plain-text grid format.
    pub fn parse(text: &str) -> Result<Self> {
        let fmt = |line: usize, msg: String| Error::FileFormat {
            kind: "terrain grid",
            line,
            msg,
        };
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut oob = 0.0;
        let mut heights = Vec::new();
        let mut in_table = false;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let n = lineno + 1;
            if in_table {
                for tok in line.split_whitespace() {
                    heights.push(
                        tok.parse::<f64>()
                            .map_err(|_| fmt(n, format!("bad height `{tok}`")))?,
                    );
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
                "x" => x = parse_floats(rest)?,
                "y" => y = parse_floats(rest)?,
                "oob" => {
                    oob = rest
                        .trim()
                        .parse()
                        .map_err(|_| fmt(n, "bad oob value".into()))?;
                }
                "h" => in_table = true,
                other => return Err(fmt(n, format!("unknown key `{other}`"))),
            }
        }
        let grid = Self {
            x,
            y,
            heights,
            out_of_bounds: oob,
        };
        grid.validate().map_err(|e| Error::FileFormat {
            kind: "terrain grid",
            line: 0,
            msg: e.to_string(),
        })?;
        Ok(grid)
    }

    /// Serialize to the plain-text grid format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(out, "# terrain grid");
        let _ = writeln!(out, "x: {}", join(&self.x));
        let _ = writeln!(out, "y: {}", join(&self.y));
        let _ = writeln!(out, "oob: {}", self.out_of_bounds);
        let _ = writeln!(out, "h:");
        for i in 0..self.x.len() {
            let row: Vec<String> = (0..self.y.len())
                .map(|j| format!("{}", self.node(i, j)))
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

/// Forward sample offsets: multiples of the resolution from the aircraft
/// footprint out to `ahead`, far edge included. Anchoring at zero keeps a
/// smaller rectangle's lattice a subset of a larger one's (for
/// resolution-commensurate sizes), which makes `scan_max` monotone in the
/// pattern size.
fn forward_samples(length: f64, resolution: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let s = k as f64 * resolution;
        if s >= length {
            break;
        }
        out.push(s);
        k += 1;
    }
    out.push(length);
    out
}

/// Lateral sample offsets: multiples of the resolution outward from the
/// centerline, both edges included.
fn lateral_samples(half_width: f64, resolution: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut k = 1usize;
    loop {
        let l = k as f64 * resolution;
        if l >= half_width {
            break;
        }
        out.push(l);
        out.push(-l);
        k += 1;
    }
    out.push(half_width);
    out.push(-half_width);
    out
}

/// Maximum sampled height over the rectangle extending `ahead` along the
/// heading and ±`half_width` laterally, the aircraft's own footprint
/// included.
pub fn scan_max(
    grid: &TerrainGrid,
    position: (f64, f64),
    heading: f64,
    pattern: &ScanPattern,
) -> f64 {
    let (spsi, cpsi) = heading.sin_cos();
    let mut max_h = f64::NEG_INFINITY;
    for s in forward_samples(pattern.ahead, pattern.resolution) {
        for lateral in lateral_samples(pattern.half_width, pattern.resolution) {
            let x = position.0 + s * cpsi - lateral * spsi;
            let y = position.1 + s * spsi + lateral * cpsi;
            max_h = max_h.max(grid.sample_height(x, y));
        }
    }
    max_h
}
