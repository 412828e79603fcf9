//! Two-user single-antenna broadcast and multiple-access rate region
//! boundaries, NOMA versus OMA.
//!
//! All SNRs are linear (dB conversion is the CLI's job). The default OMA
//! convention reallocates power across the orthogonal time/bandwidth share
//! (`p / tau` inside the log); a fixed-power variant is available behind
//! [`OmaConvention::FixedPower`].

use crate::error::{NgmaError, Result};

/// Parameters of a two-user SISO region sweep: linear receive SNRs at full
/// unit power, the power budget, and the sweep resolution.
#[derive(Debug, Clone, Copy)]
pub struct RegionSpec {
    pub snr_1: f64,
    pub snr_2: f64,
    pub power_budget: f64,
    pub grid_points: usize,
}

/// Default sweep resolution: sub-0.1% boundary spacing at negligible cost.
pub const DEFAULT_GRID_POINTS: usize = 1001;

impl RegionSpec {
    pub fn new(snr_1: f64, snr_2: f64, power_budget: f64, grid_points: usize) -> Result<Self> {
        if !(snr_1 > 0.0) || !(snr_2 > 0.0) || !(power_budget > 0.0) {
            return Err(NgmaError::InvalidConfig(
                "SNRs and power budget must be strictly positive".into(),
            ));
        }
        if grid_points < 2 {
            return Err(NgmaError::InvalidConfig("grid_points must be >= 2".into()));
        }
        Ok(Self {
            snr_1,
            snr_2,
            power_budget,
            grid_points,
        })
    }
}

/// How the OMA baseline treats transmit power across the orthogonal share.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OmaConvention {
    /// Power reallocated over the active fraction (`p / tau` inside the log);
    /// makes OMA tangent to the MAC sum-capacity face.
    #[default]
    PowerReallocation,
    /// Power held fixed regardless of the share.
    FixedPower,
}

/// Ordered list of `(R1, R2)` boundary points, non-increasing in `R2` as `R1`
/// grows.
#[derive(Debug, Clone)]
pub struct RegionBoundary {
    pub points: Vec<(f64, f64)>,
}

impl RegionBoundary {
    /// Largest `R2` on the boundary at abscissa `r1`, by linear interpolation
    /// between adjacent boundary points. Returns 0 beyond the right edge.
    pub fn r2_at(&self, r1: f64) -> f64 {
        let pts = &self.points;
        if pts.is_empty() {
            return 0.0;
        }
        if r1 <= pts[0].0 {
            return pts[0].1;
        }
        for w in pts.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if r1 <= x1 {
                if x1 == x0 {
                    return y0.max(y1);
                }
                let t = (r1 - x0) / (x1 - x0);
                return y0 + t * (y1 - y0);
            }
        }
        0.0
    }

    /// Weak-dominance slack of `(r1, r2)` against this boundary: non-negative
    /// when the point is inside the region it bounds (up to concavity of the
    /// boundary between grid points).
    pub fn containment_slack(&self, r1: f64, r2: f64) -> f64 {
        self.r2_at(r1) - r2
    }
}

fn grid(points: usize) -> impl Iterator<Item = f64> {
    let last = (points - 1) as f64;
    (0..points).map(move |i| i as f64 / last)
}

/// Superposition-coding boundary of the two-user degraded BC: user 1 (the
/// stronger) cancels user 2's signal, user 2 treats user 1's as noise.
pub fn bc_noma_boundary(spec: &RegionSpec) -> RegionBoundary {
    let (g1, g2) = if spec.snr_1 >= spec.snr_2 {
        (spec.snr_1, spec.snr_2)
    } else {
        (spec.snr_2, spec.snr_1)
    };
    let p = spec.power_budget;
    let points = grid(spec.grid_points)
        .map(|t| {
            let p1 = t * p;
            let p2 = p - p1;
            let r1 = (1.0 + p1 * g1).log2();
            let r2 = (1.0 + p2 * g2 / (p1 * g2 + 1.0)).log2();
            (r1, r2)
        })
        .collect();
    RegionBoundary { points }
}

/// Pareto frontier of the orthogonal-share BC baseline over a 2-D grid of
/// time share and power split.
pub fn bc_oma_boundary(spec: &RegionSpec, convention: OmaConvention) -> RegionBoundary {
    let p = spec.power_budget;
    let mut pts = Vec::with_capacity(spec.grid_points * spec.grid_points);
    for tau in grid(spec.grid_points) {
        for split in grid(spec.grid_points) {
            let p1 = split * p;
            let p2 = p - p1;
            pts.push(oma_pair(tau, p1, p2, spec.snr_1, spec.snr_2, convention));
        }
    }
    RegionBoundary {
        points: pareto_frontier(pts),
    }
}

fn oma_pair(tau: f64, p1: f64, p2: f64, g1: f64, g2: f64, convention: OmaConvention) -> (f64, f64) {
    let share = |t: f64, pk: f64, gk: f64| -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let power = match convention {
            OmaConvention::PowerReallocation => pk / t,
            OmaConvention::FixedPower => pk,
        };
        t * (1.0 + power * gk).log2()
    };
    (share(tau, p1, g1), share(1.0 - tau, p2, g2))
}

/// Upper-right Pareto frontier of a point cloud, sorted by increasing `R1`.
fn pareto_frontier(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then(b.1.partial_cmp(&a.1).unwrap())
    });
    let mut frontier: Vec<(f64, f64)> = Vec::new();
    let mut best_r2 = f64::NEG_INFINITY;
    for (r1, r2) in pts {
        if r2 > best_r2 {
            frontier.push((r1, r2));
            best_r2 = r2;
        }
    }
    frontier.reverse();
    frontier
}

/// Corner points of the two-user MAC pentagon at full per-user power: at each
/// corner one stream is decoded first (with the other as interference) and
/// the other is decoded clean.
pub fn mac_corners(spec: &RegionSpec) -> ((f64, f64), (f64, f64)) {
    let p = spec.power_budget;
    let (a1, a2) = (spec.snr_1 * p, spec.snr_2 * p);
    // corner A: s_1 decoded first
    let corner_a = ((1.0 + a1 / (a2 + 1.0)).log2(), (1.0 + a2).log2());
    // corner B: s_2 decoded first
    let corner_b = ((1.0 + a1).log2(), (1.0 + a2 / (a1 + 1.0)).log2());
    (corner_a, corner_b)
}

/// Full MAC pentagon boundary: the `R2 = C2` face up to corner A, the
/// time-sharing (sum-capacity) segment from A to B, and the `R1 = C1` face
/// down from corner B.
pub fn mac_noma_boundary(spec: &RegionSpec) -> RegionBoundary {
    let ((a1, a2), (b1, b2)) = mac_corners(spec);
    let segment = |from: (f64, f64), to: (f64, f64)| {
        let n = spec.grid_points;
        grid(n).map(move |t| (from.0 + t * (to.0 - from.0), from.1 + t * (to.1 - from.1)))
    };
    let mut points: Vec<(f64, f64)> = Vec::new();
    points.extend(segment((0.0, a2), (a1, a2)));
    points.extend(segment((a1, a2), (b1, b2)));
    points.extend(segment((b1, b2), (b1, 0.0)));
    RegionBoundary { points }
}

/// Orthogonal (FDMA-style) MAC baseline: resource split `alpha`, per-user
/// power caps.
pub fn mac_oma_boundary(spec: &RegionSpec, convention: OmaConvention) -> RegionBoundary {
    let p = spec.power_budget;
    let points = grid(spec.grid_points)
        .map(|alpha| oma_pair(alpha, p, p, spec.snr_1, spec.snr_2, convention))
        .collect();
    RegionBoundary { points }
}
