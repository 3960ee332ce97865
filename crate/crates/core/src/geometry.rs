//! Hexagonal macrocell geometry, small-cell placement and gateway placement.
//!
//! The macrocell is a regular hexagon with one vertex pointing straight up:
//! vertices sit at 30°, 90°, 150°, 210°, 270° and 330° from the center, so
//! the left and right edges are vertical.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Relative slack used by [`MacrocellRegion::contains`] so that points
/// computed from trigonometry (vertices, edge points) count as inside.
const BOUNDARY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const ORIGIN: Point2D = Point2D { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Point at `radius` from `self` in direction `angle_deg` (counter-clockwise from +x).
    pub fn polar_offset(&self, radius: f64, angle_deg: f64) -> Point2D {
        let a = angle_deg.to_radians();
        Point2D::new(self.x + radius * a.cos(), self.y + radius * a.sin())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacrocellRegion {
    /// Center-to-vertex distance in meters.
    pub circumradius: f64,
    pub center: Point2D,
}

impl MacrocellRegion {
    pub const VERTEX_ANGLES_DEG: [f64; 6] = [30.0, 90.0, 150.0, 210.0, 270.0, 330.0];

    pub fn new(circumradius: f64, center: Point2D) -> Result<Self> {
        if !(circumradius > 0.0 && circumradius.is_finite()) {
            return Err(SimError::invalid(
                "macro_radius",
                "must be positive and finite",
            ));
        }
        if !center.is_finite() {
            return Err(SimError::invalid("center", "coordinates must be finite"));
        }
        Ok(Self {
            circumradius,
            center,
        })
    }

    /// `(3√3/2)·R²`
    pub fn area(&self) -> f64 {
        1.5 * 3f64.sqrt() * self.circumradius * self.circumradius
    }

    pub fn vertex(&self, angle_deg: f64) -> Point2D {
        self.center.polar_offset(self.circumradius, angle_deg)
    }

    pub fn vertices(&self) -> [Point2D; 6] {
        Self::VERTEX_ANGLES_DEG.map(|a| self.vertex(a))
    }

    /// Closed-region membership test (boundary counts as inside).
    pub fn contains(&self, p: &Point2D) -> bool {
        let r = self.circumradius;
        let slack = BOUNDARY_EPS * r;
        let dx = (p.x - self.center.x).abs();
        let dy = (p.y - self.center.y).abs();
        // Vertical edges at |x| = R·√3/2; slanted edges satisfy |y| + |x|/√3 = R.
        dx <= 0.5 * 3f64.sqrt() * r + slack && dy + dx / 3f64.sqrt() <= r + slack
    }
}

/// Free-function form of [`MacrocellRegion::contains`].
pub fn hex_contains(p: &Point2D, region: &MacrocellRegion) -> bool {
    region.contains(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PlacementMode {
    Uniform,
    /// Sequential rejection sampling with a minimum pairwise separation.
    Hardcore {
        min_separation: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementPolicy {
    pub mode: PlacementMode,
    /// Consecutive rejections tolerated before giving up (hardcore only).
    pub max_rejections: usize,
}

impl PlacementPolicy {
    pub const DEFAULT_MAX_REJECTIONS: usize = 10_000;

    pub fn uniform() -> Self {
        Self {
            mode: PlacementMode::Uniform,
            max_rejections: Self::DEFAULT_MAX_REJECTIONS,
        }
    }

    pub fn hardcore(min_separation: f64) -> Self {
        Self {
            mode: PlacementMode::Hardcore { min_separation },
            max_rejections: Self::DEFAULT_MAX_REJECTIONS,
        }
    }
}

impl Default for PlacementPolicy {
    fn default() -> Self {
        Self::uniform()
    }
}

/// Uniform point in the hexagon by rejection from its bounding box (acceptance 3/4).
fn uniform_point<R: Rng + ?Sized>(region: &MacrocellRegion, rng: &mut R) -> Point2D {
    let half_w = 0.5 * 3f64.sqrt() * region.circumradius;
    let half_h = region.circumradius;
    loop {
        let p = Point2D::new(
            region.center.x + rng.gen_range(-half_w..=half_w),
            region.center.y + rng.gen_range(-half_h..=half_h),
        );
        if region.contains(&p) {
            return p;
        }
    }
}

/// Places exactly `n` small-cell BSs inside `region`.
///
/// Uniform mode draws i.i.d. uniform points, i.e. a Poisson point process
/// conditioned on its count. Hardcore mode accepts a candidate only if it
/// keeps distance `>= min_separation` from every point already placed.
pub fn sample_bs_positions<R: Rng + ?Sized>(
    n: usize,
    region: &MacrocellRegion,
    policy: &PlacementPolicy,
    rng: &mut R,
) -> Result<Vec<Point2D>> {
    let mut points = Vec::with_capacity(n);
    match policy.mode {
        PlacementMode::Uniform => {
            points.extend((0..n).map(|_| uniform_point(region, rng)));
        }
        PlacementMode::Hardcore { min_separation } => {
            if !(min_separation >= 0.0) {
                return Err(SimError::invalid("d_min", "must be >= 0"));
            }
            let mut rejections = 0;
            while points.len() < n {
                let candidate = uniform_point(region, rng);
                if points
                    .iter()
                    .all(|p: &Point2D| p.distance(&candidate) >= min_separation)
                {
                    points.push(candidate);
                    rejections = 0;
                } else {
                    rejections += 1;
                    if rejections >= policy.max_rejections {
                        return Err(SimError::PlacementInfeasible {
                            placed: points.len(),
                            requested: n,
                            rejections,
                        });
                    }
                }
            }
        }
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "positions", rename_all = "snake_case")]
pub enum GatewayConfig {
    /// One gateway co-located with the macrocell BS at the hexagon center.
    SingleCenter,
    /// Three gateways at the 90°, 210° and 330° vertices.
    TopVertices,
    Explicit(Vec<Point2D>),
}

impl Default for GatewayConfig {
    fn default() -> Self {
        GatewayConfig::TopVertices
    }
}

pub fn place_gateways(config: &GatewayConfig, region: &MacrocellRegion) -> Result<Vec<Point2D>> {
    match config {
        GatewayConfig::SingleCenter => Ok(vec![region.center]),
        GatewayConfig::TopVertices => Ok([90.0, 210.0, 330.0]
            .iter()
            .map(|&a| region.vertex(a))
            .collect()),
        GatewayConfig::Explicit(positions) => {
            if positions.is_empty() {
                return Err(SimError::invalid("gateways", "explicit list is empty"));
            }
            if let Some(p) = positions.iter().find(|p| !region.contains(p)) {
                return Err(SimError::GatewayOutsideRegion { x: p.x, y: p.y });
            }
            Ok(positions.clone())
        }
    }
}
