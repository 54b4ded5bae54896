//! Reference curves inside a disk container: spectral curve representation,
//! nearest-point projection, tubular neighborhoods, level functions and the
//! second-normal-bundle distance between curves.

mod curve;
pub mod io;
mod level;
mod metric;
mod tube;

pub use curve::{CurveSpec, Projection, ReferenceCurve};
pub use level::{cutoff, LevelFunction, CUTOFF_SLOPE_BOUND};
pub use metric::{bundle_distance, BundleOrder};
pub use tube::{tube_and_ball, TubeData};

use nalgebra::Vector2;
use thiserror::Error;

pub type Point = Vector2<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("curve is not simple: segments {0} and {1} intersect")]
    SelfIntersection(usize, usize),
    #[error("curve leaves the container (max radius {max_radius:.6} >= {container_radius:.6})")]
    OutsideContainer { max_radius: f64, container_radius: f64 },
    #[error("projection of ({x:.6}, {y:.6}) did not converge")]
    NotConverged { x: f64, y: f64 },
    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),
    #[error("invalid curve description: {0}")]
    InvalidSpec(String),
}

/// Disk-shaped container `Ω` centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Container {
    radius: f64,
}

impl Container {
    pub fn disk(radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::InvalidSpec(format!(
                "container radius must be positive, got {radius}"
            )));
        }
        Ok(Self { radius })
    }

    pub fn unit() -> Self {
        Self { radius: 1.0 }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn center(&self) -> Point {
        Point::zeros()
    }

    /// Distance from `x` to the wall, positive inside.
    pub fn clearance(&self, x: &Point) -> f64 {
        self.radius - x.norm()
    }
}

impl Default for Container {
    fn default() -> Self {
        Self::unit()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn centered(radius: f64) -> Self {
        Self { center: Point::zeros(), radius }
    }
}
