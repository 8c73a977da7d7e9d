//! Circles and integer bounding boxes shared by the localizer, the
//! annotation store and the evaluation metrics.
//!
//! Continuous coordinates put the centre of pixel `(i, j)` at
//! `(i + 0.5, j + 0.5)`, so a box `(x, y, w, h)` covers the continuous
//! rectangle `[x, x + w) × [y, y + h)`.

use serde::{Deserialize, Serialize};

/// A circle in continuous pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl Circle {
    pub fn new(cx: f64, cy: f64, r: f64) -> Self {
        Self { cx, cy, r }
    }

    /// Whether the continuous point lies inside or on the circle.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let dx = x - self.cx;
        let dy = y - self.cy;
        dx * dx + dy * dy <= self.r * self.r
    }

    /// Whether any part of `b` lies within the circle.
    pub fn intersects_box(&self, b: &BoundingBox) -> bool {
        let nx = self.cx.clamp(b.x as f64, b.right() as f64);
        let ny = self.cy.clamp(b.y as f64, b.bottom() as f64);
        self.contains(nx, ny)
    }
}

/// Axis-aligned integer box: top-left corner plus width and height.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl BoundingBox {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Self { x, y, w, h }
    }

    /// Builds a box from half-open corner coordinates, returning `None`
    /// when the extent is empty.
    pub fn from_corners(x0: u32, y0: u32, x1: u32, y1: u32) -> Option<Self> {
        (x1 > x0 && y1 > y0).then(|| Self::new(x0, y0, x1 - x0, y1 - y0))
    }

    pub fn is_valid(&self) -> bool {
        self.w > 0 && self.h > 0
    }

    pub fn right(&self) -> u64 {
        self.x as u64 + self.w as u64
    }

    pub fn bottom(&self) -> u64 {
        self.y as u64 + self.h as u64
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    pub fn center(&self) -> (f64, f64) {
        (
            self.x as f64 + self.w as f64 / 2.0,
            self.y as f64 + self.h as f64 / 2.0,
        )
    }

    pub fn intersection_area(&self, other: &BoundingBox) -> u64 {
        let x0 = (self.x as u64).max(other.x as u64);
        let y0 = (self.y as u64).max(other.y as u64);
        let x1 = self.right().min(other.right());
        let y1 = self.bottom().min(other.bottom());
        x1.saturating_sub(x0) * y1.saturating_sub(y0)
    }

    pub fn union_area(&self, other: &BoundingBox) -> u64 {
        self.area() + other.area() - self.intersection_area(other)
    }

    /// True when the box lies inside a `width × height` image.
    pub fn fits_within(&self, width: u32, height: u32) -> bool {
        self.right() <= width as u64 && self.bottom() <= height as u64
    }
}
