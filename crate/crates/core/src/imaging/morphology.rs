//! Binary erosion and dilation with flat, symmetric structuring elements.
//!
//! Pixels outside the mask are background for both operations. Each element
//! is stored as one horizontal run per row offset, and run membership is
//! tested with per-row prefix counts, so the cost is `O(N * (2r + 1))`
//! independent of the element's area.

use serde::{Deserialize, Serialize};

use super::BinaryMask;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Disk,
    Square,
}

/// Flat structuring element centred on its origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuringElement {
    pub shape: Shape,
    pub radius: u32,
}

impl StructuringElement {
    pub fn disk(radius: u32) -> Self {
        Self {
            shape: Shape::Disk,
            radius,
        }
    }

    pub fn square(radius: u32) -> Self {
        Self {
            shape: Shape::Square,
            radius,
        }
    }

    /// Half-width of the element's run at row offset `dy`.
    pub fn half_width(&self, dy: i64) -> i64 {
        let r = self.radius as i64;
        debug_assert!(dy.abs() <= r);
        match self.shape {
            Shape::Square => r,
            Shape::Disk => {
                let rem = (r * r - dy * dy) as u64;
                let mut w = (rem as f64).sqrt() as u64;
                while w * w > rem {
                    w -= 1;
                }
                while (w + 1) * (w + 1) <= rem {
                    w += 1;
                }
                w as i64
            }
        }
    }

    /// Every `(dx, dy)` offset in the element.
    pub fn offsets(&self) -> Vec<(i64, i64)> {
        let r = self.radius as i64;
        let mut out = Vec::new();
        for dy in -r..=r {
            let w = self.half_width(dy);
            for dx in -w..=w {
                out.push((dx, dy));
            }
        }
        out
    }

    fn runs(&self) -> Vec<(i64, i64)> {
        let r = self.radius as i64;
        (-r..=r).map(|dy| (dy, self.half_width(dy))).collect()
    }
}

impl std::fmt::Display for StructuringElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let shape = match self.shape {
            Shape::Disk => "disk",
            Shape::Square => "square",
        };
        write!(f, "{shape}:{}", self.radius)
    }
}

impl std::str::FromStr for StructuringElement {
    type Err = String;

    /// Parses `disk:5` or `square:3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (shape, radius) = s
            .split_once(':')
            .ok_or_else(|| format!("expected `shape:radius`, got `{s}`"))?;
        let radius: u32 = radius
            .trim()
            .parse()
            .map_err(|_| format!("bad structuring element radius in `{s}`"))?;
        if radius == 0 {
            return Err("structuring element radius must be at least 1".into());
        }
        match shape.trim() {
            "disk" => Ok(Self::disk(radius)),
            "square" => Ok(Self::square(radius)),
            other => Err(format!("unknown structuring element shape `{other}`")),
        }
    }
}

/// Row-wise inclusive prefix counts, `width + 1` entries per row.
fn row_prefix(mask: &BinaryMask) -> Vec<u32> {
    let w = mask.width() as usize;
    let mut prefix = vec![0u32; (w + 1) * mask.height() as usize];
    for (row, bits) in mask.bits().chunks_exact(w).enumerate() {
        let base = row * (w + 1);
        for (x, &b) in bits.iter().enumerate() {
            prefix[base + x + 1] = prefix[base + x] + b as u32;
        }
    }
    prefix
}

/// Output is set iff the element placed at the pixel lies entirely inside
/// the foreground.
pub fn erode(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let prefix = row_prefix(mask);
    let stride = (w + 1) as usize;
    let runs = se.runs();
    let mut bits = vec![false; mask.bits().len()];
    for y in 0..h {
        for x in 0..w {
            let inside = runs.iter().all(|&(dy, hw)| {
                let yy = y + dy;
                let (x0, x1) = (x - hw, x + hw);
                if yy < 0 || yy >= h || x0 < 0 || x1 >= w {
                    return false;
                }
                let base = yy as usize * stride;
                prefix[base + x1 as usize + 1] - prefix[base + x0 as usize] == (2 * hw + 1) as u32
            });
            bits[(y * w + x) as usize] = inside;
        }
    }
    BinaryMask::new(mask.width(), mask.height(), bits).expect("same dimensions")
}

/// Output is set iff the element placed at the pixel touches the foreground.
pub fn dilate(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let prefix = row_prefix(mask);
    let stride = (w + 1) as usize;
    let runs = se.runs();
    let mut bits = vec![false; mask.bits().len()];
    for y in 0..h {
        for x in 0..w {
            let hit = runs.iter().any(|&(dy, hw)| {
                let yy = y + dy;
                if yy < 0 || yy >= h {
                    return false;
                }
                let x0 = (x - hw).max(0) as usize;
                let x1 = (x + hw).min(w - 1) as usize;
                let base = yy as usize * stride;
                prefix[base + x1 + 1] > prefix[base + x0]
            });
            bits[(y * w + x) as usize] = hit;
        }
    }
    BinaryMask::new(mask.width(), mask.height(), bits).expect("same dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::{connected_components, RasterImage};
    use proptest::prelude::*;

    /// Direct set definition: scan the element's offsets at each pixel.
    fn naive(mask: &BinaryMask, se: &StructuringElement, erosion: bool) -> BinaryMask {
        let offsets = se.offsets();
        let (w, h) = (mask.width() as i64, mask.height() as i64);
        let fg = |x: i64, y: i64| x >= 0 && y >= 0 && x < w && y < h && mask.get(x as u32, y as u32);
        BinaryMask::from_fn(mask.width(), mask.height(), |x, y| {
            let (x, y) = (x as i64, y as i64);
            if erosion {
                offsets.iter().all(|&(dx, dy)| fg(x + dx, y + dy))
            } else {
                offsets.iter().any(|&(dx, dy)| fg(x - dx, y - dy))
            }
        })
        .unwrap()
    }

    fn mask_strategy(size: u32) -> impl Strategy<Value = BinaryMask> {
        prop::collection::vec(prop::bool::weighted(0.55), (size * size) as usize)
            .prop_map(move |bits| BinaryMask::new(size, size, bits).unwrap())
    }

    #[test]
    fn disk_offsets() {
        assert_eq!(StructuringElement::disk(1).offsets().len(), 5);
        assert_eq!(StructuringElement::disk(2).offsets().len(), 13);
        assert_eq!(StructuringElement::square(2).offsets().len(), 25);
        assert!(StructuringElement::disk(3).offsets().contains(&(0, 0)));
    }

    #[test]
    fn parse_and_display() {
        let se: StructuringElement = "disk:5".parse().unwrap();
        assert_eq!(se, StructuringElement::disk(5));
        assert_eq!(se.to_string(), "disk:5");
        assert!("disk:0".parse::<StructuringElement>().is_err());
        assert!("ring:3".parse::<StructuringElement>().is_err());
    }

    #[test]
    fn isolated_pixel_is_eroded_away() {
        let mut m = BinaryMask::empty(9, 9).unwrap();
        m.set(4, 4, true);
        assert_eq!(erode(&m, &StructuringElement::disk(1)).count(), 0);
    }

    #[test]
    fn full_mask_shrinks_only_at_border() {
        let m = BinaryMask::from_fn(12, 10, |_, _| true).unwrap();
        for r in 1..=3u32 {
            for se in [StructuringElement::disk(r), StructuringElement::square(r)] {
                let e = erode(&m, &se);
                for y in 0..10 {
                    for x in 0..12 {
                        let interior = x >= r && y >= r && x < 12 - r && y < 10 - r;
                        assert_eq!(e.get(x, y), interior, "{se} at ({x},{y})");
                    }
                }
            }
        }
    }

    #[test]
    fn empty_mask_dilates_to_empty() {
        let m = BinaryMask::empty(8, 8).unwrap();
        assert_eq!(dilate(&m, &StructuringElement::disk(3)).count(), 0);
    }

    #[test]
    fn nearby_pixels_merge_after_dilation() {
        let mut m = BinaryMask::empty(16, 9).unwrap();
        m.set(5, 4, true);
        m.set(8, 4, true);
        let se = StructuringElement::disk(2);
        let oracle = naive(&m, &se, false);
        let reference = RasterImage::filled(16, 9, 0).unwrap();
        assert_eq!(connected_components(&oracle, &reference).unwrap().len(), 1);
        assert_eq!(dilate(&m, &se), oracle);
    }

    proptest! {
        #[test]
        fn matches_naive_oracle(mask in mask_strategy(32), r in 1u32..=3, square in any::<bool>()) {
            let se = if square { StructuringElement::square(r) } else { StructuringElement::disk(r) };
            prop_assert_eq!(erode(&mask, &se), naive(&mask, &se, true));
            prop_assert_eq!(dilate(&mask, &se), naive(&mask, &se, false));
        }
    }
}
