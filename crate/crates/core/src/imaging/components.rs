use crate::geometry::BoundingBox;

use super::{BinaryMask, ImagingError, RasterImage};

/// One 8-connected foreground blob.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    /// 1-based label used in the label map from [`label_components`].
    pub label: u32,
    pub area: u64,
    /// Mean pixel-centre position in continuous coordinates.
    pub centroid: (f64, f64),
    pub bbox: BoundingBox,
    pub mean_intensity: f64,
}

const NEIGHBOURS: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Labels 8-connected foreground regions in row-major discovery order.
/// Background is 0; foreground labels start at 1.
pub fn label_components(mask: &BinaryMask) -> (Vec<u32>, u32) {
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let bits = mask.bits();
    let mut labels = vec![0u32; bits.len()];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for start in 0..bits.len() {
        if !bits[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (x, y) = ((i as i64) % w, (i as i64) / w);
            for (dx, dy) in NEIGHBOURS {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w || ny >= h {
                    continue;
                }
                let j = (ny * w + nx) as usize;
                if bits[j] && labels[j] == 0 {
                    labels[j] = next;
                    stack.push(j);
                }
            }
        }
    }
    (labels, next)
}

/// Connected components sorted by area, largest first. Equal areas keep
/// discovery order.
pub fn connected_components(
    mask: &BinaryMask,
    reference: &RasterImage,
) -> Result<Vec<Component>, ImagingError> {
    reference.require_gray()?;
    if reference.width() != mask.width() || reference.height() != mask.height() {
        return Err(ImagingError::DimensionMismatch(format!(
            "mask is {}x{}, reference is {}x{}",
            mask.width(),
            mask.height(),
            reference.width(),
            reference.height()
        )));
    }
    let (labels, count) = label_components(mask);
    let w = mask.width() as usize;

    struct Acc {
        area: u64,
        sx: u64,
        sy: u64,
        si: u64,
        x0: u32,
        y0: u32,
        x1: u32,
        y1: u32,
    }
    let mut acc: Vec<Acc> = (0..count)
        .map(|_| Acc {
            area: 0,
            sx: 0,
            sy: 0,
            si: 0,
            x0: u32::MAX,
            y0: u32::MAX,
            x1: 0,
            y1: 0,
        })
        .collect();
    let intensity = reference.data();
    for (i, &l) in labels.iter().enumerate() {
        if l == 0 {
            continue;
        }
        let (x, y) = ((i % w) as u32, (i / w) as u32);
        let a = &mut acc[l as usize - 1];
        a.area += 1;
        a.sx += x as u64;
        a.sy += y as u64;
        a.si += intensity[i] as u64;
        a.x0 = a.x0.min(x);
        a.y0 = a.y0.min(y);
        a.x1 = a.x1.max(x);
        a.y1 = a.y1.max(y);
    }

    let mut comps: Vec<Component> = acc
        .into_iter()
        .enumerate()
        .map(|(i, a)| {
            let n = a.area as f64;
            Component {
                label: i as u32 + 1,
                area: a.area,
                centroid: (a.sx as f64 / n + 0.5, a.sy as f64 / n + 0.5),
                bbox: BoundingBox::new(a.x0, a.y0, a.x1 - a.x0 + 1, a.y1 - a.y0 + 1),
                mean_intensity: a.si as f64 / n,
            }
        })
        .collect();
    comps.sort_by_key(|c| std::cmp::Reverse(c.area));
    Ok(comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::{HashMap, VecDeque};

    /// Queue-based flood fill, independent of the labelling above.
    fn flood_fill_partition(mask: &BinaryMask) -> Vec<Vec<usize>> {
        let (w, h) = (mask.width() as i64, mask.height() as i64);
        let mut seen = vec![false; mask.bits().len()];
        let mut regions = Vec::new();
        for y in 0..h {
            for x in 0..w {
                let s = (y * w + x) as usize;
                if !mask.bits()[s] || seen[s] {
                    continue;
                }
                let mut region = vec![];
                let mut q = VecDeque::from([(x, y)]);
                seen[s] = true;
                while let Some((cx, cy)) = q.pop_front() {
                    region.push((cy * w + cx) as usize);
                    for dy in -1..=1 {
                        for dx in -1..=1 {
                            let (nx, ny) = (cx + dx, cy + dy);
                            if (dx, dy) == (0, 0) || nx < 0 || ny < 0 || nx >= w || ny >= h {
                                continue;
                            }
                            let j = (ny * w + nx) as usize;
                            if mask.bits()[j] && !seen[j] {
                                seen[j] = true;
                                q.push_back((nx, ny));
                            }
                        }
                    }
                }
                region.sort_unstable();
                regions.push(region);
            }
        }
        regions.sort();
        regions
    }

    #[test]
    fn empty_mask_has_no_components() {
        let m = BinaryMask::empty(5, 5).unwrap();
        let r = RasterImage::filled(5, 5, 0).unwrap();
        assert!(connected_components(&m, &r).unwrap().is_empty());
    }

    #[test]
    fn two_squares() {
        let m = BinaryMask::from_fn(8, 8, |x, y| {
            (x < 2 && y < 2) || ((5..7).contains(&x) && (5..7).contains(&y))
        })
        .unwrap();
        let r = RasterImage::from_gray_fn(8, 8, |x, _| if x < 4 { 10 } else { 200 }).unwrap();
        let comps = connected_components(&m, &r).unwrap();
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.area == 4));
        assert_eq!(comps[0].bbox, BoundingBox::new(0, 0, 2, 2));
        assert_eq!(comps[0].centroid, (1.0, 1.0));
        assert_eq!(comps[0].mean_intensity, 10.0);
        assert_eq!(comps[1].mean_intensity, 200.0);
    }

    #[test]
    fn diagonal_neighbours_connect() {
        let m = BinaryMask::from_fn(4, 4, |x, y| x == y).unwrap();
        let r = RasterImage::filled(4, 4, 0).unwrap();
        assert_eq!(connected_components(&m, &r).unwrap().len(), 1);
    }

    #[test]
    fn reference_must_match() {
        let m = BinaryMask::empty(4, 4).unwrap();
        let r = RasterImage::filled(4, 5, 0).unwrap();
        assert!(connected_components(&m, &r).is_err());
    }

    proptest! {
        #[test]
        fn partition_matches_flood_fill(bits in prop::collection::vec(prop::bool::weighted(0.45), 24 * 20)) {
            let m = BinaryMask::new(24, 20, bits).unwrap();
            let (labels, count) = label_components(&m);
            let mut groups: HashMap<u32, Vec<usize>> = HashMap::new();
            for (i, &l) in labels.iter().enumerate() {
                if l > 0 {
                    groups.entry(l).or_default().push(i);
                }
            }
            let mut ours: Vec<Vec<usize>> = groups.into_values().collect();
            ours.sort();
            prop_assert_eq!(ours.len(), count as usize);
            prop_assert_eq!(ours, flood_fill_partition(&m));

            let r = RasterImage::filled(24, 20, 3).unwrap();
            let comps = connected_components(&m, &r).unwrap();
            prop_assert_eq!(comps.iter().map(|c| c.area).sum::<u64>(), m.count() as u64);
            for c in &comps {
                prop_assert!(c.bbox.fits_within(24, 20));
                let (cx, cy) = c.centroid;
                prop_assert!(cx >= c.bbox.x as f64 && cx <= c.bbox.right() as f64);
                prop_assert!(cy >= c.bbox.y as f64 && cy <= c.bbox.bottom() as f64);
            }
            prop_assert!(comps.windows(2).all(|p| p[0].area >= p[1].area));
        }
    }
}
