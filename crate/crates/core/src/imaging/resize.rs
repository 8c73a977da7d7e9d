use super::{ImagingError, RasterImage};

/// Source sample positions for one output axis: (lower index, upper index,
/// weight of upper).
fn axis_taps(src: u32, dst: u32) -> Vec<(usize, usize, f32)> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|i| {
            let pos = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (src - 1) as f64);
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(src as usize - 1);
            (lo, hi, (pos - lo as f64) as f32)
        })
        .collect()
}

/// Bilinear resize with independent x/y scaling, sampling at pixel centres.
pub fn resize(img: &RasterImage, target_w: u32, target_h: u32) -> Result<RasterImage, ImagingError> {
    if target_w == 0 || target_h == 0 {
        return Err(ImagingError::InvalidDimensions {
            width: target_w,
            height: target_h,
        });
    }
    if target_w == img.width() && target_h == img.height() {
        return Ok(img.clone());
    }
    let c = img.channels() as usize;
    let src_w = img.width() as usize;
    let src = img.data();
    let xs = axis_taps(img.width(), target_w);
    let ys = axis_taps(img.height(), target_h);

    let mut out = Vec::with_capacity(target_w as usize * target_h as usize * c);
    for &(y0, y1, fy) in &ys {
        let row0 = &src[y0 * src_w * c..(y0 + 1) * src_w * c];
        let row1 = &src[y1 * src_w * c..(y1 + 1) * src_w * c];
        for &(x0, x1, fx) in &xs {
            for ch in 0..c {
                let a = row0[x0 * c + ch] as f32;
                let b = row0[x1 * c + ch] as f32;
                let d = row1[x0 * c + ch] as f32;
                let e = row1[x1 * c + ch] as f32;
                let top = a + (b - a) * fx;
                let bottom = d + (e - d) * fx;
                let v = top + (bottom - top) * fy;
                out.push(v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    RasterImage::new(target_w, target_h, img.channels(), out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_size_is_identity() {
        let img = RasterImage::from_gray_fn(100, 100, |x, y| ((x * 7 + y * 13) % 256) as u8).unwrap();
        assert_eq!(resize(&img, 100, 100).unwrap(), img);
    }

    #[test]
    fn constants_stay_constant() {
        let img = RasterImage::new(7, 5, 3, vec![50; 105]).unwrap();
        for (w, h) in [(1, 1), (3, 11), (20, 2), (64, 64)] {
            let out = resize(&img, w, h).unwrap();
            assert!(out.data().iter().all(|&v| v == 50));
        }
    }

    #[test]
    fn two_pixels_upsampled_to_four() {
        // Hand-evaluated bilinear: output centre i maps to source
        // (i + 0.5) * 0.5 - 0.5, clamped to [0, 1].
        let oracle = |i: u32| -> u8 {
            let pos = ((i as f64 + 0.5) * 0.5 - 0.5).clamp(0.0, 1.0);
            (255.0 * pos).round() as u8
        };
        let expected: Vec<u8> = (0..4).map(oracle).collect();
        assert_eq!(expected, vec![0, 64, 191, 255]);
        let img = RasterImage::new(2, 1, 1, vec![0, 255]).unwrap();
        assert_eq!(resize(&img, 4, 1).unwrap().data(), expected.as_slice());
    }

    #[test]
    fn zero_target_rejected() {
        let img = RasterImage::filled(3, 3, 1).unwrap();
        assert!(resize(&img, 0, 3).is_err());
    }
}
