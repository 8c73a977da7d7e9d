use std::cmp::Ordering;

use num_bigint::BigUint;

use super::{BinaryMask, ImagingError, RasterImage};

pub(crate) fn histogram(img: &RasterImage) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &v in img.data() {
        hist[v as usize] += 1;
    }
    hist
}

/// Otsu's global threshold over a 256-bin histogram.
///
/// Returns the `t` in `[0, 254]` maximizing between-class variance of the
/// split `{v <= t}` / `{v > t}`; ties go to the smallest `t`. Scores are
/// compared exactly as rationals, so the choice never depends on rounding.
pub fn otsu_threshold_from_histogram(hist: &[u64; 256]) -> Result<u8, ImagingError> {
    let total: u128 = hist.iter().map(|&h| h as u128).sum();
    let weighted_total: u128 = hist
        .iter()
        .enumerate()
        .map(|(v, &h)| v as u128 * h as u128)
        .sum();
    if hist.iter().filter(|&&h| h > 0).count() < 2 {
        return Err(ImagingError::DegenerateHistogram);
    }

    // Between-class variance times N^2 equals
    // (S*w0 - N*s0)^2 / (w0 * (N - w0)); keep numerator and denominator.
    let mut best: Option<(u8, BigUint, BigUint)> = None;
    let mut w0: u128 = 0;
    let mut s0: u128 = 0;
    for (t, &count) in hist.iter().enumerate().take(255) {
        w0 += count as u128;
        s0 += t as u128 * count as u128;
        if w0 == 0 || w0 == total {
            continue;
        }
        let lhs = weighted_total * w0;
        let rhs = total * s0;
        let spread = BigUint::from(lhs.abs_diff(rhs));
        let num = &spread * &spread;
        let den = BigUint::from(w0) * BigUint::from(total - w0);
        let better = match &best {
            None => true,
            Some((_, bn, bd)) => (&num * bd).cmp(&(bn * &den)) == Ordering::Greater,
        };
        if better {
            best = Some((t as u8, num, den));
        }
    }
    best.map(|(t, _, _)| t).ok_or(ImagingError::DegenerateHistogram)
}

pub fn otsu_threshold(img: &RasterImage) -> Result<u8, ImagingError> {
    img.require_gray()?;
    otsu_threshold_from_histogram(&histogram(img))
}

/// Foreground is strictly brighter than `t`.
pub fn binarize(img: &RasterImage, t: u8) -> Result<BinaryMask, ImagingError> {
    img.require_gray()?;
    BinaryMask::new(
        img.width(),
        img.height(),
        img.data().iter().map(|&v| v > t).collect(),
    )
}

/// Number of pixels in the top fraction `p` of `n`, i.e. `ceil(p * n)`.
/// Products within 1e-9 of an integer are snapped first so that, for
/// example, `0.07 * 100` counts 7 pixels rather than 8.
pub(crate) fn top_count(p: f64, n: usize) -> usize {
    let raw = p * n as f64;
    let snapped = if (raw - raw.round()).abs() < 1e-9 {
        raw.round()
    } else {
        raw.ceil()
    };
    (snapped as usize).clamp(1, n)
}

/// Mean intensity of the `ceil(p * N)` brightest pixels.
pub fn top_percentile_mean_threshold(img: &RasterImage, p: f64) -> Result<f64, ImagingError> {
    img.require_gray()?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(ImagingError::InvalidParameter(format!(
            "top fraction must be in (0, 1], got {p}"
        )));
    }
    let hist = histogram(img);
    let k = top_count(p, img.pixel_count());
    let mut remaining = k as u64;
    let mut sum = 0u64;
    for v in (0..256).rev() {
        if remaining == 0 {
            break;
        }
        let take = hist[v].min(remaining);
        sum += take * v as u64;
        remaining -= take;
    }
    Ok(sum as f64 / k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gray(data: Vec<u8>) -> RasterImage {
        let n = data.len() as u32;
        RasterImage::new(n, 1, 1, data).unwrap()
    }

    #[test]
    fn two_level_image_picks_smallest_threshold() {
        let mut data = vec![0u8; 50];
        data.extend(vec![255u8; 50]);
        assert_eq!(otsu_threshold(&gray(data)).unwrap(), 0);
    }

    #[test]
    fn constant_image_is_degenerate() {
        let img = RasterImage::filled(4, 4, 77).unwrap();
        assert!(matches!(
            otsu_threshold(&img),
            Err(ImagingError::DegenerateHistogram)
        ));
    }

    #[test]
    fn otsu_separates_bimodal_clusters() {
        let mut data = vec![];
        for v in [20u8, 22, 25, 30] {
            data.extend(std::iter::repeat_n(v, 40));
        }
        for v in [180u8, 190, 200] {
            data.extend(std::iter::repeat_n(v, 30));
        }
        let t = otsu_threshold(&gray(data)).unwrap();
        assert!((30..180).contains(&t), "t = {t}");
        assert_eq!(t, 30);
    }

    #[test]
    fn binarize_is_strict() {
        assert_eq!(binarize(&gray(vec![0, 100, 200]), 100).unwrap().bits(), &[false, false, true]);
        assert_eq!(binarize(&RasterImage::filled(3, 3, 0).unwrap(), 0).unwrap().count(), 0);
        assert_eq!(binarize(&RasterImage::filled(3, 3, 255).unwrap(), 0).unwrap().count(), 9);
    }

    #[test]
    fn top_percentile_examples() {
        let img = RasterImage::filled(10, 10, 100).unwrap();
        assert_eq!(top_percentile_mean_threshold(&img, 0.01).unwrap(), 100.0);

        let mut data = vec![0u8; 9900];
        data.extend(vec![200u8; 100]);
        let img = RasterImage::new(100, 100, 1, data).unwrap();
        assert_eq!(top_percentile_mean_threshold(&img, 0.01).unwrap(), 200.0);
    }

    #[test]
    fn top_count_is_ceiling_with_snapping() {
        assert_eq!(top_count(0.07, 100), 7);
        assert_eq!(top_count(0.01, 10_001), 101);
        assert_eq!(top_count(1e-9, 10), 1);
        assert_eq!(top_count(1.0, 10), 10);
    }

    #[test]
    fn top_percentile_rejects_bad_fraction() {
        let img = RasterImage::filled(2, 2, 1).unwrap();
        assert!(top_percentile_mean_threshold(&img, 0.0).is_err());
        assert!(top_percentile_mean_threshold(&img, 1.5).is_err());
    }

    proptest! {
        #[test]
        fn top_percentile_matches_full_sort(data in prop::collection::vec(any::<u8>(), 1..600)) {
            let n = data.len();
            let k = n.div_ceil(100);
            let mut sorted = data.clone();
            sorted.sort_unstable_by(|a, b| b.cmp(a));
            let oracle = sorted[..k].iter().map(|&v| v as f64).sum::<f64>() / k as f64;
            let got = top_percentile_mean_threshold(&gray(data), 0.01).unwrap();
            prop_assert_eq!(got, oracle);
        }

        #[test]
        fn top_percentile_permutation_invariant(
            data in prop::collection::vec(any::<u8>(), 1..400),
            seed in any::<u64>(),
            p in 0.001f64..1.0,
        ) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut shuffled = data.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(
                top_percentile_mean_threshold(&gray(data), p).unwrap(),
                top_percentile_mean_threshold(&gray(shuffled), p).unwrap()
            );
        }
    }
}
