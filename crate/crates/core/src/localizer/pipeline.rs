use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{ConfigError, LocalizeError, LocalizerConfig};
use crate::geometry::{BoundingBox, Circle};
use crate::imaging::{
    binarize, connected_components, dilate, erode, otsu_threshold, resize, to_grayscale,
    top_percentile_mean_threshold, BinaryMask, ChannelMode, Component, RasterImage,
};

/// Retina components smaller than this fraction of the image are rejected.
const MIN_RETINA_FRACTION: f64 = 0.01;

/// Result of [`localize_disc`], in original-image coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscLocalization {
    /// Disc circle before expansion.
    pub circle: Circle,
    /// Box enclosing the expanded circle, clipped to the image.
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub retina: Circle,
    /// Factors that took the original image to the working raster.
    pub working_scale: (f64, f64),
}

#[derive(Debug, Clone)]
pub enum StageImage {
    Gray(RasterImage),
    Mask(BinaryMask),
}

/// One intermediate pipeline product.
#[derive(Debug, Clone)]
pub struct Stage {
    pub name: &'static str,
    /// Foreground pixel count for mask stages.
    pub foreground: Option<usize>,
    pub image: Option<StageImage>,
}

/// Intermediate products of one run, in pipeline order.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub stages: Vec<Stage>,
    pub retina: Option<Circle>,
    pub binarization_level: Option<f64>,
    /// Working-scale components that passed the area filter, best first.
    pub candidates: Vec<Component>,
    keep_images: bool,
}

impl Trace {
    fn push_gray(&mut self, name: &'static str, img: &RasterImage) {
        self.stages.push(Stage {
            name,
            foreground: None,
            image: self.keep_images.then(|| StageImage::Gray(img.clone())),
        });
    }

    fn push_mask(&mut self, name: &'static str, mask: &BinaryMask) {
        self.stages.push(Stage {
            name,
            foreground: Some(mask.count()),
            image: self.keep_images.then(|| StageImage::Mask(mask.clone())),
        });
    }

    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }
}

/// Retina centre and radius from the largest Otsu-foreground region. The
/// radius is that of a disk with the region's area.
pub fn estimate_retina_geometry(gray: &RasterImage) -> Result<Circle, LocalizeError> {
    let t = otsu_threshold(gray)?;
    let mask = binarize(gray, t)?;
    let largest = connected_components(&mask, gray)?.into_iter().next();
    let fraction = largest
        .as_ref()
        .map_or(0.0, |c| c.area as f64 / gray.pixel_count() as f64);
    match largest {
        Some(c) if fraction >= MIN_RETINA_FRACTION => Ok(Circle::new(
            c.centroid.0,
            c.centroid.1,
            (c.area as f64 / PI).sqrt(),
        )),
        _ => Err(LocalizeError::RetinaNotFound { fraction }),
    }
}

/// Zeroes every pixel whose centre lies farther than `margin * retina.r`
/// from the retina centre. Pixels on the boundary are kept.
pub fn crop_fringe(gray: &RasterImage, retina: &Circle, margin: f64) -> Result<RasterImage, LocalizeError> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(ConfigError::Invalid(format!("fringe margin must be in (0, 1), got {margin}")).into());
    }
    let keep = Circle::new(retina.cx, retina.cy, margin * retina.r);
    let w = gray.width();
    let data = gray
        .data()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let (x, y) = ((i as u32 % w) as f64 + 0.5, (i as u32 / w) as f64 + 0.5);
            if keep.contains(x, y) {
                v
            } else {
                0
            }
        })
        .collect();
    Ok(RasterImage::new(w, gray.height(), 1, data)?)
}

/// Square of side `2 * expansion * r` around the circle centre, rounded
/// outward to whole pixels and clipped to the image.
pub fn circle_to_bbox(
    c: &Circle,
    expansion: f64,
    img_w: u32,
    img_h: u32,
) -> Result<BoundingBox, LocalizeError> {
    if expansion.is_nan() || expansion < 1.0 {
        return Err(ConfigError::Invalid(format!("expansion must be at least 1, got {expansion}")).into());
    }
    let half = expansion * c.r;
    let clip = |v: f64, hi: u32| v.clamp(0.0, hi as f64) as u32;
    let x0 = clip((c.cx - half).floor(), img_w);
    let y0 = clip((c.cy - half).floor(), img_h);
    let x1 = clip((c.cx + half).ceil(), img_w);
    let y1 = clip((c.cy + half).ceil(), img_h);
    BoundingBox::from_corners(x0, y0, x1, y1).ok_or(LocalizeError::OutOfBounds {
        width: img_w,
        height: img_h,
    })
}

/// Orders candidate blobs: larger area first, then brighter, then the one
/// whose centroid comes first in (y, x) order.
fn blob_order(a: &Component, b: &Component) -> std::cmp::Ordering {
    b.area
        .cmp(&a.area)
        .then(b.mean_intensity.total_cmp(&a.mean_intensity))
        .then(a.centroid.1.total_cmp(&b.centroid.1))
        .then(a.centroid.0.total_cmp(&b.centroid.0))
}

pub fn localize_disc(img: &RasterImage, cfg: &LocalizerConfig) -> Result<DiscLocalization, LocalizeError> {
    let mut trace = Trace::default();
    run(img, cfg, &mut trace)
}

/// Like [`localize_disc`] but also returns every intermediate stage. Stage
/// rasters are kept only when `keep_images` is set; foreground counts are
/// always recorded.
pub fn localize_disc_traced(
    img: &RasterImage,
    cfg: &LocalizerConfig,
    keep_images: bool,
) -> (Result<DiscLocalization, LocalizeError>, Trace) {
    let mut trace = Trace {
        keep_images,
        ..Trace::default()
    };
    let result = run(img, cfg, &mut trace);
    (result, trace)
}

fn run(img: &RasterImage, cfg: &LocalizerConfig, trace: &mut Trace) -> Result<DiscLocalization, LocalizeError> {
    cfg.validate()?;
    let size = cfg.working_size;
    let (orig_w, orig_h) = (img.width(), img.height());
    let sx = size as f64 / orig_w as f64;
    let sy = size as f64 / orig_h as f64;

    let working = resize(img, size, size)?;
    let gray = if working.channels() == 1 {
        working
    } else {
        to_grayscale(&working, cfg.channel_mode)?
    };
    debug_assert!(cfg.channel_mode != ChannelMode::Passthrough || gray.channels() == 1);
    trace.push_gray("gray", &gray);

    let retina = estimate_retina_geometry(&gray)?;
    trace.retina = Some(retina);

    let cropped = crop_fringe(&gray, &retina, cfg.fringe_margin)?;
    trace.push_gray("cropped", &cropped);

    let level = top_percentile_mean_threshold(&cropped, cfg.top_percentile)?;
    trace.binarization_level = Some(level);
    // When every selected pixel shares the maximum value the mean equals
    // it and the strict cut would select nothing; cut just below instead.
    let brightest = cropped.data().iter().copied().max().unwrap_or(0);
    let cut = (level.floor() as u8).min(brightest.saturating_sub(1));
    let binary = binarize(&cropped, cut)?;
    trace.push_mask("binary", &binary);

    let eroded = erode(&binary, &cfg.erode_se);
    trace.push_mask("eroded", &eroded);
    let dilated = dilate(&eroded, &cfg.dilate_se);
    trace.push_mask("dilated", &dilated);

    let mut candidates: Vec<Component> = connected_components(&dilated, &cropped)?
        .into_iter()
        .filter(|c| c.area >= cfg.min_blob_area)
        .collect();
    candidates.sort_by(blob_order);
    trace.candidates = candidates.clone();
    let blob = candidates.first().ok_or(LocalizeError::NoCandidateRegion)?;

    let disc = Circle::new(blob.centroid.0, blob.centroid.1, (blob.area as f64 / PI).sqrt());
    let expanded = Circle::new(disc.cx, disc.cy, disc.r * cfg.radius_expansion);
    let working_box = circle_to_bbox(&expanded, 1.0, size, size)?;

    let to_x = |v: u64| v as f64 * orig_w as f64 / size as f64;
    let to_y = |v: u64| v as f64 * orig_h as f64 / size as f64;
    let x0 = to_x(working_box.x as u64).floor() as u32;
    let y0 = to_y(working_box.y as u64).floor() as u32;
    let x1 = (to_x(working_box.right()).ceil() as u32).min(orig_w);
    let y1 = (to_y(working_box.bottom()).ceil() as u32).min(orig_h);
    let bbox = BoundingBox::from_corners(x0, y0, x1, y1).ok_or(LocalizeError::OutOfBounds {
        width: orig_w,
        height: orig_h,
    })?;

    let radius_scale = (sx * sy).sqrt();
    let unscale = |c: &Circle| Circle::new(c.cx / sx, c.cy / sy, c.r / radius_scale);
    Ok(DiscLocalization {
        circle: unscale(&disc),
        bbox,
        retina: unscale(&retina),
        working_scale: (sx, sy),
    })
}
