//! Procedural colour fundus images with exact optic-disc ground truth.
//!
//! A [`Scene`] is a resolution-independent description: retina disk with
//! radial fall-off, a dark macula, a bright domed optic disc, vessel trees
//! rooted at the disc, and optional artefacts (a bright light-leak fringe
//! hugging the retinal rim, or small shiny reflections near the macula).
//! Scenes render at any scale, which makes them usable both as a test
//! corpus and for checking scale robustness of the localizer.

use std::f64::consts::{PI, TAU};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{BoundingBox, Circle};
use crate::imaging::RasterImage;

/// Corpus-level generator settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Fraction of images carrying a rim fringe. Applied exactly:
    /// `round(rate * n)` images get one.
    pub fringe_rate: f64,
    /// Fraction of images carrying macular reflections, applied exactly.
    pub spot_rate: f64,
    pub min_size: u32,
    pub max_size: u32,
    /// Largest width/height ratio; wider images get black side padding.
    pub max_aspect: f64,
    /// Amplitude of uniform per-pixel noise.
    pub noise: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            fringe_rate: 0.3,
            spot_rate: 0.3,
            min_size: 1000,
            max_size: 2000,
            max_aspect: 1.1,
            noise: 3.0,
        }
    }
}

/// Bright arc inside the rim, between `inner * r` and `r` of the retina.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fringe {
    pub start_angle: f64,
    pub span: f64,
    pub inner: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vessel {
    pub points: Vec<(f64, f64)>,
    pub width_start: f64,
    pub width_end: f64,
}

/// Resolution-independent fundus description in pixels of the nominal
/// `width × height` raster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub width: u32,
    pub height: u32,
    pub retina: Circle,
    pub disc: Circle,
    pub macula: Circle,
    pub base_rgb: [f64; 3],
    pub disc_rgb: [f64; 3],
    pub vignetting: f64,
    pub vessels: Vec<Vessel>,
    pub fringe: Option<Fringe>,
    pub spots: Vec<Circle>,
    pub noise: f64,
    pub noise_seed: u64,
}

/// Margin of the fringe annulus relative to the retina radius. Kept above
/// the localizer's default rim margin of 0.95.
const FRINGE_INNER: f64 = 0.97;
const VESSEL_DARKENING: f64 = 0.45;

impl Scene {
    /// Draws a random scene of the given nominal size.
    pub fn random(rng: &mut impl Rng, width: u32, height: u32, fringe: bool, spots: bool, noise: f64) -> Self {
        let (w, h) = (width as f64, height as f64);
        let short = w.min(h);
        let r = short * rng.random_range(0.44..0.48);
        let cx = w / 2.0 + rng.random_range(-0.01..0.01) * short;
        let cy = h / 2.0 + rng.random_range(-0.01..0.01) * short;
        let retina = Circle::new(cx, cy, r);

        // Disc sits nasally, either side, slightly above or below the
        // horizontal meridian.
        let side = if rng.random_bool(0.5) { 0.0 } else { PI };
        let angle = side + rng.random_range(-0.25..0.25);
        let dist = r * rng.random_range(0.42..0.58);
        let disc_r = r * rng.random_range(0.11..0.15);
        let disc = Circle::new(cx + dist * angle.cos(), cy + dist * angle.sin(), disc_r);

        // Macula roughly 2.5 disc diameters temporal of the disc.
        let mac_dist = disc_r * rng.random_range(4.5..5.5);
        let macula = Circle::new(
            disc.cx - mac_dist * angle.cos(),
            disc.cy - mac_dist * angle.sin() + rng.random_range(-0.3..0.3) * disc_r,
            disc_r * rng.random_range(1.2..1.6),
        );

        let base_rgb = [
            rng.random_range(165.0..200.0),
            rng.random_range(65.0..90.0),
            rng.random_range(20.0..40.0),
        ];
        let disc_rgb = [
            rng.random_range(245.0..255.0),
            rng.random_range(225.0..245.0),
            rng.random_range(170.0..210.0),
        ];

        let vessels = random_vessels(rng, &retina, &disc, angle);

        let fringe = fringe.then(|| Fringe {
            start_angle: rng.random_range(0.0..TAU),
            span: rng.random_range(0.6..1.6),
            inner: FRINGE_INNER,
        });

        let spots = if spots {
            let count = rng.random_range(6..14);
            let spot_r_max = short * 0.0022;
            let mut out: Vec<Circle> = Vec::new();
            let mut attempts = 0;
            while out.len() < count && attempts < 500 {
                attempts += 1;
                let a = rng.random_range(0.0..TAU);
                let d = macula.r * rng.random_range(0.6..2.2);
                let s = Circle::new(
                    macula.cx + d * a.cos(),
                    macula.cy + d * a.sin(),
                    rng.random_range(0.5..1.0) * spot_r_max,
                );
                // Keep spots apart so dilation cannot fuse survivors.
                let apart = out
                    .iter()
                    .all(|o| (o.cx - s.cx).hypot(o.cy - s.cy) > 6.0 * spot_r_max);
                let clear_of_disc = (s.cx - disc.cx).hypot(s.cy - disc.cy) > disc.r * 2.5;
                if apart && clear_of_disc && retina.contains(s.cx, s.cy) {
                    out.push(s);
                }
            }
            out
        } else {
            Vec::new()
        };

        Scene {
            width,
            height,
            retina,
            disc,
            macula,
            base_rgb,
            disc_rgb,
            vignetting: rng.random_range(0.25..0.4),
            vessels,
            fringe,
            spots,
            noise,
            noise_seed: rng.random(),
        }
    }

    /// Ground-truth box: the square enclosing the disc, at `scale`.
    pub fn disc_box(&self, scale: f64) -> BoundingBox {
        let (w, h) = self.scaled_size(scale);
        let c = &self.disc;
        let clip = |v: f64, hi: u32| v.clamp(0.0, hi as f64) as u32;
        BoundingBox::from_corners(
            clip(((c.cx - c.r) * scale).floor(), w),
            clip(((c.cy - c.r) * scale).floor(), h),
            clip(((c.cx + c.r) * scale).ceil(), w),
            clip(((c.cy + c.r) * scale).ceil(), h),
        )
        .expect("disc lies inside the image")
    }

    pub fn scaled_size(&self, scale: f64) -> (u32, u32) {
        (
            ((self.width as f64 * scale).round() as u32).max(1),
            ((self.height as f64 * scale).round() as u32).max(1),
        )
    }

    /// Whether the continuous point `(x, y)` (nominal pixels) is fringe.
    pub fn in_fringe(&self, x: f64, y: f64) -> bool {
        let Some(f) = &self.fringe else {
            return false;
        };
        let d = (x - self.retina.cx).hypot(y - self.retina.cy);
        if d > self.retina.r || d < f.inner * self.retina.r {
            return false;
        }
        let a = (y - self.retina.cy).atan2(x - self.retina.cx);
        (a - f.start_angle).rem_euclid(TAU) <= f.span
    }

    /// Renders the scene at `scale` times its nominal size as RGB.
    pub fn render(&self, scale: f64) -> RasterImage {
        let (w, h) = self.scaled_size(scale);
        let vessel_mask = self.vessel_coverage(scale, w, h);
        let inv = 1.0 / scale;
        let mut data = Vec::with_capacity(w as usize * h as usize * 3);
        for py in 0..h {
            for px in 0..w {
                let x = (px as f64 + 0.5) * inv;
                let y = (py as f64 + 0.5) * inv;
                let rgb = self.shade(x, y, vessel_mask[py as usize * w as usize + px as usize] as f64 / 255.0);
                let n = self.noise_at(px, py, w);
                for c in rgb {
                    data.push((c + n).round().clamp(0.0, 255.0) as u8);
                }
            }
        }
        RasterImage::new(w, h, 3, data).expect("buffer sized for image")
    }

    fn shade(&self, x: f64, y: f64, vessel: f64) -> [f64; 3] {
        let ret = &self.retina;
        let d_ret = (x - ret.cx).hypot(y - ret.cy);
        if d_ret > ret.r {
            return [0.0; 3];
        }
        let t = d_ret / ret.r;
        let fall = 1.0 - self.vignetting * t * t;
        let mut rgb = self.base_rgb.map(|c| c * fall);

        let d_mac = (x - self.macula.cx).hypot(y - self.macula.cy) / self.macula.r;
        if d_mac < 1.5 {
            let k = 0.35 * (1.0 - smoothstep(0.3, 1.5, d_mac));
            rgb = rgb.map(|c| c * (1.0 - k));
        }

        let d_disc = (x - self.disc.cx).hypot(y - self.disc.cy) / self.disc.r;
        if d_disc < 1.0 {
            let weight = (1.0 - d_disc * d_disc).sqrt();
            for (c, target) in rgb.iter_mut().zip(self.disc_rgb) {
                *c += (target - *c) * weight;
            }
        }

        let dark = 1.0 - VESSEL_DARKENING * vessel;
        rgb = rgb.map(|c| c * dark);

        for s in &self.spots {
            let d = (x - s.cx).hypot(y - s.cy) / s.r;
            if d < 1.0 {
                let k = 1.0 - d * d;
                for (c, target) in rgb.iter_mut().zip(self.disc_rgb) {
                    *c += (target - *c) * k;
                }
            }
        }

        if self.in_fringe(x, y) {
            rgb = [255.0, 250.0, 235.0];
        }
        rgb
    }

    fn noise_at(&self, px: u32, py: u32, w: u32) -> f64 {
        if self.noise == 0.0 {
            return 0.0;
        }
        let idx = py as u64 * w as u64 + px as u64;
        let h = splitmix64(self.noise_seed ^ idx.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let u = (h >> 11) as f64 / (1u64 << 53) as f64;
        (2.0 * u - 1.0) * self.noise
    }

    /// Anti-aliased vessel coverage per pixel, 0..=255.
    fn vessel_coverage(&self, scale: f64, w: u32, h: u32) -> Vec<u8> {
        let mut mask = vec![0u8; w as usize * h as usize];
        for v in &self.vessels {
            let segs = v.points.len().saturating_sub(1);
            for i in 0..segs {
                let t0 = i as f64 / segs as f64;
                let t1 = (i + 1) as f64 / segs as f64;
                let hw0 = 0.5 * scale * (v.width_start + (v.width_end - v.width_start) * t0);
                let hw1 = 0.5 * scale * (v.width_start + (v.width_end - v.width_start) * t1);
                let a = (v.points[i].0 * scale, v.points[i].1 * scale);
                let b = (v.points[i + 1].0 * scale, v.points[i + 1].1 * scale);
                stamp_segment(&mut mask, w, h, a, b, hw0, hw1);
            }
        }
        mask
    }
}

fn stamp_segment(mask: &mut [u8], w: u32, h: u32, a: (f64, f64), b: (f64, f64), hw0: f64, hw1: f64) {
    let pad = hw0.max(hw1) + 1.0;
    let x0 = (a.0.min(b.0) - pad).floor().max(0.0) as u32;
    let y0 = (a.1.min(b.1) - pad).floor().max(0.0) as u32;
    let x1 = ((a.0.max(b.0) + pad).ceil() as u32).min(w);
    let y1 = ((a.1.max(b.1) + pad).ceil() as u32).min(h);
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = (dx * dx + dy * dy).max(1e-12);
    for py in y0..y1 {
        for px in x0..x1 {
            let (x, y) = (px as f64 + 0.5, py as f64 + 0.5);
            let t = (((x - a.0) * dx + (y - a.1) * dy) / len2).clamp(0.0, 1.0);
            let d = (x - (a.0 + t * dx)).hypot(y - (a.1 + t * dy));
            let hw = hw0 + (hw1 - hw0) * t;
            let cover = (hw + 0.5 - d).clamp(0.0, 1.0);
            if cover > 0.0 {
                let i = py as usize * w as usize + px as usize;
                mask[i] = mask[i].max((cover * 255.0).round() as u8);
            }
        }
    }
}

fn random_vessels(rng: &mut impl Rng, retina: &Circle, disc: &Circle, disc_angle: f64) -> Vec<Vessel> {
    // Main arcades leave the disc up and down, curving temporally; smaller
    // nasal branches head away from the macula.
    let temporal = disc_angle + PI;
    let mut roots = vec![
        (temporal - 1.2, 1.0, true),
        (temporal + 1.2, 1.0, true),
        (disc_angle - 0.9, 0.6, false),
        (disc_angle + 0.9, 0.6, false),
    ];
    if rng.random_bool(0.5) {
        roots.push((disc_angle + rng.random_range(-0.3..0.3), 0.45, false));
    }
    let base_width = retina.r * 0.018;
    let mut out = Vec::new();
    for (heading0, thickness, arcade) in roots {
        let mut heading: f64 = heading0 + rng.random_range(-0.15..0.15);
        let bend = if arcade {
            let toward = (temporal - heading).sin().signum();
            toward * rng.random_range(0.025..0.04)
        } else {
            rng.random_range(-0.01..0.01)
        };
        let step = retina.r * 0.03;
        let mut p = (disc.cx + 0.2 * disc.r * heading.cos(), disc.cy + 0.2 * disc.r * heading.sin());
        let mut pts = vec![p];
        let n_steps = if arcade { 40 } else { 22 };
        for _ in 0..n_steps {
            heading += bend + rng.random_range(-0.06..0.06);
            p = (p.0 + step * heading.cos(), p.1 + step * heading.sin());
            if !Circle::new(retina.cx, retina.cy, retina.r * 0.93).contains(p.0, p.1) {
                break;
            }
            pts.push(p);
        }
        let width = base_width * thickness;
        // A few side branches off each main vessel.
        for k in [pts.len() / 3, 2 * pts.len() / 3] {
            if k == 0 || k >= pts.len() {
                continue;
            }
            let mut bh = heading0 + rng.random_range(-1.0..1.0);
            let mut q = pts[k];
            let mut branch = vec![q];
            for _ in 0..12 {
                bh += rng.random_range(-0.1..0.1);
                q = (q.0 + step * 0.8 * bh.cos(), q.1 + step * 0.8 * bh.sin());
                if !Circle::new(retina.cx, retina.cy, retina.r * 0.93).contains(q.0, q.1) {
                    break;
                }
                branch.push(q);
            }
            if branch.len() > 1 {
                out.push(Vessel {
                    points: branch,
                    width_start: width * 0.55,
                    width_end: width * 0.25,
                });
            }
        }
        if pts.len() > 1 {
            out.push(Vessel {
                points: pts,
                width_start: width,
                width_end: width * 0.35,
            });
        }
    }
    out
}

fn smoothstep(e0: f64, e1: f64, x: f64) -> f64 {
    let t = ((x - e0) / (e1 - e0)).clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator log entry for one corpus image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    #[serde(rename = "box")]
    pub gt_box: BoundingBox,
    pub disc: Circle,
    pub retina: Circle,
    pub fringe: bool,
    pub spots: usize,
}

/// A seeded corpus description; images are rendered on demand.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub scenes: Vec<(String, Scene)>,
}

impl Corpus {
    /// Draws `n` scenes. The same `(n, seed, cfg)` always yields the same
    /// corpus.
    pub fn generate(n: usize, seed: u64, cfg: &SynthConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pick = |rng: &mut ChaCha8Rng, rate: f64| {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let k = ((rate * n as f64).round() as usize).min(n);
            let mut flags = vec![false; n];
            for &i in &order[..k] {
                flags[i] = true;
            }
            flags
        };
        let fringe = pick(&mut rng, cfg.fringe_rate);
        let spots = pick(&mut rng, cfg.spot_rate);
        let scenes = (0..n)
            .map(|i| {
                let mut img_rng = ChaCha8Rng::seed_from_u64(rng.random());
                let height = img_rng.random_range(cfg.min_size..=cfg.max_size);
                let aspect = img_rng.random_range(1.0..=cfg.max_aspect.max(1.0));
                let width = (height as f64 * aspect).round() as u32;
                let scene = Scene::random(&mut img_rng, width, height, fringe[i], spots[i], cfg.noise);
                (format!("synth_{i:04}"), scene)
            })
            .collect();
        Self { scenes }
    }

    pub fn entries(&self) -> Vec<CorpusEntry> {
        self.scenes
            .iter()
            .map(|(id, s)| CorpusEntry {
                image_id: id.clone(),
                width: s.width,
                height: s.height,
                gt_box: s.disc_box(1.0),
                disc: s.disc,
                retina: s.retina,
                fringe: s.fringe.is_some(),
                spots: s.spots.len(),
            })
            .collect()
    }
}
