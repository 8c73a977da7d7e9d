use std::path::Path;

use image::{DynamicImage, ImageFormat};

use super::{ImagingError, RasterImage};

/// Decodes PNG or JPEG bytes. Alpha is dropped; 16-bit samples are
/// right-shifted to 8 bits.
pub fn decode_image(bytes: &[u8]) -> Result<RasterImage, ImagingError> {
    let format = image::guess_format(bytes).map_err(|e| ImagingError::Decode(e.to_string()))?;
    if !matches!(format, ImageFormat::Png | ImageFormat::Jpeg) {
        return Err(ImagingError::Decode(format!(
            "unsupported format {format:?}"
        )));
    }
    let decoded = image::load_from_memory_with_format(bytes, format)
        .map_err(|e| ImagingError::Decode(e.to_string()))?;
    from_dynamic(decoded)
}

pub fn load_image(path: impl AsRef<Path>) -> Result<RasterImage, ImagingError> {
    let bytes = std::fs::read(path)?;
    decode_image(&bytes)
}

/// Encodes as an 8-bit grayscale or RGB PNG.
pub fn encode_png(img: &RasterImage) -> Result<Vec<u8>, ImagingError> {
    let color = match img.channels() {
        1 => image::ExtendedColorType::L8,
        _ => image::ExtendedColorType::Rgb8,
    };
    let mut out = Vec::new();
    image::ImageEncoder::write_image(
        image::codecs::png::PngEncoder::new(&mut out),
        img.data(),
        img.width(),
        img.height(),
        color,
    )
    .map_err(|e| ImagingError::Decode(e.to_string()))?;
    Ok(out)
}

fn from_dynamic(img: DynamicImage) -> Result<RasterImage, ImagingError> {
    let (w, h) = (img.width(), img.height());
    match img {
        DynamicImage::ImageLuma8(buf) => RasterImage::new(w, h, 1, buf.into_raw()),
        DynamicImage::ImageLumaA8(buf) => {
            RasterImage::new(w, h, 1, buf.into_raw().chunks_exact(2).map(|p| p[0]).collect())
        }
        DynamicImage::ImageRgb8(buf) => RasterImage::new(w, h, 3, buf.into_raw()),
        DynamicImage::ImageRgba8(buf) => RasterImage::new(w, h, 3, drop_alpha(&buf.into_raw())),
        DynamicImage::ImageLuma16(buf) => RasterImage::new(w, h, 1, shift16(buf.as_raw(), 1, 1)),
        DynamicImage::ImageLumaA16(buf) => RasterImage::new(w, h, 1, shift16(buf.as_raw(), 2, 1)),
        DynamicImage::ImageRgb16(buf) => RasterImage::new(w, h, 3, shift16(buf.as_raw(), 3, 3)),
        DynamicImage::ImageRgba16(buf) => RasterImage::new(w, h, 3, shift16(buf.as_raw(), 4, 3)),
        other => RasterImage::new(w, h, 3, other.to_rgb8().into_raw()),
    }
}

fn drop_alpha(rgba: &[u8]) -> Vec<u8> {
    rgba.chunks_exact(4).flat_map(|p| [p[0], p[1], p[2]]).collect()
}

fn shift16(samples: &[u16], stride: usize, keep: usize) -> Vec<u8> {
    samples
        .chunks_exact(stride)
        .flat_map(|p| p[..keep].iter().map(|&v| (v >> 8) as u8))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png_round_trip() {
        let rgb = RasterImage::new(3, 2, 3, (0..18).map(|v| v * 13).collect()).unwrap();
        assert_eq!(decode_image(&encode_png(&rgb).unwrap()).unwrap(), rgb);
        let gray = RasterImage::new(2, 2, 1, vec![0, 50, 100, 255]).unwrap();
        assert_eq!(decode_image(&encode_png(&gray).unwrap()).unwrap(), gray);
    }
    use image::{ImageBuffer, Luma, Rgba};
    use std::io::Cursor;

    fn encode(img: DynamicImage, format: ImageFormat) -> Vec<u8> {
        let mut out = Cursor::new(Vec::new());
        img.write_to(&mut out, format).unwrap();
        out.into_inner()
    }

    #[test]
    fn sixteen_bit_png_is_right_shifted() {
        let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
            ImageBuffer::from_raw(2, 1, vec![0x12ff, 0xff00]).unwrap();
        let bytes = encode(DynamicImage::ImageLuma16(buf), ImageFormat::Png);
        let img = decode_image(&bytes).unwrap();
        assert_eq!(img.channels(), 1);
        assert_eq!(img.data(), &[0x12, 0xff]);
    }

    #[test]
    fn rgba_png_drops_alpha() {
        let buf: ImageBuffer<Rgba<u8>, Vec<u8>> =
            ImageBuffer::from_raw(1, 1, vec![1, 2, 3, 4]).unwrap();
        let bytes = encode(DynamicImage::ImageRgba8(buf), ImageFormat::Png);
        let img = decode_image(&bytes).unwrap();
        assert_eq!(img.channels(), 3);
        assert_eq!(img.data(), &[1, 2, 3]);
    }

    #[test]
    fn jpeg_decodes_to_rgb() {
        let buf = image::RgbImage::from_pixel(8, 8, image::Rgb([120, 60, 30]));
        let bytes = encode(DynamicImage::ImageRgb8(buf), ImageFormat::Jpeg);
        let img = decode_image(&bytes).unwrap();
        assert_eq!((img.width(), img.height(), img.channels()), (8, 8, 3));
        assert!(img.pixel(3, 3)[0].abs_diff(120) <= 3);
    }

    #[test]
    fn garbage_is_a_decode_error() {
        assert!(matches!(
            decode_image(b"not an image"),
            Err(ImagingError::Decode(_))
        ));
    }
}
