//! PNG and binary PGM/PPM reading and writing.

use std::path::Path;

use image::{DynamicImage, ImageBuffer, ImageFormat, ImageReader, Luma, Rgb};

use super::Image;
use crate::{Error, Result};

/// Sample depth used when writing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BitDepth {
    #[default]
    Eight,
    Sixteen,
}

fn format_err(path: &Path, message: impl ToString) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        message: message.to_string(),
    }
}

fn format_for(path: &Path) -> Result<ImageFormat> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    match ext.as_str() {
        "png" => Ok(ImageFormat::Png),
        "pgm" | "ppm" | "pnm" => Ok(ImageFormat::Pnm),
        _ => Err(format_err(path, format!("unsupported extension '{ext}'"))),
    }
}

/// Loads an 8- or 16-bit grayscale or RGB image, normalizing samples to
/// `[0, 1]`. Alpha channels are dropped.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let reader = ImageReader::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = reader.with_guessed_format().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match reader.format() {
        Some(ImageFormat::Png) | Some(ImageFormat::Pnm) => {}
        other => return Err(format_err(path, format!("unsupported format {other:?}"))),
    }
    let dynamic = reader.decode().map_err(|e| format_err(path, e))?;
    let color = dynamic.color();
    let wide = color.bytes_per_pixel() / color.channel_count() > 1;
    let (w, h) = (dynamic.width() as usize, dynamic.height() as usize);
    let (channels, data): (usize, Vec<f64>) = match (color.has_color(), wide) {
        (false, false) => (1, scale(dynamic.to_luma8().into_raw(), 255.0)),
        (false, true) => (1, scale(dynamic.to_luma16().into_raw(), 65535.0)),
        (true, false) => (3, scale(dynamic.to_rgb8().into_raw(), 255.0)),
        (true, true) => (3, scale(dynamic.to_rgb16().into_raw(), 65535.0)),
    };
    Image::new(w, h, channels, data).map_err(|e| format_err(path, e))
}

fn scale<T: Into<f64>>(raw: Vec<T>, max: f64) -> Vec<f64> {
    raw.into_iter().map(|v| v.into() / max).collect()
}

fn quantize(v: f64, max: f64) -> f64 {
    // f64::round rounds half away from zero
    (v.clamp(0.0, 1.0) * max).round()
}

/// Writes with 8-bit samples; see [`save_image_with_depth`].
pub fn save_image(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    save_image_with_depth(img, path, BitDepth::Eight)
}

/// Writes PNG or binary PGM/PPM (chosen by extension). Samples are clamped
/// to `[0, 1]` and rounded to the nearest code value.
pub fn save_image_with_depth(img: &Image, path: impl AsRef<Path>, depth: BitDepth) -> Result<()> {
    let path = path.as_ref();
    let format = format_for(path)?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    if format == ImageFormat::Pnm {
        let want = if img.channels() == 1 { "pgm" } else { "ppm" };
        if !ext.eq_ignore_ascii_case(want) && !ext.eq_ignore_ascii_case("pnm") {
            return Err(format_err(
                path,
                format!(
                    "{}-channel image must be written as .{want}",
                    img.channels()
                ),
            ));
        }
        return write_pnm(img, path, depth);
    }
    let (w, h) = (img.width() as u32, img.height() as u32);
    let dynamic = match (img.channels(), depth) {
        (1, BitDepth::Eight) => DynamicImage::ImageLuma8(
            ImageBuffer::<Luma<u8>, _>::from_raw(w, h, to_u8(img)).expect("sized"),
        ),
        (1, BitDepth::Sixteen) => DynamicImage::ImageLuma16(
            ImageBuffer::<Luma<u16>, _>::from_raw(w, h, to_u16(img)).expect("sized"),
        ),
        (_, BitDepth::Eight) => DynamicImage::ImageRgb8(
            ImageBuffer::<Rgb<u8>, _>::from_raw(w, h, to_u8(img)).expect("sized"),
        ),
        (_, BitDepth::Sixteen) => DynamicImage::ImageRgb16(
            ImageBuffer::<Rgb<u16>, _>::from_raw(w, h, to_u16(img)).expect("sized"),
        ),
    };
    let map_err = |e: image::ImageError| match e {
        image::ImageError::IoError(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => format_err(path, other),
    };
    dynamic.save_with_format(path, format).map_err(map_err)
}

/// Binary P5/P6. Written directly since 16-bit samples need big-endian
/// words under a 65535 maxval.
fn write_pnm(img: &Image, path: &Path, depth: BitDepth) -> Result<()> {
    let (w, h) = (img.width(), img.height());
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let mut bytes = Vec::new();
    let maxval = match depth {
        BitDepth::Eight => {
            bytes.extend(to_u8(img));
            255
        }
        BitDepth::Sixteen => {
            bytes.extend(to_u16(img).into_iter().flat_map(u16::to_be_bytes));
            65535
        }
    };
    let mut out = format!("{magic}\n{w} {h}\n{maxval}\n").into_bytes();
    out.extend(bytes);
    std::fs::write(path, out).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn to_u8(img: &Image) -> Vec<u8> {
    img.data()
        .iter()
        .map(|&v| quantize(v, 255.0) as u8)
        .collect()
}

fn to_u16(img: &Image) -> Vec<u16> {
    img.data()
        .iter()
        .map(|&v| quantize(v, 65535.0) as u16)
        .collect()
}
