use std::io::Cursor;
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageFormat};

use super::{gray_from_interleaved, EdgeMap, GrayImage, RealPlane};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

fn open(path: &Path) -> Result<DynamicImage> {
    image::open(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads any supported image as 8-bit RGB.
pub fn load_rgb(path: &Path) -> Result<image::RgbImage> {
    Ok(open(path)?.to_rgb8())
}

/// Reads an image as gray; color inputs go through the luma conversion.
pub fn load_gray(path: &Path) -> Result<GrayImage> {
    let img = open(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img {
        DynamicImage::ImageLuma8(buf) => GrayImage::new(w, h, buf.into_raw()),
        DynamicImage::ImageRgba8(buf) => gray_from_interleaved(w, h, 4, buf.as_raw()),
        other => gray_from_interleaved(w, h, 3, other.to_rgb8().as_raw()),
    }
}

fn format_for(path: &Path) -> Result<ImageFormat> {
    match ImageFormat::from_path(path) {
        Ok(f @ (ImageFormat::Png | ImageFormat::Pnm)) => Ok(f),
        _ => Err(Error::param(
            "output",
            format!("{} must end in .png or .pgm", path.display()),
        )),
    }
}

pub fn save_gray(path: &Path, img: &GrayImage) -> Result<()> {
    let format = format_for(path)?;
    let buf = image::GrayImage::from_raw(img.width() as u32, img.height() as u32, img.pixels().to_vec())
        .expect("buffer matches dimensions");
    let mut bytes = Cursor::new(Vec::new());
    let encoded = match format {
        // binary graymap (P5) rather than the encoder's default arbitrary map
        ImageFormat::Pnm => PnmEncoder::new(&mut bytes)
            .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
            .write_image(buf.as_raw(), buf.width(), buf.height(), ExtendedColorType::L8),
        _ => DynamicImage::ImageLuma8(buf).write_to(&mut bytes, format),
    };
    encoded.map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })?;
    write_atomic(path, bytes.get_ref())
}

/// Writes an edge map as an 8-bit {0, 255} image.
pub fn save_edges(path: &Path, edges: &EdgeMap) -> Result<()> {
    save_gray(path, &edges.to_gray())
}

/// Writes a raw response plane: 32-bit float TIFF for `.tif`/`.tiff`,
/// otherwise a tab-separated text grid with round-trip float formatting.
pub fn save_plane(path: &Path, plane: &RealPlane) -> Result<()> {
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    let bytes = match ext.as_deref() {
        Some("tif" | "tiff") => {
            let data: Vec<f32> = plane.values().iter().map(|&v| v as f32).collect();
            let mut buf = Cursor::new(Vec::new());
            tiff::encoder::TiffEncoder::new(&mut buf)
                .and_then(|mut enc| {
                    enc.write_image::<tiff::encoder::colortype::Gray32Float>(
                        plane.width() as u32,
                        plane.height() as u32,
                        &data,
                    )
                })
                .map_err(|e| Error::param("dump-response", format!("TIFF encoding failed: {e}")))?;
            buf.into_inner()
        }
        _ => {
            let mut text = String::new();
            for y in 0..plane.height() {
                let row: Vec<String> = (0..plane.width()).map(|x| plane.get(x, y).to_string()).collect();
                text.push_str(&row.join("\t"));
                text.push('\n');
            }
            text.into_bytes()
        }
    };
    write_atomic(path, &bytes)
}
