//! 8-bit grayscale raster and binary mask types, plus PGM/PNG file I/O.
//!
//! PGM (P5, maxval <= 255) is read and written natively so that a
//! load/save cycle round-trips bit-exactly. PNG decoding goes through the
//! `image` crate; color inputs are reduced with BT.601 luminance weights,
//! rounding half away from zero.

use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt header: {0}")]
    CorruptHeader(String),
    #[error("invalid dimensions {width}x{height} for {len} pixels")]
    BadDimensions { width: u32, height: u32, len: usize },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Single-channel 8-bit image, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GrayImage({}x{})", self.width, self.height)
    }
}

impl GrayImage {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 || data.len() != (width as usize) * (height as usize) {
            return Err(ImageError::BadDimensions { width, height, len: data.len() });
        }
        Ok(Self { width, height, data })
    }

    /// All pixels set to `value`.
    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        assert!(width > 0 && height > 0);
        Self { width, height, data: vec![value; width as usize * height as usize] }
    }

    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> u8) -> Self {
        assert!(width > 0 && height > 0);
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: u8) {
        debug_assert!(x < self.width && y < self.height);
        self.data[y as usize * self.width as usize + x as usize] = v;
    }

    /// Clamped lookup: coordinates outside the image read the nearest edge pixel.
    #[inline]
    pub fn get_clamped(&self, x: i64, y: i64) -> u8 {
        let xc = x.clamp(0, self.width as i64 - 1) as u32;
        let yc = y.clamp(0, self.height as i64 - 1) as u32;
        self.get(xc, yc)
    }

    /// 256-bin intensity histogram.
    pub fn histogram(&self) -> [u64; 256] {
        let mut hist = [0u64; 256];
        for &v in &self.data {
            hist[v as usize] += 1;
        }
        hist
    }

    pub fn crop(&self, x0: u32, y0: u32, w: u32, h: u32) -> GrayImage {
        assert!(x0 + w <= self.width && y0 + h <= self.height && w > 0 && h > 0);
        let mut data = Vec::with_capacity(w as usize * h as usize);
        for y in y0..y0 + h {
            let row = y as usize * self.width as usize;
            data.extend_from_slice(&self.data[row + x0 as usize..row + (x0 + w) as usize]);
        }
        GrayImage { width: w, height: h, data }
    }
}

/// Row-major boolean mask; `true` marks foreground.
#[derive(Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    data: Vec<bool>,
}

impl fmt::Debug for BinaryMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryMask({}x{}, {} fg)", self.width, self.height, self.count_foreground())
    }
}

impl BinaryMask {
    pub fn new(width: u32, height: u32, data: Vec<bool>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 || data.len() != (width as usize) * (height as usize) {
            return Err(ImageError::BadDimensions { width, height, len: data.len() });
        }
        Ok(Self { width, height, data })
    }

    pub fn empty(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0);
        Self { width, height, data: vec![false; width as usize * height as usize] }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        debug_assert!(x < self.width && y < self.height);
        self.data[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        debug_assert!(x < self.width && y < self.height);
        self.data[y as usize * self.width as usize + x as usize] = v;
    }

    /// Out-of-bounds coordinates count as background.
    #[inline]
    pub fn get_or_false(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            false
        } else {
            self.get(x as u32, y as u32)
        }
    }

    pub fn count_foreground(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn crop(&self, x0: u32, y0: u32, w: u32, h: u32) -> BinaryMask {
        assert!(x0 + w <= self.width && y0 + h <= self.height && w > 0 && h > 0);
        let mut data = Vec::with_capacity(w as usize * h as usize);
        for y in y0..y0 + h {
            let row = y as usize * self.width as usize;
            data.extend_from_slice(&self.data[row + x0 as usize..row + (x0 + w) as usize]);
        }
        BinaryMask { width: w, height: h, data }
    }

    /// Render as a PGM-compatible image (foreground 255, background 0).
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&b| if b { 255 } else { 0 }).collect(),
        }
    }

    /// Foreground = pixels >= 128, for reading masks stored as PGM.
    pub fn from_gray(img: &GrayImage) -> BinaryMask {
        BinaryMask {
            width: img.width,
            height: img.height,
            data: img.data.iter().map(|&v| v >= 128).collect(),
        }
    }
}

/// BT.601 luminance, rounded half away from zero.
#[inline]
pub fn luminance_bt601(r: u8, g: u8, b: u8) -> u8 {
    let y = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
    y.round().clamp(0.0, 255.0) as u8
}

/// Loads a grayscale image from a PGM (P5) or 8-bit PNG file.
///
/// PNG inputs may be gray or RGB(A); color is converted with
/// [`luminance_bt601`]. 16-bit depth in either format is rejected.
pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage, ImageError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            ImageError::FileNotFound(path.display().to_string())
        } else {
            ImageError::Io(e)
        }
    })?;
    let mut reader = BufReader::new(file);
    let mut magic = [0u8; 2];
    reader.read_exact(&mut magic)?;
    match &magic {
        b"P5" => read_pgm_body(reader),
        [0x89, b'P'] => load_png(path),
        _ => Err(ImageError::UnsupportedFormat(format!(
            "{}: expected PGM (P5) or PNG",
            path.display()
        ))),
    }
}

fn load_png(path: &Path) -> Result<GrayImage, ImageError> {
    let dynimg = image::open(path)
        .map_err(|e| ImageError::UnsupportedFormat(format!("{}: {e}", path.display())))?;
    use image::DynamicImage::*;
    let (width, height) = (dynimg.width(), dynimg.height());
    let data = match dynimg {
        ImageLuma8(img) => img.into_raw(),
        ImageLumaA8(img) => img.pixels().map(|p| p.0[0]).collect(),
        ImageRgb8(img) => img.pixels().map(|p| luminance_bt601(p.0[0], p.0[1], p.0[2])).collect(),
        ImageRgba8(img) => img.pixels().map(|p| luminance_bt601(p.0[0], p.0[1], p.0[2])).collect(),
        _ => {
            return Err(ImageError::UnsupportedFormat(format!(
                "{}: only 8-bit gray or RGB PNG supported",
                path.display()
            )))
        }
    };
    GrayImage::new(width, height, data)
}

/// Parses the remainder of a P5 stream after the magic bytes.
fn read_pgm_body(mut reader: impl BufRead) -> Result<GrayImage, ImageError> {
    let width = read_pgm_int(&mut reader)?;
    let height = read_pgm_int(&mut reader)?;
    let maxval = read_pgm_int(&mut reader)?;
    if maxval > 255 {
        return Err(ImageError::UnsupportedFormat(format!(
            "PGM maxval {maxval} exceeds 8-bit range"
        )));
    }
    if maxval == 0 {
        return Err(ImageError::CorruptHeader("PGM maxval 0".into()));
    }
    if width == 0 || height == 0 {
        return Err(ImageError::CorruptHeader(format!("PGM dimensions {width}x{height}")));
    }
    // The single whitespace byte after maxval was consumed by read_pgm_int.
    let n = width as usize * height as usize;
    let mut data = vec![0u8; n];
    reader
        .read_exact(&mut data)
        .map_err(|_| ImageError::CorruptHeader("PGM pixel data truncated".into()))?;
    GrayImage::new(width as u32, height as u32, data)
}

/// Reads one ASCII integer token, skipping whitespace and `#` comments.
fn read_pgm_int(reader: &mut impl BufRead) -> Result<u64, ImageError> {
    let mut byte = [0u8; 1];
    // Skip whitespace and comment lines.
    loop {
        reader
            .read_exact(&mut byte)
            .map_err(|_| ImageError::CorruptHeader("PGM header truncated".into()))?;
        match byte[0] {
            b' ' | b'\t' | b'\r' | b'\n' => continue,
            b'#' => {
                let mut comment = Vec::new();
                reader.read_until(b'\n', &mut comment)?;
            }
            _ => break,
        }
    }
    if !byte[0].is_ascii_digit() {
        return Err(ImageError::CorruptHeader(format!(
            "unexpected byte 0x{:02x} in PGM header",
            byte[0]
        )));
    }
    let mut value: u64 = (byte[0] - b'0') as u64;
    loop {
        match reader.read_exact(&mut byte) {
            Ok(()) => {}
            // EOF right after a digit is only legal before pixel data; caller
            // will fail on read_exact if the header was actually truncated.
            Err(_) => return Ok(value),
        }
        if byte[0].is_ascii_digit() {
            value = value * 10 + (byte[0] - b'0') as u64;
            if value > 1 << 32 {
                return Err(ImageError::CorruptHeader("PGM header value overflow".into()));
            }
        } else if matches!(byte[0], b' ' | b'\t' | b'\r' | b'\n') {
            return Ok(value);
        } else {
            return Err(ImageError::CorruptHeader(format!(
                "unexpected byte 0x{:02x} in PGM header",
                byte[0]
            )));
        }
    }
}

/// Writes a binary PGM (P5, maxval 255). Round-trips bit-exactly with
/// [`load_image`].
pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<(), ImageError> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write!(file, "P5\n{} {}\n255\n", img.width, img.height)?;
    file.write_all(&img.data)?;
    Ok(())
}
