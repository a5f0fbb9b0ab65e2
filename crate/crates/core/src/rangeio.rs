//! Range images: the discrete graph surface `z = f(x, y)`.
//!
//! Depth follows the "larger value = closer to the camera" convention. Holes
//! and background are carried in a validity mask; invalid pixels never take
//! part in downstream arithmetic.
//!
//! Two self-contained file formats are supported:
//!
//! * **AsciiGrid**: first line `RIG <width> <height>`, then `height` lines of
//!   `width` whitespace-separated decimal depths. The token `NaN` marks an
//!   invalid pixel.
//! * **Pgm16**: binary PGM (`P5`) with maxval 65535 and big-endian samples.
//!   Sample 0 is an invalid pixel. An optional header comment `# scale <s>`
//!   maps sample `v` to depth `v * s` (default scale 1).

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RangeIoError {
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("parse error at {location}: {message}")]
    ParseError { location: String, message: String },
    #[error("dimension mismatch: header says {expected} samples, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("crop rectangle {rect:?} does not fit a {width}x{height} image")]
    RectOutOfBounds {
        rect: CropRect,
        width: usize,
        height: usize,
    },
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("depth {depth} at ({row}, {col}) is not representable with scale {scale}")]
    Unrepresentable {
        row: usize,
        col: usize,
        depth: f64,
        scale: f64,
    },
}

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> RangeIoError {
    RangeIoError::ParseError {
        location: location.into(),
        message: message.into(),
    }
}

/// Supported on-disk formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeFormat {
    AsciiGrid,
    Pgm16,
}

impl RangeFormat {
    /// Guess the format from a file extension (`.pgm` is Pgm16, anything else AsciiGrid).
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("pgm") => RangeFormat::Pgm16,
            _ => RangeFormat::AsciiGrid,
        }
    }
}

/// A rectangular grid of depth samples with a validity mask.
///
/// Pixel `(row, col)` lives at index `row * width + col`. The column index is
/// the surface's `x` coordinate and the row index its `y` coordinate.
/// Equality ignores whatever depth is stored under invalid pixels.
#[derive(Debug, Clone)]
pub struct RangeImage {
    width: usize,
    height: usize,
    depth: Vec<f64>,
    valid: Vec<bool>,
}

impl PartialEq for RangeImage {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.valid == other.valid
            && self
                .depth
                .iter()
                .zip(&other.depth)
                .zip(&self.valid)
                .all(|((a, b), &v)| !v || a == b)
    }
}

impl RangeImage {
    /// Builds an image, checking sizes and that every valid depth is finite.
    pub fn new(
        width: usize,
        height: usize,
        depth: Vec<f64>,
        valid: Vec<bool>,
    ) -> Result<Self, RangeIoError> {
        if width == 0 || height == 0 {
            return Err(RangeIoError::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        let n = width * height;
        if depth.len() != n || valid.len() != n {
            return Err(RangeIoError::DimensionMismatch {
                expected: n,
                found: depth.len().min(valid.len()),
            });
        }
        if let Some(i) = (0..n).find(|&i| valid[i] && !depth[i].is_finite()) {
            return Err(RangeIoError::InvalidImage(format!(
                "non-finite depth at valid pixel ({}, {})",
                i / width,
                i % width
            )));
        }
        Ok(Self {
            width,
            height,
            depth,
            valid,
        })
    }

    /// Builds an image where non-finite depths become invalid pixels.
    pub fn from_depths(width: usize, height: usize, depth: Vec<f64>) -> Result<Self, RangeIoError> {
        let valid = depth.iter().map(|z| z.is_finite()).collect();
        Self::new(width, height, depth, valid)
    }

    /// Builds a fully valid image from a function of `(row, col)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let mut depth = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                depth.push(f(r, c));
            }
        }
        Self::from_depths(width, height, depth).expect("sizes are consistent by construction")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    #[inline]
    pub fn is_valid(&self, row: usize, col: usize) -> bool {
        self.valid[self.index(row, col)]
    }

    /// Depth at a valid pixel, `None` for holes.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        let i = self.index(row, col);
        self.valid[i].then(|| self.depth[i])
    }

    /// Raw depth buffer. Values at invalid pixels are unspecified.
    pub fn depths(&self) -> &[f64] {
        &self.depth
    }

    pub fn mask(&self) -> &[bool] {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// Iterator over `(row, col, depth)` of valid pixels in row-major order.
    pub fn valid_pixels(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let w = self.width;
        self.depth
            .iter()
            .zip(&self.valid)
            .enumerate()
            .filter(|(_, (_, &v))| v)
            .map(move |(i, (&z, _))| (i / w, i % w, z))
    }

    /// `(min, max)` over valid depths.
    pub fn depth_range(&self) -> Option<(f64, f64)> {
        self.valid_pixels().fold(None, |acc, (_, _, z)| match acc {
            None => Some((z, z)),
            Some((lo, hi)) => Some((lo.min(z), hi.max(z))),
        })
    }

    /// Copy with a new validity mask; invalidating is always allowed.
    pub(crate) fn with_mask(&self, valid: Vec<bool>) -> Self {
        debug_assert_eq!(valid.len(), self.valid.len());
        let valid = valid
            .into_iter()
            .zip(&self.valid)
            .map(|(a, &b)| a && b)
            .collect();
        Self {
            width: self.width,
            height: self.height,
            depth: self.depth.clone(),
            valid,
        }
    }

    /// Same mask, new depth values (must be finite where valid).
    pub(crate) fn with_depths(&self, depth: Vec<f64>) -> Self {
        debug_assert_eq!(depth.len(), self.depth.len());
        Self {
            width: self.width,
            height: self.height,
            depth,
            valid: self.valid.clone(),
        }
    }

    /// Every depth multiplied by `-1`; mask unchanged.
    pub fn negated(&self) -> Self {
        self.with_depths(self.depth.iter().map(|z| -z).collect())
    }

    /// Exact 90° counter-clockwise grid rotation (pixel permutation).
    ///
    /// Source pixel `(r, c)` lands at `(width - 1 - c, r)`.
    pub fn rot90(&self) -> Self {
        let (w, h) = (self.width, self.height);
        let mut depth = vec![0.0; w * h];
        let mut valid = vec![false; w * h];
        for r in 0..h {
            for c in 0..w {
                let (nr, nc) = (w - 1 - c, r);
                let dst = nr * h + nc;
                depth[dst] = self.depth[self.index(r, c)];
                valid[dst] = self.valid[self.index(r, c)];
            }
        }
        Self {
            width: h,
            height: w,
            depth,
            valid,
        }
    }

    /// Left-right mirror.
    pub fn flip_horizontal(&self) -> Self {
        let mut out = self.clone();
        for r in 0..self.height {
            for c in 0..self.width {
                let src = self.index(r, self.width - 1 - c);
                let dst = self.index(r, c);
                out.depth[dst] = self.depth[src];
                out.valid[dst] = self.valid[src];
            }
        }
        out
    }

    /// Top-bottom mirror.
    pub fn flip_vertical(&self) -> Self {
        let mut out = self.clone();
        for r in 0..self.height {
            for c in 0..self.width {
                let src = self.index(self.height - 1 - r, c);
                let dst = self.index(r, c);
                out.depth[dst] = self.depth[src];
                out.valid[dst] = self.valid[src];
            }
        }
        out
    }
}

/// Crop window: top-left pixel plus extent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CropRect {
    pub row0: usize,
    pub col0: usize,
    pub rows: usize,
    pub cols: usize,
}

impl CropRect {
    pub fn new(row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        Self {
            row0,
            col0,
            rows,
            cols,
        }
    }

    /// The whole image.
    pub fn full(img: &RangeImage) -> Self {
        Self::new(0, 0, img.height(), img.width())
    }

    /// A `rows x cols` window centered in a `height x width` image.
    pub fn centered(height: usize, width: usize, rows: usize, cols: usize) -> Self {
        let rows = rows.min(height);
        let cols = cols.min(width);
        Self::new((height - rows) / 2, (width - cols) / 2, rows, cols)
    }

    pub fn fits(&self, width: usize, height: usize) -> bool {
        self.rows >= 1
            && self.cols >= 1
            && self.row0.checked_add(self.rows).is_some_and(|e| e <= height)
            && self.col0.checked_add(self.cols).is_some_and(|e| e <= width)
    }

    /// `inner` is expressed relative to `self`; the result is relative to the
    /// image `self` was taken from.
    pub fn compose(&self, inner: &CropRect) -> CropRect {
        CropRect::new(
            self.row0 + inner.row0,
            self.col0 + inner.col0,
            inner.rows,
            inner.cols,
        )
    }
}

/// Copies the pixels inside `rect`; no resampling.
pub fn crop(img: &RangeImage, rect: &CropRect) -> Result<RangeImage, RangeIoError> {
    if !rect.fits(img.width, img.height) {
        return Err(RangeIoError::RectOutOfBounds {
            rect: *rect,
            width: img.width,
            height: img.height,
        });
    }
    let mut depth = Vec::with_capacity(rect.rows * rect.cols);
    let mut valid = Vec::with_capacity(rect.rows * rect.cols);
    for r in rect.row0..rect.row0 + rect.rows {
        let start = img.index(r, rect.col0);
        depth.extend_from_slice(&img.depth[start..start + rect.cols]);
        valid.extend_from_slice(&img.valid[start..start + rect.cols]);
    }
    RangeImage::new(rect.cols, rect.rows, depth, valid)
}

pub fn load_range_image(path: &Path, format: RangeFormat) -> Result<RangeImage, RangeIoError> {
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => RangeIoError::FileNotFound(path.display().to_string()),
        _ => RangeIoError::Io(e),
    })?;
    match format {
        RangeFormat::AsciiGrid => {
            let text = std::str::from_utf8(&bytes)
                .map_err(|e| parse_err(format!("byte {}", e.valid_up_to()), "not valid UTF-8"))?;
            parse_ascii_grid(text)
        }
        RangeFormat::Pgm16 => parse_pgm16(&bytes),
    }
}

pub fn save_range_image(
    img: &RangeImage,
    path: &Path,
    format: RangeFormat,
) -> Result<(), RangeIoError> {
    let bytes = match format {
        RangeFormat::AsciiGrid => write_ascii_grid(img).into_bytes(),
        RangeFormat::Pgm16 => write_pgm16(img, pgm16_auto_scale(img))?,
    };
    fs::write(path, bytes)?;
    Ok(())
}

pub fn parse_ascii_grid(text: &str) -> Result<RangeImage, RangeIoError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| parse_err("line 1", "empty file"))?;
    let mut tok = header.split_whitespace();
    if tok.next() != Some("RIG") {
        return Err(parse_err("line 1", "expected magic `RIG`"));
    }
    let mut dim = |name: &str| -> Result<usize, RangeIoError> {
        tok.next()
            .ok_or_else(|| parse_err("line 1", format!("missing {name}")))?
            .parse::<usize>()
            .map_err(|e| parse_err("line 1", format!("bad {name}: {e}")))
    };
    let width = dim("width")?;
    let height = dim("height")?;
    if width == 0 || height == 0 {
        return Err(parse_err("line 1", "dimensions must be positive"));
    }

    let mut depth = Vec::with_capacity(width * height);
    let mut valid = Vec::with_capacity(width * height);
    let mut rows = 0;
    for (lineno, line) in lines {
        rows += 1;
        let before = depth.len();
        for (k, t) in line.split_whitespace().enumerate() {
            if t == "NaN" {
                depth.push(0.0);
                valid.push(false);
                continue;
            }
            let z: f64 = t.parse().map_err(|_| {
                parse_err(
                    format!("line {}, column {}", lineno + 1, k + 1),
                    format!("bad depth token `{t}`"),
                )
            })?;
            if !z.is_finite() {
                return Err(parse_err(
                    format!("line {}, column {}", lineno + 1, k + 1),
                    "non-finite depth; use `NaN` for holes",
                ));
            }
            depth.push(z);
            valid.push(true);
        }
        if depth.len() - before != width {
            return Err(RangeIoError::DimensionMismatch {
                expected: width * height,
                found: depth.len(),
            });
        }
    }
    if rows != height {
        return Err(RangeIoError::DimensionMismatch {
            expected: width * height,
            found: depth.len(),
        });
    }
    RangeImage::new(width, height, depth, valid)
}

pub fn write_ascii_grid(img: &RangeImage) -> String {
    let mut out = format!("RIG {} {}\n", img.width, img.height);
    for r in 0..img.height {
        let row: Vec<String> = (0..img.width)
            .map(|c| match img.get(r, c) {
                Some(z) => format!("{z}"),
                None => "NaN".to_string(),
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Splits a PGM header into whitespace tokens, collecting `#` comments.
struct PgmHeader<'a> {
    bytes: &'a [u8],
    pos: usize,
    comments: Vec<String>,
}

impl<'a> PgmHeader<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                let start = self.pos + 1;
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                self.comments
                    .push(String::from_utf8_lossy(&self.bytes[start..self.pos]).trim().to_string());
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&'a str, RangeIoError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(parse_err(format!("offset {start}"), "truncated header"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| parse_err(format!("offset {start}"), "non-ASCII header token"))
    }

    fn number(&mut self, name: &str) -> Result<usize, RangeIoError> {
        let at = self.pos;
        self.token()?
            .parse()
            .map_err(|_| parse_err(format!("offset {at}"), format!("bad {name}")))
    }
}

pub fn parse_pgm16(bytes: &[u8]) -> Result<RangeImage, RangeIoError> {
    let mut hdr = PgmHeader {
        bytes,
        pos: 0,
        comments: Vec::new(),
    };
    if hdr.token()? != "P5" {
        return Err(parse_err("offset 0", "expected magic `P5`"));
    }
    let width = hdr.number("width")?;
    let height = hdr.number("height")?;
    let maxval = hdr.number("maxval")?;
    if maxval != 65535 {
        return Err(parse_err(
            format!("offset {}", hdr.pos),
            format!("maxval must be 65535, got {maxval}"),
        ));
    }
    if width == 0 || height == 0 {
        return Err(parse_err("header", "dimensions must be positive"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    let data_start = hdr.pos + 1;
    let payload = bytes.get(data_start..).unwrap_or(&[]);
    let n = width * height;
    if payload.len() != 2 * n {
        return Err(RangeIoError::DimensionMismatch {
            expected: n,
            found: payload.len() / 2,
        });
    }

    let mut scale = 1.0;
    for c in &hdr.comments {
        let mut parts = c.split_whitespace();
        if parts.next() == Some("scale") {
            scale = parts
                .next()
                .and_then(|s| s.parse::<f64>().ok())
                .filter(|s| s.is_finite() && *s > 0.0)
                .ok_or_else(|| parse_err("header", format!("bad scale comment `{c}`")))?;
        }
    }

    let mut depth = Vec::with_capacity(n);
    let mut valid = Vec::with_capacity(n);
    for pair in payload.chunks_exact(2) {
        let v = u16::from_be_bytes([pair[0], pair[1]]);
        depth.push(if v == 0 { 0.0 } else { f64::from(v) * scale });
        valid.push(v != 0);
    }
    RangeImage::new(width, height, depth, valid)
}

/// Largest scale that still resolves the image's depth range, rounded to a
/// power of two so that samples map back to depths without rounding error.
pub fn pgm16_auto_scale(img: &RangeImage) -> f64 {
    match img.depth_range() {
        Some((_, hi)) if hi > 0.0 => {
            let raw = hi / 65535.0;
            2f64.powi(raw.log2().ceil() as i32)
        }
        _ => 1.0,
    }
}

/// Encodes with the given scale. Valid depths must round to a sample in
/// `1..=65535`.
pub fn write_pgm16(img: &RangeImage, scale: f64) -> Result<Vec<u8>, RangeIoError> {
    let mut out = Vec::with_capacity(64 + 2 * img.width * img.height);
    write!(
        out,
        "P5\n# scale {scale}\n{} {}\n65535\n",
        img.width, img.height
    )?;
    for r in 0..img.height {
        for c in 0..img.width {
            let v: u16 = match img.get(r, c) {
                None => 0,
                Some(z) => {
                    let s = (z / scale).round();
                    if !(1.0..=65535.0).contains(&s) {
                        return Err(RangeIoError::Unrepresentable {
                            row: r,
                            col: c,
                            depth: z,
                            scale,
                        });
                    }
                    s as u16
                }
            };
            out.extend_from_slice(&v.to_be_bytes());
        }
    }
    Ok(out)
}

/// Writes an 8-bit grayscale PGM.
pub fn write_pgm8(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(w: usize, h: usize) -> RangeImage {
        RangeImage::from_fn(w, h, |r, c| (r * 100 + c) as f64)
    }

    #[test]
    fn constant_ascii_grid() {
        let img = parse_ascii_grid("RIG 3 3\n5.0 5.0 5.0\n5.0 5.0 5.0\n5.0 5.0 5.0\n").unwrap();
        assert_eq!((img.width(), img.height()), (3, 3));
        assert!(img.valid_pixels().all(|(_, _, z)| z == 5.0));
        assert_eq!(img.valid_count(), 9);
    }

    #[test]
    fn nan_token_marks_hole() {
        let img = parse_ascii_grid("RIG 3 2\n1 2 3\n4 NaN 6\n").unwrap();
        assert!(!img.is_valid(1, 1));
        assert_eq!(img.valid_count(), 5);
        assert_eq!(img.get(1, 2), Some(6.0));
    }

    #[test]
    fn ascii_grid_errors() {
        assert!(matches!(
            parse_ascii_grid("RIG 3 2\n1 2 3\n4 5\n"),
            Err(RangeIoError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            parse_ascii_grid("RIG 2 2\n1 2\n"),
            Err(RangeIoError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            parse_ascii_grid("RIG 2 1\n1 x\n"),
            Err(RangeIoError::ParseError { .. })
        ));
        assert!(matches!(
            parse_ascii_grid("GRID 2 1\n1 2\n"),
            Err(RangeIoError::ParseError { .. })
        ));
    }

    #[test]
    fn missing_file() {
        let err = load_range_image(Path::new("/nonexistent/x.rig"), RangeFormat::AsciiGrid);
        assert!(matches!(err, Err(RangeIoError::FileNotFound(_))));
    }

    /// Hand-assembled PGM bytes, independent of `write_pgm16`.
    fn reference_pgm(width: usize, height: usize, samples: &[u16], scale: Option<&str>) -> Vec<u8> {
        let mut out = b"P5\n".to_vec();
        if let Some(s) = scale {
            out.extend_from_slice(format!("# scale {s}\n").as_bytes());
        }
        out.extend_from_slice(format!("{width} {height}\n65535\n").as_bytes());
        for &s in samples {
            out.push((s >> 8) as u8);
            out.push((s & 0xff) as u8);
        }
        out
    }

    #[test]
    fn pgm16_zero_sample_is_hole() {
        let bytes = reference_pgm(2, 2, &[0, 1, 65535, 300], None);
        let img = parse_pgm16(&bytes).unwrap();
        assert!(!img.is_valid(0, 0));
        assert_eq!(img.get(0, 1), Some(1.0));
        assert_eq!(img.get(1, 0), Some(65535.0));
        assert_eq!(img.get(1, 1), Some(300.0));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.pgm");
        save_range_image(&img, &path, RangeFormat::Pgm16).unwrap();
        let back = load_range_image(&path, RangeFormat::Pgm16).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn pgm16_scale_comment() {
        let bytes = reference_pgm(3, 1, &[4, 0, 8], Some("0.25"));
        let img = parse_pgm16(&bytes).unwrap();
        assert_eq!(img.get(0, 0), Some(1.0));
        assert_eq!(img.get(0, 2), Some(2.0));
        assert!(!img.is_valid(0, 1));
    }

    #[test]
    fn pgm16_errors() {
        let mut bytes = reference_pgm(2, 2, &[1, 2, 3, 4], None);
        bytes.pop();
        assert!(matches!(
            parse_pgm16(&bytes),
            Err(RangeIoError::DimensionMismatch { .. })
        ));
        let bad = b"P5\n2 2\n255\n\0\0\0\0".to_vec();
        assert!(matches!(parse_pgm16(&bad), Err(RangeIoError::ParseError { .. })));
    }

    #[test]
    fn pgm16_rejects_unrepresentable_depth() {
        let img = RangeImage::from_fn(2, 1, |_, c| if c == 0 { 0.1 } else { 10.0 });
        assert!(matches!(
            write_pgm16(&img, 1.0),
            Err(RangeIoError::Unrepresentable { .. })
        ));
    }

    #[test]
    fn identity_crop() {
        let img = ramp(10, 10);
        assert_eq!(crop(&img, &CropRect::full(&img)).unwrap(), img);
    }

    #[test]
    fn crop_index_arithmetic() {
        let img = ramp(10, 10);
        let out = crop(&img, &CropRect::new(2, 3, 4, 5)).unwrap();
        assert_eq!((out.height(), out.width()), (4, 5));
        assert_eq!(out.get(0, 0), img.get(2, 3));
        assert_eq!(out.get(3, 4), img.get(5, 7));
    }

    #[test]
    fn crop_out_of_bounds() {
        let img = ramp(10, 10);
        assert!(matches!(
            crop(&img, &CropRect::new(0, 8, 2, 3)),
            Err(RangeIoError::RectOutOfBounds { .. })
        ));
        assert!(crop(&img, &CropRect::new(0, 0, 0, 3)).is_err());
    }

    #[test]
    fn centered_crop() {
        let r = CropRect::centered(100, 100, 70, 70);
        assert_eq!(r, CropRect::new(15, 15, 70, 70));
    }

    #[test]
    fn rot90_four_times_is_identity() {
        let img = ramp(5, 3);
        let r = img.rot90();
        assert_eq!((r.width(), r.height()), (3, 5));
        assert_eq!(r.get(4, 0), img.get(0, 0));
        assert_eq!(r.rot90().rot90().rot90(), img);
    }

    #[test]
    fn rejects_nonfinite_valid_depth() {
        assert!(RangeImage::new(1, 1, vec![f64::INFINITY], vec![true]).is_err());
        assert!(RangeImage::new(1, 1, vec![f64::INFINITY], vec![false]).is_ok());
    }
}
