//! Raw planar video ingestion, block partitioning and distortion metrics.
//!
//! Only the luma plane is coded. Chroma planes in the input are skipped
//! according to the configured [`ChromaFormat`]. Frames are padded on the
//! right and bottom by sample replication so that every block has full
//! support; the original ("display") size is kept so that metrics and output
//! files cover only real picture content.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{arg_err, Error, Result};

/// Chroma layout of a raw planar file. Determines how many bytes follow each
/// luma plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ChromaFormat {
    /// Luma only.
    Gray,
    #[default]
    Yuv420,
    Yuv422,
    Yuv444,
}

impl ChromaFormat {
    /// Bytes occupied by both chroma planes of a `width`×`height` frame.
    pub fn chroma_bytes(self, width: usize, height: usize) -> usize {
        match self {
            ChromaFormat::Gray => 0,
            ChromaFormat::Yuv420 => 2 * width.div_ceil(2) * height.div_ceil(2),
            ChromaFormat::Yuv422 => 2 * width.div_ceil(2) * height,
            ChromaFormat::Yuv444 => 2 * width * height,
        }
    }
}

impl FromStr for ChromaFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gray" | "400" | "y" => Ok(ChromaFormat::Gray),
            "420" => Ok(ChromaFormat::Yuv420),
            "422" => Ok(ChromaFormat::Yuv422),
            "444" => Ok(ChromaFormat::Yuv444),
            other => arg_err(format!("unknown chroma format {other:?}")),
        }
    }
}

/// One luma plane. `width`/`height` are the padded (coded) dimensions;
/// `display_width`/`display_height` the original picture size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    pub display_width: usize,
    pub display_height: usize,
    pub samples: Vec<u8>,
}

impl Frame {
    /// A frame of constant value with no padding.
    pub fn filled(width: usize, height: usize, value: u8) -> Frame {
        Frame {
            width,
            height,
            display_width: width,
            display_height: height,
            samples: vec![value; width * height],
        }
    }

    /// Wraps an unpadded plane, then pads it to a multiple of `block_size`.
    pub fn from_plane(
        width: usize,
        height: usize,
        samples: Vec<u8>,
        block_size: usize,
    ) -> Result<Frame> {
        if width == 0 || height == 0 {
            return arg_err("frame dimensions must be non-zero");
        }
        if block_size == 0 {
            return arg_err("block size must be non-zero");
        }
        if samples.len() != width * height {
            return arg_err(format!(
                "plane has {} samples, expected {}",
                samples.len(),
                width * height
            ));
        }
        let pw = width.div_ceil(block_size) * block_size;
        let ph = height.div_ceil(block_size) * block_size;
        let mut padded = Vec::with_capacity(pw * ph);
        for y in 0..ph {
            let row = &samples[y.min(height - 1) * width..][..width];
            padded.extend_from_slice(row);
            let edge = row[width - 1];
            padded.extend(std::iter::repeat_n(edge, pw - width));
        }
        Ok(Frame {
            width: pw,
            height: ph,
            display_width: width,
            display_height: height,
            samples: padded,
        })
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.samples[y * self.width + x]
    }

    /// Sample at a possibly out-of-frame position, clamped to the border.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> u8 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.samples[cy * self.width + cx]
    }

    /// The visible (unpadded) region, row-major.
    pub fn display_plane(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.display_width * self.display_height);
        for y in 0..self.display_height {
            out.extend_from_slice(&self.samples[y * self.width..][..self.display_width]);
        }
        out
    }

    /// Copies the `size`×`size` block at `origin` out as raster-ordered
    /// samples.
    pub fn block(&self, origin: (usize, usize), size: usize) -> Vec<u8> {
        let (ox, oy) = origin;
        let mut out = Vec::with_capacity(size * size);
        for y in 0..size {
            out.extend_from_slice(&self.samples[(oy + y) * self.width + ox..][..size]);
        }
        out
    }

    pub fn put_block(&mut self, origin: (usize, usize), size: usize, block: &[u8]) {
        let (ox, oy) = origin;
        for y in 0..size {
            let dst = (oy + y) * self.width + ox;
            self.samples[dst..dst + size].copy_from_slice(&block[y * size..][..size]);
        }
    }
}

/// Raster-ordered tiling of a padded frame into square blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockGrid {
    pub block_size: usize,
    pub cols: usize,
    pub rows: usize,
}

impl BlockGrid {
    pub fn new(width: usize, height: usize, block_size: usize) -> Result<BlockGrid> {
        if block_size == 0 {
            return arg_err("block size must be non-zero");
        }
        if width % block_size != 0 || height % block_size != 0 {
            return arg_err(format!(
                "{width}x{height} is not a multiple of block size {block_size}"
            ));
        }
        Ok(BlockGrid {
            block_size,
            cols: width / block_size,
            rows: height / block_size,
        })
    }

    pub fn for_frame(frame: &Frame, block_size: usize) -> Result<BlockGrid> {
        BlockGrid::new(frame.width, frame.height, block_size)
    }

    pub fn len(&self) -> usize {
        self.cols * self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Top-left corners of all blocks in raster order.
    pub fn origins(&self) -> Vec<(usize, usize)> {
        let bs = self.block_size;
        (0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| (c * bs, r * bs)))
            .collect()
    }
}

/// Reads `count` frames of 8-bit planar video, keeping only luma.
pub fn load_raw_video(
    path: impl AsRef<Path>,
    width: usize,
    height: usize,
    count: usize,
    block_size: usize,
    chroma: ChromaFormat,
) -> Result<Vec<Frame>> {
    if width == 0 || height == 0 {
        return arg_err("frame dimensions must be non-zero");
    }
    let mut reader = BufReader::new(File::open(path)?);
    read_raw_video(&mut reader, width, height, count, block_size, chroma)
}

/// [`load_raw_video`] over any reader.
pub fn read_raw_video(
    reader: &mut impl Read,
    width: usize,
    height: usize,
    count: usize,
    block_size: usize,
    chroma: ChromaFormat,
) -> Result<Vec<Frame>> {
    if width == 0 || height == 0 {
        return arg_err("frame dimensions must be non-zero");
    }
    let luma = width * height;
    let skip = chroma.chroma_bytes(width, height);
    let mut frames = Vec::with_capacity(count);
    let mut chroma_buf = vec![0u8; skip];
    for index in 0..count {
        let mut plane = vec![0u8; luma];
        read_full(reader, &mut plane).map_err(|e| truncated(e, index))?;
        read_full(reader, &mut chroma_buf).map_err(|e| truncated(e, index))?;
        frames.push(Frame::from_plane(width, height, plane, block_size)?);
    }
    Ok(frames)
}

fn read_full(reader: &mut impl Read, buf: &mut [u8]) -> std::io::Result<()> {
    reader.read_exact(buf)
}

fn truncated(e: std::io::Error, frame: usize) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::Truncated { frame }
    } else {
        Error::Io(e)
    }
}

/// Writes the visible region of each frame. Chroma planes, if the format has
/// any, are filled with the neutral value 128.
pub fn write_raw_video(
    path: impl AsRef<Path>,
    frames: &[Frame],
    chroma: ChromaFormat,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for f in frames {
        w.write_all(&f.display_plane())?;
        let n = chroma.chroma_bytes(f.display_width, f.display_height);
        w.write_all(&vec![128u8; n])?;
    }
    w.flush()?;
    Ok(())
}

/// Mean squared error over the visible region.
pub fn mse(a: &Frame, b: &Frame) -> Result<f64> {
    if a.display_width != b.display_width || a.display_height != b.display_height {
        return arg_err(format!(
            "frame size mismatch: {}x{} vs {}x{}",
            a.display_width, a.display_height, b.display_width, b.display_height
        ));
    }
    let mut acc = 0u64;
    for y in 0..a.display_height {
        for x in 0..a.display_width {
            let d = a.get(x, y) as i64 - b.get(x, y) as i64;
            acc += (d * d) as u64;
        }
    }
    Ok(acc as f64 / (a.display_width * a.display_height) as f64)
}

/// Peak signal-to-noise ratio in dB; `f64::INFINITY` for identical frames.
pub fn psnr(a: &Frame, b: &Frame) -> Result<f64> {
    let m = mse(a, b)?;
    Ok(psnr_from_mse(m))
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0f64 * 255.0 / mse).log10()
    }
}
