//! Block and frame coding, headers, and the IPPP sequence loop.
//!
//! # Bitstream layout
//!
//! All multi-byte integers are little-endian.
//!
//! ```text
//! global header : magic "TSVC" | width u16 | height u16 | block_size u8 | frame_count u16
//! frame header  : type u8 (0 intra, 1 inter) | q1 u32 | q2 u32 | t u16 | range_lo i16 | range_hi i16
//! block         : payload length (LEB128) | range-coded payload
//! ```
//!
//! Stepsizes are stored in 1/16 units and the termination ratio in 1/1024
//! units; the encoder snaps its parameters to these grids before coding, so
//! the decoder works with exactly the values the encoder used. Blocks follow
//! their frame header in raster order.

use rayon::prelude::*;

use crate::dictionary::{build_dictionary, candidate_atom, SearchRange};
use crate::entropy::{
    orders_from_selection, selection_from_orders, SignificanceMap, SyntaxReader, SyntaxWriter,
};
use crate::error::{arg_err, stream_err, Error, Result};
use crate::frame::{psnr, BlockGrid, Frame};
use crate::quant::{dequantize, quantize};
use crate::solver::{eomp, replay_basis, SolverConfig, DEFAULT_EPSILON_FACTOR};
use crate::transform::{dct_basis, orthonormalize_against, project_residual, synthesize};
use crate::vector;

pub const MAGIC: &[u8; 4] = b"TSVC";
pub const GLOBAL_HEADER_BYTES: usize = 11;
pub const FRAME_HEADER_BYTES: usize = 15;

const Q_SCALE: f64 = 16.0;
const T_SCALE: f64 = 1024.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameType {
    Intra,
    Inter,
}

/// Per-frame coding parameters, carried in the frame header.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameHeader {
    pub frame_type: FrameType,
    pub q1: f64,
    pub q2: f64,
    pub termination_ratio: f64,
    pub search: SearchRange,
}

fn snap_q(q: f64) -> Result<u32> {
    let v = (q * Q_SCALE).round();
    if !(v >= 1.0 && v <= u32::MAX as f64) {
        return arg_err(format!("stepsize {q} not representable in 1/16 units"));
    }
    Ok(v as u32)
}

fn snap_t(t: f64) -> Result<u16> {
    let v = (t * T_SCALE).round();
    if !(0.0..T_SCALE).contains(&v) {
        return arg_err(format!("termination ratio {t} outside [0, 1)"));
    }
    Ok(v as u16)
}

impl FrameHeader {
    /// Builds a header with every parameter rounded to its stored precision.
    pub fn new(
        frame_type: FrameType,
        q1: f64,
        q2: f64,
        termination_ratio: f64,
        search: SearchRange,
    ) -> Result<FrameHeader> {
        if search.side() % 16 != 0 || search.side() > u16::MAX as usize {
            return arg_err(format!(
                "search grid side {} must be a multiple of 16",
                search.side()
            ));
        }
        if search.lo < i16::MIN as i32 || search.hi > i16::MAX as i32 {
            return arg_err("search range exceeds 16 bits");
        }
        Ok(FrameHeader {
            frame_type,
            q1: snap_q(q1)? as f64 / Q_SCALE,
            q2: snap_q(q2)? as f64 / Q_SCALE,
            termination_ratio: snap_t(termination_ratio)? as f64 / T_SCALE,
            search,
        })
    }

    pub fn write(&self, out: &mut Vec<u8>) -> Result<()> {
        out.push(match self.frame_type {
            FrameType::Intra => 0,
            FrameType::Inter => 1,
        });
        out.extend_from_slice(&snap_q(self.q1)?.to_le_bytes());
        out.extend_from_slice(&snap_q(self.q2)?.to_le_bytes());
        out.extend_from_slice(&snap_t(self.termination_ratio)?.to_le_bytes());
        out.extend_from_slice(&(self.search.lo as i16).to_le_bytes());
        out.extend_from_slice(&(self.search.hi as i16).to_le_bytes());
        Ok(())
    }

    pub fn read(data: &[u8]) -> Result<FrameHeader> {
        if data.len() < FRAME_HEADER_BYTES {
            return stream_err("truncated frame header");
        }
        let frame_type = match data[0] {
            0 => FrameType::Intra,
            1 => FrameType::Inter,
            t => return stream_err(format!("unknown frame type {t}")),
        };
        let q1 = u32::from_le_bytes(data[1..5].try_into().unwrap());
        let q2 = u32::from_le_bytes(data[5..9].try_into().unwrap());
        let t = u16::from_le_bytes(data[9..11].try_into().unwrap());
        let lo = i16::from_le_bytes(data[11..13].try_into().unwrap()) as i32;
        let hi = i16::from_le_bytes(data[13..15].try_into().unwrap()) as i32;
        if q1 == 0 || q2 == 0 || t as f64 >= T_SCALE {
            return stream_err("invalid quantizer or termination field");
        }
        let search = SearchRange::new(lo, hi).map_err(|e| Error::Stream(e.to_string()))?;
        if search.side() % 16 != 0 {
            return stream_err("search grid side is not a multiple of 16");
        }
        Ok(FrameHeader {
            frame_type,
            q1: q1 as f64 / Q_SCALE,
            q2: q2 as f64 / Q_SCALE,
            termination_ratio: t as f64 / T_SCALE,
            search,
        })
    }
}

/// Encoder settings for a whole sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct CodecParams {
    pub q1: f64,
    pub q2: f64,
    pub termination_ratio: f64,
    /// `epsilon_sq = epsilon_factor * q1² / 12`.
    pub epsilon_factor: f64,
    /// Displacements span `-radius ..= radius - 1`; `2 * radius` must be a
    /// multiple of 16.
    pub search_radius: u32,
    pub block_size: usize,
    pub max_atoms: Option<usize>,
    /// Stepsize for intra frames (both the mean and the DCT levels).
    /// Defaults to `q2`.
    pub intra_q: Option<f64>,
}

impl Default for CodecParams {
    fn default() -> Self {
        CodecParams {
            q1: 16.0,
            q2: 16.0,
            termination_ratio: 0.1,
            epsilon_factor: DEFAULT_EPSILON_FACTOR,
            search_radius: 24,
            block_size: 16,
            max_atoms: None,
            intra_q: None,
        }
    }
}

impl CodecParams {
    pub fn search_range(&self) -> Result<SearchRange> {
        SearchRange::from_radius(self.search_radius)
    }

    pub fn header(&self, frame_type: FrameType) -> Result<FrameHeader> {
        let range = self.search_range()?;
        match frame_type {
            FrameType::Inter => {
                FrameHeader::new(frame_type, self.q1, self.q2, self.termination_ratio, range)
            }
            FrameType::Intra => {
                let q = self.intra_q.unwrap_or(self.q2);
                FrameHeader::new(frame_type, q, q, self.termination_ratio, range)
            }
        }
    }

    pub fn solver_config(&self, header: &FrameHeader) -> Result<SolverConfig> {
        let mut cfg = SolverConfig::from_quantizer(
            header.q1,
            self.epsilon_factor,
            header.termination_ratio,
        )?;
        cfg.max_atoms = self.max_atoms;
        Ok(cfg)
    }
}

/// Everything transmitted for one block.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSyntax {
    pub mean_level: i32,
    /// Chosen atoms; `None` for intra blocks.
    pub map: Option<SignificanceMap>,
    /// Selection rank of each set map cell, in raster order.
    pub orders: Vec<usize>,
    /// First-stage levels in selection order.
    pub levels: Vec<i32>,
    /// Second-stage levels over the altered-basis survivors.
    pub stage2: Vec<i32>,
}

impl BlockSyntax {
    pub fn atom_count(&self) -> usize {
        self.levels.len()
    }

    /// Chosen atom indices in selection order.
    pub fn selection(&self) -> Result<Vec<usize>> {
        match &self.map {
            Some(map) => selection_from_orders(&map.set_indices(), &self.orders),
            None => Ok(Vec::new()),
        }
    }

    pub fn write(&self, header: &FrameHeader) -> Result<Vec<u8>> {
        let mut w = SyntaxWriter::new(header.search.side())?;
        w.encode_mean(self.mean_level);
        if header.frame_type == FrameType::Inter {
            let map = match &self.map {
                Some(m) => m.clone(),
                None => SignificanceMap::new(header.search.side())?,
            };
            if map.popcount() != self.levels.len() {
                return arg_err("map popcount differs from level count");
            }
            w.encode_significance_map(&map)?;
            w.encode_orders(&self.orders)?;
            w.encode_levels(&self.levels)?;
        }
        w.encode_stage2(&self.stage2);
        Ok(w.finish())
    }
}

/// Diagnostic values from encoding one block.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BlockStats {
    /// Atoms chosen by the solver before zero-level pruning.
    pub solver_atoms: usize,
    /// Atoms transmitted.
    pub atoms: usize,
    pub stage2_nonzero: usize,
    pub terminated_early: bool,
}

/// Precomputed tables shared by all blocks of a given size.
#[derive(Clone, Debug)]
pub struct CodecTables {
    pub block_size: usize,
    pub dct: Vec<Vec<f64>>,
}

impl CodecTables {
    pub fn new(block_size: usize) -> CodecTables {
        CodecTables {
            block_size,
            dct: dct_basis(block_size),
        }
    }
}

/// `clamp(round(mean + Σ ĉ_j b_j + Σ λ̂_i t_i), 0, 255)`; the single
/// reconstruction path used by both encoder and decoder.
fn reconstruct(
    mean: f64,
    atoms: &[Vec<f64>],
    levels: &[i32],
    q1: f64,
    dct: &[Vec<f64>],
    stage2: &[i32],
    q2: f64,
    dim: usize,
) -> Vec<u8> {
    let c: Vec<f64> = levels.iter().map(|&l| dequantize(l, q1)).collect();
    let lam: Vec<f64> = stage2.iter().map(|&l| dequantize(l, q2)).collect();
    let s1 = synthesize(atoms, &c, dim);
    let s2 = synthesize(dct, &lam, dim);
    (0..dim)
        .map(|p| (mean + s1[p] + s2[p]).round().clamp(0.0, 255.0) as u8)
        .collect()
}

fn mean_level(samples: &[u8], q: f64) -> i32 {
    let mut acc = 0.0;
    for &s in samples {
        acc += s as f64;
    }
    (acc / samples.len() as f64 / q).round() as i32
}

/// Orthonormal basis of the chosen atoms with their quantized levels.
/// Atoms whose level is zero, or that collapse during orthonormalization,
/// are removed and the basis rebuilt until every level is non-zero.
fn quantize_first_stage(
    x: &[f64],
    mut chosen: Vec<usize>,
    atom_of: impl Fn(usize) -> Vec<f64>,
    q1: f64,
) -> Result<(Vec<usize>, Vec<Vec<f64>>, Vec<i32>)> {
    loop {
        let raw: Vec<Vec<f64>> = chosen.iter().map(|&i| atom_of(i)).collect();
        let basis = match replay_basis(raw.iter().map(Vec::as_slice)) {
            Some(b) => b,
            None => {
                // Drop the first atom that collapses and try again.
                let mut ok = 0;
                let mut partial: Vec<Vec<f64>> = Vec::new();
                for a in &raw {
                    let mut v = a.clone();
                    if partial.iter().all(|b| {
                        vector::orthonormalize_step(&mut v, b, crate::solver::ATOM_DROP_TOL)
                    }) {
                        partial.push(v);
                        ok += 1;
                    } else {
                        break;
                    }
                }
                chosen.remove(ok);
                continue;
            }
        };
        let levels: Vec<i32> = basis
            .iter()
            .map(|b| quantize(vector::dot(x, b), q1))
            .collect::<Result<_>>()?;
        if levels.iter().all(|&l| l != 0) {
            return Ok((chosen, basis, levels));
        }
        chosen = chosen
            .into_iter()
            .zip(&levels)
            .filter(|(_, &l)| l != 0)
            .map(|(i, _)| i)
            .collect();
    }
}

/// Encodes one block. `reference` is required for inter frames.
pub fn encode_block(
    samples: &[u8],
    origin: (usize, usize),
    reference: Option<&Frame>,
    header: &FrameHeader,
    solver: &SolverConfig,
    tables: &CodecTables,
) -> Result<(BlockSyntax, Vec<u8>, BlockStats)> {
    let bs = tables.block_size;
    let dim = bs * bs;
    if samples.len() != dim {
        return arg_err(format!("block has {} samples, expected {dim}", samples.len()));
    }
    let mean_level = mean_level(samples, header.q1);
    let mean = dequantize(mean_level, header.q1);
    let x: Vec<f64> = samples.iter().map(|&s| s as f64 - mean).collect();
    let mut stats = BlockStats::default();

    let (map, orders, levels, basis) = match header.frame_type {
        FrameType::Intra => (None, Vec::new(), Vec::new(), Vec::new()),
        FrameType::Inter => {
            let Some(reference) = reference else {
                return arg_err("inter block without a reference frame");
            };
            let dict = build_dictionary(reference, origin, header.search, bs)?;
            let mu = vector::mean(&x);
            let x_ac: Vec<f64> = x.iter().map(|v| v - mu).collect();
            let sol = eomp(&x_ac, &dict, solver)?;
            stats.solver_atoms = sol.len();
            stats.terminated_early = sol.terminated_early();
            let (chosen, basis, levels) =
                quantize_first_stage(&x, sol.chosen, |i| dict.atom(i).to_vec(), header.q1)?;
            let map = SignificanceMap::from_indices(header.search.side(), &chosen)?;
            (Some(map), orders_from_selection(&chosen), levels, basis)
        }
    };
    stats.atoms = levels.len();

    let c: Vec<f64> = levels.iter().map(|&l| dequantize(l, header.q1)).collect();
    let first = synthesize(&basis, &c, dim);
    let residual: Vec<f64> = x.iter().zip(&first).map(|(a, b)| a - b).collect();
    let altered = orthonormalize_against(&tables.dct, &basis);
    let lambda = project_residual(&residual, &altered)?;
    let stage2: Vec<i32> = lambda
        .iter()
        .map(|&l| quantize(l, header.q2))
        .collect::<Result<_>>()?;
    stats.stage2_nonzero = stage2.iter().filter(|&&l| l != 0).count();

    let recon = reconstruct(
        mean,
        &basis,
        &levels,
        header.q1,
        &altered.vectors,
        &stage2,
        header.q2,
        dim,
    );
    let syntax = BlockSyntax {
        mean_level,
        map,
        orders,
        levels,
        stage2,
    };
    Ok((syntax, recon, stats))
}

/// Parses one block payload.
pub fn read_block_syntax(
    payload: &[u8],
    origin: (usize, usize),
    reference: Option<&Frame>,
    header: &FrameHeader,
    tables: &CodecTables,
) -> Result<(BlockSyntax, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let bs = tables.block_size;
    let mut r = SyntaxReader::new(payload, header.search.side())?;
    let mean_level = r.decode_mean()?;
    let (map, orders, levels, basis) = match header.frame_type {
        FrameType::Intra => (None, Vec::new(), Vec::new(), Vec::new()),
        FrameType::Inter => {
            let Some(reference) = reference else {
                return stream_err("inter frame without a reference");
            };
            let map = r.decode_significance_map()?;
            let k = map.popcount();
            if k > bs * bs {
                return stream_err(format!("{k} atoms exceed block dimension"));
            }
            let orders = r.decode_orders(k)?;
            let levels = r.decode_levels(k)?;
            let chosen = selection_from_orders(&map.set_indices(), &orders)?;
            let mut raw = Vec::with_capacity(k);
            for &i in &chosen {
                let mv = header.search.motion_vector(i);
                match candidate_atom(reference, origin, mv, bs) {
                    Some(a) => raw.push(a),
                    None => return stream_err(format!("atom {i} is degenerate")),
                }
            }
            let Some(basis) = replay_basis(raw.iter().map(Vec::as_slice)) else {
                return stream_err("chosen atoms are linearly dependent");
            };
            (Some(map), orders, levels, basis)
        }
    };
    let altered = orthonormalize_against(&tables.dct, &basis);
    let stage2 = r.decode_stage2(altered.len())?;
    let syntax = BlockSyntax {
        mean_level,
        map,
        orders,
        levels,
        stage2,
    };
    Ok((syntax, basis, altered.vectors))
}

/// Decodes one block payload into reconstructed samples.
pub fn decode_block(
    payload: &[u8],
    origin: (usize, usize),
    reference: Option<&Frame>,
    header: &FrameHeader,
    tables: &CodecTables,
) -> Result<Vec<u8>> {
    let (syntax, basis, altered) = read_block_syntax(payload, origin, reference, header, tables)?;
    let dim = tables.block_size * tables.block_size;
    Ok(reconstruct(
        dequantize(syntax.mean_level, header.q1),
        &basis,
        &syntax.levels,
        header.q1,
        &altered,
        &syntax.stage2,
        header.q2,
        dim,
    ))
}

/// Per-frame results reported by the encoder.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameStats {
    pub index: usize,
    pub frame_type: FrameType,
    /// Frame header plus all block payloads and their length prefixes.
    pub bits: u64,
    pub psnr: f64,
    pub mean_atoms: f64,
    pub mean_stage2_nonzero: f64,
}

#[derive(Clone, Debug)]
pub struct EncodedFrame {
    /// Frame header and block payloads.
    pub bytes: Vec<u8>,
    pub reconstruction: Frame,
    pub blocks: Vec<BlockStats>,
}

fn write_leb128(out: &mut Vec<u8>, mut v: usize) {
    loop {
        let byte = (v & 0x7F) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

fn read_leb128(data: &[u8], pos: &mut usize) -> Result<usize> {
    let mut v = 0usize;
    for shift in (0..35).step_by(7) {
        let Some(&b) = data.get(*pos) else {
            return stream_err("truncated block length");
        };
        *pos += 1;
        v |= ((b & 0x7F) as usize) << shift;
        if b & 0x80 == 0 {
            return Ok(v);
        }
    }
    stream_err("block length too long")
}

/// Encodes one frame. Blocks are coded in parallel.
pub fn encode_frame(
    frame: &Frame,
    reference: Option<&Frame>,
    header: &FrameHeader,
    params: &CodecParams,
    tables: &CodecTables,
) -> Result<EncodedFrame> {
    let bs = tables.block_size;
    let grid = BlockGrid::for_frame(frame, bs)?;
    if header.frame_type == FrameType::Inter {
        match reference {
            Some(r) if r.width == frame.width && r.height == frame.height => {}
            _ => return arg_err("inter frame needs a reference of the same size"),
        }
    }
    let solver = params.solver_config(header)?;
    let origins = grid.origins();
    let coded: Vec<(Vec<u8>, Vec<u8>, BlockStats)> = origins
        .par_iter()
        .map(|&origin| {
            let samples = frame.block(origin, bs);
            let (syntax, recon, stats) =
                encode_block(&samples, origin, reference, header, &solver, tables)?;
            Ok((syntax.write(header)?, recon, stats))
        })
        .collect::<Result<_>>()?;

    let mut bytes = Vec::new();
    header.write(&mut bytes)?;
    let mut reconstruction = Frame {
        samples: vec![0; frame.samples.len()],
        ..frame.clone()
    };
    let mut blocks = Vec::with_capacity(coded.len());
    for (&origin, (payload, recon, stats)) in origins.iter().zip(coded) {
        write_leb128(&mut bytes, payload.len());
        bytes.extend_from_slice(&payload);
        reconstruction.put_block(origin, bs, &recon);
        blocks.push(stats);
    }
    Ok(EncodedFrame {
        bytes,
        reconstruction,
        blocks,
    })
}

/// Decodes one frame starting at `*pos`, advancing it past the frame.
pub fn decode_frame(
    data: &[u8],
    pos: &mut usize,
    width: usize,
    height: usize,
    reference: Option<&Frame>,
    tables: &CodecTables,
) -> Result<Frame> {
    let header = FrameHeader::read(data.get(*pos..).unwrap_or(&[]))?;
    *pos += FRAME_HEADER_BYTES;
    let bs = tables.block_size;
    let mut frame = Frame::from_plane(width, height, vec![0; width * height], bs)?;
    if header.frame_type == FrameType::Inter {
        match reference {
            Some(r) if r.width == frame.width && r.height == frame.height => {}
            _ => return stream_err("inter frame has no matching reference"),
        }
    }
    let grid = BlockGrid::for_frame(&frame, bs)?;
    let origins = grid.origins();
    let mut payloads = Vec::with_capacity(origins.len());
    for _ in &origins {
        let len = read_leb128(data, pos)?;
        let Some(p) = data.get(*pos..*pos + len) else {
            return stream_err("truncated block payload");
        };
        payloads.push(p);
        *pos += len;
    }
    let blocks: Vec<Vec<u8>> = origins
        .par_iter()
        .zip(payloads.par_iter())
        .map(|(&origin, payload)| decode_block(payload, origin, reference, &header, tables))
        .collect::<Result<_>>()?;
    for (&origin, b) in origins.iter().zip(&blocks) {
        frame.put_block(origin, bs, b);
    }
    Ok(frame)
}

#[derive(Clone, Debug)]
pub struct EncodedSequence {
    pub bitstream: Vec<u8>,
    pub reconstructions: Vec<Frame>,
    pub stats: Vec<FrameStats>,
}

fn write_global_header(out: &mut Vec<u8>, frames: &[Frame], block_size: usize) -> Result<()> {
    let first = &frames[0];
    let (w, h) = (first.display_width, first.display_height);
    if w > u16::MAX as usize || h > u16::MAX as usize {
        return arg_err("frame dimensions exceed 16 bits");
    }
    if block_size == 0 || block_size > u8::MAX as usize {
        return arg_err(format!("block size {block_size} out of range"));
    }
    if frames.len() > u16::MAX as usize {
        return arg_err("too many frames");
    }
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(w as u16).to_le_bytes());
    out.extend_from_slice(&(h as u16).to_le_bytes());
    out.push(block_size as u8);
    out.extend_from_slice(&(frames.len() as u16).to_le_bytes());
    Ok(())
}

/// IPPP encoding: the first frame intra, every later frame predicted from
/// the previous reconstruction.
pub fn encode_sequence(frames: &[Frame], params: &CodecParams) -> Result<EncodedSequence> {
    if frames.is_empty() {
        return arg_err("no frames to encode");
    }
    let bs = params.block_size;
    let first = &frames[0];
    for f in frames {
        if f.display_width != first.display_width
            || f.display_height != first.display_height
            || f.width % bs != 0
            || f.height % bs != 0
        {
            return arg_err("frames must share dimensions padded to the block size");
        }
    }
    let tables = CodecTables::new(bs);
    let mut bitstream = Vec::new();
    write_global_header(&mut bitstream, frames, bs)?;
    let mut reconstructions: Vec<Frame> = Vec::with_capacity(frames.len());
    let mut stats = Vec::with_capacity(frames.len());
    for (index, frame) in frames.iter().enumerate() {
        let frame_type = if index == 0 {
            FrameType::Intra
        } else {
            FrameType::Inter
        };
        let header = params.header(frame_type)?;
        let encoded = encode_frame(frame, reconstructions.last(), &header, params, &tables)?;
        let n = encoded.blocks.len().max(1) as f64;
        stats.push(FrameStats {
            index,
            frame_type,
            bits: encoded.bytes.len() as u64 * 8,
            psnr: psnr(frame, &encoded.reconstruction)?,
            mean_atoms: encoded.blocks.iter().map(|b| b.atoms as f64).sum::<f64>() / n,
            mean_stage2_nonzero: encoded
                .blocks
                .iter()
                .map(|b| b.stage2_nonzero as f64)
                .sum::<f64>()
                / n,
        });
        bitstream.extend_from_slice(&encoded.bytes);
        reconstructions.push(encoded.reconstruction);
    }
    Ok(EncodedSequence {
        bitstream,
        reconstructions,
        stats,
    })
}

/// Decodes a complete bitstream produced by [`encode_sequence`].
pub fn decode_sequence(data: &[u8]) -> Result<Vec<Frame>> {
    if data.len() < GLOBAL_HEADER_BYTES || &data[..4] != MAGIC {
        return stream_err("missing stream header");
    }
    let width = u16::from_le_bytes([data[4], data[5]]) as usize;
    let height = u16::from_le_bytes([data[6], data[7]]) as usize;
    let bs = data[8] as usize;
    let count = u16::from_le_bytes([data[9], data[10]]) as usize;
    if width == 0 || height == 0 || bs == 0 {
        return stream_err("invalid stream dimensions");
    }
    let tables = CodecTables::new(bs);
    let mut pos = GLOBAL_HEADER_BYTES;
    let mut frames: Vec<Frame> = Vec::with_capacity(count);
    for _ in 0..count {
        let f = decode_frame(data, &mut pos, width, height, frames.last(), &tables)?;
        frames.push(f);
    }
    if pos != data.len() {
        return stream_err("trailing bytes after last frame");
    }
    Ok(frames)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(t: FrameType) -> FrameHeader {
        FrameHeader::new(t, 8.0, 8.0, 0.1, SearchRange::from_radius(8).unwrap()).unwrap()
    }

    #[test]
    fn header_roundtrip_and_snapping() {
        let h = FrameHeader::new(
            FrameType::Inter,
            10.03,
            12.5,
            0.1234,
            SearchRange::from_radius(24).unwrap(),
        )
        .unwrap();
        assert_eq!(h.q1, 160.0 / 16.0);
        assert_eq!(h.termination_ratio, 126.0 / 1024.0);
        let mut buf = Vec::new();
        h.write(&mut buf).unwrap();
        assert_eq!(buf.len(), FRAME_HEADER_BYTES);
        assert_eq!(FrameHeader::read(&buf).unwrap(), h);
    }

    #[test]
    fn header_rejects_bad_grid() {
        assert!(FrameHeader::new(
            FrameType::Inter,
            8.0,
            8.0,
            0.1,
            SearchRange::from_radius(5).unwrap()
        )
        .is_err());
    }

    #[test]
    fn constant_block_has_no_atoms() {
        let tables = CodecTables::new(16);
        let reference = Frame::from_plane(
            48,
            48,
            (0..48 * 48).map(|i| (i * 7 % 200) as u8).collect(),
            16,
        )
        .unwrap();
        let h = header(FrameType::Inter);
        let cfg = SolverConfig::from_quantizer(h.q1, 1.2, h.termination_ratio).unwrap();
        // 96 is a multiple of q1, so the mean is coded exactly.
        let block = vec![96u8; 256];
        let (syntax, recon, _) =
            encode_block(&block, (16, 16), Some(&reference), &h, &cfg, &tables).unwrap();
        assert_eq!(syntax.atom_count(), 0);
        assert!(syntax.stage2.iter().all(|&l| l == 0));
        let mean = dequantize(syntax.mean_level, h.q1).round() as u8;
        assert!(recon.iter().all(|&v| v == mean));
        let payload = syntax.write(&h).unwrap();
        let dec = decode_block(&payload, (16, 16), Some(&reference), &h, &tables).unwrap();
        assert_eq!(dec, recon);
    }

    #[test]
    fn exact_candidate_is_one_atom() {
        let tables = CodecTables::new(16);
        let plane: Vec<u8> = (0..64 * 64)
            .map(|i| {
                let (x, y) = (i % 64, i / 64);
                (128.0 + 60.0 * ((x as f64) * 0.3).sin() * ((y as f64) * 0.21).cos()) as u8
            })
            .collect();
        let reference = Frame::from_plane(64, 64, plane, 16).unwrap();
        let h = FrameHeader::new(
            FrameType::Inter,
            1.0,
            1.0,
            0.05,
            SearchRange::from_radius(8).unwrap(),
        )
        .unwrap();
        let cfg = SolverConfig::from_quantizer(h.q1, 1.2, h.termination_ratio).unwrap();
        // The block at (16,16) equals the reference block displaced by (3,-2),
        // shifted by a constant.
        let block: Vec<u8> = reference
            .block((19, 14), 16)
            .iter()
            .map(|&v| v.saturating_add(5))
            .collect();
        let (syntax, recon, _) =
            encode_block(&block, (16, 16), Some(&reference), &h, &cfg, &tables).unwrap();
        assert_eq!(syntax.atom_count(), 1);
        let idx = h.search.index_of((3, -2)).unwrap();
        assert_eq!(syntax.selection().unwrap(), vec![idx]);
        let max_err = block
            .iter()
            .zip(&recon)
            .map(|(&a, &b)| (a as i32 - b as i32).abs())
            .max()
            .unwrap();
        assert!(max_err <= 1, "max error {max_err}");
    }

    #[test]
    fn inter_without_reference_is_error() {
        let tables = CodecTables::new(16);
        let h = header(FrameType::Inter);
        let cfg = SolverConfig::default();
        assert!(encode_block(&[0; 256], (0, 0), None, &h, &cfg, &tables).is_err());
        let payload = SyntaxWriter::new(16).unwrap().finish();
        assert!(matches!(
            decode_block(&payload, (0, 0), None, &h, &tables),
            Err(Error::Stream(_))
        ));
    }

    #[test]
    fn leb128_roundtrip() {
        for v in [0usize, 1, 127, 128, 300, 65535, 1 << 21] {
            let mut buf = Vec::new();
            write_leb128(&mut buf, v);
            let mut pos = 0;
            assert_eq!(read_leb128(&buf, &mut pos).unwrap(), v);
            assert_eq!(pos, buf.len());
        }
    }

    #[test]
    fn garbage_stream_is_error() {
        assert!(matches!(decode_sequence(b"nope"), Err(Error::Stream(_))));
        let mut data = MAGIC.to_vec();
        data.extend_from_slice(&[16, 0, 16, 0, 16, 1, 0]);
        data.extend_from_slice(&[9; 20]);
        assert!(matches!(decode_sequence(&data), Err(Error::Stream(_))));
    }
}
