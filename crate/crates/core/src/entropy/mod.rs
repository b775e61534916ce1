//! Context-adaptive binary arithmetic coding of block syntax.
//!
//! First-stage syntax consists of three parts: which atoms were chosen (a
//! binary significance map over the displacement grid), the order in which
//! they were chosen, and their quantized levels. Second-stage levels use a
//! simplified residual coding in the style of HEVC over the altered DCT
//! basis.
//!
//! Every block is coded with a fresh engine and fresh contexts, so blocks
//! decode independently.

pub mod binarize;
pub mod engine;

use binarize::{
    decode_eg, decode_tu, decode_tu_eg, deinterleave, encode_eg, encode_tu, encode_tu_eg,
    interleave,
};
pub use engine::{Context, Decoder, Encoder};

use crate::error::{arg_err, stream_err, Result};

/// Each layer cell covers a 4×4 block of the layer below.
const FANOUT: usize = 4;
const BLOCK_CELLS: usize = FANOUT * FANOUT;
/// Prefix cap of the level binarization.
const LEVEL_TU_CAP: u32 = 4;
const MAX_ORDER_PLANES: usize = 16;
/// The mean is transmitted with exp-Golomb of this order.
const MEAN_EG_ORDER: u32 = 2;

/// Binary map over the `side × side` displacement grid marking chosen atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignificanceMap {
    side: usize,
    cells: Vec<bool>,
}

impl SignificanceMap {
    /// An empty map. `side` must be a positive multiple of 16.
    pub fn new(side: usize) -> Result<SignificanceMap> {
        if side == 0 || side % (BLOCK_CELLS) != 0 {
            return arg_err(format!("map side {side} is not a multiple of 16"));
        }
        Ok(SignificanceMap {
            side,
            cells: vec![false; side * side],
        })
    }

    pub fn from_indices(side: usize, indices: &[usize]) -> Result<SignificanceMap> {
        let mut m = SignificanceMap::new(side)?;
        for &i in indices {
            if i >= m.cells.len() {
                return arg_err(format!("atom index {i} outside {side}x{side} map"));
            }
            m.cells[i] = true;
        }
        Ok(m)
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn get(&self, index: usize) -> bool {
        self.cells[index]
    }

    pub fn set(&mut self, index: usize, value: bool) {
        self.cells[index] = value;
    }

    pub fn popcount(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Raster indices of set cells.
    pub fn set_indices(&self) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i]).collect()
    }

    /// Whether any cell is set in the `size × size` square at `(x, y)`.
    fn any_in(&self, x: usize, y: usize, size: usize) -> bool {
        (y..y + size).any(|yy| self.cells[yy * self.side + x..][..size].iter().any(|&c| c))
    }
}

/// Context bucket for a position along a long scan: exact for the first
/// eight positions, then one bucket per octave.
fn bucket(i: usize) -> usize {
    if i < 8 {
        i
    } else {
        (8 + i.ilog2() as usize - 3).min(15)
    }
}

/// Number of values in `0..k` with bit `plane` set.
pub fn plane_ones(k: usize, plane: u32) -> usize {
    let period = 1usize << (plane + 1);
    let half = 1usize << plane;
    (k / period) * half + (k % period).saturating_sub(half)
}

/// Bits needed per order value for `k` chosen atoms: `ceil(log2(k))`.
pub fn order_width(k: usize) -> u32 {
    if k <= 1 {
        0
    } else {
        (k - 1).ilog2() + 1
    }
}

/// Selection rank of each chosen atom, listed in raster order of the map.
pub fn orders_from_selection(chosen: &[usize]) -> Vec<usize> {
    let mut by_index: Vec<(usize, usize)> =
        chosen.iter().enumerate().map(|(rank, &i)| (i, rank)).collect();
    by_index.sort_unstable();
    by_index.into_iter().map(|(_, rank)| rank).collect()
}

/// Inverse of [`orders_from_selection`]: atom indices in selection order.
pub fn selection_from_orders(set_indices: &[usize], orders: &[usize]) -> Result<Vec<usize>> {
    check_permutation(orders)?;
    if set_indices.len() != orders.len() {
        return stream_err("order count does not match map");
    }
    let mut chosen = vec![0; orders.len()];
    for (&i, &rank) in set_indices.iter().zip(orders) {
        chosen[rank] = i;
    }
    Ok(chosen)
}

fn check_permutation(orders: &[usize]) -> Result<()> {
    let mut seen = vec![false; orders.len()];
    for &o in orders {
        if o >= orders.len() || seen[o] {
            return arg_err("orders are not a permutation");
        }
        seen[o] = true;
    }
    Ok(())
}

#[derive(Clone, Debug)]
struct Contexts {
    top: Vec<Context>,
    /// Indexed by layer: 0 = middle, 1 = bottom.
    count: [[Context; 4]; 2],
    run: [[Context; 4]; 2],
    order: [[Context; 4]; MAX_ORDER_PLANES],
    level_prefix: [Context; 4],
    level_suffix: [Context; 3],
    first_prefix: [Context; 4],
    first_suffix: [Context; 3],
    cbf: Context,
    last: [Context; 16],
    sig: [Context; 16],
    gt1: Context,
    gt2: Context,
}

impl Contexts {
    fn new(top_cells: usize) -> Contexts {
        let c = Context::default();
        Contexts {
            top: vec![c; top_cells],
            count: [[c; 4]; 2],
            run: [[c; 4]; 2],
            order: [[c; 4]; MAX_ORDER_PLANES],
            level_prefix: [c; 4],
            level_suffix: [c; 3],
            first_prefix: [c; 4],
            first_suffix: [c; 3],
            cbf: c,
            last: [c; 16],
            sig: [c; 16],
            gt1: c,
            gt2: c,
        }
    }
}

/// Layer geometry for a map of side `s`: sides `s/16`, `s/4`, `s`.
fn layer_sides(side: usize) -> [usize; 3] {
    [side / BLOCK_CELLS, side / FANOUT, side]
}

/// Writes one block's syntax elements into a fresh arithmetic coder.
pub struct SyntaxWriter {
    enc: Encoder,
    ctx: Contexts,
    map_side: usize,
}

impl SyntaxWriter {
    /// `map_side` is the displacement-grid side `s` (a multiple of 16), or
    /// any multiple of 16 for blocks that carry no map.
    pub fn new(map_side: usize) -> Result<SyntaxWriter> {
        SignificanceMap::new(map_side)?;
        let top = layer_sides(map_side)[0];
        Ok(SyntaxWriter {
            enc: Encoder::new(),
            ctx: Contexts::new(top * top),
            map_side,
        })
    }

    pub fn bins(&self) -> u64 {
        self.enc.bins()
    }

    pub fn estimated_bits(&self) -> f64 {
        self.enc.estimated_bits()
    }

    pub fn finish(self) -> Vec<u8> {
        self.enc.finish()
    }

    /// Quantized block mean: interleaved, exp-Golomb order 2, bypass.
    pub fn encode_mean(&mut self, level: i32) {
        encode_eg(&mut self.enc, interleave(level as i64), MEAN_EG_ORDER, None);
    }

    /// Three-layer quad-tree coding of the map.
    pub fn encode_significance_map(&mut self, map: &SignificanceMap) -> Result<()> {
        if map.side() != self.map_side {
            return arg_err(format!(
                "map side {} does not match coder side {}",
                map.side(),
                self.map_side
            ));
        }
        let [top, mid, _] = layer_sides(map.side());
        let mid_cell = map.side() / mid;
        let top_cell = map.side() / top;
        for ty in 0..top {
            for tx in 0..top {
                let on = map.any_in(tx * top_cell, ty * top_cell, top_cell);
                self.enc.encode(&mut self.ctx.top[ty * top + tx], on);
                if !on {
                    continue;
                }
                // Middle-layer 4×4 block under this top cell.
                let mids: Vec<bool> = (0..BLOCK_CELLS)
                    .map(|k| {
                        let (mx, my) = (tx * FANOUT + k % FANOUT, ty * FANOUT + k / FANOUT);
                        map.any_in(mx * mid_cell, my * mid_cell, mid_cell)
                    })
                    .collect();
                self.encode_child_block(&mids, 0);
                for (k, _) in mids.iter().enumerate().filter(|(_, &m)| m) {
                    let (mx, my) = (tx * FANOUT + k % FANOUT, ty * FANOUT + k / FANOUT);
                    let bottom: Vec<bool> = (0..BLOCK_CELLS)
                        .map(|j| {
                            let (x, y) = (mx * FANOUT + j % FANOUT, my * FANOUT + j / FANOUT);
                            map.get(y * map.side() + x)
                        })
                        .collect();
                    self.encode_child_block(&bottom, 1);
                }
            }
        }
        Ok(())
    }

    /// A 4×4 block known to hold at least one "1": count, first position,
    /// then gaps between consecutive ones.
    fn encode_child_block(&mut self, cells: &[bool], layer: usize) {
        let ones: Vec<usize> = (0..BLOCK_CELLS).filter(|&i| cells[i]).collect();
        let count = ones.len();
        debug_assert!(count >= 1);
        encode_tu(
            &mut self.enc,
            (count - 1) as u32,
            (BLOCK_CELLS - 1) as u32,
            &mut self.ctx.count[layer],
        );
        self.enc.encode_bits(ones[0] as u32, 4);
        for i in 1..count {
            let run = ones[i] - ones[i - 1] - 1;
            let cmax = max_run(ones[i - 1], count - 1 - i);
            encode_tu(&mut self.enc, run as u32, cmax as u32, &mut self.ctx.run[layer]);
        }
    }

    /// Selection ranks of the chosen atoms, in raster order of the map,
    /// coded by bit-planes from the most significant.
    pub fn encode_orders(&mut self, orders: &[usize]) -> Result<()> {
        check_permutation(orders)?;
        let k = orders.len();
        let width = order_width(k);
        if width as usize > MAX_ORDER_PLANES {
            return arg_err(format!("{k} atoms exceed the order coder's range"));
        }
        for plane in (0..width).rev() {
            let ones = plane_ones(k, plane);
            let ctxs = &mut self.ctx.order[plane as usize];
            let mut pos = 0;
            for i in 0..ones {
                let next = (pos..k).find(|&j| (orders[j] >> plane) & 1 == 1).unwrap();
                let cmax = (k - pos) - (ones - i);
                encode_tu(&mut self.enc, (next - pos) as u32, cmax as u32, ctxs);
                pos = next + 1;
            }
        }
        Ok(())
    }

    /// First-stage levels, given in selection order.
    pub fn encode_levels(&mut self, levels: &[i32]) -> Result<()> {
        if levels.contains(&0) {
            return arg_err("zero level in first-stage syntax");
        }
        let mut prev: i64 = 1;
        for &level in levels.iter().skip(1).rev() {
            let mag = level.unsigned_abs() as i64;
            encode_tu_eg(
                &mut self.enc,
                interleave(mag - prev),
                LEVEL_TU_CAP,
                &mut self.ctx.level_prefix,
                &mut self.ctx.level_suffix,
            );
            self.enc.encode_bypass(level < 0);
            prev = mag;
        }
        if let Some(&first) = levels.first() {
            encode_tu_eg(
                &mut self.enc,
                first.unsigned_abs() as u64 - 1,
                LEVEL_TU_CAP,
                &mut self.ctx.first_prefix,
                &mut self.ctx.first_suffix,
            );
            self.enc.encode_bypass(first < 0);
        }
        Ok(())
    }

    /// Second-stage levels over the altered-basis survivor order.
    pub fn encode_stage2(&mut self, levels: &[i32]) {
        let Some(last) = levels.iter().rposition(|&l| l != 0) else {
            self.enc.encode(&mut self.ctx.cbf, false);
            return;
        };
        self.enc.encode(&mut self.ctx.cbf, true);
        // Truncated unary of the last position, bin contexts bucketed.
        let cmax = levels.len() - 1;
        for i in 0..last {
            self.enc.encode(&mut self.ctx.last[bucket(i)], true);
        }
        if last < cmax {
            self.enc.encode(&mut self.ctx.last[bucket(last)], false);
        }
        for (j, &l) in levels[..=last].iter().enumerate() {
            self.enc.encode(&mut self.ctx.sig[bucket(j)], l != 0);
            if l == 0 {
                continue;
            }
            let mag = l.unsigned_abs() as u64;
            self.enc.encode(&mut self.ctx.gt1, mag > 1);
            if mag > 1 {
                self.enc.encode(&mut self.ctx.gt2, mag > 2);
                if mag > 2 {
                    encode_eg(&mut self.enc, mag - 3, 0, None);
                }
            }
            self.enc.encode_bypass(l < 0);
        }
    }
}

/// Largest gap to the next "1" after position `prev` that still leaves room
/// for `after` more ones in a 16-cell block.
fn max_run(prev: usize, after: usize) -> usize {
    BLOCK_CELLS - 1 - after - prev - 1
}

/// Mirror of [`SyntaxWriter`].
pub struct SyntaxReader<'a> {
    dec: Decoder<'a>,
    ctx: Contexts,
    map_side: usize,
}

impl<'a> SyntaxReader<'a> {
    pub fn new(data: &'a [u8], map_side: usize) -> Result<SyntaxReader<'a>> {
        SignificanceMap::new(map_side)?;
        let top = layer_sides(map_side)[0];
        Ok(SyntaxReader {
            dec: Decoder::new(data)?,
            ctx: Contexts::new(top * top),
            map_side,
        })
    }

    pub fn position(&self) -> usize {
        self.dec.position()
    }

    pub fn decode_mean(&mut self) -> Result<i32> {
        let v = deinterleave(decode_eg(&mut self.dec, MEAN_EG_ORDER, None)?);
        i32::try_from(v).or_else(|_| stream_err("mean level out of range"))
    }

    pub fn decode_significance_map(&mut self) -> Result<SignificanceMap> {
        let side = self.map_side;
        let mut map = SignificanceMap::new(side)?;
        let [top, _, _] = layer_sides(side);
        for ty in 0..top {
            for tx in 0..top {
                if !self.dec.decode(&mut self.ctx.top[ty * top + tx])? {
                    continue;
                }
                let mids = self.decode_child_block(0)?;
                for k in (0..BLOCK_CELLS).filter(|&k| mids[k]) {
                    let (mx, my) = (tx * FANOUT + k % FANOUT, ty * FANOUT + k / FANOUT);
                    let bottom = self.decode_child_block(1)?;
                    for j in (0..BLOCK_CELLS).filter(|&j| bottom[j]) {
                        let (x, y) = (mx * FANOUT + j % FANOUT, my * FANOUT + j / FANOUT);
                        map.set(y * side + x, true);
                    }
                }
            }
        }
        Ok(map)
    }

    fn decode_child_block(&mut self, layer: usize) -> Result<[bool; BLOCK_CELLS]> {
        let count = decode_tu(
            &mut self.dec,
            (BLOCK_CELLS - 1) as u32,
            &mut self.ctx.count[layer],
        )? as usize
            + 1;
        let first = self.dec.decode_bits(4)? as usize;
        if first + count > BLOCK_CELLS {
            return stream_err("significance block overflows");
        }
        let mut cells = [false; BLOCK_CELLS];
        cells[first] = true;
        let mut prev = first;
        for i in 1..count {
            let cmax = max_run(prev, count - 1 - i);
            let run = decode_tu(&mut self.dec, cmax as u32, &mut self.ctx.run[layer])? as usize;
            prev += run + 1;
            cells[prev] = true;
        }
        Ok(cells)
    }

    pub fn decode_orders(&mut self, k: usize) -> Result<Vec<usize>> {
        let width = order_width(k);
        if width as usize > MAX_ORDER_PLANES {
            return stream_err(format!("{k} atoms exceed the order coder's range"));
        }
        let mut orders = vec![0usize; k];
        for plane in (0..width).rev() {
            let ones = plane_ones(k, plane);
            let ctxs = &mut self.ctx.order[plane as usize];
            let mut pos = 0;
            for i in 0..ones {
                let cmax = (k - pos) - (ones - i);
                let run = decode_tu(&mut self.dec, cmax as u32, ctxs)? as usize;
                pos += run;
                orders[pos] |= 1 << plane;
                pos += 1;
            }
        }
        if check_permutation(&orders).is_err() {
            return stream_err("decoded orders are not a permutation");
        }
        Ok(orders)
    }

    pub fn decode_levels(&mut self, k: usize) -> Result<Vec<i32>> {
        let mut levels = vec![0i32; k];
        let mut prev: i64 = 1;
        for j in (1..k).rev() {
            let d = deinterleave(decode_tu_eg(
                &mut self.dec,
                LEVEL_TU_CAP,
                &mut self.ctx.level_prefix,
                &mut self.ctx.level_suffix,
            )?);
            let mag = prev + d;
            if mag < 1 || mag > i32::MAX as i64 {
                return stream_err("level magnitude out of range");
            }
            let neg = self.dec.decode_bypass()?;
            levels[j] = if neg { -(mag as i32) } else { mag as i32 };
            prev = mag;
        }
        if k > 0 {
            let mag = decode_tu_eg(
                &mut self.dec,
                LEVEL_TU_CAP,
                &mut self.ctx.first_prefix,
                &mut self.ctx.first_suffix,
            )? + 1;
            if mag > i32::MAX as u64 {
                return stream_err("level magnitude out of range");
            }
            let neg = self.dec.decode_bypass()?;
            levels[0] = if neg { -(mag as i32) } else { mag as i32 };
        }
        Ok(levels)
    }

    pub fn decode_stage2(&mut self, len: usize) -> Result<Vec<i32>> {
        let mut levels = vec![0i32; len];
        if !self.dec.decode(&mut self.ctx.cbf)? {
            return Ok(levels);
        }
        if len == 0 {
            return stream_err("coded-block flag set with no coefficients");
        }
        let cmax = len - 1;
        let mut last = 0;
        while last < cmax && self.dec.decode(&mut self.ctx.last[bucket(last)])? {
            last += 1;
        }
        for (j, slot) in levels[..=last].iter_mut().enumerate() {
            if !self.dec.decode(&mut self.ctx.sig[bucket(j)])? {
                continue;
            }
            let mut mag = 1u64;
            if self.dec.decode(&mut self.ctx.gt1)? {
                mag = 2;
                if self.dec.decode(&mut self.ctx.gt2)? {
                    mag = 3 + decode_eg(&mut self.dec, 0, None)?;
                }
            }
            if mag > i32::MAX as u64 {
                return stream_err("coefficient magnitude out of range");
            }
            let neg = self.dec.decode_bypass()?;
            *slot = if neg { -(mag as i32) } else { mag as i32 };
        }
        if levels[last] == 0 {
            return stream_err("last significant coefficient is zero");
        }
        Ok(levels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_zero_map_codes_nine_bins() {
        let mut w = SyntaxWriter::new(48).unwrap();
        w.encode_significance_map(&SignificanceMap::new(48).unwrap()).unwrap();
        assert_eq!(w.bins(), 9);
    }

    #[test]
    fn corner_atom_path() {
        // Displacement (-24,-24) is raster index 0.
        let map = SignificanceMap::from_indices(48, &[0]).unwrap();
        let mut w = SyntaxWriter::new(48).unwrap();
        w.encode_significance_map(&map).unwrap();
        // 9 top bins + 2 × (count bin + 4 position bins).
        assert_eq!(w.bins(), 9 + 2 * 5);
        let data = w.finish();
        let mut r = SyntaxReader::new(&data, 48).unwrap();
        assert_eq!(r.decode_significance_map().unwrap(), map);
    }

    #[test]
    fn two_ones_in_one_bottom_block() {
        // Scan positions 3 and 9 of the top-left bottom block: (3,0), (1,2).
        let map = SignificanceMap::from_indices(48, &[3, 2 * 48 + 1]).unwrap();
        let mut w = SyntaxWriter::new(48).unwrap();
        w.encode_significance_map(&map).unwrap();
        // Middle block: count 1 (1 bin) + 4 bypass. Bottom block: count 2
        // (2 bins) + 4 bypass + run 5 (TU with cmax 11: 6 bins).
        assert_eq!(w.bins(), 9 + 5 + 2 + 4 + 6);
        let data = w.finish();
        let mut r = SyntaxReader::new(&data, 48).unwrap();
        assert_eq!(r.decode_significance_map().unwrap(), map);
    }

    #[test]
    fn orders_bit_planes() {
        let mut w = SyntaxWriter::new(48).unwrap();
        w.encode_orders(&[0]).unwrap();
        assert_eq!(w.bins(), 0);
        assert_eq!(order_width(3), 2);
        assert_eq!(order_width(4), 2);
        assert_eq!(order_width(5), 3);
        // (3,0,2,1): plane 1 = 1,0,1,0 ; plane 0 = 1,0,0,1.
        // Plane 1: runs 0 (cmax 2) and 1 (cmax 2) -> 1 + 2 bins.
        // Plane 0: runs 0 (cmax 2) and 2 (cmax 2) -> 1 + 2 bins.
        w.encode_orders(&[3, 0, 2, 1]).unwrap();
        assert_eq!(w.bins(), 6);
        let data = w.finish();
        let mut r = SyntaxReader::new(&data, 48).unwrap();
        assert_eq!(r.decode_orders(1).unwrap(), vec![0]);
        assert_eq!(r.decode_orders(4).unwrap(), vec![3, 0, 2, 1]);
    }

    #[test]
    fn orders_must_be_permutation() {
        let mut w = SyntaxWriter::new(48).unwrap();
        assert!(w.encode_orders(&[0, 0, 1]).is_err());
        assert!(w.encode_orders(&[0, 3]).is_err());
    }

    #[test]
    fn level_traces() {
        // K=1, +5: first-atom TU(4) saturates, EG0(0) = 1 bin, sign.
        let mut w = SyntaxWriter::new(16).unwrap();
        w.encode_levels(&[5]).unwrap();
        assert_eq!(w.bins(), 4 + 1 + 1);

        // (+3,+3,+3): differences 3-1=2 then 0, first codes 2.
        let mut w = SyntaxWriter::new(16).unwrap();
        w.encode_levels(&[3, 3, 3]).unwrap();
        // interleave(2)=4 -> 4 prefix + 1 EG; interleave(0)=0 -> 1; first 2 -> 3.
        assert_eq!(w.bins(), (5 + 1) + (1 + 1) + (3 + 1));

        // (-2,+2): codes |2| (diff 1 -> 2) then first |-2|-1 = 1.
        let mut w = SyntaxWriter::new(16).unwrap();
        w.encode_levels(&[-2, 2]).unwrap();
        assert_eq!(w.bins(), (3 + 1) + (2 + 1));
        let data = w.finish();
        let mut r = SyntaxReader::new(&data, 16).unwrap();
        assert_eq!(r.decode_levels(2).unwrap(), vec![-2, 2]);
    }

    #[test]
    fn zero_level_rejected() {
        let mut w = SyntaxWriter::new(16).unwrap();
        assert!(w.encode_levels(&[1, 0]).is_err());
    }

    #[test]
    fn stage2_traces() {
        let mut w = SyntaxWriter::new(16).unwrap();
        w.encode_stage2(&[0; 10]);
        assert_eq!(w.bins(), 1);

        let mut w = SyntaxWriter::new(16).unwrap();
        w.encode_stage2(&[1, 0, 0]);
        // cbf, last TU(0) = one 0 bin, sig, gt1, sign.
        assert_eq!(w.bins(), 5);

        let mut w = SyntaxWriter::new(16).unwrap();
        w.encode_stage2(&[0, 0, 4, 0]);
        // cbf, last TU(2) = 3 bins, sig x3, gt1, gt2, EG0(1) = 3, sign.
        assert_eq!(w.bins(), 1 + 3 + 3 + 1 + 1 + 3 + 1);
        let data = w.finish();
        let mut r = SyntaxReader::new(&data, 16).unwrap();
        assert_eq!(r.decode_stage2(4).unwrap(), vec![0, 0, 4, 0]);
    }

    #[test]
    fn plane_counts_match_enumeration() {
        for k in 0..=256usize {
            for p in 0..9 {
                let brute = (0..k).filter(|v| (v >> p) & 1 == 1).count();
                assert_eq!(plane_ones(k, p), brute, "k={k} p={p}");
            }
        }
    }

    #[test]
    fn order_mapping_roundtrip() {
        let chosen = vec![40, 3, 17, 9];
        let orders = orders_from_selection(&chosen);
        // Raster order of set bits: 3, 9, 17, 40 -> ranks 1, 3, 2, 0.
        assert_eq!(orders, vec![1, 3, 2, 0]);
        let back = selection_from_orders(&[3, 9, 17, 40], &orders).unwrap();
        assert_eq!(back, chosen);
    }

    #[test]
    fn bad_map_side() {
        assert!(SignificanceMap::new(40).is_err());
        let mut w = SyntaxWriter::new(48).unwrap();
        let m = SignificanceMap::new(16).unwrap();
        assert!(w.encode_significance_map(&m).is_err());
    }
}
