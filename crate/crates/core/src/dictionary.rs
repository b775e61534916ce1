//! The self-adaptive dictionary: every integer-displacement candidate block
//! from the reference frame, mean-removed and unit-normalized.

use crate::error::{arg_err, Result};
use crate::frame::Frame;
use crate::vector;

/// Candidates whose mean-removed norm is below this multiple of `sqrt(N)`
/// are flagged invalid.
pub const DEGENERATE_TOL: f64 = 1e-9;

/// Inclusive integer displacement range `lo..=hi`, applied to both axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchRange {
    pub lo: i32,
    pub hi: i32,
}

impl Default for SearchRange {
    fn default() -> Self {
        SearchRange { lo: -24, hi: 23 }
    }
}

impl SearchRange {
    pub fn new(lo: i32, hi: i32) -> Result<SearchRange> {
        if lo >= hi {
            return arg_err(format!("search range {lo}..{hi} is empty"));
        }
        Ok(SearchRange { lo, hi })
    }

    /// `-radius ..= radius-1`, so the side length is `2*radius`.
    pub fn from_radius(radius: u32) -> Result<SearchRange> {
        if radius == 0 {
            return arg_err("search radius must be positive");
        }
        SearchRange::new(-(radius as i32), radius as i32 - 1)
    }

    /// Side length `s` of the displacement grid.
    pub fn side(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    /// Number of candidates `M = s²`.
    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Raster index of displacement `(dx, dy)`; rows run over `dy`.
    pub fn index_of(&self, mv: (i32, i32)) -> Option<usize> {
        let (dx, dy) = mv;
        if dx < self.lo || dx > self.hi || dy < self.lo || dy > self.hi {
            return None;
        }
        let s = self.side();
        Some((dy - self.lo) as usize * s + (dx - self.lo) as usize)
    }

    pub fn motion_vector(&self, index: usize) -> (i32, i32) {
        let s = self.side();
        let dx = (index % s) as i32 + self.lo;
        let dy = (index / s) as i32 + self.lo;
        (dx, dy)
    }
}

/// Mean-removed, unit-normalized candidate for one displacement, or `None`
/// if it is degenerate. Out-of-frame samples clamp to the frame border.
pub fn candidate_atom(
    reference: &Frame,
    origin: (usize, usize),
    mv: (i32, i32),
    block_size: usize,
) -> Option<Vec<f64>> {
    let n = block_size * block_size;
    let mut atom = Vec::with_capacity(n);
    let x0 = origin.0 as isize + mv.0 as isize;
    let y0 = origin.1 as isize + mv.1 as isize;
    for y in 0..block_size as isize {
        for x in 0..block_size as isize {
            atom.push(reference.get_clamped(x0 + x, y0 + y) as f64);
        }
    }
    let mu = vector::mean(&atom);
    for v in atom.iter_mut() {
        *v -= mu;
    }
    let norm = vector::norm(&atom);
    if norm < DEGENERATE_TOL * (n as f64).sqrt() {
        return None;
    }
    vector::scale(&mut atom, 1.0 / norm);
    Some(atom)
}

/// Per-block dictionary over the full `s×s` displacement grid.
#[derive(Clone, Debug)]
pub struct Dictionary {
    range: SearchRange,
    dim: usize,
    /// `M × N`, row `i` is atom `i` (zeros for invalid slots).
    atoms: Vec<f64>,
    valid: Vec<bool>,
}

impl Dictionary {
    /// Builds a dictionary directly from column vectors. Each column is
    /// normalized; columns with (near-)zero norm are marked invalid. The
    /// displacement grid must have exactly `columns.len()` cells.
    ///
    /// Atoms built this way are not mean-removed; this is the entry point for
    /// synthetic problems.
    pub fn from_columns(columns: Vec<Vec<f64>>, range: SearchRange) -> Result<Dictionary> {
        if columns.len() != range.len() {
            return arg_err(format!(
                "{} columns for a {}-cell grid",
                columns.len(),
                range.len()
            ));
        }
        let dim = columns.first().map_or(0, Vec::len);
        let mut atoms = Vec::with_capacity(columns.len() * dim);
        let mut valid = Vec::with_capacity(columns.len());
        for mut c in columns {
            if c.len() != dim {
                return arg_err("columns differ in length");
            }
            let n = vector::norm(&c);
            if n < DEGENERATE_TOL * (dim as f64).sqrt() {
                c.iter_mut().for_each(|v| *v = 0.0);
                valid.push(false);
            } else {
                vector::scale(&mut c, 1.0 / n);
                valid.push(true);
            }
            atoms.extend_from_slice(&c);
        }
        Ok(Dictionary {
            range,
            dim,
            atoms,
            valid,
        })
    }

    pub fn range(&self) -> SearchRange {
        self.range
    }

    /// Vector length `N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of grid slots `M`, valid or not.
    pub fn len(&self) -> usize {
        self.valid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valid.is_empty()
    }

    pub fn atom(&self, index: usize) -> &[f64] {
        &self.atoms[index * self.dim..][..self.dim]
    }

    pub fn is_valid(&self, index: usize) -> bool {
        self.valid[index]
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    pub fn motion_vector(&self, index: usize) -> (i32, i32) {
        self.range.motion_vector(index)
    }
}

/// Builds the dictionary for the block at `origin` from the reconstructed
/// reference frame.
pub fn build_dictionary(
    reference: &Frame,
    origin: (usize, usize),
    range: SearchRange,
    block_size: usize,
) -> Result<Dictionary> {
    if block_size == 0 || block_size > reference.width || block_size > reference.height {
        return arg_err(format!(
            "block size {block_size} does not fit a {}x{} frame",
            reference.width, reference.height
        ));
    }
    let n = block_size * block_size;
    let m = range.len();
    let mut atoms = Vec::with_capacity(m * n);
    let mut valid = Vec::with_capacity(m);
    for index in 0..m {
        match candidate_atom(reference, origin, range.motion_vector(index), block_size) {
            Some(a) => {
                atoms.extend_from_slice(&a);
                valid.push(true);
            }
            None => {
                atoms.extend(std::iter::repeat_n(0.0, n));
                valid.push(false);
            }
        }
    }
    Ok(Dictionary {
        range,
        dim: n,
        atoms,
        valid,
    })
}
