//! Second-stage basis: the 2D DCT-II, altered to span the orthogonal
//! complement of the first-stage atoms.

use std::f64::consts::PI;

use crate::error::{arg_err, Result};
use crate::vector;

/// Vectors whose norm after projection falls below this are dropped.
pub const BASIS_DROP_TOL: f64 = 1e-6;

/// `(row, col)` frequency pairs of an `n×n` block in zig-zag order.
pub fn zigzag(n: usize) -> Vec<(usize, usize)> {
    let mut order = Vec::with_capacity(n * n);
    if n == 0 {
        return order;
    }
    for d in 0..(2 * n - 1) {
        let lo = d.saturating_sub(n - 1);
        let hi = d.min(n - 1);
        if d % 2 == 1 {
            for row in lo..=hi {
                order.push((row, d - row));
            }
        } else {
            for row in (lo..=hi).rev() {
                order.push((row, d - row));
            }
        }
    }
    order
}

/// Orthonormal 2D DCT-II basis vectors for `block_size × block_size`
/// blocks, in zig-zag frequency order. Each vector is raster ordered.
pub fn dct_basis(block_size: usize) -> Vec<Vec<f64>> {
    let n = block_size;
    let scale = |k: usize| {
        if k == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        }
    };
    // 1D basis table: c[k][i]
    let c: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| scale(k) * (PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64).cos())
                .collect()
        })
        .collect();
    zigzag(n)
        .into_iter()
        .map(|(v, u)| {
            let mut out = Vec::with_capacity(n * n);
            for y in 0..n {
                for x in 0..n {
                    out.push(c[v][y] * c[u][x]);
                }
            }
            out
        })
        .collect()
}

/// DCT vectors made orthogonal to a set of first-stage atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct AlteredBasis {
    pub vectors: Vec<Vec<f64>>,
    /// Zig-zag index of the DCT vector each survivor came from.
    pub kept_ids: Vec<usize>,
}

impl AlteredBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// The unaltered basis.
    pub fn identity(dct: &[Vec<f64>]) -> AlteredBasis {
        AlteredBasis {
            vectors: dct.to_vec(),
            kept_ids: (0..dct.len()).collect(),
        }
    }
}

/// Modified Gram-Schmidt over `dct` in order: each vector has the span of
/// `atoms` and of all earlier survivors projected out, is dropped if its
/// remaining norm is below [`BASIS_DROP_TOL`], and is renormalized
/// otherwise.
///
/// `atoms` must be orthonormal. The operation order is fixed, so encoder
/// and decoder obtain bit-identical results.
pub fn orthonormalize_against(dct: &[Vec<f64>], atoms: &[Vec<f64>]) -> AlteredBasis {
    if atoms.is_empty() {
        return AlteredBasis::identity(dct);
    }
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(dct.len());
    let mut kept_ids = Vec::with_capacity(dct.len());
    for (id, d) in dct.iter().enumerate() {
        let mut v = d.clone();
        for b in atoms {
            let p = vector::dot(b, &v);
            vector::sub_scaled(&mut v, p, b);
        }
        for t in &vectors {
            let p = vector::dot(t, &v);
            vector::sub_scaled(&mut v, p, t);
        }
        let n = vector::norm(&v);
        if n < BASIS_DROP_TOL {
            continue;
        }
        vector::scale(&mut v, 1.0 / n);
        vectors.push(v);
        kept_ids.push(id);
    }
    AlteredBasis { vectors, kept_ids }
}

/// Coefficients `λ_j = <r, t_j>`.
pub fn project_residual(r: &[f64], basis: &AlteredBasis) -> Result<Vec<f64>> {
    if let Some(t) = basis.vectors.first() {
        if t.len() != r.len() {
            return arg_err(format!(
                "residual has {} samples, basis vectors have {}",
                r.len(),
                t.len()
            ));
        }
    }
    Ok(basis.vectors.iter().map(|t| vector::dot(r, t)).collect())
}

/// `Σ coeffs[j] * basis[j]`, accumulated in index order.
pub fn synthesize(basis: &[Vec<f64>], coeffs: &[f64], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (b, &c) in basis.iter().zip(coeffs) {
        if c != 0.0 {
            vector::sub_scaled(&mut out, -c, b);
        }
    }
    out
}
