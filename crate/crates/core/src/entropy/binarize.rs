//! Binarizations shared by the syntax elements: truncated unary,
//! exp-Golomb, and signed-to-unsigned interleaving.

use super::engine::{Context, Decoder, Encoder};
use crate::error::{stream_err, Result};

/// Longest exp-Golomb prefix a decoder accepts before declaring the stream
/// corrupt.
const MAX_EG_PREFIX: u32 = 30;

/// `0, -1, 1, -2, 2, ...` to `0, 1, 2, 3, 4, ...`.
#[inline]
pub fn interleave(v: i64) -> u64 {
    if v >= 0 {
        (v as u64) << 1
    } else {
        ((-v as u64) << 1) - 1
    }
}

#[inline]
pub fn deinterleave(u: u64) -> i64 {
    if u & 1 == 0 {
        (u >> 1) as i64
    } else {
        -(((u + 1) >> 1) as i64)
    }
}

#[inline]
fn ctx_at(ctxs: &mut [Context], i: usize) -> &mut Context {
    let last = ctxs.len() - 1;
    &mut ctxs[i.min(last)]
}

/// Truncated unary: `value` ones followed by a zero, the zero omitted when
/// `value == cmax`. Bin `i` uses `ctxs[min(i, len-1)]`.
pub fn encode_tu(enc: &mut Encoder, value: u32, cmax: u32, ctxs: &mut [Context]) {
    debug_assert!(value <= cmax);
    for i in 0..value {
        enc.encode(ctx_at(ctxs, i as usize), true);
    }
    if value < cmax {
        enc.encode(ctx_at(ctxs, value as usize), false);
    }
}

pub fn decode_tu(dec: &mut Decoder, cmax: u32, ctxs: &mut [Context]) -> Result<u32> {
    let mut v = 0;
    while v < cmax && dec.decode(ctx_at(ctxs, v as usize))? {
        v += 1;
    }
    Ok(v)
}

/// Order-`k` exp-Golomb. With `ctxs` the unary prefix is context coded;
/// suffix bits are always bypass.
pub fn encode_eg(enc: &mut Encoder, value: u64, k: u32, mut ctxs: Option<&mut [Context]>) {
    let mut value = value;
    let mut k = k;
    let mut i = 0;
    while value >= 1 << k {
        match ctxs.as_deref_mut() {
            Some(c) => enc.encode(ctx_at(c, i), true),
            None => enc.encode_bypass(true),
        }
        value -= 1 << k;
        k += 1;
        i += 1;
    }
    match ctxs {
        Some(c) => enc.encode(ctx_at(c, i), false),
        None => enc.encode_bypass(false),
    }
    for b in (0..k).rev() {
        enc.encode_bypass((value >> b) & 1 == 1);
    }
}

pub fn decode_eg(dec: &mut Decoder, k: u32, mut ctxs: Option<&mut [Context]>) -> Result<u64> {
    let mut k = k;
    let mut base = 0u64;
    let mut i = 0;
    loop {
        let bit = match ctxs.as_deref_mut() {
            Some(c) => dec.decode(ctx_at(c, i))?,
            None => dec.decode_bypass()?,
        };
        if !bit {
            break;
        }
        if k >= MAX_EG_PREFIX {
            return stream_err("exp-Golomb prefix too long");
        }
        base += 1 << k;
        k += 1;
        i += 1;
    }
    let mut suffix = 0u64;
    for _ in 0..k {
        suffix = (suffix << 1) | dec.decode_bypass()? as u64;
    }
    Ok(base + suffix)
}

/// Truncated-unary prefix with cap `cap`, followed by an exp-Golomb(0)
/// suffix for `value - cap` when the prefix saturates.
pub fn encode_tu_eg(
    enc: &mut Encoder,
    value: u64,
    cap: u32,
    prefix: &mut [Context],
    suffix: &mut [Context],
) {
    let head = value.min(cap as u64) as u32;
    encode_tu(enc, head, cap, prefix);
    if head == cap {
        encode_eg(enc, value - cap as u64, 0, Some(suffix));
    }
}

pub fn decode_tu_eg(
    dec: &mut Decoder,
    cap: u32,
    prefix: &mut [Context],
    suffix: &mut [Context],
) -> Result<u64> {
    let head = decode_tu(dec, cap, prefix)?;
    if head == cap {
        Ok(cap as u64 + decode_eg(dec, 0, Some(suffix))?)
    } else {
        Ok(head as u64)
    }
}
