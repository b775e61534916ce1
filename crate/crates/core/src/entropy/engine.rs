//! Adaptive binary range coder.
//!
//! 32-bit range, 15-bit probabilities, carry propagation through a cached
//! byte (the scheme popularized by LZMA). Each context holds the
//! probability of a zero bin and adapts by an exponential-decay update with
//! shift [`ADAPT_SHIFT`]. Bypass bins halve the range and cost exactly one
//! bit.

use crate::error::{stream_err, Result};

pub const PROB_BITS: u32 = 15;
const PROB_ONE: u32 = 1 << PROB_BITS;
pub const ADAPT_SHIFT: u32 = 4;
const TOP: u32 = 1 << 24;

/// Adaptive probability state for one binary decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Context(u16);

impl Default for Context {
    fn default() -> Self {
        Context((PROB_ONE / 2) as u16)
    }
}

impl Context {
    /// Probability that the next bin is 0.
    pub fn p_zero(self) -> f64 {
        self.0 as f64 / PROB_ONE as f64
    }

    #[inline]
    fn update(&mut self, bit: bool) {
        let p = self.0 as u32;
        self.0 = if bit {
            p - (p >> ADAPT_SHIFT)
        } else {
            p + ((PROB_ONE - p) >> ADAPT_SHIFT)
        } as u16;
    }
}

pub struct Encoder {
    low: u64,
    range: u32,
    cache: u8,
    cache_size: u64,
    out: Vec<u8>,
    /// The first byte the carry scheme emits is always zero and is omitted.
    skip_first: bool,
    bins: u64,
    cost: f64,
}

impl Default for Encoder {
    fn default() -> Self {
        Self::new()
    }
}

impl Encoder {
    pub fn new() -> Encoder {
        Encoder {
            low: 0,
            range: u32::MAX,
            cache: 0,
            cache_size: 1,
            out: Vec::new(),
            skip_first: true,
            bins: 0,
            cost: 0.0,
        }
    }

    fn shift_low(&mut self) {
        if (self.low as u32) < 0xFF00_0000 || (self.low >> 32) != 0 {
            let carry = (self.low >> 32) as u8;
            let mut temp = self.cache;
            loop {
                if self.skip_first {
                    self.skip_first = false;
                } else {
                    self.out.push(temp.wrapping_add(carry));
                }
                temp = 0xFF;
                self.cache_size -= 1;
                if self.cache_size == 0 {
                    break;
                }
            }
            self.cache = (self.low >> 24) as u8;
        }
        self.cache_size += 1;
        self.low = (self.low & 0x00FF_FFFF) << 8;
    }

    #[inline]
    fn normalize(&mut self) {
        while self.range < TOP {
            self.range <<= 8;
            self.shift_low();
        }
    }

    /// Codes one bin with an adaptive context.
    pub fn encode(&mut self, ctx: &mut Context, bit: bool) {
        let p = ctx.0 as u32;
        let bound = (self.range >> PROB_BITS) * p;
        let p_bin = if bit { 1.0 - ctx.p_zero() } else { ctx.p_zero() };
        self.cost -= p_bin.log2();
        if bit {
            self.low += bound as u64;
            self.range -= bound;
        } else {
            self.range = bound;
        }
        ctx.update(bit);
        self.bins += 1;
        self.normalize();
    }

    /// Codes one equiprobable bin.
    pub fn encode_bypass(&mut self, bit: bool) {
        self.range >>= 1;
        if bit {
            self.low += self.range as u64;
        }
        self.cost += 1.0;
        self.bins += 1;
        self.normalize();
    }

    /// `count` low bits of `value`, most significant first, in bypass mode.
    pub fn encode_bits(&mut self, value: u32, count: u32) {
        for i in (0..count).rev() {
            self.encode_bypass((value >> i) & 1 == 1);
        }
    }

    /// Total bins coded so far.
    pub fn bins(&self) -> u64 {
        self.bins
    }

    /// Ideal code length of the bins so far, from the model probabilities.
    pub fn estimated_bits(&self) -> f64 {
        self.cost
    }

    /// Flushes the coder and returns the payload. Trailing zero bytes are
    /// trimmed; the decoder reads zeros past the end.
    pub fn finish(mut self) -> Vec<u8> {
        // Pick the value in [low, low + range) with the most trailing zero
        // bits, so the flushed tail is as short as possible.
        let hi = self.low + self.range as u64 - 1;
        for bits in (0..32).rev() {
            let mask = (1u64 << bits) - 1;
            let v = (self.low + mask) & !mask;
            if v <= hi {
                self.low = v;
                break;
            }
        }
        for _ in 0..5 {
            self.shift_low();
        }
        while self.out.last() == Some(&0) {
            self.out.pop();
        }
        self.out
    }
}

pub struct Decoder<'a> {
    data: &'a [u8],
    pos: usize,
    range: u32,
    code: u32,
}

impl<'a> Decoder<'a> {
    pub fn new(data: &'a [u8]) -> Result<Decoder<'a>> {
        let mut d = Decoder {
            data,
            pos: 0,
            range: u32::MAX,
            code: 0,
        };
        for _ in 0..4 {
            d.code = (d.code << 8) | d.next_byte() as u32;
        }
        if d.code == u32::MAX {
            return stream_err("invalid range coder preamble");
        }
        Ok(d)
    }

    #[inline]
    fn next_byte(&mut self) -> u8 {
        let b = self.data.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        b
    }

    #[inline]
    fn normalize(&mut self) {
        while self.range < TOP {
            self.range <<= 8;
            self.code = (self.code << 8) | self.next_byte() as u32;
        }
    }

    /// Bytes consumed, including zero padding read past the end.
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn decode(&mut self, ctx: &mut Context) -> Result<bool> {
        if self.code >= self.range {
            return stream_err("range coder state out of bounds");
        }
        let bound = (self.range >> PROB_BITS) * ctx.0 as u32;
        let bit = if self.code < bound {
            self.range = bound;
            false
        } else {
            self.code -= bound;
            self.range -= bound;
            true
        };
        ctx.update(bit);
        self.normalize();
        Ok(bit)
    }

    pub fn decode_bypass(&mut self) -> Result<bool> {
        if self.code >= self.range {
            return stream_err("range coder state out of bounds");
        }
        self.range >>= 1;
        let bit = if self.code >= self.range {
            self.code -= self.range;
            true
        } else {
            false
        };
        self.normalize();
        Ok(bit)
    }

    pub fn decode_bits(&mut self, count: u32) -> Result<u32> {
        let mut v = 0;
        for _ in 0..count {
            v = (v << 1) | self.decode_bypass()? as u32;
        }
        Ok(v)
    }
}
