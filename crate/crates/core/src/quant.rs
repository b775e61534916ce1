//! Uniform scalar quantizer with a widened zero bin.
//!
//! Forward: `level = sign(c) * floor(|c|/q + 1/6)`. Reverse: `level * q`.
//! The rounding offset of 1/6 is the usual choice for inter-coded residuals;
//! it widens the zero bin to `|c| < 5q/6`.

use crate::error::{arg_err, Result};

/// Rounding offset added before truncation.
pub const DEADZONE_OFFSET: f64 = 1.0 / 6.0;

/// Absorbs representation error at exact bin boundaries, e.g. `c = 5q/6`,
/// whose ratio `|c|/q` rounds to just below `5/6` in binary floating point.
const BOUNDARY_SLACK: f64 = 1e-9;

/// Stepsizes for both coding stages.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantParams {
    pub q1: f64,
    pub q2: f64,
}

impl QuantParams {
    pub fn new(q1: f64, q2: f64) -> Result<QuantParams> {
        check_step(q1)?;
        check_step(q2)?;
        Ok(QuantParams { q1, q2 })
    }
}

fn check_step(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        arg_err(format!("stepsize {q} must be positive and finite"))
    }
}

/// Deadzone quantization of one coefficient.
pub fn quantize(c: f64, q: f64) -> Result<i32> {
    if !c.is_finite() {
        return arg_err(format!("cannot quantize non-finite value {c}"));
    }
    check_step(q)?;
    let mag = (c.abs() / q + DEADZONE_OFFSET + BOUNDARY_SLACK).floor();
    if mag > i32::MAX as f64 {
        return arg_err(format!("coefficient {c} overflows at stepsize {q}"));
    }
    let level = mag as i32;
    Ok(if c < 0.0 { -level } else { level })
}

#[inline]
pub fn dequantize(level: i32, q: f64) -> f64 {
    level as f64 * q
}
