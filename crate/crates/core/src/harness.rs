//! Rate-distortion sweeps over `(q1, q2, t)`.

use std::io::Write;

use rayon::prelude::*;

use crate::codec::{encode_sequence, CodecParams, EncodedSequence, FrameType};
use crate::error::{arg_err, Result};
use crate::frame::Frame;

/// Cartesian grid of first-stage stepsizes, second-stage stepsizes and
/// termination ratios.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepGrid {
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
    pub t: Vec<f64>,
}

impl SweepGrid {
    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.q1.len() * self.q2.len() * self.t.len());
        for &q1 in &self.q1 {
            for &q2 in &self.q2 {
                for &t in &self.t {
                    out.push((q1, q2, t));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub q1: f64,
    pub q2: f64,
    pub t: f64,
    /// Average bits per frame over the predicted frames (all frames when
    /// the sequence has only an intra frame).
    pub rate: f64,
    /// Average PSNR over the same frames, in dB.
    pub psnr: f64,
    /// Whether the point lies on the Pareto front of the sweep.
    pub pareto: bool,
}

/// Average rate and PSNR over the inter frames of an encode.
pub fn summarize(encoded: &EncodedSequence) -> (f64, f64) {
    let inter: Vec<_> = encoded
        .stats
        .iter()
        .filter(|s| s.frame_type == FrameType::Inter)
        .collect();
    let pick: Vec<_> = if inter.is_empty() {
        encoded.stats.iter().collect()
    } else {
        inter
    };
    let n = pick.len() as f64;
    let rate = pick.iter().map(|s| s.bits as f64).sum::<f64>() / n;
    let psnr = pick.iter().map(|s| s.psnr).sum::<f64>() / n;
    (rate, psnr)
}

/// Encodes `frames` at every grid point, in parallel. Parameters not on the
/// grid come from `base`.
pub fn rd_sweep(frames: &[Frame], base: &CodecParams, grid: &SweepGrid) -> Result<Vec<SweepPoint>> {
    let points = grid.points();
    if points.is_empty() {
        return arg_err("sweep grid is empty");
    }
    let mut out: Vec<SweepPoint> = points
        .par_iter()
        .map(|&(q1, q2, t)| {
            let params = CodecParams {
                q1,
                q2,
                termination_ratio: t,
                ..base.clone()
            };
            let encoded = encode_sequence(frames, &params)?;
            let (rate, psnr) = summarize(&encoded);
            Ok(SweepPoint {
                q1,
                q2,
                t,
                rate,
                psnr,
                pareto: false,
            })
        })
        .collect::<Result<_>>()?;
    let rp: Vec<(f64, f64)> = out.iter().map(|p| (p.rate, p.psnr)).collect();
    for i in pareto_front(&rp) {
        out[i].pareto = true;
    }
    Ok(out)
}

/// Indices of points not dominated by any other point, where lower rate
/// and higher PSNR are better. Sorted by increasing rate.
pub fn pareto_front(points: &[(f64, f64)]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a]
            .0
            .total_cmp(&points[b].0)
            .then(points[b].1.total_cmp(&points[a].1))
    });
    let mut front = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for i in idx {
        if points[i].1 > best {
            best = points[i].1;
            front.push(i);
        }
    }
    front
}

/// PSNR of a rate-sorted front at `rate`, linearly interpolated. `None`
/// outside the front's rate span.
pub fn interpolate_front(front: &[(f64, f64)], rate: f64) -> Option<f64> {
    let first = front.first()?;
    let last = front.last()?;
    if rate < first.0 || rate > last.0 {
        return None;
    }
    for w in front.windows(2) {
        let ((r0, p0), (r1, p1)) = (w[0], w[1]);
        if rate >= r0 && rate <= r1 {
            if r1 == r0 {
                return Some(p0.max(p1));
            }
            return Some(p0 + (p1 - p0) * (rate - r0) / (r1 - r0));
        }
    }
    Some(first.1)
}

pub fn write_sweep_csv(points: &[SweepPoint], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["q1", "q2", "t", "rate_bits_per_frame", "psnr_db", "pareto"])
        .map_err(csv_err)?;
    for p in points {
        w.write_record([
            p.q1.to_string(),
            p.q2.to_string(),
            p.t.to_string(),
            format!("{:.1}", p.rate),
            format!("{:.4}", p.psnr),
            (p.pareto as u8).to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> crate::Error {
    crate::Error::Io(std::io::Error::other(e))
}
