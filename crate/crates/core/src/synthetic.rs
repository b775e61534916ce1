//! Deterministic synthetic test clips.
//!
//! A textured background (multi-octave value noise plus hard-edged shapes)
//! pans with sub-pixel motion while a separate textured object moves across
//! it, and each frame receives mild sensor noise. Sub-pixel motion matters:
//! no single integer-displacement candidate matches a block exactly, which
//! is the situation the first stage is built for.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::frame::Frame;

#[derive(Clone, Debug, PartialEq)]
pub struct ClipSpec {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub seed: u64,
    /// Background motion in pixels per frame.
    pub pan: (f64, f64),
    /// Foreground object motion in pixels per frame.
    pub object_motion: (f64, f64),
    /// Standard deviation of additive noise, in luma levels.
    pub noise: f64,
    pub block_size: usize,
}

impl Default for ClipSpec {
    fn default() -> Self {
        ClipSpec {
            width: 176,
            height: 144,
            frames: 3,
            seed: 1,
            pan: (1.35, -0.6),
            object_motion: (-2.3, 1.7),
            noise: 1.5,
            block_size: 16,
        }
    }
}

/// Smooth random field sampled on a lattice and interpolated.
struct ValueNoise {
    cell: f64,
    cols: usize,
    values: Vec<f64>,
}

impl ValueNoise {
    fn new(rng: &mut ChaCha8Rng, cell: f64, w: usize, h: usize) -> ValueNoise {
        let cols = (w as f64 / cell) as usize + 3;
        let rows = (h as f64 / cell) as usize + 3;
        let values = (0..cols * rows).map(|_| rng.gen_range(-1.0..1.0)).collect();
        ValueNoise { cell, cols, values }
    }

    fn at(&self, x: f64, y: f64) -> f64 {
        let fx = x / self.cell;
        let fy = y / self.cell;
        let (ix, iy) = (fx.floor() as usize, fy.floor() as usize);
        let smooth = |t: f64| t * t * (3.0 - 2.0 * t);
        let (tx, ty) = (smooth(fx - ix as f64), smooth(fy - iy as f64));
        let v = |cx: usize, cy: usize| self.values[cy * self.cols + cx];
        let top = v(ix, iy) * (1.0 - tx) + v(ix + 1, iy) * tx;
        let bottom = v(ix, iy + 1) * (1.0 - tx) + v(ix + 1, iy + 1) * tx;
        top * (1.0 - ty) + bottom * ty
    }
}

/// A large still image used as the scene.
struct Canvas {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Canvas {
    fn textured(rng: &mut ChaCha8Rng, width: usize, height: usize, shapes: usize) -> Canvas {
        let octaves: Vec<(ValueNoise, f64)> = [(40.0, 1.0), (17.0, 0.6), (7.0, 0.35), (3.0, 0.2)]
            .iter()
            .map(|&(cell, amp)| (ValueNoise::new(rng, cell, width, height), amp))
            .collect();
        let mut data = vec![0.0; width * height];
        for y in 0..height {
            for x in 0..width {
                let (xf, yf) = (x as f64, y as f64);
                let v: f64 = octaves.iter().map(|(n, a)| a * n.at(xf, yf)).sum();
                data[y * width + x] = 128.0 + 45.0 * v;
            }
        }
        for _ in 0..shapes {
            let cx = rng.gen_range(0.0..width as f64);
            let cy = rng.gen_range(0.0..height as f64);
            let r = rng.gen_range(4.0..22.0);
            let level = rng.gen_range(30.0..225.0);
            let round = rng.gen_bool(0.5);
            for y in 0..height {
                for x in 0..width {
                    let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                    let inside = if round {
                        dx * dx + dy * dy <= r * r
                    } else {
                        dx.abs() <= r && dy.abs() <= 0.6 * r
                    };
                    if inside {
                        let p = &mut data[y * width + x];
                        *p = 0.35 * *p + 0.65 * level;
                    }
                }
            }
        }
        Canvas {
            width,
            height,
            data,
        }
    }

    /// Bilinear sample, clamped at the border.
    fn sample(&self, x: f64, y: f64) -> f64 {
        let x = x.clamp(0.0, (self.width - 1) as f64);
        let y = y.clamp(0.0, (self.height - 1) as f64);
        let (ix, iy) = (x.floor() as usize, y.floor() as usize);
        let (jx, jy) = ((ix + 1).min(self.width - 1), (iy + 1).min(self.height - 1));
        let (tx, ty) = (x - ix as f64, y - iy as f64);
        let v = |cx: usize, cy: usize| self.data[cy * self.width + cx];
        let top = v(ix, iy) * (1.0 - tx) + v(jx, iy) * tx;
        let bottom = v(ix, jy) * (1.0 - tx) + v(jx, jy) * tx;
        top * (1.0 - ty) + bottom * ty
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Generates a clip; identical specs give identical frames.
pub fn generate_clip(spec: &ClipSpec) -> Vec<Frame> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let margin = 8.0
        + spec.frames as f64 * spec.pan.0.abs().max(spec.pan.1.abs())
        + 2.0;
    let cw = spec.width + 2 * margin.ceil() as usize;
    let ch = spec.height + 2 * margin.ceil() as usize;
    let background = Canvas::textured(&mut rng, cw, ch, (cw * ch) / 2500 + 4);
    let object = Canvas::textured(&mut rng, 64, 64, 3);
    let obj_w = (spec.width / 4).clamp(8, 60) as f64;
    let obj_h = (spec.height / 4).clamp(8, 60) as f64;
    let obj_start = (spec.width as f64 * 0.45, spec.height as f64 * 0.35);

    (0..spec.frames)
        .map(|t| {
            let tf = t as f64;
            let (ox, oy) = (margin + spec.pan.0 * tf, margin + spec.pan.1 * tf);
            let (px, py) = (
                obj_start.0 + spec.object_motion.0 * tf,
                obj_start.1 + spec.object_motion.1 * tf,
            );
            let plane = (0..spec.width * spec.height)
                .map(|i| {
                    let (x, y) = ((i % spec.width) as f64, (i / spec.width) as f64);
                    let (lx, ly) = (x - px, y - py);
                    let mut v = if lx >= 0.0 && ly >= 0.0 && lx < obj_w && ly < obj_h {
                        object.sample(lx + 2.0, ly + 2.0)
                    } else {
                        background.sample(x + ox, y + oy)
                    };
                    v += spec.noise * gaussian(&mut rng);
                    v.round().clamp(0.0, 255.0) as u8
                })
                .collect();
            Frame::from_plane(spec.width, spec.height, plane, spec.block_size)
                .expect("clip dimensions are non-zero")
        })
        .collect()
}
