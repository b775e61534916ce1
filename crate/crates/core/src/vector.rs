//! Small dense-vector kernels.
//!
//! Every reduction here runs sequentially in index order. Encoder and decoder
//! call the same kernels on the same inputs, which is what makes their
//! floating-point results bit-identical.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for i in 0..a.len() {
        acc += a[i] * b[i];
    }
    acc
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// `y -= alpha * x`
#[inline]
pub fn sub_scaled(y: &mut [f64], alpha: f64, x: &[f64]) {
    debug_assert_eq!(x.len(), y.len());
    for i in 0..y.len() {
        y[i] -= alpha * x[i];
    }
}

#[inline]
pub fn scale(y: &mut [f64], alpha: f64) {
    for v in y.iter_mut() {
        *v *= alpha;
    }
}

pub fn mean(a: &[f64]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let mut acc = 0.0;
    for &v in a {
        acc += v;
    }
    acc / a.len() as f64
}

/// One step of the recursive orthonormalization: remove the component of
/// `a` along the unit vector `b`, then renormalize.
///
/// Returns `false` (leaving `a` unnormalized) when the remaining norm falls
/// below `drop_tol`; the caller must discard such a vector.
#[inline]
pub fn orthonormalize_step(a: &mut [f64], b: &[f64], drop_tol: f64) -> bool {
    let proj = dot(b, a);
    sub_scaled(a, proj, b);
    let n = norm(a);
    if n < drop_tol {
        return false;
    }
    scale(a, 1.0 / n);
    true
}
