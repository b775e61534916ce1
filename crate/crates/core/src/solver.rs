//! Greedy sparse approximation over the self-adaptive dictionary.
//!
//! [`eomp`] keeps every remaining atom orthonormal to the atoms already
//! chosen: after each selection, each remaining atom `a` is updated by one
//! Gram-Schmidt step against the newly chosen unit vector `b`,
//!
//! ```text
//! a <- a - <b, a> b
//! a <- a / ||a||
//! ```
//!
//! so the next selection compares correlations against the part of each atom
//! that is new, and the coefficient of the chosen atom is a single inner
//! product with the residual.
//!
//! [`omp_baseline`] is the classic algorithm (correlate with the original
//! atoms, least-squares refit). It exists as a reference for tests and
//! comparisons.

use crate::dictionary::Dictionary;
use crate::error::{arg_err, Result};
use crate::vector::{self, orthonormalize_step};

/// Atoms whose norm drops below this during orthonormalization are
/// discarded rather than renormalized.
pub const ATOM_DROP_TOL: f64 = 1e-6;

/// Default ratio between the fidelity target and the uniform quantizer's
/// expected distortion `q²/12`.
pub const DEFAULT_EPSILON_FACTOR: f64 = 1.2;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Per-sample squared error target; iteration stops once
    /// `||r||² <= N * epsilon_sq`.
    pub epsilon_sq: f64,
    /// Early-termination threshold on the relative residual norm reduction
    /// of one iteration. Zero disables early termination.
    pub termination_ratio: f64,
    /// Hard cap on the number of atoms; `None` means `N`.
    pub max_atoms: Option<usize>,
    /// Whether the atom whose reduction fell below `termination_ratio` stays
    /// in the solution.
    pub keep_terminating_atom: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon_sq: 0.0,
            termination_ratio: 0.0,
            max_atoms: None,
            keep_terminating_atom: true,
        }
    }
}

impl SolverConfig {
    /// Fidelity target derived from the first-stage stepsize:
    /// `epsilon_sq = factor * q1² / 12`, with `factor > 1`.
    pub fn from_quantizer(q1: f64, epsilon_factor: f64, termination_ratio: f64) -> Result<Self> {
        if !(q1 > 0.0 && q1.is_finite()) {
            return arg_err(format!("stepsize {q1} must be positive"));
        }
        if !(epsilon_factor > 1.0 && epsilon_factor.is_finite()) {
            return arg_err(format!(
                "epsilon factor {epsilon_factor} must exceed 1 (target above q^2/12)"
            ));
        }
        let cfg = SolverConfig {
            epsilon_sq: epsilon_factor * q1 * q1 / 12.0,
            termination_ratio,
            ..SolverConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_sq >= 0.0 && self.epsilon_sq.is_finite()) {
            return arg_err("epsilon_sq must be finite and non-negative");
        }
        if !(0.0..1.0).contains(&self.termination_ratio) {
            return arg_err(format!(
                "termination ratio {} outside [0, 1)",
                self.termination_ratio
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// The fidelity target was met.
    Fidelity,
    /// The last atom did not reduce the residual norm enough.
    Stalled,
    MaxAtoms,
    /// No valid atoms remain.
    Exhausted,
}

#[derive(Clone, Debug)]
pub struct SparseSolution {
    /// Dictionary indices in selection order.
    pub chosen: Vec<usize>,
    /// Orthonormalized chosen atoms, one per entry of `chosen`.
    pub basis: Vec<Vec<f64>>,
    /// Unquantized coefficient of each basis vector.
    pub coeffs: Vec<f64>,
    pub residual: Vec<f64>,
    /// `residual_norms[k]` is `||r||` after `k` atoms.
    pub residual_norms: Vec<f64>,
    pub stop: StopReason,
}

impl SparseSolution {
    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }

    pub fn terminated_early(&self) -> bool {
        self.stop == StopReason::Stalled
    }
}

fn check_input(x: &[f64], dict: &Dictionary) -> Result<()> {
    if x.len() != dict.dim() && !dict.is_empty() {
        return arg_err(format!(
            "block has {} samples, dictionary atoms have {}",
            x.len(),
            dict.dim()
        ));
    }
    let mu = vector::mean(x);
    if mu.abs() > 1e-9 * vector::norm(x).max(1.0) {
        return arg_err(format!("input mean {mu} is not zero"));
    }
    Ok(())
}

/// Incremental eOMP state. Each [`EompSolver::step`] selects one atom.
pub struct EompSolver {
    dim: usize,
    /// Remaining atoms, row-major, kept orthonormal to the chosen basis.
    work: Vec<f64>,
    /// Dictionary index of each row of `work`, ascending.
    ids: Vec<usize>,
    residual: Vec<f64>,
    chosen: Vec<usize>,
    basis: Vec<Vec<f64>>,
    coeffs: Vec<f64>,
}

impl EompSolver {
    pub fn new(x: &[f64], dict: &Dictionary) -> Result<EompSolver> {
        check_input(x, dict)?;
        let dim = x.len();
        let mut work = Vec::with_capacity(dict.valid_count() * dim);
        let mut ids = Vec::with_capacity(dict.valid_count());
        for i in 0..dict.len() {
            if dict.is_valid(i) {
                work.extend_from_slice(dict.atom(i));
                ids.push(i);
            }
        }
        Ok(EompSolver {
            dim,
            work,
            ids,
            residual: x.to_vec(),
            chosen: Vec::new(),
            basis: Vec::new(),
            coeffs: Vec::new(),
        })
    }

    pub fn residual(&self) -> &[f64] {
        &self.residual
    }

    pub fn chosen(&self) -> &[usize] {
        &self.chosen
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Remaining candidate atoms as `(dictionary index, current vector)`,
    /// each orthonormal to every chosen basis vector.
    pub fn remaining(&self) -> impl Iterator<Item = (usize, &[f64])> {
        self.ids
            .iter()
            .copied()
            .zip(self.work.chunks_exact(self.dim.max(1)))
    }

    /// Projects the last chosen atom out of every remaining atom, dropping
    /// those that collapse.
    fn update_remaining(&mut self) {
        let Some(b) = self.basis.last() else { return };
        let dim = self.dim;
        let mut kept = 0;
        for row in 0..self.ids.len() {
            let (head, tail) = self.work.split_at_mut(row * dim);
            let a = &mut tail[..dim];
            if orthonormalize_step(a, b, ATOM_DROP_TOL) {
                if kept != row {
                    head[kept * dim..(kept + 1) * dim].copy_from_slice(a);
                }
                self.ids[kept] = self.ids[row];
                kept += 1;
            }
        }
        self.ids.truncate(kept);
        self.work.truncate(kept * dim);
    }

    /// Selects and removes the next atom; `None` when no atoms remain.
    pub fn step(&mut self) -> Option<usize> {
        let dim = self.dim;
        let mut best: Option<(usize, f64)> = None;
        for (row, a) in self.work.chunks_exact(dim).enumerate() {
            let corr = vector::dot(&self.residual, a);
            // Rows are in ascending index order, so strict comparison keeps
            // the smallest index on ties.
            if best.is_none_or(|(_, c)| corr.abs() > c.abs()) {
                best = Some((row, corr));
            }
        }
        let (row, coeff) = best?;
        let atom = self.work[row * dim..(row + 1) * dim].to_vec();
        let id = self.ids[row];
        self.work.drain(row * dim..(row + 1) * dim);
        self.ids.remove(row);
        vector::sub_scaled(&mut self.residual, coeff, &atom);
        self.chosen.push(id);
        self.basis.push(atom);
        self.coeffs.push(coeff);
        self.update_remaining();
        Some(id)
    }

    /// Removes the most recent selection, restoring the residual.
    fn undo_last(&mut self) {
        if let (Some(b), Some(c)) = (self.basis.pop(), self.coeffs.pop()) {
            self.chosen.pop();
            vector::sub_scaled(&mut self.residual, -c, &b);
        }
    }

    fn finish(self, residual_norms: Vec<f64>, stop: StopReason) -> SparseSolution {
        SparseSolution {
            chosen: self.chosen,
            basis: self.basis,
            coeffs: self.coeffs,
            residual: self.residual,
            residual_norms,
            stop,
        }
    }
}

/// Outcome of checking the stopping rules after an iteration.
fn check_stop(
    cfg: &SolverConfig,
    dim: usize,
    prev_norm: f64,
    new_norm: f64,
) -> Option<StopReason> {
    if new_norm * new_norm <= dim as f64 * cfg.epsilon_sq {
        return Some(StopReason::Fidelity);
    }
    if cfg.termination_ratio > 0.0 && prev_norm > 0.0 {
        let reduction = (prev_norm - new_norm) / prev_norm;
        if reduction < cfg.termination_ratio {
            return Some(StopReason::Stalled);
        }
    }
    None
}

/// Sparse approximation of the zero-mean block `x` by eOMP.
pub fn eomp(x: &[f64], dict: &Dictionary, cfg: &SolverConfig) -> Result<SparseSolution> {
    cfg.validate()?;
    let mut solver = EompSolver::new(x, dict)?;
    let dim = x.len();
    let max_atoms = cfg.max_atoms.unwrap_or(dim);
    let mut norms = vec![vector::norm(x)];
    if norms[0] * norms[0] <= dim as f64 * cfg.epsilon_sq {
        return Ok(solver.finish(norms, StopReason::Fidelity));
    }
    loop {
        if solver.chosen.len() >= max_atoms {
            return Ok(solver.finish(norms, StopReason::MaxAtoms));
        }
        if solver.step().is_none() {
            return Ok(solver.finish(norms, StopReason::Exhausted));
        }
        let prev = *norms.last().unwrap();
        let now = vector::norm(&solver.residual);
        norms.push(now);
        if let Some(stop) = check_stop(cfg, dim, prev, now) {
            if stop == StopReason::Stalled && !cfg.keep_terminating_atom {
                solver.undo_last();
                norms.pop();
            }
            return Ok(solver.finish(norms, stop));
        }
    }
}

/// Classic OMP: correlate the residual with the original atoms, then refit
/// all chosen atoms by least squares. The fit is expressed through an
/// orthonormal basis of the chosen atoms (Gram-Schmidt in selection order),
/// so the output has the same shape as [`eomp`]'s.
pub fn omp_baseline(x: &[f64], dict: &Dictionary, cfg: &SolverConfig) -> Result<SparseSolution> {
    cfg.validate()?;
    check_input(x, dict)?;
    let dim = x.len();
    let max_atoms = cfg.max_atoms.unwrap_or(dim);
    let mut available: Vec<bool> = (0..dict.len()).map(|i| dict.is_valid(i)).collect();
    let mut chosen = Vec::new();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut residual = x.to_vec();
    let mut norms = vec![vector::norm(x)];

    let finish = |chosen, basis: Vec<Vec<f64>>, residual, norms, stop| {
        let coeffs = basis.iter().map(|q| vector::dot(x, q)).collect();
        SparseSolution {
            chosen,
            basis,
            coeffs,
            residual,
            residual_norms: norms,
            stop,
        }
    };

    if norms[0] * norms[0] <= dim as f64 * cfg.epsilon_sq {
        return Ok(finish(chosen, basis, residual, norms, StopReason::Fidelity));
    }
    loop {
        if chosen.len() >= max_atoms {
            return Ok(finish(chosen, basis, residual, norms, StopReason::MaxAtoms));
        }
        // Pick the best original atom that is not (numerically) inside the
        // current span.
        let q = loop {
            let mut best: Option<(usize, f64)> = None;
            for i in 0..dict.len() {
                if !available[i] {
                    continue;
                }
                let c = vector::dot(&residual, dict.atom(i)).abs();
                if best.is_none_or(|(_, bc)| c > bc) {
                    best = Some((i, c));
                }
            }
            let Some((i, _)) = best else { break None };
            available[i] = false;
            let mut q = dict.atom(i).to_vec();
            if basis.iter().all(|b| orthonormalize_step(&mut q, b, ATOM_DROP_TOL)) {
                break Some((i, q));
            }
        };
        let Some((i, q)) = q else {
            return Ok(finish(chosen, basis, residual, norms, StopReason::Exhausted));
        };
        chosen.push(i);
        basis.push(q);
        // Least-squares refit: residual of x against span of chosen atoms.
        residual = x.to_vec();
        for b in &basis {
            let c = vector::dot(x, b);
            vector::sub_scaled(&mut residual, c, b);
        }
        let prev = *norms.last().unwrap();
        let now = vector::norm(&residual);
        norms.push(now);
        if let Some(stop) = check_stop(cfg, dim, prev, now) {
            if stop == StopReason::Stalled && !cfg.keep_terminating_atom {
                chosen.pop();
                basis.pop();
                norms.pop();
                residual = x.to_vec();
                for b in &basis {
                    let c = vector::dot(x, b);
                    vector::sub_scaled(&mut residual, c, b);
                }
            }
            return Ok(finish(chosen, basis, residual, norms, stop));
        }
    }
}

/// Recomputes the orthonormal basis of `atoms` by applying the one-step
/// update in order, exactly as [`eomp`] does to its remaining atoms.
///
/// Returns `None` if some atom collapses below [`ATOM_DROP_TOL`]. Encoder
/// and decoder both derive the first-stage basis through this function.
pub fn replay_basis<'a>(atoms: impl IntoIterator<Item = &'a [f64]>) -> Option<Vec<Vec<f64>>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for raw in atoms {
        let mut a = raw.to_vec();
        for b in &basis {
            if !orthonormalize_step(&mut a, b, ATOM_DROP_TOL) {
                return None;
            }
        }
        basis.push(a);
    }
    Some(basis)
}
