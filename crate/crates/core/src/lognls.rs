//! Radial logarithmic Schrödinger equation with a Coulomb potential,
//!
//! `(-D²/2 - D/r - 1/r - s ln|ψ|) ψ = E ψ`,
//!
//! solved in the scaled variable `x = √s r` by a damped fixed-point iteration
//! in orthonormal Laguerre functions of `c x²`.

use crate::basis::{BasisError, LaguerreBasisSpec, LaguerreEvaluator};
use crate::quadrature::{CompositeRule, QuadError, QuadratureRule, WeightSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LogNlsError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("target coefficient a_{state} collapsed to {value:e} at iteration {iter}")]
    LostTarget { state: usize, value: f64, iter: usize },
    #[error("no convergence after {iterations} iterations (last change {last_change:e})")]
    NotConverged { iterations: usize, last_change: f64, history: Vec<HistoryEntry> },
    #[error("converged to a state with {found} nodes, expected {expected}")]
    WrongNodeCount { found: usize, expected: usize, solution: Box<LogNlsSolution> },
}

pub type Result<T> = std::result::Result<T, LogNlsError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNlsConfig {
    pub s: f64,
    /// 1 = ground state; state `n` has `n - 1` nodes.
    pub state: usize,
    pub basis_size: usize,
    pub c: f64,
    pub nu: f64,
    pub tol_coeff: f64,
    pub max_iter: usize,
    pub quad_order: usize,
}

impl LogNlsConfig {
    pub fn new(s: f64, state: usize, basis_size: usize, c: f64) -> Self {
        LogNlsConfig { s, state, basis_size, c, nu: 0.8, tol_coeff: 1e-9, max_iter: 2000, quad_order: 40 }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LogNlsError::InvalidConfig(m));
        if !(self.s.is_finite() && self.s > 0.0) {
            return bad(format!("s must be positive, got {}", self.s));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return bad(format!("c must be positive, got {}", self.c));
        }
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return bad(format!("damping must lie in (0, 1], got {}", self.nu));
        }
        if self.state == 0 || self.state > self.basis_size {
            return bad(format!("state {} outside 1..={}", self.state, self.basis_size));
        }
        if self.quad_order == 0 {
            return bad("quadrature order must be positive".into());
        }
        if !(self.tol_coeff > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tol_coeff));
        }
        Ok(())
    }

    pub fn mu(&self) -> f64 {
        self.s.sqrt()
    }

    /// Coulomb strength in scaled units, `1/μ`.
    pub fn kappa(&self) -> f64 {
        1.0 / self.mu()
    }

    pub fn basis(&self) -> LaguerreBasisSpec {
        LaguerreBasisSpec { c: self.c, size: self.basis_size }
    }

    /// Upper end of the region searched for zeros, in `x`.
    fn search_end(&self) -> f64 {
        12.0 / self.c.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationState {
    /// Unit Euclidean norm, `a[state-1] > 0`.
    pub a: Vec<f64>,
    pub e1: f64,
    pub iter: usize,
}

impl IterationState {
    pub fn initial(cfg: &LogNlsConfig) -> Self {
        let mut a = vec![0.0; cfg.basis_size];
        a[cfg.state - 1] = 1.0;
        IterationState { a, e1: 0.0, iter: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub e1: f64,
    pub max_change: f64,
}

/// Scaled eigenfunction pieces `φ`, with `ψ = φ e^{-cx²/2}`.
fn phi_and_derivatives(basis: &LaguerreBasisSpec, a: &[f64], x: f64) -> (f64, f64, f64) {
    let v = basis.orthonormal_with_derivatives(x);
    let dot = |w: &[f64]| w.iter().zip(a).map(|(p, q)| p * q).sum::<f64>();
    (dot(&v.value), dot(&v.d1), dot(&v.d2))
}

fn phi(basis: &LaguerreBasisSpec, a: &[f64], x: f64) -> f64 {
    LaguerreEvaluator::new(*basis).combine(a, x)
}

/// Sign changes of `φ` on `(0, end]` at step `h`, refined by bisection to
/// 1e-10 in `x`, together with the largest `|x ψ|` on each lobe.
fn raw_zeros(basis: &LaguerreBasisSpec, a: &[f64], end: f64, h: f64) -> (Vec<f64>, Vec<f64>) {
    let c = basis.c;
    let ev = LaguerreEvaluator::new(*basis);
    let phi = |_: &LaguerreBasisSpec, a: &[f64], x: f64| ev.combine(a, x);
    let steps = (end / h).ceil() as usize;
    let mut zeros = Vec::new();
    let mut lobes = vec![0.0f64];
    let mut prev_x = 0.0;
    let mut prev = phi(basis, a, 0.0);
    for k in 1..=steps {
        let x = k as f64 * h;
        let cur = phi(basis, a, x);
        let mag = (x * cur * (-0.5 * c * x * x).exp()).abs();
        if prev != 0.0 && cur != 0.0 && (prev < 0.0) != (cur < 0.0) {
            let (mut lo, mut hi) = (prev_x, x);
            let lo_sign = prev < 0.0;
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                let v = phi(basis, a, mid);
                if v == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (v < 0.0) == lo_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
            lobes.push(0.0);
        }
        let last = lobes.len() - 1;
        lobes[last] = lobes[last].max(mag);
        prev_x = x;
        if cur != 0.0 {
            prev = cur;
        }
    }
    (zeros, lobes)
}

/// Relative lobe height below which a sign change is treated as a
/// truncation artefact of the expansion's far tail.
const LOBE_THRESHOLD: f64 = 1e-2;

/// Zeros of `φ` that separate two lobes of `|x ψ|` each at least
/// [`LOBE_THRESHOLD`] of the global peak.
fn significant_zeros(basis: &LaguerreBasisSpec, a: &[f64], end: f64, h: f64) -> Vec<f64> {
    let (zeros, lobes) = raw_zeros(basis, a, end, h);
    let peak = lobes.iter().cloned().fold(0.0, f64::max);
    zeros
        .iter()
        .enumerate()
        .filter(|(i, _)| lobes[*i] >= LOBE_THRESHOLD * peak && lobes[i + 1] >= LOBE_THRESHOLD * peak)
        .map(|(_, &z)| z)
        .collect()
}

/// Node positions in `r` of the expansion `a` (ascending).
pub fn find_nodes(cfg: &LogNlsConfig, a: &[f64]) -> Vec<f64> {
    let mu = cfg.mu();
    significant_zeros(&cfg.basis(), a, cfg.search_end(), 1e-3)
        .into_iter()
        .map(|x| x / mu)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VhatProjection {
    /// `<f_m | V̂ φ>` for every basis member.
    pub proj: Vec<f64>,
    /// Panel breakpoints used (zeros of `φ`, in `x`).
    pub breakpoints: Vec<f64>,
}

/// Project `V̂φ = (-c(c-1)x²/2 - κ/x - ln|φ|) φ` onto the orthonormal basis
/// with a composite rule split at the zeros of `φ`. `φ ln|φ|` is taken as
/// zero where `φ` vanishes.
pub fn apply_vhat(cfg: &LogNlsConfig, a: &[f64]) -> Result<VhatProjection> {
    let basis = cfg.basis();
    let bps = significant_zeros(&basis, a, cfg.search_end(), 1e-3);
    match project(cfg, &basis, a, &bps) {
        Ok(p) => Ok(p),
        Err(LogNlsError::Quadrature(QuadError::NonFiniteIntegrand { .. })) => {
            // a node landed on a zero; nudge the panel edges once
            let shifted: Vec<f64> = bps.iter().map(|z| z + 1e-9).collect();
            project(cfg, &basis, a, &shifted)
        }
        Err(e) => Err(e),
    }
}

fn project(cfg: &LogNlsConfig, basis: &LaguerreBasisSpec, a: &[f64], bps: &[f64]) -> Result<VhatProjection> {
    let c = cfg.c;
    let kappa = cfg.kappa();
    let rule = CompositeRule::new(WeightSpec::half_line(c)?, bps, cfg.quad_order)?;
    let (nodes, weights) = rule.flatten();
    let ev = LaguerreEvaluator::new(*basis);
    let mut proj = vec![0.0; basis.size];
    let mut f = vec![0.0; basis.size];
    for (&x, &w) in nodes.iter().zip(&weights) {
        ev.values_into(x, &mut f);
        let p: f64 = f.iter().zip(a).map(|(u, v)| u * v).sum();
        let plogp = if p == 0.0 { 0.0 } else { p * p.abs().ln() };
        // x² V̂φ, the x² from the radial measure
        let g = -0.5 * c * (c - 1.0) * x.powi(4) * p - kappa * x * p - x * x * plogp;
        if !g.is_finite() {
            return Err(QuadError::NonFiniteIntegrand { node: x, value: g }.into());
        }
        for (acc, fm) in proj.iter_mut().zip(&f) {
            *acc += w * fm * g;
        }
    }
    Ok(VhatProjection { proj, breakpoints: bps.to_vec() })
}

/// One damped update; returns the new state and the largest coefficient change.
pub fn iterate_once(cfg: &LogNlsConfig, state: &IterationState) -> Result<(IterationState, f64)> {
    let n = cfg.state - 1;
    let an = state.a[n];
    if an.abs() < 1e-8 {
        return Err(LogNlsError::LostTarget { state: cfg.state, value: an, iter: state.iter });
    }
    let vp = apply_vhat(cfg, &state.a)?;
    let e1 = vp.proj[n] / an;
    let two_c = 2.0 * cfg.c;
    let mut next: Vec<f64> = (0..cfg.basis_size)
        .map(|m| {
            let plain = if m == n {
                an
            } else {
                (e1 * state.a[m] - vp.proj[m]) / (two_c * (m as f64 - n as f64))
            };
            plain + (1.0 - cfg.nu) * state.a[m]
        })
        .collect();
    let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
    let sign = if next[n] < 0.0 { -1.0 } else { 1.0 };
    for v in next.iter_mut() {
        *v *= sign / norm;
    }
    let change = next.iter().zip(&state.a).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    Ok((IterationState { a: next, e1, iter: state.iter + 1 }, change))
}

/// Eigenvalue conventions differ only by the overall scale of `ψ`:
/// rescaling `ψ → λψ` shifts `E → E − s ln λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// Coefficients with `Σ a² = 1`, i.e. `∫ x² ψ² dx = 1` in scaled units.
    Unit,
    /// `∫ r² ψ² dr = 1`.
    Physical,
    /// `ψ(0) = 1`.
    Origin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogNlsSolution {
    pub config: LogNlsConfig,
    /// Scaled eigenvalue for the unit-norm iterate.
    pub e_hat: f64,
    /// Eigenvalue for `∫ r² ψ² dr = 1`.
    pub e: f64,
    /// `s · e_hat`, the eigenvalue for the unit-norm iterate in `r` units.
    pub e_unit: f64,
    /// Eigenvalue for `ψ(0) = 1`.
    pub e_origin: f64,
    /// Factor taking the unit-norm iterate to `∫ r² ψ² dr = 1`.
    pub n0: f64,
    pub a: Vec<f64>,
    pub nodes_r: Vec<f64>,
    pub iterations: usize,
    pub history: Vec<HistoryEntry>,
}

impl LogNlsSolution {
    fn from_iterate(cfg: &LogNlsConfig, a: Vec<f64>, e1: f64, iterations: usize, history: Vec<HistoryEntry>) -> Self {
        let s = cfg.s;
        let e_hat = e1 + 2.0 * cfg.c * (cfg.state as f64 - 1.0) + 1.5 * cfg.c;
        let e_unit = s * e_hat;
        let n0 = s.powf(0.75);
        let e = e_unit - s * n0.ln();
        let psi0 = phi(&cfg.basis(), &a, 0.0) * n0;
        let e_origin = e + s * psi0.abs().ln();
        let nodes_r = find_nodes(cfg, &a);
        LogNlsSolution { config: *cfg, e_hat, e, e_unit, e_origin, n0, a, nodes_r, iterations, history }
    }

    /// Factor multiplying the unit-norm iterate for the given convention.
    pub fn scale(&self, norm: Normalization) -> f64 {
        match norm {
            Normalization::Unit => 1.0,
            Normalization::Physical => self.n0,
            Normalization::Origin => 1.0 / phi(&self.config.basis(), &self.a, 0.0).abs(),
        }
    }

    pub fn energy(&self, norm: Normalization) -> f64 {
        match norm {
            Normalization::Unit => self.e_unit,
            Normalization::Physical => self.e,
            Normalization::Origin => self.e_origin,
        }
    }

    /// Unit-norm `ψ(r)` and its first two `r`-derivatives.
    pub fn psi_unit(&self, r: f64) -> (f64, f64, f64) {
        let cfg = &self.config;
        let mu = cfg.mu();
        let x = mu * r;
        let c = cfg.c;
        let (p, p1, p2) = phi_and_derivatives(&cfg.basis(), &self.a, x);
        let g = (-0.5 * c * x * x).exp();
        let px = g * p;
        let dx = g * (p1 - c * x * p);
        let dxx = g * (p2 - 2.0 * c * x * p1 - c * p + c * c * x * x * p);
        (px, mu * dx, mu * mu * dxx)
    }

    pub fn psi(&self, norm: Normalization, r: f64) -> f64 {
        self.scale(norm) * self.psi_unit(r).0
    }

    /// Residual of the radial equation at `r` for `λψ` with eigenvalue `energy`,
    /// divided by `λ` times the peak of `|ψ|`.
    pub fn residual_with(&self, lambda: f64, energy: f64, r: f64) -> f64 {
        let (p, d1, d2) = self.psi_unit(r);
        let u = lambda * p;
        let log = if u == 0.0 { 0.0 } else { u * u.abs().ln() };
        let res = -0.5 * lambda * d2 - lambda * d1 / r - u / r - self.config.s * log - energy * u;
        res / (lambda * self.peak_unit())
    }

    pub fn residual(&self, norm: Normalization, r: f64) -> f64 {
        self.residual_with(self.scale(norm), self.energy(norm), r)
    }

    fn peak_unit(&self) -> f64 {
        let end = self.config.search_end() / self.config.mu();
        (0..=2000)
            .map(|k| self.psi_unit(end * k as f64 / 2000.0).0.abs())
            .fold(0.0, f64::max)
    }
}

/// Iterate from `a = e_n` until the largest coefficient change drops below
/// `tol_coeff`.
pub fn solve_state(cfg: &LogNlsConfig) -> Result<LogNlsSolution> {
    cfg.validate()?;
    solve_from(cfg, IterationState::initial(cfg))
}

pub fn solve_from(cfg: &LogNlsConfig, start: IterationState) -> Result<LogNlsSolution> {
    cfg.validate()?;
    let mut state = start;
    let mut history = Vec::new();
    let mut last_change = f64::INFINITY;
    for _ in 0..cfg.max_iter {
        let (next, change) = iterate_once(cfg, &state)?;
        history.push(HistoryEntry { e1: next.e1, max_change: change });
        state = next;
        last_change = change;
        if change < cfg.tol_coeff {
            break;
        }
    }
    if !(last_change < cfg.tol_coeff) {
        return Err(LogNlsError::NotConverged { iterations: state.iter, last_change, history });
    }
    // E¹ consistent with the final coefficients
    let vp = apply_vhat(cfg, &state.a)?;
    let e1 = vp.proj[cfg.state - 1] / state.a[cfg.state - 1];
    let sol = LogNlsSolution::from_iterate(cfg, state.a, e1, state.iter, history);
    if sol.nodes_r.len() != cfg.state - 1 {
        return Err(LogNlsError::WrongNodeCount {
            found: sol.nodes_r.len(),
            expected: cfg.state - 1,
            solution: Box::new(sol),
        });
    }
    Ok(sol)
}

/// Independent solves, fanned out; results keep the input order.
pub fn solve_many(cfgs: &[LogNlsConfig]) -> Vec<Result<LogNlsSolution>> {
    cfgs.par_iter().map(solve_state).collect()
}

/// Orthonormal-basis coefficients of `f(x)` (scaled `x`, without the
/// `e^{-cx²/2}` factor), by a Gauss rule of the given order.
pub fn expand(cfg: &LogNlsConfig, order: usize, f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    let basis = cfg.basis();
    let rule = QuadratureRule::from_spec(WeightSpec::half_line(cfg.c)?, order)?;
    let mut out = vec![0.0; basis.size];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let fx = f(x);
        for (acc, fm) in out.iter_mut().zip(basis.orthonormal_values(x)) {
            *acc += w * x * x * fm * fx;
        }
    }
    Ok(out)
}

/// Closed-form nodeless solution `ψ = exp(-s r²/2 - r)` with `ψ(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactGroundState {
    pub s: f64,
    pub energy: f64,
}

impl ExactGroundState {
    pub fn psi(&self, r: f64) -> f64 {
        (-0.5 * self.s * r * r - r).exp()
    }

    /// `(ψ, ψ', ψ'')` in `r`.
    pub fn psi_derivatives(&self, r: f64) -> (f64, f64, f64) {
        let p = self.psi(r);
        let g = -self.s * r - 1.0;
        (p, g * p, (g * g - self.s) * p)
    }

    /// Residual of the radial equation at `r`, relative to `ψ(0) = 1`.
    pub fn residual(&self, r: f64) -> f64 {
        let (p, d1, d2) = self.psi_derivatives(r);
        -0.5 * d2 - d1 / r - p / r - self.s * p * p.ln() - self.energy * p
    }

    /// `φ(x) = ψ e^{cx²/2}` in scaled `x`, for expansion in the basis.
    pub fn scaled_phi(&self, c: f64) -> impl Fn(f64) -> f64 {
        let kappa = 1.0 / self.s.sqrt();
        move |x: f64| (0.5 * (c - 1.0) * x * x - kappa * x).exp()
    }
}

/// `E = -1/2 + 3s/2` for `ψ(0) = 1`.
pub fn exact_ground_state(s: f64) -> ExactGroundState {
    ExactGroundState { s, energy: -0.5 + 1.5 * s }
}

/// One row of a reproduction table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TablePreset {
    pub s: f64,
    pub state: usize,
    pub basis_size: usize,
    pub c: f64,
}

impl TablePreset {
    pub fn config(&self) -> LogNlsConfig {
        LogNlsConfig::new(self.s, self.state, self.basis_size, self.c)
    }
}

pub const TABLE_S: [f64; 11] = [0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];

/// First excited state: 20 functions, `c = 1` except `c = 0.5` for `s ∈ {9, 10}`
/// and `c = 1.5` for `s = 0.05`.
pub fn first_excited_presets() -> Vec<TablePreset> {
    TABLE_S
        .iter()
        .map(|&s| {
            let c = if s == 9.0 || s == 10.0 {
                0.5
            } else if s == 0.05 {
                1.5
            } else {
                1.0
            };
            TablePreset { s, state: 2, basis_size: 20, c }
        })
        .collect()
}

/// Second excited state: 25 functions, `c = 0.5` except `c = 0.59` for `s ∈ {0.5, 1}`.
pub fn second_excited_presets() -> Vec<TablePreset> {
    TABLE_S
        .iter()
        .map(|&s| {
            let c = if s == 0.5 || s == 1.0 { 0.59 } else { 0.5 };
            TablePreset { s, state: 3, basis_size: 25, c }
        })
        .collect()
}
