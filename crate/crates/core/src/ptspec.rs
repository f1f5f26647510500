//! PT-symmetric Hamiltonians `H = -D^2 + i x^m`: confined on `[-T, T]` in the
//! box basis, and on the whole line in a scaled Hermite basis.

use crate::basis::{
    box_matrix_element, hermite_kinetic, hermite_power_couplings, BasisError, BoxBasisSpec,
    Coupling, HermiteBasisSpec,
};
use crate::eigensolver::{eig_classified, Complex, ComplexMatrix, EigenClass, EigenError, SpectrumReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PtError {
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("potential exponent must be odd and positive, got {0}")]
    BadExponent(u32),
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("coefficient vector has squared norm {0}, expected 1")]
    NotNormalized(f64),
}

pub type Result<T> = std::result::Result<T, PtError>;

fn check_power(m: u32) -> Result<()> {
    if m % 2 == 1 {
        Ok(())
    } else {
        Err(PtError::BadExponent(m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfinedProblem {
    pub t: f64,
    pub size: usize,
    pub m_pow: u32,
}

impl ConfinedProblem {
    pub fn new(t: f64, size: usize, m_pow: u32) -> Result<Self> {
        check_power(m_pow)?;
        if size < 2 {
            return Err(PtError::Invalid(format!("basis size {size} < 2")));
        }
        BoxBasisSpec::new(t, size)?;
        Ok(ConfinedProblem { t, size, m_pow })
    }

    pub fn basis(&self) -> BoxBasisSpec {
        BoxBasisSpec { t: self.t, size: self.size }
    }
}

/// Confined matrix with the potential multiplied by `strength`.
pub fn build_confined_scaled(p: &ConfinedProblem, strength: f64) -> Result<ComplexMatrix> {
    let basis = p.basis();
    let n = p.size;
    let mut h = ComplexMatrix::zeros(n);
    for i in 1..=n {
        h[(i - 1, i - 1)] = Complex::new(basis.diagonal(i), 0.0);
        for j in i + 1..=n {
            let v = strength * box_matrix_element(&basis, p.m_pow, i, j)?;
            if v != 0.0 {
                h[(i - 1, j - 1)] = Complex::new(0.0, v);
                h[(j - 1, i - 1)] = Complex::new(0.0, v);
            }
        }
    }
    Ok(h)
}

/// Full opposite-parity coupling; complex-symmetric.
pub fn build_confined(p: &ConfinedProblem) -> Result<ComplexMatrix> {
    build_confined_scaled(p, 1.0)
}

pub fn solve_confined(p: &ConfinedProblem) -> Result<SpectrumReport> {
    Ok(eig_classified(&build_confined(p)?)?)
}

/// Largest deviation from "cosine coefficients real, sine coefficients
/// imaginary" after the best global phase, relative to the vector norm.
pub fn parity_defect(v: &[Complex]) -> f64 {
    // Flip the sine block by -i; the target is then a real vector, and the
    // optimal phase aligns the vector's "square" sum with the real axis.
    let w: Vec<Complex> = v
        .iter()
        .enumerate()
        .map(|(k, z)| if k % 2 == 0 { *z } else { z * Complex::new(0.0, -1.0) })
        .collect();
    let s: Complex = w.iter().map(|z| z * z).sum();
    let phase = if s.norm() > 0.0 { (s.conj() / s.norm()).sqrt() } else { Complex::new(1.0, 0.0) };
    let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    w.iter().map(|z| (z * phase).im.abs()).fold(0.0, f64::max) / norm
}

/// `ψ(x) = Σ a_k ω_k(x)` in the normalized box basis.
pub fn confined_wavefunction(p: &ConfinedProblem, a: &[Complex], x: f64) -> Result<Complex> {
    let basis = p.basis();
    let mut s = Complex::new(0.0, 0.0);
    for (k, ak) in a.iter().enumerate() {
        s += ak * basis.eval(k + 1, x)?;
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanAxis {
    T,
    N,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub t: f64,
    pub size: usize,
    pub eigenvalues: Vec<Complex>,
    pub classes: Vec<EigenClass>,
    pub pair_count: usize,
}

/// A tracked state that changes between REAL and PAIR from one cell to the next.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flip {
    pub axis: ScanAxis,
    pub from: (f64, usize),
    pub to: (f64, usize),
    pub from_index: usize,
    pub to_index: usize,
    pub became_pair: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub m_pow: u32,
    /// Row-major over `t_list` x `n_list`.
    pub cells: Vec<ScanCell>,
    pub flips: Vec<Flip>,
}

impl ScanResult {
    pub fn cell(&self, t: f64, size: usize) -> Option<&ScanCell> {
        self.cells.iter().find(|c| c.t == t && c.size == size)
    }
}

/// Spectrum classification over a `(T, N)` grid, plus REAL<->PAIR flips of
/// states tracked by nearest real part along each axis.
pub fn scan_confined(m_pow: u32, t_list: &[f64], n_list: &[usize]) -> Result<ScanResult> {
    if t_list.is_empty() || n_list.is_empty() {
        return Err(PtError::Invalid("empty scan grid".into()));
    }
    let grid: Vec<(f64, usize)> = t_list
        .iter()
        .flat_map(|&t| n_list.iter().map(move |&n| (t, n)))
        .collect();
    let cells: Vec<ScanCell> = grid
        .par_iter()
        .map(|&(t, n)| -> Result<ScanCell> {
            let r = solve_confined(&ConfinedProblem::new(t, n, m_pow)?)?;
            let pair_count = r.pair_count();
            Ok(ScanCell { t, size: n, eigenvalues: r.eigenvalues, classes: r.classes.unwrap_or_default(), pair_count })
        })
        .collect::<Result<_>>()?;
    let nt = t_list.len();
    let nn = n_list.len();
    let mut flips = Vec::new();
    for i in 0..nt {
        for j in 0..nn {
            let here = &cells[i * nn + j];
            if i + 1 < nt {
                flips.extend(track_flips(here, &cells[(i + 1) * nn + j], ScanAxis::T));
            }
            if j + 1 < nn {
                flips.extend(track_flips(here, &cells[i * nn + j + 1], ScanAxis::N));
            }
        }
    }
    Ok(ScanResult { m_pow, cells, flips })
}

fn track_flips(a: &ScanCell, b: &ScanCell, axis: ScanAxis) -> Vec<Flip> {
    let mut used = vec![false; b.eigenvalues.len()];
    let mut out = Vec::new();
    let count = a.eigenvalues.len().min(b.eigenvalues.len());
    for ia in 0..count {
        let target = a.eigenvalues[ia].re;
        let best = (0..b.eigenvalues.len())
            .filter(|&k| !used[k])
            .min_by(|&x, &y| {
                let dx = (b.eigenvalues[x].re - target).abs();
                let dy = (b.eigenvalues[y].re - target).abs();
                dx.partial_cmp(&dy).unwrap_or(std::cmp::Ordering::Equal)
            });
        let Some(ib) = best else { break };
        used[ib] = true;
        let was_pair = matches!(a.classes.get(ia), Some(EigenClass::Pair(_)));
        let is_pair = matches!(b.classes.get(ib), Some(EigenClass::Pair(_)));
        if was_pair != is_pair {
            out.push(Flip {
                axis,
                from: (a.t, a.size),
                to: (b.t, b.size),
                from_index: ia,
                to_index: ib,
                became_pair: is_pair,
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfiniteProblem {
    pub m_pow: u32,
    pub alpha: f64,
    pub gamma: f64,
    pub size: usize,
}

impl InfiniteProblem {
    pub fn new(m_pow: u32, alpha: f64, gamma: f64, size: usize) -> Result<Self> {
        check_power(m_pow)?;
        HermiteBasisSpec::new(alpha, size)?;
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(PtError::Invalid(format!("gamma must be positive, got {gamma}")));
        }
        if size < 2 {
            return Err(PtError::Invalid(format!("basis size {size} < 2")));
        }
        Ok(InfiniteProblem { m_pow, alpha, gamma, size })
    }

    pub fn basis(&self) -> HermiteBasisSpec {
        HermiteBasisSpec { alpha: self.alpha, size: self.size }
    }

    /// Number of rows just outside the basis reached by the band.
    pub fn leak_rows(&self) -> usize {
        (self.m_pow as usize).max(2)
    }

    /// `h_N + i γ^{m+2} v` couplings, including rows outside the basis.
    fn couplings(&self) -> Vec<(usize, usize, Complex)> {
        let basis = self.basis();
        let scale = self.gamma.powi(self.m_pow as i32 + 2);
        let kin = hermite_kinetic(&basis);
        let pot = hermite_power_couplings(&basis, self.m_pow);
        let re = kin.iter().map(|c: &Coupling| (c.row, c.col, Complex::new(c.value, 0.0)));
        let im = pot.iter().map(|c| (c.row, c.col, Complex::new(0.0, scale * c.value)));
        re.chain(im).collect()
    }
}

/// Scaled matrix `ĥ`; its eigenvalues are `E₀ = γ² E`.
pub fn build_infinite(p: &InfiniteProblem) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(p.size);
    for (r, c, v) in p.couplings() {
        if r < p.size {
            h[(r, c)] += v;
        }
    }
    h
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub e0: Complex,
    pub delta: f64,
    pub a: Vec<Complex>,
}

/// `Δ = Σ_{m=N}^{N+M-1} |Σ_n H_mn a_n|²`: the part of `ĥ ψ` that leaves the
/// truncated basis, in the scaled units of `ĥ`.
pub fn residual_delta(p: &InfiniteProblem, e0: Complex, a: &[Complex]) -> Result<ResidualReport> {
    if a.len() != p.size {
        return Err(PtError::Invalid(format!("expected {} coefficients, got {}", p.size, a.len())));
    }
    let n2: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    if (n2 - 1.0).abs() > 1e-8 {
        return Err(PtError::NotNormalized(n2));
    }
    let mut chi = vec![Complex::new(0.0, 0.0); p.leak_rows()];
    for (r, c, v) in p.couplings() {
        if r >= p.size {
            chi[r - p.size] += v * a[c];
        }
    }
    let delta = chi.iter().map(|z| z.norm_sqr()).sum();
    Ok(ResidualReport { e0, delta, a: a.to_vec() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfiniteState {
    /// Physical eigenvalue `E₀ / γ²`.
    pub e: Complex,
    pub e0: Complex,
    pub delta: f64,
    pub class: EigenClass,
    pub coefficients: Vec<Complex>,
}

/// Every eigenpair of the truncated problem, sorted by real part.
pub fn solve_infinite(p: &InfiniteProblem) -> Result<Vec<InfiniteState>> {
    let h = build_infinite(p);
    let r = eig_classified(&h)?;
    let classes = r.classes.clone().unwrap_or_default();
    let g2 = p.gamma * p.gamma;
    r.eigenvalues
        .iter()
        .zip(&r.eigenvectors)
        .zip(classes)
        .map(|((&e0, v), class)| {
            let rep = residual_delta(p, e0, v)?;
            Ok(InfiniteState { e: e0 / g2, e0, delta: rep.delta, class, coefficients: rep.a })
        })
        .collect()
}

/// The `k` lowest REAL states.
pub fn lowest_real_states(states: &[InfiniteState], k: usize) -> Vec<InfiniteState> {
    states.iter().filter(|s| s.class == EigenClass::Real).take(k).cloned().collect()
}

/// `ψ(x) = Σ a_n φ_n(x/γ)` in physical `x`.
pub fn infinite_wavefunction(p: &InfiniteProblem, a: &[Complex], x: f64) -> Complex {
    let phi = p.basis().values(a.len(), x / p.gamma);
    a.iter().zip(phi).map(|(ak, f)| ak * f).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticEnvelope {
    pub m_pow: u32,
    pub p: f64,
    pub b: Complex,
    pub q: f64,
}

impl AsymptoticEnvelope {
    /// `exp(-Re(b)|x|^p) |x|^q`.
    pub fn magnitude(&self, x: f64) -> f64 {
        let ax = x.abs();
        (-self.b.re * ax.powf(self.p)).exp() * ax.powf(self.q)
    }
}

/// Large-|x| decay `ψ ~ x^q exp(-b x^p)` of `-ψ'' + i x^m ψ = Eψ`; the
/// imaginary part of `b` changes sign between the half-lines.
pub fn asymptotic_envelope(m_pow: u32, positive_half: bool) -> Result<AsymptoticEnvelope> {
    check_power(m_pow)?;
    let m = m_pow as f64;
    let s = std::f64::consts::SQRT_2 / (m + 2.0);
    let im = if positive_half { s } else { -s };
    Ok(AsymptoticEnvelope { m_pow, p: (m + 2.0) / 2.0, b: Complex::new(s, im), q: -m / 4.0 })
}
