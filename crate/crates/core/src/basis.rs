//! Basis families: radial Laguerre functions in `c x^2`, Hermite functions on
//! the line, and the mixed cosine/sine box basis on `[-T, T]`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("basis scale must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("basis size must be at least {min}, got {got}")]
    TooSmall { got: usize, min: usize },
    #[error("basis index {index} outside 1..={size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("potential exponent {0} is not odd")]
    EvenPower(u32),
}

pub type Result<T> = std::result::Result<T, BasisError>;

fn check_scale(v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(BasisError::InvalidScale(v))
    }
}

/// Generalized Laguerre polynomial `L_k^{(alpha)}(t)` by upward recurrence.
pub fn laguerre_poly(k: usize, alpha: f64, t: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - t;
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + alpha - t) * cur - (jf + alpha) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_0 .. L_{count-1}` with parameter `alpha` at `t`.
fn laguerre_all(count: usize, alpha: f64, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(1.0);
    if count > 1 {
        out.push(1.0 + alpha - t);
    }
    for j in 1..count.saturating_sub(1) {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + alpha - t) * out[j] - (jf + alpha) * out[j - 1]) / (jf + 1.0);
        out.push(next);
    }
    out
}

/// Radial basis `L(n-1, 1/2, c x^2)`, `n = 1..=size`, orthogonal under
/// `x^2 exp(-c x^2)` on `[0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaguerreBasisSpec {
    pub c: f64,
    pub size: usize,
}

impl LaguerreBasisSpec {
    pub fn new(c: f64, size: usize) -> Result<Self> {
        check_scale(c)?;
        if size == 0 {
            return Err(BasisError::TooSmall { got: 0, min: 1 });
        }
        Ok(LaguerreBasisSpec { c, size })
    }

    fn check(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.size {
            Err(BasisError::IndexOutOfRange { index: n, size: self.size })
        } else {
            Ok(())
        }
    }
}

pub fn laguerre_eval(spec: &LaguerreBasisSpec, n: usize, x: f64) -> Result<f64> {
    spec.check(n)?;
    Ok(laguerre_poly(n - 1, 0.5, spec.c * x * x))
}

/// `N_n = Γ(n+1/2) / (2 c^{3/2} (n-1)!)`.
pub fn laguerre_norm(spec: &LaguerreBasisSpec, n: usize) -> Result<f64> {
    spec.check(n)?;
    Ok(norm_unchecked(spec.c, n))
}

fn norm_unchecked(c: f64, n: usize) -> f64 {
    // Γ(n+1/2)/Γ(n) = Γ(3/2) Π_{k=1}^{n-1} (k+1/2)/k
    let mut ratio = PI.sqrt() / 2.0;
    for k in 1..n {
        ratio *= (k as f64 + 0.5) / k as f64;
    }
    ratio / (2.0 * c.powf(1.5))
}

/// Eigenvalue of `H0 = -(D^2 + (2/x) D)/2 + c x D` on member `n`.
pub fn h0_diagonal(spec: &LaguerreBasisSpec, n: usize) -> Result<f64> {
    spec.check(n)?;
    Ok(2.0 * spec.c * (n as f64 - 1.0))
}

/// Orthonormal members `f_m = L(m-1,1/2,cx^2)/sqrt(N_m)` and their first two
/// x-derivatives, all `m = 1..=size`.
#[derive(Debug, Clone)]
pub struct LaguerreValues {
    pub value: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

impl LaguerreBasisSpec {
    /// `1/sqrt(N_m)` for all members.
    pub fn inv_sqrt_norms(&self) -> Vec<f64> {
        (1..=self.size).map(|m| 1.0 / norm_unchecked(self.c, m).sqrt()).collect()
    }

    pub fn orthonormal_values(&self, x: f64) -> Vec<f64> {
        LaguerreEvaluator::new(*self).values(x)
    }

    pub fn orthonormal_with_derivatives(&self, x: f64) -> LaguerreValues {
        let c = self.c;
        let t = c * x * x;
        let l0 = laguerre_all(self.size, 0.5, t);
        // d/dt L_k^{(a)} = -L_{k-1}^{(a+1)}
        let l1 = laguerre_all(self.size, 1.5, t);
        let l2 = laguerre_all(self.size, 2.5, t);
        let s = self.inv_sqrt_norms();
        let mut out = LaguerreValues {
            value: vec![0.0; self.size],
            d1: vec![0.0; self.size],
            d2: vec![0.0; self.size],
        };
        for k in 0..self.size {
            let dt = if k >= 1 { -l1[k - 1] } else { 0.0 };
            let dtt = if k >= 2 { l2[k - 2] } else { 0.0 };
            out.value[k] = l0[k] * s[k];
            out.d1[k] = 2.0 * c * x * dt * s[k];
            out.d2[k] = (2.0 * c * dt + 4.0 * c * c * x * x * dtt) * s[k];
        }
        out
    }
}

/// Orthonormal Laguerre evaluation with the normalization constants cached.
#[derive(Debug, Clone)]
pub struct LaguerreEvaluator {
    pub spec: LaguerreBasisSpec,
    scale: Vec<f64>,
}

impl LaguerreEvaluator {
    pub fn new(spec: LaguerreBasisSpec) -> Self {
        LaguerreEvaluator { scale: spec.inv_sqrt_norms(), spec }
    }

    pub fn values(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.spec.size];
        self.values_into(x, &mut out);
        out
    }

    /// Writes `f_1(x) .. f_size(x)` into `out`.
    pub fn values_into(&self, x: f64, out: &mut [f64]) {
        let t = self.spec.c * x * x;
        let n = self.spec.size;
        let (mut prev, mut cur) = (1.0, 1.5 - t);
        out[0] = self.scale[0];
        if n > 1 {
            out[1] = cur * self.scale[1];
        }
        for j in 1..n.saturating_sub(1) {
            let jf = j as f64;
            let next = ((2.0 * jf + 1.5 - t) * cur - (jf + 0.5) * prev) / (jf + 1.0);
            prev = cur;
            cur = next;
            out[j + 1] = cur * self.scale[j + 1];
        }
    }

    /// `Σ a_m f_m(x)` without allocating.
    pub fn combine(&self, a: &[f64], x: f64) -> f64 {
        let t = self.spec.c * x * x;
        let n = self.spec.size.min(a.len());
        let (mut prev, mut cur) = (1.0, 1.5 - t);
        let mut sum = a[0] * self.scale[0];
        if n > 1 {
            sum += a[1] * cur * self.scale[1];
        }
        for j in 1..n.saturating_sub(1) {
            let jf = j as f64;
            let next = ((2.0 * jf + 1.5 - t) * cur - (jf + 0.5) * prev) / (jf + 1.0);
            prev = cur;
            cur = next;
            sum += a[j + 1] * cur * self.scale[j + 1];
        }
        sum
    }
}

/// One operator matrix element `<phi_row| op |phi_col>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// Orthonormal Hermite functions `phi_n(x) = (α/π)^{1/4} H_n(√α x) e^{-αx²/2} / sqrt(2^n n!)`,
/// `n = 0..size-1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermiteBasisSpec {
    pub alpha: f64,
    pub size: usize,
}

impl HermiteBasisSpec {
    pub fn new(alpha: f64, size: usize) -> Result<Self> {
        check_scale(alpha)?;
        if size == 0 {
            return Err(BasisError::TooSmall { got: 0, min: 1 });
        }
        Ok(HermiteBasisSpec { alpha, size })
    }

    /// `phi_0 .. phi_{count-1}` at `x`; `count` may exceed `size`.
    pub fn values(&self, count: usize, x: f64) -> Vec<f64> {
        let a = self.alpha;
        let mut out = Vec::with_capacity(count);
        if count == 0 {
            return out;
        }
        out.push((a / PI).powf(0.25) * (-0.5 * a * x * x).exp());
        if count > 1 {
            out.push((2.0 * a).sqrt() * x * out[0]);
        }
        for n in 1..count.saturating_sub(1) {
            let nf = n as f64;
            let next = (2.0 * a / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
            out.push(next);
        }
        out
    }
}

pub fn hermite_phi_eval(spec: &HermiteBasisSpec, n: usize, x: f64) -> Result<f64> {
    if n >= spec.size {
        return Err(BasisError::IndexOutOfRange { index: n, size: spec.size });
    }
    Ok(spec.values(n + 1, x)[n])
}

/// `x phi_n = (sqrt(n+1) phi_{n+1} + sqrt(n) phi_{n-1}) / sqrt(2α)` for every
/// column `n < size`. Rows may reach `size` (coupling out of the basis).
pub fn hermite_x_action(spec: &HermiteBasisSpec) -> Result<Vec<Coupling>> {
    if spec.size < 2 {
        return Err(BasisError::TooSmall { got: spec.size, min: 2 });
    }
    Ok(x_action_cols(spec.alpha, spec.size))
}

fn x_action_cols(alpha: f64, cols: usize) -> Vec<Coupling> {
    let s = 1.0 / (2.0 * alpha).sqrt();
    let mut out = Vec::with_capacity(2 * cols);
    for n in 0..cols {
        if n > 0 {
            out.push(Coupling { row: n - 1, col: n, value: (n as f64).sqrt() * s });
        }
        out.push(Coupling { row: n + 1, col: n, value: ((n + 1) as f64).sqrt() * s });
    }
    out
}

/// `-D^2` in the Hermite basis: diagonal `α(2n+1)/2`, offsets ±2 with
/// `-(α/2) sqrt((n+1)(n+2))`. Rows may reach `size + 1`.
pub fn hermite_kinetic(spec: &HermiteBasisSpec) -> Vec<Coupling> {
    let a = spec.alpha;
    let mut out = Vec::with_capacity(3 * spec.size);
    for n in 0..spec.size {
        let nf = n as f64;
        if n >= 2 {
            out.push(Coupling { row: n - 2, col: n, value: -0.5 * a * (nf * (nf - 1.0)).sqrt() });
        }
        out.push(Coupling { row: n, col: n, value: 0.5 * a * (2.0 * nf + 1.0) });
        out.push(Coupling { row: n + 2, col: n, value: -0.5 * a * ((nf + 1.0) * (nf + 2.0)).sqrt() });
    }
    out
}

/// `<phi_row| x^m |phi_col>` for every column `< size` and every nonzero row,
/// including rows up to `size + m - 1`. Exact: the x-action is applied to the
/// untruncated basis.
pub fn hermite_power_couplings(spec: &HermiteBasisSpec, m: u32) -> Vec<Coupling> {
    let m = m as usize;
    let width = spec.size + m;
    let s = 1.0 / (2.0 * spec.alpha).sqrt();
    let mut out = Vec::new();
    for col in 0..spec.size {
        let mut v = vec![0.0; width + 1];
        v[col] = 1.0;
        for _ in 0..m {
            let mut w = vec![0.0; width + 1];
            for (k, &vk) in v.iter().enumerate() {
                if vk == 0.0 {
                    continue;
                }
                if k > 0 {
                    w[k - 1] += (k as f64).sqrt() * s * vk;
                }
                if k + 1 <= width {
                    w[k + 1] += ((k + 1) as f64).sqrt() * s * vk;
                }
            }
            v = w;
        }
        for (row, &value) in v.iter().enumerate() {
            if value != 0.0 {
                out.push(Coupling { row, col, value });
            }
        }
    }
    out
}

/// Box basis on `[-T, T]`: odd `k` is `cos(kπx/2T)`, even `k` is
/// `sin(kπx/2T)`, each scaled by `1/sqrt(T)`; `k = 1..=size`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxBasisSpec {
    pub t: f64,
    pub size: usize,
}

impl BoxBasisSpec {
    pub fn new(t: f64, size: usize) -> Result<Self> {
        check_scale(t)?;
        if size == 0 {
            return Err(BasisError::TooSmall { got: 0, min: 1 });
        }
        Ok(BoxBasisSpec { t, size })
    }

    fn check(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.size {
            Err(BasisError::IndexOutOfRange { index: k, size: self.size })
        } else {
            Ok(())
        }
    }

    pub fn wavenumber(&self, k: usize) -> f64 {
        k as f64 * PI / (2.0 * self.t)
    }

    pub fn is_cosine(k: usize) -> bool {
        k % 2 == 1
    }

    /// Kinetic diagonal `k^2 π^2 / (4 T^2)`.
    pub fn diagonal(&self, k: usize) -> f64 {
        let q = self.wavenumber(k);
        q * q
    }

    pub fn eval(&self, k: usize, x: f64) -> Result<f64> {
        self.check(k)?;
        let arg = self.wavenumber(k) * x;
        let v = if Self::is_cosine(k) { arg.cos() } else { arg.sin() };
        Ok(v / self.t.sqrt())
    }
}

/// `∫_{-T}^{T} x^m sin(kx) dx` for odd `m`, by repeated integration by parts.
fn sine_moment(m: u32, k: f64, t: f64) -> f64 {
    let (s, _) = trig_moments(m, k, t);
    s
}

/// `(∫x^m sin kx, ∫x^m cos kx)` over `[-T, T]`, `k != 0`.
fn trig_moments(m: u32, k: f64, t: f64) -> (f64, f64) {
    let (sk, ck) = (k * t).sin_cos();
    let mut s = 0.0;
    let mut c = 2.0 * sk / k;
    let mut tp = 1.0;
    for j in 1..=m {
        tp *= t;
        let jf = j as f64;
        let odd = j % 2 == 1;
        // [x^j cos kx] and [x^j sin kx] across the symmetric interval
        let bc = if odd { 2.0 * tp * ck } else { 0.0 };
        let bs = if odd { 0.0 } else { 2.0 * tp * sk };
        let s_new = -bc / k + jf / k * c;
        let c_new = bs / k - jf / k * s;
        s = s_new;
        c = c_new;
    }
    (s, c)
}

/// `(1/T) ∫_{-T}^{T} x^m ω_i ω_j dx` with unnormalized `ω`, in closed form.
/// Zero when `i` and `j` share parity.
pub fn box_matrix_element(spec: &BoxBasisSpec, m_pow: u32, i: usize, j: usize) -> Result<f64> {
    if m_pow % 2 == 0 {
        return Err(BasisError::EvenPower(m_pow));
    }
    spec.check(i)?;
    spec.check(j)?;
    if BoxBasisSpec::is_cosine(i) == BoxBasisSpec::is_cosine(j) {
        return Ok(0.0);
    }
    let (si, ci) = if BoxBasisSpec::is_cosine(i) { (j, i) } else { (i, j) };
    let a = spec.wavenumber(si);
    let b = spec.wavenumber(ci);
    // sin(Ax)cos(Bx) = (sin((A+B)x) + sin((A-B)x)) / 2, A != B always
    let total = sine_moment(m_pow, a + b, spec.t) + sine_moment(m_pow, a - b, spec.t);
    Ok(0.5 * total / spec.t)
}
