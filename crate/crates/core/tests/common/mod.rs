//! Test-only reference integrators. These are deliberately independent of the
//! library's Gauss machinery: plain Gauss-Legendre panels found by Newton on
//! the Legendre recurrence, plus an adaptive bisection driver.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

/// Discretizes `exp(-c x^2) dx` on [a, b] (b may be infinite) with
/// Gauss-Legendre panels of width `h`.
pub fn discretize(c: f64, a: f64, b: f64, h: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let lo = if a.is_finite() { a } else { -40.0 / c.sqrt() };
    let hi = if b.is_finite() { b } else { lo.max(0.0) + 40.0 / c.sqrt() };
    let (gx, gw) = gauss_legendre(n);
    let panels = ((hi - lo) / h).ceil().max(1.0) as usize;
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for p in 0..panels {
        let l = lo + (hi - lo) * p as f64 / panels as f64;
        let r = lo + (hi - lo) * (p + 1) as f64 / panels as f64;
        for (x, w) in gx.iter().zip(&gw) {
            let t = 0.5 * (r - l) * x + 0.5 * (l + r);
            xs.push(t);
            ws.push(0.5 * (r - l) * w * (-c * t * t).exp());
        }
    }
    (xs, ws)
}

fn gl_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let (x, w) = rule;
    x.iter()
        .zip(w)
        .map(|(t, wt)| wt * f(0.5 * (b - a) * t + 0.5 * (a + b)))
        .sum::<f64>()
        * 0.5
        * (b - a)
}

/// Adaptive Gauss-Legendre on a finite interval: accept a panel when the
/// 15- and 30-point results agree to `tol`, otherwise bisect.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let lo = gauss_legendre(15);
    let hi = gauss_legendre(30);
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        tol: f64,
        lo: &(Vec<f64>, Vec<f64>),
        hi: &(Vec<f64>, Vec<f64>),
        depth: usize,
    ) -> f64 {
        let coarse = gl_panel(f, a, b, lo);
        let fine = gl_panel(f, a, b, hi);
        if (coarse - fine).abs() <= tol || depth > 60 {
            fine
        } else {
            let m = 0.5 * (a + b);
            rec(f, a, m, 0.5 * tol, lo, hi, depth + 1) + rec(f, m, b, 0.5 * tol, lo, hi, depth + 1)
        }
    }
    rec(f, a, b, tol, &lo, &hi, 0)
}

/// Reference for `∫_a^∞ f(x) exp(-c x^2) dx` split at the given points.
pub fn adaptive_weighted<F: Fn(f64) -> f64>(c: f64, a: f64, splits: &[f64], f: F, tol: f64) -> f64 {
    let end = a.max(0.0) + 40.0 / c.sqrt();
    let g = |x: f64| f(x) * (-c * x * x).exp();
    let mut edges = vec![a];
    edges.extend_from_slice(splits);
    edges.push(end);
    edges.windows(2).map(|w| adaptive(&g, w[0], w[1], tol)).sum()
}

/// Closed-form `∫_0^∞ x^d exp(-c x^2) dx = Γ((d+1)/2) / (2 c^{(d+1)/2})`.
pub fn half_line_moment(c: f64, d: u32) -> f64 {
    // Γ((d+1)/2) via the half-integer recurrence
    let mut g = if d % 2 == 0 { PI.sqrt() } else { 1.0 };
    let mut s = if d % 2 == 0 { 0.5 } else { 1.0 };
    while s < (d as f64 + 1.0) / 2.0 - 1e-12 {
        g *= s;
        s += 1.0;
    }
    g / (2.0 * c.powf((d as f64 + 1.0) / 2.0))
}
