//! Gauss rules for the Gaussian weight `w(x) = exp(-c x^2)` restricted to an
//! interval `[a, b]`, where either endpoint may be infinite.
//!
//! The monic orthogonal polynomials are generated from the recurrence
//! `p_{k+1} = (x - a_k) p_k - b_k p_{k-1}` with `b_k = γ_k / γ_{k-1}` and
//! `γ_k = ∫ p_k^2 w`. Integrating by parts against `w' = -2cx w` gives the
//! boundary-term updates
//!
//! ```text
//! γ_k = (k / 2c) γ_{k-1} - (1 / 2c) [w p_{k-1} p_k]_a^b
//! a_k = -(1 / 2c γ_k) [w p_k^2]_a^b
//! ```
//!
//! which need only endpoint values of the polynomials. The updates cancel
//! catastrophically on finite and half-infinite intervals, so they are run in
//! multi-precision arithmetic with a working precision sized from the interval
//! geometry and the requested degree, then rounded to `f64`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mp::{self, Mp};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("Gaussian exponent must be positive and finite, got c = {0}")]
    InvalidExponent(f64),
    #[error("invalid interval [{a}, {b}]: need a < b")]
    InvalidInterval { a: f64, b: f64 },
    #[error("chain degree must be at least 1")]
    ZeroDegree,
    #[error("rule order {order} exceeds chain degree {degree}")]
    OrderTooLarge { order: usize, degree: usize },
    #[error("monic chain construction lost positivity at k = {k} (gamma = {gamma})")]
    ChainBreakdown { k: usize, gamma: f64 },
    #[error("root of p_{degree} did not converge in bracket [{lo}, {hi}]")]
    RootNotConverged { degree: usize, lo: f64, hi: f64 },
    #[error("integrand is not finite at node x = {node} (value {value})")]
    NonFiniteIntegrand { node: f64, value: f64 },
    #[error("breakpoint {value} is outside ({a}, {b})")]
    BreakpointOutOfRange { value: f64, a: f64, b: f64 },
    #[error("breakpoints must be strictly ascending: {prev} then {next}")]
    BreakpointsNotAscending { prev: f64, next: f64 },
}

pub type Result<T> = std::result::Result<T, QuadError>;

/// Gaussian weight `exp(-c x^2)` on `[a, b]`. Infinite endpoints are
/// represented by `f64::NEG_INFINITY` / `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub c: f64,
    pub a: f64,
    pub b: f64,
}

impl WeightSpec {
    pub fn new(c: f64, a: f64, b: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(QuadError::InvalidExponent(c));
        }
        if a.is_nan() || b.is_nan() || a >= b || a == f64::INFINITY || b == f64::NEG_INFINITY {
            return Err(QuadError::InvalidInterval { a, b });
        }
        Ok(WeightSpec { c, a, b })
    }

    /// `[0, ∞)`
    pub fn half_line(c: f64) -> Result<Self> {
        Self::new(c, 0.0, f64::INFINITY)
    }

    /// `(-∞, ∞)`
    pub fn full_line(c: f64) -> Result<Self> {
        Self::new(c, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn weight(&self, x: f64) -> f64 {
        (-self.c * x * x).exp()
    }

    pub fn contains_strictly(&self, x: f64) -> bool {
        x > self.a && x < self.b
    }

    fn restrict(&self, a: f64, b: f64) -> Result<Self> {
        Self::new(self.c, a, b)
    }

    /// Bits of working precision for a chain of the given degree.
    ///
    /// Each step of the boundary-term recurrence cancels a number of bits that
    /// grows like `log2(8k / (c L^2))`, where `L` is the length scale over
    /// which the restricted weight is supported; the factor and offset below
    /// were fitted against runs at much higher precision.
    fn chain_precision(&self, degree: usize) -> usize {
        let c = self.c;
        let mut bits = 128.0;
        let both_infinite = self.a.is_infinite() && self.b.is_infinite();
        if !both_infinite {
            bits = 96.0;
            let mut scale = 1.0 / c.sqrt();
            if self.a.is_finite() && self.b.is_finite() {
                // the weight piles up against the end nearer the origin
                let near = if self.a <= 0.0 && self.b >= 0.0 {
                    0.0
                } else {
                    self.a.abs().min(self.b.abs())
                };
                scale = (1.0 / (c.sqrt() + 2.0 * c * near)).min(self.b - self.a);
            }
            for k in 1..=degree {
                let loss = (8.0 * k as f64 / (c * scale * scale)).log2().max(0.0);
                bits += 4.0 + 0.8 * loss;
            }
        }
        // γ_0 on a far tail is a difference of nearly equal numbers, and the
        // series behind it grows like exp(c x^2) before converging
        for end in [self.a, self.b] {
            if end.is_finite() {
                bits += 2.0 * std::f64::consts::LOG2_E * c * end * end;
            }
        }
        bits.ceil() as usize
    }
}

/// Recurrence data for the monic orthogonal polynomials `p_0 .. p_K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonicChain {
    pub weight_spec: WeightSpec,
    pub degree: usize,
    /// `a_k`, k = 0..K-1
    pub recurrence_a: Vec<f64>,
    /// `b_k = γ_k/γ_{k-1}`, k = 1..K-1 (stored at index k-1)
    pub recurrence_b: Vec<f64>,
    /// `γ_k = ∫ p_k^2 w`, k = 0..K-1
    pub gamma: Vec<f64>,
    /// Working precision (bits) the chain was generated with.
    pub precision_bits: usize,
}

impl MonicChain {
    fn b(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.recurrence_b[k - 1]
        }
    }

    /// `p_k(x)` for `k <= degree`.
    pub fn eval(&self, k: usize, x: f64) -> f64 {
        self.eval_with_prev(k, x).1
    }

    /// `(p_{k-1}(x), p_k(x), p_k'(x))`.
    pub fn eval_with_prev(&self, k: usize, x: f64) -> (f64, f64, f64) {
        assert!(k <= self.degree, "degree {k} beyond chain degree {}", self.degree);
        let (mut p_prev, mut p) = (0.0, 1.0);
        let (mut d_prev, mut d) = (0.0, 0.0);
        for j in 0..k {
            let t = x - self.recurrence_a[j];
            let bj = self.b(j);
            let p_next = t * p - bj * p_prev;
            let d_next = p + t * d - bj * d_prev;
            p_prev = p;
            p = p_next;
            d_prev = d;
            d = d_next;
        }
        (p_prev, p, d)
    }

    /// Monomial coefficients of `p_k`, lowest degree first. Intended for tests
    /// and small degrees.
    pub fn coefficients(&self, k: usize) -> Vec<f64> {
        let mut prev = vec![0.0; k + 1];
        let mut cur = vec![0.0; k + 1];
        cur[0] = 1.0;
        for j in 0..k {
            let mut next = vec![0.0; k + 1];
            for i in 0..=j {
                next[i + 1] += cur[i];
                next[i] -= self.recurrence_a[j] * cur[i];
                next[i] -= self.b(j) * prev[i];
            }
            prev = cur;
            cur = next;
        }
        cur
    }

    /// Interval guaranteed to contain every root of `p_k`, k <= n.
    fn root_bounds(&self, n: usize) -> (f64, f64) {
        // Gershgorin on the symmetric Jacobi matrix
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for j in 0..n {
            let left = if j > 0 { self.b(j).sqrt() } else { 0.0 };
            let right = if j + 1 < n { self.b(j + 1).sqrt() } else { 0.0 };
            lo = lo.min(self.recurrence_a[j] - left - right);
            hi = hi.max(self.recurrence_a[j] + left + right);
        }
        let spec = &self.weight_spec;
        let pad = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        (spec.a.max(lo - pad), spec.b.min(hi + pad))
    }
}

/// Builds `p_0 .. p_K` for the restricted Gaussian weight.
pub fn build_monic_chain(spec: WeightSpec, degree: usize) -> Result<MonicChain> {
    let spec = WeightSpec::new(spec.c, spec.a, spec.b)?;
    if degree == 0 {
        return Err(QuadError::ZeroDegree);
    }
    let mut bits = spec.chain_precision(degree);
    for _ in 0..4 {
        match chain_at_precision(spec, degree, bits) {
            Ok(chain) => return Ok(chain),
            Err(QuadError::ChainBreakdown { .. }) => bits *= 2,
            Err(e) => return Err(e),
        }
    }
    chain_at_precision(spec, degree, bits)
}

/// Same as [`build_monic_chain`] with an explicit working precision in bits.
/// Exposed so the precision heuristic can be checked against a higher setting.
pub fn chain_at_precision(spec: WeightSpec, degree: usize, bits: usize) -> Result<MonicChain> {
    if degree == 0 {
        return Err(QuadError::ZeroDegree);
    }
    let mut mp = Mp::new(bits);
    let c = mp.from_f64(spec.c);
    let two_c = mp.mul(&mp.from_f64(2.0), &c);

    // Endpoint data: weight value and the running (p_{k-1}, p_k) pair.
    struct End {
        x: astro_float::BigFloat,
        w: astro_float::BigFloat,
        p_prev: astro_float::BigFloat,
        p: astro_float::BigFloat,
    }
    let mut ends: Vec<End> = Vec::new();
    let mut signs: Vec<f64> = Vec::new();
    for (end, sign) in [(spec.a, 1.0), (spec.b, -1.0)] {
        if end.is_finite() {
            let x = mp.from_f64(end);
            let w = mp.gaussian(&c, &x);
            ends.push(End {
                x,
                w,
                p_prev: mp.from_f64(0.0),
                p: mp.from_f64(1.0),
            });
            signs.push(sign);
        }
    }

    let mut gamma = mp.gauss_mass(spec.c, spec.a, spec.b);
    let mut gamma_prev: Option<astro_float::BigFloat> = None;
    let mut rec_a = Vec::with_capacity(degree);
    let mut rec_b = Vec::with_capacity(degree.saturating_sub(1));
    let mut gammas = Vec::with_capacity(degree);

    for k in 0..degree {
        let g = mp::to_f64(&gamma);
        if !(g.is_finite() && g > 0.0) {
            return Err(QuadError::ChainBreakdown { k, gamma: g });
        }
        gammas.push(g);
        let mut b_k = mp.from_f64(0.0);
        if let Some(gp) = &gamma_prev {
            b_k = mp.div(&gamma, gp);
            rec_b.push(mp::to_f64(&b_k));
        }
        // a_k = (w(a) p_k(a)^2 - w(b) p_k(b)^2) / (2c γ_k)
        let mut num = mp.from_f64(0.0);
        for (e, s) in ends.iter().zip(&signs) {
            let t = mp.mul(&e.w, &mp.mul(&e.p, &e.p));
            num = if *s > 0.0 { mp.add(&num, &t) } else { mp.sub(&num, &t) };
        }
        let a_k = mp.div(&num, &mp.mul(&two_c, &gamma));
        rec_a.push(mp::to_f64(&a_k));
        if k + 1 == degree {
            break;
        }
        // advance endpoint values to p_{k+1}
        let mut boundary = mp.from_f64(0.0);
        for (e, s) in ends.iter_mut().zip(&signs) {
            let next = mp.sub(&mp.mul(&mp.sub(&e.x, &a_k), &e.p), &mp.mul(&b_k, &e.p_prev));
            let t = mp.mul(&e.w, &mp.mul(&e.p, &next));
            boundary = if *s > 0.0 { mp.add(&boundary, &t) } else { mp.sub(&boundary, &t) };
            e.p_prev = std::mem::replace(&mut e.p, next);
        }
        // γ_{k+1} = ((k+1) γ_k + w(a) p_k(a) p_{k+1}(a) - w(b) p_k(b) p_{k+1}(b)) / 2c
        let next_gamma = mp.div(
            &mp.add(&mp.mul(&mp.from_usize(k + 1), &gamma), &boundary),
            &two_c,
        );
        gamma_prev = Some(std::mem::replace(&mut gamma, next_gamma));
    }

    Ok(MonicChain {
        weight_spec: spec,
        degree,
        recurrence_a: rec_a,
        recurrence_b: rec_b,
        gamma: gammas,
        precision_bits: mp.prec(),
    })
}


/// Gauss rule with `order` nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
    pub weight_spec: WeightSpec,
}

/// Nodes are the eigenvalues of the Jacobi matrix, each polished by
/// safeguarded Newton on `p_order` inside the bracket formed by its
/// neighbours. If a bracket fails to straddle a sign change the nodes are
/// instead found degree by degree from the interlacing of `p_k` and
/// `p_{k+1}`. Weights are `γ_{n-1} / (p_{n-1}(x_j) p_n'(x_j))`.
pub fn gauss_rule(chain: &MonicChain, order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(QuadError::ZeroDegree);
    }
    if order > chain.degree {
        return Err(QuadError::OrderTooLarge {
            order,
            degree: chain.degree,
        });
    }
    let (lo, hi) = chain.root_bounds(order);
    let roots = match polished_jacobi_roots(chain, order, lo, hi) {
        Some(r) => r,
        None => interlacing_roots(chain, order, lo, hi)?,
    };
    let g = chain.gamma[order - 1];
    let weights = roots
        .iter()
        .map(|&x| {
            let (p_prev, _, d) = chain.eval_with_prev(order, x);
            g / (p_prev * d)
        })
        .collect();
    Ok(QuadratureRule {
        nodes: roots,
        weights,
        order,
        weight_spec: chain.weight_spec,
    })
}

fn polished_jacobi_roots(chain: &MonicChain, n: usize, lo: f64, hi: f64) -> Option<Vec<f64>> {
    let mut jac = nalgebra::DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        jac[(j, j)] = chain.recurrence_a[j];
        if j + 1 < n {
            let off = chain.b(j + 1).sqrt();
            jac[(j, j + 1)] = off;
            jac[(j + 1, j)] = off;
        }
    }
    let mut guess: Vec<f64> = nalgebra::SymmetricEigen::new(jac).eigenvalues.iter().copied().collect();
    guess.sort_by(|x, y| x.total_cmp(y));
    let mut roots = Vec::with_capacity(n);
    for i in 0..n {
        let left = if i == 0 { lo } else { 0.5 * (guess[i - 1] + guess[i]) };
        let right = if i + 1 == n { hi } else { 0.5 * (guess[i] + guess[i + 1]) };
        let (fl, fr) = (chain.eval(n, left), chain.eval(n, right));
        if !(fl.is_finite() && fr.is_finite()) || fl.signum() == fr.signum() || fl == 0.0 {
            return None;
        }
        roots.push(bracketed_root(chain, n, left, right).ok()?);
    }
    Some(roots)
}

fn interlacing_roots(chain: &MonicChain, order: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let mut roots: Vec<f64> = Vec::new();
    for k in 1..=order {
        let mut next = Vec::with_capacity(k);
        for i in 0..k {
            let left = if i == 0 { lo } else { roots[i - 1] };
            let right = if i == k - 1 { hi } else { roots[i] };
            next.push(bracketed_root(chain, k, left, right)?);
        }
        roots = next;
    }
    Ok(roots)
}

fn bracketed_root(chain: &MonicChain, k: usize, lo: f64, hi: f64) -> Result<f64> {
    let f = |x: f64| chain.eval_with_prev(k, x);
    let (mut a, mut b) = (lo, hi);
    let mut fa = if a.is_finite() { f(a).1 } else { f64::NAN };
    let fb = if b.is_finite() { f(b).1 } else { f64::NAN };
    if fa == 0.0 {
        fa = -fb;
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let (_, fx, dx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let newton = x - fx / dx;
        let step_ok = newton.is_finite() && newton > a && newton < b;
        let x_new = if step_ok { newton } else { 0.5 * (a + b) };
        let tol = 1e-13 * x.abs().max(1.0) * 1e-2;
        if (x_new - x).abs() <= tol || (b - a) <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
            return Ok(x_new);
        }
        x = x_new;
    }
    Err(QuadError::RootNotConverged { degree: k, lo, hi })
}

impl QuadratureRule {
    pub fn from_spec(spec: WeightSpec, order: usize) -> Result<Self> {
        let chain = build_monic_chain(spec, order)?;
        gauss_rule(&chain, order)
    }

    /// `Σ W_j f(x_j)`
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> Result<f64> {
        let mut sum = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(x);
            if !v.is_finite() {
                return Err(QuadError::NonFiniteIntegrand { node: x, value: v });
            }
            sum += w * v;
        }
        Ok(sum)
    }
}

/// Piecewise Gauss rule: one restricted-weight rule per panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeRule {
    pub weight_spec: WeightSpec,
    pub breakpoints: Vec<f64>,
    pub panels: Vec<QuadratureRule>,
}

impl CompositeRule {
    pub fn new(spec: WeightSpec, breakpoints: &[f64], panel_order: usize) -> Result<Self> {
        validate_breakpoints(&spec, breakpoints)?;
        let mut edges = Vec::with_capacity(breakpoints.len() + 2);
        edges.push(spec.a);
        edges.extend_from_slice(breakpoints);
        edges.push(spec.b);
        let panels = edges
            .windows(2)
            .map(|w| QuadratureRule::from_spec(spec.restrict(w[0], w[1])?, panel_order))
            .collect::<Result<Vec<_>>>()?;
        Ok(CompositeRule {
            weight_spec: spec,
            breakpoints: breakpoints.to_vec(),
            panels,
        })
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> Result<f64> {
        let mut sum = 0.0;
        for panel in &self.panels {
            sum += panel.integrate(&mut f)?;
        }
        Ok(sum)
    }

    /// All nodes and weights, panel by panel (ascending).
    pub fn flatten(&self) -> (Vec<f64>, Vec<f64>) {
        let nodes = self.panels.iter().flat_map(|p| p.nodes.iter().copied()).collect();
        let weights = self.panels.iter().flat_map(|p| p.weights.iter().copied()).collect();
        (nodes, weights)
    }
}

fn validate_breakpoints(spec: &WeightSpec, bps: &[f64]) -> Result<()> {
    for &x in bps {
        if !spec.contains_strictly(x) {
            return Err(QuadError::BreakpointOutOfRange {
                value: x,
                a: spec.a,
                b: spec.b,
            });
        }
    }
    for w in bps.windows(2) {
        if w[1] <= w[0] {
            return Err(QuadError::BreakpointsNotAscending { prev: w[0], next: w[1] });
        }
    }
    Ok(())
}

/// `∫_a^b f(x) exp(-c x^2) dx` with the interval split at `breakpoints`.
pub fn composite_integrate<F: FnMut(f64) -> f64>(
    spec: WeightSpec,
    breakpoints: &[f64],
    panel_order: usize,
    f: F,
) -> Result<f64> {
    CompositeRule::new(spec, breakpoints, panel_order)?.integrate(f)
}
