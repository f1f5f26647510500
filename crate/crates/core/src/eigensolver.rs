//! Dense complex non-Hermitian eigendecomposition and real/pair classification.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Complex = Complex64;

/// Largest dimension the dense path is meant for.
pub const MAX_DIM: usize = 512;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("matrix dimension {0} exceeds the dense limit {MAX_DIM}")]
    TooLarge(usize),
    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("Schur iteration did not converge within {iterations} sweeps")]
    NotConverged { iterations: usize },
    #[error("eigenvalue {index} = {value} has no conjugate partner within {tol_pair:e}")]
    Unmatched { index: usize, value: Complex, tol_pair: f64 },
    #[error("expected {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, EigenError>;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    pub dim: usize,
    pub data: Vec<Complex>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix { dim, data: vec![Complex::new(0.0, 0.0); dim * dim] }
    }

    pub fn from_row_major(dim: usize, data: Vec<Complex>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(EigenError::Shape { expected: dim * dim, got: data.len() });
        }
        Ok(ComplexMatrix { dim, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, 0.0);
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn mul_vec(&self, v: &[Complex]) -> Vec<Complex> {
        (0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn is_complex_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    fn check_finite(&self) -> Result<()> {
        for (k, z) in self.data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(EigenError::NonFinite { row: k / self.dim, col: k % self.dim });
            }
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.data[i * self.dim + j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenClass {
    Real,
    /// Conjugate partner's index in the same report.
    Pair(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<Complex>,
    /// Unit 2-norm, `eigenvectors[k]` belongs to `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<Complex>>,
    /// `None` until [`classify`] has run.
    pub classes: Option<Vec<EigenClass>>,
    pub tol_im: f64,
    pub tol_pair: f64,
    pub matrix_norm: f64,
}

impl SpectrumReport {
    pub fn pair_count(&self) -> usize {
        self.classes
            .as_ref()
            .map(|c| c.iter().filter(|k| matches!(k, EigenClass::Pair(_))).count() / 2)
            .unwrap_or(0)
    }

    pub fn is_real(&self, k: usize) -> bool {
        matches!(self.classes.as_ref().map(|c| c[k]), Some(EigenClass::Real))
    }
}

/// `tol_im = tol_pair = 1e-8 ‖A‖_F`.
pub fn default_tolerances(matrix_norm: f64) -> (f64, f64) {
    (1e-8 * matrix_norm, 1e-8 * matrix_norm)
}

/// All eigenpairs of `a` via a complex Schur form; eigenvectors from
/// back-substitution on the triangular factor.
pub fn eig_dense(a: &ComplexMatrix) -> Result<SpectrumReport> {
    let n = a.dim;
    if n > MAX_DIM {
        return Err(EigenError::TooLarge(n));
    }
    a.check_finite()?;
    let norm = a.frobenius_norm();
    let (tol_im, tol_pair) = default_tolerances(norm);
    if n == 0 {
        return Ok(SpectrumReport {
            eigenvalues: vec![],
            eigenvectors: vec![],
            classes: None,
            tol_im,
            tol_pair,
            matrix_norm: norm,
        });
    }
    let m = DMatrix::from_row_slice(n, n, &a.data);
    let max_iter = 200 * n.max(10);
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, max_iter)
        .ok_or(EigenError::NotConverged { iterations: max_iter })?;
    let (q, t) = schur.unpack();

    // A real Schur-style 2x2 block would leave a subdiagonal entry; over the
    // complex field the factor should be triangular.
    for i in 1..n {
        if t[(i, i - 1)].norm() > 1e-12 * norm.max(f64::MIN_POSITIVE) {
            return Err(EigenError::NotConverged { iterations: max_iter });
        }
    }

    let smin = (f64::EPSILON * norm).max(f64::MIN_POSITIVE);
    let mut pairs: Vec<(Complex, Vec<Complex>)> = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = DVector::<Complex>::zeros(n);
        y[k] = Complex::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = t[(i, k)];
            for j in i + 1..k {
                s += t[(i, j)] * y[j];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < smin {
                d = Complex::new(smin, 0.0);
            }
            y[i] = -s / d;
        }
        let v = &q * y;
        let nv = v.norm();
        let v: Vec<Complex> = v.iter().map(|z| z / nv).collect();
        pairs.push((lambda, v));
    }
    pairs.sort_by(|x, y| {
        x.0.re
            .partial_cmp(&y.0.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.0.im.partial_cmp(&y.0.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    Ok(SpectrumReport { eigenvalues, eigenvectors, classes: None, tol_im, tol_pair, matrix_norm: norm })
}

/// Tag each eigenvalue REAL (`|Im| <= tol_im`) or pair it with the closest
/// conjugate within `tol_pair`. An unpaired complex eigenvalue is an error.
pub fn classify(mut report: SpectrumReport, tol_im: f64, tol_pair: f64) -> Result<SpectrumReport> {
    let ev = &report.eigenvalues;
    let n = ev.len();
    let mut classes: Vec<Option<EigenClass>> = ev
        .iter()
        .map(|z| if z.im.abs() <= tol_im { Some(EigenClass::Real) } else { None })
        .collect();
    // candidate couples ordered by conjugate distance, then greedy matching
    let mut cands: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        if classes[i].is_some() || ev[i].im <= 0.0 {
            continue;
        }
        for j in 0..n {
            if classes[j].is_some() || ev[j].im >= 0.0 {
                continue;
            }
            let d = (ev[i] - ev[j].conj()).norm();
            if d <= tol_pair {
                cands.push((d, i, j));
            }
        }
    }
    cands.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    for (_, i, j) in cands {
        if classes[i].is_none() && classes[j].is_none() {
            classes[i] = Some(EigenClass::Pair(j));
            classes[j] = Some(EigenClass::Pair(i));
        }
    }
    let mut out = Vec::with_capacity(n);
    for (index, c) in classes.into_iter().enumerate() {
        match c {
            Some(c) => out.push(c),
            None => return Err(EigenError::Unmatched { index, value: ev[index], tol_pair }),
        }
    }
    report.classes = Some(out);
    report.tol_im = tol_im;
    report.tol_pair = tol_pair;
    Ok(report)
}

/// [`eig_dense`] followed by [`classify`] at the default tolerances.
pub fn eig_classified(a: &ComplexMatrix) -> Result<SpectrumReport> {
    let report = eig_dense(a)?;
    let (ti, tp) = (report.tol_im, report.tol_pair);
    classify(report, ti, tp)
}

/// `‖A v − λ v‖₂`.
pub fn residual_norm(a: &ComplexMatrix, lambda: Complex, v: &[Complex]) -> f64 {
    a.mul_vec(v)
        .iter()
        .zip(v)
        .map(|(av, x)| (av - lambda * x).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn bare(eigenvalues: Vec<Complex>) -> SpectrumReport {
        SpectrumReport {
            eigenvectors: vec![vec![]; eigenvalues.len()],
            eigenvalues,
            classes: None,
            tol_im: 0.0,
            tol_pair: 0.0,
            matrix_norm: 1.0,
        }
    }

    #[test]
    fn diagonal_spectrum() {
        let a = ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]);
        let r = eig_dense(&a).unwrap();
        let re: Vec<f64> = r.eigenvalues.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![1.0, 2.0, 3.0]);
        for (l, v) in r.eigenvalues.iter().zip(&r.eigenvectors) {
            assert!(residual_norm(&a, *l, v) == 0.0);
        }
    }

    #[test]
    fn antidiagonal_imaginary() {
        let a = ComplexMatrix::from_row_major(2, vec![c(0., 0.), c(0., 1.), c(0., 1.), c(0., 0.)]).unwrap();
        let r = eig_classified(&a).unwrap();
        assert!((r.eigenvalues[0] - c(0., -1.)).norm() < 1e-14);
        assert!((r.eigenvalues[1] - c(0., 1.)).norm() < 1e-14);
        assert_eq!(r.classes.unwrap(), vec![EigenClass::Pair(1), EigenClass::Pair(0)]);
    }

    #[test]
    fn two_by_two_quadratic_formula() {
        let (d1, d2, g) = (2.4674, 9.8696, 0.36025);
        let a = ComplexMatrix::from_row_major(2, vec![c(d1, 0.), c(0., g), c(0., g), c(d2, 0.)]).unwrap();
        let r = eig_classified(&a).unwrap();
        let mean = 0.5 * (d1 + d2);
        let root = (0.25 * (d2 - d1).powi(2) - g * g).sqrt();
        assert!((r.eigenvalues[0] - c(mean - root, 0.)).norm() < 1e-12);
        assert!((r.eigenvalues[1] - c(mean + root, 0.)).norm() < 1e-12);
        assert!((r.eigenvalues[0].re - 2.4850).abs() < 1e-4);
        assert!((r.eigenvalues[1].re - 9.8520).abs() < 1e-4);
        assert_eq!(r.pair_count(), 0);
    }

    #[test]
    fn classify_examples() {
        let r = classify(bare(vec![c(1., 0.), c(2., 1e-14)]), 1e-10, 1e-10).unwrap();
        assert_eq!(r.classes.unwrap(), vec![EigenClass::Real, EigenClass::Real]);
        let r = classify(bare(vec![c(1., -2.), c(1., 2.)]), 1e-10, 1e-10).unwrap();
        assert_eq!(r.classes.unwrap(), vec![EigenClass::Pair(1), EigenClass::Pair(0)]);
        let err = classify(bare(vec![c(1., 2.), c(1.5, -2.)]), 1e-10, 1e-10).unwrap_err();
        assert!(matches!(err, EigenError::Unmatched { .. }));
    }

    #[test]
    fn rejects_bad_input() {
        let mut a = ComplexMatrix::zeros(2);
        a[(1, 0)] = c(f64::NAN, 0.);
        assert_eq!(eig_dense(&a).unwrap_err(), EigenError::NonFinite { row: 1, col: 0 });
        assert!(matches!(eig_dense(&ComplexMatrix::zeros(MAX_DIM + 1)), Err(EigenError::TooLarge(_))));
        assert!(ComplexMatrix::from_row_major(2, vec![c(0., 0.); 3]).is_err());
    }
}
