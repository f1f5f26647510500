mod common;

use nhspec::basis::*;
use proptest::prelude::*;

/// Hermite functions from the physicists' polynomials and explicit factorial
/// normalization; only valid for small n, which is all we need.
fn hermite_oracle(alpha: f64, n: usize, x: f64) -> f64 {
    let y = alpha.sqrt() * x;
    let (mut h0, mut h1) = (1.0, 2.0 * y);
    let h = if n == 0 {
        h0
    } else {
        for k in 1..n {
            let h2 = 2.0 * y * h1 - 2.0 * k as f64 * h0;
            h0 = h1;
            h1 = h2;
        }
        h1
    };
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    (alpha / std::f64::consts::PI).powf(0.25) * h * (-0.5 * y * y).exp() / (2f64.powi(n as i32) * fact).sqrt()
}

#[test]
fn laguerre_orthogonality_by_quadrature() {
    for c in [1.0, 0.5, 0.59] {
        let spec = LaguerreBasisSpec::new(c, 15).unwrap();
        let (xs, ws) = common::discretize(c, 0.0, f64::INFINITY, 0.1, 40);
        let vals: Vec<Vec<f64>> = xs
            .iter()
            .map(|&x| (1..=15).map(|n| laguerre_eval(&spec, n, x).unwrap()).collect())
            .collect();
        for m in 1..=15 {
            for n in 1..=15 {
                let ip: f64 = xs
                    .iter()
                    .zip(&ws)
                    .zip(&vals)
                    .map(|((x, w), v)| v[m - 1] * v[n - 1] * x * x * w)
                    .sum();
                let nm = laguerre_norm(&spec, m).unwrap();
                let nn = laguerre_norm(&spec, n).unwrap();
                if m == n {
                    assert!((ip / nm - 1.0).abs() < 1e-9, "c={c} N_{m}: {ip} vs {nm}");
                } else {
                    assert!(ip.abs() < 1e-9 * (nm * nn).sqrt(), "c={c} <{m},{n}> = {ip:e}");
                }
            }
        }
    }
}

#[test]
fn orthonormal_values_have_unit_norm() {
    let spec = LaguerreBasisSpec::new(0.8, 12).unwrap();
    let (xs, ws) = common::discretize(0.8, 0.0, f64::INFINITY, 0.1, 40);
    let mut gram = vec![vec![0.0; 12]; 12];
    for (&x, &w) in xs.iter().zip(&ws) {
        let f = spec.orthonormal_values(x);
        for i in 0..12 {
            for j in 0..12 {
                gram[i][j] += f[i] * f[j] * x * x * w;
            }
        }
    }
    for (i, row) in gram.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let e = if i == j { 1.0 } else { 0.0 };
            assert!((v - e).abs() < 1e-9, "({i},{j}) {v}");
        }
    }
}

/// H0 = -(D^2 + (2/x)D)/2 + c x D applied by central differences, h = 1e-4.
#[test]
fn h0_eigen_relation_by_finite_differences() {
    let spec = LaguerreBasisSpec::new(1.0, 3).unwrap();
    let f = |x: f64| laguerre_eval(&spec, 3, x).unwrap();
    let h = 1e-4;
    for x in [0.5, 1.0, 2.0] {
        let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
        let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        let h0 = -0.5 * (d2 + 2.0 / x * d1) + spec.c * x * d1;
        let expect = h0_diagonal(&spec, 3).unwrap() * f(x);
        assert!((h0 - expect).abs() < 1e-5, "x={x}: {h0} vs {expect}");
    }
}

#[test]
fn h0_relation_holds_for_all_members_analytically() {
    let spec = LaguerreBasisSpec::new(0.7, 20).unwrap();
    for x in [0.1, 0.9, 2.2, 4.0] {
        let v = spec.orthonormal_with_derivatives(x);
        for m in 0..20 {
            let h0 = -0.5 * (v.d2[m] + 2.0 / x * v.d1[m]) + spec.c * x * v.d1[m];
            let e = h0_diagonal(&spec, m + 1).unwrap() * v.value[m];
            assert!((h0 - e).abs() < 1e-9 * (1.0 + e.abs()), "m={m} x={x}");
        }
    }
}

proptest! {
    #[test]
    fn laguerre_derivatives_match_differences(c in 0.3f64..2.0, x in 0.05f64..3.0) {
        let spec = LaguerreBasisSpec::new(c, 10).unwrap();
        let h = 1e-5;
        let v = spec.orthonormal_with_derivatives(x);
        let p = spec.orthonormal_values(x + h);
        let q = spec.orthonormal_values(x - h);
        for m in 0..10 {
            let d1 = (p[m] - q[m]) / (2.0 * h);
            let d2 = (p[m] - 2.0 * v.value[m] + q[m]) / (h * h);
            let scale = 1.0 + v.value[m].abs() + v.d1[m].abs() + v.d2[m].abs();
            prop_assert!((d1 - v.d1[m]).abs() < 1e-6 * scale);
            prop_assert!((d2 - v.d2[m]).abs() < 1e-3 * scale);
        }
    }
}

#[test]
fn laguerre_norm_matches_quadrature() {
    let spec = LaguerreBasisSpec::new(1.3, 10).unwrap();
    let (xs, ws) = common::discretize(1.3, 0.0, f64::INFINITY, 0.1, 40);
    for n in 1..=10 {
        let q: f64 = xs
            .iter()
            .zip(&ws)
            .map(|(&x, w)| laguerre_eval(&spec, n, x).unwrap().powi(2) * x * x * w)
            .sum();
        let closed = laguerre_norm(&spec, n).unwrap();
        assert!((q / closed - 1.0).abs() < 1e-9, "n={n}");
    }
}

#[test]
fn hermite_values_match_oracle() {
    for alpha in [1.0, 2.0, 0.6] {
        let spec = HermiteBasisSpec::new(alpha, 21).unwrap();
        for i in 0..=40 {
            let x = -5.0 + 0.25 * i as f64;
            let v = spec.values(21, x);
            for n in 0..=20 {
                assert!((v[n] - hermite_oracle(alpha, n, x)).abs() < 1e-12, "α={alpha} n={n} x={x}");
            }
        }
    }
}

#[test]
fn hermite_orthonormality_by_quadrature() {
    let spec = HermiteBasisSpec::new(1.0, 21).unwrap();
    let (xs, ws) = common::discretize(0.0, -15.0, 15.0, 0.25, 40);
    let vals: Vec<Vec<f64>> = xs.iter().map(|&x| spec.values(21, x)).collect();
    for m in 0..=20 {
        for n in 0..=20 {
            let ip: f64 = ws.iter().zip(&vals).map(|(w, v)| v[m] * v[n] * w).sum();
            let e = if m == n { 1.0 } else { 0.0 };
            assert!((ip - e).abs() < 1e-10, "<{m},{n}> = {ip}");
        }
    }
    let p35: f64 = ws.iter().zip(&vals).map(|(w, v)| v[3] * v[5] * w).sum();
    assert!(p35.abs() < 1e-10);
}

#[test]
fn hermite_recurrence_pointwise() {
    let alpha = 1.4;
    let spec = HermiteBasisSpec::new(alpha, 17).unwrap();
    let table = hermite_x_action(&spec).unwrap();
    for i in 0..=100 {
        let x = -5.0 + 0.1 * i as f64;
        for n in 0..=15 {
            let lhs = x * hermite_oracle(alpha, n, x);
            let rhs: f64 = table
                .iter()
                .filter(|c| c.col == n)
                .map(|c| c.value * hermite_oracle(alpha, c.row, x))
                .sum();
            assert!((lhs - rhs).abs() < 1e-10, "n={n} x={x}");
        }
    }
}

#[test]
fn x_action_element_by_quadrature() {
    let alpha = 2.0;
    let spec = HermiteBasisSpec::new(alpha, 5).unwrap();
    let (xs, ws) = common::discretize(0.0, -12.0, 12.0, 0.25, 40);
    let ip: f64 = xs
        .iter()
        .zip(&ws)
        .map(|(&x, w)| {
            let v = spec.values(4, x);
            x * v[2] * v[3] * w
        })
        .sum();
    assert!((ip - 3f64.sqrt() / (2.0 * alpha).sqrt()).abs() < 1e-9);
    let table = hermite_x_action(&spec).unwrap();
    let t = table.iter().find(|c| c.row == 3 && c.col == 2).unwrap();
    assert!((t.value - ip).abs() < 1e-9);
}

#[test]
fn kinetic_by_finite_differences() {
    let spec = HermiteBasisSpec::new(1.0, 5).unwrap();
    let table = hermite_kinetic(&spec);
    let x = 0.7;
    let h = 1e-4;
    let f = |t: f64| hermite_oracle(1.0, 4, t);
    let fd = -(f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    let expand: f64 = table
        .iter()
        .filter(|c| c.col == 4)
        .map(|c| c.value * hermite_oracle(1.0, c.row, x))
        .sum();
    assert!((fd - expand).abs() < 1e-5, "{fd} vs {expand}");
}

#[test]
fn kinetic_with_general_alpha_by_quadrature() {
    // <phi_m| -D^2 |phi_n> = <phi_m'|phi_n'>, checked for α != 1
    let alpha = 2.5;
    let spec = HermiteBasisSpec::new(alpha, 10).unwrap();
    let table = hermite_kinetic(&spec);
    let (xs, ws) = common::discretize(0.0, -10.0, 10.0, 0.1, 40);
    let h = 1e-5;
    for c in table.iter().filter(|c| c.row < 10) {
        let ip: f64 = xs
            .iter()
            .zip(&ws)
            .map(|(&x, w)| {
                let dm = (hermite_oracle(alpha, c.row, x + h) - hermite_oracle(alpha, c.row, x - h)) / (2.0 * h);
                let dn = (hermite_oracle(alpha, c.col, x + h) - hermite_oracle(alpha, c.col, x - h)) / (2.0 * h);
                dm * dn * w
            })
            .sum();
        assert!((ip - c.value).abs() < 1e-6, "({},{}) {ip} vs {}", c.row, c.col, c.value);
    }
}

#[test]
fn power_couplings_match_quadrature() {
    let alpha = 1.0;
    let spec = HermiteBasisSpec::new(alpha, 8).unwrap();
    let table = hermite_power_couplings(&spec, 3);
    let (xs, ws) = common::discretize(0.0, -15.0, 15.0, 0.25, 40);
    for row in 0..12 {
        for col in 0..8 {
            let ip: f64 = xs
                .iter()
                .zip(&ws)
                .map(|(&x, w)| {
                    let v = spec.values(12, x);
                    x.powi(3) * v[row] * v[col] * w
                })
                .sum();
            let got: f64 = table.iter().filter(|c| c.row == row && c.col == col).map(|c| c.value).sum();
            assert!((ip - got).abs() < 1e-9, "({row},{col}) {ip} vs {got}");
            if (row as i64 - col as i64).abs() > 3 {
                assert_eq!(got, 0.0);
            }
        }
    }
}

#[test]
fn box_elements_match_numeric_quadrature() {
    for t in [1.0, 5.0, 15.0] {
        let spec = BoxBasisSpec::new(t, 12).unwrap();
        let (xs, ws) = common::discretize(0.0, -t, t, 0.25, 40);
        for m in [1u32, 3] {
            for i in 1..=12 {
                for j in 1..=12 {
                    let closed = box_matrix_element(&spec, m, i, j).unwrap();
                    let numeric: f64 = xs
                        .iter()
                        .zip(&ws)
                        .map(|(&x, w)| x.powi(m as i32) * spec.eval(i, x).unwrap() * spec.eval(j, x).unwrap() * w)
                        .sum();
                    assert!(
                        (closed - numeric).abs() < 1e-10,
                        "T={t} m={m} ({i},{j}): {closed} vs {numeric}"
                    );
                    if BoxBasisSpec::is_cosine(i) == BoxBasisSpec::is_cosine(j) {
                        assert_eq!(closed, 0.0);
                    } else {
                        assert_ne!(closed, 0.0);
                    }
                }
            }
        }
    }
}

#[test]
fn box_basis_is_orthonormal() {
    let t = 5.0;
    let spec = BoxBasisSpec::new(t, 10).unwrap();
    for i in 1..=10 {
        for j in 1..=10 {
            let f = |x: f64| spec.eval(i, x).unwrap() * spec.eval(j, x).unwrap();
            let ip = common::adaptive(&f, -t, t, 1e-13);
            let e = if i == j { 1.0 } else { 0.0 };
            assert!((ip - e).abs() < 1e-10);
        }
    }
}

#[test]
fn box_elements_scale_with_width() {
    let a = BoxBasisSpec::new(3.0, 10).unwrap();
    let b = BoxBasisSpec::new(6.0, 10).unwrap();
    for i in 1..=10 {
        for j in 1..=10 {
            for (m, factor) in [(1u32, 2.0), (3, 8.0)] {
                let va = box_matrix_element(&a, m, i, j).unwrap();
                let vb = box_matrix_element(&b, m, i, j).unwrap();
                assert!((vb - factor * va).abs() <= 1e-13 * vb.abs().max(1.0));
            }
        }
    }
}
