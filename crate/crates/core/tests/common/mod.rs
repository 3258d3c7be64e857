//! Independent oracles shared by the integration and acceptance tests. Nothing
//! here calls into the crate under test.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// `1/g` for `g = 2 / (1 + a sin 2 pi theta)`.
pub fn sine_inv_g(a: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| 0.5 * (1.0 + a * (std::f64::consts::TAU * t).sin())
}

/// Dense matrix of the discretised adjoint transfer operator at `level`:
/// entry `(j, a)` is the weight with which arc `a` feeds arc `j`, namely
/// `1/g` at the midpoint of the half of arc `j` that `x -> 2x` maps onto `a`.
pub fn dense_adjoint(level: u32, inv_g: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let n = 1usize << level;
    let h = 1.0 / n as f64;
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        for half in 0..2 {
            let lo = j as f64 * h + half as f64 * h / 2.0;
            let image = ((2.0 * lo * n as f64).round() as usize) % n;
            m[(j, image)] += inv_g(lo + h / 4.0);
        }
    }
    m
}

/// The probability vector spanning `ker(A - I)`, by a direct solve with one
/// equation replaced by the mass constraint.
pub fn dense_fixed_point(a: &DMatrix<f64>) -> DVector<f64> {
    let n = a.nrows();
    let mut sys = a - DMatrix::identity(n, n);
    let mut rhs = DVector::zeros(n);
    for c in 0..n {
        sys[(n - 1, c)] = 1.0;
    }
    rhs[n - 1] = 1.0;
    sys.lu().solve(&rhs).expect("the fixed point is unique")
}

/// `int_0^1 |Q_a(p) - Q_b(p)| dp` for the quantile functions of two densities
/// constant on `n` equal cells of `[0, 1)`. Both quantile functions are
/// piecewise linear in `p`, so the integral is exact on the merged breakpoints.
pub fn quantile_transport_w1(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    assert_eq!(n, b.len());
    let norm = |w: &[f64]| {
        let s: f64 = w.iter().sum();
        w.iter().map(|x| x / s).collect::<Vec<_>>()
    };
    let (a, b) = (norm(a), norm(b));
    let cum = |w: &[f64]| {
        let mut c = vec![0.0];
        for x in w {
            c.push(c.last().unwrap() + x);
        }
        *c.last_mut().unwrap() = 1.0;
        c
    };
    let (ca, cb) = (cum(&a), cum(&b));
    // left limit: first positive cell with c[j+1] >= p; right limit: with c[j+1] > p
    let quantile = |w: &[f64], c: &[f64], p: f64, right: bool| -> f64 {
        let hit = (0..n).find(|&j| w[j] > 0.0 && if right { c[j + 1] > p } else { c[j + 1] >= p });
        match hit {
            Some(j) => (j as f64 + ((p - c[j]) / w[j]).clamp(0.0, 1.0)) / n as f64,
            None => 1.0,
        }
    };
    let mut ps: Vec<f64> = ca.iter().chain(cb.iter()).copied().collect();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    let mut total = 0.0;
    for k in 0..ps.len() - 1 {
        let (p0, p1) = (ps[k], ps[k + 1]);
        if p1 <= p0 {
            continue;
        }
        let d0 = quantile(&a, &ca, p0, true) - quantile(&b, &cb, p0, true);
        let d1 = quantile(&a, &ca, p1, false) - quantile(&b, &cb, p1, false);
        let h = p1 - p0;
        total += if d0 * d1 >= 0.0 {
            0.5 * h * (d0.abs() + d1.abs())
        } else {
            0.5 * h * (d0 * d0 + d1 * d1) / (d0.abs() + d1.abs())
        };
    }
    total
}

/// Upper `alpha` point of the chi-square law with `dof` degrees of freedom.
pub fn chi_square_critical(dof: f64, alpha: f64) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    ChiSquared::new(dof).expect("positive degrees of freedom").inverse_cdf(1.0 - alpha)
}

/// Pearson statistic of `counts` against equal expected counts.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let e = n as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum()
}
