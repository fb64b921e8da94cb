//! Orthonormal polynomials against independent constructions: Gram–Schmidt under
//! adaptive quadrature, Rodrigues' formula by numerical differentiation, and the
//! number-operator form of the differential equation.

mod common;

use common::families;
use fockladder::measure::{density, normalize, SpectralMeasure};
use fockladder::orthopoly::{eval_poly, ode_residual, recurrence, rodrigues_constant, Family, PearsonData};
use fockladder::quad::QuadTol;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Interior sample points, kept away from finite endpoints.
fn interior_points(pd: &PearsonData, count: usize) -> Vec<f64> {
    let (lo, hi) = match pd.family {
        Family::Hermite => (-2.5, 2.5),
        Family::Laguerre => (pd.support.0 + 0.4, pd.support.0 + 5.0),
        Family::Jacobi => {
            let (a, b) = pd.support;
            (a + 0.25 * (b - a), b - 0.25 * (b - a))
        }
    };
    (0..count).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / count as f64).collect()
}

/// Centre and scale of a variable x = (ω − c)/s with x = O(1) on the bulk of the measure.
fn centring(pd: &PearsonData) -> (f64, f64) {
    match pd.family {
        Family::Hermite => (-pd.a0 / pd.a1, pd.hermite_v().sqrt()),
        Family::Laguerre => {
            let beta = pd.laguerre_beta();
            (pd.support.0 + pd.mu() / beta, pd.mu().sqrt() / beta)
        }
        Family::Jacobi => {
            let (a, b) = pd.support;
            (0.5 * (a + b), 0.5 * (b - a))
        }
    }
}

/// Orthonormal polynomials from Gram–Schmidt on the span of 1, x, …, xⁿ, returned as
/// coefficient vectors in x. Each new candidate is x·q_{n−1}, orthogonalized against
/// every earlier polynomial; inner products use adaptive quadrature of the weight.
fn gram_schmidt(sm: &SpectralMeasure, n_max: usize) -> Vec<Vec<f64>> {
    let (c0, s) = centring(&sm.pd);
    let tol = QuadTol { abs: 1e-13, rel: 1e-12, max_intervals: 20_000 };
    let eval = |p: &[f64], w: f64| p.iter().rev().fold(0.0, |acc, &k| acc * ((w - c0) / s) + k);
    let ip = |p: &[f64], q: &[f64]| -> f64 { sm.integrate(|w: f64| eval(p, w) * eval(q, w), &tol).unwrap() / sm.mass() };
    let mut out: Vec<Vec<f64>> = Vec::new();
    for n in 0..=n_max {
        let mut p = vec![0.0; n + 1];
        match out.last() {
            None => p[0] = 1.0,
            Some(q) => p[1..].copy_from_slice(q),
        }
        // Two passes of modified Gram–Schmidt.
        for _ in 0..2 {
            for q in &out {
                let proj = ip(&p, q);
                for (pi, qi) in p.iter_mut().zip(q) {
                    *pi -= proj * qi;
                }
            }
        }
        let nrm = ip(&p, &p).sqrt();
        out.push(p.into_iter().map(|x| x / nrm).collect());
    }
    out
}

#[test]
fn eval_poly_matches_gram_schmidt() {
    for (name, pd) in families() {
        let sm = normalize(&pd);
        let js = recurrence(&pd);
        let (c0, s) = centring(&pd);
        let polys = gram_schmidt(&sm, 10);
        for (n, p) in polys.iter().enumerate() {
            for w in interior_points(&pd, 5) {
                let x = (w - c0) / s;
                let oracle = p.iter().rev().fold(0.0, |acc, &k| acc * x + k);
                let (got, _, _) = eval_poly(&js, n, w, 1.0).unwrap();
                let err = (got - oracle).abs() / oracle.abs().max(1.0);
                assert!(err < 1e-8, "{name} n={n} ω={w}: {got} vs {oracle} ({err:.2e})");
            }
        }
    }
}

/// n-th derivative by central differences with Richardson extrapolation in h².
fn nth_derivative(f: impl Fn(f64) -> f64, x: f64, n: usize, h0: f64) -> f64 {
    let binom = |n: usize, k: usize| (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
    let central = |h: f64| -> f64 {
        let mut acc = 0.0;
        for k in 0..=n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom(n, k) * f(x + (0.5 * n as f64 - k as f64) * h);
        }
        acc / h.powi(n as i32)
    };
    const LEVELS: usize = 4;
    let mut table: Vec<Vec<f64>> = Vec::new();
    for j in 0..LEVELS {
        let mut row = vec![central(h0 / 2f64.powi(j as i32))];
        for k in 1..=j {
            let f4 = 4f64.powi(k as i32);
            let v = row[k - 1] + (row[k - 1] - table[j - 1][k - 1]) / (f4 - 1.0);
            row.push(v);
        }
        table.push(row);
    }
    table[LEVELS - 1][LEVELS - 1]
}

#[test]
fn rodrigues_formula_by_numerical_differentiation() {
    for (name, pd) in families() {
        let sm = normalize(&pd);
        let js = recurrence(&pd);
        for n in 0..=5 {
            let cn = rodrigues_constant(&pd, n, sm.c).unwrap();
            let eps = pd.rodrigues_sign(n);
            for w in interior_points(&pd, 5) {
                let room = (w - pd.support.0).min(pd.support.1 - w).min(2.0);
                let h0 = if n == 0 { 0.1 } else { 0.8 * room / n as f64 }.min(0.4);
                let f = |x: f64| density(&sm, x) * pd.b_poly(x).powi(n as i32);
                let d = if n == 0 { f(w) } else { nth_derivative(f, w, n, h0) };
                let rod = eps * cn * d / density(&sm, w);
                let (p, _, _) = eval_poly(&js, n, w, 1.0).unwrap();
                let err = (rod - p).abs() / p.abs().max(1.0);
                assert!(err < 1e-5, "{name} n={n} ω={w}: Rodrigues {rod} vs {p} ({err:.2e})");
            }
        }
    }
}

#[test]
fn ode_residual_at_random_interior_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, pd) in families() {
        let js = recurrence(&pd);
        let pts = interior_points(&pd, 2);
        let (lo, hi) = (pts[0] - 0.2, pts[1] + 0.2);
        for _ in 0..10 {
            let w = rng.random_range(lo..hi);
            for n in 0..=8 {
                let (p, _, _) = eval_poly(&js, n, w, 1.0).unwrap();
                let r = ode_residual(&pd, &js, n, w).unwrap();
                assert!(r / p.abs().max(1.0) < 1e-9, "{name} n={n} ω={w}: residual {r:.2e}");
            }
        }
    }
}

#[test]
fn number_operator_in_spectral_form() {
    for (name, pd) in families() {
        let js = recurrence(&pd);
        for n in 0..=8 {
            for w in interior_points(&pd, 7) {
                let (p, dp, ddp) = eval_poly(&js, n, w, 1.0).unwrap();
                let nf = n as f64;
                let (lhs, rhs) = match pd.family {
                    // N = (ω + a₀/a₁) d/dω + (B/a₁) d²/dω².
                    Family::Hermite | Family::Laguerre => {
                        ((w + pd.a0 / pd.a1) * dp + pd.b_poly(w) / pd.a1 * ddp, nf * p)
                    }
                    // (ω−a)(b−ω) d² + [μb + νa − (μ+ν)ω] d has eigenvalue −n(n+μ+ν−1).
                    Family::Jacobi => {
                        let (a, b) = pd.support;
                        let (mu, nu) = (pd.mu(), pd.nu());
                        let op = (w - a) * (b - w) * ddp + (mu * b + nu * a - (mu + nu) * w) * dp;
                        (op, -nf * (nf + mu + nu - 1.0) * p)
                    }
                };
                let err = (lhs - rhs).abs() / rhs.abs().max(1.0);
                assert!(err < 1e-9, "{name} n={n} ω={w}: {lhs} vs {rhs}");
            }
        }
    }
}
