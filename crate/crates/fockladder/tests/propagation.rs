//! Propagator identities: unitarity, the m = 0 semigroup relation, kernel consistency at
//! complex points, the derivative relation and closed forms against direct quadrature.

mod common;

use common::{c, families, ZERO};
use fockladder::coherent::strip_for;
use fockladder::measure::{normalize, SpectralMeasure};
use fockladder::orthopoly::{eval_all, recurrence, JacobiSystem};
use fockladder::quad::QuadTol;
use fockladder::propagator::{sigma_mn, sigma_n, unitarity_sum, PropagatorContext};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Σₖ f(k) summed until 10 consecutive terms fall below 1e-20 in modulus.
fn series(f: impl Fn(usize) -> Complex64) -> Complex64 {
    let mut acc = ZERO;
    let mut quiet = 0;
    for k in 0..2000 {
        let term = f(k);
        acc += term;
        quiet = if term.norm() < 1e-20 { quiet + 1 } else { 0 };
        if k > 5 && quiet > 10 {
            return acc;
        }
    }
    panic!("series did not settle in 2000 terms");
}

#[test]
fn semigroup_from_the_vacuum_row() {
    let (t1, t2) = (c(0.3, 0.0), c(0.7, 0.0));
    for (name, pd) in families() {
        let ctx = PropagatorContext::new(&pd);
        for n in 0..=5 {
            let sum = series(|k| sigma_n(&ctx, k, t1).unwrap() * sigma_mn(&ctx, k, n, t2).unwrap());
            let direct = sigma_n(&ctx, n, t1 + t2).unwrap();
            assert!((sum - direct).norm() < 1e-8, "{name} n={n}: {sum} vs {direct}");
        }
    }
}

#[test]
fn kernel_consistency_at_complex_points() {
    let points = [(c(0.4, -0.2), c(0.3, 0.1)), (c(-0.7, 0.15), c(1.1, 0.1)), (c(0.2, -0.3), c(-0.5, -0.25))];
    for (name, pd) in families() {
        let ctx = PropagatorContext::new(&pd);
        let strip = strip_for(&pd);
        for &(z1, z2) in &points {
            assert!(strip.contains(z1.im) && strip.contains(z2.im), "{name}: sample points outside the strip");
            let sum = series(|k| sigma_n(&ctx, k, z1).unwrap() * sigma_n(&ctx, k, z2).unwrap());
            let direct = ctx.char_fn(z1 + z2).unwrap();
            assert!((sum - direct).norm() < 1e-8, "{name} z1={z1} z2={z2}: {sum} vs {direct}");
        }
    }
}

/// Monomial coefficients of P_0..P_m from the three-term recurrence.
fn poly_coeffs(js: &JacobiSystem, m: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![1.0]];
    for k in 0..m {
        let cur = &out[k];
        let mut next = vec![0.0; k + 2];
        for (i, &a) in cur.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= js.h(k) * a;
        }
        if k > 0 {
            for (i, &a) in out[k - 1].iter().enumerate() {
                next[i] -= js.b(k) * a;
            }
        }
        let bk1 = js.b(k + 1);
        out.push(next.into_iter().map(|x| x / bk1).collect());
    }
    out
}

/// Derivatives of order 0..=order at t by central differences with Richardson extrapolation.
fn derivatives(f: impl Fn(f64) -> Complex64, t: f64, order: usize) -> Vec<Complex64> {
    let binom = |n: usize, k: usize| (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
    let mut out = vec![f(t)];
    for n in 1..=order {
        let central = |h: f64| -> Complex64 {
            let mut acc = ZERO;
            for k in 0..=n {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                acc += f(t + (0.5 * n as f64 - k as f64) * h) * (sign * binom(n, k));
            }
            acc / h.powi(n as i32)
        };
        const LEVELS: usize = 4;
        let mut table: Vec<Vec<Complex64>> = Vec::new();
        for j in 0..LEVELS {
            let mut row = vec![central(0.08 / 2f64.powi(j as i32))];
            for k in 1..=j {
                let v = row[k - 1] + (row[k - 1] - table[j - 1][k - 1]) / (4f64.powi(k as i32) - 1.0);
                row.push(v);
            }
            table.push(row);
        }
        out.push(table[LEVELS - 1][LEVELS - 1]);
    }
    out
}

#[test]
fn derivative_relation_by_finite_differences() {
    for (name, pd) in families() {
        let ctx = PropagatorContext::new(&pd);
        let coeffs = poly_coeffs(&recurrence(&pd), 3);
        for n in 0..=4 {
            for t in [-1.3, 0.0, 0.6, 2.1] {
                let d = derivatives(|s| sigma_n(&ctx, n, c(s, 0.0)).unwrap(), t, 3);
                for (m, p) in coeffs.iter().enumerate() {
                    // P_m(i d/dt) applied term by term.
                    let via_derivative: Complex64 =
                        p.iter().enumerate().map(|(k, &a)| Complex64::i().powu(k as u32) * d[k] * a).sum();
                    let direct = sigma_mn(&ctx, m, n, c(t, 0.0)).unwrap();
                    let err = (via_derivative - direct).norm();
                    assert!(err < 1e-6, "{name} m={m} n={n} t={t}: {via_derivative} vs {direct} ({err:.2e})");
                }
            }
        }
    }
}

/// ∫ e^{−itω} P_m P_n dσ by adaptive quadrature of the weight.
fn quadrature(sm: &SpectralMeasure, js: &JacobiSystem, m: usize, n: usize, t: f64) -> Complex64 {
    let tol = QuadTol { abs: 1e-13, rel: 1e-12, max_intervals: 20_000 };
    sm.integrate(
        |w: f64| {
            let p = eval_all(js, m.max(n), w, 1.0);
            (-Complex64::i() * t * w).exp() * (p[m] * p[n])
        },
        &tol,
    )
    .unwrap()
}

#[test]
fn closed_forms_match_quadrature_at_random_times() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (name, pd) in families() {
        let ctx = PropagatorContext::new(&pd);
        let (sm, js) = (normalize(&pd), recurrence(&pd));
        for _ in 0..10 {
            let t = rng.random_range(-3.0..3.0);
            for m in 0..=6 {
                for n in 0..=6 {
                    let closed = sigma_mn(&ctx, m, n, c(t, 0.0)).unwrap();
                    let quad = quadrature(&sm, &js, m, n, t);
                    assert!((closed - quad).norm() < 1e-9, "{name} m={m} n={n} t={t}: {closed} vs {quad}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rows_have_unit_norm(fam in 0usize..5, n in 0usize..=10, t in -5.0f64..5.0) {
        let (name, pd) = families().swap_remove(fam);
        let ctx = PropagatorContext::new(&pd);
        let (s, _) = unitarity_sum(&ctx, n, t, 5000).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-8, "{} n={} t={}: {}", name, n, t, s);
    }

    #[test]
    fn propagator_is_symmetric_and_inverted_by_negative_time(
        fam in 0usize..5, m in 0usize..8, n in 0usize..8, t in -3.0f64..3.0,
    ) {
        let (name, pd) = families().swap_remove(fam);
        let ctx = PropagatorContext::new(&pd);
        let z = c(t, 0.0);
        let mn = sigma_mn(&ctx, m, n, z).unwrap();
        let nm = sigma_mn(&ctx, n, m, z).unwrap();
        prop_assert!((mn - nm).norm() < 1e-12, "{} symmetry {} vs {}", name, mn, nm);
        // σ̂(−t) = σ̂(t)*, so Σₖ σ̂ₘₖ(t)σ̂ₖₙ(−t) = δₘₙ.
        let back = series(|k| sigma_mn(&ctx, m, k, z).unwrap() * sigma_mn(&ctx, k, n, -z).unwrap());
        let want = if m == n { 1.0 } else { 0.0 };
        prop_assert!((back - c(want, 0.0)).norm() < 1e-8, "{} m={} n={} t={}: {}", name, m, n, t, back);
    }
}
