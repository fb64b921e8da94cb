//! Shared fixtures and independent truncated-Fock evaluations for integration tests.
#![allow(dead_code)]

use fockladder::fockoracle::{expm_evolve, TruncatedOperator};
use fockladder::orthopoly::{JacobiSystem, PearsonData};
use nalgebra::DVector;
use num_complex::Complex64;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Canonical members of every family plus an asymmetric Jacobi case.
pub fn families() -> Vec<(&'static str, PearsonData)> {
    vec![
        ("hermite", PearsonData::hermite_canonical()),
        ("laguerre(mu=1)", PearsonData::laguerre_canonical(1.0).unwrap()),
        ("laguerre(mu=2)", PearsonData::laguerre_canonical(2.0).unwrap()),
        ("legendre", PearsonData::legendre()),
        ("jacobi(1.7,2.4)", PearsonData::jacobi(-0.5, 2.0, 1.7, 2.4, 1.0).unwrap()),
    ]
}

pub fn basis(n: usize, dim: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; dim];
    v[n] = c(1.0, 0.0);
    v
}

/// e^{−|ζ|²/2} ζⁿ/√n! written out term by term.
pub fn gaussian_vector(zeta: Complex64, dim: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(dim);
    let mut term = c((-0.5 * zeta.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        if n > 0 {
            term = term * zeta / (n as f64).sqrt();
        }
        out.push(term);
    }
    out
}

/// e^{−izH}|0⟩ on the truncation, normalized: the spectral coherent state built from
/// the eigendecomposition of the truncated Jacobi matrix.
pub fn spectral_vector(op: &TruncatedOperator, z: Complex64) -> Vec<Complex64> {
    let (vals, vecs) = op.eigen().unwrap();
    let n = op.dim;
    let mut out = vec![ZERO; n];
    for (k, &lam) in vals.iter().enumerate() {
        let w = (-Complex64::i() * z * lam).exp() * vecs[(0, k)];
        for (i, o) in out.iter_mut().enumerate() {
            *o += w * vecs[(i, k)];
        }
    }
    normalize(out)
}

pub fn normalize(v: Vec<Complex64>) -> Vec<Complex64> {
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

pub fn evolve(op: &TruncatedOperator, v: &[Complex64], t: f64) -> Vec<Complex64> {
    expm_evolve(op, v, t).unwrap()
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// out[k−1] = f(k) v[k].
pub fn lower(v: &[Complex64], f: impl Fn(usize) -> f64) -> Vec<Complex64> {
    let mut out = vec![ZERO; v.len()];
    for k in 1..v.len() {
        out[k - 1] = v[k] * f(k);
    }
    out
}

pub fn lower_pow(v: &[Complex64], s: usize, f: impl Fn(usize) -> f64 + Copy) -> Vec<Complex64> {
    (0..s).fold(v.to_vec(), |acc, _| lower(&acc, f))
}

/// ⟨ψ|a*ʳaˢ|ψ⟩ by applying a directly.
pub fn oracle_correlation(psi: &[Complex64], r: usize, s: usize) -> Complex64 {
    let f = |k: usize| (k as f64).sqrt();
    inner(&lower_pow(psi, r, f), &lower_pow(psi, s, f))
}

/// ⟨ψ|A*ʳAˢ|ψ⟩ by applying A|n⟩ = b(n)|n−1⟩ directly.
pub fn oracle_cluster_correlation(js: &JacobiSystem, psi: &[Complex64], r: usize, s: usize) -> Complex64 {
    let f = |k: usize| js.b(k);
    inner(&lower_pow(psi, r, f), &lower_pow(psi, s, f))
}

pub fn oracle_number_moment(psi: &[Complex64], l: i32) -> f64 {
    psi.iter().enumerate().map(|(k, x)| (k as f64).powi(l) * x.norm_sqr()).sum()
}

pub fn oracle_energy(op: &TruncatedOperator, psi: &[Complex64]) -> f64 {
    inner(psi, &op.apply(psi)).re
}

pub fn to_dvector(v: &[Complex64]) -> DVector<Complex64> {
    DVector::from_column_slice(v)
}

/// Relative deviation scaled so that values near zero are compared absolutely.
pub fn scaled_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}
