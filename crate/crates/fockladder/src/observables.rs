//! Expectation values on number, Gaussian-coherent, spectral-coherent and finite
//! Fock states: H_I, occupation moments, boson and cluster correlations, moments
//! of the spectral annihilation operator, and the multi-mode scenario formulas.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::coherent::{coherent_coeffs_adaptive, mean_energy};
use crate::fockoracle::{expm_evolve, truncated_h};
use crate::orthopoly::{recurrence, Dim, Family, JacobiSystem, PearsonData};
use crate::propagator::{char_fn, sigma_mn, PropagatorContext};
use crate::reduction::{classify_reduced, mode_offsets, reduce, MultiModeSystem, ReducedClass, Sector};
use crate::specfun::{hyp_pfq, ln_binomial, ln_factorial};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Norm left out of a truncated state before padding.
const TAIL_TOL: f64 = 1e-14;
const MAX_LEN: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Number(usize),
    /// Eigenstate of the boson a on the ladder: e^{−|ζ|²/2} ζⁿ/√n!.
    GaussianCoherent(Complex64),
    /// |z⟩ = Σ σ̂ₙ(z)|n⟩, normalized by σ̂(2i Im z).
    SpectralCoherent(Complex64),
    Fock(Vec<Complex64>),
}

/// Which dynamics the Heisenberg operators carry: H_I only, or the full H = γ₀N + H_I.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picture {
    Interaction,
    Full,
}

/// Gaussian coherent amplitudes up to the point where the missing weight is below `tail`.
pub fn gaussian_coeffs(zeta: Complex64, tail: f64, cap: usize) -> Result<Vec<Complex64>> {
    let r2 = zeta.norm_sqr();
    let mut out = Vec::new();
    let mut acc = 0.0;
    let mut c = Complex64::new((-0.5 * r2).exp(), 0.0);
    for n in 0..cap {
        if n > 0 {
            c *= zeta / (n as f64).sqrt();
        }
        acc += c.norm_sqr();
        out.push(c);
        if n as f64 > r2 && 1.0 - acc < tail {
            return Ok(out);
        }
    }
    if cap < MAX_LEN {
        Ok(out)
    } else {
        Err(Error::NonConvergence { what: "Gaussian coherent amplitudes", terms: cap })
    }
}

fn normalized(mut v: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let n2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    if !(n2 > 0.0) || !n2.is_finite() {
        return Err(Error::Invalid("state is not normalizable".into()));
    }
    let s = 1.0 / n2.sqrt();
    v.iter_mut().for_each(|c| *c *= s);
    Ok(v)
}

fn ladder_cap(js: &JacobiSystem) -> usize {
    js.dim.cap(MAX_LEN)
}

/// Normalized ladder coefficients of the state at t = 0.
pub fn state_coeffs(ctx: &PropagatorContext, state: &QuantumState) -> Result<Vec<Complex64>> {
    state_coeffs_in(&ctx.js, Some(ctx), state)
}

fn state_coeffs_in(js: &JacobiSystem, ctx: Option<&PropagatorContext>, state: &QuantumState) -> Result<Vec<Complex64>> {
    match state {
        QuantumState::Number(n) => {
            if !js.dim.contains(*n) {
                return Err(Error::IndexOutOfRange { index: *n, dim: js.dim.cap(usize::MAX) });
            }
            let mut v = vec![ZERO; n + 1];
            v[*n] = Complex64::new(1.0, 0.0);
            Ok(v)
        }
        QuantumState::GaussianCoherent(zeta) => normalized(gaussian_coeffs(*zeta, TAIL_TOL, ladder_cap(js))?),
        QuantumState::SpectralCoherent(z) => {
            let ctx = ctx.ok_or_else(|| Error::Unsupported("spectral coherent state needs a family context".into()))?;
            let v = coherent_coeffs_adaptive(ctx, *z, TAIL_TOL, MAX_LEN)?;
            let total = char_fn(ctx, Complex64::new(0.0, 2.0 * z.im))?.re;
            let s = 1.0 / total.sqrt();
            Ok(v.into_iter().map(|c| c * s).collect())
        }
        QuantumState::Fock(c) => {
            if c.len() > js.dim.cap(usize::MAX) {
                return Err(Error::IndexOutOfRange { index: c.len() - 1, dim: js.dim.cap(usize::MAX) });
            }
            normalized(c.clone())
        }
    }
}

/// Ladder coefficients of e^{−iH_I t}|ψ⟩ (normalized), continued until the missing
/// norm is below 1e-14 (or 20 consecutive negligible terms) and then padded by a quarter of the length so that
/// polynomially weighted sums see the tail.
pub fn evolved_coeffs(ctx: &PropagatorContext, state: &QuantumState, t: f64) -> Result<Vec<Complex64>> {
    if let QuantumState::SpectralCoherent(z) = state {
        return state_coeffs(ctx, &QuantumState::SpectralCoherent(z + t));
    }
    let c0 = state_coeffs(ctx, state)?;
    if t == 0.0 {
        return Ok(c0);
    }
    let z = Complex64::new(t, 0.0);
    let cap = ladder_cap(&ctx.js);
    let mut out = Vec::new();
    let mut acc = 0.0;
    let mut stop = None;
    let mut quiet = 0;
    for k in 0..cap {
        let mut v = ZERO;
        for (n, c) in c0.iter().enumerate() {
            if *c != ZERO {
                v += c * sigma_mn(ctx, n, k, z)?;
            }
        }
        acc += v.norm_sqr();
        quiet = if v.norm_sqr() < 1e-24 { quiet + 1 } else { 0 };
        out.push(v);
        match stop {
            Some(end) if k + 1 >= end => return Ok(out),
            None if k + 1 >= c0.len() && (1.0 - acc < TAIL_TOL || quiet >= 20) => {
                let end = k + 1 + (k / 4).max(20);
                stop = Some(end);
            }
            _ => {}
        }
    }
    if stop.is_some() || ctx.js.dim != Dim::Infinite {
        Ok(out)
    } else {
        Err(Error::NonConvergence { what: "evolved state", terms: cap })
    }
}

/// ⟨ψ|H_I|ψ⟩ for the tridiagonal H_I with the ladder h(n), b(n).
fn tridiagonal_expectation(js: &JacobiSystem, c: &[Complex64]) -> f64 {
    let mut s = 0.0;
    for (n, cn) in c.iter().enumerate() {
        s += cn.norm_sqr() * js.h(n);
        if let Some(cm) = c.get(n + 1) {
            s += 2.0 * (cm.conj() * cn).re * js.b(n + 1);
        }
    }
    s
}

/// ⟨H_I⟩ at t = 0 (it is conserved by H_I).
pub fn h_expectation(ctx: &PropagatorContext, state: &QuantumState) -> Result<f64> {
    match state {
        QuantumState::Number(n) => {
            if !ctx.js.dim.contains(*n) {
                return Err(Error::IndexOutOfRange { index: *n, dim: ctx.js.dim.cap(usize::MAX) });
            }
            Ok(ctx.js.h(*n))
        }
        QuantumState::GaussianCoherent(zeta) => gaussian_h_series(&ctx.js, *zeta),
        QuantumState::SpectralCoherent(z) => mean_energy(ctx, *z),
        QuantumState::Fock(_) => Ok(tridiagonal_expectation(&ctx.js, &state_coeffs(ctx, state)?)),
    }
}

/// e^{−|ζ|²} Σ |ζ|^{2n}/n! [h(n) + b(n+1)/√(n+1)·(ζ̄+ζ)].
pub fn gaussian_h_series(js: &JacobiSystem, zeta: Complex64) -> Result<f64> {
    let r2 = zeta.norm_sqr();
    let two_re = 2.0 * zeta.re;
    let cap = ladder_cap(js);
    let mut w = (-r2).exp();
    let mut acc_w = 0.0;
    let mut s = 0.0;
    for n in 0..cap {
        if n > 0 {
            w *= r2 / n as f64;
        }
        acc_w += w;
        let b_next = if js.dim.contains(n + 1) { js.b(n + 1) } else { 0.0 };
        s += w * (js.h(n) + b_next / ((n + 1) as f64).sqrt() * two_re);
        if n as f64 > r2 && 1.0 - acc_w < 1e-14 {
            return Ok(s);
        }
    }
    if js.dim == Dim::Infinite {
        Err(Error::NonConvergence { what: "Gaussian ⟨H_I⟩ series", terms: cap })
    } else {
        Ok(s)
    }
}

/// ⟨Nˡ(t)⟩ = Σ_k kˡ |ψ_k(t)|² over the evolved coefficients.
pub fn number_moment(ctx: &PropagatorContext, state: &QuantumState, l: u32, t: f64) -> Result<f64> {
    if l == 0 {
        return Err(Error::Invalid("number_moment needs l ≥ 1".into()));
    }
    let c = evolved_coeffs(ctx, state, t)?;
    Ok(c.iter().enumerate().map(|(k, v)| (k as f64).powi(l as i32) * v.norm_sqr()).sum())
}

/// Closed forms of ⟨Nˡ(t)⟩ on |z⟩: Poisson (Hermite, λ = v|z+t|²) and negative
/// binomial (Laguerre, q = |z+t|²/|z+t−iβ|²). Used as cross-checks of the series.
pub fn number_moment_closed(ctx: &PropagatorContext, z: Complex64, l: u32, t: f64) -> Result<f64> {
    if l == 0 {
        return Err(Error::Invalid("number_moment needs l ≥ 1".into()));
    }
    let zt = z + t;
    let twos = vec![2.0; l as usize - 1];
    let ones = vec![1.0; l as usize - 1];
    let ctl = &ctx.series;
    match ctx.family() {
        Family::Hermite => {
            let lam = ctx.pd.hermite_v() * zt.norm_sqr();
            Ok(lam * (-lam).exp() * hyp_pfq(&twos, &ones, lam, ctl)?)
        }
        Family::Laguerre => {
            let beta = ctx.pd.laguerre_beta();
            let mu = ctx.pd.mu();
            let q = zt.norm_sqr() / (zt - Complex64::new(0.0, beta)).norm_sqr();
            if l == 1 {
                return Ok(mu * q / (1.0 - q));
            }
            let mut num = vec![mu + 1.0];
            num.extend_from_slice(&twos);
            Ok((1.0 - q).powf(mu) * mu * q * hyp_pfq(&num, &ones, q, ctl)?)
        }
        Family::Jacobi => Err(Error::Unsupported("no closed form for Jacobi occupation moments".into())),
    }
}

/// Phase e^{−iγ₀(s−r)t} relating full-picture to interaction-picture monomials.
pub fn picture_phase(gamma0: f64, r: usize, s: usize, t: f64, picture: Picture) -> Complex64 {
    match picture {
        Picture::Interaction => Complex64::new(1.0, 0.0),
        Picture::Full => Complex64::from_polar(1.0, -gamma0 * (s as f64 - r as f64) * t),
    }
}

/// ⟨a*ʳ(t) aˢ(t)⟩ with the ladder boson a|n⟩ = √n|n−1⟩, interaction picture.
pub fn correlation(ctx: &PropagatorContext, state: &QuantumState, r: usize, s: usize, t: f64) -> Result<Complex64> {
    let c = evolved_coeffs(ctx, state, t)?;
    let mut acc = ZERO;
    for m in 0.. {
        let (Some(cr), Some(cs)) = (c.get(m + r), c.get(m + s)) else { break };
        let w = (0.5 * (ln_factorial(m + r) + ln_factorial(m + s)) - ln_factorial(m)).exp();
        acc += cr.conj() * cs * w;
    }
    Ok(acc)
}

/// ⟨A*ʳ(t) Aˢ(t)⟩ with the cluster operator A|n⟩ = b(n)|n−1⟩.
pub fn cluster_correlation(
    ctx: &PropagatorContext,
    state: &QuantumState,
    r: usize,
    s: usize,
    t: f64,
    picture: Picture,
) -> Result<Complex64> {
    let c = evolved_coeffs(ctx, state, t)?;
    let js = &ctx.js;
    let mut acc = ZERO;
    for k in 0.. {
        let (Some(cr), Some(cs)) = (c.get(k + r), c.get(k + s)) else { break };
        let br: f64 = (1..=r).map(|j| js.b(k + j)).product();
        let bs: f64 = (1..=s).map(|j| js.b(k + j)).product();
        acc += cr.conj() * cs * (br * bs);
    }
    Ok(acc * picture_phase(js.gamma0, r, s, t, picture))
}

/// ⟨αʲ⟩ at t = 0 for the spectral annihilation operator α = i d/dω.
pub fn alpha_expectation(ctx: &PropagatorContext, state: &QuantumState, j: u32) -> Result<Complex64> {
    if j == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    match state {
        QuantumState::Number(_) => Ok(ZERO),
        QuantumState::SpectralCoherent(z) => Ok(z.powu(j)),
        QuantumState::Fock(_) => {
            let c = state_coeffs(ctx, state)?;
            let m = alpha_matrix(ctx, c.len())?;
            let mut v = nalgebra::DVector::from_vec(c.clone());
            for _ in 0..j {
                v = &m * v;
            }
            Ok(c.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum())
        }
        QuantumState::GaussianCoherent(_) => {
            Err(Error::Unsupported("α moments need a number, spectral coherent or finite Fock state".into()))
        }
    }
}

/// ⟨m|α|n⟩ = i⟨P_m, P_n′⟩ for m, n < len, from the differentiated recurrence
/// b(n+1)P′_{n+1} = (ω − h(n))P′_n + P_n − b(n)P′_{n−1}, with ω acting through the
/// Jacobi matrix. Exact in the basis, so no quadrature weights enter.
pub fn alpha_matrix(ctx: &PropagatorContext, len: usize) -> Result<DMatrix<Complex64>> {
    let js = &ctx.js;
    if len > 0 && !js.dim.contains(len - 1) {
        return Err(Error::IndexOutOfRange { index: len - 1, dim: js.dim.cap(usize::MAX) });
    }
    let mut cols: Vec<Vec<f64>> = vec![vec![0.0; len]];
    for n in 0..len.saturating_sub(1) {
        let cur = &cols[n];
        let prev = if n > 0 { Some(&cols[n - 1]) } else { None };
        let mut next = vec![0.0; len];
        for (k, x) in next.iter_mut().enumerate().take(n + 1) {
            let mut jv = js.h(k) * cur[k];
            if k > 0 {
                jv += js.b(k) * cur[k - 1];
            }
            if k + 1 < len {
                jv += js.b(k + 1) * cur[k + 1];
            }
            let mut v = jv - js.h(n) * cur[k];
            if k == n {
                v += 1.0;
            }
            if let Some(p) = prev {
                v -= js.b(n) * p[k];
            }
            *x = v / js.b(n + 1);
        }
        cols.push(next);
    }
    Ok(DMatrix::from_fn(len, len, |m, n| Complex64::new(0.0, cols[n][m])))
}

/// ⟨αˡ(t)⟩ = Σ_k C(l,k) tᵏ ⟨α^{l−k}⟩.
pub fn alpha_moment(ctx: &PropagatorContext, state: &QuantumState, l: u32, t: f64) -> Result<Complex64> {
    let mut acc = ZERO;
    for k in 0..=l {
        let binom = ln_binomial(l as usize, k as usize).exp().round();
        acc += alpha_expectation(ctx, state, l - k)? * (binom * t.powi(k as i32));
    }
    Ok(acc)
}

/// Squared dispersion ⟨α²(t)⟩ − ⟨α(t)⟩².
pub fn alpha_dispersion(ctx: &PropagatorContext, state: &QuantumState, t: f64) -> Result<Complex64> {
    let m1 = alpha_moment(ctx, state, 1, t)?;
    Ok(alpha_moment(ctx, state, 2, t)? - m1 * m1)
}

/// Mean photon number of mode 0 of the parametric amplifier.
pub fn amplifier_mean_photon(zeta0: Complex64, zeta1: Complex64, g: f64, t: f64) -> f64 {
    let (c, s) = ((g * t).cosh(), (g * t).sinh());
    (zeta0 * c + zeta1.conj() * s).norm_sqr() + s * s
}

/// ⟨H⟩ = γ₀⟨N(t)⟩ + ⟨H_I⟩, with γ₀ taken from the context's ladder.
pub fn total_energy(ctx: &PropagatorContext, state: &QuantumState, t: f64) -> Result<f64> {
    Ok(ctx.js.gamma0 * number_moment(ctx, state, 1, t)? + h_expectation(ctx, state)?)
}

/// Pearson data whose ladder reproduces `js` (b and h for n ≤ 24, relative 1e-10), if
/// the reduced ladder is of Hermite, Laguerre or strong-field Jacobi type.
pub fn reduced_family(js: &JacobiSystem) -> Option<PearsonData> {
    let pd = match classify_reduced(js, 1e-10) {
        ReducedClass::Hermite { v, h0 } => PearsonData::hermite(-1.0, h0, v).ok()?,
        ReducedClass::Laguerre { mu, beta, h_matches: true } => {
            let w0 = js.h(0) - mu / beta;
            PearsonData::laguerre(-beta, mu + w0 * beta, 1.0, -w0).ok()?
        }
        ReducedClass::Jacobi { a, b } => PearsonData::jacobi(a, b, 1.5, 1.5, 1.0).ok()?,
        _ => return None,
    };
    let fam = recurrence(&pd);
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-10 * (1.0 + x.abs().max(y.abs()));
    (0..=24).all(|n| close(fam.b(n), js.b(n)) && close(fam.h(n), js.h(n))).then_some(pd)
}

/// ⟨N(t)⟩ on an arbitrary reduced ladder: closed-form family propagators when the
/// ladder is a known family, otherwise a truncated expm with an edge-weight check.
pub fn ladder_mean_number(js: &JacobiSystem, state: &QuantumState, t: f64, truncation: usize) -> Result<f64> {
    if let Some(pd) = reduced_family(js) {
        let ctx = PropagatorContext::new(&pd);
        return number_moment(&ctx, state, 1, t);
    }
    let c0 = state_coeffs_in(js, None, state)?;
    let dim = js.dim.cap(truncation);
    if c0.len() > dim {
        return Err(Error::CutoffOverflow(format!("state needs {} levels, truncation is {dim}", c0.len())));
    }
    let op = truncated_h(js, dim)?;
    let mut v = c0;
    v.resize(dim, ZERO);
    let out = expm_evolve(&op, &v, t)?;
    if js.dim == Dim::Infinite {
        let edge: f64 = out[dim - dim / 10..].iter().map(|c| c.norm_sqr()).sum();
        if edge > 1e-12 {
            return Err(Error::CutoffOverflow(format!("weight {edge:e} near the truncation edge {dim}")));
        }
    }
    Ok(out.iter().enumerate().map(|(k, c)| k as f64 * c.norm_sqr()).sum())
}

/// ⟨a_j* a_j⟩(t) = l_j (λ₀ + ⟨N(t)⟩) + β_j for a state given in the sector's ladder basis.
pub fn modulation_mean(sys: &MultiModeSystem, sector: &Sector, state: &QuantumState, j: usize, t: f64) -> Result<f64> {
    if j >= sys.modes() {
        return Err(Error::IndexOutOfRange { index: j, dim: sys.modes() });
    }
    let js = reduce(sys, sector)?;
    let beta = mode_offsets(sys, sector)?;
    let n = ladder_mean_number(&js, state, t, 400)?;
    Ok(sys.l[j] as f64 * (sector.lambda00 + n) + beta[j])
}

/// Truncated exp(iφ̂) = (N+1)^{−1/2} a and exp(−iφ̂) = a* (N+1)^{−1/2} on n levels.
pub fn phase_operators(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut a = DMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = (k as f64).sqrt();
    }
    let mut plus = a.clone();
    for (i, mut row) in plus.row_iter_mut().enumerate() {
        row /= ((i + 1) as f64).sqrt();
    }
    let mut minus = a.transpose();
    for (j, mut col) in minus.column_iter_mut().enumerate() {
        col /= ((j + 1) as f64).sqrt();
    }
    (plus, minus)
}
