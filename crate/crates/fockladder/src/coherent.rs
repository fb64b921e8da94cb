//! Spectral coherent states |z⟩ = Σ σ̂ₙ(z)|n⟩, their strip of definition, the
//! reproducing measure, kernel, holomorphic representatives and the mean-energy
//! function.
//!
//! In the spectral picture |z⟩ is the function e^{−izω}, so ⟨z|z⟩ = σ̂(2iy) and the
//! spectral annihilation operator α = i d/dω has |z⟩ as eigenvector with eigenvalue z.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::normalizing_constant;
use crate::orthopoly::{eval_all, Family, PearsonData};
use crate::propagator::{char_fn, sigma_n, PropagatorContext};
use crate::quad::{integrate, QuadTol};
use crate::specfun::{bessel_k, hyp1f1_kummer, ln_gamma_pos, whittaker_w};

/// The open strip r < Im z < s on which |z⟩ is normalizable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripDomain {
    pub r: f64,
    pub s: f64,
}

impl StripDomain {
    pub fn contains(&self, y: f64) -> bool {
        self.r < y && y < self.s
    }

    /// Domain of σ̂ itself: the doubled strip 2r < Im z < 2s.
    pub fn doubled_contains(&self, im: f64) -> bool {
        2.0 * self.r < im && im < 2.0 * self.s
    }
}

pub fn strip_for(pd: &PearsonData) -> StripDomain {
    match pd.family {
        Family::Hermite | Family::Jacobi => StripDomain { r: f64::NEG_INFINITY, s: f64::INFINITY },
        Family::Laguerre => StripDomain { r: f64::NEG_INFINITY, s: 0.5 * pd.laguerre_beta() },
    }
}

/// Density μ(y) on the strip with ρ(ω) ∫ μ(y) e^{2yω} dy = 1 on the support.
/// The reproducing integrals use dμ = μ(y) dx dy / 2π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReproducingMeasure {
    pub strip: StripDomain,
    pub pd: PearsonData,
    pub c: f64,
}

impl ReproducingMeasure {
    /// Fails with `Unsupported` outside the ranges where the closed forms hold:
    /// Laguerre μ > 1; Jacobi μ, ν > 1 with μ + ν > 3, or μ = ν > 1.
    pub fn new(pd: &PearsonData) -> Result<Self> {
        match pd.family {
            Family::Hermite => {}
            Family::Laguerre => {
                if pd.mu() <= 1.0 {
                    return Err(Error::Unsupported(format!(
                        "Laguerre reproducing density needs μ > 1 (μ = {}); μ = 1 is a boundary measure",
                        pd.mu()
                    )));
                }
            }
            Family::Jacobi => {
                let (mu, nu) = (pd.mu(), pd.nu());
                let gegenbauer = is_gegenbauer(pd);
                if mu <= 1.0 || nu <= 1.0 || (!gegenbauer && mu + nu <= 3.0) {
                    return Err(Error::Unsupported(format!(
                        "Jacobi reproducing density needs μ, ν > 1 and μ + ν > 3, or μ = ν > 1 (μ = {mu}, ν = {nu})"
                    )));
                }
            }
        }
        Ok(ReproducingMeasure { strip: strip_for(pd), pd: *pd, c: normalizing_constant(pd) })
    }

    pub fn density(&self, y: f64) -> Result<f64> {
        if !self.strip.contains(y) {
            return Err(Error::OutsideStrip { im: y, lo: self.strip.r, hi: self.strip.s });
        }
        let pd = &self.pd;
        let c = self.c;
        match pd.family {
            Family::Hermite => {
                let (a0, a1, b0) = (pd.a0, pd.a1, pd.b0);
                let shift = y + a0 / (2.0 * b0);
                let ln = -a0 * a0 / (2.0 * b0 * a1) - 0.5 * (-std::f64::consts::PI * a1 / (2.0 * b0)).ln()
                    + 2.0 * b0 / a1 * shift * shift;
                Ok(ln.exp() / c)
            }
            Family::Laguerre => {
                let (a1, b0, b1) = (pd.a1, pd.b0, pd.b1);
                let mu = pd.mu();
                let base = -2.0 * y - a1 / b1;
                let ln = b0 * a1 / (b1 * b1) - ln_gamma_pos(mu - 1.0) + (mu - 2.0) * base.ln() + 2.0 * b0 / b1 * y;
                Ok(2.0 * ln.exp() / c)
            }
            Family::Jacobi => {
                if is_gegenbauer(pd) {
                    gegenbauer_density(pd, c, y)
                } else {
                    jacobi_whittaker_density(pd, c, y)
                }
            }
        }
    }
}

fn is_gegenbauer(pd: &PearsonData) -> bool {
    (pd.mu() - pd.nu()).abs() <= 1e-14 * pd.mu()
}

/// μ(y) for the family of `pd` (default normalization).
pub fn reproducing_density(pd: &PearsonData, y: f64) -> Result<f64> {
    ReproducingMeasure::new(pd)?.density(y)
}

/// Jacobi density in the two-branch Whittaker form. The y > 0 branch carries 1/Γ(ν−1)
/// and the y < 0 branch 1/Γ(μ−1); y = 0 takes the common limit.
pub fn jacobi_whittaker_density(pd: &PearsonData, c: f64, y: f64) -> Result<f64> {
    let (a, b) = pd.support;
    let (mu, nu) = (pd.mu(), pd.nu());
    let w = b - a;
    let half = 0.5 * (mu + nu);
    let lam = 1.5 - half;
    let pref = 2.0 / c * w.powf(1.0 - half) * (-(b + a) * y).exp();
    if y == 0.0 {
        let l = half - 1.5;
        if l <= 0.0 {
            return Ok(f64::INFINITY);
        }
        let ln = (0.5 - l) * w.ln() + ln_gamma_pos(2.0 * l) - ln_gamma_pos(mu - 1.0) - ln_gamma_pos(nu - 1.0);
        return Ok(pref * ln.exp());
    }
    let (g, kappa, x) = if y > 0.0 { (nu, 0.5 * (nu - mu), 2.0 * y) } else { (mu, 0.5 * (mu - nu), -2.0 * y) };
    let wv = whittaker_w(kappa, lam, w * x)?;
    Ok(pref / ln_gamma_pos(g - 1.0).exp() * x.powf(half - 2.0) * wv)
}

/// Gegenbauer (μ = ν) density in the Bessel-K form, valid for μ > 1.
pub fn gegenbauer_density(pd: &PearsonData, c: f64, y: f64) -> Result<f64> {
    let (a, b) = pd.support;
    let mu = pd.mu();
    let w = b - a;
    let nu = mu - 1.5;
    let pref = 2.0 / c * (-(b + a) * y).exp() / (ln_gamma_pos(mu - 1.0).exp() * std::f64::consts::PI.sqrt());
    if y == 0.0 {
        if nu <= 0.0 {
            return Ok(f64::INFINITY);
        }
        return Ok(pref * 0.5 * ln_gamma_pos(nu).exp() * (4.0 / (w * w)).powf(nu));
    }
    let ay = y.abs();
    Ok(pref * (2.0 * ay / w).powf(nu) * bessel_k(nu, w * ay)?)
}

/// ⟨z|v⟩ = σ̂(v − z̄).
pub fn kernel(ctx: &PropagatorContext, z: Complex64, v: Complex64) -> Result<Complex64> {
    char_fn(ctx, v - z.conj())
}

/// A state given either by Fock coefficients or by its spectral function ψ(ω).
pub enum HoloInput<'a> {
    Coeffs(&'a [Complex64]),
    Spectral(&'a dyn Fn(f64) -> Complex64),
}

/// Ψ(z) = ⟨ψ|z⟩ = ∫ e^{−izω} ψ̄(ω) dσ(ω); Ψ = σ̂ₙ for ψ = |n⟩.
pub fn holomorphic_transform(ctx: &PropagatorContext, input: HoloInput<'_>, z: Complex64) -> Result<Complex64> {
    match input {
        HoloInput::Coeffs(c) => {
            let mut s = Complex64::new(0.0, 0.0);
            for (n, cn) in c.iter().enumerate() {
                if *cn != Complex64::new(0.0, 0.0) {
                    s += cn.conj() * sigma_n(ctx, n, z)?;
                }
            }
            Ok(s)
        }
        HoloInput::Spectral(f) => {
            if !ctx.strip.contains(z.im) {
                return Err(Error::OutsideStrip { im: z.im, lo: ctx.strip.r, hi: ctx.strip.s });
            }
            let tol = QuadTol { abs: 1e-14, rel: 1e-12, max_intervals: 20_000 };
            ctx.sm.integrate(|w: f64| (-Complex64::i() * z * w).exp() * f(w).conj(), &tol)
        }
    }
}

/// First and second y-derivatives of ln σ̂(2iy).
fn log_char_derivs(ctx: &PropagatorContext, y: f64) -> Result<(f64, f64)> {
    if !ctx.strip.contains(y) {
        return Err(Error::OutsideStrip { im: y, lo: ctx.strip.r, hi: ctx.strip.s });
    }
    let pd = &ctx.pd;
    Ok(match pd.family {
        Family::Hermite => {
            let m0 = -pd.a0 / pd.a1;
            let v = pd.hermite_v();
            (2.0 * m0 + 4.0 * v * y, 4.0 * v)
        }
        Family::Laguerre => {
            let beta = pd.laguerre_beta();
            let mu = pd.mu();
            let d = beta - 2.0 * y;
            (2.0 * pd.support.0 + 2.0 * mu / d, 4.0 * mu / (d * d))
        }
        Family::Jacobi => {
            let (a, b) = pd.support;
            let (mu, nu) = (pd.mu(), pd.nu());
            let w = b - a;
            let x = Complex64::new(2.0 * w * y, 0.0);
            let f0 = hyp1f1_kummer(mu, mu + nu, x, &ctx.series)?.re;
            let f1 = hyp1f1_kummer(mu + 1.0, mu + nu + 1.0, x, &ctx.series)?.re;
            let f2 = hyp1f1_kummer(mu + 2.0, mu + nu + 2.0, x, &ctx.series)?.re;
            let r1 = mu / (mu + nu) * f1 / f0;
            let r2 = mu * (mu + 1.0) / ((mu + nu) * (mu + nu + 1.0)) * f2 / f0;
            (2.0 * a + 2.0 * w * r1, 4.0 * w * w * (r2 - r1 * r1))
        }
    })
}

/// ⟨H_I⟩_z = ⟨z|H_I z⟩/⟨z|z⟩ = ½ d/dy ln σ̂(2iy) at y = Im z.
pub fn mean_energy(ctx: &PropagatorContext, z: Complex64) -> Result<f64> {
    Ok(0.5 * log_char_derivs(ctx, z.im)?.0)
}

/// The raw −½ d²/dy² ln σ̂(2iy).
pub fn omega_density(ctx: &PropagatorContext, y: f64) -> Result<f64> {
    Ok(-0.5 * log_char_derivs(ctx, y)?.1)
}

/// Coefficients σ̂ₙ(z), n < len, of the unnormalized state |z⟩.
pub fn coherent_coeffs(ctx: &PropagatorContext, z: Complex64, len: usize) -> Result<Vec<Complex64>> {
    (0..ctx.js.dim.cap(len)).map(|n| sigma_n(ctx, n, z)).collect()
}

/// Coefficients of |z⟩ extended until the missing norm, known exactly as σ̂(2iy),
/// is below `tail_tol` relative.
pub fn coherent_coeffs_adaptive(ctx: &PropagatorContext, z: Complex64, tail_tol: f64, max_len: usize) -> Result<Vec<Complex64>> {
    let total = char_fn(ctx, Complex64::new(0.0, 2.0 * z.im))?.re;
    let mut out = Vec::new();
    let mut acc = 0.0;
    for n in 0..ctx.js.dim.cap(max_len) {
        let c = sigma_n(ctx, n, z)?;
        acc += c.norm_sqr();
        out.push(c);
        if total - acc <= tail_tol * total {
            return Ok(out);
        }
    }
    if ctx.js.dim.contains(max_len) {
        Err(Error::NonConvergence { what: "coherent-state coefficients", terms: max_len })
    } else {
        Ok(out)
    }
}

/// ∫∫ f(x+iy) μ(y) dx dy / 2π over the window |x| ≤ x_half, y_lo ≤ y ≤ y_hi.
pub fn integrate_reproducing<F>(rm: &ReproducingMeasure, f: F, x_half: f64, y_lo: f64, y_hi: f64, tol: &QuadTol) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let y_hi = y_hi.min(rm.strip.s - 1e-12);
    let inner_tol = QuadTol { abs: 0.1 * tol.abs, ..*tol };
    let err = std::cell::Cell::new(None);
    let outer = integrate(
        |y: f64| {
            let mu = match rm.density(y) {
                Ok(m) => m,
                Err(e) => {
                    err.set(Some(e));
                    return Complex64::new(0.0, 0.0);
                }
            };
            match integrate(|x: f64| f(Complex64::new(x, y)), -x_half, x_half, &inner_tol) {
                Ok(v) => v.value * mu,
                Err(e) => {
                    err.set(Some(e));
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        y_lo,
        y_hi,
        tol,
    )?;
    if let Some(e) = err.take() {
        return Err(e);
    }
    Ok(outer.value / (2.0 * std::f64::consts::PI))
}

/// ∫ P_m (i P_n′) dσ: the matrix ⟨m|α|n⟩ of the spectral annihilation operator.
pub fn alpha_matrix_element(ctx: &PropagatorContext, m: usize, n: usize) -> Result<Complex64> {
    if m >= n {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let rule = crate::measure::gauss_rule(&ctx.js, n + 2)?;
    let mut s = 0.0;
    for (&w, &wt) in rule.nodes.iter().zip(&rule.weights) {
        let p = eval_all(&ctx.js, m, w, 1.0);
        let (_, dp, _) = crate::orthopoly::eval_poly(&ctx.js, n, w, 1.0)?;
        s += wt * p[m] * dp;
    }
    Ok(Complex64::new(0.0, s))
}
