//! Characteristic functions σ̂(z), coefficient functions σ̂ₙ(z) and the
//! propagator matrix elements σ̂ₘₙ(z) = ∫ e^{−izω} P_m P_n dσ.
//!
//! Closed forms per family, with the orthonormal polynomials taken with positive
//! leading coefficient so that σ̂ₘₙ(t) equals ⟨m|e^{−iH t}|n⟩ entrywise.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::coherent::{strip_for, StripDomain};
use crate::error::{Error, Result};
use crate::measure::{gauss_rule, normalize, QuadratureRule, SpectralMeasure};
use crate::orthopoly::{eval_all, recurrence, rodrigues_constant, Family, JacobiSystem, PearsonData};
use crate::specfun::{hyp1f1_kummer, ln_binomial, ln_factorial, ln_gamma_pos, SeriesControl};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Above this m+n the Jacobi double sum is replaced by Gauss quadrature.
pub const JACOBI_SUM_LIMIT: usize = 10;

#[derive(Clone)]
pub struct PropagatorContext {
    pub pd: PearsonData,
    pub sm: SpectralMeasure,
    pub js: JacobiSystem,
    pub strip: StripDomain,
    pub series: SeriesControl,
    rules: Arc<Mutex<HashMap<usize, Arc<QuadratureRule>>>>,
}

impl std::fmt::Debug for PropagatorContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PropagatorContext")
            .field("pd", &self.pd)
            .field("strip", &self.strip)
            .finish()
    }
}

impl PropagatorContext {
    pub fn new(pd: &PearsonData) -> Self {
        PropagatorContext {
            pd: *pd,
            sm: normalize(pd),
            js: recurrence(pd),
            strip: strip_for(pd),
            series: SeriesControl::default(),
            rules: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    /// Sets the free-part frequency γ₀ carried by the ladder.
    pub fn with_gamma0(mut self, gamma0: f64) -> Self {
        self.js = self.js.with_gamma0(gamma0);
        self
    }

    pub fn family(&self) -> Family {
        self.pd.family
    }

    fn check(&self, z: Complex64) -> Result<()> {
        if !self.strip.doubled_contains(z.im) {
            return Err(Error::OutsideStrip { im: z.im, lo: 2.0 * self.strip.r, hi: 2.0 * self.strip.s });
        }
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Domain("non-finite argument".into()));
        }
        Ok(())
    }

    fn rule(&self, n: usize) -> Result<Arc<QuadratureRule>> {
        let mut cache = self.rules.lock().expect("rule cache poisoned");
        if let Some(r) = cache.get(&n) {
            return Ok(r.clone());
        }
        let r = Arc::new(gauss_rule(&self.js, n)?);
        cache.insert(n, r.clone());
        Ok(r)
    }

    pub fn char_fn(&self, z: Complex64) -> Result<Complex64> {
        char_fn(self, z)
    }

    pub fn sigma_n(&self, n: usize, z: Complex64) -> Result<Complex64> {
        sigma_n(self, n, z)
    }

    pub fn sigma_mn(&self, m: usize, n: usize, z: Complex64) -> Result<Complex64> {
        sigma_mn(self, m, n, z)
    }
}

fn laguerre_w(pd: &PearsonData, z: Complex64) -> Complex64 {
    let beta = pd.laguerre_beta();
    beta / (beta + I * z)
}

/// Unnormalized-parameter Jacobi transform ∫ e^{−izω}(ω−a)^{p−1}(b−ω)^{q−1} dω times the
/// (μ,ν) normalization C, as a log-magnitude prefactor and the ₁F₁ factor.
fn jacobi_hat(ctx: &PropagatorContext, z: Complex64, p: f64, q: f64) -> Result<(f64, Complex64)> {
    let (a, b) = ctx.pd.support;
    let ln_pref = ctx.sm.c.ln() + ln_gamma_pos(p) + ln_gamma_pos(q) - ln_gamma_pos(p + q) + (p + q - 1.0) * (b - a).ln();
    let f = hyp1f1_kummer(p, p + q, -I * z * (b - a), &ctx.series)?;
    Ok((ln_pref, (-I * z * a).exp() * f))
}

/// σ̂(z) = ∫ e^{−izω} dσ(ω) on the doubled strip.
pub fn char_fn(ctx: &PropagatorContext, z: Complex64) -> Result<Complex64> {
    ctx.check(z)?;
    let pd = &ctx.pd;
    Ok(match pd.family {
        Family::Hermite => {
            let m0 = -pd.a0 / pd.a1;
            let v = pd.hermite_v();
            (-I * m0 * z - 0.5 * v * z * z).exp()
        }
        Family::Laguerre => {
            let w0 = pd.support.0;
            let w = laguerre_w(pd, z);
            (-I * z * w0).exp() * (pd.mu() * w.ln()).exp()
        }
        Family::Jacobi => {
            let (mu, nu) = (pd.mu(), pd.nu());
            let (a, b) = pd.support;
            (-I * z * a).exp() * hyp1f1_kummer(mu, mu + nu, -I * z * (b - a), &ctx.series)?
        }
    } * ctx.sm.mass())
}

fn ln_cpow(base: Complex64, n: usize) -> Complex64 {
    base.ln() * n as f64
}

/// σ̂ₙ(z) = ∫ e^{−izω} P_n dσ = P_n(i d/dz) σ̂(z).
pub fn sigma_n(ctx: &PropagatorContext, n: usize, z: Complex64) -> Result<Complex64> {
    ctx.check(z)?;
    if n == 0 {
        return char_fn(ctx, z);
    }
    if z == ZERO {
        return Ok(ZERO);
    }
    let pd = &ctx.pd;
    match pd.family {
        Family::Hermite => {
            let v = pd.hermite_v();
            let base = -I * v.sqrt() * z;
            let ln_t = ln_cpow(base, n) - 0.5 * ln_factorial(n);
            Ok(char_fn(ctx, z)? * ln_t.exp())
        }
        Family::Laguerre => {
            let mu = pd.mu();
            let w = laguerre_w(pd, z);
            let ln_c = 0.5 * (ln_gamma_pos(mu + n as f64) - ln_gamma_pos(mu) - ln_factorial(n));
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let ln_t = ln_cpow(ONE - w, n) + ln_c;
            Ok(char_fn(ctx, z)? * ln_t.exp() * sign)
        }
        Family::Jacobi => {
            let (mu, nu) = (pd.mu(), pd.nu());
            let nf = n as f64;
            let c = rodrigues_constant(pd, n, ctx.sm.c)?;
            let (ln_pref, f) = jacobi_hat(ctx, z, mu + nf, nu + nf)?;
            let ln_t = ln_cpow(-I * pd.jacobi_b2() * z, n) + c.ln() + ln_pref;
            Ok(ln_t.exp() * f)
        }
    }
}

/// σ̂ₘₙ(z) = ∫ e^{−izω} P_m P_n dσ.
pub fn sigma_mn(ctx: &PropagatorContext, m: usize, n: usize, z: Complex64) -> Result<Complex64> {
    ctx.check(z)?;
    let (m, n) = if m <= n { (m, n) } else { (n, m) };
    if m == 0 {
        return sigma_n(ctx, n, z);
    }
    if z == ZERO {
        return Ok(if m == n { ONE } else { ZERO });
    }
    match ctx.pd.family {
        Family::Hermite => Ok(hermite_mn(ctx, m, n, z)? * char_fn(ctx, z)?),
        Family::Laguerre => laguerre_mn(ctx, m, n, z),
        Family::Jacobi => {
            if m + n <= JACOBI_SUM_LIMIT {
                jacobi_mn_sum(ctx, m, n, z)
            } else {
                sigma_mn_quadrature(ctx, m, n, z)
            }
        }
    }
}

// √(m!/n!)(−i√v z)^{n−m} L_m^{(n−m)}(v z²), m ≤ n, with the Laguerre polynomial
// carried in the scaled form ℓ_k = L_k^{(α)}/C(k+α, k).
fn hermite_mn(ctx: &PropagatorContext, m: usize, n: usize, z: Complex64) -> Result<Complex64> {
    let v = ctx.pd.hermite_v();
    let x = z * z * v;
    let alpha = (n - m) as f64;
    let mut prev = ONE;
    let mut cur = ONE;
    for k in 0..m {
        let kf = k as f64;
        let next = if k == 0 {
            (ONE * (1.0 + alpha) - x) / (1.0 + alpha)
        } else {
            ((ONE * (2.0 * kf + 1.0 + alpha) - x) * cur - prev * kf) / (kf + 1.0 + alpha)
        };
        prev = cur;
        cur = next;
    }
    let ln_pref = 0.5 * (ln_factorial(n) - ln_factorial(m)) - ln_factorial(n - m);
    let power = if n == m { ONE } else { (ln_cpow(-I * v.sqrt() * z, n - m) + ln_pref).exp() };
    let scale = if n == m { ln_pref.exp() } else { 1.0 };
    Ok(power * cur * scale)
}

/// The printed alternating single sum for Hermite σ̂ₘₙ; accurate for small indices only.
pub fn hermite_mn_direct_sum(ctx: &PropagatorContext, m: usize, n: usize, z: Complex64) -> Result<Complex64> {
    ctx.check(z)?;
    let v = ctx.pd.hermite_v();
    let base = -I * v.sqrt() * z;
    let mut s = ZERO;
    for k in 0..=m.min(n) {
        let ln_c = 0.5 * (ln_factorial(m) + ln_factorial(n)) - ln_factorial(k) - ln_factorial(m - k) - ln_factorial(n - k);
        s += base.powu((m + n - 2 * k) as u32) * ln_c.exp();
    }
    Ok(s * char_fn(ctx, z)?)
}

// Pfaff-transformed single sum, canonical variable ζ = z/β, w = 1/(1+iζ).
fn laguerre_mn(ctx: &PropagatorContext, m: usize, n: usize, z: Complex64) -> Result<Complex64> {
    let pd = &ctx.pd;
    let mu = pd.mu();
    let w = laguerre_w(pd, z);
    let one_w = ONE - w;
    let mut outer = ZERO;
    for i in 0..=m {
        // ₂F₁(−i, −n; μ; x)(1−w)^m, expanded as Σ_r c_r (−w)^r (1−w)^{m−r}.
        let mut inner = ZERO;
        let mut coef = 1.0;
        for r in 0..=i {
            if r > 0 {
                let rf = r as f64;
                coef *= (rf - 1.0 - i as f64) * (rf - 1.0 - n as f64) / ((mu + rf - 1.0) * rf);
            }
            inner += (-w).powu(r as u32) * one_w.powu((m - r) as u32) * coef;
        }
        outer += (-w).powu(i as u32) * inner * ln_binomial(m, i).exp();
    }
    let ln_pref = 0.5
        * (ln_gamma_pos(mu + m as f64) + ln_gamma_pos(mu + n as f64) - 2.0 * ln_gamma_pos(mu) - ln_factorial(m)
            - ln_factorial(n));
    let tail = if n > m { ln_cpow(one_w, n - m) } else { ZERO };
    let sign = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
    let base = (-I * z * pd.support.0).exp() * (mu * w.ln()).exp() * ctx.sm.mass();
    Ok(base * (tail + ln_pref).exp() * outer * sign)
}

fn jacobi_mn_sum(ctx: &PropagatorContext, m: usize, n: usize, z: Complex64) -> Result<Complex64> {
    let pd = &ctx.pd;
    let (mu, nu) = (pd.mu(), pd.nu());
    let (mf, nf) = (m as f64, n as f64);
    let ln_c = rodrigues_constant(pd, m, ctx.sm.c)?.ln() + rodrigues_constant(pd, n, ctx.sm.c)?.ln()
        + (mf + nf) * pd.jacobi_b2().ln();
    let mut s = ZERO;
    for k in 0..=m {
        for l in 0..=n {
            let (kf, lf) = (k as f64, l as f64);
            let ln_g = ln_binomial(m, k) + ln_binomial(n, l) + ln_gamma_pos(mu + mf) + ln_gamma_pos(mu + nf)
                - ln_gamma_pos(mu + mf - kf)
                - ln_gamma_pos(mu + nf - lf)
                + ln_gamma_pos(nu + mf)
                + ln_gamma_pos(nu + nf)
                - ln_gamma_pos(nu + kf)
                - ln_gamma_pos(nu + lf);
            let (ln_p, f) = jacobi_hat(ctx, z, mu + mf + nf - kf - lf, nu + kf + lf)?;
            let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
            s += f * ((ln_g + ln_p + ln_c).exp() * sign);
        }
    }
    Ok(s)
}

/// σ̂ₘₙ(z) from a Gauss rule of the family's own Jacobi matrix. Exact up to the
/// polynomial approximation of e^{−izω} on the support; used for compact supports.
pub fn sigma_mn_quadrature(ctx: &PropagatorContext, m: usize, n: usize, z: Complex64) -> Result<Complex64> {
    let (a, b) = ctx.pd.support;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Unsupported("Gauss-rule route needs a compact support".into()));
    }
    let width = (b - a) * z.norm();
    let nodes = m.max(n) + (width.ceil() as usize) + 40;
    // Round up to a multiple of 8 so that nearby requests share a cached rule.
    let nodes = nodes.div_ceil(8) * 8;
    let rule = ctx.rule(nodes)?;
    let top = m.max(n);
    let mut s = ZERO;
    for (&w, &wt) in rule.nodes.iter().zip(&rule.weights) {
        let p = eval_all(&ctx.js, top, w, 1.0);
        s += (-I * z * w).exp() * (wt * p[m] * p[n]);
    }
    Ok(s)
}

/// e^{−iH t} applied to a finite coefficient vector; the output is extended until
/// the missing norm is below `tail_tol` (relative to the input norm).
pub fn evolve(ctx: &PropagatorContext, coeffs: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
    evolve_with(ctx, coeffs, t, 1e-12, 50_000)
}

pub fn evolve_with(
    ctx: &PropagatorContext,
    coeffs: &[Complex64],
    t: f64,
    tail_tol: f64,
    max_len: usize,
) -> Result<Vec<Complex64>> {
    let norm2: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if t == 0.0 {
        return Ok(coeffs.to_vec());
    }
    let z = Complex64::new(t, 0.0);
    let mut out = Vec::new();
    let mut acc = 0.0;
    for k in 0..max_len {
        let mut v = ZERO;
        for (n, c) in coeffs.iter().enumerate() {
            if *c != ZERO {
                v += c * sigma_mn(ctx, n, k, z)?;
            }
        }
        acc += v.norm_sqr();
        out.push(v);
        if k + 1 >= coeffs.len() && norm2 - acc < tail_tol * norm2.max(f64::MIN_POSITIVE) {
            return Ok(out);
        }
    }
    Err(Error::NonConvergence { what: "evolution tail", terms: max_len })
}

/// Σ_k |σ̂ₙₖ(t)|² accumulated until the next terms are negligible; returns the sum and the count.
pub fn unitarity_sum(ctx: &PropagatorContext, n: usize, t: f64, max_len: usize) -> Result<(f64, usize)> {
    let z = Complex64::new(t, 0.0);
    let mut acc = 0.0;
    let mut quiet = 0;
    for k in 0..max_len {
        let v = sigma_mn(ctx, n, k, z)?.norm_sqr();
        acc += v;
        if k > n && v < 1e-18 {
            quiet += 1;
            if quiet > 20 {
                return Ok((acc, k + 1));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence { what: "unitarity sum", terms: max_len })
}
