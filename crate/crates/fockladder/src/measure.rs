//! Spectral measures of the three families, their moments, Gauss rules from
//! the Jacobi matrix and the analyticity-radius estimate.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::orthopoly::{Family, JacobiSystem, PearsonData};
use crate::quad::{integrate, integrate_line, integrate_upper, QuadTol, QuadValue};
use crate::specfun::ln_gamma_pos;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralMeasure {
    pub pd: PearsonData,
    pub c: f64,
}

/// C making the weight a probability measure.
pub fn normalizing_constant(pd: &PearsonData) -> f64 {
    match pd.family {
        Family::Hermite => 1.0 / (-2.0 * std::f64::consts::PI * pd.b0 / pd.a1).sqrt(),
        Family::Laguerre => {
            let beta = pd.laguerre_beta();
            let mu = pd.mu();
            (mu * beta.ln() + pd.a1 * pd.b0 / (pd.b1 * pd.b1) - ln_gamma_pos(mu)).exp()
        }
        Family::Jacobi => {
            let (a, b) = pd.support;
            let (mu, nu) = (pd.mu(), pd.nu());
            let ln_beta = ln_gamma_pos(mu) + ln_gamma_pos(nu) - ln_gamma_pos(mu + nu);
            (-ln_beta - (mu + nu - 1.0) * (b - a).ln()).exp()
        }
    }
}

/// The measure normalized to total mass one.
pub fn normalize(pd: &PearsonData) -> SpectralMeasure {
    SpectralMeasure { pd: *pd, c: normalizing_constant(pd) }
}

impl SpectralMeasure {
    pub fn with_constant(pd: &PearsonData, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::Invalid("C must be positive".into()));
        }
        Ok(SpectralMeasure { pd: *pd, c })
    }

    /// Total mass μ₀.
    pub fn mass(&self) -> f64 {
        self.c / normalizing_constant(&self.pd)
    }

    pub fn density(&self, w: f64) -> f64 {
        density(self, w)
    }

    pub fn support(&self) -> (f64, f64) {
        self.pd.support
    }

    /// ∫ f dσ with the endpoint behaviour of the weight absorbed by substitution.
    pub fn integrate<T, F>(&self, f: F, tol: &QuadTol) -> Result<T>
    where
        T: QuadValue,
        F: Fn(f64) -> T,
    {
        integrate_weighted(self, f, tol)
    }
}

/// ρ(ω); zero outside the support.
pub fn density(sm: &SpectralMeasure, w: f64) -> f64 {
    let pd = &sm.pd;
    let (lo, hi) = pd.support;
    if w < lo || w > hi {
        return 0.0;
    }
    match pd.family {
        Family::Hermite => {
            let m = w + pd.a0 / pd.a1;
            sm.c * (pd.a1 / (2.0 * pd.b0) * m * m).exp()
        }
        Family::Laguerre => {
            let u = w - lo;
            let mu = pd.mu();
            if u == 0.0 {
                return if mu == 1.0 { sm.c * (pd.a1 / pd.b1 * w).exp() } else if mu > 1.0 { 0.0 } else { f64::INFINITY };
            }
            sm.c * ((mu - 1.0) * u.ln() + pd.a1 / pd.b1 * w).exp()
        }
        Family::Jacobi => {
            let (mu, nu) = (pd.mu(), pd.nu());
            sm.c * (w - lo).powf(mu - 1.0) * (hi - w).powf(nu - 1.0)
        }
    }
}

// A vanishing weight short-circuits f, which may overflow far out in the tails.
fn weighted<T: QuadValue, F: Fn(f64) -> T>(f: &F, w: f64, weight: f64) -> T {
    if weight == 0.0 {
        T::default()
    } else {
        f(w) * weight
    }
}

fn integrate_weighted<T, F>(sm: &SpectralMeasure, f: F, tol: &QuadTol) -> Result<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let pd = &sm.pd;
    match pd.family {
        Family::Hermite => {
            let center = -pd.a0 / pd.a1;
            let est = integrate_line(|w: f64| weighted(&f, w, density(sm, w)), center, tol)?;
            Ok(est.value)
        }
        Family::Laguerre => {
            let lo = pd.support.0;
            let mu = pd.mu();
            let beta = pd.laguerre_beta();
            let log_pref = sm.c.ln() + pd.a1 / pd.b1 * lo;
            if mu < 1.0 {
                // u = s^{1/μ} turns u^{μ−1}du into ds/μ.
                let inv = 1.0 / mu;
                let est = integrate_upper(
                    |s: f64| {
                        let u = s.powf(inv);
                        weighted(&f, lo + u, (log_pref - beta * u).exp() * inv)
                    },
                    0.0,
                    tol,
                )?;
                Ok(est.value)
            } else {
                let est = integrate_upper(
                    |u: f64| {
                        if u == 0.0 && mu > 1.0 {
                            return T::default();
                        }
                        weighted(&f, lo + u, (log_pref + (mu - 1.0) * u.ln() - beta * u).exp())
                    },
                    0.0,
                    tol,
                )?;
                Ok(est.value)
            }
        }
        Family::Jacobi => {
            let (a, b) = pd.support;
            let (mu, nu) = (pd.mu(), pd.nu());
            let mid = 0.5 * (a + b);
            let half = QuadTol { abs: 0.5 * tol.abs, ..*tol };
            let left = if mu < 1.0 {
                let inv = 1.0 / mu;
                let smax = (mid - a).powf(mu);
                integrate(
                    |s: f64| {
                        let w = a + s.powf(inv);
                        f(w) * (sm.c * (b - w).powf(nu - 1.0) * inv)
                    },
                    0.0,
                    smax,
                    &half,
                )?
                .value
            } else {
                integrate(|w: f64| f(w) * density(sm, w), a, mid, &half)?.value
            };
            let right = if nu < 1.0 {
                let inv = 1.0 / nu;
                let smax = (b - mid).powf(nu);
                integrate(
                    |s: f64| {
                        let w = b - s.powf(inv);
                        f(w) * (sm.c * (w - a).powf(mu - 1.0) * inv)
                    },
                    0.0,
                    smax,
                    &half,
                )?
                .value
            } else {
                integrate(|w: f64| f(w) * density(sm, w), mid, b, &half)?.value
            };
            Ok(left + right)
        }
    }
}

fn moment_tol() -> QuadTol {
    QuadTol { abs: 0.0, rel: 1e-13, max_intervals: 8000 }
}

/// μ_k = ∫ ω^k dσ by adaptive quadrature.
pub fn moment(sm: &SpectralMeasure, k: usize) -> Result<f64> {
    if k == 0 {
        return Ok(sm.mass());
    }
    let tol = moment_tol();
    let v = integrate_weighted(sm, |w: f64| w.powi(k as i32), &tol);
    match v {
        Ok(v) => Ok(v),
        // Odd moments of symmetric measures vanish; retry with an absolute floor.
        Err(_) => integrate_weighted(
            sm,
            |w: f64| w.powi(k as i32),
            &QuadTol { abs: 1e-13 * absolute_moment(sm, k)?, ..tol },
        ),
    }
}

/// |μ|_k = ∫ |ω|^k dσ.
pub fn absolute_moment(sm: &SpectralMeasure, k: usize) -> Result<f64> {
    if k == 0 {
        return Ok(sm.mass());
    }
    integrate_weighted(sm, |w: f64| w.abs().powi(k as i32), &moment_tol())
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn integrate<T: QuadValue, F: Fn(f64) -> T>(&self, f: F) -> T {
        self.nodes.iter().zip(&self.weights).fold(T::default(), |acc, (&x, &w)| acc + f(x) * w)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Dense N×N truncation of the Jacobi matrix.
pub fn jacobi_matrix(js: &JacobiSystem, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = js.h(i);
        if i + 1 < n {
            let b = js.b(i + 1);
            m[(i, i + 1)] = b;
            m[(i + 1, i)] = b;
        }
    }
    m
}

/// Golub–Welsch rule with N nodes for a unit-mass measure.
pub fn gauss_rule(js: &JacobiSystem, n: usize) -> Result<QuadratureRule> {
    gauss_rule_scaled(js, n, 1.0)
}

pub fn gauss_rule_scaled(js: &JacobiSystem, n: usize, mu0: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::Invalid("rule needs at least one node".into()));
    }
    if !js.dim.contains(n - 1) {
        return Err(Error::IndexOutOfRange { index: n - 1, dim: js.dim.cap(usize::MAX) });
    }
    let eig = SymmetricEigen::try_new(jacobi_matrix(js, n), f64::EPSILON, 0)
        .ok_or_else(|| Error::Eigen("symmetric tridiagonal eigen-solver did not converge".into()))?;
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| (eig.eigenvalues[j], mu0 * eig.eigenvectors[(0, j)].powi(2)))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(QuadratureRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Estimate of the radius R in lim sup |μ|ₙ^{1/n}/n = 1/(eR); `INFINITY` when the sequence tends to 0.
pub fn analyticity_radius(sm: &SpectralMeasure, n_max: usize) -> Result<f64> {
    if n_max < 4 {
        return Err(Error::Invalid("n_max must be at least 4".into()));
    }
    let first = n_max.saturating_sub(4).max(1);
    let mut xs = Vec::new();
    let mut s = Vec::new();
    for n in first..=n_max {
        let m = absolute_moment(sm, n)?;
        let nf = n as f64;
        xs.push(nf);
        s.push((m.ln() / nf).exp() / nf);
    }
    let fit = |x: &[f64], y: &[f64]| {
        let k = x.len() as f64;
        let mx = x.iter().sum::<f64>() / k;
        let my = y.iter().sum::<f64>() / k;
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
        let slope = sxy / sxx;
        (slope, my - slope * mx)
    };
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ls: Vec<f64> = s.iter().map(|v| v.ln()).collect();
    let (p, _) = fit(&lx, &ls);
    if p < -0.25 {
        return Ok(f64::INFINITY);
    }
    let inv: Vec<f64> = xs.iter().map(|x| 1.0 / x).collect();
    let (_, s_inf) = fit(&inv, &s);
    if !(s_inf > 0.0) {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / (std::f64::consts::E * s_inf))
}
