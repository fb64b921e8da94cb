//! Pearson data, the three classical families, their recurrence
//! coefficients and polynomial evaluation.
//!
//! Polynomials are orthonormal with positive leading coefficient. Pearson
//! data keeps the literal coefficients of `A(ω) = a₁ω + a₀` and
//! `B(ω) = b₂ω² + b₁ω + b₀`; for the Jacobi family `B` is oriented so that it is
//! positive on the support, i.e. `B = s(ω−a)(b−ω)` with scale `s = −b₂ > 0`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::specfun::{ln_factorial, ln_gamma_pos};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Hermite,
    Laguerre,
    Jacobi,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Hermite => "hermite",
            Family::Laguerre => "laguerre",
            Family::Jacobi => "jacobi",
        };
        f.write_str(s)
    }
}

/// Unclassified Pearson coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RawPearson {
    pub a0: f64,
    pub a1: f64,
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub support: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PearsonData {
    pub a0: f64,
    pub a1: f64,
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub support: (f64, f64),
    pub family: Family,
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-10 * (1.0 + x.abs().max(y.abs()))
}

/// Assigns the family from deg B and checks the admissibility conditions.
pub fn classify(raw: &RawPearson) -> Result<PearsonData> {
    let RawPearson { a0, a1, b0, b1, b2, support } = *raw;
    for (name, v) in [("a0", a0), ("a1", a1), ("b0", b0), ("b1", b1), ("b2", b2)] {
        if !v.is_finite() {
            return Err(Error::Invalid(format!("{name} is not finite")));
        }
    }
    let check_support = |expected: (f64, f64)| -> Result<()> {
        if let Some((lo, hi)) = support {
            let same = |x: f64, y: f64| (x.is_infinite() && x == y) || close(x, y);
            if !(same(lo, expected.0) && same(hi, expected.1)) {
                return Err(Error::Constraint(format!(
                    "support ({lo}, {hi}) differs from the Pearson interval ({}, {})",
                    expected.0, expected.1
                )));
            }
        }
        Ok(())
    };
    if b2 == 0.0 && b1 == 0.0 {
        if b0 == 0.0 {
            return Err(Error::Constraint("B vanishes identically".into()));
        }
        if !(a1 / b0 < 0.0) {
            return Err(Error::Constraint("a1/b0<0 violated".into()));
        }
        let sup = (f64::NEG_INFINITY, f64::INFINITY);
        check_support(sup)?;
        return Ok(PearsonData { a0, a1, b0, b1: 0.0, b2: 0.0, support: sup, family: Family::Hermite });
    }
    if b2 == 0.0 {
        if !(a1 / b1 < 0.0) {
            return Err(Error::Constraint("a1/b1<0 violated".into()));
        }
        let mu = (a0 * b1 - b0 * a1) / (b1 * b1);
        if !(mu > 0.0) {
            return Err(Error::Constraint(format!("mu>0 violated (mu = {mu})")));
        }
        let sup = (-b0 / b1, f64::INFINITY);
        check_support(sup)?;
        return Ok(PearsonData { a0, a1, b0, b1, b2: 0.0, support: sup, family: Family::Laguerre });
    }
    // Jacobi: orient B to be positive between its roots.
    let (a0, a1, b0, b1, b2) = if b2 > 0.0 { (-a0, -a1, -b0, -b1, -b2) } else { (a0, a1, b0, b1, b2) };
    let disc = b1 * b1 - 4.0 * b2 * b0;
    if !(disc > 0.0) {
        return Err(Error::Constraint("B must have two distinct real roots".into()));
    }
    let sq = disc.sqrt();
    let r1 = (-b1 + sq) / (2.0 * b2);
    let r2 = (-b1 - sq) / (2.0 * b2);
    let (a, b) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
    let s = -b2;
    let mu = (a * a1 + a0) / (s * (b - a));
    let nu = (b * a1 + a0) / (s * (a - b));
    if !(mu > 0.0) {
        return Err(Error::Constraint(format!("mu>0 violated (mu = {mu})")));
    }
    if !(nu > 0.0) {
        return Err(Error::Constraint(format!("nu>0 violated (nu = {nu})")));
    }
    check_support((a, b))?;
    Ok(PearsonData { a0, a1, b0, b1, b2, support: (a, b), family: Family::Jacobi })
}

impl PearsonData {
    pub fn hermite(a1: f64, a0: f64, b0: f64) -> Result<Self> {
        classify(&RawPearson { a0, a1, b0, ..Default::default() })
    }

    pub fn laguerre(a1: f64, a0: f64, b1: f64, b0: f64) -> Result<Self> {
        classify(&RawPearson { a0, a1, b0, b1, ..Default::default() })
    }

    /// Laguerre data with a₁ = −1, b₁ = 1, b₀ = 0: weight ω^{μ−1}e^{−ω} on (0, ∞).
    pub fn laguerre_canonical(mu: f64) -> Result<Self> {
        Self::laguerre(-1.0, mu, 1.0, 0.0)
    }

    /// Jacobi data from the interval, the endpoint exponents and the scale of B.
    pub fn jacobi(a: f64, b: f64, mu: f64, nu: f64, scale: f64) -> Result<Self> {
        if !(a < b) || !(scale > 0.0) {
            return Err(Error::Constraint("Jacobi needs a < b and b2 > 0".into()));
        }
        let a1 = -(mu + nu) * scale;
        let a0 = scale * (mu * (b - a) + a * (mu + nu));
        classify(&RawPearson {
            a0,
            a1,
            b0: -scale * a * b,
            b1: scale * (a + b),
            b2: -scale,
            support: None,
        })
    }

    pub fn legendre() -> Self {
        Self::jacobi(-1.0, 1.0, 1.0, 1.0, 1.0).expect("valid Legendre data")
    }

    pub fn hermite_canonical() -> Self {
        Self::hermite(-2.0, 0.0, 1.0).expect("valid Hermite data")
    }

    pub fn a_poly(&self, w: f64) -> f64 {
        self.a1 * w + self.a0
    }

    pub fn b_poly(&self, w: f64) -> f64 {
        (self.b2 * w + self.b1) * w + self.b0
    }

    pub fn b_poly_deriv(&self, w: f64) -> f64 {
        2.0 * self.b2 * w + self.b1
    }

    /// μ for Laguerre and Jacobi.
    pub fn mu(&self) -> f64 {
        match self.family {
            Family::Hermite => f64::NAN,
            Family::Laguerre => (self.a0 * self.b1 - self.b0 * self.a1) / (self.b1 * self.b1),
            Family::Jacobi => {
                let (a, b) = self.support;
                (a * self.a1 + self.a0) / (self.jacobi_b2() * (b - a))
            }
        }
    }

    /// ν for Jacobi.
    pub fn nu(&self) -> f64 {
        match self.family {
            Family::Jacobi => {
                let (a, b) = self.support;
                (b * self.a1 + self.a0) / (self.jacobi_b2() * (a - b))
            }
            _ => f64::NAN,
        }
    }

    /// Positive scale s of B = s(ω−a)(b−ω).
    pub fn jacobi_b2(&self) -> f64 {
        -self.b2
    }

    /// Hermite variance parameter −b₀/a₁ (so that b(n)² = v·n).
    pub fn hermite_v(&self) -> f64 {
        -self.b0 / self.a1
    }

    /// Laguerre scale β = −a₁/b₁ (spectral density decays as e^{−βω}).
    pub fn laguerre_beta(&self) -> f64 {
        -self.a1 / self.b1
    }

    /// ε_n: sign relating the positive-leading P_n to Rodrigues' formula with c_n > 0.
    pub fn rodrigues_sign(&self, n: usize) -> f64 {
        let base = match self.family {
            Family::Hermite | Family::Laguerre => self.a1.signum(),
            Family::Jacobi => -1.0,
        };
        if n % 2 == 0 {
            1.0
        } else {
            base
        }
    }

    /// Eigenvalue λ_n = a₁n + b₂n(n−1) of the differential operator A d/dω + B d²/dω².
    pub fn lambda(&self, n: usize) -> f64 {
        let nf = n as f64;
        self.a1 * nf + self.b2 * nf * (nf - 1.0)
    }

    pub fn is_interior(&self, w: f64) -> bool {
        w > self.support.0 && w < self.support.1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    Finite(usize),
    Infinite,
}

impl Dim {
    pub fn contains(&self, n: usize) -> bool {
        match self {
            Dim::Finite(d) => n < *d,
            Dim::Infinite => true,
        }
    }

    pub fn cap(&self, n: usize) -> usize {
        match self {
            Dim::Finite(d) => n.min(*d),
            Dim::Infinite => n,
        }
    }
}

type Coef = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// Recurrence coefficients of a tridiagonal operator: `H e_n = b(n+1)e_{n+1} + h(n)e_n + b(n)e_{n−1}`.
#[derive(Clone)]
pub struct JacobiSystem {
    b: Coef,
    h: Coef,
    pub dim: Dim,
    pub gamma0: f64,
}

impl fmt::Debug for JacobiSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim.cap(4);
        let bs: Vec<f64> = (0..n).map(|k| self.b(k)).collect();
        let hs: Vec<f64> = (0..n).map(|k| self.h(k)).collect();
        f.debug_struct("JacobiSystem")
            .field("dim", &self.dim)
            .field("gamma0", &self.gamma0)
            .field("b[..4]", &bs)
            .field("h[..4]", &hs)
            .finish()
    }
}

impl JacobiSystem {
    pub fn new<B, H>(b: B, h: H, dim: Dim, gamma0: f64) -> Self
    where
        B: Fn(usize) -> f64 + Send + Sync + 'static,
        H: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        JacobiSystem { b: Arc::new(b), h: Arc::new(h), dim, gamma0 }
    }

    /// Finite system from explicit off-diagonal `b[1..]` and diagonal `h` lists.
    pub fn from_vectors(b: Vec<f64>, h: Vec<f64>, gamma0: f64) -> Result<Self> {
        if b.len() != h.len() {
            return Err(Error::Invalid("b and h must have equal length (b[0] is ignored)".into()));
        }
        let dim = Dim::Finite(h.len());
        let b = Arc::new(b);
        let h = Arc::new(h);
        Ok(JacobiSystem {
            b: Arc::new(move |n| b.get(n).copied().unwrap_or(0.0)),
            h: Arc::new(move |n| h.get(n).copied().unwrap_or(0.0)),
            dim,
            gamma0,
        })
    }

    /// b(n); b(0) = 0 and b(n) = 0 past a finite dimension.
    pub fn b(&self, n: usize) -> f64 {
        if n == 0 || !self.dim.contains(n) {
            0.0
        } else {
            (self.b)(n)
        }
    }

    pub fn h(&self, n: usize) -> f64 {
        if !self.dim.contains(n) {
            0.0
        } else {
            (self.h)(n)
        }
    }

    pub fn with_gamma0(mut self, gamma0: f64) -> Self {
        self.gamma0 = gamma0;
        self
    }

    /// Checks b(n) > 0 on 1 ≤ n < min(dim, upto).
    pub fn check(&self, upto: usize) -> Result<()> {
        for n in 1..self.dim.cap(upto) {
            let v = self.b(n);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Invalid(format!("b({n}) = {v} must be positive")));
            }
            if !self.h(n).is_finite() {
                return Err(Error::Invalid(format!("h({n}) is not finite")));
            }
        }
        Ok(())
    }

    /// Σ 1/b(n) up to `upto`; a divergent sum means deficiency indices (0,0).
    pub fn carleman_partial(&self, upto: usize) -> f64 {
        (1..self.dim.cap(upto)).map(|n| 1.0 / self.b(n)).sum()
    }
}

/// Recurrence coefficients of the family (b(0) forced to zero).
pub fn recurrence(pd: &PearsonData) -> JacobiSystem {
    match pd.family {
        Family::Hermite => {
            let v = pd.hermite_v();
            let h0 = -pd.a0 / pd.a1;
            JacobiSystem::new(move |n| (v * n as f64).sqrt(), move |_| h0, Dim::Infinite, 0.0)
        }
        Family::Laguerre => {
            let s = -pd.b1 / pd.a1;
            let mu = pd.mu();
            let shift = -pd.b0 / pd.b1;
            JacobiSystem::new(
                move |n| {
                    let n = n as f64;
                    s * (n * (n + mu - 1.0)).sqrt()
                },
                move |n| s * (2.0 * n as f64 + mu) + shift,
                Dim::Infinite,
                0.0,
            )
        }
        Family::Jacobi => {
            let (a, b) = pd.support;
            let (mu, nu) = (pd.mu(), pd.nu());
            let bj = move |n: usize| {
                let nf = n as f64;
                let sum = mu + nu;
                let top = nf * (mu + nf - 1.0) * (nu + nf - 1.0);
                let ratio = if n == 1 { 1.0 } else { (sum + nf - 2.0) / (sum + 2.0 * nf - 3.0) };
                let q = top * ratio / ((sum + 2.0 * nf - 2.0).powi(2) * (sum + 2.0 * nf - 1.0));
                (b - a) * q.sqrt()
            };
            let hj = move |n: usize| {
                let nf = n as f64;
                let sum = mu + nu;
                if n == 0 && (sum - 2.0).abs() < 1e-6 {
                    return (a * nu + b * mu) / sum;
                }
                let num = 2.0 * nf * (a + b) * (sum - 1.0) + 2.0 * nf * nf * (a + b) - 2.0 * b * mu - 2.0 * a * nu
                    + mu * nu * (a + b)
                    + b * mu * mu
                    + a * nu * nu;
                num / ((sum + 2.0 * nf - 2.0) * (sum + 2.0 * nf))
            };
            JacobiSystem::new(bj, hj, Dim::Infinite, 0.0)
        }
    }
}

/// P_n(ω), P_n′(ω), P_n″(ω) by the forward recurrence started at P₀ = p0.
pub fn eval_poly(js: &JacobiSystem, n: usize, w: f64, p0: f64) -> Result<(f64, f64, f64)> {
    let d = eval_poly_derivs(js, n, w, p0, 2)?;
    Ok((d[0], d[1], d[2]))
}

/// The derivatives P_n^{(j)}(ω) for j = 0..=order via the differentiated recurrence.
pub fn eval_poly_derivs(js: &JacobiSystem, n: usize, w: f64, p0: f64, order: usize) -> Result<Vec<f64>> {
    if !js.dim.contains(n) {
        if let Dim::Finite(d) = js.dim {
            return Err(Error::IndexOutOfRange { index: n, dim: d });
        }
    }
    let mut prev = vec![0.0; order + 1];
    let mut cur = vec![0.0; order + 1];
    cur[0] = p0;
    for k in 0..n {
        let bk = js.b(k);
        let bk1 = js.b(k + 1);
        let dh = w - js.h(k);
        let mut next = vec![0.0; order + 1];
        for j in 0..=order {
            let lower = if j > 0 { j as f64 * cur[j - 1] } else { 0.0 };
            next[j] = (dh * cur[j] + lower - bk * prev[j]) / bk1;
        }
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// All P_0(ω)..P_{n_max}(ω).
pub fn eval_all(js: &JacobiSystem, n_max: usize, w: f64, p0: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(p0);
    let mut prev = 0.0;
    let mut cur = p0;
    for k in 0..n_max {
        let next = ((w - js.h(k)) * cur - js.b(k) * prev) / js.b(k + 1);
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Normalizing constant c_n of Rodrigues' formula (positive magnitude).
pub fn rodrigues_constant(pd: &PearsonData, n: usize, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::Invalid("normalization C must be positive".into()));
    }
    let nf = n as f64;
    let ln_inv_sq = match pd.family {
        Family::Hermite => {
            let (a1, b0) = (pd.a1, pd.b0);
            c.ln() + ln_factorial(n) + nf * (-a1 * b0).ln() + 0.5 * (-std::f64::consts::PI * 2.0 * b0 / a1).ln()
        }
        Family::Laguerre => {
            let (a1, b1, b0) = (pd.a1, pd.b1, pd.b0);
            let mu = pd.mu();
            c.ln() + ln_factorial(n) + nf * (-a1 * b1).ln() + (mu + nf) * (-b1 / a1).ln() + ln_gamma_pos(mu + nf)
                - a1 * b0 / (b1 * b1)
        }
        Family::Jacobi => {
            let (a, b) = pd.support;
            let (mu, nu) = (pd.mu(), pd.nu());
            let s = pd.jacobi_b2();
            // (μ+ν+2n−1)Γ(μ+ν+n−1) written as Γ(μ+ν) at n = 0.
            let ln_den = if n == 0 {
                ln_gamma_pos(mu + nu)
            } else {
                (mu + nu + 2.0 * nf - 1.0).ln() + ln_gamma_pos(mu + nu + nf - 1.0)
            };
            c.ln() + ln_factorial(n) + 2.0 * nf * s.ln() + (mu + nu + 2.0 * nf - 1.0) * (b - a).ln()
                + ln_gamma_pos(mu + nf)
                + ln_gamma_pos(nu + nf)
                - ln_den
        }
    };
    let v = (-0.5 * ln_inv_sq).exp();
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::Constraint("Rodrigues constant not representable".into()));
    }
    Ok(v)
}

/// |A P_n′ + B P_n″ − λ_n P_n| at ω, with P_n from the recurrence (P₀ = 1).
pub fn ode_residual(pd: &PearsonData, js: &JacobiSystem, n: usize, w: f64) -> Result<f64> {
    let (p, dp, ddp) = eval_poly(js, n, w, 1.0)?;
    Ok((pd.a_poly(w) * dp + pd.b_poly(w) * ddp - pd.lambda(n) * p).abs())
}

/// Pearson data of the k-th derivative family: A ↦ A + k·B′, same B.
pub fn derivative_pearson(pd: &PearsonData, k: usize) -> Result<PearsonData> {
    let kf = k as f64;
    classify(&RawPearson {
        a0: pd.a0 + kf * pd.b1,
        a1: pd.a1 + 2.0 * kf * pd.b2,
        b0: pd.b0,
        b1: pd.b1,
        b2: pd.b2,
        support: Some(pd.support),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrongFieldParams {
    Hermite { a1: f64, b0: f64 },
    Laguerre { a1: f64, b1: f64 },
    Jacobi { a: f64, b: f64, scale: f64 },
}

/// Strong-field specializations: a₀ = 0 (Hermite); μ = 1 with b₀ = −b₁²/a₁
/// (Laguerre); μ = ν = 3/2 (Jacobi).
pub fn strong_field(params: StrongFieldParams) -> Result<PearsonData> {
    match params {
        StrongFieldParams::Hermite { a1, b0 } => PearsonData::hermite(a1, 0.0, b0),
        StrongFieldParams::Laguerre { a1, b1 } => {
            let b0 = -b1 * b1 / a1;
            // μ = (a₀b₁ − b₀a₁)/b₁² = 1 fixes a₀.
            let a0 = (b1 * b1 + b0 * a1) / b1;
            PearsonData::laguerre(a1, a0, b1, b0)
        }
        StrongFieldParams::Jacobi { a, b, scale } => PearsonData::jacobi(a, b, 1.5, 1.5, scale),
    }
}
