//! Reduction of a one-monomial multi-mode Hamiltonian H = H₀ + H_I with
//! H₀ = Σ ω_j a_j*a_j and H_I = h(n) + A + A*, A = g(n) Π a_j^{l_j},
//! to sectors of the integrals of motion and a single tridiagonal ladder.
//!
//! A negative exponent l_j stands for (a_j*)^{|l_j|}. The coupling g is evaluated
//! on the lower occupation of each transition: A*|n⟩ = conj g(n) √F(n) |n+l⟩.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::orthopoly::{Dim, JacobiSystem};

type CouplingFn = Arc<dyn Fn(&[usize]) -> Complex64 + Send + Sync>;
type DiagonalFn = Arc<dyn Fn(&[usize]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Coupling {
    Constant(Complex64),
    Custom(CouplingFn),
}

impl Coupling {
    pub fn eval(&self, n: &[usize]) -> Complex64 {
        match self {
            Coupling::Constant(g) => *g,
            Coupling::Custom(f) => f(n),
        }
    }
}

/// The diagonal part h of H_I as a function of the occupations.
#[derive(Clone)]
pub enum Diagonal {
    Zero,
    /// constant + Σ coeffs[j]·n_j
    Linear { coeffs: Vec<f64>, constant: f64 },
    Custom(DiagonalFn),
}

impl Diagonal {
    pub fn eval(&self, n: &[usize]) -> f64 {
        match self {
            Diagonal::Zero => 0.0,
            Diagonal::Linear { coeffs, constant } => {
                constant + coeffs.iter().zip(n).map(|(c, &k)| c * k as f64).sum::<f64>()
            }
            Diagonal::Custom(f) => f(n),
        }
    }
}

#[derive(Clone)]
pub struct MultiModeSystem {
    pub omega: Vec<f64>,
    pub l: Vec<i64>,
    pub g: Coupling,
    pub h_diag: Diagonal,
    pub alpha: DMatrix<f64>,
}

impl fmt::Debug for MultiModeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiModeSystem")
            .field("omega", &self.omega)
            .field("l", &self.l)
            .field("alpha", &self.alpha)
            .finish_non_exhaustive()
    }
}

impl MultiModeSystem {
    /// Builds a system with α from `default_alpha` and validates it.
    pub fn new(omega: Vec<f64>, l: Vec<i64>, g: Coupling, h_diag: Diagonal) -> Result<Self> {
        let alpha = default_alpha(&l)?;
        Self::with_alpha(omega, l, g, h_diag, alpha)
    }

    pub fn with_alpha(omega: Vec<f64>, l: Vec<i64>, g: Coupling, h_diag: Diagonal, alpha: DMatrix<f64>) -> Result<Self> {
        if omega.len() != l.len() {
            return Err(Error::Invalid(format!("{} frequencies for {} modes", omega.len(), l.len())));
        }
        if let Diagonal::Linear { coeffs, .. } = &h_diag {
            if coeffs.len() != l.len() {
                return Err(Error::Invalid("linear h_diag needs one coefficient per mode".into()));
            }
        }
        validate_alpha(&alpha, &l)?;
        Ok(MultiModeSystem { omega, l, g, h_diag, alpha })
    }

    pub fn modes(&self) -> usize {
        self.l.len()
    }

    /// |l|₁, the occupation change per application of A or A*.
    pub fn step(&self) -> usize {
        self.l.iter().map(|x| x.unsigned_abs() as usize).sum()
    }

    /// n + k·l, or None when a coordinate would be negative.
    pub fn shift(&self, n: &[usize], k: i64) -> Option<Vec<usize>> {
        n.iter()
            .zip(&self.l)
            .map(|(&nj, &lj)| {
                let v = nj as i64 + k * lj;
                (v >= 0).then_some(v as usize)
            })
            .collect()
    }

    /// √F(n) = ‖Π (a_j*)^{l_j} |n⟩‖ (negative l_j lowering instead).
    pub fn ladder_factor(&self, n: &[usize]) -> f64 {
        let mut f = 1.0;
        for (&nj, &lj) in n.iter().zip(&self.l) {
            if lj > 0 {
                for k in 1..=lj as usize {
                    f *= (nj + k) as f64;
                }
            } else if lj < 0 {
                let m = lj.unsigned_abs() as usize;
                if nj < m {
                    return 0.0;
                }
                for k in 0..m {
                    f *= (nj - k) as f64;
                }
            }
        }
        f.sqrt()
    }

    /// ⟨n+l|A*|n⟩.
    pub fn raise_amplitude(&self, n: &[usize]) -> Complex64 {
        self.g.eval(n).conj() * self.ladder_factor(n)
    }
}

/// Checks det α ≠ 0 and Σ_j α_ij l_j = δ_{0i}.
pub fn validate_alpha(alpha: &DMatrix<f64>, l: &[i64]) -> Result<()> {
    let m = l.len();
    if alpha.nrows() != m || alpha.ncols() != m {
        return Err(Error::Invalid(format!("alpha must be {m}x{m}")));
    }
    let scale = alpha.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    let det = alpha.determinant();
    if det.abs() <= 1e-12 * scale.powi(m as i32) {
        return Err(Error::Singular);
    }
    for i in 0..m {
        let s: f64 = (0..m).map(|j| alpha[(i, j)] * l[j] as f64).sum();
        let want = if i == 0 { 1.0 } else { 0.0 };
        if (s - want).abs() > 1e-12 * (1.0 + scale) {
            return Err(Error::ConstraintViolated(i));
        }
    }
    Ok(())
}

/// Row 0 = l/‖l‖²; rows 1..M an orthonormal basis of the complement of l.
pub fn default_alpha(l: &[i64]) -> Result<DMatrix<f64>> {
    let m = l.len();
    let lv: Vec<f64> = l.iter().map(|&x| x as f64).collect();
    let norm2: f64 = lv.iter().map(|x| x * x).sum();
    if norm2 == 0.0 {
        return Err(Error::Invalid("l must not vanish".into()));
    }
    let mut rows: Vec<Vec<f64>> = vec![lv.iter().map(|x| x / norm2).collect()];
    let mut basis: Vec<Vec<f64>> = vec![lv.iter().map(|x| x / norm2.sqrt()).collect()];
    for e in 0..m {
        if rows.len() == m {
            break;
        }
        let mut v = vec![0.0; m];
        v[e] = 1.0;
        for q in &basis {
            let d: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            v.iter_mut().for_each(|x| *x /= n);
            basis.push(v.clone());
            rows.push(v);
        }
    }
    Ok(DMatrix::from_fn(m, m, |i, j| rows[i][j]))
}

/// λ_j = Σ_i α_ji n_i.
pub fn lambda_of(alpha: &DMatrix<f64>, n: &[usize]) -> Vec<f64> {
    (0..alpha.nrows())
        .map(|j| (0..alpha.ncols()).map(|i| alpha[(j, i)] * n[i] as f64).sum())
        .collect()
}

/// γ with H₀ = Σ γ_j A_j, i.e. γ = (αᵀ)⁻¹ ω.
pub fn gamma_coeffs(sys: &MultiModeSystem) -> Result<Vec<f64>> {
    let at = sys.alpha.transpose();
    let w = nalgebra::DVector::from_column_slice(&sys.omega);
    let g = at.lu().solve(&w).ok_or(Error::Singular)?;
    Ok(g.iter().copied().collect())
}

/// 𝒢 at the λ-point of n: ‖A*|n⟩‖².
pub fn big_g(sys: &MultiModeSystem, n: &[usize]) -> f64 {
    let f = sys.ladder_factor(n);
    sys.g.eval(n).norm_sqr() * f * f
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    pub lambda_rest: Vec<f64>,
    pub pseudo_vacuum_occupation: Vec<usize>,
    pub lambda00: f64,
}

impl Sector {
    /// Occupation of ladder level k, pv + k·l.
    pub fn level(&self, sys: &MultiModeSystem, k: usize) -> Option<Vec<usize>> {
        sys.shift(&self.pseudo_vacuum_occupation, k as i64)
    }
}

const WALK_LIMIT: usize = 1_000_000;

/// Walks down the A-ladder from `start` until A annihilates the current vector.
pub fn find_pseudo_vacuum(sys: &MultiModeSystem, start: &[usize]) -> Result<Sector> {
    if start.len() != sys.modes() {
        return Err(Error::Invalid(format!("start has {} modes, expected {}", start.len(), sys.modes())));
    }
    let mut n = start.to_vec();
    for _ in 0..WALK_LIMIT {
        match sys.shift(&n, -1) {
            Some(below) if big_g(sys, &below) > 0.0 => n = below,
            _ => {
                let lam = lambda_of(&sys.alpha, &n);
                return Ok(Sector { lambda_rest: lam[1..].to_vec(), lambda00: lam[0], pseudo_vacuum_occupation: n });
            }
        }
    }
    Err(Error::NoPseudoVacuum)
}

/// Length of the ladder above the pseudo-vacuum.
pub fn ladder_dim(sys: &MultiModeSystem, sector: &Sector) -> Dim {
    if sys.l.iter().all(|&x| x >= 0) {
        return Dim::Infinite;
    }
    let mut k = 0;
    loop {
        let cur = sector.level(sys, k).expect("levels below the top are valid");
        match sys.shift(&cur, 1) {
            Some(_) if big_g(sys, &cur) > 0.0 => k += 1,
            _ => return Dim::Finite(k + 1),
        }
    }
}

/// The reduced ladder: b(n) = √𝒢(pv + (n−1)l), h(n) = h_diag(pv + n l), γ₀ = Σ ω_j l_j.
pub fn reduce(sys: &MultiModeSystem, sector: &Sector) -> Result<JacobiSystem> {
    let pv = &sector.pseudo_vacuum_occupation;
    if pv.len() != sys.modes() {
        return Err(Error::InconsistentSector("occupation length differs from mode count".into()));
    }
    if let Some(below) = sys.shift(pv, -1) {
        if big_g(sys, &below) > 0.0 {
            return Err(Error::InconsistentSector("A does not annihilate the pseudo-vacuum".into()));
        }
    }
    let lam = lambda_of(&sys.alpha, pv);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs());
    if !close(lam[0], sector.lambda00) || lam[1..].iter().zip(&sector.lambda_rest).any(|(a, b)| !close(*a, *b)) {
        return Err(Error::InconsistentSector("λ values do not match the pseudo-vacuum".into()));
    }
    let dim = ladder_dim(sys, sector);
    let gamma0: f64 = sys.omega.iter().zip(&sys.l).map(|(w, &l)| w * l as f64).sum();
    let (sb, sh) = (sys.clone(), sys.clone());
    let (pb, ph) = (pv.clone(), pv.clone());
    Ok(JacobiSystem::new(
        move |n| match sb.shift(&pb, n as i64 - 1) {
            Some(occ) if n > 0 => big_g(&sb, &occ).sqrt(),
            _ => 0.0,
        },
        move |n| sh.shift(&ph, n as i64).map(|occ| sh.h_diag.eval(&occ)).unwrap_or(0.0),
        dim,
        gamma0,
    ))
}

/// Phases making the ladder basis e_k = phase_k |pv + k l⟩ carry real b(n):
/// phase_{k+1} = phase_k · conj g_k / |g_k|.
pub fn ladder_phases(sys: &MultiModeSystem, sector: &Sector, len: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(len);
    let mut p = Complex64::new(1.0, 0.0);
    for k in 0..len {
        out.push(p);
        if let Some(occ) = sector.level(sys, k) {
            let g = sys.g.eval(&occ);
            if g.norm() > 0.0 {
                p *= g.conj() / g.norm();
            }
        }
    }
    out
}

/// β_j in ⟨a_j*a_j⟩ = l_j⟨A₀⟩ + β_j: the λ₁…λ_M part of n = α⁻¹λ.
pub fn mode_offsets(sys: &MultiModeSystem, sector: &Sector) -> Result<Vec<f64>> {
    let inv = sys.alpha.clone().try_inverse().ok_or(Error::Singular)?;
    let m = sys.modes();
    Ok((0..m)
        .map(|j| (1..m).map(|i| inv[(j, i)] * sector.lambda_rest[i - 1]).sum())
        .collect())
}

/// Table-pattern classification of a reduced ladder.
#[derive(Debug, Clone, PartialEq)]
pub enum ReducedClass {
    /// b(n)² = v n, h constant.
    Hermite { v: f64, h0: f64 },
    /// b(n)² = n(n+μ−1)/β²; `h_matches` reports h(n) = (2n+μ)/β + ω₀ for some ω₀.
    Laguerre { mu: f64, beta: f64, h_matches: bool },
    /// Constant b and h: the Jacobi strong-field pattern μ = ν = 3/2 on (a, b).
    Jacobi { a: f64, b: f64 },
    Finite { dim: usize },
    Unclassified,
}

impl fmt::Display for ReducedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReducedClass::Hermite { v, h0 } => write!(f, "Hermite-type, v = {v}, h = {h0}, dim = ∞"),
            ReducedClass::Laguerre { mu, beta, h_matches } => write!(
                f,
                "Laguerre-type, μ = {mu}, β = {beta}, dim = ∞{}",
                if *h_matches { "" } else { " (h(n) off-pattern)" }
            ),
            ReducedClass::Jacobi { a, b } => write!(f, "Jacobi-type, μ = ν = 3/2 on ({a}, {b}), dim = ∞"),
            ReducedClass::Finite { dim } => write!(f, "finite ladder, dim = {dim}"),
            ReducedClass::Unclassified => write!(f, "unclassified"),
        }
    }
}

/// Matches b(n), h(n) at 8 sample points against the family patterns with tolerance `tol`.
pub fn classify_reduced(js: &JacobiSystem, tol: f64) -> ReducedClass {
    if let Dim::Finite(d) = js.dim {
        return ReducedClass::Finite { dim: d };
    }
    let pts: Vec<usize> = (1..=8).collect();
    let close = |a: f64, b: f64| (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()));
    let b2 = |n: usize| js.b(n) * js.b(n);
    let h0 = js.h(0);
    let h_const = (0..=8).all(|n| close(js.h(n), h0));

    let v = b2(1);
    if v > 0.0 && pts.iter().all(|&n| close(b2(n), v * n as f64)) && h_const {
        return ReducedClass::Hermite { v, h0 };
    }
    let (b1, b22) = (b2(1), b2(2));
    if b1 > 0.0 && b22 / b1 > 2.0 {
        let mu = 2.0 / (b22 / b1 - 2.0);
        let beta = (mu / b1).sqrt();
        if pts.iter().all(|&n| close(b2(n), n as f64 * (n as f64 + mu - 1.0) / (beta * beta))) {
            let w0 = h0 - mu / beta;
            let h_matches = (0..=8).all(|n| close(js.h(n), (2.0 * n as f64 + mu) / beta + w0));
            return ReducedClass::Laguerre { mu, beta, h_matches };
        }
    }
    let c = js.b(2);
    if c > 0.0 && pts.iter().skip(1).all(|&n| close(js.b(n), c)) && h_const {
        let b1_ok = close(js.b(1), c * 2f64.sqrt()) || close(js.b(1), c);
        if b1_ok {
            return ReducedClass::Jacobi { a: h0 - 2.0 * c, b: h0 + 2.0 * c };
        }
    }
    ReducedClass::Unclassified
}
