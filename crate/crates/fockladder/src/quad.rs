//! Adaptive Gauss–Kronrod (7/15) quadrature on finite and infinite intervals.
//!
//! Infinite ranges are mapped onto `[0, 1)` with `ω = lo + u/(1−u)`; the
//! Kronrod nodes never touch the endpoint, so integrable endpoint behaviour is fine.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn mag(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl QuadValue for f64 {
    fn mag(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn mag(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for QuadTol {
    fn default() -> Self {
        QuadTol { abs: 1e-13, rel: 1e-11, max_intervals: 4000 }
    }
}

impl QuadTol {
    pub fn new(abs: f64, rel: f64) -> Self {
        QuadTol { abs, rel, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

struct Piece<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Piece<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Piece<T> {}
impl<T> PartialOrd for Piece<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Piece<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron = kron + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    let err = (kron - gauss).mag();
    (kron, err)
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<T, F>(f: F, a: f64, b: f64, tol: &QuadTol) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature("finite interval required".into()));
    }
    if a == b {
        return Ok(Estimate { value: T::default(), error: 0.0, evaluations: 0 });
    }
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, error: e });
    let mut total = v;
    let mut total_err = e;
    let mut evals = 15;
    loop {
        if !total.is_finite_value() {
            return Err(Error::Quadrature("non-finite integrand value".into()));
        }
        let target = tol.abs.max(tol.rel * total.mag());
        if total_err <= target {
            break;
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::Quadrature(format!(
                "error {total_err:.3e} above target {target:.3e} after {} intervals",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("non-empty heap");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // Interval can no longer be split in floating point.
            heap.push(Piece { error: 0.0, ..worst });
            total_err = heap.iter().map(|p| p.error).sum();
            if total_err <= target {
                break;
            }
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, m);
        let (v2, e2) = gk15(&f, m, worst.b);
        evals += 30;
        total = total - worst.value + v1 + v2;
        total_err = total_err - worst.error + e1 + e2;
        heap.push(Piece { a: worst.a, b: m, value: v1, error: e1 });
        heap.push(Piece { a: m, b: worst.b, value: v2, error: e2 });
        if heap.len() % 64 == 0 {
            // Re-sum to shed accumulated rounding in the running totals.
            total = heap.iter().fold(T::default(), |acc, p| acc + p.value);
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    let value = heap.iter().fold(T::default(), |acc, p| acc + p.value);
    Ok(Estimate { value, error: total_err, evaluations: evals })
}

/// Integrates `f` over `[lo, ∞)`.
pub fn integrate_upper<T, F>(f: F, lo: f64, tol: &QuadTol) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    integrate(
        |u: f64| {
            let d = 1.0 - u;
            let x = lo + u / d;
            let v = f(x);
            if v.mag() == 0.0 {
                T::default()
            } else {
                v * (1.0 / (d * d))
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Integrates `f` over `(−∞, hi]`.
pub fn integrate_lower<T, F>(f: F, hi: f64, tol: &QuadTol) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    integrate_upper(|x: f64| f(2.0 * hi - x), hi, tol)
}

/// Integrates `f` over the whole real line, split at `center`.
pub fn integrate_line<T, F>(f: F, center: f64, tol: &QuadTol) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let half = QuadTol { abs: 0.5 * tol.abs, ..*tol };
    let lo = integrate_lower(&f, center, &half)?;
    let hi = integrate_upper(&f, center, &half)?;
    Ok(Estimate {
        value: lo.value + hi.value,
        error: lo.error + hi.error,
        evaluations: lo.evaluations + hi.evaluations,
    })
}

/// Integrates over an interval whose endpoints may be infinite.
pub fn integrate_range<T, F>(f: F, lo: f64, hi: f64, tol: &QuadTol) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => integrate(f, lo, hi, tol),
        (true, false) => integrate_upper(f, lo, tol),
        (false, true) => integrate_lower(f, hi, tol),
        (false, false) => integrate_line(f, 0.0, tol),
    }
}
