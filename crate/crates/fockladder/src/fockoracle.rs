//! Brute-force reference dynamics on truncated Fock spaces: the N×N Jacobi
//! matrix of a ladder, its eigen-based exponential, and exact sparse operators
//! on the multi-mode occupation basis.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::orthopoly::JacobiSystem;
use crate::reduction::MultiModeSystem;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// The N×N truncation of a tridiagonal operator, with a lazily computed eigenbasis.
#[derive(Debug)]
pub struct TruncatedOperator {
    pub dim: usize,
    pub diag: Vec<f64>,
    /// off[k] couples levels k and k+1, i.e. b(k+1).
    pub off: Vec<f64>,
    /// Levels at the top whose results are affected by the cut.
    pub edge_margin: usize,
    eigen: OnceLock<(Vec<f64>, DMatrix<f64>)>,
}

impl Clone for TruncatedOperator {
    fn clone(&self) -> Self {
        TruncatedOperator {
            dim: self.dim,
            diag: self.diag.clone(),
            off: self.off.clone(),
            edge_margin: self.edge_margin,
            eigen: self.eigen.clone(),
        }
    }
}

/// Diagonal h(0..N−1) and off-diagonal b(1..N−1).
pub fn truncated_h(js: &JacobiSystem, n: usize) -> Result<TruncatedOperator> {
    if n == 0 {
        return Err(Error::Invalid("truncation must be positive".into()));
    }
    if !js.dim.contains(n - 1) {
        return Err(Error::IndexOutOfRange { index: n, dim: js.dim.cap(n) });
    }
    Ok(TruncatedOperator {
        dim: n,
        diag: (0..n).map(|k| js.h(k)).collect(),
        off: (1..n).map(|k| js.b(k)).collect(),
        edge_margin: 1,
        eigen: OnceLock::new(),
    })
}

impl TruncatedOperator {
    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = self.diag[k];
        }
        for (k, &b) in self.off.iter().enumerate() {
            m[(k, k + 1)] = b;
            m[(k + 1, k)] = b;
        }
        m
    }

    /// Eigenvalues (ascending) and the orthogonal matrix of eigenvectors (columns).
    pub fn eigen(&self) -> Result<&(Vec<f64>, DMatrix<f64>)> {
        if let Some(e) = self.eigen.get() {
            return Ok(e);
        }
        let se = SymmetricEigen::try_new(self.dense(), f64::EPSILON, 0)
            .ok_or_else(|| Error::Eigen("symmetric eigen-solver did not converge".into()))?;
        let n = self.dim;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
        let vals = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let vecs = DMatrix::from_fn(n, n, |r, c| se.eigenvectors[(r, order[c])]);
        Ok(self.eigen.get_or_init(|| (vals, vecs)))
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigen()?.0.clone())
    }

    /// M v for the tridiagonal matrix.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        (0..n)
            .map(|k| {
                let mut s = v[k] * self.diag[k];
                if k > 0 {
                    s += v[k - 1] * self.off[k - 1];
                }
                if k + 1 < n {
                    s += v[k + 1] * self.off[k];
                }
                s
            })
            .collect()
    }

    /// The full matrix e^{−iMt}.
    pub fn propagator(&self, t: f64) -> Result<DMatrix<Complex64>> {
        let (vals, vecs) = self.eigen()?;
        let n = self.dim;
        let phases: Vec<Complex64> = vals.iter().map(|&e| Complex64::from_polar(1.0, -e * t)).collect();
        Ok(DMatrix::from_fn(n, n, |r, c| {
            (0..n).map(|k| phases[k] * (vecs[(r, k)] * vecs[(c, k)])).sum()
        }))
    }
}

/// e^{−iMt} v via the eigenbasis of M.
pub fn expm_evolve(op: &TruncatedOperator, v: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
    if v.len() > op.dim {
        return Err(Error::IndexOutOfRange { index: v.len(), dim: op.dim });
    }
    if t == 0.0 {
        let mut out = v.to_vec();
        out.resize(op.dim, ZERO);
        return Ok(out);
    }
    let (vals, vecs) = op.eigen()?;
    let n = op.dim;
    let mut coef = vec![ZERO; n];
    for (k, c) in coef.iter_mut().enumerate() {
        let proj: Complex64 = v.iter().enumerate().map(|(r, x)| x * vecs[(r, k)]).sum();
        *c = proj * Complex64::from_polar(1.0, -vals[k] * t);
    }
    Ok((0..n).map(|r| (0..n).map(|k| coef[k] * vecs[(r, k)]).sum()).collect())
}

/// ⟨0|H^k|0⟩ by repeated tridiagonal application (exact: only k/2+1 levels are reached).
pub fn vacuum_moment(js: &JacobiSystem, k: usize) -> Result<f64> {
    let n = js.dim.cap(k / 2 + 2);
    let op = truncated_h(js, n)?;
    let mut v = vec![ZERO; n];
    v[0] = Complex64::new(1.0, 0.0);
    let mut w = v.clone();
    for _ in 0..k / 2 {
        w = op.apply(&w);
    }
    let half: Vec<Complex64> = if k % 2 == 1 { op.apply(&w) } else { w.clone() };
    Ok(w.iter().zip(&half).map(|(a, b)| (a.conj() * b).re).sum())
}

/// Sparse vector on the occupation basis.
pub type SparseState = BTreeMap<Vec<usize>, Complex64>;

/// Operators available on the multi-mode Fock space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    A,
    AStar,
    H0,
    HI,
    /// A_j = Σ_i α_ji a_i*a_i.
    Aj(usize),
    /// a_j*a_j.
    Number(usize),
}

impl Term {
    fn reach(&self, sys: &MultiModeSystem) -> usize {
        match self {
            Term::A | Term::AStar | Term::HI => sys.step(),
            _ => 0,
        }
    }
}

fn total(n: &[usize]) -> usize {
    n.iter().sum()
}

fn add(out: &mut SparseState, n: Vec<usize>, v: Complex64) {
    if v != ZERO {
        *out.entry(n).or_insert(ZERO) += v;
    }
}

/// Exact application of `term` to `v`; fails if any reached occupation exceeds the
/// total-occupation `cutoff`.
pub fn multimode_apply(sys: &MultiModeSystem, term: Term, v: &SparseState, cutoff: usize) -> Result<SparseState> {
    let mut out = SparseState::new();
    for (n, &c) in v {
        if n.len() != sys.modes() {
            return Err(Error::Invalid("occupation vector of wrong length".into()));
        }
        if total(n) + term.reach(sys) > cutoff {
            return Err(Error::CutoffOverflow(format!("{n:?} plus step {} exceeds {cutoff}", term.reach(sys))));
        }
        match term {
            Term::A => apply_lower(sys, n, c, &mut out),
            Term::AStar => apply_raise(sys, n, c, &mut out),
            Term::H0 => {
                let e: f64 = sys.omega.iter().zip(n).map(|(w, &k)| w * k as f64).sum();
                add(&mut out, n.clone(), c * e);
            }
            Term::HI => {
                apply_lower(sys, n, c, &mut out);
                apply_raise(sys, n, c, &mut out);
                add(&mut out, n.clone(), c * sys.h_diag.eval(n));
            }
            Term::Aj(j) => {
                let lam: f64 = (0..sys.modes()).map(|i| sys.alpha[(j, i)] * n[i] as f64).sum();
                add(&mut out, n.clone(), c * lam);
            }
            Term::Number(j) => add(&mut out, n.clone(), c * n[j] as f64),
        }
    }
    out.retain(|_, v| *v != ZERO);
    Ok(out)
}

/// Applies the bare monomial Π (a_j*)^{l_j} (a_j^{|l_j|} for l_j < 0) one elementary
/// creation/annihilation operator at a time; None when it annihilates |n⟩.
fn bare_raise(sys: &MultiModeSystem, n: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut occ = n.to_vec();
    let mut amp = 1.0;
    for (j, &lj) in sys.l.iter().enumerate() {
        for _ in 0..lj.unsigned_abs() {
            if lj > 0 {
                occ[j] += 1;
                amp *= (occ[j] as f64).sqrt();
            } else {
                if occ[j] == 0 {
                    return None;
                }
                amp *= (occ[j] as f64).sqrt();
                occ[j] -= 1;
            }
        }
    }
    Some((occ, amp))
}

/// ⟨n+l|A*|n⟩ from elementary operators.
fn raise_amp(sys: &MultiModeSystem, n: &[usize]) -> Option<(Vec<usize>, Complex64)> {
    bare_raise(sys, n).map(|(up, amp)| (up, sys.g.eval(n).conj() * amp))
}

fn apply_raise(sys: &MultiModeSystem, n: &[usize], c: Complex64, out: &mut SparseState) {
    if let Some((up, amp)) = raise_amp(sys, n) {
        add(out, up, c * amp);
    }
}

fn apply_lower(sys: &MultiModeSystem, n: &[usize], c: Complex64, out: &mut SparseState) {
    // A|n⟩ = conj⟨n|A*|n−l⟩ |n−l⟩.
    if let Some(down) = sys.shift(n, -1) {
        if let Some((_, amp)) = raise_amp(sys, &down) {
            add(out, down, c * amp.conj());
        }
    }
}

/// All occupation vectors of `modes` modes with total ≤ `max_total`.
pub fn simplex_states(modes: usize, max_total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; modes];
    fn rec(j: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if j == cur.len() {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur[j] = k;
            rec(j + 1, left - k, cur, out);
        }
        cur[j] = 0;
    }
    rec(0, max_total, &mut cur, &mut out);
    out
}

pub fn norm(v: &SparseState) -> f64 {
    v.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn diff(a: &SparseState, b: &SparseState) -> f64 {
    let mut d = a.clone();
    for (k, v) in b {
        *d.entry(k.clone()).or_insert(ZERO) -= v;
    }
    norm(&d)
}

/// max ‖[X,Y]|n⟩‖ over basis states far enough below `cutoff` that no edge is touched.
pub fn commutator_norm(sys: &MultiModeSystem, x: Term, y: Term, cutoff: usize) -> Result<f64> {
    let margin = x.reach(sys) + y.reach(sys);
    if margin > cutoff {
        return Err(Error::CutoffOverflow(format!("cutoff {cutoff} below the edge margin {margin}")));
    }
    let mut worst: f64 = 0.0;
    for n in simplex_states(sys.modes(), cutoff - margin) {
        let mut v = SparseState::new();
        v.insert(n, Complex64::new(1.0, 0.0));
        let xy = multimode_apply(sys, x, &multimode_apply(sys, y, &v, cutoff)?, cutoff)?;
        let yx = multimode_apply(sys, y, &multimode_apply(sys, x, &v, cutoff)?, cutoff)?;
        worst = worst.max(diff(&xy, &yx));
    }
    Ok(worst)
}

/// Truncation of a multi-mode Fock space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// Total occupation ≤ N.
    Simplex(usize),
    /// Every mode occupation ≤ N.
    PerMode(usize),
}

impl Truncation {
    pub fn admits(&self, n: &[usize]) -> bool {
        match *self {
            Truncation::Simplex(m) => total(n) <= m,
            Truncation::PerMode(m) => n.iter().all(|&k| k <= m),
        }
    }

    pub fn states(&self, modes: usize) -> Vec<Vec<usize>> {
        match *self {
            Truncation::Simplex(m) => simplex_states(modes, m),
            Truncation::PerMode(m) => {
                let mut out = vec![vec![]];
                for _ in 0..modes {
                    out = out
                        .into_iter()
                        .flat_map(|p: Vec<usize>| {
                            (0..=m).map(move |k| {
                                let mut q = p.clone();
                                q.push(k);
                                q
                            })
                        })
                        .collect();
                }
                out
            }
        }
    }
}

/// One ladder n₀ + k l inside the truncation with its exact Hermitian block.
#[derive(Debug, Clone)]
struct Chain {
    states: Vec<Vec<usize>>,
    vals: Vec<f64>,
    vecs: DMatrix<Complex64>,
}

/// H_I on a truncated multi-mode space, block-diagonalized along the A-ladders.
#[derive(Debug, Clone)]
pub struct MultiModeOracle {
    pub sys: MultiModeSystem,
    pub truncation: Truncation,
    chains: Vec<Chain>,
    index: HashMap<Vec<usize>, (usize, usize)>,
}

impl MultiModeOracle {
    pub fn new(sys: &MultiModeSystem, truncation: Truncation) -> Result<Self> {
        let mut chains = Vec::new();
        let mut index = HashMap::new();
        for n in truncation.states(sys.modes()) {
            if index.contains_key(&n) {
                continue;
            }
            let mut start = n.clone();
            while let Some(d) = sys.shift(&start, -1).filter(|d| truncation.admits(d)) {
                start = d;
            }
            let mut states = vec![start.clone()];
            while let Some(u) = sys.shift(states.last().expect("non-empty"), 1).filter(|u| truncation.admits(u)) {
                states.push(u);
            }
            let len = states.len();
            let mut h = DMatrix::<Complex64>::zeros(len, len);
            for (k, s) in states.iter().enumerate() {
                h[(k, k)] = Complex64::new(sys.h_diag.eval(s), 0.0);
                if k + 1 < len {
                    let up = raise_amp(sys, s).map_or(Complex64::new(0.0, 0.0), |(_, a)| a);
                    h[(k + 1, k)] = up;
                    h[(k, k + 1)] = up.conj();
                }
            }
            let se = SymmetricEigen::try_new(h, f64::EPSILON, 0)
                .ok_or_else(|| Error::Eigen("Hermitian block eigen-solver did not converge".into()))?;
            let ci = chains.len();
            for (k, s) in states.iter().enumerate() {
                index.insert(s.clone(), (ci, k));
            }
            chains.push(Chain { states, vals: se.eigenvalues.iter().copied().collect(), vecs: se.eigenvectors });
        }
        Ok(MultiModeOracle { sys: sys.clone(), truncation, chains, index })
    }

    pub fn basis_len(&self) -> usize {
        self.index.len()
    }

    /// e^{−iH_I t}ψ, with the free evolution e^{−iH₀t} appended when `full` is set.
    pub fn evolve(&self, psi: &SparseState, t: f64, full: bool) -> Result<SparseState> {
        let mut by_chain: BTreeMap<usize, Vec<(usize, Complex64)>> = BTreeMap::new();
        for (n, &c) in psi {
            let &(ci, k) = self
                .index
                .get(n)
                .ok_or_else(|| Error::CutoffOverflow(format!("{n:?} outside the truncation")))?;
            by_chain.entry(ci).or_default().push((k, c));
        }
        let mut out = SparseState::new();
        for (ci, entries) in by_chain {
            let ch = &self.chains[ci];
            let len = ch.states.len();
            let mut v = DVector::<Complex64>::zeros(len);
            for (k, c) in entries {
                v[k] += c;
            }
            let mut coef = ch.vecs.adjoint() * v;
            for (k, c) in coef.iter_mut().enumerate() {
                *c *= Complex64::from_polar(1.0, -ch.vals[k] * t);
            }
            let w = &ch.vecs * coef;
            for (k, s) in ch.states.iter().enumerate() {
                let mut val = w[k];
                if full {
                    let e: f64 = self.sys.omega.iter().zip(s).map(|(om, &m)| om * m as f64).sum();
                    val *= Complex64::from_polar(1.0, -e * t);
                }
                add(&mut out, s.clone(), val);
            }
        }
        Ok(out)
    }

    /// ⟨ψ|a_j*a_j|ψ⟩ / ⟨ψ|ψ⟩.
    pub fn mean_occupation(psi: &SparseState, j: usize) -> f64 {
        let nrm: f64 = psi.values().map(|c| c.norm_sqr()).sum();
        psi.iter().map(|(n, c)| n[j] as f64 * c.norm_sqr()).sum::<f64>() / nrm
    }
}

/// Product of Gaussian coherent states, each truncated at `cutoff` quanta.
pub fn product_coherent(zetas: &[Complex64], cutoff: usize) -> SparseState {
    let mode_amps: Vec<Vec<Complex64>> = zetas.iter().map(|&z| coherent_amplitudes(z, cutoff)).collect();
    let mut out = SparseState::new();
    for n in Truncation::PerMode(cutoff).states(zetas.len()) {
        let c: Complex64 = n.iter().enumerate().map(|(j, &k)| mode_amps[j][k]).product();
        add(&mut out, n, c);
    }
    out
}

/// e^{−|ζ|²/2} ζ^n / √n! for n = 0..=cutoff.
pub fn coherent_amplitudes(z: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(cutoff + 1);
    let mut c = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    for n in 0..=cutoff {
        if n > 0 {
            c = c * z / (n as f64).sqrt();
        }
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::gauss_rule;
    use crate::orthopoly::{recurrence, PearsonData};
    use crate::reduction::{big_g, find_pseudo_vacuum, Coupling, Diagonal};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn truncated_h_examples() {
        let js = recurrence(&PearsonData::hermite_canonical());
        let one = truncated_h(&js, 1).unwrap();
        assert_eq!(one.dense(), DMatrix::from_element(1, 1, js.h(0)));
        let two = truncated_h(&js, 2).unwrap();
        let ev = two.eigenvalues().unwrap();
        assert!((ev[0] + 0.5f64.sqrt()).abs() < 1e-15 && (ev[1] - 0.5f64.sqrt()).abs() < 1e-15);
        let op = truncated_h(&js, 9).unwrap();
        let rule = gauss_rule(&js, 9).unwrap();
        for (a, b) in op.eigenvalues().unwrap().iter().zip(&rule.nodes) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn expm_is_unitary() {
        let js = recurrence(&PearsonData::laguerre_canonical(2.0).unwrap());
        let op = truncated_h(&js, 60).unwrap();
        let v: Vec<Complex64> = (0..5).map(|k| c(1.0 / (k + 1) as f64, 0.3 * k as f64)).collect();
        assert_eq!(expm_evolve(&op, &v, 0.0).unwrap()[..5], v[..]);
        let n0: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        let out = expm_evolve(&op, &v, 1.7).unwrap();
        let n1: f64 = out.iter().map(|x| x.norm_sqr()).sum();
        assert!((n0 - n1).abs() < 1e-12);
        let u = op.propagator(1.7).unwrap();
        for r in 0..10 {
            let direct: Complex64 = (0..5).map(|k| u[(r, k)] * v[k]).sum();
            assert!((direct - out[r]).norm() < 1e-13);
        }
    }

    #[test]
    fn vacuum_moment_matches_dense_power() {
        let js = recurrence(&PearsonData::jacobi(-0.5, 2.0, 1.7, 2.4, 3.0).unwrap());
        let m = truncated_h(&js, 12).unwrap().dense();
        let mut p = DMatrix::<f64>::identity(12, 12);
        for k in 0..=10 {
            assert!((vacuum_moment(&js, k).unwrap() - p[(0, 0)]).abs() < 1e-12 * (1.0 + p[(0, 0)].abs()));
            p = &p * &m;
        }
    }

    fn amplifier() -> MultiModeSystem {
        MultiModeSystem::new(vec![1.0, 1.0], vec![1, 1], Coupling::Constant(c(0.0, -0.6)), Diagonal::Zero).unwrap()
    }

    fn single(n: usize) -> SparseState {
        let mut v = SparseState::new();
        v.insert(vec![n], c(1.0, 0.0));
        v
    }

    #[test]
    fn sparse_operator_examples() {
        let amp = amplifier();
        let pv = find_pseudo_vacuum(&amp, &[3, 1]).unwrap().pseudo_vacuum_occupation;
        let mut v = SparseState::new();
        v.insert(pv, c(1.0, 0.0));
        assert!(multimode_apply(&amp, Term::A, &v, 20).unwrap().is_empty());

        let mut w = SparseState::new();
        w.insert(vec![3, 4], c(0.5, 0.1));
        w.insert(vec![1, 2], c(-0.2, 0.7));
        let a0a = multimode_apply(&amp, Term::Aj(0), &multimode_apply(&amp, Term::A, &w, 20).unwrap(), 20).unwrap();
        let aa0 = multimode_apply(&amp, Term::A, &multimode_apply(&amp, Term::Aj(0), &w, 20).unwrap(), 20).unwrap();
        let a = multimode_apply(&amp, Term::A, &w, 20).unwrap();
        let mut comm = a0a.clone();
        for (k, x) in &aa0 {
            *comm.entry(k.clone()).or_insert(ZERO) -= x;
        }
        assert!(diff(&comm, &a.iter().map(|(k, x)| (k.clone(), -x)).collect()) < 1e-12);

        for n in [[0usize, 0], [3, 4], [7, 1]] {
            let mut b = SparseState::new();
            b.insert(n.to_vec(), c(1.0, 0.0));
            let up = multimode_apply(&amp, Term::AStar, &b, 20).unwrap();
            assert!((norm(&up).powi(2) - big_g(&amp, &n)).abs() < 1e-12);
        }
        assert!(matches!(multimode_apply(&amp, Term::AStar, &single2(9, 10), 20), Err(Error::CutoffOverflow(_))));
    }

    fn single2(a: usize, b: usize) -> SparseState {
        let mut v = SparseState::new();
        v.insert(vec![a, b], c(1.0, 0.0));
        v
    }

    #[test]
    fn commutator_examples() {
        let amp = amplifier();
        assert!(commutator_norm(&amp, Term::Aj(1), Term::HI, 16).unwrap() < 1e-10);
        assert_eq!(commutator_norm(&amp, Term::Aj(0), Term::Aj(0), 16).unwrap(), 0.0);
        assert!(commutator_norm(&amp, Term::Aj(0), Term::HI, 16).unwrap() > 0.1);
    }

    #[test]
    fn canonical_commutation_on_interior() {
        let s = MultiModeSystem::new(vec![1.0], vec![1], Coupling::Constant(c(1.0, 0.0)), Diagonal::Zero).unwrap();
        for n in 0..15 {
            let v = single(n);
            let aad = multimode_apply(&s, Term::A, &multimode_apply(&s, Term::AStar, &v, 16).unwrap(), 16).unwrap();
            let ada = multimode_apply(&s, Term::AStar, &multimode_apply(&s, Term::A, &v, 16).unwrap(), 16).unwrap();
            let mut d = aad.clone();
            for (k, x) in &ada {
                *d.entry(k.clone()).or_insert(ZERO) -= x;
            }
            assert!(diff(&d, &v) < 1e-12);
        }
    }

    #[test]
    fn chain_evolution_matches_ladder_oracle() {
        let amp = amplifier();
        let oracle = MultiModeOracle::new(&amp, Truncation::Simplex(40)).unwrap();
        let t = 0.8;
        let sec = find_pseudo_vacuum(&amp, &[2, 0]).unwrap();
        let js = crate::reduction::reduce(&amp, &sec).unwrap();
        let op = truncated_h(&js, 20).unwrap();
        let ladder = expm_evolve(&op, &[c(1.0, 0.0)], t).unwrap();
        let out = oracle.evolve(&single2(2, 0), t, false).unwrap();
        let phases = crate::reduction::ladder_phases(&amp, &sec, 20);
        for k in 0..8 {
            let occ = sec.level(&amp, k).unwrap();
            let got = out.get(&occ).copied().unwrap_or(ZERO);
            assert!((got - ladder[k] * phases[k]).norm() < 1e-12, "level {k}");
        }
        let n0: f64 = out.values().map(|x| x.norm_sqr()).sum();
        assert!((n0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn per_mode_truncation_counts() {
        assert_eq!(Truncation::PerMode(3).states(2).len(), 16);
        assert_eq!(Truncation::Simplex(3).states(2).len(), 10);
        let amp = amplifier();
        assert_eq!(MultiModeOracle::new(&amp, Truncation::PerMode(5)).unwrap().basis_len(), 36);
    }
}
