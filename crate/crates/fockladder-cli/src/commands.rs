//! The five subcommands. Each turns a scenario into tables plus tolerance checks.
//! Time grids are evaluated in parallel; rows are collected in grid order.

use fockladder::coherent::strip_for;
use fockladder::fockoracle::{
    expm_evolve, multimode_apply, norm, product_coherent, truncated_h, vacuum_moment, MultiModeOracle, SparseState,
    Term, TruncatedOperator, Truncation,
};
use fockladder::measure::{density, moment, normalize};
use fockladder::observables::{
    alpha_dispersion, alpha_moment, amplifier_mean_photon, cluster_correlation, correlation, h_expectation,
    modulation_mean, number_moment, number_moment_closed, picture_phase, reduced_family, state_coeffs, total_energy,
    Picture, QuantumState,
};
use fockladder::orthopoly::{Dim, Family, JacobiSystem, PearsonData};
use fockladder::propagator::{sigma_mn, unitarity_sum, PropagatorContext};
use fockladder::reduction::{
    classify_reduced, find_pseudo_vacuum, reduce as reduce_ladder, Coupling, Diagonal, MultiModeSystem, Sector,
};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{PictureSpec, ScenarioConfig};
use crate::table::{Cell, Check, Column, Report, Table};
use crate::CliError;

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    pub oracle: bool,
    pub truncation: Option<usize>,
    pub tol: Option<f64>,
}

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn tolerance(opts: &Options, cfg: &ScenarioConfig, default: f64) -> f64 {
    opts.tol.or(cfg.tolerances.oracle).unwrap_or(default)
}

fn scaled_dev(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

fn family_context(cfg: &ScenarioConfig) -> Result<PropagatorContext, CliError> {
    let fam = cfg.family()?;
    Ok(PropagatorContext::new(&fam.pearson()?).with_gamma0(fam.gamma0()))
}

fn default_window(pd: &PearsonData) -> (f64, f64) {
    match pd.family {
        Family::Hermite => {
            let (c, s) = (-pd.a0 / pd.a1, pd.hermite_v().sqrt());
            (c - 6.0 * s, c + 6.0 * s)
        }
        Family::Laguerre => {
            let (lo, mu, beta) = (pd.support.0, pd.mu(), pd.laguerre_beta());
            (lo, lo + (mu + 10.0 * mu.sqrt() + 10.0) / beta)
        }
        Family::Jacobi => pd.support,
    }
}

/// Density of the spectral measure on a grid and its moments.
pub fn spectrum(cfg: &ScenarioConfig, opts: &Options) -> Result<Report, CliError> {
    let pd = cfg.family()?.pearson()?;
    let sm = normalize(&pd);
    let (dlo, dhi) = default_window(&pd);
    let spec = &cfg.spectrum;
    let (lo, hi) = (spec.lo.unwrap_or(dlo), spec.hi.unwrap_or(dhi));
    let points = spec.points.unwrap_or(201);
    if !(hi > lo) || points < 2 {
        return Err(CliError::Config("spectrum: need hi > lo and at least 2 points".into()));
    }
    let mut dens = Table::new("density", vec![Column::new("omega", "energy"), Column::new("rho", "1/energy")]);
    for k in 0..points {
        let w = if k + 1 == points { hi } else { lo + (hi - lo) * k as f64 / (points - 1) as f64 };
        dens.push(vec![Cell::Num(w), Cell::Num(density(&sm, w))]);
    }

    let kmax = spec.moments.unwrap_or(6);
    let mut cols = vec![Column::new("k", "order"), Column::new("mu_k", "energy^k")];
    if opts.oracle {
        cols.push(Column::new("oracle_mu_k", "energy^k"));
        cols.push(Column::new("rel_dev", "1"));
    }
    let mut moments = Table::new("moments", cols);
    let js = fockladder::orthopoly::recurrence(&pd);
    let mut worst: f64 = 0.0;
    for k in 0..=kmax {
        let m = moment(&sm, k)?;
        let mut row = vec![Cell::Int(k as i64), Cell::Num(m)];
        if opts.oracle {
            let o = vacuum_moment(&js, k)?;
            let dev = (m - o).abs() / o.abs().max(1.0);
            worst = worst.max(dev);
            row.extend([Cell::Num(o), Cell::Num(dev)]);
        }
        moments.push(row);
    }
    let mut checks = Vec::new();
    if opts.oracle {
        checks.push(Check::at_most("moments vs tridiagonal powers", worst, tolerance(opts, cfg, 1e-10)));
    }
    Ok(Report { command: "spectrum", tables: vec![dens, moments], checks })
}

fn basis(n: usize, dim: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; dim];
    v[n] = Complex64::new(1.0, 0.0);
    v
}

fn oracle_operator(js: &JacobiSystem, opts: &Options, default: usize) -> Result<TruncatedOperator, CliError> {
    let n = js.dim.cap(opts.truncation.unwrap_or(default));
    let op = truncated_h(js, n)?;
    // Build the cached eigenbasis before the parallel sweep.
    op.eigen()?;
    Ok(op)
}

/// σ̂ₘₙ(t + iy) over the time grid, with optional row sums and oracle columns.
pub fn propagate(cfg: &ScenarioConfig, opts: &Options) -> Result<Report, CliError> {
    let ctx = family_context(cfg)?;
    let times = cfg.times()?;
    let spec = &cfg.propagate;
    let pairs: Vec<[usize; 2]> = if spec.pairs.is_empty() { vec![[0, 0]] } else { spec.pairs.clone() };
    let y = spec.imag;
    if y != 0.0 {
        let strip = strip_for(&ctx.pd);
        if !strip.doubled_contains(y) {
            return Err(CliError::Library(fockladder::Error::OutsideStrip { im: y, lo: 2.0 * strip.r, hi: 2.0 * strip.s }));
        }
        if !spec.unitarity.is_empty() || opts.oracle {
            return Err(CliError::Unsupported(
                "unitarity rows and --oracle need real times (propagate.imag = 0)".into(),
            ));
        }
    }
    let op = if opts.oracle { Some(oracle_operator(&ctx.js, opts, 200)?) } else { None };
    if let Some(op) = &op {
        if let Some(&[m, n]) = pairs.iter().find(|&&[m, n]| m.max(n) >= op.dim) {
            return Err(CliError::Config(format!("pair ({m}, {n}) lies outside the oracle truncation {}", op.dim)));
        }
    }

    let pic = "interaction";
    let mut cols = vec![Column::new("t", "time")];
    for [m, n] in &pairs {
        cols.push(Column::pictured(format!("re_sigma_{m}_{n}"), "amplitude", pic));
        cols.push(Column::pictured(format!("im_sigma_{m}_{n}"), "amplitude", pic));
    }
    for n in &spec.unitarity {
        cols.push(Column::pictured(format!("row_norm_{n}"), "probability", pic));
    }
    if op.is_some() {
        for [m, n] in &pairs {
            cols.push(Column::pictured(format!("oracle_re_sigma_{m}_{n}"), "amplitude", pic));
            cols.push(Column::pictured(format!("oracle_im_sigma_{m}_{n}"), "amplitude", pic));
        }
        cols.push(Column::new("max_dev", "amplitude"));
    }

    let rows: Vec<(Vec<Cell>, f64, f64)> = times
        .par_iter()
        .map(|&t| -> Result<(Vec<Cell>, f64, f64), CliError> {
            let z = Complex64::new(t, y);
            let mut row = vec![Cell::Num(t)];
            let mut values = Vec::with_capacity(pairs.len());
            for &[m, n] in &pairs {
                let v = sigma_mn(&ctx, m, n, z)?;
                values.push(v);
                row.extend([Cell::Num(v.re), Cell::Num(v.im)]);
            }
            let mut unit_dev: f64 = 0.0;
            for &n in &spec.unitarity {
                let (s, _) = unitarity_sum(&ctx, n, t, 100_000)?;
                unit_dev = unit_dev.max((s - 1.0).abs());
                row.push(Cell::Num(s));
            }
            let mut dev: f64 = 0.0;
            if let Some(op) = &op {
                for (&[m, n], v) in pairs.iter().zip(&values) {
                    let col = expm_evolve(op, &basis(n, op.dim), t)?;
                    let o = col[m];
                    dev = dev.max((o - v).norm());
                    row.extend([Cell::Num(o.re), Cell::Num(o.im)]);
                }
                row.push(Cell::Num(dev));
            }
            Ok((row, dev, unit_dev))
        })
        .collect::<Result<_, _>>()?;

    let mut table = Table::new("propagator", cols);
    let (mut worst, mut worst_unit) = (0.0f64, 0.0f64);
    for (row, dev, unit_dev) in rows {
        worst = worst.max(dev);
        worst_unit = worst_unit.max(unit_dev);
        table.push(row);
    }
    let mut checks = Vec::new();
    if op.is_some() {
        checks.push(Check::at_most("propagator vs truncated oracle", worst, tolerance(opts, cfg, 1e-8)));
    }
    if !spec.unitarity.is_empty() {
        let tol = cfg.tolerances.unitarity.unwrap_or(1e-8);
        checks.push(Check::at_most("row norms", worst_unit, tol));
    }
    Ok(Report { command: "propagate", tables: vec![table], checks })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Observable {
    Energy,
    Number(u32),
    NumberClosed(u32),
    Correlation(usize, usize),
    Cluster(usize, usize),
    Alpha(u32),
    AlphaDispersion,
    Mode(usize),
}

fn parse_observable(s: &str) -> Result<Observable, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::Config(format!("expect.observables: cannot parse {s:?}"));
    let num = |i: usize| -> Result<usize, CliError> { parts.get(i).ok_or_else(bad)?.trim().parse().map_err(|_| bad()) };
    let obs = match (parts[0].trim(), parts.len()) {
        ("energy", 1) => Observable::Energy,
        ("number", 2) => Observable::Number(num(1)? as u32),
        ("number_closed", 2) => Observable::NumberClosed(num(1)? as u32),
        ("correlation", 3) => Observable::Correlation(num(1)?, num(2)?),
        ("cluster", 3) => Observable::Cluster(num(1)?, num(2)?),
        ("alpha", 2) => Observable::Alpha(num(1)? as u32),
        ("alpha_dispersion", 1) => Observable::AlphaDispersion,
        ("mode", 2) => Observable::Mode(num(1)?),
        _ => return Err(bad()),
    };
    Ok(obs)
}

impl Observable {
    /// Column stems, unit, and whether the value is complex.
    fn describe(&self) -> (String, String, bool) {
        match *self {
            Observable::Energy => ("energy".into(), "energy".into(), false),
            Observable::Number(l) => (format!("N^{l}"), format!("quanta^{l}"), false),
            Observable::NumberClosed(l) => (format!("N^{l}_closed"), format!("quanta^{l}"), false),
            Observable::Correlation(r, s) => (format!("a*^{r}a^{s}"), format!("quanta^{}", (r + s) as f64 / 2.0), true),
            Observable::Cluster(r, s) => (format!("A*^{r}A^{s}"), format!("energy^{}", r + s), true),
            Observable::Alpha(l) => (format!("alpha^{l}"), format!("time^{l}"), true),
            Observable::AlphaDispersion => ("alpha_dispersion".into(), "time^2".into(), true),
            Observable::Mode(j) => (format!("n_{j}"), "quanta".into(), false),
        }
    }

    fn has_oracle(&self) -> bool {
        !matches!(self, Observable::Alpha(_) | Observable::AlphaDispersion | Observable::Mode(_))
    }
}

struct ExpectSetup {
    ctx: Option<PropagatorContext>,
    multimode: Option<(MultiModeSystem, Sector)>,
}

fn expect_setup(cfg: &ScenarioConfig) -> Result<ExpectSetup, CliError> {
    match (&cfg.family, &cfg.multimode) {
        (Some(_), Some(_)) => Err(CliError::Config("give either [family] or [multimode], not both".into())),
        (Some(_), None) => Ok(ExpectSetup { ctx: Some(family_context(cfg)?), multimode: None }),
        (None, Some(mm)) => {
            let sys = mm.system()?;
            let start = mm.start.clone().unwrap_or_else(|| vec![0; sys.modes()]);
            let sector = find_pseudo_vacuum(&sys, &start)?;
            let js = reduce_ladder(&sys, &sector)?;
            let ctx = reduced_family(&js).map(|pd| PropagatorContext::new(&pd).with_gamma0(js.gamma0));
            Ok(ExpectSetup { ctx, multimode: Some((sys, sector)) })
        }
        (None, None) => Err(CliError::Config("missing [family] or [multimode] table".into())),
    }
}

fn evaluate(
    setup: &ExpectSetup,
    obs: Observable,
    state: &QuantumState,
    t: f64,
    picture: Picture,
) -> Result<Complex64, CliError> {
    let need_ctx = || {
        setup.ctx.as_ref().ok_or_else(|| {
            CliError::Unsupported(format!("{obs:?} needs a reduced ladder of Hermite, Laguerre or strong-field Jacobi type"))
        })
    };
    let real = |x: f64| Complex64::new(x, 0.0);
    Ok(match obs {
        Observable::Energy => {
            let ctx = need_ctx()?;
            match picture {
                Picture::Interaction => real(h_expectation(ctx, state)?),
                Picture::Full => real(total_energy(ctx, state, t)?),
            }
        }
        Observable::Number(l) => real(number_moment(need_ctx()?, state, l, t)?),
        Observable::NumberClosed(l) => match state {
            QuantumState::SpectralCoherent(z) => real(number_moment_closed(need_ctx()?, *z, l, t)?),
            _ => return Err(CliError::Unsupported("number_closed is defined for spectral coherent states only".into())),
        },
        Observable::Correlation(r, s) => {
            let ctx = need_ctx()?;
            correlation(ctx, state, r, s, t)? * picture_phase(ctx.js.gamma0, r, s, t, picture)
        }
        Observable::Cluster(r, s) => cluster_correlation(need_ctx()?, state, r, s, t, picture)?,
        Observable::Alpha(_) | Observable::AlphaDispersion if picture == Picture::Full => {
            return Err(CliError::Unsupported("alpha moments are reported in the interaction picture only".into()))
        }
        Observable::Alpha(l) => alpha_moment(need_ctx()?, state, l, t)?,
        Observable::AlphaDispersion => alpha_dispersion(need_ctx()?, state, t)?,
        Observable::Mode(j) => {
            let (sys, sector) = setup
                .multimode
                .as_ref()
                .ok_or_else(|| CliError::Unsupported("mode occupations need a [multimode] system".into()))?;
            real(modulation_mean(sys, sector, state, j, t)?)
        }
    })
}

/// The same observable from a truncated state vector evolved by the matrix exponential.
fn evaluate_oracle(
    js: &JacobiSystem,
    psi: &[Complex64],
    op: &TruncatedOperator,
    obs: Observable,
    t: f64,
    picture: Picture,
) -> Complex64 {
    let lower = |v: &[Complex64], f: &dyn Fn(usize) -> f64| -> Vec<Complex64> {
        let mut out = vec![ZERO; v.len()];
        for k in 1..v.len() {
            out[k - 1] = v[k] * f(k);
        }
        out
    };
    let inner = |a: &[Complex64], b: &[Complex64]| -> Complex64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    let moment = |l: u32| -> f64 { psi.iter().enumerate().map(|(k, c)| (k as f64).powi(l as i32) * c.norm_sqr()).sum() };
    let corr = |r: usize, s: usize, f: &dyn Fn(usize) -> f64| -> Complex64 {
        let (mut u, mut v) = (psi.to_vec(), psi.to_vec());
        for _ in 0..r {
            u = lower(&u, f);
        }
        for _ in 0..s {
            v = lower(&v, f);
        }
        inner(&u, &v)
    };
    let real = |x: f64| Complex64::new(x, 0.0);
    match obs {
        Observable::Energy => {
            let hi = inner(psi, &op.apply(psi)).re;
            match picture {
                Picture::Interaction => real(hi),
                Picture::Full => real(hi + js.gamma0 * moment(1)),
            }
        }
        Observable::Number(l) | Observable::NumberClosed(l) => real(moment(l)),
        Observable::Correlation(r, s) => {
            corr(r, s, &|k| (k as f64).sqrt()) * picture_phase(js.gamma0, r, s, t, picture)
        }
        Observable::Cluster(r, s) => corr(r, s, &|k| js.b(k)) * picture_phase(js.gamma0, r, s, t, picture),
        Observable::Alpha(_) | Observable::AlphaDispersion | Observable::Mode(_) => unreachable!("no oracle route"),
    }
}

/// Time series of expectation values in the configured picture.
pub fn expect(cfg: &ScenarioConfig, opts: &Options) -> Result<Report, CliError> {
    let setup = expect_setup(cfg)?;
    let state = cfg.state()?;
    let times = cfg.times()?;
    let picture_spec: PictureSpec = cfg.expect.picture;
    let picture = picture_spec.picture();
    let pic = picture_spec.label();
    if cfg.expect.observables.is_empty() {
        return Err(CliError::Config("expect.observables is empty".into()));
    }
    let observables: Vec<Observable> = cfg.expect.observables.iter().map(|s| parse_observable(s)).collect::<Result<_, _>>()?;

    let oracle = if opts.oracle {
        let ctx = setup
            .ctx
            .as_ref()
            .ok_or_else(|| CliError::Unsupported("--oracle needs a family ladder for the state vector".into()))?;
        let op = oracle_operator(&ctx.js, opts, 200)?;
        let mut psi = state_coeffs(ctx, &state)?;
        if psi.len() > op.dim {
            return Err(CliError::Library(fockladder::Error::CutoffOverflow(format!(
                "state needs {} levels, oracle truncation is {}",
                psi.len(),
                op.dim
            ))));
        }
        psi.resize(op.dim, ZERO);
        Some((op, psi))
    } else {
        None
    };

    let mut cols = vec![Column::new("t", "time")];
    let push_cols = |cols: &mut Vec<Column>, prefix: &str, obs: &Observable| {
        let (name, unit, complex) = obs.describe();
        if complex {
            cols.push(Column::pictured(format!("{prefix}re_{name}"), &unit, pic));
            cols.push(Column::pictured(format!("{prefix}im_{name}"), &unit, pic));
        } else {
            cols.push(Column::pictured(format!("{prefix}{name}"), &unit, pic));
        }
    };
    for obs in &observables {
        push_cols(&mut cols, "", obs);
    }
    if oracle.is_some() {
        for obs in observables.iter().filter(|o| o.has_oracle()) {
            push_cols(&mut cols, "oracle_", obs);
        }
        cols.push(Column::new("max_dev", "relative"));
    }

    let rows: Vec<(Vec<Cell>, f64)> = times
        .par_iter()
        .map(|&t| -> Result<(Vec<Cell>, f64), CliError> {
            let mut row = vec![Cell::Num(t)];
            let mut values = Vec::with_capacity(observables.len());
            for &obs in &observables {
                let v = evaluate(&setup, obs, &state, t, picture)?;
                values.push(v);
                row.push(Cell::Num(v.re));
                if obs.describe().2 {
                    row.push(Cell::Num(v.im));
                }
            }
            let mut dev: f64 = 0.0;
            if let (Some((op, psi0)), Some(ctx)) = (&oracle, &setup.ctx) {
                let psi = expm_evolve(op, psi0, t)?;
                for (&obs, v) in observables.iter().zip(&values) {
                    if !obs.has_oracle() {
                        continue;
                    }
                    let o = evaluate_oracle(&ctx.js, &psi, op, obs, t, picture);
                    dev = dev.max(scaled_dev(*v, o));
                    row.push(Cell::Num(o.re));
                    if obs.describe().2 {
                        row.push(Cell::Num(o.im));
                    }
                }
                row.push(Cell::Num(dev));
            }
            Ok((row, dev))
        })
        .collect::<Result<_, _>>()?;

    let mut table = Table::new("expectations", cols);
    let mut worst: f64 = 0.0;
    for (row, dev) in rows {
        worst = worst.max(dev);
        table.push(row);
    }
    let checks = if oracle.is_some() {
        vec![Check::at_most("expectations vs truncated oracle", worst, tolerance(opts, cfg, 1e-7))]
    } else {
        Vec::new()
    };
    Ok(Report { command: "expect", tables: vec![table], checks })
}

fn occupation_text(n: &[usize]) -> String {
    format!("{n:?}")
}

/// Sector report: pseudo-vacua, λ values, ladder dimension, γ₀, family pattern and
/// samples of b(n), h(n).
pub fn reduce(cfg: &ScenarioConfig, opts: &Options) -> Result<Report, CliError> {
    let mm = cfg.multimode()?;
    let sys = mm.system()?;
    let samples = cfg.reduce.samples.unwrap_or(8);
    let mut sectors = Table::new(
        "sectors",
        vec![
            Column::new("sector", "index"),
            Column::new("start", "occupation"),
            Column::new("pseudo_vacuum", "occupation"),
            Column::new("lambda_00", "quanta"),
            Column::new("lambda_rest", "quanta"),
            Column::new("dim", "levels"),
            Column::new("gamma0", "energy"),
            Column::new("class", "pattern"),
        ],
    );
    let mut cols = vec![
        Column::new("sector", "index"),
        Column::new("n", "level"),
        Column::new("occupation", "occupation"),
        Column::new("b", "energy"),
        Column::new("h", "energy"),
    ];
    if opts.oracle {
        cols.push(Column::new("oracle_b_squared", "energy^2"));
        cols.push(Column::new("rel_dev", "1"));
    }
    let mut ladder = Table::new("ladder", cols);
    let mut worst: f64 = 0.0;
    for (i, start) in mm.sector_starts().iter().enumerate() {
        let sector = find_pseudo_vacuum(&sys, start)?;
        let js = reduce_ladder(&sys, &sector)?;
        let dim = match js.dim {
            Dim::Infinite => Cell::Text("inf".into()),
            Dim::Finite(d) => Cell::Int(d as i64),
        };
        sectors.push(vec![
            Cell::Int(i as i64),
            Cell::Text(occupation_text(start)),
            Cell::Text(occupation_text(&sector.pseudo_vacuum_occupation)),
            Cell::Num(sector.lambda00),
            Cell::Text(format!("{:?}", sector.lambda_rest)),
            dim,
            Cell::Num(js.gamma0),
            Cell::Text(classify_reduced(&js, 1e-10).to_string()),
        ]);
        for n in 0..samples {
            if !js.dim.contains(n) {
                break;
            }
            let level = sector.level(&sys, n).expect("levels inside the ladder exist");
            let mut row = vec![
                Cell::Int(i as i64),
                Cell::Int(n as i64),
                Cell::Text(occupation_text(&level)),
                Cell::Num(js.b(n)),
                Cell::Num(js.h(n)),
            ];
            if opts.oracle {
                // b(n)² = ‖A*|level n−1⟩‖² on the sparse Fock space; b(0) = 0.
                let o = match n.checked_sub(1).and_then(|k| sector.level(&sys, k)) {
                    Some(below) => {
                        let mut v = SparseState::new();
                        let cutoff = below.iter().sum::<usize>() + 2 * sys.step() + 2;
                        v.insert(below, Complex64::new(1.0, 0.0));
                        norm(&multimode_apply(&sys, Term::AStar, &v, cutoff)?).powi(2)
                    }
                    None => 0.0,
                };
                let dev = (js.b(n).powi(2) - o).abs() / o.max(1.0);
                worst = worst.max(dev);
                row.extend([Cell::Num(o), Cell::Num(dev)]);
            }
            ladder.push(row);
        }
    }
    let checks = if opts.oracle {
        vec![Check::at_most("b(n)^2 vs sparse oracle", worst, tolerance(opts, cfg, 1e-10))]
    } else {
        Vec::new()
    };
    Ok(Report { command: "reduce", tables: vec![sectors, ladder], checks })
}

/// Mean photon number of mode 0 of the parametric amplifier: closed form and the
/// two-mode truncated oracle.
pub fn amplifier(cfg: &ScenarioConfig, opts: &Options) -> Result<Report, CliError> {
    let spec = cfg.amplifier.as_ref().ok_or_else(|| CliError::Config("missing [amplifier] table".into()))?;
    let times = cfg.times()?;
    let g = spec.coupling;
    let (z0, z1) = (Complex64::new(spec.zeta0[0], spec.zeta0[1]), Complex64::new(spec.zeta1[0], spec.zeta1[1]));
    let sys = MultiModeSystem::new(spec.omega.to_vec(), vec![1, 1], Coupling::Constant(Complex64::new(0.0, -g)), Diagonal::Zero)?;
    let cutoff = opts.truncation.unwrap_or(30);
    let oracle = MultiModeOracle::new(&sys, Truncation::PerMode(cutoff))?;
    let psi = product_coherent(&[z0, z1], cutoff);
    let pic = "full";
    let rows: Vec<(Vec<Cell>, f64)> = times
        .par_iter()
        .map(|&t| -> Result<(Vec<Cell>, f64), CliError> {
            let closed = amplifier_mean_photon(z0, z1, g, t);
            let o = MultiModeOracle::mean_occupation(&oracle.evolve(&psi, t, true)?, 0);
            let rel = (closed - o).abs() / closed.abs().max(f64::MIN_POSITIVE);
            Ok((vec![Cell::Num(t), Cell::Num(closed), Cell::Num(o), Cell::Num(rel)], rel))
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(
        "amplifier",
        vec![
            Column::new("t", "time"),
            Column::pictured("n0_closed", "quanta", pic),
            Column::pictured("n0_oracle", "quanta", pic),
            Column::new("rel_err", "1"),
        ],
    );
    let mut worst: f64 = 0.0;
    for (row, rel) in rows {
        worst = worst.max(rel);
        table.push(row);
    }
    let checks = vec![Check::at_most("closed form vs two-mode oracle", worst, tolerance(opts, cfg, 1e-3))];
    Ok(Report { command: "amplifier", tables: vec![table], checks })
}
