//! Scenario configuration: a versioned TOML document and its conversion into
//! library inputs. All physical quantities are dimensionless (ħ = 1).

use std::path::Path;

use fockladder::observables::{Picture, QuantumState};
use fockladder::orthopoly::{classify, PearsonData, RawPearson};
use fockladder::reduction::{Coupling, Diagonal, MultiModeSystem};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Deserialize;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub family: Option<FamilySpec>,
    pub multimode: Option<MultimodeSpec>,
    pub state: Option<StateSpec>,
    pub time: Option<TimeGrid>,
    #[serde(default)]
    pub spectrum: SpectrumSpec,
    #[serde(default)]
    pub propagate: PropagateSpec,
    #[serde(default)]
    pub expect: ExpectSpec,
    #[serde(default)]
    pub reduce: ReduceSpec,
    pub amplifier: Option<AmplifierSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
}

/// A Pearson family. Omitted parameters take the canonical values.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilySpec {
    Hermite {
        #[serde(default = "minus_two")]
        a1: f64,
        #[serde(default)]
        a0: f64,
        #[serde(default = "one")]
        b0: f64,
        #[serde(default)]
        gamma0: f64,
    },
    Laguerre {
        mu: Option<f64>,
        a1: Option<f64>,
        a0: Option<f64>,
        b1: Option<f64>,
        b0: Option<f64>,
        #[serde(default)]
        gamma0: f64,
    },
    Legendre {
        #[serde(default)]
        gamma0: f64,
    },
    Jacobi {
        a: f64,
        b: f64,
        mu: f64,
        nu: f64,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        gamma0: f64,
    },
    Pearson {
        a1: f64,
        a0: f64,
        #[serde(default)]
        b2: f64,
        #[serde(default)]
        b1: f64,
        #[serde(default)]
        b0: f64,
        #[serde(default)]
        gamma0: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn minus_two() -> f64 {
    -2.0
}

impl FamilySpec {
    pub fn pearson(&self) -> Result<PearsonData, CliError> {
        let pd = match *self {
            FamilySpec::Hermite { a1, a0, b0, .. } => PearsonData::hermite(a1, a0, b0),
            FamilySpec::Laguerre { mu: Some(mu), a1: None, a0: None, b1: None, b0: None, .. } => {
                PearsonData::laguerre_canonical(mu)
            }
            FamilySpec::Laguerre { mu: None, a1: Some(a1), a0: Some(a0), b1: Some(b1), b0: Some(b0), .. } => {
                PearsonData::laguerre(a1, a0, b1, b0)
            }
            FamilySpec::Laguerre { .. } => {
                return Err(CliError::Config(
                    "family.laguerre: give either `mu` alone or all of `a1`, `a0`, `b1`, `b0`".into(),
                ))
            }
            FamilySpec::Legendre { .. } => Ok(PearsonData::legendre()),
            FamilySpec::Jacobi { a, b, mu, nu, scale, .. } => PearsonData::jacobi(a, b, mu, nu, scale),
            FamilySpec::Pearson { a1, a0, b2, b1, b0, .. } => {
                classify(&RawPearson { a0, a1, b0, b1, b2, support: None })
            }
        };
        pd.map_err(|e| CliError::Config(format!("family: {e}")))
    }

    pub fn gamma0(&self) -> f64 {
        match *self {
            FamilySpec::Hermite { gamma0, .. }
            | FamilySpec::Laguerre { gamma0, .. }
            | FamilySpec::Legendre { gamma0 }
            | FamilySpec::Jacobi { gamma0, .. }
            | FamilySpec::Pearson { gamma0, .. } => gamma0,
        }
    }
}

/// Multi-mode Hamiltonian with a constant coupling g and a linear diagonal part.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultimodeSpec {
    pub omega: Vec<f64>,
    pub l: Vec<i64>,
    /// Complex coupling as [re, im].
    pub g: [f64; 2],
    pub h_linear: Option<Vec<f64>>,
    #[serde(default)]
    pub h_constant: f64,
    /// Rows of the α matrix; the first row must be proportional to l.
    pub alpha: Option<Vec<Vec<f64>>>,
    /// Occupation selecting the sector (expect) and the starting points (reduce).
    pub start: Option<Vec<usize>>,
    #[serde(default)]
    pub starts: Vec<Vec<usize>>,
}

impl MultimodeSpec {
    pub fn system(&self) -> Result<MultiModeSystem, CliError> {
        let g = Coupling::Constant(Complex64::new(self.g[0], self.g[1]));
        let h = match &self.h_linear {
            Some(coeffs) => Diagonal::Linear { coeffs: coeffs.clone(), constant: self.h_constant },
            None if self.h_constant != 0.0 => {
                Diagonal::Linear { coeffs: vec![0.0; self.l.len()], constant: self.h_constant }
            }
            None => Diagonal::Zero,
        };
        let sys = match &self.alpha {
            Some(rows) => {
                let m = rows.len();
                if rows.iter().any(|r| r.len() != m) {
                    return Err(CliError::Config("multimode.alpha must be a square matrix".into()));
                }
                let alpha = DMatrix::from_fn(m, m, |i, j| rows[i][j]);
                MultiModeSystem::with_alpha(self.omega.clone(), self.l.clone(), g, h, alpha)
            }
            None => MultiModeSystem::new(self.omega.clone(), self.l.clone(), g, h),
        };
        sys.map_err(|e| CliError::Config(format!("multimode: {e}")))
    }

    pub fn sector_starts(&self) -> Vec<Vec<usize>> {
        if !self.starts.is_empty() {
            self.starts.clone()
        } else if let Some(s) = &self.start {
            vec![s.clone()]
        } else {
            vec![vec![0; self.l.len()]]
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateSpec {
    Number { n: usize },
    Gaussian { zeta: [f64; 2] },
    Spectral { z: [f64; 2] },
    Fock { coeffs: Vec<[f64; 2]> },
}

impl StateSpec {
    pub fn state(&self) -> QuantumState {
        match self {
            StateSpec::Number { n } => QuantumState::Number(*n),
            StateSpec::Gaussian { zeta } => QuantumState::GaussianCoherent(Complex64::new(zeta[0], zeta[1])),
            StateSpec::Spectral { z } => QuantumState::SpectralCoherent(Complex64::new(z[0], z[1])),
            StateSpec::Fock { coeffs } => QuantumState::Fock(coeffs.iter().map(|c| Complex64::new(c[0], c[1])).collect()),
        }
    }
}

/// `steps` equally spaced times from `t0` to `t1` inclusive.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        if self.steps == 0 || !self.t0.is_finite() || !self.t1.is_finite() {
            return Err(CliError::Config("time: steps must be at least 1 and t0, t1 finite".into()));
        }
        if self.steps == 1 {
            return Ok(vec![self.t0]);
        }
        if !(self.t1 > self.t0) {
            return Err(CliError::Config("time: the grid must be strictly increasing (t1 > t0)".into()));
        }
        let dt = (self.t1 - self.t0) / (self.steps - 1) as f64;
        Ok((0..self.steps).map(|k| if k + 1 == self.steps { self.t1 } else { self.t0 + k as f64 * dt }).collect())
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub points: Option<usize>,
    pub moments: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagateSpec {
    /// (m, n) index pairs of σ̂ₘₙ; defaults to [[0, 0]].
    #[serde(default)]
    pub pairs: Vec<[usize; 2]>,
    /// Rows n whose Σₖ|σ̂ₙₖ(t)|² is reported.
    #[serde(default)]
    pub unitarity: Vec<usize>,
    /// Imaginary part y of z = t + iy.
    #[serde(default)]
    pub imag: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectSpec {
    #[serde(default)]
    pub observables: Vec<String>,
    #[serde(default)]
    pub picture: PictureSpec,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum PictureSpec {
    #[default]
    Interaction,
    Full,
}

impl PictureSpec {
    pub fn picture(self) -> Picture {
        match self {
            PictureSpec::Interaction => Picture::Interaction,
            PictureSpec::Full => Picture::Full,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PictureSpec::Interaction => "interaction",
            PictureSpec::Full => "full",
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceSpec {
    /// Number of ladder levels listed per sector.
    pub samples: Option<usize>,
}

/// Two-mode parametric amplifier with H_I = g a₀*a₁* + conj(g) a₀a₁ and g = −i·coupling.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplifierSpec {
    pub zeta0: [f64; 2],
    pub zeta1: [f64; 2],
    pub coupling: f64,
    #[serde(default = "unit_pair")]
    pub omega: [f64; 2],
}

fn unit_pair() -> [f64; 2] {
    [1.0, 1.0]
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Largest accepted library-vs-oracle deviation.
    pub oracle: Option<f64>,
    /// Largest accepted |Σₖ|σ̂ₙₖ|² − 1|.
    pub unitarity: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum FloatFormat {
    /// Scientific notation with 17 significant digits.
    #[default]
    Fixed17,
    /// Shortest representation that round-trips.
    Shortest,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub float_format: FloatFormat,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn family(&self) -> Result<&FamilySpec, CliError> {
        self.family.as_ref().ok_or_else(|| CliError::Config("missing [family] table".into()))
    }

    pub fn multimode(&self) -> Result<&MultimodeSpec, CliError> {
        self.multimode.as_ref().ok_or_else(|| CliError::Config("missing [multimode] table".into()))
    }

    pub fn state(&self) -> Result<QuantumState, CliError> {
        self.state.as_ref().map(StateSpec::state).ok_or_else(|| CliError::Config("missing [state] table".into()))
    }

    pub fn times(&self) -> Result<Vec<f64>, CliError> {
        self.time.as_ref().ok_or_else(|| CliError::Config("missing [time] table".into()))?.points()
    }
}
