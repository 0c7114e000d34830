//! JSON run configurations. One file describes one scenario; unknown keys
//! are rejected.

use std::path::{Path, PathBuf};

use decopoles_core::friedrich::{CouplingDensity, Lorentzian, OhmicCutoff, SampledDensity};
use decopoles_core::pole_models::{uniform_grid, DecoherenceRule, KhalfinTail, Mode, PoleCatalogue};
use decopoles_core::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Context};
use crate::io;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "scenario", rename_all = "lowercase")]
pub enum RunConfig {
    Model1(SimulateConfig),
    Model2(SimulateConfig),
    Model3(SimulateConfig),
    Bifriedrich(BiFriedrichConfig),
    Omnes(OmnesRunConfig),
    Extract(ExtractConfig),
}

impl RunConfig {
    pub fn scenario(&self) -> &'static str {
        match self {
            RunConfig::Model1(_) => "model1",
            RunConfig::Model2(_) => "model2",
            RunConfig::Model3(_) => "model3",
            RunConfig::Bifriedrich(_) => "bifriedrich",
            RunConfig::Omnes(_) => "omnes",
            RunConfig::Extract(_) => "extract",
        }
    }
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| {
        if source.line() == 0 {
            if let Some(line) = key_line(&text, &source.to_string()) {
                return CliError::Config(format!("{}: line {line}: {source}", path.display()));
            }
        }
        CliError::Parse {
            path: path.to_owned(),
            source,
        }
    })
}

/// Errors raised inside a tagged section carry no position; find the
/// first line mentioning the offending key instead.
fn key_line(text: &str, message: &str) -> Option<usize> {
    let start = message.find('`')? + 1;
    let end = start + message[start..].find('`')?;
    let key = format!("\"{}\"", &message[start..end]);
    text.lines().position(|l| l.contains(&key)).map(|i| i + 1)
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub t_max: f64,
    pub n_points: usize,
}

impl Grid {
    pub fn times(&self) -> Result<Vec<f64>, CliError> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(CliError::Config(format!("grid.t_max must be positive, got {}", self.t_max)));
        }
        uniform_grid(0.0, self.t_max, self.n_points).context("grid")
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModeJson {
    pub omega: f64,
    pub gamma: f64,
    pub amp_re: f64,
    pub amp_im: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct KhalfinJson {
    pub amplitude: f64,
    pub tau: f64,
    #[serde(default = "default_exponent")]
    pub p: f64,
}

fn default_exponent() -> f64 {
    KhalfinTail::DEFAULT_EXPONENT
}

fn default_hbar() -> f64 {
    1.0
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Catalogue document `{hbar, equilibrium, modes, khalfin}`. The optional
/// `pair_product` flag turns on the phase factors of each mode.
#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CatalogueJson {
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    pub equilibrium: f64,
    #[serde(default)]
    pub modes: Vec<ModeJson>,
    #[serde(default)]
    pub khalfin: Option<KhalfinJson>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub pair_product: bool,
}

impl CatalogueJson {
    pub fn build(&self, field: &str) -> Result<PoleCatalogue, CliError> {
        let modes = self
            .modes
            .iter()
            .enumerate()
            .map(|(i, m)| {
                Mode::new(m.omega, m.gamma, Complex::new(m.amp_re, m.amp_im)).context(format!("{field}.modes[{i}]"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let khalfin = self
            .khalfin
            .map(|k| KhalfinTail::new(k.amplitude, k.tau, k.p).context(format!("{field}.khalfin")))
            .transpose()?;
        let khalfin = match khalfin {
            None if modes.is_empty() => Some(KhalfinTail::absent()),
            k => k,
        };
        Ok(PoleCatalogue::new(self.hbar, self.equilibrium, modes, khalfin)
            .context(field.to_string())?
            .with_pair_product(self.pair_product))
    }

    pub fn from_catalogue(cat: &PoleCatalogue) -> Self {
        CatalogueJson {
            hbar: cat.hbar(),
            equilibrium: cat.equilibrium(),
            modes: cat
                .modes()
                .iter()
                .map(|m| ModeJson {
                    omega: m.omega(),
                    gamma: m.gamma(),
                    amp_re: m.amplitude.re,
                    amp_im: m.amplitude.im,
                })
                .collect(),
            khalfin: cat.khalfin().filter(|k| !k.is_zero()).map(|k| KhalfinJson {
                amplitude: k.amplitude(),
                tau: k.tau(),
                p: k.p(),
            }),
            pair_product: cat.is_pair_product(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RuleJson {
    SecondSmallestGamma,
    ScaledSmallest { factor: f64 },
}

impl RuleJson {
    pub fn rule(&self) -> DecoherenceRule<'static> {
        match *self {
            RuleJson::SecondSmallestGamma => DecoherenceRule::SecondSmallestGamma,
            RuleJson::ScaledSmallest { factor } => DecoherenceRule::ScaledSmallest(factor),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EntryJson {
    pub row: usize,
    pub col: usize,
    #[serde(default = "one")]
    pub factor_re: f64,
    #[serde(default)]
    pub factor_im: f64,
    pub catalogue: CatalogueJson,
}

fn one() -> f64 {
    1.0
}

/// Upper-triangle entries of a catalogue-valued density matrix.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DensityJson {
    pub dim: usize,
    pub entries: Vec<EntryJson>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub catalogue: CatalogueJson,
    pub grid: Grid,
    #[serde(default)]
    pub rule: Option<RuleJson>,
    #[serde(default)]
    pub density: Option<DensityJson>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BiFriedrichConfig {
    pub part1: CatalogueJson,
    pub part2: CatalogueJson,
    pub grid: Grid,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DensitySpec {
    Lorentzian {
        height: f64,
        center: f64,
        width: f64,
        lo: f64,
        hi: f64,
    },
    Ohmic {
        eta: f64,
        cutoff: f64,
        hi: f64,
    },
    /// CSV with header `omega,g`, relative to the config file.
    Sampled { path: PathBuf },
}

impl DensitySpec {
    pub fn build(&self, base: &Path) -> Result<Box<dyn CouplingDensity>, CliError> {
        Ok(match self {
            DensitySpec::Lorentzian {
                height,
                center,
                width,
                lo,
                hi,
            } => Box::new(Lorentzian::new(*height, *center, *width, *lo, *hi).context("density")?),
            DensitySpec::Ohmic { eta, cutoff, hi } => Box::new(OhmicCutoff::new(*eta, *cutoff, *hi).context("density")?),
            DensitySpec::Sampled { path } => {
                let (w, g) = io::read_pairs(&base.join(path), "omega", "g")?;
                Box::new(SampledDensity::new(w, g).context("density")?)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, Default, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// Strip the oscillation frequency from the pole before evolving.
    #[default]
    Corotating,
    Lab,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdsJson {
    pub min_delta: f64,
    pub max_fraction: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OmnesRunConfig {
    pub m: f64,
    pub omega: f64,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    /// Width of the single-quantum pole; alternatively derived from `density`.
    #[serde(default)]
    pub gamma0: Option<f64>,
    #[serde(default)]
    pub density: Option<DensitySpec>,
    pub l0: f64,
    pub a_re: f64,
    #[serde(default)]
    pub a_im: f64,
    pub b_re: f64,
    #[serde(default)]
    pub b_im: f64,
    pub n: usize,
    /// Defaults to `[0, 0.05·ħ/γ₀]` with 201 points.
    #[serde(default)]
    pub grid: Option<Grid>,
    #[serde(default)]
    pub l0_sweep: Vec<f64>,
    #[serde(default)]
    pub thresholds: Option<ThresholdsJson>,
    #[serde(default)]
    pub frame: Frame,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractConfig {
    /// `t,re,im` CSV, relative to the config file.
    pub signal: PathBuf,
    pub modes: usize,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    /// Subtracted before fitting.
    #[serde(default)]
    pub equilibrium: f64,
}

/// A starting configuration for each scenario.
pub fn template(scenario: &str) -> Option<RunConfig> {
    let mode = |gamma: f64, amp: f64| ModeJson {
        omega: 0.0,
        gamma,
        amp_re: amp,
        amp_im: 0.0,
    };
    let cat = |eq: f64, modes: Vec<ModeJson>, khalfin: Option<KhalfinJson>| CatalogueJson {
        hbar: 1.0,
        equilibrium: eq,
        modes,
        khalfin,
        pair_product: false,
    };
    let grid = |t_max: f64| Grid { t_max, n_points: 2001 };
    Some(match scenario {
        "model1" => RunConfig::Model1(SimulateConfig {
            catalogue: cat(
                0.0,
                vec![mode(1.0, 1.0)],
                Some(KhalfinJson {
                    amplitude: 1e-3,
                    tau: 1.0,
                    p: default_exponent(),
                }),
            ),
            grid: grid(20.0),
            rule: None,
            density: None,
        }),
        "model2" => RunConfig::Model2(SimulateConfig {
            catalogue: cat(0.0, vec![mode(0.1, 1.0), mode(1.0, 1.0), mode(1.1, 0.5)], None),
            grid: grid(40.0),
            rule: None,
            density: None,
        }),
        "model3" => RunConfig::Model3(SimulateConfig {
            catalogue: cat(0.0, vec![mode(0.1, 3.0), mode(1.0, 2.0), mode(5.0, 1.0)], None),
            grid: grid(40.0),
            rule: Some(RuleJson::SecondSmallestGamma),
            density: None,
        }),
        "bifriedrich" => RunConfig::Bifriedrich(BiFriedrichConfig {
            part1: cat(0.2, vec![mode(1.0, 0.8)], None),
            part2: cat(0.5, vec![mode(0.01, 0.5)], None),
            grid: grid(200.0),
        }),
        "omnes" => RunConfig::Omnes(OmnesRunConfig {
            m: 2.0,
            omega: 1.0,
            hbar: 1.0,
            gamma0: Some(0.01),
            density: None,
            l0: 10.0,
            a_re: 0.8f64.sqrt(),
            a_im: 0.0,
            b_re: 0.2f64.sqrt(),
            b_im: 0.0,
            n: 20_000,
            grid: None,
            l0_sweep: vec![10.0, 20.0, 40.0],
            thresholds: None,
            frame: Frame::Corotating,
        }),
        "extract" => RunConfig::Extract(ExtractConfig {
            signal: PathBuf::from("signal.csv"),
            modes: 3,
            hbar: 1.0,
            equilibrium: 0.0,
        }),
        _ => return None,
    })
}
