//! JSON experiment configuration. Key names mirror the library type fields;
//! every run is fully determined by (config file, seed).

use std::path::PathBuf;

use anyhow::{bail, Context};
use serde::{Deserialize, Deserializer};

use hardyx::grid::{Grid, TLadder};
use hardyx::maximal::{RadiusSet, Template};
use hardyx::spaces::{OmegaSpec, SpaceSpec, Weight};

/// Top-level config document. Kind-specific sections are optional here and
/// validated by the dispatcher, so one schema covers every experiment kind.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub grid: GridConfig,
    /// Riesz composition order m (riesz-equiv, subharmonic, range-check).
    #[serde(default = "default_order")]
    pub order: usize,
    pub space: Option<SpaceConfig>,
    pub hardy: Option<HardyConfigDto>,
    pub family: Option<FamilyConfig>,
    pub omega: Option<OmegaConfig>,
    pub probe: Option<ProbeConfig>,
    /// Majorization exponent / subharmonic exponent.
    pub q: Option<f64>,
    /// Majorization boundary shift a >= 0.
    pub a: Option<f64>,
    /// Majorization kernel scale t.
    pub t: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    pub out: Option<PathBuf>,
}

fn default_order() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    PoissonEquiv,
    RieszEquiv,
    IsomEquiv,
    CrResidual,
    Subharmonic,
    Majorization,
    MoIndices,
    RangeCheck,
    Probes,
}

impl ExperimentKind {
    pub fn id(&self) -> &'static str {
        match self {
            ExperimentKind::PoissonEquiv => "poisson-equiv",
            ExperimentKind::RieszEquiv => "riesz-equiv",
            ExperimentKind::IsomEquiv => "isom-equiv",
            ExperimentKind::CrResidual => "cr-residual",
            ExperimentKind::Subharmonic => "subharmonic",
            ExperimentKind::Majorization => "majorization",
            ExperimentKind::MoIndices => "mo-indices",
            ExperimentKind::RangeCheck => "range-check",
            ExperimentKind::Probes => "probes",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub points: usize,
    pub period: f64,
}

impl GridConfig {
    pub fn build(&self) -> anyhow::Result<Grid> {
        Grid::new(self.n, self.points, self.period).context("invalid config: grid")
    }
}

/// Extended exponent: a JSON number or the string "inf".
fn de_extended<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Word(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(v) => Ok(v),
        Raw::Word(w) if w == "inf" => Ok(f64::INFINITY),
        Raw::Word(w) => Err(serde::de::Error::custom(format!(
            "expected a number or \"inf\", got \"{w}\""
        ))),
    }
}

/// Space selector; field names match [`SpaceSpec`]. The weighted variant is
/// described by the maximal-power exponent and realized on the run's grid.
#[derive(Debug, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpaceConfig {
    Lebesgue {
        p: f64,
    },
    WeightedLebesgue {
        p: f64,
        epsilon: f64,
    },
    Lorentz {
        p: f64,
        #[serde(deserialize_with = "de_extended")]
        r: f64,
    },
    MixedLebesgue {
        p: Vec<f64>,
    },
    LocalHerz {
        p: f64,
        #[serde(deserialize_with = "de_extended")]
        r: f64,
        omega: OmegaConfig,
    },
    MixedHerz {
        alpha: Vec<f64>,
        p: Vec<f64>,
        q: Vec<f64>,
    },
    Morrey {
        p: f64,
        r: f64,
    },
}

impl SpaceConfig {
    pub fn build(&self, grid: &Grid) -> anyhow::Result<SpaceSpec> {
        Ok(match self {
            SpaceConfig::Lebesgue { p } => SpaceSpec::Lebesgue { p: *p },
            SpaceConfig::WeightedLebesgue { p, epsilon } => {
                let radii = RadiusSet::default_for(grid);
                let weight = Weight::muckenhoupt(grid, *epsilon, &radii)
                    .context("invalid config: weight")?;
                SpaceSpec::WeightedLebesgue { p: *p, weight }
            }
            SpaceConfig::Lorentz { p, r } => SpaceSpec::Lorentz { p: *p, r: *r },
            SpaceConfig::MixedLebesgue { p } => SpaceSpec::MixedLebesgue { p: p.clone() },
            SpaceConfig::LocalHerz { p, r, omega } => SpaceSpec::LocalHerz {
                p: *p,
                r: *r,
                omega: omega.build()?,
            },
            SpaceConfig::MixedHerz { alpha, p, q } => SpaceSpec::MixedHerz {
                alpha: alpha.clone(),
                p: p.clone(),
                q: q.clone(),
            },
            SpaceConfig::Morrey { p, r } => SpaceSpec::Morrey { p: *p, r: *r },
        })
    }
}

/// Growth function selector. `log-power` samples t^alpha (1 + |log t|) on
/// dyadic points covering [2^-60, 2^60]; the wide range keeps the
/// estimator's finite-tail bias inside a few hundredths.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OmegaConfig {
    PowerLaw { alpha: f64 },
    LogPower { alpha: f64 },
    Sampled { k_min: i32, values: Vec<f64> },
}

impl OmegaConfig {
    pub fn build(&self) -> anyhow::Result<OmegaSpec> {
        Ok(match self {
            OmegaConfig::PowerLaw { alpha } => OmegaSpec::PowerLaw { alpha: *alpha },
            OmegaConfig::LogPower { alpha } => {
                let k_min = -60;
                let values = (k_min..=60)
                    .map(|k| {
                        let t = (k as f64).exp2();
                        t.powf(*alpha) * (1.0 + t.ln().abs())
                    })
                    .collect();
                OmegaSpec::Sampled { k_min, values }
            }
            OmegaConfig::Sampled { k_min, values } => OmegaSpec::Sampled {
                k_min: *k_min,
                values: values.clone(),
            },
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TemplateConfig {
    Gaussian { width: f64 },
    Poisson,
}

impl TemplateConfig {
    fn build(&self) -> Template {
        match self {
            TemplateConfig::Gaussian { width } => Template::Gaussian { width: *width },
            TemplateConfig::Poisson => Template::Poisson,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LadderConfig {
    Geometric { t1: f64, top: f64, count: usize },
    Uniform { t1: f64, count: usize },
    Explicit { levels: Vec<f64> },
}

impl LadderConfig {
    pub fn build(&self, grid: &Grid) -> anyhow::Result<TLadder> {
        let l = grid.period();
        match self {
            LadderConfig::Geometric { t1, top, count } => {
                TLadder::geometric(*t1, *top, *count, l).context("invalid config: ladder")
            }
            LadderConfig::Uniform { t1, count } => {
                TLadder::uniform(*t1, *count, l).context("invalid config: ladder")
            }
            LadderConfig::Explicit { levels } => {
                TLadder::new(levels.clone(), l).context("invalid config: ladder")
            }
        }
    }
}

/// Hardy-norm knobs; every field optional, defaults mirror
/// `HardyConfig::default_for` (Gaussian profile, b = 2n + 2, geometric
/// ladder from h/2 up to L/4).
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardyConfigDto {
    pub phi: Option<TemplateConfig>,
    pub b: Option<f64>,
    pub ladder: Option<LadderConfig>,
    pub grand_order: Option<usize>,
}

impl HardyConfigDto {
    pub fn build(&self, grid: &Grid) -> anyhow::Result<hardyx::hardy::HardyConfig> {
        let ladder = match &self.ladder {
            Some(l) => l.build(grid)?,
            None => default_ladder(grid)?,
        };
        let mut cfg = hardyx::hardy::HardyConfig::default_for(grid, ladder);
        if let Some(phi) = &self.phi {
            cfg.phi = phi.build();
        }
        if let Some(b) = self.b {
            cfg = hardyx::hardy::HardyConfig::new(
                cfg.phi,
                b,
                cfg.ladder,
                cfg.radii,
                cfg.grand_order,
            )
            .context("invalid config: hardy")?;
        }
        if let Some(g) = self.grand_order {
            cfg.grand_order = g;
        }
        Ok(cfg)
    }
}

pub fn default_ladder(grid: &Grid) -> anyhow::Result<TLadder> {
    TLadder::geometric(grid.spacing() / 2.0, grid.period() / 4.0, 12, grid.period())
        .context("invalid config: default ladder")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKindConfig {
    DilatedGaussians,
    TranslatedAtoms,
    RandomBandlimited,
    PoissonKernels,
    /// Even split of Gaussians, atoms and band-limited draws.
    Mixed,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub kind: FamilyKindConfig,
    pub count: usize,
}

impl FamilyConfig {
    pub fn build(&self, seed: u64, grid: &Grid) -> anyhow::Result<hardyx::hardy::TestFamily> {
        use hardyx::hardy::{make_test_family, FamilyKind, TestFamily};
        let single = |kind, count, seed| {
            make_test_family(kind, count, seed, grid).context("invalid config: family")
        };
        match self.kind {
            FamilyKindConfig::DilatedGaussians => {
                single(FamilyKind::DilatedGaussians, self.count, seed)
            }
            FamilyKindConfig::TranslatedAtoms => {
                single(FamilyKind::TranslatedAtoms, self.count, seed)
            }
            FamilyKindConfig::RandomBandlimited => {
                single(FamilyKind::RandomBandlimited, self.count, seed)
            }
            FamilyKindConfig::PoissonKernels => {
                single(FamilyKind::PoissonKernels, self.count, seed)
            }
            FamilyKindConfig::Mixed => {
                if self.count < 3 {
                    bail!("invalid config: mixed family needs count >= 3");
                }
                let base = self.count / 3;
                let extra = self.count % 3;
                let counts = [base + usize::from(extra > 0), base + usize::from(extra > 1), base];
                let parts = vec![
                    single(FamilyKind::DilatedGaussians, counts[0], seed)?,
                    single(FamilyKind::TranslatedAtoms, counts[1], seed.wrapping_add(1))?,
                    single(FamilyKind::RandomBandlimited, counts[2], seed.wrapping_add(2))?,
                ];
                TestFamily::merged(parts).context("invalid config: family merge")
            }
        }
    }
}

/// Knobs for the `probes` experiment kind.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    /// Powered-maximal exponent, 0 < theta < s.
    pub theta: Option<f64>,
    /// Aggregation exponent for the vector probe.
    pub s: Option<f64>,
    /// Weight exponents swept by the doubling probe.
    pub epsilon: Option<Vec<f64>>,
    /// Family size for the vector probe.
    pub count: Option<usize>,
}
