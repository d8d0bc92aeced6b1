//! Run configuration read from JSON.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use vortex_ladder::couplings::CouplingConfig;
use vortex_ladder::gauge::VortexSector;
use vortex_ladder::lattice::{build_ladder, Ladder, LadderSpec, ReflectionCase};
use vortex_ladder::presets::{make_couplings, PresetName};

use crate::error::CliError;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub ladder: LadderSpec,
    #[serde(default)]
    pub couplings: Option<CouplingSource>,
    #[serde(default)]
    pub method: Option<String>,
    /// Pattern string such as "BL+p2N" or a `{"cycles": {...}}` object.
    #[serde(default)]
    pub sector: Option<serde_json::Value>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub n_range: Option<[usize; 2]>,
    #[serde(default)]
    pub patterns: Option<Vec<String>>,
    #[serde(default)]
    pub perturbation: Option<PerturbationParams>,
    #[serde(default)]
    pub reflection: Option<ReflectionCase>,
    #[serde(default)]
    pub betas: Option<Vec<f64>>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub probe: bool,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSource {
    #[serde(default)]
    pub preset: Option<PresetName>,
    #[serde(default)]
    pub jx: Option<f64>,
    #[serde(default)]
    pub jy: Option<f64>,
    #[serde(default)]
    pub jz: Option<f64>,
    #[serde(default)]
    pub bonds: Option<Vec<(usize, usize, f64)>>,
    #[serde(default)]
    pub random: Option<RandomRange>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomRange {
    pub low: f64,
    pub high: f64,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationParams {
    pub jx: f64,
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default)]
    pub ty: Option<f64>,
    #[serde(default)]
    pub tz: Option<f64>,
}

impl PerturbationParams {
    pub fn ty_tz(&self) -> Result<(f64, f64), CliError> {
        match (self.t, self.ty, self.tz) {
            (Some(t), None, None) => Ok((t, t)),
            (None, Some(y), Some(z)) => Ok((y, z)),
            _ => Err(CliError::Config("perturbation: give either t or both ty and tz".into())),
        }
    }
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de)
        .map_err(|e| CliError::Config(format!("at {}: {}", e.path(), e.inner())))?;
    cfg.ladder.validate().map_err(|e| CliError::Config(format!("at ladder: {e}")))?;
    Ok(cfg)
}

impl RunConfig {
    pub fn build_ladder(&self) -> Result<Ladder, CliError> {
        build_ladder(self.ladder).map_err(|e| CliError::Config(format!("at ladder: {e}")))
    }

    pub fn require_seed(&self, what: &str) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| CliError::Config(format!("{what} is randomized and needs a seed")))
    }

    fn source(&self) -> Result<&CouplingSource, CliError> {
        self.couplings.as_ref().ok_or_else(|| CliError::Config("at couplings: missing".into()))
    }

    /// Preset name and parameters, for commands that rebuild couplings per ladder size.
    pub fn preset(&self) -> Result<(PresetName, f64, f64, f64), CliError> {
        let src = self.source()?;
        match src.preset {
            Some(p) if src.bonds.is_none() && src.random.is_none() => {
                let get = |v: Option<f64>, name: &str| {
                    v.ok_or_else(|| CliError::Config(format!("at couplings.{name}: missing for preset {p}")))
                };
                Ok((p, get(src.jx, "jx")?, get(src.jy, "jy")?, get(src.jz, "jz")?))
            }
            _ => Err(CliError::Config("at couplings: this command needs a preset".into())),
        }
    }

    pub fn couplings(&self, ladder: &Ladder) -> Result<CouplingConfig, CliError> {
        let src = self.source()?;
        let chosen = [src.preset.is_some(), src.bonds.is_some(), src.random.is_some()].iter().filter(|&&b| b).count();
        if chosen != 1 {
            return Err(CliError::Config("at couplings: give exactly one of preset, bonds, random".into()));
        }
        if let Some(bonds) = &src.bonds {
            let value = serde_json::json!({ "bonds": bonds });
            return CouplingConfig::from_value(ladder, &value).map_err(|e| CliError::Config(format!("at couplings.bonds: {e}")));
        }
        if let Some(r) = src.random {
            if !(r.low < r.high) || !r.low.is_finite() || !r.high.is_finite() {
                return Err(CliError::Config("at couplings.random: need finite low < high".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(self.require_seed("random couplings")?);
            return Ok(CouplingConfig::random(ladder, &mut rng, r.low, r.high));
        }
        let (p, jx, jy, jz) = self.preset()?;
        make_couplings(ladder, p, jx, jy, jz).map_err(|e| CliError::Config(format!("at couplings.preset: {e}")))
    }

    pub fn sector(&self, ladder: &Ladder) -> Result<Option<VortexSector>, CliError> {
        let Some(v) = &self.sector else { return Ok(None) };
        let parsed = match v {
            serde_json::Value::String(s) => VortexSector::from_pattern(ladder, s),
            other => VortexSector::from_value(ladder, other),
        };
        parsed.map(Some).map_err(|e| CliError::Config(format!("at sector: {e}")))
    }
}
