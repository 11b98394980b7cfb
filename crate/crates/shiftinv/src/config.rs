//! Run configuration files.
//!
//! A run is fully described by one TOML document:
//!
//! ```toml
//! example = "hardy-shannon"
//! region = "halfspace(1,0)"
//! seed = 42
//!
//! [probe]
//! samples_per_level = 100000
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use shiftinv_core::criteria::SuiteOptions;
use shiftinv_core::genspace::{FourierFunction, GeneratorSystem};
use shiftinv_core::geometry::RegionExpr;
use shiftinv_core::quadrature::QuadConfig;
use shiftinv_core::registry::{self, EntryKind, GroundTruth};
use shiftinv_core::wavelets::{CalderonConfig, SemiorthogonalityConfig, WaveletSystem};
use shiftinv_core::{DensityProbe, DilationMatrix, RegionSet};

use crate::gridfile;
use crate::Error;

/// Key of the `example` field that selects the `[custom]` table.
pub const CUSTOM: &str = "custom";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CustomKind {
    Scaling,
    Wavelet,
}

/// A generator read from a sampled grid file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomConfig {
    pub kind: CustomKind,
    /// Grid file, relative to the config file's directory.
    pub grid: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Skip normalization of a scaling generator.
    #[serde(default)]
    pub claimed_tight_frame: bool,
    #[serde(default)]
    pub semiorthogonal: bool,
}

/// Grid of the `spectral` command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for SpectralGrid {
    fn default() -> Self {
        Self { lo: -4.0, hi: 4.0, step: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveletOptions {
    pub calderon: CalderonConfig,
    pub semiorthogonality: SemiorthogonalityConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Registry key, or `custom`.
    pub example: String,
    /// Region expression for `G`; the registry default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
    /// Expected outcome, overriding the registry label.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<GroundTruth>,
    /// Row-major integer dilation. Required for custom examples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dilation: Option<Vec<Vec<i64>>>,
    /// Overrides `probe.seed` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_limit_eps")]
    pub limit_eps: f64,
    #[serde(default)]
    pub probe: DensityProbe,
    #[serde(default)]
    pub quad: QuadConfig,
    #[serde(default)]
    pub spectral: SpectralGrid,
    #[serde(default)]
    pub wavelet: WaveletOptions,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<CustomConfig>,
    /// Directory against which relative grid paths resolve.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_limit_eps() -> f64 {
    SuiteOptions::default().limit_eps
}

/// The object a run examines.
pub enum Subject {
    Scaling(GeneratorSystem),
    Wavelet(WaveletSystem),
}

impl Subject {
    pub fn dim(&self) -> usize {
        match self {
            Subject::Scaling(s) => s.dim(),
            Subject::Wavelet(w) => w.dim(),
        }
    }
}

impl RunConfig {
    /// Defaults for a registry example, with its default region.
    pub fn for_example(key: &str) -> Result<Self, Error> {
        let entry = registry::lookup(key)?;
        Ok(Self {
            example: key.to_string(),
            region: Some(entry.default_region.to_string()),
            expect: None,
            dilation: None,
            seed: None,
            limit_eps: default_limit_eps(),
            probe: DensityProbe::default(),
            quad: QuadConfig::default(),
            spectral: SpectralGrid::default(),
            wavelet: WaveletOptions::default(),
            output: OutputConfig::default(),
            custom: None,
            base_dir: PathBuf::new(),
        })
    }

    pub fn from_toml(text: &str) -> Result<Self, Error> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String, Error> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.seed.is_some_and(|s| s > i64::MAX as u64) || self.probe.seed > i64::MAX as u64 {
            return Err(Error::Config("seeds must fit in a signed 64-bit integer".into()));
        }
        if self.example == CUSTOM {
            if self.custom.is_none() {
                return Err(Error::Config("example = \"custom\" requires a [custom] table".into()));
            }
            if self.dilation.is_none() {
                return Err(Error::Config("custom examples require a dilation".into()));
            }
        } else {
            registry::lookup(&self.example)?;
            if self.custom.is_some() {
                return Err(Error::Config("[custom] is only allowed with example = \"custom\"".into()));
            }
        }
        if let Some(r) = &self.region {
            RegionExpr::parse(r).map_err(|e| Error::Config(format!("region: {e}")))?;
        }
        if !(self.limit_eps > 0.0 && self.limit_eps < 1.0) {
            return Err(Error::Config("limit_eps must lie in (0, 1)".into()));
        }
        let s = self.spectral;
        if !(s.lo < s.hi && s.step > 0.0 && s.step.is_finite()) {
            return Err(Error::Config("spectral grid needs lo < hi and step > 0".into()));
        }
        self.effective_probe().validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    pub fn effective_seed(&self) -> u64 {
        self.seed.unwrap_or(self.probe.seed)
    }

    pub fn effective_probe(&self) -> DensityProbe {
        self.probe.clone().with_seed(self.effective_seed())
    }

    pub fn suite_options(&self) -> SuiteOptions {
        SuiteOptions { quad: self.quad, limit_eps: self.limit_eps, ..SuiteOptions::default() }
    }

    /// Region expression in canonical form.
    pub fn region_expr(&self) -> Result<String, Error> {
        let raw = match (&self.region, self.example.as_str()) {
            (Some(r), _) => r.clone(),
            (None, CUSTOM) => "all".to_string(),
            (None, key) => registry::lookup(key)?.default_region.to_string(),
        };
        RegionExpr::canonical(&raw).map_err(|e| Error::Config(format!("region: {e}")))
    }

    pub fn region(&self, dim: usize, support: Option<&RegionSet>) -> Result<RegionSet, Error> {
        let expr = RegionExpr::parse(&self.region_expr()?).map_err(|e| Error::Config(format!("region: {e}")))?;
        expr.build(dim, support).map_err(|e| Error::Config(format!("region: {e}")))
    }

    /// Expected outcome: the explicit label, else the registry's for this region.
    pub fn ground_truth(&self) -> Result<Option<GroundTruth>, Error> {
        if self.expect.is_some() || self.example == CUSTOM {
            return Ok(self.expect);
        }
        Ok(registry::ground_truth(&self.example, &self.region_expr()?))
    }

    /// SHA-256 of the canonical TOML of everything that affects results.
    pub fn hash(&self) -> Result<String, Error> {
        let mut c = self.clone();
        c.output = OutputConfig::default();
        c.seed = Some(self.effective_seed());
        c.probe.seed = c.seed.unwrap();
        c.region = Some(self.region_expr()?);
        Ok(hex::encode(Sha256::digest(c.to_toml()?.as_bytes())))
    }

    fn dilation_matrix(&self) -> Result<Option<DilationMatrix>, Error> {
        self.dilation.as_deref().map(DilationMatrix::from_rows).transpose().map_err(Error::from)
    }

    /// Build the scaling or wavelet system the run examines.
    pub fn subject(&self) -> Result<Subject, Error> {
        let dilation = self.dilation_matrix()?;
        if self.example == CUSTOM {
            let custom = self.custom.as_ref().expect("validated");
            let dilation = dilation.expect("validated");
            let grid = gridfile::load_grid(&self.base_dir.join(&custom.grid))?;
            let label = custom.label.clone().unwrap_or_else(|| custom.grid.display().to_string());
            if grid.dim() != dilation.dim() {
                return Err(Error::Config(format!(
                    "grid has dimension {} but the dilation has dimension {}",
                    grid.dim(),
                    dilation.dim()
                )));
            }
            let f = FourierFunction::from_grid(grid, label.clone());
            return Ok(match custom.kind {
                CustomKind::Scaling => {
                    Subject::Scaling(GeneratorSystem::new(label, vec![f], dilation, custom.claimed_tight_frame)?)
                }
                CustomKind::Wavelet => {
                    let g = self.region(dilation.dim(), None)?;
                    Subject::Wavelet(WaveletSystem::new(label, vec![f], dilation, g, custom.semiorthogonal)?)
                }
            });
        }
        let subject = match registry::lookup(&self.example)?.kind {
            EntryKind::Scaling => Subject::Scaling(registry::scaling_system(&self.example)?),
            EntryKind::Wavelet => Subject::Wavelet(registry::wavelet_system(&self.example)?),
        };
        if let Some(d) = dilation {
            let own = match &subject {
                Subject::Scaling(s) => s.dilation().rows(),
                Subject::Wavelet(w) => w.dilation().rows(),
            };
            if d.rows() != own {
                return Err(Error::Config(format!(
                    "example '{}' is defined for the dilation {:?}, not {:?}",
                    self.example,
                    own,
                    d.rows()
                )));
            }
        }
        Ok(subject)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_takes_defaults() {
        let cfg = RunConfig::from_toml("example = \"haar\"").unwrap();
        assert_eq!(cfg.region_expr().unwrap(), "all");
        assert_eq!(cfg.effective_seed(), 42);
        assert_eq!(cfg.ground_truth().unwrap(), Some(GroundTruth::Complete));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("example = \"haar\"\nsamples = 3").is_err());
        assert!(RunConfig::from_toml("example = \"nope\"").is_err());
        assert!(RunConfig::from_toml("example = \"custom\"").is_err());
    }

    #[test]
    fn hash_ignores_output_but_not_seed() {
        let a = RunConfig::for_example("shannon").unwrap();
        let mut b = a.clone();
        b.output.path = Some("elsewhere.json".into());
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.seed = Some(7);
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
    }

    #[test]
    fn mismatched_dilation_is_an_error() {
        let mut cfg = RunConfig::for_example("haar").unwrap();
        cfg.dilation = Some(vec![vec![3]]);
        assert!(cfg.subject().is_err());
        cfg.dilation = Some(vec![vec![2]]);
        assert!(cfg.subject().is_ok());
    }
}
