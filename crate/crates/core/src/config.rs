//! JSON scenario configuration.
//!
//! A config names a landscape, optional trajectory bindings, BMO parameters,
//! the arena, the initial placement, replicate seeds, the capture dwell and
//! output file names. Omitted optional fields take their defaults; the
//! resolved config (defaults filled in) is what gets echoed into summaries.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamic::Binding;
use crate::engine::{BmoParams, Placement};
use crate::error::{Error, Result};
use crate::landscape::{
    load_image_field, make_light_field, make_rastrigin, make_schwefel, make_sphere_field,
    make_three_peaks, BenchmarkConstants, Landscape, LightSource,
};
use crate::sim::{Arena, Scenario};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LandscapeSpec {
    ThreePeaks,
    Rastrigin {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bounds: Option<Vec<[f64; 2]>>,
    },
    Schwefel {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bounds: Option<Vec<[f64; 2]>>,
    },
    /// Light field; the floor box defaults to the arena's bounding box.
    Light {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bounds: Option<Vec<[f64; 2]>>,
        sources: Vec<LightSource>,
    },
    /// PGM image; `path` is relative to the config file.
    Image {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
    },
    Sphere {
        radius: f64,
    },
}

impl LandscapeSpec {
    pub fn build(&self, arena: &Arena, base_dir: &Path) -> Result<Landscape> {
        match self {
            LandscapeSpec::ThreePeaks => Ok(make_three_peaks()),
            LandscapeSpec::Rastrigin { bounds } => make_rastrigin(bounds.clone()),
            LandscapeSpec::Schwefel { bounds } => make_schwefel(bounds.clone()),
            LandscapeSpec::Light { bounds, sources } => make_light_field(
                bounds.clone().unwrap_or_else(|| arena.bounds()),
                sources.clone(),
            ),
            LandscapeSpec::Image { path, gamma } => {
                let gamma = gamma.unwrap_or(BenchmarkConstants::shipped().image_gamma);
                load_image_field(base_dir.join(path), gamma)
            }
            LandscapeSpec::Sphere { radius } => make_sphere_field(*radius),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub trace: PathBuf,
    pub summary: PathBuf,
}

impl Default for OutputPaths {
    fn default() -> Self {
        OutputPaths {
            trace: "trace.csv".into(),
            summary: "summary.json".into(),
        }
    }
}

fn default_dwell() -> usize {
    3
}

fn default_placement() -> Placement {
    Placement::UniformRandom
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub landscape: LandscapeSpec,
    #[serde(default)]
    pub bindings: Vec<Binding>,
    #[serde(default)]
    pub params: BmoParams,
    pub arena: Arena,
    #[serde(default = "default_placement")]
    pub placement: Placement,
    /// Replicate seeds for `batch`.
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default = "default_dwell")]
    pub dwell: usize,
    #[serde(default)]
    pub output: OutputPaths,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Reads a config file; the returned directory anchors relative paths.
    pub fn load(path: impl AsRef<Path>) -> Result<(Self, PathBuf)> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config = Self::from_json(&text)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((config, base))
    }

    /// Builds the landscape (loading any referenced files), binds
    /// trajectories and checks every parameter.
    pub fn resolve(&self, base_dir: &Path) -> Result<Scenario> {
        if self.name.trim().is_empty() {
            return Err(Error::Scenario("name must not be empty".into()));
        }
        self.arena.validate()?;
        self.params.validate()?;
        let landscape = self
            .landscape
            .build(&self.arena, base_dir)?
            .bind(self.bindings.clone(), self.params.max_iters)?;
        let scenario = Scenario {
            name: self.name.clone(),
            landscape,
            params: self.params.clone(),
            placement: self.placement.clone(),
            arena: self.arena.clone(),
            dwell: self.dwell,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self, base_dir: &Path) -> Result<()> {
        self.resolve(base_dir).map(drop)
    }
}

/// Schema summary printed by `bmo validate --help` and the README.
pub const SCHEMA_FIELDS: &[(&str, &str)] = &[
    ("name", "scenario name (required)"),
    ("description", "free text"),
    ("landscape.kind", "three_peaks | rastrigin | schwefel | light | image | sphere"),
    ("bindings[]", "{index, trajectory: {kind: static | horizontal_shift | linear_pingpong | circular | updown, ...}}"),
    ("params", "b1, b2, step_size, n_agents, max_iters, d_min, rng_seed, jitter, movement (clamped | fixed_step)"),
    ("arena", "outer_radius, capture_radius (required)"),
    ("placement.kind", "uniform_random | quadrant_random | explicit {positions}"),
    ("seeds", "replicate seeds for batch"),
    ("dwell", "capture debounce in iterations (default 3)"),
    ("output", "trace, summary file names (defaults trace.csv, summary.json)"),
];
