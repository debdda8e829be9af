//! Built-in scenarios shipped as JSON files under `scenarios/`.

use std::path::{Path, PathBuf};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};

macro_rules! scenario {
    ($name:literal) => {
        (
            $name,
            include_str!(concat!("../scenarios/", $name, ".json")),
        )
    };
}

const BUILTIN: &[(&str, &str)] = &[
    scenario!("three-peaks"),
    scenario!("schwefel"),
    scenario!("rastrigin"),
    scenario!("single-source"),
    scenario!("dual-source"),
    scenario!("dual-source-unequal"),
    scenario!("three-peaks-shift"),
    scenario!("pingpong-sources"),
    scenario!("circular-source"),
    scenario!("updown-source"),
    scenario!("sphere"),
    scenario!("ship-image"),
];

/// Directory holding the shipped scenario files; relative paths inside
/// built-in configs resolve against it.
pub fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

pub fn names() -> impl Iterator<Item = &'static str> {
    BUILTIN.iter().map(|(name, _)| *name)
}

pub fn load(name: &str) -> Result<ScenarioConfig> {
    let (_, text) = BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Scenario(format!("no built-in scenario named {name:?}")))?;
    ScenarioConfig::from_json(text)
}

/// `(name, description)` for every built-in scenario.
pub fn list() -> Vec<(&'static str, String)> {
    BUILTIN
        .iter()
        .map(|(name, _)| (*name, load(name).map(|c| c.description).unwrap_or_default()))
        .collect()
}
