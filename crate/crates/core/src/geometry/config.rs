use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geometry::{Branch, BranchShape, MarkovExpandingMap};

/// TOML map description: either `preset = "<name>"` (with optional `eps` for
/// `sine-doubling`) or a list of `[[branch]]` tables.
///
/// ```toml
/// name = "slopes24"
/// [[branch]]
/// domain = [0.0, 0.5]
/// image = [0.0, 1.0]
/// [[branch]]
/// domain = [0.5, 0.75]
/// image = [0.0, 1.0]
/// sine = 0.05          # optional bend, |sine| < 1
/// increasing = true    # optional
/// ```
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub name: Option<String>,
    pub preset: Option<String>,
    pub eps: Option<f64>,
    #[serde(default)]
    pub branch: Vec<BranchConfig>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchConfig {
    pub domain: [f64; 2],
    pub image: [f64; 2],
    #[serde(default = "yes")]
    pub increasing: bool,
    pub sine: Option<f64>,
}

fn yes() -> bool {
    true
}

impl MapConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn build(&self) -> Result<MarkovExpandingMap> {
        match (&self.preset, self.branch.is_empty()) {
            (Some(_), false) => Err(Error::InvalidMap("give either a preset or branches, not both".into())),
            (Some(p), true) if p == "sine-doubling" => MarkovExpandingMap::sine_doubling(self.eps.unwrap_or(0.1)),
            (Some(p), true) => MarkovExpandingMap::preset(p),
            (None, true) => Err(Error::InvalidMap("no preset and no branches".into())),
            (None, false) => {
                let branches = self
                    .branch
                    .iter()
                    .map(|b| Branch {
                        domain: b.domain,
                        image: b.image,
                        increasing: b.increasing,
                        shape: b.sine.map_or(BranchShape::Linear, |eps| BranchShape::Sine { eps }),
                    })
                    .collect();
                MarkovExpandingMap::new(self.name.clone().unwrap_or_else(|| "custom".into()), branches)
            }
        }
    }
}

pub fn map_from_toml(text: &str) -> Result<MarkovExpandingMap> {
    MapConfig::parse(text)?.build()
}
