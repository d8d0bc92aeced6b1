//! Named coupling families used in the numerical experiments.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::couplings::CouplingConfig;
use crate::error::{Error, Result};
use crate::lattice::{Boundary, BondType, Ladder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetName {
    #[serde(rename = "homogeneous-xyz")]
    HomogeneousXYZ,
    DecayingTopOpen,
    DecayingTopClosed,
}

impl PresetName {
    pub const ALL: [PresetName; 3] = [PresetName::HomogeneousXYZ, PresetName::DecayingTopOpen, PresetName::DecayingTopClosed];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::HomogeneousXYZ => "homogeneous-xyz",
            PresetName::DecayingTopOpen => "decaying-top-open",
            PresetName::DecayingTopClosed => "decaying-top-closed",
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PresetName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown preset {s}")))
    }
}

/// Position index k of a top-rail bond counted left to right, or `None` for other bonds.
///
/// Top X bonds sit in fundamental plaquettes (odd k), top Y bonds in
/// connecting plaquettes (even k); the closing Y bond of a ring is k = 2N.
pub fn top_rail_index(ladder: &Ladder, i: usize, j: usize) -> Option<usize> {
    let b = ladder.bond(i, j)?;
    let n = ladder.n_cells();
    match b.kind {
        BondType::X if b.i % 4 == 2 && b.j == b.i + 1 => Some(b.i / 2),
        BondType::Y if b.i % 4 == 3 && b.j == b.i + 3 => Some((b.i + 1) / 2),
        BondType::Y if (b.i, b.j) == (2, 4 * n - 1) => Some(2 * n),
        _ => None,
    }
}

pub fn make_couplings(ladder: &Ladder, preset: PresetName, jx: f64, jy: f64, jz: f64) -> Result<CouplingConfig> {
    let boundary = ladder.spec.boundary;
    match (preset, boundary) {
        (PresetName::DecayingTopOpen, Boundary::Closed) | (PresetName::DecayingTopClosed, Boundary::Open) => {
            return Err(Error::InvalidInput(format!("preset {preset} does not fit a {boundary:?} ladder")));
        }
        _ => {}
    }
    let base = CouplingConfig::homogeneous(ladder, jx, jy, jz);
    if preset == PresetName::HomogeneousXYZ {
        return Ok(base);
    }
    let j = ladder
        .bonds
        .iter()
        .zip(base.j)
        .map(|(b, v)| match top_rail_index(ladder, b.i, b.j) {
            Some(k) => v + v / k as f64,
            None => v,
        })
        .collect();
    Ok(CouplingConfig { j })
}
