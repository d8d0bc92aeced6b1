//! Real bond couplings J_(ij).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{BondType, Ladder, ReflectionMap};

/// Couplings aligned with `Ladder::bonds`. Signs are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingConfig {
    pub j: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CouplingDocument {
    bonds: Vec<(usize, usize, f64)>,
}

impl CouplingConfig {
    pub fn homogeneous(ladder: &Ladder, jx: f64, jy: f64, jz: f64) -> Self {
        Self::from_fn(ladder, |b| match b.kind {
            BondType::X => jx,
            BondType::Y => jy,
            BondType::Z => jz,
        })
    }

    pub fn zero(ladder: &Ladder) -> Self {
        CouplingConfig { j: vec![0.0; ladder.bonds.len()] }
    }

    pub fn from_fn(ladder: &Ladder, f: impl Fn(&crate::lattice::OrientedBond) -> f64) -> Self {
        CouplingConfig { j: ladder.bonds.iter().map(f).collect() }
    }

    /// Independent uniform draws in `[low, high)` per bond.
    pub fn random<R: Rng + ?Sized>(ladder: &Ladder, rng: &mut R, low: f64, high: f64) -> Self {
        CouplingConfig { j: ladder.bonds.iter().map(|_| rng.random_range(low..high)).collect() }
    }

    pub fn get(&self, ladder: &Ladder, a: usize, b: usize) -> Option<f64> {
        ladder.bond_index(a, b).map(|k| self.j[k])
    }

    /// Coupling of an existing bond; panics on non-bonds.
    pub fn at(&self, ladder: &Ladder, a: usize, b: usize) -> f64 {
        self.get(ladder, a, b).unwrap_or_else(|| panic!("({a},{b}) is not a bond"))
    }

    pub fn set(&mut self, ladder: &Ladder, a: usize, b: usize, value: f64) -> Result<()> {
        let k = ladder.bond_index(a, b).ok_or_else(|| Error::InvalidInput(format!("({a},{b}) is not a bond")))?;
        self.j[k] = value;
        Ok(())
    }

    pub fn check(&self, ladder: &Ladder) -> Result<()> {
        if self.j.len() != ladder.bonds.len() {
            return Err(Error::InvalidInput(format!(
                "{} couplings given for {} bonds",
                self.j.len(),
                ladder.bonds.len()
            )));
        }
        if self.j.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("couplings must be finite".into()));
        }
        Ok(())
    }

    /// `|J_(theta i, theta j)| == |J_(ij)|` within `tol` for every bond.
    pub fn is_reflection_symmetric(&self, ladder: &Ladder, refl: &ReflectionMap, tol: f64) -> bool {
        ladder.bonds.iter().zip(&self.j).all(|(b, &v)| {
            self.get(ladder, refl.image(b.i), refl.image(b.j)).is_some_and(|w| (w.abs() - v.abs()).abs() <= tol)
        })
    }

    pub fn to_json(&self, ladder: &Ladder) -> String {
        let doc = CouplingDocument { bonds: ladder.bonds.iter().zip(&self.j).map(|(b, &v)| (b.i, b.j, v)).collect() };
        serde_json::to_string(&doc).expect("coupling document serializes")
    }

    pub fn from_value(ladder: &Ladder, value: &serde_json::Value) -> Result<Self> {
        let doc: CouplingDocument = serde_json::from_value(value.clone())?;
        let mut j = vec![f64::NAN; ladder.bonds.len()];
        for (a, b, v) in doc.bonds {
            let k = ladder.bond_index(a, b).ok_or_else(|| Error::InvalidInput(format!("({a},{b}) is not a bond")))?;
            j[k] = v;
        }
        if let Some(k) = j.iter().position(|v| v.is_nan()) {
            let b = ladder.bonds[k];
            return Err(Error::InvalidInput(format!("bond ({},{}) has no coupling", b.i, b.j)));
        }
        let c = CouplingConfig { j };
        c.check(ladder)?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_ladder, reflection, LadderSpec, ReflectionCase};

    #[test]
    fn homogeneous_and_json() {
        let l = build_ladder(LadderSpec::closed(2).unwrap()).unwrap();
        let c = CouplingConfig::homogeneous(&l, 1.0, 0.2, 2.0);
        assert_eq!(c.at(&l, 8, 1), 1.0);
        assert_eq!(c.at(&l, 2, 7), 0.2);
        assert_eq!(c.at(&l, 5, 6), 2.0);
        let v: serde_json::Value = serde_json::from_str(&c.to_json(&l)).unwrap();
        assert_eq!(CouplingConfig::from_value(&l, &v).unwrap(), c);
        let missing = serde_json::json!({"bonds": [[1, 2, 1.0]]});
        assert!(CouplingConfig::from_value(&l, &missing).is_err());
    }

    #[test]
    fn symmetry_detection() {
        let l = build_ladder(LadderSpec::open(2).unwrap()).unwrap();
        let refl = reflection(&l, ReflectionCase::VerticalOpen).unwrap();
        let mut c = CouplingConfig::homogeneous(&l, 1.0, 0.5, 0.3);
        assert!(c.is_reflection_symmetric(&l, &refl, 0.0));
        c.set(&l, 1, 2, -0.3).unwrap();
        assert!(c.is_reflection_symmetric(&l, &refl, 0.0));
        c.set(&l, 1, 2, 0.4).unwrap();
        assert!(!c.is_reflection_symmetric(&l, &refl, 0.0));
    }
}
