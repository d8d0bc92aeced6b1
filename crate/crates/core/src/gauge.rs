//! Z2 link variables, vortex loops, gauge transformations and vortex sectors.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{self, BitVec};
use crate::lattice::{Ladder, Loop};

/// Default upper bound on the number of cycles an exhaustive sweep may enumerate.
pub const SWEEP_CYCLE_LIMIT: usize = 30;

/// Link signs `u(i -> j)` on canonical orientations, aligned with `Ladder::bonds`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaugeConfig {
    pub u: Vec<i8>,
}

#[derive(Serialize, Deserialize)]
struct GaugeDocument {
    u: Vec<(usize, usize, i8)>,
}

impl GaugeConfig {
    pub fn uniform(ladder: &Ladder) -> Self {
        GaugeConfig { u: vec![1; ladder.bonds.len()] }
    }

    pub fn get(&self, ladder: &Ladder, a: usize, b: usize) -> Option<i8> {
        let k = ladder.bond_index(a, b)?;
        Some(if a < b { self.u[k] } else { -self.u[k] })
    }

    pub fn check(&self, ladder: &Ladder) -> Result<()> {
        if self.u.len() != ladder.bonds.len() {
            return Err(Error::InvalidInput(format!(
                "gauge has {} links but the ladder has {} bonds",
                self.u.len(),
                ladder.bonds.len()
            )));
        }
        if self.u.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput("link signs must be +1 or -1".into()));
        }
        Ok(())
    }

    pub fn to_json(&self, ladder: &Ladder) -> String {
        let doc = GaugeDocument { u: ladder.bonds.iter().zip(&self.u).map(|(b, &s)| (b.i, b.j, s)).collect() };
        serde_json::to_string(&doc).expect("gauge document serializes")
    }

    pub fn from_json(ladder: &Ladder, text: &str) -> Result<Self> {
        let doc: GaugeDocument = serde_json::from_str(text)?;
        let mut u = vec![0i8; ladder.bonds.len()];
        for (a, b, s) in doc.u {
            let k = ladder
                .bond_index(a, b)
                .ok_or_else(|| Error::InvalidInput(format!("({a},{b}) is not a bond")))?;
            if u[k] != 0 {
                return Err(Error::InvalidInput(format!("bond ({a},{b}) listed twice")));
            }
            u[k] = if a < b { s } else { -s };
        }
        if let Some(k) = u.iter().position(|&s| s == 0) {
            let b = ladder.bonds[k];
            return Err(Error::InvalidInput(format!("bond ({},{}) has no link sign", b.i, b.j)));
        }
        let g = GaugeConfig { u };
        g.check(ladder)?;
        Ok(g)
    }
}

/// Site signs `s_k = (-1)^{n_k}` of a gauge transformation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignAssignment {
    pub s: Vec<i8>,
}

impl SignAssignment {
    pub fn identity(n_sites: usize) -> Self {
        SignAssignment { s: vec![1; n_sites] }
    }

    pub fn get(&self, site: usize) -> i8 {
        self.s[site - 1]
    }

    pub fn flip(&mut self, site: usize) {
        self.s[site - 1] = -self.s[site - 1];
    }
}

/// `-prod u` along the loop, each link read in the direction of travel.
pub fn vortex_value(g: &GaugeConfig, ladder: &Ladder, lp: &Loop) -> Result<i8> {
    let mut prod = -1i8;
    for step in ladder.loop_steps(lp)? {
        let u = g.u[step.bond];
        prod *= if step.forward { u } else { -u };
    }
    Ok(prod)
}

pub fn apply_gauge(g: &GaugeConfig, ladder: &Ladder, s: &SignAssignment) -> GaugeConfig {
    let u = ladder.bonds.iter().zip(&g.u).map(|(b, &u)| u * s.get(b.i) * s.get(b.j)).collect();
    GaugeConfig { u }
}

/// Vortex values on the cycle basis, aligned with `Ladder::cycle_basis`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VortexSector {
    pub values: Vec<i8>,
}

impl VortexSector {
    pub fn vortex_free(ladder: &Ladder) -> Self {
        VortexSector { values: vec![1; ladder.cycle_basis.len()] }
    }

    /// Bit k is set when cycle k carries a vortex.
    pub fn from_id(ladder: &Ladder, id: u64) -> Self {
        let values = (0..ladder.cycle_basis.len()).map(|k| if (id >> k) & 1 == 1 { -1 } else { 1 }).collect();
        VortexSector { values }
    }

    pub fn id(&self) -> Option<u64> {
        if self.values.len() > 64 {
            return None;
        }
        Some(self.values.iter().enumerate().filter(|(_, &v)| v == -1).map(|(k, _)| 1u64 << k).sum())
    }

    pub fn vortex_count(&self) -> usize {
        self.values.iter().filter(|&&v| v == -1).count()
    }

    pub fn get(&self, ladder: &Ladder, id: &str) -> Option<i8> {
        ladder.cycle_index(id).map(|k| self.values[k])
    }

    pub fn set(&mut self, ladder: &Ladder, id: &str, value: i8) -> Result<()> {
        let k = ladder.cycle_index(id).ok_or_else(|| Error::InvalidInput(format!("no cycle named {id}")))?;
        self.values[k] = value;
        Ok(())
    }

    pub fn check(&self, ladder: &Ladder) -> Result<()> {
        if self.values.len() != ladder.cycle_basis.len() || self.values.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidInput("sector must give +1 or -1 for every basis cycle".into()));
        }
        Ok(())
    }

    pub fn to_map(&self, ladder: &Ladder) -> BTreeMap<String, i8> {
        ladder.cycle_basis.iter().zip(&self.values).map(|(c, &v)| (c.id.clone(), v)).collect()
    }

    pub fn to_value(&self, ladder: &Ladder) -> serde_json::Value {
        let cycles: serde_json::Map<String, serde_json::Value> =
            ladder.cycle_basis.iter().zip(&self.values).map(|(c, &v)| (c.id.clone(), v.into())).collect();
        serde_json::json!({ "cycles": cycles })
    }

    pub fn to_json(&self, ladder: &Ladder) -> String {
        self.to_value(ladder).to_string()
    }

    /// Accepts `{"cycles": {...}}` or the bare map. Every basis cycle must be present.
    pub fn from_value(ladder: &Ladder, value: &serde_json::Value) -> Result<Self> {
        let map = value.get("cycles").unwrap_or(value);
        let map: BTreeMap<String, i8> = serde_json::from_value(map.clone())?;
        let mut values = Vec::with_capacity(ladder.cycle_basis.len());
        for c in &ladder.cycle_basis {
            let v = map.get(&c.id).ok_or_else(|| Error::InvalidInput(format!("sector misses cycle {}", c.id)))?;
            values.push(*v);
        }
        if let Some(extra) = map.keys().find(|k| ladder.cycle_index(k).is_none()) {
            return Err(Error::InvalidInput(format!("sector names unknown cycle {extra}")));
        }
        let v = VortexSector { values };
        v.check(ladder)?;
        Ok(v)
    }

    pub fn from_json(ladder: &Ladder, text: &str) -> Result<Self> {
        Self::from_value(ladder, &serde_json::from_str(text)?)
    }

    /// Vortex pattern from a `+`-joined list such as `BL+p2N-1+p2N`, `p3`, or `vf`.
    ///
    /// Plaquette indices may be written with `N` as the cell count (`p2N-2`).
    pub fn from_pattern(ladder: &Ladder, pattern: &str) -> Result<Self> {
        let mut v = Self::vortex_free(ladder);
        let n = ladder.n_cells() as i64;
        for token in pattern.split('+').map(str::trim).filter(|t| !t.is_empty()) {
            let lower = token.to_ascii_lowercase();
            if lower == "vf" || lower == "none" {
                continue;
            }
            let k = if lower == "bl" || lower == "big" {
                ladder.cycle_index("big").ok_or_else(|| Error::InvalidInput("open ladders have no big loop".into()))?
            } else if let Some(expr) = token.strip_prefix('p') {
                let idx = eval_index(expr, n)
                    .ok_or_else(|| Error::InvalidInput(format!("cannot read plaquette index {token}")))?;
                ladder
                    .cycle_index(&format!("p{idx}"))
                    .ok_or_else(|| Error::InvalidInput(format!("{token} = p{idx} is not a plaquette")))?
            } else {
                return Err(Error::InvalidInput(format!("unknown pattern token {token}")));
            };
            v.values[k] = -v.values[k];
        }
        Ok(v)
    }
}

/// Evaluates `a`, `aN`, `aN+b`, `aN-b` with integer a, b.
fn eval_index(expr: &str, n: i64) -> Option<i64> {
    if let Ok(k) = expr.parse() {
        return Some(k);
    }
    let (head, tail) = expr.split_once('N')?;
    let coef: i64 = if head.is_empty() { 1 } else { head.parse().ok()? };
    let offset: i64 = if tail.is_empty() { 0 } else { tail.parse().ok()? };
    Some(coef * n + offset)
}

pub fn sector_of(g: &GaugeConfig, ladder: &Ladder) -> VortexSector {
    let values = ladder
        .cycle_basis
        .iter()
        .map(|c| vortex_value(g, ladder, c).expect("basis loops are valid"))
        .collect();
    VortexSector { values }
}

/// Precomputed linear map from vortex sectors to representative gauges.
///
/// Links on the lexicographically smallest spanning tree are +1; the co-tree
/// links solve the GF(2) system fixing every basis cycle.
#[derive(Clone, Debug)]
pub struct SectorSolver {
    cotree: Vec<usize>,
    /// Row r: which cycle bits determine co-tree link r.
    inverse: Vec<BitVec>,
    /// Cycle bit value of the all-plus gauge.
    offset: BitVec,
}

impl SectorSolver {
    pub fn new(ladder: &Ladder) -> Self {
        let n = ladder.n_sites();
        let mut parent: Vec<usize> = (0..=n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut cotree = Vec::new();
        for (k, b) in ladder.bonds.iter().enumerate() {
            let (ri, rj) = (find(&mut parent, b.i), find(&mut parent, b.j));
            if ri == rj {
                cotree.push(k);
            } else {
                parent[ri] = rj;
            }
        }
        let m = ladder.cycle_basis.len();
        assert_eq!(cotree.len(), m, "cycle basis size must equal co-tree size");
        let position: BTreeMap<usize, usize> = cotree.iter().enumerate().map(|(r, &k)| (k, r)).collect();
        let mut rows = Vec::with_capacity(m);
        let mut offset = BitVec::zeros(m);
        for (c, lp) in ladder.cycle_basis.iter().enumerate() {
            let mut row = BitVec::zeros(m);
            let mut reversed = 0usize;
            for step in ladder.loop_steps(lp).expect("basis loops are valid") {
                if let Some(&r) = position.get(&step.bond) {
                    row.flip(r);
                }
                reversed += usize::from(!step.forward);
            }
            // vortex bit = 1 + (#reversed steps) + sum of link bits (mod 2)
            offset.set(c, (1 + reversed) % 2 == 1);
            rows.push(row);
        }
        let inverse = gf2::invert(&rows).expect("cycle basis is independent");
        SectorSolver { cotree, inverse, offset }
    }

    pub fn gauge(&self, ladder: &Ladder, v: &VortexSector) -> GaugeConfig {
        let m = self.offset.len();
        let mut rhs = BitVec::zeros(m);
        for (c, &val) in v.values.iter().enumerate() {
            rhs.set(c, (val == -1) != self.offset.get(c));
        }
        let mut u = vec![1i8; ladder.bonds.len()];
        for (r, &k) in self.cotree.iter().enumerate() {
            if self.inverse[r].dot(&rhs) {
                u[k] = -1;
            }
        }
        GaugeConfig { u }
    }
}

pub fn gauge_for_sector(ladder: &Ladder, v: &VortexSector) -> Result<GaugeConfig> {
    v.check(ladder)?;
    Ok(SectorSolver::new(ladder).gauge(ladder, v))
}

/// Sectors with ids in `range`, in increasing id order.
#[derive(Clone, Debug)]
pub struct SectorIter<'a> {
    ladder: &'a Ladder,
    next: u64,
    end: u64,
}

impl<'a> SectorIter<'a> {
    pub fn split_at(self, mid: u64) -> (SectorIter<'a>, SectorIter<'a>) {
        let mid = mid.clamp(self.next, self.end);
        (SectorIter { end: mid, ..self.clone() }, SectorIter { next: mid, ..self })
    }
}

impl Iterator for SectorIter<'_> {
    type Item = VortexSector;

    fn next(&mut self) -> Option<VortexSector> {
        if self.next >= self.end {
            return None;
        }
        let v = VortexSector::from_id(self.ladder, self.next);
        self.next += 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for SectorIter<'_> {}

pub fn sector_count(ladder: &Ladder, limit: usize) -> Result<u64> {
    let m = ladder.cycle_basis.len();
    if m > limit || m >= 64 {
        return Err(Error::SweepTooLarge { count: m, limit });
    }
    Ok(1u64 << m)
}

pub fn enumerate_sectors(ladder: &Ladder) -> Result<SectorIter<'_>> {
    enumerate_sectors_limited(ladder, SWEEP_CYCLE_LIMIT)
}

pub fn enumerate_sectors_limited(ladder: &Ladder, limit: usize) -> Result<SectorIter<'_>> {
    let end = sector_count(ladder, limit)?;
    Ok(SectorIter { ladder, next: 0, end })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_ladder, LadderSpec};

    fn open2() -> Ladder {
        build_ladder(LadderSpec::open(2).unwrap()).unwrap()
    }

    #[test]
    fn single_plaquette_values() {
        let l = open2();
        let p1 = l.plaquette(1).unwrap().clone();
        let mut g = GaugeConfig::uniform(&l);
        assert_eq!(vortex_value(&g, &l, &p1).unwrap(), 1);
        g.u[l.bond_index(1, 4).unwrap()] = -1;
        assert_eq!(vortex_value(&g, &l, &p1).unwrap(), -1);
        assert_eq!(vortex_value(&g, &l, &p1.reversed()).unwrap(), -1);
    }

    #[test]
    fn uniform_gauge_is_vortex_free_on_open_pair() {
        // Hand traversal: p1 has one reversed step (4->1), p2 = (4,3,6,5) has three.
        let l = open2();
        assert_eq!(sector_of(&GaugeConfig::uniform(&l), &l).values, vec![1, 1, 1]);
    }

    #[test]
    fn single_site_flip() {
        let l = open2();
        let g = GaugeConfig::uniform(&l);
        let mut s = SignAssignment::identity(8);
        s.flip(4);
        let h = apply_gauge(&g, &l, &s);
        let flipped: Vec<_> = l.bonds.iter().zip(&h.u).filter(|(_, &u)| u == -1).map(|(b, _)| (b.i, b.j)).collect();
        assert_eq!(flipped, vec![(1, 4), (3, 4), (4, 5)]);
        assert_eq!(sector_of(&h, &l), sector_of(&g, &l));
        let all = SignAssignment { s: vec![-1; 8] };
        assert_eq!(apply_gauge(&g, &l, &all), g);
    }

    #[test]
    fn sector_requests_are_met() {
        let l = open2();
        let mut v = VortexSector::vortex_free(&l);
        v.values[1] = -1;
        assert_eq!(sector_of(&gauge_for_sector(&l, &v).unwrap(), &l), v);
        let c = build_ladder(LadderSpec::closed(2).unwrap()).unwrap();
        let full = VortexSector { values: vec![-1; 5] };
        assert_eq!(sector_of(&gauge_for_sector(&c, &full).unwrap(), &c), full);
    }

    #[test]
    fn enumeration_counts_and_guard() {
        assert_eq!(enumerate_sectors(&open2()).unwrap().count(), 8);
        let c = build_ladder(LadderSpec::closed(2).unwrap()).unwrap();
        assert_eq!(enumerate_sectors(&c).unwrap().len(), 32);
        let o8 = build_ladder(LadderSpec::open(8).unwrap()).unwrap();
        assert_eq!(enumerate_sectors(&o8).unwrap().len(), 32768);
        let big = build_ladder(LadderSpec::closed(16).unwrap()).unwrap();
        assert!(matches!(enumerate_sectors(&big), Err(Error::SweepTooLarge { count: 33, limit: 30 })));
        let ids: Vec<_> = enumerate_sectors(&c).unwrap().map(|v| v.id().unwrap()).collect();
        assert_eq!(ids, (0..32).collect::<Vec<_>>());
        let (a, b) = enumerate_sectors(&c).unwrap().split_at(10);
        assert_eq!((a.len(), b.len()), (10, 22));
    }

    #[test]
    fn json_forms() {
        let c = build_ladder(LadderSpec::closed(2).unwrap()).unwrap();
        let v = VortexSector::from_pattern(&c, "BL+p2N").unwrap();
        assert_eq!(v.to_json(&c), r#"{"cycles":{"p1":1,"p2":1,"p3":1,"p4":-1,"big":-1}}"#);
        assert_eq!(VortexSector::from_json(&c, &v.to_json(&c)).unwrap(), v);
        assert!(VortexSector::from_json(&c, r#"{"cycles":{"p1":1}}"#).is_err());
        let g = gauge_for_sector(&c, &v).unwrap();
        assert_eq!(GaugeConfig::from_json(&c, &g.to_json(&c)).unwrap(), g);
        let reversed = g.to_json(&c).replace("[1,2,", "[2,1,");
        assert_eq!(GaugeConfig::from_json(&c, &reversed).unwrap().u[0], -g.u[0]);
    }

    #[test]
    fn patterns() {
        let c = build_ladder(LadderSpec::closed(4).unwrap()).unwrap();
        let v = VortexSector::from_pattern(&c, "BL+p2N-1+p2N").unwrap();
        assert_eq!(v.get(&c, "p7"), Some(-1));
        assert_eq!(v.get(&c, "p8"), Some(-1));
        assert_eq!(v.get(&c, "big"), Some(-1));
        assert_eq!(v.vortex_count(), 3);
        assert!(VortexSector::from_pattern(&open2(), "BL").is_err());
        assert!(VortexSector::from_pattern(&c, "p9").is_err());
        assert_eq!(VortexSector::from_pattern(&c, "vf").unwrap(), VortexSector::vortex_free(&c));
    }
}
