//! Geometry of the 2 x 2N ladder: sites, typed bonds, plaquettes, cycle basis
//! and mirror symmetries.
//!
//! Sites are labelled 1..=4N. Fundamental cell n holds sites 4n-3..=4n; the
//! bottom rail is 1, 4, 5, 8, ... and the top rail 2, 3, 6, 7, ...

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{self, BitVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LadderSpec {
    pub n_cells: usize,
    pub boundary: Boundary,
}

impl LadderSpec {
    pub fn new(n_cells: usize, boundary: Boundary) -> Result<Self> {
        let spec = LadderSpec { n_cells, boundary };
        spec.validate()?;
        Ok(spec)
    }

    pub fn open(n_cells: usize) -> Result<Self> {
        Self::new(n_cells, Boundary::Open)
    }

    pub fn closed(n_cells: usize) -> Result<Self> {
        Self::new(n_cells, Boundary::Closed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cells < 2 {
            return Err(Error::InvalidSpec(format!("n_cells must be at least 2, got {}", self.n_cells)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BondType {
    X,
    Y,
    Z,
}

impl BondType {
    pub const ALL: [BondType; 3] = [BondType::X, BondType::Y, BondType::Z];

    pub fn as_str(self) -> &'static str {
        match self {
            BondType::X => "x",
            BondType::Y => "y",
            BondType::Z => "z",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "x" | "X" => Some(BondType::X),
            "y" | "Y" => Some(BondType::Y),
            "z" | "Z" => Some(BondType::Z),
            _ => None,
        }
    }
}

impl fmt::Display for BondType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A bond stored in canonical orientation `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedBond {
    pub i: usize,
    pub j: usize,
    pub kind: BondType,
}

impl OrientedBond {
    pub fn new(a: usize, b: usize, kind: BondType) -> Self {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        OrientedBond { i, j, kind }
    }

    pub fn touches(&self, site: usize) -> bool {
        self.i == site || self.j == site
    }
}

/// A closed oriented loop given by its site sequence; the last site connects back to the first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Loop {
    pub id: String,
    pub sites: Vec<usize>,
}

impl Loop {
    pub fn new(id: impl Into<String>, sites: Vec<usize>) -> Self {
        Loop { id: id.into(), sites }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Consecutive site pairs in traversal order, including the closing step.
    pub fn steps(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.sites.len();
        (0..n).map(move |k| (self.sites[k], self.sites[(k + 1) % n]))
    }

    pub fn reversed(&self) -> Loop {
        let mut sites = self.sites.clone();
        sites.reverse();
        Loop { id: format!("-{}", self.id), sites }
    }

    /// Same cyclic sequence up to the choice of starting point.
    pub fn same_cycle(&self, other: &[usize]) -> bool {
        let n = self.sites.len();
        if n != other.len() {
            return false;
        }
        if n == 0 {
            return true;
        }
        (0..n).any(|shift| (0..n).all(|k| self.sites[k] == other[(k + shift) % n]))
    }
}

/// One step of a loop expressed through the bond list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoopStep {
    pub bond: usize,
    /// True when the step follows the canonical orientation `i -> j`.
    pub forward: bool,
}

#[derive(Clone, Debug)]
pub struct Ladder {
    pub spec: LadderSpec,
    pub sites: Vec<usize>,
    /// Sorted by `(i, j)`.
    pub bonds: Vec<OrientedBond>,
    /// Plaquettes p1.. followed by the big loop when closed.
    pub cycle_basis: Vec<Loop>,
    n_plaquettes: usize,
    lookup: HashMap<(usize, usize), usize>,
}

pub fn build_ladder(spec: LadderSpec) -> Result<Ladder> {
    spec.validate()?;
    let n = spec.n_cells;
    let closed = spec.boundary == Boundary::Closed;
    let mut bonds = Vec::with_capacity(6 * n);
    for c in 1..=n {
        bonds.push(OrientedBond::new(4 * c - 3, 4 * c - 2, BondType::Z));
        bonds.push(OrientedBond::new(4 * c - 1, 4 * c, BondType::Z));
        bonds.push(OrientedBond::new(4 * c - 2, 4 * c - 1, BondType::X));
        bonds.push(OrientedBond::new(4 * c - 3, 4 * c, BondType::Y));
    }
    for j in 1..n {
        bonds.push(OrientedBond::new(4 * j, 4 * j + 1, BondType::X));
        bonds.push(OrientedBond::new(4 * j - 1, 4 * j + 2, BondType::Y));
    }
    if closed {
        bonds.push(OrientedBond::new(1, 4 * n, BondType::X));
        bonds.push(OrientedBond::new(2, 4 * n - 1, BondType::Y));
    }
    bonds.sort();
    let lookup = bonds.iter().enumerate().map(|(k, b)| ((b.i, b.j), k)).collect();

    let mut cycle_basis = Vec::new();
    for c in 1..=n {
        cycle_basis.push(Loop::new(format!("p{}", 2 * c - 1), vec![4 * c - 3, 4 * c - 2, 4 * c - 1, 4 * c]));
        if c < n {
            cycle_basis.push(Loop::new(format!("p{}", 2 * c), vec![4 * c, 4 * c - 1, 4 * c + 2, 4 * c + 1]));
        }
    }
    if closed {
        cycle_basis.push(Loop::new(format!("p{}", 2 * n), vec![4 * n, 4 * n - 1, 2, 1]));
    }
    let n_plaquettes = cycle_basis.len();
    if closed {
        let rail = (1..=n).flat_map(|c| [4 * c - 3, 4 * c]).collect();
        cycle_basis.push(Loop::new("big", rail));
    }

    Ok(Ladder { spec, sites: (1..=4 * n).collect(), bonds, cycle_basis, n_plaquettes, lookup })
}

impl Ladder {
    pub fn n_cells(&self) -> usize {
        self.spec.n_cells
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn is_closed(&self) -> bool {
        self.spec.boundary == Boundary::Closed
    }

    pub fn plaquettes(&self) -> &[Loop] {
        &self.cycle_basis[..self.n_plaquettes]
    }

    /// Plaquette p_k, 1-based.
    pub fn plaquette(&self, k: usize) -> Option<&Loop> {
        k.checked_sub(1).and_then(|i| self.plaquettes().get(i))
    }

    pub fn big_loop(&self) -> Option<&Loop> {
        self.is_closed().then(|| self.cycle_basis.last()).flatten()
    }

    pub fn cycle_ids(&self) -> Vec<&str> {
        self.cycle_basis.iter().map(|c| c.id.as_str()).collect()
    }

    pub fn cycle_index(&self, id: &str) -> Option<usize> {
        self.cycle_basis.iter().position(|c| c.id == id)
    }

    pub fn bond_index(&self, a: usize, b: usize) -> Option<usize> {
        self.lookup.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn bond(&self, a: usize, b: usize) -> Option<&OrientedBond> {
        self.bond_index(a, b).map(|k| &self.bonds[k])
    }

    pub fn bonds_of_type(&self, kind: BondType) -> impl Iterator<Item = &OrientedBond> {
        self.bonds.iter().filter(move |b| b.kind == kind)
    }

    /// Resolve a loop into bond steps, failing on non-bonds, repeated sites or short loops.
    pub fn loop_steps(&self, lp: &Loop) -> Result<Vec<LoopStep>> {
        if lp.len() < 3 {
            return Err(Error::InvalidLoop(format!("{} has only {} sites", lp.id, lp.len())));
        }
        let distinct: BTreeSet<_> = lp.sites.iter().collect();
        if distinct.len() != lp.len() {
            return Err(Error::InvalidLoop(format!("{} revisits a site", lp.id)));
        }
        lp.steps()
            .map(|(a, b)| {
                self.bond_index(a, b)
                    .map(|bond| LoopStep { bond, forward: a < b })
                    .ok_or_else(|| Error::InvalidLoop(format!("{}: ({a},{b}) is not a bond", lp.id)))
            })
            .collect()
    }

    /// Bond incidence vector of a loop over GF(2).
    pub fn loop_incidence(&self, lp: &Loop) -> Result<BitVec> {
        let mut v = BitVec::zeros(self.bonds.len());
        for step in self.loop_steps(lp)? {
            v.flip(step.bond);
        }
        Ok(v)
    }

    pub fn cycle_basis_rank(&self) -> usize {
        let rows: Vec<BitVec> = self
            .cycle_basis
            .iter()
            .map(|c| self.loop_incidence(c).expect("basis loops are valid"))
            .collect();
        gf2::rank(&rows)
    }

    pub fn to_document(&self) -> LadderDocument {
        LadderDocument {
            n_cells: self.spec.n_cells,
            boundary: self.spec.boundary,
            bonds: self.bonds.iter().map(|b| (b.i, b.j, b.kind)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("ladder document serializes")
    }

    /// Parse a ladder document, rejecting any bond list that differs from the canonical one.
    pub fn from_json(text: &str) -> Result<Ladder> {
        let doc: LadderDocument = serde_json::from_str(text)?;
        let ladder = build_ladder(LadderSpec { n_cells: doc.n_cells, boundary: doc.boundary })?;
        if !doc.bonds.is_empty() {
            let expected: Vec<_> = ladder.bonds.iter().map(|b| (b.i, b.j, b.kind)).collect();
            if doc.bonds != expected {
                return Err(Error::InvalidSpec("bond list does not match the ladder geometry".into()));
            }
        }
        Ok(ladder)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderDocument {
    pub n_cells: usize,
    pub boundary: Boundary,
    #[serde(default)]
    pub bonds: Vec<(usize, usize, BondType)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReflectionCase {
    Horizontal,
    VerticalOpen,
    VerticalClosed,
}

impl ReflectionCase {
    pub const ALL: [ReflectionCase; 3] =
        [ReflectionCase::Horizontal, ReflectionCase::VerticalOpen, ReflectionCase::VerticalClosed];

    pub fn applies_to(self, boundary: Boundary) -> bool {
        match self {
            ReflectionCase::Horizontal => true,
            ReflectionCase::VerticalOpen => boundary == Boundary::Open,
            ReflectionCase::VerticalClosed => boundary == Boundary::Closed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReflectionMap {
    pub case: ReflectionCase,
    /// `theta[k - 1]` is the image of site k.
    pub theta: Vec<usize>,
    pub negative_half: BTreeSet<usize>,
    pub cross_bonds: Vec<OrientedBond>,
}

impl ReflectionMap {
    pub fn image(&self, site: usize) -> usize {
        self.theta[site - 1]
    }

    pub fn in_negative(&self, site: usize) -> bool {
        self.negative_half.contains(&site)
    }

    pub fn positive_half(&self) -> BTreeSet<usize> {
        self.negative_half.iter().map(|&s| self.image(s)).collect()
    }

    pub fn is_cross(&self, a: usize, b: usize) -> bool {
        self.in_negative(a) != self.in_negative(b)
    }
}

pub fn reflection(ladder: &Ladder, case: ReflectionCase) -> Result<ReflectionMap> {
    if !case.applies_to(ladder.spec.boundary) {
        return Err(Error::UnsupportedReflection(format!(
            "{case:?} does not apply to a {:?} ladder",
            ladder.spec.boundary
        )));
    }
    let n = ladder.n_cells();
    let m = 4 * n;
    let (theta, negative_half): (Vec<usize>, BTreeSet<usize>) = match case {
        ReflectionCase::Horizontal => {
            let theta = (1..=m)
                .map(|k| match k % 4 {
                    1 => k + 1,
                    2 => k - 1,
                    3 => k + 1,
                    _ => k - 1,
                })
                .collect();
            (theta, (1..=n).flat_map(|c| [4 * c - 3, 4 * c]).collect())
        }
        // The mirror k -> 4N+1-k maps rung r to rung 2N+1-r, so on the ring it
        // cuts between rungs N, N+1 and between rungs 2N, 1 for every N.
        ReflectionCase::VerticalOpen | ReflectionCase::VerticalClosed => {
            ((1..=m).map(|k| m + 1 - k).collect(), (1..=2 * n).collect())
        }
    };
    let cross_bonds =
        ladder.bonds.iter().filter(|b| negative_half.contains(&b.i) != negative_half.contains(&b.j)).copied().collect();
    Ok(ReflectionMap { case, theta, negative_half, cross_bonds })
}

/// Cycle-basis loops mapped onto their own reversal by the reflection.
pub fn symmetric_loops<'a>(ladder: &'a Ladder, refl: &ReflectionMap) -> Vec<&'a Loop> {
    ladder
        .cycle_basis
        .iter()
        .filter(|c| {
            let mut image: Vec<usize> = c.sites.iter().map(|&s| refl.image(s)).collect();
            image.reverse();
            c.same_cycle(&image)
        })
        .collect()
}
