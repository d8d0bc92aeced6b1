//! Spectrum methods behind a common interface, looked up by name.

use std::collections::BTreeMap;

use crate::couplings::CouplingConfig;
use crate::error::{Error, Result};
use crate::freefermion::{many_body_spectrum, mode_spectrum, sector_spectra, assemble_skew};
use crate::gauge::{gauge_for_sector, VortexSector};
use crate::lattice::Ladder;
use crate::spin_ed::{
    build_spin_hamiltonian, dense_spectrum, lowest_eigenvalues, sector_resolved_spectrum, Method, SpectrumReport,
};

pub struct SpectrumRequest<'a> {
    pub ladder: &'a Ladder,
    pub couplings: &'a CouplingConfig,
    /// Fermion method only; `None` sweeps every sector.
    pub sector: Option<&'a VortexSector>,
    /// Number of levels for the iterative method.
    pub k: usize,
    pub seed: u64,
}

pub trait SpectrumMethod: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, req: &SpectrumRequest) -> Result<SpectrumReport>;
}

struct Fermion;
struct SpinDense;
struct SpinIterative;
struct SpinSectors;

impl SpectrumMethod for Fermion {
    fn name(&self) -> &'static str {
        "fermion"
    }

    fn run(&self, req: &SpectrumRequest) -> Result<SpectrumReport> {
        let blocks = match req.sector {
            Some(v) => {
                let g = gauge_for_sector(req.ladder, v)?;
                let levels = many_body_spectrum(&mode_spectrum(&assemble_skew(req.ladder, req.couplings, &g))?)?;
                vec![(v.clone(), levels)]
            }
            None => sector_spectra(req.ladder, req.couplings)?,
        };
        let mut entries: Vec<(f64, usize)> =
            blocks.iter().enumerate().flat_map(|(b, (_, vals))| vals.iter().map(move |&v| (v, b))).collect();
        entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let maps: Vec<BTreeMap<String, i8>> = blocks.iter().map(|(v, _)| v.to_map(req.ladder)).collect();
        let mut report = SpectrumReport::new(Method::Fermion, entries.iter().map(|e| e.0).collect());
        report.labels = Some(entries.iter().enumerate().map(|(i, &(_, b))| (i, maps[b].clone())).collect());
        Ok(report)
    }
}

fn no_sector(req: &SpectrumRequest, name: &str) -> Result<()> {
    if req.sector.is_some() {
        return Err(Error::InvalidInput(format!("{name} does not take a sector")));
    }
    Ok(())
}

impl SpectrumMethod for SpinDense {
    fn name(&self) -> &'static str {
        "spin-dense"
    }

    fn run(&self, req: &SpectrumRequest) -> Result<SpectrumReport> {
        no_sector(req, self.name())?;
        dense_spectrum(&build_spin_hamiltonian(req.ladder, req.couplings)?)
    }
}

impl SpectrumMethod for SpinIterative {
    fn name(&self) -> &'static str {
        "spin-iterative"
    }

    fn run(&self, req: &SpectrumRequest) -> Result<SpectrumReport> {
        no_sector(req, self.name())?;
        lowest_eigenvalues(&build_spin_hamiltonian(req.ladder, req.couplings)?, req.k, req.seed)
    }
}

impl SpectrumMethod for SpinSectors {
    fn name(&self) -> &'static str {
        "spin-sector"
    }

    fn run(&self, req: &SpectrumRequest) -> Result<SpectrumReport> {
        no_sector(req, self.name())?;
        let h = build_spin_hamiltonian(req.ladder, req.couplings)?;
        if h.n_spins > crate::perturbation::PERTURBATION_SPIN_LIMIT {
            return Err(Error::Guard(format!("{} spins exceed the sector-resolved limit", h.n_spins)));
        }
        sector_resolved_spectrum(req.ladder, &h)
    }
}

pub struct MethodRegistry {
    methods: Vec<Box<dyn SpectrumMethod>>,
}

impl MethodRegistry {
    pub fn empty() -> Self {
        MethodRegistry { methods: Vec::new() }
    }

    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Fermion));
        r.register(Box::new(SpinDense));
        r.register(Box::new(SpinIterative));
        r.register(Box::new(SpinSectors));
        r
    }

    /// Replaces any method registered under the same name.
    pub fn register(&mut self, m: Box<dyn SpectrumMethod>) {
        self.methods.retain(|old| old.name() != m.name());
        self.methods.push(m);
    }

    pub fn get(&self, name: &str) -> Option<&dyn SpectrumMethod> {
        self.methods.iter().find(|m| m.name() == name).map(|m| m.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.methods.iter().map(|m| m.name()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_ladder, LadderSpec};

    #[test]
    fn counts_and_lookup() {
        let reg = MethodRegistry::with_defaults();
        assert_eq!(reg.names(), vec!["fermion", "spin-dense", "spin-iterative", "spin-sector"]);
        assert!(reg.get("nope").is_none());
        let l = build_ladder(LadderSpec::open(2).unwrap()).unwrap();
        let j = CouplingConfig::homogeneous(&l, 1.0, 1.0, 1.0);
        let req = SpectrumRequest { ladder: &l, couplings: &j, sector: None, k: 4, seed: 1 };
        assert_eq!(reg.get("spin-dense").unwrap().run(&req).unwrap().eigenvalues.len(), 256);
        let f = reg.get("fermion").unwrap().run(&req).unwrap();
        assert_eq!(f.eigenvalues.len(), 8 * 16);
        assert_eq!(f.labels.unwrap().len(), 128);
        let it = reg.get("spin-iterative").unwrap().run(&req).unwrap();
        assert_eq!(it.eigenvalues.len(), 4);
        let vf = VortexSector::vortex_free(&l);
        let one = SpectrumRequest { sector: Some(&vf), ..req };
        assert_eq!(reg.get("fermion").unwrap().run(&one).unwrap().eigenvalues.len(), 16);
        assert!(reg.get("spin-dense").unwrap().run(&one).is_err());
    }
}
