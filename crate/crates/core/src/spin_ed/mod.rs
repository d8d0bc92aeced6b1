//! Exact diagonalization of the spin ladder Hamiltonian and its vortex loop operators.

mod compare;
mod labels;
mod lanczos;
mod sectors;

use std::collections::BTreeMap;

use faer::Mat;
use serde::Serialize;

pub use compare::{compare_spectra, dedup_levels, ComparisonReport, Unmatched};
pub use labels::label_eigenstates;
pub use lanczos::{lowest_eigenvalues, lowest_eigenvalues_with, LanczosOptions};
pub use sectors::{SectorBlock, SymmetrySectors};

use crate::couplings::CouplingConfig;
use crate::error::{Error, Result};
use crate::lattice::{Ladder, Loop};
use crate::linalg;
use crate::pauli::{Phase, PauliString, SpinOperator, MAX_SPINS};
use num_complex::Complex64;

pub const DENSE_SPIN_LIMIT: usize = 12;
pub const ITERATIVE_SPIN_LIMIT: usize = 20;
pub const ITERATIVE_K_LIMIT: usize = 64;
pub const DEGENERACY_TOL: f64 = 1e-7;

fn spin_count_guard(ladder: &Ladder) -> Result<()> {
    if ladder.n_sites() > MAX_SPINS {
        return Err(Error::Guard(format!("{} spins exceed the Pauli string width of {MAX_SPINS}", ladder.n_sites())));
    }
    Ok(())
}

/// `H = -sum J_(ij) sigma_i^t sigma_j^t`, one term per bond with nonzero coupling.
pub fn build_spin_hamiltonian(ladder: &Ladder, j: &CouplingConfig) -> Result<SpinOperator> {
    j.check(ladder)?;
    spin_count_guard(ladder)?;
    let mut h = SpinOperator::zero(ladder.n_sites());
    for (b, &jv) in ladder.bonds.iter().zip(&j.j) {
        if jv != 0.0 {
            let p = PauliString::single(b.i, b.kind).mul(&PauliString::single(b.j, b.kind));
            h.add_string(&p, Complex64::new(-jv, 0.0));
        }
    }
    Ok(h)
}

/// `B = i^{|C|+2} prod_{steps} sigma_a^t sigma_b^t` in loop order.
pub fn vortex_operator(ladder: &Ladder, lp: &Loop) -> Result<PauliString> {
    spin_count_guard(ladder)?;
    ladder.loop_steps(lp)?;
    let mut acc = PauliString::IDENTITY.scale(Phase::new(lp.len() as u32 + 2));
    for (a, b) in lp.steps() {
        let kind = ladder.bond(a, b).expect("validated above").kind;
        acc = acc.mul(&PauliString::single(a, kind)).mul(&PauliString::single(b, kind));
    }
    Ok(acc)
}

/// Vortex operators of the cycle basis, keyed by cycle id in basis order.
pub fn vortex_operators(ladder: &Ladder) -> Result<Vec<(String, PauliString)>> {
    ladder.cycle_basis.iter().map(|c| Ok((c.id.clone(), vortex_operator(ladder, c)?))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Dense,
    IterativeLowest(usize),
    SymmetrySectors,
    Fermion,
}

/// Real eigenvectors stored as matrix columns.
#[derive(Clone, Debug)]
pub struct Eigenvectors(pub Mat<f64>);

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub method: Method,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigen-index to per-cycle vortex value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<usize, BTreeMap<String, i8>>>,
    #[serde(skip)]
    pub residuals: Option<Vec<f64>>,
    #[serde(skip)]
    pub vectors: Option<Eigenvectors>,
}

impl SpectrumReport {
    pub fn new(method: Method, eigenvalues: Vec<f64>) -> Self {
        SpectrumReport { method, eigenvalues, labels: None, residuals: None, vectors: None }
    }
}

fn check_hermitian(op: &SpinOperator) -> Result<()> {
    let scale = op.max_coefficient().max(1.0);
    let defect = op.hermitian_defect();
    if defect > 1e-12 * scale {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

fn dense_guard(op: &SpinOperator) -> Result<()> {
    if op.n_spins > DENSE_SPIN_LIMIT {
        return Err(Error::Guard(format!("{} spins exceed the dense limit of {DENSE_SPIN_LIMIT}", op.n_spins)));
    }
    Ok(())
}

pub fn dense_spectrum(op: &SpinOperator) -> Result<SpectrumReport> {
    dense_guard(op)?;
    check_hermitian(op)?;
    let values = if op.is_real() {
        linalg::sym_eigenvalues(&op.to_dense_real())?
    } else {
        linalg::herm_eigenvalues(&op.to_dense_complex())?
    };
    Ok(SpectrumReport::new(Method::Dense, values))
}

/// Dense spectrum with eigenvectors attached; real operators only.
pub fn dense_spectrum_with_vectors(op: &SpinOperator) -> Result<SpectrumReport> {
    dense_guard(op)?;
    check_hermitian(op)?;
    if !op.is_real() {
        return Err(Error::InvalidInput("eigenvectors are kept for real operators only".into()));
    }
    let (values, vectors) = linalg::sym_eigen(&op.to_dense_real())?;
    let mut report = SpectrumReport::new(Method::Dense, values);
    report.vectors = Some(Eigenvectors(vectors));
    Ok(report)
}

/// Spectrum of every joint eigenspace of the cycle-basis vortex operators, labelled by sector.
pub fn sector_resolved_spectrum(ladder: &Ladder, h: &SpinOperator) -> Result<SpectrumReport> {
    let ops = vortex_operators(ladder)?;
    let sectors = SymmetrySectors::new(h.n_spins, ops.iter().map(|(_, p)| *p).collect())?;
    let blocks = sectors.all_spectra(h)?;
    let mut entries: Vec<(f64, usize)> = Vec::new();
    for (b, (_, values)) in blocks.iter().enumerate() {
        entries.extend(values.iter().map(|&v| (v, b)));
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut labels = BTreeMap::new();
    for (idx, &(_, b)) in entries.iter().enumerate() {
        let signs = &blocks[b].0;
        labels.insert(idx, ops.iter().zip(signs).map(|((id, _), &s)| (id.clone(), s)).collect());
    }
    let mut report = SpectrumReport::new(Method::SymmetrySectors, entries.iter().map(|e| e.0).collect());
    report.labels = Some(labels);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_ladder, BondType, LadderSpec};

    #[test]
    fn single_bond_spectrum() {
        let mut h = SpinOperator::zero(2);
        let zz = PauliString::single(1, BondType::Z).mul(&PauliString::single(2, BondType::Z));
        h.add_string(&zz, Complex64::new(-0.7, 0.0));
        let r = dense_spectrum(&h).unwrap();
        let want = [-0.7, -0.7, 0.7, 0.7];
        assert!(r.eigenvalues.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-14));
        assert_eq!(dense_spectrum(&SpinOperator::zero(3)).unwrap().eigenvalues, vec![0.0; 8]);
    }

    #[test]
    fn hamiltonian_terms() {
        let l = build_ladder(LadderSpec::open(2).unwrap()).unwrap();
        let h = build_spin_hamiltonian(&l, &CouplingConfig::homogeneous(&l, 1.0, 1.0, 1.0)).unwrap();
        assert_eq!(h.len(), 10);
        assert!(h.is_real());
        assert!(build_spin_hamiltonian(&l, &CouplingConfig::zero(&l)).unwrap().is_empty());
    }

    #[test]
    fn first_plaquette_operator() {
        // Multiplying Z1Z2 X2X3 Z3Z4 Y4Y1 by hand gives -X1 Y2 Y3 X4; the prefactor i^6 flips the sign.
        let l = build_ladder(LadderSpec::open(2).unwrap()).unwrap();
        let b = vortex_operator(&l, l.plaquette(1).unwrap()).unwrap();
        assert_eq!(b.to_string(), "+X1 Y2 Y3 X4");
        assert!(b.is_hermitian() && b.mul(&b).is_identity());
        let c = build_ladder(LadderSpec::closed(2).unwrap()).unwrap();
        let big = vortex_operator(&c, c.big_loop().unwrap()).unwrap();
        assert!(big.is_hermitian() && big.mul(&big).is_identity());
        assert_eq!(big.x, 0);
        let open_path = Loop::new("path", vec![1, 2]);
        assert!(vortex_operator(&l, &open_path).is_err());
    }

    #[test]
    fn guards() {
        assert!(dense_spectrum(&SpinOperator::zero(13)).unwrap_err().is_guard());
        let mut bad = SpinOperator::zero(1);
        bad.add_string(&PauliString::single(1, BondType::X), Complex64::new(0.0, 1.0));
        assert!(matches!(dense_spectrum(&bad), Err(Error::NotHermitian(_))));
    }
}
