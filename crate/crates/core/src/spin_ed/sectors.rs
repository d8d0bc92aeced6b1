//! Block diagonalization over the joint eigenspaces of commuting Pauli strings.
//!
//! Generators are brought to reduced echelon form on their X parts. Strings
//! with a pivot bit flip basis states; the rest are diagonal constraints. A
//! sector basis state is the projection of a representative (all pivot bits
//! clear, diagonal constraints met) onto the requested eigenvalues.

use std::collections::HashMap;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::pauli::{PauliString, SpinOperator};

const GROUP_TABLE_LIMIT: usize = 20;

#[derive(Clone, Debug)]
struct Reduced {
    string: PauliString,
    /// Which original generators multiply to this string.
    mask: u64,
}

#[derive(Clone, Debug)]
pub struct SymmetrySectors {
    n_spins: usize,
    generators: Vec<PauliString>,
    pivot_bits: Vec<u32>,
    pivots: Vec<Reduced>,
    diagonal: Vec<Reduced>,
    /// Product of the pivot strings selected by each bitmask.
    group: Vec<PauliString>,
}

pub enum SectorBlock {
    Real(Mat<f64>),
    Complex(Mat<Complex64>),
}

impl SymmetrySectors {
    pub fn new(n_spins: usize, generators: Vec<PauliString>) -> Result<Self> {
        if generators.len() > 63 {
            return Err(Error::Guard(format!("{} generators exceed 63", generators.len())));
        }
        for (a, g) in generators.iter().enumerate() {
            if !g.is_hermitian() {
                return Err(Error::InvalidInput(format!("generator {a} is not Hermitian")));
            }
            if let Some(b) = generators[..a].iter().position(|h| !h.commutes_with(g)) {
                return Err(Error::NonCommuting(format!("generators {b} and {a}")));
            }
        }
        let mut work: Vec<Reduced> =
            generators.iter().enumerate().map(|(k, &g)| Reduced { string: g, mask: 1 << k }).collect();
        let mut pivots: Vec<Reduced> = Vec::new();
        let mut pivot_bits = Vec::new();
        for bit in 0..n_spins as u32 {
            let Some(p) = work.iter().position(|r| (r.string.x >> bit) & 1 == 1) else { continue };
            let pivot = work.remove(p);
            for r in work.iter_mut().chain(pivots.iter_mut()) {
                if (r.string.x >> bit) & 1 == 1 {
                    r.string = r.string.mul(&pivot.string);
                    r.mask ^= pivot.mask;
                }
            }
            pivots.push(pivot);
            pivot_bits.push(bit);
        }
        let mut diagonal: Vec<Reduced> = Vec::new();
        for bit in 0..n_spins as u32 {
            let Some(p) = work.iter().position(|r| (r.string.z >> bit) & 1 == 1) else { continue };
            let pivot = work.remove(p);
            for r in work.iter_mut() {
                if (r.string.z >> bit) & 1 == 1 {
                    r.string = r.string.mul(&pivot.string);
                    r.mask ^= pivot.mask;
                }
            }
            diagonal.push(pivot);
        }
        if !work.is_empty() {
            return Err(Error::InvalidInput("generators are not independent".into()));
        }
        if pivots.len() > GROUP_TABLE_LIMIT {
            return Err(Error::Guard(format!("{} off-diagonal generators exceed {GROUP_TABLE_LIMIT}", pivots.len())));
        }
        let mut group = vec![PauliString::IDENTITY; 1 << pivots.len()];
        for k in 1..group.len() {
            let low = k.trailing_zeros() as usize;
            group[k] = group[k & (k - 1)].mul(&pivots[low].string);
        }
        Ok(SymmetrySectors { n_spins, generators, pivot_bits, pivots, diagonal, group })
    }

    pub fn n_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn n_sectors(&self) -> usize {
        1 << self.generators.len()
    }

    pub fn sector_dim(&self) -> usize {
        1 << (self.n_spins - self.generators.len())
    }

    /// Signs for the generators from a sector index (bit k set means -1).
    pub fn signs_of(&self, index: usize) -> Vec<i8> {
        (0..self.generators.len()).map(|k| if (index >> k) & 1 == 1 { -1 } else { 1 }).collect()
    }

    fn target(&self, mask: u64, signs: &[i8]) -> i8 {
        (0..signs.len()).filter(|&k| (mask >> k) & 1 == 1).map(|k| signs[k]).product()
    }

    /// Representatives of the sector with the given generator eigenvalues.
    pub fn basis(&self, signs: &[i8]) -> Result<Vec<u64>> {
        if signs.len() != self.generators.len() || signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput("one sign of +1 or -1 per generator is required".into()));
        }
        let pivot_mask: u64 = self.pivot_bits.iter().map(|&b| 1u64 << b).sum();
        let constraints: Vec<(u64, i8)> = self
            .diagonal
            .iter()
            .map(|d| {
                let base: i8 = if d.string.phase.power() == 0 { 1 } else { -1 };
                (d.string.z, base * self.target(d.mask, signs))
            })
            .collect();
        let reps: Vec<u64> = (0..1u64 << self.n_spins)
            .filter(|s| s & pivot_mask == 0)
            .filter(|&s| constraints.iter().all(|&(z, t)| (if (z & s).count_ones() % 2 == 0 { 1 } else { -1 }) == t))
            .collect();
        debug_assert_eq!(reps.len(), self.sector_dim());
        Ok(reps)
    }

    /// Matrix of `h` restricted to a sector.
    pub fn block(&self, h: &SpinOperator, signs: &[i8]) -> Result<SectorBlock> {
        if let Some(g) = self.generators.iter().find(|g| !h.commutes_with_string(g)) {
            return Err(Error::NonCommuting(format!("Hamiltonian and {g}")));
        }
        let reps = self.basis(signs)?;
        let index: HashMap<u64, usize> = reps.iter().enumerate().map(|(k, &r)| (r, k)).collect();
        let chi: Vec<i8> = (0..self.group.len())
            .map(|k| (0..self.pivots.len()).filter(|&i| (k >> i) & 1 == 1).map(|i| self.target(self.pivots[i].mask, signs)).product())
            .collect();
        let n = reps.len();
        let mut m = Mat::<Complex64>::zeros(n, n);
        for (col, &r) in reps.iter().enumerate() {
            for (term, c) in h.strings() {
                let (y, amp) = term.apply_basis(r);
                let mut canon = y;
                let mut k = 0usize;
                for (i, (&bit, p)) in self.pivot_bits.iter().zip(&self.pivots).enumerate() {
                    if (canon >> bit) & 1 == 1 {
                        canon ^= p.string.x;
                        k |= 1 << i;
                    }
                }
                let (landed, amp_g) = self.group[k].apply_basis(y);
                debug_assert_eq!(landed, canon);
                let row = *index.get(&canon).ok_or_else(|| Error::InvalidInput("term leaves the sector".into()))?;
                let sign = f64::from(chi[k]);
                m[(row, col)] += c * amp.to_complex() * amp_g.to_complex() * sign;
            }
        }
        let real = (0..n).all(|i| (0..n).all(|j| m[(i, j)].im == 0.0));
        Ok(if real { SectorBlock::Real(Mat::from_fn(n, n, |i, j| m[(i, j)].re)) } else { SectorBlock::Complex(m) })
    }

    pub fn eigenvalues(&self, h: &SpinOperator, signs: &[i8]) -> Result<Vec<f64>> {
        match self.block(h, signs)? {
            SectorBlock::Real(m) => linalg::sym_eigenvalues(&m),
            SectorBlock::Complex(m) => linalg::herm_eigenvalues(&m),
        }
    }

    /// Spectra of all sectors in index order.
    pub fn all_spectra(&self, h: &SpinOperator) -> Result<Vec<(Vec<i8>, Vec<f64>)>> {
        (0..self.n_sectors())
            .into_par_iter()
            .map(|idx| {
                let signs = self.signs_of(idx);
                let values = self.eigenvalues(h, &signs)?;
                Ok((signs, values))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::BondType;

    fn s(site: usize, k: BondType) -> PauliString {
        PauliString::single(site, k)
    }

    #[test]
    fn two_spin_bell_sectors() {
        // H = -X1X2 - Y1Y2 - Z1Z2 commutes with X1X2 and Z1Z2; each sector is one Bell state.
        let xx = s(1, BondType::X).mul(&s(2, BondType::X));
        let yy = s(1, BondType::Y).mul(&s(2, BondType::Y));
        let zz = s(1, BondType::Z).mul(&s(2, BondType::Z));
        let mut h = SpinOperator::zero(2);
        for p in [xx, yy, zz] {
            h.add_string(&p, Complex64::new(-1.0, 0.0));
        }
        let sec = SymmetrySectors::new(2, vec![xx, zz]).unwrap();
        assert_eq!(sec.sector_dim(), 1);
        let mut all: Vec<f64> = sec.all_spectra(&h).unwrap().into_iter().flat_map(|(_, v)| v).collect();
        all.sort_by(f64::total_cmp);
        let dense = crate::spin_ed::dense_spectrum(&h).unwrap().eigenvalues;
        assert!(all.iter().zip(&dense).all(|(a, b)| (a - b).abs() < 1e-12));
        // xx = zz = +1 is the triplet |00> + |11>, energy -1 -(-1) -1 = -1.
        assert!((sec.eigenvalues(&h, &[1, 1]).unwrap()[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_generators() {
        let x = s(1, BondType::X);
        let z = s(1, BondType::Z);
        assert!(matches!(SymmetrySectors::new(1, vec![x, z]), Err(Error::NonCommuting(_))));
        let zz = s(1, BondType::Z).mul(&s(2, BondType::Z));
        let z1 = s(1, BondType::Z);
        let z2 = s(2, BondType::Z);
        assert!(SymmetrySectors::new(2, vec![zz, z1, z2]).is_err());
        let mut h = SpinOperator::zero(1);
        h.add_string(&x, Complex64::new(1.0, 0.0));
        let sec = SymmetrySectors::new(1, vec![z]).unwrap();
        assert!(matches!(sec.block(&h, &[1]), Err(Error::NonCommuting(_))));
    }
}
