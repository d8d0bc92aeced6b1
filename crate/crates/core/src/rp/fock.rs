//! Majorana operators on a Jordan-Wigner Fock space.

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const FOCK_MAJORANA_LIMIT: usize = 16;

/// `matrices[2mu]` and `matrices[2mu+1]` are `a_mu + a*_mu` and `i(a_mu - a*_mu)`.
#[derive(Clone, Debug)]
pub struct MajoranaRep {
    pub n: usize,
    pub matrices: Vec<Mat<Complex64>>,
}

pub fn fock_majoranas(n: usize) -> Result<MajoranaRep> {
    if n % 2 == 1 {
        return Err(Error::InvalidInput(format!("odd Majorana count {n}")));
    }
    if n > FOCK_MAJORANA_LIMIT {
        return Err(Error::Guard(format!("{n} Majoranas exceed the Fock limit of {FOCK_MAJORANA_LIMIT}")));
    }
    let modes = n / 2;
    let dim = 1usize << modes;
    let mut matrices = Vec::with_capacity(n);
    for mu in 0..modes {
        let bit = 1usize << mu;
        let mut m1 = Mat::<Complex64>::zeros(dim, dim);
        let mut m2 = Mat::<Complex64>::zeros(dim, dim);
        for s in 0..dim {
            let sign = if (s & (bit - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            let t = s ^ bit;
            m1[(t, s)] = Complex64::new(sign, 0.0);
            // a removes the particle, a* adds it.
            m2[(t, s)] = if s & bit != 0 { Complex64::new(0.0, sign) } else { Complex64::new(0.0, -sign) };
        }
        matrices.push(m1);
        matrices.push(m2);
    }
    Ok(MajoranaRep { n, matrices })
}

impl MajoranaRep {
    pub fn dim(&self) -> usize {
        1 << (self.n / 2)
    }

    pub fn identity(&self) -> Mat<Complex64> {
        Mat::from_fn(self.dim(), self.dim(), |i, j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    /// Product of the listed Majoranas (0-based slots) in order.
    pub fn product(&self, slots: &[usize]) -> Mat<Complex64> {
        let mut acc = self.identity();
        for &k in slots {
            acc = &acc * &self.matrices[k];
        }
        acc
    }

    /// Largest entry of `{c_i, c_j} - 2 delta_ij` and of `c_i - c_i^dagger` over all pairs.
    pub fn clifford_defect(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for i in 0..self.n {
            let ci = &self.matrices[i];
            worst = worst.max(crate::linalg::hermitian_defect(ci));
            for j in 0..=i {
                let cj = &self.matrices[j];
                let anti = ci * cj + cj * ci;
                for r in 0..dim {
                    for c in 0..dim {
                        let want = if i == j && r == c { 2.0 } else { 0.0 };
                        worst = worst.max((anti[(r, c)] - Complex64::new(want, 0.0)).norm());
                    }
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clifford_relations() {
        for n in [2, 4, 6, 8] {
            assert!(fock_majoranas(n).unwrap().clifford_defect() < 1e-12);
        }
        assert!(fock_majoranas(3).is_err());
        assert!(fock_majoranas(18).unwrap_err().is_guard());
    }

    #[test]
    fn four_product_squares_to_identity() {
        // (c1c2c3c4)^2: moving each factor through the other three gives sign (-1)^6 = +1.
        let rep = fock_majoranas(4).unwrap();
        let p = rep.product(&[0, 1, 2, 3]);
        let sq = &p * &p;
        let id = rep.identity();
        assert!((0..4).all(|r| (0..4).all(|c| (sq[(r, c)] - id[(r, c)]).norm() < 1e-14)));
    }
}
