//! Dense bit vectors and elimination over GF(2).

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { words: vec![0; len.div_ceil(64).max(1)], len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        let mask = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Parity of the bitwise AND with `other`.
    pub fn dot(&self, other: &BitVec) -> bool {
        let ones: u32 = self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum();
        ones % 2 == 1
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}

pub fn rank(rows: &[BitVec]) -> usize {
    let mut rows: Vec<BitVec> = rows.to_vec();
    let Some(width) = rows.first().map(BitVec::len) else { return 0 };
    let mut r = 0;
    for col in 0..width {
        let Some(p) = (r..rows.len()).find(|&k| rows[k].get(col)) else { continue };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k != r && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Inverse of a square matrix given by rows. `None` when singular.
pub fn invert(rows: &[BitVec]) -> Option<Vec<BitVec>> {
    let n = rows.len();
    let mut a: Vec<BitVec> = rows.to_vec();
    let mut inv: Vec<BitVec> = (0..n)
        .map(|i| {
            let mut e = BitVec::zeros(n);
            e.set(i, true);
            e
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&k| a[k].get(col))?;
        a.swap(col, p);
        inv.swap(col, p);
        let (pa, pi) = (a[col].clone(), inv[col].clone());
        for k in 0..n {
            if k != col && a[k].get(col) {
                a[k].xor_assign(&pa);
                inv[k].xor_assign(&pi);
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(bits: &[u8]) -> BitVec {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b == 1);
        }
        v
    }

    #[test]
    fn rank_and_inverse() {
        let m = vec![row(&[1, 1, 0]), row(&[0, 1, 1]), row(&[1, 0, 0])];
        assert_eq!(rank(&m), 3);
        let inv = invert(&m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let col: BitVec = row(&[m[0].get(j) as u8, m[1].get(j) as u8, m[2].get(j) as u8]);
                assert_eq!(inv[i].dot(&col), i == j);
            }
        }
        let singular = vec![row(&[1, 1]), row(&[1, 1])];
        assert_eq!(rank(&singular), 1);
        assert!(invert(&singular).is_none());
    }

    #[test]
    fn wide_vectors() {
        let mut v = BitVec::zeros(130);
        v.set(129, true);
        v.set(3, true);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![3, 129]);
        v.flip(3);
        assert!(!v.get(3));
    }
}
