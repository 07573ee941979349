use super::bitvec::{words_for, BitVector, WORD_BITS};

/// Dense row-major GF(2) matrix with word-packed rows.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Stacks equal-length vectors as rows.
    pub fn from_rows(rows: &[BitVector]) -> Self {
        let cols = rows.first().map_or(0, BitVector::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            m.row_words_mut(r).copy_from_slice(row.words());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let word = &mut self.data[r * self.stride + c / WORD_BITS];
        let mask = 1u64 << (c % WORD_BITS);
        if value {
            *word |= mask;
        } else {
            *word &= !mask;
        }
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector::from_words(self.row_words(r).to_vec(), self.cols)
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let s = self.stride;
        let (a, b) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&mut lo[dst * s..(dst + 1) * s], &hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&mut hi[..s], &lo[src * s..(src + 1) * s])
        };
        for (x, y) in a.iter_mut().zip(b) {
            *x ^= y;
        }
    }

    /// GF(2) rank by forward Gaussian elimination on a copy.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            if pivot != rank {
                let s = m.stride;
                for w in 0..s {
                    m.data.swap(pivot * s + w, rank * s + w);
                }
            }
            for r in rank + 1..m.rows {
                if m.get(r, c) {
                    m.xor_rows(r, rank);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Solves `self * x = rhs` when the columns are independent.
    ///
    /// Returns `None` if the column rank is deficient or the system is
    /// inconsistent.
    pub fn solve(&self, rhs: &BitVector) -> Option<BitVector> {
        assert_eq!(rhs.len(), self.rows);
        // Augment with the right-hand side as an extra column.
        let mut aug = BitMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    aug.set(r, c, true);
                }
            }
            aug.set(r, self.cols, rhs.get(r));
        }
        let mut rank = 0;
        for c in 0..self.cols {
            let pivot = (rank..aug.rows).find(|&r| aug.get(r, c))?;
            if pivot != rank {
                let s = aug.stride;
                for w in 0..s {
                    aug.data.swap(pivot * s + w, rank * s + w);
                }
            }
            for r in 0..aug.rows {
                if r != rank && aug.get(r, c) {
                    aug.xor_rows(r, rank);
                }
            }
            rank += 1;
        }
        if (rank..aug.rows).any(|r| aug.get(r, self.cols)) {
            return None;
        }
        Some((0..self.cols).map(|c| aug.get(c, self.cols)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_rank() {
        assert_eq!(BitMatrix::identity(4).rank(), 4);
    }

    #[test]
    fn zero_rank() {
        assert_eq!(BitMatrix::zeros(3, 5).rank(), 0);
    }

    #[test]
    fn dependent_rows() {
        let rows = [
            BitVector::from_bits([true, true, false]),
            BitVector::from_bits([false, true, true]),
            BitVector::from_bits([true, false, true]),
        ];
        assert_eq!(BitMatrix::from_rows(&rows).rank(), 2);
    }

    #[test]
    fn solve_square() {
        let rows = [
            BitVector::from_bits([true, true, false]),
            BitVector::from_bits([false, true, true]),
            BitVector::from_bits([false, false, true]),
        ];
        let m = BitMatrix::from_rows(&rows);
        let x = BitVector::from_bits([true, false, true]);
        let rhs: BitVector = rows.iter().map(|r| r.dot(&x)).collect();
        assert_eq!(m.solve(&rhs), Some(x));
    }
}
