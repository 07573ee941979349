use std::collections::BTreeMap;

use super::bitvec::{BitVector, WORD_BITS};

/// A GF(2) row stored as sorted `(word index, nonzero word)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseRow {
    words: Vec<(usize, u64)>,
}

impl SparseRow {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vars<I: IntoIterator<Item = usize>>(vars: I) -> Self {
        let mut row = Self::new();
        for v in vars {
            row.flip(v);
        }
        row
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, var: usize) -> bool {
        let w = var / WORD_BITS;
        match self.words.binary_search_by_key(&w, |&(i, _)| i) {
            Ok(pos) => (self.words[pos].1 >> (var % WORD_BITS)) & 1 == 1,
            Err(_) => false,
        }
    }

    pub fn flip(&mut self, var: usize) {
        self.xor_word(var / WORD_BITS, 1u64 << (var % WORD_BITS));
    }

    /// XORs `bits` into positions `offset..offset + bits.len()`.
    pub fn xor_bits_at(&mut self, offset: usize, bits: &BitVector) {
        let shift = offset % WORD_BITS;
        let base = offset / WORD_BITS;
        for (i, &w) in bits.words().iter().enumerate() {
            if w == 0 {
                continue;
            }
            if shift == 0 {
                self.xor_word(base + i, w);
            } else {
                self.xor_word(base + i, w << shift);
                self.xor_word(base + i + 1, w >> (WORD_BITS - shift));
            }
        }
    }

    fn xor_word(&mut self, idx: usize, w: u64) {
        if w == 0 {
            return;
        }
        // Rows are usually built in increasing order; check the tail first.
        if self.words.last().is_none_or(|&(i, _)| i < idx) {
            self.words.push((idx, w));
            return;
        }
        match self.words.binary_search_by_key(&idx, |&(i, _)| i) {
            Ok(pos) => {
                self.words[pos].1 ^= w;
                if self.words[pos].1 == 0 {
                    self.words.remove(pos);
                }
            }
            Err(pos) => self.words.insert(pos, (idx, w)),
        }
    }

    pub fn xor_assign(&mut self, other: &SparseRow) {
        let mut out = Vec::with_capacity(self.words.len() + other.words.len());
        let (mut a, mut b) = (0, 0);
        while a < self.words.len() && b < other.words.len() {
            let (ia, wa) = self.words[a];
            let (ib, wb) = other.words[b];
            if ia < ib {
                out.push((ia, wa));
                a += 1;
            } else if ib < ia {
                out.push((ib, wb));
                b += 1;
            } else {
                if wa ^ wb != 0 {
                    out.push((ia, wa ^ wb));
                }
                a += 1;
                b += 1;
            }
        }
        out.extend_from_slice(&self.words[a..]);
        out.extend_from_slice(&other.words[b..]);
        self.words = out;
    }

    /// Lowest set variable.
    pub fn lowest(&self) -> Option<usize> {
        self.words
            .first()
            .map(|&(i, w)| i * WORD_BITS + w.trailing_zeros() as usize)
    }

    pub fn is_singleton(&self) -> bool {
        self.words.len() == 1 && self.words[0].1.is_power_of_two()
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().flat_map(|&(i, word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let t = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * WORD_BITS + t)
            })
        })
    }

    fn words(&self) -> &[(usize, u64)] {
        &self.words
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InsertOutcome {
    /// Rank grew by one; lists the variables this insert determined.
    Independent {
        newly_resolved: Vec<usize>,
    },
    Redundant,
    /// The equation contradicts earlier ones.
    Inconsistent,
}

#[derive(Clone, Debug)]
struct Equation {
    row: SparseRow,
    rhs: bool,
}

/// Incremental GF(2) solver kept in reduced row-echelon form.
///
/// Each stored row's pivot is its lowest variable, and no pivot variable
/// appears in any other row. A variable is determined exactly when its row
/// shrinks to a singleton; such rows are retired into the resolved set and
/// substituted out of later inserts.
#[derive(Clone, Debug, Default)]
pub struct IncrementalSolver {
    rows: BTreeMap<usize, Equation>,
    pivot_mask: Vec<u64>,
    resolved_mask: Vec<u64>,
    resolved_value: Vec<u64>,
    resolved_count: usize,
    rank: usize,
}

fn bit(words: &[u64], var: usize) -> bool {
    words
        .get(var / WORD_BITS)
        .is_some_and(|w| (w >> (var % WORD_BITS)) & 1 == 1)
}

fn set_bit(words: &mut Vec<u64>, var: usize, value: bool) {
    let w = var / WORD_BITS;
    if w >= words.len() {
        words.resize(w + 1, 0);
    }
    let mask = 1u64 << (var % WORD_BITS);
    if value {
        words[w] |= mask;
    } else {
        words[w] &= !mask;
    }
}

impl IncrementalSolver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of independent equations inserted so far.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn resolved_count(&self) -> usize {
        self.resolved_count
    }

    /// Rows that still involve undetermined variables.
    pub fn pending_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn value(&self, var: usize) -> Option<bool> {
        bit(&self.resolved_mask, var).then(|| bit(&self.resolved_value, var))
    }

    pub fn is_resolved(&self, var: usize) -> bool {
        bit(&self.resolved_mask, var)
    }

    /// Smallest unresolved variable at or after `from`.
    pub fn first_unresolved_from(&self, from: usize) -> usize {
        let mut w = from / WORD_BITS;
        let mut word = match self.resolved_mask.get(w) {
            Some(&m) => !m & (u64::MAX << (from % WORD_BITS)),
            None => return from,
        };
        loop {
            if word != 0 {
                return w * WORD_BITS + word.trailing_zeros() as usize;
            }
            w += 1;
            match self.resolved_mask.get(w) {
                Some(&m) => word = !m,
                None => return w * WORD_BITS,
            }
        }
    }

    /// All resolved variables with their values, in increasing order.
    pub fn resolved(&self) -> BTreeMap<usize, bool> {
        let mut out = BTreeMap::new();
        for (w, &m) in self.resolved_mask.iter().enumerate() {
            let mut rest = m;
            while rest != 0 {
                let var = w * WORD_BITS + rest.trailing_zeros() as usize;
                out.insert(var, bit(&self.resolved_value, var));
                rest &= rest - 1;
            }
        }
        out
    }

    /// Convenience wrapper over [`insert`](Self::insert) for a variable list.
    pub fn insert_vars(&mut self, vars: &[usize], rhs: bool) -> InsertOutcome {
        self.insert(SparseRow::from_vars(vars.iter().copied()), rhs)
    }

    pub fn insert(&mut self, mut row: SparseRow, mut rhs: bool) -> InsertOutcome {
        // Substitute already-resolved variables.
        let mut cleaned = Vec::with_capacity(row.words.len());
        for &(i, w) in row.words() {
            let mask = self.resolved_mask.get(i).copied().unwrap_or(0);
            let known = w & mask;
            if known != 0 {
                rhs ^= (known & self.resolved_value[i]).count_ones() % 2 == 1;
            }
            if w & !mask != 0 {
                cleaned.push((i, w & !mask));
            }
        }
        row.words = cleaned;

        // Eliminate existing pivots. Each pivot row only adds non-pivot
        // variables, so the pivot set hit is fixed by the original row.
        let hits: Vec<usize> = row
            .words()
            .iter()
            .flat_map(|&(i, w)| {
                let mut rest = w & self.pivot_mask.get(i).copied().unwrap_or(0);
                std::iter::from_fn(move || {
                    if rest == 0 {
                        return None;
                    }
                    let t = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(i * WORD_BITS + t)
                })
            })
            .collect();
        for p in hits {
            let eq = &self.rows[&p];
            row.xor_assign(&eq.row);
            rhs ^= eq.rhs;
        }

        let Some(pivot) = row.lowest() else {
            return if rhs {
                InsertOutcome::Inconsistent
            } else {
                InsertOutcome::Redundant
            };
        };

        self.rank += 1;
        let mut newly_resolved = Vec::new();

        // Clear the new pivot from rows that contain it. Only rows with a
        // smaller pivot can.
        let mut retired = Vec::new();
        for (&p, eq) in self.rows.range_mut(..pivot) {
            if eq.row.get(pivot) {
                eq.row.xor_assign(&row);
                eq.rhs ^= rhs;
                if eq.row.is_singleton() {
                    retired.push(p);
                }
            }
        }
        for p in retired {
            let eq = self.rows.remove(&p).expect("row present");
            set_bit(&mut self.pivot_mask, p, false);
            self.resolve(p, eq.rhs);
            newly_resolved.push(p);
        }

        if row.is_singleton() {
            self.resolve(pivot, rhs);
            newly_resolved.push(pivot);
        } else {
            set_bit(&mut self.pivot_mask, pivot, true);
            self.rows.insert(pivot, Equation { row, rhs });
        }
        newly_resolved.sort_unstable();
        InsertOutcome::Independent { newly_resolved }
    }

    fn resolve(&mut self, var: usize, value: bool) {
        debug_assert!(!self.is_resolved(var));
        set_bit(&mut self.resolved_mask, var, true);
        set_bit(&mut self.resolved_value, var, value);
        self.resolved_count += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_is_redundant() {
        let mut s = IncrementalSolver::new();
        assert_eq!(
            s.insert_vars(&[1], true),
            InsertOutcome::Independent {
                newly_resolved: vec![1]
            }
        );
        assert_eq!(s.insert_vars(&[1], true), InsertOutcome::Redundant);
        assert_eq!(s.insert_vars(&[1], false), InsertOutcome::Inconsistent);
    }

    #[test]
    fn back_substitution() {
        let mut s = IncrementalSolver::new();
        assert_eq!(
            s.insert_vars(&[1, 2], true),
            InsertOutcome::Independent {
                newly_resolved: vec![]
            }
        );
        assert_eq!(
            s.insert_vars(&[2], false),
            InsertOutcome::Independent {
                newly_resolved: vec![1, 2]
            }
        );
        assert_eq!(s.value(1), Some(true));
        assert_eq!(s.value(2), Some(false));
        assert_eq!(s.pending_rows(), 0);
    }

    #[test]
    fn first_unresolved_scans_words() {
        let mut s = IncrementalSolver::new();
        for v in 0..130 {
            s.insert_vars(&[v], false);
        }
        assert_eq!(s.first_unresolved_from(0), 130);
        assert_eq!(s.first_unresolved_from(200), 200);
        s.insert_vars(&[131], true);
        assert_eq!(s.first_unresolved_from(0), 130);
        assert_eq!(s.first_unresolved_from(131), 132);
    }

    #[test]
    fn sparse_row_xor_bits_unaligned() {
        let bits = BitVector::from_bits((0..100).map(|i| i % 3 == 0));
        let mut row = SparseRow::new();
        row.xor_bits_at(37, &bits);
        let want: Vec<usize> = (0..100).filter(|i| i % 3 == 0).map(|i| i + 37).collect();
        assert_eq!(row.vars().collect::<Vec<_>>(), want);
        row.xor_bits_at(37, &bits);
        assert!(row.is_zero());
    }
}
