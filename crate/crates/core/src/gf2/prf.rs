use super::bitvec::{BitVector, WORD_BITS};

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// The splitmix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a list of coordinates into a single key.
pub fn derive_key(key: u64, coords: &[u64]) -> u64 {
    coords.iter().fold(mix64(key ^ GOLDEN), |h, &c| {
        mix64(h.wrapping_add(GOLDEN) ^ mix64(c.wrapping_add(0x632b_e59b_d9b4_e019)))
    })
}

/// FNV-1a, used to turn domain labels into 64-bit tags.
pub fn hash_label(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Counter-mode pseudorandom stream.
///
/// Output word `n` depends only on `(key, domain, n)`, so sender and
/// receiver can replay any position without sharing state. The stream is
/// `Copy`; clones advance independently.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrfStream {
    key: u64,
    domain: u64,
    counter: u64,
}

impl PrfStream {
    pub fn new(key: u64, domain: &str) -> Self {
        Self {
            key,
            domain: hash_label(domain),
            counter: 0,
        }
    }

    /// A stream whose key is `key` refined by `coords`.
    pub fn at(key: u64, domain: &str, coords: &[u64]) -> Self {
        Self::new(derive_key(key, coords), domain)
    }

    pub fn with_counter(mut self, counter: u64) -> Self {
        self.counter = counter;
        self
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// The word at an arbitrary counter position, without advancing.
    #[inline]
    pub fn word_at(&self, counter: u64) -> u64 {
        let h = mix64(self.key ^ mix64(self.domain.wrapping_add(GOLDEN)));
        mix64(
            h ^ counter
                .wrapping_mul(GOLDEN)
                .wrapping_add(0x2545_f491_4f6c_dd1d),
        )
    }

    pub fn next_u64(&mut self) -> u64 {
        let w = self.word_at(self.counter);
        self.counter = self.counter.wrapping_add(1);
        w
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[0, bound)`; `bound` must be nonzero.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        // Lemire's multiply-shift with rejection.
        loop {
            let x = self.next_u64();
            let m = u128::from(x) * u128::from(bound);
            let low = m as u64;
            if low >= bound.wrapping_neg() % bound {
                return (m >> 64) as u64;
            }
        }
    }
}

/// Draws `n` bits, consuming `⌈n/64⌉` words from the stream.
pub fn prf_bits(stream: &mut PrfStream, n: usize) -> BitVector {
    let words = (0..n.div_ceil(WORD_BITS))
        .map(|_| stream.next_u64())
        .collect();
    BitVector::from_words(words, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_is_identical() {
        let a = prf_bits(&mut PrfStream::new(42, "coeff").with_counter(5), 8);
        let b = prf_bits(&mut PrfStream::new(42, "coeff").with_counter(5), 8);
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
    }

    #[test]
    fn zero_bits_is_empty() {
        let mut s = PrfStream::new(1, "coeff");
        assert!(prf_bits(&mut s, 0).is_empty());
        assert_eq!(s.counter(), 0);
    }

    #[test]
    fn domains_and_keys_separate() {
        let a = PrfStream::new(7, "coeff").next_u64();
        let b = PrfStream::new(7, "rate-sample").next_u64();
        let c = PrfStream::new(8, "coeff").next_u64();
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn next_below_in_range() {
        let mut s = PrfStream::new(3, "x");
        for _ in 0..1000 {
            assert!(s.next_below(7) < 7);
        }
    }
}
