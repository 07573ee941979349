use std::collections::HashMap;

use super::{Code, Coefficients, SymbolDescriptor};
use crate::gf2::{BitVector, IncrementalSolver, InsertOutcome, SparseRow};
use crate::{Error, Result};

/// Message bits `start..start + len`, zero past the end of `message`.
fn message_slice(message: &BitVector, start: u64, len: u64) -> BitVector {
    let (start, len) = (start as usize, len as usize);
    let avail = message.len().saturating_sub(start).min(len);
    let mut out = if avail > 0 {
        message.extract(start, avail)
    } else {
        BitVector::default()
    };
    if avail < len {
        out.extend_from(&BitVector::zeros(len - avail));
    }
    out
}

/// Produces encoded symbols from a (possibly growing) message.
#[derive(Clone, Debug)]
pub struct Encoder {
    code: Code,
    q_key: u64,
    message: BitVector,
    zero_padding: bool,
}

impl Encoder {
    /// A streaming encoder: symbols that reach past the message fail with
    /// [`Error::NeedMoreMessage`] until more bits are appended.
    pub fn new(code: Code, q_key: u64, message: BitVector) -> Self {
        Self {
            code,
            q_key,
            message,
            zero_padding: false,
        }
    }

    /// Treat bits past the end of the message as zeros instead of failing.
    pub fn with_zero_padding(mut self) -> Self {
        self.zero_padding = true;
        self
    }

    pub fn extend_message(&mut self, bits: &BitVector) {
        self.message.extend_from(bits);
    }

    pub fn message(&self) -> &BitVector {
        &self.message
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    /// The encoded bit for symbol `i` of transmitter `k`.
    pub fn encode(&self, k: usize, i: u64) -> Result<bool> {
        let desc = self.code.descriptor(self.q_key, k, i)?;
        self.encode_descriptor(&desc)
    }

    pub fn encode_descriptor(&self, desc: &SymbolDescriptor) -> Result<bool> {
        let end = desc.end() as usize;
        if end > self.message.len() && !self.zero_padding {
            return Err(Error::NeedMoreMessage {
                needed: end,
                available: self.message.len(),
            });
        }
        if let Coefficients::Unit { position } = desc.coefficients {
            let mut offset = position;
            for s in &desc.segments {
                if offset < s.len {
                    let bit = (s.start + offset) as usize;
                    return Ok(bit < self.message.len() && self.message.get(bit));
                }
                offset -= s.len;
            }
            unreachable!("unit position lies inside the segments");
        }
        let coeffs = self.code.coefficients(self.q_key, desc);
        let mut acc = false;
        let mut offset = 0usize;
        for s in &desc.segments {
            let part = coeffs.extract(offset, s.len as usize);
            acc ^= part.dot(&message_slice(&self.message, s.start, s.len));
            offset += s.len as usize;
        }
        Ok(acc)
    }
}

/// Sequential decoder: ingests surviving symbols and resolves message bits
/// as soon as elimination determines them.
#[derive(Clone, Debug)]
pub struct Decoder {
    code: Code,
    q_key: u64,
    solver: IncrementalSolver,
    message_bits: Option<u64>,
    prefix: u64,
    resolved_in_block: HashMap<u64, u64>,
    ingested: u64,
}

impl Decoder {
    pub fn new(code: Code, q_key: u64) -> Self {
        Self {
            code,
            q_key,
            solver: IncrementalSolver::new(),
            message_bits: None,
            prefix: 0,
            resolved_in_block: HashMap::new(),
            ingested: 0,
        }
    }

    /// Declares the message length; bits past it are known zeros.
    pub fn with_message_bits(mut self, n: u64) -> Self {
        self.message_bits = Some(n);
        self
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    pub fn solver(&self) -> &IncrementalSolver {
        &self.solver
    }

    /// Largest `m` such that bits `1..=m` are all resolved.
    pub fn decoded_prefix(&self) -> u64 {
        self.prefix
    }

    /// Number of non-erased symbols ingested.
    pub fn ingested(&self) -> u64 {
        self.ingested
    }

    /// Value of a 0-based message bit, if resolved.
    pub fn value(&self, bit: u64) -> Option<bool> {
        self.solver.value(bit as usize)
    }

    pub fn is_resolved(&self, bit: u64) -> bool {
        self.solver.is_resolved(bit as usize)
    }

    fn block_bits(&self, block: u64) -> u64 {
        let k = self.code.k();
        match self.message_bits {
            Some(n) => n.saturating_sub((block - 1) * k).min(k),
            None => k,
        }
    }

    /// Equation carried by a symbol, with known-zero bits dropped.
    pub fn equation(&self, desc: &SymbolDescriptor) -> SparseRow {
        let limit = self.message_bits.unwrap_or(u64::MAX);
        let mut row = SparseRow::new();
        if let Coefficients::Unit { position } = desc.coefficients {
            let mut offset = position;
            for s in &desc.segments {
                if offset < s.len {
                    if s.start + offset < limit {
                        row.flip((s.start + offset) as usize);
                    }
                    break;
                }
                offset -= s.len;
            }
            return row;
        }
        let coeffs = self.code.coefficients(self.q_key, desc);
        let mut offset = 0usize;
        for s in &desc.segments {
            let keep = s.len.min(limit.saturating_sub(s.start)) as usize;
            if keep > 0 {
                row.xor_bits_at(s.start as usize, &coeffs.extract(offset, keep));
            }
            offset += s.len as usize;
        }
        row
    }

    /// Feeds one channel output; `None` is an erasure. Returns the 1-based
    /// blocks that became fully decoded.
    pub fn ingest(&mut self, k: usize, i: u64, observation: Option<bool>) -> Result<Vec<u64>> {
        let Some(bit) = observation else {
            return Ok(Vec::new());
        };
        let desc = self.code.descriptor(self.q_key, k, i)?;
        self.ingested += 1;
        let row = self.equation(&desc);
        let newly = match self.solver.insert(row, bit) {
            InsertOutcome::Independent { newly_resolved } => newly_resolved,
            InsertOutcome::Redundant => return Ok(Vec::new()),
            InsertOutcome::Inconsistent => return Err(Error::Inconsistent { k, i }),
        };
        let kb = self.code.k();
        let mut done = Vec::new();
        for var in newly {
            let block = var as u64 / kb + 1;
            let count = self.resolved_in_block.entry(block).or_insert(0);
            *count += 1;
            if *count == self.block_bits(block) {
                done.push(block);
                self.resolved_in_block.remove(&block);
            }
        }
        done.sort_unstable();
        let mut prefix = self.solver.first_unresolved_from(self.prefix as usize) as u64;
        if let Some(n) = self.message_bits {
            prefix = prefix.min(n);
        }
        self.prefix = prefix;
        Ok(done)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::CodeSpec;
    use crate::gf2::{prf_bits, PrfStream};

    fn message(n: usize, seed: u64) -> BitVector {
        prf_bits(&mut PrfStream::new(seed, "message"), n)
    }

    #[test]
    fn zero_message_encodes_zero() {
        let code = Code::new(CodeSpec::ExNonOpt { k: 8 }).unwrap();
        let enc = Encoder::new(code, 3, BitVector::zeros(256));
        for i in 1..=64 {
            assert!(!enc.encode(1, i).unwrap());
            assert!(!enc.encode(2, i).unwrap());
        }
    }

    #[test]
    fn streaming_needs_message() {
        let code = Code::new(CodeSpec::Blockwise { k: 8, l: 16 }).unwrap();
        let mut enc = Encoder::new(code.clone(), 1, message(8, 1));
        assert!(enc.encode(1, 16).is_ok());
        assert!(matches!(
            enc.encode(1, 17),
            Err(Error::NeedMoreMessage {
                needed: 16,
                available: 8
            })
        ));
        enc.extend_message(&message(8, 2));
        assert!(enc.encode(1, 17).is_ok());
        let padded = Encoder::new(code, 1, message(8, 1)).with_zero_padding();
        assert!(padded.encode(1, 17).is_ok());
    }

    #[test]
    fn lossless_systematic_blockwise() {
        let k = 16;
        let code = Code::new(CodeSpec::Blockwise { k, l: k }).unwrap();
        let msg = message(3 * k as usize, 5);
        let enc = Encoder::new(code.clone(), 0, msg.clone());
        let mut dec = Decoder::new(code, 0);
        for i in 1..=3 * k {
            let done = dec.ingest(1, i, Some(enc.encode(1, i).unwrap())).unwrap();
            assert_eq!(dec.decoded_prefix(), i);
            if i % k == 0 {
                assert_eq!(done, vec![i / k]);
            } else {
                assert!(done.is_empty());
            }
        }
        for b in 0..msg.len() {
            assert_eq!(dec.value(b as u64), Some(msg.get(b)));
        }
    }

    #[test]
    fn erasures_are_dropped() {
        let code = Code::new(CodeSpec::Blockwise { k: 4, l: 8 }).unwrap();
        let mut dec = Decoder::new(code, 0);
        assert!(dec.ingest(1, 1, None).unwrap().is_empty());
        assert_eq!(dec.ingested(), 0);
        assert_eq!(dec.decoded_prefix(), 0);
    }

    #[test]
    fn known_zero_tail() {
        let code = Code::new(CodeSpec::Blockwise { k: 8, l: 8 }).unwrap();
        let msg = message(5, 7);
        let enc = Encoder::new(code.clone(), 0, msg.clone()).with_zero_padding();
        let mut dec = Decoder::new(code, 0).with_message_bits(5);
        let mut done = Vec::new();
        for i in 1..=5 {
            done.extend(dec.ingest(1, i, Some(enc.encode(1, i).unwrap())).unwrap());
        }
        assert_eq!(done, vec![1]);
        assert_eq!(dec.decoded_prefix(), 5);
        // Symbols covering padding carry no equations.
        for i in 6..=8 {
            assert!(dec
                .ingest(1, i, Some(enc.encode(1, i).unwrap()))
                .unwrap()
                .is_empty());
        }
    }

    #[test]
    fn corrupted_symbol_is_inconsistent() {
        let code = Code::new(CodeSpec::Blockwise { k: 2, l: 2 }).unwrap();
        let enc = Encoder::new(code.clone(), 0, message(2, 1));
        let mut dec = Decoder::new(code.clone(), 0);
        dec.ingest(1, 1, Some(enc.encode(1, 1).unwrap())).unwrap();
        let mut dec2 = dec.clone();
        let bit = enc.encode(1, 1).unwrap();
        assert!(dec.ingest(1, 1, Some(bit)).unwrap().is_empty());
        assert!(matches!(
            dec2.ingest(1, 1, Some(!bit)),
            Err(Error::Inconsistent { k: 1, i: 1 })
        ));
    }
}
