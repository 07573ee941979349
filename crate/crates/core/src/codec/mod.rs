//! Encoders and sequential decoders for the code families.
//!
//! Every symbol is a GF(2) projection of a few message segments. Which
//! segments, and with which coefficients, is a pure function of the code,
//! the shared key and the symbol coordinates `(k, i)`, so sender and
//! receiver derive identical [`SymbolDescriptor`]s without side channels.

mod session;
mod spec;

use num_traits::ToPrimitive;

pub use session::{Decoder, Encoder};
pub use spec::CodeSpec;
use spec::SubBlockLayout;

use crate::gf2::{prf_bits, BitVector, PrfStream};
use crate::rate::sampling_atoms;
use crate::{Error, Result};

/// A contiguous run of message bits referenced by a symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Segment {
    /// 1-based block number the bits belong to.
    pub block: u64,
    /// 0-based global offset of the first bit.
    pub start: u64,
    pub len: u64,
}

impl Segment {
    pub fn end(&self) -> u64 {
        self.start + self.len
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coefficients {
    /// Systematic symbol: copies the bit at this offset into the
    /// concatenated segments.
    Unit { position: u64 },
    /// Pseudorandom projection keyed by the symbol coordinates.
    Random,
}

/// Everything needed to produce or interpret one encoded symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolDescriptor {
    /// 1-based transmitter number.
    pub transmitter: usize,
    /// 1-based symbol index on that transmitter.
    pub index: u64,
    pub segments: Vec<Segment>,
    pub coefficients: Coefficients,
}

impl SymbolDescriptor {
    /// Total number of bits projected.
    pub fn width(&self) -> u64 {
        self.segments.iter().map(|s| s.len).sum()
    }

    /// One past the highest message bit referenced.
    pub fn end(&self) -> u64 {
        self.segments.iter().map(Segment::end).max().unwrap_or(0)
    }
}

/// Per-transmitter rate distribution of a superposition code.
#[derive(Clone, Debug, PartialEq)]
struct RateTable {
    cumulative: Vec<f64>,
    /// Rates as exact `(numerator, denominator)` pairs.
    rates: Vec<(u64, u64)>,
}

impl RateTable {
    fn sample(&self, u: f64) -> (u64, u64) {
        let idx = self.cumulative.partition_point(|&c| c <= u);
        self.rates[idx.min(self.rates.len() - 1)]
    }
}

/// A validated code with its lookup tables.
#[derive(Clone, Debug)]
pub struct Code {
    spec: CodeSpec,
    tables: Vec<RateTable>,
    layout: Option<SubBlockLayout>,
}

const COEFF_DOMAIN: &str = "coeff";
const RATE_DOMAIN: &str = "rate-sample";

impl Code {
    pub fn new(spec: CodeSpec) -> Result<Self> {
        spec.validate()?;
        let mut tables = Vec::new();
        if let CodeSpec::Superposition { g, .. } = &spec {
            for gk in g {
                let atoms = sampling_atoms(gk)?;
                let mut acc = 0.0;
                let mut cumulative = Vec::new();
                let mut rates = Vec::new();
                for (rate, p) in atoms.atoms() {
                    acc += crate::rational::to_f64(p);
                    cumulative.push(acc);
                    let num = rate.numer().to_u64();
                    let den = rate.denom().to_u64();
                    let (Some(num), Some(den)) = (num, den) else {
                        return Err(Error::InvalidSpec {
                            field: "g",
                            reason: "breakpoints need numerators and denominators below 2^64"
                                .into(),
                        });
                    };
                    rates.push((num, den));
                }
                *cumulative
                    .last_mut()
                    .expect("unit mass means at least one atom") = f64::INFINITY;
                tables.push(RateTable { cumulative, rates });
            }
        }
        let layout = SubBlockLayout::new(&spec);
        Ok(Self {
            spec,
            tables,
            layout,
        })
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn d(&self) -> usize {
        self.spec.d()
    }

    /// Block size in bits.
    pub fn k(&self) -> u64 {
        self.spec.k()
    }

    /// Time steps in one super-slot for codes that decode super-slot by
    /// super-slot.
    pub fn super_slot(&self) -> Option<u64> {
        match &self.spec {
            CodeSpec::ExNonOpt { k } => Some(4 * k),
            CodeSpec::SubBlock { l, .. } => Some(*l),
            _ => None,
        }
    }

    /// Symbols per time step each transmitter is designed for, when the
    /// code fixes them.
    pub fn symbol_rates(&self) -> Option<Vec<u64>> {
        self.layout.as_ref().map(|l| l.symbol_rates.to_vec())
    }

    /// Rate drawn for symbol `(k, i)` of a superposition code.
    pub fn sampled_rate(&self, q_key: u64, k: usize, i: u64) -> Option<(u64, u64)> {
        let table = self.tables.get(k.checked_sub(1)?)?;
        let u = PrfStream::at(q_key, RATE_DOMAIN, &[k as u64, i]).next_f64();
        Some(table.sample(u))
    }

    /// Number of message bits that symbols `1..=symbols` of transmitter `k`
    /// can reference, for any rate draws.
    pub fn message_span(&self, k: usize, symbols: u64) -> Result<u64> {
        if symbols == 0 {
            return Ok(0);
        }
        if let CodeSpec::Superposition { .. } = &self.spec {
            let table = self
                .tables
                .get(k.wrapping_sub(1))
                .ok_or(Error::InvalidCoordinate { k, i: symbols })?;
            let kb = u128::from(self.k());
            let blocks = table
                .rates
                .iter()
                .map(|&(num, den)| {
                    (u128::from(symbols) * u128::from(num)).div_ceil(u128::from(den) * kb)
                })
                .max()
                .unwrap_or(0);
            return u64::try_from(blocks * kb)
                .map_err(|_| Error::Precondition("message too long".into()));
        }
        let last = self.descriptor(0, k, symbols)?.end();
        if let CodeSpec::Multiplexed { .. } = &self.spec {
            // The two interleaved codes run at different paces.
            if symbols > 1 {
                return Ok(last.max(self.descriptor(0, k, symbols - 1)?.end()));
            }
        }
        Ok(last)
    }

    fn block(&self, block: u64) -> Segment {
        let k = self.k();
        Segment {
            block,
            start: (block - 1) * k,
            len: k,
        }
    }

    pub fn descriptor(&self, q_key: u64, k: usize, i: u64) -> Result<SymbolDescriptor> {
        if k == 0 || k > self.d() || i == 0 {
            return Err(Error::InvalidCoordinate { k, i });
        }
        let kb = self.k();
        let random = |segments| SymbolDescriptor {
            transmitter: k,
            index: i,
            segments,
            coefficients: Coefficients::Random,
        };
        let systematic = |block, j: u64| SymbolDescriptor {
            transmitter: k,
            index: i,
            segments: vec![self.block(block)],
            coefficients: Coefficients::Unit {
                position: (j - 1) % kb,
            },
        };
        Ok(match &self.spec {
            CodeSpec::Blockwise { l, .. } => {
                let b = i.div_ceil(*l);
                if *l == kb {
                    systematic(b, i)
                } else {
                    random(vec![self.block(b)])
                }
            }
            CodeSpec::Multiplexed { l1, l2, .. } => {
                if i % 2 == 1 {
                    let j = i.div_ceil(2);
                    let b = j.div_ceil(*l1);
                    if *l1 == kb {
                        systematic(b, j)
                    } else {
                        random(vec![self.block(b)])
                    }
                } else {
                    random(vec![self.block((i / 2).div_ceil(*l2))])
                }
            }
            CodeSpec::Superposition { .. } => {
                let (num, den) = self
                    .sampled_rate(q_key, k, i)
                    .expect("table per transmitter");
                let covered = u128::from(i) * u128::from(num);
                let b = covered.div_ceil(u128::from(den) * u128::from(kb));
                random(vec![self.block(b as u64)])
            }
            CodeSpec::ExNonOpt { .. } => {
                let n = i.div_ceil(4 * kb);
                let k = k as u64;
                let mut blocks = [2 * n - 2 + k, 4 * n - 1 - k, 4 * n + 1 - k];
                blocks.sort_unstable();
                random(blocks.iter().map(|&b| self.block(b)).collect())
            }
            CodeSpec::SubBlock { .. } => {
                let layout = self.layout.as_ref().expect("validated sub-block code");
                let t = i.div_ceil(layout.symbol_rates[k - 1]);
                let j = t.div_ceil(layout.l);
                let segments = if k == 3 {
                    layout.super_block(1, 0, j)
                } else {
                    let mut s = layout.super_block(0, 0, j);
                    s.extend(layout.super_block(1, 1, j));
                    s
                };
                random(segments)
            }
        })
    }

    /// Coefficient vector over the concatenated segments of `desc`.
    pub fn coefficients(&self, q_key: u64, desc: &SymbolDescriptor) -> BitVector {
        let width = desc.width() as usize;
        match desc.coefficients {
            Coefficients::Unit { position } => {
                let mut v = BitVector::zeros(width);
                v.set(position as usize, true);
                v
            }
            Coefficients::Random => {
                let mut stream =
                    PrfStream::at(q_key, COEFF_DOMAIN, &[desc.transmitter as u64, desc.index]);
                prf_bits(&mut stream, width)
            }
        }
    }
}

impl SubBlockLayout {
    /// Segments of super-block `S_{a,b,j}` (0-based `a` and `b`).
    fn super_block(&self, a: usize, b: usize, j: u64) -> Vec<Segment> {
        let n = self.blocks_per_super[a];
        ((j - 1) * n + 1..=j * n)
            .map(|block| {
                let base = (block - 1) * self.k;
                let (start, len) = if b == 0 {
                    (base, self.head)
                } else {
                    (base + self.head, self.k - self.head)
                };
                Segment { block, start, len }
            })
            .filter(|s| s.len > 0)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate::StepFunction;
    use crate::rational::{q, qi};

    fn blocks(d: &SymbolDescriptor) -> Vec<u64> {
        d.segments.iter().map(|s| s.block).collect()
    }

    #[test]
    fn ex_non_opt_first_super_slot() {
        let code = Code::new(CodeSpec::ExNonOpt { k: 8 }).unwrap();
        assert_eq!(blocks(&code.descriptor(0, 1, 1).unwrap()), vec![1, 2, 4]);
        assert_eq!(blocks(&code.descriptor(0, 2, 1).unwrap()), vec![1, 2, 3]);
        assert_eq!(blocks(&code.descriptor(0, 1, 33).unwrap()), vec![3, 6, 8]);
        assert!(code.descriptor(0, 3, 1).is_err());
        assert!(code.descriptor(0, 1, 0).is_err());
    }

    #[test]
    fn systematic_blockwise() {
        let code = Code::new(CodeSpec::Blockwise { k: 4, l: 4 }).unwrap();
        let d = code.descriptor(0, 1, 6).unwrap();
        assert_eq!(blocks(&d), vec![2]);
        assert_eq!(d.coefficients, Coefficients::Unit { position: 1 });
        let c = code.coefficients(0, &d);
        assert_eq!(c.ones().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn multiplexed_interleaves() {
        let code = Code::new(CodeSpec::Multiplexed { k: 2, l1: 2, l2: 4 }).unwrap();
        let got: Vec<u64> = (1..=8)
            .map(|i| code.descriptor(0, 1, i).unwrap().segments[0].block)
            .collect();
        // Odd slots: code 1 (two symbols per block); even slots: code 2
        // (four symbols per block).
        assert_eq!(got, vec![1, 1, 1, 1, 2, 1, 2, 1]);
    }

    #[test]
    fn superposition_single_rate_is_blockwise() {
        let spec = CodeSpec::Superposition {
            k: 4,
            g: vec![StepFunction::blockwise_g(1, 2)],
        };
        let code = Code::new(spec).unwrap();
        for i in 1..=40 {
            assert_eq!(code.sampled_rate(9, 1, i), Some((1, 2)));
            assert_eq!(
                code.descriptor(9, 1, i).unwrap().segments[0].block,
                i.div_ceil(8)
            );
        }
    }

    #[test]
    fn sub_block_layout() {
        // γ = 2/3 and r2 = 2·r1.
        let spec = CodeSpec::SubBlock {
            k: 6,
            l: 6,
            w: vec![qi(1), qi(1), q(4, 3)],
            r1: qi(1),
            r2: qi(2),
            symbol_rates: Some(vec![1, 1, 1]),
        };
        let code = Code::new(spec).unwrap();
        let d3 = code.descriptor(0, 3, 1).unwrap();
        let want: Vec<Segment> = (1..=2)
            .map(|b| Segment {
                block: b,
                start: (b - 1) * 6,
                len: 4,
            })
            .collect();
        assert_eq!(d3.segments, want);
        let d1 = code.descriptor(0, 1, 7).unwrap();
        assert_eq!(
            d1.segments,
            vec![
                Segment {
                    block: 2,
                    start: 6,
                    len: 4
                },
                Segment {
                    block: 3,
                    start: 16,
                    len: 2
                },
                Segment {
                    block: 4,
                    start: 22,
                    len: 2
                },
            ]
        );
    }

    #[test]
    fn sub_block_rejects_fractional_layout() {
        let spec = CodeSpec::SubBlock {
            k: 60,
            l: 240,
            w: vec![qi(1), qi(1), qi(2)],
            r1: q(3, 2),
            r2: q(31, 10),
            symbol_rates: None,
        };
        assert!(matches!(
            Code::new(spec),
            Err(Error::InvalidSpec { field: "r2", .. })
        ));
    }

    #[test]
    fn spec_json_round_trip() {
        let text = r#"{"family":"sub_block","k":60,"l":240,"w":[1,1,2],"r1":"3/2","r2":3}"#;
        let spec: CodeSpec = serde_json::from_str(text).unwrap();
        let code = Code::new(spec.clone()).unwrap();
        assert_eq!(code.symbol_rates(), Some(vec![1, 1, 2]));
        let back: CodeSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        assert!(serde_json::from_str::<CodeSpec>(r#"{"family":"blockwise","k":4}"#).is_err());
    }
}
