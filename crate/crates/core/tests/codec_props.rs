use std::collections::BTreeSet;

use mrs_core::codec::{Code, CodeSpec, Decoder, Encoder};
use mrs_core::gf2::{prf_bits, PrfStream};
use mrs_core::rate::StepFunction;
use mrs_core::rational::{q, qi};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn families() -> Vec<CodeSpec> {
    vec![
        CodeSpec::Blockwise { k: 32, l: 32 },
        CodeSpec::Blockwise { k: 32, l: 64 },
        CodeSpec::Multiplexed {
            k: 32,
            l1: 48,
            l2: 96,
        },
        CodeSpec::Superposition {
            k: 32,
            g: vec![
                StepFunction::multiplexed_g(2, 3, 6),
                StepFunction::blockwise_g(1, 2),
            ],
        },
        CodeSpec::ExNonOpt { k: 32 },
        CodeSpec::SubBlock {
            k: 60,
            l: 240,
            w: vec![qi(1), qi(1), qi(2)],
            r1: q(3, 2),
            r2: qi(3),
            symbol_rates: None,
        },
    ]
}

/// Sends symbols round-robin over a lossless channel until the whole
/// message is decoded or `budget` symbols per transmitter have been sent.
fn lossless_round_trip(spec: &CodeSpec, bits: u64, seed: u64, budget: u64) -> (u64, bool) {
    let code = Code::new(spec.clone()).unwrap();
    let message = prf_bits(&mut PrfStream::new(seed, "message"), bits as usize);
    let enc = Encoder::new(code.clone(), seed, message.clone()).with_zero_padding();
    let mut dec = Decoder::new(code.clone(), seed).with_message_bits(bits);
    let rates = code.symbol_rates().unwrap_or_else(|| vec![1; code.d()]);
    let mut prev = 0;
    for t in 1..=budget {
        for (k, &s) in rates.iter().enumerate() {
            for r in 0..s {
                let i = (t - 1) * s + r + 1;
                dec.ingest(k + 1, i, Some(enc.encode(k + 1, i).unwrap()))
                    .unwrap();
                assert!(dec.decoded_prefix() >= prev, "prefix regressed");
                prev = dec.decoded_prefix();
            }
        }
        if prev == bits {
            break;
        }
    }
    let correct = (0..bits).all(|b| dec.value(b) == Some(message.get(b as usize)));
    (prev, correct)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lossless_round_trip_decodes_everything(bits in 1u64..=4096, seed in any::<u64>()) {
        for spec in families() {
            let (prefix, correct) = lossless_round_trip(&spec, bits, seed, 8 * 4096);
            prop_assert_eq!(prefix, bits, "{:?}", spec);
            prop_assert!(correct);
        }
    }
}

#[test]
fn descriptors_agree_between_independent_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let specs = families();
    let sender: Vec<Code> = specs
        .iter()
        .cloned()
        .map(|s| Code::new(s).unwrap())
        .collect();
    let receiver: Vec<Code> = specs
        .iter()
        .map(|s| {
            let json = serde_json::to_string(s).unwrap();
            Code::new(serde_json::from_str(&json).unwrap()).unwrap()
        })
        .collect();
    for _ in 0..100_000 {
        let f = rng.gen_range(0..specs.len());
        let q_key = rng.gen();
        let k = rng.gen_range(1..=sender[f].d());
        let i = rng.gen_range(1..=1u64 << 40);
        let a = sender[f].descriptor(q_key, k, i).unwrap();
        let b = receiver[f].descriptor(q_key, k, i).unwrap();
        assert_eq!(a, b);
        if i < 1 << 20 {
            assert_eq!(
                sender[f].coefficients(q_key, &a),
                receiver[f].coefficients(q_key, &b)
            );
        }
    }
}

#[test]
fn ex_non_opt_super_slots_cover_expected_blocks() {
    let k = 4;
    let code = Code::new(CodeSpec::ExNonOpt { k }).unwrap();
    for n in 1..=1000u64 {
        let mut seen = BTreeSet::new();
        for tx in 1..=2 {
            for i in [(n - 1) * 4 * k + 1, n * 4 * k] {
                let desc = code.descriptor(0, tx, i).unwrap();
                seen.extend(desc.segments.iter().map(|s| s.block));
            }
        }
        let expected: BTreeSet<u64> = [2 * n - 1, 2 * n, 4 * n - 3, 4 * n - 2, 4 * n - 1, 4 * n]
            .into_iter()
            .collect();
        assert_eq!(seen, expected, "super-slot {n}");
    }
}

#[test]
fn encoder_is_a_function_of_its_inputs() {
    for spec in families() {
        let code = Code::new(spec).unwrap();
        let msg = prf_bits(&mut PrfStream::new(1, "message"), 2048);
        let a = Encoder::new(code.clone(), 9, msg.clone()).with_zero_padding();
        let b = Encoder::new(Code::new(code.spec().clone()).unwrap(), 9, msg).with_zero_padding();
        for k in 1..=code.d() {
            for i in 1..=500 {
                assert_eq!(a.encode(k, i).unwrap(), b.encode(k, i).unwrap());
            }
        }
    }
}
