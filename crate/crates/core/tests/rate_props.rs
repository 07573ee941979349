use mrs_core::rate::{fa_cdf, integral_check, optimal_g, sampling_atoms, Direction, StepFunction};
use mrs_core::rational::{q, qi, Q};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random strictly increasing grid points `n/den` in `(0, max]`.
fn grid(rng: &mut ChaCha8Rng, count: usize, den: i64, max: i64) -> Vec<Q> {
    let mut picks: Vec<i64> = Vec::new();
    while picks.len() < count {
        let v = rng.gen_range(1..=max);
        if !picks.contains(&v) {
            picks.push(v);
        }
    }
    picks.sort_unstable();
    picks.into_iter().map(|n| q(n, den)).collect()
}

/// A random decreasing parameter with unit mass.
fn random_g(rng: &mut ChaCha8Rng) -> StepFunction {
    let m = rng.gen_range(1..=5);
    let bps = grid(rng, m, 16, 32);
    let mut vals: Vec<Q> = (0..m).map(|_| q(rng.gen_range(1..=20), 4)).collect();
    vals.sort_by(|a, b| b.cmp(a));
    let mass = bps
        .iter()
        .zip(&vals)
        .scan(Q::zero(), |prev, (b, v)| {
            let piece = (b - &*prev) * v;
            *prev = b.clone();
            Some(piece)
        })
        .fold(Q::zero(), |a, x| a + x);
    let vals = vals.into_iter().map(|v| v / &mass).collect();
    StepFunction::new(Direction::Decreasing, bps, vals).unwrap()
}

/// A random increasing rate function on capacities in `(0, 1]`.
fn random_r(rng: &mut ChaCha8Rng) -> StepFunction {
    let m = rng.gen_range(1..=5);
    let caps = grid(rng, m, 12, 12);
    let rates = grid(rng, m, 8, 16);
    StepFunction::new(Direction::Increasing, caps, rates).unwrap()
}

fn scaled_to_unit(r: &StepFunction) -> StepFunction {
    let total = integral_check(r).unwrap();
    if total <= Q::one() {
        return r.clone();
    }
    let vals = r.values().iter().map(|v| v / &total).collect();
    StepFunction::new(Direction::Increasing, r.breakpoints().to_vec(), vals).unwrap()
}

#[test]
fn atoms_have_unit_mass_and_match_cdf() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let g = random_g(&mut rng);
        let atoms = sampling_atoms(&g).unwrap();
        let total = atoms.atoms().iter().fold(Q::zero(), |a, (_, p)| a + p);
        assert_eq!(total, Q::one());
        assert!(atoms.atoms().iter().all(|(_, p)| p > &Q::zero()));
        assert!(atoms.atoms().windows(2).all(|w| w[0].0 < w[1].0));
        // Midpoints between jumps, and points past the support.
        let mut probes = vec![q(1, 64)];
        let bps = g.breakpoints();
        for w in bps.windows(2) {
            probes.push((&w[0] + &w[1]) / qi(2));
        }
        probes.extend(bps.iter().map(|b| b + q(1, 1000)));
        for a in probes {
            assert_eq!(atoms.cdf(&a), fa_cdf(&g, &a).unwrap(), "g = {g:?}, α = {a}");
        }
    }
}

#[test]
fn fa_cdf_is_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let g = random_g(&mut rng);
        let mut prev = Q::zero();
        for i in 0..=80 {
            let v = fa_cdf(&g, &q(i, 32)).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        assert_eq!(prev, Q::one());
    }
}

#[test]
fn optimal_g_mass_equals_integral() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let r = scaled_to_unit(&random_r(&mut rng));
        let g = optimal_g(&r).unwrap();
        let mass = g.integral_to(&r.sup());
        assert_eq!(mass, integral_check(&r).unwrap());
    }
}

#[test]
fn optimal_g_meets_every_breakpoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let r = scaled_to_unit(&random_r(&mut rng));
        let g = optimal_g(&r).unwrap();
        for c in r.breakpoints().iter().filter(|c| *c <= &Q::one()) {
            assert!(c * g.eval(&r.eval(c)) >= Q::one(), "r = {r:?}, c = {c}");
        }
    }
}

#[test]
fn infeasible_rate_function_has_no_optimal_g() {
    let r = StepFunction::new(Direction::Increasing, vec![q(1, 2)], vec![q(3, 4)]).unwrap();
    assert_eq!(integral_check(&r).unwrap(), q(3, 2));
    assert!(optimal_g(&r).is_err());
}
