//! Exact achievability checks for rate-capacity pairs.
//!
//! The superposition check is a linear feasibility problem over the values
//! of a piecewise-constant parameter; the remaining checks are closed-form
//! regions for one-or-all multicast networks and the three-transmitter
//! network with a pairwise receiver structure.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::lp::{Outcome, Problem, Relation};
use crate::rate::{Direction, StepFunction};
use crate::rational::{format_q, serde_q, to_f64, Q};
use crate::{Error, Result};

/// A receiver described by its per-transmitter capacities and the rate it
/// wants to decode at.
///
/// Capacities are normally survival probabilities in `[0, 1]`. Since the
/// superposition condition is invariant under scaling capacities and rates
/// together, link rates above 1 are accepted as well.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatePair {
    #[serde(with = "serde_q::vec")]
    pub capacities: Vec<Q>,
    #[serde(with = "serde_q")]
    pub rate: Q,
}

impl RatePair {
    pub fn new(rate: Q, capacities: Vec<Q>) -> Self {
        Self { capacities, rate }
    }

    /// Sum of the capacities.
    pub fn total_capacity(&self) -> Q {
        self.capacities.iter().fold(Q::zero(), |a, c| a + c)
    }
}

impl fmt::Display for RatePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let caps: Vec<String> = self.capacities.iter().map(format_q).collect();
        write!(f, "({}, ({}))", format_q(&self.rate), caps.join(", "))
    }
}

/// One decreasing unit-mass step function per transmitter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GParameter {
    pub components: Vec<StepFunction>,
}

impl GParameter {
    pub fn new(components: Vec<StepFunction>) -> Result<Self> {
        let g = Self { components };
        g.validate()?;
        Ok(g)
    }

    pub fn d(&self) -> usize {
        self.components.len()
    }

    /// Each component decreasing, with bounded support and unit mass.
    pub fn validate(&self) -> Result<()> {
        for (k, g) in self.components.iter().enumerate() {
            if g.direction() != Direction::Decreasing {
                return Err(Error::Precondition(format!(
                    "component {} is not decreasing",
                    k + 1
                )));
            }
            let mass = g.integral()?;
            if !mass.is_one() {
                return Err(Error::Precondition(format!(
                    "component {} has mass {}",
                    k + 1,
                    format_q(&mass)
                )));
            }
        }
        Ok(())
    }

    /// `Σ_k c_k · g_k(rate)`.
    pub fn dot(&self, capacities: &[Q], rate: &Q) -> Q {
        self.components
            .iter()
            .zip(capacities)
            .fold(Q::zero(), |acc, (g, c)| acc + c * g.eval(rate))
    }
}

/// Result of a region check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    pub witness: Option<GParameter>,
    /// Smallest slack over the checked constraints; negative when infeasible.
    pub margin: Q,
    pub violated_constraints: Vec<String>,
    pub warnings: Vec<String>,
}

impl FeasibilityVerdict {
    fn from_constraints(constraints: Vec<(String, Q)>) -> Self {
        let margin = constraints
            .iter()
            .map(|(_, s)| s.clone())
            .min()
            .unwrap_or_else(Q::zero);
        let violated: Vec<String> = constraints
            .into_iter()
            .filter(|(_, s)| s.is_negative())
            .map(|(name, _)| name)
            .collect();
        Self {
            feasible: violated.is_empty(),
            witness: None,
            margin,
            violated_constraints: violated,
            warnings: Vec::new(),
        }
    }
}

impl Serialize for FeasibilityVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FeasibilityVerdict", 6)?;
        st.serialize_field("feasible", &self.feasible)?;
        if let Some(w) = &self.witness {
            st.serialize_field("witness", w)?;
        }
        st.serialize_field("margin", &to_f64(&self.margin))?;
        st.serialize_field("margin_exact", &format_q(&self.margin))?;
        st.serialize_field("violated_constraints", &self.violated_constraints)?;
        if !self.warnings.is_empty() {
            st.serialize_field("warnings", &self.warnings)?;
        }
        st.end()
    }
}

/// Smallest slack `c·g(r) − (1 + ξ)` of `g` over `pairs`, after checking
/// that `g` is a valid parameter of the right dimension.
pub fn witness_margin(pairs: &[RatePair], g: &GParameter, xi: &Q) -> Result<Q> {
    g.validate()?;
    let target = Q::one() + xi;
    pairs
        .iter()
        .map(|p| {
            if p.capacities.len() != g.d() {
                return Err(Error::Precondition(format!(
                    "pair {p} has {} capacities, parameter has {}",
                    p.capacities.len(),
                    g.d()
                )));
            }
            Ok(g.dot(&p.capacities, &p.rate) - &target)
        })
        .try_fold(None, |acc: Option<Q>, s| {
            let s = s?;
            Ok(Some(match acc {
                Some(a) if a <= s => a,
                _ => s,
            }))
        })
        .map(|m| m.unwrap_or_else(Q::zero))
}

fn check_pairs(pairs: &[RatePair], d: usize, xi: &Q) -> Result<()> {
    if xi.is_negative() {
        return Err(Error::Precondition("margin ξ must be nonnegative".into()));
    }
    for p in pairs {
        if p.capacities.len() != d {
            return Err(Error::Precondition(format!(
                "pair {p} has {} capacities, expected {d}",
                p.capacities.len()
            )));
        }
        if p.capacities.iter().any(Signed::is_negative) {
            return Err(Error::Precondition(format!(
                "pair {p} has a negative capacity"
            )));
        }
        if !p.rate.is_positive() {
            return Err(Error::Precondition(format!(
                "pair {p} has rate 0, which every parameter satisfies; filter it out"
            )));
        }
    }
    Ok(())
}

struct Lp {
    problem: Problem,
    rates: Vec<Q>,
    d: usize,
}

/// Variables `g[k][m]` (value of `g_k` on the m-th rate interval) followed by
/// a uniform slack `t` that the objective maximizes.
fn build_lp(pairs: &[RatePair], d: usize, xi: &Q) -> Lp {
    let mut rates: Vec<Q> = pairs.iter().map(|p| p.rate.clone()).collect();
    rates.sort();
    rates.dedup();
    let m_count = rates.len();
    let var = |k: usize, m: usize| k * m_count + m;
    let t = d * m_count;
    let mut problem = Problem::new(t + 1);
    let target = Q::one() + xi;
    for p in pairs {
        let m = rates.binary_search(&p.rate).expect("rate listed");
        let mut coeffs: Vec<(usize, Q)> = p
            .capacities
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (var(k, m), c.clone()))
            .collect();
        coeffs.push((t, -Q::one()));
        problem.add(coeffs, Relation::Ge, target.clone());
    }
    for k in 0..d {
        for m in 0..m_count.saturating_sub(1) {
            problem.add(
                vec![(var(k, m), Q::one()), (var(k, m + 1), -Q::one())],
                Relation::Ge,
                Q::zero(),
            );
        }
        let mut prev = Q::zero();
        let mass = rates
            .iter()
            .enumerate()
            .map(|(m, r)| {
                let width = r - &prev;
                prev = r.clone();
                (var(k, m), width)
            })
            .collect();
        problem.add(mass, Relation::Le, Q::one());
    }
    problem.objective = vec![(t, Q::one())];
    Lp { problem, rates, d }
}

impl Lp {
    fn witness(&self, x: &[Q]) -> Result<GParameter> {
        let m_count = self.rates.len();
        let components = (0..self.d)
            .map(|k| {
                let mut vals: Vec<Q> = x[k * m_count..(k + 1) * m_count].to_vec();
                let mut prev = Q::zero();
                let mut mass = Q::zero();
                for (v, r) in vals.iter().zip(&self.rates) {
                    mass += v * (r - &prev);
                    prev = r.clone();
                }
                // Spend leftover mass on the first piece, which keeps the
                // function decreasing and only raises c·g.
                vals[0] += (Q::one() - mass) / &self.rates[0];
                StepFunction::new(Direction::Decreasing, self.rates.clone(), vals)
            })
            .collect::<Result<Vec<_>>>()?;
        GParameter::new(components)
    }
}

fn unit_parameter(d: usize) -> GParameter {
    let one =
        StepFunction::new(Direction::Decreasing, vec![Q::one()], vec![Q::one()]).expect("valid");
    GParameter {
        components: vec![one; d],
    }
}

/// Decides whether one superposition parameter `g` satisfies
/// `c·g(r) ≥ 1 + ξ` for every pair.
///
/// A feasible verdict carries the witness that maximizes the smallest slack;
/// an infeasible one names a minimal subset of pairs that cannot be met
/// together.
pub fn superposition_feasible(pairs: &[RatePair], d: usize, xi: &Q) -> Result<FeasibilityVerdict> {
    check_pairs(pairs, d, xi)?;
    if pairs.is_empty() {
        return Ok(FeasibilityVerdict {
            feasible: true,
            witness: Some(unit_parameter(d)),
            margin: Q::zero(),
            violated_constraints: Vec::new(),
            warnings: vec!["no rate-capacity pairs given; trivially feasible".into()],
        });
    }
    let lp = build_lp(pairs, d, xi);
    match lp.problem.solve() {
        Outcome::Optimal { x, .. } => {
            let witness = lp.witness(&x)?;
            let margin = witness_margin(pairs, &witness, xi)?;
            debug_assert!(!margin.is_negative());
            Ok(FeasibilityVerdict {
                feasible: true,
                witness: Some(witness),
                margin,
                violated_constraints: Vec::new(),
                warnings: Vec::new(),
            })
        }
        Outcome::Infeasible { residual } => Ok(FeasibilityVerdict {
            feasible: false,
            witness: None,
            margin: -residual,
            violated_constraints: infeasible_core(pairs, d, xi)
                .iter()
                .map(|p| format!("c·g(r) ≥ 1+ξ for pair {p}"))
                .collect(),
            warnings: Vec::new(),
        }),
        Outcome::Unbounded { .. } => unreachable!("slack is bounded by the mass constraints"),
    }
}

/// Feasibility only, without building a witness.
pub fn superposition_feasible_fast(pairs: &[RatePair], d: usize, xi: &Q) -> Result<bool> {
    check_pairs(pairs, d, xi)?;
    if pairs.is_empty() {
        return Ok(true);
    }
    let mut lp = build_lp(pairs, d, xi).problem;
    lp.objective.clear();
    Ok(!matches!(lp.solve(), Outcome::Infeasible { .. }))
}

/// Deletion filter: drops pairs one at a time while the rest stays infeasible.
fn infeasible_core(pairs: &[RatePair], d: usize, xi: &Q) -> Vec<RatePair> {
    let mut core: Vec<RatePair> = pairs.to_vec();
    let mut i = 0;
    while i < core.len() {
        let mut trial = core.clone();
        trial.remove(i);
        if !trial.is_empty() && !superposition_feasible_fast(&trial, d, xi).unwrap_or(true) {
            core = trial;
        } else {
            i += 1;
        }
    }
    core
}

/// Multicast network of broadcast links where each receiver hears a fixed
/// subset of transmitters without loss.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OnOffNetwork {
    #[serde(with = "serde_q::vec")]
    pub link_rates: Vec<Q>,
    pub receivers: Vec<Receiver>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Receiver {
    /// 1-based transmitter numbers this receiver hears.
    pub hears: Vec<usize>,
    #[serde(with = "serde_q")]
    pub rate: Q,
}

impl OnOffNetwork {
    pub fn d(&self) -> usize {
        self.link_rates.len()
    }

    /// Receivers `1..=d` each hear one transmitter at rates `r`; receiver 0
    /// hears all of them at rate `r0`.
    pub fn one_or_all(w: &[Q], r0: &Q, r: &[Q]) -> Self {
        let d = w.len();
        let mut receivers = vec![Receiver {
            hears: (1..=d).collect(),
            rate: r0.clone(),
        }];
        receivers.extend(r.iter().enumerate().map(|(k, rk)| Receiver {
            hears: vec![k + 1],
            rate: rk.clone(),
        }));
        Self {
            link_rates: w.to_vec(),
            receivers,
        }
    }

    /// Three transmitters; receivers hear {1,2} at `r1` and {1,3}, {2,3} at `r2`.
    pub fn example3(w: &[Q; 3], r1: &Q, r2: &Q) -> Self {
        let rx = |hears: Vec<usize>, rate: &Q| Receiver {
            hears,
            rate: rate.clone(),
        };
        Self {
            link_rates: w.to_vec(),
            receivers: vec![rx(vec![1, 2], r1), rx(vec![1, 3], r2), rx(vec![2, 3], r2)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.link_rates.iter().any(|w| !w.is_positive()) {
            return Err(Error::Precondition("link rates must be positive".into()));
        }
        for rx in &self.receivers {
            if rx.hears.is_empty() || rx.hears.iter().any(|&k| k == 0 || k > self.d()) {
                return Err(Error::Precondition(format!(
                    "receiver transmitter set {:?} is empty or out of range",
                    rx.hears
                )));
            }
            if rx.rate.is_negative() {
                return Err(Error::Precondition(
                    "target rates must be nonnegative".into(),
                ));
            }
        }
        Ok(())
    }

    /// The induced rate-capacity pairs, with zero-rate receivers dropped.
    pub fn pairs(&self) -> Vec<RatePair> {
        self.receivers
            .iter()
            .filter(|rx| rx.rate.is_positive())
            .map(|rx| {
                let caps = (1..=self.d())
                    .map(|k| {
                        if rx.hears.contains(&k) {
                            self.link_rates[k - 1].clone()
                        } else {
                            Q::zero()
                        }
                    })
                    .collect();
                RatePair::new(rx.rate.clone(), caps)
            })
            .collect()
    }
}

fn slack(name: impl Into<String>, lhs: Q, rhs: &Q) -> (String, Q) {
    (name.into(), lhs - rhs)
}

fn max_of(xs: &[Q]) -> Q {
    xs.iter().max().cloned().unwrap_or_else(Q::zero)
}

/// Achievable region of the one-or-all network.
///
/// Feasible iff `r0 ≥ 0`, `0 ≤ r_k ≤ w_k`, and either `r0 ≤ max w_k` or
/// `Σ (w_k − r_k)/(r0 − r_k) ≥ 1`. A feasible verdict carries an explicit
/// superposition parameter.
pub fn one_or_all_check(w: &[Q], r0: &Q, r: &[Q]) -> Result<FeasibilityVerdict> {
    if w.len() != r.len() {
        return Err(Error::Precondition("w and r differ in length".into()));
    }
    let mut cons = vec![slack("r0 ≥ 0", r0.clone(), &Q::zero())];
    for (k, (wk, rk)) in w.iter().zip(r).enumerate() {
        cons.push(slack(format!("r{} ≥ 0", k + 1), rk.clone(), &Q::zero()));
        cons.push(slack(format!("r{0} ≤ w{0}", k + 1), wk.clone(), rk));
    }
    let wmax = max_of(w);
    let basic_ok = cons.iter().all(|(_, s)| !s.is_negative());
    let branch = if r0 <= &wmax {
        slack("r0 ≤ max w", wmax, r0)
    } else if basic_ok {
        let sum = w
            .iter()
            .zip(r)
            .fold(Q::zero(), |acc, (wk, rk)| acc + (wk - rk) / (r0 - rk));
        slack("Σ (w_k − r_k)/(r0 − r_k) ≥ 1", sum, &Q::one())
    } else {
        // The sum is meaningless once a basic constraint fails.
        cons.push(slack("r0 ≤ max w", wmax, r0));
        return Ok(FeasibilityVerdict::from_constraints(cons));
    };
    cons.push(branch);
    let mut verdict = FeasibilityVerdict::from_constraints(cons);
    if verdict.feasible && w.iter().all(Signed::is_positive) {
        verdict.witness = Some(one_or_all_g(w, r0, r)?);
    }
    Ok(verdict)
}

/// Superposition parameter achieving a feasible one-or-all instance:
/// `g_k = 1/w_k` on `(0, r_k]` and `(w_k − r_k)/(w_k(r0 − r_k))` on
/// `(r_k, r0]`.
///
/// When `r0 ≤ max w_k` the instance needs no sharing and `g_k = 1/w_k` on
/// `(0, w_k]` is returned instead.
pub fn one_or_all_g(w: &[Q], r0: &Q, r: &[Q]) -> Result<GParameter> {
    if w.len() != r.len() || w.iter().any(|x| !x.is_positive()) {
        return Err(Error::Precondition(
            "need positive link rates, one per target rate".into(),
        ));
    }
    if w.iter().zip(r).any(|(wk, rk)| rk.is_negative() || rk > wk) {
        return Err(Error::Precondition("need 0 ≤ r_k ≤ w_k".into()));
    }
    let wmax = max_of(w);
    let components = if r0 <= &wmax {
        w.iter()
            .map(|wk| StepFunction::new(Direction::Decreasing, vec![wk.clone()], vec![wk.recip()]))
            .collect::<Result<Vec<_>>>()?
    } else {
        w.iter()
            .zip(r)
            .map(|(wk, rk)| {
                let tail = (wk - rk) / (wk * (r0 - rk));
                if rk.is_zero() {
                    StepFunction::new(Direction::Decreasing, vec![r0.clone()], vec![tail])
                } else {
                    StepFunction::new(
                        Direction::Decreasing,
                        vec![rk.clone(), r0.clone()],
                        vec![wk.recip(), tail],
                    )
                }
            })
            .collect::<Result<Vec<_>>>()?
    };
    GParameter::new(components)
}

fn example3_pairwise(w: &[Q; 3], r1: &Q, r2: &Q) -> Result<Vec<(String, Q)>> {
    if r1 > r2 {
        return Err(Error::Precondition("example network needs r1 ≤ r2".into()));
    }
    if r1.is_negative() || w.iter().any(Signed::is_negative) {
        return Err(Error::Precondition("rates must be nonnegative".into()));
    }
    Ok(vec![
        slack("w1 + w2 ≥ r1", &w[0] + &w[1], r1),
        slack("w1 + w3 ≥ r2", &w[0] + &w[2], r2),
        slack("w2 + w3 ≥ r2", &w[1] + &w[2], r2),
    ])
}

fn share(r1: &Q, r2: &Q) -> Q {
    if r2.is_zero() {
        Q::zero()
    } else {
        (r2 - r1) / r2
    }
}

/// Achievable region (by any code) of the three-transmitter network where
/// receivers hear {1,2} at `r1` and {1,3}, {2,3} at `r2 ≥ r1`.
pub fn example3_check(w: &[Q; 3], r1: &Q, r2: &Q) -> Result<FeasibilityVerdict> {
    let mut cons = example3_pairwise(w, r1, r2)?;
    cons.push(slack(
        "w1 + w2 + w3(r2 − r1)/r2 ≥ r2",
        &w[0] + &w[1] + &w[2] * share(r1, r2),
        r2,
    ));
    Ok(FeasibilityVerdict::from_constraints(cons))
}

/// The smaller region reachable by superposition codes on the same network.
pub fn example3_superposition_check(w: &[Q; 3], r1: &Q, r2: &Q) -> Result<FeasibilityVerdict> {
    let mut cons = example3_pairwise(w, r1, r2)?;
    let two = Q::from_integer(2.into());
    cons.push(slack(
        "w1 + w2 + 2·w3(r2 − r1)/r2 ≥ 2·r2 − r1",
        &w[0] + &w[1] + &two * &w[2] * share(r1, r2),
        &(&two * r2 - r1),
    ));
    Ok(FeasibilityVerdict::from_constraints(cons))
}

/// Outcome of the two-sum necessary condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoSumVerdict {
    pub passed: bool,
    /// `Σ_k (Σ(c_k) − r(c_k)) / (r(c) − r(c_k))`.
    pub lhs: Q,
}

impl TwoSumVerdict {
    /// Passing only means the pair set is not ruled out.
    pub fn status(&self) -> &'static str {
        if self.passed {
            "necessary-condition-passed"
        } else {
            "necessary-condition-failed"
        }
    }
}

impl Serialize for TwoSumVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TwoSumVerdict", 4)?;
        st.serialize_field("status", self.status())?;
        st.serialize_field("passed", &self.passed)?;
        st.serialize_field("lhs", &to_f64(&self.lhs))?;
        st.serialize_field("lhs_exact", &format_q(&self.lhs))?;
        st.end()
    }
}

/// Necessary condition for achievability when `total` is split into
/// receivers `decomposition` whose capacities add up to it.
pub fn two_sum_check(decomposition: &[RatePair], total: &RatePair) -> Result<TwoSumVerdict> {
    if decomposition.is_empty() {
        return Err(Error::Precondition("empty decomposition".into()));
    }
    let d = total.capacities.len();
    let mut sum = vec![Q::zero(); d];
    for part in decomposition {
        if part.capacities.len() != d {
            return Err(Error::Precondition(format!(
                "component {part} has {} capacities, expected {d}",
                part.capacities.len()
            )));
        }
        if part.rate >= total.rate {
            return Err(Error::Precondition(format!(
                "component {part} must have rate below the total rate {}",
                format_q(&total.rate)
            )));
        }
        for (s, c) in sum.iter_mut().zip(&part.capacities) {
            *s += c;
        }
    }
    if sum != total.capacities {
        return Err(Error::Precondition(
            "component capacities do not add up to the total".into(),
        ));
    }
    let lhs = decomposition.iter().fold(Q::zero(), |acc, p| {
        acc + (p.total_capacity() - &p.rate) / (&total.rate - &p.rate)
    });
    Ok(TwoSumVerdict {
        passed: lhs >= Q::one(),
        lhs,
    })
}

/// The larger region of multilevel diversity coding on a one-or-all
/// network: `r0 ≥ 0`, `0 ≤ r_k ≤ w_k` and `r0 + Σ r_k − max r_k ≤ Σ w_k`.
pub fn mdc_one_or_all_check(w: &[Q], r0: &Q, r: &[Q]) -> Result<bool> {
    if w.len() != r.len() {
        return Err(Error::Precondition("w and r differ in length".into()));
    }
    let basic = !r0.is_negative()
        && w.iter()
            .zip(r)
            .all(|(wk, rk)| !rk.is_negative() && rk <= wk);
    let sum_r = r.iter().fold(Q::zero(), |a, x| a + x);
    let sum_w = w.iter().fold(Q::zero(), |a, x| a + x);
    Ok(basic && r0 + sum_r - max_of(r) <= sum_w)
}
