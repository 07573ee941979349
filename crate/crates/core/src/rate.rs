//! Monotone step functions: rate-capacity curves `r(c)` and the code
//! parameter `g(α)`, plus the sampling distribution a superposition code
//! derives from `g`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{format_q, serde_q, to_f64, Q};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Right-continuous and nondecreasing; zero below the first breakpoint.
    Increasing,
    /// Left-continuous and nonincreasing; zero after the last breakpoint.
    Decreasing,
}

/// A monotone piecewise-constant function on `[0, ∞)`.
///
/// * `Increasing`: `f(x) = values[m]` for `breakpoints[m] ≤ x < breakpoints[m+1]`
///   and `0` for `x < breakpoints[0]`.
/// * `Decreasing`: `f(x) = values[m]` for `breakpoints[m-1] < x ≤ breakpoints[m]`
///   (with an implicit breakpoint at `0`) and `0` past the last breakpoint.
///   A decreasing function may carry one extra trailing value, which is its
///   constant value on the unbounded tail.
///
/// Construction canonicalizes: adjacent equal pieces merge and zero pieces at
/// the outer end are dropped, so equal functions compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawStep", into = "RawStep")]
pub struct StepFunction {
    direction: Direction,
    breakpoints: Vec<Q>,
    values: Vec<Q>,
    tail: Q,
}

#[derive(Serialize, Deserialize)]
struct RawStep {
    direction: Direction,
    #[serde(with = "serde_q::vec")]
    breakpoints: Vec<Q>,
    #[serde(with = "serde_q::vec")]
    values: Vec<Q>,
}

impl TryFrom<RawStep> for StepFunction {
    type Error = Error;

    fn try_from(raw: RawStep) -> Result<Self> {
        StepFunction::new(raw.direction, raw.breakpoints, raw.values)
    }
}

impl From<StepFunction> for RawStep {
    fn from(f: StepFunction) -> Self {
        let mut values = f.values;
        if !f.tail.is_zero() {
            values.push(f.tail);
        }
        RawStep {
            direction: f.direction,
            breakpoints: f.breakpoints,
            values,
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidStepFunction(msg.into())
}

impl StepFunction {
    pub fn new(direction: Direction, breakpoints: Vec<Q>, mut values: Vec<Q>) -> Result<Self> {
        let mut tail = Q::zero();
        match direction {
            Direction::Increasing if values.len() != breakpoints.len() => {
                return Err(invalid(
                    "increasing function needs one value per breakpoint",
                ));
            }
            Direction::Decreasing if values.len() == breakpoints.len() + 1 => {
                tail = values.pop().expect("nonempty");
            }
            Direction::Decreasing if values.len() != breakpoints.len() => {
                return Err(invalid(
                    "decreasing function needs one value per breakpoint, plus an optional tail",
                ));
            }
            _ => {}
        }
        if values.iter().chain([&tail]).any(|v| v < &Q::zero()) {
            return Err(invalid("values must be nonnegative"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("breakpoints must be strictly increasing"));
        }
        if breakpoints.first().is_some_and(|b| b <= &Q::zero()) {
            return Err(invalid("breakpoints must be positive"));
        }
        let monotone = match direction {
            Direction::Increasing => values.windows(2).all(|w| w[0] <= w[1]),
            Direction::Decreasing => {
                values.windows(2).all(|w| w[0] >= w[1]) && values.last().is_none_or(|v| v >= &tail)
            }
        };
        if !monotone {
            return Err(invalid(format!("values are not {direction:?}")));
        }

        // Canonical form.
        let (mut bps, mut vals) = (Vec::new(), Vec::<Q>::new());
        match direction {
            Direction::Increasing => {
                for (b, v) in breakpoints.into_iter().zip(values) {
                    let prev = vals.last().cloned().unwrap_or_else(Q::zero);
                    if v != prev {
                        bps.push(b);
                        vals.push(v);
                    }
                }
            }
            Direction::Decreasing => {
                for (b, v) in breakpoints.into_iter().zip(values) {
                    if vals.last() == Some(&v) {
                        *bps.last_mut().expect("paired") = b;
                    } else {
                        bps.push(b);
                        vals.push(v);
                    }
                }
                while vals.last() == Some(&tail) {
                    vals.pop();
                    bps.pop();
                }
            }
        }
        Ok(Self {
            direction,
            breakpoints: bps,
            values: vals,
            tail,
        })
    }

    /// The zero function of the given direction.
    pub fn zero(direction: Direction) -> Self {
        Self {
            direction,
            breakpoints: Vec::new(),
            values: Vec::new(),
            tail: Q::zero(),
        }
    }

    /// `r` with one step of height `K/L` at capacity `K/L`.
    pub fn blockwise_rate(k: u64, l: u64) -> Self {
        let x = ratio(k, l);
        Self::new(Direction::Increasing, vec![x.clone()], vec![x]).expect("valid")
    }

    /// `g = L/K` on `(0, K/L]`.
    pub fn blockwise_g(k: u64, l: u64) -> Self {
        Self::new(Direction::Decreasing, vec![ratio(k, l)], vec![ratio(l, k)]).expect("valid")
    }

    /// Rate-capacity function of two time-multiplexed blockwise codes.
    pub fn multiplexed_rate(k: u64, l1: u64, l2: u64) -> Self {
        Self::new(
            Direction::Increasing,
            vec![ratio(k, l1 + l2), ratio(k, l1)],
            vec![ratio(k, 2 * l2), ratio(k, 2 * l1)],
        )
        .expect("valid")
    }

    /// Parameter of two time-multiplexed blockwise codes.
    pub fn multiplexed_g(k: u64, l1: u64, l2: u64) -> Self {
        Self::new(
            Direction::Decreasing,
            vec![ratio(k, 2 * l2), ratio(k, 2 * l1)],
            vec![ratio(l1 + l2, k), ratio(l1, k)],
        )
        .expect("valid")
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn breakpoints(&self) -> &[Q] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    /// Value on the unbounded tail; zero unless a decreasing function was
    /// built with a trailing value.
    pub fn tail(&self) -> &Q {
        &self.tail
    }

    pub fn has_bounded_support(&self) -> bool {
        self.tail.is_zero()
    }

    /// Upper bound of a decreasing function (its first value).
    pub fn sup(&self) -> Q {
        match self.direction {
            Direction::Decreasing => self.values.first().unwrap_or(&self.tail).clone(),
            Direction::Increasing => self.values.last().cloned().unwrap_or_else(Q::zero),
        }
    }

    pub fn eval(&self, x: &Q) -> Q {
        match self.direction {
            Direction::Increasing => {
                let n = self.breakpoints.partition_point(|b| b <= x);
                if n == 0 {
                    Q::zero()
                } else {
                    self.values[n - 1].clone()
                }
            }
            Direction::Decreasing => {
                let n = self.breakpoints.partition_point(|b| b < x);
                self.values.get(n).unwrap_or(&self.tail).clone()
            }
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        match self.direction {
            Direction::Increasing => {
                let n = self.breakpoints.partition_point(|b| to_f64(b) <= x);
                if n == 0 {
                    0.0
                } else {
                    to_f64(&self.values[n - 1])
                }
            }
            Direction::Decreasing => {
                let n = self.breakpoints.partition_point(|b| to_f64(b) < x);
                to_f64(self.values.get(n).unwrap_or(&self.tail))
            }
        }
    }

    /// `f(x⁺)` for a decreasing function.
    pub fn right_limit(&self, x: &Q) -> Q {
        let n = self.breakpoints.partition_point(|b| b <= x);
        self.values.get(n).unwrap_or(&self.tail).clone()
    }

    /// `∫₀^∞ f` for a decreasing function with bounded support.
    pub fn integral(&self) -> Result<Q> {
        self.expect_direction(Direction::Decreasing)?;
        if !self.has_bounded_support() {
            return Err(invalid("integral of a function with unbounded support"));
        }
        Ok(self.integral_to(self.breakpoints.last().unwrap_or(&Q::zero())))
    }

    /// `∫₀^x f` for a decreasing function.
    pub fn integral_to(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        let mut left = Q::zero();
        for (b, v) in self.breakpoints.iter().zip(&self.values) {
            if b >= x {
                return acc + v * (x - &left);
            }
            acc += v * (b - &left);
            left = b.clone();
        }
        if x > &left {
            acc += &self.tail * (x - &left);
        }
        acc
    }

    fn expect_direction(&self, want: Direction) -> Result<()> {
        if self.direction == want {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "expected a {want:?} step function"
            )))
        }
    }

    fn expect_unit_mass(&self) -> Result<()> {
        let total = self.integral()?;
        if total.is_one() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "parameter must integrate to 1, got {}",
                format_q(&total)
            )))
        }
    }
}

fn ratio(a: u64, b: u64) -> Q {
    Q::new(a.into(), b.into())
}

/// Distribution of per-symbol rates induced by a parameter `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplingAtoms {
    atoms: Vec<(Q, Q)>,
}

impl SamplingAtoms {
    /// `(rate, probability)` pairs with strictly increasing rates.
    pub fn atoms(&self) -> &[(Q, Q)] {
        &self.atoms
    }

    /// Cumulative probability up to and including `alpha`.
    pub fn cdf(&self, alpha: &Q) -> Q {
        self.atoms
            .iter()
            .take_while(|(a, _)| a <= alpha)
            .fold(Q::zero(), |acc, (_, p)| acc + p)
    }
}

/// `F_A(α) = ∫₀^α g − α·g(α⁺)`, the right-continuous CDF of the rate
/// drawn for each symbol.
pub fn fa_cdf(g: &StepFunction, alpha: &Q) -> Result<Q> {
    g.expect_unit_mass()?;
    if alpha <= &Q::zero() {
        return Ok(Q::zero());
    }
    Ok(g.integral_to(alpha) - alpha * g.right_limit(alpha))
}

/// One atom per downward jump of `g`, of mass `α·(g(α) − g(α⁺))`.
pub fn sampling_atoms(g: &StepFunction) -> Result<SamplingAtoms> {
    g.expect_direction(Direction::Decreasing)?;
    if !g.has_bounded_support() {
        return Err(invalid(
            "cannot sample from a parameter with unbounded support",
        ));
    }
    g.expect_unit_mass()?;
    let n = g.values.len();
    let atoms = (0..n)
        .map(|m| {
            let next = g.values.get(m + 1).cloned().unwrap_or_else(Q::zero);
            let b = g.breakpoints[m].clone();
            let mass = &b * (&g.values[m] - next);
            (b, mass)
        })
        .collect();
    Ok(SamplingAtoms { atoms })
}

/// `inf { c : r(c) ≥ α }`.
pub fn inverse_rate(r: &StepFunction, alpha: &Q) -> Result<Q> {
    r.expect_direction(Direction::Increasing)?;
    if alpha <= &Q::zero() {
        return Err(Error::Precondition("rate must be positive".into()));
    }
    let top = r.eval(&Q::one());
    if alpha > &top {
        return Err(Error::NoCapacity(format_q(alpha)));
    }
    let m = r.values.partition_point(|v| v < alpha);
    Ok(r.breakpoints[m].clone())
}

/// Steps of `r` on capacities in `(0, 1]` as `(capacity, jump)` pairs.
fn steps_in_unit(r: &StepFunction) -> impl Iterator<Item = (&Q, Q)> {
    let one = Q::one();
    let mut prev = Q::zero();
    r.breakpoints
        .iter()
        .zip(&r.values)
        .take_while(move |(c, _)| *c <= &one)
        .map(move |(c, v)| {
            let jump = v - &prev;
            prev = v.clone();
            (c, jump)
        })
}

/// The Stieltjes sum `∫₀¹ (1/c) dr(c)`; `r` is achievable iff it is ≤ 1.
pub fn integral_check(r: &StepFunction) -> Result<Q> {
    r.expect_direction(Direction::Increasing)?;
    Ok(steps_in_unit(r).fold(Q::zero(), |acc, (c, jump)| acc + jump / c))
}

/// `g(α) = 1 / r⁻¹(α)` for `α ≤ r(1)` and zero beyond.
pub fn optimal_g(r: &StepFunction) -> Result<StepFunction> {
    let total = integral_check(r)?;
    if total > Q::one() {
        return Err(Error::Precondition(format!(
            "rate function is not achievable: integral {} > 1",
            format_q(&total)
        )));
    }
    let (bps, vals): (Vec<Q>, Vec<Q>) = r
        .breakpoints
        .iter()
        .zip(&r.values)
        .take_while(|(c, _)| *c <= &Q::one())
        .map(|(c, v)| (v.clone(), c.recip()))
        .unzip();
    StepFunction::new(Direction::Decreasing, bps, vals)
}

/// Rate-capacity function of a single-transmitter superposition code:
/// `r(c) = sup { α : c·g(α) ≥ 1 }`, restricted to capacities in `(0, 1]`.
pub fn achieved_rate(g: &StepFunction) -> Result<StepFunction> {
    g.expect_direction(Direction::Decreasing)?;
    if !g.has_bounded_support() {
        return Err(invalid("parameter with unbounded support"));
    }
    let (bps, vals): (Vec<Q>, Vec<Q>) = g
        .breakpoints
        .iter()
        .zip(&g.values)
        .map(|(b, v)| (v.recip(), b.clone()))
        .filter(|(c, _)| c <= &Q::one())
        .unzip();
    StepFunction::new(Direction::Increasing, bps, vals)
}
