//! Small dense exact simplex (two-phase, Bland's rule).
//!
//! Problems are solved first over `i128` fractions with overflow checks and
//! re-run over arbitrary-precision rationals if any operation overflows.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};

use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    /// Sparse `(variable, coefficient)` pairs.
    pub coeffs: Vec<(usize, Q)>,
    pub relation: Relation,
    pub rhs: Q,
}

/// `maximize objective·x` subject to `constraints` and `x ≥ 0`.
#[derive(Clone, Debug, Default)]
pub struct Problem {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
    /// Sparse objective; a pure feasibility problem when empty.
    pub objective: Vec<(usize, Q)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// No feasible point; `residual` is the minimal total violation found by
    /// phase one.
    Infeasible {
        residual: Q,
    },
    Optimal {
        x: Vec<Q>,
        value: Q,
    },
    Unbounded {
        x: Vec<Q>,
    },
}

impl Problem {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            ..Self::default()
        }
    }

    pub fn add(&mut self, coeffs: Vec<(usize, Q)>, relation: Relation, rhs: Q) {
        debug_assert!(coeffs.iter().all(|(j, _)| *j < self.num_vars));
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn solve(&self) -> Outcome {
        run::<Ratio<i128>>(self)
            .unwrap_or_else(|| run::<Q>(self).expect("big rationals do not overflow"))
    }
}

trait Field: Clone + PartialOrd + Sized {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn is_positive(&self) -> bool;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn div(&self, o: &Self) -> Option<Self>;
    fn from_q(q: &Q) -> Option<Self>;
    fn to_q(&self) -> Q;
}

impl Field for Ratio<i128> {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        self.checked_div(o)
    }
    fn from_q(q: &Q) -> Option<Self> {
        Some(Ratio::new_raw(q.numer().to_i128()?, q.denom().to_i128()?))
    }
    fn to_q(&self) -> Q {
        Q::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

impl Field for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        Some(self / o)
    }
    fn from_q(q: &Q) -> Option<Self> {
        Some(q.clone())
    }
    fn to_q(&self) -> Q {
        self.clone()
    }
}

struct Tableau<T> {
    /// Constraint rows; the last entry of each row is the right-hand side.
    rows: Vec<Vec<T>>,
    /// Reduced costs; the last entry is minus the current objective.
    cost: Vec<T>,
    basis: Vec<usize>,
    width: usize,
}

impl<T: Field> Tableau<T> {
    fn pivot(&mut self, r: usize, j: usize) -> Option<()> {
        let w = self.width;
        let p = self.rows[r][j].clone();
        let nz: Vec<usize> = (0..=w).filter(|&c| !self.rows[r][c].is_zero()).collect();
        for &c in &nz {
            self.rows[r][c] = self.rows[r][c].div(&p)?;
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<T>| -> Option<()> {
            let f = row[j].clone();
            if f.is_zero() {
                return Some(());
            }
            for &c in &nz {
                row[c] = row[c].sub(&f.mul(&pivot_row[c])?)?;
            }
            Some(())
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row)?;
            }
        }
        eliminate(&mut self.cost)?;
        self.basis[r] = j;
        Some(())
    }

    /// Runs Bland's rule over columns `< limit`. Returns `false` when
    /// the objective is unbounded.
    fn optimize(&mut self, limit: usize) -> Option<bool> {
        loop {
            let Some(j) = (0..limit).find(|&j| self.cost[j].is_negative()) else {
                return Some(true);
            };
            let mut best: Option<(usize, T)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[j].is_positive() {
                    continue;
                }
                let ratio = row[self.width].div(&row[j])?;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else {
                return Some(false);
            };
            self.pivot(r, j)?;
        }
    }

    fn solution(&self, n: usize) -> Vec<T> {
        let mut x = vec![T::zero(); n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.rows[i][self.width].clone();
            }
        }
        x
    }
}

fn run<T: Field>(p: &Problem) -> Option<Outcome> {
    let n = p.num_vars;
    let m = p.constraints.len();
    let slacks = p
        .constraints
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();
    let first_art = n + slacks;
    let width = first_art + m;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_slack = n;
    for (i, c) in p.constraints.iter().enumerate() {
        let mut row = vec![T::zero(); width + 1];
        let flip = Signed::is_negative(&c.rhs);
        let sign = |v: &Q| if flip { -v.clone() } else { v.clone() };
        for (j, v) in &c.coeffs {
            row[*j] = row[*j].add(&T::from_q(&sign(v))?)?;
        }
        row[width] = T::from_q(&sign(&c.rhs))?;
        let relation = match (c.relation, flip) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (r, _) => r,
        };
        let one = T::from_q(&Q::from_integer(1.into()))?;
        let minus_one = T::from_q(&Q::from_integer((-1).into()))?;
        match relation {
            Relation::Le => {
                row[next_slack] = one;
                basis.push(next_slack);
            }
            Relation::Ge => {
                row[next_slack] = minus_one;
                row[first_art + i] = one;
                basis.push(first_art + i);
            }
            Relation::Eq => {
                row[first_art + i] = one;
                basis.push(first_art + i);
            }
        }
        if c.relation != Relation::Eq {
            next_slack += 1;
        }
        rows.push(row);
    }

    // Phase one: minimize the sum of artificial variables.
    let mut cost = vec![T::zero(); width + 1];
    for (row, &b) in rows.iter().zip(&basis) {
        if b >= first_art {
            for c in (0..first_art).chain([width]) {
                if !row[c].is_zero() {
                    cost[c] = cost[c].sub(&row[c])?;
                }
            }
        }
    }
    let mut t = Tableau {
        rows,
        cost,
        basis,
        width,
    };
    t.optimize(first_art)?;
    let residual = t.cost[width].clone();
    if !residual.is_zero() {
        return Some(Outcome::Infeasible {
            residual: -residual.to_q(),
        });
    }

    // Drive remaining artificial variables out of the basis; rows where that
    // is impossible are redundant.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= first_art {
            if let Some(j) = (0..first_art).find(|&j| !t.rows[r][j].is_zero()) {
                t.pivot(r, j)?;
            } else {
                t.rows.remove(r);
                t.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }

    // Phase two: minimize -objective.
    let mut cost = vec![T::zero(); width + 1];
    for (j, v) in &p.objective {
        cost[*j] = cost[*j].sub(&T::from_q(v)?)?;
    }
    for (i, &b) in t.basis.iter().enumerate() {
        let cb = cost[b].clone();
        if cb.is_zero() {
            continue;
        }
        for (cc, a) in cost.iter_mut().zip(&t.rows[i]) {
            if !a.is_zero() {
                *cc = cc.sub(&cb.mul(a)?)?;
            }
        }
    }
    t.cost = cost;
    let bounded = t.optimize(first_art)?;
    let x: Vec<Q> = t.solution(n).iter().map(Field::to_q).collect();
    if !bounded {
        return Some(Outcome::Unbounded { x });
    }
    let value = p
        .objective
        .iter()
        .fold(<Q as Zero>::zero(), |acc, (j, v)| acc + v * &x[*j]);
    Some(Outcome::Optimal { x, value })
}
