//! Exact-rational two-phase simplex with Bland's anti-cycling rule.
//!
//! Problems are `minimize c·x` subject to rows `a·x (<=|>=|=) b` and `x >= 0`.

use num_traits::{One, Signed, Zero};

use crate::num::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub rel: Rel,
    pub rhs: Q,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpResult {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

impl LpResult {
    pub fn optimal(&self) -> Option<(&[Q], &Q)> {
        match self {
            LpResult::Optimal { x, value } => Some((x, value)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Lp {
    pub nvars: usize,
    pub objective: Vec<Q>,
    pub rows: Vec<Constraint>,
}

impl Lp {
    pub fn new(nvars: usize) -> Lp {
        Lp { nvars, objective: vec![Q::zero(); nvars], rows: Vec::new() }
    }

    pub fn minimize(mut self, c: Vec<Q>) -> Lp {
        assert_eq!(c.len(), self.nvars);
        self.objective = c;
        self
    }

    pub fn push(&mut self, coeffs: Vec<Q>, rel: Rel, rhs: Q) {
        assert_eq!(coeffs.len(), self.nvars);
        self.rows.push(Constraint { coeffs, rel, rhs });
    }

    pub fn solve(&self) -> LpResult {
        Tableau::build(self).run(&self.objective)
    }
}

struct Tableau {
    /// rows × (cols + 1); the last column is the right-hand side.
    t: Vec<Vec<Q>>,
    basis: Vec<usize>,
    nvars: usize,
    ncols: usize,
    artificial_from: usize,
}

impl Tableau {
    fn build(lp: &Lp) -> Tableau {
        let m = lp.rows.len();
        let mut rows: Vec<(Vec<Q>, Rel, Q)> = lp
            .rows
            .iter()
            .map(|r| {
                if r.rhs.is_negative() {
                    let rel = match r.rel {
                        Rel::Le => Rel::Ge,
                        Rel::Ge => Rel::Le,
                        Rel::Eq => Rel::Eq,
                    };
                    (r.coeffs.iter().map(|x| -x.clone()).collect(), rel, -r.rhs.clone())
                } else {
                    (r.coeffs.clone(), r.rel, r.rhs.clone())
                }
            })
            .collect();
        let nslack = rows.iter().filter(|r| r.1 != Rel::Eq).count();
        let nart = rows.iter().filter(|r| r.1 != Rel::Le).count();
        let ncols = lp.nvars + nslack + nart;
        let artificial_from = lp.nvars + nslack;
        let mut t = vec![vec![Q::zero(); ncols + 1]; m];
        let mut basis = vec![0; m];
        let (mut s, mut a) = (lp.nvars, artificial_from);
        for (k, (coeffs, rel, rhs)) in rows.iter_mut().enumerate() {
            for (j, x) in coeffs.iter().enumerate() {
                t[k][j] = x.clone();
            }
            t[k][ncols] = rhs.clone();
            match rel {
                Rel::Le => {
                    t[k][s] = Q::one();
                    basis[k] = s;
                    s += 1;
                }
                Rel::Ge => {
                    t[k][s] = -Q::one();
                    s += 1;
                    t[k][a] = Q::one();
                    basis[k] = a;
                    a += 1;
                }
                Rel::Eq => {
                    t[k][a] = Q::one();
                    basis[k] = a;
                    a += 1;
                }
            }
        }
        Tableau { t, basis, nvars: lp.nvars, ncols, artificial_from }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        for x in self.t[r].iter_mut() {
            *x /= &p;
        }
        let row = self.t[r].clone();
        for (k, line) in self.t.iter_mut().enumerate() {
            if k == r || line[c].is_zero() {
                continue;
            }
            let f = line[c].clone();
            for (x, y) in line.iter_mut().zip(&row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs of `cost` (indexed by column) for the current basis.
    fn reduced(&self, cost: &[Q], usable: usize) -> Vec<Q> {
        let mut red: Vec<Q> = cost[..usable].to_vec();
        for (k, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (j, r) in red.iter_mut().enumerate() {
                if !self.t[k][j].is_zero() {
                    *r -= cb * &self.t[k][j];
                }
            }
        }
        red
    }

    /// Bland's rule iterations over columns `< usable`. Returns false if unbounded.
    fn optimize(&mut self, cost: &[Q], usable: usize) -> bool {
        loop {
            let red = self.reduced(cost, usable);
            let Some(enter) = (0..usable).find(|&j| red[j].is_negative()) else {
                return true;
            };
            let rhs = self.ncols;
            let mut leave: Option<(usize, Q)> = None;
            for k in 0..self.t.len() {
                let a = &self.t[k][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.t[k][rhs] / a;
                let better = match &leave {
                    None => true,
                    Some((lk, lr)) => ratio < *lr || (ratio == *lr && self.basis[k] < self.basis[*lk]),
                };
                if better {
                    leave = Some((k, ratio));
                }
            }
            match leave {
                None => return false,
                Some((k, _)) => self.pivot(k, enter),
            }
        }
    }

    fn run(mut self, objective: &[Q]) -> LpResult {
        let rhs = self.ncols;
        if self.artificial_from < self.ncols {
            let mut cost = vec![Q::zero(); self.ncols];
            for c in cost.iter_mut().skip(self.artificial_from) {
                *c = Q::one();
            }
            self.optimize(&cost, self.ncols);
            let infeas: Q = self
                .basis
                .iter()
                .enumerate()
                .filter(|(_, &b)| b >= self.artificial_from)
                .map(|(k, _)| self.t[k][rhs].clone())
                .sum();
            if infeas.is_positive() {
                return LpResult::Infeasible;
            }
            // Drive zero-valued artificials out of the basis; drop redundant rows.
            let mut k = 0;
            while k < self.t.len() {
                if self.basis[k] >= self.artificial_from {
                    match (0..self.artificial_from).find(|&j| !self.t[k][j].is_zero()) {
                        Some(j) => {
                            self.pivot(k, j);
                            k += 1;
                        }
                        None => {
                            self.t.remove(k);
                            self.basis.remove(k);
                        }
                    }
                } else {
                    k += 1;
                }
            }
        }
        let mut cost = vec![Q::zero(); self.ncols];
        cost[..self.nvars].clone_from_slice(objective);
        if !self.optimize(&cost, self.artificial_from) {
            return LpResult::Unbounded;
        }
        let mut x = vec![Q::zero(); self.nvars];
        for (k, &b) in self.basis.iter().enumerate() {
            if b < self.nvars {
                x[b] = self.t[k][rhs].clone();
            }
        }
        let value = x.iter().zip(objective).map(|(a, b)| a * b).sum();
        LpResult::Optimal { x, value }
    }
}
