//! Dense two-phase simplex for small linear programs in standard form
//! `min c·λ  s.t.  A λ = b, λ >= 0`. Bland's rule keeps degenerate problems
//! from cycling.

use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, solution: Vec<f64> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * (self.cols + 1) + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.data[r * (self.cols + 1) + self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize, cost: &mut [f64]) {
        let w = self.cols + 1;
        let p = self.at(pr, pc);
        for c in 0..w {
            self.data[pr * w + c] /= p;
        }
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let f = self.at(r, pc);
            if f != 0.0 {
                for c in 0..w {
                    self.data[r * w + c] -= f * self.data[pr * w + c];
                }
            }
        }
        let f = cost[pc];
        if f != 0.0 {
            for c in 0..w {
                cost[c] -= f * self.data[pr * w + c];
            }
        }
        self.basis[pr] = pc;
    }

    /// Runs simplex iterations on the reduced-cost row `cost` (last entry is
    /// minus the objective). Columns `>= allowed` never enter.
    fn optimize(&mut self, cost: &mut [f64], allowed: usize, eps: f64) -> bool {
        loop {
            let Some(pc) = (0..allowed).find(|&c| cost[c] < -eps) else {
                return true;
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > eps {
                    let ratio = self.rhs(r) / a;
                    let better = match best {
                        None => true,
                        Some((br, _, bb)) => ratio < br - eps || (ratio <= br + eps && self.basis[r] < bb),
                    };
                    if better {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            match best {
                Some((_, pr, _)) => self.pivot(pr, pc, cost),
                None => return false,
            }
        }
    }
}

/// Solves `min c·λ` subject to `A λ = b`, `λ >= 0`, with `A` given as rows.
pub fn minimize(a_rows: &[Vec<f64>], b: &[f64], c: &[f64]) -> LpOutcome {
    let m = a_rows.len();
    let n = c.len();
    let cols = n + m;
    let w = cols + 1;
    let mut data = alloc::vec![0.0; m * w];
    let scale = a_rows
        .iter()
        .flatten()
        .chain(b.iter())
        .fold(1.0_f64, |s, v| s.max(v.abs()));
    for r in 0..m {
        let sign = if b[r] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            data[r * w + j] = sign * a_rows[r][j];
        }
        data[r * w + n + r] = 1.0;
        data[r * w + cols] = sign * b[r];
    }
    let mut t = Tableau {
        rows: m,
        cols,
        data,
        basis: (n..n + m).collect(),
    };
    let eps = 1e-12 * scale;

    // phase 1: minimize the sum of artificials
    let mut cost = alloc::vec![0.0; w];
    for r in 0..m {
        for c in 0..w {
            if c < n || c == cols {
                cost[c] -= t.at(r, c);
            }
        }
    }
    t.optimize(&mut cost, n, eps);
    if -cost[cols] > 1e-9 * scale {
        return LpOutcome::Infeasible;
    }
    // drive zero-level artificials out of the basis when possible
    for r in 0..m {
        if t.basis[r] >= n {
            if let Some(pc) = (0..n).find(|&j| t.at(r, j).abs() > eps) {
                let mut dummy = alloc::vec![0.0; w];
                t.pivot(r, pc, &mut dummy);
            }
        }
    }

    // phase 2
    let mut cost = alloc::vec![0.0; w];
    cost[..n].copy_from_slice(c);
    for r in 0..m {
        let bj = t.basis[r];
        let cb = if bj < n { c[bj] } else { 0.0 };
        if cb != 0.0 {
            for col in 0..w {
                cost[col] -= cb * t.at(r, col);
            }
        }
    }
    let ceps = 1e-12 * c.iter().fold(1.0_f64, |s, v| s.max(v.abs()));
    if !t.optimize(&mut cost, n, ceps) {
        return LpOutcome::Unbounded;
    }
    let mut solution = alloc::vec![0.0; n];
    for r in 0..m {
        if t.basis[r] < n {
            solution[t.basis[r]] = t.rhs(r);
        }
    }
    let value = solution.iter().zip(c).map(|(x, ci)| x * ci).sum();
    LpOutcome::Optimal { value, solution }
}
