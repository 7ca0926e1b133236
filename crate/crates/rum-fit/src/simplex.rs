//! Dense revised primal simplex for `min c.x  s.t.  A x = b, x >= 0`,
//! tailored to column generation: columns can be appended between solves and
//! the previous basis warm-starts the next solve.
//!
//! The basis inverse is kept explicitly (dense, m^2 doubles) and updated by
//! eta transformations per pivot, with Gauss-Jordan refactorization when
//! residual checks fail or enough pivots accumulate. Pricing is Dantzig with
//! a Bland's-rule fallback after a degenerate stall. Row duals come out as
//! `y = c_B B^-1`; with `>=` rows modeled as equality-plus-surplus, those
//! duals carry the usual sign convention (non-negative on `>=` rows of a
//! minimization) without any post-processing.

/// Pivot / reduced-cost tolerance.
pub const PIVOT_TOL: f64 = 1e-9;
/// Feasibility tolerance on basic values and residuals.
pub const FEAS_TOL: f64 = 1e-8;

const REFACTOR_INTERVAL: usize = 512;
const STALL_LIMIT: usize = 400;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SolveStatus {
    Optimal,
    Unbounded,
    NumericFailure,
}

#[derive(Clone, Debug)]
struct Column {
    entries: Vec<(usize, f64)>,
    cost: f64,
}

/// Incremental simplex instance. Rows are fixed at construction; columns
/// accumulate. A starting basis must be supplied once via [`Simplex::set_basis`].
#[derive(Clone, Debug)]
pub struct Simplex {
    m: usize,
    b: Vec<f64>,
    cols: Vec<Column>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    binv: Vec<f64>, // row-major m*m
    x_b: Vec<f64>,
    pivots_since_factor: usize,
    pivots_total: usize,
    has_basis: bool,
}

impl Simplex {
    pub fn new(b: Vec<f64>) -> Self {
        let m = b.len();
        Simplex {
            m,
            b,
            cols: Vec::new(),
            basis: Vec::new(),
            in_basis: Vec::new(),
            binv: Vec::new(),
            x_b: vec![0.0; m],
            pivots_since_factor: 0,
            pivots_total: 0,
            has_basis: false,
        }
    }

    pub fn num_rows(&self) -> usize {
        self.m
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    /// Appends a column; returns its index. Safe between solves.
    pub fn add_column(&mut self, entries: Vec<(usize, f64)>, cost: f64) -> usize {
        debug_assert!(entries.iter().all(|&(r, _)| r < self.m));
        self.cols.push(Column { entries, cost });
        self.in_basis.push(false);
        self.cols.len() - 1
    }

    /// Installs a starting basis (one column per row) and factorizes it.
    /// The corresponding basic solution must be primal feasible.
    pub fn set_basis(&mut self, basis: Vec<usize>) -> Result<(), &'static str> {
        assert_eq!(basis.len(), self.m, "basis must have one column per row");
        for flag in self.in_basis.iter_mut() {
            *flag = false;
        }
        for &j in &basis {
            self.in_basis[j] = true;
        }
        self.basis = basis;
        if !self.refactor() {
            self.has_basis = false;
            return Err("starting basis is singular");
        }
        self.compute_x_b();
        self.has_basis = true;
        Ok(())
    }

    fn refactor(&mut self) -> bool {
        let m = self.m;
        // Gauss-Jordan inversion of the basis matrix with partial pivoting,
        // done in an augmented [B | I] tableau.
        let mut mat = vec![0.0f64; m * m];
        for (r, &j) in self.basis.iter().enumerate() {
            // column r of B is the basis column for row slot r
            for &(row, val) in &self.cols[j].entries {
                mat[row * m + r] = val;
            }
        }
        let mut inv = vec![0.0f64; m * m];
        for r in 0..m {
            inv[r * m + r] = 1.0;
        }
        for col in 0..m {
            let mut piv = col;
            let mut best = mat[col * m + col].abs();
            for r in col + 1..m {
                let v = mat[r * m + col].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < 1e-12 {
                return false;
            }
            if piv != col {
                for c in 0..m {
                    mat.swap(piv * m + c, col * m + c);
                    inv.swap(piv * m + c, col * m + c);
                }
            }
            let d = mat[col * m + col];
            for c in 0..m {
                mat[col * m + c] /= d;
                inv[col * m + c] /= d;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = mat[r * m + col];
                if f == 0.0 {
                    continue;
                }
                for c in 0..m {
                    mat[r * m + c] -= f * mat[col * m + c];
                    inv[r * m + c] -= f * inv[col * m + c];
                }
            }
        }
        // inv now holds B^-1 in the same row/column convention as `mat`:
        // x_B = inv * rhs, with slot r of x_B belonging to basis[r].
        self.binv = inv;
        self.pivots_since_factor = 0;
        true
    }

    fn compute_x_b(&mut self) {
        let m = self.m;
        for r in 0..m {
            let row = &self.binv[r * m..(r + 1) * m];
            self.x_b[r] = row.iter().zip(&self.b).map(|(a, b)| a * b).sum();
        }
    }

    /// `B^-1 a_j` for a sparse column.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut u = vec![0.0f64; m];
        for &(row, val) in &self.cols[j].entries {
            for (r, uv) in u.iter_mut().enumerate() {
                *uv += self.binv[r * m + row] * val;
            }
        }
        u
    }

    /// Row duals `y = c_B B^-1`.
    pub fn duals(&self) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0f64; m];
        for (r, &j) in self.basis.iter().enumerate() {
            let cb = self.cols[j].cost;
            if cb == 0.0 {
                continue;
            }
            for (slot, yv) in y.iter_mut().enumerate() {
                *yv += cb * self.binv[r * m + slot];
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, y: &[f64]) -> f64 {
        let mut d = self.cols[j].cost;
        for &(row, val) in &self.cols[j].entries {
            d -= y[row] * val;
        }
        d
    }

    pub fn objective(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.x_b)
            .map(|(&j, &x)| self.cols[j].cost * x)
            .sum()
    }

    /// Values of all columns in the current basic solution.
    pub fn primal_values(&self) -> Vec<f64> {
        let mut x = vec![0.0f64; self.cols.len()];
        for (r, &j) in self.basis.iter().enumerate() {
            x[j] = self.x_b[r].max(0.0);
        }
        x
    }

    /// max |b - B x_B| over rows: primal residual of the factorized state.
    fn primal_residual(&self) -> f64 {
        let mut res = self.b.clone();
        for (r, &j) in self.basis.iter().enumerate() {
            let x = self.x_b[r];
            if x == 0.0 {
                continue;
            }
            for &(row, val) in &self.cols[j].entries {
                res[row] -= val * x;
            }
        }
        res.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// max |c_B - y B| over basic columns: dual residual.
    fn dual_residual(&self, y: &[f64]) -> f64 {
        self.basis
            .iter()
            .map(|&j| self.reduced_cost(j, y).abs())
            .fold(0.0f64, f64::max)
    }

    /// Primal simplex from the installed basis. Deterministic: Dantzig
    /// pricing with ties broken by lowest column index, switching to Bland's
    /// rule after a degenerate stall.
    pub fn solve(&mut self) -> SolveStatus {
        assert!(self.has_basis(), "set_basis must be called before solve");
        self.compute_x_b();
        let max_iterations = 200 * self.m + 100_000;
        let mut bland = false;
        let mut stall = 0usize;
        let mut refactor_retries = 0usize;
        // Duals are maintained incrementally across pivots (O(m) per pivot)
        // and recomputed from scratch at every refactorization.
        let mut y = self.duals();

        for _ in 0..max_iterations {
            // Pricing.
            let mut enter: Option<(usize, f64)> = None;
            for j in 0..self.cols.len() {
                if self.in_basis[j] {
                    continue;
                }
                let d = self.reduced_cost(j, &y);
                if d < -PIVOT_TOL {
                    if bland {
                        enter = Some((j, d));
                        break;
                    }
                    if enter.is_none_or(|(_, best)| d < best) {
                        enter = Some((j, d));
                    }
                }
            }

            let Some((q, d_q)) = enter else {
                // Candidate optimum: accept only if residuals are clean.
                let primal_res = self.primal_residual();
                let dual_res = self.dual_residual(&y);
                let feas = self.x_b.iter().fold(0.0f64, |acc, &v| acc.max(-v));
                let scale = 1.0 + self.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                if primal_res <= FEAS_TOL * scale && dual_res <= FEAS_TOL && feas <= FEAS_TOL {
                    return SolveStatus::Optimal;
                }
                if refactor_retries >= 2 {
                    return SolveStatus::NumericFailure;
                }
                refactor_retries += 1;
                if !self.refactor() {
                    return SolveStatus::NumericFailure;
                }
                self.compute_x_b();
                y = self.duals();
                continue;
            };

            // Ratio test.
            let u = self.ftran(q);
            let mut leave: Option<(usize, f64)> = None; // (row, ratio)
            for r in 0..self.m {
                if u[r] > PIVOT_TOL {
                    let ratio = self.x_b[r].max(0.0) / u[r];
                    match leave {
                        None => leave = Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - 1e-12 {
                                leave = Some((r, ratio));
                            } else if (ratio - lratio).abs() <= 1e-12 {
                                // Tie: Bland picks the smallest basic column
                                // index, Dantzig the largest pivot for
                                // stability (then the lowest row).
                                let better = if bland {
                                    self.basis[r] < self.basis[lr]
                                } else {
                                    u[r] > u[lr] + 1e-12
                                };
                                if better {
                                    leave = Some((r, ratio));
                                }
                            }
                        }
                    }
                }
            }
            let Some((lr, theta)) = leave else {
                return SolveStatus::Unbounded;
            };

            // Eta update of B^-1 and the basic values. The pivot row is
            // rescaled first and copied out so the remaining row updates are
            // clean non-aliasing axpys.
            let m = self.m;
            let pivot = u[lr];
            for v in &mut self.binv[lr * m..(lr + 1) * m] {
                *v /= pivot;
            }
            let pivot_row = self.binv[lr * m..(lr + 1) * m].to_vec();
            for (r, &ur) in u.iter().enumerate() {
                if r == lr || ur == 0.0 {
                    continue;
                }
                let row = &mut self.binv[r * m..(r + 1) * m];
                for (a, p) in row.iter_mut().zip(&pivot_row) {
                    *a -= ur * p;
                }
                self.x_b[r] -= theta * ur;
            }
            self.x_b[lr] = theta;
            // Dual update: y' = y + d_q * (new pivot row of B^-1).
            for (yv, p) in y.iter_mut().zip(&pivot_row) {
                *yv += d_q * p;
            }

            let old = self.basis[lr];
            self.in_basis[old] = false;
            self.in_basis[q] = true;
            self.basis[lr] = q;

            if theta <= 1e-12 {
                stall += 1;
                if stall > STALL_LIMIT {
                    bland = true;
                }
            } else {
                stall = 0;
                bland = false;
            }

            self.pivots_total += 1;
            self.pivots_since_factor += 1;
            if self.pivots_since_factor >= REFACTOR_INTERVAL {
                if !self.refactor() {
                    return SolveStatus::NumericFailure;
                }
                self.compute_x_b();
                y = self.duals();
            }
        }
        SolveStatus::NumericFailure
    }

    pub fn has_basis(&self) -> bool {
        self.has_basis
    }

    /// Pivots performed since construction (diagnostics).
    pub fn pivots(&self) -> usize {
        self.pivots_total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// min -x0 - 2 x1  s.t.  x0 + x1 + s0 = 4, x1 + s1 = 3  (x >= 0)
    /// Optimum: x0 = 1, x1 = 3, objective -7.
    #[test]
    fn small_inequality_lp() {
        let mut s = Simplex::new(vec![4.0, 3.0]);
        let x0 = s.add_column(vec![(0, 1.0)], -1.0);
        let x1 = s.add_column(vec![(0, 1.0), (1, 1.0)], -2.0);
        let s0 = s.add_column(vec![(0, 1.0)], 0.0);
        let s1 = s.add_column(vec![(1, 1.0)], 0.0);
        s.set_basis(vec![s0, s1]).unwrap();
        assert_eq!(s.solve(), SolveStatus::Optimal);
        assert!((s.objective() + 7.0).abs() < 1e-9);
        let x = s.primal_values();
        assert!((x[x0] - 1.0).abs() < 1e-9);
        assert!((x[x1] - 3.0).abs() < 1e-9);
        // Duals: y = (-1, -1); slack reduced costs are -y >= 0.
        let y = s.duals();
        assert!((y[0] + 1.0).abs() < 1e-9);
        assert!((y[1] + 1.0).abs() < 1e-9);
    }

    /// Unbounded: min -x0 with a single free direction.
    #[test]
    fn detects_unbounded() {
        let mut s = Simplex::new(vec![1.0]);
        let _x0 = s.add_column(vec![], -1.0); // no constraint rows touch x0
        let s0 = s.add_column(vec![(0, 1.0)], 0.0);
        s.set_basis(vec![s0]).unwrap();
        assert_eq!(s.solve(), SolveStatus::Unbounded);
    }

    /// Warm restart after adding an improving column.
    #[test]
    fn warm_start_improves_with_new_column() {
        let mut s = Simplex::new(vec![1.0]);
        let a = s.add_column(vec![(0, 1.0)], 2.0);
        s.set_basis(vec![a]).unwrap();
        assert_eq!(s.solve(), SolveStatus::Optimal);
        assert!((s.objective() - 2.0).abs() < 1e-9);
        let _b = s.add_column(vec![(0, 1.0)], 1.0);
        assert_eq!(s.solve(), SolveStatus::Optimal);
        assert!((s.objective() - 1.0).abs() < 1e-9);
    }

    /// Strong duality on a slightly larger random-ish system.
    #[test]
    fn duality_gap_closes() {
        let b = vec![2.0, 5.0, 3.0, 1.0];
        let mut s = Simplex::new(b.clone());
        let mut slacks = Vec::new();
        let cols: Vec<Vec<(usize, f64)>> = vec![
            vec![(0, 1.0), (1, 2.0)],
            vec![(0, 1.0), (2, 1.0), (3, 0.5)],
            vec![(1, 1.0), (2, 2.0)],
            vec![(1, 3.0), (3, 1.0)],
        ];
        let costs = [3.0, 1.0, 4.0, 2.5];
        for (entries, &cost) in cols.into_iter().zip(costs.iter()) {
            s.add_column(entries, cost);
        }
        for r in 0..4 {
            slacks.push(s.add_column(vec![(r, 1.0)], 10.0)); // costly slacks force structure
        }
        s.set_basis(slacks).unwrap();
        assert_eq!(s.solve(), SolveStatus::Optimal);
        let y = s.duals();
        let dual_obj: f64 = y.iter().zip(&b).map(|(a, c)| a * c).sum();
        assert!((s.objective() - dual_obj).abs() < 1e-7);
    }
}
