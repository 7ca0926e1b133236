//! The restricted primal LP over a finite permutation support, and the dual
//! values consumed by the separation oracle.
//!
//! For winner table entries `D_S(i)` and support `P`, the primal assigns a
//! probability `p_pi` per support permutation and an error variable
//! `eps_{S,i}` per slate member:
//!
//! ```text
//! min (1/|S|) sum eps_{S,i}
//!     eps_{S,i} + sum_{pi in P, pi(S)=i} p_pi >= D_S(i)     (L_{S,i})
//!     eps_{S,i} - sum_{pi in P, pi(S)=i} p_pi >= -D_S(i)    (U_{S,i})
//!     sum p_pi = 1                                          (norm)
//!     eps, p >= 0
//! ```
//!
//! Row duals give the dual solution of the equivalent box form: `D` is the
//! dual of the normalization row and `Delta_{S,i}` = dual(U) - dual(L), with
//! `|Delta| <= 1/|S|` and `sum_S Delta_{S,pi(S)} >= D` for every support
//! permutation at optimality.

use crate::error::{Error, Result};
use crate::model::{Permutation, Slate, WinnerTable};
use crate::simplex::{Simplex, SolveStatus};
use std::io::{self, Write};

/// Outcome classification of an LP solve.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericFailure,
}

/// Primal/dual values of one restricted solve. Pairs `(slate s, member j)`
/// are flattened as `s * k + j`, matching the table's canonical slate order.
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// `(1/|S|) * sum eps` at the optimum.
    pub objective: f64,
    /// Error variable per (slate, member) pair.
    pub eps: Vec<f64>,
    /// Probability per support permutation.
    pub support_probs: Vec<f64>,
    /// Dual of each `L_{S,i}` row (non-negative).
    pub lower_duals: Vec<f64>,
    /// Dual of each `U_{S,i}` row (non-negative).
    pub upper_duals: Vec<f64>,
    /// Dual of the normalization row (the paper's `D`; sign-free).
    pub normalization_dual: f64,
}

/// The paper-facing dual certificate.
#[derive(Clone, Debug)]
pub struct DualSolution {
    /// Dual of the normalization row.
    pub d: f64,
    /// `Delta_{S,i}` per slate (table order), aligned with slate members.
    pub delta: Vec<Vec<f64>>,
    /// Value of this dual solution, `d - sum D_S(i) * Delta_{S,i}`; equals
    /// the primal objective at optimality.
    pub objective: f64,
}

impl DualSolution {
    /// `sum_S Delta_{S, pi(S)}` — the left side of pi's dual constraint.
    pub fn constraint_value(&self, slates: &[Slate], pi: &Permutation) -> f64 {
        slates
            .iter()
            .zip(&self.delta)
            .map(|(s, d)| {
                let w = pi.winner(s);
                d[s.member_index(w).expect("winner in slate")]
            })
            .sum()
    }
}

/// Restricted primal LP with an incrementally growing support. Keeps the
/// simplex basis between solves so column generation re-solves cheaply.
pub struct RestrictedLp {
    n: usize,
    k: usize,
    slates: Vec<Slate>,
    dist: Vec<Vec<f64>>,
    support: Vec<Permutation>,
    /// Per support permutation: winner member index per slate.
    winners: Vec<Vec<u8>>,
    simplex: Simplex,
    started: bool,
}

impl RestrictedLp {
    /// Builds the LP for `table` restricted to `support` (nonempty, distinct
    /// permutations over the table's universe).
    pub fn new(table: &WinnerTable, support: Vec<Permutation>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::invalid("support must be nonempty"));
        }
        let n = table.n();
        let k = table.k();
        let slates: Vec<Slate> = table.entries().iter().map(|(s, _)| s.clone()).collect();
        let dist: Vec<Vec<f64>> = table.entries().iter().map(|(_, d)| d.clone()).collect();
        let pairs = slates.len() * k;

        // Rows: L pairs, U pairs, then the normalization row.
        let mut b = Vec::with_capacity(2 * pairs + 1);
        for d in &dist {
            b.extend(d.iter().copied());
        }
        for d in &dist {
            b.extend(d.iter().map(|v| -v));
        }
        b.push(1.0);
        let mut simplex = Simplex::new(b);

        let unit_cost = 1.0 / slates.len() as f64;
        for p in 0..pairs {
            simplex.add_column(vec![(p, 1.0), (pairs + p, 1.0)], unit_cost); // eps
        }
        for p in 0..pairs {
            simplex.add_column(vec![(p, -1.0)], 0.0); // surplus of L row
        }
        for p in 0..pairs {
            simplex.add_column(vec![(pairs + p, -1.0)], 0.0); // surplus of U row
        }

        let mut lp = RestrictedLp {
            n,
            k,
            slates,
            dist,
            support: Vec::new(),
            winners: Vec::new(),
            simplex,
            started: false,
        };
        for pi in support {
            lp.add_support(pi)?;
        }
        Ok(lp)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn slates(&self) -> &[Slate] {
        &self.slates
    }

    pub fn distributions(&self) -> &[Vec<f64>] {
        &self.dist
    }

    pub fn support(&self) -> &[Permutation] {
        &self.support
    }

    pub fn num_eps_vars(&self) -> usize {
        self.slates.len() * self.k
    }

    /// Rows of the primal: one L and one U per (slate, member), plus the
    /// normalization row.
    pub fn num_rows(&self) -> usize {
        2 * self.num_eps_vars() + 1
    }

    /// Simplex pivots performed so far (diagnostics).
    pub fn pivots(&self) -> usize {
        self.simplex.pivots()
    }

    pub fn contains(&self, pi: &Permutation) -> bool {
        self.support.iter().any(|q| q.order() == pi.order())
    }

    /// Appends a support permutation (and its column) to the LP.
    pub fn add_support(&mut self, pi: Permutation) -> Result<()> {
        if pi.n() != self.n {
            return Err(Error::invalid("support permutation universe mismatch"));
        }
        if self.contains(&pi) {
            return Err(Error::invalid("support permutation already present"));
        }
        let pairs = self.num_eps_vars();
        let mut winners = Vec::with_capacity(self.slates.len());
        let mut entries = Vec::with_capacity(2 * self.slates.len() + 1);
        for (s, slate) in self.slates.iter().enumerate() {
            let w = pi.winner(slate);
            let j = slate.member_index(w).expect("winner in slate");
            winners.push(j as u8);
            let pair = s * self.k + j;
            entries.push((pair, 1.0));
            entries.push((pairs + pair, -1.0));
        }
        entries.push((2 * pairs, 1.0));
        entries.sort_by_key(|&(r, _)| r);
        self.simplex.add_column(entries, 0.0);
        self.support.push(pi);
        self.winners.push(winners);
        Ok(())
    }

    /// Feasible starting basis: puts all probability on the first support
    /// permutation; each pair's eps plus the surplus of its slack row enter
    /// the basis alongside it.
    fn install_crash_basis(&mut self) -> Result<()> {
        let pairs = self.num_eps_vars();
        let mut basis = Vec::with_capacity(2 * pairs + 1);
        for (s, dist) in self.dist.iter().enumerate() {
            for (j, &d) in dist.iter().enumerate() {
                let pair = s * self.k + j;
                let q = if usize::from(self.winners[0][s]) == j {
                    1.0
                } else {
                    0.0
                };
                basis.push(pair); // eps
                if q <= d {
                    basis.push(2 * pairs + pair); // surplus of U row
                } else {
                    basis.push(pairs + pair); // surplus of L row
                }
            }
        }
        basis.push(3 * pairs); // p of support[0]
        self.simplex
            .set_basis(basis)
            .map_err(|e| Error::Solver(e.to_string()))?;
        self.started = true;
        Ok(())
    }

    /// Solves (warm-starting from the previous basis when present) and
    /// returns the primal/dual values.
    pub fn solve(&mut self) -> Result<LpSolution> {
        if !self.started {
            self.install_crash_basis()?;
        }
        let status = match self.simplex.solve() {
            SolveStatus::Optimal => LpStatus::Optimal,
            SolveStatus::Unbounded => LpStatus::Unbounded,
            SolveStatus::NumericFailure => LpStatus::NumericFailure,
        };
        let pairs = self.num_eps_vars();
        let x = self.simplex.primal_values();
        let y = self.simplex.duals();
        let eps = x[..pairs].to_vec();
        let support_probs = x[3 * pairs..].to_vec();
        Ok(LpSolution {
            status,
            objective: self.simplex.objective(),
            eps,
            support_probs,
            lower_duals: y[..pairs].to_vec(),
            upper_duals: y[pairs..2 * pairs].to_vec(),
            normalization_dual: y[2 * pairs],
        })
    }

    /// `Delta_{S,i} = dual(U_{S,i}) - dual(L_{S,i})` and `D`, packaged with
    /// the dual objective value.
    pub fn extract_dual(&self, sol: &LpSolution) -> Result<DualSolution> {
        if sol.status != LpStatus::Optimal {
            return Err(Error::Solver(format!(
                "dual extraction requires an optimal solve, got {:?}",
                sol.status
            )));
        }
        let mut delta = Vec::with_capacity(self.slates.len());
        let mut dual_obj = sol.normalization_dual;
        for (s, dist) in self.dist.iter().enumerate() {
            let mut row = Vec::with_capacity(self.k);
            for (j, &d_val) in dist.iter().enumerate() {
                let pair = s * self.k + j;
                let dv = sol.upper_duals[pair] - sol.lower_duals[pair];
                dual_obj -= d_val * dv;
                row.push(dv);
            }
            delta.push(row);
        }
        Ok(DualSolution {
            d: sol.normalization_dual,
            delta,
            objective: dual_obj,
        })
    }

    /// The RUM defined by a solve's support probabilities, with entries at or
    /// below `prune` dropped and the rest renormalized.
    pub fn rum_from(&self, sol: &LpSolution, prune: f64) -> Result<crate::model::Rum> {
        let mut support: Vec<(Permutation, f64)> = self
            .support
            .iter()
            .zip(&sol.support_probs)
            .filter(|(_, &p)| p > prune)
            .map(|(pi, &p)| (pi.clone(), p))
            .collect();
        let total: f64 = support.iter().map(|(_, p)| *p).sum();
        if total <= 0.0 {
            return Err(Error::Solver("all support probabilities pruned".into()));
        }
        for entry in &mut support {
            entry.1 /= total;
        }
        crate::model::Rum::new(support)
    }

    /// Free-MPS dump of the restricted primal for cross-checking against
    /// external solvers: G rows `L<p>`/`U<p>`, an E row `NORM`, columns
    /// `EPS<p>` and `P<t>`.
    pub fn write_mps(&self, w: &mut dyn Write) -> io::Result<()> {
        let pairs = self.num_eps_vars();
        writeln!(w, "NAME RUMFIT")?;
        writeln!(w, "ROWS")?;
        writeln!(w, " N COST")?;
        for p in 0..pairs {
            writeln!(w, " G L{p}")?;
            writeln!(w, " G U{p}")?;
        }
        writeln!(w, " E NORM")?;
        writeln!(w, "COLUMNS")?;
        let unit = 1.0 / self.slates.len() as f64;
        for p in 0..pairs {
            writeln!(w, "    EPS{p} COST {unit:.17} L{p} 1 U{p} 1")?;
        }
        for (t, winners) in self.winners.iter().enumerate() {
            for (s, &j) in winners.iter().enumerate() {
                let pair = s * self.k + usize::from(j);
                writeln!(w, "    P{t} L{pair} 1 U{pair} -1")?;
            }
            writeln!(w, "    P{t} NORM 1")?;
        }
        writeln!(w, "RHS")?;
        for (s, dist) in self.dist.iter().enumerate() {
            for (j, &d) in dist.iter().enumerate() {
                let pair = s * self.k + j;
                writeln!(w, "    RHS L{pair} {d:.17} U{pair} {:.17}", -d)?;
            }
        }
        writeln!(w, "    RHS NORM 1")?;
        writeln!(w, "ENDATA")?;
        Ok(())
    }
}
