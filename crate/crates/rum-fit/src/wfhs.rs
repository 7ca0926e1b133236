//! The weighted feedback hyperedge set problem: given hyperedges with a
//! weight per member, find the permutation minimizing the summed weights of
//! each edge's winner (its highest-ranked member).
//!
//! Three solvers share one cost definition: a factorial brute force (test
//! oracle), an exact subset dynamic program over bitmasks, and the randomized
//! steepest-descent local search used as the `Viol-HP` separation heuristic.

use crate::error::{Error, Result};
use crate::model::{skip_line, ItemId, Permutation};
use crate::seeding::derive_seed;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default bitmask capacity of the exact dynamic program (2^n cost entries
/// plus 2^n choice entries).
pub const DEFAULT_EXACT_LIMIT: usize = 24;

/// Largest n the factorial brute force will accept.
pub const BRUTE_FORCE_LIMIT: usize = 9;

/// A hyperedge: k distinct vertices, one weight per vertex.
#[derive(Clone, Debug)]
pub struct WfhsEdge {
    members: Vec<ItemId>,
    weights: Vec<f64>,
    mask: u64,
}

impl WfhsEdge {
    pub fn members(&self) -> &[ItemId] {
        &self.members
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight paid when `item` wins this edge.
    pub fn weight_of(&self, item: ItemId) -> f64 {
        let at = self
            .members
            .iter()
            .position(|&m| m == item)
            .expect("member");
        self.weights[at]
    }
}

/// A WFHS instance: `n` vertices and weighted k-edges; weights bounded by
/// `tau` (non-negative in the classic problem, symmetric around zero when
/// built via [`WfhsInstance::new_signed`]).
#[derive(Clone, Debug)]
pub struct WfhsInstance {
    n: usize,
    k: usize,
    edges: Vec<WfhsEdge>,
    tau: f64,
}

impl WfhsInstance {
    /// Classic instance with weights in `[0, tau]`.
    pub fn new(n: usize, edges: Vec<(Vec<ItemId>, Vec<f64>)>, tau: f64) -> Result<Self> {
        let inst = Self::build(n, edges, tau)?;
        for e in &inst.edges {
            if let Some(w) = e.weights.iter().find(|w| **w < 0.0 || **w > tau) {
                return Err(Error::invalid(format!(
                    "edge weight {w} outside [0, {tau}]"
                )));
            }
        }
        Ok(inst)
    }

    /// Instance allowing signed weights in `[-bound, bound]`; used when the
    /// separation oracle runs directly on dual values.
    pub fn new_signed(n: usize, edges: Vec<(Vec<ItemId>, Vec<f64>)>, bound: f64) -> Result<Self> {
        let inst = Self::build(n, edges, bound)?;
        for e in &inst.edges {
            if let Some(w) = e.weights.iter().find(|w| w.abs() > bound) {
                return Err(Error::invalid(format!(
                    "edge weight {w} outside [-{bound}, {bound}]"
                )));
            }
        }
        Ok(inst)
    }

    fn build(n: usize, edges: Vec<(Vec<ItemId>, Vec<f64>)>, tau: f64) -> Result<Self> {
        if !(2..=64).contains(&n) {
            return Err(Error::invalid(format!(
                "vertex count {n} outside supported range 2..=64"
            )));
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::invalid(format!(
                "tau must be finite and non-negative, got {tau}"
            )));
        }
        if edges.is_empty() {
            return Err(Error::invalid("instance has no edges"));
        }
        let k = edges[0].0.len();
        if k < 2 {
            return Err(Error::invalid("edges must have at least 2 vertices"));
        }
        let mut built = Vec::with_capacity(edges.len());
        for (members, weights) in edges {
            if members.len() != k {
                return Err(Error::invalid(format!(
                    "edge size {} differs from k={k}",
                    members.len()
                )));
            }
            if weights.len() != k {
                return Err(Error::invalid(
                    "edge weight count differs from its vertex count",
                ));
            }
            let mut mask = 0u64;
            for &v in &members {
                if v.index() >= n {
                    return Err(Error::invalid(format!("vertex {v} out of range for n={n}")));
                }
                if mask & (1 << v.index()) != 0 {
                    return Err(Error::invalid(format!("edge repeats vertex {v}")));
                }
                mask |= 1 << v.index();
            }
            built.push(WfhsEdge {
                members,
                weights,
                mask,
            });
        }
        Ok(WfhsInstance {
            n,
            k,
            edges: built,
            tau,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn edges(&self) -> &[WfhsEdge] {
        &self.edges
    }

    /// Text form: header `wfhs n=<n> k=<k> tau=<tau>`, one `v1,...,vk :
    /// w1,...,wk` line per edge, weights aligned with the listed vertices.
    pub fn to_text(&self) -> String {
        let mut out = format!("wfhs n={} k={} tau={}\n", self.n, self.k, self.tau);
        for e in &self.edges {
            let vs: Vec<String> = e.members.iter().map(|v| v.to_string()).collect();
            let ws: Vec<String> = e.weights.iter().map(|w| w.to_string()).collect();
            out.push_str(&format!("{} : {}\n", vs.join(","), ws.join(",")));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (hline, header) = lines
            .by_ref()
            .find(|(_, l)| !skip_line(l))
            .ok_or_else(|| Error::parse(0, "missing `wfhs` header"))?;
        let (n, k, tau) = parse_wfhs_header(header)
            .ok_or_else(|| Error::parse(hline + 1, format!("bad header `{header}`")))?;
        let mut edges = Vec::new();
        for (idx, line) in lines {
            if skip_line(line) {
                continue;
            }
            let lineno = idx + 1;
            let (vs, ws) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, "expected `vertices : weights`"))?;
            let members = vs
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<u32>()
                        .map(ItemId)
                        .map_err(|_| Error::parse(lineno, format!("bad vertex `{tok}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            let weights = ws
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::parse(lineno, format!("bad weight `{tok}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            if members.len() != k {
                return Err(Error::parse(lineno, format!("expected {k} vertices")));
            }
            edges.push((members, weights));
        }
        WfhsInstance::new(n, edges, tau)
    }
}

fn parse_wfhs_header(line: &str) -> Option<(usize, usize, f64)> {
    let rest = line.trim().strip_prefix("wfhs")?.trim();
    let mut n = None;
    let mut k = None;
    let mut tau = None;
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("n=") {
            n = v.parse().ok();
        } else if let Some(v) = tok.strip_prefix("k=") {
            k = v.parse().ok();
        } else {
            let v = tok.strip_prefix("tau=")?;
            tau = v.parse().ok();
        }
    }
    Some((n?, k?, tau?))
}

/// `C(pi)`: sum over edges of the weight of the edge's winner under `pi`.
pub fn wfhs_cost(inst: &WfhsInstance, pi: &Permutation) -> f64 {
    debug_assert_eq!(pi.n(), inst.n);
    inst.edges
        .iter()
        .map(|e| {
            let winner = e
                .members
                .iter()
                .enumerate()
                .min_by_key(|(_, v)| pi.rank_of(**v))
                .expect("edge nonempty");
            e.weights[winner.0]
        })
        .sum()
}

/// Which solver produced a [`WfhsResult`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WfhsMethod {
    Exact,
    LocalSearch,
    BruteForce,
}

impl WfhsMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            WfhsMethod::Exact => "exact",
            WfhsMethod::LocalSearch => "local-search",
            WfhsMethod::BruteForce => "brute-force",
        }
    }
}

/// A solver's answer. `cost` is always recomputed through [`wfhs_cost`] on
/// the returned permutation, so costs from different solvers are directly
/// comparable bit for bit.
#[derive(Clone, Debug)]
pub struct WfhsResult {
    pub permutation: Permutation,
    pub cost: f64,
    pub method: WfhsMethod,
}

fn next_permutation(arr: &mut [u32]) -> bool {
    let n = arr.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && arr[i - 1] >= arr[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while arr[j] <= arr[i - 1] {
        j -= 1;
    }
    arr.swap(i - 1, j);
    arr[i..].reverse();
    true
}

/// Globally minimal cost by enumerating all n! permutations in lexicographic
/// order; ties keep the lexicographically smallest permutation.
pub fn wfhs_brute_force(inst: &WfhsInstance) -> Result<WfhsResult> {
    if inst.n > BRUTE_FORCE_LIMIT {
        return Err(Error::Capacity(format!(
            "brute force enumerates n! permutations; n={} exceeds {BRUTE_FORCE_LIMIT}",
            inst.n
        )));
    }
    let mut arr: Vec<u32> = (0..inst.n as u32).collect();
    let mut best: Option<(f64, Vec<u32>)> = None;
    loop {
        let pi = Permutation::new(arr.iter().copied().map(ItemId).collect())?;
        let cost = wfhs_cost(inst, &pi);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, arr.clone()));
        }
        if !next_permutation(&mut arr) {
            break;
        }
    }
    let (cost, order) = best.expect("at least one permutation");
    Ok(WfhsResult {
        permutation: Permutation::new(order.into_iter().map(ItemId).collect())?,
        cost,
        method: WfhsMethod::BruteForce,
    })
}

/// Exact optimum plus the raw dynamic-program table value (before the cost is
/// recomputed from the reconstructed permutation).
pub fn wfhs_exact_detailed(inst: &WfhsInstance, limit: usize) -> Result<(WfhsResult, f64)> {
    let n = inst.n;
    if n > limit.min(32) {
        return Err(Error::Capacity(format!(
            "exact DP needs 2^n table entries; n={n} exceeds the configured limit {}",
            limit.min(32)
        )));
    }
    let full: usize = (1usize << n) - 1;
    // cost[A] = optimal cost of the instance projected on subset A;
    // choice[A] = the most-preferred element of A in that optimum.
    let mut cost = vec![0.0f64; 1 << n];
    let mut choice = vec![0u8; 1 << n];
    let mut acc = [0.0f64; 32];
    for a_mask in 1..=full {
        let mut bits = a_mask;
        while bits != 0 {
            acc[bits.trailing_zeros() as usize] = 0.0;
            bits &= bits - 1;
        }
        for e in &inst.edges {
            if e.mask as usize & a_mask == e.mask as usize {
                for (v, w) in e.members.iter().zip(&e.weights) {
                    acc[v.index()] += w;
                }
            }
        }
        let mut best = f64::INFINITY;
        let mut arg = 0usize;
        let mut bits = a_mask;
        while bits != 0 {
            let a = bits.trailing_zeros() as usize;
            let c = acc[a] + cost[a_mask & !(1 << a)];
            if c < best {
                best = c;
                arg = a;
            }
            bits &= bits - 1;
        }
        cost[a_mask] = best;
        choice[a_mask] = arg as u8;
    }
    // Reconstruction front to back: choice[A] wins every edge inside A that
    // contains it, so it is the most-preferred element of the block A.
    let mut order = Vec::with_capacity(n);
    let mut a_mask = full;
    while a_mask != 0 {
        let l = choice[a_mask] as u32;
        order.push(ItemId(l));
        a_mask &= !(1usize << l);
    }
    let pi = Permutation::new(order)?;
    let reported = wfhs_cost(inst, &pi);
    Ok((
        WfhsResult {
            permutation: pi,
            cost: reported,
            method: WfhsMethod::Exact,
        },
        cost[full],
    ))
}

/// Exact optimum via the subset dynamic program, with the default capacity.
pub fn wfhs_exact(inst: &WfhsInstance) -> Result<WfhsResult> {
    wfhs_exact_detailed(inst, DEFAULT_EXACT_LIMIT).map(|(r, _)| r)
}

/// Parameters of the randomized local search.
#[derive(Clone, Copy, Debug)]
pub struct LocalSearchParams {
    /// Return the best permutation found only once its cost is strictly
    /// below this threshold (the dual value `D` in separation use).
    pub threshold: f64,
    /// Number of random restarts.
    pub t: u32,
    /// Minimum restarts before an early return.
    pub t_prime: u32,
    pub seed: u64,
    /// Worker threads for restarts; results are identical for any value.
    pub threads: usize,
}

impl LocalSearchParams {
    pub fn new(threshold: f64, t: u32, t_prime: u32, seed: u64) -> Self {
        LocalSearchParams {
            threshold,
            t,
            t_prime,
            seed,
            threads: 1,
        }
    }
}

/// One restart's descent: starting permutation cost followed by each
/// accepted move's cost (strictly decreasing), and the local optimum reached.
#[derive(Clone, Debug)]
pub struct RestartRecord {
    pub costs: Vec<f64>,
    pub final_permutation: Permutation,
}

impl RestartRecord {
    pub fn final_cost(&self) -> f64 {
        *self
            .costs
            .last()
            .expect("costs start with the initial permutation")
    }
}

/// Full account of a local-search run.
#[derive(Clone, Debug)]
pub struct LocalSearchRun {
    pub result: Option<WfhsResult>,
    /// Restarts consumed before returning (equals `t` when no early return).
    pub restarts_used: u32,
    /// Records of restarts `1..=restarts_used`, in order.
    pub restarts: Vec<RestartRecord>,
}

/// Randomized local search over the insertion neighborhood `N(pi)` (remove
/// one element, reinsert elsewhere): up to `t` restarts of steepest descent
/// from uniform random permutations, returning the best local optimum as
/// soon as its cost beats `threshold` and at least `t_prime` restarts are
/// done; `None` when all `t` restarts fail to beat the threshold.
pub fn wfhs_local_search(
    inst: &WfhsInstance,
    params: &LocalSearchParams,
) -> Result<Option<WfhsResult>> {
    wfhs_local_search_detailed(inst, params).map(|run| run.result)
}

pub fn wfhs_local_search_detailed(
    inst: &WfhsInstance,
    params: &LocalSearchParams,
) -> Result<LocalSearchRun> {
    if params.t_prime == 0 || params.t_prime > params.t {
        return Err(Error::invalid(format!(
            "restart counts must satisfy 0 < t'={} <= t={}",
            params.t_prime, params.t
        )));
    }
    let adjacency = build_adjacency(inst);
    let run_one = |restart_index: u32| -> RestartRecord {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
            params.seed,
            "wfhs-restart",
            restart_index as u64,
        ));
        let mut order: Vec<ItemId> = (0..inst.n as u32).map(ItemId).collect();
        order.shuffle(&mut rng);
        steepest_descent(inst, &adjacency, order)
    };

    let mut records: Vec<RestartRecord> = Vec::new();
    let mut best: Option<(f64, u32)> = None; // (cost, restart index)
    let mut outcome: Option<(Option<usize>, u32)> = None; // (best record idx, restarts used)

    let threads = params.threads.max(1);
    let mut next = 1u32;
    while next <= params.t && outcome.is_none() {
        let wave_end = (next + threads as u32 - 1).min(params.t);
        let wave: Vec<RestartRecord> = if threads == 1 {
            vec![run_one(next)]
        } else {
            let indices: Vec<u32> = (next..=wave_end).collect();
            std::thread::scope(|scope| {
                let handles: Vec<_> = indices
                    .iter()
                    .map(|&i| scope.spawn(move || run_one(i)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("restart worker"))
                    .collect()
            })
        };
        // Apply the sequential stopping rule over the ordered prefix.
        for (offset, record) in wave.into_iter().enumerate() {
            let i = next + offset as u32;
            let cost = record.final_cost();
            records.push(record);
            if best.is_none_or(|(c, _)| cost < c) {
                best = Some((cost, i));
            }
            if outcome.is_none() {
                let (best_cost, _) = best.expect("just set");
                if best_cost < params.threshold && i >= params.t_prime {
                    outcome = Some((best.map(|(_, idx)| idx as usize - 1), i));
                    break;
                }
            }
        }
        next = wave_end + 1;
    }

    let (best_idx, restarts_used) = match outcome {
        Some((idx, used)) => (idx, used),
        None => (None, params.t),
    };
    records.truncate(restarts_used as usize);
    let result = best_idx.map(|idx| {
        let pi = records[idx].final_permutation.clone();
        let cost = wfhs_cost(inst, &pi);
        WfhsResult {
            permutation: pi,
            cost,
            method: WfhsMethod::LocalSearch,
        }
    });
    Ok(LocalSearchRun {
        result,
        restarts_used,
        restarts: records,
    })
}

fn build_adjacency(inst: &WfhsInstance) -> Vec<Vec<usize>> {
    let mut adjacency = vec![Vec::new(); inst.n];
    for (idx, e) in inst.edges.iter().enumerate() {
        for v in &e.members {
            adjacency[v.index()].push(idx);
        }
    }
    adjacency
}

/// Steepest descent over insertion moves. Each sweep evaluates, for every
/// element x, the cost of reinserting x at every position in one pass: with
/// x removed, an edge containing x is won by x iff x lands at or before the
/// first remaining member, so the cost as a function of the insertion slot
/// is a step function accumulated over the edges touching x.
fn steepest_descent(
    inst: &WfhsInstance,
    adjacency: &[Vec<usize>],
    mut order: Vec<ItemId>,
) -> RestartRecord {
    let n = inst.n;
    let mut rank = vec![0u32; n];
    let mut current = {
        let pi = Permutation::new(order.clone()).expect("valid order");
        wfhs_cost(inst, &pi)
    };
    let mut costs = vec![current];
    let mut step = vec![0.0f64; n]; // step[j] = sum of edge terms if x is inserted at slot j

    loop {
        for (pos, &item) in order.iter().enumerate() {
            rank[item.index()] = pos as u32;
        }
        // Per-edge winner weights under the current order.
        let mut winner_weight = vec![0.0f64; inst.edges.len()];
        for (ei, e) in inst.edges.iter().enumerate() {
            let (at, _) = e
                .members
                .iter()
                .enumerate()
                .min_by_key(|(_, v)| rank[v.index()])
                .expect("edge nonempty");
            winner_weight[ei] = e.weights[at];
        }

        let mut best: Option<(f64, usize, usize)> = None; // (cost, from, to)
        for (from, &x) in order.iter().enumerate() {
            let touching = &adjacency[x.index()];
            if touching.is_empty() {
                continue; // moving x cannot change any winner
            }
            // Cost of edges not touching x, unchanged by the move.
            let rest: f64 = current - touching.iter().map(|&ei| winner_weight[ei]).sum::<f64>();
            // step[j] accumulates, per edge, the winner weight as a function
            // of x's insertion slot j: w_e(x) for j <= m_e, else the weight
            // of the earliest remaining member.
            for s in step.iter_mut().take(n) {
                *s = 0.0;
            }
            let mut suffix_base = 0.0; // sum of "x loses" weights
            for &ei in touching {
                let e = &inst.edges[ei];
                let mut m_best: Option<(usize, f64)> = None; // (slot of earliest other, its weight)
                for (v, w) in e.members.iter().zip(&e.weights) {
                    if *v == x {
                        continue;
                    }
                    let r = rank[v.index()] as usize;
                    let slot = if r > from { r - 1 } else { r };
                    if m_best.is_none_or(|(s, _)| slot < s) {
                        m_best = Some((slot, *w));
                    }
                }
                let (m_e, w_other) = m_best.expect("k >= 2");
                let w_x = e.weight_of(x);
                suffix_base += w_other;
                // x wins for slots 0..=m_e: add (w_x - w_other) there.
                step[0] += w_x - w_other;
                if m_e + 1 < n {
                    step[m_e + 1] -= w_x - w_other;
                }
            }
            // Prefix-sum the deltas, track the best insertion slot != from.
            let mut running = suffix_base;
            for (to, &delta) in step.iter().enumerate().take(n) {
                running += delta;
                if to == from {
                    continue;
                }
                let total = rest + running;
                if best.is_none_or(|(c, _, _)| total < c) {
                    best = Some((total, from, to));
                }
            }
        }

        let Some((est, from, to)) = best else { break };
        if est >= current {
            break; // local optimum of the insertion neighborhood
        }
        let x = order.remove(from);
        order.insert(to, x);
        let fresh = {
            let pi = Permutation::new(order.clone()).expect("valid order");
            wfhs_cost(inst, &pi)
        };
        if fresh >= current {
            // Float association noise made the estimate optimistic; undo.
            order.remove(to);
            order.insert(from, x);
            break;
        }
        current = fresh;
        costs.push(current);
    }

    RestartRecord {
        costs,
        final_permutation: Permutation::new(order).expect("valid order"),
    }
}
