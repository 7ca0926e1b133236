//! Synthetic generators shared by tests, the acceptance suite and the demo:
//! random RUMs, their exact winner tables, jittered (generally
//! non-representable) tables, and random WFHS instances.

use crate::ingest::for_each_k_subset;
use crate::model::{ItemId, Permutation, Rum, Slate, WinnerTable};
use crate::wfhs::WfhsInstance;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn random_permutation(rng: &mut impl Rng, n: usize) -> Permutation {
    let mut order: Vec<ItemId> = (0..n as u32).map(ItemId).collect();
    order.shuffle(rng);
    Permutation::new(order).expect("shuffled identity is a permutation")
}

/// A RUM supported on `support_size` distinct random permutations with
/// probabilities drawn uniformly and normalized.
pub fn random_rum(rng: &mut impl Rng, n: usize, support_size: usize) -> Rum {
    let mut support: Vec<(Permutation, f64)> = Vec::with_capacity(support_size);
    while support.len() < support_size {
        let pi = random_permutation(rng, n);
        if !support.iter().any(|(q, _)| q.order() == pi.order()) {
            support.push((pi, 0.0));
        }
    }
    let mut weights: Vec<f64> = (0..support_size)
        .map(|_| rng.random_range(0.05..1.0))
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    // Nudge the last entry so the sum is exactly 1 after rounding.
    let sum_except: f64 = weights[..support_size - 1].iter().sum();
    weights[support_size - 1] = 1.0 - sum_except;
    for (entry, w) in support.iter_mut().zip(weights) {
        entry.1 = w;
    }
    Rum::new(support).expect("normalized support")
}

/// The exact winner table of `rum` over every k-slate of its universe.
pub fn exact_winner_table(rum: &Rum, k: usize) -> WinnerTable {
    let n = rum.n();
    assert!(k >= 2 && k <= n, "k={k} out of range for n={n}");
    let universe: Vec<ItemId> = (0..n as u32).map(ItemId).collect();
    let mut entries = Vec::new();
    for_each_k_subset(&universe, k, |subset| {
        let slate = Slate::new(subset.to_vec()).expect("valid subset");
        let dist = rum.winner_distribution(&slate);
        entries.push((slate, dist));
    });
    WinnerTable::new(n, entries).expect("exact table is normalized")
}

/// Perturbs each slate distribution with independent uniform jitter of the
/// given magnitude and renormalizes; the result is generally not
/// representable by any RUM.
pub fn jittered_table(table: &WinnerTable, magnitude: f64, rng: &mut impl Rng) -> WinnerTable {
    let entries = table
        .entries()
        .iter()
        .map(|(s, dist)| {
            let mut noisy: Vec<f64> = dist
                .iter()
                .map(|&p| (p + rng.random_range(0.0..magnitude)).max(1e-9))
                .collect();
            let total: f64 = noisy.iter().sum();
            for v in &mut noisy {
                *v /= total;
            }
            let fix: f64 = noisy[..noisy.len() - 1].iter().sum();
            let last = noisy.len() - 1;
            noisy[last] = 1.0 - fix;
            (s.clone(), noisy)
        })
        .collect();
    WinnerTable::new(table.n(), entries).expect("jittered table is normalized")
}

/// A random instance with `edge_count` distinct k-edges and weights uniform
/// in `[0, 1]`.
pub fn random_wfhs_instance(
    rng: &mut impl Rng,
    n: usize,
    k: usize,
    edge_count: usize,
) -> WfhsInstance {
    let mut chosen: Vec<Vec<ItemId>> = Vec::with_capacity(edge_count);
    let mut pool: Vec<ItemId> = (0..n as u32).map(ItemId).collect();
    while chosen.len() < edge_count {
        pool.shuffle(rng);
        let mut members: Vec<ItemId> = pool[..k].to_vec();
        members.sort_unstable();
        if !chosen.contains(&members) {
            chosen.push(members);
        }
    }
    chosen.sort();
    let edges = chosen
        .into_iter()
        .map(|members| {
            let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
            (members, weights)
        })
        .collect();
    WfhsInstance::new(n, edges, 1.0).expect("valid random instance")
}
