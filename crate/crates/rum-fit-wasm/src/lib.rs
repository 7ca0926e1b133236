//! Browser demo bindings: three interactive operations over the core
//! pipeline, each returning a JSON string the page renders onto canvases.
//!
//! The functions are plain Rust (tested natively); `wasm-bindgen` exposes
//! them to the page. Build with
//! `wasm-pack build crates/rum-fit-wasm --target web --out-dir www/pkg`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rum_fit::eval::error_cdf;
use rum_fit::fit::{fit_rum, FitConfig, OracleKind};
use rum_fit::ingest::{binomial, ChoiceDataset};
use rum_fit::mnl::{mnl_fit, MnlParams};
use rum_fit::model::{l1_distance, ItemId, Rum, Slate};
use rum_fit::synth::{exact_winner_table, jittered_table, random_rum, random_wfhs_instance};
use rum_fit::wfhs::{
    wfhs_brute_force, wfhs_exact_detailed, wfhs_local_search_detailed, LocalSearchParams,
};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn err_json(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

/// Generates a ground-truth RUM on `n` items, derives its exact winner table
/// over all k-slates (optionally jittered), fits a RUM by column generation
/// and returns the convergence trace, the error CDF and an MNL comparison.
#[wasm_bindgen]
pub fn fit_demo(
    n: usize,
    k: usize,
    support_size: usize,
    noise: f64,
    seed: u64,
    use_local_search: bool,
    max_iterations: usize,
) -> String {
    fit_demo_impl(
        n,
        k,
        support_size,
        noise,
        seed,
        use_local_search,
        max_iterations,
    )
    .unwrap_or_else(err_json)
}

fn fit_demo_impl(
    n: usize,
    k: usize,
    support_size: usize,
    noise: f64,
    seed: u64,
    use_local_search: bool,
    max_iterations: usize,
) -> Result<String, String> {
    if !(2..=9).contains(&n) || !(2..=n).contains(&k) {
        return Err(format!("need 2 <= k <= n <= 9, got n={n} k={k}"));
    }
    if support_size == 0 || support_size > 20 {
        return Err("ground-truth support must be 1..=20 permutations".into());
    }
    if !(0.0..=1.0).contains(&noise) {
        return Err("noise must lie in [0, 1]".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth = random_rum(&mut rng, n, support_size);
    let mut table = exact_winner_table(&truth, k);
    if noise > 0.0 {
        table = jittered_table(&table, noise, &mut rng);
    }

    let cfg = FitConfig {
        oracle: if use_local_search {
            OracleKind::LocalSearch
        } else {
            OracleKind::Exact
        },
        t: 30,
        t_prime: 3,
        max_iterations: max_iterations.clamp(1, 2000),
        stall_window: usize::MAX >> 1,
        seed,
        ..FitConfig::default()
    };
    let report = fit_rum(&table, &cfg).map_err(|f| f.to_string())?;
    let cdf = error_cdf(&report.rum, &table).map_err(|e| e.to_string())?;

    // MNL baseline on observations matching the table's frequencies,
    // scaled to integer counts.
    let mnl_error = {
        let mut triples = Vec::new();
        for (slate, dist) in table.entries() {
            for (item, &p) in slate.items().iter().zip(dist) {
                let count = (p * 10_000.0).round() as u64;
                if count > 0 {
                    triples.push((slate.clone(), *item, count));
                }
            }
        }
        let ds = ChoiceDataset::from_triples(n, k, triples).map_err(|e| e.to_string())?;
        let model = mnl_fit(&ds, &MnlParams::default()).map_err(|e| e.to_string())?;
        let mut total = 0.0;
        for (slate, dist) in table.entries() {
            total += l1_distance(&model.predict(slate), dist).map_err(|e| e.to_string())?;
        }
        total / table.len() as f64
    };

    let trace: Vec<_> = report
        .trace
        .iterations
        .iter()
        .map(|r| json!({ "iteration": r.iteration, "objective": r.objective, "support": r.support_size }))
        .collect();
    Ok(json!({
        "n": n,
        "k": k,
        "slates": table.len(),
        "truth_support": support_size,
        "average_error": report.average_error,
        "lower_bound": report.lower_bound,
        "mnl_average_error": mnl_error,
        "converged": report.converged,
        "iterations": report.iterations,
        "support_size": report.support_size,
        "trace": trace,
        "cdf": cdf.points.iter().map(|&(x, y)| json!([x, y])).collect::<Vec<_>>(),
    })
    .to_string())
}

/// Random WFHS instance solved three ways: exact bitmask DP, randomized
/// local search (per-restart descent traces included) and, for n <= 8,
/// brute force.
#[wasm_bindgen]
pub fn wfhs_demo(n: usize, k: usize, edges: usize, seed: u64, t: u32, t_prime: u32) -> String {
    wfhs_demo_impl(n, k, edges, seed, t, t_prime).unwrap_or_else(err_json)
}

fn wfhs_demo_impl(
    n: usize,
    k: usize,
    edges: usize,
    seed: u64,
    t: u32,
    t_prime: u32,
) -> Result<String, String> {
    if !(3..=12).contains(&n) || !(2..=n).contains(&k) {
        return Err(format!("need 2 <= k <= n <= 12, got n={n} k={k}"));
    }
    let max_edges = binomial(n, k).min(200) as usize;
    if edges == 0 || edges > max_edges {
        return Err(format!(
            "edge count must be 1..={max_edges} for n={n}, k={k}"
        ));
    }
    if t_prime == 0 || t_prime > t || t > 500 {
        return Err("restarts must satisfy 0 < t' <= t <= 500".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = random_wfhs_instance(&mut rng, n, k, edges);

    let (exact, _) = wfhs_exact_detailed(&inst, 24).map_err(|e| e.to_string())?;
    let params = LocalSearchParams {
        threshold: f64::INFINITY,
        t,
        t_prime,
        seed,
        threads: 1,
    };
    let run = wfhs_local_search_detailed(&inst, &params).map_err(|e| e.to_string())?;
    let local = run.result.expect("infinite threshold always returns");
    let brute = if n <= 8 {
        Some(wfhs_brute_force(&inst).map_err(|e| e.to_string())?)
    } else {
        None
    };

    let restart_costs: Vec<f64> = run.restarts.iter().map(|r| r.final_cost()).collect();
    let descents: Vec<_> = run.restarts.iter().map(|r| json!(r.costs)).collect();
    Ok(json!({
        "n": n,
        "k": k,
        "edges": edges,
        "exact_cost": exact.cost,
        "exact_permutation": exact.permutation.order().iter().map(|i| i.0).collect::<Vec<_>>(),
        "local_cost": local.cost,
        "local_permutation": local.permutation.order().iter().map(|i| i.0).collect::<Vec<_>>(),
        "brute_cost": brute.map(|b| b.cost),
        "restarts_used": run.restarts_used,
        "restart_costs": restart_costs,
        "descents": descents,
    })
    .to_string())
}

/// Parses a RUM in its text format and returns the winner distribution it
/// induces on the given comma-separated slate.
#[wasm_bindgen]
pub fn winner_demo(rum_text: &str, slate_csv: &str) -> String {
    winner_demo_impl(rum_text, slate_csv).unwrap_or_else(err_json)
}

fn winner_demo_impl(rum_text: &str, slate_csv: &str) -> Result<String, String> {
    let rum = Rum::from_text(rum_text).map_err(|e| e.to_string())?;
    let items: Vec<ItemId> = slate_csv
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u32>()
                .map(ItemId)
                .map_err(|_| format!("bad item id `{tok}`"))
        })
        .collect::<Result<_, String>>()?;
    if let Some(big) = items.iter().find(|i| i.index() >= rum.n()) {
        return Err(format!("item {big} out of range for n={}", rum.n()));
    }
    let slate = Slate::new(items).map_err(|e| e.to_string())?;
    let dist = rum.winner_distribution(&slate);
    Ok(json!({
        "n": rum.n(),
        "support_size": rum.support().len(),
        "slate": slate.items().iter().map(|i| i.0).collect::<Vec<_>>(),
        "distribution": dist,
    })
    .to_string())
}
