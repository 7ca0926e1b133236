//! Evaluation: per-slate error CDFs, RMSE between winner tables, and k-fold
//! cross-validation of the RUM fit against the MNL and train-tensor
//! baselines.

use crate::error::{Error, Result};
use crate::fit::{fit_rum, FitConfig};
use crate::ingest::{ChoiceDataset, ChoiceObservation};
use crate::mnl::{mnl_fit, MnlParams};
use crate::model::{l1_distance, Rum, Slate, WinnerTable};
use crate::seeding::derive_seed;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Empirical CDF of per-slate l1 errors: `(x, fraction of slates with error
/// <= x)` at each distinct error value, non-decreasing, ending at 1.
#[derive(Clone, Debug)]
pub struct ErrorCdf {
    pub points: Vec<(f64, f64)>,
}

impl ErrorCdf {
    /// Mean per-slate error recovered from the CDF.
    pub fn mean(&self) -> f64 {
        let mut prev = 0.0;
        let mut total = 0.0;
        for &(x, y) in &self.points {
            total += x * (y - prev);
            prev = y;
        }
        total
    }
}

pub fn error_cdf(rum: &Rum, table: &WinnerTable) -> Result<ErrorCdf> {
    let mut errors: Vec<f64> = table
        .entries()
        .iter()
        .map(|(s, dist)| l1_distance(&rum.winner_distribution(s), dist))
        .collect::<Result<_>>()?;
    errors.sort_by(|a, b| a.partial_cmp(b).expect("finite errors"));
    let m = errors.len() as f64;
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (idx, &e) in errors.iter().enumerate() {
        let y = (idx + 1) as f64 / m;
        match points.last_mut() {
            Some(last) if last.0 == e => last.1 = y,
            _ => points.push((e, y)),
        }
    }
    Ok(ErrorCdf { points })
}

/// Root mean-squared error between two tables over the slates of `actual`,
/// normalized by the slate count (not the member count).
pub fn rmse(predicted: &WinnerTable, actual: &WinnerTable) -> Result<f64> {
    let mut total = 0.0;
    for (slate, dist) in actual.entries() {
        let pred = predicted.distribution(slate).ok_or_else(|| {
            Error::invalid(format!(
                "slate {slate} of `actual` missing from `predicted`"
            ))
        })?;
        total += dist
            .iter()
            .zip(pred)
            .map(|(a, p)| (a - p) * (a - p))
            .sum::<f64>();
    }
    Ok((total / actual.len() as f64).sqrt())
}

/// Which predictor cross-validation evaluates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CvModel {
    Rum,
    Mnl,
    TrainTensor,
}

impl CvModel {
    pub fn as_str(self) -> &'static str {
        match self {
            CvModel::Rum => "rum",
            CvModel::Mnl => "mnl",
            CvModel::TrainTensor => "train-tensor",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CvConfig {
    pub folds: usize,
    /// One repetition of the random split per seed.
    pub seeds: Vec<u64>,
    /// Iteration cap applied to the RUM fit inside each cell.
    pub max_iterations: usize,
    pub fit: FitConfig,
    pub mnl: MnlParams,
    /// Worker threads across seeds.
    pub threads: usize,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 5,
            seeds: (0..10).collect(),
            max_iterations: 250,
            fit: FitConfig::default(),
            mnl: MnlParams::default(),
            threads: 1,
        }
    }
}

impl CvConfig {
    /// Ten repetition seeds derived from one base seed.
    pub fn with_base_seed(mut self, base: u64) -> Self {
        self.seeds = (0..self.seeds.len() as u64)
            .map(|i| derive_seed(base, "cv-seed", i))
            .collect();
        self
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CvCell {
    pub seed: u64,
    pub fold: usize,
    pub rmse: f64,
}

#[derive(Clone, Debug)]
pub struct CvReport {
    pub cells: Vec<CvCell>,
    pub mean: f64,
    /// Sample standard deviation across all seed x fold cells.
    pub stddev: f64,
}

/// Shuffles the observation units (multiplicity expanded), splits them into
/// `folds` near-equal groups, trains on the complement of each group and
/// scores RMSE against the group's empirical winner distributions. Slates
/// absent from training are predicted uniform by the train-tensor model;
/// the RUM and MNL models predict natively on any slate.
pub fn cross_validate(ds: &ChoiceDataset, cfg: &CvConfig, model: CvModel) -> Result<CvReport> {
    if ds.is_empty() {
        return Err(Error::invalid("empty dataset"));
    }
    if cfg.folds < 2 {
        return Err(Error::invalid("cross-validation needs at least 2 folds"));
    }
    let total_units = ds.total_count() as usize;
    if cfg.folds > total_units {
        return Err(Error::invalid(format!(
            "{} folds exceed the {} observation units",
            cfg.folds, total_units
        )));
    }

    let run_seed = |seed: u64| -> Result<Vec<CvCell>> {
        let mut units: Vec<u32> = Vec::with_capacity(total_units);
        for (idx, obs) in ds.observations().iter().enumerate() {
            for _ in 0..obs.count {
                units.push(idx as u32);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        units.shuffle(&mut rng);
        let bounds = fold_bounds(units.len(), cfg.folds);
        let mut cells = Vec::with_capacity(cfg.folds);
        for (fold, &(lo, hi)) in bounds.iter().enumerate() {
            let test_units = &units[lo..hi];
            let train_units: Vec<u32> = units[..lo].iter().chain(&units[hi..]).copied().collect();
            if test_units.is_empty() || train_units.is_empty() {
                return Err(Error::invalid("a fold ended up empty"));
            }
            let train_ds = dataset_from_units(ds, &train_units)?;
            let test_table =
                crate::ingest::empirical_distributions(&dataset_from_units(ds, test_units)?)?;
            let predicted = predict_table(&train_ds, &test_table, model, cfg, seed, fold)?;
            cells.push(CvCell {
                seed,
                fold,
                rmse: rmse(&predicted, &test_table)?,
            });
        }
        Ok(cells)
    };

    let mut cells: Vec<CvCell> = Vec::with_capacity(cfg.seeds.len() * cfg.folds);
    let threads = cfg.threads.max(1);
    if threads == 1 {
        for &seed in &cfg.seeds {
            cells.extend(run_seed(seed)?);
        }
    } else {
        for chunk in cfg.seeds.chunks(threads) {
            let results: Vec<Result<Vec<CvCell>>> = std::thread::scope(|scope| {
                let handles: Vec<_> = chunk
                    .iter()
                    .map(|&seed| scope.spawn(move || run_seed(seed)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("cv worker"))
                    .collect()
            });
            for r in results {
                cells.extend(r?);
            }
        }
    }

    let m = cells.len() as f64;
    let mean = cells.iter().map(|c| c.rmse).sum::<f64>() / m;
    let var = if cells.len() > 1 {
        cells
            .iter()
            .map(|c| (c.rmse - mean) * (c.rmse - mean))
            .sum::<f64>()
            / (m - 1.0)
    } else {
        0.0
    };
    Ok(CvReport {
        cells,
        mean,
        stddev: var.sqrt(),
    })
}

/// Contiguous fold ranges with sizes differing by at most one.
fn fold_bounds(len: usize, folds: usize) -> Vec<(usize, usize)> {
    let base = len / folds;
    let rem = len % folds;
    let mut bounds = Vec::with_capacity(folds);
    let mut lo = 0;
    for f in 0..folds {
        let size = base + usize::from(f < rem);
        bounds.push((lo, lo + size));
        lo += size;
    }
    bounds
}

fn dataset_from_units(ds: &ChoiceDataset, units: &[u32]) -> Result<ChoiceDataset> {
    let mut counts = vec![0u64; ds.observations().len()];
    for &u in units {
        counts[u as usize] += 1;
    }
    let triples: Vec<(Slate, crate::model::ItemId, u64)> = ds
        .observations()
        .iter()
        .zip(&counts)
        .filter(|(_, &c)| c > 0)
        .map(|(obs, &c)| (obs.slate.clone(), obs.winner, c))
        .collect();
    ChoiceDataset::from_triples(ds.n(), ds.k(), triples)
}

fn predict_table(
    train_ds: &ChoiceDataset,
    test_table: &WinnerTable,
    model: CvModel,
    cfg: &CvConfig,
    seed: u64,
    fold: usize,
) -> Result<WinnerTable> {
    let slates: Vec<Slate> = test_table.slates().cloned().collect();
    let entries: Vec<(Slate, Vec<f64>)> = match model {
        CvModel::Rum => {
            let train_table = crate::ingest::empirical_distributions(train_ds)?;
            let fit_cfg = FitConfig {
                max_iterations: cfg.max_iterations,
                seed: derive_seed(seed, "cv-fit", fold as u64),
                ..cfg.fit
            };
            let report = fit_rum(&train_table, &fit_cfg).map_err(|f| f.error)?;
            slates
                .iter()
                .map(|s| (s.clone(), report.rum.winner_distribution(s)))
                .collect()
        }
        CvModel::Mnl => {
            let model = mnl_fit(train_ds, &cfg.mnl)?;
            slates
                .iter()
                .map(|s| (s.clone(), model.predict(s)))
                .collect()
        }
        CvModel::TrainTensor => {
            let train_table = crate::ingest::empirical_distributions(train_ds)?;
            slates
                .iter()
                .map(|s| {
                    let dist = match train_table.distribution(s) {
                        Some(d) => d.to_vec(),
                        // Slates seen only in the test fold get the uniform
                        // prediction.
                        None => vec![1.0 / s.len() as f64; s.len()],
                    };
                    (s.clone(), dist)
                })
                .collect()
        }
    };
    WinnerTable::new(test_table.n(), entries)
}

/// Re-exported for the CLI's fold bookkeeping tests.
pub fn observation_units(ds: &ChoiceDataset) -> Vec<&ChoiceObservation> {
    let mut units = Vec::with_capacity(ds.total_count() as usize);
    for obs in ds.observations() {
        for _ in 0..obs.count {
            units.push(obs);
        }
    }
    units
}
