//! Multinomial-logit baseline: one latent utility per item, slate choice
//! probabilities given by the softmax of utilities restricted to the slate.
//! Fitting is maximum likelihood by full-batch gradient ascent with
//! backtracking line search; the log-likelihood is concave, and the datasets
//! here are small enough that nothing fancier pays off.

use crate::error::{Error, Result};
use crate::ingest::ChoiceDataset;
use crate::model::{skip_line, Slate, WinnerTable};

#[derive(Clone, Debug)]
pub struct MnlModel {
    // Translation-normalized: utilities sum to zero.
    utilities: Vec<f64>,
}

impl MnlModel {
    pub fn n(&self) -> usize {
        self.utilities.len()
    }

    pub fn utilities(&self) -> &[f64] {
        &self.utilities
    }

    /// Softmax of utilities restricted to the slate; strictly positive,
    /// sums to 1.
    pub fn predict(&self, slate: &Slate) -> Vec<f64> {
        let utils: Vec<f64> = slate
            .items()
            .iter()
            .map(|i| self.utilities[i.index()])
            .collect();
        softmax(&utils)
    }

    /// Winner table of the model's predictions over the given slates.
    pub fn winner_table<'a>(&self, slates: impl Iterator<Item = &'a Slate>) -> Result<WinnerTable> {
        let entries: Vec<(Slate, Vec<f64>)> =
            slates.map(|s| (s.clone(), self.predict(s))).collect();
        WinnerTable::new(self.n(), entries)
    }

    /// Text form: header `mnl v1 n=<n>`, one utility per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("mnl v1 n={}\n", self.n());
        for u in &self.utilities {
            out.push_str(&format!("{u}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (hline, header) = lines
            .by_ref()
            .find(|(_, l)| !skip_line(l))
            .ok_or_else(|| Error::parse(0, "missing `mnl v1` header"))?;
        let n: usize = header
            .trim()
            .strip_prefix("mnl v1")
            .and_then(|rest| rest.trim().strip_prefix("n="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| {
                Error::parse(
                    hline + 1,
                    format!("expected `mnl v1 n=<n>`, got `{header}`"),
                )
            })?;
        let mut utilities = Vec::with_capacity(n);
        for (idx, line) in lines {
            if skip_line(line) {
                continue;
            }
            let u: f64 = line
                .trim()
                .parse()
                .map_err(|_| Error::parse(idx + 1, format!("bad utility `{line}`")))?;
            utilities.push(u);
        }
        if utilities.len() != n {
            return Err(Error::parse(
                0,
                format!("expected {n} utilities, got {}", utilities.len()),
            ));
        }
        Ok(MnlModel { utilities })
    }
}

fn softmax(utils: &[f64]) -> Vec<f64> {
    let max = utils.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let exps: Vec<f64> = utils.iter().map(|&u| (u - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

#[derive(Clone, Copy, Debug)]
pub struct MnlParams {
    pub iters: usize,
    pub step: f64,
    /// Stop when the gradient's max-norm falls to this.
    pub grad_tol: f64,
}

impl Default for MnlParams {
    fn default() -> Self {
        MnlParams {
            iters: 10_000,
            step: 1.0,
            grad_tol: 1e-6,
        }
    }
}

/// Maximum-likelihood fit. Items never observed keep utility zero (pinned by
/// the normalization); the fit proceeds regardless.
pub fn mnl_fit(ds: &ChoiceDataset, params: &MnlParams) -> Result<MnlModel> {
    mnl_fit_detailed(ds, params).map(|(m, _)| m)
}

/// Fit plus the per-accepted-step log-likelihood trace (average per
/// observation unit; non-decreasing).
pub fn mnl_fit_detailed(ds: &ChoiceDataset, params: &MnlParams) -> Result<(MnlModel, Vec<f64>)> {
    if ds.is_empty() {
        return Err(Error::invalid("empty dataset"));
    }
    let n = ds.n();
    let total = ds.total_count() as f64;

    let log_likelihood = |u: &[f64]| -> f64 {
        let mut ll = 0.0;
        for obs in ds.observations() {
            let utils: Vec<f64> = obs.slate.items().iter().map(|i| u[i.index()]).collect();
            let max = utils.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
            let lse = max + utils.iter().map(|&v| (v - max).exp()).sum::<f64>().ln();
            ll += obs.count as f64 * (u[obs.winner.index()] - lse);
        }
        ll / total
    };
    let gradient = |u: &[f64]| -> Vec<f64> {
        let mut g = vec![0.0; n];
        for obs in ds.observations() {
            let probs = {
                let utils: Vec<f64> = obs.slate.items().iter().map(|i| u[i.index()]).collect();
                softmax(&utils)
            };
            let c = obs.count as f64;
            g[obs.winner.index()] += c;
            for (item, p) in obs.slate.items().iter().zip(probs) {
                g[item.index()] -= c * p;
            }
        }
        for v in &mut g {
            *v /= total;
        }
        g
    };

    let mut u = vec![0.0f64; n];
    let mut ll = log_likelihood(&u);
    let mut trace = vec![ll];
    for _ in 0..params.iters {
        let g = gradient(&u);
        let gnorm = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if gnorm <= params.grad_tol {
            break;
        }
        let gsq: f64 = g.iter().map(|v| v * v).sum();
        let mut step = params.step;
        let mut accepted = false;
        while step > 1e-18 {
            let cand: Vec<f64> = u.iter().zip(&g).map(|(a, b)| a + step * b).collect();
            let cand_ll = log_likelihood(&cand);
            if cand_ll >= ll + 1e-4 * step * gsq {
                u = cand;
                ll = cand_ll;
                trace.push(ll);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break; // flat to machine precision
        }
    }
    // Shift to the zero-sum normalization (softmax is shift-invariant).
    let mean: f64 = u.iter().sum::<f64>() / n as f64;
    for v in &mut u {
        *v -= mean;
    }
    Ok((MnlModel { utilities: u }, trace))
}
