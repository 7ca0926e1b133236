//! End-to-end flow through the public API: raw text in, fitted model and
//! evaluation artifacts out.

use rum_fit::eval::{cross_validate, error_cdf, rmse, CvConfig, CvModel};
use rum_fit::fit::{fit_rum, FitConfig};
use rum_fit::ingest::{
    empirical_distributions, expand_full_rankings, parse_rankings_file, ChoiceDataset,
};
use rum_fit::mnl::{mnl_fit, MnlParams};
use rum_fit::model::average_l1_error;
use rum_fit::Rum;

const RANKINGS: &str = "\
# five voters over four items
2 0 3 1
2 0 3 1
0 1 2 3
3 2 0 1
2 3 0 1
";

#[test]
fn rankings_to_fit_to_artifacts() {
    let parsed = parse_rankings_file(RANKINGS).unwrap();
    let ds = expand_full_rankings(&parsed.rankings, 2).unwrap();
    let table = empirical_distributions(&ds).unwrap();
    assert_eq!(table.len(), 6); // C(4,2)

    let cfg = FitConfig {
        seed: 5,
        stall_window: usize::MAX >> 1,
        ..FitConfig::default()
    };
    let report = fit_rum(&table, &cfg).unwrap();
    assert!(report.converged);

    // The reported error matches a recomputation from the returned model,
    // and the model survives its own text format.
    let reread = Rum::from_text(&report.rum.to_text()).unwrap();
    let recomputed = average_l1_error(&reread, &table).unwrap();
    assert!((recomputed - report.average_error).abs() <= 1e-12);

    // Certificate sandwiches the achieved error.
    let lb = report.lower_bound.unwrap();
    assert!(lb <= report.average_error);
    assert!(report.average_error - lb <= 1e-6);

    // CDF mean agrees with the average error.
    let cdf = error_cdf(&report.rum, &table).unwrap();
    assert!((cdf.mean() - report.average_error).abs() <= 1e-9);

    // Model-induced table scores zero RMSE against itself.
    let induced = report
        .rum
        .support()
        .first()
        .map(|_| {
            let entries = table
                .entries()
                .iter()
                .map(|(s, _)| (s.clone(), report.rum.winner_distribution(s)))
                .collect();
            rum_fit::model::WinnerTable::new(table.n(), entries).unwrap()
        })
        .unwrap();
    assert!(rmse(&induced, &induced).unwrap() == 0.0);
}

#[test]
fn canonical_text_feeds_cross_validation_and_mnl() {
    let parsed = parse_rankings_file(RANKINGS).unwrap();
    let ds = expand_full_rankings(&parsed.rankings, 2).unwrap();
    let roundtrip = ChoiceDataset::from_canonical_text(&ds.to_canonical_text()).unwrap();
    assert_eq!(roundtrip.observations(), ds.observations());

    let mnl = mnl_fit(&roundtrip, &MnlParams::default()).unwrap();
    assert_eq!(mnl.n(), 4);

    let cv = CvConfig {
        seeds: vec![1, 2],
        ..CvConfig::default()
    }
    .with_base_seed(3);
    let report = cross_validate(&roundtrip, &cv, CvModel::TrainTensor).unwrap();
    assert_eq!(report.cells.len(), 10);
    assert!(report.mean.is_finite());
}
