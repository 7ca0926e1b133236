//! Dataset ingestion: parsing raw preference files and expanding them into a
//! multiset of (k-slate, winner) observations.
//!
//! Three raw formats are supported (line oriented, UTF-8, blank lines and
//! `#` comments ignored):
//!
//! * rankings — one whitespace-separated full permutation per line, most
//!   preferred item first;
//! * ballots — header `n=<n>`, then one whitespace-separated ordered subset
//!   per line, most preferred first;
//! * slates — `i1,i2,...,im;winner[;count]` per line.
//!
//! Raw item ids in rankings and slates files may be arbitrary non-negative
//! integers; they are remapped to a dense 0-based universe (ascending raw
//! id), and the remap table travels with the parse result. Ballots files
//! declare their universe size in the header, so their ids must already be
//! dense 0-based values below `n`.

use crate::error::{Error, Result};
use crate::model::{parse_items, skip_line, ItemId, Permutation, Slate, WinnerTable};
use std::collections::BTreeMap;

/// One aggregated observation: `winner` chosen from `slate`, `count` times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceObservation {
    pub slate: Slate,
    pub winner: ItemId,
    pub count: u64,
}

/// An aggregated multiset of same-size slate/winner observations.
#[derive(Clone, Debug)]
pub struct ChoiceDataset {
    n: usize,
    k: usize,
    // Sorted by (slate, winner); duplicates merged by summing counts.
    observations: Vec<ChoiceObservation>,
    // Input records too short to yield any k-slate, dropped with a warning.
    skipped_short: usize,
}

impl ChoiceDataset {
    /// Merges raw (slate, winner, count) triples into canonical form.
    pub fn from_triples(n: usize, k: usize, triples: Vec<(Slate, ItemId, u64)>) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid(format!(
                "slate size k={k} must be at least 2"
            )));
        }
        let mut merged: BTreeMap<(Slate, ItemId), u64> = BTreeMap::new();
        for (slate, winner, count) in triples {
            if slate.len() != k {
                return Err(Error::invalid(format!(
                    "slate {slate} has size {}, expected {k}",
                    slate.len()
                )));
            }
            if !slate.contains(winner) {
                return Err(Error::invalid(format!(
                    "winner {winner} not in slate {slate}"
                )));
            }
            if let Some(big) = slate.items().iter().find(|i| i.index() >= n) {
                return Err(Error::invalid(format!("item {big} out of range for n={n}")));
            }
            if count == 0 {
                return Err(Error::invalid("observation count must be positive"));
            }
            *merged.entry((slate, winner)).or_insert(0) += count;
        }
        let observations = merged
            .into_iter()
            .map(|((slate, winner), count)| ChoiceObservation {
                slate,
                winner,
                count,
            })
            .collect();
        Ok(ChoiceDataset {
            n,
            k,
            observations,
            skipped_short: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn observations(&self) -> &[ChoiceObservation] {
        &self.observations
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// Total multiplicity across all observations.
    pub fn total_count(&self) -> u64 {
        self.observations.iter().map(|o| o.count).sum()
    }

    /// Number of raw input records skipped for being shorter than k.
    pub fn skipped_short(&self) -> usize {
        self.skipped_short
    }

    /// Canonical text form: header `k=<k> n=<n>`, then `i1,...,ik;winner;count`
    /// lines in ascending (slate, winner) order.
    pub fn to_canonical_text(&self) -> String {
        let mut out = format!("k={} n={}\n", self.k, self.n);
        for obs in &self.observations {
            out.push_str(&format!("{};{};{}\n", obs.slate, obs.winner, obs.count));
        }
        out
    }

    pub fn from_canonical_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (hline, header) = lines
            .by_ref()
            .find(|(_, l)| !skip_line(l))
            .ok_or_else(|| Error::parse(0, "missing `k=<k> n=<n>` header"))?;
        let (k, n) = parse_canonical_header(header)
            .ok_or_else(|| Error::parse(hline + 1, format!("bad header `{header}`")))?;
        let mut triples = Vec::new();
        for (idx, line) in lines {
            if skip_line(line) {
                continue;
            }
            let lineno = idx + 1;
            let mut parts = line.trim().split(';');
            let items = parse_csv_items(parts.next().unwrap_or(""), lineno)?;
            let winner = parse_winner(parts.next(), lineno)?;
            let count: u64 = match parts.next() {
                Some(c) => c
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad count `{c}`")))?,
                None => return Err(Error::parse(lineno, "missing count field")),
            };
            if parts.next().is_some() {
                return Err(Error::parse(lineno, "too many `;` fields"));
            }
            let slate = Slate::new(items).map_err(|e| Error::parse(lineno, e.to_string()))?;
            triples.push((slate, winner, count));
        }
        ChoiceDataset::from_triples(n, k, triples)
    }
}

fn parse_canonical_header(line: &str) -> Option<(usize, usize)> {
    let mut k = None;
    let mut n = None;
    for tok in line.split_whitespace() {
        if let Some(v) = tok.strip_prefix("k=") {
            k = v.parse().ok();
        } else {
            let v = tok.strip_prefix("n=")?;
            n = v.parse().ok();
        }
    }
    Some((k?, n?))
}

fn parse_csv_items(text: &str, lineno: usize) -> Result<Vec<ItemId>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u32>()
                .map(ItemId)
                .map_err(|_| Error::parse(lineno, format!("bad item id `{tok}`")))
        })
        .collect()
}

fn parse_winner(field: Option<&str>, lineno: usize) -> Result<ItemId> {
    let tok = field.ok_or_else(|| Error::parse(lineno, "missing winner field"))?;
    tok.trim()
        .parse::<u32>()
        .map(ItemId)
        .map_err(|_| Error::parse(lineno, format!("bad winner `{tok}`")))
}

/// Calls `f` for every k-subset of `items`, in lexicographic index order.
pub(crate) fn for_each_k_subset<T: Copy>(items: &[T], k: usize, mut f: impl FnMut(&[T])) {
    let m = items.len();
    if k == 0 || k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf: Vec<T> = idx.iter().map(|&i| items[i]).collect();
    loop {
        f(&buf);
        // Advance to the next combination.
        let mut pos = k;
        while pos > 0 {
            pos -= 1;
            if idx[pos] != pos + m - k {
                idx[pos] += 1;
                for later in pos + 1..k {
                    idx[later] = idx[later - 1] + 1;
                }
                for (slot, &i) in idx.iter().enumerate() {
                    buf[slot] = items[i];
                }
                break;
            }
            if pos == 0 {
                return;
            }
        }
    }
}

/// Number of k-subsets of an m-set.
pub fn binomial(m: usize, k: usize) -> u64 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (m - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Expands full rankings into every k-slate of the universe, winner set by
/// the ranking; counts aggregate across rankings.
pub fn expand_full_rankings(rankings: &[Permutation], k: usize) -> Result<ChoiceDataset> {
    let n = match rankings.first() {
        Some(pi) => pi.n(),
        None => return Err(Error::invalid("no rankings given")),
    };
    if k < 2 || k > n {
        return Err(Error::invalid(format!("k={k} out of range for n={n}")));
    }
    if let Some(bad) = rankings.iter().find(|pi| pi.n() != n) {
        return Err(Error::invalid(format!(
            "rankings mix universe sizes ({} vs {n})",
            bad.n()
        )));
    }
    let universe: Vec<ItemId> = (0..n as u32).map(ItemId).collect();
    let mut merged: BTreeMap<(Vec<ItemId>, ItemId), u64> = BTreeMap::new();
    for pi in rankings {
        for_each_k_subset(&universe, k, |subset| {
            let winner = *subset.iter().min_by_key(|i| pi.rank_of(**i)).unwrap();
            *merged.entry((subset.to_vec(), winner)).or_insert(0) += 1;
        });
    }
    let triples = merged
        .into_iter()
        .map(|((items, winner), count)| Ok((Slate::new(items)?, winner, count)))
        .collect::<Result<Vec<_>>>()?;
    ChoiceDataset::from_triples(n, k, triples)
}

/// Expands ordered ballots (subsets of the universe) into the k-slates of
/// each ballot's items, winner = the member ranked earliest in the ballot.
/// Ballots shorter than k yield nothing and are counted as skipped.
pub fn expand_partial_orders(ballots: &[Vec<ItemId>], n: usize, k: usize) -> Result<ChoiceDataset> {
    if k < 2 {
        return Err(Error::invalid(format!("k={k} must be at least 2")));
    }
    let mut merged: BTreeMap<(Vec<ItemId>, ItemId), u64> = BTreeMap::new();
    let mut skipped = 0usize;
    for ballot in ballots {
        let mut seen = vec![false; n];
        for &item in ballot {
            if item.index() >= n {
                return Err(Error::invalid(format!(
                    "ballot item {item} out of range for n={n}"
                )));
            }
            if seen[item.index()] {
                return Err(Error::invalid(format!("ballot repeats item {item}")));
            }
            seen[item.index()] = true;
        }
        if ballot.len() < k {
            skipped += 1;
            continue;
        }
        // position within the ballot = preference rank
        let mut ballot_rank = vec![usize::MAX; n];
        for (pos, &item) in ballot.iter().enumerate() {
            ballot_rank[item.index()] = pos;
        }
        for_each_k_subset(ballot, k, |subset| {
            let winner = *subset
                .iter()
                .min_by_key(|i| ballot_rank[i.index()])
                .unwrap();
            let mut items = subset.to_vec();
            items.sort_unstable();
            *merged.entry((items, winner)).or_insert(0) += 1;
        });
    }
    let triples = merged
        .into_iter()
        .map(|((items, winner), count)| Ok((Slate::new(items)?, winner, count)))
        .collect::<Result<Vec<_>>>()?;
    let mut ds = ChoiceDataset::from_triples(n, k, triples)?;
    ds.skipped_short = skipped;
    Ok(ds)
}

/// Expands (slate, winner) records of any size >= k into all k-subsets that
/// contain the winner, each keeping the original winner. Records smaller
/// than k are skipped with a warning count.
pub fn augment_winner_slates(
    records: &[(Vec<ItemId>, ItemId, u64)],
    k: usize,
) -> Result<ChoiceDataset> {
    if k < 2 {
        return Err(Error::invalid(format!("k={k} must be at least 2")));
    }
    let n = records
        .iter()
        .flat_map(|(items, _, _)| items.iter())
        .map(|i| i.index() + 1)
        .max()
        .ok_or_else(|| Error::invalid("no records given"))?;
    let mut merged: BTreeMap<(Vec<ItemId>, ItemId), u64> = BTreeMap::new();
    let mut skipped = 0usize;
    for (items, winner, count) in records {
        if !items.contains(winner) {
            return Err(Error::invalid(format!("winner {winner} not in its slate")));
        }
        if items.len() < k {
            skipped += 1;
            continue;
        }
        let rest: Vec<ItemId> = items.iter().copied().filter(|i| i != winner).collect();
        if rest.len() + 1 != items.len() {
            return Err(Error::invalid("record slate contains duplicate items"));
        }
        for_each_k_subset(&rest, k - 1, |companions| {
            let mut slate_items = companions.to_vec();
            slate_items.push(*winner);
            slate_items.sort_unstable();
            *merged.entry((slate_items, *winner)).or_insert(0) += count;
        });
    }
    let triples = merged
        .into_iter()
        .map(|((items, winner), count)| Ok((Slate::new(items)?, winner, count)))
        .collect::<Result<Vec<_>>>()?;
    let mut ds = ChoiceDataset::from_triples(n, k, triples)?;
    ds.skipped_short = skipped;
    Ok(ds)
}

/// Per-slate empirical winner frequencies.
pub fn empirical_distributions(ds: &ChoiceDataset) -> Result<WinnerTable> {
    if ds.is_empty() {
        return Err(Error::invalid("empty dataset"));
    }
    let mut entries: Vec<(Slate, Vec<f64>)> = Vec::new();
    let mut idx = 0;
    let obs = ds.observations();
    while idx < obs.len() {
        let slate = obs[idx].slate.clone();
        let mut weights = vec![0.0f64; slate.len()];
        let mut total = 0u64;
        while idx < obs.len() && obs[idx].slate == slate {
            let at = slate
                .member_index(obs[idx].winner)
                .expect("winner in slate");
            weights[at] += obs[idx].count as f64;
            total += obs[idx].count;
            idx += 1;
        }
        for w in &mut weights {
            *w /= total as f64;
        }
        entries.push((slate, weights));
    }
    WinnerTable::new(ds.n(), entries)
}

/// Parsed rankings file plus the raw-id remap (`remap[new] = raw`).
#[derive(Debug)]
pub struct ParsedRankings {
    pub rankings: Vec<Permutation>,
    pub remap: Vec<u64>,
}

pub fn parse_rankings_file(text: &str) -> Result<ParsedRankings> {
    let mut raw_lines: Vec<(usize, Vec<u64>)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if skip_line(line) {
            continue;
        }
        let lineno = idx + 1;
        let ids = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u64>()
                    .map_err(|_| Error::parse(lineno, format!("bad item id `{tok}`")))
            })
            .collect::<Result<Vec<u64>>>()?;
        raw_lines.push((lineno, ids));
    }
    let first = raw_lines
        .first()
        .ok_or_else(|| Error::parse(0, "rankings file contains no data lines"))?;
    let mut remap: Vec<u64> = first.1.clone();
    remap.sort_unstable();
    remap.dedup();
    if remap.len() != first.1.len() {
        return Err(Error::parse(first.0, "ranking repeats an item"));
    }
    let position = |raw: u64, lineno: usize| -> Result<u32> {
        remap.binary_search(&raw).map(|i| i as u32).map_err(|_| {
            Error::parse(
                lineno,
                format!("item `{raw}` not in the universe of line 1"),
            )
        })
    };
    let mut rankings = Vec::with_capacity(raw_lines.len());
    for (lineno, ids) in &raw_lines {
        if ids.len() != remap.len() {
            return Err(Error::parse(
                *lineno,
                format!("expected {} items, got {}", remap.len(), ids.len()),
            ));
        }
        let order = ids
            .iter()
            .map(|&raw| position(raw, *lineno).map(ItemId))
            .collect::<Result<Vec<_>>>()?;
        rankings.push(Permutation::new(order).map_err(|e| Error::parse(*lineno, e.to_string()))?);
    }
    Ok(ParsedRankings { rankings, remap })
}

/// Parsed ballots file: ordered subsets over a declared universe `0..n`.
#[derive(Debug)]
pub struct ParsedBallots {
    pub ballots: Vec<Vec<ItemId>>,
    pub n: usize,
}

pub fn parse_ballots_file(text: &str) -> Result<ParsedBallots> {
    let mut lines = text.lines().enumerate();
    let (hline, header) = lines
        .by_ref()
        .find(|(_, l)| !skip_line(l))
        .ok_or_else(|| Error::parse(0, "missing `n=<n>` header"))?;
    let n: usize = header
        .trim()
        .strip_prefix("n=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::parse(hline + 1, format!("expected `n=<n>`, got `{header}`")))?;
    let mut ballots = Vec::new();
    for (idx, line) in lines {
        if skip_line(line) {
            continue;
        }
        let lineno = idx + 1;
        let items = parse_items(line, lineno)?;
        if let Some(big) = items.iter().find(|i| i.index() >= n) {
            return Err(Error::parse(
                lineno,
                format!("item {big} out of range for n={n}"),
            ));
        }
        ballots.push(items);
    }
    Ok(ParsedBallots { ballots, n })
}

/// Parsed slates file plus the raw-id remap.
#[derive(Debug)]
pub struct ParsedSlates {
    pub records: Vec<(Vec<ItemId>, ItemId, u64)>,
    pub remap: Vec<u64>,
}

pub fn parse_slates_file(text: &str) -> Result<ParsedSlates> {
    struct RawRecord {
        lineno: usize,
        items: Vec<u64>,
        winner: u64,
        count: u64,
    }
    let mut raw = Vec::new();
    let mut ids: Vec<u64> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if skip_line(line) {
            continue;
        }
        let lineno = idx + 1;
        let mut parts = line.trim().split(';');
        let items = parts
            .next()
            .unwrap_or("")
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::parse(lineno, format!("bad item id `{tok}`")))
            })
            .collect::<Result<Vec<u64>>>()?;
        let winner: u64 = parts
            .next()
            .ok_or_else(|| Error::parse(lineno, "missing winner field"))?
            .trim()
            .parse()
            .map_err(|_| Error::parse(lineno, "bad winner"))?;
        let count: u64 = match parts.next() {
            Some(c) => c
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad count `{c}`")))?,
            None => 1,
        };
        if parts.next().is_some() {
            return Err(Error::parse(lineno, "too many `;` fields"));
        }
        if !items.contains(&winner) {
            return Err(Error::parse(
                lineno,
                format!("winner {winner} not among slate items"),
            ));
        }
        ids.extend_from_slice(&items);
        raw.push(RawRecord {
            lineno,
            items,
            winner,
            count,
        });
    }
    if raw.is_empty() {
        return Err(Error::parse(0, "slates file contains no data lines"));
    }
    ids.sort_unstable();
    ids.dedup();
    let remap = ids;
    let to_dense = |raw_id: u64| ItemId(remap.binary_search(&raw_id).unwrap() as u32);
    let mut records = Vec::with_capacity(raw.len());
    for rec in raw {
        let mut dense: Vec<ItemId> = rec.items.iter().map(|&i| to_dense(i)).collect();
        dense.sort_unstable();
        if dense.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::parse(rec.lineno, "slate contains duplicate items"));
        }
        records.push((dense, to_dense(rec.winner), rec.count));
    }
    Ok(ParsedSlates { records, remap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::slate;

    fn perm(order: &[u32]) -> Permutation {
        Permutation::new(order.iter().copied().map(ItemId).collect()).unwrap()
    }

    #[test]
    fn full_rankings_pairwise_example() {
        // Ranking 0 > 1 > 2 at k=2 yields each pair once, won by the earlier item.
        let ds = expand_full_rankings(&[perm(&[0, 1, 2])], 2).unwrap();
        let expect = vec![
            (slate(&[0, 1]), ItemId(0), 1),
            (slate(&[0, 2]), ItemId(0), 1),
            (slate(&[1, 2]), ItemId(1), 1),
        ];
        let got: Vec<_> = ds
            .observations()
            .iter()
            .map(|o| (o.slate.clone(), o.winner, o.count))
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn full_rankings_counts() {
        let one = expand_full_rankings(&[Permutation::identity(10)], 3).unwrap();
        assert_eq!(one.total_count(), 120); // C(10,3)
        assert_eq!(one.observations().len(), 120);

        let two = expand_full_rankings(&[perm(&[2, 0, 1]), perm(&[2, 0, 1])], 2).unwrap();
        assert!(two.observations().iter().all(|o| o.count == 2));
        assert_eq!(two.observations().len(), 3);
    }

    #[test]
    fn full_rankings_unit_count_invariant() {
        for k in 2..=4 {
            let rankings = vec![
                perm(&[4, 2, 0, 3, 1]),
                perm(&[1, 3, 0, 2, 4]),
                Permutation::identity(5),
            ];
            let ds = expand_full_rankings(&rankings, k).unwrap();
            assert_eq!(ds.total_count(), 3 * binomial(5, k));
        }
    }

    #[test]
    fn partial_orders_examples() {
        // ballot [3,1]: slate {1,3} won by 3
        let ds = expand_partial_orders(&[vec![ItemId(3), ItemId(1)]], 4, 2).unwrap();
        assert_eq!(ds.observations().len(), 1);
        assert_eq!(ds.observations()[0].slate, slate(&[1, 3]));
        assert_eq!(ds.observations()[0].winner, ItemId(3));

        // too-short ballot contributes nothing
        let short =
            expand_partial_orders(&[vec![ItemId(2)], vec![ItemId(0), ItemId(1)]], 3, 2).unwrap();
        assert_eq!(short.skipped_short(), 1);
        assert_eq!(short.observations().len(), 1);

        // ballot [4,2,7] at k=2: {2,4}w4, {4,7}w4, {2,7}w2
        let ds = expand_partial_orders(&[vec![ItemId(4), ItemId(2), ItemId(7)]], 8, 2).unwrap();
        let got: Vec<_> = ds
            .observations()
            .iter()
            .map(|o| (o.slate.clone(), o.winner))
            .collect();
        assert_eq!(
            got,
            vec![
                (slate(&[2, 4]), ItemId(4)),
                (slate(&[2, 7]), ItemId(2)),
                (slate(&[4, 7]), ItemId(4)),
            ]
        );
    }

    #[test]
    fn ballot_duplicates_rejected() {
        let err = expand_partial_orders(&[vec![ItemId(1), ItemId(1)]], 3, 2);
        assert!(err.is_err());
    }

    #[test]
    fn augment_examples() {
        // ({0,1,2,3}, w=1) at k=2 -> 3 slates all won by 1
        let ds = augment_winner_slates(
            &[(
                vec![ItemId(0), ItemId(1), ItemId(2), ItemId(3)],
                ItemId(1),
                1,
            )],
            2,
        )
        .unwrap();
        assert_eq!(ds.observations().len(), 3);
        assert!(ds.observations().iter().all(|o| o.winner == ItemId(1)));

        // already size k: identity
        let same = augment_winner_slates(&[(vec![ItemId(0), ItemId(1)], ItemId(0), 1)], 2).unwrap();
        assert_eq!(same.observations().len(), 1);

        // ({0..4}, w=2) at k=3 -> C(4,2)=6 slates
        let six = augment_winner_slates(
            &[(
                vec![ItemId(0), ItemId(1), ItemId(2), ItemId(3), ItemId(4)],
                ItemId(2),
                1,
            )],
            3,
        )
        .unwrap();
        assert_eq!(six.observations().len(), 6);
        assert!(six.observations().iter().all(|o| o.winner == ItemId(2)));
    }

    #[test]
    fn augment_rejects_foreign_winner() {
        let err = augment_winner_slates(&[(vec![ItemId(0), ItemId(1)], ItemId(2), 1)], 2);
        assert!(err.is_err());
    }

    #[test]
    fn empirical_frequency_examples() {
        let ds = ChoiceDataset::from_triples(
            2,
            2,
            vec![
                (slate(&[0, 1]), ItemId(0), 3),
                (slate(&[0, 1]), ItemId(1), 1),
            ],
        )
        .unwrap();
        let table = empirical_distributions(&ds).unwrap();
        assert_eq!(table.distribution(&slate(&[0, 1])).unwrap(), &[0.75, 0.25]);

        let even = ChoiceDataset::from_triples(
            2,
            2,
            vec![
                (slate(&[0, 1]), ItemId(0), 5),
                (slate(&[0, 1]), ItemId(1), 5),
            ],
        )
        .unwrap();
        let t = empirical_distributions(&even).unwrap();
        assert_eq!(t.distribution(&slate(&[0, 1])).unwrap(), &[0.5, 0.5]);
    }

    #[test]
    fn expansion_is_order_insensitive() {
        let a = vec![perm(&[2, 0, 1]), perm(&[1, 2, 0]), Permutation::identity(3)];
        let mut b = a.clone();
        b.reverse();
        let da = expand_full_rankings(&a, 2).unwrap();
        let db = expand_full_rankings(&b, 2).unwrap();
        assert_eq!(da.observations(), db.observations());
    }

    #[test]
    fn canonical_text_roundtrip() {
        let ds = ChoiceDataset::from_triples(
            4,
            2,
            vec![
                (slate(&[0, 3]), ItemId(3), 2),
                (slate(&[1, 2]), ItemId(1), 7),
            ],
        )
        .unwrap();
        let text = ds.to_canonical_text();
        assert!(text.starts_with("k=2 n=4\n"));
        let back = ChoiceDataset::from_canonical_text(&text).unwrap();
        assert_eq!(back.observations(), ds.observations());
        assert_eq!(back.n(), 4);
    }

    #[test]
    fn parse_rankings_remaps_sparse_ids() {
        let parsed = parse_rankings_file("# a comment\n30 10 20\n10 30 20\n").unwrap();
        assert_eq!(parsed.remap, vec![10, 20, 30]);
        assert_eq!(
            parsed.rankings[0].order(),
            &[ItemId(2), ItemId(0), ItemId(1)]
        );
        // line with an unknown id fails with its line number
        let err = parse_rankings_file("1 2\n1 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn parse_ballots_checks_range() {
        let parsed = parse_ballots_file("n=4\n3 1\n\n# c\n2\n").unwrap();
        assert_eq!(parsed.n, 4);
        assert_eq!(parsed.ballots.len(), 2);
        assert!(parse_ballots_file("n=2\n5\n").is_err());
        assert!(parse_ballots_file("2 1\n").is_err()); // header missing
    }

    #[test]
    fn parse_slates_with_counts_and_remap() {
        let parsed = parse_slates_file("5,9,7;9\n5,7;5;4\n").unwrap();
        assert_eq!(parsed.remap, vec![5, 7, 9]);
        assert_eq!(parsed.records[0].1, ItemId(2));
        assert_eq!(parsed.records[1].2, 4);
        assert!(parse_slates_file("1,2;3\n").is_err()); // winner not in slate
    }

    #[test]
    fn empirical_table_is_normalized_per_slate() {
        let rankings = vec![
            perm(&[3, 1, 4, 0, 2]),
            perm(&[0, 2, 4, 1, 3]),
            perm(&[2, 4, 1, 3, 0]),
        ];
        let ds = expand_full_rankings(&rankings, 3).unwrap();
        let table = empirical_distributions(&ds).unwrap();
        for (_, dist) in table.entries() {
            let sum: f64 = dist.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
        assert_eq!(table.len() as u64, binomial(5, 3));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn shuffled_records_aggregate_identically(
                seedswaps in proptest::collection::vec(0usize..1000, 8)
            ) {
                let base: Vec<(Vec<ItemId>, ItemId, u64)> = vec![
                    (vec![ItemId(0), ItemId(1), ItemId(2)], ItemId(1), 2),
                    (vec![ItemId(1), ItemId(2), ItemId(3)], ItemId(3), 1),
                    (vec![ItemId(0), ItemId(2), ItemId(3)], ItemId(0), 5),
                    (vec![ItemId(0), ItemId(1), ItemId(2)], ItemId(1), 1),
                ];
                let mut shuffled = base.clone();
                for (i, s) in seedswaps.iter().enumerate() {
                    let a = i % shuffled.len();
                    let b = s % shuffled.len();
                    shuffled.swap(a, b);
                }
                let da = augment_winner_slates(&base, 2).unwrap();
                let db = augment_winner_slates(&shuffled, 2).unwrap();
                prop_assert_eq!(da.observations(), db.observations());
            }
        }
    }
}
