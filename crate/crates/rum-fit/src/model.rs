//! Items, slates, permutations, RUMs and winner distributions — the shared
//! vocabulary of every other module.
//!
//! Orientation convention used throughout the crate: permutations are stored
//! highest-rank-first, i.e. `order[0]` is the most preferred item. All types
//! are immutable after construction and safe to share across threads.

use crate::error::{Error, Result};
use std::collections::HashSet;
use std::fmt;

/// Tolerance for probability-vector normalization checks.
pub const PROB_TOL: f64 = 1e-9;

/// Index of an item in the dense universe `0..n`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ItemId(pub u32);

impl ItemId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A set of at least two distinct items, canonicalized to ascending order so
/// slates can key maps deterministically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Slate(Vec<ItemId>);

impl Slate {
    /// Builds a slate from any ordering of distinct items; sorts internally.
    pub fn new(mut items: Vec<ItemId>) -> Result<Self> {
        if items.len() < 2 {
            return Err(Error::invalid(format!(
                "slate must contain at least 2 items, got {}",
                items.len()
            )));
        }
        items.sort_unstable();
        if items.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("slate contains duplicate items"));
        }
        Ok(Slate(items))
    }

    pub fn items(&self) -> &[ItemId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees len >= 2
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    /// Position of `item` within the sorted member list.
    pub fn member_index(&self, item: ItemId) -> Option<usize> {
        self.0.binary_search(&item).ok()
    }
}

impl fmt::Display for Slate {
    /// Members comma-separated, e.g. `1,4,7`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (pos, it) in self.0.iter().enumerate() {
            if pos > 0 {
                write!(f, ",")?;
            }
            write!(f, "{it}")?;
        }
        Ok(())
    }
}

/// A total order over the universe; `order[0]` is the most preferred item.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Permutation {
    order: Vec<ItemId>,
    // rank[item] = position in `order`; kept so winners resolve in O(k).
    rank: Vec<u32>,
}

impl Permutation {
    /// Validates that `order` is a bijection on `0..order.len()`.
    pub fn new(order: Vec<ItemId>) -> Result<Self> {
        let n = order.len();
        if n == 0 {
            return Err(Error::invalid("permutation must be nonempty"));
        }
        let mut rank = vec![u32::MAX; n];
        for (pos, &item) in order.iter().enumerate() {
            let idx = item.index();
            if idx >= n {
                return Err(Error::invalid(format!(
                    "item {item} out of range for universe of size {n}"
                )));
            }
            if rank[idx] != u32::MAX {
                return Err(Error::invalid(format!(
                    "item {item} repeated in permutation"
                )));
            }
            rank[idx] = pos as u32;
        }
        Ok(Permutation { order, rank })
    }

    /// The identity permutation `0,1,...,n-1`.
    pub fn identity(n: usize) -> Self {
        Permutation::new((0..n as u32).map(ItemId).collect()).expect("identity is valid")
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[ItemId] {
        &self.order
    }

    /// 0-based position of `item`; 0 means most preferred.
    pub fn rank_of(&self, item: ItemId) -> usize {
        self.rank[item.index()] as usize
    }

    /// The slate member this permutation ranks highest.
    pub fn winner(&self, slate: &Slate) -> ItemId {
        debug_assert!(slate.items().iter().all(|i| i.index() < self.n()));
        *slate
            .items()
            .iter()
            .min_by_key(|i| self.rank[i.index()])
            .expect("slate is nonempty")
    }
}

/// A random utility model: a finitely supported distribution on permutations.
#[derive(Clone, Debug)]
pub struct Rum {
    support: Vec<(Permutation, f64)>,
    n: usize,
}

impl Rum {
    /// Validates distinct permutations over one universe, probabilities in
    /// `[0,1]` summing to 1 within [`PROB_TOL`].
    pub fn new(support: Vec<(Permutation, f64)>) -> Result<Self> {
        let n = match support.first() {
            Some((pi, _)) => pi.n(),
            None => return Err(Error::invalid("RUM support must be nonempty")),
        };
        let mut total = 0.0;
        let mut seen = HashSet::with_capacity(support.len());
        for (pi, p) in &support {
            if pi.n() != n {
                return Err(Error::invalid("RUM support mixes universe sizes"));
            }
            if !(0.0..=1.0 + PROB_TOL).contains(p) {
                return Err(Error::invalid(format!("probability {p} outside [0,1]")));
            }
            if !seen.insert(pi.order().to_vec()) {
                return Err(Error::invalid(
                    "RUM support contains a repeated permutation",
                ));
            }
            total += p;
        }
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::invalid(format!(
                "support probabilities sum to {total}, not 1"
            )));
        }
        Ok(Rum { support, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &[(Permutation, f64)] {
        &self.support
    }

    /// Probability vector of the slate winner, aligned with the slate's
    /// sorted member list. Entries sum to 1 up to float rounding.
    pub fn winner_distribution(&self, slate: &Slate) -> Vec<f64> {
        let mut dist = vec![0.0; slate.len()];
        for (pi, p) in &self.support {
            let w = pi.winner(slate);
            dist[slate.member_index(w).expect("winner is a member")] += p;
        }
        dist
    }

    /// Text form: header `rum v1 n=<n>`, then one support line per
    /// permutation, `probability<TAB>item item ...`, highest rank first.
    pub fn to_text(&self) -> String {
        let mut out = format!("rum v1 n={}\n", self.n);
        for (pi, p) in &self.support {
            out.push_str(&format!("{p}\t"));
            let items: Vec<String> = pi.order().iter().map(|i| i.to_string()).collect();
            out.push_str(&items.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (hline, header) = lines
            .by_ref()
            .find(|(_, l)| !skip_line(l))
            .ok_or_else(|| Error::parse(0, "missing `rum v1` header"))?;
        let n = parse_rum_header(header).ok_or_else(|| {
            Error::parse(
                hline + 1,
                format!("expected `rum v1 n=<n>`, got `{header}`"),
            )
        })?;
        let mut support = Vec::new();
        for (idx, line) in lines {
            if skip_line(line) {
                continue;
            }
            let lineno = idx + 1;
            let (prob, perm) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(lineno, "expected `probability<TAB>items`"))?;
            let p: f64 = prob
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad probability `{prob}`")))?;
            let order = parse_items(perm, lineno)?;
            if order.len() != n {
                return Err(Error::parse(
                    lineno,
                    format!("expected {n} items, got {}", order.len()),
                ));
            }
            let pi = Permutation::new(order).map_err(|e| Error::parse(lineno, e.to_string()))?;
            support.push((pi, p));
        }
        Rum::new(support)
    }
}

fn parse_rum_header(line: &str) -> Option<usize> {
    let rest = line.trim().strip_prefix("rum v1")?.trim();
    rest.strip_prefix("n=")?.trim().parse().ok()
}

pub(crate) fn skip_line(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

pub(crate) fn parse_items(text: &str, lineno: usize) -> Result<Vec<ItemId>> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<u32>()
                .map(ItemId)
                .map_err(|_| Error::parse(lineno, format!("bad item id `{tok}`")))
        })
        .collect()
}

/// Empirical (or model-induced) winner distribution per slate. All slates
/// share one size k; vectors align with each slate's sorted members.
#[derive(Clone, Debug)]
pub struct WinnerTable {
    n: usize,
    k: usize,
    // Sorted by slate for deterministic iteration and binary-search lookup.
    entries: Vec<(Slate, Vec<f64>)>,
}

impl WinnerTable {
    pub fn new(n: usize, mut entries: Vec<(Slate, Vec<f64>)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid(
                "winner table must contain at least one slate",
            ));
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let k = entries[0].0.len();
        if k < 2 {
            return Err(Error::invalid("slate size k must be at least 2"));
        }
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::invalid(format!("duplicate slate {}", w[0].0)));
            }
        }
        for (slate, dist) in &entries {
            if slate.len() != k {
                return Err(Error::invalid(format!(
                    "slate {slate} has size {}, expected {k}",
                    slate.len()
                )));
            }
            if let Some(big) = slate.items().iter().find(|i| i.index() >= n) {
                return Err(Error::invalid(format!("item {big} out of range for n={n}")));
            }
            if dist.len() != k {
                return Err(Error::invalid(
                    "distribution length does not match slate size",
                ));
            }
            let mut sum = 0.0;
            for &p in dist {
                if !(-PROB_TOL..=1.0 + PROB_TOL).contains(&p) {
                    return Err(Error::invalid(format!("probability {p} outside [0,1]")));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > PROB_TOL {
                return Err(Error::invalid(format!(
                    "distribution on slate {slate} sums to {sum}, not 1"
                )));
            }
        }
        Ok(WinnerTable { n, k, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Slates in canonical ascending order with their distributions.
    pub fn entries(&self) -> &[(Slate, Vec<f64>)] {
        &self.entries
    }

    pub fn slates(&self) -> impl Iterator<Item = &Slate> {
        self.entries.iter().map(|(s, _)| s)
    }

    pub fn distribution(&self, slate: &Slate) -> Option<&[f64]> {
        self.entries
            .binary_search_by(|(s, _)| s.cmp(slate))
            .ok()
            .map(|i| self.entries[i].1.as_slice())
    }
}

/// Sum of absolute differences of two aligned probability vectors; in
/// `[0, 2]` for normalized inputs.
pub fn l1_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::invalid(format!(
            "l1 distance of vectors with lengths {} and {}",
            p.len(),
            q.len()
        )));
    }
    Ok(p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum())
}

/// Mean over the table's slates of the l1 error between the RUM's winner
/// distribution and the table's distribution.
pub fn average_l1_error(rum: &Rum, table: &WinnerTable) -> Result<f64> {
    if rum.n() != table.n() {
        return Err(Error::invalid("RUM and table universe sizes differ"));
    }
    let mut total = 0.0;
    for (slate, dist) in table.entries() {
        total += l1_distance(&rum.winner_distribution(slate), dist)?;
    }
    Ok(total / table.len() as f64)
}

/// Convenience constructor used across tests and demos.
pub fn slate(items: &[u32]) -> Slate {
    Slate::new(items.iter().copied().map(ItemId).collect()).expect("valid slate literal")
}
