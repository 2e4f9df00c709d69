//! Single-linkage threshold sweep scored by entropy payload.
//!
//! Two points share a cluster at threshold `t` when a chain of pairs, each at
//! distance `<= t`, joins them. Those components are exactly the components
//! obtained by applying every minimum spanning tree edge of weight `<= t`, so
//! the tree's sorted edges (the merge schedule) enumerate every distinct
//! partition. The sweep scores each one and keeps the entropy-payload maximum.

use std::cmp::{Ordering, Reverse};
use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::dataset::{Dataset, Metric};
use crate::dsu::DisjointSet;
use crate::entropy::{entropy, entropy_of_counts, ClusterSizes, LogBase};
use crate::error::{Error, Result};

/// One minimum spanning tree edge, `point_a < point_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeEvent {
    pub threshold: f64,
    pub point_a: usize,
    pub point_b: usize,
}

/// Minimum spanning tree edges of the complete distance graph, sorted by
/// weight and then by index pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeSchedule {
    n_points: usize,
    events: Vec<MergeEvent>,
    thresholds: Vec<f64>,
}

impl MergeSchedule {
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn events(&self) -> &[MergeEvent] {
        &self.events
    }

    /// Candidate thresholds: `0` followed by the distinct positive edge weights.
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Disjoint-set state after applying every event with weight `<= t`.
    pub(crate) fn components_at(&self, t: f64) -> DisjointSet {
        let mut dsu = DisjointSet::new(self.n_points);
        for ev in self.events.iter().take_while(|ev| ev.threshold <= t) {
            dsu.union(ev.point_a, ev.point_b);
        }
        dsu
    }
}

/// Builds the merge schedule with a dense O(N²) Prim pass.
///
/// Equal distances are resolved toward the smallest `(point_a, point_b)`
/// pair, so the schedule is fully determined by the input.
pub fn build_schedule(data: &Dataset, metric: Metric) -> MergeSchedule {
    let n = data.len();
    let mut events = Vec::with_capacity(n.saturating_sub(1));
    if n > 1 {
        let mut in_tree = vec![false; n];
        let mut best = vec![f64::INFINITY; n];
        let mut link = vec![usize::MAX; n];
        let mut current = 0;
        in_tree[0] = true;
        for _ in 1..n {
            let here = data.point(current);
            let mut next = usize::MAX;
            for j in 0..n {
                if in_tree[j] {
                    continue;
                }
                let d = metric.distance(here, data.point(j));
                if d < best[j] || (d == best[j] && ordered(current, j) < ordered(link[j], j)) {
                    best[j] = d;
                    link[j] = current;
                }
                if next == usize::MAX
                    || best[j] < best[next]
                    || (best[j] == best[next]
                        && ordered(link[j], j) < ordered(link[next], next))
                {
                    next = j;
                }
            }
            in_tree[next] = true;
            let (a, b) = ordered(link[next], next);
            events.push(MergeEvent {
                threshold: best[next],
                point_a: a,
                point_b: b,
            });
            current = next;
        }
        events.sort_by(|x, y| {
            x.threshold
                .total_cmp(&y.threshold)
                .then((x.point_a, x.point_b).cmp(&(y.point_a, y.point_b)))
        });
    }

    let mut thresholds = vec![0.0];
    for ev in &events {
        if ev.threshold > *thresholds.last().unwrap() {
            thresholds.push(ev.threshold);
        }
    }
    MergeSchedule {
        n_points: n,
        events,
        thresholds,
    }
}

#[inline]
fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Assignment of every point to a cluster at one threshold.
///
/// Labels are canonical: cluster 0 is the largest, equal sizes are ordered by
/// their smallest member index.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    labels: Vec<usize>,
    threshold: f64,
    sizes: ClusterSizes,
}

impl Partition {
    pub(crate) fn from_components(dsu: &mut DisjointSet, threshold: f64) -> Self {
        let n = dsu.len();
        let mut slot_of_root = vec![usize::MAX; n];
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let root = dsu.find(i);
            if slot_of_root[root] == usize::MAX {
                slot_of_root[root] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot_of_root[root]].push(i);
        }
        // groups are already ordered by smallest member; the stable sort keeps that for ties
        groups.sort_by_key(|g| Reverse(g.len()));
        let mut labels = vec![0; n];
        for (label, g) in groups.iter().enumerate() {
            for &i in g {
                labels[i] = label;
            }
        }
        let sizes = ClusterSizes::with_total(groups.iter().map(Vec::len).collect(), n)
            .expect("components cover every point");
        Partition {
            labels,
            threshold,
            sizes,
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn cluster_sizes(&self) -> &ClusterSizes {
        &self.sizes
    }

    pub fn n_clusters(&self) -> usize {
        self.sizes.len()
    }

    /// Member indices of every cluster, in label order; members ascending.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self
            .sizes
            .sizes()
            .iter()
            .map(|&k| Vec::with_capacity(k))
            .collect();
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    /// JSON partition document.
    pub fn to_document(&self, ep: f64) -> PartitionDocument {
        PartitionDocument {
            threshold: self.threshold,
            ep,
            n_clusters: self.n_clusters(),
            clusters: self.clusters(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionDocument {
    pub threshold: f64,
    pub ep: f64,
    pub n_clusters: usize,
    pub clusters: Vec<Vec<usize>>,
}

/// Single-linkage partition at threshold `t` (inclusive).
pub fn partition_at(schedule: &MergeSchedule, t: f64) -> Result<Partition> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::OutOfDomain(format!(
            "threshold {t} must be a non-negative real"
        )));
    }
    let mut dsu = schedule.components_at(t);
    Ok(Partition::from_components(&mut dsu, t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpRow {
    pub threshold: f64,
    pub n_clusters: usize,
    pub entropy: f64,
    pub ep: f64,
}

/// Entropy payload of every candidate threshold, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EpReport {
    rows: Vec<EpRow>,
    best_index: usize,
}

impl EpReport {
    pub fn rows(&self) -> &[EpRow] {
        &self.rows
    }

    pub fn best_index(&self) -> usize {
        self.best_index
    }

    pub fn best(&self) -> &EpRow {
        &self.rows[self.best_index]
    }

    /// `threshold,n,entropy,ep` table.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,n,entropy,ep\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.threshold, r.n_clusters, r.entropy, r.ep);
        }
        out
    }
}

/// Scores every candidate threshold of the schedule.
///
/// Each row's entropy is bit-identical to [`entropy`] of the canonical
/// partition at that threshold: component sizes are summed largest first.
pub fn sweep(schedule: &MergeSchedule, base: LogBase) -> EpReport {
    let n = schedule.n_points;
    let mut dsu = DisjointSet::new(n);
    // component size -> number of components of that size
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    if n > 0 {
        histogram.insert(1, n);
    }
    let mut events = schedule.events.iter().peekable();
    let mut rows = Vec::with_capacity(schedule.thresholds.len());
    for &t in &schedule.thresholds {
        while let Some(ev) = events.next_if(|ev| ev.threshold <= t) {
            let sa = dsu.set_size(ev.point_a);
            let sb = dsu.set_size(ev.point_b);
            if dsu.union(ev.point_a, ev.point_b).is_some() {
                decrement(&mut histogram, sa);
                decrement(&mut histogram, sb);
                *histogram.entry(sa + sb).or_insert(0) += 1;
            }
        }
        let n_clusters: usize = histogram.values().sum();
        let counts = histogram
            .iter()
            .rev()
            .flat_map(|(&size, &count)| std::iter::repeat_n(size, count));
        let h = entropy_of_counts(counts, n, base);
        rows.push(EpRow {
            threshold: t,
            n_clusters,
            entropy: h,
            ep: h / n_clusters as f64,
        });
    }
    let best_index = argmax_first(rows.iter().map(|r| r.ep));
    EpReport { rows, best_index }
}

fn decrement(histogram: &mut BTreeMap<usize, usize>, size: usize) {
    match histogram.get_mut(&size) {
        Some(c) if *c > 1 => *c -= 1,
        _ => {
            histogram.remove(&size);
        }
    }
}

/// Index of the first maximum.
pub(crate) fn argmax_first(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v.partial_cmp(&best_value) == Some(Ordering::Greater) {
            best = i;
            best_value = v;
        }
    }
    best
}

/// Builds the schedule, sweeps it and returns the entropy-payload maximal
/// partition together with the full report.
pub fn best_partition(
    data: &Dataset,
    metric: Metric,
    base: LogBase,
) -> Result<(Partition, EpReport)> {
    let schedule = build_schedule(data, metric);
    let report = sweep(&schedule, base);
    let partition = partition_at(&schedule, report.best().threshold)?;
    debug_assert_eq!(
        entropy(partition.cluster_sizes(), base).to_bits(),
        report.best().entropy.to_bits()
    );
    Ok((partition, report))
}
