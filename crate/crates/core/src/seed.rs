//! Seeded growth scored by self entropy payload.
//!
//! Starting from one point, the threshold is relaxed step by step and the
//! size of the seed's single-linkage component is tracked. Each size `k`
//! scores `-(k/N) log(k/N)`; the component at the best score is returned.

use serde::Serialize;

use crate::dataset::{Dataset, Metric};
use crate::dsu::DisjointSet;
use crate::entropy::{self_entropy_payload, LogBase};
use crate::error::{Error, Result};
use crate::linkage::{argmax_first, build_schedule, MergeSchedule};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthStep {
    pub threshold: f64,
    pub size: usize,
    pub sep: f64,
}

/// Self entropy payload of the seed's component at every threshold where the
/// component grows, starting at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthTrace {
    seed: usize,
    steps: Vec<GrowthStep>,
    best_index: usize,
}

impl GrowthTrace {
    pub fn seed(&self) -> usize {
        self.seed
    }

    pub fn steps(&self) -> &[GrowthStep] {
        &self.steps
    }

    pub fn best_index(&self) -> usize {
        self.best_index
    }

    pub fn best(&self) -> &GrowthStep {
        &self.steps[self.best_index]
    }

    pub fn to_document(&self, members: &[usize]) -> GrowthDocument {
        let best = self.best();
        GrowthDocument {
            seed: self.seed,
            trace: self
                .steps
                .iter()
                .map(|s| (s.threshold, s.size, s.sep))
                .collect(),
            best: BestCluster {
                threshold: best.threshold,
                size: best.size,
                sep: best.sep,
                members: members.to_vec(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthDocument {
    pub seed: usize,
    pub trace: Vec<(f64, usize, f64)>,
    pub best: BestCluster,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestCluster {
    pub threshold: f64,
    pub size: usize,
    pub sep: f64,
    pub members: Vec<usize>,
}

/// Grows a cluster around `seed` and returns the trace with the members
/// (ascending) of the self-entropy-payload maximal component.
pub fn grow(
    data: &Dataset,
    metric: Metric,
    seed: usize,
    base: LogBase,
) -> Result<(GrowthTrace, Vec<usize>)> {
    check_seed(seed, data.len())?;
    let schedule = build_schedule(data, metric);
    grow_on_schedule(&schedule, seed, base)
}

/// Same as [`grow`] over a prebuilt schedule, so several seeds can share one.
pub fn grow_on_schedule(
    schedule: &MergeSchedule,
    seed: usize,
    base: LogBase,
) -> Result<(GrowthTrace, Vec<usize>)> {
    let n = schedule.n_points();
    check_seed(seed, n)?;
    let mut dsu = DisjointSet::new(n);
    let mut events = schedule.events().iter().peekable();
    let mut steps: Vec<GrowthStep> = Vec::new();
    for &t in schedule.thresholds() {
        while let Some(ev) = events.next_if(|ev| ev.threshold <= t) {
            dsu.union(ev.point_a, ev.point_b);
        }
        let size = dsu.set_size(seed);
        if steps.last().is_none_or(|s| s.size != size) {
            steps.push(GrowthStep {
                threshold: t,
                size,
                sep: self_entropy_payload(size, n, base)?,
            });
        }
    }
    let best_index = argmax_first(steps.iter().map(|s| s.sep));

    let mut dsu = schedule.components_at(steps[best_index].threshold);
    let root = dsu.find(seed);
    let members: Vec<usize> = (0..n).filter(|&i| dsu.find(i) == root).collect();
    debug_assert_eq!(members.len(), steps[best_index].size);

    Ok((
        GrowthTrace {
            seed,
            steps,
            best_index,
        },
        members,
    ))
}

fn check_seed(seed: usize, n: usize) -> Result<()> {
    if seed >= n {
        return Err(Error::OutOfDomain(format!(
            "seed index {seed} out of range for {n} points"
        )));
    }
    Ok(())
}
