//! Test-only helpers: a brute-force single-linkage oracle and synthetic inputs.
//!
//! The oracle shares nothing with the library's schedule or sweep. It
//! enumerates every pairwise distance as a threshold, finds connected
//! components of the `distance <= t` graph by breadth-first search and scores
//! them with the entropy payload formula written out directly.

#![allow(dead_code)]

use std::collections::VecDeque;

use image::{Rgb, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const WORKED: [f64; 21] = [
    1., 1., 1., 1., 2., 2., 3., 3., 3., 5., 5., 5., 5., 5., 5., 5., 8., 8., 8., 8., 8.,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMetric {
    Euclidean,
    Manhattan,
}

pub fn oracle_distance(metric: OracleMetric, a: &[f64], b: &[f64]) -> f64 {
    match metric {
        OracleMetric::Euclidean => {
            let mut s = 0.0;
            for k in 0..a.len() {
                let d = a[k] - b[k];
                s += d * d;
            }
            s.sqrt()
        }
        OracleMetric::Manhattan => {
            let mut s = 0.0;
            for k in 0..a.len() {
                s += (a[k] - b[k]).abs();
            }
            s
        }
    }
}

/// Components of the `<= t` graph, members ascending, clusters ordered by
/// descending size then smallest member.
pub fn oracle_components(points: &[Vec<f64>], metric: OracleMetric, t: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if !seen[v] && oracle_distance(metric, &points[u], &points[v]) <= t {
                    seen[v] = true;
                    comp.push(v);
                    queue.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    out
}

pub fn oracle_ep(clusters: &[Vec<usize>], n_points: usize, base: f64) -> f64 {
    let mut h = 0.0;
    for c in clusters {
        let p = c.len() as f64 / n_points as f64;
        h -= p * p.ln() / base.ln();
    }
    h / clusters.len() as f64
}

#[derive(Debug, Clone)]
pub struct OracleRow {
    pub threshold: f64,
    pub clusters: Vec<Vec<usize>>,
    pub ep: f64,
}

/// Every threshold in `{0} ∪ {pairwise distances}`, ascending.
pub fn oracle_all_thresholds(points: &[Vec<f64>], metric: OracleMetric) -> Vec<f64> {
    let mut ts = vec![0.0];
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            ts.push(oracle_distance(metric, &points[i], &points[j]));
        }
    }
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup();
    ts
}

/// One row per distinct partition, at the smallest threshold producing it.
pub fn oracle_rows(points: &[Vec<f64>], metric: OracleMetric, base: f64) -> Vec<OracleRow> {
    let mut rows: Vec<OracleRow> = Vec::new();
    for t in oracle_all_thresholds(points, metric) {
        let clusters = oracle_components(points, metric, t);
        if rows.last().is_some_and(|r| r.clusters == clusters) {
            continue;
        }
        let ep = oracle_ep(&clusters, points.len(), base);
        rows.push(OracleRow {
            threshold: t,
            clusters,
            ep,
        });
    }
    rows
}

/// Small random dataset; half of them on an integer lattice so distance ties
/// and duplicate points are common.
pub fn random_points(rng: &mut ChaCha8Rng, max_n: usize, max_dim: usize) -> Vec<Vec<f64>> {
    let n = rng.gen_range(1..=max_n);
    let dim = rng.gen_range(1..=max_dim);
    let lattice = rng.gen_bool(0.5);
    (0..n)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    if lattice {
                        rng.gen_range(0..5) as f64
                    } else {
                        rng.gen_range(-10.0..10.0)
                    }
                })
                .collect()
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Region (0, 1, 2) of column `x` in the three-band test image.
pub fn band_of(x: u32, width: u32) -> usize {
    (x * 3 / width) as usize
}

/// `width x height` image split into vertical red, green and blue thirds,
/// every channel perturbed by a uniform integer in `-2..=2` and clamped.
pub fn three_band_image(width: u32, height: u32, seed: u64) -> RgbImage {
    let mut rng = rng(seed);
    let pure = [[255u8, 0, 0], [0, 255, 0], [0, 0, 255]];
    RgbImage::from_fn(width, height, |x, _| {
        let base = pure[band_of(x, width)];
        Rgb(base.map(|c| (i32::from(c) + rng.gen_range(-2..=2)).clamp(0, 255) as u8))
    })
}
