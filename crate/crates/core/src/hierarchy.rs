//! Recursive entropy-payload clustering.
//!
//! The root covers the whole dataset. Each node is clustered on its own
//! points (distances recomputed within the node) and its clusters become its
//! children, until a stopping rule applies.

use serde::Serialize;

use crate::dataset::{Dataset, Metric};
use crate::entropy::LogBase;
use crate::error::{Error, Result};
use crate::linkage::{best_partition, EpReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HierarchyConfig {
    min_size: usize,
    max_depth: usize,
    pub base: LogBase,
    pub metric: Metric,
}

impl HierarchyConfig {
    pub const DEFAULT_MIN_SIZE: usize = 4;
    pub const DEFAULT_MAX_DEPTH: usize = 8;

    pub fn new(min_size: usize, max_depth: usize, base: LogBase, metric: Metric) -> Result<Self> {
        if min_size < 2 {
            return Err(Error::OutOfDomain(format!(
                "min size {min_size} must be at least 2"
            )));
        }
        if max_depth < 1 {
            return Err(Error::OutOfDomain("max depth must be at least 1".into()));
        }
        Ok(HierarchyConfig {
            min_size,
            max_depth,
            base,
            metric,
        })
    }

    pub fn min_size(&self) -> usize {
        self.min_size
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }
}

impl Default for HierarchyConfig {
    fn default() -> Self {
        HierarchyConfig {
            min_size: Self::DEFAULT_MIN_SIZE,
            max_depth: Self::DEFAULT_MAX_DEPTH,
            base: LogBase::default(),
            metric: Metric::default(),
        }
    }
}

/// One node of the hierarchy. Member indices refer to the root dataset and
/// are ascending; children are in canonical order (largest first, then by
/// smallest member).
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterTree {
    pub members: Vec<usize>,
    pub report: EpReport,
    pub children: Vec<ClusterTree>,
    pub depth: usize,
}

impl ClusterTree {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// Children of the root, or the root itself when it did not split.
    pub fn top_level(&self) -> Vec<&ClusterTree> {
        if self.is_leaf() {
            vec![self]
        } else {
            self.children.iter().collect()
        }
    }

    pub fn leaves(&self) -> Vec<&ClusterTree> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a ClusterTree>) {
        if self.is_leaf() {
            out.push(self);
        } else {
            for c in &self.children {
                c.collect_leaves(out);
            }
        }
    }

    fn max_fanout(&self) -> usize {
        self.children
            .iter()
            .map(ClusterTree::max_fanout)
            .fold(self.children.len(), usize::max)
    }

    /// Names of the top-level areas, in order.
    pub fn top_level_names(&self) -> Vec<String> {
        (1..=self.top_level().len()).map(|i| i.to_string()).collect()
    }

    /// Serializable tree. Children are named by their 1-based position
    /// appended to the parent's name ("1", "11", "12", "2", "21", ...). When
    /// any node has more than nine children the positions are joined with
    /// dots instead ("1.10.2") so names stay unambiguous.
    pub fn to_document(&self, emit_members: bool) -> TreeDocument {
        let dotted = self.max_fanout() > 9;
        self.node_document("root".to_string(), "", dotted, emit_members)
    }

    fn node_document(
        &self,
        name: String,
        prefix: &str,
        dotted: bool,
        emit_members: bool,
    ) -> TreeDocument {
        let best = self.report.best();
        let children = self
            .children
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let child = if prefix.is_empty() {
                    (i + 1).to_string()
                } else if dotted {
                    format!("{prefix}.{}", i + 1)
                } else {
                    format!("{prefix}{}", i + 1)
                };
                c.node_document(child.clone(), &child, dotted, emit_members)
            })
            .collect();
        TreeDocument {
            name,
            size: self.size(),
            threshold: best.threshold,
            ep: best.ep,
            members: (emit_members || self.is_leaf()).then(|| self.members.clone()),
            children,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeDocument {
    pub name: String,
    pub size: usize,
    pub threshold: f64,
    pub ep: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<usize>>,
    pub children: Vec<TreeDocument>,
}

/// Builds the hierarchy. A node stays a leaf when it has fewer than
/// `min_size` members, sits at `max_depth`, or its best partition is a single
/// cluster or all singletons.
pub fn build_hierarchy(data: &Dataset, config: &HierarchyConfig) -> Result<ClusterTree> {
    let all: Vec<usize> = (0..data.len()).collect();
    build_node(data, all, 0, config)
}

fn build_node(
    data: &Dataset,
    members: Vec<usize>,
    depth: usize,
    config: &HierarchyConfig,
) -> Result<ClusterTree> {
    let local = data.subset(&members)?;
    let (partition, report) = best_partition(&local, config.metric, config.base)?;
    let n = partition.n_clusters();
    let stop = members.len() < config.min_size
        || depth >= config.max_depth
        || n == 1
        || n == members.len();
    let children = if stop {
        Vec::new()
    } else {
        partition
            .clusters()
            .into_iter()
            .map(|cluster| {
                let global = cluster.into_iter().map(|i| members[i]).collect();
                build_node(data, global, depth + 1, config)
            })
            .collect::<Result<_>>()?
    };
    Ok(ClusterTree {
        members,
        report,
        children,
        depth,
    })
}
