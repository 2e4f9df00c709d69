//! Parameter-free clustering by maximum entropy payload.
//!
//! Every single-linkage threshold partition of a dataset is scored by its
//! entropy payload, the information entropy of the partition divided by the
//! number of clusters, and the maximum is returned. Around this sit a seeded
//! variant scored by self entropy payload, a recursive hierarchy builder and
//! an image segmentation pipeline.

pub mod cli;
pub mod csv_input;
pub mod dataset;
pub mod dsu;
pub mod entropy;
pub mod error;
pub mod hierarchy;
pub mod image_seg;
pub mod linkage;
pub mod seed;

pub use dataset::{Dataset, Metric};
pub use entropy::{
    analytic_maxima, entropy, entropy_payload, equal_partition_ep, self_entropy_payload,
    sep_curve, AnalyticMaxima, ClusterSizes, LogBase,
};
pub use error::{Error, Result};
pub use hierarchy::{build_hierarchy, ClusterTree, HierarchyConfig};
pub use linkage::{
    best_partition, build_schedule, partition_at, sweep, EpReport, EpRow, MergeEvent,
    MergeSchedule, Partition,
};
pub use seed::{grow, GrowthStep, GrowthTrace};
