//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage or input errors, 1 for internal
//! failures (for example an output file that cannot be written).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::csv_input::{read_dataset_file, Header};
use crate::dataset::Metric;
use crate::entropy::{equal_partition_ep, sep_curve, LogBase};
use crate::error::Error;
use crate::hierarchy::HierarchyConfig;
use crate::image_seg::{self, ColorSpace, SegmentConfig, DEFAULT_SAMPLES};
use crate::linkage::best_partition;
use crate::seed::grow;

const MAX_CURVE_ROWS: usize = 1_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "epclust",
    version,
    about = "Parameter-free clustering by maximum entropy payload"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cluster the points of a CSV file and print the best partition as JSON
    Cluster {
        /// CSV file, one point per row
        input: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        csv: CsvArgs,
        /// Write partition.json and ep_report.csv into this directory instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grow a cluster around one seed point and print the growth trace as JSON
    Grow {
        /// CSV file, one point per row
        input: PathBuf,
        /// 0-based index of the seed point (data rows only)
        #[arg(long)]
        seed: usize,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        csv: CsvArgs,
        /// Write grow.json into this directory instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Segment a PNG or binary PPM image into hierarchical color areas
    Segment {
        /// PNG or binary PPM (P6) image
        input: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
        /// Nodes with fewer samples are not split further
        #[arg(long, default_value_t = HierarchyConfig::DEFAULT_MIN_SIZE)]
        min_size: usize,
        /// Maximum depth of the area hierarchy
        #[arg(long, default_value_t = HierarchyConfig::DEFAULT_MAX_DEPTH)]
        max_depth: usize,
        /// Number of evenly spaced sample pixels
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Color features used for clustering: rgb or luma
        #[arg(long, default_value = "rgb", value_parser = parse_colorspace)]
        colorspace: ColorSpace,
        /// Output directory for overlays, label map, tree and metadata
        #[arg(long)]
        out: PathBuf,
        /// Include member index lists on internal tree nodes
        #[arg(long)]
        emit_members: bool,
    },
    /// Emit the equal-partition and self entropy payload curves as CSV
    Curves {
        /// Largest cluster count on the equal-partition curve
        #[arg(long, default_value_t = 10.0)]
        max_n: f64,
        /// Spacing of cluster counts, starting at 1
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        /// Spacing of proportions on the self entropy payload curve
        #[arg(long, default_value_t = 0.1)]
        p_step: f64,
        /// Logarithm base: a real greater than 1, or "e"
        #[arg(long, default_value = "2", value_parser = parse_log_base)]
        log_base: LogBase,
        /// Write equal_partition.csv and self_entropy.csv into this directory instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Distance between points: euclidean or manhattan
    #[arg(long, default_value = "euclidean", value_parser = parse_metric)]
    metric: Metric,
    /// Logarithm base: a real greater than 1, or "e"
    #[arg(long, default_value = "2", value_parser = parse_log_base)]
    log_base: LogBase,
}

#[derive(Debug, Args)]
struct CsvArgs {
    /// Treat the first row as data even if it is not numeric
    #[arg(long)]
    no_header: bool,
}

impl CsvArgs {
    fn header(&self) -> Header {
        if self.no_header {
            Header::Absent
        } else {
            Header::Auto
        }
    }
}

fn parse_log_base(s: &str) -> Result<LogBase, String> {
    if s == "e" {
        return Ok(LogBase::E);
    }
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number or 'e'"))?;
    LogBase::new(v).map_err(|e| e.to_string())
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_colorspace(s: &str) -> Result<ColorSpace, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Internal(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Internal(m) => m,
        }
    }
}

fn input(e: Error) -> Failure {
    Failure::Input(e.to_string())
}

fn internal(e: impl std::fmt::Display) -> Failure {
    Failure::Internal(e.to_string())
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                2
            } else {
                let _ = write!(stdout, "{}", e.render());
                0
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Cluster {
            input: path,
            common,
            csv,
            out,
        } => cmd_cluster(&path, &common, &csv, out.as_deref(), stdout),
        Command::Grow {
            input: path,
            seed,
            common,
            csv,
            out,
        } => cmd_grow(&path, seed, &common, &csv, out.as_deref(), stdout),
        Command::Segment {
            input: path,
            common,
            min_size,
            max_depth,
            samples,
            colorspace,
            out,
            emit_members,
        } => {
            let hierarchy = HierarchyConfig::new(min_size, max_depth, common.log_base, common.metric)
                .map_err(input)?;
            let config = SegmentConfig::new(hierarchy, colorspace, samples);
            cmd_segment(&path, &config, &out, emit_members, stdout)
        }
        Command::Curves {
            max_n,
            step,
            p_step,
            log_base,
            out,
        } => cmd_curves(max_n, step, p_step, log_base, out.as_deref(), stdout),
    }
}

fn cmd_cluster(
    path: &Path,
    common: &CommonArgs,
    csv: &CsvArgs,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let data = read_dataset_file(path, csv.header()).map_err(input)?;
    let (partition, report) =
        best_partition(&data, common.metric, common.log_base).map_err(internal)?;
    let json = to_json(&partition.to_document(report.best().ep))?;
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(internal)?;
            write_file(&dir.join("partition.json"), json.as_bytes())?;
            write_file(&dir.join("ep_report.csv"), report.to_csv().as_bytes())
        }
        None => stdout.write_all(json.as_bytes()).map_err(internal),
    }
}

fn cmd_grow(
    path: &Path,
    seed: usize,
    common: &CommonArgs,
    csv: &CsvArgs,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let data = read_dataset_file(path, csv.header()).map_err(input)?;
    let (trace, members) = grow(&data, common.metric, seed, common.log_base).map_err(input)?;
    let json = to_json(&trace.to_document(&members))?;
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(internal)?;
            write_file(&dir.join("grow.json"), json.as_bytes())
        }
        None => stdout.write_all(json.as_bytes()).map_err(internal),
    }
}

fn cmd_segment(
    path: &Path,
    config: &SegmentConfig,
    out: &Path,
    emit_members: bool,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let image = image_seg::load_image(path).map_err(input)?;
    let mut result = image_seg::segment(&image, config).map_err(input)?;
    result.label_map = Some(image_seg::assign_full_image(&image, &result));
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".to_string());
    result
        .write_to_dir(out, &stem, emit_members)
        .map_err(internal)?;
    let json = to_json(&result.metadata())?;
    stdout.write_all(json.as_bytes()).map_err(internal)
}

fn cmd_curves(
    max_n: f64,
    step: f64,
    p_step: f64,
    base: LogBase,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let (ep_csv, sep_csv) = curves_csv(max_n, step, p_step, base).map_err(Failure::Input)?;
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(internal)?;
            write_file(&dir.join("equal_partition.csv"), ep_csv.as_bytes())?;
            write_file(&dir.join("self_entropy.csv"), sep_csv.as_bytes())
        }
        None => {
            let both = format!("{ep_csv}\n{sep_csv}");
            stdout.write_all(both.as_bytes()).map_err(internal)
        }
    }
}

/// The two curve tables. Each carries a `marker` column set to `max` on the
/// analytic maximum row (`n = e`, `p = 1/e`).
fn curves_csv(max_n: f64, step: f64, p_step: f64, base: LogBase) -> Result<(String, String), String> {
    if !max_n.is_finite() || max_n < 1.0 {
        return Err(format!("--max-n must be a finite real >= 1, got {max_n}"));
    }
    if !step.is_finite() || step <= 0.0 {
        return Err(format!("--step must be a positive real, got {step}"));
    }
    if !(p_step > 0.0 && p_step <= 1.0) {
        return Err(format!("--p-step must lie in (0, 1], got {p_step}"));
    }
    let e = std::f64::consts::E;

    let count = ((max_n - 1.0) / step + 1e-9).floor() as usize + 1;
    if count > MAX_CURVE_ROWS {
        return Err(format!("curve would have {count} rows; raise --step"));
    }
    let mut ns: Vec<(f64, bool)> = (0..count).map(|i| (1.0 + i as f64 * step, false)).collect();
    if e <= max_n {
        insert_sorted(&mut ns, e);
    }
    let mut ep_csv = String::from("n,ep,marker\n");
    for (n, is_max) in ns {
        let v = equal_partition_ep(n, base).map_err(|e| e.to_string())?;
        ep_csv.push_str(&format!("{n},{v},{}\n", if is_max { "max" } else { "" }));
    }

    let steps = (1.0 / p_step + 1e-9).floor() as usize;
    if steps > MAX_CURVE_ROWS {
        return Err(format!("curve would have {steps} rows; raise --p-step"));
    }
    let mut ps: Vec<(f64, bool)> = [1e-4, 1e-3, 1e-2]
        .into_iter()
        .filter(|&p| p < p_step)
        .map(|p| (p, false))
        .collect();
    ps.extend((1..=steps).map(|k| ((k as f64 * p_step).min(1.0), false)));
    insert_sorted(&mut ps, 1.0 / e);
    let mut sep_csv = String::from("p,sep,marker\n");
    for (p, is_max) in ps {
        let v = sep_curve(p, base).map_err(|e| e.to_string())?;
        sep_csv.push_str(&format!("{p},{v},{}\n", if is_max { "max" } else { "" }));
    }
    Ok((ep_csv, sep_csv))
}

fn insert_sorted(rows: &mut Vec<(f64, bool)>, x: f64) {
    match rows.iter().position(|&(v, _)| v >= x) {
        Some(i) if rows[i].0 == x => rows[i].1 = true,
        Some(i) => rows.insert(i, (x, true)),
        None => rows.push((x, true)),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(internal)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))
}
