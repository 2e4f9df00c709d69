//! Image segmentation on evenly sampled pixels.
//!
//! Pixels are sampled on a uniform grid, their colors are clustered with the
//! recursive entropy-payload hierarchy, and each top-level area is rendered
//! as an overlay with a green marker on every member sample. Full-resolution
//! labels come from the nearest area centroid in color space.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use image::{ImageFormat, Rgb, RgbImage};
use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::hierarchy::{build_hierarchy, ClusterTree, HierarchyConfig};

pub const DEFAULT_SAMPLES: usize = 1008;

const MARKER: Rgb<u8> = Rgb([0, 255, 0]);

/// Grids whose column/row ratio is within this factor of the image's aspect
/// ratio compete on sample count.
const ASPECT_SLACK: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColorSpace {
    #[default]
    Rgb,
    Luma,
}

impl ColorSpace {
    pub fn name(self) -> &'static str {
        match self {
            ColorSpace::Rgb => "rgb",
            ColorSpace::Luma => "luma",
        }
    }

    pub fn channels(self) -> usize {
        match self {
            ColorSpace::Rgb => 3,
            ColorSpace::Luma => 1,
        }
    }

    /// Feature vector with every channel scaled to `[0, 1]`.
    pub fn features(self, px: [u8; 3], out: &mut Vec<f64>) {
        let [r, g, b] = px.map(|c| f64::from(c) / 255.0);
        match self {
            ColorSpace::Rgb => out.extend_from_slice(&[r, g, b]),
            // ITU-R BT.601 weights
            ColorSpace::Luma => out.push(0.299 * r + 0.587 * g + 0.114 * b),
        }
    }
}

impl fmt::Display for ColorSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ColorSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rgb" => Ok(ColorSpace::Rgb),
            "luma" => Ok(ColorSpace::Luma),
            other => Err(Error::OutOfDomain(format!("unknown color space '{other}'"))),
        }
    }
}

/// Pixels picked on a uniform grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub target_count: usize,
    pub cols: u32,
    pub rows: u32,
    pub positions: Vec<(u32, u32)>,
    pub colors: Vec<[u8; 3]>,
}

impl SampleGrid {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn dataset(&self, space: ColorSpace) -> Result<Dataset> {
        let mut values = Vec::with_capacity(self.len() * space.channels());
        for &c in &self.colors {
            space.features(c, &mut values);
        }
        Dataset::from_flat(space.channels(), values)
    }
}

/// Chooses `cols x rows <= target` close to the image's aspect ratio and
/// samples the centre of every `floor(w/cols) x floor(h/rows)` cell.
pub fn sample_image(image: &RgbImage, target_count: usize) -> Result<SampleGrid> {
    let (w, h) = image.dimensions();
    if w == 0 || h == 0 {
        return Err(Error::Image("image has no pixels".into()));
    }
    let pixels = w as usize * h as usize;
    if target_count == 0 || target_count > pixels {
        return Err(Error::OutOfDomain(format!(
            "sample count {target_count} must lie in 1..={pixels}"
        )));
    }
    let (cols, rows) = choose_grid(w, h, target_count);
    let (sx, sy) = (w / cols, h / rows);
    let mut positions = Vec::with_capacity(cols as usize * rows as usize);
    let mut colors = Vec::with_capacity(positions.capacity());
    for j in 0..rows {
        for i in 0..cols {
            let (x, y) = (sx / 2 + i * sx, sy / 2 + j * sy);
            positions.push((x, y));
            colors.push(image.get_pixel(x, y).0);
        }
    }
    Ok(SampleGrid {
        target_count,
        cols,
        rows,
        positions,
        colors,
    })
}

fn choose_grid(w: u32, h: u32, target: usize) -> (u32, u32) {
    let aspect = f64::from(w) / f64::from(h);
    let slack = ASPECT_SLACK.ln() + 1e-12;
    // (cols, rows, count, aspect error)
    let mut candidates = Vec::new();
    for cols in 1..=(w as usize).min(target) {
        let rows = (target / cols).min(h as usize);
        if rows == 0 {
            continue;
        }
        let err = ((cols as f64 / rows as f64) / aspect).ln().abs();
        candidates.push((cols as u32, rows as u32, cols * rows, err));
    }
    let within: Vec<_> = candidates.iter().filter(|c| c.3 <= slack).collect();
    let pick = if within.is_empty() {
        candidates
            .iter()
            .min_by(|a, b| a.3.total_cmp(&b.3).then(b.2.cmp(&a.2)).then(a.0.cmp(&b.0)))
    } else {
        within
            .into_iter()
            .min_by(|a, b| b.2.cmp(&a.2).then(a.3.total_cmp(&b.3)).then(a.0.cmp(&b.0)))
    };
    let &(cols, rows, _, _) = pick.expect("at least one grid fits");
    (cols, rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SegmentConfig {
    pub hierarchy: HierarchyConfig,
    pub colorspace: ColorSpace,
    pub target_count: usize,
}

impl SegmentConfig {
    pub fn new(hierarchy: HierarchyConfig, colorspace: ColorSpace, target_count: usize) -> Self {
        SegmentConfig {
            hierarchy,
            colorspace,
            target_count,
        }
    }
}

/// Per-pixel top-level area ids, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    pub width: u32,
    pub height: u32,
    pub labels: Vec<u32>,
}

impl LabelMap {
    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.labels[(y * self.width + x) as usize]
    }

    /// Indexed PNG, palette entry `i` for area `i`.
    pub fn write_png<W: Write>(&self, out: W) -> Result<()> {
        let data = self
            .labels
            .iter()
            .map(|&l| {
                u8::try_from(l).map_err(|_| {
                    Error::Image(format!("area id {l} exceeds the 256-entry palette"))
                })
            })
            .collect::<Result<Vec<u8>>>()?;
        let mut enc = png::Encoder::new(out, self.width, self.height);
        enc.set_color(png::ColorType::Indexed);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_palette(palette());
        let mut writer = enc
            .write_header()
            .map_err(|e| Error::Image(e.to_string()))?;
        writer
            .write_image_data(&data)
            .map_err(|e| Error::Image(e.to_string()))?;
        writer.finish().map_err(|e| Error::Image(e.to_string()))
    }
}

const BASE_PALETTE: [[u8; 3]; 12] = [
    [230, 25, 75],
    [60, 180, 75],
    [0, 130, 200],
    [255, 225, 25],
    [245, 130, 48],
    [145, 30, 180],
    [70, 240, 240],
    [240, 50, 230],
    [210, 245, 60],
    [250, 190, 190],
    [0, 128, 128],
    [170, 110, 40],
];

/// Fixed 256-color palette used for label maps.
pub fn palette() -> Vec<u8> {
    let mut out = Vec::with_capacity(256 * 3);
    for i in 0..256usize {
        let c = BASE_PALETTE.get(i).copied().unwrap_or([
            (i * 73 % 256) as u8,
            (i * 151 % 256) as u8,
            (i * 199 % 256) as u8,
        ]);
        out.extend_from_slice(&c);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationResult {
    pub config: SegmentConfig,
    pub grid: SampleGrid,
    pub tree: ClusterTree,
    pub overlays: Vec<RgbImage>,
    pub label_map: Option<LabelMap>,
}

impl SegmentationResult {
    /// Sample indices of each top-level area.
    pub fn areas(&self) -> Vec<&[usize]> {
        self.tree
            .top_level()
            .into_iter()
            .map(|n| n.members.as_slice())
            .collect()
    }

    pub fn area_names(&self) -> Vec<String> {
        self.tree.top_level_names()
    }

    pub fn metadata(&self) -> Metadata {
        Metadata {
            samples: self.grid.len(),
            grid: [self.grid.cols, self.grid.rows],
            colorspace: self.config.colorspace.name().to_string(),
            areas: self
                .area_names()
                .into_iter()
                .zip(self.areas())
                .map(|(name, m)| AreaSummary {
                    name,
                    size: m.len(),
                })
                .collect(),
        }
    }

    /// Writes overlays, the label map (when present), the tree and the
    /// metadata into `dir`. Returns the written paths in order.
    pub fn write_to_dir(&self, dir: &Path, stem: &str, emit_members: bool) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let mut written = Vec::new();
        for (name, overlay) in self.area_names().iter().zip(&self.overlays) {
            let path = dir.join(format!("{stem}.area-{name}.png"));
            let mut bytes = Vec::new();
            overlay
                .write_to(&mut std::io::Cursor::new(&mut bytes), ImageFormat::Png)
                .map_err(|e| Error::Image(e.to_string()))?;
            fs::write(&path, bytes).map_err(|e| io_err(&path, e))?;
            written.push(path);
        }
        if let Some(map) = &self.label_map {
            let path = dir.join(format!("{stem}.labels.png"));
            let mut bytes = Vec::new();
            map.write_png(&mut bytes)?;
            fs::write(&path, bytes).map_err(|e| io_err(&path, e))?;
            written.push(path);
        }
        let tree = serde_json::to_string_pretty(&self.tree.to_document(emit_members))
            .expect("tree serializes");
        let path = dir.join(format!("{stem}.tree.json"));
        fs::write(&path, tree + "\n").map_err(|e| io_err(&path, e))?;
        written.push(path);
        let meta = serde_json::to_string_pretty(&self.metadata()).expect("metadata serializes");
        let path = dir.join(format!("{stem}.meta.json"));
        fs::write(&path, meta + "\n").map_err(|e| io_err(&path, e))?;
        written.push(path);
        Ok(written)
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub samples: usize,
    pub grid: [u32; 2],
    pub colorspace: String,
    pub areas: Vec<AreaSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaSummary {
    pub name: String,
    pub size: usize,
}

/// Samples, clusters and renders one overlay per top-level area. The label
/// map is left empty; see [`assign_full_image`].
pub fn segment(image: &RgbImage, config: &SegmentConfig) -> Result<SegmentationResult> {
    let grid = sample_image(image, config.target_count)?;
    let data = grid.dataset(config.colorspace)?;
    let tree = build_hierarchy(&data, &config.hierarchy)?;
    let overlays = tree
        .top_level()
        .into_iter()
        .map(|area| render_overlay(image, &area.members, &grid))
        .collect();
    Ok(SegmentationResult {
        config: *config,
        grid,
        tree,
        overlays,
        label_map: None,
    })
}

/// Labels every pixel with the top-level area whose mean sample color is
/// nearest; equal distances go to the lower area id.
pub fn assign_full_image(image: &RgbImage, result: &SegmentationResult) -> LabelMap {
    let space = result.config.colorspace;
    let metric = result.config.hierarchy.metric;
    let dim = space.channels();
    let mut buf = Vec::with_capacity(dim);
    let centroids: Vec<Vec<f64>> = result
        .areas()
        .into_iter()
        .map(|members| {
            let mut sum = vec![0.0; dim];
            for &i in members {
                buf.clear();
                space.features(result.grid.colors[i], &mut buf);
                for (s, v) in sum.iter_mut().zip(&buf) {
                    *s += v;
                }
            }
            sum.iter().map(|s| s / members.len() as f64).collect()
        })
        .collect();

    let (w, h) = image.dimensions();
    let mut labels = Vec::with_capacity(w as usize * h as usize);
    for px in image.pixels() {
        buf.clear();
        space.features(px.0, &mut buf);
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (id, c) in centroids.iter().enumerate() {
            let d = metric.distance(&buf, c);
            if d < best_d {
                best = id;
                best_d = d;
            }
        }
        labels.push(best as u32);
    }
    LabelMap {
        width: w,
        height: h,
        labels,
    }
}

/// Copy of `image` with a 3x3 pure green marker, clipped at the borders, on
/// every listed sample.
pub fn render_overlay(image: &RgbImage, members: &[usize], grid: &SampleGrid) -> RgbImage {
    let mut out = image.clone();
    let (w, h) = image.dimensions();
    for &i in members {
        let (x, y) = grid.positions[i];
        for yy in y.saturating_sub(1)..=(y + 1).min(h - 1) {
            for xx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                out.put_pixel(xx, yy, MARKER);
            }
        }
    }
    out
}

/// Decodes a PNG or binary PPM (P6) image.
pub fn decode_image(bytes: &[u8]) -> Result<RgbImage> {
    let format = if bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
        ImageFormat::Png
    } else if bytes.starts_with(b"P6") {
        ImageFormat::Pnm
    } else {
        return Err(Error::Image(
            "unsupported format: expected PNG or binary PPM (P6)".into(),
        ));
    };
    let img =
        image::load_from_memory_with_format(bytes, format).map_err(|e| Error::Image(e.to_string()))?;
    Ok(img.to_rgb8())
}

pub fn load_image(path: &Path) -> Result<RgbImage> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    decode_image(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(w: u32, h: u32, c: [u8; 3]) -> RgbImage {
        RgbImage::from_pixel(w, h, Rgb(c))
    }

    #[test]
    fn sample_counts() {
        let g = sample_image(&flat(1, 1, [1, 2, 3]), 1).unwrap();
        assert_eq!(g.positions, vec![(0, 0)]);
        assert_eq!(g.colors, vec![[1, 2, 3]]);

        let g = sample_image(&flat(10, 10, [0; 3]), 100).unwrap();
        assert_eq!(g.len(), 100);
        let mut pos = g.positions.clone();
        pos.sort();
        pos.dedup();
        assert_eq!(pos.len(), 100);

        let g = sample_image(&flat(1080, 720, [0; 3]), 1008).unwrap();
        assert_eq!(g.len(), 1008);
        assert_eq!(g.len(), (g.cols * g.rows) as usize);
        assert!(g.positions.iter().all(|&(x, y)| x < 1080 && y < 720));

        assert!(sample_image(&flat(3, 3, [0; 3]), 10).is_err());
        assert!(sample_image(&flat(3, 3, [0; 3]), 0).is_err());
    }

    #[test]
    fn sample_grid_is_distinct_and_bounded() {
        for (w, h, t) in [(300, 200, 1008), (7, 50, 20), (1, 100, 10), (640, 3, 100)] {
            let g = sample_image(&flat(w, h, [0; 3]), t).unwrap();
            assert!(g.len() <= t && !g.is_empty(), "{w}x{h}/{t}: {}", g.len());
            let mut pos = g.positions.clone();
            pos.sort();
            pos.dedup();
            assert_eq!(pos.len(), g.len());
            assert!(g.positions.iter().all(|&(x, y)| x < w && y < h));
        }
    }

    #[test]
    fn overlay_marks() {
        let img = flat(10, 10, [9, 9, 9]);
        let g = sample_image(&img, 4).unwrap();
        assert_eq!(render_overlay(&img, &[], &g), img);
        let all: Vec<usize> = (0..g.len()).collect();
        let o = render_overlay(&img, &all, &g);
        for &(x, y) in &g.positions {
            assert_eq!(*o.get_pixel(x, y), MARKER);
        }
        let marked = o.pixels().filter(|p| **p == MARKER).count();
        assert_eq!(marked, 9 * g.len());
    }

    #[test]
    fn overlay_clips_at_border() {
        let img = flat(1, 1, [0; 3]);
        let g = sample_image(&img, 1).unwrap();
        let o = render_overlay(&img, &[0], &g);
        assert_eq!(*o.get_pixel(0, 0), MARKER);
    }

    #[test]
    fn uniform_image_single_area() {
        let img = flat(40, 30, [120, 40, 200]);
        let cfg = SegmentConfig::new(HierarchyConfig::default(), ColorSpace::Rgb, 100);
        let r = segment(&img, &cfg).unwrap();
        assert!(r.tree.is_leaf());
        assert_eq!(r.overlays.len(), 1);
        let map = assign_full_image(&img, &r);
        assert!(map.labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn luma_features() {
        let mut v = Vec::new();
        ColorSpace::Luma.features([255, 255, 255], &mut v);
        assert!((v[0] - 1.0).abs() < 1e-12);
        v.clear();
        ColorSpace::Rgb.features([255, 0, 51], &mut v);
        assert_eq!(v, vec![1.0, 0.0, 0.2]);
    }

    #[test]
    fn rejects_unknown_formats() {
        assert!(decode_image(b"GIF89a....").is_err());
        assert!(decode_image(b"\x89PNG\r\n\x1a\ncorrupt").is_err());
        assert!(decode_image(b"P3\n1 1\n255\n0 0 0\n").is_err());
    }

    #[test]
    fn decodes_ppm() {
        let mut bytes = b"P6\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[255, 0, 0, 0, 0, 255]);
        let img = decode_image(&bytes).unwrap();
        assert_eq!(img.dimensions(), (2, 1));
        assert_eq!(img.get_pixel(1, 0).0, [0, 0, 255]);
    }

    #[test]
    fn label_map_png_round_trip() {
        let map = LabelMap {
            width: 3,
            height: 2,
            labels: vec![0, 1, 2, 2, 1, 0],
        };
        let mut bytes = Vec::new();
        map.write_png(&mut bytes).unwrap();
        let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
        let reader = decoder.read_info().unwrap();
        let info = reader.info();
        assert_eq!(info.color_type, png::ColorType::Indexed);
        assert_eq!(info.palette.as_ref().unwrap().len(), 768);
        let too_many = LabelMap {
            width: 1,
            height: 1,
            labels: vec![300],
        };
        assert!(too_many.write_png(Vec::new()).is_err());
    }
}
