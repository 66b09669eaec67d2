//! Point cloud domain types, OFF/XYZ ingestion, and the labeled synthetic
//! shape generator that stands in for large mesh corpora at desk scale.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

pub type Point = [f64; 3];

/// An ordered set of 3D points with optional class label and optional
/// per-point part labels.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Point>,
    pub label: Option<usize>,
    pub part_labels: Option<Vec<usize>>,
}

impl PointCloud {
    pub fn new(points: Vec<Point>) -> Self {
        PointCloud {
            points,
            label: None,
            part_labels: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A triangulated mesh as parsed from an OFF file. Faces may be absent,
/// in which case the vertex set is the geometry.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub faces: Vec<[usize; 3]>,
}

impl Mesh {
    pub fn into_cloud(self) -> PointCloud {
        PointCloud::new(self.vertices)
    }
}

/// A corpus of clouds with class names and a disjoint train/test split.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub clouds: Vec<PointCloud>,
    pub class_names: Vec<String>,
    pub train_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
}

impl Dataset {
    /// Deterministic stratified split: within each class, every fifth cloud
    /// (by corpus order) goes to the test set.
    pub fn with_default_split(clouds: Vec<PointCloud>, class_names: Vec<String>) -> Self {
        let mut per_class_seen: std::collections::HashMap<Option<usize>, usize> =
            std::collections::HashMap::new();
        let mut train_idx = Vec::new();
        let mut test_idx = Vec::new();
        for (i, c) in clouds.iter().enumerate() {
            let seen = per_class_seen.entry(c.label).or_insert(0);
            if *seen % 5 == 0 {
                test_idx.push(i);
            } else {
                train_idx.push(i);
            }
            *seen += 1;
        }
        Dataset {
            clouds,
            class_names,
            train_idx,
            test_idx,
        }
    }
}

/// The four synthetic shape classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    Sphere,
    Cube,
    Cylinder,
    Torus,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 4] = [
        ShapeKind::Sphere,
        ShapeKind::Cube,
        ShapeKind::Cylinder,
        ShapeKind::Torus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ShapeKind::Sphere => "sphere",
            ShapeKind::Cube => "cube",
            ShapeKind::Cylinder => "cylinder",
            ShapeKind::Torus => "torus",
        }
    }

    pub fn class_id(self) -> usize {
        match self {
            ShapeKind::Sphere => 0,
            ShapeKind::Cube => 1,
            ShapeKind::Cylinder => 2,
            ShapeKind::Torus => 3,
        }
    }

    pub fn from_class_id(id: usize) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.class_id() == id)
            .ok_or_else(|| Error::UnknownClass(format!("class id {id}")))
    }
}

impl std::str::FromStr for ShapeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownClass(s.to_string()))
    }
}

/// Parse an OFF mesh. Accepts the common fused-header variant where the
/// counts share the "OFF" line. Polygonal faces are fan-triangulated.
pub fn parse_off(bytes: &[u8]) -> Result<Mesh> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("not utf-8: {e}"),
    })?;
    // (line number, content) with comments and blanks stripped.
    let mut lines = text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            None
        } else {
            Some((i + 1, l.to_string()))
        }
    });

    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        msg: "empty file".into(),
    })?;
    let counts_str = if header == "OFF" {
        let (l, c) = lines.next().ok_or(Error::Parse {
            line: hline,
            msg: "missing counts line".into(),
        })?;
        (l, c)
    } else if let Some(rest) = header.strip_prefix("OFF") {
        (hline, rest.trim().to_string())
    } else {
        return Err(Error::Parse {
            line: hline,
            msg: format!("expected OFF header, got {header:?}"),
        });
    };

    let (cline, counts) = counts_str;
    let fields: Vec<&str> = counts.split_whitespace().collect();
    if fields.len() < 2 {
        return Err(Error::Parse {
            line: cline,
            msg: "counts line needs at least vertex and face counts".into(),
        });
    }
    let nv: usize = fields[0].parse().map_err(|_| Error::Parse {
        line: cline,
        msg: format!("bad vertex count {:?}", fields[0]),
    })?;
    let nf: usize = fields[1].parse().map_err(|_| Error::Parse {
        line: cline,
        msg: format!("bad face count {:?}", fields[1]),
    })?;
    if nv == 0 {
        return Err(Error::Parse {
            line: cline,
            msg: "empty cloud: zero vertices".into(),
        });
    }

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (l, line) = lines.next().ok_or(Error::Parse {
            line: cline,
            msg: format!("expected {nv} vertices, file ended early"),
        })?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .take(3)
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse {
                line: l,
                msg: format!("non-numeric vertex: {line:?}"),
            })?;
        if vals.len() != 3 {
            return Err(Error::Parse {
                line: l,
                msg: format!("vertex needs 3 coordinates: {line:?}"),
            });
        }
        vertices.push([vals[0], vals[1], vals[2]]);
    }

    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (l, line) = lines.next().ok_or(Error::Parse {
            line: cline,
            msg: format!("expected {nf} faces, file ended early"),
        })?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        let m: usize = toks[0].parse().map_err(|_| Error::Parse {
            line: l,
            msg: format!("bad face vertex count: {line:?}"),
        })?;
        if m < 3 || toks.len() < m + 1 {
            return Err(Error::Parse {
                line: l,
                msg: format!("face needs at least 3 indices: {line:?}"),
            });
        }
        let idx: Vec<usize> = toks[1..=m]
            .iter()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse {
                line: l,
                msg: format!("non-integer face index: {line:?}"),
            })?;
        for &i in &idx {
            if i >= nv {
                return Err(Error::Parse {
                    line: l,
                    msg: format!("face index {i} out of range (nv = {nv})"),
                });
            }
        }
        for t in 1..m - 1 {
            faces.push([idx[0], idx[t], idx[t + 1]]);
        }
    }

    Ok(Mesh { vertices, faces })
}

/// Parse whitespace-separated XYZ text: 3 reals per line, or 4 where the
/// last column is an integer part label. Column count must be consistent.
pub fn parse_xyz(bytes: &[u8]) -> Result<PointCloud> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("not utf-8: {e}"),
    })?;
    let mut points = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    let mut ncols: Option<usize> = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 && toks.len() != 4 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected 3 or 4 fields, got {}", toks.len()),
            });
        }
        match ncols {
            None => ncols = Some(toks.len()),
            Some(c) if c != toks.len() => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("inconsistent column count: {} vs {}", toks.len(), c),
                });
            }
            _ => {}
        }
        let coords: Vec<f64> = toks[..3]
            .iter()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("non-numeric coordinate: {line:?}"),
            })?;
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parse {
                line: i + 1,
                msg: "non-finite coordinate".into(),
            });
        }
        points.push([coords[0], coords[1], coords[2]]);
        if toks.len() == 4 {
            let lab: usize = toks[3].parse().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("part label must be a non-negative integer: {:?}", toks[3]),
            })?;
            labels.push(lab);
        }
    }
    let mut cloud = PointCloud::new(points);
    if ncols == Some(4) {
        cloud.part_labels = Some(labels);
    }
    Ok(cloud)
}

/// Serialize as XYZ text (4 columns when part labels exist).
pub fn write_xyz(cloud: &PointCloud) -> String {
    let mut out = String::new();
    for (i, p) in cloud.points.iter().enumerate() {
        if let Some(parts) = &cloud.part_labels {
            out.push_str(&format!("{:.17} {:.17} {:.17} {}\n", p[0], p[1], p[2], parts[i]));
        } else {
            out.push_str(&format!("{:.17} {:.17} {:.17}\n", p[0], p[1], p[2]));
        }
    }
    out
}

/// Uniformly sample the surface of a canonical shape already sized to the
/// unit bounding box, then apply isotropic Gaussian jitter of scale
/// `noise`. Pure function of its arguments.
pub fn generate_synthetic(
    class: ShapeKind,
    n_points: usize,
    noise: f64,
    rng_seed: u64,
) -> Result<PointCloud> {
    if n_points < 16 {
        return Err(Error::TooFewPoints {
            have: n_points,
            need: 15,
        });
    }
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut points = Vec::with_capacity(n_points);
    let mut parts: Vec<usize> = Vec::new();

    match class {
        ShapeKind::Sphere => {
            // Radius 0.5 via normalized Gaussian directions.
            let normal = Normal::new(0.0, 1.0).unwrap();
            for _ in 0..n_points {
                loop {
                    let v = [
                        normal.sample(&mut rng),
                        normal.sample(&mut rng),
                        normal.sample(&mut rng),
                    ];
                    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                    if n > 1e-9 {
                        points.push([0.5 * v[0] / n, 0.5 * v[1] / n, 0.5 * v[2] / n]);
                        break;
                    }
                }
            }
        }
        ShapeKind::Cube => {
            // Unit cube centered at the origin; faces chosen uniformly.
            for _ in 0..n_points {
                let face = rng.gen_range(0..6usize);
                let u = rng.gen_range(-0.5..0.5);
                let v = rng.gen_range(-0.5..0.5);
                let p = match face {
                    0 => [0.5, u, v],
                    1 => [-0.5, u, v],
                    2 => [u, 0.5, v],
                    3 => [u, -0.5, v],
                    4 => [u, v, 0.5],
                    _ => [u, v, -0.5],
                };
                points.push(p);
            }
        }
        ShapeKind::Cylinder => {
            // Radius 0.5, height 1. Areas: side 2*pi*r*h, caps pi*r^2 each.
            let r = 0.5;
            let side = 2.0 * std::f64::consts::PI * r;
            let cap = std::f64::consts::PI * r * r;
            let total = side + 2.0 * cap;
            for _ in 0..n_points {
                let pick = rng.gen_range(0.0..total);
                if pick < side {
                    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                    let z = rng.gen_range(-0.5..0.5);
                    points.push([r * theta.cos(), r * theta.sin(), z]);
                    parts.push(0); // side
                } else {
                    let top = pick < side + cap;
                    // Uniform over the disc.
                    let rho = r * rng.gen_range(0.0..1.0f64).sqrt();
                    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                    let z = if top { 0.5 } else { -0.5 };
                    points.push([rho * theta.cos(), rho * theta.sin(), z]);
                    parts.push(if top { 1 } else { 2 });
                }
            }
        }
        ShapeKind::Torus => {
            // Major radius R, tube radius r, R + r = 0.5.
            let big_r = 0.375;
            let small_r = 0.125;
            for _ in 0..n_points {
                let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                // Rejection sampling for uniform surface measure in phi.
                let phi = loop {
                    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
                    let w = (big_r + small_r * phi.cos()) / (big_r + small_r);
                    if rng.gen_range(0.0..1.0) < w {
                        break phi;
                    }
                };
                let ring = big_r + small_r * phi.cos();
                points.push([ring * theta.cos(), ring * theta.sin(), small_r * phi.sin()]);
                parts.push(if phi.cos() >= 0.0 { 0 } else { 1 }); // outer / inner
            }
        }
    }

    if noise > 0.0 {
        let jitter = Normal::new(0.0, noise).unwrap();
        for p in points.iter_mut() {
            for c in p.iter_mut() {
                *c += jitter.sample(&mut rng);
            }
        }
    }

    let mut cloud = PointCloud::new(points);
    cloud.label = Some(class.class_id());
    if !parts.is_empty() {
        cloud.part_labels = Some(parts);
    }
    Ok(cloud)
}

/// Map a cloud into [-0.5, 0.5]^3 with a uniform scale: the dimension of
/// maximum extent touches both bounds exactly; other dimensions are
/// centered within range.
pub fn normalize_unit_box(cloud: &PointCloud) -> PointCloud {
    if cloud.is_empty() {
        return cloud.clone();
    }
    let mut min = [f64::INFINITY; 3];
    let mut max = [f64::NEG_INFINITY; 3];
    for p in &cloud.points {
        for d in 0..3 {
            min[d] = min[d].min(p[d]);
            max[d] = max[d].max(p[d]);
        }
    }
    let ext = [max[0] - min[0], max[1] - min[1], max[2] - min[2]];
    let e = ext[0].max(ext[1]).max(ext[2]);
    if e <= 0.0 {
        let mut out = cloud.clone();
        for p in out.points.iter_mut() {
            *p = [0.0, 0.0, 0.0];
        }
        return out;
    }
    // (x - min)/e spans exactly [0, ext_d/e]; subtracting half the span
    // centers each dimension, and the max-extent dimension hits +-0.5
    // bit-exactly because ext_d/e is computed as e/e = 1.
    let half = [0.5 * (ext[0] / e), 0.5 * (ext[1] / e), 0.5 * (ext[2] / e)];
    let mut out = cloud.clone();
    for p in out.points.iter_mut() {
        for d in 0..3 {
            p[d] = (p[d] - min[d]) / e - half[d];
        }
    }
    out
}

/// Draw `n` points from a mesh: area-weighted over faces when faces exist,
/// otherwise uniform over vertices (without replacement while possible).
pub fn sample_surface(mesh: &Mesh, n: usize, rng: &mut ChaCha8Rng) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::TooFewPoints { have: 0, need: 0 });
    }
    if mesh.vertices.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if mesh.faces.is_empty() {
        let cloud = PointCloud::new(mesh.vertices.clone());
        return Ok(sample_points(&cloud, n, rng));
    }

    let areas: Vec<f64> = mesh
        .faces
        .iter()
        .map(|f| triangle_area(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]))
        .collect();
    let mut cum = Vec::with_capacity(areas.len());
    let mut total = 0.0;
    for a in &areas {
        total += a;
        cum.push(total);
    }
    if total <= 0.0 {
        return Err(Error::EmptyGraph);
    }

    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let pick = rng.gen_range(0.0..total);
        let fi = match cum.binary_search_by(|c| c.partial_cmp(&pick).unwrap()) {
            Ok(i) => i + 1,
            Err(i) => i,
        }
        .min(mesh.faces.len() - 1);
        let f = mesh.faces[fi];
        let (a, b, c) = (mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
        // Uniform barycentric point via the sqrt trick.
        let r1: f64 = rng.gen_range(0.0..1.0f64);
        let r2: f64 = rng.gen_range(0.0..1.0);
        let s = r1.sqrt();
        let (u, v, w) = (1.0 - s, s * (1.0 - r2), s * r2);
        points.push([
            u * a[0] + v * b[0] + w * c[0],
            u * a[1] + v * b[1] + w * c[1],
            u * a[2] + v * b[2] + w * c[2],
        ]);
    }
    Ok(PointCloud::new(points))
}

/// Uniform point sample from a cloud: without replacement when n does not
/// exceed the cloud size (a permutation at n = len), with replacement
/// beyond that. Part labels follow their points.
pub fn sample_points(cloud: &PointCloud, n: usize, rng: &mut ChaCha8Rng) -> PointCloud {
    let len = cloud.len();
    let indices: Vec<usize> = if n <= len {
        let mut idx: Vec<usize> = (0..len).collect();
        idx.shuffle(rng);
        idx.truncate(n);
        idx
    } else {
        (0..n).map(|_| rng.gen_range(0..len)).collect()
    };
    let points = indices.iter().map(|&i| cloud.points[i]).collect();
    let part_labels = cloud
        .part_labels
        .as_ref()
        .map(|p| indices.iter().map(|&i| p[i]).collect());
    PointCloud {
        points,
        label: cloud.label,
        part_labels,
    }
}

fn triangle_area(a: Point, b: Point, c: Point) -> f64 {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let cx = u[1] * v[2] - u[2] * v[1];
    let cy = u[2] * v[0] - u[0] * v[2];
    let cz = u[0] * v[1] - u[1] * v[0];
    0.5 * (cx * cx + cy * cy + cz * cz).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn off_minimal_valid() {
        let src = b"OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
        let mesh = parse_off(src).unwrap();
        assert_eq!(mesh.vertices.len(), 3);
        assert_eq!(mesh.faces.len(), 1);
    }

    #[test]
    fn off_fused_header() {
        let src = b"OFF3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
        let mesh = parse_off(src).unwrap();
        assert_eq!(mesh.vertices.len(), 3);
    }

    #[test]
    fn off_zero_vertices_is_error() {
        let src = b"OFF\n0 0 0\n";
        let err = parse_off(src).unwrap_err();
        assert!(err.to_string().contains("empty cloud"));
    }

    #[test]
    fn off_bad_vertex_reports_line() {
        let src = b"OFF\n2 0 0\n0 0 0\nfoo bar baz\n";
        match parse_off(src).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn off_triangle_area_weighted_sampling() {
        // Unit right triangle in the xy plane.
        let src = b"OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
        let mesh = parse_off(src).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cloud = sample_surface(&mesh, 1000, &mut rng).unwrap();
        assert_eq!(cloud.len(), 1000);
        let mut mean = [0.0, 0.0];
        for p in &cloud.points {
            assert!(p[0] >= -1e-12 && p[1] >= -1e-12 && p[0] + p[1] <= 1.0 + 1e-12);
            assert!(p[2].abs() < 1e-12);
            mean[0] += p[0];
            mean[1] += p[1];
        }
        mean[0] /= 1000.0;
        mean[1] /= 1000.0;
        // Centroid of the triangle is (1/3, 1/3).
        assert!((mean[0] - 1.0 / 3.0).abs() < 0.05);
        assert!((mean[1] - 1.0 / 3.0).abs() < 0.05);
    }

    #[test]
    fn two_faces_area_weighted_proportions() {
        // Areas 0.5 and 1.5: larger face should receive 75% of samples.
        let src = b"OFF\n6 2 0\n0 0 0\n1 0 0\n0 1 0\n2 0 1\n5 0 1\n2 1 1\n3 0 1 2\n3 3 4 5\n";
        let mesh = parse_off(src).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 100_000;
        let cloud = sample_surface(&mesh, n, &mut rng).unwrap();
        let big = cloud.points.iter().filter(|p| p[0] >= 2.0 - 1e-9).count();
        let frac = big as f64 / n as f64;
        assert!((frac - 0.75).abs() < 0.03, "fraction {frac}");
    }

    #[test]
    fn xyz_roundtrip_and_labels() {
        let cloud = parse_xyz(b"0 0 0\n1 1 1\n").unwrap();
        assert_eq!(cloud.len(), 2);
        assert!(cloud.part_labels.is_none());

        let labeled = parse_xyz(b"0 0 0 1\n1 1 1 2\n").unwrap();
        assert_eq!(labeled.part_labels, Some(vec![1, 2]));

        let back = parse_xyz(write_xyz(&labeled).as_bytes()).unwrap();
        assert_eq!(back, labeled);
    }

    #[test]
    fn xyz_bad_field_count() {
        match parse_xyz(b"0 0\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn sphere_noiseless_radius() {
        let cloud = generate_synthetic(ShapeKind::Sphere, 256, 0.0, 5).unwrap();
        for p in &cloud.points {
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            assert!((r - 0.5).abs() < 1e-9, "radius {r}");
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let a = generate_synthetic(ShapeKind::Torus, 128, 0.02, 99).unwrap();
        let b = generate_synthetic(ShapeKind::Torus, 128, 0.02, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generator_rejects_small_counts_and_bad_class() {
        assert!(generate_synthetic(ShapeKind::Cube, 8, 0.0, 1).is_err());
        assert!("pyramid".parse::<ShapeKind>().is_err());
    }

    #[test]
    fn cube_faces_near_uniform() {
        let cloud = generate_synthetic(ShapeKind::Cube, 10_000, 0.0, 3).unwrap();
        let mut counts = [0usize; 6];
        for p in &cloud.points {
            let face = if p[0] == 0.5 {
                0
            } else if p[0] == -0.5 {
                1
            } else if p[1] == 0.5 {
                2
            } else if p[1] == -0.5 {
                3
            } else if p[2] == 0.5 {
                4
            } else {
                5
            };
            counts[face] += 1;
        }
        let expect = 10_000.0 / 6.0;
        for (f, &c) in counts.iter().enumerate() {
            assert!(
                (c as f64 - expect).abs() < 0.05 * expect,
                "face {f} count {c}"
            );
        }
    }

    #[test]
    fn cylinder_and_torus_have_part_labels() {
        let cyl = generate_synthetic(ShapeKind::Cylinder, 512, 0.0, 7).unwrap();
        let parts = cyl.part_labels.as_ref().unwrap();
        assert_eq!(parts.len(), 512);
        assert!(parts.iter().any(|&p| p == 0));
        assert!(parts.iter().any(|&p| p == 1));
        assert!(parts.iter().any(|&p| p == 2));

        let torus = generate_synthetic(ShapeKind::Torus, 512, 0.0, 7).unwrap();
        let parts = torus.part_labels.as_ref().unwrap();
        assert!(parts.iter().all(|&p| p < 2));
    }

    #[test]
    fn normalize_touches_bounds_exactly() {
        let cloud = PointCloud::new(vec![[1.0, 2.0, 3.0], [5.0, 2.5, 3.5], [2.0, 2.2, 3.1]]);
        let norm = normalize_unit_box(&cloud);
        let xs: Vec<f64> = norm.points.iter().map(|p| p[0]).collect();
        assert_eq!(xs.iter().cloned().fold(f64::INFINITY, f64::min), -0.5);
        assert_eq!(xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max), 0.5);
        for p in &norm.points {
            for d in 0..3 {
                assert!(p[d] >= -0.5 && p[d] <= 0.5);
            }
        }
    }

    #[test]
    fn sample_points_is_permutation_at_full_count() {
        let cloud = generate_synthetic(ShapeKind::Sphere, 64, 0.0, 21).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sampled = sample_points(&cloud, 64, &mut rng);
        let mut a: Vec<_> = cloud.points.iter().map(|p| format!("{p:?}")).collect();
        let mut b: Vec<_> = sampled.points.iter().map(|p| format!("{p:?}")).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn sampled_count_contract() {
        let cloud = generate_synthetic(ShapeKind::Sphere, 2048, 0.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert_eq!(sample_points(&cloud, 1024, &mut rng).len(), 1024);
    }
}
