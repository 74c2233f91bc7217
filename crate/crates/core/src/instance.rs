//! Problem instances: model, validation, generation and JSON I/O.

use std::fmt;
use std::fs;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{disk_side_exact, HalfplaneLower, Point, Predicate};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid generator request: {0}")]
    Generator(String),
    #[error("instance rejected: {0}")]
    Rejected(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedDisk {
    pub center: Point,
    pub weight: f64,
}

/// Points above the x-axis, weighted disks of a common radius centered below it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageInstance {
    pub radius: f64,
    pub points: Vec<Point>,
    pub disks: Vec<WeightedDisk>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub p: Point,
    pub weight: f64,
}

/// Weighted points above the x-axis, unweighted disks centered below it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HittingInstance {
    pub radius: f64,
    pub points: Vec<WeightedPoint>,
    pub disks: Vec<Point>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfplaneKind {
    #[default]
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedHalfplane {
    pub a: f64,
    pub b: f64,
    pub weight: f64,
    #[serde(default)]
    pub kind: HalfplaneKind,
}

impl WeightedHalfplane {
    pub fn lower(a: f64, b: f64, weight: f64) -> Self {
        WeightedHalfplane { a, b, weight, kind: HalfplaneKind::Lower }
    }

    pub fn region(&self) -> HalfplaneLower {
        HalfplaneLower::new(self.a, self.b)
    }
}

/// Points covered by weighted halfplanes `y <= a*x + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfplaneInstance {
    pub points: Vec<Point>,
    pub halfplanes: Vec<WeightedHalfplane>,
}

impl CoverageInstance {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn m(&self) -> usize {
        self.disks.len()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.disks.iter().map(|d| d.weight).collect()
    }

    pub fn covers(&self, pred: Predicate, disk: usize, point: usize) -> bool {
        pred.disk_contains(self.disks[disk].center, self.radius, self.points[point])
    }

    /// Dual hitting-set instance: reflected disk centers become weighted
    /// points, reflected points become disk centers.
    pub fn dual_hitting(&self) -> HittingInstance {
        HittingInstance {
            radius: self.radius,
            points: self
                .disks
                .iter()
                .map(|d| WeightedPoint { p: d.center.reflect(), weight: d.weight })
                .collect(),
            disks: self.points.iter().map(Point::reflect).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        parse_json(text)
    }
}

impl HittingInstance {
    /// Coverage instance whose optimal disk subsets are this instance's optimal
    /// point subsets (same indices).
    pub fn dual_coverage(&self) -> CoverageInstance {
        CoverageInstance {
            radius: self.radius,
            points: self.disks.iter().map(Point::reflect).collect(),
            disks: self
                .points
                .iter()
                .map(|p| WeightedDisk { center: p.p.reflect(), weight: p.weight })
                .collect(),
        }
    }

    pub fn covers(&self, pred: Predicate, point: usize, disk: usize) -> bool {
        pred.disk_contains(self.disks[disk], self.radius, self.points[point].p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        parse_json(text)
    }
}

impl HalfplaneInstance {
    pub fn weights(&self) -> Vec<f64> {
        self.halfplanes.iter().map(|h| h.weight).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        parse_json(text)
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, InstanceError> {
    serde_json::from_str(text).map_err(|e| InstanceError::Parse(e.to_string()))
}

/// Reads any JSON document type from a path, or stdin when the path is `-`.
pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, InstanceError> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|source| InstanceError::Io { path: "-".into(), source })?;
        s
    } else {
        fs::read_to_string(path)
            .map_err(|source| InstanceError::Io { path: path.display().to_string(), source })?
    };
    parse_json(&text).map_err(|e| match e {
        InstanceError::Parse(msg) => InstanceError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn read_instance(path: &Path) -> Result<CoverageInstance, InstanceError> {
    read_json(path)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), InstanceError> {
    let text = serde_json::to_string(value).expect("value serializes");
    fs::write(path, text)
        .map_err(|source| InstanceError::Io { path: path.display().to_string(), source })
}

pub fn write_instance(path: &Path, inst: &CoverageInstance) -> Result<(), InstanceError> {
    write_json(path, inst)
}

/// Left-to-right order of points; equal x resolved by input index.
pub fn sorted_order(points: &[Point]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x).then(a.cmp(&b)));
    order
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Issue {
    pub severity: Severity,
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.issues.iter().any(|i| i.severity == Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn count(&self, kind: &str) -> usize {
        self.issues.iter().filter(|i| i.kind == kind).count()
    }

    fn error(&mut self, kind: &'static str, message: String) {
        self.issues.push(Issue { severity: Severity::Error, kind, message });
    }

    fn warn(&mut self, kind: &'static str, message: String) {
        self.issues.push(Issue { severity: Severity::Warning, kind, message });
    }

    /// Fails with the first hard error, if any.
    pub fn into_result(self) -> Result<ValidationReport, InstanceError> {
        let first = self.errors().next().map(|issue| issue.message.clone());
        match first {
            Some(message) => Err(InstanceError::Rejected(message)),
            None => Ok(self),
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.issues {
            let tag = match issue.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            writeln!(f, "{tag}[{}]: {}", issue.kind, issue.message)?;
        }
        Ok(())
    }
}

/// Disk centers bucketed by x for near-linear coverage checks.
struct CenterIndex {
    xs: Vec<f64>,
    ids: Vec<usize>,
}

impl CenterIndex {
    fn new(centers: impl Iterator<Item = Point>) -> Self {
        let mut pairs: Vec<(f64, usize)> = centers.enumerate().map(|(i, c)| (c.x, i)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        CenterIndex { xs: pairs.iter().map(|p| p.0).collect(), ids: pairs.iter().map(|p| p.1).collect() }
    }

    fn near(&self, x: f64, radius: f64) -> impl Iterator<Item = usize> + '_ {
        let lo = self.xs.partition_point(|&v| v < x - radius * (1.0 + 1e-9) - 1e-9);
        let hi = self.xs.partition_point(|&v| v <= x + radius * (1.0 + 1e-9) + 1e-9);
        self.ids[lo..hi].iter().copied()
    }
}

fn uncovered_points(inst: &CoverageInstance, pred: Predicate) -> Vec<usize> {
    let index = CenterIndex::new(inst.disks.iter().map(|d| d.center));
    (0..inst.n())
        .filter(|&i| {
            let p = inst.points[i];
            !index.near(p.x, inst.radius).any(|s| pred.disk_contains(inst.disks[s].center, inst.radius, p))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ValidateOptions {
    /// Flag points lying exactly on a disk boundary (exact arithmetic).
    pub exact_boundary: bool,
}

pub fn validate(inst: &CoverageInstance) -> ValidationReport {
    validate_with(inst, ValidateOptions::default())
}

/// Hard errors only (separation, finiteness, weights); no coverage scan.
pub fn check_structure(inst: &CoverageInstance) -> Result<(), InstanceError> {
    structural_report(inst).into_result().map(|_| ())
}

fn structural_report(inst: &CoverageInstance) -> ValidationReport {
    let mut report = ValidationReport::default();
    if !(inst.radius > 0.0 && inst.radius.is_finite()) {
        report.error("radius", format!("radius must be positive and finite, got {}", inst.radius));
    }
    for (i, p) in inst.points.iter().enumerate() {
        if !p.is_finite() {
            report.error("non-finite", format!("point {i} has a non-finite coordinate"));
        } else if p.y < 0.0 {
            report.error("point below line", format!("point {i} at {p:?} lies below the separating line"));
        }
    }
    for (j, d) in inst.disks.iter().enumerate() {
        if !d.center.is_finite() {
            report.error("non-finite", format!("disk {j} has a non-finite center"));
        } else if d.center.y > 0.0 {
            report.error(
                "center above line",
                format!("disk {j} centered at {:?} lies above the separating line", d.center),
            );
        }
        if !(d.weight > 0.0 && d.weight.is_finite()) {
            report.error("weight", format!("disk {j} has non-positive weight {}", d.weight));
        }
    }
    report
}

pub fn validate_with(inst: &CoverageInstance, opts: ValidateOptions) -> ValidationReport {
    let mut report = structural_report(inst);
    if report.has_errors() {
        return report;
    }
    let order = sorted_order(&inst.points);
    for w in order.windows(2) {
        let (a, b) = (inst.points[w[0]], inst.points[w[1]]);
        if a.x == b.x {
            let kind = if a.y == b.y { "duplicate point" } else { "x-tie" };
            report.warn(kind, format!("points {} and {} share x = {}", w[0], w[1], a.x));
        }
    }
    for i in uncovered_points(inst, Predicate::default()) {
        report.warn("uncovered point", format!("point {i} is not covered by any disk"));
    }
    if opts.exact_boundary {
        let index = CenterIndex::new(inst.disks.iter().map(|d| d.center));
        for (i, p) in inst.points.iter().enumerate() {
            for s in index.near(p.x, inst.radius) {
                if disk_side_exact(inst.disks[s].center, inst.radius, *p).is_eq() {
                    report.warn("on boundary", format!("point {i} lies exactly on the boundary of disk {s}"));
                }
            }
        }
    }
    report
}

pub fn validate_hitting(hit: &HittingInstance) -> ValidationReport {
    let mut report = ValidationReport::default();
    if !(hit.radius > 0.0 && hit.radius.is_finite()) {
        report.error("radius", format!("radius must be positive and finite, got {}", hit.radius));
    }
    for (i, p) in hit.points.iter().enumerate() {
        if !p.p.is_finite() || p.p.y < 0.0 {
            report.error("point below line", format!("point {i} at {:?} is not above the separating line", p.p));
        }
        if !(p.weight > 0.0 && p.weight.is_finite()) {
            report.error("weight", format!("point {i} has non-positive weight {}", p.weight));
        }
    }
    for (j, c) in hit.disks.iter().enumerate() {
        if !c.is_finite() || c.y > 0.0 {
            report.error("center above line", format!("disk {j} centered at {c:?} is not below the separating line"));
        }
    }
    if report.has_errors() {
        return report;
    }
    for j in uncovered_points(&hit.dual_coverage(), Predicate::default()) {
        report.warn("unhit disk", format!("disk {j} contains no point"));
    }
    report
}

pub fn validate_halfplanes(inst: &HalfplaneInstance) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (i, p) in inst.points.iter().enumerate() {
        if !p.is_finite() {
            report.error("non-finite", format!("point {i} has a non-finite coordinate"));
        }
    }
    for (j, h) in inst.halfplanes.iter().enumerate() {
        if !(h.a.is_finite() && h.b.is_finite()) {
            report.error("non-finite", format!("halfplane {j} has non-finite coefficients"));
        }
        if !(h.weight > 0.0 && h.weight.is_finite()) {
            report.error("weight", format!("halfplane {j} has non-positive weight {}", h.weight));
        }
        if h.kind == HalfplaneKind::Upper {
            report.error(
                "upper halfplane",
                format!(
                    "halfplane {j} is an upper halfplane; mixed upper/lower halfplane coverage is not supported"
                ),
            );
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Uniform,
    Clustered,
    AdversarialOverlap,
}

impl Profile {
    pub const ALL: [Profile; 3] = [Profile::Uniform, Profile::Clustered, Profile::AdversarialOverlap];

    pub fn name(&self) -> &'static str {
        match self {
            Profile::Uniform => "uniform",
            Profile::Clustered => "clustered",
            Profile::AdversarialOverlap => "adversarial-overlap",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Profile {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Profile::Uniform),
            "clustered" => Ok(Profile::Clustered),
            "adversarial-overlap" | "adversarial" => Ok(Profile::AdversarialOverlap),
            other => Err(InstanceError::Generator(format!("unknown profile '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerateOptions {
    pub profile: Profile,
    /// Plant one point no disk can reach.
    pub infeasible: bool,
    pub radius: f64,
}

impl GenerateOptions {
    pub fn new(profile: Profile) -> Self {
        GenerateOptions { profile, infeasible: false, radius: 1.0 }
    }

    pub fn infeasible(mut self) -> Self {
        self.infeasible = true;
        self
    }
}

const MAX_RESAMPLES: usize = 10_000;

/// Deterministic random instance. Every regular point is covered by at least
/// one disk; with `infeasible` set, the last point is planted out of reach.
pub fn generate(n: usize, m: usize, seed: u64, profile: Profile) -> Result<CoverageInstance, InstanceError> {
    generate_with(n, m, seed, GenerateOptions::new(profile))
}

pub fn generate_with(
    n: usize,
    m: usize,
    seed: u64,
    opts: GenerateOptions,
) -> Result<CoverageInstance, InstanceError> {
    if n == 0 || m == 0 {
        return Err(InstanceError::Generator("n and m must be at least 1".into()));
    }
    let r = opts.radius;
    if !(r > 0.0 && r.is_finite()) {
        return Err(InstanceError::Generator(format!("radius must be positive, got {r}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = match opts.profile {
        Profile::AdversarialOverlap => r,
        _ => r * (2.0 + ((n + m) as f64).sqrt() / 2.0),
    };
    let clusters: Vec<f64> = {
        let k = ((n + m) / 48).max(1);
        (0..k).map(|_| rng.gen_range(0.0..=width)).collect()
    };
    let sample_x = |rng: &mut ChaCha8Rng, spread: f64| -> f64 {
        match opts.profile {
            Profile::Uniform => rng.gen_range(0.0..=width),
            Profile::Clustered => {
                let c = clusters[rng.gen_range(0..clusters.len())];
                let t: f64 = (0..3).map(|_| rng.gen_range(-1.0..1.0)).sum::<f64>() / 3.0;
                (c + t * spread * r).clamp(0.0, width)
            }
            Profile::AdversarialOverlap => rng.gen_range(-0.5 * spread * r..=width + 0.5 * spread * r),
        }
    };
    let regular = if opts.infeasible { n - 1 } else { n };
    let disks: Vec<WeightedDisk> = (0..m)
        .map(|_| {
            let x = sample_x(&mut rng, 1.5);
            let y = -rng.gen_range(0.0..=0.9 * r);
            let weight = rng.gen_range(1.0..=100.0);
            WeightedDisk { center: Point::new(x, y), weight }
        })
        .collect();
    let index = CenterIndex::new(disks.iter().map(|d| d.center));
    let covered = |p: Point| index.near(p.x, r).any(|s| Predicate::Tolerant(0.0).disk_contains(disks[s].center, r, p));
    let mut points = Vec::with_capacity(n);
    for _ in 0..regular {
        let mut attempt = 0;
        loop {
            let p = Point::new(sample_x(&mut rng, 1.0), rng.gen_range(0.0..=0.9 * r));
            if covered(p) {
                points.push(p);
                break;
            }
            attempt += 1;
            if attempt >= MAX_RESAMPLES {
                return Err(InstanceError::Generator(format!(
                    "could not place a covered point after {MAX_RESAMPLES} attempts (profile {}, m = {m})",
                    opts.profile
                )));
            }
        }
    }
    if opts.infeasible {
        let far = disks.iter().map(|d| d.center.x).fold(width, f64::max) + 3.0 * r;
        points.push(Point::new(far, 0.5 * r));
    }
    Ok(CoverageInstance { radius: r, points, disks })
}

/// Random lower-halfplane instance used by tests and the fuzz loop.
pub fn generate_halfplanes(n: usize, m: usize, seed: u64) -> HalfplaneInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n).map(|_| Point::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))).collect();
    let halfplanes = (0..m)
        .map(|_| WeightedHalfplane::lower(rng.gen_range(-2.0..2.0), rng.gen_range(-4.0..6.0), rng.gen_range(1.0..=100.0)))
        .collect();
    HalfplaneInstance { points, halfplanes }
}

/// Random hitting instance: points above the line, unweighted disks below it.
pub fn generate_hitting(n: usize, m: usize, seed: u64) -> HittingInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = 2.0 + ((n + m) as f64).sqrt() / 2.0;
    let points = (0..n)
        .map(|_| WeightedPoint {
            p: Point::new(rng.gen_range(0.0..=width), rng.gen_range(0.0..=0.9)),
            weight: rng.gen_range(1.0..=100.0),
        })
        .collect();
    let disks = (0..m).map(|_| Point::new(rng.gen_range(0.0..=width), -rng.gen_range(0.0..=0.9))).collect();
    HittingInstance { radius: 1.0, points, disks }
}
