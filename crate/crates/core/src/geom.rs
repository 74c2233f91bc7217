//! Geometric primitives shared by every solver.
//!
//! The separating line is the x-axis. Disks are closed, and all disks of an
//! instance share one radius. Predicates come in two flavours selected by
//! [`Predicate`]: a tolerant double-precision test and an exact test that
//! falls back to rational arithmetic whenever the floating-point filter
//! cannot certify the sign.

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default absolute tolerance on squared-distance differences.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

const UNIT_ROUNDOFF: f64 = f64::EPSILON * 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("x = {x} lies outside the arc range [{xl}, {xr}]")]
    OutOfRange { x: f64, xl: f64, xr: f64 },
    #[error("arcs belong to identical circles")]
    IdenticalCircles,
    #[error("circle center ({x}, {y}) lies below the separating line")]
    CenterBelowLine { x: f64, y: f64 },
    #[error("circle does not reach below the separating line")]
    EmptyArc,
    #[error("radius must be positive and finite, got {0}")]
    BadRadius(f64),
}

#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Mirror image across the separating line.
    pub fn reflect(&self) -> Point {
        Point::new(self.x, -self.y)
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point::new(v[0], v[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point, radius: f64) -> Self {
        Disk { center, radius }
    }
}

/// Closed lower halfplane `y <= a*x + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfplaneLower {
    pub a: f64,
    pub b: f64,
}

impl HalfplaneLower {
    pub fn new(a: f64, b: f64) -> Self {
        HalfplaneLower { a, b }
    }
}

/// How containment is decided.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Predicate {
    /// Double precision with an absolute tolerance on the signed difference.
    Tolerant(f64),
    /// Exact sign, certified by a floating-point filter or rational fallback.
    Exact,
}

impl Default for Predicate {
    fn default() -> Self {
        Predicate::Tolerant(DEFAULT_TOLERANCE)
    }
}

impl Predicate {
    pub fn disk_contains(self, center: Point, radius: f64, p: Point) -> bool {
        match self {
            Predicate::Tolerant(eps) => {
                let dx = p.x - center.x;
                let dy = p.y - center.y;
                dx * dx + dy * dy - radius * radius <= eps
            }
            Predicate::Exact => disk_side_exact(center, radius, p) != Ordering::Greater,
        }
    }

    pub fn halfplane_contains(self, h: HalfplaneLower, p: Point) -> bool {
        match self {
            Predicate::Tolerant(eps) => p.y - (h.a * p.x + h.b) <= eps,
            Predicate::Exact => halfplane_side_exact(h, p) != Ordering::Greater,
        }
    }
}

/// Closed-disk membership with the default tolerance.
pub fn disk_contains(d: &Disk, p: Point) -> bool {
    Predicate::default().disk_contains(d.center, d.radius, p)
}

pub fn halfplane_contains(h: &HalfplaneLower, p: Point) -> bool {
    Predicate::default().halfplane_contains(*h, p)
}

fn rational(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite coordinate")
}

fn sign_of(v: &BigRational) -> Ordering {
    if v.is_zero() {
        Ordering::Equal
    } else if v.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Exact sign of `|p - center|^2 - radius^2`.
pub fn disk_side_exact(center: Point, radius: f64, p: Point) -> Ordering {
    let dx = p.x - center.x;
    let dy = p.y - center.y;
    let r2 = radius * radius;
    let s = dx * dx + dy * dy - r2;
    let bound = 8.0 * UNIT_ROUNDOFF * (dx * dx + dy * dy + r2);
    if s.abs() > bound && bound.is_finite() && bound > f64::MIN_POSITIVE {
        return s.partial_cmp(&0.0).unwrap();
    }
    let dx = rational(p.x) - rational(center.x);
    let dy = rational(p.y) - rational(center.y);
    let r = rational(radius);
    sign_of(&(&dx * &dx + &dy * &dy - &r * &r))
}

/// Exact sign of `p.y - (a * p.x + b)`.
pub fn halfplane_side_exact(h: HalfplaneLower, p: Point) -> Ordering {
    let ax = h.a * p.x;
    let s = p.y - (ax + h.b);
    let bound = 4.0 * UNIT_ROUNDOFF * (p.y.abs() + ax.abs() + h.b.abs());
    if s.abs() > bound && bound.is_finite() && bound > f64::MIN_POSITIVE {
        return s.partial_cmp(&0.0).unwrap();
    }
    let v = rational(p.y) - (rational(h.a) * rational(p.x) + rational(h.b));
    sign_of(&v)
}

/// The part of a circle's boundary strictly below the separating line.
///
/// Only circles centered on or above the line are accepted, so the arc is a
/// piece of the lower semicircle and therefore x-monotone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerArc {
    pub owner: usize,
    pub xl: f64,
    pub xr: f64,
    pub center: Point,
    pub radius: f64,
}

impl LowerArc {
    pub fn new(owner: usize, center: Point, radius: f64) -> Result<Self, GeomError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeomError::BadRadius(radius));
        }
        if center.y < 0.0 {
            return Err(GeomError::CenterBelowLine { x: center.x, y: center.y });
        }
        if center.y > radius {
            return Err(GeomError::EmptyArc);
        }
        let half = (radius * radius - center.y * center.y).max(0.0).sqrt();
        Ok(LowerArc { owner, xl: center.x - half, xr: center.x + half, center, radius })
    }

    pub fn y_at(&self, x: f64) -> Result<f64, GeomError> {
        if !(x >= self.xl && x <= self.xr) {
            return Err(GeomError::OutOfRange { x, xl: self.xl, xr: self.xr });
        }
        Ok(self.y_clamped(x))
    }

    /// Lower-semicircle height at `x`, clamping the square root at the rim.
    #[inline]
    pub fn y_clamped(&self, x: f64) -> f64 {
        let dx = x - self.center.x;
        self.center.y - (self.radius * self.radius - dx * dx).max(0.0).sqrt()
    }

    fn same_circle(&self, other: &LowerArc) -> bool {
        self.center == other.center && self.radius == other.radius
    }
}

/// Height of the arc at `x`; `x` must lie in the arc's range.
pub fn arc_y_at(arc: &LowerArc, x: f64) -> Result<f64, GeomError> {
    arc.y_at(x)
}

/// Common points of two lower arcs, sorted by x.
pub fn arc_intersections(a1: &LowerArc, a2: &LowerArc) -> Result<Vec<Point>, GeomError> {
    if a1.same_circle(a2) {
        return Err(GeomError::IdenticalCircles);
    }
    let tol = 1e-12 * a1.radius.max(a2.radius).max(1.0);
    let mut out: Vec<Point> = circle_circle(a1.center, a1.radius, a2.center, a2.radius)
        .into_iter()
        .filter(|p| {
            p.y <= tol
                && p.x >= a1.xl - tol
                && p.x <= a1.xr + tol
                && p.x >= a2.xl - tol
                && p.x <= a2.xr + tol
        })
        .map(|p| Point::new(p.x, p.y.min(0.0)))
        .collect();
    out.sort_by(|a, b| a.x.total_cmp(&b.x));
    out.dedup_by(|a, b| (a.x - b.x).abs() <= tol && (a.y - b.y).abs() <= tol);
    Ok(out)
}

fn circle_circle(c1: Point, r1: f64, c2: Point, r2: f64) -> Vec<Point> {
    let dx = c2.x - c1.x;
    let dy = c2.y - c1.y;
    let d2 = dx * dx + dy * dy;
    let d = d2.sqrt();
    if d == 0.0 {
        return Vec::new();
    }
    let sum = r1 + r2;
    let scale = sum * sum;
    if d2 > scale * (1.0 + 1e-14) || d < (r1 - r2).abs() * (1.0 - 1e-14) {
        return Vec::new();
    }
    let a = (d2 + r1 * r1 - r2 * r2) / (2.0 * d);
    let h2 = r1 * r1 - a * a;
    let mx = c1.x + a * dx / d;
    let my = c1.y + a * dy / d;
    if h2 <= 0.0 {
        return vec![Point::new(mx, my)];
    }
    let h = h2.sqrt();
    let ox = -dy * h / d;
    let oy = dx * h / d;
    vec![Point::new(mx + ox, my + oy), Point::new(mx - ox, my - oy)]
}

/// An x-monotone curve the cutting is built on. A dual region is the closed
/// set on or above its curve, restricted to the curve's x-range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve {
    Arc(LowerArc),
    Line { a: f64, b: f64 },
}

impl Curve {
    pub fn x_range(&self) -> (f64, f64) {
        match self {
            Curve::Arc(a) => (a.xl, a.xr),
            Curve::Line { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    #[inline]
    pub fn y_at(&self, x: f64) -> f64 {
        match self {
            Curve::Arc(a) => a.y_clamped(x),
            Curve::Line { a, b } => a * x + b,
        }
    }

    /// Minimum and maximum height over `[lo, hi]` (clipped to the range).
    pub fn y_bounds(&self, lo: f64, hi: f64) -> (f64, f64) {
        match self {
            Curve::Arc(a) => {
                let lo = lo.max(a.xl);
                let hi = hi.min(a.xr);
                let ylo = a.y_clamped(lo);
                let yhi = a.y_clamped(hi);
                let mut min = ylo.min(yhi);
                let max = ylo.max(yhi);
                if lo <= a.center.x && a.center.x <= hi {
                    min = a.center.y - a.radius;
                }
                (min, max)
            }
            Curve::Line { a, b } => {
                let y1 = a * lo + b;
                let y2 = a * hi + b;
                if lo.is_infinite() || hi.is_infinite() {
                    if *a == 0.0 {
                        return (*b, *b);
                    }
                    return (f64::NEG_INFINITY, f64::INFINITY);
                }
                (y1.min(y2), y1.max(y2))
            }
        }
    }

    /// x-coordinates where the two curves meet inside both ranges.
    pub fn intersection_xs(&self, other: &Curve) -> Vec<f64> {
        let mut xs = match (self, other) {
            (Curve::Arc(p), Curve::Arc(q)) => {
                let tol = 1e-12 * p.radius.max(1.0);
                circle_circle(p.center, p.radius, q.center, q.radius)
                    .into_iter()
                    .filter(|pt| pt.y <= p.center.y + tol && pt.y <= q.center.y + tol)
                    .map(|pt| pt.x)
                    .collect()
            }
            (Curve::Arc(p), Curve::Line { a, b }) | (Curve::Line { a, b }, Curve::Arc(p)) => {
                arc_line_xs(p, *a, *b)
            }
            (Curve::Line { a: a1, b: b1 }, Curve::Line { a: a2, b: b2 }) => {
                if a1 == a2 {
                    Vec::new()
                } else {
                    vec![(b2 - b1) / (a1 - a2)]
                }
            }
        };
        let (l1, h1) = self.x_range();
        let (l2, h2) = other.x_range();
        let lo = l1.max(l2);
        let hi = h1.min(h2);
        let slack = 1e-12 * (1.0 + lo.abs().min(hi.abs()).min(1e12));
        xs.retain(|x| x.is_finite() && *x >= lo - slack && *x <= hi + slack);
        for x in xs.iter_mut() {
            *x = x.clamp(lo, hi);
        }
        xs
    }

    /// Float test: is `p` on or above the curve, inside its x-range?
    pub fn covers(&self, p: Point) -> bool {
        let (lo, hi) = self.x_range();
        p.x >= lo && p.x <= hi && p.y >= self.y_at(p.x)
    }
}

fn arc_line_xs(arc: &LowerArc, a: f64, b: f64) -> Vec<f64> {
    let c = arc.center;
    let r = arc.radius;
    let e = b - c.y;
    let qa = 1.0 + a * a;
    let qb = 2.0 * (a * e - c.x);
    let qc = c.x * c.x + e * e - r * r;
    let disc = qb * qb - 4.0 * qa * qc;
    let tol = 1e-12 * r.max(1.0);
    let roots: Vec<f64> = if disc < -1e-14 * qb * qb.max(1.0) {
        Vec::new()
    } else if disc <= 0.0 {
        vec![-qb / (2.0 * qa)]
    } else {
        let sq = disc.sqrt();
        // numerically stable pair
        let t = -0.5 * (qb + qb.signum() * sq);
        if t == 0.0 {
            vec![0.0]
        } else {
            vec![t / qa, qc / t]
        }
    };
    roots
        .into_iter()
        .filter(|x| a * x + b <= c.y + tol)
        .collect()
}
