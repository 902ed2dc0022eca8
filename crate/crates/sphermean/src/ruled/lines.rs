//! Closest points between ruling lines, extremal ruling pairs, and the
//! antipodal orthogonality test.

use crate::error::Error;
use crate::vec3::{self, Vec3};

/// Relative threshold on `1 - cos^2` of the angle between directions below
/// which a pair of lines is declared parallel.
pub const PARALLEL_TOL: f64 = 1e-12;

/// A straight line given by a point and a (not necessarily unit) direction.
#[derive(Clone, Copy, Debug)]
pub struct Line {
    pub point: Vec3,
    pub direction: Vec3,
}

/// Closest-point data for one pair of non-parallel lines.
#[derive(Clone, Copy, Debug)]
pub struct LinePairGeometry {
    /// Parameter of the closest point on the first line.
    pub lambda: f64,
    /// Parameter of the closest point on the second line.
    pub mu: f64,
    pub closest1: Vec3,
    pub closest2: Vec3,
    pub distance: f64,
    /// Largest cosine between the connecting segment and either direction
    /// (0 when the lines intersect); the segment should be a common
    /// perpendicular, so this is a residual of the closed form.
    pub perp_defect: f64,
}

/// Closest points of two lines by the closed-form solution of the normal
/// equations. Directions need not be unit vectors.
pub fn closest_points(l1: &Line, l2: &Line) -> Result<LinePairGeometry, Error> {
    let d1 = l1.direction;
    let d2 = l2.direction;
    let a = vec3::dot(d1, d1);
    let c = vec3::dot(d2, d2);
    if a == 0.0 || c == 0.0 {
        return Err(Error::invalid("line with zero direction vector"));
    }
    let b = vec3::dot(d1, d2);
    let w = vec3::sub(l1.point, l2.point);
    let p = vec3::dot(w, d1);
    let q = vec3::dot(w, d2);
    let det = a * c - b * b;
    let discriminant = det / (a * c); // sin^2 of the angle between directions
    if discriminant < PARALLEL_TOL {
        return Err(Error::ParallelLines { discriminant });
    }
    let lambda = (b * q - c * p) / det;
    let mu = (a * q - b * p) / det;
    let closest1 = vec3::add(l1.point, vec3::scale(lambda, d1));
    let closest2 = vec3::add(l2.point, vec3::scale(mu, d2));
    let seg = vec3::sub(closest1, closest2);
    let distance = vec3::norm(seg);
    let perp_defect = if distance > 0.0 {
        let c1 = (vec3::dot(seg, d1) / (distance * a.sqrt())).abs();
        let c2 = (vec3::dot(seg, d2) / (distance * c.sqrt())).abs();
        c1.max(c2)
    } else {
        0.0
    };
    Ok(LinePairGeometry {
        lambda,
        mu,
        closest1,
        closest2,
        distance,
        perp_defect,
    })
}

/// A one-parameter family of lines (ruling of a surface).
pub trait LineFamily {
    fn point(&self, t: f64) -> Vec3;
    fn direction(&self, t: f64) -> Vec3;
    fn line(&self, t: f64) -> Line {
        Line {
            point: self.point(t),
            direction: self.direction(t),
        }
    }
}

/// Line family from a pair of closures.
pub struct FnFamily<P, D>
where
    P: Fn(f64) -> Vec3,
    D: Fn(f64) -> Vec3,
{
    pub point_fn: P,
    pub direction_fn: D,
}

impl<P, D> LineFamily for FnFamily<P, D>
where
    P: Fn(f64) -> Vec3,
    D: Fn(f64) -> Vec3,
{
    fn point(&self, t: f64) -> Vec3 {
        (self.point_fn)(t)
    }
    fn direction(&self, t: f64) -> Vec3 {
        (self.direction_fn)(t)
    }
}

/// Distance data between the family's lines at parameters `t` and `s`.
///
/// `t == s` is the same line: distance 0 by convention (the closed form
/// degenerates there).
pub fn line_distance<F: LineFamily + ?Sized>(
    family: &F,
    t: f64,
    s: f64,
) -> Result<LinePairGeometry, Error> {
    if t == s {
        let point = family.point(t);
        return Ok(LinePairGeometry {
            lambda: 0.0,
            mu: 0.0,
            closest1: point,
            closest2: point,
            distance: 0.0,
            perp_defect: 0.0,
        });
    }
    closest_points(&family.line(t), &family.line(s))
}

/// Result of the extremal-pair scan over a parameter window.
#[derive(Clone, Copy, Debug)]
pub struct ExtremalScan {
    pub t: f64,
    pub s: f64,
    pub distance: f64,
    /// Pairs skipped because their lines were (anti)parallel.
    pub parallel_skipped: usize,
    pub pairs_evaluated: usize,
}

/// Grid scan plus local refinement for the most distant pair of ruling
/// lines over the window `[lo, hi]`.
///
/// Ties keep the lexicographically smallest `(t, s)` (the scan only replaces
/// the incumbent on strict improvement, in row-major order). When every pair
/// is parallel the report carries distance 0 at `(lo, lo)`.
pub fn extremal_lines<F: LineFamily + ?Sized>(
    family: &F,
    lo: f64,
    hi: f64,
    resolution: usize,
    refine_iters: usize,
) -> ExtremalScan {
    assert!(resolution >= 2 && lo < hi);
    let coord = |i: usize| lo + (hi - lo) * (i as f64) / ((resolution - 1) as f64);
    let mut best = ExtremalScan {
        t: lo,
        s: lo,
        distance: 0.0,
        parallel_skipped: 0,
        pairs_evaluated: 0,
    };
    for i in 0..resolution {
        for j in (i + 1)..resolution {
            let (t, s) = (coord(i), coord(j));
            match line_distance(family, t, s) {
                Ok(g) => {
                    best.pairs_evaluated += 1;
                    if g.distance > best.distance {
                        best.t = t;
                        best.s = s;
                        best.distance = g.distance;
                    }
                }
                Err(Error::ParallelLines { .. }) => best.parallel_skipped += 1,
                Err(_) => {}
            }
        }
    }
    // Pattern search around the incumbent with a shrinking step.
    let mut step = (hi - lo) / ((resolution - 1) as f64);
    for _ in 0..refine_iters {
        let mut improved = false;
        for (dt, ds) in [
            (-1.0, -1.0),
            (-1.0, 0.0),
            (-1.0, 1.0),
            (0.0, -1.0),
            (0.0, 1.0),
            (1.0, -1.0),
            (1.0, 0.0),
            (1.0, 1.0),
        ] {
            let t = (best.t + dt * step).clamp(lo, hi);
            let s = (best.s + ds * step).clamp(lo, hi);
            if t == s {
                continue;
            }
            match line_distance(family, t, s) {
                Ok(g) => {
                    best.pairs_evaluated += 1;
                    if g.distance > best.distance {
                        best.t = t;
                        best.s = s;
                        best.distance = g.distance;
                        improved = true;
                    }
                }
                Err(Error::ParallelLines { .. }) => best.parallel_skipped += 1,
                Err(_) => {}
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Whether the segment `a - b` is orthogonal to the surface at both ends,
/// i.e. parallel to both unit normals, within `tol` (on the sine of the
/// deviation angle).
pub fn antipodal_check(
    a: Vec3,
    b: Vec3,
    normal_a: Vec3,
    normal_b: Vec3,
    tol: f64,
) -> Result<bool, Error> {
    let v = vec3::sub(a, b);
    let len = vec3::norm(v);
    if len == 0.0 {
        return Err(Error::invalid("antipodal test needs two distinct points"));
    }
    for n in [normal_a, normal_b] {
        if (vec3::norm(n) - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("surface normals must be unit vectors"));
        }
    }
    let sin_a = vec3::norm(vec3::cross(v, normal_a)) / len;
    let sin_b = vec3::norm(vec3::cross(v, normal_b)) / len;
    Ok(sin_a <= tol && sin_b <= tol)
}
