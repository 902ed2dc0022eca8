//! Reflections across hyperplanes, the support-shrinking injectivity
//! certificate for antipodal surface pairs, closure of concurrent mirror
//! systems under their own reflections, and the combinatorial validator for
//! configurations of vertex-meeting cones.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::ruled::lines::antipodal_check;
use crate::vec3::{self, Vec3};

/// Mirror-count cap past which a reflection system is declared divergent
/// (the finite surrogate for "the generated system is dense").
pub const DIVERGENCE_CAP: usize = 256;

/// Two unit normals describe the same mirror when they agree up to sign
/// within this tolerance.
pub const MIRROR_ID_TOL: f64 = 1e-10;

/// Residual bound for "all mirrors pass through a common point".
pub const COMMON_POINT_TOL: f64 = 1e-12;

/// Orthogonality tolerance used by the injectivity certificate when testing
/// that the connecting segment is normal to the surface at both endpoints.
pub const CERT_ANTIPODAL_TOL: f64 = 1e-10;

/// Mirror image of `x` across the hyperplane through `a` with unit normal
/// `nu`: `x - 2 <x - a, nu> nu`. An involution and an isometry.
pub fn reflect(x: Vec3, a: Vec3, nu: Vec3) -> Vec3 {
    assert!(
        (vec3::norm(nu) - 1.0).abs() <= 1e-14,
        "reflection normal must be a unit vector"
    );
    let h = vec3::dot(vec3::sub(x, a), nu);
    vec3::sub(x, vec3::scale(2.0 * h, nu))
}

/// Radii emitted by the support-shrinking iteration
/// `r_{n+1} = sqrt(r_n^2 - dist^2)`, run until the radius drops below
/// `dist` (`terminated = true`) or `max_iter` radii have been emitted.
#[derive(Clone, Debug)]
pub struct ShrinkReport {
    pub radii: Vec<f64>,
    pub terminated: bool,
}

impl ShrinkReport {
    /// Number of shrink steps performed (radii emitted minus one).
    pub fn steps(&self) -> usize {
        self.radii.len() - 1
    }
}

/// Run the support-shrinking iteration from `r1` with step distance `dist`.
/// In exact arithmetic `r_n = sqrt(r1^2 - (n-1) dist^2)`, so the iteration
/// always terminates for positive `dist`; `max_iter` only guards against
/// degenerate inputs. The iteration tracks squared radii, so the emitted
/// radii match the closed form to rounding error without the drift a
/// repeated square root would accumulate.
pub fn shrink_iteration(r1: f64, dist: f64, max_iter: usize) -> ShrinkReport {
    assert!(r1 > 0.0 && dist > 0.0, "radii and distance must be positive");
    assert!(max_iter >= 1);
    let d2 = dist * dist;
    let mut squares = vec![r1 * r1];
    while *squares.last().unwrap() >= d2 && squares.len() < max_iter {
        squares.push(squares.last().unwrap() - d2);
    }
    let terminated = *squares.last().unwrap() < d2;
    ShrinkReport {
        radii: squares.into_iter().map(f64::sqrt).collect(),
        terminated,
    }
}

/// Outcome of the antipodal injectivity certificate.
#[derive(Clone, Debug)]
pub enum Certificate {
    /// The pair is antipodal; the support-shrinking argument closes after
    /// `steps` steps, with the emitted radii attached as evidence.
    Certified { steps: usize, radii: Vec<f64> },
    NoCertificate { reason: String },
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certificate::Certified { .. })
    }
}

/// Certify that a surface with an antipodal pair `(a, b)` forces any
/// function whose mean vanishes over all centered spheres to vanish: checks
/// the two-sided normality of the segment and runs the support-shrinking
/// iteration from `support_radius` (measured from `a`) with step `|a - b|`.
///
/// A support radius below `|a - b|` is certified with zero steps: the
/// support already lies on one side.
pub fn injectivity_certificate(
    a: Vec3,
    b: Vec3,
    normal_a: Vec3,
    normal_b: Vec3,
    support_radius: f64,
    max_iter: usize,
) -> Certificate {
    if !(support_radius > 0.0) {
        return Certificate::NoCertificate {
            reason: "support radius must be positive".into(),
        };
    }
    match antipodal_check(a, b, normal_a, normal_b, CERT_ANTIPODAL_TOL) {
        Ok(true) => {}
        Ok(false) => {
            return Certificate::NoCertificate {
                reason: "orthogonality fails: the segment is not normal to the surface at both endpoints"
                    .into(),
            }
        }
        Err(e) => {
            return Certificate::NoCertificate {
                reason: e.to_string(),
            }
        }
    }
    let dist = vec3::norm(vec3::sub(a, b));
    let report = shrink_iteration(support_radius, dist, max_iter.max(1));
    if !report.terminated {
        return Certificate::NoCertificate {
            reason: format!(
                "shrink iteration did not fall below {dist} within {} radii",
                report.radii.len()
            ),
        };
    }
    Certificate::Certified {
        steps: report.steps(),
        radii: report.radii,
    }
}

/// A hyperplane mirror: a point on the plane and a unit normal.
#[derive(Clone, Copy, Debug)]
pub struct Mirror {
    pub point: Vec3,
    pub normal: Vec3,
}

/// A finite set of mirrors through a common point, with a cap on how many
/// mirrors the reflection closure may reach before being declared
/// divergent. In dimension 2 the mirrors are lines in the plane (all z
/// components zero).
#[derive(Clone, Debug)]
pub struct ReflectionSystem {
    dim: usize,
    mirrors: Vec<Mirror>,
    cap: usize,
    common_point: Vec3,
}

impl ReflectionSystem {
    pub fn new(dim: usize, mirrors: Vec<Mirror>, cap: usize) -> Result<Self, Error> {
        if dim != 2 && dim != 3 {
            return Err(Error::invalid("reflection systems live in dimension 2 or 3"));
        }
        if mirrors.is_empty() {
            return Err(Error::invalid("reflection system needs at least one mirror"));
        }
        if cap == 0 {
            return Err(Error::invalid("divergence cap must be positive"));
        }
        for m in &mirrors {
            if (vec3::norm(m.normal) - 1.0).abs() > 1e-12 {
                return Err(Error::invalid("mirror normals must be unit vectors"));
            }
            if dim == 2 && (m.normal[2].abs() > 1e-14 || m.point[2].abs() > 1e-14) {
                return Err(Error::invalid(
                    "dimension-2 mirrors must have vanishing third components",
                ));
            }
        }
        let common_point = common_point(dim, &mirrors).ok_or_else(|| {
            Error::invalid(
                "out of modeled scope: the mirrors do not share a common point \
                 (parallel or prism-like systems are not modeled)",
            )
        })?;
        Ok(ReflectionSystem {
            dim,
            mirrors,
            cap,
            common_point,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mirrors(&self) -> &[Mirror] {
        &self.mirrors
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn common_point(&self) -> Vec3 {
        self.common_point
    }
}

/// Least-squares common point of the mirror hyperplanes (in the first `dim`
/// coordinates), accepted only when every signed distance is below
/// `COMMON_POINT_TOL`.
fn common_point(dim: usize, mirrors: &[Mirror]) -> Option<Vec3> {
    // Normal equations: (sum n n^T) x = sum n <p, n>, solved with partial
    // pivoting; rank-deficient directions fall back to zero.
    let mut a = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    for m in mirrors {
        let h = vec3::dot(m.point, m.normal);
        for r in 0..dim {
            for c in 0..dim {
                a[r][c] += m.normal[r] * m.normal[c];
            }
            b[r] += m.normal[r] * h;
        }
    }
    let x = solve_small(dim, &mut a, &mut b);
    let ok = mirrors
        .iter()
        .all(|m| vec3::dot(vec3::sub(x, m.point), m.normal).abs() <= COMMON_POINT_TOL);
    ok.then_some(x)
}

/// Gaussian elimination with partial pivoting on a `dim x dim` system;
/// near-zero pivots leave the corresponding coordinate at zero (any point
/// of the solution set serves as a candidate common point).
fn solve_small(dim: usize, a: &mut [[f64; 3]; 3], b: &mut [f64; 3]) -> Vec3 {
    let mut pivot_of_col: [Option<usize>; 3] = [None; 3];
    let mut used = [false; 3];
    for col in 0..dim {
        let mut best: Option<usize> = None;
        for r in 0..dim {
            if !used[r] && (best.is_none() || a[r][col].abs() > a[best.unwrap()][col].abs()) {
                best = Some(r);
            }
        }
        let pr = best.unwrap();
        if a[pr][col].abs() < 1e-12 {
            continue;
        }
        used[pr] = true;
        pivot_of_col[col] = Some(pr);
        for r in 0..dim {
            if r != pr && a[r][col].abs() > 0.0 {
                let f = a[r][col] / a[pr][col];
                for c in 0..dim {
                    a[r][c] -= f * a[pr][c];
                }
                b[r] -= f * b[pr];
            }
        }
    }
    let mut x = [0.0f64; 3];
    for col in 0..dim {
        if let Some(pr) = pivot_of_col[col] {
            x[col] = b[pr] / a[pr][col];
        }
    }
    x
}

/// Result of closing a reflection system under its own reflections.
#[derive(Clone, Debug)]
pub enum Closure {
    Closed {
        mirrors: Vec<Mirror>,
        common_point: Vec3,
    },
    /// The generated set exceeded the cap: at desk scale this is the
    /// signature of an angle that is not a rational multiple of pi, whose
    /// orbit is dense.
    Divergent { cap: usize },
}

/// Sign-canonicalize a mirror normal: flip so the first component of
/// significant size is positive.
fn canonical_normal(n: Vec3) -> Vec3 {
    for c in n {
        if c.abs() > 1e-8 {
            return if c < 0.0 { vec3::scale(-1.0, n) } else { n };
        }
    }
    n
}

fn same_mirror(a: Vec3, b: Vec3) -> bool {
    let direct = vec3::norm(vec3::sub(a, b));
    let flipped = vec3::norm(vec3::add(a, b));
    direct.min(flipped) <= MIRROR_ID_TOL
}

/// Close the system under reflections of mirrors across each other:
/// repeatedly reflect every mirror normal across every other and insert the
/// (sign-canonicalized) results until nothing new appears, or until the cap
/// is exceeded. Deterministic single-threaded worklist.
pub fn coxeter_closure(sys: &ReflectionSystem) -> Closure {
    let mut normals: Vec<Vec3> = Vec::new();
    for m in sys.mirrors() {
        let n = canonical_normal(m.normal);
        if !normals.iter().any(|&k| same_mirror(k, n)) {
            normals.push(n);
        }
    }
    loop {
        let mut added = false;
        let count = normals.len();
        for i in 0..count {
            for j in 0..count {
                if i == j {
                    continue;
                }
                let ni = normals[i];
                let nj = normals[j];
                let reflected = vec3::sub(nj, vec3::scale(2.0 * vec3::dot(nj, ni), ni));
                let n = canonical_normal(reflected);
                if !normals.iter().any(|&k| same_mirror(k, n)) {
                    normals.push(n);
                    added = true;
                    if normals.len() > sys.cap() {
                        return Closure::Divergent { cap: sys.cap() };
                    }
                }
            }
        }
        if !added {
            break;
        }
    }
    let common_point = sys.common_point();
    Closure::Closed {
        mirrors: normals
            .into_iter()
            .map(|normal| Mirror {
                point: common_point,
                normal,
            })
            .collect(),
        common_point,
    }
}

/// One cone of a configuration: an identifier and its vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeSpec {
    pub id: String,
    pub vertex: Vec3,
}

/// Label of the intersection of one unordered pair of cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairIntersection {
    /// The pair meets exactly at the vertex of the named cone.
    VertexOf(String),
    /// The pair meets along a curve that is not a single vertex.
    TransversalCurve,
    Empty,
}

/// A labeled abstract configuration of cones: which cones exist and how
/// each unordered pair intersects. Keys are normalized with
/// [`ConeConfig::pair_key`].
#[derive(Clone, Debug, Default)]
pub struct ConeConfig {
    pub cones: Vec<ConeSpec>,
    pub intersections: BTreeMap<(String, String), PairIntersection>,
}

impl ConeConfig {
    /// Normalized (sorted) key for an unordered pair of cone ids.
    pub fn pair_key(a: &str, b: &str) -> (String, String) {
        if a <= b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        }
    }

    pub fn insert_pair(&mut self, a: &str, b: &str, label: PairIntersection) {
        self.intersections.insert(Self::pair_key(a, b), label);
    }
}

/// Validation outcome for a cone configuration.
#[derive(Clone, Debug, PartialEq)]
pub enum ConfigVerdict {
    /// `case` is the number of cones (1, 2, or 3).
    Valid { case: u8, description: String },
    /// The first violated structural rule.
    Invalid { rule: String },
}

/// Decide whether the labeled configuration is one that a common zero set
/// of a full eigenfunction family can form: a single cone, two cones
/// meeting at the vertex of one of them, or three cones whose
/// vertex-hosting relation is cyclic. Anything else names the violated
/// rule. Structural defects in the labeling itself (missing or
/// contradictory entries) are errors, not verdicts.
pub fn validate_cone_configuration(cfg: &ConeConfig) -> Result<ConfigVerdict, Error> {
    let p = cfg.cones.len();
    if p == 0 {
        return Err(Error::malformed("cones", "configuration needs at least one cone"));
    }
    for (i, a) in cfg.cones.iter().enumerate() {
        for b in cfg.cones.iter().skip(i + 1) {
            if a.id == b.id {
                return Err(Error::malformed(
                    "cones",
                    format!("duplicate cone id \"{}\"", a.id),
                ));
            }
            if vec3::norm(vec3::sub(a.vertex, b.vertex)) <= 1e-12 {
                return Err(Error::malformed(
                    "cones",
                    format!(
                        "cones \"{}\" and \"{}\" share a vertex; merge coincident-vertex cones first",
                        a.id, b.id
                    ),
                ));
            }
        }
    }
    let ids: Vec<&str> = cfg.cones.iter().map(|c| c.id.as_str()).collect();
    // Every stored key must be a normalized pair of distinct known ids.
    for ((a, b), _) in cfg.intersections.iter() {
        let path = format!("intersections[{a},{b}]");
        if a >= b {
            return Err(Error::malformed(path, "pair keys must be sorted and distinct"));
        }
        if !ids.contains(&a.as_str()) || !ids.contains(&b.as_str()) {
            return Err(Error::malformed(path, "pair references an unknown cone id"));
        }
    }
    // Every unordered pair must be labeled.
    for (i, a) in ids.iter().enumerate() {
        for b in ids.iter().skip(i + 1) {
            let key = ConeConfig::pair_key(a, b);
            if !cfg.intersections.contains_key(&key) {
                return Err(Error::malformed(
                    format!("intersections[{},{}]", key.0, key.1),
                    "missing intersection label for this pair",
                ));
            }
        }
    }
    if p == 1 {
        return Ok(ConfigVerdict::Valid {
            case: 1,
            description: "a single cone".into(),
        });
    }
    if p >= 4 {
        return Ok(ConfigVerdict::Invalid {
            rule: "at most three cones can share a common zero configuration".into(),
        });
    }
    // Labels must be vertex-meetings, and each VertexOf must name a member
    // of its own pair.
    let mut hosted_in: BTreeMap<&str, usize> = BTreeMap::new();
    for ((a, b), label) in cfg.intersections.iter() {
        match label {
            PairIntersection::Empty => {
                return Ok(ConfigVerdict::Invalid {
                    rule: "a disjoint pair of cones cannot occur: separated zero sets certify injectivity"
                        .into(),
                });
            }
            PairIntersection::TransversalCurve => {
                return Ok(ConfigVerdict::Invalid {
                    rule: "two cones of a common zero set may only meet at the vertex of one of them"
                        .into(),
                });
            }
            PairIntersection::VertexOf(v) => {
                if v != a && v != b {
                    return Err(Error::malformed(
                        format!("intersections[{a},{b}]"),
                        "vertex label must name one of the two cones in the pair",
                    ));
                }
                // Vertex of v lies on the other cone of the pair.
                let host = if v == a { b.as_str() } else { a.as_str() };
                *hosted_in.entry(host).or_insert(0) += 1;
            }
        }
    }
    if let Some((host, _)) = hosted_in.iter().find(|(_, &count)| count >= 2) {
        return Ok(ConfigVerdict::Invalid {
            rule: format!(
                "cone \"{host}\" would pass through the vertices of two other cones, which is impossible"
            ),
        });
    }
    if p == 2 {
        Ok(ConfigVerdict::Valid {
            case: 2,
            description: "two cones meeting at the vertex of one of them".into(),
        })
    } else {
        // p == 3 with no double-hosting: the vertex relation is a cyclic
        // tournament, one of the two allowed three-cone patterns.
        Ok(ConfigVerdict::Valid {
            case: 3,
            description: "three cones with a cyclic vertex-hosting pattern".into(),
        })
    }
}
