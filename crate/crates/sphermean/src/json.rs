//! JSON schemas for every file the command-line tool reads or writes:
//! exact polynomials, discrete measures, compactly supported sources,
//! truncated ruled charts, classification verdicts, mirror systems,
//! certificates, labeled cone configurations, and the batch-job wrappers
//! around them. Parsing is strict, and every parse error names the JSON
//! path of the offending node (e.g. `$.function.h.terms[2].num`).
//!
//! Conventions:
//! - rationals appear either as a single string `"p/q"` (or `"p"`), or —
//!   inside polynomial terms — as separate decimal strings `num`/`den`;
//! - floats are plain JSON numbers;
//! - emitted objects serialize with alphabetically sorted keys and
//!   shortest-round-trip floats, so reports are byte-identical across runs.

use num::bigint::BigInt;
use num::One;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::generators::{
    grid_sample, odd_reflection, radial_harmonic_at, BumpSpec, CompactFunction, DiscreteMeasure,
};
use crate::means::MeanReport;
use crate::moments::{GridSpec, DEFAULT_KMAX};
use crate::poly::{rat_int, Poly, Rat};
use crate::ruled::chart::{RuledChart, SingularityVerdict};
use crate::series::{Series, VecSeries};
use crate::symmetry::{
    Certificate, Closure, ConeConfig, ConeSpec, ConfigVerdict, Mirror, PairIntersection,
    ReflectionSystem, DIVERGENCE_CAP,
};
use crate::vec3::{self, Vec3};

// ---------------------------------------------------------------------------
// Path-tracked access helpers
// ---------------------------------------------------------------------------

/// Parses a complete JSON document; syntax errors are reported at `$` with
/// the parser's line/column diagnostic.
pub fn parse_document(text: &str) -> Result<Value, Error> {
    serde_json::from_str(text).map_err(|e| Error::malformed("$", e.to_string()))
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, Error> {
    v.as_object()
        .ok_or_else(|| Error::malformed(path, "expected a JSON object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, Error> {
    v.as_array()
        .ok_or_else(|| Error::malformed(path, "expected a JSON array"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str, Error> {
    v.as_str()
        .ok_or_else(|| Error::malformed(path, "expected a JSON string"))
}

fn as_f64(v: &Value, path: &str) -> Result<f64, Error> {
    v.as_f64()
        .ok_or_else(|| Error::malformed(path, "expected a JSON number"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize, Error> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| Error::malformed(path, "expected a nonnegative integer"))
}

fn as_bool(v: &Value, path: &str) -> Result<bool, Error> {
    v.as_bool()
        .ok_or_else(|| Error::malformed(path, "expected a boolean"))
}

/// Required-field lookup; the error path points at the missing key.
fn field<'a>(
    o: &'a Map<String, Value>,
    path: &str,
    key: &str,
) -> Result<(&'a Value, String), Error> {
    let sub = format!("{path}.{key}");
    match o.get(key) {
        Some(v) => Ok((v, sub)),
        None => Err(Error::malformed(sub, "missing required field")),
    }
}

fn opt_field<'a>(
    o: &'a Map<String, Value>,
    path: &str,
    key: &str,
) -> Option<(&'a Value, String)> {
    o.get(key).map(|v| (v, format!("{path}.{key}")))
}

/// A fixed-length vector of floats.
fn floats(v: &Value, path: &str, len: usize) -> Result<Vec<f64>, Error> {
    let arr = as_array(v, path)?;
    if arr.len() != len {
        return Err(Error::malformed(
            path,
            format!("expected {len} numbers, found {}", arr.len()),
        ));
    }
    arr.iter()
        .enumerate()
        .map(|(i, x)| as_f64(x, &format!("{path}[{i}]")))
        .collect()
}

fn float_list(v: &Value, path: &str) -> Result<Vec<f64>, Error> {
    let arr = as_array(v, path)?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| as_f64(x, &format!("{path}[{i}]")))
        .collect()
}

fn vec3_of(v: &Value, path: &str, dim: usize) -> Result<Vec3, Error> {
    Ok(vec3::pad(&floats(v, path, dim)?))
}

// ---------------------------------------------------------------------------
// Rationals
// ---------------------------------------------------------------------------

/// Parses `"p/q"` or `"p"` with arbitrary-precision integer parts.
pub fn rat_from_str(s: &str, path: &str) -> Result<Rat, Error> {
    let s = s.trim();
    let (num_txt, den_txt) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num_txt
        .parse()
        .map_err(|_| Error::malformed(path, format!("not an integer numerator: {num_txt:?}")))?;
    let den: BigInt = den_txt
        .parse()
        .map_err(|_| Error::malformed(path, format!("not an integer denominator: {den_txt:?}")))?;
    if den == BigInt::from(0) {
        return Err(Error::malformed(path, "zero denominator"));
    }
    Ok(Rat::new(num, den))
}

/// Renders a rational as `"p/q"`, or `"p"` when the denominator is one.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn rat_at(v: &Value, path: &str) -> Result<Rat, Error> {
    rat_from_str(as_str(v, path)?, path)
}

fn rat_strings(rs: &[Rat]) -> Value {
    Value::Array(rs.iter().map(|r| Value::String(rat_to_string(r))).collect())
}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

/// `{"dim": n, "terms": [{"exp": [e1..en], "num": "...", "den": "..."}]}`
/// with coefficients as decimal-string big integers.
pub fn poly_to_json(p: &Poly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(e, c)| {
            json!({
                "exp": e,
                "num": c.numer().to_string(),
                "den": c.denom().to_string(),
            })
        })
        .collect();
    json!({ "dim": p.dim(), "terms": terms })
}

pub fn poly_from_json(v: &Value, path: &str) -> Result<Poly, Error> {
    let o = as_object(v, path)?;
    let (dv, dp) = field(o, path, "dim")?;
    let dim = as_usize(dv, &dp)?;
    if dim == 0 || dim > 3 {
        return Err(Error::malformed(dp, "dimension must be 1, 2, or 3"));
    }
    let (tv, tp) = field(o, path, "terms")?;
    let arr = as_array(tv, &tp)?;
    let mut terms = Vec::with_capacity(arr.len());
    for (i, t) in arr.iter().enumerate() {
        let tpath = format!("{tp}[{i}]");
        let to = as_object(t, &tpath)?;
        let (ev, ep) = field(to, &tpath, "exp")?;
        let earr = as_array(ev, &ep)?;
        if earr.len() != dim {
            return Err(Error::malformed(
                ep,
                format!("exponent vector must have {dim} entries"),
            ));
        }
        let mut exp = Vec::with_capacity(dim);
        for (k, e) in earr.iter().enumerate() {
            let epath = format!("{ep}[{k}]");
            let n = as_usize(e, &epath)?;
            exp.push(u32::try_from(n).map_err(|_| Error::malformed(&epath, "exponent too large"))?);
        }
        let (nv, np) = field(to, &tpath, "num")?;
        let num: BigInt = as_str(nv, &np)?
            .trim()
            .parse()
            .map_err(|_| Error::malformed(&np, "not a decimal integer"))?;
        let (dv, dp) = field(to, &tpath, "den")?;
        let den: BigInt = as_str(dv, &dp)?
            .trim()
            .parse()
            .map_err(|_| Error::malformed(&dp, "not a decimal integer"))?;
        if den == BigInt::from(0) {
            return Err(Error::malformed(dp, "zero denominator"));
        }
        terms.push((exp, Rat::new(num, den)));
    }
    Poly::from_terms(dim, terms).map_err(|e| Error::malformed(path, e.to_string()))
}

// ---------------------------------------------------------------------------
// Discrete measures
// ---------------------------------------------------------------------------

/// `{"dim": n, "points": [["x1","x2",..],..], "weights": ["w1",..]}` with
/// rational entries as `"p/q"` strings.
pub fn measure_to_json(mu: &DiscreteMeasure) -> Value {
    let points: Vec<Value> = mu.points().iter().map(|p| rat_strings(p)).collect();
    json!({
        "dim": mu.dim(),
        "points": points,
        "weights": rat_strings(mu.weights()),
    })
}

pub fn measure_from_json(v: &Value, path: &str) -> Result<DiscreteMeasure, Error> {
    let o = as_object(v, path)?;
    let (dv, dp) = field(o, path, "dim")?;
    let dim = as_usize(dv, &dp)?;
    let (pv, pp) = field(o, path, "points")?;
    let parr = as_array(pv, &pp)?;
    let mut points = Vec::with_capacity(parr.len());
    for (i, p) in parr.iter().enumerate() {
        let ppath = format!("{pp}[{i}]");
        let coords = as_array(p, &ppath)?;
        if coords.len() != dim {
            return Err(Error::malformed(
                ppath,
                format!("point must have {dim} coordinates"),
            ));
        }
        let mut pt = Vec::with_capacity(dim);
        for (k, c) in coords.iter().enumerate() {
            pt.push(rat_at(c, &format!("{ppath}[{k}]"))?);
        }
        points.push(pt);
    }
    let (wv, wp) = field(o, path, "weights")?;
    let warr = as_array(wv, &wp)?;
    let mut weights = Vec::with_capacity(warr.len());
    for (i, w) in warr.iter().enumerate() {
        weights.push(rat_at(w, &format!("{wp}[{i}]"))?);
    }
    DiscreteMeasure::new(dim, points, weights).map_err(|e| Error::malformed(path, e.to_string()))
}

// ---------------------------------------------------------------------------
// Compactly supported sources
// ---------------------------------------------------------------------------

/// `{"kind": "radial_harmonic" | "odd_plane" | "grid" | "discrete", ...}`:
///
/// - `radial_harmonic`: `r_in`, `r_out` (numbers), `h` (polynomial object),
///   optional `center` (numbers, length = `h.dim`);
/// - `odd_plane`: `point`, `normal` (numbers), `profile` (nested source);
/// - `grid`: `dim`, `origin`, `spacing`, `shape`, `values`;
/// - `discrete`: `measure` (discrete-measure object).
pub fn function_from_json(v: &Value, path: &str) -> Result<CompactFunction, Error> {
    let o = as_object(v, path)?;
    let (kv, kp) = field(o, path, "kind")?;
    let kind = as_str(kv, &kp)?;
    match kind {
        "radial_harmonic" => {
            let (rv, rp) = field(o, path, "r_in")?;
            let r_in = as_f64(rv, &rp)?;
            let (rv, rp) = field(o, path, "r_out")?;
            let r_out = as_f64(rv, &rp)?;
            let (hv, hp) = field(o, path, "h")?;
            let h = poly_from_json(hv, &hp)?;
            let dim = h.dim();
            let center = match opt_field(o, path, "center") {
                Some((cv, cp)) => vec3_of(cv, &cp, dim)?,
                None => [0.0; 3],
            };
            let bump = BumpSpec::new(r_in, r_out).map_err(|e| Error::malformed(path, e.to_string()))?;
            radial_harmonic_at(bump, h, center).map_err(|e| Error::malformed(path, e.to_string()))
        }
        "odd_plane" => {
            let (fv, fp) = field(o, path, "profile")?;
            let profile = function_from_json(fv, &fp)?;
            let dim = profile.dim();
            let (pv, pp) = field(o, path, "point")?;
            let point = floats(pv, &pp, dim)?;
            let (nv, np) = field(o, path, "normal")?;
            let normal = floats(nv, &np, dim)?;
            odd_reflection(&point, &normal, profile)
                .map_err(|e| Error::malformed(path, e.to_string()))
        }
        "grid" => {
            let (dv, dp) = field(o, path, "dim")?;
            let dim = as_usize(dv, &dp)?;
            if dim < 2 || dim > 3 {
                return Err(Error::malformed(dp, "grid dimension must be 2 or 3"));
            }
            let (ov, op) = field(o, path, "origin")?;
            let origin = floats(ov, &op, dim)?;
            let (sv, sp) = field(o, path, "spacing")?;
            let spacing = as_f64(sv, &sp)?;
            let (shv, shp) = field(o, path, "shape")?;
            let sharr = as_array(shv, &shp)?;
            if sharr.len() != dim {
                return Err(Error::malformed(shp, format!("shape must have {dim} entries")));
            }
            let mut shape = Vec::with_capacity(dim);
            for (i, s) in sharr.iter().enumerate() {
                shape.push(as_usize(s, &format!("{shp}[{i}]"))?);
            }
            let (vv, vp) = field(o, path, "values")?;
            let values = float_list(vv, &vp)?;
            grid_sample(dim, &origin, spacing, &shape, values)
                .map_err(|e| Error::malformed(path, e.to_string()))
        }
        "discrete" => {
            let (mv, mp) = field(o, path, "measure")?;
            Ok(CompactFunction::Discrete(measure_from_json(mv, &mp)?))
        }
        other => Err(Error::malformed(
            kp,
            format!("unknown source kind {other:?} (expected radial_harmonic, odd_plane, grid, or discrete)"),
        )),
    }
}

/// Inverse of [`function_from_json`] on the defining data.
pub fn function_to_json(f: &CompactFunction) -> Value {
    match f {
        CompactFunction::RadialHarmonic {
            dim, center, bump, h, ..
        } => {
            json!({
                "kind": "radial_harmonic",
                "r_in": bump.r_in(),
                "r_out": bump.r_out(),
                "h": poly_to_json(h),
                "center": &center[..*dim],
            })
        }
        CompactFunction::OddPlane {
            point,
            normal,
            profile,
        } => {
            let dim = profile.dim();
            json!({
                "kind": "odd_plane",
                "point": &point[..dim],
                "normal": &normal[..dim],
                "profile": function_to_json(profile),
            })
        }
        CompactFunction::GridSample {
            dim,
            origin,
            spacing,
            shape,
            values,
        } => {
            json!({
                "kind": "grid",
                "dim": dim,
                "origin": &origin[..*dim],
                "spacing": spacing,
                "shape": &shape[..*dim],
                "values": values,
            })
        }
        CompactFunction::Discrete(mu) => json!({
            "kind": "discrete",
            "measure": measure_to_json(mu),
        }),
    }
}

// ---------------------------------------------------------------------------
// Ruled charts and classification verdicts
// ---------------------------------------------------------------------------

/// A parsed chart plus the base parameter and line-shift values the
/// classification should use.
#[derive(Clone, Debug)]
pub struct ChartInput {
    pub chart: RuledChart,
    pub t0: Rat,
    pub lambda0: Rat,
}

/// `{"order": M, "u": [[r,r,r],...], "e": [[r,r,r],...]}` with rationals as
/// `"p/q"` strings: row `j` holds the degree-`j` coefficient vectors, so a
/// chart of truncation order `M` has at most `M+1` rows (shorter rows lists
/// are zero-padded). `"exact": true` marks polynomial charts instead of the
/// `order` field; optional `"t0"` and `"lambda0"` select the base point and
/// line shift (both default `"0"`).
pub fn chart_input_from_json(v: &Value, path: &str) -> Result<ChartInput, Error> {
    let o = as_object(v, path)?;
    let exact = match opt_field(o, path, "exact") {
        Some((ev, ep)) => as_bool(ev, &ep)?,
        None => false,
    };
    let rows_of = |key: &str, limit: Option<usize>| -> Result<[Vec<Rat>; 3], Error> {
        let (rv, rp) = field(o, path, key)?;
        let arr = as_array(rv, &rp)?;
        if let Some(n) = limit {
            if arr.len() > n {
                return Err(Error::malformed(
                    &rp,
                    format!("at most {n} coefficient rows fit truncation order {}", n - 1),
                ));
            }
        }
        if arr.is_empty() {
            return Err(Error::malformed(&rp, "needs at least one coefficient row"));
        }
        let mut comps: [Vec<Rat>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for (j, row) in arr.iter().enumerate() {
            let rpath = format!("{rp}[{j}]");
            let cols = as_array(row, &rpath)?;
            if cols.len() != 3 {
                return Err(Error::malformed(rpath, "coefficient rows have three entries"));
            }
            for (k, c) in cols.iter().enumerate() {
                comps[k].push(rat_at(c, &format!("{rpath}[{k}]"))?);
            }
        }
        Ok(comps)
    };
    let (u, e) = if exact {
        if o.contains_key("order") {
            return Err(Error::malformed(
                format!("{path}.order"),
                "exact charts carry complete coefficient lists; drop the order field",
            ));
        }
        (
            VecSeries::exact(rows_of("u", None)?),
            VecSeries::exact(rows_of("e", None)?),
        )
    } else {
        let (ov, op) = field(o, path, "order")?;
        let m = as_usize(ov, &op)?;
        if m == 0 {
            return Err(Error::malformed(op, "truncation order must be at least 1"));
        }
        let build = |comps: [Vec<Rat>; 3]| {
            VecSeries::new(comps.map(|c| Series::with_order(c, m + 1)))
        };
        (
            build(rows_of("u", Some(m + 1))?),
            build(rows_of("e", Some(m + 1))?),
        )
    };
    let chart = RuledChart::new(u, e).map_err(|e| Error::malformed(path, e.to_string()))?;
    let t0 = match opt_field(o, path, "t0") {
        Some((tv, tp)) => rat_at(tv, &tp)?,
        None => rat_int(0),
    };
    let lambda0 = match opt_field(o, path, "lambda0") {
        Some((lv, lp)) => rat_at(lv, &lp)?,
        None => rat_int(0),
    };
    Ok(ChartInput { chart, t0, lambda0 })
}

/// Inverse of [`chart_input_from_json`] for finite-order charts (the only
/// kind with an enumerable coefficient list).
pub fn chart_to_json(c: &RuledChart) -> Result<Value, Error> {
    let order = c.order();
    if order == usize::MAX {
        return Err(Error::invalid(
            "only finite-order charts serialize; truncate exact charts first",
        ));
    }
    let rows = |s: &VecSeries| -> Value {
        Value::Array(
            (0..order)
                .map(|j| rat_strings(&s.coeff_vec(j).expect("coefficient within order")))
                .collect(),
        )
    };
    Ok(json!({
        "order": order - 1,
        "u": rows(&c.u),
        "e": rows(&c.e),
    }))
}

/// `{"verdict": tag, ...}` with the tag-specific payload and the truncation
/// order the decision was made at.
pub fn verdict_to_json(v: &SingularityVerdict) -> Value {
    match v {
        SingularityVerdict::RegularPoint { order } => {
            json!({ "verdict": "regular_point", "order": order })
        }
        SingularityVerdict::Plane { normal, order } => {
            json!({ "verdict": "plane", "normal": rat_strings(normal.coeffs()), "order": order })
        }
        SingularityVerdict::Cone { vertex, order } => {
            json!({ "verdict": "cone", "vertex": rat_strings(vertex.as_slice()), "order": order })
        }
        SingularityVerdict::Cuspidal { form, j0, order } => {
            json!({
                "verdict": "cuspidal",
                "form": rat_strings(form.coeffs()),
                "j0": j0,
                "order": order,
            })
        }
        SingularityVerdict::Inconclusive { reason, order } => {
            json!({ "verdict": "inconclusive", "reason": reason, "order": order })
        }
    }
}

// ---------------------------------------------------------------------------
// Mirror systems and closures
// ---------------------------------------------------------------------------

/// `{"dim": 2|3, "mirrors": [{"point": [..], "normal": [..]}, ...],
///   "cap": n?}`; `cap` defaults to [`DIVERGENCE_CAP`].
pub fn reflection_system_from_json(v: &Value, path: &str) -> Result<ReflectionSystem, Error> {
    let o = as_object(v, path)?;
    let (dv, dp) = field(o, path, "dim")?;
    let dim = as_usize(dv, &dp)?;
    if dim != 2 && dim != 3 {
        return Err(Error::malformed(dp, "dimension must be 2 or 3"));
    }
    let (mv, mp) = field(o, path, "mirrors")?;
    let marr = as_array(mv, &mp)?;
    let mut mirrors = Vec::with_capacity(marr.len());
    for (i, m) in marr.iter().enumerate() {
        let mpath = format!("{mp}[{i}]");
        let mo = as_object(m, &mpath)?;
        let (pv, pp) = field(mo, &mpath, "point")?;
        let point = vec3_of(pv, &pp, dim)?;
        let (nv, np) = field(mo, &mpath, "normal")?;
        let normal = vec3_of(nv, &np, dim)?;
        mirrors.push(Mirror { point, normal });
    }
    let cap = match opt_field(o, path, "cap") {
        Some((cv, cp)) => as_usize(cv, &cp)?,
        None => DIVERGENCE_CAP,
    };
    ReflectionSystem::new(dim, mirrors, cap).map_err(|e| Error::malformed(path, e.to_string()))
}

fn mirror_to_json(m: &Mirror, dim: usize) -> Value {
    json!({ "point": &m.point[..dim], "normal": &m.normal[..dim] })
}

/// `{"status": "closed", "count": n, "common_point": [..], "mirrors": [..]}`
/// or `{"status": "divergent", "cap": n}`.
pub fn closure_to_json(c: &Closure, dim: usize) -> Value {
    match c {
        Closure::Closed {
            mirrors,
            common_point,
        } => json!({
            "status": "closed",
            "count": mirrors.len(),
            "common_point": &common_point[..dim],
            "mirrors": mirrors.iter().map(|m| mirror_to_json(m, dim)).collect::<Vec<_>>(),
        }),
        Closure::Divergent { cap } => json!({ "status": "divergent", "cap": cap }),
    }
}

// ---------------------------------------------------------------------------
// Injectivity certificates
// ---------------------------------------------------------------------------

/// Input for the antipodal certificate:
/// `{"a": [..], "b": [..], "normal_a": [..], "normal_b": [..],
///   "support_radius": r, "max_iter": n?}`.
#[derive(Clone, Debug)]
pub struct CertifyInput {
    pub a: Vec3,
    pub b: Vec3,
    pub normal_a: Vec3,
    pub normal_b: Vec3,
    pub support_radius: f64,
    pub max_iter: usize,
}

pub fn certify_input_from_json(v: &Value, path: &str) -> Result<CertifyInput, Error> {
    let o = as_object(v, path)?;
    let point = |key: &str| -> Result<Vec3, Error> {
        let (pv, pp) = field(o, path, key)?;
        vec3_of(pv, &pp, 3)
    };
    let (rv, rp) = field(o, path, "support_radius")?;
    let support_radius = as_f64(rv, &rp)?;
    if !(support_radius > 0.0) {
        return Err(Error::malformed(rp, "support radius must be positive"));
    }
    let max_iter = match opt_field(o, path, "max_iter") {
        Some((mv, mp)) => as_usize(mv, &mp)?.max(1),
        None => 100_000,
    };
    Ok(CertifyInput {
        a: point("a")?,
        b: point("b")?,
        normal_a: point("normal_a")?,
        normal_b: point("normal_b")?,
        support_radius,
        max_iter,
    })
}

/// `{"certified": true, "steps": n, "radii": [..]}` or
/// `{"certified": false, "reason": "..."}`.
pub fn certificate_to_json(c: &Certificate) -> Value {
    match c {
        Certificate::Certified { steps, radii } => json!({
            "certified": true,
            "steps": steps,
            "radii": radii,
        }),
        Certificate::NoCertificate { reason } => json!({
            "certified": false,
            "reason": reason,
        }),
    }
}

// ---------------------------------------------------------------------------
// Cone configurations
// ---------------------------------------------------------------------------

/// `{"cones": [{"id": "..", "vertex": [..]}, ...], "intersections":
///   [{"pair": ["a","b"], "kind": "vertex_of" (+ "cone": "a") |
///     "transversal_curve" | "empty"}, ...]}`.
pub fn cone_config_from_json(v: &Value, path: &str) -> Result<ConeConfig, Error> {
    let o = as_object(v, path)?;
    let (cv, cp) = field(o, path, "cones")?;
    let carr = as_array(cv, &cp)?;
    let mut cones = Vec::with_capacity(carr.len());
    for (i, c) in carr.iter().enumerate() {
        let cpath = format!("{cp}[{i}]");
        let co = as_object(c, &cpath)?;
        let (iv, ip) = field(co, &cpath, "id")?;
        let id = as_str(iv, &ip)?.to_string();
        if id.is_empty() {
            return Err(Error::malformed(ip, "cone id must be nonempty"));
        }
        let (vv, vp) = field(co, &cpath, "vertex")?;
        let vertex = vec3_of(vv, &vp, 3)?;
        cones.push(ConeSpec { id, vertex });
    }
    let mut cfg = ConeConfig {
        cones,
        intersections: Default::default(),
    };
    let (xv, xp) = field(o, path, "intersections")?;
    let xarr = as_array(xv, &xp)?;
    for (i, x) in xarr.iter().enumerate() {
        let xpath = format!("{xp}[{i}]");
        let xo = as_object(x, &xpath)?;
        let (pv, pp) = field(xo, &xpath, "pair")?;
        let parr = as_array(pv, &pp)?;
        if parr.len() != 2 {
            return Err(Error::malformed(pp, "pair must list exactly two cone ids"));
        }
        let a = as_str(&parr[0], &format!("{pp}[0]"))?;
        let b = as_str(&parr[1], &format!("{pp}[1]"))?;
        if a == b {
            return Err(Error::malformed(pp, "pair must name two distinct cones"));
        }
        let (kv, kp) = field(xo, &xpath, "kind")?;
        let label = match as_str(kv, &kp)? {
            "vertex_of" => {
                let (cv, cvp) = field(xo, &xpath, "cone")?;
                PairIntersection::VertexOf(as_str(cv, &cvp)?.to_string())
            }
            "transversal_curve" => PairIntersection::TransversalCurve,
            "empty" => PairIntersection::Empty,
            other => {
                return Err(Error::malformed(
                    kp,
                    format!("unknown intersection kind {other:?} (expected vertex_of, transversal_curve, or empty)"),
                ))
            }
        };
        let key = ConeConfig::pair_key(a, b);
        if cfg.intersections.contains_key(&key) {
            return Err(Error::malformed(
                xpath,
                format!("duplicate intersection entry for pair ({a}, {b})"),
            ));
        }
        cfg.intersections.insert(key, label);
    }
    Ok(cfg)
}

/// `{"valid": true, "case": n, "description": ".."}` or
/// `{"valid": false, "rule": ".."}`.
pub fn config_verdict_to_json(v: &ConfigVerdict) -> Value {
    match v {
        ConfigVerdict::Valid { case, description } => json!({
            "valid": true,
            "case": case,
            "description": description,
        }),
        ConfigVerdict::Invalid { rule } => json!({
            "valid": false,
            "rule": rule,
        }),
    }
}

// ---------------------------------------------------------------------------
// Batch-job inputs and report summaries
// ---------------------------------------------------------------------------

/// Centers for a mean scan: an explicit list, or points sampled from the
/// zero set of a harmonic profile (scaled random directions on which the
/// profile changes sign, found by bisection).
fn centers_from_json(v: &Value, path: &str, dim: usize) -> Result<Vec<Vec<f64>>, Error> {
    let o = as_object(v, path)?;
    let (kv, kp) = field(o, path, "kind")?;
    match as_str(kv, &kp)? {
        "list" => {
            let (pv, pp) = field(o, path, "points")?;
            let arr = as_array(pv, &pp)?;
            arr.iter()
                .enumerate()
                .map(|(i, p)| floats(p, &format!("{pp}[{i}]"), dim))
                .collect()
        }
        "zero_sample" => {
            let (hv, hp) = field(o, path, "h")?;
            let h = poly_from_json(hv, &hp)?;
            if h.dim() != dim {
                return Err(Error::malformed(hp, format!("profile must have dimension {dim}")));
            }
            let (cv, cp) = field(o, path, "count")?;
            let count = as_usize(cv, &cp)?;
            let (rv, rp) = field(o, path, "max_norm")?;
            let max_norm = as_f64(rv, &rp)?;
            let seed = match opt_field(o, path, "seed") {
                Some((sv, sp)) => as_usize(sv, &sp)? as u64,
                None => 0,
            };
            crate::generators::sample_zero_directions(&h, count, max_norm, seed)
                .map_err(|e| Error::malformed(path, e.to_string()))
        }
        other => Err(Error::malformed(
            kp,
            format!("unknown centers kind {other:?} (expected list or zero_sample)"),
        )),
    }
}

/// Radii (or any float grid): `{"kind": "list", "values": [..]}` or
/// `{"kind": "linspace", "lo": a, "hi": b, "count": n, "include_lo":
/// bool?}`; with `include_lo` false the grid is the right-closed partition
/// `a + (b-a) k/n`, `k = 1..n`.
fn float_grid_from_json(v: &Value, path: &str) -> Result<Vec<f64>, Error> {
    let o = as_object(v, path)?;
    let (kv, kp) = field(o, path, "kind")?;
    match as_str(kv, &kp)? {
        "list" => {
            let (lv, lp) = field(o, path, "values")?;
            float_list(lv, &lp)
        }
        "linspace" => {
            let (lv, lp) = field(o, path, "lo")?;
            let lo = as_f64(lv, &lp)?;
            let (hv, hp) = field(o, path, "hi")?;
            let hi = as_f64(hv, &hp)?;
            let (cv, cp) = field(o, path, "count")?;
            let count = as_usize(cv, &cp)?;
            if count == 0 {
                return Err(Error::malformed(cp, "count must be positive"));
            }
            if !(hi > lo) {
                return Err(Error::malformed(hp, "hi must exceed lo"));
            }
            let include_lo = match opt_field(o, path, "include_lo") {
                Some((bv, bp)) => as_bool(bv, &bp)?,
                None => true,
            };
            let grid = if include_lo {
                if count == 1 {
                    vec![lo]
                } else {
                    (0..count)
                        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
                        .collect()
                }
            } else {
                (1..=count)
                    .map(|k| lo + (hi - lo) * k as f64 / count as f64)
                    .collect()
            };
            Ok(grid)
        }
        other => Err(Error::malformed(
            kp,
            format!("unknown grid kind {other:?} (expected list or linspace)"),
        )),
    }
}

/// A batch mean-vanishing scan: the source, the centers, the radii, and the
/// quadrature order.
#[derive(Clone, Debug)]
pub struct MeansJob {
    pub function: CompactFunction,
    pub centers: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    pub quad_order: usize,
}

/// `{"function": {..}, "centers": {..}, "radii": {..}, "quad_order": n?}`.
pub fn means_job_from_json(v: &Value, path: &str) -> Result<MeansJob, Error> {
    let o = as_object(v, path)?;
    let (fv, fp) = field(o, path, "function")?;
    let function = function_from_json(fv, &fp)?;
    let (cv, cp) = field(o, path, "centers")?;
    let centers = centers_from_json(cv, &cp, function.dim())?;
    let (rv, rp) = field(o, path, "radii")?;
    let radii = float_grid_from_json(rv, &rp)?;
    for (i, &t) in radii.iter().enumerate() {
        if !(t > 0.0) {
            return Err(Error::malformed(
                format!("{rp}[{i}]"),
                "radii must be positive",
            ));
        }
    }
    let quad_order = match opt_field(o, path, "quad_order") {
        Some((qv, qp)) => {
            let q = as_usize(qv, &qp)?;
            if q == 0 {
                return Err(Error::malformed(qp, "quadrature order must be positive"));
            }
            q
        }
        None => 64,
    };
    Ok(MeansJob {
        function,
        centers,
        radii,
        quad_order,
    })
}

/// Summary of a batch scan, with the maximum normalized by an estimated
/// sup-norm when one is supplied.
pub fn mean_report_to_json(r: &MeanReport, sup_estimate: Option<f64>) -> Value {
    let mut o = Map::new();
    o.insert("count".into(), json!(r.count));
    o.insert("max_abs".into(), json!(r.max_abs));
    o.insert(
        "argmax_center".into(),
        r.argmax_center.as_ref().map_or(Value::Null, |c| json!(c)),
    );
    o.insert(
        "argmax_radius".into(),
        r.argmax_radius.map_or(Value::Null, |t| json!(t)),
    );
    if let Some(sup) = sup_estimate {
        o.insert("sup_estimate".into(), json!(sup));
        if sup > 0.0 {
            o.insert("max_abs_relative".into(), json!(r.max_abs / sup));
        }
    }
    Value::Object(o)
}

/// A moment-family job: the measure, the truncation depth, and the sampled
/// common-zero grid.
#[derive(Clone, Debug)]
pub struct MomentsJob {
    pub measure: DiscreteMeasure,
    pub kmax: usize,
    pub grid: GridSpec,
    pub tol: f64,
}

/// `{"measure": {..}, "kmax": n?, "grid": {"lo": a, "hi": b, "n": m}?,
///   "tol": t?}`.
pub fn moments_job_from_json(v: &Value, path: &str) -> Result<MomentsJob, Error> {
    let o = as_object(v, path)?;
    let (mv, mp) = field(o, path, "measure")?;
    let measure = measure_from_json(mv, &mp)?;
    let kmax = match opt_field(o, path, "kmax") {
        Some((kv, kp)) => as_usize(kv, &kp)?,
        None => DEFAULT_KMAX,
    };
    let grid = match opt_field(o, path, "grid") {
        Some((gv, gp)) => {
            let go = as_object(gv, &gp)?;
            let (lv, lp) = field(go, &gp, "lo")?;
            let lo = as_f64(lv, &lp)?;
            let (hv, hp) = field(go, &gp, "hi")?;
            let hi = as_f64(hv, &hp)?;
            let (nv, np) = field(go, &gp, "n")?;
            let n = as_usize(nv, &np)?;
            GridSpec::new(lo, hi, n).map_err(|e| Error::malformed(&gp, e.to_string()))?
        }
        None => GridSpec::new(-2.0, 2.0, 9).expect("default grid"),
    };
    let tol = match opt_field(o, path, "tol") {
        Some((tv, tp)) => {
            let t = as_f64(tv, &tp)?;
            if !(t > 0.0) {
                return Err(Error::malformed(tp, "tolerance must be positive"));
            }
            t
        }
        None => 1e-9,
    };
    Ok(MomentsJob {
        measure,
        kmax,
        grid,
        tol,
    })
}

/// Where a spectral job evaluates the eigenfunction family: an explicit
/// point list, or the sampled common zeros of the measure's moment family.
#[derive(Clone, Debug)]
pub enum SpectralPoints {
    List(Vec<Vec<f64>>),
    CommonZeros { kmax: usize, grid: GridSpec, tol: f64 },
}

/// A spectral-projection job: evaluate `phi_lambda` of a discrete measure
/// on a lambda grid at chosen points.
#[derive(Clone, Debug)]
pub struct SpectralJob {
    pub measure: DiscreteMeasure,
    pub lambdas: Vec<f64>,
    pub points: SpectralPoints,
}

/// `{"measure": {..}, "lambdas": {grid}, "points": {"kind": "list",
///   "points": [..]} | {"kind": "common_zeros", "kmax": n?, "grid": {..}?,
///   "tol": t?}}`.
pub fn spectral_job_from_json(v: &Value, path: &str) -> Result<SpectralJob, Error> {
    let o = as_object(v, path)?;
    let (mv, mp) = field(o, path, "measure")?;
    let measure = measure_from_json(mv, &mp)?;
    let (lv, lp) = field(o, path, "lambdas")?;
    let lambdas = float_grid_from_json(lv, &lp)?;
    let (pv, pp) = field(o, path, "points")?;
    let po = as_object(pv, &pp)?;
    let (kv, kp) = field(po, &pp, "kind")?;
    let points = match as_str(kv, &kp)? {
        "list" => {
            let (xv, xp) = field(po, &pp, "points")?;
            let arr = as_array(xv, &xp)?;
            let pts = arr
                .iter()
                .enumerate()
                .map(|(i, p)| floats(p, &format!("{xp}[{i}]"), measure.dim()))
                .collect::<Result<Vec<_>, _>>()?;
            SpectralPoints::List(pts)
        }
        "common_zeros" => {
            let kmax = match opt_field(po, &pp, "kmax") {
                Some((kv, kp)) => as_usize(kv, &kp)?,
                None => DEFAULT_KMAX,
            };
            let grid = match opt_field(po, &pp, "grid") {
                Some((gv, gp)) => {
                    let go = as_object(gv, &gp)?;
                    let (lv, lp) = field(go, &gp, "lo")?;
                    let lo = as_f64(lv, &lp)?;
                    let (hv, hp) = field(go, &gp, "hi")?;
                    let hi = as_f64(hv, &hp)?;
                    let (nv, np) = field(go, &gp, "n")?;
                    let n = as_usize(nv, &np)?;
                    GridSpec::new(lo, hi, n).map_err(|e| Error::malformed(&gp, e.to_string()))?
                }
                None => GridSpec::new(-2.0, 2.0, 9).expect("default grid"),
            };
            let tol = match opt_field(po, &pp, "tol") {
                Some((tv, tp)) => as_f64(tv, &tp)?,
                None => 1e-9,
            };
            SpectralPoints::CommonZeros { kmax, grid, tol }
        }
        other => {
            return Err(Error::malformed(
                kp,
                format!("unknown points kind {other:?} (expected list or common_zeros)"),
            ))
        }
    };
    Ok(SpectralJob {
        measure,
        lambdas,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use crate::ruled::chart::classify_singularity;
    use crate::symmetry::{coxeter_closure, validate_cone_configuration};

    fn sorted_json(v: &Value) -> String {
        serde_json::to_string(v).unwrap()
    }

    #[test]
    fn rationals_round_trip_and_reject_garbage() {
        for s in ["3/4", "-5", "0", "22/7", "-9/131"] {
            let r = rat_from_str(s, "$").unwrap();
            assert_eq!(rat_to_string(&r), s);
        }
        assert_eq!(rat_to_string(&rat_from_str("6/4", "$").unwrap()), "3/2");
        assert_eq!(rat_to_string(&rat_from_str(" 7 / 2 ", "$").unwrap()), "7/2");
        for bad in ["1/0", "abc", "", "1/2/3", "1.5"] {
            let err = rat_from_str(bad, "$.w[0]").unwrap_err();
            assert!(err.to_string().contains("$.w[0]"), "{bad}: {err}");
        }
    }

    #[test]
    fn polynomials_round_trip() {
        let p = Poly::var(2, 0).mul(&Poly::var(2, 0)).sub(&Poly::var(2, 1).mul(&Poly::var(2, 1)));
        let v = poly_to_json(&p);
        let q = poly_from_json(&v, "$").unwrap();
        assert_eq!(p, q);
        // Deterministic serialization.
        assert_eq!(sorted_json(&v), sorted_json(&poly_to_json(&q)));
    }

    #[test]
    fn polynomial_errors_name_the_offending_path() {
        let v = json!({"dim": 2, "terms": [{"exp": [1, 0], "num": "1", "den": "NaN"}]});
        let err = poly_from_json(&v, "$.h").unwrap_err();
        assert!(err.to_string().contains("$.h.terms[0].den"), "{err}");
        let v = json!({"dim": 2, "terms": [{"exp": [1], "num": "1", "den": "1"}]});
        let err = poly_from_json(&v, "$").unwrap_err();
        assert!(err.to_string().contains("terms[0].exp"), "{err}");
        let v = json!({"terms": []});
        let err = poly_from_json(&v, "$").unwrap_err();
        assert!(err.to_string().contains("$.dim"), "{err}");
    }

    #[test]
    fn measures_round_trip() {
        let mu = DiscreteMeasure::new(
            3,
            vec![
                vec![rat_int(1), rat_int(0), rat_int(0)],
                vec![rat_int(-1), rat_int(0), rat_int(0)],
            ],
            vec![rat(1, 2), rat(-1, 2)],
        )
        .unwrap();
        let v = measure_to_json(&mu);
        let nu = measure_from_json(&v, "$").unwrap();
        assert_eq!(nu.dim(), 3);
        assert_eq!(nu.points(), mu.points());
        assert_eq!(nu.weights(), mu.weights());
    }

    #[test]
    fn functions_round_trip_and_evaluate_identically() {
        let h = Poly::var(3, 0).mul(&Poly::var(3, 1));
        let v = json!({
            "kind": "odd_plane",
            "point": [0.0, 0.0, 0.0],
            "normal": [0.0, 0.0, 1.0],
            "profile": {
                "kind": "radial_harmonic",
                "r_in": 1.0,
                "r_out": 2.0,
                "h": poly_to_json(&h),
                "center": [0.0, 0.0, 0.5],
            },
        });
        let f = function_from_json(&v, "$").unwrap();
        let w = function_to_json(&f);
        let g = function_from_json(&w, "$").unwrap();
        let x = [0.3, 1.2, 0.7];
        assert_eq!(f.eval(&x).unwrap(), g.eval(&x).unwrap());
        assert!(f.eval(&x).unwrap() != 0.0);
    }

    #[test]
    fn unknown_source_kinds_are_named() {
        let v = json!({"kind": "mystery"});
        let err = function_from_json(&v, "$.function").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("$.function.kind") && msg.contains("mystery"), "{msg}");
    }

    #[test]
    fn charts_round_trip_and_classify_through_json() {
        // u = (t^2, 0, 0), e = (0, 1, 0): a plane chart.
        let v = json!({
            "order": 6,
            "u": [["0","0","0"], ["0","0","0"], ["1","0","0"]],
            "e": [["0","1","0"]],
        });
        let input = chart_input_from_json(&v, "$").unwrap();
        assert_eq!(input.chart.order(), 7);
        let verdict = classify_singularity(&input.chart, &input.t0, &input.lambda0);
        let vj = verdict_to_json(&verdict);
        assert_eq!(vj["verdict"], "plane");
        assert_eq!(vj["normal"], json!(["0", "0", "1"]));
        // Round trip on the stored coefficients.
        let back = chart_to_json(&input.chart).unwrap();
        let reparsed = chart_input_from_json(&back, "$").unwrap();
        assert_eq!(
            chart_to_json(&reparsed.chart).unwrap(),
            back
        );
    }

    #[test]
    fn exact_charts_reject_a_stray_order_field() {
        let v = json!({
            "exact": true,
            "order": 4,
            "u": [["0","0","0"], ["0","0","0"], ["1","0","0"]],
            "e": [["0","1","0"]],
        });
        let err = chart_input_from_json(&v, "$").unwrap_err();
        assert!(err.to_string().contains("$.order"), "{err}");
    }

    #[test]
    fn chart_rows_beyond_the_order_are_rejected() {
        let v = json!({
            "order": 1,
            "u": [["0","0","0"], ["1","0","0"], ["0","1","0"]],
            "e": [["0","1","0"]],
        });
        let err = chart_input_from_json(&v, "$").unwrap_err();
        assert!(err.to_string().contains("$.u"), "{err}");
    }

    #[test]
    fn mirror_systems_close_through_json() {
        let quarter = std::f64::consts::PI / 4.0;
        let v = json!({
            "dim": 2,
            "mirrors": [
                {"point": [0.0, 0.0], "normal": [0.0, 1.0]},
                {"point": [0.0, 0.0], "normal": [(-quarter.sin()), quarter.cos()]},
            ],
        });
        let sys = reflection_system_from_json(&v, "$").unwrap();
        assert_eq!(sys.cap(), DIVERGENCE_CAP);
        let closure = coxeter_closure(&sys);
        let cj = closure_to_json(&closure, 2);
        assert_eq!(cj["status"], "closed");
        assert_eq!(cj["count"], 4);
        assert_eq!(cj["common_point"], json!([0.0, 0.0]));
    }

    #[test]
    fn certificates_serialize_both_outcomes() {
        let v = json!({
            "a": [1.0, 0.0, 0.0],
            "b": [-1.0, 0.0, 0.0],
            "normal_a": [1.0, 0.0, 0.0],
            "normal_b": [-1.0, 0.0, 0.0],
            "support_radius": 10.0,
        });
        let input = certify_input_from_json(&v, "$").unwrap();
        let cert = crate::symmetry::injectivity_certificate(
            input.a,
            input.b,
            input.normal_a,
            input.normal_b,
            input.support_radius,
            input.max_iter,
        );
        let cj = certificate_to_json(&cert);
        assert_eq!(cj["certified"], true);
        assert_eq!(cj["steps"], 25);
        assert_eq!(cj["radii"].as_array().unwrap().len(), 26);
        let no = certificate_to_json(&Certificate::NoCertificate {
            reason: "example".into(),
        });
        assert_eq!(no["certified"], false);
        assert_eq!(no["reason"], "example");
    }

    #[test]
    fn cone_configurations_parse_and_validate() {
        let v = json!({
            "cones": [
                {"id": "a", "vertex": [0.0, 0.0, 0.0]},
                {"id": "b", "vertex": [1.0, 0.0, 0.0]},
            ],
            "intersections": [
                {"pair": ["a", "b"], "kind": "vertex_of", "cone": "a"},
            ],
        });
        let cfg = cone_config_from_json(&v, "$").unwrap();
        let verdict = validate_cone_configuration(&cfg).unwrap();
        let vj = config_verdict_to_json(&verdict);
        assert_eq!(vj["valid"], true);
        assert_eq!(vj["case"], 2);
    }

    #[test]
    fn duplicate_intersection_entries_are_malformed() {
        let v = json!({
            "cones": [
                {"id": "a", "vertex": [0.0, 0.0, 0.0]},
                {"id": "b", "vertex": [1.0, 0.0, 0.0]},
            ],
            "intersections": [
                {"pair": ["a", "b"], "kind": "empty"},
                {"pair": ["b", "a"], "kind": "empty"},
            ],
        });
        let err = cone_config_from_json(&v, "$").unwrap_err();
        assert!(err.to_string().contains("intersections[1]"), "{err}");
    }

    #[test]
    fn means_jobs_build_their_grids() {
        let h = Poly::var(3, 0).mul(&Poly::var(3, 1));
        let v = json!({
            "function": {
                "kind": "radial_harmonic",
                "r_in": 1.0,
                "r_out": 2.0,
                "h": poly_to_json(&h),
            },
            "centers": {"kind": "zero_sample", "h": poly_to_json(&h), "count": 7, "max_norm": 4.0, "seed": 11},
            "radii": {"kind": "linspace", "lo": 0.0, "hi": 8.0, "count": 5, "include_lo": false},
        });
        let job = means_job_from_json(&v, "$").unwrap();
        assert_eq!(job.centers.len(), 7);
        assert_eq!(job.quad_order, 64);
        let expected: Vec<f64> = (1..=5).map(|k| 8.0 * k as f64 / 5.0).collect();
        assert_eq!(job.radii, expected);
        assert!(job.radii[0] > 0.0);
        assert_eq!(*job.radii.last().unwrap(), 8.0);
        for c in &job.centers {
            assert!(c[0] * c[1] < 1e-9);
            assert!(c.iter().map(|x| x * x).sum::<f64>().sqrt() <= 4.0 + 1e-12);
        }
    }

    #[test]
    fn spectral_jobs_parse_both_point_sources() {
        let mu = json!({
            "dim": 3,
            "points": [["1", "2", "2"], ["-1", "-2", "-2"]],
            "weights": ["1", "-1"],
        });
        let v = json!({
            "measure": mu,
            "lambdas": {"kind": "linspace", "lo": 0.0, "hi": 10.0, "count": 101},
            "points": {"kind": "common_zeros", "kmax": 6, "grid": {"lo": -2.0, "hi": 2.0, "n": 5}, "tol": 1e-9},
        });
        let job = spectral_job_from_json(&v, "$").unwrap();
        assert_eq!(job.lambdas.len(), 101);
        assert_eq!(job.lambdas[0], 0.0);
        assert_eq!(job.lambdas[100], 10.0);
        match job.points {
            SpectralPoints::CommonZeros { kmax, .. } => assert_eq!(kmax, 6),
            other => panic!("expected common zeros, got {other:?}"),
        }
    }

    #[test]
    fn reports_serialize_deterministically() {
        let report = MeanReport {
            max_abs: 1.25e-9,
            argmax_center: Some(vec![1.0, 2.0, 3.0]),
            argmax_radius: Some(0.5),
            count: 100,
        };
        let a = sorted_json(&mean_report_to_json(&report, Some(2.0)));
        let b = sorted_json(&mean_report_to_json(&report, Some(2.0)));
        assert_eq!(a, b);
        assert!(a.contains("\"max_abs_relative\":6.25e-10"), "{a}");
        // Keys are alphabetical in the output text.
        let first = a.find("argmax_center").unwrap();
        let second = a.find("count").unwrap();
        let third = a.find("max_abs").unwrap();
        assert!(first < second && second < third);
    }
}
