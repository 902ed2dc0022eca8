//! Generators of compactly supported test functions and the eigenfunction
//! kernels attached to discrete measures.
//!
//! The two families used throughout the verification suites are
//! shell-supported products `alpha(|x|) h(x/|x|)` with `h` a solid harmonic,
//! and odd reflections `g - g o sigma` about a hyperplane. Both have
//! identically vanishing spherical means over the natural center sets, which
//! is what the batch verifiers check numerically.

use num::complex::Complex64;
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::poly::{rat_int, rat_to_f64, Poly, Rat};
use crate::quad::QuadratureRule;
use crate::vec3::{self, Vec3};

/// Smooth bump profile on the radial interval `(r_in, r_out)`:
/// `exp(-1 / (1 - u^2))` with `u` the affine map of `r` onto `(-1, 1)`,
/// zero outside. The midpoint value is `exp(-1)`.
#[derive(Clone, Copy, Debug)]
pub struct BumpSpec {
    r_in: f64,
    r_out: f64,
}

impl BumpSpec {
    pub fn new(r_in: f64, r_out: f64) -> Result<Self, Error> {
        if !(r_in.is_finite() && r_out.is_finite()) || r_in < 0.0 || r_out <= r_in {
            return Err(Error::invalid(format!(
                "bump radii must satisfy 0 <= r_in < r_out, got ({}, {})",
                r_in, r_out
            )));
        }
        Ok(BumpSpec { r_in, r_out })
    }

    pub fn r_in(&self) -> f64 {
        self.r_in
    }

    pub fn r_out(&self) -> f64 {
        self.r_out
    }

    pub fn value(&self, r: f64) -> f64 {
        if r <= self.r_in || r >= self.r_out {
            return 0.0;
        }
        let u = (2.0 * r - self.r_in - self.r_out) / (self.r_out - self.r_in);
        (-1.0 / (1.0 - u * u)).exp()
    }
}

/// A finite signed measure: distinct rational points with rational weights.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    dim: usize,
    points: Vec<Vec<Rat>>,
    weights: Vec<Rat>,
    points_f64: Vec<Vec3>,
}

impl DiscreteMeasure {
    pub fn new(dim: usize, points: Vec<Vec<Rat>>, weights: Vec<Rat>) -> Result<Self, Error> {
        if dim < 1 || dim > 3 {
            return Err(Error::invalid("measures live in dimension 1..=3"));
        }
        if points.is_empty() {
            return Err(Error::invalid("measure needs at least one point"));
        }
        if points.len() != weights.len() {
            return Err(Error::invalid(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::invalid("measure point of wrong dimension"));
            }
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i] == points[j] {
                    return Err(Error::invalid(format!(
                        "measure points {} and {} coincide",
                        i, j
                    )));
                }
            }
        }
        let points_f64 = points
            .iter()
            .map(|p| {
                let mut v = [0.0; 3];
                for (k, c) in p.iter().enumerate() {
                    v[k] = rat_to_f64(c);
                }
                v
            })
            .collect();
        Ok(DiscreteMeasure {
            dim,
            points,
            weights,
            points_f64,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[Vec<Rat>] {
        &self.points
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn points_f64(&self) -> &[Vec3] {
        &self.points_f64
    }
}

/// A compactly supported function (or, in the `Discrete` case, a finite
/// measure that is deliberately *not* pointwise evaluable).
#[derive(Clone, Debug)]
pub enum CompactFunction {
    /// `x -> alpha(|x - center|) * h((x - center)/|x - center|)` with `h` a
    /// solid harmonic; supported on the shell `r_in <= |x - center| <= r_out`.
    RadialHarmonic {
        dim: usize,
        center: Vec3,
        bump: BumpSpec,
        h: Poly,
        degree: usize,
        compiled: Vec<([u32; 3], f64)>,
    },
    /// `x -> g(x) - g(sigma x)` for the reflection `sigma` about the
    /// hyperplane through `point` with unit `normal`.
    OddPlane {
        point: Vec3,
        normal: Vec3,
        profile: Box<CompactFunction>,
    },
    /// Multilinear interpolation of samples on a regular grid, zero outside.
    GridSample {
        dim: usize,
        origin: Vec3,
        spacing: f64,
        shape: [usize; 3],
        values: Vec<f64>,
    },
    Discrete(DiscreteMeasure),
}

fn compile_poly(h: &Poly) -> Vec<([u32; 3], f64)> {
    h.terms()
        .map(|(e, c)| {
            let mut exp = [0u32; 3];
            exp[..e.len()].copy_from_slice(e);
            (exp, rat_to_f64(c))
        })
        .collect()
}

fn eval_compiled(terms: &[([u32; 3], f64)], x: Vec3) -> f64 {
    let mut acc = 0.0;
    for (e, c) in terms {
        let mut m = *c;
        for i in 0..3 {
            for _ in 0..e[i] {
                m *= x[i];
            }
        }
        acc += m;
    }
    acc
}

/// Shell-supported solid-harmonic generator centered at the origin.
/// `h` must be homogeneous and harmonic.
pub fn radial_harmonic(bump: BumpSpec, h: Poly) -> Result<CompactFunction, Error> {
    radial_harmonic_at(bump, h, [0.0; 3])
}

/// Shell-supported solid-harmonic generator about an arbitrary center.
pub fn radial_harmonic_at(
    bump: BumpSpec,
    h: Poly,
    center: Vec3,
) -> Result<CompactFunction, Error> {
    let dim = h.dim();
    if dim < 2 || dim > 3 {
        return Err(Error::invalid("radial harmonic generators need dimension 2 or 3"));
    }
    let Some(degree) = h.homogeneous_degree() else {
        return Err(Error::invalid("profile polynomial must be homogeneous"));
    };
    if h.is_zero() {
        return Err(Error::invalid("profile polynomial must be nonzero"));
    }
    if !h.is_harmonic() {
        return Err(Error::invalid("profile polynomial must be harmonic"));
    }
    let compiled = compile_poly(&h);
    Ok(CompactFunction::RadialHarmonic {
        dim,
        center,
        bump,
        h,
        degree,
        compiled,
    })
}

/// The odd reflection `x -> g(x) - g(sigma x)` about the hyperplane through
/// `point` with unit normal `normal`. The result vanishes identically on the
/// hyperplane and is antisymmetric across it.
pub fn odd_reflection(
    point: &[f64],
    normal: &[f64],
    profile: CompactFunction,
) -> Result<CompactFunction, Error> {
    let dim = profile.dim();
    if point.len() != dim || normal.len() != dim {
        return Err(Error::invalid("plane point/normal dimension mismatch"));
    }
    if matches!(profile, CompactFunction::Discrete(_)) {
        return Err(Error::NotEvaluable(
            "odd reflection requires a pointwise-evaluable profile".into(),
        ));
    }
    let n = vec3::pad(normal);
    let nn = vec3::norm(n);
    if (nn - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "plane normal must be unit within 1e-12, |n| = {}",
            nn
        )));
    }
    Ok(CompactFunction::OddPlane {
        point: vec3::pad(point),
        normal: vec3::scale(1.0 / nn, n),
        profile: Box::new(profile),
    })
}

/// Grid-sampled function; `values` is indexed as `ix + shape_x * (iy + shape_y * iz)`.
pub fn grid_sample(
    dim: usize,
    origin: &[f64],
    spacing: f64,
    shape: &[usize],
    values: Vec<f64>,
) -> Result<CompactFunction, Error> {
    if dim < 2 || dim > 3 {
        return Err(Error::invalid("grid samples need dimension 2 or 3"));
    }
    if shape.len() != dim || origin.len() != dim {
        return Err(Error::invalid("grid origin/shape dimension mismatch"));
    }
    if spacing <= 0.0 || !spacing.is_finite() {
        return Err(Error::invalid("grid spacing must be positive"));
    }
    let mut sh = [1usize; 3];
    sh[..dim].copy_from_slice(shape);
    if sh.iter().any(|&s| s < 2 && s != 1) || sh[..dim].iter().any(|&s| s < 2) {
        return Err(Error::invalid("grid needs at least two samples per axis"));
    }
    if values.len() != sh[0] * sh[1] * sh[2] {
        return Err(Error::invalid(format!(
            "grid expects {} values, got {}",
            sh[0] * sh[1] * sh[2],
            values.len()
        )));
    }
    Ok(CompactFunction::GridSample {
        dim,
        origin: vec3::pad(origin),
        spacing,
        shape: sh,
        values,
    })
}

impl CompactFunction {
    pub fn dim(&self) -> usize {
        match self {
            CompactFunction::RadialHarmonic { dim, .. } => *dim,
            CompactFunction::OddPlane { profile, .. } => profile.dim(),
            CompactFunction::GridSample { dim, .. } => *dim,
            CompactFunction::Discrete(mu) => mu.dim(),
        }
    }

    /// Pointwise evaluation; measures return [`Error::NotEvaluable`].
    pub fn eval(&self, x: &[f64]) -> Result<f64, Error> {
        if x.len() != self.dim() {
            return Err(Error::invalid("evaluation point dimension mismatch"));
        }
        self.eval_padded(vec3::pad(x))
    }

    /// Evaluation on padded coordinates. Hot path for quadrature loops.
    pub(crate) fn eval_padded(&self, x: Vec3) -> Result<f64, Error> {
        match self {
            CompactFunction::RadialHarmonic {
                center,
                bump,
                degree,
                compiled,
                ..
            } => {
                let rel = vec3::sub(x, *center);
                let r = vec3::norm(rel);
                if r <= bump.r_in || r >= bump.r_out || r == 0.0 {
                    return Ok(0.0);
                }
                let a = bump.value(r);
                if *degree == 0 {
                    return Ok(a * compiled[0].1);
                }
                let scale = r.powi(*degree as i32);
                Ok(a * eval_compiled(compiled, rel) / scale)
            }
            CompactFunction::OddPlane {
                point,
                normal,
                profile,
            } => {
                let d = vec3::dot(vec3::sub(x, *point), *normal);
                let mirrored = vec3::sub(x, vec3::scale(2.0 * d, *normal));
                Ok(profile.eval_padded(x)? - profile.eval_padded(mirrored)?)
            }
            CompactFunction::GridSample {
                dim,
                origin,
                spacing,
                shape,
                values,
            } => {
                let mut frac = [0.0f64; 3];
                let mut idx = [0usize; 3];
                for k in 0..3 {
                    if k >= *dim {
                        continue;
                    }
                    let t = (x[k] - origin[k]) / spacing;
                    if t < 0.0 || t > (shape[k] - 1) as f64 {
                        return Ok(0.0);
                    }
                    let i = (t.floor() as usize).min(shape[k] - 2);
                    idx[k] = i;
                    frac[k] = t - i as f64;
                }
                let at = |dx: usize, dy: usize, dz: usize| -> f64 {
                    let ix = idx[0] + dx;
                    let iy = idx[1] + dy;
                    let iz = if *dim == 3 { idx[2] + dz } else { 0 };
                    values[ix + shape[0] * (iy + shape[1] * iz)]
                };
                let (fx, fy, fz) = (frac[0], frac[1], frac[2]);
                let c00 = at(0, 0, 0) * (1.0 - fx) + at(1, 0, 0) * fx;
                let c10 = at(0, 1, 0) * (1.0 - fx) + at(1, 1, 0) * fx;
                let c0 = c00 * (1.0 - fy) + c10 * fy;
                if *dim == 2 {
                    return Ok(c0);
                }
                let c01 = at(0, 0, 1) * (1.0 - fx) + at(1, 0, 1) * fx;
                let c11 = at(0, 1, 1) * (1.0 - fx) + at(1, 1, 1) * fx;
                let c1 = c01 * (1.0 - fy) + c11 * fy;
                Ok(c0 * (1.0 - fz) + c1 * fz)
            }
            CompactFunction::Discrete(_) => Err(Error::NotEvaluable(
                "discrete measures have no pointwise values; use the spectral kernels".into(),
            )),
        }
    }

    /// Deterministic sampled estimate of `sup |f|` over the support.
    pub fn sup_abs_estimate(&self, samples: usize) -> Result<f64, Error> {
        const SUP_SAMPLING_SEED: u64 = 0x9e37_79b9_7f4a_7c15;
        let (center, radius) = self.support_ball()?;
        let dim = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(SUP_SAMPLING_SEED);
        let mut best = 0.0f64;
        for _ in 0..samples {
            let mut x = [0.0f64; 3];
            for k in 0..dim {
                x[k] = center[k] + radius * (rng.gen::<f64>() * 2.0 - 1.0);
            }
            let v = self.eval_padded(x)?.abs();
            if v > best {
                best = v;
            }
        }
        Ok(best)
    }

    /// A ball guaranteed to contain the support.
    fn support_ball(&self) -> Result<(Vec3, f64), Error> {
        match self {
            CompactFunction::RadialHarmonic { center, bump, .. } => {
                Ok((*center, bump.r_out))
            }
            CompactFunction::OddPlane {
                point,
                normal,
                profile,
            } => {
                let (c, r) = profile.support_ball()?;
                let d = vec3::dot(vec3::sub(c, *point), *normal);
                let mirrored = vec3::sub(c, vec3::scale(2.0 * d, *normal));
                let mid = vec3::scale(0.5, vec3::add(c, mirrored));
                Ok((mid, r + d.abs()))
            }
            CompactFunction::GridSample {
                dim,
                origin,
                spacing,
                shape,
                ..
            } => {
                let mut far = *origin;
                for k in 0..*dim {
                    far[k] += spacing * (shape[k] - 1) as f64;
                }
                let mid = vec3::scale(0.5, vec3::add(*origin, far));
                Ok((mid, 0.5 * vec3::norm(vec3::sub(far, *origin))))
            }
            CompactFunction::Discrete(_) => Err(Error::NotEvaluable(
                "support sampling is undefined for measures".into(),
            )),
        }
    }
}

/// Normalized Bessel function `j(z)` of the given ambient dimension:
/// the unique radial profile with `j(0) = 1` satisfying
/// `Delta_x j(|x|) = -j(|x|)`. Dimension 3 is `sin(z)/z`; dimension 2 is
/// the classical `J_0`.
pub fn normalized_bessel(dim: usize, z: f64) -> Result<f64, Error> {
    match dim {
        3 => {
            let az = z.abs();
            if az < 1e-4 {
                let z2 = z * z;
                Ok(1.0 - z2 / 6.0 + z2 * z2 / 120.0)
            } else {
                Ok(z.sin() / z)
            }
        }
        2 => Ok(bessel_j0(z)),
        d => Err(Error::invalid(format!(
            "normalized Bessel kernels exist for dimensions 2 and 3, got {}",
            d
        ))),
    }
}

/// `J_0` via its Taylor series for small arguments and Miller's downward
/// recurrence for large ones; accurate to ~1e-13 across the range used here.
fn bessel_j0(z: f64) -> f64 {
    let az = z.abs();
    if az <= 8.0 {
        let q = -0.25 * z * z;
        let mut term = 1.0;
        let mut acc = 1.0;
        for k in 1..60 {
            term *= q / ((k * k) as f64);
            acc += term;
            if term.abs() < 1e-18 * acc.abs().max(1e-30) {
                break;
            }
        }
        acc
    } else {
        // Downward recurrence J_{k-1} = (2k/z) J_k - J_{k+1}, normalized a
        // posteriori by J_0 + 2 (J_2 + J_4 + ...) = 1.
        let m = {
            let m = (1.3 * az) as usize + 30;
            m + (m & 1)
        };
        let mut jp1 = 0.0f64; // J_{k+1}
        let mut jk = 1e-300f64; // J_k, starting at k = m
        let mut norm = 0.0f64;
        for k in (1..=m).rev() {
            let jm1 = (2.0 * k as f64 / az) * jk - jp1;
            jp1 = jk;
            jk = jm1; // now J_{k-1}
            let order = k - 1;
            if order % 2 == 0 {
                norm += if order == 0 { jk } else { 2.0 * jk };
            }
            if jk.abs() > 1e250 {
                jk *= 1e-250;
                jp1 *= 1e-250;
                norm *= 1e-250;
            }
        }
        jk / norm
    }
}

/// Exact expansion coefficients of the normalized Bessel profile:
/// `c_0 = 1`, `c_k = -c_{k-1} / (2k (2k + dim - 2))`, so that
/// `j(z) = sum c_k z^{2k}`.
pub fn bessel_coeffs(dim: usize, kmax: usize) -> Result<Vec<Rat>, Error> {
    if dim < 2 || dim > 3 {
        return Err(Error::invalid("Bessel coefficients for dimensions 2 and 3"));
    }
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(Rat::one());
    for k in 1..=kmax as i64 {
        let prev: &Rat = out.last().unwrap();
        let denom = rat_int(2 * k * (2 * k + dim as i64 - 2));
        out.push(-prev / denom);
    }
    Ok(out)
}

/// Superposition of plane waves with density `h` on the unit sphere:
/// `phi(x) = sum_i w_i e^{i lambda <x, omega_i>} h(omega_i)`, an
/// eigenfunction of the Laplacian with eigenvalue `-lambda^2` up to
/// quadrature error.
pub fn plane_wave_eigenfunction(
    h: &Poly,
    lambda: f64,
    x: &[f64],
    rule: &QuadratureRule,
) -> Result<Complex64, Error> {
    if h.dim() != rule.dim() || x.len() != rule.dim() {
        return Err(Error::invalid("density/rule/point dimensions must agree"));
    }
    let compiled = compile_poly(h);
    let xp = vec3::pad(x);
    let mut acc = Complex64::zero();
    for (node, w) in rule.iter() {
        let phase = lambda * vec3::dot(xp, *node);
        let density = eval_compiled(&compiled, *node);
        acc += Complex64::new(phase.cos(), phase.sin()) * (w * density);
    }
    Ok(acc)
}

/// The eigenfunction attached to a discrete measure:
/// `phi_lambda(x) = sum_i w_i j(lambda |x - x_i|)`.
pub fn spectral_projection_discrete(
    mu: &DiscreteMeasure,
    lambda: f64,
    x: &[f64],
) -> Result<f64, Error> {
    if x.len() != mu.dim() {
        return Err(Error::invalid("point dimension does not match the measure"));
    }
    let xp = vec3::pad(x);
    let mut acc = 0.0;
    for (p, w) in mu.points_f64().iter().zip(mu.weights()) {
        let r = vec3::norm(vec3::sub(xp, *p));
        acc += rat_to_f64(w) * normalized_bessel(mu.dim(), lambda * r)?;
    }
    Ok(acc)
}

/// The one-parameter eigenfunction family of a discrete measure.
#[derive(Clone, Debug)]
pub struct EigenFamily {
    source: DiscreteMeasure,
}

impl EigenFamily {
    pub fn new(source: DiscreteMeasure) -> Self {
        EigenFamily { source }
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    pub fn source(&self) -> &DiscreteMeasure {
        &self.source
    }

    pub fn eval(&self, lambda: f64, x: &[f64]) -> Result<f64, Error> {
        spectral_projection_discrete(&self.source, lambda, x)
    }
}

/// Samples points of the cone `{r theta : h(theta) = 0, 0 < r <= max_radius}`
/// by bisecting sign changes of `h` along chords of the unit sphere.
/// Deterministic for a fixed seed.
pub fn sample_zero_directions(
    h: &Poly,
    count: usize,
    max_radius: f64,
    seed: u64,
) -> Result<Vec<Vec<f64>>, Error> {
    let dim = h.dim();
    if dim < 2 || dim > 3 {
        return Err(Error::invalid("zero-direction sampling needs dimension 2 or 3"));
    }
    if h.is_zero() {
        return Err(Error::invalid("cannot sample zero directions of the zero polynomial"));
    }
    let compiled = compile_poly(h);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    let sample_dir = |rng: &mut ChaCha8Rng| -> Vec3 {
        loop {
            let mut v = [0.0f64; 3];
            for k in 0..dim {
                v[k] = rng.gen::<f64>() * 2.0 - 1.0;
            }
            let n = vec3::norm(v);
            if n > 1e-3 && n <= 1.0 {
                return vec3::scale(1.0 / n, v);
            }
        }
    };
    while out.len() < count {
        attempts += 1;
        if attempts > 10_000 * count.max(1) {
            return Err(Error::invalid(
                "could not find sign changes of the profile polynomial on the sphere",
            ));
        }
        let a = sample_dir(&mut rng);
        let b = sample_dir(&mut rng);
        let fa = eval_compiled(&compiled, a);
        let fb = eval_compiled(&compiled, b);
        if fa == 0.0 {
            push_point(&mut out, a, dim, max_radius, &mut rng);
            continue;
        }
        if fa * fb >= 0.0 {
            continue;
        }
        // Bisect along the chord; homogeneity makes the sign on the chord
        // agree with the sign on the sphere.
        let (mut lo, mut hi, mut flo) = (0.0f64, 1.0f64, fa);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let p = vec3::add(vec3::scale(1.0 - mid, a), vec3::scale(mid, b));
            let fm = eval_compiled(&compiled, p);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (fm > 0.0) == (flo > 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let p = vec3::add(vec3::scale(1.0 - t, a), vec3::scale(t, b));
        if let Some(dir) = vec3::normalize(p) {
            push_point(&mut out, dir, dim, max_radius, &mut rng);
        }
    }
    Ok(out)
}

fn push_point(
    out: &mut Vec<Vec<f64>>,
    dir: Vec3,
    dim: usize,
    max_radius: f64,
    rng: &mut ChaCha8Rng,
) {
    let r = rng.gen::<f64>() * max_radius;
    out.push(dir[..dim].iter().map(|&c| c * r).collect());
}
