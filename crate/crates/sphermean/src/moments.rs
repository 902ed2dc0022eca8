//! Moment polynomials of a discrete measure and their harmonic minor.
//!
//! For a finite measure with points `x_i` and weights `w_i`, the k-th moment
//! polynomial is `Q_k(x) = c_k sum_i w_i |x - x_i|^{2k}` with the normalized
//! Bessel coefficients `c_k` (see [`crate::generators::bessel_coeffs`]). The
//! family satisfies `Delta Q_k = -Q_{k-1}` exactly, so the first nonzero
//! member is harmonic; its top homogeneous part is proportional to `|x|^{2k}`
//! times the total mass whenever that mass is nonzero.

use crate::error::Error;
use crate::generators::{bessel_coeffs, DiscreteMeasure};
use crate::poly::Poly;

/// Default truncation depth of the family.
pub const DEFAULT_KMAX: usize = 8;

/// The moment polynomials `Q_0 ..= Q_kmax` of one measure.
#[derive(Clone, Debug)]
pub struct MomentFamily {
    dim: usize,
    polys: Vec<Poly>,
}

impl MomentFamily {
    pub fn new(mu: &DiscreteMeasure, kmax: usize) -> Result<Self, Error> {
        let polys = (0..=kmax)
            .map(|k| moment_poly(mu, k))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MomentFamily {
            dim: mu.dim(),
            polys,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kmax(&self) -> usize {
        self.polys.len() - 1
    }

    pub fn poly(&self, k: usize) -> &Poly {
        &self.polys[k]
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }
}

/// The k-th moment polynomial, expanded exactly.
pub fn moment_poly(mu: &DiscreteMeasure, k: usize) -> Result<Poly, Error> {
    let dim = mu.dim();
    let ck = bessel_coeffs(dim, k)?.pop().unwrap();
    let mut acc = Poly::zero(dim);
    for (point, weight) in mu.points().iter().zip(mu.weights()) {
        // |x - p|^2 as an exact polynomial.
        let mut sq = Poly::zero(dim);
        for (j, pj) in point.iter().enumerate() {
            let term = Poly::var(dim, j).sub(&Poly::constant(dim, pj.clone()));
            sq = sq.add(&term.mul(&term));
        }
        acc = acc.add(&sq.pow(k as u32).scale(weight));
    }
    Ok(acc.scale(&ck))
}

/// Verifies `Delta Q_k + Q_{k-1} = 0` exactly for `k = 1 ..= kmax`.
///
/// The check pits the expansion path (binomial powers of `|x - x_i|^2`)
/// against the differentiation path, so it exercises both.
pub fn check_recursion(mu: &DiscreteMeasure, kmax: usize) -> Result<bool, Error> {
    let family = MomentFamily::new(mu, kmax)?;
    Ok(family_satisfies_recursion(&family))
}

/// Recursion check on an already-built family.
pub fn family_satisfies_recursion(family: &MomentFamily) -> bool {
    for k in 1..=family.kmax() {
        if !family.poly(k).laplacian().add(family.poly(k - 1)).is_zero() {
            return false;
        }
    }
    true
}

/// The harmonic minor of the family: the minimal `k0 <= kmax` with
/// `Q_{k0}` nonzero, together with that polynomial. `None` when every
/// member vanishes through `kmax`.
///
/// By the recursion the returned polynomial is harmonic; this is asserted.
pub fn harmonic_minor(mu: &DiscreteMeasure, kmax: usize) -> Result<Option<(usize, Poly)>, Error> {
    let family = MomentFamily::new(mu, kmax)?;
    for (k, q) in family.polys().iter().enumerate() {
        if !q.is_zero() {
            debug_assert!(q.is_harmonic());
            return Ok(Some((k, q.clone())));
        }
    }
    Ok(None)
}

/// Axis-aligned sampling grid: `n` equispaced values from `lo` to `hi`
/// (inclusive) along every coordinate axis.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self, Error> {
        if !(lo < hi) || n < 2 {
            return Err(Error::invalid("grid needs lo < hi and at least two samples"));
        }
        Ok(GridSpec { lo, hi, n })
    }

    fn coord(&self, i: usize) -> f64 {
        self.lo + (self.hi - self.lo) * (i as f64) / ((self.n - 1) as f64)
    }
}

/// Grid points where every `Q_k` is small in the scale-aware sense
/// `|Q_k(x)| <= tol * (1 + |x|)^{2k}`, a sampled stand-in for the common
/// zero set of the family.
pub fn common_zero_sample(
    family: &MomentFamily,
    grid: &GridSpec,
    tol: f64,
) -> Result<Vec<Vec<f64>>, Error> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let dim = family.dim();
    let mut out = Vec::new();
    let mut idx = vec![0usize; dim];
    loop {
        let x: Vec<f64> = idx.iter().map(|&i| grid.coord(i)).collect();
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let mut all_small = true;
        for (k, q) in family.polys().iter().enumerate() {
            let bound = tol * (1.0 + r).powi(2 * k as i32);
            if q.evaluate(&x)?.abs() > bound {
                all_small = false;
                break;
            }
        }
        if all_small {
            out.push(x);
        }
        // Odometer increment over the dim-dimensional index.
        let mut pos = 0;
        loop {
            if pos == dim {
                return Ok(out);
            }
            idx[pos] += 1;
            if idx[pos] < grid.n {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::spectral_projection_discrete;
    use crate::poly::{rat, rat_int, Rat};
    use num::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dirac_origin(dim: usize) -> DiscreteMeasure {
        DiscreteMeasure::new(dim, vec![vec![rat_int(0); dim]], vec![rat_int(1)]).unwrap()
    }

    fn dipole(p: [i64; 3]) -> DiscreteMeasure {
        let plus: Vec<Rat> = p.iter().map(|&c| rat_int(c)).collect();
        let minus: Vec<Rat> = p.iter().map(|&c| rat_int(-c)).collect();
        DiscreteMeasure::new(3, vec![plus, minus], vec![rat_int(1), rat_int(-1)]).unwrap()
    }

    fn quadrupole_2d() -> DiscreteMeasure {
        DiscreteMeasure::new(
            2,
            vec![
                vec![rat_int(1), rat_int(0)],
                vec![rat_int(-1), rat_int(0)],
                vec![rat_int(0), rat_int(1)],
                vec![rat_int(0), rat_int(-1)],
            ],
            vec![rat_int(1), rat_int(1), rat_int(-1), rat_int(-1)],
        )
        .unwrap()
    }

    #[test]
    fn dirac_moment_is_scaled_radius_power() {
        // Q_1 for the origin Dirac in dimension 3 is -|x|^2 / 6.
        let q1 = moment_poly(&dirac_origin(3), 1).unwrap();
        let mut r2 = Poly::zero(3);
        for i in 0..3 {
            r2 = r2.add(&Poly::var(3, i).pow(2));
        }
        assert_eq!(q1, r2.scale(&rat(-1, 6)));
    }

    #[test]
    fn dipole_minor_is_linear() {
        let mu = dipole([1, 2, -1]);
        let q0 = moment_poly(&mu, 0).unwrap();
        assert!(q0.is_zero());
        let (k0, h) = harmonic_minor(&mu, 8).unwrap().unwrap();
        assert_eq!(k0, 1);
        // Q_1 = (2/3) <x, p>.
        let expect = Poly::var(3, 0)
            .scale(&rat_int(1))
            .add(&Poly::var(3, 1).scale(&rat_int(2)))
            .add(&Poly::var(3, 2).scale(&rat_int(-1)))
            .scale(&rat(2, 3));
        assert_eq!(h, expect);
        assert!(h.is_harmonic());
    }

    #[test]
    fn quadrupole_minor_is_quadratic() {
        let mu = quadrupole_2d();
        let (k0, h) = harmonic_minor(&mu, 8).unwrap().unwrap();
        assert_eq!(k0, 2);
        // 8 c_2 (x1^2 - x2^2) with c_2 = 1/64 in dimension 2.
        let expect = Poly::var(2, 0)
            .pow(2)
            .sub(&Poly::var(2, 1).pow(2))
            .scale(&rat(1, 8));
        assert_eq!(h, expect);
        assert!(h.is_harmonic());
    }

    #[test]
    fn dirac_minor_is_total_mass() {
        let (k0, h) = harmonic_minor(&dirac_origin(2), 4).unwrap().unwrap();
        assert_eq!(k0, 0);
        assert_eq!(h, Poly::one(2));
    }

    fn random_measure(rng: &mut ChaCha8Rng, dim: usize, npts: usize) -> DiscreteMeasure {
        loop {
            let points: Vec<Vec<Rat>> = (0..npts)
                .map(|_| {
                    (0..dim)
                        .map(|_| rat(rng.gen_range(-8i64..=8), rng.gen_range(1i64..=4)))
                        .collect()
                })
                .collect();
            let weights: Vec<Rat> = (0..npts)
                .map(|_| rat(rng.gen_range(-5i64..=5), 1))
                .collect();
            if weights.iter().all(|w| w.is_zero()) {
                continue;
            }
            match DiscreteMeasure::new(dim, points, weights) {
                Ok(mu) => return mu,
                Err(_) => continue, // coincident points; redraw
            }
        }
    }

    #[test]
    fn recursion_holds_for_random_measures() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..25 {
            let dim = if rng.gen::<bool>() { 2 } else { 3 };
            let npts = rng.gen_range(1..=5);
            let mu = random_measure(&mut rng, dim, npts);
            assert!(check_recursion(&mu, 6).unwrap());
        }
    }

    #[test]
    fn perturbed_family_fails_recursion() {
        let mu = dirac_origin(3);
        let mut family = MomentFamily::new(&mu, 3).unwrap();
        family.polys[2] = family.polys[2].add(&Poly::var(3, 0).pow(2));
        assert!(!family_satisfies_recursion(&family));
    }

    #[test]
    fn top_part_proportional_to_even_radius_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let mu = random_measure(&mut rng, 3, 3);
            let total: Rat = mu.weights().iter().fold(Rat::zero(), |a, w| a + w);
            if total.is_zero() {
                continue;
            }
            let k = 3usize;
            let q = moment_poly(&mu, k).unwrap();
            let parts = q.homogeneous_parts();
            let (top_deg, top) = parts.last().unwrap();
            assert_eq!(*top_deg, 2 * k);
            let ck = bessel_coeffs(3, k).unwrap().pop().unwrap();
            let mut r2 = Poly::zero(3);
            for i in 0..3 {
                r2 = r2.add(&Poly::var(3, i).pow(2));
            }
            assert_eq!(*top, r2.pow(k as u32).scale(&(ck * &total)));
        }
    }

    #[test]
    fn common_zeros_of_dipole_lie_on_mirror_plane() {
        let mu = dipole([1, 0, 0]);
        let family = MomentFamily::new(&mu, 6).unwrap();
        let grid = GridSpec::new(-2.0, 2.0, 9).unwrap();
        let zeros = common_zero_sample(&family, &grid, 1e-9).unwrap();
        // The grid contains 81 points with x1 = 0; all of them qualify and
        // nothing else does.
        assert_eq!(zeros.len(), 81);
        for z in &zeros {
            assert_eq!(z[0], 0.0);
        }
    }

    #[test]
    fn common_zeros_match_spectral_projections() {
        let mu = dipole([1, 0, 0]);
        let family = MomentFamily::new(&mu, 8).unwrap();
        let grid = GridSpec::new(-2.0, 2.0, 5).unwrap();
        let zeros = common_zero_sample(&family, &grid, 1e-9).unwrap();
        assert!(!zeros.is_empty());
        for z in &zeros {
            let mut lambda = 0.0f64;
            while lambda <= 10.0 {
                let v = spectral_projection_discrete(&mu, lambda, z).unwrap();
                assert!(v.abs() <= 1e-8, "lambda={} v={:e}", lambda, v);
                lambda += 0.1;
            }
        }
    }

    #[test]
    fn quadrupole_common_zeros_on_diagonals() {
        let mu = quadrupole_2d();
        let family = MomentFamily::new(&mu, 8).unwrap();
        let grid = GridSpec::new(-1.5, 1.5, 7).unwrap();
        let zeros = common_zero_sample(&family, &grid, 1e-9).unwrap();
        assert!(!zeros.is_empty());
        for z in &zeros {
            assert!((z[0].abs() - z[1].abs()).abs() < 1e-12, "{:?}", z);
        }
        // Spectral projections also vanish along the sampled diagonal.
        for z in &zeros {
            for lambda in [0.5f64, 3.7, 9.9] {
                let v = spectral_projection_discrete(&mu, lambda, z).unwrap();
                assert!(v.abs() <= 1e-8, "{:?} lambda={} v={:e}", z, lambda, v);
            }
        }
    }
}
