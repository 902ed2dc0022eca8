//! Spherical means of compactly supported functions and batch verification
//! of their vanishing over center/radius families.
//!
//! The mean over the sphere of radius `t` about `x` is taken against the
//! normalized surface measure, so the mean of the constant one is one. Batch
//! scans are embarrassingly parallel over (center, radius) pairs; each mean
//! accumulates its quadrature nodes in a fixed order, so reports are
//! byte-identical for a fixed configuration regardless of thread count.

use std::io::Write;

use once_cell::sync::Lazy;
use rayon::prelude::*;

use crate::error::Error;
use crate::generators::CompactFunction;
use crate::quad::QuadratureRule;
use crate::vec3::{self, Vec3};

/// Upper bound on worker threads, from `SPHERMEAN_THREADS` when set.
static POOL: Lazy<Option<rayon::ThreadPool>> = Lazy::new(|| {
    let n: usize = std::env::var("SPHERMEAN_THREADS").ok()?.parse().ok()?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n.max(1))
        .build()
        .ok()
});

fn run_scoped<T: Send>(job: impl FnOnce() -> T + Send) -> T {
    match POOL.as_ref() {
        Some(pool) => pool.install(job),
        None => job(),
    }
}

/// One evaluated (center, radius, mean) triple of a batch scan.
#[derive(Clone, Debug)]
pub struct MeanRow {
    pub center: Vec<f64>,
    pub radius: f64,
    pub mean: f64,
}

/// Summary of a batch scan: the largest absolute mean and where it occurred.
#[derive(Clone, Debug)]
pub struct MeanReport {
    pub max_abs: f64,
    pub argmax_center: Option<Vec<f64>>,
    pub argmax_radius: Option<f64>,
    pub count: usize,
}

/// Mean of `f` over the sphere (circle in dimension 2) of radius `t`
/// centered at `x`: `sum_i w_i f(x + t theta_i)`.
pub fn spherical_mean(
    f: &CompactFunction,
    x: &[f64],
    t: f64,
    rule: &QuadratureRule,
) -> Result<f64, Error> {
    let dim = f.dim();
    if rule.dim() != dim || x.len() != dim {
        return Err(Error::invalid(
            "function, rule, and center must share one dimension",
        ));
    }
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("radius must be nonnegative, got {}", t)));
    }
    let center = vec3::pad(x);
    mean_padded(f, center, t, rule)
}

fn mean_padded(f: &CompactFunction, center: Vec3, t: f64, rule: &QuadratureRule) -> Result<f64, Error> {
    let mut acc = 0.0;
    for (node, w) in rule.iter() {
        acc += w * f.eval_padded(vec3::add(center, vec3::scale(t, *node)))?;
    }
    Ok(acc)
}

/// Evaluates the mean at every (center, radius) pair, in row-major order
/// (radii fastest). Parallel over pairs; output order is deterministic.
pub fn scan_means(
    f: &CompactFunction,
    centers: &[Vec<f64>],
    radii: &[f64],
    rule: &QuadratureRule,
) -> Result<Vec<MeanRow>, Error> {
    let dim = f.dim();
    if rule.dim() != dim {
        return Err(Error::invalid("rule dimension does not match the function"));
    }
    for c in centers {
        if c.len() != dim {
            return Err(Error::invalid("center of wrong dimension in batch scan"));
        }
    }
    for &t in radii {
        if !(t >= 0.0) {
            return Err(Error::invalid("negative radius in batch scan"));
        }
    }
    let pairs: Vec<(usize, usize)> = (0..centers.len())
        .flat_map(|i| (0..radii.len()).map(move |j| (i, j)))
        .collect();
    let rows: Result<Vec<MeanRow>, Error> = run_scoped(|| {
        pairs
            .par_iter()
            .map(|&(i, j)| {
                let mean = mean_padded(f, vec3::pad(&centers[i]), radii[j], rule)?;
                Ok(MeanRow {
                    center: centers[i].clone(),
                    radius: radii[j],
                    mean,
                })
            })
            .collect()
    });
    rows
}

/// Reduces scan rows to the report. Ties on `|mean|` keep the earliest row,
/// so the reduction is order-deterministic.
pub fn report_from_rows(rows: &[MeanRow]) -> MeanReport {
    let mut report = MeanReport {
        max_abs: 0.0,
        argmax_center: None,
        argmax_radius: None,
        count: rows.len(),
    };
    for row in rows {
        let a = row.mean.abs();
        if a > report.max_abs {
            report.max_abs = a;
            report.argmax_center = Some(row.center.clone());
            report.argmax_radius = Some(row.radius);
        }
    }
    report
}

/// Scans all pairs and reports the worst absolute mean.
pub fn verify_zero_means(
    f: &CompactFunction,
    centers: &[Vec<f64>],
    radii: &[f64],
    rule: &QuadratureRule,
) -> Result<MeanReport, Error> {
    Ok(report_from_rows(&scan_means(f, centers, radii, rule)?))
}

/// Writes scan rows as CSV with header `cx,cy,cz,t,mean` (`cz` omitted in
/// dimension 2). Floats are printed in shortest round-trip form.
pub fn write_means_csv<W: Write>(out: &mut W, dim: usize, rows: &[MeanRow]) -> std::io::Result<()> {
    if dim == 2 {
        writeln!(out, "cx,cy,t,mean")?;
    } else {
        writeln!(out, "cx,cy,cz,t,mean")?;
    }
    for row in rows {
        for c in &row.center {
            write!(out, "{},", c)?;
        }
        writeln!(out, "{},{}", row.radius, row.mean)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{odd_reflection, radial_harmonic, radial_harmonic_at, BumpSpec};
    use crate::poly::Poly;
    use crate::quad::sphere_rule;

    fn bump() -> BumpSpec {
        BumpSpec::new(1.0, 2.0).unwrap()
    }

    #[test]
    fn mean_of_radial_function_at_origin_is_profile() {
        // For f = alpha(|x|), the mean over the sphere of radius t about the
        // origin is alpha(t) exactly (the integrand is constant).
        let f = radial_harmonic(bump(), Poly::one(3)).unwrap();
        let rule = sphere_rule(3, 8).unwrap();
        for t in [0.5, 1.2, 1.5, 1.9, 2.5] {
            let m = spherical_mean(&f, &[0.0; 3], t, &rule).unwrap();
            assert!((m - bump().value(t)).abs() < 1e-15);
        }
    }

    #[test]
    fn harmonic_shell_means_vanish_on_cone_centers() {
        let h = Poly::var(3, 0).mul(&Poly::var(3, 1));
        let f = radial_harmonic(bump(), h).unwrap();
        let rule = sphere_rule(3, 32).unwrap();
        // Centers on the cone {x1 x2 = 0}.
        let centers = vec![
            vec![0.0, 0.7, -0.3],
            vec![0.0, 2.0, 1.0],
            vec![1.4, 0.0, 0.2],
            vec![3.0, 0.0, 0.0],
        ];
        let radii: Vec<f64> = (1..=20).map(|k| k as f64 * 0.3).collect();
        let report = verify_zero_means(&f, &centers, &radii, &rule).unwrap();
        assert_eq!(report.count, centers.len() * radii.len());
        assert!(report.max_abs < 1e-12, "max_abs = {:e}", report.max_abs);
    }

    #[test]
    fn off_cone_center_sees_mass() {
        let h = Poly::var(3, 0).mul(&Poly::var(3, 1));
        let f = radial_harmonic(bump(), h).unwrap();
        let rule = sphere_rule(3, 32).unwrap();
        let radii: Vec<f64> = (1..=30).map(|k| k as f64 * 0.2).collect();
        let report =
            verify_zero_means(&f, &[vec![1.0, 1.0, 1.0]], &radii, &rule).unwrap();
        assert!(report.max_abs > 1e-4, "max_abs = {:e}", report.max_abs);
        assert!(report.argmax_center.is_some());
    }

    #[test]
    fn odd_plane_means_vanish_on_plane_centers() {
        let shifted = radial_harmonic_at(bump(), Poly::one(3), [0.3, -0.2, 0.9]).unwrap();
        let f = odd_reflection(&[0.0; 3], &[0.0, 0.0, 1.0], shifted).unwrap();
        let rule = sphere_rule(3, 24).unwrap();
        let centers = vec![vec![0.0, 0.0, 0.0], vec![1.5, -2.0, 0.0], vec![0.25, 4.0, 0.0]];
        let radii: Vec<f64> = (1..=15).map(|k| k as f64 * 0.25).collect();
        let report = verify_zero_means(&f, &centers, &radii, &rule).unwrap();
        assert!(report.max_abs < 1e-12, "max_abs = {:e}", report.max_abs);
    }

    #[test]
    fn translation_equivariance() {
        let h = Poly::var(3, 0).mul(&Poly::var(3, 1));
        let f0 = radial_harmonic(bump(), h.clone()).unwrap();
        let shift = [0.4, -1.1, 2.0];
        let f1 = radial_harmonic_at(bump(), h, shift).unwrap();
        let rule = sphere_rule(3, 16).unwrap();
        let x = [0.2, 0.3, -0.5];
        let xs: Vec<f64> = (0..3).map(|k| x[k] + shift[k]).collect();
        for t in [0.7, 1.3] {
            let a = spherical_mean(&f0, &x, t, &rule).unwrap();
            let b = spherical_mean(&f1, &xs, t, &rule).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn empty_batch_reports_zero() {
        let f = radial_harmonic(bump(), Poly::one(3)).unwrap();
        let rule = sphere_rule(3, 4).unwrap();
        let report = verify_zero_means(&f, &[], &[1.0], &rule).unwrap();
        assert_eq!(report.count, 0);
        assert_eq!(report.max_abs, 0.0);
        assert!(report.argmax_center.is_none());
    }

    #[test]
    fn measures_are_rejected() {
        use crate::generators::DiscreteMeasure;
        use crate::poly::rat_int;
        let mu = DiscreteMeasure::new(
            3,
            vec![vec![rat_int(0), rat_int(0), rat_int(0)]],
            vec![rat_int(1)],
        )
        .unwrap();
        let f = CompactFunction::Discrete(mu);
        let rule = sphere_rule(3, 4).unwrap();
        assert!(matches!(
            spherical_mean(&f, &[0.0; 3], 1.0, &rule),
            Err(Error::NotEvaluable(_))
        ));
    }

    #[test]
    fn csv_layout() {
        let rows = vec![MeanRow {
            center: vec![1.0, 2.5],
            radius: 0.5,
            mean: 1e-9,
        }];
        let mut buf = Vec::new();
        write_means_csv(&mut buf, 2, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "cx,cy,t,mean\n1,2.5,0.5,0.000000001\n");
    }

    #[test]
    fn degenerate_radius_is_the_point_value() {
        let f = radial_harmonic(bump(), Poly::one(3)).unwrap();
        let rule = sphere_rule(3, 4).unwrap();
        let m = spherical_mean(&f, &[1.5, 0.0, 0.0], 0.0, &rule).unwrap();
        let v = f.eval(&[1.5, 0.0, 0.0]).unwrap();
        assert!((m - v).abs() < 1e-15);
    }
}
