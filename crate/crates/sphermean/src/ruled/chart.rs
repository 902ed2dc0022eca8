//! Ruled-surface charts as truncated rational power series, and the local
//! singular-point pipeline built on them: orthogonalization of the center
//! curve, the singular shift, reduction to the canonical form
//! `s^m v_m + sigma s^m e_0 + D(s, sigma) tau`, evenness descent in `s`,
//! classification of the point, and the fractional-power graph expansion.
//!
//! Every decision of the form "this series vanishes" is made on exact
//! rational coefficients and is certified only *through the truncation
//! order*; verdicts carry that order, and an honest `Inconclusive` is
//! returned when the order cannot support the decision.

use std::array;

use crate::error::Error;
use crate::poly::{rat, rat_int, rat_to_f64, LinearForm, Rat};
use crate::ruled::lines::LineFamily;
use crate::series::{Ring, Series, SigmaPoly, VecSeries, EXACT};
use crate::vec3::Vec3;

/// Truncation order (highest retained t-degree) that exact polynomial
/// charts are cut to before running the canonical-form pipeline.
pub const DEFAULT_TRUNCATION_ORDER: usize = 8;

/// Series in the geometric parameter whose coefficients are polynomials in
/// the formal line slope `sigma`.
pub type SigmaSeries = Series<SigmaPoly>;

fn rv_dot(a: &[Rat; 3], b: &[Rat; 3]) -> Rat {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

fn rv_cross(a: &[Rat; 3], b: &[Rat; 3]) -> [Rat; 3] {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn rv_is_zero(a: &[Rat; 3]) -> bool {
    a.iter().all(|c| c.is_zero())
}

/// A one-parameter family of straight lines `t -> { u(t) + lambda e(t) }`
/// given by rational power series, with exactly unit direction:
/// `<e(t), e(t)> = 1` holds coefficient-wise through the truncation order.
#[derive(Clone, Debug)]
pub struct RuledChart {
    pub u: VecSeries,
    pub e: VecSeries,
}

impl RuledChart {
    pub fn new(u: VecSeries, e: VecSeries) -> Result<Self, Error> {
        if u.order().min(e.order()) == 0 {
            return Err(Error::invalid(
                "chart needs at least one known series coefficient",
            ));
        }
        let unit_defect = e.dot(&e).sub(&Series::constant(rat_int(1)));
        if !unit_defect.is_zero_through_order() {
            return Err(Error::invalid(
                "direction series must satisfy <e, e> = 1 through the truncation order",
            ));
        }
        Ok(RuledChart { u, e })
    }

    /// Number of known series coefficients (minimum over `u` and `e`).
    pub fn order(&self) -> usize {
        self.u.order().min(self.e.order())
    }

    /// Highest known t-degree; `usize::MAX` when both series are exact.
    pub fn truncation_order(&self) -> usize {
        let n = self.order();
        if n == EXACT {
            EXACT
        } else {
            n - 1
        }
    }

    /// Recenter the chart at `t0` (exact data required when `t0 != 0`).
    pub fn shift_origin(&self, t0: &Rat) -> Result<Self, Error> {
        Ok(RuledChart {
            u: self.u.shift_origin(t0)?,
            e: self.e.shift_origin(t0)?,
        })
    }

    /// Cut exact polynomial charts down to the default working order, so the
    /// pipeline's root/reversion kernels have a finite coefficient budget.
    fn with_finite_order(&self) -> Self {
        if self.order() == EXACT {
            let n = DEFAULT_TRUNCATION_ORDER + 1;
            RuledChart {
                u: self.u.truncate(n),
                e: self.e.truncate(n),
            }
        } else {
            self.clone()
        }
    }
}

impl LineFamily for RuledChart {
    fn point(&self, t: f64) -> Vec3 {
        self.u.eval_f64(t)
    }
    fn direction(&self, t: f64) -> Vec3 {
        self.e.eval_f64(t)
    }
}

/// Replace the center curve by `u + lambda e` with
/// `lambda(t) = -Int_{t0}^{t} <u', e>`, which makes `<u', e>` vanish
/// identically (through order - 1) without changing the line family.
/// `lambda(t0) = 0`, so the base point at `t0` is preserved. Applying the
/// operation twice changes nothing.
pub fn orthogonalize_chart(c: &RuledChart, t0: &Rat) -> RuledChart {
    let f = c.u.derivative().dot(&c.e).antiderivative();
    let lambda = Series::constant(f.eval_rat(t0)).sub(&f);
    RuledChart {
        u: c.u.add(&c.e.scale_series(&lambda)),
        e: c.e.clone(),
    }
}

/// Exact rank test at the recentered origin: the surface point at
/// `(t, lambda) = (0, lambda0)` is singular iff `u'(0) + lambda0 e'(0)` is
/// parallel to `e(0)`.
fn singular_at_zero(c: &RuledChart, lambda0: &Rat) -> Result<bool, Error> {
    let too_low = || {
        Error::TruncationTooLow(
            "chart order too low for the regularity test (the linear coefficient is unknown)"
                .into(),
        )
    };
    let du = c.u.coeff_vec(1).ok_or_else(too_low)?;
    let de = c.e.coeff_vec(1).ok_or_else(too_low)?;
    let e0 = c.e.coeff_vec(0).expect("chart has a constant coefficient");
    let w: [Rat; 3] = array::from_fn(|i| &du[i] + lambda0 * &de[i]);
    Ok(rv_is_zero(&rv_cross(&w, &e0)))
}

/// Shifted center curve `v(t) = u(t) + lambda0 e(t) - (u + lambda0 e)(t0)`
/// at a singular parameter pair. Both `v(0) = 0` and `v'(0) = 0` hold
/// exactly; when `v` vanishes through the whole order, every known line
/// passes through the singular point (cone candidate).
pub fn singular_shift(c: &RuledChart, t0: &Rat, lambda0: &Rat) -> Result<VecSeries, Error> {
    let c = c.shift_origin(t0)?;
    if !c.u.derivative().dot(&c.e).is_zero_through_order() {
        return Err(Error::invalid(
            "chart must be orthogonalized (<u', e> = 0) before the singular shift",
        ));
    }
    if !singular_at_zero(&c, lambda0)? {
        return Err(Error::NotSingular(format!(
            "the chart is regular at (t0, lambda0) = ({t0}, {lambda0})"
        )));
    }
    let shifted = c.u.add(&c.e.scale_rat(lambda0));
    let base = shifted.coeff_vec(0).expect("order >= 1");
    let v = shifted.sub(&VecSeries::constant(base));
    if let Some(v1) = v.coeff_vec(1) {
        if !rv_is_zero(&v1) {
            return Err(Error::invalid(
                "singular shift produced a nonvanishing first derivative; chart data is inconsistent",
            ));
        }
    }
    Ok(v)
}

/// The change of parameters behind a canonical form: the line offset
/// `mu(t, sigma)` solving the slope equation, the new parameter
/// `s(t, sigma)` with `s^m` equal to the first canonical coordinate, and its
/// formal inverse `t(s, sigma)`.
#[derive(Clone, Debug)]
pub struct ParameterChange {
    pub mu: SigmaSeries,
    pub s_of_t: SigmaSeries,
    pub t_of_s: SigmaSeries,
}

/// Local normal form of a singular chart point: in the exact orthogonal
/// frame `(v_m, e0, tau)` the surface is
/// `x(s, sigma) = s^m v_m + sigma s^m e0 + D(s, sigma) tau`,
/// where `D` has no terms of s-degree <= m.
#[derive(Clone, Debug)]
pub struct CanonicalChart {
    /// Contact order: valuation of the shifted center curve.
    pub m: usize,
    /// Leading coefficient vector of the shifted center curve (exact).
    pub v_m: [Rat; 3],
    /// Direction of the line through the singular point (exact).
    pub e0: [Rat; 3],
    /// Exact unnormalized cross product `v_m x e0`, transverse to both.
    pub tau: [Rat; 3],
    /// Transverse coefficient series `D(s, sigma)`.
    pub d: SigmaSeries,
    /// Smallest odd s-degree > m carrying a nonzero sigma-polynomial.
    pub j0: Option<usize>,
    /// Highest known t-degree of the chart the form was computed from.
    pub order: usize,
    /// Parameter change (dropped by the evenness descent, which composes
    /// square roots that leave the power-series ring).
    pub change: Option<ParameterChange>,
}

/// Full reduction to the canonical form at `(t0, lambda0)`. The chart is
/// recentered, orthogonalized, and singularly shifted internally; exact
/// polynomial charts are first truncated to the default working order.
pub fn canonical_form(
    c: &RuledChart,
    t0: &Rat,
    lambda0: &Rat,
) -> Result<CanonicalChart, Error> {
    let c = c.shift_origin(t0)?.with_finite_order();
    let c = orthogonalize_chart(&c, &rat_int(0));
    let v = singular_shift(&c, &rat_int(0), lambda0)?;
    canonical_from_shifted(&v, &c.e)
}

fn canonical_from_shifted(v: &VecSeries, e: &VecSeries) -> Result<CanonicalChart, Error> {
    let n = v.order().min(e.order());
    debug_assert!(n != EXACT, "pipeline inputs are always finitely truncated");
    if v.is_zero_through_order() {
        return Err(Error::invalid(
            "every line of the family passes through the singular point (cone); \
             the canonical form needs a nonzero center curve",
        ));
    }
    let m = v.valuation().expect("nonzero through order");
    debug_assert!(m >= 2, "v(0) = v'(0) = 0 forces valuation >= 2");
    if n < 2 * m + 1 {
        return Err(Error::TruncationTooLow(format!(
            "truncation order {} cannot expose the transverse series beyond degree m+1 = {} \
             at contact order m = {m} (order at least {} is needed)",
            n - 1,
            m + 1,
            2 * m
        )));
    }
    let v_m = v.coeff_vec(m).expect("within order");
    let e0 = e.coeff_vec(0).expect("within order");
    if !rv_dot(&v_m, &e0).is_zero() {
        return Err(Error::invalid(
            "leading center coefficient is not orthogonal to the line direction; \
             chart data is inconsistent",
        ));
    }
    let tau = rv_cross(&v_m, &e0);
    debug_assert!(!rv_is_zero(&tau));
    let nv_inv = rat_int(1) / rv_dot(&v_m, &v_m);
    let nt_inv = rat_int(1) / rv_dot(&tau, &tau);

    // Components of the shifted curve and of the direction in the exact
    // orthogonal frame (v_m, e0, tau); e0 is a unit vector already.
    let comp = |vs: &VecSeries, w: &[Rat; 3], scale: Option<&Rat>| -> SigmaSeries {
        let s = vs.dot(&VecSeries::constant(w.clone()));
        match scale {
            Some(r) => s.scale_rat(r).lift_sigma(),
            None => s.lift_sigma(),
        }
    };
    let big_a = comp(v, &v_m, Some(&nv_inv));
    let big_b = comp(v, &e0, None);
    let big_c = comp(v, &tau, Some(&nt_inv));
    let hat_a = comp(e, &v_m, Some(&nv_inv));
    let hat_b = comp(e, &e0, None);
    let hat_c = comp(e, &tau, Some(&nt_inv));

    // Offset mu(t, sigma) along the line solving the slope equation
    // B + mu*Bhat = sigma (A + mu*Ahat); the denominator has constant
    // term 1 because Ahat(0) = <e0, v_m>/|v_m|^2 = 0.
    let sigma = SigmaPoly::sigma();
    let denom = hat_b.sub(&hat_a.scale(&sigma));
    let mu = big_a
        .scale(&sigma)
        .sub(&big_b)
        .mul(&denom.inverse_unit(n)?);

    // First canonical coordinate x1 = A + mu*Ahat = t^m (1 + w); its exact
    // m-th root defines the new parameter s(t) = t (1 + w)^{1/m}.
    let x1 = big_a.add(&mu.mul(&hat_a));
    let unit_part = x1.divide_by_power(m)?;
    let s_of_t = unit_part.root_of_unit_series(m)?.shift_up(1);
    let t_of_s = s_of_t.revert()?;

    // Transverse coordinate, re-expanded in s.
    let x3 = big_c.add(&mu.mul(&hat_c));
    let d = x3.compose(&t_of_s)?;
    for (j, cj) in d.coeffs().iter().enumerate() {
        if j <= m && !cj.is_zero() {
            return Err(Error::invalid(
                "transverse series has a term of degree <= m; pipeline invariant violated",
            ));
        }
    }
    let j0 = detect_j0(&d, m);
    Ok(CanonicalChart {
        m,
        v_m,
        e0,
        tau,
        d,
        j0,
        order: n - 1,
        change: Some(ParameterChange { mu, s_of_t, t_of_s }),
    })
}

/// Smallest odd s-degree > m whose sigma-polynomial coefficient is nonzero
/// among the known coefficients.
fn detect_j0(d: &SigmaSeries, m: usize) -> Option<usize> {
    d.coeffs()
        .iter()
        .enumerate()
        .skip(m + 1)
        .find(|(j, c)| j % 2 == 1 && !c.is_zero())
        .map(|(j, _)| j)
}

/// While the contact order m is even and `D` is even in s through the known
/// order, substitute `s' = s^2`, halving m. Terminates because m strictly
/// decreases; stops early (without descending) when the remaining order is
/// too small to test evenness at all.
pub fn descend_evenness(cc: &CanonicalChart) -> CanonicalChart {
    let mut cur = cc.clone();
    loop {
        if cur.m % 2 == 1 {
            return cur;
        }
        let ord = cur.d.order();
        // Evenness is only meaningful when some degree > m is visible.
        if ord != EXACT && ord < cur.m + 2 {
            return cur;
        }
        let has_odd_term = cur
            .d
            .coeffs()
            .iter()
            .enumerate()
            .any(|(j, c)| j % 2 == 1 && !c.is_zero());
        if has_odd_term {
            return cur;
        }
        let stored = cur.d.coeffs();
        let half: Vec<SigmaPoly> = (0..(stored.len() + 1) / 2)
            .map(|j| stored[2 * j].clone())
            .collect();
        let new_ord = if ord == EXACT { EXACT } else { (ord + 1) / 2 };
        cur.d = Series::with_order(half, new_ord);
        cur.m /= 2;
        cur.j0 = detect_j0(&cur.d, cur.m);
        cur.change = None;
    }
}

/// Outcome of the local classification at a chart point. Each variant
/// records the truncation order the decision was made at: zero-tests are
/// semidecisions, certified only through that order.
#[derive(Clone, Debug, PartialEq)]
pub enum SingularityVerdict {
    /// The parametrization is regular, or the singular chart descends to a
    /// smooth graph (odd contact order).
    RegularPoint { order: usize },
    /// The surface lies (through order) in the plane with this normal form.
    Plane { normal: LinearForm, order: usize },
    /// All known lines pass through one point.
    Cone { vertex: [Rat; 3], order: usize },
    /// Even contact order with a surviving odd transverse term `j0`: a
    /// double-tangency point whose tangent form is `form`.
    Cuspidal {
        form: LinearForm,
        j0: usize,
        order: usize,
    },
    /// The truncation order cannot support the decision.
    Inconclusive { reason: String, order: usize },
}

impl SingularityVerdict {
    pub fn order(&self) -> usize {
        match self {
            SingularityVerdict::RegularPoint { order }
            | SingularityVerdict::Plane { order, .. }
            | SingularityVerdict::Cone { order, .. }
            | SingularityVerdict::Cuspidal { order, .. }
            | SingularityVerdict::Inconclusive { order, .. } => *order,
        }
    }

    /// True for every verdict except `Inconclusive`.
    pub fn is_definitive(&self) -> bool {
        !matches!(self, SingularityVerdict::Inconclusive { .. })
    }
}

/// Classify the chart point at `(t0, lambda0)`: regular point, cone, plane,
/// cuspidal (double tangency), or an honest `Inconclusive` when the
/// truncation order cannot decide.
pub fn classify_singularity(c: &RuledChart, t0: &Rat, lambda0: &Rat) -> SingularityVerdict {
    let shifted = match c.shift_origin(t0) {
        Ok(s) => s,
        Err(e) => {
            return SingularityVerdict::Inconclusive {
                reason: e.to_string(),
                order: c.truncation_order(),
            }
        }
    };
    let work = shifted.with_finite_order();
    let order = work.truncation_order();
    let work = orthogonalize_chart(&work, &rat_int(0));
    let v = match singular_shift(&work, &rat_int(0), lambda0) {
        Ok(v) => v,
        Err(Error::NotSingular(_)) => return SingularityVerdict::RegularPoint { order },
        Err(e) => {
            return SingularityVerdict::Inconclusive {
                reason: e.to_string(),
                order,
            }
        }
    };
    if v.is_zero_through_order() {
        let u0 = work.u.coeff_vec(0).expect("order >= 1");
        let e0 = work.e.coeff_vec(0).expect("order >= 1");
        let vertex: [Rat; 3] = array::from_fn(|i| &u0[i] + lambda0 * &e0[i]);
        return SingularityVerdict::Cone { vertex, order };
    }
    let cc = match canonical_from_shifted(&v, &work.e) {
        Ok(cc) => cc,
        Err(Error::TruncationTooLow(reason)) => {
            return SingularityVerdict::Inconclusive { reason, order }
        }
        Err(e) => {
            return SingularityVerdict::Inconclusive {
                reason: e.to_string(),
                order,
            }
        }
    };
    if cc.d.is_zero_through_order() {
        let normal = LinearForm::normalized(cc.tau.to_vec())
            .expect("cross product of orthogonal nonzero vectors is nonzero");
        return SingularityVerdict::Plane { normal, order };
    }
    let dd = descend_evenness(&cc);
    if dd.m % 2 == 1 {
        return SingularityVerdict::RegularPoint { order };
    }
    match dd.j0 {
        Some(j0) => SingularityVerdict::Cuspidal {
            form: LinearForm::normalized(dd.tau.to_vec())
                .expect("cross product of orthogonal nonzero vectors is nonzero"),
            j0,
            order,
        },
        None => SingularityVerdict::Inconclusive {
            reason: format!(
                "truncation order {order} is too low to finish the evenness descent at \
                 contact order m = {}",
                dd.m
            ),
            order,
        },
    }
}

/// One term `b x1^nu x2^beta` of the fractional graph expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxTerm {
    /// Fractional exponent of the first coordinate: `j/m - beta`.
    pub nu: Rat,
    /// Integer exponent of the second coordinate.
    pub beta: usize,
    pub coeff: Rat,
    /// `j - m*beta > 0`: the power of the real m-th root carried by the
    /// term, used for sign-correct evaluation.
    pub s_pow: usize,
}

/// Fractional-power graph `z(x1, x2) = sum b x1^nu x2^beta` of the surface
/// over the tangent coordinates, read off a canonical form with odd
/// contact order.
#[derive(Clone, Debug)]
pub struct PuiseuxGraph {
    pub m: usize,
    pub terms: Vec<PuiseuxTerm>,
    /// Number of known s-coefficients backing the expansion.
    pub order: usize,
}

/// Expand the transverse series of an odd-contact-order canonical form as a
/// fractional-power graph: with `x1 = s^m` and `x2 = sigma s^m`, the term
/// `d_{j,beta} sigma^beta s^j` becomes `d_{j,beta} x1^{j/m - beta} x2^beta`.
pub fn puiseux_graph(cc: &CanonicalChart) -> Result<PuiseuxGraph, Error> {
    if cc.m % 2 == 0 {
        return Err(Error::invalid(
            "the fractional graph expansion needs an odd contact order; \
             apply the evenness descent first",
        ));
    }
    let m = cc.m;
    let mut terms = Vec::new();
    for (j, dj) in cc.d.coeffs().iter().enumerate() {
        for (beta, b) in dj.coeffs().iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            if j <= m * beta {
                return Err(Error::invalid(
                    "expansion has a term with nonpositive leading exponent; \
                     the surface is not a graph over the tangent coordinates",
                ));
            }
            let nu = rat(j as i64, m as i64) - rat_int(beta as i64);
            debug_assert!(
                &nu + rat_int(beta as i64) >= rat(m as i64 + 1, m as i64),
                "every term satisfies nu + beta >= 1 + 1/m"
            );
            terms.push(PuiseuxTerm {
                nu,
                beta,
                coeff: b.clone(),
                s_pow: j - m * beta,
            });
        }
    }
    Ok(PuiseuxGraph {
        m,
        terms,
        order: cc.d.order(),
    })
}

impl PuiseuxGraph {
    /// Evaluate `z(x1, x2)` using the real odd root `s = x1^{1/m}` (total
    /// for every sign of `x1` because m is odd and every term has
    /// `s_pow > 0`).
    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        let s = x1.signum() * x1.abs().powf(1.0 / self.m as f64);
        self.terms
            .iter()
            .map(|t| rat_to_f64(&t.coeff) * s.powi(t.s_pow as i32) * x2.powi(t.beta as i32))
            .sum()
    }

    /// `max |z| / r` over equally spaced points of the circle of radius `r`;
    /// shrinking values over shrinking radii witness `z = o(r)`.
    pub fn max_ratio_on_circle(&self, r: f64, samples: usize) -> f64 {
        (0..samples)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
                self.eval(r * th.cos(), r * th.sin()).abs() / r
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zpoly(cs: &[i64]) -> Series<Rat> {
        Series::exact(cs.iter().map(|&c| rat_int(c)).collect())
    }

    /// `(1 + t^k)^{-1}` with n known coefficients.
    fn inv_one_plus_tk(k: usize, n: usize) -> Series<Rat> {
        let mut p = vec![rat_int(0); k + 1];
        p[0] = rat_int(1);
        p[k] = rat_int(1);
        Series::exact(p).inverse_unit(n).unwrap()
    }

    /// `(1 + t^k)^{-1/2}` with n known coefficients.
    fn inv_sqrt_one_plus_tk(k: usize, n: usize) -> Series<Rat> {
        let mut p = vec![rat_int(0); k + 1];
        p[0] = rat_int(1);
        p[k] = rat_int(1);
        Series::exact(p)
            .truncate(n)
            .root_of_unit_series(2)
            .unwrap()
            .inverse_unit(n)
            .unwrap()
    }

    /// Center (t^2, 0, 0) with direction (0, 1, t) made exactly unit: the
    /// umbrella-shaped pinch point fixture.
    fn whitney_chart(trunc: usize) -> RuledChart {
        let n = trunc + 1;
        let g = inv_sqrt_one_plus_tk(2, n);
        let u = VecSeries::new([zpoly(&[0, 0, 1]), Series::zero_exact(), Series::zero_exact()]);
        let e = VecSeries::new([Series::zero_exact(), g.clone(), g.shift_up(1)]);
        RuledChart::new(u, e).unwrap()
    }

    /// All lines through the point (0,0,0) at line offset lambda = -1: a
    /// circular cone around the x3-axis with half-angle opening 3/5 : 4/5.
    fn cone_chart(trunc: usize) -> RuledChart {
        let n = trunc + 1;
        let inv2 = inv_one_plus_tk(2, n);
        let cos_s = zpoly(&[1, 0, -1]).mul(&inv2);
        let sin_s = zpoly(&[0, 2]).mul(&inv2);
        let dir = VecSeries::new([
            cos_s.scale_rat(&rat(3, 5)),
            sin_s.scale_rat(&rat(3, 5)),
            Series::constant(rat(4, 5)),
        ]);
        RuledChart::new(dir.clone(), dir).unwrap()
    }

    /// Exact polynomial chart of the plane x3 = 0 with a singular center.
    fn plane_chart() -> RuledChart {
        let u = VecSeries::new([zpoly(&[0, 0, 1]), Series::zero_exact(), Series::zero_exact()]);
        let e = VecSeries::constant([rat_int(0), rat_int(1), rat_int(0)]);
        RuledChart::new(u, e).unwrap()
    }

    /// Plane x3 = 0 again, but with a rotating direction: orthogonalization,
    /// the root kernel, and reversion all do nontrivial work.
    fn planar_reversion_chart(trunc: usize) -> RuledChart {
        let n = trunc + 1;
        let inv2 = inv_one_plus_tk(2, n);
        let cos_s = zpoly(&[1, 0, -1]).mul(&inv2);
        let sin_s = zpoly(&[0, 2]).mul(&inv2);
        let u = VecSeries::new([zpoly(&[0, 0, 1]), Series::zero_exact(), Series::zero_exact()]);
        let e = VecSeries::new([sin_s, cos_s, Series::zero_exact()]);
        RuledChart::new(u, e).unwrap()
    }

    /// Contact order 4 with transverse series sigma s^6: descends once.
    fn evenness_chart(trunc: usize) -> RuledChart {
        let n = trunc + 1;
        let g4 = inv_sqrt_one_plus_tk(4, n);
        let u = VecSeries::new([
            zpoly(&[0, 0, 0, 0, 1]),
            Series::zero_exact(),
            Series::zero_exact(),
        ]);
        let e = VecSeries::new([Series::zero_exact(), g4.clone(), g4.shift_up(2)]);
        RuledChart::new(u, e).unwrap()
    }

    /// Contact order 2 with transverse series sigma s^4: descends to the
    /// smooth saddle graph z = x1 x2.
    fn saddle_chart(trunc: usize) -> RuledChart {
        let n = trunc + 1;
        let g4 = inv_sqrt_one_plus_tk(4, n);
        let u = VecSeries::new([zpoly(&[0, 0, 1]), Series::zero_exact(), Series::zero_exact()]);
        let e = VecSeries::new([Series::zero_exact(), g4.clone(), g4.shift_up(2)]);
        RuledChart::new(u, e).unwrap()
    }

    /// Odd contact order 3 with a center bending out of the tangent plane:
    /// the transverse series starts with (1 + sigma) s^4.
    fn puiseux3_chart(trunc: usize) -> RuledChart {
        let n = trunc + 1;
        let g = inv_sqrt_one_plus_tk(2, n);
        let u = VecSeries::new([
            zpoly(&[0, 0, 0, 1]),
            Series::zero_exact(),
            zpoly(&[0, 0, 0, 0, 1]),
        ]);
        let e = VecSeries::new([Series::zero_exact(), g.clone(), g.shift_up(1)]);
        RuledChart::new(u, e).unwrap()
    }

    /// Odd contact order 3 whose only transverse term is sigma s^7.
    fn far_term_chart(trunc: usize) -> RuledChart {
        let n = trunc + 1;
        let g8 = inv_sqrt_one_plus_tk(8, n);
        let u = VecSeries::new([
            zpoly(&[0, 0, 0, 1]),
            Series::zero_exact(),
            Series::zero_exact(),
        ]);
        let e = VecSeries::new([Series::zero_exact(), g8.clone(), g8.shift_up(4)]);
        RuledChart::new(u, e).unwrap()
    }

    /// Direction with nonzero components along all three frame vectors, so
    /// the slope equation, root, and reversion kernels all engage.
    fn full_chart(trunc: usize) -> RuledChart {
        let n = trunc + 1;
        let inv2 = inv_one_plus_tk(2, n);
        let inv4 = inv_one_plus_tk(4, n);
        let c1 = zpoly(&[1, 0, -1]).mul(&inv2);
        let s1 = zpoly(&[0, 2]).mul(&inv2);
        let c2 = zpoly(&[1, 0, 0, 0, -1]).mul(&inv4);
        let s2 = zpoly(&[0, 0, 2]).mul(&inv4);
        let u = VecSeries::new([zpoly(&[0, 0, 1]), Series::zero_exact(), Series::zero_exact()]);
        let e = VecSeries::new([s1.mul(&c2), c1.mul(&c2), s2]);
        RuledChart::new(u, e).unwrap()
    }

    /// Circular cylinder: regular everywhere.
    fn cylinder_chart(trunc: usize) -> RuledChart {
        let n = trunc + 1;
        let inv2 = inv_one_plus_tk(2, n);
        let c1 = zpoly(&[1, 0, -1]).mul(&inv2);
        let s1 = zpoly(&[0, 2]).mul(&inv2);
        let u = VecSeries::new([c1, s1, Series::zero_exact()]);
        let e = VecSeries::constant([rat_int(0), rat_int(0), rat_int(1)]);
        RuledChart::new(u, e).unwrap()
    }

    fn pow_series(s: &Series<Rat>, m: usize) -> Series<Rat> {
        let mut acc = Series::constant(rat_int(1));
        for _ in 0..m {
            acc = acc.mul(s);
        }
        acc
    }

    fn form_001() -> LinearForm {
        LinearForm::normalized(vec![rat_int(0), rat_int(0), rat_int(1)]).unwrap()
    }

    #[test]
    fn orthogonalization_kills_the_tangential_component_and_is_idempotent() {
        let chart = full_chart(10);
        assert!(!chart.u.derivative().dot(&chart.e).is_zero_through_order());
        let o1 = orthogonalize_chart(&chart, &rat_int(0));
        assert!(o1.u.derivative().dot(&o1.e).is_zero_through_order());
        let o2 = orthogonalize_chart(&o1, &rat_int(0));
        assert!(o2.u.sub(&o1.u).is_zero_through_order());
        // The base point at t0 is untouched.
        assert_eq!(o1.u.coeff_vec(0), chart.u.coeff_vec(0));
        // Same with a nonzero base parameter.
        let t0 = rat(1, 3);
        let o3 = orthogonalize_chart(&chart, &t0);
        assert!(o3.u.derivative().dot(&o3.e).is_zero_through_order());
        // On exact chart data the base point at t0 is preserved exactly.
        let u = VecSeries::new([zpoly(&[0, 1]), Series::zero_exact(), Series::zero_exact()]);
        let e = VecSeries::constant([rat_int(1), rat_int(0), rat_int(0)]);
        let exact_chart = RuledChart::new(u, e).unwrap();
        let o4 = orthogonalize_chart(&exact_chart, &t0);
        assert_eq!(o4.u.eval_rat(&t0), exact_chart.u.eval_rat(&t0));
    }

    #[test]
    fn forced_orthogonalization_of_a_single_line_family() {
        let u = VecSeries::new([zpoly(&[0, 1]), Series::zero_exact(), Series::zero_exact()]);
        let e = VecSeries::constant([rat_int(1), rat_int(0), rat_int(0)]);
        let chart = RuledChart::new(u, e).unwrap();
        let o = orthogonalize_chart(&chart, &rat_int(0));
        assert!(o.u.is_zero_through_order());
    }

    #[test]
    fn chart_constructor_rejects_non_unit_directions() {
        let u = VecSeries::new([zpoly(&[0, 0, 1]), Series::zero_exact(), Series::zero_exact()]);
        let e = VecSeries::new([Series::zero_exact(), zpoly(&[1]), zpoly(&[0, 1])]);
        assert!(matches!(
            RuledChart::new(u, e),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn chart_evaluates_as_a_line_family() {
        let chart = whitney_chart(12);
        let p = chart.point(0.25);
        let d = chart.direction(0.25);
        let g = (1.0f64 + 0.0625).powf(-0.5);
        assert!((p[0] - 0.0625).abs() < 1e-12 && p[1] == 0.0 && p[2] == 0.0);
        assert!((d[1] - g).abs() < 1e-9 && (d[2] - 0.25 * g).abs() < 1e-9);
    }

    #[test]
    fn whitney_singular_shift_recovers_the_center_curve() {
        let chart = whitney_chart(8);
        let v = singular_shift(&chart, &rat_int(0), &rat_int(0)).unwrap();
        let expected = VecSeries::new([
            zpoly(&[0, 0, 1]),
            Series::zero_exact(),
            Series::zero_exact(),
        ]);
        assert!(v.sub(&expected).is_zero_through_order());
        assert_eq!(v.valuation(), Some(2));
    }

    #[test]
    fn whitney_canonical_form_has_the_odd_transverse_term() {
        let cc = canonical_form(&whitney_chart(8), &rat_int(0), &rat_int(0)).unwrap();
        assert_eq!(cc.m, 2);
        assert_eq!(cc.v_m, [rat_int(1), rat_int(0), rat_int(0)]);
        assert_eq!(cc.e0, [rat_int(0), rat_int(1), rat_int(0)]);
        assert_eq!(cc.tau, [rat_int(0), rat_int(0), rat_int(1)]);
        assert_eq!(cc.order, 8);
        // D(s, sigma) = sigma s^3 exactly through the known order.
        assert_eq!(cc.d.order(), 8);
        assert_eq!(cc.d.coeff(3), Some(SigmaPoly::sigma()));
        for (j, c) in cc.d.coeffs().iter().enumerate() {
            if j != 3 {
                assert!(c.is_zero(), "unexpected D term at degree {j}: {c:?}");
            }
        }
        assert_eq!(cc.j0, Some(3));
    }

    #[test]
    fn whitney_verdict_is_cuspidal_and_stable_under_order() {
        for trunc in [6, 8, 12] {
            let verdict =
                classify_singularity(&whitney_chart(trunc), &rat_int(0), &rat_int(0));
            assert_eq!(
                verdict,
                SingularityVerdict::Cuspidal {
                    form: form_001(),
                    j0: 3,
                    order: trunc,
                }
            );
        }
    }

    #[test]
    fn too_low_truncation_is_reported_not_guessed() {
        assert!(matches!(
            canonical_form(&whitney_chart(3), &rat_int(0), &rat_int(0)),
            Err(Error::TruncationTooLow(_))
        ));
        let verdict = classify_singularity(&whitney_chart(3), &rat_int(0), &rat_int(0));
        assert!(matches!(
            verdict,
            SingularityVerdict::Inconclusive { order: 3, .. }
        ));
    }

    #[test]
    fn cone_chart_yields_exact_vertex() {
        for trunc in [6, 12] {
            let chart = cone_chart(trunc);
            let v = singular_shift(&chart, &rat_int(0), &rat_int(-1)).unwrap();
            assert!(v.is_zero_through_order());
            let verdict = classify_singularity(&chart, &rat_int(0), &rat_int(-1));
            assert_eq!(
                verdict,
                SingularityVerdict::Cone {
                    vertex: [rat_int(0), rat_int(0), rat_int(0)],
                    order: trunc,
                }
            );
        }
    }

    #[test]
    fn plane_charts_classify_as_plane() {
        // Exact polynomial chart: truncated internally to the default order.
        let verdict = classify_singularity(&plane_chart(), &rat_int(0), &rat_int(0));
        assert_eq!(
            verdict,
            SingularityVerdict::Plane {
                normal: form_001(),
                order: DEFAULT_TRUNCATION_ORDER,
            }
        );
        // Rotating direction: the full pipeline still finds D = 0.
        let verdict =
            classify_singularity(&planar_reversion_chart(10), &rat_int(0), &rat_int(0));
        assert_eq!(
            verdict,
            SingularityVerdict::Plane {
                normal: form_001(),
                order: 10,
            }
        );
    }

    #[test]
    fn recentering_classifies_polynomial_charts_away_from_zero() {
        // Center (1 - t)^2 is singular at t0 = 1; the chart data is exact,
        // so recentering is available.
        let u = VecSeries::new([zpoly(&[1, -2, 1]), Series::zero_exact(), Series::zero_exact()]);
        let e = VecSeries::constant([rat_int(0), rat_int(1), rat_int(0)]);
        let chart = RuledChart::new(u, e).unwrap();
        let verdict = classify_singularity(&chart, &rat_int(1), &rat_int(0));
        assert_eq!(
            verdict,
            SingularityVerdict::Plane {
                normal: form_001(),
                order: DEFAULT_TRUNCATION_ORDER,
            }
        );
        // A truncated chart cannot be recentered honestly: Inconclusive.
        let verdict = classify_singularity(&cone_chart(8), &rat(1, 2), &rat_int(-1));
        assert!(matches!(
            verdict,
            SingularityVerdict::Inconclusive { .. }
        ));
    }

    #[test]
    fn regular_points_are_detected() {
        let chart = cylinder_chart(8);
        assert!(matches!(
            singular_shift(&chart, &rat_int(0), &rat_int(0)),
            Err(Error::NotSingular(_))
        ));
        let verdict = classify_singularity(&chart, &rat_int(0), &rat_int(0));
        assert_eq!(verdict, SingularityVerdict::RegularPoint { order: 8 });
    }

    #[test]
    fn singular_shift_requires_an_orthogonalized_chart() {
        let chart = full_chart(8);
        assert!(matches!(
            singular_shift(&chart, &rat_int(0), &rat_int(0)),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn evenness_descent_halves_the_contact_order() {
        let cc = canonical_form(&evenness_chart(10), &rat_int(0), &rat_int(0)).unwrap();
        assert_eq!(cc.m, 4);
        assert_eq!(cc.d.coeff(6), Some(SigmaPoly::sigma()));
        assert_eq!(cc.j0, None);
        let dd = descend_evenness(&cc);
        assert_eq!(dd.m, 2);
        assert_eq!(dd.d.coeff(3), Some(SigmaPoly::sigma()));
        assert_eq!(dd.j0, Some(3));
        assert!(dd.change.is_none());
        for trunc in [10, 12] {
            let verdict =
                classify_singularity(&evenness_chart(trunc), &rat_int(0), &rat_int(0));
            assert_eq!(
                verdict,
                SingularityVerdict::Cuspidal {
                    form: form_001(),
                    j0: 3,
                    order: trunc,
                }
            );
        }
    }

    #[test]
    fn even_graph_descends_to_a_regular_saddle() {
        let verdict = classify_singularity(&saddle_chart(8), &rat_int(0), &rat_int(0));
        assert_eq!(verdict, SingularityVerdict::RegularPoint { order: 8 });

        let cc = canonical_form(&saddle_chart(8), &rat_int(0), &rat_int(0)).unwrap();
        assert_eq!(cc.m, 2);
        assert_eq!(cc.d.coeff(4), Some(SigmaPoly::sigma()));
        let dd = descend_evenness(&cc);
        assert_eq!(dd.m, 1);
        assert_eq!(dd.d.coeff(2), Some(SigmaPoly::sigma()));

        // Odd (here: trivial) contact order gives an ordinary power series
        // graph z = x1 x2 with vanishing differential at the origin.
        let graph = puiseux_graph(&dd).unwrap();
        assert_eq!(
            graph.terms,
            vec![PuiseuxTerm {
                nu: rat_int(1),
                beta: 1,
                coeff: rat_int(1),
                s_pow: 1,
            }]
        );
        for term in &graph.terms {
            assert!(term.nu.is_integer());
            assert!(&term.nu + rat_int(term.beta as i64) >= rat_int(2));
        }
        assert!((graph.eval(0.3, -0.7) - (0.3 * -0.7)).abs() < 1e-12);
    }

    #[test]
    fn fractional_expansion_exponent_pattern_for_contact_order_three() {
        let chart = puiseux3_chart(10);
        // Odd contact order: the surface is differentiable at the point.
        let verdict = classify_singularity(&chart, &rat_int(0), &rat_int(0));
        assert_eq!(verdict, SingularityVerdict::RegularPoint { order: 10 });

        let cc = canonical_form(&chart, &rat_int(0), &rat_int(0)).unwrap();
        assert_eq!(cc.m, 3);
        let graph = puiseux_graph(&cc).unwrap();
        // Leading terms from D_4 = 1 + sigma: exponents nu = 4/3 - beta.
        let lead: Vec<&PuiseuxTerm> = graph
            .terms
            .iter()
            .filter(|t| t.s_pow + 3 * t.beta == 4)
            .collect();
        assert_eq!(lead.len(), 2);
        for t in &lead {
            assert_eq!(t.nu, rat(4, 3) - rat_int(t.beta as i64));
            assert_eq!(t.coeff, rat_int(1));
        }
        // Graph property and homogeneity floor hold for every term.
        for t in &graph.terms {
            assert!(t.nu > rat_int(0));
            assert!(&t.nu + rat_int(t.beta as i64) >= rat(4, 3));
        }
        // puiseux expansion of an even contact order is refused.
        let whitney = canonical_form(&whitney_chart(8), &rat_int(0), &rat_int(0)).unwrap();
        assert!(puiseux_graph(&whitney).is_err());
        // z = o(r): the max ratio shrinks with the radius.
        let ratios: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&r| graph.max_ratio_on_circle(r, 64))
            .collect();
        assert!(ratios[0] > ratios[1] && ratios[1] > ratios[2]);
    }

    #[test]
    fn far_transverse_term_vanishes_faster_than_r() {
        let cc = canonical_form(&far_term_chart(10), &rat_int(0), &rat_int(0)).unwrap();
        assert_eq!(cc.m, 3);
        assert_eq!(cc.d.coeff(7), Some(SigmaPoly::sigma()));
        let graph = puiseux_graph(&cc).unwrap();
        assert_eq!(
            graph.terms,
            vec![PuiseuxTerm {
                nu: rat(4, 3),
                beta: 1,
                coeff: rat_int(1),
                s_pow: 4,
            }]
        );
        let ratios: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&r| graph.max_ratio_on_circle(r, 64))
            .collect();
        assert!(ratios[0] > ratios[1] && ratios[1] > ratios[2]);
        assert!(ratios[2] <= 1e-2, "ratio at r = 1e-3 was {}", ratios[2]);
    }

    #[test]
    fn canonical_form_reconstructs_the_chart_exactly() {
        for chart in [whitney_chart(8), full_chart(10)] {
            let work = orthogonalize_chart(&chart, &rat_int(0));
            let v = singular_shift(&work, &rat_int(0), &rat_int(0)).unwrap();
            let cc = canonical_form(&chart, &rat_int(0), &rat_int(0)).unwrap();
            let pc = cc.change.clone().unwrap();
            let nv_inv = rat_int(1) / rv_dot(&cc.v_m, &cc.v_m);
            let a = v
                .dot(&VecSeries::constant(cc.v_m.clone()))
                .scale_rat(&nv_inv);
            let a_hat = work
                .e
                .dot(&VecSeries::constant(cc.v_m.clone()))
                .scale_rat(&nv_inv);
            for sigma in [rat_int(1), rat_int(-1), rat(1, 2), rat(-2, 3), rat_int(3)] {
                let mu = pc.mu.at_sigma(&sigma);
                let s = pc.s_of_t.at_sigma(&sigma);
                // The new parameter really is the m-th root of the first
                // canonical coordinate.
                let x1 = a.add(&mu.mul(&a_hat));
                assert!(pow_series(&s, cc.m).sub(&x1).is_zero_through_order());
                // Reconstruction identity, exact through the known order:
                // v + mu e = x1 v_m + sigma x1 e0 + D(s(t), sigma) tau.
                let d_t = cc.d.at_sigma(&sigma).compose(&s).unwrap();
                let lhs = v.add(&work.e.scale_series(&mu));
                let rhs = VecSeries::constant(cc.v_m.clone())
                    .scale_series(&x1)
                    .add(
                        &VecSeries::constant(cc.e0.clone())
                            .scale_series(&x1.scale_rat(&sigma)),
                    )
                    .add(&VecSeries::constant(cc.tau.clone()).scale_series(&d_t));
                assert!(lhs.sub(&rhs).is_zero_through_order());
            }
        }
    }
}
