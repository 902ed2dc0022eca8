//! Truncated power series over exact coefficient rings.
//!
//! A [`Series`] stores the coefficients it actually knows: a value with
//! `order() == n` is known modulo `t^n`. Every operation propagates the
//! truncation order conservatively, so downstream code can ask how far a
//! computed series is trustworthy instead of silently reading garbage
//! coefficients. Polynomials that are known exactly (inputs, monomials) carry
//! a saturated order and never limit their partners.
//!
//! Two coefficient rings are provided: [`Rat`] itself, and [`SigmaPoly`] —
//! dense polynomials in one formal slope parameter — which turn a `Series`
//! into a bivariate expansion truncated in `t` only.

use crate::error::Error;
use crate::poly::{rat, rat_int, rat_to_f64, Rat};
use crate::vec3::Vec3;
use num::{One, Zero};

/// Order value used for exactly known series (polynomials).
pub const EXACT: usize = usize::MAX;

/// Coefficient ring of a truncated series.
pub trait Ring: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// Multiplication by a rational scalar.
    fn scale_rat(&self, r: &Rat) -> Self;
    fn is_zero(&self) -> bool;
    /// Multiplicative inverse when the element is a unit of the ring.
    fn inverse(&self) -> Option<Self>;
}

impl Ring for Rat {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_rat(&self, r: &Rat) -> Self {
        self * r
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(rat_int(1) / self)
        }
    }
}

/// Dense polynomial in one formal parameter with rational coefficients.
///
/// Coefficients are stored low degree first and kept trimmed: the last entry
/// of a nonzero polynomial is nonzero, and the zero polynomial is the empty
/// vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaPoly {
    coeffs: Vec<Rat>,
}

impl SigmaPoly {
    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map_or(false, |c| Zero::is_zero(c)) {
            coeffs.pop();
        }
        SigmaPoly { coeffs }
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The parameter itself.
    pub fn sigma() -> Self {
        SigmaPoly {
            coeffs: vec![Zero::zero(), One::one()],
        }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// The constant term (zero for the zero polynomial).
    pub fn constant_term(&self) -> Rat {
        self.coeffs.first().cloned().unwrap_or_else(Zero::zero)
    }

    pub fn eval_rat(&self, sigma: &Rat) -> Rat {
        let mut acc: Rat = Zero::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * sigma + c;
        }
        acc
    }

    pub fn eval_f64(&self, sigma: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * sigma + rat_to_f64(c);
        }
        acc
    }
}

impl Ring for SigmaPoly {
    fn zero() -> Self {
        SigmaPoly { coeffs: Vec::new() }
    }
    fn one() -> Self {
        Self::constant(One::one())
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![rat_int(0); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] = out[i].clone() + c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] = out[i].clone() + c;
        }
        Self::from_coeffs(out)
    }
    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
    fn neg(&self) -> Self {
        SigmaPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
    fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = vec![rat_int(0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a * b;
            }
        }
        Self::from_coeffs(out)
    }
    fn scale_rat(&self, r: &Rat) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * r).collect())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn inverse(&self) -> Option<Self> {
        // Units of the polynomial ring are the nonzero constants.
        if self.coeffs.len() == 1 {
            Some(Self::constant(rat_int(1) / &self.coeffs[0]))
        } else {
            None
        }
    }
}

/// `alpha (alpha-1) ... (alpha-k+1) / k!`.
pub fn binomial_rat(alpha: &Rat, k: usize) -> Rat {
    let mut num: Rat = One::one();
    for j in 0..k {
        num = num * (alpha - Rat::from_integer(j.into()));
    }
    let mut fact: Rat = One::one();
    for j in 1..=k {
        fact = fact * Rat::from_integer(j.into());
    }
    num / fact
}

/// Truncated power series: the coefficients of `t^0 .. t^{order-1}`.
///
/// `order == EXACT` marks a series known exactly (a polynomial); its
/// coefficient vector may be shorter than any requested index, with the
/// missing entries being genuine zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<R: Ring> {
    coeffs: Vec<R>,
    order: usize,
}

impl<R: Ring> Series<R> {
    /// A series whose listed coefficients are all that is known.
    pub fn with_order(mut coeffs: Vec<R>, order: usize) -> Self {
        assert!(order == EXACT || coeffs.len() <= order);
        if order != EXACT {
            coeffs.resize(order, R::zero());
        } else {
            while coeffs.last().map_or(false, |c| c.is_zero()) {
                coeffs.pop();
            }
        }
        Series { coeffs, order }
    }

    /// An exactly known polynomial.
    pub fn exact(coeffs: Vec<R>) -> Self {
        Self::with_order(coeffs, EXACT)
    }

    pub fn zero_exact() -> Self {
        Self::exact(Vec::new())
    }

    pub fn constant(c: R) -> Self {
        Self::exact(vec![c])
    }

    /// The monomial `t`.
    pub fn t() -> Self {
        Self::exact(vec![R::zero(), R::one()])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order == EXACT
    }

    /// The `j`-th coefficient, or `None` when `j` is beyond the known order.
    pub fn coeff(&self, j: usize) -> Option<R> {
        if self.order != EXACT && j >= self.order {
            return None;
        }
        Some(self.coeffs.get(j).cloned().unwrap_or_else(R::zero))
    }

    /// Number of stored coefficients (order, except for exact polynomials).
    fn len(&self) -> usize {
        self.coeffs.len()
    }

    /// The stored coefficients. For a truncated series the slice has exactly
    /// `order` entries; for an exact polynomial, trailing zeros are trimmed.
    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    /// All known coefficients vanish. For a truncated series this certifies
    /// only vanishing through the order, not identically.
    pub fn is_zero_through_order(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index of the first nonzero known coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Forget coefficients from `t^n` on.
    pub fn truncate(&self, n: usize) -> Self {
        if n >= self.order {
            return self.clone();
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(n);
        Series::with_order(coeffs, n)
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Series<S> {
        Series::with_order(self.coeffs.iter().map(f).collect(), self.order)
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let n = if order == EXACT {
            self.len().max(other.len())
        } else {
            order
        };
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            let a = self.coeffs.get(j).cloned().unwrap_or_else(R::zero);
            let b = other.coeffs.get(j).cloned().unwrap_or_else(R::zero);
            out.push(a.add(&b));
        }
        Series::with_order(out, order)
    }

    pub fn neg(&self) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
            order: self.order,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &R) -> Self {
        Series::with_order(self.coeffs.iter().map(|a| a.mul(c)).collect(), self.order)
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        Series::with_order(
            self.coeffs.iter().map(|a| a.scale_rat(r)).collect(),
            self.order,
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let cap = if order == EXACT {
            (self.len() + other.len()).saturating_sub(1)
        } else {
            order
        };
        let mut out = vec![R::zero(); cap];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= cap {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Series::with_order(out, order)
    }

    pub fn derivative(&self) -> Self {
        let order = if self.order == EXACT {
            EXACT
        } else {
            self.order.saturating_sub(1)
        };
        let mut out = Vec::new();
        for j in 1..self.len() {
            out.push(self.coeffs[j].scale_rat(&Rat::from_integer(j.into())));
        }
        if order != EXACT {
            out.truncate(order);
        }
        Series::with_order(out, order)
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let order = if self.order == EXACT {
            EXACT
        } else {
            self.order + 1
        };
        let mut out = vec![R::zero()];
        for (j, c) in self.coeffs.iter().enumerate() {
            out.push(c.scale_rat(&rat(1, (j + 1) as i64)));
        }
        Series::with_order(out, order)
    }

    /// Multiply by the exact monomial `t^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let order = if self.order == EXACT {
            EXACT
        } else {
            self.order + k
        };
        let mut out = vec![R::zero(); k];
        out.extend(self.coeffs.iter().cloned());
        Series::with_order(out, order)
    }

    /// Divide by `t^m`, requiring the first `m` known coefficients to vanish.
    pub fn divide_by_power(&self, m: usize) -> Result<Self, Error> {
        if self.order != EXACT && self.order < m {
            return Err(Error::TruncationTooLow(format!(
                "cannot divide by t^{m}: series only known modulo t^{}",
                self.order
            )));
        }
        for j in 0..m.min(self.len()) {
            if !self.coeffs[j].is_zero() {
                return Err(Error::invalid(format!(
                    "division by t^{m} hits a nonzero t^{j} coefficient"
                )));
            }
        }
        let order = if self.order == EXACT {
            EXACT
        } else {
            self.order - m
        };
        let out: Vec<R> = self.coeffs.iter().skip(m).cloned().collect();
        Ok(Series::with_order(out, order))
    }

    /// Reciprocal of a series whose constant term is a unit.
    pub fn inverse_unit(&self, n: usize) -> Result<Self, Error> {
        let c0 = self
            .coeff(0)
            .ok_or_else(|| Error::TruncationTooLow("inverse of an order-0 series".into()))?;
        let inv0 = c0
            .inverse()
            .ok_or_else(|| Error::invalid("series constant term is not a unit"))?;
        let order = self.order.min(n);
        if order == 0 {
            return Err(Error::TruncationTooLow("inverse of an order-0 series".into()));
        }
        let len = if order == EXACT { n } else { order };
        let mut out = vec![R::zero(); len];
        out[0] = inv0.clone();
        for k in 1..len {
            let mut acc = R::zero();
            for j in 1..=k.min(self.len().saturating_sub(1)) {
                acc = acc.add(&self.coeffs[j].mul(&out[k - j]));
            }
            out[k] = acc.mul(&inv0).neg();
        }
        Ok(Series::with_order(out, order.min(n)))
    }

    /// Composition `self(inner)`, requiring `inner` to vanish at the origin.
    pub fn compose(&self, inner: &Self) -> Result<Self, Error> {
        if inner.coeff(0).map_or(false, |c| !c.is_zero()) {
            return Err(Error::invalid(
                "series composition needs an inner series vanishing at 0",
            ));
        }
        let order = self.order.min(inner.order);
        let cap = if order == EXACT {
            // Polynomial composed with polynomial: still exact.
            let d1 = self.len().saturating_sub(1);
            let d2 = inner.len().saturating_sub(1);
            d1 * d2 + 1
        } else {
            order
        };
        // Horner from the top stored coefficient down.
        let mut acc = Series::with_order(Vec::new(), self.order);
        let inner_t = if order == EXACT {
            inner.clone()
        } else {
            inner.truncate(cap)
        };
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&inner_t).add(&Series::constant(c.clone()));
            if order != EXACT {
                acc = acc.truncate(cap);
            }
        }
        // The Horner loop runs muls against `inner`, whose order may exceed
        // the outer order; cap the result at the conservative bound.
        Ok(if order == EXACT {
            acc
        } else {
            acc.truncate(order)
        })
    }

    /// `m`-th root of a series with constant term 1, via the binomial series.
    pub fn root_of_unit_series(&self, m: usize) -> Result<Self, Error> {
        if m == 0 {
            return Err(Error::invalid("0th root"));
        }
        match self.coeff(0) {
            Some(c) if c == R::one() => {}
            Some(_) => return Err(Error::invalid("root requires constant term 1")),
            None => {
                return Err(Error::TruncationTooLow("root of an order-0 series".into()))
            }
        }
        let w = self.sub(&Series::constant(R::one()));
        let terms = if w.order == EXACT {
            // Polynomial input: the binomial series must still be truncated
            // somewhere; the caller should truncate first.
            return Err(Error::invalid(
                "root of an exact polynomial needs a finite truncation order",
            ));
        } else {
            w.order
        };
        let alpha = rat(1, m as i64);
        let binom: Vec<R> = (0..terms)
            .map(|k| R::one().scale_rat(&binomial_rat(&alpha, k)))
            .collect();
        Series::with_order(binom, terms).compose(&w)
    }

    /// Compositional inverse: `g` with `self(g(s)) = s`. Requires zero
    /// constant term and unit linear term.
    pub fn revert(&self) -> Result<Self, Error> {
        if self.coeff(0).map_or(false, |c| !c.is_zero()) {
            return Err(Error::invalid("reversion needs a series vanishing at 0"));
        }
        let order = self.order;
        if order != EXACT && order < 2 {
            return Err(Error::TruncationTooLow(
                "reversion needs at least the linear coefficient".into(),
            ));
        }
        let n = if order == EXACT {
            return Err(Error::invalid(
                "reversion of an exact polynomial needs a finite truncation order",
            ));
        } else {
            order
        };
        let f1 = self.coeff(1).unwrap();
        let inv1 = f1
            .inverse()
            .ok_or_else(|| Error::invalid("reversion needs a unit linear coefficient"))?;
        let mut g = vec![R::zero(); n];
        if n > 1 {
            g[1] = inv1.clone();
        }
        for k in 2..n {
            // Defect of the current partial inverse at order k.
            let partial = Series::with_order(g[..k].to_vec(), k + 1);
            let h = self.truncate(k + 1).compose(&partial)?;
            let defect = h.coeff(k).unwrap();
            g[k] = defect.mul(&inv1).neg();
        }
        Ok(Series::with_order(g, n))
    }
}

impl<R: Ring> Series<R> {
    /// Recenter the expansion at `t0`: the series of `t -> self(t0 + t)`.
    ///
    /// Only exactly known polynomials can be recentered at a nonzero point —
    /// a truncated tail would contaminate every recentered coefficient.
    pub fn shift_origin(&self, t0: &Rat) -> Result<Self, Error> {
        if Zero::is_zero(t0) {
            return Ok(self.clone());
        }
        if !self.is_exact() {
            return Err(Error::invalid(
                "recentering a truncated series at a nonzero point needs exact input",
            ));
        }
        let n = self.len();
        let mut out = vec![R::zero(); n];
        // out[k] = sum_j C(j,k) c_j t0^(j-k)
        for (j, c) in self.coeffs.iter().enumerate() {
            let mut binom = rat_int(1);
            let mut power = rat_int(1); // t0^(j-k), built from k=j down
            let mut factors: Vec<Rat> = Vec::with_capacity(j + 1);
            for k in (0..=j).rev() {
                factors.push(&binom * &power);
                // Step binomial C(j,k) -> C(j,k-1) and power t0^(j-k) -> t0^(j-k+1).
                if k > 0 {
                    binom = binom * rat(k as i64, (j - k + 1) as i64);
                    power = power * t0;
                }
            }
            factors.reverse();
            for (k, f) in factors.iter().enumerate() {
                out[k] = out[k].add(&c.scale_rat(f));
            }
        }
        Ok(Series::exact(out))
    }
}

impl Series<Rat> {
    /// Horner evaluation of the known truncation at a floating point.
    pub fn eval_f64(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * t + rat_to_f64(c);
        }
        acc
    }

    pub fn eval_rat(&self, t: &Rat) -> Rat {
        let mut acc: Rat = Zero::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// View over the larger ring of slope polynomials.
    pub fn lift_sigma(&self) -> Series<SigmaPoly> {
        self.map(|c| SigmaPoly::constant(c.clone()))
    }
}

impl Series<SigmaPoly> {
    /// Substitute a rational value for the slope parameter.
    pub fn at_sigma(&self, sigma: &Rat) -> Series<Rat> {
        self.map(|c| c.eval_rat(sigma))
    }
}

/// A truncated curve in 3-space: one rational series per coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct VecSeries {
    pub comps: [Series<Rat>; 3],
}

impl VecSeries {
    pub fn new(comps: [Series<Rat>; 3]) -> Self {
        VecSeries { comps }
    }

    /// Exact polynomial curve from per-coordinate coefficient lists.
    pub fn exact(coeffs: [Vec<Rat>; 3]) -> Self {
        let [x, y, z] = coeffs;
        VecSeries::new([Series::exact(x), Series::exact(y), Series::exact(z)])
    }

    pub fn constant(v: [Rat; 3]) -> Self {
        let [x, y, z] = v;
        VecSeries::new([
            Series::constant(x),
            Series::constant(y),
            Series::constant(z),
        ])
    }

    pub fn order(&self) -> usize {
        self.comps.iter().map(|c| c.order()).min().unwrap()
    }

    pub fn truncate(&self, n: usize) -> Self {
        VecSeries::new([
            self.comps[0].truncate(n),
            self.comps[1].truncate(n),
            self.comps[2].truncate(n),
        ])
    }

    pub fn add(&self, other: &Self) -> Self {
        VecSeries::new([
            self.comps[0].add(&other.comps[0]),
            self.comps[1].add(&other.comps[1]),
            self.comps[2].add(&other.comps[2]),
        ])
    }

    pub fn sub(&self, other: &Self) -> Self {
        VecSeries::new([
            self.comps[0].sub(&other.comps[0]),
            self.comps[1].sub(&other.comps[1]),
            self.comps[2].sub(&other.comps[2]),
        ])
    }

    pub fn neg(&self) -> Self {
        VecSeries::new([
            self.comps[0].neg(),
            self.comps[1].neg(),
            self.comps[2].neg(),
        ])
    }

    pub fn derivative(&self) -> Self {
        VecSeries::new([
            self.comps[0].derivative(),
            self.comps[1].derivative(),
            self.comps[2].derivative(),
        ])
    }

    /// Scale every coordinate by a scalar series.
    pub fn scale_series(&self, s: &Series<Rat>) -> Self {
        VecSeries::new([
            self.comps[0].mul(s),
            self.comps[1].mul(s),
            self.comps[2].mul(s),
        ])
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        VecSeries::new([
            self.comps[0].scale_rat(r),
            self.comps[1].scale_rat(r),
            self.comps[2].scale_rat(r),
        ])
    }

    pub fn dot(&self, other: &Self) -> Series<Rat> {
        let mut acc = self.comps[0].mul(&other.comps[0]);
        acc = acc.add(&self.comps[1].mul(&other.comps[1]));
        acc.add(&self.comps[2].mul(&other.comps[2]))
    }

    pub fn cross(&self, other: &Self) -> Self {
        let a = &self.comps;
        let b = &other.comps;
        VecSeries::new([
            a[1].mul(&b[2]).sub(&a[2].mul(&b[1])),
            a[2].mul(&b[0]).sub(&a[0].mul(&b[2])),
            a[0].mul(&b[1]).sub(&a[1].mul(&b[0])),
        ])
    }

    /// Coefficient vector of `t^j`, or `None` beyond the known order.
    pub fn coeff_vec(&self, j: usize) -> Option<[Rat; 3]> {
        Some([
            self.comps[0].coeff(j)?,
            self.comps[1].coeff(j)?,
            self.comps[2].coeff(j)?,
        ])
    }

    /// First index with a nonzero coefficient in some coordinate.
    pub fn valuation(&self) -> Option<usize> {
        self.comps
            .iter()
            .filter_map(|c| c.valuation())
            .min()
    }

    pub fn is_zero_through_order(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero_through_order())
    }

    pub fn eval_f64(&self, t: f64) -> Vec3 {
        [
            self.comps[0].eval_f64(t),
            self.comps[1].eval_f64(t),
            self.comps[2].eval_f64(t),
        ]
    }

    pub fn eval_rat(&self, t: &Rat) -> [Rat; 3] {
        [
            self.comps[0].eval_rat(t),
            self.comps[1].eval_rat(t),
            self.comps[2].eval_rat(t),
        ]
    }

    /// Recenter every coordinate at `t0` (exact curves only for `t0 != 0`).
    pub fn shift_origin(&self, t0: &Rat) -> Result<Self, Error> {
        Ok(VecSeries::new([
            self.comps[0].shift_origin(t0)?,
            self.comps[1].shift_origin(t0)?,
            self.comps[2].shift_origin(t0)?,
        ]))
    }
}
