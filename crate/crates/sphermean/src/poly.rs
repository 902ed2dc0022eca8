//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Coefficients are arbitrary-precision rationals so that Laplacians,
//! homogeneous decompositions, and divisibility questions are decided
//! exactly, never within a tolerance. Exponent vectors always have length
//! equal to the ambient dimension; zero coefficients are never stored.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::Euclid;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Arbitrary-precision rational scalar used by every exact kernel.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A polynomial in `dim` variables, stored as exponent-vector -> coefficient.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Poly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Rat) -> Self {
        let mut p = Poly::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Poly::constant(dim, Rat::one())
    }

    /// The monomial `x_i` (zero-based index).
    pub fn var(dim: usize, i: usize) -> Self {
        assert!(i < dim, "variable index out of range");
        let mut exp = vec![0; dim];
        exp[i] = 1;
        let mut p = Poly::zero(dim);
        p.add_term(exp, Rat::one());
        p
    }

    /// Builds a polynomial from (exponent vector, coefficient) pairs.
    /// Pairs with equal exponents are summed; zero results are dropped.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Vec<u32>, Rat)>) -> Result<Self, Error> {
        let mut p = Poly::zero(dim);
        for (exp, c) in terms {
            if exp.len() != dim {
                return Err(Error::invalid(format!(
                    "exponent vector of length {} in dimension {}",
                    exp.len(),
                    dim
                )));
            }
            p.add_term(exp, c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
    }

    fn add_term(&mut self, exp: Vec<u32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), -c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Rat) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.dim);
        }
        let mut out = Poly::zero(self.dim);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut out = Poly::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exp, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one(self.dim);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative with respect to variable `i`.
    pub fn diff(&self, i: usize) -> Poly {
        assert!(i < self.dim);
        let mut out = Poly::zero(self.dim);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut exp = e.clone();
            exp[i] -= 1;
            out.add_term(exp, c * rat_int(e[i] as i64));
        }
        out
    }

    /// Sum of second partials. Exact.
    pub fn laplacian(&self) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (e, c) in &self.terms {
            for i in 0..self.dim {
                if e[i] >= 2 {
                    let mut exp = e.clone();
                    exp[i] -= 2;
                    out.add_term(exp, c * rat_int((e[i] as i64) * (e[i] as i64 - 1)));
                }
            }
        }
        out
    }

    pub fn is_harmonic(&self) -> bool {
        self.laplacian().is_zero()
    }

    /// Splits into homogeneous parts, ascending by degree; zero parts are
    /// omitted. Summing the parts reassembles the polynomial.
    pub fn homogeneous_parts(&self) -> Vec<(usize, Poly)> {
        let mut parts: BTreeMap<usize, Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let d: usize = e.iter().map(|&x| x as usize).sum();
            parts
                .entry(d)
                .or_insert_with(|| Poly::zero(self.dim))
                .add_term(e.clone(), c.clone());
        }
        parts.into_iter().collect()
    }

    /// Degree if homogeneous (zero polynomial is homogeneous of every
    /// degree; reported as `Some(0)` here), else `None`.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut deg = None;
        for e in self.terms.keys() {
            let d: usize = e.iter().map(|&x| x as usize).sum();
            match deg {
                None => deg = Some(d),
                Some(prev) if prev != d => return None,
                _ => {}
            }
        }
        Some(deg.unwrap_or(0))
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64, Error> {
        if x.len() != self.dim {
            return Err(Error::invalid(format!(
                "point of dimension {} for polynomial of dimension {}",
                x.len(),
                self.dim
            )));
        }
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut m = rat_to_f64(c);
            for (xi, &ei) in x.iter().zip(e) {
                m *= xi.powi(ei as i32);
            }
            acc += m;
        }
        Ok(acc)
    }

    pub fn evaluate_rational(&self, x: &[Rat]) -> Result<Rat, Error> {
        if x.len() != self.dim {
            return Err(Error::invalid("point/polynomial dimension mismatch"));
        }
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (xi, &ei) in x.iter().zip(e) {
                for _ in 0..ei {
                    m *= xi;
                }
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Restriction `x_i := 0`.
    fn restrict_zero(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                out.add_term(e.clone(), c.clone());
            }
        }
        out
    }

    /// Minimal exponent of `x_i` over all terms (the exact power of `x_i`
    /// dividing the polynomial). `None` for the zero polynomial.
    fn min_exponent(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[i]).min()
    }

    /// Divides out `x_i^k`; caller guarantees divisibility.
    fn shift_down(&self, i: usize, k: u32) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (e, c) in &self.terms {
            debug_assert!(e[i] >= k);
            let mut exp = e.clone();
            exp[i] -= k;
            out.terms.insert(exp, c.clone());
        }
        out
    }

    /// Coefficients of the restriction to the `(i, j)` coordinate plane,
    /// read as a univariate polynomial `p(t)` with `t = x_i`, `x_j = 1`.
    /// Caller guarantees the restriction only involves `x_i` and `x_j`.
    fn plane_univariate(&self, i: usize, j: usize) -> UniPoly {
        let mut coeffs: Vec<Rat> = Vec::new();
        for (e, c) in &self.terms {
            let k = e[i] as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Rat::zero());
            }
            let _ = j;
            coeffs[k] += c;
        }
        UniPoly::new(coeffs)
    }

    /// Divides by a linear form monic in variable `lead` (coefficient of
    /// `x_lead` equal to one). Returns the quotient when the remainder is
    /// exactly zero.
    fn div_monic_linear(&self, form: &LinearForm, lead: usize) -> Option<Poly> {
        debug_assert!(form.coeffs[lead].is_one());
        // Synthetic division in x_lead: with A = x_lead - r where
        // r = -(A - x_lead), h = sum H_k x_lead^k divides as
        // q = H_n x^{n-1} + (H_{n-1} + r H_n) x^{n-2} + ...,
        // remainder H_0 + r(H_1 + r(...)).
        let mut r = Poly::zero(self.dim);
        for (k, c) in form.coeffs.iter().enumerate() {
            if k != lead && !c.is_zero() {
                let mut exp = vec![0; self.dim];
                exp[k] = 1;
                r.add_term(exp, -c.clone());
            }
        }
        let n = self.terms.keys().map(|e| e[lead]).max().unwrap_or(0) as usize;
        let mut by_deg: Vec<Poly> = vec![Poly::zero(self.dim); n + 1];
        for (e, c) in &self.terms {
            let k = e[lead] as usize;
            let mut exp = e.clone();
            exp[lead] = 0;
            by_deg[k].add_term(exp, c.clone());
        }
        let mut quotient_parts: Vec<Poly> = vec![Poly::zero(self.dim); n.max(1)];
        let mut carry = Poly::zero(self.dim);
        for k in (1..=n).rev() {
            carry = by_deg[k].add(&carry.mul(&r));
            quotient_parts[k - 1] = carry.clone();
        }
        let remainder = by_deg[0].add(&carry.mul(&r));
        if !remainder.is_zero() {
            return None;
        }
        let mut q = Poly::zero(self.dim);
        for (k, part) in quotient_parts.iter().enumerate() {
            for (e, c) in &part.terms {
                let mut exp = e.clone();
                exp[lead] += k as u32;
                q.add_term(exp, c.clone());
            }
        }
        Some(q)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    write!(f, "*x{}^{}", i + 1, k)?;
                }
            }
        }
        Ok(())
    }
}

/// A nonzero linear form `a_1 x_1 + ... + a_d x_d`, normalized so the first
/// nonzero coefficient equals one.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinearForm {
    dim: usize,
    coeffs: Vec<Rat>,
}

impl LinearForm {
    /// Normalizes by the first nonzero coefficient; `None` when all zero.
    pub fn normalized(coeffs: Vec<Rat>) -> Option<LinearForm> {
        let lead = coeffs.iter().find(|c| !c.is_zero())?.clone();
        let dim = coeffs.len();
        let coeffs = coeffs.into_iter().map(|c| c / &lead).collect();
        Some(LinearForm { dim, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn as_poly(&self) -> Poly {
        let mut p = Poly::zero(self.dim);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut exp = vec![0; self.dim];
                exp[i] = 1;
                p.add_term(exp, c.clone());
            }
        }
        p
    }

    fn lead_index(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap()
    }
}

impl fmt::Debug for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearForm{:?}", self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>())
    }
}

/// Decides whether the square of a nonzero linear form divides `h`, and if
/// so returns the lexicographically smallest normalized such form.
///
/// `h` must be nonzero and homogeneous in dimension at most three. The
/// search is exact: candidate forms are read off double roots of the
/// restrictions of `h` to coordinate planes, then each candidate is verified
/// by two exact divisions.
pub fn divisible_by_square_linear(h: &Poly) -> Result<Option<LinearForm>, Error> {
    if h.is_zero() {
        return Err(Error::PolyDomain(
            "square-linear-factor query on the zero polynomial".into(),
        ));
    }
    if h.homogeneous_degree().is_none() {
        return Err(Error::PolyDomain(
            "square-linear-factor query on an inhomogeneous polynomial".into(),
        ));
    }
    let dim = h.dim();
    if dim == 0 || dim > 3 {
        return Err(Error::invalid(format!(
            "square-linear factors supported in dimensions 1..=3, got {}",
            dim
        )));
    }
    if h.degree().unwrap() < 2 {
        return Ok(None);
    }

    let mut candidates: Vec<LinearForm> = Vec::new();
    let axis = |i: usize| {
        let mut c = vec![Rat::zero(); dim];
        c[i] = Rat::one();
        LinearForm::normalized(c).unwrap()
    };

    // Axis factors, and the axis-free cofactor for plane restrictions.
    let mut stripped = h.clone();
    for i in 0..dim {
        let e = stripped.min_exponent(i).unwrap_or(0);
        if e > 0 {
            stripped = stripped.shift_down(i, e);
        }
        if h.min_exponent(i).unwrap_or(0) >= 2 {
            candidates.push(axis(i));
        }
    }

    if stripped.degree().unwrap_or(0) >= 2 {
        match dim {
            1 => {}
            2 => {
                for beta in double_root_offsets(&stripped.plane_univariate(0, 1)) {
                    candidates.push(
                        LinearForm::normalized(vec![Rat::one(), beta]).unwrap(),
                    );
                }
            }
            3 => {
                // No axis divides `stripped`, so each coordinate-plane
                // restriction is a nonzero binary form and every square
                // linear divisor restricts to a square divisor of it.
                let h12 = stripped.restrict_zero(2); // x3 := 0, vars (x1, x2)
                let h13 = stripped.restrict_zero(1); // x2 := 0, vars (x1, x3)
                let h23 = stripped.restrict_zero(0); // x1 := 0, vars (x2, x3)
                let betas = double_root_offsets(&h12.plane_univariate(0, 1));
                let gammas = double_root_offsets(&h13.plane_univariate(0, 2));
                for b in &betas {
                    for g in &gammas {
                        candidates.push(
                            LinearForm::normalized(vec![Rat::one(), b.clone(), g.clone()])
                                .unwrap(),
                        );
                    }
                }
                for g in double_root_offsets(&h23.plane_univariate(1, 2)) {
                    candidates.push(
                        LinearForm::normalized(vec![Rat::zero(), Rat::one(), g]).unwrap(),
                    );
                }
            }
            _ => unreachable!(),
        }
    }

    candidates.sort();
    candidates.dedup();
    for form in candidates {
        let lead = form.lead_index();
        if let Some(q) = h.div_monic_linear(&form, lead) {
            if q.div_monic_linear(&form, lead).is_some() {
                return Ok(Some(form));
            }
        }
    }
    Ok(None)
}

/// Offsets `beta` such that `(t + beta)^2` may divide `p(t)`: the rational
/// roots of `gcd(p, p')`, negated.
fn double_root_offsets(p: &UniPoly) -> Vec<Rat> {
    if p.degree().map_or(true, |d| d < 2) {
        return Vec::new();
    }
    let g = UniPoly::gcd(p, &p.derivative());
    rational_roots(&g).into_iter().map(|r| -r).collect()
}

/// Basis of the solid (harmonic homogeneous) polynomials of the given
/// degree.
///
/// Dimension 2 returns the real and imaginary parts of `(x1 + i x2)^n`;
/// dimension 3 returns an exact kernel basis of the Laplacian on the
/// monomials of degree `n`, of size `2n + 1`.
pub fn solid_harmonic_basis(dim: usize, degree: usize) -> Result<Vec<Poly>, Error> {
    match dim {
        2 => {
            if degree == 0 {
                return Ok(vec![Poly::one(2)]);
            }
            let (re, im) = complex_power_parts(degree as u32);
            Ok(vec![re, im])
        }
        3 => {
            if degree == 0 {
                return Ok(vec![Poly::one(3)]);
            }
            let monos = monomials_of_degree(3, degree);
            let targets = if degree >= 2 {
                monomials_of_degree(3, degree - 2)
            } else {
                Vec::new()
            };
            let index: BTreeMap<Vec<u32>, usize> = targets
                .iter()
                .cloned()
                .enumerate()
                .map(|(i, e)| (e, i))
                .collect();
            let mut rows = vec![vec![Rat::zero(); monos.len()]; targets.len()];
            for (col, e) in monos.iter().enumerate() {
                for i in 0..3 {
                    if e[i] >= 2 {
                        let mut t = e.clone();
                        t[i] -= 2;
                        let row = index[&t];
                        rows[row][col] += rat_int((e[i] as i64) * (e[i] as i64 - 1));
                    }
                }
            }
            let kernel = kernel_basis(rows, monos.len());
            let mut out = Vec::with_capacity(kernel.len());
            for v in kernel {
                let mut p = Poly::zero(3);
                for (c, e) in v.into_iter().zip(&monos) {
                    p.add_term(e.clone(), c);
                }
                out.push(p);
            }
            Ok(out)
        }
        d => Err(Error::invalid(format!(
            "solid harmonic basis supported in dimensions 2 and 3, got {}",
            d
        ))),
    }
}

fn monomials_of_degree(dim: usize, degree: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut exp = vec![0u32; dim];
    fn rec(out: &mut Vec<Vec<u32>>, exp: &mut Vec<u32>, pos: usize, left: usize) {
        if pos + 1 == exp.len() {
            exp[pos] = left as u32;
            out.push(exp.clone());
            return;
        }
        for k in 0..=left {
            exp[pos] = k as u32;
            rec(out, exp, pos + 1, left - k);
        }
    }
    rec(&mut out, &mut exp, 0, degree);
    out.sort();
    out
}

/// Real and imaginary parts of `(x1 + i x2)^n` as exact polynomials.
fn complex_power_parts(n: u32) -> (Poly, Poly) {
    let mut re = Poly::zero(2);
    let mut im = Poly::zero(2);
    let mut binom = Rat::one();
    for k in 0..=n {
        let exp = vec![n - k, k];
        match k % 4 {
            0 => re.add_term(exp, binom.clone()),
            1 => im.add_term(exp, binom.clone()),
            2 => re.add_term(exp, -binom.clone()),
            3 => im.add_term(exp, -binom.clone()),
            _ => unreachable!(),
        }
        binom = binom * rat_int((n - k) as i64) / rat_int(k as i64 + 1);
    }
    (re, im)
}

/// An angle expressed as the rational multiple `num/den` of a half-turn
/// (i.e. the angle is `num/den * pi`). Sine and cosine are produced exactly
/// when both are rational, which happens precisely at multiples of `pi/2`;
/// otherwise double-precision values are used and flagged.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PiFraction {
    pub num: i64,
    pub den: i64,
}

impl PiFraction {
    pub fn new(num: i64, den: i64) -> Result<Self, Error> {
        if den == 0 {
            return Err(Error::invalid("angle denominator must be nonzero"));
        }
        Ok(PiFraction { num, den })
    }

    pub fn zero() -> Self {
        PiFraction { num: 0, den: 1 }
    }

    /// `(cos, sin, exact)` of the angle `num/den * pi`.
    pub fn cos_sin(&self) -> (Rat, Rat, bool) {
        let (num, den) = if self.den < 0 {
            (-self.num, -self.den)
        } else {
            (self.num, self.den)
        };
        if (2 * num) % den == 0 {
            let k = ((2 * num / den) % 4 + 4) % 4;
            let (c, s) = match k {
                0 => (1, 0),
                1 => (0, 1),
                2 => (-1, 0),
                _ => (0, -1),
            };
            return (rat_int(c), rat_int(s), true);
        }
        let theta = (num as f64) / (den as f64) * std::f64::consts::PI;
        let c = Rat::from_float(theta.cos()).unwrap();
        let s = Rat::from_float(theta.sin()).unwrap();
        (c, s, false)
    }
}

/// The degree-`n` polynomial whose zero set is the system of `n` concurrent
/// lines at angular step `pi/n`, rotated by `phi`: the imaginary part of
/// `e^{i phi} (x1 + i x2)^n`.
///
/// Coefficients are exact when `phi` is a multiple of `pi/2` (see
/// [`PiFraction::cos_sin`]); otherwise they are double-precision values
/// carried as rationals.
pub fn coxeter_poly(n: u32, phi: PiFraction) -> Result<Poly, Error> {
    if n == 0 {
        return Err(Error::invalid("line-system polynomial requires n >= 1"));
    }
    let (c, s, _exact) = phi.cos_sin();
    let (re, im) = complex_power_parts(n);
    Ok(im.scale(&c).add(&re.scale(&s)))
}

// ---------------------------------------------------------------------------
// Exact linear algebra: kernel of a rational matrix.
// ---------------------------------------------------------------------------

/// Basis of the null space of the matrix given by `rows` (each of length
/// `ncols`), via fraction-free-enough Gaussian elimination over Q.
pub(crate) fn kernel_basis(mut rows: Vec<Vec<Rat>>, ncols: usize) -> Vec<Vec<Rat>> {
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(pr) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = rows[rank][col].clone();
        for c in col..ncols {
            let v = rows[rank][c].clone() / &inv;
            rows[rank][c] = v;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in col..ncols {
                    let delta = &rows[rank][c] * &factor;
                    rows[r][c] -= delta;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; ncols];
        for &c in &pivot_cols {
            v[c] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..ncols {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![Rat::zero(); ncols];
        v[free] = Rat::one();
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -rows[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

// ---------------------------------------------------------------------------
// Exact univariate polynomials: gcd, Sturm chains, complete rational roots.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub(crate) struct UniPoly {
    /// Coefficients, constant term first; no trailing zeros.
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub(crate) fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    fn leading(&self) -> &Rat {
        self.coeffs.last().unwrap()
    }

    fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::new(vec![]);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * rat_int(i as i64))
            .collect();
        UniPoly::new(coeffs)
    }

    fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        let lead = self.leading().clone();
        UniPoly::new(self.coeffs.iter().map(|c| c / &lead).collect())
    }

    /// Remainder of `self` divided by `d` (nonzero).
    fn rem(&self, d: &UniPoly) -> UniPoly {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.coeffs.clone();
        while r.len() > dd {
            let k = r.len() - 1;
            let factor = r[k].clone() / d.leading();
            if !factor.is_zero() {
                for (i, c) in d.coeffs.iter().enumerate() {
                    let idx = k - dd + i;
                    let delta = c * &factor;
                    r[idx] -= delta;
                }
            }
            r.pop();
        }
        UniPoly::new(r)
    }

    /// Exact quotient; caller guarantees divisibility.
    fn div_exact(&self, d: &UniPoly) -> UniPoly {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.coeffs.clone();
        let mut q = vec![Rat::zero(); r.len().saturating_sub(dd)];
        while r.len() > dd {
            let k = r.len() - 1;
            let factor = r[k].clone() / d.leading();
            q[k - dd] = factor.clone();
            for (i, c) in d.coeffs.iter().enumerate() {
                let idx = k - dd + i;
                let delta = c * &factor;
                r[idx] -= delta;
            }
            r.pop();
        }
        debug_assert!(UniPoly::new(r).is_zero());
        UniPoly::new(q)
    }

    pub(crate) fn gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
        let mut a = a.monic();
        let mut b = b.monic();
        while !b.is_zero() {
            let r = a.rem(&b).monic();
            a = b;
            b = r;
        }
        a
    }
}

/// All rational roots of `p`, exactly and completely.
///
/// Real roots of the squarefree part are isolated with a Sturm chain, each
/// isolating interval is bisected below `1 / (2 lc^2)` (`lc` the leading
/// coefficient of the primitive integer model, which bounds every rational
/// root's denominator), and the unique candidate with small denominator is
/// reconstructed from continued-fraction convergents and verified exactly.
pub(crate) fn rational_roots(p: &UniPoly) -> Vec<Rat> {
    let Some(deg) = p.degree() else {
        return Vec::new();
    };
    if deg == 0 {
        return Vec::new();
    }

    let mut roots: Vec<Rat> = Vec::new();
    let mut coeffs = p.coeffs.clone();
    // Strip the root at zero.
    let mut shift = 0usize;
    while coeffs.first().map_or(false, |c| c.is_zero()) {
        coeffs.remove(0);
        shift += 1;
    }
    if shift > 0 {
        roots.push(Rat::zero());
    }
    let p = UniPoly::new(coeffs);
    let Some(deg) = p.degree() else {
        return roots;
    };
    if deg == 0 {
        return roots;
    }
    if deg == 1 {
        roots.push(-p.coeffs[0].clone() / &p.coeffs[1]);
        return roots;
    }

    // Squarefree part with simple real roots.
    let g = UniPoly::gcd(&p, &p.derivative());
    let s = if g.degree().unwrap_or(0) > 0 {
        p.div_exact(&g).monic()
    } else {
        p.monic()
    };
    let Some(sdeg) = s.degree() else {
        return roots;
    };
    if sdeg == 0 {
        return roots;
    }
    if sdeg == 1 {
        let r = -s.coeffs[0].clone() / &s.coeffs[1];
        if p.eval(&r).is_zero() {
            roots.push(r);
        }
        return roots;
    }

    // Primitive integer model: denominators of rational roots divide `lc`.
    let den_lcm = s
        .coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| num::integer::lcm(acc, c.denom().clone()));
    let int_coeffs: Vec<BigInt> = s
        .coeffs
        .iter()
        .map(|c| c.numer() * (&den_lcm / c.denom()))
        .collect();
    let content = int_coeffs
        .iter()
        .fold(BigInt::zero(), |acc, c| num::integer::gcd(acc, c.abs()));
    let lc = (int_coeffs.last().unwrap() / &content).abs();
    let denom_bound = lc.clone();
    let width_target = Rat::new(BigInt::one(), BigInt::from(2) * &denom_bound * &denom_bound);

    // Sturm chain of the squarefree part.
    let mut chain = vec![s.clone(), s.derivative()];
    loop {
        let n = chain.len();
        let r = chain[n - 2].rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(UniPoly::new(r.coeffs.iter().map(|c| -c.clone()).collect()));
    }
    let variations = |x: &Rat| -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for q in &chain {
            let v = q.eval(x);
            let sgn = if v.is_zero() {
                continue;
            } else if v.is_positive() {
                1i8
            } else {
                -1i8
            };
            if last != 0 && sgn != last {
                count += 1;
            }
            last = sgn;
        }
        count
    };

    // Cauchy bound on root magnitude.
    let lead = s.leading().clone();
    let mut maxratio = Rat::zero();
    for c in &s.coeffs[..sdeg] {
        let r = (c / &lead).abs();
        if r > maxratio {
            maxratio = r;
        }
    }
    let bound = maxratio + rat_int(2);

    let mut stack = vec![(-bound.clone(), bound.clone())];
    while let Some((a, b)) = stack.pop() {
        let count = variations(&a).saturating_sub(variations(&b));
        if count == 0 {
            continue;
        }
        let mid = (&a + &b) / rat_int(2);
        if count > 1 {
            if s.eval(&mid).is_zero() {
                // Split just off the root so both halves are clean.
                if s.eval(&mid).is_zero() && p.eval(&mid).is_zero() {
                    roots.push(mid.clone());
                }
                let eps = (&b - &a) / rat_int(1 << 20);
                stack.push((a, &mid - &eps));
                stack.push((&mid + &eps, b));
            } else {
                stack.push((a, mid.clone()));
                stack.push((mid, b));
            }
            continue;
        }
        // Exactly one simple root in (a, b): bisect by sign change.
        let (mut lo, mut hi) = (a, b);
        let mut slo = s.eval(&lo);
        loop {
            if (&hi - &lo) < width_target {
                break;
            }
            let mid = (&lo + &hi) / rat_int(2);
            let smid = s.eval(&mid);
            if smid.is_zero() {
                lo = mid.clone();
                hi = mid;
                break;
            }
            if (smid.is_positive() && slo.is_positive())
                || (smid.is_negative() && slo.is_negative())
            {
                lo = mid;
                slo = smid;
            } else {
                hi = mid;
            }
        }
        let mid = (&lo + &hi) / rat_int(2);
        for cand in convergents_with_denominator_bound(&mid, &denom_bound) {
            if s.eval(&cand).is_zero() {
                roots.push(cand);
                break;
            }
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

/// Continued-fraction convergents of `x` whose denominator is at most
/// `bound`, candidates for a nearby rational with small denominator.
fn convergents_with_denominator_bound(x: &Rat, bound: &BigInt) -> Vec<Rat> {
    let mut out = Vec::new();
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    let (mut h0, mut h1) = (BigInt::one(), Euclid::div_euclid(&num, &den));
    let (mut k0, mut k1) = (BigInt::zero(), BigInt::one());
    let mut rem = &num - &h1 * &den;
    out.push(Rat::new(h1.clone(), k1.clone()));
    while !rem.is_zero() {
        num = den;
        den = rem;
        let a = Euclid::div_euclid(&num, &den);
        rem = &num - &a * &den;
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if &k2 > bound {
            break;
        }
        out.push(Rat::new(h2.clone(), k2.clone()));
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p_r2(dim: usize) -> Poly {
        // x1^2 + ... + xd^2
        let mut p = Poly::zero(dim);
        for i in 0..dim {
            p = p.add(&Poly::var(dim, i).pow(2));
        }
        p
    }

    #[test]
    fn laplacian_of_radius_squared() {
        for dim in 1..=3 {
            let lap = p_r2(dim).laplacian();
            assert_eq!(lap, Poly::constant(dim, rat_int(2 * dim as i64)));
        }
    }

    #[test]
    fn laplacian_examples() {
        let x1 = Poly::var(3, 0);
        let x2 = Poly::var(3, 1);
        assert!(x1.mul(&x2).laplacian().is_zero());
        // Laplacian of x1^4 is 12 x1^2.
        assert_eq!(
            x1.pow(4).laplacian(),
            x1.pow(2).scale(&rat_int(12))
        );
    }

    #[test]
    fn homogeneous_parts_reassemble() {
        let x1 = Poly::var(3, 0);
        let x2 = Poly::var(3, 1);
        let x3 = Poly::var(3, 2);
        // x3^2 - x2 x1^2 + 7
        let p = x3
            .pow(2)
            .sub(&x2.mul(&x1.pow(2)))
            .add(&Poly::constant(3, rat_int(7)));
        let parts = p.homogeneous_parts();
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[0].0, 0);
        assert_eq!(parts[1].0, 2);
        assert_eq!(parts[2].0, 3);
        let mut sum = Poly::zero(3);
        for (_, q) in &parts {
            assert_eq!(q.homogeneous_degree().is_some(), true);
            sum = sum.add(q);
        }
        assert_eq!(sum, p);
    }

    #[test]
    fn harmonicity() {
        let x1 = Poly::var(3, 0);
        let x2 = Poly::var(3, 1);
        assert!(x1.mul(&x2).is_harmonic());
        assert!(!p_r2(3).is_harmonic());
        // x1^2 - x2^2 in dimension 2.
        let q = Poly::var(2, 0).pow(2).sub(&Poly::var(2, 1).pow(2));
        assert!(q.is_harmonic());
    }

    #[test]
    fn coxeter_poly_small_orders() {
        let x1 = Poly::var(2, 0);
        let x2 = Poly::var(2, 1);
        assert_eq!(coxeter_poly(1, PiFraction::zero()).unwrap(), x2);
        assert_eq!(
            coxeter_poly(2, PiFraction::zero()).unwrap(),
            x1.mul(&x2).scale(&rat_int(2))
        );
        let expect3 = x1.pow(2).mul(&x2).scale(&rat_int(3)).sub(&x2.pow(3));
        assert_eq!(coxeter_poly(3, PiFraction::zero()).unwrap(), expect3);
    }

    #[test]
    fn coxeter_poly_vanishes_on_its_lines() {
        for n in 1..=8u32 {
            let p = coxeter_poly(n, PiFraction::zero()).unwrap();
            for k in 0..n {
                let theta = (k as f64) * std::f64::consts::PI / (n as f64);
                for r in [0.3, 1.0, 2.7] {
                    let v = p.evaluate(&[r * theta.cos(), r * theta.sin()]).unwrap();
                    let scale = (1.0 + r).powi(n as i32);
                    assert!(v.abs() < 1e-12 * scale, "n={} k={} v={}", n, k, v);
                }
            }
        }
    }

    #[test]
    fn coxeter_poly_rotation_exactness_flag() {
        let (_, _, exact) = PiFraction::new(1, 2).unwrap().cos_sin();
        assert!(exact);
        let (_, _, exact) = PiFraction::new(1, 3).unwrap().cos_sin();
        assert!(!exact);
        // Quarter-turn rotation of the two-line system is exact:
        // Im(e^{i pi/2} z^2) = Re(z^2) = x1^2 - x2^2.
        let p = coxeter_poly(2, PiFraction::new(1, 2).unwrap()).unwrap();
        let expect = Poly::var(2, 0).pow(2).sub(&Poly::var(2, 1).pow(2));
        assert_eq!(p, expect);
    }

    #[test]
    fn square_linear_factor_axis() {
        let x1 = Poly::var(3, 0);
        let x2 = Poly::var(3, 1);
        let x3 = Poly::var(3, 2);
        // x3^2 and x3^2 (x1 + x2) are divisible by x3 squared.
        let f = divisible_by_square_linear(&x3.pow(2)).unwrap().unwrap();
        assert_eq!(f.coeffs(), &[rat_int(0), rat_int(0), rat_int(1)]);
        let g = x3.pow(2).mul(&x1.add(&x2));
        let f = divisible_by_square_linear(&g).unwrap().unwrap();
        assert_eq!(f.coeffs(), &[rat_int(0), rat_int(0), rat_int(1)]);
        // x1 x2 has no square linear factor.
        assert!(divisible_by_square_linear(&x1.mul(&x2)).unwrap().is_none());
    }

    #[test]
    fn square_linear_factor_mixed() {
        let x1 = Poly::var(3, 0);
        let x2 = Poly::var(3, 1);
        let x3 = Poly::var(3, 2);
        // (x1 - 2 x2 + x3/3)^2 * (x1 + x2 + x3)
        let a = x1
            .sub(&x2.scale(&rat_int(2)))
            .add(&x3.scale(&rat(1, 3)));
        let g = x1.add(&x2).add(&x3);
        let h = a.pow(2).mul(&g);
        let f = divisible_by_square_linear(&h).unwrap().unwrap();
        assert_eq!(f.coeffs(), &[rat_int(1), rat_int(-2), rat(1, 3)]);
    }

    #[test]
    fn square_linear_factor_picks_lexicographically_smallest() {
        let x1 = Poly::var(2, 0);
        let x2 = Poly::var(2, 1);
        // (x1 + x2)^2 (x1 - x2)^2: both (1, -1) and (1, 1) work; (1, -1) wins.
        let h = x1.add(&x2).pow(2).mul(&x1.sub(&x2).pow(2));
        let f = divisible_by_square_linear(&h).unwrap().unwrap();
        assert_eq!(f.coeffs(), &[rat_int(1), rat_int(-1)]);
    }

    #[test]
    fn square_linear_factor_rejects_bad_inputs() {
        assert!(matches!(
            divisible_by_square_linear(&Poly::zero(3)),
            Err(Error::PolyDomain(_))
        ));
        let inhom = Poly::var(3, 0).add(&Poly::one(3));
        assert!(matches!(
            divisible_by_square_linear(&inhom),
            Err(Error::PolyDomain(_))
        ));
    }

    #[test]
    fn square_linear_factor_no_lead_variable() {
        let x2 = Poly::var(3, 1);
        let x3 = Poly::var(3, 2);
        let x1 = Poly::var(3, 0);
        // (x2 - 5 x3)^2 * x1
        let h = x2.sub(&x3.scale(&rat_int(5))).pow(2).mul(&x1);
        let f = divisible_by_square_linear(&h).unwrap().unwrap();
        assert_eq!(f.coeffs(), &[rat_int(0), rat_int(1), rat_int(-5)]);
    }

    #[test]
    fn solid_harmonics_counts_and_harmonicity() {
        for n in 0..=6 {
            let basis = solid_harmonic_basis(3, n).unwrap();
            assert_eq!(basis.len(), 2 * n + 1);
            for b in &basis {
                assert!(b.is_harmonic());
                assert_eq!(b.homogeneous_degree(), Some(n));
            }
        }
        for n in 1..=6 {
            let basis = solid_harmonic_basis(2, n).unwrap();
            assert_eq!(basis.len(), 2);
            for b in &basis {
                assert!(b.is_harmonic());
            }
        }
    }

    #[test]
    fn evaluate_matches_rational() {
        let p = Poly::var(3, 0)
            .pow(3)
            .sub(&Poly::var(3, 1).mul(&Poly::var(3, 2)).scale(&rat(7, 2)));
        let xf = [1.5, -2.0, 0.25];
        let xr = [rat(3, 2), rat_int(-2), rat(1, 4)];
        let vf = p.evaluate(&xf).unwrap();
        let vr = rat_to_f64(&p.evaluate_rational(&xr).unwrap());
        assert!((vf - vr).abs() < 1e-12);
    }

    #[test]
    fn evaluate_rejects_dimension_mismatch() {
        let p = p_r2(3);
        assert!(p.evaluate(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn rational_roots_complete() {
        // (t - 3)(t + 1/2)^2 (t^2 + 1)
        let r3 = UniPoly::new(vec![rat_int(-3), rat_int(1)]);
        let half = UniPoly::new(vec![rat(1, 2), rat_int(1)]);
        let quad = UniPoly::new(vec![rat_int(1), rat_int(0), rat_int(1)]);
        let mut prod = UniPoly::new(vec![rat_int(1)]);
        for f in [&r3, &half, &half, &quad] {
            let mut coeffs = vec![Rat::zero(); prod.coeffs.len() + f.coeffs.len() - 1];
            for (i, a) in prod.coeffs.iter().enumerate() {
                for (j, b) in f.coeffs.iter().enumerate() {
                    coeffs[i + j] += a * b;
                }
            }
            prod = UniPoly::new(coeffs);
        }
        let roots = rational_roots(&prod);
        assert_eq!(roots, vec![rat(-1, 2), rat_int(3)]);
    }

    #[test]
    fn kernel_basis_dimensions() {
        // x + y + z = 0 has a 2-dimensional kernel.
        let rows = vec![vec![rat_int(1), rat_int(1), rat_int(1)]];
        let basis = kernel_basis(rows, 3);
        assert_eq!(basis.len(), 2);
    }
}
