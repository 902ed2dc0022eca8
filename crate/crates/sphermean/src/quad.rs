//! Quadrature rules on the unit circle and the unit sphere.
//!
//! Rules integrate against the *normalized* area measure: weights sum to
//! one, so integrating the constant function returns exactly one.

use crate::error::Error;
use crate::vec3::Vec3;

/// Nodes and weights for the normalized surface measure on the unit sphere
/// of the given ambient dimension (2 or 3). Nodes are unit vectors; in
/// dimension 2 the third coordinate is zero.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    dim: usize,
    nodes: Vec<Vec3>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec3, &f64)> {
        self.nodes.iter().zip(self.weights.iter())
    }
}

/// Builds the product rule of the given order.
///
/// Dimension 2: `order` equally spaced nodes on the circle with uniform
/// weights. Dimension 3: Gauss-Legendre in the polar cosine with `order`
/// nodes, times `2 * order` equally spaced azimuthal nodes.
pub fn sphere_rule(dim: usize, order: usize) -> Result<QuadratureRule, Error> {
    if order == 0 {
        return Err(Error::invalid("quadrature order must be positive"));
    }
    match dim {
        2 => {
            let mut nodes = Vec::with_capacity(order);
            let w = 1.0 / order as f64;
            for k in 0..order {
                let phi = 2.0 * std::f64::consts::PI * (k as f64) / (order as f64);
                nodes.push([phi.cos(), phi.sin(), 0.0]);
            }
            Ok(QuadratureRule {
                dim,
                nodes,
                weights: vec![w; order],
            })
        }
        3 => {
            let (mu, wmu) = gauss_legendre(order);
            let m = 2 * order;
            let mut nodes = Vec::with_capacity(order * m);
            let mut weights = Vec::with_capacity(order * m);
            for (mu_i, wmu_i) in mu.iter().zip(&wmu) {
                let s = (1.0 - mu_i * mu_i).max(0.0).sqrt();
                // wmu sums to 2 over [-1,1]; azimuth contributes 1/m.
                let w = wmu_i / 2.0 / m as f64;
                for k in 0..m {
                    let phi = 2.0 * std::f64::consts::PI * (k as f64) / (m as f64);
                    nodes.push([s * phi.cos(), s * phi.sin(), *mu_i]);
                    weights.push(w);
                }
            }
            Ok(QuadratureRule {
                dim,
                nodes,
                weights,
            })
        }
        d => Err(Error::invalid(format!(
            "sphere rules exist for dimensions 2 and 3, got {}",
            d
        ))),
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`; weights sum to 2.
///
/// Nodes are computed by Newton iteration from the Chebyshev initial guess
/// and symmetrized exactly, so the node set is invariant under negation.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence: (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 1..n {
                let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x.abs();
        weights[i] = w;
        nodes[n - 1 - i] = x.abs();
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}
