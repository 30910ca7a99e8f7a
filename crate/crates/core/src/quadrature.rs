//! Simplex and interval quadrature.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};

/// A cubature rule on the standard simplex `{t_i >= 0, sum t_i = 1}`,
/// nodes in barycentric coordinates, weights summing to `1/n!`
/// (the Lebesgue volume in the coordinates `t_1..t_n`).
#[derive(Clone, Debug)]
pub struct SimplexRule {
    dim: usize,
    exact_degree: usize,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

fn factorial(k: usize) -> f64 {
    (2..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// All compositions of `total` into `parts` nonnegative integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl SimplexRule {
    /// Grundmann-Moller rule of index `s`, exact for polynomials of total degree `2s + 1`.
    pub fn grundmann_moller(dim: usize, s: usize) -> Self {
        let n = dim as i64;
        let d = (2 * s + 1) as i64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for i in 0..=s {
            let denom = (d + n - 2 * i as i64) as f64;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let w = sign * 2f64.powi(-2 * s as i32) * denom.powi(d as i32)
                / (factorial(i) * factorial((d + n) as usize - i));
            for beta in compositions(s - i, dim + 1) {
                nodes.push(beta.iter().map(|&b| (2 * b + 1) as f64 / denom).collect());
                weights.push(w);
            }
        }
        Self { dim, exact_degree: 2 * s + 1, nodes, weights }
    }

    /// Smallest Grundmann-Moller rule exact to `degree`.
    pub fn exact_to(dim: usize, degree: usize) -> Self {
        Self::grundmann_moller(dim, degree / 2)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exact_degree(&self) -> usize {
        self.exact_degree
    }

    pub fn require(&self, degree: usize) -> Result<()> {
        if degree > self.exact_degree {
            return Err(Error::QuadratureOrder { exact: self.exact_degree, needed: degree });
        }
        Ok(())
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.nodes.iter().map(|n| n.as_slice()).zip(self.weights.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `int_{Delta^n} prod t_i^{a_i} dt = prod a_i! / (n + |a|)!` for exponents on all
/// `n + 1` barycentric coordinates.
pub fn simplex_monomial_integral(exponents: &[usize]) -> f64 {
    let n = exponents.len() - 1;
    let total: usize = exponents.iter().sum();
    exponents.iter().map(|&a| factorial(a)).product::<f64>() / factorial(n + total)
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let m = order.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 1..order {
                let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = order as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[order - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[order - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// Settings for [`integrate_unit_interval`].
#[derive(Clone, Copy, Debug)]
pub struct IntervalQuadrature {
    pub initial_order: usize,
    pub max_order: usize,
    pub tolerance: f64,
}

impl Default for IntervalQuadrature {
    fn default() -> Self {
        Self { initial_order: 16, max_order: 512, tolerance: 1e-13 }
    }
}

/// Integrates a smooth function on `[0, 1]` by Gauss-Legendre with order
/// doubling until two successive estimates agree.
pub fn integrate_unit_interval<T, F>(cfg: &IntervalQuadrature, mut f: F) -> Result<T>
where
    T: Clone + core::ops::Add<Output = T> + core::ops::Sub<Output = T> + core::ops::Mul<f64, Output = T> + Magnitude,
    F: FnMut(f64) -> Result<T>,
{
    let mut estimate = |order: usize| -> Result<T> {
        let (x, w) = gauss_legendre(order);
        let mut acc: Option<T> = None;
        for (xi, wi) in x.iter().zip(&w) {
            let v = f(*xi)? * *wi;
            acc = Some(match acc {
                None => v,
                Some(a) => a + v,
            });
        }
        Ok(acc.expect("order >= 1"))
    };
    let mut order = cfg.initial_order.max(1);
    let mut prev = estimate(order)?;
    loop {
        order *= 2;
        let next = estimate(order)?;
        let change = (next.clone() - prev.clone()).magnitude();
        if change <= cfg.tolerance * (1.0 + next.magnitude()) {
            return Ok(next);
        }
        if order >= cfg.max_order {
            return Err(Error::QuadratureNonConvergence { change });
        }
        prev = next;
    }
}

/// Size measure used for convergence tests.
pub trait Magnitude {
    fn magnitude(&self) -> f64;
}

impl Magnitude for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Magnitude for num_complex::Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}
