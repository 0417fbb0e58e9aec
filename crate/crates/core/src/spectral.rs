//! One-dimensional nodal operators on the reference interval [-1, 1].
//!
//! Nodes are Legendre-Gauss or Legendre-Gauss-Lobatto points. Together with
//! the quadrature weights, the Lagrange differentiation matrix and the
//! boundary interpolation vectors they form a diagonal-norm
//! summation-by-parts operator:
//!
//! ```text
//! M D + D^T M = l_plus l_plus^T - l_minus l_minus^T,   M = diag(w)
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::DgError;

const NEWTON_MAX_ITER: usize = 100;
const NEWTON_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeFamily {
    Gauss,
    Lgl,
}

impl NodeFamily {
    pub const ALL: [NodeFamily; 2] = [NodeFamily::Gauss, NodeFamily::Lgl];

    pub fn name(self) -> &'static str {
        match self {
            NodeFamily::Gauss => "gauss",
            NodeFamily::Lgl => "lgl",
        }
    }

    /// Highest polynomial degree integrated exactly by the `n+1`-point rule.
    pub fn exactness_degree(self, n: usize) -> usize {
        match self {
            NodeFamily::Gauss => 2 * n + 1,
            NodeFamily::Lgl => 2 * n - 1,
        }
    }
}

impl fmt::Display for NodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NodeFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gauss" | "lg" | "gl" => Ok(NodeFamily::Gauss),
            "lgl" | "gauss-lobatto" | "lobatto" => Ok(NodeFamily::Lgl),
            other => Err(format!("unknown node family `{other}` (expected gauss or lgl)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

/// Nodes, weights, differentiation matrix and boundary interpolation
/// vectors of degree `degree` for one node family. Immutable once built.
#[derive(Debug, Clone)]
pub struct NodalOperator {
    family: NodeFamily,
    degree: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    bary: Vec<f64>,
    /// Row-major `(N+1) x (N+1)`.
    diff: Vec<f64>,
    l_minus: Vec<f64>,
    l_plus: Vec<f64>,
}

impl NodalOperator {
    pub fn new(family: NodeFamily, degree: usize) -> Result<Self, DgError> {
        if degree < 1 {
            return Err(DgError::InvalidDegree(degree));
        }
        let (nodes, weights) = match family {
            NodeFamily::Gauss => gauss_nodes_and_weights(degree),
            NodeFamily::Lgl => lgl_nodes_and_weights(degree),
        };
        let bary = barycentric_weights(&nodes);
        let diff = differentiation_matrix(&nodes, &bary);
        let (l_minus, l_plus) = match family {
            // Boundary nodes are collocated: the vectors are unit vectors.
            NodeFamily::Lgl => {
                let mut lm = vec![0.0; degree + 1];
                let mut lp = vec![0.0; degree + 1];
                lm[0] = 1.0;
                lp[degree] = 1.0;
                (lm, lp)
            }
            NodeFamily::Gauss => (
                lagrange_values(-1.0, &nodes, &bary),
                lagrange_values(1.0, &nodes, &bary),
            ),
        };
        Ok(NodalOperator {
            family,
            degree,
            nodes,
            weights,
            bary,
            diff,
            l_minus,
            l_plus,
        })
    }

    pub fn family(&self) -> NodeFamily {
        self.family
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of nodes, `N + 1`.
    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn barycentric_weights(&self) -> &[f64] {
        &self.bary
    }

    /// Differentiation matrix, row-major.
    pub fn diff_matrix(&self) -> &[f64] {
        &self.diff
    }

    #[inline]
    pub fn d(&self, i: usize, m: usize) -> f64 {
        self.diff[i * (self.degree + 1) + m]
    }

    pub fn l_minus(&self) -> &[f64] {
        &self.l_minus
    }

    pub fn l_plus(&self) -> &[f64] {
        &self.l_plus
    }

    pub fn boundary_vector(&self, side: Side) -> &[f64] {
        match side {
            Side::Minus => &self.l_minus,
            Side::Plus => &self.l_plus,
        }
    }

    pub fn differentiate(&self, values: &[f64]) -> Result<Vec<f64>, DgError> {
        self.check_len(values.len())?;
        let n = self.len();
        Ok((0..n)
            .map(|i| {
                self.diff[i * n..(i + 1) * n]
                    .iter()
                    .zip(values)
                    .map(|(d, v)| d * v)
                    .sum()
            })
            .collect())
    }

    /// Value of the interpolating polynomial at the interval end `side`.
    pub fn interpolate_to_boundary(&self, values: &[f64], side: Side) -> Result<f64, DgError> {
        self.check_len(values.len())?;
        Ok(self
            .boundary_vector(side)
            .iter()
            .zip(values)
            .map(|(l, v)| l * v)
            .sum())
    }

    /// Lagrange basis values at an arbitrary reference coordinate.
    pub fn lagrange_at(&self, x: f64) -> Vec<f64> {
        lagrange_values(x, &self.nodes, &self.bary)
    }

    /// Row-major `(targets.len()) x (N+1)` interpolation matrix.
    pub fn interpolation_matrix(&self, targets: &[f64]) -> Vec<f64> {
        targets.iter().flat_map(|&x| self.lagrange_at(x)).collect()
    }

    fn check_len(&self, got: usize) -> Result<(), DgError> {
        if got != self.len() {
            return Err(DgError::LengthMismatch {
                expected: self.len(),
                got,
            });
        }
        Ok(())
    }
}

/// Legendre polynomial `P_n(x)` and its derivative via the three-term recurrence.
pub fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    match n {
        0 => (1.0, 0.0),
        1 => (x, 1.0),
        _ => {
            let (mut p_prev2, mut p_prev1) = (1.0, x);
            let (mut dp_prev2, mut dp_prev1) = (0.0, 1.0);
            for k in 2..=n {
                let kf = k as f64;
                let p = ((2.0 * kf - 1.0) * x * p_prev1 - (kf - 1.0) * p_prev2) / kf;
                let dp = dp_prev2 + (2.0 * kf - 1.0) * p_prev1;
                p_prev2 = p_prev1;
                p_prev1 = p;
                dp_prev2 = dp_prev1;
                dp_prev1 = dp;
            }
            (p_prev1, dp_prev1)
        }
    }
}

/// `N+1` Legendre-Gauss nodes (roots of `P_{N+1}`) and weights.
pub fn gauss_nodes_and_weights(degree: usize) -> (Vec<f64>, Vec<f64>) {
    let np = degree + 1;
    let mut nodes = vec![0.0; np];
    let mut weights = vec![0.0; np];
    for j in 0..np.div_ceil(2) {
        let mut x = -((2 * j + 1) as f64 * PI / (2 * np) as f64).cos();
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp) = legendre_and_derivative(np, x);
            let dx = -p / dp;
            x += dx;
            if dx.abs() <= NEWTON_TOL * x.abs().max(1.0) {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(np, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[j] = x;
        weights[j] = w;
        nodes[np - 1 - j] = -x;
        weights[np - 1 - j] = w;
    }
    if np % 2 == 1 {
        let (_, dp) = legendre_and_derivative(np, 0.0);
        nodes[np / 2] = 0.0;
        weights[np / 2] = 2.0 / (dp * dp);
    }
    (nodes, weights)
}

/// `N+1` Legendre-Gauss-Lobatto nodes (endpoints and roots of `P_N'`) and weights.
pub fn lgl_nodes_and_weights(degree: usize) -> (Vec<f64>, Vec<f64>) {
    let n = degree;
    let nf = n as f64;
    let mut nodes = vec![0.0; n + 1];
    let mut weights = vec![0.0; n + 1];
    let w_end = 2.0 / (nf * (nf + 1.0));
    nodes[0] = -1.0;
    nodes[n] = 1.0;
    weights[0] = w_end;
    weights[n] = w_end;
    // Interior nodes: roots of q = P_{N+1} - P_{N-1}, which is proportional
    // to (1 - x^2) P_N'.
    for j in 1..n.div_ceil(2) {
        let mut x = -(j as f64 * PI / nf).cos();
        for _ in 0..NEWTON_MAX_ITER {
            let (q, dq) = lobatto_q(n, x);
            let dx = -q / dq;
            x += dx;
            if dx.abs() <= NEWTON_TOL * x.abs().max(1.0) {
                break;
            }
        }
        let (p, _) = legendre_and_derivative(n, x);
        let w = w_end / (p * p);
        nodes[j] = x;
        weights[j] = w;
        nodes[n - j] = -x;
        weights[n - j] = w;
    }
    if n.is_multiple_of(2) {
        let (p, _) = legendre_and_derivative(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = w_end / (p * p);
    }
    (nodes, weights)
}

fn lobatto_q(n: usize, x: f64) -> (f64, f64) {
    let (p_np1, dp_np1) = legendre_and_derivative(n + 1, x);
    let (p_nm1, dp_nm1) = legendre_and_derivative(n - 1, x);
    (p_np1 - p_nm1, dp_np1 - dp_nm1)
}

pub fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    (0..nodes.len())
        .map(|j| {
            let prod: f64 = nodes
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &xk)| nodes[j] - xk)
                .product();
            1.0 / prod
        })
        .collect()
}

fn differentiation_matrix(nodes: &[f64], bary: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = (bary[j] / bary[i]) / (nodes[i] - nodes[j]);
                d[i * n + j] = v;
                diag -= v;
            }
        }
        // Negative-sum trick: rows annihilate constants to roundoff.
        d[i * n + i] = diag;
    }
    d
}

fn lagrange_values(x: f64, nodes: &[f64], bary: &[f64]) -> Vec<f64> {
    if let Some(k) = nodes.iter().position(|&xk| (x - xk).abs() <= f64::EPSILON * 4.0) {
        let mut l = vec![0.0; nodes.len()];
        l[k] = 1.0;
        return l;
    }
    let terms: Vec<f64> = nodes
        .iter()
        .zip(bary)
        .map(|(&xk, &bk)| bk / (x - xk))
        .collect();
    let denom: f64 = terms.iter().sum();
    terms.into_iter().map(|t| t / denom).collect()
}
