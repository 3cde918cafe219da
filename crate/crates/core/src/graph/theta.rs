//! Lovász theta by an ADMM on the dual of the theta SDP.
//!
//! Primal (minimization form): min <C, X> with C = -J, subject to tr X = 1,
//! X_ij = 0 on every edge, X PSD. The optimum is -theta. The dual is
//! max y_0 subject to S = C - A*(y) PSD. Each iteration solves the y-step in
//! closed form (the constraint operators are mutually orthogonal, so AA* is
//! diagonal), projects onto the PSD cone by eigendecomposition, and updates
//! X from the negative part of that matrix.
//!
//! Convergence is judged on a certified bracket rather than on residuals:
//! the X iterate is repaired into a feasible primal point (edge entries
//! zeroed, spectrum shifted, trace renormalized) giving a lower bound, and
//! `lambda_max(J + sum_e y_e (E_ij + E_ji))` is an upper bound for any
//! multipliers `y`. Both hold regardless of how far ADMM has converged.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{check_size, Graph, GraphError, Result};

/// Over-relaxation factor for the multiplier step, in `(0, (1 + sqrt 5) / 2)`.
const RELAXATION: f64 = 1.6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaOptions {
    /// Bound on the relative certified gap `(U - L) / (1 + |U| + |L|)`.
    pub tol: f64,
    pub max_iterations: usize,
    pub max_vertices: usize,
}

impl Default for ThetaOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iterations: 50_000,
            max_vertices: 100,
        }
    }
}

/// Theta value with its convergence certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaSolution {
    /// Midpoint of `[lower_bound, upper_bound]`.
    pub theta: f64,
    /// `<J, X>` at a feasible primal point.
    pub lower_bound: f64,
    /// `lambda_max(J + A*(y))` at the dual iterate.
    pub upper_bound: f64,
    /// `(upper - lower) / (1 + |upper| + |lower|)`.
    pub certified_gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
}

struct Problem {
    n: usize,
    edges: Vec<(usize, usize)>,
    c: DMatrix<f64>,
    c_norm: f64,
}

impl Problem {
    /// `A(X) = [tr X, 2 X_ij for each edge]`.
    fn apply(&self, x: &DMatrix<f64>) -> Vec<f64> {
        let mut out = Vec::with_capacity(1 + self.edges.len());
        out.push(x.trace());
        out.extend(self.edges.iter().map(|&(i, j)| x[(i, j)] + x[(j, i)]));
        out
    }

    /// `A*(y) = y_0 I + sum_e y_e (E_ij + E_ji)`.
    fn adjoint(&self, y: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::identity(self.n, self.n) * y[0];
        for (&(i, j), &ye) in self.edges.iter().zip(&y[1..]) {
            m[(i, j)] += ye;
            m[(j, i)] += ye;
        }
        m
    }

    /// Diagonal of `AA*`.
    fn gram(&self, k: usize) -> f64 {
        if k == 0 {
            self.n as f64
        } else {
            2.0
        }
    }
}

/// Splits a symmetric matrix into its PSD and NSD parts.
fn split_psd(v: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let sym = (v + v.transpose()) * 0.5;
    let eig = sym.clone().symmetric_eigen();
    let n = v.nrows();
    let mut pos = DMatrix::zeros(n, n);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > 0.0 {
            let q = eig.eigenvectors.column(k);
            pos += q * q.transpose() * lambda;
        }
    }
    let neg = &sym - &pos;
    (pos, neg)
}

/// Feasible primal point built from `x`: zero the edge entries, shift the
/// spectrum to be nonnegative, renormalize the trace. Returns `<J, X>`.
fn primal_lower_bound(p: &Problem, x: &DMatrix<f64>) -> Option<f64> {
    let mut m = (x + x.transpose()) * 0.5;
    for &(i, j) in &p.edges {
        m[(i, j)] = 0.0;
        m[(j, i)] = 0.0;
    }
    let min_ev = m.clone().symmetric_eigenvalues().min();
    if min_ev < 0.0 {
        for k in 0..p.n {
            m[(k, k)] -= min_ev;
        }
    }
    let tr = m.trace();
    (tr > 0.0).then(|| m.sum() / tr)
}

/// `lambda_max(J + sum_e y_e (E_ij + E_ji))`, an upper bound for any `y`.
fn dual_upper_bound(p: &Problem, y: &[f64]) -> f64 {
    let mut m = -&p.c;
    for (&(i, j), &ye) in p.edges.iter().zip(&y[1..]) {
        m[(i, j)] += ye;
        m[(j, i)] += ye;
    }
    m.symmetric_eigenvalues().max()
}

fn dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Lovász theta number of `g` to relative accuracy `tol`.
pub fn lovasz_theta(g: &Graph, tol: f64) -> Result<f64> {
    let opts = ThetaOptions {
        tol,
        ..ThetaOptions::default()
    };
    lovasz_theta_with(g, &opts).map(|s| s.theta)
}

pub fn lovasz_theta_with(g: &Graph, opts: &ThetaOptions) -> Result<ThetaSolution> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(GraphError::EmptyGraph);
    }
    check_size(n as u128, opts.max_vertices)?;

    let c = DMatrix::from_element(n, n, -1.0);
    let c_norm = c.norm();
    let p = Problem {
        n,
        edges: g.edges(),
        c,
        c_norm,
    };
    let m = 1 + p.edges.len();
    let mut b = vec![0.0; m];
    b[0] = 1.0;

    let mut x = DMatrix::identity(n, n) / n as f64;
    let mut s = DMatrix::zeros(n, n);
    let mut y = vec![0.0; m];
    let mut mu = 1.0;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;

    for it in 1..=opts.max_iterations {
        let ax = p.apply(&x);
        let a_cs = p.apply(&(&p.c - &s));
        for k in 0..m {
            y[k] = (mu * (b[k] - ax[k]) + a_cs[k]) / p.gram(k);
        }
        let aty = p.adjoint(&y);
        let v = &p.c - &aty - &x * mu;
        let (pos, neg) = split_psd(&v);
        s = pos;
        x = &x * (1.0 - RELAXATION) - neg * (RELAXATION / mu);

        let ax = p.apply(&x);
        let primal_residual = ax
            .iter()
            .zip(&b)
            .map(|(a, bb)| (a - bb).powi(2))
            .sum::<f64>()
            .sqrt()
            / 2.0;
        let dual_residual = (&p.c - &aty - &s).norm() / (1.0 + p.c_norm);
        let pobj = dot(&p.c, &x);
        let dobj = y[0];
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let residual = primal_residual.max(dual_residual).max(gap);

        if it % 5 == 0 || residual < opts.tol {
            if let Some(l) = primal_lower_bound(&p, &x) {
                lower = lower.max(l);
            }
            upper = upper.min(dual_upper_bound(&p, &y));
        }
        let certified_gap = (upper - lower) / (1.0 + upper.abs() + lower.abs());

        if certified_gap < opts.tol {
            return Ok(ThetaSolution {
                theta: (lower + upper) / 2.0,
                lower_bound: lower,
                upper_bound: upper,
                certified_gap,
                primal_residual,
                dual_residual,
                iterations: it,
            });
        }

        // Keep primal and dual residuals balanced.
        if it % 10 == 0 {
            let ratio = primal_residual / dual_residual.max(f64::MIN_POSITIVE);
            if ratio > 5.0 {
                mu = (mu * 1.5).min(1e6);
            } else if ratio < 0.2 {
                mu = (mu / 1.5).max(1e-6);
            }
        }
    }
    Err(GraphError::NotConverged {
        iterations: opts.max_iterations,
        gap: (upper - lower) / (1.0 + upper.abs() + lower.abs()),
        lower,
        upper,
    })
}
