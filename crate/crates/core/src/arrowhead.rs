//! Direct solver for `(D + c L) x = r` on a star graph.
//!
//! `L` is the Kirchhoff Laplacian restricted to the free unknowns: the shared
//! vertex value and the nodes `1..=N-2` of every edge (the far node is a
//! Dirichlet node and stays zero). Each edge contributes a tridiagonal block
//! that couples to the rest only through the vertex, so the matrix has
//! arrowhead shape and is eliminated in `O(E N)`:
//!
//! ```text
//! x_e = y_e - v z_e,   T_e y_e = r_e,   T_e z_e = (c/h^2) e_1
//! ```
//!
//! and the vertex row gives a scalar equation for `v`.

use num_complex::Complex64;

use crate::graph::{GraphSpec, GraphState};

/// Thomas algorithm for `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]`,
/// in place. `sub[0]` and `sup[n-1]` are ignored. No pivoting.
pub fn solve_tridiagonal(
    sub: &[Complex64],
    diag: &[Complex64],
    sup: &[Complex64],
    rhs: &mut [Complex64],
) {
    let n = diag.len();
    let mut scratch = Vec::with_capacity(n);
    thomas(n, |i| sub[i], |i| diag[i], |i| sup[i], rhs, &mut scratch);
}

fn thomas(
    n: usize,
    sub: impl Fn(usize) -> Complex64,
    diag: impl Fn(usize) -> Complex64,
    sup: impl Fn(usize) -> Complex64,
    rhs: &mut [Complex64],
    scratch: &mut Vec<Complex64>,
) {
    scratch.clear();
    scratch.resize(n, Complex64::new(0.0, 0.0));
    let mut denom = diag(0);
    scratch[0] = sup(0) / denom;
    rhs[0] /= denom;
    for i in 1..n {
        let a = sub(i);
        denom = diag(i) - a * scratch[i - 1];
        scratch[i] = sup(i) / denom;
        rhs[i] = (rhs[i] - a * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= scratch[i] * next;
    }
}

/// Shifted Kirchhoff operator `D + c L` with a node-wise diagonal `D`.
#[derive(Debug, Clone)]
pub struct ArrowheadSystem {
    spec: GraphSpec,
    coupling: Complex64,
    vertex_diag: Complex64,
    // per edge, nodes 1..=N-2
    edge_diag: Vec<Vec<Complex64>>,
}

impl ArrowheadSystem {
    /// `D = shift * I`.
    pub fn uniform(spec: GraphSpec, shift: Complex64, coupling: Complex64) -> Self {
        Self::with_diagonal(spec, coupling, |_, _| shift, shift)
    }

    /// `diag(e, j)` for edge nodes `1..=N-2`, `vertex_diag` for the vertex row.
    pub fn with_diagonal(
        spec: GraphSpec,
        coupling: Complex64,
        diag: impl Fn(usize, usize) -> Complex64,
        vertex_diag: Complex64,
    ) -> Self {
        let n = spec.points_per_edge();
        let edge_diag = (0..spec.edge_count())
            .map(|e| (1..n - 1).map(|j| diag(e, j)).collect())
            .collect();
        Self {
            spec,
            coupling,
            vertex_diag,
            edge_diag,
        }
    }

    /// Applies `D + c L` to `x` (far node of the result set to zero).
    pub fn apply(&self, x: &GraphState) -> GraphState {
        let n = self.spec.points_per_edge();
        let e_count = self.spec.edge_count();
        let h2 = self.spec.spacing().powi(2);
        let c = self.coupling;
        let mut out = GraphState::zeros(self.spec);
        let v = x.vertex_value();
        let flux: Complex64 = (0..e_count).map(|e| x.edge(e)[1] - x.edge(e)[0]).sum();
        let vertex_row = self.vertex_diag * v + c * flux * (2.0 / (e_count as f64 * h2));
        for e in 0..e_count {
            let src = x.edge(e);
            let dst = out.edge_mut(e);
            dst[0] = vertex_row;
            for j in 1..n - 1 {
                let lap = (src[j - 1] - 2.0 * src[j] + src[j + 1]) / h2;
                dst[j] = self.edge_diag[e][j - 1] * src[j] + c * lap;
            }
        }
        out
    }

    /// Solves `(D + c L) x = rhs`. The vertex equation uses the mean of the
    /// per-edge vertex entries of `rhs`.
    pub fn solve(&self, rhs: &GraphState) -> GraphState {
        self.factor().solve(rhs)
    }

    /// LU factors of the edge blocks and the vertex Schur complement, for
    /// repeated solves with the same matrix.
    pub fn factor(&self) -> ArrowheadFactors {
        let n = self.spec.points_per_edge();
        let e_count = self.spec.edge_count();
        let off = self.coupling / self.spec.spacing().powi(2);
        let mut edges = Vec::with_capacity(e_count);
        let mut sum_z1 = Complex64::new(0.0, 0.0);
        for e in 0..e_count {
            let mut denom = Vec::with_capacity(n - 2);
            let mut upper = Vec::with_capacity(n - 2);
            for (i, d) in self.edge_diag[e].iter().enumerate() {
                let dd = if i == 0 {
                    d - 2.0 * off
                } else {
                    d - 2.0 * off - off * upper[i - 1]
                };
                denom.push(dd);
                upper.push(off / dd);
            }
            let mut block = EdgeLu {
                denom,
                upper,
                coupling: Vec::new(),
            };
            let mut z = vec![Complex64::new(0.0, 0.0); n - 2];
            z[0] = off;
            block.substitute(off, &mut z);
            sum_z1 += z[0];
            block.coupling = z;
            edges.push(block);
        }
        let k = self.coupling * (2.0 / (e_count as f64 * self.spec.spacing().powi(2)));
        ArrowheadFactors {
            spec: self.spec,
            off,
            k,
            schur: self.vertex_diag - k * (sum_z1 + e_count as f64),
            edges,
        }
    }
}

#[derive(Debug, Clone)]
struct EdgeLu {
    denom: Vec<Complex64>,
    upper: Vec<Complex64>,
    // T^{-1} (c/h^2) e_1
    coupling: Vec<Complex64>,
}

impl EdgeLu {
    fn substitute(&self, off: Complex64, rhs: &mut [Complex64]) {
        let n = rhs.len();
        rhs[0] /= self.denom[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - off * rhs[i - 1]) / self.denom[i];
        }
        for i in (0..n - 1).rev() {
            let next = rhs[i + 1];
            rhs[i] -= self.upper[i] * next;
        }
    }
}

/// Factored form of an [`ArrowheadSystem`].
#[derive(Debug, Clone)]
pub struct ArrowheadFactors {
    spec: GraphSpec,
    off: Complex64,
    k: Complex64,
    schur: Complex64,
    edges: Vec<EdgeLu>,
}

impl ArrowheadFactors {
    pub fn solve(&self, rhs: &GraphState) -> GraphState {
        let mut out = rhs.clone();
        self.solve_in_place(&mut out);
        out
    }

    /// Overwrites `x` (holding the right-hand side) with the solution.
    pub fn solve_in_place(&self, x: &mut GraphState) {
        let n = self.spec.points_per_edge();
        let r_v = x.vertex_value();
        let mut sum_y1 = Complex64::new(0.0, 0.0);
        for (e, block) in self.edges.iter().enumerate() {
            let y = &mut x.edge_mut(e)[1..n - 1];
            block.substitute(self.off, y);
            sum_y1 += y[0];
        }
        let v = (r_v - self.k * sum_y1) / self.schur;
        for (e, block) in self.edges.iter().enumerate() {
            let dst = x.edge_mut(e);
            dst[0] = v;
            for (d, z) in dst[1..n - 1].iter_mut().zip(&block.coupling) {
                *d -= v * z;
            }
            dst[n - 1] = Complex64::new(0.0, 0.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_against_dense() {
        let n = 6;
        let sub: Vec<Complex64> = (0..n).map(|i| cx(0.3 + i as f64 * 0.1, 0.2)).collect();
        let sup: Vec<Complex64> = (0..n).map(|i| cx(-0.4, 0.1 * i as f64)).collect();
        let diag: Vec<Complex64> = (0..n).map(|i| cx(3.0 + i as f64, -1.0)).collect();
        let x_true: Vec<Complex64> = (0..n).map(|i| cx(i as f64, 1.0 - i as f64)).collect();
        let mut rhs: Vec<Complex64> = (0..n)
            .map(|i| {
                let mut r = diag[i] * x_true[i];
                if i > 0 {
                    r += sub[i] * x_true[i - 1];
                }
                if i + 1 < n {
                    r += sup[i] * x_true[i + 1];
                }
                r
            })
            .collect();
        solve_tridiagonal(&sub, &diag, &sup, &mut rhs);
        for (a, b) in rhs.iter().zip(&x_true) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn residual(sys: &ArrowheadSystem, x: &GraphState, rhs: &GraphState) -> f64 {
        let ax = sys.apply(x);
        let n = x.spec().points_per_edge();
        let mut worst: f64 = 0.0;
        for e in 0..x.spec().edge_count() {
            for j in 0..n - 1 {
                let target = if j == 0 { rhs.vertex_value() } else { rhs.edge(e)[j] };
                worst = worst.max((ax.edge(e)[j] - target).norm());
            }
        }
        worst
    }

    #[test]
    fn solves_crank_nicolson_type_system() {
        let spec = GraphSpec::new(3, 5.0, 41).unwrap();
        let dt = 1e-2;
        let sys = ArrowheadSystem::uniform(spec, cx(0.0, 1.0 / dt), cx(0.5, 0.0));
        let rhs = GraphState::from_fn(spec, |e, x| cx((x + e as f64).sin(), x.cos()))
            .with_far_end_pinned();
        // make the rhs continuous at the vertex
        let mut rhs = rhs;
        let v = rhs.vertex_value();
        for e in 0..3 {
            rhs.edge_mut(e)[0] = v;
        }
        let x = sys.solve(&rhs);
        assert!(residual(&sys, &x, &rhs) < 1e-9 * (1.0 / dt));
        assert_eq!(x.vertex_defect(), 0.0);
        assert_eq!(x.edge(1)[40].norm(), 0.0);
    }

    #[test]
    fn factors_reuse_matches_fresh_solve() {
        let spec = GraphSpec::new(3, 5.0, 41).unwrap();
        let sys = ArrowheadSystem::uniform(spec, cx(0.0, 50.0), cx(0.5, 0.0));
        let factors = sys.factor();
        for k in 0..3 {
            let rhs = GraphState::from_fn(spec, |e, x| cx((k as f64 * x).cos(), e as f64));
            let a = factors.solve(&rhs);
            assert!(residual(&sys, &a, &rhs) < 1e-10);
        }
    }

    #[test]
    fn solves_variable_diagonal_real_system() {
        let spec = GraphSpec::new(2, 3.0, 31).unwrap();
        let sys = ArrowheadSystem::with_diagonal(
            spec,
            cx(-1.0, 0.0),
            |e, j| cx(1.0 + 0.1 * (e + j) as f64, 0.0),
            cx(2.0, 0.0),
        );
        let rhs = GraphState::from_fn(spec, |_, x| cx((-x).exp(), 0.0));
        let x = sys.solve(&rhs);
        assert!(residual(&sys, &x, &rhs) < 1e-10);
    }

    #[test]
    fn single_edge_reduction_matches_full_symmetric_solve() {
        // With identical edges, the E-edge system reduces to one edge with the
        // same vertex row: (2/(E h^2)) * E * (x1 - v) = (2/h^2)(x1 - v).
        let spec3 = GraphSpec::new(3, 4.0, 33).unwrap();
        let sys3 = ArrowheadSystem::uniform(spec3, cx(1.0, 0.0), cx(-0.3, 0.0));
        let rhs3 = GraphState::from_fn(spec3, |_, x| cx(1.0 / x.cosh(), 0.0));
        let x3 = sys3.solve(&rhs3);

        let spec1 = GraphSpec::new(2, 4.0, 33).unwrap();
        // two identical edges: vertex row (2/(2h^2)) * 2 (x1 - v) also equals (2/h^2)(x1 - v)
        let sys1 = ArrowheadSystem::uniform(spec1, cx(1.0, 0.0), cx(-0.3, 0.0));
        let rhs1 = GraphState::from_fn(spec1, |_, x| cx(1.0 / x.cosh(), 0.0));
        let x1 = sys1.solve(&rhs1);
        for j in 0..33 {
            assert!((x3.edge(0)[j] - x1.edge(0)[j]).norm() < 1e-13);
        }
    }
}
