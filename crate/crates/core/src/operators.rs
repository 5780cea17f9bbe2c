//! Discrete Kirchhoff Laplacian, energy functional and its exact gradient.
//!
//! The discrete energy is
//!
//! ```text
//! E(Psi) = 1/2 sum_e sum_j |Psi_e(j+1) - Psi_e(j)|^2 / h  -  1/4 sum_e trapezoid(|Psi_e|^4)
//! ```
//!
//! and every operator here is derived from it, with respect to the weighted
//! inner product `<a, b>_w = Re sum w_j conj(a_j) b_j` (weights `h` inside an
//! edge, `h/2` per edge at the vertex, i.e. `E h / 2` for the shared value).
//! Differentiating the kinetic sum at the shared vertex value gives the flux
//! stencil `(2/(E h^2)) sum_e (Psi_e(1) - Psi_e(0))`; Kirchhoff's condition is
//! natural in the form rather than imposed on a row.
//!
//! The far node `x = L` is a Dirichlet node. The Laplacian row there uses a
//! zero ghost value; the gradient vanishes there since the node is not free.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{GraphError, Result};
use crate::graph::{GraphSpec, GraphState, CONTINUITY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    /// `1/2 ||Psi'||^2`
    pub kinetic: f64,
    /// `1/4 ||Psi||_4^4`
    pub quartic: f64,
    pub total: f64,
    pub mass: f64,
}

pub fn energy(state: &GraphState) -> EnergyReport {
    let kinetic = 0.5 * state.kinetic_form();
    let quartic = 0.25 * state.quartic_integral();
    EnergyReport {
        kinetic,
        quartic,
        total: kinetic - quartic,
        mass: state.mass(),
    }
}

/// Matrix-free Kirchhoff Laplacian on a star graph.
#[derive(Debug, Clone, Copy)]
pub struct KirchhoffLaplacian {
    spec: GraphSpec,
}

impl KirchhoffLaplacian {
    pub fn new(spec: GraphSpec) -> Self {
        Self { spec }
    }

    /// `L Psi`, rejecting states whose vertex defect exceeds `1e-8`.
    pub fn apply(&self, state: &GraphState) -> Result<GraphState> {
        state.require_continuous(CONTINUITY_TOL)?;
        Ok(self.apply_unchecked(state))
    }

    pub fn apply_unchecked(&self, state: &GraphState) -> GraphState {
        let spec = self.spec;
        let n = spec.points_per_edge();
        let e_count = spec.edge_count();
        let h2 = spec.spacing().powi(2);
        let flux: Complex64 = (0..e_count)
            .map(|e| state.edge(e)[1] - state.edge(e)[0])
            .sum();
        let vertex = flux * (2.0 / (e_count as f64 * h2));
        let mut out = GraphState::zeros(spec);
        for e in 0..e_count {
            let src = state.edge(e);
            let dst = out.edge_mut(e);
            dst[0] = vertex;
            for j in 1..n - 1 {
                dst[j] = (src[j - 1] - 2.0 * src[j] + src[j + 1]) / h2;
            }
            dst[n - 1] = (src[n - 2] - 2.0 * src[n - 1]) / h2;
        }
        out
    }
}

pub fn apply_laplacian(state: &GraphState) -> Result<GraphState> {
    KirchhoffLaplacian::new(*state.spec()).apply(state)
}

/// `-L Psi - |Psi|^2 Psi`, the gradient of the discrete energy in the
/// weighted inner product. At the vertex the cubic term is averaged over the
/// per-edge samples so that the directional-derivative identity holds for
/// any continuous perturbation.
pub fn energy_gradient(state: &GraphState) -> GraphState {
    let spec = *state.spec();
    let n = spec.points_per_edge();
    let e_count = spec.edge_count();
    let mut out = KirchhoffLaplacian::new(spec).apply_unchecked(state);
    let vertex_cubic: Complex64 = (0..e_count)
        .map(|e| {
            let v = state.edge(e)[0];
            v * v.norm_sqr()
        })
        .sum::<Complex64>()
        / e_count as f64;
    for e in 0..e_count {
        let src = state.edge(e).to_vec();
        let dst = out.edge_mut(e);
        dst[0] = -dst[0] - vertex_cubic;
        for j in 1..n - 1 {
            dst[j] = -dst[j] - src[j] * src[j].norm_sqr();
        }
        dst[n - 1] = Complex64::new(0.0, 0.0);
    }
    out
}

/// `grad + omega Psi` restricted to the free nodes.
fn el_vector(state: &GraphState, omega: f64) -> GraphState {
    energy_gradient(state)
        .add_scaled(Complex64::new(omega, 0.0), state)
        .with_far_end_pinned()
}

/// Weighted norm of `grad E(Psi) + omega Psi`.
pub fn el_residual(state: &GraphState, omega: f64) -> f64 {
    let r = el_vector(state, omega);
    r.inner(&r).sqrt()
}

/// Least-squares multiplier `-<grad, Psi>_w / ||Psi||_w^2` over the free nodes.
pub fn best_omega(state: &GraphState) -> Result<f64> {
    let free = state.clone().with_far_end_pinned();
    let norm2 = free.inner(&free);
    if !(norm2 > 0.0) {
        return Err(GraphError::DegenerateState("zero state has no multiplier".into()));
    }
    Ok(-energy_gradient(state).inner(&free) / norm2)
}

/// Gradient with its component along `Psi` removed, and its weighted norm.
/// The norm equals `el_residual(state, best_omega(state))`.
pub fn projected_gradient(state: &GraphState) -> Result<(GraphState, f64)> {
    let omega = best_omega(state)?;
    let r = el_vector(state, omega);
    let norm = r.inner(&r).sqrt();
    Ok((r, norm))
}
