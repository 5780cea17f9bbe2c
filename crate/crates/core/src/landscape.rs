//! The energy landscape at fixed mass on the Y junction: the comparison
//! sesquisoliton, scans along the sesquisoliton and dilation curves,
//! mass-constrained gradient flow and second-difference probes at the
//! standing wave.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::arrowhead::ArrowheadSystem;
use crate::error::{GraphError, Result};
use crate::graph::{fmt_num, GraphSpec, GraphState, CONTINUITY_TOL};
use crate::operators::{energy, projected_gradient};
use crate::profiles::{
    energy_infimum, energy_sesqui_closed, half_soliton_profile, sesquisoliton, solve_offset,
    SesquiParams,
};

/// Energies along a one-parameter family of states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveScan {
    pub parameter: String,
    pub total_mass: f64,
    pub spec: GraphSpec,
    pub values: Vec<f64>,
    pub closed_energy: Vec<f64>,
    pub discrete_energy: Vec<f64>,
    /// Additional named columns aligned with `values`.
    pub extra: Vec<(String, Vec<f64>)>,
}

impl CurveScan {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.extra
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    /// Each discrete energy exceeds its predecessor by more than `tol`.
    pub fn discrete_increasing(&self, tol: f64) -> bool {
        self.discrete_energy.windows(2).all(|w| w[1] - w[0] > tol)
    }

    /// Index of the smallest discrete energy.
    pub fn argmin(&self) -> Option<usize> {
        (0..self.len()).min_by(|&a, &b| self.discrete_energy[a].total_cmp(&self.discrete_energy[b]))
    }

    pub fn write_csv<W: Write>(&self, out: &mut W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        let mut header = String::from("param,closed_energy,discrete_energy");
        for (name, _) in &self.extra {
            header.push(',');
            header.push_str(name);
        }
        writeln!(out, "{header}")?;
        for i in 0..self.len() {
            let mut row = format!(
                "{},{},{}",
                fmt_num(self.values[i]),
                fmt_num(self.closed_energy[i]),
                fmt_num(self.discrete_energy[i])
            );
            for (_, col) in &self.extra {
                row.push(',');
                row.push_str(&fmt_num(col[i]));
            }
            writeln!(out, "{row}")?;
        }
        Ok(())
    }
}

/// Output of [`comparison_sesquisoliton`].
#[derive(Debug, Clone)]
pub struct Comparison {
    /// `permutation[k]` is the original edge placed at position `k`.
    pub permutation: [usize; 3],
    pub params: SesquiParams,
    /// The sesquisoliton in the relabelled frame, rescaled to the input mass.
    pub state: GraphState,
    pub energy: f64,
}

/// The sesquisoliton that the relabelling argument compares `state` with:
/// the lightest edge goes first (lowest index on ties), the two others keep
/// their original order, `m1` is the lightest edge mass and `m2` the sum of
/// the other two.
pub fn comparison_sesquisoliton(state: &GraphState) -> Result<Comparison> {
    let spec = *state.spec();
    if spec.edge_count() != 3 {
        return Err(GraphError::EdgeCount {
            required: 3,
            actual: spec.edge_count(),
        });
    }
    let masses = state.edge_masses();
    if let Some(edge) = (0..3).find(|&e| !(masses[e] > 0.0)) {
        return Err(GraphError::ZeroEdgeMass { edge });
    }
    let first = (0..3)
        .min_by(|&a, &b| masses[a].total_cmp(&masses[b]))
        .expect("three edges");
    let mut permutation = [first, 0, 0];
    let mut k = 1;
    for e in 0..3 {
        if e != first {
            permutation[k] = e;
            k += 1;
        }
    }
    let m1 = masses[first];
    let m2 = masses[permutation[1]] + masses[permutation[2]];
    let params = SesquiParams::new(m1, m2)?;
    let out = sesquisoliton(&params, spec)?.rescaled_to_mass(state.mass())?;
    Ok(Comparison {
        permutation,
        params,
        energy: energy(&out).total,
        state: out,
    })
}

fn sesqui_domain_error(m1: f64, total_mass: f64) -> GraphError {
    GraphError::Domain {
        value: m1,
        domain: format!("(0, {}]", total_mass / 3.0),
    }
}

/// Sesquisolitons `m1 -> S(m1, M - m1)` for ascending `m1` in `(0, M/3]`.
/// Columns: closed form, discrete energy of the sampled state, offset.
pub fn scan_sesqui_curve(total_mass: f64, m1_values: &[f64], spec: GraphSpec) -> Result<CurveScan> {
    if m1_values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(GraphError::Domain {
            value: f64::NAN,
            domain: "strictly ascending m1 values".into(),
        });
    }
    let mut closed = Vec::with_capacity(m1_values.len());
    let mut discrete = Vec::with_capacity(m1_values.len());
    let mut offsets = Vec::with_capacity(m1_values.len());
    for &m1 in m1_values {
        let params = SesquiParams::from_total(m1, total_mass)
            .map_err(|_| sesqui_domain_error(m1, total_mass))?;
        closed.push(energy_sesqui_closed(m1.min(total_mass / 3.0), total_mass)?);
        discrete.push(energy(&sesquisoliton(&params, spec)?).total);
        offsets.push(params.offset());
    }
    Ok(CurveScan {
        parameter: "m1".into(),
        total_mass,
        spec,
        values: m1_values.to_vec(),
        closed_energy: closed,
        discrete_energy: discrete,
        extra: vec![("offset".into(), offsets)],
    })
}

/// `K` and `P` of the dilation energy `lambda^2 K - lambda P`.
pub fn dilation_coefficients(total_mass: f64) -> (f64, f64) {
    let m = total_mass / 3.0;
    (3.0 * m.powi(3) / 24.0, 3.0 * m.powi(3) / 12.0)
}

/// `sqrt(lambda) phi_{M/3}(lambda x)` on every edge.
pub fn dilated_stationary(total_mass: f64, lambda: f64, spec: GraphSpec) -> Result<GraphState> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(GraphError::Domain {
            value: lambda,
            domain: "lambda > 0".into(),
        });
    }
    let m = total_mass / 3.0;
    Ok(GraphState::from_fn(spec, |_, x| {
        Complex64::new(lambda.sqrt() * half_soliton_profile(m, lambda * x), 0.0)
    }))
}

/// Mass-preserving dilations of the standing wave. Extra column: mass.
pub fn scan_dilation_curve(total_mass: f64, lambda_values: &[f64], spec: GraphSpec) -> Result<CurveScan> {
    let (k, p) = dilation_coefficients(total_mass);
    let mut closed = Vec::with_capacity(lambda_values.len());
    let mut discrete = Vec::with_capacity(lambda_values.len());
    let mut masses = Vec::with_capacity(lambda_values.len());
    for &lambda in lambda_values {
        let state = dilated_stationary(total_mass, lambda, spec)?;
        closed.push(lambda * lambda * k - lambda * p);
        discrete.push(energy(&state).total);
        masses.push(state.mass());
    }
    Ok(CurveScan {
        parameter: "lambda".into(),
        total_mass,
        spec,
        values: lambda_values.to_vec(),
        closed_energy: closed,
        discrete_energy: discrete,
        extra: vec![("mass".into(), masses)],
    })
}

// Peak-to-boundary clearance in soliton widths 4/m2.
const CLEARANCE_WIDTHS: f64 = 5.0;

/// Smallest `m1` whose line-soliton peak stays `5 * 4/m2` away from `x = L`.
pub fn minimizing_sequence_floor(total_mass: f64, length: f64) -> f64 {
    let mut m1 = 0.0;
    for _ in 0..20 {
        let m2 = total_mass - m1;
        let u = 0.25 * (m2 * length - 4.0 * CLEARANCE_WIDTHS);
        m1 = if u <= 0.0 { total_mass / 3.0 } else { 0.5 * m2 / u.cosh() };
    }
    m1
}

/// Sesquisolitons along strictly decreasing `m1`, sampled without
/// renormalization. Extra columns: offset and gap `E - (-M^3/96)`.
pub fn minimizing_sequence_demo(total_mass: f64, m1_values: &[f64], spec: GraphSpec) -> Result<CurveScan> {
    if m1_values.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(GraphError::Domain {
            value: f64::NAN,
            domain: "strictly decreasing m1 values".into(),
        });
    }
    let floor = energy_infimum(total_mass)?;
    let length = spec.truncation_length();
    let mut closed = Vec::with_capacity(m1_values.len());
    let mut discrete = Vec::with_capacity(m1_values.len());
    let mut offsets = Vec::with_capacity(m1_values.len());
    let mut gaps = Vec::with_capacity(m1_values.len());
    for &m1 in m1_values {
        let params = SesquiParams::from_total(m1, total_mass)
            .map_err(|_| sesqui_domain_error(m1, total_mass))?;
        if params.offset() > length - CLEARANCE_WIDTHS * 4.0 / params.m2() {
            return Err(GraphError::Truncation {
                m1_floor: minimizing_sequence_floor(total_mass, length),
            });
        }
        let e = energy(&sesquisoliton(&params, spec)?).total;
        closed.push(energy_sesqui_closed(m1.min(total_mass / 3.0), total_mass)?);
        discrete.push(e);
        offsets.push(params.offset());
        gaps.push(e - floor);
    }
    Ok(CurveScan {
        parameter: "m1".into(),
        total_mass,
        spec,
        values: m1_values.to_vec(),
        closed_energy: closed,
        discrete_energy: discrete,
        extra: vec![("offset".into(), offsets), ("gap".into(), gaps)],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FlowStatus {
    /// Projected gradient norm reached the tolerance.
    Converged,
    MaxIterations,
    /// The step fell below `1e-12` without an energy decrease.
    Stalled,
}

/// Per accepted iterate of [`gradient_flow_fixed_mass`].
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DescentTrace {
    pub iterations: Vec<usize>,
    pub energies: Vec<f64>,
    pub masses: Vec<f64>,
    pub projected_gradient: Vec<f64>,
    /// Step used to reach the iterate (0 for the start).
    pub steps: Vec<f64>,
    /// Position of `max |Psi|` as (edge, x).
    pub peak_edge: Vec<usize>,
    pub peak_x: Vec<f64>,
    pub edge_masses: Vec<Vec<f64>>,
}

impl DescentTrace {
    pub fn len(&self) -> usize {
        self.iterations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterations.is_empty()
    }

    fn record(&mut self, iteration: usize, step: f64, state: &GraphState, grad_norm: f64) {
        let (edge, j) = peak_location(state);
        self.iterations.push(iteration);
        self.energies.push(energy(state).total);
        self.masses.push(state.mass());
        self.projected_gradient.push(grad_norm);
        self.steps.push(step);
        self.peak_edge.push(edge);
        self.peak_x.push(state.spec().coordinate(j));
        self.edge_masses.push(state.edge_masses());
    }

    /// Energies never increase between recorded iterates.
    pub fn is_monotone(&self) -> bool {
        self.energies.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn write_csv<W: Write>(&self, out: &mut W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        let edges = self.edge_masses.first().map_or(0, Vec::len);
        let mut header = String::from("iteration,energy,mass,projected_gradient,step,peak_edge,peak_x");
        for e in 1..=edges {
            header.push_str(&format!(",edge_mass_{e}"));
        }
        writeln!(out, "{header}")?;
        for i in 0..self.len() {
            let mut row = format!(
                "{},{},{},{},{},{},{}",
                self.iterations[i],
                fmt_num(self.energies[i]),
                fmt_num(self.masses[i]),
                fmt_num(self.projected_gradient[i]),
                fmt_num(self.steps[i]),
                self.peak_edge[i] + 1,
                fmt_num(self.peak_x[i])
            );
            for m in &self.edge_masses[i] {
                row.push(',');
                row.push_str(&fmt_num(*m));
            }
            writeln!(out, "{row}")?;
        }
        Ok(())
    }
}

/// Grid location (edge, node) of the largest modulus; the vertex counts as
/// edge 0.
pub fn peak_location(state: &GraphState) -> (usize, usize) {
    let n = state.spec().points_per_edge();
    let mut best = (0, 0, f64::NEG_INFINITY);
    for e in 0..state.spec().edge_count() {
        for (j, z) in state.edge(e).iter().enumerate().take(n) {
            if j == 0 && e > 0 {
                continue;
            }
            if z.norm() > best.2 {
                best = (e, j, z.norm());
            }
        }
    }
    (best.0, best.1)
}

#[derive(Debug, Clone)]
pub struct GradientFlow {
    pub state: GraphState,
    pub trace: DescentTrace,
    pub status: FlowStatus,
    pub iterations: usize,
}

const MIN_STEP: f64 = 1e-12;

/// Normalized gradient flow at the mass of `state0`.
///
/// Each iterate is `rescale((I - step L)^{-1} (Psi + step |Psi|^2 Psi))`, a
/// gradient step with the Laplacian taken implicitly. A trial that raises
/// the energy is rejected and the step halved; after an accepted iterate the
/// step grows by 1.25 up to its initial value.
pub fn gradient_flow_fixed_mass(
    state0: &GraphState,
    step: f64,
    max_iters: usize,
    grad_tol: f64,
) -> Result<GradientFlow> {
    if !(step > 0.0) {
        return Err(GraphError::Domain {
            value: step,
            domain: "step > 0".into(),
        });
    }
    state0.require_continuous(CONTINUITY_TOL)?;
    let spec = *state0.spec();
    let mut state = state0.clone().with_far_end_pinned();
    let v = state.vertex_value();
    for e in 0..spec.edge_count() {
        state.edge_mut(e)[0] = v;
    }
    let mass = state0.mass();
    state = state.rescaled_to_mass(mass)?;

    let mut trace = DescentTrace::default();
    let (_, mut grad_norm) = projected_gradient(&state)?;
    let mut current_energy = energy(&state).total;
    trace.record(0, 0.0, &state, grad_norm);

    let mut tau = step;
    let mut factors = implicit_factors(spec, tau);
    let mut iteration = 0;
    let status = loop {
        if grad_norm <= grad_tol {
            break FlowStatus::Converged;
        }
        if iteration >= max_iters {
            break FlowStatus::MaxIterations;
        }
        let mut rhs = state.clone();
        for z in rhs.values_mut() {
            *z += tau * z.norm_sqr() * *z;
        }
        factors.solve_in_place(&mut rhs);
        let trial = rhs.rescaled_to_mass(mass)?;
        let trial_energy = energy(&trial).total;
        if trial_energy <= current_energy {
            iteration += 1;
            state = trial;
            current_energy = trial_energy;
            grad_norm = projected_gradient(&state)?.1;
            trace.record(iteration, tau, &state, grad_norm);
            let grown = (1.25 * tau).min(step);
            if grown != tau {
                tau = grown;
                factors = implicit_factors(spec, tau);
            }
        } else {
            tau *= 0.5;
            if tau < MIN_STEP {
                break FlowStatus::Stalled;
            }
            factors = implicit_factors(spec, tau);
        }
    };
    Ok(GradientFlow {
        state,
        trace,
        status,
        iterations: iteration,
    })
}

fn implicit_factors(spec: GraphSpec, tau: f64) -> crate::arrowhead::ArrowheadFactors {
    ArrowheadSystem::uniform(spec, Complex64::new(1.0, 0.0), Complex64::new(-tau, 0.0)).factor()
}

/// Sesquisoliton with `m1 = (1 - fraction) M/3`, rescaled to `M`: mass moves
/// from edge 1 onto edges 2 and 3 with the line soliton displaced into edge 2.
pub fn asymmetric_perturbation(total_mass: f64, fraction: f64, spec: GraphSpec) -> Result<GraphState> {
    let params = SesquiParams::from_total((1.0 - fraction) * total_mass / 3.0, total_mass)?;
    sesquisoliton(&params, spec)?.rescaled_to_mass(total_mass)
}

/// Dilation of the standing wave by `1 + fraction`.
pub fn symmetric_perturbation(total_mass: f64, fraction: f64, spec: GraphSpec) -> Result<GraphState> {
    dilated_stationary(total_mass, 1.0 + fraction, spec)
}

/// Second difference of the mass-constrained energy along a direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaddleReport {
    pub direction: String,
    pub epsilon: f64,
    pub energy_plus: f64,
    pub energy_minus: f64,
    pub energy_center: f64,
    pub second_difference: f64,
    pub spec: GraphSpec,
}

impl SaddleReport {
    pub fn csv_header() -> &'static str {
        "direction,epsilon,second_difference"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{}",
            self.direction,
            fmt_num(self.epsilon),
            fmt_num(self.second_difference)
        )
    }
}

// Largest admissible relative change of the norm under the mass projection.
const MAX_PROJECTION_CHANGE: f64 = 0.10;

/// `(E(Psi+) + E(Psi-) - 2 E(center)) / eps^2` with
/// `Psi+- = rescale(center +- eps direction)`.
pub fn hessian_probe(
    center: &GraphState,
    direction: &GraphState,
    epsilon: f64,
    label: &str,
) -> Result<SaddleReport> {
    if !(epsilon > 0.0) {
        return Err(GraphError::Domain {
            value: epsilon,
            domain: "epsilon > 0".into(),
        });
    }
    if direction.values().iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Err(GraphError::DegenerateState("zero probe direction".into()));
    }
    let mass = center.mass();
    if !(mass > 0.0) {
        return Err(GraphError::DegenerateState("zero-mass center".into()));
    }
    let mut projected = [0.0; 2];
    for (slot, sign) in projected.iter_mut().zip([1.0, -1.0]) {
        let raw = center.add_scaled(Complex64::new(sign * epsilon, 0.0), direction);
        let factor = (mass / raw.mass()).sqrt();
        let change = (factor - 1.0).abs();
        if !(change <= MAX_PROJECTION_CHANGE) {
            return Err(GraphError::ProbeInvalid(100.0 * change));
        }
        *slot = energy(&raw.rescaled_to_mass(mass)?).total;
    }
    let energy_center = energy(center).total;
    Ok(SaddleReport {
        direction: label.to_string(),
        epsilon,
        energy_plus: projected[0],
        energy_minus: projected[1],
        energy_center,
        second_difference: (projected[0] + projected[1] - 2.0 * energy_center) / (epsilon * epsilon),
        spec: *center.spec(),
    })
}

/// Removes the component along `state` (tangent space of the mass sphere).
pub fn mass_tangent(direction: &GraphState, state: &GraphState) -> GraphState {
    let c = direction.inner(state) / state.inner(state);
    direction.add_scaled(Complex64::new(-c, 0.0), state)
}

/// `(S(M/3) - S(M/3 - delta)) / delta`, projected on the mass tangent space
/// at the standing wave.
pub fn sesqui_tangent(total_mass: f64, delta: f64, spec: GraphSpec) -> Result<GraphState> {
    let top = sesquisoliton(&SesquiParams::from_total(total_mass / 3.0, total_mass)?, spec)?;
    let below = sesquisoliton(
        &SesquiParams::from_total(total_mass / 3.0 - delta, total_mass)?,
        spec,
    )?;
    let diff = top.add_scaled(Complex64::new(-1.0, 0.0), &below).scaled(Complex64::new(1.0 / delta, 0.0));
    Ok(mass_tangent(&diff, &top))
}

/// `d/dlambda` of the dilation family at `lambda = 1`: `phi/2 + x phi'`.
pub fn dilation_tangent(total_mass: f64, spec: GraphSpec) -> GraphState {
    let m = total_mass / 3.0;
    GraphState::from_fn(spec, |_, x| {
        let phi = half_soliton_profile(m, x);
        let dphi = -0.5 * m * (0.5 * m * x).tanh() * phi;
        Complex64::new(0.5 * phi + x * dphi, 0.0)
    })
}

/// `i Psi`, the gauge direction.
pub fn phase_direction(state: &GraphState) -> GraphState {
    state.scaled(Complex64::new(0.0, 1.0))
}

/// Curvature of the constrained energy along the sesquisoliton curve at the
/// standing wave, in the parameter `m1`:
/// `2 (E(S(M/3 - eps)) - E(S(M/3))) / eps^2`. The continuation to
/// `m1 > M/3` is the mirror image under the exchange of edges 2 and 3,
/// which has the same energy, so this is the symmetric second difference.
/// Both states are rescaled to `M`.
pub fn sesqui_curve_probe(total_mass: f64, epsilon: f64, spec: GraphSpec) -> Result<SaddleReport> {
    let at = |m1: f64| -> Result<f64> {
        let s = sesquisoliton(&SesquiParams::from_total(m1, total_mass)?, spec)?;
        Ok(energy(&s.rescaled_to_mass(total_mass)?).total)
    };
    let center = at(total_mass / 3.0)?;
    let side = at(total_mass / 3.0 - epsilon)?;
    Ok(SaddleReport {
        direction: "sesqui_curve".into(),
        epsilon,
        energy_plus: side,
        energy_minus: side,
        energy_center: center,
        second_difference: 2.0 * (side - center) / (epsilon * epsilon),
        spec,
    })
}

/// Closed-form `d^2/dm1^2` of the sesquisoliton energy at `m1 = M/3`: `-M/8`.
pub fn sesqui_curve_curvature(total_mass: f64) -> f64 {
    -total_mass / 8.0
}

/// Offset check for the admissible domain; convenience for callers that
/// only have `(m1, m2)`.
pub fn offset_for(m1: f64, m2: f64) -> Result<f64> {
    solve_offset(m1, m2)
}
