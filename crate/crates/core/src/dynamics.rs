//! Crank–Nicolson (implicit midpoint) propagation of
//! `i dPsi/dt = -L Psi - |Psi|^2 Psi` on the star graph.
//!
//! One step solves
//!
//! ```text
//! (i/dt + L/2) Psi1 = (i/dt - L/2) Psi0 - |mid|^2 mid,   mid = (Psi0 + Psi1)/2
//! ```
//!
//! by fixed-point iteration on the cubic term; each sweep is one arrowhead
//! solve with a matrix that does not change during the run.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::arrowhead::{ArrowheadFactors, ArrowheadSystem};
use crate::error::{GraphError, Result};
use crate::graph::{fmt_num, GraphSpec, GraphState, CONTINUITY_TOL};
use crate::operators::{energy, KirchhoffLaplacian};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvolutionConfig {
    /// Time step. A negative value runs the scheme backwards in time.
    pub dt: f64,
    /// Elapsed time; rounded to the nearest multiple of `|dt|`.
    pub t_final: f64,
    pub fixed_point_tol: f64,
    pub max_fixed_point_iters: usize,
    pub observe_every: usize,
}

impl EvolutionConfig {
    pub fn new(dt: f64, t_final: f64) -> Result<Self> {
        let config = Self {
            dt,
            t_final,
            fixed_point_tol: 1e-12,
            max_fixed_point_iters: 50,
            observe_every: 1,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_observe_every(mut self, stride: usize) -> Self {
        self.observe_every = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(GraphError::InvalidSpec(what.to_string()));
        if !(self.dt != 0.0 && self.dt.is_finite()) {
            return bad("dt must be finite and nonzero");
        }
        if !(self.t_final > 0.0 && self.dt.abs() <= self.t_final) {
            return bad("need 0 < |dt| <= t_final");
        }
        if !(self.fixed_point_tol > 0.0) || self.max_fixed_point_iters == 0 {
            return bad("fixed-point tolerance and iteration cap must be positive");
        }
        if self.observe_every == 0 {
            return bad("observe_every must be at least 1");
        }
        Ok(())
    }

    pub fn step_count(&self) -> usize {
        (self.t_final / self.dt.abs()).round().max(1.0) as usize
    }
}

/// Observables sampled along a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FlowTrace {
    pub times: Vec<f64>,
    pub masses: Vec<f64>,
    pub energies: Vec<f64>,
    /// `arg <Psi(0), Psi(t)>`, wrapped to `(-pi, pi]`.
    pub vertex_phase: Vec<f64>,
    pub edge_masses: Vec<Vec<f64>>,
}

impl FlowTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn record(&mut self, t: f64, initial: &GraphState, state: &GraphState) {
        self.times.push(t);
        self.masses.push(state.mass());
        self.energies.push(energy(state).total);
        self.vertex_phase.push(initial.inner_complex(state).arg());
        self.edge_masses.push(state.edge_masses());
    }

    pub fn write_csv<W: Write>(&self, out: &mut W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        let edges = self.edge_masses.first().map_or(0, Vec::len);
        let mut header = String::from("t,mass,energy,phase");
        for e in 1..=edges {
            header.push_str(&format!(",edge_mass_{e}"));
        }
        writeln!(out, "{header}")?;
        for i in 0..self.len() {
            let mut row = format!(
                "{},{},{},{}",
                fmt_num(self.times[i]),
                fmt_num(self.masses[i]),
                fmt_num(self.energies[i]),
                fmt_num(self.vertex_phase[i])
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

/// Result of [`evolve`]. Drifts are maxima over every step, not only the
/// observed ones.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: GraphState,
    pub trace: FlowTrace,
    pub steps: usize,
    /// `max |M(t) - M(0)|`
    pub max_mass_drift: f64,
    /// `max |E(t) - E(0)| / |E(0)|` (absolute when `E(0) = 0`)
    pub max_energy_drift: f64,
    /// `max_t max_nodes ||Psi(t)| - |Psi(0)||`
    pub max_modulus_drift: f64,
}

/// Crank–Nicolson propagator with the linear part factored once.
pub struct CrankNicolson {
    dt: f64,
    tol: f64,
    max_iters: usize,
    factors: ArrowheadFactors,
    laplacian: KirchhoffLaplacian,
}

impl CrankNicolson {
    pub fn new(spec: GraphSpec, dt: f64, tol: f64, max_iters: usize) -> Self {
        let system = ArrowheadSystem::uniform(
            spec,
            Complex64::new(0.0, 1.0 / dt),
            Complex64::new(0.5, 0.0),
        );
        Self {
            dt,
            tol,
            max_iters,
            factors: system.factor(),
            laplacian: KirchhoffLaplacian::new(spec),
        }
    }

    pub fn from_config(spec: GraphSpec, config: &EvolutionConfig) -> Self {
        Self::new(spec, config.dt, config.fixed_point_tol, config.max_fixed_point_iters)
    }

    /// One step; `state` must be vertex-continuous with its far node at zero.
    pub fn step(&self, state: &GraphState) -> Result<GraphState> {
        state.require_continuous(CONTINUITY_TOL)?;
        let shift = Complex64::new(0.0, 1.0 / self.dt);
        let lap = self.laplacian.apply_unchecked(state);
        let linear = state.scaled(shift).add_scaled(Complex64::new(-0.5, 0.0), &lap);
        let scale = state
            .values()
            .iter()
            .fold(0.0_f64, |m, z| m.max(z.norm()))
            .max(f64::MIN_POSITIVE);

        let mut next = state.clone();
        let mut update = f64::INFINITY;
        for _ in 0..self.max_iters {
            let mut rhs = linear.clone();
            for ((r, a), b) in rhs
                .values_mut()
                .iter_mut()
                .zip(state.values())
                .zip(next.values())
            {
                let mid = 0.5 * (a + b);
                *r -= mid * mid.norm_sqr();
            }
            self.factors.solve_in_place(&mut rhs);
            update = rhs
                .values()
                .iter()
                .zip(next.values())
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()));
            next = rhs;
            if update <= self.tol * scale {
                return Ok(next);
            }
        }
        Err(GraphError::StepFailure {
            iterations: self.max_iters,
            last_update: update,
        })
    }
}

/// One implicit-midpoint step with default solver settings.
pub fn step_crank_nicolson(state: &GraphState, dt: f64) -> Result<GraphState> {
    CrankNicolson::new(*state.spec(), dt, 1e-12, 50).step(state)
}

/// Runs the scheme for `config.step_count()` steps. The far node is pinned
/// to zero and the per-edge vertex samples are replaced by their mean before
/// the first step, so a datum that is discontinuous at the vertex is
/// projected onto the continuous states (its mass may change slightly).
pub fn evolve(state: &GraphState, config: &EvolutionConfig) -> Result<Evolution> {
    config.validate()?;
    let spec = *state.spec();
    let mut current = project_continuous(state);
    let initial = current.clone();
    let solver = CrankNicolson::from_config(spec, config);

    let mass0 = initial.mass();
    let energy0 = energy(&initial).total;
    let energy_scale = if energy0 != 0.0 { energy0.abs() } else { 1.0 };
    let modulus0: Vec<f64> = initial.values().iter().map(|z| z.norm()).collect();

    let mut trace = FlowTrace::default();
    trace.record(0.0, &initial, &initial);
    let steps = config.step_count();
    let (mut mass_drift, mut energy_drift, mut modulus_drift) = (0.0_f64, 0.0_f64, 0.0_f64);
    for n in 1..=steps {
        current = solver.step(&current).map_err(|source| GraphError::AtStep {
            step: n,
            source: Box::new(source),
        })?;
        mass_drift = mass_drift.max((current.mass() - mass0).abs());
        energy_drift = energy_drift.max((energy(&current).total - energy0).abs() / energy_scale);
        modulus_drift = current
            .values()
            .iter()
            .zip(&modulus0)
            .fold(modulus_drift, |m, (z, r)| m.max((z.norm() - r).abs()));
        if n % config.observe_every == 0 || n == steps {
            trace.record(n as f64 * config.dt.abs(), &initial, &current);
        }
    }
    Ok(Evolution {
        state: current,
        trace,
        steps,
        max_mass_drift: mass_drift,
        max_energy_drift: energy_drift,
        max_modulus_drift: modulus_drift,
    })
}

fn project_continuous(state: &GraphState) -> GraphState {
    let mut out = state.clone().with_far_end_pinned();
    let v = out.vertex_value();
    for e in 0..out.spec().edge_count() {
        out.edge_mut(e)[0] = v;
    }
    out
}

// Wrapped increments larger than this are treated as ambiguous.
const MAX_PHASE_INCREMENT: f64 = 0.75 * PI;

/// Least-squares slope of the unwrapped `vertex_phase` against time. With the
/// equation as written the standing wave `e^{i omega t} Phi` gives `+omega`.
pub fn phase_slope(trace: &FlowTrace) -> Result<f64> {
    if trace.len() < 3 {
        return Err(GraphError::DegenerateState(format!(
            "phase fit needs at least 3 samples, got {}",
            trace.len()
        )));
    }
    let mut unwrapped = Vec::with_capacity(trace.len());
    unwrapped.push(trace.vertex_phase[0]);
    for w in trace.vertex_phase.windows(2) {
        let mut d = w[1] - w[0];
        d -= 2.0 * PI * (d / (2.0 * PI)).round();
        if d.abs() > MAX_PHASE_INCREMENT {
            return Err(GraphError::PhaseAliasing(d.abs()));
        }
        let last = *unwrapped.last().unwrap();
        unwrapped.push(last + d);
    }
    let n = trace.len() as f64;
    let t_mean = trace.times.iter().sum::<f64>() / n;
    let p_mean = unwrapped.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, p) in trace.times.iter().zip(&unwrapped) {
        sxy += (t - t_mean) * (p - p_mean);
        sxx += (t - t_mean) * (t - t_mean);
    }
    Ok(sxy / sxx)
}

/// `|phase_slope|`, the measured frequency.
pub fn measure_omega(trace: &FlowTrace) -> Result<f64> {
    phase_slope(trace).map(f64::abs)
}
