//! Soliton profiles on the half-line, the line and the Y junction.
//!
//! `sech` below is the reciprocal hyperbolic cosine.

use num_complex::Complex64;
use serde::Serialize;

use crate::arrowhead::solve_tridiagonal;
use crate::error::{GraphError, Result};
use crate::graph::{GraphSpec, GraphState, LineSamples};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

fn sech(u: f64) -> f64 {
    1.0 / u.cosh()
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `phi_m(x) = (m/sqrt2) sech(m x / 2)`, the half-line minimizer of mass `m`.
pub fn half_soliton_profile(m: f64, x: f64) -> f64 {
    m / SQRT_2 * sech(0.5 * m * x)
}

/// `(m/(2 sqrt2)) sech(m (x - y) / 4)`, the line soliton of mass `m` centred at `y`.
pub fn line_soliton_profile(m: f64, y: f64, x: f64) -> f64 {
    m / (2.0 * SQRT_2) * sech(0.25 * m * (x - y))
}

/// Half-soliton samples on one edge of `spec`.
pub fn half_soliton(m: f64, spec: &GraphSpec) -> Result<Vec<Complex64>> {
    require_positive("m", m)?;
    Ok((0..spec.points_per_edge())
        .map(|j| real(half_soliton_profile(m, spec.coordinate(j))))
        .collect())
}

/// State carrying `phi_m` on edge `edge` and zero elsewhere.
pub fn half_soliton_state(m: f64, edge: usize, spec: GraphSpec) -> Result<GraphState> {
    require_positive("m", m)?;
    Ok(GraphState::from_fn(spec, |e, x| {
        if e == edge {
            real(half_soliton_profile(m, x))
        } else {
            real(0.0)
        }
    }))
}

/// Line soliton sampled on the `2N - 1` line nodes matching `spec`.
pub fn line_soliton(m: f64, y: f64, spec: &GraphSpec) -> Result<LineSamples> {
    require_positive("m", m)?;
    Ok(LineSamples::from_fn(spec.spacing(), spec.points_per_edge(), |x| {
        real(line_soliton_profile(m, y, x))
    }))
}

/// Minimum of `E_1` at mass `m`.
pub fn half_line_minimum(m: f64) -> f64 {
    -m.powi(3) / 24.0
}

/// Minimum of `E_2` at mass `m`.
pub fn line_minimum(m: f64) -> f64 {
    -m.powi(3) / 96.0
}

/// `inf E` over states of mass `M`: `-M^3/96`.
pub fn energy_infimum(total_mass: f64) -> Result<f64> {
    if !(total_mass >= 0.0) {
        return Err(GraphError::Domain {
            value: total_mass,
            domain: "M >= 0".into(),
        });
    }
    Ok(line_minimum(total_mass))
}

/// Closed-form energy of the sesquisoliton of total mass `M` with `m1` on
/// the first edge: `-m1^3/24 + (m1 - M)^3/96` for `0 < m1 <= M/3`.
pub fn energy_sesqui_closed(m1: f64, total_mass: f64) -> Result<f64> {
    if !(m1 > 0.0 && m1 <= total_mass / 3.0) {
        return Err(GraphError::Domain {
            value: m1,
            domain: format!("(0, {}]", total_mass / 3.0),
        });
    }
    Ok(-m1.powi(3) / 24.0 + (m1 - total_mass).powi(3) / 96.0)
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(GraphError::Domain {
            value: v,
            domain: format!("{name} > 0"),
        })
    }
}

// Below this ratio m2/(2 m1) is not comfortably representable.
const OFFSET_RATIO_FLOOR: f64 = 1e-150;

/// Offset `x >= 0` solving `m1 = (m2/2) sech(m2 x / 4)`.
pub fn solve_offset(m1: f64, m2: f64) -> Result<f64> {
    require_positive("m1", m1)?;
    require_positive("m2", m2)?;
    let ratio = 2.0 * m1 / m2;
    if ratio > 1.0 + 1e-12 {
        return Err(GraphError::NoAdmissibleOffset { m1, m2 });
    }
    if ratio >= 1.0 {
        return Ok(0.0);
    }
    if m1 / m2 < OFFSET_RATIO_FLOOR {
        return Ok(offset_by_bisection(m1, m2));
    }
    Ok(4.0 / m2 * (1.0 / ratio).acosh())
}

/// Bisection on `ln sech(m2 x/4) = ln(2 m1/m2)`, evaluated in log space.
fn offset_by_bisection(m1: f64, m2: f64) -> f64 {
    let target = (2.0 * m1).ln() - m2.ln();
    // ln sech(u) = -u - ln((1 + e^{-2u})/2)
    let log_sech = |u: f64| -u - (0.5 * (1.0 + (-2.0 * u).exp())).ln();
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while log_sech(hi) > target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if log_sech(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    4.0 / m2 * 0.5 * (lo + hi)
}

/// Parameters of a sesquisoliton: mass `m1` on edge 1, mass `m2` on edges
/// 2 and 3, offset `x` fixed by continuity at the vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SesquiParams {
    m1: f64,
    m2: f64,
    offset: f64,
}

impl SesquiParams {
    pub fn new(m1: f64, m2: f64) -> Result<Self> {
        let offset = solve_offset(m1, m2)?;
        Ok(Self { m1, m2, offset })
    }

    /// `m2 = M - m1`, with `m1` in `(0, M/3]`.
    pub fn from_total(m1: f64, total_mass: f64) -> Result<Self> {
        if !(m1 > 0.0 && m1 <= total_mass / 3.0 * (1.0 + 1e-12)) {
            return Err(GraphError::Domain {
                value: m1,
                domain: format!("(0, {}]", total_mass / 3.0),
            });
        }
        Self::new(m1, total_mass - m1)
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn total_mass(&self) -> f64 {
        self.m1 + self.m2
    }

    /// `|m1 - (m2/2) sech(m2 x/4)|`.
    pub fn continuity_residual(&self) -> f64 {
        (self.m1 - 0.5 * self.m2 * sech(0.25 * self.m2 * self.offset)).abs()
    }

    pub fn closed_energy(&self) -> f64 {
        half_line_minimum(self.m1) + line_minimum(self.m2)
    }
}

fn require_star3(spec: &GraphSpec) -> Result<()> {
    if spec.edge_count() != 3 {
        return Err(GraphError::EdgeCount {
            required: 3,
            actual: spec.edge_count(),
        });
    }
    Ok(())
}

/// Half-soliton on edge 1, the two halves of a line soliton shifted by the
/// offset on edges 2 (peak inside the edge) and 3.
pub fn sesquisoliton(params: &SesquiParams, spec: GraphSpec) -> Result<GraphState> {
    require_star3(&spec)?;
    let SesquiParams { m1, m2, offset } = *params;
    Ok(GraphState::from_fn(spec, |e, x| {
        real(match e {
            0 => half_soliton_profile(m1, x),
            1 => line_soliton_profile(m2, offset, x),
            _ => line_soliton_profile(m2, -offset, x),
        })
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryInfo {
    pub total_mass: f64,
    /// Lagrange multiplier `M^2/36`.
    pub omega: f64,
    /// Closed-form energy `-M^3/216`.
    pub energy: f64,
}

impl StationaryInfo {
    pub fn new(total_mass: f64) -> Self {
        Self {
            total_mass,
            omega: total_mass * total_mass / 36.0,
            energy: -total_mass.powi(3) / 216.0,
        }
    }
}

/// Three equal half-solitons of mass `M/3`: the standing wave.
pub fn stationary_state(total_mass: f64, spec: GraphSpec) -> Result<(GraphState, StationaryInfo)> {
    require_star3(&spec)?;
    require_positive("M", total_mass)?;
    let m = total_mass / 3.0;
    let state = GraphState::from_fn(spec, |_, x| real(half_soliton_profile(m, x)));
    Ok((state, StationaryInfo::new(total_mass)))
}

/// Edge-symmetric standing wave of the discrete problem at mass `M`.
///
/// Newton's method on `-L u - u^3 + omega u = 0` with `||u||^2 = M`,
/// restricted to states equal on every edge. On that subspace the vertex row
/// of the Kirchhoff stencil is `2 (u_1 - u_0)/h^2` for any edge count, so a
/// single tridiagonal system per step suffices. Seeded by the half-soliton of
/// mass `M/E`. Returns the state and the discrete multiplier.
pub fn discrete_stationary_state(total_mass: f64, spec: GraphSpec) -> Result<(GraphState, f64)> {
    require_positive("M", total_mass)?;
    let e_count = spec.edge_count() as f64;
    let edge_mass = total_mass / e_count;
    let h = spec.spacing();
    let h2 = h * h;
    // unknowns: nodes 0..=N-2; node N-1 is the Dirichlet node
    let n = spec.points_per_edge() - 1;
    let weight = |j: usize| if j == 0 { 0.5 * h } else { h };

    let mut u: Vec<f64> = (0..n)
        .map(|j| half_soliton_profile(edge_mass, spec.coordinate(j)))
        .collect();
    let mut omega = edge_mass * edge_mass / 4.0;

    let lap = |u: &[f64], j: usize| -> f64 {
        if j == 0 {
            2.0 * (u[1] - u[0]) / h2
        } else {
            let right = if j + 1 < n { u[j + 1] } else { 0.0 };
            (u[j - 1] - 2.0 * u[j] + right) / h2
        }
    };

    let mut converged = false;
    let mut last_update = f64::INFINITY;
    for _ in 0..50 {
        let residual: Vec<Complex64> = (0..n)
            .map(|j| real(-lap(&u, j) - u[j].powi(3) + omega * u[j]))
            .collect();
        let constraint = 0.5 * ((0..n).map(|j| weight(j) * u[j] * u[j]).sum::<f64>() - edge_mass);

        let diag: Vec<Complex64> = (0..n)
            .map(|j| real(2.0 / h2 - 3.0 * u[j] * u[j] + omega))
            .collect();
        let sub = vec![real(-1.0 / h2); n];
        let mut sup = vec![real(-1.0 / h2); n];
        sup[0] = real(-2.0 / h2);

        let mut a = residual;
        solve_tridiagonal(&sub, &diag, &sup, &mut a);
        let mut b: Vec<Complex64> = u.iter().map(|&v| real(v)).collect();
        solve_tridiagonal(&sub, &diag, &sup, &mut b);

        let ua: f64 = (0..n).map(|j| weight(j) * u[j] * a[j].re).sum();
        let ub: f64 = (0..n).map(|j| weight(j) * u[j] * b[j].re).sum();
        let d_omega = (constraint - ua) / ub;
        last_update = 0.0;
        for j in 0..n {
            let du = -a[j].re - d_omega * b[j].re;
            u[j] += du;
            last_update = last_update.max(du.abs());
        }
        omega += d_omega;
        if last_update <= 1e-14 * edge_mass.max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(GraphError::StepFailure {
            iterations: 50,
            last_update,
        });
    }
    let state = GraphState::from_fn(spec, |_, _| real(0.0));
    let mut state = state;
    for e in 0..spec.edge_count() {
        let edge = state.edge_mut(e);
        for j in 0..n {
            edge[j] = real(u[j]);
        }
    }
    Ok((state, omega))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::energy;
    use approx::assert_relative_eq;

    fn spec3() -> GraphSpec {
        GraphSpec::star3(30.0, 4096).unwrap()
    }

    /// sech(u) = target by bisection, independent of acosh.
    fn bisect_sech(target: f64) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, 50.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 1.0 / mid.cosh() > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn half_soliton_values() {
        let s = spec3();
        let v = half_soliton(2.0, &s).unwrap();
        assert_relative_eq!(v[0].re, 2f64.sqrt(), max_relative = 1e-15);
        assert!(v.windows(2).all(|w| w[1].re < w[0].re && w[1].re > 0.0));
        let st = half_soliton_state(2.0, 0, s).unwrap();
        assert_relative_eq!(st.mass(), 2.0, max_relative = 1e-6);
        let e = energy(&st);
        assert_relative_eq!(e.total, half_line_minimum(2.0), max_relative = 5e-4);
        assert_relative_eq!(half_line_minimum(2.0), -1.0 / 3.0);
        assert!(half_soliton(0.0, &s).is_err());
    }

    #[test]
    fn line_soliton_values() {
        let s = spec3();
        let line = line_soliton(4.0, 0.0, &s).unwrap();
        let mid = line.values.len() / 2;
        assert_relative_eq!(line.values[mid].re, 2f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(line.mass(), 4.0, max_relative = 1e-6);
        assert_relative_eq!(line.energy(), -2.0 / 3.0, max_relative = 5e-4);
        let shifted = line_soliton(4.0, 1.7, &s).unwrap();
        assert!((shifted.mass() - line.mass()).abs() < 1e-8);
        assert!((shifted.energy() - line.energy()).abs() < 1e-8);
    }

    #[test]
    fn offsets_against_bisection() {
        assert_eq!(solve_offset(2.0, 4.0).unwrap(), 0.0);
        // m2 = 4: x = (4/m2) u with sech(u) = 2 m1/m2
        assert_relative_eq!(solve_offset(1.0, 4.0).unwrap(), bisect_sech(0.5), max_relative = 1e-12);
        assert_relative_eq!(solve_offset(1.0, 4.0).unwrap(), 1.3169579, max_relative = 1e-7);
        assert_relative_eq!(solve_offset(0.1, 4.0).unwrap(), bisect_sech(0.05), max_relative = 1e-12);
        assert_relative_eq!(solve_offset(0.1, 4.0).unwrap(), 3.6882539, max_relative = 1e-7);
        assert!(matches!(
            solve_offset(3.0, 4.0),
            Err(GraphError::NoAdmissibleOffset { .. })
        ));
        assert!(solve_offset(0.0, 4.0).is_err());
    }

    #[test]
    fn bisection_fallback_for_tiny_m1() {
        let m1 = 1e-200;
        let x = solve_offset(m1, 6.0).unwrap();
        // sech(u) ~ 2 e^{-u}: u = ln(2 m2/(2 m1)) = ln(6e200)
        let expected = 4.0 / 6.0 * (6.0f64.ln() + 200.0 * 10f64.ln());
        assert_relative_eq!(x, expected, max_relative = 1e-12);
        // agrees with acosh just above the switch-over
        let m1: f64 = 1e-140;
        let direct = 4.0 / 6.0 * (6.0 / (2.0 * m1)).acosh();
        assert_relative_eq!(offset_by_bisection(m1, 6.0), direct, max_relative = 1e-13);
    }

    #[test]
    fn sesqui_params_invariants() {
        for &(m1, m2) in &[(1.0, 4.0), (0.1, 4.0), (2.0, 4.0), (0.3, 7.5), (1e-6, 6.0)] {
            let p = SesquiParams::new(m1, m2).unwrap();
            assert!(p.continuity_residual() <= 1e-12 * m2, "{m1} {m2}");
            assert_eq!(p.offset() == 0.0, 2.0 * m1 == m2);
        }
        assert!(SesquiParams::from_total(2.1, 6.0).is_err());
        assert!(SesquiParams::from_total(0.0, 6.0).is_err());
    }

    #[test]
    fn offset_decreasing_in_m1() {
        let xs: Vec<f64> = [0.01, 0.1, 0.5, 1.0, 1.5, 1.99]
            .iter()
            .map(|&m1| solve_offset(m1, 4.0).unwrap())
            .collect();
        assert!(xs.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn symmetric_sesquisoliton() {
        let p = SesquiParams::new(2.0, 4.0).unwrap();
        let s = sesquisoliton(&p, spec3()).unwrap();
        assert_eq!(s.edge(0), s.edge(1));
        assert_eq!(s.edge(1), s.edge(2));
        assert_relative_eq!(s.edge(0)[0].re, 2f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn asymmetric_sesquisoliton() {
        let p = SesquiParams::new(1.0, 4.0).unwrap();
        let s = sesquisoliton(&p, spec3()).unwrap();
        assert!(s.vertex_defect() <= 1e-10);
        assert_relative_eq!(s.mass(), 5.0, max_relative = 1e-6);
        let peak = s.edge(1).iter().map(|z| z.re).fold(0.0, f64::max);
        assert!(peak > s.edge(1)[0].re);
        let masses = s.edge_masses();
        assert_relative_eq!(masses[0], 1.0, max_relative = 1e-6);
        assert_relative_eq!(masses[1] + masses[2], 4.0, max_relative = 1e-6);
        assert!(masses[1] > masses[2]);
        let closed = energy_sesqui_closed(1.0, 5.0).unwrap();
        assert_relative_eq!(closed, -1.0 / 24.0 - 64.0 / 96.0);
        assert_relative_eq!(energy(&s).total, closed, max_relative = 5e-4);
        assert_relative_eq!(p.closed_energy(), closed, max_relative = 1e-15);
    }

    #[test]
    fn sesquisoliton_requires_three_edges() {
        let p = SesquiParams::new(1.0, 4.0).unwrap();
        let spec = GraphSpec::new(4, 30.0, 100).unwrap();
        assert!(matches!(
            sesquisoliton(&p, spec),
            Err(GraphError::EdgeCount { required: 3, actual: 4 })
        ));
    }

    #[test]
    fn stationary_values() {
        let (state, info) = stationary_state(6.0, spec3()).unwrap();
        assert_eq!(info.omega, 1.0);
        assert_eq!(info.energy, -1.0);
        assert_relative_eq!(energy(&state).total, -1.0, max_relative = 5e-4);
        let sesq = sesquisoliton(&SesquiParams::from_total(2.0, 6.0).unwrap(), spec3()).unwrap();
        assert_eq!(state, sesq);
        let info3 = StationaryInfo::new(3.0);
        assert_eq!(info3.omega, 0.25);
        assert_eq!(info3.energy, -0.125);
    }

    #[test]
    fn closed_energy_properties() {
        assert_relative_eq!(energy_sesqui_closed(2.0, 6.0).unwrap(), -1.0, max_relative = 1e-15);
        assert!((energy_sesqui_closed(1e-9, 6.0).unwrap() + 2.25).abs() < 1e-8);
        let vals: Vec<f64> = [0.5, 1.0, 1.5, 2.0]
            .iter()
            .map(|&m| energy_sesqui_closed(m, 6.0).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
        assert!(energy_sesqui_closed(0.0, 6.0).is_err());
        assert!(energy_sesqui_closed(2.01, 6.0).is_err());
        assert_eq!(energy_infimum(6.0).unwrap(), -2.25);
        assert_eq!(energy_infimum(0.0).unwrap(), 0.0);
        assert_eq!(energy_infimum(4.0).unwrap(), 8.0 * energy_infimum(2.0).unwrap());
    }

    #[test]
    fn closed_energy_curvature_at_stationary_point() {
        let f = |m1: f64| -m1.powi(3) / 24.0 + (m1 - 6.0).powi(3) / 96.0;
        let s = 1e-3;
        let first = (f(2.0 + s) - f(2.0 - s)) / (2.0 * s);
        let second = (f(2.0 + s) + f(2.0 - s) - 2.0 * f(2.0)) / (s * s);
        assert!(first.abs() < 1e-6);
        assert_relative_eq!(second, -6.0 / 8.0, max_relative = 1e-6);
    }

    #[test]
    fn discrete_energy_tracks_closed_form() {
        let s = spec3();
        for m1 in [0.25, 0.75, 1.25, 2.0] {
            let p = SesquiParams::from_total(m1, 6.0).unwrap();
            let st = sesquisoliton(&p, s).unwrap();
            let closed = energy_sesqui_closed(m1, 6.0).unwrap();
            assert!((energy(&st).total - closed).abs() < 1e-4, "m1 = {m1}");
        }
    }

    #[test]
    fn straightened_edges_match_line_soliton() {
        let s = spec3();
        let p = SesquiParams::new(1.0, 4.0).unwrap();
        let st = sesquisoliton(&p, s).unwrap();
        let line = st.straighten(1, 2).unwrap();
        let reference = line_soliton(4.0, -p.offset(), &s).unwrap();
        for (a, b) in line.values.iter().zip(&reference.values) {
            assert!((a - b).norm() <= 1e-10);
        }
    }

    #[test]
    fn discrete_standing_wave() {
        let spec = GraphSpec::star3(30.0, 1024).unwrap();
        let (state, omega) = discrete_stationary_state(6.0, spec).unwrap();
        assert!((omega - 1.0).abs() < 1e-3);
        assert_relative_eq!(state.mass(), 6.0, max_relative = 1e-12);
        let (sampled, _) = stationary_state(6.0, spec).unwrap();
        let diff = state
            .values()
            .iter()
            .zip(sampled.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-3);
        let r = crate::operators::el_residual(&state, omega);
        assert!(r < 1e-10, "residual {r}");
    }
}
