//! Star-graph geometry, sampled states and trapezoid quadrature.
//!
//! A state lives on `E` half-lines truncated at `x = L`, each sampled on the
//! uniform grid `x_j = j*h`, `h = L/(N-1)`. Node 0 of every edge is the vertex.
//! The vertex value is stored once per edge, so continuity is something a
//! state *has*, not something the storage imposes.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GraphError, Result};

/// Tolerance on the vertex mismatch for operations that need a continuous state.
pub const CONTINUITY_TOL: f64 = 1e-8;

/// Discretization geometry of an `E`-edge star graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    #[serde(rename = "edges")]
    edge_count: usize,
    #[serde(rename = "length")]
    truncation_length: f64,
    #[serde(rename = "points")]
    points_per_edge: usize,
}

impl GraphSpec {
    pub fn new(edge_count: usize, truncation_length: f64, points_per_edge: usize) -> Result<Self> {
        if edge_count < 2 {
            return Err(GraphError::InvalidSpec(format!(
                "edge count {edge_count} < 2"
            )));
        }
        if !(truncation_length.is_finite() && truncation_length > 0.0) {
            return Err(GraphError::InvalidSpec(format!(
                "truncation length {truncation_length} must be positive"
            )));
        }
        if points_per_edge < 3 {
            return Err(GraphError::InvalidSpec(format!(
                "points per edge {points_per_edge} < 3"
            )));
        }
        Ok(Self {
            edge_count,
            truncation_length,
            points_per_edge,
        })
    }

    /// The three-edge Y junction.
    pub fn star3(truncation_length: f64, points_per_edge: usize) -> Result<Self> {
        Self::new(3, truncation_length, points_per_edge)
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn truncation_length(&self) -> f64 {
        self.truncation_length
    }

    pub fn points_per_edge(&self) -> usize {
        self.points_per_edge
    }

    pub fn spacing(&self) -> f64 {
        self.truncation_length / (self.points_per_edge - 1) as f64
    }

    /// Coordinate of node `j` on any edge.
    pub fn coordinate(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    /// Trapezoid weight of node `j` on a single edge.
    pub fn weight(&self, j: usize) -> f64 {
        let h = self.spacing();
        if j == 0 || j + 1 == self.points_per_edge {
            0.5 * h
        } else {
            h
        }
    }

    /// Same geometry with `2N - 1` points (spacing halved).
    pub fn refined(&self) -> Self {
        Self {
            points_per_edge: 2 * self.points_per_edge - 1,
            ..*self
        }
    }

    pub fn with_edges(&self, edge_count: usize) -> Result<Self> {
        Self::new(edge_count, self.truncation_length, self.points_per_edge)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("grid spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GraphSpec =
            serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        Self::new(raw.edge_count, raw.truncation_length, raw.points_per_edge)
    }
}

/// Complex samples `Psi_e(j*h)` on every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphState {
    spec: GraphSpec,
    // edge-major, `E * N`
    values: Vec<Complex64>,
}

impl GraphState {
    pub fn zeros(spec: GraphSpec) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); spec.edge_count * spec.points_per_edge],
            spec,
        }
    }

    /// Samples `f(edge, x)` on every node.
    pub fn from_fn(spec: GraphSpec, mut f: impl FnMut(usize, f64) -> Complex64) -> Self {
        let n = spec.points_per_edge;
        let mut values = Vec::with_capacity(spec.edge_count * n);
        for e in 0..spec.edge_count {
            for j in 0..n {
                values.push(f(e, spec.coordinate(j)));
            }
        }
        Self { spec, values }
    }

    pub fn from_edges(spec: GraphSpec, edges: Vec<Vec<Complex64>>) -> Result<Self> {
        if edges.len() != spec.edge_count
            || edges.iter().any(|e| e.len() != spec.points_per_edge)
        {
            return Err(GraphError::ShapeMismatch {
                edges: edges.len(),
                points: edges.first().map_or(0, Vec::len),
            });
        }
        let values: Vec<Complex64> = edges.into_iter().flatten().collect();
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(GraphError::DegenerateState("non-finite sample".into()));
        }
        Ok(Self { spec, values })
    }

    pub fn spec(&self) -> &GraphSpec {
        &self.spec
    }

    pub fn edge(&self, e: usize) -> &[Complex64] {
        let n = self.spec.points_per_edge;
        &self.values[e * n..(e + 1) * n]
    }

    pub fn edge_mut(&mut self, e: usize) -> &mut [Complex64] {
        let n = self.spec.points_per_edge;
        &mut self.values[e * n..(e + 1) * n]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// `max_e |Psi_e(0) - Psi_0(0)|`.
    pub fn vertex_defect(&self) -> f64 {
        let v0 = self.edge(0)[0];
        (1..self.spec.edge_count)
            .map(|e| (self.edge(e)[0] - v0).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_vertex_continuous(&self, tol: f64) -> bool {
        self.vertex_defect() <= tol
    }

    pub fn require_continuous(&self, tol: f64) -> Result<()> {
        let defect = self.vertex_defect();
        if defect > tol {
            return Err(GraphError::ContinuityDefect {
                defect,
                tolerance: tol,
            });
        }
        Ok(())
    }

    /// Mean of the per-edge vertex samples.
    pub fn vertex_value(&self) -> Complex64 {
        let e = self.spec.edge_count;
        (0..e).map(|k| self.edge(k)[0]).sum::<Complex64>() / e as f64
    }

    /// Projection onto states vanishing at the far end `x = L`.
    pub fn with_far_end_pinned(mut self) -> Self {
        let n = self.spec.points_per_edge;
        for e in 0..self.spec.edge_count {
            self.values[e * n + n - 1] = Complex64::new(0.0, 0.0);
        }
        self
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            spec: self.spec,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// `self + a * other`.
    pub fn add_scaled(&self, a: Complex64, other: &GraphState) -> Self {
        debug_assert_eq!(self.spec, other.spec);
        Self {
            spec: self.spec,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| x + a * y)
                .collect(),
        }
    }

    /// Exchanges the samples of two edges.
    pub fn swap_edges(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let n = self.spec.points_per_edge;
        for j in 0..n {
            self.values.swap(a * n + j, b * n + j);
        }
    }

    /// New state whose edge `k` is edge `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.spec.points_per_edge;
        let mut values = Vec::with_capacity(self.values.len());
        for &src in perm {
            values.extend_from_slice(&self.values[src * n..(src + 1) * n]);
        }
        Self {
            spec: self.spec,
            values,
        }
    }

    /// Weighted inner product `Re sum_e sum_j w_j conj(a) b`.
    pub fn inner(&self, other: &GraphState) -> f64 {
        self.inner_complex(other).re
    }

    /// `sum_e sum_j w_j conj(a) b` without taking the real part.
    pub fn inner_complex(&self, other: &GraphState) -> Complex64 {
        let n = self.spec.points_per_edge;
        let mut acc = Complex64::new(0.0, 0.0);
        for e in 0..self.spec.edge_count {
            let (a, b) = (self.edge(e), other.edge(e));
            acc += 0.5 * a[0].conj() * b[0];
            acc += (1..n - 1).map(|j| a[j].conj() * b[j]).sum::<Complex64>();
            acc += 0.5 * a[n - 1].conj() * b[n - 1];
        }
        acc * self.spec.spacing()
    }

    fn edge_integral(&self, e: usize, f: impl Fn(Complex64) -> f64) -> f64 {
        let n = self.spec.points_per_edge;
        let v = self.edge(e);
        let inner: f64 = v[1..n - 1].iter().map(|&z| f(z)).sum();
        self.spec.spacing() * (0.5 * f(v[0]) + inner + 0.5 * f(v[n - 1]))
    }

    /// Trapezoid mass of each edge.
    pub fn edge_masses(&self) -> Vec<f64> {
        (0..self.spec.edge_count)
            .map(|e| self.edge_integral(e, |z| z.norm_sqr()))
            .collect()
    }

    /// `||Psi||^2` by the composite trapezoid rule.
    pub fn mass(&self) -> f64 {
        self.edge_masses().iter().sum()
    }

    /// `sum_e int |Psi_e|^p` (no root).
    pub fn lp_integral(&self, p: f64) -> f64 {
        (0..self.spec.edge_count)
            .map(|e| self.edge_integral(e, |z| z.norm().powf(p)))
            .sum()
    }

    /// Quartic integral `sum_e int |Psi_e|^4`, exact for the trapezoid rule.
    pub fn quartic_integral(&self) -> f64 {
        (0..self.spec.edge_count)
            .map(|e| self.edge_integral(e, |z| z.norm_sqr() * z.norm_sqr()))
            .sum()
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(GraphError::Domain {
                value: p,
                domain: "p >= 1".into(),
            });
        }
        let integral = if p == 4.0 {
            self.quartic_integral()
        } else if p == 2.0 {
            self.mass()
        } else {
            self.lp_integral(p)
        };
        Ok(integral.powf(1.0 / p))
    }

    /// `sum_e sum_{j<N-1} h |(Psi(j+1) - Psi(j))/h|^2`, the discrete `||Psi'||^2`.
    pub fn kinetic_form(&self) -> f64 {
        let h = self.spec.spacing();
        let acc: f64 = (0..self.spec.edge_count)
            .map(|e| {
                self.edge(e)
                    .windows(2)
                    .map(|w| (w[1] - w[0]).norm_sqr())
                    .sum::<f64>()
            })
            .sum();
        acc / h
    }

    /// Scales the state onto the sphere `||Psi||^2 = target_mass`.
    pub fn rescaled_to_mass(&self, target_mass: f64) -> Result<Self> {
        if !(target_mass > 0.0) {
            return Err(GraphError::Domain {
                value: target_mass,
                domain: "target mass > 0".into(),
            });
        }
        let m = self.mass();
        if !(m > 0.0) {
            return Err(GraphError::DegenerateState("zero mass".into()));
        }
        Ok(self.scaled(Complex64::new((target_mass / m).sqrt(), 0.0)))
    }

    /// Glues edge `left` (reflected onto `xi < 0`) and edge `right` into a
    /// function on `[-L, L]`. The vertex sample is taken from `right`.
    pub fn straighten(&self, left: usize, right: usize) -> Result<LineSamples> {
        if left == right || left >= self.spec.edge_count || right >= self.spec.edge_count {
            return Err(GraphError::InvalidSpec(format!(
                "cannot straighten edges {left} and {right}"
            )));
        }
        let defect = (self.edge(left)[0] - self.edge(right)[0]).norm();
        if defect > CONTINUITY_TOL {
            return Err(GraphError::ContinuityDefect {
                defect,
                tolerance: CONTINUITY_TOL,
            });
        }
        let n = self.spec.points_per_edge;
        let mut values = Vec::with_capacity(2 * n - 1);
        values.extend(self.edge(left)[1..].iter().rev());
        values.extend_from_slice(self.edge(right));
        Ok(LineSamples {
            spacing: self.spec.spacing(),
            values,
        })
    }

    /// CSV with header `edge,index,x,re,im`; edges are numbered from 1.
    pub fn write_csv<W: Write>(&self, out: &mut W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "edge,index,x,re,im")?;
        for e in 0..self.spec.edge_count {
            for (j, z) in self.edge(e).iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    e + 1,
                    j,
                    fmt_num(self.spec.coordinate(j)),
                    fmt_num(z.re),
                    fmt_num(z.im)
                )?;
            }
        }
        Ok(())
    }

    /// Reads the CSV written by [`GraphState::write_csv`]; `#` lines are skipped.
    pub fn read_csv<R: BufRead>(spec: GraphSpec, input: R) -> Result<Self> {
        let mut state = Self::zeros(spec);
        let mut seen = vec![false; state.values.len()];
        let mut header = false;
        for line in input.lines() {
            let line = line.map_err(|e| GraphError::Parse(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !header {
                if line != "edge,index,x,re,im" {
                    return Err(GraphError::Parse(format!("unexpected header {line:?}")));
                }
                header = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(GraphError::Parse(format!("bad row {line:?}")));
            }
            let parse_err = |s: &str| GraphError::Parse(format!("bad number {s:?}"));
            let e: usize = fields[0].parse().map_err(|_| parse_err(fields[0]))?;
            let j: usize = fields[1].parse().map_err(|_| parse_err(fields[1]))?;
            let re: f64 = fields[3].parse().map_err(|_| parse_err(fields[3]))?;
            let im: f64 = fields[4].parse().map_err(|_| parse_err(fields[4]))?;
            if e == 0 || e > spec.edge_count || j >= spec.points_per_edge {
                return Err(GraphError::Parse(format!("node ({e},{j}) outside the grid")));
            }
            let idx = (e - 1) * spec.points_per_edge + j;
            state.values[idx] = Complex64::new(re, im);
            seen[idx] = true;
        }
        if !seen.iter().all(|&s| s) {
            return Err(GraphError::Parse("missing nodes".into()));
        }
        Ok(state)
    }
}

/// Samples of a function on `[-L, L]` with `2N - 1` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSamples {
    pub spacing: f64,
    pub values: Vec<Complex64>,
}

impl LineSamples {
    pub fn from_fn(spacing: f64, half_points: usize, f: impl Fn(f64) -> Complex64) -> Self {
        let offset = (half_points - 1) as i64;
        let values = (0..2 * half_points - 1)
            .map(|k| f((k as i64 - offset) as f64 * spacing))
            .collect();
        Self { spacing, values }
    }

    pub fn coordinate(&self, k: usize) -> f64 {
        let offset = (self.values.len() / 2) as i64;
        (k as i64 - offset) as f64 * self.spacing
    }

    fn trapezoid(&self, f: impl Fn(Complex64) -> f64) -> f64 {
        let n = self.values.len();
        let inner: f64 = self.values[1..n - 1].iter().map(|&z| f(z)).sum();
        self.spacing * (0.5 * f(self.values[0]) + inner + 0.5 * f(self.values[n - 1]))
    }

    pub fn mass(&self) -> f64 {
        self.trapezoid(|z| z.norm_sqr())
    }

    /// Discrete `E_2 = 1/2 ||psi'||^2 - 1/4 ||psi||_4^4` on the line.
    pub fn energy(&self) -> f64 {
        let kinetic: f64 = self
            .values
            .windows(2)
            .map(|w| (w[1] - w[0]).norm_sqr())
            .sum::<f64>()
            / self.spacing;
        let quartic = self.trapezoid(|z| z.norm_sqr() * z.norm_sqr());
        0.5 * kinetic - 0.25 * quartic
    }
}

/// Decimal with 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn half_soliton(m: f64, x: f64) -> f64 {
        m / 2f64.sqrt() / (0.5 * m * x).cosh()
    }

    #[test]
    fn spec_validation() {
        assert!(GraphSpec::new(1, 30.0, 100).is_err());
        assert!(GraphSpec::new(3, 0.0, 100).is_err());
        assert!(GraphSpec::new(3, -1.0, 100).is_err());
        assert!(GraphSpec::new(3, 30.0, 2).is_err());
        let s = GraphSpec::new(3, 30.0, 4096).unwrap();
        assert_eq!(s.spacing(), 30.0 / 4095.0);
        assert_eq!(s.coordinate(0), 0.0);
    }

    #[test]
    fn spec_json_round_trip() {
        let s = GraphSpec::new(3, 30.0, 4096).unwrap();
        assert_eq!(s.to_json(), r#"{"edges":3,"length":30.0,"points":4096}"#);
        assert_eq!(GraphSpec::from_json(&s.to_json()).unwrap(), s);
        assert!(GraphSpec::from_json(r#"{"edges":3,"length":-2.0,"points":10}"#).is_err());
    }

    #[test]
    fn zero_state_quadratures() {
        let z = GraphState::zeros(GraphSpec::new(3, 10.0, 64).unwrap());
        assert_eq!(z.mass(), 0.0);
        assert_eq!(z.lp_norm(4.0).unwrap(), 0.0);
        assert_eq!(z.kinetic_form(), 0.0);
        assert!(z.rescaled_to_mass(1.0).is_err());
        assert!(z.lp_norm(0.5).is_err());
    }

    #[test]
    fn half_soliton_mass_and_quartic() {
        let spec = GraphSpec::new(3, 30.0, 4096).unwrap();
        let s = GraphState::from_fn(spec, |e, x| if e == 0 { c(half_soliton(2.0, x)) } else { c(0.0) });
        assert_relative_eq!(s.mass(), 2.0, max_relative = 1e-6);
        // int_0^inf sech^4 = 2/3 gives ||phi_m||_4^4 = m^3/3
        assert_relative_eq!(s.lp_norm(4.0).unwrap(), (8.0f64 / 3.0).powf(0.25), max_relative = 1e-6);
        // ||phi_m'||^2 = m^3/12
        assert_relative_eq!(s.kinetic_form(), 2.0 / 3.0, max_relative = 5e-4);
        let masses = s.edge_masses();
        assert_eq!(masses[1], 0.0);
        assert_eq!(masses[2], 0.0);
    }

    #[test]
    fn half_soliton_mass_error_is_roundoff() {
        // The even profile makes the trapezoid rule spectrally accurate on [0, L].
        for n in [513, 1025, 2049] {
            let spec = GraphSpec::new(2, 30.0, n).unwrap();
            let s = GraphState::from_fn(spec, |e, x| if e == 0 { c(half_soliton(2.0, x)) } else { c(0.0) });
            assert!((s.mass() - 2.0).abs() < 1e-13, "n={n}: {}", s.mass() - 2.0);
        }
    }

    #[test]
    fn trapezoid_second_order_on_shifted_profile() {
        // Edge 2 of a sesquisoliton: a soliton half shifted off the vertex, so
        // its slope at x = 0 is nonzero and the trapezoid error is O(h^2).
        let (m2, shift) = (4.0, 4.0 / 4.0 * 2f64.acosh());
        let exact = {
            // int_0^inf (m/(2 sqrt2))^2 sech^2(m(x-s)/4) dx = (m/2)(1 + tanh(m s/4))
            0.5 * m2 * (1.0 + (m2 * shift / 4.0).tanh())
        };
        let err = |n: usize| {
            let spec = GraphSpec::new(2, 30.0, n).unwrap();
            let s = GraphState::from_fn(spec, |e, x| {
                if e == 0 {
                    c(m2 / (2.0 * 2f64.sqrt()) / (m2 * (x - shift) / 4.0).cosh())
                } else {
                    c(0.0)
                }
            });
            (s.mass() - exact).abs()
        };
        let (e1, e2, e3) = (err(513), err(1025), err(2049));
        for ratio in [e1 / e2, e2 / e3] {
            assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn linear_ramp_kinetic_exact() {
        let spec = GraphSpec::new(3, 1.0, 17).unwrap();
        let s = GraphState::from_fn(spec, |e, x| if e == 0 { c(x) } else { c(0.0) });
        assert_relative_eq!(s.kinetic_form(), 1.0, epsilon = 1e-14);
        let constant = GraphState::from_fn(spec, |_, _| c(2.5));
        assert_eq!(constant.kinetic_form(), 0.0);
    }

    #[test]
    fn rescale_cases() {
        let spec = GraphSpec::new(3, 5.0, 33).unwrap();
        let s = GraphState::from_fn(spec, |e, x| c((1.0 + e as f64) * (-x).exp()));
        let s4 = s.rescaled_to_mass(4.0).unwrap();
        assert_relative_eq!(s4.mass(), 4.0, max_relative = 1e-14);
        let s1 = s4.rescaled_to_mass(1.0).unwrap();
        for (a, b) in s1.values().iter().zip(s4.values()) {
            assert_relative_eq!(a.re, 0.5 * b.re, max_relative = 1e-14);
        }
        let same = s4.rescaled_to_mass(4.0).unwrap();
        for (a, b) in same.values().iter().zip(s4.values()) {
            assert_relative_eq!(a.re, b.re, max_relative = 1e-14);
        }
    }

    #[test]
    fn straighten_glues_edges() {
        let spec = GraphSpec::new(3, 4.0, 9).unwrap();
        let s = GraphState::from_fn(spec, |e, x| c(1.0 + e as f64 + x));
        let err = s.straighten(1, 2).unwrap_err();
        assert!(matches!(err, GraphError::ContinuityDefect { .. }));

        let s = GraphState::from_fn(spec, |e, x| c((-x).exp() * (1.0 + e as f64 * x)));
        let line = s.straighten(1, 2).unwrap();
        assert_eq!(line.values.len(), 17);
        assert_eq!(line.values[8], s.edge(2)[0]);
        for j in 1..9 {
            assert_eq!(line.values[8 - j], s.edge(1)[j]);
            assert_eq!(line.values[8 + j], s.edge(2)[j]);
        }
        let masses = s.edge_masses();
        assert_relative_eq!(line.mass(), masses[1] + masses[2], max_relative = 1e-14);
        assert_eq!(line.coordinate(0), -4.0);
        assert!(s.straighten(1, 1).is_err());

        let zero = GraphState::zeros(spec).straighten(0, 1).unwrap();
        assert!(zero.values.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn symmetric_state_straightens_even() {
        let spec = GraphSpec::new(3, 6.0, 25).unwrap();
        let s = GraphState::from_fn(spec, |_, x| c(1.0 / x.cosh()));
        let line = s.straighten(0, 1).unwrap();
        let n = line.values.len();
        for k in 0..n {
            assert_eq!(line.values[k], line.values[n - 1 - k]);
        }
    }

    #[test]
    fn csv_round_trip() {
        let spec = GraphSpec::new(3, 2.0, 5).unwrap();
        let s = GraphState::from_fn(spec, |e, x| Complex64::new(x + e as f64, -x * 0.1));
        let mut buf = Vec::new();
        s.write_csv(&mut buf, &["test".into()]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# test\nedge,index,x,re,im\n1,0,"));
        let back = GraphState::read_csv(spec, &buf[..]).unwrap();
        assert_eq!(back, s);
        assert!(GraphState::read_csv(spec, &b"edge,index,x,re,im\n"[..]).is_err());
    }

    #[test]
    fn permute_and_defect() {
        let spec = GraphSpec::new(3, 2.0, 5).unwrap();
        let s = GraphState::from_fn(spec, |e, x| c(e as f64 + x));
        assert_relative_eq!(s.vertex_defect(), 2.0);
        let p = s.permuted(&[2, 0, 1]);
        assert_eq!(p.edge(0), s.edge(2));
        assert_eq!(p.edge(1), s.edge(0));
        let mut w = s.clone();
        w.swap_edges(0, 2);
        assert_eq!(w.edge(0), s.edge(2));
        let pinned = s.with_far_end_pinned();
        assert!(pinned.edge(1)[4].norm() == 0.0);
    }
}
