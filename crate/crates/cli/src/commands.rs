use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use graphnls::dynamics::{evolve as run_evolution, measure_omega, phase_slope, EvolutionConfig};
use graphnls::landscape::{
    asymmetric_perturbation, gradient_flow_fixed_mass, minimizing_sequence_demo,
    scan_dilation_curve, scan_sesqui_curve, symmetric_perturbation, CurveScan, FlowStatus,
};
use graphnls::profiles::{
    discrete_stationary_state, energy_infimum, half_soliton_state, sesquisoliton, stationary_state,
    SesquiParams, StationaryInfo,
};
use graphnls::sampling::random_continuous_state;
use graphnls::verify::{run_battery, VerifyConfig};
use graphnls::{energy, GraphError, GraphSpec, GraphState};

use crate::config::{parse_range, ConfigError, Format, RunConfig};
use crate::{EvolveArgs, FlowArgs, Initial, Perturbation, ProfileKind, ScanCurve};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// 2 for bad input (configuration, domain, admissibility), 1 otherwise.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match e.downcast_ref::<GraphError>() {
        Some(
            GraphError::InvalidSpec(_)
            | GraphError::Domain { .. }
            | GraphError::NoAdmissibleOffset { .. }
            | GraphError::EdgeCount { .. }
            | GraphError::Truncation { .. }
            | GraphError::ZeroEdgeMass { .. },
        ) => 2,
        _ => 1,
    }
}

fn header(config: &RunConfig, spec: &GraphSpec, command: &str) -> Vec<String> {
    vec![
        format!("graphnls {VERSION}"),
        format!("command: {command}"),
        format!("config: {}", config.echo()),
        format!(
            "grid: edges={} length={} points={} spacing={}",
            spec.edge_count(),
            spec.truncation_length(),
            spec.points_per_edge(),
            spec.spacing()
        ),
    ]
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<fs::File>)> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    let path = dir.join(name);
    let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok((path, BufWriter::new(file)))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let (path, mut w) = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(path)
}

fn ext(config: &RunConfig) -> &'static str {
    match config.format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn require_three_edges(config: &RunConfig) -> Result<()> {
    if config.edges != 3 {
        return Err(GraphError::EdgeCount {
            required: 3,
            actual: config.edges,
        }
        .into());
    }
    Ok(())
}

pub fn verify(config: &RunConfig) -> Result<u8> {
    require_three_edges(config)?;
    let report = run_battery(VerifyConfig {
        total_mass: config.total_mass,
        length: config.length,
        points: config.points,
        minseq_length: 2.0 * config.length,
        dt: config.dt,
        t_final: config.t_final,
        seed: config.seed,
    });
    for k in 1..=10u8 {
        println!(
            "criterion {k:>2}: {}",
            if report.criterion_passed(k) { "PASS" } else { "FAIL" }
        );
    }
    for c in report.failures() {
        println!(
            "  failed [{}] {}: observed {:e}, expected {:e}, tolerance {:e}",
            c.criterion, c.name, c.observed, c.expected, c.tolerance
        );
    }
    let mut value = serde_json::to_value(&report)?;
    value["version"] = json!(VERSION);
    let path = write_json(&config.out, "verify_report.json", &value)?;
    println!("wrote {}", path.display());
    Ok(if report.passed { 0 } else { 1 })
}

fn emit_scan(config: &RunConfig, scan: &CurveScan, name: &str, command: &str) -> Result<PathBuf> {
    let file = format!("scan_{name}.{}", ext(config));
    match config.format {
        Format::Csv => {
            let (path, mut w) = create(&config.out, &file)?;
            scan.write_csv(&mut w, &header(config, &scan.spec, command))?;
            w.flush()?;
            Ok(path)
        }
        Format::Json => write_json(&config.out, &file, scan),
    }
}

pub fn scan(config: &RunConfig, curve: &ScanCurve) -> Result<u8> {
    let m = config.total_mass;
    let spec = config.spec()?;
    let (scan, name, command) = match curve {
        ScanCurve::Sesqui { m1 } => {
            let values = parse_range(m1)?;
            let s = scan_sesqui_curve(m, &values, spec)?;
            if !s.discrete_increasing(1e-8) {
                eprintln!("warning: discrete energies are not strictly increasing on this grid");
            }
            (s, "sesqui", format!("scan sesqui --m1 {m1}"))
        }
        ScanCurve::Dilation { lambda } => {
            let values = parse_range(lambda)?;
            let s = scan_dilation_curve(m, &values, spec)?;
            if let Some(i) = s.argmin() {
                println!("minimum at lambda = {}", s.values[i]);
            }
            (s, "dilation", format!("scan dilation --lambda {lambda}"))
        }
        ScanCurve::Minseq { m1 } => {
            let values = parse_range(m1)?;
            let long = GraphSpec::new(config.edges, 2.0 * config.length, config.points)?;
            let s = minimizing_sequence_demo(m, &values, long)?;
            let gaps = s.column("gap").unwrap_or(&[]);
            let ok = gaps.iter().all(|&g| g > 0.0) && gaps.windows(2).all(|w| w[1] < w[0]);
            println!(
                "gaps to -M^3/96 {}",
                if ok { "positive and decreasing" } else { "NOT positive and decreasing" }
            );
            (s, "minseq", format!("scan minseq --m1 {m1}"))
        }
    };
    let path = emit_scan(config, &scan, name, &command)?;
    println!("wrote {} ({} rows)", path.display(), scan.len());
    Ok(0)
}

fn state_json(state: &GraphState) -> serde_json::Value {
    let spec = state.spec();
    let edges: Vec<_> = (0..spec.edge_count())
        .map(|e| {
            let v = state.edge(e);
            json!({
                "edge": e + 1,
                "re": v.iter().map(|z| z.re).collect::<Vec<_>>(),
                "im": v.iter().map(|z| z.im).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "spec": spec, "edges": edges })
}

fn emit_state(config: &RunConfig, state: &GraphState, name: &str, command: &str) -> Result<PathBuf> {
    let file = format!("{name}.{}", ext(config));
    match config.format {
        Format::Csv => {
            let (path, mut w) = create(&config.out, &file)?;
            state.write_csv(&mut w, &header(config, state.spec(), command))?;
            w.flush()?;
            Ok(path)
        }
        Format::Json => {
            let mut value = state_json(state);
            value["header"] = json!(header(config, state.spec(), command));
            write_json(&config.out, &file, &value)
        }
    }
}

pub fn profile(config: &RunConfig, kind: &ProfileKind) -> Result<u8> {
    require_three_edges(config)?;
    let spec = config.spec()?;
    let (state, name, command) = match kind {
        ProfileKind::Stationary => {
            let (s, info) = stationary_state(config.total_mass, spec)?;
            println!(
                "stationary state: M = {}, omega = {}, energy = {}",
                info.total_mass, info.omega, info.energy
            );
            (s, "profile_stationary", "profile stationary".to_string())
        }
        ProfileKind::Sesqui { m1, m2 } => {
            let params = SesquiParams::new(*m1, *m2)?;
            println!(
                "sesquisoliton: m1 = {}, m2 = {}, offset = {}, closed-form energy = {}",
                params.m1(),
                params.m2(),
                params.offset(),
                params.closed_energy()
            );
            (
                sesquisoliton(&params, spec)?,
                "profile_sesqui",
                format!("profile sesqui --m1 {m1} --m2 {m2}"),
            )
        }
    };
    let path = emit_state(config, &state, name, &command)?;
    println!("wrote {}", path.display());
    Ok(0)
}

#[derive(Debug, Serialize)]
struct FlowSummary {
    version: &'static str,
    perturbation: String,
    amount: f64,
    status: FlowStatus,
    iterations: usize,
    initial_energy: f64,
    final_energy: f64,
    lowest_energy: f64,
    stationary_energy: f64,
    infimum: f64,
    gap_to_infimum: f64,
    final_projected_gradient: f64,
    final_peak_edge: usize,
    final_peak_x: f64,
    final_edge_masses: Vec<f64>,
    monotone: bool,
}

fn perturbation_name(p: Perturbation) -> &'static str {
    match p {
        Perturbation::Asymmetric => "asymmetric",
        Perturbation::Symmetric => "symmetric",
        Perturbation::None => "none",
        Perturbation::Random => "random",
    }
}

pub fn flow(config: &RunConfig, args: &FlowArgs) -> Result<u8> {
    let m = config.total_mass;
    let spec = config.spec()?;
    let start = match args.perturbation {
        Perturbation::Asymmetric => {
            require_three_edges(config)?;
            asymmetric_perturbation(m, args.amount, spec)?
        }
        Perturbation::Symmetric => {
            require_three_edges(config)?;
            symmetric_perturbation(m, args.amount, spec)?
        }
        Perturbation::None => {
            require_three_edges(config)?;
            stationary_state(m, spec)?.0
        }
        Perturbation::Random => {
            random_continuous_state(spec, m, &mut ChaCha8Rng::seed_from_u64(config.seed))
        }
    };
    let run = gradient_flow_fixed_mass(&start, args.step, args.max_iters, args.grad_tol)?;
    let name = perturbation_name(args.perturbation);
    let command = format!(
        "flow --perturbation {name} --amount {} --step {} --max-iters {} --grad-tol {}",
        args.amount, args.step, args.max_iters, args.grad_tol
    );
    let trace = &run.trace;
    let last = trace.len() - 1;
    let infimum = energy_infimum(m)?;
    let summary = FlowSummary {
        version: VERSION,
        perturbation: name.into(),
        amount: args.amount,
        status: run.status,
        iterations: run.iterations,
        initial_energy: trace.energies[0],
        final_energy: trace.energies[last],
        lowest_energy: trace.energies.iter().copied().fold(f64::INFINITY, f64::min),
        stationary_energy: StationaryInfo::new(m).energy,
        infimum,
        gap_to_infimum: trace.energies[last] - infimum,
        final_projected_gradient: trace.projected_gradient[last],
        final_peak_edge: trace.peak_edge[last] + 1,
        final_peak_x: trace.peak_x[last],
        final_edge_masses: trace.edge_masses[last].clone(),
        monotone: trace.is_monotone(),
    };

    let file = format!("flow_{name}.{}", ext(config));
    let path = match config.format {
        Format::Csv => {
            let (path, mut w) = create(&config.out, &file)?;
            trace.write_csv(&mut w, &header(config, &spec, &command))?;
            w.flush()?;
            path
        }
        Format::Json => write_json(&config.out, &file, trace)?,
    };
    let summary_path = write_json(&config.out, &format!("flow_{name}_summary.json"), &summary)?;
    println!(
        "flow {:?} after {} iterations: energy {} -> {} (gap to infimum {})",
        run.status, run.iterations, summary.initial_energy, summary.final_energy, summary.gap_to_infimum
    );
    println!("wrote {} and {}", path.display(), summary_path.display());
    Ok(0)
}

#[derive(Debug, Serialize)]
struct EvolveSummary {
    version: &'static str,
    initial: String,
    steps: usize,
    dt: f64,
    t_final: f64,
    measured_omega: Option<f64>,
    phase_slope: Option<f64>,
    phase_fit_error: Option<String>,
    expected_omega: Option<f64>,
    max_mass_drift: f64,
    max_relative_energy_drift: f64,
    max_modulus_drift: f64,
    initial_energy: f64,
    final_energy: f64,
}

fn initial_name(i: Initial) -> &'static str {
    match i {
        Initial::Stationary => "stationary",
        Initial::Sampled => "sampled",
        Initial::HalfSoliton => "half_soliton",
        Initial::Random => "random",
    }
}

pub fn evolve(config: &RunConfig, args: &EvolveArgs) -> Result<u8> {
    let m = config.total_mass;
    let spec = config.spec()?;
    let (start, expected_omega) = match args.initial {
        Initial::Stationary => {
            let (s, _) = discrete_stationary_state(m, spec)?;
            (s, (config.edges == 3).then(|| StationaryInfo::new(m).omega))
        }
        Initial::Sampled => {
            require_three_edges(config)?;
            (stationary_state(m, spec)?.0, Some(StationaryInfo::new(m).omega))
        }
        Initial::HalfSoliton => (half_soliton_state(m, 0, spec)?, None),
        Initial::Random => (
            random_continuous_state(spec, m, &mut ChaCha8Rng::seed_from_u64(config.seed)),
            None,
        ),
    };
    if args.observe_every == 0 {
        bail!(ConfigError("observe-every must be at least 1".into()));
    }
    let evo_config = EvolutionConfig::new(config.dt, config.t_final)?.with_observe_every(args.observe_every);
    let run = run_evolution(&start, &evo_config)?;
    let name = initial_name(args.initial);
    let (omega, slope, fit_error) = match (measure_omega(&run.trace), phase_slope(&run.trace)) {
        (Ok(w), Ok(s)) => (Some(w), Some(s), None),
        (Err(e), _) | (_, Err(e)) => (None, None, Some(e.to_string())),
    };
    let summary = EvolveSummary {
        version: VERSION,
        initial: name.into(),
        steps: run.steps,
        dt: config.dt,
        t_final: config.t_final,
        measured_omega: omega,
        phase_slope: slope,
        phase_fit_error: fit_error,
        expected_omega,
        max_mass_drift: run.max_mass_drift,
        max_relative_energy_drift: run.max_energy_drift,
        max_modulus_drift: run.max_modulus_drift,
        initial_energy: run.trace.energies[0],
        final_energy: energy(&run.state).total,
    };
    let command = format!("evolve --initial {name} --observe-every {}", args.observe_every);
    let file = format!("evolve_{name}.{}", ext(config));
    let path = match config.format {
        Format::Csv => {
            let (path, mut w) = create(&config.out, &file)?;
            run.trace.write_csv(&mut w, &header(config, &spec, &command))?;
            w.flush()?;
            path
        }
        Format::Json => write_json(&config.out, &file, &run.trace)?,
    };
    let summary_path = write_json(&config.out, &format!("evolve_{name}_summary.json"), &summary)?;
    match omega {
        Some(w) => println!("measured omega = {w}"),
        None => println!("phase fit failed: {}", summary.phase_fit_error.as_deref().unwrap_or("")),
    }
    println!(
        "mass drift {:e}, relative energy drift {:e}, modulus drift {:e}",
        run.max_mass_drift, run.max_energy_drift, run.max_modulus_drift
    );
    println!("wrote {} and {}", path.display(), summary_path.display());
    Ok(0)
}
