use std::io::Write;
use std::path::Path;

use log::{debug, info};
use nalgebra::{DMatrix, DVector, Vector3};
use qcorr::state_file::LoadedState;
use qcorr::trajectory::{format_number, round_sig};
use qcorr::{
    bloch::BlochRecord, detect_transitions, deviation_report, full_report, make_trajectory, measurement_budget,
    report_from_record, run_direct_protocol, scaled_record, BellMode, CorrelationReport, DensityMatrix, ReportOptions,
    Scale,
};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Format};
use crate::error::{CliError, CliResult};

/// Recursively rounds every float in a JSON value to 15 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(f64::NAN));
            serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

pub fn to_json_text(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&round_json(v)).expect("json serializes");
    s.push('\n');
    s
}

pub(crate) fn write_file(path: &Path, body: &str) -> CliResult<()> {
    std::fs::write(path, body).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::Input(format!("cannot write output: {e}")))
}

fn opt_number(v: Option<f64>, missing: &str) -> String {
    v.map(format_number).unwrap_or_else(|| missing.to_string())
}

pub fn measure_report(state: &LoadedState, cfg: &ExperimentConfig) -> CliResult<CorrelationReport> {
    let include = cfg.include_local_bloch;
    let report = match state {
        LoadedState::Bell(s) if s.mode() == BellMode::Deviation => {
            deviation_report(&s.deviation_state(cfg.relaxation.epsilon)?, include)?
        }
        LoadedState::Bell(s) => full_report(
            &s.density_matrix(0.0)?,
            2,
            &ReportOptions { scale: Scale::Full, include_local_bloch: include },
        )?,
        LoadedState::Matrix(rho) => full_report(
            rho,
            state.subsystem_dim(),
            &ReportOptions { scale: Scale::Full, include_local_bloch: include },
        )?,
    };
    Ok(report)
}

fn report_text(r: &CorrelationReport) -> String {
    format!(
        "units       {}\nd_g         {}\nq           {}\ntheta       {}\nq_n         {}\nnegativity  {}\n",
        r.units.describe(),
        format_number(r.d_g),
        format_number(r.q),
        opt_number(r.theta, "degenerate"),
        opt_number(r.q_n, "n/a"),
        opt_number(r.negativity, "n/a"),
    )
}

fn report_json(r: &CorrelationReport) -> Value {
    json!({
        "units": r.units,
        "units_note": r.units.describe(),
        "d_g": r.d_g,
        "q": r.q,
        "theta": r.theta,
        "q_n": r.q_n,
        "negativity": r.negativity,
    })
}

fn report_csv(r: &CorrelationReport) -> String {
    let opt = |v: Option<f64>| v.map(format_number).unwrap_or_default();
    format!(
        "d_g,q,theta,q_n,negativity\n{},{},{},{},{}\n",
        format_number(r.d_g),
        format_number(r.q),
        opt(r.theta),
        opt(r.q_n),
        opt(r.negativity)
    )
}

pub fn cmd_measure(cfg: &ExperimentConfig, out: &mut dyn Write) -> CliResult<()> {
    let state = cfg.load_state()?;
    let report = measure_report(&state, cfg)?;
    let body = |f: Format| match f {
        Format::Csv => report_csv(&report),
        Format::Json => to_json_text(report_json(&report)),
    };
    match (&cfg.output, cfg.format) {
        (Some(path), f) => {
            write_file(path, &body(f.unwrap_or(Format::Json)))?;
            emit(out, &report_text(&report))
        }
        (None, Some(f)) => emit(out, &body(f)),
        (None, None) => emit(out, &report_text(&report)),
    }
}

pub fn cmd_evolve(cfg: &ExperimentConfig, out: &mut dyn Write) -> CliResult<()> {
    let LoadedState::Bell(state) = cfg.load_state()? else {
        return Err(CliError::Input("evolve needs a Bell-diagonal state (kind = \"bell\")".into()));
    };
    info!("evolving {:?} over {:?}", state.coefficients(), cfg.grid);
    let traj = make_trajectory(&state, &cfg.relaxation, &cfg.grid, cfg.include_local_bloch)?;
    let transitions = detect_transitions(&traj);
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => traj.to_csv(),
        Format::Json => to_json_text(traj.to_json()),
    };
    let mut summary = String::new();
    for tr in &transitions {
        summary.push_str(&format!("t_star = {} s (index {})\n", format_number(tr.t_star), tr.index));
    }
    if transitions.is_empty() {
        summary.push_str("no transition detected\n");
    }
    match &cfg.output {
        Some(path) => {
            write_file(path, &body)?;
            emit(out, &format!("wrote {} points to {}\n", traj.len(), path.display()))?;
            emit(out, &summary)
        }
        None => {
            eprint!("{summary}");
            emit(out, &body)
        }
    }
}

struct ProtocolComparison {
    direct: CorrelationReport,
    tomography: CorrelationReport,
    direct_c: [[f64; 3]; 3],
    tomography_c: [[f64; 3]; 3],
    c_errors: Option<[[f64; 3]; 3]>,
    record: qcorr::MeasurementRecord,
    budget: (usize, usize),
}

impl ProtocolComparison {
    fn max_difference(&self) -> f64 {
        let mut worst = (self.direct.d_g - self.tomography.d_g).abs().max((self.direct.q - self.tomography.q).abs());
        if let (Some(a), Some(b)) = (self.direct.q_n, self.tomography.q_n) {
            worst = worst.max((a - b).abs());
        }
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.direct_c[i][j] - self.tomography_c[i][j]).abs());
            }
        }
        worst
    }
}

fn compare_protocol(cfg: &ExperimentConfig) -> CliResult<ProtocolComparison> {
    let (rho, scale): (DensityMatrix, Scale) = match cfg.load_state()? {
        LoadedState::Bell(s) if s.mode() == BellMode::Deviation => {
            let eps = cfg.relaxation.epsilon;
            (s.density_matrix(eps)?, Scale::Deviation { epsilon: eps })
        }
        LoadedState::Bell(s) => (s.density_matrix(0.0)?, Scale::Full),
        LoadedState::Matrix(rho) if rho.dim() == 4 => (rho, Scale::Full),
        LoadedState::Matrix(rho) => {
            return Err(CliError::Input(format!("protocol runs on two-qubit states, got dimension {}", rho.dim())));
        }
    };
    let include = cfg.include_local_bloch;
    let record = run_direct_protocol(&rho, cfg.shots, cfg.seed.unwrap_or(0))?;
    debug!("direct protocol used {} readouts", record.readout_count);

    let (tomo, units) = scaled_record(&rho, 2, scale)?;
    let tomography = report_from_record(&tomo, 2, include, None, units)?;

    let unit = match scale {
        Scale::Full => 1.0,
        Scale::Deviation { epsilon } => epsilon,
    };
    let direct_rec = BlochRecord {
        x: Vector3::from(record.x_est) / unit,
        y: DVector::zeros(3),
        corr: DMatrix::from_fn(3, 3, |i, j| record.c_est[i][j] / unit),
    };
    let direct = report_from_record(&direct_rec, 2, include, None, units)?;
    let direct_c = std::array::from_fn(|i| std::array::from_fn(|j| direct_rec.corr[(i, j)]));
    let tomography_c = std::array::from_fn(|i| std::array::from_fn(|j| tomo.corr[(i, j)]));
    let c_errors = record.correlation_std_errors().map(|e| e.map(|row| row.map(|v| v / unit)));
    Ok(ProtocolComparison {
        direct,
        tomography,
        direct_c,
        tomography_c,
        c_errors,
        record,
        budget: measurement_budget(2)?,
    })
}

const AXES: [&str; 3] = ["x", "y", "z"];

fn protocol_text(p: &ProtocolComparison) -> String {
    let mut s = format!("budget      direct: {}, tomography: {}\n", p.budget.0, p.budget.1);
    s.push_str(&format!("units       {}\n", p.direct.units.describe()));
    match p.record.shots {
        Some(n) => s.push_str(&format!("mode        {n} shots per readout, seed {}\n", p.record.seed)),
        None => s.push_str("mode        exact expectation values\n"),
    }
    s.push_str(&format!("{:<12}{:<24}{:<24}{:<24}\n", "measure", "direct", "tomography", "|difference|"));
    let row = |name: &str, a: f64, b: f64| {
        format!("{:<12}{:<24}{:<24}{:<24}\n", name, format_number(a), format_number(b), format_number((a - b).abs()))
    };
    s.push_str(&row("d_g", p.direct.d_g, p.tomography.d_g));
    s.push_str(&row("q", p.direct.q, p.tomography.q));
    if let (Some(a), Some(b)) = (p.direct.q_n, p.tomography.q_n) {
        s.push_str(&row("q_n", a, b));
    }
    for i in 0..3 {
        for j in 0..3 {
            let mut line = row(&format!("c_{}{}", AXES[i], AXES[j]), p.direct_c[i][j], p.tomography_c[i][j]);
            if let Some(err) = p.c_errors {
                line.pop();
                line = format!("{}+/- {}\n", line, format_number(err[i][j]));
            }
            s.push_str(&line);
        }
    }
    s.push_str(&format!("max |direct - tomography| = {}\n", format_number(p.max_difference())));
    s
}

fn protocol_json(p: &ProtocolComparison) -> Value {
    json!({
        "budget": {"direct": p.budget.0, "tomography": p.budget.1},
        "units": p.direct.units,
        "units_note": p.direct.units.describe(),
        "direct": report_json(&p.direct),
        "tomography": report_json(&p.tomography),
        "direct_c": p.direct_c,
        "tomography_c": p.tomography_c,
        "c_std_errors": p.c_errors,
        "max_difference": p.max_difference(),
        "record": p.record,
    })
}

pub fn cmd_protocol(cfg: &ExperimentConfig, out: &mut dyn Write) -> CliResult<()> {
    let p = compare_protocol(cfg)?;
    match (&cfg.output, cfg.format) {
        (Some(path), _) => {
            write_file(path, &to_json_text(protocol_json(&p)))?;
            emit(out, &protocol_text(&p))
        }
        (None, Some(Format::Json)) => emit(out, &to_json_text(protocol_json(&p))),
        (None, _) => emit(out, &protocol_text(&p)),
    }
}
