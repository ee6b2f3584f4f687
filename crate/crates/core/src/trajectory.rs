//! Time series of correlation measures under relaxation and detection of
//! sudden changes in their decay.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bloch::BlochRecord;
use crate::channels::{evolve, RelaxationParams};
use crate::error::{QcorrError, Result};
use crate::measures::{negativity, report_from_record, scaled_record, CorrelationReport, Scale, Units};
use crate::state::{BellDiagonalState, BellMode, DensityMatrix};

/// Default number of grid points.
pub const DEFAULT_POINTS: usize = 251;

/// A kink is confirmed when `|Δ²D_G|` near the switch exceeds this multiple of
/// its median over the trajectory.
pub const KINK_FACTOR: f64 = 10.0;

/// Half-width (in grid steps) of the window searched for the kink.
pub const KINK_WINDOW: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeGrid {
    /// `n_points` equally spaced times on `[0, t_max]`.
    Span { t_max: f64, n_points: usize },
    /// `t_i = i · dt`.
    Step { dt: f64, n_points: usize },
}

impl TimeGrid {
    /// `dt = 1/(4J)` with 251 points.
    pub fn default_for(params: &RelaxationParams) -> Self {
        TimeGrid::Step { dt: 1.0 / (4.0 * params.j_coupling), n_points: DEFAULT_POINTS }
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        let (n, step) = match *self {
            TimeGrid::Span { t_max, n_points } => {
                if !(t_max > 0.0 && t_max.is_finite()) {
                    return Err(QcorrError::OutOfRange { name: "t_max", value: t_max, range: "(0, ∞)" });
                }
                (n_points, t_max / (n_points.max(2) - 1) as f64)
            }
            TimeGrid::Step { dt, n_points } => {
                if !(dt > 0.0 && dt.is_finite()) {
                    return Err(QcorrError::OutOfRange { name: "dt", value: dt, range: "(0, ∞)" });
                }
                (n_points, dt)
            }
        };
        if n < 2 {
            return Err(QcorrError::OutOfRange { name: "n_points", value: n as f64, range: "[2, ∞)" });
        }
        let mut times: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
        if let TimeGrid::Span { t_max, .. } = *self {
            times[n - 1] = t_max;
        }
        Ok(times)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    /// Diagonal of the correlation matrix, in the report's units.
    pub bell: [f64; 3],
    pub report: CorrelationReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub states: Vec<DensityMatrix>,
    pub units: Units,
    pub include_local_bloch: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transition {
    /// First grid time at which the dominant correlation has changed.
    pub t_star: f64,
    pub index: usize,
    /// Component index (0, 1, 2) dominant before and after.
    pub from: usize,
    pub to: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn d_g(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.report.d_g).collect()
    }

    pub fn q(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.report.q).collect()
    }

    pub fn q_n(&self) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.report.q_n).collect()
    }

    /// CSV with header `t,c1,c2,c3,d_g,q,q_n,negativity`; absent values are
    /// empty fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,c1,c2,c3,d_g,q,q_n,negativity\n");
        for p in &self.points {
            let opt = |v: Option<f64>| v.map(format_number).unwrap_or_default();
            let fields = [
                format_number(p.t),
                format_number(p.bell[0]),
                format_number(p.bell[1]),
                format_number(p.bell[2]),
                format_number(p.report.d_g),
                format_number(p.report.q),
                opt(p.report.q_n),
                opt(p.report.negativity),
            ];
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let points: Vec<Value> = self
            .points
            .iter()
            .map(|p| {
                json!({
                    "t": round_sig(p.t),
                    "c": p.bell.map(round_sig),
                    "d_g": round_sig(p.report.d_g),
                    "q": round_sig(p.report.q),
                    "q_n": p.report.q_n.map(round_sig),
                    "negativity": p.report.negativity.map(round_sig),
                })
            })
            .collect();
        let transitions: Vec<Value> = detect_transitions(self)
            .into_iter()
            .map(|tr| json!({"t_star": round_sig(tr.t_star), "index": tr.index, "from": tr.from, "to": tr.to}))
            .collect();
        json!({
            "units": self.units,
            "units_note": self.units.describe(),
            "include_local_bloch": self.include_local_bloch,
            "points": points,
            "transitions": transitions,
        })
    }
}

/// Scientific notation with 15 significant digits.
pub fn format_number(v: f64) -> String {
    // adding 0.0 maps −0 to +0
    format!("{:.14e}", v + 0.0)
}

/// `v` rounded to 15 significant digits.
pub fn round_sig(v: f64) -> f64 {
    if v.is_finite() {
        format_number(v).parse().unwrap_or(v)
    } else {
        v
    }
}

/// Evolves a Bell-diagonal state under relaxation and evaluates the
/// measures at every grid time. Each point is evolved directly from `t = 0`.
/// Deviation-mode states are reported in deviation units.
pub fn make_trajectory(
    state0: &BellDiagonalState,
    params: &RelaxationParams,
    grid: &TimeGrid,
    include_local_bloch: bool,
) -> Result<Trajectory> {
    params.validate()?;
    let times = grid.times()?;
    let (rho0, scale) = match state0.mode() {
        BellMode::Full => (state0.density_matrix(0.0)?, Scale::Full),
        BellMode::Deviation => (state0.density_matrix(params.epsilon)?, Scale::Deviation { epsilon: params.epsilon }),
    };

    let computed: Result<Vec<(TrajectoryPoint, DensityMatrix, Units)>> = times
        .par_iter()
        .map(|&t| {
            let rho = evolve(&rho0, t, params)?;
            let (record, units) = scaled_record(&rho, 2, scale)?;
            let neg = negativity(&rho)?;
            let report = report_from_record(&record, 2, include_local_bloch, Some(neg), units)?;
            Ok((TrajectoryPoint { t, bell: diagonal(&record), report }, rho, units))
        })
        .collect();
    let computed = computed?;
    let units = computed.first().map(|c| c.2).unwrap_or(Units::Absolute);
    let (points, states) = computed.into_iter().map(|(p, s, _)| (p, s)).unzip();
    Ok(Trajectory { points, states, units, include_local_bloch })
}

fn diagonal(record: &BlochRecord) -> [f64; 3] {
    [record.corr[(0, 0)], record.corr[(1, 1)], record.corr[(2, 2)]]
}

fn dominant(c: [f64; 3]) -> usize {
    let mut best = 0;
    for k in 1..3 {
        if c[k].abs() > c[best].abs() {
            best = k;
        }
    }
    best
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Every grid index where the largest `|c_i|` changes identity and `D_G`
/// shows a kink nearby. Switches between the first two grid points are
/// ignored.
pub fn detect_transitions(traj: &Trajectory) -> Vec<Transition> {
    let n = traj.len();
    if n < 5 {
        return Vec::new();
    }
    let dg = traj.d_g();
    let second: Vec<f64> = (1..n - 1).map(|j| (dg[j + 1] - 2.0 * dg[j] + dg[j - 1]).abs()).collect();
    let threshold = KINK_FACTOR * median(second.clone());
    // second[j - 1] belongs to grid index j
    let kink_at = |j: usize| second[j - 1];

    let arg: Vec<usize> = traj.points.iter().map(|p| dominant(p.bell)).collect();
    let mut found = Vec::new();
    for i in 2..n {
        if arg[i] == arg[i - 1] {
            continue;
        }
        let lo = i.saturating_sub(KINK_WINDOW).max(1);
        let hi = (i + KINK_WINDOW).min(n - 2);
        let peak = (lo..=hi).map(kink_at).fold(0.0, f64::max);
        if peak > threshold {
            found.push(Transition { t_star: traj.points[i].t, index: i, from: arg[i - 1], to: arg[i] });
        }
    }
    found
}

/// The first transition, if any.
pub fn detect_transition(traj: &Trajectory) -> Option<Transition> {
    detect_transitions(traj).into_iter().next()
}
