//! Seeded property campaign over random states.
//!
//! Every sample draws from its own ChaCha stream `(d << 32) | i`, so the
//! report does not depend on thread scheduling.

use std::io::Write;
use std::path::PathBuf;

use qcorr::bloch::bloch_decompose;
use qcorr::linalg::{kron, CMatrix};
use qcorr::random::{random_density_matrix_with, random_pure_state, random_unitary};
use qcorr::trajectory::format_number;
use qcorr::{geometric_discord_closed, geometric_discord_eig, negativity, q_lower_bound, s_matrix, DensityMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::commands::{to_json_text, write_file};
use crate::config::Format;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone)]
pub struct BatchOptions {
    pub n: usize,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `|D_G(closed form) − 2(Tr S − k_max)|`.
    ClosedVsEigen,
    /// `max(0, Q − D_G)`.
    LowerBound,
    /// `max(0, N² − D_G)` on mixed states.
    NegativityBound,
    /// `|D_G − N²|` on pure states.
    PureIdentity,
    /// `D_G` on classical-quantum states.
    ClassicalQuantum,
}

impl Check {
    pub fn tolerance(self) -> f64 {
        match self {
            Check::ClosedVsEigen | Check::NegativityBound | Check::PureIdentity => 1e-9,
            Check::LowerBound => 1e-12,
            Check::ClassicalQuantum => 1e-10,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Check::ClosedVsEigen => "closed_vs_eigen",
            Check::LowerBound => "q_le_dg",
            Check::NegativityBound => "dg_ge_n2",
            Check::PureIdentity => "pure_dg_eq_n2",
            Check::ClassicalQuantum => "classical_quantum_zero",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckStats {
    pub dim: usize,
    pub check: Check,
    pub tolerance: f64,
    pub samples: usize,
    pub violations: usize,
    pub worst: f64,
}

fn discord_parts(rho: &DensityMatrix, d: usize) -> CliResult<(f64, f64, f64)> {
    let s = s_matrix(&bloch_decompose(rho, d)?, d)?;
    let (closed, _) = geometric_discord_closed(&s);
    Ok((closed, geometric_discord_eig(&s), q_lower_bound(&s)))
}

fn classical_quantum<R: Rng>(rng: &mut R, d: usize) -> CliResult<DensityMatrix> {
    let u = random_unitary(rng, 2);
    let p: f64 = rng.random();
    let mut m = CMatrix::zeros(2 * d, 2 * d);
    for (k, w) in [p, 1.0 - p].into_iter().enumerate() {
        let e = u.column(k).clone_owned();
        let rank = rng.random_range(1..=d);
        let rho_b = random_density_matrix_with(rng, d, rank)?;
        m += kron(&(&e * e.adjoint()), rho_b.matrix()).scale(w);
    }
    Ok(DensityMatrix::new(m)?)
}

fn sample(seed: u64, d: usize, i: usize) -> CliResult<Vec<(Check, f64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((d as u64) << 32) | i as u64);
    let dim = 2 * d;
    let rank = rng.random_range(1..=dim);
    let rho = random_density_matrix_with(&mut rng, dim, rank)?;
    let (closed, eig, q) = discord_parts(&rho, d)?;
    let mut out = vec![(Check::ClosedVsEigen, (closed - eig).abs()), (Check::LowerBound, (q - closed).max(0.0))];
    if d == 2 {
        let n = negativity(&rho)?;
        out.push((Check::NegativityBound, (n * n - closed).max(0.0)));
        let pure = DensityMatrix::from_pure(&random_pure_state(&mut rng, 4))?;
        let n = negativity(&pure)?;
        let (dg, _, _) = discord_parts(&pure, 2)?;
        out.push((Check::PureIdentity, (dg - n * n).abs()));
    }
    let cq = classical_quantum(&mut rng, d)?;
    out.push((Check::ClassicalQuantum, discord_parts(&cq, d)?.0.max(0.0)));
    Ok(out)
}

pub fn run_batch(opts: &BatchOptions) -> CliResult<Vec<CheckStats>> {
    if opts.n == 0 {
        return Err(CliError::Input("`n` must be at least 1".into()));
    }
    if let Some(d) = opts.dims.iter().find(|&&d| !(2..=8).contains(&d)) {
        return Err(CliError::Input(format!("`dims`: {d} outside 2..=8")));
    }
    let mut stats = Vec::new();
    for &d in &opts.dims {
        let results: CliResult<Vec<Vec<(Check, f64)>>> =
            (0..opts.n).into_par_iter().map(|i| sample(opts.seed, d, i)).collect();
        let mut per_check: Vec<CheckStats> = Vec::new();
        for (check, residual) in results?.into_iter().flatten() {
            let entry = match per_check.iter_mut().find(|s| s.check == check) {
                Some(e) => e,
                None => {
                    per_check.push(CheckStats {
                        dim: d,
                        check,
                        tolerance: check.tolerance(),
                        samples: 0,
                        violations: 0,
                        worst: 0.0,
                    });
                    per_check.last_mut().expect("just pushed")
                }
            };
            entry.samples += 1;
            entry.worst = entry.worst.max(residual);
            if residual.is_nan() || residual > check.tolerance() {
                entry.violations += 1;
            }
        }
        stats.extend(per_check);
    }
    Ok(stats)
}

fn stats_text(opts: &BatchOptions, stats: &[CheckStats]) -> String {
    let mut s = format!("batch: n = {} per dimension, seed = {}\n", opts.n, opts.seed);
    s.push_str(&format!(
        "{:<5}{:<24}{:<10}{:<12}{:<24}{:<24}{}\n",
        "d", "check", "samples", "violations", "worst residual", "tolerance", "status"
    ));
    for st in stats {
        s.push_str(&format!(
            "{:<5}{:<24}{:<10}{:<12}{:<24}{:<24}{}\n",
            st.dim,
            st.check.name(),
            st.samples,
            st.violations,
            format_number(st.worst),
            format_number(st.tolerance),
            if st.violations == 0 { "pass" } else { "FAIL" }
        ));
    }
    s
}

fn stats_csv(stats: &[CheckStats]) -> String {
    let mut s = String::from("d,check,samples,violations,worst,tolerance\n");
    for st in stats {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            st.dim,
            st.check.name(),
            st.samples,
            st.violations,
            format_number(st.worst),
            format_number(st.tolerance)
        ));
    }
    s
}

pub fn cmd_batch(opts: &BatchOptions, out: &mut dyn Write) -> CliResult<()> {
    let stats = run_batch(opts)?;
    let body = |f: Format| match f {
        Format::Csv => stats_csv(&stats),
        Format::Json => to_json_text(json!({"n": opts.n, "seed": opts.seed, "dims": opts.dims, "checks": stats})),
    };
    let text = stats_text(opts, &stats);
    let printed = match (&opts.output, opts.format) {
        (Some(path), f) => {
            write_file(path, &body(f.unwrap_or(Format::Json)))?;
            text
        }
        (None, Some(f)) => body(f),
        (None, None) => text,
    };
    out.write_all(printed.as_bytes()).map_err(|e| CliError::Input(format!("cannot write output: {e}")))?;
    let violations: usize = stats.iter().map(|s| s.violations).sum();
    if violations > 0 {
        return Err(CliError::Violations(violations));
    }
    Ok(())
}
