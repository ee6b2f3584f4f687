//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p qcorr-cli --test acceptance`.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nalgebra::{Complex, Matrix3, SymmetricEigen};
use qcorr::bloch::bloch_decompose;
use qcorr::channels::COMPLETENESS_TOL;
use qcorr::linalg::{kron, CMatrix};
use qcorr::random::{random_density_matrix_with, random_pure_state, random_unitary};
use qcorr::trajectory::Trajectory;
use qcorr::{
    detect_transitions, deviation_report, direct_correlation, evolve, gad_kraus, geometric_discord_closed,
    j_coupling_unitary, make_trajectory, measurement_budget, negativity, pd_kraus, q_lower_bound, s_matrix,
    BellDiagonalState, BellMode, DensityMatrix, RelaxationParams, SMatrix, TimeGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn cplx(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn paulis() -> [CMatrix; 4] {
    let (z, o, i) = (cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 1.0));
    [
        CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

/// `2(Tr S − k_max)` with nalgebra's symmetric eigensolver.
fn eigen_oracle(s: &Matrix3<f64>) -> f64 {
    let eig = SymmetricEigen::new(*s).eigenvalues;
    2.0 * (s.trace() - eig.max())
}

fn hermitian_min_eig(m: &CMatrix) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}

fn random_state(rng: &mut ChaCha8Rng, d: usize) -> DensityMatrix {
    let dim = 2 * d;
    let rank = rng.random_range(1..=dim);
    random_density_matrix_with(rng, dim, rank).unwrap()
}

fn s_of(rho: &DensityMatrix, d: usize) -> SMatrix {
    s_matrix(&bloch_decompose(rho, d).unwrap(), d).unwrap()
}

fn rho1() -> BellDiagonalState {
    BellDiagonalState::from_magnitudes([0.2, 0.2, 0.2], BellMode::Deviation).unwrap()
}

fn rho2() -> BellDiagonalState {
    BellDiagonalState::from_magnitudes([0.5, 0.06, 0.24], BellMode::Deviation).unwrap()
}

fn default_trajectory(state: &BellDiagonalState) -> Trajectory {
    let params = RelaxationParams::default();
    make_trajectory(state, &params, &TimeGrid::default_for(&params), true).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for (d, count) in [(2, 10_000), (3, 1_000)] {
        for _ in 0..count {
            let s = s_of(&random_state(&mut rng, d), d);
            let (closed, _) = geometric_discord_closed(&s);
            worst = worst.max((closed - eigen_oracle(s.matrix())).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = format!("worst |closed − eigen| = {worst:.3e} over 10⁴ 2⊗2 + 10³ 2⊗3 states, {secs:.2} s");
    if worst <= 1e-9 && secs < 10.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_2() -> Outcome {
    let sigma = paulis();
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst = 0.0f64;
    for _ in 0..1_000 {
        let rho = random_state(&mut rng, 2);
        for nu in 1..4 {
            for lambda in 1..4 {
                let want = (kron(&sigma[nu], &sigma[lambda]) * rho.matrix()).trace().re;
                let got = direct_correlation(&rho, nu, lambda).unwrap();
                worst = worst.max((got - want).abs());
            }
        }
    }
    let budget = measurement_budget(2).unwrap();
    let detail = format!(
        "worst readout error {worst:.3e} over 9000 readouts; budget direct: {}, tomography: {}",
        budget.0, budget.1
    );
    if worst <= 1e-12 && budget == (12, 15) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_3() -> Outcome {
    let eps = RelaxationParams::default().epsilon;
    // (state, D_G, Q or None, Q_N)
    let cases: [(BellDiagonalState, f64, Option<f64>, f64); 2] =
        [(rho1(), 0.0400, Some(0.0400), 0.1000), (rho2(), 0.0306, None, 0.1200)];
    let mut worst = 0.0f64;
    for (state, dg_quoted, q_quoted, qn_quoted) in cases {
        let c = state.coefficients();
        let sq = c.map(|v| v * v);
        // independent derivations from the coefficients alone
        let dg_derived = (sq.iter().sum::<f64>() - sq.iter().cloned().fold(f64::MIN, f64::max)) / 2.0;
        let mut mags = c.map(f64::abs);
        mags.sort_by(f64::total_cmp);
        let qn_derived = mags[1] / 2.0;

        let report = deviation_report(&state.deviation_state(eps).unwrap(), true).unwrap();
        let s = SMatrix::bell_diagonal(c);
        let record = qcorr::bloch::decompose_operator(state.deviation_state(eps).unwrap().delta(), 2).unwrap();
        let s_record = s_matrix(&record, 2).unwrap();
        let residuals = [
            report.d_g - dg_quoted,
            report.d_g - dg_derived,
            eigen_oracle(s_record.matrix()) - dg_quoted,
            eigen_oracle(s.matrix()) - dg_derived,
            geometric_discord_closed(&s).0 - dg_quoted,
            report.q_n.unwrap_or(f64::NAN) - qn_quoted,
            report.q_n.unwrap_or(f64::NAN) - qn_derived,
            q_quoted.map_or(0.0, |q| report.q - q),
            q_quoted.map_or(0.0, |q| q_lower_bound(&s) - q),
        ];
        for r in residuals {
            worst = worst.max(if r.is_nan() { f64::INFINITY } else { r.abs() });
        }
    }
    let detail =
        format!("ρ₁ D_G=Q=0.0400 ε², Q_N=0.1000 ε; ρ₂ D_G=0.0306 ε², Q_N=0.1200 ε; worst residual {worst:.3e}");
    if worst <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Crossing of `|c1(0)| e^{−k1 t}` and `|c3(0)| e^{−k3 t}` with the decay
/// rates of the transverse and longitudinal correlations under amplitude and
/// phase damping.
fn analytic_crossing(params: &RelaxationParams, c0: [f64; 3]) -> f64 {
    let k1 = 0.5 / params.t1_a + 0.5 / params.t1_b + 1.0 / params.t2_a + 1.0 / params.t2_b;
    let k3 = 1.0 / params.t1_a + 1.0 / params.t1_b;
    (c0[0].abs() / c0[2].abs()).ln() / (k1 - k3)
}

fn relative_slope_change(v: &[f64], i: usize) -> f64 {
    let left = v[i - 1] - v[i - 2];
    let right = v[i + 1] - v[i];
    (left - right).abs() / left.abs().max(right.abs())
}

fn criterion_4() -> Outcome {
    let params = RelaxationParams::default();
    let traj = default_trajectory(&rho2());
    let found = detect_transitions(&traj);
    if found.len() != 1 {
        return Err(format!("expected exactly one transition, found {}", found.len()));
    }
    let tr = found[0];
    let i = tr.index;
    let dt = traj.points[1].t - traj.points[0].t;
    let crossing = analytic_crossing(&params, rho2().coefficients());
    let q_n: Option<Vec<f64>> = traj.q_n().into_iter().collect();
    let Some(q_n) = q_n else { return Err("Q_N missing on the trajectory".into()) };
    let dg = relative_slope_change(&traj.d_g(), i);
    let qn = relative_slope_change(&q_n, i);
    let q = relative_slope_change(&traj.q(), i);
    let detail = format!(
        "t* = {:.6} s (index {i}), analytic crossing {crossing:.6} s, dt = {dt:.3e}; slope change D_G {:.1}%, Q_N {:.1}%, Q {:.2}%",
        tr.t_star,
        100.0 * dg,
        100.0 * qn,
        100.0 * q
    );
    if dg > 0.2 && qn > 0.2 && q < 0.02 && (tr.t_star - crossing).abs() <= dt {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_5() -> Outcome {
    let traj = default_trajectory(&rho1());
    let q_n: Option<Vec<f64>> = traj.q_n().into_iter().collect();
    let Some(q_n) = q_n else { return Err("Q_N missing on the trajectory".into()) };
    let increases = |v: &[f64]| v.windows(2).filter(|w| w[1] > w[0]).count();
    let (a, b, c) = (increases(&traj.d_g()), increases(&traj.q()), increases(&q_n));
    let transitions = detect_transitions(&traj).len();
    let detail =
        format!("increasing steps: D_G {a}, Q {b}, Q_N {c}; transitions {transitions} over {} points", traj.len());
    if a + b + c + transitions == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_6() -> Outcome {
    let mut worst_completeness = 0.0f64;
    for i in 0..20 {
        for j in 0..20 {
            let k = gad_kraus(i as f64 / 19.0, j as f64 / 19.0).unwrap();
            worst_completeness = worst_completeness.max(k.completeness_error());
        }
        worst_completeness = worst_completeness.max(pd_kraus(i as f64 / 19.0).unwrap().completeness_error());
    }

    let params = RelaxationParams::default();
    let mut states: Vec<DensityMatrix> = Vec::new();
    for s in [rho1(), rho2()] {
        states.extend(default_trajectory(&s).states);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for _ in 0..100 {
        let rho = random_state(&mut rng, 2);
        for t in [0.01, 0.1, 1.0, 10.0] {
            states.push(evolve(&rho, t, &params).unwrap());
        }
    }
    let worst_trace = states.iter().map(|r| (r.matrix().trace().re - 1.0).abs()).fold(0.0, f64::max);
    let min_eig = states.iter().map(|r| hermitian_min_eig(r.matrix())).fold(f64::INFINITY, f64::min);
    let detail = format!(
        "completeness {worst_completeness:.3e}; {} evolved states: trace error {worst_trace:.3e}, min eigenvalue {min_eig:.3e}",
        states.len()
    );
    if worst_completeness <= COMPLETENESS_TOL && worst_trace <= 1e-10 && min_eig >= -1e-10 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn classical_quantum(rng: &mut ChaCha8Rng, d: usize) -> DensityMatrix {
    let u = random_unitary(rng, 2);
    let p: f64 = rng.random();
    let mut m = CMatrix::zeros(2 * d, 2 * d);
    for (k, w) in [p, 1.0 - p].into_iter().enumerate() {
        let e = u.column(k).clone_owned();
        let rank = rng.random_range(1..=d);
        let rho_b = random_density_matrix_with(rng, d, rank).unwrap();
        m += kron(&(&e * e.adjoint()), rho_b.matrix()).scale(w);
    }
    DensityMatrix::new(m).unwrap()
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let mut pure = 0.0f64;
    let mut mixed = f64::INFINITY;
    let mut cq = 0.0f64;
    let mut q_excess = f64::NEG_INFINITY;
    let mut check_q = |s: &SMatrix| {
        let (dg, _) = geometric_discord_closed(s);
        q_excess = q_excess.max(q_lower_bound(s) - dg);
        dg
    };
    for _ in 0..1_000 {
        let rho = DensityMatrix::from_pure(&random_pure_state(&mut rng, 4)).unwrap();
        let n = negativity(&rho).unwrap();
        pure = pure.max((check_q(&s_of(&rho, 2)) - n * n).abs());
    }
    for _ in 0..10_000 {
        let rho = random_state(&mut rng, 2);
        let n = negativity(&rho).unwrap();
        mixed = mixed.min(check_q(&s_of(&rho, 2)) - n * n);
    }
    for i in 0..1_000 {
        let d = 2 + i % 2;
        cq = cq.max(check_q(&s_of(&classical_quantum(&mut rng, d), d)));
    }
    let detail = format!(
        "pure max |D_G − N²| {pure:.3e}; mixed min D_G − N² {mixed:.3e}; classical-quantum max D_G {cq:.3e}; max Q − D_G {q_excess:.3e}"
    );
    if pure <= 1e-9 && mixed >= -1e-9 && cq <= 1e-10 && q_excess <= 0.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let mut worst_s = 0.0f64;
    let mut worst_j = 0.0f64;
    let mut accepted = 0;
    while accepted < 1_000 {
        let c = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let Ok(state) = BellDiagonalState::full(c) else { continue };
        accepted += 1;
        let rho = state.density_matrix(0.0).unwrap();
        let want = Matrix3::from_diagonal(&c.map(|v| v * v / 4.0).into());
        worst_s = worst_s.max((s_of(&rho, 2).matrix() - want).amax());
        let u = j_coupling_unitary(215.1, rng.random_range(0.0..0.1));
        let out = &u * rho.matrix() * u.adjoint();
        worst_j = worst_j.max((out - rho.matrix()).map(|z| z.norm()).max());
    }
    let detail = format!("1000 Bell-diagonal states: |S − diag(c²/4)| {worst_s:.3e}, |UρU† − ρ| {worst_j:.3e}");
    if worst_s <= 1e-12 && worst_j <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn run_cli(args: &[&str], dir: &Path) -> Result<(), String> {
    let status =
        Command::new(env!("CARGO_BIN_EXE_qcorr")).args(args).current_dir(dir).output().map_err(|e| e.to_string())?;
    if status.status.success() {
        Ok(())
    } else {
        Err(format!("qcorr {args:?} failed: {}", String::from_utf8_lossy(&status.stderr)))
    }
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = "state = { c = [0.5, -0.06, 0.24], mode = \"deviation\" }\nseed = 42\nformat = \"json\"\n";
    std::fs::write(dir.path().join("run.toml"), config).map_err(|e| e.to_string())?;
    let mut compared = Vec::new();
    for (name, args) in [
        ("evolve", vec!["evolve", "--config", "run.toml"]),
        ("evolve-csv", vec!["evolve", "--config", "run.toml", "--format", "csv"]),
        ("batch", vec!["batch", "--config", "run.toml", "--n", "300", "--dims", "2,3"]),
    ] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let file = format!("{name}-{run}.out");
            let mut full = args.clone();
            full.extend(["--output", file.as_str()]);
            run_cli(&full, dir.path())?;
            outputs.push(std::fs::read(dir.path().join(&file)).map_err(|e| e.to_string())?);
        }
        if outputs[0] != outputs[1] {
            return Err(format!("{name}: outputs differ between runs"));
        }
        compared.push(format!("{name} ({} bytes)", outputs[0].len()));
    }
    Ok(format!("identical reruns: {}", compared.join(", ")))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("closed form vs eigenvalue oracle", criterion_1),
        ("protocol exactness and budget", criterion_2),
        ("initial-state values", criterion_3),
        ("sudden transition of ρ₂", criterion_4),
        ("monotonic decay of ρ₁", criterion_5),
        ("channel validity", criterion_6),
        ("discord identities", criterion_7),
        ("Bell-diagonal structure", criterion_8),
        ("reproducibility", criterion_9),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} [{tag}] {name}: {detail}", k + 1);
    }
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
