//! Acceptance suite. Each criterion prints one `criterion N (...): PASS/FAIL`
//! line with the measured numbers and asserts its stated tolerance.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see every line
//! (failing criteria print their line either way).

use perptail_cli::runner::{self, Ctx};
use perptail_cli::ThreadExecutor;
use perptail_core::mc::{
    self, SampleAllocation, SimulationConfig, TailSumOptions, Truncation,
};
use perptail_core::stream::substream;
use perptail_core::{cramer, mv, solve_alpha, tail, FactorModel, Serial};
use std::time::Instant;

const WORKERS: u32 = 2;
const LN2: f64 = std::f64::consts::LN_2;

/// Criteria carry wall-clock caps, so each one gets the machine to itself
/// even when the harness runs tests in parallel. Poisoning is expected: a
/// failing criterion panics while holding the gate.
static GATE: std::sync::Mutex<()> = std::sync::Mutex::new(());

fn gate() -> std::sync::MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|e| e.into_inner())
}

fn fixture() -> FactorModel {
    FactorModel::TwoPoint { a: 2.0, b: 0.5, p_a: 1.0 / 3.0 }
}

fn lognormal() -> FactorModel {
    FactorModel::LogNormal { mu: -1.0, sigma: 1.0 }
}

fn exec() -> ThreadExecutor {
    ThreadExecutor::new(WORKERS as usize)
}

fn cfg(paths: u64, seed: u64) -> SimulationConfig {
    SimulationConfig {
        n_paths: paths,
        seed,
        truncation: Truncation::Adaptive { eps: 1e-9, gamma: f64::NAN },
        workers: WORKERS,
    }
}

struct Criterion {
    n: u32,
    name: &'static str,
    cap_seconds: f64,
    start: Instant,
}

impl Criterion {
    fn begin(n: u32, name: &'static str, cap_seconds: f64) -> Self {
        Criterion { n, name, cap_seconds, start: Instant::now() }
    }

    fn finish(self, pass: bool, detail: String) {
        let elapsed = self.start.elapsed().as_secs_f64();
        println!(
            "criterion {:2} ({}): {} — {} [{elapsed:.1}s / cap {:.0}s]",
            self.n,
            self.name,
            if pass { "PASS" } else { "FAIL" },
            detail,
            self.cap_seconds
        );
        assert!(
            elapsed < self.cap_seconds,
            "criterion {} exceeded its runtime cap: {elapsed:.1}s >= {:.0}s",
            self.n,
            self.cap_seconds
        );
        assert!(pass, "criterion {} failed: {detail}", self.n);
    }
}

#[test]
fn criterion_01_analytic_exponent() {
    let _gate = gate();
    let c = Criterion::begin(1, "analytic exponent", 1.0);
    let sol = solve_alpha(&lognormal(), None).unwrap();
    let errs = [
        (sol.alpha - 2.0).abs(),
        (sol.m_alpha - 1.0).abs(),
        (sol.sigma2_alpha - 1.0).abs(),
    ];
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    c.finish(
        worst <= 1e-10,
        format!(
            "alpha = {:.12}, m = {:.12}, sigma2 = {:.12}; worst |err| = {worst:.2e} (tol 1e-10)",
            sol.alpha, sol.m_alpha, sol.sigma2_alpha
        ),
    );
}

#[test]
fn criterion_02_brute_force_oracle() {
    let _gate = gate();
    let c = Criterion::begin(2, "brute-force oracle equivalence", 60.0);
    let model = fixture();
    let sol = solve_alpha(&model, None).unwrap();
    let truth = mc::brute_force_p_at_log(&model, 5.0, 400).unwrap();
    let opts = TailSumOptions { n_max: Some(200), allocation: SampleAllocation::Uniform };
    let mut passes = 0;
    let mut zs = Vec::new();
    for seed in 0..20u64 {
        let est = mc::is_tail_p_at_log(
            &model,
            &sol,
            5.0,
            100_000,
            &opts,
            &cfg(0, 9_000 + seed),
            &exec(),
        )
        .unwrap();
        let z = (est.value - truth) / est.std_error;
        zs.push(z);
        if z.abs() <= 3.0 {
            passes += 1;
        }
    }
    let worst = zs.iter().cloned().fold(0.0f64, |a, z| a.max(z.abs()));
    c.finish(
        passes >= 18,
        format!("p(e^5) truth {truth:.6e}; {passes}/20 seeds within 3 SE (worst |z| = {worst:.2})"),
    );
}

#[test]
fn criterion_03_change_of_measure_vs_direct() {
    let _gate = gate();
    let c = Criterion::begin(3, "change of measure vs direct simulation", 600.0);
    let model = lognormal();
    let sol = solve_alpha(&model, None).unwrap();
    let log_x = 4.0f64;

    let sim_cfg = SimulationConfig {
        n_paths: 10_000_000,
        seed: 31,
        truncation: Truncation::Adaptive { eps: 1e-9, gamma: 1.0 },
        workers: WORKERS,
    };
    let ys = mc::simulate_y(&model, &sim_cfg, &exec()).unwrap();
    let (p_direct, _, hits, _) = mc::tail_shares(&ys, log_x.exp());
    let n = ys.len() as f64;
    let se_direct = (p_direct * (1.0 - p_direct) / n).sqrt();

    let opts = TailSumOptions { n_max: Some(40), allocation: SampleAllocation::Uniform };
    let est =
        mc::is_tail_p_at_log(&model, &sol, log_x, 200_000, &opts, &cfg(0, 32), &exec()).unwrap();

    let diff = (p_direct - est.value).abs();
    let band = 3.0 * (se_direct * se_direct + est.std_error * est.std_error).sqrt()
        + est.remainder_bound;
    c.finish(
        diff <= band,
        format!(
            "P(Y>e^4) = {p_direct:.4e} ({hits} hits) vs p(e^4) = {:.4e}; |diff| = {diff:.2e} <= {band:.2e}",
            est.value
        ),
    );
}

#[test]
fn criterion_04_figure_ratio_properties() {
    let _gate = gate();
    let c = Criterion::begin(4, "figure 2a property reproduction", 60.0);
    let model = FactorModel::LogGamma { gamma: 4.0, beta: 1.0, mu: 5.0 };
    let sol = solve_alpha(&model, None).unwrap();
    let curve = tail::tail_curve(&model, &sol, 20.0, 100.0, 50, true).unwrap();
    let rn = curve.ratio_normal();
    let rt = curve.ratio_tilted().unwrap();

    let mut in_band = true;
    let mut tilted_beats_normal = true;
    let mut worst_band = f64::NAN;
    let mut worst_cmp = (f64::NAN, f64::NAN, f64::NAN);
    for (i, &l) in curve.log_x.iter().enumerate() {
        if l >= 60.0 && !(0.8..=1.2).contains(&rt[i]) {
            in_band = false;
            worst_band = rt[i];
        }
        if l >= 50.0 && (rt[i] - 1.0).abs() > (rn[i] - 1.0).abs() {
            if tilted_beats_normal {
                worst_cmp = (l, rt[i], rn[i]);
            }
            tilted_beats_normal = false;
        }
    }
    let detail = format!(
        "exact-series ratio at log x >= 60 in [0.8, 1.2]: {in_band} (sample value {worst_band:.4}); \
         |tilted-1| <= |normal-1| for log x >= 50: {tilted_beats_normal} \
         (first violation at log x = {:.1}: tilted {:.4} vs normal {:.4}). \
         The exact x^a p(x) settles at 1/(alpha m) = {:.4}, so the ratio to \
         leading_constant*log(x) decays like 1/(2 alpha log x); the stated bands are \
         unreachable for the true tail quantity.",
        worst_cmp.0,
        worst_cmp.1,
        worst_cmp.2,
        1.0 / (sol.alpha * sol.m_alpha)
    );
    c.finish(in_band && tilted_beats_normal, detail);
}

#[test]
fn criterion_05_martingale_and_stopping() {
    let _gate = gate();
    let c = Criterion::begin(5, "martingale/stopping identities", 60.0);
    let model = fixture();
    let sol = solve_alpha(&model, None).unwrap();

    // E[e^{alpha S_n}] = 1 for n in {1, 5, 20} under the plain measure
    let mut detail = String::new();
    let mut ok = true;
    for (lane, n) in [1u64, 5, 20].into_iter().enumerate() {
        let mut rng = substream(50, "acceptance-martingale", lane as u64, 0);
        let mut acc = perptail_core::stream::MeanAcc::default();
        for _ in 0..400_000 {
            let d = model.log_product_n(n, &mut rng);
            acc.push((sol.alpha * d.log_mag).exp());
        }
        let z = (acc.mean() - 1.0) / acc.std_error();
        detail.push_str(&format!("E[e^{{aS_{n}}}] z = {z:.2}; "));
        ok &= z.abs() <= 3.0;
    }

    // signed chain: E[X̃^alpha] = 1 and the block-length law
    let q = 0.4;
    let signed = FactorModel::SignedMixture { base: Box::new(fixture()), q };
    let ssol = solve_alpha(&signed, None).unwrap();
    let mut rng = substream(51, "acceptance-chain", 0, 0);
    let mut mart = perptail_core::stream::MeanAcc::default();
    let trials = 400_000u64;
    let mut counts = [0u64; 7];
    for _ in 0..trials {
        let b = mc::sample_stopped_chain(&signed, &ssol, &mut rng).unwrap();
        mart.push((ssol.alpha * b.w).exp());
        if (b.n1 as usize) < counts.len() {
            counts[b.n1 as usize] += 1;
        }
    }
    let zm = (mart.mean() - 1.0) / mart.std_error();
    detail.push_str(&format!("E[X̃^a] z = {zm:.2}; block law z: "));
    ok &= zm.abs() <= 3.0;
    let p = 1.0 - q;
    for n in 1..=6usize {
        let want = if n == 1 { p } else { q * q * p.powi(n as i32 - 2) };
        let got = counts[n] as f64 / trials as f64;
        let z = (got - want) / (want * (1.0 - want) / trials as f64).sqrt();
        detail.push_str(&format!("{z:.2} "));
        ok &= z.abs() <= 3.0;
    }
    c.finish(ok, detail);
}

#[test]
fn criterion_06_sign_symmetry() {
    let _gate = gate();
    let c = Criterion::begin(6, "sign symmetry", 300.0);
    let model = FactorModel::SignedMixture { base: Box::new(lognormal()), q: 0.45 };
    let sim = SimulationConfig {
        n_paths: 8_000_000,
        seed: 61,
        truncation: Truncation::Adaptive { eps: 1e-9, gamma: 1.0 },
        workers: WORKERS,
    };
    let ys = mc::simulate_y(&model, &sim, &exec()).unwrap();
    let x = (4.0f64).exp();
    let (up, down, hits_up, hits_down) = mc::tail_shares(&ys, x);
    let n = ys.len() as f64;
    let se = ((up * (1.0 - up) + down * (1.0 - down)) / n).sqrt();
    let z = (up - down) / se;
    c.finish(
        hits_up >= 200 && hits_down >= 200 && z.abs() <= 3.0,
        format!(
            "P(Y>x) = {up:.4e} ({hits_up} hits), P(Y<-x) = {down:.4e} ({hits_down} hits), z = {z:.2}"
        ),
    );
}

#[test]
fn criterion_07_ruin_stability() {
    let _gate = gate();
    let c = Criterion::begin(7, "ruin stability", 300.0);
    // log-normal: scaled first-passage estimates agree across decades
    let model = lognormal();
    let sol = solve_alpha(&model, None).unwrap();
    let mut scaled = Vec::new();
    for (i, l) in [10.0, 20.0, 30.0].into_iter().enumerate() {
        let est =
            mc::simulate_ruin_at_log(&model, &sol, l, &cfg(400_000, 70 + i as u64), &exec())
                .unwrap();
        let f = (sol.alpha * l).exp();
        scaled.push((est.value * f, est.std_error * f));
    }
    let mut ok = true;
    let mut detail = format!(
        "lognormal x^a P: {:.4}±{:.4}, {:.4}±{:.4}, {:.4}±{:.4}; ",
        scaled[0].0, scaled[0].1, scaled[1].0, scaled[1].1, scaled[2].0, scaled[2].1
    );
    for i in 0..scaled.len() {
        for j in i + 1..scaled.len() {
            let se = (scaled[i].1.powi(2) + scaled[j].1.powi(2)).sqrt();
            ok &= (scaled[i].0 - scaled[j].0).abs() <= 3.0 * se;
        }
    }

    // two-point fixture on a lattice-aligned grid: bounded within a factor 3
    let tp = fixture();
    let tsol = solve_alpha(&tp, None).unwrap();
    let mut lattice = Vec::new();
    for (i, j) in [10u32, 16, 22, 28].into_iter().enumerate() {
        let l = j as f64 * LN2;
        let est =
            mc::simulate_ruin_at_log(&tp, &tsol, l, &cfg(150_000, 90 + i as u64), &exec()).unwrap();
        lattice.push(est.value * (tsol.alpha * l).exp());
    }
    let lo = lattice.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = lattice.iter().cloned().fold(0.0f64, f64::max);
    detail.push_str(&format!("two-point lattice x^a P in [{lo:.4}, {hi:.4}] (band {:.3})", hi / lo));
    ok &= hi / lo <= 3.0;
    c.finish(ok, detail);
}

#[test]
fn criterion_08_multivariate_scalar_reduction() {
    let _gate = gate();
    let c = Criterion::begin(8, "multivariate scalar reduction", 600.0);
    let f = || perptail_core::MatrixEntry::Model { model: fixture() };
    let ens = perptail_core::MatrixEnsemble {
        d: 2,
        kind: perptail_core::EnsembleKind::Entries(vec![
            vec![f(), perptail_core::MatrixEntry::Zero],
            vec![perptail_core::MatrixEntry::Zero, f()],
        ]),
        dense_subgroup_assumed: false,
    };
    let depth = 24;
    let mvc = mv::solve_alpha_mv(&ens, depth, 4_000_000, None, 80, WORKERS, &exec()).unwrap();
    let tol = 3.0 * mvc.alpha_std_error + mvc.alpha_bias_bound;
    let alpha_ok = (mvc.alpha - 1.0).abs() <= tol;

    // e1-projection reduces to the scalar fixture; compare the horizon sum
    // against the exact enumeration over the same horizon
    let u = [1.0, 0.0];
    let log_x = 5.0;
    let xi = 1.5;
    let report = mv::mv_tail_estimates(
        &ens, &mvc, &u, &u, &[log_x], 1_000_000, xi, 81, WORKERS, &exec(),
    )
    .unwrap();
    let pt = &report.points[0];
    let n_horizon = ((1.0 + xi) * log_x / mvc.m_alpha).ceil() as u64;
    let truth = mc::brute_force_p_at_log(&fixture(), log_x, n_horizon).unwrap();
    let z = (pt.p_u - truth) / pt.p_u_se;
    c.finish(
        alpha_ok && z.abs() <= 3.0,
        format!(
            "alpha = {:.4} ± {:.4} (bias bound {:.4}, tol {tol:.4}); p_u(e^5) = {:.4e} vs exact {truth:.4e} over n <= {n_horizon}, z = {z:.2}",
            mvc.alpha, mvc.alpha_std_error, mvc.alpha_bias_bound, pt.p_u
        ),
    );
}

#[test]
fn criterion_09_directional_ratio() {
    let _gate = gate();
    let c = Criterion::begin(9, "directional ratio", 900.0);
    // swap-symmetric strictly positive two-scale ensemble with genuine
    // direction mixing (atoms {aP, aJPJ, bP, bJPJ}, P of unit spectral radius)
    let rho = (1.4 + 0.28f64.sqrt()) / 2.0;
    let p_rows = [[0.8 / rho, 0.3 / rho], [0.2 / rho, 0.6 / rho]];
    let (a, b) = (1.7, 0.33);
    let mut matrices = Vec::new();
    for scale in [a, b] {
        matrices.push(
            perptail_core::Matrix::from_rows(&[
                vec![scale * p_rows[0][0], scale * p_rows[0][1]],
                vec![scale * p_rows[1][0], scale * p_rows[1][1]],
            ])
            .unwrap(),
        );
        matrices.push(
            perptail_core::Matrix::from_rows(&[
                vec![scale * p_rows[1][1], scale * p_rows[1][0]],
                vec![scale * p_rows[0][1], scale * p_rows[0][0]],
            ])
            .unwrap(),
        );
    }
    let ens = perptail_core::MatrixEnsemble {
        d: 2,
        kind: perptail_core::EnsembleKind::Atoms { matrices, probs: vec![0.25; 4] },
        dense_subgroup_assumed: true,
    };

    let mvc = mv::solve_alpha_mv(&ens, 24, 2_000_000, None, 91, WORKERS, &exec()).unwrap();
    let u = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];
    let v = [1.0, 0.0];
    let report = mv::mv_tail_estimates(
        &ens, &mvc, &u, &v, &[5.0, 7.0, 9.0], 1_200_000, 1.5, 92, WORKERS, &exec(),
    )
    .unwrap();
    let deepest = report.points.iter().rev().find(|p| p.feasible).expect("a feasible point");
    let vu = std::f64::consts::FRAC_1_SQRT_2;
    let want = vu.powf(mvc.alpha);
    // combined SE: ratio noise plus the alpha uncertainty propagated through (v·u)^alpha
    let dalpha = vu.ln().abs() * want;
    let combined = (deepest.ratio_se.powi(2)
        + (dalpha * (mvc.alpha_std_error + mvc.alpha_bias_bound)).powi(2))
    .sqrt();
    let diff = (deepest.ratio - want).abs();
    c.finish(
        diff <= 3.0 * combined,
        format!(
            "alpha = {:.4}; deepest feasible log x = {}: ratio {:.4} ± {:.4} vs (v·u)^alpha = {want:.4} (|diff| = {diff:.4}, 3 combined SE = {:.4}, hits {} / {})",
            mvc.alpha, deepest.log_x, deepest.ratio, deepest.ratio_se, 3.0 * combined,
            deepest.hits_u, deepest.hits_uv
        ),
    );
}

#[test]
fn criterion_10_determinism() {
    let _gate = gate();
    let c = Criterion::begin(10, "determinism", 60.0);
    let dir = tempfile::tempdir().unwrap();
    let model_path = dir.path().join("fixture.json");
    std::fs::write(
        &model_path,
        r#"{"kind": "two_point", "a": 2.0, "b": 0.5, "p_a": 0.3333333333333333}"#,
    )
    .unwrap();
    let ctx = Ctx::new(12345, WORKERS);

    let mut all_equal = true;
    let mut checked = Vec::new();
    // every estimator command run twice must serialize identically
    let runs: Vec<(&str, Box<dyn Fn() -> runner::RunResult>)> = vec![
        (
            "is-tail",
            Box::new(|| {
                runner::run_is_tail(&model_path, 4.0, 2_000, Some(40), true, None, None, &ctx)
            }),
        ),
        (
            "ruin",
            Box::new(|| runner::run_ruin(&model_path, 8.0 * LN2, 50_000, false, None, &ctx)),
        ),
        (
            "goldie",
            Box::new(|| runner::run_goldie(&model_path, 20_000, Some(5.0), None, &ctx)),
        ),
        (
            "simulate-y",
            Box::new(|| {
                runner::run_simulate_y(
                    &model_path,
                    200_000,
                    &[4.0],
                    Truncation::Adaptive { eps: 1e-9, gamma: f64::NAN },
                    None,
                    &ctx,
                )
            }),
        ),
        (
            "lindley",
            Box::new(|| runner::run_lindley(&model_path, 200_000, &[1.0, 2.0], None, &ctx)),
        ),
    ];
    for (name, run) in &runs {
        let a = serde_json::to_string(&run().unwrap().document).unwrap();
        let b = serde_json::to_string(&run().unwrap().document).unwrap();
        checked.push(*name);
        all_equal &= a == b;
    }

    // threaded executor must agree with serial execution bit for bit
    let model = fixture();
    let sol = solve_alpha(&model, None).unwrap();
    let cc = cfg(0, 777);
    let serial = mc::is_tail_pn_at_log(&model, &sol, 11, 4.0, 50_000, &cc, &Serial).unwrap();
    let threaded =
        mc::is_tail_pn_at_log(&model, &sol, 11, 4.0, 50_000, &cc, &exec()).unwrap();
    all_equal &= serial == threaded;

    // conditions report comes along for free
    let rep = cramer::check_conditions(&model, &sol);
    c.finish(
        all_equal && rep.arithmetic,
        format!(
            "byte-identical JSON for {:?}; threaded == serial: {}",
            checked,
            serial == threaded
        ),
    );
}
