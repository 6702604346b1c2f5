//! Acceptance gate. Prints one PASS/FAIL/SKIP line per criterion and exits non-zero on
//! any unexpected failure.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pup_core::bench::{compute_ari, compute_delta, compute_rgap, run_method, Method, RunOptions};
use pup_core::benders::{
    analytic_duals, cut_from_duals, primal_subproblem_lp, BendersSeparator, CutOrigin, SeparationRoute, Subproblem,
};
use pup_core::branch_cut::{solve_pup_benders, LazyConstraints, MilpStatus};
use pup_core::follower::evaluate_open_set;
use pup_core::io::{generate_rnd, parse_pmpup, PmpupOptions, RndSpec};
use pup_core::lp::{solve_lp, LpStatus};
use pup_core::oracle::{brute_force, DEFAULT_BUDGET};
use pup_core::{Instance, LeaderDecision, SolverParams};

enum Outcome {
    Pass(String),
    Fail(String),
    /// Fails for a documented reason that no implementation can fix.
    KnownFail(String),
    Skip(String),
}

fn small_spec(k: u64) -> RndSpec {
    RndSpec {
        n_customers: 5 + (k % 16) as usize,
        n_facilities: 4 + ((k / 16) % 7) as usize,
        delta: if (k / 2).is_multiple_of(2) { 0.3 } else { 0.5 },
        seed: 1000 + k,
        p: 2 + (k % 2) as usize,
    }
}

fn rounded(v: f64) -> i64 {
    (v * 1e6).round() as i64
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, k: usize) -> LeaderDecision {
    let mut idx: Vec<usize> = (0..n).collect();
    for a in 0..k {
        let b = a + (rng.next_u64() % (n - a) as u64) as usize;
        idx.swap(a, b);
    }
    idx.truncate(k);
    LeaderDecision::new(idx, n).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for k in 0..200 {
        let inst: Instance = generate_rnd(&small_spec(k)).unwrap();
        let best = brute_force(&inst, DEFAULT_BUDGET).unwrap().objective;
        let s = solve_pup_benders(&inst, &SolverParams::default(), SeparationRoute::Analytic, false).unwrap();
        let phi = s.response.map(|r| r.phi_total).unwrap_or(f64::NAN);
        if s.milp.status != MilpStatus::Optimal || rounded(phi) != rounded(best) {
            bad.push(k);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let msg = format!("benders-as = brute force on {}/200 instances, {secs:.1}s (limit 60s)", 200 - bad.len());
    if bad.is_empty() && secs < 60.0 {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(format!("{msg}; mismatches {bad:?}"))
    }
}

fn criterion_2() -> Outcome {
    let methods = [Method::Srm, Method::SrmRelaxed, Method::Pdrm, Method::BendersLp, Method::BendersAs];
    let opts = RunOptions::default();
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for k in (0..200).step_by(4) {
        let inst: Instance = generate_rnd(&small_spec(k)).unwrap();
        let objs: Vec<f64> = methods
            .iter()
            .map(|&m| {
                let r = run_method("", &inst, None, m, &opts).unwrap();
                if r.record.status != MilpStatus::Optimal {
                    failures.push((k, m));
                }
                r.record.objective
            })
            .collect();
        let spread =
            objs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - objs.iter().cloned().fold(f64::INFINITY, f64::min);
        worst = worst.max(spread);
    }
    let msg =
        format!("srm, srm-relaxed, pdrm, benders-lp, benders-as on 50 instances; max spread {worst:.3e} (tol 1e-6)");
    if failures.is_empty() && worst <= 1e-6 {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(format!("{msg}; non-optimal {failures:?}"))
    }
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let inst: Instance = generate_rnd(&small_spec(rng.next_u64() % 200 + k)).unwrap();
        let n_j = inst.n_facilities();
        let k_open = 1 + (rng.next_u64() % n_j as u64) as usize;
        let x = random_subset(&mut rng, n_j, k_open);
        let xb = x.to_binary::<f64>();
        for i in 0..inst.n_customers() {
            let sol = solve_lp(&primal_subproblem_lp(&inst, &xb, i)).unwrap();
            if sol.status != LpStatus::Optimal {
                return Outcome::Fail(format!("subproblem LP ended {:?}", sol.status));
            }
            for y in &sol.x {
                worst = worst.max((y - y.round()).abs());
            }
        }
    }
    let msg = format!("100 (instance, x) pairs, max |y - round(y)| = {worst:.2e} (tol 1e-6)");
    if worst <= 1e-6 {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut feas, mut gap, mut tight, mut valid) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for t in 0..1000u64 {
        let inst: Instance = generate_rnd(&small_spec(t % 200 + 200 * (t / 200))).unwrap();
        let (n_i, n_j) = (inst.n_customers(), inst.n_facilities());
        let x = random_subset(&mut rng, n_j, inst.p());
        let i = (rng.next_u64() % n_i as u64) as usize;
        let d = analytic_duals(&inst, &x, i).unwrap();
        let phi = evaluate_open_set(&inst, &x).unwrap().phi_per_customer[i];
        let xb = x.to_binary::<f64>();
        feas = feas.max(d.max_infeasibility(&inst));
        gap = gap.max((d.objective(&inst, &xb) - phi).abs());
        let cut = cut_from_duals(&d, &inst, CutOrigin::Analytic);
        tight = tight.max((cut.value(&xb) - phi).abs());
        for open in (0..n_j).combinations(inst.p()) {
            let y = LeaderDecision::new(open, n_j).unwrap();
            let phi_y = evaluate_open_set(&inst, &y).unwrap().phi_per_customer[i];
            valid = valid.max(cut.value(&y.to_binary()) - phi_y);
        }
    }
    let msg = format!(
        "1000 triples: dual infeasibility {feas:.1e}, |dual obj - c_im| {gap:.1e}, tightness {tight:.1e} (tol 1e-9); max cut excess over Φ on Ω {valid:.1e}"
    );
    if feas <= 1e-9 && gap <= 1e-9 && tight <= 1e-9 && valid <= 1e-9 {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn find_pmpup(dir: &PathBuf, id: &str) -> Option<PathBuf> {
    std::fs::read_dir(dir).ok()?.filter_map(|e| e.ok().map(|e| e.path())).find(|p| {
        p.file_stem()
            .and_then(|s| s.to_str())
            .is_some_and(|s| s == id || s.strip_prefix("inst-").or_else(|| s.strip_prefix("inst")) == Some(id))
    })
}

fn criterion_5() -> Outcome {
    let Some(dir) = std::env::var_os("PUP_PMPUP_DIR").map(PathBuf::from) else {
        return Outcome::Skip("PUP_PMPUP_DIR not set; PMPUP library files unavailable".into());
    };
    let mut notes = Vec::new();
    let mut ok = true;
    let opts = RunOptions::default();
    for (id, want_phi, want_wt) in [("333", 172.0, Some(187.0)), ("433", 156.0, None)] {
        let Some(path) = find_pmpup(&dir, id) else {
            return Outcome::Skip(format!("inst-{id} not found in {}", dir.display()));
        };
        let text = std::fs::read_to_string(&path).unwrap();
        let popts = PmpupOptions { p: Some(14), instance_id: Some(id.into()), ..Default::default() };
        let inst: Instance = match parse_pmpup(&text, &popts) {
            Ok(i) => i,
            Err(e) => return Outcome::Fail(format!("inst-{id}: {e}")),
        };
        let phi = run_method(id, &inst, None, Method::BendersAs, &opts).unwrap().record.objective;
        let wt = run_method(id, &inst, None, Method::PmedianWt, &opts).unwrap().record.objective;
        let delta = compute_delta(wt, phi).unwrap_or(f64::NAN);
        notes.push(format!("inst-{id}: φ={phi} φ_wt={wt} Δ={delta:.2}%"));
        ok &= phi == want_phi;
        match want_wt {
            Some(w) => ok &= wt == w && (delta - 8.72).abs() < 0.005,
            None => ok &= delta == 0.0,
        }
    }
    let msg = notes.join("; ");
    if ok {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn criterion_6() -> Outcome {
    let inst: Instance =
        generate_rnd(&RndSpec { n_customers: 200, n_facilities: 50, delta: 0.3, seed: 2024, p: 10 }).unwrap();
    let params = SolverParams { time_limit: 5.0, ..SolverParams::default() };
    let run = solve_pup_benders(&inst, &params, SeparationRoute::Analytic, true).unwrap();
    let points: Vec<LeaderDecision> = run.points.unwrap().into_iter().take(40).collect();
    if points.is_empty() {
        return Outcome::Fail("no integer points separated".into());
    }
    let time = |route| {
        let mut sep = BendersSeparator::new(&inst, Subproblem::Preferences(route));
        for x in &points {
            let mut v = x.to_binary::<f64>();
            v.extend(std::iter::repeat_n(0.0, inst.n_customers()));
            sep.separate(&v, 1e-5);
        }
        (sep.stats.time, sep.stats.lp_solves)
    };
    let (analytic, a_lp) = time(SeparationRoute::Analytic);
    let (lp, l_lp) = time(SeparationRoute::Lp);
    let ratio = lp.as_secs_f64() / analytic.max(Duration::from_nanos(1)).as_secs_f64();
    let msg = format!(
        "{} integer points: analytic {:.4}s ({a_lp} LP solves), LP route {:.4}s ({l_lp} LP solves), ratio {ratio:.0}x (need >= 10x)",
        points.len(),
        analytic.as_secs_f64(),
        lp.as_secs_f64()
    );
    if ratio >= 10.0 && a_lp == 0 {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

/// Per-instance CPU seconds for the four methods of the PMPUP timing table, in column
/// order PDRM, SRM, Benders, Benders-AS.
const CPU_TABLE: [[f64; 4]; 30] = [
    [783.9, 451.4, 266.8, 220.0],
    [211.4, 124.5, 260.4, 198.4],
    [436.5, 97.4, 21.4, 12.9],
    [1546.8, 322.8, 282.2, 195.5],
    [688.2, 219.6, 278.6, 196.7],
    [905.4, 269.6, 342.3, 211.7],
    [479.3, 207.6, 241.1, 198.1],
    [918.7, 245.7, 226.6, 138.7],
    [682.4, 218.9, 270.5, 170.3],
    [1084.1, 398.4, 255.5, 201.2],
    [1039.5, 581.6, 274.3, 196.2],
    [1527.7, 650.0, 325.1, 207.7],
    [257.5, 281.3, 196.4, 119.6],
    [525.8, 365.3, 255.4, 196.9],
    [734.1, 265.6, 220.9, 122.1],
    [883.7, 264.8, 223.4, 131.9],
    [439.9, 284.3, 337.3, 183.7],
    [699.9, 280.5, 280.2, 165.1],
    [933.6, 336.8, 311.5, 146.4],
    [692.4, 128.7, 304.6, 144.7],
    [405.0, 127.8, 291.9, 142.7],
    [500.8, 230.3, 290.4, 154.9],
    [239.6, 100.8, 195.3, 123.5],
    [291.5, 116.3, 226.6, 153.1],
    [633.4, 296.6, 331.6, 184.2],
    [1506.0, 544.5, 292.2, 205.2],
    [637.3, 112.1, 203.0, 125.2],
    [754.7, 200.4, 262.1, 143.7],
    [616.5, 235.0, 306.9, 143.6],
    [779.9, 257.0, 328.8, 178.9],
];
const ARI_ROW: [f64; 3] = [344.46, 67.23, 60.87];
const AVG_ROW: [f64; 4] = [727.9, 273.9, 263.4, 163.8];

fn criterion_7a() -> Outcome {
    let got: Vec<f64> = (0..3).map(|k| compute_ari(AVG_ROW[k], AVG_ROW[3]).unwrap()).collect();
    let msg = format!("ARI from the printed one-decimal AVG row: {got:.2?} vs {ARI_ROW:?} (tol 0.01)");
    if got.iter().zip(ARI_ROW).all(|(g, w)| (g - w).abs() <= 0.01) {
        Outcome::Pass(msg)
    } else {
        Outcome::KnownFail(format!("{msg}; the printed averages are rounded"))
    }
}

fn criterion_7b() -> Outcome {
    let avg: Vec<f64> = (0..4).map(|k| CPU_TABLE.iter().map(|r| r[k]).sum::<f64>() / 30.0).collect();
    let got: Vec<f64> = (0..3).map(|k| compute_ari(avg[k], avg[3]).unwrap()).collect();
    let rgap_cases = [
        (100.0, 100.0, 0.0),
        (100.0, 99.0, 100.0 / 99.0),
        (100.004, 100.0, 0.0),
        (7502149.0, 7502149.0 / 1.0063, 0.63),
        (-90.0, -100.0, 10.0),
    ];
    let rgap_ok = rgap_cases.iter().all(|&(zopt, zbb, want)| (compute_rgap(zopt, zbb).unwrap() - want).abs() <= 1e-9)
        && compute_rgap(1.0, 0.0).is_none();
    let msg = format!(
        "ARI from the table's unrounded averages {:.3?}: {got:.2?} vs {ARI_ROW:?} (tol 0.01); rgap on {} synthetic pairs {}",
        avg,
        rgap_cases.len() + 1,
        if rgap_ok { "exact" } else { "MISMATCH" }
    );
    if rgap_ok && got.iter().zip(ARI_ROW).all(|(g, w)| (g - w).abs() <= 0.01) {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn criterion_8() -> Outcome {
    let spec = RndSpec { n_customers: 40, n_facilities: 15, delta: 0.5, seed: 99, p: 4 };
    let opts = RunOptions::default();
    let mut diffs = Vec::new();
    for m in [Method::BendersAs, Method::BendersLp, Method::Srm, Method::PmedianWt] {
        let once = || {
            let inst: Instance = generate_rnd(&spec).unwrap();
            let r = run_method("det", &inst, Some(0.5), m, &opts).unwrap();
            (r.record.objective.to_bits(), r.decision.unwrap().open().to_vec(), r.record.nodes, r.record.cuts)
        };
        if once() != once() {
            diffs.push(m);
        }
    }
    let msg =
        "objective, open set, nodes and cuts identical across two runs of benders-as, benders-lp, srm, pmedian-wt"
            .to_string();
    if diffs.is_empty() {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(format!("{msg}: differs for {diffs:?}"))
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 oracle equivalence", criterion_1),
        ("2 method cross-agreement", criterion_2),
        ("3 integral subproblem LP", criterion_3),
        ("4 analytic separation", criterion_4),
        ("5 PMPUP reproduction", criterion_5),
        ("6 separation speed", criterion_6),
        ("7a ARI from AVG row", criterion_7a),
        ("7b ARI/rgap formulas", criterion_7b),
        ("8 determinism", criterion_8),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let (tag, msg) = match f() {
            Outcome::Pass(m) => ("PASS", m),
            Outcome::Fail(m) => {
                failed += 1;
                ("FAIL", m)
            }
            Outcome::KnownFail(m) => ("FAIL (known)", m),
            Outcome::Skip(m) => ("SKIP", m),
        };
        println!("[{tag}] criterion {name}: {msg} [{:.1}s]", t.elapsed().as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
