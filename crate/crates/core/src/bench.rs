//! Benchmark harness: one record per (instance, method) run, plus report metrics.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::benders::SeparationRoute;
pub use crate::branch_cut::compute_rgap;
use crate::branch_cut::{
    solve_milp, solve_pmedian_benders, solve_pup_benders, MilpResult, MilpStatus, NodeRecord, SolverParams,
};
use crate::error::{Error, Result};
use crate::follower::evaluate_leader;
use crate::formulations::{build_pdrm, build_srm, VariableMap};
use crate::io::SolutionDoc;
use crate::model::{Instance, LeaderDecision};
use crate::oracle::{brute_force, DEFAULT_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "srm")]
    Srm,
    /// SRM with continuous assignment variables.
    #[serde(rename = "srm-relaxed")]
    SrmRelaxed,
    #[serde(rename = "pdrm")]
    Pdrm,
    #[serde(rename = "benders-lp")]
    BendersLp,
    #[serde(rename = "benders-as")]
    BendersAs,
    #[serde(rename = "brute")]
    Brute,
    /// Classical P-median solution evaluated under the customers' preferences.
    #[serde(rename = "pmedian-wt")]
    PmedianWt,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Srm,
        Method::SrmRelaxed,
        Method::Pdrm,
        Method::BendersLp,
        Method::BendersAs,
        Method::Brute,
        Method::PmedianWt,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Srm => "srm",
            Method::SrmRelaxed => "srm-relaxed",
            Method::Pdrm => "pdrm",
            Method::BendersLp => "benders-lp",
            Method::BendersAs => "benders-as",
            Method::Brute => "brute",
            Method::PmedianWt => "pmedian-wt",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method `{s}`")))
    }
}

/// One report row. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub method: Method,
    pub p: usize,
    pub delta: Option<f64>,
    pub cpu_s: f64,
    /// `None` when the gap is undefined (zero bound); see `abs_gap`.
    pub rgap_pct: Option<f64>,
    pub objective: f64,
    pub nodes: usize,
    pub cuts: usize,
    pub status: MilpStatus,
    #[serde(skip)]
    pub abs_gap: f64,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub params: SolverParams<f64>,
    /// Largest `|I|·|J|` accepted by the primal-dual model.
    pub pdrm_max_size: usize,
    pub brute_budget: u128,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { params: SolverParams::default(), pdrm_max_size: 2_500, brute_budget: DEFAULT_BUDGET }
    }
}

/// A finished run with everything needed for a solution document.
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub record: RunRecord,
    pub decision: Option<LeaderDecision>,
    pub assignment: Option<Vec<usize>>,
    pub best_bound: f64,
    /// Node log, filled when `params.record_log` is set.
    pub log: Vec<NodeRecord>,
}

impl MethodRun {
    pub fn solution_doc(&self) -> SolutionDoc {
        SolutionDoc {
            instance: self.record.instance.clone(),
            method: self.record.method.to_string(),
            status: self.record.status.as_str().to_string(),
            p: self.record.p,
            objective: self.record.objective,
            best_bound: self.best_bound,
            rgap_pct: self.record.rgap_pct,
            cpu_s: self.record.cpu_s,
            nodes: self.record.nodes,
            cuts: self.record.cuts,
            open: self.decision.as_ref().map(|d| d.open().to_vec()).unwrap_or_default(),
            assignment: self.assignment.clone().unwrap_or_default(),
        }
    }
}

fn from_milp(milp: &MilpResult<f64>) -> (MilpStatus, f64, Option<f64>, f64, usize, usize) {
    let rgap =
        if milp.status == MilpStatus::Optimal { Some(0.0) } else { compute_rgap(milp.objective, milp.best_bound) };
    let abs = (milp.objective - milp.best_bound).abs();
    (milp.status, milp.best_bound, rgap, abs, milp.nodes, milp.cuts_added)
}

fn decision_of(map: &VariableMap, milp: &MilpResult<f64>) -> Result<Option<LeaderDecision>> {
    milp.x.as_ref().map(|x| map.decision(x)).transpose()
}

/// Runs `method` on `inst`. The reported objective is always the follower cost of the
/// returned open set, so it can be re-verified from the record alone.
pub fn run_method(
    id: &str,
    inst: &Instance<f64>,
    delta: Option<f64>,
    method: Method,
    opts: &RunOptions,
) -> Result<MethodRun> {
    let start = Instant::now();
    let mut log = Vec::new();
    let (status, best_bound, rgap, abs_gap, nodes, cuts, decision) = match method {
        Method::Srm | Method::SrmRelaxed | Method::Pdrm => {
            let (p, map) = match method {
                Method::Pdrm => {
                    let size = inst.n_customers() * inst.n_facilities();
                    if size > opts.pdrm_max_size {
                        return Err(Error::InvalidArgument(format!(
                            "pdrm is limited to |I|·|J| <= {} (got {size})",
                            opts.pdrm_max_size
                        )));
                    }
                    build_pdrm(inst)?
                }
                _ => build_srm(inst, method == Method::SrmRelaxed)?,
            };
            let milp = solve_milp(&p, &opts.params, None)?;
            let (s, b, r, a, n, c) = from_milp(&milp);
            let decision = decision_of(&map, &milp)?;
            log = milp.log;
            (s, b, r, a, n, c, decision)
        }
        Method::BendersLp | Method::BendersAs => {
            let route = if method == Method::BendersAs { SeparationRoute::Analytic } else { SeparationRoute::Lp };
            let sol = solve_pup_benders(inst, &opts.params, route, false)?;
            let (s, b, r, a, n, c) = from_milp(&sol.milp);
            log = sol.milp.log;
            (s, b, r, a, n, c, sol.decision)
        }
        Method::PmedianWt => {
            let sol = solve_pmedian_benders(inst, &opts.params)?;
            let (s, b, r, a, n, c) = from_milp(&sol.milp);
            log = sol.milp.log;
            (s, b, r, a, n, c, sol.decision)
        }
        Method::Brute => {
            let r = brute_force(inst, opts.brute_budget)?;
            (MilpStatus::Optimal, r.objective, Some(0.0), 0.0, 0, 0, Some(r.decision))
        }
    };
    let response = decision.as_ref().map(|d| evaluate_leader(inst, d)).transpose()?;
    let cpu_s = start.elapsed().as_secs_f64();
    let objective = response.as_ref().map_or(f64::INFINITY, |r| r.phi_total);
    let record = RunRecord {
        instance: id.to_string(),
        method,
        p: inst.p(),
        delta,
        cpu_s,
        rgap_pct: rgap,
        objective,
        nodes,
        cuts,
        status,
        abs_gap,
    };
    Ok(MethodRun { record, decision, assignment: response.map(|r| r.chosen), best_bound, log })
}

/// `(avg_method − avg_baseline) / avg_baseline × 100`.
pub fn compute_ari(avg_method: f64, avg_baseline: f64) -> Result<f64> {
    if !(avg_baseline > 0.0) {
        return Err(Error::InvalidArgument("ARI needs a positive baseline average".into()));
    }
    Ok((avg_method - avg_baseline) / avg_baseline * 100.0)
}

/// `(φ_wt − φ) / φ × 100`, or `None` when `φ = 0`.
pub fn compute_delta(phi_wt: f64, phi: f64) -> Option<f64> {
    (phi != 0.0).then(|| (phi_wt - phi) / phi * 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub p: usize,
    pub phi_wt: f64,
    pub phi: f64,
    pub delta_pct: Option<f64>,
    pub open_wt: Vec<usize>,
    pub open: Vec<usize>,
    /// Both solves finished with proven optimality.
    pub optimal: bool,
}

/// Cost of ignoring preferences for each `P` in `p_list`.
pub fn sensitivity(inst: &Instance<f64>, p_list: &[usize], opts: &RunOptions) -> Result<Vec<SensitivityRow>> {
    p_list
        .iter()
        .map(|&p| {
            let at_p = inst.with_p(p)?;
            let wt = run_method("", &at_p, None, Method::PmedianWt, opts)?;
            let pref = run_method("", &at_p, None, Method::BendersAs, opts)?;
            let (phi_wt, phi) = (wt.record.objective, pref.record.objective);
            Ok(SensitivityRow {
                p,
                phi_wt,
                phi,
                delta_pct: compute_delta(phi_wt, phi),
                open_wt: wt.decision.map(|d| d.open().to_vec()).unwrap_or_default(),
                open: pref.decision.map(|d| d.open().to_vec()).unwrap_or_default(),
                optimal: wt.record.status == MilpStatus::Optimal && pref.record.status == MilpStatus::Optimal,
            })
        })
        .collect()
}

/// Comment line identifying the machine a report was produced on.
pub fn machine_fingerprint() -> String {
    let cpus = std::thread::available_parallelism().map_or(0, |n| n.get());
    format!(
        "# machine: os={} arch={} cpus={} pup-core={}",
        std::env::consts::OS,
        std::env::consts::ARCH,
        cpus,
        env!("CARGO_PKG_VERSION")
    )
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n.a.".to_string(), |x| format!("{x}"))
}

pub const CSV_HEADER: [&str; 10] =
    ["instance", "method", "p", "delta", "cpu_s", "rgap_pct", "objective", "nodes", "cuts", "status"];

fn record_fields(r: &RunRecord) -> [String; 10] {
    let rgap = match r.rgap_pct {
        Some(g) => format!("{g}"),
        None => format!("abs:{}", r.abs_gap),
    };
    [
        r.instance.clone(),
        r.method.to_string(),
        r.p.to_string(),
        r.delta.map_or_else(String::new, |d| d.to_string()),
        format!("{:.6}", r.cpu_s),
        rgap,
        format!("{}", r.objective),
        r.nodes.to_string(),
        r.cuts.to_string(),
        r.status.as_str().to_string(),
    ]
}

/// Header plus one line per record, no summary rows.
pub fn write_records_csv<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(record_fields(r))?;
    }
    w.flush()?;
    Ok(())
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// Per-method average CPU over all records.
pub fn averages(records: &[RunRecord], methods: &[Method]) -> Vec<(Method, Option<f64>)> {
    methods.iter().map(|&m| (m, mean(records.iter().filter(|r| r.method == m).map(|r| r.cpu_s)))).collect()
}

/// CPU of `method` divided by CPU of `baseline` on `instance`; `None` unless both runs
/// are optimal.
pub fn ratio(records: &[RunRecord], instance: &str, method: Method, baseline: Method) -> Option<f64> {
    let find = |m| records.iter().find(|r| r.instance == instance && r.method == m);
    let (a, b) = (find(method)?, find(baseline)?);
    (a.status == MilpStatus::Optimal && b.status == MilpStatus::Optimal && b.cpu_s > 0.0).then(|| a.cpu_s / b.cpu_s)
}

/// Writes records followed by `AVG`, `ARI` and `RATIO` rows. Summary rows put their
/// value in the `cpu_s` column and leave the others empty; `n.a.` marks undefined values.
pub fn write_compare_csv<W: Write>(out: W, records: &[RunRecord], methods: &[Method], baseline: Method) -> Result<()> {
    let mut out = out;
    writeln!(out, "{}", machine_fingerprint())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(record_fields(r))?;
    }
    let summary = |label: &str, method: Method, value: String| {
        let mut row = vec![String::new(); CSV_HEADER.len()];
        row[0] = label.to_string();
        row[1] = method.to_string();
        row[4] = value;
        row
    };
    let avgs = averages(records, methods);
    for &(m, avg) in &avgs {
        w.write_record(summary("AVG", m, fmt_opt(avg)))?;
    }
    let base_avg = avgs.iter().find(|(m, _)| *m == baseline).and_then(|(_, a)| *a);
    for &(m, avg) in &avgs {
        if m == baseline {
            continue;
        }
        let ari = match (avg, base_avg) {
            (Some(a), Some(b)) => compute_ari(a, b).ok(),
            _ => None,
        };
        w.write_record(summary("ARI", m, fmt_opt(ari)))?;
    }
    let mut ids: Vec<&str> = Vec::new();
    for r in records {
        if !ids.contains(&r.instance.as_str()) {
            ids.push(&r.instance);
        }
    }
    for id in ids {
        for &m in methods.iter().filter(|&&m| m != baseline) {
            w.write_record(summary(&format!("RATIO:{id}"), m, fmt_opt(ratio(records, id, m, baseline))))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Columns `p,phi_wt,phi,delta_pct,optimal`, then an `AVG` row over the defined Δ values.
pub fn write_sensitivity_csv<W: Write>(out: W, rows: &[SensitivityRow]) -> Result<()> {
    let mut out = out;
    writeln!(out, "{}", machine_fingerprint())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p", "phi_wt", "phi", "delta_pct", "optimal"])?;
    for r in rows {
        w.write_record([
            r.p.to_string(),
            format!("{}", r.phi_wt),
            format!("{}", r.phi),
            fmt_opt(r.delta_pct),
            r.optimal.to_string(),
        ])?;
    }
    let avg = mean(rows.iter().filter_map(|r| r.delta_pct));
    w.write_record(["AVG".to_string(), String::new(), String::new(), fmt_opt(avg), String::new()])?;
    w.flush()?;
    Ok(())
}
