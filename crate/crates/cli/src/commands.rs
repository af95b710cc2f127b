//! Subcommand implementations. Each returns the text to print and whether
//! the run counts as a success.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use daw_core::families::families_at;
use daw_core::oracle::{evaluate, lp_variable_count, relation_audit, verify_flow_plan, HostingCheck};
use daw_core::reduction::random_x3c;
use daw_core::synthesis::{oblivious_baseline, synthesize, two_stage_aware};
use daw_core::{
    best_known, brute_force_x3c, default_degree, enumerate_regular_topologies, paper_matrix, random_doubly_stochastic,
    witness_from_cover, x3c_to_instance, Algorithm, DemandMatrix, FlowPlan, MatrixFamily, Mode, Topology,
    X3CInstance,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::report::{read_input, timing, InputDigest, RunReport};
use crate::{AlgoChoice, BenchArgs, Cli, Command, EnumArgs, EvalArgs, GenArgs, PairArgs, ReduceArgs, SynthArgs, VerifyArgs};

pub const DEFAULT_MAX_LP_VARS: usize = 2000;
pub const BENCH_HEADER: &str = "n,source,seed,algorithm,mode,value";
const MAX_ENUM_N: usize = 4;

pub struct Output {
    pub text: String,
    pub ok: bool,
}

struct Ctx {
    seed: u64,
    inputs: Vec<InputDigest>,
    timings: Vec<(String, u128)>,
    max_lp_vars: usize,
}

impl Ctx {
    fn load<T: DeserializeOwned>(&mut self, path: &Path) -> Result<T, CliError> {
        let bytes = read_input(path, &mut self.inputs)?;
        serde_json::from_slice(&bytes).map_err(|e| CliError::Parse(path.display().to_string(), e))
    }

    fn timed<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push(timing(label, start.elapsed()));
        out
    }

    /// Refuses general-mode evaluation whose LP is above the cap.
    fn lp_guard(&self, g: &Topology, m: &DemandMatrix, mode: Mode) -> Result<(), CliError> {
        if mode.is_direct() {
            return Ok(());
        }
        let vars = lp_variable_count(g, m);
        if vars > self.max_lp_vars {
            return Err(CliError::LpBudget { vars, cap: self.max_lp_vars });
        }
        Ok(())
    }
}

fn max_lp_vars() -> Result<usize, CliError> {
    match std::env::var("DAW_MAX_LP_VARS") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Invalid(format!("DAW_MAX_LP_VARS = '{v}' is not a count"))),
        Err(_) => Ok(DEFAULT_MAX_LP_VARS),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).expect("report types serialize");
    std::fs::write(path, text + "\n").map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn csv_text(header: &str, rows: &[Vec<String>]) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn mode_list(mode: Option<Mode>) -> Vec<Mode> {
    mode.map_or_else(|| Mode::ALL.to_vec(), |m| vec![m])
}

pub fn dispatch(cli: &Cli, argv: &[String]) -> Result<Output, CliError> {
    let mut ctx = Ctx { seed: cli.seed, inputs: Vec::new(), timings: Vec::new(), max_lp_vars: max_lp_vars()? };
    let start = Instant::now();
    let (result, rows, ok) = match &cli.command {
        Command::Gen(a) => gen(&mut ctx, a)?,
        Command::Synth(a) => synth(&mut ctx, a)?,
        Command::Eval(a) => eval(&mut ctx, a)?,
        Command::Enum(a) => enumerate(&mut ctx, a)?,
        Command::Audit(a) => audit(&mut ctx, a)?,
        Command::Reduce(a) => reduce(&mut ctx, a)?,
        Command::Bench(a) => return bench(&mut ctx, a, cli.csv, argv),
        Command::Verify(a) => verify(&mut ctx, a)?,
    };
    ctx.timings.push(timing("total", start.elapsed()));
    let text = if cli.csv {
        let (header, rows) = rows;
        csv_text(header, &rows)
    } else {
        let report = RunReport { command: argv.to_vec(), seed: ctx.seed, inputs: ctx.inputs, result, timings_us: ctx.timings };
        serde_json::to_string_pretty(&report).expect("report types serialize") + "\n"
    };
    Ok(Output { text, ok })
}

type Rows = (&'static str, Vec<Vec<String>>);
type Done = (Value, Rows, bool);

fn gen(ctx: &mut Ctx, a: &GenArgs) -> Result<Done, CliError> {
    let (label, m) = if a.random {
        let n = a.n.ok_or_else(|| CliError::Invalid("--random needs --n".into()))?;
        if n == 0 || a.k == 0 {
            return Err(CliError::Invalid("--n and --k must be positive".into()));
        }
        (format!("random(n={n},k={},seed={})", a.k, ctx.seed), random_doubly_stochastic(n, a.k, ctx.seed))
    } else {
        let tag = a.family.as_deref().ok_or_else(|| CliError::Invalid("give --family or --random".into()))?;
        let family = MatrixFamily::from_tag(tag, a.n, a.kappa.clone()).map_err(CliError::invalid)?;
        (family.to_string(), paper_matrix(&family).map_err(CliError::invalid)?)
    };
    if let Some(out) = &a.out {
        write_json(out, &m)?;
    }
    let rows = m.rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
    Ok((json!({ "source": label, "matrix": m }), ("row", rows), true))
}

fn synth(ctx: &mut Ctx, a: &SynthArgs) -> Result<Done, CliError> {
    let m: DemandMatrix = ctx.load(&a.matrix)?;
    let seed = ctx.seed;
    let probe = oblivious_baseline(m.n());
    ctx.lp_guard(&probe, &m, a.mode)?;
    let (algorithm, g, extra) = match a.algo {
        AlgoChoice::Best => {
            let best = ctx.timed("synthesize", || best_known(&m, a.mode, seed)).map_err(CliError::invalid)?;
            let extra = json!({ "candidates": best.candidates });
            (best.algorithm, best.topology, extra)
        }
        AlgoChoice::One(Algorithm::TwoStage) if a.kappa.is_some() => {
            let kappa = a.kappa.clone().expect("checked above");
            let out = ctx
                .timed("synthesize", || two_stage_aware(&m, &kappa, a.retries, seed))
                .map_err(CliError::invalid)?;
            let extra = json!({ "kappa": kappa.to_string(), "two_stage": out });
            (Algorithm::TwoStage, out.topology, extra)
        }
        AlgoChoice::One(algo) => {
            let g = ctx.timed("synthesize", || synthesize(&m, algo, seed));
            (algo, g, Value::Null)
        }
    };
    let report = ctx.timed("evaluate", || evaluate(&g, &m, a.mode)).map_err(CliError::invalid)?;
    if let Some(out) = &a.out {
        write_json(out, &g)?;
    }
    let rows = vec![vec![algorithm.to_string(), a.mode.to_string(), report.value.to_string()]];
    let result = json!({
        "algorithm": algorithm,
        "topology": g,
        "mode": a.mode,
        "value": report.value.to_string(),
        "details": extra,
    });
    Ok((result, ("algorithm,mode,value", rows), true))
}

fn load_pair(ctx: &mut Ctx, p: &PairArgs) -> Result<(Topology, DemandMatrix), CliError> {
    let g: Topology = ctx.load(&p.graph)?;
    let m: DemandMatrix = ctx.load(&p.matrix)?;
    if g.n() != m.n() {
        return Err(CliError::Invalid(format!("graph has {} nodes, matrix has {}", g.n(), m.n())));
    }
    Ok((g, m))
}

fn eval(ctx: &mut Ctx, a: &EvalArgs) -> Result<Done, CliError> {
    let (g, m) = load_pair(ctx, &a.pair)?;
    let mut reports = Vec::new();
    for mode in mode_list(a.mode) {
        ctx.lp_guard(&g, &m, mode)?;
        let mut r = ctx.timed(mode.as_str(), || evaluate(&g, &m, mode)).map_err(CliError::invalid)?;
        if !a.witness {
            r.witness = None;
        }
        reports.push(r);
    }
    let rows = reports.iter().map(|r| vec![r.mode.to_string(), r.value.to_string()]).collect();
    let result = if reports.len() == 1 {
        json!({ "value": reports[0].value.to_string(), "reports": reports })
    } else {
        json!({ "reports": reports })
    };
    Ok((result, ("mode,value", rows), true))
}

fn enumerate(ctx: &mut Ctx, a: &EnumArgs) -> Result<Done, CliError> {
    let m: DemandMatrix = ctx.load(&a.matrix)?;
    let n = m.n();
    if n > MAX_ENUM_N {
        return Err(CliError::Invalid(format!("enumeration is limited to n <= {MAX_ENUM_N}, got n = {n}")));
    }
    let mut results = Vec::new();
    let mut rows = Vec::new();
    for mode in mode_list(a.mode) {
        ctx.lp_guard(&oblivious_baseline(n), &m, mode)?;
        let mut best: Option<(daw_core::Rational, Topology)> = None;
        let mut count = 0usize;
        let start = Instant::now();
        for g in enumerate_regular_topologies(n, default_degree(n)) {
            count += 1;
            let v = evaluate(&g, &m, mode).map_err(CliError::invalid)?.value;
            if best.as_ref().map_or(true, |(b, _)| v > *b) {
                best = Some((v, g));
            }
        }
        ctx.timings.push(timing(mode.as_str(), start.elapsed()));
        let (v, g) = best.expect("at least one regular topology exists");
        rows.push(vec![mode.to_string(), v.to_string(), count.to_string()]);
        results.push(json!({ "mode": mode, "value": v.to_string(), "topology": g, "topologies": count }));
    }
    let result = if results.len() == 1 { results.remove(0) } else { json!({ "modes": results }) };
    Ok((result, ("mode,value,topologies", rows), true))
}

fn audit(ctx: &mut Ctx, a: &PairArgs) -> Result<Done, CliError> {
    let (g, m) = load_pair(ctx, a)?;
    ctx.lp_guard(&g, &m, Mode::GeneralStrict)?;
    match ctx.timed("audit", || relation_audit(&g, &m)) {
        Ok(r) => {
            let (d, wd, s, w) = r.as_tuple();
            let rows = vec![vec![d.to_string(), wd.to_string(), s.to_string(), w.to_string(), "true".into()]];
            Ok((json!({ "holds": true, "audit": r }), ("direct,weak_direct,strict,weak,holds", rows), true))
        }
        Err(daw_core::oracle::OracleError::RelationViolation(msg)) => {
            let rows = vec![vec![String::new(), String::new(), String::new(), String::new(), "false".into()]];
            Ok((json!({ "holds": false, "violation": msg }), ("direct,weak_direct,strict,weak,holds", rows), false))
        }
        Err(e) => Err(CliError::invalid(e)),
    }
}

fn reduce(ctx: &mut Ctx, a: &ReduceArgs) -> Result<Done, CliError> {
    let inst: X3CInstance = match (&a.x3c, a.random) {
        (Some(path), _) => ctx.load(path)?,
        (None, Some((u, m))) => random_x3c(u, m, a.planted, ctx.seed).map_err(CliError::invalid)?,
        (None, None) => return Err(CliError::Invalid("give --x3c or --random".into())),
    };
    let art = ctx.timed("construct", || x3c_to_instance(&inst)).map_err(CliError::invalid)?;
    let cover = ctx.timed("brute-force", || brute_force_x3c(&inst));
    let mut witness = Value::Null;
    let mut ok = true;
    if let Some(c) = &cover {
        let (g, plan) = witness_from_cover(&inst, c).map_err(CliError::invalid)?;
        let rep = ctx
            .timed("verify", || verify_flow_plan(&g, &art.demand, &plan, &HostingCheck::GeneralWeak))
            .map_err(CliError::invalid)?;
        ok = rep.feasible && rep.served_fraction >= art.kappa;
        witness = json!({
            "feasible": rep.feasible,
            "served_fraction": rep.served_fraction.to_string(),
            "violations": rep.violations.len(),
        });
    }
    if let Some(out) = &a.out {
        write_json(out, &art.demand)?;
    }
    let rows = vec![vec![
        art.n.to_string(),
        art.n_star.to_string(),
        art.kappa.to_string(),
        art.h.to_string(),
        art.l.to_string(),
        cover.is_some().to_string(),
    ]];
    let result = json!({
        "instance": inst,
        "n": art.n,
        "n_star": art.n_star,
        "kappa": art.kappa.to_string(),
        "H": art.h.to_string(),
        "L": art.l.to_string(),
        "labels": art.labels,
        "cover": cover,
        "witness": witness,
    });
    Ok((result, ("n,n_star,kappa,H,L,has_cover", rows), ok))
}

/// Deterministic per-trial seed.
fn trial_seed(seed: u64, n: usize, trial: u64) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add(1000 * n as u64 + trial)
}

fn bench(ctx: &mut Ctx, a: &BenchArgs, csv: bool, argv: &[String]) -> Result<Output, CliError> {
    let start = Instant::now();
    let mut rows: Vec<Vec<String>> = Vec::new();
    for &n in &a.n {
        if n == 0 {
            return Err(CliError::Invalid("--n values must be positive".into()));
        }
        let mut sources: Vec<(String, u64, DemandMatrix)> = families_at(n)
            .into_iter()
            .map(|f| (f.tag().to_string(), ctx.seed, paper_matrix(&f).expect("corpus families are valid")))
            .collect();
        for trial in 0..a.trials {
            let s = trial_seed(ctx.seed, n, trial);
            sources.push(("random".into(), s, random_doubly_stochastic(n, 1 + (trial as usize % (n + 2)), s)));
        }
        for (source, seed, m) in &sources {
            for &mode in &a.modes {
                ctx.lp_guard(&oblivious_baseline(n), m, mode)?;
            }
            for algo in Algorithm::ALL {
                let g = synthesize(m, algo, *seed);
                for &mode in &a.modes {
                    let v = evaluate(&g, m, mode).map_err(CliError::invalid)?.value;
                    rows.push(vec![
                        n.to_string(),
                        source.clone(),
                        seed.to_string(),
                        algo.to_string(),
                        mode.to_string(),
                        v.to_string(),
                    ]);
                }
            }
        }
    }
    ctx.timings.push(timing("total", start.elapsed()));
    match &a.out {
        Some(path) => {
            append_csv(path, &rows)?;
            let result = json!({ "rows": rows.len(), "out": path.display().to_string() });
            let text = if csv {
                String::new()
            } else {
                let report = RunReport {
                    command: argv.to_vec(),
                    seed: ctx.seed,
                    inputs: std::mem::take(&mut ctx.inputs),
                    result,
                    timings_us: std::mem::take(&mut ctx.timings),
                };
                serde_json::to_string_pretty(&report).expect("report types serialize") + "\n"
            };
            Ok(Output { text, ok: true })
        }
        None => Ok(Output { text: csv_text(BENCH_HEADER, &rows), ok: true }),
    }
}

/// Appends rows, writing the header only when the file is new or empty.
fn append_csv(path: &Path, rows: &[Vec<String>]) -> Result<(), CliError> {
    let io = |e| CliError::Io(path.display().to_string(), e);
    let empty = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
    let mut text = String::new();
    if empty {
        text.push_str(BENCH_HEADER);
        text.push('\n');
    }
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    f.write_all(text.as_bytes()).map_err(io)
}

fn verify(ctx: &mut Ctx, a: &VerifyArgs) -> Result<Done, CliError> {
    let (g, m) = load_pair(ctx, &a.pair)?;
    let plan: FlowPlan = ctx.load(&a.plan)?;
    let check = match (a.mode, a.kappa.clone()) {
        (Mode::DirectStrict, Some(k)) => HostingCheck::DirectStrict(k),
        (Mode::GeneralStrict, Some(k)) => HostingCheck::GeneralStrict(k),
        (Mode::DirectWeak, _) => HostingCheck::DirectWeak,
        (Mode::GeneralWeak, _) => HostingCheck::GeneralWeak,
        (mode, None) => return Err(CliError::Invalid(format!("--mode {mode} needs --kappa"))),
    };
    let rep = ctx.timed("verify", || verify_flow_plan(&g, &m, &plan, &check)).map_err(CliError::invalid)?;
    let rows = vec![vec![rep.feasible.to_string(), rep.served_fraction.to_string(), rep.violations.len().to_string()]];
    let ok = rep.feasible;
    Ok((to_value(&rep), ("feasible,served_fraction,violations", rows), ok))
}
