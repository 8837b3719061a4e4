//! The `addlab` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use addlab_core::arith::{doubling, energy2, energy4, is_direct_sum, sumset};
use addlab_core::construction::{
    build_counterexample, plan_construction, validate_construction, ConstructionPlan, ValidateOptions,
};
use addlab_core::oracle::{energy2_oracle, energy4_oracle, ORACLE_GUARD};
use addlab_core::partition::{
    estar_exact, estar_heuristic, et_exact, ratio_of, PartitionQuantityReport, DEFAULT_ESTAR_CAP, DEFAULT_ET_CAP,
};
use addlab_core::procedures::{ruzsa_cover, schoen_cover, translate_saturate};
use addlab_core::regularity::{
    decompose, verify_decomposition, DecompositionResult, Move, MoveKind, RegularityParams, SplitStatus,
    DEFAULT_SPLIT_BUDGET, DEFAULT_SPLIT_CAP, DEFAULT_STRUCTURE_CAP,
};
use addlab_core::{Check, ExactRatio, GroupSet, Sign, Status};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::report::{
    int, parse_check, parse_rat, parse_set_json, parse_sets_json, rat, set_json, sets_json, sha256, Report,
};
use crate::setfile::{read_set, render_set, write_set};
use crate::suite::{verify_suite, Mutations};
use crate::{with_threads, CliError};

#[derive(Parser, Debug)]
#[command(name = "addlab", version, about = "Exact additive combinatorics on finite sets in Z^d and F_p^n")]
struct Cli {
    /// Print the JSON report instead of a summary.
    #[arg(long, global = true)]
    json: bool,
    /// Attach wall-clock timing to the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Pair {
    #[arg(long)]
    set_a: PathBuf,
    #[arg(long)]
    set_b: PathBuf,
}

#[derive(Args, Debug)]
struct WithSubset {
    #[arg(long)]
    set: PathBuf,
    #[arg(long)]
    subset: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// E(A,B), or E(A,B,C,D) with --four.
    Energy {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, requires_all = ["set_c", "set_d"])]
        four: bool,
        #[arg(long)]
        set_c: Option<PathBuf>,
        #[arg(long)]
        set_d: Option<PathBuf>,
    },
    /// A+B (A+A without --set-b), or A-B with --minus.
    Sumset {
        #[arg(long)]
        set_a: PathBuf,
        #[arg(long)]
        set_b: Option<PathBuf>,
        #[arg(long)]
        minus: bool,
        /// Write the sumset as a set file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// |A+A| / |A|.
    Doubling {
        #[arg(long)]
        set: PathBuf,
    },
    /// E_*[A]: exact up to --exact-cap, seeded lower bound with --budget.
    Estar {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ESTAR_CAP)]
        exact_cap: usize,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// E_T[A], exact.
    Et {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, value_parser = parse_ratio)]
        t: ExactRatio,
        #[arg(long, default_value_t = DEFAULT_ET_CAP)]
        cap: usize,
    },
    /// Peel heavy translates of B off A.
    Schoen {
        #[command(flatten)]
        pair: Pair,
    },
    /// Greedy Ruzsa covering of A by translates of a subset.
    Cover {
        #[command(flatten)]
        sets: WithSubset,
    },
    /// Absorb translates of a subset meeting the rest of A in at least |A'|/T points.
    Saturate {
        #[command(flatten)]
        sets: WithSubset,
        #[arg(long, value_parser = parse_ratio)]
        t: ExactRatio,
    },
    /// Build the nested-subspace set in F_p^n.
    Construct {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        a: u64,
        /// Set file to write; the plan goes to `<out>.plan.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        validate: bool,
        #[arg(long, default_value_t = 4096)]
        sumset_cap: usize,
        #[arg(long, default_value_t = DEFAULT_ESTAR_CAP)]
        estar_cap: usize,
        #[arg(long, default_value_t = 50)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Split/merge regularity decomposition.
    Decompose {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, value_parser = parse_ratio)]
        epsilon: ExactRatio,
        #[arg(long, value_parser = parse_ratio)]
        omega: ExactRatio,
        #[arg(long, default_value_t = DEFAULT_SPLIT_CAP)]
        split_cap: usize,
        #[arg(long, default_value_t = DEFAULT_SPLIT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_STRUCTURE_CAP)]
        structure_cap: usize,
    },
    /// Recheck a decomposition report against its set.
    VerifyDecomposition {
        #[arg(long)]
        set: PathBuf,
        /// JSON report written by `decompose --json`.
        #[arg(long)]
        result: PathBuf,
    },
    /// Randomized run of every invariant.
    VerifySuite {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, hide = true)]
        corrupt_energy: bool,
    },
}

fn parse_ratio(s: &str) -> Result<ExactRatio, String> {
    s.parse().map_err(|e: addlab_core::Error| e.to_string())
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code: 0 when every check passes, 1 when one fails, 2 on usage errors.
pub fn run<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    let threads = match std::env::var("ADDLAB_THREADS") {
        Ok(v) => match v.parse::<usize>() {
            Ok(n) if n >= 1 => Some(n),
            _ => {
                let _ = writeln!(err, "error: ADDLAB_THREADS must be a positive integer, got {v:?}");
                return 2;
            }
        },
        Err(_) => None,
    };
    let start = Instant::now();
    let result = match threads {
        Some(n) => with_threads(n, || execute(&cli.command)),
        None => execute(&cli.command),
    };
    match result {
        Ok((mut report, summary)) => {
            if cli.timing {
                report.timing = Some(start.elapsed());
            }
            let _ = if cli.json {
                out.write_all(report.render().as_bytes())
            } else {
                write_summary(out, &summary, &report)
            };
            i32::from(report.failed())
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                CliError::Usage(_) => 2,
                CliError::Rejected(_) => 1,
            }
        }
    }
}

fn write_summary(out: &mut dyn std::io::Write, summary: &str, report: &Report) -> std::io::Result<()> {
    out.write_all(summary.as_bytes())?;
    for c in &report.checks {
        let mut line = format!("{:<8} {}", c.status.as_str(), c.name);
        for (k, v) in &c.witnesses {
            if v.denom() == &1.into() {
                let _ = write!(line, "  {k}={}", v.numer());
            } else {
                let _ = write!(line, "  {k}={v}");
            }
        }
        writeln!(out, "{line}")?;
    }
    if let Some(t) = report.timing {
        writeln!(out, "elapsed {} ms", t.as_millis())?;
    }
    Ok(())
}

type Outcome = Result<(Report, String), CliError>;

fn load(report: &mut Report, role: &str, path: &Path) -> Result<GroupSet, CliError> {
    let (set, bytes) = read_set(path)?;
    report.file(role, &path.display().to_string(), &bytes);
    Ok(set)
}

fn execute(cmd: &Command) -> Outcome {
    match cmd {
        Command::Energy { pair, four, set_c, set_d } => cmd_energy(pair, *four, set_c.as_deref(), set_d.as_deref()),
        Command::Sumset { set_a, set_b, minus, out } => cmd_sumset(set_a, set_b.as_deref(), *minus, out.as_deref()),
        Command::Doubling { set } => cmd_doubling(set),
        Command::Estar { set, exact_cap, budget, seed } => cmd_estar(set, *exact_cap, *budget, *seed),
        Command::Et { set, t, cap } => cmd_et(set, t, *cap),
        Command::Schoen { pair } => cmd_schoen(pair),
        Command::Cover { sets } => cmd_cover(sets),
        Command::Saturate { sets, t } => cmd_saturate(sets, t),
        Command::Construct { p, k, m, a, out, validate, sumset_cap, estar_cap, budget, seed } => {
            let opts = ValidateOptions {
                sumset_cap: *sumset_cap,
                estar_cap: *estar_cap,
                heuristic_budget: *budget,
                seed: *seed,
            };
            cmd_construct(*p, *k, *m, *a, out.as_deref(), validate.then_some(opts))
        }
        Command::Decompose { set, epsilon, omega, split_cap, budget, seed, structure_cap } => {
            let mut params = RegularityParams::new(epsilon.clone(), omega.clone())?;
            params.split_exact_cap = *split_cap;
            params.split_budget = *budget;
            params.seed = *seed;
            params.structure_cap = *structure_cap;
            cmd_decompose(set, &params)
        }
        Command::VerifyDecomposition { set, result } => cmd_verify_decomposition(set, result),
        Command::VerifySuite { seed, trials, corrupt_energy } => {
            let report = verify_suite(*seed, *trials as usize, Mutations { corrupt_energy: *corrupt_energy });
            let failed = report.checks.iter().filter(|c| c.failed()).count();
            Ok((report, format!("{failed} failing properties\n")))
        }
    }
}

fn cmd_energy(pair: &Pair, four: bool, set_c: Option<&Path>, set_d: Option<&Path>) -> Outcome {
    let mut report = Report::new("energy");
    let a = load(&mut report, "a", &pair.set_a)?;
    let b = load(&mut report, "b", &pair.set_b)?;
    let within_guard = |sizes: &[usize]| sizes.iter().map(|&s| s as u128).product::<u128>() <= ORACLE_GUARD;
    if four {
        let c = load(&mut report, "c", set_c.expect("clap requires --set-c"))?;
        let d = load(&mut report, "d", set_d.expect("clap requires --set-d"))?;
        let e = energy4(&a, &b, &c, &d)?;
        report.output("energy4", int(e));
        if within_guard(&[a.len(), b.len(), c.len(), d.len()]) {
            report.check(Check::assert("energy4.oracle", energy4_oracle(&a, &b, &c, &d)? == e).with("energy", e));
        } else {
            report.check(Check::reported("energy4.oracle").with("energy", e));
        }
        return Ok((report, format!("{e}\n")));
    }
    let e = energy2(&a, &b)?;
    report.output("energy2", int(e));
    let bound = (a.len() as u128 * b.len() as u128).pow(2);
    if e > 0 {
        for sign in [Sign::Plus, Sign::Minus] {
            let s = sumset(&a, &b, sign)?.len() as u128;
            let name = if sign == Sign::Plus { "cauchy_schwarz.plus" } else { "cauchy_schwarz.minus" };
            report.check(Check::assert(name, e * s >= bound).with("E|A±B|", e * s).with("|A|^2|B|^2", bound));
        }
    }
    if within_guard(&[a.len(), a.len(), b.len(), b.len()]) {
        report.check(Check::assert("energy2.oracle", energy2_oracle(&a, &b)? == e).with("energy", e));
    } else {
        report.check(Check::reported("energy2.oracle").with("energy", e));
    }
    Ok((report, format!("{e}\n")))
}

fn cmd_sumset(set_a: &Path, set_b: Option<&Path>, minus: bool, out: Option<&Path>) -> Outcome {
    let mut report = Report::new("sumset");
    let a = load(&mut report, "a", set_a)?;
    let b = match set_b {
        Some(p) => load(&mut report, "b", p)?,
        None => a.clone(),
    };
    let sign = if minus { Sign::Minus } else { Sign::Plus };
    report.param("sign", sign.symbol().to_string());
    let s = sumset(&a, &b, sign)?;
    let direct = is_direct_sum(&a, &b)?;
    report.output("size", s.len());
    report.output("direct", direct);
    report.output("sumset", set_json(&s));
    let lo = a.len().max(b.len());
    let hi = a.len() * b.len();
    report.check(Check::assert("sumset.size_bounds", lo <= s.len() && s.len() <= hi).with("|A±B|", s.len()));
    if let Some(path) = out {
        write_set(path, &s)?;
    }
    Ok((report, format!("|A{}B| = {}\n", sign.symbol(), s.len())))
}

fn cmd_doubling(set: &Path) -> Outcome {
    let mut report = Report::new("doubling");
    let a = load(&mut report, "set", set)?;
    let d = doubling(&a)?;
    report.output("size", a.len());
    report.output("sumset_size", sumset(&a, &a, Sign::Plus)?.len());
    report.output("doubling", rat(&d));
    report.check(Check::assert("doubling.at_least_one", d >= 1).with("D[A]", d.clone()));
    Ok((report, format!("{d}\n")))
}

fn quantity_json(q: &PartitionQuantityReport) -> Value {
    json!({
        "value": rat(&q.value),
        "mode": q.mode.as_str(),
        "trials": q.trials,
        "seed": q.seed,
        "witness": {
            "x": set_json(&q.witness.x),
            "y": set_json(&q.witness.y),
            "energy": int(q.witness.energy),
            "ratio": rat(&q.witness.ratio),
        },
    })
}

fn cmd_estar(set: &Path, cap: usize, budget: Option<u64>, seed: u64) -> Outcome {
    let mut report = Report::new("estar");
    let a = load(&mut report, "set", set)?;
    let q = match budget {
        Some(b) => {
            report.param("budget", b);
            report.param("seed", seed);
            estar_heuristic(&a, b, seed)?
        }
        None => {
            report.param("exact_cap", cap);
            estar_exact(&a, cap).map_err(|e| CliError::Usage(format!("{e}; pass --budget for a lower bound")))?
        }
    };
    report.output("estar", quantity_json(&q));
    let recomputed = ratio_of(&q.witness.x, &q.witness.y, a.len())?;
    report.check(Check::assert("estar.witness", recomputed == q.value).with("ratio", recomputed));
    let quarter = ExactRatio::new(a.len() as i64, 4)?;
    report.check(
        Check::assert("estar.upper_bound", q.value <= quarter).with("E_*", q.value.clone()).with("|A|/4", quarter),
    );
    Ok((report, format!("{} ({})\n", q.value, q.mode.as_str())))
}

fn cmd_et(set: &Path, t: &ExactRatio, cap: usize) -> Outcome {
    let mut report = Report::new("et");
    let a = load(&mut report, "set", set)?;
    report.param("t", rat(t));
    report.param("cap", cap);
    let q = et_exact(&a, t, cap)?;
    report.output("et", quantity_json(&q));
    let recomputed = ratio_of(&q.witness.x, &q.witness.y, a.len())?;
    report.check(Check::assert("et.witness", recomputed == q.value).with("ratio", recomputed));
    if *t >= 2 {
        let d = doubling(&a)?;
        report.check(Check::assert("et.doubling_bound", q.value <= d).with("E_T", q.value.clone()).with("D[A]", d));
    }
    Ok((report, format!("{}\n", q.value)))
}

fn cmd_schoen(pair: &Pair) -> Outcome {
    let mut report = Report::new("schoen");
    let a = load(&mut report, "a", &pair.set_a)?;
    let b = load(&mut report, "b", &pair.set_b)?;
    let res = schoen_cover(&a, &b)?;
    report.output("translates", res.translates.iter().map(|x| x.to_string()).collect::<Vec<_>>());
    report.output("x", set_json(&res.x));
    report.output("covered", set_json(&res.covered));
    report.output("k", rat(&res.k));
    report.output("energy", int(res.energy));
    report.output("steps", res.steps);
    report.extend_checks(res.certify(&a, &b)?);
    Ok((report, format!("K = {}, |X| = {}, |A ∩ (B+X)| = {}\n", res.k, res.x.len(), res.covered.len())))
}

fn cmd_cover(sets: &WithSubset) -> Outcome {
    let mut report = Report::new("cover");
    let a = load(&mut report, "set", &sets.set)?;
    let sub = load(&mut report, "subset", &sets.subset)?;
    let res = ruzsa_cover(&a, &sub)?;
    report.output("z", set_json(&res.z));
    report.output("sum_size", res.sum_size);
    report.extend_checks(res.certify(&a, &sub)?);
    Ok((report, format!("|Z| = {}\n", res.z.len())))
}

fn cmd_saturate(sets: &WithSubset, t: &ExactRatio) -> Outcome {
    let mut report = Report::new("saturate");
    let a = load(&mut report, "set", &sets.set)?;
    let sub = load(&mut report, "subset", &sets.subset)?;
    report.param("t", rat(t));
    let res = translate_saturate(&a, &sub, t)?;
    report.output("y", set_json(&res.y));
    report.output("z", set_json(&res.z));
    report.output("translates", res.translates.iter().map(|x| x.to_string()).collect::<Vec<_>>());
    report.output("steps", res.steps);
    report.extend_checks(res.certify(&a, &sub, t)?);
    Ok((report, format!("|Y| = {}, |Z| = {}, steps = {}\n", res.y.len(), res.z.len(), res.steps)))
}

fn plan_json(plan: &ConstructionPlan) -> Value {
    json!({
        "p": plan.p,
        "k": plan.k,
        "m": plan.m,
        "a": plan.a,
        "n": plan.n,
        "h": plan.h,
        "group": plan.spec().to_string(),
        "l_exponents": plan.l_exponents,
        "part_sizes": (1..=plan.k).map(|j| int(plan.part_size(j))).collect::<Vec<_>>(),
        "total_size": int(plan.total_size()),
        "warnings": plan.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
    })
}

fn cmd_construct(p: u64, k: usize, m: u64, a: u64, out: Option<&Path>, validate: Option<ValidateOptions>) -> Outcome {
    let mut report = Report::new("construct");
    for (key, v) in [("p", p), ("k", k as u64), ("m", m), ("a", a)] {
        report.param(key, v);
    }
    let plan = plan_construction(p, k, m, a)?;
    report.output("plan", plan_json(&plan));
    let built = build_counterexample(&plan)?;
    report.output("size", built.set.len());
    let mut summary = format!("|A| = {} in {}\n", built.set.len(), plan.spec());
    for w in &plan.warnings {
        let _ = writeln!(summary, "warning: {w}");
    }
    if let Some(path) = out {
        write_set(path, &built.set)?;
        let mut sidecar = plan_json(&plan);
        sidecar["parts"] = sets_json(&built.parts);
        sidecar["set_sha256"] = sha256(render_set(&built.set).as_bytes()).into();
        let side = sidecar_path(path);
        let text = serde_json::to_string_pretty(&sidecar).expect("json values serialize") + "\n";
        fs::write(&side, text).map_err(|e| CliError::Usage(format!("{}: {e}", side.display())))?;
    }
    if let Some(opts) = validate {
        report.param("sumset_cap", opts.sumset_cap);
        report.param("estar_cap", opts.estar_cap);
        report.param("budget", opts.heuristic_budget);
        report.param("seed", opts.seed);
        let v = validate_construction(&built, &opts)?;
        report.output("part_sizes", v.part_sizes.clone());
        report.output("a1_plus_ak", v.a1_plus_ak);
        report.output("lower_bound", int(v.lower_bound));
        report.output("sumset_size", v.sumset_size);
        report.output("doubling", v.doubling.as_ref().map(rat));
        report.output(
            "estar",
            json!({ "value": rat(&v.estar.value), "mode": v.estar.mode.as_str(), "trials": v.estar.trials }),
        );
        report.extend_checks(v.checks);
    }
    Ok((report, summary))
}

/// `<out>.plan.json` next to the set file.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".plan.json");
    PathBuf::from(name)
}

fn status_str(s: SplitStatus) -> &'static str {
    s.as_str()
}

fn parse_status(v: &Value) -> Result<SplitStatus, String> {
    match v.as_str() {
        Some("certified-exact") => Ok(SplitStatus::CertifiedExact),
        Some("heuristic-no-violation-found") => Ok(SplitStatus::HeuristicNoViolationFound),
        _ => Err("bad split status".into()),
    }
}

fn decomposition_json(r: &DecompositionResult) -> Value {
    let moves: Vec<Value> = r
        .moves
        .iter()
        .map(|m| {
            json!({
                "kind": if m.kind == MoveKind::Merge { "merge" } else { "split" },
                "first": set_json(&m.first),
                "second": set_json(&m.second),
                "objective": rat(&m.objective),
            })
        })
        .collect();
    json!({
        "parts": sets_json(&r.parts),
        "parts_status": r.parts_status.iter().map(|s| status_str(*s)).collect::<Vec<_>>(),
        "noise_parts": sets_json(&r.noise_parts),
        "noise_status": r.noise_status.iter().map(|s| status_str(*s)).collect::<Vec<_>>(),
        "omega": set_json(&r.omega_set),
        "k": rat(&r.k),
        "energy": int(r.energy),
        "objective": rat(&r.objective),
        "moves": moves,
        "certificates": r.certificates.iter().map(crate::report::check_json).collect::<Vec<_>>(),
    })
}

fn parse_decomposition(v: &Value) -> Result<DecompositionResult, String> {
    let statuses = |key: &str| -> Result<Vec<SplitStatus>, String> {
        v[key].as_array().ok_or(format!("missing {key}"))?.iter().map(parse_status).collect()
    };
    let moves = v["moves"]
        .as_array()
        .ok_or("missing moves")?
        .iter()
        .map(|m| {
            let kind = match m["kind"].as_str() {
                Some("merge") => MoveKind::Merge,
                Some("split") => MoveKind::Split,
                _ => return Err("bad move kind".to_string()),
            };
            Ok(Move {
                kind,
                first: parse_set_json(&m["first"])?,
                second: parse_set_json(&m["second"])?,
                objective: parse_rat(&m["objective"])?,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    let energy = match &v["energy"] {
        Value::Number(n) => n.as_u64().map(u128::from),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
    .ok_or("bad energy")?;
    Ok(DecompositionResult {
        parts: parse_sets_json(&v["parts"])?,
        parts_status: statuses("parts_status")?,
        noise_parts: parse_sets_json(&v["noise_parts"])?,
        noise_status: statuses("noise_status")?,
        omega_set: parse_set_json(&v["omega"])?,
        k: parse_rat(&v["k"])?,
        energy,
        objective: parse_rat(&v["objective"])?,
        moves,
        certificates: v["certificates"]
            .as_array()
            .ok_or("missing certificates")?
            .iter()
            .map(parse_check)
            .collect::<Result<_, _>>()?,
    })
}

fn params_json(report: &mut Report, p: &RegularityParams) {
    report.param("epsilon", rat(&p.epsilon));
    report.param("omega", rat(&p.omega));
    report.param("split_cap", p.split_exact_cap);
    report.param("budget", p.split_budget);
    report.param("seed", p.seed);
    report.param("structure_cap", p.structure_cap);
}

fn parse_params(v: &Value) -> Result<RegularityParams, String> {
    let uint = |key: &str| v[key].as_u64().ok_or(format!("missing parameter {key}"));
    let mut p = RegularityParams::new(parse_rat(&v["epsilon"])?, parse_rat(&v["omega"])?).map_err(|e| e.to_string())?;
    p.split_exact_cap = uint("split_cap")? as usize;
    p.split_budget = uint("budget")?;
    p.seed = uint("seed")?;
    p.structure_cap = uint("structure_cap")? as usize;
    Ok(p)
}

fn cmd_decompose(set: &Path, params: &RegularityParams) -> Outcome {
    let mut report = Report::new("decompose");
    let a = load(&mut report, "set", set)?;
    params_json(&mut report, params);
    let res = decompose(&a, params)?;
    for (k, v) in decomposition_json(&res).as_object().expect("object") {
        report.output(k, v.clone());
    }
    report.extend_checks(res.certificates.iter().cloned());
    let summary = format!(
        "{} parts, |Ω| = {}, K = {}, objective {} after {} moves\n",
        res.parts.len(),
        res.omega_set.len(),
        res.k,
        res.objective,
        res.moves.len()
    );
    Ok((report, summary))
}

fn cmd_verify_decomposition(set: &Path, result: &Path) -> Outcome {
    let mut report = Report::new("verify-decomposition");
    let (a, bytes) = read_set(set)?;
    report.file("set", &set.display().to_string(), &bytes);
    let raw = fs::read(result).map_err(|e| CliError::Usage(format!("{}: {e}", result.display())))?;
    report.file("result", &result.display().to_string(), &raw);
    let doc: Value = serde_json::from_slice(&raw).map_err(|e| CliError::Usage(format!("{}: {e}", result.display())))?;
    let bad = |e: String| CliError::Usage(format!("{}: {e}", result.display()));
    let params = parse_params(&doc["inputs"]["params"]).map_err(bad)?;
    let res = parse_decomposition(&doc["outputs"]).map_err(bad)?;
    params_json(&mut report, &params);
    let recorded = doc["inputs"]["files"]["set"]["sha256"].as_str().unwrap_or("");
    report.check(Check::assert("input_digest", recorded == sha256(&bytes)));
    let v = verify_decomposition(&res, &a, &params)?;
    let asserted = v.checks.iter().filter(|c| c.status != Status::Reported).count();
    report.extend_checks(v.checks);
    Ok((report, format!("{asserted} asserted conditions rechecked\n")))
}
