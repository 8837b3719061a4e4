//! Randomized invariant suite and the numbered acceptance criteria.
//!
//! Each criterion is a [`Report`] built from seeded instances; `verify-suite`
//! runs every section at a chosen trial count. A property that fails records
//! its first counterexample under `outputs.failures`.

use addlab_core::arith::{doubling, energy2, energy4, iterated_sumset, sumset};
use addlab_core::check::all_pass;
use addlab_core::construction::{build_counterexample, plan_construction, validate_construction, ValidateOptions};
use addlab_core::oracle::{energy2_oracle, energy4_oracle};
use addlab_core::partition::{estar_exact, et_exact, Mode, DEFAULT_ESTAR_CAP, DEFAULT_ET_CAP};
use addlab_core::procedures::{ruzsa_cover, schoen_cover, translate_saturate};
use addlab_core::regularity::{decompose, verify_decomposition, RegularityParams};
use addlab_core::{Check, ExactRatio, GroupSet, GroupSpec, Sign, Status};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::corpus::{pick_ambient, random_set, random_subset, random_t, stream};
use crate::report::{int, rat, set_json, sets_json, Report};

pub const ACCEPTANCE_SEED: u64 = 7;

/// Deliberate faults for testing the harness itself.
#[derive(Debug, Clone, Copy, Default)]
pub struct Mutations {
    /// Adds one to every fast `energy2` value before comparing with the oracle.
    pub corrupt_energy: bool,
}

struct Tally {
    name: String,
    instances: u64,
    failures: u64,
    first: Option<Value>,
}

impl Tally {
    fn new(name: impl Into<String>) -> Self {
        Tally { name: name.into(), instances: 0, failures: 0, first: None }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(witness());
            }
        }
    }

    fn finish(self, report: &mut Report) {
        report.check(
            Check::assert(&self.name, self.failures == 0)
                .with("instances", self.instances)
                .with("failures", self.failures),
        );
        if let Some(w) = self.first {
            let failures = report.outputs.entry("failures").or_insert_with(|| Value::Object(Map::new()));
            failures.as_object_mut().expect("object").insert(self.name, w);
        }
    }
}

fn r(n: i64, d: i64) -> ExactRatio {
    ExactRatio::new(n, d).expect("nonzero denominator")
}

fn same_ambient_sets(rng: &mut ChaCha8Rng, count: usize, lo: usize, hi: usize) -> Vec<GroupSet> {
    let ambient = pick_ambient(rng);
    (0..count).map(|_| random_set(rng, ambient, lo, hi)).collect()
}

/// The quadruples shared by the oracle and Cauchy–Schwarz sections.
fn energy_corpus(seed: u64, count: usize) -> Vec<Vec<GroupSet>> {
    let mut rng = stream(seed, 1);
    (0..count).map(|_| same_ambient_sets(&mut rng, 4, 2, 10)).collect()
}

pub fn energy_oracle_section(report: &mut Report, seed: u64, count: usize, mutations: Mutations) {
    let mut e2 = Tally::new("energy2.oracle");
    let mut e4 = Tally::new("energy4.oracle");
    for q in energy_corpus(seed, count) {
        let fast = energy2(&q[0], &q[1]).expect("same group") + u128::from(mutations.corrupt_energy);
        let slow = energy2_oracle(&q[0], &q[1]).expect("within guard");
        e2.record(
            fast == slow,
            || json!({ "a": set_json(&q[0]), "b": set_json(&q[1]), "fast": int(fast), "oracle": int(slow) }),
        );
        let fast = energy4(&q[0], &q[1], &q[2], &q[3]).expect("same group");
        let slow = energy4_oracle(&q[0], &q[1], &q[2], &q[3]).expect("within guard");
        e4.record(fast == slow, || json!({ "sets": sets_json(&q), "fast": int(fast), "oracle": int(slow) }));
    }
    e2.finish(report);
    e4.finish(report);
}

pub fn cauchy_schwarz_section(report: &mut Report, seed: u64, count: usize) {
    for sign in [Sign::Plus, Sign::Minus] {
        let name = if sign == Sign::Plus { "cauchy_schwarz.plus" } else { "cauchy_schwarz.minus" };
        let mut t = Tally::new(name);
        for q in energy_corpus(seed, count) {
            let (a, b) = (&q[0], &q[1]);
            let e = energy2(a, b).expect("same group");
            let s = sumset(a, b, sign).expect("nonempty").len() as u128;
            let bound = (a.len() as u128 * b.len() as u128).pow(2);
            t.record(
                e * s >= bound,
                || json!({ "a": set_json(a), "b": set_json(b), "energy": int(e), "sumset": int(s) }),
            );
        }
        t.finish(report);
    }
}

pub fn plunnecke_section(report: &mut Report, seed: u64, count: usize) {
    let mut rng = stream(seed, 2);
    let sets: Vec<GroupSet> = (0..count).map(|_| same_ambient_sets(&mut rng, 1, 2, 8).remove(0)).collect();
    for (n, m) in [(1usize, 1usize), (2, 1), (2, 2)] {
        let mut t = Tally::new(format!("plunnecke_ruzsa.{n}_{m}"));
        for a in &sets {
            let aa = sumset(a, a, Sign::Plus).expect("nonempty").len() as u128;
            let nm = iterated_sumset(a, n, m).expect("nonempty").len() as u128;
            let lhs = nm * (a.len() as u128).pow((n + m - 1) as u32);
            t.record(lhs <= aa.pow((n + m) as u32), || json!({ "a": set_json(a), "nA-mA": int(nm), "A+A": int(aa) }));
        }
        t.finish(report);
    }
}

pub fn chain_section(report: &mut Report, seed: u64, count: usize, max_len: usize) {
    let mut rng = stream(seed, 3);
    let mut t = Tally::new("partition_chain");
    for _ in 0..count {
        let a = same_ambient_sets(&mut rng, 1, 2, max_len).remove(0);
        let estar = estar_exact(&a, DEFAULT_ESTAR_CAP).expect("within cap").value;
        let e2 = et_exact(&a, &r(2, 1), DEFAULT_ET_CAP).expect("within cap").value;
        let e4 = et_exact(&a, &r(4, 1), DEFAULT_ET_CAP).expect("within cap").value;
        let d = doubling(&a).expect("nonempty");
        let ok = estar <= e2 && e2 <= e4 && e4 <= d;
        t.record(
            ok,
            || json!({ "a": set_json(&a), "estar": rat(&estar), "e2": rat(&e2), "e4": rat(&e4), "doubling": rat(&d) }),
        );
    }
    t.finish(report);
}

pub fn spot_values_section(report: &mut Report) {
    let mut spot = |name: &str, got: ExactRatio, want: ExactRatio| {
        report.output(name, rat(&got));
        report.check(Check::assert(name, got == want).with("value", got).with("expected", want));
    };
    spot("estar({0,1})", estar_exact(&GroupSet::integers([0, 1]), DEFAULT_ESTAR_CAP).expect("valid").value, r(1, 2));
    spot("estar({0,1,2})", estar_exact(&GroupSet::integers(0..3), DEFAULT_ESTAR_CAP).expect("valid").value, r(2, 3));
    spot("et({0,1},2)", et_exact(&GroupSet::integers([0, 1]), &r(2, 1), DEFAULT_ET_CAP).expect("valid").value, r(4, 3));
    for n in 1..=8i64 {
        spot(&format!("doubling([0,{n}))"), doubling(&GroupSet::integers(0..n)).expect("nonempty"), r(2 * n - 1, n));
    }
}

fn failing_names(checks: &[Check]) -> Value {
    checks.iter().filter(|c| c.failed()).map(|c| c.name.clone()).collect::<Vec<_>>().into()
}

pub fn schoen_section(report: &mut Report, seed: u64, count: usize) {
    let mut rng = stream(seed, 4);
    let mut t = Tally::new("schoen.bounds");
    for _ in 0..count {
        let ambient = pick_ambient(&mut rng);
        let a = random_set(&mut rng, ambient, 2, 12);
        let b = random_set(&mut rng, ambient, 1, a.len());
        let checks = schoen_cover(&a, &b).and_then(|res| res.certify(&a, &b)).expect("valid instance");
        t.record(
            all_pass(&checks),
            || json!({ "a": set_json(&a), "b": set_json(&b), "failed": failing_names(&checks) }),
        );
    }
    t.finish(report);
}

pub fn cover_section(report: &mut Report, seed: u64, count: usize) {
    let mut rng = stream(seed, 5);
    let mut t = Tally::new("cover.certificates");
    for _ in 0..count {
        let a = same_ambient_sets(&mut rng, 1, 2, 10).remove(0);
        let sub = random_subset(&mut rng, &a);
        let checks = ruzsa_cover(&a, &sub).and_then(|res| res.certify(&a, &sub)).expect("valid instance");
        t.record(
            all_pass(&checks),
            || json!({ "a": set_json(&a), "subset": set_json(&sub), "failed": failing_names(&checks) }),
        );
    }
    t.finish(report);
}

pub fn saturation_section(report: &mut Report, seed: u64, count: usize) {
    let mut rng = stream(seed, 6);
    let mut t = Tally::new("saturate.certificates");
    for _ in 0..count {
        let a = same_ambient_sets(&mut rng, 1, 2, 10).remove(0);
        let sub = random_subset(&mut rng, &a);
        let tt = random_t(&mut rng);
        let checks =
            translate_saturate(&a, &sub, &tt).and_then(|res| res.certify(&a, &sub, &tt)).expect("valid instance");
        t.record(
            all_pass(&checks),
            || json!({ "a": set_json(&a), "subset": set_json(&sub), "t": rat(&tt), "failed": failing_names(&checks) }),
        );
    }
    t.finish(report);
}

/// The `(3,2,8,6)` desk instance, and with `large` also `(3,3,8,54)`.
pub fn construction_section(report: &mut Report, large: bool) {
    let desk = run_construction(3, 2, 8, 6, ValidateOptions::default());
    if let Some(d) = &desk {
        let exact = d.estar.mode == Mode::Exact && d.estar.trials == (1 << 10) - 1;
        report.check(Check::assert("desk.size", d.size == 11).with("|A|", d.size));
        report.check(Check::assert("desk.a1_plus_a2", d.a1_plus_ak == 24).with("|A_1+A_2|", d.a1_plus_ak));
        report.check(Check::assert("desk.sumset", d.sumset_size == Some(27)).with("|A+A|", d.sumset_size.unwrap_or(0)));
        report.check(
            Check::assert("desk.doubling", d.doubling == Some(r(27, 11)))
                .with("D[A]", d.doubling.clone().unwrap_or_else(ExactRatio::zero)),
        );
        report.check(
            Check::assert("desk.estar_exact", exact)
                .with("E_*[A]", d.estar.value.clone())
                .with("bipartitions", d.estar.trials),
        );
        report.check(Check::assert("desk.validation", all_pass(&d.checks)));
        report.output("desk", construction_json(d));
    } else {
        report.check(Check::assert("desk.validation", false));
    }
    if large {
        let opts = ValidateOptions { sumset_cap: 4096, estar_cap: DEFAULT_ESTAR_CAP, heuristic_budget: 50, seed: 0 };
        let big = run_construction(3, 3, 8, 54, opts);
        if let Some(b) = &big {
            let bound = b.checks.iter().find(|c| c.name == "construct.sumset_lower_bound");
            report.check(Check::assert("large.size", b.size == 115).with("|A|", b.size));
            report.check(
                Check::assert(
                    "large.lower_bound",
                    b.lower_bound == 1728 && bound.is_some_and(|c| c.status == Status::Pass),
                )
                .with("|L_1|M^(k-1)", b.lower_bound),
            );
            report.check(
                Check::reported("large.estar")
                    .with("E_*[A] lower bound", b.estar.value.clone())
                    .with("restarts", b.estar.trials),
            );
            report.output("large", construction_json(b));
        } else {
            report.check(Check::assert("large.validation", false));
        }
    }
}

fn run_construction(
    p: u64,
    k: usize,
    m: u64,
    a: u64,
    opts: ValidateOptions,
) -> Option<addlab_core::construction::ConstructionReport> {
    let plan = plan_construction(p, k, m, a).ok()?;
    let built = build_counterexample(&plan).ok()?;
    validate_construction(&built, &opts).ok()
}

fn construction_json(c: &addlab_core::construction::ConstructionReport) -> Value {
    json!({
        "size": c.size,
        "part_sizes": c.part_sizes,
        "a1_plus_ak": c.a1_plus_ak,
        "lower_bound": int(c.lower_bound),
        "sumset_size": c.sumset_size,
        "doubling": c.doubling.as_ref().map(rat),
        "estar": rat(&c.estar.value),
        "estar_mode": c.estar.mode.as_str(),
    })
}

/// Runs `decompose` and `verify_decomposition` and tallies every condition by
/// family (`large`, `noncommunicating`, ...).
fn regularity_instance(tallies: &mut Vec<Tally>, a: &GroupSet, params: &RegularityParams) -> Value {
    let mut record = |family: &str, ok: bool, a: &GroupSet| {
        let idx = match tallies.iter().position(|t| t.name == format!("regularity.{family}")) {
            Some(i) => i,
            None => {
                tallies.push(Tally::new(format!("regularity.{family}")));
                tallies.len() - 1
            }
        };
        tallies[idx].record(ok, || json!({ "a": set_json(a) }));
    };
    let res = match decompose(a, params) {
        Ok(res) => res,
        Err(e) => {
            record("decompose", false, a);
            return json!({ "error": e.to_string() });
        }
    };
    record("decompose", true, a);
    match verify_decomposition(&res, a, params) {
        Ok(v) => {
            record("verify", true, a);
            for c in v.checks.iter().filter(|c| c.status != Status::Reported) {
                let family = c.name.split('.').next().unwrap_or(&c.name);
                record(family, c.status == Status::Pass, a);
            }
        }
        Err(_) => record("verify", false, a),
    }
    json!({
        "size": a.len(),
        "parts": res.parts.len(),
        "noise_parts": res.noise_parts.len(),
        "omega": res.omega_set.len(),
        "k": rat(&res.k),
        "objective": rat(&res.objective),
        "moves": res.moves.len(),
    })
}

pub fn regularity_section(report: &mut Report, seed: u64, count: usize, max_len: usize) {
    let params = RegularityParams::new(r(1, 4), r(1, 4)).expect("admissible");
    // every family is listed even when vacuous, e.g. (iii) with a single part
    let families = [
        "decompose",
        "verify",
        "trace_strictly_decreasing",
        "merge_stable",
        "large",
        "structured",
        "noncommunicating",
        "noise",
        "split_stable",
    ];
    let mut tallies: Vec<Tally> = families.iter().map(|f| Tally::new(format!("regularity.{f}"))).collect();
    let f3 = GroupSpec::prime_field(3, 2).expect("3 is prime");
    let h = GroupSet::from_rows(f3, (0..3).flat_map(|i| (0..3).map(move |j| [i, j]))).expect("valid rows");
    let blocks = GroupSet::integers([0, 1, 2, 100, 101, 102]);
    report.output("subgroup", regularity_instance(&mut tallies, &h, &params));
    report.output("two_blocks", regularity_instance(&mut tallies, &blocks, &params));
    let mut rng = stream(seed, 7);
    let mut random = Vec::new();
    for _ in 0..count {
        let a = same_ambient_sets(&mut rng, 1, 2, max_len).remove(0);
        random.push(regularity_instance(&mut tallies, &a, &params));
    }
    report.output("random", Value::Array(random));
    for t in tallies {
        t.finish(report);
    }
}

/// One numbered acceptance criterion (1 to 9).
pub fn criterion(n: u8, seed: u64) -> Report {
    let mut report = Report::new("acceptance");
    report.param("criterion", n);
    report.param("seed", seed);
    match n {
        1 => energy_oracle_section(&mut report, seed, 200, Mutations::default()),
        2 => cauchy_schwarz_section(&mut report, seed, 200),
        3 => plunnecke_section(&mut report, seed, 100),
        4 => chain_section(&mut report, seed, 50, 10),
        5 => spot_values_section(&mut report),
        6 => schoen_section(&mut report, seed, 100),
        7 => {
            cover_section(&mut report, seed, 100);
            saturation_section(&mut report, seed, 100);
        }
        8 => construction_section(&mut report, true),
        9 => regularity_section(&mut report, seed, 25, 16),
        _ => panic!("no acceptance criterion {n}"),
    }
    report
}

/// Every section with `trials` random instances each.
pub fn verify_suite(seed: u64, trials: usize, mutations: Mutations) -> Report {
    let mut report = Report::new("verify-suite");
    report.param("seed", seed);
    report.param("trials", trials);
    if mutations.corrupt_energy {
        report.param("corrupt_energy", true);
    }
    energy_oracle_section(&mut report, seed, trials, mutations);
    cauchy_schwarz_section(&mut report, seed, trials);
    plunnecke_section(&mut report, seed, trials);
    chain_section(&mut report, seed, trials, 8);
    spot_values_section(&mut report);
    schoen_section(&mut report, seed, trials);
    cover_section(&mut report, seed, trials);
    saturation_section(&mut report, seed, trials);
    construction_section(&mut report, false);
    regularity_section(&mut report, seed, trials, 12);
    report
}
