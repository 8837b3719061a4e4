//! One line per acceptance criterion; exits nonzero if any line fails.

use std::time::{Duration, Instant};

use addlab::suite::{criterion, ACCEPTANCE_SEED};
use addlab::with_threads;

const TITLES: [&str; 9] = [
    "energy oracle equivalence (200 pairs)",
    "Cauchy-Schwarz, both signs (200 pairs)",
    "Plunnecke-Ruzsa, (n,m) in {(1,1),(2,1),(2,2)} (100 sets)",
    "chain E_* <= E_2 <= E_4 <= D (50 sets)",
    "closed-form spot values",
    "Schoen peeling bounds (100 instances)",
    "covering and saturation certificates (100 + 100 instances)",
    "construction instances (3,2,8,6) and (3,3,8,54)",
    "regularity decomposition (subgroup, two blocks, 25 random sets)",
];

fn runtime_limit(n: u8) -> Option<Duration> {
    match n {
        1 => Some(Duration::from_secs(10)),
        6 => Some(Duration::from_secs(30)),
        8 => Some(Duration::from_secs(60)),
        9 => Some(Duration::from_secs(300)),
        _ => None,
    }
}

fn main() {
    let mut all_ok = true;
    let mut identical = true;
    let mut differing = Vec::new();
    for n in 1..=9u8 {
        let start = Instant::now();
        let serial = with_threads(1, || criterion(n, ACCEPTANCE_SEED));
        let elapsed = start.elapsed();
        let parallel = with_threads(8, || criterion(n, ACCEPTANCE_SEED));
        if serial.render() != parallel.render() {
            identical = false;
            differing.push(n);
        }
        let failed: Vec<&str> = serial.checks.iter().filter(|c| c.failed()).map(|c| c.name.as_str()).collect();
        let in_time = runtime_limit(n).is_none_or(|limit| elapsed < limit);
        let ok = failed.is_empty() && in_time;
        all_ok &= ok;
        let limit = runtime_limit(n).map_or(String::new(), |l| format!(" < {} s", l.as_secs()));
        println!(
            "criterion {n:>2} {}: {} ({} checks, {:.2} s{limit}){}",
            TITLES[n as usize - 1],
            if ok { "PASS" } else { "FAIL" },
            serial.checks.len(),
            elapsed.as_secs_f64(),
            if failed.is_empty() { String::new() } else { format!(" failing: {}", failed.join(", ")) },
        );
    }
    println!(
        "criterion 10 byte-identical reports with 1 and 8 threads: {}{}",
        if identical { "PASS" } else { "FAIL" },
        if identical { String::new() } else { format!(" (criteria {differing:?} differ)") },
    );
    if !(all_ok && identical) {
        std::process::exit(1);
    }
}
