//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! lines are always printed; exits nonzero if any criterion fails.

use std::process::{Command, Output};
use std::time::{Duration, Instant};

use zastava::patterns::Composition;
use zastava::suites::{
    dictionary_suite, highest_weight_suite, interpolation_suite, relations_suite, shapovalov_suite, sl2_suite,
    virasoro_suite, whittaker_suite, wl_suite, Suite, SuiteConfig, SuiteReport,
};
use zastava::virasoro::{agt_params, VirParams};
use zastava::scalar::Scalar;
use zastava::yangian::RelationId;

const SEED: u64 = 20240611;
const TRIALS: u32 = 3;

const PI_LIST: [&[u32]; 5] = [&[1, 1], &[1, 2], &[2, 2], &[1, 1, 1], &[1, 1, 2]];

fn cap_for(pi: &Composition) -> u32 {
    if pi.n() == 2 {
        4
    } else {
        3
    }
}

fn comp(parts: &[u32]) -> Composition {
    Composition::new(parts.to_vec()).unwrap()
}

/// Runs `suite` over the composition list; returns a failure note or `None`.
fn over_list(suite: fn(&SuiteConfig) -> zastava::Result<SuiteReport>) -> Option<String> {
    for parts in PI_LIST {
        let pi = comp(parts);
        let cfg = SuiteConfig::new(&pi, cap_for(&pi), SEED, TRIALS);
        match suite(&cfg) {
            Ok(r) if r.passed => {}
            Ok(r) => return Some(format!("pi {parts:?}: {}", r.detail)),
            Err(e) => return Some(format!("pi {parts:?}: {e}")),
        }
    }
    None
}

fn relations() -> Option<String> {
    if let Some(f) = over_list(relations_suite) {
        return Some(f);
    }
    // n = 4 is the first rank where (i) and (j) have instances.
    let pi = comp(&[1, 1, 1, 1]);
    let cfg = SuiteConfig::new(&pi, 3, SEED, 1);
    let r = relations_suite(&cfg).unwrap();
    if !r.passed {
        return Some(format!("pi (1,1,1,1): {}", r.detail));
    }
    let vacuous: Vec<_> = r.detail["relations"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|row| row["instances"] == 0)
        .map(|row| row["relation"].clone())
        .collect();
    (!vacuous.is_empty()).then(|| format!("vacuous at (1,1,1,1): {vacuous:?}"))
}

fn sl2() -> (Option<String>, String) {
    let pi = comp(&[1, 1]);
    let start = Instant::now();
    let r = sl2_suite(&SuiteConfig::new(&pi, 5, SEED, TRIALS)).unwrap();
    let took = start.elapsed();
    let note = format!("orientation {}", r.detail["matching_orientations"]);
    if !r.passed {
        return (Some(r.detail.to_string()), note);
    }
    if took > Duration::from_secs(10) {
        return (Some(format!("took {took:?}")), note);
    }
    (None, note)
}

fn wl() -> Option<String> {
    for parts in [&[2u32, 2][..], &[1, 1, 2]] {
        let r = wl_suite(&SuiteConfig::new(&comp(parts), 2, SEED, TRIALS)).unwrap();
        if !r.passed {
            return Some(format!("pi {parts:?}: {}", r.detail));
        }
    }
    None
}

fn virasoro() -> Option<String> {
    let start = Instant::now();
    let r = virasoro_suite(&SuiteConfig::new(&comp(&[1, 1]), 3, SEED, TRIALS)).unwrap();
    let took = start.elapsed();
    if !r.passed {
        return Some(r.detail.to_string());
    }
    (took > Duration::from_secs(30)).then(|| format!("took {took:?}"))
}

fn dictionary() -> Option<String> {
    let r = dictionary_suite(&SuiteConfig::new(&comp(&[1, 1]), 3, SEED, TRIALS)).unwrap();
    if !r.passed {
        return Some(r.detail.to_string());
    }
    let one = Scalar::one();
    let a = Scalar::new(-7, 3);
    let eps = Scalar::new(5, 2);
    let first = agt_params(&a, &one, &-one.clone()).unwrap() == VirParams { delta: &a * &a, c: one.clone() };
    let second = agt_params(&Scalar::zero(), &eps, &eps).unwrap() == VirParams { delta: one, c: Scalar::from_int(25) };
    (!(first && second)).then(|| "substitution examples".to_string())
}

fn zastava(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zastava"))
        .args(args)
        .env("ZASTAVA_THREADS", "2")
        .output()
        .expect("run zastava")
}

fn determinism() -> Option<String> {
    let runs: [&[&str]; 5] = [
        &["compute", "--pi", "1,1,2", "--cap", "3", "--seed", "7"],
        &["compute", "--pi", "1,2", "--cap", "3", "--seed", "7", "--format", "csv"],
        &["verify", "--pi", "1,2", "--cap", "2", "--seed", "5", "--checks", "relations,shapovalov,whittaker,sl2"],
        &["virasoro", "--delta", "3/8", "--c", "-2", "--cap", "3"],
        &["agt-dict", "--a", "2/3", "--eps1", "1", "--eps2", "-5", "--seed", "9"],
    ];
    for args in runs {
        let a = zastava(args);
        let b = zastava(args);
        if !a.status.success() || a.stdout.is_empty() {
            return Some(format!("{args:?} exited {:?}", a.status.code()));
        }
        if a.stdout != b.stdout || a.status.code() != b.status.code() {
            return Some(format!("{args:?} differs between runs"));
        }
    }
    let pi = "1,1,2";
    for suite in Suite::ALL {
        let name = suite.name();
        let out = zastava(&["verify", "--pi", pi, "--cap", "3", "--trials", "1", "--checks", name, "--mutate", name]);
        if out.status.code() != Some(1) {
            return Some(format!("suite {name} under mutation exited {:?}", out.status.code()));
        }
    }
    for rel in RelationId::ALL {
        let name = rel.name();
        let args = ["verify", "--pi", "1,1,1,1", "--cap", "3", "--trials", "1", "--checks", "relations", "--relations", name];
        let mut mutated = args.to_vec();
        mutated.extend(["--mutate", name]);
        if zastava(&args).status.code() != Some(0) {
            return Some(format!("relation {name} fails unmutated"));
        }
        let out = zastava(&mutated);
        if out.status.code() != Some(1) {
            return Some(format!("relation {name} under mutation exited {:?}", out.status.code()));
        }
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        if report["checks"][0]["detail"]["witness"].is_null() {
            return Some(format!("relation {name}: no witness"));
        }
    }
    None
}

fn main() {
    let mut failed = 0;
    let mut line = |n: u32, name: &str, result: Option<String>, note: &str| {
        let status = if result.is_none() { "PASS" } else { "FAIL" };
        let mut text = format!("criterion {n:>2} {name}: {status}");
        if !note.is_empty() {
            text.push_str(&format!(" ({note})"));
        }
        if let Some(why) = result {
            failed += 1;
            text.push_str(&format!(" -- {why}"));
        }
        println!("{text}");
    };
    let start = Instant::now();
    line(1, "relation suite", relations(), "");
    line(2, "Gelfand-Tsetlin diagonal", over_list(highest_weight_suite), "");
    line(3, "interpolation equivalence", over_list(interpolation_suite), "");
    line(4, "Shapovalov coherence", over_list(shapovalov_suite), "");
    line(5, "Whittaker solvability", over_list(whittaker_suite), "");
    let (res, note) = sl2();
    line(6, "sl2 oracle", res, &note);
    line(7, "W_L invariance", wl(), "");
    line(8, "Virasoro suite", virasoro(), "");
    line(9, "AGT dictionary", dictionary(), "");
    line(10, "determinism and mutation", determinism(), "");
    println!("acceptance: {} failed, {:.1?}", failed, start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
