//! Acceptance criteria, one line each.
//!
//! Runs `pnlab verify --quick` twice with the same seed, once on one thread
//! and once on two, the second with `--compare` against the first. Criteria
//! 1 to 7 are read from the second run's summary; criterion 8 is the byte
//! comparison of the two runs' CSVs.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

use pnlab_core::verify::CRITERIA;

fn verify(threads: usize, out: &Path, compare: Option<&Path>) -> i32 {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pnlab"));
    cmd.env("RAYON_NUM_THREADS", threads.to_string())
        .args(["verify", "--quick", "--seed", "2", "--out"])
        .arg(out);
    if let Some(reference) = compare {
        cmd.arg("--compare").arg(reference);
    }
    let o = cmd.output().unwrap();
    print!("{}", String::from_utf8_lossy(&o.stdout));
    eprint!("{}", String::from_utf8_lossy(&o.stderr));
    o.status.code().unwrap_or(-1)
}

#[test]
fn acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    let c1 = verify(1, &first, None);
    let c2 = verify(2, &second, Some(&first));
    assert!(c1 == 0 || c1 == 2, "first run did not complete (exit {c1})");
    assert!(c2 == 0 || c2 == 2, "second run did not complete (exit {c2})");

    let summary = std::fs::read_to_string(second.join("summary.txt")).unwrap();
    let mut by_criterion: BTreeMap<u8, Vec<(&str, bool, &str)>> = BTreeMap::new();
    for line in summary.lines() {
        let fields: Vec<&str> = line.split(' ').collect();
        let id: u8 = fields[0][1..].split('.').next().unwrap().parse().unwrap();
        by_criterion
            .entry(id)
            .or_default()
            .push((fields[0], fields[1] == "PASS", line));
    }

    println!();
    let titles = CRITERIA.iter().map(|c| (c.0, c.1)).chain([(8, "determinism")]);
    let mut all = true;
    for (id, title) in titles {
        let checks = by_criterion.get(&id).map(Vec::as_slice).unwrap_or(&[]);
        let passed = !checks.is_empty() && checks.iter().all(|c| c.1);
        all &= passed;
        let runtime = checks
            .iter()
            .find(|c| c.0.ends_with("runtime_s"))
            .map(|c| format!(", runtime {} s", c.2.split(' ').nth(2).unwrap()))
            .unwrap_or_default();
        println!(
            "criterion {id} {title}: {} ({}/{} checks{runtime})",
            if passed { "PASS" } else { "FAIL" },
            checks.iter().filter(|c| c.1).count(),
            checks.len()
        );
        for c in checks.iter().filter(|c| !c.1) {
            println!("    {}", c.2);
        }
    }
    assert!(all, "acceptance criteria failed");
    assert_eq!(c2, 0);
}
