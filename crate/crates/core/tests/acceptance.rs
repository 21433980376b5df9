// SPDX-License-Identifier: Apache-2.0

//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
//! if any criterion fails.

use std::collections::BTreeMap;
use std::process::Command;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;
use vertexion::lattice::{domain_wall_z, wavefunction_triangular};
use vertexion::scalar::{random_distinct, random_scalar};
use vertexion::symfun::lambda_to_x;
use vertexion::verify::{
    verify_ordinary_formula_with, verify_ordinary_properties_with, verify_triangular_formula_with,
    verify_triangular_properties_with, CheckReport, Fault, SweepSpec,
};
use vertexion::{KParams, Partition, RParams, Scalar, SpinConfig, TriangularModel};

type Key = (String, usize, usize, Vec<usize>);

struct Reports(BTreeMap<Key, CheckReport>);

impl Reports {
    fn new(list: Vec<CheckReport>) -> Self {
        Reports(list.into_iter().map(|r| ((r.check_id.clone(), r.sites, r.rows, r.x.clone()), r)).collect())
    }

    /// Problems with `check_id` at `(N, n, x)`: missing, failed, or fewer than `trials` trials.
    fn expect(&self, check_id: &str, rows: usize, x: &SpinConfig, trials: usize, problems: &mut Vec<String>) {
        let key = (check_id.to_owned(), x.sites(), rows, x.positions().to_vec());
        match self.0.get(&key) {
            None => problems.push(format!("{check_id} N={} n={rows} x={:?} missing", x.sites(), x.positions())),
            Some(r) if !r.passed => problems.push(format!(
                "{check_id} N={} n={rows} x={:?} failed: {:?}",
                x.sites(),
                x.positions(),
                r.witness
            )),
            Some(r) if r.trials < trials => problems.push(format!(
                "{check_id} N={} n={rows} x={:?} ran {} of {trials} trials",
                x.sites(),
                x.positions(),
                r.trials
            )),
            Some(_) => {}
        }
    }
}

fn configs(sites: usize, down: impl IntoIterator<Item = usize>) -> Vec<SpinConfig> {
    down.into_iter().flat_map(|m| SpinConfig::all(sites, m)).collect()
}

/// Weakly decreasing `n`-tuples with parts at most `width`, built without
/// going through spin configurations.
fn partitions(n: usize, width: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..=width {
        for mut rest in partitions(n - 1, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn verify_run(dir: &TempDir, name: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_vertexion"))
        .args(["verify", "--out", name])
        .current_dir(dir.path())
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("verify exited with {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    std::fs::read(dir.path().join(name)).map_err(|e| e.to_string())
}

fn algebraic(reports: &Reports) -> Vec<String> {
    let mut problems = Vec::new();
    for id in ["weights.yang-baxter", "weights.reflection", "weights.rll"] {
        match reports.0.values().find(|r| r.check_id == id) {
            Some(r) if r.passed && r.trials >= 100 => {}
            Some(r) => problems.push(format!("{id}: passed={} trials={}", r.passed, r.trials)),
            None => problems.push(format!("{id} missing")),
        }
    }
    problems
}

fn triangular_cells() -> Vec<(usize, SpinConfig)> {
    let mut cells = Vec::new();
    for sites in 1..=4 {
        for rows in 1..=4 {
            for x in configs(sites, 0..=rows.min(sites)) {
                cells.push((rows, x));
            }
        }
    }
    cells
}

fn ordinary_cells() -> Vec<(usize, SpinConfig)> {
    let mut cells = Vec::new();
    for sites in 1..=5 {
        for rows in 1..=3.min(sites) {
            for x in SpinConfig::all(sites, rows) {
                cells.push((rows, x));
            }
        }
    }
    cells
}

fn triangular_formula(reports: &Reports) -> Vec<String> {
    let mut problems = Vec::new();
    for (rows, x) in triangular_cells() {
        reports.expect("triangular.formula", rows, &x, 5, &mut problems);
    }
    problems
}

fn triangular_properties(reports: &Reports) -> Vec<String> {
    let mut problems = Vec::new();
    for (rows, x) in triangular_cells() {
        reports.expect("triangular.degree", rows, &x, 5, &mut problems);
        reports.expect("triangular.symmetry", rows, &x, 5, &mut problems);
        if x.last() == Some(x.sites()) {
            reports.expect("triangular.recursion", rows, &x, 5, &mut problems);
        } else {
            reports.expect("triangular.factorization", rows, &x, 5, &mut problems);
        }
    }
    for rows in 1..=4 {
        reports.expect("triangular.initial-single-down", rows, &SpinConfig::packed(1), 5, &mut problems);
        reports.expect("triangular.initial-no-down", rows, &SpinConfig::empty(1), 5, &mut problems);
    }
    problems
}

fn ordinary_formula(reports: &Reports) -> Vec<String> {
    let mut problems = Vec::new();
    for (rows, x) in ordinary_cells() {
        reports.expect("ordinary.rll-gate", rows, &x, 5, &mut problems);
        reports.expect("ordinary.formula", rows, &x, 5, &mut problems);
        reports.expect("ordinary.b-commute", rows, &x, 5, &mut problems);
    }
    problems
}

fn ordinary_properties(reports: &Reports) -> Vec<String> {
    let mut problems = Vec::new();
    for (rows, x) in ordinary_cells() {
        reports.expect("ordinary.degree", rows, &x, 5, &mut problems);
        reports.expect("ordinary.symmetry", rows, &x, 5, &mut problems);
        if x.last() == Some(x.sites()) {
            reports.expect("ordinary.recursion", rows, &x, 5, &mut problems);
        } else {
            reports.expect("ordinary.factorization", rows, &x, 5, &mut problems);
        }
    }
    reports.expect("ordinary.initial", 1, &SpinConfig::packed(1), 5, &mut problems);
    problems
}

fn grothendieck(reports: &Reports) -> Vec<String> {
    let mut problems = Vec::new();
    for rows in 1..=3 {
        for sites in rows..=5 {
            for parts in partitions(rows, sites - rows) {
                match Partition::new(parts.clone(), sites) {
                    Ok(lambda) => {
                        let x = lambda_to_x(&lambda);
                        reports.expect("grothendieck.correspondence", rows, &x, 3, &mut problems);
                    }
                    Err(e) => problems.push(format!("partition {parts:?} in frame rejected: {e}")),
                }
            }
        }
    }
    problems
}

fn domain_wall(reports: &Reports) -> Vec<String> {
    let mut problems = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let avoid = [Scalar::zero(), Scalar::one(), Scalar::from_int(-1)];
    for m in 1..=4 {
        for rows in m..=4 {
            let x = SpinConfig::packed(m);
            reports.expect("triangular.domain-wall", rows, &x, 5, &mut problems);
            for _ in 0..5 {
                let t = random_scalar(&mut rng, &avoid).unwrap();
                let k = KParams::new(random_scalar(&mut rng, &[]).unwrap(), random_scalar(&mut rng, &[]).unwrap());
                let u = random_distinct(&mut rng, rows, &avoid).unwrap();
                let w = random_distinct(&mut rng, m, &[]).unwrap();
                let model = TriangularModel::new(RParams::new(t), k, u, w).unwrap();
                let (z, amp) = (domain_wall_z(&model).unwrap(), wavefunction_triangular(&model, &x).unwrap());
                if z != amp {
                    problems.push(format!("N=m={m} n={rows}: Z={z} W={amp}"));
                }
            }
        }
    }
    problems
}

/// Problems unless `reports` contain a failure among `targets`, each carrying a witness.
fn fails_with_witness(label: &str, reports: &[CheckReport], targets: &[&str]) -> Vec<String> {
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed).collect();
    let mut problems = Vec::new();
    if !failed.iter().any(|r| targets.contains(&r.check_id.as_str())) {
        problems.push(format!("{label}: no failure among {targets:?}"));
    }
    if let Some(r) = failed.iter().find(|r| r.witness.is_none()) {
        problems.push(format!("{label}: {} failed without a witness", r.check_id));
    }
    problems
}

fn negative_controls() -> Vec<String> {
    let tri = SweepSpec::triangular_default(7);
    let ord = SweepSpec::ordinary_default(7);
    let mut problems = Vec::new();
    match verify_triangular_properties_with(&tri, Fault::NonTriangularK) {
        Ok(r) => problems.extend(fails_with_witness("non-triangular K", &r, &["triangular.symmetry"])),
        Err(e) => problems.push(e.to_string()),
    }
    match verify_triangular_formula_with(&tri, Fault::DropFactorialPrefactor) {
        Ok(r) => problems.extend(fails_with_witness("dropped factorial", &r, &["triangular.formula"])),
        Err(e) => problems.push(e.to_string()),
    }
    for (label, run) in [
        ("unconstrained sites, properties", verify_ordinary_properties_with as fn(_, _) -> _),
        ("unconstrained sites, formula", verify_ordinary_formula_with),
    ] {
        match run(&ord, Fault::UnconstrainedSites) {
            Ok(r) => problems.extend(fails_with_witness(label, &r, &["ordinary.rll-gate"])),
            Err(e) => problems.push(e.to_string()),
        }
    }
    problems
}

fn main() {
    let dir = TempDir::new().expect("temporary directory");
    let runs = verify_run(&dir, "first.json").and_then(|a| Ok((a, verify_run(&dir, "second.json")?)));
    let mut results: Vec<(&str, Vec<String>)> = Vec::new();
    match &runs {
        Ok((first, second)) => {
            let parsed: Result<Vec<CheckReport>, _> = serde_json::from_slice(first);
            match parsed {
                Ok(list) => {
                    let reports = Reports::new(list);
                    results.push(("algebraic relations at 100 points", algebraic(&reports)));
                    results.push(("triangular lattice equals formula", triangular_formula(&reports)));
                    results.push(("triangular degree, symmetry, recursion, initial values", triangular_properties(&reports)));
                    results.push(("B-operator states equal formula, B commute", ordinary_formula(&reports)));
                    results.push(("B-operator degree, symmetry, recursion, initial value", ordinary_properties(&reports)));
                    results.push(("Grothendieck correspondence at t = 0", grothendieck(&reports)));
                    results.push(("domain-wall case of the triangular wavefunction", domain_wall(&reports)));
                }
                Err(e) => {
                    for label in ["1", "2", "3", "4", "5", "6", "7"] {
                        results.push((label, vec![format!("report does not parse: {e}")]));
                    }
                }
            }
            let identical = if first == second { Vec::new() } else { vec!["reports differ".to_owned()] };
            results.push(("byte-identical reports for one seed", identical));
        }
        Err(e) => {
            for label in ["1", "2", "3", "4", "5", "6", "7", "8"] {
                results.push((label, vec![e.clone()]));
            }
        }
    }
    results.push(("negative controls fail with witnesses", negative_controls()));

    let mut failures = 0;
    for (i, (label, problems)) in results.iter().enumerate() {
        let status = if problems.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {}: {status} {label}", i + 1);
        for p in problems.iter().take(5) {
            println!("    {p}");
        }
        if problems.len() > 5 {
            println!("    ... {} more", problems.len() - 5);
        }
        failures += usize::from(!problems.is_empty());
    }
    println!("acceptance: {} of {} criteria passed", results.len() - failures, results.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
