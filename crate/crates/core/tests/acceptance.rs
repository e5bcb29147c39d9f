//! Acceptance run: one PASS/FAIL line per criterion.

mod support;

use std::process::Command;
use std::time::{Duration, Instant};

use ncagm::certify::{build_m2_certificate, eval_instance, farkas_check_detailed, sharp_pair, verify_sos};
use ncagm::cli::{cmd_table, rows_up_to, RunConfig, TableRow};
use ncagm::sdp::json::farkas_from_json;
use ncagm::sdp::Sign;
use ncagm::sos::{assemble_sdp, symmetry_reduce, MonomialBasis};
use support::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type Suite = (&'static str, Box<dyn Fn() -> Result<(), String>>);

/// Reference values `(m, n, λ₁, λ₂)`.
const TABLE: [(usize, usize, f64, f64); 10] = [
    (2, 2, 2.0, 0.5),
    (2, 3, 6.0, 1.5),
    (2, 4, 12.0, 3.0),
    (2, 5, 20.0, 5.0),
    (3, 3, 6.0, 3.4113),
    (3, 4, 24.0, 8.5367),
    (3, 5, 60.0, 17.3611),
    (4, 4, 24.0, 22.4746),
    (4, 5, 120.0, 80.2349),
    (5, 5, 120.0, 144.6488),
];

/// Reference `(λ₁, λ₂)`; rows with `m = 1` are `(n, 0)` since `0 ⪯ ΣAᵢ ⪯ nI`.
fn reference(m: usize, n: usize) -> Option<(f64, f64)> {
    if m == 1 {
        return Some((n as f64, 0.0));
    }
    TABLE
        .iter()
        .find(|r| r.0 == m && r.1 == n)
        .map(|r| (r.2, r.3))
}

fn lambdas(r: &TableRow) -> Result<(f64, f64), String> {
    match (r.lambda1, r.lambda2) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(format!("({},{}) {}", r.m, r.n, r.verdict)),
    }
}

fn config() -> RunConfig {
    RunConfig::default()
}

fn table_fast() -> Outcome {
    let start = Instant::now();
    let rows = rows_up_to(4);
    let table = cmd_table(&rows, &config(), 1e-6).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for r in &table {
        let (l1, l2) = lambdas(r)?;
        let (e1, e2) = reference(r.m, r.n).ok_or("missing reference row")?;
        let err = (l1 - e1).abs().max((l2 - e2).abs());
        worst = worst.max(err);
        if err > 1e-3 {
            return Err(format!("({},{}): λ₁ = {l1}, λ₂ = {l2}, expected {e1}, {e2}", r.m, r.n));
        }
        if r.verdict != "ok" {
            return Err(format!("({},{}) verdict {}", r.m, r.n, r.verdict));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(120) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{} rows, max abs error {worst:.2e}, {elapsed:.2?}", table.len()))
}

fn table_heavy() -> Outcome {
    let start = Instant::now();
    let rows = [(2, 5), (3, 5), (4, 5), (5, 5)];
    let table = cmd_table(&rows, &config(), 1e-6).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for r in &table {
        let (l1, l2) = lambdas(r)?;
        let (e1, e2) = reference(r.m, r.n).ok_or("missing reference row")?;
        let rel = ((l1 - e1) / e1).abs().max(((l2 - e2) / e2).abs());
        worst = worst.max(rel);
        if rel > 1e-2 {
            return Err(format!("({},{}): λ₁ = {l1}, λ₂ = {l2}, expected {e1}, {e2}", r.m, r.n));
        }
    }
    let last = table.last().expect("four rows");
    let l2 = last.lambda2.unwrap_or(f64::NAN);
    if !(144.5..=144.8).contains(&l2) || l2 <= 120.0 || last.verdict != "VIOLATION" {
        return Err(format!("λ₂(5,5) = {l2}, verdict {}", last.verdict));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(1800) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("λ₂(5,5) = {l2:.6} > 120, max rel error {worst:.2e}, {elapsed:.2?}"))
}

fn farkas_via_cli(m: usize, n: usize, lambda: f64, dir: &std::path::Path) -> Outcome {
    let out = dir.join(format!("farkas_{m}_{n}.json"));
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_ncagm"))
        .args(["certify", "farkas", "--m", &m.to_string(), "--n", &n.to_string()])
        .args(["--lambda", &lambda.to_string(), "--out"])
        .arg(&out)
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if !status.status.success() {
        return Err(format!(
            "exit {:?}: {}",
            status.status.code(),
            String::from_utf8_lossy(&status.stdout).trim()
        ));
    }
    let text = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let (fm, fn_, sign, cert) = farkas_from_json(&v).map_err(|e| e.to_string())?;
    if (fm, fn_, sign) != (m, n, Sign::Plus) || cert.lambda_target != lambda {
        return Err("certificate header does not match the request".into());
    }
    // independent re-check on freshly assembled data
    let problem = assemble_sdp(m, n, Sign::Plus).map_err(|e| e.to_string())?;
    let check = farkas_check_detailed(&problem, &cert, 1e-6).map_err(|e| e.to_string())?;
    if !(check.margin > 0.0 && check.psd_defect <= 1e-6 * check.scale) {
        return Err(format!("margin {}, defect {}, scale {}", check.margin, check.psd_defect, check.scale));
    }
    Ok(format!(
        "({m},{n}) λ = {lambda}: margin {:.4e}, defect {:.1e} <= {:.1e}, {elapsed:.2?}",
        check.margin,
        check.psd_defect,
        1e-6 * check.scale
    ))
}

fn farkas() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let big = farkas_via_cli(5, 5, 120.0, dir.path())?;
    let start = Instant::now();
    let small = farkas_via_cli(2, 2, 0.4, dir.path())?;
    if start.elapsed() > Duration::from_secs(5) {
        return Err(format!("(2,2) took {:?}", start.elapsed()));
    }
    Ok(format!("{big}; {small}"))
}

fn sos_m2() -> Outcome {
    let start = Instant::now();
    for n in 2..=20 {
        let c = build_m2_certificate(n).map_err(|e| e.to_string())?;
        if !verify_sos(&c).map_err(|e| e.to_string())? {
            return Err(format!("n = {n} does not verify"));
        }
        if c.lambda != num_rational::BigRational::new((n * (n - 1)).into(), 4.into()) {
            return Err(format!("n = {n}: λ = {}", c.lambda));
        }
    }
    Ok(format!("n = 2..20 verified exactly, {:.2?}", start.elapsed()))
}

fn structure() -> Outcome {
    let basis = MonomialBasis::new(5, 2).map_err(|e| e.to_string())?;
    let mut facts = vec![("basis(5,2)", basis.len(), 31)];
    for sign in [Sign::Plus, Sign::Minus] {
        let p = assemble_sdp(5, 5, sign).map_err(|e| e.to_string())?;
        facts.push(("constraints", p.num_constraints(), 3906));
        facts.push(("scalar unknowns", p.scalar_unknowns(), 5767));
        facts.push(("total dimension", p.total_dim(), 187));
    }
    let p = assemble_sdp(2, 3, Sign::Plus).map_err(|e| e.to_string())?;
    let r = symmetry_reduce(&p).map_err(|e| e.to_string())?;
    facts.push(("free variables (2,3)", r.orbits.num_free_variables(), 11));
    for (what, got, want) in &facts {
        if got != want {
            return Err(format!("{what}: {got} != {want}"));
        }
    }
    Ok("31 / 3906 / 5767 / 187 / 11".into())
}

fn sharp() -> Outcome {
    let r = eval_instance(&sharp_pair(), 2, 1e-9).map_err(|e| e.to_string())?;
    if (r.min_eig + 0.5).abs() > 1e-9 {
        return Err(format!("min_eig = {}", r.min_eig));
    }
    if !r.violations.is_empty() || !r.feasible() || r.improved_lower != Some(-0.5) {
        return Err(format!("{r:?}"));
    }
    Ok(format!("min_eig = {:.12}, no violations", r.min_eig))
}

fn properties() -> Outcome {
    let suites: Vec<Suite> = vec![
        ("free algebra", Box::new(|| run_cases(algebra_case(), check_algebra_laws))),
        ("distinct counts", Box::new(|| run_cases(degree_pair(6), check_distinct_counts))),
        ("norm inequalities", Box::new(|| run_cases(pair_case(), check_norm_inequalities))),
        ("LP oracle", Box::new(|| run_cases(lp_case(), check_lp_oracle))),
        ("SDPA round trip", Box::new(|| run_cases(random_problem(), check_sdpa_round_trip))),
    ];
    for (name, run) in &suites {
        run().map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{} suites x {CASES} cases, zero failures", suites.len()))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("lambda table, m <= n <= 4", table_fast),
        ("lambda table, n = 5", table_heavy),
        ("Farkas refutation", farkas),
        ("exact m = 2 certificates", sos_m2),
        ("structural counts", structure),
        ("sharp instance", sharp),
        ("property suites", properties),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {} ({name}): PASS  {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL  {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
