//! One line per acceptance criterion, parameters pinned here rather than
//! taken from experiment defaults. A criterion whose statistic misses its
//! tolerance prints FAIL and is listed in the closing tally; the process
//! exits nonzero only when a criterion cannot be evaluated at all.

use kpz_core::exact::toeplitz::toeplitz_cdf_table;
use kpz_core::exact::tracy_widom::{gue_cdf_nodes, moments, Ensemble};
use kpz_core::experiments::{run, ExperimentConfig, Relation, Report};
use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

type Outcome = Result<(bool, String), String>;

fn experiment(name: &str, params: &[(&str, &str)]) -> Result<Report, String> {
    let mut cfg = ExperimentConfig::new(name);
    for (k, v) in params {
        cfg.set(k, v);
    }
    run(&cfg).map_err(|e| e.to_string())
}

/// Fixed six decimals, switching to scientific notation for tiny or huge values.
fn num(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-3 || x.abs() >= 1e6) {
        format!("{x:.3e}")
    } else {
        format!("{x:.6}")
    }
}

/// Pass iff every check of every report passes; the detail lists them all.
fn checks(reports: &[Report]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for r in reports {
        for c in &r.summary.checks {
            ok &= c.pass;
            let rel = if c.relation == Relation::AtMost { "<=" } else { ">=" };
            parts.push(format!("{} {} {rel} {}", c.name, num(c.statistic), num(c.tolerance)));
        }
    }
    Ok((ok, parts.join("; ")))
}

fn a1() -> Outcome {
    checks(&[experiment("lln", &[("q", "0.25"), ("gamma", "1"), ("n", "2000"), ("replicas", "200"), ("tolerance", "0.02")])?])
}

/// `P(G ≤ x)` over an `m × n` block by a frontier recursion over sites in
/// row-major order. States whose frontier exceeds `cap` are dropped; the
/// frontier never decreases, so the result is exact for `x ≤ cap`.
fn frontier_cdf(m: usize, n: usize, q: f64, cap: u32) -> Vec<f64> {
    let mut states: HashMap<Vec<u32>, f64> = HashMap::from([(vec![0; n], 1.0)]);
    for _ in 0..m {
        for j in 0..n {
            let mut next: HashMap<Vec<u32>, f64> = HashMap::new();
            for (f, p) in states {
                let base = if j == 0 { f[0] } else { f[j].max(f[j - 1]) };
                if base > cap {
                    continue;
                }
                let mut pw = p * (1.0 - q);
                for w in 0..=cap - base {
                    let mut g = f.clone();
                    g[j] = base + w;
                    *next.entry(g).or_insert(0.0) += pw;
                    pw *= q;
                }
            }
            states = next;
        }
    }
    let mut pmf = vec![0.0; cap as usize + 1];
    for (f, p) in states {
        pmf[f[n - 1] as usize] += p;
    }
    pmf.iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

fn a2() -> Outcome {
    let mut worst = 0.0f64;
    for size in [2u32, 3] {
        for q in [0.1, 0.5] {
            let table = toeplitz_cdf_table(size, size, q, 80).map_err(|e| e.to_string())?;
            let cap = table.iter().position(|&v| v >= 0.999).ok_or("0.999 quantile beyond the table")?;
            let oracle = frontier_cdf(size as usize, size as usize, q, cap as u32);
            for x in 0..=cap {
                worst = worst.max((table[x] - oracle[x]).abs());
            }
        }
    }
    Ok((worst <= 1e-10, format!("max |toeplitz − enumeration| {worst:.3e} <= 1e-10")))
}

fn a3() -> Outcome {
    checks(&[experiment("exact-vs-mc", &[("q", "0.25"), ("m", "20"), ("n", "20"), ("samples", "10000"), ("alpha", "0.01")])?])
}

fn a4() -> Outcome {
    checks(&[experiment("gue-onepoint", &[("q", "0.25"), ("n", "1000"), ("replicas", "5000"), ("tolerance", "0.1")])?])
}

fn a5() -> Outcome {
    checks(&[experiment("flat-goe", &[("q", "0.25"), ("n", "1000"), ("replicas", "3000"), ("window", "3"), ("tolerance", "0.1")])?])
}

fn a6() -> Outcome {
    checks(&[experiment(
        "variational-check",
        &[("q", "0.25"), ("n", "1000"), ("replicas", "2000"), ("sigma", "0,1"), ("profile", "abs"), ("window", "3"), ("tolerance", "0.07")],
    )?])
}

fn a7() -> Outcome {
    checks(&[experiment("tasep-coupling", &[("q", "0.25"), ("kinds", "step,flat"), ("t", "6"), ("replicas", "100000"), ("z", "3")])?])
}

fn a8() -> Outcome {
    let run = |kind| {
        experiment(
            "png-gibbs",
            &[("q", "0.25"), ("n", "1"), ("kind", kind), ("draws", "100000"), ("tolerance", "0.01"), ("normalization-tolerance", "1e-10")],
        )
    };
    checks(&[run("site")?, run("line")?])
}

fn a9() -> Outcome {
    checks(&[experiment("png-vs-lpp", &[("q", "0.25"), ("n", "30"), ("samples", "2000"), ("window", "3"), ("tolerance", "0.05")])?])
}

fn a10() -> Outcome {
    checks(&[
        experiment("monotone-coupling", &[("q", "0.25"), ("z", "3")])?,
        experiment("midpoint-lemma", &[("q", "0.25"), ("tilted-length", "200"), ("tilted-min", "0.40")])?,
    ])
}

fn a11() -> Outcome {
    checks(&[experiment(
        "slow-decorr",
        &[
            ("q", "0.25"),
            ("n", "200,800"),
            ("alpha", "0.3333333333333333"),
            ("ell", "1"),
            ("window", "1"),
            ("delta", "0.3"),
            ("replicas", "500"),
            ("tolerance", "0.2"),
        ],
    )?])
}

fn a12() -> Outcome {
    checks(&[experiment(
        "tail-exponents",
        &[("q", "0.25"), ("gamma", "1"), ("n", "100"), ("x-lo", "2"), ("x-hi", "6"), ("lower-min", "2.5"), ("upper-min", "1.0")],
    )?])
}

/// Mean and standard deviation of F₂ from composite Simpson on `[−16, 10]`
/// with step 0.02 and 160 quadrature nodes in the determinant.
fn simpson_moments() -> (f64, f64) {
    let (a, b, steps) = (-16.0, 10.0, 1300);
    let h = (b - a) / steps as f64;
    let (mut i0, mut i1) = (0.0, 0.0);
    for k in 0..=steps {
        let x = a + k as f64 * h;
        let w = if k == 0 || k == steps { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        let f = gue_cdf_nodes(x, 160);
        i0 += w * f;
        i1 += w * x * f;
    }
    let (i0, i1) = (i0 * h / 3.0, i1 * h / 3.0);
    let mean = b - i0;
    (mean, (b * b - 2.0 * i1 - mean * mean).sqrt())
}

fn a13() -> Outcome {
    const PUBLISHED_MEAN: f64 = -1.7710868074;
    const PUBLISHED_VAR: f64 = 0.8131947928;
    let (mean, var) = moments(Ensemble::Gue, 80);
    let sd = var.sqrt();
    let (om, osd) = simpson_moments();
    let moment_err = [mean - om, sd - osd, mean - PUBLISHED_MEAN, sd - PUBLISHED_VAR.sqrt()]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));
    let doubling = (0..=48)
        .map(|i| -8.0 + 0.25 * i as f64)
        .map(|x| (gue_cdf_nodes(x, 80) - gue_cdf_nodes(x, 160)).abs())
        .fold(0.0f64, f64::max);
    Ok((
        moment_err <= 1e-4 && doubling <= 1e-8,
        format!(
            "mean {mean:.8} sd {sd:.8} oracle {om:.8} {osd:.8}; moment error {moment_err:.2e} <= 1e-4; node doubling {doubling:.2e} <= 1e-8"
        ),
    ))
}

fn a14() -> Outcome {
    checks(&[experiment(
        "inhomogeneous",
        &[("q", "0.25"), ("setting", "a"), ("drifts-low", "-1"), ("drifts-high", "1"), ("n", "500"), ("replicas", "500")],
    )?])
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, fn() -> Outcome); 14] = [
        ("A1", "law of large numbers", a1),
        ("A2", "Toeplitz CDF vs enumeration", a2),
        ("A3", "Toeplitz CDF vs Monte Carlo", a3),
        ("A4", "GUE one-point law", a4),
        ("A5", "flat data and GOE", a5),
        ("A6", "variational self-consistency", a6),
        ("A7", "TASEP and LPP coupling", a7),
        ("A8", "PNG Gibbs exactness", a8),
        ("A9", "PNG top line and LPP", a9),
        ("A10", "monotone coupling and midpoint", a10),
        ("A11", "slow decorrelation", a11),
        ("A12", "tail exponents", a12),
        ("A13", "Tracy-Widom numerics", a13),
        ("A14", "inhomogeneous monotonicity", a14),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with('A')).collect();
    let (mut failed, mut errors, mut ran) = (Vec::new(), 0, 0);
    for (id, title, f) in criteria {
        if !only.is_empty() && !only.iter().any(|o| o == id) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok((pass, detail)) => {
                println!("{} {id} {title}: {detail} ({secs:.1} s)", if pass { "PASS" } else { "FAIL" });
                if !pass {
                    failed.push(id);
                }
            }
            Err(e) => {
                println!("ERROR {id} {title}: {e} ({secs:.1} s)");
                errors += 1;
            }
        }
    }
    let passed = ran - failed.len() - errors;
    if failed.is_empty() {
        println!("acceptance: {passed} of {ran} criteria pass");
    } else {
        println!("acceptance: {passed} of {ran} criteria pass; failing: {}", failed.join(", "));
    }
    if errors > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
