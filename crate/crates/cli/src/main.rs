//! Command-line front end: parses model files, runs their checks, derives
//! auxiliary tensors, generates random instances, and spot-samples
//! symbolic defects at rational points.
//!
//! Exit codes: 0 when no check ends in FAIL or ERROR, 1 when one does,
//! 2 on parse or usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num::BigRational;

use algebroid_core::checks::{run_checks, sample_checks, Report};
use algebroid_core::generator::{random_instance, GenParams, Kind};
use algebroid_core::jacobi::JacobiContext;
use algebroid_core::model::{parse_model, print_model, scalar_string, Model, TensorValue};
use algebroid_core::riemann::{levi_civita, Metric};
use algebroid_core::structures::make_cosymplectic;

#[derive(Parser)]
#[command(name = "algd", about = "Exact checks for algebroid structures", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run all checks declared in a model file.
    Check {
        file: PathBuf,
        /// Emit the report as JSON instead of one line per check.
        #[arg(long)]
        json: bool,
    },
    /// Print the bracket classification of a named algebroid.
    Classify { file: PathBuf, name: String },
    /// Print a derived object, e.g. `reeb(omega, eta)`, `d(eta)`,
    /// `gamma(g)`, `lambda(pi, xi, g)` or `defects(pi, xi)`.
    Derive { file: PathBuf, expr: String },
    /// Generate random instances and run their checks.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// skew, lie-algebra, tangent-like, cosymplectic-data or lcs-data.
        #[arg(long, default_value = "skew")]
        kind: String,
        #[arg(long, default_value_t = 10)]
        count: u64,
        #[arg(long, default_value_t = 3)]
        rank: usize,
        #[arg(long = "chart-dim", default_value_t = 1)]
        chart_dim: usize,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        /// Print each generated model before its verdicts.
        #[arg(long)]
        dump: bool,
    },
    /// Evaluate the defects behind each check at rational chart points.
    Sample {
        file: PathBuf,
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[arg(long)]
        json: bool,
    },
}

fn load_model(file: &PathBuf) -> Result<Model, String> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| format!("cannot read {}: {}", file.display(), e))?;
    parse_model(&text).map_err(|e| e.to_string())
}

fn report_exit(report: &Report) -> ExitCode {
    if report.has_failures() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_check(file: &PathBuf, json: bool) -> Result<ExitCode, String> {
    let model = load_model(file)?;
    let report = run_checks(&model);
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        print!("{}", report.render_text());
    }
    Ok(report_exit(&report))
}

fn cmd_classify(file: &PathBuf, name: &str) -> Result<ExitCode, String> {
    let model = load_model(file)?;
    let a = model.algebroid(name).map_err(|e| e.to_string())?;
    let d = a.algebroid.classify_detailed();
    println!("{:?}", d.class);
    if d.jacobiators_vanish && !d.anchor_defects_vanish {
        println!("note: brackets close but the anchor is not a morphism");
    }
    Ok(ExitCode::SUCCESS)
}

/// `name(arg, arg, ...)` with plain identifier arguments.
fn split_call(expr: &str) -> Option<(&str, Vec<&str>)> {
    let open = expr.find('(')?;
    let close = expr.rfind(')')?;
    if close != expr.len() - 1 {
        return None;
    }
    let name = expr[..open].trim();
    let inner = &expr[open + 1..close];
    let args: Vec<&str> = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(str::trim).collect()
    };
    Some((name, args))
}

fn named_form(model: &Model, name: &str, degree: usize) -> Result<algebroid_core::algebroid::Tensor, String> {
    match &model.tensor(name).map_err(|e| e.to_string())?.value {
        TensorValue::Form(t) if t.degree() == degree => Ok(t.clone()),
        _ => Err(format!("{} is not a form of degree {}", name, degree)),
    }
}

fn named_vec(model: &Model, name: &str, form: bool) -> Result<Vec<algebroid_core::coeff::Scalar>, String> {
    let t = &model.tensor(name).map_err(|e| e.to_string())?.value;
    let tensor = match (t, form) {
        (TensorValue::Form(t), true) | (TensorValue::Multivector(t), false) if t.degree() == 1 => t,
        _ => {
            return Err(format!(
                "{} is not a degree-1 {}",
                name,
                if form { "form" } else { "multivector" }
            ))
        }
    };
    Ok((0..tensor.rank()).map(|i| tensor.component(&[i])).collect())
}

fn base_of<'m>(model: &'m Model, tensor: &str) -> Result<&'m algebroid_core::model::NamedAlgebroid, String> {
    let t = model.tensor(tensor).map_err(|e| e.to_string())?;
    model.algebroid(&t.base).map_err(|e| e.to_string())
}

fn print_section(label: &str, s: &[algebroid_core::coeff::Scalar], frame: &[String], coords: &[String]) {
    let terms: Vec<String> = s
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| format!("({})*{}", scalar_string(v, coords), frame[i]))
        .collect();
    let body = if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    };
    println!("{} = {}", label, body);
}

fn cmd_derive(file: &PathBuf, expr: &str) -> Result<ExitCode, String> {
    let model = load_model(file)?;
    let (name, args) = split_call(expr).ok_or_else(|| format!("cannot parse '{}'", expr))?;
    match (name, args.as_slice()) {
        ("reeb", [omega, eta]) => {
            let a = base_of(&model, omega)?;
            let om = named_form(&model, omega, 2)?;
            let et = named_vec(&model, eta, true)?;
            let pair = make_cosymplectic(&a.algebroid, &om, &et).map_err(|e| e.to_string())?;
            print_section("reeb", pair.reeb(), &a.frame, &a.coords);
        }
        ("d", [t]) => {
            let a = base_of(&model, t)?;
            let form = match &model.tensor(t).map_err(|e| e.to_string())?.value {
                TensorValue::Form(f) => f.clone(),
                _ => return Err(format!("{} is not a form", t)),
            };
            let d = a.algebroid.d_rho(&form);
            let mut m = Model::default();
            m.algebroids.push(a.clone());
            m.tensors.push(algebroid_core::model::NamedTensor {
                name: format!("d_{}", t),
                base: a.name.clone(),
                value: TensorValue::Form(d),
            });
            print!("{}", print_model(&m));
        }
        ("gamma", [g]) => {
            let a = base_of(&model, g)?;
            let metric = match &model.tensor(g).map_err(|e| e.to_string())?.value {
                TensorValue::Metric(m) => {
                    Metric::new(a.algebroid.clone(), m.clone(), true).map_err(|e| e.to_string())?
                }
                _ => return Err(format!("{} is not a metric", g)),
            };
            let conn = levi_civita(&a.algebroid, &metric);
            for i in 0..a.algebroid.rank() {
                for j in 0..a.algebroid.rank() {
                    print_section(
                        &format!("gamma[{},{}]", i + 1, j + 1),
                        conn.gamma(i, j),
                        &a.frame,
                        &a.coords,
                    );
                }
            }
        }
        ("lambda", [pi, xi, g]) => {
            let a = base_of(&model, pi)?;
            let pit = match &model.tensor(pi).map_err(|e| e.to_string())?.value {
                TensorValue::Multivector(t) if t.degree() == 2 => t.clone(),
                _ => return Err(format!("{} is not a bivector", pi)),
            };
            let xiv = named_vec(&model, xi, false)?;
            let metric = match &model.tensor(g).map_err(|e| e.to_string())?.value {
                TensorValue::Metric(m) => {
                    Metric::new(a.algebroid.clone(), m.clone(), true).map_err(|e| e.to_string())?
                }
                _ => return Err(format!("{} is not a metric", g)),
            };
            let mut ctx = JacobiContext::new(a.algebroid.clone(), pit, xiv)
                .map_err(|e| e.to_string())?;
            let lambda = ctx.lambda_from_metric(&metric);
            let conames: Vec<String> = (1..=a.frame.len()).map(|i| format!("e^{}", i)).collect();
            print_section("lambda", &lambda, &conames, &a.coords);
        }
        ("defects", [pi, xi]) => {
            let a = base_of(&model, pi)?;
            let pit = match &model.tensor(pi).map_err(|e| e.to_string())?.value {
                TensorValue::Multivector(t) if t.degree() == 2 => t.clone(),
                _ => return Err(format!("{} is not a bivector", pi)),
            };
            let xiv = named_vec(&model, xi, false)?;
            let ctx = JacobiContext::new(a.algebroid.clone(), pit, xiv)
                .map_err(|e| e.to_string())?;
            let (d1, d2) = ctx.jacobi_defects();
            let mut m = Model::default();
            m.algebroids.push(a.clone());
            m.tensors.push(algebroid_core::model::NamedTensor {
                name: "bracket_defect".into(),
                base: a.name.clone(),
                value: TensorValue::Multivector(d1),
            });
            m.tensors.push(algebroid_core::model::NamedTensor {
                name: "invariance_defect".into(),
                base: a.name.clone(),
                value: TensorValue::Multivector(d2),
            });
            print!("{}", print_model(&m));
        }
        _ => return Err(format!("unknown derivation '{}'", expr)),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_fuzz(
    seed: u64,
    kind: &str,
    count: u64,
    rank: usize,
    chart_dim: usize,
    degree: usize,
    dump: bool,
) -> Result<ExitCode, String> {
    let kind: Kind = kind.parse().map_err(|e: algebroid_core::Error| e.to_string())?;
    let params = GenParams {
        rank,
        chart_dim,
        max_degree: degree,
        kind,
    };
    let mut failures = 0u64;
    for i in 0..count {
        let model = random_instance(seed + i, &params).map_err(|e| e.to_string())?;
        if dump {
            print!("{}", print_model(&model));
        }
        let report = run_checks(&model);
        for o in &report.outcomes {
            println!("seed {} {} {}", seed + i, o.verdict, o.check);
        }
        if report.has_failures() {
            failures += 1;
        }
    }
    println!("{} instances, {} with failures", count, failures);
    if failures > 0 {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn sample_points(n: usize, dim: usize) -> Vec<Vec<BigRational>> {
    (0..n)
        .map(|k| {
            (0..dim)
                .map(|j| {
                    BigRational::new(
                        ((k + 1) as i64 + j as i64).into(),
                        (j as i64 + 2).into(),
                    )
                })
                .collect()
        })
        .collect()
}

fn cmd_sample(file: &PathBuf, points: usize, json: bool) -> Result<ExitCode, String> {
    let model = load_model(file)?;
    let dim = model
        .algebroids
        .iter()
        .map(|a| a.algebroid.chart_dim())
        .max()
        .unwrap_or(0);
    let pts = sample_points(points, dim);
    let outcomes = sample_checks(&model, &pts);
    let mut inconsistent = false;
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&outcomes).expect("outcomes serialize")
        );
        inconsistent = outcomes.iter().any(|s| s.internal_inconsistency);
    } else {
        for s in &outcomes {
            let flag = if s.internal_inconsistency {
                " INTERNAL_INCONSISTENCY"
            } else {
                ""
            };
            println!(
                "{}: {} samples, {} nonzero{}",
                s.check, s.samples, s.nonzero, flag
            );
            inconsistent |= s.internal_inconsistency;
        }
    }
    if inconsistent {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { file, json } => cmd_check(file, *json),
        Command::Classify { file, name } => cmd_classify(file, name),
        Command::Derive { file, expr } => cmd_derive(file, expr),
        Command::Fuzz {
            seed,
            kind,
            count,
            rank,
            chart_dim,
            degree,
            dump,
        } => cmd_fuzz(*seed, kind, *count, *rank, *chart_dim, *degree, *dump),
        Command::Sample { file, points, json } => cmd_sample(file, *points, *json),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
