use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use ebsl::compare::{
    alpha_sweep, compare, read_functional_evidence, CompareInput, CompareOptions, Method,
    ThetaChoice,
};
use ebsl::engine::{functional_trust_all, naive_sl_referral, solve_referral};
use ebsl::flow::{read_start_vector, FlowConfig};
use ebsl::ingest::evidence_to_opinion_matrix;
use ebsl::render::{write_pgm, RenderMode, RenderSpec};
use ebsl::{ConvergenceReport, Evidence, FunctionalTrustInput, Opinion};
use serde::Serialize;

use crate::input::{self, open};
use crate::settings::{Settings, ThetaArg, WeightChoice};
use crate::{
    Cli, CliError, Command, CompareArgs, ComputeArgs, RenderArgs, RenderModeArg, ReportArgs,
    ReportMethod, EXIT_NOT_CONVERGED,
};

/// Damping factors of the flow-baseline sweep.
pub const SWEEP_ALPHAS: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

/// Runs one command, writing human-readable output to `out`. Returns the
/// process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Compute(args) => compute(args, out),
        Command::Compare(args) => compare_cmd(args, out),
        Command::Render(args) => render(args, out),
        Command::Report(args) => report(args, out),
    }
}

fn exit_code(converged: bool) -> i32 {
    if converged {
        0
    } else {
        EXIT_NOT_CONVERGED
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ComputeReport<'a> {
    nodes: usize,
    c: f64,
    g: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    tolerance: f64,
    max_iterations: usize,
    converged: bool,
    iterations: usize,
    final_residual: Option<f64>,
    residual_history: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    skipped_lines: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    discarded_intra_cluster: Option<Evidence>,
}

fn compute(args: &ComputeArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let settings = args.engine.settings(Some(&args.input))?;
    let params = settings.params()?;
    let loaded = input::load(&args.input, &settings)?;
    let a = evidence_to_opinion_matrix(&loaded.matrix, params);
    let (cfg, theta) = settings.engine_for(settings.weight(), &a)?;
    let (r, conv) = solve_referral(&a, &cfg)?;

    fs::create_dir_all(&args.out)?;
    let mut w = BufWriter::new(File::create(args.out.join("referral.csv"))?);
    r.write_csv(&mut w)?;
    w.flush()?;
    let mut w = BufWriter::new(File::create(args.out.join("evidence.csv"))?);
    loaded.matrix.write_csv(&mut w)?;
    w.flush()?;
    if let Some((index, clusters)) = &loaded.nodes {
        input::write_nodes(&args.out.join("nodes.csv"), index, clusters.as_ref())?;
    }
    if let Some(path) = &args.trust {
        let evidence = read_functional_evidence(open(path)?)?;
        let t: FunctionalTrustInput = evidence
            .iter()
            .map(|(&i, &ev)| (i, Opinion::from_evidence(ev, params)))
            .collect();
        let f = functional_trust_all(&r, &t, &cfg)?;
        let mut w = BufWriter::new(File::create(args.out.join("functional.csv"))?);
        writeln!(w, "i,b,d,u,p,n")?;
        for (i, x) in f {
            let ev = x.evidence(params);
            let [b, d, u] = x.components();
            writeln!(
                w,
                "{i},{b:.16e},{d:.16e},{u:.16e},{:.16e},{:.16e}",
                ev.p(),
                ev.n()
            )?;
        }
        w.flush()?;
    }
    let report = ComputeReport {
        nodes: a.size(),
        c: params.c(),
        g: cfg.g.name(),
        theta,
        tolerance: cfg.tolerance,
        max_iterations: cfg.max_iterations,
        converged: conv.converged,
        iterations: conv.iterations,
        final_residual: conv.final_residual(),
        residual_history: &conv.residual_history,
        skipped_lines: loaded.skipped_lines,
        discarded_intra_cluster: loaded.discarded,
    };
    write_json(&args.out.join("report.json"), &report)?;
    writeln!(
        out,
        "{} nodes, g = {}{}: {} after {} iterations (residual {:e})",
        a.size(),
        cfg.g.name(),
        theta.map(|t| format!(", theta = {t}")).unwrap_or_default(),
        if conv.converged {
            "converged"
        } else {
            "NOT converged"
        },
        conv.iterations,
        conv.final_residual().unwrap_or(0.0),
    )?;
    Ok(exit_code(conv.converged))
}

#[derive(Serialize)]
struct CompareOutput<'a> {
    #[serde(flatten)]
    report: &'a ebsl::CompareReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_sweep: Option<Vec<(f64, f64)>>,
}

fn compare_cmd(args: &CompareArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let settings = args.engine.settings(None)?;
    let (input, default_theta) = match args.case {
        Some(case) => {
            let case = case.case();
            (
                CompareInput::from_case(case),
                Some(ThetaArg::Value(case.theta())),
            )
        }
        None => {
            let ev_path = args.evidence.as_ref().expect("clap requires evidence");
            let t_path = args.trust.as_ref().expect("clap requires trust");
            let referral = ebsl::EvidenceMatrix::read_csv(open(ev_path)?, None)
                .map_err(|e| CliError::new(format!("{}: {e}", ev_path.display())))?;
            let functional = read_functional_evidence(open(t_path)?)
                .map_err(|e| CliError::new(format!("{}: {e}", t_path.display())))?;
            (
                CompareInput {
                    referral,
                    functional,
                },
                None,
            )
        }
    };
    let n = input.referral.size();
    let mut methods: Vec<Method> = match &args.methods {
        Some(names) => names
            .iter()
            .map(|name| {
                Method::from_name(name.trim())
                    .ok_or_else(|| CliError::new(format!("unknown method `{name}`")))
            })
            .collect::<Result<_, _>>()?,
        None => {
            let mut m = vec![Method::FlowSl];
            if n == ebsl::scenario::NODES && args.source == ebsl::scenario::SOURCE {
                m.push(Method::SlCanonical);
            }
            m.extend([Method::EbslBelief, Method::EbslSqrtBelief, Method::EbslOdot]);
            m
        }
    };
    let flow = match (args.alpha, &args.start) {
        (Some(alpha), Some(path)) => {
            let start = read_start_vector(open(path)?, n + 1)?;
            if !methods.contains(&Method::FlowBaseline) {
                methods.push(Method::FlowBaseline);
            }
            let mut cfg = FlowConfig::new(alpha, start);
            cfg.tolerance = settings.tolerance();
            cfg.max_iterations = settings.max_iterations();
            Some(cfg)
        }
        _ => None,
    };
    let theta = match settings.theta.or(default_theta) {
        Some(ThetaArg::Value(v)) => ThetaChoice::Fixed(v),
        Some(ThetaArg::Auto) => ThetaChoice::Auto,
        None if methods.contains(&Method::EbslOdot) => {
            return Err(CliError::new(
                "ebsl-odot needs --theta <value> or --theta auto",
            ))
        }
        None => ThetaChoice::Auto,
    };
    let opts = CompareOptions {
        params: settings.params()?,
        tolerance: settings.tolerance(),
        max_iterations: settings.max_iterations(),
        theta,
        source: args.source,
        methods,
        flow,
    };
    let report = compare(&input, &opts)?;
    write!(out, "{}", report.table())?;

    let sweep = if args.alpha_sweep {
        let sweep = alpha_sweep(&input, &SWEEP_ALPHAS)?;
        let mut text =
            String::from("\nflow baseline, all-ones start vector\nalpha  reputation of P\n");
        for (alpha, r) in &sweep {
            let _ = writeln!(text, "{alpha:>5.2}  {r:.4}");
        }
        write!(out, "{text}")?;
        Some(sweep)
    } else {
        None
    };
    if let Some(path) = &args.json {
        write_json(
            path,
            &CompareOutput {
                report: &report,
                alpha_sweep: sweep,
            },
        )?;
    }
    let converged = report.results.iter().all(|r| r.converged != Some(false));
    Ok(exit_code(converged))
}

fn render(args: &RenderArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let file = match &args.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let flags = Settings {
        clusters: args.input.clusters,
        scale: args.input.scale,
        ..Settings::default()
    };
    let settings = flags.over(file);
    let loaded = input::load(&args.input, &settings)?;
    let spec = RenderSpec {
        mode: match args.mode {
            RenderModeArg::Positive => RenderMode::Positive,
            RenderModeArg::Total => RenderMode::Total,
        },
        max_reference: args.max_reference,
    };
    write_pgm(&loaded.matrix, &spec, &args.out)?;
    let n = loaded.matrix.size();
    writeln!(out, "wrote {n}x{n} image to {}", args.out.display())?;
    Ok(0)
}

#[derive(Serialize)]
struct MethodConvergence {
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(flatten)]
    report: ConvergenceReport,
}

fn report(args: &ReportArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let settings = args.engine.settings(Some(&args.input))?;
    let loaded = input::load(&args.input, &settings)?;
    let a = evidence_to_opinion_matrix(&loaded.matrix, settings.params()?);
    let methods = args.methods.clone().unwrap_or_else(|| {
        vec![match settings.weight() {
            WeightChoice::Belief => ReportMethod::Belief,
            WeightChoice::SqrtBelief => ReportMethod::SqrtBelief,
            WeightChoice::Odot => ReportMethod::Odot,
        }]
    });
    let mut runs = Vec::new();
    for m in methods {
        let (name, weight) = match m {
            ReportMethod::Belief => ("xb", WeightChoice::Belief),
            ReportMethod::SqrtBelief => ("sqrt-xb", WeightChoice::SqrtBelief),
            ReportMethod::Odot => ("odot", WeightChoice::Odot),
            ReportMethod::Naive => ("naive", WeightChoice::Belief),
        };
        let (cfg, theta) = settings.engine_for(weight, &a)?;
        let (_, report) = if m == ReportMethod::Naive {
            naive_sl_referral(&a, &cfg)?
        } else {
            solve_referral(&a, &cfg)?
        };
        runs.push(MethodConvergence {
            method: name,
            theta,
            report,
        });
    }

    let mut text = format!("{:>6}", "k");
    for r in &runs {
        let _ = write!(text, " {:>14}", r.method);
    }
    text.push('\n');
    let longest = runs.iter().map(|r| r.report.iterations).max().unwrap_or(0);
    for k in 0..longest {
        let _ = write!(text, "{:>6}", k + 1);
        for r in &runs {
            match r.report.residual_history.get(k) {
                Some(v) => {
                    let _ = write!(text, " {v:>14.6e}");
                }
                None => {
                    let _ = write!(text, " {:>14}", "");
                }
            }
        }
        text.push('\n');
    }
    for r in &runs {
        let _ = writeln!(
            text,
            "{}: {} after {} iterations",
            r.method,
            if r.report.converged {
                "converged"
            } else {
                "NOT converged"
            },
            r.report.iterations
        );
    }
    write!(out, "{text}")?;
    if let Some(path) = &args.json {
        write_json(path, &runs)?;
    }
    Ok(exit_code(runs.iter().all(|r| r.report.converged)))
}
