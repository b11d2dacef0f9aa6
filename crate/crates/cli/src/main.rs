//! Command-line surface: analyze a web at a point, run the verification
//! battery, print the Cartan character tables.

mod json;
mod verify;

use std::fs;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use threeweb_core::config::AnalysisConfig;
use threeweb_core::exprlang::{parse_point, parse_web};
use threeweb_core::invariants::{classify, AnalysisError};
use threeweb_core::involution::{character_table, CharacterTable, ScenarioId};
use threeweb_core::webframe::BasePoint;
use threeweb_core::WebDefinition;

const EXIT_VERIFICATION: u8 = 1;
const EXIT_DEGENERATE: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "threeweb", version, about = "Analyzer for four-dimensional three-webs W(3,2,2)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a web at a base point.
    Analyze(AnalyzeArgs),
    /// Run the identity verification battery.
    Verify(VerifyArgs),
    /// Print Cartan character tables for the existence-theorem scenarios.
    Characters(CharactersArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Web definition file (lines `f1 = ...`, `f2 = ...`).
    #[arg(long)]
    web: String,
    /// Base point "x1,x2,y1,y2".
    #[arg(long, conflicts_with = "points")]
    point: Option<String>,
    /// File with one base point per line (batch mode).
    #[arg(long)]
    points: Option<String>,
    /// Emit the report as JSON.
    #[arg(long)]
    json: bool,
    /// Include the raw tensor values in the report.
    #[arg(long)]
    dump_tensors: bool,
    /// Classification flag threshold.
    #[arg(long)]
    tol_classify: Option<f64>,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long)]
    web: String,
    #[arg(long)]
    point: String,
    /// Additionally run the battery on N seeded random webs.
    #[arg(long, default_value_t = 0)]
    seeds: u32,
    /// Perturb a tensor component before checking, e.g. "b1112=+1".
    #[arg(long)]
    inject: Option<String>,
}

#[derive(Args)]
struct CharactersArgs {
    /// thm3, thm7, thm8, s22 or all.
    #[arg(long, default_value = "all")]
    scenario: String,
}

fn main() -> ExitCode {
    // die quietly when a downstream pipe closes early
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not usage errors
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Verify(args) => verify::run(args),
        Command::Characters(args) => run_characters(args),
    }
}

fn load_web(path: &str) -> Result<WebDefinition, ExitCode> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {path}: {e}");
            return Err(ExitCode::from(EXIT_USAGE));
        }
    };
    parse_web(&text).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_PARSE)
    })
}

fn parse_point_arg(text: &str) -> Result<BasePoint, ExitCode> {
    parse_point(text).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_PARSE)
    })
}

fn analysis_exit(_e: &AnalysisError) -> u8 {
    // every pipeline error is a geometry problem at the chosen point;
    // syntax problems never reach the pipeline
    EXIT_DEGENERATE
}

fn config_from(tol_classify: Option<f64>) -> Result<AnalysisConfig, ExitCode> {
    let mut cfg = AnalysisConfig::default();
    if let Some(t) = tol_classify {
        cfg.tol_classify = t;
    }
    cfg.validate().map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_USAGE)
    })?;
    Ok(cfg)
}

fn run_analyze(args: AnalyzeArgs) -> ExitCode {
    let web = match load_web(&args.web) {
        Ok(w) => w,
        Err(c) => return c,
    };
    let cfg = match config_from(args.tol_classify) {
        Ok(c) => c,
        Err(code) => return code,
    };

    let points: Vec<BasePoint> = if let Some(pts_file) = &args.points {
        let text = match fs::read_to_string(pts_file) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {pts_file}: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
        };
        let mut pts = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            match parse_point_arg(line) {
                Ok(p) => pts.push(p),
                Err(c) => return c,
            }
        }
        pts
    } else if let Some(p) = &args.point {
        match parse_point_arg(p) {
            Ok(p) => vec![p],
            Err(c) => return c,
        }
    } else {
        eprintln!("error: one of --point or --points is required");
        return ExitCode::from(EXIT_USAGE);
    };

    let mut json_reports = Vec::new();
    for point in &points {
        let analysis = match classify(&web, point, &cfg) {
            Ok(a) => a,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(analysis_exit(&e));
            }
        };
        if args.json {
            if args.dump_tensors {
                #[derive(serde::Serialize)]
                struct Dump<'a> {
                    report: &'a threeweb_core::ClassificationReport,
                    tensors: &'a threeweb_core::WebTensors,
                }
                json_reports.push(
                    serde_json::to_value(Dump {
                        report: &analysis.report,
                        tensors: &analysis.tensors,
                    })
                    .unwrap(),
                );
            } else {
                json_reports.push(serde_json::to_value(&analysis.report).unwrap());
            }
        } else {
            print_text_report(&analysis);
        }
    }
    if args.json {
        // batch mode always emits an array, single-point mode a bare object
        if args.points.is_some() {
            print!("{}", json::to_stable_json(&json_reports));
        } else {
            print!("{}", json::to_stable_json(&json_reports[0]));
        }
    }
    ExitCode::SUCCESS
}

fn yesno(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Collapse negative zero so text output is sign-stable.
fn z(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

fn print_text_report(analysis: &threeweb_core::Analysis) {
    let r = &analysis.report;
    let p = r.base_point;
    if let Some(name) = &r.web_name {
        println!("web:                  {name}");
    }
    println!("point:                ({}, {}, {}, {})", p.x1, p.x2, p.y1, p.y2);
    println!("frame:                {}", r.frame_tag);
    println!(
        "torsion covector a:   ({:.6e}, {:.6e})",
        z(r.torsion_covector[0]),
        z(r.torsion_covector[1])
    );
    println!("isoclinicly geodesic: {}", yesno(r.isoclinicly_geodesic));
    if r.isoclinicly_geodesic {
        println!("a-distribution:       undefined (a = 0); distribution conditions skipped");
    }
    if let Some(i) = &r.delta_integrable {
        println!(
            "a-distribution integrable: {} (residuals {:.3e}, {:.3e})",
            yesno(i.flag),
            z(i.residuals[0]),
            z(i.residuals[1])
        );
    }
    if let Some(g) = &r.geodesicly_parallel {
        println!(
            "geodesicly parallel:  {} (residuals {:.3e}, {:.3e}, {:.3e}, {:.3e})",
            yesno(g.flag),
            z(g.residuals[0]),
            z(g.residuals[1]),
            z(g.residuals[2]),
            z(g.residuals[3])
        );
    }
    if let Some(t) = &r.totally_geodesic {
        println!("totally geodesic:     {}", yesno(t.flag));
    }
    if let Some(c) = &r.hexagonality_conditions {
        println!("hexagonality (b1,b2): ({:.6e}, {:.6e})", z(c[0]), z(c[1]));
        match r.subwebs_hexagonal {
            Some(flag) => println!("subwebs hexagonal:    {}", yesno(flag)),
            None => println!("subwebs hexagonal:    n/a (a-distribution not integrable)"),
        }
    }
    if let Some(k) = r.subweb_curvature {
        println!("subweb curvature K:   {:.6e} (specialized frame)", z(k));
    }
    println!(
        "C(t) coefficients:    [{:.6e}, {:.6e}, {:.6e}, {:.6e}, {:.6e}]",
        z(r.c_coeffs[0]),
        z(r.c_coeffs[1]),
        z(r.c_coeffs[2]),
        z(r.c_coeffs[3]),
        z(r.c_coeffs[4])
    );
    if let Some(b) = &r.invariant_b {
        println!("invariant b:          {:.6e}", z(b.value));
    }
    if let Some(pb) = r.principal_bivector {
        println!("principal bivector:   {}", yesno(pb));
    }
    if let Some(res) = r.conformal_identity_residual {
        println!("b vs C(a2/a1):        residual {res:.3e}");
    }
    println!();
}

fn run_characters(args: CharactersArgs) -> ExitCode {
    let ids: Vec<ScenarioId> = if args.scenario == "all" {
        ScenarioId::all().to_vec()
    } else {
        match ScenarioId::parse(&args.scenario) {
            Ok(id) => vec![id],
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
        }
    };
    let tables: Vec<CharacterTable> = ids.iter().map(|&id| character_table(id)).collect();
    println!("scenario    q  s1  s2  s3    Q    N  rank  verdict");
    let mut notes = Vec::new();
    for t in &tables {
        println!(
            "{:<9} {:>3} {:>3} {:>3} {:>3} {:>4} {:>4} {:>5}  {}",
            t.scenario.name(),
            t.q,
            t.s1,
            t.s2,
            t.s3,
            t.big_q,
            t.n,
            t.n_rank,
            if t.involutive { "involutive" } else { "not involutive" }
        );
        for f in &t.footnotes {
            notes.push(format!("[{}] {}", t.scenario.name(), f));
        }
    }
    if !notes.is_empty() {
        println!();
        for n in notes {
            println!("note: {n}");
        }
    }
    let hard_ok = tables
        .iter()
        .filter(|t| t.scenario != ScenarioId::S22)
        .all(|t| t.involutive);
    if hard_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFICATION)
    }
}
