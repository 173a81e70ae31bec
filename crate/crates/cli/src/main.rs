//! Command-line driver: surface analysis, integration classification,
//! verification modes, periods, and Hasse diagram emission.
//!
//! Exit codes: 0 success, 1 validation failure (bad input, failed
//! precondition), 2 internal assertion failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use logsymp::classify::{
    self, classify_local, classify_logsymp_hausdorff, classify_logtan, hausdorff_filter_logtan,
    ssc_hausdorff_check, validate_graph, verify_integration_mt, GraphMode, GraphOfGroups,
    IntegrationPoset, LocalData, MtCandidate,
};
use logsymp::groupoid::{verify_model, ModelVerifyRequest};
use logsymp::poly::PolyJson;
use logsymp::surface::{
    analyze, modular_period_elliptic, modular_period_series, SurfaceMode, SurfaceModel,
};

#[derive(Parser)]
#[command(name = "logsymp", version, about = "log symplectic classification toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for all sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of beside the input.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassifyMode {
    Logtan,
    LogsympHausdorff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the degeneracy graph of a polynomial surface and compute
    /// modular periods.
    AnalyzeSurface {
        input: PathBuf,
        /// Also dump the working mesh as a wavefront .obj beside the input.
        #[arg(long)]
        dump_mesh: bool,
    },
    /// Enumerate integrations of the graph of groups as a poset.
    Classify {
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: ClassifyMode,
        #[arg(long)]
        bound: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Keep only Hausdorff elements (log tangent mode).
        #[arg(long)]
        hausdorff: bool,
    },
    /// Local classification in a tubular neighbourhood normal form.
    ClassifyLocal {
        input: PathBuf,
        /// Override the bound stored in the input.
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Verify a candidate mapping-torus integration family.
    VerifyMt { input: PathBuf },
    /// Run sampled checks against a built-in groupoid model.
    VerifyModel {
        input: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Modular period of the elliptic family by AGM and by series.
    Period {
        #[arg(long)]
        t: f64,
    },
    /// Render a poset report as a DOT Hasse diagram.
    Hasse {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
    },
}

enum CliError {
    Validation(String),
    Internal(String),
}

impl CliError {
    fn validation(e: impl std::fmt::Display) -> Self {
        CliError::Validation(e.to_string())
    }
    fn internal(e: impl std::fmt::Display) -> Self {
        CliError::Internal(e.to_string())
    }
}

fn classify_error(e: classify::ClassifyError) -> CliError {
    match e {
        classify::ClassifyError::Internal(_) => CliError::Internal(e.to_string()),
        _ => CliError::Validation(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("validation error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal assertion failed: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let data = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&data)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn report_path(input: &Path, output: &Option<PathBuf>, suffix: &str) -> PathBuf {
    match output {
        Some(p) => p.clone(),
        None => input.with_extension(suffix),
    }
}

fn write_report(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::AnalyzeSurface { input, dump_mesh } => {
            #[derive(serde::Deserialize)]
            #[serde(rename_all = "camelCase")]
            struct SurfaceInput {
                mode: SurfaceMode,
                f: PolyJson,
                resolution: usize,
                #[serde(default = "default_half_width")]
                box_half_width: i64,
            }
            fn default_half_width() -> i64 {
                2
            }
            let raw: SurfaceInput = read_json(input)?;
            let model = SurfaceModel {
                mode: raw.mode,
                f: raw.f.to_poly().map_err(CliError::validation)?,
                resolution: raw.resolution,
                box_half_width: raw.box_half_width,
            };
            let report = analyze(&model).map_err(CliError::validation)?;
            let json = serde_json::to_string_pretty(&report).map_err(CliError::internal)?;
            let path = report_path(input, &cli.output, "report.json");
            write_report(&path, &json)?;
            if *dump_mesh {
                let obj = logsymp::surface::mesh_obj(&model).map_err(CliError::validation)?;
                write_report(&input.with_extension("obj"), &obj)?;
            }
            println!(
                "regions: {}, curves: {} ({} two-sided)",
                report.regions.len(),
                report.curves.len(),
                report.curves.iter().filter(|c| c.orientable).count()
            );
            Ok(())
        }
        Command::Classify {
            input,
            mode,
            bound,
            format,
            hausdorff,
        } => {
            let graph: GraphOfGroups = read_json(input)?;
            let gmode = match mode {
                ClassifyMode::Logtan => GraphMode::Logtan,
                ClassifyMode::LogsympHausdorff => GraphMode::LogsympHausdorff,
            };
            let validation = validate_graph(&graph, gmode);
            if !validation.valid {
                return Err(CliError::Validation(validation.violations.join("; ")));
            }
            let poset = match mode {
                ClassifyMode::Logtan => {
                    let p = classify_logtan(&graph, *bound).map_err(classify_error)?;
                    if *hausdorff {
                        hausdorff_filter_logtan(&p, &graph).map_err(classify_error)?
                    } else {
                        p
                    }
                }
                ClassifyMode::LogsympHausdorff => {
                    classify_logsymp_hausdorff(&graph, *bound).map_err(classify_error)?
                }
            };
            // re-validation pass: reload the emitted JSON and re-check the
            // conditions on the loaded copy
            let json = serde_json::to_string_pretty(&poset).map_err(CliError::internal)?;
            let reloaded: IntegrationPoset =
                serde_json::from_str(&json).map_err(CliError::internal)?;
            classify::revalidate(&graph, &reloaded)
                .map_err(|e| CliError::Internal(format!("re-validation: {e}")))?;
            match format {
                Format::Json => {
                    let path = report_path(input, &cli.output, "report.json");
                    write_report(&path, &json)?;
                }
                Format::Dot => {
                    let path = report_path(input, &cli.output, "dot");
                    write_report(&path, &poset.to_dot())?;
                }
            }
            println!(
                "elements: {}, hausdorff: {}, covers: {}",
                poset.elements.len(),
                poset.elements.iter().filter(|e| e.hausdorff).count(),
                poset.covers.len()
            );
            Ok(())
        }
        Command::ClassifyLocal {
            input,
            bound,
            format,
        } => {
            let mut data: LocalData = read_json(input)?;
            if let Some(b) = bound {
                data.bound = *b;
            }
            let poset = classify_local(&data).map_err(classify_error)?;
            match format {
                Format::Json => {
                    let json = serde_json::to_string_pretty(&poset).map_err(CliError::internal)?;
                    let path = report_path(input, &cli.output, "report.json");
                    write_report(&path, &json)?;
                }
                Format::Dot => {
                    let path = report_path(input, &cli.output, "dot");
                    write_report(&path, &poset.to_dot())?;
                }
            }
            println!(
                "elements: {}, hausdorff: {}",
                poset.elements.len(),
                poset.elements.iter().filter(|e| e.hausdorff).count()
            );
            Ok(())
        }
        Command::VerifyMt { input } => {
            #[derive(serde::Deserialize)]
            struct MtInput {
                graph: GraphOfGroups,
                candidates: Vec<MtCandidate>,
            }
            let raw: MtInput = read_json(input)?;
            let report =
                verify_integration_mt(&raw.graph, &raw.candidates).map_err(classify_error)?;
            let ssc = ssc_hausdorff_check(&raw.graph).map_err(classify_error)?;
            let combined = json!({
                "verification": report,
                "sscHausdorff": ssc,
            });
            let json = serde_json::to_string_pretty(&combined).map_err(CliError::internal)?;
            let path = report_path(input, &cli.output, "report.json");
            write_report(&path, &json)?;
            println!(
                "accepted: {}, ssc hausdorff: {}",
                report.accepted, ssc.hausdorff_ssc
            );
            Ok(())
        }
        Command::VerifyModel {
            input,
            samples,
            tol,
        } => {
            let mut req: ModelVerifyRequest = read_json(input)?;
            if let Some(s) = samples {
                req.samples = *s;
            }
            if let Some(t) = tol {
                req.tol = *t;
            }
            req.seed = cli.seed;
            let report = verify_model(&req).map_err(CliError::validation)?;
            let json = serde_json::to_string_pretty(&report).map_err(CliError::internal)?;
            let path = report_path(input, &cli.output, "report.json");
            write_report(&path, &json)?;
            for (name, check) in &report.results {
                println!(
                    "{name}: {} (max residual {:.3e})",
                    if check.pass { "pass" } else { "FAIL" },
                    check.max_residual
                );
            }
            if !report.pass {
                return Err(CliError::Internal("model checks failed".into()));
            }
            Ok(())
        }
        Command::Period { t } => {
            let agm = modular_period_elliptic(*t).map_err(CliError::validation)?;
            let series = modular_period_series(*t).map_err(CliError::validation)?;
            let rel = (agm - series).abs() / agm.abs();
            let out = json!({
                "t": t,
                "agm": agm,
                "series": series,
                "relativeDifference": rel,
            });
            let text = serde_json::to_string_pretty(&out).map_err(CliError::internal)?;
            println!("{text}");
            if let Some(path) = &cli.output {
                std::fs::write(path, &text).map_err(CliError::validation)?;
            }
            if rel > 1e-12 {
                return Err(CliError::Internal(format!(
                    "AGM and series disagree: relative difference {rel:e}"
                )));
            }
            Ok(())
        }
        Command::Hasse { input, format } => {
            let poset: IntegrationPoset = read_json(input)?;
            match format {
                Format::Dot => {
                    let path = report_path(input, &cli.output, "dot");
                    write_report(&path, &poset.to_dot())?;
                }
                Format::Json => {
                    let json = serde_json::to_string_pretty(&poset).map_err(CliError::internal)?;
                    let path = report_path(input, &cli.output, "report.json");
                    write_report(&path, &json)?;
                }
            }
            println!(
                "elements: {}, covers: {}",
                poset.elements.len(),
                poset.covers.len()
            );
            Ok(())
        }
    }
}
