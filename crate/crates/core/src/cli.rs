//! Command-line front end.
//!
//! Inputs are problem files or `fixture:<name>`. Reports go to stdout as
//! pretty JSON, one document per input; diagnostics go to stderr.
//!
//! Exit codes: 0 success, 1 invalid input, 2 undecided or a cap was hit.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::fixtures;
use crate::io::{polyhedron_report, prepare_report, Problem, ProblemFile};
use crate::par;
use crate::preparation::{prepare, Mode, Options, Preparation, DEFAULT_MAX_ITER};
use crate::render::{layer_label, project, render_svg, Layer};
use crate::selftest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_UNDECIDED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "polyprep", version, about = "Exact Hironaka and characteristic polyhedra of a hypersurface chart")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Residual order, projected support and the polyhedron in the given chart.
    Polyhedron(Inputs),
    /// Prepare the chart and report the certificate, witness and Lambda replay.
    Prepare(PrepareArgs),
    /// Draw the polyhedron before and after preparation as SVG.
    Render(RenderArgs),
    /// Recompute the worked examples and compare every value exactly.
    Selftest,
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// Problem files (JSON) or `fixture:f_A` style names.
    #[arg(required = true)]
    pub files: Vec<String>,
    /// Process this many inputs concurrently.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// face (faces first, the default), vertex (vertices only) or monic.
    #[arg(long)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Include every accepted step and the rejected candidates before it.
    #[arg(long)]
    pub trace: bool,
    /// Also write an SVG of the initial and final polyhedra (one input only).
    #[arg(long, value_name = "PATH")]
    pub render: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    pub file: String,
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Two 1-based coordinates to keep when d = 3, e.g. `1,3`.
    #[arg(long, value_delimiter = ',')]
    pub projection: Option<Vec<usize>>,
    #[arg(long)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Draw only the starting polyhedron.
    #[arg(long)]
    pub initial_only: bool,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match cli.command {
        Command::Polyhedron(inputs) => cmd_polyhedron(&inputs, out, err),
        Command::Prepare(args) => cmd_prepare(&args, out, err),
        Command::Render(args) => cmd_render(&args, out, err),
        Command::Selftest => cmd_selftest(out),
    }
}

pub fn load(input: &str) -> Result<Problem> {
    if let Some(name) = input.strip_prefix("fixture:") {
        let fx = fixtures::by_name(name).ok_or_else(|| Error::InvalidInput(format!("no fixture named {name:?}")))?;
        return ProblemFile::from_parts(fx.name, &fx.chart, &fx.f).problem();
    }
    let mut file = ProblemFile::load(Path::new(input))?;
    if file.name.is_none() {
        file.name = Path::new(input).file_stem().map(|s| s.to_string_lossy().into_owned());
    }
    file.problem()
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Undecided(_) | Error::GeometryCap(_) | Error::ReexpansionIncomplete(_) => EXIT_UNDECIDED,
        _ => EXIT_INVALID,
    }
}

fn report_error(err: &mut dyn Write, input: &str, e: &Error) -> i32 {
    let _ = writeln!(err, "polyprep: {input}: {e}");
    error_code(e)
}

fn emit<T: serde::Serialize>(out: &mut dyn Write, value: &T) {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    let _ = writeln!(out, "{text}");
}

fn cmd_polyhedron(inputs: &Inputs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let results = par::with_jobs(inputs.jobs, |exec| {
        par::map_coarse(exec, &inputs.files, |input| load(input).and_then(|p| polyhedron_report(&p)))
    });
    let mut code = EXIT_OK;
    for (input, r) in inputs.files.iter().zip(results) {
        match r {
            Ok(report) => emit(out, &report),
            Err(e) => code = code.max(report_error(err, input, &e)),
        }
    }
    code
}

fn options_for(problem: &Problem, mode: Option<Mode>, max_iter: Option<usize>) -> Options {
    Options {
        mode: mode.or(problem.options.mode).unwrap_or_default(),
        max_iter: max_iter.or(problem.options.max_iter).unwrap_or(DEFAULT_MAX_ITER),
    }
}

fn run_prepare(input: &str, mode: Option<Mode>, max_iter: Option<usize>) -> Result<(Problem, Preparation)> {
    let problem = load(input)?;
    let options = options_for(&problem, mode, max_iter);
    let p = prepare(&problem.f, &problem.chart, options)?;
    Ok((problem, p))
}

fn cmd_prepare(args: &PrepareArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if args.render.is_some() && args.inputs.files.len() != 1 {
        let _ = writeln!(err, "polyprep: --render needs exactly one input");
        return EXIT_INVALID;
    }
    let results = par::with_jobs(args.inputs.jobs, |exec| {
        par::map_coarse(exec, &args.inputs.files, |input| run_prepare(input, args.mode, args.max_iter))
    });
    let mut code = EXIT_OK;
    for (input, r) in args.inputs.files.iter().zip(results) {
        match r {
            Ok((problem, p)) => {
                emit(out, &prepare_report(&problem.name, &p, args.trace));
                if p.certificate.kind() == "UNDECIDED" {
                    let _ = writeln!(err, "polyprep: {input}: undecided after {} steps", p.steps.len());
                    code = code.max(EXIT_UNDECIDED);
                }
                if let Some(path) = &args.render {
                    if let Err(e) = draw(&problem, &p, None, false).and_then(|svg| write_file(path, &svg)) {
                        code = code.max(report_error(err, input, &e));
                    }
                }
            }
            Err(e) => code = code.max(report_error(err, input, &e)),
        }
    }
    code
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn draw(problem: &Problem, p: &Preparation, projection: Option<[usize; 2]>, initial_only: bool) -> Result<String> {
    let chart = &problem.chart;
    let from_file = problem.options.projection.filter(|[a, b]| *a >= 1 && a < b).map(|[a, b]| [a - 1, b - 1]);
    let keep = match (chart.d, projection.or(from_file)) {
        (2, None) => [0, 1],
        (_, Some(k)) => k,
        (d, None) => return Err(Error::InvalidInput(format!("d = {d} needs a projection onto two coordinates"))),
    };
    if keep.iter().any(|&k| k >= chart.d) {
        return Err(Error::InvalidInput(format!("projection {keep:?} out of range for d = {}", chart.d)));
    }
    let initial = project(&p.initial, keep)?;
    let mut layers = vec![Layer { label: layer_label("initial", &initial), polyhedron: initial.clone() }];
    if !initial_only {
        let fin = project(&p.final_polyhedron, keep)?;
        if fin != initial {
            layers.push(Layer { label: layer_label(&format!("final ({})", p.certificate.kind()), &fin), polyhedron: fin });
        }
    }
    render_svg(&layers, [&chart.names[keep[0]], &chart.names[keep[1]]])
}

fn cmd_render(args: &RenderArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let projection = match args.projection.as_deref() {
        None => None,
        Some([a, b]) if *a >= 1 && *b >= 1 && a < b => Some([a - 1, b - 1]),
        Some(other) => {
            let _ = writeln!(err, "polyprep: projection {other:?} must be two increasing 1-based indices");
            return EXIT_INVALID;
        }
    };
    let result = run_prepare(&args.file, args.mode, args.max_iter)
        .and_then(|(problem, p)| draw(&problem, &p, projection, args.initial_only));
    match result {
        Ok(svg) => match &args.output {
            Some(path) => match write_file(path, &svg) {
                Ok(()) => EXIT_OK,
                Err(e) => report_error(err, &args.file, &e),
            },
            None => {
                let _ = out.write_all(svg.as_bytes());
                EXIT_OK
            }
        },
        Err(e) => report_error(err, &args.file, &e),
    }
}

fn cmd_selftest(out: &mut dyn Write) -> i32 {
    let checks = selftest::run_all();
    for c in &checks {
        let _ = writeln!(out, "{c}");
    }
    if checks.iter().all(|c| c.passed) {
        EXIT_OK
    } else {
        EXIT_INVALID
    }
}
