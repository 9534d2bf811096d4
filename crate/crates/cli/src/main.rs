//! `osp`: generate, solve, check and benchmark stencil planning instances.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use stencil_core::model::{load_placement, save_placement, Preset as CorePreset};
use stencil_core::oracle::{exact_1d, exact_2d, greedy_baseline_1d, greedy_baseline_2d, DEFAULT_GRID_STEP};
use stencil_core::osp1d::{solve_1d, Solve1dParams};
use stencil_core::osp2d::{solve_2d, SaParams, Solve2dParams};
use stencil_core::{
    evaluate, generate_instance, load_instance, save_instance, validate_placement, CandidateId, Error,
    GeneratorSpec, Instance, Mode as CoreMode, Placement, Verdict, WritingTimeReport,
};

#[derive(Parser)]
#[command(name = "osp", version, about = "Overlap-aware stencil planning for MCC e-beam lithography")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance
    Gen {
        #[arg(long, value_enum, default_value = "small")]
        preset: Preset,
        #[arg(long, value_enum, default_value = "1d")]
        mode: Mode,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Instance file to write (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plan a stencil for an instance
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        params: SolveArgs,
        /// Placement file to write
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Check a placement and report its writing time
    Eval {
        instance: PathBuf,
        placement: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Exact or greedy reference solution for a tiny instance
    Oracle {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        which: OracleKind,
        /// Lattice pitch for the 2D exact search
        #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
        grid_step: i64,
        /// Placement file to write
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Greedy baseline against the planner over regenerated instances
    Bench {
        #[arg(long, value_enum, default_value = "small")]
        preset: Preset,
        #[arg(long, value_enum, default_value = "1d")]
        mode: Mode,
        /// First seed
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of consecutive seeds
        #[arg(long, default_value_t = 3)]
        count: u64,
        #[command(flatten)]
        params: SolveArgs,
        /// CSV file to write (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

#[derive(Args, Clone)]
struct SolveArgs {
    /// Rounding threshold in (0, 1]
    #[arg(long, default_value_t = 0.9)]
    th_inv: f64,
    /// Fraction of candidates kept by the 2D pre-filter
    #[arg(long = "keep", default_value_t = 0.9)]
    keep: f64,
    /// Object count at which 2D clustering stops (half the kept set when absent)
    #[arg(long)]
    cluster_threshold: Option<usize>,
    /// Annealing move budget
    #[arg(long, default_value_t = SaParams::default().moves)]
    sa_moves: usize,
    /// Annealing seed
    #[arg(long, default_value_t = SaParams::default().seed)]
    sa_seed: u64,
}

impl SolveArgs {
    fn params_1d(&self) -> Solve1dParams {
        Solve1dParams {
            th_inv: self.th_inv,
            ..Solve1dParams::default()
        }
    }

    fn params_2d(&self) -> Solve2dParams {
        Solve2dParams {
            keep_fraction: self.keep,
            cluster_threshold: self.cluster_threshold,
            sa: SaParams {
                seed: self.sa_seed,
                moves: self.sa_moves,
                ..SaParams::default()
            },
            ..Solve2dParams::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Small,
    Large,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    #[value(name = "1d")]
    OneD,
    #[value(name = "2d")]
    TwoD,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Exact,
    Greedy,
}

impl From<Mode> for CoreMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::OneD => CoreMode::OneD,
            Mode::TwoD => CoreMode::TwoD,
        }
    }
}

impl From<Preset> for CorePreset {
    fn from(p: Preset) -> Self {
        match p {
            Preset::Small => CorePreset::Small,
            Preset::Large => CorePreset::Large,
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    algorithm: &'a str,
    mode: CoreMode,
    t_total: u64,
    t_per_region: &'a [u64],
    t_vsb: &'a [u64],
    sum_shots: u64,
    char_count: usize,
    selected: &'a [CandidateId],
    #[serde(skip_serializing_if = "Option::is_none")]
    optimum: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    explored: Option<u64>,
    runtime_ms: f64,
}

impl<'a> Report<'a> {
    fn new(algorithm: &'a str, mode: CoreMode, r: &'a WritingTimeReport, runtime_ms: f64) -> Self {
        Report {
            algorithm,
            mode,
            t_total: r.t_total,
            t_per_region: &r.t_per_region,
            t_vsb: &r.t_vsb,
            sum_shots: r.sum_shots,
            char_count: r.selected.len(),
            selected: &r.selected,
            optimum: None,
            explored: None,
            runtime_ms,
        }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string(self).expect("report serializes") + "\n",
            Format::Csv => format!(
                "algorithm,mode,shot,char,sum_shots,cpu_s\n{},{},{},{},{},{:.3}\n",
                self.algorithm,
                self.mode,
                self.t_total,
                self.char_count,
                self.sum_shots,
                self.runtime_ms / 1e3
            ),
        }
    }
}

/// Errors that mean the input itself broke an invariant, as opposed to a
/// bad command line or an unreadable file.
fn is_validation_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        matches!(
            c.downcast_ref::<Error>(),
            Some(Error::Invalid(_) | Error::UnknownCandidate(_) | Error::ModeMismatch(_))
        )
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_validation_error(&e) {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load(path: &Path) -> anyhow::Result<Instance> {
    load_instance(path).with_context(|| format!("instance {}", path.display()))
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn plan(instance: &Instance, args: &SolveArgs) -> anyhow::Result<(Placement, WritingTimeReport)> {
    Ok(match instance.mode {
        CoreMode::OneD => {
            let (p, r) = solve_1d(instance, &args.params_1d())?;
            (Placement::OneD(p), r)
        }
        CoreMode::TwoD => {
            let (p, r) = solve_2d(instance, &args.params_2d())?;
            (Placement::TwoD(p), r)
        }
    })
}

fn baseline(instance: &Instance) -> anyhow::Result<(Placement, WritingTimeReport)> {
    Ok(match instance.mode {
        CoreMode::OneD => {
            let (p, r) = greedy_baseline_1d(instance)?;
            (Placement::OneD(p), r)
        }
        CoreMode::TwoD => {
            let (p, r) = greedy_baseline_2d(instance)?;
            (Placement::TwoD(p), r)
        }
    })
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Gen {
            preset,
            mode,
            seed,
            out,
        } => {
            let inst = generate_instance(&GeneratorSpec::preset(preset.into(), mode.into()), seed)?;
            match out {
                Some(path) => save_instance(&inst, &path).with_context(|| format!("writing {}", path.display()))?,
                None => emit(None, &inst.to_json())?,
            }
        }
        Command::Solve {
            instance,
            params,
            out,
            format,
        } => {
            let inst = load(&instance)?;
            check_params(&params)?;
            let start = Instant::now();
            let (placement, report) = plan(&inst, &params)?;
            let runtime = ms(start);
            let verdict = validate_placement(&inst, &placement);
            if let Some(path) = &out {
                save_placement(&placement, path).with_context(|| format!("writing {}", path.display()))?;
            }
            emit(None, &Report::new("pipeline", inst.mode, &report, runtime).render(format))?;
            if !verdict.is_feasible() {
                eprintln!("error: planner emitted an infeasible placement: {verdict:?}");
                return Ok(ExitCode::from(1));
            }
        }
        Command::Eval {
            instance,
            placement,
            format,
        } => {
            let inst = load(&instance)?;
            let placement =
                load_placement(&placement).with_context(|| format!("placement {}", placement.display()))?;
            let verdict = validate_placement(&inst, &placement);
            if !verdict.is_feasible() {
                eprintln!("error: {}", describe(&verdict));
                let json = serde_json::to_string_pretty(&verdict).expect("verdict serializes");
                emit(None, &(json + "\n"))?;
                return Ok(ExitCode::from(1));
            }
            let report = evaluate(&inst, placement.selected())?;
            emit(None, &Report::new("eval", inst.mode, &report, 0.0).render(format))?;
        }
        Command::Oracle {
            instance,
            which,
            grid_step,
            out,
            format,
        } => {
            let inst = load(&instance)?;
            let start = Instant::now();
            let (placement, found) = match (which, inst.mode) {
                (OracleKind::Exact, CoreMode::OneD) => {
                    let r = exact_1d(&inst)?;
                    (Placement::OneD(r.witness), Some((r.optimum, r.explored)))
                }
                (OracleKind::Exact, CoreMode::TwoD) => {
                    let r = exact_2d(&inst, grid_step)?;
                    (Placement::TwoD(r.witness), Some((r.optimum, r.explored)))
                }
                (OracleKind::Greedy, _) => (baseline(&inst)?.0, None),
            };
            let runtime = ms(start);
            let report = evaluate(&inst, placement.selected())?;
            if let Some(path) = &out {
                save_placement(&placement, path).with_context(|| format!("writing {}", path.display()))?;
            }
            let name = match which {
                OracleKind::Exact => "exact",
                OracleKind::Greedy => "greedy",
            };
            let mut rendered = Report::new(name, inst.mode, &report, runtime);
            rendered.optimum = found.map(|f| f.0);
            rendered.explored = found.map(|f| f.1);
            emit(None, &rendered.render(format))?;
        }
        Command::Bench {
            preset,
            mode,
            seed,
            count,
            params,
            out,
            format,
        } => {
            check_params(&params)?;
            return bench(preset, mode, seed, count, &params, out.as_deref(), format);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn check_params(p: &SolveArgs) -> anyhow::Result<()> {
    if !(p.th_inv > 0.0 && p.th_inv <= 1.0) {
        bail!("--th-inv must lie in (0, 1], got {}", p.th_inv);
    }
    if !(p.keep > 0.0 && p.keep <= 1.0) {
        bail!("--keep must lie in (0, 1], got {}", p.keep);
    }
    Ok(())
}

fn describe(v: &Verdict) -> String {
    let first = v.violations.first().map(|x| format!("{x:?}")).unwrap_or_default();
    format!("{} violation(s), first: {first}", v.violations.len())
}

#[derive(Serialize)]
struct BenchRow {
    instance: String,
    seed: u64,
    mode: CoreMode,
    algorithm: &'static str,
    shot: u64,
    char: usize,
    cpu_s: f64,
}

fn bench(
    preset: Preset,
    mode: Mode,
    seed: u64,
    count: u64,
    params: &SolveArgs,
    out: Option<&Path>,
    format: Format,
) -> anyhow::Result<ExitCode> {
    let preset_name = match preset {
        Preset::Small => "small",
        Preset::Large => "large",
    };
    let mut rows = Vec::new();
    let mut infeasible = 0;
    for s in seed..seed + count {
        let inst = generate_instance(&GeneratorSpec::preset(preset.into(), mode.into()), s)?;
        let name = format!("{preset_name}-{}-{s}", inst.mode);
        let runs: [(&'static str, fn(&Instance, &SolveArgs) -> anyhow::Result<(Placement, WritingTimeReport)>); 2] =
            [("greedy", |i, _| baseline(i)), ("pipeline", plan)];
        for (algorithm, run) in runs {
            let start = Instant::now();
            let (placement, report) = run(&inst, params)?;
            let cpu_s = start.elapsed().as_secs_f64();
            let verdict = validate_placement(&inst, &placement);
            if !verdict.is_feasible() {
                eprintln!("error: {algorithm} on {name}: {}", describe(&verdict));
                infeasible += 1;
            }
            rows.push(BenchRow {
                instance: name.clone(),
                seed: s,
                mode: inst.mode,
                algorithm,
                shot: report.t_total,
                char: report.selected.len(),
                cpu_s,
            });
        }
    }
    let text = match format {
        Format::Csv => {
            let mut text = String::from("instance,seed,mode,algorithm,shot,char,cpu_s\n");
            for r in &rows {
                text.push_str(&format!(
                    "{},{},{},{},{},{},{:.3}\n",
                    r.instance, r.seed, r.mode, r.algorithm, r.shot, r.char, r.cpu_s
                ));
            }
            text
        }
        Format::Json => serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n",
    };
    emit(out, &text)?;
    Ok(if infeasible > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}
