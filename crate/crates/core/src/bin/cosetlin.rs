use std::error::Error;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cosetlin::approx::{baseline_random, solve_pipeline, Mode, SolveReport};
use cosetlin::bench::{corpus_files, run_corpus, write_csv};
use cosetlin::dictator::{run_test, Strategy, TestConfig};
use cosetlin::instance::{generate_noisy, read_instance};
use cosetlin::reps::{gap_report, Catalog};
use cosetlin::{compute_hs, make_group, Elem, FiniteGroup};

type Res<T> = Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(name = "cosetlin", version, about = "Coset-rounding solver for linear equations over finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Report {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliMode {
    Derand,
    Rand,
    Baseline,
    Brute,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Mode {
        match m {
            CliMode::Derand => Mode::Derandomized,
            CliMode::Rand => Mode::Randomized,
            CliMode::Baseline => Mode::BaselineRandom,
            CliMode::Brute => Mode::BruteForce,
        }
    }
}

#[derive(clap::Args)]
struct GroupArgs {
    /// Group descriptor: Zn, Dn, Sn, Q8, products like Z4xZ4, or file:PATH
    #[arg(long)]
    group: String,
    /// Element IDs of S
    #[arg(long = "S", num_args = 1.., required = true)]
    s: Vec<Elem>,
    /// Print the element ID to label map on stderr
    #[arg(long)]
    labels: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compute H_S, its coset representative and the ratio |S|/|H_S|
    Hs {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long, value_enum, default_value = "text")]
        report: Report,
    },
    /// Run the approximation pipeline on an instance file
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "derand")]
        mode: CliMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        report: Report,
    },
    /// Generate a planted (optionally noisy) instance
    Generate {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fraction of constraints re-randomized after planting
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Output file; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact optimum by exhaustive search
    Brute {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        report: Report,
    },
    /// Uniformly random assignment
    Baseline {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the method of conditional expectations instead of sampling
        #[arg(long)]
        derandomize: bool,
        #[arg(long, value_enum, default_value = "text")]
        report: Report,
    },
    /// Monte-Carlo run of the dictatorship test
    Simulate {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long)]
        n: usize,
        /// dictator:J, quotient_lift, uniform_random or custom
        #[arg(long, default_value = "dictator:0")]
        strategy: String,
        /// Table file for the custom strategy (|G|^n element IDs)
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-coordinate resampling probability
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, value_enum, default_value = "json")]
        report: Report,
    },
    /// Character and representation gaps for (G, S)
    CheckReps {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long, value_enum, default_value = "json")]
        report: Report,
    },
    /// Solve every *.lin file in a directory and write a CSV
    Bench {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "derand,rand,baseline,brute")]
        modes: Vec<CliMode>,
    },
}

fn load_group(args: &GroupArgs) -> Res<Arc<FiniteGroup>> {
    let g = Arc::new(make_group(&args.group)?);
    for &x in &args.s {
        g.check_element(x)?;
    }
    if args.labels {
        for x in g.elements() {
            eprintln!("{x} {}", g.label(x));
        }
    }
    Ok(g)
}

fn emit<T: Serialize>(report: Report, value: &T, text: impl FnOnce() -> String) -> Res<()> {
    match report {
        Report::Json => println!("{}", serde_json::to_string_pretty(value)?),
        Report::Text => print!("{}", text()),
    }
    Ok(())
}

fn solve_text(r: &SolveReport) -> String {
    let mut s = String::new();
    writeln!(s, "mode        {}", r.mode.as_str()).unwrap();
    writeln!(s, "value       {} ({}/{} satisfied)", r.value, r.satisfied, r.constraints).unwrap();
    writeln!(s, "guarantee   {}", r.guarantee).unwrap();
    if r.quotient_unsat {
        writeln!(s, "note        quotient system unsatisfiable, used the uniform baseline").unwrap();
    }
    let a: Vec<String> = r.assignment.iter().map(|x| x.to_string()).collect();
    writeln!(s, "assignment  {}", a.join(" ")).unwrap();
    s
}

fn parse_strategy(name: &str, table: Option<&Path>) -> Res<Strategy> {
    if let Some(j) = name.strip_prefix("dictator") {
        let j = j.strip_prefix(':').unwrap_or("0");
        return Ok(Strategy::Dictator(j.parse()?));
    }
    match name {
        "quotient_lift" => Ok(Strategy::QuotientLift),
        "uniform_random" => Ok(Strategy::UniformRandom),
        "custom" => {
            let path = table.ok_or("the custom strategy needs --table")?;
            let values = std::fs::read_to_string(path)?
                .split_whitespace()
                .map(|t| t.parse::<Elem>())
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Strategy::Custom(Arc::new(values)))
        }
        other => Err(format!("unknown strategy `{other}`").into()),
    }
}

fn run(cli: Cli) -> Res<()> {
    match cli.command {
        Command::Hs { g: args, report } => {
            let g = load_group(&args)?;
            let hs = compute_hs(&g, &args.s)?;
            let summary = hs.summary(&g);
            emit(report, &summary, || {
                let mut s = String::new();
                writeln!(s, "group       {}", summary.group).unwrap();
                writeln!(s, "H_S order   {}", summary.order).unwrap();
                writeln!(s, "H_S         {}", summary.labels.join(" ")).unwrap();
                let ids: Vec<String> = summary.elements.iter().map(|x| x.to_string()).collect();
                writeln!(s, "H_S ids     {}", ids.join(" ")).unwrap();
                writeln!(s, "coset rep   {} ({})", summary.coset_rep_label, summary.coset_rep).unwrap();
                writeln!(s, "ratio       {}", summary.ratio).unwrap();
                writeln!(s, "S^-1S generates H_S  {}", summary.generated_by_sinv_s).unwrap();
                s
            })
        }
        Command::Solve {
            instance,
            mode,
            seed,
            report,
        } => {
            let inst = read_instance(&instance)?;
            let r = solve_pipeline(&inst, seed, mode.into())?;
            emit(report, &r, || solve_text(&r))
        }
        Command::Brute { instance, report } => {
            let inst = read_instance(&instance)?;
            let r = solve_pipeline(&inst, 0, Mode::BruteForce)?;
            emit(report, &r, || solve_text(&r))
        }
        Command::Baseline {
            instance,
            seed,
            derandomize,
            report,
        } => {
            let inst = read_instance(&instance)?;
            let r = baseline_random(&inst, seed, derandomize);
            emit(report, &r, || solve_text(&r))
        }
        Command::Generate {
            g: args,
            k,
            n,
            m,
            seed,
            noise,
            out,
        } => {
            let g = load_group(&args)?;
            if !(0.0..=1.0).contains(&noise) {
                return Err(format!("noise {noise} not in [0, 1]").into());
            }
            let (inst, planted) = generate_noisy(g, &args.s, k, n, m, noise, seed)?;
            let ids: Vec<String> = planted.values().iter().map(|x| x.to_string()).collect();
            let text = format!("# planted: {}\n{}", ids.join(" "), inst.to_text());
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Simulate {
            g: args,
            n,
            strategy,
            table,
            samples,
            seed,
            noise,
            report,
        } => {
            let g = load_group(&args)?;
            let strategy = parse_strategy(&strategy, table.as_deref())?;
            let cfg = TestConfig::new(g, &args.s, n, samples, seed, strategy)?.with_noise(noise)?;
            let r = run_test(&cfg)?;
            emit(report, &r, || {
                format!(
                    "strategy    {}\nestimate    {:.6}\n95% CI      [{:.6}, {:.6}]\nsamples     {}\n",
                    cfg.strategy.name(),
                    r.estimate,
                    r.ci_low,
                    r.ci_high,
                    r.samples
                )
            })
        }
        Command::CheckReps { g: args, report } => {
            let g = load_group(&args)?;
            let hs = compute_hs(&g, &args.s)?;
            let r = gap_report(&g, &args.s, &hs, &Catalog::builtin());
            emit(report, &r, || {
                let mut s = String::new();
                writeln!(s, "group                {}", r.group).unwrap();
                writeln!(s, "|H_S|                {}", r.hs_order).unwrap();
                let e = &r.epsilon;
                writeln!(
                    s,
                    "constant on H_S      {} of {} characters (expected {})",
                    e.constant_on_hs, e.characters, e.expected_constant
                )
                .unwrap();
                match e.gap {
                    Some(gap) => writeln!(s, "character gap        {gap:.9}").unwrap(),
                    None => writeln!(s, "character gap        vacuous").unwrap(),
                }
                if let Some(op) = &r.operator_norm {
                    match op.gap {
                        Some(gap) => writeln!(
                            s,
                            "operator-norm gap    {gap:.9} (hypothesis {})",
                            if op.hypothesis_met { "met" } else { "not met" }
                        )
                        .unwrap(),
                        None => writeln!(s, "operator-norm gap    no irreps of dimension >= 2").unwrap(),
                    }
                }
                if let Some(c) = &r.catalog {
                    writeln!(s, "catalog valid        {}", c.passes(g.order())).unwrap();
                }
                s
            })
        }
        Command::Bench {
            corpus,
            out,
            seed,
            modes,
        } => {
            let files = corpus_files(&corpus)?;
            let modes: Vec<Mode> = modes.into_iter().map(Mode::from).collect();
            let records = run_corpus(&files, &modes, seed)?;
            write_csv(&records, std::fs::File::create(&out)?)?;
            eprintln!("{} records from {} instances", records.len(), files.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
