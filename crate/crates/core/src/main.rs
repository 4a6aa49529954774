use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use topodyn::generators::GeneratorSpec;
use topodyn::io::{named_shift, system_file};
use topodyn::modelbuild::Thm12Schedule;
use topodyn::pipeline::{
    combine_exit_codes, run_config, run_pipelines, CertificateRecord, LambdaSpec, ModeName, PipelineConfig,
    PipelineReport, Schedules, SystemConfig,
};
use topodyn::{DynError, Result};

#[derive(Parser)]
#[command(name = "topodyn", version, about = "Chain recurrence, sensitivity, shadowing and entropy on finite models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for emitted files.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Metric comparison tolerance.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Recorded in the reports; affects nothing.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Args, Clone)]
struct SystemArgs {
    /// `full:M`, `golden-mean`, `cantor_fan:N:P`, `circle_accumulation:N`,
    /// a system JSON file, or an SFT file.
    #[arg(long)]
    system: String,
    /// States (`0,3,5`) or a subset name; for symbolic systems an SFT spec.
    #[arg(long)]
    lambda: Option<String>,
    /// Period bound of the finite truncation of a symbolic system.
    #[arg(long)]
    max_period: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Chain components per delta; writes chain.csv and DOT files.
    Chain {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, num_args = 1.., default_values_t = [0.5, 0.25, 0.125])]
        delta: Vec<f64>,
    },
    /// Sensitive points and horseshoe certificates.
    #[command(subcommand)]
    Chaos(ChaosCommand),
    /// Separated-set entropy estimate; writes entropy.csv.
    Entropy {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, num_args = 1..)]
        r: Vec<f64>,
        #[arg(long, default_value_t = 8)]
        nmax: usize,
        #[arg(long, value_enum, default_value = "greedy")]
        mode: Mode,
    },
    /// SFT model of a locally maximal subshift.
    #[command(subcommand)]
    Model(ModelCommand),
    /// Theorem checks and certificate re-verification.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Runs pipeline config files.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
    /// Prints a generated system as JSON.
    Generate {
        /// `cantor_fan:N:P` or `circle_accumulation:N`.
        spec: String,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Mode {
    Greedy,
    Exact,
}

#[derive(Subcommand)]
enum ChaosCommand {
    /// Sensitive points at level a.
    Sen {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, default_value_t = 0.5)]
        a: f64,
    },
    /// Horseshoe certificate; writes horseshoe.json.
    Horseshoe {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 3)]
        word_len: usize,
    },
}

#[derive(Subcommand)]
enum ModelCommand {
    /// SFT model of a symbolic lambda; writes model.json.
    Build {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        c: Option<f64>,
        /// Partition scale.
        #[arg(long, default_value_t = 0.25)]
        e: f64,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Re-checks a certificate record.
    Certificate { file: PathBuf },
    /// Conditions for locally maximal sets of zero entropy.
    Thm12 {
        #[command(flatten)]
        sys: SystemArgs,
        /// TOML file with schedule fields (eps, delta, c, e, b, a, ...).
        #[arg(long)]
        schedule: Option<PathBuf>,
    },
    /// Equivalence of the finite chain recurrence conditions.
    Thm11 {
        #[command(flatten)]
        sys: SystemArgs,
    },
    /// Sensitive points of a periodic-everywhere system.
    Appendix {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, default_value_t = 0.5)]
        a: f64,
        #[arg(long, default_value_t = 0.1)]
        r: f64,
    },
}

fn generator(spec: &str) -> Option<GeneratorSpec> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |i: usize| parts.get(i)?.parse::<usize>().ok();
    match parts[0] {
        "cantor_fan" | "cantor-fan" if parts.len() == 3 => Some(GeneratorSpec::CantorFan { n: num(1)?, p: num(2)? }),
        "circle_accumulation" | "circle-accumulation" if parts.len() == 2 => {
            Some(GeneratorSpec::CircleAccumulation { n: num(1)? })
        }
        _ => None,
    }
}

fn system_config(a: &SystemArgs) -> SystemConfig {
    let mut cfg = SystemConfig { max_period: a.max_period, ..Default::default() };
    if let Some(g) = generator(&a.system) {
        cfg.generator = Some(g);
    } else if named_shift(&a.system).is_none() && a.system.ends_with(".json") {
        cfg.file = Some(PathBuf::from(&a.system));
    } else {
        cfg.sft = Some(a.system.clone());
    }
    cfg.lambda = a.lambda.as_ref().map(|l| {
        let states: Option<Vec<usize>> = l.split(',').map(|t| t.trim().parse().ok()).collect();
        match states {
            Some(v) if cfg.sft.is_none() => LambdaSpec::States(v),
            _ => LambdaSpec::Name(l.clone()),
        }
    });
    cfg
}

struct Single {
    analysis: &'static str,
    sys: SystemArgs,
    schedule: Schedules,
}

fn run_single(cli: &Cli, s: Single) -> Result<i32> {
    let cfg = PipelineConfig {
        analyses: vec![s.analysis.to_string()],
        system: system_config(&s.sys),
        schedule: s.schedule,
        out_dir: None,
        tolerance: cli.tolerance,
        seed: cli.seed,
    };
    let out = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from("topodyn-out"));
    let rep = run_config(&cfg, Path::new("."), Some(&out))?;
    print_report(&rep);
    Ok(rep.exit_code())
}

fn print_report(rep: &PipelineReport) {
    for o in &rep.outcomes {
        print!("{}", o.summary);
        for f in &o.files {
            println!("wrote {}", f.display());
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let mut schedule = Schedules::default();
    let single = match &cli.command {
        Command::Chain { sys, delta } => {
            schedule.chain.delta = delta.clone();
            Single { analysis: "chain", sys: sys.clone(), schedule }
        }
        Command::Chaos(ChaosCommand::Sen { sys, a }) => {
            schedule.sen.a = *a;
            Single { analysis: "sen", sys: sys.clone(), schedule }
        }
        Command::Chaos(ChaosCommand::Horseshoe { sys, eps, a, word_len }) => {
            schedule.horseshoe.eps = *eps;
            schedule.horseshoe.a = *a;
            schedule.horseshoe.word_len = *word_len;
            Single { analysis: "horseshoe", sys: sys.clone(), schedule }
        }
        Command::Entropy { sys, r, nmax, mode } => {
            schedule.entropy.r = r.clone();
            schedule.entropy.n_max = *nmax;
            schedule.entropy.mode = match mode {
                Mode::Greedy => ModeName::Greedy,
                Mode::Exact => ModeName::Exact,
            };
            Single { analysis: "entropy", sys: sys.clone(), schedule }
        }
        Command::Model(ModelCommand::Build { sys, n, c, e }) => {
            schedule.model.n = *n;
            schedule.model.c = *c;
            schedule.model.e = *e;
            Single { analysis: "model", sys: sys.clone(), schedule }
        }
        Command::Verify(VerifyCommand::Thm12 { sys, schedule: file }) => {
            if let Some(f) = file {
                let text = std::fs::read_to_string(f)?;
                schedule.thm12 = toml::from_str::<Thm12Schedule>(&text)
                    .map_err(|e| DynError::Parse { line: 0, msg: e.to_string() })?;
            }
            Single { analysis: "thm12", sys: sys.clone(), schedule }
        }
        Command::Verify(VerifyCommand::Thm11 { sys }) => Single { analysis: "thm11", sys: sys.clone(), schedule },
        Command::Verify(VerifyCommand::Appendix { sys, a, r }) => {
            schedule.appendix.a = *a;
            schedule.appendix.r = *r;
            Single { analysis: "appendix", sys: sys.clone(), schedule }
        }
        Command::Verify(VerifyCommand::Certificate { file }) => {
            let text = std::fs::read_to_string(file)?;
            let rec: CertificateRecord =
                serde_json::from_str(&text).map_err(|e| DynError::Parse { line: e.line(), msg: e.to_string() })?;
            rec.verify()?;
            print!("{}", rec.summary());
            println!("certificate verified");
            return Ok(0);
        }
        Command::Run { configs } => {
            let reports = run_pipelines(configs, cli.out_dir.as_deref(), cli.tolerance, cli.seed);
            let mut codes = Vec::new();
            for (path, r) in configs.iter().zip(reports) {
                println!("== {}", path.display());
                match r {
                    Ok(rep) => {
                        print_report(&rep);
                        codes.push(rep.exit_code());
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        codes.push(1);
                    }
                }
            }
            return Ok(combine_exit_codes(codes));
        }
        Command::Generate { spec } => {
            let g = generator(spec).ok_or_else(|| DynError::InvalidArgument(format!("unknown generator `{spec}`")))?;
            let gen = g.generate()?;
            let mut subsets = std::collections::BTreeMap::new();
            if let Some(l) = gen.lambda {
                subsets.insert("lambda".to_string(), l);
            }
            for (name, s) in gen.parts {
                subsets.insert(name, s);
            }
            let json = serde_json::to_string_pretty(&system_file(&gen.system, &subsets))
                .map_err(|e| DynError::InvalidArgument(e.to_string()))?;
            println!("{json}");
            return Ok(0);
        }
    };
    run_single(cli, single)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
