use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use streammatch::gap::{parse_gap_instance, write_gap_instance, Decision};
use streammatch::gen::{gen_lopsided_interval, GenKind, GenSpec, LopsidedSpec, PlantedAnswer};
use streammatch::harness::{analyze_report, gap_report, parse_seed_range, run_batch, selftest, BatchJob, Mode};
use streammatch::{parse_stream, ArrivalStream, Error, OrderPolicy, PassConfig};

#[derive(Parser)]
#[command(
    name = "streammatch",
    version,
    about = "Multipass water-filling matching experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Out {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Given,
    Random,
    Reverse,
}

impl From<OrderArg> for OrderPolicy {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Given => OrderPolicy::Given,
            OrderArg::Random => OrderPolicy::Random,
            OrderArg::Reverse => OrderPolicy::Reverse,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Float,
    Rational,
}

#[derive(Clone, Copy, ValueEnum)]
enum Expect {
    Yes,
    No,
}

#[derive(Args)]
struct OrderFlags {
    /// Arrival order applied to the stream
    #[arg(long, value_enum, default_value = "given", global = true)]
    order: OrderArg,
    /// Seed for random orders and generators
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Run k passes of water-filling on stream files and report NDJSON
    Run {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, short = 'k', value_parser = clap::value_parser!(u32).range(1..))]
        passes: u32,
        #[arg(long, value_enum, default_value = "float")]
        mode: ModeArg,
        #[command(flatten)]
        order: OrderFlags,
        /// Batch over order seeds a..b (implies --order random unless set)
        #[arg(long)]
        seeds: Option<String>,
        /// Fresh support edges buffered between cycle cancellations
        #[arg(long)]
        cycle_buffer: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        out: Out,
    },
    /// Decide a gap-existence instance
    Gap {
        file: PathBuf,
        /// Defaults to the epsilon stored in the instance
        #[arg(long, value_parser = parse_epsilon)]
        epsilon: Option<f64>,
        /// Fail unless the decision matches
        #[arg(long, value_enum)]
        expect: Option<Expect>,
        #[arg(long, value_enum, default_value = "json")]
        out: Out,
    },
    /// Generate an instance
    Gen {
        #[command(subcommand)]
        kind: GenCommand,
        #[command(flatten)]
        order: OrderFlags,
        /// Generate one file per seed a..b; the output path must contain {seed}
        #[arg(long, global = true)]
        seeds: Option<String>,
        /// Output path, stdout if omitted
        #[arg(long, short = 'o', global = true)]
        output: Option<String>,
    },
    /// Level profile and profile lower bound after k passes
    Analyze {
        file: PathBuf,
        #[arg(long, short = 'k', value_parser = clap::value_parser!(u32).range(1..))]
        passes: u32,
        #[command(flatten)]
        order: OrderFlags,
        /// Fail if the graph has no perfect matching
        #[arg(long)]
        require_perfect: bool,
        #[arg(long, value_enum, default_value = "json")]
        out: Out,
    },
    /// Quick internal consistency battery
    Selftest {
        #[arg(long, value_enum, default_value = "text")]
        out: Out,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Planted perfect matching plus random extra edges
    Planted {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        extra_prob: f64,
    },
    /// u_i adjacent to v_i..v_{n-1}
    UpperTriangular {
        #[arg(long)]
        n: usize,
    },
    /// Phased stress instance with a reserved final block
    Layered {
        #[arg(long)]
        phases: usize,
        #[arg(long)]
        width: usize,
    },
    /// Lop-sided advertiser/impression instance with interval neighborhoods
    Lopsided {
        #[arg(long)]
        advertisers: usize,
        #[arg(long)]
        impressions: u64,
        #[arg(long)]
        max_budget: u32,
        #[arg(long)]
        total_budget: Option<u64>,
        #[arg(long, value_enum, default_value = "yes")]
        answer: AnswerArg,
        #[arg(long, default_value_t = 0.2, value_parser = parse_epsilon)]
        epsilon: f64,
        /// Write explicit neighbor lists instead of intervals
        #[arg(long)]
        explicit: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AnswerArg {
    Yes,
    StrongNo,
}

fn parse_epsilon(s: &str) -> Result<f64, String> {
    let e: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if e > 0.0 && e < 0.5 {
        Ok(e)
    } else {
        Err(format!("epsilon must lie in (0, 0.5), got {e}"))
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Error> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        Ok(std::fs::read(path)?)
    }
}

fn load_stream(path: &Path) -> Result<ArrivalStream, Error> {
    parse_stream(&read_input(path)?).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        e => e,
    })
}

fn emit<T: Serialize>(report: &T) {
    println!("{}", serde_json::to_string(report).expect("reports serialize"));
}

fn emit_text(fields: &serde_json::Value) {
    if let serde_json::Value::Object(map) = fields {
        for (k, v) in map {
            println!("{k}: {v}");
        }
    }
}

fn emit_as<T: Serialize>(out: Out, report: &T) {
    match out {
        Out::Json => emit(report),
        Out::Text => emit_text(&serde_json::to_value(report).expect("reports serialize")),
    }
}

fn write_output(path: Option<&str>, bytes: &[u8]) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("streammatch: {e}");
            match e {
                Error::InvalidConfig(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn dispatch(cmd: Command) -> Result<bool, Error> {
    match cmd {
        Command::Run {
            files,
            passes,
            mode,
            order,
            seeds,
            cycle_buffer,
            out,
        } => {
            let mut cfg = PassConfig::new(passes);
            if let Some(b) = cycle_buffer {
                cfg = cfg.with_cycle_buffer(b);
            }
            let mode = match mode {
                ModeArg::Float => Mode::Float,
                ModeArg::Rational => Mode::Rational,
            };
            let mut policy = OrderPolicy::from(order.order);
            let seeds = match seeds {
                Some(s) => {
                    if policy == OrderPolicy::Given {
                        policy = OrderPolicy::Random;
                    }
                    parse_seed_range(&s)?
                }
                None => order.seed..order.seed + 1,
            };
            let mut jobs = Vec::new();
            for f in &files {
                let base = load_stream(f)?;
                for seed in seeds.clone() {
                    jobs.push(BatchJob {
                        source: f.display().to_string(),
                        seed: (policy == OrderPolicy::Random).then_some(seed),
                        stream: base.clone().reordered(policy, seed),
                    });
                }
            }
            let mut ok = true;
            for r in run_batch(jobs, &cfg, mode)? {
                let r = r?;
                ok &= r.passed();
                emit_as(out, &r);
            }
            Ok(ok)
        }
        Command::Gap {
            file,
            epsilon,
            expect,
            out,
        } => {
            let inst = parse_gap_instance(&read_input(&file)?)?;
            let eps = epsilon.unwrap_or(inst.epsilon);
            parse_epsilon(&eps.to_string()).map_err(Error::InvalidConfig)?;
            let expect = expect.map(|e| match e {
                Expect::Yes => Decision::Yes,
                Expect::No => Decision::No,
            });
            let mut r = gap_report(&inst, eps, expect)?;
            r.source = Some(file.display().to_string());
            if out == Out::Text {
                println!("{}", r.decision());
            }
            emit_as(out, &r);
            Ok(r.passed())
        }
        Command::Gen {
            kind,
            order,
            seeds,
            output,
        } => {
            let seeds = match &seeds {
                Some(s) => {
                    if !output.as_deref().is_some_and(|o| o.contains("{seed}")) {
                        return Err(Error::InvalidConfig(
                            "--seeds needs an output path containing {seed}".into(),
                        ));
                    }
                    parse_seed_range(s)?
                }
                None => order.seed..order.seed + 1,
            };
            for seed in seeds {
                let path = output.as_ref().map(|o| o.replace("{seed}", &seed.to_string()));
                let bytes = generate(&kind, order.order.into(), seed)?;
                write_output(path.as_deref(), &bytes)?;
            }
            Ok(true)
        }
        Command::Analyze {
            file,
            passes,
            order,
            require_perfect,
            out,
        } => {
            let s = load_stream(&file)?.reordered(order.order.into(), order.seed);
            let mut r = analyze_report(&s, passes, require_perfect)?;
            r.source = Some(file.display().to_string());
            if let Some(w) = &r.warning {
                eprintln!("warning: {w}");
            }
            emit_as(out, &r);
            Ok(r.passed())
        }
        Command::Selftest { out } => {
            let r = selftest()?;
            match out {
                Out::Json => emit(&r),
                Out::Text => {
                    for c in &r.checks {
                        println!("{} {}", if c.passed { "ok  " } else { "FAIL" }, c.name);
                    }
                }
            }
            Ok(r.passed())
        }
    }
}

fn generate(kind: &GenCommand, order: OrderPolicy, seed: u64) -> Result<Vec<u8>, Error> {
    let gen_kind = match *kind {
        GenCommand::Planted { n, extra_prob } => GenKind::Planted { n, extra_prob },
        GenCommand::UpperTriangular { n } => GenKind::UpperTriangular { n },
        GenCommand::Layered { phases, width } => GenKind::LayeredAdversarial { phases, width },
        GenCommand::Lopsided {
            advertisers,
            impressions,
            max_budget,
            total_budget,
            answer,
            epsilon,
            explicit,
        } => {
            let spec = LopsidedSpec {
                total_budget,
                answer: match answer {
                    AnswerArg::Yes => PlantedAnswer::Yes,
                    AnswerArg::StrongNo => PlantedAnswer::StrongNo,
                },
                epsilon,
                explicit,
                ..LopsidedSpec::new(advertisers, impressions, max_budget, seed)
            };
            let g = gen_lopsided_interval(&spec)?;
            let mut out = format!("# lopsided answer={:?} seed={seed}\n", g.answer).into_bytes();
            out.extend(write_gap_instance(&g.instance));
            return Ok(out);
        }
    };
    Ok(GenSpec {
        kind: gen_kind,
        seed,
        order,
    }
    .generate()?
    .to_text())
}
