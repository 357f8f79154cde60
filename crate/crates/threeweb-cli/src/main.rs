//! `threeweb`: classify three-webs W(3,2,2), run the reference corpus, print the table.
//!
//! Exit codes: 0 success, 1 error or table mismatch, 2 inconclusive or parameter-dependent.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use threeweb::corpus::{self, golden_check, GoldenOutcome};
use threeweb::expr::Bindings;
use threeweb::report::ReportDocument;
use threeweb::{classify, parse_web, snapshot, SamplerConfig, WebDefinition};

#[derive(Parser)]
#[command(name = "threeweb", version, about = "Differential invariants and classification of three-webs W(3,2,2)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify webs given as DSL files.
    Classify {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        opts: Opts,
        /// Override a declared parameter; fixes the binding instead of sampling it.
        #[arg(long = "param", value_name = "NAME=VALUE", value_parser = parse_binding)]
        params: Vec<(String, f64)>,
    },
    /// Classify every reference web and check its golden values.
    Corpus {
        #[command(flatten)]
        opts: Opts,
    },
    /// Reproduce the classification table and diff it against the reference.
    Table {
        #[command(flatten)]
        opts: Opts,
    },
    /// Print every tensor of the pipeline at one point.
    Snapshot {
        input: PathBuf,
        #[arg(long, num_args = 4, value_names = ["X1", "X2", "Y1", "Y2"], allow_negative_numbers = true, required = true)]
        at: Vec<f64>,
        #[arg(long = "param", value_name = "NAME=VALUE", value_parser = parse_binding)]
        params: Vec<(String, f64)>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args)]
struct Opts {
    /// Sample points per web.
    #[arg(long, default_value_t = 64)]
    points: usize,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Sampling box for every coordinate.
    #[arg(long = "box", num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, default_values_t = [-3.0, 3.0])]
    bounds: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl Opts {
    fn config(&self) -> SamplerConfig {
        SamplerConfig { points: self.points, tol: self.tol, seed: self.seed, lo: self.bounds[0], hi: self.bounds[1], ..SamplerConfig::default() }
    }
}

fn parse_binding(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("bad value in `{s}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Status {
    Ok,
    Inconclusive,
    Error,
}

impl Status {
    fn code(self) -> ExitCode {
        match self {
            Status::Ok => ExitCode::SUCCESS,
            Status::Error => ExitCode::from(1),
            Status::Inconclusive => ExitCode::from(2),
        }
    }
}

fn load(path: &Path, params: &[(String, f64)]) -> Result<WebDefinition, String> {
    let src = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => format!("{}: file not found", path.display()),
        _ => format!("{}: {e}", path.display()),
    })?;
    let web = parse_web(&src).map_err(|e| format!("{}: {e}", path.display()))?;
    let overrides: Bindings = params.iter().cloned().collect();
    web.with_params(&overrides).map_err(|e| format!("{}: {e}", path.display()))
}

fn classify_one(path: &Path, cfg: &SamplerConfig, params: &[(String, f64)]) -> Result<ReportDocument, String> {
    let web = load(path, params)?;
    let report = classify(&web, cfg, !params.is_empty()).map_err(|e| format!("{}: {e}", path.display()))?;
    let doc = ReportDocument::new(&web, cfg, report);
    // a file that is one of the reference webs gets its metadata attached
    let entry = corpus::all().into_iter().find(|e| params.is_empty() && e.web == web);
    Ok(match entry {
        Some(e) => {
            let golden = golden_check(&e, snapshot);
            doc.with_corpus(&e, golden)
        }
        None => doc,
    })
}

fn doc_status(d: &ReportDocument) -> Status {
    if d.inconclusive || d.parameter_dependent {
        Status::Inconclusive
    } else {
        Status::Ok
    }
}

fn cmd_classify(inputs: &[PathBuf], opts: &Opts, params: &[(String, f64)]) -> Status {
    let cfg = opts.config();
    let mut status = Status::Ok;
    let mut docs = Vec::new();
    for path in inputs {
        match classify_one(path, &cfg, params) {
            Ok(d) => {
                status = status.max(doc_status(&d));
                docs.push(d);
            }
            Err(e) => {
                eprintln!("error: {e}");
                status = Status::Error;
            }
        }
    }
    match opts.format {
        Format::Json if docs.len() == 1 => println!("{}", docs[0].to_json()),
        Format::Json => println!("{}", serde_json::to_string_pretty(&docs).expect("reports serialize")),
        Format::Text => {
            for (i, d) in docs.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                print!("{}", d.to_text());
            }
        }
    }
    status
}

fn cmd_corpus(opts: &Opts) -> Status {
    let cfg = opts.config();
    let mut status = Status::Ok;
    let mut docs = Vec::new();
    for e in corpus::all() {
        let golden = golden_check(&e, snapshot);
        if golden.iter().any(|g| g.outcome == GoldenOutcome::Fail) {
            status = Status::Error;
        }
        match classify(&e.web, &cfg, false) {
            Ok(r) => {
                let d = ReportDocument::new(&e.web, &cfg, r).with_corpus(&e, golden);
                status = status.max(doc_status(&d));
                docs.push(d);
            }
            Err(err) => {
                eprintln!("example {}: {err}", e.index);
                status = Status::Error;
            }
        }
    }
    match opts.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&docs).expect("reports serialize")),
        Format::Text => {
            for d in &docs {
                let golden = d.golden.as_deref().unwrap_or_default();
                let count = |o: &GoldenOutcome| golden.iter().filter(|g| &g.outcome == o).count();
                println!(
                    "example {:>2}  {:<22} golden {:>3} pass {} fail {:>3} logged{}",
                    d.web.example.unwrap_or_default(),
                    d.labels.join(" "),
                    count(&GoldenOutcome::Pass),
                    count(&GoldenOutcome::Fail),
                    count(&GoldenOutcome::LoggedDiscrepancy),
                    if d.inconclusive { "  inconclusive" } else { "" },
                );
            }
        }
    }
    status
}

fn cmd_table(opts: &Opts) -> Status {
    let cfg = opts.config();
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return Status::Error;
    }
    let table = threeweb::table::compute(&cfg);
    match opts.format {
        Format::Json => println!("{}", table.to_json()),
        Format::Text => print!("{}", table.to_text()),
    }
    if !table.diffs.is_empty() {
        Status::Error
    } else if table.inconclusive() {
        Status::Inconclusive
    } else {
        Status::Ok
    }
}

fn cmd_snapshot(input: &Path, at: &[f64], params: &[(String, f64)], format: Format) -> Status {
    let point = [at[0], at[1], at[2], at[3]];
    let s = match load(input, params).and_then(|w| snapshot(&w, point).map_err(|e| e.to_string())) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return Status::Error;
        }
    };
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&s).expect("snapshot serializes")),
        Format::Text => {
            println!("point {:?}", s.point);
            println!("fbar {:?}", s.fbar);
            println!("ftilde {:?}", s.ftilde);
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        println!("gamma^{}_{}{} = {}", i + 1, j + 1, k + 1, s.gamma[i][j][k]);
                    }
                }
            }
            println!("a = {:?}", s.a);
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        for l in 0..2 {
                            println!("b^{}_{}{}{} = {}", i + 1, j + 1, k + 1, l + 1, s.b[i][j][k][l]);
                        }
                    }
                }
            }
            for (name, m) in [("p", &s.p), ("q", &s.q), ("f", &s.f), ("g", &s.g), ("h", &s.h)] {
                println!("{name} = {m:?}");
            }
            if s.non_isoclinic {
                println!("p or q is not symmetric: f, g, h are formal");
            }
        }
    }
    Status::Ok
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match &cli.command {
        Command::Classify { inputs, opts, params } => cmd_classify(inputs, opts, params),
        Command::Corpus { opts } => cmd_corpus(opts),
        Command::Table { opts } => cmd_table(opts),
        Command::Snapshot { input, at, params, format } => cmd_snapshot(input, at, params, *format),
    };
    status.code()
}
