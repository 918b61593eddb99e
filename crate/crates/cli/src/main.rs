//! `tfm`: batch driver for the twisted first moment experiments.
//!
//! Every run prints its CSV to stdout, writes `<out_dir>/<command>.csv` and a
//! manifest `<out_dir>/<command>.manifest`, and exits with status 1 when any
//! reported number is not certified.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use commands::{parse_weights, Outcome};
use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "tfm", version, about = "Twisted first moment verification driver")]
struct Cli {
    /// key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Output directory for CSV files and manifests.
    #[arg(long, global = true)]
    out: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Harmonic weights from the Petersson formula, checked on held-out pairs.
    TraceCheck {
        #[arg(long, default_value = "12,16,18,20,22,26,24,28,32,36")]
        k: String,
    },
    /// Central values L(f x g, 1/2) for every eigenform of weight k under
    /// several G and contour choices.
    Afe {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        g: Option<String>,
        #[arg(long, default_value = "0.5,1,2")]
        cg: String,
        /// Contour abscissae; `auto` picks the saddle per argument.
        #[arg(long, default_value = "auto")]
        sigma: String,
    },
    /// A single Kloosterman sum. Elements of a quadratic field are `a,b` for
    /// a + b omega.
    Kloosterman {
        #[arg(long)]
        field: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        #[arg(long, allow_hyphen_values = true)]
        n: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
    },
    /// Right-hand side of the Petersson formula.
    #[command(alias = "rhs")]
    RhsNf {
        #[arg(long)]
        field: Option<String>,
        /// One weight over Q, `k1,k2` over a quadratic field.
        #[arg(long)]
        k: String,
        #[arg(long, default_value = "1")]
        nu: String,
        #[arg(long, default_value = "1")]
        xi: String,
        #[arg(long)]
        cmax: Option<String>,
        /// Unit height bound, a number or `eps^t`.
        #[arg(long = "B")]
        b: Option<String>,
    },
    /// Partial sums of the totally positive unit series with tail bounds.
    Units {
        #[arg(long)]
        field: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        lambda0: f64,
        #[arg(long, default_value = "eps^0,eps^4,eps^8,eps^12,eps^16,eps^20")]
        heights: String,
    },
    /// One moment report: LHS, M, E and the recovered coefficient.
    Moment {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1)]
        p: u64,
        #[arg(long)]
        g: Option<String>,
    },
    /// Moment reports over a weight range with the fit A log k + B.
    Scan {
        /// `lo:hi:step` or a comma list.
        #[arg(long, default_value = "14:60:2")]
        k: String,
        #[arg(long, default_value_t = 1)]
        p: u64,
        #[arg(long)]
        g: Option<String>,
    },
    /// Recover C_g(p) from the moment and optionally pick the closest of
    /// several candidate forms.
    Recover {
        #[arg(long, default_value = "20,30")]
        k: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        g: Option<String>,
        /// Comma separated newform files.
        #[arg(long, default_value = "")]
        candidates: String,
    },
    /// Write an eigenform of level one to a newform file.
    Newform {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 20000)]
        len: usize,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long = "file")]
        file: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::TraceCheck { .. } => "trace-check",
            Command::Afe { .. } => "afe",
            Command::Kloosterman { .. } => "kloosterman",
            Command::RhsNf { .. } => "rhs-nf",
            Command::Units { .. } => "units",
            Command::Moment { .. } => "moment",
            Command::Scan { .. } => "scan",
            Command::Recover { .. } => "recover",
            Command::Newform { .. } => "newform",
        }
    }

    /// Flags that shadow configuration keys.
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut v = Vec::new();
        let mut put = |key, val: &Option<String>| {
            if let Some(x) = val {
                v.push((key, x.clone()));
            }
        };
        match self {
            Command::Afe { g, .. } | Command::Moment { g, .. } | Command::Scan { g, .. } | Command::Recover { g, .. } => {
                put("g", g)
            }
            Command::Kloosterman { field, .. } | Command::Units { field, .. } => put("field", field),
            Command::RhsNf { field, cmax, b, .. } => {
                put("field", field);
                put("cmax", cmax);
                put("unit_height", b);
            }
            Command::TraceCheck { .. } | Command::Newform { .. } => {}
        }
        v
    }
}

fn build_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    for pair in &cli.set {
        cfg.set_pair(pair)?;
    }
    if let Some(o) = &cli.out {
        cfg.set("out_dir", o)?;
    }
    for (k, v) in cli.command.overrides() {
        cfg.set(k, &v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect()
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Outcome> {
    match cmd {
        Command::TraceCheck { k } => commands::trace_check(cfg, &parse_weights(k)?),
        Command::Afe { k, cg, sigma, .. } => {
            let cgs = split_list(cg).iter().map(|x| x.parse::<f64>()).collect::<std::result::Result<Vec<_>, _>>()?;
            let sigmas = split_list(sigma)
                .iter()
                .map(|x| if x == "auto" { Ok(None) } else { x.parse::<f64>().map(Some) })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            commands::afe(cfg, *k, &cgs, &sigmas)
        }
        Command::Kloosterman { m, n, c, .. } => commands::kloosterman(cfg, m, n, c),
        Command::RhsNf { k, nu, xi, .. } => commands::rhs_nf(cfg, k, nu, xi),
        Command::Units { lambda0, heights, .. } => commands::units(cfg, *lambda0, &split_list(heights)),
        Command::Moment { k, p, .. } => commands::moment(cfg, *k, *p),
        Command::Scan { k, p, .. } => commands::scan(cfg, &parse_weights(k)?, *p),
        Command::Recover { k, p, candidates, .. } => commands::recover(cfg, &parse_weights(k)?, *p, &split_list(candidates)),
        Command::Newform { k, len, index, file } => commands::newform(cfg, *k, *len, *index, file),
    }
}

fn manifest(name: &str, cfg: &RunConfig, outcome: Option<&Outcome>, status: &str) -> String {
    let mut s = String::new();
    s.push_str(&format!("command = {name}\n"));
    s.push_str(&format!("tfm-cli = {}\n", env!("CARGO_PKG_VERSION")));
    s.push_str(&format!("tfm-core = {}\n", tfm::VERSION));
    s.push_str(&format!("parallel_feature = {}\n", cfg!(feature = "parallel")));
    s.push_str(&format!("status = {status}\n"));
    s.push_str("\n[config]\n");
    s.push_str(&cfg.echo());
    if let Some(o) = outcome {
        s.push_str("\n[certificates]\n");
        for c in &o.certificates {
            s.push_str(c);
            s.push('\n');
        }
        if !o.notes.is_empty() {
            s.push_str("\n[notes]\n");
            for n in &o.notes {
                s.push_str(n);
                s.push('\n');
            }
        }
    }
    s
}

fn write_artifacts(name: &str, cfg: &RunConfig, outcome: Option<&Outcome>, status: &str) -> Result<()> {
    let dir = cfg.out_dir();
    std::fs::create_dir_all(&dir)?;
    if let Some(o) = outcome {
        std::fs::write(dir.join(format!("{name}.csv")), &o.csv)?;
    }
    std::fs::write(dir.join(format!("{name}.manifest")), manifest(name, cfg, outcome, status))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    match dispatch(&cli.command, &cfg) {
        Ok(outcome) => {
            print!("{}", outcome.csv);
            for n in &outcome.notes {
                eprintln!("{n}");
            }
            let status = match &outcome.failure {
                None => "certified".to_string(),
                Some(f) => format!("uncertified: {f}"),
            };
            if let Err(e) = write_artifacts(name, &cfg, Some(&outcome), &status) {
                eprintln!("error: writing artifacts: {e:#}");
                return ExitCode::FAILURE;
            }
            match outcome.failure {
                None => ExitCode::SUCCESS,
                Some(f) => {
                    eprintln!("uncertified: {f}");
                    ExitCode::FAILURE
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let _ = write_artifacts(name, &cfg, None, &format!("error: {e:#}"));
            ExitCode::FAILURE
        }
    }
}
