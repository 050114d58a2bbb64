use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ks_qutrit::campaign::{
    emit_tables, run_campaign, summary_text, verify_identities_with, Campaign, CampaignError,
    CampaignFile, ResultBundle,
};
use ks_qutrit::oracle::summarize;
use ks_qutrit::qutrit::{yu_oh_graph, yu_oh_rays, Ray};

const EXIT_CONFIG: u8 = 1;
const EXIT_IDENTITY: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ks-qutrit",
    version,
    about = "State-independent Kochen-Specker test on a simulated photonic qutrit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the operator identities, edge count and classical bounds.
    Verify {
        /// Replace a ray before checking, e.g. `--ray h0=1,1,0`.
        #[arg(long = "ray", value_name = "LABEL=X,Y,Z")]
        rays: Vec<String>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run a simulated measurement campaign and write all tables.
    Run(RunArgs),
    /// Rewrite the tables from a saved bundle.json.
    Tables {
        /// Bundle to read; defaults to `<out>/bundle.json`.
        #[arg(long)]
        bundle: Option<PathBuf>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Exhaustive noncontextual bounds.
    Oracle {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Comma-separated presets: psi1..psi7, rho8, rho9.
    #[arg(long)]
    states: Option<String>,
    /// Mean heralds per setting.
    #[arg(long)]
    heralds: Option<f64>,
    /// Per-path detection efficiency in (0, 1]
    #[arg(long)]
    efficiency: Option<f64>,
    /// Master seed (default 1729)
    #[arg(long)]
    seed: Option<u64>,
    /// Leave three-fold counts out of the correlation estimator.
    #[arg(long)]
    zero_triples: bool,
    /// Measure the eight y-h correlations directly instead of by basis exchange.
    #[arg(long)]
    direct_h_correlations: bool,
    /// Output directory (default results)
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config; fields present there override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl RunArgs {
    fn campaign(&self) -> Result<Campaign, CampaignError> {
        let mut c = Campaign::default();
        if let Some(s) = &self.states {
            c.states = Campaign::parse_state_list(s)?;
        }
        if let Some(v) = self.heralds {
            c.mean_heralds = v;
        }
        if let Some(v) = self.efficiency {
            c.efficiency = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        c.zero_triple_counts = self.zero_triples;
        c.direct_h_correlations = self.direct_h_correlations;
        if let Some(v) = &self.out {
            c.output_dir = v.clone();
        }
        if let Some(path) = &self.config {
            CampaignFile::load(path)?.apply(&mut c);
        }
        c.validate()?;
        Ok(c)
    }
}

fn parse_ray(spec: &str) -> Result<Ray, String> {
    let (label, comps) = spec
        .split_once('=')
        .ok_or_else(|| format!("expected LABEL=X,Y,Z, got {spec:?}"))?;
    let v: Vec<i64> = comps
        .split(',')
        .map(|x| x.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("bad component in {spec:?}: {e}"))?;
    let comps: [i64; 3] = v
        .try_into()
        .map_err(|_| format!("expected three components in {spec:?}"))?;
    Ok(Ray::new(label.trim(), comps))
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_CONFIG)
}

fn verify(overrides: &[String], json: bool) -> ExitCode {
    let mut rays = yu_oh_rays();
    for spec in overrides {
        let ray = match parse_ray(spec) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        match rays.iter_mut().find(|r| r.label == ray.label) {
            Some(slot) => *slot = ray,
            None => return fail(format!("unknown ray label {:?}", ray.label)),
        }
    }
    let report = verify_identities_with(&rays);
    if json {
        match serde_json::to_string_pretty(&report) {
            Ok(s) => println!("{s}"),
            Err(e) => return fail(e),
        }
    } else {
        print!("{report}");
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        for c in report.failures() {
            eprintln!("identity failed: {}", c.name);
        }
        ExitCode::from(EXIT_IDENTITY)
    }
}

fn run(args: &RunArgs) -> ExitCode {
    let result = args.campaign().and_then(|c| {
        let bundle = run_campaign(&c)?;
        let files = emit_tables(&bundle, &c.output_dir)?;
        Ok((bundle, files.len(), c.output_dir))
    });
    match result {
        Ok((bundle, n, dir)) => {
            print!("{}", summary_text(&bundle));
            println!("wrote {n} files to {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn tables(bundle: Option<PathBuf>, out: PathBuf) -> ExitCode {
    let path = bundle.unwrap_or_else(|| out.join("bundle.json"));
    let result = std::fs::read_to_string(&path)
        .map_err(|e| CampaignError::Config(format!("cannot read {}: {e}", path.display())))
        .and_then(|text| ResultBundle::from_json(&text))
        .and_then(|b| emit_tables(&b, &out));
    match result {
        Ok(files) => {
            println!("wrote {} files to {}", files.len(), out.display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn oracle(json: bool) -> ExitCode {
    let summary = match summarize(&yu_oh_graph()) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    if json {
        match serde_json::to_string_pretty(&summary) {
            Ok(s) => println!("{s}"),
            Err(e) => return fail(e),
        }
    } else {
        print!("{}", summary.to_table());
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Verify { rays, json } => verify(&rays, json),
        Command::Run(args) => run(&args),
        Command::Tables { bundle, out } => tables(bundle, out),
        Command::Oracle { json } => oracle(json),
    }
}
