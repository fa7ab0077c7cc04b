//! Command-line surface over the spectrum library.
//!
//! Exit codes: 0 on success or a passing check, 1 when a document fails
//! validation, a computation is refused, or the oracle finds a
//! counterexample, and 2 on usage or I/O errors. Reports go to standard
//! output unless `--out` redirects them.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use specpos::{
    chain_report, check_construction_applicability, render_dot, s_sets, serialize, spec_a,
    spec_a_checked, spectrum_document, validate_minfeasible, verify_chain_theorems, ChainReport,
    Error, GenParams, InstanceDocument, MinfeasiblePartition, Mode, TheoremReport,
    PRNG_ALGORITHM,
};

#[derive(Parser)]
#[command(
    name = "specpos",
    version,
    about = "Validate, compute, and render cardinality-annotated spectrum diagrams"
)]
struct Cli {
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a document: diagram structure and partition minfeasibility.
    Validate { file: PathBuf },
    /// Compute the predicted precompletion spectrum as a document.
    Spectrum {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        /// Compute even when the applicability verdict is not Constructive.
        #[arg(long)]
        force: bool,
    },
    /// Report the S-sets shared by both spectra for an index set.
    Ssets {
        file: PathBuf,
        /// Comma-separated 1-based subcollection indices, e.g. 1,2.
        #[arg(long = "X", value_name = "INDICES")]
        x: String,
    },
    /// Summarize maximal chains; with a partition, verify the chain
    /// conclusions against the computed spectrum.
    Chains { file: PathBuf },
    /// Evaluate the characteristic cases and the applicability verdict.
    Conditions { file: PathBuf },
    /// Emit a diagram in Graphviz DOT form.
    Render {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Dot)]
        format: FormatArg,
        /// Which diagram to draw: the instance or its computed spectrum.
        #[arg(long, value_enum, default_value_t = OfArg::Instance)]
        of: OfArg,
        /// Cardinality mode when drawing the computed spectrum.
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
    },
    /// Cross-check the library against independent oracles on generated
    /// instances; exits 1 on any counterexample.
    Oracle {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of seeded random instances to check.
        #[arg(long, default_value_t = 0)]
        trials: u64,
        /// Also sweep every diagram with at most this many nodes (2..=6),
        /// under every valid partition.
        #[arg(long, value_name = "NODES")]
        exhaustive_upto: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Countable,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Countable => Mode::Countable,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum OfArg {
    Instance,
    SpecA,
}

/// A finished report plus whether it counts as a pass (exit 0) or a
/// failure (exit 1).
struct Outcome {
    report: String,
    ok: bool,
}

impl Outcome {
    fn pass(report: String) -> Self {
        Outcome { report, ok: true }
    }
    fn fail(report: String) -> Self {
        Outcome { report, ok: false }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(outcome) => {
            if let Err(e) = emit(cli.out.as_deref(), &outcome.report) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&Path>, report: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, report)
            .with_context(|| format!("writing report to {}", path.display())),
        None => {
            print!("{report}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

/// Parse a document file. I/O problems are usage-level errors; a document
/// that fails to parse is a validation failure, returned as `Err(report)`.
fn load(file: &Path) -> anyhow::Result<Result<InstanceDocument, Outcome>> {
    let text = fs::read_to_string(file)
        .with_context(|| format!("reading {}", file.display()))?;
    Ok(specpos::parse(&text).map_err(|e| Outcome::fail(format!("invalid: {e}\n"))))
}

fn require_partition(doc: &InstanceDocument) -> anyhow::Result<MinfeasiblePartition> {
    match &doc.partition {
        Some(p) => Ok(p.clone()),
        None => bail!("the document carries no partition"),
    }
}

fn run(command: &Command) -> anyhow::Result<Outcome> {
    match command {
        Command::Validate { file } => validate_cmd(file),
        Command::Spectrum { file, mode, force } => spectrum_cmd(file, (*mode).into(), *force),
        Command::Ssets { file, x } => ssets_cmd(file, x),
        Command::Chains { file } => chains_cmd(file),
        Command::Conditions { file } => conditions_cmd(file),
        Command::Render {
            file,
            format: FormatArg::Dot,
            of,
            mode,
        } => render_cmd(file, *of, (*mode).into()),
        Command::Oracle {
            seed,
            trials,
            exhaustive_upto,
        } => oracle_cmd(*seed, *trials, *exhaustive_upto),
    }
}

fn validate_cmd(file: &Path) -> anyhow::Result<Outcome> {
    let doc = match load(file)? {
        Ok(doc) => doc,
        Err(outcome) => return Ok(outcome),
    };
    let Some(partition) = &doc.partition else {
        return Ok(Outcome::pass(
            "valid: diagram well-formed; no partition present\n".to_string(),
        ));
    };
    let report = match validate_minfeasible(&doc.diagram, partition) {
        Ok(report) => report,
        Err(e) => return Ok(Outcome::fail(format!("invalid: {e}\n"))),
    };
    let mut text = String::new();
    if report.ok() {
        text.push_str("valid: partition is minfeasible\n");
    } else {
        text.push_str("invalid\n");
        for v in &report.violations {
            text.push_str(&format!("violation: {v}\n"));
        }
    }
    for w in &report.warnings {
        text.push_str(&format!("warning: {w}\n"));
    }
    Ok(if report.ok() {
        Outcome::pass(text)
    } else {
        Outcome::fail(text)
    })
}

fn spectrum_cmd(file: &Path, mode: Mode, force: bool) -> anyhow::Result<Outcome> {
    let doc = match load(file)? {
        Ok(doc) => doc,
        Err(outcome) => return Ok(outcome),
    };
    let partition = require_partition(&doc)?;
    match spec_a_checked(
        &doc.diagram,
        &partition,
        doc.characteristic.as_ref(),
        mode,
        force,
    ) {
        Ok(pre) => Ok(Outcome::pass(serialize(&spectrum_document(&pre)))),
        Err(Error::NotConstructive { verdict }) => Ok(Outcome::fail(format!(
            "refused: applicability verdict is {verdict}; pass --force to compute anyway\n"
        ))),
        Err(e) => Ok(Outcome::fail(format!("invalid: {e}\n"))),
    }
}

fn parse_indices(x: &str) -> anyhow::Result<BTreeSet<usize>> {
    let mut out = BTreeSet::new();
    for part in x.split(',') {
        let part = part.trim();
        let i: usize = part
            .parse()
            .with_context(|| format!("index {part:?} is not a positive integer"))?;
        out.insert(i);
    }
    Ok(out)
}

fn ssets_cmd(file: &Path, x: &str) -> anyhow::Result<Outcome> {
    let doc = match load(file)? {
        Ok(doc) => doc,
        Err(outcome) => return Ok(outcome),
    };
    let partition = require_partition(&doc)?;
    let indices = parse_indices(x)?;
    match s_sets(&doc.diagram, &partition, &indices) {
        Ok(report) => Ok(Outcome::pass(json(&report))),
        Err(e @ (Error::EmptyX | Error::XOutOfRange { .. })) => bail!("{e}"),
        Err(e) => Ok(Outcome::fail(format!("invalid: {e}\n"))),
    }
}

#[derive(Serialize)]
struct ChainsOutput {
    chains: ChainReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    theorems: Option<TheoremReport>,
}

fn chains_cmd(file: &Path) -> anyhow::Result<Outcome> {
    let doc = match load(file)? {
        Ok(doc) => doc,
        Err(outcome) => return Ok(outcome),
    };
    let chains = chain_report(&doc.diagram);
    let theorems = match &doc.partition {
        None => None,
        Some(p) => {
            let pre = match spec_a(&doc.diagram, p, Mode::Exact) {
                Ok(pre) => pre,
                Err(e) => return Ok(Outcome::fail(format!("invalid: {e}\n"))),
            };
            Some(verify_chain_theorems(&doc.diagram, p, &pre)?)
        }
    };
    let failed = matches!(
        &theorems,
        Some(t) if matches!(t.verdict, specpos::ChainVerdict::Failed)
    );
    let output = ChainsOutput { chains, theorems };
    Ok(if failed {
        Outcome::fail(json(&output))
    } else {
        Outcome::pass(json(&output))
    })
}

fn conditions_cmd(file: &Path) -> anyhow::Result<Outcome> {
    let doc = match load(file)? {
        Ok(doc) => doc,
        Err(outcome) => return Ok(outcome),
    };
    let partition = require_partition(&doc)?;
    let Some(ch) = &doc.characteristic else {
        bail!("the document carries no characteristic");
    };
    match check_construction_applicability(&doc.diagram, &partition, ch) {
        Ok(app) => Ok(Outcome::pass(json(&app))),
        Err(e) => Ok(Outcome::fail(format!("invalid: {e}\n"))),
    }
}

fn render_cmd(file: &Path, of: OfArg, mode: Mode) -> anyhow::Result<Outcome> {
    let doc = match load(file)? {
        Ok(doc) => doc,
        Err(outcome) => return Ok(outcome),
    };
    match of {
        OfArg::Instance => Ok(Outcome::pass(render_dot(&doc.diagram))),
        OfArg::SpecA => {
            let partition = require_partition(&doc)?;
            match spec_a(&doc.diagram, &partition, mode) {
                Ok(pre) => Ok(Outcome::pass(render_dot(&pre.base))),
                Err(e) => Ok(Outcome::fail(format!("invalid: {e}\n"))),
            }
        }
    }
}

#[derive(Serialize)]
struct OracleRun {
    algorithm: &'static str,
    seed: u64,
    trials_requested: u64,
    /// Random instances actually checked; generation occasionally finds no
    /// valid partition and skips the trial.
    trials_run: u64,
    trials_skipped: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    exhaustive: Option<ExhaustiveSummary>,
    failures: Vec<FailureRecord>,
    passed: bool,
}

#[derive(Serialize)]
struct ExhaustiveSummary {
    max_nodes: usize,
    diagrams: usize,
    instances: usize,
}

#[derive(Serialize)]
struct FailureRecord {
    instance: String,
    section: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

fn oracle_cmd(seed: u64, trials: u64, exhaustive_upto: Option<usize>) -> anyhow::Result<Outcome> {
    if let Some(n) = exhaustive_upto {
        if !(2..=6).contains(&n) {
            bail!("--exhaustive-upto takes 2..=6 nodes, got {n}");
        }
    }
    let modes = [Mode::Exact, Mode::Countable];
    let mut failures = Vec::new();
    let mut trials_run = 0;
    let mut trials_skipped = 0;

    for t in 0..trials {
        let gp = GenParams {
            seed: seed.wrapping_add(t),
            ..GenParams::default()
        };
        let d = specpos::random_diagram(&gp);
        let Some(p) = specpos::random_minfeasible(&d, &gp) else {
            trials_skipped += 1;
            continue;
        };
        trials_run += 1;
        let report = specpos::check_all(&d, &p, &modes);
        if !report.passed {
            record_failures(&mut failures, format!("seed {}", gp.seed), &report);
        }
    }

    let exhaustive = exhaustive_upto.map(|n| {
        let diagrams = specpos::exhaustive_diagrams(n);
        let mut instances = 0;
        for d in &diagrams {
            for p in specpos::all_valid_partitions(d) {
                instances += 1;
                let report = specpos::check_all(d, &p, &modes);
                if !report.passed {
                    let covers: Vec<_> = d.covers().iter().collect();
                    record_failures(
                        &mut failures,
                        format!("diagram covers {covers:?}, partition {p:?}"),
                        &report,
                    );
                }
            }
        }
        ExhaustiveSummary {
            max_nodes: n,
            diagrams: diagrams.len(),
            instances,
        }
    });

    let passed = failures.is_empty();
    let run = OracleRun {
        algorithm: PRNG_ALGORITHM,
        seed,
        trials_requested: trials,
        trials_run,
        trials_skipped,
        exhaustive,
        failures,
        passed,
    };
    let text = json(&run);
    Ok(if passed {
        Outcome::pass(text)
    } else {
        Outcome::fail(text)
    })
}

fn record_failures(
    failures: &mut Vec<FailureRecord>,
    instance: String,
    report: &specpos::PropertyReport,
) {
    for section in report.sections.iter().filter(|s| !s.passed) {
        failures.push(FailureRecord {
            instance: instance.clone(),
            section: section.name.clone(),
            detail: section.detail.clone(),
        });
    }
}
