//! The `squatlab` command line.
//!
//! Exit codes: 0 when everything ran and nothing was flagged, 2 when
//! `analyze` flagged at least one domain, 1 on any operational error
//! (including usage errors).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::detector::{Detector, DetectorConfig, Technique};
use crate::domain::{parse_domain, ConfusableTable, Domain, SuffixRules};
use crate::evaluator::{
    compare, compare_paired, evaluate, format_optional_percent, EvalMetrics, EvalReport, HeuristicEngine, PairedRow,
};
use crate::gateway::{EndpointConfig, LlmClient};
use crate::generator::{load_dataset, save_dataset, BuildOptions, Generator, DEFAULT_LEGIT_FRACTION};
use crate::index::ReferenceIndex;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FLAGGED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "squatlab", version, about = "Typosquatting detection, dataset synthesis and evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check candidate domains against a reference list.
    Analyze(AnalyzeArgs),
    /// Synthesize a labeled JSONL dataset from a brand list.
    Generate(GenerateArgs),
    /// Score a classifier on a labeled dataset.
    Eval(EvalArgs),
    /// Render evaluation reports as a comparison table.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct DetectorArgs {
    /// Reference domains, one per line.
    #[arg(long)]
    pub refs: PathBuf,
    /// Detector config (`key = value` lines).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Public-suffix style list, one suffix per line.
    #[arg(long)]
    pub suffixes: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Domains to check.
    pub domains: Vec<String>,
    /// Read further domains from a file, one per line.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[command(flatten)]
    pub detector: DetectorArgs,
    /// One JSON report per line instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Brand domains, one per line.
    #[arg(long)]
    pub brands: PathBuf,
    /// Comma-separated techniques; all eight when omitted.
    #[arg(long, value_delimiter = ',')]
    pub techniques: Vec<Technique>,
    #[arg(long, default_value_t = 20)]
    pub per_brand: usize,
    /// Label-false share of the dataset, capped by the available pool.
    #[arg(long, default_value_t = DEFAULT_LEGIT_FRACTION)]
    pub legit_fraction: f64,
    /// Extra legitimate domains for label-false rows.
    #[arg(long)]
    pub legit: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
    /// Print the manifest as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Heuristic,
    Llm,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value_t = Engine::Heuristic)]
    pub engine: Engine,
    /// Reference list (heuristic engine).
    #[arg(long)]
    pub refs: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub suffixes: Option<PathBuf>,
    /// Chat-completion base URL (llm engine).
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long, default_value = "default")]
    pub model: String,
    #[arg(long, default_value_t = 4)]
    pub max_concurrent: usize,
    #[arg(long, default_value_t = 3)]
    pub max_retries: u32,
    /// Per-request timeout in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,
    /// Name shown in reports; defaults to the engine or model.
    #[arg(long)]
    pub name: Option<String>,
    /// Write the report JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Report JSON files, in row order. With `--paired`, alternating
    /// prompt-only and tuned reports.
    pub reports: Vec<PathBuf>,
    #[arg(long)]
    pub paired: bool,
    /// JSON array of ready-made paired rows.
    #[arg(long, conflicts_with = "paired")]
    pub rows: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

type CliResult<T> = Result<T, String>;

fn err<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> String + '_ {
    move |e| format!("{context}: {e}")
}

fn read_domain_lines(path: &Path) -> CliResult<Vec<String>> {
    let text = fs::read_to_string(path).map_err(err(&path.display().to_string()))?;
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

fn load_detector(
    refs: &Path,
    config: Option<&Path>,
    suffixes: Option<&Path>,
) -> CliResult<(ReferenceIndex, DetectorConfig)> {
    let config = match config {
        Some(p) => DetectorConfig::from_file(p).map_err(err(&p.display().to_string()))?,
        None => DetectorConfig::default(),
    };
    let table = match &config.confusables {
        Some(p) => ConfusableTable::bundled_with_file(p).map_err(err(&p.display().to_string()))?,
        None => ConfusableTable::bundled(),
    };
    let rules = match suffixes {
        Some(p) => Some(SuffixRules::from_file(p).map_err(err(&p.display().to_string()))?),
        None => None,
    };
    let index = ReferenceIndex::from_file(refs, table, rules).map_err(err(&refs.display().to_string()))?;
    Ok((index, config))
}

fn json_line<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    let s = serde_json::to_string(value).map_err(err("serializing"))?;
    writeln!(out, "{s}").map_err(err("writing output"))
}

fn cmd_analyze(a: &AnalyzeArgs, out: &mut dyn Write, errout: &mut dyn Write) -> CliResult<i32> {
    let (index, config) =
        load_detector(&a.detector.refs, a.detector.config.as_deref(), a.detector.suffixes.as_deref())?;
    let mut inputs = a.domains.clone();
    if let Some(f) = &a.file {
        inputs.extend(read_domain_lines(f)?);
    }
    if inputs.is_empty() {
        return Err("no domains given".into());
    }
    let detector = Detector::new(&index, &config);
    let mut flagged = false;
    let mut failed = false;
    if !a.json {
        let _ = writeln!(out, "domain\tverdict\ttechnique\treference\tscore");
    }
    for raw in &inputs {
        let domain = match parse_domain(raw, index.suffix_rules()) {
            Ok(d) => d,
            Err(e) => {
                let _ = writeln!(errout, "skipping {raw:?}: {e}");
                failed = true;
                continue;
            }
        };
        let report = detector.analyze(&domain);
        flagged |= report.verdict;
        if a.json {
            json_line(out, &report)?;
        } else {
            let (t, r, s) = match report.matches.first() {
                Some(m) => (m.technique.to_string(), m.reference.unicode(), format!("{:.3}", m.score)),
                None => ("-".into(), "-".into(), "-".into()),
            };
            let _ = writeln!(out, "{}\t{}\t{t}\t{r}\t{s}", domain.unicode(), report.verdict);
        }
    }
    Ok(if failed {
        EXIT_ERROR
    } else if flagged {
        EXIT_FLAGGED
    } else {
        EXIT_OK
    })
}

fn parse_domains(lines: &[String], what: &str) -> CliResult<Vec<Domain>> {
    lines.iter().map(|l| parse_domain(l, None).map_err(|e| format!("{what} {l:?}: {e}"))).collect()
}

fn cmd_generate(a: &GenerateArgs, out: &mut dyn Write) -> CliResult<i32> {
    let brands = parse_domains(&read_domain_lines(&a.brands)?, "brand")?;
    if brands.is_empty() {
        return Err(format!("{}: no brands", a.brands.display()));
    }
    let legit_domains = match &a.legit {
        Some(p) => parse_domains(&read_domain_lines(p)?, "legit domain")?,
        None => Vec::new(),
    };
    let opts = BuildOptions {
        techniques: a.techniques.clone(),
        per_brand: a.per_brand,
        legit_fraction: a.legit_fraction,
        seed: a.seed,
        legit_domains,
        threads: a.threads,
    };
    let dataset = Generator::default().build_dataset(&brands, &opts).map_err(err("generate"))?;
    save_dataset(&dataset, &a.out).map_err(err(&a.out.display().to_string()))?;
    let m = &dataset.manifest;
    if a.json {
        json_line(out, m)?;
    } else {
        let _ = writeln!(out, "wrote {} rows to {}", m.counts.rows, a.out.display());
        let _ = writeln!(out, "positives {}  negatives {}  seed {}", m.counts.positives, m.counts.negatives, a.seed);
        for (t, n) in &m.counts.by_technique {
            let _ = writeln!(out, "  {t:<18} {n}");
        }
        if let Some(req) = m.negatives_requested {
            if req > m.counts.negatives {
                let _ = writeln!(out, "negatives requested {req}, pool allowed {}", m.counts.negatives);
            }
        }
        if !m.skipped.is_empty() {
            let _ = writeln!(out, "skipped {} variant(s); see manifest", m.skipped.len());
        }
    }
    Ok(EXIT_OK)
}

fn print_metrics(out: &mut dyn Write, report: &EvalReport, m: &EvalMetrics) {
    let _ = write!(out, "{}", compare(std::slice::from_ref(report)));
    let c = m.confusion;
    let _ = writeln!(
        out,
        "rows {}  tp {}  fp {}  tn {}  fn {}  non-conforming {}",
        m.total(),
        c.tp,
        c.fp,
        c.tn,
        c.fn_,
        m.non_conforming()
    );
    let _ = writeln!(
        out,
        "precision {}  recall {}  f1 {}  specificity {}",
        format_optional_percent(m.precision()),
        format_optional_percent(m.recall()),
        format_optional_percent(m.f1()),
        format_optional_percent(m.specificity()),
    );
    for (t, r) in &m.per_technique {
        let _ =
            writeln!(out, "  {t:<18} recall {} ({}/{})", format_optional_percent(r.recall()), r.detected, r.positives);
    }
}

fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> CliResult<i32> {
    let dataset = load_dataset(&a.dataset).map_err(err(&a.dataset.display().to_string()))?;
    if dataset.is_empty() {
        return Err(format!("{}: dataset is empty", a.dataset.display()));
    }
    let (metrics, default_name) = match a.engine {
        Engine::Heuristic => {
            let refs = a.refs.as_deref().ok_or("--refs is required for the heuristic engine")?;
            let (index, config) = load_detector(refs, a.config.as_deref(), a.suffixes.as_deref())?;
            let engine = HeuristicEngine::new(index, config);
            (evaluate(&engine, &dataset).map_err(err("eval"))?, "heuristic".to_string())
        }
        Engine::Llm => {
            let endpoint = a.endpoint.clone().ok_or("--endpoint is required for the llm engine")?;
            if !(a.timeout > 0.0 && a.timeout.is_finite()) {
                return Err("--timeout must be positive".into());
            }
            let config = EndpointConfig {
                max_concurrent: a.max_concurrent,
                max_retries: a.max_retries,
                timeout: Duration::from_secs_f64(a.timeout),
                ..EndpointConfig::new(endpoint, a.model.clone())
            };
            let client = LlmClient::new(config).map_err(err("endpoint"))?;
            // A reachability probe: a transport failure here fails the run
            // instead of scoring every row as non-conforming.
            client.classify_domain(&dataset.examples[0].domain).map_err(err("endpoint"))?;
            (evaluate(&client, &dataset).map_err(err("eval"))?, a.model.clone())
        }
    };
    let report = EvalReport::new(a.name.clone().unwrap_or(default_name), &metrics);
    if let Some(p) = &a.out {
        let s = serde_json::to_string_pretty(&report).map_err(err("serializing"))?;
        fs::write(p, s + "\n").map_err(err(&p.display().to_string()))?;
    }
    if a.json {
        json_line(out, &report)?;
    } else {
        print_metrics(out, &report, &metrics);
    }
    Ok(EXIT_OK)
}

fn read_report(path: &Path) -> CliResult<EvalReport> {
    let text = fs::read_to_string(path).map_err(err(&path.display().to_string()))?;
    serde_json::from_str(&text).map_err(err(&path.display().to_string()))
}

fn cmd_compare(a: &CompareArgs, out: &mut dyn Write) -> CliResult<i32> {
    if let Some(p) = &a.rows {
        let text = fs::read_to_string(p).map_err(err(&p.display().to_string()))?;
        let rows: Vec<PairedRow> = serde_json::from_str(&text).map_err(err(&p.display().to_string()))?;
        if a.json {
            json_line(out, &rows)?;
        } else {
            let _ = write!(out, "{}", compare_paired(&rows));
        }
        return Ok(EXIT_OK);
    }
    if a.reports.is_empty() {
        return Err("no reports given".into());
    }
    let reports = a.reports.iter().map(|p| read_report(p)).collect::<CliResult<Vec<_>>>()?;
    if a.paired {
        if reports.len() % 2 != 0 {
            return Err("--paired needs an even number of reports".into());
        }
        let rows: Vec<PairedRow> = reports.chunks(2).map(|c| PairedRow::from_reports(&c[0], &c[1])).collect();
        if a.json {
            json_line(out, &rows)?;
        } else {
            let _ = write!(out, "{}", compare_paired(&rows));
        }
    } else if a.json {
        json_line(out, &reports)?;
    } else {
        let _ = write!(out, "{}", compare(&reports));
    }
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, errout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(errout, "{e}");
                return EXIT_ERROR;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let result = match &cli.command {
        Command::Analyze(a) => cmd_analyze(a, out, errout),
        Command::Generate(a) => cmd_generate(a, out),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Compare(a) => cmd_compare(a, out),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(errout, "error: {msg}");
            EXIT_ERROR
        }
    }
}
