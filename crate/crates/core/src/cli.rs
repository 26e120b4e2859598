//! The `asympt` command line: argument parsing, subcommands, report output
//! and the catalogue cache.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::classify::{catalogue_with, classify_mapping_with, Catalogue, CatalogueOptions, ClassifyOptions, TYPE_NAMES};
use crate::error::Error;
use crate::facon::enumerate_facons;
use crate::parser::parse_mapping;
use crate::probe::{crosscheck, fit_implicit, sample_asymptotic, ProbeConfig};
use crate::rng::DEFAULT_SEED;
use crate::suite::run_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ANALYSIS: i32 = 2;
pub const EXIT_ORACLE: i32 = 3;

/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "ASYMPT_SEED";

#[derive(Debug, Parser)]
#[command(name = "asympt", version, about = "Asymptotic sets of polynomial mappings C^3 -> C^3")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List façons of C^n.
    Facons(FaconsArgs),
    /// Compute the asymptotic set of a mapping.
    Classify(ClassifyArgs),
    /// Sample the asymptotic set numerically.
    Probe(ProbeArgs),
    /// Realizable asymptotic-set types with witnesses.
    Catalogue(CatalogueArgs),
    /// Run the self-check suite.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct FaconsArgs {
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long)]
    pub count_only: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Mapping file, `-` for stdin.
    #[arg(long)]
    pub input: PathBuf,
    /// Cross-check against the sampling oracle.
    #[arg(long)]
    pub probe: bool,
    /// Largest accepted oracle residual.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub radius_start: Option<f64>,
    #[arg(long)]
    pub radius_factor: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub bound: Option<f64>,
    /// Samples per radius.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write the sampled points as JSON lines.
    #[arg(long)]
    pub cloud: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CatalogueArgs {
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub no_cache: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Reduced suite.
    #[arg(long)]
    pub quick: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Force the named check to fail.
    #[arg(long, hide = true)]
    pub inject_fault: Option<String>,
}

/// Failure of a subcommand with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn analysis(message: impl Into<String>) -> Self {
        Self { code: EXIT_ANALYSIS, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(p) => Failure::usage(format!("parse error: {p}")),
            e => Failure::analysis(e.to_string()),
        }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Resolves the seed: flag, then `ASYMPT_SEED`, then [`DEFAULT_SEED`].
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> std::result::Result<u64, String> {
    match (flag, env) {
        (Some(s), _) => Ok(s),
        (None, Some(v)) => v
            .trim()
            .parse()
            .map_err(|_| format!("{SEED_ENV} must be an unsigned integer, got `{v}`")),
        (None, None) => Ok(DEFAULT_SEED),
    }
}

fn seed(flag: Option<u64>) -> std::result::Result<u64, Failure> {
    let env = std::env::var(SEED_ENV).ok();
    resolve_seed(flag, env.as_deref()).map_err(Failure::usage)
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> std::result::Result<(), Failure> {
    match path {
        Some(p) => write_atomic(p, text.as_bytes())
            .map_err(|e| Failure::analysis(format!("cannot write {}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::analysis(format!("cannot write output: {e}"))),
    }
}

fn read_input(path: &Path) -> std::result::Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
            .map_err(|e| Failure::usage(format!("cannot read stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let res = match cli.command {
        Command::Facons(a) => facons(&a, out),
        Command::Classify(a) => classify(&a, out, err),
        Command::Probe(a) => probe(&a, out),
        Command::Catalogue(a) => catalogue(&a, out, err),
        Command::Check(a) => check(&a, out, err),
    };
    match res {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn facons(a: &FaconsArgs, out: &mut dyn Write) -> CmdResult {
    let list = enumerate_facons(a.dim)?;
    let text = match (a.format, a.count_only) {
        (Format::Text, true) => format!("{}\n", list.len()),
        (Format::Text, false) => list.iter().map(|f| format!("{f}\n")).collect(),
        (Format::Json, true) => format!("{}\n", json!({ "n": a.dim, "count": list.len() })),
        (Format::Json, false) => format!("{}\n", json!({ "n": a.dim, "count": list.len(), "facons": list })),
    };
    emit(out, None, &text)?;
    Ok(EXIT_OK)
}

fn classify(a: &ClassifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    if !(a.tol > 0.0 && a.tol.is_finite()) {
        return Err(Failure::usage("--tol must be positive"));
    }
    let seed = seed(a.seed)?;
    let f = parse_mapping(&read_input(&a.input)?).map_err(|e| Failure::usage(format!("{}: {e}", a.input.display())))?;
    let opts = ClassifyOptions { seed, ..ClassifyOptions::default() };
    let mut report = classify_mapping_with(&f, &opts)?;
    let mut code = EXIT_OK;
    if a.probe {
        let cfg = ProbeConfig { seed, ..ProbeConfig::default() };
        let cloud = sample_asymptotic(&f, &cfg)?;
        let summary = crosscheck(&report, &cloud, cfg.fit_tolerance)?;
        report.oracle_residual = Some(summary.max_residual);
        report.tolerances.insert("oracle_tol".into(), a.tol);
        report.tolerances.insert("fit_tolerance".into(), cfg.fit_tolerance);
        report.notes.extend(summary.flags.iter().map(|f| format!("oracle: {f}")));
        for c in &summary.unwitnessed {
            report.notes.push(format!("oracle: no sampled support for {c}"));
        }
        if !summary.passed(a.tol) {
            let _ = writeln!(
                err,
                "oracle mismatch: max residual {:.3e} (tol {:.1e}), {} unwitnessed component(s)",
                summary.max_residual,
                a.tol,
                summary.unwitnessed.len()
            );
            code = EXIT_ORACLE;
        }
    }
    let text = match a.format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report_text(&report),
    };
    emit(out, a.output.as_deref(), &text)?;
    Ok(code)
}

fn report_text(r: &crate::classify::AsymptoticSetReport) -> String {
    let mut s = format!("mapping:   {}\n", r.mapping);
    s += &format!("dominant:  {}\n", r.dominant);
    let realized = r.realized_facons();
    s += &format!("façons:    {}\n", if realized.is_empty() { "none".into() } else { realized.join(" ") });
    if r.proper {
        s += "S_F:       empty (proper)\n";
    } else {
        for c in &r.components {
            s += &format!("component: {}  [{:?}] from {}\n", c.equation, c.kind, c.facons.join(" "));
        }
        for l in &r.lower_dimensional {
            s += &format!("stratum:   dim {} from {}: ({})\n", l.dimension, l.facon, l.limits.join(", "));
        }
    }
    match r.matched_type {
        Some(t) => s += &format!("type:      {t} ({})\n", TYPE_NAMES[t as usize - 1]),
        None => s += "type:      none\n",
    }
    if let Some(res) = r.oracle_residual {
        s += &format!("oracle:    max residual {res:.3e}\n");
    }
    for n in &r.notes {
        s += &format!("note:      {n}\n");
    }
    s += &format!("seed:      {}\nversion:   {}\n", r.seed, r.version);
    s
}

fn probe(a: &ProbeArgs, out: &mut dyn Write) -> CmdResult {
    let d = ProbeConfig::default();
    let cfg = ProbeConfig {
        radius_start: a.radius_start.unwrap_or(d.radius_start),
        radius_factor: a.radius_factor.unwrap_or(d.radius_factor),
        steps: a.steps.unwrap_or(d.steps),
        image_bound: a.bound.unwrap_or(d.image_bound),
        samples_per_radius: a.samples.unwrap_or(d.samples_per_radius),
        seed: seed(a.seed)?,
        fit_tolerance: d.fit_tolerance,
    };
    cfg.validate().map_err(|e| Failure::usage(e.to_string()))?;
    let f = parse_mapping(&read_input(&a.input)?).map_err(|e| Failure::usage(format!("{}: {e}", a.input.display())))?;
    let cloud = sample_asymptotic(&f, &cfg)?;
    let fits = fit_implicit(&cloud, 2, cfg.fit_tolerance)?;
    if let Some(p) = &a.cloud {
        write_atomic(p, cloud.to_json_lines().as_bytes())
            .map_err(|e| Failure::analysis(format!("cannot write {}: {e}", p.display())))?;
    }
    let text = match a.format {
        Format::Json => {
            let v = json!({
                "version": crate::VERSION,
                "mapping": f.to_string(),
                "config": cfg,
                "points": cloud.points.len(),
                "final_radius": cloud.final_radius,
                "final_points": cloud.final_points().count(),
                "possibly_proper": cloud.possibly_proper,
                "fits": fits,
            });
            serde_json::to_string_pretty(&v).expect("probe summary serializes") + "\n"
        }
        Format::Text => {
            let mut s = format!(
                "mapping: {}\npoints: {} ({} at radius {:e})\n",
                f,
                cloud.points.len(),
                cloud.final_points().count(),
                cloud.final_radius
            );
            if cloud.possibly_proper {
                s += "no bounded images found: possibly proper\n";
            }
            for fit in &fits {
                s += &format!(
                    "{:<10} {:>6} pts  {}  residual {:.2e}{}\n",
                    fit.sig,
                    fit.points,
                    fit.equation,
                    fit.residual,
                    if fit.ambiguous { "  (ambiguous)" } else { "" }
                );
            }
            s += &format!("seed: {}\n", cfg.seed);
            s
        }
    };
    emit(out, a.output.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn default_cache_dir() -> PathBuf {
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME").filter(|d| !d.is_empty()) {
        return PathBuf::from(d).join("asympt");
    }
    match std::env::var_os("HOME").filter(|d| !d.is_empty()) {
        Some(h) => PathBuf::from(h).join(".cache").join("asympt"),
        None => std::env::temp_dir().join("asympt-cache"),
    }
}

/// Cache file for a catalogue; the key covers every input of the computation.
pub fn cache_path(dir: &Path, n: usize, d: u32, seed: u64) -> PathBuf {
    dir.join(format!("catalogue-n{n}-d{d}-v{}-s{seed}.json", crate::VERSION))
}

fn load_cached(path: &Path, n: usize, d: u32, seed: u64) -> std::result::Result<Option<Catalogue>, String> {
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.to_string()),
    };
    let c: Catalogue = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
    if c.n != n || c.d != d || c.seed != seed || c.version != crate::VERSION {
        return Err("key fields do not match".into());
    }
    Ok(Some(c))
}

fn catalogue(a: &CatalogueArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let seed = seed(a.seed)?;
    let path = cache_path(&a.cache_dir.clone().unwrap_or_else(default_cache_dir), a.dim, a.degree, seed);
    let cached = if a.no_cache {
        None
    } else {
        match load_cached(&path, a.dim, a.degree, seed) {
            Ok(c) => c,
            Err(e) => {
                let _ = writeln!(err, "warning: ignoring corrupt catalogue cache {}: {e}", path.display());
                None
            }
        }
    };
    let cat = match cached {
        Some(c) => c,
        None => {
            let opts = CatalogueOptions { seed, ..CatalogueOptions::default() };
            let c = catalogue_with(a.dim, a.degree, &opts)?;
            if !a.no_cache {
                if let Err(e) = write_atomic(&path, c.to_json().as_bytes()) {
                    let _ = writeln!(err, "warning: cannot write catalogue cache {}: {e}", path.display());
                }
            }
            c
        }
    };
    let text = match a.format {
        Format::Json => cat.to_json() + "\n",
        Format::Text => catalogue_text(&cat),
    };
    emit(out, a.output.as_deref(), &text)?;
    if !cat.violations.is_empty() {
        for v in &cat.violations {
            let _ = writeln!(err, "structural violation: {v}");
        }
        return Ok(EXIT_ANALYSIS);
    }
    Ok(EXIT_OK)
}

fn catalogue_text(c: &Catalogue) -> String {
    let mut s = format!(
        "Asymptotic-set types of dominant mappings C^{} -> C^{} of degree {}\n\n",
        c.n, c.n, c.d
    );
    s += &format!("{:<5} {:<22} {:<40} {}\n", "case", "shape", "witness", "components");
    for e in &c.entries {
        s += &format!(
            "{:<5} {:<22} {:<40} {}\n",
            e.matched_type,
            e.name,
            format!("({})", e.witness.join(", ")),
            e.components.join("; ")
        );
    }
    s += &format!(
        "\n{} façon sets, {} viable profiles, {} witnesses classified, {} unmatched\nseed {}, version {}\n",
        c.facon_sets,
        c.viable_profiles,
        c.witnesses_classified,
        c.unmatched.len(),
        c.seed,
        c.version
    );
    s
}

fn check(a: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let seed = seed(a.seed)?;
    let start = Instant::now();
    let results = run_suite(a.quick, seed, a.inject_fault.as_deref());
    let mut text = String::new();
    for r in &results {
        text += &format!("{} {}: {}\n", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    text += &format!("{} of {} checks passed (seed {seed})\n", results.len() - failed.len(), results.len());
    emit(out, None, &text)?;
    let _ = writeln!(err, "elapsed {:.2} s", start.elapsed().as_secs_f64());
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        Err(Failure::analysis(format!("failed: {}", failed.join(", "))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(Some(5), Some("7")), Ok(5));
        assert_eq!(resolve_seed(None, Some("7")), Ok(7));
        assert_eq!(resolve_seed(None, None), Ok(DEFAULT_SEED));
        assert!(resolve_seed(None, Some("x")).is_err());
    }

    #[test]
    fn unknown_flags_are_rejected() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["asympt", "facons", "--bogus"], &mut o, &mut e), EXIT_USAGE);
        assert_eq!(run(["asympt", "facons", "--dim", "3", "--count-only"], &mut o, &mut e), EXIT_OK);
        assert_eq!(String::from_utf8(o).unwrap(), "19\n");
    }

    #[test]
    fn facons_json_shape() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        run(["asympt", "facons", "--dim", "2", "--format", "json"], &mut o, &mut e);
        let v: serde_json::Value = serde_json::from_slice(&o).unwrap();
        assert_eq!(v["count"], 5);
        assert_eq!(v["facons"][0], json!({"inf": [1], "fixed": []}));
    }
}
