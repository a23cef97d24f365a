use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use boxmagic::diagrams::{dot_file_name, enumerate};
use boxmagic::format::{float_to_string, rational_to_decimal, rational_to_string, RATIONAL_DIGITS};
use boxmagic::magic::{a_table, mu_table, verify_magic, MagicRow};
use boxmagic::polylog::{phi1_with, phi2, Phi1Constant};
use boxmagic::quadrature::{run_check, Check, CheckReport, VerifyOptions};
use boxmagic::{Rational, Site};

use crate::args::{Cli, Command, Format, Phi1ConstantArg, Suite};
use crate::error::CliError;
use crate::output::{emit, Rendered, Table};

/// Whether the command's own checks passed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    Failed,
}

impl Status {
    fn from_passed(passed: bool) -> Self {
        if passed {
            Status::Success
        } else {
            Status::Failed
        }
    }
}

#[derive(Serialize)]
struct RationalRow {
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<usize>,
    exact: String,
    decimal: String,
}

fn rational_cells(r: &Rational) -> (String, String) {
    (rational_to_string(r), rational_to_decimal(r, RATIONAL_DIGITS))
}

#[derive(Serialize)]
struct MuJson {
    loops: usize,
    k_max: usize,
    rows: Vec<RationalRow>,
}

fn cmd_mu(loops: usize, k_max: usize) -> Result<Rendered<MuJson>, CliError> {
    let t = mu_table(loops, k_max)?;
    let mut table = Table::new(vec!["k", "exact", "decimal"]);
    table.note(format!("mu^({loops})_k for k = 1..{k_max}"));
    let mut rows = Vec::new();
    for (i, m) in t.mu.iter().enumerate() {
        let (exact, decimal) = rational_cells(m);
        table.push(vec![(i + 1).to_string(), exact.clone(), decimal.clone()]);
        rows.push(RationalRow { k: Some(i + 1), p: None, exact, decimal });
    }
    Ok(Rendered { json: MuJson { loops, k_max, rows }, table })
}

#[derive(Serialize)]
struct AcoeffJson {
    loops: usize,
    k: usize,
    rows: Vec<RationalRow>,
}

fn cmd_acoeff(loops: usize, k: usize) -> Result<Rendered<AcoeffJson>, CliError> {
    let t = a_table(loops, k)?;
    let mut table = Table::new(vec!["p", "exact", "decimal"]);
    table.note(format!("a^{k}({loops}, p) for p = 0..{k}"));
    let mut rows = Vec::new();
    for (p, a) in t.a.iter().enumerate() {
        let (exact, decimal) = rational_cells(a);
        table.push(vec![p.to_string(), exact.clone(), decimal.clone()]);
        rows.push(RationalRow { k: None, p: Some(p), exact, decimal });
    }
    Ok(Rendered { json: AcoeffJson { loops, k, rows }, table })
}

#[derive(Serialize)]
struct DiagramJson {
    index: usize,
    history: Vec<Site>,
    integrand: String,
    dot_file: Option<PathBuf>,
}

#[derive(Serialize)]
struct DiagramsJson {
    loops: usize,
    count: usize,
    diagrams: Vec<DiagramJson>,
}

fn history_string(h: &[Site]) -> String {
    if h.is_empty() {
        "-".to_string()
    } else {
        h.iter().map(Site::to_string).collect::<Vec<_>>().join(" ")
    }
}

fn cmd_diagrams(loops: usize, dot_dir: Option<&Path>) -> Result<Rendered<DiagramsJson>, CliError> {
    let ds = enumerate(loops)?;
    if let Some(dir) = dot_dir {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    }
    let mut table = Table::new(vec!["index", "history", "integrand", "dot_file"]);
    table.note(format!("{} box diagrams with {loops} loop(s)", ds.len()));
    let mut diagrams = Vec::new();
    for (index, d) in ds.iter().enumerate() {
        let dot_file = match dot_dir {
            Some(dir) => {
                let name = dot_file_name(loops, index);
                let path = dir.join(&name);
                let graph = name.trim_end_matches(".dot");
                fs::write(&path, d.to_dot(graph)).map_err(|source| CliError::Io { path: path.clone(), source })?;
                Some(path)
            }
            None => None,
        };
        let integrand = d.integrand().to_string();
        table.push(vec![
            index.to_string(),
            history_string(d.history()),
            integrand.clone(),
            dot_file.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
        ]);
        diagrams.push(DiagramJson { index, history: d.history().to_vec(), integrand, dot_file });
    }
    Ok(Rendered { json: DiagramsJson { loops, count: ds.len(), diagrams }, table })
}

#[derive(Serialize)]
struct MagicJson {
    loops: usize,
    k_max: usize,
    diagrams: usize,
    images_compared: usize,
    passed: bool,
    mismatches: Vec<MagicRow>,
}

fn cmd_magic(loops: usize, k_max: usize) -> Result<(Rendered<MagicJson>, Status), CliError> {
    let report = verify_magic(loops, k_max)?;
    let passed = report.passed();
    let mismatches: Vec<MagicRow> = report.rows.iter().filter(|r| !r.matches).cloned().collect();
    let mut table = Table::new(vec!["diagram", "history", "family", "k"]);
    table.note(format!(
        "{} diagram(s) with {loops} loop(s), {} generator images for k <= {k_max}: {}",
        report.diagrams,
        report.rows.len(),
        if passed { "all equal to the ladder" } else { "MISMATCH" }
    ));
    if passed {
        table.headers.clear();
    }
    for r in &mismatches {
        table.push(vec![r.diagram.to_string(), history_string(&r.history), r.family.to_string(), r.k.to_string()]);
    }
    let json = MagicJson {
        loops,
        k_max,
        diagrams: report.diagrams,
        images_compared: report.rows.len(),
        passed,
        mismatches,
    };
    Ok((Rendered { json, table }, Status::from_passed(passed)))
}

#[derive(Serialize)]
struct TimedReport {
    #[serde(flatten)]
    report: CheckReport,
    passed: bool,
    seconds: f64,
}

#[derive(Serialize)]
struct VerifyJson {
    options: VerifyOptions,
    passed: bool,
    checks: Vec<TimedReport>,
}

fn suite_checks(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::Normalization => vec![Check::Normalization],
        Suite::Poisson => vec![Check::Poisson],
        Suite::LemmaZp => vec![Check::LemmaZp],
        Suite::Collapse => vec![Check::Collapse],
        Suite::Orthogonality => vec![Check::Orthogonality],
        Suite::Conformal => vec![Check::Conformal],
        Suite::All => Check::ALL.to_vec(),
    }
}

fn cmd_verify(suite: Suite, opts: VerifyOptions) -> Result<(Rendered<VerifyJson>, Status), CliError> {
    if let Some(t) = opts.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Usage(format!("--tol must be positive, got {t}")));
        }
    }
    let mut checks = Vec::new();
    for check in suite_checks(suite) {
        let start = Instant::now();
        let report = run_check(check, &opts)?;
        let seconds = start.elapsed().as_secs_f64();
        checks.push(TimedReport { passed: report.passed(), report, seconds });
    }
    let passed = checks.iter().all(|c| c.passed);
    let mut table = Table::new(vec!["check", "label", "residual", "tolerance", "status"]);
    for c in &checks {
        table.note(format!(
            "{:<14} {}  max residual {:.3e}  {} nodes/dim  {:.2} s",
            c.report.check.name(),
            if c.passed { "PASS" } else { "FAIL" },
            c.report.max_residual(),
            c.report.nodes_per_dim,
            c.seconds
        ));
        for e in &c.report.entries {
            table.push(vec![
                c.report.check.name().to_string(),
                e.label.clone(),
                format!("{:.3e}", e.residual),
                format!("{:.1e}", e.tolerance),
                if e.passed { "pass" } else { "FAIL" }.to_string(),
            ]);
        }
    }
    Ok((Rendered { json: VerifyJson { options: opts, passed, checks }, table }, Status::from_passed(passed)))
}

#[derive(Serialize)]
struct PhiJson {
    level: u32,
    x: f64,
    y: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi1_constant: Option<&'static str>,
    value: f64,
}

fn cmd_phi(level: u32, x: f64, y: f64, constant: Option<Phi1ConstantArg>) -> Result<Rendered<PhiJson>, CliError> {
    let constant = match constant {
        Some(Phi1ConstantArg::PiCubed) => Phi1Constant::PiCubed,
        Some(Phi1ConstantArg::PiSquared) => Phi1Constant::PiSquared,
        None => Phi1Constant::default(),
    };
    let (value, label) = if level == 1 {
        let name = match constant {
            Phi1Constant::PiCubed => "pi-cubed",
            Phi1Constant::PiSquared => "pi-squared",
        };
        (phi1_with(x, y, constant)?, Some(name))
    } else {
        (phi2(x, y)?, None)
    };
    let mut table = Table::new(vec!["level", "x", "y", "value"]);
    table.push(vec![level.to_string(), x.to_string(), y.to_string(), float_to_string(value)]);
    Ok(Rendered { json: PhiJson { level, x, y, phi1_constant: label, value }, table })
}

pub fn run(cli: &Cli) -> Result<Status, CliError> {
    let out = cli.output.as_deref();
    match &cli.command {
        Command::Mu { loops, k_max } => {
            emit("mu", &cmd_mu(*loops as usize, *k_max as usize)?, cli.format, out)?;
        }
        Command::Acoeff { loops, k } => {
            emit("acoeff", &cmd_acoeff(*loops as usize, *k as usize)?, cli.format, out)?;
        }
        Command::Diagrams { loops, dot_dir } => {
            emit("diagrams", &cmd_diagrams(*loops as usize, dot_dir.as_deref())?, cli.format, out)?;
        }
        Command::Magic { loops, k_max } => {
            let (r, status) = cmd_magic(*loops as usize, *k_max as usize)?;
            emit("magic", &r, cli.format, out)?;
            return Ok(status);
        }
        Command::Verify { suite, radius, nodes, tol, seed, json } => {
            let opts = VerifyOptions { radius: *radius, nodes: *nodes, tol: *tol, seed: *seed };
            let (r, status) = cmd_verify(*suite, opts)?;
            let format = if *json { Format::Json } else { cli.format };
            emit("verify", &r, format, out)?;
            return Ok(status);
        }
        Command::Phi { level, x, y, phi1_constant } => {
            emit("phi", &cmd_phi(*level, *x, *y, *phi1_constant)?, cli.format, out)?;
        }
    }
    Ok(Status::Success)
}
