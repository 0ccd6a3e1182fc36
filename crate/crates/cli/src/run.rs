use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use guinand::explicit::PpeOptions;
use guinand::kernel::KernelConfig;
use guinand::linsys::{build_system, TMatrix};
use guinand::report::{report_merge, Check, VerificationReport};
use guinand::suites;
use guinand::theta::TruncationPolicy;
use serde_json::json;
use thiserror::Error;

use crate::args::{Cli, Command, Common, Format, Matrix, Psi0, Report, Verify};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] guinand::Error),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

/// Sizes the rayon pool from GUINAND_THREADS (0 or unset = automatic).
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(text) = std::env::var("GUINAND_THREADS") else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("GUINAND_THREADS must be a nonnegative integer, got '{text}'")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

fn kernel_config(common: &Common) -> Result<KernelConfig, CliError> {
    let cfg = KernelConfig {
        j_max: common.j_max,
        policy: TruncationPolicy {
            tail_epsilon: common.tail_eps,
            ..TruncationPolicy::default()
        },
    };
    cfg.validate()?;
    Ok(cfg)
}

fn format_for(common: &Common) -> Format {
    common.format.unwrap_or_else(|| match &common.out {
        Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
        _ => Format::Json,
    })
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Write {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut out = io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::Write {
                    path: PathBuf::from("<stdout>"),
                    source: e,
                }),
                _ => Ok(()),
            }
        }
    }
}

/// T as CSV: header `m\n,1,…,N`, then one row per m, 17 significant digits.
pub fn matrix_csv(tm: &TMatrix) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["m\\n".to_string()];
    header.extend((1..=tm.n).map(|k| k.to_string()));
    w.write_record(&header)?;
    for m in 1..=tm.n {
        let mut row = vec![m.to_string()];
        row.extend(tm.row(m).iter().map(|v| format!("{v:.16e}")));
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn build_report(tm: &TMatrix, cfg: &KernelConfig, with_entries: bool) -> VerificationReport {
    let mut r = VerificationReport::new("matrix build");
    r.param("n", json!(tm.n));
    r.meta.insert("j_max".into(), json!(cfg.j_max));
    r.meta.insert("policy".into(), serde_json::to_value(cfg.policy).expect("policy serializes"));
    r.meta.insert("rhs".into(), json!(tm.rhs));
    if with_entries {
        let rows: Vec<&[f64]> = (1..=tm.n).map(|m| tm.row(m)).collect();
        r.meta.insert("entries".into(), json!(rows));
    }
    let ok = tm.entries.iter().all(|&e| e > 0.0 && e.is_finite());
    let min = tm.entries.iter().copied().fold(f64::INFINITY, f64::min);
    r.push(Check::new("entries_positive", min, None).gate(ok, 0.0));
    r
}

fn read_report(path: &Path) -> Result<VerificationReport, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(VerificationReport::from_json(&text)?)
}

fn acceptance(id: Option<u8>, cfg: &KernelConfig) -> Result<VerificationReport, CliError> {
    let ids: Vec<u8> = match id {
        Some(k) => vec![k],
        None => suites::CRITERIA.iter().map(|c| c.id).collect(),
    };
    let reports = ids
        .into_iter()
        .map(|k| suites::criterion(k, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut merged = report_merge(&reports);
    merged.command = "verify acceptance".into();
    Ok(merged)
}

/// Executes one command. Ok(true) when every gated check passed.
pub fn run(cli: &Cli) -> Result<bool, CliError> {
    let start = Instant::now();
    let common = &cli.common;
    let format = format_for(common);
    let out = common.out.as_deref();

    let mut report = match &cli.command {
        Command::Report {
            what: Report::Merge { paths },
        } => {
            let reports = paths.iter().map(|p| read_report(p)).collect::<Result<Vec<_>, _>>()?;
            report_merge(&reports)
        }
        Command::Matrix {
            what: Matrix::Build { n },
        } => {
            let cfg = kernel_config(common)?;
            let tm = build_system(*n, &cfg)?;
            if format == Format::Csv {
                write_text(out, &matrix_csv(&tm)?)?;
                let r = build_report(&tm, &cfg, false);
                if out.is_some() {
                    // the matrix went to the file; the summary goes to stdout
                    write_text(None, &(r.to_json() + "\n"))?;
                }
                return Ok(r.pass);
            }
            build_report(&tm, &cfg, true)
        }
        command => {
            let cfg = kernel_config(common)?;
            match command {
                Command::Verify { what } => match what {
                    Verify::Lemma1 { s } => suites::lemma1(&s.0, &cfg)?,
                    Verify::GhatGrid { t_grid } => suites::ghat_grid(&t_grid.0, &cfg)?,
                    Verify::ZerosDip { zeros } => suites::zeros_dip(*zeros, &cfg)?,
                    Verify::Ppe {
                        x,
                        boundary,
                        archimedean_orientation,
                    } => {
                        let opts = PpeOptions {
                            boundary: (*boundary).into(),
                            archimedean: (*archimedean_orientation).into(),
                        };
                        suites::ppe(&x.0, &cfg, opts)?
                    }
                    Verify::Archimedean { x } => suites::archimedean(&x.0, &cfg)?,
                    Verify::Elimination { x } => suites::elimination(&x.0, &cfg)?,
                    Verify::Weight8 { s } => suites::weight8(&s.0, &cfg)?,
                    Verify::Modular => suites::modular(&cfg)?,
                    Verify::Structure { n } => suites::structure(n, &cfg)?,
                    Verify::Qexp { n } => suites::qexp(*n, &cfg)?,
                    Verify::Acceptance { criterion } => acceptance(*criterion, &cfg)?,
                },
                Command::Matrix { what } => match what {
                    Matrix::Solve { n, ridge, synthetic } => suites::recovery(*n, *ridge, *synthetic, &cfg)?,
                    Matrix::Residual { n, n_tail } => suites::forward(*n, n_tail.unwrap_or(40 * n), &cfg)?,
                    Matrix::Build { .. } => unreachable!("handled above"),
                },
                Command::Psi0 {
                    what: Psi0::Compare { n, zeros },
                } => suites::psi0(*n, *zeros, &cfg)?,
                Command::Report { .. } => unreachable!("handled above"),
            }
        }
    };
    if format == Format::Csv {
        return Err(CliError::Usage("csv output is only available for `matrix build`".into()));
    }
    report.timing = Some(start.elapsed().as_secs_f64());
    write_text(out, &(report.to_json() + "\n"))?;
    for c in report.failed() {
        eprintln!("check failed: {}", c.name);
    }
    Ok(report.pass)
}
