//! `gl3perm`: evaluate, enumerate and cross-check counts of invertible 3×3
//! matrices over `Z/n` by permanent residue.
//!
//! Exit codes: 0 success, 1 verification failures, 2 usage error, 3 a
//! modulus beyond an enumerator's bound.

use std::io::{self, IsTerminal, Write};
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Map, Number, Value};

use gl3perm::closed_form::{case_census_closed, g_n, g_pk0_class, CaseRow};
use gl3perm::oracle::{case_census_oracle, census, class_census, OracleConfig};
use gl3perm::verify::{self, Profile, SuiteOptions};
use gl3perm::{ClassLabel, Error, Modulus};

#[derive(Parser)]
#[command(
    name = "gl3perm",
    version,
    about = "Counts of invertible 3x3 matrices mod n by permanent"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form g(n, x).
    Eval {
        n: u64,
        /// Any integer; reduced mod n.
        #[arg(allow_negative_numbers = true)]
        x: i64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Exhaustive census of GL3(Z/n) by permanent.
    Oracle {
        n: u64,
        /// Print only this residue.
        #[arg(long, allow_negative_numbers = true)]
        x: Option<i64>,
        /// Split each residue into the five sub-permanent classes (prime powers only).
        #[arg(long)]
        classes: bool,
        #[arg(long)]
        threads: Option<usize>,
        /// Report progress on stderr.
        #[arg(long)]
        progress: bool,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Reproduce the class table or the zero-pattern case table.
    Table {
        #[arg(long, value_enum, default_value_t = Section::Classes)]
        section: Section,
        /// Moduli (classes) or primes (cases), comma separated.
        #[arg(long, value_delimiter = ',')]
        p_list: Option<Vec<u64>>,
        /// Confirm every entry against an exhaustive census.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Run the cross-check suite; exit 1 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value_t = ProfileArg::Quick)]
        profile: ProfileArg,
        #[arg(long)]
        threads: Option<usize>,
        /// Seed for the sampled checks (decimal or 0x-prefixed hex).
        #[arg(long, value_parser = parse_seed, default_value = "0x5EED")]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Corrupt one closed-form value, as a negative control.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Section {
    /// g(n,0) and its five classes for prime powers n.
    #[value(alias = "4.2")]
    Classes,
    /// Zero-permanent matrices mod p by zero pattern of rows 1 and 2.
    #[value(alias = "4-cases")]
    Cases,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProfileArg {
    Quick,
    Full,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    }
    .map_err(|e| format!("bad seed `{s}`: {e}"))
}

const CLASS_TABLE_DEFAULT: [u64; 6] = [3, 5, 7, 9, 11, 13];
const CASE_TABLE_DEFAULT: [u64; 5] = [3, 5, 7, 11, 13];

enum Failure {
    Usage(String),
    Bound(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::TooLarge { .. } => Failure::Bound(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut out = String::new();
    let result = match cli.command {
        Command::Eval { n, x, format } => cmd_eval(n, x, format, &mut out),
        Command::Oracle {
            n,
            x,
            classes,
            threads,
            progress,
            format,
        } => cmd_oracle(n, x, classes, config(threads), progress, format, &mut out),
        Command::Table {
            section,
            p_list,
            oracle,
            threads,
            format,
        } => cmd_table(section, p_list, oracle, &config(threads), format, &mut out),
        Command::Verify {
            profile,
            threads,
            seed,
            format,
            inject_fault,
        } => {
            let profile = match profile {
                ProfileArg::Quick => Profile::Quick,
                ProfileArg::Full => Profile::Full,
            };
            let options = SuiteOptions { seed, inject_fault };
            cmd_verify(profile, &config(threads), &options, format, &mut out)
        }
    };
    let mut stdout = io::stdout().lock();
    let _ = stdout.write_all(out.as_bytes());
    let _ = stdout.flush();
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Bound(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn config(threads: Option<usize>) -> OracleConfig {
    OracleConfig {
        threads,
        ..OracleConfig::default()
    }
}

fn number(v: &BigUint) -> Value {
    Value::Number(Number::from_str(&v.to_string()).expect("decimal digits form a JSON number"))
}

fn push_json(out: &mut String, v: &Value) {
    out.push_str(&serde_json::to_string(v).expect("values serialize"));
    out.push('\n');
}

/// Columns under a header, numbers flush right and text flush left.
fn aligned(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let numeric: Vec<bool> = (0..header.len())
        .map(|i| {
            rows.iter().all(|r| {
                r.get(i)
                    .is_none_or(|c| c.chars().all(|ch| ch.is_ascii_digit()))
            })
        })
        .collect();
    let mut s = String::new();
    for row in std::iter::once(header).chain(rows.iter().map(Vec::as_slice)) {
        let line: Vec<String> = row
            .iter()
            .zip(widths.iter().zip(&numeric))
            .map(|(c, (&w, &right))| {
                if right {
                    format!("{c:>w$}")
                } else {
                    format!("{c:<w$}")
                }
            })
            .collect();
        s.push_str(line.join("  ").trim_end());
        s.push('\n');
    }
    s
}

fn csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn cmd_eval(n: u64, x: i64, format: Format, out: &mut String) -> Result<ExitCode, Failure> {
    let m = Modulus::new(n)?;
    let x = x.rem_euclid(n as i64) as u64;
    let g = g_n(&m, x as i64)?;
    match format {
        Format::Table => out.push_str(&format!("{g}\n")),
        Format::Csv => out.push_str(&format!("n,x,g(n,x)\n{n},{x},{g}\n")),
        Format::Json => push_json(out, &json!({"n": n, "x": x, "g": number(&g)})),
    }
    Ok(ExitCode::SUCCESS)
}

/// Prints the fraction of work done to stderr until dropped.
struct ProgressReporter {
    done: Arc<AtomicBool>,
    handle: Option<std::thread::JoinHandle<()>>,
}

impl ProgressReporter {
    fn start(counter: Arc<AtomicU64>, total: u64) -> Self {
        let done = Arc::new(AtomicBool::new(false));
        let flag = done.clone();
        let tty = io::stderr().is_terminal();
        let handle = std::thread::spawn(move || {
            while !flag.load(Ordering::Relaxed) {
                std::thread::sleep(Duration::from_millis(500));
                let pct = 100.0 * counter.load(Ordering::Relaxed) as f64 / total as f64;
                if tty {
                    eprint!("\r{pct:5.1}%");
                } else {
                    eprintln!("{pct:5.1}%");
                }
            }
            if tty {
                eprintln!("\r100.0%");
            }
        });
        ProgressReporter {
            done,
            handle: Some(handle),
        }
    }
}

impl Drop for ProgressReporter {
    fn drop(&mut self) {
        self.done.store(true, Ordering::Relaxed);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

fn cmd_oracle(
    n: u64,
    x: Option<i64>,
    classes: bool,
    mut config: OracleConfig,
    progress: bool,
    format: Format,
    out: &mut String,
) -> Result<ExitCode, Failure> {
    let m = Modulus::new(n)?;
    let prime_power = m.prime_power();
    if classes && prime_power.is_none() {
        return Err(Failure::Usage(format!(
            "--classes needs a prime power modulus, got {n}"
        )));
    }
    if n > config.tiered_max {
        return Err(Error::TooLarge {
            n,
            bound: config.tiered_max,
            engine: "tiered",
        }
        .into());
    }
    let _reporter = progress.then(|| {
        let counter = Arc::new(AtomicU64::new(0));
        config.progress = Some(counter.clone());
        let total = if classes || n > config.naive_max {
            n.pow(6)
        } else {
            n.pow(3)
        };
        ProgressReporter::start(counter, total)
    });

    let (counts, class_counts) = match (classes, prime_power) {
        (true, Some((p, k))) => {
            let c = class_census(p, k, &config)?;
            (c.marginals().counts, Some(c))
        }
        _ => (census(&m, &config)?.counts, None),
    };
    drop(_reporter);

    let xs: Vec<u64> = match x {
        Some(x) => vec![x.rem_euclid(n as i64) as u64],
        None => (0..n).collect(),
    };
    let labels = ClassLabel::CLASSES;
    let class_of =
        |x: u64, label: ClassLabel| class_counts.as_ref().map(|c| c.get(x as i64, label));

    match format {
        Format::Table | Format::Csv => {
            if format == Format::Table && x.is_some() && class_counts.is_none() {
                out.push_str(&format!("{}\n", counts[xs[0] as usize]));
                return Ok(ExitCode::SUCCESS);
            }
            let mut header = vec!["x".to_string(), "g(n,x)".to_string()];
            if class_counts.is_some() {
                header.extend(labels.map(|l| class_header("x", l)));
            }
            let rows: Vec<Vec<String>> = xs
                .iter()
                .map(|&x| {
                    let mut row = vec![x.to_string(), counts[x as usize].to_string()];
                    row.extend(
                        labels
                            .iter()
                            .filter_map(|&l| class_of(x, l))
                            .map(|v| v.to_string()),
                    );
                    row
                })
                .collect();
            if format == Format::Table {
                out.push_str(&format!("n = {n}\n"));
                out.push_str(&aligned(&header, &rows));
            } else {
                out.push_str(&csv(&header, &rows));
            }
        }
        Format::Json => {
            let rows: Vec<Value> = xs
                .iter()
                .map(|&x| {
                    let mut row = Map::new();
                    row.insert("x".into(), json!(x));
                    row.insert("g".into(), number(&counts[x as usize]));
                    if class_counts.is_some() {
                        let classes: Map<String, Value> = labels
                            .iter()
                            .map(|&l| {
                                (
                                    l.as_str().to_string(),
                                    number(&class_of(x, l).unwrap_or_default()),
                                )
                            })
                            .collect();
                        row.insert("classes".into(), Value::Object(classes));
                    }
                    Value::Object(row)
                })
                .collect();
            push_json(out, &json!({"n": n, "rows": rows}));
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// `g(n,0,1,1)` style column names; `var` is the residue placeholder.
fn class_header(var: &str, label: ClassLabel) -> String {
    let (i, j) = label.pivot().expect("class labels have a pivot");
    format!("g(n,{var},{},{})", i + 1, j + 1)
}

fn cmd_table(
    section: Section,
    p_list: Option<Vec<u64>>,
    oracle: bool,
    config: &OracleConfig,
    format: Format,
    out: &mut String,
) -> Result<ExitCode, Failure> {
    match section {
        Section::Classes => class_table(
            p_list.unwrap_or(CLASS_TABLE_DEFAULT.to_vec()),
            oracle,
            config,
            format,
            out,
        ),
        Section::Cases => case_table(
            p_list.unwrap_or(CASE_TABLE_DEFAULT.to_vec()),
            oracle,
            config,
            format,
            out,
        ),
    }
}

fn agreement(ok: bool) -> &'static str {
    if ok {
        "agree"
    } else {
        "differ"
    }
}

fn class_table(
    moduli: Vec<u64>,
    oracle: bool,
    config: &OracleConfig,
    format: Format,
    out: &mut String,
) -> Result<ExitCode, Failure> {
    let mut header = vec!["n".to_string(), "g(n,0)".to_string()];
    header.extend(ClassLabel::CLASSES.map(|l| class_header("0", l)));
    if oracle {
        header.push("oracle".to_string());
    }
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut all_agree = true;
    for &n in &moduli {
        let m = Modulus::new(n)?;
        let (p, k) = m.prime_power().ok_or_else(|| {
            Failure::Usage(format!("the class table needs prime powers, got {n}"))
        })?;
        let mut values = vec![g_n(&m, 0)?];
        for label in ClassLabel::CLASSES {
            values.push(g_pk0_class(p, k, label)?);
        }
        let mut row: Vec<String> = std::iter::once(n.to_string())
            .chain(values.iter().map(|v| v.to_string()))
            .collect();
        let mut record = json!({
            "n": n,
            "g": number(&values[0]),
            "classes": ClassLabel::CLASSES.iter().zip(&values[1..]).map(|(l, v)| (l.as_str().to_string(), number(v))).collect::<Map<_, _>>(),
        });
        if oracle {
            let c = class_census(p, k, config)?;
            let mut found = vec![c.marginals().counts[0].clone()];
            found.extend(ClassLabel::CLASSES.map(|l| c.get(0, l)));
            let ok = found == values;
            all_agree &= ok;
            row.push(agreement(ok).to_string());
            record["oracle"] = json!(agreement(ok));
        }
        rows.push(row);
        records.push(record);
    }
    emit(format, &header, &rows, &Value::Array(records), out);
    Ok(if all_agree {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn case_table(
    primes: Vec<u64>,
    oracle: bool,
    config: &OracleConfig,
    format: Format,
    out: &mut String,
) -> Result<ExitCode, Failure> {
    let mut header: Vec<String> = ["p", "row", "condition", "subcondition", "count"]
        .map(String::from)
        .to_vec();
    if oracle {
        header.push("oracle".to_string());
    }
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut all_agree = true;
    for &p in &primes {
        let closed = case_census_closed(p)?;
        let found = if oracle {
            Some(case_census_oracle(p, config)?)
        } else {
            None
        };
        let mut total = BigUint::default();
        let mut cells = Vec::new();
        for r in &closed {
            total += &r.count;
            let mut row = vec![
                p.to_string(),
                r.row.id().to_string(),
                r.row.condition().to_string(),
                r.row.subcondition().to_string(),
                r.count.to_string(),
            ];
            let mut cell = json!({
                "row": r.row.id(),
                "condition": r.row.condition(),
                "subcondition": r.row.subcondition(),
                "count": number(&r.count),
            });
            if let Some(found) = &found {
                let ok = found.get(r.row) == &r.count;
                all_agree &= ok;
                row.push(agreement(ok).to_string());
                cell["oracle"] = json!(agreement(ok));
            }
            rows.push(row);
            cells.push(cell);
        }
        if format == Format::Table {
            let mut row = vec![
                p.to_string(),
                "total".to_string(),
                String::new(),
                String::new(),
                total.to_string(),
            ];
            if let Some(found) = &found {
                let ok = found.total() == total;
                all_agree &= ok;
                row.push(agreement(ok).to_string());
            }
            rows.push(row);
        }
        records.push(json!({"p": p, "rows": cells, "total": number(&total)}));
    }
    debug_assert_eq!(CaseRow::ALL.len(), 7);
    emit(format, &header, &rows, &Value::Array(records), out);
    Ok(if all_agree {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn emit(
    format: Format,
    header: &[String],
    rows: &[Vec<String>],
    records: &Value,
    out: &mut String,
) {
    match format {
        Format::Table => out.push_str(&aligned(header, rows)),
        Format::Csv => out.push_str(&csv(header, rows)),
        Format::Json => push_json(out, records),
    }
}

fn cmd_verify(
    profile: Profile,
    config: &OracleConfig,
    options: &SuiteOptions,
    format: Format,
    out: &mut String,
) -> Result<ExitCode, Failure> {
    let results = verify::run_suite(profile, config, options)?;
    out.push_str(&match format {
        Format::Table => verify::render_table(&results),
        Format::Csv => verify::render_csv(&results),
        Format::Json => verify::render_json_lines(&results),
    });
    let failed: Vec<_> = results.iter().filter(|r| !r.passed()).collect();
    if failed.is_empty() {
        return Ok(ExitCode::SUCCESS);
    }
    eprintln!("{} of {} checks failed:", failed.len(), results.len());
    for r in failed {
        eprintln!(
            "  {} {} expected {} actual {}",
            r.check_id,
            r.params_text(),
            r.expected,
            r.actual
        );
    }
    Ok(ExitCode::from(1))
}
