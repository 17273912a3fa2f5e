//! `pkl`: generate, check and count balanced de Bruijn-like necklaces.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pkl_core::census::{census_with, CensusOptions, DEFAULT_BUDGET};
use pkl_core::necklace::{format_symbols, parse_symbols, write_symbols};
use pkl_core::verifier::ceil_log;
use pkl_core::{
    build_join_graph, classify, discrete_derivative, generate_pkl, is_pkl, lempel_lift, occurrence_profile, Necklace,
    PklError, Verdict,
};
use serde::Serialize;

/// Longest accepted input sequence.
const MAX_INPUT: usize = 1 << 30;

#[derive(Parser)]
#[command(name = "pkl", version, about = "Balanced de Bruijn-like necklaces of any length")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a P-sequence of the given length in canonical rotation.
    Generate {
        #[arg(short = 'K', long = "alphabet")]
        k: u32,
        #[arg(short = 'L', long = "length")]
        l: u64,
    },
    /// Check that a sequence is a P-sequence (exit 0) or not (exit 1).
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        json: bool,
        /// Include per-length count histograms up to this length.
        #[arg(long = "max-m")]
        max_m: Option<usize>,
    },
    /// Report the most specific class a sequence belongs to.
    Classify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        json: bool,
    },
    /// Substring counts for every length up to --max-m.
    Profile {
        #[command(flatten)]
        input: Input,
        #[arg(long = "max-m")]
        max_m: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Print every member of the lift, one per line.
    Lift {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        json: bool,
    },
    /// Print the discrete derivative.
    Derive {
        #[command(flatten)]
        input: Input,
    },
    /// Join graph of the lift of a sequence.
    JoinGraph {
        #[command(flatten)]
        input: Input,
        /// Graphviz output instead of one edge per line.
        #[arg(long)]
        dot: bool,
    },
    /// Count P-sequences up to rotation by exhaustive search.
    Count {
        #[arg(short = 'K', long = "alphabet")]
        k: u32,
        /// A length or an inclusive range such as 1..20.
        #[arg(short = 'L', long = "length", value_parser = parse_range)]
        l: (usize, usize),
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// `L,count` rows with a header.
        #[arg(long, conflicts_with = "json")]
        csv: bool,
        #[arg(long)]
        json: bool,
        /// Write one representative per line to this file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Input {
    #[arg(short = 'K', long = "alphabet")]
    k: u32,
    /// The sequence; read from --file or standard input when absent.
    #[arg(conflicts_with = "file")]
    sequence: Option<String>,
    #[arg(long)]
    file: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('=')).map_err(|e| e.to_string())?);
            if a > b {
                return Err(format!("empty range {s}"));
            }
            Ok((a, b))
        }
        None => num(s).map(|v| (v, v)),
    }
}

/// Failure modes mapped to exit codes.
enum Failure {
    Input(String),
    Io(io::Error),
}

impl From<PklError> for Failure {
    fn from(e: PklError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<bool, Failure>;

impl Input {
    fn read(&self) -> Result<Necklace, Failure> {
        // comma-separated fields need up to six bytes per character
        let per_char = if self.k <= 10 { 1 } else { 6 };
        let cap = (MAX_INPUT * per_char + 1024) as u64;
        let text = match (&self.sequence, &self.file) {
            (Some(s), _) => s.clone(),
            (None, Some(path)) => read_capped(File::open(path)?, cap)?,
            (None, None) => read_capped(io::stdin().lock(), cap)?,
        };
        let chars = parse_symbols(&text, self.k)?;
        if chars.len() > MAX_INPUT {
            return Err(Failure::Input(format!(
                "sequence of {} characters exceeds the limit of {MAX_INPUT}",
                chars.len()
            )));
        }
        Ok(Necklace::new(chars, self.k)?)
    }
}

fn read_capped(r: impl Read, cap: u64) -> Result<String, Failure> {
    let mut text = String::new();
    r.take(cap + 1).read_to_string(&mut text)?;
    if text.len() as u64 > cap {
        return Err(Failure::Input(format!("input exceeds {MAX_INPUT} characters")));
    }
    Ok(text)
}

#[derive(Serialize)]
struct Allowed {
    min: u64,
    max: Option<u64>,
}

#[derive(Serialize)]
struct WitnessReport {
    m: usize,
    string: String,
    count: u64,
    allowed: Allowed,
}

#[derive(Serialize)]
struct VerdictReport {
    accepted: bool,
    tier: &'static str,
    witness: Option<WitnessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    profile: Option<BTreeMap<usize, BTreeMap<u64, u128>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classes: Option<BTreeMap<&'static str, bool>>,
}

fn witness_report(v: &Verdict) -> Option<WitnessReport> {
    v.witness.as_ref().map(|w| WitnessReport {
        m: w.m,
        string: w.string.to_text(),
        count: w.count,
        allowed: Allowed {
            min: w.min_allowed,
            max: w.max_allowed,
        },
    })
}

/// Per-length histograms: attained count -> number of strings.
fn histograms(n: &Necklace, max_m: usize) -> Result<BTreeMap<usize, BTreeMap<u64, u128>>, Failure> {
    let mut out = BTreeMap::new();
    for m in 1..=max_m.min(n.len()) {
        let h = occurrence_profile(n, m)?
            .histogram()
            .ok_or_else(|| Failure::Input(format!("K^{m} is too large for a histogram")))?;
        out.insert(m, h);
    }
    Ok(out)
}

fn print_json<T: Serialize>(value: &T) -> io::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)
}

fn print_sequence(n: &Necklace) -> io::Result<()> {
    let mut out = BufWriter::new(io::stdout().lock());
    write_symbols(&mut out, n.chars(), n.k())?;
    writeln!(out)?;
    out.flush()
}

fn describe(v: &Verdict) -> String {
    match &v.witness {
        None => "accepted".into(),
        Some(w) => {
            let allowed = match w.max_allowed {
                Some(hi) if hi == w.min_allowed => format!("{hi}"),
                Some(hi) => format!("{}..={hi}", w.min_allowed),
                None => format!(">= {}", w.min_allowed),
            };
            format!(
                "rejected: length-{} string {} occurs {} times (allowed {allowed})",
                w.m, w.string, w.count
            )
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Generate { k, l } => {
            print_sequence(&generate_pkl(k, l)?)?;
            Ok(true)
        }
        Command::Verify { input, json, max_m } => {
            let n = input.read()?;
            let v = is_pkl(&n);
            if json {
                let profile = max_m.map(|m| histograms(&n, m)).transpose()?;
                print_json(&VerdictReport {
                    accepted: v.accepted,
                    tier: if v.accepted { "pkl" } else { classify(&n).tier.name() },
                    witness: witness_report(&v),
                    profile,
                    classes: None,
                })?;
            } else {
                println!("{}", describe(&v));
            }
            Ok(v.accepted)
        }
        Command::Classify { input, json } => {
            let n = input.read()?;
            let c = classify(&n);
            // report the witness of the first class that fails
            let failing = [&c.lempel_radchenko, &c.covering, &c.pkl]
                .into_iter()
                .find(|v| !v.accepted);
            if json {
                let classes = BTreeMap::from([
                    ("lempel-radchenko", c.lempel_radchenko.accepted),
                    ("generalized-de-bruijn", c.is_generalized_de_bruijn()),
                    ("pkl", c.pkl.accepted),
                ]);
                print_json(&VerdictReport {
                    accepted: c.pkl.accepted,
                    tier: c.tier.name(),
                    witness: failing.and_then(witness_report),
                    profile: None,
                    classes: Some(classes),
                })?;
            } else {
                println!("{}", c.tier.name());
                if let Some(v) = failing {
                    println!("{}", describe(v));
                }
            }
            Ok(c.pkl.accepted)
        }
        Command::Profile { input, max_m, json } => {
            let n = input.read()?;
            let max_m = max_m.unwrap_or_else(|| ceil_log(n.len() as u64, n.k()).max(1) as usize);
            if json {
                let mut report = BTreeMap::new();
                for m in 1..=max_m.min(n.len()) {
                    let counts: BTreeMap<String, u64> = occurrence_profile(&n, m)?
                        .counts
                        .into_iter()
                        .map(|(s, c)| (s.to_text(), c))
                        .collect();
                    report.insert(m, counts);
                }
                print_json(&serde_json::json!({
                    "counts": report,
                    "histograms": histograms(&n, max_m)?,
                }))?;
            } else {
                let mut out = BufWriter::new(io::stdout().lock());
                for m in 1..=max_m.min(n.len()) {
                    writeln!(out, "m={m}")?;
                    for (s, c) in occurrence_profile(&n, m)?.counts {
                        writeln!(out, "{s}\t{c}")?;
                    }
                }
                out.flush()?;
            }
            Ok(true)
        }
        Command::Lift { input, json } => {
            let n = input.read()?;
            let fam = lempel_lift(&n);
            if json {
                let members: Vec<String> = fam.members().iter().map(|m| format_symbols(m.chars(), m.k())).collect();
                print_json(&serde_json::json!({ "d": fam.d(), "p": fam.p(), "members": members }))?;
            } else {
                let mut out = BufWriter::new(io::stdout().lock());
                for m in fam.members() {
                    write_symbols(&mut out, m.chars(), m.k())?;
                    writeln!(out)?;
                }
                out.flush()?;
            }
            Ok(true)
        }
        Command::Derive { input } => {
            print_sequence(&discrete_derivative(&input.read()?))?;
            Ok(true)
        }
        Command::JoinGraph { input, dot } => {
            let n = input.read()?;
            let fam = lempel_lift(&n);
            let g = build_join_graph(&fam, ceil_log(n.len() as u64, n.k()) as usize);
            if dot {
                print!("{}", g.to_dot());
            } else {
                for e in &g.edges {
                    println!("{} {} {}", e.a, e.b, e.label);
                }
            }
            Ok(true)
        }
        Command::Count {
            k,
            l,
            workers,
            budget,
            csv,
            json,
            dump,
        } => {
            let opts = CensusOptions {
                materialize: dump.is_some(),
                budget,
                workers,
            };
            let mut rows = Vec::new();
            let mut dump_file = dump.map(|p| File::create(p).map(BufWriter::new)).transpose()?;
            for len in l.0..=l.1 {
                let r = census_with(k, len, opts)?;
                if let (Some(f), Some(reps)) = (dump_file.as_mut(), &r.representatives) {
                    for n in reps {
                        write_symbols(f, n.chars(), k)?;
                        writeln!(f)?;
                    }
                }
                rows.push((len, r.count));
            }
            if let Some(mut f) = dump_file {
                f.flush()?;
            }
            if json {
                let rows: Vec<_> = rows
                    .iter()
                    .map(|&(l, count)| serde_json::json!({ "k": k, "l": l, "count": count }))
                    .collect();
                print_json(&rows)?;
            } else if csv {
                println!("L,count");
                for (l, c) in rows {
                    println!("{l},{c}");
                }
            } else if rows.len() == 1 {
                println!("{}", rows[0].1);
            } else {
                for (l, c) in rows {
                    println!("{l}\t{c}");
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
