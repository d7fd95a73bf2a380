//! `zimin`: command-line access to Zimin-word avoidance tools.
//!
//! Exit codes: 0 for success or a negative answer (the word avoids, the
//! pattern is unavoidable), 1 for a positive finding (the word encounters,
//! the pattern is avoidable, a golden list differs, a witness fails
//! verification), 2 for usage and input errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use zimin_core::bounds;
use zimin_core::golden;
use zimin_core::pattern::{encounters_pattern, instance_of_pattern, is_unavoidable};
use zimin_core::render::{decode_pbm, RenderSpec, DEFAULT_ROW_WIDTH};
use zimin_core::scanner::scan_for_instance;
use zimin_core::search::{
    certify_avoids, compute_f_parallel, enumerate_avoiders, SearchOptions, Verifier,
    DEFAULT_LENGTH_CAP,
};
use zimin_core::witness::{
    long_witness_search, LetterOrdering, RunLimits, WitnessParams, DEFAULT_NOISE_PERMILLE,
    DEFAULT_RESTART_AFTER,
};
use zimin_core::word::{format_word_list, Rendering};
use zimin_core::{is_zimin_instance, zimin, zimin_ruler, MorphismWitness, Pattern, Word};

#[derive(Parser)]
#[command(
    name = "zimin",
    version,
    about = "Zimin-word avoidance: thresholds, witnesses and bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Zimin word Z_n.
    Gen {
        n: usize,
        /// Build it from the ruler sequence instead of the doubling recursion.
        #[arg(long)]
        ruler: bool,
    },
    /// Test whether a word encounters Z_n or a pattern.
    Check {
        word: String,
        #[arg(long, conflicts_with = "pattern", required_unless_present = "pattern")]
        zimin: Option<usize>,
        #[arg(long)]
        pattern: Option<String>,
        /// Match the whole word instead of searching its subwords.
        #[arg(long)]
        exact: bool,
    },
    /// Decide whether a pattern is unavoidable.
    Unavoidable { pattern: String },
    /// Compute f(n, q) by exhaustive search.
    SearchF {
        n: usize,
        q: usize,
        /// Longest word to build before giving up.
        #[arg(long, default_value_t = DEFAULT_LENGTH_CAP)]
        cap: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Also write the report as JSON to this file.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Compare with the bundled word lists (n = 2 or 3, q = 2).
        #[arg(long)]
        golden: bool,
        /// Search only words starting with the first letter (counts only).
        #[arg(long)]
        symmetry: bool,
    },
    /// Look for a long Z_n-avoiding word by randomized depth-first search.
    Witness {
        n: usize,
        q: usize,
        #[arg(long)]
        target: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Resume from and periodically save to this file.
        #[arg(long, requires = "seed")]
        checkpoint: Option<PathBuf>,
        /// Time budget in seconds.
        #[arg(long, default_value_t = 600.0)]
        budget: f64,
        /// Stop once this many nodes have been explored in total.
        #[arg(long)]
        max_nodes: Option<u64>,
        /// Write the best word here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Ordering::Slack)]
        ordering: Ordering,
        #[arg(long, default_value_t = DEFAULT_NOISE_PERMILLE)]
        noise: u32,
        /// Nodes without progress before a restart; 0 never restarts.
        #[arg(long, default_value_t = DEFAULT_RESTART_AFTER)]
        restart_after: u64,
    },
    /// Count the Z_n-instances among q-ary words of length M.
    Count {
        n: usize,
        q: usize,
        #[arg(name = "M")]
        m: usize,
    },
    /// Evaluate the upper and lower bounds on f(n, q).
    Bounds {
        n: usize,
        q: usize,
        /// Also count instances for every length from |Z_n| up to this one.
        #[arg(long = "max-M")]
        max_m: Option<usize>,
    },
    /// Draw a binary word as a PBM image, or read one back with --decode.
    Render {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ROW_WIDTH)]
        width: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        decode: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Ordering {
    Slack,
    Shuffle,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Gen { n, ruler } => {
            let w = if ruler { zimin_ruler(n)? } else { zimin(n)? };
            println!("{}", w.render(Rendering::Letters)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            word,
            zimin,
            pattern,
            exact,
        } => {
            let w = Word::parse(&word)?;
            match (zimin, pattern) {
                (Some(n), _) => check_zimin(&w, n, exact),
                (None, Some(p)) => check_pattern(&w, &p, exact),
                (None, None) => unreachable!("clap requires one of them"),
            }
        }
        Command::Unavoidable { pattern } => {
            if is_unavoidable(&Pattern::parse(&pattern)?)? {
                println!("unavoidable");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("avoidable");
                Ok(ExitCode::from(1))
            }
        }
        Command::SearchF {
            n,
            q,
            cap,
            jobs,
            json,
            golden,
            symmetry,
        } => search_f(n, q, cap, jobs, json.as_deref(), golden, symmetry),
        Command::Witness {
            n,
            q,
            target,
            seed,
            checkpoint,
            budget,
            max_nodes,
            output,
            ordering,
            noise,
            restart_after,
        } => {
            let mut params = WitnessParams::new(n, q, target, seed.unwrap_or(0));
            params.ordering = match ordering {
                Ordering::Slack => LetterOrdering::Slack,
                Ordering::Shuffle => LetterOrdering::Shuffle,
            };
            params.noise_permille = noise;
            params.restart_after = restart_after;
            witness(
                params,
                checkpoint.as_deref(),
                budget,
                max_nodes,
                output.as_deref(),
            )
        }
        Command::Count { n, q, m } => {
            let c = bounds::count_instances(n, q, m)?;
            print_json(&json!({ "n": n, "q": q, "M": m, "count": c.count.to_string() }))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bounds { n, q, max_m } => bounds_report(n, q, max_m),
        Command::Render {
            file,
            width,
            output,
            decode,
        } => render(&file, width, output.as_deref(), decode),
    }
}

fn print_json(value: &serde_json::Value) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn check_zimin(w: &Word, n: usize, exact: bool) -> anyhow::Result<ExitCode> {
    if exact {
        return Ok(if is_zimin_instance(w, n) {
            println!("instance of Z_{n}");
            ExitCode::from(1)
        } else {
            println!("not an instance of Z_{n}");
            ExitCode::SUCCESS
        });
    }
    Ok(
        match scan_for_instance(w.letters(), n, w.alphabet_size())? {
            Some(span) => {
                let sub = w.subword(span.start, span.end);
                println!("encounters Z_{n} at {span}: {}", sub.render(style(w))?);
                ExitCode::from(1)
            }
            None => {
                println!("avoids");
                ExitCode::SUCCESS
            }
        },
    )
}

fn check_pattern(w: &Word, text: &str, exact: bool) -> anyhow::Result<ExitCode> {
    let pattern = Pattern::parse(text)?;
    let found = if exact {
        instance_of_pattern(w, &pattern)
    } else {
        encounters_pattern(w, &pattern)
    };
    Ok(match found {
        Some(m) => {
            let images = describe_images(&m, text, w)?;
            if exact {
                println!("instance: {images}");
            } else {
                println!("encounters {} at {}: {images}", text.trim(), m.span);
            }
            ExitCode::from(1)
        }
        None => {
            println!("{}", if exact { "not an instance" } else { "avoids" });
            ExitCode::SUCCESS
        }
    })
}

fn style(w: &Word) -> Rendering {
    Rendering::for_alphabet(w.alphabet_size())
}

/// `x=abb, y=c, ...` in order of first appearance in the pattern text.
fn describe_images(m: &MorphismWitness, text: &str, host: &Word) -> anyhow::Result<String> {
    let mut names: Vec<char> = Vec::new();
    for c in text.trim().chars() {
        if !names.contains(&c) {
            names.push(c);
        }
    }
    let parts = names
        .iter()
        .zip(&m.images)
        .map(|(name, image)| Ok(format!("{name}={}", image.render(style(host))?)))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(parts.join(", "))
}

fn search_f(
    n: usize,
    q: usize,
    cap: usize,
    jobs: usize,
    json_path: Option<&Path>,
    check_golden: bool,
    symmetry: bool,
) -> anyhow::Result<ExitCode> {
    let options = SearchOptions {
        length_cap: cap,
        symmetry_reduced: symmetry,
        ..Default::default()
    };
    let report = compute_f_parallel(n, q, &options, jobs.max(1))?;
    let mut out = String::new();
    match report.f_value {
        Some(f) => out.push_str(&format!("f({n},{q}) = {f}\n")),
        None => out.push_str(&format!("f({n},{q}) > {cap}\n")),
    }
    let counts: Vec<String> = report.counts.iter().map(u64::to_string).collect();
    out.push_str(&format!("avoiders by length: {}\n", counts.join(" ")));
    if report.f_value.is_some() && !symmetry {
        out.push_str(&format!(
            "maximal avoiders ({}{}):\n",
            report.maximal_avoiders.len(),
            if report.maximal_avoiders_truncated {
                ", truncated"
            } else {
                ""
            }
        ));
        out.push_str(&format_word_list(&report.maximal_avoiders)?);
    }
    let mut code = ExitCode::SUCCESS;
    if check_golden {
        let (expected, got) = match (n, q) {
            (2, 2) => (
                golden::z2_avoiders()?,
                enumerate_avoiders(2, 2, cap)?.collect::<Vec<_>>(),
            ),
            (3, 2) => (
                golden::z3_maximal_avoiders()?,
                report.maximal_avoiders.clone(),
            ),
            _ => bail!("golden lists exist only for n = 2 and n = 3 with q = 2"),
        };
        let missing: Vec<_> = expected
            .iter()
            .filter(|w| !got.contains(w))
            .cloned()
            .collect();
        let extra: Vec<_> = got
            .iter()
            .filter(|w| !expected.contains(w))
            .cloned()
            .collect();
        if missing.is_empty() && extra.is_empty() {
            out.push_str(&format!("golden: match ({} words)\n", expected.len()));
        } else {
            out.push_str(&format!(
                "golden: {} missing, {} extra\n",
                missing.len(),
                extra.len()
            ));
            for w in &missing {
                out.push_str(&format!("- {}\n", w.to_text()?));
            }
            for w in &extra {
                out.push_str(&format!("+ {}\n", w.to_text()?));
            }
            code = ExitCode::from(1);
        }
    }
    io::stdout().write_all(out.as_bytes())?;
    eprintln!(
        "nodes visited: {}, wall time: {:.3} s",
        report.nodes_visited,
        report.wall_time.as_secs_f64()
    );
    if let Some(path) = json_path {
        let text = serde_json::to_string_pretty(&report.to_json()?)?;
        fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(code)
}

fn witness(
    params: WitnessParams,
    checkpoint: Option<&Path>,
    budget: f64,
    max_nodes: Option<u64>,
    output: Option<&Path>,
) -> anyhow::Result<ExitCode> {
    if !(budget.is_finite() && budget >= 0.0) {
        bail!("budget must be a non-negative number of seconds");
    }
    let n = params.n;
    let limits = RunLimits {
        time_budget: Some(Duration::from_secs_f64(budget)),
        node_limit: max_nodes,
    };
    let state = long_witness_search(params, checkpoint, limits)?;
    let best = state.best_word();
    let (verdict, how) = certify_avoids(&best, n);
    let text = best.to_text()?;
    match output {
        Some(path) => fs::write(path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    let how = match how {
        Verifier::Naive => "all subwords",
        Verifier::SuffixChain => "suffix chain",
    };
    eprintln!(
        "best length {}, status {:?}, {} nodes, {} restarts",
        best.len(),
        state.status,
        state.nodes,
        state.restarts
    );
    if verdict.avoids {
        eprintln!("verified: avoids Z_{n} (checked by {how})");
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "verification FAILED: instance at {}",
            verdict.violation.expect("set on failure")
        );
        Ok(ExitCode::from(1))
    }
}

fn bounds_report(n: usize, q: usize, max_m: Option<usize>) -> anyhow::Result<ExitCode> {
    let mut report = json!({
        "schema_version": 1,
        "n": n,
        "q": q,
        "tower_upper_bound": bounds::tower_upper_bound(n, q)?.to_json(),
        "recurrence_upper_bound": bounds::recurrence_upper_bound(n, q)?.to_json(),
    });
    if q >= 2 {
        report["first_moment_max_length"] =
            bounds::first_moment_max_length(n, q)?.to_string().into();
        report["instance_probability_bound"] = bounds::probability_bound(n, q)?.to_string().into();
    }
    let mut code = ExitCode::SUCCESS;
    if let Some(max_m) = max_m {
        let sweep = bounds::lemma_sweep(n, q, max_m)?;
        if !sweep.violations().is_empty() {
            code = ExitCode::from(1);
        }
        report["sweep"] = sweep.to_json();
    }
    print_json(&report)?;
    Ok(code)
}

fn render(
    file: &Path,
    width: usize,
    output: Option<&Path>,
    decode: bool,
) -> anyhow::Result<ExitCode> {
    let input = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let text = if decode {
        format!("{}\n", decode_pbm(&input)?.to_text()?)
    } else {
        let line = input.lines().next().unwrap_or("");
        let word =
            Word::parse_with_alphabet(line.trim(), 2).context("render needs a binary word")?;
        RenderSpec::new(width)?.encode(&word)?
    };
    match output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(ExitCode::SUCCESS)
}
