//! `sofic` — analyze labeled-graph presentations of irreducible sofic
//! shifts: Fischer covers, AFT/PET/near-Markov classification, skewing
//! matrices, and flow-equivalence invariants.
//!
//! Exit codes: 0 success (or a true verdict), 1 false verdict, 2 invalid
//! input, 3 internal inconsistency (an oracle disagreement).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sofic_core::analysis::{analyze, render_bf, render_triple, AnalysisError, AnalysisOptions};
use sofic_core::invariants::{near_markov_fe, sft_flow_equivalent};
use sofic_core::presentation::{parse, SymbolicPresentation};

#[derive(Parser)]
#[command(name = "sofic", version, about = "Flow-equivalence analysis of sofic shift presentations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Emit a single JSON document instead of the plain-text summary.
    #[arg(long)]
    json: bool,
    /// Verify the input is already a Fischer cover instead of building one.
    #[arg(long)]
    assume_fischer: bool,
    /// Word length bound for oracle language probes.
    #[arg(long, value_name = "L", default_value_t = sofic_core::oracle::DEFAULT_WORD_BOUND)]
    word_bound: usize,
    /// Period bound for oracle periodic-point probes.
    #[arg(long, visible_alias = "period", value_name = "P", default_value_t = sofic_core::oracle::DEFAULT_PERIOD_BOUND)]
    period_bound: usize,
    /// Length bound for the magic-word search (default: subset-automaton
    /// diameter for the input size).
    #[arg(long, value_name = "N")]
    magic_bound: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis of one or more presentation files.
    Analyze {
        #[command(flatten)]
        flags: CommonFlags,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Decide flow equivalence of two presentations.
    Fe {
        /// Invariant family to decide with.
        #[arg(long, value_enum)]
        mode: FeMode,
        #[command(flatten)]
        flags: CommonFlags,
        file_a: PathBuf,
        file_b: PathBuf,
    },
    /// Symbol-expand a presentation and print the canonical result.
    Expand { file: PathBuf, symbol: String },
    /// Reverse a presentation in time and print the canonical result.
    Reverse { file: PathBuf },
    /// Run all oracle cross-checks; exit 3 on any disagreement.
    Oracle {
        #[command(flatten)]
        flags: CommonFlags,
        file: PathBuf,
    },
    /// Construct (or verify) the right Fischer cover and print it.
    Fischer {
        #[command(flatten)]
        flags: CommonFlags,
        file: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FeMode {
    /// Franks invariants of the presentations read as SFT adjacency data.
    Sft,
    /// Full near-Markov invariant triples of the presented sofic shifts.
    NearMarkov,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

type Failure = Box<dyn std::error::Error>;

fn read_presentation(path: &Path) -> Result<SymbolicPresentation, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Ok(parse(&text).map_err(|e| format!("{}: {e}", path.display()))?)
}

fn options(flags: &CommonFlags, with_oracle: bool) -> AnalysisOptions {
    AnalysisOptions {
        assume_fischer: flags.assume_fischer,
        word_bound: flags.word_bound,
        period_bound: flags.period_bound,
        magic_bound: flags.magic_bound,
        with_oracle,
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Analyze { flags, files } => cmd_analyze(&flags, &files, false),
        Command::Oracle { flags, file } => cmd_analyze(&flags, &[file], true),
        Command::Fe { mode, flags, file_a, file_b } => cmd_fe(mode, &flags, &file_a, &file_b),
        Command::Expand { file, symbol } => {
            let p = read_presentation(&file)?;
            let q = p.symbol_expand(&symbol)?;
            print!("{}", q.render());
            Ok(ExitCode::SUCCESS)
        }
        Command::Reverse { file } => {
            let p = read_presentation(&file)?;
            print!("{}", p.reverse().render());
            Ok(ExitCode::SUCCESS)
        }
        Command::Fischer { flags, file } => cmd_fischer(&flags, &file),
    }
}

fn rejection(stage: &str, detail: &str, json: bool) -> ExitCode {
    if json {
        let doc = serde_json::json!({
            "schema": "sofic-rejection/1",
            "stage": stage,
            "detail": detail,
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
    } else {
        eprintln!("rejected at {stage}: {detail}");
    }
    ExitCode::from(2)
}

fn cmd_analyze(flags: &CommonFlags, files: &[PathBuf], with_oracle: bool) -> Result<ExitCode, Failure> {
    let opts = options(flags, with_oracle);
    let mut reports = Vec::new();
    let mut oracle_failed = false;
    for file in files {
        let p = read_presentation(file)?;
        match analyze(&p, &opts) {
            Ok(a) => {
                if let Some(o) = &a.report.oracle {
                    if !o.all_ok {
                        oracle_failed = true;
                    }
                }
                reports.push((file.clone(), a.report));
            }
            Err(AnalysisError::Rejected { stage, detail, report }) => {
                if flags.json {
                    let doc = serde_json::json!({
                        "schema": "sofic-rejection/1",
                        "file": file.display().to_string(),
                        "stage": stage,
                        "detail": detail,
                        "validation": report,
                    });
                    println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
                } else {
                    eprintln!("{}: rejected at {stage}: {detail}", file.display());
                }
                return Ok(ExitCode::from(2));
            }
            Err(AnalysisError::Failed(e)) => return Err(e.into()),
        }
    }
    if flags.json {
        if reports.len() == 1 {
            println!("{}", serde_json::to_string_pretty(&reports[0].1).expect("serializable"));
        } else {
            #[derive(Serialize)]
            struct Batch<'a> {
                schema: &'static str,
                reports: Vec<&'a sofic_core::AnalysisReport>,
            }
            let batch =
                Batch { schema: "sofic-analysis-batch/1", reports: reports.iter().map(|(_, r)| r).collect() };
            println!("{}", serde_json::to_string_pretty(&batch).expect("serializable"));
        }
    } else {
        for (file, report) in &reports {
            println!("== {}", file.display());
            print!("{}", report.render_human());
        }
    }
    Ok(if oracle_failed { ExitCode::from(3) } else { ExitCode::SUCCESS })
}

fn cmd_fischer(flags: &CommonFlags, file: &Path) -> Result<ExitCode, Failure> {
    let p = read_presentation(file)?;
    match analyze(&p, &options(flags, false)) {
        Ok(a) => {
            if flags.json {
                println!("{}", serde_json::to_string_pretty(&a.report.cover).expect("serializable"));
            } else {
                print!("{}", a.report.cover.presentation);
                for st in &a.report.cover.states {
                    println!(
                        "# state {} <- {{{}}} magic {}",
                        st.name,
                        st.provenance.join(" "),
                        st.magic_word.join(" ")
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(AnalysisError::Rejected { stage, detail, .. }) => Ok(rejection(stage, &detail, flags.json)),
        Err(AnalysisError::Failed(e)) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct FeDocument {
    schema: &'static str,
    mode: &'static str,
    equivalent: bool,
    left: serde_json::Value,
    right: serde_json::Value,
    explanation: String,
}

fn cmd_fe(mode: FeMode, flags: &CommonFlags, file_a: &Path, file_b: &Path) -> Result<ExitCode, Failure> {
    let pa = read_presentation(file_a)?;
    let pb = read_presentation(file_b)?;
    let doc = match mode {
        FeMode::Sft => {
            let (ta, tb) = (pa.trim(), pb.trim());
            if ta.is_empty() || tb.is_empty() {
                return Ok(rejection("trim", "presentation trims to empty", flags.json));
            }
            let v = match sft_flow_equivalent(&ta.adjacency(), &tb.adjacency()) {
                Ok(v) => v,
                Err(e) => return Ok(rejection("sft-fe", &e.to_string(), flags.json)),
            };
            FeDocument {
                schema: "sofic-fe/1",
                mode: "sft",
                equivalent: v.equivalent,
                left: serde_json::to_value(render_bf(&v.left)).expect("serializable"),
                right: serde_json::to_value(render_bf(&v.right)).expect("serializable"),
                explanation: v.explanation,
            }
        }
        FeMode::NearMarkov => {
            let opts = options(flags, false);
            let mut sides = Vec::new();
            for (name, p) in [("left", &pa), ("right", &pb)] {
                match analyze(p, &opts) {
                    Ok(a) => {
                        if !a.class.is_near_markov {
                            let w = a.class.near_markov_witness.clone().unwrap_or_default();
                            return Ok(rejection(
                                "near-markov",
                                &format!("{name} input is not near Markov: {w}"),
                                flags.json,
                            ));
                        }
                        sides.push(a);
                    }
                    Err(AnalysisError::Rejected { stage, detail, .. }) => {
                        return Ok(rejection(stage, &format!("{name} input: {detail}"), flags.json))
                    }
                    Err(AnalysisError::Failed(e)) => return Err(e.into()),
                }
            }
            let (a, b) = (&sides[0], &sides[1]);
            let (ta, tb) = (a.triple.as_ref().unwrap(), b.triple.as_ref().unwrap());
            let v = match near_markov_fe((&a.cover, ta), (&b.cover, tb)) {
                Ok(v) => v,
                Err(e) => return Ok(rejection("near-markov-fe", &e.to_string(), flags.json)),
            };
            FeDocument {
                schema: "sofic-fe/1",
                mode: "near-markov",
                equivalent: v.equivalent,
                left: serde_json::to_value(render_triple(ta)).expect("serializable"),
                right: serde_json::to_value(render_triple(tb)).expect("serializable"),
                explanation: format!(
                    "{}; multiplicity graphs {}",
                    v.sft.explanation,
                    if v.mugraph_iso { "isomorphic" } else { "not isomorphic" }
                ),
            }
        }
    };
    if flags.json {
        println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
    } else {
        println!("flow equivalent: {}", doc.equivalent);
        println!("left:  {}", doc.left);
        println!("right: {}", doc.right);
        println!("{}", doc.explanation);
    }
    Ok(if doc.equivalent { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
