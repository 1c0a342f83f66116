//! Batch front end: set up schemes, encode and decode messages, poke at the
//! word problem, and run the attack simulations, all over the text file
//! formats.
//!
//! Exit codes: 0 success, 2 usage or malformed input, 3 integrity or
//! threshold failure, 4 engine budget exhausted.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wpss::access::{build_access_structure, make_shares, Share};
use wpss::analysis::{coalition_attack, pool_attack};
use wpss::bits::Bits;
use wpss::combiner::{decode_message, decode_single, CombinerError, WordVerdict};
use wpss::dealer::{
    embed_rng, embed_signature, encode_message, encode_message_for_recipient, setup_scheme,
    DealerError, EncodingConfig, Platform, PlatformChoice,
};
use wpss::engine::{BoundedProver, Engine, DEFAULT_PROVER_BUDGET};
use wpss::files::{
    format_message, format_scheme, format_share, parse_message, parse_scheme, parse_share,
    SchemeFile,
};
use wpss::presentation::{Family, GroupPresentation};

#[derive(Parser)]
#[command(name = "wpss", version, about = "Threshold secret sharing over group presentations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scheme: one master file and n share files.
    Setup {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        /// Platform family: coxeter or polycyclic-builtin.
        #[arg(long)]
        family: String,
        #[arg(long)]
        seed: u64,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
    },
    /// Encode a bit payload as a message file.
    Encode {
        /// Master scheme file from `setup`.
        #[arg(long)]
        scheme: PathBuf,
        /// Payload bits, e.g. 10110.
        #[arg(long, conflicts_with = "bits_file")]
        bits: Option<String>,
        /// Read the payload bits from a file instead.
        #[arg(long)]
        bits_file: Option<PathBuf>,
        /// Signature bits embedded at a hidden offset.
        #[arg(long)]
        signature: Option<String>,
        /// Encode for this participant only; decode needs just their share.
        #[arg(long)]
        recipient: Option<usize>,
        #[arg(long)]
        seed: u64,
        /// Output message file.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Decode a message file with shares; prints the bit string.
    Decode {
        /// Share file; repeat for each participant.
        #[arg(long = "share", required = true)]
        shares: Vec<PathBuf>,
        #[arg(long)]
        message: PathBuf,
        /// Single-share decode for targeted messages.
        #[arg(long)]
        single: bool,
    },
    /// Decide one word against a presentation file.
    Wp {
        /// Presentation text block file.
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long)]
        word: String,
        /// Acknowledge that polycyclic presentations are not checked for
        /// consistency.
        #[arg(long)]
        assert_consistent: bool,
    },
    /// Run adversary simulations: a sub-threshold coalition or a pool
    /// search.
    Attack {
        /// Coalition share file; repeat per member.
        #[arg(long = "share")]
        shares: Vec<PathBuf>,
        /// Directory of candidate presentation files.
        #[arg(long)]
        pool: Option<PathBuf>,
        #[arg(long)]
        message: PathBuf,
        /// Known signature bits to rank pool candidates by.
        #[arg(long)]
        signature: Option<String>,
    },
}

/// Encoding knobs shared by both encode paths.
#[derive(Args)]
struct Tuning {
    /// Fraction of relators each identity word must involve.
    #[arg(long)]
    coverage: Option<f64>,
    /// Commutator factors per identity word.
    #[arg(long)]
    commutators: Option<usize>,
    /// Random conjugator length.
    #[arg(long)]
    conjugator_length: Option<usize>,
    /// Post-reduction cap on emitted word length.
    #[arg(long)]
    max_word_length: Option<usize>,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> CliError {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    fn integrity(message: impl Into<String>) -> CliError {
        CliError {
            code: 3,
            message: message.into(),
        }
    }

    fn budget(message: impl Into<String>) -> CliError {
        CliError {
            code: 4,
            message: message.into(),
        }
    }
}

impl From<DealerError> for CliError {
    fn from(e: DealerError) -> CliError {
        match &e {
            DealerError::VerificationFailed { .. } => CliError::budget(e.to_string()),
            DealerError::Engine(inner) if inner.is_budget() => CliError::budget(e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

impl From<CombinerError> for CliError {
    fn from(e: CombinerError) -> CliError {
        match &e {
            CombinerError::BelowThreshold { .. }
            | CombinerError::SchemeMismatch { .. }
            | CombinerError::IncompleteAtThreshold { .. }
            | CombinerError::UndecidedWord { .. }
            | CombinerError::Access(_) => CliError::integrity(e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

fn parse_bits(text: &str, what: &str) -> Result<Bits, CliError> {
    text.trim()
        .parse()
        .map_err(|e| CliError::usage(format!("bad {what}: {e}")))
}

fn budget_override() -> Result<Option<u64>, CliError> {
    match std::env::var("WPSS_BUDGET") {
        Ok(text) => text
            .parse()
            .map(Some)
            .map_err(|_| CliError::usage(format!("WPSS_BUDGET must be an integer, got {text:?}"))),
        Err(_) => Ok(None),
    }
}

fn load_shares(paths: &[PathBuf]) -> Result<Vec<Share>, CliError> {
    paths
        .iter()
        .map(|path| {
            parse_share(&read_text(path)?)
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Setup {
            n,
            t,
            family,
            seed,
            out,
        } => cmd_setup(n, t, &family, seed, &out),
        Command::Encode {
            scheme,
            bits,
            bits_file,
            signature,
            recipient,
            seed,
            out,
            tuning,
        } => cmd_encode(
            &scheme, bits, bits_file, signature, recipient, seed, &out, &tuning,
        ),
        Command::Decode {
            shares,
            message,
            single,
        } => cmd_decode(&shares, &message, single),
        Command::Wp {
            presentation,
            word,
            assert_consistent,
        } => cmd_wp(&presentation, &word, assert_consistent),
        Command::Attack {
            shares,
            pool,
            message,
            signature,
        } => cmd_attack(&shares, pool.as_deref(), &message, signature.as_deref()),
    }
}

fn cmd_setup(n: usize, t: usize, family: &str, seed: u64, out: &Path) -> Result<(), CliError> {
    let choice = PlatformChoice::parse(family).ok_or_else(|| {
        CliError::usage(format!(
            "unknown family {family:?}; use coxeter or polycyclic-builtin"
        ))
    })?;
    let setup = setup_scheme(choice, n, t, seed).map_err(CliError::from)?;
    fs::create_dir_all(out)
        .map_err(|e| CliError::usage(format!("cannot create {}: {e}", out.display())))?;
    let scheme_file = SchemeFile {
        scheme_id: setup.scheme_id,
        params: setup.structure.params,
        presentation: setup.presentation.clone(),
    };
    write_text(&out.join("scheme.wpss"), &format_scheme(&scheme_file))?;
    for share in &setup.shares {
        write_text(
            &out.join(format!("share-{}.wpss", share.participant)),
            &format_share(share),
        )?;
    }
    let report = &setup.threshold_report;
    println!("scheme-id: {}", setup.scheme_id);
    println!(
        "n: {}  t: {}  m: {}  k: {}",
        n,
        t,
        setup.structure.params.m(),
        setup.presentation.generators().count()
    );
    println!(
        "threshold property: {} ({} full + {} sub-threshold coalitions checked, {} missing exactly one)",
        if report.pass { "PASS" } else { "FAIL" },
        report.full_coalitions_checked,
        report.sub_coalitions_checked,
        report.sub_missing_exactly_one
    );
    println!("wrote scheme.wpss and {} share files to {}", n, out.display());
    if !report.pass {
        return Err(CliError::integrity("threshold property check failed"));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_encode(
    scheme_path: &Path,
    bits: Option<String>,
    bits_file: Option<PathBuf>,
    signature: Option<String>,
    recipient: Option<usize>,
    seed: u64,
    out: &Path,
    tuning: &Tuning,
) -> Result<(), CliError> {
    let scheme = parse_scheme(&read_text(scheme_path)?)
        .map_err(|e| CliError::usage(format!("{}: {e}", scheme_path.display())))?;
    let payload_text = match (bits, bits_file) {
        (Some(text), None) => text,
        (None, Some(path)) => read_text(&path)?,
        (None, None) => return Err(CliError::usage("one of --bits or --bits-file is required")),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    let payload = parse_bits(&payload_text, "--bits")?;
    if payload.is_empty() {
        return Err(CliError::usage("payload must contain at least one bit"));
    }
    let carried = match signature {
        Some(text) => {
            let sig = parse_bits(&text, "--signature")?;
            embed_signature(&payload, &sig, &mut embed_rng(seed)).map_err(CliError::from)?
        }
        None => payload,
    };

    let mut cfg = EncodingConfig::new(seed);
    if let Some(coverage) = tuning.coverage {
        cfg.coverage_fraction = coverage;
    }
    if let Some(commutators) = tuning.commutators {
        cfg.commutator_count = Some(commutators);
    }
    if let Some(len) = tuning.conjugator_length {
        cfg.conjugator_length = len;
    }
    if let Some(cap) = tuning.max_word_length {
        cfg.max_word_length = cap;
    }
    cfg.decode_budget = budget_override()?;

    let platform = Platform::new(scheme.presentation.clone()).map_err(CliError::from)?;
    let message = match recipient {
        Some(participant) => {
            let structure =
                build_access_structure(scheme.params.n(), scheme.params.t()).map_err(|e| {
                    CliError::usage(format!("scheme parameters no longer valid: {e}"))
                })?;
            let shares = make_shares(&scheme.presentation, &structure, scheme.scheme_id)
                .map_err(|e| CliError::usage(e.to_string()))?;
            let share = shares
                .iter()
                .find(|s| s.participant == participant)
                .ok_or_else(|| {
                    CliError::usage(format!(
                        "recipient {participant} outside 1..={}",
                        scheme.params.n()
                    ))
                })?;
            let message = encode_message_for_recipient(&platform, share, &carried, &cfg)
                .map_err(CliError::from)?;
            println!(
                "encoded {} bits for participant {participant} using only their {} relators",
                carried.len(),
                share.relators.len()
            );
            message
        }
        None => {
            let outcome = encode_message(&platform, scheme.scheme_id, &carried, &cfg)
                .map_err(CliError::from)?;
            println!(
                "encoded {} bits; identity words involve {}/{} relators",
                carried.len(),
                outcome.coverage.len(),
                outcome.relator_count
            );
            for warning in &outcome.warnings {
                eprintln!("warning: {warning}");
            }
            outcome.message
        }
    };
    write_text(out, &format_message(&message, scheme.presentation.generators()))?;
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_decode(share_paths: &[PathBuf], message_path: &Path, single: bool) -> Result<(), CliError> {
    let shares = load_shares(share_paths)?;
    let message = parse_message(&read_text(message_path)?, &shares[0].generators)
        .map_err(|e| CliError::usage(format!("{}: {e}", message_path.display())))?;
    let budget = budget_override()?;
    let result = if single {
        if shares.len() != 1 {
            return Err(CliError::usage("--single takes exactly one --share"));
        }
        decode_single(&shares[0], &message, budget).map_err(CliError::from)?
    } else {
        decode_message(&shares, &message, budget).map_err(CliError::from)?
    };
    println!("{}", result.bits);
    let undecided = result
        .per_word
        .iter()
        .filter(|r| r.verdict == WordVerdict::Undecided)
        .count();
    if undecided > 0 {
        eprintln!("note: {undecided} word(s) undecided with this share; reported as 0");
    }
    Ok(())
}

fn cmd_wp(presentation_path: &Path, word_text: &str, assert_consistent: bool) -> Result<(), CliError> {
    let presentation = GroupPresentation::parse_text_block(&read_text(presentation_path)?)
        .map_err(|e| CliError::usage(format!("{}: {e}", presentation_path.display())))?;
    let word = presentation
        .generators()
        .parse_word(word_text)
        .map_err(|e| CliError::usage(format!("bad --word: {e}")))?;
    if presentation.family() == Family::Polycyclic && !assert_consistent {
        return Err(CliError::usage(
            "polycyclic presentations are not verified for consistency; decisions are only \
             meaningful for consistent ones. Pass --assert-consistent to proceed",
        ));
    }
    let budget = budget_override()?;
    match presentation.family() {
        Family::Raw => {
            // No exact engine; the sound bounded prover can still certify
            // identities.
            let prover =
                BoundedProver::new(presentation.relators().iter().map(|r| &r.word));
            let (proved, explored) =
                prover.proves_identity(&word, budget.unwrap_or(DEFAULT_PROVER_BUDGET));
            if proved {
                println!("identity (bounded proof, {explored} states)");
                Ok(())
            } else {
                println!("undecided ({explored} states searched)");
                Err(CliError::budget(
                    "raw presentations only admit bounded identity proofs",
                ))
            }
        }
        _ => {
            let engine = Engine::for_presentation(&presentation)
                .map_err(|e| CliError::usage(e.to_string()))?;
            let budget = budget.unwrap_or_else(|| engine.default_budget());
            match engine.decide(&word, budget) {
                Ok(decision) => {
                    println!(
                        "{} (work {})",
                        if decision.is_identity {
                            "identity"
                        } else {
                            "non-identity"
                        },
                        decision.work
                    );
                    Ok(())
                }
                Err(e) if e.is_budget() => {
                    println!("undecided (budget {budget} exhausted)");
                    Err(CliError::budget(e.to_string()))
                }
                Err(e) => Err(CliError::usage(e.to_string())),
            }
        }
    }
}

fn cmd_attack(
    share_paths: &[PathBuf],
    pool: Option<&Path>,
    message_path: &Path,
    signature: Option<&str>,
) -> Result<(), CliError> {
    match (share_paths.is_empty(), pool) {
        (false, None) => {
            let shares = load_shares(share_paths)?;
            let message = parse_message(&read_text(message_path)?, &shares[0].generators)
                .map_err(|e| CliError::usage(format!("{}: {e}", message_path.display())))?;
            let report = coalition_attack(&shares, &message, budget_override()?)
                .map_err(|e| CliError::integrity(e.to_string()))?;
            print!("{report}");
            Ok(())
        }
        (true, Some(dir)) => {
            let signature = parse_bits(signature.unwrap_or(""), "--signature")?;
            let mut paths: Vec<PathBuf> = fs::read_dir(dir)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", dir.display())))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            paths.sort();
            if paths.is_empty() {
                return Err(CliError::usage(format!(
                    "pool directory {} has no files",
                    dir.display()
                )));
            }
            let pool: Vec<GroupPresentation> = paths
                .iter()
                .map(|path| {
                    GroupPresentation::parse_text_block(&read_text(path)?)
                        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
                })
                .collect::<Result<_, _>>()?;
            let gens = pool[0].generators();
            for (path, candidate) in paths.iter().zip(&pool) {
                if candidate.generators() != gens {
                    return Err(CliError::usage(format!(
                        "{}: pool candidates must share one public generator list",
                        path.display()
                    )));
                }
            }
            let message = parse_message(&read_text(message_path)?, gens)
                .map_err(|e| CliError::usage(format!("{}: {e}", message_path.display())))?;
            let budget = budget_override()?.unwrap_or(DEFAULT_PROVER_BUDGET);
            let report = pool_attack(&pool, &message, &signature, budget);
            print!("{report}");
            for candidate in report.candidates.iter().filter(|c| c.matched()) {
                println!(
                    "match: {}",
                    paths[candidate.position].display()
                );
            }
            Ok(())
        }
        (false, Some(_)) => Err(CliError::usage(
            "use either --share (coalition) or --pool (pool search), not both",
        )),
        (true, None) => Err(CliError::usage(
            "attack needs --share files or a --pool directory",
        )),
    }
}
