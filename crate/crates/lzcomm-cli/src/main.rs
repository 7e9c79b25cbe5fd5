//! `lzcomm` — factorize strings, manipulate balanced grammars, run the
//! two-party protocols (in process or across sockets) and drive the
//! experiment scans.
//!
//! Machine-readable output goes to stdout (JSON values or raw strings),
//! diagnostics to stderr; the exit code is 0 exactly when no error occurred.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lzcomm::experiments::{
    avl_chain_scan, bench_csv, chain_csv, gen_family, lower_bound_csv, protocol_bench, zeta_csv,
    zeta_scan, BenchParams, FamilyParams, ZetaCorpus,
};
use lzcomm::grammar::{AvlGrammar, GrammarPool};
use lzcomm::protocol::{
    run_hamming_in_process, run_lcp_in_process, run_socket_party, summary_for, to_jsonl,
    InputMeta, ProtocolConfig, ProtocolKind, SessionParams, Speaker, Transcript,
};
use lzcomm::strings::{factorize, Factorization, Mode, SymbolString};
use std::fs;
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "lzcomm", version, about = "LZ77 factorizations, balanced grammars and compressed two-party protocols")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Ints,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Lzn,
    Lzs,
    Cn,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Lzn => Mode::Lzn,
            ModeArg::Lzs => Mode::Lzs,
            ModeArg::Cn => Mode::Cn,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Factorize a string; prints the factor count.
    Factorize {
        /// Input string file.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        /// Write the factorization file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct the string from a factorization file.
    Decompress {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build, combine, split, expand or validate balanced grammars.
    Grammar {
        #[command(subcommand)]
        cmd: GrammarCmd,
    },
    /// Run a two-party protocol.
    Protocol {
        #[command(subcommand)]
        cmd: ProtocolCmd,
    },
    /// Corpus generators and scans; CSV goes to --out.
    Experiment {
        #[command(subcommand)]
        cmd: ExperimentCmd,
    },
}

#[derive(Subcommand)]
enum GrammarCmd {
    Build {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[arg(long)]
        out: PathBuf,
    },
    Concat {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    Split {
        #[arg(long)]
        grammar: PathBuf,
        /// 1-based split position i: prefix holds positions 1..i-1.
        #[arg(long)]
        at: u64,
        #[arg(long)]
        out_prefix: Option<PathBuf>,
        #[arg(long)]
        out_suffix: Option<PathBuf>,
    },
    Expand {
        #[arg(long)]
        grammar: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Validate {
        #[arg(long)]
        grammar: PathBuf,
    },
}

#[derive(Args, Clone)]
struct ProtocolOpts {
    /// Shared public-coin seed (falls back to $LZCOMM_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Bits charged per transmitted fingerprint.
    #[arg(long, default_value_t = 64)]
    width: u32,
    /// Error budget in (0, 1/2).
    #[arg(long, default_value_t = 9.5367431640625e-7)]
    epsilon: f64,
    /// Disable sentinel wrapping (Hamming only).
    #[arg(long)]
    no_sentinel: bool,
    /// Re-check the located boundary with an independent fingerprint base.
    #[arg(long)]
    verify_pass: bool,
    /// Write the transcript as JSON lines.
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Run both parties here: Alice's factorization file.
    #[arg(long)]
    alice: Option<PathBuf>,
    /// Run both parties here: Bob's factorization file.
    #[arg(long)]
    bob: Option<PathBuf>,
    /// Listen for the peer and play Alice (0 picks a free port).
    #[arg(long)]
    listen: Option<u16>,
    /// Connect to a listening peer and play Bob.
    #[arg(long)]
    connect: Option<String>,
    /// This party's factorization file (socket modes).
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ProtocolCmd {
    /// Longest common prefix of the two compressed strings.
    Lcp(ProtocolOpts),
    /// Hamming distance of the two equal-length compressed strings.
    Hamming(ProtocolOpts),
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Factor counts of the alternating-block family and its zero-run
    /// suffixes, with the exact h=1 formulas checked.
    Family {
        #[arg(long, default_value_t = 4)]
        sigma_min: u32,
        #[arg(long, default_value_t = 128)]
        sigma_max: u32,
        /// Comma-separated run lengths; `half` and `full` scale with sigma.
        #[arg(long, default_value = "1")]
        h: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Factor counts of every suffix of a corpus.
    Zeta {
        #[arg(long, value_enum, default_value = "lzn")]
        mode: ModeArg,
        /// Exhaustive corpus: alphabet size.
        #[arg(long)]
        exhaustive_sigma: Option<u32>,
        /// Exhaustive corpus: maximum length.
        #[arg(long)]
        exhaustive_max_len: Option<usize>,
        /// Random corpus: string count.
        #[arg(long)]
        random_count: Option<usize>,
        #[arg(long, default_value_t = 256)]
        random_len: usize,
        #[arg(long, default_value_t = 2)]
        random_sigma: u32,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Factor counts against grammar sizes over sampled suffixes.
    AvlChain {
        /// Comma-separated family alphabet sizes to include.
        #[arg(long, default_value = "8,16,32")]
        family_sigmas: String,
        #[arg(long, default_value_t = 50)]
        random_count: usize,
        #[arg(long, default_value_t = 2048)]
        random_len: usize,
        #[arg(long, default_value_t = 2)]
        random_sigma: u32,
        /// Suffix positions sampled per string.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hamming protocol round/bit aggregates over planted-mismatch pairs.
    Bench {
        #[arg(long, default_value_t = 4096)]
        n: usize,
        /// Comma-separated planted mismatch counts.
        #[arg(long, default_value = "0,1,2,5")]
        d: String,
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        #[arg(long, default_value_t = 2)]
        sigma: u32,
        #[arg(long, default_value_t = 64)]
        width: u32,
        #[arg(long)]
        no_sentinel: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn effective_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("LZCOMM_SEED")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(0)
}

fn read_string(path: &Path, format: FormatArg) -> Result<SymbolString> {
    let raw = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    match format {
        FormatArg::Text => {
            let trimmed = raw.strip_suffix('\n').unwrap_or(&raw);
            Ok(SymbolString::from_text(trimmed))
        }
        FormatArg::Ints => Ok(SymbolString::from_ints(&raw)?),
    }
}

fn render_string(s: &SymbolString, format: FormatArg) -> Result<String> {
    Ok(match format {
        FormatArg::Text => s.to_text()?,
        FormatArg::Ints => s.to_ints(),
    })
}

fn read_factorization(path: &Path) -> Result<Factorization> {
    let raw = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Factorization::parse(&raw)?)
}

fn read_grammar(path: &Path) -> Result<(GrammarPool, AvlGrammar)> {
    let raw = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(GrammarPool::import(&raw)?)
}

fn write_out(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => write_out(p, content),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| anyhow!("bad {what} value {t:?}"))
        })
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Factorize {
            input,
            mode,
            format,
            out,
        } => {
            let s = read_string(&input, format)?;
            let fz = factorize(&s, mode.into());
            if let Some(out) = out {
                write_out(&out, &fz.to_text())?;
            }
            println!("{}", fz.size());
            Ok(())
        }
        Command::Decompress { input, format, out } => {
            let fz = read_factorization(&input)?;
            let s = fz.decompress()?;
            emit(out.as_deref(), &render_string(&s, format)?)
        }
        Command::Grammar { cmd } => run_grammar(cmd),
        Command::Protocol { cmd } => run_protocol(cmd),
        Command::Experiment { cmd } => run_experiment(cmd),
    }
}

fn run_grammar(cmd: GrammarCmd) -> Result<()> {
    match cmd {
        GrammarCmd::Build { input, format, out } => {
            let s = read_string(&input, format)?;
            let mut pool = GrammarPool::new();
            let g = pool.build(&s)?;
            write_out(&out, &pool.export(g))?;
            println!(
                "{}",
                serde_json::json!({
                    "size": pool.reachable_size(g),
                    "height": pool.height(g),
                    "length": pool.expansion_len(g),
                })
            );
            Ok(())
        }
        GrammarCmd::Concat { left, right, out } => {
            let (mut pool, ga) = read_grammar(&left)?;
            let (pool_b, gb) = read_grammar(&right)?;
            // Transplant the right grammar into the left pool.
            let dump = pool_b.export(gb);
            let gb = import_into(&mut pool, &dump)?;
            let gc = pool.concat(ga, gb);
            write_out(&out, &pool.export(gc))?;
            println!(
                "{}",
                serde_json::json!({
                    "size": pool.reachable_size(gc),
                    "height": pool.height(gc),
                    "length": pool.expansion_len(gc),
                })
            );
            Ok(())
        }
        GrammarCmd::Split {
            grammar,
            at,
            out_prefix,
            out_suffix,
        } => {
            let (mut pool, g) = read_grammar(&grammar)?;
            let len = pool.expansion_len(g);
            if at < 1 || at > len {
                bail!("split position {at} out of range 1..={len}");
            }
            let (prefix, suffix) = pool.split_at(g, at - 1)?;
            let suffix = suffix.expect("suffix nonempty for in-range positions");
            if let (Some(path), Some(p)) = (&out_prefix, prefix) {
                write_out(path, &pool.export(p))?;
            }
            if let Some(path) = &out_suffix {
                write_out(path, &pool.export(suffix))?;
            }
            println!(
                "{}",
                serde_json::json!({
                    "prefix_size": prefix.map(|p| pool.reachable_size(p)).unwrap_or(0),
                    "suffix_size": pool.reachable_size(suffix),
                })
            );
            Ok(())
        }
        GrammarCmd::Expand {
            grammar,
            format,
            out,
        } => {
            let (pool, g) = read_grammar(&grammar)?;
            let s = pool.expand(g);
            emit(out.as_deref(), &render_string(&s, format)?)
        }
        GrammarCmd::Validate { grammar } => {
            // Import re-derives the caches, so validate the raw structure
            // with the cached fields exactly as stored in the file.
            let raw = fs::read_to_string(&grammar)
                .with_context(|| format!("reading {}", grammar.display()))?;
            match GrammarPool::import(&raw) {
                Ok((pool, g)) => {
                    let report = pool.validate(g);
                    println!(
                        "{}",
                        serde_json::json!({
                            "ok": report.is_ok(),
                            "reachable": report.reachable,
                        })
                    );
                    Ok(())
                }
                Err(e) => {
                    println!("{}", serde_json::json!({ "ok": false }));
                    Err(e.into())
                }
            }
        }
    }
}

fn import_into(pool: &mut GrammarPool, dump: &str) -> Result<AvlGrammar> {
    // Transplant the dumped grammar production by production; children always
    // precede parents after a round trip through import.
    let (src, root) = GrammarPool::import(dump)?;
    let mut map = vec![0u32; src.minted()];
    for id in 0..src.minted() as u32 {
        use lzcomm::grammar::ProdKind;
        map[id as usize] = match src.production(id).kind {
            ProdKind::Terminal(sym) => pool.terminal(sym),
            ProdKind::Binary(l, r) => pool.binary(map[l as usize], map[r as usize]),
        };
    }
    Ok(AvlGrammar {
        root: map[root.root as usize],
    })
}

fn protocol_config(opts: &ProtocolOpts) -> ProtocolConfig {
    ProtocolConfig {
        seed: effective_seed(opts.seed),
        width: opts.width,
        epsilon: opts.epsilon,
        sentinel: !opts.no_sentinel,
        verify_pass: opts.verify_pass,
    }
}

fn run_protocol(cmd: ProtocolCmd) -> Result<()> {
    let (kind, opts) = match cmd {
        ProtocolCmd::Lcp(o) => (ProtocolKind::Lcp, o),
        ProtocolCmd::Hamming(o) => (ProtocolKind::Hamming, o),
    };
    let cfg = protocol_config(&opts);
    let socket_mode = opts.listen.is_some() || opts.connect.is_some();
    if socket_mode {
        if opts.alice.is_some() || opts.bob.is_some() {
            bail!("--listen/--connect take --input, not --alice/--bob");
        }
        if opts.listen.is_some() && opts.connect.is_some() {
            bail!("--listen and --connect are mutually exclusive");
        }
        let input = opts
            .input
            .as_ref()
            .ok_or_else(|| anyhow!("socket mode needs --input"))?;
        let fz = read_factorization(input)?;
        let (stream, role) = if let Some(port) = opts.listen {
            let listener = TcpListener::bind(("127.0.0.1", port))?;
            eprintln!("listening on {}", listener.local_addr()?);
            let (stream, peer) = listener.accept()?;
            eprintln!("peer connected from {peer}");
            (stream, Speaker::Alice)
        } else {
            let addr = opts.connect.as_ref().unwrap();
            (
                TcpStream::connect(addr).with_context(|| format!("connecting to {addr}"))?,
                Speaker::Bob,
            )
        };
        let outcome = run_socket_party(stream, role, kind, &cfg, &fz)?;
        finish_protocol(
            kind,
            &cfg,
            outcome.value,
            &outcome.transcript,
            outcome.session,
            opts.transcript.as_deref(),
        )
    } else {
        let alice = opts
            .alice
            .as_ref()
            .ok_or_else(|| anyhow!("in-process mode needs --alice and --bob"))?;
        let bob = opts
            .bob
            .as_ref()
            .ok_or_else(|| anyhow!("in-process mode needs --alice and --bob"))?;
        let fa = read_factorization(alice)?;
        let fb = read_factorization(bob)?;
        let ta = fa.decompress()?;
        let tb = fb.decompress()?;
        let sess = SessionParams::derive(kind, &cfg, [InputMeta::of(&ta), InputMeta::of(&tb)]);
        let (value, transcript) = match kind {
            ProtocolKind::Lcp => {
                let o = run_lcp_in_process(&fa, &fb, &cfg)?;
                (o.ell, o.transcript)
            }
            ProtocolKind::Hamming => {
                let o = run_hamming_in_process(&fa, &fb, &cfg)?;
                (o.distance, o.transcript)
            }
        };
        finish_protocol(kind, &cfg, value, &transcript, sess, opts.transcript.as_deref())
    }
}

fn finish_protocol(
    kind: ProtocolKind,
    cfg: &ProtocolConfig,
    value: u64,
    transcript: &Transcript,
    sess: SessionParams,
    transcript_path: Option<&Path>,
) -> Result<()> {
    if let Some(path) = transcript_path {
        let summary = summary_for(kind, value, transcript, &sess, cfg.seed);
        write_out(path, &to_jsonl(transcript, &summary))?;
    }
    println!(
        "{}",
        serde_json::json!({
            "value": value,
            "rounds": transcript.rounds(),
            "bits": transcript.total_bits(),
        })
    );
    Ok(())
}

fn run_experiment(cmd: ExperimentCmd) -> Result<()> {
    match cmd {
        ExperimentCmd::Family {
            sigma_min,
            sigma_max,
            h,
            out,
        } => {
            let sigmas: Vec<u32> = (sigma_min..=sigma_max).filter(|s| s % 2 == 0).collect();
            let mut rows = Vec::new();
            for &sigma in &sigmas {
                let hs: Vec<u32> = h
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| match t.trim() {
                        "half" => Ok(sigma / 2),
                        "full" => Ok(sigma),
                        v => v.parse::<u32>().map_err(|_| anyhow!("bad h value {v:?}")),
                    })
                    .collect::<Result<_>>()?;
                rows.extend(lzcomm::experiments::verify_lower_bound(&[sigma], &hs));
            }
            write_out(&out, &lower_bound_csv(&rows))?;
            let violations = rows.iter().filter(|r| !r.ok).count();
            println!(
                "{}",
                serde_json::json!({ "rows": rows.len(), "violations": violations })
            );
            Ok(())
        }
        ExperimentCmd::Zeta {
            mode,
            exhaustive_sigma,
            exhaustive_max_len,
            random_count,
            random_len,
            random_sigma,
            seed,
            out,
        } => {
            let corpus = match (exhaustive_sigma, exhaustive_max_len, random_count) {
                (Some(sigma), Some(max_len), None) => ZetaCorpus::Exhaustive { sigma, max_len },
                (None, None, Some(count)) => ZetaCorpus::Random {
                    count,
                    len: random_len,
                    sigma: random_sigma,
                    seed: effective_seed(seed),
                },
                _ => bail!("choose either --exhaustive-sigma + --exhaustive-max-len or --random-count"),
            };
            let report = zeta_scan(&corpus, mode.into());
            write_out(&out, &zeta_csv(&report))?;
            println!(
                "{}",
                serde_json::json!({
                    "rows": report.rows.len(),
                    "max_ratio": report.max_ratio,
                    "witnesses": report.witnesses,
                })
            );
            Ok(())
        }
        ExperimentCmd::AvlChain {
            family_sigmas,
            random_count,
            random_len,
            random_sigma,
            samples,
            seed,
            out,
        } => {
            let seed = effective_seed(seed);
            let mut strings = Vec::new();
            for sigma in parse_list::<u32>(&family_sigmas, "sigma")? {
                strings.push(gen_family(&FamilyParams::new(sigma, 1)?));
            }
            let mut coins = lzcomm::fingerprint::CoinStream::new(seed);
            for _ in 0..random_count {
                strings.push(lzcomm::experiments::random_string(
                    &mut coins,
                    random_len,
                    random_sigma,
                ));
            }
            let rows = avl_chain_scan(&strings, samples, seed);
            write_out(&out, &chain_csv(&rows))?;
            let violations = rows.iter().filter(|r| !r.ok).count();
            let max_growth = rows
                .iter()
                .map(|r| r.growth_per_log)
                .fold(f64::NEG_INFINITY, f64::max);
            println!(
                "{}",
                serde_json::json!({
                    "rows": rows.len(),
                    "violations": violations,
                    "max_growth_per_log": max_growth,
                })
            );
            Ok(())
        }
        ExperimentCmd::Bench {
            n,
            d,
            pairs,
            sigma,
            width,
            no_sentinel,
            seed,
            out,
        } => {
            let d_values = parse_list::<usize>(&d, "d")?;
            let report = protocol_bench(
                &BenchParams {
                    n,
                    sigma,
                    pairs,
                    seed: effective_seed(seed),
                    sentinel: !no_sentinel,
                    width,
                },
                &d_values,
            )?;
            write_out(&out, &bench_csv(&report))?;
            let errors: usize = report.rows.iter().map(|r| r.errors).sum();
            println!(
                "{}",
                serde_json::json!({
                    "rows": report.rows.len(),
                    "errors": errors,
                    "rounds_slope": report.rounds_slope,
                })
            );
            Ok(())
        }
    }
}
