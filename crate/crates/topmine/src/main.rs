//! Thin command-line front end over the `topmine` library.
//!
//! Results go to stdout in a fixed grammar, one itemset per line:
//! `label1 label2 ... (#support)`. Run reports go to stderr as `key=value`
//! lines, or as a CSV row when `--csv` is given. Every flag can also be set
//! through a `TOPMINE_*` environment variable; a flag on the command line
//! wins over the environment, which wins over the default.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 input/usage error,
//! 3 verification refused (dataset too large for the exhaustive reference).

use std::collections::BTreeSet;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use topmine::bitmat::WordWidth;
use topmine::dataset::{
    generate_patterned, generate_synthetic, PatternedConfig, Support, TransactionDataset,
};
use topmine::nmost::{mine_nmost, NMostConfig};
use topmine::oracle::{self, MAX_ORACLE_ITEMS};
use topmine::report::RunReport;
use topmine::search::{Itemset, OrderPolicy};
use topmine::topk::{mine_topk, TopKConfig};

const CSV_SCHEMA: &str = "# topmine csv v1";
const CSV_HEADER: &str = "algorithm,n_or_k,kmax,min_l,order,pair_prune,fused,word_width,seed,\
wall_ms,result_count,result_digest,final_threshold,nodes_visited,root_children,\
children_expanded,count_passes,fused_passes,project_passes,closure_passes,pair_table_passes,\
expanded_child_passes,two_pass_fallbacks,pair_prune_hits,and_word_ops,pbr_words_skipped,\
offers,threshold_raises,monotonicity_violations";

#[derive(Parser)]
#[command(
    name = "topmine",
    version,
    about = "Mine top-N / top-K frequent itemsets without a support threshold"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine the N most frequent itemsets per length 1..=kmax.
    Nmost(NmostArgs),
    /// Mine the K most frequent closed itemsets with at least min_l items.
    Topk(TopkArgs),
    /// Run a sweep of N (or K) values and emit one CSV row per point.
    Bench(BenchArgs),
    /// Run a miner and the exhaustive reference, then diff the results.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Dec,
    Inc,
}

impl From<OrderArg> for OrderPolicy {
    fn from(v: OrderArg) -> OrderPolicy {
        match v {
            OrderArg::Dec => OrderPolicy::Decreasing,
            OrderArg::Inc => OrderPolicy::Increasing,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Nmost,
    Topk,
}

fn parse_width(s: &str) -> Result<u8, String> {
    match s {
        "32" => Ok(32),
        "64" => Ok(64),
        _ => Err(format!("word width must be 32 or 64, got {s}")),
    }
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Tail order policy: decreasing or increasing support.
    #[arg(long, value_enum, default_value = "dec", env = "TOPMINE_ORDER")]
    order: OrderArg,
    /// Disable pair-table pruning.
    #[arg(long, env = "TOPMINE_NO_PAIR_PRUNE")]
    no_pair_prune: bool,
    /// Disable the fused count+project pass (always count, then project).
    #[arg(long, env = "TOPMINE_NO_FUSED")]
    no_fused: bool,
    /// Counting word width in bits.
    #[arg(long, value_parser = parse_width, default_value = "64", env = "TOPMINE_WORD_WIDTH")]
    word_width: u8,
    /// Append the run report as a CSV row to this file.
    #[arg(long, env = "TOPMINE_CSV")]
    csv: Option<PathBuf>,
}

impl CommonFlags {
    fn width(&self) -> WordWidth {
        WordWidth::new(self.word_width).expect("validated by the parser")
    }
}

#[derive(Args)]
struct NmostArgs {
    /// Input transaction file (one transaction per line, integer items).
    path: PathBuf,
    /// How many top itemsets per length set the bar.
    #[arg(long, env = "TOPMINE_N", value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Longest itemset length mined.
    #[arg(long, env = "TOPMINE_KMAX", value_parser = clap::value_parser!(u64).range(1..))]
    kmax: u64,
    #[command(flatten)]
    common: CommonFlags,
}

#[derive(Args)]
struct TopkArgs {
    /// Input transaction file (one transaction per line, integer items).
    path: PathBuf,
    /// How many closed itemsets set the bar.
    #[arg(long, env = "TOPMINE_K", value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Minimum itemset length admitted to the results.
    #[arg(long, env = "TOPMINE_MINL", value_parser = clap::value_parser!(u64).range(1..))]
    minl: u64,
    #[command(flatten)]
    common: CommonFlags,
}

#[derive(Args)]
struct BenchArgs {
    /// Input transaction file; omit when --synthetic is given.
    #[arg(required_unless_present = "synthetic")]
    path: Option<PathBuf>,
    /// Generate the input instead of reading it. Spec:
    /// "items=1000,txns=100000,avglen=10" for independent items, or add
    /// "patterns=256[,patlen=4]" for recurring-pattern data.
    #[arg(long, env = "TOPMINE_SYNTHETIC", conflicts_with = "path")]
    synthetic: Option<String>,
    /// Seed for --synthetic.
    #[arg(long, default_value_t = 0, env = "TOPMINE_SEED")]
    seed: u64,
    /// Which miner to sweep.
    #[arg(long, value_enum, default_value = "nmost", env = "TOPMINE_ALGO")]
    algo: AlgoArg,
    /// Comma-separated N (or K) values, one run per value. Empty sweep
    /// emits a header-only CSV.
    #[arg(long, default_value = "", env = "TOPMINE_SWEEP")]
    sweep: String,
    /// kmax used for every nmost sweep point.
    #[arg(long, default_value_t = 5, env = "TOPMINE_KMAX", value_parser = clap::value_parser!(u64).range(1..))]
    kmax: u64,
    /// min_l used for every topk sweep point.
    #[arg(long, default_value_t = 1, env = "TOPMINE_MINL", value_parser = clap::value_parser!(u64).range(1..))]
    minl: u64,
    #[command(flatten)]
    common: CommonFlags,
}

#[derive(Args)]
struct VerifyArgs {
    /// Input transaction file (at most 20 distinct items).
    path: PathBuf,
    /// Which miner to verify.
    #[arg(long, value_enum, default_value = "nmost", env = "TOPMINE_ALGO")]
    algo: AlgoArg,
    #[arg(long, default_value_t = 3, env = "TOPMINE_N", value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, default_value_t = 3, env = "TOPMINE_KMAX", value_parser = clap::value_parser!(u64).range(1..))]
    kmax: u64,
    #[arg(long, default_value_t = 3, env = "TOPMINE_K", value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long, default_value_t = 1, env = "TOPMINE_MINL", value_parser = clap::value_parser!(u64).range(1..))]
    minl: u64,
    /// Corrupt the mined result before diffing (testing hook).
    #[arg(long, hide = true)]
    corrupt: bool,
    #[command(flatten)]
    common: CommonFlags,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Nmost(args) => cmd_nmost(args),
        Command::Topk(args) => cmd_topk(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn load(path: &Path) -> Result<TransactionDataset, String> {
    TransactionDataset::read_fimi_file(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn nmost_config(n: u64, kmax: u64, common: &CommonFlags) -> NMostConfig {
    let mut cfg = NMostConfig::new(n as usize, kmax as usize);
    cfg.order = common.order.into();
    cfg.pair_prune = !common.no_pair_prune;
    cfg.fused = !common.no_fused;
    cfg.word_width = common.width();
    cfg
}

fn topk_config(k: u64, minl: u64, common: &CommonFlags) -> TopKConfig {
    let mut cfg = TopKConfig::new(k as usize, minl as usize);
    cfg.order = common.order.into();
    cfg.pair_prune = !common.no_pair_prune;
    cfg.fused = !common.no_fused;
    cfg.word_width = common.width();
    cfg
}

fn print_itemsets<'a>(sets: impl Iterator<Item = &'a Itemset>) {
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    for set in sets {
        writeln!(out, "{set}").expect("stdout");
    }
    out.flush().expect("stdout");
}

fn emit_report(report: &RunReport, csv: Option<&Path>, n_or_k: u64, seed: Option<u64>) -> Result<(), String> {
    for line in report.render_lines() {
        eprintln!("{line}");
    }
    if let Some(path) = csv {
        let mut rows = String::new();
        append_csv_row(&mut rows, report, n_or_k, seed);
        write_csv(path, &rows)?;
    }
    Ok(())
}

fn echo_field<'a>(config: &'a str, key: &str) -> &'a str {
    config
        .split_whitespace()
        .find_map(|kv| kv.strip_prefix(key))
        .unwrap_or("")
}

fn append_csv_row(buf: &mut String, report: &RunReport, n_or_k: u64, seed: Option<u64>) {
    let c = &report.counters;
    let result_count: usize = report.results_per_length.iter().map(|&(_, n)| n).sum();
    let kmax = echo_field(&report.config, "kmax=");
    let minl = echo_field(&report.config, "min_l=");
    let order = echo_field(&report.config, "order=");
    let pair = echo_field(&report.config, "pair_prune=");
    let fused = echo_field(&report.config, "fused=");
    let width = echo_field(&report.config, "word_width=");
    buf.push_str(&format!(
        "{},{},{},{},{},{},{},{},{},{},{},{:016x},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        report.algorithm,
        n_or_k,
        kmax,
        minl,
        order,
        pair,
        fused,
        width,
        seed.map(|s| s.to_string()).unwrap_or_default(),
        report.wall.as_millis(),
        result_count,
        report.result_digest,
        report.final_threshold,
        c.nodes_visited,
        c.root_children,
        c.children_expanded,
        c.count_passes,
        c.fused_passes,
        c.project_passes,
        c.closure_passes,
        c.pair_table_passes,
        c.expanded_child_passes,
        c.two_pass_fallbacks,
        c.pair_prune_hits,
        c.and_word_ops,
        c.pbr_words_skipped,
        c.offers,
        c.threshold_raises,
        c.monotonicity_violations,
    ));
}

fn write_csv(path: &Path, rows: &str) -> Result<(), String> {
    let fresh = !path.exists();
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let mut text = String::new();
    if fresh {
        text.push_str(CSV_SCHEMA);
        text.push('\n');
        text.push_str(CSV_HEADER);
        text.push('\n');
    }
    text.push_str(rows);
    file.write_all(text.as_bytes())
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_nmost(args: NmostArgs) -> Result<ExitCode, String> {
    let ds = load(&args.path)?;
    let cfg = nmost_config(args.n, args.kmax, &args.common);
    let (result, report) = mine_nmost(&ds, &cfg);
    print_itemsets(result.iter_all());
    emit_report(&report, args.common.csv.as_deref(), args.n, None)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_topk(args: TopkArgs) -> Result<ExitCode, String> {
    let ds = load(&args.path)?;
    let cfg = topk_config(args.k, args.minl, &args.common);
    let (result, report) = mine_topk(&ds, &cfg);
    print_itemsets(result.itemsets.iter());
    emit_report(&report, args.common.csv.as_deref(), args.k, None)?;
    Ok(ExitCode::SUCCESS)
}

/// Parse "items=..,txns=..,avglen=..[,patterns=..][,patlen=..]" and build
/// the dataset.
fn build_synthetic(spec: &str, seed: u64) -> Result<TransactionDataset, String> {
    let mut items = None;
    let mut txns = None;
    let mut avglen = None;
    let mut patterns = None;
    let mut patlen = 4.0f64;
    for part in spec.split(',').filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("bad synthetic spec part {part:?}"))?;
        let parse = |v: &str| v.parse::<f64>().map_err(|e| format!("bad value in {part:?}: {e}"));
        match key {
            "items" => items = Some(parse(value)? as usize),
            "txns" => txns = Some(parse(value)? as usize),
            "avglen" => avglen = Some(parse(value)?),
            "patterns" => patterns = Some(parse(value)? as usize),
            "patlen" => patlen = parse(value)?,
            _ => return Err(format!("unknown synthetic key {key:?}")),
        }
    }
    let items = items.ok_or("synthetic spec needs items=")?;
    let txns = txns.ok_or("synthetic spec needs txns=")?;
    let avglen = avglen.ok_or("synthetic spec needs avglen=")?;
    if items == 0 {
        return Err("synthetic spec needs items > 0".into());
    }
    Ok(match patterns {
        Some(num_patterns) => generate_patterned(&PatternedConfig {
            num_items: items,
            num_transactions: txns,
            mean_transaction_len: avglen,
            mean_pattern_len: patlen,
            num_patterns,
            seed,
        }),
        None => generate_synthetic(items, txns, (avglen / items as f64).min(1.0), seed),
    })
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, String> {
    let (ds, seed) = match (&args.path, &args.synthetic) {
        (Some(path), None) => (load(path)?, None),
        (None, Some(spec)) => (build_synthetic(spec, args.seed)?, Some(args.seed)),
        _ => unreachable!("clap enforces exactly one input source"),
    };
    let sweep: Vec<u64> = args
        .sweep
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| format!("bad sweep value {s:?}"))
        })
        .collect::<Result<_, _>>()?;
    let mut rows = String::new();
    for &point in &sweep {
        let report = match args.algo {
            AlgoArg::Nmost => mine_nmost(&ds, &nmost_config(point, args.kmax, &args.common)).1,
            AlgoArg::Topk => mine_topk(&ds, &topk_config(point, args.minl, &args.common)).1,
        };
        append_csv_row(&mut rows, &report, point, seed);
    }
    match args.common.csv.as_deref() {
        Some(path) => write_csv(path, &rows)?,
        None => {
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            write!(out, "{CSV_SCHEMA}\n{CSV_HEADER}\n{rows}").expect("stdout");
        }
    }
    Ok(ExitCode::SUCCESS)
}

type LabeledSet = BTreeSet<(Vec<u32>, Support)>;

fn labeled(sets: &[Itemset]) -> LabeledSet {
    sets.iter()
        .map(|s| (s.labels.iter().map(|l| l.0).collect(), s.support))
        .collect()
}

fn labeled_oracle(ds: &TransactionDataset, entries: &[(Vec<topmine::ItemId>, Support)]) -> LabeledSet {
    entries
        .iter()
        .map(|(items, s)| {
            let mut labels: Vec<u32> = items.iter().map(|&i| ds.label(i).0).collect();
            labels.sort_unstable();
            (labels, *s)
        })
        .collect()
}

fn diff_sets(mined: &LabeledSet, reference: &LabeledSet, context: &str) -> bool {
    let mut clean = true;
    if let Some((labels, sup)) = mined.difference(reference).next() {
        let line: Vec<String> = labels.iter().map(u32::to_string).collect();
        println!("mismatch ({context}): mined {} (#{sup}) not in reference", line.join(" "));
        clean = false;
    }
    if let Some((labels, sup)) = reference.difference(mined).next() {
        let line: Vec<String> = labels.iter().map(u32::to_string).collect();
        println!("mismatch ({context}): reference {} (#{sup}) not mined", line.join(" "));
        clean = false;
    }
    clean
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, String> {
    let ds = load(&args.path)?;
    if ds.num_items() > MAX_ORACLE_ITEMS {
        println!(
            "refused: dataset has {} items; the exhaustive reference is limited to {MAX_ORACLE_ITEMS}",
            ds.num_items()
        );
        return Ok(ExitCode::from(3));
    }
    let mut clean = true;
    match args.algo {
        AlgoArg::Nmost => {
            let cfg = nmost_config(args.n, args.kmax, &args.common);
            let (mut result, _) = mine_nmost(&ds, &cfg);
            if args.corrupt {
                corrupt_first(result.lengths.iter_mut().flatten());
            }
            let reference = oracle::oracle_nmost(&ds, args.n as usize, args.kmax as usize)
                .map_err(|e| e.to_string())?;
            for k in 1..=args.kmax as usize {
                let mined = labeled(&result.lengths[k - 1]);
                let want = labeled_oracle(&ds, &reference[k - 1]);
                clean &= diff_sets(&mined, &want, &format!("length {k}"));
            }
        }
        AlgoArg::Topk => {
            let cfg = topk_config(args.k, args.minl, &args.common);
            let (mut result, _) = mine_topk(&ds, &cfg);
            if args.corrupt {
                corrupt_first(result.itemsets.iter_mut());
            }
            let reference = oracle::oracle_topk(&ds, args.k as usize, args.minl as usize)
                .map_err(|e| e.to_string())?;
            clean &= diff_sets(&labeled(&result.itemsets), &labeled_oracle(&ds, &reference), "closed");
        }
    }
    if clean {
        println!("verify: PASS");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("verify: FAIL");
        Ok(ExitCode::from(1))
    }
}

fn corrupt_first<'a>(mut sets: impl Iterator<Item = &'a mut Itemset>) {
    if let Some(first) = sets.next() {
        first.support += 1;
    }
}
