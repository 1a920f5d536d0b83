use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;

use satmine::dataset::{self, DatasetFormat, GeneratorParams, Itemset, ItemsetDatabase};
use satmine::encoder::{self, EncodeOptions, ExportFormat, RemovalMode, Threshold};
use satmine::enumeration::BlockingKind;
use satmine::oracle;
use satmine::pbsat::SolverConfig;
use satmine::search::{self, MiningOutcome, SearchOptions, StrategyKind};

use crate::record::{RunRecord, CSV_HEADER};
use crate::{
    BenchArgs, BlockingArg, EncodingArg, ExportArgs, FormatArg, GenArgs, InstanceFormatArg,
    MineArgs, MiningFlags, PolarityArg, RemovalArg, StrategyArg, VerifyArgs,
};

fn dataset_format(arg: FormatArg) -> DatasetFormat {
    match arg {
        FormatArg::Transactions => DatasetFormat::Transactions,
        FormatArg::Matrix => DatasetFormat::Matrix,
    }
}

fn load_db(path: &Path, format: FormatArg) -> Result<ItemsetDatabase> {
    ItemsetDatabase::load(path, dataset_format(format))
        .with_context(|| format!("loading dataset {}", path.display()))
}

/// An integer is an absolute count, anything else a frequency in (0, 1].
fn parse_theta(text: &str) -> Result<Threshold> {
    if let Ok(count) = text.parse::<usize>() {
        return Ok(Threshold::Count(count));
    }
    let freq: f64 = text
        .parse()
        .with_context(|| format!("threshold `{text}` is neither a count nor a frequency"))?;
    Ok(Threshold::Frequency(freq))
}

fn strategy_kind(arg: StrategyArg) -> StrategyKind {
    match arg {
        StrategyArg::Simple => StrategyKind::Simple,
        StrategyArg::Lsm => StrategyKind::Lsm,
        StrategyArg::Cmg => StrategyKind::Cmg,
        StrategyArg::Ld => StrategyKind::Ld,
        StrategyArg::Dual => StrategyKind::Dual,
    }
}

fn blocking_kind(arg: Option<BlockingArg>, strategy: StrategyArg) -> BlockingKind {
    match arg {
        Some(BlockingArg::Simple) => BlockingKind::Simple,
        Some(BlockingArg::Subsets) => BlockingKind::SubsetsExplicit,
        Some(BlockingArg::SubsetsCompact) => BlockingKind::SubsetsCompact,
        Some(BlockingArg::Supersets) => BlockingKind::SupersetsExplicit,
        Some(BlockingArg::SupersetsCompact) => BlockingKind::SupersetsCompact,
        None => match strategy {
            StrategyArg::Simple => BlockingKind::Simple,
            StrategyArg::Lsm | StrategyArg::Cmg | StrategyArg::Ld => {
                BlockingKind::SubsetsCompact
            }
            StrategyArg::Dual => BlockingKind::SupersetsCompact,
        },
    }
}

fn blocking_label(kind: BlockingKind) -> &'static str {
    match kind {
        BlockingKind::Simple => "simple",
        BlockingKind::SubsetsExplicit => "subsets",
        BlockingKind::SubsetsCompact => "subsets-compact",
        BlockingKind::SupersetsExplicit => "supersets",
        BlockingKind::SupersetsCompact => "supersets-compact",
    }
}

fn removal_mode(arg: RemovalArg) -> RemovalMode {
    match arg {
        RemovalArg::None => RemovalMode::None,
        RemovalArg::Incremental => RemovalMode::Incremental,
        RemovalArg::Fixed => RemovalMode::Fixed,
    }
}

fn phase(arg: Option<PolarityArg>) -> Option<bool> {
    arg.map(|p| matches!(p, PolarityArg::Pos))
}

fn encode_options(encoding: EncodingArg, positive_only: bool, removal: RemovalArg) -> EncodeOptions {
    EncodeOptions {
        reduced: encoding == EncodingArg::Reduced,
        positive_only,
        removal_mode: removal_mode(removal),
        ..EncodeOptions::default()
    }
}

fn encoding_label(options: &EncodeOptions) -> String {
    let mut label = if options.reduced { "reduced" } else { "baseline" }.to_string();
    if options.positive_only {
        label.push_str("+positive");
    }
    match options.removal_mode {
        RemovalMode::None => {}
        RemovalMode::Incremental => label.push_str("+incremental"),
        RemovalMode::Fixed => label.push_str("+fixed"),
    }
    label
}

fn search_options(flags: &MiningFlags, deadline: Option<Instant>) -> SearchOptions {
    SearchOptions {
        encode: encode_options(flags.encoding, flags.positive_only, flags.removal),
        item_phase: phase(flags.polarity_items),
        trans_phase: phase(flags.polarity_trans),
        solver: SolverConfig {
            seed: flags.seed,
            ..SolverConfig::default()
        },
        deadline,
        ..SearchOptions::default()
    }
}

fn value_name<T: ValueEnum>(value: T) -> String {
    value
        .to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string()
}

/// Frequent collection (with supports) plus its maximal subset.
type Collection = (Vec<(Itemset, usize)>, BTreeSet<Itemset>);

/// The frequent collection and its maximal subset derived from an outcome.
/// Primal outcomes are expanded downward; dual outcomes are complemented
/// against the discovered border (desk-scale alphabets only).
fn derive_collection(outcome: &MiningOutcome, db: &ItemsetDatabase) -> Result<Collection> {
    let closure: Vec<(Itemset, usize)> = if outcome.dual_border {
        if db.num_items() > 24 {
            bail!(
                "recovering the frequent collection from a dual border needs \
                 an alphabet of at most 24 items, dataset has {}",
                db.num_items()
            );
        }
        let border: Vec<Itemset> = outcome.found.iter().map(|(s, _)| s.clone()).collect();
        let mut out = Vec::new();
        for set in search::frequent_from_border(&border, db.num_items()) {
            let support = db.support(&set)?;
            out.push((set, support));
        }
        out
    } else {
        let sets: Vec<Itemset> = outcome.found.iter().map(|(s, _)| s.clone()).collect();
        search::expand_maximal(&sets, db)?
    };
    let keys: BTreeSet<Itemset> = closure.iter().map(|(s, _)| s.clone()).collect();
    // The closure is downward closed, so maximality reduces to one-item
    // extension tests.
    let maximals: BTreeSet<Itemset> = keys
        .iter()
        .filter(|set| {
            (0..db.num_items())
                .filter(|&i| !set.contains(i))
                .all(|i| {
                    let mut bigger = (*set).clone();
                    bigger.insert(i);
                    !keys.contains(&bigger)
                })
        })
        .cloned()
        .collect();
    Ok((closure, maximals))
}

fn itemset_labels(set: &Itemset, db: &ItemsetDatabase) -> String {
    set.iter()
        .map(|i| db.item_label(i))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Result-file rendering: one itemset per line, items in alphabet order,
/// followed by `#SUP: k`.
fn result_file(entries: &[(Itemset, usize)], db: &ItemsetDatabase) -> String {
    let mut out = String::new();
    for (set, support) in entries {
        out.push_str(&itemset_labels(set, db));
        out.push_str(&format!(" #SUP: {support}\n"));
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn build_record(
    dataset: &str,
    db: &ItemsetDatabase,
    theta: usize,
    strategy: StrategyArg,
    blocking: BlockingKind,
    encode: &EncodeOptions,
    outcome: &MiningOutcome,
    frequent: usize,
    maximal: usize,
    status: &str,
) -> RunRecord {
    RunRecord {
        dataset: dataset.to_string(),
        m: db.num_transactions(),
        n: db.num_items(),
        density: db.density(),
        theta,
        strategy: value_name(strategy),
        blocking: blocking_label(blocking).to_string(),
        encoding: encoding_label(encode),
        frequent,
        maximal,
        stats: outcome.stats,
        status: status.to_string(),
    }
}

pub fn mine(args: MineArgs) -> Result<ExitCode> {
    let db = load_db(&args.input, args.format)?;
    let theta = parse_theta(&args.theta)?.resolve(db.num_transactions())?;
    let strategy = strategy_kind(args.mining.strategy);
    let blocking = blocking_kind(args.mining.blocking, args.mining.strategy);
    let options = search_options(&args.mining, None);
    let outcome = search::mine(&db, theta, strategy, blocking, &options)?;
    let (closure, maximals) = derive_collection(&outcome, &db)?;

    let entries: Vec<(Itemset, usize)> = if args.maximal_only {
        closure
            .iter()
            .filter(|(s, _)| maximals.contains(s))
            .cloned()
            .collect()
    } else {
        closure.clone()
    };
    fs::write(&args.out, result_file(&entries, &db))
        .with_context(|| format!("writing {}", args.out.display()))?;

    let record = build_record(
        &dataset_label(&args.input),
        &db,
        theta,
        args.mining.strategy,
        blocking,
        &options.encode,
        &outcome,
        closure.len(),
        maximals.len(),
        if outcome.timed_out { "timeout" } else { "ok" },
    );
    println!("{}", record.summary());
    Ok(ExitCode::SUCCESS)
}

fn dataset_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn gen(args: GenArgs) -> Result<ExitCode> {
    let params = GeneratorParams {
        items: args.items,
        transactions: args.trans,
        density: args.density,
        gamma: args.gamma,
        planted: args.planted,
        seed: args.seed,
    };
    let db = dataset::generate(&params)?;
    fs::write(&args.out, db.to_transactions_string())
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "generated {} transactions over {} items, realized density={:.4}",
        db.num_transactions(),
        db.num_items(),
        db.density()
    );
    Ok(ExitCode::SUCCESS)
}

pub fn export(args: ExportArgs) -> Result<ExitCode> {
    let db = load_db(&args.input, args.input_format)?;
    let theta = parse_theta(&args.theta)?.resolve(db.num_transactions())?;
    let options = EncodeOptions {
        dual: args.dual,
        ..encode_options(args.encoding, args.positive_only, args.removal)
    };
    let instance = encoder::encode(&db, theta, &options)?;
    let format = match args.format {
        InstanceFormatArg::Cnf => ExportFormat::Cnf,
        InstanceFormatArg::Opb => ExportFormat::Opb,
    };
    let text = encoder::export(&instance, format)?;
    fs::write(&args.out, text).with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "wrote {} ({} variables, {} clauses, {} weighted constraints)",
        args.out.display(),
        instance.varmap.num_vars(),
        instance.clauses.len(),
        instance.linears.len()
    );
    Ok(ExitCode::SUCCESS)
}

pub fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let db = load_db(&args.input, args.format)?;
    let theta = parse_theta(&args.theta)?.resolve(db.num_transactions())?;
    let strategy = strategy_kind(args.mining.strategy);
    let blocking = blocking_kind(args.mining.blocking, args.mining.strategy);
    let options = search_options(&args.mining, None);
    let outcome = search::mine(&db, theta, strategy, blocking, &options)?;

    if outcome.dual_border {
        // Compare the border-derived frequent collection against the
        // reference; the primal report shape does not apply.
        let (closure, _) = derive_collection(&outcome, &db)?;
        let derived: BTreeMap<Itemset, usize> = closure.into_iter().collect();
        let reference = oracle::apriori(&db, theta);
        let mut equal = true;
        for (set, support) in reference.iter() {
            if derived.get(set) != Some(&support) {
                println!("missing {{{}}} (support {support})", itemset_labels(set, &db));
                equal = false;
            }
        }
        for (set, support) in &derived {
            if !reference.contains(set) {
                println!("extra {{{}}} (support {support})", itemset_labels(set, &db));
                equal = false;
            }
        }
        if equal {
            println!("equal");
            return Ok(ExitCode::SUCCESS);
        }
        return Ok(ExitCode::from(1));
    }

    let report = oracle::verify(&outcome, &db, theta);
    print!("{}", report.render(&db));
    if report.is_equal() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

struct BenchCell {
    dataset: String,
    db: ItemsetDatabase,
    theta_spec: String,
    strategy: StrategyArg,
}

fn parse_gen_spec(spec: &str) -> Result<GeneratorParams> {
    let mut params = GeneratorParams {
        items: 0,
        transactions: 0,
        density: 0.0,
        gamma: 0.0,
        planted: 0,
        seed: 0,
    };
    for pair in spec.split(',') {
        let (key, value) = pair
            .split_once('=')
            .with_context(|| format!("generator spec item `{pair}` is not key=value"))?;
        match key.trim() {
            "items" | "n" => params.items = value.parse()?,
            "trans" | "m" => params.transactions = value.parse()?,
            "density" => params.density = value.parse()?,
            "gamma" => params.gamma = value.parse()?,
            "planted" => params.planted = value.parse()?,
            "seed" => params.seed = value.parse()?,
            other => bail!("unknown generator spec key `{other}`"),
        }
    }
    Ok(params)
}

pub fn bench(args: BenchArgs) -> Result<ExitCode> {
    if args.theta.is_empty() {
        bail!("bench needs at least one --theta value");
    }
    if args.strategy.is_empty() {
        bail!("bench needs at least one --strategy value");
    }
    let mut datasets: Vec<(String, ItemsetDatabase)> = Vec::new();
    for path in &args.input {
        datasets.push((dataset_label(path), load_db(path, args.format)?));
    }
    for (k, spec) in args.gen_specs.iter().enumerate() {
        let params = parse_gen_spec(spec)?;
        datasets.push((format!("gen{k}"), dataset::generate(&params)?));
    }
    if datasets.is_empty() {
        bail!("bench needs at least one dataset (--input or --gen)");
    }

    let mut cells = Vec::new();
    for (dataset, db) in &datasets {
        for theta_spec in &args.theta {
            for &strategy in &args.strategy {
                cells.push(BenchCell {
                    dataset: dataset.clone(),
                    db: db.clone(),
                    theta_spec: theta_spec.clone(),
                    strategy,
                });
            }
        }
    }

    let run_cell = |cell: &BenchCell| -> RunRecord {
        let blocking = blocking_kind(args.blocking, cell.strategy);
        let encode = encode_options(args.encoding, args.positive_only, args.removal);
        let error_record = |theta: usize, outcome: &MiningOutcome, status: &str| {
            build_record(
                &cell.dataset,
                &cell.db,
                theta,
                cell.strategy,
                blocking,
                &encode,
                outcome,
                0,
                0,
                status,
            )
        };
        let empty = MiningOutcome {
            found: Vec::new(),
            maximal_only: false,
            dual_border: false,
            timed_out: false,
            stats: Default::default(),
            trace: Vec::new(),
        };
        let theta = match parse_theta(&cell.theta_spec)
            .and_then(|t| Ok(t.resolve(cell.db.num_transactions())?))
        {
            Ok(theta) => theta,
            Err(_) => return error_record(0, &empty, "error"),
        };
        let deadline = args
            .timeout
            .map(|secs| Instant::now() + Duration::from_secs_f64(secs));
        let options = SearchOptions {
            encode,
            solver: SolverConfig {
                seed: args.seed,
                ..SolverConfig::default()
            },
            deadline,
            ..SearchOptions::default()
        };
        let outcome = match search::mine(
            &cell.db,
            theta,
            strategy_kind(cell.strategy),
            blocking,
            &options,
        ) {
            Ok(outcome) => outcome,
            Err(_) => return error_record(theta, &empty, "error"),
        };
        match derive_collection(&outcome, &cell.db) {
            Ok((closure, maximals)) => build_record(
                &cell.dataset,
                &cell.db,
                theta,
                cell.strategy,
                blocking,
                &encode,
                &outcome,
                closure.len(),
                maximals.len(),
                if outcome.timed_out { "timeout" } else { "ok" },
            ),
            Err(_) => error_record(theta, &outcome, "error"),
        }
    };

    let records: Vec<RunRecord> = if args.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(args.jobs)
            .build()
            .context("building worker pool")?;
        pool.install(|| {
            use rayon::prelude::*;
            cells.par_iter().map(run_cell).collect()
        })
    } else {
        cells.iter().map(run_cell).collect()
    };

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for record in &records {
        csv.push_str(&record.csv_row());
        csv.push('\n');
    }
    match &args.out {
        Some(path) => {
            fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?
        }
        None => {
            std::io::stdout().write_all(csv.as_bytes())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
