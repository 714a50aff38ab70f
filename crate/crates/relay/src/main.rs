use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use relay_core::datagen::{generate, generate_default, Corpus, GeneratorConfig, HeldOut, SPLIT_NAMES};
use relay_core::eval::{
    aggregate, bucket_by_slot_count, relation_scores, run_experiment, run_on_split, span_relation_scores,
    unseen_pair_generalization, zero_shot_derivation, CorpusAssignments, ExperimentOptions, MetricsReport, SplitSpec,
    Strategy, DEFAULT_TEST_FRACTION,
};
use relay_core::logic::{compile_relation_based, compile_slot_based, ComparatorLexicon, OperationSet};
use relay_core::relex::{
    train_pair_classifier, ExtractorKind, HeuristicExtractor, LearnedExtractor, PairTrainConfig, RelationExtractor,
};
use relay_core::schema::{builtin, load_schema, DomainSchema};
use relay_core::slotfill::{train_tagger, TaggerConfig, TaggerModel};
use relay_core::{AnnotatedUtterance, RelationAssignment};
use relay::corpus::{check_corpus, read_corpus, write_corpus};
use relay::manifest::{FileEntry, GenerateManifest, SplitManifest};
use relay::model::{extractor_from_json, extractor_to_json, tagger_from_json, tagger_to_json, ExtractorModel};
use relay::ops::{ops_line, ops_value};
use relay::{read_file, write_file, Error, Result};
use serde::Serialize;
use serde_json::json;

/// Slot tagging, relation extraction and operation compilation for
/// slot-filling NLU, with synthetic corpora and evaluation.
#[derive(Parser, Serialize)]
#[command(name = "relay", version)]
struct Cli {
    /// Global seed; every randomized step derives from it.
    #[arg(long, global = true, env = "RELAY_SEED", default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

/// Schema selection shared by most subcommands.
#[derive(clap::Args, Serialize, Clone)]
struct SchemaArgs {
    /// Schema document (JSON).
    #[arg(long, conflicts_with = "domain")]
    schema: Option<PathBuf>,
    /// Bundled schema: food, gaming, stocks or stocks_slot_based.
    #[arg(long)]
    domain: Option<String>,
}

#[derive(clap::Args, Serialize, Clone)]
struct TrainArgs {
    #[arg(long, default_value_t = PairTrainConfig::default().epochs)]
    pair_epochs: usize,
    #[arg(long, default_value_t = TaggerConfig::default().epochs)]
    tagger_epochs: usize,
    /// Restrict each pair to `None` and the relation its slot types allow.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    schema_mask: bool,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
enum Command {
    /// Generate a synthetic train/dev/test corpus and its manifest.
    Generate {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        out: PathBuf,
        /// Total utterances, split 70/15/15; defaults to the domain's sizes.
        #[arg(long)]
        total: Option<usize>,
        #[arg(long)]
        ambiguity_rate: Option<f64>,
    },
    /// Train the slot tagger.
    TrainSf {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = TaggerConfig::default().epochs)]
        epochs: usize,
    },
    /// Train (or, for the heuristic, record) a relation extractor.
    TrainRe {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Learned)]
        kind: Kind,
        #[command(flatten)]
        schema: SchemaArgs,
        #[arg(long, default_value_t = PairTrainConfig::default().epochs)]
        epochs: usize,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        schema_mask: bool,
    },
    /// Predict relations for a corpus, from gold slots or tagged ones.
    Extract {
        #[arg(long)]
        corpus: PathBuf,
        /// Relation extractor file.
        #[arg(long)]
        model: PathBuf,
        /// Slot tagger file; without it gold slots are used.
        #[arg(long, conflicts_with = "oracle_slots")]
        sf_model: Option<PathBuf>,
        /// Use the corpus's own slots.
        #[arg(long)]
        oracle_slots: bool,
        #[command(flatten)]
        schema: SchemaArgs,
        /// Output corpus; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile stocks annotations into back-end operations.
    CompileOps {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_enum, default_value_t = Scheme::Relation)]
        scheme: Scheme,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a corpus into train and test files plus a manifest.
    Split {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TEST_FRACTION)]
        test_fraction: f64,
        /// Held-out slot label (zero-shot-slot).
        #[arg(long)]
        label: Option<String>,
        /// Held-out slot-type pair as `a,b` (zero-shot-pair).
        #[arg(long)]
        pair: Option<String>,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long)]
        test_size: Option<usize>,
    },
    /// Score predicted relations against gold.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// Add per-slot-count buckets to the report.
        #[arg(long)]
        by_slot_count: bool,
        /// Also write the bucket table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Tag, extract and (for stocks) compile one utterance.
    Parse {
        text: String,
        #[command(flatten)]
        schema: SchemaArgs,
        /// Slot tagger file; trained on a generated corpus when absent.
        #[arg(long)]
        sf_model: Option<PathBuf>,
        /// Relation extractor file; trained on a generated corpus when absent.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Run a whole experiment and print its results.
    Experiment {
        #[arg(value_enum)]
        name: ExperimentName,
        /// Domain; each experiment has its own default.
        #[arg(long)]
        domain: Option<String>,
        /// Number of seeds, starting at the global seed.
        #[arg(long, default_value_t = 1)]
        runs: u64,
        #[arg(long, value_enum, default_value_t = Kind::Learned)]
        kind: Kind,
        /// Tag slots instead of using gold slots.
        #[arg(long)]
        end_to_end: bool,
        /// Held-out example counts for the zero-shot experiments.
        #[arg(long, value_delimiter = ',', default_values_t = [0usize, 8, 16, 32, 64])]
        k: Vec<usize>,
        #[arg(long)]
        test_size: Option<usize>,
        #[command(flatten)]
        train: TrainArgs,
    },
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Kind {
    Heuristic,
    Learned,
}

impl From<Kind> for ExtractorKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Heuristic => ExtractorKind::Heuristic,
            Kind::Learned => ExtractorKind::Learned,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Scheme {
    /// Generic slots plus relations.
    Relation,
    /// Contextual slot labels.
    Slot,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum StrategyArg {
    Random,
    Pattern,
    ZeroShotSlot,
    ZeroShotPair,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ExperimentName {
    /// Per-slot-count scores of both extractors on a food corpus.
    Scalability,
    /// Pattern-disjoint splits over several seeds.
    PatternSplit,
    /// Negated sectors unseen in training, both stocks pipelines.
    Derivation,
    /// Enchantments on monsters unseen in training.
    UnseenPair,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    eprintln!("relay: effective config {}", serde_json::to_string(&cli).expect("config serializes"));
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("relay: error: {e}");
            ExitCode::from(1)
        }
    }
}

fn usage_error(msg: &str) -> ! {
    Cli::command().error(clap::error::ErrorKind::ArgumentConflict, msg).exit()
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("output serializes"));
}

fn bundled(domain: &str) -> Result<DomainSchema> {
    builtin::by_name(domain).ok_or_else(|| Error::Invalid(format!("no bundled schema for domain `{domain}`")))
}

/// The schema named on the command line, else the bundled schema of the
/// corpus's domain.
fn resolve_schema(args: &SchemaArgs, corpus: Option<&[AnnotatedUtterance]>) -> Result<DomainSchema> {
    if let Some(path) = &args.schema {
        return Ok(load_schema(&read_file(path)?)?);
    }
    if let Some(d) = &args.domain {
        return bundled(d);
    }
    match corpus.and_then(|c| c.first()) {
        Some(u) => bundled(&u.domain),
        None => usage_error("give --schema or --domain"),
    }
}

fn load_tagger(path: &Path) -> Result<TaggerModel> {
    tagger_from_json(&read_file(path)?, &path.display().to_string())
}

fn load_extractor(path: &Path) -> Result<ExtractorModel> {
    extractor_from_json(&read_file(path)?, &path.display().to_string())
}

fn extractor<'a>(model: &'a ExtractorModel, schema: &'a DomainSchema) -> Box<dyn RelationExtractor + 'a> {
    match model {
        ExtractorModel::Heuristic { .. } => Box::new(HeuristicExtractor { schema }),
        ExtractorModel::Learned(m) => Box::new(LearnedExtractor { model: m, schema, schema_mask: m.schema_mask }),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Generate { domain, out, total, ambiguity_rate } => {
            let schema = bundled(&domain)?;
            let mut config = GeneratorConfig::for_domain(&domain)
                .ok_or_else(|| Error::Invalid(format!("no generator for domain `{domain}`")))?;
            config.seed = seed;
            if let Some(t) = total {
                config = config.with_total(t);
            }
            if let Some(r) = ambiguity_rate {
                config.ambiguity_rate = r;
            }
            let (corpus, manifest) = generate(&config, &schema)?;
            let mut files = BTreeMap::new();
            for (name, split) in corpus.splits() {
                let file = format!("{name}.jsonl");
                write_corpus(&out.join(&file), split)?;
                files.insert(file, FileEntry::of(split));
            }
            if let Some(sb) = &corpus.slot_based {
                for (name, split) in SPLIT_NAMES.iter().zip(sb) {
                    let file = format!("slot_based/{name}.jsonl");
                    write_corpus(&out.join(&file), split)?;
                    files.insert(file, FileEntry::of(split));
                }
            }
            let manifest = GenerateManifest::new(&manifest, files);
            let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
            write_file(&out.join("manifest.json"), &text)?;
            print!("{text}");
        }
        Command::TrainSf { train, out, epochs } => {
            let corpus = read_corpus(&train)?;
            let model = train_tagger(&corpus, &TaggerConfig { seed, epochs })?;
            write_file(&out, &tagger_to_json(&model))?;
            print_json(&json!({
                "out": out,
                "labels": model.labels.len(),
                "features": model.weights.len(),
                "train_accuracy": model.train_accuracy,
            }));
        }
        Command::TrainRe { train, out, kind, schema, epochs, schema_mask } => {
            let corpus = read_corpus(&train)?;
            let schema = resolve_schema(&schema, Some(&corpus))?;
            check_corpus(&corpus, &schema)?;
            let model = match kind {
                Kind::Heuristic => ExtractorModel::Heuristic { domain: schema.domain().to_string() },
                Kind::Learned => ExtractorModel::Learned(train_pair_classifier(
                    &corpus,
                    &schema,
                    &PairTrainConfig { seed, epochs, schema_mask },
                )?),
            };
            write_file(&out, &extractor_to_json(&model))?;
            print_json(&json!({ "out": out, "kind": ExtractorKind::from(kind).name(), "domain": schema.domain() }));
        }
        Command::Extract { corpus, model, sf_model, oracle_slots: _, schema, out } => {
            let corpus = read_corpus(&corpus)?;
            let schema = resolve_schema(&schema, Some(&corpus))?;
            let model = load_extractor(&model)?;
            model.check_schema(&schema)?;
            let tagger = sf_model.as_deref().map(load_tagger).transpose()?;
            let ex = extractor(&model, &schema);
            let mut pred = Vec::with_capacity(corpus.len());
            for u in &corpus {
                let u = match &tagger {
                    Some(t) => u.with_slots(t.tag_tokens(&u.tokens)),
                    None => u.clone(),
                };
                pred.push(ex.annotate(&u)?);
            }
            emit(out.as_deref(), &relay::corpus::corpus_to_jsonl(&pred))?;
        }
        Command::CompileOps { corpus, scheme, out } => {
            let corpus = read_corpus(&corpus)?;
            let lex = ComparatorLexicon::default();
            let mut text = String::new();
            let mut failed = 0;
            for u in &corpus {
                let compiled = match scheme {
                    Scheme::Relation => compile_relation_based(u, &RelationAssignment::from_gold(u), &lex),
                    Scheme::Slot => compile_slot_based(u),
                };
                let line = match compiled {
                    Ok(ops) => ops_line(&u.id, &ops, None),
                    Err(e) => {
                        failed += 1;
                        eprintln!("relay: {}: {e}", u.id);
                        ops_line(&u.id, &OperationSet::new(), Some(&e.to_string()))
                    }
                };
                text.push_str(&line);
                text.push('\n');
            }
            emit(out.as_deref(), &text)?;
            eprintln!("relay: compiled {} utterances, {failed} failed", corpus.len());
        }
        Command::Split { corpus, strategy, out, test_fraction, label, pair, k, test_size } => {
            let strategy = match strategy {
                StrategyArg::Random => Strategy::Random { test_fraction },
                StrategyArg::Pattern => Strategy::Pattern { test_fraction },
                StrategyArg::ZeroShotSlot => {
                    let label = label.unwrap_or_else(|| usage_error("zero-shot-slot needs --label"));
                    let test_size = test_size.unwrap_or_else(|| HeldOut::slot(&label).default_test_size());
                    Strategy::ZeroShotSlot { label, k, test_size }
                }
                StrategyArg::ZeroShotPair => {
                    let pair = pair.unwrap_or_else(|| usage_error("zero-shot-pair needs --pair a,b"));
                    let (a, b) = pair
                        .split_once(',')
                        .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                        .unwrap_or_else(|| usage_error("--pair takes two slot labels as a,b"));
                    let test_size = test_size.unwrap_or_else(|| HeldOut::pair(&a, &b).default_test_size());
                    Strategy::ZeroShotPair { a, b, k, test_size }
                }
            };
            let spec = SplitSpec { strategy, seed };
            let pool = read_corpus(&corpus)?;
            let (train, test) = spec.apply(&pool)?;
            write_corpus(&out.join("train.jsonl"), &train)?;
            write_corpus(&out.join("test.jsonl"), &test)?;
            let manifest = SplitManifest::new(&spec, &pool, &train, &test);
            let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
            write_file(&out.join("manifest.json"), &text)?;
            print!("{text}");
        }
        Command::Eval { gold, pred, by_slot_count, csv } => {
            let gold = read_corpus(&gold)?;
            let pred = read_corpus(&pred)?;
            let report = evaluate(&gold, &pred, by_slot_count)?;
            if let Some(path) = csv {
                write_file(&path, &bucket_csv(&report))?;
            }
            print_json(&report);
        }
        Command::Parse { text, schema, sf_model, model } => {
            let schema = resolve_schema(&schema, None)?;
            let needs_training = sf_model.is_none() || model.is_none();
            let train = if needs_training {
                eprintln!("relay: training on a generated {} corpus (seed {seed})", schema.domain());
                generate_default(schema.domain(), seed)?.0.train
            } else {
                Vec::new()
            };
            let tagger = match &sf_model {
                Some(p) => load_tagger(p)?,
                None => train_tagger(&train, &TaggerConfig { seed, ..Default::default() })?,
            };
            let model = match &model {
                Some(p) => load_extractor(p)?,
                None => ExtractorModel::Learned(train_pair_classifier(
                    &train,
                    &schema,
                    &PairTrainConfig { seed, ..Default::default() },
                )?),
            };
            model.check_schema(&schema)?;
            let slots = relay_core::slotfill::tag(&tagger, &text);
            let u = relay_core::annotation::AnnotatedUtterance::from_record(relay_core::annotation::UtteranceRecord {
                id: "input".into(),
                domain: schema.domain().into(),
                text: text.clone(),
                intent: None,
                slots: slots
                    .iter()
                    .map(|s| relay_core::annotation::SlotRecord { label: s.label.clone(), start: s.start, end: s.end })
                    .collect(),
                relations: Vec::new(),
            })?;
            let assignment = extractor(&model, &schema).extract_utterance(&u)?;
            let mut result = json!({
                "text": text,
                "tokens": u.tokens,
                "slots": u.slots.iter().map(|s| json!({
                    "label": s.label, "start": s.start, "end": s.end, "text": u.tokens[s.start..s.end].join(" "),
                })).collect::<Vec<_>>(),
                "relations": assignment.relations().map(|(p, l)| json!({
                    "a": p.first(), "b": p.second(), "label": l,
                })).collect::<Vec<_>>(),
            });
            if schema.domain() == "stocks" {
                result["ops"] = ops_value(&compile_relation_based(&u, &assignment, &ComparatorLexicon::default())?);
            }
            print_json(&result);
        }
        Command::Experiment { name, domain, runs, kind, end_to_end, k, test_size, train } => {
            let options = ExperimentOptions {
                end_to_end,
                schema_mask: train.schema_mask,
                pair_epochs: train.pair_epochs,
                tagger_epochs: train.tagger_epochs,
            };
            let seeds: Vec<u64> = (seed..seed + runs.max(1)).collect();
            let out = experiment(name, domain, &seeds, kind.into(), &k, test_size, &options)?;
            print_json(&out);
        }
    }
    Ok(())
}

/// Assignment scoring when every predicted utterance keeps the gold slots,
/// span scoring otherwise.
fn evaluate(gold: &[AnnotatedUtterance], pred: &[AnnotatedUtterance], by_slot_count: bool) -> Result<MetricsReport> {
    let by_id: BTreeMap<&str, &AnnotatedUtterance> = pred.iter().map(|u| (u.id.as_str(), u)).collect();
    let same_slots = gold.iter().all(|g| by_id.get(g.id.as_str()).is_some_and(|p| p.slots == g.slots));
    if same_slots && by_id.len() == gold.len() {
        let assign = |us: &[AnnotatedUtterance]| -> CorpusAssignments {
            us.iter().map(|u| (u.id.clone(), RelationAssignment::from_gold(u))).collect()
        };
        let (g, p) = (assign(gold), assign(pred));
        let mut report = relation_scores(&g, &p)?;
        if by_slot_count {
            report.buckets = bucket_by_slot_count(gold, &g, &p)?;
        }
        return Ok(report);
    }
    let mut report = span_relation_scores(gold, pred)?.report();
    if by_slot_count {
        let mut groups: BTreeMap<usize, (Vec<AnnotatedUtterance>, Vec<AnnotatedUtterance>)> = BTreeMap::new();
        for g in gold {
            let e = groups.entry(g.slots.len()).or_default();
            e.0.push(g.clone());
            e.1.push((*by_id[g.id.as_str()]).clone());
        }
        for (n, (g, p)) in groups {
            report.buckets.insert(n, span_relation_scores(&g, &p)?.bucket());
        }
    }
    Ok(report)
}

fn bucket_csv(report: &MetricsReport) -> String {
    let mut out = String::from("slots,utterances,p,r,f1,em\n");
    for (n, b) in &report.buckets {
        let s = &b.overall;
        out.push_str(&format!("{n},{},{},{},{},{}\n", b.counts.utterances, s.p, s.r, s.f1, s.em));
    }
    out
}

fn default_corpus(domain: &str, seed: u64) -> Result<Corpus> {
    Ok(generate_default(domain, seed)?.0)
}

fn experiment(
    name: ExperimentName,
    domain: Option<String>,
    seeds: &[u64],
    kind: ExtractorKind,
    ks: &[usize],
    test_size: Option<usize>,
    options: &ExperimentOptions,
) -> Result<serde_json::Value> {
    let seed = seeds[0];
    Ok(match name {
        ExperimentName::Scalability => {
            let domain = domain.unwrap_or_else(|| "food".into());
            let schema = bundled(&domain)?;
            let mut runs = Vec::new();
            for &s in seeds {
                let corpus = default_corpus(&domain, s)?;
                let h = run_on_split(&corpus.train, &corpus.test, ExtractorKind::Heuristic, &schema, options, s)?;
                let l = run_on_split(&corpus.train, &corpus.test, ExtractorKind::Learned, &schema, options, s)?;
                runs.push(json!({ "seed": s, "heuristic": h, "learned": l }));
            }
            json!({ "experiment": "scalability", "domain": domain, "runs": runs })
        }
        ExperimentName::PatternSplit => {
            let domain = domain.unwrap_or_else(|| "food".into());
            let schema = bundled(&domain)?;
            let pool = default_corpus(&domain, seed)?.all();
            let reports = seeds
                .iter()
                .map(|&s| run_experiment(&SplitSpec::pattern(s), kind, &pool, &schema, options))
                .collect::<Result<Vec<_>, _>>()?;
            let agg = aggregate(reports).expect("at least one run");
            json!({
                "experiment": "pattern-split",
                "domain": domain,
                "kind": kind.name(),
                "f1_dispersion": agg.f1.range(),
                "aggregate": agg,
            })
        }
        ExperimentName::Derivation => {
            let domain = domain.unwrap_or_else(|| "stocks".into());
            let schema = bundled(&domain)?;
            let test_size = test_size.unwrap_or_else(|| HeldOut::slot("sector_outside").default_test_size());
            let mut rows = Vec::new();
            for &s in seeds {
                let corpus = default_corpus(&domain, s)?;
                for &k in ks {
                    rows.push(zero_shot_derivation(&corpus, &schema, k, test_size, s, options)?);
                }
            }
            json!({ "experiment": "derivation", "domain": domain, "rows": rows })
        }
        ExperimentName::UnseenPair => {
            let domain = domain.unwrap_or_else(|| "gaming".into());
            let schema = bundled(&domain)?;
            let held = HeldOut::pair("enchantment", "monster");
            let test_size = test_size.unwrap_or_else(|| held.default_test_size());
            let mut rows = Vec::new();
            for &s in seeds {
                let pool = default_corpus(&domain, s)?.all();
                for &k in ks {
                    rows.push(unseen_pair_generalization(&pool, &schema, ("enchantment", "monster"), k, test_size, s, options)?);
                }
            }
            let mean: BTreeMap<usize, f64> = ks
                .iter()
                .map(|&k| {
                    let xs: Vec<f64> = rows.iter().filter(|r| r.k == k).map(|r| r.pair_f1).collect();
                    (k, xs.iter().sum::<f64>() / xs.len() as f64)
                })
                .collect();
            json!({ "experiment": "unseen-pair", "domain": domain, "mean_pair_f1": mean, "rows": rows })
        }
    })
}
