use std::collections::{BTreeMap, BTreeSet};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use chrono::{SubsecRound, Utc};
use cognate_core::annotation::{
    agreement_for, parse_timestamp, read_labeled_worksheet, write_agreement, AnnotationError,
};
use cognate_core::classify::{
    read_external_results, run_experiment, write_eval_report, write_model, ExperimentConfig, FeatureScheme,
    NegativeTask, ResultsMatrix,
};
use cognate_core::exec::Execution;
use cognate_core::extraction::{
    generate_cognate_candidates, generate_false_friend_candidates, pair_report, pair_report_table, read_candidates,
    write_candidates, CandidateRecord, ExtractionConfig, Task,
};
use cognate_core::gold::{gold_from_candidates, import_d1, merge_gold, GoldDataset, Provenance};
use cognate_core::lang::LanguagePair;
use cognate_core::project::{ProjectConfig, ProjectLayout};
use cognate_core::report::{fmt2, PairTable};
use cognate_core::similarity::WordScorer;
use cognate_core::wordnet::{load_wordnet_dir, wordnet_file_name, LinkedWordnet, Pos, Synset};
use cognate_service::{AnnotationLog, AppState, ServiceOptions};

use crate::error::{data, data_at, CliError, Result};
use crate::io::{open_input, write_file, write_with};
use crate::manifest::Manifest;

pub struct Ctx {
    pub config: ProjectConfig,
    pub execution: Execution,
}

impl Ctx {
    fn layout(&self) -> ProjectLayout {
        self.config.layout()
    }

    fn manifest(&self, command: &str) -> Manifest {
        Manifest::new(command, &self.config, self.execution)
    }

    fn finish(&self, command: &str, manifest: &Manifest) -> Result<()> {
        manifest.write(&self.layout().manifest(command))?;
        Ok(())
    }

    fn scorer(&self) -> WordScorer {
        WordScorer { shingle_size: self.config.shingle_n, ..WordScorer::default() }
    }

    /// Loads every configured language. Malformed lines are listed as
    /// `file:line: message` and turn into a data error.
    fn wordnet(&self, manifest: &mut Manifest) -> Result<LinkedWordnet> {
        let (wn, diagnostics) = self.wordnet_lenient(manifest)?;
        report_diagnostics(&diagnostics)?;
        Ok(wn)
    }

    fn wordnet_lenient(&self, manifest: &mut Manifest) -> Result<(LinkedWordnet, Vec<String>)> {
        let dir = &self.config.wordnet_dir;
        let languages = self.config.languages();
        let (wn, diagnostics) = load_wordnet_dir(dir, &languages).map_err(data)?;
        for lang in languages {
            manifest.input(&dir.join(wordnet_file_name(lang)))?;
        }
        Ok((wn, diagnostics.iter().map(ToString::to_string).collect()))
    }

    fn candidates(&self, task: Task, pair: LanguagePair, manifest: &mut Manifest) -> Result<Vec<CandidateRecord>> {
        let path = self.layout().candidates(task, pair);
        let file = open_input(&path, Some(gen_command(task)))?;
        let records = read_candidates(file).map_err(|e| data_at(&path, e))?;
        manifest.input(&path)?;
        Ok(records)
    }

    fn gold(&self, path: &Path, produced_by: &str, manifest: &mut Manifest) -> Result<GoldDataset> {
        let gold = GoldDataset::read_csv(open_input(path, Some(produced_by))?).map_err(|e| data_at(path, e))?;
        manifest.input(path)?;
        Ok(gold)
    }
}

fn report_diagnostics(diagnostics: &[String]) -> Result<()> {
    if diagnostics.is_empty() {
        return Ok(());
    }
    for d in diagnostics {
        eprintln!("{d}");
    }
    Err(CliError::Data(format!("{} malformed wordnet line(s)", diagnostics.len())))
}

fn gen_command(task: Task) -> &'static str {
    match task {
        Task::Cognates => "gen-cognates",
        Task::FalseFriends => "gen-falsefriends",
    }
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

pub fn ingest(ctx: &Ctx) -> Result<()> {
    let mut manifest = ctx.manifest("ingest");
    let (wn, diagnostics) = ctx.wordnet_lenient(&mut manifest)?;
    println!("language  synsets  lemmas  multiword");
    let mut summary = BTreeMap::new();
    for lang in ctx.config.languages() {
        let table = wn.table(lang).map_err(data)?;
        let lemmas: usize = table.values().map(|s| s.lemmas.len()).sum();
        let multiword = table.values().flat_map(|s| &s.lemmas).filter(|l| Synset::is_multiword(l)).count();
        println!("{:<8}  {:>7}  {:>6}  {:>9}", lang.as_str(), table.len(), lemmas, multiword);
        summary.insert(lang.as_str(), [table.len(), lemmas, multiword]);
    }
    for (a, b, m) in wn.pos_conflicts() {
        eprintln!("warning: synset {} has a different part of speech in {a} and {b}", m.id);
    }
    manifest.detail("counts", &summary);
    manifest.detail("diagnostics", &diagnostics);
    ctx.finish("ingest", &manifest)?;
    report_diagnostics(&diagnostics)
}

pub fn generate(ctx: &Ctx, task: Task) -> Result<()> {
    let command = gen_command(task);
    let mut manifest = ctx.manifest(command);
    let wn = ctx.wordnet(&mut manifest)?;
    let scorer = ctx.scorer();
    let config =
        ExtractionConfig { threshold: ctx.config.threshold, execution: ctx.execution, ..ExtractionConfig::default() };
    let layout = ctx.layout();
    let mut all = Vec::new();
    for pair in ctx.config.pairs() {
        let found = match task {
            Task::Cognates => generate_cognate_candidates(&wn, pair.source, pair.target, &config, &scorer),
            Task::FalseFriends => generate_false_friend_candidates(&wn, pair.source, pair.target, &config, &scorer),
        }
        .map_err(data)?;
        let path = layout.candidates(task, pair);
        write_with(&path, |buf| write_candidates(buf, &found))?;
        manifest.output(&path)?;
        all.extend(found);
    }
    let label = match task {
        Task::Cognates => "Potential Candidates",
        Task::FalseFriends => "Potential False Friends",
    };
    let table = pair_report_table(label, &pair_report(&all, &ctx.config.pairs()));
    let path = layout.report(&format!("{task}_counts.csv"));
    write_file(&path, table.to_csv().as_bytes())?;
    manifest.output(&path)?;
    print!("{}", table.to_text());
    ctx.finish(command, &manifest)
}

pub fn export_worksheet(ctx: &Ctx, task: Task) -> Result<()> {
    let mut manifest = ctx.manifest("export-worksheet");
    let wn = ctx.wordnet(&mut manifest)?;
    let layout = ctx.layout();
    for pair in ctx.config.pairs() {
        let candidates = ctx.candidates(task, pair, &mut manifest)?;
        let path = layout.worksheet(task, pair);
        let mut buf = Vec::new();
        cognate_core::annotation::export_worksheet(&mut buf, &candidates, &wn).map_err(data)?;
        write_file(&path, &buf)?;
        manifest.output(&path)?;
        println!("{pair}: {} rows -> {}", candidates.len(), display(&path));
    }
    ctx.finish("export-worksheet", &manifest)
}

pub struct AgreeArgs {
    pub task: Task,
    pub labels: Vec<String>,
    pub annotators: Option<String>,
    pub timestamp: Option<String>,
}

fn split_once_nonempty<'a>(s: &'a str, sep: char, what: &str) -> Result<(&'a str, &'a str)> {
    match s.split_once(sep) {
        Some((a, b)) if !a.trim().is_empty() && !b.trim().is_empty() => Ok((a.trim(), b.trim())),
        _ => Err(CliError::Usage(format!("expected {what}, got `{s}`"))),
    }
}

pub fn agree(ctx: &Ctx, args: AgreeArgs) -> Result<()> {
    let mut manifest = ctx.manifest("agree");
    let layout = ctx.layout();
    let timestamp = match &args.timestamp {
        Some(t) => parse_timestamp(t).map_err(|e| CliError::Usage(e.to_string()))?,
        None => Utc::now().trunc_subsecs(3),
    };
    let annotators =
        args.annotators.as_deref().map(|s| split_once_nonempty(s, ',', "two annotator names as `a,b`")).transpose()?;

    let (mut log, mut store) = AnnotationLog::open(&layout.annotations()).map_err(data)?;
    let mut imported = 0;
    for spec in &args.labels {
        let (name, file) = split_once_nonempty(spec, '=', "ANNOTATOR=FILE")?;
        let path = PathBuf::from(file);
        let records =
            read_labeled_worksheet(open_input(&path, None)?, name, timestamp).map_err(|e| data_at(&path, e))?;
        manifest.input(&path)?;
        for r in records {
            log.submit(&mut store, r).map_err(|e| CliError::Internal(e.to_string()))?;
            imported += 1;
        }
    }
    if imported > 0 {
        println!("imported {imported} label(s) into {}", display(log.path()));
    }
    manifest.input(log.path())?;

    let wn = ctx.wordnet(&mut manifest)?;
    let mut reports = Vec::new();
    let mut retained = BTreeSet::new();
    let mut all_candidates = Vec::new();
    let mut failures = Vec::new();
    println!("pair   annotators  items  agreement  kappa  retained");
    for pair in ctx.config.pairs() {
        let candidates = ctx.candidates(args.task, pair, &mut manifest)?;
        match agreement_for(&store, &candidates, Some(pair), annotators) {
            Ok((kept, report)) => {
                println!(
                    "{pair}  {},{}  {}  {}  {}  {}",
                    report.annotator_a,
                    report.annotator_b,
                    report.n_items,
                    report.percent_agreement,
                    report.kappa,
                    report.retained
                );
                let path = layout.agreement(args.task, pair);
                let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
                json.push('\n');
                write_file(&path, json.as_bytes())?;
                manifest.output(&path)?;
                retained.extend(kept);
                reports.push(report);
            }
            Err(e @ (AnnotationError::InsufficientOverlap | AnnotationError::NoOverlap)) => {
                eprintln!("error: {pair}: {e}");
                failures.push(pair.to_string());
            }
            Err(e) => return Err(data(e)),
        }
        all_candidates.extend(candidates);
    }
    let table = layout.agreement_table(args.task);
    write_with(&table, |buf| write_agreement(buf, &reports))?;
    manifest.output(&table)?;
    let gold = gold_from_candidates(&all_candidates, &retained, &wn, Provenance::D2).map_err(data)?;
    let gold_path = layout.retained_gold(args.task);
    write_with(&gold_path, |buf| gold.write_csv(buf))?;
    manifest.output(&gold_path)?;
    println!("{} retained pair(s) -> {}", gold.len(), display(&gold_path));
    manifest.detail("failed_pairs", &failures);
    ctx.finish("agree", &manifest)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Data(format!("no annotator overlap for {}", failures.join(", "))))
    }
}

pub fn import_d1_cmd(ctx: &Ctx, input: &Path) -> Result<()> {
    let mut manifest = ctx.manifest("import-d1");
    let import = import_d1(open_input(input, None)?, ctx.config.source).map_err(|e| data_at(input, e))?;
    manifest.input(input)?;
    let path = ctx.layout().d1_gold();
    write_with(&path, |buf| import.dataset.write_csv(buf))?;
    manifest.output(&path)?;
    println!(
        "sets {}  words {}  partial excluded {}  gold pairs {}",
        import.sets,
        import.words,
        import.partial_excluded,
        import.dataset.len()
    );
    manifest.detail("sets", import.sets);
    manifest.detail("words", import.words);
    manifest.detail("partial_excluded", import.partial_excluded);
    ctx.finish("import-d1", &manifest)
}

fn pos_table(gold: &GoldDataset) -> Result<String> {
    let dist = gold.pos_distribution().map_err(data)?;
    let mut out = String::from("pos        count  percent\n");
    for (i, pos) in Pos::ALL.iter().enumerate() {
        out.push_str(&format!("{:<9}  {:>5}  {:>7}\n", pos.as_str(), dist.counts[i], fmt2(dist.percentages[i])));
    }
    Ok(out)
}

pub fn merge_gold_cmd(ctx: &Ctx, task: Task, d1: Option<PathBuf>, extra: Vec<PathBuf>) -> Result<()> {
    let mut manifest = ctx.manifest("merge-gold");
    let layout = ctx.layout();
    let mut merged = ctx.gold(&layout.retained_gold(task), "agree", &mut manifest)?;
    let d1 = d1.or_else(|| {
        let default = layout.d1_gold();
        (task == Task::Cognates && default.exists()).then_some(default)
    });
    let mut sources = Vec::new();
    if let Some(path) = d1 {
        let d1 = ctx.gold(&path, "import-d1", &mut manifest)?;
        merged = merge_gold(&d1, &merged);
        sources.push(display(&path));
    }
    for path in &extra {
        let other = ctx.gold(path, "agree", &mut manifest)?;
        merged = merge_gold(&merged, &other);
        sources.push(display(path));
    }
    let path = layout.gold(task);
    write_with(&path, |buf| merged.write_csv(buf))?;
    manifest.output(&path)?;
    println!("{} gold pair(s) -> {}", merged.len(), display(&path));
    if !merged.is_empty() {
        print!("{}", pos_table(&merged)?);
    }
    manifest.detail("merged_sources", &sources);
    ctx.finish("merge-gold", &manifest)
}

pub struct TrainArgs {
    pub task: Task,
    pub scheme: Option<FeatureScheme>,
    pub external: Option<PathBuf>,
}

pub fn train_eval(ctx: &Ctx, args: TrainArgs) -> Result<()> {
    let mut manifest = ctx.manifest("train-eval");
    let layout = ctx.layout();
    let wn = ctx.wordnet(&mut manifest)?;
    let gold = ctx.gold(&layout.gold(args.task), "merge-gold", &mut manifest)?;
    if gold.is_empty() {
        return Err(CliError::Data(format!("{}: gold dataset is empty", display(&layout.gold(args.task)))));
    }
    let cognate_gold;
    let negatives = match args.task {
        Task::Cognates => NegativeTask::Cognate,
        Task::FalseFriends => {
            cognate_gold = ctx.gold(&layout.gold(Task::Cognates), "merge-gold --task cognates", &mut manifest)?;
            NegativeTask::FalseFriend { cognates: &cognate_gold }
        }
    };
    let schemes: Vec<FeatureScheme> = match args.scheme {
        Some(s) => vec![s],
        None => FeatureScheme::ALL.to_vec(),
    };
    let config = ExperimentConfig { execution: ctx.execution, ..ExperimentConfig::new(ctx.config.seed) };
    let scorer = ctx.scorer();

    let mut matrix = ResultsMatrix::new();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut logged = Vec::new();
    for &scheme in &schemes {
        let features: Vec<String> = scheme.measures().iter().map(ToString::to_string).collect();
        logged.push(serde_json::json!({
            "scheme": scheme.as_str(),
            "features": features,
            "dimension": scheme.dimension(),
        }));
        for (pair, run) in run_experiment(&wn, &gold, negatives, scheme, &config, &scorer) {
            match run {
                Ok(run) => {
                    let path = layout.model(args.task, scheme.as_str(), pair);
                    write_with(&path, |buf| write_model(buf, &run.model))?;
                    manifest.output(&path)?;
                    matrix.set(scheme.approach_label(), pair, run.report.f_score());
                    rows.push(run.report.csv_row(scheme.approach_label(), pair, run.n_train));
                }
                Err(e) => {
                    eprintln!("error: {scheme} {pair}: {e}");
                    failures.push(format!("{scheme} {pair}: {e}"));
                }
            }
        }
    }
    if let Some(path) = &args.external {
        let external = read_external_results(open_input(path, None)?).map_err(|e| data_at(path, e))?;
        manifest.input(path)?;
        for r in external {
            matrix.set(&r.approach, r.language_pair, r.f_score);
        }
    }
    let report = layout.report(&format!("{}_eval.csv", args.task));
    write_with(&report, |buf| write_eval_report(buf, &rows))?;
    manifest.output(&report)?;
    let table: PairTable = matrix.to_table();
    let fscores = layout.report(&format!("{}_fscores.csv", args.task));
    write_file(&fscores, table.to_csv().as_bytes())?;
    manifest.output(&fscores)?;
    print!("{}", table.to_text());

    manifest.detail("schemes", &logged);
    manifest.detail(
        "hyper",
        serde_json::json!({
            "hidden": config.hyper.hidden,
            "epochs": config.hyper.epochs,
            "learning_rate": config.hyper.learning_rate,
            "train_ratio": config.train_ratio,
        }),
    );
    manifest.detail("failures", &failures);
    ctx.finish("train-eval", &manifest)?;
    if rows.is_empty() {
        return Err(CliError::Data("no language pair could be trained".into()));
    }
    Ok(())
}

pub fn stats(ctx: &Ctx) -> Result<()> {
    let mut manifest = ctx.manifest("stats");
    let layout = ctx.layout();
    let pairs = ctx.config.pairs();
    for task in [Task::Cognates, Task::FalseFriends] {
        let mut table = PairTable::new(format!("{task}"), pairs.clone());
        let mut cells = Vec::new();
        for &pair in &pairs {
            let path = layout.candidates(task, pair);
            cells.push(match std::fs::File::open(&path) {
                Ok(f) => {
                    manifest.input(&path)?;
                    read_candidates(f).map_err(|e| data_at(&path, e))?.len().to_string()
                }
                Err(_) => "-".to_string(),
            });
        }
        table.push_row("candidates", cells);
        let gold_path = layout.gold(task);
        if gold_path.exists() {
            let gold = ctx.gold(&gold_path, "merge-gold", &mut manifest)?;
            let counts = pairs.iter().map(|&p| gold.for_pair(p).count().to_string()).collect();
            table.push_row("gold", counts);
            print!("{}", table.to_text());
            if !gold.is_empty() {
                print!("{}", pos_table(&gold)?);
            }
        } else {
            print!("{}", table.to_text());
        }
        println!();
    }
    let log = layout.annotations();
    if log.exists() {
        let (log, store) = AnnotationLog::open(&log).map_err(data)?;
        manifest.input(log.path())?;
        for annotator in store.annotators() {
            let n = store.records().filter(|r| r.annotator == annotator).count();
            println!("annotator {annotator}: {n} label(s)");
        }
    }
    ctx.finish("stats", &manifest)
}

pub fn serve(ctx: &Ctx, addr: SocketAddr, static_dir: Option<PathBuf>) -> Result<()> {
    let mut manifest = ctx.manifest("serve");
    manifest.detail("addr", addr.to_string());
    let options = ServiceOptions { static_dir, ..ServiceOptions::new(ctx.config.clone()) };
    let state = AppState::load(options).map_err(data)?;
    ctx.finish("serve", &manifest)?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Internal(e.to_string()))?;
    println!("serving on http://{addr}");
    runtime.block_on(cognate_service::serve(state, addr)).map_err(|e| CliError::Internal(format!("{addr}: {e}")))
}
