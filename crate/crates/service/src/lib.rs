//! Local HTTP service for reviewing cognate and false-friend candidates.
//!
//! Candidate queues are read from a project's output directory at startup.
//! Annotations go to the project's append-only log, which is replayed when
//! the service starts.

mod api;
pub mod log;
mod static_files;

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::routing::{get, post};
use axum::Router;
use chrono::{DateTime, SubsecRound, Utc};
use cognate_core::annotation::{AnnotationError, AnnotationStore};
use cognate_core::extraction::{read_candidates, CandidateRecord, ExtractionError, Task};
use cognate_core::lang::LanguagePair;
use cognate_core::project::ProjectConfig;
use cognate_core::similarity::{SimilarityError, WordScorer};
use cognate_core::wordnet::{load_wordnet_dir, WordnetError};

pub use api::{
    ApiError, CandidatePage, CandidateView, Progress, ProgressReport, ProjectView, QueueView, SubmitResponse,
};
pub use log::AnnotationLog;

pub const TASKS: [Task; 2] = [Task::Cognates, Task::FalseFriends];
pub const ANNOTATOR_HEADER: &str = "x-annotator";

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Log {
        path: PathBuf,
        #[source]
        source: AnnotationError,
    },
    #[error("{}: {source}", path.display())]
    Candidates {
        path: PathBuf,
        #[source]
        source: ExtractionError,
    },
    #[error(transparent)]
    Wordnet(#[from] WordnetError),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error("candidate {pair_id} refers to synset {synset} missing from the {language} wordnet")]
    MissingSynset { pair_id: String, synset: u32, language: String },
    #[error("pair id {0} appears in more than one queue")]
    DuplicatePairId(String),
}

pub type Clock = Arc<dyn Fn() -> DateTime<Utc> + Send + Sync>;

/// Wall clock at millisecond precision, matching the log format.
pub fn system_clock() -> Clock {
    Arc::new(|| Utc::now().trunc_subsecs(3))
}

#[derive(Debug, Clone)]
pub(crate) struct Queue {
    pub task: Task,
    pub pair: LanguagePair,
    /// Sorted by pair_id.
    pub items: Vec<CandidateView>,
}

pub(crate) struct Annotations {
    pub store: AnnotationStore,
    pub log: AnnotationLog,
}

pub struct AppState {
    pub(crate) name: String,
    pub(crate) config: ProjectConfig,
    pub(crate) queues: BTreeMap<(Task, LanguagePair), Queue>,
    pub(crate) by_pair_id: HashMap<String, (Task, LanguagePair)>,
    pub(crate) annotations: RwLock<Annotations>,
    pub(crate) static_dir: Option<PathBuf>,
    pub(crate) clock: Clock,
}

pub struct ServiceOptions {
    pub config: ProjectConfig,
    pub static_dir: Option<PathBuf>,
    pub clock: Clock,
}

impl ServiceOptions {
    pub fn new(config: ProjectConfig) -> Self {
        ServiceOptions { config, static_dir: None, clock: system_clock() }
    }
}

fn view(
    c: CandidateRecord,
    wn: &cognate_core::wordnet::LinkedWordnet,
    scorer: &WordScorer,
) -> Result<CandidateView, ServiceError> {
    let lookup = |lang, id: cognate_core::wordnet::SynsetId| {
        wn.synset(lang, id).ok_or_else(|| ServiceError::MissingSynset {
            pair_id: c.pair_id.clone(),
            synset: id.get(),
            language: lang.to_string(),
        })
    };
    let src = lookup(c.source_lang, c.synset_src)?;
    let tgt = lookup(c.target_lang, c.synset_tgt)?;
    Ok(CandidateView {
        pos: src.pos.as_str().to_string(),
        gloss_src: src.gloss.clone(),
        example_src: src.example.clone().unwrap_or_default(),
        gloss_tgt: tgt.gloss.clone(),
        example_tgt: tgt.example.clone().unwrap_or_default(),
        source_canonical: scorer.normalize(&c.source_word, c.source_lang)?.canonical,
        target_canonical: scorer.normalize(&c.target_word, c.target_lang)?.canonical,
        label: None,
        candidate: c,
    })
}

impl AppState {
    /// Loads the wordnet, every candidate file present under the output
    /// directory and the annotation log.
    pub fn load(options: ServiceOptions) -> Result<Arc<AppState>, ServiceError> {
        let config = options.config;
        let (wn, _diagnostics) = load_wordnet_dir(&config.wordnet_dir, &config.languages())?;
        let scorer = WordScorer { shingle_size: config.shingle_n, ..WordScorer::default() };
        let layout = config.layout();
        let mut queues = BTreeMap::new();
        let mut by_pair_id = HashMap::new();
        for task in TASKS {
            for pair in config.pairs() {
                let path = layout.candidates(task, pair);
                let records = match std::fs::File::open(&path) {
                    Ok(f) => {
                        read_candidates(f).map_err(|source| ServiceError::Candidates { path: path.clone(), source })?
                    }
                    Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
                    Err(source) => return Err(ServiceError::Io { path, source }),
                };
                let mut items = records.into_iter().map(|c| view(c, &wn, &scorer)).collect::<Result<Vec<_>, _>>()?;
                items.sort_by(|a, b| a.candidate.pair_id.cmp(&b.candidate.pair_id));
                for item in &items {
                    if by_pair_id.insert(item.candidate.pair_id.clone(), (task, pair)).is_some() {
                        return Err(ServiceError::DuplicatePairId(item.candidate.pair_id.clone()));
                    }
                }
                queues.insert((task, pair), Queue { task, pair, items });
            }
        }
        let (log, store) = AnnotationLog::open(&layout.annotations())?;
        let name = config
            .output_dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "project".to_string());
        Ok(Arc::new(AppState {
            name,
            config,
            queues,
            by_pair_id,
            annotations: RwLock::new(Annotations { store, log }),
            static_dir: options.static_dir,
            clock: options.clock,
        }))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/projects", get(api::projects))
        .route("/api/candidates", get(api::candidates))
        .route("/api/annotations", post(api::submit))
        .route("/api/agreement", get(api::agreement))
        .route("/api/progress", get(api::progress))
        .fallback(api::fallback)
        .with_state(state)
}

/// Serves until the process is stopped.
pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}
