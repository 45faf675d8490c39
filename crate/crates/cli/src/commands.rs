use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use chvenrich::augment::{augment_stream, build_plans, AugmentOptions, Variant};
use chvenrich::corpus::{preprocess_corpus, read_corpus, stem, StopwordSet, TokenStream};
use chvenrich::embed::{build_cooccurrence, build_vocab, train, Vocabulary};
use chvenrich::eval::{evaluate, sweep, write_sweep_csv, Grid, SweepContext};
use chvenrich::lexicon::{assign_seeds, build_ground_truth, load_concepts, GroundTruthLexicon, SeedAssignment, SeedPair};
use chvenrich::query::QueryIndex;
use chvenrich::wordnet::{load_wordnet, InformationContent, WordNetDb};
use chvenrich::{Matrix, Model};

use crate::config::PipelineConfig;
use crate::error::{CliError, CliResult, Kind};
use crate::workspace::{self as ws, sibling, Workspace};

pub struct Context {
    pub config: PipelineConfig,
    pub workspace: Workspace,
}

#[derive(Debug, Serialize, Deserialize)]
struct SeedsFile {
    config: Value,
    pairs: Vec<SeedPair>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CooccurMeta {
    config: Value,
    corpus: PathBuf,
    corpus_sha256: String,
    window: usize,
    weighting: String,
    entries: usize,
    vocabulary: Vocabulary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

fn required<'a>(path: &'a Option<PathBuf>, key: &str) -> CliResult<&'a Path> {
    path.as_deref().ok_or_else(|| CliError::config(format!("paths.{key} is not set (config file or --{key})")))
}

fn out(text: &str) -> CliResult<()> {
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| CliError::input(format!("stdout: {e}")))
}

impl Context {
    pub fn new(config: PipelineConfig) -> Self {
        let workspace = Workspace::new(config.paths.workspace.clone());
        Self { config, workspace }
    }

    fn echo(&self, command: &str) -> Value {
        json!({ "command": command, "config": self.config })
    }

    fn load_stream(&self, path: &Path, producer: &str) -> CliResult<(TokenStream, Vec<u8>)> {
        ws::require(path, producer)?;
        let bytes = ws::read(path)?;
        let stream = TokenStream::read_from(bytes.as_slice())?;
        Ok((stream, bytes))
    }

    fn load_lexicon(&self) -> CliResult<(GroundTruthLexicon, SeedAssignment)> {
        let (lp, sp) = (self.workspace.lexicon(), self.workspace.seeds());
        ws::require(&lp, "build-lexicon")?;
        ws::require(&sp, "build-lexicon")?;
        let lexicon = GroundTruthLexicon::from_json(&ws::read_string(&lp)?)
            .map_err(|e| CliError::input(format!("{}: {e}", lp.display())))?;
        let seeds: SeedsFile = serde_json::from_str(&ws::read_string(&sp)?)
            .map_err(|e| CliError::input(format!("{}: {e}", sp.display())))?;
        Ok((lexicon, SeedAssignment { pairs: seeds.pairs }))
    }

    fn load_wordnet(&self) -> CliResult<WordNetDb> {
        let dir = required(&self.config.paths.wordnet, "wordnet")?;
        log::info!("loading WordNet from {}", dir.display());
        Ok(load_wordnet(dir)?)
    }

    fn information_content(&self, db: &WordNetDb, stream: &TokenStream) -> CliResult<InformationContent> {
        Ok(match &self.config.paths.ic {
            Some(p) => InformationContent::load(p)?,
            None => InformationContent::from_stream(db, stream)?,
        })
    }

    fn augment_options(&self) -> AugmentOptions {
        let a = &self.config.augment;
        AugmentOptions { matcher: a.matcher, form: a.form, min_len: self.config.corpus.min_len }
    }

    pub fn preprocess(&self) -> CliResult<()> {
        let c = &self.config;
        let corpus = required(&c.paths.corpus, "corpus")?;
        let stopwords = StopwordSet::from_files(c.corpus.stopwords.as_deref(), c.corpus.domain_stopwords.as_deref())?;
        let docs = read_corpus(corpus)?;
        let stream = preprocess_corpus(&docs, &stopwords, c.corpus.min_len);
        let mut bytes = Vec::new();
        stream.write_to(&mut bytes).map_err(|e| CliError::input(e.to_string()))?;
        let path = self.workspace.stream();
        ws::write(&path, &bytes)?;
        let vocab = stream.frequencies().len();
        ws::write_json(
            &sibling(&path, "meta.json"),
            &json!({
                "config": self.echo("preprocess"),
                "sha256": ws::sha256_hex(&bytes),
                "input_documents": docs.len(),
                "documents": stream.num_documents(),
                "tokens": stream.len(),
                "vocabulary": vocab,
            }),
        )?;
        out(&format!(
            "documents\t{}\ntokens\t{}\nvocabulary\t{}\nstream\t{}\n",
            stream.num_documents(),
            stream.len(),
            vocab,
            path.display()
        ))
    }

    pub fn build_lexicon(&self) -> CliResult<()> {
        let c = &self.config;
        let tsv = required(&c.paths.lexicon, "lexicon")?;
        let entries = load_concepts(tsv, c.lexicon.has_header)?;
        let (stream, _) = self.load_stream(&self.workspace.stream(), "preprocess")?;
        let mut lexicon = build_ground_truth(&entries, &stream, c.lexicon.ground_truth());
        if lexicon.is_empty() {
            log::warn!("no concept survived the ground-truth filters");
        }
        let echo = self.echo("build-lexicon");
        lexicon.provenance = echo.to_string();
        let seeds = assign_seeds(&lexicon, c.lexicon.seed_mode())?;
        let text = lexicon.to_json().map_err(|e| CliError::input(e.to_string()))?;
        ws::write(&self.workspace.lexicon(), text + "\n")?;
        ws::write_json(&self.workspace.seeds(), &SeedsFile { config: echo, pairs: seeds.pairs.clone() })?;
        out(&format!(
            "concepts\t{}\nterms\t{}\npairs\t{}\n",
            lexicon.len(),
            lexicon.total_terms(),
            seeds.len()
        ))
    }

    pub fn augment(&self) -> CliResult<()> {
        let variant = self.config.augment.variant;
        let src = self.workspace.stream();
        let (stream, bytes) = self.load_stream(&src, "preprocess")?;
        let dst = self.workspace.augmented(variant);
        let log_path = sibling(&dst, "log.jsonl");
        let Some(relation) = variant.relation() else {
            ws::write(&dst, &bytes)?;
            ws::write(&log_path, "")?;
            ws::write_json(
                &sibling(&dst, "meta.json"),
                &json!({ "config": self.echo("augment"), "source_sha256": ws::sha256_hex(&bytes), "insertions": 0, "inserted_tokens": 0 }),
            )?;
            return out(&format!("insertions\t0\nstream\t{}\n", dst.display()));
        };
        let (lexicon, seeds) = self.load_lexicon()?;
        let db = self.load_wordnet()?;
        let ic = self.information_content(&db, &stream)?;
        let surfaces = lexicon.seed_surfaces(&seeds);
        let plans = build_plans(
            surfaces.iter().map(|(s, forms)| (s.clone(), forms.iter().map(String::as_str))),
            relation,
            &db,
            &ic,
            self.config.augment.split,
            &self.config.augment.pos,
        );
        let result = augment_stream(&stream, &plans, &self.augment_options());
        match result.restore() {
            Ok(back) if back == stream => {}
            _ => return Err(CliError::new(Kind::Numeric, "augmented stream does not restore to its source")),
        }
        let mut text = Vec::new();
        result.tokens.write_to(&mut text).map_err(|e| CliError::input(e.to_string()))?;
        ws::write(&dst, &text)?;
        ws::write(&log_path, result.log_json_lines())?;
        let inserted: usize = result.log.iter().map(|i| i.inserted_count()).sum();
        let planned: BTreeMap<&str, usize> =
            plans.iter().map(|(s, p)| (s.as_str(), p.sorted.len())).collect();
        ws::write_json(
            &sibling(&dst, "meta.json"),
            &json!({
                "config": self.echo("augment"),
                "source_sha256": ws::sha256_hex(&bytes),
                "sha256": ws::sha256_hex(&text),
                "ic_source": ic.source,
                "planned_terms": planned,
                "insertions": result.log.len(),
                "inserted_tokens": inserted,
                "tokens": result.tokens.len(),
            }),
        )?;
        out(&format!("insertions\t{}\ninserted_tokens\t{inserted}\nstream\t{}\n", result.log.len(), dst.display()))
    }

    /// Builds the co-occurrence matrix for the configured variant and window,
    /// or reads it back when the cache already holds it.
    fn matrix(&self) -> CliResult<(Vocabulary, Matrix, PathBuf)> {
        let t = &self.config.train;
        t.train_config().validate()?;
        let src = self.workspace.variant_stream(self.config.augment.variant);
        let producer = if self.config.augment.variant == Variant::None { "preprocess" } else { "augment" };
        let (stream, bytes) = self.load_stream(&src, producer)?;
        let sha = ws::sha256_hex(&bytes);
        let path = self.workspace.cooccur(&sha[..16], t.window, t.weighting, t.min_count);
        let meta_path = sibling(&path, "json");
        if path.is_file() && meta_path.is_file() {
            let meta: CooccurMeta = serde_json::from_str(&ws::read_string(&meta_path)?)
                .map_err(|e| CliError::input(format!("{}: {e}", meta_path.display())))?;
            if meta.corpus_sha256 == sha {
                let mut vocab = meta.vocabulary;
                vocab.reindex();
                let m = Matrix::from_records(&ws::read(&path)?, vocab.len(), t.window, t.weighting)?;
                log::info!("co-occurrence cache hit: {}", path.display());
                return Ok((vocab, m, path));
            }
        }
        let vocab = build_vocab(&stream, t.min_count)?;
        let m: Matrix = build_cooccurrence(&stream, &vocab, t.window, t.weighting)?;
        ws::write(&path, m.to_records())?;
        ws::write_json(
            &meta_path,
            &CooccurMeta {
                config: self.echo("cooccur"),
                corpus: src,
                corpus_sha256: sha,
                window: t.window,
                weighting: t.weighting.name().to_owned(),
                entries: m.len(),
                vocabulary: vocab.clone(),
            },
        )?;
        Ok((vocab, m, path))
    }

    pub fn cooccur(&self) -> CliResult<()> {
        let (vocab, m, path) = self.matrix()?;
        out(&format!("vocabulary\t{}\nentries\t{}\nmatrix\t{}\n", vocab.len(), m.len(), path.display()))
    }

    fn model_path(&self) -> PathBuf {
        let t = &self.config.train;
        self.workspace.model(self.config.augment.variant, t.dim, t.window)
    }

    pub fn train(&self) -> CliResult<()> {
        let (vocab, m, matrix_path) = self.matrix()?;
        let mut model: Model = train(&m, &vocab, &self.config.train.train_config())?;
        let echo = self.echo("train");
        model.meta.config = echo.clone();
        let path = self.model_path();
        let bytes = model.to_bytes();
        ws::write(&path, &bytes)?;
        let txt = sibling(&path, "txt");
        let mut text = Vec::new();
        model.write_text(&mut text, self.config.train.vector_mode).map_err(|e| CliError::input(e.to_string()))?;
        ws::write(&txt, &text)?;
        ws::write_json(
            &sibling(&path, "meta.json"),
            &json!({
                "config": echo,
                "matrix": matrix_path,
                "words": model.len(),
                "dim": model.dim(),
                "sha256": ws::sha256_hex(&bytes),
                "losses": model.meta.losses,
            }),
        )?;
        let loss = model.meta.final_loss().unwrap_or(f64::NAN);
        out(&format!("words\t{}\nfinal_loss\t{loss}\nmodel\t{}\n", model.len(), path.display()))
    }

    fn load_model(&self, explicit: Option<&Path>) -> CliResult<Model> {
        let path = explicit.map(Path::to_path_buf).unwrap_or_else(|| self.model_path());
        ws::require(&path, "train")?;
        Ok(Model::from_bytes(&ws::read(&path)?)?)
    }

    pub fn query(&self, seeds: &[String], model: Option<&Path>, format: Format) -> CliResult<()> {
        let n = self.config.eval.n;
        let model = self.load_model(model)?;
        let index = QueryIndex::new(&model, self.config.train.vector_mode);
        let none = BTreeSet::new();
        let mut lists = Vec::new();
        let mut missing = None;
        for seed in seeds {
            let raw = seed.trim().to_lowercase();
            let key = if model.index_of(&raw).is_some() { raw } else { stem(&raw) };
            match index.top_candidates(&key, n, &none) {
                Ok(l) => lists.push(l),
                Err(e) => {
                    let e = CliError::from(e);
                    if e.kind != Kind::UnknownSeed {
                        return Err(e);
                    }
                    missing.get_or_insert(e);
                }
            }
        }
        let text = match format {
            Format::Tsv => lists.iter().map(|l| l.to_tsv()).collect(),
            Format::Json => {
                let v = json!({ "config": self.echo("query"), "lists": lists });
                serde_json::to_string_pretty(&v).map_err(|e| CliError::input(e.to_string()))? + "\n"
            }
        };
        if !lists.is_empty() {
            out(&text)?;
        }
        missing.map_or(Ok(()), Err)
    }

    pub fn evaluate(&self, model: Option<&Path>) -> CliResult<()> {
        let c = &self.config;
        let m = self.load_model(model)?;
        let (lexicon, seeds) = self.load_lexicon()?;
        let report = evaluate(&m, &lexicon, &seeds, c.eval.n, c.train.vector_mode, self.echo("evaluate"))?;
        let name = format!("{}-d{}-w{}-n{}.json", c.augment.variant, m.dim(), c.train.window, c.eval.n);
        let path = self.workspace.report(&name);
        ws::write_json(&path, &report)?;
        let f = chvenrich::eval::rate_f64;
        out(&format!(
            "P_micro\t{}\nR_micro\t{}\nF_micro\t{}\nP_macro\t{}\nR_macro\t{}\nF_macro\t{}\nMRR\t{}\nNumCon\t{}\nreport\t{}\n",
            f(report.micro.p),
            f(report.micro.r),
            f(report.micro.f),
            f(report.macro_.p),
            f(report.macro_.r),
            f(report.macro_.f),
            report.mrr,
            report.num_con,
            path.display()
        ))
    }

    pub fn sweep(&self) -> CliResult<()> {
        let c = &self.config;
        let (stream, _) = self.load_stream(&self.workspace.stream(), "preprocess")?;
        let (lexicon, seeds) = self.load_lexicon()?;
        let needs_wordnet = c.eval.variants.iter().any(|v| v.relation().is_some());
        let db = match (needs_wordnet, &c.paths.wordnet) {
            (true, Some(_)) => Some(self.load_wordnet()?),
            (true, None) => {
                log::warn!("paths.wordnet is not set; WordNet variants will fail");
                None
            }
            (false, _) => None,
        };
        let ic = c.paths.ic.as_deref().map(InformationContent::load).transpose()?;
        let ctx = SweepContext {
            lexicon: &lexicon,
            assignments: &seeds,
            wordnet: db.as_ref(),
            ic: ic.as_ref(),
            train: c.train.train_config(),
            split: c.augment.split,
            pos: c.augment.pos.clone(),
            augment: self.augment_options(),
            vector_mode: c.train.vector_mode,
        };
        let grid = Grid {
            dims: c.eval.dims.clone(),
            windows: c.eval.windows.clone(),
            ns: c.eval.ns.clone(),
            variants: c.eval.variants.clone(),
        };
        log::info!("sweeping {} grid points", grid.len());
        let rows = sweep::<f64>(&stream, &ctx, &grid);
        let mut csv = Vec::new();
        write_sweep_csv(&rows, &mut csv).map_err(|e| CliError::input(e.to_string()))?;
        let path = self.workspace.report("sweep.csv");
        ws::write(&path, &csv)?;
        let failed: Vec<Value> = rows
            .iter()
            .filter_map(|r| {
                r.result.as_ref().err().map(|e| json!({ "d": r.d, "window": r.window, "n": r.n, "variant": r.variant, "error": e }))
            })
            .collect();
        for f in &failed {
            log::warn!("grid point failed: {f}");
        }
        let reports: Vec<Value> = rows.iter().filter_map(|r| r.result.as_ref().ok()).map(|r| json!(r)).collect();
        ws::write_json(
            &self.workspace.report("sweep.json"),
            &json!({ "config": self.echo("sweep"), "points": rows.len(), "failed": failed, "reports": reports }),
        )?;
        out(&format!("points\t{}\nfailed\t{}\ncsv\t{}\n", rows.len(), failed.len(), path.display()))
    }
}
