//! Pipeline configuration: a TOML file with one table per stage, overridden
//! by command-line flags named after the keys.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use chvenrich::augment::{InsertForm, Matcher, SplitMode, Variant};
use chvenrich::embed::{TrainConfig, VectorMode, Weighting};
use chvenrich::lexicon::{GroundTruthConfig, SeedMode};
use chvenrich::wordnet::Pos;

use crate::error::{CliError, CliResult};

pub const WORKSPACE_ENV: &str = "CHVENRICH_WORKSPACE";
pub const DEFAULT_CONFIG: &str = "chvenrich.toml";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: Paths,
    pub corpus: CorpusSection,
    pub lexicon: LexiconSection,
    pub augment: AugmentSection,
    pub train: TrainSection,
    pub eval: EvalSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Raw corpus: a file with one post per line or a directory of `.txt` files.
    pub corpus: Option<PathBuf>,
    /// `cui \t concept_name \t term` rows.
    pub lexicon: Option<PathBuf>,
    /// WNdb `dict` directory.
    pub wordnet: Option<PathBuf>,
    /// Precomputed information content (`offset pos ic` lines); computed from
    /// the stream when absent.
    pub ic: Option<PathBuf>,
    pub workspace: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Self { corpus: None, lexicon: None, wordnet: None, ic: None, workspace: PathBuf::from("workspace") }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    pub stopwords: Option<PathBuf>,
    pub domain_stopwords: Option<PathBuf>,
    pub min_len: usize,
}

impl Default for CorpusSection {
    fn default() -> Self {
        Self { stopwords: None, domain_stopwords: None, min_len: chvenrich::corpus::DEFAULT_MIN_LEN }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedModeName {
    #[default]
    LeaveOneOut,
    FirstTerm,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LexiconSection {
    pub min_freq: usize,
    pub min_terms: usize,
    pub drop_concept_name: bool,
    pub has_header: bool,
    pub seed_mode: SeedModeName,
    pub rng_seed: u64,
}

impl Default for LexiconSection {
    fn default() -> Self {
        let g = GroundTruthConfig::default();
        Self {
            min_freq: g.min_freq,
            min_terms: g.min_terms,
            drop_concept_name: g.drop_concept_name,
            has_header: false,
            seed_mode: SeedModeName::default(),
            rng_seed: 1,
        }
    }
}

impl LexiconSection {
    pub fn ground_truth(&self) -> GroundTruthConfig {
        GroundTruthConfig { min_freq: self.min_freq, min_terms: self.min_terms, drop_concept_name: self.drop_concept_name }
    }

    pub fn seed_mode(&self) -> SeedMode {
        match self.seed_mode {
            SeedModeName::LeaveOneOut => SeedMode::LeaveOneOut,
            SeedModeName::FirstTerm => SeedMode::FirstTerm,
            SeedModeName::Random => SeedMode::Random { seed: self.rng_seed },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentSection {
    pub variant: Variant,
    pub split: SplitMode,
    pub pos: Vec<Pos>,
    pub matcher: Matcher,
    pub form: InsertForm,
}

impl Default for AugmentSection {
    fn default() -> Self {
        Self {
            variant: Variant::None,
            split: SplitMode::Contiguous,
            pos: vec![Pos::Noun],
            matcher: Matcher::Exact,
            form: InsertForm::Stemmed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub dim: usize,
    pub window: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    pub x_max: f64,
    pub alpha: f64,
    pub seed: u64,
    pub weighting: Weighting,
    pub min_count: usize,
    pub threads: usize,
    pub vector_mode: VectorMode,
}

impl Default for TrainSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            dim: t.dim,
            window: t.window,
            iterations: t.iterations,
            learning_rate: t.learning_rate,
            x_max: t.x_max,
            alpha: t.alpha,
            seed: t.seed,
            weighting: t.weighting,
            min_count: t.min_count,
            threads: t.threads,
            vector_mode: VectorMode::Sum,
        }
    }
}

impl TrainSection {
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            dim: self.dim,
            window: self.window,
            iterations: self.iterations,
            learning_rate: self.learning_rate,
            x_max: self.x_max,
            alpha: self.alpha,
            seed: self.seed,
            weighting: self.weighting,
            min_count: self.min_count,
            threads: self.threads,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    /// Candidate list size for `query` and `evaluate`.
    pub n: usize,
    pub dims: Vec<usize>,
    pub windows: Vec<usize>,
    pub ns: Vec<usize>,
    pub variants: Vec<Variant>,
}

impl Default for EvalSection {
    fn default() -> Self {
        Self {
            n: 10,
            dims: vec![100, 200, 300, 400],
            windows: vec![10, 20, 30, 40],
            ns: vec![10],
            variants: vec![Variant::None],
        }
    }
}

/// Flags mirroring every configuration key.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    #[arg(long, global = true, help_heading = "Paths")]
    pub corpus: Option<PathBuf>,
    #[arg(long, global = true, help_heading = "Paths")]
    pub lexicon: Option<PathBuf>,
    #[arg(long, global = true, help_heading = "Paths")]
    pub wordnet: Option<PathBuf>,
    #[arg(long, global = true, help_heading = "Paths")]
    pub ic: Option<PathBuf>,
    /// Workspace root; also read from CHVENRICH_WORKSPACE.
    #[arg(long, global = true, env = WORKSPACE_ENV, help_heading = "Paths")]
    pub workspace: Option<PathBuf>,

    #[arg(long, global = true, help_heading = "Corpus")]
    pub stopwords: Option<PathBuf>,
    #[arg(long, global = true, help_heading = "Corpus")]
    pub domain_stopwords: Option<PathBuf>,
    #[arg(long, global = true, help_heading = "Corpus")]
    pub min_len: Option<usize>,

    #[arg(long, global = true, help_heading = "Lexicon")]
    pub min_freq: Option<usize>,
    #[arg(long, global = true, help_heading = "Lexicon")]
    pub min_terms: Option<usize>,
    #[arg(long, global = true, help_heading = "Lexicon")]
    pub drop_concept_name: Option<bool>,
    #[arg(long, global = true, help_heading = "Lexicon")]
    pub has_header: Option<bool>,
    /// leave-one-out, first-term or random
    #[arg(long, global = true, help_heading = "Lexicon")]
    pub seed_mode: Option<String>,
    #[arg(long, global = true, help_heading = "Lexicon")]
    pub rng_seed: Option<u64>,

    /// none, syno, hypo or hyper
    #[arg(long, global = true, help_heading = "Augment")]
    pub variant: Option<String>,
    /// contiguous or round-robin
    #[arg(long, global = true, help_heading = "Augment")]
    pub split: Option<String>,
    /// Comma-separated parts of speech (noun, verb, adj, adv)
    #[arg(long, global = true, help_heading = "Augment")]
    pub pos: Option<String>,
    /// exact or stemmed
    #[arg(long, global = true, help_heading = "Augment")]
    pub matcher: Option<String>,
    /// stemmed or surface
    #[arg(long, global = true, help_heading = "Augment")]
    pub form: Option<String>,

    #[arg(long, global = true, help_heading = "Train")]
    pub dim: Option<usize>,
    #[arg(long, global = true, help_heading = "Train")]
    pub window: Option<usize>,
    #[arg(long, global = true, help_heading = "Train")]
    pub iterations: Option<usize>,
    #[arg(long, global = true, help_heading = "Train")]
    pub learning_rate: Option<f64>,
    #[arg(long, global = true, help_heading = "Train")]
    pub x_max: Option<f64>,
    #[arg(long, global = true, help_heading = "Train")]
    pub alpha: Option<f64>,
    #[arg(long, global = true, help_heading = "Train")]
    pub seed: Option<u64>,
    /// inverse-distance or unit
    #[arg(long, global = true, help_heading = "Train")]
    pub weighting: Option<String>,
    #[arg(long, global = true, help_heading = "Train")]
    pub min_count: Option<usize>,
    #[arg(long, global = true, help_heading = "Train")]
    pub threads: Option<usize>,
    /// sum or main-only
    #[arg(long, global = true, help_heading = "Train")]
    pub vector_mode: Option<String>,

    #[arg(long, global = true, help_heading = "Eval")]
    pub n: Option<usize>,
    /// Comma-separated vector sizes for `sweep`
    #[arg(long, global = true, help_heading = "Eval")]
    pub dims: Option<String>,
    #[arg(long, global = true, help_heading = "Eval")]
    pub windows: Option<String>,
    #[arg(long, global = true, help_heading = "Eval")]
    pub ns: Option<String>,
    #[arg(long, global = true, help_heading = "Eval")]
    pub variants: Option<String>,
}

fn named<T: DeserializeOwned>(key: &str, value: &str) -> CliResult<T> {
    serde_json::from_value(serde_json::Value::String(value.trim().to_owned()))
        .map_err(|_| CliError::config(format!("--{}: unrecognised value {value:?}", key.replace('_', "-"))))
}

fn list<T, F>(key: &str, value: &str, parse: F) -> CliResult<Vec<T>>
where
    F: Fn(&str) -> CliResult<T>,
{
    let items: Vec<T> = value.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse(s.trim())).collect::<CliResult<_>>()?;
    if items.is_empty() {
        return Err(CliError::config(format!("--{}: empty list", key.replace('_', "-"))));
    }
    Ok(items)
}

fn number(key: &'static str) -> impl Fn(&str) -> CliResult<usize> {
    move |s| s.parse().map_err(|_| CliError::config(format!("--{key}: {s:?} is not a number")))
}

fn pos(s: &str) -> CliResult<Pos> {
    s.parse().map_err(|e: String| CliError::config(format!("--pos: {e}")))
}

fn variant(s: &str) -> CliResult<Variant> {
    s.parse().map_err(|e: String| CliError::config(format!("variant: {e}")))
}

impl PipelineConfig {
    /// Reads `path`, or `chvenrich.toml` in the working directory when no
    /// path is given and that file exists. Relative paths inside the file
    /// are taken relative to the file.
    pub fn load(path: Option<&Path>) -> CliResult<(Self, Option<PathBuf>)> {
        let path = match path {
            Some(p) => Some(p.to_path_buf()),
            None => Some(PathBuf::from(DEFAULT_CONFIG)).filter(|p| p.is_file()),
        };
        let Some(path) = path else { return Ok((Self::default(), None)) };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let mut config: Self =
            toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        config.paths.rebase(&base);
        config.corpus.stopwords = config.corpus.stopwords.map(|p| base.join(p));
        config.corpus.domain_stopwords = config.corpus.domain_stopwords.map(|p| base.join(p));
        Ok((config, Some(path)))
    }

    pub fn apply(&mut self, o: &Overrides) -> CliResult<()> {
        let p = &mut self.paths;
        set(&mut p.corpus, o.corpus.clone().map(Some));
        set(&mut p.lexicon, o.lexicon.clone().map(Some));
        set(&mut p.wordnet, o.wordnet.clone().map(Some));
        set(&mut p.ic, o.ic.clone().map(Some));
        set(&mut p.workspace, o.workspace.clone());

        let c = &mut self.corpus;
        set(&mut c.stopwords, o.stopwords.clone().map(Some));
        set(&mut c.domain_stopwords, o.domain_stopwords.clone().map(Some));
        set(&mut c.min_len, o.min_len);

        let l = &mut self.lexicon;
        set(&mut l.min_freq, o.min_freq);
        set(&mut l.min_terms, o.min_terms);
        set(&mut l.drop_concept_name, o.drop_concept_name);
        set(&mut l.has_header, o.has_header);
        set(&mut l.seed_mode, o.seed_mode.as_deref().map(|v| named("seed_mode", v)).transpose()?);
        set(&mut l.rng_seed, o.rng_seed);

        let a = &mut self.augment;
        set(&mut a.variant, o.variant.as_deref().map(variant).transpose()?);
        set(&mut a.split, o.split.as_deref().map(|v| v.parse().map_err(CliError::config)).transpose()?);
        set(&mut a.pos, o.pos.as_deref().map(|v| list("pos", v, pos)).transpose()?);
        set(&mut a.matcher, o.matcher.as_deref().map(|v| named("matcher", v)).transpose()?);
        set(&mut a.form, o.form.as_deref().map(|v| named("form", v)).transpose()?);

        let t = &mut self.train;
        set(&mut t.dim, o.dim);
        set(&mut t.window, o.window);
        set(&mut t.iterations, o.iterations);
        set(&mut t.learning_rate, o.learning_rate);
        set(&mut t.x_max, o.x_max);
        set(&mut t.alpha, o.alpha);
        set(&mut t.seed, o.seed);
        set(&mut t.weighting, o.weighting.as_deref().map(|v| v.parse().map_err(CliError::config)).transpose()?);
        set(&mut t.min_count, o.min_count);
        set(&mut t.threads, o.threads);
        set(&mut t.vector_mode, o.vector_mode.as_deref().map(|v| named("vector_mode", v)).transpose()?);

        let e = &mut self.eval;
        set(&mut e.n, o.n);
        set(&mut e.dims, o.dims.as_deref().map(|v| list("dims", v, number("dims"))).transpose()?);
        set(&mut e.windows, o.windows.as_deref().map(|v| list("windows", v, number("windows"))).transpose()?);
        set(&mut e.ns, o.ns.as_deref().map(|v| list("ns", v, number("ns"))).transpose()?);
        set(&mut e.variants, o.variants.as_deref().map(|v| list("variants", v, variant)).transpose()?);
        Ok(())
    }

    /// Range checks that do not need any file.
    pub fn validate(&self) -> CliResult<()> {
        if self.corpus.min_len == 0 {
            return Err(CliError::config("min_len must be at least 1"));
        }
        if self.lexicon.min_terms < 2 {
            return Err(CliError::config("min_terms must be at least 2 so every concept has a seed and a target"));
        }
        if self.augment.pos.is_empty() {
            return Err(CliError::config("pos must name at least one part of speech"));
        }
        self.train.train_config().validate().map_err(|e| CliError::config(e.to_string()))?;
        if self.eval.n == 0 || self.eval.ns.contains(&0) {
            return Err(CliError::config("candidate list size n must be at least 1"));
        }
        if self.eval.dims.is_empty() || self.eval.windows.is_empty() || self.eval.ns.is_empty() || self.eval.variants.is_empty() {
            return Err(CliError::config("sweep grid lists must not be empty"));
        }
        if self.eval.dims.contains(&0) {
            return Err(CliError::config("dims must be at least 1"));
        }
        if let Some(&w) = self.eval.windows.iter().find(|&&w| w == 0 || w > chvenrich::embed::MAX_WINDOW) {
            return Err(CliError::config(format!("window {w} outside 1..={}", chvenrich::embed::MAX_WINDOW)));
        }
        Ok(())
    }
}

impl Paths {
    fn rebase(&mut self, base: &Path) {
        for p in [&mut self.corpus, &mut self.lexicon, &mut self.wordnet, &mut self.ic].into_iter().flatten() {
            *p = base.join(&*p);
        }
        self.workspace = base.join(&self.workspace);
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}
