//! End-to-end orchestration: data source, discretization, dependency
//! rules, network training, rule extraction and evaluation, with every
//! intermediate written to an output directory.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::discretize::{candidate_cuts, rsbr_discretize, CutSet};
use crate::error::{Error, Result};
use crate::evolution::{
    concatenate, evolve_modular, write_log_csv, Chromosome, EvolutionInput, FitnessData, FitnessReport, GaConfig,
};
use crate::extract::{compute_thresholds, extract_rules, ExtractionConfig, RuleBase};
use crate::features::{derive_features, MinMaxScaler, PriceSeries};
use crate::fuzzy::{class_membership, init_encoding, ClassStatistics, FuzzyGenerators, FuzzyModel};
use crate::metrics::{Evaluation, MetricsReport};
use crate::network::{backprop_train, encode_rules, EncodeOptions, ModularNetwork, TrainConfig};
use crate::rough::{dependency_rules, DependencyRuleSet, RuleOptions, ThresholdPolicy};
use crate::synth::make_synthetic;
use crate::table::{complete_table, split, CompletionPolicy, DecisionTable};

/// Where the decision table comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// Gaussian blobs from `per_class`, `separation` and `data_seed`.
    #[default]
    Synthetic,
    /// Daily price CSV at `input`.
    Prices,
    /// Decision-table CSV at `input`.
    Table,
}

/// Network the pipeline trains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ModelKind {
    /// Knowledge-seeded modular evolution.
    #[default]
    S,
    /// Fully connected network trained by back-propagation.
    F,
    /// Knowledge-seeded network trained by back-propagation.
    R,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelKind::S => "S",
            ModelKind::F => "F",
            ModelKind::R => "R",
        };
        f.write_str(s)
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" | "s" => Ok(ModelKind::S),
            "F" | "f" => Ok(ModelKind::F),
            "R" | "r" => Ok(ModelKind::R),
            other => Err(Error::Config(format!("unknown model `{other}` (expected S, F or R)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdKind {
    #[default]
    Adaptive,
    Fixed,
}

/// Flat key/value run configuration. Every key is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub source: Source,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    pub per_class: usize,
    pub separation: f64,
    pub data_seed: u64,
    /// Feature window in days.
    pub window: usize,
    /// Forward-return horizon in days.
    pub horizon: usize,
    pub classes: usize,
    pub train_fraction: f64,
    pub seed: u64,
    pub completion: CompletionPolicy,
    /// Membership level at which a linguistic literal counts as on.
    pub crispness: f64,
    pub threshold: ThresholdKind,
    pub threshold_factor: f64,
    pub threshold_floor: f64,
    pub threshold_value: f64,
    /// Longest dependency-rule conjunct; 0 disables the cap.
    pub max_conjunct_len: usize,
    pub model: ModelKind,
    /// Hidden nodes of the fully connected baseline.
    pub hidden: usize,
    pub second_hidden_layer: bool,
    /// Record extraction time in `metrics.json` (breaks byte-identity).
    pub record_timing: bool,
    pub out: PathBuf,
    #[serde(flatten)]
    pub ga: GaConfig,
    #[serde(flatten)]
    pub backprop: TrainConfig,
    #[serde(flatten)]
    pub extraction: ExtractionConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            source: Source::Synthetic,
            input: None,
            per_class: 100,
            separation: 2.0,
            data_seed: 42,
            window: 5,
            horizon: 1,
            classes: 6,
            train_fraction: 0.1,
            seed: 1,
            completion: CompletionPolicy::Drop,
            crispness: 0.5,
            threshold: ThresholdKind::Adaptive,
            threshold_factor: 0.5,
            threshold_floor: 0.1,
            threshold_value: 0.5,
            max_conjunct_len: 6,
            model: ModelKind::S,
            hidden: 18,
            second_hidden_layer: false,
            record_timing: false,
            out: PathBuf::from("out"),
            ga: GaConfig::default(),
            backprop: TrainConfig::default(),
            extraction: ExtractionConfig::default(),
        }
    }
}

impl PipelineConfig {
    /// Parse a flat TOML file; unknown keys are rejected.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        let known = Self::known_keys()?;
        if let Some(bad) = table.keys().find(|k| !known.contains(k.as_str())) {
            return Err(Error::Config(format!("unknown key `{bad}`")));
        }
        let cfg: Self = table.try_into().map_err(|e| Error::Config(format!("{e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    fn known_keys() -> Result<std::collections::BTreeSet<String>> {
        let mut keys: std::collections::BTreeSet<String> = Self::default().to_table()?.keys().cloned().collect();
        keys.insert("input".into());
        Ok(keys)
    }

    fn to_table(&self) -> Result<toml::Table> {
        toml::Table::try_from(self).map_err(|e| Error::Config(format!("{e}")))
    }

    /// Canonical TOML text with every key spelled out.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&self.to_table()?).map_err(|e| Error::Config(format!("{e}")))
    }

    /// SHA-256 of the canonical text, excluding the output directory.
    pub fn hash(&self) -> Result<String> {
        let mut copy = self.clone();
        copy.out = PathBuf::new();
        Ok(hex::encode(Sha256::digest(copy.to_toml()?.as_bytes())))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.window == 0 || self.horizon == 0 {
            return fail("window and horizon must be at least 1".into());
        }
        if self.classes < 2 {
            return fail(format!("classes must be at least 2, got {}", self.classes));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return fail(format!("train_fraction must lie in (0, 1), got {}", self.train_fraction));
        }
        if !(self.crispness > 0.0 && self.crispness < 1.0) {
            return fail(format!("crispness must lie in (0, 1), got {}", self.crispness));
        }
        if self.source != Source::Synthetic && self.input.is_none() {
            return fail(format!("source {:?} needs `input`", self.source));
        }
        if self.hidden == 0 {
            return fail("hidden must be positive".into());
        }
        self.ga.validate().map_err(|e| Error::Config(e.to_string()))
    }

    pub fn threshold_policy(&self) -> ThresholdPolicy {
        match self.threshold {
            ThresholdKind::Adaptive => ThresholdPolicy::Adaptive {
                factor: self.threshold_factor,
                floor: self.threshold_floor,
            },
            ThresholdKind::Fixed => ThresholdPolicy::Fixed {
                value: self.threshold_value,
            },
        }
    }

    pub fn rule_options(&self) -> RuleOptions {
        RuleOptions {
            threshold: self.threshold_policy(),
            max_conjunct_len: (self.max_conjunct_len > 0).then_some(self.max_conjunct_len),
        }
    }
}

/// Artifact file names.
pub mod artifacts {
    pub const DECISION_TABLE: &str = "decision_table.csv";
    pub const CUTS: &str = "cuts.json";
    pub const DEPENDENCY_RULES: &str = "dependency_rules.txt";
    pub const FUZZY: &str = "fuzzy.json";
    pub const NETWORK: &str = "network.json";
    pub const EVOLUTION_LOG: &str = "evolution_log.csv";
    pub const RULES_TEXT: &str = "rules.txt";
    pub const RULES_JSON: &str = "rules.json";
    pub const METRICS: &str = "metrics.json";
    pub const MANIFEST: &str = "manifest.json";
    pub const PARTIAL: &str = ".partial";
}

/// Read the configured source and complete missing cells.
pub fn ingest(cfg: &PipelineConfig) -> Result<DecisionTable> {
    let raw = match cfg.source {
        Source::Synthetic => make_synthetic(cfg.per_class, cfg.classes, cfg.separation, cfg.data_seed)?,
        Source::Prices => {
            let path = cfg.input.as_ref().ok_or_else(|| Error::Config("missing input".into()))?;
            derive_features(&PriceSeries::load(path)?, cfg.window, cfg.horizon, cfg.classes)?
        }
        Source::Table => {
            let path = cfg.input.as_ref().ok_or_else(|| Error::Config("missing input".into()))?;
            DecisionTable::load(path)?
        }
    };
    complete_table(&raw, cfg.completion)
}

/// Split and train-fitted scaling of a completed table.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub train: DecisionTable,
    pub test: DecisionTable,
    pub scaler: MinMaxScaler,
    pub classes: usize,
}

pub fn prepare(table: &DecisionTable, cfg: &PipelineConfig) -> Result<Prepared> {
    let classes = table.class_count();
    if let Some(k) = (1..=classes).find(|k| !table.decisions().contains(k)) {
        return Err(Error::EmptyClass(k));
    }
    let parts = split(table, cfg.train_fraction, cfg.seed)?;
    let scaler = MinMaxScaler::fit(&parts.train.dense_rows())?;
    Ok(Prepared {
        train: scaler.transform_table(&parts.train)?,
        test: scaler.transform_table(&parts.test)?,
        scaler,
        classes,
    })
}

pub fn discretize_phase(prep: &Prepared) -> Result<CutSet> {
    let d = rsbr_discretize(&prep.train, &candidate_cuts(&prep.train))?;
    Ok(d.cuts)
}

/// Fuzzy front end and per-class dependency rules.
#[derive(Debug, Clone)]
pub struct Knowledge {
    pub model: FuzzyModel,
    pub stats: ClassStatistics,
    pub rules: DependencyRuleSet,
}

pub fn knowledge_phase(prep: &Prepared, cfg: &PipelineConfig) -> Result<Knowledge> {
    let features = init_encoding(&prep.train)?;
    let stats = ClassStatistics::from_table(&prep.train, prep.classes)?;
    let generators = FuzzyGenerators::initial(&prep.train, &stats);
    let model = FuzzyModel { features, generators };
    let rules = rules_from_model(prep, &model, cfg)?;
    Ok(Knowledge { model, stats, rules })
}

fn rules_from_model(prep: &Prepared, model: &FuzzyModel, cfg: &PipelineConfig) -> Result<DependencyRuleSet> {
    let fuzzy = model.features.fuzzify_all(&prep.train.dense_rows())?;
    let mut per_class = vec![Vec::new(); prep.classes];
    for (row, &d) in fuzzy.into_iter().zip(prep.train.decisions()) {
        per_class[d - 1].push(row);
    }
    dependency_rules(&per_class, &cfg.rule_options())
}

/// `network.json`: the trained network with the fuzzy model it expects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub model: ModelKind,
    pub network: ModularNetwork,
    pub fuzzy: FuzzyModel,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chromosome: Option<Chromosome>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fitness: Option<FitnessReport>,
}

impl TrainedModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Self = serde_json::from_str(text)?;
        // Re-validate the topology.
        let net = ModularNetwork::from_json(&serde_json::to_string(&raw.network)?)?;
        Ok(Self { network: net, ..raw })
    }
}

/// Training log in CSV form.
pub enum TrainingLog {
    Generations(Vec<crate::evolution::GenerationRecord>),
    Epochs(Vec<f64>),
}

impl TrainingLog {
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        match self {
            TrainingLog::Generations(g) => write_log_csv(g, &mut buf)?,
            TrainingLog::Epochs(losses) => {
                let mut w = csv::Writer::from_writer(&mut buf);
                w.write_record(["epoch", "loss"])?;
                for (i, l) in losses.iter().enumerate() {
                    w.write_record([i.to_string(), l.to_string()])?;
                }
                w.flush()?;
            }
        }
        Ok(buf)
    }
}

fn membership_targets(prep: &Prepared, k: &Knowledge) -> Result<Vec<Vec<f64>>> {
    prep.train
        .dense_rows()
        .iter()
        .map(|r| class_membership(r, &k.stats, k.model.generators))
        .collect()
}

pub fn train_phase(prep: &Prepared, k: &Knowledge, cfg: &PipelineConfig) -> Result<(TrainedModel, TrainingLog)> {
    let raw = prep.train.dense_rows();
    let n = prep.train.attribute_count();
    let encode = EncodeOptions {
        second_hidden_layer: cfg.second_hidden_layer,
    };
    match cfg.model {
        ModelKind::S => {
            let data = FitnessData::new(raw, prep.train.decisions().to_vec(), &k.model)?;
            let feature_max: Vec<f64> = (0..n)
                .map(|j| data.raw.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max))
                .collect();
            let input = EvolutionInput {
                data: &data,
                model: &k.model,
                feature_max: &feature_max,
                classes: prep.classes,
                encode,
            };
            let out = evolve_modular(&k.rules, &input, &cfg.ga, cfg.seed)?;
            log::info!(
                "evolution: {} combination(s), best F = {:.4} (f1 = {:.4}, {} links)",
                out.combinations,
                out.report.fitness,
                out.report.f1,
                out.report.present_links
            );
            Ok((
                TrainedModel {
                    model: ModelKind::S,
                    network: out.network,
                    fuzzy: out.model,
                    chromosome: Some(out.best),
                    fitness: Some(out.report),
                },
                TrainingLog::Generations(out.log),
            ))
        }
        ModelKind::F | ModelKind::R => {
            let inputs = k.model.features.fuzzify_all(&raw)?;
            let targets = membership_targets(prep, k)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let net = if cfg.model == ModelKind::F {
                ModularNetwork::dense(vec![3 * n, cfg.hidden, prep.classes], (1..=prep.classes).collect(), || {
                    rng.random_range(-0.5..=0.5)
                })?
            } else {
                let subs = encode_rules(&k.rules, n, encode)?;
                concatenate(&subs, prep.classes, cfg.ga.inter_init, &mut rng)?.network
            };
            let out = backprop_train(&net, &inputs, &targets, &cfg.backprop)?;
            Ok((
                TrainedModel {
                    model: cfg.model,
                    network: out.network,
                    fuzzy: k.model.clone(),
                    chromosome: None,
                    fitness: None,
                },
                TrainingLog::Epochs(out.losses),
            ))
        }
    }
}

/// Extract rules; returns them with the elapsed wall-clock seconds.
pub fn extract_phase(trained: &TrainedModel, cfg: &PipelineConfig) -> Result<(RuleBase, f64)> {
    let start = Instant::now();
    let th = compute_thresholds(&trained.network)?;
    let rules = extract_rules(&trained.network, &th, &cfg.extraction)?;
    Ok((rules, start.elapsed().as_secs_f64()))
}

pub fn evaluate_phase(
    prep: &Prepared,
    trained: &TrainedModel,
    rules: &RuleBase,
    cfg: &PipelineConfig,
    cpu_sec: f64,
) -> Result<MetricsReport> {
    let fuzz = |t: &DecisionTable| trained.fuzzy.features.fuzzify_all(&t.dense_rows());
    let train_x = fuzz(&prep.train)?;
    let test_x = fuzz(&prep.test)?;
    let model = trained.model.to_string();
    MetricsReport::evaluate(Evaluation {
        model: &model,
        network: &trained.network,
        rules,
        train: (&train_x, prep.train.decisions()),
        test: (&test_x, prep.test.decisions()),
        crispness: cfg.crispness,
        classes: prep.classes,
        cpu_sec: cfg.record_timing.then_some(cpu_sec),
    })
}

/// `manifest.json`: enough to re-run and to check the outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub model: ModelKind,
    pub config_hash: String,
    pub config: String,
    /// SHA-256 per artifact file name.
    pub artifacts: BTreeMap<String, String>,
}

impl Manifest {
    /// Check the stored config hash and every artifact digest under `dir`.
    pub fn verify(&self, dir: &Path) -> Result<()> {
        let cfg = PipelineConfig::from_toml_str(&self.config)?;
        if cfg.hash()? != self.config_hash {
            return Err(Error::Config("manifest config hash does not match its config".into()));
        }
        for (name, digest) in &self.artifacts {
            let actual = hex::encode(Sha256::digest(std::fs::read(dir.join(name))?));
            if &actual != digest {
                return Err(Error::Config(format!("artifact `{name}` changed since the run")));
            }
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Everything a full run produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub metrics: MetricsReport,
    pub rules: RuleBase,
    pub trained: TrainedModel,
    pub dependency_rules: DependencyRuleSet,
    pub manifest: Manifest,
}

struct Writer<'a> {
    dir: &'a Path,
    written: BTreeMap<String, String>,
}

impl Writer<'_> {
    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        std::fs::write(self.dir.join(name), bytes)?;
        self.written.insert(name.to_string(), hex::encode(Sha256::digest(bytes)));
        Ok(())
    }

    fn put_text(&mut self, name: &str, text: &str) -> Result<()> {
        let mut s = text.to_string();
        if !s.ends_with('\n') {
            s.push('\n');
        }
        self.put(name, s.as_bytes())
    }
}

fn tagged<T>(name: &'static str, dir: &Path, result: Result<T>) -> Result<T> {
    result.map_err(|e| {
        let e = e.in_phase(name);
        if let Err(io) = std::fs::write(dir.join(artifacts::PARTIAL), format!("{e}\n")) {
            log::error!("could not write the partial marker: {io}");
        }
        e
    })
}

/// Run every phase and write all artifacts under `cfg.out`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let dir = cfg.out.as_path();
    std::fs::create_dir_all(dir)?;
    let marker = dir.join(artifacts::PARTIAL);
    if marker.exists() {
        std::fs::remove_file(&marker)?;
    }
    let mut w = Writer {
        dir,
        written: BTreeMap::new(),
    };

    let table = tagged("ingest", dir, ingest(cfg))?;
    let mut csv_bytes = Vec::new();
    tagged("ingest", dir, table.write_csv(&mut csv_bytes))?;
    tagged("ingest", dir, w.put(artifacts::DECISION_TABLE, &csv_bytes))?;
    let prep = tagged("ingest", dir, prepare(&table, cfg))?;

    let cuts = tagged("discretize", dir, discretize_phase(&prep))?;
    tagged("discretize", dir, cuts.to_json().and_then(|j| w.put_text(artifacts::CUTS, &j)))?;

    let knowledge = tagged("rules", dir, knowledge_phase(&prep, cfg))?;
    tagged(
        "rules",
        dir,
        w.put_text(artifacts::DEPENDENCY_RULES, &knowledge.rules.to_text()),
    )?;
    tagged(
        "rules",
        dir,
        serde_json::to_string_pretty(&knowledge.model)
            .map_err(Error::from)
            .and_then(|j| w.put_text(artifacts::FUZZY, &j)),
    )?;

    let (trained, log) = tagged("train", dir, train_phase(&prep, &knowledge, cfg))?;
    tagged("train", dir, trained.to_json().and_then(|j| w.put_text(artifacts::NETWORK, &j)))?;
    tagged("train", dir, log.to_csv().and_then(|b| w.put(artifacts::EVOLUTION_LOG, &b)))?;

    let (rules, secs) = tagged("extract", dir, extract_phase(&trained, cfg))?;
    tagged("extract", dir, w.put_text(artifacts::RULES_TEXT, &rules.to_text()))?;
    tagged("extract", dir, rules.to_json().and_then(|j| w.put_text(artifacts::RULES_JSON, &j)))?;

    let metrics = tagged("evaluate", dir, evaluate_phase(&prep, &trained, &rules, cfg, secs))?;
    tagged("evaluate", dir, metrics.to_json().and_then(|j| w.put_text(artifacts::METRICS, &j)))?;

    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        model: cfg.model,
        config_hash: cfg.hash()?,
        config: cfg.to_toml()?,
        artifacts: w.written.clone(),
    };
    let json = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(dir.join(artifacts::MANIFEST), format!("{json}\n"))?;
    Ok(RunSummary {
        metrics,
        rules,
        trained,
        dependency_rules: knowledge.rules,
        manifest,
    })
}

/// One resumable step; each reads what earlier steps left in `cfg.out`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Ingest,
    Discretize,
    Rules,
    Train,
    Extract,
    Evaluate,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Ingest => "ingest",
            Phase::Discretize => "discretize",
            Phase::Rules => "rules",
            Phase::Train => "train",
            Phase::Extract => "extract",
            Phase::Evaluate => "evaluate",
        }
    }
}

fn read_artifact(dir: &Path, name: &str) -> Result<String> {
    std::fs::read_to_string(dir.join(name))
        .map_err(|e| Error::Config(format!("cannot read `{}` ({e}); run the earlier phases first", dir.join(name).display())))
}

fn stored_preparation(cfg: &PipelineConfig) -> Result<Prepared> {
    let text = read_artifact(&cfg.out, artifacts::DECISION_TABLE)?;
    prepare(&DecisionTable::read_csv(text.as_bytes())?, cfg)
}

fn stored_knowledge(prep: &Prepared, cfg: &PipelineConfig) -> Result<Knowledge> {
    let model: FuzzyModel = serde_json::from_str(&read_artifact(&cfg.out, artifacts::FUZZY)?)?;
    let rules = DependencyRuleSet::parse_text(&read_artifact(&cfg.out, artifacts::DEPENDENCY_RULES)?)?;
    let stats = ClassStatistics::from_table(&prep.train, prep.classes)?;
    Ok(Knowledge { model, stats, rules })
}

fn stored_model(cfg: &PipelineConfig) -> Result<TrainedModel> {
    TrainedModel::from_json(&read_artifact(&cfg.out, artifacts::NETWORK)?)
}

fn run_one(cfg: &PipelineConfig, phase: Phase, w: &mut Writer<'_>) -> Result<()> {
    match phase {
        Phase::Ingest => {
            let mut bytes = Vec::new();
            ingest(cfg)?.write_csv(&mut bytes)?;
            w.put(artifacts::DECISION_TABLE, &bytes)
        }
        Phase::Discretize => w.put_text(artifacts::CUTS, &discretize_phase(&stored_preparation(cfg)?)?.to_json()?),
        Phase::Rules => {
            let k = knowledge_phase(&stored_preparation(cfg)?, cfg)?;
            w.put_text(artifacts::DEPENDENCY_RULES, &k.rules.to_text())?;
            w.put_text(artifacts::FUZZY, &serde_json::to_string_pretty(&k.model)?)
        }
        Phase::Train => {
            let prep = stored_preparation(cfg)?;
            let k = stored_knowledge(&prep, cfg)?;
            let (trained, log) = train_phase(&prep, &k, cfg)?;
            w.put_text(artifacts::NETWORK, &trained.to_json()?)?;
            w.put(artifacts::EVOLUTION_LOG, &log.to_csv()?)
        }
        Phase::Extract => {
            let (rules, _) = extract_phase(&stored_model(cfg)?, cfg)?;
            w.put_text(artifacts::RULES_TEXT, &rules.to_text())?;
            w.put_text(artifacts::RULES_JSON, &rules.to_json()?)
        }
        Phase::Evaluate => {
            let prep = stored_preparation(cfg)?;
            let trained = stored_model(cfg)?;
            let rules = RuleBase::from_json(&read_artifact(&cfg.out, artifacts::RULES_JSON)?)?;
            // Time a fresh extraction only when timing is asked for.
            let secs = if cfg.record_timing { extract_phase(&trained, cfg)?.1 } else { 0.0 };
            let metrics = evaluate_phase(&prep, &trained, &rules, cfg, secs)?;
            w.put_text(artifacts::METRICS, &metrics.to_json()?)
        }
    }
}

/// Run a single phase against the artifacts already in `cfg.out`.
pub fn run_phase(cfg: &PipelineConfig, phase: Phase) -> Result<()> {
    cfg.validate()?;
    let dir = cfg.out.as_path();
    std::fs::create_dir_all(dir)?;
    let mut w = Writer {
        dir,
        written: BTreeMap::new(),
    };
    let outcome = run_one(cfg, phase, &mut w);
    tagged(phase.name(), dir, outcome)
}
