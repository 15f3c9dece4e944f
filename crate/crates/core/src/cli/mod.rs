//! Command-line front end: `explain`, `reproduce-table`, `render` and
//! `ingest`. The binary is a thin wrapper around [`run`].

pub mod bridge;
pub mod ingest;
pub mod output;
pub mod render;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::afa::{
    generate_grid, local_surrogate, shapley_values, BackgroundData, ShapleyMode, SurrogateConfig,
};
use crate::engine::{CiuEngine, CiuParams};
use crate::error::{Error, Result};
use crate::feature_set::FeatureSet;
use crate::model::{BlackBoxModel, FeatureKind, FeatureSpace, Instance, UtilityMapping};
use crate::testbed::{reproduce_table, ReferenceFunction};

pub use bridge::ExternalModelBridge;
pub use ingest::{ingest_csv, Ingested};
pub use output::{Method, Record, RecordValue, RunOutput};
pub use render::{render_bars, RenderFormat};

/// Grids larger than this must be replaced by a `--background` file.
const MAX_GRID_ROWS: usize = 100_000;

/// Feature space plus optional output declarations, as read from `--space`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceDeclaration {
    #[serde(flatten)]
    pub space: FeatureSpace,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<OutputDeclaration>,
}

/// `worst` maps to utility 0 and `best` to 1; both absent means identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDeclaration {
    pub name: String,
    #[serde(default)]
    pub worst: Option<f64>,
    #[serde(default)]
    pub best: Option<f64>,
}

impl OutputDeclaration {
    fn utility(&self) -> Result<UtilityMapping> {
        match (self.worst, self.best) {
            (Some(w), Some(b)) => UtilityMapping::from_range(w, b),
            (None, None) => Ok(UtilityMapping::Identity),
            _ => Err(Error::Config(format!(
                "output `{}` must declare both worst and best, or neither",
                self.name
            ))),
        }
    }

    fn span(&self) -> Option<f64> {
        Some((self.best? - self.worst?).abs())
    }
}

impl SpaceDeclaration {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSource {
    Builtin(ReferenceFunction),
    Bridge(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelSource,
    pub space: Option<SpaceDeclaration>,
    /// One comma-separated value list per instance.
    pub instances: Vec<String>,
    /// `;`-separated feature sets, e.g. `1;2;1,2`. Defaults to each feature alone.
    pub features: Option<String>,
    pub target_concept: Option<String>,
    pub output_index: usize,
    pub methods: Vec<Method>,
    pub n: usize,
    pub seed: u64,
    pub influence_range: (f64, f64),
    pub neutral_cu: f64,
    pub grid_step: Option<f64>,
    pub shapley_samples: usize,
    pub surrogate_samples: usize,
    pub background: Option<PathBuf>,
}

impl RunConfig {
    pub fn builtin(function: ReferenceFunction, instances: Vec<String>) -> Self {
        Self {
            model: ModelSource::Builtin(function),
            space: None,
            instances,
            features: None,
            target_concept: None,
            output_index: 0,
            methods: vec![Method::Ciu, Method::Influence],
            n: crate::engine::DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            influence_range: crate::engine::DEFAULT_INFLUENCE_RANGE,
            neutral_cu: crate::engine::DEFAULT_NEUTRAL_CU,
            grid_step: None,
            shapley_samples: 1000,
            surrogate_samples: 1000,
            background: None,
        }
    }
}

pub const DEFAULT_SEED: u64 = 42;

struct Prepared {
    model: Box<dyn BlackBoxModel>,
    space: FeatureSpace,
    utility: UtilityMapping,
    output_span: Option<f64>,
    label: String,
}

fn prepare(config: &RunConfig) -> Result<Prepared> {
    let declared_output = config
        .space
        .as_ref()
        .and_then(|d| d.outputs.get(config.output_index));
    match &config.model {
        ModelSource::Builtin(f) => {
            let space = config
                .space
                .as_ref()
                .map_or_else(|| f.space(), |d| d.space.clone());
            let utility = match declared_output {
                Some(o) => o.utility()?,
                None => f.utility(),
            };
            let (lo, hi) = f.output_range();
            Ok(Prepared {
                model: Box::new(*f),
                space,
                utility,
                output_span: declared_output
                    .and_then(OutputDeclaration::span)
                    .or(Some(hi - lo)),
                label: format!("builtin:{}", f.name()),
            })
        }
        ModelSource::Bridge(cmd) => {
            let decl = config.space.as_ref().ok_or_else(|| {
                Error::Config("--bridge-cmd requires a --space declaration".into())
            })?;
            let outputs = if decl.outputs.is_empty() {
                vec!["y".to_string()]
            } else {
                decl.outputs.iter().map(|o| o.name.clone()).collect()
            };
            let bridge = ExternalModelBridge::spawn(cmd, decl.space.clone(), outputs)?;
            Ok(Prepared {
                model: Box::new(bridge),
                space: decl.space.clone(),
                utility: declared_output.map_or(Ok(UtilityMapping::Identity), |o| o.utility())?,
                output_span: declared_output.and_then(OutputDeclaration::span),
                label: format!("bridge:{cmd}"),
            })
        }
    }
}

fn record_instance(space: &FeatureSpace, instance: &Instance) -> Vec<RecordValue> {
    space
        .features()
        .iter()
        .zip(instance.values())
        .map(|(f, &v)| match f.kind {
            FeatureKind::Numeric { .. } => RecordValue::Number(v.as_f64()),
            FeatureKind::Categorical { .. } => RecordValue::Symbol(f.format_value(v)),
        })
        .collect()
}

fn background_for(config: &RunConfig, space: &FeatureSpace) -> Result<BackgroundData> {
    if let Some(path) = &config.background {
        return Ok(ingest_csv(path, Some(space))?.background);
    }
    let steps: Vec<f64> = match (config.grid_step, &config.model) {
        (Some(step), _) => vec![step],
        (None, ModelSource::Builtin(ReferenceFunction::Sombrero)) => vec![0.51],
        (None, _) => space
            .features()
            .iter()
            .map(|f| f.range().map_or(1.0, |(lo, hi)| (hi - lo) / 20.0))
            .collect(),
    };
    let rows: f64 = space
        .features()
        .iter()
        .enumerate()
        .map(|(k, f)| match f.range() {
            Some((lo, hi)) => ((hi - lo) / steps[k.min(steps.len() - 1)]).floor() + 1.0,
            None => f.level_count().unwrap_or(1) as f64,
        })
        .product();
    if rows > MAX_GRID_ROWS as f64 {
        return Err(Error::Config(format!(
            "background grid would have {rows:.0} rows (limit {MAX_GRID_ROWS}); pass --background or a larger --grid-step"
        )));
    }
    generate_grid(space, &steps)
}

/// Runs every requested method on every instance.
pub fn run_explain(config: &RunConfig) -> Result<RunOutput> {
    if config.methods.is_empty() {
        return Err(Error::Config("at least one method is required".into()));
    }
    if config.instances.is_empty() {
        return Err(Error::Config("at least one --instance is required".into()));
    }
    let prepared = prepare(config)?;
    let space = &prepared.space;
    let model: &dyn BlackBoxModel = prepared.model.as_ref();

    let sets: Vec<FeatureSet> = match &config.features {
        Some(text) => text
            .split(';')
            .map(|s| FeatureSet::parse(s, space))
            .collect::<Result<_>>()?,
        None => (0..space.len()).map(FeatureSet::single).collect(),
    };
    let target = config
        .target_concept
        .as_deref()
        .map(|t| FeatureSet::parse(t, space))
        .transpose()?;
    let instances: Vec<Instance> = config
        .instances
        .iter()
        .map(|text| {
            let fields: Vec<&str> = text.split(',').collect();
            space.parse_instance(&fields)
        })
        .collect::<Result<_>>()?;

    let params = CiuParams::new(config.seed)
        .with_n(config.n)
        .with_output(config.output_index)
        .with_utility(prepared.utility)
        .with_influence_range(config.influence_range.0, config.influence_range.1)
        .with_neutral_cu(config.neutral_cu);
    let engine = CiuEngine::new(model, space);
    let wants_ciu = config
        .methods
        .iter()
        .any(|m| matches!(m, Method::Ciu | Method::Influence));
    let needs_background = config.methods.contains(&Method::Shapley);
    let background = if needs_background {
        Some(background_for(config, space)?)
    } else {
        None
    };

    let mut records = Vec::new();
    for (k, instance) in instances.iter().enumerate() {
        let base = |method: Method, set: FeatureSet| Record {
            instance_index: k + 1,
            instance: record_instance(space, instance),
            method,
            labels: set.iter().map(|i| space.feature(i).name.clone()).collect(),
            feature_set: set,
            output_index: config.output_index,
            seed: config.seed,
            ciu: None,
            attribution: None,
            influence_range: None,
            output_span: None,
        };
        let explanation = if wants_ciu {
            Some(engine.explain(instance, &sets, target.as_ref(), &params)?)
        } else {
            None
        };
        for &method in &config.methods {
            match method {
                Method::Ciu | Method::Influence => {
                    let ex = explanation.as_ref().expect("computed above");
                    for result in &ex.results {
                        let mut r = base(method, result.studied.clone());
                        r.ciu = Some(result.clone());
                        if method == Method::Influence {
                            r.influence_range = Some(config.influence_range);
                        }
                        records.push(r);
                    }
                }
                Method::Shapley => {
                    let bg = background.as_ref().expect("computed above");
                    let mode = ShapleyMode::auto(space.len(), config.shapley_samples, config.seed);
                    let a = shapley_values(model, space, instance, bg, config.output_index, mode)?;
                    let mut r = base(method, FeatureSet::all(space.len()));
                    r.attribution = Some(a);
                    r.output_span = prepared.output_span;
                    records.push(r);
                }
                Method::Surrogate => {
                    let cfg = SurrogateConfig::new(config.surrogate_samples, config.seed);
                    let a = local_surrogate(model, space, instance, &cfg, config.output_index)?;
                    let mut r = base(method, FeatureSet::all(space.len()));
                    r.attribution = Some(a);
                    r.output_span = prepared.output_span;
                    records.push(r);
                }
            }
        }
    }

    Ok(RunOutput {
        model: prepared.label,
        feature_names: space.names(),
        output_index: config.output_index,
        seed: config.seed,
        n: config.n,
        records,
    })
}

/// Records grouped by (instance, method), in first-appearance order.
pub fn group_records(records: &[Record]) -> Vec<Vec<Record>> {
    let mut groups: Vec<Vec<Record>> = Vec::new();
    for r in records {
        match groups
            .iter_mut()
            .find(|g| g[0].instance_index == r.instance_index && g[0].method == r.method)
        {
            Some(g) => g.push(r.clone()),
            None => groups.push(vec![r.clone()]),
        }
    }
    groups
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    TextBars,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotFormat {
    Text,
    Svg,
}

#[derive(Debug, Parser)]
#[command(
    name = "ciu",
    version,
    about = "Contextual importance and utility explanations for black-box models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Explain one or more instances.
    Explain(Box<ExplainArgs>),
    /// Recompute a reference table (1, 2, 3 or 5) and report deltas.
    ReproduceTable(TableArgs),
    /// Draw bar plots from a JSON artifact written by `explain`.
    Render(RenderArgs),
    /// Read a CSV file and report (or write) its feature space.
    Ingest(IngestArgs),
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    /// Builtin model: linear, sum, or, xor, rules, sombrero.
    #[arg(
        long,
        conflicts_with = "bridge_cmd",
        required_unless_present = "bridge_cmd"
    )]
    pub model: Option<String>,
    /// Shell command of an external model speaking the line-delimited JSON bridge protocol.
    #[arg(long = "bridge-cmd")]
    pub bridge_cmd: Option<String>,
    /// JSON feature-space declaration.
    #[arg(long)]
    pub space: Option<PathBuf>,
    /// Comma-separated feature values; repeat for several instances.
    #[arg(long, required = true)]
    pub instance: Vec<String>,
    /// `;`-separated feature sets, 1-based or by name (e.g. `1;2;1,2`).
    #[arg(long)]
    pub features: Option<String>,
    /// Target concept {I} the sets are compared against (default: all features).
    #[arg(long = "target-concept")]
    pub target_concept: Option<String>,
    /// 0-based model output index.
    #[arg(long = "output-index", default_value_t = 0)]
    pub output_index: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Method::Ciu, Method::Influence])]
    pub methods: Vec<Method>,
    /// Samples per sample set.
    #[arg(long = "N", default_value_t = crate::engine::DEFAULT_SAMPLES)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub rmin: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub rmax: f64,
    #[arg(long = "neutral-cu", default_value_t = 0.5)]
    pub neutral_cu: f64,
    /// Background grid step for Shapley values.
    #[arg(long = "grid-step")]
    pub grid_step: Option<f64>,
    /// Background CSV for Shapley values (overrides the grid).
    #[arg(long)]
    pub background: Option<PathBuf>,
    #[arg(long = "shapley-samples", default_value_t = 1000)]
    pub shapley_samples: usize,
    #[arg(long = "surrogate-samples", default_value_t = 1000)]
    pub surrogate_samples: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl ExplainArgs {
    pub fn to_config(&self) -> Result<RunConfig> {
        let model = match (&self.model, &self.bridge_cmd) {
            (Some(name), None) => ModelSource::Builtin(name.parse()?),
            (None, Some(cmd)) => ModelSource::Bridge(cmd.clone()),
            _ => {
                return Err(Error::Config(
                    "give exactly one of --model or --bridge-cmd".into(),
                ))
            }
        };
        let space = self
            .space
            .as_deref()
            .map(SpaceDeclaration::load)
            .transpose()?;
        Ok(RunConfig {
            model,
            space,
            instances: self.instance.clone(),
            features: self.features.clone(),
            target_concept: self.target_concept.clone(),
            output_index: self.output_index,
            methods: self.methods.clone(),
            n: self.n,
            seed: self.seed,
            influence_range: (self.rmin, self.rmax),
            neutral_cu: self.neutral_cu,
            grid_step: self.grid_step,
            shapley_samples: self.shapley_samples,
            surrogate_samples: self.surrogate_samples,
            background: self.background.clone(),
        })
    }
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Table number: 1, 2, 3 or 5.
    pub table: u8,
    #[arg(long, value_enum, default_value = "text")]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// JSON artifact from `explain --format json`.
    pub input: PathBuf,
    /// 1-based instance number inside the artifact.
    #[arg(long, default_value_t = 1)]
    pub instance: usize,
    /// Method to plot (default: the first one in the artifact).
    #[arg(long, value_enum)]
    pub methods: Option<Method>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: PlotFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    pub path: PathBuf,
    /// Declared feature space to validate against instead of inferring one.
    #[arg(long)]
    pub space: Option<PathBuf>,
    /// Where to write the feature space as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = path
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    path.with_file_name(format!("{stem}-{suffix}{ext}"))
}

/// Writes an explain run in the requested format.
pub fn write_artifacts(output: &RunOutput, format: OutputFormat, out: Option<&Path>) -> Result<()> {
    match format {
        OutputFormat::Json => emit(out, &output.to_json()?),
        OutputFormat::Csv => emit(out, &output.to_csv()?),
        OutputFormat::TextBars => {
            let text = group_records(&output.records)
                .iter()
                .map(|g| render_bars(g, RenderFormat::Text))
                .collect::<Result<Vec<_>>>()?
                .join("\n");
            emit(out, &text)
        }
        OutputFormat::Svg => {
            let groups = group_records(&output.records);
            if groups.len() == 1 || out.is_none() {
                let svg = groups
                    .iter()
                    .map(|g| render_bars(g, RenderFormat::Svg))
                    .collect::<Result<Vec<_>>>()?
                    .concat();
                return emit(out, &svg);
            }
            let out = out.expect("checked above");
            for g in &groups {
                let path = suffixed(
                    out,
                    &format!("{}-{}", g[0].instance_index, g[0].method.name()),
                );
                fs::write(path, render_bars(g, RenderFormat::Svg)?)?;
            }
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        CliCommand::Explain(args) => {
            let config = args.to_config()?;
            let output = run_explain(&config)?;
            for r in &output.records {
                if let Some(c) = &r.ciu {
                    if c.degenerate_studied || c.degenerate_target {
                        eprintln!(
                            "note: instance {} set {}: range is degenerate, CI/CU undefined",
                            r.instance_index, r.feature_set
                        );
                    }
                }
            }
            write_artifacts(&output, args.format, args.out.as_deref())
        }
        CliCommand::ReproduceTable(args) => {
            let report = reproduce_table(args.table)?;
            let text = match args.format {
                ReportFormat::Text => report.render_text(),
                ReportFormat::Json => {
                    let mut s = serde_json::to_string_pretty(&report)?;
                    s.push('\n');
                    s
                }
            };
            emit(args.out.as_deref(), &text)
        }
        CliCommand::Render(args) => {
            let output = RunOutput::from_json(&fs::read_to_string(&args.input)?)?;
            let method = args
                .methods
                .or_else(|| output.records.first().map(|r| r.method))
                .ok_or(Error::EmptyRecords)?;
            let records: Vec<Record> = output
                .records
                .into_iter()
                .filter(|r| r.instance_index == args.instance && r.method == method)
                .collect();
            let format = match args.format {
                PlotFormat::Text => RenderFormat::Text,
                PlotFormat::Svg => RenderFormat::Svg,
            };
            emit(args.out.as_deref(), &render_bars(&records, format)?)
        }
        CliCommand::Ingest(args) => {
            let declared = args
                .space
                .as_deref()
                .map(SpaceDeclaration::load)
                .transpose()?;
            let ingested = ingest_csv(&args.path, declared.as_ref().map(|d| &d.space))?;
            print!("{}", ingested.summary());
            if let Some(out) = &args.out {
                let decl = SpaceDeclaration {
                    space: ingested.space.clone(),
                    outputs: declared.map(|d| d.outputs).unwrap_or_default(),
                };
                let mut s = serde_json::to_string_pretty(&decl)?;
                s.push('\n');
                fs::write(out, s)?;
            }
            Ok(())
        }
    }
}

/// Parses arguments and runs a command. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
