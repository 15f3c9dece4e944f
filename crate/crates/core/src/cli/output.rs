//! Run artifacts: the JSON document and its CSV flattening.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::afa::AttributionResult;
use crate::engine::CiuResult;
use crate::error::Result;
use crate::feature_set::FeatureSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ciu,
    Influence,
    Shapley,
    Surrogate,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Ciu => "ciu",
            Method::Influence => "influence",
            Method::Shapley => "shapley",
            Method::Surrogate => "surrogate",
        }
    }
}

/// A feature value as written to artifacts: a number or a category symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RecordValue {
    Number(f64),
    Symbol(String),
}

impl std::fmt::Display for RecordValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RecordValue::Number(v) => write!(f, "{v}"),
            RecordValue::Symbol(s) => f.write_str(s),
        }
    }
}

/// One (instance, feature set, method) result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    /// 1-based position of the instance in the run.
    pub instance_index: usize,
    pub instance: Vec<RecordValue>,
    pub method: Method,
    pub feature_set: FeatureSet,
    /// Feature names, used as bar labels.
    pub labels: Vec<String>,
    pub output_index: usize,
    pub seed: u64,
    pub ciu: Option<CiuResult>,
    pub attribution: Option<AttributionResult>,
    /// `[rmin, rmax]` for influence records.
    pub influence_range: Option<(f64, f64)>,
    /// Width of the model's output range, the fixed half-axis for attribution plots.
    pub output_span: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub model: String,
    pub feature_names: Vec<String>,
    pub output_index: usize,
    pub seed: u64,
    #[serde(rename = "N")]
    pub n: usize,
    pub records: Vec<Record>,
}

impl RunOutput {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One CSV row per CIU record; attribution records expand to one row
    /// per feature.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "instance_index",
            "instance",
            "method",
            "feature_set",
            "output_index",
            "seed",
            "N",
            "ci",
            "cu",
            "influence",
            "ymin_i",
            "ymax_i",
            "ymin_I",
            "ymax_I",
            "y_C",
            "umin_i",
            "umax_i",
            "umin_I",
            "umax_I",
            "u_C",
            "phi",
            "phi0",
            "prediction",
            "fit_quality",
        ])?;
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.records {
            let instance = r
                .instance
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(";");
            let head = [
                r.instance_index.to_string(),
                instance,
                r.method.name().to_string(),
            ];
            if let Some(c) = &r.ciu {
                let row: Vec<String> = head
                    .iter()
                    .cloned()
                    .chain([
                        r.feature_set.to_string(),
                        r.output_index.to_string(),
                        r.seed.to_string(),
                        c.n.to_string(),
                        opt(c.ci),
                        opt(c.cu),
                        opt(c.influence),
                    ])
                    .chain(
                        [
                            c.ymin_i,
                            c.ymax_i,
                            c.ymin_target,
                            c.ymax_target,
                            c.y_context,
                            c.umin_i,
                            c.umax_i,
                            c.umin_target,
                            c.umax_target,
                            c.u_context,
                        ]
                        .iter()
                        .map(f64::to_string),
                    )
                    .chain(std::iter::repeat_n(String::new(), 4))
                    .collect();
                w.write_record(&row)?;
            }
            if let Some(a) = &r.attribution {
                for (k, phi) in a.phi.iter().enumerate() {
                    let row: Vec<String> = head
                        .iter()
                        .cloned()
                        .chain([
                            FeatureSet::single(k).to_string(),
                            r.output_index.to_string(),
                            r.seed.to_string(),
                            a.diagnostics.samples.to_string(),
                        ])
                        .chain(std::iter::repeat_n(String::new(), 13))
                        .chain([
                            phi.to_string(),
                            a.phi0.to_string(),
                            a.prediction.to_string(),
                            opt(a.fit_quality),
                        ])
                        .collect();
                    w.write_record(&row)?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}
