//! JSON weight files for the slot tagger and the relation extractors.
//!
//! Weights are stored sparsely as `[feature, label, weight]` triples in
//! feature order; zero weights are dropped.

use std::collections::BTreeMap;

use relay_core::perceptron::WeightMap;
use relay_core::relex::{PairClassifierModel, MODEL_VERSION, PAIR_TEMPLATES};
use relay_core::schema::DomainSchema;
use relay_core::slotfill::{Lexicon, TaggerModel, TAGGER_VERSION, TEMPLATES};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

type Triple = (String, String, f64);

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TaggerFile {
    version: u32,
    seed: u64,
    epochs: usize,
    templates: Vec<String>,
    labels: Vec<String>,
    train_accuracy: f64,
    lexicon: Lexicon,
    weights: Vec<Triple>,
}

/// Extractor file; the `kind` field tells the two apart.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ExtractorFile {
    /// Rules live in the schema, so only the domain is recorded.
    Heuristic { version: u32, domain: String },
    Learned {
        version: u32,
        domain: String,
        seed: u64,
        epochs: usize,
        schema_mask: bool,
        templates: Vec<String>,
        labels: Vec<String>,
        weights: Vec<Triple>,
    },
}

/// A loaded relation extractor.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtractorModel {
    Heuristic { domain: String },
    Learned(PairClassifierModel),
}

impl ExtractorModel {
    pub fn domain(&self) -> &str {
        match self {
            ExtractorModel::Heuristic { domain } => domain,
            ExtractorModel::Learned(m) => &m.domain,
        }
    }

    pub fn check_schema(&self, schema: &DomainSchema) -> Result<()> {
        if self.domain() == schema.domain() {
            Ok(())
        } else {
            Err(Error::Invalid(format!(
                "extractor was built for domain `{}`, schema is `{}`",
                self.domain(),
                schema.domain()
            )))
        }
    }
}

fn to_triples(weights: &WeightMap, labels: &[String]) -> Vec<Triple> {
    let mut out = Vec::new();
    for (feature, row) in weights {
        for (label, &w) in labels.iter().zip(row) {
            if w != 0.0 {
                out.push((feature.clone(), label.clone(), w));
            }
        }
    }
    out
}

fn from_triples(triples: Vec<Triple>, labels: &[String]) -> Result<WeightMap> {
    let index: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let mut weights = WeightMap::new();
    for (feature, label, w) in triples {
        let &i = index
            .get(label.as_str())
            .ok_or_else(|| Error::Invalid(format!("weight for feature `{feature}` names unknown label `{label}`")))?;
        if !w.is_finite() {
            return Err(Error::Invalid(format!("weight for `{feature}`/`{label}` is not finite")));
        }
        weights.entry(feature).or_insert_with(|| vec![0.0; labels.len()])[i] = w;
    }
    Ok(weights)
}

fn check_version(found: u32, expected: u32, what: &str) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::Invalid(format!("{what} file has version {found}, expected {expected}")))
    }
}

fn check_templates(found: &[String], expected: &[&str], what: &str) -> Result<()> {
    if found.iter().map(String::as_str).eq(expected.iter().copied()) {
        Ok(())
    } else {
        Err(Error::Invalid(format!("{what} file uses templates {found:?}, this build has {expected:?}")))
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::json(origin, e.line(), e))
}

pub fn tagger_to_json(model: &TaggerModel) -> String {
    let file = TaggerFile {
        version: model.version,
        seed: model.seed,
        epochs: model.epochs,
        templates: model.templates.clone(),
        labels: model.labels.clone(),
        train_accuracy: model.train_accuracy,
        lexicon: model.lexicon.clone(),
        weights: to_triples(&model.weights, &model.labels),
    };
    serde_json::to_string(&file).expect("tagger file serializes") + "\n"
}

pub fn tagger_from_json(text: &str, origin: &str) -> Result<TaggerModel> {
    let file: TaggerFile = parse(text, origin)?;
    check_version(file.version, TAGGER_VERSION, "tagger")?;
    check_templates(&file.templates, TEMPLATES, "tagger")?;
    if file.labels.first().map(String::as_str) != Some(relay_core::slotfill::OUTSIDE) {
        return Err(Error::Invalid("tagger label set must start with `O`".into()));
    }
    let weights = from_triples(file.weights, &file.labels)?;
    Ok(TaggerModel {
        version: file.version,
        seed: file.seed,
        epochs: file.epochs,
        templates: file.templates,
        labels: file.labels,
        weights,
        lexicon: file.lexicon,
        train_accuracy: file.train_accuracy,
    })
}

pub fn extractor_to_json(model: &ExtractorModel) -> String {
    let file = match model {
        ExtractorModel::Heuristic { domain } => ExtractorFile::Heuristic { version: MODEL_VERSION, domain: domain.clone() },
        ExtractorModel::Learned(m) => ExtractorFile::Learned {
            version: m.version,
            domain: m.domain.clone(),
            seed: m.seed,
            epochs: m.epochs,
            schema_mask: m.schema_mask,
            templates: PAIR_TEMPLATES.iter().map(|t| t.to_string()).collect(),
            labels: m.labels.clone(),
            weights: to_triples(&m.weights, &m.labels),
        },
    };
    serde_json::to_string(&file).expect("extractor file serializes") + "\n"
}

pub fn extractor_from_json(text: &str, origin: &str) -> Result<ExtractorModel> {
    match parse(text, origin)? {
        ExtractorFile::Heuristic { version, domain } => {
            check_version(version, MODEL_VERSION, "extractor")?;
            Ok(ExtractorModel::Heuristic { domain })
        }
        ExtractorFile::Learned { version, domain, seed, epochs, schema_mask, templates, labels, weights } => {
            check_version(version, MODEL_VERSION, "extractor")?;
            check_templates(&templates, PAIR_TEMPLATES, "extractor")?;
            if labels.last().map(String::as_str) != Some(relay_core::relex::NONE_LABEL) {
                return Err(Error::Invalid("extractor label set must end with `None`".into()));
            }
            let weights = from_triples(weights, &labels)?;
            Ok(ExtractorModel::Learned(PairClassifierModel {
                version,
                domain,
                seed,
                epochs,
                schema_mask,
                labels,
                weights,
            }))
        }
    }
}
