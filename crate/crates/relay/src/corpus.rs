//! JSON Lines corpus files: one utterance record per line.

use std::path::Path;

use relay_core::annotation::UtteranceRecord;
use relay_core::schema::DomainSchema;
use relay_core::AnnotatedUtterance;

use crate::{read_file, write_file, Error, Result};

/// Parses corpus text. Blank lines are skipped; `origin` names the source in
/// error messages.
pub fn parse_corpus(text: &str, origin: &str) -> Result<Vec<AnnotatedUtterance>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: UtteranceRecord = serde_json::from_str(line).map_err(|e| Error::json(origin, n + 1, e))?;
        out.push(AnnotatedUtterance::from_record(record)?);
    }
    Ok(out)
}

pub fn read_corpus(path: &Path) -> Result<Vec<AnnotatedUtterance>> {
    parse_corpus(&read_file(path)?, &path.display().to_string())
}

/// Canonical corpus text: one compact record per line, relations in pair
/// order, trailing newline.
pub fn corpus_to_jsonl(corpus: &[AnnotatedUtterance]) -> String {
    let mut out = String::new();
    for u in corpus {
        out.push_str(&serde_json::to_string(&u.to_record()).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn write_corpus(path: &Path, corpus: &[AnnotatedUtterance]) -> Result<()> {
    write_file(path, &corpus_to_jsonl(corpus))
}

/// Fails on the first utterance whose domain differs from the schema's or
/// that breaks a schema rule.
pub fn check_corpus(corpus: &[AnnotatedUtterance], schema: &DomainSchema) -> Result<()> {
    for u in corpus {
        if u.domain != schema.domain() {
            return Err(Error::Invalid(format!(
                "utterance {} belongs to domain `{}`, schema is `{}`",
                u.id,
                u.domain,
                schema.domain()
            )));
        }
        if let Some(v) = u.validate(schema).into_iter().next() {
            return Err(Error::Invalid(format!("utterance {}: {v}", u.id)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use relay_core::fixtures;

    #[test]
    fn round_trips_fixtures() {
        let corpus = vec![fixtures::food_burgers(), fixtures::food_burrito_bowl(), fixtures::gaming_shared()];
        let text = corpus_to_jsonl(&corpus);
        assert_eq!(parse_corpus(&text, "mem").unwrap(), corpus);
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn reports_line_numbers() {
        let good = corpus_to_jsonl(&[fixtures::gaming_shared()]);
        let err = parse_corpus(&format!("{good}\n{{\"id\": 3}}\n"), "c.jsonl").unwrap_err();
        assert!(err.to_string().starts_with("c.jsonl:3:"), "{err}");
    }

    #[test]
    fn rejects_bad_spans() {
        let line = r#"{"id":"x","domain":"gaming","text":"fire swords","intent":null,"slots":[{"label":"item","start":1,"end":5}],"relations":[]}"#;
        assert!(matches!(parse_corpus(line, "m"), Err(Error::Annotation(_))));
    }
}
