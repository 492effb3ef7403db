use std::fmt;

use thiserror::Error;

use crate::logic::{is_plain_atom, parse_program, parse_query, BodyElement, LogicError, Program, Query};

/// `name: lit1, lit2, ...`: some object must have all the listed properties.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdequacyRule {
    pub name: String,
    pub body: Vec<BodyElement>,
}

/// `name: type => property`: every instance of the type has the property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletenessRule {
    pub name: String,
    pub type_name: String,
    pub property: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SemanticRuleSet {
    pub consistency: Program,
    pub adequacy: Vec<AdequacyRule>,
    pub completeness: Vec<CompletenessRule>,
    pub harmony: Program,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Section {
    Consistency,
    Adequacy,
    Completeness,
    Harmony,
}

impl Section {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "consistency" => Some(Section::Consistency),
            "adequacy" => Some(Section::Adequacy),
            "completeness" => Some(Section::Completeness),
            "harmony" => Some(Section::Harmony),
            _ => None,
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Section::Consistency => "consistency",
            Section::Adequacy => "adequacy",
            Section::Completeness => "completeness",
            Section::Harmony => "harmony",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("rules line {line}: {message}")]
pub struct RuleSetError {
    pub line: usize,
    pub message: String,
}

impl SemanticRuleSet {
    pub fn is_section_empty(&self, s: Section) -> bool {
        match s {
            Section::Consistency => self.consistency.rules.is_empty(),
            Section::Adequacy => self.adequacy.is_empty(),
            Section::Completeness => self.completeness.is_empty(),
            Section::Harmony => self.harmony.rules.is_empty(),
        }
    }
}

/// Reads a rule-set file: `%% consistency`, `%% adequacy`, `%% completeness`
/// and `%% harmony` sections, each optional.
pub fn parse_rule_set(text: &str) -> Result<SemanticRuleSet, RuleSetError> {
    let mut set = SemanticRuleSet::default();
    let mut section: Option<Section> = None;
    // Constraint sections are parsed as one block, keeping line numbers.
    let mut block = String::new();
    let mut block_start = 0;

    let flush = |section: Option<Section>, block: &mut String, start: usize, set: &mut SemanticRuleSet| {
        let target = match section {
            Some(Section::Consistency) => &mut set.consistency,
            Some(Section::Harmony) => &mut set.harmony,
            _ => {
                block.clear();
                return Ok(());
            }
        };
        let p = parse_program(block).map_err(|e| match e {
            LogicError::Syntax { line, message, .. } => RuleSetError { line: start + line, message },
            other => RuleSetError { line: start + 1, message: other.to_string() },
        })?;
        if let Some(r) = p.rules.iter().find(|r| !r.is_constraint()) {
            return Err(RuleSetError {
                line: start + 1,
                message: format!("only constraints allowed in {}: `{r}`", section.expect("section")),
            });
        }
        if !p.queries.is_empty() {
            return Err(RuleSetError { line: start + 1, message: "queries are not allowed in rule sets".into() });
        }
        target.rules.extend(p.rules);
        block.clear();
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if let Some(name) = line.strip_prefix("%%") {
            flush(section, &mut block, block_start, &mut set)?;
            let name = name.trim();
            section = Some(Section::parse(name).ok_or_else(|| RuleSetError {
                line: line_no,
                message: format!("unknown section `{name}`"),
            })?);
            block_start = line_no;
            continue;
        }
        match section {
            Some(Section::Consistency | Section::Harmony) => {
                block.push_str(raw);
                block.push('\n');
            }
            _ if line.is_empty() || line.starts_with('%') => {}
            None => {
                return Err(RuleSetError { line: line_no, message: "content before the first section".into() })
            }
            Some(Section::Adequacy) => set.adequacy.push(adequacy_line(line, line_no)?),
            Some(Section::Completeness) => set.completeness.push(completeness_line(line, line_no)?),
        }
    }
    flush(section, &mut block, block_start, &mut set)?;
    Ok(set)
}

fn split_named(line: &str, line_no: usize) -> Result<(&str, &str), RuleSetError> {
    let (name, rest) = line.split_once(':').ok_or_else(|| RuleSetError {
        line: line_no,
        message: "expected `name: ...`".into(),
    })?;
    let name = name.trim();
    if !is_plain_atom(name) {
        return Err(RuleSetError { line: line_no, message: format!("rule name `{name}` is not an atom") });
    }
    Ok((name, rest.trim().trim_end_matches('.').trim()))
}

fn adequacy_line(line: &str, line_no: usize) -> Result<AdequacyRule, RuleSetError> {
    let (name, body) = split_named(line, line_no)?;
    let q: Query = parse_query(body).map_err(|e| RuleSetError { line: line_no, message: e.to_string() })?;
    Ok(AdequacyRule { name: name.to_string(), body: q.body })
}

fn completeness_line(line: &str, line_no: usize) -> Result<CompletenessRule, RuleSetError> {
    let (name, rest) = split_named(line, line_no)?;
    let (ty, prop) = rest.split_once("=>").ok_or_else(|| RuleSetError {
        line: line_no,
        message: "expected `name: type => property`".into(),
    })?;
    let (ty, prop) = (ty.trim(), prop.trim());
    for s in [ty, prop] {
        if !is_plain_atom(s) {
            return Err(RuleSetError { line: line_no, message: format!("`{s}` is not an atom") });
        }
    }
    Ok(CompletenessRule { name: name.to_string(), type_name: ty.to_string(), property: prop.to_string() })
}
