//! Binary datasets: schema, instances, CSV and rule-file I/O, and the
//! rule-driven synthetic generator.
//!
//! CSV layout: a header row with the attribute names followed by the literal
//! column `class`, and optionally `origin`. Cells are `t`/`f`, class cells are
//! `p`/`n`, origin cells are `original`/`synthetic`. Whitespace around cells
//! is ignored.
//!
//! Rule files hold one rule per line, `(t,_,f):p`, blank lines ignored.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rng::SplitMix64;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Class {
    #[serde(rename = "p")]
    P,
    #[serde(rename = "n")]
    N,
}

impl Class {
    pub fn opposite(self) -> Class {
        match self {
            Class::P => Class::N,
            Class::N => Class::P,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Class::P => "p",
            Class::N => "n",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Class> {
        match s {
            "p" => Some(Class::P),
            "n" => Some(Class::N),
            _ => None,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Origin {
    #[default]
    Original,
    Synthetic,
}

impl Origin {
    fn symbol(self) -> &'static str {
        match self {
            Origin::Original => "original",
            Origin::Synthetic => "synthetic",
        }
    }
}

/// Ordered attribute names; the position of a name is its attribute index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AttributeSchema {
    names: Vec<String>,
}

impl AttributeSchema {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::Schema("schema needs at least one attribute".into()));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if name.is_empty() {
                return Err(Error::Schema("empty attribute name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::Schema(format!("duplicate attribute `{name}`")));
            }
        }
        Ok(Self { names })
    }

    /// `A1`, `A2`, ... `A{arity}`.
    pub fn numbered(arity: usize) -> Result<Self> {
        Self::new((1..=arity).map(|i| format!("A{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    pub values: Vec<bool>,
    pub label: Class,
    pub origin: Origin,
}

impl Instance {
    pub fn new(values: Vec<bool>, label: Class) -> Self {
        Self {
            values,
            label,
            origin: Origin::Original,
        }
    }

    pub fn synthetic(values: Vec<bool>, label: Class) -> Self {
        Self {
            values,
            label,
            origin: Origin::Synthetic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    schema: AttributeSchema,
    instances: Vec<Instance>,
}

impl Dataset {
    pub fn new(schema: AttributeSchema, instances: Vec<Instance>) -> Result<Self> {
        if let Some(bad) = instances.iter().find(|i| i.values.len() != schema.len()) {
            return Err(Error::Arity {
                expected: schema.len(),
                found: bad.values.len(),
            });
        }
        Ok(Self { schema, instances })
    }

    pub fn empty(schema: AttributeSchema) -> Self {
        Self {
            schema,
            instances: Vec::new(),
        }
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn count_origin(&self, origin: Origin) -> usize {
        self.instances.iter().filter(|i| i.origin == origin).count()
    }

    pub(crate) fn instances_mut(&mut self) -> &mut [Instance] {
        &mut self.instances
    }

    pub fn push(&mut self, inst: Instance) -> Result<()> {
        if inst.values.len() != self.schema.len() {
            return Err(Error::Arity {
                expected: self.schema.len(),
                found: inst.values.len(),
            });
        }
        self.instances.push(inst);
        Ok(())
    }
}

/// A generator rule: one slot per attribute, `None` is a wildcard.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleSpec {
    pub pattern: Vec<Option<bool>>,
    pub label: Class,
}

impl RuleSpec {
    pub fn new(pattern: Vec<Option<bool>>, label: Class) -> Result<Self> {
        if !pattern.is_empty() && pattern.iter().all(Option::is_none) {
            return Err(Error::parse(None, None, "rule has no fixed position"));
        }
        Ok(Self { pattern, label })
    }

    pub fn arity(&self) -> usize {
        self.pattern.len()
    }

    /// Number of non-wildcard positions.
    pub fn len(&self) -> usize {
        self.pattern.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn matches(&self, inst: &Instance) -> Result<bool> {
        if inst.values.len() != self.pattern.len() {
            return Err(Error::Arity {
                expected: self.pattern.len(),
                found: inst.values.len(),
            });
        }
        Ok(self
            .pattern
            .iter()
            .zip(&inst.values)
            .all(|(slot, value)| slot.is_none_or(|want| want == *value)))
    }
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<&str> = self
            .pattern
            .iter()
            .map(|v| match v {
                Some(true) => "t",
                Some(false) => "f",
                None => "_",
            })
            .collect();
        write!(f, "({}):{}", cells.join(","), self.label)
    }
}

pub fn matches(rule: &RuleSpec, inst: &Instance) -> Result<bool> {
    rule.matches(inst)
}

fn parse_bool_cell(cell: &str) -> Option<bool> {
    match cell {
        "t" => Some(true),
        "f" => Some(false),
        _ => None,
    }
}

pub fn parse_csv(text: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(Error::parse(Some(0), None, e.to_string())),
        None => return Err(Error::parse(Some(0), None, "missing header row")),
    };
    let cells: Vec<&str> = header.iter().collect();
    let (names, has_origin) = match cells.as_slice() {
        [names @ .., "class", "origin"] => (names, true),
        [names @ .., "class"] => (names, false),
        _ => {
            return Err(Error::parse(
                Some(0),
                None,
                "header must end with `class` (optionally followed by `origin`)",
            ))
        }
    };
    let schema = AttributeSchema::new(names.iter().copied()).map_err(|e| Error::parse(Some(0), None, e.to_string()))?;
    let arity = schema.len();
    let width = arity + 1 + usize::from(has_origin);

    let mut instances = Vec::new();
    for (row_idx, record) in records.enumerate() {
        let row = row_idx + 1;
        let record = record.map_err(|e| Error::parse(Some(row), None, e.to_string()))?;
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != width {
            return Err(Error::parse(
                Some(row),
                None,
                format!("expected {width} cells, found {}", record.len()),
            ));
        }
        let mut values = Vec::with_capacity(arity);
        for (col, cell) in record.iter().take(arity).enumerate() {
            let v = parse_bool_cell(cell)
                .ok_or_else(|| Error::parse(Some(row), Some(col + 1), format!("expected t or f, found `{cell}`")))?;
            values.push(v);
        }
        let class_cell = &record[arity];
        let label = Class::from_symbol(class_cell).ok_or_else(|| {
            Error::parse(
                Some(row),
                Some(arity + 1),
                format!("expected p or n, found `{class_cell}`"),
            )
        })?;
        let origin = if has_origin {
            match &record[arity + 1] {
                "original" => Origin::Original,
                "synthetic" => Origin::Synthetic,
                other => {
                    return Err(Error::parse(
                        Some(row),
                        Some(arity + 2),
                        format!("expected original or synthetic, found `{other}`"),
                    ))
                }
            }
        } else {
            Origin::Original
        };
        instances.push(Instance { values, label, origin });
    }
    Dataset::new(schema, instances)
}

pub fn write_csv(ds: &Dataset) -> String {
    let with_origin = ds.instances.iter().any(|i| i.origin == Origin::Synthetic);
    let mut out = String::new();
    let mut header: Vec<&str> = ds.schema.names().iter().map(String::as_str).collect();
    header.push("class");
    if with_origin {
        header.push("origin");
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for inst in &ds.instances {
        for v in &inst.values {
            out.push_str(if *v { "t," } else { "f," });
        }
        out.push_str(inst.label.symbol());
        if with_origin {
            out.push(',');
            out.push_str(inst.origin.symbol());
        }
        out.push('\n');
    }
    out
}

/// One `(t,_,f):p` rule per line; blank lines and `#` comments are skipped.
pub fn parse_rules(text: &str) -> Result<Vec<RuleSpec>> {
    let mut rules: Vec<RuleSpec> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::parse(Some(line_no), None, msg);
        let (body, class) = line
            .rsplit_once(':')
            .ok_or_else(|| err("expected `(...):class`".into()))?;
        let label =
            Class::from_symbol(class.trim()).ok_or_else(|| err(format!("unknown class token `{}`", class.trim())))?;
        let inner = body
            .trim()
            .strip_prefix('(')
            .and_then(|b| b.strip_suffix(')'))
            .ok_or_else(|| err("pattern must be parenthesised".into()))?;
        let pattern = inner
            .split(',')
            .map(|cell| match cell.trim() {
                "t" => Ok(Some(true)),
                "f" => Ok(Some(false)),
                "_" => Ok(None),
                other => Err(err(format!("unknown pattern token `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rules.first() {
            if first.arity() != pattern.len() {
                return Err(err(format!(
                    "rule has {} positions, earlier rules have {}",
                    pattern.len(),
                    first.arity()
                )));
            }
        }
        let rule = RuleSpec::new(pattern, label).map_err(|e| err(e.to_string()))?;
        rules.push(rule);
    }
    Ok(rules)
}

/// Builds `count` instances spread over `rules`: every rule gets
/// `count / rules.len()` instances and the first `count % rules.len()` rules
/// get one more. Wildcards are filled from a [`SplitMix64`] stream seeded with
/// `seed`, rule by rule, attribute by attribute. The generating rule's label
/// wins when rules overlap.
pub fn generate(rules: &[RuleSpec], count: usize, seed: u64) -> Result<Dataset> {
    let first = rules.first().ok_or(Error::NoRules)?;
    let arity = first.arity();
    if let Some(bad) = rules.iter().find(|r| r.arity() != arity) {
        return Err(Error::Arity {
            expected: arity,
            found: bad.arity(),
        });
    }
    let schema = AttributeSchema::numbered(arity)?;
    let base = count / rules.len();
    let extra = count % rules.len();
    let mut rng = SplitMix64::new(seed);
    let mut instances = Vec::with_capacity(count);
    for (idx, rule) in rules.iter().enumerate() {
        let share = base + usize::from(idx < extra);
        for _ in 0..share {
            let values = rule
                .pattern
                .iter()
                .map(|slot| slot.unwrap_or_else(|| rng.next_bool()))
                .collect();
            instances.push(Instance::new(values, rule.label));
        }
    }
    Dataset::new(schema, instances)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(values: &[bool]) -> Instance {
        Instance::new(values.to_vec(), Class::P)
    }

    #[test]
    fn minimal_csv() {
        let ds = parse_csv("a1,class\nt,p\n").unwrap();
        assert_eq!(ds.schema().names(), ["a1"]);
        assert_eq!(ds.instances(), [Instance::new(vec![true], Class::P)]);
    }

    #[test]
    fn header_only_csv_is_empty_dataset() {
        let ds = parse_csv("a1,a2,class\n").unwrap();
        assert!(ds.is_empty());
        assert_eq!(write_csv(&ds), "a1,a2,class\n");
    }

    #[test]
    fn bad_cell_reports_row_and_column() {
        let err = parse_csv("a1,a2,class\nt,x,p\n").unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                line: Some(1),
                column: Some(2),
                ..
            }
        ));
    }

    #[test]
    fn csv_errors() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("a1,label\n").is_err());
        assert!(parse_csv("class\n").is_err());
        assert!(parse_csv("a,a,class\n").is_err());
        let arity = parse_csv("a1,a2,class\nt,p\n").unwrap_err();
        assert!(matches!(arity, Error::Parse { line: Some(1), .. }));
        let class = parse_csv("a1,class\nt,q\n").unwrap_err();
        assert!(matches!(
            class,
            Error::Parse {
                line: Some(1),
                column: Some(2),
                ..
            }
        ));
    }

    #[test]
    fn whitespace_is_trimmed() {
        let ds = parse_csv(" a1 , class \n t , n \n").unwrap();
        assert_eq!(ds.instances()[0], Instance::new(vec![true], Class::N));
    }

    #[test]
    fn write_one_instance() {
        let schema = AttributeSchema::new(["x", "y"]).unwrap();
        let ds = Dataset::new(schema, vec![Instance::new(vec![true, false], Class::N)]).unwrap();
        assert_eq!(write_csv(&ds), "x,y,class\nt,f,n\n");
    }

    #[test]
    fn synthetic_rows_add_origin_column() {
        let schema = AttributeSchema::new(["x"]).unwrap();
        let ds = Dataset::new(
            schema,
            vec![
                Instance::new(vec![true], Class::N),
                Instance::synthetic(vec![false], Class::P),
            ],
        )
        .unwrap();
        let text = write_csv(&ds);
        assert_eq!(text, "x,class,origin\nt,n,original\nf,p,synthetic\n");
        assert_eq!(parse_csv(&text).unwrap(), ds);
    }

    #[test]
    fn parse_table_rules() {
        let rules = parse_rules("(t,t,t,t,t):p\n\n(f,f,t,_,_):n\n").unwrap();
        assert_eq!(rules.len(), 2);
        assert_eq!(rules[0].pattern, vec![Some(true); 5]);
        assert_eq!(rules[0].label, Class::P);
        assert_eq!(rules[1].pattern, vec![Some(false), Some(false), Some(true), None, None]);
        assert_eq!(rules[1].label, Class::N);
        assert_eq!(rules[1].to_string(), "(f,f,t,_,_):n");
    }

    #[test]
    fn rule_errors_carry_line_numbers() {
        assert!(matches!(
            parse_rules("(t,_):q").unwrap_err(),
            Error::Parse { line: Some(1), .. }
        ));
        assert!(matches!(
            parse_rules("(t,_):p\n(t,t,t):n").unwrap_err(),
            Error::Parse { line: Some(2), .. }
        ));
        assert!(parse_rules("(t,x):p").is_err());
        assert!(parse_rules("t,t:p").is_err());
        assert!(parse_rules("(_,_):p").is_err());
    }

    #[test]
    fn matching() {
        let rule = parse_rules("(t,_,_,f,_):p").unwrap().remove(0);
        assert!(rule.matches(&inst(&[true, true, true, false, false])).unwrap());
        assert!(!rule.matches(&inst(&[true, true, true, true, false])).unwrap());
        let wild = RuleSpec {
            pattern: vec![None; 5],
            label: Class::P,
        };
        assert!(wild.matches(&inst(&[false; 5])).unwrap());
        assert!(rule.matches(&inst(&[true])).is_err());
    }

    #[test]
    fn generate_single_rule() {
        let rules = parse_rules("(t,_,f):n").unwrap();
        let ds = generate(&rules, 5, 3).unwrap();
        assert_eq!(ds.len(), 5);
        assert!(ds.instances().iter().all(|i| rules[0].matches(i).unwrap()));
        assert!(ds.instances().iter().all(|i| i.label == Class::N));
    }

    #[test]
    fn generate_is_deterministic() {
        let rules = parse_rules("(t,_,_):p\n(f,_,_):n").unwrap();
        assert_eq!(generate(&rules, 50, 9).unwrap(), generate(&rules, 50, 9).unwrap());
        assert_ne!(generate(&rules, 50, 9).unwrap(), generate(&rules, 50, 10).unwrap());
    }

    #[test]
    fn generate_fewer_instances_than_rules() {
        let rules = parse_rules("(t,_):p\n(f,t):n\n(f,f):n").unwrap();
        let ds = generate(&rules, 2, 0).unwrap();
        assert_eq!(ds.len(), 2);
        assert!(generate(&[], 2, 0).is_err());
    }
}
