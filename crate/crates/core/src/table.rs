//! Attribute-value decision tables: construction, completion, stratified
//! splitting and CSV I/O.
//!
//! Objects are identified by their row index. Condition attribute values are
//! real numbers; a missing cell is `None`. Class labels are integers starting
//! at 1.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A universe of objects described by real-valued condition attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct InformationSystem {
    attributes: Vec<String>,
    values: Vec<Vec<Option<f64>>>,
}

impl InformationSystem {
    pub fn new(attributes: Vec<String>, values: Vec<Vec<Option<f64>>>) -> Result<Self> {
        if attributes.is_empty() {
            return Err(Error::MalformedTable("no attributes".into()));
        }
        if values.is_empty() {
            return Err(Error::EmptyTable("no objects".into()));
        }
        for (i, row) in values.iter().enumerate() {
            if row.len() != attributes.len() {
                return Err(Error::MalformedTable(format!(
                    "object {i} has {} cells, expected {}",
                    row.len(),
                    attributes.len()
                )));
            }
        }
        Ok(Self { attributes, values })
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn object_count(&self) -> usize {
        self.values.len()
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    pub fn rows(&self) -> &[Vec<Option<f64>>] {
        &self.values
    }

    pub fn value(&self, object: usize, attribute: usize) -> Option<f64> {
        self.values[object][attribute]
    }

    pub fn has_missing(&self) -> bool {
        self.values.iter().flatten().any(Option::is_none)
    }
}

/// An information system plus a class label per object.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTable {
    system: InformationSystem,
    decisions: Vec<usize>,
}

impl DecisionTable {
    pub fn new(system: InformationSystem, decisions: Vec<usize>) -> Result<Self> {
        if decisions.len() != system.object_count() {
            return Err(Error::MalformedTable(format!(
                "{} decisions for {} objects",
                decisions.len(),
                system.object_count()
            )));
        }
        if let Some(pos) = decisions.iter().position(|&d| d == 0) {
            return Err(Error::MalformedTable(format!(
                "object {pos} has class 0; labels start at 1"
            )));
        }
        if system.attributes().iter().any(|a| a == "class") {
            return Err(Error::MalformedTable(
                "decision attribute `class` cannot also be a condition attribute".into(),
            ));
        }
        Ok(Self { system, decisions })
    }

    /// Build a complete table from dense rows.
    pub fn from_rows(attributes: Vec<String>, rows: Vec<Vec<f64>>, decisions: Vec<usize>) -> Result<Self> {
        let values = rows
            .into_iter()
            .map(|r| r.into_iter().map(Some).collect())
            .collect();
        Self::new(InformationSystem::new(attributes, values)?, decisions)
    }

    pub fn system(&self) -> &InformationSystem {
        &self.system
    }

    pub fn attributes(&self) -> &[String] {
        self.system.attributes()
    }

    pub fn object_count(&self) -> usize {
        self.system.object_count()
    }

    pub fn attribute_count(&self) -> usize {
        self.system.attribute_count()
    }

    pub fn decisions(&self) -> &[usize] {
        &self.decisions
    }

    pub fn decision(&self, object: usize) -> usize {
        self.decisions[object]
    }

    /// Largest class label present.
    pub fn class_count(&self) -> usize {
        self.decisions.iter().copied().max().unwrap_or(0)
    }

    pub fn value(&self, object: usize, attribute: usize) -> Option<f64> {
        self.system.value(object, attribute)
    }

    /// Dense rows. Panics if the table still has missing cells.
    pub fn dense_rows(&self) -> Vec<Vec<f64>> {
        self.system
            .rows()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| v.expect("dense_rows called on an incomplete table"))
                    .collect()
            })
            .collect()
    }

    /// Dense values of one attribute. Panics if any cell is missing.
    pub fn column(&self, attribute: usize) -> Vec<f64> {
        (0..self.object_count())
            .map(|o| {
                self.value(o, attribute)
                    .expect("column called on an incomplete table")
            })
            .collect()
    }

    /// Object indices grouped by class label, in ascending label order.
    pub fn objects_by_class(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &d) in self.decisions.iter().enumerate() {
            map.entry(d).or_default().push(i);
        }
        map
    }

    /// A new table holding the given objects in the given order.
    pub fn select(&self, objects: &[usize]) -> Result<Self> {
        let values = objects
            .iter()
            .map(|&o| self.system.values[o].clone())
            .collect();
        let decisions = objects.iter().map(|&o| self.decisions[o]).collect();
        Self::new(
            InformationSystem::new(self.system.attributes.clone(), values)?,
            decisions,
        )
    }

    /// Replace every condition value, keeping attributes and decisions.
    pub fn with_values(&self, values: Vec<Vec<Option<f64>>>) -> Result<Self> {
        Self::new(
            InformationSystem::new(self.system.attributes.clone(), values)?,
            self.decisions.clone(),
        )
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let n = headers.len();
        if n < 2 || &headers[n - 1] != "class" {
            return Err(Error::MalformedTable(
                "header must list condition attributes followed by `class`".into(),
            ));
        }
        let attributes: Vec<String> = headers.iter().take(n - 1).map(str::to_owned).collect();
        let mut values = Vec::new();
        let mut decisions = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let mut row = Vec::with_capacity(n - 1);
            for cell in record.iter().take(n - 1) {
                let cell = cell.trim();
                if cell.is_empty() {
                    row.push(None);
                } else {
                    let v: f64 = cell.parse().map_err(|_| {
                        Error::Parse(format!("row {}: `{cell}` is not a number", line + 1))
                    })?;
                    row.push(Some(v));
                }
            }
            let class = record[n - 1].trim();
            let class: usize = class.parse().map_err(|_| {
                Error::Parse(format!("row {}: class `{class}` is not an integer >= 1", line + 1))
            })?;
            values.push(row);
            decisions.push(class);
        }
        Self::new(InformationSystem::new(attributes, values)?, decisions)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.attributes().iter().map(String::as_str).collect();
        header.push("class");
        wtr.write_record(&header)?;
        for (row, d) in self.system.rows().iter().zip(&self.decisions) {
            let mut rec: Vec<String> = row
                .iter()
                .map(|v| v.map(|x| x.to_string()).unwrap_or_default())
                .collect();
            rec.push(d.to_string());
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

/// How missing cells are handled before analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompletionPolicy {
    /// Remove every object with at least one missing cell.
    #[default]
    Drop,
    /// Replace a missing cell by the mean of the attribute's present cells.
    Mean,
}

impl std::str::FromStr for CompletionPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop" => Ok(Self::Drop),
            "mean" => Ok(Self::Mean),
            other => Err(Error::Parameter(format!("unknown completion policy `{other}`"))),
        }
    }
}

pub fn complete_table(table: &DecisionTable, policy: CompletionPolicy) -> Result<DecisionTable> {
    if !table.system().has_missing() {
        return Ok(table.clone());
    }
    match policy {
        CompletionPolicy::Drop => {
            let keep: Vec<usize> = (0..table.object_count())
                .filter(|&o| table.system().rows()[o].iter().all(Option::is_some))
                .collect();
            if keep.is_empty() {
                return Err(Error::EmptyTable(
                    "every object has a missing value".into(),
                ));
            }
            table.select(&keep)
        }
        CompletionPolicy::Mean => {
            let m = table.attribute_count();
            let mut means = Vec::with_capacity(m);
            for a in 0..m {
                let present: Vec<f64> = (0..table.object_count())
                    .filter_map(|o| table.value(o, a))
                    .collect();
                if present.is_empty() {
                    return Err(Error::EmptyTable(format!(
                        "attribute `{}` has no present values",
                        table.attributes()[a]
                    )));
                }
                means.push(present.iter().sum::<f64>() / present.len() as f64);
            }
            let values = table
                .system()
                .rows()
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&means)
                        .map(|(v, &mean)| Some(v.unwrap_or(mean)))
                        .collect()
                })
                .collect();
            table.with_values(values)
        }
    }
}

/// Result of a stratified split; indices refer to the source table.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: DecisionTable,
    pub test: DecisionTable,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

/// Stratified random split. Each class contributes `round(fraction * n_k)`
/// objects to the training part and keeps at least one for testing.
pub fn split(table: &DecisionTable, fraction: f64, seed: u64) -> Result<Split> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Parameter(format!(
            "split fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for (class, mut members) in table.objects_by_class() {
        let wanted = (fraction * members.len() as f64).round() as usize;
        if wanted == 0 || members.len() < 2 {
            return Err(Error::Stratification {
                class,
                available: members.len(),
                wanted,
            });
        }
        let take = wanted.min(members.len() - 1);
        members.shuffle(&mut rng);
        train_idx.extend_from_slice(&members[..take]);
        test_idx.extend_from_slice(&members[take..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok(Split {
        train: table.select(&train_idx)?,
        test: table.select(&test_idx)?,
        train_indices: train_idx,
        test_indices: test_idx,
    })
}
