//! CSV ingestion and export.
//!
//! The temporal file is long-format EAV with the exact header
//! `id,time,variable,value`; the static file is wide with an `id` column
//! followed by one column per feature. Either file may be gzip-compressed,
//! detected by a `.gz` suffix. Missing static cells are empty strings.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use ndarray::{Array2, Array3};

use crate::data::{CategoryTable, Dataset, Fold, StaticMatrix, TemporalTensor, MISSING};
use crate::error::{Error, Result};

/// One temporal observation: (instance id, timestamp, variable, value).
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalRecord {
    pub id: String,
    pub time: f64,
    pub variable: String,
    pub value: f64,
}

/// Raw wide static table: instance ids in row order, feature names, and the
/// unparsed cell text (`None` = empty cell).
#[derive(Debug, Clone, Default)]
pub struct StaticTable {
    pub ids: Vec<String>,
    pub names: Vec<String>,
    pub cells: Vec<Vec<Option<String>>>,
}

fn open_maybe_gz(path: &Path) -> Result<Box<dyn Read>> {
    let file = File::open(path)
        .map_err(|e| Error::Load(format!("cannot open {}: {e}", path.display())))?;
    if path.extension().is_some_and(|ext| ext == "gz") {
        Ok(Box::new(GzDecoder::new(BufReader::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

fn create_maybe_gz(path: &Path) -> Result<Box<dyn Write>> {
    let file = File::create(path)
        .map_err(|e| Error::Load(format!("cannot create {}: {e}", path.display())))?;
    if path.extension().is_some_and(|ext| ext == "gz") {
        Ok(Box::new(GzEncoder::new(BufWriter::new(file), flate2::Compression::default())))
    } else {
        Ok(Box::new(BufWriter::new(file)))
    }
}

fn read_static_table(path: &Path) -> Result<StaticTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(open_maybe_gz(path)?);
    let headers = reader
        .headers()
        .map_err(|e| Error::Load(format!("{}: {e}", path.display())))?
        .clone();
    if headers.is_empty() || headers.get(0) != Some("id") {
        return Err(Error::Load(format!(
            "{}: static header must start with 'id'",
            path.display()
        )));
    }
    let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();

    let mut table = StaticTable { ids: Vec::new(), names, cells: Vec::new() };
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2; // 1-based, after the header
        let record = record.map_err(|e| Error::Load(format!("{} line {line}: {e}", path.display())))?;
        if record.len() != table.names.len() + 1 {
            return Err(Error::Load(format!(
                "{} line {line}: expected {} columns, found {}",
                path.display(),
                table.names.len() + 1,
                record.len()
            )));
        }
        table.ids.push(record[0].to_string());
        table.cells.push(
            record
                .iter()
                .skip(1)
                .map(|c| if c.is_empty() { None } else { Some(c.to_string()) })
                .collect(),
        );
    }
    Ok(table)
}

fn read_temporal_records(path: &Path) -> Result<Vec<TemporalRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(open_maybe_gz(path)?);
    let headers = reader
        .headers()
        .map_err(|e| Error::Load(format!("{}: {e}", path.display())))?
        .clone();
    let expected = ["id", "time", "variable", "value"];
    let found: Vec<&str> = headers.iter().collect();
    if found != expected {
        return Err(Error::Load(format!(
            "{}: temporal header must be exactly 'id,time,variable,value', found '{}'",
            path.display(),
            found.join(",")
        )));
    }

    let mut records = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2;
        let record = record.map_err(|e| Error::Load(format!("{} line {line}: {e}", path.display())))?;
        if record.len() != 4 {
            return Err(Error::Load(format!(
                "{} line {line}: expected 4 columns, found {}",
                path.display(),
                record.len()
            )));
        }
        let time: f64 = record[1].parse().map_err(|_| {
            Error::Load(format!("{} line {line}: unparsable time '{}'", path.display(), &record[1]))
        })?;
        let value: f64 = record[3].parse().map_err(|_| {
            Error::Load(format!("{} line {line}: unparsable value '{}'", path.display(), &record[3]))
        })?;
        records.push(TemporalRecord {
            id: record[0].to_string(),
            time,
            variable: record[2].to_string(),
            value,
        });
    }
    Ok(records)
}

/// Load a dataset from a wide static CSV and a long EAV temporal CSV.
///
/// One instance per distinct id, in static-file row order; the temporal grid
/// per instance is its sorted distinct timestamps; temporal feature order is
/// the first-appearance order of `variable`. Unmeasured cells get the missing
/// sentinel and mask 0.
pub fn load_csv(static_path: impl AsRef<Path>, temporal_path: impl AsRef<Path>) -> Result<Dataset> {
    let static_table = read_static_table(static_path.as_ref())?;
    let records = read_temporal_records(temporal_path.as_ref())?;
    Dataset::from_records(static_table, &records)
}

impl Dataset {
    /// Build a dataset from raw tables. Shared by the CSV loader and the
    /// synthetic generators so both take the same construction path.
    pub fn from_records(static_table: StaticTable, records: &[TemporalRecord]) -> Result<Dataset> {
        let n = static_table.ids.len();
        let mut id_index: HashMap<&str, usize> = HashMap::with_capacity(n);
        for (i, id) in static_table.ids.iter().enumerate() {
            if id_index.insert(id.as_str(), i).is_some() {
                return Err(Error::Load(format!("duplicate static id '{id}'")));
            }
        }

        // Temporal feature order = first appearance of `variable`.
        let mut var_index: HashMap<&str, usize> = HashMap::new();
        let mut temporal_names: Vec<String> = Vec::new();
        for rec in records {
            if !var_index.contains_key(rec.variable.as_str()) {
                var_index.insert(rec.variable.as_str(), temporal_names.len());
                temporal_names.push(rec.variable.clone());
            }
        }

        // Per-instance grid = sorted distinct timestamps.
        let mut instance_times: Vec<Vec<f64>> = vec![Vec::new(); n];
        for rec in records {
            let &i = id_index
                .get(rec.id.as_str())
                .ok_or_else(|| Error::Load(format!("temporal id '{}' not in static file", rec.id)))?;
            if !rec.time.is_finite() {
                return Err(Error::Load(format!(
                    "non-finite timestamp {} for id '{}'",
                    rec.time, rec.id
                )));
            }
            instance_times[i].push(rec.time);
        }
        for times in &mut instance_times {
            times.sort_by(|a, b| a.partial_cmp(b).unwrap());
            times.dedup();
        }
        let t_max = instance_times.iter().map(Vec::len).max().unwrap_or(0);
        let d_t = temporal_names.len();

        let mut values = Array3::from_elem((n, t_max, d_t), MISSING);
        let mut observed = Array3::zeros((n, t_max, d_t));
        let mut time = Array2::from_elem((n, t_max), MISSING);
        let mut seq_len = vec![0usize; n];
        for (i, times) in instance_times.iter().enumerate() {
            seq_len[i] = times.len();
            for (t, &stamp) in times.iter().enumerate() {
                time[[i, t]] = stamp;
            }
        }

        for rec in records {
            let i = id_index[rec.id.as_str()];
            let d = var_index[rec.variable.as_str()];
            let t = instance_times[i]
                .binary_search_by(|probe| probe.partial_cmp(&rec.time).unwrap())
                .expect("timestamp present by construction");
            if observed[[i, t, d]] == 1 {
                return Err(Error::Load(format!(
                    "duplicate temporal observation (id '{}', time {}, variable '{}')",
                    rec.id, rec.time, rec.variable
                )));
            }
            values[[i, t, d]] = rec.value;
            observed[[i, t, d]] = 1;
        }

        // Static columns: numeric parse first; any non-numeric entry makes the
        // whole column categorical, with codes in first-appearance order.
        let d_s = static_table.names.len();
        let mut s_values = Array2::from_elem((n, d_s), MISSING);
        let mut s_observed = Array2::zeros((n, d_s));
        let mut static_categories: Vec<Option<CategoryTable>> = vec![None; d_s];
        for d in 0..d_s {
            let numeric = static_table
                .cells
                .iter()
                .all(|row| row[d].as_deref().is_none_or(|c| c.parse::<f64>().is_ok()));
            if numeric {
                for (i, row) in static_table.cells.iter().enumerate() {
                    if let Some(cell) = &row[d] {
                        s_values[[i, d]] = cell.parse::<f64>().unwrap();
                        s_observed[[i, d]] = 1;
                    }
                }
            } else {
                let mut table: CategoryTable = Vec::new();
                for (i, row) in static_table.cells.iter().enumerate() {
                    if let Some(cell) = &row[d] {
                        let code = match table.iter().position(|c| c == cell) {
                            Some(code) => code,
                            None => {
                                table.push(cell.clone());
                                table.len() - 1
                            }
                        };
                        s_values[[i, d]] = code as f64;
                        s_observed[[i, d]] = 1;
                    }
                }
                static_categories[d] = Some(table);
            }
        }

        let dataset = Dataset {
            static_data: StaticMatrix { values: s_values, observed: s_observed },
            temporal: TemporalTensor { values, observed, time, seq_len },
            labels: None,
            actions: None,
            static_names: static_table.names,
            temporal_names,
            label_names: Vec::new(),
            static_categories,
            fold: vec![Fold::Unassigned; n],
            spec: None,
        };
        dataset.validate()?;
        Ok(dataset)
    }

    /// Export instance ids used by the CSV writers: `inst0`, `inst1`, ...
    fn export_ids(&self) -> Vec<String> {
        (0..self.n_instances()).map(|i| format!("inst{i}")).collect()
    }
}

fn format_value(v: f64) -> String {
    // `{}` on f64 is shortest round-trip, so reload reproduces values exactly.
    format!("{v}")
}

/// Write a dataset back to a wide static CSV and an EAV temporal CSV.
///
/// Only observed cells are written. Temporal rows are grouped by variable in
/// name order so the reloaded first-appearance order matches `temporal_names`
/// (a feature with no observed cells anywhere cannot round-trip).
pub fn write_csv(
    dataset: &Dataset,
    static_path: impl AsRef<Path>,
    temporal_path: impl AsRef<Path>,
) -> Result<()> {
    let ids = dataset.export_ids();

    let mut out = csv::Writer::from_writer(create_maybe_gz(static_path.as_ref())?);
    let mut header = vec!["id".to_string()];
    header.extend(dataset.static_names.iter().cloned());
    out.write_record(&header).map_err(|e| Error::Load(e.to_string()))?;
    for i in 0..dataset.n_instances() {
        let mut row = vec![ids[i].clone()];
        for d in 0..dataset.static_data.n_features() {
            if dataset.static_data.observed[[i, d]] == 1 {
                let v = dataset.static_data.values[[i, d]];
                match &dataset.static_categories[d] {
                    Some(table) => row.push(table[v as usize].clone()),
                    None => row.push(format_value(v)),
                }
            } else {
                row.push(String::new());
            }
        }
        out.write_record(&row).map_err(|e| Error::Load(e.to_string()))?;
    }
    out.flush()?;

    let mut out = csv::Writer::from_writer(create_maybe_gz(temporal_path.as_ref())?);
    out.write_record(["id", "time", "variable", "value"])
        .map_err(|e| Error::Load(e.to_string()))?;
    for (d, name) in dataset.temporal_names.iter().enumerate() {
        for i in 0..dataset.n_instances() {
            for t in 0..dataset.temporal.seq_len[i] {
                if dataset.temporal.observed[[i, t, d]] == 1 {
                    out.write_record([
                        ids[i].as_str(),
                        &format_value(dataset.temporal.time[[i, t]]),
                        name,
                        &format_value(dataset.temporal.values[[i, t, d]]),
                    ])
                    .map_err(|e| Error::Load(e.to_string()))?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}
