//! Ingestion of per-problem JSON data files. Schemas are closed: unknown keys
//! are rejected, and every violation names the first offending path.

use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("schema mismatch at {path}: {message}")]
pub struct SchemaMismatch {
    pub path: String,
    pub message: String,
}

fn err(path: &str, message: impl Into<String>) -> SchemaMismatch {
    SchemaMismatch {
        path: path.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutstockItem {
    pub length: i64,
    pub demand: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutstockData {
    pub n_pieces: i64,
    pub piece_length: i64,
    pub items: Vec<CutstockItem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BusSchedulingData {
    pub n_tasks: i64,
    /// Each shift lists the task indices it covers, in file order.
    pub shifts: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetabolicNetworkData {
    pub n_reactions: i64,
    pub stoichiometry_matrix: Vec<Vec<i64>>,
    pub reversible_indicators: Vec<Vec<i64>>,
}

/// A validated per-problem data payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataRecord {
    Cutstock(CutstockData),
    BusScheduling(BusSchedulingData),
    MetabolicNetwork(MetabolicNetworkData),
}

impl DataRecord {
    pub fn schema_id(&self) -> &'static str {
        match self {
            DataRecord::Cutstock(_) => "Cutstock",
            DataRecord::BusScheduling(_) => "BusScheduling",
            DataRecord::MetabolicNetwork(_) => "MetabolicNetwork",
        }
    }
}

/// Parses and validates `text` against the named schema.
pub fn load_data(text: &str, schema: &str) -> Result<DataRecord, SchemaMismatch> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| err("$", format!("invalid JSON: {e}")))?;
    match schema {
        "Cutstock" => load_cutstock(&value).map(DataRecord::Cutstock),
        "BusScheduling" => load_bus_scheduling(&value).map(DataRecord::BusScheduling),
        "MetabolicNetwork" => load_metabolic(&value).map(DataRecord::MetabolicNetwork),
        other => Err(err("$", format!("unknown schema {other:?}"))),
    }
}

fn object<'a>(
    v: &'a Value,
    path: &str,
    keys: &[&str],
) -> Result<&'a serde_json::Map<String, Value>, SchemaMismatch> {
    let obj = v
        .as_object()
        .ok_or_else(|| err(path, "expected an object"))?;
    for k in obj.keys() {
        if !keys.contains(&k.as_str()) {
            return Err(err(&format!("{path}.{k}"), "unknown key"));
        }
    }
    for k in keys {
        if !obj.contains_key(*k) {
            return Err(err(&format!("{path}.{k}"), "missing"));
        }
    }
    Ok(obj)
}

fn int(v: &Value, path: &str) -> Result<i64, SchemaMismatch> {
    v.as_i64().ok_or_else(|| err(path, "expected an integer"))
}

fn int_list(v: &Value, path: &str) -> Result<Vec<i64>, SchemaMismatch> {
    let arr = v.as_array().ok_or_else(|| err(path, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| int(x, &format!("{path}[{i}]")))
        .collect()
}

fn int_matrix(v: &Value, path: &str) -> Result<Vec<Vec<i64>>, SchemaMismatch> {
    let arr = v.as_array().ok_or_else(|| err(path, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, row)| int_list(row, &format!("{path}[{i}]")))
        .collect()
}

fn load_cutstock(v: &Value) -> Result<CutstockData, SchemaMismatch> {
    let obj = object(v, "$", &["nPieces", "pieceLength", "items"])?;
    let n_pieces = int(&obj["nPieces"], "$.nPieces")?;
    let piece_length = int(&obj["pieceLength"], "$.pieceLength")?;
    let arr = obj["items"]
        .as_array()
        .ok_or_else(|| err("$.items", "expected an array"))?;
    let mut items = Vec::with_capacity(arr.len());
    for (i, it) in arr.iter().enumerate() {
        let path = format!("$.items[{i}]");
        let o = object(it, &path, &["length", "demand"])?;
        items.push(CutstockItem {
            length: int(&o["length"], &format!("{path}.length"))?,
            demand: int(&o["demand"], &format!("{path}.demand"))?,
        });
    }
    Ok(CutstockData {
        n_pieces,
        piece_length,
        items,
    })
}

fn load_bus_scheduling(v: &Value) -> Result<BusSchedulingData, SchemaMismatch> {
    let obj = object(v, "$", &["nTasks", "shifts"])?;
    Ok(BusSchedulingData {
        n_tasks: int(&obj["nTasks"], "$.nTasks")?,
        shifts: int_matrix(&obj["shifts"], "$.shifts")?,
    })
}

fn load_metabolic(v: &Value) -> Result<MetabolicNetworkData, SchemaMismatch> {
    let obj = object(
        v,
        "$",
        &["nReactions", "stoichiometryMatrix", "reversibleIndicators"],
    )?;
    Ok(MetabolicNetworkData {
        n_reactions: int(&obj["nReactions"], "$.nReactions")?,
        stoichiometry_matrix: int_matrix(&obj["stoichiometryMatrix"], "$.stoichiometryMatrix")?,
        reversible_indicators: int_matrix(&obj["reversibleIndicators"], "$.reversibleIndicators")?,
    })
}
