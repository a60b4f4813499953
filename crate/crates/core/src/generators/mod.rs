//! Deterministic instance generators for a family of combinatorial benchmark
//! problems. Each generator turns its parameters (scalars or a JSON data
//! record) into a validated instance with a fixed variable and constraint
//! layout, so repeated runs produce signature-identical output.

mod cop;
mod csp;

pub use cop::{
    gen_bus_scheduling, gen_coprime, gen_cutstock, gen_low_autocorrelation, gen_metabolic_network,
};
pub use csp::{
    gen_almost_magic, gen_chain_reaction, gen_efpa, gen_graceful_graph, gen_heterosquare,
    gen_langford_bin, gen_ramsey_partition, HeterosquareVariant,
};

use thiserror::Error;

use crate::data::{load_data, DataRecord};
use crate::ir::Instance;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    ParamError(String),
    #[error("unknown problem {0:?}")]
    UnknownProblem(String),
    #[error("{0}")]
    BadData(#[from] crate::data::SchemaMismatch),
}

pub(crate) fn param_err(msg: impl Into<String>) -> GenError {
    GenError::ParamError(msg.into())
}

/// Data argument as given on a command line: a scalar tuple or a JSON file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataArg {
    Scalars(Vec<i64>),
    Json(String),
}

impl DataArg {
    /// Parses `-data=` values: `14`, `[3,100]`, or a path ending in `.json`.
    pub fn parse(text: &str) -> Result<DataArg, GenError> {
        let t = text.trim();
        if let Some(body) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let vals: Result<Vec<i64>, _> = body.split(',').map(|x| x.trim().parse()).collect();
            return vals
                .map(DataArg::Scalars)
                .map_err(|_| param_err(format!("bad tuple {t:?}")));
        }
        if let Ok(v) = t.parse::<i64>() {
            return Ok(DataArg::Scalars(vec![v]));
        }
        Ok(DataArg::Json(t.to_string()))
    }
}

fn scalars<const N: usize>(problem: &str, arg: &DataArg) -> Result<[i64; N], GenError> {
    match arg {
        DataArg::Scalars(v) if v.len() == N => Ok(std::array::from_fn(|i| v[i])),
        DataArg::Scalars(v) => Err(param_err(format!(
            "{problem} expects {N} scalar parameter(s), got {}",
            v.len()
        ))),
        DataArg::Json(_) => Err(param_err(format!("{problem} expects scalar parameters"))),
    }
}

fn json_record(problem: &str, schema: &str, arg: &DataArg) -> Result<DataRecord, GenError> {
    match arg {
        DataArg::Json(text) => Ok(load_data(text, schema)?),
        DataArg::Scalars(_) => Err(param_err(format!("{problem} expects a JSON data file"))),
    }
}

/// The problems this toolkit can generate, by their catalog names.
pub const PROBLEMS: &[&str] = &[
    "ChainReaction",
    "AlmostMagic",
    "GracefulGraph",
    "Heterosquare",
    "LangfordBin",
    "RamseyPartition",
    "EFPA",
    "LowAutocorrelation",
    "Coprime",
    "Cutstock",
    "BusScheduling",
    "MetabolicNetwork",
];

/// Dispatches a problem name plus data/variant arguments to its generator.
/// For JSON-backed problems the `DataArg::Json` payload is the file text.
pub fn generate(
    problem: &str,
    data: &DataArg,
    variant: Option<&str>,
) -> Result<Instance, GenError> {
    let want_no_variant = |out: Instance| -> Result<Instance, GenError> {
        match variant {
            None => Ok(out),
            Some(v) => Err(param_err(format!("{problem} has no variant {v:?}"))),
        }
    };
    let key = PROBLEMS
        .iter()
        .find(|p| p.eq_ignore_ascii_case(problem))
        .ok_or_else(|| GenError::UnknownProblem(problem.to_string()))?;
    match *key {
        "ChainReaction" => {
            let [n, p] = scalars::<2>(key, data)?;
            want_no_variant(gen_chain_reaction(n, p)?)
        }
        "AlmostMagic" => {
            let [n, p] = scalars::<2>(key, data)?;
            want_no_variant(gen_almost_magic(n, p)?)
        }
        "GracefulGraph" => {
            let [k, p] = scalars::<2>(key, data)?;
            want_no_variant(gen_graceful_graph(k, p)?)
        }
        "Heterosquare" => {
            let [n] = scalars::<1>(key, data)?;
            let v = match variant {
                None => HeterosquareVariant::None,
                Some("easy") => HeterosquareVariant::Easy,
                Some("fair") => HeterosquareVariant::Fair,
                Some("hard") => HeterosquareVariant::Hard,
                Some(other) => return Err(param_err(format!("unknown variant {other:?}"))),
            };
            gen_heterosquare(n, v)
        }
        "LangfordBin" => {
            let [n] = scalars::<1>(key, data)?;
            want_no_variant(gen_langford_bin(n)?)
        }
        "RamseyPartition" => {
            let [q, n] = scalars::<2>(key, data)?;
            want_no_variant(gen_ramsey_partition(q, n)?)
        }
        "EFPA" => {
            let [d, lambda, q, n] = scalars::<4>(key, data)?;
            want_no_variant(gen_efpa(d, lambda, q, n)?)
        }
        "LowAutocorrelation" => {
            let [n] = scalars::<1>(key, data)?;
            want_no_variant(gen_low_autocorrelation(n)?)
        }
        "Coprime" => {
            let [n] = scalars::<1>(key, data)?;
            want_no_variant(gen_coprime(n)?)
        }
        "Cutstock" => {
            let DataRecord::Cutstock(d) = json_record(key, "Cutstock", data)? else {
                unreachable!()
            };
            want_no_variant(gen_cutstock(&d)?)
        }
        "BusScheduling" => {
            let DataRecord::BusScheduling(d) = json_record(key, "BusScheduling", data)? else {
                unreachable!()
            };
            want_no_variant(gen_bus_scheduling(&d)?)
        }
        "MetabolicNetwork" => {
            let DataRecord::MetabolicNetwork(d) = json_record(key, "MetabolicNetwork", data)?
            else {
                unreachable!()
            };
            want_no_variant(gen_metabolic_network(&d)?)
        }
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn data_arg_forms() {
        assert_eq!(DataArg::parse("14").unwrap(), DataArg::Scalars(vec![14]));
        assert_eq!(
            DataArg::parse("[3, 100]").unwrap(),
            DataArg::Scalars(vec![3, 100])
        );
        assert_eq!(
            DataArg::parse("inst.json").unwrap(),
            DataArg::Json("inst.json".to_string())
        );
        assert!(DataArg::parse("[3,x]").is_err());
    }

    #[test]
    fn dispatch_is_case_insensitive() {
        let a = generate("langfordbin", &DataArg::Scalars(vec![4]), None).unwrap();
        let b = gen_langford_bin(4).unwrap();
        assert_eq!(a.signature(), b.signature());
    }

    #[test]
    fn unknown_problem_is_reported() {
        assert!(matches!(
            generate("Sudoku", &DataArg::Scalars(vec![9]), None),
            Err(GenError::UnknownProblem(_))
        ));
    }
}
