//! JSON Schemas for [`HomSpec`] files and command reports, checked on load.

use std::path::Path;
use std::sync::OnceLock;

use jsonschema::Validator;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::homs::HomSpec;

pub const HOMSPEC_SCHEMA: &str = include_str!("../schemas/homspec.schema.json");
pub const REPORT_SCHEMA: &str = include_str!("../schemas/report.schema.json");

fn compiled(cell: &'static OnceLock<Validator>, text: &str) -> &'static Validator {
    cell.get_or_init(|| {
        let schema: Value = serde_json::from_str(text).expect("bundled schema is valid JSON");
        jsonschema::validator_for(&schema).expect("bundled schema compiles")
    })
}

fn check(validator: &Validator, value: &Value, what: &str) -> Result<()> {
    let errors: Vec<String> = validator
        .iter_errors(value)
        .map(|e| format!("{}: {e}", e.instance_path()))
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Error::Schema(format!("{what}: {}", errors.join("; "))))
    }
}

pub fn validate_homspec(value: &Value) -> Result<()> {
    static CELL: OnceLock<Validator> = OnceLock::new();
    check(compiled(&CELL, HOMSPEC_SCHEMA), value, "homspec")
}

pub fn validate_report(value: &Value) -> Result<()> {
    static CELL: OnceLock<Validator> = OnceLock::new();
    check(compiled(&CELL, REPORT_SCHEMA), value, "report")
}

/// Parse, schema-check and deserialize a spec.
pub fn parse_homspec(text: &str) -> Result<HomSpec> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Schema(format!("homspec is not JSON: {e}")))?;
    validate_homspec(&value)?;
    serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))
}

pub fn load_homspec(path: &Path) -> Result<HomSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_homspec(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn accepts_each_family() {
        for v in [
            json!({"family": "zero", "rho": [1.0], "sigma": [1.0, 2.0]}),
            json!({"family": "linear", "rho": [1, 0], "sigma": [1, 0], "matrix": [[1, 0], [0, 1]]}),
            json!({"family": "power", "rho": [1, 0], "sigma": [1, 0], "v": [1, 0], "gamma": 2.0}),
            json!({"family": "log", "rho": [1, 0], "sigma": [1, 0], "b": [0, 1]}),
            json!({"family": "exp", "rho": [0, 0], "sigma": [1, 0], "c": [1, 0], "kap": [0.69, 0]}),
        ] {
            validate_homspec(&v).unwrap();
            let spec: HomSpec = serde_json::from_value(v).unwrap();
            assert!(spec.dim_x() > 0);
        }
    }

    #[test]
    fn rejects_malformed() {
        for v in [
            json!({"family": "power", "rho": [1, 0], "sigma": [1, 0], "v": [1, 0]}),
            json!({"family": "cubic", "rho": [1], "sigma": [1]}),
            json!({"family": "zero", "rho": [], "sigma": [1]}),
            json!({"family": "log", "rho": [1], "sigma": [1], "b": [0], "extra": 1}),
            json!({"family": "exp", "rho": [0], "sigma": [1], "c": ["1"], "kap": [1]}),
        ] {
            assert!(matches!(validate_homspec(&v), Err(Error::Schema(_))), "{v}");
        }
        assert!(matches!(parse_homspec("{not json"), Err(Error::Schema(_))));
    }
}
