//! Group specifications read from JSON documents.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use h1loc_core::{Group, Mat2, PrimePowerModulus};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: cannot read: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: field `{field}`: {message}")]
    Field {
        path: String,
        field: String,
        message: String,
    },
}

/// The on-disk form. Entries may be negative or exceed the modulus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub p: u64,
    pub n: u32,
    #[serde(alias = "gens")]
    pub generators: Vec<[[i64; 2]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// A validated specification with reduced generators.
#[derive(Clone, Debug)]
pub struct LoadedSpec {
    pub label: Option<String>,
    pub modulus: PrimePowerModulus,
    pub generators: Vec<Mat2>,
}

impl GroupSpec {
    pub fn parse(text: &str, path: &str) -> Result<GroupSpec, InputError> {
        serde_json::from_str(text).map_err(|e| InputError::Syntax {
            path: path.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &str) -> Result<LoadedSpec, InputError> {
        let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
            path: path.to_string(),
            source,
        })?;
        GroupSpec::parse(&text, path)?.validate(path)
    }

    pub fn validate(&self, path: &str) -> Result<LoadedSpec, InputError> {
        let field = |field: &str, message: String| InputError::Field {
            path: path.into(),
            field: field.into(),
            message,
        };
        let modulus = PrimePowerModulus::new(self.p, self.n).map_err(|e| {
            let name = if matches!(e, h1loc_core::Error::NotPrime(_)) {
                "p"
            } else {
                "n"
            };
            field(name, e.to_string())
        })?;
        let mut generators = Vec::with_capacity(self.generators.len());
        for (i, [[a, b], [c, d]]) in self.generators.iter().enumerate() {
            let x = Mat2::new(*a, *b, *c, *d, modulus);
            if !x.is_invertible() {
                let det = x.det().value();
                return Err(field(
                    &format!("generators[{i}]"),
                    format!("determinant {det} is not a unit mod {}", modulus.q()),
                ));
            }
            generators.push(x);
        }
        Ok(LoadedSpec {
            label: self.label.clone(),
            modulus,
            generators,
        })
    }
}

impl LoadedSpec {
    pub fn close(&self, cap: usize) -> h1loc_core::Result<Group> {
        Group::close(&self.generators, self.modulus, cap)
    }
}
