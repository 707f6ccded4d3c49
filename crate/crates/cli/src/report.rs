//! Common header for every structured document.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
}

impl ReportHeader {
    pub fn new(command: &str, seed: Option<u64>, budget: Option<usize>) -> Self {
        ReportHeader {
            tool: "h1loc".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            budget,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_names_tool_and_version() {
        let h = ReportHeader::new("verify", Some(3), Some(10));
        assert_eq!(h.tool, "h1loc");
        assert_eq!(h.version, env!("CARGO_PKG_VERSION"));
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(serde_json::from_str::<ReportHeader>(&s).unwrap(), h);
    }
}
