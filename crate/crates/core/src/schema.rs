//! Text schema for point sets and configurations:
//!
//! ```text
//! { "dim": n, "points": [[bits...], ...], "lines": [[i, j, k], ...] }
//! ```
//!
//! Lines index into `points`. Algebraic configurations carry coordinate
//! vectors in enumeration order; abstract ones carry string labels and omit
//! `dim`. Lines are written sorted, each triple ascending.

use serde::{Deserialize, Serialize};

use crate::config::{IncidenceProfile, LineConfiguration, PointLabel};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub points: Vec<PointLabel>,
    pub lines: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<IncidenceProfile>,
}

impl ConfigDoc {
    pub fn from_config(c: &LineConfiguration) -> Self {
        ConfigDoc {
            dim: c.dim(),
            points: c.labels().to_vec(),
            lines: c.lines().to_vec(),
            profile: None,
        }
    }

    pub fn with_profile(mut self, c: &LineConfiguration) -> Self {
        self.profile = Some(c.profile());
        self
    }

    pub fn to_config(&self) -> Result<LineConfiguration> {
        if let Some(dim) = self.dim {
            for p in &self.points {
                if let PointLabel::Coords(c) = p {
                    if c.len() != dim + 1 {
                        return Err(Error::Schema(format!(
                            "point {p} has {} coordinates, expected {}",
                            c.len(),
                            dim + 1
                        )));
                    }
                }
            }
        }
        let c = LineConfiguration::new(self.points.clone(), self.lines.clone())?;
        Ok(match self.dim {
            Some(d) => c.with_dim(d),
            None => c,
        })
    }

    /// One point or line per row.
    pub fn to_json(&self) -> String {
        let mut s = String::from("{\n");
        if let Some(d) = self.dim {
            s.push_str(&format!("  \"dim\": {d},\n"));
        }
        let row = |v: String| format!("    {v}");
        let points: Vec<String> = self
            .points
            .iter()
            .map(|p| row(serde_json::to_string(p).expect("labels serialize")))
            .collect();
        let lines: Vec<String> = self
            .lines
            .iter()
            .map(|l| row(format!("[{}, {}, {}]", l[0], l[1], l[2])))
            .collect();
        s.push_str(&format!("  \"points\": [\n{}\n  ],\n", points.join(",\n")));
        s.push_str(&format!("  \"lines\": [\n{}\n  ]", lines.join(",\n")));
        if let Some(profile) = &self.profile {
            let body = serde_json::to_string(profile).expect("profile serializes");
            s.push_str(&format!(",\n  \"profile\": {body}"));
        }
        s.push_str("\n}\n");
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }
}

pub fn to_json(c: &LineConfiguration) -> String {
    ConfigDoc::from_config(c).to_json()
}

pub fn from_json(text: &str) -> Result<LineConfiguration> {
    ConfigDoc::from_json(text)?.to_config()
}

/// DOT rendering of the incidence graph, vertices named by point index.
pub fn to_dot(c: &LineConfiguration) -> String {
    c.incidence_graph().to_dot()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{fano, schlaefli_configuration};

    #[test]
    fn fano_document_layout() {
        let text = to_json(&fano());
        assert!(text.starts_with("{\n  \"dim\": 2,\n  \"points\": [\n    [1,0,0],\n"));
        assert!(text.contains("\"lines\": [\n    [0, 1, 2],"));
        assert_eq!(from_json(&text).unwrap(), fano());
    }

    #[test]
    fn abstract_labels_round_trip() {
        let s = schlaefli_configuration();
        let text = to_json(&s);
        assert!(!text.contains("\"dim\""));
        assert!(text.contains("\"a1\""));
        assert_eq!(from_json(&text).unwrap(), s);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(
            from_json("{\"points\": [1]}"),
            Err(Error::Schema(_))
        ));
        let bad = r#"{"points": ["x","y","z","w"], "lines": [[0,1,2],[0,1,3]]}"#;
        assert!(matches!(
            from_json(bad),
            Err(Error::InvalidConfiguration(_))
        ));
        let wrong_len = r#"{"dim": 2, "points": [[1,0]], "lines": []}"#;
        assert!(matches!(from_json(wrong_len), Err(Error::Schema(_))));
    }
}
