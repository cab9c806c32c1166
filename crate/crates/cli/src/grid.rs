//! Grid specifications for sweeps: a JSON file with one array per case
//! dimension, expanded to the cartesian product in declaration order,
//! deduplicated, deterministically ordered.

use serde::Deserialize;

/// JSON grid file:
/// ```json
/// {
///   "theorems": ["T21", "T22"],
///   "rho": ["0.3", "1.3"],
///   "i": [0, 1, 2],
///   "x": ["0.5", "-0.5"],
///   "delta": ["const:1", "harmonic"],
///   "modes": ["corrected"]
/// }
/// ```
/// `modes` is optional and defaults to `["corrected"]`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub theorems: Vec<String>,
    pub rho: Vec<String>,
    pub i: Vec<u32>,
    pub x: Vec<String>,
    pub delta: Vec<String>,
    #[serde(default = "default_modes")]
    pub modes: Vec<String>,
}

fn default_modes() -> Vec<String> {
    vec!["corrected".to_string()]
}

/// One expanded grid entry, still in textual form; parsing and domain
/// guards happen per case during the sweep.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridCase {
    pub theorem: String,
    pub rho: String,
    pub i: u32,
    pub x: String,
    pub delta: String,
    pub mode: String,
}

impl GridSpec {
    pub fn parse(text: &str) -> Result<GridSpec, String> {
        serde_json::from_str(text).map_err(|e| format!("invalid grid file: {e}"))
    }

    /// Cartesian expansion in field order, first occurrence wins on
    /// duplicates. Families that ignore `i` are normalized to `i = 0`
    /// before deduplication so a grid cannot multiply-count them.
    pub fn expand(&self) -> Result<Vec<GridCase>, String> {
        let mut seen = std::collections::HashSet::new();
        let mut cases = Vec::new();
        for theorem in &self.theorems {
            let th = kummer_core::engine::Theorem::parse(theorem)
                .ok_or_else(|| format!("unknown theorem {theorem:?}"))?;
            for rho in &self.rho {
                for &i in &self.i {
                    let i = if th.ignores_i() { 0 } else { i };
                    for x in &self.x {
                        for delta in &self.delta {
                            for mode in &self.modes {
                                if !matches!(mode.as_str(), "corrected" | "as-printed") {
                                    return Err(format!("unknown mode {mode:?}"));
                                }
                                let case = GridCase {
                                    theorem: th.as_str().to_string(),
                                    rho: rho.clone(),
                                    i,
                                    x: x.clone(),
                                    delta: delta.clone(),
                                    mode: mode.clone(),
                                };
                                if seen.insert(case.clone()) {
                                    cases.push(case);
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(cases)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_is_deterministic_and_deduplicated() {
        let spec = GridSpec::parse(
            r#"{"theorems":["C31","C31"],"rho":["0.5"],"i":[0,1,2],"x":["1"],"delta":["const:1"]}"#,
        )
        .unwrap();
        // C31 ignores i, so all i collapse to one case.
        let cases = spec.expand().unwrap();
        assert_eq!(cases.len(), 1);
        assert_eq!(cases[0].i, 0);
    }

    #[test]
    fn unknown_names_are_rejected() {
        let spec = GridSpec::parse(
            r#"{"theorems":["T99"],"rho":["0.5"],"i":[0],"x":["1"],"delta":["const:1"]}"#,
        )
        .unwrap();
        assert!(spec.expand().is_err());
        assert!(GridSpec::parse(r#"{"theorems":[]}"#).is_err());
    }
}
