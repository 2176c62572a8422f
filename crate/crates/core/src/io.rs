//! JSON coefficient files: `{"b0": [re, im], "tail": [[re, im], ...]}`.
//!
//! An optional `"truncated": true` marks the tail as the head of an infinite
//! expansion; without it the map is the Laurent polynomial as written.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::grunsky::LaurentMap;
use crate::{Error, Result, C64};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientFile {
    b0: [f64; 2],
    tail: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    truncated: bool,
}

pub fn parse_laurent_map(text: &str) -> Result<LaurentMap> {
    let file: CoefficientFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("coefficient file: {e}")))?;
    let b0 = C64::new(file.b0[0], file.b0[1]);
    let tail: Vec<C64> = file.tail.iter().map(|p| C64::new(p[0], p[1])).collect();
    if file.truncated {
        LaurentMap::truncated(b0, tail)
    } else {
        LaurentMap::new(b0, tail)
    }
}

pub fn laurent_map_to_json(map: &LaurentMap) -> String {
    let file = CoefficientFile {
        b0: [map.b0().re, map.b0().im],
        tail: map.tail().iter().map(|c| [c.re, c.im]).collect(),
        truncated: map.is_truncated(),
    };
    serde_json::to_string_pretty(&file).expect("coefficient file serializes")
}

pub fn read_laurent_map(path: &Path) -> Result<LaurentMap> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("coeffs: cannot read {}: {e}", path.display())))?;
    parse_laurent_map(&text)
}

pub fn write_laurent_map(path: &Path, map: &LaurentMap) -> Result<()> {
    std::fs::write(path, laurent_map_to_json(map))
        .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_identity() {
        let map = parse_laurent_map(r#"{"b0": [0, 0], "tail": []}"#).unwrap();
        assert_eq!(map, LaurentMap::identity());
    }

    #[test]
    fn errors_name_the_field() {
        let err = parse_laurent_map(r#"{"tail": []}"#).unwrap_err().to_string();
        assert!(err.contains("b0"), "{err}");
        let err = parse_laurent_map(r#"{"b0": [0, 0], "tail": [[1]]}"#).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn truncated_flag_survives() {
        let map = LaurentMap::truncated(C64::new(0.5, -1.0), vec![C64::new(0.1, 0.2)]).unwrap();
        let back = parse_laurent_map(&laurent_map_to_json(&map)).unwrap();
        assert_eq!(back, map);
    }
}
