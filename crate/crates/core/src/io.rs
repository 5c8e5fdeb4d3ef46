//! On-disk JSON formats: spaces, labelled matrices, and functions.
//!
//! Costs travel as exact strings ("1/2", "3", "inf"), never as floats.
//! Loading performs shape and label resolution only; space validity is a
//! separate, explicit step so callers can admit merely reflexive
//! structures deliberately.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approach::{ApproachSpace, SpaceError};
use crate::cost::Cost;
use crate::numrel::{NumRel, PointSet, RelError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Shape {
        path: String,
        #[source]
        source: RelError,
    },
    #[error("{path}: function value missing for point `{label}`")]
    MissingValue { path: String, label: String },
    #[error("{path}: function mentions unknown point `{label}`")]
    UnknownPoint { path: String, label: String },
}

/// A space on disk: `conv[z][x]` is the distance from `z` to `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub points: Vec<String>,
    pub conv: Vec<Vec<Cost>>,
}

impl SpaceFile {
    pub fn from_space(space: &ApproachSpace) -> SpaceFile {
        SpaceFile {
            points: space.points().labels().to_vec(),
            conv: space.rows(),
        }
    }

    /// Builds the carrier and hands the matrix to the requested validator.
    pub fn to_space(&self, pseudo: bool) -> Result<ApproachSpace, SpaceError> {
        let points = PointSet::new(self.points.clone())?;
        if pseudo {
            ApproachSpace::pseudo(points, self.conv.clone())
        } else {
            ApproachSpace::approach(points, self.conv.clone())
        }
    }
}

/// A labelled matrix on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub entries: Vec<Vec<Cost>>,
}

impl MatrixFile {
    pub fn from_rel(rel: &NumRel) -> MatrixFile {
        MatrixFile {
            rows: rel.source().labels().to_vec(),
            cols: rel.target().labels().to_vec(),
            entries: (0..rel.source().len())
                .map(|i| (0..rel.target().len()).map(|j| rel.at(i, j)).collect())
                .collect(),
        }
    }

    pub fn to_rel(&self) -> Result<NumRel, RelError> {
        NumRel::new(
            PointSet::new(self.rows.clone())?,
            PointSet::new(self.cols.clone())?,
            self.entries.clone(),
        )
    }
}

/// A function into the half-line on disk, keyed by point label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FnFile {
    pub values: BTreeMap<String, Cost>,
}

impl FnFile {
    pub fn from_values(points: &PointSet, values: &[Cost]) -> FnFile {
        FnFile {
            values: points
                .labels()
                .iter()
                .cloned()
                .zip(values.iter().copied())
                .collect(),
        }
    }

    /// Orders the values along the carrier; every point must be covered and
    /// no extra labels may appear.
    pub fn resolve(&self, points: &PointSet, path: &str) -> Result<Vec<Cost>, IoError> {
        for label in self.values.keys() {
            if points.index_of(label).is_none() {
                return Err(IoError::UnknownPoint { path: path.to_string(), label: label.clone() });
            }
        }
        points
            .labels()
            .iter()
            .map(|l| {
                self.values.get(l).copied().ok_or_else(|| IoError::MissingValue {
                    path: path.to_string(),
                    label: l.clone(),
                })
            })
            .collect()
    }
}

fn read_to_string(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|source| IoError::Parse {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_space_file(path: &Path) -> Result<SpaceFile, IoError> {
    parse(path, &read_to_string(path)?)
}

pub fn load_matrix_file(path: &Path) -> Result<MatrixFile, IoError> {
    parse(path, &read_to_string(path)?)
}

pub fn load_fn_file(path: &Path) -> Result<FnFile, IoError> {
    parse(path, &read_to_string(path)?)
}

/// Serializes with a trailing newline, pretty-printed for diff-friendly
/// fixtures.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialization cannot fail");
    s.push('\n');
    s
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    std::fs::write(path, to_json_string(value)).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn space_files_round_trip_exactly() {
        let pool = gen::standard_pool();
        let mut rng = gen::rng_from_seed(3);
        for n in 1..=5 {
            let space = gen::random_space(&mut rng, n, &pool);
            let file = SpaceFile::from_space(&space);
            let text = to_json_string(&file);
            let back: SpaceFile = serde_json::from_str(&text).unwrap();
            assert_eq!(back, file);
            assert_eq!(back.to_space(false).unwrap(), space);
        }
    }

    #[test]
    fn matrix_files_round_trip() {
        let rel = NumRel::from_fn(&PointSet::of(&["a", "b"]), &PointSet::of(&["c"]), |i, _| {
            if i == 0 {
                Cost::ZERO
            } else {
                Cost::Infinity
            }
        });
        let file = MatrixFile::from_rel(&rel);
        let back: MatrixFile = serde_json::from_str(&to_json_string(&file)).unwrap();
        assert_eq!(back.to_rel().unwrap(), rel);
    }

    #[test]
    fn fn_files_resolve_in_carrier_order_and_reject_mismatches() {
        let points = PointSet::of(&["b", "a"]);
        let file = FnFile {
            values: [("a".to_string(), Cost::ZERO), ("b".to_string(), Cost::Infinity)]
                .into_iter()
                .collect(),
        };
        assert_eq!(
            file.resolve(&points, "f.json").unwrap(),
            vec![Cost::Infinity, Cost::ZERO]
        );
        let missing = FnFile {
            values: [("a".to_string(), Cost::ZERO)].into_iter().collect(),
        };
        assert!(matches!(
            missing.resolve(&points, "f.json"),
            Err(IoError::MissingValue { .. })
        ));
        let extra = FnFile {
            values: [
                ("a".to_string(), Cost::ZERO),
                ("b".to_string(), Cost::ZERO),
                ("z".to_string(), Cost::ZERO),
            ]
            .into_iter()
            .collect(),
        };
        assert!(matches!(
            extra.resolve(&points, "f.json"),
            Err(IoError::UnknownPoint { .. })
        ));
    }

    #[test]
    fn malformed_json_reports_the_path() {
        let err = parse::<SpaceFile>(Path::new("bad.json"), "{\"points\": [}").unwrap_err();
        assert!(err.to_string().starts_with("bad.json:"));
    }
}
