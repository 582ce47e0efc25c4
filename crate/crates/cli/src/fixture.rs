//! Fixture files: embedding data, the two polarizations and optional labels.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use horosark_core::exactnum::{parse_rat, Rat};
use horosark_core::family::{Strip, TwoParamFamily};
use horosark_core::horo::{EmbeddingData, EmbeddingRow, RowKind, VarietyDescriptor};
use horosark_core::plane::Point2;
use horosark_core::sarkisov::FibreSpace;

use crate::CliError;

pub const FORMAT: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub format: u32,
    pub lattice_rank: usize,
    pub rows: Vec<FixtureRow>,
    #[serde(rename = "B")]
    pub start: Vec<String>,
    #[serde(rename = "Bprime")]
    pub end: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strip: Option<StripSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_space: Option<SpaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_space: Option<SpaceSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Ray,
    Color,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureRow {
    pub id: u32,
    pub kind: Kind,
    pub vector: Vec<i64>,
    pub anticanonical_coeff: String,
}

/// A named variety, either the one at a parameter point or a toric fan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Label {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toric: Option<ToricSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToricSpec {
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripSpec {
    pub delta_lo: String,
    pub delta_hi: String,
    pub eps_lo: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_hi: Option<String>,
}

/// A Mori fibre space given by two label names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub variety: String,
    pub base: String,
}

/// A validated fixture.
#[derive(Debug)]
pub struct Loaded {
    pub fixture: Fixture,
    pub family: TwoParamFamily,
    pub labels: Vec<(String, VarietyDescriptor)>,
    pub strip: Strip,
}

impl Loaded {
    pub fn name_of(&self, d: &VarietyDescriptor) -> Option<&str> {
        self.labels.iter().find(|(_, l)| l == d).map(|(n, _)| n.as_str())
    }

    pub fn label(&self, name: &str) -> Result<&VarietyDescriptor, CliError> {
        self.labels
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, d)| d)
            .ok_or_else(|| CliError::Validation(format!("unknown label {name:?}")))
    }

    pub fn space(&self, spec: &Option<SpaceSpec>) -> Result<Option<FibreSpace>, CliError> {
        spec.as_ref()
            .map(|s| Ok(FibreSpace { variety: self.label(&s.variety)?.clone(), base: self.label(&s.base)?.clone() }))
            .transpose()
    }
}

fn rat_field(what: &str, s: &str) -> Result<Rat, CliError> {
    parse_rat(s).map_err(|e| CliError::Validation(format!("{what}: {e}")))
}

fn rats(what: &str, v: &[String]) -> Result<Vec<Rat>, CliError> {
    v.iter().map(|s| rat_field(what, s)).collect()
}

pub fn parse_point(delta: &str, eps: &str) -> Result<Point2, CliError> {
    Ok(Point2::new(rat_field("delta", delta)?, rat_field("epsilon", eps)?))
}

impl Fixture {
    pub fn from_json(text: &str) -> Result<Fixture, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("malformed fixture: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fixture serializes") + "\n"
    }

    pub fn read(path: &Path) -> Result<Fixture, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Fixture::from_json(&text)
    }

    pub fn load(self) -> Result<Loaded, CliError> {
        if self.format != FORMAT {
            return Err(CliError::Validation(format!("unsupported fixture format {}", self.format)));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                Ok(EmbeddingRow {
                    id: r.id,
                    kind: match r.kind {
                        Kind::Ray => RowKind::Ray,
                        Kind::Color => RowKind::Color,
                    },
                    vector: r.vector.iter().map(|&x| Rat::from_integer(x.into())).collect(),
                    anticanonical: rat_field("anticanonical_coeff", &r.anticanonical_coeff)?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let embedding = EmbeddingData::new(self.lattice_rank, rows)?;
        let family = TwoParamFamily::new(embedding, rats("B", &self.start)?, rats("Bprime", &self.end)?)?;
        let strip = match &self.strip {
            Some(s) => Strip {
                delta_lo: rat_field("delta_lo", &s.delta_lo)?,
                delta_hi: rat_field("delta_hi", &s.delta_hi)?,
                eps_lo: rat_field("eps_lo", &s.eps_lo)?,
                eps_hi: s.eps_hi.as_deref().map(|x| rat_field("eps_hi", x)).transpose()?,
            },
            None => family.default_strip(),
        };
        let mut seen = BTreeMap::new();
        let mut labels = Vec::new();
        for l in &self.labels {
            if seen.insert(l.name.clone(), ()).is_some() {
                return Err(CliError::Validation(format!("duplicate label {:?}", l.name)));
            }
            let d = match (&l.at, &l.toric) {
                (Some([d, e]), None) => family.descriptor_at(&parse_point(d, e)?)?,
                (None, Some(t)) => toric(self.lattice_rank, t)?,
                _ => {
                    return Err(CliError::Validation(format!(
                        "label {:?} needs exactly one of `at` and `toric`",
                        l.name
                    )))
                }
            };
            labels.push((l.name.clone(), d));
        }
        Ok(Loaded { fixture: self, family, labels, strip })
    }
}

fn toric(rank: usize, t: &ToricSpec) -> Result<VarietyDescriptor, CliError> {
    if t.rays.iter().any(|r| r.len() != rank) {
        return Err(CliError::Validation("toric ray of the wrong length".into()));
    }
    if t.cones.iter().flatten().any(|&i| i >= t.rays.len()) {
        return Err(CliError::Validation("toric cone refers to a missing ray".into()));
    }
    let rays: Vec<&[i64]> = t.rays.iter().map(Vec::as_slice).collect();
    let cones: Vec<&[usize]> = t.cones.iter().map(Vec::as_slice).collect();
    Ok(VarietyDescriptor::toric(&rays, &cones))
}

pub fn load_path(path: &Path) -> Result<Loaded, CliError> {
    Fixture::read(path)?.load()
}
