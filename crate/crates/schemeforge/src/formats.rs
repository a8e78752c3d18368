//! JSON documents for fields, Paige loops, groups, schemes and tables.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use schemeforge_core::chartab::{CharacterTable, GroupCharacterTable};
use schemeforge_core::gf::FieldSpec;
use schemeforge_core::permgroup::PermutationGroup;
use schemeforge_core::pipeline::paige_scheme;
use schemeforge_core::scheme::{fuse, AssociationScheme, Provenance};
use schemeforge_core::zorn::PaigeLoop;

use crate::error::{CliError, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpecJson {
    pub p: u32,
    pub r: u32,
    pub modulus: Vec<u32>,
}

impl From<&FieldSpec> for FieldSpecJson {
    fn from(s: &FieldSpec) -> Self {
        FieldSpecJson { p: s.p(), r: s.r(), modulus: s.modulus().to_vec() }
    }
}

impl FieldSpecJson {
    pub fn to_spec(&self) -> Result<FieldSpec, CliError> {
        Ok(FieldSpec::new(self.p, self.r, self.modulus.clone())?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaigeLoopJson {
    pub q: u32,
    pub order: usize,
    /// `[a, αx, αy, αz, βx, βy, βz, b]` per element, in index order.
    pub elements: Vec<[u8; 8]>,
}

impl From<&PaigeLoop> for PaigeLoopJson {
    fn from(lp: &PaigeLoop) -> Self {
        PaigeLoopJson { q: lp.q() as u32, order: lp.order(), elements: lp.elements().to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupJson {
    pub degree: usize,
    pub order: usize,
    pub generators: Vec<Vec<u32>>,
}

impl GroupJson {
    pub fn from_group(g: &PermutationGroup) -> Result<Self, CliError> {
        Ok(GroupJson {
            degree: g.degree(),
            order: g.order()?,
            generators: g.generators().iter().map(|p| p.images().to_vec()).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(z: ComplexJson) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableJson {
    pub d: usize,
    pub n: u64,
    #[serde(rename = "P")]
    pub p: Vec<Vec<ComplexJson>>,
    pub valencies: Vec<u64>,
    pub multiplicities: Vec<f64>,
}

impl From<&CharacterTable> for TableJson {
    fn from(t: &CharacterTable) -> Self {
        TableJson {
            d: t.d,
            n: t.n,
            p: t.p.iter().map(|r| r.iter().map(|&z| z.into()).collect()).collect(),
            valencies: t.valencies.clone(),
            multiplicities: t.multiplicities.clone(),
        }
    }
}

impl TableJson {
    /// Checks dimensions; entries are taken as given.
    pub fn to_table(&self) -> Result<CharacterTable, CliError> {
        let size = self.d + 1;
        let bad = |what: &str| CliError::Parse(ParseError::new(1, 1, format!("table: {what}")));
        if self.p.len() != size || self.p.iter().any(|r| r.len() != size) {
            return Err(bad("P must be (d+1) × (d+1)"));
        }
        if self.valencies.len() != size || self.multiplicities.len() != size {
            return Err(bad("valencies and multiplicities need d+1 entries"));
        }
        Ok(CharacterTable {
            d: self.d,
            n: self.n,
            p: self.p.iter().map(|r| r.iter().map(|&z| z.into()).collect()).collect(),
            valencies: self.valencies.clone(),
            multiplicities: self.multiplicities.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupTableJson {
    #[serde(rename = "T")]
    pub t: Vec<Vec<ComplexJson>>,
    pub degrees: Vec<u64>,
    pub class_sizes: Vec<u64>,
}

impl From<&GroupCharacterTable> for GroupTableJson {
    fn from(g: &GroupCharacterTable) -> Self {
        GroupTableJson {
            t: g.t.iter().map(|r| r.iter().map(|&z| z.into()).collect()).collect(),
            degrees: g.degrees.clone(),
            class_sizes: g.class_sizes.clone(),
        }
    }
}

/// How a function-backed scheme can be rebuilt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SourceJson {
    Paige { q: u32, seed: u64 },
    Fusion { base: Box<SourceJson>, cells: Vec<Vec<usize>> },
}

impl SourceJson {
    fn from_provenance(p: &Provenance) -> Option<Self> {
        match p {
            Provenance::Explicit => None,
            Provenance::Paige { q, seed } => Some(SourceJson::Paige { q: *q, seed: *seed }),
            Provenance::Fusion { base, cells } => {
                Some(SourceJson::Fusion { base: Box::new(Self::from_provenance(base)?), cells: cells.clone() })
            }
        }
    }

    pub fn build(&self, element_cap: usize) -> Result<AssociationScheme, CliError> {
        match self {
            SourceJson::Paige { q, seed } => Ok(paige_scheme(*q, *seed, element_cap)?.scheme),
            SourceJson::Fusion { base, cells } => Ok(fuse(&base.build(element_cap)?, cells)?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum RelationsJson {
    Matrix(Vec<Vec<u8>>),
    Source(SourceJson),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeJson {
    pub n: usize,
    pub d: usize,
    pub valencies: Vec<usize>,
    pub relations: RelationsJson,
}

impl SchemeJson {
    /// Matrix form when the scheme is stored explicitly or fits in
    /// `relation_cap` entries, otherwise its source descriptor.
    pub fn from_scheme(s: &AssociationScheme, relation_cap: usize) -> Result<Self, CliError> {
        let n = s.n();
        let relations = if let Some(m) = s.matrix() {
            RelationsJson::Matrix(m.chunks(n.max(1)).map(<[u8]>::to_vec).collect())
        } else if let Some(src) = SourceJson::from_provenance(s.provenance()) {
            RelationsJson::Source(src)
        } else {
            let m = s.materialize(relation_cap)?;
            RelationsJson::Matrix(m.matrix().unwrap_or_default().chunks(n.max(1)).map(<[u8]>::to_vec).collect())
        };
        Ok(SchemeJson { n, d: s.d(), valencies: s.valencies().to_vec(), relations })
    }

    pub fn to_scheme(&self, element_cap: usize) -> Result<AssociationScheme, CliError> {
        let bad = |msg: String| CliError::Parse(ParseError::new(1, 1, format!("scheme: {msg}")));
        let s = match &self.relations {
            RelationsJson::Matrix(rows) => {
                if rows.len() != self.n || rows.iter().any(|r| r.len() != self.n) {
                    return Err(bad(format!("matrix must be {0} × {0}", self.n)));
                }
                if let Some(&c) = rows.iter().flatten().find(|&&c| c as usize > self.d) {
                    return Err(bad(format!("class index {c} exceeds d = {}", self.d)));
                }
                AssociationScheme::from_matrix(self.n, rows.concat())?
            }
            RelationsJson::Source(src) => src.build(element_cap)?,
        };
        if s.n() != self.n || s.d() != self.d || s.valencies() != self.valencies.as_slice() {
            return Err(bad("declared n, d or valencies disagree with the relations".into()));
        }
        Ok(s)
    }
}

/// Any document this tool writes, recognised by its keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Document {
    Table(TableJson),
    GroupTable(GroupTableJson),
    Scheme(SchemeJson),
    Paige(PaigeLoopJson),
    Group(GroupJson),
    Field(FieldSpecJson),
}

pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError::from_json(&e))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("serializable");
    s.push('\n');
    s
}
