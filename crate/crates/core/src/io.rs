//! JSON file formats for groups, representations and character tables.
//! Complex numbers are `[re, im]` pairs; matrices are flat row-major lists.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, RawGroup};
use crate::linalg::{Matrix, C64};
use crate::rep::{CharacterTable, UnitaryRep};

pub type Pair = [f64; 2];

fn to_c(p: &Pair) -> C64 {
    C64::new(p[0], p[1])
}

fn to_pair(z: C64) -> Pair {
    [z.re, z.im]
}

fn matrix_from_flat(d: usize, flat: &[Pair], what: &str) -> Result<Matrix> {
    if flat.len() != d * d {
        return Err(Error::DimensionMismatch(format!(
            "{what}: {} entries, expected {}",
            flat.len(),
            d * d
        )));
    }
    Ok(Matrix::from_row_major(d, d, flat.iter().map(to_c).collect()))
}

fn flat_from_matrix(m: &Matrix) -> Vec<Pair> {
    m.data().iter().map(|&z| to_pair(z)).collect()
}

pub fn parse_group(text: &str) -> Result<FiniteGroup> {
    let raw: RawGroup = serde_json::from_str(text)?;
    FiniteGroup::validate(&raw)
}

pub fn group_to_json(group: &FiniteGroup) -> Result<String> {
    Ok(serde_json::to_string_pretty(&group.to_raw())?)
}

/// `{ "d": 2, "matrices": [[[re, im], ...], ...] }`, one matrix per element
/// in Cayley-table order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepFile {
    pub d: usize,
    pub matrices: Vec<Vec<Pair>>,
}

impl RepFile {
    pub fn from_rep(rep: &UnitaryRep) -> Self {
        RepFile {
            d: rep.dim(),
            matrices: rep.matrices().iter().map(flat_from_matrix).collect(),
        }
    }

    pub fn into_rep(self, group: &FiniteGroup) -> Result<UnitaryRep> {
        if self.matrices.len() != group.order() {
            return Err(Error::DimensionMismatch(format!(
                "{} matrices for a group of order {}",
                self.matrices.len(),
                group.order()
            )));
        }
        let mats = self
            .matrices
            .iter()
            .enumerate()
            .map(|(g, flat)| matrix_from_flat(self.d, flat, &format!("matrix {g}")))
            .collect::<Result<Vec<_>>>()?;
        UnitaryRep::new(group, mats)
    }
}

pub fn parse_rep(group: &FiniteGroup, text: &str) -> Result<UnitaryRep> {
    let file: RepFile = serde_json::from_str(text)?;
    file.into_rep(group)
}

/// Characters are listed per element (one row per irrep, `|G|` entries) and
/// must be constant on conjugacy classes. Irrep 0 must be trivial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterTableFile {
    pub dims: Vec<usize>,
    pub chars: Vec<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub irrep_matrices: Option<Vec<Vec<Vec<Pair>>>>,
}

impl CharacterTableFile {
    pub fn from_table(group: &FiniteGroup, table: &CharacterTable) -> Self {
        let chars = (0..table.num_irreps())
            .map(|l| group.elements().map(|g| to_pair(table.character(l, g))).collect())
            .collect();
        let irrep_matrices = table.has_irrep_matrices().then(|| {
            (0..table.num_irreps())
                .map(|l| {
                    group
                        .elements()
                        .map(|g| flat_from_matrix(table.irrep_matrix(l, g).expect("present")))
                        .collect()
                })
                .collect()
        });
        CharacterTableFile {
            dims: table.dims().to_vec(),
            chars,
            irrep_matrices,
        }
    }

    pub fn into_table(self, group: &FiniteGroup) -> Result<CharacterTable> {
        let classes = group.conjugacy_classes();
        let mut rows = Vec::with_capacity(self.chars.len());
        for (l, row) in self.chars.iter().enumerate() {
            if row.len() != group.order() {
                return Err(Error::InvalidCharacterTable(format!(
                    "row {l} has {} entries, group order is {}",
                    row.len(),
                    group.order()
                )));
            }
            let mut by_class = Vec::with_capacity(classes.count());
            for c in 0..classes.count() {
                let members = &classes.classes()[c];
                let v = to_c(&row[members[0]]);
                if members.iter().any(|&g| (to_c(&row[g]) - v).norm() > 1e-9) {
                    return Err(Error::InvalidCharacterTable(format!(
                        "row {l} is not constant on the class of {}",
                        group.label(members[0])
                    )));
                }
                by_class.push(v);
            }
            rows.push(by_class);
        }
        let mats = match self.irrep_matrices {
            None => None,
            Some(all) => {
                let mut out = Vec::with_capacity(all.len());
                for (l, per_g) in all.iter().enumerate() {
                    let d = *self.dims.get(l).ok_or_else(|| {
                        Error::InvalidCharacterTable("more irrep matrix sets than irreps".into())
                    })?;
                    out.push(
                        per_g
                            .iter()
                            .enumerate()
                            .map(|(g, f)| matrix_from_flat(d, f, &format!("irrep {l} element {g}")))
                            .collect::<Result<Vec<_>>>()?,
                    );
                }
                Some(out)
            }
        };
        CharacterTable::new(group, self.dims, rows, mats)
    }
}

pub fn parse_character_table(group: &FiniteGroup, text: &str) -> Result<CharacterTable> {
    let file: CharacterTableFile = serde_json::from_str(text)?;
    file.into_table(group)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::BuiltinGroup;
    use crate::rep::{klein_pauli_rep, s3_two_dim_rep};

    #[test]
    fn group_roundtrip() {
        let g = BuiltinGroup::Symmetric3.build();
        let back = parse_group(&group_to_json(&g).unwrap()).unwrap();
        assert_eq!(back.cayley_rows(), g.cayley_rows());
        assert_eq!(back.labels(), g.labels());
    }

    #[test]
    fn malformed_group_is_rejected() {
        let err = parse_group(r#"{"order": 2, "cayley": [[0, 1], [1, 1]]}"#).unwrap_err();
        assert!(matches!(err, Error::NotAGroup(_)), "{err}");
        let err = parse_group("{not json").unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn rep_roundtrip() {
        let rep = klein_pauli_rep();
        let text = serde_json::to_string(&RepFile::from_rep(&rep)).unwrap();
        let back = parse_rep(rep.group(), &text).unwrap();
        for g in rep.group().elements() {
            assert_eq!(back.matrix(g), rep.matrix(g));
        }
    }

    #[test]
    fn rep_wrong_count() {
        let g = BuiltinGroup::Cyclic(3).build();
        let text = r#"{"d": 1, "matrices": [[[1, 0]], [[1, 0]]]}"#;
        assert!(matches!(parse_rep(&g, text), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn table_roundtrip_with_matrices() {
        let rep = s3_two_dim_rep();
        let group = rep.group();
        let table = CharacterTable::symmetric3().unwrap();
        let file = CharacterTableFile::from_table(group, &table);
        let text = serde_json::to_string(&file).unwrap();
        let back = parse_character_table(group, &text).unwrap();
        assert_eq!(back.dims(), table.dims());
        assert!(back.has_irrep_matrices());
    }

    #[test]
    fn table_not_class_function() {
        let group = BuiltinGroup::Symmetric3.build();
        let table = CharacterTable::symmetric3().unwrap();
        let mut file = CharacterTableFile::from_table(&group, &table);
        file.irrep_matrices = None;
        file.chars[1][1] = [0.5, 0.0];
        let err = file.into_table(&group).unwrap_err();
        assert!(matches!(err, Error::InvalidCharacterTable(_)));
    }
}
