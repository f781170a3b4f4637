//! Loading groups, representations and character tables from built-in names
//! or files, with a digest of what was loaded.

use std::path::Path;

use dfscodec::group::{BuiltinGroup, FiniteGroup};
use dfscodec::io::{group_to_json, parse_character_table, parse_group, parse_rep, CharacterTableFile, RepFile};
use dfscodec::rep::{cyclic_diagonal_rep, default_rep, regular_rep, CharacterTable, UnitaryRep};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub source: String,
    pub sha256: String,
}

impl InputDigest {
    fn new(source: String, bytes: &[u8]) -> Self {
        InputDigest {
            source,
            sha256: sha256_hex(bytes),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

// only the file name goes into reports, so they do not depend on where the
// inputs live
fn file_source(path: &Path) -> String {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    format!("file:{name}")
}

pub struct LoadedGroup {
    pub group: FiniteGroup,
    pub builtin: Option<BuiltinGroup>,
    pub digest: InputDigest,
}

pub fn load_group_file(path: &Path) -> CliResult<LoadedGroup> {
    let text = read_file(path)?;
    let group = parse_group(&text)?;
    Ok(LoadedGroup {
        group,
        builtin: None,
        digest: InputDigest::new(file_source(path), text.as_bytes()),
    })
}

pub fn load_builtin_group(name: &str) -> CliResult<LoadedGroup> {
    let builtin: BuiltinGroup = name
        .parse()
        .map_err(|e: dfscodec::Error| CliError::Usage(e.to_string()))?;
    let group = builtin.build();
    let canonical = group_to_json(&group)?;
    Ok(LoadedGroup {
        digest: InputDigest::new(format!("builtin:{builtin}"), canonical.as_bytes()),
        group,
        builtin: Some(builtin),
    })
}

/// An existing file wins over a built-in name.
pub fn load_group(spec: &str) -> CliResult<LoadedGroup> {
    let path = Path::new(spec);
    if path.is_file() {
        return load_group_file(path);
    }
    load_builtin_group(spec).map_err(|_| {
        CliError::Usage(format!(
            "group '{spec}' is neither a file nor a built-in name (z<N>, k4, s3, products like z2xz2)"
        ))
    })
}

/// `builtin`/`default` (the default faithful rep of a built-in group),
/// `builtin-2d` (same, insisting on d = 2), `regular`, `diag:<d>` for cyclic
/// groups, or a representation file.
pub fn load_rep(spec: &str, group: &LoadedGroup) -> CliResult<(UnitaryRep, InputDigest)> {
    let canonical = |rep: &UnitaryRep, source: String| -> CliResult<InputDigest> {
        let text = serde_json::to_string(&RepFile::from_rep(rep)).map_err(dfscodec::Error::from)?;
        Ok(InputDigest::new(source, text.as_bytes()))
    };
    let need_builtin = || {
        group.builtin.clone().ok_or_else(|| {
            CliError::Usage(format!("rep '{spec}' needs a built-in group"))
        })
    };
    match spec {
        "builtin" | "default" | "builtin-2d" => {
            let b = need_builtin()?;
            let rep = default_rep(&b)?;
            if spec == "builtin-2d" && rep.dim() != 2 {
                return Err(CliError::Usage(format!(
                    "default representation of {b} has d = {}",
                    rep.dim()
                )));
            }
            let name = if spec == "builtin-2d" { "default-2d" } else { "default" };
            let digest = canonical(&rep, format!("builtin:{b}/{name}"))?;
            Ok((rep, digest))
        }
        "regular" => {
            let rep = regular_rep(&group.group);
            let digest = canonical(&rep, format!("{}/regular", group.digest.source))?;
            Ok((rep, digest))
        }
        _ if spec.starts_with("diag:") => {
            let d: usize = spec["diag:".len()..]
                .parse()
                .ok()
                .filter(|&d| d >= 2)
                .ok_or_else(|| CliError::Usage(format!("bad dimension in '{spec}'")))?;
            let BuiltinGroup::Cyclic(n) = need_builtin()? else {
                return Err(CliError::Usage("diag:<d> applies to cyclic groups".into()));
            };
            let rep = cyclic_diagonal_rep(n, d);
            let digest = canonical(&rep, format!("builtin:z{n}/{spec}"))?;
            Ok((rep, digest))
        }
        _ => {
            let path = Path::new(spec);
            if !path.is_file() {
                return Err(CliError::Usage(format!(
                    "rep '{spec}' is neither a file nor one of builtin, builtin-2d, regular, diag:<d>"
                )));
            }
            let text = read_file(path)?;
            let rep = parse_rep(&group.group, &text)?;
            Ok((rep, InputDigest::new(file_source(path), text.as_bytes())))
        }
    }
}

/// Built-in table, a table file, or the table computed for an abelian group.
pub fn load_table(file: Option<&Path>, group: &LoadedGroup) -> CliResult<(CharacterTable, InputDigest)> {
    let (table, source) = if let Some(path) = file {
        let text = read_file(path)?;
        let table = parse_character_table(&group.group, &text)?;
        return Ok((table, InputDigest::new(file_source(path), text.as_bytes())));
    } else if let Some(b) = &group.builtin {
        (CharacterTable::for_builtin(b)?, format!("builtin:{b}"))
    } else if group.group.is_abelian() {
        (CharacterTable::abelian(&group.group)?, "derived:abelian".to_string())
    } else {
        return Err(CliError::Core(dfscodec::Error::InvalidCharacterTable(
            "non-abelian group from a file needs --table".into(),
        )));
    };
    let text = serde_json::to_string(&CharacterTableFile::from_table(&group.group, &table))
        .map_err(dfscodec::Error::from)?;
    Ok((table, InputDigest::new(source, text.as_bytes())))
}
