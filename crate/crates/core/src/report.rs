//! Deterministic serialization of reports.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{LabError, Result};

/// Pretty JSON with object keys sorted, terminated by a newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json::Value keeps maps in a BTreeMap, which sorts keys
    let tree = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&tree)?;
    s.push('\n');
    Ok(s)
}

/// Writes `contents` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| LabError::Parse(format!("{}: {e}", path.display()));
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let file_name = path
        .file_name()
        .ok_or_else(|| LabError::Parse(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", file_name.to_string_lossy(), std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(contents).map_err(io)?;
    f.sync_all().map_err(io)?;
    drop(f);
    fs::rename(&tmp, path).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rat, JsonRational};

    #[derive(Serialize)]
    struct Unsorted {
        zeta: u8,
        alpha: JsonRational,
    }

    #[test]
    fn keys_are_sorted_and_output_is_stable() {
        let v = Unsorted {
            zeta: 1,
            alpha: JsonRational(rat(1, 3)),
        };
        let a = to_json(&v).unwrap();
        assert_eq!(a, to_json(&v).unwrap());
        assert!(a.find("alpha").unwrap() < a.find("zeta").unwrap());
        assert!(a.find("\"den\"").unwrap() < a.find("\"num\"").unwrap());
    }
}
