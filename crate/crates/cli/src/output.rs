//! Outputs go through a temporary file in the destination directory and are
//! renamed into place, so a failed run never leaves a partial file.

use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::Failure;

fn io(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn staged(path: &Path, contents: &str) -> Result<NamedTempFile, Failure> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| io(path, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| io(path, e))?;
    tmp.flush().map_err(|e| io(path, e))?;
    Ok(tmp)
}

/// Writes every `(path, contents)` pair or none of them.
pub fn write_all(files: &[(PathBuf, String)]) -> Result<(), Failure> {
    let tmps = files.iter().map(|(p, c)| staged(p, c)).collect::<Result<Vec<_>, _>>()?;
    let mut done: Vec<&Path> = Vec::new();
    for (tmp, (path, _)) in tmps.into_iter().zip(files) {
        if let Err(e) = tmp.persist(path) {
            for p in done {
                let _ = std::fs::remove_file(p);
            }
            return Err(io(path, e.error));
        }
        done.push(path);
    }
    Ok(())
}

/// To `out` when given, else to standard output.
pub fn emit(out: Option<&Path>, contents: String) -> Result<(), Failure> {
    match out {
        Some(p) => write_all(&[(p.to_path_buf(), contents)]),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}
