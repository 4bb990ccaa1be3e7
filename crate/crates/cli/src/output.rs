//! CSV rendering and on-disk artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

/// Full-precision float cell.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// In-memory CSV with LF line endings.
#[derive(Debug, Clone)]
pub struct Csv {
    columns: usize,
    buf: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            columns: header.len(),
            buf: format!("{}\n", header.join(",")),
        }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut n = 0;
        for (i, c) in cells.into_iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            self.buf.push_str(c.as_ref());
            n += 1;
        }
        debug_assert_eq!(n, self.columns, "row width differs from header");
        self.buf.push('\n');
    }

    pub fn into_artifact(self, name: &str) -> Artifact {
        Artifact {
            name: name.to_string(),
            bytes: self.buf.into_bytes(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct Written {
    /// Path relative to the output root, `/`-separated.
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// Writes `artifact` under `root/sub` and returns its record.
pub fn write_artifact(root: &Path, sub: Option<&str>, artifact: &Artifact) -> std::io::Result<Written> {
    let dir: PathBuf = match sub {
        Some(s) => root.join(s),
        None => root.to_path_buf(),
    };
    fs::create_dir_all(&dir)?;
    fs::write(dir.join(&artifact.name), &artifact.bytes)?;
    let file = match sub {
        Some(s) => format!("{s}/{}", artifact.name),
        None => artifact.name.clone(),
    };
    Ok(Written {
        file,
        sha256: sha256_hex(&artifact.bytes),
        bytes: artifact.bytes.len(),
    })
}
