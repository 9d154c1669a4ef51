// SPDX-License-Identifier: Apache-2.0

//! Corpus manifests: one `role<TAB>path` line per file, `#` comments,
//! paths relative to the manifest.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ProxyError, ProxyPair, ProxyStrings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProxyRole {
    W,
    X,
    Y,
    Z,
    P,
    Q,
}

impl ProxyRole {
    pub const ALL: [ProxyRole; 6] = [
        ProxyRole::W,
        ProxyRole::X,
        ProxyRole::Y,
        ProxyRole::Z,
        ProxyRole::P,
        ProxyRole::Q,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProxyRole::W => "w",
            ProxyRole::X => "x",
            ProxyRole::Y => "y",
            ProxyRole::Z => "z",
            ProxyRole::P => "p",
            ProxyRole::Q => "q",
        }
    }
}

impl fmt::Display for ProxyRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProxyRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown role {s:?}, expected one of w x y z p q"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusFile {
    pub role: ProxyRole,
    /// Path as written in the manifest.
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    files: Vec<CorpusFile>,
}

impl Corpus {
    pub fn new(files: Vec<CorpusFile>) -> Self {
        Self { files }
    }

    /// Parses a manifest without reading the files it names.
    pub fn parse_manifest(text: &str) -> Result<Vec<(ProxyRole, String)>, ProxyError> {
        let mut out = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| ProxyError::Manifest { line: i + 1, message };
            let (role, path) = line
                .split_once('\t')
                .ok_or_else(|| err("expected role<TAB>path".to_string()))?;
            let role = role.trim().parse().map_err(err)?;
            let path = path.trim();
            if path.is_empty() {
                return Err(err("empty path".to_string()));
            }
            out.push((role, path.to_string()));
        }
        Ok(out)
    }

    pub fn load(manifest: &Path) -> Result<Self, ProxyError> {
        let io = |p: &Path, e: std::io::Error| ProxyError::Io {
            path: p.display().to_string(),
            message: e.to_string(),
        };
        let text = std::fs::read_to_string(manifest).map_err(|e| io(manifest, e))?;
        let base = manifest.parent().unwrap_or(Path::new("."));
        let files = Self::parse_manifest(&text)?
            .into_iter()
            .map(|(role, name)| {
                let path = base.join(&name);
                let bytes = std::fs::read(&path).map_err(|e| io(&path, e))?;
                Ok(CorpusFile { role, name, bytes })
            })
            .collect::<Result<Vec<_>, ProxyError>>()?;
        Ok(Self { files })
    }

    /// The 20-file corpus shipped with the crate.
    pub fn bundled_manifest() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("data/corpus/manifest.tsv")
    }

    pub fn bundled() -> Result<Self, ProxyError> {
        Self::load(&Self::bundled_manifest())
    }

    pub fn files(&self) -> &[CorpusFile] {
        &self.files
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    /// Concatenation, in manifest order, of the files with `role`.
    pub fn role_bytes(&self, role: ProxyRole) -> Option<Vec<u8>> {
        let mut it = self.files.iter().filter(|f| f.role == role).peekable();
        it.peek()?;
        Some(it.flat_map(|f| f.bytes.iter().copied()).collect())
    }

    /// Network strings and pair; missing w, z or q are empty, missing x, y
    /// or p are an error.
    pub fn strings_and_pair(&self) -> Result<(ProxyStrings, ProxyPair), ProxyError> {
        let need = |r: ProxyRole| self.role_bytes(r).ok_or(ProxyError::MissingRole(r.to_string()));
        let opt = |r: ProxyRole| self.role_bytes(r).unwrap_or_default();
        Ok((
            ProxyStrings {
                w: opt(ProxyRole::W),
                x: need(ProxyRole::X)?,
                y: need(ProxyRole::Y)?,
                z: opt(ProxyRole::Z),
            },
            ProxyPair {
                p: need(ProxyRole::P)?,
                q: opt(ProxyRole::Q),
            },
        ))
    }
}
