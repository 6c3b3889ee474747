//! On-disk cache of the four coefficient tables.
//!
//! One JSON file per key. Every table is stored verbatim next to the SHA-256 of its
//! text, so a damaged or edited file is caught before its numbers are used.

use std::fs;
use std::path::{Path, PathBuf};

use cardwave::wavelet_system::CoefficientMode;
use cardwave::{BuildOptions, CoefficientKind, CoefficientTable, Stage, WaveletSystem};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

use crate::failure::Failure;

pub const CACHE_SCHEMA_VERSION: u32 = 1;
pub const CACHE_DIR_ENV: &str = "CARDWAVE_CACHE_DIR";

const KINDS: [CoefficientKind; 4] = [
    CoefficientKind::C,
    CoefficientKind::B,
    CoefficientKind::A,
    CoefficientKind::Gamma,
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheKey {
    pub m: u32,
    pub eps: f64,
    pub nodes: usize,
    pub depth: usize,
    pub mode: CoefficientMode,
    pub version: String,
}

impl CacheKey {
    pub fn new(m: u32, opts: &BuildOptions) -> Self {
        CacheKey {
            m,
            eps: opts.eps,
            nodes: opts.nodes,
            depth: opts.depth,
            mode: opts.mode,
            version: cardwave::VERSION.to_string(),
        }
    }

    fn file_name(&self) -> String {
        let mode = match self.mode {
            CoefficientMode::Quadrature => "quadrature",
            CoefficientMode::Series => "series",
        };
        format!(
            "tables-m{}-eps{:e}-n{}-d{}-{mode}-v{}.json",
            self.m, self.eps, self.nodes, self.depth, self.version
        )
    }
}

#[derive(Serialize, Deserialize)]
struct CachedTable {
    kind: CoefficientKind,
    sha256: String,
    table: Box<RawValue>,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    schema_version: u32,
    key: CacheKey,
    tables: Vec<CachedTable>,
}

fn stage_of(kind: CoefficientKind) -> Stage {
    match kind {
        CoefficientKind::C => Stage::CTable,
        CoefficientKind::B => Stage::BTable,
        CoefficientKind::A => Stage::ATable,
        CoefficientKind::Gamma => Stage::GammaTable,
    }
}

fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    /// `explicit`, else the environment override, else a directory under the system temp dir.
    pub fn locate(explicit: Option<&Path>) -> Self {
        let dir = explicit
            .map(Path::to_path_buf)
            .or_else(|| {
                std::env::var_os(CACHE_DIR_ENV)
                    .filter(|v| !v.is_empty())
                    .map(PathBuf::from)
            })
            .unwrap_or_else(|| std::env::temp_dir().join("cardwave-cache"));
        Cache { dir }
    }

    pub fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    /// Tables for `key` in the order `c, b, a, γ`, or `None` when nothing is cached.
    pub fn load(&self, key: &CacheKey) -> Result<Option<[CoefficientTable; 4]>, Failure> {
        let path = self.path(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Failure::Io(format!("cache: cannot read {}: {e}", path.display()))),
        };
        let file: CacheFile = serde_json::from_str(&text)
            .map_err(|e| Failure::Io(format!("cache: {} is not a valid cache file: {e}", path.display())))?;
        if file.schema_version != CACHE_SCHEMA_VERSION || file.key != *key {
            return Err(Failure::Io(format!(
                "cache: {} is stale (written for {:?}); delete it or pass --refresh-cache",
                path.display(),
                file.key
            )));
        }
        if file.tables.len() != KINDS.len() {
            return Err(Failure::Io(format!(
                "cache: {} holds {} tables, expected {}",
                path.display(),
                file.tables.len(),
                KINDS.len()
            )));
        }
        let mut out = Vec::with_capacity(KINDS.len());
        for (entry, kind) in file.tables.iter().zip(KINDS) {
            let stage = stage_of(kind);
            if entry.kind != kind {
                return Err(Failure::Io(format!(
                    "cache ({stage}): {} lists a {} table in the {kind} slot",
                    path.display(),
                    entry.kind
                )));
            }
            if digest(entry.table.get()) != entry.sha256 {
                return Err(Failure::Io(format!(
                    "cache ({stage}): checksum mismatch in {}; delete it or pass --refresh-cache",
                    path.display()
                )));
            }
            let table: CoefficientTable =
                serde_json::from_str(entry.table.get()).map_err(|e| Failure::Io(format!("cache ({stage}): {e}")))?;
            out.push(table);
        }
        Ok(Some(out.try_into().expect("four tables")))
    }

    pub fn store(&self, key: &CacheKey, sys: &WaveletSystem) -> Result<PathBuf, Failure> {
        let mut tables = Vec::with_capacity(KINDS.len());
        for kind in KINDS {
            let text = serde_json::to_string(sys.table(kind))?;
            tables.push(CachedTable {
                kind,
                sha256: digest(&text),
                table: RawValue::from_string(text)?,
            });
        }
        let file = CacheFile {
            schema_version: CACHE_SCHEMA_VERSION,
            key: key.clone(),
            tables,
        };
        fs::create_dir_all(&self.dir)?;
        let path = self.path(key);
        // write then rename, so readers never see half a file
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, serde_json::to_string_pretty(&file)?)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }
}
