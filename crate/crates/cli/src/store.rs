//! On-disk catalog cache.
//!
//! Each `(g, n)` catalog lives in `catalog-g{g}-n{n}.json` next to a
//! `.meta.json` recording the sha256 of the catalog file and the tool
//! version. A missing, stale or tampered entry is treated as absent and
//! rebuilt. Writes go through a temp file in the same directory followed
//! by a rename.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

use sgm_core::enumerate::CatalogFile;
use sgm_core::{CatalogStore, GraphCatalog};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub g: u32,
    pub n: u32,
    pub file: String,
    pub sha256: String,
    pub version: String,
}

#[derive(Debug, Clone)]
pub struct DiskStore {
    dir: PathBuf,
}

impl DiskStore {
    pub fn new(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(DiskStore { dir })
    }

    /// `$SGM_CACHE_DIR`, else the per-user cache directory.
    pub fn default_dir() -> io::Result<PathBuf> {
        if let Some(dir) = std::env::var_os("SGM_CACHE_DIR") {
            return Ok(PathBuf::from(dir));
        }
        dirs::cache_dir()
            .map(|d| d.join("sgm"))
            .ok_or_else(|| io::Error::new(io::ErrorKind::NotFound, "no cache directory; set SGM_CACHE_DIR"))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn catalog_path(&self, g: u32, n: u32) -> PathBuf {
        self.dir.join(format!("catalog-g{g}-n{n}.json"))
    }

    pub fn meta_path(&self, g: u32, n: u32) -> PathBuf {
        self.dir.join(format!("catalog-g{g}-n{n}.meta.json"))
    }

    fn write_atomic(&self, path: &Path, bytes: &[u8]) -> io::Result<()> {
        let mut tmp = NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    }

    fn read_valid(&self, g: u32, n: u32) -> Option<Vec<u8>> {
        let meta: CacheEntry = serde_json::from_slice(&fs::read(self.meta_path(g, n)).ok()?).ok()?;
        if meta.version != VERSION || meta.g != g || meta.n != n {
            return None;
        }
        let bytes = fs::read(self.catalog_path(g, n)).ok()?;
        (hex::encode(Sha256::digest(&bytes)) == meta.sha256).then_some(bytes)
    }
}

impl CatalogStore for DiskStore {
    fn load(&self, g: u32, n: u32) -> sgm_core::Result<Option<GraphCatalog>> {
        let Some(bytes) = self.read_valid(g, n) else {
            return Ok(None);
        };
        let parsed = serde_json::from_slice::<CatalogFile>(&bytes)
            .map_err(sgm_core::Error::from)
            .and_then(GraphCatalog::from_file);
        match parsed {
            Ok(c) if c.genus() == g && c.legs() == n => Ok(Some(c)),
            // the hash matched but the content does not check out; rebuild
            _ => Ok(None),
        }
    }

    fn save(&self, catalog: &GraphCatalog) -> sgm_core::Result<()> {
        let (g, n) = (catalog.genus(), catalog.legs());
        let bytes = serde_json::to_vec(&catalog.to_file())?;
        let path = self.catalog_path(g, n);
        self.write_atomic(&path, &bytes)?;
        let meta = CacheEntry {
            g,
            n,
            file: path.file_name().unwrap().to_string_lossy().into_owned(),
            sha256: hex::encode(Sha256::digest(&bytes)),
            version: VERSION.to_string(),
        };
        self.write_atomic(&self.meta_path(g, n), &serde_json::to_vec_pretty(&meta)?)?;
        Ok(())
    }
}
