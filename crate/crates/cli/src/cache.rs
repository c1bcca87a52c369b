//! On-disk cache for enumerated group tables and finished rank certificates.
//!
//! A table is stored as `<stem>.bin` (every element's image table as
//! little-endian `u32`s, in element-id order) plus a `<stem>.json` sidecar
//! holding the schema, crate version, group spec, shape, generators and a
//! SHA-256 of the binary. Results are single JSON files. All writes go
//! through a temp file in the same directory followed by a rename.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use ekrlab::{GroupTable, Permutation};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const TABLE_SCHEMA: &str = "ekrlab.group-table/1";
pub const RESULT_SCHEMA: &str = "ekrlab.result/1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CACHE_ENV: &str = "EKRLAB_CACHE";

#[derive(Serialize, Deserialize)]
struct TableMeta {
    schema: String,
    version: String,
    spec: String,
    degree: usize,
    order: usize,
    generators: Vec<Vec<u32>>,
    sha256: String,
}

#[derive(Serialize, Deserialize)]
struct ResultEntry {
    schema: String,
    version: String,
    key: String,
    value: Value,
}

pub struct Cache {
    dir: PathBuf,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn digest(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

/// `--cache-dir`, then `$EKRLAB_CACHE`, then `$XDG_CACHE_HOME/ekrlab`,
/// `$HOME/.cache/ekrlab`, and finally the system temp dir.
pub fn resolve_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    let env = |k: &str| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
    if let Some(p) = env(CACHE_ENV) {
        return p;
    }
    if let Some(p) = env("XDG_CACHE_HOME") {
        return p.join("ekrlab");
    }
    if let Some(p) = env("HOME") {
        return p.join(".cache").join("ekrlab");
    }
    std::env::temp_dir().join("ekrlab-cache")
}

impl Cache {
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn stem(kind: &str, key: &str) -> String {
        let h = digest(format!("{VERSION}\0{kind}\0{key}").as_bytes());
        format!("{kind}-{}", &h[..16])
    }

    fn write_atomic(&self, name: &str, bytes: &[u8]) -> io::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.dir.join(name)).map_err(|e| e.error)?;
        Ok(())
    }

    pub fn table_paths(&self, spec: &str) -> (PathBuf, PathBuf) {
        let stem = Self::stem("table", spec);
        (self.dir.join(format!("{stem}.bin")), self.dir.join(format!("{stem}.json")))
    }

    /// `Ok(None)` on a miss, `Err(reason)` when an entry exists but cannot be
    /// trusted.
    pub fn load_table(&self, spec: &str) -> Result<Option<GroupTable>, String> {
        let (bin, side) = self.table_paths(spec);
        let meta = match fs::read(&side) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(format!("cannot read {}: {e}", side.display())),
        };
        let meta: TableMeta = serde_json::from_slice(&meta).map_err(|e| format!("bad sidecar: {e}"))?;
        if meta.schema != TABLE_SCHEMA || meta.version != VERSION || meta.spec != spec {
            return Err(format!(
                "sidecar is for {} {} version {}",
                meta.schema, meta.spec, meta.version
            ));
        }
        let data = fs::read(&bin).map_err(|e| format!("cannot read {}: {e}", bin.display()))?;
        if data.len() != meta.order * meta.degree * 4 {
            return Err(format!("table has {} bytes, expected {}", data.len(), meta.order * meta.degree * 4));
        }
        if digest(&data) != meta.sha256 {
            return Err("checksum mismatch".into());
        }
        let words: Vec<u32> = data
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        let elements = words
            .chunks_exact(meta.degree.max(1))
            .map(|c| Permutation::new(c.to_vec()))
            .collect::<ekrlab::Result<Vec<_>>>()
            .map_err(|e| e.to_string())?;
        let generators = meta
            .generators
            .into_iter()
            .map(Permutation::new)
            .collect::<ekrlab::Result<Vec<_>>>()
            .map_err(|e| e.to_string())?;
        let table = GroupTable::from_elements(elements, generators).map_err(|e| e.to_string())?;
        if table.order() != meta.order {
            return Err("table contains duplicate elements".into());
        }
        Ok(Some(table))
    }

    pub fn store_table(&self, spec: &str, table: &GroupTable) -> io::Result<()> {
        let (bin, side) = self.table_paths(spec);
        let mut data = Vec::with_capacity(table.order() * table.degree() * 4);
        for p in table.elements() {
            for &x in p.images() {
                data.extend_from_slice(&x.to_le_bytes());
            }
        }
        let meta = TableMeta {
            schema: TABLE_SCHEMA.into(),
            version: VERSION.into(),
            spec: spec.into(),
            degree: table.degree(),
            order: table.order(),
            generators: table.generators().iter().map(|g| g.images().to_vec()).collect(),
            sha256: digest(&data),
        };
        let name = |p: &Path| p.file_name().expect("file name").to_string_lossy().into_owned();
        self.write_atomic(&name(&bin), &data)?;
        self.write_atomic(&name(&side), &serde_json::to_vec_pretty(&meta)?)
    }

    pub fn result_path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{}.json", Self::stem("result", key)))
    }

    pub fn load_result(&self, key: &str) -> Result<Option<Value>, String> {
        let path = self.result_path(key);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(format!("cannot read {}: {e}", path.display())),
        };
        let entry: ResultEntry = serde_json::from_slice(&bytes).map_err(|e| format!("bad result entry: {e}"))?;
        if entry.schema != RESULT_SCHEMA || entry.version != VERSION || entry.key != key {
            return Err("result entry does not match its key".into());
        }
        Ok(Some(entry.value))
    }

    pub fn store_result(&self, key: &str, value: &Value) -> io::Result<()> {
        let entry = ResultEntry {
            schema: RESULT_SCHEMA.into(),
            version: VERSION.into(),
            key: key.into(),
            value: value.clone(),
        };
        let path = self.result_path(key);
        let name = path.file_name().expect("file name").to_string_lossy().into_owned();
        self.write_atomic(&name, &serde_json::to_vec_pretty(&entry)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        let g = GroupTable::symmetric(4).unwrap();
        assert!(cache.load_table("sym(4)").unwrap().is_none());
        cache.store_table("sym(4)", &g).unwrap();
        let back = cache.load_table("sym(4)").unwrap().unwrap();
        assert_eq!(back.elements(), g.elements());
        assert_eq!(back.class_count(), g.class_count());
        assert!(cache.load_table("sym(5)").unwrap().is_none());
    }

    #[test]
    fn corruption_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        cache.store_table("sym(3)", &GroupTable::symmetric(3).unwrap()).unwrap();
        let (bin, _) = cache.table_paths("sym(3)");
        let mut data = fs::read(&bin).unwrap();
        data.swap(0, 4);
        fs::write(&bin, &data).unwrap();
        assert!(cache.load_table("sym(3)").unwrap_err().contains("checksum"));
        fs::write(&bin, &data[..8]).unwrap();
        assert!(cache.load_table("sym(3)").is_err());
    }

    #[test]
    fn results_are_keyed() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        let v = serde_json::json!({"rank": 42});
        cache.store_result("a", &v).unwrap();
        assert_eq!(cache.load_result("a").unwrap(), Some(v));
        assert_eq!(cache.load_result("b").unwrap(), None);
        fs::write(cache.result_path("a"), b"{").unwrap();
        assert!(cache.load_result("a").is_err());
    }
}
