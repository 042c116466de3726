use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Map, Value};

use eikotomo::grid::io::{grid_to_string, write_pgm};
use eikotomo::{Result, ScalarField2D};

pub const MANIFEST_VERSION: u32 = 1;

/// Writes `bytes` to a temporary file next to `path`, then renames it into
/// place.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Collects outputs and parameters of one command, then writes
/// `manifest.json` next to them.
pub struct Run {
    pub dir: PathBuf,
    started: Instant,
    files: Vec<String>,
    timings: Map<String, Value>,
    extra: Map<String, Value>,
}

impl Run {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            started: Instant::now(),
            files: Vec::new(),
            timings: Map::new(),
            extra: Map::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        atomic_write(&path, bytes)?;
        self.files.push(name.to_string());
        Ok(path)
    }

    /// `<stem>.grid` plus a `<stem>.pgm` preview.
    pub fn write_field(&mut self, stem: &str, field: &ScalarField2D) -> Result<PathBuf> {
        let path = self.write(&format!("{stem}.grid"), grid_to_string(field).as_bytes())?;
        let mut pgm = Vec::new();
        write_pgm(field, &mut pgm)?;
        self.write(&format!("{stem}.pgm"), &pgm)?;
        Ok(path)
    }

    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let out = f()?;
        self.timings.insert(stage.into(), json!(t.elapsed().as_secs_f64()));
        Ok(out)
    }

    pub fn record(&mut self, key: &str, value: Value) {
        self.extra.insert(key.into(), value);
    }

    pub fn finish(mut self, command: &str, parameters: Value) -> Result<PathBuf> {
        self.timings.insert("total".into(), json!(self.started.elapsed().as_secs_f64()));
        let manifest = json!({
            "manifest_version": MANIFEST_VERSION,
            "tool": "eikotomo",
            "tool_version": env!("CARGO_PKG_VERSION"),
            "formats": {
                "grid": eikotomo::grid::io::GRID_TAG,
                "eikonal_sinogram": eikotomo::eikonal::EIK_SINO_TAG,
            },
            "command": command,
            "argv": std::env::args().collect::<Vec<_>>(),
            "parameters": parameters,
            "results": Value::Object(std::mem::take(&mut self.extra)),
            "timings_s": Value::Object(std::mem::take(&mut self.timings)),
            "files": self.files,
        });
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
        let path = self.dir.join("manifest.json");
        atomic_write(&path, text.as_bytes())?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_content_and_leaves_no_temp() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        atomic_write(&p, b"one").unwrap();
        atomic_write(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1);
    }
}
