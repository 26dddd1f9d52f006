use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Record of one command run, written next to its main output as
/// `<out>.manifest` in `key=value` lines.
#[derive(Debug, Default)]
pub struct RunManifest {
    pub command: &'static str,
    pub params: Vec<(String, String)>,
    pub artifacts: Vec<PathBuf>,
    pub metrics: Vec<(String, String)>,
}

impl RunManifest {
    pub fn new(command: &'static str) -> Self {
        RunManifest {
            command,
            ..Default::default()
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn metric(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.metrics.push((key.to_string(), value.to_string()));
        self
    }

    pub fn artifact(&mut self, path: &Path) -> &mut Self {
        self.artifacts.push(path.to_owned());
        self
    }

    pub fn path_for(out: &Path) -> PathBuf {
        let mut name = out.as_os_str().to_owned();
        name.push(".manifest");
        PathBuf::from(name)
    }

    pub fn render(&self, manifest_path: &Path) -> String {
        let mut out = String::new();
        writeln!(out, "command={}", self.command).unwrap();
        for (k, v) in &self.params {
            writeln!(out, "{k}={v}").unwrap();
        }
        for a in self.artifacts.iter().map(PathBuf::as_path).chain([manifest_path]) {
            writeln!(out, "artifact={}", a.display()).unwrap();
        }
        for (k, v) in &self.metrics {
            writeln!(out, "{k}={v}").unwrap();
        }
        out
    }

    /// Writes the manifest beside `out` and returns its path.
    pub fn write_beside(&self, out: &Path) -> std::io::Result<PathBuf> {
        let path = Self::path_for(out);
        fs::write(&path, self.render(&path))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_every_artifact_including_itself() {
        let mut m = RunManifest::new("gen");
        m.param("task", "xor").artifact(Path::new("xor.csv")).metric("rows", 4);
        let path = RunManifest::path_for(Path::new("xor.csv"));
        assert_eq!(path, PathBuf::from("xor.csv.manifest"));
        assert_eq!(
            m.render(&path),
            "command=gen\ntask=xor\nartifact=xor.csv\nartifact=xor.csv.manifest\nrows=4\n"
        );
    }
}
