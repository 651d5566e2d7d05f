// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Files are written with a `.partial` suffix and renamed together by
/// [`OutputDir::commit`] once the command has succeeded.
pub struct OutputDir {
    dir: PathBuf,
    pending: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            pending: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        let partial = partial_path(&path);
        let mut f =
            fs::File::create(&partial).with_context(|| format!("writing {}", partial.display()))?;
        f.write_all(contents.as_bytes())?;
        self.pending.push(path);
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(name, &s)
    }

    pub fn commit(self) -> Result<Vec<PathBuf>> {
        for p in &self.pending {
            fs::rename(partial_path(p), p)
                .with_context(|| format!("finalizing {}", p.display()))?;
        }
        Ok(self.pending)
    }
}

fn partial_path(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".partial");
    PathBuf::from(s)
}

/// CSV text with shortest round-trip formatting of every value.
pub fn csv<R: AsRef<[f64]>>(header: &[&str], rows: impl IntoIterator<Item = R>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        let cells: Vec<String> = r.as_ref().iter().map(|v| format!("{v}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}
