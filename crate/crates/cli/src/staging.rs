//! Outputs are written beside their final paths and moved into place only
//! when a command succeeds; on failure the partial files are removed.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

#[derive(Debug)]
struct Staged {
    temp: PathBuf,
    target: PathBuf,
    is_dir: bool,
}

#[derive(Debug)]
pub struct Staging {
    staged: Vec<Staged>,
    created_dirs: Vec<PathBuf>,
    committed: bool,
    /// Input paths, which outputs may not overwrite.
    inputs: Vec<PathBuf>,
}

fn temp_name(target: &Path) -> Result<PathBuf> {
    let name = target
        .file_name()
        .with_context(|| format!("output path {} has no file name", target.display()))?;
    Ok(target.with_file_name(format!(".{}.partial", name.to_string_lossy())))
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (fs::canonicalize(a), fs::canonicalize(b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

impl Staging {
    pub fn new(inputs: &[&Path]) -> Self {
        Staging {
            staged: Vec::new(),
            created_dirs: Vec::new(),
            committed: false,
            inputs: inputs.iter().map(|p| p.to_path_buf()).collect(),
        }
    }

    fn prepare(&mut self, target: &Path) -> Result<PathBuf> {
        if let Some(input) = self
            .inputs
            .iter()
            .find(|i| same_file(i, target) || i.starts_with(target))
        {
            bail!("output {} would overwrite input {}", target.display(), input.display());
        }
        if let Some(parent) = target.parent().filter(|p| !p.as_os_str().is_empty()) {
            let mut missing = Vec::new();
            let mut cur = Some(parent);
            while let Some(dir) = cur.filter(|d| !d.as_os_str().is_empty() && !d.exists()) {
                missing.push(dir.to_path_buf());
                cur = dir.parent();
            }
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
            self.created_dirs.extend(missing);
        }
        let temp = temp_name(target)?;
        if temp.is_dir() {
            fs::remove_dir_all(&temp).with_context(|| format!("clearing {}", temp.display()))?;
        } else if temp.exists() {
            fs::remove_file(&temp).with_context(|| format!("clearing {}", temp.display()))?;
        }
        Ok(temp)
    }

    /// A temporary file path that becomes `target` on commit.
    pub fn file(&mut self, target: &Path) -> Result<PathBuf> {
        if target.is_dir() {
            bail!("output {} is a directory", target.display());
        }
        let temp = self.prepare(target)?;
        self.staged.push(Staged {
            temp: temp.clone(),
            target: target.to_path_buf(),
            is_dir: false,
        });
        Ok(temp)
    }

    /// A fresh temporary directory that replaces `target` on commit.
    ///
    /// An existing `target` is only replaced when every entry in it is a
    /// plain file whose extension is in `owned`, so a mistyped path cannot
    /// wipe an unrelated directory.
    pub fn dir(&mut self, target: &Path, owned: &[&str]) -> Result<PathBuf> {
        if target.exists() {
            if !target.is_dir() {
                bail!("output {} exists and is not a directory", target.display());
            }
            for entry in fs::read_dir(target).with_context(|| format!("reading {}", target.display()))? {
                let path = entry.with_context(|| format!("reading {}", target.display()))?.path();
                let ours = path.is_file()
                    && path
                        .extension()
                        .and_then(|e| e.to_str())
                        .is_some_and(|e| owned.contains(&e));
                if !ours {
                    bail!(
                        "refusing to replace {}: it holds unrelated entry {}",
                        target.display(),
                        path.display()
                    );
                }
            }
        }
        let temp = self.prepare(target)?;
        fs::create_dir(&temp).with_context(|| format!("creating {}", temp.display()))?;
        self.staged.push(Staged {
            temp: temp.clone(),
            target: target.to_path_buf(),
            is_dir: true,
        });
        Ok(temp)
    }

    /// Moves every staged output into place.
    pub fn commit(mut self) -> Result<()> {
        for s in &self.staged {
            if s.is_dir && s.target.exists() {
                fs::remove_dir_all(&s.target).with_context(|| format!("replacing {}", s.target.display()))?;
            }
            fs::rename(&s.temp, &s.target).with_context(|| format!("writing {}", s.target.display()))?;
        }
        self.committed = true;
        Ok(())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for s in &self.staged {
            let _ = if s.is_dir {
                fs::remove_dir_all(&s.temp)
            } else {
                fs::remove_file(&s.temp)
            };
        }
        for dir in &self.created_dirs {
            let _ = fs::remove_dir(dir);
        }
    }
}
