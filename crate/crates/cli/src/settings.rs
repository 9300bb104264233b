//! Resolution of run settings (flags > config file > defaults) and the
//! manifest each run leaves next to its output.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};

use crate::output::write_atomic;
use crate::UsageError;

pub struct Settings {
    subcommand: &'static str,
    file: BTreeMap<String, String>,
    entries: Vec<(String, String)>,
}

impl Settings {
    /// Reads `key=value` lines from `config` if given. A `subcommand` key,
    /// as written in manifests, must name this subcommand.
    pub fn new(subcommand: &'static str, config: Option<&Path>) -> Result<Self> {
        let mut file = BTreeMap::new();
        if let Some(path) = config {
            let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            for (n, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    UsageError(format!("{}:{}: expected key=value, got {line:?}", path.display(), n + 1))
                })?;
                file.insert(k.trim().to_owned(), v.trim().to_owned());
            }
            match file.remove("subcommand") {
                Some(s) if s != subcommand => {
                    return Err(UsageError(format!("{} is a `{s}` config, not `{subcommand}`", path.display())).into())
                }
                _ => {}
            }
            file.remove("version");
        }
        Ok(Settings {
            subcommand,
            file,
            entries: Vec::new(),
        })
    }

    fn take_file<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        match self.file.remove(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| UsageError(format!("config value {key}={raw}: {e}")).into()),
        }
    }

    fn record<T: Display>(&mut self, key: &str, value: &T) {
        self.entries.push((key.to_owned(), value.to_string()));
    }

    pub fn value<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T::Err: Display,
    {
        let from_file = self.take_file(key)?;
        let v = flag.or(from_file).unwrap_or(default);
        self.record(key, &v);
        Ok(v)
    }

    pub fn required<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>) -> Result<T>
    where
        T::Err: Display,
    {
        let from_file = self.take_file(key)?;
        let v = flag
            .or(from_file)
            .ok_or_else(|| UsageError(format!("missing required setting --{key}")))?;
        self.record(key, &v);
        Ok(v)
    }

    /// Switches: a flag can only turn the setting on.
    pub fn switch(&mut self, key: &str, flag: bool) -> Result<bool> {
        self.value(key, flag.then_some(true), false)
    }

    pub fn optional<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        let from_file = self.take_file(key)?;
        let v = flag.or(from_file);
        if let Some(v) = &v {
            self.record(key, v);
        }
        Ok(v)
    }

    pub fn path(&mut self, key: &str, flag: Option<PathBuf>) -> Result<PathBuf> {
        Ok(self.required::<DisplayPath>(key, flag.map(DisplayPath))?.0)
    }

    pub fn path_or(&mut self, key: &str, flag: Option<PathBuf>, default: PathBuf) -> Result<PathBuf> {
        Ok(self.value::<DisplayPath>(key, flag.map(DisplayPath), DisplayPath(default))?.0)
    }

    pub fn optional_path(&mut self, key: &str, flag: Option<PathBuf>) -> Result<Option<PathBuf>> {
        Ok(self.optional::<DisplayPath>(key, flag.map(DisplayPath))?.map(|p| p.0))
    }

    /// Rejects leftover config keys, then writes `<output>.manifest`.
    pub fn finish(self, output: &Path) -> Result<PathBuf> {
        if let Some(k) = self.file.keys().next() {
            return Err(UsageError(format!("unknown setting `{k}` for `{}`", self.subcommand)).into());
        }
        let path = sibling(output, ".manifest");
        let mut text = format!("subcommand={}\nversion={}\n", self.subcommand, env!("CARGO_PKG_VERSION"));
        for (k, v) in &self.entries {
            text.push_str(&format!("{k}={v}\n"));
        }
        write_atomic(&path, |w| Ok(w.write_all(text.as_bytes())?))?;
        Ok(path)
    }

    /// Must run before any output is produced so bad config keys leave no
    /// partial results.
    pub fn check_consumed(&self) -> Result<()> {
        match self.file.keys().next() {
            Some(k) => Err(UsageError(format!("unknown setting `{k}` for `{}`", self.subcommand)).into()),
            None => Ok(()),
        }
    }
}

/// `path` with `suffix` appended to its file name.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

#[derive(Debug, Clone)]
struct DisplayPath(PathBuf);

impl FromStr for DisplayPath {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(DisplayPath(PathBuf::from(s)))
    }
}

impl Display for DisplayPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0.display())
    }
}

/// Comma-separated list setting.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: Display,
{
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|p| p.trim().parse::<T>().map_err(|e| format!("{p:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(List)
    }
}

impl<T: Display> Display for List<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
