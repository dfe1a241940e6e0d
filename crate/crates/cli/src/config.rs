//! Flat `key = value` config files. Values fill in flags that were not given
//! on the command line; keys the subcommand does not know are rejected.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::usage(format!("config line {}: expected key = value", i + 1))
            })?;
            let key = k.trim().to_string();
            if key.is_empty() {
                return Err(CliError::usage(format!("config line {}: empty key", i + 1)));
            }
            let v = v.trim();
            let v = v
                .strip_prefix('"')
                .and_then(|v| v.strip_suffix('"'))
                .unwrap_or(v);
            if values.insert(key.clone(), v.to_string()).is_some() {
                return Err(CliError::usage(format!("config key {key} given twice")));
            }
        }
        Ok(Self { values })
    }

    /// Flag value if present, otherwise the config value for `key`.
    pub fn merge(&mut self, key: &str, flag: Option<String>) -> Option<String> {
        let from_file = self.values.remove(key);
        flag.or(from_file)
    }

    /// Fails on any key no subcommand option consumed.
    pub fn finish(self) -> Result<(), CliError> {
        match self.values.keys().next() {
            None => Ok(()),
            Some(k) => Err(CliError::usage(format!("unknown config key {k}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let mut c =
            ConfigFile::parse("# comment\nfamily = K\n\nfield=dx\nic = \"y=1,phi=0\"\n").unwrap();
        assert_eq!(c.merge("family", Some("N".into())).as_deref(), Some("N"));
        assert_eq!(c.merge("field", None).as_deref(), Some("dx"));
        assert_eq!(c.merge("ic", None).as_deref(), Some("y=1,phi=0"));
        assert_eq!(c.merge("tol", None), None);
        assert!(c.finish().is_ok());
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        let mut c = ConfigFile::parse("family = K\ncolour = red\n").unwrap();
        c.merge("family", None);
        assert!(c.finish().is_err());
        assert!(ConfigFile::parse("no equals sign").is_err());
        assert!(ConfigFile::parse("a = 1\na = 2").is_err());
        assert!(ConfigFile::parse(" = 1").is_err());
    }
}
