//! Flat `key = value` configuration merged under command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

/// Resolved settings with error collection, so every bad field is reported at once.
#[derive(Debug, Default)]
pub struct Fields {
    values: BTreeMap<String, String>,
    errors: Vec<String>,
}

/// Parses a config file body. Blank lines and `#` comments are skipped.
pub fn parse_file(body: &str) -> Result<Vec<(String, String)>, Vec<String>> {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    for (i, raw) in body.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() => {
                out.push((k.trim().trim_start_matches("--").to_string(), v.trim().to_string()))
            }
            _ => errors.push(format!("config line {}: expected `key = value`, got `{raw}`", i + 1)),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

impl Fields {
    /// Layers defaults, then the config file, then explicit flags.
    pub fn layered(
        known: &[&str],
        defaults: &[(&str, &str)],
        config: Option<&Path>,
        flags: &[(String, String)],
    ) -> Fields {
        let mut f = Fields::default();
        for (k, v) in defaults {
            f.values.insert(k.to_string(), v.to_string());
        }
        if let Some(path) = config {
            match fs::read_to_string(path).map_err(|e| vec![format!("--config {}: {e}", path.display())]) {
                Ok(body) => match parse_file(&body) {
                    Ok(pairs) => {
                        for (k, v) in pairs {
                            if known.contains(&k.as_str()) {
                                f.values.insert(k, v);
                            } else {
                                f.errors.push(format!("config: unknown key `{k}`"));
                            }
                        }
                    }
                    Err(e) => f.errors.extend(e),
                },
                Err(e) => f.errors.extend(e),
            }
        }
        for (k, v) in flags {
            f.values.insert(k.clone(), v.clone());
        }
        f
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Parsed value or `None`, recording a message naming the flag on failure.
    pub fn get<T>(&mut self, key: &str, parse: impl FnOnce(&str) -> Result<T, String>) -> Option<T> {
        match self.values.get(key) {
            None => {
                self.errors.push(format!("--{key}: required"));
                None
            }
            Some(v) => match parse(v) {
                Ok(t) => Some(t),
                Err(e) => {
                    self.errors.push(format!("--{key}: {e}"));
                    None
                }
            },
        }
    }

    pub fn opt<T>(&mut self, key: &str, parse: impl FnOnce(&str) -> Result<T, String>) -> Option<T> {
        if self.values.contains_key(key) {
            self.get(key, parse)
        } else {
            None
        }
    }

    pub fn flag(&mut self, key: &str) -> bool {
        self.opt(key, |v| match v {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            _ => Err(format!("`{v}` is not a boolean")),
        })
        .unwrap_or(false)
    }

    pub fn error(&mut self, msg: String) {
        self.errors.push(msg);
    }

    pub fn finish(self) -> Result<(), Vec<String>> {
        if self.errors.is_empty() {
            Ok(())
        } else {
            Err(self.errors)
        }
    }
}

pub fn parse_num<T: std::str::FromStr>(v: &str) -> Result<T, String> {
    v.trim().parse().map_err(|_| format!("`{v}` is not a valid number"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_syntax() {
        let pairs = parse_file("# comment\nseed = 7\n\n--reps=3 # trailing\n").unwrap();
        assert_eq!(pairs, vec![("seed".into(), "7".into()), ("reps".into(), "3".into())]);
        assert_eq!(parse_file("a = 1\nbroken\n=2").unwrap_err().len(), 2);
    }

    #[test]
    fn flags_override_file_and_errors_accumulate() {
        let dir = std::env::temp_dir().join(format!("qse-config-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        fs::write(&path, "seed = 3\nreps = 4\nbogus = 1\n").unwrap();
        let mut f = Fields::layered(
            &["seed", "reps", "beta"],
            &[("seed", "1"), ("beta", "0.5")],
            Some(&path),
            &[("reps".into(), "x".into())],
        );
        assert_eq!(f.get("seed", parse_num::<u64>), Some(3));
        assert_eq!(f.get("reps", parse_num::<usize>), None);
        assert_eq!(f.get("beta", parse_num::<f64>), Some(0.5));
        let errs = f.finish().unwrap_err();
        assert_eq!(errs.len(), 2, "{errs:?}");
        assert!(errs.iter().any(|e| e.contains("bogus")));
        assert!(errs.iter().any(|e| e.starts_with("--reps")));
        fs::remove_dir_all(dir).unwrap();
    }
}
