//! Flat key=value parameter files: one pair per line, `#` comments.

use std::collections::BTreeMap;
use std::path::Path;

use crate::dynamics::{CompactModelParams, KremerParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct ParamFile {
    map: BTreeMap<String, String>,
}

impl ParamFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::validation(format!("params line {}: expected key = value, got '{raw}'", i + 1))
            })?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { map })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        let raw = self
            .map
            .get(key)
            .ok_or_else(|| Error::params(key, "missing from params file"))?;
        raw.parse::<f64>()
            .map_err(|_| Error::params(key, format!("not a number: '{raw}'")))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.map.get(key) {
            None => Ok(default),
            Some(raw) => raw
                .parse::<f64>()
                .map_err(|_| Error::params(key, format!("not a number: '{raw}'"))),
        }
    }

    /// First present key from `keys`, parsed as f64.
    fn f64_any(&self, keys: &[&str]) -> Result<f64> {
        for k in keys {
            if self.map.contains_key(*k) {
                return self.f64(k);
            }
        }
        Err(Error::params(keys.join("|"), "missing from params file"))
    }

    pub fn compact_model(&self) -> Result<CompactModelParams> {
        Ok(CompactModelParams {
            a: self.f64("a")?,
            b_ratio: self.f64_or("b_ratio", 0.96)?,
            m: self.f64("m")?,
            n0: self.f64("n0")?,
            s0: self.f64("s0")?,
            t_start: self.f64("t_start")?,
            t_end: self.f64("t_end")?,
        })
    }

    /// Shared by the technology-coupled models; the growth coefficient may
    /// be spelled `b` (population-coupled) or `c` (exponential).
    pub fn kremer_model(&self) -> Result<KremerParams> {
        Ok(KremerParams {
            alpha: self.f64("alpha")?,
            r_tech: self.f64("r_tech")?,
            b_or_c: self.f64_any(&["b", "c", "b_or_c"])?,
            a: self.f64("a")?,
            m: self.f64("m")?,
            g_bar: self.f64_or("g_bar", self.f64("m")? + 10.0)?,
            tech0: self.f64_or("tech0", 1.0)?,
            n0: self.f64("n0")?,
        })
    }

    pub fn span(&self) -> Result<(f64, f64)> {
        Ok((self.f64("t_start")?, self.f64("t_end")?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let p = ParamFile::parse(
            "# compact model\n\
             a = 0.000011383\n\
             m=440\n\
             \n\
             n0 = 230.82  # millions\n",
        )
        .unwrap();
        assert_eq!(p.f64("a").unwrap(), 0.000011383);
        assert_eq!(p.f64("m").unwrap(), 440.0);
        assert_eq!(p.f64("n0").unwrap(), 230.82);
    }

    #[test]
    fn missing_key_names_field() {
        let p = ParamFile::parse("a = 1\n").unwrap();
        let err = p.f64("s0").unwrap_err();
        assert!(err.to_string().contains("s0"), "{err}");
    }

    #[test]
    fn malformed_line_is_error() {
        assert!(ParamFile::parse("just words\n").is_err());
    }

    #[test]
    fn compact_model_round_trip() {
        let p = ParamFile::parse(
            "a=0.000011383\nb_ratio=0.96\nm=440\nn0=230.82\ns0=4.225\nt_start=1\nt_end=1973\n",
        )
        .unwrap();
        let params = p.compact_model().unwrap();
        assert_eq!(params.n0, 230.82);
        assert_eq!(params.t_end, 1973.0);
    }
}
