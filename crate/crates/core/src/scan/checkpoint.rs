use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::identity::BasePair;

/// Resumable scan progress, stored as the single line
/// `<a> <b> <last_prime_done> <cap>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checkpoint {
    pub a: i64,
    pub b: i64,
    pub last_prime_done: u64,
    pub cap: u32,
}

impl Checkpoint {
    pub fn parse(line: &str) -> Result<Checkpoint> {
        let bad = || Error::Checkpoint(format!("malformed checkpoint line {line:?}"));
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(bad());
        }
        Ok(Checkpoint {
            a: fields[0].parse().map_err(|_| bad())?,
            b: fields[1].parse().map_err(|_| bad())?,
            last_prime_done: fields[2].parse().map_err(|_| bad())?,
            cap: fields[3].parse().map_err(|_| bad())?,
        })
    }

    pub fn to_line(&self) -> String {
        format!(
            "{} {} {} {}\n",
            self.a, self.b, self.last_prime_done, self.cap
        )
    }

    /// `Ok(None)` when there is no file yet.
    pub fn load(path: &Path) -> Result<Option<Checkpoint>> {
        match fs::read_to_string(path) {
            Ok(s) => Checkpoint::parse(s.trim()).map(Some),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(Error::Checkpoint(format!("{}: {e}", path.display()))),
        }
    }

    /// Writes through a temporary file and a rename so a crash never
    /// leaves a torn line.
    pub fn store(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, self.to_line())
            .and_then(|_| fs::rename(&tmp, path))
            .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))
    }

    pub fn validate_for(&self, pair: BasePair) -> Result<()> {
        if (self.a, self.b) != (pair.a(), pair.b()) {
            return Err(Error::Checkpoint(format!(
                "checkpoint is for ({}, {}), scan is for {pair}",
                self.a, self.b
            )));
        }
        Ok(())
    }
}
