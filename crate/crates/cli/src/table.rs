use std::path::Path;

use sha2::{Digest, Sha256};

use crate::CliError;

/// One CSV output: a header and rows of already formatted cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    /// File stem; the file is `<name>.csv`.
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width in {}", self.name);
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| CliError::Other(e.to_string()))
    }

    /// Writes the table into `dir` and returns its sha256 digest.
    pub fn write(&self, dir: &Path) -> Result<String, CliError> {
        let bytes = self.to_bytes()?;
        std::fs::write(dir.join(self.file_name()), &bytes)?;
        Ok(digest(&bytes))
    }

    /// Column `col` of every row.
    pub fn column(&self, col: &str) -> Option<Vec<&str>> {
        let k = self.header.iter().position(|h| h == col)?;
        Some(self.rows.iter().map(|r| r[k].as_str()).collect())
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// CSV rendering of a value. Floats use plain notation in `[1e-4, 1e15)` and
/// exponent notation elsewhere; both round-trip exactly.
pub trait Cell {
    fn cell(&self) -> String;
}

impl Cell for f64 {
    fn cell(&self) -> String {
        let a = self.abs();
        if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
            self.to_string()
        } else {
            format!("{self:e}")
        }
    }
}

macro_rules! display_cell {
    ($($t:ty),*) => { $(impl Cell for $t { fn cell(&self) -> String { self.to_string() } })* };
}
display_cell!(u8, u32, u64, usize, i64, bool, str, String);

impl<T: Cell + ?Sized> Cell for &T {
    fn cell(&self) -> String {
        (**self).cell()
    }
}

/// Builds a row of cells.
#[macro_export]
macro_rules! row {
    ($($v:expr),* $(,)?) => { vec![$($crate::table::Cell::cell(&$v)),*] };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_bytes_and_digest_are_stable() {
        let mut t = Table::new("x", &["a", "b"]);
        t.push(row![1u32, 0.5]);
        t.push(row!["q,r", true]);
        let b = t.to_bytes().unwrap();
        assert_eq!(String::from_utf8(b.clone()).unwrap(), "a,b\n1,0.5\n\"q,r\",true\n");
        assert_eq!(digest(&b).len(), 64);
        assert_eq!(t.column("b").unwrap(), vec!["0.5", "true"]);
        assert_eq!(row![1.5e-16, 2e20, 0.25, 0.0], vec!["1.5e-16", "2e20", "0.25", "0"]);
    }
}
