//! Line-buffered CSV output: every row reaches the file as soon as it is
//! complete, so an interrupted run leaves only whole rows behind.

use crate::error::Result;
use std::fmt::Display;
use std::fs::File;
use std::io::{LineWriter, Write};
use std::path::Path;

pub const TRIALS_HEADER: &[&str] = &["step", "proportion"];
pub const SWEEP_HEADER: &[&str] = &["group", "step", "mean", "ci_half"];
pub const SEARCH_HEADER: &[&str] = &["puck_variant", "align_variant", "mean_final", "trials"];

pub struct CsvWriter {
    out: LineWriter<File>,
    columns: usize,
    line: String,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        let mut w = CsvWriter {
            out: LineWriter::new(File::create(path)?),
            columns: header.len(),
            line: String::new(),
        };
        w.out.write_all((header.join(",") + "\n").as_bytes())?;
        Ok(w)
    }

    /// Fields are written with their `Display` form, which for floats is
    /// the shortest round-tripping representation.
    ///
    /// # Panics
    /// If the field count differs from the header's.
    pub fn row(&mut self, fields: &[&dyn Display]) -> Result<()> {
        assert_eq!(fields.len(), self.columns, "row width must match the header");
        self.line.clear();
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.line.push(',');
            }
            self.line.push_str(&f.to_string());
        }
        self.line.push('\n');
        self.out.write_all(self.line.as_bytes())?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_land_on_disk_immediately() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut w = CsvWriter::create(&path, TRIALS_HEADER).unwrap();
        w.row(&[&0u64, &0.25f64]).unwrap();
        // not yet finished: the completed row must already be visible
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "step,proportion\n0,0.25\n");
        w.row(&[&10u64, &(1.0f64 / 3.0)]).unwrap();
        w.finish().unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().nth(2).unwrap(), "10,0.3333333333333333");
    }

    #[test]
    #[should_panic(expected = "row width")]
    fn width_mismatch_panics() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = CsvWriter::create(&dir.path().join("t.csv"), SWEEP_HEADER).unwrap();
        w.row(&[&1u8]).unwrap();
    }
}
