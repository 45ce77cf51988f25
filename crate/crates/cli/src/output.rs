//! CSV output with a '#'-comment metadata header.
//!
//! Header lines are `# key = value`. Parameter keys are `section.key` and
//! their values are valid TOML, so the parameter lines alone, with the `# `
//! prefix removed, form a dimensionless config that reproduces the run.
//! The unit mode of the input is deliberately not recorded: an SI config and
//! its dimensionless twin yield byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use fringe_scatter::{Error, Result};

pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(command: &str) -> Self {
        let mut text = String::new();
        writeln!(text, "# command = \"{command}\"").unwrap();
        Self { text, columns: 0 }
    }

    pub fn meta(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        writeln!(self.text, "# {key} = {value}").unwrap();
        self
    }

    pub fn params(&mut self, echo: &[(String, String)]) -> &mut Self {
        for (k, v) in echo {
            self.meta(k, v);
        }
        self
    }

    pub fn columns(&mut self, names: &[&str]) -> &mut Self {
        self.columns = names.len();
        self.text.push_str(&names.join(","));
        self.text.push('\n');
        self
    }

    pub fn row(&mut self, values: &[f64]) -> &mut Self {
        debug_assert_eq!(values.len(), self.columns);
        let cells: Vec<String> = values.iter().map(|v| format!("{v:e}")).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
        self
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Writes to `path`, or to standard output when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Recovers the `section.key = value` lines of a header as TOML text.
pub fn header_params(csv: &str) -> String {
    csv.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter(|l| l.split(" = ").next().is_some_and(|k| k.contains('.')))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_rows() {
        let mut c = Csv::new("demo");
        c.meta("params_hash", "\"ab\"")
            .params(&[("trap.separation".into(), "2e0".into())])
            .columns(&["a", "b"])
            .row(&[0.5, -1.0e-300]);
        let s = c.into_string();
        assert_eq!(
            s,
            "# command = \"demo\"\n# params_hash = \"ab\"\n# trap.separation = 2e0\na,b\n5e-1,-1e-300\n"
        );
        assert_eq!(header_params(&s), "trap.separation = 2e0\n");
    }
}
