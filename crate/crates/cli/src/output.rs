//! Writing text, JSON and CSV to a file or stdout.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::CliError;

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.map_or("<stdout>".into(), |p| p.display().to_string()),
        source,
    };
    match path {
        Some(p) => fs::write(p, text).map_err(io),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(io),
    }
}

/// Shortest round-trip decimal (exponent form for very small or large
/// magnitudes); non-finite values as `inf`, `-inf`, `NaN`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        ryu::Buffer::new().format_finite(x).to_string()
    } else {
        format!("{x}")
    }
}

/// Builds CSV text from a header and rows of preformatted fields.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(header.iter().map(|h| h.as_ref()))
            .expect("in-memory write");
        Table { writer }
    }

    pub fn row<S: AsRef<[u8]>, I: IntoIterator<Item = S>>(&mut self, fields: I) {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn finish(self) -> String {
        let bytes = self.writer.into_inner().expect("in-memory flush");
        String::from_utf8(bytes).expect("fields are UTF-8")
    }
}
