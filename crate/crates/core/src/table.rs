//! Shared CSV reading for the input file formats: exact header match,
//! `#` comment lines, and line-numbered field errors.

use std::io::Read;
use std::str::FromStr;

use csv::{ReaderBuilder, StringRecord, Trim};

use crate::{Error, Result};

pub(crate) struct Row {
    pub line: u64,
    record: StringRecord,
    header: &'static [&'static str],
}

impl Row {
    pub fn field(&self, name: &str) -> &str {
        let idx = self
            .header
            .iter()
            .position(|h| *h == name)
            .expect("field name belongs to the header");
        self.record.get(idx).unwrap_or("")
    }

    pub fn parse<T: FromStr>(&self, name: &str) -> Result<T> {
        let raw = self.field(name);
        raw.parse()
            .map_err(|_| Error::parse(self.line, name, format!("cannot parse `{raw}`")))
    }

    pub fn error(&self, name: &str, message: impl Into<String>) -> Error {
        Error::parse(self.line, name, message)
    }
}

pub(crate) fn read_rows<R: Read>(mut source: R, header: &'static [&'static str]) -> Result<Vec<Row>> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let mut lines = Vec::new();
    let mut kept = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let t = l.trim();
        if !t.is_empty() && !t.starts_with('#') {
            lines.push(i as u64 + 1);
            kept.push(l);
        }
    }
    let text = kept.join("\n");
    let mut lines = lines.into_iter();
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .trim(Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let expected = header.join(",");
    let found = match records.next() {
        Some(record) => {
            lines.next();
            record?
        }
        None => {
            return Err(Error::Header {
                expected,
                found: String::new(),
            })
        }
    };
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Header {
            expected,
            found: found.iter().collect::<Vec<_>>().join(","),
        });
    }

    let mut rows = Vec::new();
    for record in records {
        let record = record?;
        let line = lines.next().unwrap_or(0);
        if record.len() != header.len() {
            return Err(Error::parse(
                line,
                header.get(record.len()).copied().unwrap_or("<row>"),
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        rows.push(Row {
            line,
            record,
            header,
        });
    }
    Ok(rows)
}
