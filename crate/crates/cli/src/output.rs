//! Table and JSON rendering.

use serde_json::Value;

use crate::config::Format;
use crate::engine::Outcome;

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn json_document(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values serialize");
    s.push('\n');
    s
}

pub fn render(outcome: &Outcome, format: Format) -> String {
    match format {
        Format::Csv => csv_table(outcome.header, &outcome.rows),
        Format::Json => json_document(&outcome.json),
    }
}
