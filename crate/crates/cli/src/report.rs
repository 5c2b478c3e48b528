//! Rendering of command results as plain text or as a structured JSON
//! document. Both forms are fully deterministic: collections print in key
//! order and every rational appears as `p/q` in lowest terms.

use clap::ValueEnum;
use serde_json::{json, Map, Value};

use privnet_core::ratio::format_ratio;
use privnet_core::resources::Resource;
use privnet_core::weights::SourceElement;

/// Output shape selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Line-oriented human-readable report.
    Text,
    /// A single JSON document.
    Structured,
}

/// The outcome of one command: printable lines, a JSON mirror, and whether
/// any declared check failed.
#[derive(Debug)]
pub struct Report {
    /// True when the command's verdict should exit nonzero.
    pub failed: bool,
    /// Text-format lines, in order.
    pub lines: Vec<String>,
    /// The same result as a JSON document.
    pub data: Value,
}

impl Report {
    /// Renders the report in the requested format, without a trailing
    /// newline.
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.lines.join("\n"),
            Format::Structured => {
                serde_json::to_string_pretty(&self.data).expect("reports serialize")
            }
        }
    }
}

/// `{w: 1/10, x: 1/5}` — a source element in label order.
pub fn element_text(element: &SourceElement) -> String {
    let body = element
        .iter()
        .map(|(label, weight)| format!("{label}: {}", format_ratio(weight)))
        .collect::<Vec<_>>()
        .join(", ");
    format!("{{{body}}}")
}

/// `{u-q → {u-sport: 1/2}}` — a resource in input order.
pub fn resource_text(resource: &Resource) -> String {
    let body = resource
        .iter()
        .map(|(input, output)| format!("{input} → {}", element_text(output)))
        .collect::<Vec<_>>()
        .join(", ");
    format!("{{{body}}}")
}

/// A source element as a JSON object of `"p/q"` strings.
pub fn element_json(element: &SourceElement) -> Value {
    let mut map = Map::new();
    for (label, weight) in element.iter() {
        map.insert(label.to_string(), json!(format_ratio(weight)));
    }
    Value::Object(map)
}

/// A resource as a nested JSON object of `"p/q"` strings.
pub fn resource_json(resource: &Resource) -> Value {
    let mut map = Map::new();
    for (input, output) in resource.iter() {
        map.insert(input.to_string(), element_json(output));
    }
    Value::Object(map)
}
