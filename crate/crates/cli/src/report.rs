use std::fmt::Write as _;

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// One tab-separated record per line: the kind, then `key=value` fields.
    Structured,
}

/// Collects findings and renders them in the chosen format.
pub struct Report {
    format: Format,
    out: String,
}

impl Report {
    pub fn new(format: Format) -> Self {
        Report { format, out: String::new() }
    }

    /// One finding. `text` is the human-readable line; empty text is structured-only.
    pub fn record(&mut self, kind: &str, fields: &[(&str, String)], text: impl AsRef<str>) {
        match self.format {
            Format::Text if text.as_ref().is_empty() => {}
            Format::Text => {
                self.out.push_str(text.as_ref());
                self.out.push('\n');
            }
            Format::Structured => {
                self.out.push_str(kind);
                for (k, v) in fields {
                    let _ = write!(self.out, "\t{k}={}", v.replace(['\t', '\n'], " "));
                }
                self.out.push('\n');
            }
        }
    }

    /// Free text shown only in text mode, such as a printed scheme or algebra.
    pub fn text(&mut self, body: impl AsRef<str>) {
        if self.format == Format::Text {
            self.out.push_str(body.as_ref());
            if !body.as_ref().ends_with('\n') {
                self.out.push('\n');
            }
        }
    }

    pub fn finish(self) -> String {
        self.out
    }
}
