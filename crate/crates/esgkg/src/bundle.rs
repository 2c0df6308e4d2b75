//! Page-structured document bundles: the pipeline's input format.
//!
//! A bundle is the pre-extracted form of one regulatory document: plain
//! page text plus any tables recovered from it. Producing bundles from PDF
//! binaries is an upstream concern.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One table as recovered from a page. In bundle files the `page` field is
/// implied by the enclosing page and filled in on load.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTable {
    #[serde(default)]
    pub page: u32,
    #[serde(default)]
    pub header: Vec<String>,
    #[serde(default)]
    pub rows: Vec<Vec<String>>,
    #[serde(default)]
    pub continuation_hint: bool,
}

impl RawTable {
    /// Column count: header arity when a header exists, otherwise the first
    /// row's arity.
    pub fn arity(&self) -> usize {
        if !self.header.is_empty() {
            self.header.len()
        } else {
            self.rows.first().map(Vec::len).unwrap_or(0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page {
    pub number: u32,
    #[serde(default)]
    pub text: String,
    #[serde(default)]
    pub tables: Vec<RawTable>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentBundle {
    pub doc_id: String,
    #[serde(default)]
    pub title: String,
    pub pages: Vec<Page>,
}

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("bundle has no pages")]
    Empty,
    #[error("page numbers must run 1..=n contiguously; page at position {position} is {found}")]
    PageNumbering { position: usize, found: u32 },
    #[error("table on page {page} has a row of arity {row_arity} under a header of arity {header_arity}")]
    RowArity { page: u32, header_arity: usize, row_arity: usize },
    #[error("cannot read bundle {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("bundle {path} is not valid JSON: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl DocumentBundle {
    /// Validates numbering and table shape, and stamps each table with its
    /// page number.
    pub fn finalize(mut self) -> Result<DocumentBundle, BundleError> {
        if self.pages.is_empty() {
            return Err(BundleError::Empty);
        }
        for (i, page) in self.pages.iter_mut().enumerate() {
            let expected = (i + 1) as u32;
            if page.number != expected {
                return Err(BundleError::PageNumbering { position: i, found: page.number });
            }
            for table in &mut page.tables {
                table.page = page.number;
                if !table.header.is_empty() {
                    for row in &table.rows {
                        if row.len() != table.header.len() {
                            return Err(BundleError::RowArity {
                                page: page.number,
                                header_arity: table.header.len(),
                                row_arity: row.len(),
                            });
                        }
                    }
                }
            }
        }
        Ok(self)
    }

    pub fn last_page(&self) -> u32 {
        self.pages.len() as u32
    }

    pub fn page(&self, number: u32) -> Option<&Page> {
        if number >= 1 && (number as usize) <= self.pages.len() {
            Some(&self.pages[number as usize - 1])
        } else {
            None
        }
    }

    pub fn from_json(text: &str) -> Result<DocumentBundle, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<DocumentBundle, BundleError> {
        let text = std::fs::read_to_string(path).map_err(|source| BundleError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let bundle: DocumentBundle =
            serde_json::from_str(&text).map_err(|source| BundleError::Json {
                path: path.display().to_string(),
                source,
            })?;
        bundle.finalize()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finalize_rejects_gaps_in_page_numbering() {
        let bundle = DocumentBundle {
            doc_id: "d".into(),
            title: String::new(),
            pages: vec![
                Page { number: 1, text: String::new(), tables: vec![] },
                Page { number: 3, text: String::new(), tables: vec![] },
            ],
        };
        assert!(matches!(
            bundle.finalize(),
            Err(BundleError::PageNumbering { position: 1, found: 3 })
        ));
    }

    #[test]
    fn finalize_stamps_table_pages_and_checks_arity() {
        let bundle = DocumentBundle {
            doc_id: "d".into(),
            title: String::new(),
            pages: vec![Page {
                number: 1,
                text: String::new(),
                tables: vec![RawTable {
                    page: 0,
                    header: vec!["a".into(), "b".into()],
                    rows: vec![vec!["1".into(), "2".into()]],
                    continuation_hint: false,
                }],
            }],
        };
        let bundle = bundle.finalize().unwrap();
        assert_eq!(bundle.pages[0].tables[0].page, 1);

        let bad = DocumentBundle {
            doc_id: "d".into(),
            title: String::new(),
            pages: vec![Page {
                number: 1,
                text: String::new(),
                tables: vec![RawTable {
                    page: 0,
                    header: vec!["a".into(), "b".into()],
                    rows: vec![vec!["1".into()]],
                    continuation_hint: false,
                }],
            }],
        };
        assert!(matches!(bad.finalize(), Err(BundleError::RowArity { .. })));
    }
}
