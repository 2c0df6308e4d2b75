//! Stage 1: structure-aware segmentation.
//!
//! Finds the table-of-contents page, parses it into section entries, and
//! cuts the document into one segment per section with cleaned text and
//! merged multi-page tables. Everything here is a pure function of the
//! bundle, so identical bundles always yield byte-identical segment files.

use std::collections::HashMap;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bundle::{DocumentBundle, RawTable};

/// Page separator used when a segment's pages are joined for cleanup.
pub const PAGE_BREAK: char = '\u{000C}';

/// Heuristic thresholds for TOC detection and text cleanup. The document
/// corpus gives no authoritative values, so these are fixed conventions
/// exposed through configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmenterConfig {
    /// Minimum page-number-terminated lines for a page to qualify as a TOC.
    pub toc_min_lines: usize,
    /// Fraction of pages on which a (digit-masked) line must repeat before
    /// it is treated as a running header or footer.
    pub header_repeat_threshold: f64,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        SegmenterConfig { toc_min_lines: 3, header_repeat_threshold: 0.6 }
    }
}

/// One parsed table-of-contents entry.
///
/// Entries normally satisfy `start_page <= end_page`. When a duplicate start
/// page forces the earlier entry to give up its pages, that entry keeps an
/// empty span encoded as `end_page = start_page - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TocEntry {
    pub number: String,
    pub title: String,
    pub start_page: u32,
    pub end_page: u32,
}

impl TocEntry {
    pub fn is_empty_span(&self) -> bool {
        self.end_page < self.start_page
    }
}

/// A TOC-aligned unit of the document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub id: String,
    pub title: String,
    /// Inclusive page span; `(s, s-1)` encodes an empty span.
    pub page_range: (u32, u32),
    pub content: String,
    #[serde(default)]
    pub tables: Vec<RawTable>,
    #[serde(default)]
    pub section_number: String,
}

/// Stage 1 output for one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentedDocument {
    pub doc_id: String,
    pub title: String,
    pub toc_page: u32,
    pub segments: Vec<Segment>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Error)]
pub enum SegmentError {
    #[error("no page qualifies as a table of contents")]
    TocNotFound,
    #[error("table of contents on page {page} yields {entries} entries; at least 2 required")]
    TocUnparseable { page: u32, entries: usize },
    #[error("page {0} is not in the bundle")]
    NoSuchPage(u32),
}

fn toc_heading_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)^\s*(table\s+of\s+)?contents\s*$").unwrap())
}

fn page_terminated_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\s*\S.*\s\d{1,4}\s*$").unwrap())
}

fn dotted_leader_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\.{2,}\s*\d{1,4}\s*$").unwrap())
}

fn page_number_line_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\s*\d{1,4}\s*$").unwrap())
}

/// Trailing page number and its preceding text, dots stripped.
fn toc_line_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^(?P<body>.*?)[\s.]*\s(?P<page>\d{1,4})\s*$").unwrap())
}

/// Leading section number such as `1`, `2.3` or `10.1.2`.
fn section_number_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\s*(?P<num>\d+(?:\.\d+)*)[.)]?\s+(?P<title>\S.*)$").unwrap())
}

/// Returns the first page matching the TOC heuristics: either a contents
/// heading plus at least `toc_min_lines` page-number-terminated lines, or
/// that many dotted-leader lines without any heading.
pub fn find_toc_page(bundle: &DocumentBundle, config: &SegmenterConfig) -> Result<u32, SegmentError> {
    for page in &bundle.pages {
        let mut has_heading = false;
        let mut terminated = 0usize;
        let mut dotted = 0usize;
        for line in page.text.lines() {
            if toc_heading_re().is_match(line) {
                has_heading = true;
                continue;
            }
            if page_number_line_re().is_match(line) {
                continue;
            }
            if page_terminated_re().is_match(line) {
                terminated += 1;
            }
            if dotted_leader_re().is_match(line) {
                dotted += 1;
            }
        }
        if (has_heading && terminated >= config.toc_min_lines) || dotted >= config.toc_min_lines {
            return Ok(page.number);
        }
    }
    Err(SegmentError::TocNotFound)
}

/// Lines whose digit-masked form repeats across at least `threshold` of the
/// bundle's pages: running headers and footers, which must not be read as
/// TOC entries.
fn repeated_lines(bundle: &DocumentBundle, threshold: f64) -> std::collections::HashSet<String> {
    let n_pages = bundle.pages.len();
    if n_pages < 2 {
        return Default::default();
    }
    let mut counts: HashMap<String, usize> = HashMap::new();
    for page in &bundle.pages {
        let mut seen = std::collections::HashSet::new();
        for line in page.text.lines() {
            let masked = mask_digits(collapse_spaces(line).as_str());
            if !masked.is_empty() && seen.insert(masked.clone()) {
                *counts.entry(masked).or_insert(0) += 1;
            }
        }
    }
    counts
        .into_iter()
        .filter(|(_, count)| *count as f64 / n_pages as f64 >= threshold)
        .map(|(line, _)| line)
        .collect()
}

/// Parses TOC lines into entries with derived end pages: each entry ends the
/// page before the next one starts, and the last entry runs to the end of
/// the bundle. Ties on start page are resolved in document order; the
/// earlier entry is emptied (see [`TocEntry`]). Running headers/footers and
/// lines pointing at or before the TOC page itself are not entries.
pub fn parse_toc(
    bundle: &DocumentBundle,
    toc_page: u32,
    config: &SegmenterConfig,
) -> Result<Vec<TocEntry>, SegmentError> {
    let page = bundle.page(toc_page).ok_or(SegmentError::NoSuchPage(toc_page))?;
    let furniture = repeated_lines(bundle, config.header_repeat_threshold);
    let mut entries: Vec<TocEntry> = Vec::new();
    for line in page.text.lines() {
        if toc_heading_re().is_match(line) || page_number_line_re().is_match(line) {
            continue;
        }
        if furniture.contains(&mask_digits(collapse_spaces(line).as_str())) {
            continue;
        }
        let Some(caps) = toc_line_re().captures(line) else { continue };
        let start_page: u32 = match caps["page"].parse() {
            Ok(p) if p > toc_page => p,
            _ => continue,
        };
        let body = caps["body"].trim();
        if body.is_empty() {
            continue;
        }
        let (number, title) = match section_number_re().captures(body) {
            Some(nc) => (nc["num"].to_string(), nc["title"].trim().to_string()),
            None => (String::new(), body.to_string()),
        };
        let title = title.trim_matches(|c: char| c == '.' || c.is_whitespace()).to_string();
        if title.is_empty() {
            continue;
        }
        entries.push(TocEntry { number, title, start_page, end_page: start_page });
    }
    if entries.len() < 2 {
        return Err(SegmentError::TocUnparseable { page: toc_page, entries: entries.len() });
    }
    entries.sort_by_key(|e| e.start_page);
    let last_page = bundle.last_page();
    let starts: Vec<u32> = entries.iter().map(|e| e.start_page).collect();
    for (i, entry) in entries.iter_mut().enumerate() {
        let declared_end = if i + 1 < starts.len() { starts[i + 1].saturating_sub(1) } else { last_page };
        entry.end_page = if declared_end < entry.start_page {
            entry.start_page - 1
        } else {
            declared_end
        };
    }
    Ok(entries)
}

/// Concatenates tables that continue across adjacent pages: same arity and
/// either equal headers or a continuation hint on the later fragment. The
/// merged table keeps the first page's number.
pub fn merge_multipage_tables(tables: Vec<RawTable>) -> Vec<RawTable> {
    let mut merged: Vec<(RawTable, u32)> = Vec::new();
    for table in tables {
        let page = table.page;
        if let Some((prev, last_page)) = merged.last_mut() {
            let adjacent = page == *last_page + 1;
            let compatible = prev.arity() == table.arity()
                && (prev.header == table.header || table.continuation_hint);
            if adjacent && compatible && prev.arity() > 0 {
                prev.rows.extend(table.rows);
                *last_page = page;
                continue;
            }
        }
        merged.push((table, page));
    }
    merged.into_iter().map(|(t, _)| t).collect()
}

fn mask_digits(line: &str) -> String {
    let mut out = String::with_capacity(line.len());
    let mut in_digits = false;
    for c in line.chars() {
        if c.is_ascii_digit() {
            if !in_digits {
                out.push('#');
                in_digits = true;
            }
        } else {
            in_digits = false;
            out.push(c);
        }
    }
    out
}

fn collapse_spaces(line: &str) -> String {
    let mut out = String::with_capacity(line.len());
    let mut in_ws = false;
    for c in line.trim().chars() {
        if c.is_whitespace() {
            if !in_ws {
                out.push(' ');
                in_ws = true;
            }
        } else {
            in_ws = false;
            out.push(c);
        }
    }
    out
}

/// Cleans the concatenated text of a page range. Pages are separated by the
/// form-feed character. Lines whose digit-masked form repeats on at least
/// `header_repeat_threshold` of the pages are treated as running
/// headers/footers and removed, as are isolated page-number lines;
/// whitespace runs collapse to single spaces and blank runs to one blank
/// line. Idempotent.
pub fn clean_text(raw: &str, header_repeat_threshold: f64) -> String {
    let pages: Vec<&str> = raw.split(PAGE_BREAK).collect();
    let n_pages = pages.len();

    let mut repeated: HashMap<String, usize> = HashMap::new();
    if n_pages >= 2 {
        for page in &pages {
            let mut seen = std::collections::HashSet::new();
            for line in page.lines() {
                let masked = mask_digits(collapse_spaces(line).as_str());
                if masked.is_empty() {
                    continue;
                }
                if seen.insert(masked.clone()) {
                    *repeated.entry(masked).or_insert(0) += 1;
                }
            }
        }
    }
    let is_repeated = |line: &str| -> bool {
        if n_pages < 2 {
            return false;
        }
        let masked = mask_digits(collapse_spaces(line).as_str());
        match repeated.get(&masked) {
            Some(&count) => count as f64 / n_pages as f64 >= header_repeat_threshold,
            None => false,
        }
    };

    let mut cleaned_pages: Vec<String> = Vec::new();
    for page in &pages {
        let mut lines: Vec<String> = Vec::new();
        let mut blank_run = false;
        for line in page.lines() {
            if page_number_line_re().is_match(line) || is_repeated(line) {
                continue;
            }
            let collapsed = collapse_spaces(line);
            if collapsed.is_empty() {
                if !blank_run && !lines.is_empty() {
                    lines.push(String::new());
                    blank_run = true;
                }
            } else {
                lines.push(collapsed);
                blank_run = false;
            }
        }
        while lines.last().map(String::is_empty).unwrap_or(false) {
            lines.pop();
        }
        if !lines.is_empty() {
            cleaned_pages.push(lines.join("\n"));
        }
    }
    cleaned_pages.join("\n\n")
}

fn sanitize_token(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') && !out.is_empty() {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

fn segment_id(index: usize, section_number: &str) -> String {
    let token = sanitize_token(section_number);
    if token.is_empty() {
        format!("seg_{:02}", index + 1)
    } else {
        format!("seg_{:02}_{}", index + 1, token)
    }
}

/// Runs the whole Stage 1 pass: TOC detection, TOC parsing, per-range text
/// and table extraction, table merging, cleanup. Sections whose pages are
/// missing from the bundle yield empty-content segments plus a warning.
pub fn segment_document(
    bundle: &DocumentBundle,
    config: &SegmenterConfig,
) -> Result<SegmentedDocument, SegmentError> {
    let toc_page = find_toc_page(bundle, config)?;
    let entries = parse_toc(bundle, toc_page, config)?;
    // Headers/footers are detected across the whole document so that even a
    // single-page segment loses its running furniture; clean_text repeats
    // the check within each page range.
    let furniture = repeated_lines(bundle, config.header_repeat_threshold);
    let strip_furniture = |text: &str| -> String {
        text.lines()
            .filter(|line| !furniture.contains(&mask_digits(collapse_spaces(line).as_str())))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let mut segments = Vec::with_capacity(entries.len());
    let mut warnings = Vec::new();
    let last = bundle.last_page();

    for (index, entry) in entries.iter().enumerate() {
        let id = segment_id(index, &entry.number);
        if entry.is_empty_span() {
            warnings.push(format!(
                "segment {id} ({}) has no pages of its own; its start page {} is shared with a later section",
                entry.title, entry.start_page
            ));
            segments.push(Segment {
                id,
                title: entry.title.clone(),
                page_range: (entry.start_page, entry.start_page - 1),
                content: String::new(),
                tables: Vec::new(),
                section_number: entry.number.clone(),
            });
            continue;
        }

        let available_end = entry.end_page.min(last);
        if entry.start_page > last {
            warnings.push(format!(
                "segment {id} ({}) covers pages {}..{} which are missing from the bundle",
                entry.title, entry.start_page, entry.end_page
            ));
            segments.push(Segment {
                id,
                title: entry.title.clone(),
                page_range: (last, last.saturating_sub(1)),
                content: String::new(),
                tables: Vec::new(),
                section_number: entry.number.clone(),
            });
            continue;
        }
        if entry.end_page > last {
            warnings.push(format!(
                "segment {id} ({}) claims pages up to {} but the bundle ends at {last}",
                entry.title, entry.end_page
            ));
        }

        let mut texts = Vec::new();
        let mut tables = Vec::new();
        for page_no in entry.start_page..=available_end {
            if let Some(page) = bundle.page(page_no) {
                texts.push(strip_furniture(&page.text));
                tables.extend(page.tables.iter().cloned());
            }
        }
        tables.sort_by_key(|t| t.page);
        let raw = texts.join(&PAGE_BREAK.to_string());
        segments.push(Segment {
            id,
            title: entry.title.clone(),
            page_range: (entry.start_page, available_end),
            content: clean_text(&raw, config.header_repeat_threshold),
            tables: merge_multipage_tables(tables),
            section_number: entry.number.clone(),
        });
    }

    Ok(SegmentedDocument {
        doc_id: bundle.doc_id.clone(),
        title: bundle.title.clone(),
        toc_page,
        segments,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::Page;

    fn page(number: u32, text: &str) -> Page {
        Page { number, text: text.to_string(), tables: vec![] }
    }

    fn bundle_with_pages(pages: Vec<Page>) -> DocumentBundle {
        DocumentBundle { doc_id: "doc".into(), title: "Doc".into(), pages }.finalize().unwrap()
    }

    fn table(page: u32, header: &[&str], rows: &[&[&str]], hint: bool) -> RawTable {
        RawTable {
            page,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect(),
            continuation_hint: hint,
        }
    }

    #[test]
    fn toc_page_found_by_heading() {
        let bundle = bundle_with_pages(vec![
            page(1, "Cover Title\n"),
            page(2, "Table of Contents\n1 Introduction 3\n2 Metrics 8\n3 Appendix 11\n"),
            page(3, "Introduction text"),
        ]);
        assert_eq!(find_toc_page(&bundle, &SegmenterConfig::default()).unwrap(), 2);
    }

    #[test]
    fn toc_page_found_by_dotted_leaders_without_heading() {
        let mut lines = String::new();
        for i in 1..=8 {
            lines.push_str(&format!("Section {i} ........ {}\n", i + 3));
        }
        let bundle = bundle_with_pages(vec![
            page(1, "Cover"),
            page(2, "Some prose without lists"),
            page(3, &lines),
            page(4, "Body"),
        ]);
        assert_eq!(find_toc_page(&bundle, &SegmenterConfig::default()).unwrap(), 3);
    }

    #[test]
    fn toc_not_found_on_blank_bundle() {
        let bundle = bundle_with_pages(vec![page(1, "")]);
        assert!(matches!(
            find_toc_page(&bundle, &SegmenterConfig::default()),
            Err(SegmentError::TocNotFound)
        ));
    }

    #[test]
    fn parse_toc_derives_end_pages() {
        let mut pages = vec![
            page(1, "Cover"),
            page(2, "Contents\n1 Introduction .... 3\n2 Metrics .... 8\n"),
        ];
        for n in 3..=12 {
            pages.push(page(n, "body"));
        }
        let bundle = bundle_with_pages(pages);
        let entries = parse_toc(&bundle, 2, &SegmenterConfig::default()).unwrap();
        assert_eq!(
            entries,
            vec![
                TocEntry { number: "1".into(), title: "Introduction".into(), start_page: 3, end_page: 7 },
                TocEntry { number: "2".into(), title: "Metrics".into(), start_page: 8, end_page: 12 },
            ]
        );
    }

    #[test]
    fn parse_toc_requires_two_entries() {
        let bundle = bundle_with_pages(vec![
            page(1, "Contents\n1 Only Section .... 2\n"),
            page(2, "body"),
        ]);
        assert!(matches!(
            parse_toc(&bundle, 1, &SegmenterConfig::default()),
            Err(SegmentError::TocUnparseable { entries: 1, .. })
        ));
    }

    #[test]
    fn duplicate_start_pages_empty_the_earlier_entry() {
        let mut pages = vec![page(
            1,
            "Contents\n1 First .... 3\n2 Second .... 3\n3 Third .... 5\n",
        )];
        for n in 2..=8 {
            pages.push(page(n, "body"));
        }
        let bundle = bundle_with_pages(pages);
        let entries = parse_toc(&bundle, 1, &SegmenterConfig::default()).unwrap();
        assert_eq!(entries[0].start_page, 3);
        assert_eq!(entries[0].end_page, 2);
        assert!(entries[0].is_empty_span());
        assert_eq!(entries[1].start_page, 3);
        assert_eq!(entries[1].end_page, 4);
        assert_eq!(entries[2].start_page, 5);
        assert_eq!(entries[2].end_page, 8);
    }

    #[test]
    fn merges_tables_with_equal_headers_on_adjacent_pages() {
        let merged = merge_multipage_tables(vec![
            table(5, &["a", "b", "c"], &[&["1", "2", "3"]], false),
            table(6, &["a", "b", "c"], &[&["4", "5", "6"]], false),
        ]);
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].page, 5);
        assert_eq!(merged[0].rows.len(), 2);
    }

    #[test]
    fn arity_mismatch_keeps_tables_apart() {
        let merged = merge_multipage_tables(vec![
            table(5, &["a", "b", "c"], &[&["1", "2", "3"]], false),
            table(6, &["a", "b", "c", "d"], &[&["4", "5", "6", "7"]], true),
        ]);
        assert_eq!(merged.len(), 2);
    }

    #[test]
    fn three_way_chain_merges_to_fixpoint() {
        let input = vec![
            table(5, &["a", "b"], &[&["1", "2"]], false),
            table(6, &[], &[&["3", "4"]], true),
            table(7, &[], &[&["5", "6"]], true),
        ];

        // Independent oracle: repeated pairwise merge until nothing changes.
        fn pairwise_once(tables: Vec<RawTable>) -> (Vec<RawTable>, bool) {
            let mut out: Vec<(RawTable, u32)> = Vec::new();
            let mut changed = false;
            for t in tables {
                let page = t.page;
                if let Some((prev, last)) = out.last_mut() {
                    if page == *last + 1
                        && prev.arity() == t.arity()
                        && prev.arity() > 0
                        && (prev.header == t.header || t.continuation_hint)
                    {
                        prev.rows.extend(t.rows);
                        *last = page;
                        changed = true;
                        continue;
                    }
                }
                out.push((t, page));
            }
            (out.into_iter().map(|(t, _)| t).collect(), changed)
        }
        let mut expected = input.clone();
        loop {
            let (next, changed) = pairwise_once(expected);
            expected = next;
            if !changed {
                break;
            }
        }

        let merged = merge_multipage_tables(input);
        assert_eq!(merged, expected);
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].rows.len(), 3);
    }

    #[test]
    fn nonadjacent_pages_do_not_merge() {
        let merged = merge_multipage_tables(vec![
            table(5, &["a", "b"], &[&["1", "2"]], false),
            table(7, &["a", "b"], &[&["3", "4"]], false),
        ]);
        assert_eq!(merged.len(), 2);
    }

    #[test]
    fn clean_text_strips_numbered_footers() {
        let raw = format!(
            "Intro line one\nSASB Standard | page 3{PAGE_BREAK}More body text\nSASB Standard | page 4{PAGE_BREAK}Final text\nSASB Standard | page 5"
        );
        let cleaned = clean_text(&raw, 0.6);
        assert!(!cleaned.contains("SASB Standard"));
        assert!(cleaned.contains("Intro line one"));
        assert!(cleaned.contains("Final text"));
    }

    #[test]
    fn clean_text_removes_isolated_page_numbers() {
        let cleaned = clean_text("Body text\n17\nMore text", 0.6);
        assert_eq!(cleaned, "Body text\nMore text");
    }

    #[test]
    fn clean_text_collapses_whitespace() {
        let cleaned = clean_text("a   b\t\tc\n\n\n\nd", 0.6);
        assert_eq!(cleaned, "a b c\n\nd");
    }

    #[test]
    fn segment_ids_are_unique_and_ordered() {
        let mut pages = vec![
            page(1, "Contents\n1 First .... 2\n2 Second .... 4\n3 Third .... 5\n"),
        ];
        for n in 2..=6 {
            pages.push(page(n, &format!("body of page {n}")));
        }
        let bundle = bundle_with_pages(pages);
        let doc = segment_document(&bundle, &SegmenterConfig::default()).unwrap();
        assert_eq!(doc.segments.len(), 3);
        assert_eq!(doc.segments[0].id, "seg_01_1");
        assert_eq!(doc.segments[1].id, "seg_02_2");
        assert_eq!(doc.segments[2].id, "seg_03_3");
        assert_eq!(doc.segments[0].page_range, (2, 3));
        assert_eq!(doc.segments[1].page_range, (4, 4));
        assert_eq!(doc.segments[2].page_range, (5, 6));
    }

    #[test]
    fn segment_tables_merge_across_its_pages() {
        let mut pages = vec![
            page(1, "Contents\n1 Overview .... 2\n2 Tables .... 4\n3 Tail .... 7\n"),
            page(2, "overview"),
            page(3, "overview continued"),
        ];
        let mut p4 = page(4, "table section");
        p4.tables.push(table(0, &["m", "u"], &[&["x", "t"]], false));
        let mut p5 = page(5, "table section continued");
        p5.tables.push(table(0, &["m", "u"], &[&["y", "%"]], false));
        pages.push(p4);
        pages.push(p5);
        let mut p6 = page(6, "sixth page");
        p6.tables.push(table(0, &["other"], &[&["z"]], false));
        pages.push(p6);
        pages.push(page(7, "tail"));
        let bundle = bundle_with_pages(pages);
        let doc = segment_document(&bundle, &SegmenterConfig::default()).unwrap();
        let tables_section = &doc.segments[1];
        assert_eq!(tables_section.page_range, (4, 6));
        assert_eq!(tables_section.tables.len(), 2);
        assert_eq!(tables_section.tables[0].rows.len(), 2);
        for segment in &doc.segments {
            for table in &segment.tables {
                assert!(table.page >= segment.page_range.0 && table.page <= segment.page_range.1);
            }
        }
    }

    #[test]
    fn two_entry_toc_partitions_all_pages_with_lowered_threshold() {
        // Two sections cover every page after the TOC; the detection
        // threshold is configurable for documents with short contents pages.
        let mut pages = vec![page(1, "Contents\n1 First .... 2\n2 Second .... 5\n")];
        for n in 2..=8 {
            pages.push(page(n, &format!("body {n}")));
        }
        let bundle = bundle_with_pages(pages);
        let config = SegmenterConfig { toc_min_lines: 2, ..Default::default() };
        let doc = segment_document(&bundle, &config).unwrap();
        assert_eq!(doc.segments.len(), 2);
        let mut covered = Vec::new();
        for s in &doc.segments {
            for p in s.page_range.0..=s.page_range.1 {
                covered.push(p);
            }
        }
        covered.sort();
        assert_eq!(covered, (2..=8).collect::<Vec<u32>>());
    }

    #[test]
    fn missing_pages_yield_empty_segment_with_warning() {
        let bundle = bundle_with_pages(vec![
            page(1, "Contents\n1 Present .... 2\n2 Also Present .... 3\n3 Missing .... 9\n"),
            page(2, "present body"),
            page(3, "present body too"),
        ]);
        let doc = segment_document(&bundle, &SegmenterConfig::default()).unwrap();
        assert_eq!(doc.segments.len(), 3);
        assert!(doc.segments[2].content.is_empty());
        assert!(!doc.warnings.is_empty());
    }
}
