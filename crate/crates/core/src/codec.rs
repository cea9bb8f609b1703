//! Tour serialization: JSON documents, layer tables, polyline export.
//!
//! The layer table is the human-readable form: one grid per z-layer,
//! layers labeled A, B, C, ... stacked in alphabetical order, rows y
//! top-to-bottom, columns x left-to-right. Visited cells show their
//! 0-based visit index, unvisited cells show ".". Parsing is purely
//! syntactic; semantic checks belong to the verifier.

use crate::lattice::{Box3, Cell};
use crate::tour::{verify, Tour};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub const SCHEMA: &str = "knights3d-tour/1";

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("tour failed verification: {0}")]
    UnverifiedTour(String),
    #[error("missing or malformed header line")]
    BadHeader,
    #[error("unknown schema version {0:?}")]
    UnknownSchema(String),
    #[error("visit index {0} appears more than once")]
    RepeatedIndex(usize),
    #[error("visit index {0} is missing (indices must cover 0..count)")]
    MissingIndex(usize),
    #[error("unreadable entry {0:?}")]
    BadEntry(String),
    #[error("layer {layer} has {got} rows, expected {want}")]
    RowCountMismatch { layer: String, got: usize, want: usize },
    #[error("row has {got} columns, expected {want}")]
    ColumnCountMismatch { got: usize, want: usize },
    #[error("expected {want} layers, found {got}")]
    LayerCountMismatch { got: usize, want: usize },
    #[error("invalid box dimensions {0:?}")]
    BadDims(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

// ---------------------------------------------------------------------
// Machine-readable document
// ---------------------------------------------------------------------

/// Lossless, versioned tour document. Field order is fixed by the
/// struct; metadata is an ordered string map preserved byte-for-byte.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TourDocument {
    pub schema: String,
    #[serde(rename = "box")]
    pub dims: [i64; 3],
    pub closed: bool,
    pub cells: Vec<[i64; 3]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl TourDocument {
    pub fn from_tour(tour: &Tour, metadata: BTreeMap<String, String>) -> Self {
        TourDocument {
            schema: SCHEMA.to_string(),
            dims: [tour.bx.nx, tour.bx.ny, tour.bx.nz],
            closed: tour.closed,
            cells: tour.cells.iter().map(|c| [c.x, c.y, c.z]).collect(),
            metadata,
        }
    }

    pub fn to_tour(&self) -> Tour {
        Tour::new(
            Box3::new(self.dims[0], self.dims[1], self.dims[2]),
            self.cells.iter().map(|c| Cell::new(c[0], c[1], c[2])).collect(),
            self.closed,
        )
    }
}

/// Canonical text encoding: pretty JSON plus trailing newline.
pub fn encode_document(doc: &TourDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("document serializes");
    s.push('\n');
    s
}

pub fn decode_document(text: &str) -> Result<TourDocument, CodecError> {
    let doc: TourDocument = serde_json::from_str(text)?;
    if doc.schema != SCHEMA {
        return Err(CodecError::UnknownSchema(doc.schema));
    }
    if doc.dims.iter().any(|&d| d < 1) {
        return Err(CodecError::BadDims(format!("{:?}", doc.dims)));
    }
    Ok(doc)
}

// ---------------------------------------------------------------------
// Layer tables
// ---------------------------------------------------------------------

fn layer_label(mut i: usize) -> String {
    // spreadsheet-style: A..Z, AA, AB, ...
    let mut s = Vec::new();
    loop {
        s.push(b'A' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    s.reverse();
    String::from_utf8(s).unwrap()
}

/// Render a verified tour as layer tables.
pub fn render_layers(tour: &Tour) -> Result<String, CodecError> {
    let report = verify(tour);
    if !report.ok {
        return Err(CodecError::UnverifiedTour(report.to_string().trim().to_string()));
    }
    let bx = &tour.bx;
    let mut grid: BTreeMap<(i64, i64, i64), usize> = BTreeMap::new();
    for (i, c) in tour.cells.iter().enumerate() {
        grid.insert((c.x, c.y, c.z), i);
    }
    let width = tour.cells.len().saturating_sub(1).to_string().len();
    let mut out = String::new();
    out.push_str(&format!(
        "box {} {}\n",
        bx,
        if tour.closed { "closed" } else { "open" }
    ));
    for z in 0..bx.nz {
        out.push_str(&layer_label(z as usize));
        out.push('\n');
        for y in 0..bx.ny {
            let row: Vec<String> = (0..bx.nx)
                .map(|x| match grid.get(&(x, y, z)) {
                    Some(i) => format!("{i:>width$}"),
                    None => format!("{:>width$}", "."),
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    Ok(out)
}

/// Parse a layer table back into a tour. Inverse of `render_layers`:
/// `parse_layers(render_layers(t)) == t` for every verified `t`.
pub fn parse_layers(text: &str) -> Result<Tour, CodecError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or(CodecError::BadHeader)?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("box") {
        return Err(CodecError::BadHeader);
    }
    let dims_str = parts.next().ok_or(CodecError::BadHeader)?;
    let closed = match parts.next() {
        Some("closed") => true,
        Some("open") => false,
        _ => return Err(CodecError::BadHeader),
    };
    let bx = parse_dims(dims_str).ok_or_else(|| CodecError::BadDims(dims_str.to_string()))?;

    let mut by_index: BTreeMap<usize, Cell> = BTreeMap::new();
    for z in 0..bx.nz {
        let label = lines.next().ok_or(CodecError::LayerCountMismatch {
            got: z as usize,
            want: bx.nz as usize,
        })?;
        if label.trim() != layer_label(z as usize) {
            return Err(CodecError::BadEntry(label.trim().to_string()));
        }
        for y in 0..bx.ny {
            let row = lines.next().ok_or(CodecError::RowCountMismatch {
                layer: layer_label(z as usize),
                got: y as usize,
                want: bx.ny as usize,
            })?;
            let tokens: Vec<&str> = row.split_whitespace().collect();
            if tokens.len() != bx.nx as usize {
                return Err(CodecError::ColumnCountMismatch {
                    got: tokens.len(),
                    want: bx.nx as usize,
                });
            }
            for (x, tok) in tokens.iter().enumerate() {
                if *tok == "." {
                    continue;
                }
                let idx: usize = tok
                    .parse()
                    .map_err(|_| CodecError::BadEntry(tok.to_string()))?;
                if by_index.insert(idx, Cell::new(x as i64, y, z)).is_some() {
                    return Err(CodecError::RepeatedIndex(idx));
                }
            }
        }
    }
    if lines.next().is_some() {
        return Err(CodecError::LayerCountMismatch {
            got: bx.nz as usize + 1,
            want: bx.nz as usize,
        });
    }
    // indices must be exactly 0..count
    for (want, (&got, _)) in by_index.iter().enumerate() {
        if got != want {
            return Err(CodecError::MissingIndex(want));
        }
    }
    Ok(Tour::new(bx, by_index.into_values().collect(), closed))
}

fn parse_dims(s: &str) -> Option<Box3> {
    let mut it = s.split('x');
    let nx: i64 = it.next()?.parse().ok()?;
    let ny: i64 = it.next()?.parse().ok()?;
    let nz: i64 = it.next()?.parse().ok()?;
    if it.next().is_some() || nx < 1 || ny < 1 || nz < 1 {
        return None;
    }
    Some(Box3::new(nx, ny, nz))
}

// ---------------------------------------------------------------------
// Polyline export
// ---------------------------------------------------------------------

/// Export a verified tour as a Wavefront OBJ wireframe: one vertex per
/// visited cell in visit order, `l` edges chaining them, plus the
/// closing edge for closed tours.
pub fn export_polyline(tour: &Tour) -> Result<String, CodecError> {
    let report = verify(tour);
    if !report.ok {
        return Err(CodecError::UnverifiedTour(report.to_string().trim().to_string()));
    }
    let mut out = String::new();
    out.push_str(&format!(
        "# non-crossing knight tour, box {}, {}, length {}\n",
        tour.bx,
        if tour.closed { "closed" } else { "open" },
        tour.length()
    ));
    for c in &tour.cells {
        out.push_str(&format!("v {} {} {}\n", c.x, c.y, c.z));
    }
    let n = tour.cells.len();
    for i in 1..n {
        out.push_str(&format!("l {} {}\n", i, i + 1)); // OBJ is 1-based
    }
    if tour.closed && n >= 2 {
        out.push_str(&format!("l {} 1\n", n));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_cycle() -> Tour {
        Tour::new(
            Box3::new(2, 2, 3),
            vec![
                Cell::new(0, 0, 0),
                Cell::new(1, 0, 2),
                Cell::new(1, 1, 0),
                Cell::new(0, 1, 2),
            ],
            true,
        )
    }

    #[test]
    fn four_cycle_layer_render() {
        let text = render_layers(&four_cycle()).unwrap();
        let want = "box 2x2x3 closed\nA\n0 .\n. 2\nB\n. .\n. .\nC\n. 1\n3 .\n";
        assert_eq!(text, want);
    }

    #[test]
    fn single_cell_render() {
        let t = Tour::new(Box3::new(1, 1, 1), vec![Cell::new(0, 0, 0)], false);
        assert_eq!(render_layers(&t).unwrap(), "box 1x1x1 open\nA\n0\n");
    }

    #[test]
    fn layer_round_trip() {
        let t = four_cycle();
        let parsed = parse_layers(&render_layers(&t).unwrap()).unwrap();
        assert_eq!(parsed, t);
    }

    #[test]
    fn repeated_index_rejected() {
        let text = "box 2x2x3 closed\nA\n0 .\n. 2\nB\n. .\n. 2\nC\n. 1\n3 .\n";
        match parse_layers(text) {
            Err(CodecError::RepeatedIndex(2)) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn missing_index_rejected() {
        // indices 0,1,3 present: 2 missing
        let text = "box 2x2x3 open\nA\n0 .\n. .\nB\n. .\n. .\nC\n. 1\n3 .\n";
        match parse_layers(text) {
            Err(CodecError::MissingIndex(2)) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn non_knight_layers_parse_then_fail_verify() {
        // parsing is syntactic; this adjacency is not a knight step
        let text = "box 2x2x3 open\nA\n0 1\n. .\nB\n. .\n. .\nC\n. .\n. .\n";
        let t = parse_layers(text).unwrap();
        let report = verify(&t);
        assert!(!report.ok);
    }

    #[test]
    fn document_round_trip_preserves_metadata() {
        let mut meta = BTreeMap::new();
        meta.insert("seed".to_string(), "42".to_string());
        meta.insert("mode".to_string(), "heuristic".to_string());
        let doc = TourDocument::from_tour(&four_cycle(), meta);
        let text = encode_document(&doc);
        let back = decode_document(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(encode_document(&back), text);
    }

    #[test]
    fn decode_rejects_two_component_cell() {
        let text = r#"{"schema":"knights3d-tour/1","box":[2,2,3],"closed":false,"cells":[[0,0]]}"#;
        assert!(decode_document(text).is_err());
    }

    #[test]
    fn decode_rejects_unknown_schema() {
        let text = r#"{"schema":"bogus/9","box":[2,2,3],"closed":false,"cells":[]}"#;
        match decode_document(text) {
            Err(CodecError::UnknownSchema(s)) => assert_eq!(s, "bogus/9"),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn polyline_edge_counts() {
        let obj = export_polyline(&four_cycle()).unwrap();
        let vs = obj.lines().filter(|l| l.starts_with("v ")).count();
        let ls = obj.lines().filter(|l| l.starts_with("l ")).count();
        assert_eq!(vs, 4);
        assert_eq!(ls, 4); // closed: L edges for L moves

        let open = Tour::new(
            Box3::new(3, 3, 3),
            vec![Cell::new(0, 0, 0), Cell::new(2, 1, 0), Cell::new(0, 2, 0)],
            false,
        );
        let obj = export_polyline(&open).unwrap();
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 3);
        assert_eq!(obj.lines().filter(|l| l.starts_with("l ")).count(), 2);
    }

    #[test]
    fn unverified_tour_rejected_by_renderers() {
        let bad = Tour::new(
            Box3::new(3, 3, 3),
            vec![Cell::new(0, 0, 0), Cell::new(1, 1, 1)],
            false,
        );
        assert!(render_layers(&bad).is_err());
        assert!(export_polyline(&bad).is_err());
    }
}
