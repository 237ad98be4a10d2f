//! graph6 (McKay encoding) and plain edge-list text formats.
//!
//! Round trips are bit-exact on `(n, edge set)`; labels are not
//! serialized (readers get integer labels).

use super::{Graph, GraphError};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("truncated payload: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("trailing garbage after payload: {0:?}")]
    TrailingGarbage(String),
    #[error("byte {byte:#x} at position {pos} outside graph6 range 63..=126")]
    InvalidByte { byte: u8, pos: usize },
    #[error("graph too large for this writer (n = {0})")]
    TooLarge(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Encodes the graph in graph6 format (no `>>graph6<<` header).
pub fn write_graph6(g: &Graph) -> Result<String, FormatError> {
    let n = g.n();
    let mut bytes = Vec::new();
    if n < 63 {
        bytes.push(n as u8 + 63);
    } else if n <= 258_047 {
        bytes.push(126);
        bytes.push(((n >> 12) & 0x3f) as u8 + 63);
        bytes.push(((n >> 6) & 0x3f) as u8 + 63);
        bytes.push((n & 0x3f) as u8 + 63);
    } else {
        return Err(FormatError::TooLarge(n));
    }
    // upper triangle, column-major: x(0,1), x(0,2), x(1,2), x(0,3), ...
    let mut acc: u8 = 0;
    let mut nbits = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | u8::from(g.has_edge(i, j));
            nbits += 1;
            if nbits == 6 {
                bytes.push(acc + 63);
                acc = 0;
                nbits = 0;
            }
        }
    }
    if nbits > 0 {
        bytes.push((acc << (6 - nbits)) + 63);
    }
    Ok(String::from_utf8(bytes).expect("graph6 bytes are ascii"))
}

/// Parses one graph6 line. Accepts an optional `>>graph6<<` prefix and
/// a single trailing newline.
pub fn parse_graph6(text: &str) -> Result<Graph, FormatError> {
    let mut s = text.strip_prefix(">>graph6<<").unwrap_or(text);
    s = s.trim_end_matches(['\n', '\r']);
    let bytes = s.as_bytes();
    if bytes.is_empty() {
        return Err(FormatError::MalformedHeader("empty input".into()));
    }
    for (pos, &b) in bytes.iter().enumerate() {
        if !(63..=126).contains(&b) {
            return Err(FormatError::InvalidByte { byte: b, pos });
        }
    }
    let (n, mut pos) = if bytes[0] == 126 {
        if bytes.len() < 4 {
            return Err(FormatError::MalformedHeader(
                "extended size marker without 3 size bytes".into(),
            ));
        }
        if bytes[1] == 126 {
            return Err(FormatError::MalformedHeader(
                "8-byte size encoding not supported".into(),
            ));
        }
        let n = ((bytes[1] - 63) as usize) << 12
            | ((bytes[2] - 63) as usize) << 6
            | (bytes[3] - 63) as usize;
        (n, 4)
    } else {
        ((bytes[0] - 63) as usize, 1)
    };
    let nbits = n * n.saturating_sub(1) / 2;
    let nbytes = nbits.div_ceil(6);
    if bytes.len() - pos < nbytes {
        return Err(FormatError::Truncated {
            expected: nbytes,
            got: bytes.len() - pos,
        });
    }
    if bytes.len() - pos > nbytes {
        return Err(FormatError::TrailingGarbage(
            s[pos + nbytes..].to_string(),
        ));
    }
    let mut edges = Vec::new();
    let mut acc: u8 = 0;
    let mut avail = 0;
    let mut next_bit = || {
        if avail == 0 {
            acc = bytes[pos] - 63;
            pos += 1;
            avail = 6;
        }
        avail -= 1;
        (acc >> avail) & 1
    };
    for j in 1..n {
        for i in 0..j {
            if next_bit() == 1 {
                edges.push((i, j));
            }
        }
    }
    Ok(Graph::from_edge_list(n, &edges)?)
}

/// Writes the edge-list format: first line `N M`, then `M` lines `i j`.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.num_edges());
    for &(i, j) in g.edges() {
        out.push_str(&format!("{i} {j}\n"));
    }
    out
}

/// Parses the edge-list format written by [`write_edge_list`].
pub fn parse_edge_list(text: &str) -> Result<Graph, FormatError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| FormatError::MalformedHeader("empty input".into()))?;
    let mut it = header.split_whitespace();
    let parse_num = |tok: Option<&str>| -> Result<usize, FormatError> {
        tok.ok_or_else(|| FormatError::MalformedHeader(header.to_string()))?
            .parse()
            .map_err(|_| FormatError::MalformedHeader(header.to_string()))
    };
    let n = parse_num(it.next())?;
    let m = parse_num(it.next())?;
    if it.next().is_some() {
        return Err(FormatError::MalformedHeader(header.to_string()));
    }
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let line = lines.next().ok_or(FormatError::Truncated {
            expected: m,
            got: edges.len(),
        })?;
        let mut it = line.split_whitespace();
        let i = parse_num(it.next())?;
        let j = parse_num(it.next())?;
        if it.next().is_some() {
            return Err(FormatError::MalformedHeader(line.to_string()));
        }
        edges.push((i, j));
    }
    if let Some(extra) = lines.next() {
        return Err(FormatError::TrailingGarbage(extra.to_string()));
    }
    Ok(Graph::from_edge_list(n, &edges)?)
}
