//! File formats: METIS graphs, hMetis hypergraphs (net-major), the
//! node-major hypergraph stream format, and partition files.
//!
//! Node-major hypergraph format: header `n m pins [fmt]`, then one line per
//! node listing the 1-based ids of its incident nets. `fmt` follows hMetis:
//! `1` = net weights, `10` = node weights, `11` = both. With node weights the
//! line starts with the node weight; with net weights every net id is
//! followed by that net's weight. `%` lines are comments.

mod hmetis;
mod metis;
mod partition_file;

pub use hmetis::{
    read_hmetis, read_node_major, transpose_hmetis_file, write_hmetis, write_node_major,
    NodeMajorReader,
};
pub use metis::{read_metis, write_metis, MetisReader};
pub use hmetis::collect_hypergraph;
pub use metis::collect_graph;
pub use partition_file::{read_partition, write_partition};

use crate::{Error, Result};

/// Parsed `fmt` field shared by METIS and hMetis headers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct FormatFlags {
    /// METIS: node weights. hMetis: node weights.
    pub node_weights: bool,
    /// METIS: edge weights. hMetis: net weights.
    pub edge_weights: bool,
}

pub(crate) fn parse_fmt(token: &str, line: usize) -> Result<FormatFlags> {
    if token.is_empty() || token.len() > 3 || !token.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::parse(line, format!("invalid fmt field {token:?}")));
    }
    let padded = format!("{token:0>3}");
    let b = padded.as_bytes();
    if b[0] == b'1' {
        return Err(Error::parse(line, "node sizes (fmt 100) are not supported"));
    }
    Ok(FormatFlags {
        node_weights: b[1] == b'1',
        edge_weights: b[2] == b'1',
    })
}

pub(crate) fn parse_u64(token: &str, line: usize, what: &str) -> Result<u64> {
    token
        .parse::<u64>()
        .map_err(|_| Error::parse(line, format!("invalid {what} {token:?}")))
}

/// Reads the next non-comment line into `buf`. Returns false at EOF.
pub(crate) fn next_content_line<R: std::io::BufRead>(
    reader: &mut R,
    buf: &mut String,
    line_no: &mut usize,
) -> Result<bool> {
    loop {
        buf.clear();
        if reader.read_line(buf)? == 0 {
            return Ok(false);
        }
        *line_no += 1;
        if !buf.trim_start().starts_with('%') {
            return Ok(true);
        }
    }
}
