use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use super::{next_content_line, parse_fmt, parse_u64};
use crate::graph::{CsrGraph, GraphHeader, GraphStream, NodeRecord};
use crate::{Error, NodeId, Result};

/// Streaming METIS reader. Holds one line of input at a time.
pub struct MetisReader<R> {
    reader: R,
    path: Option<PathBuf>,
    header: GraphHeader,
    buf: String,
    line_no: usize,
    body_start_line: usize,
    body_offset: u64,
    next: usize,
    degree_sum: usize,
}

impl MetisReader<BufReader<File>> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(Some(path.to_owned()), e))?;
        let mut r = Self::new(BufReader::with_capacity(1 << 16, file))?;
        r.path = Some(path.to_owned());
        Ok(r)
    }
}

impl<R: BufRead + Seek> MetisReader<R> {
    pub fn new(mut reader: R) -> Result<Self> {
        let mut buf = String::new();
        let mut line_no = 0;
        if !next_content_line(&mut reader, &mut buf, &mut line_no)? {
            return Err(Error::parse(line_no, "missing header"));
        }
        let tokens: Vec<&str> = buf.split_ascii_whitespace().collect();
        if tokens.len() < 2 || tokens.len() > 4 {
            return Err(Error::parse(line_no, "header must be \"n m [fmt [ncon]]\""));
        }
        let n = parse_u64(tokens[0], line_no, "node count")? as usize;
        let m = parse_u64(tokens[1], line_no, "edge count")? as usize;
        if n == 0 {
            return Err(Error::parse(line_no, "graph must have at least one node"));
        }
        if n > NodeId::MAX as usize {
            return Err(Error::parse(line_no, "node count exceeds 32-bit ids"));
        }
        let flags = match tokens.get(2) {
            Some(t) => parse_fmt(t, line_no)?,
            None => Default::default(),
        };
        if let Some(t) = tokens.get(3) {
            if parse_u64(t, line_no, "ncon")? != 1 {
                return Err(Error::parse(line_no, "multi-constraint graphs are not supported"));
            }
        }
        let body_offset = reader.stream_position()?;
        Ok(Self {
            reader,
            path: None,
            header: GraphHeader {
                n,
                m,
                has_node_weights: flags.node_weights,
                has_edge_weights: flags.edge_weights,
            },
            buf,
            line_no,
            body_start_line: line_no,
            body_offset,
            next: 0,
            degree_sum: 0,
        })
    }

    fn parse_line(&mut self, rec: &mut NodeRecord) -> Result<()> {
        let line = self.line_no;
        let n = self.header.n;
        let mut tokens = self.buf.split_ascii_whitespace();
        rec.id = self.next as NodeId;
        rec.neighbors.clear();
        rec.weight = if self.header.has_node_weights {
            let t = tokens
                .next()
                .ok_or_else(|| Error::parse(line, "missing node weight"))?;
            parse_u64(t, line, "node weight")?
        } else {
            1
        };
        while let Some(t) = tokens.next() {
            let u = parse_u64(t, line, "neighbor id")?;
            if u == 0 || u as usize > n {
                return Err(Error::NeighborOutOfRange { line, neighbor: u, n });
            }
            let u = (u - 1) as NodeId;
            if u == rec.id {
                return Err(Error::parse(line, "self loop"));
            }
            let w = if self.header.has_edge_weights {
                let t = tokens
                    .next()
                    .ok_or_else(|| Error::parse(line, "missing edge weight"))?;
                let w = parse_u64(t, line, "edge weight")?;
                if w == 0 {
                    return Err(Error::parse(line, "edge weights must be positive"));
                }
                w
            } else {
                1
            };
            rec.neighbors.push((u, w));
        }
        self.degree_sum += rec.neighbors.len();
        Ok(())
    }
}

impl<R: BufRead + Seek> GraphStream for MetisReader<R> {
    fn header(&self) -> &GraphHeader {
        &self.header
    }

    fn next_node(&mut self, rec: &mut NodeRecord) -> Result<bool> {
        if self.next >= self.header.n {
            return Ok(false);
        }
        if !next_content_line(&mut self.reader, &mut self.buf, &mut self.line_no)
            .map_err(|e| attach_path(e, &self.path))?
        {
            return Err(Error::parse(
                self.line_no,
                format!("unexpected end of file after {} of {} nodes", self.next, self.header.n),
            ));
        }
        self.parse_line(rec)?;
        self.next += 1;
        if self.next == self.header.n && self.degree_sum != 2 * self.header.m {
            return Err(Error::EdgeCountMismatch {
                expected: self.header.m,
                found: self.degree_sum / 2,
            });
        }
        Ok(true)
    }

    fn rewind(&mut self) -> Result<()> {
        self.reader.seek(SeekFrom::Start(self.body_offset))?;
        self.line_no = self.body_start_line;
        self.next = 0;
        self.degree_sum = 0;
        Ok(())
    }
}

fn attach_path(e: Error, path: &Option<PathBuf>) -> Error {
    match e {
        Error::Io { path: None, source } => Error::Io {
            path: path.clone(),
            source,
        },
        other => other,
    }
}

/// Reads a whole METIS file into memory.
pub fn read_metis(path: impl AsRef<Path>) -> Result<CsrGraph> {
    let mut reader = MetisReader::open(path)?;
    collect_graph(&mut reader)
}

/// Reads every record of a stream into a CSR graph.
pub fn collect_graph<S: GraphStream + ?Sized>(stream: &mut S) -> Result<CsrGraph> {
    let header = stream.header().clone();
    let mut xadj = Vec::with_capacity(header.n + 1);
    let mut adjncy = Vec::with_capacity(2 * header.m);
    let mut adjwgt = Vec::with_capacity(if header.has_edge_weights { 2 * header.m } else { 0 });
    let mut vwgt = Vec::with_capacity(if header.has_node_weights { header.n } else { 0 });
    let mut rec = NodeRecord::default();
    xadj.push(0);
    while stream.next_node(&mut rec)? {
        for &(u, w) in &rec.neighbors {
            adjncy.push(u);
            if header.has_edge_weights {
                adjwgt.push(w);
            }
        }
        if header.has_node_weights {
            vwgt.push(rec.weight);
        }
        xadj.push(adjncy.len());
    }
    CsrGraph::from_csr(
        xadj,
        adjncy,
        header.has_node_weights.then_some(vwgt),
        header.has_edge_weights.then_some(adjwgt),
    )
}

pub fn write_metis(graph: &CsrGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(Some(path.to_owned()), e))?;
    let mut w = BufWriter::new(file);
    let nw = graph.has_node_weights();
    let ew = graph.has_edge_weights();
    match (nw, ew) {
        (false, false) => writeln!(w, "{} {}", graph.n(), graph.m())?,
        (nw, ew) => writeln!(w, "{} {} {}{}", graph.n(), graph.m(), nw as u8, ew as u8)?,
    }
    for v in 0..graph.n() as NodeId {
        let mut first = true;
        if nw {
            write!(w, "{}", graph.node_weight(v))?;
            first = false;
        }
        for (u, wt) in graph.neighbors(v) {
            if !first {
                w.write_all(b" ")?;
            }
            first = false;
            write!(w, "{}", u + 1)?;
            if ew {
                write!(w, " {wt}")?;
            }
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn records(text: &str) -> Result<Vec<NodeRecord>> {
        let mut r = MetisReader::new(Cursor::new(text.as_bytes().to_vec()))?;
        let mut out = Vec::new();
        let mut rec = NodeRecord::default();
        while r.next_node(&mut rec)? {
            out.push(rec.clone());
        }
        Ok(out)
    }

    #[test]
    fn path_of_three() {
        let recs = records("3 2\n2\n1 3\n2\n").unwrap();
        assert_eq!(recs.len(), 3);
        assert_eq!(recs[0].neighbors, vec![(1, 1)]);
        assert_eq!(recs[1].neighbors, vec![(0, 1), (2, 1)]);
        assert_eq!(recs[2].neighbors, vec![(1, 1)]);
    }

    #[test]
    fn weighted_format() {
        let recs = records("% comment\n2 1 011\n5 2 7\n3 1 7\n").unwrap();
        assert_eq!(recs[0].weight, 5);
        assert_eq!(recs[0].neighbors, vec![(1, 7)]);
        assert_eq!(recs[1].weight, 3);
        assert_eq!(recs[1].neighbors, vec![(0, 7)]);
    }

    #[test]
    fn neighbor_out_of_range() {
        let err = records("3 1\n9\n\n\n").unwrap_err();
        assert!(matches!(err, Error::NeighborOutOfRange { neighbor: 9, .. }));
        assert!(err.to_string().contains("neighbor out of range"));
    }

    #[test]
    fn edge_count_mismatch_detected_at_end() {
        let err = records("3 3\n2\n1 3\n2\n").unwrap_err();
        assert!(matches!(err, Error::EdgeCountMismatch { expected: 3, found: 2 }));
    }

    #[test]
    fn isolated_nodes_and_rewind() {
        let mut r = MetisReader::new(Cursor::new(b"3 1\n2\n1\n\n".to_vec())).unwrap();
        let mut rec = NodeRecord::default();
        let mut count = 0;
        while r.next_node(&mut rec).unwrap() {
            count += 1;
        }
        assert_eq!(count, 3);
        assert!(rec.neighbors.is_empty());
        r.rewind().unwrap();
        assert!(r.next_node(&mut rec).unwrap());
        assert_eq!(rec.id, 0);
    }

    #[test]
    fn malformed_header() {
        assert!(records("abc\n").is_err());
        assert!(records("0 0\n").is_err());
        assert!(records("").is_err());
    }

    #[test]
    fn truncated_body() {
        assert!(records("3 1\n2\n1\n").is_err());
    }

    #[test]
    fn write_then_read() {
        let g = CsrGraph::from_weighted_edges(4, &[(0, 1, 2), (1, 2, 1), (2, 3, 5)], Some(vec![1, 2, 3, 4]));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.graph");
        write_metis(&g, &p).unwrap();
        let back = read_metis(&p).unwrap();
        assert_eq!(back, g);
    }
}
