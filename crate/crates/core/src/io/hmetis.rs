use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use super::{next_content_line, parse_fmt, parse_u64};
use crate::graph::{HyperNodeRecord, Hypergraph, HypergraphHeader, HypergraphStream};
use crate::{Error, NetId, NodeId, Result, Weight};

/// Streaming reader for the node-major hypergraph format.
pub struct NodeMajorReader<R> {
    reader: R,
    path: Option<PathBuf>,
    header: HypergraphHeader,
    buf: String,
    line_no: usize,
    body_start_line: usize,
    body_offset: u64,
    next: usize,
    pin_count: usize,
    scratch: Vec<NetId>,
}

impl NodeMajorReader<BufReader<File>> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(Some(path.to_owned()), e))?;
        let mut r = Self::new(BufReader::with_capacity(1 << 16, file))?;
        r.path = Some(path.to_owned());
        Ok(r)
    }
}

impl<R: BufRead + Seek> NodeMajorReader<R> {
    pub fn new(mut reader: R) -> Result<Self> {
        let mut buf = String::new();
        let mut line_no = 0;
        if !next_content_line(&mut reader, &mut buf, &mut line_no)? {
            return Err(Error::parse(line_no, "missing header"));
        }
        let tokens: Vec<&str> = buf.split_ascii_whitespace().collect();
        if tokens.len() < 3 || tokens.len() > 4 {
            return Err(Error::parse(line_no, "header must be \"n m pins [fmt]\""));
        }
        let n = parse_u64(tokens[0], line_no, "node count")? as usize;
        let m = parse_u64(tokens[1], line_no, "net count")? as usize;
        let pins = parse_u64(tokens[2], line_no, "pin count")? as usize;
        if n == 0 {
            return Err(Error::parse(line_no, "hypergraph must have at least one node"));
        }
        let flags = match tokens.get(3) {
            Some(t) => parse_fmt(t, line_no)?,
            None => Default::default(),
        };
        let body_offset = reader.stream_position()?;
        Ok(Self {
            reader,
            path: None,
            header: HypergraphHeader {
                n,
                m,
                pins,
                has_node_weights: flags.node_weights,
                has_net_weights: flags.edge_weights,
            },
            buf,
            line_no,
            body_start_line: line_no,
            body_offset,
            next: 0,
            pin_count: 0,
            scratch: Vec::new(),
        })
    }
}

impl<R: BufRead + Seek> HypergraphStream for NodeMajorReader<R> {
    fn header(&self) -> &HypergraphHeader {
        &self.header
    }

    fn next_node(&mut self, rec: &mut HyperNodeRecord) -> Result<bool> {
        if self.next >= self.header.n {
            return Ok(false);
        }
        let more = next_content_line(&mut self.reader, &mut self.buf, &mut self.line_no).map_err(
            |e| match e {
                Error::Io { path: None, source } => Error::io(self.path.clone(), source),
                other => other,
            },
        )?;
        if !more {
            return Err(Error::parse(
                self.line_no,
                format!("unexpected end of file after {} of {} nodes", self.next, self.header.n),
            ));
        }
        let line = self.line_no;
        let mut tokens = self.buf.split_ascii_whitespace();
        rec.id = self.next as NodeId;
        rec.nets.clear();
        rec.weight = if self.header.has_node_weights {
            let t = tokens
                .next()
                .ok_or_else(|| Error::parse(line, "missing node weight"))?;
            parse_u64(t, line, "node weight")?
        } else {
            1
        };
        while let Some(t) = tokens.next() {
            let e = parse_u64(t, line, "net id")?;
            if e == 0 || e as usize > self.header.m {
                return Err(Error::NetOutOfRange {
                    line,
                    net: e,
                    m: self.header.m,
                });
            }
            let w = if self.header.has_net_weights {
                let t = tokens
                    .next()
                    .ok_or_else(|| Error::parse(line, "missing net weight"))?;
                let w = parse_u64(t, line, "net weight")?;
                if w == 0 {
                    return Err(Error::parse(line, "net weights must be positive"));
                }
                w
            } else {
                1
            };
            rec.nets.push(((e - 1) as NetId, w));
        }
        self.scratch.clear();
        self.scratch.extend(rec.nets.iter().map(|&(e, _)| e));
        self.scratch.sort_unstable();
        if self.scratch.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::parse(line, "net listed twice for the same node"));
        }
        self.pin_count += rec.nets.len();
        self.next += 1;
        if self.next == self.header.n && self.pin_count != self.header.pins {
            return Err(Error::PinCountMismatch {
                expected: self.header.pins,
                found: self.pin_count,
            });
        }
        Ok(true)
    }

    fn rewind(&mut self) -> Result<()> {
        self.reader.seek(SeekFrom::Start(self.body_offset))?;
        self.line_no = self.body_start_line;
        self.next = 0;
        self.pin_count = 0;
        Ok(())
    }
}

/// Reads a standard net-major hMetis file (`m n [fmt]`, one net per line,
/// then optional node weights) into memory.
pub fn read_hmetis(path: impl AsRef<Path>) -> Result<Hypergraph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(Some(path.to_owned()), e))?;
    read_hmetis_from(BufReader::new(file))
}

pub(crate) fn read_hmetis_from<R: BufRead>(mut reader: R) -> Result<Hypergraph> {
    let mut buf = String::new();
    let mut line_no = 0;
    if !next_content_line(&mut reader, &mut buf, &mut line_no)? {
        return Err(Error::parse(line_no, "missing header"));
    }
    let tokens: Vec<&str> = buf.split_ascii_whitespace().collect();
    if tokens.len() < 2 || tokens.len() > 3 {
        return Err(Error::parse(line_no, "header must be \"m n [fmt]\""));
    }
    let m = parse_u64(tokens[0], line_no, "net count")? as usize;
    let n = parse_u64(tokens[1], line_no, "node count")? as usize;
    if n == 0 {
        return Err(Error::parse(line_no, "hypergraph must have at least one node"));
    }
    let flags = match tokens.get(2) {
        Some(t) => parse_fmt(t, line_no)?,
        None => Default::default(),
    };
    let mut nets = Vec::with_capacity(m);
    let mut net_weights = Vec::new();
    for _ in 0..m {
        if !next_content_line(&mut reader, &mut buf, &mut line_no)? {
            return Err(Error::parse(line_no, "unexpected end of file in net section"));
        }
        let mut tokens = buf.split_ascii_whitespace();
        if flags.edge_weights {
            let t = tokens
                .next()
                .ok_or_else(|| Error::parse(line_no, "missing net weight"))?;
            net_weights.push(parse_u64(t, line_no, "net weight")?);
        }
        let mut pins = Vec::new();
        for t in tokens {
            let p = parse_u64(t, line_no, "pin")?;
            if p == 0 || p as usize > n {
                return Err(Error::NeighborOutOfRange {
                    line: line_no,
                    neighbor: p,
                    n,
                });
            }
            pins.push((p - 1) as NodeId);
        }
        nets.push(pins);
    }
    let node_weights = if flags.node_weights {
        let mut w = Vec::with_capacity(n);
        for _ in 0..n {
            if !next_content_line(&mut reader, &mut buf, &mut line_no)? {
                return Err(Error::parse(line_no, "unexpected end of file in node weights"));
            }
            let t = buf
                .split_ascii_whitespace()
                .next()
                .ok_or_else(|| Error::parse(line_no, "missing node weight"))?;
            w.push(parse_u64(t, line_no, "node weight")?);
        }
        Some(w)
    } else {
        None
    };
    Hypergraph::from_nets(n, &nets, flags.edge_weights.then_some(net_weights), node_weights)
}

fn fmt_token(node_weights: bool, net_weights: bool) -> Option<&'static str> {
    match (node_weights, net_weights) {
        (false, false) => None,
        (false, true) => Some("1"),
        (true, false) => Some("10"),
        (true, true) => Some("11"),
    }
}

pub fn write_hmetis(hg: &Hypergraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(Some(path.to_owned()), e))?;
    let mut w = BufWriter::new(file);
    let nw = hg.node_weights().is_some();
    let ew = hg.net_weights().is_some();
    write!(w, "{} {}", hg.m(), hg.n())?;
    if let Some(f) = fmt_token(nw, ew) {
        write!(w, " {f}")?;
    }
    writeln!(w)?;
    for e in 0..hg.m() as NetId {
        let mut first = true;
        if ew {
            write!(w, "{}", hg.net_weight(e))?;
            first = false;
        }
        for &p in hg.pins_of(e) {
            if !first {
                w.write_all(b" ")?;
            }
            first = false;
            write!(w, "{}", p + 1)?;
        }
        writeln!(w)?;
    }
    if nw {
        for v in 0..hg.n() as NodeId {
            writeln!(w, "{}", hg.node_weight(v))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_node_major(hg: &Hypergraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(Some(path.to_owned()), e))?;
    let mut w = BufWriter::new(file);
    write_node_major_to(hg, &mut w)?;
    w.flush()?;
    Ok(())
}

pub(crate) fn write_node_major_to<W: Write>(hg: &Hypergraph, w: &mut W) -> Result<()> {
    let nw = hg.node_weights().is_some();
    let ew = hg.net_weights().is_some();
    write!(w, "{} {} {}", hg.n(), hg.m(), hg.pins())?;
    if let Some(f) = fmt_token(nw, ew) {
        write!(w, " {f}")?;
    }
    writeln!(w)?;
    for v in 0..hg.n() as NodeId {
        let mut first = true;
        if nw {
            write!(w, "{}", hg.node_weight(v))?;
            first = false;
        }
        for &e in hg.incident_nets(v) {
            if !first {
                w.write_all(b" ")?;
            }
            first = false;
            write!(w, "{}", e + 1)?;
            if ew {
                write!(w, " {}", hg.net_weight(e))?;
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Converts a net-major hMetis file into the node-major stream format.
/// Returns the pin count written.
pub fn transpose_hmetis_file(input: impl AsRef<Path>, output: impl AsRef<Path>) -> Result<usize> {
    let hg = read_hmetis(input)?;
    write_node_major(&hg, output)?;
    Ok(hg.pins())
}

/// Reads a node-major file completely into memory.
pub fn read_node_major(path: impl AsRef<Path>) -> Result<Hypergraph> {
    let mut reader = NodeMajorReader::open(path)?;
    collect_hypergraph(&mut reader)
}

/// Reads every record of a node-major stream into memory.
pub fn collect_hypergraph<S: HypergraphStream + ?Sized>(stream: &mut S) -> Result<Hypergraph> {
    let header = stream.header().clone();
    let mut nets: Vec<Vec<NodeId>> = vec![Vec::new(); header.m];
    let mut net_weights: Vec<Weight> = vec![1; header.m];
    let mut node_weights = Vec::with_capacity(header.n);
    let mut rec = HyperNodeRecord::default();
    while stream.next_node(&mut rec)? {
        for &(e, w) in &rec.nets {
            nets[e as usize].push(rec.id);
            net_weights[e as usize] = w;
        }
        node_weights.push(rec.weight);
    }
    Hypergraph::from_nets(
        header.n,
        &nets,
        header.has_net_weights.then_some(net_weights),
        header.has_node_weights.then_some(node_weights),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn records(text: &str) -> Result<Vec<HyperNodeRecord>> {
        let mut r = NodeMajorReader::new(Cursor::new(text.as_bytes().to_vec()))?;
        let mut out = Vec::new();
        let mut rec = HyperNodeRecord::default();
        while r.next_node(&mut rec)? {
            out.push(rec.clone());
        }
        Ok(out)
    }

    #[test]
    fn three_nodes_two_nets() {
        let recs = records("3 2 4\n1\n1 2\n2\n").unwrap();
        let nets: Vec<Vec<NetId>> = recs
            .iter()
            .map(|r| r.nets.iter().map(|&(e, _)| e).collect())
            .collect();
        assert_eq!(nets, vec![vec![0], vec![0, 1], vec![1]]);
    }

    #[test]
    fn isolated_node_is_valid() {
        let recs = records("2 1 1\n1\n\n").unwrap();
        assert!(recs[1].nets.is_empty());
    }

    #[test]
    fn weighted_node_major() {
        let recs = records("2 1 2 11\n4 1 9\n2 1 9\n").unwrap();
        assert_eq!(recs[0].weight, 4);
        assert_eq!(recs[0].nets, vec![(0, 9)]);
        assert_eq!(recs[1].weight, 2);
    }

    #[test]
    fn net_out_of_range() {
        let err = records("2 1 2\n1\n2\n").unwrap_err();
        assert!(matches!(err, Error::NetOutOfRange { net: 2, .. }));
    }

    #[test]
    fn pin_count_mismatch() {
        let err = records("2 1 3\n1\n1\n").unwrap_err();
        assert!(matches!(err, Error::PinCountMismatch { expected: 3, found: 2 }));
    }

    #[test]
    fn duplicate_net_in_record() {
        assert!(records("1 1 2\n1 1\n").is_err());
    }

    #[test]
    fn hmetis_weighted_parse() {
        let hg = read_hmetis_from(Cursor::new(b"2 3 11\n5 1 2\n1 2 3\n7\n8\n9\n".to_vec())).unwrap();
        assert_eq!(hg.net_weight(0), 5);
        assert_eq!(hg.pins_of(1), &[1, 2]);
        assert_eq!(hg.node_weight(2), 9);
    }

    #[test]
    fn transpose_preserves_pin_multiset() {
        let dir = tempfile::tempdir().unwrap();
        let src = dir.path().join("h.hgr");
        let dst = dir.path().join("h.nm");
        std::fs::write(&src, "3 4\n1 2\n2 3 4\n1 4\n").unwrap();
        let pins = transpose_hmetis_file(&src, &dst).unwrap();
        assert_eq!(pins, 7);
        let original = read_hmetis(&src).unwrap();
        let streamed = read_node_major(&dst).unwrap();
        let multiset = |hg: &Hypergraph| {
            let mut v: Vec<(NetId, NodeId)> = (0..hg.m() as NetId)
                .flat_map(|e| hg.pins_of(e).iter().map(move |&p| (e, p)))
                .collect();
            v.sort_unstable();
            v
        };
        assert_eq!(multiset(&original), multiset(&streamed));
    }
}
