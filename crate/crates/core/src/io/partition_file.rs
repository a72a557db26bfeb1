use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::{BlockId, Error, Result};

/// Writes one 0-based block id per line; line `i` belongs to node `i`.
pub fn write_partition(assignment: &[BlockId], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(Some(path.to_owned()), e))?;
    let mut w = BufWriter::new(file);
    for b in assignment {
        writeln!(w, "{b}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a partition file. With `expected_n` the line count is checked;
/// with `k` every block id must be below it.
pub fn read_partition(
    path: impl AsRef<Path>,
    expected_n: Option<usize>,
    k: Option<u32>,
) -> Result<Vec<BlockId>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(Some(path.to_owned()), e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let b: BlockId = t
            .parse()
            .map_err(|_| Error::parse(i + 1, format!("invalid block id {t:?}")))?;
        if let Some(k) = k {
            if b >= k {
                return Err(Error::parse(i + 1, format!("block id {b} not below k = {k}")));
            }
        }
        out.push(b);
    }
    if let Some(n) = expected_n {
        if out.len() != n {
            return Err(Error::parse(
                out.len(),
                format!("partition file has {} entries, graph has {n} nodes", out.len()),
            ));
        }
    }
    Ok(out)
}
