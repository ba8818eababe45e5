//! Weight checkpoints: a short text header followed by one raw `f64` bit
//! pattern per line as 16 hex digits, so a round trip is bit-exact.
//!
//! ```text
//! dilp-weights 1
//! mode per_literal
//! block 2 4 39
//! block 1 4 39
//! params 312
//! 3ff0000000000000
//! ...
//! ```

use std::io::{BufRead, Write};

use super::weights::{BlockShape, WeightShape, WeightStore};
use crate::error::{Error, Result};

const MAGIC: &str = "dilp-weights 1";

pub fn write_checkpoint(w: &WeightStore, mut out: impl Write) -> Result<()> {
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "mode {}", w.mode())?;
    for b in &w.shape().blocks {
        writeln!(out, "block {} {} {}", b.arity, b.slots, b.width)?;
    }
    writeln!(out, "params {}", w.params().len())?;
    for p in w.params() {
        writeln!(out, "{:016x}", p.to_bits())?;
    }
    Ok(())
}

pub fn read_checkpoint(input: impl BufRead) -> Result<WeightStore> {
    let mut lines = input.lines().enumerate();
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((i, line)) => Ok((i + 1, line?)),
            None => Err(Error::Parse { line: 0, message: format!("unexpected end of checkpoint, expected {what}") }),
        }
    };
    let bad = |line: usize, message: String| Error::Parse { line, message };

    let (ln, magic) = next("header")?;
    if magic.trim() != MAGIC {
        return Err(bad(ln, format!("not a weight checkpoint (header `{magic}`)")));
    }
    let (ln, mode) = next("mode")?;
    let mode = mode
        .strip_prefix("mode ")
        .ok_or_else(|| bad(ln, "expected `mode <name>`".into()))?
        .trim()
        .parse()
        .map_err(|e| bad(ln, e))?;
    let mut blocks = Vec::new();
    let count = loop {
        let (ln, line) = next("block or params line")?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|e| bad(ln, e.to_string()));
        match fields.as_slice() {
            ["block", a, s, w] => blocks.push(BlockShape { arity: num(a)?, slots: num(s)?, width: num(w)? }),
            ["params", n] => break num(n)?,
            _ => return Err(bad(ln, format!("unexpected line `{line}`"))),
        }
    };
    let mut params = Vec::with_capacity(count);
    for _ in 0..count {
        let (ln, line) = next("parameter")?;
        let bits = u64::from_str_radix(line.trim(), 16).map_err(|e| bad(ln, e.to_string()))?;
        params.push(f64::from_bits(bits));
    }
    WeightStore::from_params(WeightShape { mode, blocks }, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::WeightMode;

    #[test]
    fn round_trip_is_bit_exact() {
        let shape = WeightShape {
            mode: WeightMode::PerClause,
            blocks: vec![BlockShape { arity: 2, slots: 2, width: 3 }],
        };
        let params = vec![0.1, -0.0, f64::MIN_POSITIVE, 1e300, -3.5, f64::EPSILON];
        let w = WeightStore::from_params(shape, params).unwrap();
        let mut buf = Vec::new();
        write_checkpoint(&w, &mut buf).unwrap();
        let back = read_checkpoint(buf.as_slice()).unwrap();
        assert_eq!(back.shape(), w.shape());
        let bits = |s: &WeightStore| s.params().iter().map(|p| p.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back), bits(&w));
    }

    #[test]
    fn rejects_truncated_files() {
        let text = "dilp-weights 1\nmode per_literal\nblock 2 4 1\nparams 4\n0\n";
        assert!(matches!(read_checkpoint(text.as_bytes()), Err(Error::Parse { .. })));
    }
}
