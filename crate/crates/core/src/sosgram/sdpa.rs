//! SDPA sparse (`.dat-s`) writer and reader.
//!
//! `min ⟨C, X⟩ s.t. ⟨A_i, X⟩ = b_i` is written in SDPA's dual form:
//! `F_i = A_i`, `c = b` and `F_0 = −C`.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::json;

use crate::error::{Error, Result};
use crate::sdpsolve::{ProblemDims, SdpProblem, SparseSym};

/// Serializes `p`. Values use the shortest round-trip representation, so
/// reading the text back reproduces every entry bit for bit.
pub fn write_sdpa(p: &SdpProblem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", p.a.len());
    let _ = writeln!(out, "1");
    let _ = writeln!(out, "{}", p.block());
    let b: Vec<String> = p.b.iter().map(|v| format!("{v}")).collect();
    let _ = writeln!(out, "{}", b.join(" "));
    for &(i, j, v) in p.c.entries() {
        let _ = writeln!(out, "0 1 {} {} {}", i + 1, j + 1, -v);
    }
    for (r, a) in p.a.iter().enumerate() {
        for &(i, j, v) in a.entries() {
            let _ = writeln!(out, "{} 1 {} {} {}", r + 1, i + 1, j + 1, v);
        }
    }
    out
}

pub fn export_sdpa(p: &SdpProblem, path: &Path) -> Result<()> {
    std::fs::write(path, write_sdpa(p)).map_err(|e| Error::io(path, e))
}

fn parse_err(line: usize, what: impl std::fmt::Display) -> Error {
    Error::Sdpa(format!("line {line}: {what}"))
}

/// Parses single-block SDPA sparse text. Leading `"` or `*` comment lines and
/// the separators `, ( ) { }` are accepted.
pub fn read_sdpa(text: &str) -> Result<SdpProblem> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .skip_while(|(_, l)| l.starts_with('"') || l.starts_with('*'))
        .filter(|(_, l)| !l.is_empty());
    let mut header = |what: &str| -> Result<(usize, Vec<String>)> {
        let (n, l) = lines
            .next()
            .ok_or_else(|| Error::Sdpa(format!("missing {what}")))?;
        let toks = l
            .split(|c: char| c.is_whitespace() || ",(){}".contains(c))
            .filter(|t| !t.is_empty())
            .map(str::to_owned)
            .collect();
        Ok((n, toks))
    };
    let int = |n: usize, t: &str| -> Result<i64> {
        t.parse::<i64>().map_err(|_| parse_err(n, format!("expected integer, got `{t}`")))
    };
    let float = |n: usize, t: &str| -> Result<f64> {
        t.parse::<f64>().map_err(|_| parse_err(n, format!("expected number, got `{t}`")))
    };

    let (n, t) = header("constraint count")?;
    let m = int(n, t.first().ok_or_else(|| parse_err(n, "empty"))?)? as usize;
    let (n, t) = header("block count")?;
    if int(n, t.first().ok_or_else(|| parse_err(n, "empty"))?)? != 1 {
        return Err(parse_err(n, "only single-block problems are supported"));
    }
    let (n, t) = header("block sizes")?;
    let block = int(n, t.first().ok_or_else(|| parse_err(n, "empty"))?)?;
    if block <= 0 {
        return Err(parse_err(n, "diagonal blocks are not supported"));
    }
    let block = block as usize;
    let (n, t) = header("objective vector")?;
    if t.len() != m {
        return Err(parse_err(n, format!("expected {m} objective entries, got {}", t.len())));
    }
    let b = t.iter().map(|s| float(n, s)).collect::<Result<Vec<_>>>()?;

    let mut c = SparseSym::new(block);
    let mut a = vec![SparseSym::new(block); m];
    for (n, l) in lines {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 5 {
            return Err(parse_err(n, "expected `matno blkno i j value`"));
        }
        let mat = int(n, t[0])?;
        let blk = int(n, t[1])?;
        let i = int(n, t[2])?;
        let j = int(n, t[3])?;
        let v = float(n, t[4])?;
        if blk != 1 || i < 1 || j < 1 || i as usize > block || j as usize > block {
            return Err(parse_err(n, "entry outside the block"));
        }
        let (i, j) = (i as usize - 1, j as usize - 1);
        match mat {
            0 => c.push(i, j, -v),
            r if r >= 1 && r as usize <= m => a[r as usize - 1].push(i, j, v),
            _ => return Err(parse_err(n, format!("matrix number {mat} out of range"))),
        }
    }
    c.canonicalize();
    for ai in &mut a {
        ai.canonicalize();
    }
    Ok(SdpProblem {
        c,
        a,
        b,
        dims: ProblemDims {
            n: block * block,
            m,
            s: block,
            block,
        },
    })
}

pub fn import_sdpa(path: &Path) -> Result<SdpProblem> {
    read_sdpa(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

fn sparse_json(a: &SparseSym) -> serde_json::Value {
    json!(a.entries().iter().map(|&(i, j, v)| json!([i, j, v])).collect::<Vec<_>>())
}

/// `(A, b, c, K)` with dimensions, as JSON. Matrices are upper-triangle
/// triplets `[i, j, v]` with 0-based indices.
pub fn dump_json(p: &SdpProblem) -> serde_json::Value {
    json!({
        "dims": { "N": p.dims.n, "M": p.dims.m, "S": p.dims.s },
        "K": { "psd": [p.block()] },
        "c": sparse_json(&p.c),
        "A": p.a.iter().map(sparse_json).collect::<Vec<_>>(),
        "b": p.b,
    })
}
