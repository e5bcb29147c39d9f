//! SDPA sparse format (`.dat-s`).
//!
//! SDPA states the primal as `min Σ c_i x_i s.t. Σ F_i x_i - F_0 ⪰ 0` and
//! the dual as `max ⟨F_0, Y⟩ s.t. ⟨F_i, Y⟩ = c_i, Y ⪰ 0`. Problems here are
//! written as that dual with `c = b`, `F_i = A_i` and `F_0 = -C`.

use std::io::{BufRead, Write};

use super::problem::{
    Block, BlockKind, Constraint, ProblemMeta, SdpProblem, SparseSymMatrix, SymEntry,
};
use crate::error::{Error, Result};

const META_TAG: &str = "ncagm:";

pub fn export_sdpa<W: Write>(problem: &SdpProblem, mut out: W) -> Result<()> {
    if let Some(meta) = problem.meta {
        writeln!(
            out,
            "* {META_TAG} m={} n={} d={} sign={}",
            meta.m, meta.n, meta.d, meta.sign
        )?;
    }
    writeln!(out, "{}", problem.num_constraints())?;
    writeln!(out, "{}", problem.blocks.len())?;
    let dims: Vec<String> = problem
        .blocks
        .iter()
        .map(|b| match b.kind {
            BlockKind::Dense => b.dim.to_string(),
            BlockKind::Diagonal => format!("-{}", b.dim),
        })
        .collect();
    writeln!(out, "{}", dims.join(" "))?;
    let rhs: Vec<String> = problem.constraints.iter().map(|c| c.rhs.to_string()).collect();
    writeln!(out, "{}", rhs.join(" "))?;
    for e in problem.objective.entries() {
        writeln!(
            out,
            "0 {} {} {} {}",
            e.block + 1,
            e.row + 1,
            e.col + 1,
            -e.value
        )?;
    }
    for (i, c) in problem.constraints.iter().enumerate() {
        for e in c.matrix.entries() {
            writeln!(
                out,
                "{} {} {} {} {}",
                i + 1,
                e.block + 1,
                e.row + 1,
                e.col + 1,
                e.value
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn export_sdpa_string(problem: &SdpProblem) -> String {
    let mut buf = Vec::new();
    export_sdpa(problem, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || ",{}()".contains(c))
        .filter(|t| !t.is_empty())
}

fn number<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("expected {what}, found {tok:?}")))
}

fn parse_meta(text: &str) -> Option<ProblemMeta> {
    let rest = text.split_once(META_TAG)?.1;
    let mut m = None;
    let mut n = None;
    let mut d = None;
    let mut sign = None;
    for kv in rest.split_whitespace() {
        let (k, v) = kv.split_once('=')?;
        match k {
            "m" => m = v.parse().ok(),
            "n" => n = v.parse().ok(),
            "d" => d = v.parse().ok(),
            "sign" => sign = v.parse().ok(),
            _ => {}
        }
    }
    Some(ProblemMeta {
        m: m?,
        n: n?,
        d: d?,
        sign: sign?,
    })
}

pub fn import_sdpa<R: BufRead>(source: R) -> Result<SdpProblem> {
    let mut meta = None;
    let mut lines = Vec::new();
    for (k, line) in source.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim_start();
        if trimmed.starts_with('"') || trimmed.starts_with('*') {
            if meta.is_none() {
                meta = parse_meta(trimmed);
            }
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        lines.push((k + 1, line));
    }
    let mut it = lines.iter();
    let mut header = |what: &str| -> Result<(usize, Vec<&str>)> {
        let (ln, line) = it
            .next()
            .ok_or_else(|| Error::parse(0, format!("missing {what}")))?;
        Ok((*ln, tokens(line).collect()))
    };

    let (ln, t) = header("number of constraints")?;
    let ncons: usize = number(t.first().copied().unwrap_or(""), ln, "number of constraints")?;
    let (ln, t) = header("number of blocks")?;
    let nblocks: usize = number(t.first().copied().unwrap_or(""), ln, "number of blocks")?;
    if nblocks == 0 {
        return Err(Error::parse(ln, "at least one block is required"));
    }
    let (ln, t) = header("block sizes")?;
    if t.len() < nblocks {
        return Err(Error::parse(
            ln,
            format!("expected {nblocks} block sizes, found {}", t.len()),
        ));
    }
    let mut blocks = Vec::with_capacity(nblocks);
    for tok in &t[..nblocks] {
        let s: i64 = number(tok, ln, "block size")?;
        blocks.push(match s {
            0 => return Err(Error::parse(ln, "block size 0")),
            s if s > 0 => Block::dense(s as usize),
            s => Block::diagonal(s.unsigned_abs() as usize),
        });
    }

    let mut rhs = Vec::with_capacity(ncons);
    while rhs.len() < ncons {
        let (ln, t) = header("right-hand side")?;
        for tok in t {
            if rhs.len() == ncons {
                return Err(Error::parse(ln, "too many right-hand side values"));
            }
            rhs.push(number::<f64>(tok, ln, "right-hand side value")?);
        }
    }

    let mut data: Vec<Vec<SymEntry>> = vec![Vec::new(); ncons + 1];
    for (ln, line) in it {
        let t: Vec<&str> = tokens(line).collect();
        if t.len() != 5 {
            return Err(Error::parse(
                *ln,
                format!("expected 5 fields \"matno blkno i j value\", found {}", t.len()),
            ));
        }
        let mat: usize = number(t[0], *ln, "matrix number")?;
        let blk: usize = number(t[1], *ln, "block number")?;
        let i: usize = number(t[2], *ln, "row index")?;
        let j: usize = number(t[3], *ln, "column index")?;
        let v: f64 = number(t[4], *ln, "value")?;
        if mat > ncons {
            return Err(Error::parse(*ln, format!("matrix number {mat} exceeds {ncons}")));
        }
        if blk == 0 || blk > nblocks {
            return Err(Error::parse(*ln, format!("block {blk} outside 1..={nblocks}")));
        }
        let b = blocks[blk - 1];
        if i == 0 || j == 0 || i > b.dim || j > b.dim {
            return Err(Error::parse(
                *ln,
                format!("entry ({i}, {j}) outside block {blk} of size {}", b.dim),
            ));
        }
        if j < i {
            return Err(Error::parse(*ln, format!("entry ({i}, {j}) below the diagonal")));
        }
        if b.kind == BlockKind::Diagonal && i != j {
            return Err(Error::parse(
                *ln,
                format!("off-diagonal entry ({i}, {j}) in diagonal block {blk}"),
            ));
        }
        if !v.is_finite() {
            return Err(Error::parse(*ln, "non-finite value"));
        }
        data[mat].push(SymEntry {
            block: blk - 1,
            row: i - 1,
            col: j - 1,
            value: if mat == 0 { -v } else { v },
        });
    }

    let mut data = data.into_iter();
    let objective = SparseSymMatrix::from_entries(data.next().expect("objective slot"));
    let constraints = data
        .zip(rhs)
        .map(|(entries, rhs)| Constraint {
            matrix: SparseSymMatrix::from_entries(entries),
            rhs,
        })
        .collect();
    Ok(SdpProblem {
        blocks,
        objective,
        constraints,
        meta,
    })
}

pub fn import_sdpa_str(text: &str) -> Result<SdpProblem> {
    import_sdpa(text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::Sign;
    use crate::sos::assemble_sdp;

    #[test]
    fn header_for_1_2() {
        let p = assemble_sdp(1, 2, Sign::Minus).unwrap();
        let text = export_sdpa_string(&p);
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('*')).collect();
        assert_eq!(&body[..3], &["3", "4", "1 1 1 1"]);
    }

    #[test]
    fn round_trip_compiled_problem() {
        let p = assemble_sdp(3, 3, Sign::Plus).unwrap();
        let q = import_sdpa_str(&export_sdpa_string(&p)).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn toy_problem() {
        let q = import_sdpa_str("\"min λ s.t. λ = 3\n1\n1\n1\n3\n0 1 1 1 -1\n1 1 1 1 1\n").unwrap();
        assert_eq!(q.blocks, vec![Block::dense(1)]);
        assert_eq!(q.objective.entries()[0].value, 1.0);
        assert_eq!(q.constraints[0].rhs, 3.0);
        assert_eq!(q.meta, None);
    }

    #[test]
    fn separators_and_diagonal_blocks() {
        let q = import_sdpa_str("2 =mDIM\n2\n{2, -3}\n(1.5, -2)\n1 2 3 3 4\n2 1 1 2 0.5\n").unwrap();
        assert_eq!(q.blocks, vec![Block::dense(2), Block::diagonal(3)]);
        assert_eq!(q.rhs(), vec![1.5, -2.0]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = import_sdpa_str("1\n1\n2\n1\n1 1 2 1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }), "{err}");
        let err = import_sdpa_str("1\n1\n2\n1\n1 1 3 3 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }));
        let err = import_sdpa_str("1\n1\n2\nx\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }));
        let err = import_sdpa_str("1\n1\n-2\n1\n1 1 1 2 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }));
        assert!(import_sdpa_str("1\n").is_err());
    }
}
