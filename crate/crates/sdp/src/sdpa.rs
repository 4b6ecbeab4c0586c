//! SDPA sparse format (`.dat-s`).
//!
//! SDPA writes its primal as `X = sum_i F_i x_i - F_0 >= 0`, so the constant
//! matrix changes sign on the way in and out. Free segments are written as a
//! diagonal block holding `+F(y)` and `-F(y)`.

use std::fmt::Write as _;

use crate::problem::{Block, BlockMatrix, SdpProblem};
use crate::SdpError;

/// Renders the problem in SDPA sparse format with 17 significant digits.
pub fn write_sdpa(problem: &SdpProblem) -> String {
    let p = problem.split_free_vars();
    let mut out = String::new();
    let _ = writeln!(out, "{}", p.constraints.len());
    let _ = writeln!(out, "{}", p.blocks.len());
    let structure: Vec<String> = p.blocks.iter().map(|b| b.to_sdpa().to_string()).collect();
    let _ = writeln!(out, "{}", structure.join(" "));
    let c: Vec<String> = p.objective.iter().map(|v| fmt_f64(*v)).collect();
    let _ = writeln!(out, "{}", c.join(" "));
    for &(b, r, col, v) in &p.f0.entries {
        let _ = writeln!(out, "0 {} {} {} {}", b + 1, r + 1, col + 1, fmt_f64(-v));
    }
    for (i, f) in p.constraints.iter().enumerate() {
        for &(b, r, col, v) in &f.entries {
            let _ = writeln!(out, "{} {} {} {} {}", i + 1, b + 1, r + 1, col + 1, fmt_f64(v));
        }
    }
    out
}

fn fmt_f64(v: f64) -> String {
    // `{:.16e}` keeps 17 significant digits, enough to round-trip any f64.
    format!("{v:.16e}")
}

/// Parses SDPA sparse text. Leading lines starting with `"` or `*` are comments.
pub fn read_sdpa(text: &str) -> Result<SdpProblem, SdpError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());

    let mut header = Vec::new();
    for (no, line) in lines.by_ref() {
        if header.is_empty() && (line.starts_with('"') || line.starts_with('*')) {
            continue;
        }
        header.push((no, line));
        if header.len() == 2 {
            break;
        }
    }
    if header.len() < 2 {
        return Err(SdpError::Parse { line: 0, msg: "missing mDIM/nBLOCK header".into() });
    }
    let m: usize = first_token(header[0].1, header[0].0)?;
    let nblock: usize = first_token(header[1].1, header[1].0)?;

    // Block structure and the cost vector may spill across lines.
    let mut pending = lines.peekable();
    let mut structure: Vec<i64> = Vec::new();
    let mut last_line = header[1].0;
    while structure.len() < nblock {
        let (no, line) =
            pending.next().ok_or(SdpError::Parse { line: last_line, msg: "truncated block structure".into() })?;
        last_line = no;
        for tok in tokens(line) {
            if structure.len() == nblock {
                break;
            }
            structure.push(parse_tok(tok, no)?);
        }
    }
    let blocks = structure.into_iter().map(Block::from_sdpa).collect::<Result<Vec<_>, _>>()?;

    let mut objective: Vec<f64> = Vec::with_capacity(m);
    while objective.len() < m {
        let (no, line) =
            pending.next().ok_or(SdpError::Parse { line: last_line, msg: "truncated cost vector".into() })?;
        last_line = no;
        for tok in tokens(line) {
            if objective.len() == m {
                break;
            }
            objective.push(parse_tok(tok, no)?);
        }
    }

    let mut f0 = BlockMatrix::new();
    let mut constraints = vec![BlockMatrix::new(); m];
    for (no, line) in pending {
        let toks: Vec<&str> = tokens(line).collect();
        if toks.len() < 5 {
            return Err(SdpError::Parse { line: no, msg: format!("expected 5 fields, got {}", toks.len()) });
        }
        let mat: usize = parse_tok(toks[0], no)?;
        let blk: usize = parse_tok(toks[1], no)?;
        let r: usize = parse_tok(toks[2], no)?;
        let c: usize = parse_tok(toks[3], no)?;
        let v: f64 = parse_tok(toks[4], no)?;
        if blk == 0 || blk > blocks.len() || r == 0 || c == 0 || mat > m {
            return Err(SdpError::Parse { line: no, msg: "index out of range".into() });
        }
        let size = blocks[blk - 1].size();
        if r > size || c > size {
            return Err(SdpError::Parse { line: no, msg: "entry outside its block".into() });
        }
        if mat == 0 {
            f0.push(blk - 1, r - 1, c - 1, -v);
        } else {
            constraints[mat - 1].push(blk - 1, r - 1, c - 1, v);
        }
    }
    SdpProblem::new(blocks, 0, f0, constraints, objective)
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|ch: char| ch.is_whitespace() || matches!(ch, ',' | '(' | ')' | '{' | '}')).filter(|t| !t.is_empty())
}

fn first_token<T: std::str::FromStr>(line: &str, no: usize) -> Result<T, SdpError> {
    let tok = tokens(line).next().ok_or(SdpError::Parse { line: no, msg: "empty line".into() })?;
    parse_tok(tok, no)
}

fn parse_tok<T: std::str::FromStr>(tok: &str, no: usize) -> Result<T, SdpError> {
    // Fortran-style exponents occasionally show up in hand-written files.
    let cleaned = tok.replace(['D', 'd'], "e");
    cleaned.parse().map_err(|_| SdpError::Parse { line: no, msg: format!("cannot parse `{tok}`") })
}
