//! CSV dumps of transitions.
//!
//! Header: `s_0..s_{d-1}, a_0..a_{k-1}, s_next_0..s_next_{d-1}, done, domain_tag`.
//! Values use 17 significant digits so a write/read cycle is exact. Lines
//! starting with `#` are ignored on read.

use std::io::{Read, Write};
use std::path::Path;

use super::{Domain, Transition};
use crate::error::{Error, Result};

pub fn header(state_dim: usize, action_dim: usize) -> Vec<String> {
    let mut h = Vec::with_capacity(2 * state_dim + action_dim + 2);
    h.extend((0..state_dim).map(|i| format!("s_{i}")));
    h.extend((0..action_dim).map(|i| format!("a_{i}")));
    h.extend((0..state_dim).map(|i| format!("s_next_{i}")));
    h.push("done".into());
    h.push("domain_tag".into());
    h
}

pub fn write_transitions<'a, W, I>(w: W, rows: I, state_dim: usize, action_dim: usize) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a Transition>,
{
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header(state_dim, action_dim))?;
    for t in rows {
        if t.s.len() != state_dim || t.a.len() != action_dim || t.s_next.len() != state_dim {
            return Err(Error::DimensionMismatch {
                context: "transition dump",
                expected: 2 * state_dim + action_dim,
                got: t.s.len() + t.a.len() + t.s_next.len(),
            });
        }
        let mut rec: Vec<String> = t
            .s
            .iter()
            .chain(&t.a)
            .chain(&t.s_next)
            .map(|v| format!("{v:.16e}"))
            .collect();
        rec.push(if t.done { "1".into() } else { "0".into() });
        rec.push(t.domain.as_str().into());
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// A parsed transition and the 1-based file line it came from.
#[derive(Clone, Debug)]
pub struct TransitionRow {
    pub line: u64,
    pub transition: Transition,
}

/// Reads a transition dump. The evaluation reward of every returned
/// transition is NaN (it is not persisted).
pub fn read_transitions<R: Read>(
    r: R,
    path: &Path,
    state_dim: usize,
    action_dim: usize,
) -> Result<Vec<TransitionRow>> {
    let malformed = |line: u64, message: String| Error::Malformed {
        path: path.to_owned(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(r);
    let expected = header(state_dim, action_dim);
    let got = reader.headers()?.clone();
    let header_line = got.position().map(|p| p.line()).unwrap_or(1);
    if got.iter().ne(expected.iter().map(String::as_str)) {
        return Err(malformed(
            header_line,
            format!("expected header {}", expected.join(",")),
        ));
    }
    let width = expected.len();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != width {
            return Err(malformed(
                line,
                format!("expected {width} columns, found {}", rec.len()),
            ));
        }
        let mut nums = Vec::with_capacity(width - 2);
        for field in rec.iter().take(width - 2) {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| malformed(line, format!("not a number: '{field}'")))?;
            if !v.is_finite() {
                return Err(malformed(line, format!("non-finite value '{field}'")));
            }
            nums.push(v);
        }
        let done = match rec[width - 2].trim() {
            "1" | "true" => true,
            "0" | "false" => false,
            other => return Err(malformed(line, format!("bad done flag '{other}'"))),
        };
        let domain = Domain::parse(rec[width - 1].trim())
            .ok_or_else(|| malformed(line, format!("bad domain tag '{}'", &rec[width - 1])))?;
        let s = nums[..state_dim].to_vec();
        let a = nums[state_dim..state_dim + action_dim].to_vec();
        let s_next = nums[state_dim + action_dim..].to_vec();
        rows.push(TransitionRow {
            line,
            transition: Transition::new(s, a, s_next, done, domain, f64::NAN),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        assert_eq!(
            header(2, 1),
            vec!["s_0", "s_1", "a_0", "s_next_0", "s_next_1", "done", "domain_tag"]
        );
    }

    #[test]
    fn wrong_column_count_names_the_line() {
        let text = "s_0,a_0,s_next_0,done,domain_tag\n1,2,3,0,source\n1,2,0,source\n";
        let err = read_transitions(text.as_bytes(), Path::new("x.csv"), 1, 1).unwrap_err();
        match err {
            Error::Malformed { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e:?}"),
        }
    }
}
