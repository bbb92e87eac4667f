use serde::{Deserialize, Serialize};
use std::io::{self, BufRead, Write};
use thiserror::Error;

/// One line of an example file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleRecord {
    pub head: String,
    pub head_context: String,
    pub tail: String,
    pub tail_context: String,
    pub label: String,
    pub nodeset_id: String,
    pub head_id: String,
    pub tail_id: String,
}

#[derive(Debug, Error)]
pub enum RecordError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub fn write_records<W: Write>(mut out: W, records: &[ExampleRecord]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads line-delimited records, skipping blank lines.
pub fn read_records<R: BufRead>(input: R) -> Result<Vec<ExampleRecord>, RecordError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| RecordError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_format() {
        let r = ExampleRecord {
            head: "a".into(),
            head_context: String::new(),
            tail: "b \"q\"".into(),
            tail_context: "x || y".into(),
            label: "RA".into(),
            nodeset_id: "nodeset1".into(),
            head_id: "1".into(),
            tail_id: "2".into(),
        };
        let mut buf = Vec::new();
        write_records(&mut buf, &[r.clone(), r.clone()]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("{\"head\":\"a\",\"head_context\":\"\""));
        assert_eq!(read_records(&buf[..]).unwrap(), vec![r.clone(), r]);
        assert!(matches!(
            read_records(&b"{\"head\": 1}\n"[..]),
            Err(RecordError::Parse { line: 1, .. })
        ));
    }
}
