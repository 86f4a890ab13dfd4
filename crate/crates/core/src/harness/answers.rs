//! Answer files: a `worker,b1,...,bN` header, then one row per worker with
//! tokens `0`, `1` or `λ` (also `-` and `skip`).

use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::report::write_csv;
use crate::model::{AnswerSymbol, AnswerWord};

fn parse_error(line: u64, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

pub fn parse_symbol(token: &str) -> Option<AnswerSymbol> {
    match token.trim() {
        "0" => Some(AnswerSymbol::Zero),
        "1" => Some(AnswerSymbol::One),
        "λ" | "-" | "skip" => Some(AnswerSymbol::Skip),
        _ => None,
    }
}

pub fn symbol_token(symbol: AnswerSymbol) -> &'static str {
    match symbol {
        AnswerSymbol::Zero => "0",
        AnswerSymbol::One => "1",
        AnswerSymbol::Skip => "λ",
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(text.as_bytes())
}

fn record_line(record: &csv::StringRecord, fallback: u64) -> u64 {
    record.position().map_or(fallback, |p| p.line())
}

fn map_csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    parse_error(line, 0, e.to_string())
}

// Validates `prefix b1 ... bN` (prefix may be absent) and returns N.
fn check_header(headers: &csv::StringRecord, prefix: Option<&str>) -> Result<usize> {
    let mut fields = headers.iter().map(str::trim).enumerate();
    if let Some(expected) = prefix {
        match fields.next() {
            Some((_, name)) if name == expected => {}
            other => {
                let found = other.map_or("", |(_, n)| n);
                return Err(parse_error(1, 1, format!("expected column `{expected}`, found `{found}`")));
            }
        }
    }
    let offset = usize::from(prefix.is_some());
    let mut count = 0;
    for (i, name) in fields {
        let expected = format!("b{}", i + 1 - offset);
        if name != expected {
            return Err(parse_error(1, i + 1, format!("expected column `{expected}`, found `{name}`")));
        }
        count += 1;
    }
    if count == 0 {
        return Err(parse_error(1, offset + 1, "no answer columns"));
    }
    Ok(count)
}

pub fn parse_answers_str(text: &str) -> Result<(usize, Vec<AnswerWord>)> {
    let mut reader = reader(text);
    let n = check_header(reader.headers().map_err(map_csv_error)?, Some("worker"))?;
    let mut answers = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(map_csv_error)?;
        let line = record_line(&record, row as u64 + 2);
        if record.len() != n + 1 {
            return Err(parse_error(line, record.len().min(n + 1) + 1, format!("expected {} fields, found {}", n + 1, record.len())));
        }
        let worker = record[0]
            .trim()
            .parse::<usize>()
            .map_err(|_| parse_error(line, 1, format!("invalid worker id `{}`", &record[0])))?;
        let symbols = record
            .iter()
            .skip(1)
            .enumerate()
            .map(|(i, token)| {
                parse_symbol(token).ok_or_else(|| parse_error(line, i + 2, format!("invalid answer token `{token}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        answers.push(AnswerWord::new(worker, symbols));
    }
    Ok((n, answers))
}

pub fn parse_answer_file(path: &Path) -> Result<(usize, Vec<AnswerWord>)> {
    parse_answers_str(&std::fs::read_to_string(path)?)
}

pub fn answers_to_string(answers: &[AnswerWord]) -> Result<String> {
    let n = answers.first().map_or(0, AnswerWord::len);
    let mut header = vec!["worker".to_string()];
    header.extend((1..=n).map(|i| format!("b{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(
        &header,
        answers.iter().map(|w| {
            let mut row = vec![w.worker_id.to_string()];
            row.extend(w.symbols.iter().map(|&s| symbol_token(s).to_string()));
            row
        }),
    )
}

pub fn write_answer_file(path: &Path, answers: &[AnswerWord]) -> Result<()> {
    std::fs::write(path, answers_to_string(answers)?)?;
    Ok(())
}

/// Gold-standard bits: a `b1,...,bT` header and one row of `0`/`1`.
pub fn parse_gold_str(text: &str) -> Result<Vec<u8>> {
    let mut reader = reader(text);
    let t = check_header(reader.headers().map_err(map_csv_error)?, None)?;
    let mut records = reader.records();
    let record = records
        .next()
        .ok_or_else(|| parse_error(2, 1, "missing gold row"))?
        .map_err(map_csv_error)?;
    let line = record_line(&record, 2);
    if record.len() != t {
        return Err(parse_error(line, record.len().min(t) + 1, format!("expected {t} fields, found {}", record.len())));
    }
    let gold = record
        .iter()
        .enumerate()
        .map(|(i, token)| match token.trim() {
            "0" => Ok(0),
            "1" => Ok(1),
            other => Err(parse_error(line, i + 1, format!("gold bits must be 0 or 1, found `{other}`"))),
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(extra) = records.next() {
        let line = extra.map_or(line + 1, |r| record_line(&r, line + 1));
        return Err(parse_error(line, 1, "gold file has more than one row"));
    }
    Ok(gold)
}

pub fn parse_gold_file(path: &Path) -> Result<Vec<u8>> {
    parse_gold_str(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AnswerSymbol::{One, Skip, Zero};

    #[test]
    fn parses_the_format() {
        let (n, answers) = parse_answers_str("worker,b1,b2,b3\n0,1,λ,0\n").unwrap();
        assert_eq!(n, 3);
        assert_eq!(answers, vec![AnswerWord::new(0, vec![One, Skip, Zero])]);
        let (_, aliases) = parse_answers_str("worker,b1,b2\n4,-,skip\n5, 1 ,0\n").unwrap();
        assert_eq!(aliases[0].symbols, vec![Skip, Skip]);
        assert_eq!(aliases[1].worker_id, 5);
    }

    #[test]
    fn reports_positions() {
        let err = parse_answers_str("worker,b1,b2\n0,1,0\n1,1,x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, column: 3, .. }), "{err:?}");
        let err = parse_answers_str("worker,b1,b3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, column: 3, .. }), "{err:?}");
        let err = parse_answers_str("worker,b1\n0,1,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn round_trip() {
        let answers = vec![AnswerWord::new(0, vec![One, Skip]), AnswerWord::new(7, vec![Zero, Zero])];
        let text = answers_to_string(&answers).unwrap();
        assert_eq!(text, "worker,b1,b2\n0,1,λ\n7,0,0\n");
        assert_eq!(parse_answers_str(&text).unwrap(), (2, answers));
    }

    #[test]
    fn gold_files() {
        assert_eq!(parse_gold_str("b1,b2,b3\n1,0,1\n").unwrap(), vec![1, 0, 1]);
        assert!(parse_gold_str("b1,b2\n1,λ\n").is_err());
        assert!(parse_gold_str("b1\n1\n0\n").is_err());
    }
}
