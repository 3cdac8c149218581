//! Comma-separated reports with a hashed footer (version, seed, config hash).

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// `key=value` lines written after the rows, each prefixed by `# `.
    pub notes: Vec<String>,
}

pub const CONTENT_HASH_KEY: &str = "# content_hash=";
pub const CONFIG_HASH_KEY: &str = "# config_hash=";

impl Report {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl std::fmt::Display) {
        self.notes.push(format!("{key}={value}"));
    }

    pub fn note_num(&mut self, key: &str, value: f64) {
        self.note(key, format!("{value:.16e}"));
    }

    /// Numeric column by name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        self.rows
            .iter()
            .map(|r| match &r[j] {
                Cell::Num(x) => Some(*x),
                Cell::Text(_) => None,
            })
            .collect()
    }

    /// Full text including the footer. The content hash covers every byte
    /// before its own line.
    pub fn render(&self, seed: u64, config_hash: &str) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for n in &self.notes {
            out.push_str("# ");
            out.push_str(n);
            out.push('\n');
        }
        out.push_str(&format!("# tool=curveheat {}\n", env!("CARGO_PKG_VERSION")));
        out.push_str(&format!("# seed={seed}\n"));
        out.push_str(&format!("{CONFIG_HASH_KEY}{config_hash}\n"));
        let digest = hex::encode(Sha256::digest(out.as_bytes()));
        out.push_str(&format!("{CONTENT_HASH_KEY}{digest}\n"));
        out
    }
}

/// Checks the content hash of a rendered report and, if given, its
/// config hash.
pub fn verify(text: &str, expected_config: Option<&str>) -> Result<()> {
    let fail = |m: &str| Error::InvalidParameter(format!("report verification failed: {m}"));
    let pos = text.rfind(CONTENT_HASH_KEY).ok_or_else(|| fail("no content hash"))?;
    let (body, tail) = text.split_at(pos);
    let stated = tail[CONTENT_HASH_KEY.len()..].trim_end_matches('\n');
    if stated.contains('\n') {
        return Err(fail("content after the content hash"));
    }
    if hex::encode(Sha256::digest(body.as_bytes())) != stated {
        return Err(fail("content hash mismatch"));
    }
    if let Some(want) = expected_config {
        let got = body
            .lines()
            .find_map(|l| l.strip_prefix(CONFIG_HASH_KEY))
            .ok_or_else(|| fail("no config hash"))?;
        if got != want {
            return Err(fail("config hash mismatch"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new(&["t", "H"]);
        r.push(vec![0.1.into(), (1.0 / 3.0).into()]);
        r.push(vec![1.0.into(), f64::MIN_POSITIVE.into()]);
        r.note("summary", "ok");
        r
    }

    #[test]
    fn numbers_round_trip() {
        let text = sample().render(3, "abc");
        let row: Vec<f64> = text
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .map(|x| x.parse().unwrap())
            .collect();
        assert_eq!(row[1].to_bits(), (1.0f64 / 3.0).to_bits());
        assert!(text.lines().nth(1).unwrap().starts_with("1.0000000000000001e-1,"));
    }

    #[test]
    fn tamper_detection() {
        let text = sample().render(3, "abc");
        verify(&text, Some("abc")).unwrap();
        assert!(verify(&text, Some("abd")).is_err());
        let edited = text.replacen("3.3333333333333331e-1", "3.3333333333333332e-1", 1);
        assert_ne!(edited, text);
        assert!(verify(&edited, None).is_err());
        assert!(verify(&text.replace("# seed=3", "# seed=4"), None).is_err());
        assert!(verify("t,H\n", None).is_err());
    }

    #[test]
    fn column_lookup() {
        let r = sample();
        assert_eq!(r.column("t").unwrap(), vec![0.1, 1.0]);
        assert!(r.column("x").is_none());
    }
}
