use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::regge_analysis::Selection;

/// Scripted pole picks for a non-interactive second step.
///
/// ```text
/// label resonance
/// seed 8.2356 0.3350      # nearest windowed pole at the first energy
/// seed id 2               # or by candidate index
/// at 31.0 7.9 0.31        # by-hand pick at E = 31 meV
/// at 32.0 id 0
/// at 33.0 skip
/// ```
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SelectionScript {
    pub label: Option<String>,
    pub seed: Option<Selection>,
    pub picks: Vec<(f64, Selection)>,
}

fn parse_pick(words: &[&str], line: usize) -> Result<Selection> {
    let bad = || Error::Parse {
        path: "selections".into(),
        line,
        message: format!("cannot read a pole pick from '{}'", words.join(" ")),
    };
    match words {
        ["skip"] => Ok(Selection::Skip),
        ["id", n] => n.parse().map(Selection::Index).map_err(|_| bad()),
        [re, im] => {
            let re: f64 = re.parse().map_err(|_| bad())?;
            let im: f64 = im.parse().map_err(|_| bad())?;
            Ok(Selection::Near(Complex64::new(re, im)))
        }
        _ => Err(bad()),
    }
}

impl SelectionScript {
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = SelectionScript::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            match words[0] {
                "label" if words.len() == 2 => out.label = Some(words[1].to_string()),
                "seed" => out.seed = Some(parse_pick(&words[1..], i + 1)?),
                "at" if words.len() >= 3 => {
                    let e: f64 = words[1].parse().map_err(|_| Error::Parse {
                        path: "selections".into(),
                        line: i + 1,
                        message: format!("malformed energy '{}'", words[1]),
                    })?;
                    out.picks.push((e, parse_pick(&words[2..], i + 1)?));
                }
                _ => {
                    return Err(Error::Parse {
                        path: "selections".into(),
                        line: i + 1,
                        message: format!("unknown directive '{line}'"),
                    })
                }
            }
        }
        Ok(out)
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SelectionScript::parse(&text)
    }

    /// Pick for a given energy; the first energy falls back to the seed.
    pub fn pick_for(&self, energy: f64, is_first: bool) -> Option<Selection> {
        let tol = 1e-6 * energy.abs().max(1.0);
        self.picks
            .iter()
            .find(|(e, _)| (e - energy).abs() <= tol)
            .map(|(_, s)| *s)
            .or(if is_first { self.seed } else { None })
    }
}
