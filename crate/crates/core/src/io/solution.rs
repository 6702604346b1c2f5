//! Solution documents, in the same keyword style as the native instance format.
//!
//! ```text
//! pup-solution 1
//! instance toy
//! method benders-as
//! status optimal
//! p 2
//! objective 17
//! best_bound 17
//! rgap_pct 0
//! cpu_s 0.0012
//! nodes 3
//! cuts 12
//! open 0 3
//! assignment 0 3 3 0
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::{parse_count, parse_scalar};

const MAGIC: &str = "pup-solution";
const VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionDoc {
    pub instance: String,
    pub method: String,
    pub status: String,
    pub p: usize,
    pub objective: f64,
    pub best_bound: f64,
    /// `None` when the relative gap is undefined.
    pub rgap_pct: Option<f64>,
    pub cpu_s: f64,
    pub nodes: usize,
    pub cuts: usize,
    pub open: Vec<usize>,
    /// Facility serving each customer.
    pub assignment: Vec<usize>,
}

fn word(s: &str) -> String {
    if s.is_empty() {
        "-".into()
    } else {
        s.split_whitespace().collect::<Vec<_>>().join("_")
    }
}

fn list(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

pub fn write_solution(doc: &SolutionDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "instance {}", word(&doc.instance));
    let _ = writeln!(out, "method {}", word(&doc.method));
    let _ = writeln!(out, "status {}", word(&doc.status));
    let _ = writeln!(out, "p {}", doc.p);
    let _ = writeln!(out, "objective {}", doc.objective);
    let _ = writeln!(out, "best_bound {}", doc.best_bound);
    match doc.rgap_pct {
        Some(g) => writeln!(out, "rgap_pct {g}"),
        None => writeln!(out, "rgap_pct n.a."),
    }
    .ok();
    let _ = writeln!(out, "cpu_s {}", doc.cpu_s);
    let _ = writeln!(out, "nodes {}", doc.nodes);
    let _ = writeln!(out, "cuts {}", doc.cuts);
    let _ = writeln!(out, "open {}", list(&doc.open));
    let _ = writeln!(out, "assignment {}", list(&doc.assignment));
    out
}

pub fn read_solution(text: &str) -> Result<SolutionDoc> {
    let mut doc = SolutionDoc {
        instance: String::new(),
        method: String::new(),
        status: String::new(),
        p: 0,
        objective: f64::NAN,
        best_bound: f64::NAN,
        rgap_pct: None,
        cpu_s: 0.0,
        nodes: 0,
        cuts: 0,
        open: Vec::new(),
        assignment: Vec::new(),
    };
    let mut seen_header = false;
    let mut seen_objective = false;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.split_whitespace();
        let key = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        if !seen_header {
            if key != MAGIC || rest != [VERSION] {
                return Err(Error::parse(line, MAGIC, "missing or unsupported solution header"));
            }
            seen_header = true;
            continue;
        }
        let one = || -> Result<&str> {
            match rest.as_slice() {
                [v] => Ok(v),
                _ => Err(Error::parse(line, key, "expected exactly one value")),
            }
        };
        let real =
            |s: &str| parse_scalar::<f64>(s).ok_or_else(|| Error::parse(line, key, format!("`{s}` is not a number")));
        let counts = || rest.iter().map(|t| parse_count(t, line, key)).collect::<Result<Vec<_>>>();
        match key {
            "instance" => doc.instance = one()?.to_string(),
            "method" => doc.method = one()?.to_string(),
            "status" => doc.status = one()?.to_string(),
            "p" => doc.p = parse_count(one()?, line, key)?,
            "objective" => {
                doc.objective = real(one()?)?;
                seen_objective = true;
            }
            "best_bound" => doc.best_bound = one()?.parse().map_err(|_| Error::parse(line, key, "not a number"))?,
            "rgap_pct" => doc.rgap_pct = if one()? == "n.a." { None } else { Some(real(one()?)?) },
            "cpu_s" => doc.cpu_s = real(one()?)?,
            "nodes" => doc.nodes = parse_count(one()?, line, key)?,
            "cuts" => doc.cuts = parse_count(one()?, line, key)?,
            "open" => doc.open = counts()?,
            "assignment" => doc.assignment = counts()?,
            other => return Err(Error::parse(line, other, "unknown keyword")),
        }
    }
    if !seen_header {
        return Err(Error::parse(1, MAGIC, "empty document"));
    }
    if !seen_objective {
        return Err(Error::parse(text.lines().count(), "objective", "missing"));
    }
    Ok(doc)
}
