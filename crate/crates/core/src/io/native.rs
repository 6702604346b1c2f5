//! Native instance format.
//!
//! ```text
//! # comments run to the end of the line
//! pup-instance 1
//! n_customers 2
//! n_facilities 3
//! p 2
//! customer_labels a b          (optional)
//! facility_labels f g h        (optional)
//! c
//! 1 2 3
//! 4 5 6
//! g
//! 3 1 2
//! 1 2 3
//! ```
//!
//! Matrices are row-major with one customer per line. Normalized disutilities are
//! recomputed on read.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::scalar::Scalar;

use super::{parse_count, parse_scalar};

pub const NATIVE_VERSION: u32 = 1;
const MAGIC: &str = "pup-instance";

pub fn write_native<T: Scalar>(inst: &Instance<T>) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {NATIVE_VERSION}");
    let _ = writeln!(out, "n_customers {}", inst.n_customers());
    let _ = writeln!(out, "n_facilities {}", inst.n_facilities());
    let _ = writeln!(out, "p {}", inst.p());
    for (key, labels) in [("customer_labels", &inst.customer_labels), ("facility_labels", &inst.facility_labels)] {
        if let Some(labels) = labels {
            if let Some(bad) =
                labels.iter().find(|l| l.is_empty() || l.contains(char::is_whitespace) || l.contains('#'))
            {
                return Err(Error::InvalidArgument(format!("label `{bad}` cannot be written")));
            }
            let _ = writeln!(out, "{key} {}", labels.join(" "));
        }
    }
    for (key, rows) in [("c", inst.c_flat()), ("g", inst.g_flat())] {
        let _ = writeln!(out, "{key}");
        for row in rows.chunks(inst.n_facilities()) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
    }
    Ok(out)
}

pub fn read_native<T: Scalar>(text: &str) -> Result<Instance<T>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let last = text.lines().count().max(1);

    let (line, header) = lines.next().ok_or_else(|| Error::parse(last, MAGIC, "empty document"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(Error::parse(line, MAGIC, "missing format header"));
    }
    let version = parts.next().ok_or_else(|| Error::parse(line, "version", "missing"))?;
    if version != NATIVE_VERSION.to_string() {
        return Err(Error::parse(line, "version", format!("unsupported version {version}, expected {NATIVE_VERSION}")));
    }

    let (mut n_i, mut n_j, mut p) = (None, None, None);
    let (mut c, mut g) = (None, None);
    let (mut cl, mut fl) = (None, None);
    while let Some((line, content)) = lines.next() {
        let mut parts = content.split_whitespace();
        let key = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        let single = |field: &str| -> Result<usize> {
            match rest.as_slice() {
                [v] => parse_count(v, line, field),
                _ => Err(Error::parse(line, field, "expected exactly one value")),
            }
        };
        match key {
            "n_customers" => n_i = Some(single(key)?),
            "n_facilities" => n_j = Some(single(key)?),
            "p" => p = Some(single(key)?),
            "customer_labels" => cl = Some(rest.iter().map(|s| s.to_string()).collect::<Vec<_>>()),
            "facility_labels" => fl = Some(rest.iter().map(|s| s.to_string()).collect::<Vec<_>>()),
            "c" | "g" => {
                if !rest.is_empty() {
                    return Err(Error::parse(line, key, "matrix rows start on the next line"));
                }
                let rows = n_i.ok_or_else(|| Error::parse(line, "n_customers", "must precede the matrices"))?;
                let cols = n_j.ok_or_else(|| Error::parse(line, "n_facilities", "must precede the matrices"))?;
                let mut m = Vec::with_capacity(rows * cols);
                for r in 0..rows {
                    let (line, row) =
                        lines.next().ok_or_else(|| Error::parse(last, key, format!("row {r} missing")))?;
                    let vals: Vec<&str> = row.split_whitespace().collect();
                    if vals.len() != cols {
                        return Err(Error::parse(
                            line,
                            key,
                            format!("row {r} has {} values, expected {cols}", vals.len()),
                        ));
                    }
                    for tok in vals {
                        m.push(
                            parse_scalar::<T>(tok)
                                .ok_or_else(|| Error::parse(line, key, format!("`{tok}` is not a finite number")))?,
                        );
                    }
                }
                if key == "c" {
                    c = Some(m)
                } else {
                    g = Some(m)
                }
            }
            other => return Err(Error::parse(line, other, "unknown keyword")),
        }
    }
    let missing = |f: &str| Error::parse(last, f, "missing");
    let n_i = n_i.ok_or_else(|| missing("n_customers"))?;
    let n_j = n_j.ok_or_else(|| missing("n_facilities"))?;
    let p = p.ok_or_else(|| missing("p"))?;
    let c = c.ok_or_else(|| missing("c"))?;
    let g = g.ok_or_else(|| missing("g"))?;
    let mut inst = Instance::from_flat(n_i, n_j, c, g, p)?;
    if let Some(l) = &cl {
        if l.len() != n_i {
            return Err(Error::Shape(format!("{} customer labels for {n_i} customers", l.len())));
        }
    }
    if let Some(l) = &fl {
        if l.len() != n_j {
            return Err(Error::Shape(format!("{} facility labels for {n_j} facilities", l.len())));
        }
    }
    inst.customer_labels = cl;
    inst.facility_labels = fl;
    Ok(inst)
}
