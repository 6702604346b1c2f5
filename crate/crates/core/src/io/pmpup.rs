//! Benchmark files for the P-median problem with user preferences.
//!
//! Assumed layout: a header `m n` (facilities, customers) optionally followed by `P`,
//! then an `m × n` cost matrix and an `m × n` disutility matrix, each stored one
//! facility per row. Disutilities are read as cardinal values. With
//! [`PmpupOptions::customer_major`] both matrices are read as `n × m` instead.

use crate::error::{Error, Result};
use crate::model::{break_ties, Instance};
use crate::scalar::Scalar;

use super::Tokens;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PmpupOptions {
    /// Overrides both the header value and the library default.
    pub p: Option<usize>,
    /// Library instance name such as `inst-533`, used to pick the default `P`.
    pub instance_id: Option<String>,
    pub customer_major: bool,
    /// Perturb tied disutilities instead of rejecting the file.
    pub break_ties: bool,
}

/// Library default: 14 facilities, 13 for instance 533.
pub fn default_pmpup_p(instance_id: Option<&str>) -> usize {
    let digits = instance_id.and_then(|s| s.rsplit(|c: char| !c.is_ascii_digit()).next()).unwrap_or("");
    if digits == "533" {
        13
    } else {
        14
    }
}

pub fn parse_pmpup<T: Scalar>(text: &str, opts: &PmpupOptions) -> Result<Instance<T>> {
    let mut tok = Tokens::new(text);
    let n_j = tok.count("facility count")?;
    let n_i = tok.count("customer count")?;
    if n_i == 0 || n_j == 0 {
        return Err(Error::parse(1, "header", "counts must be positive"));
    }
    // A third header value is P when it sits on the header line.
    let header_p = match tok.peek() {
        Some((1, _)) => Some(tok.count("p")?),
        _ => None,
    };
    let (rows, cols) = if opts.customer_major { (n_i, n_j) } else { (n_j, n_i) };
    let mut read = |field: &str| -> Result<Vec<T>> {
        let mut m = vec![T::zero(); n_i * n_j];
        for r in 0..rows {
            for k in 0..cols {
                let (i, j) = if opts.customer_major { (r, k) } else { (k, r) };
                m[i * n_j + j] = tok.number(field)?;
            }
        }
        Ok(m)
    };
    let c = read("cost")?;
    let mut g = read("disutility")?;
    tok.finish()?;
    if opts.break_ties {
        break_ties(&mut g, n_j);
    }
    let p = opts.p.or(header_p).unwrap_or_else(|| default_pmpup_p(opts.instance_id.as_deref()));
    Instance::from_flat(n_i, n_j, c, g, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    // 2 facilities, 3 customers; facility rows.
    const TOY: &str = "2 3\n1 2 3\n4 5 6\n9 1 4\n2 8 3\n";

    #[test]
    fn facility_major_is_transposed() {
        let opts = PmpupOptions { p: Some(1), ..Default::default() };
        let inst: Instance = parse_pmpup(TOY, &opts).unwrap();
        assert_eq!((inst.n_customers(), inst.n_facilities()), (3, 2));
        assert_eq!(inst.c_row(0), &[1.0, 4.0]);
        assert_eq!(inst.g_row(1), &[1.0, 8.0]);
    }

    #[test]
    fn customer_major_reads_rows_as_customers() {
        let text = "3 2\n1 2 3\n4 5 6\n9 1 4\n2 8 3\n";
        let opts = PmpupOptions { p: Some(2), customer_major: true, ..Default::default() };
        let inst: Instance = parse_pmpup(text, &opts).unwrap();
        assert_eq!((inst.n_customers(), inst.n_facilities()), (2, 3));
        assert_eq!(inst.c_row(1), &[4.0, 5.0, 6.0]);
    }

    #[test]
    fn default_p_follows_library() {
        assert_eq!(default_pmpup_p(Some("inst-333")), 14);
        assert_eq!(default_pmpup_p(Some("inst-533")), 13);
        assert_eq!(default_pmpup_p(Some("inst-1533")), 14);
        assert_eq!(default_pmpup_p(None), 14);
        let with_header = "2 3 1\n1 2 3\n4 5 6\n9 1 4\n2 8 3\n";
        let inst: Instance = parse_pmpup(with_header, &PmpupOptions::default()).unwrap();
        assert_eq!(inst.p(), 1);
    }

    #[test]
    fn truncated_and_tied_files() {
        let cut = &TOY[..TOY.len() - 4];
        assert!(matches!(parse_pmpup::<f64>(cut, &PmpupOptions::default()), Err(Error::Parse { .. })));
        let tied = "2 1\n1\n2\n5\n5\n";
        let opts = PmpupOptions { p: Some(1), ..Default::default() };
        assert!(matches!(parse_pmpup::<f64>(tied, &opts), Err(Error::InvalidInstance(_))));
        let fixed = PmpupOptions { break_ties: true, ..opts };
        assert!(parse_pmpup::<f64>(tied, &fixed).is_ok());
    }
}
