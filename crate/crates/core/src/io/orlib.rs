//! OR-Library capacitated/uncapacitated warehouse location files.
//!
//! Layout: `m n`, then `m` lines of `capacity fixed_cost` (ignored; the capacity may be
//! the literal word `capacity`), then for each of the `n` customers its demand followed
//! by `m` allocation costs. Unit distances are `l_ij = c_ij / d_i` and disutilities are
//! drawn uniformly from `[(1 − δ) l_ij, (1 + δ) l_ij]`, row-major.

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::scalar::Scalar;

use super::rnd::Uniform;
use super::Tokens;

pub fn parse_orlib_cap<T: Scalar>(text: &str, delta: f64, seed: u64, p: usize) -> Result<Instance<T>> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidArgument(format!("delta must lie in [0, 1), got {delta}")));
    }
    let mut tok = Tokens::new(text);
    let n_j = tok.count("facility count")?;
    let n_i = tok.count("customer count")?;
    if n_i == 0 || n_j == 0 {
        return Err(Error::parse(1, "header", "counts must be positive"));
    }
    for j in 0..n_j {
        let (line, cap) = tok.next("capacity")?;
        if cap != "capacity" && super::parse_scalar::<f64>(cap).is_none() {
            return Err(Error::parse(line, "capacity", format!("facility {j}: `{cap}` is not a number")));
        }
        tok.number::<f64>("fixed cost")?;
    }
    let mut u = Uniform::new(seed);
    let mut c = Vec::with_capacity(n_i * n_j);
    let mut g = Vec::with_capacity(n_i * n_j);
    for i in 0..n_i {
        let d_line = tok.peek().map_or(0, |(l, _)| l);
        let d: f64 = tok.number("demand")?;
        if d < 0.0 {
            return Err(Error::parse(d_line, "demand", format!("customer {i} has negative demand")));
        }
        for j in 0..n_j {
            let line = tok.peek().map_or(0, |(l, _)| l);
            let cost: f64 = tok.number("allocation cost")?;
            let l = if d > 0.0 {
                cost / d
            } else if cost == 0.0 {
                0.0
            } else {
                return Err(Error::parse(
                    line,
                    "demand",
                    format!("customer {i} has zero demand but positive cost to facility {j}"),
                ));
            };
            c.push(T::lit(cost));
            g.push(T::lit(u.around(l, delta)));
        }
    }
    tok.finish()?;
    Instance::from_flat(n_i, n_j, c, g, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = "2 1\n100 5\ncapacity 7\n5\n10 20\n";

    #[test]
    fn toy_file() {
        let inst: Instance = parse_orlib_cap(TOY, 0.0, 1, 1).unwrap();
        assert_eq!(inst.n_customers(), 1);
        assert_eq!(inst.n_facilities(), 2);
        assert_eq!(inst.c_row(0), &[10.0, 20.0]);
        assert_eq!(inst.g_row(0), &[2.0, 4.0]);
    }

    #[test]
    fn perturbed_disutilities() {
        let inst: Instance = parse_orlib_cap(TOY, 0.5, 9, 1).unwrap();
        assert!((1.0..=3.0).contains(&inst.g(0, 0)));
        assert!((2.0..=6.0).contains(&inst.g(0, 1)));
        let again: Instance = parse_orlib_cap(TOY, 0.5, 9, 1).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn costs_may_wrap_lines() {
        let text = "3 2\n1 1\n1 1\n1 1\n2\n2 4\n6\n4\n1 2 3\n";
        let inst: Instance = parse_orlib_cap(text, 0.0, 0, 2).unwrap();
        assert_eq!(inst.g_row(0), &[1.0, 2.0, 3.0]);
        assert_eq!(inst.g_row(1), &[0.25, 0.5, 0.75]);
    }

    #[test]
    fn malformed_files() {
        assert!(parse_orlib_cap::<f64>("", 0.0, 0, 1).is_err());
        assert!(parse_orlib_cap::<f64>("2 x\n", 0.0, 0, 1).is_err());
        assert!(parse_orlib_cap::<f64>("2 1\n1 1\n1 1\n5\n10\n", 0.0, 0, 1).is_err());
        assert!(parse_orlib_cap::<f64>("2 1\n1 1\n1 1\n5\n10 20 30\n", 0.0, 0, 1).is_err());
        assert!(parse_orlib_cap::<f64>(TOY, 1.0, 0, 1).is_err());
        match parse_orlib_cap::<f64>("2 1\n1 1\n1 1\n0\n0 3\n", 0.0, 0, 1) {
            Err(Error::Parse { line, field, .. }) => assert_eq!((line, field.as_str()), (5, "demand")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_demand_with_zero_costs_fails_validation() {
        // l = 0 everywhere gives zero disutilities, which the model rejects.
        assert!(matches!(parse_orlib_cap::<f64>("2 1\n1 1\n1 1\n0\n0 0\n", 0.0, 0, 1), Err(Error::InvalidInstance(_))));
    }
}
