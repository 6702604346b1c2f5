//! Instance readers, writers and generators.

mod native;
mod orlib;
mod pmpup;
mod rnd;
mod solution;

pub use native::{read_native, write_native, NATIVE_VERSION};
pub use orlib::parse_orlib_cap;
pub use pmpup::{default_pmpup_p, parse_pmpup, PmpupOptions};
pub use rnd::{generate_rnd, RndSpec, GENERATOR};
pub use solution::{read_solution, write_solution, SolutionDoc};

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Whitespace-separated tokens tagged with 1-based line numbers.
pub(crate) struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        let mut items = Vec::new();
        let mut last_line = 0;
        for (k, line) in text.lines().enumerate() {
            last_line = k + 1;
            items.extend(line.split_whitespace().map(|t| (k + 1, t)));
        }
        Tokens { items, pos: 0, last_line }
    }

    pub(crate) fn next(&mut self, field: &str) -> Result<(usize, &'a str)> {
        let t = self
            .items
            .get(self.pos)
            .copied()
            .ok_or_else(|| Error::parse(self.last_line, field, "unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    pub(crate) fn number<T: Scalar>(&mut self, field: &str) -> Result<T> {
        let (line, tok) = self.next(field)?;
        parse_scalar(tok).ok_or_else(|| Error::parse(line, field, format!("`{tok}` is not a number")))
    }

    pub(crate) fn count(&mut self, field: &str) -> Result<usize> {
        let (line, tok) = self.next(field)?;
        parse_count(tok, line, field)
    }

    pub(crate) fn peek(&self) -> Option<(usize, &'a str)> {
        self.items.get(self.pos).copied()
    }

    pub(crate) fn finish(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some((line, tok)) => Err(Error::parse(line, "end of input", format!("unexpected trailing token `{tok}`"))),
        }
    }
}

pub(crate) fn parse_scalar<T: Scalar>(tok: &str) -> Option<T> {
    let v = T::from_str_radix(tok, 10).ok()?;
    v.is_finite().then_some(v)
}

pub(crate) fn parse_count(tok: &str, line: usize, field: &str) -> Result<usize> {
    usize::from_str(tok).map_err(|_| Error::parse(line, field, format!("`{tok}` is not a nonnegative integer")))
}
