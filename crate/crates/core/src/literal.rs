//! Linguistic attributes (`L_j`, `M_j`, `H_j`) and literals over them.
//!
//! Feature `j` (0-based) owns the three input attributes `3j`, `3j + 1` and
//! `3j + 2` for low, medium and high. Feature numbers are printed 1-based.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    #[serde(rename = "L")]
    Low,
    #[serde(rename = "M")]
    Medium,
    #[serde(rename = "H")]
    High,
}

impl Term {
    pub const ALL: [Term; 3] = [Term::Low, Term::Medium, Term::High];

    pub fn index(self) -> usize {
        match self {
            Term::Low => 0,
            Term::Medium => 1,
            Term::High => 2,
        }
    }

    pub fn from_index(i: usize) -> Term {
        Term::ALL[i % 3]
    }

    pub fn letter(self) -> char {
        match self {
            Term::Low => 'L',
            Term::Medium => 'M',
            Term::High => 'H',
        }
    }
}

/// Index of the input attribute for `term` of `feature`.
pub fn attribute_index(feature: usize, term: Term) -> usize {
    3 * feature + term.index()
}

/// `M_2`-style name of a linguistic attribute index.
pub fn attribute_name(attribute: usize) -> String {
    format!("{}_{}", Term::from_index(attribute).letter(), attribute / 3 + 1)
}

/// A possibly negated linguistic attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub attribute: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(attribute: usize) -> Self {
        Self {
            attribute,
            negated: false,
        }
    }

    pub fn neg(attribute: usize) -> Self {
        Self {
            attribute,
            negated: true,
        }
    }

    pub fn feature(&self) -> usize {
        self.attribute / 3
    }

    pub fn term(&self) -> Term {
        Term::from_index(self.attribute)
    }

    /// Truth value on a crisp (0/1) or fuzzy input under an α-cut.
    pub fn holds(&self, input: &[f64], crispness: f64) -> bool {
        let on = input[self.attribute] >= crispness;
        on != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "!")?;
        }
        write!(f, "{}", attribute_name(self.attribute))
    }
}

impl FromStr for Literal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negated, body) = match s.strip_prefix('!').or_else(|| s.strip_prefix('¬')) {
            Some(rest) => (true, rest.trim()),
            None => (false, s),
        };
        let (letter, num) = body
            .split_once('_')
            .ok_or_else(|| Error::Parse(format!("literal `{s}` must look like M_2")))?;
        let term = match letter {
            "L" => Term::Low,
            "M" => Term::Medium,
            "H" => Term::High,
            _ => return Err(Error::Parse(format!("unknown linguistic term in `{s}`"))),
        };
        let feature: usize = num
            .parse()
            .map_err(|_| Error::Parse(format!("bad feature number in `{s}`")))?;
        if feature == 0 {
            return Err(Error::Parse(format!("feature numbers start at 1 in `{s}`")));
        }
        Ok(Literal {
            attribute: attribute_index(feature - 1, term),
            negated,
        })
    }
}
