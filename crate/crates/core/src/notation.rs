//! Five-symbol movement units (X/Y/Z/O, thumb to pinky) and their
//! manipulation/fixed function counterparts.
//!
//! A movement unit labels each finger with the motion group it belongs to.
//! Groups are named in order of first appearance, so a canonical unit starts
//! its first motion with `X`, introduces `Y` only after `X`, and `Z` only
//! after `Y`. `O` marks a motionless finger.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hand::{Finger, HandModel};
use crate::synergy::JointSubset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    X,
    Y,
    Z,
    O,
}

impl Symbol {
    const MOTIONS: [Symbol; 3] = [Symbol::X, Symbol::Y, Symbol::Z];

    fn from_char(c: char) -> Option<Symbol> {
        match c {
            'X' => Some(Symbol::X),
            'Y' => Some(Symbol::Y),
            'Z' => Some(Symbol::Z),
            'O' => Some(Symbol::O),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Symbol::X => 'X',
            Symbol::Y => 'Y',
            Symbol::Z => 'Z',
            Symbol::O => 'O',
        }
    }
}

/// A canonical movement unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MovementUnit([Symbol; 5]);

impl MovementUnit {
    pub fn symbols(&self) -> &[Symbol; 5] {
        &self.0
    }

    /// Motion symbols present, in X, Y, Z order.
    pub fn groups(&self) -> Vec<Symbol> {
        Symbol::MOTIONS.into_iter().filter(|s| self.0.contains(s)).collect()
    }

    /// Fingers carrying any motion symbol.
    pub fn moving_fingers(&self) -> Vec<Finger> {
        Finger::ALL
            .into_iter()
            .zip(self.0)
            .filter(|(_, s)| *s != Symbol::O)
            .map(|(f, _)| f)
            .collect()
    }

    fn check_canonical(symbols: &[Symbol; 5]) -> bool {
        let mut next = 0;
        for s in symbols {
            if *s == Symbol::O {
                continue;
            }
            let rank = *s as usize;
            if rank > next {
                return false;
            }
            if rank == next {
                next += 1;
            }
        }
        true
    }

    /// Splits a unit into one single-group unit per motion group.
    ///
    /// Each output keeps only one group's fingers, relabelled `X`. A unit
    /// with at most one group decomposes to itself.
    pub fn decompose(&self) -> Vec<MovementUnit> {
        let groups = self.groups();
        if groups.len() <= 1 {
            return vec![*self];
        }
        groups
            .into_iter()
            .map(|g| MovementUnit(self.0.map(|s| if s == g { Symbol::X } else { Symbol::O })))
            .collect()
    }

    /// `M` for moving fingers, `F` for motionless ones.
    pub fn to_function(&self) -> Result<FunctionUnit> {
        match self.groups().len() {
            0 => Err(Error::NoMotion(self.to_string())),
            1 => Ok(FunctionUnit(self.0.map(|s| {
                if s == Symbol::O {
                    Function::Fixed
                } else {
                    Function::Manipulation
                }
            }))),
            _ => Err(Error::MultiGroup(self.to_string())),
        }
    }
}

impl FromStr for MovementUnit {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let chars: Vec<char> = text.chars().collect();
        if chars.len() != 5 {
            return Err(Error::InvalidLength(chars.len()));
        }
        let mut symbols = [Symbol::O; 5];
        for (i, c) in chars.into_iter().enumerate() {
            symbols[i] = Symbol::from_char(c).ok_or(Error::InvalidSymbol { symbol: c, position: i })?;
        }
        if !Self::check_canonical(&symbols) {
            return Err(Error::NonCanonical(text.to_string()));
        }
        Ok(MovementUnit(symbols))
    }
}

impl fmt::Display for MovementUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.0 {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

pub fn parse_movement_unit(text: &str) -> Result<MovementUnit> {
    text.parse()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Function {
    #[serde(rename = "M")]
    Manipulation,
    #[serde(rename = "F")]
    Fixed,
}

impl Function {
    fn as_char(self) -> char {
        match self {
            Function::Manipulation => 'M',
            Function::Fixed => 'F',
        }
    }
}

/// Per-finger M/F labels, thumb to pinky, with at least one `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FunctionUnit([Function; 5]);

impl FunctionUnit {
    pub fn functions(&self) -> &[Function; 5] {
        &self.0
    }

    pub fn of(&self, finger: Finger) -> Function {
        self.0[finger.position()]
    }

    pub fn manipulation_fingers(&self) -> Vec<Finger> {
        Finger::ALL
            .into_iter()
            .filter(|f| self.of(*f) == Function::Manipulation)
            .collect()
    }

    pub fn manipulation_count(&self) -> usize {
        self.manipulation_fingers().len()
    }

    /// Joints of the `M` fingers of `model`.
    pub fn to_subspace(&self, model: &HandModel) -> Result<JointSubset> {
        model
            .joints_for_fingers(&self.manipulation_fingers())
            .map_err(|e| match e {
                Error::InvalidSubset => Error::AllFixed(self.to_string()),
                other => other,
            })
    }
}

impl FromStr for FunctionUnit {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let chars: Vec<char> = text.chars().collect();
        if chars.len() != 5 {
            return Err(Error::InvalidLength(chars.len()));
        }
        let mut out = [Function::Fixed; 5];
        for (i, c) in chars.into_iter().enumerate() {
            out[i] = match c {
                'M' => Function::Manipulation,
                'F' => Function::Fixed,
                other => {
                    return Err(Error::InvalidSymbol {
                        symbol: other,
                        position: i,
                    })
                }
            };
        }
        if !out.contains(&Function::Manipulation) {
            return Err(Error::AllFixed(text.to_string()));
        }
        Ok(FunctionUnit(out))
    }
}

impl TryFrom<String> for FunctionUnit {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FunctionUnit> for String {
    fn from(u: FunctionUnit) -> Self {
        u.to_string()
    }
}

impl fmt::Display for FunctionUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.0 {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

/// The twelve function units of the joint subspaces, in catalog order.
pub const FDMS_UNITS: [&str; 12] = [
    "MMMMM", "MFFFF", "FMMMM", "MMFFF", "FFMMM", "FFFMM", "FMFFF", "MMMFF", "FFMFF", "FFMMF", "MMMMF", "FMMMF",
];

/// Typical movement units of daily manipulation with their frequency in percent.
pub const KAMAKURA_UNITS: [(&str, f64); 16] = [
    ("XXXXX", 8.5),
    ("XYYYY", 9.0),
    ("XOOOO", 8.9),
    ("OXXXX", 3.5),
    ("XXYYY", 1.9),
    ("XXOOO", 3.2),
    ("OOXXX", 5.1),
    ("OOOXX", 2.4),
    ("XYZZZ", 3.5),
    ("XYOOO", 4.8),
    ("OXYYY", 2.6),
    ("OXOOO", 8.9),
    ("XYYOO", 1.9),
    ("OOXOO", 1.9),
    ("OOXXO", 1.3),
    ("XYYYO", 1.0),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatalogEntry {
    pub unit: MovementUnit,
    pub frequency_percent: f64,
}

pub fn fdms_unit_catalog() -> Vec<FunctionUnit> {
    FDMS_UNITS
        .iter()
        .map(|u| u.parse().expect("catalog unit is valid"))
        .collect()
}

pub fn kamakura_catalog() -> Vec<CatalogEntry> {
    KAMAKURA_UNITS
        .iter()
        .map(|(u, freq)| CatalogEntry {
            unit: u.parse().expect("catalog unit is canonical"),
            frequency_percent: *freq,
        })
        .collect()
}
