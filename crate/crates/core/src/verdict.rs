use std::fmt;

use crate::Poly;

/// Where an identity failed, and the nonzero residue it left behind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub location: String,
    pub residue: Poly,
}

impl Witness {
    pub fn new(location: impl Into<String>, residue: Poly) -> Self {
        Witness { location: location.into(), residue }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: residue {}", self.location, self.residue)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid(Witness),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Valid => None,
            Verdict::Invalid(w) => Some(w),
        }
    }

    /// Valid when `residue` is zero, otherwise invalid with the residue as witness.
    pub fn from_residue(location: impl Into<String>, residue: Poly) -> Self {
        if residue.is_zero() {
            Verdict::Valid
        } else {
            Verdict::Invalid(Witness::new(location, residue))
        }
    }

    /// First failure wins.
    pub fn and_then(self, next: impl FnOnce() -> Verdict) -> Verdict {
        match self {
            Verdict::Valid => next(),
            bad => bad,
        }
    }
}

/// Runs checks in order and stops at the first invalid verdict.
pub(crate) fn first_failure<I>(checks: I) -> Verdict
where
    I: IntoIterator<Item = Verdict>,
{
    for v in checks {
        if !v.is_valid() {
            return v;
        }
    }
    Verdict::Valid
}
