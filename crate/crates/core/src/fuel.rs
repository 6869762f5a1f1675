//! Fuel accounting for semidecisions.

use std::fmt;

/// A step budget. Every unbounded search in the crate draws from one of these
/// and reports what it spent.
#[derive(Clone, Debug)]
pub struct Fuel {
    limit: u64,
    spent: u64,
}

impl Fuel {
    pub fn new(limit: u64) -> Self {
        Fuel { limit, spent: 0 }
    }

    /// Spend `n` steps; false once the budget is gone.
    pub fn burn(&mut self, n: u64) -> bool {
        if self.spent.saturating_add(n) > self.limit {
            self.spent = self.limit;
            return false;
        }
        self.spent += n;
        true
    }

    pub fn spent(&self) -> u64 {
        self.spent
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.spent
    }

    pub fn exhausted(&self) -> bool {
        self.spent >= self.limit
    }
}

/// Outcome of a kernel query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    InKernel,
    NotInKernel,
    Unknown { fuel: u64 },
}

impl Verdict {
    pub fn is_in(&self) -> bool {
        matches!(self, Verdict::InKernel)
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::InKernel
        } else {
            Verdict::NotInKernel
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::InKernel => write!(f, "in-kernel"),
            Verdict::NotInKernel => write!(f, "not-in-kernel"),
            Verdict::Unknown { fuel } => write!(f, "unknown (fuel {fuel})"),
        }
    }
}
