use thiserror::Error;

/// Upper bound on the number of search steps an exact oracle may take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_steps: u64,
}

impl Budget {
    pub const fn new(max_steps: u64) -> Self {
        Budget { max_steps }
    }

    pub const fn unlimited() -> Self {
        Budget { max_steps: u64::MAX }
    }

    pub fn meter(self) -> Meter {
        Meter {
            limit: self.max_steps,
            used: 0,
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(50_000_000)
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("search budget of {limit} steps exceeded")]
pub struct BudgetExceeded {
    pub limit: u64,
}

/// Step counter handed down through recursive searches.
#[derive(Debug)]
pub struct Meter {
    limit: u64,
    used: u64,
}

impl Meter {
    #[inline]
    pub fn tick(&mut self) -> Result<(), BudgetExceeded> {
        self.used += 1;
        if self.used > self.limit {
            Err(BudgetExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn exhausted(&self) -> bool {
        self.used >= self.limit
    }
}
