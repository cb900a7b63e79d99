use crate::error::{Error, Result};

/// Size guards for every enumeration in the workbench.
///
/// Brute-force searches (composition enumerations, functional rows,
/// sub-candidate searches) take a guard and fail loudly instead of running
/// unbounded. The environment variable `CREATURE_LAB_GUARD` overrides the
/// enumeration limits with a single value.
#[derive(Debug, Clone)]
pub struct Guards {
    /// maximum number of possibilities per creature
    pub max_pos: u64,
    /// maximum number of creatures a composition enumeration may produce
    pub max_sigma: u64,
    /// maximum number of rows a functional set may have
    pub max_rows: u64,
    /// maximum number of states a sub-candidate search may visit
    pub max_search: u64,
}

impl Default for Guards {
    fn default() -> Self {
        let mut g = Guards {
            max_pos: 4096,
            max_sigma: 1_000_000,
            max_rows: 1_000_000,
            max_search: 1_000_000,
        };
        if let Ok(v) = std::env::var("CREATURE_LAB_GUARD") {
            if let Ok(n) = v.trim().parse::<u64>() {
                g.max_sigma = n;
                g.max_rows = n;
                g.max_search = n;
            }
        }
        g
    }
}

impl Guards {
    pub fn check_pos(&self, count: u64) -> Result<()> {
        if count > self.max_pos {
            return Err(Error::guard("possibility set", count, self.max_pos));
        }
        Ok(())
    }

    pub fn check_sigma(&self, count: u64) -> Result<()> {
        if count > self.max_sigma {
            return Err(Error::guard("composition enumeration", count, self.max_sigma));
        }
        Ok(())
    }

    pub fn check_rows(&self, count: u64) -> Result<()> {
        if count > self.max_rows {
            return Err(Error::guard("functional rows", count, self.max_rows));
        }
        Ok(())
    }

    pub fn check_search(&self, count: u64) -> Result<()> {
        if count > self.max_search {
            return Err(Error::guard("search space", count, self.max_search));
        }
        Ok(())
    }
}
