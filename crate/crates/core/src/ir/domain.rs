use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DomainError {
    #[error("domain must contain at least one value")]
    Empty,
    #[error("invalid range {0}..{1}")]
    InvalidRange(i64, i64),
}

/// Finite set of 64-bit integers, stored as sorted disjoint inclusive ranges.
///
/// The canonical form keeps ranges strictly increasing and non-adjacent, so
/// two domains with the same value set have identical representations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Domain {
    ranges: Vec<(i64, i64)>,
}

impl Domain {
    /// Single inclusive range `lo..=hi`.
    pub fn range(lo: i64, hi: i64) -> Result<Self, DomainError> {
        if lo > hi {
            return Err(DomainError::InvalidRange(lo, hi));
        }
        Ok(Domain {
            ranges: vec![(lo, hi)],
        })
    }

    /// Domain from an arbitrary value list (duplicates allowed).
    pub fn from_values(values: &[i64]) -> Result<Self, DomainError> {
        let mut vs: Vec<i64> = values.to_vec();
        vs.sort_unstable();
        vs.dedup();
        if vs.is_empty() {
            return Err(DomainError::Empty);
        }
        let mut ranges = Vec::new();
        let mut lo = vs[0];
        let mut hi = vs[0];
        for &v in &vs[1..] {
            if v == hi + 1 {
                hi = v;
            } else {
                ranges.push((lo, hi));
                lo = v;
                hi = v;
            }
        }
        ranges.push((lo, hi));
        Ok(Domain { ranges })
    }

    /// Domain from a union of inclusive ranges.
    pub fn from_ranges(ranges: &[(i64, i64)]) -> Result<Self, DomainError> {
        for &(lo, hi) in ranges {
            if lo > hi {
                return Err(DomainError::InvalidRange(lo, hi));
            }
        }
        if ranges.is_empty() {
            return Err(DomainError::Empty);
        }
        let mut rs: Vec<(i64, i64)> = ranges.to_vec();
        rs.sort_unstable();
        let mut merged: Vec<(i64, i64)> = Vec::with_capacity(rs.len());
        for (lo, hi) in rs {
            match merged.last_mut() {
                // merge overlapping or adjacent ranges
                Some((_, phi)) if lo <= phi.saturating_add(1) => *phi = (*phi).max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Ok(Domain { ranges: merged })
    }

    pub fn singleton(v: i64) -> Self {
        Domain {
            ranges: vec![(v, v)],
        }
    }

    /// Membership test, O(log |ranges|).
    pub fn contains(&self, v: i64) -> bool {
        self.ranges
            .binary_search_by(|&(lo, hi)| {
                if v < lo {
                    std::cmp::Ordering::Greater
                } else if v > hi {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .is_ok()
    }

    pub fn min(&self) -> i64 {
        self.ranges[0].0
    }

    pub fn max(&self) -> i64 {
        self.ranges[self.ranges.len() - 1].1
    }

    /// Number of values (u128 since a single range can span the i64 width).
    pub fn size(&self) -> u128 {
        self.ranges
            .iter()
            .map(|&(lo, hi)| (hi as i128 - lo as i128) as u128 + 1)
            .sum()
    }

    pub fn is_singleton(&self) -> bool {
        self.ranges.len() == 1 && self.ranges[0].0 == self.ranges[0].1
    }

    pub fn ranges(&self) -> &[(i64, i64)] {
        &self.ranges
    }

    /// Iterator over all values in increasing order. Intended for small domains.
    pub fn values(&self) -> impl Iterator<Item = i64> + '_ {
        self.ranges.iter().flat_map(|&(lo, hi)| lo..=hi)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(lo, hi)) in self.ranges.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if lo == hi {
                write!(f, "{lo}")?;
            } else {
                write!(f, "{lo}..{hi}")?;
            }
        }
        Ok(())
    }
}
