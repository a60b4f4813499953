//! Trailed domain store: per-variable value sets with O(1) removal and exact
//! restoration on backtrack.

/// Signals that a domain became empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Wipe;

pub(crate) type PropResult = Result<(), Wipe>;

pub(crate) struct DomStore {
    /// Sorted candidate values per variable, fixed at construction.
    vals: Vec<Vec<i64>>,
    active: Vec<Vec<bool>>,
    size: Vec<usize>,
    min_i: Vec<usize>,
    max_i: Vec<usize>,
    /// Removal log: (variable, value index). Undone in reverse order.
    trail: Vec<(u32, u32)>,
    /// Variables touched since the engine last drained the log.
    touched: Vec<u32>,
}

impl DomStore {
    pub fn new(domains: Vec<Vec<i64>>) -> Self {
        let n = domains.len();
        let active = domains.iter().map(|d| vec![true; d.len()]).collect();
        let size = domains.iter().map(Vec::len).collect();
        let max_i = domains.iter().map(|d| d.len().saturating_sub(1)).collect();
        DomStore {
            vals: domains,
            active,
            size,
            min_i: vec![0; n],
            max_i,
            trail: Vec::new(),
            touched: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.vals.len()
    }

    pub fn mark(&self) -> usize {
        self.trail.len()
    }

    pub fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (v, i) = self.trail.pop().unwrap();
            let (v, i) = (v as usize, i as usize);
            self.active[v][i] = true;
            self.size[v] += 1;
            // restores run in exact reverse order, so widening the cached
            // bounds value by value reproduces the old bounds exactly
            if i < self.min_i[v] {
                self.min_i[v] = i;
            }
            if i > self.max_i[v] {
                self.max_i[v] = i;
            }
        }
        self.touched.clear();
    }

    pub fn drain_touched(&mut self, out: &mut Vec<u32>) {
        out.append(&mut self.touched);
    }

    pub fn size(&self, v: usize) -> usize {
        self.size[v]
    }

    pub fn is_fixed(&self, v: usize) -> bool {
        self.size[v] == 1
    }

    pub fn min(&self, v: usize) -> i64 {
        self.vals[v][self.min_i[v]]
    }

    pub fn max(&self, v: usize) -> i64 {
        self.vals[v][self.max_i[v]]
    }

    /// Value of a fixed variable.
    pub fn value(&self, v: usize) -> i64 {
        debug_assert!(self.is_fixed(v));
        self.min(v)
    }

    pub fn contains(&self, v: usize, val: i64) -> bool {
        match self.vals[v].binary_search(&val) {
            Ok(i) => self.active[v][i],
            Err(_) => false,
        }
    }

    pub fn iter_active(&self, v: usize) -> impl Iterator<Item = i64> + '_ {
        self.vals[v]
            .iter()
            .enumerate()
            .filter(move |(i, _)| self.active[v][*i])
            .map(|(_, val)| *val)
    }

    pub fn active_values(&self, v: usize) -> Vec<i64> {
        self.iter_active(v).collect()
    }

    fn remove_at(&mut self, v: usize, i: usize) -> PropResult {
        debug_assert!(self.active[v][i]);
        self.active[v][i] = false;
        self.size[v] -= 1;
        self.trail.push((v as u32, i as u32));
        if self.size[v] == 0 {
            return Err(Wipe);
        }
        if i == self.min_i[v] {
            let mut j = i + 1;
            while !self.active[v][j] {
                j += 1;
            }
            self.min_i[v] = j;
        }
        if i == self.max_i[v] {
            let mut j = i - 1;
            while !self.active[v][j] {
                j -= 1;
            }
            self.max_i[v] = j;
        }
        if self.touched.last() != Some(&(v as u32)) {
            self.touched.push(v as u32);
        }
        Ok(())
    }

    pub fn remove_value(&mut self, v: usize, val: i64) -> PropResult {
        if let Ok(i) = self.vals[v].binary_search(&val) {
            if self.active[v][i] {
                return self.remove_at(v, i);
            }
        }
        Ok(())
    }

    /// Removes every value strictly below `bound`.
    pub fn remove_below(&mut self, v: usize, bound: i64) -> PropResult {
        while self.vals[v][self.min_i[v]] < bound {
            self.remove_at(v, self.min_i[v])?;
        }
        Ok(())
    }

    /// Removes every value strictly above `bound`.
    pub fn remove_above(&mut self, v: usize, bound: i64) -> PropResult {
        while self.vals[v][self.max_i[v]] > bound {
            self.remove_at(v, self.max_i[v])?;
        }
        Ok(())
    }

    /// Fixes `v` to `val`, removing everything else.
    pub fn assign(&mut self, v: usize, val: i64) -> PropResult {
        if !self.contains(v, val) {
            // empty the domain through the trail so backtracking restores it
            for i in 0..self.vals[v].len() {
                if self.active[v][i] {
                    self.remove_at(v, i)?;
                }
            }
            return Err(Wipe);
        }
        for i in 0..self.vals[v].len() {
            if self.active[v][i] && self.vals[v][i] != val {
                self.remove_at(v, i)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remove_and_restore_bounds() {
        let mut s = DomStore::new(vec![vec![1, 3, 5, 7]]);
        let mark = s.mark();
        s.remove_value(0, 1).unwrap();
        s.remove_value(0, 7).unwrap();
        assert_eq!((s.min(0), s.max(0), s.size(0)), (3, 5, 2));
        s.undo_to(mark);
        assert_eq!((s.min(0), s.max(0), s.size(0)), (1, 7, 4));
    }

    #[test]
    fn wipe_is_reported_and_restorable() {
        let mut s = DomStore::new(vec![vec![2, 4]]);
        let mark = s.mark();
        s.remove_value(0, 2).unwrap();
        assert_eq!(s.remove_value(0, 4), Err(Wipe));
        s.undo_to(mark);
        assert_eq!(s.size(0), 2);
    }

    #[test]
    fn assign_keeps_exactly_one() {
        let mut s = DomStore::new(vec![vec![1, 2, 3]]);
        s.assign(0, 2).unwrap();
        assert!(s.is_fixed(0));
        assert_eq!(s.value(0), 2);
        assert_eq!(s.assign(0, 9), Err(Wipe));
    }

    #[test]
    fn bounds_removals() {
        let mut s = DomStore::new(vec![vec![-2, 0, 3, 8]]);
        s.remove_below(0, 0).unwrap();
        s.remove_above(0, 3).unwrap();
        assert_eq!(s.active_values(0), vec![0, 3]);
    }
}
