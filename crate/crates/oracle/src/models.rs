//! Model-level brute forces for the generated problems: small, direct
//! searches over the raw combinatorial objects, independent of both the
//! instance encodings and the solver.

/// Langford sequences for order n: every sequence of 2n slots where each
/// value i in 1..=n appears twice with exactly i slots between the copies.
pub fn langford_sequences(n: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut slots = vec![0i64; 2 * n];
    fn place(v: usize, n: usize, slots: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if v == 0 {
            out.push(slots.clone());
            return;
        }
        let gap = v + 1;
        for first in 0..slots.len() {
            let second = first + gap;
            if second >= slots.len() || slots[first] != 0 || slots[second] != 0 {
                continue;
            }
            slots[first] = v as i64;
            slots[second] = v as i64;
            place(v - 1, n, slots, out);
            slots[first] = 0;
            slots[second] = 0;
        }
    }
    place(n, n, &mut slots, &mut out);
    out
}

/// Minimal autocorrelation energy over every ±1 sequence of length n.
pub fn labs_optimum(n: usize) -> i64 {
    assert!(n >= 2 && n <= 24, "exhaustive search only");
    let mut best = i64::MAX;
    for mask in 0u32..(1 << n) {
        let x: Vec<i64> = (0..n)
            .map(|i| if mask >> i & 1 == 1 { 1 } else { -1 })
            .collect();
        let mut energy = 0i64;
        for k in 1..n {
            let c: i64 = (0..n - k).map(|i| x[i] * x[i + k]).sum();
            energy += c * c;
        }
        best = best.min(energy);
    }
    best
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Smallest maximum m such that n increasing pairwise-coprime values can be
/// drawn from max(2, m/2)..=m, the largest being exactly m.
pub fn coprime_optimum(n: usize) -> Option<i64> {
    let ub = ((n * n) as i64).max(2);
    fn extend(chosen: &mut Vec<i64>, need: usize, lo: i64, hi: i64) -> bool {
        if chosen.len() == need {
            return chosen.last() == Some(&hi);
        }
        let from = chosen.last().map_or(lo, |&l| l + 1);
        for cand in from..=hi {
            if chosen.iter().all(|&c| gcd(c, cand) == 1) {
                chosen.push(cand);
                if extend(chosen, need, lo, hi) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    (2..=ub).find(|&m| {
        let lo = (m / 2).max(2);
        extend(&mut Vec::new(), n, lo, m)
    })
}

/// Exact minimum number of capacity-`cap` bins for the item multiset, by
/// complete first-fit-style enumeration with a running lower bound.
pub fn bin_packing_optimum(items: &[i64], cap: i64) -> Option<usize> {
    if items.iter().any(|&it| it > cap) {
        return None;
    }
    let mut sorted: Vec<i64> = items.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let total: i64 = sorted.iter().sum();
    let lower = ((total + cap - 1) / cap.max(1)).max(0) as usize;
    if sorted.is_empty() {
        return Some(0);
    }

    fn pack(idx: usize, items: &[i64], cap: i64, bins: &mut Vec<i64>, best: &mut usize) {
        if bins.len() >= *best {
            return;
        }
        if idx == items.len() {
            *best = bins.len();
            return;
        }
        let item = items[idx];
        // try existing bins, skipping identical residues
        let mut seen: Vec<i64> = Vec::new();
        for b in 0..bins.len() {
            if bins[b] + item <= cap && !seen.contains(&bins[b]) {
                seen.push(bins[b]);
                bins[b] += item;
                pack(idx + 1, items, cap, bins, best);
                bins[b] -= item;
            }
        }
        // or open a new bin
        bins.push(item);
        pack(idx + 1, items, cap, bins, best);
        bins.pop();
    }

    let mut best = sorted.len();
    let mut bins = Vec::new();
    pack(0, &sorted, cap, &mut bins, &mut best);
    debug_assert!(best >= lower);
    Some(best)
}

/// Does a chain of `n` distinct values from 1..=p exist where neighbours
/// divide one another? Exhaustive over value sequences.
pub fn chain_reaction_satisfiable(n: usize, p: i64) -> bool {
    fn extend(chain: &mut Vec<i64>, n: usize, p: i64) -> bool {
        if chain.len() == n {
            return true;
        }
        for v in 1..=p {
            if chain.contains(&v) {
                continue;
            }
            let ok = match chain.last() {
                None => true,
                Some(&last) => last % v == 0 || v % last == 0,
            };
            if ok {
                chain.push(v);
                if extend(chain, n, p) {
                    return true;
                }
                chain.pop();
            }
        }
        false
    }
    extend(&mut Vec::new(), n, p)
}

/// Heterosquare existence for small n by permutation scan; respects the
/// corner ordering used for symmetry breaking when `frenicle` is set.
pub fn heterosquare_exists(n: usize, frenicle: bool) -> bool {
    assert!(n <= 3, "factorial scan only");
    let nn = n * n;
    fn square_ok(p: &[i64], n: usize, frenicle: bool) -> bool {
        let at = |i: usize, j: usize| p[i * n + j];
        if frenicle {
            let ok = at(0, 0) < at(0, n - 1)
                && at(0, 0) < at(n - 1, 0)
                && at(0, 0) < at(n - 1, n - 1)
                && at(0, 1) < at(1, 0);
            if !ok {
                return false;
            }
        }
        let mut sums = Vec::new();
        for i in 0..n {
            sums.push((0..n).map(|j| at(i, j)).sum::<i64>());
        }
        for j in 0..n {
            sums.push((0..n).map(|i| at(i, j)).sum::<i64>());
        }
        sums.push((0..n).map(|i| at(i, i)).sum::<i64>());
        sums.push((0..n).map(|i| at(n - 1 - i, i)).sum::<i64>());
        for i in 0..sums.len() {
            for j in i + 1..sums.len() {
                if sums[i] == sums[j] {
                    return false;
                }
            }
        }
        true
    }
    fn permute(cur: &mut Vec<i64>, used: &mut Vec<bool>, n: usize, frenicle: bool) -> bool {
        let nn = n * n;
        if cur.len() == nn {
            return square_ok(cur, n, frenicle);
        }
        for v in 1..=nn {
            if !used[v] {
                used[v] = true;
                cur.push(v as i64);
                if permute(cur, used, n, frenicle) {
                    return true;
                }
                cur.pop();
                used[v] = false;
            }
        }
        false
    }
    permute(
        &mut Vec::with_capacity(nn),
        &mut vec![false; nn + 1],
        n,
        frenicle,
    )
}

/// Sum-free q-partition existence of 1..=n (no class holds a + b = c with
/// distinct a, b, c), with every class given at least n/q members. The first
/// value is pinned to class 0 to cut symmetry.
pub fn ramsey_partition_satisfiable(q: usize, n: usize) -> bool {
    fn descend(assign: &mut Vec<usize>, n: usize, q: usize) -> bool {
        let pos = assign.len();
        if pos == n {
            let min_size = n / q;
            return (0..q).all(|cls| assign.iter().filter(|&&c| c == cls).count() >= min_size);
        }
        let limit = if pos == 0 { 1 } else { q };
        for cls in 0..limit {
            // value pos+1 joins cls; check sums inside the class
            let val = pos + 1;
            let mut ok = true;
            for a in 1..=val / 2 {
                let b = val - a;
                if a != b
                    && a >= 1
                    && assign.get(a - 1) == Some(&cls)
                    && assign.get(b - 1) == Some(&cls)
                {
                    ok = false;
                    break;
                }
            }
            if ok {
                assign.push(cls);
                if descend(assign, n, q) {
                    return true;
                }
                assign.pop();
            }
        }
        false
    }
    descend(&mut Vec::new(), n, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn langford_small_orders() {
        assert_eq!(langford_sequences(3).len(), 2);
        assert!(langford_sequences(5).is_empty());
        assert!(!langford_sequences(4).is_empty());
    }

    #[test]
    fn labs_known_values() {
        assert_eq!(labs_optimum(2), 1);
        assert_eq!(labs_optimum(3), 1);
        assert_eq!(labs_optimum(8), 8);
    }

    #[test]
    fn coprime_pair() {
        assert_eq!(coprime_optimum(2), Some(3));
    }

    #[test]
    fn packing_matches_hand_counts() {
        assert_eq!(bin_packing_optimum(&[7, 7, 5, 5, 3, 3, 3, 3], 10), Some(4));
        assert_eq!(bin_packing_optimum(&[], 10), Some(0));
        assert_eq!(bin_packing_optimum(&[11], 10), None);
    }

    #[test]
    fn weak_schur_boundary() {
        // two adding to the third with all three distinct: the q = 3
        // threshold sits at 23
        assert!(ramsey_partition_satisfiable(3, 13));
        assert!(ramsey_partition_satisfiable(3, 14));
        assert!(ramsey_partition_satisfiable(3, 23));
        assert!(!ramsey_partition_satisfiable(3, 24));
    }
}
