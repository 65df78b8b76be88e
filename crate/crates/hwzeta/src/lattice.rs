//! Lattice-point combinatorics on the hyperplane
//! u_0 + ... + u_n = d * u_{n+1}: the sets U^I_min, solutions nu of
//! sum_j nu_j a_j^+ = p*u - v, and an integer basis of the lattice of
//! relations on the augmented support.

use crate::error::{internal, Result};

/// A subset I of S = {0, 1, ..., n}, stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexSubset {
    mask: u64,
    n: usize,
}

impl IndexSubset {
    pub fn empty(n: usize) -> IndexSubset {
        IndexSubset { mask: 0, n }
    }

    /// The full set S = {0, ..., n}.
    pub fn full(n: usize) -> IndexSubset {
        IndexSubset {
            mask: (1u64 << (n + 1)) - 1,
            n,
        }
    }

    pub fn from_members(n: usize, members: &[usize]) -> IndexSubset {
        let mut mask = 0u64;
        for &i in members {
            assert!(i <= n);
            mask |= 1 << i;
        }
        IndexSubset { mask, n }
    }

    /// S \ {i}.
    pub fn full_minus(n: usize, i: usize) -> IndexSubset {
        let mut s = Self::full(n);
        s.mask &= !(1u64 << i);
        s
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask >> i & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn ambient_n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> Vec<usize> {
        (0..=self.n).filter(|&i| self.contains(i)).collect()
    }
}

/// mu for a set of the given cardinality: ceil(size/d) - 1.
pub fn mu_of_size(size: u64, d: u64) -> i64 {
    (size.div_ceil(d)) as i64 - 1
}

/// mu_I = ceil(|I|/d) - 1; in particular mu_emptyset = -1.
pub fn mu_of(i_set: &IndexSubset, d: u64) -> i64 {
    mu_of_size(i_set.len() as u64, d)
}

/// Enumerates U^I_min: vectors u in N^{n+2} with
/// sum_{i<=n} u_i = d*u_{n+1}, u_i > 0 for i in I, and
/// u_{n+1} = mu_I + 1.  Sorted lexicographically.
pub fn enumerate_u_min(i_set: &IndexSubset, n: usize, d: u64) -> Vec<Vec<u64>> {
    let mu = mu_of(i_set, d);
    let last = (mu + 1) as u64;
    let total = d * last;
    let mut out = Vec::new();
    let mut cur = vec![0u64; n + 2];
    cur[n + 1] = last;
    compose(i_set, n, total, 0, &mut cur, &mut out);
    out
}

fn compose(
    i_set: &IndexSubset,
    n: usize,
    remaining: u64,
    pos: usize,
    cur: &mut Vec<u64>,
    out: &mut Vec<Vec<u64>>,
) {
    if pos == n + 1 {
        if remaining == 0 {
            out.push(cur.clone());
        }
        return;
    }
    let lo = if i_set.contains(pos) { 1 } else { 0 };
    // positions after this one still need their lower bounds
    let mut need_after = 0u64;
    for i in pos + 1..=n {
        if i_set.contains(i) {
            need_after += 1;
        }
    }
    if remaining < lo + need_after {
        return;
    }
    for v in lo..=(remaining - need_after) {
        cur[pos] = v;
        compose(i_set, n, remaining - v, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

/// All nu in N^N with sum_j nu_j * support[j] = target, by
/// backtracking in file order with values descending from the
/// per-variable residual bound.
pub fn solve_nu(target: &[i64], support: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut residual: Vec<i64> = target.to_vec();
    let mut cur = vec![0u64; support.len()];
    solve_nu_rec(&mut residual, support, 0, &mut cur, &mut out);
    out
}

fn solve_nu_rec(
    residual: &mut [i64],
    support: &[Vec<u64>],
    j: usize,
    cur: &mut [u64],
    out: &mut Vec<Vec<u64>>,
) {
    if residual.iter().any(|&r| r < 0) {
        return;
    }
    if j == support.len() {
        if residual.iter().all(|&r| r == 0) {
            out.push(cur.to_vec());
        }
        return;
    }
    let a = &support[j];
    let mut bound = i64::MAX;
    for (i, &aij) in a.iter().enumerate() {
        if aij > 0 {
            bound = bound.min(residual[i] / aij as i64);
        }
    }
    debug_assert!(bound < i64::MAX, "augmented vectors always end in 1");
    if bound < 0 {
        return;
    }
    let mut v = bound;
    loop {
        for (i, &aij) in a.iter().enumerate() {
            residual[i] -= v * aij as i64;
        }
        cur[j] = v as u64;
        solve_nu_rec(residual, support, j + 1, cur, out);
        for (i, &aij) in a.iter().enumerate() {
            residual[i] += v * aij as i64;
        }
        if v == 0 {
            break;
        }
        v -= 1;
    }
    cur[j] = 0;
}

/// The target vector p*u - v.
pub fn pu_minus_v(p: u64, u: &[u64], v: &[u64]) -> Vec<i64> {
    u.iter()
        .zip(v)
        .map(|(&ui, &vi)| p as i64 * ui as i64 - vi as i64)
        .collect()
}

/// A Z-basis of {l in Z^N : sum_j l_j * support[j] = 0}, computed by
/// integer column reduction with a unimodular transform.  The basis is
/// not canonical beyond sign normalization of each vector.
pub fn relation_lattice_basis(support: &[Vec<u64>]) -> Result<Vec<Vec<i64>>> {
    let ncols = support.len();
    if ncols == 0 {
        return Ok(Vec::new());
    }
    let nrows = support[0].len();
    // column-major copies of the support matrix and the transform
    let mut m: Vec<Vec<i128>> = support
        .iter()
        .map(|col| col.iter().map(|&x| x as i128).collect())
        .collect();
    let mut t: Vec<Vec<i128>> = (0..ncols)
        .map(|c| (0..ncols).map(|r| i128::from(r == c)).collect())
        .collect();
    let mut pivots = 0usize;
    for row in 0..nrows {
        loop {
            let mut best: Option<usize> = None;
            for c in pivots..ncols {
                if m[c][row] != 0 {
                    best = match best {
                        Some(b) if m[b][row].abs() <= m[c][row].abs() => Some(b),
                        _ => Some(c),
                    };
                }
            }
            let Some(b) = best else { break };
            let mut done = true;
            for c in pivots..ncols {
                if c == b || m[c][row] == 0 {
                    continue;
                }
                let f = m[c][row] / m[b][row];
                for r in 0..nrows {
                    m[c][r] -= f * m[b][r];
                }
                for r in 0..ncols {
                    t[c][r] -= f * t[b][r];
                }
                if m[c][row] != 0 {
                    done = false;
                }
            }
            if done {
                m.swap(pivots, b);
                t.swap(pivots, b);
                pivots += 1;
                break;
            }
        }
    }
    let mut basis = Vec::new();
    for c in pivots..ncols {
        if m[c].iter().any(|&x| x != 0) {
            return internal("kernel column is not annihilated".to_string());
        }
        let mut l: Vec<i64> = t[c].iter().map(|&x| x as i64).collect();
        if let Some(&first) = l.iter().find(|&&x| x != 0) {
            if first < 0 {
                for x in &mut l {
                    *x = -*x;
                }
            }
        }
        // defining property, checked exactly
        for row in 0..nrows {
            let s: i128 = l
                .iter()
                .zip(support)
                .map(|(&lj, a)| lj as i128 * a[row] as i128)
                .sum();
            if s != 0 {
                return internal("relation vector fails the defining property".to_string());
            }
        }
        basis.push(l);
    }
    Ok(basis)
}
