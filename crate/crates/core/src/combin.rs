//! Small combinatorial helpers shared across modules.

use num_bigint::BigInt;
use num_integer::binomial as int_binomial;

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    int_binomial(BigInt::from(n), BigInt::from(k))
}

pub fn binomial_u64(n: u64, k: u64) -> u64 {
    u64::try_from(binomial(n, k)).expect("binomial fits u64")
}

/// All k-subsets of `0..n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// All exponent vectors in `Z_{>=0}^d` with total degree exactly `r`,
/// subject to per-coordinate upper bounds (`None` = unbounded).
pub fn compositions_bounded(d: usize, r: u32, bounds: &[Option<u32>]) -> Vec<Vec<u32>> {
    assert_eq!(bounds.len(), d);
    let mut out = Vec::new();
    let mut cur = vec![0u32; d];
    fn rec(
        i: usize,
        remaining: u32,
        cur: &mut Vec<u32>,
        bounds: &[Option<u32>],
        out: &mut Vec<Vec<u32>>,
    ) {
        if i + 1 == cur.len() {
            if bounds[i].map_or(true, |b| remaining <= b) {
                cur[i] = remaining;
                out.push(cur.clone());
            }
            return;
        }
        let cap = bounds[i].map_or(remaining, |b| b.min(remaining));
        for v in 0..=cap {
            cur[i] = v;
            rec(i + 1, remaining - v, cur, bounds, out);
        }
        cur[i] = 0;
    }
    if d == 0 {
        if r == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, r, &mut cur, bounds, &mut out);
    out
}

/// All exponent vectors with total degree at most `n`, in graded
/// lexicographic order. This fixes the coefficient-space basis used by the
/// vanishing certificates.
pub fn monomials_up_to(d: usize, n: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let unbounded = vec![None; d];
    for r in 0..=n {
        let mut level = compositions_bounded(d, r, &unbounded);
        level.sort();
        out.extend(level);
    }
    out
}
