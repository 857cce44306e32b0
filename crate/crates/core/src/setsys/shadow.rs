//! Shadows, the real-binomial shadow bound, and the partial shadow problem.
//!
//! `f(r, m, k)` is the minimum size of a family `B` of (r-1)-sets such that
//! some family `A` of `m` r-sets has, for every `A in A`, at most `k` of its
//! (r-1)-subsets missing from `B`. Exhaustive search runs over canonical
//! representatives (elements introduced in consecutive order), which covers
//! every family up to relabeling.

use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

use crate::combin::k_subsets;

#[derive(Debug, Error)]
pub enum ShadowError {
    #[error("family member {0} has the wrong size")]
    BadMemberSize(usize),
    #[error("exhaustive search budget: need r <= 5, m <= 8, ground <= 9 (got r={r}, m={m}, ground={ground})")]
    BudgetExceeded { r: u32, m: u32, ground: u32 },
    #[error("need r > k >= 0")]
    BadParameters,
}

/// The shadow of a family of d-sets together with the real-binomial bound:
/// solving `C(x, d) = |J|` gives `|shadow| >= C(x, d-1)`.
#[derive(Clone, Debug, Serialize)]
pub struct ShadowResult {
    pub shadow: Vec<Vec<u32>>,
    pub x: f64,
    pub bound: f64,
}

pub fn shadow_and_lovasz(family: &[Vec<u32>], d: u32) -> Result<ShadowResult, ShadowError> {
    let mut shadow: std::collections::BTreeSet<Vec<u32>> = Default::default();
    for (i, set) in family.iter().enumerate() {
        if set.len() != d as usize {
            return Err(ShadowError::BadMemberSize(i));
        }
        let mut sorted = set.clone();
        sorted.sort_unstable();
        for drop in 0..sorted.len() {
            let mut sub = sorted.clone();
            sub.remove(drop);
            shadow.insert(sub);
        }
    }
    let x = crate::bounds::solve_binom_real(family.len() as u64, d, 1e-12, 128)
        .expect("nonempty family");
    let bound = crate::bounds::binom_real(&x, d - 1).to_f64();
    Ok(ShadowResult { shadow: shadow.into_iter().collect(), x: x.to_f64(), bound })
}

pub enum PartialShadowMode {
    /// Check a concrete `(A, B)` witness pair.
    Certificate { a: Vec<Vec<u32>>, b: Vec<Vec<u32>> },
    /// Search all canonical families on at most `ground_cap` elements.
    Exhaustive { ground_cap: u32 },
}

#[derive(Clone, Debug, Serialize)]
pub struct PartialShadowResult {
    pub r: u32,
    pub m: u32,
    pub k: u32,
    /// `C(x, r-k-1)` with `C(x, r-k) = m`.
    pub lovasz_lower: f64,
    /// Certificate mode: `|B|` when the witness is valid. Exhaustive mode:
    /// the exact minimum over the searched ground.
    pub value: Option<u64>,
    pub valid: bool,
    pub budget_exceeded: bool,
    pub nodes: u64,
    pub best_family: Option<Vec<Vec<u32>>>,
}

pub fn partial_shadow(
    r: u32,
    m: u32,
    k: u32,
    mode: PartialShadowMode,
) -> Result<PartialShadowResult, ShadowError> {
    if k >= r || m == 0 {
        return Err(ShadowError::BadParameters);
    }
    let x = crate::bounds::solve_binom_real(m as u64, r - k, 1e-12, 128).expect("m >= 1");
    let lovasz_lower = if r - k - 1 == 0 {
        1.0
    } else {
        crate::bounds::binom_real(&x, r - k - 1).to_f64()
    };
    match mode {
        PartialShadowMode::Certificate { a, b } => {
            certificate_check(r, m, k, lovasz_lower, &a, &b)
        }
        PartialShadowMode::Exhaustive { ground_cap } => {
            if r > 5 || m > 8 || ground_cap > 9 {
                return Err(ShadowError::BudgetExceeded { r, m, ground: ground_cap });
            }
            Ok(exhaustive_search(r, m, k, ground_cap, lovasz_lower))
        }
    }
}

fn certificate_check(
    r: u32,
    m: u32,
    k: u32,
    lovasz_lower: f64,
    a: &[Vec<u32>],
    b: &[Vec<u32>],
) -> Result<PartialShadowResult, ShadowError> {
    for (i, set) in a.iter().enumerate() {
        if set.len() != r as usize {
            return Err(ShadowError::BadMemberSize(i));
        }
    }
    for (i, set) in b.iter().enumerate() {
        if set.len() != r as usize - 1 {
            return Err(ShadowError::BadMemberSize(i));
        }
    }
    let bset: std::collections::BTreeSet<Vec<u32>> = b
        .iter()
        .map(|s| {
            let mut v = s.clone();
            v.sort_unstable();
            v
        })
        .collect();
    let mut valid = a.len() == m as usize;
    for set in a {
        let mut sorted = set.clone();
        sorted.sort_unstable();
        let mut missing = 0u32;
        for drop in 0..sorted.len() {
            let mut sub = sorted.clone();
            sub.remove(drop);
            if !bset.contains(&sub) {
                missing += 1;
            }
        }
        if missing > k {
            valid = false;
        }
    }
    Ok(PartialShadowResult {
        r,
        m,
        k,
        lovasz_lower,
        value: valid.then_some(bset.len() as u64),
        valid,
        budget_exceeded: false,
        nodes: 0,
        best_family: None,
    })
}

/// The canonical `(A, B)` witness behind `f(5, 6, 1) <= 12`: all 5-subsets of
/// a 6-element ground set against all 4-subsets except three with
/// pairwise-disjoint complements.
pub fn be_partial_shadow_certificate() -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
    let sys = super::bollobas_eccles_system();
    (sys.joints, sys.families.into_iter().next().unwrap())
}

struct Candidate {
    elems: Vec<u8>,
    mask: u16,
    shadow: u128,
}

struct Dfs {
    candidates: Vec<Candidate>,
    m: usize,
    k: u32,
    best: u64,
    best_family: Vec<usize>,
    nodes: u64,
    budget: u64,
    exceeded: bool,
}

impl Dfs {
    fn rec(&mut self, start: usize, chosen: &mut Vec<usize>, used: u16, shadow: u128) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exceeded = true;
            return;
        }
        if chosen.len() == self.m {
            let value = shadow.count_ones() as u64 - self.max_droppable(chosen);
            if value < self.best {
                self.best = value;
                self.best_family = chosen.clone();
            }
            return;
        }
        // the shadow only grows; at most k per set can ever be dropped
        let floor = shadow.count_ones() as u64;
        let droppable_cap = self.k as u64 * self.m as u64;
        if floor.saturating_sub(droppable_cap) >= self.best {
            return;
        }
        let remaining = self.m - chosen.len();
        let max_used = 16 - used.leading_zeros() as u8; // elements are 0-based bits
        for idx in start..self.candidates.len() {
            if self.candidates.len() - idx < remaining {
                break;
            }
            let cand = &self.candidates[idx];
            let new = cand.mask & !used;
            if new != 0 {
                // canonical form: fresh elements must continue the prefix
                let q = new.count_ones();
                let expect = (((1u32 << q) - 1) << max_used) as u16;
                if new != expect {
                    continue;
                }
            }
            let mask = cand.mask;
            let sh = cand.shadow;
            chosen.push(idx);
            self.rec(idx + 1, chosen, used | mask, shadow | sh);
            chosen.pop();
            if self.exceeded {
                return;
            }
        }
    }

    /// Maximum number of shadow elements that can be deleted while leaving
    /// every chosen set with at most k of its sub-sets missing.
    fn max_droppable(&self, chosen: &[usize]) -> u64 {
        if self.k == 0 {
            return 0;
        }
        // elements of the union, each tagged with the sets it belongs to
        let mut owners: BTreeMap<u32, u16> = BTreeMap::new();
        for (si, &ci) in chosen.iter().enumerate() {
            let mut sh = self.candidates[ci].shadow;
            while sh != 0 {
                let bit = sh.trailing_zeros();
                *owners.entry(bit).or_insert(0) |= 1 << si;
                sh &= sh - 1;
            }
        }
        let owner_masks: Vec<u16> = owners.into_values().collect();
        let mut counts = vec![0u32; chosen.len()];
        let mut best = 0u64;
        fn rec(
            i: usize,
            dropped: u64,
            owner_masks: &[u16],
            counts: &mut [u32],
            k: u32,
            best: &mut u64,
        ) {
            if dropped + (owner_masks.len() - i) as u64 <= *best {
                return;
            }
            if i == owner_masks.len() {
                *best = (*best).max(dropped);
                return;
            }
            let owners = owner_masks[i];
            let can_drop = (0..counts.len())
                .filter(|&s| owners & (1 << s) != 0)
                .all(|s| counts[s] < k);
            if can_drop {
                for s in 0..counts.len() {
                    if owners & (1 << s) != 0 {
                        counts[s] += 1;
                    }
                }
                rec(i + 1, dropped + 1, owner_masks, counts, k, best);
                for s in 0..counts.len() {
                    if owners & (1 << s) != 0 {
                        counts[s] -= 1;
                    }
                }
            }
            rec(i + 1, dropped, owner_masks, counts, k, best);
        }
        rec(0, 0, &owner_masks, &mut counts, self.k, &mut best);
        best
    }
}

fn exhaustive_search(
    r: u32,
    m: u32,
    k: u32,
    ground_cap: u32,
    lovasz_lower: f64,
) -> PartialShadowResult {
    let cap = ground_cap as usize;
    let sub_index: BTreeMap<u16, u32> = k_subsets(cap, r as usize - 1)
        .into_iter()
        .enumerate()
        .map(|(i, s)| (s.iter().fold(0u16, |m, &e| m | (1 << e)), i as u32))
        .collect();
    assert!(sub_index.len() <= 128, "shadow space must fit a u128");
    let candidates: Vec<Candidate> = k_subsets(cap, r as usize)
        .into_iter()
        .map(|s| {
            let mask = s.iter().fold(0u16, |m, &e| m | (1 << e));
            let mut shadow = 0u128;
            for drop in 0..s.len() {
                let sub = mask & !(1 << s[drop]);
                shadow |= 1u128 << sub_index[&sub];
            }
            Candidate { elems: s.iter().map(|&e| e as u8).collect(), mask, shadow }
        })
        .collect();
    // candidates from k_subsets are already in lex order of element lists
    debug_assert!(candidates.windows(2).all(|w| w[0].elems < w[1].elems));

    let mut dfs = Dfs {
        candidates,
        m: m as usize,
        k,
        best: u64::MAX,
        best_family: Vec::new(),
        nodes: 0,
        budget: 200_000_000,
        exceeded: false,
    };
    // seed with the colex-minimal family so pruning bites from the start
    let colex_seed: Vec<usize> = {
        let mut order: Vec<usize> = (0..dfs.candidates.len()).collect();
        order.sort_by_key(|&i| {
            let mut rev = dfs.candidates[i].elems.clone();
            rev.reverse();
            rev
        });
        let mut seed: Vec<usize> = order.into_iter().take(m as usize).collect();
        seed.sort_unstable();
        seed
    };
    if colex_seed.len() == m as usize {
        let shadow = colex_seed.iter().fold(0u128, |s, &i| s | dfs.candidates[i].shadow);
        dfs.best = shadow.count_ones() as u64 - dfs.max_droppable(&colex_seed);
        dfs.best_family = colex_seed;
    }
    let mut chosen = Vec::new();
    dfs.rec(0, &mut chosen, 0, 0);
    let family: Vec<Vec<u32>> = dfs
        .best_family
        .iter()
        .map(|&ci| dfs.candidates[ci].elems.iter().map(|&e| e as u32 + 1).collect())
        .collect();
    PartialShadowResult {
        r,
        m,
        k,
        lovasz_lower,
        value: (!dfs.exceeded).then_some(dfs.best),
        valid: !dfs.exceeded,
        budget_exceeded: dfs.exceeded,
        nodes: dfs.nodes,
        best_family: (!family.is_empty()).then_some(family),
    }
}
