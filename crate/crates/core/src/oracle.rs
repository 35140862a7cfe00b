//! Exhaustive ground truth on finite chains `{0,...,n-1}`.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest chain the enumerations accept.
pub const MAX_N: usize = 8;
/// Largest chain the rank check and the report accept.
pub const MAX_RANK_N: usize = 7;

/// A full transformation of `{0,...,n-1}`; `images[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiniteMap {
    pub n: usize,
    pub images: Vec<u8>,
}

impl FiniteMap {
    pub fn new(images: Vec<u8>) -> Result<Self> {
        let n = images.len();
        if n == 0 || images.iter().any(|&y| y as usize >= n) {
            return Err(Error::InvalidMap(format!(
                "{images:?} is not a map of a chain of size {n}"
            )));
        }
        Ok(FiniteMap { n, images })
    }

    pub fn identity(n: usize) -> Self {
        FiniteMap {
            n,
            images: (0..n as u8).collect(),
        }
    }

    /// `i -> i+1`, `n-1 -> 0`.
    pub fn cycle(n: usize) -> Self {
        FiniteMap {
            n,
            images: (0..n).map(|i| ((i + 1) % n) as u8).collect(),
        }
    }

    /// `x -> other(self(x))`.
    pub fn then(&self, other: &FiniteMap) -> FiniteMap {
        FiniteMap {
            n: self.n,
            images: self
                .images
                .iter()
                .map(|&y| other.images[y as usize])
                .collect(),
        }
    }

    pub fn is_order_preserving(&self) -> bool {
        self.images.windows(2).all(|w| w[0] <= w[1])
    }

    /// Splits `k` (size of the ideal) passing the definition, smallest first.
    pub fn ideal_sizes(&self) -> Vec<usize> {
        (1..=self.n)
            .filter(|&k| {
                let (x1, x2) = self.images.split_at(k);
                let sorted = |s: &[u8]| s.windows(2).all(|w| w[0] <= w[1]);
                sorted(x1) && sorted(x2) && x2.last().is_none_or(|top| top <= &x1[0])
            })
            .collect()
    }

    pub fn is_orientation_preserving(&self) -> bool {
        !self.ideal_sizes().is_empty()
    }
}

fn check_n(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::BadParams("chain size must be positive".into()));
    }
    if n > cap {
        return Err(Error::TooLarge(n));
    }
    Ok(())
}

/// All nondecreasing sequences of length `len` over `lo..=hi`.
fn monotone(len: usize, lo: u8, hi: u8) -> Vec<Vec<u8>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in lo..=hi {
        for mut rest in monotone(len - 1, first, hi) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn enumerate_o(n: usize) -> Result<BTreeSet<FiniteMap>> {
    check_n(n, MAX_N)?;
    Ok(monotone(n, 0, (n - 1) as u8)
        .into_iter()
        .map(|images| FiniteMap { n, images })
        .collect())
}

/// Built from the split: a nondecreasing `X1` part over `[v, n-1]` followed by a
/// nondecreasing `X2` part over `[0, v]`, for every ideal size and split value.
pub fn enumerate_op(n: usize) -> Result<BTreeSet<FiniteMap>> {
    check_n(n, MAX_N)?;
    let top = (n - 1) as u8;
    let mut out = BTreeSet::new();
    for k in 1..=n {
        for v in 0..=top {
            // X1 starts exactly at v so each (k, v) pair is enumerated once.
            let heads = monotone(k - 1, v, top);
            let tails = monotone(n - k, 0, v);
            for h in &heads {
                for t in &tails {
                    let mut images = Vec::with_capacity(n);
                    images.push(v);
                    images.extend_from_slice(h);
                    images.extend_from_slice(t);
                    out.insert(FiniteMap { n, images });
                }
            }
        }
    }
    Ok(out)
}

/// Every map of `{0,...,n-1}`, filtered by `keep`.
pub fn brute_force(n: usize, keep: impl Fn(&FiniteMap) -> bool) -> Result<BTreeSet<FiniteMap>> {
    check_n(n, MAX_N)?;
    let total = n.pow(n as u32);
    let mut out = BTreeSet::new();
    for mut code in 0..total {
        let mut images = vec![0u8; n];
        for slot in images.iter_mut().rev() {
            *slot = (code % n) as u8;
            code /= n;
        }
        let f = FiniteMap { n, images };
        if keep(&f) {
            out.insert(f);
        }
    }
    Ok(out)
}

/// The subsemigroup generated by `gens`: breadth-first right multiplication by the
/// generators until nothing new appears.
pub fn closure<'a>(gens: impl IntoIterator<Item = &'a FiniteMap>) -> Result<HashSet<FiniteMap>> {
    let gens: Vec<FiniteMap> = gens
        .into_iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = gens
        .first()
        .ok_or_else(|| Error::BadParams("no generators".into()))?
        .n;
    if gens.iter().any(|g| g.n != n) {
        return Err(Error::ModelMismatch);
    }
    let mut seen: HashSet<FiniteMap> = gens.iter().cloned().collect();
    let mut frontier = gens.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for f in &frontier {
            for g in &gens {
                let h = f.then(g);
                if !seen.contains(&h) {
                    seen.insert(h.clone());
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    Ok(seen)
}

fn same(a: &HashSet<FiniteMap>, b: &BTreeSet<FiniteMap>) -> bool {
    a.len() == b.len() && b.iter().all(|f| a.contains(f))
}

/// `rank(OP_n : O_n)` as far as one extra generator: 0, 1, or `None` for more.
/// The cycle is tried before the other candidates.
pub fn relative_rank(n: usize) -> Result<Option<usize>> {
    check_n(n, MAX_RANK_N)?;
    let o = enumerate_o(n)?;
    let op = enumerate_op(n)?;
    if same(&closure(&o)?, &op) {
        return Ok(Some(0));
    }
    let cycle = FiniteMap::cycle(n);
    let candidates = std::iter::once(cycle.clone()).chain(
        op.iter()
            .filter(|g| !o.contains(*g) && **g != cycle)
            .cloned(),
    );
    for g in candidates {
        if same(&closure(o.iter().chain(std::iter::once(&g)))?, &op) {
            return Ok(Some(1));
        }
    }
    Ok(None)
}

/// True iff `O_n` alone does not generate `OP_n` but `O_n` and one more map do.
pub fn relative_rank_one_check(n: usize) -> Result<bool> {
    if n < 3 {
        return Err(Error::BadParams(format!(
            "rank check needs n >= 3, got {n}"
        )));
    }
    Ok(relative_rank(n)? == Some(1))
}

/// Every map `g` of `{0,...,n-1}` with `<O_n, g> = OP_n`, found by trying all `n^n` maps.
pub fn single_generators(n: usize) -> Result<Vec<FiniteMap>> {
    check_n(n, 4)?;
    let o = enumerate_o(n)?;
    let op = enumerate_op(n)?;
    let mut out = Vec::new();
    for g in brute_force(n, |_| true)? {
        if same(&closure(o.iter().chain(std::iter::once(&g)))?, &op) {
            out.push(g);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRow {
    pub n: usize,
    pub o_count: usize,
    pub op_count: usize,
    pub closure_o: usize,
    pub closure_o_cycle: usize,
    pub relative_rank: Option<usize>,
    pub rank_check: bool,
}

pub fn oracle_row(n: usize) -> Result<OracleRow> {
    check_n(n, MAX_RANK_N)?;
    let o = enumerate_o(n)?;
    let op = enumerate_op(n)?;
    let cycle = FiniteMap::cycle(n);
    let closure_o = closure(&o)?.len();
    let closure_o_cycle = closure(o.iter().chain(std::iter::once(&cycle)))?.len();
    let relative_rank = relative_rank(n)?;
    let expected = if o.len() == op.len() { 0 } else { 1 };
    Ok(OracleRow {
        n,
        o_count: o.len(),
        op_count: op.len(),
        closure_o,
        closure_o_cycle,
        relative_rank,
        rank_check: relative_rank == Some(expected),
    })
}

pub fn oracle_report(n_max: usize) -> Result<Vec<OracleRow>> {
    check_n(n_max, MAX_RANK_N)?;
    (1..=n_max).map(oracle_row).collect()
}

pub fn report_csv(rows: &[OracleRow]) -> String {
    let mut out =
        String::from("n,o_count,op_count,closure_o,closure_o_cycle,relative_rank,rank_check\n");
    for r in rows {
        let rank = r
            .relative_rank
            .map_or_else(|| ">1".to_string(), |k| k.to_string());
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n, r.o_count, r.op_count, r.closure_o, r.closure_o_cycle, rank, r.rank_check
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: u64, k: u64) -> u64 {
        (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
    }

    #[test]
    fn counts_of_o() {
        assert_eq!(enumerate_o(1).unwrap().len(), 1);
        assert_eq!(enumerate_o(2).unwrap().len(), 3);
        assert_eq!(enumerate_o(3).unwrap().len(), 10);
        for n in 1..=8 {
            assert_eq!(
                enumerate_o(n).unwrap().len() as u64,
                binomial(2 * n as u64 - 1, n as u64 - 1)
            );
        }
    }

    #[test]
    fn constructive_matches_brute_force() {
        for n in 1..=5 {
            assert_eq!(
                enumerate_o(n).unwrap(),
                brute_force(n, FiniteMap::is_order_preserving).unwrap()
            );
            assert_eq!(
                enumerate_op(n).unwrap(),
                brute_force(n, FiniteMap::is_orientation_preserving).unwrap()
            );
        }
        assert_eq!(enumerate_op(2).unwrap().len(), 4);
    }

    #[test]
    fn too_large() {
        assert!(matches!(enumerate_o(9), Err(Error::TooLarge(9))));
        assert!(matches!(
            relative_rank_one_check(8),
            Err(Error::TooLarge(8))
        ));
        assert!(matches!(oracle_report(9), Err(Error::TooLarge(9))));
    }

    #[test]
    fn cyclic_shifts_are_op() {
        for n in 1..=6 {
            let mut f = FiniteMap::identity(n);
            for _ in 0..n {
                f = f.then(&FiniteMap::cycle(n));
                assert!(f.is_orientation_preserving());
            }
        }
    }

    #[test]
    fn o_inside_op_and_op_closed() {
        for n in 1..=5 {
            let o = enumerate_o(n).unwrap();
            let op = enumerate_op(n).unwrap();
            assert!(o.is_subset(&op));
            for f in &op {
                for g in &op {
                    assert!(op.contains(&f.then(g)));
                }
            }
        }
    }

    #[test]
    fn non_constant_ideal_is_unique() {
        for n in 1..=6 {
            for f in enumerate_op(n).unwrap() {
                if f.images.iter().any(|&y| y != f.images[0]) {
                    assert_eq!(f.ideal_sizes().len(), 1, "{f:?}");
                }
            }
        }
    }

    #[test]
    fn closure_facts() {
        let id = FiniteMap::identity(4);
        assert_eq!(closure([&id]).unwrap().len(), 1);
        for n in 3..=5 {
            let o = enumerate_o(n).unwrap();
            let op = enumerate_op(n).unwrap();
            assert!(same(&closure(&o).unwrap(), &o));
            assert!(same(
                &closure(o.iter().chain([&FiniteMap::cycle(n)])).unwrap(),
                &op
            ));
        }
    }

    #[test]
    fn closure_is_idempotent() {
        let o = enumerate_o(3).unwrap();
        let once = closure(o.iter().chain([&FiniteMap::cycle(3)])).unwrap();
        let twice = closure(&once).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn rank_one() {
        assert!(relative_rank_one_check(3).unwrap());
        assert!(relative_rank_one_check(4).unwrap());
        assert!(relative_rank_one_check(5).unwrap());
        let gens = single_generators(3).unwrap();
        assert!(gens.contains(&FiniteMap::cycle(3)));
        assert!(gens
            .iter()
            .all(|g| g.is_orientation_preserving() && !g.is_order_preserving()));
    }

    #[test]
    fn report_rows() {
        let rows = oracle_report(4).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.rank_check));
        assert_eq!(rows[0].relative_rank, Some(0));
        let csv = report_csv(&rows);
        assert!(csv.starts_with("n,o_count,op_count"));
        assert_eq!(csv.lines().count(), 5);
    }
}
