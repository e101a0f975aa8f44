//! Built-in graphs, truncated to a requested alphabet size.

use super::ShiftSpace;
use crate::error::{Error, Result};
use crate::word::Symbol;

/// Block index of `s` when `1..` is cut into consecutive blocks of sizes
/// `1, 2, 3, …`: the unique `n` with `n(n-1)/2 < s ≤ n(n+1)/2`.
pub fn triangular_block(s: Symbol) -> Symbol {
    let mut n: u64 = 1;
    while n * (n + 1) / 2 < s as u64 {
        n += 1;
    }
    n as Symbol
}

/// First symbol of block `n`.
fn block_start(n: Symbol) -> Symbol {
    n * (n - 1) / 2 + 1
}

fn need(k: usize, min: usize, name: &str) -> Result<()> {
    if k < min {
        return Err(Error::InvalidShift(format!(
            "builtin `{name}` needs alphabet_size >= {min}"
        )));
    }
    Ok(())
}

impl ShiftSpace {
    /// Golden-mean shift: edges `1→1, 1→2, 2→1` (the word `22` is forbidden).
    pub fn golden_mean() -> ShiftSpace {
        ShiftSpace::new(2, [(1, 1), (1, 2), (2, 1)]).expect("golden-mean graph is valid")
    }

    /// Graph with `1→2`, `2→j` for every `j`, `3→3`, `3→1` and `j→2` for `j ≥ 4`.
    ///
    /// Every pair of words is glued by `12` (after a word ending in 3) or `22`.
    pub fn example_e1(k: usize) -> Result<ShiftSpace> {
        need(k, 2, "example-e1")?;
        let k32 = k as Symbol;
        let mut edges = vec![(1, 2)];
        edges.extend((1..=k32).map(|j| (2, j)));
        if k >= 3 {
            edges.extend([(3, 3), (3, 1)]);
        }
        edges.extend((4..=k32).map(|j| (j, 2)));
        ShiftSpace::new(k, edges)
    }

    /// Graph with a self-loop at 1, full blocks `{3n-1, 3n, 3n+1}` and edges
    /// `1 ↔ 3n+1`. Mixing but not finitely irreducible as `k → ∞`.
    pub fn example_dif(k: usize) -> Result<ShiftSpace> {
        need(k, 1, "example-dif")?;
        let k32 = k as Symbol;
        let mut edges = vec![(1, 1)];
        let mut n = 1;
        while 3 * n - 1 <= k32 {
            let block: Vec<Symbol> = (3 * n - 1..=3 * n + 1).filter(|&s| s <= k32).collect();
            for &a in &block {
                for &b in &block {
                    edges.push((a, b));
                }
            }
            if 3 * n + 1 <= k32 {
                edges.push((1, 3 * n + 1));
                edges.push((3 * n + 1, 1));
            }
            n += 1;
        }
        ShiftSpace::new(k, edges)
    }

    /// Blocks `F₁ = {1}, F₂ = {2,3}, F₃ = {4,5,6}, …`, each a full shift,
    /// joined only through symbol 1 via the first symbol of each block.
    pub fn example_nofinite(k: usize) -> Result<ShiftSpace> {
        need(k, 1, "example-nofinite")?;
        let k32 = k as Symbol;
        let mut edges = vec![(1, 1)];
        let mut n: Symbol = 2;
        while block_start(n) <= k32 {
            let start = block_start(n);
            let block: Vec<Symbol> = (start..start + n).filter(|&s| s <= k32).collect();
            for &a in &block {
                for &b in &block {
                    edges.push((a, b));
                }
            }
            edges.push((1, start));
            edges.push((start, 1));
            n += 1;
        }
        ShiftSpace::new(k, edges)
    }

    /// Block-index map `s ↦ n` for `s ∈ F_n` (fibers of sizes 1, 2, 3, …).
    pub fn triangular_factor_map(k: usize) -> Vec<Symbol> {
        (1..=k as Symbol).map(triangular_block).collect()
    }
}
