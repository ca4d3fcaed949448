//! Envelope (skyline) LDLᵀ factorization after a reverse Cuthill–McKee
//! reordering.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::sparse::SparseSym;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ordering {
    Natural,
    ReverseCuthillMcKee,
}

/// `P A Pᵀ = L D Lᵀ` with `L` unit lower triangular stored by rows over the
/// envelope.
#[derive(Clone, Debug)]
pub struct LdlFactor {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    l: Vec<f64>,
    d: Vec<f64>,
}

impl LdlFactor {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Pivots `D` in factorization order.
    pub fn pivots(&self) -> &[f64] {
        &self.d
    }

    /// Stored envelope entries of `L` (excluding the unit diagonal).
    pub fn envelope_size(&self) -> usize {
        self.l.len()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut y: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for i in 0..self.n {
            let f = self.first[i];
            let row = &self.l[self.start[i]..self.start[i + 1]];
            let s: f64 = row.iter().zip(&y[f..i]).map(|(l, v)| l * v).sum();
            y[i] -= s;
        }
        for (yi, d) in y.iter_mut().zip(&self.d) {
            *yi /= d;
        }
        for i in (0..self.n).rev() {
            let f = self.first[i];
            let xi = y[i];
            let row = &self.l[self.start[i]..self.start[i + 1]];
            for (yk, l) in y[f..i].iter_mut().zip(row) {
                *yk -= l * xi;
            }
        }
        let mut x = vec![0.0; self.n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

/// Factorizes with reverse Cuthill–McKee ordering.
pub fn factorize(a: &SparseSym) -> Result<LdlFactor> {
    factorize_with(a, Ordering::ReverseCuthillMcKee)
}

pub fn factorize_with(a: &SparseSym, ordering: Ordering) -> Result<LdlFactor> {
    let n = a.n();
    let perm = match ordering {
        Ordering::Natural => (0..n).collect(),
        Ordering::ReverseCuthillMcKee => reverse_cuthill_mckee(&a.adjacency()),
    };
    let mut inv = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    // permuted lower-triangle rows
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for i in 0..n {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            let (pi, pj) = (inv[i], inv[j]);
            let (r, c) = if pi >= pj { (pi, pj) } else { (pj, pi) };
            rows[r].push((c, v));
        }
    }
    let mut first = vec![0usize; n];
    let mut start = vec![0usize; n + 1];
    for i in 0..n {
        first[i] = rows[i].iter().map(|&(c, _)| c).min().unwrap_or(i).min(i);
        start[i + 1] = start[i] + (i - first[i]);
    }
    let mut l = vec![0.0; start[n]];
    let mut d = vec![0.0; n];
    let mut work = vec![0.0; n];
    for i in 0..n {
        let f = first[i];
        let mut diag = 0.0;
        for &(c, v) in &rows[i] {
            if c == i {
                diag += v;
            } else {
                work[c] += v;
            }
        }
        // work[j] becomes L_ij D_j
        for j in f..i {
            let fj = first[j];
            let k0 = f.max(fj);
            if k0 < j {
                let lj = &l[start[j] + (k0 - fj)..start[j + 1]];
                let s: f64 = work[k0..j].iter().zip(lj).map(|(w, x)| w * x).sum();
                work[j] -= s;
            }
        }
        let row = &mut l[start[i]..start[i + 1]];
        for (k, j) in (f..i).enumerate() {
            let lij = work[j] / d[j];
            diag -= work[j] * lij;
            row[k] = lij;
            work[j] = 0.0;
        }
        if !(diag > 0.0) {
            return Err(Error::NotPositiveDefinite(perm[i]));
        }
        d[i] = diag;
    }
    Ok(LdlFactor {
        n,
        perm,
        first,
        start,
        l,
        d,
    })
}

/// Reverse Cuthill–McKee order (`perm[new] = old`), one BFS per connected
/// component, each started from a George–Liu pseudo-peripheral node.
pub fn reverse_cuthill_mckee(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut level = vec![usize::MAX; n];
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        let root = pseudo_peripheral(adj, seed, &mut level);
        let mut queue = VecDeque::new();
        queue.push_back(root);
        visited[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (adj[w].len(), w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral(adj: &[Vec<usize>], seed: usize, level: &mut [usize]) -> usize {
    // start from a minimum-degree node of the component
    let comp = bfs_levels(adj, seed, level);
    let mut root = *comp.iter().min_by_key(|&&v| (adj[v].len(), v)).expect("nonempty component");
    for &v in &comp {
        level[v] = usize::MAX;
    }
    let mut ecc = 0;
    loop {
        let reached = bfs_levels(adj, root, level);
        let depth = reached.iter().map(|&v| level[v]).max().unwrap_or(0);
        let candidate = reached
            .iter()
            .copied()
            .filter(|&v| level[v] == depth)
            .min_by_key(|&v| (adj[v].len(), v))
            .expect("last level nonempty");
        for &v in &reached {
            level[v] = usize::MAX;
        }
        if depth <= ecc {
            return root;
        }
        ecc = depth;
        root = candidate;
    }
}

fn bfs_levels(adj: &[Vec<usize>], root: usize, level: &mut [usize]) -> Vec<usize> {
    let mut reached = vec![root];
    level[root] = 0;
    let mut head = 0;
    while head < reached.len() {
        let v = reached[head];
        head += 1;
        for &w in &adj[v] {
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                reached.push(w);
            }
        }
    }
    reached
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseMatrix;

    #[test]
    fn diagonal_pivots() {
        let a = SparseSym::from_dense(&DenseMatrix::from_rows(&[&[2.0, 0.0], &[0.0, 3.0]]));
        let f = factorize_with(&a, Ordering::Natural).unwrap();
        assert_eq!(f.pivots(), &[2.0, 3.0]);
        assert_eq!(f.envelope_size(), 0);
    }

    #[test]
    fn laplacian_pivots() {
        let a = SparseSym::from_dense(&DenseMatrix::from_rows(&[
            &[2.0, -1.0, 0.0],
            &[-1.0, 2.0, -1.0],
            &[0.0, -1.0, 2.0],
        ]));
        let f = factorize_with(&a, Ordering::Natural).unwrap();
        let want = [2.0, 1.5, 4.0 / 3.0];
        for (p, w) in f.pivots().iter().zip(want) {
            assert!((p - w).abs() < 1e-15);
        }
        let x = f.solve(&[1.0, 0.0, 1.0]);
        for v in x {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn indefinite_rejected() {
        let a = SparseSym::from_dense(&DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]));
        assert_eq!(factorize_with(&a, Ordering::Natural).unwrap_err(), Error::NotPositiveDefinite(1));
    }

    #[test]
    fn rcm_is_a_permutation() {
        // path graph 0-3-1-4-2 plus an isolated node 5
        let adj = vec![vec![3], vec![3, 4], vec![4], vec![0, 1], vec![1, 2], vec![]];
        let mut p = reverse_cuthill_mckee(&adj);
        assert_eq!(p.len(), 6);
        p.sort_unstable();
        assert_eq!(p, vec![0, 1, 2, 3, 4, 5]);
    }
}
