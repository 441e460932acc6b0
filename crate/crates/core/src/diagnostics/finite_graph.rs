//! Exact criteria for the "all Picard sequences" conditions on finite spaces.
//!
//! On a finite universe a generalized Picard sequence is an infinite walk in
//! the graph with an edge `x → u` whenever `u ∈ Φ(x)`. Each criterion below
//! characterizes the existence of a bad infinite walk by a finite search.

use std::collections::{HashMap, VecDeque};

/// Largest universe handled by the subset and state-space searches.
pub const MAX_EXACT_POINTS: usize = 12;

/// The Picard graph of a map on `{0, .., n-1}` with its distance matrix.
#[derive(Clone, Debug)]
pub struct PicardGraph {
    pub adj: Vec<Vec<bool>>,
    pub q: Vec<Vec<f64>>,
}

impl PicardGraph {
    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().enumerate().filter(|(_, &e)| e).map(|(u, _)| u)
    }

    /// Shortest walk from `from` to `to` through vertices allowed by `keep`
    /// (both ends included; a single vertex when `from == to`).
    fn path(&self, from: usize, to: usize, keep: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
        let n = self.len();
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                let mut p = vec![to];
                let mut c = to;
                while c != from {
                    c = parent[c];
                    p.push(c);
                }
                p.reverse();
                return Some(p);
            }
            for u in self.successors(v) {
                if !seen[u] && keep(u) {
                    seen[u] = true;
                    parent[u] = v;
                    queue.push_back(u);
                }
            }
        }
        None
    }

    /// A closed walk `v → .. → v` of positive length inside `keep`.
    fn cycle_through(&self, v: usize, keep: impl Fn(usize) -> bool + Copy) -> Option<Vec<usize>> {
        if self.adj[v][v] {
            return Some(vec![v, v]);
        }
        self.successors(v)
            .filter(|&u| keep(u))
            .filter_map(|u| self.path(u, v, keep).map(|p| (u, p)))
            .min_by_key(|(_, p)| p.len())
            .map(|(_, p)| std::iter::once(v).chain(p).collect())
    }

    /// A cycle containing an edge of positive length: then the walk that
    /// repeats it forever has steps not tending to zero. Returns the closed
    /// walk, starting and ending at the same point.
    pub fn nonvanishing_cycle(&self, tol: f64) -> Option<Vec<usize>> {
        let n = self.len();
        for x in 0..n {
            for u in self.successors(x) {
                if self.q[x][u] > tol {
                    if let Some(back) = self.path(u, x, |_| true) {
                        return Some(std::iter::once(x).chain(back).collect());
                    }
                }
            }
        }
        None
    }

    /// A walk whose sup-gaps vanish eventually (its tail cycles through
    /// points with `gap <= tol`) while the images along it have empty
    /// intersection. Returns `(prefix, cycle)`; the walk is the prefix
    /// followed by the cycle repeated forever.
    ///
    /// `None` also when the universe exceeds [`MAX_EXACT_POINTS`]; callers
    /// check the size first.
    pub fn empty_intersection_walk(&self, gap: &[f64], tol: f64) -> Option<(Vec<usize>, Vec<usize>)> {
        let n = self.len();
        if n > MAX_EXACT_POINTS {
            return None;
        }
        let img: Vec<u32> = (0..n)
            .map(|v| self.successors(v).fold(0u32, |m, u| m | (1 << u)))
            .collect();
        let in_z = |v: usize| gap[v] <= tol;
        let on_cycle: Vec<bool> = (0..n)
            .map(|v| in_z(v) && self.cycle_through(v, in_z).is_some())
            .collect();
        let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        let meet = |mask: u32| (0..n).filter(|&w| mask >> w & 1 == 1).fold(full, |a, w| a & img[w]);

        let mut parent: HashMap<(usize, u32), Option<(usize, u32)>> = HashMap::new();
        let mut queue = VecDeque::new();
        for s in 0..n {
            parent.insert((s, 1 << s), None);
            queue.push_back((s, 1u32 << s));
        }
        while let Some((v, mask)) = queue.pop_front() {
            if on_cycle[v] && meet(mask) == 0 {
                let mut prefix = vec![v];
                let mut cur = (v, mask);
                while let Some(Some(p)) = parent.get(&cur) {
                    prefix.push(p.0);
                    cur = *p;
                }
                prefix.reverse();
                let cycle = self.cycle_through(v, in_z).expect("checked above");
                return Some((prefix, cycle));
            }
            for u in self.successors(v) {
                let next = (u, mask | 1 << u);
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                    e.insert(Some((v, mask)));
                    queue.push_back(next);
                }
            }
        }
        None
    }

    /// A set `T` a Picard walk can cycle through forever with `q <= eps` on
    /// `T × T` (so the walk is forward Cauchy), together with two distinct
    /// forward limits `y` (`q(a, y) <= eps` for all `a ∈ T`).
    pub fn cauchy_walk_with_two_limits(&self, eps: f64) -> Option<(Vec<usize>, usize, usize)> {
        let n = self.len();
        if n > MAX_EXACT_POINTS {
            return None;
        }
        for mask in 1u32..(1 << n) {
            let t: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            if !t.iter().all(|&a| t.iter().all(|&b| self.q[a][b] <= eps)) {
                continue;
            }
            if !self.strongly_connected(&t, mask) {
                continue;
            }
            let limits: Vec<usize> = (0..n).filter(|&y| t.iter().all(|&a| self.q[a][y] <= eps)).collect();
            if limits.len() >= 2 {
                return Some((t, limits[0], limits[1]));
            }
        }
        None
    }

    /// Whether the subgraph induced by `t` admits a closed walk visiting
    /// every vertex of `t`.
    fn strongly_connected(&self, t: &[usize], mask: u32) -> bool {
        if t.len() == 1 {
            return self.adj[t[0]][t[0]];
        }
        let keep = |v: usize| mask >> v & 1 == 1;
        let root = t[0];
        t.iter()
            .all(|&v| self.path(root, v, keep).is_some() && self.path(v, root, keep).is_some())
    }

    /// A closed walk through all of `t`, used to present witnesses.
    pub fn tour(&self, t: &[usize]) -> Vec<usize> {
        let mask = t.iter().fold(0u32, |m, &v| m | 1 << v);
        let keep = |v: usize| mask >> v & 1 == 1;
        if t.len() == 1 {
            return vec![t[0], t[0]];
        }
        let mut walk = vec![t[0]];
        for &v in t[1..].iter().chain(std::iter::once(&t[0])) {
            let last = *walk.last().expect("nonempty");
            let p = self.path(last, v, keep).unwrap_or_default();
            walk.extend(p.into_iter().skip(1));
        }
        walk
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(adj: &[&[usize]], q: Vec<Vec<f64>>) -> PicardGraph {
        let n = adj.len();
        let adj = adj
            .iter()
            .map(|im| (0..n).map(|u| im.contains(&u)).collect())
            .collect();
        PicardGraph { adj, q }
    }

    #[test]
    fn two_cycle_with_positive_distance() {
        let g = graph(&[&[1], &[0]], vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(g.nonvanishing_cycle(0.0), Some(vec![0, 1, 0]));
        let g = graph(&[&[0, 1], &[1]], vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(g.nonvanishing_cycle(0.0), None);
    }

    #[test]
    fn intersection_walk() {
        // 0 and 1 swap forever at distance zero; Φ(0) = {1}, Φ(1) = {0}
        let g = graph(&[&[1], &[0]], vec![vec![0.0; 2]; 2]);
        let (prefix, cycle) = g.empty_intersection_walk(&[0.0, 0.0], 0.0).unwrap();
        assert_eq!(prefix, vec![0, 1]);
        assert_eq!(cycle, vec![1, 0, 1]);
        // identity map: every walk is constant with a common point
        let g = graph(&[&[0], &[1]], vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(g.empty_intersection_walk(&[0.0, 0.0], 0.0), None);
    }

    #[test]
    fn two_limits() {
        // a self-loop at 0 with q(0, 1) = 0: both 0 and 1 are forward limits
        let g = graph(&[&[0], &[1]], vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
        let (t, a, b) = g.cauchy_walk_with_two_limits(0.0).unwrap();
        assert_eq!((t, a, b), (vec![0], 0, 1));
        let g = graph(&[&[0], &[1]], vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(g.cauchy_walk_with_two_limits(0.0), None);
    }

    #[test]
    fn tours_cover_the_set() {
        let g = graph(&[&[1], &[2], &[0]], vec![vec![0.0; 3]; 3]);
        assert_eq!(g.tour(&[0, 1, 2]), vec![0, 1, 2, 0]);
    }
}
