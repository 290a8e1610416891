use std::collections::VecDeque;

use super::CsrMatrix;

/// Reverse Cuthill-McKee ordering of the symmetrised pattern of `a`.
///
/// Returns `perm` with `perm[new] = old`. Each connected component starts
/// from a pseudo-peripheral node found by repeated breadth-first sweeps.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j, _) in a.iter() {
        if i != j {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();

    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut level = vec![usize::MAX; n];
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(seed, &adj, &degree, &mut level);
        let mut queue = VecDeque::new();
        visited[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral(seed: usize, adj: &[Vec<usize>], degree: &[usize], level: &mut [usize]) -> usize {
    let mut start = seed;
    let mut depth = 0;
    for _ in 0..8 {
        let (far, d, reached) = bfs_levels(start, adj, level);
        for &v in &reached {
            level[v] = usize::MAX;
        }
        if d <= depth && start != seed {
            break;
        }
        depth = d;
        // lowest-degree node in the last level
        let candidate = far.into_iter().min_by_key(|&v| (degree[v], v)).unwrap_or(start);
        if candidate == start {
            break;
        }
        start = candidate;
    }
    start
}

fn bfs_levels(start: usize, adj: &[Vec<usize>], level: &mut [usize]) -> (Vec<usize>, usize, Vec<usize>) {
    let mut reached = vec![start];
    level[start] = 0;
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
    let depth = reached.iter().map(|&v| level[v]).max().unwrap_or(0);
    let far = reached.iter().copied().filter(|&v| level[v] == depth).collect();
    (far, depth, reached)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_is_complete() {
        let t: Vec<_> = (0..20).flat_map(|i| [(i, i, 1.0), (i, (i * 7) % 20, 1.0)]).collect();
        let a = CsrMatrix::from_triplets(20, 20, &t).unwrap();
        let mut p = reverse_cuthill_mckee(&a);
        p.sort_unstable();
        assert_eq!(p, (0..20).collect::<Vec<_>>());
    }
}
