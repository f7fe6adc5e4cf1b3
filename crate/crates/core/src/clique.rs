//! Exact maximum clique by branch and bound with a greedy-colouring bound.
//!
//! The graphs handled here are syllable-type commutation graphs with a few
//! dozen nodes at most, so an adjacency matrix is the natural representation.

/// Size of a maximum clique of the undirected graph given by `adj`.
///
/// `adj` must be a symmetric boolean matrix; the diagonal is ignored.
pub fn max_clique_size(adj: &[Vec<bool>]) -> usize {
    let n = adj.len();
    let mut order: Vec<usize> = (0..n).collect();
    // High-degree vertices first tends to find a large clique early.
    order.sort_by_key(|&v| std::cmp::Reverse(degree(adj, v)));
    let mut best = 0;
    expand(adj, 0, order, &mut best);
    best
}

fn degree(adj: &[Vec<bool>], v: usize) -> usize {
    adj[v].iter().enumerate().filter(|&(u, &e)| e && u != v).count()
}

fn expand(adj: &[Vec<bool>], size: usize, candidates: Vec<usize>, best: &mut usize) {
    if candidates.is_empty() {
        *best = (*best).max(size);
        return;
    }
    let (order, colours) = colour_sort(adj, &candidates);
    // Walk candidates from the highest colour down; colour count bounds the
    // clique size reachable from the remaining prefix.
    for idx in (0..order.len()).rev() {
        if size + colours[idx] <= *best {
            return;
        }
        let v = order[idx];
        let next: Vec<usize> = order[..idx].iter().copied().filter(|&u| adj[v][u]).collect();
        expand(adj, size + 1, next, best);
    }
}

/// Greedy sequential colouring. Returns the vertices sorted by colour and the
/// colour number (1-based) of each position.
fn colour_sort(adj: &[Vec<bool>], candidates: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in candidates {
        match classes.iter_mut().find(|class| class.iter().all(|&u| !adj[v][u])) {
            Some(class) => class.push(v),
            None => classes.push(vec![v]),
        }
    }
    let mut order = Vec::with_capacity(candidates.len());
    let mut colours = Vec::with_capacity(candidates.len());
    for (c, class) in classes.into_iter().enumerate() {
        for v in class {
            order.push(v);
            colours.push(c + 1);
        }
    }
    (order, colours)
}
