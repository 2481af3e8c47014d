//! Global minimum cut of a dense nonnegative weight matrix (Stoer-Wagner).

/// A cut `(side, V \ side)` and its weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub value: f64,
    /// Sorted vertex indices on one side of the cut.
    pub side: Vec<usize>,
}

/// Minimum cut of the complete graph with symmetric weights `w`. Runs in
/// `O(V^3)`; ties are resolved toward lower vertex indices so the result is
/// deterministic. Returns `None` for fewer than two vertices.
pub fn stoer_wagner(w: &[Vec<f64>]) -> Option<Cut> {
    let n = w.len();
    if n < 2 {
        return None;
    }
    let mut w: Vec<Vec<f64>> = w.to_vec();
    let mut members: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut best: Option<Cut> = None;

    while alive.len() > 1 {
        let mut in_a = vec![false; n];
        let mut key = vec![0.0; n];
        let mut prev = alive[0];
        let mut last = alive[0];
        in_a[last] = true;
        for &v in &alive {
            key[v] = w[last][v];
        }
        for _ in 1..alive.len() {
            let mut next = usize::MAX;
            for &v in &alive {
                if !in_a[v] && (next == usize::MAX || key[v] > key[next]) {
                    next = v;
                }
            }
            in_a[next] = true;
            prev = last;
            last = next;
            for &v in &alive {
                if !in_a[v] {
                    key[v] += w[next][v];
                }
            }
        }

        let phase_value = key[last];
        if best.as_ref().is_none_or(|b| phase_value < b.value) {
            let mut side = members[last].clone();
            side.sort_unstable();
            best = Some(Cut { value: phase_value, side });
        }

        // Merge `last` into `prev`.
        let moved = std::mem::take(&mut members[last]);
        members[prev].extend(moved);
        for &v in &alive {
            if v != prev && v != last {
                let merged = w[prev][v] + w[last][v];
                w[prev][v] = merged;
                w[v][prev] = merged;
            }
        }
        alive.retain(|&v| v != last);
    }
    best
}

/// Connected components of the graph whose edges are pairs with weight above
/// `threshold`, each sorted, ordered by smallest member.
pub fn components(w: &[Vec<f64>], threshold: f64) -> Vec<Vec<usize>> {
    let n = w.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut comp = Vec::new();
        while let Some(u) = stack.pop() {
            comp.push(u);
            for v in 0..n {
                if !seen[v] && w[u][v] > threshold {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}
