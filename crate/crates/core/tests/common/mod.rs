#![allow(dead_code)]

use ordmatch::{pattern_of_pair, OrderedMatching, PatternSet};

/// Largest clique by checking every subset of edges, largest first.
pub fn brute_force_clique(m: &OrderedMatching, set: &PatternSet) -> usize {
    let n = m.len();
    assert!(n <= 20, "brute force is for tiny instances");
    let ok: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i == j || set.contains(&pattern_of_pair(m.edge(i.min(j)), m.edge(i.max(j))).unwrap()))
                .collect()
        })
        .collect();
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if members.iter().enumerate().all(|(a, &i)| members[a + 1..].iter().all(|&j| ok[i][j])) {
            best = size;
        }
    }
    best
}
