//! Ranked-pairs aggregation of ordered ballots into a ranking with ties.

use std::collections::{BTreeMap, BTreeSet};

/// Pairwise preference counts: `pref[(a, b)]` ballots rank a above b. A listed
/// candidate beats every candidate missing from the ballot.
pub fn pairwise_preferences(ballots: &[Vec<String>]) -> (Vec<String>, BTreeMap<(usize, usize), u64>) {
    let candidates: Vec<String> = ballots
        .iter()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: BTreeMap<&str, usize> = candidates.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let n = candidates.len();
    let mut pref = BTreeMap::new();
    for b in ballots {
        let mut pos = vec![usize::MAX; n];
        for (rank, c) in b.iter().enumerate() {
            let i = index[c.as_str()];
            pos[i] = pos[i].min(rank);
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && pos[i] < pos[j] {
                    *pref.entry((i, j)).or_insert(0) += 1;
                }
            }
        }
    }
    (candidates, pref)
}

fn reaches(adj: &[Vec<bool>], from: usize, to: usize) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![from];
    while let Some(x) = stack.pop() {
        if x == to {
            return true;
        }
        if std::mem::replace(&mut seen[x], true) {
            continue;
        }
        stack.extend((0..adj.len()).filter(|&y| adj[x][y] && !seen[y]));
    }
    false
}

/// Ranked pairs. Pairs are locked by descending margin; pairs sharing a margin
/// are considered together and any of them lying on a cycle with the locked
/// graph is dropped. Candidates that become sources together share a rank.
pub fn ranked_pairs(ballots: &[Vec<String>]) -> Vec<Vec<String>> {
    let (candidates, pref) = pairwise_preferences(ballots);
    let n = candidates.len();
    let get = |a: usize, b: usize| pref.get(&(a, b)).copied().unwrap_or(0);
    let mut pairs: Vec<(u64, usize, usize)> = vec![];
    for a in 0..n {
        for b in 0..n {
            if a != b && get(a, b) > get(b, a) {
                pairs.push((get(a, b) - get(b, a), a, b));
            }
        }
    }
    pairs.sort_by(|x, y| y.0.cmp(&x.0).then((x.1, x.2).cmp(&(y.1, y.2))));

    let mut locked = vec![vec![false; n]; n];
    let mut i = 0;
    while i < pairs.len() {
        let margin = pairs[i].0;
        let group: Vec<(usize, usize)> = pairs[i..]
            .iter()
            .take_while(|p| p.0 == margin)
            .map(|p| (p.1, p.2))
            .collect();
        i += group.len();
        let mut trial = locked.clone();
        for &(a, b) in &group {
            trial[a][b] = true;
        }
        let keep: Vec<(usize, usize)> = group.into_iter().filter(|&(a, b)| !reaches(&trial, b, a)).collect();
        for (a, b) in keep {
            locked[a][b] = true;
        }
    }

    let mut remaining: BTreeSet<usize> = (0..n).collect();
    let mut ranking = vec![];
    while !remaining.is_empty() {
        let sources: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&c| !remaining.iter().any(|&o| locked[o][c]))
            .collect();
        debug_assert!(!sources.is_empty(), "locked graph is acyclic");
        for s in &sources {
            remaining.remove(s);
        }
        ranking.push(sources.into_iter().map(|s| candidates[s].clone()).collect());
    }
    ranking
}
