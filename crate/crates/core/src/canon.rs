//! Canonical forms of small patterns.
//!
//! Colour refinement narrows the candidate orderings; every ordering
//! consistent with the refined colours is then tried and the lexicographically
//! smallest encoding wins. Refined colours are invariant under renaming, so the
//! result is a complete isomorphism invariant.

use std::collections::BTreeMap;

use crate::model::{Pattern, Structure};

pub type CanonicalForm = Vec<u32>;

pub fn canonical_form(p: &Pattern) -> CanonicalForm {
    let (var_colour, point_colour) = refine(p);
    let var_cells = cells(&(0..p.num_vars()).collect::<Vec<_>>(), &var_colour);
    let mut best: Option<CanonicalForm> = None;
    for_each_arrangement(&var_cells, &mut |var_order| {
        let mut point_cells = Vec::new();
        for &v in var_order {
            point_cells.extend(cells(p.domain(v), &point_colour));
        }
        for_each_arrangement(&point_cells, &mut |point_order| {
            let enc = encode(p, var_order, point_order);
            if best.as_ref().map_or(true, |b| enc < *b) {
                best = Some(enc);
            }
        });
    });
    best.unwrap_or_default()
}

fn encode(p: &Pattern, var_order: &[usize], point_order: &[usize]) -> CanonicalForm {
    let n = point_order.len();
    let mut pos = vec![0usize; n];
    for (i, &q) in point_order.iter().enumerate() {
        pos[q] = i;
    }
    let mut enc = Vec::with_capacity(2 + var_order.len() + n * n / 2);
    enc.push(var_order.len() as u32);
    enc.push(n as u32);
    enc.extend(var_order.iter().map(|&v| p.domain(v).len() as u32));
    for i in 0..n {
        for j in (i + 1)..n {
            enc.push(match p.label(point_order[i], point_order[j]) {
                None => 0,
                Some(false) => 1,
                Some(true) => 2,
            });
        }
    }
    let mut disj: Vec<Vec<(u32, u32)>> = p
        .distinct()
        .iter()
        .map(|d| {
            let mut d: Vec<(u32, u32)> = d
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (pos[a] as u32, pos[b] as u32);
                    (x.min(y), x.max(y))
                })
                .collect();
            d.sort_unstable();
            d.dedup();
            d
        })
        .collect();
    disj.sort_unstable();
    disj.dedup();
    enc.push(disj.len() as u32);
    for d in disj {
        enc.push(d.len() as u32);
        for (a, b) in d {
            enc.push(a);
            enc.push(b);
        }
    }
    enc
}

/// Joint colour refinement of variables and points.
fn refine(p: &Pattern) -> (Vec<usize>, Vec<usize>) {
    let (k, n) = (p.num_vars(), p.num_points());
    let mut cv = vec![0usize; k];
    let mut cp = vec![0usize; n];
    let mut classes = 0;
    loop {
        let var_sig: Vec<(usize, Vec<usize>)> = (0..k)
            .map(|v| {
                let mut s: Vec<usize> = p.domain(v).iter().map(|&q| cp[q]).collect();
                s.sort_unstable();
                (cv[v], s)
            })
            .collect();
        let point_sig: Vec<(usize, usize, Vec<(u8, usize)>, Vec<Vec<usize>>)> = (0..n)
            .map(|a| {
                let mut nb: Vec<(u8, usize)> = (0..n)
                    .filter_map(|b| p.label(a, b).map(|l| (l as u8, cp[b])))
                    .collect();
                nb.sort_unstable();
                let mut ds: Vec<Vec<usize>> = p
                    .distinct()
                    .iter()
                    .filter(|d| d.iter().any(|&(x, y)| x == a || y == a))
                    .map(|d| {
                        let mut c: Vec<usize> = d.iter().flat_map(|&(x, y)| [cp[x], cp[y]]).collect();
                        c.sort_unstable();
                        c
                    })
                    .collect();
                ds.sort_unstable();
                (cp[a], cv[p.var_of(a)], nb, ds)
            })
            .collect();
        cv = rank(&var_sig);
        cp = rank(&point_sig);
        let count = distinct_count(&cv) + distinct_count(&cp);
        if count == classes {
            return (cv, cp);
        }
        classes = count;
    }
}

fn rank<S: Ord + Clone>(sigs: &[S]) -> Vec<usize> {
    let ids: BTreeMap<S, usize> = {
        let mut sorted: Vec<S> = sigs.to_vec();
        sorted.sort();
        sorted.dedup();
        sorted.into_iter().enumerate().map(|(i, s)| (s, i)).collect()
    };
    sigs.iter().map(|s| ids[s]).collect()
}

fn distinct_count(c: &[usize]) -> usize {
    let mut v = c.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Groups `items` into runs of equal colour, ordered by colour.
fn cells(items: &[usize], colour: &[usize]) -> Vec<Vec<usize>> {
    let mut by: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &i in items {
        by.entry(colour[i]).or_default().push(i);
    }
    by.into_values().collect()
}

/// Calls `f` with every concatenation of permutations of the cells.
fn for_each_arrangement(cells: &[Vec<usize>], f: &mut dyn FnMut(&[usize])) {
    fn go(cells: &[Vec<usize>], ci: usize, prefix: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if ci == cells.len() {
            f(prefix);
            return;
        }
        let mut cell = cells[ci].clone();
        permute(&mut cell, 0, &mut |perm| {
            let len = prefix.len();
            prefix.extend_from_slice(perm);
            go(cells, ci + 1, prefix, f);
            prefix.truncate(len);
        });
    }
    go(cells, 0, &mut Vec::new(), f);
}

fn permute(items: &mut [usize], k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renaming_does_not_change_form() {
        let a = Pattern::builder()
            .point("a", "v")
            .point("b", "v")
            .point("c", "w")
            .incompat("a", "c")
            .compat("b", "c")
            .build()
            .unwrap();
        let b = Pattern::builder()
            .point("z", "q")
            .point("x", "p")
            .point("y", "p")
            .compat("x", "z")
            .incompat("y", "z")
            .build()
            .unwrap();
        assert_eq!(canonical_form(&a), canonical_form(&b));
    }

    #[test]
    fn labels_matter() {
        let a = Pattern::builder()
            .point("a", "v")
            .point("c", "w")
            .incompat("a", "c")
            .build()
            .unwrap();
        let b = Pattern::builder()
            .point("a", "v")
            .point("c", "w")
            .compat("a", "c")
            .build()
            .unwrap();
        assert_ne!(canonical_form(&a), canonical_form(&b));
    }

    #[test]
    fn distinctness_matters() {
        let base = || {
            Pattern::builder()
                .point("a", "v")
                .point("b", "v")
                .point("c", "w")
                .compat("a", "c")
                .compat("b", "c")
        };
        let plain = base().build().unwrap();
        let marked = base().distinct_any([("a", "b")]).build().unwrap();
        assert_ne!(canonical_form(&plain), canonical_form(&marked));
    }
}
