//! Hilbert bases of `{x ∈ ℕⁿ : A x = 0}` by the Contejean–Devie completion.
//!
//! Starting from the unit vectors, a non-solution `p` is only extended by
//! `e_j` when `⟨A p, A e_j⟩ < 0`, i.e. when the step moves `A p` towards the
//! origin. Candidates dominating an already found solution are discarded.
//! The procedure terminates and returns exactly the minimal solutions.

use std::collections::BTreeSet;

/// Minimal nonzero solutions of `A x = 0`, `x ∈ ℕⁿ`, where `a` lists the
/// rows of `A` (each of length `n`). Sorted by total degree, then lexicographically.
pub fn hilbert_basis(a: &[Vec<i64>], n: usize) -> Vec<Vec<u32>> {
    let cols: Vec<Vec<i64>> = (0..n).map(|j| a.iter().map(|row| row[j]).collect()).collect();
    let image = |x: &[u32]| -> Vec<i64> {
        let mut out = vec![0i64; a.len()];
        for (j, &c) in x.iter().enumerate() {
            if c > 0 {
                for (o, v) in out.iter_mut().zip(&cols[j]) {
                    *o += i64::from(c) * v;
                }
            }
        }
        out
    };
    let dot = |u: &[i64], v: &[i64]| -> i64 { u.iter().zip(v).map(|(x, y)| x * y).sum() };

    let mut basis: Vec<Vec<u32>> = Vec::new();
    let mut frontier: BTreeSet<Vec<u32>> = (0..n)
        .map(|j| {
            let mut e = vec![0; n];
            e[j] = 1;
            e
        })
        .collect();
    while !frontier.is_empty() {
        let mut pending = Vec::new();
        for p in frontier {
            let ap = image(&p);
            if ap.iter().all(|&v| v == 0) {
                basis.push(p);
            } else {
                pending.push((p, ap));
            }
        }
        let mut next = BTreeSet::new();
        for (p, ap) in pending {
            for j in 0..n {
                if dot(&ap, &cols[j]) >= 0 {
                    continue;
                }
                let mut q = p.clone();
                q[j] += 1;
                if !basis.iter().any(|b| dominates(&q, b)) {
                    next.insert(q);
                }
            }
        }
        frontier = next;
    }
    basis.sort_by(|x, y| (total(x), x).cmp(&(total(y), y)));
    basis
}

fn total(x: &[u32]) -> u64 {
    x.iter().map(|&v| u64::from(v)).sum()
}

/// `x ≥ y` componentwise.
pub fn dominates(x: &[u32], y: &[u32]) -> bool {
    x.iter().zip(y).all(|(a, b)| a >= b)
}

/// Whether `target` is a sum of (possibly repeated) elements of `gens`.
/// The zero vector is the empty sum.
pub fn is_n_combination(target: &[u32], gens: &[Vec<u32>]) -> bool {
    fn go(t: &mut Vec<u32>, gens: &[&Vec<u32>], from: usize) -> bool {
        if t.iter().all(|&v| v == 0) {
            return true;
        }
        for (i, g) in gens.iter().enumerate().skip(from) {
            if dominates(t, g) {
                for (x, y) in t.iter_mut().zip(g.iter()) {
                    *x -= y;
                }
                let ok = go(t, gens, i);
                for (x, y) in t.iter_mut().zip(g.iter()) {
                    *x += y;
                }
                if ok {
                    return true;
                }
            }
        }
        false
    }
    let nonzero: Vec<&Vec<u32>> = gens.iter().filter(|g| g.iter().any(|&v| v > 0)).collect();
    go(&mut target.to_vec(), &nonzero, 0)
}

/// No element is an ℕ-combination of the others.
pub fn is_minimal(basis: &[Vec<u32>]) -> bool {
    (0..basis.len()).all(|i| {
        let others: Vec<Vec<u32>> = basis
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, b)| b.clone())
            .collect();
        !is_n_combination(&basis[i], &others)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_equation() {
        // x + y = 2z: basis {(2,0,1), (1,1,1), (0,2,1)}
        let hb = hilbert_basis(&[vec![1, 1, -2]], 3);
        assert_eq!(hb, vec![vec![0, 2, 1], vec![1, 1, 1], vec![2, 0, 1]]);
    }

    #[test]
    fn unconstrained_variables_are_units() {
        let hb = hilbert_basis(&[vec![0, 0]], 2);
        assert_eq!(hb, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn no_solutions() {
        assert!(hilbert_basis(&[vec![1, 2]], 2).is_empty());
    }

    #[test]
    fn combination_checks() {
        let gens = vec![vec![1, 0], vec![0, 1]];
        assert!(is_n_combination(&[3, 2], &gens));
        assert!(!is_n_combination(&[1, 1], &[vec![2, 0], vec![1, 2]]));
        assert!(is_minimal(&[vec![2, 0, 1], vec![1, 1, 1], vec![0, 2, 1]]));
        assert!(!is_minimal(&[vec![1, 0], vec![0, 1], vec![1, 1]]));
    }

    #[test]
    fn three_x_equals_two_y() {
        // 3x = 2y has the single generator (2, 3)
        assert_eq!(hilbert_basis(&[vec![3, -2]], 2), vec![vec![2, 3]]);
    }
}
