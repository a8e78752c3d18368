//! Thread-parallel orbit enumeration and batch verification. Results never
//! depend on the worker count.

use std::thread;

use schemeforge_core::permgroup::{check_orbital_input, orbitals_from_partition, union_generator, PermError, PermutationGroup};
use schemeforge_core::scheme::AssociationScheme;
use schemeforge_core::unionfind::UnionFind;

/// Orbitals of `g` on `[0, n)` with the row range split over `threads`
/// workers. Each worker builds a partial partition; merging them gives the
/// same pair partition as the serial sweep, and the canonical relabelling
/// makes the class numbering identical.
pub fn orbitals_parallel(g: &PermutationGroup, n: usize, cap: usize, threads: usize) -> Result<AssociationScheme, PermError> {
    check_orbital_input(g, n, cap)?;
    let threads = threads.clamp(1, n.max(1));
    let chunk = n.div_ceil(threads);
    let mut parts: Vec<UnionFind> = thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let rows = (t * chunk).min(n)..((t + 1) * chunk).min(n);
                s.spawn(move || {
                    let mut uf = UnionFind::new(n * n);
                    for gen in g.generators() {
                        union_generator(&mut uf, gen, n, rows.clone());
                    }
                    uf
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("orbital worker panicked")).collect()
    });
    let mut merged = parts.pop().expect("at least one worker");
    for mut uf in parts {
        for i in 0..n * n {
            let r = uf.find(i);
            if r != i {
                merged.union(i, r);
            }
        }
    }
    orbitals_from_partition(n, &mut merged)
}

/// Applies `f` to every item on up to `threads` workers, keeping input
/// order in the output.
pub fn map_ordered<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = threads.clamp(1, items.len().max(1));
    let chunk = items.len().div_ceil(threads).max(1);
    let f = &f;
    thread::scope(|s| {
        let handles: Vec<_> =
            items.chunks(chunk).map(|c| s.spawn(move || c.iter().map(f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use schemeforge_core::permgroup::linear::{psl2, LinearAction};
    use schemeforge_core::permgroup::{orbitals, symmetric_group};

    #[test]
    fn thread_count_does_not_matter() {
        let g = psl2(5, LinearAction::ProjectiveLine).unwrap();
        let serial = orbitals(&g, 6, 1 << 20).unwrap();
        for t in [1, 2, 3, 7] {
            let par = orbitals_parallel(&g, 6, 1 << 20, t).unwrap();
            assert_eq!(par.matrix(), serial.matrix());
        }
        let s4 = symmetric_group(4).unwrap();
        let g = PermutationGroup::from_generators(s4.generators().to_vec()).unwrap();
        assert_eq!(orbitals_parallel(&g, 4, 1 << 20, 3).unwrap().matrix(), orbitals(&g, 4, 1 << 20).unwrap().matrix());
    }

    #[test]
    fn ordered_map() {
        let v: Vec<u32> = (0..23).collect();
        for t in 1..6 {
            assert_eq!(map_ordered(&v, t, |x| x * x), v.iter().map(|x| x * x).collect::<Vec<_>>());
        }
    }
}
