use alloc::vec::Vec;

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(len: usize) -> Self {
        UnionFind { parent: (0..len as u32).collect(), size: alloc::vec![1; len] }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    #[inline]
    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let gp = self.parent[self.parent[x] as usize];
            self.parent[x] = gp;
            x = gp as usize;
        }
        x
    }

    /// Returns true when two distinct sets were merged.
    #[inline]
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            core::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a as u32;
        self.size[a] += self.size[b];
        true
    }

    /// Labels every element with a block id; blocks are numbered in order of
    /// their smallest member.
    pub fn labels(&mut self) -> Vec<u32> {
        let n = self.len();
        let mut root_label = alloc::vec![u32::MAX; n];
        let mut labels = alloc::vec![0u32; n];
        let mut next = 0;
        for x in 0..n {
            let r = self.find(x);
            if root_label[r] == u32::MAX {
                root_label[r] = next;
                next += 1;
            }
            labels[x] = root_label[r];
        }
        labels
    }
}

/// Renumbers a labelling so that the block containing `first` gets id 0 and
/// the remaining blocks are ordered by (size, smallest member).
pub fn canonical_relabel(labels: &[u32], first: usize) -> (Vec<u32>, usize) {
    let count = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
    let mut size = alloc::vec![0usize; count];
    let mut min = alloc::vec![usize::MAX; count];
    for (x, &l) in labels.iter().enumerate() {
        size[l as usize] += 1;
        min[l as usize] = min[l as usize].min(x);
    }
    let head = labels.get(first).map(|&l| l as usize);
    // labels need not be contiguous; unused ids are dropped
    let mut order: Vec<usize> = (0..count).filter(|&b| size[b] > 0 && Some(b) != head).collect();
    order.sort_by_key(|&b| (size[b], min[b]));
    if let Some(h) = head {
        order.insert(0, h);
    }
    let mut new_id = alloc::vec![0u32; count];
    for (i, &b) in order.iter().enumerate() {
        new_id[b] = i as u32;
    }
    (labels.iter().map(|&l| new_id[l as usize]).collect(), order.len())
}
