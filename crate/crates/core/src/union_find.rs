/// Disjoint sets over `0..n` where the representative of a class is
/// always its smallest member.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }

    /// Dense class ids: classes numbered by their smallest member, plus
    /// the smallest member of each class.
    pub fn classes(&mut self) -> (Vec<usize>, Vec<usize>) {
        let n = self.parent.len();
        let mut id = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for (x, slot) in id.iter_mut().enumerate() {
            if self.find(x) == x {
                *slot = reps.len();
                reps.push(x);
            }
        }
        let ids = (0..n).map(|x| id[self.find(x)]).collect();
        (ids, reps)
    }
}
