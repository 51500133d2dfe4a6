//! Local sieves: the set of arrows into an object along which some
//! condition holds. A condition holds "locally" when its sieve covers.

use std::collections::HashMap;

use crate::fincat::{Arr, FinCategory, Obj, UnionFind};
use crate::sieve::{generate_sieve, Sieve};

/// The sieve of arrows into `apex` satisfying `pred`. The predicate must be
/// stable under precomposition; the result is the generated sieve either way.
pub fn sieve_where(c: &FinCategory, apex: Obj, mut pred: impl FnMut(Arr) -> bool) -> Sieve {
    let family: Vec<Arr> = c.arrows_into(apex).iter().copied().filter(|&h| pred(h)).collect();
    let s = generate_sieve(c, apex, &family).expect("arrows into the apex");
    debug_assert_eq!(s.len(), family.len(), "predicate not stable under precomposition");
    s
}

/// Connected components of the comma category `(e / G)` for a diagram `G`
/// in `d` given by node images and edges `(i, j, G(k): G i -> G j)`.
/// Objects are pairs `(i, x: e -> G i)`; an edge joins `(i, x)` and
/// `(j, G(k) . x)`.
pub struct CommaComponents {
    index: HashMap<(usize, Arr), usize>,
    uf: UnionFind,
}

impl CommaComponents {
    pub fn new(d: &FinCategory, e: Obj, nodes: &[Obj], edges: &[(usize, usize, Arr)]) -> Self {
        let mut index = HashMap::new();
        for (i, &n) in nodes.iter().enumerate() {
            for &x in d.hom(e, n) {
                let k = index.len();
                index.insert((i, x), k);
            }
        }
        let mut uf = UnionFind::new(index.len());
        for &(i, j, a) in edges {
            for &x in d.hom(e, nodes[i]) {
                uf.union(index[&(i, x)], index[&(j, d.comp(a, x))]);
            }
        }
        CommaComponents { index, uf }
    }

    pub fn connected(&mut self, left: (usize, Arr), right: (usize, Arr)) -> bool {
        let (l, r) = (self.index[&left], self.index[&right]);
        self.uf.same(l, r)
    }

    pub fn object_count(&self) -> usize {
        self.index.len()
    }
}
