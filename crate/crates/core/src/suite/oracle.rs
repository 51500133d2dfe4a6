//! Brute-force references used by the experiments, written without the
//! library's comma and base-change code.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::corpus;
use crate::error::{Error, Result};
use crate::fibration::IndexedCategory;
use crate::fincat::{comma_category, Arr, FinCategory, FinFunctor, Obj, UnionFind};

/// An object with exactly one arrow to every object.
pub fn initial_object(c: &FinCategory) -> Option<Obj> {
    c.objects().find(|&x| c.objects().all(|y| c.hom(x, y).len() == 1))
}

/// Object count, arrow count and connected components of `(F / G)`, counted
/// directly from the hom-sets of the common target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommaCount {
    pub objects: usize,
    pub arrows: usize,
    /// Each component as a sorted list of `(a, b, u)` triples.
    pub components: BTreeSet<Vec<(Obj, Obj, Arr)>>,
}

pub fn comma_count(f: &FinFunctor, g: &FinFunctor) -> CommaCount {
    let (a, b, c) = (f.source(), g.source(), f.target());
    let mut triples = Vec::new();
    for x in a.objects() {
        for y in b.objects() {
            for &u in c.hom(f.obj(x), g.obj(y)) {
                triples.push((x, y, u));
            }
        }
    }
    let index = |t: (Obj, Obj, Arr)| triples.iter().position(|&s| s == t).unwrap();
    let mut uf = UnionFind::new(triples.len());
    let mut arrows = 0;
    for s in a.arrows() {
        for t in b.arrows() {
            for &u in c.hom(f.obj(a.src(s)), g.obj(b.src(t))) {
                let left = c.comp(g.arr(t), u);
                for &v in c.hom(f.obj(a.tgt(s)), g.obj(b.tgt(t))) {
                    if c.comp(v, f.arr(s)) == left {
                        arrows += 1;
                        uf.union(index((a.src(s), b.src(t), u)), index((a.tgt(s), b.tgt(t), v)));
                    }
                }
            }
        }
    }
    let components = uf
        .classes()
        .into_iter()
        .map(|cls| {
            let mut v: Vec<_> = cls.into_iter().map(|i| triples[i]).collect();
            v.sort();
            v
        })
        .collect();
    CommaCount {
        objects: triples.len(),
        arrows,
        components,
    }
}

/// The inverse image of `cix` along the right adjoint `F: C -> D`, computed
/// pointwise: the fiber over `d` is the fiber over an initial object `c0(d)`
/// of `(d / F)`, and `h: d -> d'` restricts along the unique `k: c0 d -> c0 d'`
/// with `F k . eta_d = eta_d' . h`.
#[derive(Clone, Debug)]
pub struct CommaColimit {
    pub indexed: IndexedCategory,
    /// `c0(d)` for each object of `D`.
    pub apex: Vec<Obj>,
}

/// `None` when some `(d / F)` has no initial object.
pub fn comma_colimit(cix: &IndexedCategory, f: &FinFunctor) -> Option<Result<CommaColimit>> {
    let (c, d) = (f.source(), f.target());
    let one = corpus::one();
    let mut apex = Vec::with_capacity(d.object_count());
    let mut eta = Vec::with_capacity(d.object_count());
    for x in d.objects() {
        let pick = FinFunctor::constant(&one, d, x);
        let comma = match comma_category(&pick, f) {
            Ok(k) => k,
            Err(e) => return Some(Err(e)),
        };
        let init = initial_object(&comma.category)?;
        let (_, c0, u) = comma.triples[init.0];
        apex.push(c0);
        eta.push(u);
    }
    let mut restrictions = Vec::with_capacity(d.arrow_count());
    for h in d.arrows() {
        let (x, y) = (d.src(h), d.tgt(h));
        let want = d.comp(eta[y.0], h);
        let ks: Vec<Arr> = c
            .hom(apex[x.0], apex[y.0])
            .iter()
            .copied()
            .filter(|&k| d.comp(f.arr(k), eta[x.0]) == want)
            .collect();
        if ks.len() != 1 {
            return Some(Err(Error::Mismatch(format!(
                "{} factorizations through the initial object",
                ks.len()
            ))));
        }
        restrictions.push(cix.restriction(ks[0]).clone());
    }
    let fibers: Vec<Arc<FinCategory>> = apex.iter().map(|&c0| cix.fiber(c0).clone()).collect();
    Some(IndexedCategory::new(d.clone(), fibers, restrictions).map(|indexed| CommaColimit { indexed, apex }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibration::galois_left_adjoint;

    fn chain(n: usize) -> Arc<FinCategory> {
        let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        Arc::new(FinCategory::poset(&names, |i, j| i <= j).unwrap())
    }

    #[test]
    fn comma_of_identities_is_the_arrow_category() {
        let c = chain(3);
        let id = FinFunctor::identity(&c);
        let n = comma_count(&id, &id);
        // objects: arrows of the chain; arrows: commuting squares
        assert_eq!(n.objects, 6);
        assert_eq!(n.components.len(), 1);
        let k = comma_category(&id, &id).unwrap();
        assert_eq!(k.category.object_count(), n.objects);
        assert_eq!(k.category.arrow_count(), n.arrows);
    }

    #[test]
    fn colimit_of_a_galois_connection() {
        // F: 3-chain -> 2-chain collapsing the top two
        let (c, d) = (chain(3), chain(2));
        let f = FinFunctor::new(
            c.clone(),
            d.clone(),
            vec![Obj(0), Obj(1), Obj(1)],
            c.arrows()
                .map(|a| {
                    let (x, y) = (c.src(a), c.tgt(a));
                    d.hom(Obj(x.0.min(1)), Obj(y.0.min(1)))[0]
                })
                .collect(),
        )
        .unwrap();
        let adj = galois_left_adjoint(&f).unwrap();
        let cix = IndexedCategory::representable(&c, Obj(2));
        let col = comma_colimit(&cix, &f).unwrap().unwrap();
        for x in d.objects() {
            assert_eq!(col.apex[x.0], adj.left().obj(x));
        }
        assert_eq!(col.indexed, cix.precompose(adj.left()).unwrap());
    }
}
