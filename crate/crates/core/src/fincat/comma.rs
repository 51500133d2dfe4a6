use std::collections::HashMap;
use std::sync::Arc;

use super::category::{Arr, ArrowInfo, Caps, FinCategory, Obj};
use super::functor::{same_category, FinFunctor, NatTransform};
use crate::error::{Error, Result};

/// The comma category `(F / G)` with its two projections.
#[derive(Clone, Debug)]
pub struct CommaCategory {
    pub category: Arc<FinCategory>,
    pub left_projection: FinFunctor,
    pub right_projection: FinFunctor,
    /// `(d, d', u : F d -> G d')` for each object, in object order.
    pub triples: Vec<(Obj, Obj, Arr)>,
}

impl CommaCategory {
    pub fn object_of(&self, triple: (Obj, Obj, Arr)) -> Option<Obj> {
        self.triples.iter().position(|&t| t == triple).map(Obj)
    }
}

/// Builds `(F / G)` for `F: A -> C` and `G: B -> C`.
///
/// Objects are the triples `(a, b, u: F a -> G b)` in lexicographic index
/// order; arrows `(a, b, u) -> (a', b', u')` are the pairs `(s, t)` with
/// `u' . F s = G t . u`.
pub fn comma_category(f: &FinFunctor, g: &FinFunctor) -> Result<CommaCategory> {
    comma_category_with_caps(f, g, Caps::default())
}

pub fn comma_category_with_caps(f: &FinFunctor, g: &FinFunctor, caps: Caps) -> Result<CommaCategory> {
    if !same_category(f.target(), g.target()) {
        return Err(Error::Mismatch("comma category needs a common target".into()));
    }
    let (a, b, c) = (f.source(), g.source(), f.target());
    let mut triples = Vec::new();
    for x in a.objects() {
        for y in b.objects() {
            for &u in c.hom(f.obj(x), g.obj(y)) {
                triples.push((x, y, u));
            }
        }
    }
    let names: Vec<String> = triples
        .iter()
        .map(|&(x, y, u)| format!("({},{},{})", a.object_name(x), b.object_name(y), c.arrow_name(u)))
        .collect();
    let mut arrows = Vec::new();
    let mut parts = Vec::new();
    for (i, &(x, y, u)) in triples.iter().enumerate() {
        for (j, &(x2, y2, u2)) in triples.iter().enumerate() {
            for &s in a.hom(x, x2) {
                for &t in b.hom(y, y2) {
                    if c.comp(u2, f.arr(s)) == c.comp(g.arr(t), u) {
                        arrows.push(ArrowInfo {
                            name: format!("[{};{},{};{}]", names[i], a.arrow_name(s), b.arrow_name(t), names[j]),
                            src: Obj(i),
                            tgt: Obj(j),
                        });
                        parts.push((s, t));
                    }
                }
            }
        }
    }
    // several targets can share a source and (s, t)
    let mut by_key: HashMap<(usize, usize, Arr, Arr), Arr> = HashMap::new();
    for (k, info) in arrows.iter().enumerate() {
        let (s, t) = parts[k];
        by_key.insert((info.src.0, info.tgt.0, s, t), Arr(k));
    }
    let identities: Vec<Arr> = triples
        .iter()
        .enumerate()
        .map(|(i, &(x, y, _))| by_key[&(i, i, a.identity(x), b.identity(y))])
        .collect();
    let category = Arc::new(FinCategory::generate(
        caps,
        names,
        arrows.clone(),
        identities,
        |g2, f2| {
            let (s1, t1) = parts[f2.0];
            let (s2, t2) = parts[g2.0];
            by_key[&(arrows[f2.0].src.0, arrows[g2.0].tgt.0, a.comp(s2, s1), b.comp(t2, t1))]
        },
    )?);
    let left_projection = FinFunctor::new_unchecked(
        category.clone(),
        a.clone(),
        triples.iter().map(|t| t.0).collect(),
        parts.iter().map(|p| p.0).collect(),
    );
    let right_projection = FinFunctor::new_unchecked(
        category.clone(),
        b.clone(),
        triples.iter().map(|t| t.1).collect(),
        parts.iter().map(|p| p.1).collect(),
    );
    Ok(CommaCategory {
        category,
        left_projection,
        right_projection,
        triples,
    })
}

/// Partition of the objects into connected components of the underlying
/// undirected graph. Components are listed by their smallest object and
/// each is sorted.
pub fn connected_components(c: &FinCategory) -> Vec<Vec<Obj>> {
    let mut uf = UnionFind::new(c.object_count());
    for a in c.arrows() {
        uf.union(c.src(a).0, c.tgt(a).0);
    }
    uf.classes().into_iter().map(|cl| cl.into_iter().map(Obj).collect()).collect()
}

/// Plain union-find over `0..n`.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx != ry {
            let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
            self.parent[hi] = lo;
        }
    }

    pub fn same(&mut self, x: usize, y: usize) -> bool {
        self.find(x) == self.find(y)
    }

    pub fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for x in 0..n {
            let r = self.find(x);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(x);
        }
        out
    }
}

/// Outcome of [`is_equivalence`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivalenceWitness {
    /// For every target object `y`: a source object `x` and an iso `F x -> y`.
    Equivalence(Vec<(Obj, Arr)>),
    NotFaithful { first: Arr, second: Arr },
    NotFull { from: Obj, to: Obj, missing: Arr },
    NotEssentiallySurjective { object: Obj },
}

impl EquivalenceWitness {
    pub fn holds(&self) -> bool {
        matches!(self, EquivalenceWitness::Equivalence(_))
    }
}

/// Decides whether `F` is full, faithful and essentially surjective by
/// comparing every hom-set and searching isomorphisms explicitly.
pub fn is_equivalence(f: &FinFunctor) -> EquivalenceWitness {
    let (c, d) = (f.source(), f.target());
    for x in c.objects() {
        for y in c.objects() {
            let hom = c.hom(x, y);
            let mut seen: HashMap<Arr, Arr> = HashMap::new();
            for &a in hom {
                if let Some(&b) = seen.get(&f.arr(a)) {
                    return EquivalenceWitness::NotFaithful { first: b, second: a };
                }
                seen.insert(f.arr(a), a);
            }
            for &t in d.hom(f.obj(x), f.obj(y)) {
                if !seen.contains_key(&t) {
                    return EquivalenceWitness::NotFull {
                        from: x,
                        to: y,
                        missing: t,
                    };
                }
            }
        }
    }
    let mut witness = Vec::with_capacity(d.object_count());
    for y in d.objects() {
        match c.objects().find_map(|x| d.find_iso(f.obj(x), y).map(|iso| (x, iso))) {
            Some(w) => witness.push(w),
            None => return EquivalenceWitness::NotEssentiallySurjective { object: y },
        }
    }
    EquivalenceWitness::Equivalence(witness)
}

/// Searches a natural isomorphism `F => G` by backtracking over iso
/// components, object by object, checking naturality squares as soon as
/// both endpoints are fixed.
pub fn find_natural_iso(f: &FinFunctor, g: &FinFunctor) -> Option<NatTransform> {
    if !same_category(f.source(), g.source()) || !same_category(f.target(), g.target()) {
        return None;
    }
    let (c, d) = (f.source().clone(), f.target().clone());
    let n = c.object_count();
    let candidates: Vec<Vec<Arr>> = c
        .objects()
        .map(|x| {
            d.hom(f.obj(x), g.obj(x))
                .iter()
                .copied()
                .filter(|&a| d.is_iso(a))
                .collect()
        })
        .collect();
    let mut chosen: Vec<Option<Arr>> = vec![None; n];
    fn consistent(c: &FinCategory, d: &FinCategory, f: &FinFunctor, g: &FinFunctor, chosen: &[Option<Arr>], x: Obj) -> bool {
        let check = |a: Arr| {
            let (s, t) = (c.src(a), c.tgt(a));
            match (chosen[s.0], chosen[t.0]) {
                (Some(ps), Some(pt)) => d.comp(g.arr(a), ps) == d.comp(pt, f.arr(a)),
                _ => true,
            }
        };
        c.arrows_from(x).iter().all(|&a| check(a)) && c.arrows_into(x).iter().all(|&a| check(a))
    }
    fn go(i: usize, c: &FinCategory, d: &FinCategory, f: &FinFunctor, g: &FinFunctor, cands: &[Vec<Arr>], chosen: &mut Vec<Option<Arr>>) -> bool {
        if i == chosen.len() {
            return true;
        }
        for &a in &cands[i] {
            chosen[i] = Some(a);
            if consistent(c, d, f, g, chosen, Obj(i)) && go(i + 1, c, d, f, g, cands, chosen) {
                return true;
            }
        }
        chosen[i] = None;
        false
    }
    if go(0, &c, &d, f, g, &candidates, &mut chosen) {
        let comps = chosen.into_iter().map(|a| a.unwrap()).collect();
        NatTransform::new(f.clone(), g.clone(), comps).ok()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn parallel_arrows_with_the_same_legs() {
        // u |-> e: from (a, *, e) the pair (u, id) reaches both (b, *, 1) and (b, *, e)
        let (w, m) = (corpus::walk2(), corpus::idempotent());
        let e = m.arrow_named("e").unwrap();
        let arrs = w.arrows().map(|a| if w.is_identity(a) { m.identity(Obj(0)) } else { e }).collect();
        let f = FinFunctor::new(w.clone(), m.clone(), vec![Obj(0), Obj(0)], arrs).unwrap();
        let g = FinFunctor::identity(&m);
        let k = comma_category(&f, &g).unwrap();
        assert_eq!(k.category.object_count(), 4);
        let from = k.object_of((Obj(0), Obj(0), e)).unwrap();
        let u = w.arrow_named("u").unwrap();
        let out = k
            .category
            .arrows_from(from)
            .iter()
            .filter(|&&x| k.left_projection.arr(x) == u && m.is_identity(k.right_projection.arr(x)));
        assert_eq!(out.count(), 2);
    }

    /// Independent enumeration of comma objects: every (x, y, u) with the
    /// right endpoints, computed straight from hom-sets.
    fn brute_triples(f: &FinFunctor, g: &FinFunctor) -> usize {
        let c = f.target();
        let mut n = 0;
        for x in f.source().objects() {
            for y in g.source().objects() {
                for u in c.arrows() {
                    if c.src(u) == f.obj(x) && c.tgt(u) == g.obj(y) {
                        n += 1;
                    }
                }
            }
        }
        n
    }

    #[test]
    fn comma_of_identities_on_one_is_one() {
        let one = corpus::one();
        let id = FinFunctor::identity(&one);
        let k = comma_category(&id, &id).unwrap();
        assert_eq!(k.category.object_count(), 1);
        assert_eq!(k.category.arrow_count(), 1);
    }

    #[test]
    fn comma_under_b_is_one() {
        let w = corpus::walk2();
        let pick_b = corpus::pick(&w, "b");
        let k = comma_category(&pick_b, &FinFunctor::identity(&w)).unwrap();
        assert_eq!(k.category.object_count(), brute_triples(&pick_b, &FinFunctor::identity(&w)));
        assert_eq!(k.category.object_count(), 1);
        assert_eq!(k.category.arrow_count(), 1);
    }

    #[test]
    fn comma_over_b_is_walk2_shaped() {
        let w = corpus::walk2();
        let id = FinFunctor::identity(&w);
        let pick_b = corpus::pick(&w, "b");
        let k = comma_category(&id, &pick_b).unwrap();
        // objects: u : a -> b and id_b
        assert_eq!(k.category.object_count(), 2);
        assert_eq!(k.category.arrow_count(), 3);
        let names: Vec<&str> = k.category.objects().map(|o| k.category.object_name(o)).collect();
        assert_eq!(names, vec!["(a,*,u)", "(b,*,id_b)"]);
        assert!(k.category.is_poset());
    }

    #[test]
    fn arrow_category_is_comma_of_identities() {
        let w = corpus::walk2();
        let id = FinFunctor::identity(&w);
        let k = comma_category(&id, &id).unwrap();
        // one object per arrow of Walk2
        assert_eq!(k.category.object_count(), w.arrow_count());
        // projections are domain and codomain
        for (i, &(x, y, u)) in k.triples.iter().enumerate() {
            assert_eq!(w.src(u), x);
            assert_eq!(w.tgt(u), y);
            assert_eq!(k.left_projection.obj(Obj(i)), x);
            assert_eq!(k.right_projection.obj(Obj(i)), y);
        }
    }

    #[test]
    fn components_of_small_categories() {
        assert_eq!(connected_components(&corpus::one()).len(), 1);
        assert_eq!(connected_components(&corpus::walk2()).len(), 1);
        let two = FinCategory::discrete(&["p", "q"]).unwrap();
        assert_eq!(connected_components(&two).len(), 2);
    }

    #[test]
    fn equivalence_checks() {
        let w = corpus::walk2();
        assert!(is_equivalence(&FinFunctor::identity(&w)).holds());
        let bang = corpus::bang(&w);
        assert!(!is_equivalence(&bang).holds());

        // skeleton inclusion: One into the chaotic category on two objects
        let chaotic = corpus::iso_pair();
        let one = corpus::one();
        let inc = FinFunctor::new(one, chaotic.clone(), vec![Obj(0)], vec![chaotic.identity(Obj(0))]).unwrap();
        assert!(is_equivalence(&inc).holds());
    }

    #[test]
    fn natural_iso_search() {
        let chaotic = corpus::iso_pair();
        let id = FinFunctor::identity(&chaotic);
        // swap functor x <-> y is naturally isomorphic to the identity
        let x = chaotic.object_named("x").unwrap();
        let y = chaotic.object_named("y").unwrap();
        let objs = vec![y, x];
        let arrs: Vec<Arr> = chaotic
            .arrows()
            .map(|a| {
                let (s, t) = (chaotic.src(a), chaotic.tgt(a));
                let (s2, t2) = (objs[s.0], objs[t.0]);
                chaotic.hom(s2, t2)[0]
            })
            .collect();
        let swap = FinFunctor::new(chaotic.clone(), chaotic.clone(), objs, arrs).unwrap();
        let iso = find_natural_iso(&id, &swap).unwrap();
        assert!(iso.is_iso());
        let w = corpus::walk2();
        let pick_a = FinFunctor::constant(&w, &w, w.object_named("a").unwrap());
        assert!(find_natural_iso(&FinFunctor::identity(&w), &pick_a).is_none());
    }
}
