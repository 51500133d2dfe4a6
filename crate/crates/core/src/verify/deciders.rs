use std::collections::HashMap;

use super::local::{sieve_where, CommaComponents};
use super::{Condition, SiteFunctor, Verdict, Witness};
use crate::fincat::{Arr, Obj};
use crate::sieve::{image_sieve, sieve_lattice, Sieve};

/// A named decider over site functors.
pub trait Decider: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn decide(&self, s: &SiteFunctor) -> Verdict;
}

macro_rules! decider {
    ($ty:ident, $name:literal, $summary:literal, $f:path) => {
        struct $ty;
        impl Decider for $ty {
            fn name(&self) -> &'static str {
                $name
            }
            fn summary(&self) -> &'static str {
                $summary
            }
            fn decide(&self, s: &SiteFunctor) -> Verdict {
                $f(s)
            }
        }
    };
}

decider!(Comorphism, "comorphism", "covers on images are reached by covers upstairs", is_comorphism);
decider!(Cover, "cover", "images of covers generate covers", is_cover_preserving);
decider!(Continuous, "continuous", "cover-preserving and cofinal on every cover", is_continuous);
decider!(Flat, "flat", "locally filtered with respect to the target topology", is_covering_flat);
decider!(SiteMorphism, "site-morphism", "cover-preserving and covering-flat", is_morphism_of_sites);
decider!(Dense, "dense", "dense morphism of sites", is_dense_morphism);

/// Every registered decider, in a fixed order.
pub fn deciders() -> Vec<Box<dyn Decider>> {
    vec![
        Box::new(Comorphism),
        Box::new(Cover),
        Box::new(Continuous),
        Box::new(Flat),
        Box::new(SiteMorphism),
        Box::new(Dense),
    ]
}

pub fn decider(name: &str) -> Option<Box<dyn Decider>> {
    deciders().into_iter().find(|d| d.name() == name)
}

pub fn decider_names() -> Vec<&'static str> {
    deciders().iter().map(|d| d.name()).collect()
}

pub fn is_cover_preserving(s: &SiteFunctor) -> Verdict {
    let src = s.functor.source();
    let mut checked = 0;
    for c in src.objects() {
        let cover = s.source.minimal_cover(c);
        let img = image_sieve(&s.functor, cover);
        checked += 1;
        if !s.target.covers(&img) {
            let w = Witness::new(Condition::CoverPreserving, c, img).with_cover(cover.clone());
            return Verdict::fail("cover", checked, w);
        }
    }
    Verdict::pass("cover", checked)
}

/// For each `d` and each target cover `S` on `F d` some source cover maps
/// into `S`. The least source cover is the only candidate worth trying and
/// the least target cover is the hardest `S`, so one inclusion per object
/// decides it.
pub fn is_comorphism(s: &SiteFunctor) -> Verdict {
    let src = s.functor.source();
    let mut checked = 0;
    for d in src.objects() {
        let img = image_sieve(&s.functor, s.source.minimal_cover(d));
        let cover = s.target.minimal_cover(s.functor.obj(d));
        checked += 1;
        if !img.is_subset(cover) {
            let w = Witness::new(Condition::Comorphism, d, img).with_cover(cover.clone());
            return Verdict::fail("comorphism", checked, w);
        }
    }
    Verdict::pass("comorphism", checked)
}

/// The diagram `A . pi_S` as nodes and edges in the target.
fn elements_diagram(s: &SiteFunctor, cover: &Sieve) -> (Vec<Arr>, Vec<Obj>, Vec<(usize, usize, Arr)>) {
    let (c, a) = (s.functor.source(), &s.functor);
    let members = cover.arrows();
    let nodes = members.iter().map(|&m| a.obj(c.src(m))).collect();
    let mut edges = Vec::new();
    for (i, &si) in members.iter().enumerate() {
        for (j, &sj) in members.iter().enumerate() {
            for &k in c.hom(c.src(si), c.src(sj)) {
                if c.comp(sj, k) == si {
                    edges.push((i, j, a.arr(k)));
                }
            }
        }
    }
    (members, nodes, edges)
}

struct Cofinality<'a> {
    s: &'a SiteFunctor,
    nodes: Vec<Obj>,
    edges: Vec<(usize, usize, Arr)>,
    members: Vec<Arr>,
    comps: HashMap<Obj, CommaComponents>,
}

impl<'a> Cofinality<'a> {
    fn new(s: &'a SiteFunctor, cover: &Sieve) -> Self {
        let (members, nodes, edges) = elements_diagram(s, cover);
        Cofinality {
            s,
            nodes,
            edges,
            members,
            comps: HashMap::new(),
        }
    }

    /// Arrows `h: e -> d` after which `(f, a)` and `(g, b)` become connected.
    fn sieve(&mut self, f: Arr, g: Arr, d: Obj, a: Arr, b: Arr) -> Sieve {
        let t = self.s.functor.target().clone();
        let i = self.members.iter().position(|&m| m == f).unwrap();
        let j = self.members.iter().position(|&m| m == g).unwrap();
        let (nodes, edges, comps) = (&self.nodes, &self.edges, &mut self.comps);
        sieve_where(&t, d, |h| {
            let e = t.src(h);
            let cc = comps.entry(e).or_insert_with(|| CommaComponents::new(&t, e, nodes, edges));
            cc.connected((i, t.comp(a, h)), (j, t.comp(b, h)))
        })
    }
}

pub fn is_continuous(s: &SiteFunctor) -> Verdict {
    let cp = is_cover_preserving(s);
    if !cp.holds {
        return Verdict { decider: "continuous", ..cp };
    }
    let (c, t, a) = (s.functor.source(), s.functor.target(), &s.functor);
    let mut checked = cp.checked;
    for x in c.objects() {
        for cover in s.source.covering_sieves(x) {
            let mut cof = Cofinality::new(s, &cover);
            let members = cof.members.clone();
            for (i, &f) in members.iter().enumerate() {
                for &g in &members[i..] {
                    let (af, ag) = (a.arr(f), a.arr(g));
                    for d in t.objects() {
                        for &l in t.hom(d, t.src(af)) {
                            for &r in t.hom(d, t.src(ag)) {
                                if t.comp(af, l) != t.comp(ag, r) {
                                    continue;
                                }
                                checked += 1;
                                let sieve = cof.sieve(f, g, d, l, r);
                                if !s.target.covers(&sieve) {
                                    let w = Witness::new(Condition::Cofinality, d, sieve)
                                        .with_cover(cover.clone())
                                        .with_arrows(vec![f, g, l, r]);
                                    return Verdict::fail("continuous", checked, w);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Verdict::pass("continuous", checked)
}

fn flat_nonempty(s: &SiteFunctor, d: Obj) -> Sieve {
    let (c, t, f) = (s.functor.source(), s.functor.target(), &s.functor);
    sieve_where(t, d, |h| c.objects().any(|x| !t.hom(t.src(h), f.obj(x)).is_empty()))
}

fn flat_span(s: &SiteFunctor, d: Obj, c1: Obj, c2: Obj, a: Arr, b: Arr) -> Sieve {
    let (c, t, f) = (s.functor.source(), s.functor.target(), &s.functor);
    sieve_where(t, d, |h| {
        let (e, ah, bh) = (t.src(h), t.comp(a, h), t.comp(b, h));
        c.objects().any(|x| {
            t.hom(e, f.obj(x)).iter().any(|&k| {
                c.hom(x, c1).iter().any(|&u1| t.comp(f.arr(u1), k) == ah)
                    && c.hom(x, c2).iter().any(|&u2| t.comp(f.arr(u2), k) == bh)
            })
        })
    })
}

fn flat_equalizer(s: &SiteFunctor, d: Obj, u: Arr, v: Arr, a: Arr) -> Sieve {
    let (c, t, f) = (s.functor.source(), s.functor.target(), &s.functor);
    let c1 = c.src(u);
    sieve_where(t, d, |h| {
        let (e, ah) = (t.src(h), t.comp(a, h));
        c.objects().any(|x| {
            c.hom(x, c1).iter().any(|&w| {
                c.comp(u, w) == c.comp(v, w) && t.hom(e, f.obj(x)).iter().any(|&k| t.comp(f.arr(w), k) == ah)
            })
        })
    })
}

pub fn is_covering_flat(s: &SiteFunctor) -> Verdict {
    let (c, t, f) = (s.functor.source(), s.functor.target(), &s.functor);
    let mut checked = 0;
    for d in t.objects() {
        checked += 1;
        let sieve = flat_nonempty(s, d);
        if !s.target.covers(&sieve) {
            return Verdict::fail("flat", checked, Witness::new(Condition::FlatNonempty, d, sieve));
        }
    }
    for d in t.objects() {
        for c1 in c.objects() {
            for c2 in c.objects().filter(|&c2| c2 >= c1) {
                for &a in t.hom(d, f.obj(c1)) {
                    for &b in t.hom(d, f.obj(c2)) {
                        checked += 1;
                        let sieve = flat_span(s, d, c1, c2, a, b);
                        if !s.target.covers(&sieve) {
                            let w = Witness::new(Condition::FlatSpan, d, sieve)
                                .with_objects(vec![c1, c2])
                                .with_arrows(vec![a, b]);
                            return Verdict::fail("flat", checked, w);
                        }
                    }
                }
            }
        }
    }
    for u in c.arrows() {
        for v in c.arrows().filter(|&v| v > u && c.src(v) == c.src(u) && c.tgt(v) == c.tgt(u)) {
            let (fu, fv) = (f.arr(u), f.arr(v));
            for d in t.objects() {
                for &a in t.hom(d, f.obj(c.src(u))) {
                    if t.comp(fu, a) != t.comp(fv, a) {
                        continue;
                    }
                    checked += 1;
                    let sieve = flat_equalizer(s, d, u, v, a);
                    if !s.target.covers(&sieve) {
                        let w = Witness::new(Condition::FlatEqualizer, d, sieve).with_arrows(vec![u, v, a]);
                        return Verdict::fail("flat", checked, w);
                    }
                }
            }
        }
    }
    Verdict::pass("flat", checked)
}

pub fn is_morphism_of_sites(s: &SiteFunctor) -> Verdict {
    let cp = is_cover_preserving(s);
    if !cp.holds {
        return Verdict { decider: "site-morphism", ..cp };
    }
    Verdict::and("site-morphism", &[cp, is_covering_flat(s)])
}

fn dense_covering(s: &SiteFunctor, x: Obj) -> Sieve {
    let (c, t, f) = (s.functor.source(), s.functor.target(), &s.functor);
    sieve_where(t, x, |h| {
        let e = t.src(h);
        c.objects().any(|y| {
            t.hom(f.obj(y), x)
                .iter()
                .any(|&k| t.hom(e, f.obj(y)).iter().any(|&m| t.comp(k, m) == h))
        })
    })
}

fn local_fullness(s: &SiteFunctor, c1: Obj, c2: Obj, g: Arr) -> Sieve {
    let (c, t, f) = (s.functor.source(), s.functor.target(), &s.functor);
    sieve_where(c, c1, |k| {
        let target = t.comp(g, f.arr(k));
        c.hom(c.src(k), c2).iter().any(|&h| f.arr(h) == target)
    })
}

fn local_faithfulness(s: &SiteFunctor, u: Arr, v: Arr) -> Sieve {
    let c = s.functor.source();
    sieve_where(c, c.src(u), |k| c.comp(u, k) == c.comp(v, k))
}

pub fn is_dense_morphism(s: &SiteFunctor) -> Verdict {
    let ms = is_morphism_of_sites(s);
    if !ms.holds {
        return Verdict { decider: "dense", ..ms };
    }
    let (c, t, f) = (s.functor.source(), s.functor.target(), &s.functor);
    let mut checked = ms.checked;
    for x in c.objects() {
        for sieve in sieve_lattice(c, x) {
            checked += 1;
            if !s.source.covers(&sieve) && s.target.covers(&image_sieve(f, &sieve)) {
                return Verdict::fail("dense", checked, Witness::new(Condition::CoverReflection, x, sieve));
            }
        }
    }
    for x in t.objects() {
        checked += 1;
        let sieve = dense_covering(s, x);
        if !s.target.covers(&sieve) {
            return Verdict::fail("dense", checked, Witness::new(Condition::DenseCovering, x, sieve));
        }
    }
    for c1 in c.objects() {
        for c2 in c.objects() {
            for &g in t.hom(f.obj(c1), f.obj(c2)) {
                checked += 1;
                let sieve = local_fullness(s, c1, c2, g);
                if !s.source.covers(&sieve) {
                    let w = Witness::new(Condition::LocalFullness, c1, sieve)
                        .with_objects(vec![c2])
                        .with_arrows(vec![g]);
                    return Verdict::fail("dense", checked, w);
                }
            }
        }
    }
    for u in c.arrows() {
        for v in c.arrows().filter(|&v| v != u && c.src(v) == c.src(u) && c.tgt(v) == c.tgt(u)) {
            if f.arr(u) != f.arr(v) {
                continue;
            }
            checked += 1;
            let sieve = local_faithfulness(s, u, v);
            if !s.source.covers(&sieve) {
                let w = Witness::new(Condition::LocalFaithfulness, c.src(u), sieve).with_arrows(vec![u, v]);
                return Verdict::fail("dense", checked, w);
            }
        }
    }
    Verdict::pass("dense", checked)
}

/// Recomputes the condition a witness refers to. True when it still fails
/// with the recorded sieve.
pub fn replay(s: &SiteFunctor, w: &Witness) -> bool {
    let f = &s.functor;
    match w.condition {
        Condition::CoverPreserving => {
            let cover = w.cover.as_ref().expect("cover recorded");
            s.source.covers(cover) && image_sieve(f, cover) == w.sieve && !s.target.covers(&w.sieve)
        }
        Condition::Comorphism => {
            let img = image_sieve(f, s.source.minimal_cover(w.object));
            let cover = w.cover.as_ref().expect("cover recorded");
            s.target.covers(cover) && img == w.sieve && !img.is_subset(cover)
        }
        Condition::Cofinality => {
            let cover = w.cover.as_ref().expect("cover recorded");
            let [g1, g2, l, r] = w.arrows[..] else { return false };
            let sieve = Cofinality::new(s, cover).sieve(g1, g2, w.object, l, r);
            s.source.covers(cover) && sieve == w.sieve && !s.target.covers(&sieve)
        }
        Condition::FlatNonempty => {
            let sieve = flat_nonempty(s, w.object);
            sieve == w.sieve && !s.target.covers(&sieve)
        }
        Condition::FlatSpan => {
            let sieve = flat_span(s, w.object, w.objects[0], w.objects[1], w.arrows[0], w.arrows[1]);
            sieve == w.sieve && !s.target.covers(&sieve)
        }
        Condition::FlatEqualizer => {
            let sieve = flat_equalizer(s, w.object, w.arrows[0], w.arrows[1], w.arrows[2]);
            sieve == w.sieve && !s.target.covers(&sieve)
        }
        Condition::CoverReflection => !s.source.covers(&w.sieve) && s.target.covers(&image_sieve(f, &w.sieve)),
        Condition::DenseCovering => {
            let sieve = dense_covering(s, w.object);
            sieve == w.sieve && !s.target.covers(&sieve)
        }
        Condition::LocalFullness => {
            let sieve = local_fullness(s, w.object, w.objects[0], w.arrows[0]);
            sieve == w.sieve && !s.source.covers(&sieve)
        }
        Condition::LocalFaithfulness => {
            let sieve = local_faithfulness(s, w.arrows[0], w.arrows[1]);
            f.arr(w.arrows[0]) == f.arr(w.arrows[1]) && sieve == w.sieve && !s.source.covers(&sieve)
        }
        Condition::Prop33Lift | Condition::Prop33Connect => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::fincat::FinFunctor;
    use crate::sieve::Topology;
    use std::sync::Arc;

    fn sier(w: &Arc<crate::fincat::FinCategory>) -> Topology {
        let u = corpus::arrow(w, "u");
        Topology::from_minimal(w, vec![Sieve::maximal(w, Obj(0)), Sieve::principal(w, u)]).unwrap()
    }

    /// Comorphism condition quantified literally over all covers.
    fn comorphism_oracle(s: &SiteFunctor) -> bool {
        let src = s.functor.source();
        src.objects().all(|d| {
            s.target.covering_sieves(s.functor.obj(d)).iter().all(|big| {
                s.source
                    .covering_sieves(d)
                    .iter()
                    .any(|small| small.arrows().iter().all(|&a| big.contains(s.functor.arr(a))))
            })
        })
    }

    #[test]
    fn identity_passes_everything() {
        for c in [corpus::walk2(), corpus::split_epi(), corpus::cospan()] {
            for j in crate::sieve::enumerate_topologies(&c, 50).topologies {
                let s = SiteFunctor::identity(&j);
                for d in deciders() {
                    assert!(d.decide(&s).holds, "{} on identity", d.name());
                }
            }
        }
    }

    #[test]
    fn comorphism_matches_literal_quantifier() {
        let w = corpus::walk2();
        let one = corpus::one();
        let tops_w = crate::sieve::enumerate_topologies(&w, 100).topologies;
        let tops_1 = crate::sieve::enumerate_topologies(&one, 100).topologies;
        let functors = [corpus::bang(&w)];
        for f in &functors {
            for j in &tops_w {
                for k in &tops_1 {
                    let s = SiteFunctor::new(f.clone(), j.clone(), k.clone()).unwrap();
                    let v = is_comorphism(&s);
                    assert_eq!(v.holds, comorphism_oracle(&s));
                    if let Some(w) = &v.witness {
                        assert!(replay(&s, w));
                    }
                }
            }
        }
        for name in ["a", "b"] {
            let f = corpus::pick(&w, name);
            for j in &tops_1 {
                for k in &tops_w {
                    let s = SiteFunctor::new(f.clone(), j.clone(), k.clone()).unwrap();
                    assert_eq!(is_comorphism(&s).holds, comorphism_oracle(&s));
                }
            }
        }
    }

    #[test]
    fn cover_preserving_examples() {
        let w = corpus::walk2();
        let one = corpus::one();
        let s = SiteFunctor::new(corpus::bang(&w), sier(&w), Topology::trivial(&one)).unwrap();
        assert!(is_cover_preserving(&s).holds);
        let s = SiteFunctor::new(corpus::pick(&w, "a"), Topology::degenerate(&one), sier(&w)).unwrap();
        let v = is_cover_preserving(&s);
        assert!(!v.holds);
        assert!(replay(&s, v.witness.as_ref().unwrap()));
    }

    #[test]
    fn flat_examples() {
        let w = corpus::walk2();
        let one = corpus::one();
        let s = SiteFunctor::new(corpus::pick(&w, "a"), Topology::trivial(&one), Topology::trivial(&w)).unwrap();
        let v = is_covering_flat(&s);
        assert!(!v.holds);
        assert_eq!(v.witness.as_ref().unwrap().condition, Condition::FlatNonempty);
        assert!(replay(&s, v.witness.as_ref().unwrap()));
        let s = SiteFunctor::new(corpus::pick(&w, "a"), Topology::trivial(&one), Topology::degenerate(&w)).unwrap();
        assert!(is_covering_flat(&s).holds);
        // pick_b lands on the terminal object: flat
        let s = SiteFunctor::new(corpus::pick(&w, "b"), Topology::trivial(&one), Topology::trivial(&w)).unwrap();
        assert!(is_covering_flat(&s).holds);
    }

    #[test]
    fn continuity_examples() {
        let w = corpus::walk2();
        let one = corpus::one();
        let s = SiteFunctor::new(corpus::bang(&w), sier(&w), Topology::trivial(&one)).unwrap();
        assert!(is_continuous(&s).holds);
        // flat and cover-preserving implies continuous on the corpus
        for j in crate::sieve::enumerate_topologies(&w, 100).topologies {
            for k in crate::sieve::enumerate_topologies(&w, 100).topologies {
                let s = SiteFunctor::new(FinFunctor::identity(&w), j.clone(), k.clone()).unwrap();
                let cont = is_continuous(&s);
                if is_morphism_of_sites(&s).holds {
                    assert!(cont.holds);
                }
                if let Some(wit) = &cont.witness {
                    assert!(replay(&s, wit));
                }
            }
        }
    }

    #[test]
    fn dense_examples() {
        let w = corpus::walk2();
        let one = corpus::one();
        // inclusion of {a} into Walk2 with trivial topologies: b is not covered
        let s = SiteFunctor::new(corpus::pick(&w, "a"), Topology::trivial(&one), Topology::trivial(&w)).unwrap();
        assert!(!is_dense_morphism(&s).holds);
        // inclusion of {b}: b is terminal, but a is not covered by arrows out of b
        let s = SiteFunctor::new(corpus::pick(&w, "b"), Topology::trivial(&one), Topology::trivial(&w)).unwrap();
        let v = is_dense_morphism(&s);
        assert!(!v.holds);
        let wit = v.witness.unwrap();
        assert_eq!(wit.condition, Condition::DenseCovering);
        assert!(replay(&s, &wit));
        // with Sier the empty sieve on a is not covering, but a sheaf on Sier
        // is determined by b: b is dense for the topology where a is covered by nothing
        let k = Topology::from_minimal(&w, vec![Sieve::empty(&w, Obj(0)), Sieve::maximal(&w, Obj(1))]).unwrap();
        let s = SiteFunctor::new(corpus::pick(&w, "b"), Topology::trivial(&one), k).unwrap();
        assert!(is_dense_morphism(&s).holds);
    }
}
