//! Sieves, coverages and Grothendieck topologies on finite categories.

mod topology;

pub use topology::{
    enumerate_topologies, induced_image_topology, is_topology, saturate, topology_leq, CoverFamily, Coverage,
    Enumeration, Topology, TopologyFailure,
};

use std::collections::HashSet;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::sync::Arc;

use crate::fincat::{Arr, ArrowInfo, Caps, FinCategory, FinFunctor, Obj};

/// A set of arrows with common target, closed under precomposition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sieve {
    apex: Obj,
    arrows: FixedBitSet,
}

impl PartialOrd for Sieve {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// By apex, then lexicographically on member indices.
impl Ord for Sieve {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.apex
            .cmp(&other.apex)
            .then_with(|| self.arrows.ones().cmp(other.arrows.ones()))
    }
}

impl Sieve {
    pub fn empty(c: &FinCategory, apex: Obj) -> Self {
        Sieve {
            apex,
            arrows: FixedBitSet::with_capacity(c.arrow_count()),
        }
    }

    pub fn maximal(c: &FinCategory, apex: Obj) -> Self {
        let mut s = Self::empty(c, apex);
        for &a in c.arrows_into(apex) {
            s.arrows.insert(a.0);
        }
        s
    }

    /// The sieve generated by a single arrow.
    pub fn principal(c: &FinCategory, f: Arr) -> Self {
        let mut s = Self::empty(c, c.tgt(f));
        for &g in c.arrows_into(c.src(f)) {
            s.arrows.insert(c.comp(f, g).0);
        }
        s
    }

    /// Builds a sieve from an explicit arrow set, checking closure.
    pub fn from_arrows(c: &FinCategory, apex: Obj, arrows: &[Arr]) -> Result<Self> {
        let mut s = Self::empty(c, apex);
        for &a in arrows {
            if c.tgt(a) != apex {
                return Err(Error::Sieve(format!(
                    "arrow `{}` does not target `{}`",
                    c.arrow_name(a),
                    c.object_name(apex)
                )));
            }
            s.arrows.insert(a.0);
        }
        for a in s.arrows() {
            for &g in c.arrows_into(c.src(a)) {
                let h = c.comp(a, g);
                if !s.contains(h) {
                    return Err(Error::Sieve(format!(
                        "not closed under precomposition: `{}` after `{}` is missing",
                        c.arrow_name(a),
                        c.arrow_name(g)
                    )));
                }
            }
        }
        Ok(s)
    }

    pub fn apex(&self) -> Obj {
        self.apex
    }

    pub fn contains(&self, a: Arr) -> bool {
        self.arrows.contains(a.0)
    }

    pub fn len(&self) -> usize {
        self.arrows.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_clear()
    }

    /// Member arrows in index order.
    pub fn arrows(&self) -> Vec<Arr> {
        self.arrows.ones().map(Arr).collect()
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.arrows
    }

    pub fn is_subset(&self, other: &Sieve) -> bool {
        self.apex == other.apex && self.arrows.is_subset(&other.arrows)
    }

    pub fn intersection(&self, other: &Sieve) -> Sieve {
        debug_assert_eq!(self.apex, other.apex);
        let mut s = self.clone();
        s.arrows.intersect_with(&other.arrows);
        s
    }

    pub fn union(&self, other: &Sieve) -> Sieve {
        debug_assert_eq!(self.apex, other.apex);
        let mut s = self.clone();
        s.arrows.union_with(&other.arrows);
        s
    }

    pub fn is_maximal(&self, c: &FinCategory) -> bool {
        self.contains(c.identity(self.apex))
    }

    /// Names of the member arrows, sorted.
    pub fn names(&self, c: &FinCategory) -> Vec<String> {
        let mut v: Vec<String> = self.arrows().into_iter().map(|a| c.arrow_name(a).to_string()).collect();
        v.sort();
        v
    }

    /// Arrows of the sieve that do not factor through another member by a
    /// non-invertible arrow; they generate the sieve.
    pub fn generators(&self, c: &FinCategory) -> Vec<Arr> {
        let members = self.arrows();
        let mut out: Vec<Arr> = Vec::new();
        let mut covered = Sieve::empty(c, self.apex);
        // larger principal sieves first, ties by index
        let mut order = members.clone();
        order.sort_by_key(|&f| (std::cmp::Reverse(Sieve::principal(c, f).len()), f));
        for f in order {
            if !covered.contains(f) {
                covered = covered.union(&Sieve::principal(c, f));
                out.push(f);
            }
        }
        out.sort();
        out
    }

    pub fn display<'a>(&'a self, c: &'a FinCategory) -> SieveDisplay<'a> {
        SieveDisplay { sieve: self, cat: c }
    }
}

pub struct SieveDisplay<'a> {
    sieve: &'a Sieve,
    cat: &'a FinCategory,
}

impl fmt::Display for SieveDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.sieve.names(self.cat).join(", "))
    }
}

/// The smallest sieve on `apex` containing `family`.
pub fn generate_sieve(c: &FinCategory, apex: Obj, family: &[Arr]) -> Result<Sieve> {
    let mut s = Sieve::empty(c, apex);
    for &f in family {
        if c.tgt(f) != apex {
            return Err(Error::Sieve(format!(
                "family mixes targets: `{}` does not end at `{}`",
                c.arrow_name(f),
                c.object_name(apex)
            )));
        }
        for &g in c.arrows_into(c.src(f)) {
            s.arrows.insert(c.comp(f, g).0);
        }
    }
    Ok(s)
}

/// `f^*S = { g : f.g in S }`, a sieve on the source of `f`.
pub fn pullback_sieve(c: &FinCategory, f: Arr, s: &Sieve) -> Result<Sieve> {
    if c.tgt(f) != s.apex {
        return Err(Error::Sieve(format!(
            "cannot pull back along `{}`: its target is not `{}`",
            c.arrow_name(f),
            c.object_name(s.apex)
        )));
    }
    Ok(pullback_unchecked(c, f, s))
}

pub(crate) fn pullback_unchecked(c: &FinCategory, f: Arr, s: &Sieve) -> Sieve {
    let d = c.src(f);
    let mut out = Sieve::empty(c, d);
    for &g in c.arrows_into(d) {
        if s.contains(c.comp(f, g)) {
            out.arrows.insert(g.0);
        }
    }
    out
}

/// The sieve on `F(apex)` generated by the image of `s`.
pub fn image_sieve(f: &FinFunctor, s: &Sieve) -> Sieve {
    let d = f.target();
    let apex = f.obj(s.apex);
    let family: Vec<Arr> = s.arrows().into_iter().map(|a| f.arr(a)).collect();
    generate_sieve(d, apex, &family).expect("image arrows share a target")
}

/// Every sieve on `apex`, ordered by size and then by member indices.
pub fn sieve_lattice(c: &FinCategory, apex: Obj) -> Vec<Sieve> {
    let principals: Vec<Sieve> = c.arrows_into(apex).iter().map(|&f| Sieve::principal(c, f)).collect();
    let mut seen: HashSet<Sieve> = HashSet::new();
    let empty = Sieve::empty(c, apex);
    let mut frontier = vec![empty.clone()];
    seen.insert(empty);
    while let Some(s) = frontier.pop() {
        for p in &principals {
            if !p.is_subset(&s) {
                let t = s.union(p);
                if seen.insert(t.clone()) {
                    frontier.push(t);
                }
            }
        }
    }
    let mut out: Vec<Sieve> = seen.into_iter().collect();
    sort_sieves(&mut out);
    out
}

/// The category of elements of a sieve: objects are its arrows, an arrow
/// `f -> f'` is a `g` with `f' . g = f`. Returns it with the projection to
/// `c` sending `g: f -> f'` to `g`.
pub fn elements_of_sieve(c: &Arc<FinCategory>, s: &Sieve) -> Result<(Arc<FinCategory>, FinFunctor)> {
    let members = s.arrows();
    let names: Vec<String> = members.iter().map(|&f| c.arrow_name(f).to_string()).collect();
    let mut infos = Vec::new();
    let mut under = Vec::new();
    let mut index: HashMap<(Arr, usize, usize), Arr> = HashMap::new();
    let mut identities = vec![Arr(0); members.len()];
    for (i, &f) in members.iter().enumerate() {
        for (j, &f2) in members.iter().enumerate() {
            for &g in c.hom(c.src(f), c.src(f2)) {
                if c.comp(f2, g) != f {
                    continue;
                }
                let a = Arr(infos.len());
                if i == j && c.is_identity(g) {
                    identities[i] = a;
                }
                index.insert((g, i, j), a);
                infos.push(ArrowInfo {
                    name: format!("{}:{}->{}", c.arrow_name(g), names[i], names[j]),
                    src: Obj(i),
                    tgt: Obj(j),
                });
                under.push((g, i, j));
            }
        }
    }
    let cat = FinCategory::generate(Caps::default(), names, infos, identities, |g2, g1| {
        let (a, i, _) = under[g1.0];
        let (b, _, k) = under[g2.0];
        index[&(c.comp(b, a), i, k)]
    })?;
    let cat = Arc::new(cat);
    let projection = FinFunctor::new(
        cat.clone(),
        c.clone(),
        members.iter().map(|&f| c.src(f)).collect(),
        under.iter().map(|&(g, _, _)| g).collect(),
    )?;
    Ok((cat, projection))
}

pub(crate) fn sort_sieves(v: &mut [Sieve]) {
    v.sort_by_cached_key(|s| (s.len(), s.arrows()));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    /// Closure by brute force: repeat precomposition until nothing changes.
    fn closure_oracle(c: &FinCategory, family: &[Arr]) -> Vec<Arr> {
        let mut set: Vec<Arr> = family.to_vec();
        loop {
            let mut grew = false;
            for f in set.clone() {
                for g in c.arrows() {
                    if let Some(h) = c.compose(f, g) {
                        if !set.contains(&h) {
                            set.push(h);
                            grew = true;
                        }
                    }
                }
            }
            if !grew {
                break;
            }
        }
        set.sort();
        set
    }

    #[test]
    fn generation_examples() {
        let w = corpus::walk2();
        let b = w.object_named("b").unwrap();
        let u = corpus::arrow(&w, "u");
        let idb = w.identity(b);
        assert_eq!(generate_sieve(&w, b, &[idb]).unwrap(), Sieve::maximal(&w, b));
        let su = generate_sieve(&w, b, &[u]).unwrap();
        assert_eq!(su.arrows(), closure_oracle(&w, &[u]));
        assert_eq!(su.arrows(), vec![u]);
        assert!(generate_sieve(&w, b, &[]).unwrap().is_empty());
        let a = w.object_named("a").unwrap();
        assert!(generate_sieve(&w, a, &[u]).is_err());
    }

    #[test]
    fn pullback_examples() {
        let w = corpus::walk2();
        let (a, b) = (Obj(0), Obj(1));
        let u = corpus::arrow(&w, "u");
        let su = Sieve::principal(&w, u);
        assert_eq!(pullback_sieve(&w, w.identity(b), &su).unwrap(), su);
        assert_eq!(
            pullback_sieve(&w, u, &Sieve::maximal(&w, b)).unwrap(),
            Sieve::maximal(&w, a)
        );
        assert_eq!(pullback_sieve(&w, u, &su).unwrap(), Sieve::maximal(&w, a));
        assert!(pullback_sieve(&w, u, &Sieve::maximal(&w, a)).is_err());
    }

    #[test]
    fn lattice_matches_brute_force() {
        for c in [corpus::walk2(), corpus::split_epi(), corpus::cospan(), corpus::z2_group()] {
            for x in c.objects() {
                let lattice = sieve_lattice(&c, x);
                // brute force: subsets of arrows into x that are closed
                let into = c.arrows_into(x);
                let mut count = 0;
                for mask in 0u32..(1 << into.len()) {
                    let chosen: Vec<Arr> = (0..into.len()).filter(|i| mask >> i & 1 == 1).map(|i| into[i]).collect();
                    if closure_oracle(&c, &chosen) == {
                        let mut v = chosen.clone();
                        v.sort();
                        v
                    } {
                        count += 1;
                    }
                }
                assert_eq!(lattice.len(), count);
            }
        }
    }

    #[test]
    fn from_arrows_checks_closure() {
        let c = corpus::split_epi();
        let a = c.object_named("a").unwrap();
        let s = corpus::arrow(&c, "s");
        assert!(Sieve::from_arrows(&c, a, &[s]).is_err());
        let k = corpus::arrow(&c, "k");
        assert!(Sieve::from_arrows(&c, a, &[s, k]).is_ok());
    }

    #[test]
    fn elements_examples() {
        let w = corpus::walk2();
        let b = w.object_named("b").unwrap();
        let (e, p) = elements_of_sieve(&w, &Sieve::maximal(&w, b)).unwrap();
        assert_eq!(e.object_count(), 2);
        assert_eq!(e.arrows().filter(|&a| !e.is_identity(a)).count(), 1);
        assert_eq!(p.arr(e.arrow_named("u:u->id_b").unwrap()), corpus::arrow(&w, "u"));
        let (e, _) = elements_of_sieve(&w, &Sieve::principal(&w, corpus::arrow(&w, "u"))).unwrap();
        assert_eq!((e.object_count(), e.arrow_count()), (1, 1));
        let (e, _) = elements_of_sieve(&w, &Sieve::empty(&w, b)).unwrap();
        assert_eq!(e.object_count(), 0);
    }

    #[test]
    fn generators_regenerate() {
        let c = corpus::split_epi();
        for x in c.objects() {
            for s in sieve_lattice(&c, x) {
                let g = s.generators(&c);
                assert_eq!(generate_sieve(&c, x, &g).unwrap(), s);
            }
        }
    }
}
