use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use super::{generate_sieve, image_sieve, pullback_unchecked, sieve_lattice, sort_sieves, Sieve};
use crate::error::{Error, Result};
use crate::fincat::{same_category, Arr, FinCategory, FinFunctor, Obj};

/// Generating families of arrows, indexed by their common target.
#[derive(Clone, Debug)]
pub struct Coverage {
    base: Arc<FinCategory>,
    generators: Vec<Vec<Vec<Arr>>>,
}

impl Coverage {
    pub fn new(base: &Arc<FinCategory>) -> Self {
        Coverage {
            base: base.clone(),
            generators: vec![Vec::new(); base.object_count()],
        }
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn add(&mut self, c: Obj, family: Vec<Arr>) -> Result<()> {
        if let Some(&f) = family.iter().find(|&&f| self.base.tgt(f) != c) {
            return Err(Error::Sieve(format!(
                "generator `{}` does not target `{}`",
                self.base.arrow_name(f),
                self.base.object_name(c)
            )));
        }
        self.generators[c.0].push(family);
        Ok(())
    }

    pub fn families(&self, c: Obj) -> &[Vec<Arr>] {
        &self.generators[c.0]
    }

    /// The sieves generated by each family at `c`.
    pub fn sieves(&self, c: Obj) -> Vec<Sieve> {
        self.generators[c.0]
            .iter()
            .map(|fam| generate_sieve(&self.base, c, fam).expect("checked on insertion"))
            .collect()
    }
}

/// An explicit assignment of a set of sieves to each object; a candidate
/// topology that has not been checked.
#[derive(Clone, Debug)]
pub struct CoverFamily {
    base: Arc<FinCategory>,
    covers: Vec<Vec<Sieve>>,
}

impl CoverFamily {
    pub fn new(base: &Arc<FinCategory>, mut covers: Vec<Vec<Sieve>>) -> Result<Self> {
        if covers.len() != base.object_count() {
            return Err(Error::Sieve("one cover set per object is required".into()));
        }
        for (i, set) in covers.iter_mut().enumerate() {
            if let Some(s) = set.iter().find(|s| s.apex() != Obj(i)) {
                return Err(Error::Sieve(format!(
                    "sieve {} listed at `{}` has another apex",
                    s.display(base),
                    base.object_name(Obj(i))
                )));
            }
            sort_sieves(set);
            set.dedup();
        }
        Ok(CoverFamily {
            base: base.clone(),
            covers,
        })
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn covers(&self, c: Obj) -> &[Sieve] {
        &self.covers[c.0]
    }
}

/// Which axiom a candidate violates, with the witnessing data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TopologyFailure {
    Maximality { object: Obj },
    Stability { arrow: Arr, sieve: Sieve },
    Transitivity { cover: Sieve, sieve: Sieve },
}

impl TopologyFailure {
    pub fn describe(&self, c: &FinCategory) -> String {
        match self {
            TopologyFailure::Maximality { object } => format!("maximality at {}", c.object_name(*object)),
            TopologyFailure::Stability { arrow, sieve } => format!(
                "stability: pullback of {} along {} is not covering",
                sieve.display(c),
                c.arrow_name(*arrow)
            ),
            TopologyFailure::Transitivity { cover, sieve } => format!(
                "transitivity at {}: {} is locally covering on {} but not covering",
                c.object_name(cover.apex()),
                sieve.display(c),
                cover.display(c)
            ),
        }
    }
}

/// Checks maximality, stability and transitivity exhaustively.
pub fn is_topology(cand: &CoverFamily) -> std::result::Result<(), TopologyFailure> {
    let c = &cand.base;
    let sets: Vec<HashSet<&Sieve>> = cand.covers.iter().map(|v| v.iter().collect()).collect();
    for x in c.objects() {
        if !sets[x.0].contains(&Sieve::maximal(c, x)) {
            return Err(TopologyFailure::Maximality { object: x });
        }
    }
    for x in c.objects() {
        for s in &cand.covers[x.0] {
            for &f in c.arrows_into(x) {
                let p = pullback_unchecked(c, f, s);
                if !sets[c.src(f).0].contains(&p) {
                    return Err(TopologyFailure::Stability {
                        arrow: f,
                        sieve: s.clone(),
                    });
                }
            }
        }
    }
    for x in c.objects() {
        let lattice = sieve_lattice(c, x);
        for r in lattice.iter().filter(|r| !sets[x.0].contains(r)) {
            for s in &cand.covers[x.0] {
                let local = s
                    .arrows()
                    .into_iter()
                    .all(|f| sets[c.src(f).0].contains(&pullback_unchecked(c, f, r)));
                if local {
                    return Err(TopologyFailure::Transitivity {
                        cover: s.clone(),
                        sieve: r.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// A Grothendieck topology on a finite category.
///
/// On a finite category the covering sieves on each object are closed under
/// intersection, so they are exactly the sieves containing one minimal
/// covering sieve. Only those minimal sieves are stored.
#[derive(Clone, Debug)]
pub struct Topology {
    base: Arc<FinCategory>,
    minimal: Vec<Sieve>,
}

impl PartialEq for Topology {
    fn eq(&self, other: &Self) -> bool {
        same_category(&self.base, &other.base) && self.minimal == other.minimal
    }
}

impl Eq for Topology {}

impl Topology {
    /// Only maximal sieves cover.
    pub fn trivial(base: &Arc<FinCategory>) -> Self {
        Topology {
            base: base.clone(),
            minimal: base.objects().map(|x| Sieve::maximal(base, x)).collect(),
        }
    }

    /// Every sieve covers, including the empty one.
    pub fn degenerate(base: &Arc<FinCategory>) -> Self {
        Topology {
            base: base.clone(),
            minimal: base.objects().map(|x| Sieve::empty(base, x)).collect(),
        }
    }

    /// Builds a topology from its minimal covering sieves, checking the axioms.
    pub fn from_minimal(base: &Arc<FinCategory>, minimal: Vec<Sieve>) -> Result<Self> {
        if minimal.len() != base.object_count() || minimal.iter().enumerate().any(|(i, s)| s.apex() != Obj(i)) {
            return Err(Error::Sieve("one minimal sieve per object is required".into()));
        }
        let t = Topology {
            base: base.clone(),
            minimal,
        };
        match t.principal_failure() {
            None => Ok(t),
            Some(msg) => Err(Error::NotATopology(msg)),
        }
    }

    /// Converts an explicit cover family, which must satisfy the axioms.
    pub fn from_cover_family(cand: &CoverFamily) -> std::result::Result<Self, TopologyFailure> {
        is_topology(cand)?;
        let c = &cand.base;
        let minimal = c
            .objects()
            .map(|x| {
                let set = &cand.covers[x.0];
                set.iter().skip(1).fold(set[0].clone(), |acc, s| acc.intersection(s))
            })
            .collect();
        Ok(Topology {
            base: c.clone(),
            minimal,
        })
    }

    fn principal_failure(&self) -> Option<String> {
        let c = &self.base;
        for f in c.arrows() {
            let (d, x) = (c.src(f), c.tgt(f));
            if !self.minimal[d.0].is_subset(&pullback_unchecked(c, f, &self.minimal[x.0])) {
                return Some(format!(
                    "stability: pullback of {} along {} is not covering",
                    self.minimal[x.0].display(c),
                    c.arrow_name(f)
                ));
            }
        }
        for x in c.objects() {
            if self.local_closure(x) != self.minimal[x.0] {
                return Some(format!(
                    "transitivity at {}: {} is not minimal",
                    c.object_name(x),
                    self.minimal[x.0].display(c)
                ));
            }
        }
        None
    }

    // { f.g : f in m(x), g in m(src f) }
    fn local_closure(&self, x: Obj) -> Sieve {
        local_closure(&self.base, &self.minimal, x)
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn minimal_cover(&self, x: Obj) -> &Sieve {
        &self.minimal[x.0]
    }

    pub fn minimal_covers(&self) -> &[Sieve] {
        &self.minimal
    }

    pub fn covers(&self, s: &Sieve) -> bool {
        self.minimal[s.apex().0].is_subset(s)
    }

    /// Every covering sieve on `x`, in lattice order.
    pub fn covering_sieves(&self, x: Obj) -> Vec<Sieve> {
        sieve_lattice(&self.base, x).into_iter().filter(|s| self.covers(s)).collect()
    }

    pub fn to_cover_family(&self) -> CoverFamily {
        CoverFamily {
            base: self.base.clone(),
            covers: self.base.objects().map(|x| self.covering_sieves(x)).collect(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.base.objects().all(|x| self.minimal[x.0].is_maximal(&self.base))
    }

    /// Moves the topology along a category isomorphism `iso: base -> D`.
    pub fn transport(&self, iso: &FinFunctor) -> Result<Topology> {
        if !same_category(iso.source(), &self.base) {
            return Err(Error::Mismatch("transport along a functor from another base".into()));
        }
        let d = iso.target();
        let mut minimal = vec![None; d.object_count()];
        for x in self.base.objects() {
            minimal[iso.obj(x).0] = Some(image_sieve(iso, &self.minimal[x.0]));
        }
        let minimal = minimal
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Mismatch("transport along a non-surjective functor".into()))?;
        Topology::from_minimal(d, minimal)
    }

    pub fn display(&self) -> TopologyDisplay<'_> {
        TopologyDisplay(self)
    }
}

pub struct TopologyDisplay<'a>(&'a Topology);

impl fmt::Display for TopologyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.0;
        let c = &t.base;
        let mut rows: Vec<(String, String, usize)> = c
            .objects()
            .map(|x| {
                (
                    c.object_name(x).to_string(),
                    t.minimal[x.0].display(c).to_string(),
                    t.covering_sieves(x).len(),
                )
            })
            .collect();
        rows.sort();
        for (name, m, n) in rows {
            writeln!(f, "{name}: minimal cover {m} ({n} covering sieves)")?;
        }
        Ok(())
    }
}

fn local_closure(c: &FinCategory, minimal: &[Sieve], x: Obj) -> Sieve {
    let mut family = Vec::new();
    for f in minimal[x.0].arrows() {
        for g in minimal[c.src(f).0].arrows() {
            family.push(c.comp(f, g));
        }
    }
    generate_sieve(c, x, &family).expect("composites end at x")
}

/// The least topology in which every generated sieve of the coverage covers.
///
/// Worklist fixed point on the minimal covering sieves: start from the
/// intersection of the generated sieves, then shrink by pullback stability
/// and by local closure until nothing moves.
pub fn saturate(cov: &Coverage) -> Topology {
    let c = &cov.base;
    let mut minimal: Vec<Sieve> = c
        .objects()
        .map(|x| {
            cov.sieves(x)
                .into_iter()
                .fold(Sieve::maximal(c, x), |acc, s| acc.intersection(&s))
        })
        .collect();
    let mut queue: Vec<Obj> = c.objects().collect();
    queue.reverse();
    let mut queued = vec![true; c.object_count()];
    // a change at d affects stability below d and local closures above it
    let mark = |d: Obj, queue: &mut Vec<Obj>, queued: &mut Vec<bool>| {
        for y in std::iter::once(d).chain(c.arrows_from(d).iter().map(|&f| c.tgt(f))) {
            if !queued[y.0] {
                queued[y.0] = true;
                queue.push(y);
            }
        }
    };
    while let Some(x) = queue.pop() {
        queued[x.0] = false;
        // stability: m(d) must lie inside f^* m(x) for every f: d -> x
        for &f in c.arrows_into(x) {
            let d = c.src(f);
            let p = pullback_unchecked(c, f, &minimal[x.0]);
            if !minimal[d.0].is_subset(&p) {
                minimal[d.0] = minimal[d.0].intersection(&p);
                mark(d, &mut queue, &mut queued);
            }
        }
        // transitivity: m(x) = { f.g : f in m(x), g in m(src f) }
        let closed = local_closure(c, &minimal, x);
        if closed != minimal[x.0] {
            minimal[x.0] = closed;
            mark(x, &mut queue, &mut queued);
        }
    }
    Topology {
        base: c.clone(),
        minimal,
    }
}

/// `J1 <= J2` when every `J1`-cover is a `J2`-cover.
pub fn topology_leq(j1: &Topology, j2: &Topology) -> Result<bool> {
    if !same_category(&j1.base, &j2.base) {
        return Err(Error::Mismatch("topologies on different categories".into()));
    }
    Ok(j1.base.objects().all(|x| j2.minimal[x.0].is_subset(&j1.minimal[x.0])))
}

/// The topology on the source of `F` whose covers are the sieves whose image
/// generates a `K`-cover, provided that candidate satisfies the axioms.
pub fn induced_image_topology(f: &FinFunctor, k: &Topology) -> Result<Topology> {
    if !same_category(f.target(), &k.base) {
        return Err(Error::Mismatch("topology does not live on the functor's target".into()));
    }
    let c = f.source();
    let covers = c
        .objects()
        .map(|x| {
            sieve_lattice(c, x)
                .into_iter()
                .filter(|s| k.covers(&image_sieve(f, s)))
                .collect()
        })
        .collect();
    let cand = CoverFamily {
        base: c.clone(),
        covers,
    };
    Topology::from_cover_family(&cand).map_err(|e| Error::NotATopology(e.describe(c)))
}

/// Output of [`enumerate_topologies`].
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub topologies: Vec<Topology>,
    pub truncated: bool,
}

/// Every topology on `c`, in a fixed order (objects by index, minimal sieves
/// in lattice order), stopping after `cap` results.
pub fn enumerate_topologies(c: &Arc<FinCategory>, cap: usize) -> Enumeration {
    let lattices: Vec<Vec<Sieve>> = c.objects().map(|x| sieve_lattice(c, x)).collect();
    let n = c.object_count();
    let mut out = Vec::new();
    let mut chosen: Vec<Sieve> = Vec::with_capacity(n);
    let mut truncated = false;

    struct Ctx<'a> {
        c: &'a FinCategory,
        lattices: &'a [Vec<Sieve>],
        cap: usize,
    }

    fn consistent(ctx: &Ctx, chosen: &[Sieve]) -> bool {
        let c = ctx.c;
        let i = chosen.len() - 1;
        let x = Obj(i);
        for &f in c.arrows_into(x).iter().chain(c.arrows_from(x)) {
            let (d, y) = (c.src(f), c.tgt(f));
            if d.0 <= i && y.0 <= i && !chosen[d.0].is_subset(&pullback_unchecked(c, f, &chosen[y.0])) {
                return false;
            }
        }
        for (j, m) in chosen.iter().enumerate() {
            let ready = m.arrows().into_iter().all(|f| c.src(f).0 <= i);
            let fresh = j == i || m.arrows().into_iter().any(|f| c.src(f) == x);
            if ready && fresh && local_closure(c, chosen, Obj(j)) != *m {
                return false;
            }
        }
        true
    }

    fn go(ctx: &Ctx, chosen: &mut Vec<Sieve>, out: &mut Vec<Vec<Sieve>>, truncated: &mut bool) {
        if *truncated {
            return;
        }
        let i = chosen.len();
        if i == ctx.lattices.len() {
            if out.len() == ctx.cap {
                *truncated = true;
            } else {
                out.push(chosen.clone());
            }
            return;
        }
        for s in &ctx.lattices[i] {
            chosen.push(s.clone());
            if consistent(ctx, chosen) {
                go(ctx, chosen, out, truncated);
            }
            chosen.pop();
            if *truncated {
                return;
            }
        }
    }

    let ctx = Ctx {
        c,
        lattices: &lattices,
        cap,
    };
    let mut raw = Vec::new();
    go(&ctx, &mut chosen, &mut raw, &mut truncated);
    for minimal in raw {
        out.push(Topology {
            base: c.clone(),
            minimal,
        });
    }
    Enumeration {
        topologies: out,
        truncated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn sier(w: &Arc<FinCategory>) -> Topology {
        let mut cov = Coverage::new(w);
        cov.add(Obj(1), vec![corpus::arrow(w, "u")]).unwrap();
        saturate(&cov)
    }

    /// Every subset of every lattice, filtered by the axiom checker.
    fn brute_force_topologies(c: &Arc<FinCategory>) -> Vec<CoverFamily> {
        let lattices: Vec<Vec<Sieve>> = c.objects().map(|x| sieve_lattice(c, x)).collect();
        let mut acc: Vec<Vec<Vec<Sieve>>> = vec![vec![]];
        for l in &lattices {
            let mut next = Vec::new();
            for mask in 0u64..(1 << l.len()) {
                let set: Vec<Sieve> = (0..l.len()).filter(|i| mask >> i & 1 == 1).map(|i| l[i].clone()).collect();
                for prefix in &acc {
                    let mut p = prefix.clone();
                    p.push(set.clone());
                    next.push(p);
                }
            }
            acc = next;
        }
        acc.into_iter()
            .map(|covers| CoverFamily::new(c, covers).unwrap())
            .filter(|cf| is_topology(cf).is_ok())
            .collect()
    }

    #[test]
    fn saturation_examples() {
        let w = corpus::walk2();
        let (a, b) = (Obj(0), Obj(1));
        let t = saturate(&Coverage::new(&w));
        assert_eq!(t, Topology::trivial(&w));
        let s = sier(&w);
        let covers_b: Vec<Vec<String>> = s.covering_sieves(b).iter().map(|x| x.names(&w)).collect();
        assert_eq!(covers_b, vec![vec!["u".to_string()], vec!["id_b".to_string(), "u".to_string()]]);
        assert_eq!(s.covering_sieves(a).len(), 1);

        let mut cov = Coverage::new(&w);
        cov.add(b, vec![]).unwrap();
        let e = saturate(&cov);
        assert_eq!(e.covering_sieves(b).len(), sieve_lattice(&w, b).len());
        assert!(is_topology(&e.to_cover_family()).is_ok());
    }

    #[test]
    fn axiom_failures() {
        let w = corpus::walk2();
        let b = Obj(1);
        let su = Sieve::principal(&w, corpus::arrow(&w, "u"));
        let cand = CoverFamily::new(&w, vec![vec![Sieve::maximal(&w, Obj(0))], vec![su]]).unwrap();
        assert_eq!(is_topology(&cand), Err(TopologyFailure::Maximality { object: b }));
        assert!(is_topology(&Topology::trivial(&w).to_cover_family()).is_ok());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for c in [corpus::one(), corpus::walk2(), corpus::z2_group(), corpus::split_epi(), corpus::cospan()] {
            let e = enumerate_topologies(&c, usize::MAX);
            assert!(!e.truncated);
            let brute = brute_force_topologies(&c);
            assert_eq!(e.topologies.len(), brute.len());
            for cf in &brute {
                let t = Topology::from_cover_family(cf).unwrap();
                assert!(e.topologies.contains(&t));
            }
        }
        assert_eq!(enumerate_topologies(&corpus::one(), 10).topologies.len(), 2);
        let w = corpus::walk2();
        let all = enumerate_topologies(&w, 100).topologies;
        assert!(all.contains(&Topology::trivial(&w)));
        assert!(all.contains(&sier(&w)));
        let one = enumerate_topologies(&w, 1);
        assert_eq!(one.topologies.len(), 1);
        assert!(one.truncated);
    }

    #[test]
    fn saturate_is_least() {
        let c = corpus::split_epi();
        let all = enumerate_topologies(&c, usize::MAX).topologies;
        for x in c.objects() {
            for s in sieve_lattice(&c, x) {
                let mut cov = Coverage::new(&c);
                cov.add(x, s.arrows()).unwrap();
                let t = saturate(&cov);
                assert!(is_topology(&t.to_cover_family()).is_ok());
                assert!(t.covers(&s));
                for k in all.iter().filter(|k| k.covers(&s)) {
                    assert!(topology_leq(&t, k).unwrap());
                }
            }
        }
    }

    #[test]
    fn leq_examples() {
        let w = corpus::walk2();
        let s = sier(&w);
        let t = Topology::trivial(&w);
        assert!(topology_leq(&t, &s).unwrap());
        assert!(!topology_leq(&s, &t).unwrap());
    }

    #[test]
    fn induced_examples() {
        let w = corpus::walk2();
        let s = sier(&w);
        let id = FinFunctor::identity(&w);
        assert_eq!(induced_image_topology(&id, &s).unwrap(), s);
        let one = corpus::one();
        let bang = corpus::bang(&w);
        let t = induced_image_topology(&bang, &Topology::trivial(&one)).unwrap();
        // every nonempty sieve covers
        for x in w.objects() {
            for sv in sieve_lattice(&w, x) {
                assert_eq!(t.covers(&sv), !sv.is_empty());
            }
        }
    }

    #[test]
    fn from_minimal_validates() {
        let w = corpus::walk2();
        let su = Sieve::principal(&w, corpus::arrow(&w, "u"));
        assert!(Topology::from_minimal(&w, vec![Sieve::maximal(&w, Obj(0)), su.clone()]).is_ok());
        assert!(Topology::from_minimal(&w, vec![Sieve::empty(&w, Obj(0)), Sieve::maximal(&w, Obj(1))]).is_ok());
        assert!(Topology::from_minimal(&w, vec![Sieve::maximal(&w, Obj(0)), Sieve::empty(&w, Obj(1))]).is_err());
    }
}
