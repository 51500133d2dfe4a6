//! Seeded random instances: structured grammars plus rejection sampling.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::show;
use crate::corpus;
use crate::error::{Error, Result};
use crate::fibration::{
    coproduct_category, galois_left_adjoint, giraud_topology, grothendieck, grothendieck_functor, product_category,
    FibrationBundle, IndexedCategory,
};
use crate::fincat::{full_subcategory, Adjunction, Arr, FinCategory, FinFunctor, NatTransform, Obj};
use crate::sheaf::{enumerate_presheaves, Presheaf};
use crate::sieve::{generate_sieve, induced_image_topology, saturate, Coverage, Topology};
use crate::verify::{is_comorphism, is_continuous, is_dense_morphism, Prop33Square, SiteFunctor};

pub type SuiteRng = ChaCha8Rng;

/// The generator for instance `index` of a stream named `name`.
pub fn rng_for(name: &str, seed: u64, index: usize) -> SuiteRng {
    // FNV-1a keeps streams of different experiments apart
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ h);
    rng.set_stream(index as u64);
    rng
}

/// Size caps for generated instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SuiteCaps {
    /// Objects of a base category.
    pub base_objects: usize,
    /// Objects of a single fiber.
    pub fiber_objects: usize,
    /// Instances per experiment.
    pub instances: usize,
}

impl Default for SuiteCaps {
    fn default() -> Self {
        SuiteCaps {
            base_objects: 4,
            fiber_objects: 4,
            instances: 500,
        }
    }
}

impl SuiteCaps {
    pub(crate) fn validate(&self) -> Result<()> {
        if self.base_objects == 0 || self.instances == 0 {
            return Err(Error::NotComputable("caps admit no instance".into()));
        }
        Ok(())
    }
}

impl fmt::Display for SuiteCaps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "base={},fiber={},n={}", self.base_objects, self.fiber_objects, self.instances)
    }
}

impl FromStr for SuiteCaps {
    type Err = Error;

    /// `base=3,fiber=2,n=100`; omitted keys keep their defaults.
    fn from_str(s: &str) -> Result<Self> {
        let mut caps = SuiteCaps::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || Error::Unknown {
                kind: "caps entry",
                name: part.to_string(),
            };
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            let v: usize = v.trim().parse().map_err(|_| bad())?;
            match k.trim() {
                "base" => caps.base_objects = v,
                "fiber" => caps.fiber_objects = v,
                "n" => caps.instances = v,
                _ => return Err(bad()),
            }
        }
        caps.validate()?;
        Ok(caps)
    }
}

pub fn random_poset(rng: &mut SuiteRng, n: usize) -> Arc<FinCategory> {
    let mut lt = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            lt[i][j] = rng.gen_bool(0.45);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if lt[i][k] && lt[k][j] {
                    lt[i][j] = true;
                }
            }
        }
    }
    let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
    Arc::new(FinCategory::poset(&names, |i, j| i == j || lt[i][j]).expect("transitive relation"))
}

/// Product of chains, a poset with all finite meets and a top.
pub fn random_lattice(rng: &mut SuiteRng, max: usize) -> Arc<FinCategory> {
    let a = rng.gen_range(1..=max.max(1));
    let b = if a * 2 <= max && rng.gen_bool(0.4) { 2 } else { 1 };
    let names: Vec<String> = (0..a * b).map(|i| format!("m{}{}", i / b, i % b)).collect();
    Arc::new(FinCategory::poset(&names, |i, j| i / b <= j / b && i % b <= j % b).expect("product order"))
}

fn corpus_category(rng: &mut SuiteRng, max: usize) -> Arc<FinCategory> {
    let all = [
        corpus::one(),
        corpus::walk2(),
        corpus::iso_pair(),
        corpus::z2_group(),
        corpus::split_epi(),
        corpus::cospan(),
        corpus::idempotent(),
    ];
    let fits: Vec<&Arc<FinCategory>> = all.iter().filter(|c| c.object_count() <= max).collect();
    fits.choose(rng).map(|c| (*c).clone()).unwrap_or_else(corpus::one)
}

/// A random finite category with at most `max` objects: posets, products
/// of posets with one-object monoids, corpus categories and disjoint unions.
pub fn random_category(rng: &mut SuiteRng, max: usize) -> Arc<FinCategory> {
    let max = max.max(1);
    loop {
        let c = match rng.gen_range(0..10) {
            0..=4 => {
                let n = rng.gen_range(1..=max);
                random_poset(rng, n)
            }
            5 => {
                let n = rng.gen_range(1..=max);
                let m = if rng.gen_bool(0.5) { corpus::z2_group() } else { corpus::idempotent() };
                let p = random_poset(rng, n);
                product_category(&p, &m).expect("product").0
            }
            6 | 7 => corpus_category(rng, max),
            _ => {
                if max < 2 {
                    continue;
                }
                let k = rng.gen_range(1..max);
                let left = corpus_category(rng, k);
                let rest = max - left.object_count();
                if rest == 0 {
                    continue;
                }
                let n = rng.gen_range(1..=rest);
                let right = random_poset(rng, n);
                match coproduct_category(&left, &right) {
                    Ok(c) => c,
                    Err(_) => continue,
                }
            }
        };
        if c.object_count() <= max {
            return c;
        }
    }
}

/// A uniformly shuffled search for a functor `src -> tgt`, giving up after
/// a bounded number of steps.
pub fn random_functor(rng: &mut SuiteRng, src: &Arc<FinCategory>, tgt: &Arc<FinCategory>) -> Option<FinFunctor> {
    if tgt.object_count() == 0 {
        return None;
    }
    // triples (g, f, g.f) touching each arrow
    let mut touching: Vec<Vec<(Arr, Arr, Arr)>> = vec![Vec::new(); src.arrow_count()];
    for f in src.arrows() {
        for &g in src.arrows_from(src.tgt(f)) {
            let h = src.comp(g, f);
            touching[f.0].push((g, f, h));
            if g != f {
                touching[g.0].push((g, f, h));
            }
            if h != f && h != g {
                touching[h.0].push((g, f, h));
            }
        }
    }
    let order: Vec<Arr> = src.arrows().filter(|&a| !src.is_identity(a)).collect();

    struct Search<'a> {
        src: &'a FinCategory,
        tgt: &'a FinCategory,
        touching: &'a [Vec<(Arr, Arr, Arr)>],
        order: &'a [Arr],
        obj: Vec<Obj>,
        arr: Vec<Option<Arr>>,
        budget: usize,
    }

    fn consistent(s: &Search, a: Arr) -> bool {
        s.touching[a.0].iter().all(|&(g, f, h)| match (s.arr[g.0], s.arr[f.0], s.arr[h.0]) {
            (Some(x), Some(y), Some(z)) => s.tgt.comp(x, y) == z,
            _ => true,
        })
    }

    fn go(s: &mut Search, i: usize, rng: &mut SuiteRng) -> bool {
        if i == s.order.len() {
            return true;
        }
        if s.budget == 0 {
            return false;
        }
        s.budget -= 1;
        let a = s.order[i];
        let mut cands = s.tgt.hom(s.obj[s.src.src(a).0], s.obj[s.src.tgt(a).0]).to_vec();
        cands.shuffle(rng);
        for b in cands {
            s.arr[a.0] = Some(b);
            if consistent(s, a) && go(s, i + 1, rng) {
                return true;
            }
        }
        s.arr[a.0] = None;
        false
    }

    for _ in 0..8 {
        let obj: Vec<Obj> = src.objects().map(|_| Obj(rng.gen_range(0..tgt.object_count()))).collect();
        let mut arr = vec![None; src.arrow_count()];
        for o in src.objects() {
            arr[src.identity(o).0] = Some(tgt.identity(obj[o.0]));
        }
        let mut s = Search {
            src,
            tgt,
            touching: &touching,
            order: &order,
            obj,
            arr,
            budget: 400,
        };
        if s.src.objects().all(|o| consistent(&s, s.src.identity(o))) && go(&mut s, 0, rng) {
            let arr = s.arr.into_iter().map(Option::unwrap).collect();
            if let Ok(f) = FinFunctor::new(src.clone(), tgt.clone(), s.obj, arr) {
                return Some(f);
            }
        }
    }
    None
}

pub fn random_coverage(rng: &mut SuiteRng, c: &Arc<FinCategory>) -> Coverage {
    let mut cov = Coverage::new(c);
    for x in c.objects() {
        let k = match rng.gen_range(0..4) {
            0 | 1 => 0,
            2 => 1,
            _ => 2,
        };
        for _ in 0..k {
            let family: Vec<Arr> = c.arrows_into(x).iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
            if family.is_empty() && rng.gen_bool(0.8) {
                continue;
            }
            cov.add(x, family).expect("arrows into x");
        }
    }
    cov
}

pub fn random_topology(rng: &mut SuiteRng, c: &Arc<FinCategory>) -> Topology {
    saturate(&random_coverage(rng, c))
}

/// Random objects of each fiber, closed under restriction.
fn random_stable_subset(rng: &mut SuiteRng, ix: &IndexedCategory) -> Vec<Vec<Obj>> {
    let base = ix.base();
    let mut keep: Vec<Vec<bool>> = base
        .objects()
        .map(|c| ix.fiber(c).objects().map(|_| rng.gen_bool(0.6)).collect())
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for f in base.arrows() {
            let (d, e) = (base.src(f), base.tgt(f));
            let r = ix.restriction(f);
            for x in ix.fiber(e).objects() {
                let y = r.obj(x);
                if keep[e.0][x.0] && !keep[d.0][y.0] {
                    keep[d.0][y.0] = true;
                    changed = true;
                }
            }
        }
    }
    keep.iter()
        .map(|k| k.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| Obj(i)).collect())
        .collect()
}

fn indexed_piece(rng: &mut SuiteRng, base: &Arc<FinCategory>, m: usize, depth: usize) -> Option<IndexedCategory> {
    let mut ix = match rng.gen_range(0..6) {
        0 => {
            let k = random_category(rng, m.clamp(1, 2));
            IndexedCategory::constant(base, &k)
        }
        1 | 2 => {
            let c = Obj(rng.gen_range(0..base.object_count()));
            IndexedCategory::representable(base, c)
        }
        3 => {
            let d = random_category(rng, 3);
            let phi = random_functor(rng, base, &d)?;
            let c = Obj(rng.gen_range(0..d.object_count()));
            IndexedCategory::representable(&d, c).precompose(&phi).ok()?
        }
        _ if depth == 0 => {
            let a = indexed_piece(rng, base, m, 1)?;
            let b = indexed_piece(rng, base, m, 1)?;
            a.sum(&b).ok()?
        }
        _ => IndexedCategory::constant(base, &corpus::one()),
    };
    if rng.gen_bool(0.2) {
        let k = random_category(rng, 2);
        ix = ix.times(&k).ok()?;
    }
    if rng.gen_bool(0.2) {
        let keep = random_stable_subset(rng, &ix);
        ix = ix.sub(&keep).ok()?.0;
    }
    Some(ix)
}

fn fits(ix: &IndexedCategory, m: usize) -> bool {
    ix.fibers().iter().all(|f| f.object_count() <= m)
}

/// A random indexed category over `base` with fibers of at most `m` objects.
pub fn random_indexed(rng: &mut SuiteRng, base: &Arc<FinCategory>, m: usize) -> Option<IndexedCategory> {
    for _ in 0..40 {
        if let Some(ix) = indexed_piece(rng, base, m, 0) {
            // empty totals are kept but rare
            if fits(&ix, m) && (ix.size() > 0 || rng.gen_bool(0.1)) {
                return Some(ix);
            }
        }
    }
    None
}

/// A family of fiber functors `source(c) -> target(c)` commuting strictly
/// with restriction: the data of a morphism of fibrations over a fixed base.
#[derive(Clone, Debug)]
pub struct FiberMorphism {
    pub source: IndexedCategory,
    pub target: IndexedCategory,
    pub alpha: Vec<FinFunctor>,
}

impl FiberMorphism {
    /// The induced functor between the Grothendieck constructions.
    pub fn total(&self) -> Result<(FibrationBundle, FibrationBundle, FinFunctor)> {
        let src = grothendieck(&self.source)?;
        let tgt = grothendieck(&self.target)?;
        let a = grothendieck_functor(&src, &tgt, &self.alpha)?;
        Ok((src, tgt, a))
    }

    /// Restriction along a functor into the base.
    pub fn precompose(&self, f: &FinFunctor) -> Result<FiberMorphism> {
        Ok(FiberMorphism {
            source: self.source.precompose(f)?,
            target: self.target.precompose(f)?,
            alpha: f.source().objects().map(|x| self.alpha[f.obj(x).0].clone()).collect(),
        })
    }

    pub fn describe(&self) -> String {
        let mut out = format!(
            "source indexed:\n{}target indexed:\n{}",
            show::indexed(&self.source),
            show::indexed(&self.target)
        );
        for (c, a) in self.alpha.iter().enumerate() {
            out.push_str(&format!("alpha at {}: {}\n", self.source.base().object_name(Obj(c)), show::functor(a)));
        }
        out
    }
}

/// The projection `ix.times(k) -> ix`, or with `at = Some(k0)` the section
/// `x |-> (x, k0)`.
pub fn product_morphism(ix: &IndexedCategory, k: &Arc<FinCategory>, at: Option<Obj>) -> Option<FiberMorphism> {
    let prod = ix.times(k).ok()?;
    let (no, na) = (k.object_count(), k.arrow_count());
    let alpha = ix.base().objects().map(|c| {
        let (f, p) = (ix.fiber(c), prod.fiber(c));
        match at {
            None => {
                let objs = p.objects().map(|o| Obj(o.0 / no)).collect();
                let arrs = p.arrows().map(|a| Arr(a.0 / na)).collect();
                FinFunctor::new_unchecked(p.clone(), f.clone(), objs, arrs)
            }
            Some(k0) => {
                let objs = f.objects().map(|x| Obj(x.0 * no + k0.0)).collect();
                let arrs = f.arrows().map(|u| Arr(u.0 * na + k.identity(k0).0)).collect();
                FinFunctor::new_unchecked(f.clone(), p.clone(), objs, arrs)
            }
        }
    });
    let alpha = alpha.collect();
    Some(match at {
        None => FiberMorphism {
            source: prod,
            target: ix.clone(),
            alpha,
        },
        Some(_) => FiberMorphism {
            source: ix.clone(),
            target: prod,
            alpha,
        },
    })
}

pub fn random_fiber_morphism(rng: &mut SuiteRng, base: &Arc<FinCategory>, m: usize) -> Option<FiberMorphism> {
    let ix = random_indexed(rng, base, m)?;
    let fm = match rng.gen_range(0..6) {
        0 => {
            let keep = random_stable_subset(rng, &ix);
            let (sub, incs) = ix.sub(&keep).ok()?;
            FiberMorphism {
                source: sub,
                target: ix,
                alpha: incs,
            }
        }
        1 => {
            let k = random_category(rng, 2);
            product_morphism(&ix, &k, None)?
        }
        2 => {
            let k = random_category(rng, 2);
            let k0 = Obj(rng.gen_range(0..k.object_count()));
            product_morphism(&ix, &k, Some(k0))?
        }
        3 => {
            let other = random_indexed(rng, base, m)?;
            let sum = ix.sum(&other).ok()?;
            let alpha = base
                .objects()
                .map(|c| {
                    let (f, s) = (ix.fiber(c), sum.fiber(c));
                    FinFunctor::new_unchecked(f.clone(), s.clone(), f.objects().collect(), f.arrows().collect())
                })
                .collect();
            FiberMorphism {
                source: ix,
                target: sum,
                alpha,
            }
        }
        4 => {
            // id x G for a functor G: k -> k'
            let (k, k2) = (random_category(rng, 2), random_category(rng, 2));
            let g = random_functor(rng, &k, &k2)?;
            let (p1, p2) = (ix.times(&k).ok()?, ix.times(&k2).ok()?);
            let alpha = base
                .objects()
                .map(|c| {
                    let (s, t) = (p1.fiber(c), p2.fiber(c));
                    let objs = s
                        .objects()
                        .map(|o| {
                            let (x, y) = (o.0 / k.object_count(), o.0 % k.object_count());
                            Obj(x * k2.object_count() + g.obj(Obj(y)).0)
                        })
                        .collect();
                    let arrs = s
                        .arrows()
                        .map(|a| {
                            let (u, v) = (a.0 / k.arrow_count(), a.0 % k.arrow_count());
                            Arr(u * k2.arrow_count() + g.arr(Arr(v)).0)
                        })
                        .collect();
                    FinFunctor::new_unchecked(s.clone(), t.clone(), objs, arrs)
                })
                .collect();
            FiberMorphism {
                source: p1,
                target: p2,
                alpha,
            }
        }
        _ => {
            let alpha = base.objects().map(|c| FinFunctor::identity(ix.fiber(c))).collect();
            FiberMorphism {
                source: ix.clone(),
                target: ix,
                alpha,
            }
        }
    };
    if !fits(&fm.source, m) || !fits(&fm.target, m) {
        return None;
    }
    // validates strict naturality
    fm.total().ok()?;
    Some(fm)
}

/// Base comorphisms: Giraud projections, or functors whose source carries a
/// topology at least the one generated by preimages of minimal covers.
pub fn random_comorphism(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<SiteFunctor> {
    let s = if rng.gen_bool(0.4) {
        let c = random_category(rng, caps.base_objects);
        let j = random_topology(rng, &c);
        let ix = random_indexed(rng, &c, caps.fiber_objects)?;
        let g = giraud_topology(&ix, &j).ok()?;
        if g.total().object_count() > caps.base_objects || g.total().object_count() == 0 {
            return None;
        }
        SiteFunctor::new(g.projection().clone(), g.giraud().unwrap().clone(), j).ok()?
    } else {
        let d = random_category(rng, caps.base_objects);
        let c = random_category(rng, caps.base_objects);
        let g = random_functor(rng, &d, &c)?;
        let j = random_topology(rng, &c);
        let mut cov = random_coverage(rng, &d);
        for x in d.objects() {
            let m = j.minimal_cover(g.obj(x));
            let family: Vec<Arr> = d.arrows_into(x).iter().copied().filter(|&h| m.contains(g.arr(h))).collect();
            cov.add(x, family).ok()?;
        }
        SiteFunctor::new(g, saturate(&cov), j).ok()?
    };
    is_comorphism(&s).holds.then_some(s)
}

/// Rejection sampling toward continuous functors, mixing in identities and
/// Giraud projections.
pub fn random_continuous(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<SiteFunctor> {
    for _ in 0..30 {
        let s = match rng.gen_range(0..6) {
            0 => {
                let c = random_category(rng, caps.base_objects);
                SiteFunctor::identity(&random_topology(rng, &c))
            }
            1 => match random_comorphism(rng, caps) {
                Some(s) => s,
                None => continue,
            },
            _ => match random_site_functor(rng, caps) {
                Some(s) => s,
                None => continue,
            },
        };
        if is_continuous(&s).holds {
            return Some(s);
        }
    }
    None
}

pub fn random_site_functor(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<SiteFunctor> {
    let c = random_category(rng, caps.base_objects);
    let d = random_category(rng, caps.base_objects);
    let f = random_functor(rng, &c, &d)?;
    let (j, k) = (random_topology(rng, &c), random_topology(rng, &d));
    SiteFunctor::new(f, j, k).ok()
}

/// The inclusion of a full subcategory whose objects cover every object,
/// with the induced topology on the subcategory.
pub fn random_dense_pair(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<SiteFunctor> {
    let c = random_category(rng, caps.base_objects);
    let j = random_topology(rng, &c);
    let keep: Vec<Obj> = c.objects().filter(|_| rng.gen_bool(0.7)).collect();
    if keep.is_empty() {
        return None;
    }
    for x in c.objects() {
        let from_keep: Vec<Arr> = c.arrows_into(x).iter().copied().filter(|&h| keep.contains(&c.src(h))).collect();
        if !j.covers(&generate_sieve(&c, x, &from_keep).ok()?) {
            return None;
        }
    }
    let (_, inc) = full_subcategory(&c, &keep).ok()?;
    let induced = induced_image_topology(&inc, &j).ok()?;
    SiteFunctor::new(inc, induced, j).ok()
}

/// A Galois connection `G ⊣ F` between random posets, found by searching
/// monotone maps `F` with a left adjoint.
pub fn random_galois(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<Adjunction> {
    let c = random_poset_any(rng, caps.base_objects);
    let d = random_poset_any(rng, caps.base_objects);
    for _ in 0..10 {
        let f = random_functor(rng, &c, &d)?;
        if let Some(adj) = galois_left_adjoint(&f) {
            return Some(adj);
        }
    }
    None
}

/// A Galois connection `G ⊣ F` with `F` out of the poset `c`.
pub fn random_galois_from(rng: &mut SuiteRng, c: &Arc<FinCategory>, max: usize) -> Option<Adjunction> {
    let d = random_poset_any(rng, max);
    for _ in 0..10 {
        let f = random_functor(rng, c, &d)?;
        if let Some(adj) = galois_left_adjoint(&f) {
            return Some(adj);
        }
    }
    None
}

pub fn random_poset_any(rng: &mut SuiteRng, max: usize) -> Arc<FinCategory> {
    let n = rng.gen_range(1..=max.max(1));
    if rng.gen_bool(0.3) {
        random_lattice(rng, max)
    } else {
        random_poset(rng, n)
    }
}

/// A random presheaf with value sets of size at most two.
pub fn random_presheaf(rng: &mut SuiteRng, c: &Arc<FinCategory>) -> Presheaf {
    match rng.gen_range(0..4) {
        0 => Presheaf::representable(c, Obj(rng.gen_range(0..c.object_count()))),
        _ => {
            let (all, _) = enumerate_presheaves(c, 2, 400);
            all.choose(rng).cloned().unwrap_or_else(|| Presheaf::terminal(c))
        }
    }
}

/// The fixed-base square for a fiberwise morphism, with `K` the target's
/// Giraud topology for `j`.
pub fn square_of(fm: &FiberMorphism, j: &Topology) -> Result<Prop33Square> {
    let (src, tgt, a) = fm.total()?;
    let tgt = tgt.with_giraud(j)?;
    let (p, p_prime) = (tgt.projection().clone(), src.projection().clone());
    let b = FinFunctor::identity(j.base());
    let pa = a.then(&p)?;
    let phi = NatTransform::new(
        pa.clone(),
        p_prime.then(&b)?,
        src.total().objects().map(|o| j.base().identity(pa.obj(o))).collect(),
    )?;
    Prop33Square::new(a, b, phi, p, p_prime, tgt.giraud().unwrap().clone())
}

/// Kinds accepted by [`generate_instance`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InstanceKind {
    Site,
    Fibration,
    SiteFunctor,
    Comorphism,
    DensePair,
    AdjointPair,
    Prop33Square,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 7] = [
        InstanceKind::Site,
        InstanceKind::Fibration,
        InstanceKind::SiteFunctor,
        InstanceKind::Comorphism,
        InstanceKind::DensePair,
        InstanceKind::AdjointPair,
        InstanceKind::Prop33Square,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Site => "site",
            InstanceKind::Fibration => "fibration",
            InstanceKind::SiteFunctor => "site-functor",
            InstanceKind::Comorphism => "comorphism",
            InstanceKind::DensePair => "dense-pair",
            InstanceKind::AdjointPair => "adjoint-pair",
            InstanceKind::Prop33Square => "prop33-square",
        }
    }
}

impl FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InstanceKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| Error::Unknown {
            kind: "instance kind",
            name: s.to_string(),
        })
    }
}

/// A generated instance.
#[derive(Clone, Debug)]
pub enum Instance {
    Site(Topology),
    Fibration { indexed: IndexedCategory, topology: Topology },
    SiteFunctor(SiteFunctor),
    Comorphism(SiteFunctor),
    DensePair(SiteFunctor),
    AdjointPair(Adjunction),
    Prop33Square(Box<Prop33Square>),
}

impl Instance {
    pub fn describe(&self) -> String {
        match self {
            Instance::Site(j) => show::site(j),
            Instance::Fibration { indexed, topology } => {
                format!("{}{}", show::indexed(indexed), show::site(topology))
            }
            Instance::SiteFunctor(s) | Instance::Comorphism(s) | Instance::DensePair(s) => show::site_functor(s),
            Instance::AdjointPair(a) => show::adjunction(a),
            Instance::Prop33Square(sq) => format!(
                "A: {}\nB: {}\np: {}\np': {}\nK on D: {}\n",
                show::functor(&sq.a),
                show::functor(&sq.b),
                show::functor(&sq.p),
                show::functor(&sq.p_prime),
                sq.k.display()
            ),
        }
    }
}

fn attempt(kind: InstanceKind, rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<Instance> {
    match kind {
        InstanceKind::Site => {
            let c = random_category(rng, caps.base_objects);
            Some(Instance::Site(random_topology(rng, &c)))
        }
        InstanceKind::Fibration => {
            let c = random_category(rng, caps.base_objects);
            let topology = random_topology(rng, &c);
            let indexed = random_indexed(rng, &c, caps.fiber_objects)?;
            Some(Instance::Fibration { indexed, topology })
        }
        InstanceKind::SiteFunctor => random_site_functor(rng, caps).map(Instance::SiteFunctor),
        InstanceKind::Comorphism => random_comorphism(rng, caps).map(Instance::Comorphism),
        InstanceKind::DensePair => random_dense_pair(rng, caps)
            .filter(|s| is_dense_morphism(s).holds)
            .map(Instance::DensePair),
        InstanceKind::AdjointPair => random_galois(rng, caps).map(Instance::AdjointPair),
        InstanceKind::Prop33Square => {
            let c = random_category(rng, caps.base_objects);
            let j = random_topology(rng, &c);
            let fm = random_fiber_morphism(rng, &c, caps.fiber_objects)?;
            square_of(&fm, &j).ok().map(|sq| Instance::Prop33Square(Box::new(sq)))
        }
    }
}

/// A valid instance of `kind`, deterministic in `seed`.
pub fn generate_instance(kind: InstanceKind, seed: u64, caps: &SuiteCaps) -> Result<Instance> {
    caps.validate()?;
    let mut rng = rng_for(kind.name(), seed, 0);
    for _ in 0..2000 {
        if let Some(i) = attempt(kind, &mut rng, caps) {
            return Ok(i);
        }
    }
    Err(Error::NotComputable(format!(
        "caps {caps} admit no {} instance",
        kind.name()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::is_topology;

    #[test]
    fn generation_is_deterministic_and_valid() {
        let caps = SuiteCaps::default();
        for kind in InstanceKind::ALL {
            let a = generate_instance(kind, 3, &caps).unwrap().describe();
            let b = generate_instance(kind, 3, &caps).unwrap().describe();
            assert_eq!(a, b, "{}", kind.name());
        }
        for seed in 0..20 {
            if let Instance::Site(j) = generate_instance(InstanceKind::Site, seed, &caps).unwrap() {
                assert!(j.base().object_count() <= 4);
                assert!(is_topology(&j.to_cover_family()).is_ok());
            }
            if let Instance::Comorphism(s) = generate_instance(InstanceKind::Comorphism, seed, &caps).unwrap() {
                assert!(is_comorphism(&s).holds);
            }
            if let Instance::AdjointPair(a) = generate_instance(InstanceKind::AdjointPair, seed, &caps).unwrap() {
                assert!(a.left().source().is_poset());
            }
        }
    }

    #[test]
    fn caps_parse() {
        let c: SuiteCaps = "base=3,n=10".parse().unwrap();
        assert_eq!((c.base_objects, c.fiber_objects, c.instances), (3, 4, 10));
        assert_eq!(c.to_string(), "base=3,fiber=4,n=10");
        assert!("base=0".parse::<SuiteCaps>().is_err());
        assert!("size=2".parse::<SuiteCaps>().is_err());
    }

    #[test]
    fn random_functors_are_functors() {
        let mut rng = rng_for("t", 1, 0);
        for _ in 0..50 {
            let a = random_category(&mut rng, 4);
            let b = random_category(&mut rng, 4);
            if let Some(f) = random_functor(&mut rng, &a, &b) {
                assert!(FinFunctor::new(a.clone(), b.clone(), f.object_map().to_vec(), f.arrow_map().to_vec()).is_ok());
            }
        }
    }

    #[test]
    fn fiber_morphisms_validate() {
        let mut rng = rng_for("t", 2, 0);
        let mut made = 0;
        for _ in 0..60 {
            let c = random_category(&mut rng, 3);
            if let Some(fm) = random_fiber_morphism(&mut rng, &c, 4) {
                made += 1;
                assert!(fm.total().is_ok());
            }
        }
        assert!(made > 20);
    }
}
