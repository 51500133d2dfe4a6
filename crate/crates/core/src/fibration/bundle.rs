use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::IndexedCategory;
use crate::error::{Error, Result};
use crate::fincat::{same_category, Arr, ArrowInfo, Caps, CategoryBuilder, FinCategory, FinFunctor, NatTransform, Obj};
use crate::sieve::{saturate, Coverage, Topology};

/// How the lift in the fibration condition may sit over the base arrow.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CartesianMode {
    /// The lift projects exactly onto the base arrow.
    #[default]
    Strict,
    /// The lift projects onto the base arrow up to an isomorphism of its source.
    Street,
}

/// Coordinates of a total category built by [`grothendieck`].
#[derive(Clone, Debug)]
pub struct Coordinates {
    pub indexed: IndexedCategory,
    /// `(x, c)` for each total object.
    pub objects: Vec<(Obj, Obj)>,
    /// `(u, f)` for each total arrow.
    pub arrows: Vec<(Arr, Arr)>,
    object_index: HashMap<(Obj, Obj), Obj>,
    arrow_index: HashMap<(Arr, Arr, Obj), Arr>,
}

impl Coordinates {
    pub fn object(&self, x: Obj, c: Obj) -> Obj {
        self.object_index[&(x, c)]
    }

    /// The arrow `(u, f)` ending at the total object `target`.
    pub fn arrow(&self, u: Arr, f: Arr, target: Obj) -> Arr {
        self.arrow_index[&(u, f, target)]
    }

    pub fn find_arrow(&self, u: Arr, f: Arr, target: Obj) -> Option<Arr> {
        self.arrow_index.get(&(u, f, target)).copied()
    }

    /// The canonical cartesian lift `(id, f): (C(f)x, src f) -> (x, tgt f)`.
    pub fn lift(&self, x: Obj, f: Arr) -> Arr {
        let ix = &self.indexed;
        let base = ix.base();
        let y = ix.restriction(f).obj(x);
        let id = ix.fiber(base.src(f)).identity(y);
        self.arrow(id, f, self.object(x, base.tgt(f)))
    }
}

/// A functor into a base category together with its cartesian arrows and,
/// optionally, a Giraud topology on the total category.
#[derive(Clone, Debug)]
pub struct FibrationBundle {
    total: Arc<FinCategory>,
    projection: FinFunctor,
    cartesian: FixedBitSet,
    giraud: Option<Topology>,
    coords: Option<Arc<Coordinates>>,
}

impl FibrationBundle {
    /// Wraps an arbitrary functor, computing its cartesian arrows by search.
    pub fn new(projection: FinFunctor) -> Self {
        let total = projection.source().clone();
        let mut cartesian = FixedBitSet::with_capacity(total.arrow_count());
        for a in total.arrows() {
            if is_cartesian_search(&projection, a) {
                cartesian.insert(a.0);
            }
        }
        FibrationBundle {
            total,
            projection,
            cartesian,
            giraud: None,
            coords: None,
        }
    }

    pub fn total(&self) -> &Arc<FinCategory> {
        &self.total
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        self.projection.target()
    }

    pub fn projection(&self) -> &FinFunctor {
        &self.projection
    }

    pub fn coordinates(&self) -> Option<&Coordinates> {
        self.coords.as_deref()
    }

    pub fn giraud(&self) -> Option<&Topology> {
        self.giraud.as_ref()
    }

    /// Cached result of [`is_cartesian_arrow`].
    pub fn is_cartesian(&self, a: Arr) -> bool {
        self.cartesian.contains(a.0)
    }

    pub fn cartesian_arrows(&self) -> Vec<Arr> {
        self.cartesian.ones().map(Arr).collect()
    }

    /// Computes and stores the Giraud topology for `j`.
    pub fn with_giraud(mut self, j: &Topology) -> Result<Self> {
        self.giraud = Some(giraud_for_bundle(&self, j)?);
        Ok(self)
    }
}

/// The Grothendieck construction: objects `(x, c)`, arrows `(u, f)` with
/// `u: x -> C(f)(x')`, composed as `(u', f') . (u, f) = (C(f)(u') . u, f' . f)`.
pub fn grothendieck(ix: &IndexedCategory) -> Result<FibrationBundle> {
    grothendieck_with_caps(ix, Caps::default())
}

pub fn grothendieck_with_caps(ix: &IndexedCategory, caps: Caps) -> Result<FibrationBundle> {
    let base = ix.base();
    let mut objects = Vec::new();
    let mut object_index = HashMap::new();
    let mut names = Vec::new();
    for c in base.objects() {
        let fib = ix.fiber(c);
        for x in fib.objects() {
            object_index.insert((x, c), Obj(objects.len()));
            objects.push((x, c));
            names.push(format!("({},{})", fib.object_name(x), base.object_name(c)));
        }
    }
    if objects.len() > caps.max_objects {
        return Err(Error::TooLarge {
            what: "objects",
            found: objects.len(),
            cap: caps.max_objects,
        });
    }
    let mut arrows = Vec::new();
    let mut infos = Vec::new();
    let mut arrow_index = HashMap::new();
    for (si, &(x, c)) in objects.iter().enumerate() {
        for &f in base.arrows_from(c) {
            let c2 = base.tgt(f);
            let r = ix.restriction(f);
            let fib = ix.fiber(c);
            let targets: Vec<Obj> = ix.fiber(c2).objects().collect();
            for &x2 in &targets {
                let ambiguous = targets.iter().filter(|&&y| r.obj(y) == r.obj(x2)).count() > 1;
                for &u in fib.hom(x, r.obj(x2)) {
                    let ti = object_index[&(x2, c2)];
                    let mut name = format!("({},{})", fib.arrow_name(u), base.arrow_name(f));
                    if ambiguous {
                        name = format!("{name}->{}", names[ti.0]);
                    }
                    arrow_index.insert((u, f, ti), Arr(arrows.len()));
                    arrows.push((u, f));
                    infos.push(ArrowInfo {
                        name,
                        src: Obj(si),
                        tgt: ti,
                    });
                }
            }
        }
        if arrows.len() > caps.max_arrows {
            return Err(Error::TooLarge {
                what: "arrows",
                found: arrows.len(),
                cap: caps.max_arrows,
            });
        }
    }
    let identities = objects
        .iter()
        .enumerate()
        .map(|(i, &(x, c))| arrow_index[&(ix.fiber(c).identity(x), base.identity(c), Obj(i))])
        .collect();
    let total = Arc::new(FinCategory::generate(caps, names, infos.clone(), identities, |g, f| {
        let (u, f1) = arrows[f.0];
        let (u2, f2) = arrows[g.0];
        let c = base.src(f1);
        let u = ix.fiber(c).comp(ix.restriction(f1).arr(u2), u);
        arrow_index[&(u, base.comp(f2, f1), infos[g.0].tgt)]
    })?);
    let projection = FinFunctor::new_unchecked(
        total.clone(),
        base.clone(),
        objects.iter().map(|o| o.1).collect(),
        arrows.iter().map(|a| a.1).collect(),
    );
    let mut cartesian = FixedBitSet::with_capacity(total.arrow_count());
    for (i, &(u, f)) in arrows.iter().enumerate() {
        if ix.fiber(base.src(f)).is_iso(u) {
            cartesian.insert(i);
        }
    }
    Ok(FibrationBundle {
        total,
        projection,
        cartesian,
        giraud: None,
        coords: Some(Arc::new(Coordinates {
            indexed: ix.clone(),
            objects,
            arrows,
            object_index,
            arrow_index,
        })),
    })
}

/// The functor `(x, c) |-> (alpha_c x, c)`, `(u, f) |-> (alpha_c u, f)`
/// between Grothendieck constructions over one base, for a family `alpha`
/// of fiber functors commuting strictly with restriction.
pub fn grothendieck_functor(src: &FibrationBundle, tgt: &FibrationBundle, alpha: &[FinFunctor]) -> Result<FinFunctor> {
    let (sc, tc) = match (src.coordinates(), tgt.coordinates()) {
        (Some(s), Some(t)) => (s, t),
        _ => return Err(Error::Mismatch("both bundles must be Grothendieck constructions".into())),
    };
    let (si, ti) = (&sc.indexed, &tc.indexed);
    let base = si.base();
    if !same_category(base, ti.base()) {
        return Err(Error::Mismatch("indexed categories over different bases".into()));
    }
    if alpha.len() != base.object_count() {
        return Err(Error::Indexed("one fiber functor per base object is required".into()));
    }
    for c in base.objects() {
        if !same_category(alpha[c.0].source(), si.fiber(c)) || !same_category(alpha[c.0].target(), ti.fiber(c)) {
            return Err(Error::Mismatch(format!("fiber functor at `{}` has the wrong fibers", base.object_name(c))));
        }
    }
    for f in base.arrows() {
        let (d, e) = (base.src(f), base.tgt(f));
        let one = si.restriction(f).then(&alpha[d.0])?;
        let two = alpha[e.0].then(ti.restriction(f))?;
        if one.object_map() != two.object_map() || one.arrow_map() != two.arrow_map() {
            return Err(Error::Indexed(format!(
                "fiber functors do not commute with restriction along `{}`",
                base.arrow_name(f)
            )));
        }
    }
    let on_objects: Vec<Obj> = sc.objects.iter().map(|&(x, c)| tc.object(alpha[c.0].obj(x), c)).collect();
    let on_arrows = src
        .total()
        .arrows()
        .map(|a| {
            let (u, f) = sc.arrows[a.0];
            tc.arrow(alpha[base.src(f).0].arr(u), f, on_objects[src.total().tgt(a).0])
        })
        .collect();
    FinFunctor::new(src.total().clone(), tgt.total().clone(), on_objects, on_arrows)
}

/// Exhaustive unique-factorization check: for every `g: d'' -> d` and every
/// `h: p d'' -> p d'` with `p(f) h = p(g)` there is exactly one `h'` over `h`
/// with `f h' = g`.
pub fn is_cartesian_search(p: &FinFunctor, f: Arr) -> bool {
    let (total, base) = (p.source(), p.target());
    let (d1, d) = (total.src(f), total.tgt(f));
    let pf = p.arr(f);
    for d2 in total.objects() {
        for &g in total.hom(d2, d) {
            for &h in base.hom(p.obj(d2), p.obj(d1)) {
                if base.comp(pf, h) != p.arr(g) {
                    continue;
                }
                let count = total
                    .hom(d2, d1)
                    .iter()
                    .filter(|&&h2| p.arr(h2) == h && total.comp(f, h2) == g)
                    .count();
                if count != 1 {
                    return false;
                }
            }
        }
    }
    true
}

/// Whether `f` is cartesian for the bundle's projection. Cartesianness of a
/// single arrow does not depend on the cleavage mode.
pub fn is_cartesian_arrow(b: &FibrationBundle, f: Arr) -> bool {
    is_cartesian_search(&b.projection, f)
}

/// A base arrow into `p(object)` with no cartesian lift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MissingLift {
    pub object: Obj,
    pub arrow: Arr,
}

/// Every base arrow `f: c -> p(d)` has a cartesian lift ending at `d`.
pub fn is_fibration(b: &FibrationBundle, mode: CartesianMode) -> std::result::Result<(), MissingLift> {
    let (total, base, p) = (&b.total, b.base(), &b.projection);
    for d in total.objects() {
        for &f in base.arrows_into(p.obj(d)) {
            let found = total.arrows_into(d).iter().any(|&a| {
                b.is_cartesian(a)
                    && match mode {
                        CartesianMode::Strict => p.arr(a) == f,
                        CartesianMode::Street => {
                            let c = base.src(f);
                            base.hom(p.obj(total.src(a)), c)
                                .iter()
                                .any(|&s| base.is_iso(s) && base.comp(f, s) == p.arr(a))
                        }
                    }
            });
            if !found {
                return Err(MissingLift { object: d, arrow: f });
            }
        }
    }
    Ok(())
}

/// Whether `A` (over `B`) is a morphism of fibrations: the square commutes
/// up to the given natural isomorphism and `A` preserves cartesian arrows.
pub fn is_morphism_of_fibrations(
    a: &FinFunctor,
    b: &FinFunctor,
    src: &FibrationBundle,
    tgt: &FibrationBundle,
    square: &NatTransform,
) -> Result<bool> {
    if !same_category(a.source(), &src.total) || !same_category(a.target(), &tgt.total) {
        return Err(Error::Mismatch("A must go between the total categories".into()));
    }
    if !same_category(b.source(), src.base()) || !same_category(b.target(), tgt.base()) {
        return Err(Error::Mismatch("B must go between the bases".into()));
    }
    let upper = a.then(&tgt.projection)?;
    let lower = src.projection.then(b)?;
    let forward = *square.source() == upper && *square.target() == lower;
    let backward = *square.source() == lower && *square.target() == upper;
    if !forward && !backward {
        return Err(Error::Mismatch("square transformation has the wrong endpoints".into()));
    }
    if !square.is_iso() {
        return Ok(false);
    }
    Ok(src.cartesian_arrows().into_iter().all(|f| tgt.is_cartesian(a.arr(f))))
}

/// The fiber over `c`: objects over `c` and arrows projecting to `id_c`.
pub fn fiber_of(b: &FibrationBundle, c: Obj) -> Result<(Arc<FinCategory>, FinFunctor)> {
    let (total, base, p) = (&b.total, b.base(), &b.projection);
    let objs: Vec<Obj> = total.objects().filter(|&o| p.obj(o) == c).collect();
    let arrs: Vec<Arr> = total
        .arrows()
        .filter(|&a| p.arr(a) == base.identity(c) && p.obj(total.src(a)) == c)
        .collect();
    let mut builder = CategoryBuilder::new();
    let mut obj_of = HashMap::new();
    for &o in &objs {
        obj_of.insert(o, builder.bare_object(total.object_name(o))?);
    }
    let mut arr_of = HashMap::new();
    for &a in &arrs {
        arr_of.insert(a, builder.arrow(total.arrow_name(a), obj_of[&total.src(a)], obj_of[&total.tgt(a)])?);
    }
    for &o in &objs {
        builder.set_identity(obj_of[&o], arr_of[&total.identity(o)])?;
    }
    for &f in &arrs {
        for &g in total.arrows_from(total.tgt(f)) {
            if let Some(&gi) = arr_of.get(&g) {
                builder.composite(gi, arr_of[&f], arr_of[&total.comp(g, f)])?;
            }
        }
    }
    let fiber = Arc::new(builder.build()?);
    let inc = FinFunctor::new_unchecked(fiber.clone(), total.clone(), objs, arrs);
    Ok((fiber, inc))
}

/// The functor `A_c` between fibers induced by `A` over `B`; the square must
/// commute strictly.
pub fn fiber_functor(
    a: &FinFunctor,
    b: &FinFunctor,
    src: &FibrationBundle,
    tgt: &FibrationBundle,
    c: Obj,
) -> Result<FinFunctor> {
    let upper = a.then(&tgt.projection)?;
    let lower = src.projection.then(b)?;
    if upper.object_map() != lower.object_map() || upper.arrow_map() != lower.arrow_map() {
        return Err(Error::Mismatch("the square does not commute strictly".into()));
    }
    let (sf, sinc) = fiber_of(src, c)?;
    let (tf, tinc) = fiber_of(tgt, b.obj(c))?;
    let on_objects = sf
        .objects()
        .map(|x| {
            let y = a.obj(sinc.obj(x));
            Obj(tinc.object_map().iter().position(|&o| o == y).unwrap())
        })
        .collect();
    let on_arrows = sf
        .arrows()
        .map(|u| {
            let v = a.arr(sinc.arr(u));
            Arr(tinc.arrow_map().iter().position(|&x| x == v).unwrap())
        })
        .collect();
    FinFunctor::new(sf, tf, on_objects, on_arrows)
}

fn giraud_for_bundle(b: &FibrationBundle, j: &Topology) -> Result<Topology> {
    if !same_category(j.base(), b.base()) {
        return Err(Error::Mismatch("topology does not live on the base".into()));
    }
    let (total, base, p) = (&b.total, b.base(), &b.projection);
    let mut cov = Coverage::new(total);
    for d in total.objects() {
        let mut family = Vec::new();
        for f in j.minimal_cover(p.obj(d)).arrows() {
            let lift = total
                .arrows_into(d)
                .iter()
                .copied()
                .filter(|&a| b.is_cartesian(a))
                .find(|&a| {
                    let pa = p.arr(a);
                    pa == f
                        || base
                            .hom(p.obj(total.src(a)), base.src(f))
                            .iter()
                            .any(|&s| base.is_iso(s) && base.comp(f, s) == pa)
                });
            match lift {
                Some(a) => family.push(a),
                None => {
                    return Err(Error::NotComputable(format!(
                        "no cartesian lift of `{}` at `{}`",
                        base.arrow_name(f),
                        total.object_name(d)
                    )))
                }
            }
        }
        cov.add(d, family)?;
    }
    Ok(saturate(&cov))
}

/// The Grothendieck construction of `ix` carrying the Giraud topology for `j`.
pub fn giraud_topology(ix: &IndexedCategory, j: &Topology) -> Result<FibrationBundle> {
    grothendieck(ix)?.with_giraud(j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::sieve::{generate_sieve, is_topology, sieve_lattice, CoverFamily};

    fn sier(w: &Arc<FinCategory>) -> Topology {
        let mut cov = Coverage::new(w);
        cov.add(Obj(1), vec![corpus::arrow(w, "u")]).unwrap();
        saturate(&cov)
    }

    /// Fiber `{y}` over `a`, discrete `{x0, x1}` over `b`, both restricting to `y`.
    fn twopoint() -> IndexedCategory {
        let w = corpus::walk2();
        let fa = Arc::new(FinCategory::discrete(&["y"]).unwrap());
        let fb = Arc::new(FinCategory::discrete(&["x0", "x1"]).unwrap());
        let r = FinFunctor::new(fb.clone(), fa.clone(), vec![Obj(0), Obj(0)], vec![fa.identity(Obj(0)); 2]).unwrap();
        IndexedCategory::new(
            w,
            vec![fa.clone(), fb.clone()],
            vec![FinFunctor::identity(&fa), FinFunctor::identity(&fb), r],
        )
        .unwrap()
    }

    /// Walk2-shaped fiber over a single base object.
    fn vertical() -> IndexedCategory {
        IndexedCategory::constant(&corpus::one(), &corpus::walk2())
    }

    #[test]
    fn constant_one_total_is_base() {
        let w = corpus::walk2();
        let b = grothendieck(&IndexedCategory::constant(&w, &corpus::one())).unwrap();
        assert_eq!(b.total().object_count(), 2);
        assert_eq!(b.total().arrow_count(), 3);
        assert!(is_fibration(&b, CartesianMode::Strict).is_ok());
        assert_eq!(b.cartesian_arrows().len(), 3);
    }

    #[test]
    fn twopoint_total() {
        let b = grothendieck(&twopoint()).unwrap();
        assert_eq!(b.total().object_count(), 3);
        assert_eq!(b.total().arrow_count(), 5);
        let non_identity: Vec<Arr> = b.total().arrows().filter(|&a| !b.total().is_identity(a)).collect();
        assert_eq!(non_identity.len(), 2);
        for a in non_identity {
            assert!(b.is_cartesian(a));
            assert!(is_cartesian_arrow(&b, a));
        }
    }

    #[test]
    fn vertical_non_iso_is_not_cartesian() {
        let b = grothendieck(&vertical()).unwrap();
        let u = b.total().arrow_named("(u,id_*)").unwrap();
        assert!(!b.is_cartesian(u));
        assert!(!is_cartesian_arrow(&b, u));
        for a in b.total().arrows().filter(|&a| b.total().is_identity(a)) {
            assert!(is_cartesian_arrow(&b, a));
        }
    }

    #[test]
    fn cartesian_iff_iso_on_corpus() {
        let bases = [corpus::walk2(), corpus::split_epi(), corpus::cospan()];
        for base in bases {
            for x in base.objects() {
                let ix = IndexedCategory::representable(&base, x).times(&corpus::walk2()).unwrap();
                let b = grothendieck(&ix).unwrap();
                let coords = b.coordinates().unwrap();
                for a in b.total().arrows() {
                    let (u, f) = coords.arrows[a.0];
                    let iso = ix.fiber(base.src(f)).is_iso(u);
                    assert_eq!(iso, is_cartesian_arrow(&b, a));
                }
                assert!(is_fibration(&b, CartesianMode::Strict).is_ok());
                assert!(is_fibration(&b, CartesianMode::Street).is_ok());
            }
        }
    }

    #[test]
    fn codomain_fibration_of_walk2() {
        use crate::fincat::comma_category;
        let w = corpus::walk2();
        let id = FinFunctor::identity(&w);
        let arrows = comma_category(&id, &id).unwrap();
        // Walk2 has pullbacks, so the codomain projection is a fibration
        let b = FibrationBundle::new(arrows.right_projection.clone());
        assert!(is_fibration(&b, CartesianMode::Strict).is_ok());
    }

    #[test]
    fn missing_lift_is_reported() {
        // the inclusion of {b} into Walk2 has no lift of u
        let w = corpus::walk2();
        let one = corpus::one();
        let pick_b = corpus::pick(&w, "b");
        let b = FibrationBundle::new(pick_b);
        let err = is_fibration(&b, CartesianMode::Street).unwrap_err();
        assert_eq!(err.arrow, corpus::arrow(&w, "u"));
        assert_eq!(one.object_count(), 1);
    }

    #[test]
    fn giraud_examples() {
        let w = corpus::walk2();
        let tp = twopoint();
        let trivial = giraud_topology(&tp, &Topology::trivial(&w)).unwrap();
        assert_eq!(*trivial.giraud().unwrap(), Topology::trivial(trivial.total()));

        let s = sier(&w);
        let g = giraud_topology(&tp, &s).unwrap();
        let total = g.total();
        let coords = g.coordinates().unwrap();
        let u = corpus::arrow(&w, "u");
        for x in tp.fiber(Obj(1)).objects() {
            let lift = coords.lift(x, u);
            let d = coords.object(x, Obj(1));
            let sv = generate_sieve(total, d, &[lift]).unwrap();
            assert!(g.giraud().unwrap().covers(&sv));
        }
    }

    #[test]
    fn giraud_is_the_lift_family_up_set() {
        let bases = [corpus::walk2(), corpus::split_epi(), corpus::cospan()];
        for base in bases {
            let ix = IndexedCategory::representable(&base, Obj(0)).times(&corpus::iso_pair()).unwrap();
            for j in crate::sieve::enumerate_topologies(&base, 50).topologies {
                let b = giraud_topology(&ix, &j).unwrap();
                let coords = b.coordinates().unwrap();
                let total = b.total();
                // covers declared directly: sieves containing the lifts of m_J(c)
                let covers: Vec<Vec<_>> = total
                    .objects()
                    .map(|d| {
                        let (x, c) = coords.objects[d.0];
                        let lifts: Vec<Arr> = j.minimal_cover(c).arrows().into_iter().map(|f| coords.lift(x, f)).collect();
                        let m = generate_sieve(total, d, &lifts).unwrap();
                        sieve_lattice(total, d).into_iter().filter(|s| m.is_subset(s)).collect()
                    })
                    .collect();
                let cand = CoverFamily::new(total, covers).unwrap();
                assert!(is_topology(&cand).is_ok());
                assert_eq!(Topology::from_cover_family(&cand).unwrap(), *b.giraud().unwrap());
            }
        }
    }

    #[test]
    fn constant_fibers_giraud_is_transported() {
        let w = corpus::walk2();
        let s = sier(&w);
        let b = giraud_topology(&IndexedCategory::constant(&w, &corpus::one()), &s).unwrap();
        let iso = b.projection().clone();
        assert_eq!(b.giraud().unwrap().transport(&iso).unwrap(), s);
    }

    #[test]
    fn morphisms_and_fiber_functors() {
        let tp = twopoint();
        let b = grothendieck(&tp).unwrap();
        let id = FinFunctor::identity(b.total());
        let base_id = FinFunctor::identity(b.base());
        let sq = NatTransform::identity(b.projection());
        assert!(is_morphism_of_fibrations(&id, &base_id, &b, &b, &sq).unwrap());
        assert!(fiber_functor(&id, &base_id, &b, &b, Obj(1)).unwrap().is_identity());

        // collapsing the Walk2 fiber onto one object keeps cartesian arrows
        let v = grothendieck(&vertical()).unwrap();
        let collapse = FinFunctor::constant(v.total(), v.total(), Obj(0));
        let sq = NatTransform::identity(v.projection());
        let base_id = FinFunctor::identity(v.base());
        assert!(is_morphism_of_fibrations(&collapse, &base_id, &v, &v, &sq).unwrap());
        let ff = fiber_functor(&collapse, &base_id, &v, &v, Obj(0)).unwrap();
        assert!(ff.object_map().iter().all(|&o| o == Obj(0)));

        // the diagonal of Walk2 into constant Walk2 fibers sends u to a
        // non-invertible vertical part
        let w = corpus::walk2();
        let src = grothendieck(&IndexedCategory::constant(&w, &corpus::one())).unwrap();
        let tgt = grothendieck(&IndexedCategory::constant(&w, &w)).unwrap();
        let t = tgt.total();
        let on_objects = vec![t.object_named("(a,a)").unwrap(), t.object_named("(b,b)").unwrap()];
        let on_arrows = src
            .total()
            .arrows()
            .map(|x| match src.total().arrow_name(x) {
                "(id_*,id_a)" => t.arrow_named("(id_a,id_a)").unwrap(),
                "(id_*,id_b)" => t.arrow_named("(id_b,id_b)").unwrap(),
                _ => t.arrow_named("(u,u)").unwrap(),
            })
            .collect();
        let diag = FinFunctor::new(src.total().clone(), t.clone(), on_objects, on_arrows).unwrap();
        let base_id = FinFunctor::identity(&w);
        let sq = NatTransform::identity(&diag.then(tgt.projection()).unwrap());
        assert!(!is_morphism_of_fibrations(&diag, &base_id, &src, &tgt, &sq).unwrap());
    }

    #[test]
    fn fiberwise_injection_is_a_morphism_of_fibrations() {
        let tp = twopoint();
        let w = tp.base().clone();
        let both = tp.sum(&IndexedCategory::constant(&w, &corpus::one())).unwrap();
        let (src, tgt) = (grothendieck(&tp).unwrap(), grothendieck(&both).unwrap());
        let alpha: Vec<FinFunctor> = w
            .objects()
            .map(|c| {
                let (f, g) = (tp.fiber(c), both.fiber(c));
                FinFunctor::new(f.clone(), g.clone(), f.objects().collect(), f.arrows().collect()).unwrap()
            })
            .collect();
        let a = grothendieck_functor(&src, &tgt, &alpha).unwrap();
        assert_eq!(a.target().object_count(), 5);
        let sq = NatTransform::identity(&a.then(tgt.projection()).unwrap());
        assert!(is_morphism_of_fibrations(&a, &FinFunctor::identity(&w), &src, &tgt, &sq).unwrap());
        assert!(grothendieck_functor(&src, &tgt, &alpha[..1]).is_err());
    }
}
