use std::sync::Arc;

use super::{grothendieck, is_cartesian_search, FibrationBundle, IndexedCategory};
use crate::error::{Error, Result};
use crate::fincat::{find_natural_iso, same_category, Adjunction, Arr, FinCategory, FinFunctor, NatTransform, Obj};

/// The pullback of a fibration along a base functor.
#[derive(Clone, Debug)]
pub struct DirectImage {
    /// `D . F^op` over the source of `F`.
    pub indexed: IndexedCategory,
    /// Total category of the pulled-back fibration.
    pub source: FibrationBundle,
    /// Total category of the original fibration.
    pub target: FibrationBundle,
    /// The projection `(x, c) |-> (x, F c)`.
    pub q: FinFunctor,
}

/// Pulls `dix` back along `f`, building both Grothendieck constructions.
pub fn direct_image(dix: &IndexedCategory, f: &FinFunctor) -> Result<DirectImage> {
    let target = grothendieck(dix)?;
    direct_image_onto(&target, f)
}

/// As [`direct_image`], reusing an already built Grothendieck construction.
pub fn direct_image_onto(target: &FibrationBundle, f: &FinFunctor) -> Result<DirectImage> {
    let tc = target
        .coordinates()
        .ok_or_else(|| Error::Mismatch("direct image needs a Grothendieck construction".into()))?;
    let indexed = tc.indexed.precompose(f)?;
    let source = grothendieck(&indexed)?;
    let sc = source.coordinates().unwrap();
    let on_objects = sc.objects.iter().map(|&(x, c)| tc.object(x, f.obj(c))).collect::<Vec<_>>();
    let on_arrows = source
        .total()
        .arrows()
        .map(|a| {
            let (u, g) = sc.arrows[a.0];
            tc.arrow(u, f.arr(g), on_objects[source.total().tgt(a).0])
        })
        .collect();
    let q = FinFunctor::new_unchecked(source.total().clone(), target.total().clone(), on_objects, on_arrows);
    Ok(DirectImage {
        indexed,
        source,
        target: target.clone(),
        q,
    })
}

/// Every arrow of the pulled-back total category is cartesian exactly when
/// its image under `q` is; both sides are decided by the universal-property
/// search. Returns the first arrow where they disagree.
pub fn q_reflects_cartesian(di: &DirectImage) -> std::result::Result<(), Arr> {
    let (sp, tp) = (di.source.projection(), di.target.projection());
    for a in di.source.total().arrows() {
        if is_cartesian_search(sp, a) != is_cartesian_search(tp, di.q.arr(a)) {
            return Err(a);
        }
    }
    Ok(())
}

/// Inverse image of a fibration along the right adjoint `F` of `p ⊣ F`,
/// computed as the pullback along `p`, with its comparison adjunction.
#[derive(Clone, Debug)]
pub struct InverseImage {
    /// `C . p^op`, indexed over the source of `p`.
    pub indexed: IndexedCategory,
    /// Grothendieck construction of `indexed`.
    pub bundle: FibrationBundle,
    /// Grothendieck construction of the original indexed category.
    pub original: FibrationBundle,
    /// `(x, d) |-> (x, p d)`.
    pub q: FinFunctor,
    /// `(x, c) |-> (C(counit_c)(x), F c)`.
    pub comparison: FinFunctor,
    /// `q ⊣ comparison`.
    pub adjunction: Adjunction,
}

/// `adj` is `p ⊣ F` with `p: D -> C` (the left adjoint) and `F: C -> D`;
/// `cix` is indexed over `C`.
pub fn inverse_image_adjoint(cix: &IndexedCategory, adj: &Adjunction) -> Result<InverseImage> {
    let p = adj.left();
    let f = adj.right();
    if !same_category(p.target(), cix.base()) {
        return Err(Error::Adjunction("the left adjoint must land in the base".into()));
    }
    let original = grothendieck(cix)?;
    let di = direct_image_onto(&original, p)?;
    let (gc, gp) = (original.coordinates().unwrap(), di.source.coordinates().unwrap());
    let (tc, tp) = (original.total(), di.source.total());
    let c = cix.base();
    let counit = adj.counit();
    let unit = adj.unit();

    // comparison L
    let on_objects: Vec<Obj> = gc
        .objects
        .iter()
        .map(|&(x, cc)| gp.object(cix.restriction(counit.component(cc)).obj(x), f.obj(cc)))
        .collect();
    let on_arrows = tc
        .arrows()
        .map(|a| {
            let (u, g) = gc.arrows[a.0];
            let cc = c.src(g);
            let v = cix.restriction(counit.component(cc)).arr(u);
            gp.arrow(v, f.arr(g), on_objects[tc.tgt(a).0])
        })
        .collect();
    let comparison = FinFunctor::new(tc.clone(), tp.clone(), on_objects, on_arrows)?;

    // unit (id, unit_d) and counit (id, counit_c)
    let lq = di.q.then(&comparison)?;
    let unit_components = gp
        .objects
        .iter()
        .enumerate()
        .map(|(i, &(x, d))| {
            let fiber = cix.fiber(p.obj(d));
            gp.arrow(fiber.identity(x), unit.component(d), lq.obj(Obj(i)))
        })
        .collect();
    let ql = comparison.then(&di.q)?;
    let counit_components = gc
        .objects
        .iter()
        .enumerate()
        .map(|(i, &(x, cc))| {
            let eps = counit.component(cc);
            let y = cix.restriction(eps).obj(x);
            gc.arrow(cix.fiber(c.src(eps)).identity(y), eps, Obj(i))
        })
        .collect();
    let unit_nt = NatTransform::new(FinFunctor::identity(tp), lq, unit_components)?;
    let counit_nt = NatTransform::new(ql, FinFunctor::identity(tc), counit_components)?;
    let adjunction = Adjunction::new(di.q.clone(), comparison.clone(), unit_nt, counit_nt)?;
    Ok(InverseImage {
        indexed: di.indexed,
        bundle: di.source,
        original,
        q: di.q,
        comparison,
        adjunction,
    })
}

/// The two factors of the structure functor and their composite.
#[derive(Clone, Debug)]
pub struct StructureFunctor {
    /// `(x, c) |-> (C(counit_c)(x), c)` into the pullback of `C . p^op` along `F`.
    pub zeta: FinFunctor,
    /// Projection of that pullback onto `C . p^op`.
    pub q: FinFunctor,
    pub composite: FinFunctor,
    pub source: FibrationBundle,
    pub target: FibrationBundle,
}

/// `q . zeta` for the adjunction `p ⊣ F` (same conventions as
/// [`inverse_image_adjoint`]).
pub fn structure_functor(cix: &IndexedCategory, adj: &Adjunction) -> Result<StructureFunctor> {
    let p = adj.left();
    let f = adj.right();
    if !same_category(p.target(), cix.base()) {
        return Err(Error::Adjunction("the left adjoint must land in the base".into()));
    }
    let original = grothendieck(cix)?;
    let pulled = grothendieck(&cix.precompose(p)?)?;
    let back = direct_image_onto(&pulled, f)?;
    let (gc, gb) = (original.coordinates().unwrap(), back.source.coordinates().unwrap());
    let tc = original.total();
    let counit = adj.counit();
    let on_objects: Vec<Obj> = gc
        .objects
        .iter()
        .map(|&(x, cc)| gb.object(cix.restriction(counit.component(cc)).obj(x), cc))
        .collect();
    let on_arrows = tc
        .arrows()
        .map(|a| {
            let (u, g) = gc.arrows[a.0];
            let v = cix.restriction(counit.component(cix.base().src(g))).arr(u);
            gb.arrow(v, g, on_objects[tc.tgt(a).0])
        })
        .collect();
    let zeta = FinFunctor::new(tc.clone(), back.source.total().clone(), on_objects, on_arrows)?;
    let composite = zeta.then(&back.q)?;
    Ok(StructureFunctor {
        zeta,
        q: back.q,
        composite,
        source: original,
        target: pulled,
    })
}

/// The functor `[u] |-> [F u]` between Grothendieck constructions of the
/// representables at `c` and at `F c`.
pub fn slice_functor(f: &FinFunctor, c: Obj) -> Result<(FibrationBundle, FibrationBundle, FinFunctor)> {
    let (src_base, tgt_base) = (f.source(), f.target());
    let src = grothendieck(&IndexedCategory::representable(src_base, c))?;
    let tgt = grothendieck(&IndexedCategory::representable(tgt_base, f.obj(c)))?;
    let functor = slice_between(f, c, &src, &tgt)?;
    Ok((src, tgt, functor))
}

fn slice_between(f: &FinFunctor, c: Obj, src: &FibrationBundle, tgt: &FibrationBundle) -> Result<FinFunctor> {
    let (sc, tc) = (src.coordinates().unwrap(), tgt.coordinates().unwrap());
    let (src_base, tgt_base) = (f.source(), f.target());
    let sx = &sc.indexed;
    let tx = &tc.indexed;
    let image_of = |x: Obj, d: Obj| -> Obj {
        let u = src_base.arrow_named(sx.fiber(d).object_name(x)).unwrap();
        let fu = f.arr(u);
        let y = tx.fiber(f.obj(d)).object_named(tgt_base.arrow_name(fu)).unwrap();
        tc.object(y, f.obj(d))
    };
    let _ = c;
    let on_objects: Vec<Obj> = sc.objects.iter().map(|&(x, d)| image_of(x, d)).collect();
    let on_arrows = src
        .total()
        .arrows()
        .map(|a| {
            let (_, g) = sc.arrows[a.0];
            let (y, e) = tc.objects[on_objects[src.total().src(a).0].0];
            tc.arrow(tx.fiber(e).identity(y), f.arr(g), on_objects[src.total().tgt(a).0])
        })
        .collect();
    FinFunctor::new(src.total().clone(), tgt.total().clone(), on_objects, on_arrows)
}

/// The instances on which [`compose_base_change`] can be decided.
#[derive(Clone, Debug)]
pub enum BaseChangeCase {
    /// Pull `indexed` back along `second` and then `first`, versus along
    /// `second . first` in one step.
    Direct {
        indexed: IndexedCategory,
        first: FinFunctor,
        second: FinFunctor,
    },
    /// Inverse images along the right adjoints of `first = (p ⊣ F)` with
    /// `p: C' -> C`, then `second = (p' ⊣ F')` with `p': C'' -> C'`.
    Adjoint {
        indexed: IndexedCategory,
        first: Adjunction,
        second: Adjunction,
    },
    /// Slice functors of the representable at `object` along `first`, then
    /// `second`.
    Representable {
        first: FinFunctor,
        second: FinFunctor,
        object: Obj,
    },
}

/// What [`compose_base_change`] established.
#[derive(Clone, Debug)]
pub enum BaseChangeWitness {
    /// Both pullbacks have identical fibers and restrictions and the
    /// projections agree on the nose.
    TableExact,
    /// A natural isomorphism from the one-step comparison to the composite
    /// of the two comparisons.
    NaturalIso(NatTransform),
}

/// Compares the one-step base change with the composite of two steps.
pub fn compose_base_change(case: &BaseChangeCase) -> Result<BaseChangeWitness> {
    match case {
        BaseChangeCase::Direct {
            indexed,
            first,
            second,
        } => {
            let composite = first.then(second)?;
            let once = direct_image(indexed, &composite)?;
            let outer = direct_image(indexed, second)?;
            let twice = direct_image_onto(&outer.source, first)?;
            if once.indexed != twice.indexed {
                return Err(Error::NotComputable("fiber tables differ".into()));
            }
            let two_step = twice.q.then(&outer.q)?;
            if two_step.object_map() != once.q.object_map() || two_step.arrow_map() != once.q.arrow_map() {
                return Err(Error::NotComputable("projections differ".into()));
            }
            Ok(BaseChangeWitness::TableExact)
        }
        BaseChangeCase::Adjoint {
            indexed,
            first,
            second,
        } => {
            let composite = second.compose(first)?;
            let once = inverse_image_adjoint(indexed, &composite)?;
            let step1 = inverse_image_adjoint(indexed, first)?;
            let step2 = inverse_image_adjoint(&step1.indexed, second)?;
            let two_step = step1.comparison.then(&step2.comparison)?;
            natural_iso_between(&once.comparison, &two_step)
        }
        BaseChangeCase::Representable { first, second, object } => {
            let composite = first.then(second)?;
            let (src, tgt, once) = slice_functor(&composite, *object)?;
            let middle = grothendieck(&IndexedCategory::representable(first.target(), first.obj(*object)))?;
            let f1 = slice_between(first, *object, &src, &middle)?;
            let f2 = slice_between(second, first.obj(*object), &middle, &tgt)?;
            natural_iso_between(&once, &f1.then(&f2)?)
        }
    }
}

fn natural_iso_between(a: &FinFunctor, b: &FinFunctor) -> Result<BaseChangeWitness> {
    let b = b.retarget(a.source().clone(), a.target().clone())?;
    find_natural_iso(a, &b)
        .map(BaseChangeWitness::NaturalIso)
        .ok_or_else(|| Error::NotComputable("no natural isomorphism between the two composites".into()))
}

/// Builds `G ⊣ F` between posets from the monotone map `F` when it has a
/// left adjoint, by computing `G(d) = min { c : d <= F c }`.
pub fn galois_left_adjoint(f: &FinFunctor) -> Option<Adjunction> {
    let (c, d) = (f.source(), f.target());
    if !c.is_poset() || !d.is_poset() {
        return None;
    }
    let mut g_obj = Vec::with_capacity(d.object_count());
    for y in d.objects() {
        let candidates: Vec<Obj> = c.objects().filter(|&x| d.leq(y, f.obj(x))).collect();
        let least = candidates.iter().copied().find(|&m| candidates.iter().all(|&x| c.leq(m, x)))?;
        g_obj.push(least);
    }
    let g_arr = d
        .arrows()
        .map(|a| c.hom(g_obj[d.src(a).0], g_obj[d.tgt(a).0]).first().copied())
        .collect::<Option<Vec<Arr>>>()?;
    let g = FinFunctor::new(d.clone(), c.clone(), g_obj, g_arr).ok()?;
    let fg = g.then(f).ok()?;
    let gf = f.then(&g).ok()?;
    let unit = d.objects().map(|y| d.hom(y, fg.obj(y))[0]).collect();
    let counit = c.objects().map(|x| c.hom(gf.obj(x), x)[0]).collect();
    let unit = NatTransform::new(FinFunctor::identity(d), fg, unit).ok()?;
    let counit = NatTransform::new(gf, FinFunctor::identity(c), counit).ok()?;
    Adjunction::new(g, f.clone(), unit, counit).ok()
}

/// Whether the two categories are the same up to structural equality.
pub fn same_total(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> bool {
    same_category(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::fibration::{fiber_functor, fiber_of, is_morphism_of_fibrations};
    use crate::fincat::is_equivalence;

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

    #[test]
    fn direct_image_along_identity() {
        let tp = twopoint();
        let di = direct_image(&tp, &FinFunctor::identity(tp.base())).unwrap();
        assert_eq!(di.indexed, tp);
        assert!(di.q.is_identity());
        assert!(q_reflects_cartesian(&di).is_ok());
    }

    #[test]
    fn direct_image_along_pick_b() {
        let tp = twopoint();
        let pick_b = corpus::pick(tp.base(), "b");
        let di = direct_image(&tp, &pick_b).unwrap();
        assert_eq!(di.indexed.fiber(Obj(0)).object_count(), 2);
        assert_eq!(di.source.total().object_count(), 2);
        assert!(q_reflects_cartesian(&di).is_ok());
        let sq = NatTransform::identity(&di.q.then(di.target.projection()).unwrap());
        assert!(is_morphism_of_fibrations(&di.q, &pick_b, &di.source, &di.target, &sq).unwrap());
        // q at the single object is an iso onto the fiber over b
        let qf = fiber_functor(&di.q, &pick_b, &di.source, &di.target, Obj(0)).unwrap();
        assert!(is_equivalence(&qf).holds());
        let (fb, _) = fiber_of(&di.target, Obj(1)).unwrap();
        assert_eq!(fb.object_count(), 2);
    }

    #[test]
    fn direct_image_along_bang_is_constant() {
        let w = corpus::walk2();
        let one = corpus::one();
        let ix = IndexedCategory::constant(&one, &corpus::iso_pair());
        let di = direct_image(&ix, &corpus::bang(&w)).unwrap();
        for c in w.objects() {
            assert!(Arc::ptr_eq(di.indexed.fiber(c), ix.fiber(Obj(0))));
        }
        assert!(q_reflects_cartesian(&di).is_ok());
    }

    #[test]
    fn inverse_image_identity() {
        let tp = twopoint();
        let adj = Adjunction::identity(tp.base());
        let ii = inverse_image_adjoint(&tp, &adj).unwrap();
        assert!(ii.q.is_identity());
        assert!(ii.comparison.is_identity());
    }

    fn bang_pick_b() -> (Arc<FinCategory>, Adjunction) {
        let w = corpus::walk2();
        let bang = corpus::bang(&w);
        let pick_b = corpus::pick(&w, "b");
        let u = corpus::arrow(&w, "u");
        let b = w.object_named("b").unwrap();
        let unit = NatTransform::new(FinFunctor::identity(&w), bang.then(&pick_b).unwrap(), vec![u, w.identity(b)])
            .unwrap();
        let one = corpus::one();
        let counit = NatTransform::identity(&FinFunctor::identity(&one));
        let counit = NatTransform::new(pick_b.then(&bang).unwrap(), FinFunctor::identity(&one), counit.components().to_vec())
            .unwrap();
        (w.clone(), Adjunction::new(bang, pick_b, unit, counit).unwrap())
    }

    #[test]
    fn inverse_image_along_pick_b_is_constant() {
        let (w, adj) = bang_pick_b();
        let a = corpus::iso_pair();
        let ix = IndexedCategory::constant(&corpus::one(), &a);
        let ii = inverse_image_adjoint(&ix, &adj).unwrap();
        assert_eq!(ii.indexed, IndexedCategory::constant(&w, &a));
        let s = structure_functor(&ix, &adj).unwrap();
        assert_eq!(s.composite.retarget(s.composite.source().clone(), ii.comparison.target().clone()).unwrap(), ii.comparison);
    }

    #[test]
    fn representable_comparisons_are_slice_functors() {
        // the poset a <= b <= c with F = identity-free inclusion via a Galois pair
        let chain = Arc::new(FinCategory::poset(&["a", "b", "c"], |i, j| i <= j).unwrap());
        let two = Arc::new(FinCategory::poset(&["0", "1"], |i, j| i <= j).unwrap());
        // F: chain -> two collapsing a, b to 0
        let f_obj = vec![Obj(0), Obj(0), Obj(1)];
        let f_arr = chain
            .arrows()
            .map(|x| two.hom(f_obj[chain.src(x).0], f_obj[chain.tgt(x).0])[0])
            .collect();
        let f = FinFunctor::new(chain.clone(), two.clone(), f_obj, f_arr).unwrap();
        let adj = galois_left_adjoint(&f).unwrap();
        for c in chain.objects() {
            let ix = IndexedCategory::representable(&chain, c);
            let ii = inverse_image_adjoint(&ix, &adj).unwrap();
            let (_, _, slice) = slice_functor(&f, c).unwrap();
            // C . p^op at d is hom(p d, c); the comparison matches [u] |-> [F u]
            // up to the identification of hom(p d, c) with hom(d, F c)
            assert_eq!(ii.comparison.source().object_count(), slice.source().object_count());
            assert_eq!(
                ii.comparison.target().object_count(),
                slice.target().object_count(),
                "both land over two with fibers in bijection"
            );
        }
    }

    #[test]
    fn base_change_compositions() {
        let w = corpus::walk2();
        let one = corpus::one();
        let tp = twopoint();
        // direct images along Walk2 -> One -> One
        let ix = IndexedCategory::constant(&one, &corpus::iso_pair());
        let case = BaseChangeCase::Direct {
            indexed: ix,
            first: corpus::bang(&w),
            second: FinFunctor::identity(&one),
        };
        assert!(matches!(compose_base_change(&case).unwrap(), BaseChangeWitness::TableExact));
        let id = Adjunction::identity(tp.base());
        let case = BaseChangeCase::Adjoint {
            indexed: tp.clone(),
            first: id.clone(),
            second: id,
        };
        match compose_base_change(&case).unwrap() {
            BaseChangeWitness::NaturalIso(nt) => assert!(nt.is_iso()),
            _ => panic!(),
        }
        let chain = Arc::new(FinCategory::poset(&["a", "b", "c"], |i, j| i <= j).unwrap());
        let two = Arc::new(FinCategory::poset(&["0", "1"], |i, j| i <= j).unwrap());
        let f_obj = vec![Obj(0), Obj(0), Obj(1)];
        let f_arr = chain
            .arrows()
            .map(|x| two.hom(f_obj[chain.src(x).0], f_obj[chain.tgt(x).0])[0])
            .collect();
        let f = FinFunctor::new(chain.clone(), two.clone(), f_obj, f_arr).unwrap();
        let g = corpus::bang(&two);
        for c in chain.objects() {
            let case = BaseChangeCase::Representable {
                first: f.clone(),
                second: g.clone(),
                object: c,
            };
            assert!(matches!(compose_base_change(&case).unwrap(), BaseChangeWitness::NaturalIso(_)));
        }
    }
}
