use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{full_subcategory, same_category, Arr, CategoryBuilder, FinCategory, FinFunctor, Obj};

/// A strict functor from the opposite of `base` into finite categories.
///
/// `restriction(f)` for `f: c -> c'` goes from `fiber(c')` to `fiber(c)`.
#[derive(Clone, Debug)]
pub struct IndexedCategory {
    base: Arc<FinCategory>,
    fibers: Vec<Arc<FinCategory>>,
    restrictions: Vec<FinFunctor>,
}

impl PartialEq for IndexedCategory {
    fn eq(&self, other: &Self) -> bool {
        same_category(&self.base, &other.base)
            && self.fibers.len() == other.fibers.len()
            && self.fibers.iter().zip(&other.fibers).all(|(a, b)| same_category(a, b))
            && self.restrictions == other.restrictions
    }
}

impl IndexedCategory {
    /// Checks endpoints, strict identities and strict composites.
    pub fn new(base: Arc<FinCategory>, fibers: Vec<Arc<FinCategory>>, restrictions: Vec<FinFunctor>) -> Result<Self> {
        if fibers.len() != base.object_count() {
            return Err(Error::Indexed(format!(
                "{} fibers for {} base objects",
                fibers.len(),
                base.object_count()
            )));
        }
        if restrictions.len() != base.arrow_count() {
            return Err(Error::Indexed(format!(
                "{} restrictions for {} base arrows",
                restrictions.len(),
                base.arrow_count()
            )));
        }
        for f in base.arrows() {
            let r = &restrictions[f.0];
            if !same_category(r.source(), &fibers[base.tgt(f).0]) || !same_category(r.target(), &fibers[base.src(f).0]) {
                return Err(Error::Indexed(format!(
                    "restriction along `{}` has the wrong fibers",
                    base.arrow_name(f)
                )));
            }
        }
        for c in base.objects() {
            if !restrictions[base.identity(c).0].is_identity() {
                return Err(Error::Indexed(format!(
                    "restriction along `{}` is not the identity",
                    base.arrow_name(base.identity(c))
                )));
            }
        }
        for f in base.arrows() {
            for &g in base.arrows_from(base.tgt(f)) {
                let composite = &restrictions[base.comp(g, f).0];
                let pasted = restrictions[g.0].then(&restrictions[f.0])?;
                if pasted.object_map() != composite.object_map() || pasted.arrow_map() != composite.arrow_map() {
                    return Err(Error::Indexed(format!(
                        "restriction along ({} after {}) differs from the pasted restrictions",
                        base.arrow_name(g),
                        base.arrow_name(f)
                    )));
                }
            }
        }
        // share one Arc per fiber so later identity checks are pointer comparisons
        let restrictions = base
            .arrows()
            .map(|f| restrictions[f.0].retarget(fibers[base.tgt(f).0].clone(), fibers[base.src(f).0].clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(IndexedCategory {
            base,
            fibers,
            restrictions,
        })
    }

    pub(crate) fn new_unchecked(
        base: Arc<FinCategory>,
        fibers: Vec<Arc<FinCategory>>,
        restrictions: Vec<FinFunctor>,
    ) -> Self {
        if cfg!(debug_assertions) {
            Self::new(base, fibers, restrictions).expect("indexed category axioms")
        } else {
            IndexedCategory {
                base,
                fibers,
                restrictions,
            }
        }
    }

    /// Every fiber is `fiber` and every restriction the identity.
    pub fn constant(base: &Arc<FinCategory>, fiber: &Arc<FinCategory>) -> Self {
        let id = FinFunctor::identity(fiber);
        IndexedCategory {
            base: base.clone(),
            fibers: vec![fiber.clone(); base.object_count()],
            restrictions: vec![id; base.arrow_count()],
        }
    }

    /// The representable at `c`: fiber at `d` is the discrete category on
    /// `hom(d, c)`, restriction is precomposition.
    pub fn representable(base: &Arc<FinCategory>, c: Obj) -> Self {
        let fibers: Vec<Arc<FinCategory>> = base
            .objects()
            .map(|d| {
                let names: Vec<&str> = base.hom(d, c).iter().map(|&u| base.arrow_name(u)).collect();
                Arc::new(FinCategory::discrete(&names).expect("arrow names are distinct"))
            })
            .collect();
        let restrictions = base
            .arrows()
            .map(|f| {
                let (d, e) = (base.src(f), base.tgt(f));
                let (src, tgt) = (&fibers[e.0], &fibers[d.0]);
                let on_objects: Vec<Obj> = base
                    .hom(e, c)
                    .iter()
                    .map(|&u| tgt.object_named(base.arrow_name(base.comp(u, f))).unwrap())
                    .collect();
                let on_arrows = src.arrows().map(|a| tgt.identity(on_objects[src.src(a).0])).collect();
                FinFunctor::new_unchecked(src.clone(), tgt.clone(), on_objects, on_arrows)
            })
            .collect();
        IndexedCategory::new_unchecked(base.clone(), fibers, restrictions)
    }

    /// Fiberwise product with a fixed category `k`.
    pub fn times(&self, k: &Arc<FinCategory>) -> Result<Self> {
        let products: Vec<(Arc<FinCategory>, Vec<(Obj, Obj)>, Vec<(Arr, Arr)>)> =
            self.fibers.iter().map(|f| product_category(f, k)).collect::<Result<_>>()?;
        let restrictions = self
            .base
            .arrows()
            .map(|f| {
                let r = &self.restrictions[f.0];
                let (src, tgt) = (&products[self.base.tgt(f).0], &products[self.base.src(f).0]);
                let on_objects = src
                    .1
                    .iter()
                    .map(|&(x, y)| Obj(tgt.1.iter().position(|&p| p == (r.obj(x), y)).unwrap()))
                    .collect();
                let on_arrows = src
                    .2
                    .iter()
                    .map(|&(u, v)| Arr(tgt.2.iter().position(|&p| p == (r.arr(u), v)).unwrap()))
                    .collect();
                FinFunctor::new_unchecked(src.0.clone(), tgt.0.clone(), on_objects, on_arrows)
            })
            .collect();
        Ok(IndexedCategory::new_unchecked(
            self.base.clone(),
            products.into_iter().map(|p| p.0).collect(),
            restrictions,
        ))
    }

    /// The sub-indexed category on the chosen fiber objects, which must be
    /// stable under every restriction. Fibers are full subcategories.
    pub fn sub(&self, keep: &[Vec<Obj>]) -> Result<(IndexedCategory, Vec<FinFunctor>)> {
        if keep.len() != self.fibers.len() {
            return Err(Error::Indexed("one object list per fiber is required".into()));
        }
        let mut subs = Vec::new();
        for (c, objs) in keep.iter().enumerate() {
            subs.push(full_subcategory(&self.fibers[c], objs)?);
        }
        let mut restrictions = Vec::new();
        for f in self.base.arrows() {
            let (d, e) = (self.base.src(f), self.base.tgt(f));
            let r = &self.restrictions[f.0];
            let (src, src_inc) = &subs[e.0];
            let (tgt, tgt_inc) = &subs[d.0];
            let mut on_objects = Vec::new();
            for x in src.objects() {
                let y = r.obj(src_inc.obj(x));
                match tgt_inc.object_map().iter().position(|&o| o == y) {
                    Some(i) => on_objects.push(Obj(i)),
                    None => {
                        return Err(Error::Indexed(format!(
                            "chosen objects are not stable under restriction along `{}`",
                            self.base.arrow_name(f)
                        )))
                    }
                }
            }
            let on_arrows = src
                .arrows()
                .map(|a| {
                    let b = r.arr(src_inc.arr(a));
                    Arr(tgt_inc.arrow_map().iter().position(|&x| x == b).unwrap())
                })
                .collect();
            restrictions.push(FinFunctor::new(src.clone(), tgt.clone(), on_objects, on_arrows)?);
        }
        let fibers = subs.iter().map(|s| s.0.clone()).collect();
        let incs = subs.into_iter().map(|s| s.1).collect();
        Ok((IndexedCategory::new(self.base.clone(), fibers, restrictions)?, incs))
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn fiber(&self, c: Obj) -> &Arc<FinCategory> {
        &self.fibers[c.0]
    }

    pub fn fibers(&self) -> &[Arc<FinCategory>] {
        &self.fibers
    }

    pub fn restriction(&self, f: Arr) -> &FinFunctor {
        &self.restrictions[f.0]
    }

    pub fn restrictions(&self) -> &[FinFunctor] {
        &self.restrictions
    }

    /// `self . F^op` for `F: C -> base`.
    pub fn precompose(&self, f: &FinFunctor) -> Result<IndexedCategory> {
        if !same_category(f.target(), &self.base) {
            return Err(Error::Mismatch("functor does not land in the base".into()));
        }
        let c = f.source();
        let fibers = c.objects().map(|x| self.fibers[f.obj(x).0].clone()).collect();
        let restrictions = c.arrows().map(|a| self.restrictions[f.arr(a).0].clone()).collect();
        Ok(IndexedCategory {
            base: c.clone(),
            fibers,
            restrictions,
        })
    }

    /// Fiberwise disjoint union; the second summand's names get a `'` suffix.
    pub fn sum(&self, other: &IndexedCategory) -> Result<Self> {
        if !same_category(&self.base, &other.base) {
            return Err(Error::Mismatch("summands over different bases".into()));
        }
        let fibers: Vec<Arc<FinCategory>> = self
            .fibers
            .iter()
            .zip(&other.fibers)
            .map(|(a, b)| coproduct_category(a, b))
            .collect::<Result<_>>()?;
        let restrictions = self
            .base
            .arrows()
            .map(|f| {
                let (d, e) = (self.base.src(f), self.base.tgt(f));
                let (r1, r2) = (&self.restrictions[f.0], &other.restrictions[f.0]);
                let (n_src, n_tgt) = (self.fibers[e.0].object_count(), self.fibers[d.0].object_count());
                let (m_src, m_tgt) = (self.fibers[e.0].arrow_count(), self.fibers[d.0].arrow_count());
                let on_objects = fibers[e.0]
                    .objects()
                    .map(|x| if x.0 < n_src { r1.obj(x) } else { Obj(n_tgt + r2.obj(Obj(x.0 - n_src)).0) })
                    .collect();
                let on_arrows = fibers[e.0]
                    .arrows()
                    .map(|a| if a.0 < m_src { r1.arr(a) } else { Arr(m_tgt + r2.arr(Arr(a.0 - m_src)).0) })
                    .collect();
                FinFunctor::new_unchecked(fibers[e.0].clone(), fibers[d.0].clone(), on_objects, on_arrows)
            })
            .collect();
        Ok(IndexedCategory::new_unchecked(self.base.clone(), fibers, restrictions))
    }

    /// Total number of fiber objects.
    pub fn size(&self) -> usize {
        self.fibers.iter().map(|f| f.object_count()).sum()
    }
}

/// Disjoint union: objects and arrows of `a` first, then those of `b` with
/// a `'` appended to their names.
pub fn coproduct_category(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> Result<Arc<FinCategory>> {
    let mut builder = CategoryBuilder::new();
    for x in a.objects() {
        builder.bare_object(a.object_name(x))?;
    }
    for y in b.objects() {
        builder.bare_object(&format!("{}'", b.object_name(y)))?;
    }
    let (n, m) = (a.object_count(), a.arrow_count());
    for u in a.arrows() {
        builder.arrow(a.arrow_name(u), a.src(u), a.tgt(u))?;
    }
    for v in b.arrows() {
        builder.arrow(&format!("{}'", b.arrow_name(v)), Obj(n + b.src(v).0), Obj(n + b.tgt(v).0))?;
    }
    for x in a.objects() {
        builder.set_identity(x, a.identity(x))?;
    }
    for y in b.objects() {
        builder.set_identity(Obj(n + y.0), Arr(m + b.identity(y).0))?;
    }
    for f in a.arrows() {
        for &g in a.arrows_from(a.tgt(f)) {
            builder.composite(g, f, a.comp(g, f))?;
        }
    }
    for f in b.arrows() {
        for &g in b.arrows_from(b.tgt(f)) {
            builder.composite(Arr(m + g.0), Arr(m + f.0), Arr(m + b.comp(g, f).0))?;
        }
    }
    Ok(Arc::new(builder.build()?))
}

/// Product category with coordinate tables for objects and arrows.
pub fn product_category(
    a: &Arc<FinCategory>,
    b: &Arc<FinCategory>,
) -> Result<(Arc<FinCategory>, Vec<(Obj, Obj)>, Vec<(Arr, Arr)>)> {
    let mut builder = CategoryBuilder::new();
    let mut objs = Vec::new();
    for x in a.objects() {
        for y in b.objects() {
            builder.bare_object(&format!("{}.{}", a.object_name(x), b.object_name(y)))?;
            objs.push((x, y));
        }
    }
    let index = |x: Obj, y: Obj| Obj(x.0 * b.object_count() + y.0);
    let mut arrs = Vec::new();
    for u in a.arrows() {
        for v in b.arrows() {
            builder.arrow(
                &format!("{}.{}", a.arrow_name(u), b.arrow_name(v)),
                index(a.src(u), b.src(v)),
                index(a.tgt(u), b.tgt(v)),
            )?;
            arrs.push((u, v));
        }
    }
    let arr_index = |u: Arr, v: Arr| Arr(u.0 * b.arrow_count() + v.0);
    for x in a.objects() {
        for y in b.objects() {
            builder.set_identity(index(x, y), arr_index(a.identity(x), b.identity(y)))?;
        }
    }
    for (i, &(u, v)) in arrs.iter().enumerate() {
        for &u2 in a.arrows_from(a.tgt(u)) {
            for &v2 in b.arrows_from(b.tgt(v)) {
                builder.composite(arr_index(u2, v2), Arr(i), arr_index(a.comp(u2, u), b.comp(v2, v)))?;
            }
        }
    }
    Ok((Arc::new(builder.build()?), objs, arrs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn broken_functoriality_is_rejected() {
        let w = corpus::walk2();
        let z2 = corpus::z2_group();
        let id = FinFunctor::identity(&z2);
        let collapse = FinFunctor::constant(&z2, &z2, Obj(0));
        let ok = IndexedCategory::new(w.clone(), vec![z2.clone(), z2.clone()], vec![id.clone(), id.clone(), collapse.clone()]);
        assert!(ok.is_ok());
        let bad = IndexedCategory::new(w.clone(), vec![z2.clone(), z2.clone()], vec![collapse, id.clone(), id]);
        assert!(bad.is_err());
    }

    #[test]
    fn representable_fibers_are_hom_sets() {
        let c = corpus::split_epi();
        for x in c.objects() {
            let r = IndexedCategory::representable(&c, x);
            for d in c.objects() {
                assert_eq!(r.fiber(d).object_count(), c.hom(d, x).len());
            }
        }
    }

    #[test]
    fn product_and_sub() {
        let w = corpus::walk2();
        let k = corpus::iso_pair();
        let cst = IndexedCategory::constant(&w, &corpus::one());
        let p = cst.times(&k).unwrap();
        assert_eq!(p.fiber(Obj(0)).object_count(), 2);
        assert_eq!(p.fiber(Obj(0)).arrow_count(), 4);
        let (s, _) = p.sub(&[vec![Obj(0)], vec![Obj(0)]]).unwrap();
        assert_eq!(s.size(), 2);
        let two = cst.sum(&IndexedCategory::representable(&w, Obj(1))).unwrap();
        assert_eq!(two.fiber(Obj(0)).object_count(), 2);
        assert_eq!(two.restriction(corpus::arrow(&w, "u")).obj(Obj(1)), Obj(1));
    }

    #[test]
    fn precompose_with_identity_is_identity() {
        let c = corpus::split_epi();
        let r = IndexedCategory::representable(&c, Obj(0));
        assert_eq!(r.precompose(&FinFunctor::identity(&c)).unwrap(), r);
    }
}
