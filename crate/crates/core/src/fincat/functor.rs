use std::sync::Arc;

use super::category::{Arr, CategoryBuilder, FinCategory, Obj};
use crate::error::{Error, Result};

pub(crate) fn same_category(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A functor between finite categories, stored as object and arrow tables.
#[derive(Clone, Debug)]
pub struct FinFunctor {
    source: Arc<FinCategory>,
    target: Arc<FinCategory>,
    on_objects: Vec<Obj>,
    on_arrows: Vec<Arr>,
}

impl PartialEq for FinFunctor {
    fn eq(&self, other: &Self) -> bool {
        self.on_objects == other.on_objects
            && self.on_arrows == other.on_arrows
            && same_category(&self.source, &other.source)
            && same_category(&self.target, &other.target)
    }
}

impl FinFunctor {
    /// Validates the tables: endpoints, identities and every composite.
    pub fn new(
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        on_objects: Vec<Obj>,
        on_arrows: Vec<Arr>,
    ) -> Result<Self> {
        if on_objects.len() != source.object_count() {
            return Err(Error::Functor(format!(
                "object map has {} entries, source has {} objects",
                on_objects.len(),
                source.object_count()
            )));
        }
        if on_arrows.len() != source.arrow_count() {
            return Err(Error::Functor(format!(
                "arrow map has {} entries, source has {} arrows",
                on_arrows.len(),
                source.arrow_count()
            )));
        }
        if let Some(o) = on_objects.iter().find(|o| o.0 >= target.object_count()) {
            return Err(Error::Functor(format!("dangling object image {o}")));
        }
        if let Some(a) = on_arrows.iter().find(|a| a.0 >= target.arrow_count()) {
            return Err(Error::Functor(format!("dangling arrow image {a}")));
        }
        let f = FinFunctor {
            source,
            target,
            on_objects,
            on_arrows,
        };
        f.check()?;
        Ok(f)
    }

    fn check(&self) -> Result<()> {
        let (s, t) = (&*self.source, &*self.target);
        for a in s.arrows() {
            let fa = self.arr(a);
            if t.src(fa) != self.obj(s.src(a)) || t.tgt(fa) != self.obj(s.tgt(a)) {
                return Err(Error::Functor(format!(
                    "endpoint mismatch: `{}` is sent to `{}`",
                    s.arrow_name(a),
                    t.arrow_name(fa)
                )));
            }
        }
        for o in s.objects() {
            if self.arr(s.identity(o)) != t.identity(self.obj(o)) {
                return Err(Error::Functor(format!(
                    "identity of `{}` is not preserved",
                    s.object_name(o)
                )));
            }
        }
        for f in s.arrows() {
            for &g in s.arrows_from(s.tgt(f)) {
                let lhs = self.arr(s.comp(g, f));
                let rhs = t.comp(self.arr(g), self.arr(f));
                if lhs != rhs {
                    return Err(Error::Functor(format!(
                        "composite ({} after {}) is not preserved",
                        s.arrow_name(g),
                        s.arrow_name(f)
                    )));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn new_unchecked(
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        on_objects: Vec<Obj>,
        on_arrows: Vec<Arr>,
    ) -> Self {
        let f = FinFunctor {
            source,
            target,
            on_objects,
            on_arrows,
        };
        debug_assert!(f.check().is_ok(), "{:?}", f.check());
        f
    }

    pub fn identity(c: &Arc<FinCategory>) -> Self {
        FinFunctor {
            source: c.clone(),
            target: c.clone(),
            on_objects: c.objects().collect(),
            on_arrows: c.arrows().collect(),
        }
    }

    /// The functor sending everything to the identity of `at`.
    pub fn constant(source: &Arc<FinCategory>, target: &Arc<FinCategory>, at: Obj) -> Self {
        FinFunctor {
            source: source.clone(),
            target: target.clone(),
            on_objects: vec![at; source.object_count()],
            on_arrows: vec![target.identity(at); source.arrow_count()],
        }
    }

    pub fn source(&self) -> &Arc<FinCategory> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinCategory> {
        &self.target
    }

    pub fn obj(&self, o: Obj) -> Obj {
        self.on_objects[o.0]
    }

    pub fn arr(&self, a: Arr) -> Arr {
        self.on_arrows[a.0]
    }

    pub fn object_map(&self) -> &[Obj] {
        &self.on_objects
    }

    pub fn arrow_map(&self) -> &[Arr] {
        &self.on_arrows
    }

    /// `next . self`.
    pub fn then(&self, next: &FinFunctor) -> Result<FinFunctor> {
        if !same_category(&self.target, &next.source) {
            return Err(Error::Mismatch(
                "functors do not compose: target and source differ".into(),
            ));
        }
        Ok(FinFunctor {
            source: self.source.clone(),
            target: next.target.clone(),
            on_objects: self.on_objects.iter().map(|&o| next.obj(o)).collect(),
            on_arrows: self.on_arrows.iter().map(|&a| next.arr(a)).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        same_category(&self.source, &self.target)
            && self.on_objects.iter().enumerate().all(|(i, o)| o.0 == i)
            && self.on_arrows.iter().enumerate().all(|(i, a)| a.0 == i)
    }

    /// Same functor with its source and target swapped for structurally
    /// equal copies.
    pub fn retarget(&self, source: Arc<FinCategory>, target: Arc<FinCategory>) -> Result<Self> {
        if !same_category(&self.source, &source) || !same_category(&self.target, &target) {
            return Err(Error::Mismatch("retarget onto a different category".into()));
        }
        Ok(FinFunctor {
            source,
            target,
            on_objects: self.on_objects.clone(),
            on_arrows: self.on_arrows.clone(),
        })
    }
}

/// Full subcategory on `keep` (in the given order) with its inclusion.
pub fn full_subcategory(c: &Arc<FinCategory>, keep: &[Obj]) -> Result<(Arc<FinCategory>, FinFunctor)> {
    let mut b = CategoryBuilder::new();
    let mut obj_of = vec![None; c.object_count()];
    for &o in keep {
        obj_of[o.0] = Some(b.bare_object(c.object_name(o))?);
    }
    let mut arr_of = vec![None; c.arrow_count()];
    let mut back = Vec::new();
    for a in c.arrows() {
        if let (Some(s), Some(t)) = (obj_of[c.src(a).0], obj_of[c.tgt(a).0]) {
            arr_of[a.0] = Some(b.arrow(c.arrow_name(a), s, t)?);
            back.push(a);
        }
    }
    for &o in keep {
        b.set_identity(obj_of[o.0].unwrap(), arr_of[c.identity(o).0].unwrap())?;
    }
    for &f in &back {
        for &g in c.arrows_from(c.tgt(f)) {
            if let Some(gi) = arr_of[g.0] {
                let h = c.comp(g, f);
                b.composite(gi, arr_of[f.0].unwrap(), arr_of[h.0].unwrap())?;
            }
        }
    }
    let sub = Arc::new(b.build()?);
    let inc = FinFunctor::new_unchecked(sub.clone(), c.clone(), keep.to_vec(), back);
    Ok((sub, inc))
}

/// A natural transformation between two parallel functors.
#[derive(Clone, Debug, PartialEq)]
pub struct NatTransform {
    source: FinFunctor,
    target: FinFunctor,
    components: Vec<Arr>,
}

impl NatTransform {
    pub fn new(source: FinFunctor, target: FinFunctor, components: Vec<Arr>) -> Result<Self> {
        if !same_category(source.source(), target.source())
            || !same_category(source.target(), target.target())
        {
            return Err(Error::Natural("functors are not parallel".into()));
        }
        let (c, d) = (source.source().clone(), source.target().clone());
        if components.len() != c.object_count() {
            return Err(Error::Natural("one component per object required".into()));
        }
        for x in c.objects() {
            let a = components[x.0];
            if a.0 >= d.arrow_count() || d.src(a) != source.obj(x) || d.tgt(a) != target.obj(x) {
                return Err(Error::Natural(format!(
                    "component at `{}` has wrong endpoints",
                    c.object_name(x)
                )));
            }
        }
        for f in c.arrows() {
            let (x, y) = (c.src(f), c.tgt(f));
            if d.comp(target.arr(f), components[x.0]) != d.comp(components[y.0], source.arr(f)) {
                return Err(Error::Natural(format!(
                    "naturality square fails at `{}`",
                    c.arrow_name(f)
                )));
            }
        }
        Ok(NatTransform {
            source,
            target,
            components,
        })
    }

    pub fn identity(f: &FinFunctor) -> Self {
        let d = f.target();
        NatTransform {
            source: f.clone(),
            target: f.clone(),
            components: f.source().objects().map(|x| d.identity(f.obj(x))).collect(),
        }
    }

    pub fn source(&self) -> &FinFunctor {
        &self.source
    }

    pub fn target(&self) -> &FinFunctor {
        &self.target
    }

    pub fn component(&self, x: Obj) -> Arr {
        self.components[x.0]
    }

    pub fn components(&self) -> &[Arr] {
        &self.components
    }

    pub fn is_iso(&self) -> bool {
        let d = self.source.target();
        self.components.iter().all(|&a| d.is_iso(a))
    }
}

/// Whether `left ⊣ right` with the given unit and counit.
///
/// `left: X -> Y`, `right: Y -> X`, `unit: Id_X => right . left`,
/// `counit: left . right => Id_Y`. Returns `Ok(true)` exactly when both
/// triangle identities hold componentwise.
pub fn check_adjunction(
    left: &FinFunctor,
    right: &FinFunctor,
    unit: &NatTransform,
    counit: &NatTransform,
) -> Result<bool> {
    let (x, y) = (left.source(), left.target());
    if !same_category(right.source(), y) || !same_category(right.target(), x) {
        return Err(Error::Adjunction("functors are not opposed".into()));
    }
    let rl = left.then(right)?;
    let lr = right.then(left)?;
    if !unit.source().is_identity() || *unit.target() != rl || !same_category(unit.source().source(), x) {
        return Err(Error::Adjunction("unit must go from the identity to right . left".into()));
    }
    if !counit.target().is_identity() || *counit.source() != lr || !same_category(counit.target().source(), y) {
        return Err(Error::Adjunction("counit must go from left . right to the identity".into()));
    }
    // counit_{L x} . L(unit_x) = id_{L x}
    for o in x.objects() {
        let lhs = y.comp(counit.component(left.obj(o)), left.arr(unit.component(o)));
        if lhs != y.identity(left.obj(o)) {
            return Ok(false);
        }
    }
    // R(counit_y) . unit_{R y} = id_{R y}
    for o in y.objects() {
        let lhs = x.comp(right.arr(counit.component(o)), unit.component(right.obj(o)));
        if lhs != x.identity(right.obj(o)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Validated adjunction data `left ⊣ right`.
#[derive(Clone, Debug)]
pub struct Adjunction {
    left: FinFunctor,
    right: FinFunctor,
    unit: NatTransform,
    counit: NatTransform,
}

impl Adjunction {
    pub fn new(left: FinFunctor, right: FinFunctor, unit: NatTransform, counit: NatTransform) -> Result<Self> {
        if !check_adjunction(&left, &right, &unit, &counit)? {
            return Err(Error::Adjunction("triangle identities fail".into()));
        }
        Ok(Adjunction {
            left,
            right,
            unit,
            counit,
        })
    }

    pub fn identity(c: &Arc<FinCategory>) -> Self {
        let id = FinFunctor::identity(c);
        Adjunction {
            left: id.clone(),
            right: id.clone(),
            unit: NatTransform::identity(&id),
            counit: NatTransform::identity(&id),
        }
    }

    pub fn left(&self) -> &FinFunctor {
        &self.left
    }

    pub fn right(&self) -> &FinFunctor {
        &self.right
    }

    pub fn unit(&self) -> &NatTransform {
        &self.unit
    }

    pub fn counit(&self) -> &NatTransform {
        &self.counit
    }

    /// Given `self = (L ⊣ R)` with `L: X -> Y` and `next = (L' ⊣ R')` with
    /// `L': Y -> Z`, returns `L' . L ⊣ R . R'`.
    pub fn compose(&self, next: &Adjunction) -> Result<Adjunction> {
        let left = self.left.then(&next.left)?;
        let right = next.right.then(&self.right)?;
        let (x, z) = (self.left.source(), next.left.target());
        // R(unit'_{L x}) . unit_x
        let unit = x
            .objects()
            .map(|o| {
                let inner = next.unit.component(self.left.obj(o));
                x.comp(self.right.arr(inner), self.unit.component(o))
            })
            .collect();
        // counit'_z . L'(counit_{R' z})
        let counit = z
            .objects()
            .map(|o| {
                let inner = self.counit.component(next.right.obj(o));
                z.comp(next.counit.component(o), next.left.arr(inner))
            })
            .collect();
        let id_x = FinFunctor::identity(x);
        let id_z = FinFunctor::identity(z);
        let unit = NatTransform::new(id_x, left.then(&right)?, unit)?;
        let counit = NatTransform::new(right.then(&left)?, id_z, counit)?;
        Adjunction::new(left, right, unit, counit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn identity_on_walk2_is_valid() {
        let w = corpus::walk2();
        let id = FinFunctor::identity(&w);
        let again = FinFunctor::new(w.clone(), w.clone(), id.object_map().to_vec(), id.arrow_map().to_vec());
        assert!(again.is_ok());
    }

    #[test]
    fn constant_to_one_is_valid() {
        let w = corpus::walk2();
        let one = corpus::one();
        let bang = FinFunctor::new(w.clone(), one.clone(), vec![Obj(0); 2], vec![Arr(0); 3]);
        assert!(bang.is_ok());
    }

    #[test]
    fn sending_u_to_an_identity_is_rejected() {
        let w = corpus::walk2();
        let (a, b) = (w.object_named("a").unwrap(), w.object_named("b").unwrap());
        let u = w.arrow_named("u").unwrap();
        let mut arrows: Vec<Arr> = w.arrows().collect();
        arrows[u.0] = w.identity(a);
        let err = FinFunctor::new(w.clone(), w.clone(), vec![a, b], arrows).unwrap_err();
        assert!(err.to_string().contains("endpoint mismatch"), "{err}");
    }

    #[test]
    fn bang_is_left_adjoint_to_pick_b() {
        let w = corpus::walk2();
        let one = corpus::one();
        let bang = corpus::bang(&w);
        let pick_b = corpus::pick(&w, "b");
        let (a, b) = (w.object_named("a").unwrap(), w.object_named("b").unwrap());
        let u = w.arrow_named("u").unwrap();
        let mut unit = vec![Arr(0); 2];
        unit[a.0] = u;
        unit[b.0] = w.identity(b);
        let unit = NatTransform::new(FinFunctor::identity(&w), bang.then(&pick_b).unwrap(), unit).unwrap();
        let counit = NatTransform::identity(&FinFunctor::identity(&one));
        let counit = NatTransform::new(pick_b.then(&bang).unwrap(), FinFunctor::identity(&one), counit.components().to_vec()).unwrap();
        assert!(check_adjunction(&bang, &pick_b, &unit, &counit).unwrap());

        // with pick_a there is no natural unit at all: b has no arrow to a
        let pick_a = corpus::pick(&w, "a");
        let target = bang.then(&pick_a).unwrap();
        let bad = NatTransform::new(FinFunctor::identity(&w), target, vec![w.identity(a), u]);
        assert!(bad.is_err());
    }

    #[test]
    fn triangle_failure_is_detected() {
        // Z/2 on one object, unit = g, counit = id: counit . L(unit) = g
        let z2 = corpus::z2_group();
        let g = z2.arrow_named("g").unwrap();
        let id = FinFunctor::identity(&z2);
        let unit = NatTransform::new(id.clone(), id.clone(), vec![g]).unwrap();
        let counit = NatTransform::identity(&id);
        assert!(!check_adjunction(&id, &id, &unit, &counit).unwrap());
    }
}
