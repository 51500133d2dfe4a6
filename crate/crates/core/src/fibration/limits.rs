use super::{FibrationBundle, IndexedCategory};
use crate::fincat::{Arr, FinCategory, FinFunctor, Obj};

/// A cone over one of the three basic finite-limit shapes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cone {
    Terminal(Obj),
    Product { apex: Obj, left: Arr, right: Arr },
    /// `m` into the common source of the parallel pair `(f, g)` with `f m = g m`.
    Equalizer { m: Arr, f: Arr, g: Arr },
}

impl Cone {
    pub fn map(&self, functor: &FinFunctor) -> Cone {
        match *self {
            Cone::Terminal(o) => Cone::Terminal(functor.obj(o)),
            Cone::Product { apex, left, right } => Cone::Product {
                apex: functor.obj(apex),
                left: functor.arr(left),
                right: functor.arr(right),
            },
            Cone::Equalizer { m, f, g } => Cone::Equalizer {
                m: functor.arr(m),
                f: functor.arr(f),
                g: functor.arr(g),
            },
        }
    }
}

/// Whether the cone has the universal property, by exhaustive search.
pub fn is_limit(c: &FinCategory, cone: &Cone) -> bool {
    match *cone {
        Cone::Terminal(t) => c.objects().all(|x| c.hom(x, t).len() == 1),
        Cone::Product { apex, left, right } => {
            let (a, b) = (c.tgt(left), c.tgt(right));
            c.objects().all(|x| {
                c.hom(x, a).iter().all(|&q1| {
                    c.hom(x, b).iter().all(|&q2| {
                        c.hom(x, apex)
                            .iter()
                            .filter(|&&h| c.comp(left, h) == q1 && c.comp(right, h) == q2)
                            .count()
                            == 1
                    })
                })
            })
        }
        Cone::Equalizer { m, f, g } => {
            if c.comp(f, m) != c.comp(g, m) {
                return false;
            }
            let (e, s) = (c.src(m), c.tgt(m));
            c.objects().all(|x| {
                c.hom(x, s)
                    .iter()
                    .filter(|&&k| c.comp(f, k) == c.comp(g, k))
                    .all(|&k| c.hom(x, e).iter().filter(|&&h| c.comp(m, h) == k).count() == 1)
            })
        }
    }
}

pub fn find_terminal(c: &FinCategory) -> Option<Obj> {
    c.objects().find(|&t| is_limit(c, &Cone::Terminal(t)))
}

pub fn find_product(c: &FinCategory, a: Obj, b: Obj) -> Option<Cone> {
    for apex in c.objects() {
        for &left in c.hom(apex, a) {
            for &right in c.hom(apex, b) {
                let cone = Cone::Product { apex, left, right };
                if is_limit(c, &cone) {
                    return Some(cone);
                }
            }
        }
    }
    None
}

pub fn find_equalizer(c: &FinCategory, f: Arr, g: Arr) -> Option<Cone> {
    c.arrows_into(c.src(f)).iter().find_map(|&m| {
        let cone = Cone::Equalizer { m, f, g };
        is_limit(c, &cone).then_some(cone)
    })
}

/// One chosen limit cone for each basic shape, or `None` if some is missing.
pub fn chosen_limits(c: &FinCategory) -> Option<Vec<Cone>> {
    let mut out = vec![Cone::Terminal(find_terminal(c)?)];
    for a in c.objects() {
        for b in c.objects() {
            out.push(find_product(c, a, b)?);
        }
    }
    for x in c.objects() {
        for y in c.objects() {
            let hom = c.hom(x, y);
            for &f in hom {
                for &g in hom {
                    if f < g {
                        out.push(find_equalizer(c, f, g)?);
                    }
                }
            }
        }
    }
    Some(out)
}

pub fn has_finite_limits(c: &FinCategory) -> bool {
    chosen_limits(c).is_some()
}

/// Whether `F` sends the chosen limit cones of its (finitely complete)
/// source to limit cones.
pub fn preserves_finite_limits(f: &FinFunctor) -> bool {
    match chosen_limits(f.source()) {
        Some(cones) => cones.iter().all(|k| is_limit(f.target(), &k.map(f))),
        None => false,
    }
}

/// Every cone of the three basic shapes in `c`, limit or not.
pub fn all_cones(c: &FinCategory) -> Vec<Cone> {
    let mut out: Vec<Cone> = c.objects().map(Cone::Terminal).collect();
    for apex in c.objects() {
        let from = c.arrows_from(apex);
        for &left in from {
            for &right in from {
                out.push(Cone::Product { apex, left, right });
            }
        }
    }
    for f in c.arrows() {
        for &g in c.hom(c.src(f), c.tgt(f)) {
            if f < g {
                for &m in c.arrows_into(c.src(f)) {
                    if c.comp(f, m) == c.comp(g, m) {
                        out.push(Cone::Equalizer { m, f, g });
                    }
                }
            }
        }
    }
    out
}

/// `F` reflects limits of the basic shapes: a cone whose image is a limit
/// was already a limit. Returns the first counterexample.
pub fn reflects_finite_limits(f: &FinFunctor) -> Result<(), Cone> {
    for k in all_cones(f.source()) {
        if is_limit(f.target(), &k.map(f)) && !is_limit(f.source(), &k) {
            return Err(k);
        }
    }
    Ok(())
}

/// Every fiber has finite limits and every restriction preserves them.
pub fn is_cartesian_indexed(ix: &IndexedCategory) -> bool {
    ix.fibers().iter().all(|f| has_finite_limits(f)) && ix.restrictions().iter().all(preserves_finite_limits)
}

/// [`is_cartesian_indexed`] on the indexed category behind a bundle; bundles
/// without Grothendieck coordinates fall back to finite limits of the total
/// category preserved by the projection.
pub fn is_cartesian_fibration(b: &FibrationBundle) -> bool {
    match b.coordinates() {
        Some(coords) => is_cartesian_indexed(&coords.indexed),
        None => has_finite_limits(b.total()) && preserves_finite_limits(b.projection()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::fibration::grothendieck;
    use std::sync::Arc;

    #[test]
    fn examples() {
        let w = corpus::walk2();
        let one = corpus::one();
        let b = grothendieck(&IndexedCategory::constant(&w, &one)).unwrap();
        assert!(is_cartesian_fibration(&b));
        let two = Arc::new(FinCategory::discrete(&["x0", "x1"]).unwrap());
        let tp = IndexedCategory::constant(&w, &two);
        assert!(!is_cartesian_indexed(&tp));
        assert!(has_finite_limits(&w));
        assert!(!has_finite_limits(&corpus::cospan()));
        assert!(!has_finite_limits(&corpus::z2_group()));
    }

    #[test]
    fn limits_in_a_lattice() {
        // the four-element Boolean lattice: bottom, two atoms, top
        let c = FinCategory::poset(&["0", "p", "q", "1"], |i, j| i == j || i == 0 || j == 3).unwrap();
        assert!(has_finite_limits(&c));
        let p = find_product(&c, Obj(1), Obj(2)).unwrap();
        assert!(matches!(p, Cone::Product { apex: Obj(0), .. }));
        let id = FinFunctor::identity(&Arc::new(c));
        assert!(preserves_finite_limits(&id));
        assert!(reflects_finite_limits(&id).is_ok());
    }
}
