//! Finite presheaves, the sheaf condition, the plus construction and
//! sheafification.

mod bounded;
mod presheaf;
mod sheafify;

pub use bounded::{
    check_unit_universal, enumerate_presheaves, enumerate_sheaves, natural_maps, DEFAULT_BOUND,
};
pub use presheaf::{precompose, Presheaf, PresheafMap};
pub use sheafify::{
    is_separated, is_sheaf, is_sheaf_exhaustive, matching_families, plus, sheafify, MatchingFamily, PlusConstruction,
    SheafFailure, Sheafification,
};

use crate::error::{Error, Result};
use crate::fincat::{Arr, FinFunctor, Obj};

/// The presheaf on the total category of `p` with
/// `P(e) = { (g: e -> d, v: p(e) -> c'') : f . v = u . p(g) }` and action
/// `(g, v) . h = (g . h, v . p(h))`, where `u: p(d) -> c'` and
/// `f: c'' -> c'`.
pub fn prop33_pullback_presheaf(p: &FinFunctor, d: Obj, u: Arr, f: Arr) -> Result<Presheaf> {
    let (e_cat, c) = (p.source(), p.target());
    if c.src(u) != p.obj(d) || c.tgt(u) != c.tgt(f) {
        return Err(Error::Mismatch(format!(
            "`{}` must run from p({}) to the target of `{}`",
            c.arrow_name(u),
            e_cat.object_name(d),
            c.arrow_name(f)
        )));
    }
    let cpp = c.src(f);
    let elements: Vec<Vec<(Arr, Arr)>> = e_cat
        .objects()
        .map(|e| {
            let mut v = Vec::new();
            for &g in e_cat.hom(e, d) {
                for &w in c.hom(p.obj(e), cpp) {
                    if c.comp(f, w) == c.comp(u, p.arr(g)) {
                        v.push((g, w));
                    }
                }
            }
            v
        })
        .collect();
    let labels = elements
        .iter()
        .map(|v| {
            v.iter()
                .map(|&(g, w)| format!("({},{})", e_cat.arrow_name(g), c.arrow_name(w)))
                .collect()
        })
        .collect();
    let actions = e_cat
        .arrows()
        .map(|h| {
            let (s, t) = (e_cat.src(h), e_cat.tgt(h));
            elements[t.0]
                .iter()
                .map(|&(g, w)| {
                    let image = (e_cat.comp(g, h), c.comp(w, p.arr(h)));
                    elements[s.0].iter().position(|&x| x == image).unwrap()
                })
                .collect()
        })
        .collect();
    Ok(Presheaf::new_unchecked(e_cat, labels, actions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::fibration::{grothendieck, IndexedCategory};

    #[test]
    fn identity_case_is_representable() {
        let w = corpus::walk2();
        let id = FinFunctor::identity(&w);
        for d in w.objects() {
            let p = prop33_pullback_presheaf(&id, d, w.identity(d), w.identity(d)).unwrap();
            let y = Presheaf::representable(&w, d);
            assert_eq!(p.sizes(), y.sizes());
            for f in w.arrows() {
                assert_eq!(p.action(f), y.action(f));
            }
        }
    }

    #[test]
    fn twopoint_with_f_u() {
        let w = corpus::walk2();
        let fa = std::sync::Arc::new(crate::fincat::FinCategory::discrete(&["y"]).unwrap());
        let fb = std::sync::Arc::new(crate::fincat::FinCategory::discrete(&["x0", "x1"]).unwrap());
        let r = FinFunctor::new(fb.clone(), fa.clone(), vec![Obj(0), Obj(0)], vec![fa.identity(Obj(0)); 2]).unwrap();
        let ix = IndexedCategory::new(
            w.clone(),
            vec![fa.clone(), fb.clone()],
            vec![FinFunctor::identity(&fa), FinFunctor::identity(&fb), r],
        )
        .unwrap();
        let g = grothendieck(&ix).unwrap();
        let p = g.projection();
        let total = g.total();
        let u = corpus::arrow(&w, "u");
        for d in total.objects().filter(|&d| p.obj(d) == Obj(1)) {
            let pre = prop33_pullback_presheaf(p, d, w.identity(Obj(1)), u).unwrap();
            // brute force: pairs (g: e -> d, v: p e -> a) with u . v = p(g)
            for e in total.objects() {
                let mut count = 0;
                for &gg in total.hom(e, d) {
                    for &v in w.hom(p.obj(e), Obj(0)) {
                        count += (w.comp(u, v) == p.arr(gg)) as usize;
                    }
                }
                assert_eq!(pre.size(e), count);
            }
        }
        let over_b = total.objects().find(|&d| p.obj(d) == Obj(1)).unwrap();
        assert!(prop33_pullback_presheaf(p, over_b, u, u).is_err());
    }

    #[test]
    fn empty_homs_give_empty_presheaf() {
        let w = corpus::walk2();
        let id = FinFunctor::identity(&w);
        let u = corpus::arrow(&w, "u");
        // no arrow b -> a, so only e = a contributes
        let p = prop33_pullback_presheaf(&id, Obj(1), w.identity(Obj(1)), u).unwrap();
        assert_eq!(p.sizes(), vec![1, 0]);
        let p = prop33_pullback_presheaf(&id, Obj(0), w.identity(Obj(0)), w.identity(Obj(0))).unwrap();
        assert_eq!(p.size(Obj(1)), 0);
    }
}
