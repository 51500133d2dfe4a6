//! Small named categories and functors used throughout tests and examples.

use std::sync::Arc;

use crate::fibration::IndexedCategory;
use crate::fincat::{Arr, CategoryBuilder, FinCategory, FinFunctor, Obj};
use crate::sieve::{saturate, Coverage, Topology};

/// The terminal category, with single object `*`.
pub fn one() -> Arc<FinCategory> {
    let mut b = CategoryBuilder::new();
    b.object("*").unwrap();
    Arc::new(b.build().unwrap())
}

/// Objects `a`, `b` and one arrow `u: a -> b`.
pub fn walk2() -> Arc<FinCategory> {
    let mut b = CategoryBuilder::new();
    let a = b.object("a").unwrap();
    let bb = b.object("b").unwrap();
    b.arrow("u", a, bb).unwrap();
    Arc::new(b.build().unwrap())
}

/// Two objects `x`, `y` with inverse isomorphisms `i: x -> y`, `j: y -> x`.
pub fn iso_pair() -> Arc<FinCategory> {
    let mut b = CategoryBuilder::new();
    let x = b.object("x").unwrap();
    let y = b.object("y").unwrap();
    let i = b.arrow("i", x, y).unwrap();
    let j = b.arrow("j", y, x).unwrap();
    let (ix, iy) = (b.identity_of(x), b.identity_of(y));
    b.composite(j, i, ix).unwrap();
    b.composite(i, j, iy).unwrap();
    Arc::new(b.build().unwrap())
}

/// The group of order two as a one-object category; the generator is `g`.
pub fn z2_group() -> Arc<FinCategory> {
    let mut b = CategoryBuilder::new();
    let o = b.object("*").unwrap();
    let g = b.arrow("g", o, o).unwrap();
    let id = b.identity_of(o);
    b.composite(g, g, id).unwrap();
    Arc::new(b.build().unwrap())
}

/// `e: a -> b` split by `s: b -> a`, so `e.s = id_b` and `k = s.e` is idempotent.
pub fn split_epi() -> Arc<FinCategory> {
    let mut b = CategoryBuilder::new();
    let a = b.object("a").unwrap();
    let bb = b.object("b").unwrap();
    let e = b.arrow("e", a, bb).unwrap();
    let s = b.arrow("s", bb, a).unwrap();
    let k = b.arrow("k", a, a).unwrap();
    let ib = b.identity_of(bb);
    b.composite(e, s, ib).unwrap();
    b.composite(s, e, k).unwrap();
    b.composite(k, k, k).unwrap();
    b.composite(e, k, e).unwrap();
    b.composite(k, s, s).unwrap();
    Arc::new(b.build().unwrap())
}

/// The poset `l <= t >= r` (a cospan).
pub fn cospan() -> Arc<FinCategory> {
    Arc::new(FinCategory::poset(&["l", "r", "t"], |i, j| i == j || j == 2).unwrap())
}

/// The monoid `{1, e}` with `e.e = e` as a one-object category.
pub fn idempotent() -> Arc<FinCategory> {
    let mut b = CategoryBuilder::new();
    let o = b.object("*").unwrap();
    let e = b.arrow("e", o, o).unwrap();
    b.composite(e, e, e).unwrap();
    Arc::new(b.build().unwrap())
}

/// The Sierpinski topology on Walk2: `b` is covered by `<u>`.
pub fn sier() -> Topology {
    let w = walk2();
    let mut cov = Coverage::new(&w);
    cov.add(Obj(1), vec![arrow(&w, "u")]).unwrap();
    saturate(&cov)
}

/// Over Walk2: fiber `{y}` over `a`, discrete `{x0, x1}` over `b`, both
/// restricting to `y`.
pub fn twopoint() -> IndexedCategory {
    let w = walk2();
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

/// The unique functor into the terminal category.
pub fn bang(c: &Arc<FinCategory>) -> FinFunctor {
    FinFunctor::constant(c, &one(), Obj(0))
}

/// The functor `One -> c` picking the named object.
pub fn pick(c: &Arc<FinCategory>, name: &str) -> FinFunctor {
    let o = c.object_named(name).expect("unknown object");
    FinFunctor::constant(&one(), c, o)
}

/// Looks up an arrow by name, panicking when absent.
pub fn arrow(c: &FinCategory, name: &str) -> Arr {
    c.arrow_named(name).unwrap_or_else(|| panic!("no arrow `{name}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_categories_have_expected_sizes() {
        assert_eq!(walk2().arrow_count(), 3);
        assert_eq!(iso_pair().arrow_count(), 4);
        assert_eq!(z2_group().arrow_count(), 2);
        assert_eq!(split_epi().arrow_count(), 5);
        assert!(cospan().is_poset());
        let se = split_epi();
        assert!(!se.is_iso(arrow(&se, "e")));
        assert_eq!(idempotent().arrow_count(), 2);
        assert_eq!(sier().minimal_cover(Obj(1)).len(), 1);
        assert_eq!(twopoint().size(), 3);
    }
}
