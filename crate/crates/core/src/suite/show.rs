//! Plain-text renderings of instances for reports.

use crate::fibration::IndexedCategory;
use crate::fincat::{Adjunction, FinCategory, FinFunctor};
use crate::sheaf::Presheaf;
use crate::sieve::Topology;
use crate::verify::SiteFunctor;

pub fn category(c: &FinCategory) -> String {
    let objs: Vec<&str> = c.objects().map(|o| c.object_name(o)).collect();
    let arrs: Vec<String> = c
        .arrows()
        .filter(|&a| !c.is_identity(a))
        .map(|a| format!("{}:{}->{}", c.arrow_name(a), c.object_name(c.src(a)), c.object_name(c.tgt(a))))
        .collect();
    let mut comps = Vec::new();
    for f in c.arrows().filter(|&a| !c.is_identity(a)) {
        for &g in c.arrows_from(c.tgt(f)) {
            if !c.is_identity(g) {
                comps.push(format!("{}.{}={}", c.arrow_name(g), c.arrow_name(f), c.arrow_name(c.comp(g, f))));
            }
        }
    }
    format!("objects [{}] arrows [{}] composites [{}]", objs.join(" "), arrs.join(" "), comps.join(" "))
}

pub fn functor(f: &FinFunctor) -> String {
    let (s, t) = (f.source(), f.target());
    let objs: Vec<String> = s
        .objects()
        .map(|o| format!("{}>{}", s.object_name(o), t.object_name(f.obj(o))))
        .collect();
    let arrs: Vec<String> = s
        .arrows()
        .filter(|&a| !s.is_identity(a))
        .map(|a| format!("{}>{}", s.arrow_name(a), t.arrow_name(f.arr(a))))
        .collect();
    format!("[{}] [{}]", objs.join(" "), arrs.join(" "))
}

pub fn site(j: &Topology) -> String {
    format!("category {}\ntopology {}\n", category(j.base()), j.display())
}

pub fn site_functor(s: &SiteFunctor) -> String {
    format!(
        "source {}target {}functor {}\n",
        site(&s.source),
        site(&s.target),
        functor(&s.functor)
    )
}

pub fn indexed(ix: &IndexedCategory) -> String {
    let base = ix.base();
    let mut out = format!("base {}\n", category(base));
    for c in base.objects() {
        out.push_str(&format!("  fiber {}: {}\n", base.object_name(c), category(ix.fiber(c))));
    }
    for f in base.arrows().filter(|&f| !base.is_identity(f)) {
        out.push_str(&format!("  restrict {}: {}\n", base.arrow_name(f), functor(ix.restriction(f))));
    }
    out
}

pub fn adjunction(a: &Adjunction) -> String {
    format!(
        "left: {} -> {} {}\nright: {}\n",
        category(a.left().source()),
        category(a.left().target()),
        functor(a.left()),
        functor(a.right())
    )
}

pub fn presheaf(p: &Presheaf) -> String {
    let c = p.base();
    let mut parts: Vec<String> = c
        .objects()
        .map(|o| format!("{}={{{}}}", c.object_name(o), p.labels(o).join(",")))
        .collect();
    for f in c.arrows().filter(|&f| !c.is_identity(f)) {
        let act: Vec<String> = p.action(f).iter().map(|x| x.to_string()).collect();
        parts.push(format!("{}:[{}]", c.arrow_name(f), act.join(",")));
    }
    parts.join(" ")
}

