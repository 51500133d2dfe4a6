//! The registered experiments.

use std::sync::Arc;

use rand::Rng;

use super::cases::*;
use super::gen::{self, SuiteCaps, SuiteRng};
use super::oracle::{comma_colimit, comma_count};
use super::{Check, Experiment, Property, Registered};
use crate::error::Error;
use crate::fibration::{
    all_cones, compose_base_change, direct_image, direct_image_onto, giraud_topology, grothendieck, has_finite_limits,
    inverse_image_adjoint, is_cartesian_indexed, is_cartesian_search, is_fibration, is_limit, is_morphism_of_fibrations,
    preserves_finite_limits, q_reflects_cartesian, reflects_finite_limits, structure_functor, BaseChangeCase,
    BaseChangeWitness, CartesianMode, FibrationBundle, IndexedCategory,
};
use crate::fincat::{
    check_adjunction, comma_category, connected_components, is_equivalence, FinCategory, FinFunctor, NatTransform, Obj,
};
use crate::sheaf::{check_unit_universal, enumerate_sheaves, is_sheaf, is_sheaf_exhaustive, precompose, sheafify};
use crate::sieve::{
    enumerate_topologies, generate_sieve, induced_image_topology, is_topology, saturate, topology_leq, Coverage,
    Topology,
};
use crate::verify::{
    check_prop33_conditions, describe_witness, is_comorphism, is_continuous, is_dense_morphism, is_morphism_of_sites,
    SiteFunctor, Verdict,
};

const TOPOLOGY_CAP: usize = 50_000;
const MINIMALITY_CAP: usize = 20_000;
const SHEAF_LIMIT: usize = 4_000;

/// Early exits of a check body.
enum Stop {
    Vacuous(String),
    Skipped(String),
    Noted(String),
    Fail(String),
}

impl From<Error> for Stop {
    fn from(e: Error) -> Self {
        Stop::Fail(format!("error: {e}"))
    }
}

type Body = std::result::Result<usize, Stop>;

fn finish(r: Body) -> Check {
    match r {
        Ok(n) => Check::Pass(n),
        Err(Stop::Vacuous(m)) => Check::Vacuous(m),
        Err(Stop::Skipped(m)) => Check::Skipped(m),
        Err(Stop::Noted(m)) => Check::Noted(m),
        Err(Stop::Fail(m)) => Check::Fail(m),
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), Stop> {
    if cond {
        Ok(())
    } else {
        Err(Stop::Fail(msg()))
    }
}

fn verdict(s: &SiteFunctor, v: Verdict, what: &str) -> std::result::Result<usize, Stop> {
    if v.holds {
        return Ok(v.checked);
    }
    let w = v.witness.as_ref().map(|w| describe_witness(s, w)).unwrap_or_default();
    Err(Stop::Fail(format!("{what}: {v}; {w}")))
}

fn giraud(b: FibrationBundle, j: &Topology) -> std::result::Result<(FibrationBundle, Topology), Stop> {
    let b = b.with_giraud(j)?;
    let g = b.giraud().unwrap().clone();
    Ok((b, g))
}

fn chain(n: usize) -> Arc<FinCategory> {
    let names: Vec<String> = (0..n).map(|i| format!("k{i}")).collect();
    Arc::new(FinCategory::poset(&names, |i, j| i <= j).expect("chain"))
}

fn random_morphism_case(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<MorphismCase> {
    let c = gen::random_category(rng, caps.base_objects);
    let j = gen::random_topology(rng, &c);
    let fm = gen::random_fiber_morphism(rng, &c, caps.fiber_objects)?;
    Some(MorphismCase { j, fm })
}

fn random_adjoint_case(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<AdjointCase> {
    let c = gen::random_poset_any(rng, caps.base_objects);
    let ix = gen::random_indexed(rng, &c, caps.fiber_objects)?;
    let adj = gen::random_galois_from(rng, &c, caps.base_objects)?;
    Some(AdjointCase { adj, ix })
}

fn base_fib_case(rng: &mut SuiteRng, caps: &SuiteCaps, s: SiteFunctor) -> Option<BaseFibCase> {
    let ix = gen::random_indexed(rng, s.target.base(), caps.fiber_objects)?;
    Some(BaseFibCase { s, ix })
}

/// The direct image along `s` between the Giraud sites over its endpoints.
fn direct_image_site(c: &BaseFibCase) -> std::result::Result<SiteFunctor, Stop> {
    let tgt = giraud_topology(&c.ix, &c.s.target)?;
    let di = direct_image_onto(&tgt, &c.s.functor)?;
    let (_, src) = giraud(di.source, &c.s.source)?;
    Ok(SiteFunctor::new(di.q, src, tgt.giraud().unwrap().clone())?)
}

macro_rules! property {
    ($ty:ident, $id:literal, $claim:literal, $case:ty) => {
        pub(crate) struct $ty;
        impl Property for $ty {
            type Case = $case;
            fn id(&self) -> &'static str {
                $id
            }
            fn claim(&self) -> &'static str {
                $claim
            }
            fn generate(&self, rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<$case> {
                $ty::draw(rng, caps)
            }
            fn check(&self, case: &$case) -> Check {
                finish($ty::run(case))
            }
        }
    };
}

property!(
    TopologySoundness,
    "topology-soundness",
    "saturate, Giraud and induced topologies are topologies; saturate is idempotent and least",
    SoundnessCase
);

impl TopologySoundness {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<SoundnessCase> {
        let c = gen::random_category(rng, caps.base_objects.min(3));
        let cov = gen::random_coverage(rng, &c);
        let ix = gen::random_indexed(rng, &c, caps.fiber_objects)?;
        let f = if rng.gen_bool(0.5) {
            let d = gen::random_category(rng, caps.base_objects.min(3));
            gen::random_functor(rng, &d, &c)
        } else {
            None
        };
        Some(SoundnessCase { cov, ix, f })
    }

    fn run(case: &SoundnessCase) -> Body {
        let c = case.cov.base();
        let t = saturate(&case.cov);
        let mut n = 0;
        if let Err(e) = is_topology(&t.to_cover_family()) {
            return Err(Stop::Fail(format!("saturate output: {}", e.describe(c))));
        }
        n += 1;
        let mut from_minimal = Coverage::new(c);
        let mut from_all = Coverage::new(c);
        for x in c.objects() {
            from_minimal.add(x, t.minimal_cover(x).arrows())?;
            for s in t.covering_sieves(x) {
                from_all.add(x, s.arrows())?;
            }
        }
        ensure(saturate(&from_minimal) == t, || "saturate not idempotent on minimal covers".into())?;
        ensure(saturate(&from_all) == t, || "saturate not idempotent on all covers".into())?;
        n += 2;
        let mut generators = Vec::new();
        for x in c.objects() {
            for fam in case.cov.families(x) {
                let s = generate_sieve(c, x, fam)?;
                ensure(t.covers(&s), || format!("generator at {} not covered", c.object_name(x)))?;
                generators.push(s);
                n += 1;
            }
        }
        let en = enumerate_topologies(c, TOPOLOGY_CAP);
        if en.truncated {
            return Err(Stop::Skipped("topology enumeration truncated".into()));
        }
        let mut found = false;
        for k in &en.topologies {
            found |= *k == t;
            if generators.iter().all(|s| k.covers(s)) {
                ensure(topology_leq(&t, k)?, || format!("not least: {} contains the generators", k.display()))?;
                n += 1;
            }
        }
        ensure(found, || "saturate output missing from the enumeration".into())?;
        let g = giraud_topology(&case.ix, &t)?;
        if let Err(e) = is_topology(&g.giraud().unwrap().to_cover_family()) {
            return Err(Stop::Fail(format!("Giraud output: {}", e.describe(g.total()))));
        }
        n += 1;
        if let Some(f) = &case.f {
            if let Ok(k) = induced_image_topology(f, &t) {
                if let Err(e) = is_topology(&k.to_cover_family()) {
                    return Err(Stop::Fail(format!("induced output: {}", e.describe(f.source()))));
                }
                n += 1;
            }
        }
        Ok(n)
    }
}

property!(
    GiraudMinimality,
    "def-2.5-minimality",
    "the topologies making p a comorphism are exactly those containing Giraud's",
    FibCase
);

impl GiraudMinimality {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<FibCase> {
        let c = gen::random_category(rng, caps.base_objects.min(3));
        let j = gen::random_topology(rng, &c);
        let ix = gen::random_indexed(rng, &c, caps.fiber_objects.min(2))?;
        (ix.size() <= 6).then_some(FibCase { ix, j })
    }

    fn run(case: &FibCase) -> Body {
        let b = giraud_topology(&case.ix, &case.j)?;
        let gir = b.giraud().unwrap();
        let en = enumerate_topologies(b.total(), MINIMALITY_CAP);
        if en.truncated {
            return Err(Stop::Skipped("topology enumeration truncated".into()));
        }
        let mut found = false;
        for k in &en.topologies {
            found |= k == gir;
            let s = SiteFunctor::new(b.projection().clone(), k.clone(), case.j.clone())?;
            let comorphism = is_comorphism(&s).holds;
            let contains = topology_leq(gir, k)?;
            ensure(comorphism == contains, || {
                format!(
                    "K = {}: comorphism {comorphism}, contains Giraud {contains}",
                    k.display()
                )
            })?;
        }
        ensure(found, || "Giraud topology missing from the enumeration".into())?;
        Ok(en.topologies.len())
    }
}

property!(
    GiraudContinuity,
    "thm-2.3",
    "Giraud projections are continuous comorphisms; fiberwise morphisms are continuous",
    MorphismCase
);

impl GiraudContinuity {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<MorphismCase> {
        random_morphism_case(rng, caps)
    }

    fn run(case: &MorphismCase) -> Body {
        let (src, tgt, a) = case.fm.total()?;
        let (src, gs) = giraud(src, &case.j)?;
        let (tgt, gt) = giraud(tgt, &case.j)?;
        let mut n = 0;
        for (b, g) in [(&src, &gs), (&tgt, &gt)] {
            let s = SiteFunctor::new(b.projection().clone(), g.clone(), case.j.clone())?;
            n += verdict(&s, is_continuous(&s), "projection continuous")?;
            n += verdict(&s, is_comorphism(&s), "projection comorphism")?;
        }
        let s = SiteFunctor::new(a, gs, gt)?;
        n += verdict(&s, is_continuous(&s), "fiberwise morphism continuous")?;
        Ok(n)
    }
}

property!(
    GrothendieckFibration,
    "prop-2.1",
    "the Grothendieck construction is a fibration and fiberwise morphisms are morphisms of fibrations",
    MorphismCase
);

impl GrothendieckFibration {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<MorphismCase> {
        random_morphism_case(rng, caps)
    }

    fn run(case: &MorphismCase) -> Body {
        let (src, tgt, a) = case.fm.total()?;
        let mut n = 0;
        for b in [&src, &tgt] {
            if let Err(m) = is_fibration(b, CartesianMode::Strict) {
                return Err(Stop::Fail(format!("no cartesian lift of {} at {}", m.arrow, m.object)));
            }
            for f in b.total().arrows() {
                let by_search = is_cartesian_search(b.projection(), f);
                ensure(b.is_cartesian(f) == by_search, || {
                    format!("cartesian table disagrees with the search at {}", b.total().arrow_name(f))
                })?;
                n += 1;
            }
        }
        let upper = a.then(tgt.projection())?;
        let id = FinFunctor::identity(src.base());
        ensure(
            is_morphism_of_fibrations(&a, &id, &src, &tgt, &NatTransform::identity(&upper))?,
            || "fiberwise morphism is not a morphism of fibrations".into(),
        )?;
        Ok(n + 1)
    }
}

property!(
    DirectImageReflects,
    "prop-2.5",
    "the direct-image projection reflects cartesian arrows",
    DirectCase
);

impl DirectImageReflects {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<DirectCase> {
        let c = gen::random_category(rng, caps.base_objects);
        let ix = gen::random_indexed(rng, &c, caps.fiber_objects)?;
        let d = gen::random_category(rng, caps.base_objects);
        let f = gen::random_functor(rng, &d, &c)?;
        Some(DirectCase { ix, f })
    }

    fn run(case: &DirectCase) -> Body {
        let di = direct_image(&case.ix, &case.f)?;
        if let Err(a) = q_reflects_cartesian(&di) {
            return Err(Stop::Fail(format!(
                "q does not reflect cartesianness at {}",
                di.source.total().arrow_name(a)
            )));
        }
        if let Err(m) = is_fibration(&di.source, CartesianMode::Strict) {
            return Err(Stop::Fail(format!("direct image lacks a lift of {}", m.arrow)));
        }
        let upper = di.q.then(di.target.projection())?;
        ensure(
            is_morphism_of_fibrations(&di.q, &case.f, &di.source, &di.target, &NatTransform::identity(&upper))?,
            || "q is not a morphism of fibrations over F".into(),
        )?;
        Ok(di.source.total().arrow_count() + 2)
    }
}

property!(
    AdjointAgreement,
    "prop-2.7-agreement",
    "the adjoint inverse image agrees with the pointwise comma colimit",
    AdjointCase
);

impl AdjointAgreement {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<AdjointCase> {
        random_adjoint_case(rng, caps)
    }

    fn run(case: &AdjointCase) -> Body {
        let (p, f) = (case.adj.left(), case.adj.right());
        let col = match comma_colimit(&case.ix, f) {
            None => return Err(Stop::Vacuous("some comma category has no initial object".into())),
            Some(r) => r?,
        };
        let inv = inverse_image_adjoint(&case.ix, &case.adj)?;
        let oracle = grothendieck(&col.indexed)?;
        let (oc, gp) = (oracle.coordinates().unwrap(), inv.bundle.coordinates().unwrap());
        let base = case.ix.base();
        let mut iso = Vec::new();
        for d in f.target().objects() {
            let i = base.find_iso(p.obj(d), col.apex[d.0]).ok_or_else(|| {
                Stop::Fail(format!("initial object of the comma category at {} is not p(d)", f.target().object_name(d)))
            })?;
            iso.push(case.ix.restriction(i));
        }
        let on_objects: Vec<Obj> = oc.objects.iter().map(|&(x, d)| gp.object(iso[d.0].obj(x), d)).collect();
        let ot = oracle.total();
        let on_arrows = ot
            .arrows()
            .map(|a| {
                let (u, h) = oc.arrows[a.0];
                let d = f.target().src(h);
                let key = (iso[d.0].arr(u), h, on_objects[ot.tgt(a).0]);
                gp.find_arrow(key.0, key.1, key.2)
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Stop::Fail("oracle arrow has no counterpart".into()))?;
        let phi = FinFunctor::new(ot.clone(), inv.bundle.total().clone(), on_objects, on_arrows)?;
        let w = is_equivalence(&phi);
        ensure(w.holds(), || format!("oracle comparison is not an equivalence: {w:?}"))?;
        let down = phi.then(inv.bundle.projection())?;
        ensure(
            down.object_map() == oracle.projection().object_map() && down.arrow_map() == oracle.projection().arrow_map(),
            || "projections do not commute".into(),
        )?;
        Ok(ot.object_count() + ot.arrow_count())
    }
}

property!(
    DirectImageContinuous,
    "prop-3.4",
    "the direct-image projection along a continuous functor is continuous for the Giraud topologies",
    BaseFibCase
);

impl DirectImageContinuous {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<BaseFibCase> {
        let s = gen::random_continuous(rng, caps)?;
        base_fib_case(rng, caps, s)
    }

    fn run(case: &BaseFibCase) -> Body {
        let q = direct_image_site(case)?;
        verdict(&q, is_continuous(&q), "q continuous")
    }
}

property!(
    DirectImageComorphism,
    "prop-4.2",
    "the direct-image projection along a comorphism is a comorphism for the Giraud topologies",
    BaseFibCase
);

impl DirectImageComorphism {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<BaseFibCase> {
        let s = gen::random_comorphism(rng, caps)?;
        base_fib_case(rng, caps, s)
    }

    fn run(case: &BaseFibCase) -> Body {
        let q = direct_image_site(case)?;
        verdict(&q, is_comorphism(&q), "q comorphism")
    }
}

property!(
    DirectImageDense,
    "prop-4.6",
    "the direct-image projection along a dense morphism is dense for the Giraud topologies",
    BaseFibCase
);

impl DirectImageDense {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<BaseFibCase> {
        let s = gen::random_dense_pair(rng, caps)?;
        base_fib_case(rng, caps, s)
    }

    fn run(case: &BaseFibCase) -> Body {
        let mut n = verdict(&case.s, is_dense_morphism(&case.s), "recipe not recognised as dense")?;
        let q = direct_image_site(case)?;
        n += verdict(&q, is_dense_morphism(&q), "q dense")?;
        Ok(n)
    }
}

property!(
    BaseChangeComposition,
    "prop-4.4",
    "base change along a composite is the composite of base changes",
    BaseChange
);

impl BaseChangeComposition {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<BaseChange> {
        let m = caps.base_objects;
        let case = match rng.gen_range(0..3) {
            0 => {
                let c = gen::random_category(rng, m);
                let indexed = gen::random_indexed(rng, &c, caps.fiber_objects)?;
                let c1 = gen::random_category(rng, m);
                let c2 = gen::random_category(rng, m);
                let second = gen::random_functor(rng, &c1, &c)?;
                let first = gen::random_functor(rng, &c2, &c1)?;
                BaseChangeCase::Direct { indexed, first, second }
            }
            1 => {
                let c = gen::random_poset_any(rng, m);
                let indexed = gen::random_indexed(rng, &c, caps.fiber_objects)?;
                let first = gen::random_galois_from(rng, &c, m)?;
                let c1 = first.left().source().clone();
                let second = gen::random_galois_from(rng, &c1, m)?;
                BaseChangeCase::Adjoint { indexed, first, second }
            }
            _ => {
                let (c0, c1, c2) = (
                    gen::random_category(rng, m),
                    gen::random_category(rng, m),
                    gen::random_category(rng, m),
                );
                let first = gen::random_functor(rng, &c0, &c1)?;
                let second = gen::random_functor(rng, &c1, &c2)?;
                let object = Obj(rng.gen_range(0..c0.object_count()));
                BaseChangeCase::Representable { first, second, object }
            }
        };
        Some(BaseChange(case))
    }

    fn run(case: &BaseChange) -> Body {
        let w = compose_base_change(&case.0)?;
        match (&case.0, w) {
            (BaseChangeCase::Direct { .. }, BaseChangeWitness::TableExact) => Ok(1),
            (BaseChangeCase::Direct { .. }, _) => Err(Stop::Fail("direct case is not table-exact".into())),
            (_, BaseChangeWitness::NaturalIso(t)) => {
                ensure(t.is_iso(), || "witness is not an isomorphism".into())?;
                Ok(1 + t.components().len())
            }
            (_, BaseChangeWitness::TableExact) => Err(Stop::Fail("expected a natural isomorphism".into())),
        }
    }
}

property!(
    Sheafify,
    "sheafify",
    "sheafification yields a sheaf with the universal unit",
    SheafCase
);

impl Sheafify {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<SheafCase> {
        let c = gen::random_category(rng, caps.base_objects.min(3));
        let j = gen::random_topology(rng, &c);
        let p = gen::random_presheaf(rng, &c);
        Some(SheafCase { j, p })
    }

    fn run(case: &SheafCase) -> Body {
        let a = sheafify(&case.p, &case.j)?;
        if let Err(e) = is_sheaf(&a.sheaf, &case.j) {
            return Err(Stop::Fail(format!("output is not a sheaf: {}", e.describe(&a.sheaf))));
        }
        ensure(is_sheaf_exhaustive(&a.sheaf, &case.j).is_ok(), || {
            "minimal-cover and exhaustive sheaf checks disagree".into()
        })?;
        if is_sheaf(&case.p, &case.j).is_ok() {
            ensure(a.unit.is_iso(), || "unit of a sheaf is not an isomorphism".into())?;
        }
        let (sheaves, truncated) = enumerate_sheaves(&case.j, 3, SHEAF_LIMIT);
        if truncated {
            return Err(Stop::Skipped("sheaf enumeration truncated".into()));
        }
        for q in &sheaves {
            check_unit_universal(&a, q)?;
        }
        Ok(3 + sheaves.len())
    }
}

property!(
    ContinuityCrosscheck,
    "continuity-crosscheck",
    "continuous functors preserve sheaves of size at most three under precomposition",
    FunctorCase
);

impl ContinuityCrosscheck {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<FunctorCase> {
        let s = if rng.gen_bool(0.7) {
            gen::random_continuous(rng, caps)?
        } else {
            gen::random_site_functor(rng, caps)?
        };
        Some(FunctorCase { s })
    }

    fn run(case: &FunctorCase) -> Body {
        let s = &case.s;
        if !is_continuous(s).holds {
            return Err(Stop::Vacuous("not continuous".into()));
        }
        let (sheaves, truncated) = enumerate_sheaves(&s.target, 3, SHEAF_LIMIT);
        if truncated {
            return Err(Stop::Skipped("sheaf enumeration truncated".into()));
        }
        for q in &sheaves {
            let back = precompose(q, &s.functor)?;
            if let Err(e) = is_sheaf(&back, &s.source) {
                return Err(Stop::Fail(format!("precomposed sheaf fails: {}", e.describe(&back))));
            }
        }
        Ok(sheaves.len())
    }
}

property!(
    GiraudContainment,
    "prop-4.12-containment",
    "the topology induced along a morphism of fibrations contains Giraud's",
    ContainmentCase
);

impl GiraudContainment {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<ContainmentCase> {
        let MorphismCase { j, fm } = random_morphism_case(rng, caps)?;
        let tgt = giraud_topology(&fm.target, &j).ok()?;
        let total = tgt.total();
        let gir = tgt.giraud().unwrap();
        let mut cov = gen::random_coverage(rng, total);
        for x in total.objects() {
            cov.add(x, gir.minimal_cover(x).arrows()).ok()?;
        }
        let k = saturate(&cov);
        Some(ContainmentCase { j, fm, k })
    }

    fn run(case: &ContainmentCase) -> Body {
        let (src, _, a) = case.fm.total()?;
        let a = a.retarget(a.source().clone(), case.k.base().clone())?;
        let induced = match induced_image_topology(&a, &case.k) {
            Ok(t) => t,
            Err(_) => return Err(Stop::Vacuous("induced topology not defined".into())),
        };
        let (_, gs) = giraud(src, &case.j)?;
        ensure(topology_leq(&gs, &induced)?, || {
            format!("Giraud {} not contained in induced {}", gs.display(), induced.display())
        })?;
        Ok(1)
    }
}

property!(
    ImageTopology,
    "prop-4.11",
    "a finite-limit preserving morphism of cartesian fibrations is a morphism of sites for the induced topology",
    MorphismCase
);

impl ImageTopology {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<MorphismCase> {
        let c = gen::random_lattice(rng, caps.base_objects);
        let j = gen::random_topology(rng, &c);
        let m = caps.fiber_objects;
        let ix = IndexedCategory::constant(&c, &chain(rng.gen_range(1..=m.min(2))));
        let k = chain(rng.gen_range(1..=(m / ix.fiber(Obj(0)).object_count()).clamp(1, 2)));
        let at = rng.gen_bool(0.5).then(|| Obj(rng.gen_range(0..k.object_count())));
        let fm = gen::product_morphism(&ix, &k, at)?;
        Some(MorphismCase { j, fm })
    }

    fn run(case: &MorphismCase) -> Body {
        let (src, tgt, a) = case.fm.total()?;
        if !has_finite_limits(src.total()) || !has_finite_limits(tgt.total()) || !preserves_finite_limits(&a) {
            return Err(Stop::Vacuous("not a finite-limit preserving functor of cartesian categories".into()));
        }
        let (_, k) = giraud(tgt, &case.j)?;
        let induced = induced_image_topology(&a, &k)?;
        if let Err(e) = is_topology(&induced.to_cover_family()) {
            return Err(Stop::Fail(format!("induced output: {}", e.describe(a.source()))));
        }
        let s = SiteFunctor::new(a, induced, k)?;
        Ok(1 + verdict(&s, is_morphism_of_sites(&s), "morphism of sites")?)
    }
}

property!(
    FiberwiseLimits,
    "prop-2.9",
    "pulling back along a cartesian functor keeps the indexed category cartesian; q preserves finite limits and reflects them jointly with p'",
    DirectCase
);

impl FiberwiseLimits {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<DirectCase> {
        let c = gen::random_lattice(rng, caps.base_objects);
        let d = gen::random_lattice(rng, caps.base_objects);
        let f = gen::random_functor(rng, &d, &c)?;
        let ix = if rng.gen_bool(0.5) {
            IndexedCategory::constant(&c, &chain(rng.gen_range(1..=caps.fiber_objects.min(3))))
        } else {
            IndexedCategory::representable(&c, Obj(rng.gen_range(0..c.object_count())))
        };
        Some(DirectCase { ix, f })
    }

    fn run(case: &DirectCase) -> Body {
        if !preserves_finite_limits(&case.f) || !is_cartesian_indexed(&case.ix) {
            return Err(Stop::Vacuous("not a cartesian functor and cartesian indexed category".into()));
        }
        let di = direct_image(&case.ix, &case.f)?;
        ensure(is_cartesian_indexed(&di.indexed), || "pullback is not cartesian".into())?;
        ensure(preserves_finite_limits(&di.q), || "q does not preserve finite limits".into())?;
        // q together with the projection onto the new base
        let (total, p) = (di.source.total(), di.source.projection());
        let mut n = 2;
        for k in all_cones(total) {
            if is_limit(di.target.total(), &k.map(&di.q)) && is_limit(p.target(), &k.map(p)) {
                ensure(is_limit(total, &k), || format!("q and p' do not jointly reflect {k:?}"))?;
                n += 1;
            }
        }
        if let Err(k) = reflects_finite_limits(&di.q) {
            return Err(Stop::Noted(format!("q alone does not reflect {k:?}")));
        }
        Ok(n)
    }
}

property!(
    FibrationSquare,
    "prop-3.3",
    "site-level conditions on the square of a fiberwise morphism",
    MorphismCase
);

impl FibrationSquare {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<MorphismCase> {
        random_morphism_case(rng, caps)
    }

    fn run(case: &MorphismCase) -> Body {
        let sq = gen::square_of(&case.fm, &case.j)?;
        let v = check_prop33_conditions(&sq);
        if v.holds {
            return Ok(v.checked);
        }
        let replays = v.witness.as_ref().map(|w| sq.replay(w)).unwrap_or(false);
        Err(Stop::Fail(format!("{v}; witness replays: {replays}")))
    }
}

property!(
    AdjointComparison,
    "remark-4.1b",
    "q is left adjoint to the comparison and both are morphisms of fibrations",
    AdjointCase
);

impl AdjointComparison {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<AdjointCase> {
        random_adjoint_case(rng, caps)
    }

    fn run(case: &AdjointCase) -> Body {
        let inv = inverse_image_adjoint(&case.ix, &case.adj)?;
        let adj = &inv.adjunction;
        ensure(check_adjunction(adj.left(), adj.right(), adj.unit(), adj.counit())?, || {
            "triangle identities fail".into()
        })?;
        let upper = inv.q.then(inv.original.projection())?;
        ensure(
            is_morphism_of_fibrations(&inv.q, case.adj.left(), &inv.bundle, &inv.original, &NatTransform::identity(&upper))?,
            || "q is not a morphism of fibrations".into(),
        )?;
        let upper = inv.comparison.then(inv.bundle.projection())?;
        ensure(
            is_morphism_of_fibrations(
                &inv.comparison,
                case.adj.right(),
                &inv.original,
                &inv.bundle,
                &NatTransform::identity(&upper),
            )?,
            || "the comparison is not a morphism of fibrations".into(),
        )?;
        Ok(3)
    }
}

property!(
    StructureFunctor,
    "sec-4.3-structure",
    "q composed with zeta equals the adjoint comparison",
    AdjointCase
);

impl StructureFunctor {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<AdjointCase> {
        random_adjoint_case(rng, caps)
    }

    fn run(case: &AdjointCase) -> Body {
        let sf = structure_functor(&case.ix, &case.adj)?;
        let inv = inverse_image_adjoint(&case.ix, &case.adj)?;
        let c = sf
            .composite
            .retarget(inv.comparison.source().clone(), inv.comparison.target().clone())?;
        ensure(c == inv.comparison, || "structure functor differs from the comparison".into())?;
        Ok(1)
    }
}

property!(
    CommaCategories,
    "comma-2.1",
    "comma categories have the triples as objects and commuting squares as arrows",
    CommaCase
);

impl CommaCategories {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<CommaCase> {
        let c = gen::random_category(rng, caps.base_objects);
        let a = gen::random_category(rng, caps.base_objects.min(3));
        let b = gen::random_category(rng, caps.base_objects.min(3));
        let f = gen::random_functor(rng, &a, &c)?;
        let g = gen::random_functor(rng, &b, &c)?;
        Some(CommaCase { f, g })
    }

    fn run(case: &CommaCase) -> Body {
        let k = comma_category(&case.f, &case.g)?;
        let oracle = comma_count(&case.f, &case.g);
        ensure(k.category.object_count() == oracle.objects, || {
            format!("{} objects, expected {}", k.category.object_count(), oracle.objects)
        })?;
        ensure(k.category.arrow_count() == oracle.arrows, || {
            format!("{} arrows, expected {}", k.category.arrow_count(), oracle.arrows)
        })?;
        let ours: std::collections::BTreeSet<Vec<_>> = connected_components(&k.category)
            .into_iter()
            .map(|comp| {
                let mut v: Vec<_> = comp.into_iter().map(|o| k.triples[o.0]).collect();
                v.sort();
                v
            })
            .collect();
        ensure(ours == oracle.components, || "connected components differ".into())?;
        Ok(3)
    }
}

property!(
    DenseTriangle,
    "prop-2.4",
    "continuity and morphism-of-sites are unchanged by composing with a dense morphism",
    TriangleCase
);

impl DenseTriangle {
    fn draw(rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<TriangleCase> {
        let i = gen::random_dense_pair(rng, caps)?;
        let d = gen::random_category(rng, caps.base_objects);
        let fp = gen::random_functor(rng, &d, i.source.base())?;
        let f_prime = SiteFunctor::new(fp, gen::random_topology(rng, &d), i.source.clone()).ok()?;
        let f = if rng.gen_bool(0.5) {
            let e = gen::random_category(rng, caps.base_objects);
            let g = gen::random_functor(rng, i.target.base(), &e)?;
            let s = SiteFunctor::new(g, i.target.clone(), gen::random_topology(rng, &e)).ok()?;
            is_continuous(&s).holds.then_some(s)
        } else {
            None
        };
        Some(TriangleCase { i, f_prime, f })
    }

    fn run(case: &TriangleCase) -> Body {
        if !is_dense_morphism(&case.i).holds {
            return Err(Stop::Vacuous("i not dense".into()));
        }
        let composite = SiteFunctor::new(
            case.f_prime.functor.then(&case.i.functor)?,
            case.f_prime.source.clone(),
            case.i.target.clone(),
        )?;
        let mut notes = Vec::new();
        let (a, b) = (is_continuous(&case.f_prime).holds, is_continuous(&composite).holds);
        if a != b {
            notes.push(format!("(i) F' continuous {a}, iF' continuous {b}"));
        }
        if a && b {
            let (a, b) = (
                is_morphism_of_sites(&case.f_prime).holds,
                is_morphism_of_sites(&composite).holds,
            );
            if a != b {
                notes.push(format!("(iii) F' morphism {a}, iF' morphism {b}"));
            }
        }
        if let Some(f) = &case.f {
            let fi = SiteFunctor::new(case.i.functor.then(&f.functor)?, case.i.source.clone(), f.target.clone())?;
            let (a, b) = (is_morphism_of_sites(f).holds, is_morphism_of_sites(&fi).holds);
            if a != b {
                notes.push(format!("(ii) F morphism {a}, Fi morphism {b}"));
            }
        }
        if notes.is_empty() {
            Ok(3)
        } else {
            Err(Stop::Noted(notes.join("; ")))
        }
    }
}

/// Every experiment, in registry order.
pub fn experiments() -> Vec<Box<dyn Experiment>> {
    vec![
        Box::new(Registered(TopologySoundness)),
        Box::new(Registered(GiraudMinimality)),
        Box::new(Registered(GiraudContinuity)),
        Box::new(Registered(GrothendieckFibration)),
        Box::new(Registered(DirectImageReflects)),
        Box::new(Registered(AdjointAgreement)),
        Box::new(Registered(DirectImageContinuous)),
        Box::new(Registered(DirectImageComorphism)),
        Box::new(Registered(DirectImageDense)),
        Box::new(Registered(BaseChangeComposition)),
        Box::new(Registered(Sheafify)),
        Box::new(Registered(ContinuityCrosscheck)),
        Box::new(Registered(GiraudContainment)),
        Box::new(Registered(ImageTopology)),
        Box::new(Registered(FiberwiseLimits)),
        Box::new(Registered(FibrationSquare)),
        Box::new(Registered(AdjointComparison)),
        Box::new(Registered(StructureFunctor)),
        Box::new(Registered(CommaCategories)),
        Box::new(Registered(DenseTriangle)),
    ]
}

pub fn experiment(id: &str) -> Option<Box<dyn Experiment>> {
    experiments().into_iter().find(|e| e.id() == id)
}

pub fn experiment_ids() -> Vec<&'static str> {
    experiments().iter().map(|e| e.id()).collect()
}

/// Statements the suite must cover, with the experiments covering each.
pub const COVERAGE: &[(&str, &[&str])] = &[
    ("comma categories", &["comma-2.1"]),
    ("cartesian arrows and fibrations", &["prop-2.1"]),
    ("morphisms of fibrations", &["prop-2.1", "remark-4.1b"]),
    ("Giraud topology", &["def-2.5-minimality", "topology-soundness"]),
    ("comorphism condition", &["def-2.5-minimality", "prop-4.2"]),
    ("continuity as cover preservation", &["thm-2.3", "continuity-crosscheck"]),
    ("dense triangle", &["prop-2.4"]),
    ("direct image", &["prop-2.5"]),
    ("adjoint-case inverse image", &["prop-2.7-agreement"]),
    ("cartesian fibrations and fibrewise limits", &["prop-2.9"]),
    ("site-level conditions of the fibration square", &["prop-3.3"]),
    ("continuity of the direct-image projection", &["prop-3.4"]),
    ("direct-image projection as comorphism", &["prop-4.2"]),
    ("composition of base change", &["prop-4.4"]),
    ("dense direct images", &["prop-4.6"]),
    ("adjoint comparison functors", &["remark-4.1b"]),
    ("structure functor", &["sec-4.3-structure"]),
    ("image topology", &["prop-4.11"]),
    ("containment of Giraud's topology", &["prop-4.12-containment"]),
    ("sheafification", &["sheafify"]),
];

/// Labels in [`COVERAGE`] naming an id that is not registered.
pub fn coverage_gaps() -> Vec<&'static str> {
    let ids = experiment_ids();
    COVERAGE
        .iter()
        .filter(|(_, need)| need.iter().any(|id| !ids.contains(id)))
        .map(|(label, _)| *label)
        .collect()
}

