//! Instance types of the experiments and their shrinking candidates.

use super::gen::FiberMorphism;
use super::{show, Case};
use crate::fibration::{BaseChangeCase, IndexedCategory};
use crate::fincat::{full_subcategory, Adjunction, Arr, FinCategory, FinFunctor, Obj};
use crate::sheaf::{precompose, Presheaf};
use crate::sieve::{induced_image_topology, Coverage, Topology};
use crate::verify::SiteFunctor;

/// Every object list with one object removed.
fn deletions(c: &FinCategory) -> Vec<Vec<Obj>> {
    if c.object_count() <= 1 {
        return Vec::new();
    }
    c.objects()
        .map(|o| c.objects().filter(|&x| x != o).collect())
        .collect()
}

/// The full subcategory on `keep` with the topology induced along its
/// inclusion, when that is a topology.
fn restrict_site(j: &Topology, keep: &[Obj]) -> Option<(FinFunctor, Topology)> {
    let (_, inc) = full_subcategory(j.base(), keep).ok()?;
    let k = induced_image_topology(&inc, j).ok()?;
    Some((inc, k))
}

/// `f` with its target cut down along the inclusion `inc`, when `f` lands there.
fn corestrict(f: &FinFunctor, inc: &FinFunctor) -> Option<FinFunctor> {
    let objs = f
        .object_map()
        .iter()
        .map(|o| inc.object_map().iter().position(|x| x == o).map(Obj))
        .collect::<Option<Vec<_>>>()?;
    let arrs = f
        .arrow_map()
        .iter()
        .map(|a| inc.arrow_map().iter().position(|x| x == a).map(Arr))
        .collect::<Option<Vec<_>>>()?;
    FinFunctor::new(f.source().clone(), inc.source().clone(), objs, arrs).ok()
}

#[cfg(test)]
pub(crate) fn shrink_site(j: &Topology) -> Vec<Topology> {
    deletions(j.base())
        .iter()
        .filter_map(|keep| restrict_site(j, keep).map(|(_, k)| k))
        .collect()
}

fn shrink_source(s: &SiteFunctor) -> Vec<SiteFunctor> {
    deletions(s.functor.source())
        .iter()
        .filter_map(|keep| {
            let (inc, j) = restrict_site(&s.source, keep)?;
            SiteFunctor::new(inc.then(&s.functor).ok()?, j, s.target.clone()).ok()
        })
        .collect()
}

fn shrink_target(s: &SiteFunctor) -> Vec<SiteFunctor> {
    deletions(s.functor.target())
        .iter()
        .filter_map(|keep| {
            let (inc, k) = restrict_site(&s.target, keep)?;
            let f = corestrict(&s.functor, &inc)?;
            SiteFunctor::new(f, s.source.clone(), k).ok()
        })
        .collect()
}

/// Coverage, indexed category over its base, and a functor into the base.
pub(crate) struct SoundnessCase {
    pub cov: Coverage,
    pub ix: IndexedCategory,
    pub f: Option<FinFunctor>,
}

impl Case for SoundnessCase {
    fn describe(&self) -> String {
        let c = self.cov.base();
        let mut out = format!("category {}\n", show::category(c));
        for x in c.objects() {
            for fam in self.cov.families(x) {
                let names: Vec<&str> = fam.iter().map(|&a| c.arrow_name(a)).collect();
                out.push_str(&format!("generator at {}: {{{}}}\n", c.object_name(x), names.join(",")));
            }
        }
        out.push_str(&show::indexed(&self.ix));
        if let Some(f) = &self.f {
            out.push_str(&format!("functor from {}: {}\n", show::category(f.source()), show::functor(f)));
        }
        out
    }

    fn shrink(&self) -> Vec<Self> {
        let c = self.cov.base();
        deletions(c)
            .iter()
            .filter_map(|keep| {
                let (_, inc) = full_subcategory(c, keep).ok()?;
                let sub = inc.source();
                let mut cov = Coverage::new(sub);
                for (i, &x) in keep.iter().enumerate() {
                    for fam in self.cov.families(x) {
                        let kept = fam
                            .iter()
                            .filter_map(|a| inc.arrow_map().iter().position(|b| b == a).map(Arr))
                            .collect();
                        cov.add(Obj(i), kept).ok()?;
                    }
                }
                Some(SoundnessCase {
                    cov,
                    ix: self.ix.precompose(&inc).ok()?,
                    f: self.f.as_ref().and_then(|f| corestrict(f, &inc)),
                })
            })
            .collect()
    }
}

pub(crate) struct FibCase {
    pub ix: IndexedCategory,
    pub j: Topology,
}

impl Case for FibCase {
    fn describe(&self) -> String {
        format!("{}{}", show::indexed(&self.ix), show::site(&self.j))
    }

    fn shrink(&self) -> Vec<Self> {
        let mut out: Vec<FibCase> = deletions(self.j.base())
            .iter()
            .filter_map(|keep| {
                let (inc, j) = restrict_site(&self.j, keep)?;
                Some(FibCase {
                    ix: self.ix.precompose(&inc).ok()?,
                    j,
                })
            })
            .collect();
        // drop one fiber object where the rest stays stable under restriction
        let base = self.ix.base();
        for c in base.objects() {
            for keep in deletions(self.ix.fiber(c)) {
                let all: Vec<Vec<Obj>> = base
                    .objects()
                    .map(|d| if d == c { keep.clone() } else { self.ix.fiber(d).objects().collect() })
                    .collect();
                if let Ok((ix, _)) = self.ix.sub(&all) {
                    out.push(FibCase { ix, j: self.j.clone() });
                }
            }
        }
        out
    }
}

pub(crate) struct FunctorCase {
    pub s: SiteFunctor,
}

impl Case for FunctorCase {
    fn describe(&self) -> String {
        show::site_functor(&self.s)
    }

    fn shrink(&self) -> Vec<Self> {
        let mut v = shrink_source(&self.s);
        v.extend(shrink_target(&self.s));
        v.into_iter().map(|s| FunctorCase { s }).collect()
    }
}

/// A base site functor and an indexed category over its target.
pub(crate) struct BaseFibCase {
    pub s: SiteFunctor,
    pub ix: IndexedCategory,
}

impl Case for BaseFibCase {
    fn describe(&self) -> String {
        format!("{}{}", show::site_functor(&self.s), show::indexed(&self.ix))
    }

    fn shrink(&self) -> Vec<Self> {
        shrink_source(&self.s)
            .into_iter()
            .map(|s| BaseFibCase { s, ix: self.ix.clone() })
            .collect()
    }
}

pub(crate) struct MorphismCase {
    pub j: Topology,
    pub fm: FiberMorphism,
}

impl Case for MorphismCase {
    fn describe(&self) -> String {
        format!("{}{}", show::site(&self.j), self.fm.describe())
    }

    fn shrink(&self) -> Vec<Self> {
        deletions(self.j.base())
            .iter()
            .filter_map(|keep| {
                let (inc, j) = restrict_site(&self.j, keep)?;
                Some(MorphismCase {
                    j,
                    fm: self.fm.precompose(&inc).ok()?,
                })
            })
            .collect()
    }
}

/// As [`MorphismCase`] with a topology `k` on the target total category.
pub(crate) struct ContainmentCase {
    pub j: Topology,
    pub fm: FiberMorphism,
    pub k: Topology,
}

impl Case for ContainmentCase {
    fn describe(&self) -> String {
        format!(
            "{}{}K on the target total category: {}\n",
            show::site(&self.j),
            self.fm.describe(),
            self.k.display()
        )
    }
}

/// An indexed category and a functor into its base.
pub(crate) struct DirectCase {
    pub ix: IndexedCategory,
    pub f: FinFunctor,
}

impl Case for DirectCase {
    fn describe(&self) -> String {
        format!(
            "{}functor from {}: {}\n",
            show::indexed(&self.ix),
            show::category(self.f.source()),
            show::functor(&self.f)
        )
    }

    fn shrink(&self) -> Vec<Self> {
        deletions(self.f.source())
            .iter()
            .filter_map(|keep| {
                let (_, inc) = full_subcategory(self.f.source(), keep).ok()?;
                Some(DirectCase {
                    ix: self.ix.clone(),
                    f: inc.then(&self.f).ok()?,
                })
            })
            .collect()
    }
}

/// `adj` is `p ⊣ F` with `p: D -> C`; `ix` is indexed over `C`.
pub(crate) struct AdjointCase {
    pub adj: Adjunction,
    pub ix: IndexedCategory,
}

impl Case for AdjointCase {
    fn describe(&self) -> String {
        format!("{}{}", show::adjunction(&self.adj), show::indexed(&self.ix))
    }
}

pub(crate) struct SheafCase {
    pub j: Topology,
    pub p: Presheaf,
}

impl Case for SheafCase {
    fn describe(&self) -> String {
        format!("{}presheaf {}\n", show::site(&self.j), show::presheaf(&self.p))
    }

    fn shrink(&self) -> Vec<Self> {
        deletions(self.j.base())
            .iter()
            .filter_map(|keep| {
                let (inc, j) = restrict_site(&self.j, keep)?;
                Some(SheafCase {
                    p: precompose(&self.p, &inc).ok()?,
                    j,
                })
            })
            .collect()
    }
}

/// Two functors with a common target.
pub(crate) struct CommaCase {
    pub f: FinFunctor,
    pub g: FinFunctor,
}

impl Case for CommaCase {
    fn describe(&self) -> String {
        format!(
            "target {}\nF from {}: {}\nG from {}: {}\n",
            show::category(self.f.target()),
            show::category(self.f.source()),
            show::functor(&self.f),
            show::category(self.g.source()),
            show::functor(&self.g)
        )
    }

    fn shrink(&self) -> Vec<Self> {
        let cut = |h: &FinFunctor| -> Vec<FinFunctor> {
            deletions(h.source())
                .iter()
                .filter_map(|keep| full_subcategory(h.source(), keep).ok()?.1.then(h).ok())
                .collect()
        };
        let mut out: Vec<CommaCase> = cut(&self.f)
            .into_iter()
            .map(|f| CommaCase { f, g: self.g.clone() })
            .collect();
        out.extend(cut(&self.g).into_iter().map(|g| CommaCase { f: self.f.clone(), g }));
        out
    }
}

pub(crate) struct BaseChange(pub BaseChangeCase);

impl Case for BaseChange {
    fn describe(&self) -> String {
        match &self.0 {
            BaseChangeCase::Direct { indexed, first, second } => format!(
                "direct\n{}first: {}\nsecond: {}\n",
                show::indexed(indexed),
                show::functor(first),
                show::functor(second)
            ),
            BaseChangeCase::Adjoint { indexed, first, second } => format!(
                "adjoint\n{}first: {}second: {}",
                show::indexed(indexed),
                show::adjunction(first),
                show::adjunction(second)
            ),
            BaseChangeCase::Representable { first, second, object } => format!(
                "representable at {}\nfirst: {}\nsecond: {}\n",
                first.source().object_name(*object),
                show::functor(first),
                show::functor(second)
            ),
        }
    }
}

/// Dense `i: C' -> C`, a functor `F': D' -> C'` and possibly `F: C -> D`.
pub(crate) struct TriangleCase {
    pub i: SiteFunctor,
    pub f_prime: SiteFunctor,
    pub f: Option<SiteFunctor>,
}

impl Case for TriangleCase {
    fn describe(&self) -> String {
        let mut out = format!(
            "i:\n{}F':\n{}",
            show::site_functor(&self.i),
            show::site_functor(&self.f_prime)
        );
        if let Some(f) = &self.f {
            out.push_str(&format!("F:\n{}", show::site_functor(f)));
        }
        out
    }
}
