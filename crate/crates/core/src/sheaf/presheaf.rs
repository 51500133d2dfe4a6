use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{same_category, Arr, FinCategory, FinFunctor, Obj};

/// A finite-set-valued presheaf. Elements of `P(c)` are `0..size(c)`, each
/// with a display label; `action(f)` for `f: c -> c'` maps `P(c')` to `P(c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presheaf {
    base: Arc<FinCategory>,
    labels: Vec<Vec<String>>,
    actions: Vec<Vec<usize>>,
}

impl Presheaf {
    pub fn new(base: &Arc<FinCategory>, labels: Vec<Vec<String>>, actions: Vec<Vec<usize>>) -> Result<Self> {
        if labels.len() != base.object_count() {
            return Err(Error::Presheaf(format!(
                "{} value sets for {} objects",
                labels.len(),
                base.object_count()
            )));
        }
        if actions.len() != base.arrow_count() {
            return Err(Error::Presheaf(format!(
                "{} actions for {} arrows",
                actions.len(),
                base.arrow_count()
            )));
        }
        for (c, l) in labels.iter().enumerate() {
            for (i, x) in l.iter().enumerate() {
                if l[..i].contains(x) {
                    return Err(Error::Presheaf(format!(
                        "duplicate element `{x}` at `{}`",
                        base.object_name(Obj(c))
                    )));
                }
            }
        }
        for f in base.arrows() {
            let (s, t) = (base.src(f), base.tgt(f));
            let act = &actions[f.0];
            if act.len() != labels[t.0].len() || act.iter().any(|&x| x >= labels[s.0].len()) {
                return Err(Error::Presheaf(format!(
                    "action of `{}` is not a function from P({}) to P({})",
                    base.arrow_name(f),
                    base.object_name(t),
                    base.object_name(s)
                )));
            }
        }
        let p = Presheaf {
            base: base.clone(),
            labels,
            actions,
        };
        p.check_functorial()?;
        Ok(p)
    }

    /// Elements labelled `0, 1, ...`.
    pub fn from_sizes(base: &Arc<FinCategory>, sizes: &[usize], actions: Vec<Vec<usize>>) -> Result<Self> {
        let labels = sizes.iter().map(|&n| (0..n).map(|i| i.to_string()).collect()).collect();
        Self::new(base, labels, actions)
    }

    pub(crate) fn new_unchecked(base: &Arc<FinCategory>, labels: Vec<Vec<String>>, actions: Vec<Vec<usize>>) -> Self {
        let p = Presheaf {
            base: base.clone(),
            labels,
            actions,
        };
        debug_assert!(p.check_functorial().is_ok());
        p
    }

    fn check_functorial(&self) -> Result<()> {
        let c = &*self.base;
        for o in c.objects() {
            let act = &self.actions[c.identity(o).0];
            if act.iter().enumerate().any(|(i, &x)| i != x) {
                return Err(Error::Presheaf(format!(
                    "identity of `{}` does not act as the identity",
                    c.object_name(o)
                )));
            }
        }
        for g in c.arrows() {
            for &f in c.arrows_into(c.src(g)) {
                let h = c.comp(g, f);
                for x in 0..self.size(c.tgt(g)) {
                    if self.act(h, x) != self.act(f, self.act(g, x)) {
                        return Err(Error::Presheaf(format!(
                            "action of `{}` is not the action of `{}` followed by `{}`",
                            c.arrow_name(h),
                            c.arrow_name(g),
                            c.arrow_name(f)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `hom(-, d)`, elements labelled by arrow names.
    pub fn representable(base: &Arc<FinCategory>, d: Obj) -> Self {
        let labels: Vec<Vec<String>> = base
            .objects()
            .map(|c| base.hom(c, d).iter().map(|&a| base.arrow_name(a).to_string()).collect())
            .collect();
        let actions = base
            .arrows()
            .map(|f| {
                let src_hom = base.hom(base.src(f), d);
                base.hom(base.tgt(f), d)
                    .iter()
                    .map(|&g| src_hom.binary_search(&base.comp(g, f)).unwrap())
                    .collect()
            })
            .collect();
        Self::new_unchecked(base, labels, actions)
    }

    /// The constant singleton presheaf.
    pub fn terminal(base: &Arc<FinCategory>) -> Self {
        let labels = vec![vec!["*".to_string()]; base.object_count()];
        Self::new_unchecked(base, labels, vec![vec![0]; base.arrow_count()])
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn size(&self, c: Obj) -> usize {
        self.labels[c.0].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn labels(&self, c: Obj) -> &[String] {
        &self.labels[c.0]
    }

    pub fn element_named(&self, c: Obj, name: &str) -> Option<usize> {
        self.labels[c.0].iter().position(|l| l == name)
    }

    /// `P(f)(x)`.
    pub fn act(&self, f: Arr, x: usize) -> usize {
        self.actions[f.0][x]
    }

    pub fn action(&self, f: Arr) -> &[usize] {
        &self.actions[f.0]
    }

    /// Same presheaf over a structurally equal base.
    pub fn rebase(&self, base: &Arc<FinCategory>) -> Result<Self> {
        if !same_category(&self.base, base) {
            return Err(Error::Mismatch("presheaf base differs".into()));
        }
        Ok(Presheaf {
            base: base.clone(),
            labels: self.labels.clone(),
            actions: self.actions.clone(),
        })
    }
}

/// `P . F^op`.
pub fn precompose(p: &Presheaf, f: &FinFunctor) -> Result<Presheaf> {
    if !same_category(f.target(), p.base()) {
        return Err(Error::Mismatch("functor does not land in the presheaf's base".into()));
    }
    let c = f.source();
    let labels = c.objects().map(|o| p.labels(f.obj(o)).to_vec()).collect();
    let actions = c.arrows().map(|a| p.action(f.arr(a)).to_vec()).collect();
    Ok(Presheaf::new_unchecked(c, labels, actions))
}

/// A natural transformation between presheaves on the same base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresheafMap {
    source: Presheaf,
    target: Presheaf,
    components: Vec<Vec<usize>>,
}

impl PresheafMap {
    pub fn new(source: &Presheaf, target: &Presheaf, components: Vec<Vec<usize>>) -> Result<Self> {
        if !same_category(source.base(), target.base()) {
            return Err(Error::Mismatch("presheaf map between different bases".into()));
        }
        let c = source.base();
        if components.len() != c.object_count() {
            return Err(Error::Presheaf("one component per object expected".into()));
        }
        for o in c.objects() {
            let comp = &components[o.0];
            if comp.len() != source.size(o) || comp.iter().any(|&y| y >= target.size(o)) {
                return Err(Error::Presheaf(format!(
                    "component at `{}` is not a function",
                    c.object_name(o)
                )));
            }
        }
        for f in c.arrows() {
            let (s, t) = (c.src(f), c.tgt(f));
            for x in 0..source.size(t) {
                if components[s.0][source.act(f, x)] != target.act(f, components[t.0][x]) {
                    return Err(Error::Presheaf(format!(
                        "naturality fails at `{}`",
                        c.arrow_name(f)
                    )));
                }
            }
        }
        Ok(PresheafMap {
            source: source.clone(),
            target: target.clone(),
            components,
        })
    }

    pub(crate) fn new_unchecked(source: &Presheaf, target: &Presheaf, components: Vec<Vec<usize>>) -> Self {
        PresheafMap {
            source: source.clone(),
            target: target.clone(),
            components,
        }
    }

    pub fn identity(p: &Presheaf) -> Self {
        let components = p.base().objects().map(|o| (0..p.size(o)).collect()).collect();
        Self::new_unchecked(p, p, components)
    }

    pub fn source(&self) -> &Presheaf {
        &self.source
    }

    pub fn target(&self) -> &Presheaf {
        &self.target
    }

    pub fn component(&self, c: Obj) -> &[usize] {
        &self.components[c.0]
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    /// `next . self`.
    pub fn then(&self, next: &PresheafMap) -> Result<PresheafMap> {
        if self.target != next.source {
            return Err(Error::Mismatch("presheaf maps do not compose".into()));
        }
        let components = self
            .components
            .iter()
            .enumerate()
            .map(|(c, comp)| comp.iter().map(|&x| next.components[c][x]).collect())
            .collect();
        Ok(Self::new_unchecked(&self.source, &next.target, components))
    }

    /// Every component is a bijection.
    pub fn is_iso(&self) -> bool {
        self.source.base().objects().all(|o| {
            let comp = &self.components[o.0];
            let mut seen = vec![false; self.target.size(o)];
            comp.len() == seen.len() && comp.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn representable_on_walk2() {
        let w = corpus::walk2();
        let b = w.object_named("b").unwrap();
        let y = Presheaf::representable(&w, b);
        assert_eq!(y.sizes(), vec![1, 1]);
        let split = corpus::split_epi();
        for d in split.objects() {
            let y = Presheaf::representable(&split, d);
            assert!(Presheaf::new(&split, (0..2).map(|c| y.labels(Obj(c)).to_vec()).collect(), split.arrows().map(|f| y.action(f).to_vec()).collect()).is_ok());
        }
    }

    #[test]
    fn functoriality_is_checked() {
        let c = corpus::split_epi();
        // P(a) = P(b) = {0, 1}; e.s = id_b forces P(s) . P(e) = id
        let mut actions = vec![vec![0, 1]; c.arrow_count()];
        actions[corpus::arrow(&c, "e").0] = vec![1, 0];
        assert!(Presheaf::from_sizes(&c, &[2, 2], actions.clone()).is_err());
        actions[corpus::arrow(&c, "s").0] = vec![1, 0];
        assert!(Presheaf::from_sizes(&c, &[2, 2], actions).is_ok());
        let w = corpus::walk2();
        assert!(Presheaf::from_sizes(&w, &[1, 2], vec![vec![0], vec![0, 2], vec![0, 0]]).is_err());
    }

    #[test]
    fn precompose_examples() {
        let w = corpus::walk2();
        let p = Presheaf::from_sizes(&w, &[1, 2], vec![vec![0], vec![0, 1], vec![0, 0]]).unwrap();
        assert_eq!(precompose(&p, &FinFunctor::identity(&w)).unwrap(), p);
        let q = precompose(&p, &corpus::pick(&w, "b")).unwrap();
        assert_eq!(q.sizes(), vec![2]);
        // functorial in the functor
        let one = corpus::one();
        let f = corpus::bang(&w).then(&corpus::pick(&w, "b")).unwrap();
        let _ = one;
        assert_eq!(
            precompose(&p, &f).unwrap(),
            precompose(&precompose(&p, &corpus::pick(&w, "b")).unwrap(), &corpus::bang(&w)).unwrap()
        );
    }

    #[test]
    fn maps_compose_and_invert() {
        let w = corpus::walk2();
        let p = Presheaf::from_sizes(&w, &[1, 2], vec![vec![0], vec![0, 1], vec![0, 0]]).unwrap();
        let id = PresheafMap::identity(&p);
        assert!(id.is_iso());
        assert_eq!(id.then(&id).unwrap(), id);
        let t = Presheaf::terminal(&w);
        let bang = PresheafMap::new(&p, &t, vec![vec![0], vec![0, 0]]).unwrap();
        assert!(!bang.is_iso());
        assert!(PresheafMap::new(&t, &p, vec![vec![0], vec![1]]).is_ok());
    }
}
