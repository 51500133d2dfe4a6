use std::sync::Arc;

use super::{is_sheaf, Presheaf, PresheafMap, Sheafification};
use crate::error::{Error, Result};
use crate::fincat::{Arr, FinCategory};
use crate::sieve::Topology;

/// Default bound on value-set sizes for exhaustive searches.
pub const DEFAULT_BOUND: usize = 3;

/// Every presheaf on `base` with value sets of size at most `bound`, in a
/// deterministic order, stopping after `limit` of them. The flag reports
/// truncation.
pub fn enumerate_presheaves(base: &Arc<FinCategory>, bound: usize, limit: usize) -> (Vec<Presheaf>, bool) {
    let n = base.object_count();
    let mut out = Vec::new();
    let mut sizes = vec![0usize; n];
    loop {
        if !enumerate_actions(base, &sizes, limit, &mut out) {
            return (out, true);
        }
        // next size vector in odometer order
        let mut i = 0;
        while i < n && sizes[i] == bound {
            sizes[i] = 0;
            i += 1;
        }
        if i == n {
            return (out, false);
        }
        sizes[i] += 1;
    }
}

fn enumerate_actions(base: &Arc<FinCategory>, sizes: &[usize], limit: usize, out: &mut Vec<Presheaf>) -> bool {
    let arrows: Vec<Arr> = base.arrows().filter(|&a| !base.is_identity(a)).collect();
    let mut actions: Vec<Option<Vec<usize>>> = vec![None; base.arrow_count()];
    for o in base.objects() {
        actions[base.identity(o).0] = Some((0..sizes[o.0]).collect());
    }
    fn consistent(c: &FinCategory, actions: &[Option<Vec<usize>>], a: Arr) -> bool {
        // every composite g.f = h involving `a` with all three actions known
        let check = |g: Arr, f: Arr| -> bool {
            let h = c.comp(g, f);
            match (&actions[g.0], &actions[f.0], &actions[h.0]) {
                (Some(ag), Some(af), Some(ah)) => ah.iter().enumerate().all(|(x, &y)| af[ag[x]] == y),
                _ => true,
            }
        };
        c.arrows_from(c.tgt(a)).iter().all(|&g| check(g, a))
            && c.arrows_into(c.src(a)).iter().all(|&f| check(a, f))
            && c.arrows().all(|g| c.arrows_into(c.src(g)).iter().all(|&f| c.comp(g, f) != a || check(g, f)))
    }
    fn go(
        c: &Arc<FinCategory>,
        sizes: &[usize],
        arrows: &[Arr],
        i: usize,
        actions: &mut Vec<Option<Vec<usize>>>,
        limit: usize,
        out: &mut Vec<Presheaf>,
    ) -> bool {
        if i == arrows.len() {
            if out.len() >= limit {
                return false;
            }
            let labels = sizes.iter().map(|&n| (0..n).map(|k| k.to_string()).collect()).collect();
            let acts = actions.iter().map(|a| a.clone().unwrap()).collect();
            out.push(Presheaf::new_unchecked(c, labels, acts));
            return true;
        }
        let a = arrows[i];
        let (dom, cod) = (sizes[c.tgt(a).0], sizes[c.src(a).0]);
        if dom > 0 && cod == 0 {
            return true;
        }
        let mut f = vec![0usize; dom];
        loop {
            actions[a.0] = Some(f.clone());
            if consistent(c, actions, a) && !go(c, sizes, arrows, i + 1, actions, limit, out) {
                actions[a.0] = None;
                return false;
            }
            let mut k = 0;
            while k < dom && f[k] + 1 == cod {
                f[k] = 0;
                k += 1;
            }
            if k == dom {
                break;
            }
            f[k] += 1;
        }
        actions[a.0] = None;
        true
    }
    go(base, sizes, &arrows, 0, &mut actions, limit, out)
}

/// Sheaves among [`enumerate_presheaves`].
pub fn enumerate_sheaves(j: &Topology, bound: usize, limit: usize) -> (Vec<Presheaf>, bool) {
    let (all, truncated) = enumerate_presheaves(j.base(), bound, limit.saturating_mul(64));
    let mut out: Vec<Presheaf> = all.into_iter().filter(|p| is_sheaf(p, j).is_ok()).collect();
    let cut = out.len() > limit;
    out.truncate(limit);
    (out, truncated || cut)
}

/// Every natural transformation `p -> q`, stopping after `limit`.
pub fn natural_maps(p: &Presheaf, q: &Presheaf, limit: usize) -> Vec<PresheafMap> {
    let c = p.base();
    let objs: Vec<_> = c.objects().collect();
    let mut comps: Vec<Option<Vec<usize>>> = vec![None; objs.len()];
    let mut out = Vec::new();
    fn natural_at(c: &FinCategory, p: &Presheaf, q: &Presheaf, comps: &[Option<Vec<usize>>], o: usize) -> bool {
        let check = |f: Arr| -> bool {
            let (s, t) = (c.src(f), c.tgt(f));
            match (&comps[s.0], &comps[t.0]) {
                (Some(cs), Some(ct)) => (0..p.size(t)).all(|x| cs[p.act(f, x)] == q.act(f, ct[x])),
                _ => true,
            }
        };
        let o = crate::fincat::Obj(o);
        c.arrows_into(o).iter().all(|&f| check(f)) && c.arrows_from(o).iter().all(|&f| check(f))
    }
    fn go(
        c: &FinCategory,
        p: &Presheaf,
        q: &Presheaf,
        i: usize,
        comps: &mut Vec<Option<Vec<usize>>>,
        limit: usize,
        out: &mut Vec<PresheafMap>,
    ) -> bool {
        if i == comps.len() {
            if out.len() >= limit {
                return false;
            }
            let cs = comps.iter().map(|x| x.clone().unwrap()).collect();
            out.push(PresheafMap::new_unchecked(p, q, cs));
            return true;
        }
        let o = crate::fincat::Obj(i);
        let (dom, cod) = (p.size(o), q.size(o));
        if dom > 0 && cod == 0 {
            return true;
        }
        let mut f = vec![0usize; dom];
        loop {
            comps[i] = Some(f.clone());
            if natural_at(c, p, q, comps, i) && !go(c, p, q, i + 1, comps, limit, out) {
                comps[i] = None;
                return false;
            }
            let mut k = 0;
            while k < dom && f[k] + 1 == cod {
                f[k] = 0;
                k += 1;
            }
            if k == dom {
                break;
            }
            f[k] += 1;
        }
        comps[i] = None;
        true
    }
    go(c, p, q, 0, &mut comps, limit, &mut out);
    out
}

/// Checks that every map from the original presheaf to the sheaf `q`
/// factors through the unit in exactly one way.
pub fn check_unit_universal(a: &Sheafification, q: &Presheaf) -> Result<()> {
    let p = a.unit.source();
    let direct = natural_maps(p, q, usize::MAX);
    let through = natural_maps(&a.sheaf, q, usize::MAX);
    let mut hits = vec![0usize; direct.len()];
    for psi in &through {
        let composite = a.unit.then(psi)?;
        match direct.iter().position(|phi| *phi == composite) {
            Some(i) => hits[i] += 1,
            None => return Err(Error::Presheaf("a composite through the unit is not natural".into())),
        }
    }
    match hits.iter().position(|&h| h != 1) {
        None => Ok(()),
        Some(i) => Err(Error::Presheaf(format!(
            "a map into the sheaf has {} factorisations through the unit (component sizes {:?})",
            hits[i],
            direct[i].components().iter().map(Vec::len).collect::<Vec<_>>()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::fincat::Obj;
    use crate::sheaf::{is_sheaf_exhaustive, sheafify};
    use crate::sieve::Sieve;

    #[test]
    fn presheaf_counts_on_small_bases() {
        // on One: value sets of size 0..=2 with identity action
        let (ps, t) = enumerate_presheaves(&corpus::one(), 2, 100);
        assert_eq!((ps.len(), t), (3, false));
        // on Walk2 with bound 2: sum over (|a|, |b|) of |a|^|b|
        let (ps, _) = enumerate_presheaves(&corpus::walk2(), 2, 1000);
        let expect: usize = (0..=2usize)
            .flat_map(|a| (0..=2u32).map(move |b| a.pow(b)))
            .sum();
        assert_eq!(ps.len(), expect);
        // on Z/2: involutions on sets of size <= 3: 1 + 1 + 2 + 4
        let (ps, _) = enumerate_presheaves(&corpus::z2_group(), 3, 1000);
        assert_eq!(ps.len(), 8);
        let (ps, t) = enumerate_presheaves(&corpus::walk2(), 3, 5);
        assert_eq!((ps.len(), t), (5, true));
    }

    #[test]
    fn natural_map_counts() {
        let w = corpus::walk2();
        let y = Presheaf::representable(&w, Obj(1));
        let p = Presheaf::from_sizes(&w, &[2, 3], vec![vec![0, 1], vec![0, 1, 2], vec![0, 1, 1]]).unwrap();
        // Yoneda: maps y(b) -> P are P(b)
        assert_eq!(natural_maps(&y, &p, usize::MAX).len(), 3);
        let ya = Presheaf::representable(&w, Obj(0));
        assert_eq!(natural_maps(&ya, &p, usize::MAX).len(), 2);
    }

    #[test]
    fn universal_property_on_sierpinski() {
        let w = corpus::walk2();
        let u = corpus::arrow(&w, "u");
        let j = Topology::from_minimal(&w, vec![Sieve::maximal(&w, Obj(0)), Sieve::principal(&w, u)]).unwrap();
        let (sheaves, _) = enumerate_sheaves(&j, DEFAULT_BOUND, 10_000);
        assert!(!sheaves.is_empty());
        for s in &sheaves {
            assert!(is_sheaf_exhaustive(s, &j).is_ok());
        }
        let (ps, _) = enumerate_presheaves(&w, 2, 1000);
        for p in &ps {
            let a = sheafify(p, &j).unwrap();
            for q in &sheaves {
                check_unit_universal(&a, q).unwrap();
            }
        }
    }
}
