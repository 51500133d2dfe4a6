use std::collections::HashMap;
use std::fmt;

use super::{Presheaf, PresheafMap};
use crate::error::{Error, Result};
use crate::fincat::{same_category, Arr, FinCategory, Obj, UnionFind};
use crate::sieve::{pullback_unchecked, Sieve, Topology};

/// A compatible choice of elements along the arrows of a sieve. `values`
/// follows the order of `sieve.arrows()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatchingFamily {
    pub sieve: Sieve,
    pub values: Vec<usize>,
}

impl MatchingFamily {
    pub fn get(&self, f: Arr) -> Option<usize> {
        let i = self.sieve.bits().ones().position(|a| a == f.0)?;
        Some(self.values[i])
    }

    /// Restriction to a smaller sieve on the same object.
    pub fn restrict(&self, to: &Sieve) -> MatchingFamily {
        debug_assert!(to.is_subset(&self.sieve));
        let values = to.arrows().into_iter().map(|f| self.get(f).unwrap()).collect();
        MatchingFamily {
            sieve: to.clone(),
            values,
        }
    }

    /// `(f^*S, g |-> x(f.g))`.
    pub fn pullback(&self, c: &FinCategory, f: Arr) -> MatchingFamily {
        let sieve = pullback_unchecked(c, f, &self.sieve);
        let values = sieve.arrows().into_iter().map(|g| self.get(c.comp(f, g)).unwrap()).collect();
        MatchingFamily { sieve, values }
    }

    /// Whether `x` restricts to this family.
    pub fn is_amalgamated_by(&self, p: &Presheaf, x: usize) -> bool {
        self.sieve.arrows().into_iter().zip(&self.values).all(|(f, &v)| p.act(f, x) == v)
    }

    pub fn display<'a>(&'a self, p: &'a Presheaf) -> impl fmt::Display + 'a {
        FamilyDisplay { family: self, p }
    }
}

struct FamilyDisplay<'a> {
    family: &'a MatchingFamily,
    p: &'a Presheaf,
}

impl fmt::Display for FamilyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.p.base();
        let parts: Vec<String> = self
            .family
            .sieve
            .arrows()
            .into_iter()
            .zip(&self.family.values)
            .map(|(a, &v)| format!("{}={}", c.arrow_name(a), self.p.labels(c.src(a))[v]))
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// All matching families for `p` on `s`, in lexicographic order of values.
pub fn matching_families(p: &Presheaf, s: &Sieve) -> Vec<MatchingFamily> {
    let c = p.base();
    let gens = s.generators(c);
    let members = s.arrows();
    // every factorisation f = g.k through a generator
    let factor: Vec<Vec<(usize, Arr)>> = members
        .iter()
        .map(|&f| {
            let mut v = Vec::new();
            for (i, &g) in gens.iter().enumerate() {
                for &k in c.hom(c.src(f), c.src(g)) {
                    if c.comp(g, k) == f {
                        v.push((i, k));
                    }
                }
            }
            v
        })
        .collect();
    let mut out = Vec::new();
    let mut chosen = vec![0usize; gens.len()];
    fn consistent(p: &Presheaf, factor: &[Vec<(usize, Arr)>], chosen: &[usize], upto: usize) -> bool {
        factor.iter().all(|fs| {
            let mut value = None;
            for &(i, k) in fs {
                if i <= upto {
                    let v = p.act(k, chosen[i]);
                    match value {
                        None => value = Some(v),
                        Some(w) if w != v => return false,
                        _ => {}
                    }
                }
            }
            true
        })
    }
    fn go(
        p: &Presheaf,
        c: &FinCategory,
        gens: &[Arr],
        factor: &[Vec<(usize, Arr)>],
        s: &Sieve,
        i: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<MatchingFamily>,
    ) {
        if i == gens.len() {
            let values = factor
                .iter()
                .map(|fs| {
                    let (g, k) = fs[0];
                    p.act(k, chosen[g])
                })
                .collect();
            out.push(MatchingFamily {
                sieve: s.clone(),
                values,
            });
            return;
        }
        for x in 0..p.size(c.src(gens[i])) {
            chosen[i] = x;
            if consistent(p, factor, chosen, i) {
                go(p, c, gens, factor, s, i + 1, chosen, out);
            }
        }
    }
    go(p, c, &gens, &factor, s, 0, &mut chosen, &mut out);
    out.sort();
    out
}

/// Why a presheaf fails the sheaf condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SheafFailure {
    NoAmalgamation { object: Obj, family: MatchingFamily },
    TwoAmalgamations { object: Obj, family: MatchingFamily, first: usize, second: usize },
}

impl SheafFailure {
    pub fn describe(&self, p: &Presheaf) -> String {
        let c = p.base();
        match self {
            SheafFailure::NoAmalgamation { object, family } => format!(
                "family {} on `{}` has no amalgamation",
                family.display(p),
                c.object_name(*object)
            ),
            SheafFailure::TwoAmalgamations {
                object,
                family,
                first,
                second,
            } => format!(
                "family {} on `{}` has amalgamations `{}` and `{}`",
                family.display(p),
                c.object_name(*object),
                p.labels(*object)[*first],
                p.labels(*object)[*second]
            ),
        }
    }
}

fn sheaf_for(p: &Presheaf, object: Obj, s: &Sieve) -> std::result::Result<(), SheafFailure> {
    for family in matching_families(p, s) {
        let mut found = None;
        for x in 0..p.size(object) {
            if family.is_amalgamated_by(p, x) {
                if let Some(first) = found {
                    return Err(SheafFailure::TwoAmalgamations {
                        object,
                        family,
                        first,
                        second: x,
                    });
                }
                found = Some(x);
            }
        }
        if found.is_none() {
            return Err(SheafFailure::NoAmalgamation { object, family });
        }
    }
    Ok(())
}

/// Sheaf condition on the minimal covering sieve of each object. These
/// sieves form a coverage generating the topology, so this decides the
/// condition for every covering sieve.
pub fn is_sheaf(p: &Presheaf, j: &Topology) -> std::result::Result<(), SheafFailure> {
    assert!(same_category(p.base(), j.base()), "presheaf and topology over different bases");
    for c in p.base().objects() {
        sheaf_for(p, c, j.minimal_cover(c))?;
    }
    Ok(())
}

/// Sheaf condition checked on every covering sieve.
pub fn is_sheaf_exhaustive(p: &Presheaf, j: &Topology) -> std::result::Result<(), SheafFailure> {
    assert!(same_category(p.base(), j.base()), "presheaf and topology over different bases");
    for c in p.base().objects() {
        for s in j.covering_sieves(c) {
            sheaf_for(p, c, &s)?;
        }
    }
    Ok(())
}

/// Every matching family has at most one amalgamation.
pub fn is_separated(p: &Presheaf, j: &Topology) -> bool {
    p.base().objects().all(|c| {
        let s = j.minimal_cover(c);
        let mut seen = HashMap::new();
        (0..p.size(c)).all(|x| {
            let key: Vec<usize> = s.arrows().into_iter().map(|f| p.act(f, x)).collect();
            seen.insert(key, x).is_none()
        })
    })
}

/// `P+` with its unit and the representative family of each element.
#[derive(Clone, Debug)]
pub struct PlusConstruction {
    pub presheaf: Presheaf,
    pub unit: PresheafMap,
    pub representatives: Vec<Vec<MatchingFamily>>,
}

/// The plus construction: at `c`, matching families on covering sieves,
/// glued along restriction to smaller covering sieves. Each class is
/// represented by a member on a largest covering sieve, ties broken by
/// the smallest (sieve, values).
pub fn plus(p: &Presheaf, j: &Topology) -> Result<PlusConstruction> {
    if !same_category(p.base(), j.base()) {
        return Err(Error::Mismatch("presheaf and topology over different bases".into()));
    }
    let c = p.base();
    let mut members: Vec<Vec<MatchingFamily>> = Vec::with_capacity(c.object_count());
    let mut class_of: Vec<HashMap<MatchingFamily, usize>> = Vec::with_capacity(c.object_count());
    let mut representatives = Vec::with_capacity(c.object_count());
    for o in c.objects() {
        let covers = j.covering_sieves(o);
        let families: Vec<Vec<MatchingFamily>> = covers.iter().map(|s| matching_families(p, s)).collect();
        let all: Vec<MatchingFamily> = families.iter().flatten().cloned().collect();
        let index: HashMap<&MatchingFamily, usize> = all.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut uf = UnionFind::new(all.len());
        for (si, s) in covers.iter().enumerate() {
            for (ti, t) in covers.iter().enumerate() {
                if si != ti && t.is_subset(s) {
                    for m in &families[si] {
                        uf.union(index[m], index[&m.restrict(t)]);
                    }
                }
            }
        }
        let mut classes: Vec<Vec<usize>> = uf.classes();
        let rep = |class: &Vec<usize>| {
            class
                .iter()
                .map(|&i| &all[i])
                .min_by(|a, b| b.sieve.len().cmp(&a.sieve.len()).then_with(|| a.cmp(b)))
                .unwrap()
                .clone()
        };
        classes.sort_by_cached_key(|cl| {
            let r = rep(cl);
            (std::cmp::Reverse(r.sieve.len()), r)
        });
        let mut map = HashMap::new();
        let mut reps = Vec::with_capacity(classes.len());
        for (k, cl) in classes.iter().enumerate() {
            for &i in cl {
                map.insert(all[i].clone(), k);
            }
            reps.push(rep(cl));
        }
        members.push(all);
        class_of.push(map);
        representatives.push(reps);
    }
    let labels = representatives
        .iter()
        .map(|reps| reps.iter().map(|m| m.display(p).to_string()).collect())
        .collect();
    let actions = c
        .arrows()
        .map(|f| {
            let d = c.src(f);
            representatives[c.tgt(f).0]
                .iter()
                .map(|m| class_of[d.0][&m.pullback(c, f)])
                .collect()
        })
        .collect();
    let presheaf = Presheaf::new_unchecked(c, labels, actions);
    let components = c
        .objects()
        .map(|o| {
            let max = Sieve::maximal(c, o);
            (0..p.size(o))
                .map(|x| {
                    let values = max.arrows().into_iter().map(|f| p.act(f, x)).collect();
                    class_of[o.0][&MatchingFamily {
                        sieve: max.clone(),
                        values,
                    }]
                })
                .collect()
        })
        .collect();
    let unit = PresheafMap::new_unchecked(p, &presheaf, components);
    Ok(PlusConstruction {
        presheaf,
        unit,
        representatives,
    })
}

/// `a(P) = P++` with the unit `P -> P++`.
#[derive(Clone, Debug)]
pub struct Sheafification {
    pub sheaf: Presheaf,
    pub unit: PresheafMap,
}

/// Applies the plus construction twice.
pub fn sheafify(p: &Presheaf, j: &Topology) -> Result<Sheafification> {
    let first = plus(p, j)?;
    let second = plus(&first.presheaf, j)?;
    let unit = first.unit.then(&second.unit)?;
    Ok(Sheafification {
        sheaf: second.presheaf,
        unit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::sieve::sieve_lattice;
    use std::sync::Arc;

    fn sier(w: &Arc<FinCategory>) -> Topology {
        let u = corpus::arrow(w, "u");
        Topology::from_minimal(w, vec![Sieve::maximal(w, Obj(0)), Sieve::principal(w, u)]).unwrap()
    }

    fn two_over_one(w: &Arc<FinCategory>) -> Presheaf {
        Presheaf::from_sizes(w, &[1, 2], vec![vec![0], vec![0, 1], vec![0, 0]]).unwrap()
    }

    /// Matching families by brute force over all assignments.
    fn families_oracle(p: &Presheaf, s: &Sieve) -> usize {
        let c = p.base();
        let members = s.arrows();
        let sizes: Vec<usize> = members.iter().map(|&f| p.size(c.src(f))).collect();
        let total: usize = sizes.iter().product();
        let mut count = 0;
        for mut code in 0..total {
            let vals: Vec<usize> = sizes
                .iter()
                .map(|&n| {
                    let v = code % n;
                    code /= n;
                    v
                })
                .collect();
            let ok = members.iter().enumerate().all(|(i, &f)| {
                c.arrows_into(c.src(f)).iter().all(|&g| {
                    let h = c.comp(f, g);
                    let k = members.iter().position(|&m| m == h).unwrap();
                    vals[k] == p.act(g, vals[i])
                })
            });
            count += ok as usize;
        }
        count
    }

    #[test]
    fn matching_families_match_brute_force() {
        let c = corpus::split_epi();
        let mut actions = vec![vec![0, 1]; c.arrow_count()];
        actions[corpus::arrow(&c, "e").0] = vec![1, 0];
        actions[corpus::arrow(&c, "s").0] = vec![1, 0];
        let p = Presheaf::from_sizes(&c, &[2, 2], actions).unwrap();
        for o in c.objects() {
            for s in sieve_lattice(&c, o) {
                let fams = matching_families(&p, &s);
                assert_eq!(fams.len(), families_oracle(&p, &s));
            }
        }
        let w = corpus::walk2();
        let p = two_over_one(&w);
        for o in w.objects() {
            for s in sieve_lattice(&w, o) {
                assert_eq!(matching_families(&p, &s).len(), families_oracle(&p, &s));
            }
        }
    }

    #[test]
    fn sheaf_examples() {
        let w = corpus::walk2();
        let p = two_over_one(&w);
        assert!(is_sheaf(&p, &Topology::trivial(&w)).is_ok());
        let j = sier(&w);
        let err = is_sheaf(&p, &j).unwrap_err();
        assert!(matches!(err, SheafFailure::TwoAmalgamations { object: Obj(1), .. }));
        assert_eq!(is_sheaf_exhaustive(&p, &j).is_ok(), false);
        let y = Presheaf::representable(&w, Obj(1));
        assert!(is_sheaf(&y, &j).is_ok());
        let ya = Presheaf::representable(&w, Obj(0));
        // hom(-, a) at b is empty while the family on <u> picks id_a
        assert!(matches!(is_sheaf(&ya, &j), Err(SheafFailure::NoAmalgamation { .. })));
    }

    #[test]
    fn plus_examples() {
        let w = corpus::walk2();
        let p = two_over_one(&w);
        let triv = plus(&p, &Topology::trivial(&w)).unwrap();
        assert!(triv.unit.is_iso());
        let j = sier(&w);
        let pp = plus(&p, &j).unwrap();
        assert_eq!(pp.presheaf.sizes(), vec![1, 1]);
        let a = sheafify(&p, &j).unwrap();
        assert_eq!(a.sheaf, Presheaf::new(&w, a.sheaf.sizes().iter().enumerate().map(|(c, _)| a.sheaf.labels(Obj(c)).to_vec()).collect(), vec![vec![0], vec![0], vec![0]]).unwrap());
        assert!(is_sheaf(&a.sheaf, &j).is_ok());
        // a sheaf is fixed up to iso
        let s = sheafify(&a.sheaf, &j).unwrap();
        assert!(s.unit.is_iso());
    }

    #[test]
    fn degenerate_topology_kills_everything() {
        let w = corpus::walk2();
        let p = two_over_one(&w);
        let a = sheafify(&p, &Topology::degenerate(&w)).unwrap();
        assert_eq!(a.sheaf.sizes(), vec![1, 1]);
        assert!(is_sheaf_exhaustive(&a.sheaf, &Topology::degenerate(&w)).is_ok());
    }

    #[test]
    fn separated_presheaf_needs_one_plus() {
        let w = corpus::walk2();
        let j = sier(&w);
        let ya = Presheaf::representable(&w, Obj(0));
        assert!(is_separated(&ya, &j));
        let once = plus(&ya, &j).unwrap();
        assert!(is_sheaf(&once.presheaf, &j).is_ok());
        assert!(!is_separated(&two_over_one(&w), &j));
    }
}
