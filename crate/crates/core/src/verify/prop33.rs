use std::collections::{HashMap, HashSet};

use super::local::{sieve_where, CommaComponents};
use super::{Condition, Verdict, Witness};
use crate::error::{Error, Result};
use crate::fincat::{same_category, Arr, FinFunctor, NatTransform, Obj};
use crate::sheaf::prop33_pullback_presheaf;
use crate::sieve::{Sieve, Topology};

/// The square `A: D' -> D`, `B: C' -> C`, `p: D -> C`, `p': D' -> C'` with
/// `phi: p.A => B.p'`, and the topology `K` on `D`.
#[derive(Clone, Debug)]
pub struct Prop33Square {
    pub a: FinFunctor,
    pub b: FinFunctor,
    pub phi: NatTransform,
    pub p: FinFunctor,
    pub p_prime: FinFunctor,
    pub k: Topology,
}

impl Prop33Square {
    pub fn new(a: FinFunctor, b: FinFunctor, phi: NatTransform, p: FinFunctor, p_prime: FinFunctor, k: Topology) -> Result<Self> {
        let ok = same_category(a.target(), p.source())
            && same_category(p.target(), b.target())
            && same_category(p_prime.source(), a.source())
            && same_category(p_prime.target(), b.source())
            && same_category(k.base(), p.source());
        if !ok {
            return Err(Error::Mismatch("the square's functors do not line up".into()));
        }
        let pa = a.then(&p)?;
        let bp = p_prime.then(&b)?;
        let same = |x: &FinFunctor, y: &FinFunctor| x.object_map() == y.object_map() && x.arrow_map() == y.arrow_map();
        if !same(phi.source(), &pa) || !same(phi.target(), &bp) {
            return Err(Error::Mismatch("phi must run from p.A to B.p'".into()));
        }
        Ok(Prop33Square {
            a,
            b,
            phi,
            p,
            p_prime,
            k,
        })
    }

    /// The square of identities over a site.
    pub fn identity(p: &FinFunctor, k: &Topology) -> Result<Self> {
        let a = FinFunctor::identity(p.source());
        let b = FinFunctor::identity(p.target());
        let phi = NatTransform::identity(p);
        let phi = NatTransform::new(a.then(p)?, p.then(&b)?, phi.components().to_vec())?;
        Self::new(a, b, phi, p.clone(), p.clone(), k.clone())
    }
}

/// Elements of the pullback presheaf, by hand: pairs `(g: e -> d', v)`.
struct Pullback {
    /// `elements[e] = [(g, v)]` in the order used by the presheaf.
    elements: Vec<Vec<(Arr, Arr)>>,
    nodes: Vec<(Obj, usize)>,
    node_of: HashMap<(Obj, usize), usize>,
    node_images: Vec<Obj>,
    edges: Vec<(usize, usize, Arr)>,
}

impl Pullback {
    fn new(sq: &Prop33Square, f: Arr, d: Obj, u: Arr) -> Result<Self> {
        let pre = prop33_pullback_presheaf(&sq.p_prime, d, u, f)?;
        let (dp, cp) = (sq.p_prime.source(), sq.p_prime.target());
        let elements: Vec<Vec<(Arr, Arr)>> = dp
            .objects()
            .map(|e| {
                let mut v = Vec::new();
                for &g in dp.hom(e, d) {
                    for &w in cp.hom(sq.p_prime.obj(e), cp.src(f)) {
                        if cp.comp(f, w) == cp.comp(u, sq.p_prime.arr(g)) {
                            v.push((g, w));
                        }
                    }
                }
                v
            })
            .collect();
        let mut nodes = Vec::new();
        let mut node_of = HashMap::new();
        for e in dp.objects() {
            debug_assert_eq!(pre.size(e), elements[e.0].len());
            for i in 0..elements[e.0].len() {
                node_of.insert((e, i), nodes.len());
                nodes.push((e, i));
            }
        }
        let node_images = nodes.iter().map(|&(e, _)| sq.a.obj(e)).collect();
        let mut edges = Vec::new();
        for h in dp.arrows() {
            let (s, t) = (dp.src(h), dp.tgt(h));
            for x in 0..pre.size(t) {
                edges.push((node_of[&(s, pre.act(h, x))], node_of[&(t, x)], sq.a.arr(h)));
            }
        }
        Ok(Pullback {
            elements,
            nodes,
            node_of,
            node_images,
            edges,
        })
    }
}

/// A triplet at `x`: node of the elements category and `x -> A(node)`.
type Triplet = (usize, Arr);

fn cone_value(sq: &Prop33Square, pb: &Pullback, t: Triplet) -> (Arr, Arr) {
    let (c, d) = (sq.p.target(), sq.p.source());
    let (e, i) = pb.nodes[t.0];
    let (g, v) = pb.elements[e.0][i];
    let first = c.comp(c.comp(sq.b.arr(v), sq.phi.component(e)), sq.p.arr(t.1));
    let second = d.comp(sq.a.arr(g), t.1);
    (first, second)
}

fn triplets_at(sq: &Prop33Square, pb: &Pullback, x: Obj) -> Vec<Triplet> {
    let d = sq.p.source();
    let mut out = Vec::new();
    for (n, &img) in pb.node_images.iter().enumerate() {
        for &arr in d.hom(x, img) {
            out.push((n, arr));
        }
    }
    out
}

fn lift_sieve(sq: &Prop33Square, pb: &Pullback, x: Obj, u2: Arr, g: Arr) -> Sieve {
    let (c, d) = (sq.p.target(), sq.p.source());
    let mut values: HashMap<Obj, HashSet<(Arr, Arr)>> = HashMap::new();
    sieve_where(d, x, |h| {
        let e = d.src(h);
        let set = values
            .entry(e)
            .or_insert_with(|| triplets_at(sq, pb, e).into_iter().map(|t| cone_value(sq, pb, t)).collect());
        set.contains(&(c.comp(u2, sq.p.arr(h)), d.comp(g, h)))
    })
}

fn connect_sieve(sq: &Prop33Square, pb: &Pullback, x: Obj, t1: Triplet, t2: Triplet) -> Sieve {
    let d = sq.p.source();
    let mut comps: HashMap<Obj, CommaComponents> = HashMap::new();
    sieve_where(d, x, |h| {
        let e = d.src(h);
        let cc = comps
            .entry(e)
            .or_insert_with(|| CommaComponents::new(d, e, &pb.node_images, &pb.edges));
        cc.connected((t1.0, d.comp(t1.1, h)), (t2.0, d.comp(t2.1, h)))
    })
}

/// Decides both site-level conditions for every `f': c'' -> c'`, `d'` and
/// `u': p'(d') -> c'`.
pub fn check_prop33_conditions(sq: &Prop33Square) -> Verdict {
    let (cp, dp) = (sq.p_prime.target(), sq.p_prime.source());
    let (c, d) = (sq.p.target(), sq.p.source());
    let mut checked = 0;
    for f in cp.arrows() {
        for dd in dp.objects() {
            for &u in cp.hom(sq.p_prime.obj(dd), cp.tgt(f)) {
                let pb = Pullback::new(sq, f, dd, u).expect("endpoints line up");
                let bf = sq.b.arr(f);
                let bu_phi = c.comp(sq.b.arr(u), sq.phi.component(dd));
                for x in d.objects() {
                    // first bullet
                    for &u2 in c.hom(sq.p.obj(x), sq.b.obj(cp.src(f))) {
                        for &g in d.hom(x, sq.a.obj(dd)) {
                            if c.comp(bf, u2) != c.comp(bu_phi, sq.p.arr(g)) {
                                continue;
                            }
                            checked += 1;
                            let sieve = lift_sieve(sq, &pb, x, u2, g);
                            if !sq.k.covers(&sieve) {
                                let w = Witness::new(Condition::Prop33Lift, x, sieve)
                                    .with_objects(vec![dd])
                                    .with_arrows(vec![f, u, u2, g]);
                                return Verdict::fail("prop33", checked, w);
                            }
                        }
                    }
                    // second bullet
                    let ts = triplets_at(sq, &pb, x);
                    let values: Vec<(Arr, Arr)> = ts.iter().map(|&t| cone_value(sq, &pb, t)).collect();
                    for i in 0..ts.len() {
                        for j in i + 1..ts.len() {
                            if values[i] != values[j] {
                                continue;
                            }
                            checked += 1;
                            let sieve = connect_sieve(sq, &pb, x, ts[i], ts[j]);
                            if !sq.k.covers(&sieve) {
                                let (n1, n2) = (pb.nodes[ts[i].0], pb.nodes[ts[j].0]);
                                let w = Witness::new(Condition::Prop33Connect, x, sieve)
                                    .with_objects(vec![dd, n1.0, n2.0])
                                    .with_arrows(vec![f, u, ts[i].1, ts[j].1])
                                    .with_elements(vec![n1.1, n2.1]);
                                return Verdict::fail("prop33", checked, w);
                            }
                        }
                    }
                }
            }
        }
    }
    Verdict::pass("prop33", checked)
}

impl Prop33Square {
    /// True when the witness still refutes one of the two conditions.
    pub fn replay(&self, w: &Witness) -> bool {
        let Some(&dd) = w.objects.first() else { return false };
        let (f, u) = (w.arrows[0], w.arrows[1]);
        let Ok(pb) = Pullback::new(self, f, dd, u) else { return false };
        let sieve = match w.condition {
            Condition::Prop33Lift => lift_sieve(self, &pb, w.object, w.arrows[2], w.arrows[3]),
            Condition::Prop33Connect => {
                let n1 = pb.node_of[&(w.objects[1], w.elements[0])];
                let n2 = pb.node_of[&(w.objects[2], w.elements[1])];
                let (t1, t2) = ((n1, w.arrows[2]), (n2, w.arrows[3]));
                if cone_value(self, &pb, t1) != cone_value(self, &pb, t2) {
                    return false;
                }
                connect_sieve(self, &pb, w.object, t1, t2)
            }
            _ => return false,
        };
        sieve == w.sieve && !self.k.covers(&sieve)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::fibration::{giraud_topology, IndexedCategory};
    use crate::fincat::FinCategory;
    use std::sync::Arc;

    #[test]
    fn identity_square_holds() {
        let w = corpus::walk2();
        for j in crate::sieve::enumerate_topologies(&w, 10).topologies {
            let sq = Prop33Square::identity(&FinFunctor::identity(&w), &j).unwrap();
            assert!(check_prop33_conditions(&sq).holds);
        }
    }

    #[test]
    fn giraud_identity_square_holds() {
        let w = corpus::walk2();
        let fa = Arc::new(FinCategory::discrete(&["y"]).unwrap());
        let fb = Arc::new(FinCategory::discrete(&["x0", "x1"]).unwrap());
        let r = FinFunctor::new(fb.clone(), fa.clone(), vec![Obj(0), Obj(0)], vec![fa.identity(Obj(0)); 2]).unwrap();
        let ix = IndexedCategory::new(w.clone(), vec![fa.clone(), fb.clone()], vec![FinFunctor::identity(&fa), FinFunctor::identity(&fb), r]).unwrap();
        let j = Topology::trivial(&w);
        let g = giraud_topology(&ix, &j).unwrap();
        let p = g.projection().clone();
        let k = g.giraud().unwrap().clone();
        let sq = Prop33Square::identity(&p, &k).unwrap();
        assert!(check_prop33_conditions(&sq).holds);
    }

    #[test]
    fn cartesian_breaking_a_fails() {
        // constant Walk2-fibers over Walk2; A squashes the fibers over a to
        // their initial object, sending the cartesian (id, u) to a vertical
        // non-iso followed by u
        let w = corpus::walk2();
        let ix = IndexedCategory::constant(&w, &w);
        let j = Topology::trivial(&w);
        let g = giraud_topology(&ix, &j).unwrap();
        let total = g.total().clone();
        let co = g.coordinates().unwrap();
        let a_obj: Vec<Obj> = co
            .objects
            .iter()
            .map(|&(x, c)| if c == Obj(0) { co.object(Obj(0), c) } else { co.object(x, c) })
            .collect();
        let a_arr = total
            .arrows()
            .map(|h| {
                let (_, f) = co.arrows[h.0];
                let (s, t) = (a_obj[total.src(h).0], a_obj[total.tgt(h).0]);
                let (xs, xt) = (co.objects[s.0].0, co.objects[t.0].0);
                co.arrow(w.hom(xs, xt)[0], f, t)
            })
            .collect();
        let a = FinFunctor::new(total.clone(), total.clone(), a_obj, a_arr).unwrap();
        let p = g.projection().clone();
        let b = FinFunctor::identity(&w);
        let ap = a.then(&p).unwrap();
        let pb = p.then(&b).unwrap();
        let phi = NatTransform::new(ap, pb, total.objects().map(|o| w.identity(p.obj(o))).collect()).unwrap();
        let sq = Prop33Square::new(a, b, phi, p.clone(), p, g.giraud().unwrap().clone()).unwrap();
        let v = check_prop33_conditions(&sq);
        assert!(!v.holds);
        assert!(sq.replay(v.witness.as_ref().unwrap()));
    }
}
