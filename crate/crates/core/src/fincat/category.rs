use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Index of an object inside a [`FinCategory`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Obj(pub usize);

/// Index of an arrow inside a [`FinCategory`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arr(pub usize);

impl fmt::Display for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl fmt::Display for Arr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowInfo {
    pub name: String,
    pub src: Obj,
    pub tgt: Obj,
}

/// Size limits enforced when a category is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_objects: usize,
    pub max_arrows: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_objects: 64,
            max_arrows: 512,
        }
    }
}

const UNDEFINED: u32 = u32::MAX;

/// An explicit finite category: named objects, named arrows and a dense
/// composition table.
///
/// Instances are immutable and always satisfy the category axioms; the only
/// way to obtain one is through [`CategoryBuilder::build`], which checks them
/// exhaustively.
#[derive(Clone, Debug)]
pub struct FinCategory {
    objects: Vec<String>,
    arrows: Vec<ArrowInfo>,
    identities: Vec<Arr>,
    // table[g * n + f] = g . f
    table: Vec<u32>,
    homs: Vec<Vec<Arr>>,
    into: Vec<Vec<Arr>>,
    from: Vec<Vec<Arr>>,
    object_index: HashMap<String, Obj>,
    arrow_index: HashMap<String, Arr>,
}

impl PartialEq for FinCategory {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.arrows == other.arrows
            && self.identities == other.identities
            && self.table == other.table
    }
}

impl Eq for FinCategory {}

impl FinCategory {
    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> impl ExactSizeIterator<Item = Obj> + Clone {
        (0..self.objects.len()).map(Obj)
    }

    pub fn arrows(&self) -> impl ExactSizeIterator<Item = Arr> + Clone {
        (0..self.arrows.len()).map(Arr)
    }

    pub fn object_name(&self, o: Obj) -> &str {
        &self.objects[o.0]
    }

    pub fn arrow_name(&self, a: Arr) -> &str {
        &self.arrows[a.0].name
    }

    pub fn object_named(&self, name: &str) -> Option<Obj> {
        self.object_index.get(name).copied()
    }

    pub fn arrow_named(&self, name: &str) -> Option<Arr> {
        self.arrow_index.get(name).copied()
    }

    pub fn arrow_info(&self, a: Arr) -> &ArrowInfo {
        &self.arrows[a.0]
    }

    pub fn src(&self, a: Arr) -> Obj {
        self.arrows[a.0].src
    }

    pub fn tgt(&self, a: Arr) -> Obj {
        self.arrows[a.0].tgt
    }

    pub fn identity(&self, o: Obj) -> Arr {
        self.identities[o.0]
    }

    pub fn is_identity(&self, a: Arr) -> bool {
        self.identities[self.src(a).0] == a
    }

    /// `g . f`, defined when the target of `f` is the source of `g`.
    pub fn compose(&self, g: Arr, f: Arr) -> Option<Arr> {
        let n = self.arrows.len();
        match self.table[g.0 * n + f.0] {
            UNDEFINED => None,
            h => Some(Arr(h as usize)),
        }
    }

    /// `g . f` for a pair already known to be composable.
    ///
    /// Panics otherwise.
    pub fn comp(&self, g: Arr, f: Arr) -> Arr {
        self.compose(g, f).unwrap_or_else(|| {
            panic!(
                "`{}` and `{}` are not composable",
                self.arrow_name(g),
                self.arrow_name(f)
            )
        })
    }

    pub fn hom(&self, x: Obj, y: Obj) -> &[Arr] {
        &self.homs[x.0 * self.objects.len() + y.0]
    }

    pub fn arrows_into(&self, c: Obj) -> &[Arr] {
        &self.into[c.0]
    }

    pub fn arrows_from(&self, c: Obj) -> &[Arr] {
        &self.from[c.0]
    }

    /// The two-sided inverse of `a`, if it has one.
    pub fn inverse(&self, a: Arr) -> Option<Arr> {
        let (x, y) = (self.src(a), self.tgt(a));
        self.hom(y, x).iter().copied().find(|&b| {
            self.comp(b, a) == self.identity(x) && self.comp(a, b) == self.identity(y)
        })
    }

    pub fn is_iso(&self, a: Arr) -> bool {
        self.inverse(a).is_some()
    }

    /// Some isomorphism `x -> y`, if the objects are isomorphic.
    pub fn find_iso(&self, x: Obj, y: Obj) -> Option<Arr> {
        self.hom(x, y).iter().copied().find(|&a| self.is_iso(a))
    }

    /// True when every hom-set has at most one element.
    pub fn is_preorder(&self) -> bool {
        self.homs.iter().all(|h| h.len() <= 1)
    }

    /// True for a preorder in which isomorphic objects are equal.
    pub fn is_poset(&self) -> bool {
        self.is_preorder()
            && self.objects().all(|x| {
                self.objects()
                    .all(|y| x == y || self.hom(x, y).is_empty() || self.hom(y, x).is_empty())
            })
    }

    pub fn leq(&self, x: Obj, y: Obj) -> bool {
        !self.hom(x, y).is_empty()
    }

    /// Rebuilds the category from its own tables. Used to re-run the axiom
    /// checks on demand.
    pub fn revalidate(&self, caps: Caps) -> Result<FinCategory> {
        let mut b = CategoryBuilder::with_caps(caps);
        for name in &self.objects {
            b.bare_object(name)?;
        }
        for a in &self.arrows {
            b.arrow(&a.name, a.src, a.tgt)?;
        }
        for o in self.objects() {
            b.set_identity(o, self.identity(o))?;
        }
        for g in self.arrows() {
            for f in self.arrows() {
                if let Some(h) = self.compose(g, f) {
                    b.composite(g, f, h)?;
                }
            }
        }
        b.build()
    }

    /// Generates a category from a composition rule. `compose(g, f)` is only
    /// called on composable pairs.
    pub fn generate(
        caps: Caps,
        objects: Vec<String>,
        arrows: Vec<ArrowInfo>,
        identities: Vec<Arr>,
        compose: impl Fn(Arr, Arr) -> Arr,
    ) -> Result<FinCategory> {
        let mut b = CategoryBuilder::with_caps(caps);
        for name in &objects {
            b.bare_object(name)?;
        }
        for a in &arrows {
            b.arrow(&a.name, a.src, a.tgt)?;
        }
        for (i, &id) in identities.iter().enumerate() {
            b.set_identity(Obj(i), id)?;
        }
        for f in 0..arrows.len() {
            for g in 0..arrows.len() {
                if arrows[f].tgt == arrows[g].src {
                    b.composite(Arr(g), Arr(f), compose(Arr(g), Arr(f)))?;
                }
            }
        }
        b.build()
    }

    /// The poset category on `names` for the order `leq`, which must be
    /// reflexive, transitive and antisymmetric on indices.
    pub fn poset<S: AsRef<str>>(names: &[S], leq: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let mut b = CategoryBuilder::new();
        let objs: Vec<Obj> = names
            .iter()
            .map(|n| b.object(n.as_ref()))
            .collect::<Result<_>>()?;
        let n = names.len();
        let mut rel = vec![None; n * n];
        for i in 0..n {
            rel[i * n + i] = Some(b.identity_of(objs[i]));
            for j in 0..n {
                if i != j && leq(i, j) {
                    if leq(j, i) {
                        return Err(Error::Mismatch(format!(
                            "order is not antisymmetric on `{}` and `{}`",
                            names[i].as_ref(),
                            names[j].as_ref()
                        )));
                    }
                    let name = format!("{}<={}", names[i].as_ref(), names[j].as_ref());
                    rel[i * n + j] = Some(b.arrow(&name, objs[i], objs[j])?);
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if let (Some(f), Some(g)) = (rel[i * n + j], rel[j * n + k]) {
                        match rel[i * n + k] {
                            Some(h) => b.composite(g, f, h)?,
                            None => {
                                return Err(Error::MissingComposite {
                                    g: b.arrow_name(g).to_string(),
                                    f: b.arrow_name(f).to_string(),
                                })
                            }
                        }
                    }
                }
            }
        }
        b.build()
    }

    /// Discrete category on the given object names.
    pub fn discrete<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        Self::poset(names, |i, j| i == j)
    }
}

/// Incremental constructor for [`FinCategory`].
#[derive(Debug, Clone)]
pub struct CategoryBuilder {
    caps: Caps,
    objects: Vec<String>,
    arrows: Vec<ArrowInfo>,
    identities: Vec<Option<Arr>>,
    composites: Vec<(Arr, Arr, Arr)>,
    object_index: HashMap<String, Obj>,
    arrow_index: HashMap<String, Arr>,
}

impl Default for CategoryBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl CategoryBuilder {
    pub fn new() -> Self {
        Self::with_caps(Caps::default())
    }

    pub fn with_caps(caps: Caps) -> Self {
        CategoryBuilder {
            caps,
            objects: Vec::new(),
            arrows: Vec::new(),
            identities: Vec::new(),
            composites: Vec::new(),
            object_index: HashMap::new(),
            arrow_index: HashMap::new(),
        }
    }

    /// Adds an object without an identity; one named `id_<name>` is created
    /// at build time unless [`set_identity`](Self::set_identity) is called.
    pub fn bare_object(&mut self, name: &str) -> Result<Obj> {
        if self.object_index.contains_key(name) {
            return Err(Error::DuplicateName {
                kind: "object",
                name: name.to_string(),
            });
        }
        if self.objects.len() >= self.caps.max_objects {
            return Err(Error::TooLarge {
                what: "objects",
                found: self.objects.len() + 1,
                cap: self.caps.max_objects,
            });
        }
        let o = Obj(self.objects.len());
        self.objects.push(name.to_string());
        self.identities.push(None);
        self.object_index.insert(name.to_string(), o);
        Ok(o)
    }

    /// Adds an object together with its identity arrow `id_<name>`.
    pub fn object(&mut self, name: &str) -> Result<Obj> {
        let o = self.bare_object(name)?;
        let id = self.arrow(&format!("id_{name}"), o, o)?;
        self.identities[o.0] = Some(id);
        Ok(o)
    }

    pub fn identity_of(&self, o: Obj) -> Arr {
        self.identities[o.0].expect("object has no identity yet")
    }

    pub fn arrow_name(&self, a: Arr) -> &str {
        &self.arrows[a.0].name
    }

    pub fn object_named(&self, name: &str) -> Option<Obj> {
        self.object_index.get(name).copied()
    }

    pub fn arrow_named(&self, name: &str) -> Option<Arr> {
        self.arrow_index.get(name).copied()
    }

    pub fn arrow(&mut self, name: &str, src: Obj, tgt: Obj) -> Result<Arr> {
        if self.arrow_index.contains_key(name) {
            return Err(Error::DuplicateName {
                kind: "arrow",
                name: name.to_string(),
            });
        }
        if self.arrows.len() >= self.caps.max_arrows {
            return Err(Error::TooLarge {
                what: "arrows",
                found: self.arrows.len() + 1,
                cap: self.caps.max_arrows,
            });
        }
        if src.0 >= self.objects.len() || tgt.0 >= self.objects.len() {
            return Err(Error::Unknown {
                kind: "object",
                name: format!("{src} or {tgt}"),
            });
        }
        let a = Arr(self.arrows.len());
        self.arrows.push(ArrowInfo {
            name: name.to_string(),
            src,
            tgt,
        });
        self.arrow_index.insert(name.to_string(), a);
        Ok(a)
    }

    pub fn set_identity(&mut self, o: Obj, a: Arr) -> Result<()> {
        let info = &self.arrows[a.0];
        if info.src != o || info.tgt != o {
            return Err(Error::BadIdentity {
                object: self.objects[o.0].clone(),
                arrow: info.name.clone(),
            });
        }
        self.identities[o.0] = Some(a);
        Ok(())
    }

    /// Declares `g . f = h`.
    pub fn composite(&mut self, g: Arr, f: Arr, h: Arr) -> Result<()> {
        self.composites.push((g, f, h));
        Ok(())
    }

    pub fn build(mut self) -> Result<FinCategory> {
        for i in 0..self.objects.len() {
            if self.identities[i].is_none() {
                let name = format!("id_{}", self.objects[i]);
                let id = self.arrow(&name, Obj(i), Obj(i))?;
                self.identities[i] = Some(id);
            }
        }
        let identities: Vec<Arr> = self.identities.iter().map(|i| i.unwrap()).collect();
        let n = self.arrows.len();
        let name = |a: Arr| self.arrows[a.0].name.clone();
        let mut table = vec![UNDEFINED; n * n];
        for &(g, f, h) in &self.composites {
            let (fi, gi, hi) = (&self.arrows[f.0], &self.arrows[g.0], &self.arrows[h.0]);
            if fi.tgt != gi.src {
                return Err(Error::NonComposable {
                    g: name(g),
                    f: name(f),
                });
            }
            if hi.src != fi.src || hi.tgt != gi.tgt {
                return Err(Error::CompositeEndpoints {
                    g: name(g),
                    f: name(f),
                    h: name(h),
                });
            }
            let slot = &mut table[g.0 * n + f.0];
            if *slot != UNDEFINED && *slot != h.0 as u32 {
                return Err(Error::ConflictingComposite {
                    g: name(g),
                    f: name(f),
                });
            }
            *slot = h.0 as u32;
        }
        // unit laws: fill when omitted, reject when contradicted
        for a in 0..n {
            let info = &self.arrows[a];
            for (id, slot) in [
                (identities[info.tgt.0], identities[info.tgt.0].0 * n + a),
                (identities[info.src.0], a * n + identities[info.src.0].0),
            ] {
                match table[slot] {
                    UNDEFINED => table[slot] = a as u32,
                    h if h as usize == a => {}
                    _ => {
                        return Err(Error::Unit {
                            arrow: name(Arr(a)),
                            identity: name(id),
                        })
                    }
                }
            }
        }
        let m = self.objects.len();
        let mut into = vec![Vec::new(); m];
        let mut from = vec![Vec::new(); m];
        let mut homs = vec![Vec::new(); m * m];
        for (i, a) in self.arrows.iter().enumerate() {
            into[a.tgt.0].push(Arr(i));
            from[a.src.0].push(Arr(i));
            homs[a.src.0 * m + a.tgt.0].push(Arr(i));
        }
        for f in 0..n {
            for &g in &from[self.arrows[f].tgt.0] {
                if table[g.0 * n + f] == UNDEFINED {
                    return Err(Error::MissingComposite {
                        g: name(g),
                        f: name(Arr(f)),
                    });
                }
            }
        }
        for f in 0..n {
            for &g in &from[self.arrows[f].tgt.0] {
                let gf = table[g.0 * n + f] as usize;
                for &h in &from[self.arrows[g.0].tgt.0] {
                    let hg = table[h.0 * n + g.0] as usize;
                    if table[h.0 * n + gf] != table[hg * n + f] {
                        return Err(Error::Associativity {
                            h: name(h),
                            g: name(g),
                            f: name(Arr(f)),
                        });
                    }
                }
            }
        }
        Ok(FinCategory {
            objects: self.objects,
            arrows: self.arrows,
            identities,
            table,
            homs,
            into,
            from,
            object_index: self.object_index,
            arrow_index: self.arrow_index,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walk2_builder() -> (CategoryBuilder, Arr) {
        let mut b = CategoryBuilder::new();
        let a = b.object("a").unwrap();
        let bb = b.object("b").unwrap();
        let u = b.arrow("u", a, bb).unwrap();
        (b, u)
    }

    #[test]
    fn terminal_category_is_valid() {
        let mut b = CategoryBuilder::new();
        b.object("*").unwrap();
        let one = b.build().unwrap();
        assert_eq!(one.object_count(), 1);
        assert_eq!(one.arrow_count(), 1);
    }

    #[test]
    fn walk2_is_valid() {
        let (b, u) = walk2_builder();
        let c = b.build().unwrap();
        assert_eq!(c.arrow_count(), 3);
        assert_eq!(c.comp(u, c.identity(c.src(u))), u);
        assert_eq!(c.comp(c.identity(c.tgt(u)), u), u);
        assert!(!c.is_iso(u));
        assert!(c.is_poset());
    }

    #[test]
    fn declaring_u_after_u_is_rejected() {
        let (mut b, u) = walk2_builder();
        b.composite(u, u, u).unwrap();
        let err = b.build().unwrap_err();
        assert!(matches!(err, Error::NonComposable { .. }), "{err}");
        assert!(err.to_string().contains("non-composable pair"));
    }

    #[test]
    fn missing_composite_is_located() {
        let mut b = CategoryBuilder::new();
        let x = b.object("x").unwrap();
        let y = b.object("y").unwrap();
        let z = b.object("z").unwrap();
        b.arrow("f", x, y).unwrap();
        b.arrow("g", y, z).unwrap();
        let err = b.build().unwrap_err();
        assert_eq!(
            err,
            Error::MissingComposite {
                g: "g".into(),
                f: "f".into()
            }
        );
    }

    #[test]
    fn broken_associativity_is_reported() {
        // monoid {1, e, z} on one object with e.e = z, but e.z = e: not associative
        let mut b = CategoryBuilder::new();
        let o = b.object("o").unwrap();
        let e = b.arrow("e", o, o).unwrap();
        let z = b.arrow("z", o, o).unwrap();
        b.composite(e, e, z).unwrap();
        b.composite(e, z, e).unwrap();
        b.composite(z, e, z).unwrap();
        b.composite(z, z, z).unwrap();
        assert!(matches!(b.build(), Err(Error::Associativity { .. })));
    }

    #[test]
    fn caps_are_enforced() {
        let mut b = CategoryBuilder::with_caps(Caps {
            max_objects: 1,
            max_arrows: 8,
        });
        b.object("x").unwrap();
        assert!(matches!(b.object("y"), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn poset_rejects_non_transitive_order() {
        let r = FinCategory::poset(&["a", "b", "c"], |i, j| i == j || (i, j) == (0, 1) || (i, j) == (1, 2));
        assert!(matches!(r, Err(Error::MissingComposite { .. })));
    }

    #[test]
    fn revalidate_round_trips() {
        let c = FinCategory::poset(&["a", "b", "c"], |i, j| i <= j).unwrap();
        assert_eq!(c.revalidate(Caps::default()).unwrap(), c);
    }
}
