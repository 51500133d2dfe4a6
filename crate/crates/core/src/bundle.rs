//! JSON site bundles: named categories, topologies, indexed categories,
//! functors, natural transformations and presheaves.
//!
//! Entries reference each other by name. Loading resolves the names,
//! validates every entity and reports failures at a JSON pointer.
//! Topologies are stored as generators and saturated on load.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibration::IndexedCategory;
use crate::fincat::{Arr, CategoryBuilder, FinCategory, FinFunctor, NatTransform, Obj};
use crate::sheaf::Presheaf;
use crate::sieve::{saturate, Coverage, Topology};
use crate::suite::Instance;
use crate::verify::SiteFunctor;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub categories: BTreeMap<String, CategoryDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub topologies: BTreeMap<String, TopologyDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub indexed: BTreeMap<String, IndexedDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functors: BTreeMap<String, FunctorDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub naturals: BTreeMap<String, NaturalDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub presheaves: BTreeMap<String, PresheafDoc>,
}

/// Identities default to `id_<object>`; composites with an identity may be
/// omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryDoc {
    pub objects: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub arrows: Vec<ArrowDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub identities: BTreeMap<String, String>,
    /// `[g, f, h]` declares `g . f = h`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub composites: Vec<[String; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowDoc {
    pub name: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyDoc {
    pub category: String,
    /// Covering families per object, each a list of arrow names.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub generators: BTreeMap<String, Vec<Vec<String>>>,
}

/// Restrictions name functors; identity arrows may be omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexedDoc {
    pub base: String,
    pub fibers: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub restrictions: BTreeMap<String, String>,
}

/// Identity arrows may be omitted from `arrows`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorDoc {
    pub source: String,
    pub target: String,
    pub objects: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub arrows: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NaturalDoc {
    pub source: String,
    pub target: String,
    pub components: BTreeMap<String, String>,
}

/// `actions[f][y] = x` sends `y` in `P(tgt f)` to `x` in `P(src f)`;
/// identity actions may be omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresheafDoc {
    pub category: String,
    pub sets: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub actions: BTreeMap<String, BTreeMap<String, String>>,
}

/// The resolved, validated contents of a bundle.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Workspace {
    pub categories: BTreeMap<String, Arc<FinCategory>>,
    pub topologies: BTreeMap<String, Topology>,
    pub indexed: BTreeMap<String, IndexedCategory>,
    pub functors: BTreeMap<String, FinFunctor>,
    pub naturals: BTreeMap<String, NatTransform>,
    pub presheaves: BTreeMap<String, Presheaf>,
}

/// JSON pointer from unescaped segments.
fn pointer(segments: &[&str]) -> String {
    segments
        .iter()
        .map(|s| format!("/{}", s.replace('~', "~0").replace('/', "~1")))
        .collect()
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, kind: &'static str, name: &str) -> Result<&'a T> {
    map.get(name).ok_or_else(|| Error::Unknown {
        kind,
        name: name.to_string(),
    })
}

fn object(c: &FinCategory, name: &str) -> Result<Obj> {
    c.object_named(name).ok_or_else(|| Error::Unknown {
        kind: "object",
        name: name.to_string(),
    })
}

fn arrow(c: &FinCategory, name: &str) -> Result<Arr> {
    c.arrow_named(name).ok_or_else(|| Error::Unknown {
        kind: "arrow",
        name: name.to_string(),
    })
}

pub fn parse(text: &str) -> Result<Document> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Reads, parses and resolves the bundle at `path`.
pub fn load_bundle(path: impl AsRef<Path>) -> Result<Workspace> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        column: 0,
        message: format!("{}: {e}", path.display()),
    })?;
    resolve(&parse(&text)?)
}

pub fn load_str(text: &str) -> Result<Workspace> {
    resolve(&parse(text)?)
}

/// Resolves names in dependency order: categories, functors, indexed
/// categories, topologies, natural transformations, presheaves.
pub fn resolve(doc: &Document) -> Result<Workspace> {
    let mut ws = Workspace::default();
    for (name, c) in &doc.categories {
        let cat = build_category(c, name)?;
        ws.categories.insert(name.clone(), Arc::new(cat));
    }
    for (name, f) in &doc.functors {
        let here = pointer(&["functors", name]);
        let g = build_functor(&ws, f, &here)?;
        ws.functors.insert(name.clone(), g);
    }
    for (name, ix) in &doc.indexed {
        let here = pointer(&["indexed", name]);
        let built = build_indexed(&ws, ix, &here)?;
        ws.indexed.insert(name.clone(), built);
    }
    for (name, t) in &doc.topologies {
        let here = pointer(&["topologies", name]);
        let c = lookup(&ws.categories, "category", &t.category).map_err(|e| e.at(format!("{here}/category")))?;
        let mut cov = Coverage::new(c);
        for (x, families) in &t.generators {
            let o = object(c, x).map_err(|e| e.at(pointer(&["topologies", name, "generators", x])))?;
            for (i, fam) in families.iter().enumerate() {
                let at = pointer(&["topologies", name, "generators", x, &i.to_string()]);
                let arrows = fam.iter().map(|a| arrow(c, a)).collect::<Result<Vec<_>>>().map_err(|e| e.at(&at))?;
                cov.add(o, arrows).map_err(|e| e.at(&at))?;
            }
        }
        ws.topologies.insert(name.clone(), saturate(&cov));
    }
    for (name, n) in &doc.naturals {
        let here = pointer(&["naturals", name]);
        let source = lookup(&ws.functors, "functor", &n.source).map_err(|e| e.at(format!("{here}/source")))?;
        let target = lookup(&ws.functors, "functor", &n.target).map_err(|e| e.at(format!("{here}/target")))?;
        let (c, d) = (source.source(), source.target());
        let mut comps = vec![None; c.object_count()];
        for (x, a) in &n.components {
            let at = pointer(&["naturals", name, "components", x]);
            let o = object(c, x).map_err(|e| e.at(&at))?;
            comps[o.0] = Some(arrow(d, a).map_err(|e| e.at(&at))?);
        }
        let comps = comps
            .into_iter()
            .enumerate()
            .map(|(i, a)| {
                a.ok_or_else(|| {
                    Error::Natural(format!("no component at `{}`", c.object_name(Obj(i)))).at(format!("{here}/components"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let t = NatTransform::new(source.clone(), target.clone(), comps).map_err(|e| e.at(&here))?;
        ws.naturals.insert(name.clone(), t);
    }
    for (name, p) in &doc.presheaves {
        let here = pointer(&["presheaves", name]);
        let built = build_presheaf(&ws, p, &here)?;
        ws.presheaves.insert(name.clone(), built);
    }
    Ok(ws)
}

fn build_category(doc: &CategoryDoc, name: &str) -> Result<FinCategory> {
    let here = pointer(&["categories", name]);
    let mut b = CategoryBuilder::new();
    for (i, o) in doc.objects.iter().enumerate() {
        b.bare_object(o).map_err(|e| e.at(format!("{here}/objects/{i}")))?;
    }
    for (i, a) in doc.arrows.iter().enumerate() {
        let at = format!("{here}/arrows/{i}");
        let src = b.object_named(&a.src).ok_or_else(|| {
            Error::Unknown {
                kind: "object",
                name: a.src.clone(),
            }
            .at(format!("{at}/src"))
        })?;
        let tgt = b.object_named(&a.tgt).ok_or_else(|| {
            Error::Unknown {
                kind: "object",
                name: a.tgt.clone(),
            }
            .at(format!("{at}/tgt"))
        })?;
        b.arrow(&a.name, src, tgt).map_err(|e| e.at(&at))?;
    }
    for (i, o) in doc.objects.iter().enumerate() {
        let given = doc.identities.get(o).cloned();
        let id_name = given.clone().unwrap_or_else(|| format!("id_{o}"));
        if let Some(a) = b.arrow_named(&id_name) {
            let at = match given {
                Some(_) => pointer(&["categories", name, "identities", o]),
                None => format!("{here}/objects/{i}"),
            };
            b.set_identity(Obj(i), a).map_err(|e| e.at(at))?;
        } else if given.is_some() {
            return Err(Error::Unknown {
                kind: "arrow",
                name: id_name,
            }
            .at(pointer(&["categories", name, "identities", o])));
        }
    }
    for o in doc.identities.keys() {
        if !doc.objects.contains(o) {
            return Err(Error::Unknown {
                kind: "object",
                name: o.clone(),
            }
            .at(pointer(&["categories", name, "identities", o])));
        }
    }
    for (i, [g, f, h]) in doc.composites.iter().enumerate() {
        let at = format!("{here}/composites/{i}");
        let find = |n: &str| {
            b.arrow_named(n).ok_or_else(|| {
                Error::Unknown {
                    kind: "arrow",
                    name: n.to_string(),
                }
                .at(&at)
            })
        };
        let (g, f, h) = (find(g)?, find(f)?, find(h)?);
        b.composite(g, f, h).map_err(|e| e.at(&at))?;
    }
    b.build().map_err(|e| e.at(here))
}

fn build_functor(ws: &Workspace, doc: &FunctorDoc, here: &str) -> Result<FinFunctor> {
    let c = lookup(&ws.categories, "category", &doc.source).map_err(|e| e.at(format!("{here}/source")))?;
    let d = lookup(&ws.categories, "category", &doc.target).map_err(|e| e.at(format!("{here}/target")))?;
    let mut objs = vec![None; c.object_count()];
    for (x, y) in &doc.objects {
        let at = format!("{here}/objects{}", pointer(&[x]));
        let o = object(c, x).map_err(|e| e.at(&at))?;
        objs[o.0] = Some(object(d, y).map_err(|e| e.at(&at))?);
    }
    let objs = objs
        .into_iter()
        .enumerate()
        .map(|(i, o)| {
            o.ok_or_else(|| {
                Error::Functor(format!("object `{}` is not mapped", c.object_name(Obj(i)))).at(format!("{here}/objects"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut arrs = vec![None; c.arrow_count()];
    for (a, b) in &doc.arrows {
        let at = format!("{here}/arrows{}", pointer(&[a]));
        let f = arrow(c, a).map_err(|e| e.at(&at))?;
        arrs[f.0] = Some(arrow(d, b).map_err(|e| e.at(&at))?);
    }
    let arrs = arrs
        .into_iter()
        .enumerate()
        .map(|(i, a)| match a {
            Some(a) => Ok(a),
            None if c.is_identity(Arr(i)) => Ok(d.identity(objs[c.src(Arr(i)).0])),
            None => Err(Error::Functor(format!("arrow `{}` is not mapped", c.arrow_name(Arr(i))))
                .at(format!("{here}/arrows"))),
        })
        .collect::<Result<Vec<_>>>()?;
    FinFunctor::new(c.clone(), d.clone(), objs, arrs).map_err(|e| e.at(here))
}

fn build_indexed(ws: &Workspace, doc: &IndexedDoc, here: &str) -> Result<IndexedCategory> {
    let base = lookup(&ws.categories, "category", &doc.base).map_err(|e| e.at(format!("{here}/base")))?;
    let mut fibers = vec![None; base.object_count()];
    for (x, cat) in &doc.fibers {
        let at = format!("{here}/fibers{}", pointer(&[x]));
        let o = object(base, x).map_err(|e| e.at(&at))?;
        fibers[o.0] = Some(lookup(&ws.categories, "category", cat).map_err(|e| e.at(&at))?.clone());
    }
    let fibers = fibers
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            f.ok_or_else(|| {
                Error::Indexed(format!("no fiber over `{}`", base.object_name(Obj(i)))).at(format!("{here}/fibers"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut restrictions = vec![None; base.arrow_count()];
    for (a, f) in &doc.restrictions {
        let at = format!("{here}/restrictions{}", pointer(&[a]));
        let u = arrow(base, a).map_err(|e| e.at(&at))?;
        restrictions[u.0] = Some(lookup(&ws.functors, "functor", f).map_err(|e| e.at(&at))?.clone());
    }
    let restrictions = restrictions
        .into_iter()
        .enumerate()
        .map(|(i, r)| match r {
            Some(r) => Ok(r),
            None if base.is_identity(Arr(i)) => Ok(FinFunctor::identity(&fibers[base.src(Arr(i)).0])),
            None => Err(Error::Indexed(format!("no restriction along `{}`", base.arrow_name(Arr(i))))
                .at(format!("{here}/restrictions"))),
        })
        .collect::<Result<Vec<_>>>()?;
    IndexedCategory::new(base.clone(), fibers, restrictions).map_err(|e| e.at(here))
}

fn build_presheaf(ws: &Workspace, doc: &PresheafDoc, here: &str) -> Result<Presheaf> {
    let c = lookup(&ws.categories, "category", &doc.category).map_err(|e| e.at(format!("{here}/category")))?;
    let mut labels = vec![None; c.object_count()];
    for (x, set) in &doc.sets {
        let o = object(c, x).map_err(|e| e.at(format!("{here}/sets{}", pointer(&[x]))))?;
        labels[o.0] = Some(set.clone());
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            l.ok_or_else(|| {
                Error::Presheaf(format!("no value set at `{}`", c.object_name(Obj(i)))).at(format!("{here}/sets"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut actions: Vec<Option<Vec<usize>>> = vec![None; c.arrow_count()];
    for (a, table) in &doc.actions {
        let at = format!("{here}/actions{}", pointer(&[a]));
        let f = arrow(c, a).map_err(|e| e.at(&at))?;
        let (s, t) = (c.src(f), c.tgt(f));
        let mut act = vec![None; labels[t.0].len()];
        for (y, x) in table {
            let elem = |set: &[String], v: &str| {
                set.iter().position(|l| l == v).ok_or_else(|| {
                    Error::Unknown {
                        kind: "element",
                        name: v.to_string(),
                    }
                    .at(format!("{at}{}", pointer(&[y])))
                })
            };
            act[elem(&labels[t.0], y)?] = Some(elem(&labels[s.0], x)?);
        }
        let act = act
            .into_iter()
            .enumerate()
            .map(|(i, x)| {
                x.ok_or_else(|| Error::Presheaf(format!("`{}` has no image", labels[t.0][i])).at(at.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        actions[f.0] = Some(act);
    }
    let actions = actions
        .into_iter()
        .enumerate()
        .map(|(i, a)| match a {
            Some(a) => Ok(a),
            None if c.is_identity(Arr(i)) => Ok((0..labels[c.src(Arr(i)).0].len()).collect()),
            None => Err(Error::Presheaf(format!("no action of `{}`", c.arrow_name(Arr(i)))).at(format!("{here}/actions"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Presheaf::new(c, labels, actions).map_err(|e| e.at(here))
}

fn name_of<'a, T>(map: &'a BTreeMap<String, T>, kind: &'static str, same: impl Fn(&T) -> bool) -> Result<&'a str> {
    map.iter()
        .find(|(_, v)| same(v))
        .map(|(k, _)| k.as_str())
        .ok_or_else(|| Error::Unknown {
            kind,
            name: "unnamed entity".into(),
        })
}

/// The canonical document for `c`: all arrows in index order, identities
/// listed only when not named `id_<object>`, composites of non-identities.
pub fn category_doc(c: &FinCategory) -> CategoryDoc {
    let mut identities = BTreeMap::new();
    for o in c.objects() {
        let id = c.arrow_name(c.identity(o));
        if id != format!("id_{}", c.object_name(o)) {
            identities.insert(c.object_name(o).to_string(), id.to_string());
        }
    }
    let mut composites = Vec::new();
    for f in c.arrows().filter(|&f| !c.is_identity(f)) {
        for &g in c.arrows_from(c.tgt(f)) {
            if !c.is_identity(g) {
                composites.push([
                    c.arrow_name(g).to_string(),
                    c.arrow_name(f).to_string(),
                    c.arrow_name(c.comp(g, f)).to_string(),
                ]);
            }
        }
    }
    CategoryDoc {
        objects: c.objects().map(|o| c.object_name(o).to_string()).collect(),
        arrows: c
            .arrows()
            .map(|a| ArrowDoc {
                name: c.arrow_name(a).to_string(),
                src: c.object_name(c.src(a)).to_string(),
                tgt: c.object_name(c.tgt(a)).to_string(),
            })
            .collect(),
        identities,
        composites,
    }
}

/// The canonical document of a single functor given the names of its ends.
pub fn functor_doc(f: &FinFunctor, source: &str, target: &str) -> FunctorDoc {
    let (c, d) = (f.source(), f.target());
    FunctorDoc {
        source: source.to_string(),
        target: target.to_string(),
        objects: c
            .objects()
            .map(|o| (c.object_name(o).to_string(), d.object_name(f.obj(o)).to_string()))
            .collect(),
        arrows: c
            .arrows()
            .filter(|&a| !c.is_identity(a))
            .map(|a| (c.arrow_name(a).to_string(), d.arrow_name(f.arr(a)).to_string()))
            .collect(),
    }
}

impl Workspace {
    /// Registers `c` under `name` unless an equal category is already
    /// present; returns the name in use.
    pub fn add_category(&mut self, name: &str, c: &Arc<FinCategory>) -> String {
        if let Some((k, _)) = self.categories.iter().find(|(_, v)| *v == c) {
            return k.clone();
        }
        self.categories.insert(name.to_string(), c.clone());
        name.to_string()
    }

    /// Registers `f` under `name` and its ends under `src` and `tgt`; an
    /// already present equal functor keeps its name.
    pub fn add_functor(&mut self, name: &str, f: &FinFunctor, src: &str, tgt: &str) -> String {
        self.add_category(src, f.source());
        self.add_category(tgt, f.target());
        if let Some((k, _)) = self.functors.iter().find(|(_, v)| *v == f) {
            return k.clone();
        }
        self.functors.insert(name.to_string(), f.clone());
        name.to_string()
    }

    /// Registers `ix` with its base under `base`, fibers as `name@x` and
    /// restrictions as `name@u`.
    pub fn add_indexed(&mut self, name: &str, ix: &IndexedCategory, base: &str) {
        let c = ix.base();
        self.add_category(base, c);
        for o in c.objects() {
            self.add_category(&format!("{name}@{}", c.object_name(o)), ix.fiber(o));
        }
        for u in c.arrows() {
            let r = ix.restriction(u);
            if !(c.is_identity(u) && r.is_identity()) {
                let tag = format!("{name}@{}", c.arrow_name(u));
                let (s, t) = (self.add_category(&tag, r.source()), self.add_category(&tag, r.target()));
                self.add_functor(&tag, r, &s, &t);
            }
        }
        self.indexed.insert(name.to_string(), ix.clone());
    }

    /// Registers `n` with its boundary functors as `name.source` and
    /// `name.target`.
    pub fn add_natural(&mut self, name: &str, n: &NatTransform, src: &str, tgt: &str) {
        self.add_functor(&format!("{name}.source"), n.source(), src, tgt);
        self.add_functor(&format!("{name}.target"), n.target(), src, tgt);
        self.naturals.insert(name.to_string(), n.clone());
    }

    fn add_site_functor(&mut self, s: &SiteFunctor) {
        self.add_functor("A", &s.functor, "C", "D");
        self.topologies.insert("J".into(), s.source.clone());
        self.topologies.insert("K".into(), s.target.clone());
    }
}

/// A generated instance as a workspace. Sites are `C` with `J`; site functors
/// are `A: C -> D` from `J` to `K`; an adjunction `G -| F` has `G: D -> C`;
/// a square has `A: D' -> D`, `B: C' -> C`, `p`, `p'`, `phi` and `K`.
pub fn instance_workspace(i: &Instance) -> Workspace {
    let mut ws = Workspace::default();
    match i {
        Instance::Site(j) => {
            ws.add_category("C", j.base());
            ws.topologies.insert("J".into(), j.clone());
        }
        Instance::Fibration { indexed, topology } => {
            ws.add_indexed("F", indexed, "C");
            ws.topologies.insert("J".into(), topology.clone());
        }
        Instance::SiteFunctor(s) | Instance::Comorphism(s) | Instance::DensePair(s) => ws.add_site_functor(s),
        Instance::AdjointPair(a) => {
            ws.add_functor("G", a.left(), "D", "C");
            ws.add_functor("F", a.right(), "C", "D");
            ws.add_natural("unit", a.unit(), "D", "D");
            ws.add_natural("counit", a.counit(), "C", "C");
        }
        Instance::Prop33Square(sq) => {
            ws.add_functor("p", &sq.p, "D", "C");
            ws.add_functor("p'", &sq.p_prime, "D'", "C'");
            ws.add_functor("A", &sq.a, "D'", "D");
            ws.add_functor("B", &sq.b, "C'", "C");
            ws.add_natural("phi", &sq.phi, "D'", "C");
            ws.topologies.insert("K".into(), sq.k.clone());
        }
    }
    ws
}

impl Workspace {
    fn category_name(&self, c: &Arc<FinCategory>) -> Result<&str> {
        name_of(&self.categories, "category", |x| x == c)
    }

    /// Serializes back to a document; references are recovered by finding
    /// an equal named entity.
    pub fn to_document(&self) -> Result<Document> {
        let mut doc = Document::default();
        for (name, c) in &self.categories {
            doc.categories.insert(name.clone(), category_doc(c));
        }
        for (name, f) in &self.functors {
            let (s, t) = (self.category_name(f.source())?, self.category_name(f.target())?);
            doc.functors.insert(name.clone(), functor_doc(f, s, t));
        }
        for (name, ix) in &self.indexed {
            let base = ix.base();
            let mut fibers = BTreeMap::new();
            for o in base.objects() {
                fibers.insert(base.object_name(o).to_string(), self.category_name(ix.fiber(o))?.to_string());
            }
            let mut restrictions = BTreeMap::new();
            for a in base.arrows() {
                let r = ix.restriction(a);
                if base.is_identity(a) && r.is_identity() {
                    continue;
                }
                let f = name_of(&self.functors, "functor", |x| x == r)?;
                restrictions.insert(base.arrow_name(a).to_string(), f.to_string());
            }
            doc.indexed.insert(
                name.clone(),
                IndexedDoc {
                    base: self.category_name(base)?.to_string(),
                    fibers,
                    restrictions,
                },
            );
        }
        for (name, t) in &self.topologies {
            let c = t.base();
            let mut generators = BTreeMap::new();
            for o in c.objects() {
                let m = t.minimal_cover(o);
                if !m.is_maximal(c) {
                    let fam = m.generators(c).into_iter().map(|a| c.arrow_name(a).to_string()).collect();
                    generators.insert(c.object_name(o).to_string(), vec![fam]);
                }
            }
            doc.topologies.insert(
                name.clone(),
                TopologyDoc {
                    category: self.category_name(c)?.to_string(),
                    generators,
                },
            );
        }
        for (name, n) in &self.naturals {
            let c = n.source().source();
            let d = n.source().target();
            doc.naturals.insert(
                name.clone(),
                NaturalDoc {
                    source: name_of(&self.functors, "functor", |x| x == n.source())?.to_string(),
                    target: name_of(&self.functors, "functor", |x| x == n.target())?.to_string(),
                    components: c
                        .objects()
                        .map(|o| (c.object_name(o).to_string(), d.arrow_name(n.component(o)).to_string()))
                        .collect(),
                },
            );
        }
        for (name, p) in &self.presheaves {
            let c = p.base();
            let mut actions = BTreeMap::new();
            for f in c.arrows().filter(|&f| !c.is_identity(f)) {
                let (s, t) = (c.src(f), c.tgt(f));
                let table = p
                    .action(f)
                    .iter()
                    .enumerate()
                    .map(|(y, &x)| (p.labels(t)[y].clone(), p.labels(s)[x].clone()))
                    .collect();
                actions.insert(c.arrow_name(f).to_string(), table);
            }
            doc.presheaves.insert(
                name.clone(),
                PresheafDoc {
                    category: self.category_name(c)?.to_string(),
                    sets: c
                        .objects()
                        .map(|o| (c.object_name(o).to_string(), p.labels(o).to_vec()))
                        .collect(),
                    actions,
                },
            );
        }
        Ok(doc)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> Result<String> {
        let doc = self.to_document()?;
        let mut s = serde_json::to_string_pretty(&doc).expect("documents serialize");
        s.push('\n');
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    const SMALL: &str = r#"{
      "categories": {
        "w": {"objects": ["a", "b"], "arrows": [
          {"name": "id_a", "src": "a", "tgt": "a"},
          {"name": "id_b", "src": "b", "tgt": "b"},
          {"name": "u", "src": "a", "tgt": "b"}]},
        "one": {"objects": ["*"]}
      },
      "functors": {"bang": {"source": "w", "target": "one", "objects": {"a": "*", "b": "*"}, "arrows": {"u": "id_*"}}},
      "topologies": {"sier": {"category": "w", "generators": {"b": [["u"]]}}},
      "presheaves": {"pt": {"category": "w", "sets": {"a": ["x"], "b": ["y"]}, "actions": {"u": {"y": "x"}}}}
    }"#;

    fn error_path(e: Error) -> String {
        match e {
            Error::At { path, .. } => path,
            other => panic!("unlocated error {other}"),
        }
    }

    #[test]
    fn small_bundle_resolves() {
        let ws = load_str(SMALL).unwrap();
        assert_eq!(*ws.categories["w"], *corpus::walk2());
        assert_eq!(ws.topologies["sier"], corpus::sier().transport(&FinFunctor::identity(&corpus::walk2())).unwrap());
        assert_eq!(ws.presheaves["pt"].sizes(), vec![1, 1]);
    }

    #[test]
    fn round_trip_is_stable() {
        let ws = load_str(SMALL).unwrap();
        let json = ws.to_json().unwrap();
        let again = load_str(&json).unwrap();
        assert_eq!(again, ws);
        assert_eq!(again.to_json().unwrap(), json);
    }

    #[test]
    fn missing_composite_is_located() {
        let text = r#"{"categories": {"c": {"objects": ["a", "b", "c"], "arrows": [
            {"name": "f", "src": "a", "tgt": "b"}, {"name": "g", "src": "b", "tgt": "c"}]}}}"#;
        let e = load_str(text).unwrap_err();
        assert!(e.to_string().contains("no declared composite"), "{e}");
        assert_eq!(error_path(e), "/categories/c");
    }

    #[test]
    fn dangling_reference_is_located() {
        let text = r#"{"topologies": {"t": {"category": "nowhere"}}}"#;
        let e = load_str(text).unwrap_err();
        assert!(e.to_string().contains("unknown category `nowhere`"), "{e}");
        assert_eq!(error_path(e), "/topologies/t/category");
        let text = r#"{"categories": {"c": {"objects": ["a"], "composites": [["f", "f", "f"]]}}}"#;
        assert_eq!(error_path(load_str(text).unwrap_err()), "/categories/c/composites/0");
    }

    #[test]
    fn parse_errors_carry_positions() {
        match load_str("{\n  \"categories\": [").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
        assert!(matches!(load_str(r#"{"extra": 1}"#).unwrap_err(), Error::Parse { .. }));
    }

    #[test]
    fn generated_instances_round_trip() {
        use crate::suite::{generate_instance, InstanceKind, SuiteCaps};
        let caps = SuiteCaps::default();
        for kind in InstanceKind::ALL {
            for seed in 0..4 {
                let ws = instance_workspace(&generate_instance(kind, seed, &caps).unwrap());
                let json = ws.to_json().unwrap();
                assert_eq!(load_str(&json).unwrap(), ws, "{}", kind.name());
            }
        }
    }

    #[test]
    fn pointers_escape_names() {
        assert_eq!(pointer(&["a/b", "c~d"]), "/a~1b/c~0d");
    }
}
