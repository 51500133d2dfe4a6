//! Deciders for classes of functors between finite sites.

mod deciders;
pub mod local;
mod prop33;

pub use deciders::{
    decider, decider_names, deciders, is_comorphism, is_continuous, is_cover_preserving, is_covering_flat,
    is_dense_morphism, is_morphism_of_sites, replay, Decider,
};
pub use prop33::{check_prop33_conditions, Prop33Square};

use std::fmt;

use crate::error::{Error, Result};
use crate::fincat::{same_category, Arr, FinFunctor, Obj};
use crate::sieve::{Sieve, Topology};

/// A functor between sites.
#[derive(Clone, Debug)]
pub struct SiteFunctor {
    pub functor: FinFunctor,
    pub source: Topology,
    pub target: Topology,
}

impl SiteFunctor {
    pub fn new(functor: FinFunctor, source: Topology, target: Topology) -> Result<Self> {
        if !same_category(functor.source(), source.base()) || !same_category(functor.target(), target.base()) {
            return Err(Error::Mismatch("topologies must live on the functor's source and target".into()));
        }
        Ok(SiteFunctor {
            functor,
            source,
            target,
        })
    }

    pub fn identity(j: &Topology) -> Self {
        SiteFunctor {
            functor: FinFunctor::identity(j.base()),
            source: j.clone(),
            target: j.clone(),
        }
    }
}

/// Which condition a witness refutes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    /// The image of a source cover does not generate a target cover.
    CoverPreserving,
    /// The image of the minimal cover of `object` is not inside `cover`.
    Comorphism,
    /// Cofinality of a commuting square over a source cover.
    Cofinality,
    /// Arrows whose domain maps into an image do not cover.
    FlatNonempty,
    /// A span into two images is not locally a cone from one image.
    FlatSpan,
    /// An arrow equalised by a parallel image pair does not locally factor
    /// through an equaliser from the source.
    FlatEqualizer,
    /// A non-covering source sieve whose image covers.
    CoverReflection,
    /// Arrows out of images do not cover a target object.
    DenseCovering,
    /// An arrow between images is not locally an image.
    LocalFullness,
    /// A parallel pair identified by the functor is not locally equal.
    LocalFaithfulness,
    /// First Prop 3.3 bullet.
    Prop33Lift,
    /// Second Prop 3.3 bullet.
    Prop33Connect,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::CoverPreserving => "cover-preserving",
            Condition::Comorphism => "comorphism",
            Condition::Cofinality => "cofinality",
            Condition::FlatNonempty => "flat-nonempty",
            Condition::FlatSpan => "flat-span",
            Condition::FlatEqualizer => "flat-equalizer",
            Condition::CoverReflection => "cover-reflection",
            Condition::DenseCovering => "dense-covering",
            Condition::LocalFullness => "local-fullness",
            Condition::LocalFaithfulness => "local-faithfulness",
            Condition::Prop33Lift => "prop33-lift",
            Condition::Prop33Connect => "prop33-connect",
        }
    }
}

/// A replayable counterexample. `sieve` is the computed sieve that fails to
/// cover (or, for [`Condition::Comorphism`], the image sieve); the other
/// fields fix the instance of the condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub condition: Condition,
    pub object: Obj,
    pub objects: Vec<Obj>,
    pub arrows: Vec<Arr>,
    pub elements: Vec<usize>,
    pub cover: Option<Sieve>,
    pub sieve: Sieve,
}

impl Witness {
    pub(crate) fn new(condition: Condition, object: Obj, sieve: Sieve) -> Self {
        Witness {
            condition,
            object,
            objects: Vec::new(),
            arrows: Vec::new(),
            elements: Vec::new(),
            cover: None,
            sieve,
        }
    }

    pub(crate) fn with_objects(mut self, objects: Vec<Obj>) -> Self {
        self.objects = objects;
        self
    }

    pub(crate) fn with_arrows(mut self, arrows: Vec<Arr>) -> Self {
        self.arrows = arrows;
        self
    }

    pub(crate) fn with_elements(mut self, elements: Vec<usize>) -> Self {
        self.elements = elements;
        self
    }

    pub(crate) fn with_cover(mut self, cover: Sieve) -> Self {
        self.cover = Some(cover);
        self
    }
}

/// Outcome of a decider. `checked` counts the condition instances examined.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub decider: &'static str,
    pub holds: bool,
    pub checked: usize,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub(crate) fn pass(decider: &'static str, checked: usize) -> Self {
        Verdict {
            decider,
            holds: true,
            checked,
            witness: None,
        }
    }

    pub(crate) fn fail(decider: &'static str, checked: usize, witness: Witness) -> Self {
        Verdict {
            decider,
            holds: false,
            checked,
            witness: Some(witness),
        }
    }

    /// Conjunction; the first failure wins.
    pub(crate) fn and(decider: &'static str, parts: &[Verdict]) -> Self {
        let checked = parts.iter().map(|v| v.checked).sum();
        match parts.iter().find(|v| !v.holds) {
            Some(v) => Verdict {
                decider,
                holds: false,
                checked,
                witness: v.witness.clone(),
            },
            None => Verdict::pass(decider, checked),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} ({} checks)",
            self.decider,
            if self.holds { "holds" } else { "fails" },
            self.checked
        )?;
        if let Some(w) = &self.witness {
            write!(f, " at {} on object #{}", w.condition.name(), w.object.0)?;
        }
        Ok(())
    }
}

/// Human-readable description of a witness against the site it refutes.
pub fn describe_witness(s: &SiteFunctor, w: &Witness) -> String {
    let (src, tgt) = (s.functor.source(), s.functor.target());
    let on_source = matches!(
        w.condition,
        Condition::CoverPreserving
            | Condition::Comorphism
            | Condition::CoverReflection
            | Condition::LocalFullness
            | Condition::LocalFaithfulness
    );
    let (obj_cat, sieve_cat) = match w.condition {
        Condition::CoverPreserving | Condition::Comorphism => (src, tgt),
        _ if on_source => (src, src),
        _ => (tgt, tgt),
    };
    let mut out = format!(
        "{} fails at `{}`: sieve {}",
        w.condition.name(),
        obj_cat.object_name(w.object),
        w.sieve.display(sieve_cat)
    );
    if let Some(c) = &w.cover {
        let cat = if w.condition == Condition::Cofinality { src } else { sieve_cat };
        out.push_str(&format!(" against cover {}", c.display(cat)));
    }
    if !w.arrows.is_empty() {
        let names: Vec<String> = w
            .arrows
            .iter()
            .enumerate()
            .map(|(i, &a)| arrow_name_for(s, w.condition, i, a))
            .collect();
        out.push_str(&format!(" with arrows [{}]", names.join(", ")));
    }
    out
}

fn arrow_name_for(s: &SiteFunctor, c: Condition, i: usize, a: Arr) -> String {
    let (src, tgt) = (s.functor.source(), s.functor.target());
    let in_source = match c {
        Condition::Cofinality => i < 2,
        Condition::FlatEqualizer => i < 2,
        Condition::LocalFaithfulness => true,
        _ => false,
    };
    if in_source {
        src.arrow_name(a).to_string()
    } else {
        tgt.arrow_name(a).to_string()
    }
}
