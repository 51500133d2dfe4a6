//! Named, seeded experiments over the corpus and over random instances.
//!
//! Each experiment draws instance `i` from its own stream of the seed, so a
//! report depends only on `(id, seed, caps)` and not on scheduling.

mod cases;
mod experiments;
pub mod gen;
pub mod oracle;
pub mod show;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

pub use experiments::{coverage_gaps, experiment, experiment_ids, experiments, COVERAGE};
pub use gen::{generate_instance, rng_for, Instance, InstanceKind, SuiteCaps, SuiteRng};

use crate::error::{Error, Result};

/// Outcome of checking one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    /// Every assertion held; the count is the number of elementary checks.
    Pass(usize),
    /// A hypothesis of the statement does not hold on this instance.
    Vacuous(String),
    /// An enumeration cap was reached.
    Skipped(String),
    /// A one-directional observation logged for review, not an assertion.
    Noted(String),
    Fail(String),
}

/// One generated instance of an experiment.
pub(crate) trait Case: Sized + Send + Sync {
    fn describe(&self) -> String;
    /// Strictly smaller candidates, tried in order while shrinking.
    fn shrink(&self) -> Vec<Self> {
        Vec::new()
    }
}

/// The statement an experiment checks.
pub(crate) trait Property: Send + Sync {
    type Case: Case;
    fn id(&self) -> &'static str;
    fn claim(&self) -> &'static str;
    /// `None` when this draw was rejected.
    fn generate(&self, rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<Self::Case>;
    fn check(&self, case: &Self::Case) -> Check;
}

/// An experiment in the registry.
pub trait Experiment: Send + Sync {
    fn id(&self) -> &'static str;
    fn claim(&self) -> &'static str;
    /// Generates one instance from `rng` and checks it, shrinking failures.
    fn trial(&self, rng: &mut SuiteRng, caps: &SuiteCaps) -> Trial;
}

/// What happened to one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Trial {
    Passed(usize),
    Vacuous(String),
    Skipped(String),
    Noted { note: String, instance: String },
    Failed(Failure),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub witness: String,
    pub instance: String,
    pub minimized: String,
    /// Whether checking the minimized instance again still fails.
    pub replay_fails: bool,
}

const REJECTION_ROUNDS: usize = 200;
const SHRINK_ROUNDS: usize = 64;

pub(crate) struct Registered<P>(pub P);

impl<P: Property> Experiment for Registered<P> {
    fn id(&self) -> &'static str {
        self.0.id()
    }

    fn claim(&self) -> &'static str {
        self.0.claim()
    }

    fn trial(&self, rng: &mut SuiteRng, caps: &SuiteCaps) -> Trial {
        let case = match (0..REJECTION_ROUNDS).find_map(|_| self.0.generate(rng, caps)) {
            Some(c) => c,
            None => return Trial::Skipped("no instance within caps".into()),
        };
        match self.0.check(&case) {
            Check::Pass(n) => Trial::Passed(n),
            Check::Vacuous(r) => Trial::Vacuous(r),
            Check::Skipped(r) => Trial::Skipped(r),
            Check::Noted(note) => Trial::Noted {
                note,
                instance: case.describe(),
            },
            Check::Fail(witness) => {
                let small = shrink(&self.0, &case);
                let replay_fails = matches!(self.0.check(small.as_ref().unwrap_or(&case)), Check::Fail(_));
                Trial::Failed(Failure {
                    witness,
                    instance: case.describe(),
                    minimized: small.as_ref().unwrap_or(&case).describe(),
                    replay_fails,
                })
            }
        }
    }
}

/// Greedy: take the first candidate that still fails, until none does.
fn shrink<P: Property>(p: &P, case: &P::Case) -> Option<P::Case> {
    let mut current: Option<P::Case> = None;
    for _ in 0..SHRINK_ROUNDS {
        let here = current.as_ref().unwrap_or(case);
        let next = here
            .shrink()
            .into_iter()
            .find(|cand| matches!(p.check(cand), Check::Fail(_)));
        match next {
            Some(n) => current = Some(n),
            None => break,
        }
    }
    current
}

/// The result of [`run_experiment`].
#[derive(Clone, Debug)]
pub struct Report {
    pub id: &'static str,
    pub claim: &'static str,
    pub seed: u64,
    pub caps: SuiteCaps,
    pub trials: Vec<Trial>,
    /// Not part of the rendered report.
    pub wall_time: Duration,
}

/// Tallies of a report.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub passed: usize,
    pub failed: usize,
    pub vacuous: usize,
    pub skipped: usize,
    pub noted: usize,
    pub checks: usize,
}

impl Report {
    pub fn counts(&self) -> Counts {
        let mut c = Counts::default();
        for t in &self.trials {
            match t {
                Trial::Passed(n) => {
                    c.passed += 1;
                    c.checks += n;
                }
                Trial::Failed(_) => c.failed += 1,
                Trial::Vacuous(_) => c.vacuous += 1,
                Trial::Skipped(_) => c.skipped += 1,
                Trial::Noted { .. } => c.noted += 1,
            }
        }
        c
    }

    /// No instance failed.
    pub fn passed(&self) -> bool {
        self.counts().failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = (usize, &Failure)> {
        self.trials.iter().enumerate().filter_map(|(i, t)| match t {
            Trial::Failed(f) => Some((i, f)),
            _ => None,
        })
    }

    /// Line-oriented report followed by a `key=value` trailer.
    pub fn render(&self) -> String {
        let mut body = String::new();
        let _ = writeln!(body, "experiment: {}", self.id);
        let _ = writeln!(body, "claim: {}", self.claim);
        let _ = writeln!(body, "seed: {}", self.seed);
        let _ = writeln!(body, "caps: {}", self.caps);
        let mut reasons: BTreeMap<(&str, &str), usize> = BTreeMap::new();
        for (i, t) in self.trials.iter().enumerate() {
            match t {
                Trial::Vacuous(r) => *reasons.entry(("vacuous", r)).or_default() += 1,
                Trial::Skipped(r) => *reasons.entry(("skipped", r)).or_default() += 1,
                Trial::Noted { note, instance } => {
                    let _ = writeln!(body, "instance {i}: NOTED {note}");
                    for line in instance.lines() {
                        let _ = writeln!(body, "  | {line}");
                    }
                }
                Trial::Failed(f) => {
                    let _ = writeln!(body, "instance {i}: FAIL {}", f.witness);
                    for line in f.instance.lines() {
                        let _ = writeln!(body, "  | {line}");
                    }
                    let _ = writeln!(body, "  minimized:");
                    for line in f.minimized.lines() {
                        let _ = writeln!(body, "  | {line}");
                    }
                    let _ = writeln!(
                        body,
                        "  minimized replay: {}",
                        if f.replay_fails { "fails" } else { "passes" }
                    );
                }
                Trial::Passed(_) => {}
            }
        }
        for ((kind, r), n) in &reasons {
            let _ = writeln!(body, "{kind}: {n} x {r}");
        }
        let c = self.counts();
        let mut out = body.clone();
        out.push_str("--- trailer\n");
        let _ = writeln!(out, "id={}", self.id);
        let _ = writeln!(out, "seed={}", self.seed);
        let _ = writeln!(out, "caps={}", self.caps);
        let _ = writeln!(out, "instances={}", self.trials.len());
        let _ = writeln!(out, "passed={}", c.passed);
        let _ = writeln!(out, "failed={}", c.failed);
        let _ = writeln!(out, "vacuous={}", c.vacuous);
        let _ = writeln!(out, "skipped={}", c.skipped);
        let _ = writeln!(out, "noted={}", c.noted);
        let _ = writeln!(out, "checks={}", c.checks);
        for (i, f) in self.failures() {
            let text = format!("{}\n{}", f.witness, f.minimized);
            let _ = writeln!(out, "failure={i} sha256:{}", hex(&Sha256::digest(text.as_bytes())[..8]));
        }
        let _ = writeln!(out, "digest=sha256:{}", hex(&Sha256::digest(body.as_bytes())));
        let _ = writeln!(out, "status={}", if self.passed() { "pass" } else { "fail" });
        out
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs experiment `id` on `caps.instances` instances drawn from `seed`.
pub fn run_experiment(id: &str, seed: u64, caps: &SuiteCaps) -> Result<Report> {
    let exp = experiment(id).ok_or_else(|| Error::Unknown {
        kind: "experiment",
        name: id.to_string(),
    })?;
    caps.validate()?;
    let start = Instant::now();
    let trials: Vec<Trial> = (0..caps.instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(exp.id(), seed, i);
            exp.trial(&mut rng, caps)
        })
        .collect();
    Ok(Report {
        id: exp.id(),
        claim: exp.claim(),
        seed,
        caps: *caps,
        trials,
        wall_time: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::Topology;

    /// Deliberately false: every topology is trivial.
    struct AllTrivial;

    impl Case for Topology {
        fn describe(&self) -> String {
            show::site(self)
        }

        fn shrink(&self) -> Vec<Self> {
            cases::shrink_site(self)
        }
    }

    impl Property for AllTrivial {
        type Case = Topology;
        fn id(&self) -> &'static str {
            "all-trivial"
        }
        fn claim(&self) -> &'static str {
            "every topology is trivial"
        }
        fn generate(&self, rng: &mut SuiteRng, caps: &SuiteCaps) -> Option<Topology> {
            let c = gen::random_category(rng, caps.base_objects);
            Some(gen::random_topology(rng, &c))
        }
        fn check(&self, j: &Topology) -> Check {
            if j.is_trivial() {
                Check::Pass(1)
            } else {
                Check::Fail("non-trivial topology".into())
            }
        }
    }

    #[test]
    fn failures_are_shrunk_and_replayed() {
        let exp = Registered(AllTrivial);
        let caps = SuiteCaps::default();
        let mut failed = 0;
        for i in 0..40 {
            if let Trial::Failed(f) = exp.trial(&mut rng_for("x", 0, i), &caps) {
                failed += 1;
                assert!(f.replay_fails);
                assert!(f.minimized.len() <= f.instance.len());
            }
        }
        assert!(failed > 0);
    }

    #[test]
    fn unknown_experiment_is_an_error() {
        assert!(run_experiment("prop-9.9", 0, &SuiteCaps::default()).is_err());
    }

    #[test]
    fn coverage_is_complete() {
        assert!(coverage_gaps().is_empty());
        for id in experiment_ids() {
            assert!(experiment(id).is_some());
        }
    }
}
