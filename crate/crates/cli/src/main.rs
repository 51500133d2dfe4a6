use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fibsite::bundle::{instance_workspace, load_bundle, Workspace};
use fibsite::fibration::{giraud_topology, grothendieck};
use fibsite::sheaf::{is_sheaf, sheafify};
use fibsite::suite::{coverage_gaps, experiment_ids, generate_instance, run_experiment, show, InstanceKind, SuiteCaps};
use fibsite::verify::{decider, decider_names, describe_witness, SiteFunctor};
use fibsite::Error;

#[derive(Parser)]
#[command(name = "fibsite", version, about = "Finite sites, fibrations and their Giraud topologies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a bundle and list its entities
    Validate {
        bundle: PathBuf,
        /// Print the canonical JSON form instead
        #[arg(long)]
        canonical: bool,
    },
    /// Giraud topology on the total category of an indexed category
    Giraud {
        bundle: PathBuf,
        indexed: String,
        topology: String,
    },
    /// Decide a property of a functor between two sites
    Check {
        /// comorphism, cover, continuous, flat, site-morphism or dense
        kind: String,
        bundle: PathBuf,
        functor: String,
        source: String,
        target: String,
    },
    /// Sheafify a presheaf for a topology
    Sheafify {
        bundle: PathBuf,
        presheaf: String,
        topology: String,
    },
    /// Reindex an indexed category along a functor into its base
    Pullback {
        bundle: PathBuf,
        indexed: String,
        functor: String,
    },
    /// Run one experiment
    Prop {
        id: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// e.g. base=4,fiber=4,n=500
        #[arg(long, default_value = "")]
        caps: String,
    },
    /// Run experiments and print their reports
    Fuzz {
        /// Run every registered experiment
        #[arg(long)]
        all: bool,
        ids: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "")]
        caps: String,
    },
    /// Print a generated instance as a bundle
    Generate {
        /// site, fibration, site-functor, comorphism, dense-pair, adjoint-pair or prop33-square
        kind: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "")]
        caps: String,
    },
    /// List experiments and deciders
    List,
}

enum Failure {
    Input(String),
    Refuted,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn get<'a, T>(map: &'a std::collections::BTreeMap<String, T>, kind: &'static str, name: &str) -> Result<&'a T, Failure> {
    map.get(name).ok_or_else(|| {
        Error::Unknown {
            kind,
            name: name.to_string(),
        }
        .into()
    })
}

fn load(path: &Path) -> Result<Workspace, Failure> {
    load_bundle(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn mismatch(what: &str) -> Failure {
    Failure::Input(Error::Mismatch(what.to_string()).to_string())
}

fn validate(out: &mut String, path: &Path, canonical: bool) -> Outcome {
    let ws = load(path)?;
    if canonical {
        out.push_str(&ws.to_json()?);
        return Ok(());
    }
    for (name, c) in &ws.categories {
        out.push_str(&format!("category {name}: {} objects, {} arrows\n", c.object_count(), c.arrow_count()));
    }
    for (name, f) in &ws.functors {
        let (s, t) = (ws.categories.iter(), f.target());
        let src = s.clone().find(|(_, c)| *c == f.source()).map(|(n, _)| n.as_str()).unwrap_or("?");
        let tgt = s.clone().find(|(_, c)| *c == t).map(|(n, _)| n.as_str()).unwrap_or("?");
        out.push_str(&format!("functor {name}: {src} -> {tgt}\n"));
    }
    for (name, ix) in &ws.indexed {
        out.push_str(&format!("indexed {name}: over {} objects\n", ix.base().object_count()));
    }
    for (name, n) in &ws.naturals {
        out.push_str(&format!("natural {name}: {} components\n", n.components().len()));
    }
    for (name, p) in &ws.presheaves {
        out.push_str(&format!("presheaf {name}: sizes {:?}\n", p.sizes()));
    }
    for (name, j) in &ws.topologies {
        let kind = if j.is_trivial() { "trivial" } else { "non-trivial" };
        out.push_str(&format!("topology {name}: {kind}, {} objects\n", j.base().object_count()));
    }
    out.push_str("ok\n");
    Ok(())
}

fn giraud(out: &mut String, path: &Path, indexed: &str, topology: &str) -> Outcome {
    let ws = load(path)?;
    let ix = get(&ws.indexed, "indexed category", indexed)?;
    let j = get(&ws.topologies, "topology", topology)?;
    if ix.base() != j.base() {
        return Err(mismatch("the topology is not on the base of the indexed category"));
    }
    let gb = giraud_topology(ix, j)?;
    let k = gb.giraud().expect("giraud_topology attaches the topology");
    out.push_str(&format!("total {}\n", show::category(gb.total())));
    out.push_str(&format!("trivial: {}\n{}", k.is_trivial(), k.display()));
    Ok(())
}

fn check(out: &mut String, kind: &str, path: &Path, functor: &str, source: &str, target: &str) -> Outcome {
    let d = decider(kind).ok_or_else(|| {
        Failure::Input(format!("unknown check `{kind}`; expected one of {}", decider_names().join(", ")))
    })?;
    let ws = load(path)?;
    let f = get(&ws.functors, "functor", functor)?;
    let j = get(&ws.topologies, "topology", source)?;
    let k = get(&ws.topologies, "topology", target)?;
    let s = SiteFunctor::new(f.clone(), j.clone(), k.clone())?;
    let v = d.decide(&s);
    out.push_str(&format!("{}\n{v}\n", v.holds));
    if let Some(w) = &v.witness {
        out.push_str(&format!("witness: {}\n", describe_witness(&s, w)));
    }
    if v.holds {
        Ok(())
    } else {
        Err(Failure::Refuted)
    }
}

fn sheafify_cmd(out: &mut String, path: &Path, presheaf: &str, topology: &str) -> Outcome {
    let ws = load(path)?;
    let p = get(&ws.presheaves, "presheaf", presheaf)?;
    let j = get(&ws.topologies, "topology", topology)?;
    if p.base() != j.base() {
        return Err(mismatch("the presheaf and the topology live on different categories"));
    }
    let a = sheafify(p, j)?;
    out.push_str(&format!("sizes {:?} -> {:?}\n", p.sizes(), a.sheaf.sizes()));
    out.push_str(&format!("sheaf {}\n", show::presheaf(&a.sheaf)));
    let c = p.base();
    let mut rows: Vec<String> = c
        .objects()
        .map(|o| {
            let images: Vec<String> = p
                .labels(o)
                .iter()
                .zip(a.unit.component(o))
                .map(|(x, &y)| format!("{x}>{}", a.sheaf.labels(o)[y]))
                .collect();
            format!("unit {}: {}", c.object_name(o), images.join(" "))
        })
        .collect();
    rows.sort();
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    match is_sheaf(&a.sheaf, j) {
        Ok(()) => {
            out.push_str("is sheaf: true\n");
            Ok(())
        }
        Err(e) => {
            out.push_str(&format!("is sheaf: false\nwitness: {}\n", e.describe(&a.sheaf)));
            Err(Failure::Refuted)
        }
    }
}

fn pullback(out: &mut String, path: &Path, indexed: &str, functor: &str) -> Outcome {
    let ws = load(path)?;
    let ix = get(&ws.indexed, "indexed category", indexed)?;
    let f = get(&ws.functors, "functor", functor)?;
    if f.target() != ix.base() {
        return Err(mismatch("the functor does not land in the base of the indexed category"));
    }
    let pulled = ix.precompose(f)?;
    out.push_str(&show::indexed(&pulled));
    let total = grothendieck(&pulled)?;
    let t = total.total();
    out.push_str(&format!("total: {} objects, {} arrows\n", t.object_count(), t.arrow_count()));
    Ok(())
}

fn caps(s: &str) -> Result<SuiteCaps, Failure> {
    Ok(s.parse::<SuiteCaps>()?)
}

fn prop(out: &mut String, id: &str, seed: u64, caps_text: &str) -> Outcome {
    let report = run_experiment(id, seed, &caps(caps_text)?)?;
    eprintln!("{id}: {:.2?}", report.wall_time);
    out.push_str(&report.render());
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Refuted)
    }
}

fn fuzz(out: &mut String, all: bool, ids: &[String], seed: u64, caps_text: &str) -> Outcome {
    let gaps = coverage_gaps();
    if !gaps.is_empty() {
        return Err(Failure::Input(format!("coverage gaps: {}", gaps.join(", "))));
    }
    let caps = caps(caps_text)?;
    let mut chosen: Vec<String> = match (all, ids.is_empty()) {
        (true, true) => experiment_ids().into_iter().map(String::from).collect(),
        (false, false) => ids.to_vec(),
        (true, false) => return Err(Failure::Input("give either --all or experiment ids".into())),
        (false, true) => return Err(Failure::Input("nothing to run; pass --all or experiment ids".into())),
    };
    chosen.sort();
    chosen.dedup();
    let mut summary = Vec::new();
    for id in &chosen {
        let report = run_experiment(id, seed, &caps)?;
        eprintln!("{id}: {:.2?}", report.wall_time);
        out.push_str(&report.render());
        out.push('\n');
        let c = report.counts();
        summary.push(format!(
            "{id} {} passed={} failed={} vacuous={} skipped={} noted={}",
            if report.passed() { "pass" } else { "FAIL" },
            c.passed,
            c.failed,
            c.vacuous,
            c.skipped,
            c.noted
        ));
    }
    out.push_str("--- summary\n");
    for line in &summary {
        out.push_str(line);
        out.push('\n');
    }
    if summary.iter().all(|l| !l.contains(" FAIL ")) {
        Ok(())
    } else {
        Err(Failure::Refuted)
    }
}

fn generate(out: &mut String, kind: &str, seed: u64, caps_text: &str) -> Outcome {
    let kind: InstanceKind = kind.parse()?;
    let inst = generate_instance(kind, seed, &caps(caps_text)?)?;
    out.push_str(&instance_workspace(&inst).to_json()?);
    Ok(())
}

fn list(out: &mut String) -> Outcome {
    let mut names = decider_names();
    names.sort();
    for name in names {
        out.push_str(&format!("check {name}\n"));
    }
    let mut ids = experiment_ids();
    ids.sort();
    for id in ids {
        out.push_str(&format!("experiment {id}\n"));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = match &cli.command {
        Command::Validate { bundle, canonical } => validate(&mut out, bundle, *canonical),
        Command::Giraud {
            bundle,
            indexed,
            topology,
        } => giraud(&mut out, bundle, indexed, topology),
        Command::Check {
            kind,
            bundle,
            functor,
            source,
            target,
        } => check(&mut out, kind, bundle, functor, source, target),
        Command::Sheafify {
            bundle,
            presheaf,
            topology,
        } => sheafify_cmd(&mut out, bundle, presheaf, topology),
        Command::Pullback {
            bundle,
            indexed,
            functor,
        } => pullback(&mut out, bundle, indexed, functor),
        Command::Prop { id, seed, caps } => prop(&mut out, id, *seed, caps),
        Command::Fuzz { all, ids, seed, caps } => fuzz(&mut out, *all, ids, *seed, caps),
        Command::Generate { kind, seed, caps } => generate(&mut out, kind, *seed, caps),
        Command::List => list(&mut out),
    };
    let _ = std::io::stdout().write_all(out.as_bytes());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Refuted) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
