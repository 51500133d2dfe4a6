use std::path::PathBuf;

use fibsite::bundle::{load_bundle, load_str};
use fibsite::corpus;
use fibsite::fibration::giraud_topology;
use fibsite::fincat::Obj;
use fibsite::sheaf::Presheaf;
use fibsite::sieve::Topology;

fn walk2_bundle() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus/walk2.bundle")
}

#[test]
fn corpus_bundle_matches_the_builtin_corpus() {
    let ws = load_bundle(walk2_bundle()).unwrap();
    let w = &ws.categories["walk2"];
    assert_eq!(**w, *corpus::walk2());
    assert_eq!(ws.indexed["twopoint"], corpus::twopoint());
    assert_eq!(ws.topologies["sier"], corpus::sier());
    assert_eq!(ws.topologies["trivial"], Topology::trivial(w));
    assert_eq!(ws.presheaves["pt"], Presheaf::terminal(w));

    let gb = giraud_topology(&ws.indexed["twopoint"], &ws.topologies["sier"]).unwrap();
    assert_eq!(**gb.total(), *ws.categories["total"]);
    assert_eq!(*gb.projection(), ws.functors["p"]);
    assert_eq!(*gb.giraud().unwrap(), ws.topologies["gir"]);
}

#[test]
fn giraud_covers_are_the_lifts_of_u() {
    let ws = load_bundle(walk2_bundle()).unwrap();
    let total = &ws.categories["total"];
    let gir = &ws.topologies["gir"];
    for x in ["(x0,b)", "(x1,b)"] {
        let o = total.object_named(x).unwrap();
        let names = gir.minimal_cover(o).names(total);
        assert_eq!(names, vec![format!("(id_y,u)->{x}")]);
    }
    let y = total.object_named("(y,a)").unwrap();
    assert!(gir.minimal_cover(y).is_maximal(total));
    assert_eq!(Obj(0), y);
}

#[test]
fn corpus_bundle_round_trips() {
    let ws = load_bundle(walk2_bundle()).unwrap();
    let text = std::fs::read_to_string(walk2_bundle()).unwrap();
    assert_eq!(ws.to_json().unwrap(), text);
    assert_eq!(load_str(&text).unwrap(), ws);
}

#[test]
fn broken_functor_is_located() {
    let text = std::fs::read_to_string(walk2_bundle())
        .unwrap()
        .replace(r#""(y,a)": "a""#, r#""(y,a)": "b""#);
    let e = load_str(&text).unwrap_err();
    assert!(e.to_string().starts_with("/functors/p: "), "{e}");
}
