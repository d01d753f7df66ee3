//! Parses configs, probes every slot of a built chain, and shows the
//! distinct rejection errors for broken configs.

use datar::config::{parse_config, probe_all, serialize_config};
use datar::framework::Datar;

fn main() {
    let datar = Datar::with_builtins();

    let good = parse_config(
        "[datar]\n\
         input = generator\n\
         storage = memstore\n\
         computation = builtin\n\
         control = standalone\n\
         output = svg\n",
    )
    .unwrap();
    println!("canonical form:\n{}", serialize_config(&good));
    let chain = datar.build_chain(&good).unwrap();
    for (kind, status) in probe_all(&chain) {
        println!("{kind}: {status}");
    }
    println!();

    // missing slot
    let err = parse_config("[datar]\ninput = generator\n").unwrap_err();
    println!("missing slots   -> {err}");

    // unknown engine name
    let broken = parse_config(
        "[datar]\n\
         input = teleporter\n\
         storage = memstore\n\
         computation = builtin\n\
         control = standalone\n\
         output = svg\n",
    )
    .unwrap();
    let err = datar.build_chain(&broken).unwrap_err();
    println!("unknown engine  -> {err}");

    // registered engine whose probe fails: logstore over a missing directory
    let unavailable = parse_config(
        "[datar]\n\
         input = generator\n\
         storage = logstore\n\
         computation = builtin\n\
         control = standalone\n\
         output = svg\n\
         \n\
         [storage.logstore]\n\
         dir = /nonexistent/bigdb\n",
    )
    .unwrap();
    let err = datar.build_chain(&unavailable).unwrap_err();
    println!("failing probe   -> {err}");
}
