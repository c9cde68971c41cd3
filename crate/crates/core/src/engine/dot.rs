use alloc::string::String;
use core::fmt::Write;

use super::Configuration;
use crate::protocol::ProtocolSpec;

/// Renders the active-edge graph in DOT. Nodes are listed by index and
/// labelled with their state; counting leaders show their counters as
/// `l(r0,r1)`. Edges are listed in lexicographic order.
pub fn snapshot(config: &Configuration, protocol: &ProtocolSpec) -> String {
    let mut out = String::from("graph configuration {\n");
    for (i, s) in config.states().iter().enumerate() {
        let name = protocol.state_name(s.symbol);
        let _ = match s.counters {
            Some(c) => writeln!(out, "  {i} [label=\"{name}({},{})\"];", c.r0, c.r1),
            None => writeln!(out, "  {i} [label=\"{}\"];", escape(name)),
        };
    }
    for (u, v) in config.edges() {
        let _ = writeln!(out, "  {u} -- {v};");
    }
    out.push_str("}\n");
    out
}

fn escape(name: &str) -> String {
    name.replace('\\', "\\\\").replace('"', "\\\"")
}
