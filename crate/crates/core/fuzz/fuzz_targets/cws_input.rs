#![no_main]

use libfuzzer_sys::fuzz_target;
use stabdb::search::{cws_to_stabilizer, parse_code};
use stabdb::GraphState;

// Input: qubit count byte, then "edges|code".
fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let Ok(s) = std::str::from_utf8(rest) else { return };
    let n = usize::from(n % 16);
    let (edges, code) = s.split_once('|').unwrap_or((s, ""));
    let Ok(graph) = GraphState::parse_edges(edges, n) else { return };
    assert_eq!(GraphState::parse_edges(&graph.edges_string(), n).unwrap(), graph);
    if let Ok(code) = parse_code(code, n) {
        if let Ok(g) = cws_to_stabilizer(&graph, &code) {
            assert_eq!(g.k(), code.nrows());
        }
    }
});
