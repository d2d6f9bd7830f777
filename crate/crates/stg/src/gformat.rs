//! Line-oriented `.g` interchange format.
//!
//! Read arcs are written as self-loops (`place t` and `t place`), which is the
//! usual `.g` idiom; on import every self-loop becomes a read arc. Two
//! non-standard directives carry what plain `.g` cannot express:
//! `.initial_state` lists the signals that start high and `.idle` names the
//! quiescent place used by the deadlock check.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::net::{Edge, Label, SignalKind, Stg, StgBuilder};
use crate::StgError;

pub fn write_g(stg: &Stg) -> String {
    let mut out = String::new();
    let _ = writeln!(out, ".model {}", stg.name());
    for (directive, kind) in [
        (".inputs", SignalKind::Input),
        (".outputs", SignalKind::Output),
        (".internal", SignalKind::Internal),
    ] {
        let names: Vec<&str> =
            stg.signals().iter().filter(|s| s.kind == kind).map(|s| s.name.as_str()).collect();
        if !names.is_empty() {
            let _ = writeln!(out, "{directive} {}", names.join(" "));
        }
    }
    let dummies: Vec<&str> = stg
        .transitions()
        .iter()
        .filter(|t| t.label == Label::Dummy)
        .map(|t| t.name.as_str())
        .collect();
    if !dummies.is_empty() {
        let _ = writeln!(out, ".dummy {}", dummies.join(" "));
    }

    out.push_str(".graph\n");
    let places = stg.places();
    let mut place_out: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    for tr in stg.transitions() {
        for &p in tr.pre.iter().chain(&tr.read) {
            place_out.entry(p).or_default().push(&tr.name);
        }
    }
    for (p, targets) in &place_out {
        let _ = writeln!(out, "{} {}", places[*p], targets.join(" "));
    }
    for tr in stg.transitions() {
        let targets: Vec<&str> =
            tr.post.iter().chain(&tr.read).map(|&p| places[p].as_str()).collect();
        if !targets.is_empty() {
            let _ = writeln!(out, "{} {}", tr.name, targets.join(" "));
        }
    }

    let marking: Vec<String> = stg
        .initial_marking()
        .0
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(p, &c)| if c == 1 { places[p].clone() } else { format!("{}={c}", places[p]) })
        .collect();
    let _ = writeln!(out, ".marking {{{}}}", marking.join(" "));
    let high: Vec<&str> = stg
        .signals()
        .iter()
        .zip(stg.initial_code())
        .filter(|(_, &h)| h)
        .map(|(s, _)| s.name.as_str())
        .collect();
    if !high.is_empty() {
        let _ = writeln!(out, ".initial_state {}", high.join(" "));
    }
    if let Some(p) = stg.idle_place() {
        let _ = writeln!(out, ".idle {}", places[p]);
    }
    out.push_str(".end\n");
    out
}

fn split_transition(name: &str) -> Option<(&str, Edge)> {
    let base = name.split('/').next()?;
    let (signal, edge) = match base.chars().last()? {
        '+' => (&base[..base.len() - 1], Edge::Rise),
        '-' => (&base[..base.len() - 1], Edge::Fall),
        _ => return None,
    };
    (!signal.is_empty()).then_some((signal, edge))
}

#[derive(Default)]
struct Arcs {
    pre: Vec<String>,
    post: Vec<String>,
}

pub fn parse_g(text: &str) -> Result<Stg, StgError> {
    let mut name = String::from("stg");
    let mut signals: Vec<(String, SignalKind)> = Vec::new();
    let mut dummies: Vec<String> = Vec::new();
    let mut graph: Vec<(usize, Vec<String>)> = Vec::new();
    let mut marking: Vec<(usize, String)> = Vec::new();
    let mut initial_high: Vec<String> = Vec::new();
    let mut idle: Option<String> = None;
    let mut in_graph = false;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let head = words.next().unwrap_or_default();
        let rest: Vec<String> = words.map(str::to_owned).collect();
        match head {
            ".model" | ".name" => name = rest.first().cloned().unwrap_or(name),
            ".inputs" => signals.extend(rest.into_iter().map(|s| (s, SignalKind::Input))),
            ".outputs" => signals.extend(rest.into_iter().map(|s| (s, SignalKind::Output))),
            ".internal" => signals.extend(rest.into_iter().map(|s| (s, SignalKind::Internal))),
            ".dummy" => dummies.extend(rest),
            ".graph" => in_graph = true,
            ".marking" => {
                let body = line[".marking".len()..].trim().trim_start_matches('{').trim_end_matches('}');
                marking.extend(body.split_whitespace().map(|t| (line_no, t.to_owned())));
            }
            ".initial_state" => initial_high.extend(rest),
            ".idle" => idle = rest.first().cloned(),
            ".end" => break,
            _ if head.starts_with('.') => {}
            _ if in_graph => graph.push((line_no, std::iter::once(head.to_owned()).chain(rest).collect())),
            _ => return Err(StgError::Parse { line: line_no, msg: format!("unexpected `{head}`") }),
        }
    }

    let signal_kind: HashMap<&str, SignalKind> =
        signals.iter().map(|(n, k)| (n.as_str(), *k)).collect();
    let is_transition = |tok: &str| {
        dummies.iter().any(|d| d == tok)
            || split_transition(tok).is_some_and(|(s, _)| signal_kind.contains_key(s))
    };

    let mut transitions: BTreeMap<String, Arcs> = BTreeMap::new();
    let mut transition_order: Vec<String> = Vec::new();
    let mut place_order: Vec<String> = Vec::new();
    let note_transition = |t: &str, order: &mut Vec<String>| {
        if !order.iter().any(|o| o == t) {
            order.push(t.to_owned());
        }
    };
    for (line_no, tokens) in &graph {
        let src = &tokens[0];
        if tokens.len() < 2 {
            return Err(StgError::Parse { line: *line_no, msg: format!("`{src}` has no successors") });
        }
        for dst in &tokens[1..] {
            match (is_transition(src), is_transition(dst)) {
                (true, true) => {
                    let implicit = format!("<{src},{dst}>");
                    if !place_order.contains(&implicit) {
                        place_order.push(implicit.clone());
                    }
                    note_transition(src, &mut transition_order);
                    note_transition(dst, &mut transition_order);
                    transitions.entry(src.clone()).or_default().post.push(implicit.clone());
                    transitions.entry(dst.clone()).or_default().pre.push(implicit);
                }
                (false, true) => {
                    if !place_order.contains(src) {
                        place_order.push(src.clone());
                    }
                    note_transition(dst, &mut transition_order);
                    transitions.entry(dst.clone()).or_default().pre.push(src.clone());
                }
                (true, false) => {
                    if !place_order.contains(dst) {
                        place_order.push(dst.clone());
                    }
                    note_transition(src, &mut transition_order);
                    transitions.entry(src.clone()).or_default().post.push(dst.clone());
                }
                (false, false) => {
                    return Err(StgError::Parse {
                        line: *line_no,
                        msg: format!("arc between two places `{src}` -> `{dst}`"),
                    })
                }
            }
        }
    }

    let mut b = StgBuilder::new(name);
    for (n, k) in &signals {
        b.signal(n.clone(), *k)?;
    }
    for p in &place_order {
        b.place(p.clone(), 0)?;
    }
    for (line_no, tok) in marking {
        let (pname, count) = match tok.split_once('=') {
            Some((p, c)) => (
                p.to_owned(),
                c.parse().map_err(|_| StgError::Parse { line: line_no, msg: format!("bad count in `{tok}`") })?,
            ),
            None => (tok, 1),
        };
        let id = b.place_id(&pname).ok_or(StgError::UnknownPlace(pname))?;
        b.set_tokens(id, count);
    }
    for s in initial_high {
        let id = b.signal_id(&s).ok_or(StgError::UnknownSignal(s))?;
        b.set_initial_level(id, true);
    }
    if let Some(p) = idle {
        let id = b.place_id(&p).ok_or(StgError::UnknownPlace(p))?;
        b.set_idle_place(id);
    }

    for t in &transition_order {
        let arcs = &transitions[t];
        let lookup = |n: &String| b.place_id(n).ok_or_else(|| StgError::UnknownPlace(n.clone()));
        let mut pre: Vec<usize> = arcs.pre.iter().map(lookup).collect::<Result<_, _>>()?;
        let mut post: Vec<usize> = arcs.post.iter().map(lookup).collect::<Result<_, _>>()?;
        let read: Vec<usize> = pre.iter().copied().filter(|p| post.contains(p)).collect();
        pre.retain(|p| !read.contains(p));
        post.retain(|p| !read.contains(p));
        if dummies.contains(t) {
            b.dummy(t.clone(), &pre, &post, &read);
        } else {
            let (sig, edge) = split_transition(t).expect("classified as transition");
            let id = b.signal_id(sig).ok_or_else(|| StgError::UnknownSignal(sig.into()))?;
            b.named_edge(t.clone(), id, edge, &pre, &post, &read);
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{build_ta_stg, reachability};

    #[test]
    fn ta_net_survives_export_and_import() {
        let stg = build_ta_stg(2);
        let text = write_g(&stg);
        let back = parse_g(&text).unwrap();
        assert_eq!(back.places().len(), stg.places().len());
        assert_eq!(back.transitions().len(), stg.transitions().len());
        assert_eq!(back.initial_code(), stg.initial_code());
        assert_eq!(back.idle_place().map(|p| &back.places()[p]), Some(&"p0".to_string()));
        let a = reachability(&stg, 10_000).unwrap();
        let b = reachability(&back, 10_000).unwrap();
        assert_eq!(a.len(), b.len());
        assert_eq!(a.edge_count(), b.edge_count());
        // read arcs come back as read arcs
        let t = back.transition_id("a1+").unwrap();
        assert_eq!(back.transition(t).read.len(), 1);
    }

    #[test]
    fn implicit_places_between_transitions() {
        let text = ".model ring\n.outputs a\n.graph\na+ a-\na- a+\n.marking {<a-,a+>}\n.end\n";
        let stg = parse_g(text).unwrap();
        assert_eq!(stg.places().len(), 2);
        assert_eq!(reachability(&stg, 10).unwrap().len(), 2);
    }

    #[test]
    fn place_to_place_arc_is_an_error() {
        let text = ".model bad\n.graph\np q\n.end\n";
        assert!(matches!(parse_g(text), Err(StgError::Parse { line: 3, .. })));
    }
}
