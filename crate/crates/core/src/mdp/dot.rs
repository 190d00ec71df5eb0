use std::fmt::Write;

use super::FiniteMdp;
use crate::rational;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn quote(s: &str) -> String {
    format!("\"{}\"", escape(s))
}

/// Graphviz rendering: controller states are boxes, random states circles.
pub fn to_dot(mdp: &FiniteMdp) -> String {
    let mut out = String::from("digraph mdp {\n  rankdir=LR;\n");
    for i in 0..mdp.len() {
        let shape = if mdp.is_controller(i) { "box" } else { "circle" };
        let border = if i == mdp.initial() { ", penwidth=2" } else { "" };
        let label = format!("\"{}\\ncol {}\"", escape(mdp.id(i).as_str()), mdp.color(i));
        let _ = writeln!(out, "  {} [shape={shape}, label={label}{border}];", quote(mdp.id(i).as_str()));
    }
    for i in 0..mdp.len() {
        for (k, &t) in mdp.succ(i).iter().enumerate() {
            let (a, b) = (quote(mdp.id(i).as_str()), quote(mdp.id(t).as_str()));
            match mdp.probs(i).get(k) {
                Some(p) => {
                    let _ = writeln!(out, "  {a} -> {b} [label={}];", quote(&rational::format(p)));
                }
                None => {
                    let _ = writeln!(out, "  {a} -> {b};");
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::MdpBuilder;

    #[test]
    fn single_node() {
        let mut b = MdpBuilder::new();
        b.random("a", 0).prob_edge("a", "a", rational::one());
        let dot = to_dot(&b.build().unwrap());
        assert_eq!(dot.matches("shape=").count(), 1);
        assert!(dot.contains("shape=circle"));
        assert!(dot.contains("label=\"1\""));
    }
}
