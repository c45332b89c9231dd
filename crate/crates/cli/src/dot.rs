use pattern_csp::{Pattern, Structure};

/// Graphviz text for a pattern: one cluster per variable, solid edges for
/// compatible pairs, dashed for incompatible ones, dotted for distinctness
/// disjunctions.
pub fn pattern_to_dot(p: &Pattern) -> String {
    let q = |s: &str| format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""));
    let mut out = String::from("graph pattern {\n  node [shape=circle];\n");
    for v in 0..p.num_vars() {
        out += &format!("  subgraph cluster_{v} {{\n    label={};\n", q(p.var_name(v)));
        for &a in p.domain(v) {
            out += &format!("    {};\n", q(p.point_name(a)));
        }
        out += "  }\n";
    }
    for (a, b, compat) in p.edges() {
        let style = if compat { "solid" } else { "dashed" };
        out += &format!("  {} -- {} [style={style}];\n", q(p.point_name(a)), q(p.point_name(b)));
    }
    for (i, d) in p.distinct().iter().enumerate() {
        for &(a, b) in d {
            out += &format!(
                "  {} -- {} [style=dotted, label=\"!={i}\"];\n",
                q(p.point_name(a)),
                q(p.point_name(b))
            );
        }
    }
    out + "}\n"
}
