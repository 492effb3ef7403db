//! Plain-text and static HTML rendering of verdicts and justification trees.

use std::fmt::Write as _;

use crate::checks::{Status, Verdict};
use crate::engine::{Goal, JustificationTree, NodeStatus};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub case_id: String,
    pub timestamp: Option<String>,
    pub verdicts: Vec<Verdict>,
    /// Trees not owned by a verdict, such as query answers.
    pub trees: Vec<JustificationTree>,
}

impl Report {
    pub fn new(title: impl Into<String>, case_id: impl Into<String>) -> Self {
        Report { title: title.into(), case_id: case_id.into(), ..Default::default() }
    }

    /// Verdict trees in verdict order, then the free-standing ones.
    pub fn all_trees(&self) -> impl Iterator<Item = &JustificationTree> {
        self.verdicts.iter().flat_map(|v| v.justifications.iter()).chain(&self.trees)
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(Verdict::passed)
    }
}

/// The summary lines printed before any tree.
pub fn header_lines(r: &Report) -> Vec<String> {
    let mut first = format!("{} [{}]", r.title, r.case_id);
    if let Some(t) = &r.timestamp {
        let _ = write!(first, " {t}");
    }
    if !r.verdicts.is_empty() {
        let passed = r.verdicts.iter().filter(|v| v.passed()).count();
        let _ = write!(first, ": {passed} pass, {} fail", r.verdicts.len() - passed);
    }
    let mut out = vec![first];
    out.extend(r.verdicts.iter().map(verdict_line));
    out
}

fn verdict_line(v: &Verdict) -> String {
    let mut s = format!(
        "{} {}",
        match v.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        },
        v.title()
    );
    if !v.witnesses.is_empty() {
        let w: Vec<String> = v.witnesses.iter().map(ToString::to_string).collect();
        let _ = write!(s, " | witnesses: {}", w.join(" "));
    }
    if !v.blamed.is_empty() {
        let b: Vec<String> = v.blamed.iter().map(ToString::to_string).collect();
        let _ = write!(s, " | blamed: {}", b.join(", "));
    }
    if !v.reasons.is_empty() {
        let _ = write!(s, " | {}", v.reasons.join("; "));
    }
    single_line(s)
}

/// Line breaks inside user text would break the one-line-per-node layout.
fn single_line(s: String) -> String {
    if s.contains(['\n', '\r']) {
        s.replace("\r\n", " ").replace(['\n', '\r'], " ")
    } else {
        s
    }
}

/// `✓ p`, `✗ p  (no matching clause)`, `✓ not p` and so on.
pub fn node_label(t: &JustificationTree) -> String {
    let mark = if t.status.holds() { '✓' } else { '✗' };
    let mut s = format!("{mark} {}", t.goal);
    if t.status == NodeStatus::Failed && matches!(t.goal, Goal::Literal(_)) {
        if let Some(reason) = t.reason {
            let _ = write!(s, "  ({reason})");
        }
    }
    single_line(s)
}

/// Preorder walk without recursion, so deep proofs are safe to render.
fn walk<'t>(t: &'t JustificationTree, mut visit: impl FnMut(Event<'t>)) {
    let mut stack = vec![Event::Open(t, 0)];
    while let Some(e) = stack.pop() {
        if let Event::Open(n, depth) = e {
            stack.push(Event::Close(n));
            stack.extend(n.children.iter().rev().map(|c| Event::Open(c, depth + 1)));
        }
        visit(e);
    }
}

#[derive(Clone, Copy)]
enum Event<'t> {
    Open(&'t JustificationTree, usize),
    Close(&'t JustificationTree),
}

pub fn render_text(r: &Report) -> String {
    let mut out = String::new();
    for l in header_lines(r) {
        out.push_str(&l);
        out.push('\n');
    }
    for t in r.all_trees() {
        walk(t, |e| {
            if let Event::Open(n, depth) = e {
                for _ in 0..depth {
                    out.push_str("  ");
                }
                out.push_str(&node_label(n));
                out.push('\n');
            }
        });
    }
    out
}

pub fn escape_html(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

const STYLE: &str = "body{font-family:sans-serif}ul{list-style:none;padding-left:1.5em}\
.pass{color:#1a7f37}.fail{color:#cf222e}summary{cursor:pointer}code{white-space:pre}";

/// A self-contained page: collapsible trees built from `<details>`, no scripts.
pub fn render_html(r: &Report) -> String {
    let mut out = String::new();
    let header = header_lines(r);
    out.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = writeln!(out, "<title>{}</title>", escape_html(&r.title));
    let _ = writeln!(out, "<style>{STYLE}</style>\n</head>\n<body>");
    let _ = writeln!(out, "<h1>{}</h1>", escape_html(&header[0]));
    if !r.verdicts.is_empty() {
        out.push_str("<ul class=\"verdicts\">\n");
        for (v, line) in r.verdicts.iter().zip(&header[1..]) {
            let class = if v.passed() { "pass" } else { "fail" };
            let _ = writeln!(out, "<li class=\"{class}\"><code>{}</code></li>", escape_html(line));
        }
        out.push_str("</ul>\n");
    }
    for t in r.all_trees() {
        out.push_str("<ul class=\"tree\">\n");
        walk(t, |e| match e {
            Event::Open(n, _) => {
                let class = if n.status.holds() { "pass" } else { "fail" };
                let label = escape_html(&node_label(n));
                if n.children.is_empty() {
                    let _ = writeln!(out, "<li class=\"{class}\"><code>{label}</code></li>");
                } else {
                    let _ = writeln!(
                        out,
                        "<li class=\"{class}\"><details open><summary><code>{label}</code></summary>\n<ul>"
                    );
                }
            }
            Event::Close(n) => {
                if !n.children.is_empty() {
                    out.push_str("</ul>\n</details></li>\n");
                }
            }
        });
        out.push_str("</ul>\n");
    }
    out.push_str("</body>\n</html>\n");
    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::checks::{CheckName, Verdict};
    use crate::engine::{prove_negation, solve, SolveOptions};
    use crate::logic::{parse_literal, parse_program, parse_query};

    /// Checks that every non-void tag is closed in order.
    pub(crate) fn tags_balanced(html: &str) -> Result<(), String> {
        const VOID: [&str; 4] = ["meta", "br", "hr", "img"];
        let mut stack: Vec<String> = Vec::new();
        let mut rest = html;
        while let Some(i) = rest.find('<') {
            rest = &rest[i + 1..];
            let end = rest.find('>').ok_or("unterminated tag")?;
            let tag = &rest[..end];
            rest = &rest[end + 1..];
            if tag.starts_with('!') {
                continue;
            }
            if let Some(name) = tag.strip_prefix('/') {
                match stack.pop() {
                    Some(open) if open == name => {}
                    other => return Err(format!("</{name}> closes {other:?}")),
                }
            } else {
                let name = tag.split_whitespace().next().ok_or("empty tag")?.to_string();
                if !VOID.contains(&name.as_str()) {
                    stack.push(name);
                }
            }
        }
        if stack.is_empty() {
            Ok(())
        } else {
            Err(format!("unclosed {stack:?}"))
        }
    }

    fn tree(p: &str, q: &str) -> JustificationTree {
        solve(&parse_program(p).unwrap(), &parse_query(q).unwrap(), SolveOptions::default()).unwrap()[0]
            .justification
            .clone()
    }

    #[test]
    fn single_fact_is_two_lines() {
        let mut r = Report::new("query", "c");
        r.trees.push(tree("p.", "?- p."));
        assert_eq!(render_text(&r), "query [c]\n✓ p\n");
    }

    #[test]
    fn indentation_follows_depth() {
        let mut r = Report::new("query", "c");
        r.trees.push(tree("a :- b. b :- c. c.", "?- a."));
        let text = render_text(&r);
        let lines: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(lines, vec!["✓ a", "  ✓ b", "    ✓ c"]);
    }

    #[test]
    fn completeness_failure_line() {
        let p = parse_program(
            "assessment(design_assessment). process_complete(design_assessment). \
             assessment(security_assessment). incomplete(X) :- assessment(X), not process_complete(X).",
        )
        .unwrap();
        let a = &solve(&p, &parse_query("incomplete(X)").unwrap(), SolveOptions::default()).unwrap()[0];
        let mut r = Report::new("check", "c");
        r.trees.push(a.justification.clone());
        let text = render_text(&r);
        assert!(text.contains("\n    ✗ process_complete(security_assessment)  (no matching clause)\n"), "{text}");
        assert!(text.contains("\n  ✓ not process_complete(security_assessment)\n"));
    }

    #[test]
    fn line_count_is_header_plus_nodes() {
        let p = parse_program("p :- q, not r. q. s :- t.").unwrap();
        let neg = prove_negation(&p, &parse_query("s").unwrap(), SolveOptions::default()).unwrap().unwrap();
        let mut v = Verdict {
            check: CheckName::Indefeasibility,
            rule: None,
            status: Status::Fail,
            witnesses: vec![],
            blamed: vec![parse_literal("t").unwrap()],
            reasons: vec!["multi\nline".into()],
            justifications: vec![neg.justification],
        };
        let mut r = Report::new("check", "c");
        r.verdicts.push(v.clone());
        v.status = Status::Pass;
        v.justifications = vec![tree("p :- q, not r. q.", "?- p.")];
        r.verdicts.push(v);
        let nodes: usize = r.all_trees().map(JustificationTree::node_count).sum();
        assert_eq!(render_text(&r).lines().count(), header_lines(&r).len() + nodes);
    }

    #[test]
    fn empty_report_is_valid_html() {
        let html = render_html(&Report::new("empty", "c"));
        tags_balanced(&html).unwrap();
        assert!(html.contains("<h1>empty [c]</h1>"));
        assert!(!html.contains("<script"));
    }

    #[test]
    fn descriptions_are_escaped() {
        let mut r = Report::new("a < b & \"c\"", "x>y");
        r.trees.push(tree("p('<tag>').", "?- p(X)."));
        let html = render_html(&r);
        tags_balanced(&html).unwrap();
        assert!(html.contains("a &lt; b &amp; &quot;c&quot;"));
        assert!(html.contains("p('&lt;tag&gt;')"));
        assert!(!html.contains("<tag>"));
    }

    #[test]
    fn blamed_literal_appears_as_often_as_in_text() {
        let p = parse_program("p :- q, r. p :- s. q.").unwrap();
        let neg = prove_negation(&p, &parse_query("p").unwrap(), SolveOptions::default()).unwrap().unwrap();
        let mut r = Report::new("check", "c");
        r.trees.push(neg.justification);
        let html = render_html(&r);
        tags_balanced(&html).unwrap();
        assert_eq!(html.matches("✗ r  (no matching clause)").count(), 1);
        assert_eq!(html.matches("✗ s  (no matching clause)").count(), 1);
    }

    #[test]
    fn deep_trees_render() {
        let mut text = String::from("c0.\n");
        for i in 1..3000 {
            text.push_str(&format!("c{i} :- c{}.\n", i - 1));
        }
        let mut r = Report::new("deep", "c");
        r.trees.push(tree(&text, "?- c2999."));
        assert_eq!(render_text(&r).lines().count(), 3001);
        tags_balanced(&render_html(&r)).unwrap();
    }
}
