//! Line-oriented query files.
//!
//! ```text
//! relation R12(A1,A2) size 16
//! constraint R12 deg(A1,A2 | A1) <= 4
//! fd R12: A1 -> A2
//! query Q(A1,A2,A3,A4) :- R12(A1,A2), R23(A2,A3), R34(A3,A4), R41(A4,A1)
//! rule T1(A1,A2,A3) | T2(A2,A3,A4) :- R12(A1,A2), R23(A2,A3), R34(A3,A4)
//! query Q() :- ...            # Boolean form
//! ```
//!
//! Attribute names map bijectively to indices `0..n-1` in declaration
//! order; blank lines and `#` comments are ignored.

use pandaq_core::attrset::AttrSet;
use pandaq_core::rule::{DegreeConstraint, DisjunctiveRule, Hypergraph, RelId};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug)]
pub struct RelationDecl {
    pub name: String,
    /// Attribute indices in declared column order.
    pub attrs: Vec<usize>,
    pub size: Option<u64>,
    pub id: RelId,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum QueryKind {
    /// Disjunctive rule with explicit targets.
    Rule,
    /// Full conjunctive query (head = all variables).
    Full,
    /// Boolean conjunctive query (empty head).
    Boolean,
}

#[derive(Clone, Debug)]
pub struct QueryFile {
    /// Attribute names by index.
    pub attr_names: Vec<String>,
    pub relations: Vec<RelationDecl>,
    pub rule: DisjunctiveRule,
    pub kind: QueryKind,
}

impl QueryFile {
    pub fn relation_by_name(&self, name: &str) -> Option<&RelationDecl> {
        self.relations.iter().find(|r| r.name == name)
    }

    pub fn attr_set_names(&self, s: AttrSet) -> String {
        let names: Vec<&str> = s.iter().map(|v| self.attr_names[v].as_str()).collect();
        if names.is_empty() {
            "-".to_string()
        } else {
            names.join(",")
        }
    }
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

/// `NAME(A,B,...)` → (name, attr list); attrs may be empty.
fn parse_atom(text: &str, line: usize) -> Result<(String, Vec<String>), ParseError> {
    let open = match text.find('(') {
        Some(i) => i,
        None => return err(line, format!("expected NAME(...), got `{text}`")),
    };
    if !text.ends_with(')') {
        return err(line, format!("unclosed atom `{text}`"));
    }
    let name = text[..open].trim().to_string();
    if name.is_empty() {
        return err(line, "empty relation name");
    }
    let inner = &text[open + 1..text.len() - 1];
    let attrs: Vec<String> = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(|a| a.trim().to_string()).collect()
    };
    if attrs.iter().any(|a| a.is_empty()) {
        return err(line, format!("empty attribute name in `{text}`"));
    }
    Ok((name, attrs))
}

struct Names {
    by_name: BTreeMap<String, usize>,
    in_order: Vec<String>,
}

impl Names {
    fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.by_name.get(name) {
            return i;
        }
        let i = self.in_order.len();
        self.in_order.push(name.to_string());
        self.by_name.insert(name.to_string(), i);
        i
    }

    fn lookup(&self, name: &str, line: usize) -> Result<usize, ParseError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or(ParseError {
                line,
                message: format!("unknown attribute `{name}`"),
            })
    }
}

/// Parses a query file into a canonical rule.
pub fn parse_query_file(text: &str) -> Result<QueryFile, ParseError> {
    let mut names = Names {
        by_name: BTreeMap::new(),
        in_order: Vec::new(),
    };
    let mut relations: Vec<RelationDecl> = Vec::new();
    struct PendingConstraint {
        rel: String,
        y: Vec<String>,
        x: Vec<String>,
        bound: u64,
        line: usize,
    }
    struct PendingFd {
        rel: String,
        x: Vec<String>,
        y: Vec<String>,
        line: usize,
    }
    let mut pending_constraints: Vec<PendingConstraint> = Vec::new();
    let mut pending_fds: Vec<PendingFd> = Vec::new();
    let mut head: Option<(QueryKind, Vec<(String, Vec<String>)>, Vec<(String, Vec<String>)>, usize)> =
        None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (keyword, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => return err(line_no, format!("unrecognized line `{line}`")),
        };
        match keyword {
            "relation" => {
                let (decl, size) = match rest.split_once(" size ") {
                    Some((a, s)) => {
                        let size: u64 = s.trim().parse().map_err(|_| ParseError {
                            line: line_no,
                            message: format!("bad size `{s}`"),
                        })?;
                        if size == 0 {
                            return err(line_no, "size must be positive");
                        }
                        (a.trim(), Some(size))
                    }
                    None => (rest, None),
                };
                let (name, attrs) = parse_atom(decl, line_no)?;
                if relations.iter().any(|r| r.name == name) {
                    return err(line_no, format!("relation `{name}` declared twice"));
                }
                if attrs.is_empty() {
                    return err(line_no, "relations need at least one attribute");
                }
                let indices: Vec<usize> = attrs.iter().map(|a| names.intern(a)).collect();
                let mut dedup = indices.clone();
                dedup.sort_unstable();
                dedup.dedup();
                if dedup.len() != indices.len() {
                    return err(line_no, "repeated attribute in relation");
                }
                let id = RelId(relations.len());
                relations.push(RelationDecl {
                    name,
                    attrs: indices,
                    size,
                    id,
                });
            }
            "constraint" => {
                // constraint NAME deg(Y... | X...) <= N
                let (rel, spec) = match rest.split_once(char::is_whitespace) {
                    Some((r, s)) => (r.trim().to_string(), s.trim()),
                    None => return err(line_no, "expected `constraint NAME deg(...) <= N`"),
                };
                let spec = match spec.strip_prefix("deg(") {
                    Some(s) => s,
                    None => return err(line_no, "expected `deg(Y... | X...)`"),
                };
                let close = match spec.find(')') {
                    Some(i) => i,
                    None => return err(line_no, "unclosed deg(...)"),
                };
                let inside = &spec[..close];
                let tail = spec[close + 1..].trim();
                let bound_text = match tail.strip_prefix("<=") {
                    Some(b) => b.trim(),
                    None => return err(line_no, "expected `<= N` after deg(...)"),
                };
                let bound: u64 = bound_text.parse().map_err(|_| ParseError {
                    line: line_no,
                    message: format!("bad bound `{bound_text}`"),
                })?;
                if bound == 0 {
                    return err(line_no, "degree bound must be positive");
                }
                let (y_part, x_part) = match inside.split_once('|') {
                    Some((y, x)) => (y.trim(), x.trim()),
                    None => (inside.trim(), ""),
                };
                let split_names = |part: &str| -> Vec<String> {
                    part.split(',')
                        .map(|a| a.trim().to_string())
                        .filter(|a| !a.is_empty())
                        .collect()
                };
                let y = split_names(y_part);
                if y.is_empty() {
                    return err(line_no, "constraint needs a nonempty Y list");
                }
                pending_constraints.push(PendingConstraint {
                    rel,
                    y,
                    x: split_names(x_part),
                    bound,
                    line: line_no,
                });
            }
            "fd" => {
                // fd NAME: X... -> Y...
                let (rel, spec) = match rest.split_once(':') {
                    Some((r, s)) => (r.trim().to_string(), s.trim()),
                    None => return err(line_no, "expected `fd NAME: X... -> Y...`"),
                };
                let (x_part, y_part) = match spec.split_once("->") {
                    Some((x, y)) => (x.trim(), y.trim()),
                    None => return err(line_no, "expected `->` in fd"),
                };
                let split = |part: &str| -> Vec<String> {
                    part.split([',', ' '])
                        .map(|a| a.trim().to_string())
                        .filter(|a| !a.is_empty())
                        .collect()
                };
                let x = split(x_part);
                let y = split(y_part);
                if x.is_empty() || y.is_empty() {
                    return err(line_no, "fd needs nonempty sides");
                }
                pending_fds.push(PendingFd {
                    rel,
                    x,
                    y,
                    line: line_no,
                });
            }
            "rule" | "query" => {
                if head.is_some() {
                    return err(line_no, "multiple rule/query declarations");
                }
                let (head_part, body_part) = match rest.split_once(":-") {
                    Some((h, b)) => (h.trim(), b.trim()),
                    None => return err(line_no, "expected `:-`"),
                };
                let mut heads = Vec::new();
                for atom_text in head_part.split('|') {
                    heads.push(parse_atom(atom_text.trim(), line_no)?);
                }
                let mut body = Vec::new();
                for atom_text in split_atoms(body_part) {
                    body.push(parse_atom(atom_text.trim(), line_no)?);
                }
                if body.is_empty() {
                    return err(line_no, "empty body");
                }
                let kind = if keyword == "rule" {
                    QueryKind::Rule
                } else if heads.len() == 1 && heads[0].1.is_empty() {
                    QueryKind::Boolean
                } else {
                    QueryKind::Full
                };
                if keyword == "query" && heads.len() != 1 {
                    return err(line_no, "a query has exactly one head");
                }
                head = Some((kind, heads, body, line_no));
            }
            _ => return err(line_no, format!("unrecognized keyword `{keyword}`")),
        }
    }

    let Some((kind, heads, body, head_line)) = head else {
        return err(text.lines().count(), "missing rule/query declaration");
    };
    let n = names.in_order.len();
    if n == 0 || n > 30 {
        return err(head_line, format!("{n} attributes out of range 1..=30"));
    }

    // Body atoms must reference declared relations with matching arity.
    let mut supports = Vec::new();
    let mut body_ids = Vec::new();
    for (name, attrs) in &body {
        let decl = relations
            .iter()
            .find(|r| r.name == *name)
            .ok_or(ParseError {
                line: head_line,
                message: format!("undeclared relation `{name}` in body"),
            })?;
        if attrs.len() != decl.attrs.len() {
            return err(head_line, format!("arity mismatch for `{name}` in body"));
        }
        // Body atoms must repeat the declared attributes (set-wise).
        let mut vars = Vec::new();
        for a in attrs {
            vars.push(names.lookup(a, head_line)?);
        }
        let support = AttrSet::from_iter(vars.iter().copied());
        let declared = AttrSet::from_iter(decl.attrs.iter().copied());
        if support != declared {
            return err(
                head_line,
                format!("body atom `{name}` does not match its declaration"),
            );
        }
        supports.push(support);
        body_ids.push(decl.id);
    }
    // The hypergraph reuses declaration ids so data files map directly.
    let edges: Vec<(AttrSet, RelId)> = supports.into_iter().zip(body_ids).collect();
    let hypergraph = Hypergraph { n, edges };

    let full = AttrSet::full(n);
    let targets: Vec<AttrSet> = match kind {
        QueryKind::Boolean => vec![full],
        QueryKind::Full => {
            let vars: Result<Vec<usize>, _> = heads[0]
                .1
                .iter()
                .map(|a| names.lookup(a, head_line))
                .collect();
            let set = AttrSet::from_iter(vars?);
            if set != full {
                return err(
                    head_line,
                    "query heads must list all variables (or none for Boolean)",
                );
            }
            vec![full]
        }
        QueryKind::Rule => {
            let mut ts = Vec::new();
            for (_, attrs) in &heads {
                if attrs.is_empty() {
                    return err(head_line, "rule targets need at least one variable");
                }
                let vars: Result<Vec<usize>, _> =
                    attrs.iter().map(|a| names.lookup(a, head_line)).collect();
                ts.push(AttrSet::from_iter(vars?));
            }
            ts
        }
    };

    let mut constraints = Vec::new();
    for decl in &relations {
        if let Some(size) = decl.size {
            let support = AttrSet::from_iter(decl.attrs.iter().copied());
            constraints.push(
                DegreeConstraint::cardinality(support, size, Some(decl.id)).map_err(|e| {
                    ParseError {
                        line: head_line,
                        message: e.to_string(),
                    }
                })?,
            );
        }
    }
    for c in pending_constraints {
        let decl = relations
            .iter()
            .find(|r| r.name == c.rel)
            .ok_or(ParseError {
                line: c.line,
                message: format!("unknown relation `{}` in constraint", c.rel),
            })?;
        let y_vars: Result<Vec<usize>, _> = c.y.iter().map(|a| names.lookup(a, c.line)).collect();
        let x_vars: Result<Vec<usize>, _> = c.x.iter().map(|a| names.lookup(a, c.line)).collect();
        let x = AttrSet::from_iter(x_vars?);
        let y = AttrSet::from_iter(y_vars?).union(x);
        let schema = AttrSet::from_iter(decl.attrs.iter().copied());
        if !y.is_subset(schema) {
            return err(c.line, "constraint attributes outside the guard relation");
        }
        if !x.is_strict_subset(y) {
            return err(c.line, "constraint needs X strictly inside Y");
        }
        constraints.push(
            DegreeConstraint::from_count(x, y, c.bound, Some(decl.id)).map_err(|e| ParseError {
                line: c.line,
                message: e.to_string(),
            })?,
        );
    }
    for f in pending_fds {
        let decl = relations
            .iter()
            .find(|r| r.name == f.rel)
            .ok_or(ParseError {
                line: f.line,
                message: format!("unknown relation `{}` in fd", f.rel),
            })?;
        let x_vars: Result<Vec<usize>, _> = f.x.iter().map(|a| names.lookup(a, f.line)).collect();
        let y_vars: Result<Vec<usize>, _> = f.y.iter().map(|a| names.lookup(a, f.line)).collect();
        let x = AttrSet::from_iter(x_vars?);
        let y = AttrSet::from_iter(y_vars?);
        let schema = AttrSet::from_iter(decl.attrs.iter().copied());
        if !x.union(y).is_subset(schema) {
            return err(f.line, "fd attributes outside the guard relation");
        }
        constraints.push(
            DegreeConstraint::functional_dependency(x, y, Some(decl.id)).map_err(|e| {
                ParseError {
                    line: f.line,
                    message: e.to_string(),
                }
            })?,
        );
    }

    let rule = DisjunctiveRule {
        hypergraph,
        targets,
        constraints,
    };
    let diags = pandaq_core::rule::validate_rule(&rule);
    if let Some(d) = diags.first() {
        return err(head_line, d.0.clone());
    }
    Ok(QueryFile {
        attr_names: names.in_order,
        relations,
        rule,
        kind,
    })
}

/// Splits a body on commas at depth zero (commas inside parentheses
/// separate attributes, not atoms).
fn split_atoms(body: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in body.chars() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
            }
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut current));
            }
            _ => current.push(ch),
        }
    }
    if !current.trim().is_empty() {
        out.push(current);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_cycle_file() {
        let text = "\
relation R12(A1,A2) size 16
relation R23(A2,A3) size 16
relation R34(A3,A4) size 16
relation R41(A4,A1) size 16
query Q(A1,A2,A3,A4) :- R12(A1,A2), R23(A2,A3), R34(A3,A4), R41(A4,A1)
";
        let qf = parse_query_file(text).unwrap();
        assert_eq!(qf.kind, QueryKind::Full);
        assert_eq!(qf.rule.hypergraph.edges.len(), 4);
        assert_eq!(qf.rule.targets, vec![AttrSet::full(4)]);
        assert_eq!(qf.rule.constraints.len(), 4);
    }

    #[test]
    fn disjunctive_rule_file() {
        let text = "\
relation R12(A1,A2) size 8
relation R23(A2,A3) size 8
relation R34(A3,A4) size 8
rule T1(A1,A2,A3) | T2(A2,A3,A4) :- R12(A1,A2), R23(A2,A3), R34(A3,A4)
";
        let qf = parse_query_file(text).unwrap();
        assert_eq!(qf.kind, QueryKind::Rule);
        assert_eq!(qf.rule.targets.len(), 2);
        assert_eq!(qf.rule.targets[0], AttrSet::from_iter([0, 1, 2]));
        assert_eq!(qf.rule.targets[1], AttrSet::from_iter([1, 2, 3]));
    }

    #[test]
    fn constraints_and_fds() {
        let text = "\
relation R(A,B) size 16
relation S(B,C) size 16
constraint R deg(A,B | A) <= 4
fd S: B -> C
query Q(A,B,C) :- R(A,B), S(B,C)
";
        let qf = parse_query_file(text).unwrap();
        assert_eq!(qf.rule.constraints.len(), 4);
        let deg = &qf.rule.constraints[2];
        assert_eq!(deg.x, AttrSet::singleton(0));
        assert_eq!(deg.y, AttrSet::from_iter([0, 1]));
        assert_eq!(deg.raw_bound, Some(4));
        let fd = &qf.rule.constraints[3];
        assert_eq!(*fd.log_bound.bits(), pandaq_core::rational::rat_int(0));
    }

    #[test]
    fn boolean_query() {
        let text = "\
relation R(A,B) size 4
relation S(B,A) size 4
query Q() :- R(A,B), S(B,A)
";
        let qf = parse_query_file(text).unwrap();
        assert_eq!(qf.kind, QueryKind::Boolean);
    }

    #[test]
    fn malformed_fd_reports_line() {
        let text = "\
relation R(A,B) size 4
fd R: -> A
query Q(A,B) :- R(A,B)
";
        let e = parse_query_file(text).unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn unknown_names_are_errors() {
        let text = "\
relation R(A,B) size 4
constraint Zed deg(A | ) <= 2
query Q(A,B) :- R(A,B)
";
        let e = parse_query_file(text).unwrap_err();
        assert!(e.message.contains("unknown relation"));
    }
}
