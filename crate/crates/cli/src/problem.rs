//! Problem files.
//!
//! The text form is a sectioned key-value grammar:
//!
//! ```text
//! # zero angular momentum in two dimensions
//! [variables]
//! pair q1 p1
//! pair q2 p2
//!
//! [constraints]
//! q1*p2 - q2*p1
//!
//! [window]
//! D = 2
//! S = 4
//! G = 2
//! N = 8
//!
//! [tasks]
//! first_class, brst, cohomology, invariants
//! ```
//!
//! `pair q p` declares a canonical pair with `{q, p} = 1`, `odd a b` an odd
//! pair with `{a, b} = 1`, `odd c c` an odd variable with `{c, c} = 1` and
//! `odd c` an odd variable without a partner. Every section is optional.
//! The JSON form mirrors [`ProblemSpec`] field by field.

use std::fmt;
use std::sync::Arc;

use brstkit_core::{parse_polynomial, Error as CoreError, Rational, SuperPolynomial, VariableTable};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Q,
    P,
    Odd,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<String>,
}

/// Weights `0..=D`, resolution degrees down to `-S`, ghost degree at most
/// `G` in cohomology, at most `N` perturbation steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    #[serde(rename = "D")]
    pub max_weight: i32,
    #[serde(rename = "S")]
    pub depth: i32,
    #[serde(rename = "G")]
    pub ghost_cap: i32,
    #[serde(rename = "N")]
    pub max_order: usize,
}

impl Default for Window {
    fn default() -> Self {
        Window { max_weight: 2, depth: 4, ghost_cap: 2, max_order: 8 }
    }
}

impl std::str::FromStr for Window {
    type Err = String;

    /// `D,S,G,N`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [d, s, g, n] = parts[..] else {
            return Err(format!("expected D,S,G,N, got `{s}`"));
        };
        let int = |x: &str| x.parse::<i32>().map_err(|_| format!("`{x}` is not an integer"));
        let n = n.parse::<usize>().map_err(|_| format!("`{n}` is not a non-negative integer"))?;
        Ok(Window { max_weight: int(d)?, depth: int(s)?, ghost_cap: int(g)?, max_order: n })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    FirstClass,
    Resolution,
    Brst,
    Cohomology,
    Invariants,
    Rinehart,
    RedundancyCheck,
}

impl Task {
    pub const ALL: [Task; 7] = [
        Task::FirstClass,
        Task::Resolution,
        Task::Brst,
        Task::Cohomology,
        Task::Invariants,
        Task::Rinehart,
        Task::RedundancyCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::FirstClass => "first_class",
            Task::Resolution => "resolution",
            Task::Brst => "brst",
            Task::Cohomology => "cohomology",
            Task::Invariants => "invariants",
            Task::Rinehart => "rinehart",
            Task::RedundancyCheck => "redundancy_check",
        }
    }
}

impl std::str::FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s.trim())
            .ok_or_else(|| format!("unknown task `{s}`"))
    }
}

/// Parses a comma- or whitespace-separated task list.
pub fn parse_tasks(s: &str) -> Result<Vec<Task>, String> {
    let mut tasks: Vec<Task> = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect::<Result<_, _>>()?;
    tasks.sort();
    tasks.dedup();
    Ok(tasks)
}

fn all_tasks() -> Vec<Task> {
    Task::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub variables: Vec<VariableSpec>,
    #[serde(default)]
    pub constraints: Vec<String>,
    #[serde(default)]
    pub window: Window,
    #[serde(default = "all_tasks")]
    pub tasks: Vec<Task>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProblemError {
    pub at: Option<Location>,
    pub message: String,
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.at {
            Some(Location { line, column }) => write!(f, "line {line}, column {column}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Every problem found in one pass, in source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemErrors(pub Vec<ProblemError>);

impl fmt::Display for ProblemErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ProblemErrors {}

/// Where things came from in a text problem file.
#[derive(Debug, Clone, Default)]
pub struct SourceMap {
    variables: Vec<Location>,
    constraints: Vec<Location>,
}

fn at(line: usize, column: usize) -> Option<Location> {
    Some(Location { line, column })
}

fn err(loc: Option<Location>, message: impl Into<String>) -> ProblemError {
    ProblemError { at: loc, message: message.into() }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Variables,
    Constraints,
    Window,
    Tasks,
}

/// Column (1-based, in characters) of the first non-blank character.
fn indent(line: &str) -> usize {
    line.chars().take_while(|c| c.is_whitespace()).count() + 1
}

/// Splits a line into words with their columns.
fn words(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (k, (byte, c)) in line.char_indices().enumerate() {
        match (start, c.is_whitespace()) {
            (None, false) => start = Some((k + 1, byte)),
            (Some((col, b)), true) => {
                out.push((col, &line[b..byte]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((col, b)) = start {
        out.push((col, &line[b..]));
    }
    out
}

/// Parses the text grammar.
pub fn parse_text(text: &str) -> Result<(ProblemSpec, SourceMap), ProblemErrors> {
    let mut spec = ProblemSpec {
        variables: Vec::new(),
        constraints: Vec::new(),
        window: Window::default(),
        tasks: Vec::new(),
    };
    let mut map = SourceMap::default();
    let mut errors = Vec::new();
    let mut section = Section::None;
    let mut saw_tasks = false;
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let col = indent(line);
        let body = line.trim();
        if body.starts_with('[') {
            section = match body {
                "[variables]" => Section::Variables,
                "[constraints]" => Section::Constraints,
                "[window]" => Section::Window,
                "[tasks]" => {
                    saw_tasks = true;
                    Section::Tasks
                }
                _ => {
                    errors.push(err(at(line_no, col), format!("unknown section `{body}`")));
                    Section::None
                }
            };
            continue;
        }
        match section {
            Section::None => errors.push(err(at(line_no, col), "content outside any section")),
            Section::Variables => {
                let w = words(line);
                let decl = |kind, name: &str, partner: Option<&str>| VariableSpec {
                    name: name.to_string(),
                    kind,
                    partner: partner.map(str::to_string),
                };
                match w[..] {
                    [(_, "pair"), (cq, q), (cp, p)] => {
                        spec.variables.push(decl(Kind::Q, q, Some(p)));
                        spec.variables.push(decl(Kind::P, p, Some(q)));
                        map.variables.extend([Location { line: line_no, column: cq }, Location { line: line_no, column: cp }]);
                    }
                    [(_, "odd"), (ca, a), (_, b)] if a == b => {
                        spec.variables.push(decl(Kind::Odd, a, Some(a)));
                        map.variables.push(Location { line: line_no, column: ca });
                    }
                    [(_, "odd"), (ca, a), (cb, b)] => {
                        spec.variables.push(decl(Kind::Odd, a, Some(b)));
                        spec.variables.push(decl(Kind::Odd, b, Some(a)));
                        map.variables.extend([Location { line: line_no, column: ca }, Location { line: line_no, column: cb }]);
                    }
                    [(_, "odd"), (ca, a)] => {
                        spec.variables.push(decl(Kind::Odd, a, None));
                        map.variables.push(Location { line: line_no, column: ca });
                    }
                    _ => errors.push(err(
                        at(line_no, col),
                        "expected `pair <q> <p>`, `odd <a> <b>` or `odd <a>`",
                    )),
                }
            }
            Section::Constraints => {
                spec.constraints.push(body.to_string());
                map.constraints.push(Location { line: line_no, column: col });
            }
            Section::Window => {
                let Some((key, value)) = body.split_once('=') else {
                    errors.push(err(at(line_no, col), "expected `<key> = <value>`"));
                    continue;
                };
                let value_col = col + body[..body.find('=').unwrap() + 1].chars().count()
                    + (value.chars().count() - value.trim_start().chars().count());
                let (key, value) = (key.trim(), value.trim());
                let parsed = value.parse::<i64>().ok().filter(|v| *v >= 0 && *v <= i32::MAX as i64);
                let Some(v) = parsed else {
                    errors.push(err(at(line_no, value_col), format!("`{value}` is not a non-negative integer")));
                    continue;
                };
                match key {
                    "D" => spec.window.max_weight = v as i32,
                    "S" => spec.window.depth = v as i32,
                    "G" => spec.window.ghost_cap = v as i32,
                    "N" => spec.window.max_order = v as usize,
                    _ => errors.push(err(at(line_no, col), format!("unknown window key `{key}`, expected D, S, G or N"))),
                }
            }
            Section::Tasks => match parse_tasks(body) {
                Ok(t) => spec.tasks.extend(t),
                Err(e) => {
                    let bad = e.split('`').nth(1).unwrap_or("");
                    let c = words(line).iter().find(|(_, w)| w.trim_matches(',').split(',').any(|x| x == bad)).map_or(col, |w| w.0);
                    errors.push(err(at(line_no, c), e));
                }
            },
        }
    }
    if !saw_tasks {
        spec.tasks = all_tasks();
    }
    spec.tasks.sort();
    spec.tasks.dedup();
    if errors.is_empty() {
        Ok((spec, map))
    } else {
        Err(ProblemErrors(errors))
    }
}

/// Parses the JSON form.
pub fn parse_json(text: &str) -> Result<ProblemSpec, ProblemErrors> {
    serde_json::from_str::<ProblemSpec>(text).map(|mut s| {
        s.tasks.sort();
        s.tasks.dedup();
        s
    }).map_err(|e| {
        ProblemErrors(vec![err(at(e.line(), e.column()), e.to_string().split(" at line").next().unwrap_or("").to_string())])
    })
}

/// Text or JSON, decided by the first non-blank character.
pub fn parse_problem(text: &str) -> Result<(ProblemSpec, SourceMap), ProblemErrors> {
    if text.trim_start().starts_with('{') {
        Ok((parse_json(text)?, SourceMap::default()))
    } else {
        parse_text(text)
    }
}

/// Renders a spec in the text grammar.
pub fn render_text(spec: &ProblemSpec) -> String {
    let mut out = String::from("[variables]\n");
    let mut done = std::collections::HashSet::new();
    for v in &spec.variables {
        if !done.insert(v.name.as_str()) {
            continue;
        }
        match (v.kind, &v.partner) {
            (Kind::Q, Some(p)) | (Kind::Odd, Some(p)) if p != &v.name => {
                let head = if v.kind == Kind::Q { "pair" } else { "odd" };
                out.push_str(&format!("{head} {} {p}\n", v.name));
                done.insert(p.as_str());
            }
            (Kind::P, Some(q)) => {
                out.push_str(&format!("pair {q} {}\n", v.name));
                done.insert(q.as_str());
            }
            (Kind::Odd, Some(_)) => out.push_str(&format!("odd {0} {0}\n", v.name)),
            _ => out.push_str(&format!("odd {}\n", v.name)),
        }
    }
    out.push_str("\n[constraints]\n");
    for c in &spec.constraints {
        out.push_str(c);
        out.push('\n');
    }
    let w = spec.window;
    out.push_str(&format!(
        "\n[window]\nD = {}\nS = {}\nG = {}\nN = {}\n\n[tasks]\n",
        w.max_weight, w.depth, w.ghost_cap, w.max_order
    ));
    let names: Vec<&str> = spec.tasks.iter().map(|t| t.name()).collect();
    out.push_str(&names.join(", "));
    out.push('\n');
    out
}

/// A validated problem: the variable table and parsed constraints.
#[derive(Debug, Clone)]
pub struct Problem {
    pub spec: ProblemSpec,
    pub table: Arc<VariableTable>,
    pub constraints: Vec<SuperPolynomial>,
}

fn valid_name(s: &str) -> bool {
    let mut c = s.chars();
    matches!(c.next(), Some(f) if f.is_ascii_alphabetic() || f == '_')
        && c.all(|x| x.is_ascii_alphanumeric() || x == '_')
}

/// Names the resolution uses for its own generators and ghosts.
fn reserved(s: &str) -> bool {
    ["P", "eta"].iter().any(|p| {
        s.strip_prefix(p).is_some_and(|rest| rest.starts_with(|c: char| c.is_ascii_digit()))
    })
}

/// Checks declarations, builds the variable table and parses constraints.
pub fn validate(spec: ProblemSpec, map: &SourceMap) -> Result<Problem, ProblemErrors> {
    let mut errors = Vec::new();
    let var_at = |k: usize| map.variables.get(k).copied();
    let mut table = VariableTable::new();
    for (k, v) in spec.variables.iter().enumerate() {
        if !valid_name(&v.name) {
            errors.push(err(var_at(k), format!("`{}` is not a valid variable name", v.name)));
        } else if reserved(&v.name) {
            errors.push(err(var_at(k), format!("`{}` is reserved for resolution generators and ghosts", v.name)));
        } else if let Err(e) = table.add_base(&v.name, v.kind == Kind::Odd) {
            errors.push(err(var_at(k), e.to_string()));
        }
    }
    if errors.is_empty() {
        let find = |name: &str| spec.variables.iter().position(|v| v.name == name);
        for (k, v) in spec.variables.iter().enumerate() {
            let partner = v.partner.as_deref().map(|p| (p, find(p)));
            let expected = match v.kind {
                Kind::Q => Some(Kind::P),
                Kind::P => Some(Kind::Q),
                Kind::Odd => None,
            };
            match (partner, expected) {
                (None, Some(_)) => errors.push(err(var_at(k), format!("`{}` has no conjugate partner", v.name))),
                (None, None) => {}
                (Some((p, None)), _) => errors.push(err(var_at(k), format!("partner `{p}` of `{}` is not declared", v.name))),
                (Some((p, Some(j))), _) => {
                    let w = &spec.variables[j];
                    let kind_ok = expected.map_or(w.kind == Kind::Odd, |e| w.kind == e);
                    if !kind_ok {
                        errors.push(err(var_at(k), format!("`{}` cannot be conjugate to `{p}`", v.name)));
                    } else if w.partner.as_deref() != Some(v.name.as_str()) {
                        errors.push(err(var_at(k), format!("`{p}` does not name `{}` as its partner", v.name)));
                    } else if v.kind != Kind::P && k <= j {
                        table.set_pairing(k as u32, j as u32, Rational::from_integer(1.into())).map_err(|e| {
                            errors.push(err(var_at(k), e.to_string()));
                        }).ok();
                    }
                }
            }
        }
    }
    let w = spec.window;
    if w.depth < 1 {
        errors.push(err(None, "window S must be at least 1"));
    }
    if w.ghost_cap < 1 {
        errors.push(err(None, "window G must be at least 1"));
    }
    let table = Arc::new(table);
    let mut constraints = Vec::new();
    for (k, c) in spec.constraints.iter().enumerate() {
        let base = map.constraints.get(k).copied();
        let shift = |column: usize| base.map(|b| Location { line: b.line, column: b.column + column - 1 });
        match parse_polynomial(&table, c) {
            Ok(f) => {
                let weights: std::collections::BTreeSet<i32> = f.gradings().map(|g| g.weight).collect();
                if f.parity() == Some(true) {
                    errors.push(err(base, format!("constraint `{c}` is odd")));
                } else if weights.len() > 1 {
                    errors.push(err(base, format!("constraint `{c}` is not homogeneous")));
                } else {
                    constraints.push(f);
                }
            }
            Err(CoreError::UnknownVariable { name, column }) => {
                errors.push(err(shift(column), format!("undeclared variable `{name}`")))
            }
            Err(CoreError::Parse { column, message }) => errors.push(err(shift(column), message)),
            Err(e) => errors.push(err(base, e.to_string())),
        }
    }
    if errors.is_empty() {
        Ok(Problem { spec, table, constraints })
    } else {
        Err(ProblemErrors(errors))
    }
}

/// [`parse_problem`] followed by [`validate`].
pub fn load(text: &str) -> Result<Problem, ProblemErrors> {
    let (spec, map) = parse_problem(text)?;
    validate(spec, &map)
}
