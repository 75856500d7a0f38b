//! JSON file schema for groupoids, functors, spans and bisets.
//!
//! A file is a [`Document`] with named sections. Groupoids are given
//! explicitly,
//!
//! ```json
//! {"objects": ["x"], "morphisms": [{"id": "e", "src": "x", "tgt": "x", "inv": "e"}],
//!  "compose": [["e", "e", "e"]], "identities": ["e"]}
//! ```
//!
//! or as a group (`{"group": {"table": [[...]]}}`, `{"group": {"perms":
//! [...]}}`, `{"group": {"name": "S3"}}`), or by a pool name such as `"BC2+1"`.
//! Ids may be strings or numbers. Functors list the image of every source
//! object and morphism in the order of the source's lists; bisets list
//! elements by position and give both actions as triples. Everything else
//! refers to groupoids by name.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::biset::{Biset, BisetRef};
use crate::error::{Error, Result};
use crate::functor::{shared, Functor};
use crate::group::{named_group, FiniteGroup};
use crate::groupoid::{Groupoid, GroupoidRef};
use crate::pool::parse_groupoid;
use crate::span::Span;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub groupoids: BTreeMap<String, GroupoidDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functors: BTreeMap<String, FunctorDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub spans: BTreeMap<String, SpanDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bisets: BTreeMap<String, BisetDoc>,
    /// Free-form results attached by commands; ignored when loading.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub results: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupoidDoc {
    Name(String),
    Group { group: GroupDoc },
    Explicit(ExplicitGroupoid),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupDoc {
    Table { table: Vec<Vec<usize>> },
    Perms { perms: Vec<Vec<usize>> },
    Named { name: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitGroupoid {
    pub objects: Vec<Value>,
    pub morphisms: Vec<MorphismDoc>,
    /// Triples `[g, f, g∘f]` for every composable pair.
    pub compose: Vec<[Value; 3]>,
    pub identities: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub id: Value,
    pub src: Value,
    pub tgt: Value,
    pub inv: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorDoc {
    pub source: String,
    pub target: String,
    /// Target object ids, one per source object.
    pub objects: Vec<Value>,
    /// Target morphism ids, one per source morphism.
    pub morphisms: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctorRef {
    Name(String),
    Inline(FunctorDoc),
}

/// `source ←left apex →right target`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanDoc {
    pub left: FunctorRef,
    pub right: FunctorRef,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BisetDoc {
    pub source: String,
    pub target: String,
    /// Element endpoints: `src` in the source, `tgt` in the target.
    pub elements: Vec<ElementDoc>,
    /// `[α, x, α·x]` for every target morphism `α` out of `tgt(x)`.
    pub left: Vec<(Value, usize, usize)>,
    /// `[x, β, x·β]` for every source morphism `β` into `src(x)`.
    pub right: Vec<(usize, Value, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementDoc {
    pub src: Value,
    pub tgt: Value,
}

fn key(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Id tables of a groupoid as it appears in a file.
#[derive(Clone, Debug)]
struct Labels {
    objects: HashMap<String, usize>,
    morphisms: HashMap<String, usize>,
}

impl Labels {
    fn numeric(g: &Groupoid) -> Self {
        Labels {
            objects: (0..g.num_objects()).map(|x| (x.to_string(), x)).collect(),
            morphisms: (0..g.num_morphisms()).map(|f| (f.to_string(), f)).collect(),
        }
    }

    fn object(&self, v: &Value, ctx: &str) -> Result<usize> {
        self.objects
            .get(&key(v))
            .copied()
            .ok_or_else(|| Error::UnknownName(format!("object {} in {ctx}", key(v))))
    }

    fn morphism(&self, v: &Value, ctx: &str) -> Result<usize> {
        self.morphisms
            .get(&key(v))
            .copied()
            .ok_or_else(|| Error::UnknownName(format!("morphism {} in {ctx}", key(v))))
    }
}

fn unique(values: impl Iterator<Item = String>, what: &str, ctx: &str) -> Result<HashMap<String, usize>> {
    let mut out = HashMap::new();
    for (i, v) in values.enumerate() {
        if out.insert(v.clone(), i).is_some() {
            return Err(Error::InvalidGroupoid(format!("duplicate {what} id {v} in {ctx}")));
        }
    }
    Ok(out)
}

fn build_group(g: &GroupDoc) -> Result<FiniteGroup> {
    match g {
        GroupDoc::Table { table } => FiniteGroup::from_table(table),
        GroupDoc::Perms { perms } => FiniteGroup::from_permutations(perms),
        GroupDoc::Named { name } => named_group(name).ok_or_else(|| Error::UnknownName(format!("group {name}"))),
    }
}

fn build_explicit(e: &ExplicitGroupoid, ctx: &str) -> Result<(Groupoid, Labels)> {
    let objects = unique(e.objects.iter().map(key), "object", ctx)?;
    let morphisms = unique(e.morphisms.iter().map(|m| key(&m.id)), "morphism", ctx)?;
    let labels = Labels { objects, morphisms };
    let mut src = Vec::with_capacity(e.morphisms.len());
    let mut tgt = Vec::with_capacity(e.morphisms.len());
    let mut inv = Vec::with_capacity(e.morphisms.len());
    for m in &e.morphisms {
        src.push(labels.object(&m.src, ctx)?);
        tgt.push(labels.object(&m.tgt, ctx)?);
        inv.push(labels.morphism(&m.inv, ctx)?);
    }
    if e.identities.len() != e.objects.len() {
        return Err(Error::InvalidGroupoid(format!("{ctx}: need one identity per object")));
    }
    let identity = e.identities.iter().map(|v| labels.morphism(v, ctx)).collect::<Result<Vec<_>>>()?;
    let mut table = HashMap::new();
    for [g, f, gf] in &e.compose {
        let (g, f, gf) = (labels.morphism(g, ctx)?, labels.morphism(f, ctx)?, labels.morphism(gf, ctx)?);
        if table.insert((g, f), gf).is_some_and(|old| old != gf) {
            return Err(Error::InvalidGroupoid(format!("{ctx}: two composites given for one pair")));
        }
    }
    for f in 0..src.len() {
        for g in 0..src.len() {
            if src[g] == tgt[f] && !table.contains_key(&(g, f)) {
                return Err(Error::InvalidGroupoid(format!(
                    "{ctx}: composite of {} after {} is missing",
                    key(&e.morphisms[g].id),
                    key(&e.morphisms[f].id)
                )));
            }
        }
    }
    let g = Groupoid::new(e.objects.len(), src, tgt, identity, inv, |g, f| table.get(&(g, f)).copied().unwrap_or(usize::MAX))?;
    g.check_laws()?;
    Ok((g, labels))
}

/// Validated objects loaded from one or more documents.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub groupoids: BTreeMap<String, GroupoidRef>,
    pub functors: BTreeMap<String, Functor>,
    pub spans: BTreeMap<String, Span>,
    pub bisets: BTreeMap<String, BisetRef>,
    labels: BTreeMap<String, Labels>,
}

impl Workspace {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Document = serde_json::from_str(text)?;
        Workspace::from_document(&doc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Workspace::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn from_document(doc: &Document) -> Result<Self> {
        let mut ws = Workspace::default();
        for (name, g) in &doc.groupoids {
            let ctx = format!("groupoid {name}");
            let (g, labels) = match g {
                GroupoidDoc::Name(n) => {
                    let g = parse_groupoid(n, &ws.groupoids)?;
                    let labels = ws.labels.get(n).cloned().unwrap_or_else(|| Labels::numeric(&g));
                    (g, labels)
                }
                GroupoidDoc::Group { group } => {
                    let g = Groupoid::from_group(&build_group(group)?);
                    let labels = Labels::numeric(&g);
                    (shared(g), labels)
                }
                GroupoidDoc::Explicit(e) => {
                    let (g, labels) = build_explicit(e, &ctx)?;
                    (shared(g), labels)
                }
            };
            ws.groupoids.insert(name.clone(), g);
            ws.labels.insert(name.clone(), labels);
        }
        for (name, f) in &doc.functors {
            let f = ws.build_functor(f, &format!("functor {name}"))?;
            ws.functors.insert(name.clone(), f);
        }
        for (name, s) in &doc.spans {
            let ctx = format!("span {name}");
            let left = ws.resolve_functor(&s.left, &ctx)?;
            let right = ws.resolve_functor(&s.right, &ctx)?;
            ws.spans.insert(name.clone(), Span::new(left, right)?);
        }
        for (name, b) in &doc.bisets {
            let u = ws.build_biset(b, &format!("biset {name}"))?;
            ws.bisets.insert(name.clone(), Arc::new(u));
        }
        Ok(ws)
    }

    /// A named groupoid, falling back to the pool name grammar.
    pub fn groupoid(&self, name: &str) -> Result<GroupoidRef> {
        parse_groupoid(name, &self.groupoids)
    }

    fn labels_of(&self, name: &str, g: &Groupoid) -> Labels {
        self.labels.get(name).cloned().unwrap_or_else(|| Labels::numeric(g))
    }

    fn build_functor(&self, f: &FunctorDoc, ctx: &str) -> Result<Functor> {
        let (s, t) = (self.groupoid(&f.source)?, self.groupoid(&f.target)?);
        let tl = self.labels_of(&f.target, &t);
        if f.objects.len() != s.num_objects() || f.morphisms.len() != s.num_morphisms() {
            return Err(Error::InvalidFunctor(format!("{ctx}: one image per source object and morphism is required")));
        }
        let obj = f.objects.iter().map(|v| tl.object(v, ctx)).collect::<Result<Vec<_>>>()?;
        let mor = f.morphisms.iter().map(|v| tl.morphism(v, ctx)).collect::<Result<Vec<_>>>()?;
        let functor = Functor::new(s, t, obj, mor)?;
        functor.check()?;
        Ok(functor)
    }

    fn resolve_functor(&self, r: &FunctorRef, ctx: &str) -> Result<Functor> {
        match r {
            FunctorRef::Name(n) => self
                .functors
                .get(n)
                .cloned()
                .ok_or_else(|| Error::UnknownName(format!("functor {n} in {ctx}"))),
            FunctorRef::Inline(f) => self.build_functor(f, ctx),
        }
    }

    fn build_biset(&self, b: &BisetDoc, ctx: &str) -> Result<Biset> {
        let (h, g) = (self.groupoid(&b.source)?, self.groupoid(&b.target)?);
        let (hl, gl) = (self.labels_of(&b.source, &h), self.labels_of(&b.target, &g));
        let src = b.elements.iter().map(|e| hl.object(&e.src, ctx)).collect::<Result<Vec<_>>>()?;
        let tgt = b.elements.iter().map(|e| gl.object(&e.tgt, ctx)).collect::<Result<Vec<_>>>()?;
        let mut left = HashMap::new();
        for (a, x, y) in &b.left {
            left.insert((gl.morphism(a, ctx)?, *x), *y);
        }
        let mut right = HashMap::new();
        for (x, beta, y) in &b.right {
            right.insert((*x, hl.morphism(beta, ctx)?), *y);
        }
        for x in 0..src.len() {
            let missing_left = g.out(tgt[x]).iter().any(|&a| !left.contains_key(&(a, x)));
            let missing_right = h.incoming(src[x]).iter().any(|&beta| !right.contains_key(&(x, beta)));
            if missing_left || missing_right {
                return Err(Error::InvalidBiset(format!("{ctx}: action on element {x} is incomplete")));
            }
        }
        let u = Biset::from_actions(
            h,
            g,
            src,
            tgt,
            |a, x| left.get(&(a, x)).copied().unwrap_or(usize::MAX),
            |x, beta| right.get(&(x, beta)).copied().unwrap_or(usize::MAX),
        )?;
        u.check_laws()?;
        Ok(u)
    }

    /// The single span of the workspace.
    pub fn only_span(&self) -> Result<(&str, &Span)> {
        match self.spans.iter().next() {
            Some((n, s)) if self.spans.len() == 1 => Ok((n, s)),
            _ => Err(Error::Config(format!("expected exactly one span, found {}", self.spans.len()))),
        }
    }

    /// The single biset of the workspace.
    pub fn only_biset(&self) -> Result<(&str, &BisetRef)> {
        match self.bisets.iter().next() {
            Some((n, u)) if self.bisets.len() == 1 => Ok((n, u)),
            _ => Err(Error::Config(format!("expected exactly one biset, found {}", self.bisets.len()))),
        }
    }
}

/// Builds a self-contained document, naming every groupoid it meets.
#[derive(Debug, Default)]
pub struct Writer {
    doc: Document,
    seen: Vec<(GroupoidRef, String)>,
}

impl Writer {
    pub fn new() -> Self {
        Writer::default()
    }

    /// Name under which `g` is written, adding it on first use.
    pub fn groupoid(&mut self, g: &GroupoidRef, hint: &str) -> String {
        if let Some((_, n)) = self.seen.iter().find(|(h, _)| Arc::ptr_eq(h, g) || **h == **g) {
            return n.clone();
        }
        let mut name = hint.to_string();
        let mut k = 1;
        while self.doc.groupoids.contains_key(&name) {
            k += 1;
            name = format!("{hint}{k}");
        }
        self.doc.groupoids.insert(name.clone(), GroupoidDoc::Explicit(explicit(g)));
        self.seen.push((g.clone(), name.clone()));
        name
    }

    fn functor_doc(&mut self, f: &Functor, source_hint: &str, target_hint: &str) -> FunctorDoc {
        FunctorDoc {
            source: self.groupoid(f.source(), source_hint),
            target: self.groupoid(f.target(), target_hint),
            objects: f.object_map().iter().map(|&x| Value::from(x)).collect(),
            morphisms: f.morphism_map().iter().map(|&m| Value::from(m)).collect(),
        }
    }

    pub fn functor(&mut self, name: &str, f: &Functor) {
        let d = self.functor_doc(f, &format!("{name}_source"), &format!("{name}_target"));
        self.doc.functors.insert(name.to_string(), d);
    }

    pub fn span(&mut self, name: &str, s: &Span) {
        let source = format!("{name}_source");
        let target = format!("{name}_target");
        let apex = format!("{name}_apex");
        let left = self.functor_doc(&s.left, &apex, &source);
        let right = self.functor_doc(&s.right, &apex, &target);
        self.doc.spans.insert(
            name.to_string(),
            SpanDoc {
                left: FunctorRef::Inline(left),
                right: FunctorRef::Inline(right),
            },
        );
    }

    pub fn biset(&mut self, name: &str, u: &Biset) {
        let source = self.groupoid(u.source(), &format!("{name}_source"));
        let target = self.groupoid(u.target(), &format!("{name}_target"));
        let (h, g) = (u.source(), u.target());
        let mut left = Vec::new();
        let mut right = Vec::new();
        for x in 0..u.len() {
            for &a in g.out(u.tgt(x)) {
                left.push((Value::from(a), x, u.act_left(a, x)));
            }
            for &b in h.incoming(u.src(x)) {
                right.push((x, Value::from(b), u.act_right(x, b)));
            }
        }
        let elements = (0..u.len())
            .map(|x| ElementDoc {
                src: Value::from(u.src(x)),
                tgt: Value::from(u.tgt(x)),
            })
            .collect();
        self.doc.bisets.insert(
            name.to_string(),
            BisetDoc {
                source,
                target,
                elements,
                left,
                right,
            },
        );
    }

    pub fn result(&mut self, key: &str, value: Value) {
        self.doc.results.insert(key.to_string(), value);
    }

    pub fn finish(self) -> Document {
        self.doc
    }
}

/// Explicit tables with numeric ids.
pub fn explicit(g: &Groupoid) -> ExplicitGroupoid {
    let morphisms = (0..g.num_morphisms())
        .map(|f| MorphismDoc {
            id: Value::from(f),
            src: Value::from(g.src(f)),
            tgt: Value::from(g.tgt(f)),
            inv: Value::from(g.inv(f)),
        })
        .collect();
    let mut compose = Vec::new();
    for f in 0..g.num_morphisms() {
        for &h in g.out(g.tgt(f)) {
            compose.push([Value::from(h), Value::from(f), Value::from(g.compose(h, f))]);
        }
    }
    ExplicitGroupoid {
        objects: (0..g.num_objects()).map(Value::from).collect(),
        morphisms,
        compose,
        identities: (0..g.num_objects()).map(|x| Value::from(g.id(x))).collect(),
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biset::bisets_isomorphic;
    use crate::span::spans_isomorphic;

    const C2: &str = r#"{
        "groupoids": {
            "G": {"objects": ["x"],
                  "morphisms": [{"id": "e", "src": "x", "tgt": "x", "inv": "e"},
                                {"id": "s", "src": "x", "tgt": "x", "inv": "s"}],
                  "compose": [["e","e","e"],["e","s","s"],["s","e","s"],["s","s","e"]],
                  "identities": ["e"]},
            "P": "1",
            "T": {"group": {"perms": [[1,2,0]]}}
        },
        "functors": {
            "incl": {"source": "P", "target": "G", "objects": ["x"], "morphisms": ["e"]}
        },
        "spans": {
            "s": {"left": "incl", "right": {"source": "P", "target": "T", "objects": [0], "morphisms": [0]}}
        }
    }"#;

    #[test]
    fn explicit_groupoid_loads() {
        let ws = Workspace::from_json(C2).unwrap();
        let g = &ws.groupoids["G"];
        assert_eq!(g.summary(), "1 object, 2 morphisms, connected");
        assert_eq!(ws.groupoids["T"].num_morphisms(), 3);
        let (_, s) = ws.only_span().unwrap();
        assert_eq!(s.source().num_morphisms(), 2);
        assert_eq!(s.target().num_morphisms(), 3);
    }

    #[test]
    fn bad_tables_are_rejected() {
        let missing = C2.replace(r#"["s","s","e"]"#, r#"["s","e","s"]"#);
        assert!(Workspace::from_json(&missing).is_err());
        let non_assoc = r#"{"groupoids": {"G": {"group": {"table": [[0,1,2],[1,0,2],[2,2,0]]}}}}"#;
        assert!(Workspace::from_json(non_assoc).is_err());
        let bad_functor = C2.replace(r#""objects": ["x"], "morphisms": ["e"]"#, r#""objects": ["x"], "morphisms": ["s"]"#);
        assert!(Workspace::from_json(&bad_functor).is_err());
        assert!(Workspace::from_json(r#"{"groupoids": {"G": "BQ7"}}"#).is_err());
        assert!(Workspace::from_json(r#"{"surprise": {}}"#).is_err());
    }

    #[test]
    fn written_documents_reload() {
        let ws = Workspace::from_json(C2).unwrap();
        let (_, s) = ws.only_span().unwrap();
        let u = crate::realization::realize_span(s).unwrap().biset().clone();
        let mut w = Writer::new();
        w.span("s", s);
        w.biset("U", &u);
        let text = to_json(&w.finish()).unwrap();
        let back = Workspace::from_json(&text).unwrap();
        assert!(spans_isomorphic(back.only_span().unwrap().1, s).unwrap());
        let (_, v) = back.only_biset().unwrap();
        assert!(bisets_isomorphic(v, &u).unwrap());
        // Writing again gives the same bytes.
        let mut w2 = Writer::new();
        w2.span("s", back.only_span().unwrap().1);
        w2.biset("U", v);
        assert_eq!(to_json(&w2.finish()).unwrap(), text);
    }
}
