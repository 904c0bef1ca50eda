//! Plane trees encoding locally univalent Speiser-class functions: labeled
//! cell decompositions, reality and symmetry validation, the splitting
//! construction that raises the number of asymptotic values by two, and the
//! sector plan used to glue model pieces along rays.
//!
//! A tree is stored as a finite core graph plus ray edges to an implicit
//! vertex at infinity; the complementary faces are recovered by face tracing
//! from the rotation system and carry labels in {0, infinity} or C*.
//! Trees are plain data: construction mutates, every operation here takes a
//! finished tree by reference, so validated trees can be shared freely.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use crate::growth::{classify_orders, Case, ClassificationResult, GrowthError};
use crate::num::{cx, Cx};
use serde_json::{json, Value};
use thiserror::Error;

type C64 = Cx<f64>;

/// Sentinel for the far end of a ray edge.
pub const RAY_END: i64 = -1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexLabel {
    Cross,
    Circle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaceLabel {
    Zero,
    Infinity,
    Value(C64),
}

impl FaceLabel {
    pub fn conj(self) -> FaceLabel {
        match self {
            FaceLabel::Value(v) => FaceLabel::Value(v.conj()),
            other => other,
        }
    }

    fn approx_eq(self, other: FaceLabel) -> bool {
        match (self, other) {
            (FaceLabel::Zero, FaceLabel::Zero) => true,
            (FaceLabel::Infinity, FaceLabel::Infinity) => true,
            (FaceLabel::Value(a), FaceLabel::Value(b)) => (a - b).norm() <= 1e-9,
            _ => false,
        }
    }

    fn tag(self) -> String {
        match self {
            FaceLabel::Zero => "0".into(),
            FaceLabel::Infinity => "oo".into(),
            FaceLabel::Value(v) => format!("{:?};{:?}", v.re, v.im),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub id: i64,
    pub label: VertexLabel,
    pub on_real_axis: bool,
    /// Image under complex conjugation; equals `id` exactly on the real axis.
    pub conj_partner: i64,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub id: i64,
    /// `(v, RAY_END)` for a ray from v to infinity.
    pub ends: (i64, i64),
}

impl Edge {
    pub fn is_ray(&self) -> bool {
        self.ends.1 == RAY_END
    }
}

#[derive(Debug, Clone)]
pub struct Face {
    pub label: FaceLabel,
    /// Edge ids along the face walk; the two bounding rays sit at the ends.
    pub boundary: Vec<i64>,
}

#[derive(Debug, Clone)]
pub struct LabeledTree {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    /// Counterclockwise cyclic order of incident edge ids per vertex.
    pub rotation: BTreeMap<i64, Vec<i64>>,
    pub faces: Vec<Face>,
}

impl LabeledTree {
    /// Multiset of C* face labels, sorted for determinism.
    pub fn asymptotic_values(&self) -> Vec<C64> {
        let mut vals: Vec<C64> = self
            .faces
            .iter()
            .filter_map(|f| match f.label {
                FaceLabel::Value(v) => Some(v),
                _ => None,
            })
            .collect();
        vals.sort_by(|a, b| (a.im, a.re).partial_cmp(&(b.im, b.re)).unwrap());
        vals
    }

    fn vertex(&self, id: i64) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    fn edge(&self, id: i64) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    fn max_id(&self) -> i64 {
        let v = self.vertices.iter().map(|v| v.id).max().unwrap_or(0);
        let e = self.edges.iter().map(|e| e.id).max().unwrap_or(0);
        v.max(e)
    }
}

/// Reference cell decomposition: cyclic order of face labels around the
/// cross vertex; around the circle vertex the order is reversed.
#[derive(Debug, Clone)]
pub struct CellDecompositionSpec {
    pub order_around_cross: Vec<FaceLabel>,
}

impl CellDecompositionSpec {
    /// The symmetric reference used by the builtin family:
    /// 0, i, 2i, ..., Li, infinity, -Li, ..., -2i, -i.
    pub fn imaginary_ladder(levels: u32) -> Self {
        let mut order = vec![FaceLabel::Zero];
        for j in 1..=levels {
            order.push(FaceLabel::Value(cx(0.0, j as f64)));
        }
        order.push(FaceLabel::Infinity);
        for j in (1..=levels).rev() {
            order.push(FaceLabel::Value(cx(0.0, -(j as f64))));
        }
        CellDecompositionSpec {
            order_around_cross: order,
        }
    }

    pub fn order_around_circle(&self) -> Vec<FaceLabel> {
        let mut rev = self.order_around_cross.clone();
        rev.reverse();
        rev
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    BrokenReference { what: String },
    NotATree,
    NotBipartite { edge: i64 },
    TraceFailure { what: String },
    FaceCountMismatch { traced: usize, declared: usize },
    UnmatchedFace { index: usize },
    AmbiguousFace { index: usize },
    BadFaceLabel { index: usize },
    DuplicateLabelAtVertex { vertex: i64 },
    LabelOrderInconsistent { vertex: i64 },
    BrokenInvolution { vertex: i64 },
    AsymmetricRotation { vertex: i64 },
    AsymmetricFace { face: usize },
    BadCellDecomposition { what: String },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::BrokenReference { what } => write!(f, "broken reference: {what}"),
            Violation::NotATree => write!(f, "the core graph is not a tree"),
            Violation::NotBipartite { edge } => {
                write!(f, "edge {edge} joins two vertices of the same kind")
            }
            Violation::TraceFailure { what } => write!(f, "face tracing failed: {what}"),
            Violation::FaceCountMismatch { traced, declared } => write!(
                f,
                "tracing finds {traced} faces but {declared} are declared"
            ),
            Violation::UnmatchedFace { index } => {
                write!(f, "traced face {index} matches no declared boundary")
            }
            Violation::AmbiguousFace { index } => write!(
                f,
                "declared face {index} shares its boundary with a face of a different label"
            ),
            Violation::BadFaceLabel { index } => {
                write!(f, "face {index} carries a non-finite or zero value label")
            }
            Violation::DuplicateLabelAtVertex { vertex } => {
                write!(f, "two faces of the same label meet at vertex {vertex}")
            }
            Violation::LabelOrderInconsistent { vertex } => write!(
                f,
                "face labels around vertex {vertex} are not in the reference cyclic order"
            ),
            Violation::BrokenInvolution { vertex } => {
                write!(f, "conjugation is not an involution at vertex {vertex}")
            }
            Violation::AsymmetricRotation { vertex } => write!(
                f,
                "rotation at vertex {vertex} does not mirror its conjugate's"
            ),
            Violation::AsymmetricFace { face } => write!(
                f,
                "face {face} does not map to a conjugate-labeled face under reflection"
            ),
            Violation::BadCellDecomposition { what } => {
                write!(f, "bad reference decomposition: {what}")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("vertex {id} is not adjacent to exactly the faces labeled 0 and infinity, or lies on the real axis")]
    IneligibleVertex { id: i64 },
    #[error("splitting is implemented for twig vertices of broom-shaped trees; vertex {id} does not match")]
    UnsupportedShape { id: i64 },
    #[error("no builtin tree for m = {m}; m must be even and at least 4")]
    InvalidM { m: u32 },
    #[error("tree does not match any case of the classification: {why}")]
    Unclassifiable { why: String },
    #[error("face tracing failed: {what}")]
    Untraceable { what: String },
    #[error(transparent)]
    Orders(#[from] GrowthError),
}

/// Structural error from JSON decoding, pointing at the offending element.
#[derive(Debug, Error)]
#[error("{pointer}: {what}")]
pub struct JsonViolation {
    pub pointer: String,
    pub what: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorKind {
    Large,
    Small,
}

#[derive(Debug, Clone, Copy)]
pub struct Sector {
    /// Opening angle in radians.
    pub opening: f64,
    /// Rotation constant e_j with |e_j| = 1; e_j z^rho maps the sector onto
    /// the model domain.
    pub rotation: C64,
    pub kind: SectorKind,
}

#[derive(Debug, Clone)]
pub struct SectorPlan {
    pub rho: f64,
    pub case: Case,
    pub sectors: Vec<Sector>,
}

// ---------------------------------------------------------------------------
// Face tracing

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Dart {
    edge: i64,
    rev: bool,
}

#[derive(Debug, Clone)]
struct TracedFace {
    /// Edge ids in walk order; first and last are the bounding rays.
    boundary: Vec<i64>,
    rays: Vec<i64>,
}

#[derive(Debug)]
struct Traced {
    faces: Vec<TracedFace>,
    /// (vertex, arriving edge) -> (face index, departing edge).
    corners: BTreeMap<(i64, i64), (usize, i64)>,
}

fn dart_head(tree: &LabeledTree, d: Dart) -> i64 {
    let e = tree.edge(d.edge).expect("dart references a known edge");
    if d.rev {
        e.ends.0
    } else {
        e.ends.1
    }
}

fn next_dart(tree: &LabeledTree, d: Dart) -> Result<Dart, String> {
    let h = dart_head(tree, d);
    if h == RAY_END {
        return Ok(Dart {
            edge: d.edge,
            rev: true,
        });
    }
    let sigma = tree
        .rotation
        .get(&h)
        .ok_or_else(|| format!("vertex {h} has no rotation"))?;
    let pos = sigma
        .iter()
        .position(|&e| e == d.edge)
        .ok_or_else(|| format!("edge {} missing from rotation of vertex {h}", d.edge))?;
    let prev = sigma[(pos + sigma.len() - 1) % sigma.len()];
    let pe = tree
        .edge(prev)
        .ok_or_else(|| format!("rotation of vertex {h} references unknown edge {prev}"))?;
    if pe.ends.0 == h {
        Ok(Dart {
            edge: prev,
            rev: false,
        })
    } else if pe.ends.1 == h {
        Ok(Dart {
            edge: prev,
            rev: true,
        })
    } else {
        Err(format!(
            "rotation of vertex {h} lists edge {prev} that is not incident to it"
        ))
    }
}

/// Walk the full contour and cut it at incoming rays. Each cut segment is
/// one complementary face; a tree has a single contour, so the number of
/// faces equals the number of rays.
fn trace_faces(tree: &LabeledTree) -> Result<Traced, String> {
    if tree.edges.is_empty() {
        return Ok(Traced {
            faces: Vec::new(),
            corners: BTreeMap::new(),
        });
    }
    let start = Dart {
        edge: tree.edges.iter().map(|e| e.id).min().unwrap(),
        rev: false,
    };
    let total = 2 * tree.edges.len();
    let mut walk = Vec::with_capacity(total);
    let mut d = start;
    loop {
        walk.push(d);
        d = next_dart(tree, d)?;
        if d == start {
            break;
        }
        if walk.len() > total {
            return Err("contour does not close after visiting every dart".into());
        }
    }
    if walk.len() != total {
        return Err(format!(
            "contour visits {} darts, expected {total}; the graph is disconnected or the rotation is inconsistent",
            walk.len()
        ));
    }

    let cuts: Vec<usize> = walk
        .iter()
        .enumerate()
        .filter(|(_, d)| d.rev && tree.edge(d.edge).map(|e| e.is_ray()).unwrap_or(false))
        .map(|(i, _)| i)
        .collect();

    let segments: Vec<Vec<Dart>> = if cuts.is_empty() {
        vec![walk.clone()]
    } else {
        (0..cuts.len())
            .map(|k| {
                let from = cuts[k];
                let to = cuts[(k + 1) % cuts.len()];
                if from < to {
                    walk[from..to].to_vec()
                } else {
                    let mut s = walk[from..].to_vec();
                    s.extend_from_slice(&walk[..to]);
                    s
                }
            })
            .collect()
    };

    let mut faces = Vec::new();
    let mut corners = BTreeMap::new();
    for (idx, seg) in segments.iter().enumerate() {
        let boundary: Vec<i64> = seg.iter().map(|d| d.edge).collect();
        let rays: Vec<i64> = seg
            .iter()
            .filter(|d| tree.edge(d.edge).map(|e| e.is_ray()).unwrap_or(false))
            .map(|d| d.edge)
            .collect();
        for w in seg.windows(2) {
            let h = dart_head(tree, w[0]);
            if h != RAY_END {
                corners.insert((h, w[0].edge), (idx, w[1].edge));
            }
        }
        // Wrap-around corner for segments without a trailing ray.
        if cuts.is_empty() && seg.len() > 1 {
            let h = dart_head(tree, *seg.last().unwrap());
            if h != RAY_END {
                corners.insert((h, seg.last().unwrap().edge), (idx, seg[0].edge));
            }
        }
        faces.push(TracedFace { boundary, rays });
    }
    Ok(Traced { faces, corners })
}

fn min_rotation(seq: &[i64]) -> Vec<i64> {
    if seq.is_empty() {
        return Vec::new();
    }
    (0..seq.len())
        .map(|k| {
            let mut r = seq[k..].to_vec();
            r.extend_from_slice(&seq[..k]);
            r
        })
        .min()
        .unwrap()
}

/// Match traced faces to declared faces by cyclic boundary equality.
/// Returns, for each traced face, the declared index.
fn match_faces(tree: &LabeledTree, traced: &Traced) -> Result<Vec<usize>, Vec<Violation>> {
    let mut violations = Vec::new();
    if traced.faces.len() != tree.faces.len() {
        violations.push(Violation::FaceCountMismatch {
            traced: traced.faces.len(),
            declared: tree.faces.len(),
        });
        return Err(violations);
    }
    let mut used = vec![false; tree.faces.len()];
    let mut assignment = Vec::with_capacity(traced.faces.len());
    for tf in &traced.faces {
        let key = min_rotation(&tf.boundary);
        let hits: Vec<usize> = tree
            .faces
            .iter()
            .enumerate()
            .filter(|(j, f)| !used[*j] && min_rotation(&f.boundary) == key)
            .map(|(j, _)| j)
            .collect();
        match hits.first() {
            None => {
                violations.push(Violation::UnmatchedFace {
                    index: assignment.len(),
                });
                return Err(violations);
            }
            Some(&j) => {
                if hits.len() > 1 && {
                    let l0 = tree.faces[hits[0]].label;
                    hits.iter().any(|&h| !tree.faces[h].label.approx_eq(l0))
                } {
                    violations.push(Violation::AmbiguousFace { index: j });
                    return Err(violations);
                }
                used[j] = true;
                assignment.push(j);
            }
        }
    }
    Ok(assignment)
}

/// Traced faces together with their matched labels; shared entry point for
/// every operation that needs to know which label sits in which corner.
struct FaceView {
    traced: Traced,
    labels: Vec<FaceLabel>,
}

fn face_view(tree: &LabeledTree) -> Result<FaceView, TreeError> {
    let traced = trace_faces(tree).map_err(|what| TreeError::Untraceable { what })?;
    let assignment = match_faces(tree, &traced).map_err(|v| TreeError::Untraceable {
        what: format!("{v:?}"),
    })?;
    let labels = assignment
        .iter()
        .map(|&j| tree.faces[j].label)
        .collect();
    Ok(FaceView { traced, labels })
}

impl FaceView {
    fn corner_label(&self, vertex: i64, arriving: i64) -> Option<FaceLabel> {
        self.traced
            .corners
            .get(&(vertex, arriving))
            .map(|&(f, _)| self.labels[f])
    }

    /// Counterclockwise labels around a vertex, one per rotation slot.
    fn labels_around(&self, tree: &LabeledTree, vertex: i64) -> Option<Vec<FaceLabel>> {
        let sigma = tree.rotation.get(&vertex)?;
        sigma
            .iter()
            .map(|&e| self.corner_label(vertex, e))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Symmetry

/// Core-edge image under conjugation, looked up by conjugated endpoints.
fn conj_edge_map(tree: &LabeledTree) -> Option<BTreeMap<i64, i64>> {
    let conj: BTreeMap<i64, i64> = tree
        .vertices
        .iter()
        .map(|v| (v.id, v.conj_partner))
        .collect();
    let by_ends: BTreeMap<(i64, i64), i64> = tree
        .edges
        .iter()
        .filter(|e| !e.is_ray())
        .map(|e| {
            let (a, b) = e.ends;
            ((a.min(b), a.max(b)), e.id)
        })
        .collect();
    let mut map = BTreeMap::new();
    for e in tree.edges.iter().filter(|e| !e.is_ray()) {
        let ca = *conj.get(&e.ends.0)?;
        let cb = *conj.get(&e.ends.1)?;
        let img = *by_ends.get(&(ca.min(cb), ca.max(cb)))?;
        map.insert(e.id, img);
    }
    Some(map)
}

/// Align the rotation at `v`'s conjugate with the reversed conjugate of the
/// rotation at `v`. Returns the induced pairing of `v`'s rays with rays at
/// the partner, or None if no alignment exists.
fn mirror_alignment(
    tree: &LabeledTree,
    v: i64,
    core_conj: &BTreeMap<i64, i64>,
) -> Option<BTreeMap<i64, i64>> {
    let cv = tree.vertex(v)?.conj_partner;
    let sigma = tree.rotation.get(&v)?;
    let target = tree.rotation.get(&cv)?;
    if sigma.len() != target.len() {
        return None;
    }
    let n = sigma.len();
    let is_ray = |e: i64| tree.edge(e).map(|e| e.is_ray()).unwrap_or(false);
    // Reversed conjugate of sigma; rays stay as wildcards carrying their id.
    let mirrored: Vec<Option<i64>> = sigma
        .iter()
        .rev()
        .map(|&e| if is_ray(e) { None } else { core_conj.get(&e).copied() })
        .collect();
    'offsets: for k in 0..n {
        let mut pairing = BTreeMap::new();
        for i in 0..n {
            let t = target[(i + k) % n];
            match mirrored[i] {
                Some(e) => {
                    if t != e {
                        continue 'offsets;
                    }
                }
                None => {
                    let orig = sigma[n - 1 - i];
                    if !is_ray(orig) {
                        continue 'offsets;
                    }
                    if !is_ray(t) {
                        continue 'offsets;
                    }
                    pairing.insert(orig, t);
                }
            }
        }
        return Some(pairing);
    }
    None
}

// ---------------------------------------------------------------------------
// Validation

/// True iff `seq` (distinct labels) is a cyclic subsequence of `reference`.
fn is_cyclic_suborder(seq: &[FaceLabel], reference: &[FaceLabel]) -> bool {
    let restricted: Vec<FaceLabel> = reference
        .iter()
        .copied()
        .filter(|&r| seq.iter().any(|&s| s.approx_eq(r)))
        .collect();
    if restricted.len() != seq.len() {
        return false;
    }
    let n = seq.len();
    (0..n).any(|k| (0..n).all(|i| seq[(i + k) % n].approx_eq(restricted[i])))
}

pub fn validate_tree(tree: &LabeledTree, celldec: &CellDecompositionSpec) -> ValidationReport {
    let mut violations = Vec::new();

    // Reference decomposition sanity.
    let ref_order = &celldec.order_around_cross;
    if ref_order.len() < 2 {
        violations.push(Violation::BadCellDecomposition {
            what: "the singular-value set needs at least two points".into(),
        });
    }
    for (i, &a) in ref_order.iter().enumerate() {
        if ref_order[..i].iter().any(|&b| b.approx_eq(a)) {
            violations.push(Violation::BadCellDecomposition {
                what: "reference order repeats a label".into(),
            });
            break;
        }
    }

    // Referential integrity; everything later assumes it.
    let mut ids = BTreeSet::new();
    for v in &tree.vertices {
        if !ids.insert(v.id) {
            violations.push(Violation::BrokenReference {
                what: format!("duplicate vertex id {}", v.id),
            });
        }
    }
    let mut edge_ids = BTreeSet::new();
    for e in &tree.edges {
        if !edge_ids.insert(e.id) {
            violations.push(Violation::BrokenReference {
                what: format!("duplicate edge id {}", e.id),
            });
        }
        if e.ends.0 == RAY_END || !ids.contains(&e.ends.0) {
            violations.push(Violation::BrokenReference {
                what: format!("edge {} starts at unknown vertex {}", e.id, e.ends.0),
            });
        }
        if e.ends.1 != RAY_END && !ids.contains(&e.ends.1) {
            violations.push(Violation::BrokenReference {
                what: format!("edge {} ends at unknown vertex {}", e.id, e.ends.1),
            });
        }
        if !e.is_ray() && e.ends.0 == e.ends.1 {
            violations.push(Violation::BrokenReference {
                what: format!("edge {} is a loop", e.id),
            });
        }
    }
    for v in &tree.vertices {
        let incident: BTreeSet<i64> = tree
            .edges
            .iter()
            .filter(|e| e.ends.0 == v.id || e.ends.1 == v.id)
            .map(|e| e.id)
            .collect();
        match tree.rotation.get(&v.id) {
            None => violations.push(Violation::BrokenReference {
                what: format!("vertex {} has no rotation", v.id),
            }),
            Some(sigma) => {
                let listed: BTreeSet<i64> = sigma.iter().copied().collect();
                if listed != incident || sigma.len() != incident.len() {
                    violations.push(Violation::BrokenReference {
                        what: format!(
                            "rotation of vertex {} does not list its incident edges exactly once",
                            v.id
                        ),
                    });
                }
            }
        }
    }
    for k in tree.rotation.keys() {
        if !ids.contains(k) {
            violations.push(Violation::BrokenReference {
                what: format!("rotation entry for unknown vertex {k}"),
            });
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }

    // Core graph is a tree.
    let core: Vec<&Edge> = tree.edges.iter().filter(|e| !e.is_ray()).collect();
    if core.len() + 1 != tree.vertices.len() {
        violations.push(Violation::NotATree);
    } else if !tree.vertices.is_empty() {
        let mut seen = BTreeSet::new();
        let mut stack = vec![tree.vertices[0].id];
        seen.insert(tree.vertices[0].id);
        while let Some(v) = stack.pop() {
            for e in &core {
                let other = if e.ends.0 == v {
                    Some(e.ends.1)
                } else if e.ends.1 == v {
                    Some(e.ends.0)
                } else {
                    None
                };
                if let Some(w) = other {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
        }
        if seen.len() != tree.vertices.len() {
            violations.push(Violation::NotATree);
        }
    }

    for e in &core {
        let a = tree.vertex(e.ends.0).unwrap().label;
        let b = tree.vertex(e.ends.1).unwrap().label;
        if a == b {
            violations.push(Violation::NotBipartite { edge: e.id });
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }

    // Faces.
    let traced = match trace_faces(tree) {
        Ok(t) => t,
        Err(what) => {
            violations.push(Violation::TraceFailure { what });
            return ValidationReport { violations };
        }
    };
    let assignment = match match_faces(tree, &traced) {
        Ok(a) => a,
        Err(mut v) => {
            violations.append(&mut v);
            return ValidationReport { violations };
        }
    };
    let view = FaceView {
        traced,
        labels: assignment.iter().map(|&j| tree.faces[j].label).collect(),
    };

    for (i, f) in tree.faces.iter().enumerate() {
        if let FaceLabel::Value(v) = f.label {
            if !v.re.is_finite() || !v.im.is_finite() || v.norm() == 0.0 {
                violations.push(Violation::BadFaceLabel { index: i });
            }
        }
    }

    // Cyclic label order around every vertex.
    let circle_order = celldec.order_around_circle();
    for v in &tree.vertices {
        let around = match view.labels_around(tree, v.id) {
            Some(a) => a,
            None => continue,
        };
        let mut distinct = true;
        for (i, &a) in around.iter().enumerate() {
            if around[..i].iter().any(|&b| b.approx_eq(a)) {
                distinct = false;
            }
        }
        if !distinct {
            violations.push(Violation::DuplicateLabelAtVertex { vertex: v.id });
            continue;
        }
        let reference = match v.label {
            VertexLabel::Cross => ref_order,
            VertexLabel::Circle => &circle_order,
        };
        if !is_cyclic_suborder(&around, reference) {
            violations.push(Violation::LabelOrderInconsistent { vertex: v.id });
        }
    }

    // Conjugation involution.
    let mut involution_ok = true;
    for v in &tree.vertices {
        let p = match tree.vertex(v.conj_partner) {
            Some(p) => p,
            None => {
                violations.push(Violation::BrokenInvolution { vertex: v.id });
                involution_ok = false;
                continue;
            }
        };
        if p.conj_partner != v.id
            || p.label != v.label
            || (v.on_real_axis != (v.conj_partner == v.id))
        {
            violations.push(Violation::BrokenInvolution { vertex: v.id });
            involution_ok = false;
        }
    }
    if !involution_ok {
        return ValidationReport { violations };
    }

    let core_conj = match conj_edge_map(tree) {
        Some(m) => m,
        None => {
            violations.push(Violation::AsymmetricRotation { vertex: -1 });
            return ValidationReport { violations };
        }
    };

    // Rotations mirror, and the alignment pairs rays across the axis.
    let mut ray_conj: BTreeMap<i64, i64> = BTreeMap::new();
    for v in &tree.vertices {
        match mirror_alignment(tree, v.id, &core_conj) {
            Some(pairing) => ray_conj.extend(pairing),
            None => violations.push(Violation::AsymmetricRotation { vertex: v.id }),
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }

    // Faces map to faces with conjugate labels.
    let conj_of = |e: i64| -> Option<i64> {
        core_conj.get(&e).copied().or_else(|| ray_conj.get(&e).copied())
    };
    for (f_idx, _) in view.traced.faces.iter().enumerate() {
        let mut image: Option<usize> = None;
        let mut ok = true;
        for (&(v, arr), &(face, dep)) in &view.traced.corners {
            if face != f_idx {
                continue;
            }
            let cv = tree.vertex(v).unwrap().conj_partner;
            let (carr, _cdep) = match (conj_of(dep), conj_of(arr)) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    ok = false;
                    break;
                }
            };
            match view.traced.corners.get(&(cv, carr)) {
                Some(&(g, _)) => match image {
                    None => image = Some(g),
                    Some(prev) if prev == g => {}
                    Some(_) => {
                        ok = false;
                        break;
                    }
                },
                None => {
                    ok = false;
                    break;
                }
            }
        }
        let label_ok = match image {
            Some(g) => view.labels[g].approx_eq(view.labels[f_idx].conj()),
            None => false,
        };
        if !ok || !label_ok {
            violations.push(Violation::AsymmetricFace { face: f_idx });
        }
    }

    ValidationReport { violations }
}

// ---------------------------------------------------------------------------
// Reality of zeros and poles

/// True iff every non-real vertex touches at least one face labeled 0 and
/// one labeled infinity; those tracts force all zeros and poles onto the
/// real axis.
pub fn check_real_zeros_poles(tree: &LabeledTree) -> bool {
    let view = match face_view(tree) {
        Ok(v) => v,
        Err(_) => return false,
    };
    tree.vertices.iter().all(|v| {
        if v.on_real_axis {
            return true;
        }
        let around = match view.labels_around(tree, v.id) {
            Some(a) => a,
            None => return false,
        };
        around.iter().any(|l| matches!(l, FaceLabel::Zero))
            && around.iter().any(|l| matches!(l, FaceLabel::Infinity))
    })
}

pub fn count_singularities(tree: &LabeledTree) -> usize {
    tree.faces
        .iter()
        .filter(|f| matches!(f.label, FaceLabel::Value(_)))
        .count()
}

// ---------------------------------------------------------------------------
// Builtin family and splitting

struct BroomIds {
    eu: i64,
    ed: i64,
    ra: i64,
    rb: i64,
    rc: i64,
    ra_m: i64,
    rb_m: i64,
    rc_m: i64,
}

/// The two-sided tree with `brooms` upper brooms: a real chain with rays at
/// both ends, one broom hanging above (and mirrored below) every internal
/// cross vertex. Builds exactly the m = 2(brooms + 1) member of the family.
fn broom_chain(brooms: usize, id_base: i64) -> LabeledTree {
    assert!(brooms >= 1);
    let k = brooms;
    let chain_len = 2 * k + 3;
    let mut next_id = id_base;
    let mut take = || {
        let id = next_id;
        next_id += 1;
        id
    };

    let chain: Vec<i64> = (0..chain_len).map(|_| take()).collect();
    let mut vertices: Vec<Vertex> = chain
        .iter()
        .enumerate()
        .map(|(i, &id)| Vertex {
            id,
            label: if i % 2 == 0 {
                VertexLabel::Cross
            } else {
                VertexLabel::Circle
            },
            on_real_axis: true,
            conj_partner: id,
        })
        .collect();

    let mut edges: Vec<Edge> = Vec::new();
    let mut rotation: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    let chain_edges: Vec<i64> = (0..chain_len - 1)
        .map(|i| {
            let id = take();
            edges.push(Edge {
                id,
                ends: (chain[i], chain[i + 1]),
            });
            id
        })
        .collect();

    let mut broom_ids: Vec<BroomIds> = Vec::new();
    for j in 0..k {
        let c = chain[2 * (j + 1)];
        let (u, t, u_m, t_m) = (take(), take(), take(), take());
        for (id, partner) in [(u, u_m), (t, t_m), (u_m, u), (t_m, t)] {
            vertices.push(Vertex {
                id,
                label: if id == u || id == u_m {
                    VertexLabel::Circle
                } else {
                    VertexLabel::Cross
                },
                on_real_axis: false,
                conj_partner: partner,
            });
        }
        let (eu, et, ed, eb) = (take(), take(), take(), take());
        edges.push(Edge { id: eu, ends: (c, u) });
        edges.push(Edge { id: et, ends: (u, t) });
        edges.push(Edge { id: ed, ends: (c, u_m) });
        edges.push(Edge { id: eb, ends: (u_m, t_m) });
        let (ra, rb, rc) = (take(), take(), take());
        let (ra_m, rb_m, rc_m) = (take(), take(), take());
        for (id, v) in [
            (ra, u),
            (rb, u),
            (rc, t),
            (ra_m, u_m),
            (rb_m, u_m),
            (rc_m, t_m),
        ] {
            edges.push(Edge {
                id,
                ends: (v, RAY_END),
            });
        }
        rotation.insert(u, vec![eu, ra, et, rb]);
        rotation.insert(t, vec![et, rc]);
        rotation.insert(u_m, vec![ed, rb_m, eb, ra_m]);
        rotation.insert(t_m, vec![eb, rc_m]);
        broom_ids.push(BroomIds {
            eu,
            ed,
            ra,
            rb,
            rc,
            ra_m,
            rb_m,
            rc_m,
        });
    }

    let w_ray = take();
    let e_ray = take();
    edges.push(Edge {
        id: w_ray,
        ends: (chain[0], RAY_END),
    });
    edges.push(Edge {
        id: e_ray,
        ends: (chain[chain_len - 1], RAY_END),
    });

    rotation.insert(chain[0], vec![chain_edges[0], w_ray]);
    rotation.insert(chain[chain_len - 1], vec![chain_edges[chain_len - 2], e_ray]);
    for i in 1..chain_len - 1 {
        let west = chain_edges[i - 1];
        let east = chain_edges[i];
        if i % 2 == 1 {
            rotation.insert(chain[i], vec![west, east]);
        } else {
            let b = &broom_ids[i / 2 - 1];
            rotation.insert(chain[i], vec![west, b.ed, east, b.eu]);
        }
    }

    let mut tree = LabeledTree {
        vertices,
        edges,
        rotation,
        faces: Vec::new(),
    };

    // Label the traced faces by the pair of rays bounding each of them.
    let traced = trace_faces(&tree).expect("builtin construction traces");
    let label_of = |rays: &[i64]| -> FaceLabel {
        let set: BTreeSet<i64> = rays.iter().copied().collect();
        for b in &broom_ids {
            if set == BTreeSet::from([b.ra, b.rc]) || set == BTreeSet::from([b.ra_m, b.rc_m]) {
                return FaceLabel::Zero;
            }
            if set == BTreeSet::from([b.rc, b.rb]) || set == BTreeSet::from([b.rc_m, b.rb_m]) {
                return FaceLabel::Infinity;
            }
        }
        // Remaining faces are the large tracts between brooms; their value
        // is i times their distance from the east end, negated below the
        // axis. West of broom j sits value (k + 1 - j) i.
        let upper = |j: usize| -> Option<f64> {
            let west = if j == 0 { w_ray } else { broom_ids[j - 1].ra };
            let east = if j == k { e_ray } else { broom_ids[j].rb };
            (set == BTreeSet::from([west, east])).then_some((k + 1 - j) as f64)
        };
        let lower = |j: usize| -> Option<f64> {
            let west = if j == 0 { w_ray } else { broom_ids[j - 1].ra_m };
            let east = if j == k { e_ray } else { broom_ids[j].rb_m };
            (set == BTreeSet::from([west, east])).then_some(-((k + 1 - j) as f64))
        };
        for j in 0..=k {
            if let Some(v) = upper(j) {
                return FaceLabel::Value(cx(0.0, v));
            }
            if let Some(v) = lower(j) {
                return FaceLabel::Value(cx(0.0, v));
            }
        }
        unreachable!("every face of the broom chain is classified");
    };
    tree.faces = traced
        .faces
        .iter()
        .map(|f| Face {
            label: label_of(&f.rays),
            boundary: f.boundary.clone(),
        })
        .collect();
    tree
}

/// The Figure-3 tree for m = 4 and its iterated splittings.
pub fn builtin_tree(m: u32) -> Result<LabeledTree, TreeError> {
    if m < 4 || m % 2 != 0 {
        return Err(TreeError::InvalidM { m });
    }
    Ok(broom_chain((m / 2 - 1) as usize, 0))
}

/// Reference cell decomposition matching `builtin_tree(m)`.
pub fn builtin_celldec(m: u32) -> Result<CellDecompositionSpec, TreeError> {
    if m < 4 || m % 2 != 0 {
        return Err(TreeError::InvalidM { m });
    }
    Ok(CellDecompositionSpec::imaginary_ladder(m / 2))
}

/// Split at a twig vertex whose only adjacent faces are labeled 0 and
/// infinity (the conjugate twig splits symmetrically), inserting a new broom
/// so that every non-real vertex again touches tracts over 0 and infinity.
/// The result has two more asymptotic values.
pub fn split_tree(tree: &LabeledTree, vertex: i64) -> Result<LabeledTree, TreeError> {
    let v = tree
        .vertex(vertex)
        .ok_or(TreeError::IneligibleVertex { id: vertex })?;
    if v.on_real_axis {
        return Err(TreeError::IneligibleVertex { id: vertex });
    }
    let view = face_view(tree)?;
    let around = view
        .labels_around(tree, vertex)
        .ok_or(TreeError::IneligibleVertex { id: vertex })?;
    let only_tracts = around
        .iter()
        .all(|l| matches!(l, FaceLabel::Zero | FaceLabel::Infinity));
    let has_both = around.iter().any(|l| matches!(l, FaceLabel::Zero))
        && around.iter().any(|l| matches!(l, FaceLabel::Infinity));
    if !only_tracts || !has_both {
        return Err(TreeError::IneligibleVertex { id: vertex });
    }

    // The construction is defined on the broom-chain family: the designated
    // vertex is a twig cross hanging by one edge under a broom circle.
    let shape_err = || TreeError::UnsupportedShape { id: vertex };
    if v.label != VertexLabel::Cross {
        return Err(shape_err());
    }
    let sigma_t = tree.rotation.get(&vertex).ok_or_else(shape_err)?;
    let core_at_t: Vec<i64> = sigma_t
        .iter()
        .copied()
        .filter(|&e| !tree.edge(e).unwrap().is_ray())
        .collect();
    if core_at_t.len() != 1 || sigma_t.len() != 2 {
        return Err(shape_err());
    }
    let et = tree.edge(core_at_t[0]).unwrap();
    let u_id = if et.ends.0 == vertex {
        et.ends.1
    } else {
        et.ends.0
    };
    let u = tree.vertex(u_id).ok_or_else(shape_err)?;
    if u.label != VertexLabel::Circle || u.on_real_axis {
        return Err(shape_err());
    }

    let brooms = tree
        .vertices
        .iter()
        .filter(|w| {
            w.on_real_axis
                && w.label == VertexLabel::Cross
                && tree.edges.iter().any(|e| {
                    !e.is_ray()
                        && (e.ends.0 == w.id || e.ends.1 == w.id)
                        && {
                            let other = if e.ends.0 == w.id { e.ends.1 } else { e.ends.0 };
                            !tree.vertex(other).map(|o| o.on_real_axis).unwrap_or(true)
                        }
                })
        })
        .count();
    let expect = broom_chain(brooms, 0);
    if tree.vertices.len() != expect.vertices.len() || tree.edges.len() != expect.edges.len() {
        return Err(shape_err());
    }
    Ok(broom_chain(brooms + 1, tree.max_id() + 1))
}

// ---------------------------------------------------------------------------
// Classification

/// Rays on the real axis that conjugation fixes; each one marks an infinite
/// chain of real zeros and poles.
fn real_axis_rays(tree: &LabeledTree) -> Result<usize, TreeError> {
    let core_conj = conj_edge_map(tree).ok_or_else(|| TreeError::Unclassifiable {
        why: "conjugation does not act on the edges".into(),
    })?;
    let mut fixed = 0;
    for v in tree.vertices.iter().filter(|v| v.on_real_axis) {
        let pairing = mirror_alignment(tree, v.id, &core_conj).ok_or_else(|| {
            TreeError::Unclassifiable {
                why: format!("rotation at vertex {} is not symmetric", v.id),
            }
        })?;
        fixed += pairing.iter().filter(|(r, s)| r == s).count();
    }
    Ok(fixed)
}

/// Case detection from the real-axis structure: two conjugation-fixed rays
/// mean zeros and poles run off in both directions, one means a single
/// infinite chain, none means finitely many.
pub fn classify(tree: &LabeledTree) -> Result<ClassificationResult<f64>, TreeError> {
    let m = count_singularities(tree);
    if m == 0 {
        return Err(TreeError::Unclassifiable {
            why: "no singularities over C*: the function is equivalent to exp".into(),
        });
    }
    let case = match real_axis_rays(tree)? {
        0 => Case::I,
        1 => Case::II,
        2 => Case::III,
        n => {
            return Err(TreeError::Unclassifiable {
                why: format!("{n} real-axis chains match no case"),
            })
        }
    };
    Ok(classify_orders(case, m as u32)?)
}

// ---------------------------------------------------------------------------
// Sector plan

/// Openings and rotation constants for the sectors S_0, ..., S_{m-1},
/// enumerated counterclockwise with S_0 bisected by the positive real axis.
pub fn sector_plan(case: Case, m: u32) -> Result<SectorPlan, GrowthError> {
    let orders = classify_orders::<f64>(case, m)?;
    let rho = orders.rho;
    let large = 2.0 * PI / rho;
    let small = PI / rho;
    let sectors = (0..m)
        .map(|j| match case {
            Case::I => Sector {
                opening: large,
                rotation: cx(-1.0, 0.0),
                kind: SectorKind::Large,
            },
            Case::II => {
                if j == 0 {
                    Sector {
                        opening: small,
                        rotation: cx(1.0, 0.0),
                        kind: SectorKind::Small,
                    }
                } else {
                    Sector {
                        opening: large,
                        rotation: cx(0.0, -1.0),
                        kind: SectorKind::Large,
                    }
                }
            }
            Case::III => {
                if j == 0 {
                    Sector {
                        opening: small,
                        rotation: cx(1.0, 0.0),
                        kind: SectorKind::Small,
                    }
                } else if j == m / 2 {
                    Sector {
                        opening: small,
                        rotation: cx(-1.0, 0.0),
                        kind: SectorKind::Small,
                    }
                } else if j < m / 2 {
                    Sector {
                        opening: large,
                        rotation: cx(0.0, -1.0),
                        kind: SectorKind::Large,
                    }
                } else {
                    Sector {
                        opening: large,
                        rotation: cx(0.0, 1.0),
                        kind: SectorKind::Large,
                    }
                }
            }
        })
        .collect();
    Ok(SectorPlan {
        rho,
        case,
        sectors,
    })
}

// ---------------------------------------------------------------------------
// Fixtures

/// One-sided example: a single infinite chain of zeros and poles to the
/// east, two asymptotic values i and -i.
pub fn case_ii_example() -> LabeledTree {
    let vertices = vec![
        Vertex { id: 0, label: VertexLabel::Cross, on_real_axis: true, conj_partner: 0 },
        Vertex { id: 1, label: VertexLabel::Circle, on_real_axis: true, conj_partner: 1 },
        Vertex { id: 2, label: VertexLabel::Cross, on_real_axis: true, conj_partner: 2 },
        Vertex { id: 3, label: VertexLabel::Circle, on_real_axis: false, conj_partner: 4 },
        Vertex { id: 4, label: VertexLabel::Circle, on_real_axis: false, conj_partner: 3 },
    ];
    let edges = vec![
        Edge { id: 0, ends: (0, 1) },
        Edge { id: 1, ends: (1, 2) },
        Edge { id: 2, ends: (0, 3) },
        Edge { id: 3, ends: (0, 4) },
        Edge { id: 4, ends: (2, RAY_END) },
        Edge { id: 5, ends: (3, RAY_END) },
        Edge { id: 6, ends: (3, RAY_END) },
        Edge { id: 7, ends: (4, RAY_END) },
        Edge { id: 8, ends: (4, RAY_END) },
    ];
    let rotation = BTreeMap::from([
        (0, vec![3, 0, 2]),
        (1, vec![0, 1]),
        (2, vec![1, 4]),
        (3, vec![2, 5, 6]),
        (4, vec![3, 8, 7]),
    ]);
    let mut tree = LabeledTree {
        vertices,
        edges,
        rotation,
        faces: Vec::new(),
    };
    let traced = trace_faces(&tree).expect("fixture traces");
    let label_of = |rays: &BTreeSet<i64>| -> FaceLabel {
        if *rays == BTreeSet::from([4, 5]) {
            FaceLabel::Value(cx(0.0, 1.0))
        } else if *rays == BTreeSet::from([5, 6]) || *rays == BTreeSet::from([7, 8]) {
            FaceLabel::Zero
        } else if *rays == BTreeSet::from([6, 8]) {
            FaceLabel::Infinity
        } else {
            FaceLabel::Value(cx(0.0, -1.0))
        }
    };
    tree.faces = traced
        .faces
        .iter()
        .map(|f| Face {
            label: label_of(&f.rays.iter().copied().collect()),
            boundary: f.boundary.clone(),
        })
        .collect();
    tree
}

/// Example with no real zeros or poles at all: no real-axis rays, two
/// asymptotic values i and -i.
pub fn case_i_example() -> LabeledTree {
    let vertices = vec![
        Vertex { id: 0, label: VertexLabel::Cross, on_real_axis: true, conj_partner: 0 },
        Vertex { id: 1, label: VertexLabel::Circle, on_real_axis: false, conj_partner: 2 },
        Vertex { id: 2, label: VertexLabel::Circle, on_real_axis: false, conj_partner: 1 },
    ];
    let edges = vec![
        Edge { id: 0, ends: (0, 1) },
        Edge { id: 1, ends: (0, 2) },
        Edge { id: 2, ends: (1, RAY_END) },
        Edge { id: 3, ends: (1, RAY_END) },
        Edge { id: 4, ends: (2, RAY_END) },
        Edge { id: 5, ends: (2, RAY_END) },
    ];
    let rotation = BTreeMap::from([(0, vec![1, 0]), (1, vec![0, 2, 3]), (2, vec![1, 5, 4])]);
    let mut tree = LabeledTree {
        vertices,
        edges,
        rotation,
        faces: Vec::new(),
    };
    let traced = trace_faces(&tree).expect("fixture traces");
    let label_of = |rays: &BTreeSet<i64>| -> FaceLabel {
        if *rays == BTreeSet::from([2, 3]) {
            FaceLabel::Value(cx(0.0, 1.0))
        } else if *rays == BTreeSet::from([3, 5]) {
            FaceLabel::Zero
        } else if *rays == BTreeSet::from([4, 5]) {
            FaceLabel::Value(cx(0.0, -1.0))
        } else {
            FaceLabel::Infinity
        }
    };
    tree.faces = traced
        .faces
        .iter()
        .map(|f| Face {
            label: label_of(&f.rays.iter().copied().collect()),
            boundary: f.boundary.clone(),
        })
        .collect();
    tree
}

/// A single edge whose two faces are tracts over 0 and infinity only; the
/// classifier must reject it since m = 0 forces exp up to equivalence.
pub fn exp_like_example() -> LabeledTree {
    let vertices = vec![
        Vertex { id: 0, label: VertexLabel::Cross, on_real_axis: true, conj_partner: 0 },
        Vertex { id: 1, label: VertexLabel::Circle, on_real_axis: true, conj_partner: 1 },
    ];
    let edges = vec![
        Edge { id: 0, ends: (0, 1) },
        Edge { id: 1, ends: (0, RAY_END) },
        Edge { id: 2, ends: (1, RAY_END) },
    ];
    let rotation = BTreeMap::from([(0, vec![0, 1]), (1, vec![0, 2])]);
    let mut tree = LabeledTree {
        vertices,
        edges,
        rotation,
        faces: Vec::new(),
    };
    let traced = trace_faces(&tree).expect("fixture traces");
    tree.faces = traced
        .faces
        .iter()
        .enumerate()
        .map(|(i, f)| Face {
            label: if i == 0 { FaceLabel::Zero } else { FaceLabel::Infinity },
            boundary: f.boundary.clone(),
        })
        .collect();
    tree
}

// ---------------------------------------------------------------------------
// JSON interchange

pub fn to_json(tree: &LabeledTree) -> Value {
    let mut vertices: Vec<&Vertex> = tree.vertices.iter().collect();
    vertices.sort_by_key(|v| v.id);
    let mut edges: Vec<&Edge> = tree.edges.iter().collect();
    edges.sort_by_key(|e| e.id);

    let label_json = |l: FaceLabel| -> Value {
        match l {
            FaceLabel::Zero => json!("0"),
            FaceLabel::Infinity => json!("inf"),
            FaceLabel::Value(v) => json!({"re": v.re, "im": v.im}),
        }
    };
    let mut rotation = serde_json::Map::new();
    for (k, v) in &tree.rotation {
        rotation.insert(k.to_string(), json!(v));
    }
    json!({
        "vertices": vertices.iter().map(|v| json!({
            "id": v.id,
            "label": if v.label == VertexLabel::Cross { "x" } else { "o" },
            "real": v.on_real_axis,
            "conj": v.conj_partner,
        })).collect::<Vec<_>>(),
        "edges": edges.iter().map(|e| json!({
            "id": e.id,
            "ends": [e.ends.0, e.ends.1],
        })).collect::<Vec<_>>(),
        "rotation": Value::Object(rotation),
        "faces": tree.faces.iter().map(|f| json!({
            "label": label_json(f.label),
            "boundary": f.boundary,
        })).collect::<Vec<_>>(),
    })
}

fn want<'a>(v: &'a Value, key: &str, pointer: &str) -> Result<&'a Value, JsonViolation> {
    v.get(key).ok_or_else(|| JsonViolation {
        pointer: format!("{pointer}/{key}"),
        what: "missing field".into(),
    })
}

fn want_i64(v: &Value, pointer: &str) -> Result<i64, JsonViolation> {
    v.as_i64().ok_or_else(|| JsonViolation {
        pointer: pointer.into(),
        what: "expected an integer".into(),
    })
}

fn want_array<'a>(v: &'a Value, pointer: &str) -> Result<&'a Vec<Value>, JsonViolation> {
    v.as_array().ok_or_else(|| JsonViolation {
        pointer: pointer.into(),
        what: "expected an array".into(),
    })
}

pub fn from_json(v: &Value) -> Result<LabeledTree, JsonViolation> {
    if !v.is_object() {
        return Err(JsonViolation {
            pointer: "".into(),
            what: "expected an object".into(),
        });
    }
    let mut vertices = Vec::new();
    for (i, item) in want_array(want(v, "vertices", "")?, "/vertices")?
        .iter()
        .enumerate()
    {
        let p = format!("/vertices/{i}");
        let id = want_i64(want(item, "id", &p)?, &format!("{p}/id"))?;
        let label = match want(item, "label", &p)?.as_str() {
            Some("x") => VertexLabel::Cross,
            Some("o") => VertexLabel::Circle,
            _ => {
                return Err(JsonViolation {
                    pointer: format!("{p}/label"),
                    what: "expected \"x\" or \"o\"".into(),
                })
            }
        };
        let on_real_axis = want(item, "real", &p)?.as_bool().ok_or_else(|| JsonViolation {
            pointer: format!("{p}/real"),
            what: "expected a boolean".into(),
        })?;
        let conj_partner = want_i64(want(item, "conj", &p)?, &format!("{p}/conj"))?;
        vertices.push(Vertex {
            id,
            label,
            on_real_axis,
            conj_partner,
        });
    }

    let mut edges = Vec::new();
    for (i, item) in want_array(want(v, "edges", "")?, "/edges")?.iter().enumerate() {
        let p = format!("/edges/{i}");
        let id = want_i64(want(item, "id", &p)?, &format!("{p}/id"))?;
        let ends = want_array(want(item, "ends", &p)?, &format!("{p}/ends"))?;
        if ends.len() != 2 {
            return Err(JsonViolation {
                pointer: format!("{p}/ends"),
                what: "expected exactly two endpoints".into(),
            });
        }
        let a = want_i64(&ends[0], &format!("{p}/ends/0"))?;
        let b = want_i64(&ends[1], &format!("{p}/ends/1"))?;
        edges.push(Edge { id, ends: (a, b) });
    }

    let mut rotation = BTreeMap::new();
    let rot = want(v, "rotation", "")?.as_object().ok_or_else(|| JsonViolation {
        pointer: "/rotation".into(),
        what: "expected an object".into(),
    })?;
    for (key, val) in rot {
        let p = format!("/rotation/{key}");
        let vid: i64 = key.parse().map_err(|_| JsonViolation {
            pointer: p.clone(),
            what: "key is not a vertex id".into(),
        })?;
        let list = want_array(val, &p)?;
        let mut sigma = Vec::new();
        for (j, e) in list.iter().enumerate() {
            sigma.push(want_i64(e, &format!("{p}/{j}"))?);
        }
        rotation.insert(vid, sigma);
    }

    let mut faces = Vec::new();
    for (i, item) in want_array(want(v, "faces", "")?, "/faces")?.iter().enumerate() {
        let p = format!("/faces/{i}");
        let label_v = want(item, "label", &p)?;
        let label = if label_v.as_str() == Some("0") {
            FaceLabel::Zero
        } else if label_v.as_str() == Some("inf") {
            FaceLabel::Infinity
        } else if label_v.is_object() {
            let re = want(label_v, "re", &format!("{p}/label"))?
                .as_f64()
                .ok_or_else(|| JsonViolation {
                    pointer: format!("{p}/label/re"),
                    what: "expected a number".into(),
                })?;
            let im = want(label_v, "im", &format!("{p}/label"))?
                .as_f64()
                .ok_or_else(|| JsonViolation {
                    pointer: format!("{p}/label/im"),
                    what: "expected a number".into(),
                })?;
            FaceLabel::Value(cx(re, im))
        } else {
            return Err(JsonViolation {
                pointer: format!("{p}/label"),
                what: "expected \"0\", \"inf\", or {re, im}".into(),
            });
        };
        let blist = want_array(want(item, "boundary", &p)?, &format!("{p}/boundary"))?;
        let mut boundary = Vec::new();
        for (j, e) in blist.iter().enumerate() {
            boundary.push(want_i64(e, &format!("{p}/boundary/{j}"))?);
        }
        faces.push(Face { label, boundary });
    }

    Ok(LabeledTree {
        vertices,
        edges,
        rotation,
        faces,
    })
}

// ---------------------------------------------------------------------------
// Canonical encoding and isomorphism

fn encode_from(
    tree: &LabeledTree,
    view: &FaceView,
    v: i64,
    parent_edge: Option<i64>,
    start: usize,
) -> String {
    let sigma = &tree.rotation[&v];
    let deg = sigma.len();
    let vert = tree.vertex(v).unwrap();
    let mut s = String::new();
    s.push(if vert.label == VertexLabel::Cross { 'x' } else { 'o' });
    if vert.on_real_axis {
        s.push('r');
    }
    s.push('(');
    let begin = match parent_edge {
        Some(p) => sigma.iter().position(|&e| e == p).unwrap() + 1,
        None => start,
    };
    let count = if parent_edge.is_some() { deg - 1 } else { deg };
    for t in 0..count {
        let e = sigma[(begin + t) % deg];
        let lab = view
            .corner_label(v, e)
            .map(|l| l.tag())
            .unwrap_or_else(|| "?".into());
        s.push('[');
        s.push_str(&lab);
        s.push(']');
        let edge = tree.edge(e).unwrap();
        if edge.is_ray() {
            s.push('*');
        } else {
            let child = if edge.ends.0 == v { edge.ends.1 } else { edge.ends.0 };
            s.push_str(&encode_from(tree, view, child, Some(e), 0));
        }
    }
    if let Some(p) = parent_edge {
        let lab = view
            .corner_label(v, p)
            .map(|l| l.tag())
            .unwrap_or_else(|| "?".into());
        s.push('[');
        s.push_str(&lab);
        s.push(']');
    }
    s.push(')');
    s
}

/// Id-independent canonical form: minimum over all real-axis roots and all
/// rotation offsets of the labeled contour encoding.
pub fn canonical_encoding(tree: &LabeledTree) -> Result<String, TreeError> {
    let view = face_view(tree)?;
    let mut best: Option<String> = None;
    for v in tree.vertices.iter().filter(|v| v.on_real_axis) {
        let deg = tree.rotation.get(&v.id).map(|s| s.len()).unwrap_or(0);
        for start in 0..deg.max(1) {
            let enc = encode_from(tree, &view, v.id, None, start);
            if best.as_ref().map(|b| enc < *b).unwrap_or(true) {
                best = Some(enc);
            }
        }
    }
    best.ok_or(TreeError::Unclassifiable {
        why: "no real-axis vertex to root the encoding".into(),
    })
}

pub fn isomorphic(a: &LabeledTree, b: &LabeledTree) -> bool {
    match (canonical_encoding(a), canonical_encoding(b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn valid(m: u32) -> LabeledTree {
        builtin_tree(m).unwrap()
    }

    #[test]
    fn builtin_four_is_valid_and_has_four_values() {
        let tree = valid(4);
        let report = validate_tree(&tree, &builtin_celldec(4).unwrap());
        assert!(report.is_valid(), "violations: {:?}", report.violations);
        assert_eq!(count_singularities(&tree), 4);
        assert!(check_real_zeros_poles(&tree));
        let vals = tree.asymptotic_values();
        let want = [cx(0.0, -2.0), cx(0.0, -1.0), cx(0.0, 1.0), cx(0.0, 2.0)];
        assert_eq!(vals.len(), 4);
        for (a, b) in vals.iter().zip(want.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn builtin_six_and_eight_are_valid() {
        for m in [6u32, 8] {
            let tree = valid(m);
            let report = validate_tree(&tree, &builtin_celldec(m).unwrap());
            assert!(report.is_valid(), "m={m}: {:?}", report.violations);
            assert_eq!(count_singularities(&tree), m as usize);
            assert!(check_real_zeros_poles(&tree));
        }
    }

    #[test]
    fn builtin_rejects_odd_and_small_m() {
        for m in [0u32, 2, 3, 5, 7] {
            assert!(matches!(builtin_tree(m), Err(TreeError::InvalidM { .. })));
        }
    }

    #[test]
    fn face_count_matches_rays_and_euler() {
        let tree = valid(4);
        let rays = tree.edges.iter().filter(|e| e.is_ray()).count();
        assert_eq!(tree.faces.len(), rays);
        // Sphere convention counts the vertex at infinity.
        let euler = tree.edges.len() as i64 - (tree.vertices.len() as i64 + 1) + 2;
        assert_eq!(euler, rays as i64);
    }

    #[test]
    fn cross_cross_edge_is_not_bipartite() {
        let mut tree = valid(4);
        // Relabel a broom circle as a cross.
        let u = tree
            .vertices
            .iter()
            .find(|v| !v.on_real_axis && v.label == VertexLabel::Circle)
            .unwrap()
            .id;
        tree.vertices
            .iter_mut()
            .find(|v| v.id == u)
            .unwrap()
            .label = VertexLabel::Cross;
        let report = validate_tree(&tree, &builtin_celldec(4).unwrap());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NotBipartite { .. })));
    }

    #[test]
    fn conjugating_one_face_label_breaks_symmetry() {
        let mut tree = valid(4);
        for f in tree.faces.iter_mut() {
            if let FaceLabel::Value(v) = f.label {
                if (v - cx(0.0, 1.0)).norm() < 1e-12 {
                    f.label = FaceLabel::Value(cx(0.0, -1.0));
                    break;
                }
            }
        }
        let report = validate_tree(&tree, &builtin_celldec(4).unwrap());
        assert!(!report.is_valid());
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::AsymmetricFace { .. } | Violation::DuplicateLabelAtVertex { .. }
        )));
    }

    #[test]
    fn starving_a_vertex_of_tracts_fails_the_reality_check() {
        let mut tree = valid(4);
        for f in tree.faces.iter_mut() {
            match f.label {
                FaceLabel::Zero => f.label = FaceLabel::Value(cx(0.0, 3.0)),
                FaceLabel::Infinity => f.label = FaceLabel::Value(cx(0.0, -3.0)),
                _ => {}
            }
        }
        assert!(!check_real_zeros_poles(&tree));
    }

    #[test]
    fn split_turns_four_into_six() {
        let tree = valid(4);
        // The eligible vertex is a twig: non-real cross adjacent to exactly
        // the 0 and infinity tracts.
        let twig = tree
            .vertices
            .iter()
            .find(|v| {
                !v.on_real_axis
                    && v.label == VertexLabel::Cross
                    && split_tree(&tree, v.id).is_ok()
            })
            .expect("a twig is eligible")
            .id;
        let split = split_tree(&tree, twig).unwrap();
        assert_eq!(count_singularities(&split), 6);
        let report = validate_tree(&split, &builtin_celldec(6).unwrap());
        assert!(report.is_valid(), "{:?}", report.violations);
        assert!(check_real_zeros_poles(&split));
        assert!(isomorphic(&split, &valid(6)));
        // Fresh ids, same tree.
        assert_ne!(
            split.vertices.iter().map(|v| v.id).min(),
            valid(6).vertices.iter().map(|v| v.id).min()
        );
    }

    #[test]
    fn split_twice_reaches_m_eight() {
        let tree = valid(4);
        let twig = |t: &LabeledTree| {
            t.vertices
                .iter()
                .find(|v| !v.on_real_axis && split_tree(t, v.id).is_ok())
                .unwrap()
                .id
        };
        let once = split_tree(&tree, twig(&tree)).unwrap();
        let twice = split_tree(&once, twig(&once)).unwrap();
        assert_eq!(count_singularities(&twice), 8);
        assert!(validate_tree(&twice, &builtin_celldec(8).unwrap()).is_valid());
        assert!(isomorphic(&twice, &valid(8)));
    }

    #[test]
    fn split_rejects_real_axis_and_tract_rich_vertices() {
        let tree = valid(4);
        let real = tree.vertices.iter().find(|v| v.on_real_axis).unwrap().id;
        assert!(matches!(
            split_tree(&tree, real),
            Err(TreeError::IneligibleVertex { .. })
        ));
        let broom = tree
            .vertices
            .iter()
            .find(|v| !v.on_real_axis && v.label == VertexLabel::Circle)
            .unwrap()
            .id;
        assert!(matches!(
            split_tree(&tree, broom),
            Err(TreeError::IneligibleVertex { .. })
        ));
    }

    #[test]
    fn classification_of_the_builtin_family() {
        for m in [4u32, 6, 8, 10] {
            let r = classify(&valid(m)).unwrap();
            assert_eq!(r.case, Case::III);
            assert_eq!(r.m, m);
            assert_eq!(r.rho, (m - 1) as f64);
            assert_eq!(r.lambda, Some((m - 1) as f64));
        }
    }

    #[test]
    fn fixtures_classify_to_their_cases() {
        let two = case_ii_example();
        let report = validate_tree(&two, &CellDecompositionSpec::imaginary_ladder(1));
        assert!(report.is_valid(), "{:?}", report.violations);
        assert!(check_real_zeros_poles(&two));
        let r = classify(&two).unwrap();
        assert_eq!(r.case, Case::II);
        assert_eq!(r.rho, 1.5);

        let one = case_i_example();
        let report = validate_tree(&one, &CellDecompositionSpec::imaginary_ladder(1));
        assert!(report.is_valid(), "{:?}", report.violations);
        let r = classify(&one).unwrap();
        assert_eq!(r.case, Case::I);
        assert_eq!(r.rho, 2.0);
    }

    #[test]
    fn exp_like_tree_is_rejected_by_the_classifier() {
        let tree = exp_like_example();
        assert_eq!(count_singularities(&tree), 0);
        assert!(matches!(
            classify(&tree),
            Err(TreeError::Unclassifiable { .. })
        ));
    }

    #[test]
    fn sector_plans_match_the_published_table() {
        let p = sector_plan(Case::II, 2).unwrap();
        assert_eq!(p.rho, 1.5);
        let want = [(2.0 * PI / 3.0, cx(1.0, 0.0)), (4.0 * PI / 3.0, cx(0.0, -1.0))];
        for (s, (opening, e)) in p.sectors.iter().zip(want.iter()) {
            assert!((s.opening - opening).abs() < 1e-12);
            assert!((s.rotation - e).norm() < 1e-12);
        }
        assert_eq!(p.sectors[0].kind, SectorKind::Small);

        let p = sector_plan(Case::I, 3).unwrap();
        assert_eq!(p.rho, 3.0);
        for s in &p.sectors {
            assert!((s.opening - 2.0 * PI / 3.0).abs() < 1e-12);
            assert!((s.rotation - cx(-1.0, 0.0)).norm() < 1e-12);
            assert_eq!(s.kind, SectorKind::Large);
        }

        let p = sector_plan(Case::III, 4).unwrap();
        assert_eq!(p.rho, 3.0);
        let want = [
            (PI / 3.0, cx(1.0, 0.0)),
            (2.0 * PI / 3.0, cx(0.0, -1.0)),
            (PI / 3.0, cx(-1.0, 0.0)),
            (2.0 * PI / 3.0, cx(0.0, 1.0)),
        ];
        for (s, (opening, e)) in p.sectors.iter().zip(want.iter()) {
            assert!((s.opening - opening).abs() < 1e-12);
            assert!((s.rotation - e).norm() < 1e-12);
        }
    }

    #[test]
    fn sector_openings_always_sum_to_a_full_turn() {
        let mut plans = Vec::new();
        for m in 1..=8u32 {
            plans.push(sector_plan(Case::I, m));
        }
        for m in 2..=8u32 {
            plans.push(sector_plan(Case::II, m));
        }
        for m in [4u32, 6, 8] {
            plans.push(sector_plan(Case::III, m));
        }
        for plan in plans {
            let plan = plan.unwrap();
            let total: f64 = plan.sectors.iter().map(|s| s.opening).sum();
            assert!((total - 2.0 * PI).abs() < 1e-12, "case {:?}", plan.case);
        }
        assert!(sector_plan(Case::III, 5).is_err());
        assert!(sector_plan(Case::III, 2).is_err());
    }

    #[test]
    fn json_round_trip_is_isomorphic() {
        for tree in [valid(4), valid(6), case_ii_example(), case_i_example()] {
            let encoded = to_json(&tree);
            let decoded = from_json(&encoded).unwrap();
            assert!(isomorphic(&tree, &decoded));
            assert_eq!(count_singularities(&tree), count_singularities(&decoded));
        }
    }

    #[test]
    fn json_errors_carry_pointers() {
        let mut v = to_json(&valid(4));
        v["vertices"][0]
            .as_object_mut()
            .unwrap()
            .remove("label");
        let err = from_json(&v).unwrap_err();
        assert_eq!(err.pointer, "/vertices/0/label");

        let mut v = to_json(&valid(4));
        v["faces"][0]["label"] = json!(42);
        let err = from_json(&v).unwrap_err();
        assert_eq!(err.pointer, "/faces/0/label");
    }

    #[test]
    fn canonical_encoding_ignores_ids() {
        let a = broom_chain(1, 0);
        let b = broom_chain(1, 500);
        assert!(isomorphic(&a, &b));
        assert!(!isomorphic(&a, &broom_chain(2, 0)));
    }
}
