//! JSON instance documents.
//!
//! Complex scalars are `[re, im]`, matrices are row-major nested arrays and
//! every dimension is written out. Loading validates through the domain
//! constructors; errors carry the field path.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cstar::{make_algebra, CStarAlgebra, StarHomomorphism};
use crate::error::{Error, ModuleAxiom, Result};
use crate::hilbmod::{make_left_action, make_module, HilbertModule, LeftAction};
use crate::morita::{make_imprimitivity, BimoduleParts, ImprimitivityBimodule};
use crate::numkit::{Matrix, Tolerance, Vector, C64};
use crate::reps::{AlgebraRep, ModuleRep};

pub type ComplexDoc = [f64; 2];
pub type MatrixDoc = Vec<Vec<ComplexDoc>>;
pub type VectorDoc = Vec<ComplexDoc>;
/// `d × d` array of algebra coordinate vectors.
pub type GramDoc = Vec<Vec<VectorDoc>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Algebra,
    Module,
    LeftAction,
    AlgebraRep,
    ModuleRep,
    Bimodule,
    Scenario,
}

impl Kind {
    pub fn parse(s: &str) -> Option<Kind> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceDoc {
    pub rel: f64,
    pub abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<ToleranceDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub kind: Kind,
    pub meta: Meta,
    pub payload: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraDoc {
    pub ambient_dim: usize,
    pub basis: Vec<MatrixDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleDoc {
    pub algebra: AlgebraDoc,
    pub dim: usize,
    pub action: Vec<MatrixDoc>,
    pub gram: GramDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeftActionDoc {
    pub algebra: AlgebraDoc,
    pub module: ModuleDoc,
    pub images: Vec<MatrixDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraRepDoc {
    pub algebra: AlgebraDoc,
    pub space_dim: usize,
    pub images: Vec<MatrixDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleRepDoc {
    pub module: ModuleDoc,
    pub base: AlgebraRepDoc,
    pub target_dim: usize,
    pub images: Vec<MatrixDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BimoduleDoc {
    pub left_algebra: AlgebraDoc,
    pub right_algebra: AlgebraDoc,
    pub carrier_dim: usize,
    pub left_action: Vec<MatrixDoc>,
    pub right_action: Vec<MatrixDoc>,
    pub left_gram: GramDoc,
    pub right_gram: GramDoc,
}

/// Input of the induce-and-return round trip: `Φ` represents `W` over the
/// right algebra; the optional `Ψ` represents `V` for the reverse half.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDoc {
    pub bimodule: BimoduleDoc,
    pub v: ModuleDoc,
    pub w: ModuleDoc,
    pub phi: ModuleRepDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<ModuleRepDoc>,
}

// ---- encoding ----

pub fn matrix_doc(m: &Matrix) -> MatrixDoc {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn vector_doc(v: &Vector) -> VectorDoc {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn gram_doc(g: &[Vector], d: usize) -> GramDoc {
    (0..d).map(|i| (0..d).map(|j| vector_doc(&g[i * d + j])).collect()).collect()
}

pub fn algebra_doc(a: &CStarAlgebra) -> AlgebraDoc {
    AlgebraDoc { ambient_dim: a.ambient_dim(), basis: a.basis().iter().map(matrix_doc).collect() }
}

pub fn module_doc(m: &HilbertModule) -> ModuleDoc {
    ModuleDoc {
        algebra: algebra_doc(m.algebra()),
        dim: m.dim(),
        action: m.action().iter().map(matrix_doc).collect(),
        gram: gram_doc(m.gram(), m.dim()),
    }
}

pub fn left_action_doc(r: &LeftAction) -> LeftActionDoc {
    LeftActionDoc { algebra: algebra_doc(r.algebra()), module: module_doc(r.module()), images: r.images().iter().map(matrix_doc).collect() }
}

pub fn algebra_rep_doc(r: &AlgebraRep) -> AlgebraRepDoc {
    AlgebraRepDoc { algebra: algebra_doc(r.algebra()), space_dim: r.space_dim(), images: r.images().iter().map(matrix_doc).collect() }
}

pub fn module_rep_doc(r: &ModuleRep) -> ModuleRepDoc {
    ModuleRepDoc {
        module: module_doc(r.module()),
        base: algebra_rep_doc(r.base()),
        target_dim: r.target_dim(),
        images: r.images().iter().map(matrix_doc).collect(),
    }
}

pub fn bimodule_doc(p: &BimoduleParts) -> BimoduleDoc {
    BimoduleDoc {
        left_algebra: algebra_doc(&p.left_algebra),
        right_algebra: algebra_doc(&p.right_algebra),
        carrier_dim: p.carrier_dim,
        left_action: p.left_action.iter().map(matrix_doc).collect(),
        right_action: p.right_action.iter().map(matrix_doc).collect(),
        left_gram: gram_doc(&p.left_gram, p.carrier_dim),
        right_gram: gram_doc(&p.right_gram, p.carrier_dim),
    }
}

impl InstanceDocument {
    pub fn new<T: Serialize>(kind: Kind, name: &str, seed: Option<u64>, payload: &T) -> Result<Self> {
        let payload = serde_json::to_value(payload).map_err(|e| Error::Parse { path: "payload".into(), message: e.to_string() })?;
        Ok(InstanceDocument { kind, meta: Meta { name: name.to_string(), seed, tolerance: None }, payload })
    }

    pub fn tolerance(&self) -> Result<Tolerance> {
        match self.meta.tolerance {
            Some(t) => Tolerance::new(t.rel, t.abs).map_err(|e| e.at("meta.tolerance")),
            None => Ok(Tolerance::default()),
        }
    }

    /// Decode the payload as `T`, checking the declared kind.
    pub fn payload<T: for<'de> Deserialize<'de>>(&self, expected: Kind) -> Result<T> {
        if self.kind != expected {
            return Err(Error::Parse { path: "kind".into(), message: format!("expected {expected:?}, found {:?}", self.kind) });
        }
        serde_json::from_value(self.payload.clone()).map_err(|e| Error::Parse { path: "payload".into(), message: e.to_string() })
    }

    /// Indented JSON with every innermost row of numbers on one line.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("documents serialize");
        let mut out = String::new();
        write_value(&value, 0, &mut out);
        out
    }
}

fn is_flat(v: &serde_json::Value) -> bool {
    use serde_json::Value;
    match v {
        Value::Array(items) => items.iter().all(|x| match x {
            Value::Array(inner) => inner.iter().all(|y| !y.is_array() && !y.is_object()),
            Value::Object(_) => false,
            _ => true,
        }),
        _ => true,
    }
}

fn write_value(v: &serde_json::Value, depth: usize, out: &mut String) {
    use serde_json::Value;
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Array(items) if !items.is_empty() && !is_flat(v) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(item, depth + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(item, depth + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        Value::Array(_) => out.push_str(&serde_json::to_string(v).expect("values serialize").replace(",", ", ")),
        _ => out.push_str(&serde_json::to_string(v).expect("values serialize")),
    }
}

pub fn load(path: &Path) -> Result<InstanceDocument> {
    let text = fs::read_to_string(path)?;
    parse(&text, &path.display().to_string())
}

pub fn parse(text: &str, origin: &str) -> Result<InstanceDocument> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        path: format!("{origin}:{}:{}", e.line(), e.column()),
        message: e.to_string(),
    })
}

pub fn save(doc: &InstanceDocument, path: &Path) -> Result<()> {
    fs::write(path, doc.to_json() + "\n")?;
    Ok(())
}

// ---- decoding ----

pub fn matrix_from(doc: &MatrixDoc, rows: usize, cols: usize, path: &str) -> Result<Matrix> {
    if doc.len() != rows || doc.iter().any(|r| r.len() != cols) {
        let found = doc.iter().map(|r| r.len().to_string()).collect::<Vec<_>>().join(",");
        return Err(Error::Shape(format!("expected {rows}x{cols}, found {} rows of lengths [{found}]", doc.len())).at(path));
    }
    Ok(Matrix::from_fn(rows, cols, |i, j| C64::new(doc[i][j][0], doc[i][j][1])))
}

pub fn vector_from(doc: &VectorDoc, len: usize, path: &str) -> Result<Vector> {
    if doc.len() != len {
        return Err(Error::Shape(format!("expected {len} entries, found {}", doc.len())).at(path));
    }
    Ok(Vector::from_iterator(len, doc.iter().map(|z| C64::new(z[0], z[1]))))
}

fn gram_from(doc: &GramDoc, d: usize, k: usize, path: &str) -> Result<Vec<Vector>> {
    if doc.len() != d || doc.iter().any(|r| r.len() != d) {
        return Err(Error::Shape(format!("expected a {d}x{d} Gram array")).at(path));
    }
    let mut out = Vec::with_capacity(d * d);
    for (i, row) in doc.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            out.push(vector_from(v, k, &format!("{path}[{i}][{j}]"))?);
        }
    }
    Ok(out)
}

fn matrices_from(docs: &[MatrixDoc], rows: usize, cols: usize, path: &str) -> Result<Vec<Matrix>> {
    docs.iter().enumerate().map(|(k, m)| matrix_from(m, rows, cols, &format!("{path}[{k}]"))).collect()
}

pub fn algebra_from(doc: &AlgebraDoc, path: &str, tol: Tolerance) -> Result<CStarAlgebra> {
    let n = doc.ambient_dim;
    let basis = matrices_from(&doc.basis, n, n, &format!("{path}.basis"))?;
    make_algebra(basis, tol).map_err(|e| e.at(path))
}

/// Reuse `known` when the document describes the same algebra, so that
/// objects built from one file share algebra identity.
fn algebra_in(doc: &AlgebraDoc, known: &[&CStarAlgebra], path: &str, tol: Tolerance) -> Result<CStarAlgebra> {
    let a = algebra_from(doc, path, tol)?;
    Ok(known.iter().find(|k| k.same_as(&a)).map(|k| (*k).clone()).unwrap_or(a))
}

pub fn module_from(doc: &ModuleDoc, known: &[&CStarAlgebra], path: &str, tol: Tolerance) -> Result<HilbertModule> {
    let a = algebra_in(&doc.algebra, known, &format!("{path}.algebra"), tol)?;
    let d = doc.dim;
    if doc.action.len() != a.dim() {
        return Err(Error::Shape(format!("{} action matrices for algebra dimension {}", doc.action.len(), a.dim())).at(format!("{path}.action")));
    }
    let action = matrices_from(&doc.action, d, d, &format!("{path}.action"))?;
    let gram = gram_from(&doc.gram, d, a.dim(), &format!("{path}.gram"))?;
    make_module(&a, d, action, gram, tol).map_err(|e| {
        let field = match &e {
            Error::ModuleAxiom { axiom: ModuleAxiom::RightAction | ModuleAxiom::Unit, .. } => "action",
            Error::ModuleAxiom { .. } => "gram",
            _ => return e.at(path),
        };
        e.at(format!("{path}.{field}"))
    })
}

pub fn left_action_from(doc: &LeftActionDoc, known: &[&CStarAlgebra], path: &str, tol: Tolerance) -> Result<LeftAction> {
    let a = algebra_in(&doc.algebra, known, &format!("{path}.algebra"), tol)?;
    let m = module_from(&doc.module, known, &format!("{path}.module"), tol)?;
    let d = m.dim();
    let images = matrices_from(&doc.images, d, d, &format!("{path}.images"))?;
    make_left_action(&a, &m, images, tol).map_err(|e| e.at(path))
}

pub fn algebra_rep_from(doc: &AlgebraRepDoc, known: &[&CStarAlgebra], path: &str, tol: Tolerance) -> Result<AlgebraRep> {
    let a = algebra_in(&doc.algebra, known, &format!("{path}.algebra"), tol)?;
    let h = doc.space_dim;
    let images = matrices_from(&doc.images, h, h, &format!("{path}.images"))?;
    let hom = StarHomomorphism::new(a, h, images).map_err(|e| e.at(path))?;
    AlgebraRep::new(hom, tol).map_err(|e| e.at(path))
}

/// Shapes and algebra identity only; the representation identity is a
/// numerical check left to the caller.
pub fn module_rep_from(doc: &ModuleRepDoc, known: &[&CStarAlgebra], path: &str, tol: Tolerance) -> Result<ModuleRep> {
    let m = module_from(&doc.module, known, &format!("{path}.module"), tol)?;
    let base = algebra_rep_from(&doc.base, &[m.algebra()], &format!("{path}.base"), tol)?;
    let images = matrices_from(&doc.images, doc.target_dim, base.space_dim(), &format!("{path}.images"))?;
    ModuleRep::new(m, base, doc.target_dim, images).map_err(|e| e.at(path))
}

pub fn bimodule_parts_from(doc: &BimoduleDoc, path: &str, tol: Tolerance) -> Result<BimoduleParts> {
    let left = algebra_from(&doc.left_algebra, &format!("{path}.left_algebra"), tol)?;
    let right = algebra_in(&doc.right_algebra, &[&left], &format!("{path}.right_algebra"), tol)?;
    let d = doc.carrier_dim;
    Ok(BimoduleParts {
        left_action: matrices_from(&doc.left_action, d, d, &format!("{path}.left_action"))?,
        right_action: matrices_from(&doc.right_action, d, d, &format!("{path}.right_action"))?,
        left_gram: gram_from(&doc.left_gram, d, left.dim(), &format!("{path}.left_gram"))?,
        right_gram: gram_from(&doc.right_gram, d, right.dim(), &format!("{path}.right_gram"))?,
        left_algebra: left,
        right_algebra: right,
        carrier_dim: d,
    })
}

pub fn bimodule_from(doc: &BimoduleDoc, path: &str, tol: Tolerance) -> Result<ImprimitivityBimodule> {
    make_imprimitivity(bimodule_parts_from(doc, path, tol)?, tol).map_err(|e| e.at(path))
}

/// A validated round-trip input.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub bimodule: ImprimitivityBimodule,
    pub v: HilbertModule,
    pub w: HilbertModule,
    pub phi: ModuleRep,
    pub psi: Option<ModuleRep>,
}

pub fn scenario_from(doc: &ScenarioDoc, path: &str, tol: Tolerance) -> Result<Scenario> {
    let bimodule = bimodule_from(&doc.bimodule, &format!("{path}.bimodule"), tol)?;
    let known = [bimodule.left_algebra(), bimodule.right_algebra()];
    let v = module_from(&doc.v, &known, &format!("{path}.v"), tol)?;
    let w = module_from(&doc.w, &known, &format!("{path}.w"), tol)?;
    let phi = module_rep_from(&doc.phi, &known, &format!("{path}.phi"), tol)?;
    let psi = doc.psi.as_ref().map(|p| module_rep_from(p, &known, &format!("{path}.psi"), tol)).transpose()?;
    Ok(Scenario { bimodule, v, w, phi, psi })
}

pub fn scenario_doc(s: &Scenario) -> ScenarioDoc {
    ScenarioDoc {
        bimodule: bimodule_doc(s.bimodule.parts()),
        v: module_doc(&s.v),
        w: module_doc(&s.w),
        phi: module_rep_doc(&s.phi),
        psi: s.psi.as_ref().map(module_rep_doc),
    }
}

/// Any validated payload.
#[derive(Debug, Clone)]
pub enum Loaded {
    Algebra(CStarAlgebra),
    Module(HilbertModule),
    LeftAction(LeftAction),
    AlgebraRep(AlgebraRep),
    ModuleRep(ModuleRep),
    Bimodule(ImprimitivityBimodule),
    Scenario(Box<Scenario>),
}

/// Decode and validate a document through the matching constructor.
pub fn validate(doc: &InstanceDocument) -> Result<Loaded> {
    let tol = doc.tolerance()?;
    let p = "payload";
    Ok(match doc.kind {
        Kind::Algebra => Loaded::Algebra(algebra_from(&doc.payload(Kind::Algebra)?, p, tol)?),
        Kind::Module => Loaded::Module(module_from(&doc.payload(Kind::Module)?, &[], p, tol)?),
        Kind::LeftAction => Loaded::LeftAction(left_action_from(&doc.payload(Kind::LeftAction)?, &[], p, tol)?),
        Kind::AlgebraRep => Loaded::AlgebraRep(algebra_rep_from(&doc.payload(Kind::AlgebraRep)?, &[], p, tol)?),
        Kind::ModuleRep => {
            let r = module_rep_from(&doc.payload(Kind::ModuleRep)?, &[], p, tol)?;
            let report = r.check(tol);
            if !report.passed {
                return Err(Error::NotRepresentation { residual: report.residual, threshold: report.threshold }.at(p));
            }
            Loaded::ModuleRep(r)
        }
        Kind::Bimodule => Loaded::Bimodule(bimodule_from(&doc.payload(Kind::Bimodule)?, p, tol)?),
        Kind::Scenario => Loaded::Scenario(Box::new(scenario_from(&doc.payload(Kind::Scenario)?, p, tol)?)),
    })
}
