//! Command-line surface: configuration ingestion, JSON/CSV emission, and
//! the regression self-test. All artifacts are byte-deterministic; timing
//! goes to stderr only.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::rc::Rc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qcb_core::cartan::{CartanDatum, DimVector, DominantSeq, WeightAnchor};
use qcb_core::falgebra::FAlgebra;
use qcb_core::hwmodule::HWModule;
use qcb_core::linalg::Matrix;
use qcb_core::report;
use qcb_core::rmatrix::{commutor, schur_weyl_demo, ybe_check, CommutorMatrix};
use qcb_core::tensorcb::{DiamondBasis, TensorModule, TensorVector};
use qcb_core::theta::{theta, ThetaComponent};
use qcb_core::{Error, Result};

#[derive(Parser)]
#[command(name = "qcb", version, about = "Exact canonical-basis and R-matrix engine")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Cartan-datum JSON file: {"vertices": ["1","2"], "edges": [["1","2",1]]}
    #[arg(long)]
    cartan: Option<PathBuf>,
    /// Dominant weights in vertex order, semicolon-separated: "a,b;c,d"
    #[arg(long, allow_hyphen_values = true)]
    weights: Option<String>,
    /// Depth box per vertex, comma-separated: "d1,d2"
    #[arg(long)]
    depth: Option<String>,
    /// Degree cap (theta) or factor count (braid)
    #[arg(long)]
    max_degree: Option<u32>,
    /// Output format; csv is available for matrix artifacts only
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build one highest-weight module and dump dims, pivot words, Gram matrices
    BuildModule(Common),
    /// Diamond (canonical) basis of a tensor product with transition matrices
    TensorCb(Common),
    /// Transition matrices of the diamond basis alone
    Transition(Common),
    /// Graded components of the quasi-R-matrix up to --max-degree
    Theta(Common),
    /// Verify the Yang-Baxter equation on a triple tensor product
    Ybe(Common),
    /// Braid relations and Hecke minimal polynomial for adjacent commutors
    Braid(Common),
    /// Shapovalov Gram matrices of one module, per weight space
    Gram(Common),
    /// Run the full regression suite; exit 0 iff every criterion passes
    Selftest(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (code, common) = match &cli.cmd {
        Cmd::BuildModule(c) => (run_build_module(c), c),
        Cmd::TensorCb(c) => (run_tensor_cb(c, true), c),
        Cmd::Transition(c) => (run_tensor_cb(c, false), c),
        Cmd::Theta(c) => (run_theta(c), c),
        Cmd::Ybe(c) => (run_ybe(c), c),
        Cmd::Braid(c) => (run_braid(c), c),
        Cmd::Gram(c) => (run_gram(c), c),
        Cmd::Selftest(c) => (run_selftest(c), c),
    };
    let _ = common;
    match code {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load_cartan(c: &Common) -> Result<CartanDatum> {
    let path = c
        .cartan
        .as_ref()
        .ok_or_else(|| Error::Config("--cartan <file> is required".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    CartanDatum::from_json_str(&text)
}

fn parse_weights(c: &Common, datum: &CartanDatum) -> Result<DominantSeq> {
    let text = c
        .weights
        .as_ref()
        .ok_or_else(|| Error::Config("--weights \"a,b;c,d\" is required".into()))?;
    DominantSeq::parse(text, datum.rank())
}

fn parse_depth(c: &Common, datum: &CartanDatum) -> Result<DimVector> {
    let text = c
        .depth
        .as_ref()
        .ok_or_else(|| Error::Config("--depth \"d1,d2\" is required".into()))?;
    let coords: Vec<u32> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| Error::Config(format!("bad depth coordinate {s:?}")))
        })
        .collect::<Result<_>>()?;
    if coords.len() != datum.rank() {
        return Err(Error::Config(format!(
            "depth has {} coordinates, expected {}",
            coords.len(),
            datum.rank()
        )));
    }
    // Word counts per degree grow multinomially in the box; fail fast on
    // boxes whose deepest weight space alone would exhaust memory.
    let mut words: u128 = 1;
    let mut placed: u128 = 0;
    for &d in &coords {
        for k in 1..=u128::from(d) {
            placed += 1;
            words = words.saturating_mul(placed) / k;
        }
    }
    if words > 5000 {
        return Err(Error::Depth(format!(
            "depth box {text:?} implies {words} words in one weight space; choose a smaller box"
        )));
    }
    Ok(DimVector::from_coords(&coords))
}

fn single_weight(seq: &DominantSeq) -> Result<&WeightAnchor> {
    if seq.weights.len() != 1 {
        return Err(Error::Config(format!(
            "expected exactly one weight, got {}",
            seq.weights.len()
        )));
    }
    Ok(&seq.weights[0])
}

fn require_json(c: &Common) -> Result<()> {
    if c.format == Format::Csv {
        return Err(Error::Config(
            "csv output is available for matrix artifacts only".into(),
        ));
    }
    Ok(())
}

fn emit(c: &Common, text: String) -> Result<ExitCode> {
    match &c.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn emit_json(c: &Common, value: &Value) -> Result<ExitCode> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    emit(c, text)
}

fn matrix_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows)
            .map(|i| Value::Array((0..m.cols).map(|j| m.at(i, j).to_json()).collect()))
            .collect(),
    )
}

/// Long-form CSV for a family of labeled matrices: block,row,col,value.
fn matrices_csv(blocks: &[(String, &Matrix)]) -> String {
    let mut out = String::from("block,row,col,value\n");
    for (label, m) in blocks {
        for i in 0..m.rows {
            for j in 0..m.cols {
                out.push_str(&format!("{label},{i},{j},{}\n", m.at(i, j)));
            }
        }
    }
    out
}

fn degree_label(datum: &CartanDatum, d: &DimVector) -> String {
    (0..datum.rank())
        .map(|i| d.get(i).to_string())
        .collect::<Vec<_>>()
        .join("+")
}

fn run_build_module(c: &Common) -> Result<ExitCode> {
    require_json(c)?;
    let datum = load_cartan(c)?;
    let seq = parse_weights(c, &datum)?;
    let anchor = single_weight(&seq)?;
    let depth = parse_depth(c, &datum)?;
    let module = HWModule::build(&datum, anchor, &depth)?;
    let v = json!({
        "schema_version": 1,
        "conventions": report::conventions(),
        "module": module.to_json(),
    });
    emit_json(c, &v)
}

fn run_gram(c: &Common) -> Result<ExitCode> {
    let datum = load_cartan(c)?;
    let seq = parse_weights(c, &datum)?;
    let anchor = single_weight(&seq)?;
    let depth = parse_depth(c, &datum)?;
    let module = HWModule::build(&datum, anchor, &depth)?;
    let spaces: Vec<(String, Matrix)> = module
        .spaces()
        .map(|(nu, s)| {
            let dim = s.dim();
            let mut m = Matrix::zeros(dim, dim);
            for a in 0..dim {
                for b in 0..dim {
                    *m.at_mut(a, b) = s.pivot_gram.at(a, b).clone();
                }
            }
            (degree_label(&datum, nu), m)
        })
        .collect();
    if c.format == Format::Csv {
        let refs: Vec<(String, &Matrix)> =
            spaces.iter().map(|(l, m)| (l.clone(), m)).collect();
        return emit(c, matrices_csv(&refs));
    }
    let v = json!({
        "schema_version": 1,
        "conventions": report::conventions(),
        "highest_weight": anchor.to_json(),
        "gram": spaces
            .iter()
            .map(|(l, m)| json!({"degree": l, "matrix": matrix_json(m)}))
            .collect::<Vec<_>>(),
    });
    emit_json(c, &v)
}

fn build_tensor(c: &Common) -> Result<(CartanDatum, TensorModule, DominantSeq)> {
    let datum = load_cartan(c)?;
    let seq = parse_weights(c, &datum)?;
    if seq.weights.len() < 2 {
        return Err(Error::Config("need at least two weights".into()));
    }
    let falg = Rc::new(FAlgebra::new(datum.clone()));
    let tm = TensorModule::build(falg, &seq.weights)?;
    Ok((datum, tm, seq))
}

fn vector_json(datum: &CartanDatum, x: &TensorVector) -> Value {
    Value::Array(
        x.coords
            .iter()
            .map(|(idx, coeff)| {
                json!({
                    "index": idx
                        .iter()
                        .map(|(d, k)| json!([degree_label(datum, d), *k]))
                        .collect::<Vec<_>>(),
                    "coeff": coeff.to_json(),
                })
            })
            .collect(),
    )
}

fn diamond_json(datum: &CartanDatum, basis: &DiamondBasis, full: bool) -> Value {
    Value::Array(
        basis
            .blocks
            .iter()
            .map(|b| {
                let mut obj = json!({
                    "total_degree": degree_label(datum, &b.total),
                    "transition": matrix_json(&b.pi),
                });
                if full {
                    let m = obj.as_object_mut().unwrap();
                    m.insert(
                        "pure_tensors".into(),
                        Value::Array(
                            b.indices
                                .iter()
                                .map(|idx| {
                                    json!({
                                        "elems": idx.elems,
                                        "degrees": idx
                                            .degrees
                                            .iter()
                                            .map(|d| degree_label(datum, d))
                                            .collect::<Vec<_>>(),
                                    })
                                })
                                .collect(),
                        ),
                    );
                    m.insert(
                        "diamond".into(),
                        Value::Array(
                            b.diamond.iter().map(|x| vector_json(datum, x)).collect(),
                        ),
                    );
                }
                obj
            })
            .collect(),
    )
}

fn run_tensor_cb(c: &Common, full: bool) -> Result<ExitCode> {
    let (datum, tm, seq) = build_tensor(c)?;
    let basis = tm.diamond_basis()?;
    if c.format == Format::Csv {
        let blocks: Vec<(String, &Matrix)> = basis
            .blocks
            .iter()
            .map(|b| (degree_label(&datum, &b.total), &b.pi))
            .collect();
        return emit(c, matrices_csv(&blocks));
    }
    let labels: Vec<String> = seq
        .weights
        .iter()
        .map(|w| {
            w.coords()
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join("+")
        })
        .collect();
    let mut v = json!({
        "schema_version": 1,
        "conventions": report::conventions(),
        "factors_left_to_right": labels,
        "grothendieck_label_right_to_left": labels.iter().rev().collect::<Vec<_>>(),
        "transition": diamond_json(&datum, &basis, full),
    });
    if full {
        let obj = v.as_object_mut().unwrap();
        obj.insert("positivity".into(), Value::Bool(basis.positivity()));
        obj.insert(
            "off_diagonal_in_v_inverse".into(),
            Value::Bool(basis.off_diagonal_in_v_inverse()),
        );
    }
    emit_json(c, &v)
}

fn run_theta(c: &Common) -> Result<ExitCode> {
    require_json(c)?;
    let datum = load_cartan(c)?;
    let cap = c.max_degree.unwrap_or(3);
    let falg = FAlgebra::new(datum.clone());
    let box_all = DimVector::from_coords(&vec![cap; datum.rank()]);
    let mut degrees: Vec<DimVector> = box_all
        .sub_degrees()
        .into_iter()
        .filter(|d| d.tr() <= cap)
        .collect();
    degrees.sort_by_key(|d| (d.tr(), d.clone()));
    let comps: Vec<ThetaComponent> = degrees
        .iter()
        .map(|d| theta(&falg, d))
        .collect::<Result<_>>()?;
    let v = json!({
        "schema_version": 1,
        "conventions": report::conventions(),
        "max_degree": cap,
        "components": comps
            .iter()
            .map(|comp| {
                json!({
                    "degree": degree_label(&datum, &comp.degree),
                    "terms": comp
                        .terms
                        .iter()
                        .map(|(minus, plus)| json!({
                            "minus": minus.to_json(),
                            "plus": plus.to_json(),
                        }))
                        .collect::<Vec<_>>(),
                })
            })
            .collect::<Vec<_>>(),
    });
    emit_json(c, &v)
}

fn commutor_summary(datum: &CartanDatum, r: &CommutorMatrix) -> Value {
    Value::Array(
        r.blocks()
            .iter()
            .map(|(total, b)| {
                json!({
                    "total_degree": degree_label(datum, total),
                    "dim": b.mat.cols,
                })
            })
            .collect(),
    )
}

fn run_ybe(c: &Common) -> Result<ExitCode> {
    require_json(c)?;
    let datum = load_cartan(c)?;
    let seq = parse_weights(c, &datum)?;
    if seq.weights.len() != 3 {
        return Err(Error::Config(format!(
            "ybe needs exactly three weights, got {}",
            seq.weights.len()
        )));
    }
    let falg = Rc::new(FAlgebra::new(datum.clone()));
    let started = std::time::Instant::now();
    let rep = ybe_check(&falg, &seq.weights)?;
    let pair = TensorModule::build(falg.clone(), &seq.weights[0..2].to_vec())?;
    let r01 = commutor(&pair)?;
    eprintln!("ybe checked in {:?}", started.elapsed());
    let v = json!({
        "schema_version": 1,
        "conventions": report::conventions(),
        "dim": rep.dim,
        "pass": rep.pass,
        "max_residual_degree": rep.max_residual_degree,
        "adjacent_commutor_blocks": commutor_summary(&datum, &r01),
    });
    emit_json(c, &v)
}

fn run_braid(c: &Common) -> Result<ExitCode> {
    require_json(c)?;
    let datum = load_cartan(c)?;
    let n = c.max_degree.unwrap_or(3) as usize;
    if n < 3 {
        return Err(Error::Config("braid needs at least three factors".into()));
    }
    let falg = Rc::new(FAlgebra::new(datum.clone()));
    let started = std::time::Instant::now();
    let rep = schur_weyl_demo(&falg, n)?;
    eprintln!("braid checked in {:?}", started.elapsed());
    let v = json!({
        "schema_version": 1,
        "conventions": report::conventions(),
        "factors": n,
        "braid_relations": rep.braid_ok,
        "minimal_polynomial_degree": rep.minpoly_degree,
        "minimal_polynomial_coeffs": rep.minpoly_coeffs,
    });
    emit_json(c, &v)
}

fn run_selftest(c: &Common) -> Result<ExitCode> {
    require_json(c)?;
    let report = report::selftest()?;
    let mut text = report.to_canonical_json();
    text.push('\n');
    for crit in &report.criteria {
        eprintln!(
            "criterion {} ({}): {}",
            crit.id,
            crit.name,
            if crit.pass { "PASS" } else { "FAIL" }
        );
    }
    emit(c, text)?;
    if report.pass() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(3))
    }
}
