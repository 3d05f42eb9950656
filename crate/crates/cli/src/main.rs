use std::fmt::Write as _;
use std::process::ExitCode;

use acs_core::acstruct::{ChartStructure, JetSource};
use acs_core::dim4;
use acs_core::expr::{format_complex, parse, VarTable};
use acs_core::g2lab::{self, Algebra14, CaseTag};
use acs_core::models::{self, Model};
use acs_core::nijenhuis::{classify, nijenhuis_at, realize_dim4, PointTensor, LOW_CONFIDENCE};
use acs_core::nofor::{self, Candidate};
use acs_core::obstruct::{self, Dim8Mode, Dim8Numbers, ObstructionReport};
use acs_core::symbol::{char_variety, symbol_tower};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use num_rational::BigRational;
use serde_json::{json, Value};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "acs", version, about = "Local invariants of almost complex structures")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Opts {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Exit with status 3 when a result carries LOW_CONFIDENCE.
    #[arg(long, global = true)]
    strict: bool,
    /// Rank threshold.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Random samples for the characteristic variety.
    #[arg(long, global = true, default_value_t = 24)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Point for chart models, e.g. "z=0.1+0.2i, w=-1"; defaults to the origin.
    #[arg(long, global = true)]
    point: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check J² = −1 for a chart, or the tensor axioms for a point tensor.
    Validate { target: String },
    /// Nijenhuis tensor at a point.
    Nijenhuis { target: String },
    /// Pointwise orbit type.
    Classify { target: String },
    /// Dimensions of the symbol γ₁ and its prolongations.
    Symbol {
        target: String,
        #[arg(long, default_value_t = 3)]
        max_order: usize,
    },
    /// Characteristic variety and functional dimension.
    Charvar { target: String },
    /// Canonical frame of a dim-4 chart with nowhere-zero N.
    Estructure { target: String },
    /// Dim-4 structure with prescribed Im N spanned by ∂z + A∂w̄ + B∂w (coordinates z, w).
    Realize {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Chern number obstructions.
    Obstruct {
        #[command(subcommand)]
        which: ObstructCmd,
    },
    /// 14-dimensional bracket algebra on stabilizer ⊕ C³.
    Liealg {
        #[arg(long, default_value = "su3")]
        case: CaseTag,
        #[arg(long, default_value = "2")]
        k: String,
        /// Solve for k over the (∂̄z_a, ∂z_a, ∂z_b) triples instead.
        #[arg(long)]
        scan: bool,
        /// Also compute the Killing form (only when Jacobi holds).
        #[arg(long)]
        killing: bool,
    },
    /// Hermitian form, 2-form and (3,0)-form of an exact dim-3 tensor.
    Hermitian { target: String },
    /// List the built-in models and run their self-test.
    Models,
    /// Residuals of the symmetry system of the nofor model for (z, ζ, w) ↦ (Z, Ξ, W).
    NoforResidual {
        #[arg(long = "Z", default_value = "z")]
        z: String,
        #[arg(long = "Xi", default_value = "zeta")]
        xi: String,
        #[arg(long = "W", default_value = "w")]
        w: String,
        #[arg(long, default_value = "1")]
        c: String,
    },
}

#[derive(Subcommand)]
enum ObstructCmd {
    /// Closed 4-manifold with Euler characteristic χ and signature τ.
    Dim4 {
        #[arg(long, allow_hyphen_values = true)]
        chi: i64,
        #[arg(long, allow_hyphen_values = true)]
        tau: i64,
    },
    /// r CP² # s CP²-bar.
    Cp2sum {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        s: u64,
    },
    /// Type II surface data (m, n).
    Typeii {
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Closed 6-manifold.
    Dim6 {
        #[arg(long)]
        three_c1_zero: bool,
        #[arg(long)]
        c1_squared_zero: bool,
        #[arg(long, allow_hyphen_values = true)]
        c1c2: i64,
    },
    /// CP³ with c₁ = r·generator.
    Cp3 {
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
    },
    /// Closed 8-manifold from its Chern numbers.
    Dim8 {
        #[arg(long, default_value = "general")]
        mode: Dim8Mode,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        c1_4: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        c1_2c2: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        c1c3: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        c2_2: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        c4: i64,
        #[arg(long)]
        torsion_free: bool,
        /// Whether 3c₂ = −3q² holds for the chosen class q.
        #[arg(long)]
        q_relation: Option<bool>,
    },
}

enum Failure {
    Usage(String),
    Precondition(String),
}

type Res<T> = Result<T, Failure>;

fn pre(e: impl std::fmt::Display) -> Failure {
    Failure::Precondition(e.to_string())
}

/// Result of a command: text, JSON body, and whether LOW_CONFIDENCE was raised.
struct Output {
    text: String,
    json: Value,
    low_confidence: bool,
}

impl Output {
    fn new(text: String, json: Value) -> Self {
        Output { text, json, low_confidence: false }
    }
}

enum Target {
    Chart(ChartStructure, Option<Model>),
    Tensor(PointTensor, Option<Model>),
}

impl Target {
    fn model_json(&self) -> Value {
        let m = match self {
            Target::Chart(_, m) | Target::Tensor(_, m) => m,
        };
        match m {
            Some(m) => json!({ "name": m.name, "note": m.note, "expected": m.expected.to_string() }),
            None => Value::Null,
        }
    }
}

fn load(target: &str) -> Res<Target> {
    if let Some(name) = target.strip_prefix("models:") {
        let m = models::model(name).ok_or_else(|| Failure::Usage(format!("unknown model `{name}`; see `acs models`")))?;
        return Ok(match m.payload.clone() {
            models::ModelPayload::Chart(s) => Target::Chart(s, Some(m)),
            models::ModelPayload::Tensor(t) => Target::Tensor(t, Some(m)),
        });
    }
    let text = std::fs::read_to_string(target).map_err(|e| Failure::Usage(format!("cannot read `{target}`: {e}")))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| pre(format!("`{target}` is not JSON: {e}")))?;
    if v.get("J").is_some() {
        ChartStructure::from_json(&text).map(|s| Target::Chart(s, None)).map_err(pre)
    } else if v.get("N").is_some() {
        PointTensor::from_json(&text).map(|t| Target::Tensor(t, None)).map_err(pre)
    } else {
        Err(pre(format!("`{target}` has neither a \"J\" nor an \"N\" field")))
    }
}

fn point_for(s: &ChartStructure, opts: &Opts) -> Res<Vec<C64>> {
    match &opts.point {
        Some(p) => s.vars.parse_point(p).map_err(pre),
        None => Ok(vec![C64::new(0.0, 0.0); s.n()]),
    }
}

fn point_json(p: &[C64]) -> Value {
    json!(p.iter().map(|z| format_complex(*z)).collect::<Vec<_>>())
}

/// Tensor at the point in a J-adapted frame, or the tensor itself.
fn tensor_of(t: &Target, opts: &Opts) -> Res<PointTensor> {
    match t {
        Target::Tensor(t, _) => Ok(t.clone()),
        Target::Chart(s, _) => {
            let p = point_for(s, opts)?;
            let nv = nijenhuis_at(&s.jet_at(&p).map_err(pre)?).map_err(pre)?;
            Ok(PointTensor::from_antilinear(&nv.standard))
        }
    }
}

fn real_name(vars: &VarTable, k: usize) -> String {
    format!("{}({})", if k % 2 == 0 { "Re" } else { "Im" }, vars.names()[k / 2])
}

fn relations_text(t: &PointTensor) -> String {
    let mut out = String::new();
    for i in 0..t.n {
        for j in i + 1..t.n {
            let terms: Vec<String> = (0..t.n)
                .filter(|&k| t.get(i, j, k).norm() > 0.0)
                .map(|k| format!("{}*X{}", format_complex(t.get(i, j, k)), k + 1))
                .collect();
            if !terms.is_empty() {
                let _ = writeln!(out, "N(X{}, X{}) = {}", i + 1, j + 1, terms.join(" + "));
            }
        }
    }
    if out.is_empty() {
        out.push_str("N = 0\n");
    }
    out
}

fn obstruction_text(r: &ObstructionReport) -> String {
    let mut out = format!("{}: {}\n", r.context, format!("{:?}", r.verdict).to_uppercase());
    for c in &r.checks {
        let _ = writeln!(out, "  [{:?}] {}: {}", c.status, c.name, c.expression);
    }
    for n in &r.notes {
        let _ = writeln!(out, "  note: {n}");
    }
    out
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn run(cmd: &Cmd, opts: &Opts) -> Res<Output> {
    Ok(match cmd {
        Cmd::Validate { target } => {
            let t = load(target)?;
            let (ok, detail, body) = match &t {
                Target::Chart(s, _) => {
                    let v = s.validate();
                    let detail = v.iter().map(|x| format!("  {}: {} (sampled {:.3e})\n", x.entry, x.residual, x.max_sampled)).collect::<String>();
                    (v.is_empty(), detail, to_json(&v))
                }
                Target::Tensor(p, _) => match p.to_antilinear().check() {
                    Ok(()) => (true, String::new(), json!([])),
                    Err(e) => (false, format!("  {e}\n"), json!([e.to_string()])),
                },
            };
            let text = format!("{}\n{detail}", if ok { "valid" } else { "INVALID" });
            let out = Output::new(text, json!({ "valid": ok, "violations": body, "model": t.model_json() }));
            if !ok {
                return Err(Failure::Precondition(out.text));
            }
            out
        }
        Cmd::Nijenhuis { target } => {
            let t = load(target)?;
            match &t {
                Target::Tensor(p, _) => Output::new(relations_text(p), json!({ "tensor": p.to_file(None), "model": t.model_json() })),
                Target::Chart(s, _) => {
                    let p = point_for(s, opts)?;
                    let nv = nijenhuis_at(&s.jet_at(&p).map_err(pre)?).map_err(pre)?;
                    let d = 2 * s.n();
                    let mut text = format!("point {}\n", point_json(&p));
                    let mut values = Vec::new();
                    for a in 0..d {
                        for b in a + 1..d {
                            let v = nv.coords.basis_value(a, b);
                            if v.amax() > opts.tol {
                                let comps: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
                                let _ = writeln!(text, "N(d/d{}, d/d{}) = [{}]", real_name(&s.vars, a), real_name(&s.vars, b), comps.join(", "));
                                values.push(json!({ "a": a, "b": b, "value": v.as_slice() }));
                            }
                        }
                    }
                    let image = nv.image(opts.tol).complex_dim(opts.tol).map_err(pre)?;
                    let _ = writeln!(text, "complex rank of Im N: {image}");
                    Output::new(text, json!({ "point": point_json(&p), "values": values, "image_complex_dim": image, "model": t.model_json() }))
                }
            }
        }
        Cmd::Classify { target } => {
            let t = load(target)?;
            let r = classify(&tensor_of(&t, opts)?.to_antilinear(), opts.tol);
            let mut text = format!("{}, rImage={}\n", r.type_label, r.r_image);
            for f in &r.flags {
                let _ = writeln!(text, "flag: {f}");
            }
            for n in &r.notes {
                let _ = writeln!(text, "note: {n}");
            }
            let mut out = Output::new(text, json!({ "report": to_json(&r), "model": t.model_json() }));
            out.low_confidence = r.low_confidence();
            out
        }
        Cmd::Symbol { target, max_order } => {
            let t = load(target)?;
            let tower = symbol_tower(&tensor_of(&t, opts)?, *max_order).map_err(pre)?;
            let text = format!(
                "gamma dims {:?}\nfinite type: {}\nstabilized at: {}\n",
                tower.dims,
                tower.finite_type,
                tower.stabilized_at.map_or("-".into(), |k| k.to_string())
            );
            let mut out = Output::new(
                text,
                json!({
                    "dims": tower.dims,
                    "hilbert_values": tower.hilbert_values(),
                    "finite_type": tower.finite_type,
                    "stabilized_at": tower.stabilized_at,
                    "prolongation_residual": tower.prolongation_residual,
                    "low_confidence": tower.low_confidence,
                    "model": t.model_json(),
                }),
            );
            out.low_confidence = tower.low_confidence;
            out
        }
        Cmd::Charvar { target } => {
            let t = load(target)?;
            let r = char_variety(&tensor_of(&t, opts)?, opts.samples, opts.seed).map_err(pre)?;
            let p = r.p_complex.map_or("-inf (empty)".to_string(), |p| p.to_string());
            let mut text = format!("p = {p}, kernel rank = {}, zeta (real) = {}\n{}\n", r.kernel_rank_complex, r.zeta_real, r.phrase);
            for f in &r.flags {
                let _ = writeln!(text, "flag: {f}");
            }
            let low = r.flags.iter().any(|f| f == LOW_CONFIDENCE);
            let mut out = Output::new(text, json!({ "report": to_json(&r), "model": t.model_json() }));
            out.low_confidence = low;
            out
        }
        Cmd::Estructure { target } => {
            let Target::Chart(s, _) = load(target)? else {
                return Err(pre("estructure needs a chart model"));
            };
            let p = point_for(&s, opts)?;
            let e = dim4::e_structure(&s, &p, None).map_err(pre)?;
            let mut text = String::new();
            for (k, v) in e.vectors().iter().enumerate() {
                let comps: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
                let _ = writeln!(text, "xi{} = [{}]", k + 1, comps.join(", "));
            }
            let _ = writeln!(text, "determinant {:.6}, residuals: N13 {:.2e}, bracket {:.2e}, J {:.2e}", e.determinant, e.n13_residual, e.bracket_residual, e.j_residual);
            if e.sign_ambiguity {
                text.push_str("frame determined up to a global sign\n");
            }
            Output::new(text, to_json(&e))
        }
        Cmd::Realize { a, b } => {
            let v = dim4::zw();
            let pa = parse(a, &v).map_err(pre)?;
            let pb = parse(b, &v).map_err(pre)?;
            let p = match &opts.point {
                Some(s) => v.parse_point(s).map_err(pre)?,
                None => vec![C64::new(0.0, 0.0); 2],
            };
            let (r, _) = realize_dim4(&v, &pa, &pb, &p).map_err(pre)?;
            let c = |x: [f64; 2]| format_complex(C64::new(x[0], x[1]));
            let text = format!(
                "alpha = {}\nbeta = {}\nk = {}\nXi+ = {}\nIm N dim {} ; angle to distribution {:.3e}\n",
                c(r.alpha),
                c(r.beta),
                r.k,
                c(r.xi_plus),
                r.image_dim,
                r.image_angle
            );
            Output::new(text, to_json(&r))
        }
        Cmd::Obstruct { which } => {
            let r = match which {
                ObstructCmd::Dim4 { chi, tau } => obstruct::dim4_check(*chi, *tau),
                ObstructCmd::Cp2sum { r, s } => obstruct::cp2_sum_check(*r, *s),
                ObstructCmd::Typeii { m, n } => obstruct::type_ii_check(*m, *n),
                ObstructCmd::Dim6 { three_c1_zero, c1_squared_zero, c1c2 } => obstruct::dim6_check(*three_c1_zero, *c1_squared_zero, *c1c2),
                ObstructCmd::Cp3 { r } => obstruct::cp3_check(*r),
                ObstructCmd::Dim8 { mode, c1_4, c1_2c2, c1c3, c2_2, c4, torsion_free, q_relation } => {
                    let d = Dim8Numbers { c1_4: *c1_4, c1_2c2: *c1_2c2, c1c3: *c1c3, c2_2: *c2_2, c4: *c4, torsion_free: *torsion_free, q_relation: *q_relation };
                    obstruct::dim8_check(&d, *mode)
                }
            };
            Output::new(obstruction_text(&r), to_json(&r))
        }
        Cmd::Liealg { case, k, scan, killing } => {
            if *scan {
                let s = g2lab::k_scan();
                let mut text = String::new();
                let mut rows = Vec::new();
                for (label, polys, roots) in &s.pair_triples {
                    let _ = writeln!(text, "{label}: {roots}");
                    rows.push(json!({ "triple": label, "polynomials": polys.iter().map(|p| p.to_string()).collect::<Vec<_>>(), "roots": roots.to_string() }));
                }
                let _ = writeln!(text, "forced: {}\nall 364 triples: {}", s.forced, s.clearing);
                return Ok(Output::new(text, json!({ "pair_triples": rows, "forced": s.forced.to_string(), "clearing": s.clearing.to_string() })));
            }
            let k: BigRational = k.parse().map_err(|e| Failure::Usage(format!("bad rational k `{k}`: {e}")))?;
            let alg = Algebra14::build(*case, k);
            let rep = g2lab::jacobi_check(&alg);
            let mut text = format!("case {} k = {}: Jacobi {} ({} of {} triples fail)\n", rep.case, rep.k, if rep.pass { "holds" } else { "fails" }, rep.failures.len(), rep.checked);
            for t in &rep.key_triples {
                let _ = writeln!(text, "{}: dz/dzbar part {:?}, h part {:?}", t.label, t.m_residual, t.h_residual);
            }
            let mut body = to_json(&rep);
            if *killing {
                match g2lab::killing_form(&alg) {
                    Ok(kf) => {
                        let _ = writeln!(text, "Killing form signature {:?}, rank {}, h-block {:?}", kf.signature, kf.rank, kf.h_signature);
                        body["killing"] = json!({ "signature": kf.signature, "rank": kf.rank, "h_signature": kf.h_signature });
                    }
                    Err(e) => {
                        let _ = writeln!(text, "Killing form: {e}");
                    }
                }
            }
            Output::new(text, body)
        }
        Cmd::Hermitian { target } => {
            let t = load(target)?;
            let h = g2lab::hermitian_data(&tensor_of(&t, opts)?).map_err(pre)?;
            let text = format!(
                "signature {:?}\nsigma = {} dz1^dz2^dz3\nomega^3/3 = {}, (i/4) sigma^sigmabar = {}, difference {}\n",
                h.signature,
                h.sigma,
                h.omega_vol,
                h.sigma_vol,
                h.identity_residual()
            );
            let mut body = h.to_json();
            body["model"] = t.model_json();
            Output::new(text, body)
        }
        Cmd::Models => {
            let lines = models::self_test(opts.tol);
            let mut text = String::new();
            let mut rows = Vec::new();
            for (m, l) in models::catalog().iter().zip(&lines) {
                let _ = writeln!(text, "{:<9} {:<12} {:<22} {}  {}", m.name, format!("{:?}", m.kind()), l.got, if l.ok { "ok" } else { "MISMATCH" }, m.note);
                rows.push(json!({ "name": m.name, "kind": m.kind(), "note": m.note, "self_test": l }));
            }
            let ok = lines.iter().all(|l| l.ok);
            if !ok {
                return Err(Failure::Precondition(format!("{text}catalog self-test failed")));
            }
            Output::new(text, json!({ "models": rows }))
        }
        Cmd::NoforResidual { z, xi, w, c } => {
            let c = acs_core::expr::parse_complex_literal(c).ok_or_else(|| Failure::Usage(format!("bad complex constant `{c}`")))?;
            let cand = Candidate::parse(z, xi, w, c).map_err(pre)?;
            let r = nofor::nofor_residual(&cand);
            let mut text = String::new();
            for x in &r.residuals {
                let _ = writeln!(text, "{:<58} {}", x.name, if x.symbolic_zero { "0".to_string() } else { x.expression.clone() });
            }
            let _ = writeln!(text, "symmetry: {}", if r.is_symmetry { "yes" } else { "no" });
            Output::new(text, to_json(&r))
        }
    })
}

/// Self-test of the requested catalog entry, so a broken built-in is reported before use.
fn check_model(cmd: &Cmd, tol: f64) -> Res<()> {
    let target = match cmd {
        Cmd::Validate { target } | Cmd::Nijenhuis { target } | Cmd::Classify { target } | Cmd::Charvar { target } | Cmd::Estructure { target } | Cmd::Hermitian { target } => target,
        Cmd::Symbol { target, .. } => target,
        _ => return Ok(()),
    };
    let Some(name) = target.strip_prefix("models:") else { return Ok(()) };
    match models::self_test(tol).into_iter().find(|l| l.name == name) {
        Some(l) if !l.ok => Err(pre(format!("model `{name}` failed its self-test: expected {}, got {}", l.expected, l.got))),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let opts = &cli.opts;
    let result = check_model(&cli.cmd, 1e-9).and_then(|_| run(&cli.cmd, opts));
    match result {
        Ok(out) => {
            if opts.json {
                let mut body = json!({ "schema_version": SCHEMA_VERSION, "low_confidence": out.low_confidence });
                body["report"] = out.json;
                println!("{}", serde_json::to_string_pretty(&body).expect("json"));
            } else {
                print!("{}", out.text);
            }
            if opts.strict && out.low_confidence {
                eprintln!("{LOW_CONFIDENCE}");
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Precondition(m)) => {
            if opts.json {
                println!("{}", serde_json::to_string_pretty(&json!({ "schema_version": SCHEMA_VERSION, "error": m })).expect("json"));
            } else {
                eprintln!("precondition failed: {m}");
            }
            ExitCode::from(2)
        }
    }
}
