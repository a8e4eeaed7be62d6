//! Report assembly and rendering. Complex numbers are `[re, im]`, matrices are
//! row-major nested arrays; nothing here depends on the clock.

use std::fmt::Write as _;

use bmv_core::bit_antibit::BitAntibitRun;
use bmv_core::fermion_ssr::CountRow;
use bmv_core::ising_anyon::{AnyonCheckpoint, AnyonState};
use bmv_core::verify::{CriterionResult, Expectation, Relation};
use bmv_core::{purity, Correlation, OperatorMatrix, ProtocolTrace, StateVector, WitnessReport};
use serde::Serialize;

pub type Complex = [f64; 2];
pub type Matrix = Vec<Vec<Complex>>;

pub fn matrix(m: &OperatorMatrix) -> Matrix {
    m.rows()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn vector(v: &StateVector) -> Vec<Complex> {
    v.amplitudes().iter().map(|z| [z.re, z.im]).collect()
}

fn anyon_vector(s: &AnyonState) -> Vec<Complex> {
    s.amplitudes().iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Debug, Serialize)]
pub struct Shapes {
    pub center: Vec<Complex>,
    pub left: Vec<Complex>,
    pub right: Vec<Complex>,
}

#[derive(Debug, Serialize)]
pub struct StepReport {
    pub label: String,
    pub mediator: Matrix,
    pub mediator_purity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<Complex>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shapes: Option<Shapes>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allowed: Option<bool>,
}

#[derive(Debug, Serialize)]
pub struct WitnessSection {
    pub initial: WitnessReport,
    #[serde(rename = "final")]
    pub final_: WitnessReport,
    pub key_correlation: Correlation,
    pub marginals: [Matrix; 2],
    pub final_matter: Vec<Complex>,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub model: &'static str,
    pub steps: Vec<StepReport>,
    pub mediator_states: Vec<Matrix>,
    pub witness: WitnessSection,
    pub expected: Vec<Expectation>,
    pub pass: bool,
}

/// Model-specific extras attached to each step.
pub enum StepExtras<'a> {
    None,
    Anyon(&'a [AnyonCheckpoint]),
    BitAntibit(&'a BitAntibitRun),
}

impl RunReport {
    pub fn new(
        trace: &ProtocolTrace,
        extras: StepExtras<'_>,
        expected: Vec<Expectation>,
        trace_steps: bool,
    ) -> Self {
        let steps = trace
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let shapes = match (&extras, trace_steps) {
                    (StepExtras::Anyon(cps), true) => Some(Shapes {
                        center: anyon_vector(&cps[i].center),
                        left: anyon_vector(&cps[i].left),
                        right: anyon_vector(&cps[i].right),
                    }),
                    _ => None,
                };
                let allowed = match &extras {
                    StepExtras::BitAntibit(run) => Some(run.certificates[i].is_some()),
                    _ => None,
                };
                StepReport {
                    label: s.label.clone(),
                    mediator: matrix(&s.mediator),
                    mediator_purity: purity(&s.mediator).unwrap_or(f64::NAN),
                    state: trace_steps.then(|| vector(&s.state)),
                    shapes,
                    allowed,
                }
            })
            .collect();
        let pass = expected.iter().all(|e| e.pass);
        Self {
            model: trace.model.name(),
            steps,
            mediator_states: trace.steps.iter().map(|s| matrix(&s.mediator)).collect(),
            witness: WitnessSection {
                initial: trace.initial_report.clone(),
                final_: trace.final_report.clone(),
                key_correlation: trace.key_correlation.clone(),
                marginals: [matrix(&trace.marginals[0]), matrix(&trace.marginals[1])],
                final_matter: vector(&trace.final_matter),
            },
            expected,
            pass,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Decomposability {
    pub target: &'static str,
    pub residual: f64,
    pub decomposable: bool,
}

#[derive(Debug, Serialize)]
pub struct TomographyReport {
    pub rows: Vec<CountRow>,
    pub decomposability: Decomposability,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub eps: f64,
    pub criteria: Vec<CriterionResult>,
    pub pass: bool,
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn relation(r: Relation) -> &'static str {
    match r {
        Relation::Near => "near",
        Relation::Above => "above",
    }
}

fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

fn expectation_row(section: &str, e: &Expectation) -> Vec<String> {
    vec![
        section.to_string(),
        e.name.clone(),
        String::new(),
        String::new(),
        e.value.to_string(),
        String::new(),
        e.target.to_string(),
        relation(e.relation).to_string(),
        e.tolerance.to_string(),
        e.pass.to_string(),
    ]
}

fn matrix_rows(section: &str, name: &str, m: &Matrix) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for (i, row) in m.iter().enumerate() {
        for (j, [re, im]) in row.iter().enumerate() {
            out.push(vec![
                section.to_string(),
                name.to_string(),
                i.to_string(),
                j.to_string(),
                re.to_string(),
                im.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ]);
        }
    }
    out
}

const RUN_CSV_HEADER: [&str; 10] = [
    "section",
    "name",
    "row",
    "col",
    "re",
    "im",
    "target",
    "relation",
    "tolerance",
    "pass",
];

impl RunReport {
    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let mut rows = Vec::new();
        for s in &self.steps {
            rows.extend(matrix_rows("mediator", &s.label, &s.mediator));
        }
        for (k, m) in self.witness.marginals.iter().enumerate() {
            rows.extend(matrix_rows("marginal", &format!("Q{}", k + 1), m));
        }
        for e in &self.expected {
            rows.push(expectation_row("expected", e));
        }
        rows.push(vec![
            "summary".into(),
            "pass".into(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            self.pass.to_string(),
        ]);
        csv_bytes(&RUN_CSV_HEADER, rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model: {}", self.model);
        for s in &self.steps {
            let _ = writeln!(
                out,
                "step {} (mediator purity {:.12})",
                s.label, s.mediator_purity
            );
            write_matrix(&mut out, &s.mediator);
            if let Some(state) = &s.state {
                let _ = writeln!(out, "  state: {}", format_vector(state));
            }
            if let Some(shapes) = &s.shapes {
                let _ = writeln!(out, "  center: {}", format_vector(&shapes.center));
                let _ = writeln!(out, "  left:   {}", format_vector(&shapes.left));
                let _ = writeln!(out, "  right:  {}", format_vector(&shapes.right));
            }
            if let Some(allowed) = s.allowed {
                let _ = writeln!(out, "  allowed state: {allowed}");
            }
        }
        let k = &self.witness.key_correlation;
        let _ = writeln!(
            out,
            "<{}> = {:.12}, <{}> = {:.12}, <{} {}> = {:.12}",
            k.a_label, k.mean_a, k.b_label, k.mean_b, k.a_label, k.b_label, k.joint
        );
        for (label, r) in [
            ("initial", &self.witness.initial),
            ("final", &self.witness.final_),
        ] {
            let _ = writeln!(
                out,
                "{label} matter: {} (max violation {:.3e}, pair {})",
                if r.entangled {
                    "entangled"
                } else {
                    "uncorrelated"
                },
                r.violation,
                r.violating_pair
                    .map_or("none".to_string(), |(i, j)| format!("({i}, {j})"))
            );
        }
        write_expectations(&mut out, &self.expected);
        let _ = writeln!(out, "overall: {}", verdict(self.pass));
        out
    }
}

impl TomographyReport {
    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let mut rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    format!("count k={}", r.k),
                    r.count.to_string(),
                    r.expected.to_string(),
                    r.matches.to_string(),
                ]
            })
            .collect();
        rows.push(vec![
            "residual".into(),
            self.decomposability.residual.to_string(),
            String::new(),
            (!self.decomposability.decomposable).to_string(),
        ]);
        csv_bytes(&["item", "value", "expected", "pass"], rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("  k  count  expected  match\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>3}  {:>5}  {:>8}  {}",
                r.k, r.count, r.expected, r.matches
            );
        }
        let _ = writeln!(
            out,
            "{}: residual {:.6}, decomposable {}",
            self.decomposability.target,
            self.decomposability.residual,
            self.decomposability.decomposable
        );
        let _ = writeln!(out, "overall: {}", verdict(self.pass));
        out
    }
}

impl VerifyReport {
    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let rows = self
            .criteria
            .iter()
            .flat_map(|c| {
                c.checks.iter().map(move |e| {
                    vec![
                        c.id.to_string(),
                        c.title.clone(),
                        e.name.clone(),
                        e.value.to_string(),
                        e.target.to_string(),
                        relation(e.relation).to_string(),
                        e.tolerance.to_string(),
                        e.pass.to_string(),
                    ]
                })
            })
            .collect();
        csv_bytes(
            &[
                "criterion",
                "title",
                "check",
                "value",
                "target",
                "relation",
                "tolerance",
                "pass",
            ],
            rows,
        )
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            let _ = writeln!(out, "{} {:>2}. {}", verdict(c.pass), c.id, c.title);
            for e in c.checks.iter().filter(|e| !e.pass) {
                let _ = writeln!(
                    out,
                    "       failed: {} (value {:e}, target {:e})",
                    e.name, e.value, e.target
                );
            }
        }
        let passed = self.criteria.iter().filter(|c| c.pass).count();
        let _ = writeln!(
            out,
            "{passed}/{} criteria passed at eps = {:e}",
            self.criteria.len(),
            self.eps
        );
        out
    }
}

fn format_complex([re, im]: Complex) -> String {
    format!("{re:+.6}{im:+.6}i")
}

fn format_vector(v: &[Complex]) -> String {
    v.iter()
        .map(|z| format_complex(*z))
        .collect::<Vec<_>>()
        .join(" ")
}

fn write_matrix(out: &mut String, m: &Matrix) {
    for row in m {
        let _ = writeln!(out, "  [{}]", format_vector(row));
    }
}

fn write_expectations(out: &mut String, expected: &[Expectation]) {
    for e in expected {
        let _ = writeln!(
            out,
            "{} {} (value {:e}, target {:e})",
            verdict(e.pass),
            e.name,
            e.value,
            e.target
        );
    }
}
