//! Command results rendered as JSON or text.

use std::fmt::Write as _;
use std::path::Path;

use blockpinv_core::harness::{GenSpec, Generated, VerifyReport};
use blockpinv_core::{
    block_pinv as compute_block_pinv, certificate, complementary_pseudo_schur, condition_report, cpppt, pppt,
    pppt_pinv_vs_cpppt, pseudo_schur, BlockMatrix, Formula, Inclusion, Matrix, PinvCertificate, Pivot, Scalar, Tolerances, Verdict,
};
use serde_json::{json, Value};

use crate::io::FileOut;
use crate::{Failure, Format};

pub struct Output {
    json: Value,
    text: String,
    pub hypotheses_hold: bool,
    pub oracle_failure: Option<String>,
}

impl Output {
    fn new(json: Value, text: String) -> Self {
        Self {
            json,
            text,
            hypotheses_hold: true,
            oracle_failure: None,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("serializable") + "\n",
            Format::Text => self.text.clone(),
        }
    }
}

fn verdicts_json(list: &[(Inclusion, Verdict)]) -> Value {
    Value::Array(
        list.iter()
            .map(|(i, v)| {
                json!({
                    "inclusion": i,
                    "statement": i.statement(),
                    "holds": v.holds,
                    "residual": v.residual,
                    "threshold": v.threshold,
                    "marginal": v.marginal,
                })
            })
            .collect(),
    )
}

/// A diagnostic magnitude; exact backends only distinguish zero from nonzero.
fn magnitude<T: Scalar>(x: f64) -> String {
    match (T::EXACT, x == 0.0) {
        (true, true) => "zero".into(),
        (true, false) => "nonzero".into(),
        (false, _) => format!("{x:.3e}"),
    }
}

fn verdicts_text<T: Scalar>(out: &mut String, list: &[(Inclusion, Verdict)]) {
    for (i, v) in list {
        let _ = writeln!(
            out,
            "  {:<14} {:<5} residual={}{}  {}",
            i.name(),
            v.holds,
            magnitude::<T>(v.residual),
            if v.marginal { " (marginal)" } else { "" },
            i.statement()
        );
    }
}

fn certificate_text<T: Scalar>(cert: &PinvCertificate) -> String {
    let r: Vec<String> = [cert.r1, cert.r2, cert.r3, cert.r4].iter().map(|&x| magnitude::<T>(x)).collect();
    format!("Penrose residuals {} (bound {})", r.join(" "), magnitude::<T>(cert.bound))
}

fn matrix_text(out: &mut String, label: &str, m: &Matrix<impl Scalar>) {
    let _ = writeln!(out, "{label} ({}x{}):", m.rows(), m.cols());
    for line in m.to_string().lines() {
        let _ = writeln!(out, "  {line}");
    }
}

pub fn pinv<T: Scalar>(m: &Matrix<T>, tol: &Tolerances) -> Result<Output, Failure> {
    let x = T::pinv(m, tol);
    let cert = certificate(m, &x, tol)?;
    let rank = T::rank(m, tol);
    let mut text = String::new();
    matrix_text(&mut text, "pinv", &x);
    let _ = writeln!(
        text,
        "rank {rank}; {}",
        certificate_text::<T>(&cert)
    );
    let mut out = Output::new(
        json!({
            "command": "pinv",
            "backend": T::BACKEND,
            "rank": rank,
            "pinv": FileOut::plain(&x),
            "certificate": cert,
        }),
        text,
    );
    if !cert.holds() {
        out.oracle_failure = Some(format!("Penrose certificate failed: max residual {:.3e}", cert.max_residual()));
    }
    Ok(out)
}

pub fn schur<T: Scalar>(mb: &BlockMatrix<T>, pivot: Pivot, tol: &Tolerances) -> Output {
    let res = match pivot {
        Pivot::A => pseudo_schur(mb, tol),
        Pivot::D => complementary_pseudo_schur(mb, tol),
    };
    let label = match pivot {
        Pivot::A => "F = D - C pinv(A) B",
        Pivot::D => "G = A - B pinv(D) C",
    };
    let mut text = String::new();
    matrix_text(&mut text, label, &res.value);
    let _ = writeln!(text, "hypotheses (independence of the chosen {{1}}-inverse):");
    verdicts_text::<T>(&mut text, &res.hypotheses);
    let mut out = Output::new(
        json!({
            "command": "schur",
            "backend": T::BACKEND,
            "relative_to": res.relative_to,
            "value": FileOut::plain(&res.value),
            "hypotheses": verdicts_json(&res.hypotheses),
            "sound": res.hypotheses_hold(),
        }),
        text,
    );
    out.hypotheses_hold = res.hypotheses_hold();
    out
}

pub fn ppt<T: Scalar>(mb: &BlockMatrix<T>, pivot: Pivot, tol: &Tolerances) -> Output {
    let (value, set, label) = match pivot {
        Pivot::A => (pppt(mb, tol), &Inclusion::A_RANGE, "pppt(M, A)"),
        Pivot::D => (cpppt(mb, tol), &Inclusion::D_RANGE, "cpppt(M, D)"),
    };
    let hypotheses = condition_report(mb, tol).subset(set);
    let hold = hypotheses.iter().all(|(_, v)| v.holds);
    let mut text = String::new();
    matrix_text(&mut text, label, value.whole());
    let _ = writeln!(text, "split ({}, {})", value.row_split(), value.col_split());
    let _ = writeln!(text, "hypotheses:");
    verdicts_text::<T>(&mut text, &hypotheses);
    let mut out = Output::new(
        json!({
            "command": "ppt",
            "backend": T::BACKEND,
            "relative_to": pivot,
            "value": FileOut::block(&value),
            "hypotheses": verdicts_json(&hypotheses),
            "sound": hold,
        }),
        text,
    );
    out.hypotheses_hold = hold;
    out
}

pub fn block_pinv<T: Scalar>(mb: &BlockMatrix<T>, formula: Formula, tol: &Tolerances) -> Output {
    let res = compute_block_pinv(mb, formula, tol);
    let oracle = T::pinv(mb.whole(), tol);
    let agrees = res.value.approx_eq(&oracle, tol.eq);
    let cert = &res.certificate;
    let mut text = String::new();
    matrix_text(&mut text, &format!("block pinv ({})", json!(formula).as_str().unwrap_or("")), &res.value);
    let _ = writeln!(
        text,
        "sound {}; agrees with pinv(M) {}; {}",
        res.sound,
        agrees,
        certificate_text::<T>(cert)
    );
    let _ = writeln!(text, "hypotheses:");
    verdicts_text::<T>(&mut text, &res.hypotheses_used);
    let mut out = Output::new(
        json!({
            "command": "block-pinv",
            "backend": T::BACKEND,
            "formula": formula,
            "value": FileOut::plain(&res.value),
            "hypotheses": verdicts_json(&res.hypotheses_used),
            "sound": res.sound,
            "certificate": cert,
            "agrees_with_pinv": agrees,
        }),
        text,
    );
    out.hypotheses_hold = res.sound;
    if res.sound && !(cert.holds() && agrees) {
        out.oracle_failure = Some(format!(
            "block formula disagrees with its oracle under verified hypotheses (certificate {:.3e})",
            cert.max_residual()
        ));
    }
    out
}

pub fn check<T: Scalar>(mb: &BlockMatrix<T>, tol: &Tolerances) -> Output {
    let report = condition_report(mb, tol);
    let (m, n, s, p) = mb.dims();
    let all: Vec<(Inclusion, Verdict)> = report.iter().map(|(i, v)| (i, *v)).collect();
    let licenses = [
        ("schur_a", &Inclusion::A_RANGE[..]),
        ("schur_d", &Inclusion::D_RANGE[..]),
        ("via-F", &Inclusion::A_SIDE[..]),
        ("via-G", &Inclusion::D_SIDE[..]),
        ("mixed", &Inclusion::ALL[..]),
        ("pinv_h_equals_j", &Inclusion::PIVOT_PAIR[..]),
    ];
    let mut applicable = serde_json::Map::new();
    let mut text = String::new();
    let _ = writeln!(text, "blocks: A {m}x{n}, B {m}x{p}, C {s}x{n}, D {s}x{p}");
    let _ = writeln!(text, "inclusions:");
    verdicts_text::<T>(&mut text, &all);
    let _ = writeln!(text, "applicable:");
    for (name, set) in licenses {
        let failed = report.failed(set);
        applicable.insert(name.into(), json!({ "holds": failed.is_empty(), "failed": failed }));
        let why: Vec<&str> = failed.iter().map(|i| i.name()).collect();
        let _ = writeln!(
            text,
            "  {name:<16} {}",
            if failed.is_empty() { "yes".to_string() } else { format!("no (failing: {})", why.join(", ")) }
        );
    }
    let cmp = pppt_pinv_vs_cpppt(mb, tol);
    let _ = writeln!(text, "pinv(H) = J: {} (|pinv(H) - J| {})", cmp.equal, magnitude::<T>(cmp.residual));
    let mut out = Output::new(
        json!({
            "command": "check",
            "backend": T::BACKEND,
            "dims": { "m": m, "n": n, "s": s, "p": p },
            "inclusions": report,
            "applicable": applicable,
            "pinv_h_equals_j": cmp.equal,
            "pinv_h_minus_j": cmp.residual,
        }),
        text,
    );
    out.hypotheses_hold = report.holds_all(&Inclusion::ALL);
    out
}

pub fn verify(report: VerifyReport) -> Output {
    let mut out = Output::new(json!(report), format!("{report}\n"));
    if !report.all_passed() {
        out.oracle_failure = Some("verification failures".into());
    }
    out
}

pub fn generated<T: Scalar>(g: &Generated<T>, spec: &GenSpec, path: &Path, tol: &Tolerances) -> Output {
    let report = condition_report(&g.block, tol);
    let required: Vec<(Inclusion, Verdict)> = spec.require.iter().map(|i| (*i, *report.get(*i))).collect();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "wrote {} ({} backend, strategy {}, {} rejected draws)",
        path.display(),
        T::BACKEND,
        json!(g.strategy).as_str().unwrap_or(""),
        g.rejects
    );
    matrix_text(&mut text, "M", g.block.whole());
    let _ = writeln!(text, "split ({}, {})", g.block.row_split(), g.block.col_split());
    if !required.is_empty() {
        let _ = writeln!(text, "required inclusions:");
        verdicts_text::<T>(&mut text, &required);
    }
    Output::new(
        json!({
            "command": "gen",
            "backend": T::BACKEND,
            "output": path.display().to_string(),
            "spec": spec,
            "strategy": g.strategy,
            "rejects": g.rejects,
            "inclusions": report,
        }),
        text,
    )
}
