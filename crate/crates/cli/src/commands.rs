use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use fundist_core::commutant::{
    affine_commutant, commutes, is_balanced, is_commutative, is_saturated, mutual_commutant,
    Verdict,
};
use fundist_core::distribution::{
    classify, distribution_object, double_commutant_check, monad_laws, restriction_check,
    Classification, Context, ContextKind, FilterKind, MonadLawReport, TheoremCheck,
};
use fundist_core::finset::OpTable;
use fundist_core::rig::{is_boolean, opposite, validate_rig, FiniteRig};
use fundist_core::theory::ConcreteTheory;
use fundist_core::{default_max_arity, Error, Limits};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::report::{Exit, Failure, Inputs, Outcome, Report};
use crate::{
    CheckArgs, CheckKind, ContextArg, DistArgs, Global, ReportAllArgs, SliceArgs, TheoryArgs,
    TheoryKind,
};

pub type CommandResult = Result<Outcome, Box<(Option<Inputs>, Failure)>>;

type Generators = (usize, Vec<OpTable>);

/// What a command body produces before it is wrapped into a [`Report`].
struct Done {
    results: Value,
    exactness: String,
    exit: Exit,
    reason: Option<String>,
    lines: Vec<String>,
}

impl Done {
    fn pass(results: Value, exactness: impl Into<String>, lines: Vec<String>) -> Self {
        Done {
            results,
            exactness: exactness.into(),
            exit: Exit::Pass,
            reason: None,
            lines,
        }
    }

    /// Fails with `exit` unless `ok`.
    fn unless(mut self, ok: bool, exit: Exit, reason: &str) -> Self {
        if !ok {
            self.exit = exit;
            self.reason = Some(reason.to_string());
        }
        self
    }
}

fn run(command: &str, body: impl FnOnce(&mut Inputs) -> Result<Done, Failure>) -> CommandResult {
    let mut inputs = Inputs::default();
    match body(&mut inputs) {
        Ok(done) => {
            let report = Report::new(command, inputs, done.results, done.exactness);
            Ok(match done.reason {
                None => Outcome::pass(report, done.lines),
                Some(reason) => Outcome::fail(report, done.exit, &reason, done.lines),
            })
        }
        Err(failure) => Err(Box::new((Some(inputs), failure))),
    }
}

fn limits(global: &Global) -> Limits {
    let mut limits = Limits::default();
    if let Some(c) = global.max_candidates {
        limits.max_candidates = c;
    }
    limits
}

/// Arity bound for verdicts: the `--max-arity` flag, else the carrier default
/// capped at 2 (3 on two points) so checks finish interactively.
fn check_arity(global: &Global, carrier: usize) -> usize {
    global
        .max_arity
        .unwrap_or_else(|| default_max_arity(carrier).min(if carrier == 2 { 3 } else { 2 }))
}

fn read_file(path: &Path, inputs: &mut Inputs) -> Result<Vec<u8>, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    inputs.file(&path.display().to_string(), &bytes);
    Ok(bytes)
}

fn parse_rig(bytes: &[u8]) -> Result<FiniteRig, Failure> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Failure::input(format!("rig file is not UTF-8: {e}")))?;
    Ok(FiniteRig::from_json(text)?)
}

/// Reads and parses a rig, refusing it (exit 2) when an axiom fails.
fn load_rig(path: &Path, inputs: &mut Inputs) -> Result<FiniteRig, Failure> {
    let rig = parse_rig(&read_file(path, inputs)?)?;
    let report = validate_rig(&rig);
    if !report.passed() {
        let first = &report.violations[0];
        return Err(Failure::new(
            Exit::RigAxioms,
            "rig-axioms",
            format!(
                "rig {} violates {} at {:?} ({} violations)",
                rig.name(),
                first.axiom,
                first.witness,
                report.violations.len()
            ),
        ));
    }
    Ok(rig)
}

fn verdict_lines(v: &Verdict) -> Vec<String> {
    let mut lines = vec![format!(
        "{}: {} (arity ≤ {})",
        serde_json::to_value(v.kind)
            .expect("kind serializes")
            .as_str()
            .unwrap_or("?"),
        if v.holds { "holds" } else { "fails" },
        v.max_arity
    )];
    lines.push(format!(
        "  {:<5} {:>8} {:>8}  {:<14} comparison",
        "arity", "left", "right", "relation"
    ));
    for row in &v.arities {
        let relation = serde_json::to_value(row.relation).expect("relation serializes");
        lines.push(format!(
            "  {:<5} {:>8} {:>8}  {:<14} {}",
            row.arity,
            row.left,
            row.right,
            relation.as_str().unwrap_or("?"),
            row.comparison
        ));
    }
    for w in &v.witnesses {
        lines.push(format!(
            "  witness {}: arity {} table {:?}",
            w.label, w.arity, w.table
        ));
    }
    if !v.note.is_empty() {
        lines.push(format!("  note: {}", v.note));
    }
    lines
}

pub fn rig_validate(_global: &Global, path: &Path) -> CommandResult {
    run("rig validate", |inputs| {
        inputs.arg("path", path.display().to_string());
        let rig = parse_rig(&read_file(path, inputs)?)?;
        let report = validate_rig(&rig);
        let mut lines = vec![format!(
            "rig {}: {} elements, ring: {}, commutative: {}",
            rig.name(),
            rig.size(),
            report.is_ring,
            report.is_commutative
        )];
        if report.passed() {
            lines.push("all rig axioms hold".to_string());
        }
        for v in &report.violations {
            lines.push(format!("  violates {} at {:?}", v.axiom, v.witness));
        }
        let passed = report.passed();
        Ok(
            Done::pass(json!({ "rig": report }), "exhaustive", lines).unless(
                passed,
                Exit::RigAxioms,
                "rig-axioms",
            ),
        )
    })
}

#[derive(Deserialize)]
struct GeneratorFile {
    carrier: usize,
    generators: Vec<GeneratorEntry>,
}

#[derive(Deserialize)]
struct GeneratorEntry {
    arity: usize,
    table: Vec<u8>,
}

fn load_generators(path: &Path, inputs: &mut Inputs) -> Result<Generators, Failure> {
    let bytes = read_file(path, inputs)?;
    let file: GeneratorFile = serde_json::from_slice(&bytes)
        .map_err(|e| Failure::input(format!("generator JSON: {e}")))?;
    let ops = file
        .generators
        .into_iter()
        .map(|g| OpTable::new(file.carrier, g.arity, g.table))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok((file.carrier, ops))
}

fn theory_name(kind: TheoryKind) -> &'static str {
    match kind {
        TheoryKind::Full => "full",
        TheoryKind::Initial => "initial",
        TheoryKind::Mat => "mat",
        TheoryKind::MatOp => "mat-op",
        TheoryKind::MatAff => "mat-aff",
        TheoryKind::PointedMatOp => "pointed-mat-op",
        TheoryKind::Closure => "closure",
    }
}

/// Loads the rig (if any) and records the shared theory arguments.
fn theory_context(
    args: &TheoryArgs,
    global: &Global,
    inputs: &mut Inputs,
) -> Result<(Option<FiniteRig>, Option<Generators>), Failure> {
    inputs.arg("max_arity", global.max_arity);
    inputs.arg(
        "max_candidates",
        global.max_candidates.map(|c| c.to_string()),
    );
    if let Some(c) = args.carrier {
        inputs.arg("carrier", c);
    }
    let rig = match &args.rig {
        Some(p) => {
            inputs.arg("rig", p.display().to_string());
            Some(load_rig(p, inputs)?)
        }
        None => None,
    };
    let gens = match &args.generators {
        Some(p) => {
            inputs.arg("generators", p.display().to_string());
            Some(load_generators(p, inputs)?)
        }
        None => None,
    };
    Ok((rig, gens))
}

fn build_theory(
    kind: TheoryKind,
    args: &TheoryArgs,
    rig: Option<&FiniteRig>,
    gens: Option<&Generators>,
    global: &Global,
) -> Result<ConcreteTheory, Failure> {
    let need_rig =
        || rig.ok_or_else(|| Failure::input(format!("--theory {} needs --rig", theory_name(kind))));
    let carrier = || {
        args.carrier
            .or_else(|| rig.map(FiniteRig::size))
            .ok_or_else(|| {
                Failure::input(format!(
                    "--theory {} needs --carrier or --rig",
                    theory_name(kind)
                ))
            })
    };
    let limits = limits(global);
    let theory = match kind {
        TheoryKind::Full => ConcreteTheory::full(carrier()?)?,
        TheoryKind::Initial => ConcreteTheory::initial(carrier()?)?,
        TheoryKind::Mat => ConcreteTheory::mat(need_rig()?)?,
        TheoryKind::MatOp => ConcreteTheory::mat(&opposite(need_rig()?))?,
        TheoryKind::MatAff => {
            let mat = ConcreteTheory::mat(need_rig()?)?.with_limits(limits);
            ConcreteTheory::affine_core(Arc::new(mat))?
        }
        TheoryKind::PointedMatOp => ConcreteTheory::pointed_mat(need_rig()?)?,
        TheoryKind::Closure => {
            let (c, ops) =
                gens.ok_or_else(|| Failure::input("--theory closure needs --generators"))?;
            ConcreteTheory::closure(*c, ops.clone())?
        }
    };
    let theory = theory.with_limits(limits);
    Ok(match global.max_arity {
        Some(k) => theory.with_max_arity(k)?,
        None => theory,
    })
}

fn require_theory(args: &TheoryArgs) -> Result<TheoryKind, Failure> {
    args.theory
        .ok_or_else(|| Failure::input("--theory is required"))
}

pub fn theory_slice(global: &Global, args: &SliceArgs) -> CommandResult {
    run("theory slice", |inputs| {
        let kind = require_theory(&args.theory)?;
        inputs.arg("theory", theory_name(kind));
        inputs.arg("arity", args.arity);
        inputs.arg("dump", args.dump);
        let (rig, gens) = theory_context(&args.theory, global, inputs)?;
        let theory = build_theory(kind, &args.theory, rig.as_ref(), gens.as_ref(), global)?;
        let slice = theory.slice(args.arity)?;
        let merged = theory.duplicates_merged(args.arity).unwrap_or(0);
        let mut results = json!({
            "theory": theory.provenance(),
            "carrier": theory.carrier(),
            "arity": args.arity,
            "count": slice.len(),
            "presentation_rows_merged": merged,
        });
        let mut lines = vec![format!(
            "{}: {} operations of arity {} on {} points",
            theory.provenance(),
            slice.len(),
            args.arity,
            theory.carrier()
        )];
        if args.dump {
            results["tables"] = json!(slice.tables());
            lines.extend(slice.tables().iter().map(|t| format!("  {t:?}")));
        }
        Ok(Done::pass(results, "exact", lines))
    })
}

pub fn check(global: &Global, args: &CheckArgs) -> CommandResult {
    run("check", |inputs| {
        let name = serde_json::to_value(args.check_name()).expect("name serializes");
        inputs.arg("check", &name);
        let (rig, gens) = theory_context(&args.theory, global, inputs)?;
        let verdict = match args.check {
            CheckKind::MutualCommutant | CheckKind::AffineCommutant => {
                let rig = rig.ok_or_else(|| Failure::input("this check needs --rig"))?;
                let k = check_arity(global, rig.size());
                inputs.arg("arity_bound", k);
                if args.check == CheckKind::MutualCommutant {
                    mutual_commutant(&rig, k, limits(global))?
                } else {
                    affine_commutant(&rig, k, limits(global))?
                }
            }
            kind => {
                let tk = require_theory(&args.theory)?;
                inputs.arg("theory", theory_name(tk));
                let theory = build_theory(tk, &args.theory, rig.as_ref(), gens.as_ref(), global)?;
                let k = check_arity(global, theory.carrier()).min(theory.max_arity());
                inputs.arg("arity_bound", k);
                match kind {
                    CheckKind::Balanced => is_balanced(&theory, k)?,
                    CheckKind::Saturated => is_saturated(&theory, k)?,
                    CheckKind::Commutative => is_commutative(&theory, k)?,
                    _ => {
                        let ok = args
                            .other
                            .ok_or_else(|| Failure::input("--check commutes needs --other"))?;
                        inputs.arg("other", theory_name(ok));
                        let other =
                            build_theory(ok, &args.theory, rig.as_ref(), gens.as_ref(), global)?;
                        commutes(&theory, &other)?
                    }
                }
            }
        };
        let exactness = format!("bounded-arity-{}", verdict.max_arity);
        let lines = verdict_lines(&verdict);
        let holds = verdict.holds;
        Ok(
            Done::pass(json!({ "verdict": verdict }), exactness, lines).unless(
                holds,
                Exit::Theorem,
                "theorem-violation",
            ),
        )
    })
}

impl CheckArgs {
    fn check_name(&self) -> &'static str {
        match self.check {
            CheckKind::Balanced => "balanced",
            CheckKind::Saturated => "saturated",
            CheckKind::Commutative => "commutative",
            CheckKind::Commutes => "commutes",
            CheckKind::MutualCommutant => "mutual-commutant",
            CheckKind::AffineCommutant => "affine-commutant",
        }
    }
}

fn context_kind(arg: ContextArg) -> ContextKind {
    match arg {
        ContextArg::ScalarLinear => ContextKind::ScalarLinear,
        ContextArg::ScalarAffine => ContextKind::ScalarAffine,
        ContextArg::Initial => ContextKind::Initial,
    }
}

/// What classification must show, when the context has a known answer.
#[derive(Clone, Copy)]
enum Expected {
    /// Every element is a filter; there are `2^k` of them.
    Filters,
    /// Every element is a proper filter; there are `2^k - 1` of them.
    ProperFilters,
    /// Every element is a principal ultrafilter; there are `k` of them.
    Ultrafilters,
}

fn expected_classes(ctx: &Context, rig: Option<&FiniteRig>) -> Option<Expected> {
    match ctx.kind() {
        ContextKind::Initial if ctx.carrier() == 2 => Some(Expected::Ultrafilters),
        ContextKind::ScalarLinear if rig.is_some_and(is_boolean) => Some(Expected::Filters),
        ContextKind::ScalarAffine if rig.is_some_and(is_boolean) => Some(Expected::ProperFilters),
        _ => None,
    }
}

fn expectation_holds(expected: Expected, k: usize, classes: &[Classification]) -> bool {
    let all = |f: &dyn Fn(&Classification) -> bool| classes.iter().all(f);
    match expected {
        Expected::Filters => classes.len() == 1 << k && all(&|c| c.kind != FilterKind::NotAFilter),
        Expected::ProperFilters => {
            classes.len() + 1 == 1 << k
                && all(&|c| matches!(c.kind, FilterKind::ProperFilter | FilterKind::Ultrafilter))
        }
        Expected::Ultrafilters => {
            classes.len() == k
                && all(&|c| c.kind == FilterKind::Ultrafilter && c.principal_generator.is_some())
        }
    }
}

/// Monad laws with associativity, falling back to the unit and naturality
/// laws when `D(D(D(V)))` exceeds the guards.
fn laws_with_fallback(
    ctx: &Context,
    k: usize,
) -> Result<(MonadLawReport, Option<String>), Failure> {
    match monad_laws(ctx, k, true) {
        Ok(r) => Ok((r, None)),
        Err(Error::Resource(msg)) => {
            let r = monad_laws(ctx, k, false)?;
            Ok((r, Some(format!("associativity skipped: {msg}"))))
        }
        Err(e) => Err(e.into()),
    }
}

fn theorem_line(t: &TheoremCheck) -> String {
    format!(
        "{} at n = {}: {} vs {} ({})",
        t.theorem,
        t.n,
        t.left,
        t.right,
        if t.holds { "holds" } else { "fails" }
    )
}

pub fn dist(global: &Global, args: &DistArgs) -> CommandResult {
    run("dist", |inputs| {
        let name = match args.context {
            ContextArg::ScalarLinear => "scalar-linear",
            ContextArg::ScalarAffine => "scalar-affine",
            ContextArg::Initial => "initial",
        };
        inputs.arg("context", name);
        inputs.arg("set_size", args.set_size);
        inputs.arg("classify", args.classify);
        inputs.arg("monad_laws", args.monad_laws);
        inputs.arg("theorems", args.theorems);
        inputs.arg("dump", args.dump);
        inputs.arg("max_arity", global.max_arity);
        inputs.arg(
            "max_candidates",
            global.max_candidates.map(|c| c.to_string()),
        );
        if let Some(c) = args.carrier {
            inputs.arg("carrier", c);
        }
        let rig = match &args.rig {
            Some(p) => {
                inputs.arg("rig", p.display().to_string());
                Some(load_rig(p, inputs)?)
            }
            None => None,
        };
        let ctx = Context::build(
            context_kind(args.context),
            rig.as_ref(),
            args.carrier,
            global.max_arity,
            limits(global),
        )?;
        let k = args.set_size;
        let d = distribution_object(&ctx, k)?;
        let mut ok = true;
        let mut results = json!({
            "context": ctx.name(),
            "carrier": ctx.carrier(),
            "bound": ctx.bound(),
            "balanced": ctx.balanced(),
            "set_size": k,
            "count": d.len(),
        });
        let mut lines = vec![
            format!(
                "context {} on {} points ({})",
                ctx.name(),
                ctx.carrier(),
                ctx.exactness()
            ),
            format!("|D({k})| = {}", d.len()),
        ];
        if args.dump {
            let tables: Vec<&[u8]> = d.elements().iter().map(OpTable::table).collect();
            results["elements"] = json!(tables);
            lines.extend(tables.iter().map(|t| format!("  {t:?}")));
        }
        if args.classify {
            let classes = d
                .elements()
                .iter()
                .map(|mu| classify(&ctx, mu))
                .collect::<Result<Vec<_>, Error>>()?;
            let expected = expected_classes(&ctx, rig.as_ref());
            let met = expected.map(|e| expectation_holds(e, k, &classes));
            ok &= met.unwrap_or(true);
            lines.push(format!(
                "  {:<5} {:<16} {:<12} family",
                "index", "kind", "principal"
            ));
            for (i, c) in classes.iter().enumerate() {
                let principal = c
                    .principal_generator
                    .as_ref()
                    .map_or("-".to_string(), |g| format!("{g:?}"));
                lines.push(format!(
                    "  {:<5} {:<16} {:<12} {:?}",
                    i,
                    c.kind.to_string(),
                    principal,
                    c.family
                ));
            }
            if let Some(met) = met {
                lines.push(format!(
                    "classification {}",
                    if met { "matches" } else { "contradicts" }
                ));
            }
            results["classification"] = json!(classes);
            results["classification_expected"] = json!(met);
        }
        if args.monad_laws {
            let (laws, note) = laws_with_fallback(&ctx, k)?;
            ok &= laws.holds();
            lines.push(format!(
                "monad laws at |V| = {k}: {} (associativity {})",
                if laws.holds() { "hold" } else { "fail" },
                serde_json::to_value(laws.associativity_mode)
                    .expect("mode serializes")
                    .as_str()
                    .unwrap_or("?")
            ));
            if let Some(n) = &note {
                lines.push(format!("  {n}"));
            }
            results["monad_laws"] = json!(laws);
            results["monad_laws_note"] = json!(note);
        }
        if args.theorems {
            let checks = [
                restriction_check(&ctx, k)?,
                double_commutant_check(&ctx, k)?,
            ];
            ok &= checks.iter().all(|c| c.holds);
            lines.extend(checks.iter().map(theorem_line));
            results["theorems"] = json!(checks);
        }
        Ok(
            Done::pass(results, ctx.exactness().to_string(), lines).unless(
                ok,
                Exit::Theorem,
                "theorem-violation",
            ),
        )
    })
}

/// One line of the acceptance matrix.
struct Check {
    name: String,
    exit: Exit,
    reason: Option<String>,
    detail: Value,
}

impl Check {
    fn of(name: impl Into<String>, result: Result<(bool, Value), Failure>) -> Self {
        let name = name.into();
        match result {
            Ok((true, detail)) => Check {
                name,
                exit: Exit::Pass,
                reason: None,
                detail,
            },
            Ok((false, detail)) => Check {
                name,
                exit: Exit::Theorem,
                reason: Some("theorem-violation".into()),
                detail,
            },
            Err(f) => Check {
                name,
                exit: f.exit,
                reason: Some(f.reason),
                detail: json!({ "error": f.message }),
            },
        }
    }

    fn skipped(name: &str, why: &str) -> Self {
        Check {
            name: name.into(),
            exit: Exit::Pass,
            reason: None,
            detail: json!({ "skipped": why }),
        }
    }

    fn label(&self) -> &'static str {
        match (self.exit, self.detail.get("skipped")) {
            (Exit::Pass, Some(_)) => "SKIP",
            (Exit::Pass, None) => "PASS",
            _ => "FAIL",
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "check": self.name,
            "passed": self.exit == Exit::Pass,
            "reason": self.reason,
            "detail": self.detail,
        })
    }
}

fn verdict_value(v: &Verdict) -> Value {
    json!({ "holds": v.holds, "max_arity": v.max_arity, "arities": v.arities, "witnesses": v.witnesses })
}

/// Restriction and double-commutant checks for `n ≤ top`, then the monad
/// laws at `|V| ≤ laws_top`.
fn context_suite(ctx: &Context, top: usize, laws_top: usize) -> Result<(bool, Value), Failure> {
    let mut ok = true;
    let mut rows = Vec::new();
    for n in 0..=top {
        let r = restriction_check(ctx, n)?;
        let d = double_commutant_check(ctx, n)?;
        ok &= r.holds && d.holds;
        rows.push(
            json!({ "n": n, "count": r.left, "restriction": r.holds, "double_commutant": d.holds }),
        );
    }
    let mut laws = Vec::new();
    for v in 0..=laws_top {
        let (r, note) = laws_with_fallback(ctx, v)?;
        ok &= r.holds();
        laws.push(json!({ "v": v, "holds": r.holds(), "associativity_mode": r.associativity_mode, "note": note }));
    }
    Ok((
        ok,
        json!({ "context": ctx.name(), "exactness": ctx.exactness().to_string(), "slices": rows, "monad_laws": laws }),
    ))
}

fn classification_suite(
    ctx: &Context,
    expected: Expected,
    top: usize,
) -> Result<(bool, Value), Failure> {
    let mut ok = true;
    let mut counts = Vec::new();
    for k in 1..=top {
        let d = distribution_object(ctx, k)?;
        let classes = d
            .elements()
            .iter()
            .map(|mu| classify(ctx, mu))
            .collect::<Result<Vec<_>, Error>>()?;
        let met = expectation_holds(expected, k, &classes);
        ok &= met;
        counts.push(json!({ "k": k, "count": d.len(), "matches": met }));
    }
    Ok((ok, json!({ "context": ctx.name(), "sizes": counts })))
}

fn rig_matrix(rig: &FiniteRig, global: &Global) -> Vec<Check> {
    let limits = limits(global);
    let k = check_arity(global, rig.size());
    let report = validate_rig(rig);
    let boolean = is_boolean(rig);
    let mut checks = vec![Check::of(
        "mutual-commutant",
        mutual_commutant(rig, k, limits)
            .map(|v| (v.holds, verdict_value(&v)))
            .map_err(Failure::from),
    )];
    checks.push(Check::of(
        "balanced-iff-commutative",
        ConcreteTheory::mat(rig)
            .and_then(|m| is_balanced(&m.with_limits(limits), k))
            .map(|v| (v.holds == report.is_commutative, verdict_value(&v)))
            .map_err(Failure::from),
    ));
    if report.is_ring || boolean {
        checks.push(Check::of(
            "affine-commutant",
            affine_commutant(rig, k.min(2), limits)
                .map(|v| (v.holds, verdict_value(&v)))
                .map_err(Failure::from),
        ));
    } else {
        checks.push(Check::skipped(
            "affine-commutant",
            "stated for rings and the boolean rig",
        ));
    }
    let linear = Context::build(ContextKind::ScalarLinear, Some(rig), None, None, limits);
    checks.push(match (report.is_commutative, linear) {
        (true, Ok(ctx)) => Check::of("scalar-linear", context_suite(&ctx, 2, 1)),
        (true, Err(e)) => Check::of("scalar-linear", Err(e.into())),
        (false, Err(Error::ContextRejected(msg))) => {
            Check::of("scalar-linear", Ok((true, json!({ "rejected": msg }))))
        }
        (false, Ok(_)) => Check::of(
            "scalar-linear",
            Ok((
                false,
                json!({ "error": "non-commutative matrix theory was admitted" }),
            )),
        ),
        (false, Err(e)) => Check::of("scalar-linear", Err(e.into())),
    });
    if report.is_ring || boolean {
        checks.push(Check::of(
            "scalar-affine",
            Context::build(ContextKind::ScalarAffine, Some(rig), None, None, limits)
                .map_err(Failure::from)
                .and_then(|ctx| context_suite(&ctx, 2, 1)),
        ));
    } else {
        checks.push(Check::skipped(
            "scalar-affine",
            "exact commutant known for rings and the boolean rig",
        ));
    }
    if boolean {
        for (name, kind, expected) in [
            ("filters", ContextKind::ScalarLinear, Expected::Filters),
            (
                "proper-filters",
                ContextKind::ScalarAffine,
                Expected::ProperFilters,
            ),
        ] {
            checks.push(Check::of(
                name,
                Context::build(kind, Some(rig), None, None, limits)
                    .map_err(Failure::from)
                    .and_then(|ctx| classification_suite(&ctx, expected, 3)),
            ));
        }
    }
    checks
}

pub fn report_all(global: &Global, args: &ReportAllArgs, start: Instant) -> CommandResult {
    let result = run("report-all", |inputs| {
        inputs.arg("rig_dir", args.rig_dir.display().to_string());
        inputs.arg("max_arity", global.max_arity);
        inputs.arg(
            "max_candidates",
            global.max_candidates.map(|c| c.to_string()),
        );
        let mut paths: Vec<_> = fs::read_dir(&args.rig_dir)
            .map_err(|e| Failure::input(format!("{}: {e}", args.rig_dir.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        if paths.is_empty() {
            return Err(Failure::input(format!(
                "no rig files in {}",
                args.rig_dir.display()
            )));
        }
        let mut worst = Exit::Pass;
        let mut worst_reason = None;
        let mut note = |exit: Exit, reason: &Option<String>| {
            if exit != Exit::Pass && (worst == Exit::Pass || exit < worst) {
                worst = exit;
                worst_reason = reason.clone();
            }
        };
        let mut rigs = Vec::new();
        let mut lines = Vec::new();
        let (mut passed, mut failed) = (0usize, 0usize);
        for path in &paths {
            let loaded = load_rig(path, inputs);
            let (name, checks) = match loaded {
                Ok(rig) => (rig.name().to_string(), rig_matrix(&rig, global)),
                Err(f) => (path.display().to_string(), vec![Check::of("load", Err(f))]),
            };
            for c in &checks {
                note(c.exit, &c.reason);
                if c.exit == Exit::Pass {
                    passed += 1;
                } else {
                    failed += 1;
                }
                lines.push(format!(
                    "{:<6} {:<8} {}{}",
                    c.label(),
                    name,
                    c.name,
                    c.reason
                        .as_ref()
                        .map_or(String::new(), |r| format!(" ({r})"))
                ));
            }
            rigs.push(json!({
                "path": path.display().to_string(),
                "rig": name,
                "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            }));
        }
        let initial = Check::of(
            "initial-ultrafilters",
            Context::build(ContextKind::Initial, None, Some(2), None, limits(global))
                .map_err(Failure::from)
                .and_then(|ctx| classification_suite(&ctx, Expected::Ultrafilters, 4)),
        );
        note(initial.exit, &initial.reason);
        if initial.exit == Exit::Pass {
            passed += 1;
        } else {
            failed += 1;
        }
        lines.push(format!(
            "{:<6} {:<8} {}",
            initial.label(),
            "-",
            initial.name
        ));
        lines.push(format!("report-all: {passed} passed, {failed} failed"));
        let results = json!({
            "rigs": rigs,
            "global": [initial.to_json()],
            "passed": passed,
            "failed": failed,
        });
        let done = Done::pass(results, "bounded-arity", lines);
        Ok(match worst_reason {
            Some(r) => done.unless(false, worst, &r),
            None => done,
        })
    });
    let mut outcome = match result {
        Ok(o) => o,
        Err(failed) => {
            let (inputs, failure) = *failed;
            Outcome {
                report: Report::failed("report-all", inputs.unwrap_or_default(), &failure),
                exit: failure.exit,
                lines: vec![format!("error: {failure}")],
            }
        }
    };
    if !global.no_timing {
        outcome.report.elapsed_ms = start.elapsed().as_millis() as u64;
    }
    if let Err(e) = fs::write(&args.out, outcome.report.to_json()) {
        let failure = Failure::input(format!("{}: {e}", args.out.display()));
        return Err(Box::new((Some(outcome.report.inputs), failure)));
    }
    Ok(outcome)
}
