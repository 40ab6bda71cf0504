//! Functional-analytic contexts and the distribution monad `D` on finite sets.
//!
//! For a context `(T, S)`, `D(V)` is the set of maps `μ: S^V → S` that are
//! homomorphisms for the commutant `T⊥` acting pointwise on `S^V`. Base sets
//! are `V = {0, …, k-1}`; a function `f: V → S` is the tuple `(f(0), …, f(k-1))`
//! and `μ` is stored as an arity-`k` table over `S`. Functions on `D(V)` are
//! tuples indexed by the canonical order of `D(V)`, so `D(D(V))` is computed as
//! `D(|D(V)|)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::commutant::{
    commutant_slice, is_balanced, is_commutative, is_homomorphism, is_saturated, Verdict, Witness,
};
use crate::finset::{self, encode_tuple, projection, table_len, MultiOpTable, OpTable};
use crate::rig::{is_boolean, opposite, validate_rig, FiniteRig};
use crate::theory::{slice_compare, AlgebraStructure, ConcreteTheory, Presentation, Relation};
use crate::{default_max_arity, Error, Limits, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContextKind {
    ScalarLinear,
    ScalarAffine,
    Initial,
    Custom,
}

/// How the generators enforced on `D(V)` relate to the true commutant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exactness {
    /// A known generator set whose closure matched the computed commutant.
    ExactViaKnownGenerators,
    /// Commutant operations up to arity `k`; `D(V)` is a certified superset.
    TruncatedAtK(usize),
}

impl fmt::Display for Exactness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exactness::ExactViaKnownGenerators => write!(f, "exact-via-known-generators"),
            Exactness::TruncatedAtK(k) => write!(f, "truncated-at-{k}"),
        }
    }
}

impl Serialize for Exactness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// An admitted functional-analytic context `(T, S)` with `S` the carrier of `T`.
pub struct Context {
    name: String,
    kind: ContextKind,
    theory: Arc<ConcreteTheory>,
    perp: Arc<ConcreteTheory>,
    enforced: Vec<OpTable>,
    known: Option<Vec<OpTable>>,
    commutative: Verdict,
    saturated: Verdict,
    balanced: bool,
    exactness: Exactness,
    bound: usize,
    objects: Mutex<BTreeMap<usize, Arc<DistObject>>>,
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Context")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("theory", self.theory.provenance())
            .field("exactness", &self.exactness)
            .field("bound", &self.bound)
            .finish()
    }
}

impl Context {
    /// Builds one of the shipped contexts. Linear and affine contexts need a
    /// rig; the initial context lives on `carrier` points (two by default).
    pub fn build(
        kind: ContextKind,
        rig: Option<&FiniteRig>,
        carrier: Option<usize>,
        bound: Option<usize>,
        limits: Limits,
    ) -> Result<Self> {
        let need_rig = || rig.ok_or_else(|| Error::input(format!("{kind:?} context needs a rig")));
        match kind {
            ContextKind::ScalarLinear => {
                let rig = need_rig()?;
                let theory = Arc::new(ConcreteTheory::mat(rig)?.with_limits(limits));
                let known = ConcreteTheory::mat(&opposite(rig))?.generators().to_vec();
                Self::admit(
                    format!("scalar-linear({})", rig.name()),
                    kind,
                    theory,
                    Some(known),
                    bound,
                )
            }
            ContextKind::ScalarAffine => {
                // For rings and for the boolean rig the commutant is the
                // pointed right-module theory; other rigs run truncated.
                let rig = need_rig()?;
                let mat = Arc::new(ConcreteTheory::mat(rig)?.with_limits(limits));
                let theory = Arc::new(ConcreteTheory::affine_core(mat)?);
                let known = if validate_rig(rig).is_ring || is_boolean(rig) {
                    Some(ConcreteTheory::pointed_mat(rig)?.generators().to_vec())
                } else {
                    None
                };
                Self::admit(
                    format!("scalar-affine({})", rig.name()),
                    kind,
                    theory,
                    known,
                    bound,
                )
            }
            ContextKind::Initial => {
                let carrier = carrier.unwrap_or(2);
                let theory = Arc::new(ConcreteTheory::initial(carrier)?.with_limits(limits));
                let known = ConcreteTheory::full(carrier)?.generators().to_vec();
                Self::admit(
                    format!("initial({carrier})"),
                    kind,
                    theory,
                    Some(known),
                    bound,
                )
            }
            ContextKind::Custom => Err(Error::Unsupported(
                "custom contexts are admitted from an explicit theory".into(),
            )),
        }
    }

    /// `mat(R)` acting on `R`. The commutant is `mat(Rᵒᵖ)`, whose generators
    /// are supplied as known generators and audited.
    pub fn scalar_linear(rig: &FiniteRig, bound: Option<usize>) -> Result<Self> {
        Self::build(
            ContextKind::ScalarLinear,
            Some(rig),
            None,
            bound,
            Limits::default(),
        )
    }

    /// The affine core of `mat(R)` acting on `R`.
    pub fn scalar_affine(rig: &FiniteRig, bound: Option<usize>) -> Result<Self> {
        Self::build(
            ContextKind::ScalarAffine,
            Some(rig),
            None,
            bound,
            Limits::default(),
        )
    }

    /// Projections only, acting on `carrier` points; the commutant is the full theory.
    pub fn initial(carrier: usize, bound: Option<usize>) -> Result<Self> {
        Self::build(
            ContextKind::Initial,
            None,
            Some(carrier),
            bound,
            Limits::default(),
        )
    }

    /// Admits `theory` as a context if it is commutative and certified
    /// saturated at arities up to `bound`. A supplied known generator set is
    /// used for `D(V)` only if its clone closure equals the computed commutant
    /// slices at every arity up to `bound`.
    pub fn admit(
        name: impl Into<String>,
        kind: ContextKind,
        theory: Arc<ConcreteTheory>,
        known: Option<Vec<OpTable>>,
        bound: Option<usize>,
    ) -> Result<Self> {
        let name = name.into();
        let bound = bound.unwrap_or_else(|| default_max_arity(theory.carrier()));
        let commutative = is_commutative(&theory, bound)?;
        if !commutative.holds {
            return Err(Error::ContextRejected(format!(
                "{name}: not commutative ({})",
                describe_witnesses(&commutative.witnesses)
            )));
        }
        let saturated = is_saturated(&theory, bound)?;
        if !saturated.holds {
            return Err(Error::ContextRejected(format!(
                "{name}: saturation not certified at arities ≤ {bound} ({})",
                describe_witnesses(&saturated.witnesses)
            )));
        }
        let balanced = is_balanced(&theory, bound)?.holds;
        let perp = Arc::new(ConcreteTheory::commutant(&theory, bound)?);
        let (enforced, exactness) = match &known {
            Some(gens) => {
                let closure = ConcreteTheory::closure(theory.carrier(), gens.clone())?
                    .with_limits(*theory.limits());
                for n in 0..=bound {
                    let cmp = slice_compare(&*closure.slice(n)?, &*perp.slice(n)?)?;
                    if cmp.relation != Relation::Equal {
                        return Err(Error::Consistency(format!(
                            "{name}: known commutant generators disagree with the computed commutant at arity {n} ({:?})",
                            cmp.relation
                        )));
                    }
                }
                (gens.clone(), Exactness::ExactViaKnownGenerators)
            }
            None => (perp.generators().to_vec(), Exactness::TruncatedAtK(bound)),
        };
        Ok(Context {
            name,
            kind,
            theory,
            perp,
            enforced,
            known,
            commutative,
            saturated,
            balanced,
            exactness,
            bound,
            objects: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ContextKind {
        self.kind
    }

    pub fn theory(&self) -> &Arc<ConcreteTheory> {
        &self.theory
    }

    /// The commutant, generated by its computed slices up to the bound.
    pub fn perp(&self) -> &Arc<ConcreteTheory> {
        &self.perp
    }

    pub fn carrier(&self) -> usize {
        self.theory.carrier()
    }

    /// Generators of `T⊥` enforced on `D(V)`.
    pub fn enforced_generators(&self) -> &[OpTable] {
        &self.enforced
    }

    pub fn known_generators(&self) -> Option<&[OpTable]> {
        self.known.as_deref()
    }

    pub fn commutative_verdict(&self) -> &Verdict {
        &self.commutative
    }

    pub fn saturated_verdict(&self) -> &Verdict {
        &self.saturated
    }

    pub fn balanced(&self) -> bool {
        self.balanced
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// `T⊥` acting pointwise on `S^V`.
    pub fn cotensor_structure(&self, v_size: usize) -> Result<AlgebraStructure> {
        AlgebraStructure::from_generators(self.carrier(), &self.enforced)
            .cotensor(v_size, self.theory.limits())
    }

    fn member_check(&self, what: &str, mu: &OpTable) -> Result<()> {
        let check = is_homomorphism(&self.enforced, &MultiOpTable::single(mu.clone()))?;
        if !check.holds {
            return Err(Error::Consistency(format!(
                "{}: {what} {mu:?} is not a T⊥-homomorphism",
                self.name
            )));
        }
        Ok(())
    }
}

fn describe_witnesses(ws: &[Witness]) -> String {
    ws.iter()
        .map(|w| format!("{} {:?}", w.label, w.table))
        .collect::<Vec<_>>()
        .join(", ")
}

/// `D(V)` for `|V| = v_size`, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistObject {
    context: String,
    v_size: usize,
    elements: Vec<OpTable>,
    exactness: Exactness,
}

impl DistObject {
    pub fn context(&self) -> &str {
        &self.context
    }

    pub fn v_size(&self) -> usize {
        self.v_size
    }

    pub fn elements(&self) -> &[OpTable] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, mu: &OpTable) -> Option<usize> {
        self.elements.binary_search(mu).ok()
    }

    pub fn contains(&self, mu: &OpTable) -> bool {
        self.index_of(mu).is_some()
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }
}

pub fn distribution_object(ctx: &Context, v_size: usize) -> Result<Arc<DistObject>> {
    if let Some(obj) = ctx.objects.lock().expect("object lock").get(&v_size) {
        return Ok(Arc::clone(obj));
    }
    let limits = ctx.theory.limits();
    let s = ctx.carrier();
    if table_len(s, v_size).is_none_or(|l| l > limits.max_table_len) {
        return Err(Error::resource(format!(
            "D(V) for |V| = {v_size} needs tables of length {s}^{v_size}, over the guard of {}",
            limits.max_table_len
        )));
    }
    let elements = finset::enumerate_constrained(s, v_size, &ctx.enforced, limits)?;
    let obj = Arc::new(DistObject {
        context: ctx.name.clone(),
        v_size,
        elements,
        exactness: ctx.exactness,
    });
    let mut objects = ctx.objects.lock().expect("object lock");
    Ok(Arc::clone(objects.entry(v_size).or_insert(obj)))
}

/// Evaluation at `v`: `δ(v)(f) = f(v)`.
pub fn dirac(ctx: &Context, v_size: usize, v: usize) -> Result<OpTable> {
    if v >= v_size {
        return Err(Error::input(format!(
            "point {v} is outside a base set of size {v_size}"
        )));
    }
    let mu = projection(ctx.carrier(), v_size, v + 1)?;
    ctx.member_check("Dirac image", &mu)?;
    Ok(mu)
}

/// `D(g)(μ)(h) = μ(h ∘ g)` for `g: V → W` given as `g[v] = w`.
pub fn dmap(ctx: &Context, g: &[usize], w_size: usize, mu: &OpTable) -> Result<OpTable> {
    let s = ctx.carrier();
    if mu.carrier() != s || mu.arity() != g.len() {
        return Err(Error::input(format!(
            "element of arity {} does not match a map from a {}-point set",
            mu.arity(),
            g.len()
        )));
    }
    if let Some(&bad) = g.iter().find(|&&w| w >= w_size) {
        return Err(Error::input(format!(
            "map value {bad} is outside a set of size {w_size}"
        )));
    }
    let mut pulled = vec![0u8; g.len()];
    let image = OpTable::from_fn(s, w_size, |h| {
        for (slot, &w) in pulled.iter_mut().zip(g) {
            *slot = h[w];
        }
        mu.eval(&pulled)
    })?;
    ctx.member_check("dmap image", &image)?;
    Ok(image)
}

/// `κ(Ξ)(f) = Ξ(μ ↦ μ(f))` for `Ξ` given as an evaluator on functions
/// `D(V) → S`.
fn mult_by(s: usize, d_v: &DistObject, xi: impl Fn(&[u8]) -> u8) -> Result<OpTable> {
    let mut at = vec![0u8; d_v.len()];
    OpTable::from_fn(s, d_v.v_size, |f| {
        for (slot, mu) in at.iter_mut().zip(d_v.elements()) {
            *slot = mu.eval(f);
        }
        xi(&at)
    })
}

/// Multiplication `D(D(V)) → D(V)`; `xi` has arity `|D(V)|`.
pub fn mult(ctx: &Context, v_size: usize, xi: &OpTable) -> Result<OpTable> {
    let d_v = distribution_object(ctx, v_size)?;
    if xi.carrier() != ctx.carrier() || xi.arity() != d_v.len() {
        return Err(Error::input(format!(
            "element of D(D(V)) must have arity |D(V)| = {}, got {}",
            d_v.len(),
            xi.arity()
        )));
    }
    let out = mult_by(ctx.carrier(), &d_v, |x| xi.eval(x))?;
    ctx.member_check("multiplication image", &out)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawResult {
    pub law: String,
    pub checked: usize,
    pub holds: bool,
    /// Table of the first element at which the law fails.
    pub counterexample: Option<Vec<u8>>,
}

impl LawResult {
    fn new(law: &str) -> Self {
        LawResult {
            law: law.to_string(),
            checked: 0,
            holds: true,
            counterexample: None,
        }
    }

    fn record(&mut self, ok: bool, element: impl FnOnce() -> Vec<u8>) {
        self.checked += 1;
        if !ok && self.holds {
            self.holds = false;
            self.counterexample = Some(element());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssociativityMode {
    /// `D(D(D(V)))` enumerated as tables.
    Exhaustive,
    /// `D(D(D(V)))` taken as the operations of `T` at arity `|D(D(V))|`
    /// through the restriction bijection, evaluated lazily.
    TheoryRealized,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonadLawReport {
    pub v_size: usize,
    pub d_size: usize,
    pub left_unit: LawResult,
    pub right_unit: LawResult,
    pub naturality: LawResult,
    pub associativity: Option<LawResult>,
    pub associativity_mode: AssociativityMode,
}

impl MonadLawReport {
    pub fn holds(&self) -> bool {
        self.left_unit.holds
            && self.right_unit.holds
            && self.naturality.holds
            && self.associativity.as_ref().is_none_or(|a| a.holds)
    }
}

/// Largest `|S|^|D(D(V))|` for which `D(D(D(V)))` is enumerated as tables.
const EXHAUSTIVE_TRIPLE_TABLE: usize = 4096;

/// Unit laws `κ∘δ_D = id`, `κ∘D(δ) = id`, naturality of `δ` along every map
/// `V → V`, and (when `associativity` is set) `κ∘κ_D = κ∘D(κ)` over all of
/// `D(D(D(V)))`.
pub fn monad_laws(ctx: &Context, v_size: usize, associativity: bool) -> Result<MonadLawReport> {
    let s = ctx.carrier();
    let d_v = distribution_object(ctx, v_size)?;
    let m = d_v.len();

    let mut left = LawResult::new("mult . unit_D = id");
    let mut right = LawResult::new("mult . D(unit) = id");
    let diracs: Vec<usize> = (0..v_size)
        .map(|v| {
            let d = dirac(ctx, v_size, v)?;
            d_v.index_of(&d)
                .ok_or_else(|| Error::Consistency(format!("Dirac at {v} missing from D({v_size})")))
        })
        .collect::<Result<_>>()?;
    for (i, mu) in d_v.elements().iter().enumerate() {
        let unit_d = projection(s, m, i + 1)?;
        ctx.member_check("unit of D(V)", &unit_d)?;
        let back = mult_by(s, &d_v, |x| unit_d.eval(x))?;
        left.record(&back == mu, || mu.table().to_vec());

        let mut pulled = vec![0u8; v_size];
        let d_unit = OpTable::from_fn(s, m, |big_f| {
            for (slot, &j) in pulled.iter_mut().zip(&diracs) {
                *slot = big_f[j];
            }
            mu.eval(&pulled)
        })?;
        ctx.member_check("D(unit) image", &d_unit)?;
        let back = mult_by(s, &d_v, |x| d_unit.eval(x))?;
        right.record(&back == mu, || mu.table().to_vec());
    }

    let mut naturality = LawResult::new("D(g) . unit = unit . g");
    let maps = table_len(v_size, v_size).unwrap_or(0);
    for code in 0..maps {
        let g: Vec<usize> = finset::decode_tuple(v_size.max(1), v_size, code)?
            .into_iter()
            .map(usize::from)
            .collect();
        for v in 0..v_size {
            let lhs = dmap(ctx, &g, v_size, &dirac(ctx, v_size, v)?)?;
            let rhs = dirac(ctx, v_size, g[v])?;
            naturality.record(lhs == rhs, || lhs.table().to_vec());
        }
    }

    let (assoc, mode) = if associativity {
        let (r, mode) = associativity_law(ctx, &d_v)?;
        (Some(r), mode)
    } else {
        (None, AssociativityMode::Skipped)
    };
    Ok(MonadLawReport {
        v_size,
        d_size: m,
        left_unit: left,
        right_unit: right,
        naturality,
        associativity: assoc,
        associativity_mode: mode,
    })
}

fn associativity_law(ctx: &Context, d_v: &DistObject) -> Result<(LawResult, AssociativityMode)> {
    let s = ctx.carrier();
    let m = d_v.len();
    let dd = distribution_object(ctx, m)?;
    let big_m = dd.len();

    // κ_V(Ξⱼ) for every Ξⱼ ∈ D(D(V)), as an index into D(V).
    let kappa: Vec<usize> = dd
        .elements()
        .iter()
        .map(|xi| {
            let out = mult_by(s, d_v, |x| xi.eval(x))?;
            d_v.index_of(&out)
                .ok_or_else(|| Error::Consistency("multiplication image missing from D(V)".into()))
        })
        .collect::<Result<_>>()?;
    let fs = table_len(s, m).expect("D(D(V)) was enumerated");
    // evals[F] = (Ξⱼ(F))ⱼ for every F: D(V) → S.
    let evals: Vec<Vec<u8>> = (0..fs)
        .map(|f| dd.elements().iter().map(|xi| xi.at(f)).collect())
        .collect();
    let compositions: Vec<Vec<u8>> = (0..fs)
        .map(|h| {
            let h = finset::decode_tuple(s, m, h).expect("in range");
            kappa.iter().map(|&i| h[i]).collect()
        })
        .collect();

    let mut law = LawResult::new("mult . mult_D = mult . D(mult)");
    let mut check = |theta: &dyn Fn(&[u8]) -> u8, describe: &dyn Fn() -> Vec<u8>| -> Result<()> {
        let outer = OpTable::new(s, m, evals.iter().map(|e| theta(e)).collect())?;
        let via_mult_d = mult_by(s, d_v, |x| outer.eval(x))?;
        let inner = OpTable::new(s, m, compositions.iter().map(|c| theta(c)).collect())?;
        let via_d_mult = mult_by(s, d_v, |x| inner.eval(x))?;
        law.record(via_mult_d == via_d_mult, describe);
        Ok(())
    };

    let exhaustive = table_len(s, big_m).is_some_and(|l| l <= EXHAUSTIVE_TRIPLE_TABLE);
    if exhaustive {
        let ddd = distribution_object(ctx, big_m)?;
        for theta in ddd.elements() {
            check(&|x| theta.eval(x), &|| theta.table().to_vec())?;
        }
        return Ok((law, AssociativityMode::Exhaustive));
    }
    let presentation = ctx.theory.presentation().ok_or_else(|| {
        Error::resource(format!(
            "D(D(D(V))) needs tables of length {s}^{big_m} and {} has no closed-form presentation",
            ctx.theory.provenance()
        ))
    })?;
    let limits = ctx.theory.limits();
    if table_len(s, big_m).is_none_or(|rows| rows > limits.max_slice) {
        return Err(Error::resource(format!(
            "D(D(D(V))) realized through T needs {s}^{big_m} coefficient rows, over the guard of {}",
            limits.max_slice
        )));
    }
    for row in presentation.rows(big_m) {
        check(&|x| presentation.eval(&row, x), &|| row.clone())?;
    }
    Ok((law, AssociativityMode::TheoryRealized))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremCheck {
    pub theorem: String,
    pub n: usize,
    pub left: usize,
    pub right: usize,
    pub holds: bool,
    pub witnesses: Vec<Vec<u8>>,
}

/// `D(n) ≅ T(n, 1)` through `ω ↦ μ_ω`, `μ_ω(f) = ω(f(0), …, f(n-1))`.
pub fn restriction_check(ctx: &Context, n: usize) -> Result<TheoremCheck> {
    let d = distribution_object(ctx, n)?;
    let t = ctx.theory.slice(n)?;
    let mut images = Vec::with_capacity(t.len());
    let mut witnesses = Vec::new();
    for omega in t.ops() {
        let mu = OpTable::from_fn(ctx.carrier(), n, |f| omega.eval(f))?;
        match d.index_of(&mu) {
            Some(i) => images.push(i),
            None => witnesses.push(omega.table().to_vec()),
        }
    }
    let mut hit = vec![false; d.len()];
    let mut injective = true;
    for &i in &images {
        injective &= !std::mem::replace(&mut hit[i], true);
    }
    let surjective = hit.iter().all(|&h| h);
    if witnesses.is_empty() {
        witnesses.extend(
            d.elements()
                .iter()
                .zip(&hit)
                .filter(|(_, &h)| !h)
                .map(|(mu, _)| mu.table().to_vec()),
        );
    }
    Ok(TheoremCheck {
        theorem: "restriction".to_string(),
        n,
        left: d.len(),
        right: t.len(),
        holds: witnesses.is_empty() && injective && surjective && d.len() == t.len(),
        witnesses,
    })
}

/// `D(n)` equals the commutant of `T⊥` at arity `n`, where `T⊥` is
/// generated by its computed slices up to the context bound.
pub fn double_commutant_check(ctx: &Context, n: usize) -> Result<TheoremCheck> {
    let d = distribution_object(ctx, n)?;
    let dd = commutant_slice(&ctx.perp, n)?;
    let (dist_slice, _) =
        crate::theory::TheorySlice::from_ops(ctx.carrier(), n, d.elements().to_vec())?;
    let cmp = slice_compare(&dist_slice, &dd)?;
    Ok(TheoremCheck {
        theorem: "double-commutant".to_string(),
        n,
        left: d.len(),
        right: dd.len(),
        holds: cmp.relation == Relation::Equal,
        witnesses: cmp
            .only_left
            .iter()
            .chain(&cmp.only_right)
            .take(4)
            .map(|op| op.table().to_vec())
            .collect(),
    })
}

/// Membership through the cotensor structure: `μ(ω_{S^V}(f₁, …, fₖ)) =
/// ω(μ(f₁), …, μ(fₖ))` for every lifted generator.
pub fn is_cotensor_homomorphism(ctx: &Context, mu: &OpTable) -> Result<bool> {
    let v = mu.arity();
    let lifted = ctx.cotensor_structure(v)?;
    let s = ctx.carrier();
    for (omega, big) in lifted.interpretation() {
        let k = big.arity();
        let count = table_len(big.carrier(), k).expect("lifted table exists");
        for code in 0..count {
            let fs = finset::decode_tuple(big.carrier(), k, code)?;
            let lhs = mu.at(big.at(code) as usize);
            let values: Vec<u8> = fs.iter().map(|&f| mu.at(f as usize)).collect();
            if lhs != omega.eval(&values) {
                return Ok(false);
            }
        }
        debug_assert_eq!(omega.carrier(), s);
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterKind {
    Ultrafilter,
    ProperFilter,
    ImproperFilter,
    NotAFilter,
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FilterKind::Ultrafilter => "ultrafilter",
            FilterKind::ProperFilter => "proper filter",
            FilterKind::ImproperFilter => "improper filter",
            FilterKind::NotAFilter => "not a filter",
        })
    }
}

/// The subset family `F = { A ⊆ V : μ(χ_A) = 1 }` of a two-valued element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    /// Members of `F`, each a sorted subset of `V`, ordered by bitmask.
    pub family: Vec<Vec<usize>>,
    pub upward_closed: bool,
    pub meet_closed: bool,
    pub contains_top: bool,
    pub excludes_bottom: bool,
    pub prime: bool,
    pub kind: FilterKind,
    /// `⋂ F` when `F` is the principal filter it generates.
    pub principal_generator: Option<Vec<usize>>,
}

/// Bitmask family of a two-valued element; bit `v` of a mask is `v ∈ A`.
pub fn subset_family(mu: &OpTable) -> Result<Vec<u32>> {
    if mu.carrier() != 2 {
        return Err(Error::Unsupported(format!(
            "classification needs a two-point carrier, got {}",
            mu.carrier()
        )));
    }
    let v = mu.arity();
    if v > 16 {
        return Err(Error::resource("classification limited to |V| ≤ 16"));
    }
    let mut out = Vec::new();
    for mask in 0u32..(1 << v) {
        let chi: Vec<u8> = (0..v).map(|i| ((mask >> i) & 1) as u8).collect();
        if mu.at(encode_tuple(2, &chi)?) == 1 {
            out.push(mask);
        }
    }
    Ok(out)
}

/// Classifies a bitmask family of subsets of a `v_size`-point set.
pub fn classify_family(v_size: usize, family: &[u32]) -> Classification {
    let full = (1u32 << v_size) - 1;
    let member = |a: u32| family.binary_search(&a).is_ok();
    let upward_closed = family
        .iter()
        .all(|&a| (0..=full).filter(|b| b & a == a).all(member));
    let meet_closed = family
        .iter()
        .all(|&a| family.iter().all(|&b| member(a & b)));
    let contains_top = member(full);
    let excludes_bottom = !member(0);
    let prime = (0..=full).all(|a| (0..=full).all(|b| !member(a | b) || member(a) || member(b)));
    let is_filter = upward_closed && meet_closed && contains_top;
    let kind = match (is_filter, excludes_bottom, prime) {
        (false, _, _) => FilterKind::NotAFilter,
        (true, false, _) => FilterKind::ImproperFilter,
        (true, true, true) => FilterKind::Ultrafilter,
        (true, true, false) => FilterKind::ProperFilter,
    };
    let principal_generator = if is_filter {
        let g = family.iter().fold(full, |acc, &a| acc & a);
        let principal = (0..=full).all(|b| member(b) == (b & g == g));
        principal.then(|| mask_elements(g))
    } else {
        None
    };
    Classification {
        family: family.iter().map(|&a| mask_elements(a)).collect(),
        upward_closed,
        meet_closed,
        contains_top,
        excludes_bottom,
        prime,
        kind,
        principal_generator,
    }
}

fn mask_elements(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| (mask >> i) & 1 == 1).collect()
}

pub fn classify(ctx: &Context, mu: &OpTable) -> Result<Classification> {
    if ctx.carrier() != 2 {
        return Err(Error::Unsupported(format!(
            "{} has {} points; classification needs two",
            ctx.name,
            ctx.carrier()
        )));
    }
    Ok(classify_family(mu.arity(), &subset_family(mu)?))
}

/// The realized presentation of `T`, exposed for reports.
pub fn presentation(ctx: &Context) -> Option<Presentation> {
    ctx.theory.presentation()
}
