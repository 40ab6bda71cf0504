//! Concrete theories: clones on a finite carrier, one slice per arity.
//!
//! A theory is always realized inside the full theory of its carrier. Its
//! `n`-ary operations form a [`TheorySlice`], computed on demand from the
//! theory's source (a formula, a closure, a filter or an enumeration) and
//! cached. Slices are immutable once cached.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::finset::{self, projections, table_len, OpTable};
use crate::rig::FiniteRig;
use crate::{default_max_arity, Error, Limits, Result};

/// Where a theory came from; echoed in reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Full,
    Initial,
    Mat(String),
    MatAff(String),
    PointedMat(String),
    Closure,
    AffineCore(Box<Provenance>),
    Commutant(Box<Provenance>),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Full => write!(f, "full"),
            Provenance::Initial => write!(f, "initial"),
            Provenance::Mat(r) => write!(f, "mat({r})"),
            Provenance::MatAff(r) => write!(f, "mat_aff({r})"),
            Provenance::PointedMat(r) => write!(f, "pointed_mat({r})"),
            Provenance::Closure => write!(f, "closure-of-generators"),
            Provenance::AffineCore(p) => write!(f, "affine-core({p})"),
            Provenance::Commutant(p) => write!(f, "commutant-of({p})"),
        }
    }
}

impl Serialize for Provenance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// The `n`-ary operations of a theory, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheorySlice {
    carrier: usize,
    arity: usize,
    ops: Vec<OpTable>,
}

impl TheorySlice {
    /// Sorts and deduplicates; returns the slice and how many duplicates merged.
    pub fn from_ops(carrier: usize, arity: usize, mut ops: Vec<OpTable>) -> Result<(Self, usize)> {
        if let Some(bad) = ops
            .iter()
            .find(|op| op.carrier() != carrier || op.arity() != arity)
        {
            return Err(Error::input(format!(
                "operation {bad:?} does not belong to a {arity}-ary slice over {carrier} points"
            )));
        }
        let before = ops.len();
        ops.sort_unstable();
        ops.dedup();
        let merged = before - ops.len();
        Ok((
            TheorySlice {
                carrier,
                arity,
                ops,
            },
            merged,
        ))
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[OpTable] {
        &self.ops
    }

    pub fn contains(&self, op: &OpTable) -> bool {
        self.ops.binary_search(op).is_ok()
    }

    pub fn position(&self, op: &OpTable) -> Option<usize> {
        self.ops.binary_search(op).ok()
    }

    /// Flat tables in canonical order, the JSON form of a slice.
    pub fn tables(&self) -> Vec<Vec<u8>> {
        self.ops.iter().map(|op| op.table().to_vec()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Equal,
    LeftSubset,
    RightSubset,
    Incomparable,
}

/// Result of comparing two slices as sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceComparison {
    pub relation: Relation,
    pub only_left: Vec<OpTable>,
    pub only_right: Vec<OpTable>,
}

impl SliceComparison {
    pub fn witness(&self) -> Option<&OpTable> {
        self.only_left.first().or(self.only_right.first())
    }
}

pub fn slice_compare(left: &TheorySlice, right: &TheorySlice) -> Result<SliceComparison> {
    if left.carrier != right.carrier || left.arity != right.arity {
        return Err(Error::input(format!(
            "cannot compare a {}-ary slice over {} points with a {}-ary slice over {}",
            left.arity, left.carrier, right.arity, right.carrier
        )));
    }
    let only_left: Vec<OpTable> = left
        .ops
        .iter()
        .filter(|op| !right.contains(op))
        .cloned()
        .collect();
    let only_right: Vec<OpTable> = right
        .ops
        .iter()
        .filter(|op| !left.contains(op))
        .cloned()
        .collect();
    let relation = match (only_left.is_empty(), only_right.is_empty()) {
        (true, true) => Relation::Equal,
        (true, false) => Relation::LeftSubset,
        (false, true) => Relation::RightSubset,
        (false, false) => Relation::Incomparable,
    };
    Ok(SliceComparison {
        relation,
        only_left,
        only_right,
    })
}

/// Closed-form description of a theory's operations at any arity, used where
/// tabulating a slice would be too large.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Presentation {
    /// `x ↦ ∑ rᵢ·xᵢ` over all coefficient rows.
    Linear(FiniteRig),
    /// Linear rows whose entries sum to one.
    Affine(FiniteRig),
    /// Projections only.
    Projections,
}

impl Presentation {
    /// Coefficient rows of the `n`-ary operations (for projections, the
    /// single 0-based coordinate).
    pub fn rows(&self, n: usize) -> Box<dyn Iterator<Item = Vec<u8>> + '_> {
        match self {
            Presentation::Linear(rig) => Box::new(coefficient_rows(rig.size(), n)),
            Presentation::Affine(rig) => Box::new(
                coefficient_rows(rig.size(), n)
                    .filter(move |r| rig.sum(r.iter().copied()) == rig.one()),
            ),
            Presentation::Projections => Box::new((0..n).map(|i| vec![i as u8])),
        }
    }

    pub fn eval(&self, row: &[u8], args: &[u8]) -> u8 {
        match self {
            Presentation::Linear(rig) | Presentation::Affine(rig) => {
                linear_combination(rig, row, args)
            }
            Presentation::Projections => args[row[0] as usize],
        }
    }
}

fn coefficient_rows(size: usize, n: usize) -> impl Iterator<Item = Vec<u8>> {
    let count = table_len(size, n).unwrap_or(0);
    let mut row = vec![0u8; n];
    (0..count).map(move |i| {
        if i > 0 {
            finset::increment(&mut row, size);
        }
        row.clone()
    })
}

/// `∑ rᵢ·xᵢ` with the coefficient on the left.
fn linear_combination(rig: &FiniteRig, coeffs: &[u8], args: &[u8]) -> u8 {
    rig.sum(coeffs.iter().zip(args).map(|(&r, &x)| rig.mul(r, x)))
}

/// `x ↦ ∑ rᵢ·xᵢ` as a table.
pub fn linear_table(rig: &FiniteRig, coeffs: &[u8]) -> Result<OpTable> {
    OpTable::from_fn(rig.size(), coeffs.len(), |x| {
        linear_combination(rig, coeffs, x)
    })
}

/// `x ↦ u₀ + ∑ xᵢ·uᵢ` as a table (scalars act on the right).
pub fn pointed_table(rig: &FiniteRig, u: &[u8]) -> Result<OpTable> {
    let (u0, rest) = u
        .split_first()
        .ok_or_else(|| Error::input("pointed operation needs a constant term"))?;
    OpTable::from_fn(rig.size(), rest.len(), |x| {
        rig.add(
            *u0,
            rig.sum(x.iter().zip(rest).map(|(&xi, &ui)| rig.mul(xi, ui))),
        )
    })
}

enum Source {
    Full,
    Initial,
    Mat(FiniteRig),
    PointedMat(FiniteRig),
    AffineCore(Arc<ConcreteTheory>),
    Closure,
    Commutant { enforce: Vec<OpTable> },
}

/// A theory realized as a clone on `{0, …, carrier-1}`.
pub struct ConcreteTheory {
    carrier: usize,
    provenance: Provenance,
    source: Source,
    generators: Vec<OpTable>,
    generators_exact: bool,
    max_arity: usize,
    limits: Limits,
    cache: Mutex<BTreeMap<usize, Arc<TheorySlice>>>,
    merged: Mutex<BTreeMap<usize, usize>>,
}

impl fmt::Debug for ConcreteTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConcreteTheory")
            .field("carrier", &self.carrier)
            .field("provenance", &self.provenance)
            .field("generators", &self.generators.len())
            .field("max_arity", &self.max_arity)
            .finish()
    }
}

fn refuse_degenerate(rig: &FiniteRig) -> Result<()> {
    if rig.is_degenerate() {
        return Err(Error::input(format!(
            "rig {} is degenerate (zero = one); its matrix presentation is not faithful",
            rig.name()
        )));
    }
    Ok(())
}

impl ConcreteTheory {
    fn with_source(
        carrier: usize,
        provenance: Provenance,
        source: Source,
        generators: Vec<OpTable>,
        generators_exact: bool,
    ) -> Self {
        ConcreteTheory {
            carrier,
            provenance,
            source,
            generators: generators
                .into_iter()
                .filter(|g| !g.is_projection())
                .collect(),
            generators_exact,
            max_arity: default_max_arity(carrier),
            limits: Limits::default(),
            cache: Mutex::new(BTreeMap::new()),
            merged: Mutex::new(BTreeMap::new()),
        }
    }

    /// Lowers the arity bound. Raising it above the carrier default is refused.
    pub fn with_max_arity(mut self, max_arity: usize) -> Result<Self> {
        let ceiling = default_max_arity(self.carrier);
        if max_arity > ceiling {
            return Err(Error::input(format!(
                "max arity {max_arity} exceeds the default {ceiling} for carrier {}",
                self.carrier
            )));
        }
        self.max_arity = max_arity;
        Ok(self)
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    /// Every operation on the carrier. Generated by `min`, `max`, all unary
    /// maps and all constants.
    pub fn full(carrier: usize) -> Result<Self> {
        if carrier == 0 || carrier > 5 {
            return Err(Error::input(format!(
                "full theory supported for carriers 1..=5, got {carrier}"
            )));
        }
        let limits = Limits::default();
        let mut gens = Vec::new();
        if carrier > 1 {
            gens.push(OpTable::from_fn(carrier, 2, |x| x[0].min(x[1]))?);
            gens.push(OpTable::from_fn(carrier, 2, |x| x[0].max(x[1]))?);
        }
        gens.extend(finset::all_tables(carrier, 1, &limits)?);
        gens.extend(finset::all_tables(carrier, 0, &limits)?);
        Ok(Self::with_source(
            carrier,
            Provenance::Full,
            Source::Full,
            gens,
            true,
        ))
    }

    /// Projections only.
    pub fn initial(carrier: usize) -> Result<Self> {
        if carrier == 0 || carrier > finset::MAX_CARRIER {
            return Err(Error::input(format!("carrier {carrier} out of range")));
        }
        Ok(Self::with_source(
            carrier,
            Provenance::Initial,
            Source::Initial,
            Vec::new(),
            true,
        ))
    }

    /// Left `R`-linear operations `x ↦ ∑ rᵢ·xᵢ` on `R`, generated by addition,
    /// zero and the scalar maps `x ↦ r·x`.
    pub fn mat(rig: &FiniteRig) -> Result<Self> {
        refuse_degenerate(rig)?;
        let s = rig.size();
        let mut gens = vec![
            rig.add_table().clone(),
            OpTable::constant(s, 0, rig.zero())?,
        ];
        for r in rig.elements() {
            gens.push(linear_table(rig, &[r])?);
        }
        Ok(Self::with_source(
            s,
            Provenance::Mat(rig.name().to_string()),
            Source::Mat(rig.clone()),
            gens,
            true,
        ))
    }

    /// Pointed right-module operations `x ↦ u₀ + ∑ xᵢ·uᵢ`, generated by
    /// addition, zero, the point `1` and the scalar maps `x ↦ x·r`.
    pub fn pointed_mat(rig: &FiniteRig) -> Result<Self> {
        refuse_degenerate(rig)?;
        let s = rig.size();
        let mut gens = vec![
            rig.add_table().clone(),
            OpTable::constant(s, 0, rig.zero())?,
            OpTable::constant(s, 0, rig.one())?,
        ];
        for r in rig.elements() {
            gens.push(OpTable::from_fn(s, 1, |x| rig.mul(x[0], r))?);
        }
        Ok(Self::with_source(
            s,
            Provenance::PointedMat(rig.name().to_string()),
            Source::PointedMat(rig.clone()),
            gens,
            true,
        ))
    }

    /// Operations of `base` fixing the diagonal. Generators are taken to be the
    /// non-projection members up to arity 3 for matrix theories (where rows
    /// are cheap to tabulate) and up to the base's arity bound otherwise.
    pub fn affine_core(base: Arc<ConcreteTheory>) -> Result<Self> {
        let provenance = match &base.provenance {
            Provenance::Mat(r) => Provenance::MatAff(r.clone()),
            other => Provenance::AffineCore(Box::new(other.clone())),
        };
        let gen_arity = match base.source {
            Source::Mat(_) => 3,
            _ => base.max_arity,
        };
        let mut theory = Self::with_source(
            base.carrier,
            provenance,
            Source::AffineCore(Arc::clone(&base)),
            Vec::new(),
            false,
        );
        theory.max_arity = base.max_arity;
        theory.limits = base.limits;
        let mut gens = Vec::new();
        for n in 0..=gen_arity {
            gens.extend(
                theory
                    .slice(n)?
                    .ops()
                    .iter()
                    .filter(|g| !g.is_projection())
                    .cloned(),
            );
        }
        theory.generators = gens;
        Ok(theory)
    }

    /// The clone generated by `generators`.
    pub fn closure(carrier: usize, generators: Vec<OpTable>) -> Result<Self> {
        if let Some(bad) = generators.iter().find(|g| g.carrier() != carrier) {
            return Err(Error::input(format!(
                "generator {bad:?} does not live on {carrier} points"
            )));
        }
        Ok(Self::with_source(
            carrier,
            Provenance::Closure,
            Source::Closure,
            generators,
            true,
        ))
    }

    /// The commutant of `base` on its own carrier. Its slices enforce the
    /// generators of `base`; its own generators are its computed slices at
    /// arities `0..=gen_arity`, so it is exact only up to that arity.
    pub fn commutant(base: &ConcreteTheory, gen_arity: usize) -> Result<Self> {
        let mut theory = Self::with_source(
            base.carrier,
            Provenance::Commutant(Box::new(base.provenance.clone())),
            Source::Commutant {
                enforce: base.generators.clone(),
            },
            Vec::new(),
            false,
        );
        theory.max_arity = base.max_arity;
        theory.limits = base.limits;
        let mut gens = Vec::new();
        for n in 0..=gen_arity {
            gens.extend(
                theory
                    .slice(n)?
                    .ops()
                    .iter()
                    .filter(|g| !g.is_projection())
                    .cloned(),
            );
        }
        theory.generators = gens;
        Ok(theory)
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Generators, projections excluded.
    pub fn generators(&self) -> &[OpTable] {
        &self.generators
    }

    /// Whether the generator list is known to generate the whole theory
    /// (as opposed to the members of a bounded number of slices).
    pub fn generators_exact(&self) -> bool {
        self.generators_exact
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    /// The matrix rig behind this theory, when there is one.
    pub fn rig(&self) -> Option<&FiniteRig> {
        match &self.source {
            Source::Mat(r) | Source::PointedMat(r) => Some(r),
            Source::AffineCore(base) => base.rig(),
            _ => None,
        }
    }

    pub fn presentation(&self) -> Option<Presentation> {
        match &self.source {
            Source::Mat(r) => Some(Presentation::Linear(r.clone())),
            Source::Initial => Some(Presentation::Projections),
            Source::AffineCore(base) => match &base.source {
                Source::Mat(r) => Some(Presentation::Affine(r.clone())),
                _ => None,
            },
            _ => None,
        }
    }

    /// Slices already computed, by arity.
    pub fn cached_arities(&self) -> Vec<usize> {
        self.cache
            .lock()
            .expect("cache lock")
            .keys()
            .copied()
            .collect()
    }

    /// Number of duplicate tables merged while building `slice(n)`.
    pub fn duplicates_merged(&self, n: usize) -> Option<usize> {
        self.merged.lock().expect("merge lock").get(&n).copied()
    }

    pub fn slice(&self, n: usize) -> Result<Arc<TheorySlice>> {
        if let Some(s) = self.cache.lock().expect("cache lock").get(&n) {
            return Ok(Arc::clone(s));
        }
        let ops = self.compute_slice(n)?;
        let (slice, merged) = TheorySlice::from_ops(self.carrier, n, ops)?;
        if let Source::Commutant { .. } = self.source {
            self.check_subtheory(&slice)?;
        }
        let slice = Arc::new(slice);
        let mut cache = self.cache.lock().expect("cache lock");
        let entry = cache.entry(n).or_insert_with(|| Arc::clone(&slice));
        self.merged.lock().expect("merge lock").insert(n, merged);
        Ok(Arc::clone(entry))
    }

    fn row_guard(&self, rows: usize) -> Result<()> {
        let count = table_len(self.carrier, rows).filter(|&c| c <= self.limits.max_slice);
        if count.is_none() {
            return Err(Error::resource(format!(
                "{}^{rows} coefficient rows exceed the slice guard of {}",
                self.carrier, self.limits.max_slice
            )));
        }
        Ok(())
    }

    fn compute_slice(&self, n: usize) -> Result<Vec<OpTable>> {
        let s = self.carrier;
        match &self.source {
            Source::Full => {
                if n > self.max_arity {
                    return Err(Error::resource(format!(
                        "full theory slice of arity {n} exceeds the arity bound {}",
                        self.max_arity
                    )));
                }
                finset::all_tables(s, n, &self.limits)
            }
            Source::Initial => projections(s, n),
            Source::Mat(rig) => {
                self.row_guard(n)?;
                coefficient_rows(s, n)
                    .map(|r| linear_table(rig, &r))
                    .collect()
            }
            Source::PointedMat(rig) => {
                self.row_guard(n + 1)?;
                coefficient_rows(s, n + 1)
                    .map(|u| pointed_table(rig, &u))
                    .collect()
            }
            Source::AffineCore(base) => {
                let full = base.slice(n)?;
                let ops: Vec<OpTable> = full
                    .ops()
                    .iter()
                    .filter(|op| op.fixes_diagonal())
                    .cloned()
                    .collect();
                if let Source::Mat(rig) = &base.source {
                    let by_rows: BTreeSet<OpTable> = coefficient_rows(s, n)
                        .filter(|r| rig.sum(r.iter().copied()) == rig.one())
                        .map(|r| linear_table(rig, &r))
                        .collect::<Result<_>>()?;
                    let by_diagonal: BTreeSet<OpTable> = ops.iter().cloned().collect();
                    if by_rows != by_diagonal {
                        return Err(Error::Consistency(format!(
                            "affine core of mat({}) at arity {n}: diagonal filter gives {} operations, row-sum filter gives {}",
                            rig.name(),
                            by_diagonal.len(),
                            by_rows.len()
                        )));
                    }
                }
                Ok(ops)
            }
            Source::Closure => clone_closure_slice(s, &self.generators, n, &self.limits),
            Source::Commutant { enforce } => {
                finset::enumerate_constrained(s, n, enforce, &self.limits)
            }
        }
    }

    /// Projections present, and closed under superposition with outer
    /// operations from every cached slice. Exhaustive when affordable,
    /// otherwise a deterministic strided sample of `2²⁰` composites.
    fn check_subtheory(&self, slice: &TheorySlice) -> Result<()> {
        let n = slice.arity;
        for p in projections(self.carrier, n)? {
            if !slice.contains(&p) {
                return Err(Error::Consistency(format!(
                    "{} slice of arity {n} is missing projection {p:?}",
                    self.provenance
                )));
            }
        }
        let mut outers: Vec<OpTable> = self
            .cache
            .lock()
            .expect("cache lock")
            .values()
            .flat_map(|s| s.ops().iter().cloned())
            .collect();
        outers.extend(slice.ops().iter().cloned());
        const BUDGET: u128 = 1 << 20;
        let m = slice.len() as u128;
        let members = slice.ops();
        for outer in &outers {
            let k = outer.arity();
            let total = (0..k)
                .try_fold(1u128, |acc, _| acc.checked_mul(m))
                .unwrap_or(u128::MAX);
            if total == 0 {
                continue;
            }
            let samples = total.min(BUDGET / outers.len().max(1) as u128).max(1);
            let stride = total / samples;
            for step in 0..samples {
                let mut code = step * stride;
                let mut inners = Vec::with_capacity(k);
                for _ in 0..k {
                    inners.push(members[(code % m) as usize].clone());
                    code /= m;
                }
                let composite = finset::superpose_at(outer, &inners, n)?;
                if !slice.contains(&composite) {
                    return Err(Error::Consistency(format!(
                        "{} slice of arity {n} is not closed under superposition with {outer:?}",
                        self.provenance
                    )));
                }
            }
        }
        Ok(())
    }
}

/// All `|slice(n)|`; the carrier of the free algebra on `n` generators.
pub fn free_algebra_size(theory: &ConcreteTheory, n: usize) -> Result<usize> {
    Ok(theory.slice(n)?.len())
}

pub fn full_theory_slice(carrier: usize, n: usize) -> Result<Arc<TheorySlice>> {
    ConcreteTheory::full(carrier)?.slice(n)
}

pub fn initial_theory_slice(carrier: usize, n: usize) -> Result<Arc<TheorySlice>> {
    ConcreteTheory::initial(carrier)?.slice(n)
}

pub fn mat_slice(rig: &FiniteRig, n: usize) -> Result<Arc<TheorySlice>> {
    ConcreteTheory::mat(rig)?.slice(n)
}

pub fn pointed_module_slice(rig: &FiniteRig, n: usize) -> Result<Arc<TheorySlice>> {
    ConcreteTheory::pointed_mat(rig)?.slice(n)
}

pub fn affine_core_slice(theory: Arc<ConcreteTheory>, n: usize) -> Result<Arc<TheorySlice>> {
    ConcreteTheory::affine_core(theory)?.slice(n)
}

/// Least set of `n`-ary operations containing the projections and closed
/// under applying each generator; constants lift to every arity.
fn clone_closure_slice(
    carrier: usize,
    generators: &[OpTable],
    n: usize,
    limits: &Limits,
) -> Result<Vec<OpTable>> {
    let len = table_len(carrier, n).ok_or_else(|| Error::resource("table length overflow"))?;
    let mut members: Vec<OpTable> = projections(carrier, n)?;
    let mut seen: BTreeSet<OpTable> = members.iter().cloned().collect();
    // Generator applications whose arguments all lie below `done` were tried.
    let mut done = 0usize;
    let mut first_round = true;
    loop {
        let current = members.len();
        let mut fresh = Vec::new();
        for g in generators {
            let k = g.arity();
            if k == 0 {
                if first_round {
                    let c = finset::superpose_at(g, &[], n)?;
                    if seen.insert(c.clone()) {
                        fresh.push(c);
                    }
                }
                continue;
            }
            if current == 0 {
                continue;
            }
            let mut idx = vec![0usize; k];
            loop {
                if idx.iter().any(|&i| i >= done) {
                    let table: Vec<u8> = (0..len)
                        .map(|x| {
                            let at = idx
                                .iter()
                                .fold(0usize, |acc, &i| acc * carrier + members[i].at(x) as usize);
                            g.at(at)
                        })
                        .collect();
                    let op = OpTable::new(carrier, n, table)?;
                    if !seen.contains(&op) {
                        seen.insert(op.clone());
                        fresh.push(op);
                        if seen.len() > limits.max_slice {
                            return Err(Error::resource(format!(
                                "clone closure at arity {n} exceeds the slice guard of {}",
                                limits.max_slice
                            )));
                        }
                    }
                }
                let mut pos = k;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < current {
                        break;
                    }
                    idx[pos] = 0;
                    if pos == 0 {
                        pos = usize::MAX;
                        break;
                    }
                }
                if pos == usize::MAX {
                    break;
                }
            }
        }
        first_round = false;
        done = current;
        if fresh.is_empty() {
            break;
        }
        members.extend(fresh);
    }
    Ok(members)
}

/// A `T`-algebra structure: each generator of `T` interpreted on a carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraStructure {
    carrier: usize,
    interpretation: Vec<(OpTable, OpTable)>,
}

impl AlgebraStructure {
    /// The carrier of `T` with every generator acting as itself.
    pub fn tautological(theory: &ConcreteTheory) -> Self {
        AlgebraStructure {
            carrier: theory.carrier(),
            interpretation: theory
                .generators()
                .iter()
                .map(|g| (g.clone(), g.clone()))
                .collect(),
        }
    }

    pub fn from_generators(carrier: usize, generators: &[OpTable]) -> Self {
        AlgebraStructure {
            carrier,
            interpretation: generators.iter().map(|g| (g.clone(), g.clone())).collect(),
        }
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn interpretation(&self) -> &[(OpTable, OpTable)] {
        &self.interpretation
    }

    /// The cotensor `[V, A]`: carrier `A^V` (functions encoded as tuples)
    /// with every operation acting pointwise.
    pub fn cotensor(&self, v_size: usize, limits: &Limits) -> Result<AlgebraStructure> {
        let a = self.carrier;
        let big = table_len(a, v_size)
            .filter(|&b| b <= finset::MAX_CARRIER)
            .ok_or_else(|| {
                Error::resource(format!(
                    "cotensor carrier {a}^{v_size} exceeds {} points",
                    finset::MAX_CARRIER
                ))
            })?;
        let mut interpretation = Vec::with_capacity(self.interpretation.len());
        for (abstract_op, op) in &self.interpretation {
            let k = op.arity();
            table_len(big, k)
                .filter(|&l| l <= limits.max_table_len)
                .ok_or_else(|| Error::resource("cotensor operation table too large"))?;
            let lifted = OpTable::from_fn(big, k, |fs| {
                let mut point = vec![0u8; v_size];
                let mut out = 0usize;
                for (coord, slot) in point.iter_mut().enumerate() {
                    let args: Vec<u8> = fs
                        .iter()
                        .map(|&f| {
                            finset::decode_tuple(a, v_size, f as usize).expect("in range")[coord]
                        })
                        .collect();
                    *slot = op.eval(&args);
                }
                for &d in &point {
                    out = out * a + d as usize;
                }
                out as u8
            })?;
            interpretation.push((abstract_op.clone(), lifted));
        }
        Ok(AlgebraStructure {
            carrier: big,
            interpretation,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rig::{bool2, zmod};

    fn tables(slice: &TheorySlice) -> Vec<Vec<u8>> {
        slice.tables()
    }

    #[test]
    fn full_and_initial_counts() {
        assert_eq!(full_theory_slice(2, 1).unwrap().len(), 4);
        assert_eq!(full_theory_slice(2, 2).unwrap().len(), 16);
        assert_eq!(full_theory_slice(3, 1).unwrap().len(), 27);
        assert_eq!(initial_theory_slice(2, 3).unwrap().len(), 3);
        assert!(initial_theory_slice(2, 0).unwrap().is_empty());
        assert_eq!(
            initial_theory_slice(3, 1).unwrap().tables(),
            vec![vec![0, 1, 2]]
        );
        assert!(matches!(full_theory_slice(3, 3), Err(Error::Resource(_))));
    }

    #[test]
    fn mat_slice_examples() {
        // const-⊤, ∧, π₂, π₁ in canonical order.
        let s = mat_slice(&bool2(), 2).unwrap();
        assert_eq!(
            tables(&s),
            vec![
                vec![0, 0, 0, 1],
                vec![0, 0, 1, 1],
                vec![0, 1, 0, 1],
                vec![1, 1, 1, 1]
            ]
        );
        let s = mat_slice(&zmod(3), 1).unwrap();
        assert_eq!(
            tables(&s),
            vec![vec![0, 0, 0], vec![0, 1, 2], vec![0, 2, 1]]
        );
        assert_eq!(tables(&mat_slice(&zmod(4), 0).unwrap()), vec![vec![0]]);
        assert_eq!(tables(&mat_slice(&bool2(), 0).unwrap()), vec![vec![1]]);
    }

    #[test]
    fn degenerate_rig_refused() {
        let zero =
            FiniteRig::from_tables("zero", vec![vec![0]], vec![vec![0]], 0, 0, None).unwrap();
        assert!(ConcreteTheory::mat(&zero).is_err());
        assert!(ConcreteTheory::pointed_mat(&zero).is_err());
    }

    #[test]
    fn affine_core_examples() {
        let mat = Arc::new(ConcreteTheory::mat(&bool2()).unwrap());
        let s = affine_core_slice(Arc::clone(&mat), 2).unwrap();
        assert_eq!(
            tables(&s),
            vec![vec![0, 0, 0, 1], vec![0, 0, 1, 1], vec![0, 1, 0, 1]]
        );

        let z2 = Arc::new(ConcreteTheory::mat(&zmod(2)).unwrap());
        assert_eq!(affine_core_slice(z2, 3).unwrap().len(), 4);

        let full = Arc::new(ConcreteTheory::full(2).unwrap());
        assert_eq!(
            tables(&affine_core_slice(full, 1).unwrap()),
            vec![vec![0, 1]]
        );
    }

    #[test]
    fn pointed_examples() {
        let s = pointed_module_slice(&zmod(2), 1).unwrap();
        assert_eq!(s.len(), 4);
        let s = pointed_module_slice(&bool2(), 0).unwrap();
        assert_eq!(tables(&s), vec![vec![0], vec![1]]);
        let t = ConcreteTheory::pointed_mat(&zmod(3)).unwrap();
        assert_eq!(t.slice(1).unwrap().len(), 9);
        assert_eq!(t.duplicates_merged(1), Some(0));
    }

    #[test]
    fn closure_examples() {
        let and = OpTable::new(2, 2, vec![0, 0, 0, 1]).unwrap();
        let top = OpTable::constant(2, 0, 1).unwrap();
        let not = OpTable::new(2, 1, vec![1, 0]).unwrap();
        let t = ConcreteTheory::closure(2, vec![and.clone(), top]).unwrap();
        assert_eq!(*t.slice(2).unwrap(), *mat_slice(&bool2(), 2).unwrap());
        let t = ConcreteTheory::closure(2, vec![and, not]).unwrap();
        assert_eq!(t.slice(2).unwrap().len(), 16);
        let t = ConcreteTheory::closure(3, vec![]).unwrap();
        assert_eq!(*t.slice(2).unwrap(), *initial_theory_slice(3, 2).unwrap());
    }

    #[test]
    fn compare_examples() {
        let init = initial_theory_slice(2, 2).unwrap();
        let full = full_theory_slice(2, 2).unwrap();
        let cmp = slice_compare(&init, &full).unwrap();
        assert_eq!(cmp.relation, Relation::LeftSubset);
        let and = OpTable::new(2, 2, vec![0, 0, 0, 1]).unwrap();
        assert!(cmp.only_right.contains(&and));
        assert_eq!(
            slice_compare(&full, &full).unwrap().relation,
            Relation::Equal
        );

        let mat = Arc::new(ConcreteTheory::mat(&bool2()).unwrap());
        let aff = affine_core_slice(Arc::clone(&mat), 2).unwrap();
        let cmp = slice_compare(&aff, &mat.slice(2).unwrap()).unwrap();
        assert_eq!(cmp.relation, Relation::LeftSubset);

        assert!(slice_compare(&init, &initial_theory_slice(2, 3).unwrap()).is_err());
    }

    #[test]
    fn free_algebra_sizes() {
        let mat = Arc::new(ConcreteTheory::mat(&bool2()).unwrap());
        assert_eq!(free_algebra_size(&mat, 3).unwrap(), 8);
        let aff = ConcreteTheory::affine_core(mat).unwrap();
        assert_eq!(free_algebra_size(&aff, 3).unwrap(), 7);
    }

    #[test]
    fn max_arity_only_lowers() {
        assert!(ConcreteTheory::full(2).unwrap().with_max_arity(4).is_err());
        let t = ConcreteTheory::full(2).unwrap().with_max_arity(1).unwrap();
        assert!(t.slice(2).is_err());
    }

    #[test]
    fn cotensor_acts_pointwise() {
        let and = OpTable::new(2, 2, vec![0, 0, 0, 1]).unwrap();
        let alg = AlgebraStructure::from_generators(2, std::slice::from_ref(&and));
        let one = alg.cotensor(1, &Limits::default()).unwrap();
        assert_eq!(one.interpretation()[0].1, and);
        let two = alg.cotensor(2, &Limits::default()).unwrap();
        let lifted = &two.interpretation()[0].1;
        assert_eq!(lifted.carrier(), 4);
        for f in 0..4u8 {
            for g in 0..4u8 {
                assert_eq!(lifted.eval(&[f, g]), f & g);
            }
        }
        let empty = alg.cotensor(0, &Limits::default()).unwrap();
        assert_eq!(empty.carrier(), 1);
    }
}
