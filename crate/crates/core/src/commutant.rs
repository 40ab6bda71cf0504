//! Homomorphism checks, commutant slices and the verdicts built on them.

use std::sync::Arc;

use serde::Serialize;

use crate::finset::{preservation_failure, MultiOpTable, OpTable};
use crate::rig::{opposite, FiniteRig};
use crate::theory::{slice_compare, ConcreteTheory, Relation, TheorySlice};
use crate::{Error, Limits, Result};

/// First generator instance a map fails to preserve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomFailure {
    pub generator: OpTable,
    pub component: usize,
    /// Argument tuples as indices into `Aⁿ`.
    pub argument_cells: Vec<usize>,
    pub result_cell: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomCheck {
    pub holds: bool,
    pub failure: Option<HomFailure>,
}

/// Whether every component of `h: Aⁿ → Aᵐ` preserves every generator.
pub fn is_homomorphism(generators: &[OpTable], h: &MultiOpTable) -> Result<HomCheck> {
    for (component, hc) in h.components().iter().enumerate() {
        for g in generators {
            if g.carrier() != h.carrier() {
                return Err(Error::input(format!(
                    "generator lives on {} points, map on {}",
                    g.carrier(),
                    h.carrier()
                )));
            }
            if let Some(f) = preservation_failure(g, hc)? {
                return Ok(HomCheck {
                    holds: false,
                    failure: Some(HomFailure {
                        generator: g.clone(),
                        component,
                        argument_cells: f.argument_cells,
                        result_cell: f.result_cell,
                    }),
                });
            }
        }
    }
    Ok(HomCheck {
        holds: true,
        failure: None,
    })
}

/// `n`-ary operations of the commutant of `theory`, enforcing its generators.
pub fn commutant_slice(theory: &ConcreteTheory, n: usize) -> Result<Arc<TheorySlice>> {
    ConcreteTheory::commutant(theory, 0)?.slice(n)
}

/// `n`-ary maps preserving an explicit generator subset.
pub fn commutant_slice_enforcing(
    carrier: usize,
    enforce: &[OpTable],
    n: usize,
) -> Result<Arc<TheorySlice>> {
    let base = ConcreteTheory::closure(carrier, enforce.to_vec())?;
    commutant_slice(&base, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    Balanced,
    Saturated,
    Commutative,
    CommutesWith,
    MutualCommutant,
    AffineCommutant,
}

/// One compared pair of slices at one arity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArityResult {
    pub arity: usize,
    /// What was compared, e.g. `"mat(z3) vs commutant"`.
    pub comparison: String,
    pub left: usize,
    pub right: usize,
    pub relation: Relation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub label: String,
    pub carrier: usize,
    pub arity: usize,
    pub table: Vec<u8>,
}

impl Witness {
    fn new(label: impl Into<String>, op: &OpTable) -> Self {
        Witness {
            label: label.into(),
            carrier: op.carrier(),
            arity: op.arity(),
            table: op.table().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub holds: bool,
    pub max_arity: usize,
    pub arities: Vec<ArityResult>,
    pub witnesses: Vec<Witness>,
    pub note: String,
}

fn same_carrier(a: &ConcreteTheory, b: &ConcreteTheory) -> Result<()> {
    if a.carrier() != b.carrier() {
        return Err(Error::input(format!(
            "{} lives on {} points, {} on {}",
            a.provenance(),
            a.carrier(),
            b.provenance(),
            b.carrier()
        )));
    }
    Ok(())
}

/// First generator pair `(g, t)` with `g` not a homomorphism for `t`.
fn first_noncommuting(left: &[OpTable], right: &[OpTable]) -> Result<Option<(OpTable, OpTable)>> {
    for g in left {
        for t in right {
            if preservation_failure(t, g)?.is_some() {
                return Ok(Some((g.clone(), t.clone())));
            }
        }
    }
    Ok(None)
}

/// Whether the generators of `a` and `b` commute pairwise. Both enforcement
/// directions are evaluated and must agree.
pub fn commutes(a: &ConcreteTheory, b: &ConcreteTheory) -> Result<Verdict> {
    same_carrier(a, b)?;
    let forward = first_noncommuting(a.generators(), b.generators())?;
    let backward = first_noncommuting(b.generators(), a.generators())?;
    if forward.is_some() != backward.is_some() {
        return Err(Error::Consistency(format!(
            "commutation of {} and {} depends on the enforcement direction",
            a.provenance(),
            b.provenance()
        )));
    }
    let max_arity = a
        .generators()
        .iter()
        .chain(b.generators())
        .map(OpTable::arity)
        .max()
        .unwrap_or(0);
    let (holds, witnesses, note) = match forward {
        None => (
            true,
            Vec::new(),
            format!(
                "every generator of {} commutes with every generator of {}",
                a.provenance(),
                b.provenance()
            ),
        ),
        Some((g, t)) => (
            false,
            vec![
                Witness::new(a.provenance().to_string(), &g),
                Witness::new(b.provenance().to_string(), &t),
            ],
            "generator pair fails to commute".to_string(),
        ),
    };
    Ok(Verdict {
        kind: VerdictKind::CommutesWith,
        holds,
        max_arity,
        arities: Vec::new(),
        witnesses,
        note,
    })
}

fn compare_row(
    arity: usize,
    comparison: String,
    left: &TheorySlice,
    right: &TheorySlice,
) -> Result<(ArityResult, Vec<Witness>)> {
    let cmp = slice_compare(left, right)?;
    let mut witnesses = Vec::new();
    if let Some(op) = cmp.only_left.first() {
        witnesses.push(Witness::new(format!("only left: {comparison}"), op));
    }
    if let Some(op) = cmp.only_right.first() {
        witnesses.push(Witness::new(format!("only right: {comparison}"), op));
    }
    Ok((
        ArityResult {
            arity,
            comparison,
            left: left.len(),
            right: right.len(),
            relation: cmp.relation,
        },
        witnesses,
    ))
}

/// `T ⊆ T⊥`: generator pairs are checked first for a cheap witness, then
/// each slice is compared with the commutant slice.
pub fn is_commutative(theory: &ConcreteTheory, max_arity: usize) -> Result<Verdict> {
    if let Some((g, t)) = first_noncommuting(theory.generators(), theory.generators())? {
        return Ok(Verdict {
            kind: VerdictKind::Commutative,
            holds: false,
            max_arity,
            arities: Vec::new(),
            witnesses: vec![Witness::new("generator", &g), Witness::new("generator", &t)],
            note: format!("two generators of {} do not commute", theory.provenance()),
        });
    }
    let perp = ConcreteTheory::commutant(theory, 0)?;
    let mut arities = Vec::new();
    for n in 0..=max_arity {
        let (row, _) = compare_row(
            n,
            format!("{} vs commutant", theory.provenance()),
            &*theory.slice(n)?,
            &*perp.slice(n)?,
        )?;
        if !matches!(row.relation, Relation::Equal | Relation::LeftSubset) {
            return Err(Error::Consistency(format!(
                "generators of {} commute but its {n}-ary slice is not inside the commutant",
                theory.provenance()
            )));
        }
        arities.push(row);
    }
    Ok(Verdict {
        kind: VerdictKind::Commutative,
        holds: true,
        max_arity,
        arities,
        witnesses: Vec::new(),
        note: format!("slices inside the commutant at arities ≤ {max_arity}"),
    })
}

/// `T = T⊥` at every arity up to `max_arity`.
pub fn is_balanced(theory: &ConcreteTheory, max_arity: usize) -> Result<Verdict> {
    let perp = ConcreteTheory::commutant(theory, 0)?;
    let mut arities = Vec::new();
    let mut witnesses = Vec::new();
    for n in 0..=max_arity {
        let (row, w) = compare_row(
            n,
            format!("{} vs commutant", theory.provenance()),
            &*theory.slice(n)?,
            &*perp.slice(n)?,
        )?;
        if witnesses.is_empty() {
            witnesses = w;
        }
        arities.push(row);
    }
    let holds = witnesses.is_empty();
    let note = if theory.generators_exact() {
        "commutant enforces a full generator set; comparison exact at the checked arities"
    } else {
        "commutant enforces generators up to a bounded arity and may be larger than the true commutant"
    };
    Ok(Verdict {
        kind: VerdictKind::Balanced,
        holds,
        max_arity,
        arities,
        witnesses,
        note: note.to_string(),
    })
}

/// `T = T⊥⊥` at every arity up to `max_arity`, where the double commutant
/// enforces every commutant operation of arity ≤ `max_arity`. That truncated
/// double commutant contains the true one, so equality certifies saturation;
/// a strictly larger truncated double commutant only means "not certified".
pub fn is_saturated(theory: &ConcreteTheory, max_arity: usize) -> Result<Verdict> {
    let perp = ConcreteTheory::commutant(theory, max_arity)?;
    let double = ConcreteTheory::commutant(&perp, 0)?;
    let mut arities = Vec::new();
    let mut witnesses = Vec::new();
    for n in 0..=max_arity {
        let (row, w) = compare_row(
            n,
            format!("{} vs double commutant", theory.provenance()),
            &*theory.slice(n)?,
            &*double.slice(n)?,
        )?;
        if !matches!(row.relation, Relation::Equal | Relation::LeftSubset) {
            return Err(Error::Consistency(format!(
                "{}-ary slice of {} escapes its double commutant",
                n,
                theory.provenance()
            )));
        }
        if witnesses.is_empty() {
            witnesses = w;
        }
        arities.push(row);
    }
    let holds = witnesses.is_empty();
    let note = if holds {
        format!("certified at arities ≤ {max_arity}")
    } else {
        "not certified: truncated double commutant is strictly larger".to_string()
    };
    Ok(Verdict {
        kind: VerdictKind::Saturated,
        holds,
        max_arity,
        arities,
        witnesses,
        note,
    })
}

fn require_faithful(theory: &ConcreteTheory, n: usize) -> Result<()> {
    theory.slice(n)?;
    match theory.duplicates_merged(n) {
        Some(0) => Ok(()),
        Some(k) => Err(Error::Consistency(format!(
            "{} merges {k} coefficient rows at arity {n}; presentation not faithful",
            theory.provenance()
        ))),
        None => Ok(()),
    }
}

type SliceFn<'a> = dyn Fn(usize) -> Result<Arc<TheorySlice>> + 'a;

/// Runs paired comparisons `(a(n), b(n))` for `n ≤ max_arity`.
fn paired(
    kind: VerdictKind,
    max_arity: usize,
    pairs: &[(&str, &SliceFn, &SliceFn)],
    note: &str,
) -> Result<Verdict> {
    let mut arities = Vec::new();
    let mut witnesses = Vec::new();
    for n in 0..=max_arity {
        for (label, left, right) in pairs {
            let (row, w) = compare_row(n, label.to_string(), &*left(n)?, &*right(n)?)?;
            if witnesses.is_empty() {
                witnesses = w;
            }
            arities.push(row);
        }
    }
    Ok(Verdict {
        kind,
        holds: witnesses.is_empty(),
        max_arity,
        arities,
        witnesses,
        note: note.to_string(),
    })
}

/// `mat(R)` and `mat(Rᵒᵖ)` are each other's commutants inside the full theory.
pub fn mutual_commutant(rig: &FiniteRig, max_arity: usize, limits: Limits) -> Result<Verdict> {
    let mat = ConcreteTheory::mat(rig)?.with_limits(limits);
    let op = ConcreteTheory::mat(&opposite(rig))?.with_limits(limits);
    for n in 0..=max_arity {
        require_faithful(&mat, n)?;
        require_faithful(&op, n)?;
    }
    let mat_perp = ConcreteTheory::commutant(&mat, 0)?;
    let op_perp = ConcreteTheory::commutant(&op, 0)?;
    paired(
        VerdictKind::MutualCommutant,
        max_arity,
        &[
            (
                "commutant of mat(R) vs mat(R^op)",
                &|n| mat_perp.slice(n),
                &|n| op.slice(n),
            ),
            (
                "commutant of mat(R^op) vs mat(R)",
                &|n| op_perp.slice(n),
                &|n| mat.slice(n),
            ),
        ],
        "exact: both matrix theories are enforced through full generator sets",
    )
}

/// The affine core of `mat(R)` is the commutant of pointed right `R`-module
/// operations, and conversely. Pointed operations are compared as tables;
/// their coefficient presentation may merge (over the boolean rig the point
/// absorbs addition).
pub fn affine_commutant(rig: &FiniteRig, max_arity: usize, limits: Limits) -> Result<Verdict> {
    let mat = Arc::new(ConcreteTheory::mat(rig)?.with_limits(limits));
    let aff = ConcreteTheory::affine_core(Arc::clone(&mat))?;
    let pointed = ConcreteTheory::pointed_mat(rig)?.with_limits(limits);
    for n in 0..=max_arity {
        require_faithful(&mat, n)?;
    }
    let pointed_perp = ConcreteTheory::commutant(&pointed, 0)?;
    let aff_perp = ConcreteTheory::commutant(&aff, 0)?;
    paired(
        VerdictKind::AffineCommutant,
        max_arity,
        &[
            ("commutant of pointed_mat vs mat_aff", &|n| pointed_perp.slice(n), &|n| aff.slice(n)),
            ("commutant of mat_aff vs pointed_mat", &|n| aff_perp.slice(n), &|n| pointed.slice(n)),
        ],
        "affine generators are bounded in arity, so the commutant of mat_aff is an upper bound; equality certifies",
    )
}
