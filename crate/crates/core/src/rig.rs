//! Finite rigs (semirings) given by addition and multiplication tables.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::finset::OpTable;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteRig {
    name: String,
    size: usize,
    add: OpTable,
    mul: OpTable,
    zero: u8,
    one: u8,
    positive: Option<Vec<u8>>,
}

/// On-disk rig description. Field order is the published schema order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RigFile {
    name: String,
    size: i64,
    zero: i64,
    one: i64,
    add: Vec<Vec<i64>>,
    mul: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    positive: Option<Vec<i64>>,
}

fn element(value: i64, size: usize, place: impl FnOnce() -> String) -> Result<u8> {
    if value < 0 || value as u64 >= size as u64 {
        return Err(Error::input(format!(
            "{} = {value} is outside 0..{size}",
            place()
        )));
    }
    Ok(value as u8)
}

fn square_table(rows: &[Vec<i64>], size: usize, field: &str) -> Result<Vec<u8>> {
    if rows.len() != size {
        return Err(Error::input(format!(
            "{field} has {} rows, expected {size}",
            rows.len()
        )));
    }
    let mut flat = Vec::with_capacity(size * size);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != size {
            return Err(Error::input(format!(
                "{field}[{i}] has {} entries, expected {size}",
                row.len()
            )));
        }
        for (j, &v) in row.iter().enumerate() {
            flat.push(element(v, size, || format!("{field}[{i}][{j}]"))?);
        }
    }
    Ok(flat)
}

impl FiniteRig {
    /// Builds a rig from row-major tables. Only shape and range are checked
    /// here; the axioms are checked by [`validate_rig`].
    pub fn from_tables(
        name: impl Into<String>,
        add: Vec<Vec<u8>>,
        mul: Vec<Vec<u8>>,
        zero: u8,
        one: u8,
        positive: Option<Vec<u8>>,
    ) -> Result<Self> {
        let widen = |t: Vec<Vec<u8>>| -> Vec<Vec<i64>> {
            t.into_iter()
                .map(|r| r.into_iter().map(i64::from).collect())
                .collect()
        };
        let size = add.len() as i64;
        RigFile {
            name: name.into(),
            size,
            zero: zero.into(),
            one: one.into(),
            add: widen(add),
            mul: widen(mul),
            positive: positive.map(|p| p.into_iter().map(i64::from).collect()),
        }
        .into_rig()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: RigFile =
            serde_json::from_str(text).map_err(|e| Error::input(format!("rig JSON: {e}")))?;
        file.into_rig()
    }

    /// Pretty JSON in the published schema.
    pub fn to_json(&self) -> String {
        let rows = |op: &OpTable| -> Vec<Vec<i64>> {
            op.table()
                .chunks(self.size)
                .map(|r| r.iter().map(|&x| i64::from(x)).collect())
                .collect()
        };
        let file = RigFile {
            name: self.name.clone(),
            size: self.size as i64,
            zero: self.zero.into(),
            one: self.one.into(),
            add: rows(&self.add),
            mul: rows(&self.mul),
            positive: self
                .positive
                .as_ref()
                .map(|p| p.iter().map(|&x| i64::from(x)).collect()),
        };
        let mut out = serde_json::to_string_pretty(&file).expect("rig serializes");
        out.push('\n');
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn zero(&self) -> u8 {
        self.zero
    }

    pub fn one(&self) -> u8 {
        self.one
    }

    pub fn positive(&self) -> Option<&[u8]> {
        self.positive.as_deref()
    }

    pub fn add_table(&self) -> &OpTable {
        &self.add
    }

    pub fn mul_table(&self) -> &OpTable {
        &self.mul
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add.at(a as usize * self.size + b as usize)
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul.at(a as usize * self.size + b as usize)
    }

    pub fn sum(&self, terms: impl IntoIterator<Item = u8>) -> u8 {
        terms.into_iter().fold(self.zero, |acc, t| self.add(acc, t))
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        0..self.size as u8
    }

    pub fn is_commutative(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Size 1, where zero and one coincide.
    pub fn is_degenerate(&self) -> bool {
        self.zero == self.one
    }

    /// The materialized positive sub-rig, when one is declared.
    pub fn positive_rig(&self) -> Result<Option<FiniteRig>> {
        match &self.positive {
            None => Ok(None),
            Some(subset) => {
                let report = validate_sub_rig(self, subset)?;
                match report.sub_rig {
                    Some(r) => Ok(Some(r)),
                    None => Err(Error::input(format!(
                        "positive part of {} is not a sub-rig",
                        self.name
                    ))),
                }
            }
        }
    }
}

impl RigFile {
    fn into_rig(self) -> Result<FiniteRig> {
        if self.size < 1 || self.size > 64 {
            return Err(Error::input(format!(
                "size = {} is outside 1..=64",
                self.size
            )));
        }
        let size = self.size as usize;
        let add = square_table(&self.add, size, "add")?;
        let mul = square_table(&self.mul, size, "mul")?;
        let zero = element(self.zero, size, || "zero".into())?;
        let one = element(self.one, size, || "one".into())?;
        let positive = match self.positive {
            None => None,
            Some(p) => Some(
                p.iter()
                    .enumerate()
                    .map(|(i, &v)| element(v, size, || format!("positive[{i}]")))
                    .collect::<Result<Vec<u8>>>()?,
            ),
        };
        Ok(FiniteRig {
            name: self.name,
            size,
            add: OpTable::new(size, 2, add)?,
            mul: OpTable::new(size, 2, mul)?,
            zero,
            one,
            positive,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    AddAssociative,
    AddCommutative,
    AddIdentity,
    MulAssociative,
    MulIdentity,
    LeftDistributive,
    RightDistributive,
    LeftAnnihilation,
    RightAnnihilation,
    ContainsZero,
    ContainsOne,
    AddClosed,
    MulClosed,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("axiom serializes");
        write!(f, "{}", s.as_str().unwrap_or("?"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub witness: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RigReport {
    pub name: String,
    pub violations: Vec<AxiomViolation>,
    pub is_ring: bool,
    pub is_commutative: bool,
    pub degenerate: bool,
}

impl RigReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustive axiom check. Every failing instance is listed with its witness
/// tuple; a declared positive part is checked as a sub-rig as well.
pub fn validate_rig(rig: &FiniteRig) -> RigReport {
    let els: Vec<u8> = rig.elements().collect();
    let mut v = Vec::new();
    let mut push = |axiom, witness: &[u8]| {
        v.push(AxiomViolation {
            axiom,
            witness: witness.to_vec(),
        })
    };
    let (z, o) = (rig.zero, rig.one);
    for &a in &els {
        if rig.add(a, z) != a || rig.add(z, a) != a {
            push(Axiom::AddIdentity, &[a]);
        }
        if rig.mul(a, o) != a || rig.mul(o, a) != a {
            push(Axiom::MulIdentity, &[a]);
        }
        if rig.mul(z, a) != z {
            push(Axiom::LeftAnnihilation, &[a]);
        }
        if rig.mul(a, z) != z {
            push(Axiom::RightAnnihilation, &[a]);
        }
        for &b in &els {
            if a < b && rig.add(a, b) != rig.add(b, a) {
                push(Axiom::AddCommutative, &[a, b]);
            }
            for &c in &els {
                if rig.add(rig.add(a, b), c) != rig.add(a, rig.add(b, c)) {
                    push(Axiom::AddAssociative, &[a, b, c]);
                }
                if rig.mul(rig.mul(a, b), c) != rig.mul(a, rig.mul(b, c)) {
                    push(Axiom::MulAssociative, &[a, b, c]);
                }
                if rig.mul(a, rig.add(b, c)) != rig.add(rig.mul(a, b), rig.mul(a, c)) {
                    push(Axiom::LeftDistributive, &[a, b, c]);
                }
                if rig.mul(rig.add(a, b), c) != rig.add(rig.mul(a, c), rig.mul(b, c)) {
                    push(Axiom::RightDistributive, &[a, b, c]);
                }
            }
        }
    }
    if let Some(subset) = &rig.positive {
        v.extend(sub_rig_violations(rig, subset));
    }
    let is_ring = els.iter().all(|&a| els.iter().any(|&b| rig.add(a, b) == z));
    RigReport {
        name: rig.name.clone(),
        violations: v,
        is_ring,
        is_commutative: rig.is_commutative(),
        degenerate: rig.is_degenerate(),
    }
}

/// The opposite rig: multiplication transposed, everything else unchanged.
pub fn opposite(rig: &FiniteRig) -> FiniteRig {
    let s = rig.size;
    let mul = OpTable::from_fn(s, 2, |x| rig.mul(x[1], x[0])).expect("same carrier");
    FiniteRig { mul, ..rig.clone() }
}

fn sub_rig_violations(rig: &FiniteRig, subset: &[u8]) -> Vec<AxiomViolation> {
    let mut member = vec![false; rig.size];
    for &x in subset {
        member[x as usize] = true;
    }
    let mut v = Vec::new();
    if !member[rig.zero as usize] {
        v.push(AxiomViolation {
            axiom: Axiom::ContainsZero,
            witness: vec![rig.zero],
        });
    }
    if !member[rig.one as usize] {
        v.push(AxiomViolation {
            axiom: Axiom::ContainsOne,
            witness: vec![rig.one],
        });
    }
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    for &a in &sorted {
        for &b in &sorted {
            if !member[rig.add(a, b) as usize] {
                v.push(AxiomViolation {
                    axiom: Axiom::AddClosed,
                    witness: vec![a, b],
                });
            }
            if !member[rig.mul(a, b) as usize] {
                v.push(AxiomViolation {
                    axiom: Axiom::MulClosed,
                    witness: vec![a, b],
                });
            }
        }
    }
    v
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubRigReport {
    pub violations: Vec<AxiomViolation>,
    /// On success, the sub-rig re-indexed along the sorted subset.
    pub sub_rig: Option<FiniteRig>,
}

impl SubRigReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_sub_rig(rig: &FiniteRig, subset: &[u8]) -> Result<SubRigReport> {
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    if let Some(&bad) = sorted.iter().find(|&&x| x as usize >= rig.size) {
        return Err(Error::input(format!(
            "subset element {bad} is outside carrier of size {}",
            rig.size
        )));
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::input("subset lists an element twice"));
    }
    let violations = sub_rig_violations(rig, &sorted);
    if !violations.is_empty() {
        return Ok(SubRigReport {
            violations,
            sub_rig: None,
        });
    }
    let pos = |x: u8| sorted.iter().position(|&y| y == x).expect("closed") as u8;
    let table = |f: &dyn Fn(u8, u8) -> u8| -> Vec<Vec<u8>> {
        sorted
            .iter()
            .map(|&a| sorted.iter().map(|&b| pos(f(a, b))).collect())
            .collect()
    };
    let sub = FiniteRig::from_tables(
        format!("{}+", rig.name),
        table(&|a, b| rig.add(a, b)),
        table(&|a, b| rig.mul(a, b)),
        pos(rig.zero),
        pos(rig.one),
        None,
    )?;
    Ok(SubRigReport {
        violations,
        sub_rig: Some(sub),
    })
}

/// An `m × n` matrix over a finite rig, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<'r> {
    rig: &'r FiniteRig,
    rows: usize,
    cols: usize,
    entries: Vec<u8>,
}

impl<'r> Matrix<'r> {
    pub fn new(rig: &'r FiniteRig, rows: usize, cols: usize, entries: Vec<u8>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::input(format!(
                "{rows}×{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(&bad) = entries.iter().find(|&&x| x as usize >= rig.size) {
            return Err(Error::input(format!(
                "matrix entry {bad} is outside rig {}",
                rig.name
            )));
        }
        Ok(Matrix {
            rig,
            rows,
            cols,
            entries,
        })
    }

    pub fn identity(rig: &'r FiniteRig, n: usize) -> Self {
        let entries = (0..n * n)
            .map(|k| if k / n == k % n { rig.one } else { rig.zero })
            .collect();
        Matrix {
            rig,
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i * self.cols + j]
    }
}

/// `(ba)ₖᵢ = ∑ⱼ bₖⱼ·aⱼᵢ` for `b: ℓ×m` and `a: m×n`.
pub fn matrix_multiply<'r>(b: &Matrix<'r>, a: &Matrix<'r>) -> Result<Matrix<'r>> {
    if b.rig != a.rig {
        return Err(Error::input(format!(
            "matrices over different rigs {} and {}",
            b.rig.name, a.rig.name
        )));
    }
    if b.cols != a.rows {
        return Err(Error::input(format!(
            "cannot multiply {}×{} by {}×{}",
            b.rows, b.cols, a.rows, a.cols
        )));
    }
    let rig = b.rig;
    let mut entries = Vec::with_capacity(b.rows * a.cols);
    for k in 0..b.rows {
        for i in 0..a.cols {
            entries.push(rig.sum((0..b.cols).map(|j| rig.mul(b.get(k, j), a.get(j, i)))));
        }
    }
    Ok(Matrix {
        rig,
        rows: b.rows,
        cols: a.cols,
        entries,
    })
}

/// A shipped rig together with the verdicts it is expected to produce.
#[derive(Debug, Clone)]
pub struct RegistryEntry {
    pub rig: FiniteRig,
    pub expect_ring: bool,
    pub expect_commutative: bool,
}

fn tabulate(size: usize, f: impl Fn(usize, usize) -> usize) -> Vec<Vec<u8>> {
    (0..size)
        .map(|a| (0..size).map(|b| f(a, b) as u8).collect())
        .collect()
}

/// The two-element rig with `∧` as addition (zero `⊤ = 1`) and `∨` as
/// multiplication (one `⊥ = 0`). Its modules are meet semilattices.
pub fn bool2() -> FiniteRig {
    FiniteRig::from_tables(
        "bool2",
        tabulate(2, |a, b| a & b),
        tabulate(2, |a, b| a | b),
        1,
        0,
        None,
    )
    .expect("well-formed")
}

/// Whether `rig` has exactly the tables and constants of [`bool2`].
pub fn is_boolean(rig: &FiniteRig) -> bool {
    let b = bool2();
    rig.add == b.add && rig.mul == b.mul && rig.zero == b.zero && rig.one == b.one
}

pub fn zmod(n: usize) -> FiniteRig {
    FiniteRig::from_tables(
        format!("z{n}"),
        tabulate(n, |a, b| (a + b) % n),
        tabulate(n, |a, b| (a * b) % n),
        0,
        (1 % n) as u8,
        None,
    )
    .expect("well-formed")
}

/// `{0,…,k}` with `a ⊕ b = min(a+b, k)` and `a ⊗ b = min(ab, k)`.
pub fn saturating(k: usize) -> FiniteRig {
    FiniteRig::from_tables(
        format!("sat{k}"),
        tabulate(k + 1, |a, b| (a + b).min(k)),
        tabulate(k + 1, |a, b| (a * b).min(k)),
        0,
        1.min(k as u8),
        None,
    )
    .expect("well-formed")
}

/// Four elements: addition is join on the chain `0 < 2 < 1 < 3`, and
/// multiplication restricted to `{2, 3}` is the left-zero band `xy = x`.
pub fn left_zero4() -> FiniteRig {
    let add = vec![
        vec![0, 1, 2, 3],
        vec![1, 1, 1, 3],
        vec![2, 1, 2, 3],
        vec![3, 3, 3, 3],
    ];
    let mul = vec![
        vec![0, 0, 0, 0],
        vec![0, 1, 2, 3],
        vec![0, 2, 2, 2],
        vec![0, 3, 3, 3],
    ];
    FiniteRig::from_tables("lz4", add, mul, 0, 1, None).expect("well-formed")
}

pub fn registry() -> Vec<RegistryEntry> {
    let entry = |rig, expect_ring, expect_commutative| RegistryEntry {
        rig,
        expect_ring,
        expect_commutative,
    };
    vec![
        entry(bool2(), false, true),
        entry(zmod(2), true, true),
        entry(zmod(3), true, true),
        entry(zmod(4), true, true),
        entry(saturating(2), false, true),
        entry(left_zero4(), false, false),
    ]
}

pub fn registry_rig(name: &str) -> Option<FiniteRig> {
    registry()
        .into_iter()
        .map(|e| e.rig)
        .find(|r| r.name == name)
}
