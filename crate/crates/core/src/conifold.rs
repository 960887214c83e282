//! Exact arithmetic in the conifold algebra
//! `Λ_c = ℂ⟨X, Y, Z⟩ / (Z² − 1, XZ + ZX, YZ + ZY, [X², Y], [Y², X])`.
//!
//! With central `x = X²`, `y = Y²` and `z = (XY + YX)/2` the algebra is free
//! over `ℂ[x, y, z]` on `1, X, Y, Z, XY, XZ, YZ, XYZ`. Elements are stored as
//! eight coefficient polynomials; words are brought to normal form by
//!
//! ```text
//! ZZ → 1    ZX → −XZ    ZY → −YZ    XX → x    YY → y    YX → 2z − XY
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{rat, ratio, QMatrix, Rational};

/// Polynomial in the central variables `x, y, z` with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CenterPoly {
    terms: BTreeMap<[u32; 3], Rational>,
}

impl CenterPoly {
    pub fn zero() -> Self {
        CenterPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, [0, 0, 0])
    }

    pub fn int(c: i64) -> Self {
        Self::constant(rat(c))
    }

    pub fn monomial(c: Rational, exps: [u32; 3]) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        CenterPoly { terms }
    }

    pub fn x() -> Self {
        Self::monomial(rat(1), [1, 0, 0])
    }

    pub fn y() -> Self {
        Self::monomial(rat(1), [0, 1, 0])
    }

    pub fn z() -> Self {
        Self::monomial(rat(1), [0, 0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 3], &Rational)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        CenterPoly {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    fn add_term(&mut self, e: [u32; 3], c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// `self += p · q`.
    fn add_product(&mut self, p: &CenterPoly, q: &CenterPoly) {
        for (ea, ca) in &p.terms {
            for (eb, cb) in &q.terms {
                self.add_term([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], ca * cb);
            }
        }
    }

    /// Evaluates at rational `(x, y, z)`.
    pub fn eval(&self, at: [&Rational; 3]) -> Rational {
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &p) in at.iter().zip(e) {
                for _ in 0..p {
                    t *= *v;
                }
            }
            total += t;
        }
        total
    }
}

impl Add for &CenterPoly {
    type Output = CenterPoly;
    fn add(self, rhs: &CenterPoly) -> CenterPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &CenterPoly {
    type Output = CenterPoly;
    fn sub(self, rhs: &CenterPoly) -> CenterPoly {
        self + &(-rhs)
    }
}

impl Neg for &CenterPoly {
    type Output = CenterPoly;
    fn neg(self) -> CenterPoly {
        CenterPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Mul for &CenterPoly {
    type Output = CenterPoly;
    fn mul(self, rhs: &CenterPoly) -> CenterPoly {
        let mut out = CenterPoly::zero();
        out.add_product(self, rhs);
        out
    }
}

impl fmt::Display for CenterPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let vars: String = ["x", "y", "z"]
                    .iter()
                    .zip(e)
                    .filter(|(_, &p)| p > 0)
                    .map(|(v, &p)| if p == 1 { v.to_string() } else { format!("{v}^{p}") })
                    .collect::<Vec<_>>()
                    .join("*");
                match (vars.is_empty(), c.is_one()) {
                    (true, _) => c.to_string(),
                    (false, true) => vars,
                    (false, false) => format!("{c}*{vars}"),
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Letter {
    X,
    Y,
    Z,
}

impl Letter {
    fn bit(self) -> usize {
        match self {
            Letter::X => 1,
            Letter::Y => 2,
            Letter::Z => 4,
        }
    }
}

/// Normal monomials indexed by bitmask: bit 0 = X, bit 1 = Y, bit 2 = Z,
/// read left to right in the order X, Y, Z.
pub const BASIS_NAMES: [&str; 8] = ["1", "X", "Y", "XY", "Z", "XZ", "YZ", "XYZ"];

pub fn basis_word(i: usize) -> Vec<Letter> {
    [Letter::X, Letter::Y, Letter::Z]
        .into_iter()
        .filter(|l| i & l.bit() != 0)
        .collect()
}

/// An element of `Λ_c` as coefficients on the eight normal monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ConifoldElement {
    coeffs: [CenterPoly; 8],
}

impl ConifoldElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::basis(0)
    }

    pub fn basis(i: usize) -> Self {
        Self::central_times_basis(CenterPoly::int(1), i)
    }

    pub fn central(p: CenterPoly) -> Self {
        Self::central_times_basis(p, 0)
    }

    pub fn central_times_basis(p: CenterPoly, i: usize) -> Self {
        let mut out = Self::zero();
        out.coeffs[i] = p;
        out
    }

    pub fn letter(l: Letter) -> Self {
        Self::basis(l.bit())
    }

    pub fn x_gen() -> Self {
        Self::letter(Letter::X)
    }

    pub fn y_gen() -> Self {
        Self::letter(Letter::Y)
    }

    pub fn z_gen() -> Self {
        Self::letter(Letter::Z)
    }

    pub fn coeff(&self, i: usize) -> &CenterPoly {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(CenterPoly::is_zero)
    }

    pub fn scale(&self, p: &CenterPoly) -> Self {
        ConifoldElement {
            coeffs: std::array::from_fn(|i| &self.coeffs[i] * p),
        }
    }

    pub fn multiply(&self, rhs: &ConifoldElement) -> ConifoldElement {
        let table = basis_table();
        let mut out = ConifoldElement::zero();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (acc, t) in out.coeffs.iter_mut().zip(&table[i][j].coeffs) {
                    if !t.is_zero() {
                        acc.add_product(t, &ab);
                    }
                }
            }
        }
        out
    }

    /// `[a, b] = ab − ba`.
    pub fn commutator(&self, rhs: &ConifoldElement) -> ConifoldElement {
        &self.multiply(rhs) - &rhs.multiply(self)
    }

    /// Whether all coefficients lie in the span of X, Y, Z.
    fn in_generator_span(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| c.is_zero() || matches!(i, 1 | 2 | 4))
    }
}

impl Add for &ConifoldElement {
    type Output = ConifoldElement;
    fn add(self, rhs: &ConifoldElement) -> ConifoldElement {
        ConifoldElement {
            coeffs: std::array::from_fn(|i| &self.coeffs[i] + &rhs.coeffs[i]),
        }
    }
}

impl Sub for &ConifoldElement {
    type Output = ConifoldElement;
    fn sub(self, rhs: &ConifoldElement) -> ConifoldElement {
        ConifoldElement {
            coeffs: std::array::from_fn(|i| &self.coeffs[i] - &rhs.coeffs[i]),
        }
    }
}

impl Neg for &ConifoldElement {
    type Output = ConifoldElement;
    fn neg(self) -> ConifoldElement {
        ConifoldElement {
            coeffs: std::array::from_fn(|i| -&self.coeffs[i]),
        }
    }
}

impl Mul for &ConifoldElement {
    type Output = ConifoldElement;
    fn mul(self, rhs: &ConifoldElement) -> ConifoldElement {
        self.multiply(rhs)
    }
}

impl fmt::Display for ConifoldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                if i == 0 {
                    format!("({c})")
                } else {
                    format!("({c})*{}", BASIS_NAMES[i])
                }
            })
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// A central coefficient times a word in X, Y, Z.
type Term = (CenterPoly, Vec<Letter>);

/// Rewrites the leftmost reducible pair of `word`, or returns `None` if normal.
fn rewrite_once(word: &[Letter]) -> Option<Vec<Term>> {
    use Letter::*;
    for p in 0..word.len().saturating_sub(1) {
        let (pre, post) = (&word[..p], &word[p + 2..]);
        let with = |mid: &[Letter]| -> Vec<Letter> { pre.iter().chain(mid).chain(post).copied().collect() };
        let out = match (word[p], word[p + 1]) {
            (Z, Z) => vec![(CenterPoly::int(1), with(&[]))],
            (Z, X) => vec![(CenterPoly::int(-1), with(&[X, Z]))],
            (Z, Y) => vec![(CenterPoly::int(-1), with(&[Y, Z]))],
            (X, X) => vec![(CenterPoly::x(), with(&[]))],
            (Y, Y) => vec![(CenterPoly::y(), with(&[]))],
            (Y, X) => vec![
                (CenterPoly::z().scale(&rat(2)), with(&[])),
                (CenterPoly::int(-1), with(&[X, Y])),
            ],
            _ => continue,
        };
        return Some(out);
    }
    None
}

fn normal_index(word: &[Letter]) -> Option<usize> {
    let mut idx = 0;
    let mut last = 0;
    for l in word {
        let b = l.bit();
        if b <= last {
            return None;
        }
        idx |= b;
        last = b;
    }
    Some(idx)
}

/// Normal form of `coeff · word`. Each rule shortens the word or removes an
/// inversion, so rewriting terminates.
pub fn word_normal_form(word: &[Letter], coeff: &Rational) -> ConifoldElement {
    let mut out = ConifoldElement::zero();
    let mut stack: Vec<Term> = vec![(CenterPoly::constant(coeff.clone()), word.to_vec())];
    while let Some((c, w)) = stack.pop() {
        if c.is_zero() {
            continue;
        }
        match rewrite_once(&w) {
            Some(terms) => {
                for (tc, tw) in terms {
                    stack.push((&c * &tc, tw));
                }
            }
            None => {
                let idx = normal_index(&w).expect("irreducible words are normal monomials");
                out.coeffs[idx] = &out.coeffs[idx] + &c;
            }
        }
    }
    out
}

/// `table[i][j]` = normal form of `basis_i · basis_j`.
pub fn basis_table() -> &'static [[ConifoldElement; 8]; 8] {
    static TABLE: OnceLock<[[ConifoldElement; 8]; 8]> = OnceLock::new();
    TABLE.get_or_init(|| {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut w = basis_word(i);
                w.extend(basis_word(j));
                word_normal_form(&w, &rat(1))
            })
        })
    })
}

/// One overlap of two rewrite rules and whether both reductions agree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalPair {
    pub word: String,
    pub resolved: bool,
}

fn rule_lhs() -> [[Letter; 2]; 6] {
    use Letter::*;
    [[Z, Z], [Z, X], [Z, Y], [X, X], [Y, Y], [Y, X]]
}

fn normalize_terms(terms: Vec<Term>) -> ConifoldElement {
    let mut out = ConifoldElement::zero();
    for (c, w) in terms {
        out = &out + &word_normal_form(&w, &rat(1)).scale(&c);
    }
    out
}

/// Every length-3 overlap `abc` with rules on `ab` and `bc`, reduced first at
/// the left pair and first at the right pair.
pub fn critical_pairs() -> Vec<CriticalPair> {
    let mut out = Vec::new();
    for l in rule_lhs() {
        for r in rule_lhs() {
            if l[1] != r[0] {
                continue;
            }
            let word = [l[0], l[1], r[1]];
            let left = rewrite_once(&word).expect("left pair is a rule");
            let right = rewrite_once(&word[1..]).expect("right pair is a rule");
            let right: Vec<Term> = right
                .into_iter()
                .map(|(c, w)| (c, std::iter::once(word[0]).chain(w).collect()))
                .collect();
            out.push(CriticalPair {
                word: word.iter().map(|l| format!("{l:?}")).collect(),
                resolved: normalize_terms(left) == normalize_terms(right),
            });
        }
    }
    out
}

/// Commutes with X, Y and Z.
pub fn is_central(a: &ConifoldElement) -> bool {
    [Letter::X, Letter::Y, Letter::Z]
        .into_iter()
        .all(|l| a.commutator(&ConifoldElement::letter(l)).is_zero())
}

/// `D = XYZ − YXZ`.
pub fn d_element() -> ConifoldElement {
    use Letter::*;
    &word_normal_form(&[X, Y, Z], &rat(1)) - &word_normal_form(&[Y, X, Z], &rat(1))
}

/// `B_q` on the coordinates `(X, Y, Z)`: `[[x, z, 0], [z, y, 0], [0, 0, 1]]`.
pub fn ternary_form() -> [[CenterPoly; 3]; 3] {
    [
        [CenterPoly::x(), CenterPoly::z(), CenterPoly::zero()],
        [CenterPoly::z(), CenterPoly::y(), CenterPoly::zero()],
        [CenterPoly::zero(), CenterPoly::zero(), CenterPoly::int(1)],
    ]
}

/// Checks `vw + wv = 2 B_q(v, w)` for `v, w` in the span of X, Y, Z.
pub fn clifford_check(v: &ConifoldElement, w: &ConifoldElement) -> Result<bool> {
    if !v.in_generator_span() || !w.in_generator_span() {
        return Err(Error::Domain(
            "Clifford identity needs elements in the span of X, Y, Z".into(),
        ));
    }
    let idx = [1, 2, 4];
    let b = ternary_form();
    let mut form = CenterPoly::zero();
    for i in 0..3 {
        for j in 0..3 {
            form = &form + &(&(v.coeff(idx[i]) * w.coeff(idx[j])) * &b[i][j]);
        }
    }
    let lhs = &v.multiply(w) + &w.multiply(v);
    Ok(lhs == ConifoldElement::central(form.scale(&rat(2))))
}

/// A point `(x_1..x_3, y_1..y_3, z_1..z_3)` of the trace-zero 2-dimensional
/// representation scheme, given by the images of X, Y, Z in `sl_2` coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trep2Point {
    pub x: [Rational; 3],
    pub y: [Rational; 3],
    pub z: [Rational; 3],
}

impl Trep2Point {
    pub fn from_i64(x: [i64; 3], y: [i64; 3], z: [i64; 3]) -> Self {
        Trep2Point {
            x: x.map(rat),
            y: y.map(rat),
            z: z.map(rat),
        }
    }

    pub fn coordinates(&self) -> Vec<Rational> {
        self.x.iter().chain(&self.y).chain(&self.z).cloned().collect()
    }
}

/// `(2x₁z₁ + x₂z₃ + x₃z₂, 2y₁z₁ + y₂z₃ + y₃z₂, z₁² + z₂z₃ − 1)`.
pub fn trep2_residuals(p: &Trep2Point) -> [Rational; 3] {
    let pair = |u: &[Rational; 3]| &(&(rat(2) * &u[0]) * &p.z[0]) + &(&(&u[1] * &p.z[2]) + &(&u[2] * &p.z[1]));
    [
        pair(&p.x),
        pair(&p.y),
        &(&(&p.z[0] * &p.z[0]) + &(&p.z[1] * &p.z[2])) - &rat(1),
    ]
}

pub fn trep2_on_variety(p: &Trep2Point) -> bool {
    trep2_residuals(p).iter().all(Zero::is_zero)
}

/// Jacobian of the three equations in the variables `x₁..z₃`.
pub fn trep2_jacobian(p: &Trep2Point) -> QMatrix {
    let zero = Rational::zero;
    let two = rat(2);
    let (x, y, z) = (&p.x, &p.y, &p.z);
    let rows = vec![
        vec![
            &two * &z[0], z[2].clone(), z[1].clone(), zero(), zero(), zero(),
            &two * &x[0], x[2].clone(), x[1].clone(),
        ],
        vec![
            zero(), zero(), zero(), &two * &z[0], z[2].clone(), z[1].clone(),
            &two * &y[0], y[2].clone(), y[1].clone(),
        ],
        vec![
            zero(), zero(), zero(), zero(), zero(), zero(),
            &two * &z[0], z[2].clone(), z[1].clone(),
        ],
    ];
    QMatrix::from_rows(rows).expect("rows have equal length")
}

pub fn trep2_jacobian_rank(p: &Trep2Point) -> Result<usize> {
    if !trep2_on_variety(p) {
        return Err(Error::Precondition("point does not satisfy the trep2 equations".into()));
    }
    Ok(trep2_jacobian(p).rank())
}

fn small_rational(rng: &mut ChaCha8Rng, nonzero: bool) -> Rational {
    loop {
        let q = ratio(rng.gen_range(-9..=9), rng.gen_range(1..=5));
        if !nonzero || !q.is_zero() {
            return q;
        }
    }
}

/// `count` exact points on the variety. Two in three use the chart `z₁ ≠ 0`
/// (solving for `z₃`, `x₁`, `y₁`), the rest the chart `z₁ = 0` (solving for
/// `z₃`, `x₂`, `y₂`).
pub fn trep2_sample(count: usize, seed: u64) -> Vec<Trep2Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            if i % 3 == 2 {
                let z2 = small_rational(&mut rng, true);
                let z = [Rational::zero(), z2.clone(), Rational::one() / &z2];
                let mut side = || {
                    let u1 = small_rational(&mut rng, false);
                    let u3 = small_rational(&mut rng, false);
                    let u2 = -(&u3 * &z[1]) / &z[2];
                    [u1, u2, u3]
                };
                let (x, y) = (side(), side());
                Trep2Point { x, y, z }
            } else {
                let z1 = small_rational(&mut rng, true);
                let z2 = small_rational(&mut rng, true);
                let z3 = (Rational::one() - &z1 * &z1) / &z2;
                let z = [z1, z2, z3];
                let mut side = || {
                    let u2 = small_rational(&mut rng, false);
                    let u3 = small_rational(&mut rng, false);
                    let u1 = -(&(&u2 * &z[2]) + &(&u3 * &z[1])) / (rat(2) * &z[0]);
                    [u1, u2, u3]
                };
                let (x, y) = (side(), side());
                Trep2Point { x, y, z }
            }
        })
        .collect()
}

/// The five defining relations evaluated on matrices for X, Y, Z.
pub fn defining_relations(x: &QMatrix, y: &QMatrix, z: &QMatrix) -> Result<Vec<QMatrix>> {
    let n = x.rows();
    let id = QMatrix::identity(n);
    let mul = |a: &QMatrix, b: &QMatrix| a.checked_mul(b);
    let sub = |a: &QMatrix, b: &QMatrix| a.checked_add(&b.scale(&rat(-1)));
    let x2 = mul(x, x)?;
    let y2 = mul(y, y)?;
    Ok(vec![
        sub(&mul(z, z)?, &id)?,
        mul(x, z)?.checked_add(&mul(z, x)?)?,
        mul(y, z)?.checked_add(&mul(z, y)?)?,
        sub(&mul(&x2, y)?, &mul(y, &x2)?)?,
        sub(&mul(&y2, x)?, &mul(x, &y2)?)?,
    ])
}

/// A random element whose coefficients have degree at most `max_degree`.
pub fn random_element(rng: &mut ChaCha8Rng, max_degree: u32) -> ConifoldElement {
    let mut out = ConifoldElement::zero();
    for i in 0..8 {
        let mut p = CenterPoly::zero();
        for a in 0..=max_degree {
            for b in 0..=max_degree - a {
                for c in 0..=max_degree - a - b {
                    if rng.gen_bool(0.4) {
                        p.add_term([a, b, c], rat(rng.gen_range(-3..=3)));
                    }
                }
            }
        }
        out.coeffs[i] = p;
    }
    out
}

pub fn random_center_poly(rng: &mut ChaCha8Rng, max_degree: u32) -> CenterPoly {
    random_element(rng, max_degree).coeffs[0].clone()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BatteryCheck {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub counterexamples: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BatteryReport {
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<BatteryCheck>,
}

impl BatteryReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, failures: Vec<String>) -> BatteryCheck {
    BatteryCheck {
        name: name.to_string(),
        passed: failures.is_empty(),
        counterexamples: failures.into_iter().take(5).collect(),
    }
}

/// Runs every structural check with `samples` random instances each.
pub fn verify_battery(seed: u64, samples: usize) -> BatteryReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let unresolved: Vec<String> = critical_pairs()
        .into_iter()
        .filter(|c| !c.resolved)
        .map(|c| c.word)
        .collect();
    checks.push(check("critical pairs resolve", unresolved));

    let table = basis_table();
    let mut table_failures = Vec::new();
    for (i, row) in table.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            let direct = ConifoldElement::basis(i).multiply(&ConifoldElement::basis(j));
            let mut word = basis_word(i);
            word.extend(basis_word(j));
            if *entry != word_normal_form(&word, &rat(1)) || direct != *entry {
                table_failures.push(format!("{}·{}", BASIS_NAMES[i], BASIS_NAMES[j]));
            }
        }
    }
    checks.push(check("basis product table", table_failures));

    let d = d_element();
    checks.push(check(
        "D central",
        if is_central(&d) { vec![] } else { vec![d.to_string()] },
    ));
    let d2 = d.multiply(&d);
    let want = ConifoldElement::central(
        (&(&CenterPoly::z() * &CenterPoly::z()) - &(&CenterPoly::x() * &CenterPoly::y())).scale(&rat(4)),
    );
    checks.push(check(
        "D^2 = 4(z^2 - xy)",
        if d2 == want { vec![] } else { vec![d2.to_string()] },
    ));

    let mut central_failures = Vec::new();
    for p in [CenterPoly::x(), CenterPoly::y(), CenterPoly::z()] {
        if !is_central(&ConifoldElement::central(p.clone())) {
            central_failures.push(p.to_string());
        }
    }
    for _ in 0..samples.min(50) {
        let p = random_center_poly(&mut rng, 2);
        let q = random_center_poly(&mut rng, 2);
        let e = &ConifoldElement::central(p) + &d.scale(&q);
        if !is_central(&e) {
            central_failures.push(e.to_string());
        }
    }
    for (i, name) in BASIS_NAMES.iter().enumerate().take(7).skip(1) {
        if is_central(&ConifoldElement::basis(i)) {
            central_failures.push(format!("{name} reported central"));
        }
    }
    checks.push(check("center membership", central_failures));

    let mut assoc = Vec::new();
    for _ in 0..samples {
        let a = random_element(&mut rng, 2);
        let b = random_element(&mut rng, 2);
        let c = random_element(&mut rng, 2);
        if a.multiply(&b).multiply(&c) != a.multiply(&b.multiply(&c)) {
            assoc.push(format!("a = {a}, b = {b}, c = {c}"));
        }
    }
    checks.push(check("associativity", assoc));

    let gens = [Letter::X, Letter::Y, Letter::Z];
    let mut clifford = Vec::new();
    for &l in &gens {
        for &m in &gens {
            let ok = clifford_check(&ConifoldElement::letter(l), &ConifoldElement::letter(m));
            if ok != Ok(true) {
                clifford.push(format!("{l:?}, {m:?}"));
            }
        }
    }
    checks.push(check("Clifford identities on X, Y, Z", clifford));

    let mut ranks = Vec::new();
    for p in trep2_sample(samples, seed) {
        match trep2_jacobian_rank(&p) {
            Ok(3) => {}
            other => ranks.push(format!("{:?} at {:?}", other, p.coordinates())),
        }
    }
    checks.push(check("trep2 Jacobian rank 3", ranks));

    let mut phi = Vec::new();
    for sign in [1, -1] {
        let zero = QMatrix::zeros(1, 1);
        let z = QMatrix::scalar(rat(sign));
        let rels = defining_relations(&zero, &zero, &z).expect("1x1 matrices");
        if rels.iter().any(|r| !r.is_zero()) {
            phi.push(format!("Z = {sign}"));
        }
    }
    checks.push(check("one-dimensional representations", phi));

    BatteryReport {
        seed,
        samples,
        checks,
    }
}
