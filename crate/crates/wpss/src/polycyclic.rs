//! Word-problem decisions for consistent polycyclic presentations by
//! collection from the left: push low-index generators leftward with the
//! conjugation tables, reduce power ranges, read off the normal form
//! `x_1^{e_1} ... x_k^{e_k}`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::presentation::{Family, GroupPresentation, Relator};
use crate::word::{Generators, Letter, Sign, Word};

/// Default cap on rewrite steps per collection.
pub const DEFAULT_PC_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PcError {
    #[error("presentation family is {0}, not polycyclic")]
    WrongFamily(Family),
    #[error("relator {index} is not a polycyclic conjugation or power relator")]
    NotPolycyclicShape { index: usize },
    #[error("relator {index}: conjugate value must be x_j^±1 followed by strictly later generators")]
    NonTriangular { index: usize },
    #[error("relator {index}: power tail must use strictly later generators")]
    BadPowerTail { index: usize },
    #[error("conjugate value for pair ({i}, {j}) must be x_j^±1 followed by strictly later generators")]
    BadConjugateValue { i: usize, j: usize },
    #[error("power tail for generator {l} must use strictly later generators")]
    BadPowerValue { l: usize },
    #[error("no conjugation relator for generator pair ({i}, {j})")]
    MissingConjugationPair { i: usize, j: usize },
    #[error("relators {first} and {second} define the same rule")]
    DuplicateRule { first: usize, second: usize },
    #[error("word uses generator index {gen} but the presentation has {k} generators")]
    GeneratorOutOfRange { gen: usize, k: usize },
    #[error("budget of {budget} rewrite steps exhausted (undecided)")]
    BudgetExhausted { budget: u64, steps: u64 },
}

/// A power relation `x_l^{exponent} = tail` with the tail over strictly
/// later generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerRelation {
    pub exponent: u32,
    pub tail: Word,
}

/// Collected form: exponent vector of `x_1^{e_1} ... x_k^{e_k}` with
/// `0 <= e_l < r_l` wherever a power relation constrains `x_l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub exponents: Vec<i64>,
}

impl NormalForm {
    pub fn is_identity(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// The collected word this vector denotes.
    pub fn to_word(&self) -> Word {
        let mut letters = Vec::new();
        for (gen, &exp) in self.exponents.iter().enumerate() {
            let sign = if exp >= 0 { Sign::Plus } else { Sign::Minus };
            for _ in 0..exp.unsigned_abs() {
                letters.push(Letter::new(gen, sign));
            }
        }
        Word::from_letters(letters)
    }
}

/// Result of one collection run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collected {
    pub normal_form: NormalForm,
    pub steps: u64,
}

/// Structured polycyclic data: for every pair `i < j` the conjugates
/// `x_j^{x_i}` and `x_j^{x_i^{-1}}`, plus optional power relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolycyclicPresentation {
    k: usize,
    /// Triangular by pair `(i, j)`, `i < j`: value of `x_j^{x_i}`.
    conj_pos: Vec<Word>,
    /// Value of `x_j^{x_i^{-1}}`, derived from `conj_pos`.
    conj_neg: Vec<Word>,
    /// Power relation per generator, if any.
    powers: Vec<Option<PowerRelation>>,
}

fn pair_slot(k: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < k);
    i * k - i * (i + 1) / 2 + (j - i - 1)
}

/// Shape check for a conjugate value: `x_j^{±1}` followed by letters over
/// generators `> j`.
fn check_triangular(word: &Word, j: usize) -> bool {
    let letters = word.letters();
    match letters.first() {
        Some(first) if first.gen == j => {}
        _ => return false,
    }
    letters[1..].iter().all(|l| l.gen > j)
}

impl PolycyclicPresentation {
    /// Builds the presentation from the positive conjugation table and the
    /// power relations; the negative table is derived.
    pub fn new(
        k: usize,
        conj_pos: Vec<((usize, usize), Word)>,
        powers: Vec<(usize, PowerRelation)>,
    ) -> Result<PolycyclicPresentation, PcError> {
        let mut pos: Vec<Option<Word>> = vec![None; k * k.saturating_sub(1) / 2];
        for ((i, j), word) in conj_pos {
            assert!(i < j && j < k, "conjugation pair out of range");
            pos[pair_slot(k, i, j)] = Some(word);
        }
        let conj_pos: Vec<Word> = pos
            .into_iter()
            .enumerate()
            .map(|(slot, w)| w.unwrap_or_else(|| panic!("missing conjugation entry {slot}")))
            .collect();
        let mut power_table: Vec<Option<PowerRelation>> = vec![None; k];
        for (l, relation) in powers {
            assert!(l < k, "power index out of range");
            power_table[l] = Some(relation);
        }
        let mut p = PolycyclicPresentation {
            k,
            conj_pos,
            conj_neg: Vec::new(),
            powers: power_table,
        };
        p.validate_shape()?;
        p.conj_neg = p.derive_conj_neg();
        Ok(p)
    }

    fn validate_shape(&self) -> Result<(), PcError> {
        for i in 0..self.k {
            for j in i + 1..self.k {
                let w = &self.conj_pos[pair_slot(self.k, i, j)];
                if !check_triangular(w, j) {
                    return Err(PcError::BadConjugateValue { i: i + 1, j: j + 1 });
                }
            }
        }
        for (l, power) in self.powers.iter().enumerate() {
            if let Some(PowerRelation { exponent, tail }) = power {
                assert!(*exponent >= 1, "power exponent must be positive");
                if tail.letters().iter().any(|letter| letter.gen <= l) {
                    return Err(PcError::BadPowerValue { l: l + 1 });
                }
            }
        }
        Ok(())
    }

    /// Inverts each conjugation-by-`x_i` automorphism by back-substitution,
    /// descending from the last generator. With `x_j^{x_i} = x_j^{ε} T`:
    ///   ε = +1:  x_j^{x_i^{-1}} = x_j · φ^{-1}(T^{-1})
    ///   ε = -1:  x_j^{x_i^{-1}} = φ^{-1}(T) · x_j^{-1}
    /// where φ^{-1} is already known on generators above `j`.
    fn derive_conj_neg(&self) -> Vec<Word> {
        let mut neg: Vec<Word> = vec![Word::empty(); self.conj_pos.len()];
        for i in 0..self.k {
            // inv[c] = φ_i^{-1}(x_c) for c > i, filled top-down.
            let mut inv: BTreeMap<usize, Word> = BTreeMap::new();
            for j in (i + 1..self.k).rev() {
                let value = &self.conj_pos[pair_slot(self.k, i, j)];
                let head = value.letters()[0];
                let tail = Word::from_letters(value.letters()[1..].to_vec());
                let substituted = |w: &Word| -> Word {
                    let mut out = Word::empty();
                    for letter in w.letters() {
                        let image = &inv[&letter.gen];
                        let piece = match letter.sign {
                            Sign::Plus => image.clone(),
                            Sign::Minus => image.inverse(),
                        };
                        out = out.concat(&piece);
                    }
                    out
                };
                let result = match head.sign {
                    Sign::Plus => Word::from_letters(vec![Letter::positive(j)])
                        .concat(&substituted(&tail.inverse())),
                    Sign::Minus => substituted(&tail)
                        .concat(&Word::from_letters(vec![Letter::negative(j)])),
                };
                inv.insert(j, result.freely_reduced());
            }
            for j in i + 1..self.k {
                neg[pair_slot(self.k, i, j)] = inv[&j].clone();
            }
        }
        neg
    }

    pub fn generator_count(&self) -> usize {
        self.k
    }

    pub fn conjugate_positive(&self, i: usize, j: usize) -> &Word {
        &self.conj_pos[pair_slot(self.k, i, j)]
    }

    pub fn conjugate_negative(&self, i: usize, j: usize) -> &Word {
        &self.conj_neg[pair_slot(self.k, i, j)]
    }

    pub fn power(&self, l: usize) -> Option<&PowerRelation> {
        self.powers[l].as_ref()
    }

    /// The distributable relator words: conjugation relators
    /// `x_i^{-1} x_j x_i w_ij^{-1}` for pairs in lexicographic order, then
    /// power relators `x_l^{r_l} u_l^{-1}` by ascending `l`. Negative
    /// conjugates are consequences and are deliberately not included.
    pub fn relator_words(&self) -> Vec<Word> {
        let mut out = Vec::new();
        for i in 0..self.k {
            for j in i + 1..self.k {
                let w = &self.conj_pos[pair_slot(self.k, i, j)];
                let word = Word::from_letters(vec![
                    Letter::negative(i),
                    Letter::positive(j),
                    Letter::positive(i),
                ])
                .concat(&w.inverse())
                .freely_reduced();
                out.push(word);
            }
        }
        for (l, power) in self.powers.iter().enumerate() {
            if let Some(PowerRelation { exponent, tail }) = power {
                let head = Word::from_letters(vec![Letter::positive(l); *exponent as usize]);
                out.push(head.concat(&tail.inverse()).freely_reduced());
            }
        }
        out
    }

    /// Rebuilds the structured data from indexed relator words, the inverse
    /// of [`PolycyclicPresentation::relator_words`]. Requires a complete
    /// rule set: every pair needs its conjugation relator.
    pub fn from_relators<'a>(
        k: usize,
        relators: impl IntoIterator<Item = &'a Relator>,
    ) -> Result<PolycyclicPresentation, PcError> {
        let mut conj: Vec<Option<(usize, Word)>> = vec![None; k * k.saturating_sub(1) / 2];
        let mut powers: Vec<Option<(usize, PowerRelation)>> = vec![None; k];
        for relator in relators {
            if let Some(gen) = relator.word.max_gen() {
                if gen >= k {
                    return Err(PcError::GeneratorOutOfRange { gen, k });
                }
            }
            match classify_relator(relator)? {
                PcRule::Conjugation { i, j, value } => {
                    if !check_triangular(&value, j) {
                        return Err(PcError::NonTriangular {
                            index: relator.index,
                        });
                    }
                    let slot = pair_slot(k, i, j);
                    if let Some((first, _)) = conj[slot] {
                        return Err(PcError::DuplicateRule {
                            first,
                            second: relator.index,
                        });
                    }
                    conj[slot] = Some((relator.index, value));
                }
                PcRule::Power { l, relation } => {
                    if relation.tail.letters().iter().any(|letter| letter.gen <= l) {
                        return Err(PcError::BadPowerTail {
                            index: relator.index,
                        });
                    }
                    if let Some((first, _)) = powers[l] {
                        return Err(PcError::DuplicateRule {
                            first,
                            second: relator.index,
                        });
                    }
                    powers[l] = Some((relator.index, relation));
                }
            }
        }
        let mut conj_pairs = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                match conj[pair_slot(k, i, j)].take() {
                    Some((_, value)) => conj_pairs.push(((i, j), value)),
                    None => return Err(PcError::MissingConjugationPair { i: i + 1, j: j + 1 }),
                }
            }
        }
        let power_rules = powers
            .into_iter()
            .enumerate()
            .filter_map(|(l, slot)| slot.map(|(_, relation)| (l, relation)))
            .collect();
        PolycyclicPresentation::new(k, conj_pairs, power_rules)
    }

    /// From-the-left collection of `word` to its normal form.
    pub fn collect(&self, word: &Word, budget: u64) -> Result<Collected, PcError> {
        if let Some(gen) = word.max_gen() {
            if gen >= self.k {
                return Err(PcError::GeneratorOutOfRange { gen, k: self.k });
            }
        }
        let mut runs = runs_of(word);
        let mut steps: u64 = 0;
        loop {
            match self.leftmost_violation(&runs) {
                None => break,
                Some(violation) => {
                    steps += 1;
                    if steps > budget {
                        return Err(PcError::BudgetExhausted { budget, steps });
                    }
                    self.apply(&mut runs, violation);
                }
            }
        }
        let mut exponents = vec![0i64; self.k];
        for &(gen, exp) in &runs {
            exponents[gen] = exp;
        }
        Ok(Collected {
            normal_form: NormalForm { exponents },
            steps,
        })
    }

    pub fn is_identity(&self, word: &Word, budget: u64) -> Result<bool, PcError> {
        Ok(self.collect(word, budget)?.normal_form.is_identity())
    }

    fn leftmost_violation(&self, runs: &[(usize, i64)]) -> Option<PcViolation> {
        for (pos, &(gen, exp)) in runs.iter().enumerate() {
            if let Some(power) = &self.powers[gen] {
                if exp < 0 || exp >= power.exponent as i64 {
                    return Some(PcViolation::Power { pos });
                }
            }
            if pos + 1 < runs.len() && gen > runs[pos + 1].0 {
                return Some(PcViolation::Swap { pos });
            }
        }
        None
    }

    fn apply(&self, runs: &mut Vec<(usize, i64)>, violation: PcViolation) {
        match violation {
            PcViolation::Power { pos } => {
                let (gen, exp) = runs[pos];
                let power = self.powers[gen].as_ref().expect("power rule exists");
                let r = power.exponent as i64;
                // x^e = x^{e-r} u  when e >= r;  x^e = x^{e+r} u^{-1} when e < 0.
                let (new_exp, inserted) = if exp >= r {
                    (exp - r, power.tail.clone())
                } else {
                    (exp + r, power.tail.inverse())
                };
                let mut replacement = Vec::new();
                if new_exp != 0 {
                    replacement.push((gen, new_exp));
                }
                replacement.extend(runs_of(&inserted));
                splice(runs, pos..pos + 1, replacement);
            }
            PcViolation::Swap { pos } => {
                let (j, a) = runs[pos];
                let (i, b) = runs[pos + 1];
                debug_assert!(j > i);
                let sa = a.signum();
                let sb = b.signum();
                // x_j^a x_i^b = x_j^{a-sa} x_i^{sb} C^{sa} x_i^{b-sb}
                // with C the conjugate of x_j by x_i^{sb}.
                let table = if sb > 0 {
                    &self.conj_pos[pair_slot(self.k, i, j)]
                } else {
                    &self.conj_neg[pair_slot(self.k, i, j)]
                };
                let c = if sa > 0 { table.clone() } else { table.inverse() };
                let mut replacement = Vec::new();
                if a - sa != 0 {
                    replacement.push((j, a - sa));
                }
                replacement.push((i, sb));
                replacement.extend(runs_of(&c));
                if b - sb != 0 {
                    replacement.push((i, b - sb));
                }
                splice(runs, pos..pos + 2, replacement);
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum PcViolation {
    Power { pos: usize },
    Swap { pos: usize },
}

enum PcRule {
    Conjugation { i: usize, j: usize, value: Word },
    Power { l: usize, relation: PowerRelation },
}

/// Recognizes the two relator word shapes; see
/// [`PolycyclicPresentation::relator_words`].
fn classify_relator(relator: &Relator) -> Result<PcRule, PcError> {
    let letters = relator.word.letters();
    let shape_err = PcError::NotPolycyclicShape {
        index: relator.index,
    };
    match letters[0].sign {
        Sign::Minus => {
            // x_i^{-1} x_j x_i w^{-1}
            if letters.len() < 3 {
                return Err(shape_err);
            }
            let i = letters[0].gen;
            let j = letters[1].gen;
            if letters[1].sign != Sign::Plus
                || letters[2] != Letter::positive(i)
                || j <= i
            {
                return Err(shape_err);
            }
            let value = Word::from_letters(letters[3..].to_vec()).inverse();
            Ok(PcRule::Conjugation { i, j, value })
        }
        Sign::Plus => {
            // x_l^{r} u^{-1}
            let l = letters[0].gen;
            let run = letters
                .iter()
                .take_while(|&&letter| letter == Letter::positive(l))
                .count();
            let tail = Word::from_letters(letters[run..].to_vec()).inverse();
            Ok(PcRule::Power {
                l,
                relation: PowerRelation {
                    exponent: run as u32,
                    tail,
                },
            })
        }
    }
}

/// Run-length form with merged neighbors and no zero runs; merging is free
/// cancellation.
fn runs_of(word: &Word) -> Vec<(usize, i64)> {
    let mut runs: Vec<(usize, i64)> = Vec::new();
    for letter in word.letters() {
        let delta: i64 = match letter.sign {
            Sign::Plus => 1,
            Sign::Minus => -1,
        };
        push_run(&mut runs, letter.gen, delta);
    }
    runs
}

fn push_run(runs: &mut Vec<(usize, i64)>, gen: usize, exp: i64) {
    if exp == 0 {
        return;
    }
    match runs.last_mut() {
        Some((last_gen, last_exp)) if *last_gen == gen => {
            *last_exp += exp;
            if *last_exp == 0 {
                runs.pop();
                // Removing a run can expose two equal neighbors; merge them.
                if runs.len() >= 2 {
                    let (g, e) = runs[runs.len() - 1];
                    if runs[runs.len() - 2].0 == g {
                        runs.pop();
                        push_run(runs, g, e);
                    }
                }
            }
        }
        _ => runs.push((gen, exp)),
    }
}

fn splice(runs: &mut Vec<(usize, i64)>, range: std::ops::Range<usize>, replacement: Vec<(usize, i64)>) {
    let tail: Vec<(usize, i64)> = runs.drain(range.start..).skip(range.end - range.start).collect();
    for (gen, exp) in replacement.into_iter().chain(tail) {
        push_run(runs, gen, exp);
    }
}

/// Checks that a presentation is tagged polycyclic and rebuilds its
/// structured rule tables.
pub fn validate_polycyclic(p: &GroupPresentation) -> Result<PolycyclicPresentation, PcError> {
    if p.family() != Family::Polycyclic {
        return Err(PcError::WrongFamily(p.family()));
    }
    PolycyclicPresentation::from_relators(p.generators().count(), p.relators())
}

/// Independent oracle bundled with each builtin family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PcOracle {
    /// Dihedral group of the q-gon as permutations of its vertices;
    /// generator 0 is a reflection, generator 1 the rotation.
    Dihedral { q: u32 },
    /// Discrete Heisenberg group as 3x3 unitriangular integer matrices.
    Heisenberg,
    /// Direct product of cyclic groups; order 0 means infinite.
    Abelian { orders: Vec<u32> },
}

impl PcOracle {
    pub fn is_identity(&self, word: &Word) -> bool {
        match self {
            PcOracle::Dihedral { q } => {
                let q = *q as i64;
                // The word acts on Z_q as the affine map i -> s*i + c:
                // reflection i -> -i (self-inverse), rotation i -> i + 1.
                let (mut s, mut c) = (1i64, 0i64);
                for letter in word.letters() {
                    match (letter.gen, letter.sign) {
                        (0, _) => {
                            s = -s;
                            c = -c;
                        }
                        (1, Sign::Plus) => c += 1,
                        (1, Sign::Minus) => c -= 1,
                        _ => unreachable!("dihedral words use two generators"),
                    }
                }
                s == 1 && c.rem_euclid(q) == 0
            }
            PcOracle::Heisenberg => {
                // x = I+E12, y = I+E23, z = I-E13 (entries a = top-middle,
                // b = middle-right, c = top-right).
                let (mut a, mut b, mut c) = (0i64, 0i64, 0i64);
                for letter in word.letters() {
                    let (da, db, dc) = match letter.gen {
                        0 => (1, 0, 0),
                        1 => (0, 1, 0),
                        2 => (0, 0, -1),
                        _ => unreachable!("heisenberg words use three generators"),
                    };
                    match letter.sign {
                        Sign::Plus => {
                            // (a,b,c) * (da,db,dc): c' = c + dc + a*db
                            c += dc + a * db;
                            a += da;
                            b += db;
                        }
                        Sign::Minus => {
                            // multiply by the inverse (-da,-db,-dc+da*db)
                            c += -dc + da * db - a * db;
                            a -= da;
                            b -= db;
                        }
                    }
                }
                a == 0 && b == 0 && c == 0
            }
            PcOracle::Abelian { orders } => {
                let mut sums = vec![0i64; orders.len()];
                for letter in word.letters() {
                    sums[letter.gen] += match letter.sign {
                        Sign::Plus => 1,
                        Sign::Minus => -1,
                    };
                }
                sums.iter().zip(orders).all(|(&sum, &order)| {
                    if order == 0 {
                        sum == 0
                    } else {
                        sum.rem_euclid(order as i64) == 0
                    }
                })
            }
        }
    }
}

/// One catalog entry: a named consistent presentation, its alphabet, and an
/// independent oracle.
#[derive(Debug, Clone)]
pub struct BuiltinPresentation {
    pub name: &'static str,
    pub generators: Generators,
    pub pc: PolycyclicPresentation,
    pub oracle: PcOracle,
}

impl BuiltinPresentation {
    pub fn distributable_relator_count(&self) -> usize {
        self.pc.relator_words().len()
    }
}

/// The discrete Heisenberg group: `y^x = y z`, `z` central, all orders
/// infinite.
pub fn heisenberg() -> BuiltinPresentation {
    let generators =
        Generators::new(vec!["x".into(), "y".into(), "z".into()]).expect("valid names");
    let yz = Word::from_letters(vec![Letter::positive(1), Letter::positive(2)]);
    let z = Word::from_letters(vec![Letter::positive(2)]);
    let pc = PolycyclicPresentation::new(
        3,
        vec![((0, 1), yz), ((0, 2), z.clone()), ((1, 2), z)],
        vec![],
    )
    .expect("heisenberg data is well-formed");
    BuiltinPresentation {
        name: "heisenberg",
        generators,
        pc,
        oracle: PcOracle::Heisenberg,
    }
}

/// Dihedral group D_q: reflection `a`, rotation `b`, `b^a = b^{-1}`,
/// `a^2 = b^q = 1`.
pub fn dihedral(q: u32) -> BuiltinPresentation {
    assert!(q >= 2, "dihedral needs q >= 2");
    let generators = Generators::new(vec!["a".into(), "b".into()]).expect("valid names");
    let b_inverse = Word::from_letters(vec![Letter::negative(1)]);
    let pc = PolycyclicPresentation::new(
        2,
        vec![((0, 1), b_inverse)],
        vec![
            (0, PowerRelation { exponent: 2, tail: Word::empty() }),
            (1, PowerRelation { exponent: q, tail: Word::empty() }),
        ],
    )
    .expect("dihedral data is well-formed");
    BuiltinPresentation {
        name: "dihedral",
        generators,
        pc,
        oracle: PcOracle::Dihedral { q },
    }
}

/// Direct product of cyclic groups with the given orders (0 = infinite).
pub fn abelian(orders: &[u32]) -> BuiltinPresentation {
    let k = orders.len();
    assert!(k >= 1);
    let generators = Generators::numbered("x", k);
    let mut conj = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            conj.push(((i, j), Word::from_letters(vec![Letter::positive(j)])));
        }
    }
    let powers = orders
        .iter()
        .enumerate()
        .filter(|(_, &order)| order > 0)
        .map(|(l, &order)| {
            (
                l,
                PowerRelation {
                    exponent: order,
                    tail: Word::empty(),
                },
            )
        })
        .collect();
    let pc = PolycyclicPresentation::new(k, conj, powers).expect("abelian data is well-formed");
    BuiltinPresentation {
        name: "abelian",
        generators,
        pc,
        oracle: PcOracle::Abelian {
            orders: orders.to_vec(),
        },
    }
}

/// The catalog the dealer draws from, in selection order.
pub fn builtin_presentations() -> Vec<BuiltinPresentation> {
    vec![
        heisenberg(),
        dihedral(4),
        dihedral(3),
        dihedral(6),
        abelian(&[2, 3]),
        abelian(&[2, 0]),
    ]
}
