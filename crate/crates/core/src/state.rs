//! Sparse register of `N` three-level emitters, symmetric Dicke states and
//! the collective spin observables used to identify them.
//!
//! A basis string is a word over `{e, 0, 1}`; character `j - 1` is the level
//! of emitter `j`. In the qubit subspace `1` is spin up (`+1/2`) and `0` is
//! spin down (`-1/2`), so `|N/2, m>` has `N/2 + m` ones.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register accepted by [`EmitterState::initial`].
pub const MAX_EMITTERS: usize = 12;

/// Tolerance on `sum |a|^2 = 1` for states treated as normalized.
pub const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Ground0,
    Ground1,
    Excited,
}

impl Level {
    pub fn symbol(self) -> char {
        match self {
            Level::Ground0 => '0',
            Level::Ground1 => '1',
            Level::Excited => 'e',
        }
    }

    pub fn from_symbol(c: char) -> Option<Level> {
        match c {
            '0' => Some(Level::Ground0),
            '1' => Some(Level::Ground1),
            'e' => Some(Level::Excited),
            _ => None,
        }
    }

    /// `S_z` eigenvalue of a single qubit in units of hbar. Zero for `e`.
    fn spin_z(self) -> f64 {
        match self {
            Level::Ground0 => -0.5,
            Level::Ground1 => 0.5,
            Level::Excited => 0.0,
        }
    }
}

/// One of the two long-lived ground states, i.e. a qubit value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundLevel {
    Zero,
    One,
}

impl From<GroundLevel> for Level {
    fn from(g: GroundLevel) -> Level {
        match g {
            GroundLevel::Zero => Level::Ground0,
            GroundLevel::One => Level::Ground1,
        }
    }
}

/// A product basis state of the register.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Basis(Box<[Level]>);

impl Basis {
    pub fn new(levels: impl Into<Box<[Level]>>) -> Self {
        Basis(levels.into())
    }

    pub fn uniform(len: usize, level: Level) -> Self {
        Basis(vec![level; len].into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn levels(&self) -> &[Level] {
        &self.0
    }

    pub fn level(&self, index: usize) -> Level {
        self.0[index]
    }

    pub fn count(&self, level: Level) -> usize {
        self.0.iter().filter(|&&l| l == level).count()
    }

    pub fn excitations(&self) -> usize {
        self.count(Level::Excited)
    }

    /// Copy with emitter `index` (0-based) set to `level`.
    pub fn with_level(&self, index: usize, level: Level) -> Basis {
        let mut levels = self.0.clone();
        levels[index] = level;
        Basis(levels)
    }

    /// Relabel emitters: the level at position `i` moves to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Basis {
        let mut levels = self.0.clone();
        for (i, &target) in perm.iter().enumerate() {
            levels[target] = self.0[i];
        }
        Basis(levels)
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for level in self.0.iter() {
            write!(f, "{}", level.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(Level::from_symbol)
            .collect::<Option<Vec<_>>>()
            .filter(|levels| !levels.is_empty())
            .map(Basis::new)
            .ok_or_else(|| Error::InvalidBasis(s.to_string()))
    }
}

/// Sparse amplitude map over basis strings of a fixed length.
///
/// All support strings carry the same number of excited emitters. Entries
/// are kept in lexicographic order of their basis strings, which makes every
/// traversal (and every serialized dump) deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct EmitterState {
    num_emitters: usize,
    amplitudes: BTreeMap<Basis, Complex64>,
}

impl EmitterState {
    /// All `n` emitters in the excited state `|e, e, ..., e>`.
    pub fn initial(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_EMITTERS {
            return Err(Error::InvalidSize { size: n, max: MAX_EMITTERS });
        }
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(Basis::uniform(n, Level::Excited), Complex64::new(1.0, 0.0));
        Ok(EmitterState { num_emitters: n, amplitudes })
    }

    /// The empty (zero) vector of an `n`-emitter register.
    pub fn zero(n: usize) -> Self {
        EmitterState { num_emitters: n, amplitudes: BTreeMap::new() }
    }

    /// Build a state from `(basis, amplitude)` terms. Repeated basis strings
    /// are summed.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Basis, Complex64)>,
    {
        let mut state = EmitterState::zero(n);
        let mut excitations = None;
        for (basis, amp) in terms {
            if basis.len() != n {
                return Err(Error::SizeMismatch { expected: n, found: basis.len() });
            }
            let e = basis.excitations();
            if *excitations.get_or_insert(e) != e {
                return Err(Error::MixedExcitations);
            }
            *state.amplitudes.entry(basis).or_default() += amp;
        }
        Ok(state)
    }

    /// Convenience over [`EmitterState::from_terms`] taking string keys.
    pub fn from_strs(n: usize, terms: &[(&str, Complex64)]) -> Result<Self> {
        let parsed = terms
            .iter()
            .map(|(s, a)| Ok((s.parse::<Basis>()?, *a)))
            .collect::<Result<Vec<_>>>()?;
        EmitterState::from_terms(n, parsed)
    }

    /// Symmetric Dicke state `|N/2, m>` with uniform real amplitudes.
    pub fn dicke(target: DickeTarget) -> Self {
        let n = target.num_qubits();
        let ones = target.num_ones();
        let amp = Complex64::new((binomial(n, ones) as f64).sqrt().recip(), 0.0);
        let amplitudes = (0..n)
            .combinations(ones)
            .map(|positions| {
                let mut levels = vec![Level::Ground0; n];
                for p in positions {
                    levels[p] = Level::Ground1;
                }
                (Basis::new(levels), amp)
            })
            .collect();
        EmitterState { num_emitters: n, amplitudes }
    }

    pub fn num_emitters(&self) -> usize {
        self.num_emitters
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitude(&self, basis: &Basis) -> Complex64 {
        self.amplitudes.get(basis).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Basis, &Complex64)> {
        self.amplitudes.iter()
    }

    /// Number of excited emitters shared by all support strings, `None` for
    /// the zero vector.
    pub fn excitations(&self) -> Option<usize> {
        self.amplitudes.keys().next().map(Basis::excitations)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    /// Rescale to unit norm. Also returns the squared norm before scaling.
    pub fn normalize(&self) -> Result<(EmitterState, f64)> {
        let norm_sqr = self.norm_sqr();
        if !(norm_sqr > 0.0 && norm_sqr.is_finite()) {
            return Err(Error::ZeroNorm);
        }
        let scale = Complex64::new(norm_sqr.sqrt().recip(), 0.0);
        Ok((self.scaled(scale), norm_sqr))
    }

    pub fn scaled(&self, factor: Complex64) -> EmitterState {
        EmitterState {
            num_emitters: self.num_emitters,
            amplitudes: self.amplitudes.iter().map(|(b, a)| (b.clone(), a * factor)).collect(),
        }
    }

    /// Relabel emitters with `perm` (see [`Basis::permuted`]).
    pub fn permuted(&self, perm: &[usize]) -> Result<EmitterState> {
        if perm.len() != self.num_emitters {
            return Err(Error::SizeMismatch { expected: self.num_emitters, found: perm.len() });
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidBasis(format!("not a permutation: {perm:?}")));
            }
        }
        Ok(EmitterState {
            num_emitters: self.num_emitters,
            amplitudes: self.amplitudes.iter().map(|(b, a)| (b.permuted(perm), *a)).collect(),
        })
    }

    /// Drop entries with magnitude below `threshold`.
    pub(crate) fn prune(&mut self, threshold: f64) {
        self.amplitudes.retain(|_, a| a.norm() >= threshold);
    }

    pub(crate) fn add_term(&mut self, basis: Basis, amp: Complex64) {
        *self.amplitudes.entry(basis).or_default() += amp;
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &EmitterState) -> Result<Complex64> {
        if self.num_emitters != other.num_emitters {
            return Err(Error::SizeMismatch { expected: self.num_emitters, found: other.num_emitters });
        }
        let (small, large, conj_small) = if self.len() <= other.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        Ok(small
            .amplitudes
            .iter()
            .filter_map(|(b, a)| large.amplitudes.get(b).map(|c| if conj_small { a.conj() * c } else { c.conj() * a }))
            .sum())
    }

    fn require_qubit_state(&self) -> Result<()> {
        if !self.is_normalized() {
            return Err(Error::NotNormalized(self.norm_sqr()));
        }
        if self.excitations() != Some(0) {
            return Err(Error::ExcitedState);
        }
        Ok(())
    }

    /// Apply the collective ladder operator that flips `from` to `to` on
    /// each emitter in turn (`S+` for `0 -> 1`, `S-` for `1 -> 0`).
    fn ladder(&self, from: Level, to: Level) -> EmitterState {
        let mut out = EmitterState::zero(self.num_emitters);
        for (basis, amp) in &self.amplitudes {
            for (j, &level) in basis.levels().iter().enumerate() {
                if level == from {
                    out.add_term(basis.with_level(j, to), *amp);
                }
            }
        }
        out
    }

    /// `<S_z>` in units of hbar.
    pub fn total_spin_z(&self) -> Result<f64> {
        self.require_qubit_state()?;
        Ok(self
            .amplitudes
            .iter()
            .map(|(b, a)| a.norm_sqr() * basis_spin_z(b))
            .sum())
    }

    /// `<S^2>` in units of hbar^2, from `S^2 = S_z^2 + (S+ S- + S- S+) / 2`.
    pub fn total_spin_squared(&self) -> Result<f64> {
        self.require_qubit_state()?;
        let sz_sq: f64 = self
            .amplitudes
            .iter()
            .map(|(b, a)| a.norm_sqr() * basis_spin_z(b).powi(2))
            .sum();
        // <psi|S+ S-|psi> = ||S- psi||^2 and likewise for S- S+.
        let lowered = self.ladder(Level::Ground1, Level::Ground0).norm_sqr();
        let raised = self.ladder(Level::Ground0, Level::Ground1).norm_sqr();
        Ok(sz_sq + 0.5 * (lowered + raised))
    }
}

fn basis_spin_z(b: &Basis) -> f64 {
    b.levels().iter().map(|l| l.spin_z()).sum()
}

/// `|<a|b>|^2` between two normalized states of the same size.
pub fn fidelity(a: &EmitterState, b: &EmitterState) -> Result<f64> {
    if a.num_emitters() != b.num_emitters() {
        return Err(Error::SizeMismatch { expected: a.num_emitters(), found: b.num_emitters() });
    }
    for s in [a, b] {
        if !s.is_normalized() {
            return Err(Error::NotNormalized(s.norm_sqr()));
        }
    }
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Symmetric Dicke state label `(N, 2m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTarget", into = "RawTarget")]
pub struct DickeTarget {
    num_qubits: usize,
    two_m: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTarget {
    num_qubits: usize,
    two_m: i64,
}

impl TryFrom<RawTarget> for DickeTarget {
    type Error = Error;

    fn try_from(raw: RawTarget) -> Result<Self> {
        DickeTarget::new(raw.num_qubits, raw.two_m)
    }
}

impl From<DickeTarget> for RawTarget {
    fn from(t: DickeTarget) -> Self {
        RawTarget { num_qubits: t.num_qubits, two_m: t.two_m }
    }
}

impl DickeTarget {
    pub fn new(num_qubits: usize, two_m: i64) -> Result<Self> {
        let n = num_qubits as i64;
        if num_qubits == 0 || num_qubits > MAX_EMITTERS || two_m.abs() > n || (n - two_m).rem_euclid(2) != 0 {
            return Err(Error::InvalidTarget { num_qubits, two_m });
        }
        Ok(DickeTarget { num_qubits, two_m })
    }

    /// The target whose excitation count matches a list of heralded levels.
    pub fn from_levels(levels: &[GroundLevel]) -> Result<Self> {
        let ones = levels.iter().filter(|&&l| l == GroundLevel::One).count() as i64;
        DickeTarget::new(levels.len(), 2 * ones - levels.len() as i64)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn two_m(&self) -> i64 {
        self.two_m
    }

    pub fn spin_projection(&self) -> f64 {
        self.two_m as f64 / 2.0
    }

    /// Cooperation number `S = N/2`.
    pub fn total_spin(&self) -> f64 {
        self.num_qubits as f64 / 2.0
    }

    /// `N/2 + m`.
    pub fn num_ones(&self) -> usize {
        ((self.num_qubits as i64 + self.two_m) / 2) as usize
    }

    pub fn num_terms(&self) -> u64 {
        binomial(self.num_qubits, self.num_ones())
    }

    /// Every valid target for a given register size, from `m = -N/2` up.
    pub fn all(num_qubits: usize) -> Result<Vec<DickeTarget>> {
        let n = num_qubits as i64;
        (-n..=n).step_by(2).map(|two_m| DickeTarget::new(num_qubits, two_m)).collect()
    }
}

impl fmt::Display for DickeTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let half = |x: i64| if x % 2 == 0 { format!("{}", x / 2) } else { format!("{x}/2") };
        let m = if self.two_m > 0 { format!("+{}", half(self.two_m)) } else { half(self.two_m) };
        write!(f, "|{}, {}>", half(self.num_qubits as i64), m)
    }
}

/// Branching amplitudes of `|e> -> |0>` (sigma+ photon) and `|e> -> |1>`
/// (sigma- photon).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEmission", into = "RawEmission")]
pub struct EmissionModel {
    c0: Complex64,
    c1: Complex64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEmission {
    c0: Complex64,
    c1: Complex64,
}

impl TryFrom<RawEmission> for EmissionModel {
    type Error = Error;

    fn try_from(raw: RawEmission) -> Result<Self> {
        EmissionModel::new(raw.c0, raw.c1)
    }
}

impl From<EmissionModel> for RawEmission {
    fn from(e: EmissionModel) -> Self {
        RawEmission { c0: e.c0, c1: e.c1 }
    }
}

impl Default for EmissionModel {
    fn default() -> Self {
        let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        EmissionModel { c0: c, c1: c }
    }
}

impl EmissionModel {
    pub fn new(c0: Complex64, c1: Complex64) -> Result<Self> {
        let total = c0.norm_sqr() + c1.norm_sqr();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidEmission(total));
        }
        Ok(EmissionModel { c0, c1 })
    }

    pub fn c0(&self) -> Complex64 {
        self.c0
    }

    pub fn c1(&self) -> Complex64 {
        self.c1
    }

    /// Branching probability into `level`.
    pub fn weight(&self, level: GroundLevel) -> f64 {
        match level {
            GroundLevel::Zero => self.c0.norm_sqr(),
            GroundLevel::One => self.c1.norm_sqr(),
        }
    }
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    (0..k).fold(1u64, |acc, i| acc * (n as u64 - i) / (i + 1))
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}
