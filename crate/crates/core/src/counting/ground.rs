use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular::Prime;
use crate::scalar::Density;
use crate::MAX_GROUND;

/// Where a set lives: the interval `[1, n]` (integer arithmetic) or `𝔽_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Universe {
    Interval { n: u64 },
    Field { p: Prime },
}

impl Universe {
    pub fn interval(n: u64) -> Self {
        Universe::Interval { n }
    }

    pub fn field(p: Prime) -> Self {
        Universe::Field { p }
    }

    /// Number of elements.
    pub fn size(&self) -> u64 {
        match *self {
            Universe::Interval { n } => n,
            Universe::Field { p } => p.get(),
        }
    }

    pub fn contains(&self, x: u64) -> bool {
        match *self {
            Universe::Interval { n } => (1..=n).contains(&x),
            Universe::Field { p } => x < p.get(),
        }
    }

    pub fn modulus(&self) -> Option<Prime> {
        match *self {
            Universe::Field { p } => Some(p),
            Universe::Interval { .. } => None,
        }
    }

    fn first(&self) -> u64 {
        match self {
            Universe::Interval { .. } => 1,
            Universe::Field { .. } => 0,
        }
    }
}

/// A subset of a [`Universe`] with a membership table and a sorted element list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundSet {
    universe: Universe,
    // indexed by element value
    members: Vec<bool>,
    elements: Vec<u64>,
}

impl GroundSet {
    /// Builds a set, dropping duplicates. Fails on elements outside the universe.
    pub fn new(universe: Universe, elements: impl IntoIterator<Item = u64>) -> Result<Self> {
        if universe.size() == 0 {
            return Err(Error::input("universe must be non-empty"));
        }
        if universe.size() > MAX_GROUND {
            return Err(Error::input(format!(
                "universe of size {} exceeds the supported {MAX_GROUND}",
                universe.size()
            )));
        }
        let table_len = match universe {
            Universe::Interval { n } => n as usize + 1,
            Universe::Field { p } => p.get() as usize,
        };
        let mut members = vec![false; table_len];
        for x in elements {
            if !universe.contains(x) {
                return Err(Error::input(format!("element {x} outside {universe:?}")));
            }
            members[x as usize] = true;
        }
        let elements = members
            .iter()
            .enumerate()
            .filter_map(|(x, &m)| m.then_some(x as u64))
            .collect();
        Ok(GroundSet {
            universe,
            members,
            elements,
        })
    }

    pub fn full(universe: Universe) -> Result<Self> {
        let first = universe.first();
        GroundSet::new(universe, first..first + universe.size())
    }

    pub fn empty(universe: Universe) -> Result<Self> {
        GroundSet::new(universe, std::iter::empty())
    }

    /// A uniformly random subset of exactly `size` elements, fixed by `seed`.
    pub fn random_with_size(universe: Universe, size: u64, seed: u64) -> Result<Self> {
        if size > universe.size() {
            return Err(Error::input(format!(
                "cannot draw {size} elements from a universe of {}",
                universe.size()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let first = universe.first();
        let picks = index::sample(&mut rng, universe.size() as usize, size as usize);
        GroundSet::new(universe, picks.into_iter().map(|i| first + i as u64))
    }

    /// A random subset of size `⌈ε·|universe|⌉`.
    pub fn random_with_density<T: Density>(
        universe: Universe,
        epsilon: T,
        seed: u64,
    ) -> Result<Self> {
        if !(epsilon >= T::zero() && epsilon <= T::one()) {
            return Err(Error::input(format!("density {epsilon:?} outside [0, 1]")));
        }
        GroundSet::random_with_size(universe, epsilon.ceil_mul(universe.size()), seed)
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.members.get(x as usize).copied().unwrap_or(false)
    }

    /// `|S| / |universe|`.
    pub fn density<T: Density>(&self) -> T {
        T::from_ratio(self.len() as u64, self.universe.size())
    }

    pub fn is_subset_of(&self, other: &GroundSet) -> bool {
        self.universe == other.universe && self.elements.iter().all(|&x| other.contains(x))
    }

    /// Views a subset of `[n]` as a subset of `𝔽_p`; requires `n < p`.
    pub fn embed_in_field(&self, p: Prime) -> Result<GroundSet> {
        match self.universe {
            Universe::Interval { n } if n < p.get() => {
                GroundSet::new(Universe::field(p), self.elements.iter().copied())
            }
            Universe::Interval { n } => Err(Error::input(format!(
                "cannot embed [1, {n}] into F_{}",
                p.get()
            ))),
            Universe::Field { .. } => Err(Error::input("set already lives in a field")),
        }
    }

    /// Image under `x ↦ λx + μ` over `𝔽_p`.
    pub fn affine_image(&self, lambda: u64, mu: u64) -> Result<GroundSet> {
        let p = self
            .universe
            .modulus()
            .ok_or_else(|| Error::input("affine images are only defined over a field"))?;
        if lambda.is_multiple_of(p.get()) {
            return Err(Error::input("affine map must have a non-zero slope"));
        }
        let image = self
            .elements
            .iter()
            .map(|&x| p.add(p.mul(lambda, x), mu % p.get()));
        GroundSet::new(self.universe, image)
    }

    /// Parses the text format: one integer per line, `#` starts a comment.
    /// Without an explicit `n` the universe is `[1, max element]`.
    pub fn from_text(text: &str, n: Option<u64>) -> Result<Self> {
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let x: u64 = body.parse().map_err(|_| {
                Error::Parse(format!(
                    "line {}: expected a positive integer, got {body:?}",
                    lineno + 1
                ))
            })?;
            if x == 0 {
                return Err(Error::Parse(format!(
                    "line {}: elements must be positive",
                    lineno + 1
                )));
            }
            values.push(x);
        }
        let n = n.or_else(|| values.iter().max().copied()).unwrap_or(1);
        GroundSet::new(Universe::interval(n), values)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for x in &self.elements {
            out.push_str(&x.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses `{"n": N, "members": [...]}` or `{"p": P, "members": [...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SetFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        GroundSet::try_from(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SetFile::from(self)).expect("set serializes")
    }
}

/// On-disk JSON shape of a set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    pub members: Vec<u64>,
}

impl TryFrom<SetFile> for GroundSet {
    type Error = Error;

    fn try_from(file: SetFile) -> Result<Self> {
        let universe = match (file.n, file.p) {
            (Some(n), None) => Universe::interval(n),
            (None, Some(p)) => Universe::field(Prime::new(p)?),
            _ => {
                return Err(Error::Parse(
                    "set file needs exactly one of \"n\" or \"p\"".into(),
                ))
            }
        };
        GroundSet::new(universe, file.members)
    }
}

impl From<&GroundSet> for SetFile {
    fn from(set: &GroundSet) -> Self {
        let (n, p) = match set.universe {
            Universe::Interval { n } => (Some(n), None),
            Universe::Field { p } => (None, Some(p.get())),
        };
        SetFile {
            n,
            p,
            members: set.elements.clone(),
        }
    }
}
