//! Symbol words, index families and the unconventional maps built from them.
//!
//! Given base maps `f_1..f_N`, an `M x L` family `xi` of index maps
//! `[1,N] -> [1,N]` and a word `alpha`, the depth-`n` unconventional map is
//!
//! ```text
//! F_{alpha,n}(x) = sum_i prod_j (f_{xi_ij(alpha_1)} ∘ ... ∘ f_{xi_ij(alpha_n)})(x)
//! ```
//!
//! Every component is an affine contraction with multiplier valuation `>= n`,
//! and sums of products of such maps stay inside `Z_p` with the same Lipschitz
//! bound, by the strong triangle inequality.

use std::fmt;
use std::str::FromStr;

use crate::affine::{AffineMap, ContractionSystem};
use crate::error::{Error, Result};
use crate::padic::PadicInt;

/// A word over `[1, N]`: a finite prefix optionally followed by a periodic tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolWord {
    alphabet: u32,
    prefix: Vec<u32>,
    tail: Vec<u32>,
}

fn check_symbols(alphabet: u32, symbols: &[u32]) -> Result<()> {
    match symbols.iter().find(|&&s| s == 0 || s > alphabet) {
        Some(&symbol) => Err(Error::SymbolOutOfRange { symbol, alphabet }),
        None => Ok(()),
    }
}

impl SymbolWord {
    pub fn new(alphabet: u32, prefix: Vec<u32>, tail: Vec<u32>) -> Result<Self> {
        if prefix.is_empty() && tail.is_empty() {
            return Err(Error::EmptyWord);
        }
        check_symbols(alphabet, &prefix)?;
        check_symbols(alphabet, &tail)?;
        Ok(SymbolWord {
            alphabet,
            prefix,
            tail,
        })
    }

    pub fn finite(alphabet: u32, symbols: Vec<u32>) -> Result<Self> {
        Self::new(alphabet, symbols, Vec::new())
    }

    pub fn periodic(alphabet: u32, prefix: Vec<u32>, tail: Vec<u32>) -> Result<Self> {
        if tail.is_empty() {
            return Err(Error::EmptyWord);
        }
        Self::new(alphabet, prefix, tail)
    }

    /// The `index`-th word of length `len` in lexicographic order.
    pub fn nth_of_length(alphabet: u32, len: usize, mut index: u128) -> Self {
        let mut symbols = vec![1; len];
        for s in symbols.iter_mut().rev() {
            *s = (index % alphabet as u128) as u32 + 1;
            index /= alphabet as u128;
        }
        SymbolWord {
            alphabet,
            prefix: symbols,
            tail: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn prefix(&self) -> &[u32] {
        &self.prefix
    }

    pub fn tail(&self) -> &[u32] {
        &self.tail
    }

    pub fn is_infinite(&self) -> bool {
        !self.tail.is_empty()
    }

    /// Number of symbols, `None` for infinite words.
    pub fn len(&self) -> Option<usize> {
        if self.is_infinite() {
            None
        } else {
            Some(self.prefix.len())
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Zero-based symbol lookup, unfolding the tail as needed.
    pub fn symbol(&self, i: usize) -> Option<u32> {
        if i < self.prefix.len() {
            Some(self.prefix[i])
        } else if self.tail.is_empty() {
            None
        } else {
            Some(self.tail[(i - self.prefix.len()) % self.tail.len()])
        }
    }

    /// The first `n` symbols.
    pub fn unfold(&self, n: usize) -> Result<Vec<u32>> {
        if let Some(available) = self.len() {
            if available < n {
                return Err(Error::WordTooShort {
                    needed: n,
                    available,
                });
            }
        }
        Ok((0..n).map(|i| self.symbol(i).unwrap()).collect())
    }

    /// Drops the first `n` symbols.
    pub fn shifted(&self, n: usize) -> Result<SymbolWord> {
        if n < self.prefix.len() {
            return Ok(SymbolWord {
                alphabet: self.alphabet,
                prefix: self.prefix[n..].to_vec(),
                tail: self.tail.clone(),
            });
        }
        if !self.is_infinite() {
            return Err(Error::WordTooShort {
                needed: n + 1,
                available: self.prefix.len(),
            });
        }
        let mut tail = self.tail.clone();
        tail.rotate_left((n - self.prefix.len()) % self.tail.len());
        Ok(SymbolWord {
            alphabet: self.alphabet,
            prefix: Vec::new(),
            tail,
        })
    }

    /// Symbol-wise image under an index map, tail included.
    pub fn transform(&self, map: &IndexMap) -> SymbolWord {
        SymbolWord {
            alphabet: map.alphabet(),
            prefix: self.prefix.iter().map(|&s| map.apply(s)).collect(),
            tail: self.tail.iter().map(|&s| map.apply(s)).collect(),
        }
    }

    /// Parses `"1,2,1"` (finite) or `"1,2|1"` (prefix `1,2`, then `1` repeated).
    pub fn parse(alphabet: u32, text: &str) -> Result<Self> {
        let (prefix, tail) = match text.split_once('|') {
            Some((p, t)) => (p, t),
            None => (text, ""),
        };
        let parse_part = |part: &str, offset: usize| -> Result<Vec<u32>> {
            if part.trim().is_empty() {
                return Ok(Vec::new());
            }
            let mut column = offset + 1;
            part.split(',')
                .map(|field| {
                    let s = field
                        .trim()
                        .parse::<u32>()
                        .map_err(|_| Error::parse(1, column, format!("not a symbol: {field:?}")));
                    column += field.len() + 1;
                    s
                })
                .collect()
        };
        let p = parse_part(prefix, 0)?;
        let t = parse_part(tail, prefix.len() + 1)?;
        Self::new(alphabet, p, t)
    }
}

impl fmt::Display for SymbolWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u32]| {
            v.iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        f.write_str(&join(&self.prefix))?;
        if self.is_infinite() {
            write!(f, "|{}", join(&self.tail))?;
        }
        Ok(())
    }
}

/// `alpha^[n] ∨ beta`: the first `n` symbols of `alpha` followed by all of `beta`.
pub fn concat_words(alpha: &SymbolWord, n: usize, beta: &SymbolWord) -> Result<SymbolWord> {
    if alpha.alphabet != beta.alphabet {
        return Err(Error::AlphabetMismatch {
            expected: alpha.alphabet,
            found: beta.alphabet,
        });
    }
    let mut prefix = alpha.unfold(n)?;
    prefix.extend_from_slice(&beta.prefix);
    SymbolWord::new(alpha.alphabet, prefix, beta.tail.clone())
}

/// A map `[1,N] -> [1,N]` stored as a lookup row: `table[k-1]` is the image of `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexMap {
    table: Vec<u32>,
}

impl IndexMap {
    pub fn from_table(table: Vec<u32>) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::EmptyWord);
        }
        let alphabet = table.len() as u32;
        if let Some(&value) = table.iter().find(|&&v| v == 0 || v > alphabet) {
            return Err(Error::ValueOutOfRange { value, alphabet });
        }
        Ok(IndexMap { table })
    }

    pub fn identity(alphabet: u32) -> Self {
        IndexMap {
            table: (1..=alphabet).collect(),
        }
    }

    /// `k -> (l + k) mod N`, with `N` standing in for residue 0.
    pub fn star(l: u32, alphabet: u32) -> Result<Self> {
        if l == 0 || l > alphabet {
            return Err(Error::ValueOutOfRange { value: l, alphabet });
        }
        let table = (1..=alphabet)
            .map(|k| match (l + k) % alphabet {
                0 => alphabet,
                r => r,
            })
            .collect();
        Ok(IndexMap { table })
    }

    /// Parity action on `{1,2}`: the image of `k` is 1 when `v + k` is odd, 2 when even.
    pub fn parity(v: u32) -> Result<Self> {
        if v != 1 && v != 2 {
            return Err(Error::EntryOutOfRange(v));
        }
        let table = (1..=2)
            .map(|k| if (v + k) % 2 == 1 { 1 } else { 2 })
            .collect();
        Ok(IndexMap { table })
    }

    pub fn alphabet(&self) -> u32 {
        self.table.len() as u32
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn apply(&self, k: u32) -> u32 {
        self.table[(k - 1) as usize]
    }
}

/// How a family entry was specified; kept so families serialize back verbatim.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IndexEntry {
    Perm(Vec<u32>),
    Star(u32),
    Parity(u32),
}

impl IndexEntry {
    pub fn resolve(&self, alphabet: u32) -> Result<IndexMap> {
        match self {
            IndexEntry::Perm(table) => {
                if table.len() != alphabet as usize {
                    return Err(Error::InvalidFamilyShape(format!(
                        "row of length {} for alphabet {alphabet}",
                        table.len()
                    )));
                }
                IndexMap::from_table(table.clone())
            }
            IndexEntry::Star(l) => IndexMap::star(*l, alphabet),
            IndexEntry::Parity(v) => {
                if alphabet != 2 {
                    return Err(Error::AlphabetMismatch {
                        expected: 2,
                        found: alphabet,
                    });
                }
                IndexMap::parity(*v)
            }
        }
    }
}

impl fmt::Display for IndexEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexEntry::Perm(t) => {
                let body: Vec<String> = t.iter().map(|v| v.to_string()).collect();
                write!(f, "perm:({})", body.join(","))
            }
            IndexEntry::Star(l) => write!(f, "star:{l}"),
            IndexEntry::Parity(v) => write!(f, "parity:{v}"),
        }
    }
}

impl FromStr for IndexEntry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::parse(1, 1, format!("malformed family entry {s:?}"));
        let (kind, body) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "perm" => {
                let inner = body
                    .strip_prefix('(')
                    .and_then(|b| b.strip_suffix(')'))
                    .ok_or_else(bad)?;
                let table = inner
                    .split(',')
                    .map(|v| v.trim().parse::<u32>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(IndexEntry::Perm(table))
            }
            "star" => Ok(IndexEntry::Star(body.parse().map_err(|_| bad())?)),
            "parity" => Ok(IndexEntry::Parity(body.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

/// True iff the images of all entries jointly cover `[1, N]`.
pub fn validate_coverage(maps: &[Vec<IndexMap>], alphabet: u32) -> bool {
    covered_count(maps, alphabet) == alphabet as usize
}

fn covered_count(maps: &[Vec<IndexMap>], alphabet: u32) -> usize {
    let mut hit = vec![false; alphabet as usize];
    for m in maps.iter().flatten() {
        for &v in m.table() {
            if v >= 1 && v <= alphabet {
                hit[(v - 1) as usize] = true;
            }
        }
    }
    hit.iter().filter(|&&h| h).count()
}

/// The `M x L` table `xi`. Construction enforces shape and the coverage condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexFamily {
    alphabet: u32,
    entries: Vec<Vec<IndexEntry>>,
    maps: Vec<Vec<IndexMap>>,
}

impl IndexFamily {
    pub fn new(alphabet: u32, entries: Vec<Vec<IndexEntry>>) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::InvalidFamilyShape("alphabet is empty".into()));
        }
        let cols = entries.first().map_or(0, |r| r.len());
        if entries.is_empty() || cols == 0 {
            return Err(Error::InvalidFamilyShape("family needs M, L >= 1".into()));
        }
        if entries.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidFamilyShape(
                "rows have different lengths".into(),
            ));
        }
        let maps = entries
            .iter()
            .map(|row| row.iter().map(|e| e.resolve(alphabet)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        let covered = covered_count(&maps, alphabet);
        if covered != alphabet as usize {
            return Err(Error::CoverageViolation { covered, alphabet });
        }
        Ok(IndexFamily {
            alphabet,
            entries,
            maps,
        })
    }

    /// The `1 x 1` family holding the identity: `F_{alpha,n}` is the plain composition.
    pub fn identity(alphabet: u32) -> Self {
        Self::new(
            alphabet,
            vec![vec![IndexEntry::Perm((1..=alphabet).collect())]],
        )
        .expect("identity covers")
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    /// `M`.
    pub fn rows(&self) -> usize {
        self.maps.len()
    }

    /// `L`.
    pub fn cols(&self) -> usize {
        self.maps[0].len()
    }

    pub fn maps(&self) -> &[Vec<IndexMap>] {
        &self.maps
    }

    pub fn entries(&self) -> &[Vec<IndexEntry>] {
        &self.entries
    }

    /// One line, rows separated by `;`.
    pub fn describe(&self) -> String {
        self.to_string().lines().collect::<Vec<_>>().join("; ")
    }

    /// Parses `M` lines (or `;`-separated rows) of whitespace-separated entries.
    pub fn parse(alphabet: u32, text: &str) -> Result<Self> {
        let entries = text
            .split(['\n', ';'])
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.split_whitespace().map(str::parse).collect())
            .collect::<Result<Vec<Vec<IndexEntry>>>>()?;
        Self::new(alphabet, entries)
    }
}

impl fmt::Display for IndexFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            f.write_str(&cells.join(" "))?;
        }
        Ok(())
    }
}

/// Family whose entry `(i, j)` acts by `k -> values[i][j] * k` (the mod-N star action).
pub fn star_family(values: &[Vec<u32>], alphabet: u32) -> Result<IndexFamily> {
    for &value in values.iter().flatten() {
        if value == 0 || value > alphabet {
            return Err(Error::ValueOutOfRange { value, alphabet });
        }
    }
    IndexFamily::new(
        alphabet,
        values
            .iter()
            .map(|row| row.iter().map(|&v| IndexEntry::Star(v)).collect())
            .collect(),
    )
}

fn check_alphabets(system: &ContractionSystem, word: &SymbolWord) -> Result<()> {
    if word.alphabet() as usize != system.len() {
        return Err(Error::AlphabetMismatch {
            expected: system.len() as u32,
            found: word.alphabet(),
        });
    }
    Ok(())
}

/// `f_{s_1} ∘ ... ∘ f_{s_n}` for explicit symbols.
pub fn compose_word(system: &ContractionSystem, symbols: &[u32]) -> Result<AffineMap> {
    let (last, rest) = symbols.split_last().ok_or(Error::EmptyWord)?;
    let mut acc = system.map(*last)?.clone();
    for &s in rest.iter().rev() {
        acc = system.map(s)?.compose(&acc)?;
    }
    Ok(acc)
}

/// `F^{xi_ij}_{alpha,n} = f_{xi(alpha_1)} ∘ ... ∘ f_{xi(alpha_n)}`.
pub fn component_map(
    system: &ContractionSystem,
    map: &IndexMap,
    alpha: &SymbolWord,
    n: usize,
) -> Result<AffineMap> {
    check_alphabets(system, alpha)?;
    if map.alphabet() as usize != system.len() {
        return Err(Error::AlphabetMismatch {
            expected: system.len() as u32,
            found: map.alphabet(),
        });
    }
    let symbols: Vec<u32> = alpha.unfold(n)?.into_iter().map(|s| map.apply(s)).collect();
    compose_word(system, &symbols)
}

/// `sum_i prod_j values[i][j]`.
pub(crate) fn sum_of_products(values: &[Vec<PadicInt>]) -> PadicInt {
    let mut total = values[0][0].zero_like();
    for row in values {
        let mut prod = row[0].clone();
        for v in &row[1..] {
            prod = &prod * v;
        }
        total = &total + &prod;
    }
    total
}

/// A materialised `F_{alpha,n}`: the `M x L` grid of composed affine components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnconventionalMap {
    components: Vec<Vec<AffineMap>>,
    depth: usize,
}

impl UnconventionalMap {
    pub fn build(
        system: &ContractionSystem,
        family: &IndexFamily,
        alpha: &SymbolWord,
        n: usize,
    ) -> Result<Self> {
        let components = family
            .maps()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|m| component_map(system, m, alpha, n))
                    .collect()
            })
            .collect::<Result<Vec<Vec<_>>>>()?;
        Ok(UnconventionalMap {
            components,
            depth: n,
        })
    }

    pub fn components(&self) -> &[Vec<AffineMap>] {
        &self.components
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn apply(&self, x: &PadicInt) -> Result<PadicInt> {
        let values = self
            .components
            .iter()
            .map(|row| row.iter().map(|f| f.apply(x)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Ok(sum_of_products(&values))
    }
}

/// Evaluates `F_{alpha,n}(x)`.
pub fn apply_unconventional(
    system: &ContractionSystem,
    family: &IndexFamily,
    alpha: &SymbolWord,
    n: usize,
    x: &PadicInt,
) -> Result<PadicInt> {
    UnconventionalMap::build(system, family, alpha, n)?.apply(x)
}
