//! Finite matrix groups over `Z/aZ`: breadth-first closure with Schreier
//! words, normal closures, the images `Q_a = φ̄_a(Γ(X))`, partition actions
//! and the congruence test for subgroups given by coset graphs.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homology::HomologyRep;
use crate::matrix::{check_modulus, ModMatrix};
use crate::presentation::{Gen, GenLetter, VeechWord};
use crate::wohlfahrt::CosetGraph;

/// Default bound on the number of elements in a closure.
pub const DEFAULT_ELEMENT_CAP: usize = 10_000_000;

/// Environment variable overriding [`DEFAULT_ELEMENT_CAP`].
pub const ELEMENT_CAP_ENV: &str = "VCL_ELEMENT_CAP";

/// The element cap from `VCL_ELEMENT_CAP`, or the default.
pub fn element_cap_from_env() -> usize {
    std::env::var(ELEMENT_CAP_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_ELEMENT_CAP)
}

/// Hash keys: matrices packed into a `u128` when they fit, boxed entries
/// otherwise.
enum KeyIndex {
    Packed { bits: u32, map: HashMap<u128, u32> },
    Wide(HashMap<Box<[u16]>, u32>),
}

impl KeyIndex {
    fn new(modulus: u32, dim: usize) -> Self {
        let bits = (32 - (modulus.max(2) - 1).leading_zeros()).max(1);
        if (dim * dim) as u32 * bits <= 128 {
            KeyIndex::Packed {
                bits,
                map: HashMap::new(),
            }
        } else {
            KeyIndex::Wide(HashMap::new())
        }
    }

    fn pack(bits: u32, entries: &[u16]) -> u128 {
        entries
            .iter()
            .enumerate()
            .fold(0u128, |acc, (i, &x)| acc | ((x as u128) << (i as u32 * bits)))
    }

    fn get(&self, entries: &[u16]) -> Option<u32> {
        match self {
            KeyIndex::Packed { bits, map } => map.get(&Self::pack(*bits, entries)).copied(),
            KeyIndex::Wide(map) => map.get(entries).copied(),
        }
    }

    fn insert(&mut self, entries: &[u16], idx: u32) {
        match self {
            KeyIndex::Packed { bits, map } => {
                map.insert(Self::pack(*bits, entries), idx);
            }
            KeyIndex::Wide(map) => {
                map.insert(entries.into(), idx);
            }
        }
    }
}

/// A letter of a Schreier word: generator index and inverse flag.
pub type WordLetter = (usize, bool);

/// A finite group generated by matrices over `Z/aZ`, with one BFS-shortest
/// word per element.
pub struct ElementTable {
    modulus: u32,
    dim: usize,
    gens: Vec<ModMatrix>,
    /// Entries of all elements, `dim*dim` per element, in BFS order.
    data: Vec<u16>,
    index: KeyIndex,
    /// `(parent, letter code)`; the identity has no parent.
    parent: Vec<Option<(u32, u32)>>,
}

impl std::fmt::Debug for ElementTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ElementTable")
            .field("modulus", &self.modulus)
            .field("dim", &self.dim)
            .field("generators", &self.gens.len())
            .field("len", &self.len())
            .finish()
    }
}

impl ElementTable {
    /// Breadth-first closure. Elements are discovered by left multiplication
    /// with the generators in the given order, then their inverses.
    pub fn closure(gens: &[ModMatrix], modulus: u32, dim: usize, cap: usize) -> Result<Self> {
        check_modulus(modulus)?;
        for g in gens {
            if g.modulus() != modulus || g.dim() != dim {
                return Err(Error::DimensionMismatch("generator shape or modulus".into()));
            }
        }
        let mut letters: Vec<ModMatrix> = gens.to_vec();
        for g in gens {
            letters.push(g.inverse()?);
        }
        let id = ModMatrix::identity(modulus, dim)?;
        let mut table = ElementTable {
            modulus,
            dim,
            gens: gens.to_vec(),
            data: Vec::new(),
            index: KeyIndex::new(modulus, dim),
            parent: Vec::new(),
        };
        table.push(id.entries(), None);
        let mut head = 0usize;
        while head < table.len() {
            let x = table.element(head);
            for (code, g) in letters.iter().enumerate() {
                let y = g.mul_unchecked(&x);
                if table.index.get(y.entries()).is_none() {
                    if table.len() >= cap {
                        return Err(Error::CapExceeded(cap));
                    }
                    table.push(y.entries(), Some((head as u32, code as u32)));
                }
            }
            head += 1;
        }
        Ok(table)
    }

    fn push(&mut self, entries: &[u16], parent: Option<(u32, u32)>) {
        let idx = self.parent.len() as u32;
        self.data.extend_from_slice(entries);
        self.index.insert(entries, idx);
        self.parent.push(parent);
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[ModMatrix] {
        &self.gens
    }

    pub fn element(&self, i: usize) -> ModMatrix {
        let d2 = self.dim * self.dim;
        ModMatrix::from_raw(self.modulus, self.dim, self.data[i * d2..(i + 1) * d2].to_vec())
    }

    pub fn elements(&self) -> impl Iterator<Item = ModMatrix> + '_ {
        (0..self.len()).map(|i| self.element(i))
    }

    pub fn index_of(&self, m: &ModMatrix) -> Option<usize> {
        if m.modulus() != self.modulus || m.dim() != self.dim {
            return None;
        }
        self.index.get(m.entries()).map(|i| i as usize)
    }

    pub fn contains(&self, m: &ModMatrix) -> bool {
        self.index_of(m).is_some()
    }

    /// Word evaluating to element `i`, read left to right.
    pub fn schreier_word(&self, i: usize) -> Vec<WordLetter> {
        let k = self.gens.len();
        let mut word = Vec::new();
        let mut cur = i;
        while let Some((p, code)) = self.parent[cur] {
            let code = code as usize;
            word.push(if code < k { (code, false) } else { (code - k, true) });
            cur = p as usize;
        }
        word
    }

    /// Evaluates a word in this table's generators.
    pub fn eval_word(&self, word: &[WordLetter]) -> Result<ModMatrix> {
        let mut acc = ModMatrix::identity(self.modulus, self.dim)?;
        for &(g, inv) in word {
            let m = if inv { self.gens[g].inverse()? } else { self.gens[g].clone() };
            acc = acc.mul_unchecked(&m);
        }
        Ok(acc)
    }
}

/// `Q_a`, the image of the Veech group in `GL_{2g}(Z/aZ)`, generated by
/// `φ̄_a(T)` and `φ̄_a` of the rotation generator.
pub fn image_group(rep: &HomologyRep, a: u32, cap: usize) -> Result<ElementTable> {
    let gens = rep.generators_mod(a)?;
    ElementTable::closure(&gens, a, rep.dim(), cap)
}

/// Converts a Schreier word of an [`image_group`] table to a Veech word.
pub fn veech_word(rep: &HomologyRep, word: &[WordLetter]) -> VeechWord {
    let syms = [Gen::T, rep.family.rotation()];
    VeechWord::from_letters(word.iter().map(|&(g, inverse)| GenLetter {
        gen: syms[g],
        inverse,
    }))
}

/// Smallest subgroup of `ambient` containing `seed` and normalized by the
/// generators of `ambient`.
pub fn normal_closure(seed: &[ModMatrix], ambient: &ElementTable, cap: usize) -> Result<ElementTable> {
    for s in seed {
        if !ambient.contains(s) {
            return Err(Error::NotInAmbient(format!("{:?}", s.entries())));
        }
    }
    let (a, dim) = (ambient.modulus(), ambient.dim());
    let conj: Vec<(ModMatrix, ModMatrix)> = ambient
        .generators()
        .iter()
        .map(|g| g.inverse().map(|gi| (g.clone(), gi)))
        .collect::<Result<_>>()?;
    let mut gens: Vec<ModMatrix> = Vec::new();
    let mut table = ElementTable::closure(&gens, a, dim, cap)?;
    let mut pending: VecDeque<ModMatrix> = seed.iter().cloned().collect();
    while let Some(x) = pending.pop_front() {
        if table.contains(&x) {
            continue;
        }
        for (g, gi) in &conj {
            pending.push_back(g.mul_unchecked(&x).mul_unchecked(gi));
        }
        gens.push(x);
        table = ElementTable::closure(&gens, a, dim, cap)?;
    }
    // every generator's conjugates were queued, and conjugates of products
    // are products of conjugates, so the table is normal
    Ok(table)
}

/// `|Q_{ka}| / |Q_a|`, the order of the kernel of reduction `Q_{ka} → Q_a`.
pub fn reduction_kernel_order(rep: &HomologyRep, ka: u32, a: u32, cap: usize) -> Result<usize> {
    if a == 0 || !ka.is_multiple_of(a) {
        return Err(Error::UnsupportedParameter(format!("{a} does not divide {ka}")));
    }
    let big = image_group(rep, ka, cap)?.len();
    let small = image_group(rep, a, cap)?.len();
    if big % small != 0 {
        return Err(Error::InvalidPack {
            relation: format!("|Q_{a}| = {small} divides |Q_{ka}| = {big}"),
        });
    }
    Ok(big / small)
}

/// Outcome of [`is_congruence_of_level`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceDecision {
    pub is_congruence: bool,
    /// Size of the orbit of `(base, I)`; only known when the search ran to
    /// completion.
    pub orbit_size: Option<usize>,
    /// `|Q_a|`; only known when the search ran to completion.
    pub group_order: Option<usize>,
}

/// Decides whether the subgroup `Γ` of `graph` contains `Γ(a)`.
///
/// Walks the orbit of `(base, I)` under `g: (c, M) ↦ (g·c, φ̄_a(g)M)`. This
/// orbit has `[Γ(X) : Γ ∩ Γ(a)]` points and projects onto `Q_a`; `Γ ⊇ Γ(a)`
/// exactly when the projection is injective. The search stops at the first
/// matrix met with two different cosets.
pub fn is_congruence_of_level(
    rep: &HomologyRep,
    graph: &CosetGraph,
    a: u32,
    cap: usize,
) -> Result<CongruenceDecision> {
    if graph.family != rep.family || graph.n != rep.n {
        return Err(Error::InvalidGraph(format!(
            "graph is for {} n = {}, representation for {} n = {}",
            graph.family, graph.n, rep.family, rep.n
        )));
    }
    let gens = rep.generators_mod(a)?;
    let perms = [graph.perm_t(), graph.perm_rot()];
    let dim = rep.dim();
    let mut index = KeyIndex::new(a, dim);
    let mut cosets: Vec<u32> = Vec::new();
    let mut data: Vec<u16> = Vec::new();
    let id = ModMatrix::identity(a, dim)?;
    index.insert(id.entries(), 0);
    cosets.push(graph.base as u32);
    data.extend_from_slice(id.entries());
    let d2 = dim * dim;
    let mut head = 0;
    while head < cosets.len() {
        let m = ModMatrix::from_raw(a, dim, data[head * d2..(head + 1) * d2].to_vec());
        let c = cosets[head] as usize;
        for (g, perm) in gens.iter().zip(perms) {
            let y = g.mul_unchecked(&m);
            let c2 = perm[c];
            match index.get(y.entries()) {
                Some(j) if cosets[j as usize] as usize != c2 => {
                    return Ok(CongruenceDecision {
                        is_congruence: false,
                        orbit_size: None,
                        group_order: None,
                    })
                }
                Some(_) => {}
                None => {
                    if cosets.len() >= cap {
                        return Err(Error::CapExceeded(cap));
                    }
                    index.insert(y.entries(), cosets.len() as u32);
                    cosets.push(c2 as u32);
                    data.extend_from_slice(y.entries());
                }
            }
        }
        head += 1;
    }
    // a finite group is closed under the positive generators alone
    Ok(CongruenceDecision {
        is_congruence: true,
        orbit_size: Some(cosets.len()),
        group_order: Some(cosets.len()),
    })
}

/// Encodes `z` as `Σ z_i a^i`.
pub fn point_index(z: &[u16], a: u32) -> usize {
    z.iter().rev().fold(0usize, |acc, &x| acc * a as usize + x as usize)
}

/// Inverse of [`point_index`].
pub fn point_from_index(mut idx: usize, a: u32, dim: usize) -> Vec<u16> {
    (0..dim)
        .map(|_| {
            let x = (idx % a as usize) as u16;
            idx /= a as usize;
            x
        })
        .collect()
}

fn point_count(a: u32, dim: usize) -> Result<usize> {
    (a as usize)
        .checked_pow(dim as u32)
        .filter(|&p| p <= 1 << 26)
        .ok_or_else(|| Error::UnsupportedParameter(format!("{a}^{dim} points is too many")))
}

/// The permutation `z ↦ Mz` on point indices.
pub fn point_permutation(m: &ModMatrix) -> Result<Vec<u32>> {
    let (a, dim) = (m.modulus(), m.dim());
    let count = point_count(a, dim)?;
    Ok((0..count)
        .map(|i| point_index(&m.mul_vec(&point_from_index(i, a, dim)), a) as u32)
        .collect())
}

/// A partition of `(Z/aZ)^dim`, given by a block id for every point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointPartition {
    pub modulus: u32,
    pub dim: usize,
    pub block_id: Vec<u32>,
    /// Labeled partitions are fixed only blockwise; unlabeled ones setwise.
    pub labeled: bool,
}

/// On-disk form of a [`PointPartition`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionFile {
    pub modulus: u32,
    pub dim: usize,
    pub labeled: bool,
    pub blocks: Vec<Vec<usize>>,
}

impl PointPartition {
    pub fn from_blocks(modulus: u32, dim: usize, labeled: bool, blocks: &[Vec<usize>]) -> Result<Self> {
        check_modulus(modulus)?;
        let count = point_count(modulus, dim)?;
        let mut block_id = vec![u32::MAX; count];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::MalformedPartition(format!("block {b} is empty")));
            }
            for &p in block {
                if p >= count {
                    return Err(Error::MalformedPartition(format!(
                        "point {p} outside 0..{count}"
                    )));
                }
                if block_id[p] != u32::MAX {
                    return Err(Error::MalformedPartition(format!("point {p} appears twice")));
                }
                block_id[p] = b as u32;
            }
        }
        if let Some(p) = block_id.iter().position(|&b| b == u32::MAX) {
            return Err(Error::MalformedPartition(format!("point {p} is in no block")));
        }
        let mut out = PointPartition {
            modulus,
            dim,
            block_id: Vec::new(),
            labeled,
        };
        out.block_id = out.normalized(block_id);
        Ok(out)
    }

    pub fn from_file(f: &PartitionFile) -> Result<Self> {
        PointPartition::from_blocks(f.modulus, f.dim, f.labeled, &f.blocks)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: PartitionFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            reason: e.to_string(),
        })?;
        PointPartition::from_file(&f)
    }

    /// Every point in its own block.
    pub fn singletons(modulus: u32, dim: usize, labeled: bool) -> Result<Self> {
        let count = point_count(modulus, dim)?;
        PointPartition::from_blocks(modulus, dim, labeled, &(0..count).map(|p| vec![p]).collect::<Vec<_>>())
    }

    pub fn num_blocks(&self) -> usize {
        self.block_id.iter().map(|&b| b as usize + 1).max().unwrap_or(0)
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (p, &b) in self.block_id.iter().enumerate() {
            blocks[b as usize].push(p);
        }
        blocks
    }

    pub fn to_file(&self) -> PartitionFile {
        PartitionFile {
            modulus: self.modulus,
            dim: self.dim,
            labeled: self.labeled,
            blocks: self.blocks(),
        }
    }

    /// Relabels blocks by first appearance; the identity for labeled
    /// partitions.
    fn normalized(&self, ids: Vec<u32>) -> Vec<u32> {
        if self.labeled {
            return ids;
        }
        let mut relabel: HashMap<u32, u32> = HashMap::new();
        ids.into_iter()
            .map(|b| {
                let next = relabel.len() as u32;
                *relabel.entry(b).or_insert(next)
            })
            .collect()
    }

    /// Image under the point permutation `perm`: the block of `perm[z]` is
    /// the old block of `z`.
    fn act(&self, ids: &[u32], perm: &[u32]) -> Vec<u32> {
        let mut out = vec![0u32; ids.len()];
        for (z, &b) in ids.iter().enumerate() {
            out[perm[z] as usize] = b;
        }
        self.normalized(out)
    }
}

/// Result of [`gamma_b_action`].
#[derive(Clone, Debug)]
pub struct GammaB {
    /// `[Γ(X) : Γ_B]`, the size of the orbit of `B`.
    pub index: usize,
    pub coset_graph: CosetGraph,
    /// Schreier generators of the stabilizer of `B`.
    pub stabilizer_words: Vec<VeechWord>,
}

/// The action of the Veech group on the orbit of `B` under `Q_a`.
pub fn gamma_b_action(rep: &HomologyRep, b: &PointPartition, cap: usize) -> Result<GammaB> {
    if b.dim != rep.dim() {
        return Err(Error::MalformedPartition(format!(
            "partition of dimension {}, homology of dimension {}",
            b.dim,
            rep.dim()
        )));
    }
    let a = b.modulus;
    let gens = rep.generators_mod(a)?;
    let perms: Vec<Vec<u32>> = gens.iter().map(point_permutation).collect::<Result<_>>()?;
    let start = b.normalized(b.block_id.clone());
    let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut orbit: Vec<Vec<u32>> = vec![start.clone()];
    let mut transversal: Vec<VeechWord> = vec![VeechWord::identity()];
    seen.insert(start, 0);
    let syms = [Gen::T, rep.family.rotation()];
    let mut images = [Vec::new(), Vec::new()];
    let mut head = 0;
    while head < orbit.len() {
        for (k, perm) in perms.iter().enumerate() {
            let y = b.act(&orbit[head], perm);
            let j = match seen.get(&y) {
                Some(&j) => j,
                None => {
                    if orbit.len() >= cap {
                        return Err(Error::CapExceeded(cap));
                    }
                    let j = orbit.len();
                    seen.insert(y.clone(), j);
                    orbit.push(y);
                    transversal.push(VeechWord::power(syms[k], 1).concat(&transversal[head]));
                    j
                }
            };
            images[k].push(j);
        }
        head += 1;
    }
    let [perm_t, perm_rot] = images;
    let mut stabilizer_words: Vec<VeechWord> = Vec::new();
    for i in 0..orbit.len() {
        for (k, perm) in [&perm_t, &perm_rot].iter().enumerate() {
            let j = perm[i];
            let s = transversal[j]
                .inverse()
                .concat(&VeechWord::power(syms[k], 1))
                .concat(&transversal[i]);
            if !s.is_empty() && !stabilizer_words.contains(&s) {
                stabilizer_words.push(s);
            }
        }
    }
    let coset_graph = CosetGraph::new(rep.family, rep.n, perm_t, perm_rot, 0)?;
    Ok(GammaB {
        index: orbit.len(),
        coset_graph,
        stabilizer_words,
    })
}

/// Orbits of the group generated by `gens` on the points.
fn orbit_partition(gens: &[ModMatrix], a: u32, dim: usize) -> Result<PointPartition> {
    let count = point_count(a, dim)?;
    let perms: Vec<Vec<u32>> = gens.iter().map(point_permutation).collect::<Result<_>>()?;
    let mut block_id = vec![u32::MAX; count];
    let mut next = 0u32;
    for start in 0..count {
        if block_id[start] != u32::MAX {
            continue;
        }
        block_id[start] = next;
        let mut stack = vec![start];
        while let Some(p) = stack.pop() {
            for perm in &perms {
                let q = perm[p] as usize;
                if block_id[q] == u32::MAX {
                    block_id[q] = next;
                    stack.push(q);
                }
            }
        }
        next += 1;
    }
    Ok(PointPartition {
        modulus: a,
        dim,
        block_id,
        labeled: false,
    })
}

/// Whether `H = ⟨φ̄_a(words)⟩` is the full setwise stabilizer in `Q_a` of its
/// own orbit partition.
pub fn is_orbit_partition_stabilizer(
    rep: &HomologyRep,
    a: u32,
    subgroup_words: &[VeechWord],
    cap: usize,
) -> Result<bool> {
    let ambient = image_group(rep, a, cap)?;
    let hgens: Vec<ModMatrix> = subgroup_words
        .iter()
        .map(|w| rep.phibar_word(a, w))
        .collect::<Result<_>>()?;
    for g in &hgens {
        if !ambient.contains(g) {
            return Err(Error::NotInAmbient(format!("{:?}", g.entries())));
        }
    }
    let h = ElementTable::closure(&hgens, a, rep.dim(), cap)?;
    let p = orbit_partition(&hgens, a, rep.dim())?;
    let base = p.normalized(p.block_id.clone());
    let mut stab = 0usize;
    for m in ambient.elements() {
        if p.act(&base, &point_permutation(&m)?) == base {
            stab += 1;
        }
    }
    Ok(stab == h.len())
}
