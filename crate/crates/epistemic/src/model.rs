use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{EpistemicError, Result};
use crate::formula::Formula;

pub type WorldId = u32;

/// Upper bound on atoms for [`EpistemicModel::new`], which enumerates every
/// valuation up front. Models grown by awareness expansion are not capped.
pub const MAX_ENUMERATED_ATOMS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomKind {
    Observable,
    Hypothesis,
    Assumption,
    Meta,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub id: String,
    pub kind: AtomKind,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
}

impl Atom {
    pub fn new(id: impl Into<String>, kind: AtomKind) -> Self {
        Atom { id: id.into(), kind, label: String::new() }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

fn validate_atom_id(id: &str) -> Result<()> {
    if id.is_empty() || id.starts_with('!') || id.chars().any(char::is_whitespace) {
        return Err(EpistemicError::Invalid(format!(
            "atom id `{id}` must be non-empty, whitespace-free and must not start with `!`"
        )));
    }
    Ok(())
}

/// A world with a total valuation over the registry (index-aligned).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "WorldRow", try_from = "WorldRow")]
pub struct World {
    pub id: WorldId,
    valuation: Vec<bool>,
}

impl World {
    pub fn valuation(&self) -> &[bool] {
        &self.valuation
    }
}

/// Serialized world: valuation as a `0`/`1` string in registry order.
#[derive(Serialize, Deserialize)]
struct WorldRow {
    id: WorldId,
    valuation: String,
}

impl From<World> for WorldRow {
    fn from(w: World) -> Self {
        WorldRow { id: w.id, valuation: w.valuation.iter().map(|&b| if b { '1' } else { '0' }).collect() }
    }
}

impl TryFrom<WorldRow> for World {
    type Error = String;

    fn try_from(row: WorldRow) -> std::result::Result<Self, Self::Error> {
        let valuation = row
            .valuation
            .chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                other => Err(format!("world {}: bad valuation character {other:?}", row.id)),
            })
            .collect::<std::result::Result<_, _>>()?;
        Ok(World { id: row.id, valuation })
    }
}

/// How indistinguishability cells are derived for a freshly enumerated model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellSpec {
    /// One cell per agent: every announcement is public.
    Public,
    /// `w ~ᵢ w'` iff the worlds agree on every atom visible to `i`.
    Masks(BTreeMap<String, BTreeSet<String>>),
}

/// Explicit-world plausibility model.
///
/// Worlds are kept sorted by id; ranks and cell ids are stored per agent as
/// vectors aligned with `worlds`. After every operation ranks are dense
/// within each cell and cell ids are dense per agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelDoc", into = "ModelDoc")]
pub struct EpistemicModel {
    registry: Vec<Atom>,
    index: BTreeMap<String, usize>,
    agents: Vec<String>,
    worlds: Vec<World>,
    ranks: BTreeMap<String, Vec<u32>>,
    cells: BTreeMap<String, Vec<u32>>,
    awareness: BTreeMap<String, BTreeSet<Formula>>,
    next_world_id: WorldId,
    inconsistent: bool,
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    registry: Vec<Atom>,
    agents: Vec<String>,
    worlds: Vec<World>,
    ranks: BTreeMap<String, Vec<u32>>,
    cells: BTreeMap<String, Vec<u32>>,
    awareness: BTreeMap<String, BTreeSet<Formula>>,
    next_world_id: WorldId,
    #[serde(default)]
    inconsistent: bool,
}

impl From<EpistemicModel> for ModelDoc {
    fn from(m: EpistemicModel) -> Self {
        ModelDoc {
            registry: m.registry,
            agents: m.agents,
            worlds: m.worlds,
            ranks: m.ranks,
            cells: m.cells,
            awareness: m.awareness,
            next_world_id: m.next_world_id,
            inconsistent: m.inconsistent,
        }
    }
}

impl TryFrom<ModelDoc> for EpistemicModel {
    type Error = String;

    fn try_from(doc: ModelDoc) -> std::result::Result<Self, Self::Error> {
        let index = doc.registry.iter().enumerate().map(|(i, a)| (a.id.clone(), i)).collect();
        let model = EpistemicModel {
            registry: doc.registry,
            index,
            agents: doc.agents,
            worlds: doc.worlds,
            ranks: doc.ranks,
            cells: doc.cells,
            awareness: doc.awareness,
            next_world_id: doc.next_world_id,
            inconsistent: doc.inconsistent,
        };
        model.check_invariants()?;
        Ok(model)
    }
}

impl EpistemicModel {
    /// Enumerates all `2^|registry|` valuations. World ids encode the
    /// valuation: bit `k` of the id is the value of registry atom `k`.
    /// Every world starts at rank 0 and every agent is aware of every atom.
    pub fn new(registry: Vec<Atom>, agents: Vec<String>, cells: &CellSpec) -> Result<Self> {
        if registry.len() > MAX_ENUMERATED_ATOMS {
            return Err(EpistemicError::TooManyAtoms(registry.len(), MAX_ENUMERATED_ATOMS));
        }
        let n = registry.len();
        let worlds = (0..(1u32 << n))
            .map(|id| World { id, valuation: (0..n).map(|k| id >> k & 1 == 1).collect() })
            .collect();
        let mut model = Self::skeleton(registry, agents, worlds)?;
        model.next_world_id = 1u32 << n;
        model.assign_cells(cells)?;
        Ok(model)
    }

    /// Builds a model from explicit worlds, ranks and cell ids. Used by
    /// synthetic states and tests; ranks and cells are normalized.
    pub fn from_parts(
        registry: Vec<Atom>,
        agents: Vec<String>,
        worlds: Vec<(WorldId, Vec<bool>)>,
        ranks: BTreeMap<String, Vec<u32>>,
        cells: BTreeMap<String, Vec<u32>>,
    ) -> Result<Self> {
        let worlds: Vec<World> = worlds.into_iter().map(|(id, valuation)| World { id, valuation }).collect();
        let mut model = Self::skeleton(registry, agents, worlds)?;
        model.worlds.sort_by_key(|w| w.id);
        if model.worlds.windows(2).any(|p| p[0].id == p[1].id) {
            return Err(EpistemicError::Invalid("duplicate world id".into()));
        }
        model.next_world_id = model.worlds.last().map_or(0, |w| w.id + 1);
        for agent in &model.agents {
            let r = ranks.get(agent).ok_or_else(|| EpistemicError::UnknownAgent(agent.clone()))?;
            let c = cells.get(agent).ok_or_else(|| EpistemicError::UnknownAgent(agent.clone()))?;
            if r.len() != model.worlds.len() || c.len() != model.worlds.len() {
                return Err(EpistemicError::Invalid(format!("agent `{agent}`: ranks/cells not aligned with worlds")));
            }
        }
        model.ranks = model.agents.iter().map(|a| (a.clone(), ranks[a].clone())).collect();
        model.cells = model.agents.iter().map(|a| (a.clone(), cells[a].clone())).collect();
        model.normalize();
        model.check_invariants().map_err(EpistemicError::Invalid)?;
        Ok(model)
    }

    fn skeleton(registry: Vec<Atom>, agents: Vec<String>, worlds: Vec<World>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, atom) in registry.iter().enumerate() {
            validate_atom_id(&atom.id)?;
            if index.insert(atom.id.clone(), i).is_some() {
                return Err(EpistemicError::DuplicateAtom(atom.id.clone()));
            }
        }
        let agent_set: BTreeSet<String> = agents.iter().cloned().collect();
        if agent_set.len() != agents.len() || agents.iter().any(String::is_empty) {
            return Err(EpistemicError::Invalid("agent ids must be unique and non-empty".into()));
        }
        if worlds.iter().any(|w| w.valuation.len() != registry.len()) {
            return Err(EpistemicError::Invalid("valuation not total over the registry".into()));
        }
        let n = worlds.len();
        let all: BTreeSet<Formula> = registry.iter().map(|a| Formula::Atom(a.id.clone())).collect();
        Ok(EpistemicModel {
            index,
            ranks: agents.iter().map(|a| (a.clone(), vec![0; n])).collect(),
            cells: agents.iter().map(|a| (a.clone(), vec![0; n])).collect(),
            awareness: agents.iter().map(|a| (a.clone(), all.clone())).collect(),
            registry,
            agents,
            worlds,
            next_world_id: 0,
            inconsistent: n == 0,
        })
    }

    fn assign_cells(&mut self, spec: &CellSpec) -> Result<()> {
        match spec {
            CellSpec::Public => {}
            CellSpec::Masks(masks) => {
                for agent in &self.agents {
                    let visible = masks.get(agent).ok_or_else(|| EpistemicError::UnknownAgent(agent.clone()))?;
                    let cols = visible.iter().map(|id| self.atom_index(id)).collect::<Result<Vec<_>>>()?;
                    let mut ids: BTreeMap<Vec<bool>, u32> = BTreeMap::new();
                    let cells = self
                        .worlds
                        .iter()
                        .map(|w| {
                            let key: Vec<bool> = cols.iter().map(|&k| w.valuation[k]).collect();
                            let next = ids.len() as u32;
                            *ids.entry(key).or_insert(next)
                        })
                        .collect();
                    self.cells.insert(agent.clone(), cells);
                }
                if let Some(extra) = masks.keys().find(|a| !self.ranks.contains_key(*a)) {
                    return Err(EpistemicError::UnknownAgent(extra.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn registry(&self) -> &[Atom] {
        &self.registry
    }

    pub fn atom(&self, id: &str) -> Option<&Atom> {
        self.index.get(id).map(|&i| &self.registry[i])
    }

    pub fn has_atom(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn atom_index(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| EpistemicError::UnknownAtom(id.to_string()))
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn has_agent(&self, agent: &str) -> bool {
        self.ranks.contains_key(agent)
    }

    pub fn worlds(&self) -> &[World] {
        &self.worlds
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn world_ids(&self) -> impl Iterator<Item = WorldId> + '_ {
        self.worlds.iter().map(|w| w.id)
    }

    pub fn world_position(&self, id: WorldId) -> Result<usize> {
        self.worlds.binary_search_by_key(&id, |w| w.id).map_err(|_| EpistemicError::UnknownWorld(id))
    }

    pub fn contains_world(&self, id: WorldId) -> bool {
        self.world_position(id).is_ok()
    }

    pub fn is_inconsistent(&self) -> bool {
        self.inconsistent
    }

    /// Value of `atom` at world `id`.
    pub fn holds(&self, id: WorldId, atom: &str) -> Result<bool> {
        Ok(self.worlds[self.world_position(id)?].valuation[self.atom_index(atom)?])
    }

    /// Atoms true at world `id`, in registry order.
    pub fn true_atoms(&self, id: WorldId) -> Result<Vec<&str>> {
        let w = &self.worlds[self.world_position(id)?];
        Ok(self.registry.iter().zip(&w.valuation).filter(|(_, &v)| v).map(|(a, _)| a.id.as_str()).collect())
    }

    pub fn rank(&self, agent: &str, id: WorldId) -> Result<u32> {
        let pos = self.world_position(id)?;
        Ok(self.agent_ranks(agent)?[pos])
    }

    pub fn cell(&self, agent: &str, id: WorldId) -> Result<u32> {
        let pos = self.world_position(id)?;
        Ok(self.agent_cells(agent)?[pos])
    }

    pub fn agent_ranks(&self, agent: &str) -> Result<&[u32]> {
        self.ranks.get(agent).map(Vec::as_slice).ok_or_else(|| EpistemicError::UnknownAgent(agent.to_string()))
    }

    pub fn agent_cells(&self, agent: &str) -> Result<&[u32]> {
        self.cells.get(agent).map(Vec::as_slice).ok_or_else(|| EpistemicError::UnknownAgent(agent.to_string()))
    }

    pub fn awareness(&self, agent: &str) -> Result<&BTreeSet<Formula>> {
        self.awareness.get(agent).ok_or_else(|| EpistemicError::UnknownAgent(agent.to_string()))
    }

    pub fn is_aware(&self, agent: &str, phi: &Formula) -> Result<bool> {
        Ok(self.awareness(agent)?.contains(&phi.canonical()))
    }

    /// Lowest-id world agreeing with every listed atom that is registered.
    pub fn find_world(&self, assignment: &BTreeMap<String, bool>) -> Option<WorldId> {
        let cols: Vec<(usize, bool)> =
            assignment.iter().filter_map(|(id, &v)| self.index.get(id).map(|&k| (k, v))).collect();
        self.worlds.iter().find(|w| cols.iter().all(|&(k, v)| w.valuation[k] == v)).map(|w| w.id)
    }

    /// Truth vector of `phi`, aligned with [`Self::worlds`].
    pub fn truth(&self, phi: &Formula) -> Result<Vec<bool>> {
        let n = self.worlds.len();
        Ok(match phi {
            Formula::Top => vec![true; n],
            Formula::Atom(id) => {
                let k = self.atom_index(id)?;
                self.worlds.iter().map(|w| w.valuation[k]).collect()
            }
            Formula::Not(f) => self.truth(f)?.into_iter().map(|b| !b).collect(),
            Formula::And(fs) => {
                let mut acc = vec![true; n];
                for f in fs {
                    acc.iter_mut().zip(self.truth(f)?).for_each(|(a, b)| *a &= b);
                }
                acc
            }
            Formula::Or(fs) => {
                let mut acc = vec![false; n];
                for f in fs {
                    acc.iter_mut().zip(self.truth(f)?).for_each(|(a, b)| *a |= b);
                }
                acc
            }
            Formula::Implies(a, b) => {
                self.truth(a)?.into_iter().zip(self.truth(b)?).map(|(x, y)| !x || y).collect()
            }
            Formula::Knows(i, f) => {
                let t = self.truth(f)?;
                let cells = self.agent_cells(i)?;
                let mut all = vec![true; cell_count(cells)];
                for (w, &c) in cells.iter().enumerate() {
                    all[c as usize] &= t[w];
                }
                cells.iter().map(|&c| all[c as usize]).collect()
            }
            Formula::Believes(i, f) => {
                let t = self.truth(f)?;
                let cells = self.agent_cells(i)?;
                let ranks = self.agent_ranks(i)?;
                let k = cell_count(cells);
                let mut min = vec![u32::MAX; k];
                for (w, &c) in cells.iter().enumerate() {
                    min[c as usize] = min[c as usize].min(ranks[w]);
                }
                let mut all = vec![true; k];
                for (w, &c) in cells.iter().enumerate() {
                    if ranks[w] == min[c as usize] {
                        all[c as usize] &= t[w];
                    }
                }
                cells.iter().map(|&c| all[c as usize]).collect()
            }
            Formula::Aware(i, f) => vec![self.is_aware(i, f)?; n],
            Formula::Common(group, f) => {
                let t = self.truth(f)?;
                let mut uf = UnionFind::new(n);
                for agent in group {
                    let cells = self.agent_cells(agent)?;
                    let mut first = vec![usize::MAX; cell_count(cells)];
                    for (w, &c) in cells.iter().enumerate() {
                        match first[c as usize] {
                            usize::MAX => first[c as usize] = w,
                            root => uf.union(root, w),
                        }
                    }
                }
                let mut all = vec![true; n];
                for w in 0..n {
                    let r = uf.find(w);
                    all[r] &= t[w];
                }
                (0..n).map(|w| all[uf.find(w)]).collect()
            }
        })
    }

    pub fn eval(&self, world: WorldId, phi: &Formula) -> Result<bool> {
        let pos = self.world_position(world)?;
        Ok(self.truth(phi)?[pos])
    }

    /// `phi` holds at every world.
    pub fn valid(&self, phi: &Formula) -> Result<bool> {
        Ok(self.truth(phi)?.into_iter().all(|b| b))
    }

    /// `phi` holds at some world.
    pub fn satisfiable(&self, phi: &Formula) -> Result<bool> {
        Ok(self.truth(phi)?.into_iter().any(|b| b))
    }

    /// Hard announcement `!psi`: keep exactly the worlds where `psi` held in
    /// this (pre-update) model. An empty result comes back flagged via
    /// [`Self::is_inconsistent`] rather than as an error.
    pub fn announce(&self, psi: &Formula) -> Result<Self> {
        let keep = self.truth(psi)?;
        Ok(self.restrict(&keep))
    }

    /// Keep only the listed worlds (unknown ids are ignored). Lets a caller
    /// evaluate several announcements against one model and apply their
    /// intersection at once.
    pub fn retain_worlds(&self, ids: &BTreeSet<WorldId>) -> Self {
        let keep: Vec<bool> = self.worlds.iter().map(|w| ids.contains(&w.id)).collect();
        self.restrict(&keep)
    }

    fn restrict(&self, keep: &[bool]) -> Self {
        let pick = |v: &Vec<u32>| v.iter().zip(keep).filter(|(_, &k)| k).map(|(&x, _)| x).collect::<Vec<_>>();
        let mut out = self.clone();
        out.worlds = self.worlds.iter().zip(keep).filter(|(_, &k)| k).map(|(w, _)| w.clone()).collect();
        out.ranks = self.ranks.iter().map(|(a, r)| (a.clone(), pick(r))).collect();
        out.cells = self.cells.iter().map(|(a, c)| (a.clone(), pick(c))).collect();
        out.inconsistent = out.worlds.is_empty();
        out.normalize();
        out
    }

    /// Lexicographic upgrade `⇑psi`: within every cell each psi-world becomes
    /// strictly more plausible than each ¬psi-world; the order inside each
    /// side is kept. One sort on `(cell, ¬psi, rank)` per agent.
    pub fn upgrade_lexicographic(&self, psi: &Formula) -> Result<Self> {
        let t = self.truth(psi)?;
        let mut out = self.clone();
        for agent in &self.agents {
            let cells = &self.cells[agent];
            let ranks = &self.ranks[agent];
            let mut order: Vec<usize> = (0..self.worlds.len()).collect();
            order.sort_by_key(|&w| (cells[w], !t[w], ranks[w]));
            let new = out.ranks.get_mut(agent).expect("agent present");
            let mut prev: Option<(u32, bool, u32)> = None;
            let mut next = 0u32;
            for &w in &order {
                let key = (cells[w], !t[w], ranks[w]);
                match prev {
                    Some(p) if p.0 != key.0 => next = 0,
                    Some(p) if p != key => next += 1,
                    _ => {}
                }
                new[w] = next;
                prev = Some(key);
            }
        }
        Ok(out)
    }

    /// Conservative upgrade `↑psi`: in every cell containing a psi-world, the
    /// most plausible psi-worlds (all of them on ties) move strictly to the
    /// top; every other comparison is unchanged. Cells without psi-worlds
    /// are untouched.
    pub fn upgrade_conservative(&self, psi: &Formula) -> Result<Self> {
        let t = self.truth(psi)?;
        let mut out = self.clone();
        for agent in &self.agents {
            let cells = &self.cells[agent];
            let ranks = &self.ranks[agent];
            let mut best = vec![u32::MAX; cell_count(cells)];
            for (w, &c) in cells.iter().enumerate() {
                if t[w] {
                    best[c as usize] = best[c as usize].min(ranks[w]);
                }
            }
            let new = out.ranks.get_mut(agent).expect("agent present");
            for (w, &c) in cells.iter().enumerate() {
                let b = best[c as usize];
                if b == u32::MAX {
                    continue;
                }
                new[w] = if t[w] && ranks[w] == b { 0 } else { ranks[w] + 1 };
            }
        }
        out.normalize();
        Ok(out)
    }

    /// Awareness expansion. A fresh atom is registered and every world is
    /// split: the original keeps its id with `p` true, a copy with `p` false
    /// gets a fresh id; ranks and cell membership are duplicated. An already
    /// registered atom is only added to the listed agents' awareness.
    pub fn expand_awareness(&self, agents: &[String], atom: Atom) -> Result<Self> {
        validate_atom_id(&atom.id)?;
        for agent in agents {
            if !self.has_agent(agent) {
                return Err(EpistemicError::UnknownAgent(agent.clone()));
            }
        }
        let f = Formula::Atom(atom.id.clone());
        let mut out = self.clone();
        if self.has_atom(&atom.id) {
            if agents.iter().all(|a| self.awareness[a].contains(&f)) {
                return Err(EpistemicError::NoOpExpansion(atom.id));
            }
        } else {
            let n = self.worlds.len();
            out.index.insert(atom.id.clone(), out.registry.len());
            out.registry.push(atom);
            for w in &mut out.worlds {
                w.valuation.push(true);
            }
            for i in 0..n {
                let mut copy = out.worlds[i].clone();
                *copy.valuation.last_mut().expect("registry non-empty") = false;
                copy.id = out.next_world_id;
                out.next_world_id += 1;
                out.worlds.push(copy);
            }
            for v in out.ranks.values_mut().chain(out.cells.values_mut()) {
                v.extend_from_within(..n);
            }
        }
        for agent in agents {
            out.awareness.get_mut(agent).expect("checked").insert(f.clone());
        }
        Ok(out)
    }

    /// Densify ranks within each cell and cell ids per agent.
    fn normalize(&mut self) {
        for agent in &self.agents {
            let cells = self.cells.get_mut(agent).expect("agent present");
            let mut renumber: BTreeMap<u32, u32> = BTreeMap::new();
            for c in cells.iter_mut() {
                let next = renumber.len() as u32;
                *c = *renumber.entry(*c).or_insert(next);
            }
            let ranks = self.ranks.get_mut(agent).expect("agent present");
            let distinct: BTreeSet<(u32, u32)> = cells.iter().copied().zip(ranks.iter().copied()).collect();
            let mut dense: BTreeMap<(u32, u32), u32> = BTreeMap::new();
            let mut last_cell = None;
            let mut next = 0;
            for (c, r) in distinct {
                if last_cell != Some(c) {
                    next = 0;
                    last_cell = Some(c);
                }
                dense.insert((c, r), next);
                next += 1;
            }
            for (w, r) in ranks.iter_mut().enumerate() {
                *r = dense[&(cells[w], *r)];
            }
        }
    }

    /// Structural invariants: aligned vectors, sorted unique world ids,
    /// total valuations, dense cells/ranks. Integer ranks make every pair
    /// within a cell comparable, so local connectedness is structural.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.worlds.len();
        if self.index.len() != self.registry.len() {
            return Err("registry index out of sync".into());
        }
        if self.worlds.windows(2).any(|p| p[0].id >= p[1].id) {
            return Err("world ids must be strictly increasing".into());
        }
        if let Some(w) = self.worlds.iter().find(|w| w.valuation.len() != self.registry.len()) {
            return Err(format!("world {} valuation is not total", w.id));
        }
        if self.worlds.last().is_some_and(|w| w.id >= self.next_world_id) {
            return Err("next_world_id not fresh".into());
        }
        if n == 0 && !self.inconsistent {
            return Err("empty world set without the inconsistency flag".into());
        }
        for agent in &self.agents {
            let (Some(r), Some(c), Some(_)) =
                (self.ranks.get(agent), self.cells.get(agent), self.awareness.get(agent))
            else {
                return Err(format!("agent `{agent}` missing ranks, cells or awareness"));
            };
            if r.len() != n || c.len() != n {
                return Err(format!("agent `{agent}`: ranks/cells not aligned with worlds"));
            }
            let k = cell_count(c);
            let mut seen = vec![false; k];
            c.iter().for_each(|&x| seen[x as usize] = true);
            if seen.iter().any(|s| !s) {
                return Err(format!("agent `{agent}`: cell ids not dense"));
            }
            for cell in 0..k as u32 {
                let rs: BTreeSet<u32> = (0..n).filter(|&w| c[w] == cell).map(|w| r[w]).collect();
                if rs.iter().copied().ne(0..rs.len() as u32) {
                    return Err(format!("agent `{agent}`: ranks not dense in cell {cell}"));
                }
            }
        }
        if self.ranks.len() != self.agents.len() || self.cells.len() != self.agents.len() {
            return Err("per-agent maps name unknown agents".into());
        }
        Ok(())
    }
}

fn cell_count(cells: &[u32]) -> usize {
    cells.iter().max().map_or(0, |&m| m as usize + 1)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
