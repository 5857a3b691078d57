//! Weighted interaction memory: the arena of known interactions, the learned
//! composite set and the current context.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::enactive::interaction::{Interaction, InteractionId, InteractionTree, Primitive};
use crate::enactive::motivation::MotivationModel;
use crate::error::MemoryError;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
struct Node {
    interaction: Interaction,
    len: usize,
    /// Occurrences of each primitive among the leaves.
    counts: [u32; 4],
}

/// Known interactions `J = I ∪ K`, composite weights, and the context `C`.
#[derive(Debug, Clone)]
pub struct InteractionMemory {
    nodes: Vec<Node>,
    by_pair: HashMap<(InteractionId, InteractionId), InteractionId>,
    /// Enaction count per composite in `K`; absent means not learned.
    weights: BTreeMap<InteractionId, u64>,
    /// Learned composites grouped by their pre-interaction.
    by_pre: BTreeMap<InteractionId, BTreeSet<InteractionId>>,
    sibling_weight: HashMap<InteractionId, u64>,
    context: BTreeSet<InteractionId>,
    depth_limit: usize,
}

impl InteractionMemory {
    pub fn new(depth_limit: usize) -> Self {
        let nodes = Primitive::ALL
            .iter()
            .map(|p| {
                let mut counts = [0; 4];
                counts[p.index()] = 1;
                Node { interaction: Interaction::Primitive(*p), len: 1, counts }
            })
            .collect();
        Self {
            nodes,
            by_pair: HashMap::new(),
            weights: BTreeMap::new(),
            by_pre: BTreeMap::new(),
            sibling_weight: HashMap::new(),
            context: BTreeSet::new(),
            depth_limit,
        }
    }

    pub fn depth_limit(&self) -> usize {
        self.depth_limit
    }

    pub fn get(&self, id: InteractionId) -> Interaction {
        self.nodes[id.index()].interaction
    }

    pub fn len_of(&self, id: InteractionId) -> usize {
        self.nodes[id.index()].len
    }

    pub fn counts(&self, id: InteractionId) -> &[u32; 4] {
        &self.nodes[id.index()].counts
    }

    pub fn is_primitive(&self, id: InteractionId) -> bool {
        matches!(self.get(id), Interaction::Primitive(_))
    }

    pub fn pre(&self, id: InteractionId) -> Option<InteractionId> {
        match self.get(id) {
            Interaction::Composite { pre, .. } => Some(pre),
            Interaction::Primitive(_) => None,
        }
    }

    pub fn post(&self, id: InteractionId) -> Option<InteractionId> {
        match self.get(id) {
            Interaction::Composite { post, .. } => Some(post),
            Interaction::Primitive(_) => None,
        }
    }

    /// Returns the arena id of ⟨pre, post⟩, creating the node if needed.
    /// Creating a node does not make it known; see [`Self::reinforce`].
    pub fn intern(&mut self, pre: InteractionId, post: InteractionId) -> InteractionId {
        if let Some(id) = self.by_pair.get(&(pre, post)) {
            return *id;
        }
        let (a, b) = (&self.nodes[pre.index()], &self.nodes[post.index()]);
        let mut counts = a.counts;
        for (c, n) in counts.iter_mut().zip(b.counts) {
            *c += n;
        }
        let node = Node { interaction: Interaction::Composite { pre, post }, len: a.len + b.len, counts };
        let id = InteractionId(self.nodes.len() as u32);
        self.nodes.push(node);
        self.by_pair.insert((pre, post), id);
        id
    }

    /// Interns a whole tree bottom-up.
    pub fn intern_tree(&mut self, tree: &InteractionTree) -> InteractionId {
        match tree {
            InteractionTree::Primitive(p) => p.id(),
            InteractionTree::Composite(a, b) => {
                let pre = self.intern_tree(a);
                let post = self.intern_tree(b);
                self.intern(pre, post)
            }
        }
    }

    pub fn tree(&self, id: InteractionId) -> InteractionTree {
        match self.get(id) {
            Interaction::Primitive(p) => InteractionTree::Primitive(p),
            Interaction::Composite { pre, post } => InteractionTree::pair(self.tree(pre), self.tree(post)),
        }
    }

    /// Primitive leaves, left to right.
    pub fn leaves(&self, id: InteractionId) -> Vec<Primitive> {
        let mut out = Vec::with_capacity(self.len_of(id));
        let mut stack = vec![id];
        while let Some(i) = stack.pop() {
            match self.get(i) {
                Interaction::Primitive(p) => out.push(p),
                Interaction::Composite { pre, post } => {
                    stack.push(post);
                    stack.push(pre);
                }
            }
        }
        out
    }

    /// Left-fold ⟨⟨⟨p0, p1⟩, p2⟩, …⟩ of a non-empty primitive sequence.
    pub fn left_fold(&mut self, prims: &[Primitive]) -> Option<InteractionId> {
        let (first, rest) = prims.split_first()?;
        Some(rest.iter().fold(first.id(), |acc, p| self.intern(acc, p.id())))
    }

    /// Structural total order: primitives before composites, primitives by
    /// experiment then result, composites by pre then post.
    pub fn cmp_structure(&self, a: InteractionId, b: InteractionId) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        match (self.get(a), self.get(b)) {
            (Interaction::Primitive(x), Interaction::Primitive(y)) => x.cmp(&y),
            (Interaction::Primitive(_), Interaction::Composite { .. }) => Ordering::Less,
            (Interaction::Composite { .. }, Interaction::Primitive(_)) => Ordering::Greater,
            (Interaction::Composite { pre: pa, post: qa }, Interaction::Composite { pre: pb, post: qb }) => {
                self.cmp_structure(pa, pb).then_with(|| self.cmp_structure(qa, qb))
            }
        }
    }

    pub fn weight(&self, id: InteractionId) -> Option<u64> {
        self.weights.get(&id).copied()
    }

    /// Membership in `K`.
    pub fn is_learned(&self, id: InteractionId) -> bool {
        self.weights.contains_key(&id)
    }

    /// Membership in `J = I ∪ K`.
    pub fn is_known(&self, id: InteractionId) -> bool {
        self.is_primitive(id) || self.is_learned(id)
    }

    /// Learned composites `K` in id order.
    pub fn learned(&self) -> impl Iterator<Item = (InteractionId, u64)> + '_ {
        self.weights.iter().map(|(k, w)| (*k, *w))
    }

    pub fn learned_count(&self) -> usize {
        self.weights.len()
    }

    /// Known interactions `J` in id order.
    pub fn known(&self) -> impl Iterator<Item = InteractionId> + '_ {
        (0..4u32).map(InteractionId).chain(self.weights.keys().copied())
    }

    /// Adds `id` to `K` with weight 1, or bumps its weight.
    pub fn reinforce(&mut self, id: InteractionId) -> u64 {
        let pre = self.pre(id).expect("only composites are learned");
        let w = self.weights.entry(id).or_insert(0);
        *w += 1;
        let w = *w;
        self.by_pre.entry(pre).or_default().insert(id);
        *self.sibling_weight.entry(pre).or_insert(0) += 1;
        w
    }

    /// Ensures a composite and all of its composite parts are in `K`
    /// without changing the weight of anything already there.
    pub fn ensure_known(&mut self, id: InteractionId) {
        if let Interaction::Composite { pre, post } = self.get(id) {
            self.ensure_known(pre);
            self.ensure_known(post);
            if !self.is_learned(id) {
                self.reinforce(id);
            }
        }
    }

    pub fn context(&self) -> &BTreeSet<InteractionId> {
        &self.context
    }

    pub fn set_context(&mut self, context: BTreeSet<InteractionId>) {
        self.context = context;
    }

    /// Relative weight of `id` among learned composites sharing its
    /// pre-interaction; 1 for primitives.
    pub fn occurrence_probability<T: Scalar>(&self, id: InteractionId) -> Result<T, MemoryError> {
        if id.index() >= self.nodes.len() {
            return Err(MemoryError::UnknownInteraction(id.index()));
        }
        match self.get(id) {
            Interaction::Primitive(_) => Ok(T::one()),
            Interaction::Composite { pre, .. } => {
                let w = self.weight(id).ok_or(MemoryError::UnknownInteraction(id.index()))?;
                let total = self.sibling_weight[&pre];
                Ok(T::from_u64(w).unwrap() / T::from_u64(total).unwrap())
            }
        }
    }

    pub fn valence<T: Scalar>(&self, id: InteractionId, m: &MotivationModel<T>) -> T {
        m.of_counts(self.counts(id))
    }

    /// `valence · probability`.
    pub fn proclivity<T: Scalar>(&self, id: InteractionId, m: &MotivationModel<T>) -> Result<T, MemoryError> {
        Ok(self.valence(id, m) * self.occurrence_probability(id)?)
    }

    /// Share of the activated weight that proposes `id`: the summed weight of
    /// the members of `activated` whose post-interaction is `id`, over the
    /// summed weight of all of `activated`. Zero when nothing proposes it.
    pub fn proposal_probability<T: Scalar>(&self, id: InteractionId, activated: &BTreeSet<InteractionId>) -> T {
        let (mut hit, mut total) = (0u64, 0u64);
        for a in activated {
            let w = self.weight(*a).unwrap_or(0);
            total += w;
            if self.post(*a) == Some(id) {
                hit += w;
            }
        }
        if total == 0 {
            return T::zero();
        }
        T::from_u64(hit).unwrap() / T::from_u64(total).unwrap()
    }

    /// Activation: learned composites whose pre-interaction is in the context.
    pub fn activate(&self) -> BTreeSet<InteractionId> {
        self.context
            .iter()
            .filter_map(|c| self.by_pre.get(c))
            .flat_map(|set| set.iter().copied())
            .collect()
    }

    /// Proposition: post-interactions of the activated composites.
    pub fn propose(&self, activated: &BTreeSet<InteractionId>) -> BTreeSet<InteractionId> {
        activated.iter().filter_map(|a| self.post(*a)).collect()
    }

    /// Learning: builds or reinforces ⟨c, enacted⟩ for every `c` in the
    /// context, skipping pairs longer than the depth limit. Returns `L`.
    pub fn learn(&mut self, enacted: InteractionId) -> BTreeSet<InteractionId> {
        let enacted_len = self.len_of(enacted);
        let context: Vec<InteractionId> = self.context.iter().copied().collect();
        let mut learned = BTreeSet::new();
        for c in context {
            if self.len_of(c) + enacted_len > self.depth_limit {
                continue;
            }
            let id = self.intern(c, enacted);
            self.reinforce(id);
            learned.insert(id);
        }
        learned
    }

    /// Learns the last two enactions as one sequence: for every `c` in
    /// `previous_context`, reinforces `<c, <previous, enacted>>` when it fits
    /// the depth limit. This is what lets composites appear as
    /// post-interactions and so be proposed later.
    pub fn learn_sequence(
        &mut self,
        previous_context: &BTreeSet<InteractionId>,
        previous: InteractionId,
        enacted: InteractionId,
    ) -> BTreeSet<InteractionId> {
        let mut learned = BTreeSet::new();
        let seq_len = self.len_of(previous) + self.len_of(enacted);
        if seq_len > self.depth_limit {
            return learned;
        }
        let seq = self.intern(previous, enacted);
        self.ensure_known(seq);
        for c in previous_context.iter().copied() {
            if self.len_of(c) + seq_len > self.depth_limit {
                continue;
            }
            let id = self.intern(c, seq);
            self.reinforce(id);
            learned.insert(id);
        }
        learned
    }

    /// Next context: stabilized members of `L` (weight at least `threshold`),
    /// the enacted interaction, and its post-interaction if composite.
    pub fn build_context(
        &self,
        enacted: InteractionId,
        learned: &BTreeSet<InteractionId>,
        threshold: u64,
    ) -> BTreeSet<InteractionId> {
        let mut next: BTreeSet<InteractionId> = learned
            .iter()
            .copied()
            .filter(|l| self.weight(*l).is_some_and(|w| w >= threshold))
            .collect();
        next.insert(enacted);
        if let Some(post) = self.post(enacted) {
            next.insert(post);
        }
        next
    }

    /// One line per learned composite, `<s-expr> w=<weight>`, in structural order.
    pub fn dump(&self) -> String {
        let mut ids: Vec<InteractionId> = self.weights.keys().copied().collect();
        ids.sort_by(|a, b| self.cmp_structure(*a, *b));
        let mut out = String::new();
        for id in ids {
            let _ = writeln!(out, "{} w={}", self.tree(id), self.weights[&id]);
        }
        out
    }

    /// Rebuilds a memory from [`Self::dump`] output. Context starts empty.
    pub fn from_dump(text: &str, depth_limit: usize) -> Option<Self> {
        let mut mem = Self::new(depth_limit);
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (expr, w) = line.rsplit_once(" w=")?;
            let tree = InteractionTree::parse(expr)?;
            let weight: u64 = w.trim().parse().ok()?;
            let id = mem.intern_tree(&tree);
            mem.pre(id)?;
            for _ in 0..weight {
                mem.reinforce(id);
            }
        }
        Some(mem)
    }

    /// Checks depth bound, closure and weight positivity. Returns a
    /// description of the first violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (id, w) in self.learned() {
            if w == 0 {
                return Err(format!("{id} has zero weight"));
            }
            if self.len_of(id) > self.depth_limit {
                return Err(format!("{} exceeds depth {}", self.tree(id), self.depth_limit));
            }
            let (pre, post) = (self.pre(id).unwrap(), self.post(id).unwrap());
            if !self.is_known(pre) || !self.is_known(post) {
                return Err(format!("{} has an unknown part", self.tree(id)));
            }
        }
        for c in &self.context {
            if !self.is_known(*c) {
                return Err(format!("context member {} is unknown", self.tree(*c)));
            }
        }
        Ok(())
    }
}
