use std::collections::HashMap;

use thiserror::Error;

use super::rule::RuleId;
use super::term::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub term: Term,
    pub axiom: bool,
}

/// One rule application: `premises --rule--> conclusion`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub premises: Vec<usize>,
    pub rule: RuleId,
    pub conclusion: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("node {0} does not exist")]
    UnknownNode(usize),
    #[error("edge into node {conclusion} from node {premise} would not respect derivation order")]
    OutOfOrder { premise: usize, conclusion: usize },
}

/// Provenance DAG over derived terms.
///
/// Node ids coincide with working-memory insertion indices. Every edge runs
/// from lower to higher ids, which keeps the graph acyclic by construction.
#[derive(Clone, Debug, Default)]
pub struct DerivationLattice {
    nodes: Vec<Node>,
    edges: Vec<Derivation>,
    incoming: Vec<Vec<usize>>,
    by_term: HashMap<Term, usize>,
}

impl DerivationLattice {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, term: Term, axiom: bool) -> usize {
        if let Some(&i) = self.by_term.get(&term) {
            return i;
        }
        let i = self.nodes.len();
        self.by_term.insert(term.clone(), i);
        self.nodes.push(Node { term, axiom });
        self.incoming.push(Vec::new());
        i
    }

    pub fn add_axiom(&mut self, term: Term) -> usize {
        self.push(term, true)
    }

    pub fn add_derived(&mut self, term: Term) -> usize {
        self.push(term, false)
    }

    pub fn add_edge(&mut self, premises: Vec<usize>, rule: RuleId, conclusion: usize) -> Result<usize, LatticeError> {
        if conclusion >= self.nodes.len() {
            return Err(LatticeError::UnknownNode(conclusion));
        }
        for &p in &premises {
            if p >= conclusion {
                return Err(LatticeError::OutOfOrder { premise: p, conclusion });
            }
        }
        if let Some(&existing) = self.incoming[conclusion]
            .iter()
            .find(|&&e| self.edges[e].premises == premises && self.edges[e].rule == rule)
        {
            return Ok(existing);
        }
        let id = self.edges.len();
        self.edges.push(Derivation { premises, rule, conclusion });
        self.incoming[conclusion].push(id);
        Ok(id)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn edges(&self) -> &[Derivation] {
        &self.edges
    }

    pub fn incoming(&self, node: usize) -> impl Iterator<Item = &Derivation> {
        self.incoming.get(node).into_iter().flatten().map(|&e| &self.edges[e])
    }

    pub fn find(&self, term: &Term) -> Option<usize> {
        self.by_term.get(term).copied()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Kahn's algorithm over the premise→conclusion relation. `None` if a
    /// cycle exists.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.nodes.len();
        let mut indegree = vec![0usize; n];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &self.edges {
            for &p in &e.premises {
                out[p].push(e.conclusion);
                indegree[e.conclusion] += 1;
            }
        }
        let mut queue: std::collections::VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            for &j in &out[i] {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    queue.push_back(j);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Structural well-formedness: acyclic, and every derived node has at
    /// least one incoming edge.
    pub fn check(&self) -> Result<(), String> {
        if self.topological_order().is_none() {
            return Err("derivation graph has a cycle".into());
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if !n.axiom && self.incoming[i].is_empty() {
                return Err(format!("derived node {i} ({}) has no incoming derivation", n.term));
            }
        }
        Ok(())
    }
}
