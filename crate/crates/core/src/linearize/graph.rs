//! Type hierarchy graph and the order in which abstract methods are filled.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use thiserror::Error;

use crate::program::ProgramModel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cyclic type hierarchy: {}", cycle.join(" -> "))]
pub struct CyclicHierarchy {
    /// A witness cycle; the first node is repeated at the end.
    pub cycle: Vec<String>,
}

/// Directed graph where an edge `A -> B` means A implements or extends B.
/// External types are not part of the graph.
#[derive(Debug, Clone, Default)]
pub struct TypeGraph {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    in_degree: Vec<usize>,
    /// Sources of the incoming edges of each node.
    implementers: Vec<Vec<usize>>,
}

impl TypeGraph {
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges
            .iter()
            .map(|&(a, b)| (self.nodes[a].as_str(), self.nodes[b].as_str()))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn in_degree(&self, node: &str) -> Option<usize> {
        self.index.get(node).map(|&i| self.in_degree[i])
    }

    /// Direct implementers and subtypes of `node`, in declaration order.
    pub fn direct_implementers(&self, node: &str) -> impl Iterator<Item = &str> {
        self.index
            .get(node)
            .map(|&i| self.implementers[i].as_slice())
            .unwrap_or_default()
            .iter()
            .map(|&j| self.nodes[j].as_str())
    }
}

pub fn build_type_graph(program: &ProgramModel) -> TypeGraph {
    let nodes: Vec<String> = program.classes.keys().cloned().collect();
    let index: HashMap<String, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), i))
        .collect();
    let mut edges = Vec::new();
    for (from, class) in program.classes.values().enumerate() {
        for sup in class.supertypes() {
            if let Some(&to) = index.get(sup) {
                if !edges.contains(&(from, to)) {
                    edges.push((from, to));
                }
            }
        }
    }
    let mut in_degree = vec![0; nodes.len()];
    let mut implementers = vec![Vec::new(); nodes.len()];
    for &(from, to) in &edges {
        in_degree[to] += 1;
        implementers[to].push(from);
    }
    for list in &mut implementers {
        list.sort_unstable();
    }
    TypeGraph {
        nodes,
        index,
        edges,
        in_degree,
        implementers,
    }
}

/// Topological order in which every type follows all of its direct
/// implementers. Among ready types, lower in-degree goes first, then
/// earlier declaration.
pub fn linearization_order(graph: &TypeGraph) -> Result<Vec<String>, CyclicHierarchy> {
    let n = graph.nodes.len();
    // A node is ready once all of its implementers have been placed.
    let mut waiting: Vec<usize> = graph.in_degree.clone();
    let mut supertypes: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(from, to) in &graph.edges {
        supertypes[from].push(to);
    }

    let mut ready: BinaryHeap<Reverse<(usize, usize)>> = (0..n)
        .filter(|&i| waiting[i] == 0)
        .map(|i| Reverse((graph.in_degree[i], i)))
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((_, node))) = ready.pop() {
        order.push(node);
        for &sup in &supertypes[node] {
            waiting[sup] -= 1;
            if waiting[sup] == 0 {
                ready.push(Reverse((graph.in_degree[sup], sup)));
            }
        }
    }

    if order.len() < n {
        return Err(CyclicHierarchy {
            cycle: find_cycle(graph, &waiting),
        });
    }
    Ok(order.into_iter().map(|i| graph.nodes[i].clone()).collect())
}

/// Every unplaced node still waits on some unplaced implementer, so walking
/// implementer links from any of them must revisit a node.
fn find_cycle(graph: &TypeGraph, waiting: &[usize]) -> Vec<String> {
    let start = (0..graph.nodes.len())
        .find(|&i| waiting[i] > 0)
        .expect("an unplaced node exists");
    let mut path = vec![start];
    let mut pos_in_path = HashMap::from([(start, 0usize)]);
    let mut current = start;
    loop {
        let next = graph.implementers[current]
            .iter()
            .copied()
            .find(|&j| waiting[j] > 0)
            .expect("unplaced node has an unplaced implementer");
        if let Some(&at) = pos_in_path.get(&next) {
            // path runs supertype -> implementer; report it as edges A -> B.
            let mut cycle: Vec<String> = path[at..]
                .iter()
                .rev()
                .map(|&i| graph.nodes[i].clone())
                .collect();
            cycle.push(cycle[0].clone());
            return cycle;
        }
        pos_in_path.insert(next, path.len());
        path.push(next);
        current = next;
    }
}
