from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

from skilltree import (
    CourseSpec,
    EdgeDecl,
    EdgeKind,
    NodeDecl,
    NodeKind,
    build_graph,
    load_file,
)

sys.path.insert(0, str(Path(__file__).parent))

DEMOS = Path(__file__).resolve().parents[1] / "demos"

KIND_FOR = {
    (NodeKind.SKILL, NodeKind.SKILL): EdgeKind.SUBSKILL,
    (NodeKind.CONCEPT, NodeKind.CONCEPT): EdgeKind.SUBCONCEPT,
    (NodeKind.SKILL, NodeKind.CONCEPT): EdgeKind.CONCEPT_REQUIREMENT,
}


def skills(spec: str) -> list[NodeDecl]:
    return [NodeDecl(x, NodeKind.SKILL, x) for x in spec.split()]


def concepts(spec: str) -> list[NodeDecl]:
    return [NodeDecl(x, NodeKind.CONCEPT, x) for x in spec.split()]


def edges(kinds: dict[str, NodeKind], spec: str) -> list[EdgeDecl]:
    """``"A>B C>D"`` means A requires B, C requires D; the edge kind follows the node kinds."""
    out = []
    for pair in spec.split():
        d, p = pair.split(">")
        out.append(EdgeDecl(d, p, KIND_FOR[(kinds[d], kinds[p])]))
    return out


def make_graph(node_decls, edge_spec="", exercises=()):
    kinds = {n.id: n.kind for n in node_decls}
    return build_graph(node_decls, edges(kinds, edge_spec), exercises)


def random_dag(rng: random.Random, n: int, p: float = 0.3, skill_share: float = 0.6):
    """Random curriculum DAG: edges only go from later to earlier ranks, kinds permitting.

    Declaration order is a shuffle of the rank order so declaration position
    carries no topological information.
    """
    ranks = [f"n{i}" for i in range(n)]
    kinds = {x: NodeKind.SKILL if rng.random() < skill_share else NodeKind.CONCEPT for x in ranks}
    edge_decls = []
    for i in range(n):
        for j in range(i):
            pair = (kinds[ranks[i]], kinds[ranks[j]])
            if pair in KIND_FOR and rng.random() < p:
                edge_decls.append(EdgeDecl(ranks[i], ranks[j], KIND_FOR[pair]))
    order = ranks[:]
    rng.shuffle(order)
    return build_graph([NodeDecl(x, kinds[x], x.upper()) for x in order], edge_decls)


def random_course(rng: random.Random, graph, name="c"):
    """Course with 1-3 skill goals and prerequisites that need none of the goals."""
    from oracles import bfs_closure

    skill_ids = [x for x in graph.order if graph.nodes[x].is_skill]
    if not skill_ids:
        return None
    pairs = [(e.dependent, e.prerequisite) for e in graph.edges]
    goals = rng.sample(skill_ids, rng.randint(1, min(3, len(skill_ids))))
    # a goal must not be required by a prerequisite, or it would drop out of the contents
    candidates = [x for x in graph.order if x not in goals]
    prereqs = []
    for x in rng.sample(candidates, min(len(candidates), rng.randint(0, 2))):
        if not set(goals) & ({x} | bfs_closure(pairs, [x])):
            prereqs.append(x)
    return CourseSpec(name, tuple(goals), frozenset(prereqs))


@st.composite
def dags(draw, max_nodes: int = 10):
    n = draw(st.integers(min_value=0, max_value=max_nodes))
    kinds = [draw(st.sampled_from([NodeKind.SKILL, NodeKind.CONCEPT])) for _ in range(n)]
    ids = [f"n{i}" for i in range(n)]
    edge_decls = []
    for i in range(n):
        for j in range(i):
            pair = (kinds[i], kinds[j])
            if pair in KIND_FOR and draw(st.booleans()):
                edge_decls.append(EdgeDecl(ids[i], ids[j], KIND_FOR[pair]))
    order = draw(st.permutations(ids)) if ids else []
    kind_of = dict(zip(ids, kinds))
    return build_graph([NodeDecl(x, kind_of[x], x) for x in order], edge_decls)


def edge_pairs(graph):
    return [(e.dependent, e.prerequisite) for e in graph.edges]


@pytest.fixture
def two_level_graph():
    nodes = skills("A B C D E F G")
    return make_graph(nodes, "A>B A>C B>D B>E C>F C>G")


@pytest.fixture
def two_level_course():
    return CourseSpec("main", ("A",))


@pytest.fixture
def four_blocks_graph():
    return make_graph(skills("A B C D E F G H I J"), "C>A C>B E>D H>F H>G H>B J>I J>H J>E")


@pytest.fixture
def four_blocks_course():
    return CourseSpec("main", ("C", "E", "H", "J"), declared_block_goals=("C", "E", "H", "J"))


@pytest.fixture
def algebra_doc():
    return load_file(DEMOS / "linear_equation.ctdl")
