"""
DOT export for skeletons and approximation graphs.

Vertices are named by process index and labelled p<i>; approximation graph
edges carry their round label. Self-loops are left out unless asked for.
Output ordering is fixed (sorted vertices, sorted edges).
"""
from typing import Iterable, Mapping, Optional, Tuple

from django.conf import settings
from graphviz import Digraph as DotGraph

from .digraph import Digraph, Vertex


def render_dot(
    vertices: Iterable[Vertex],
    edges: Iterable[Tuple[Vertex, Vertex]],
    labels: Optional[Mapping[Tuple[Vertex, Vertex], int]] = None,
    include_self_loops: Optional[bool] = None,
    name: str = 'G',
) -> str:
    if include_self_loops is None:
        include_self_loops = getattr(settings, 'KSET_DOT_INCLUDE_SELF_LOOPS', False)

    dot = DotGraph(name=name, graph_attr={'rankdir': 'LR'}, node_attr={'shape': 'circle'})
    for v in sorted(vertices):
        dot.node(str(v), label=f'p{v}')
    for u, v in sorted(edges):
        if u == v and not include_self_loops:
            continue
        if labels is not None:
            dot.edge(str(u), str(v), label=str(labels[(u, v)]))
        else:
            dot.edge(str(u), str(v))
    return dot.source


def digraph_to_dot(g: Digraph, include_self_loops: Optional[bool] = None, name: str = 'G') -> str:
    return render_dot(g.vertices, g.edges, include_self_loops=include_self_loops, name=name)
