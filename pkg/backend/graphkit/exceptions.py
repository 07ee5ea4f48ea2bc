"""Graph algorithm errors."""


class GraphKitError(Exception):
    """Base class for graph-kit errors"""
    pass


class EmptyGraph(GraphKitError):
    """Raised when an operation needs at least one vertex"""

    def __init__(self, operation: str):
        self.operation = operation
        super().__init__(f'{operation} is undefined on a graph without vertices')


class VertexNotInGraph(GraphKitError):
    """Raised when a vertex argument is not part of the graph"""

    def __init__(self, vertex):
        self.vertex = vertex
        super().__init__(f'Vertex {vertex} is not in the graph')


class DanglingEdge(GraphKitError):
    """Raised when an edge endpoint is not a vertex"""

    def __init__(self, edge):
        self.edge = tuple(edge)
        super().__init__(f'Edge {self.edge[0]}->{self.edge[1]} has an endpoint outside the vertex set')
