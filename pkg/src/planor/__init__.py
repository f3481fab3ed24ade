"""planor: a (1+eps)-approximate distance oracle for undirected
edge-weighted planar graphs, with an exact baseline and a verification
harness at desk scale."""

from .errors import (
    DisconnectedGraph,
    EmptyCandidateSet,
    FormatError,
    NoSeparatorFound,
    NotAncestor,
    NotInRegion,
    NotPlanarEmbedding,
    PlanorError,
    UnknownVertex,
    UnreachableVertex,
)
from .graph_core import (
    INFINITE,
    PSEUDO,
    REAL,
    EmbeddedPlanarGraph,
    FaceList,
    VertexMap,
    contract_degree_two,
    read_graph_text,
    split_to_degree_three,
    triangulate,
    validate_embedding,
    write_graph_text,
)

__all__ = [
    "INFINITE",
    "REAL",
    "PSEUDO",
    "EmbeddedPlanarGraph",
    "FaceList",
    "VertexMap",
    "contract_degree_two",
    "read_graph_text",
    "split_to_degree_three",
    "triangulate",
    "validate_embedding",
    "write_graph_text",
    "PlanorError",
    "NotPlanarEmbedding",
    "DisconnectedGraph",
    "UnreachableVertex",
    "NoSeparatorFound",
    "NotAncestor",
    "EmptyCandidateSet",
    "NotInRegion",
    "UnknownVertex",
    "FormatError",
]

__version__ = "0.1.0"
