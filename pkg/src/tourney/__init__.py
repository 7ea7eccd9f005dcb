"""Finding the cyclic three-class tournament D_k in tournaments far from transitive."""

from .core import (
    DkEmbedding,
    FormatError,
    GeneratorSpec,
    InvalidParameter,
    SizeLimitError,
    Tournament,
    brute_force_contains_dk,
    check_dk_embedding,
    gen_cyclic_blowup,
    gen_dk,
    gen_eps_random,
    gen_planted_long,
    gen_transitive,
    parse_tournament,
    random_tournament,
    read_tournament,
    serialize_tournament,
    write_tournament,
)
from .embed import PipelineConfig, find_dk, search_dk, trace_violations
from .ordering import analyze_ordering, check_prop21, exact_min_backward, local_search_ordering, long_or_boost
from .triads import count_directed_triangles, extract_triangle_rich, measure_triangle_constant

__version__ = "0.1.0"
