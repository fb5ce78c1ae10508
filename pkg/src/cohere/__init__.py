"""Coherent configurations: construction, validation, refinement, and
structural analysis of the colorings behind highly regular graphs."""

from .core import (
    CcmFormatError,
    CoherenceError,
    CoherenceWitness,
    ColorMatrix,
    Configuration,
    ConstituentDigraph,
    PrimitivityResult,
    StructureConstants,
    ValidationResult,
    Violation,
    canonical_color_order,
    canonicalize,
    compute_structure_constants,
    configuration,
    constituent_digraph,
    dumps_ccm,
    is_homogeneous,
    is_primitive,
    load_ccm,
    loads_ccm,
    save_ccm,
    validate_configuration,
)
from .generators import (
    GraphInput,
    PermutationList,
    complement_configuration,
    from_graph,
    hamming,
    johnson,
    lattice,
    orbital_configuration,
    parse_edge_list,
    parse_permutations,
    random_graph,
    triangular,
)
from .refinement import (
    BaseBound,
    RefinementTrace,
    VertexColoring,
    base_size_bound,
    completely_splits,
    individualize,
    initial_coloring,
    naive_refine,
    refine_with_individualization,
    wl_refine,
)
from .analysis import (
    CheckItem,
    CheckReport,
    DominantView,
    ParameterProfile,
    SphereTable,
    check_diameter_lemma,
    check_growth_of_spheres,
    check_identities,
    distance_by_color,
    distinguishing_number,
    dominant_view,
    profile,
    spheres,
)
from .cliques import (
    CliqueGeometry,
    GeometryFailure,
    GeometryResult,
    GoodTripleQuery,
    LocalPartition,
    MetschResult,
    NondominantGraph,
    TwoCliqueReport,
    assemble_geometry,
    count_good_triples,
    local_clique_partition,
    metsch_partition,
    nondominant_graph,
    strong_partition_check,
    two_clique_characterization,
)
from .splitter import (
    ExceptionalReport,
    SplitReport,
    auto_split,
    recognize_exceptional,
    split_by_distinguishing,
    split_by_good_triples,
    split_two_clique,
)

__version__ = "0.1.0"
