"""Analysis of unions of conjunctive queries: CQ expansion, counting engines,
structural measures and the simplicial-complex reduction."""

from .acyclicity import is_acyclic, join_forest
from .analysis import (CqReport, classify_cq, contract, counting_core,
                       degree_of_freedom, is_counting_minimal)
from .canonical import canonical_form, ucq_canonical_form
from .counting import (AnswerCount, Method, count_cq, count_cq_acyclic,
                       count_cq_backtracking, count_cq_bruteforce,
                       count_ucq_bruteforce, count_ucq_direct, count_ucq_expansion)
from .errors import CapExceeded, ParseError, PreconditionError, SignatureError, UcqError
from .expansion import (ExpansionTable, MetaVerdict, Mode, coefficient, combined_query,
                        cq_expansion, hereditary_treewidth, meta_decide, wl_dimension)
from .formats import (parse_complex, parse_database, parse_query, serialize_complex,
                      serialize_database, serialize_query)
from .homomorphisms import enumerate_homomorphisms, exists_homomorphism
from .simplicial import (Complex, build_stretched_clique, dominates, power_complex,
                         reduce_complex_to_ucq, reduce_to_irreducible,
                         reduced_euler_characteristic)
from .structures import (ConjunctiveQuery, GaifmanGraph, Signature, Structure, Ucq,
                         gaifman_graph, induced_substructure, tensor_product, union_structures)
from .treewidth import TreeDecomposition, treewidth_bounds, treewidth_exact
from .verification import verify_reduction

__version__ = "0.1.0"
