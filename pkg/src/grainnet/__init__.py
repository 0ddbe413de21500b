"""grainnet: Petri net processes with individual tokens, their unfoldings,
and the simplicial groupoid of processes."""
from .errors import DiagnosticError, GrainnetError, ParseError, PreconditionError, StructuralError
from .finset import FinMap, FinSet, coproduct, pullback, pushout_inj
from .groupoid import (FinGroupoid, Groupoid, GroupoidFunctor, HomotopyPullback, Verdict, homotopy_pullback,
                       is_equivalence, is_fibration)
from .net import (AinoaGraph, EtaleMap, LevelFunction, Marking, SitosNet, boundaries, cut_decompose, glue,
                  is_etale, layer_window, residue)
from .process import (CanonicalCode, FiringBinding, Process, canonical_code, compose_processes, enabled_firings,
                      enumerate_B_processes, fire, iso_processes, minimal_firing, numbered_code, process_of_sequence)
from .hypergraph import BHypergraph, Hypergraph, classify, colimit_injective, lowersets_of, principal_lowerset
from .unfolding import (Unfolding, check_universal, colimit_unfold, domain_elements, event_structure,
                        iso_over_net_and_B, unfold)
from .segal import (build_truncation, check_rezk, check_segal, check_simplicial_identities, hom_C, lift_d0,
                    map_groupoid)
from .species import free_prop_ops, is_flat, net_isomorphism, net_of_species, species_of_net
from .morphisms import (CablingMap, RationalMap, cabling_from_place_map, compose_rational, is_cabling,
                        transport_process)
from .dot import export_dot
from .io import parse_net_file, serialize_net

__version__ = "0.1.0"
