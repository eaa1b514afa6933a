"""Effect trees, their evaluation algebras and the relations between them."""
from .dyadic import Dyadic
from .effects import EFFECT_NAMES, get_effect, instantiate_axiom
from .involution import check_involution_preservation, negate
from .modalities import Modality, OpenPredicate, enumerate_modalities, eval_modality, modal_leq
from .proofs import Derivation, check_derivation
from .quotient import alpha_quotient, build_quotient
from .relations import (Decision, batch_leq_profiles, check_equiv, check_leq,
                        check_single_valued_instance, distinguish)
from .relator import RelatorQuery, check_relator_laws, relator_lift
from .rewriting import check_complementation
from .semantics import check_em_laws, eval_bounds, eval_exact
from .syntax import parse_tree, print_tree
from .trees import RegularTree, flatten, map_tree, substitute, tree_leq, truncate

__version__ = "0.1.0"

__all__ = [
    'Decision', 'Derivation', 'Dyadic', 'EFFECT_NAMES', 'Modality', 'OpenPredicate',
    'RegularTree', 'RelatorQuery', 'alpha_quotient', 'batch_leq_profiles',
    'build_quotient', 'check_complementation', 'check_derivation', 'check_em_laws',
    'check_equiv', 'check_involution_preservation', 'check_leq', 'check_relator_laws',
    'check_single_valued_instance', 'distinguish', 'enumerate_modalities',
    'eval_bounds', 'eval_exact', 'eval_modality', 'flatten', 'get_effect',
    'instantiate_axiom', 'map_tree', 'modal_leq', 'negate', 'parse_tree', 'print_tree',
    'relator_lift', 'substitute', 'tree_leq', 'truncate',
]
