"""Higher-dimensional timed automata: models, reachability, composition."""

from .clocks import TRUE, Atom, Constraint, parse_constraint
from .compose import iso_check, tensor
from .convert import Edge, TimedAutomaton, one_dta_to_ta, ta_to_1dta, ta_zone_reach
from .errors import HdtaError, ModelError, ParseError, StructuralError
from .model import HdtaModel, check_model, validate_model
from .modelfile import load, parse_model, serialize
from .precubical import Cube, Hda, PrecubicalSet, validate_hda_labeling, validate_precubical
from .regions import region_of, region_reach
from .semantics import ConcreteState, ReachResult, bounded_search, replay
from .zonegraph import SymbolicState, zone_graph, zone_reach, zone_successors
from .zones import Zone

__version__ = "0.1.0"
