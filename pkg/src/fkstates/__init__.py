"""Stationary (p,q)-configurations of generalized Frenkel-Kontorova models."""
from .action import action_eval, eigen_sym, gradient, hessian, morse_index
from .configspace import (Configuration, OrderRelation, aubry_value, canonicalize, compare,
                          config, extend, is_cyclically_ordered, region_test, same_class,
                          translate)
from .flow import FlowPath, FlowStatus, StepControl, evolve, monotone_check, trace_unstable
from .model import (GeneratingModel, PotentialSpec, example4, h_partial, potential_eval,
                    preset, standard, threeharmonic)
from .stationary import (AuditReport, ExtremalClass, Location, MinimizerContext,
                         StationaryRecord, analyze, audit_propositions, classify,
                         enumerate_states, locate, make_record, refine)
from .twistmap import (Orbit, SymmetryLine, apply, find_symmetric_orbit, is_pq_periodic,
                       orbit_from_config, residue, rimmer_scan, shares_minimizer_line)

__version__ = "0.1.0"
