"""Pulse-sequence engineering for spin-ensemble magnetometry.

Layers, bottom up: `algebra` (spin operators, traceless basis, projections),
`groups` (pulse words, dictionary pruning), `model` (ensemble Hamiltonians
and coupling statistics), `avgham` (average-Hamiltonian verification),
`milp` (branch-and-bound integer solver), `search` (constrained sequence
search), `sequences` (named registry + JSON I/O), `sim` (Ramsey traces and
spectra), `cli` (command line).
"""

from .algebra import (GELL_MANN, TRACE_NORM, dagger, pauli_basis, project,
                      reconstruct, spin_operators, tensor)
from .avgham import (AverageHamiltonianReport, Frame, PulseSequence,
                     first_order, frames_to_pulses, toggled_hamiltonians,
                     verify, zeeman_strength, zeroth_order)
from .groups import (DictionaryEntry, PrunedDictionary, evaluate_word, prune,
                     qubit_cliffords, qutrit_words, word)
from .milp import LinearProgram, Solution, solve_lp, solve_mip
from .model import (CouplingDistribution, EnsembleModel, build_dipolar,
                    build_hamiltonian, build_zeeman, coupling_cdf,
                    pair_model, sample_coupling)
from .search import (SearchProblem, SearchResult, assemble, build_dictionary,
                     decode_weights, recover_clean_zeeman, run_search)
from .sequences import (NamedSequence, from_file, load, names,
                        sequence_from_json, sequence_to_json, to_file)
from .sim import (SimConfig, Trace, cycle_unitary, default_tau, ramsey,
                  spectrum, tail_envelope, trace_from_csv, trace_to_csv)

__version__ = "0.1.0"

__all__ = [
    "GELL_MANN", "TRACE_NORM", "dagger", "pauli_basis", "project",
    "reconstruct", "spin_operators", "tensor",
    "AverageHamiltonianReport", "Frame", "PulseSequence", "first_order",
    "frames_to_pulses", "toggled_hamiltonians", "verify", "zeeman_strength",
    "zeroth_order",
    "DictionaryEntry", "PrunedDictionary", "evaluate_word", "prune",
    "qubit_cliffords", "qutrit_words", "word",
    "LinearProgram", "Solution", "solve_lp", "solve_mip",
    "CouplingDistribution", "EnsembleModel", "build_dipolar",
    "build_hamiltonian", "build_zeeman", "coupling_cdf", "pair_model",
    "sample_coupling",
    "SearchProblem", "SearchResult", "assemble", "build_dictionary",
    "decode_weights", "recover_clean_zeeman", "run_search",
    "NamedSequence", "from_file", "load", "names", "sequence_from_json",
    "sequence_to_json", "to_file",
    "SimConfig", "Trace", "cycle_unitary", "default_tau", "ramsey",
    "spectrum", "tail_envelope", "trace_from_csv", "trace_to_csv",
    "__version__",
]
