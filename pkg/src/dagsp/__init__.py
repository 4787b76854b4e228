"""Causal Fourier analysis for signals on edge-weighted DAGs."""

from .baselines import SymmetricEigenbasis, jacobi_eigh, symmetric_eigenbasis, undirected_matrices
from .closure import (
    ClosureOperator,
    closure_operator,
    distance_to_influence,
    pollution_closure_closed_form,
    reflexive_closure,
    weighted_transitive_closure,
)
from .dag import WeightedDag, build_dag, erdos_renyi_dag, poset_view, transitive_reduction
from .dynnet import DynamicNetwork, SirConfig, ingest_contacts, sir_simulate, synth_contacts, unroll
from .learn import FourierLasso, FourierLogisticRegression, relative_error, roc_auc
from .sem import SemSignalConfig, generate_sem_signal, sem_from_closure
from .semiring import Semiring, get_semiring
from .spectral import (
    CausalFourierTransform,
    FourierOperator,
    apply_filter,
    fourier_transform,
    frequency_order,
    frequency_response,
    inverse_fourier_transform,
    moebius_matrix,
    shift_matrix,
    total_variation,
)

__version__ = "0.1.0"
