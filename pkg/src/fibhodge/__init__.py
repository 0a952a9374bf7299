"""L^2 harmonic forms on manifolds with fibred ends via extended intersection cohomology."""

from .exactlin import InertiaTriple, RatMatrix, inertia, kernel_dim, rank, signature
from .hodge import HodgeTable, PairingInput, hodge_dims, l2_signature, tau_invariant, weight_to_perversity
from .intersection import IHQuery, IHTable, LerayData, duality_defect, ih_closed_form, ih_extended, truncated_leray
from .topo import MetricClass, StratumProfile, is_witt, middle_perversities, pair_cohomology

__all__ = [
    "InertiaTriple", "RatMatrix", "inertia", "kernel_dim", "rank", "signature",
    "HodgeTable", "PairingInput", "hodge_dims", "l2_signature", "tau_invariant", "weight_to_perversity",
    "IHQuery", "IHTable", "LerayData", "duality_defect", "ih_closed_form", "ih_extended", "truncated_leray",
    "MetricClass", "StratumProfile", "is_witt", "middle_perversities", "pair_cohomology",
]
