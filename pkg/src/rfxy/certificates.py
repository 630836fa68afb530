"""Relative optimality certificates against the analytic lower bound.

For small field strength the uniform configuration is within a relative gap
``2 delta / (d + delta)`` of the lower bound, and for large field strength the
field-aligned configuration is within ``2 d / (d + delta)``.  The two
thresholds below are where those gaps equal ``epsilon``.
"""

from dataclasses import dataclass

from .errors import ParameterError
from .model import lower_bound, reference_configs

BELOW = "below_delta1"
ABOVE = "above_delta2"
UNCERTIFIED = "uncertified"


@dataclass(frozen=True)
class EpsCertificate:
    epsilon: float
    delta: float
    regime: str
    delta1: float
    delta2: float
    certified_config: str
    gap_bound: float

    @property
    def certified(self):
        return self.regime != UNCERTIFIED

    def as_dict(self):
        return {
            "epsilon": self.epsilon,
            "delta": self.delta,
            "regime": self.regime,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "certified_config": self.certified_config,
            "gap_bound": self.gap_bound,
        }


def epsilon_thresholds(d, epsilon):
    if not 0.0 < epsilon < 2.0:
        raise ParameterError(f"epsilon must lie in (0, 2), got {epsilon}")
    return d * epsilon / (2.0 - epsilon), d * (2.0 - epsilon) / epsilon


def relative_gap(energy, inst):
    """``(energy - f_low) / |f_low|``; an upper bound on the true relative gap."""
    f_low = lower_bound(inst)
    return (energy - f_low) / abs(f_low)


def certify(inst, epsilon, best_energy=None):
    """Classify ``inst`` by field strength and bound the achievable gap.

    In the uncertified regime the gap reported is the computable
    ``(f_best - f_low) / |f_low|`` where ``f_best`` is the better of the two
    reference energies and ``best_energy`` (when given).
    """
    d, delta = inst.d, inst.delta
    delta1, delta2 = epsilon_thresholds(d, epsilon)
    if 0.0 < delta < delta1:
        regime, which, gap = BELOW, "aligned", 2.0 * delta / (d + delta)
    elif delta > delta2:
        regime, which, gap = ABOVE, "field-aligned", 2.0 * d / (d + delta)
    else:
        upper = reference_configs(inst).upper_bound
        if best_energy is not None:
            upper = min(upper, best_energy)
        regime, which, gap = UNCERTIFIED, "none", relative_gap(upper, inst)
    return EpsCertificate(
        epsilon=float(epsilon),
        delta=delta,
        regime=regime,
        delta1=delta1,
        delta2=delta2,
        certified_config=which,
        gap_bound=float(gap),
    )
