"""Exception taxonomy.

GuardRefusal subclasses mark analysis guards that refuse to produce a
result (CLI exit code 1); ConfigError marks malformed configuration
(CLI exit code 2).
"""


class GuardRefusal(Exception):
    """An analysis precondition failed; the operation refuses rather than approximate."""


class RankGuardError(GuardRefusal):
    """Exhaustive enumeration refused: rank exceeds the guard."""


class PunctureError(GuardRefusal):
    """Puncturing precondition failed (reports the offending property)."""


class SelfDualityError(GuardRefusal):
    """Input code is not self-dual."""


class ContainmentError(GuardRefusal):
    """CSS validation failed: C2 is not contained in C1 with the right rank."""


class NotWeightDetermined(GuardRefusal):
    """Exact trap calculator refused: some reachable block weight >= d."""


class NoEventError(GuardRefusal):
    """Conditioning event has zero empirical probability."""


class ConfigError(Exception):
    """Malformed run configuration."""
