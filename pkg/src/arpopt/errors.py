"""Exception hierarchy for arpopt.

All exceptions raised intentionally by the library derive from ArpoptError so
callers (and the CLI) can distinguish numerical-contract violations from
ordinary bugs.  ConfigError is reserved for malformed user input.
"""


class ArpoptError(Exception):
    """Base class for all arpopt errors."""


class ConfigError(ArpoptError):
    """Malformed configuration (bad keys, unparsable values, bad ranges)."""


class PrecisionMixError(ArpoptError):
    """Two Real values from different precision configurations were mixed."""


class DomainError(ArpoptError):
    """Mathematical domain violation (log of zero, nonpositive exponent, ...)."""


class OracleError(ArpoptError):
    """Derivative oracle cannot supply the requested order or metadata."""


class DegenerateModelError(ArpoptError):
    """A model whose derivative polynomial vanishes identically."""


class SubsolverError(ArpoptError):
    """The inner solver could not produce a valid approximate minimizer."""


class ThetaConditionError(SubsolverError):
    """No candidate satisfied the approximate-minimizer condition."""


class DescentStallError(SubsolverError):
    """Monotone descent stalled (step underflow) before reaching tolerance."""


class ContractViolation(ArpoptError):
    """A quantity violated an invariant the algorithm guarantees (e.g. a
    nonpositive predicted decrease)."""


class BracketError(ArpoptError):
    """A bisection bracket does not straddle the sought threshold."""


class AnalysisError(ArpoptError):
    """Trace analysis preconditions violated (too few samples, non-monotone)."""
