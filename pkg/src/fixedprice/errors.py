"""Exception types shared across the package."""


class FixedPriceError(Exception):
    """Base class for all errors raised by this package."""


class CapExceededError(FixedPriceError):
    """An enumeration-based operation was asked to exceed its size cap."""

    def __init__(self, what: str, size: int, cap: int, detail: str = ""):
        self.what = what
        self.size = size
        self.cap = cap
        msg = f"{what}: size {size} exceeds cap {cap}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class InvalidDistributionError(FixedPriceError):
    """A ranking distribution violates its invariants (sum, duplicates, membership)."""


class InvalidInstanceError(FixedPriceError):
    """An instance violates its invariants (unknown items, negative prices)."""


class InvalidMechanismError(FixedPriceError):
    """A mechanism allocation table violates its structural invariants."""


class UnrealizablePrefixError(FixedPriceError):
    """A conditional operation was given a prefix with zero probability."""


class PrefixOverlapError(FixedPriceError):
    """An assortment intersects the conditioning prefix."""


class NonAbsorbingChainError(FixedPriceError):
    """A transition system does not reach the terminal state with probability 1."""


class InfeasibleTreeError(FixedPriceError):
    """A derived transition probability fell outside [0, 1]."""


class MonotonicityViolationError(FixedPriceError):
    """A quantity that is proven monotone failed its monotonicity check (bug signal)."""


class SubmodularityError(FixedPriceError):
    """A set function failed the submodularity check; carries a witness (S, j, j')."""

    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"submodularity violated at witness {witness}")


class IdentityCheckError(FixedPriceError):
    """An exact identity that must hold failed (bug signal or non-IC input)."""


class GuaranteeViolationError(FixedPriceError):
    """A proven approximation guarantee failed numerically (bug signal)."""


class ContainmentError(FixedPriceError):
    """A containment certificate failed verification (bug signal)."""


class UnsupportedShapeError(FixedPriceError):
    """A fixed multi-buyer mechanism was requested on an unsupported problem shape."""


class LPError(FixedPriceError):
    """Base class for linear-programming failures."""


class LPInfeasibleError(LPError):
    """The linear program has no feasible point."""


class LPUnboundedError(LPError):
    """The linear program is unbounded in the optimization direction."""
