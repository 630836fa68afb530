"""Exception types raised by the public API."""


class ParameterError(ValueError):
    """An argument is outside its admissible range."""


class DimensionError(ValueError):
    """An array does not have the shape implied by the lattice."""


class ValidationError(ValueError):
    """A configuration or tangent vector violates a manifold constraint."""


class EnumerationTooLarge(ParameterError):
    """A brute-force grid would exceed the configured enumeration cap."""

    def __init__(self, size, cap):
        self.size = size
        self.cap = cap
        super().__init__(
            f"grid enumeration needs {size:.3e} configurations, cap is {cap:.3e}"
        )
