__all__ = ["SelfadjointWarning", "TruncationWarning", "CertificateWarning"]


class SelfadjointWarning(UserWarning):
    """selfadjoint warning"""

    pass


class TruncationWarning(SelfadjointWarning):
    """Samples do not decay at the ends of their grid; the Fourier
    transform is computed anyway.

    Attributes:
        boundary_magnitude (:obj:`float`): largest sample magnitude at the grid
            ends, relative to the largest sample overall
    """

    def __init__(self, message: str, boundary_magnitude: float = 0.0):
        super().__init__(message)
        self.boundary_magnitude = boundary_magnitude


class CertificateWarning(SelfadjointWarning):
    """An iterative computation stopped before certifying its result"""

    pass
