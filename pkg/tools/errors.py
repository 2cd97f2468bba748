from typing import Optional


class NambuError(Exception):
    """Base class for every error raised by the toolkit."""


class ExprSyntaxError(NambuError):
    def __init__(self, position: int, message: str):
        self.position = position
        self.message = message
        super().__init__(f"position {position}: {message}")


class UndeclaredName(NambuError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"undeclared name '{name}'")


class DomainError(NambuError):
    """Raised when an expression cannot be evaluated at a binding."""


class NotPolynomial(NambuError):
    """Raised when an expression has no canonical polynomial form."""


class SpecError(NambuError):
    def __init__(self, source: str, location: Optional[str], message: str):
        self.source = source
        self.location = location
        self.message = message
        where = f"{source}: {location}" if location else source
        super().__init__(f"{where}: {message}")


class IntegrationError(NambuError):
    pass


class StepDivergence(IntegrationError):
    def __init__(self, last_good_time: float):
        self.last_good_time = last_good_time
        super().__init__(f"non-finite state after t={last_good_time!r}")


class MidpointNoConvergence(IntegrationError):
    def __init__(self, time: float, iterations: int):
        self.time = time
        self.iterations = iterations
        super().__init__(f"implicit midpoint did not converge at t={time!r} after {iterations} iterations")
