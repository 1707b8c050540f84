"""Exception hierarchy shared across the package."""


class PRCircuitError(Exception):
    """Base class; the CLI turns these into machine-readable error records."""


class NotUnitary(PRCircuitError, ValueError):
    pass


class NotClifford(PRCircuitError, ValueError):
    pass


class NotNormalized(PRCircuitError, ValueError):
    pass


class NotClassClosed(PRCircuitError, ValueError):
    pass


class OutOfRange(PRCircuitError, ValueError):
    pass


class DimensionLimit(PRCircuitError, ValueError):
    pass


class NonCommutingLayer(PRCircuitError, ValueError):
    pass


class ConvergenceFailure(PRCircuitError, RuntimeError):
    pass


class OscillationDetected(PRCircuitError, RuntimeError):
    def __init__(self, period):
        super().__init__(f"chain is periodic with period {period}")
        self.period = period


class FitIllConditioned(PRCircuitError, ValueError):
    pass


class TooFewSamples(PRCircuitError, ValueError):
    pass


class NoDecayWindow(PRCircuitError, ValueError):
    pass


class UnsupportedKind(PRCircuitError, ValueError):
    pass
