"""Shared pieces of the integration backends."""


class IntegrationError(RuntimeError):
    """Adaptive integration failed (step underflow or budget exhausted).

    ``t_fail_ps`` is the time at which the integrator gave up;
    ``fail_index`` identifies the offending batch entry when the backend
    knows it (the compiled per-point kernel does, the vectorized fallback
    shares one step sequence and does not).
    """

    def __init__(self, message, t_fail_ps, fail_index=None):
        super().__init__(f"{message} (at t = {t_fail_ps:.6g} ps)")
        self.t_fail_ps = t_fail_ps
        self.fail_index = fail_index


# Hard ceiling on accepted + rejected steps per integration; generous for
# any physically sensible parameter set, small enough to fail fast on a
# runaway tolerance.
MAX_STEPS = 2_000_000
