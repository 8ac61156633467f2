"""Shared exception and warning types for crlab."""


class CrlabError(Exception):
    """Base class for all crlab errors."""


class ChartDomainError(CrlabError):
    """Ambient point lies outside the model's coordinate chart."""


class StepSizeError(CrlabError):
    """Invalid step size for the geodesic integrator."""


class SingularPointError(CrlabError):
    """Surface point is singular (horizontal gradient of the defining
    function below tolerance), so the adapted frame is undefined."""


class DegenerateChartError(CrlabError):
    """Chart pushforward system too ill-conditioned to express tangent
    vectors in parameter coordinates."""


class HcrZeroError(CrlabError):
    """Quantity requiring Hcr != 0 requested at a point where |Hcr| is
    below tolerance."""


class SupportError(CrlabError):
    """Test-function support touches an excised or boundary region."""


class FitIllConditionedError(CrlabError):
    """Renormalized-volume fit system is underdetermined or too
    ill-conditioned (eps range too narrow)."""


class NonconvergenceWarning(UserWarning):
    """Quadrature or extrapolation sequence did not converge; the
    reported value should not be trusted to the requested tolerance."""
